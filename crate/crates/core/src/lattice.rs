//! Finite lattice geometry, spin configurations, and block hyperedges.
//!
//! Two truncations of the infinite lattice are supported: periodic tori
//! (for long-run dynamics) and zero-padded windows (for finite-cluster
//! analysis, where every vertex outside the window is permanently in
//! state 0). Coordinates are signed, and a padded window carries an
//! explicit bounding box so clusters may sit anywhere.
//!
//! The canonical vertex order is lexicographic on `(x, y)`; every
//! iteration order in the crate derives from it, so outputs are
//! deterministic.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::rng::RngStream;

/// A lattice vertex. One-dimensional geometries use `y = 0` throughout.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Coord {
    pub x: i64,
    pub y: i64,
}

impl Coord {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

impl From<(i64, i64)> for Coord {
    fn from((x, y): (i64, i64)) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Boundary {
    /// Coordinates wrap modulo the side lengths.
    Periodic,
    /// Vertices outside the window are permanently in state 0.
    ZeroPadded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeError {
    /// Coordinate or block outside a zero-padded window.
    OutOfRange { coord: Coord },
    /// Block side must satisfy `n > 1`.
    BadBlockSide { n: u32 },
    /// A periodic axis shorter than the block side, or a window with no
    /// room for a single block.
    GeometryTooSmall { side: i64, n: u32 },
    /// Malformed grid text, with a 1-based line number.
    Parse { line: usize, kind: ParseErrorKind },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    EmptyInput,
    BadHeader,
    RaggedRow { expected: usize, got: usize },
    IllegalCharacter(char),
    RowCountMismatch { expected: usize, got: usize },
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::OutOfRange { coord } => {
                write!(f, "coordinate {coord} outside the zero-padded window")
            }
            LatticeError::BadBlockSide { n } => write!(f, "block side n = {n} must be > 1"),
            LatticeError::GeometryTooSmall { side, n } => {
                write!(f, "side {side} cannot host n = {n} blocks")
            }
            LatticeError::Parse { line, kind } => write!(f, "grid text line {line}: {kind}"),
        }
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::EmptyInput => write!(f, "empty input"),
            ParseErrorKind::BadHeader => write!(f, "header must be `x0 y0 width height`"),
            ParseErrorKind::RaggedRow { expected, got } => {
                write!(f, "row has {got} cells, expected {expected}")
            }
            ParseErrorKind::IllegalCharacter(c) => write!(f, "illegal character {c:?}"),
            ParseErrorKind::RowCountMismatch { expected, got } => {
                write!(f, "{got} rows, header promised {expected}")
            }
        }
    }
}

/// A finite lattice window: dimension (1 or 2), per-axis extent, and
/// boundary behavior. One-dimensional geometries have height 1 and
/// origin `y = 0`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct LatticeGeometry {
    dimension: u8,
    origin: Coord,
    width: i64,
    height: i64,
    boundary: Boundary,
}

impl LatticeGeometry {
    /// One-dimensional torus of `len` vertices (coordinates `0..len`).
    pub fn torus1d(len: i64) -> Self {
        assert!(len >= 1, "torus needs at least one vertex");
        Self {
            dimension: 1,
            origin: Coord::new(0, 0),
            width: len,
            height: 1,
            boundary: Boundary::Periodic,
        }
    }

    /// One-dimensional zero-padded segment `x0..x0 + len`.
    pub fn segment1d(x0: i64, len: i64) -> Self {
        assert!(len >= 1, "segment needs at least one vertex");
        Self {
            dimension: 1,
            origin: Coord::new(x0, 0),
            width: len,
            height: 1,
            boundary: Boundary::ZeroPadded,
        }
    }

    /// Two-dimensional torus with coordinates `(0..width, 0..height)`.
    pub fn torus2d(width: i64, height: i64) -> Self {
        assert!(width >= 1 && height >= 1, "torus needs at least one vertex");
        Self {
            dimension: 2,
            origin: Coord::new(0, 0),
            width,
            height,
            boundary: Boundary::Periodic,
        }
    }

    /// Two-dimensional zero-padded window with the given lower-left
    /// corner and extent.
    pub fn window2d(x0: i64, y0: i64, width: i64, height: i64) -> Self {
        assert!(width >= 1 && height >= 1, "window needs at least one vertex");
        Self {
            dimension: 2,
            origin: Coord::new(x0, y0),
            width,
            height,
            boundary: Boundary::ZeroPadded,
        }
    }

    pub fn dimension(&self) -> u8 {
        self.dimension
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn origin(&self) -> Coord {
        self.origin
    }

    pub fn width(&self) -> i64 {
        self.width
    }

    pub fn height(&self) -> i64 {
        self.height
    }

    pub fn vertex_count(&self) -> usize {
        (self.width * self.height) as usize
    }

    /// True if the coordinate lies inside the stored window.
    pub fn contains(&self, c: Coord) -> bool {
        c.x >= self.origin.x
            && c.x < self.origin.x + self.width
            && c.y >= self.origin.y
            && c.y < self.origin.y + self.height
    }

    /// Reduce a coordinate modulo the torus sides. Identity on padded
    /// geometry.
    pub fn wrap(&self, c: Coord) -> Coord {
        match self.boundary {
            Boundary::ZeroPadded => c,
            Boundary::Periodic => Coord::new(
                self.origin.x + (c.x - self.origin.x).rem_euclid(self.width),
                self.origin.y + (c.y - self.origin.y).rem_euclid(self.height),
            ),
        }
    }

    fn index(&self, c: Coord) -> usize {
        debug_assert!(self.contains(c));
        ((c.y - self.origin.y) * self.width + (c.x - self.origin.x)) as usize
    }

    /// All window vertices in lexicographic `(x, y)` order.
    pub fn vertices(&self) -> impl Iterator<Item = Coord> + '_ {
        let (x0, y0) = (self.origin.x, self.origin.y);
        (x0..x0 + self.width)
            .flat_map(move |x| (y0..y0 + self.height).map(move |y| Coord::new(x, y)))
    }
}

/// A spin configuration: one bit per window vertex. Reads outside a
/// zero-padded window return 0; reads on a torus wrap.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Configuration {
    geometry: LatticeGeometry,
    bits: Vec<bool>,
    ones: usize,
}

impl Configuration {
    pub fn all_zero(geometry: LatticeGeometry) -> Self {
        let n = geometry.vertex_count();
        Self {
            geometry,
            bits: alloc::vec![false; n],
            ones: 0,
        }
    }

    pub fn all_one(geometry: LatticeGeometry) -> Self {
        let n = geometry.vertex_count();
        Self {
            geometry,
            bits: alloc::vec![true; n],
            ones: n,
        }
    }

    /// Independent Bernoulli(`p`) states at every vertex, drawn in
    /// lexicographic order.
    pub fn bernoulli(geometry: LatticeGeometry, p: f64, rng: &mut RngStream) -> Self {
        let mut config = Self::all_zero(geometry);
        for c in geometry.vertices() {
            if rng.coin(p) {
                config.set(c, true);
            }
        }
        config
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    #[inline]
    pub fn get(&self, c: Coord) -> bool {
        let c = self.geometry.wrap(c);
        if self.geometry.contains(c) {
            self.bits[self.geometry.index(c)]
        } else {
            false
        }
    }

    /// Set a vertex state. Panics on writes outside a zero-padded
    /// window: the outside is permanently 0 by definition.
    #[inline]
    pub fn set(&mut self, c: Coord, value: bool) {
        let c = self.geometry.wrap(c);
        assert!(
            self.geometry.contains(c),
            "write at {c} outside the zero-padded window"
        );
        let idx = self.geometry.index(c);
        let old = self.bits[idx];
        if old != value {
            self.bits[idx] = value;
            if value {
                self.ones += 1;
            } else {
                self.ones -= 1;
            }
        }
    }

    /// Fill the inclusive rectangle `lo..=hi` with a value.
    pub fn set_block(&mut self, lo: Coord, hi: Coord, value: bool) {
        assert!(lo.x <= hi.x && lo.y <= hi.y, "degenerate rectangle");
        for x in lo.x..=hi.x {
            for y in lo.y..=hi.y {
                self.set(Coord::new(x, y), value);
            }
        }
    }

    pub fn ones_count(&self) -> usize {
        self.ones
    }

    pub fn vertex_count(&self) -> usize {
        self.bits.len()
    }

    /// True when every vertex shares the same state (both constant
    /// configurations are absorbing for the majority rule).
    pub fn is_constant(&self) -> bool {
        self.ones == 0 || self.ones == self.bits.len()
    }

    /// Vertices in state 1, in lexicographic order.
    pub fn ones(&self) -> impl Iterator<Item = Coord> + '_ {
        self.geometry.vertices().filter(move |&c| self.get(c))
    }

    /// Bounding box of the state-1 support, or `None` when empty.
    pub fn support_bbox(&self) -> Option<(Coord, Coord)> {
        let mut bounds: Option<(Coord, Coord)> = None;
        for c in self.ones() {
            bounds = Some(match bounds {
                None => (c, c),
                Some((lo, hi)) => (
                    Coord::new(lo.x.min(c.x), lo.y.min(c.y)),
                    Coord::new(hi.x.max(c.x), hi.y.max(c.y)),
                ),
            });
        }
        bounds
    }

    /// Copy of this zero-padded configuration whose window keeps at
    /// least `pad` cells of zeros around the support bounding box.
    /// Returns the configuration unchanged when the margin is already
    /// sufficient (or the support is empty).
    pub fn with_padding(&self, pad: i64) -> Configuration {
        assert!(
            self.geometry.boundary == Boundary::ZeroPadded,
            "padding applies to zero-padded windows"
        );
        let Some((lo, hi)) = self.support_bbox() else {
            return self.clone();
        };
        let g = &self.geometry;
        let enough = lo.x - g.origin.x >= pad
            && lo.y - g.origin.y >= pad
            && g.origin.x + g.width - 1 - hi.x >= pad
            && g.origin.y + g.height - 1 - hi.y >= pad;
        if enough {
            return self.clone();
        }
        let geometry = if g.dimension == 1 {
            LatticeGeometry::segment1d(lo.x - pad, hi.x - lo.x + 1 + 2 * pad)
        } else {
            LatticeGeometry::window2d(
                lo.x - pad,
                lo.y - pad,
                hi.x - lo.x + 1 + 2 * pad,
                hi.y - lo.y + 1 + 2 * pad,
            )
        };
        let mut out = Configuration::all_zero(geometry);
        for c in self.ones() {
            out.set(c, true);
        }
        out
    }
}

/// The family of all `n x ... x n` block hyperedges of a geometry.
/// A hyperedge is identified by its anchor: the block's lexicographically
/// smallest vertex. On a torus there is one hyperedge per vertex; on a
/// zero-padded window only blocks that lie fully inside are present.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct HyperedgeFamily {
    n: u32,
    geometry: LatticeGeometry,
}

impl HyperedgeFamily {
    pub fn new(n: u32, geometry: LatticeGeometry) -> Result<Self, LatticeError> {
        if n < 2 {
            return Err(LatticeError::BadBlockSide { n });
        }
        let n_i = n as i64;
        match geometry.boundary {
            Boundary::Periodic => {
                if geometry.width < n_i || (geometry.dimension == 2 && geometry.height < n_i) {
                    return Err(LatticeError::GeometryTooSmall {
                        side: geometry.width.min(geometry.height),
                        n,
                    });
                }
            }
            Boundary::ZeroPadded => {
                if geometry.width < n_i || (geometry.dimension == 2 && geometry.height < n_i) {
                    return Err(LatticeError::GeometryTooSmall {
                        side: geometry.width.min(geometry.height),
                        n,
                    });
                }
            }
        }
        Ok(Self { n, geometry })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    /// Number of vertices per hyperedge: `n^d`.
    pub fn block_size(&self) -> usize {
        let n = self.n as usize;
        if self.geometry.dimension == 1 {
            n
        } else {
            n * n
        }
    }

    fn anchor_extent(&self) -> (i64, i64) {
        let g = &self.geometry;
        match g.boundary {
            Boundary::Periodic => (g.width, g.height),
            Boundary::ZeroPadded => {
                let n = self.n as i64;
                let h = if g.dimension == 1 { 1 } else { g.height - n + 1 };
                (g.width - n + 1, h)
            }
        }
    }

    /// Number of distinct hyperedges.
    pub fn anchor_count(&self) -> usize {
        let (w, h) = self.anchor_extent();
        (w * h) as usize
    }

    /// Anchor of the `index`th hyperedge, in lexicographic anchor order.
    pub fn anchor_at(&self, index: usize) -> Coord {
        let (w, h) = self.anchor_extent();
        debug_assert!(index < (w * h) as usize);
        let x = index as i64 / h;
        let y = index as i64 % h;
        Coord::new(self.geometry.origin.x + x, self.geometry.origin.y + y)
    }

    /// True if the anchor identifies a hyperedge of this family.
    pub fn is_valid_anchor(&self, anchor: Coord) -> bool {
        let (w, h) = self.anchor_extent();
        let g = &self.geometry;
        match g.boundary {
            Boundary::Periodic => g.contains(g.wrap(anchor)),
            Boundary::ZeroPadded => {
                anchor.x >= g.origin.x
                    && anchor.x < g.origin.x + w
                    && anchor.y >= g.origin.y
                    && anchor.y < g.origin.y + h
            }
        }
    }

    /// The `n^d` vertices of the block anchored at `anchor`, in
    /// lexicographic offset order (wrapped on a torus).
    pub fn vertices_of(&self, anchor: Coord) -> Result<Vec<Coord>, LatticeError> {
        if !self.is_valid_anchor(anchor) {
            return Err(LatticeError::OutOfRange { coord: anchor });
        }
        Ok(self.block_vertices(anchor).collect())
    }

    /// Same vertices as [`vertices_of`](Self::vertices_of), without the
    /// anchor check or allocation. Used on the event hot path.
    #[inline]
    pub fn block_vertices(&self, anchor: Coord) -> impl Iterator<Item = Coord> + '_ {
        let n = self.n as i64;
        let dy_max = if self.geometry.dimension == 1 { 1 } else { n };
        let geometry = self.geometry;
        (0..n).flat_map(move |dx| {
            (0..dy_max).map(move |dy| geometry.wrap(Coord::new(anchor.x + dx, anchor.y + dy)))
        })
    }

    /// Number of state-1 vertices in the block anchored at `anchor`.
    pub fn count_ones(
        &self,
        config: &Configuration,
        anchor: Coord,
    ) -> Result<usize, LatticeError> {
        if !self.is_valid_anchor(anchor) {
            return Err(LatticeError::OutOfRange { coord: anchor });
        }
        Ok(self.block_vertices(anchor).filter(|&c| config.get(c)).count())
    }
}

/// Parse the grid text format: one row per line, `#` for state 1 and `.`
/// for state 0, the first row being the topmost (highest `y`). An
/// optional leading header `x0 y0 width height` fixes the bounding box;
/// without it the window is anchored at `(0, 0)`. The result is a
/// zero-padded window.
pub fn read_grid_text(text: &str) -> Result<Configuration, LatticeError> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.is_empty() || lines.iter().all(|l| l.trim().is_empty()) {
        return Err(LatticeError::Parse {
            line: 1,
            kind: ParseErrorKind::EmptyInput,
        });
    }

    let first = lines[0].trim_end();
    let has_header = !first.is_empty() && !first.chars().all(|c| c == '#' || c == '.');
    let (header, row_lines, first_row_line_no) = if has_header {
        let fields: Vec<&str> = first.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(LatticeError::Parse {
                line: 1,
                kind: ParseErrorKind::BadHeader,
            });
        }
        let mut vals = [0i64; 4];
        for (v, f) in vals.iter_mut().zip(&fields) {
            *v = f.parse().map_err(|_| LatticeError::Parse {
                line: 1,
                kind: ParseErrorKind::BadHeader,
            })?;
        }
        if vals[2] < 1 || vals[3] < 1 {
            return Err(LatticeError::Parse {
                line: 1,
                kind: ParseErrorKind::BadHeader,
            });
        }
        (Some((vals[0], vals[1], vals[2], vals[3])), &lines[1..], 2)
    } else {
        (None, &lines[..], 1)
    };

    let rows: Vec<&str> = row_lines
        .iter()
        .map(|l| l.trim_end_matches('\r'))
        .take_while(|l| !l.is_empty())
        .collect();
    if rows.is_empty() {
        return Err(LatticeError::Parse {
            line: first_row_line_no,
            kind: ParseErrorKind::EmptyInput,
        });
    }

    let (x0, y0, width, height) = match header {
        Some((x0, y0, w, h)) => (x0, y0, w, h),
        None => (0, 0, rows[0].chars().count() as i64, rows.len() as i64),
    };
    if rows.len() as i64 != height {
        return Err(LatticeError::Parse {
            line: first_row_line_no,
            kind: ParseErrorKind::RowCountMismatch {
                expected: height as usize,
                got: rows.len(),
            },
        });
    }

    let mut config = Configuration::all_zero(LatticeGeometry::window2d(x0, y0, width, height));
    for (i, row) in rows.iter().enumerate() {
        let line_no = first_row_line_no + i;
        let y = y0 + height - 1 - i as i64;
        let got = row.chars().count();
        if got as i64 != width {
            return Err(LatticeError::Parse {
                line: line_no,
                kind: ParseErrorKind::RaggedRow {
                    expected: width as usize,
                    got,
                },
            });
        }
        for (j, ch) in row.chars().enumerate() {
            match ch {
                '#' => config.set(Coord::new(x0 + j as i64, y), true),
                '.' => {}
                other => {
                    return Err(LatticeError::Parse {
                        line: line_no,
                        kind: ParseErrorKind::IllegalCharacter(other),
                    })
                }
            }
        }
    }
    Ok(config)
}

/// Render a configuration in the grid text format, with the bounding-box
/// header, topmost row first. Inverse of [`read_grid_text`].
pub fn write_grid_text(config: &Configuration) -> String {
    use core::fmt::Write;
    let g = config.geometry();
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {} {}", g.origin().x, g.origin().y, g.width(), g.height());
    for i in 0..g.height() {
        let y = g.origin().y + g.height() - 1 - i;
        for x in g.origin().x..g.origin().x + g.width() {
            out.push(if config.get(Coord::new(x, y)) { '#' } else { '.' });
        }
        out.push('\n');
    }
    out
}
