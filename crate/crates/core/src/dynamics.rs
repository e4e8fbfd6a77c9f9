//! Exact continuous-time simulation of hypergraph spin dynamics.
//!
//! Every event site (a hyperedge anchor for block rules, a vertex for the
//! voter baseline) carries an independent rate-one Poisson clock. The
//! engine samples the superposition directly: one exponential gap at the
//! total rate, then a uniform site. This is equal in law to maintaining
//! one clock per site and needs O(1) memory per event.
//!
//! The Poisson field can also be materialized as an [`EventLog`] and
//! replayed, which is the backbone of every coupling argument in the
//! crate: two processes driven by the same log are coupled through the
//! same graphical representation.

use alloc::string::String;
use alloc::vec::Vec;

use crate::lattice::{Configuration, Coord, HyperedgeFamily, LatticeGeometry};
use crate::rng::RngStream;

/// A local update rule driven by the Poisson event stream. Sites are
/// indexed `0..site_count()`; each fires at rate one.
pub trait UpdateRule {
    fn site_count(&self) -> usize;

    fn site_coord(&self, index: usize) -> Coord;

    /// Apply the update at event site `index`. `flips` is cleared and
    /// filled with the cells that changed, as (coordinate, new state).
    fn apply(
        &self,
        config: &mut Configuration,
        index: usize,
        rng: &mut RngStream,
        flips: &mut Vec<(Coord, bool)>,
    );
}

/// Block-majority update: the whole hyperedge adopts its majority state,
/// with ties (possible only for even block cardinality) going to state 1.
/// The replacement content is therefore always all-0 or all-1.
#[derive(Clone, Copy, Debug)]
pub struct MajorityRule {
    family: HyperedgeFamily,
}

impl MajorityRule {
    pub fn new(family: HyperedgeFamily) -> Self {
        Self { family }
    }

    pub fn family(&self) -> &HyperedgeFamily {
        &self.family
    }

    /// Majority update of the block anchored at `anchor`: with `k` ones
    /// in the block, the block becomes all-1 when `2k >= n^d` and all-0
    /// otherwise. Cells outside the block are untouched. Changed cells
    /// are appended to `flips` (cleared first).
    pub fn update_at(
        &self,
        config: &mut Configuration,
        anchor: Coord,
        flips: &mut Vec<(Coord, bool)>,
    ) {
        flips.clear();
        let k = self
            .family
            .block_vertices(anchor)
            .filter(|&c| config.get(c))
            .count();
        let target = 2 * k >= self.family.block_size();
        if (target && k == self.family.block_size()) || (!target && k == 0) {
            return;
        }
        for c in self.family.block_vertices(anchor) {
            if config.get(c) != target {
                config.set(c, target);
                flips.push((c, target));
            }
        }
    }
}

impl UpdateRule for MajorityRule {
    fn site_count(&self) -> usize {
        self.family.anchor_count()
    }

    fn site_coord(&self, index: usize) -> Coord {
        self.family.anchor_at(index)
    }

    fn apply(
        &self,
        config: &mut Configuration,
        index: usize,
        _rng: &mut RngStream,
        flips: &mut Vec<(Coord, bool)>,
    ) {
        self.update_at(config, self.family.anchor_at(index), flips);
    }
}

/// Voter baseline: vertices update at rate one by mimicking one of their
/// `2d` nearest neighbors chosen uniformly at random. Torus only.
#[derive(Clone, Copy, Debug)]
pub struct VoterRule {
    geometry: LatticeGeometry,
}

impl VoterRule {
    pub fn new(geometry: LatticeGeometry) -> Self {
        assert!(
            geometry.boundary() == crate::lattice::Boundary::Periodic,
            "the voter baseline runs on tori"
        );
        Self { geometry }
    }

    /// The vertex adopts the state of a uniformly chosen nearest
    /// neighbor; at most one cell changes.
    pub fn update_at(
        &self,
        config: &mut Configuration,
        vertex: Coord,
        rng: &mut RngStream,
        flips: &mut Vec<(Coord, bool)>,
    ) {
        flips.clear();
        let d = self.geometry.dimension() as usize;
        let neighbor = match (d, rng.index(2 * d)) {
            (1, 0) | (2, 0) => Coord::new(vertex.x - 1, vertex.y),
            (1, 1) | (2, 1) => Coord::new(vertex.x + 1, vertex.y),
            (2, 2) => Coord::new(vertex.x, vertex.y - 1),
            (2, 3) => Coord::new(vertex.x, vertex.y + 1),
            _ => unreachable!(),
        };
        let state = config.get(neighbor);
        if config.get(vertex) != state {
            config.set(vertex, state);
            flips.push((self.geometry.wrap(vertex), state));
        }
    }
}

impl UpdateRule for VoterRule {
    fn site_count(&self) -> usize {
        self.geometry.vertex_count()
    }

    fn site_coord(&self, index: usize) -> Coord {
        let h = self.geometry.height();
        let x = self.geometry.origin().x + index as i64 / h;
        let y = self.geometry.origin().y + index as i64 % h;
        Coord::new(x, y)
    }

    fn apply(
        &self,
        config: &mut Configuration,
        index: usize,
        rng: &mut RngStream,
        flips: &mut Vec<(Coord, bool)>,
    ) {
        self.update_at(config, self.site_coord(index), rng, flips);
    }
}

/// One Poisson event: an arrival time and the anchor of the hyperedge it
/// belongs to.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Event {
    pub time: f64,
    pub anchor: Coord,
}

/// The graphical representation over a finite horizon: the time-ordered
/// record of all Poisson arrivals, with strictly increasing times in
/// `(0, horizon]`.
#[derive(Clone, PartialEq, Debug)]
pub struct EventLog {
    pub horizon: f64,
    pub dimension: u8,
    pub events: Vec<Event>,
}

impl EventLog {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Debug dump: `time,anchor_x[,anchor_y]`, one row per event, times
    /// in full-precision decimal.
    pub fn to_csv(&self) -> String {
        use core::fmt::Write;
        let mut out = String::new();
        if self.dimension == 1 {
            out.push_str("time,anchor_x\n");
            for ev in &self.events {
                let _ = writeln!(out, "{:?},{}", ev.time, ev.anchor.x);
            }
        } else {
            out.push_str("time,anchor_x,anchor_y\n");
            for ev in &self.events {
                let _ = writeln!(out, "{:?},{},{}", ev.time, ev.anchor.x, ev.anchor.y);
            }
        }
        out
    }
}

/// Sample the superposition of the family's independent rate-one Poisson
/// processes up to `horizon`: gaps are Exp(M) with M hyperedges, anchors
/// uniform, all independent. The draw order (gap, then anchor index) is
/// the same as in [`run`], so a log generated from a given stream replays
/// to the trajectory the streaming engine produces from an equal stream.
pub fn generate_event_log(
    family: &HyperedgeFamily,
    horizon: f64,
    rng: &mut RngStream,
) -> EventLog {
    let m = family.anchor_count();
    let rate = m as f64;
    let mut events = Vec::new();
    let mut t = 0.0;
    loop {
        t += rng.exp(rate);
        if t > horizon {
            break;
        }
        let index = rng.index(m);
        events.push(Event {
            time: t,
            anchor: family.anchor_at(index),
        });
    }
    EventLog {
        horizon,
        dimension: family.geometry().dimension(),
        events,
    }
}

/// The cells flipped by one event, with the event time.
#[derive(Clone, PartialEq, Debug)]
pub struct ChangePoint {
    pub time: f64,
    pub flips: Vec<(Coord, bool)>,
}

/// A trajectory stored as change points only: majority updates are
/// frequently no-ops, and dense sampling is an observer concern.
#[derive(Clone, PartialEq, Debug)]
pub struct Trajectory {
    pub initial: Configuration,
    pub horizon: f64,
    pub changes: Vec<ChangePoint>,
}

impl Trajectory {
    pub fn final_config(&self) -> Configuration {
        let mut config = self.initial.clone();
        for cp in &self.changes {
            for &(c, v) in &cp.flips {
                config.set(c, v);
            }
        }
        config
    }

    /// The state path of one vertex: `(0, initial state)` followed by
    /// every time the vertex flips.
    pub fn vertex_path(&self, vertex: Coord) -> Vec<(f64, bool)> {
        let v = self.initial.geometry().wrap(vertex);
        let mut path = alloc::vec![(0.0, self.initial.get(v))];
        for cp in &self.changes {
            for &(c, state) in &cp.flips {
                if c == v && state != path.last().unwrap().1 {
                    path.push((cp.time, state));
                }
            }
        }
        path
    }
}

/// Deterministically apply the majority rule at every logged event, in
/// time order. Only change points are recorded.
pub fn replay_forward(
    initial: &Configuration,
    log: &EventLog,
    rule: &MajorityRule,
) -> Trajectory {
    let mut config = initial.clone();
    let mut changes = Vec::new();
    let mut flips = Vec::new();
    for ev in &log.events {
        rule.update_at(&mut config, ev.anchor, &mut flips);
        if !flips.is_empty() {
            changes.push(ChangePoint {
                time: ev.time,
                flips: core::mem::take(&mut flips),
            });
        }
    }
    Trajectory {
        initial: initial.clone(),
        horizon: log.horizon,
        changes,
    }
}

/// A configuration snapshot taken at a requested observation time.
/// `clamped` marks a request outside `[0, horizon]`, reported with the
/// configuration at the horizon.
#[derive(Clone, Debug)]
pub struct Sample {
    pub requested: f64,
    pub clamped: bool,
    pub config: Configuration,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub final_config: Configuration,
    /// One sample per requested time, in the order they were requested.
    pub samples: Vec<Sample>,
    /// Poisson events consumed (absorption stops the clock early).
    pub events: u64,
}

/// Streaming simulation to `horizon`: distributionally identical to
/// [`generate_event_log`] + [`replay_forward`] without materializing the
/// log (and an identical trajectory for the majority rule when given an
/// equal stream). Stops early once the configuration is constant, which
/// is absorbing for both shipped rules.
pub fn run<R: UpdateRule>(
    initial: &Configuration,
    rule: &R,
    horizon: f64,
    rng: &mut RngStream,
    sample_times: &[f64],
) -> RunResult {
    let mut config = initial.clone();
    let mut order: Vec<usize> = (0..sample_times.len())
        .filter(|&i| sample_times[i] >= 0.0)
        .collect();
    order.sort_by(|&a, &b| sample_times[a].total_cmp(&sample_times[b]));

    let mut samples: Vec<Option<Sample>> = sample_times.iter().map(|_| None).collect();
    let mut next_sample = 0usize;
    let rate = rule.site_count() as f64;
    let mut t = 0.0;
    let mut events = 0u64;
    let mut flips: Vec<(Coord, bool)> = Vec::new();

    while !config.is_constant() {
        let next_t = t + rng.exp(rate);
        while next_sample < order.len() {
            let idx = order[next_sample];
            let st = sample_times[idx];
            if st <= horizon && st < next_t {
                samples[idx] = Some(Sample {
                    requested: st,
                    clamped: false,
                    config: config.clone(),
                });
                next_sample += 1;
            } else {
                break;
            }
        }
        if next_t > horizon {
            break;
        }
        t = next_t;
        let site = rng.index(rule.site_count());
        rule.apply(&mut config, site, rng, &mut flips);
        events += 1;
    }

    // Remaining in-range samples see the frozen or final configuration;
    // out-of-range requests are clamped to the horizon.
    for &idx in &order[next_sample..] {
        let st = sample_times[idx];
        samples[idx] = Some(Sample {
            requested: st,
            clamped: st > horizon,
            config: config.clone(),
        });
    }
    for (idx, slot) in samples.iter_mut().enumerate() {
        if slot.is_none() {
            *slot = Some(Sample {
                requested: sample_times[idx],
                clamped: true,
                config: config.clone(),
            });
        }
    }

    RunResult {
        final_config: config,
        samples: samples.into_iter().map(Option::unwrap).collect(),
        events,
    }
}
