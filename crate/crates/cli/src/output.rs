//! Output helpers: CSV buffers with a leading configuration comment,
//! binary PGM images, and path-reporting file writes.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use majority_core::{Configuration, Coord};

/// A CSV document built in memory so runs are byte-reproducible. The
/// first line is a `#` comment recording the full configuration and
/// seed.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(config_comment: &str, header: &str) -> Self {
        let mut buf = String::new();
        let _ = writeln!(buf, "# {config_comment}");
        let _ = writeln!(buf, "{header}");
        Self { buf }
    }

    pub fn row(&mut self, row: &str) {
        let _ = writeln!(self.buf, "{row}");
    }

    pub fn comment(&mut self, text: &str) {
        let _ = writeln!(self.buf, "# {text}");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf.into_bytes()
    }
}

/// Full-precision decimal for CSV fields: shortest representation that
/// round-trips.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Render a configuration as an 8-bit binary grayscale PGM (P5): state 0
/// maps to 255 (white), state 1 to 0 (black); rows top to bottom.
pub fn to_pgm(config: &Configuration) -> Vec<u8> {
    let g = config.geometry();
    let (w, h) = (g.width(), g.height());
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.reserve((w * h) as usize);
    for i in 0..h {
        let y = g.origin().y + h - 1 - i;
        for x in g.origin().x..g.origin().x + w {
            out.push(if config.get(Coord::new(x, y)) { 0 } else { 255 });
        }
    }
    out
}

/// Write bytes to a file, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => io::stdout().write_all(bytes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use majority_core::LatticeGeometry;

    #[test]
    fn pgm_is_row_major_top_down() {
        // 3 wide, 2 tall; a single 1 in the top-left cell.
        let mut config =
            Configuration::all_zero(LatticeGeometry::window2d(0, 0, 3, 2));
        config.set(Coord::new(0, 1), true);
        let pgm = to_pgm(&config);
        let header = b"P5\n3 2\n255\n";
        assert!(pgm.starts_with(header));
        assert_eq!(&pgm[header.len()..], &[0, 255, 255, 255, 255, 255]);
    }

    #[test]
    fn csv_floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 25.0, 1e-12, 123456.789] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }
}
