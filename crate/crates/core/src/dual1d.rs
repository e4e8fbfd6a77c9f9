//! One-dimensional analysis tools.
//!
//! For even block sides the rightmost-1 front of a left-filled
//! configuration is a jump chain with a simple rate table; for odd block
//! sides the backward center paths of two space-time points couple their
//! opinions: once the paths have met, the two opinions at the horizon
//! must agree. Both objects are exercised against the full engine by
//! driving them from the same event log.

use alloc::vec::Vec;
use core::fmt;

use crate::dynamics::{replay_forward, EventLog, MajorityRule};
use crate::lattice::{Boundary, Configuration, Coord, HyperedgeFamily, LatticeGeometry};
use crate::rng::RngStream;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DualError {
    /// Front analysis requires an even block side.
    EvenSideRequired { n: u32 },
    /// Center paths require an odd block side (centers must be vertices).
    OddSideRequired { n: u32 },
    /// A path's dependence cone reached the simulated segment boundary;
    /// the caller must enlarge the segment.
    Truncated,
}

impl fmt::Display for DualError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualError::EvenSideRequired { n } => write!(f, "n = {n} must be even"),
            DualError::OddSideRequired { n } => write!(f, "n = {n} must be odd"),
            DualError::Truncated => write!(f, "path reached the simulated segment boundary"),
        }
    }
}

/// The jump rate table of the rightmost-1 front for even `n`: the front
/// moves by each of `1 - n/2, ..., n/2` at rate one (`n` clocks in
/// total, the zero jump included), for a mean drift of `n/2` per unit
/// time.
pub fn front_increments(n: u32) -> Result<Vec<(i64, f64)>, DualError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(DualError::EvenSideRequired { n });
    }
    let half = n as i64 / 2;
    Ok((1 - half..=half).map(|j| (j, 1.0)).collect())
}

/// Effect of an update at anchor `u` on a left-filled front at `front`:
/// `None` when the configuration is unchanged, otherwise the new front.
/// With `k = front - u + 1` ones in the block, the block fills (front
/// `u + n - 1`) when `2k >= n` and empties its ones (front `u - 1`)
/// otherwise.
#[inline]
fn front_jump(front: i64, anchor: i64, n: u32) -> Option<i64> {
    let n = n as i64;
    if anchor > front || anchor < front - n + 1 {
        return None;
    }
    let k = front - anchor + 1;
    let next = if 2 * k >= n { anchor + n - 1 } else { anchor - 1 };
    (next != front).then_some(next)
}

/// Trajectory of the front jump chain: change points only, plus the
/// total number of clock events consumed (zero jumps included).
#[derive(Clone, Debug)]
pub struct FrontTrajectory {
    pub start: i64,
    pub horizon: f64,
    pub changes: Vec<(f64, i64)>,
    pub events: u64,
}

impl FrontTrajectory {
    pub fn final_position(&self) -> i64 {
        self.changes.last().map_or(self.start, |&(_, x)| x)
    }

    /// Net displacement per unit time.
    pub fn drift(&self) -> f64 {
        (self.final_position() - self.start) as f64 / self.horizon
    }
}

/// Simulate the abstract front chain from position 0: events arrive at
/// total rate `n` (one per containing hyperedge) and the event's anchor
/// is uniform among the `n` blocks containing the front.
pub fn simulate_front(
    n: u32,
    horizon: f64,
    rng: &mut RngStream,
) -> Result<FrontTrajectory, DualError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(DualError::EvenSideRequired { n });
    }
    let mut front = 0i64;
    let mut t = 0.0;
    let mut changes = Vec::new();
    let mut events = 0u64;
    let rate = n as f64;
    loop {
        t += rng.exp(rate);
        if t > horizon {
            break;
        }
        events += 1;
        let anchor = front - n as i64 + 1 + rng.index(n as usize) as i64;
        if let Some(next) = front_jump(front, anchor, n) {
            front = next;
            changes.push((t, front));
        }
    }
    Ok(FrontTrajectory {
        start: 0,
        horizon,
        changes,
        events,
    })
}

/// Fold an event log through the front jump rule. Driving this fold and
/// the full engine from the same log must give identical trajectories;
/// that equality is the oracle for the rate table.
pub fn front_path_from_log(start: i64, n: u32, log: &EventLog) -> FrontTrajectory {
    let mut front = start;
    let mut changes = Vec::new();
    let mut events = 0u64;
    for ev in &log.events {
        if ev.anchor.x <= front && ev.anchor.x > front - n as i64 {
            events += 1;
        }
        if let Some(next) = front_jump(front, ev.anchor.x, n) {
            front = next;
            changes.push((ev.time, front));
        }
    }
    FrontTrajectory {
        start,
        horizon: log.horizon,
        changes,
        events,
    }
}

/// Center of the hyperedge anchored at `u` (odd `n`).
#[inline]
pub fn hyperedge_center(anchor: i64, n: u32) -> i64 {
    anchor + (n as i64 - 1) / 2
}

/// A backward center path: starting from a vertex at the horizon, each
/// time the path encounters a logged block update (going backward in
/// time) it jumps to that block's center. `steps` records every
/// encounter as (backward time, center); the landing point may equal
/// the current position.
#[derive(Clone, Debug)]
pub struct CenterPath {
    pub start: i64,
    pub horizon: f64,
    pub steps: Vec<(f64, i64)>,
}

impl CenterPath {
    pub fn final_position(&self) -> i64 {
        self.steps.last().map_or(self.start, |&(_, c)| c)
    }
}

fn check_odd_segment(family: &HyperedgeFamily) -> Result<(i64, i64), DualError> {
    let n = family.n();
    if n.is_multiple_of(2) {
        return Err(DualError::OddSideRequired { n });
    }
    let g = family.geometry();
    assert!(
        g.dimension() == 1 && g.boundary() == Boundary::ZeroPadded,
        "center paths run on zero-padded one-dimensional segments"
    );
    // A position is safe while every block containing it lies inside the
    // segment; outside events the log cannot contain could otherwise
    // have moved the path.
    let lo = g.origin().x + n as i64 - 1;
    let hi = g.origin().x + g.width() - n as i64;
    Ok((lo, hi))
}

/// Backward center path of the space-time point `(x, horizon)`.
pub fn center_path(
    x: i64,
    family: &HyperedgeFamily,
    log: &EventLog,
) -> Result<CenterPath, DualError> {
    let (lo, hi) = check_odd_segment(family)?;
    if x < lo || x > hi {
        return Err(DualError::Truncated);
    }
    let n = family.n() as i64;
    let mut pos = x;
    let mut steps = Vec::new();
    for ev in log.events.iter().rev() {
        let u = ev.anchor.x;
        if pos >= u && pos < u + n {
            pos = hyperedge_center(u, family.n());
            steps.push((log.horizon - ev.time, pos));
            if pos < lo || pos > hi {
                return Err(DualError::Truncated);
            }
        }
    }
    Ok(CenterPath {
        start: x,
        horizon: log.horizon,
        steps,
    })
}

/// First backward time at which the center paths of `(x, horizon)` and
/// `(y, horizon)` coincide, or `None` if they never meet within the log.
/// Both paths are driven by the same log: an event containing both
/// positions sends both to its center.
pub fn meeting_time(
    x: i64,
    y: i64,
    family: &HyperedgeFamily,
    log: &EventLog,
) -> Result<Option<f64>, DualError> {
    let (lo, hi) = check_odd_segment(family)?;
    if x < lo || x > hi || y < lo || y > hi {
        return Err(DualError::Truncated);
    }
    if x == y {
        return Ok(Some(0.0));
    }
    let n = family.n() as i64;
    let mut px = x;
    let mut py = y;
    for ev in log.events.iter().rev() {
        let u = ev.anchor.x;
        let c = hyperedge_center(u, family.n());
        let mut moved = false;
        if px >= u && px < u + n {
            px = c;
            moved = true;
        }
        if py >= u && py < u + n {
            py = c;
            moved = true;
        }
        if moved {
            if px < lo || px > hi || py < lo || py > hi {
                return Err(DualError::Truncated);
            }
            if px == py {
                return Ok(Some(log.horizon - ev.time));
            }
        }
    }
    Ok(None)
}

/// Outcome of one coupling check. When the center paths of `x` and `y`
/// meet at backward time `S < horizon`, the opinions at the horizon must
/// agree; `violated` is true exactly when that fails, so any `true` is a
/// bug detector. A truncated run carries no verdict and must be
/// excluded and redrawn, never silently kept.
#[derive(Clone, Copy, Debug)]
pub struct CouplingVerdict {
    pub meeting: Option<f64>,
    pub eta_x: bool,
    pub eta_y: bool,
    pub violated: bool,
    pub truncated: bool,
}

/// Check the center-path coupling on one (initial configuration, log)
/// pair: replay the log forward for the opinions at the horizon and walk
/// it backward for the meeting time.
pub fn coupling_check(
    config0: &Configuration,
    x: i64,
    y: i64,
    family: &HyperedgeFamily,
    log: &EventLog,
) -> Result<CouplingVerdict, DualError> {
    check_odd_segment(family)?;
    let meeting = match meeting_time(x, y, family, log) {
        Ok(s) => s,
        Err(DualError::Truncated) => {
            return Ok(CouplingVerdict {
                meeting: None,
                eta_x: false,
                eta_y: false,
                violated: false,
                truncated: true,
            })
        }
        Err(e) => return Err(e),
    };
    let rule = MajorityRule::new(*family);
    let final_config = replay_forward(config0, log, &rule).final_config();
    let eta_x = final_config.get(Coord::new(x, 0));
    let eta_y = final_config.get(Coord::new(y, 0));
    Ok(CouplingVerdict {
        meeting,
        eta_x,
        eta_y,
        violated: meeting.is_some() && eta_x != eta_y,
        truncated: false,
    })
}

/// Zero-padded segment sized for a coupling check: half-width
/// `|x - y| / 2 + 8 n T` around the pair's midpoint keeps the
/// truncation rate negligible for the horizons used here.
pub fn coupling_segment(x: i64, y: i64, n: u32, horizon: f64) -> LatticeGeometry {
    let mid = (x + y).div_euclid(2);
    let spread = (x - y).abs() / 2 + 1;
    let margin = libm::ceil(8.0 * n as f64 * horizon) as i64 + n as i64;
    let r = spread + margin;
    LatticeGeometry::segment1d(mid - r, 2 * r + 1)
}
