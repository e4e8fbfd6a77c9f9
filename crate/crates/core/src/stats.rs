//! Replica estimators and experiment drivers: densities, two-point
//! disagreement, occupation times, and extinction times of finite
//! clusters. All estimators are deterministic given (seed, parameters);
//! replica `r` of an experiment draws from stream `(seed, r)`.

use alloc::vec::Vec;

use crate::dynamics::{run, MajorityRule, Trajectory, VoterRule};
use crate::lattice::{Configuration, Coord, HyperedgeFamily, LatticeGeometry};
use crate::rng::RngStream;

/// A Monte Carlo estimate: sample mean and standard error
/// (sample standard deviation over the square root of the replica
/// count). At least two replicas are required for a reported SE.
#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub replicas: usize,
}

impl Estimate {
    pub fn from_values(values: &[f64]) -> Self {
        assert!(values.len() >= 2, "a standard error needs >= 2 replicas");
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        let std = libm::sqrt(ss / (n - 1.0));
        Self {
            mean,
            std_err: std / libm::sqrt(n),
            replicas: values.len(),
        }
    }
}

/// Fraction of vertices in state 1.
pub fn density(config: &Configuration) -> f64 {
    config.ones_count() as f64 / config.vertex_count() as f64
}

/// Time-weighted fraction of `[0, horizon]` the vertex spends in
/// state 1.
pub fn occupation_time(trajectory: &Trajectory, vertex: Coord) -> f64 {
    assert!(trajectory.horizon > 0.0, "occupation time needs a horizon");
    let path = trajectory.vertex_path(vertex);
    let mut occupied = 0.0;
    for (i, &(t, state)) in path.iter().enumerate() {
        if state {
            let until = path.get(i + 1).map_or(trajectory.horizon, |&(u, _)| u);
            occupied += until - t;
        }
    }
    occupied / trajectory.horizon
}

/// Which dynamics a torus experiment runs.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ModelKind {
    Majority { n: u32 },
    Voter,
}

/// A torus-bound model specification for replica experiments.
#[derive(Clone, Copy, Debug)]
pub struct TorusModel {
    pub kind: ModelKind,
    pub dimension: u8,
    pub side: i64,
}

impl TorusModel {
    pub fn geometry(&self) -> LatticeGeometry {
        match self.dimension {
            1 => LatticeGeometry::torus1d(self.side),
            2 => LatticeGeometry::torus2d(self.side, self.side),
            d => panic!("unsupported dimension {d}"),
        }
    }

    /// Run the model from `initial` to time `horizon`.
    pub fn run_to(
        &self,
        initial: &Configuration,
        horizon: f64,
        rng: &mut RngStream,
    ) -> Configuration {
        match self.kind {
            ModelKind::Majority { n } => {
                let family = HyperedgeFamily::new(n, self.geometry())
                    .expect("torus too small for the block side");
                let rule = MajorityRule::new(family);
                run(initial, &rule, horizon, rng, &[]).final_config
            }
            ModelKind::Voter => {
                let rule = VoterRule::new(self.geometry());
                run(initial, &rule, horizon, rng, &[]).final_config
            }
        }
    }
}

/// One replica of the two-point disagreement experiment: draw a
/// Bernoulli(1/2) initial state, run to time `t`, and report whether the
/// two vertices disagree.
pub fn disagreement_sample(
    model: &TorusModel,
    x: Coord,
    y: Coord,
    t: f64,
    rng: &mut RngStream,
) -> bool {
    let initial = Configuration::bernoulli(model.geometry(), 0.5, rng);
    let final_config = model.run_to(&initial, t, rng);
    final_config.get(x) != final_config.get(y)
}

/// Monte Carlo estimate of the probability that vertices `x` and `y`
/// disagree at time `t`, starting from the Bernoulli(1/2) product law.
pub fn disagreement_probability(
    model: &TorusModel,
    x: Coord,
    y: Coord,
    t: f64,
    replicas: usize,
    seed: u64,
) -> Estimate {
    let values: Vec<f64> = (0..replicas)
        .map(|r| {
            let mut rng = RngStream::new(seed, r as u64);
            if disagreement_sample(model, x, y, t, &mut rng) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    Estimate::from_values(&values)
}

/// Why an extinction replica ended.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExtinctionFlag {
    /// The configuration reached all-0.
    Ok,
    /// A state-1 vertex entered the boundary ring (width `n - 1`): the
    /// finite window stopped being a faithful truncation of the plane,
    /// so the replica must be excluded.
    Boundary,
    /// The time cap was reached first.
    Horizon,
}

#[derive(Clone, Copy, Debug)]
pub struct ExtinctionOutcome {
    pub time: f64,
    pub flag: ExtinctionFlag,
}

/// One extinction replica: an `m x m` square of 1s under the 3x3
/// majority rule on a zero-padded window with `margin` cells on every
/// side. Updates are exact for the infinite lattice as long as no state-1
/// vertex comes within `n - 1` cells of the window edge; the replica is
/// flagged the moment that fails.
pub fn extinction_replica(
    m: i64,
    margin: i64,
    horizon_cap: f64,
    rng: &mut RngStream,
) -> ExtinctionOutcome {
    assert!(m >= 1 && margin >= 1);
    let n = 3u32;
    let side = m + 2 * margin;
    let geometry = LatticeGeometry::window2d(-margin, -margin, side, side);
    let family = HyperedgeFamily::new(n, geometry).expect("window too small");
    let rule = MajorityRule::new(family);
    let mut config = Configuration::all_zero(geometry);
    config.set_block(Coord::new(0, 0), Coord::new(m - 1, m - 1), true);

    let ring = n as i64 - 1;
    let lo = -margin + ring;
    let hi = -margin + side - 1 - ring;
    let in_ring = |c: Coord| c.x < lo || c.x > hi || c.y < lo || c.y > hi;

    let anchors = family.anchor_count();
    let rate = anchors as f64;
    let mut t = 0.0;
    let mut flips: Vec<(Coord, bool)> = Vec::new();
    loop {
        t += rng.exp(rate);
        if t > horizon_cap {
            return ExtinctionOutcome {
                time: horizon_cap,
                flag: ExtinctionFlag::Horizon,
            };
        }
        let anchor = family.anchor_at(rng.index(anchors));
        rule.update_at(&mut config, anchor, &mut flips);
        for &(c, state) in flips.iter() {
            if state && in_ring(c) {
                return ExtinctionOutcome {
                    time: t,
                    flag: ExtinctionFlag::Boundary,
                };
            }
        }
        if config.ones_count() == 0 {
            return ExtinctionOutcome {
                time: t,
                flag: ExtinctionFlag::Ok,
            };
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExtinctionSummary {
    pub outcomes: Vec<ExtinctionOutcome>,
    /// Estimate over the unflagged replicas.
    pub estimate: Estimate,
    pub flagged: usize,
}

/// Replica fan of [`extinction_replica`]; `margin` defaults to `2 m`.
pub fn extinction_experiment(
    m: i64,
    margin: Option<i64>,
    replicas: usize,
    horizon_cap: f64,
    seed: u64,
) -> ExtinctionSummary {
    let margin = margin.unwrap_or(2 * m);
    let outcomes: Vec<ExtinctionOutcome> = (0..replicas)
        .map(|r| extinction_replica(m, margin, horizon_cap, &mut RngStream::new(seed, r as u64)))
        .collect();
    summarize_extinction(outcomes)
}

/// Aggregate pre-computed outcomes (used by parallel drivers). With
/// fewer than two unflagged replicas the estimate is NaN-valued rather
/// than fabricated.
pub fn summarize_extinction(outcomes: Vec<ExtinctionOutcome>) -> ExtinctionSummary {
    let ok_times: Vec<f64> = outcomes
        .iter()
        .filter(|o| o.flag == ExtinctionFlag::Ok)
        .map(|o| o.time)
        .collect();
    let flagged = outcomes.len() - ok_times.len();
    let estimate = if ok_times.len() >= 2 {
        Estimate::from_values(&ok_times)
    } else {
        Estimate {
            mean: f64::NAN,
            std_err: f64::NAN,
            replicas: ok_times.len(),
        }
    };
    ExtinctionSummary {
        estimate,
        outcomes,
        flagged,
    }
}
