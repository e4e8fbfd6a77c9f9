//! Implementations of the experiment subcommands. Every command builds
//! its output deterministically from (flags, seed): replica fan-out is
//! parallel, but aggregation is ordered by replica index.

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use majority_core::contour2d::{
    check_corner_identity, generate_regular_cluster, ShapeClass,
};
use majority_core::dual1d::{
    coupling_check, coupling_segment, simulate_front, CouplingVerdict,
};
use majority_core::dynamics::{run, MajorityRule, VoterRule};
use majority_core::lattice::{read_grid_text, write_grid_text, LatticeError};
use majority_core::slice2d::{
    active_updates, big_n, drift_gap, drift_sigma, good_time_replica, simulate_slice,
    summarize_good_time, InterfaceState, SliceState,
};
use majority_core::stats::{
    density, disagreement_sample, extinction_replica, summarize_extinction, Estimate,
    ExtinctionFlag, ExtinctionOutcome, ModelKind, TorusModel,
};
use majority_core::{Configuration, Coord, HyperedgeFamily, LatticeGeometry, RngStream};

use crate::output::{emit, fmt_f64, to_pgm, Csv};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { path: PathBuf, source: io::Error },
    Parse { path: PathBuf, source: LatticeError },
    Generation(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Parse { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Generation(msg) => write!(f, "{msg}"),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Result of a command: how many mathematical violations were detected
/// (nonzero makes the process exit with code 2).
#[derive(Debug, Default)]
pub struct Outcome {
    pub violations: usize,
}

fn write_csv(out: Option<&Path>, csv: Csv) -> Result<(), CliError> {
    let bytes = csv.into_bytes();
    match out {
        Some(p) => emit(Some(p), &bytes).map_err(io_err(p)),
        None => emit(None, &bytes).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

// ---------------------------------------------------------------------
// snapshot

pub struct SnapshotParams {
    pub voter: bool,
    pub n: Option<u32>,
    pub side: i64,
    pub time: f64,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn snapshot(p: &SnapshotParams) -> Result<Outcome, CliError> {
    if p.voter && p.n.is_some() {
        return Err(usage("--n applies to the majority model only (offending flag: --n)"));
    }
    let geometry = LatticeGeometry::torus2d(p.side, p.side);
    let mut rng = RngStream::new(p.seed, 0);
    let initial = Configuration::bernoulli(geometry, 0.5, &mut rng);
    let final_config = if p.time <= 0.0 {
        initial
    } else if p.voter {
        let rule = VoterRule::new(geometry);
        run(&initial, &rule, p.time, &mut rng, &[]).final_config
    } else {
        let n = p.n.unwrap_or(2);
        let family = HyperedgeFamily::new(n, geometry)
            .map_err(|e| usage(format!("--side/--n: {e}")))?;
        let rule = MajorityRule::new(family);
        run(&initial, &rule, p.time, &mut rng, &[]).final_config
    };

    let txt_path = with_suffix(&p.out, ".txt");
    let pgm_path = with_suffix(&p.out, ".pgm");
    emit(Some(&txt_path), write_grid_text(&final_config).as_bytes())
        .map_err(io_err(&txt_path))?;
    emit(Some(&pgm_path), &to_pgm(&final_config)).map_err(io_err(&pgm_path))?;
    eprintln!(
        "snapshot: density {:.4}, wrote {} and {}",
        density(&final_config),
        txt_path.display(),
        pgm_path.display()
    );
    Ok(Outcome::default())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

// ---------------------------------------------------------------------
// theorem4

pub struct Theorem4Params {
    pub input: Option<PathBuf>,
    pub generate: usize,
    pub shape_class: Option<ShapeClass>,
    pub target_size: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub fn theorem4(p: &Theorem4Params) -> Result<Outcome, CliError> {
    let clusters: Vec<Configuration> = match &p.input {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(io_err(path))?;
            vec![read_grid_text(&text).map_err(|source| CliError::Parse {
                path: path.clone(),
                source,
            })?]
        }
        None => (0..p.generate)
            .map(|i| {
                let class = p.shape_class.unwrap_or(match i % 3 {
                    0 => ShapeClass::Rectangle,
                    1 => ShapeClass::Staircase,
                    _ => ShapeClass::RandomOrthoconvex,
                });
                let target = 80 + (i * 37) % 800;
                generate_regular_cluster(class, target, &mut RngStream::new(p.seed, i as u64))
                    .map_err(|e| CliError::Generation(format!("cluster {i}: {e}")))
            })
            .collect::<Result<_, _>>()?,
    };

    let source = match &p.input {
        Some(path) => format!("input={}", path.display()),
        None => format!(
            "generate={} shape-class={} target-size={}",
            p.generate,
            p.shape_class.map_or("mixed".into(), |c| format!("{c:?}").to_lowercase()),
            p.target_size
        ),
    };
    let mut csv = Csv::new(
        &format!("majority theorem4 {source} seed={}", p.seed),
        "cluster_id,vertices,c_plus,c_minus,phi_sum,identity_holds",
    );
    let mut violations = 0;
    for (i, cluster) in clusters.iter().enumerate() {
        let report = check_corner_identity(cluster);
        if report.asserted && !report.identity_holds {
            violations += 1;
        }
        csv.row(&format!(
            "{i},{},{},{},{},{}",
            report.vertex_count, report.c_plus, report.c_minus, report.phi_sum,
            report.identity_holds
        ));
    }
    write_csv(p.out.as_deref(), csv)?;
    Ok(Outcome { violations })
}

// ---------------------------------------------------------------------
// drift1d

pub struct Drift1dParams {
    pub n: u32,
    pub time: f64,
    pub replicas: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub fn drift1d(p: &Drift1dParams) -> Result<Outcome, CliError> {
    if p.replicas < 2 {
        return Err(usage("--replicas must be at least 2"));
    }
    let finals: Vec<i64> = (0..p.replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(p.seed, r as u64);
            simulate_front(p.n, p.time, &mut rng)
                .map(|t| t.final_position())
        })
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("--n: {e}")))?;

    let mut csv = Csv::new(
        &format!(
            "majority drift1d n={} time={} replicas={} seed={}",
            p.n, p.time, p.replicas, p.seed
        ),
        "n,T,replica,final_front",
    );
    for (r, x) in finals.iter().enumerate() {
        csv.row(&format!("{},{},{r},{x}", p.n, fmt_f64(p.time)));
    }
    let drifts: Vec<f64> = finals.iter().map(|&x| x as f64 / p.time).collect();
    let est = Estimate::from_values(&drifts);
    csv.comment(&format!(
        "mean_drift={} std_err={}",
        fmt_f64(est.mean),
        fmt_f64(est.std_err)
    ));
    write_csv(p.out.as_deref(), csv)?;
    Ok(Outcome::default())
}

// ---------------------------------------------------------------------
// coupling1d

pub struct Coupling1dParams {
    pub n: u32,
    pub time: f64,
    pub replicas: usize,
    pub pair_dist: i64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

/// Run one coupling replica, redrawing (with a deterministic stream
/// schedule) when the segment truncates; gives up after four redraws.
pub fn coupling_replica(
    n: u32,
    time: f64,
    pair_dist: i64,
    seed: u64,
    replica: u64,
    replica_stride: u64,
) -> (CouplingVerdict, usize) {
    let geometry = coupling_segment(0, pair_dist, n, time);
    let family = HyperedgeFamily::new(n, geometry).expect("segment fits the block");
    let mut redraws = 0usize;
    loop {
        let stream = replica + redraws as u64 * replica_stride;
        let mut rng = RngStream::new(seed, stream);
        let config = Configuration::bernoulli(geometry, 0.5, &mut rng);
        let log = majority_core::dynamics::generate_event_log(&family, time, &mut rng);
        let verdict = coupling_check(&config, 0, pair_dist, &family, &log)
            .expect("odd block side checked by the caller");
        if !verdict.truncated || redraws >= 4 {
            return (verdict, redraws);
        }
        redraws += 1;
    }
}

pub fn coupling1d(p: &Coupling1dParams) -> Result<Outcome, CliError> {
    if p.n.is_multiple_of(2) {
        return Err(usage("--n must be odd for coupling1d"));
    }
    if p.pair_dist < 0 {
        return Err(usage("--pair-dist must be nonnegative"));
    }
    let stride = p.replicas as u64;
    let results: Vec<(CouplingVerdict, usize)> = (0..p.replicas)
        .into_par_iter()
        .map(|r| coupling_replica(p.n, p.time, p.pair_dist, p.seed, r as u64, stride))
        .collect();

    let mut csv = Csv::new(
        &format!(
            "majority coupling1d n={} time={} replicas={} pair-dist={} seed={}",
            p.n, p.time, p.replicas, p.pair_dist, p.seed
        ),
        "n,T,replica,S,eta_x,eta_y,violated,truncated",
    );
    let mut violations = 0usize;
    let mut redraw_total = 0usize;
    for (r, (v, redraws)) in results.iter().enumerate() {
        redraw_total += redraws;
        if v.violated {
            violations += 1;
        }
        let s = v.meeting.map_or(String::new(), fmt_f64);
        csv.row(&format!(
            "{},{},{r},{s},{},{},{},{}",
            p.n,
            fmt_f64(p.time),
            u8::from(v.eta_x),
            u8::from(v.eta_y),
            v.violated,
            v.truncated
        ));
    }
    csv.comment(&format!("redraws={redraw_total}"));
    write_csv(p.out.as_deref(), csv)?;
    Ok(Outcome { violations })
}

// ---------------------------------------------------------------------
// slice

pub struct SliceTableParams {
    pub range: i64,
    pub out: Option<PathBuf>,
}

pub fn slice_table(p: &SliceTableParams) -> Result<Outcome, CliError> {
    let mut csv = Csv::new(
        &format!("majority slice table range={}", p.range),
        "a,b,drift_sigma,drift_gap,catalog_size",
    );
    let mut violations = 0usize;
    for a in -p.range..=0 {
        for b in a..=p.range {
            let iface = InterfaceState::new(a, b);
            let state = iface.representative();
            let ds = drift_sigma(state);
            if ds != 2 * (big_n(state) - 1) {
                violations += 1;
            }
            let dg = drift_gap(state).map_or(String::new(), |v| v.to_string());
            csv.row(&format!(
                "{a},{b},{ds},{dg},{}",
                active_updates(state).len()
            ));
        }
    }
    write_csv(p.out.as_deref(), csv)?;
    Ok(Outcome { violations })
}

pub struct SliceRunParams {
    pub time: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub fn slice_run(p: &SliceRunParams) -> Result<Outcome, CliError> {
    let traj = simulate_slice(p.time, &mut RngStream::new(p.seed, 0), SliceState::flat());
    let mut csv = Csv::new(
        &format!("majority slice run time={} seed={}", p.time, p.seed),
        "time,front_bottom,front_middle,front_top,sigma,gap",
    );
    csv.row("0.0,0,0,0,0,0");
    for &(t, s) in &traj.changes {
        csv.row(&format!(
            "{},{},{},{},{},{}",
            fmt_f64(t),
            s.bottom,
            s.middle,
            s.top,
            s.sigma(),
            s.gap()
        ));
    }
    write_csv(p.out.as_deref(), csv)?;
    Ok(Outcome::default())
}

pub struct SliceGoodtimeParams {
    pub interfaces: Vec<(i64, i64)>,
    pub replicas: usize,
    pub cap: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub fn slice_goodtime(p: &SliceGoodtimeParams) -> Result<Outcome, CliError> {
    if p.replicas < 2 {
        return Err(usage("--replicas must be at least 2"));
    }
    for &(a, b) in &p.interfaces {
        if !InterfaceState::new(a, b).is_valid() {
            return Err(usage(format!(
                "--interface {a},{b}: both coordinates positive (middle front cannot be smallest)"
            )));
        }
    }
    let iface_list = p
        .interfaces
        .iter()
        .map(|&(a, b)| format!("{a},{b}"))
        .collect::<Vec<_>>()
        .join(";");
    let mut csv = Csv::new(
        &format!(
            "majority slice goodtime interfaces={iface_list} replicas={} cap={} seed={}",
            p.replicas, p.cap, p.seed
        ),
        "a,b,e_estimate,std_err,replicas,cap_hits",
    );
    for (i, &(a, b)) in p.interfaces.iter().enumerate() {
        let iface = InterfaceState::new(a, b);
        let values: Vec<(f64, bool)> = (0..p.replicas)
            .into_par_iter()
            .map(|r| {
                let stream = (i * p.replicas + r) as u64;
                good_time_replica(iface, p.cap, &mut RngStream::new(p.seed, stream))
            })
            .collect();
        let summary = summarize_good_time(iface, p.cap, &values);
        csv.row(&format!(
            "{a},{b},{},{},{},{}",
            fmt_f64(summary.estimate.mean),
            fmt_f64(summary.estimate.std_err),
            summary.estimate.replicas,
            summary.cap_hits
        ));
    }
    write_csv(p.out.as_deref(), csv)?;
    Ok(Outcome::default())
}

// ---------------------------------------------------------------------
// extinction

pub struct ExtinctionParams {
    pub m_list: Vec<i64>,
    pub replicas: usize,
    pub margin: Option<i64>,
    pub cap: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub fn extinction(p: &ExtinctionParams) -> Result<Outcome, CliError> {
    if p.replicas < 2 {
        return Err(usage("--replicas must be at least 2"));
    }
    if p.m_list.iter().any(|&m| m < 1) {
        return Err(usage("--m-list entries must be positive"));
    }
    let m_desc = p
        .m_list
        .iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let mut csv = Csv::new(
        &format!(
            "majority extinction m-list={m_desc} replicas={} margin={} cap={} seed={}",
            p.replicas,
            p.margin.map_or("2m".into(), |m| m.to_string()),
            p.cap,
            p.seed
        ),
        "m,N0,replica,extinction_time,flag",
    );
    for (mi, &m) in p.m_list.iter().enumerate() {
        let margin = p.margin.unwrap_or(2 * m);
        let outcomes: Vec<ExtinctionOutcome> = (0..p.replicas)
            .into_par_iter()
            .map(|r| {
                let stream = (mi * p.replicas + r) as u64;
                extinction_replica(m, margin, p.cap, &mut RngStream::new(p.seed, stream))
            })
            .collect();
        for (r, o) in outcomes.iter().enumerate() {
            let flag = match o.flag {
                ExtinctionFlag::Ok => "ok",
                ExtinctionFlag::Boundary => "boundary",
                ExtinctionFlag::Horizon => "horizon",
            };
            csv.row(&format!(
                "{m},{},{r},{},{flag}",
                m * m,
                fmt_f64(o.time)
            ));
        }
        let summary = summarize_extinction(outcomes);
        csv.comment(&format!(
            "m={m} mean={} std_err={} flagged={}",
            fmt_f64(summary.estimate.mean),
            fmt_f64(summary.estimate.std_err),
            summary.flagged
        ));
    }
    write_csv(p.out.as_deref(), csv)?;
    Ok(Outcome::default())
}

// ---------------------------------------------------------------------
// cluster-stats

pub struct ClusterStatsParams {
    pub voter: bool,
    pub n: Option<u32>,
    pub dimension: u8,
    pub side: Option<i64>,
    pub pair_dist: i64,
    pub times: Vec<f64>,
    pub replicas: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub fn cluster_stats(p: &ClusterStatsParams) -> Result<Outcome, CliError> {
    if p.voter && p.n.is_some() {
        return Err(usage("--n applies to the majority model only (offending flag: --n)"));
    }
    if p.replicas < 2 {
        return Err(usage("--replicas must be at least 2"));
    }
    if p.pair_dist < 1 {
        return Err(usage("--pair-dist must be at least 1"));
    }
    if !(1..=2).contains(&p.dimension) {
        return Err(usage("--d must be 1 or 2"));
    }
    // Tori at least 20 pair distances wide keep wrap effects negligible
    // at the tested times.
    let side = p.side.unwrap_or(20 * p.pair_dist);
    if side < 20 * p.pair_dist {
        return Err(usage(format!(
            "--side {side} too small: need at least 20 * pair-dist = {}",
            20 * p.pair_dist
        )));
    }
    let kind = if p.voter {
        ModelKind::Voter
    } else {
        ModelKind::Majority {
            n: p.n.unwrap_or(3),
        }
    };
    let model = TorusModel {
        kind,
        dimension: p.dimension,
        side,
    };
    let x = Coord::new(0, 0);
    let y = Coord::new(p.pair_dist, 0);

    let model_desc = if p.voter {
        "voter".to_string()
    } else {
        format!("majority n={}", p.n.unwrap_or(3))
    };
    let times_desc = p
        .times
        .iter()
        .map(|t| fmt_f64(*t))
        .collect::<Vec<_>>()
        .join(",");
    let mut csv = Csv::new(
        &format!(
            "majority cluster-stats model={model_desc} d={} side={side} pair-dist={} times={times_desc} replicas={} seed={}",
            p.dimension, p.pair_dist, p.replicas, p.seed
        ),
        "t,pair_dist,estimate,std_err,replicas",
    );
    for (ti, &t) in p.times.iter().enumerate() {
        let values: Vec<f64> = (0..p.replicas)
            .into_par_iter()
            .map(|r| {
                let stream = (ti * p.replicas + r) as u64;
                let mut rng = RngStream::new(p.seed, stream);
                f64::from(disagreement_sample(&model, x, y, t, &mut rng))
            })
            .collect();
        let est = Estimate::from_values(&values);
        csv.row(&format!(
            "{},{},{},{},{}",
            fmt_f64(t),
            p.pair_dist,
            fmt_f64(est.mean),
            fmt_f64(est.std_err),
            est.replicas
        ));
    }
    write_csv(p.out.as_deref(), csv)?;
    Ok(Outcome::default())
}
