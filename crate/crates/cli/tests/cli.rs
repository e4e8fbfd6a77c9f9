//! CLI behavior: flag validation, exit codes, config-file merging, and
//! output formats.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_majority"))
}

#[test]
fn voter_with_block_side_is_rejected_naming_the_flag() {
    let out = bin()
        .args(["snapshot", "--model", "voter", "--n", "3", "--side", "20", "--out", "/tmp/x"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--n"), "message must name the offending flag: {err}");
}

#[test]
fn snapshot_requires_two_dimensions_and_an_output_path() {
    let out = bin().args(["snapshot", "--d", "1", "--out", "/tmp/x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["snapshot", "--side", "16", "--time", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--out"));
}

#[test]
fn unknown_flags_are_usage_errors() {
    let out = bin().args(["drift1d", "--bogus", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_lists_defaults_and_exits_zero() {
    for sub in [
        vec!["snapshot"],
        vec!["theorem4"],
        vec!["drift1d"],
        vec!["coupling1d"],
        vec!["slice", "table"],
        vec!["slice", "run"],
        vec!["slice", "goodtime"],
        vec!["extinction"],
        vec!["cluster-stats"],
    ] {
        let mut args = sub.clone();
        args.push("--help");
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{sub:?} --help");
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(
            text.contains("default") || text.contains("[default"),
            "{sub:?} --help does not list defaults"
        );
        assert!(text.contains("--seed"), "{sub:?} --help misses --seed");
    }
}

#[test]
fn config_file_supplies_defaults_and_explicit_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("sweep.cfg");
    std::fs::write(&config_path, "n=4\ntime=30\nreplicas=6\nseed=12\n").unwrap();

    let out_a = dir.path().join("a.csv");
    let status = bin()
        .args([
            "drift1d",
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            out_a.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out_a).unwrap();
    assert!(text.starts_with("# majority drift1d n=4 time=30 replicas=6 seed=12"));

    // An explicit --n overrides the config file's n.
    let out_b = dir.path().join("b.csv");
    let status = bin()
        .args([
            "drift1d",
            "--config",
            config_path.to_str().unwrap(),
            "--n",
            "2",
            "--out",
            out_b.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out_b).unwrap();
    assert!(text.starts_with("# majority drift1d n=2 time=30 replicas=6 seed=12"));
}

#[test]
fn config_keys_accept_underscores_for_dashes() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("u.cfg");
    std::fs::write(&config_path, "pair_dist=2\ntime=3\nreplicas=5\n").unwrap();
    let out = dir.path().join("u.csv");
    let status = bin()
        .args([
            "coupling1d",
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("pair-dist=2"), "{text}");
}

#[test]
fn malformed_config_lines_are_reported_with_their_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.cfg");
    std::fs::write(&config_path, "n=2\nnot a pair\n").unwrap();
    let out = bin()
        .args(["drift1d", "--config", config_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn theorem4_reads_a_cluster_file_and_reports_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cluster = dir.path().join("square.txt");
    std::fs::write(&cluster, "######\n######\n######\n######\n######\n######\n").unwrap();
    let report = dir.path().join("report.csv");
    let status = bin()
        .args([
            "theorem4",
            "--input",
            cluster.to_str().unwrap(),
            "--out",
            report.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("0,36,4,0,-36,true"), "unexpected report: {text}");

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "##\n#x\n").unwrap();
    let out = bin()
        .args(["theorem4", "--input", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "parse error must carry a line number: {err}");
}

#[test]
fn theorem4_irregular_input_is_informational_not_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cluster = dir.path().join("tiny.txt");
    std::fs::write(&cluster, "##\n##\n").unwrap(); // 2x2: irregular, 4 vertices
    let out = bin()
        .args(["theorem4", "--input", cluster.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn snapshot_at_time_zero_has_half_density_and_valid_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("t0");
    let status = bin()
        .args([
            "snapshot", "--side", "80", "--time", "0", "--seed", "13",
            "--out", prefix.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());

    let text = std::fs::read_to_string(dir.path().join("t0.txt")).unwrap();
    let ones = text.chars().filter(|&c| c == '#').count();
    let total = 80 * 80;
    let density = ones as f64 / total as f64;
    // 3 sigma of Binomial(6400, 1/2) is ~0.019.
    assert!(
        (density - 0.5).abs() < 0.02,
        "Bernoulli field density {density} too far from 1/2"
    );

    let pgm = std::fs::read(dir.path().join("t0.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n80 80\n255\n"));
    assert_eq!(pgm.len(), b"P5\n80 80\n255\n".len() + total);
    let black = pgm.iter().rev().take(total).filter(|&&b| b == 0).count();
    assert_eq!(black, ones, "PGM black pixels must match grid '#' cells");
}

#[test]
fn majority_snapshot_fills_up_under_the_tie_bias() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("n2");
    let status = bin()
        .args([
            "snapshot", "--n", "2", "--side", "60", "--time", "20", "--seed", "21",
            "--out", prefix.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("n2.txt")).unwrap();
    let ones = text.chars().filter(|&c| c == '#').count();
    let density = ones as f64 / (60.0 * 60.0);
    assert!(density > 0.9, "tie bias should dominate: density {density}");
}

#[test]
fn voter_snapshot_runs() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("voter");
    let status = bin()
        .args([
            "snapshot", "--model", "voter", "--side", "40", "--time", "5", "--seed", "3",
            "--out", prefix.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("voter.txt").exists());
    assert!(dir.path().join("voter.pgm").exists());
}

#[test]
fn output_order_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.csv");
    let many = dir.path().join("many.csv");
    for (threads, path) in [("1", &one), ("4", &many)] {
        let status = bin()
            .args([
                "extinction", "--m-list", "3,4", "--replicas", "10", "--seed", "17",
                "--threads", threads, "--out", path.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read_to_string(&one).unwrap();
    let b = std::fs::read_to_string(&many).unwrap();
    // Data rows must be identical; only the threads= record differs.
    let strip = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn cluster_stats_runs_the_voter_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("voter.csv");
    let status = bin()
        .args([
            "cluster-stats", "--model", "voter", "--d", "1", "--times", "1,3",
            "--replicas", "30", "--seed", "6", "--out", out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("model=voter"));
    assert_eq!(text.lines().count(), 4); // comment + header + two rows
}

#[test]
fn slice_goodtime_rejects_impossible_interfaces() {
    let out = bin()
        .args(["slice", "goodtime", "--interface", "2,1", "--replicas", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--interface"), "{err}");
}
