use std::process::Command;

use mixbound::{presets, ComponentParams, Mixture64};
use mixbound_cli::{
    check_invariants, emit_csv, emit_plot, parse_config, read_csv, render_svg, run_entropy_experiment,
    run_kl_experiment, Direction, ExperimentConfig, NamedMixture, NamedPair, ResultRow,
};

const BIN: &str = env!("CARGO_BIN_EXE_mixbound");

fn small(mut cfg: ExperimentConfig) -> ExperimentConfig {
    cfg.sample_sizes = vec![10, 100];
    cfg.repetitions = 4;
    cfg
}

fn gauss(m: f64, s: f64) -> Mixture64 {
    Mixture64::single(ComponentParams::gaussian(m, s).unwrap()).unwrap()
}

fn value(rows: &[ResultRow], pair: &str, dir: Direction, q: &str) -> f64 {
    rows.iter()
        .find(|r| r.pair == pair && r.direction == dir && r.quantity == q)
        .unwrap_or_else(|| panic!("no {pair} {dir} {q}"))
        .value
}

fn row(q: &str, value: f64, aux: f64) -> ResultRow {
    ResultRow {
        pair: "p".into(),
        direction: Direction::Forward,
        quantity: q.into(),
        value,
        aux,
    }
}

#[test]
fn empty_csv_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    emit_csv(&[], &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "pair,direction,quantity,value,aux\n");
}

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    let r = row("CELB", -1.25, 3.5e-11);
    emit_csv(std::slice::from_ref(&r), &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert_eq!(read_csv(&path).unwrap(), vec![r]);
}

#[test]
fn csv_write_failure_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = emit_csv(&[], &dir.path().join("missing").join("x.csv")).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn identical_pair_and_single_component_pair() {
    let g = presets::gmm1::<f64>();
    let mut cfg = small(ExperimentConfig::default());
    cfg.pairs = vec![
        NamedPair { name: "self".into(), m: g.clone(), m_prime: g },
        NamedPair { name: "single".into(), m: gauss(0.0, 1.0), m_prime: gauss(1.0, 1.0) },
    ];
    let rows = run_kl_experiment(&cfg);
    for dir in [Direction::Forward, Direction::Reverse] {
        assert!(value(&rows, "self", dir, "CELB") <= 0.0 && value(&rows, "self", dir, "CEUB") >= 0.0);
        assert!(value(&rows, "self", dir, "CEALB") <= 0.0 && value(&rows, "self", dir, "CEAUB") >= 0.0);
        assert_eq!(value(&rows, "self", dir, "MC@100"), 0.0);
        for q in ["CELB", "CEUB", "CEALB", "CEAUB"] {
            assert!((value(&rows, "single", dir, q) - 0.5).abs() <= 1e-9);
        }
    }
    assert!(check_invariants(&rows, &cfg).is_empty());
}

#[test]
fn entropy_rows() {
    let mut cfg = small(ExperimentConfig::default());
    cfg.mixtures = vec![
        NamedMixture { name: "n01".into(), mixture: gauss(0.0, 1.0) },
        NamedMixture { name: "merged".into(), mixture: presets::merged_gmm() },
        NamedMixture { name: "dirac".into(), mixture: presets::near_dirac_gmm() },
    ];
    let rows = run_entropy_experiment(&cfg);
    let e = Direction::Entropy;
    for q in ["CEALB", "CEAUB", "CELB", "CEUB", "MEUB"] {
        assert!((value(&rows, "n01", e, q) - 1.418_938_533_204_672_7).abs() <= 1e-9, "{q}");
    }
    assert!(value(&rows, "merged", e, "MEUB") < value(&rows, "merged", e, "CEUB"));
    assert!(value(&rows, "dirac", e, "CEAUB") - value(&rows, "dirac", e, "CEALB") <= 1e-2);
    assert!((value(&rows, "dirac", e, "MEUB") - 1.419).abs() < 1e-2);
    assert!(check_invariants(&rows, &cfg).is_empty());
}

#[test]
fn bound_selection_limits_rows() {
    let cfg = small(
        parse_config(r#"{"mixtures": [{"name": "g", "mixture": {"family": "gaussian", "components": [{"weight": 1, "mean": 0, "stddev": 2}]}}], "bounds": ["MEUB"]}"#)
            .unwrap(),
    );
    let rows = run_entropy_experiment(&cfg);
    let names: Vec<_> = rows.iter().map(|r| r.quantity.as_str()).collect();
    assert_eq!(names, ["MC@10", "MC@100", "MEUB", "improvement%"]);
}

#[test]
fn invariant_violations_are_detected() {
    let cfg = small(ExperimentConfig::default());
    let rows = vec![row("CEALB", 0.5, 0.0), row("CEAUB", 0.6, 0.0), row("CELB", 0.55, 0.0), row("CEUB", 1.0, 0.0)];
    let bad = check_invariants(&rows, &cfg);
    assert_eq!(bad.len(), 1, "{bad:?}");
    let rows = vec![row("CELB", 0.0, 0.0), row("CEUB", 1.0, 0.0), row("MC@10000", 5.0, 0.1)];
    assert_eq!(check_invariants(&rows, &cfg).len(), 1);
    let rows = vec![row("CELB", 0.0, 0.0), row("CEUB", 1.0, 0.0), row("MC@10", 5.0, 0.1)];
    assert!(check_invariants(&rows, &cfg).is_empty());
    let rows = vec![row("ERROR", f64::NAN, f64::NAN)];
    assert_eq!(check_invariants(&rows, &cfg).len(), 1);
}

#[test]
fn bounds_only_plot_has_four_lines_and_no_error_bars() {
    let rows = vec![row("CELB", 1.0, 0.0), row("CEUB", 3.0, 0.0), row("CEALB", 1.8, 0.0), row("CEAUB", 2.1, 0.0)];
    let svg = render_svg(&rows);
    assert!(svg.starts_with("<?xml"));
    assert_eq!(svg.matches(r#"<line class="bound "#).count(), 4);
    assert_eq!(svg.matches(r#"class="errorbar""#).count(), 0);
    assert_eq!(svg.matches("stroke-dasharray=\"7,4\"").count(), 4);
    assert!(!svg.contains("href"));
    assert_eq!(svg, render_svg(&rows));
}

fn attr(tag: &str, name: &str) -> f64 {
    let key = format!(r#" {name}=""#);
    let start = tag.find(&key).unwrap() + key.len();
    tag[start..].split('"').next().unwrap().parse().unwrap()
}

#[test]
fn full_plot_sandwiches_error_bars_between_bounds() {
    let cfg = small(ExperimentConfig::preset("paper-s4").unwrap());
    let rows: Vec<ResultRow> = run_kl_experiment(&cfg)
        .into_iter()
        .filter(|r| r.pair == "GaMM" && r.direction == Direction::Forward)
        .collect();
    let svg = render_svg(&rows);
    assert_eq!(svg.matches(r#"class="errorbar""#).count(), cfg.sample_sizes.len());
    let bound_y = |name: &str| {
        let tag = svg.lines().find(|l| l.contains(&format!(r#"class="bound {name}""#))).unwrap();
        attr(tag, "y1")
    };
    let (top, bottom) = (bound_y("CEUB"), bound_y("CELB"));
    assert!(top < bottom);
    assert!(bound_y("CEAUB") >= top && bound_y("CEALB") <= bottom);
    let means: Vec<f64> = svg
        .lines()
        .filter(|l| l.contains(r#"class="errorbar""#))
        .map(|l| attr(&l[l.find("<circle").unwrap()..], "cy"))
        .collect();
    let last = *means.last().unwrap();
    assert!(last >= top && last <= bottom, "{top} {last} {bottom}");
}

#[test]
fn plot_write_failure_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = emit_plot(&[], &dir.path().join("missing").join("x.svg")).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().unwrap()
}

#[test]
fn kl_subcommand_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["kl", "--preset", "paper-s4", "--samples", "10,100", "--reps", "3", "--out-dir", out, "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&dir.path().join("kl.csv")).unwrap();
    assert_eq!(rows.len(), 4 * 2 * (4 + 2 + 1));
    assert!(!dir.path().join("kl_GMM_forward.svg").exists());
}

#[test]
fn entropy_subcommand_writes_plots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["entropy", "--samples", "10,100", "--reps", "2", "--out-dir", out, "--format", "svg"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("entropy_merged.svg").exists());
    assert!(!dir.path().join("entropy.csv").exists());
}

#[test]
fn bounds_subcommand_prints_one_json_line() {
    let o = run(&["bounds", "--pair", "GMM"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["k"], 7);
    assert_eq!(v["k_prime"], 9);
    let f = &v["forward"];
    assert!(f["CEUB"].as_f64().unwrap() - f["CELB"].as_f64().unwrap() <= 7f64.ln() + 9f64.ln() + 1e-9);
    assert!(v["js"]["upper"].as_f64().unwrap() <= std::f64::consts::LN_2);
}

#[test]
fn bounds_needs_a_pair_choice() {
    let o = run(&["bounds"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--pair"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"family": "gaussian", "components": [{"weight": 0.5, "mean": 0, "stddev": 1}, {"weight": 0.6, "mean": 1, "stddev": 1}]}"#,
    )
    .unwrap();
    let o = run(&["entropy", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1.1"));
    let o = run(&["kl", "--config", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["kl", "--preset", "unknown"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.json");
    std::fs::write(
        &path,
        r#"{"pairs": [{"name": "exp", "m": {"family": "exponential", "components": [{"weight": 1, "rate": 1}]},
            "m_prime": {"family": "exponential", "components": [{"weight": 1, "rate": 2}]}}]}"#,
    )
    .unwrap();
    let o = run(&["bounds", "--config", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let celb = v["forward"]["CELB"].as_f64().unwrap();
    assert!((celb - (1.0 - std::f64::consts::LN_2)).abs() <= 1e-9);
}

#[test]
fn thread_cap_is_validated() {
    let o = Command::new(BIN).args(["bounds", "--pair", "EMM"]).env("MIXBOUND_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(BIN).args(["bounds", "--pair", "EMM"]).env("MIXBOUND_THREADS", "1").output().unwrap();
    assert!(o.status.success());
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{text}");
    assert!(text.lines().all(|l| l.starts_with("ok")));
}
