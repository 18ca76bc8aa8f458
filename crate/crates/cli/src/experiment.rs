//! KL and entropy experiments: certified bounds plus Monte-Carlo error bars
//! at each configured sample size.

use std::fmt;
use std::str::FromStr;

use mixbound::bounds::{entropy_bounds_detailed, jeffreys_bounds_with, js_bounds_with};
use mixbound::montecarlo::{mc_entropy, mc_entropy_repeated, mc_kl, mc_kl_repeated};
use mixbound::rng::derive_seed;
use mixbound::{kl_bounds_with, BoundInterval64, BoundOptions, McEstimate64, Mixture64};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{BoundName, ExperimentConfig, NamedPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Forward,
    Reverse,
    Entropy,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Forward => "forward",
            Self::Reverse => "reverse",
            Self::Entropy => "entropy",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "forward" => Ok(Self::Forward),
            "reverse" => Ok(Self::Reverse),
            "entropy" => Ok(Self::Entropy),
            _ => Err(format!("unknown direction {s:?}")),
        }
    }
}

/// Quantity name of the gap-reduction row.
pub const IMPROVEMENT: &str = "improvement%";
/// Quantity name of a row flagging a failed computation.
pub const FAILURE: &str = "ERROR";

pub fn mc_label(s: usize) -> String {
    format!("MC@{s}")
}

/// Sample size of an `MC@s` quantity.
pub fn mc_size(quantity: &str) -> Option<usize> {
    quantity.strip_prefix("MC@")?.parse().ok()
}

/// One reported number. `aux` is the quadrature slack for bounds, the
/// repetition standard deviation for `MC@s` rows and the single-pass
/// improvement for the improvement row.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub pair: String,
    pub direction: Direction,
    pub quantity: String,
    pub value: f64,
    pub aux: f64,
}

impl ResultRow {
    fn new(pair: &str, direction: Direction, quantity: impl Into<String>, value: f64, aux: f64) -> Self {
        Self {
            pair: pair.to_string(),
            direction,
            quantity: quantity.into(),
            value,
            aux,
        }
    }

    pub fn sort_key(&self) -> (&str, Direction, &str) {
        (&self.pair, self.direction, &self.quantity)
    }
}

/// Canonical row order: pair, direction, quantity name.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

fn options(cfg: &ExperimentConfig) -> BoundOptions<f64> {
    BoundOptions {
        quad_tol: cfg.quad_tol,
        ..BoundOptions::default()
    }
}

fn series_seed(base: u64, series: u64, size_index: usize) -> u64 {
    derive_seed(derive_seed(base, series), size_index as u64)
}

fn bound_rows(
    cfg: &ExperimentConfig,
    name: &str,
    dir: Direction,
    combinatorial: &BoundInterval64,
    adaptive: &BoundInterval64,
    out: &mut Vec<ResultRow>,
) {
    let items = [
        (BoundName::Celb, combinatorial.lower, combinatorial.quadrature_slack),
        (BoundName::Ceub, combinatorial.upper, combinatorial.quadrature_slack),
        (BoundName::Cealb, adaptive.lower, adaptive.quadrature_slack),
        (BoundName::Ceaub, adaptive.upper, adaptive.quadrature_slack),
    ];
    for (b, v, s) in items {
        if cfg.wants(b) {
            out.push(ResultRow::new(name, dir, b.as_str(), v, s));
        }
    }
}

fn mc_rows(
    cfg: &ExperimentConfig,
    name: &str,
    dir: Direction,
    series: u64,
    run: impl Fn(usize, u64) -> mixbound::Result<McEstimate64>,
    out: &mut Vec<ResultRow>,
) {
    for (i, &s) in cfg.sample_sizes.iter().enumerate() {
        match run(s, series_seed(cfg.base_seed, series, i)) {
            Ok(e) => out.push(ResultRow::new(name, dir, mc_label(s), e.mean, e.stddev)),
            Err(e) => out.push(failure(name, dir, &format!("{} {e}", mc_label(s)))),
        }
    }
}

fn failure(name: &str, dir: Direction, what: &str) -> ResultRow {
    eprintln!("{name} {dir}: {what}");
    ResultRow::new(name, dir, FAILURE, f64::NAN, f64::NAN)
}

fn kl_direction(cfg: &ExperimentConfig, name: &str, dir: Direction, m: &Mixture64, mp: &Mixture64, series: u64) -> Vec<ResultRow> {
    let mut out = Vec::new();
    match kl_bounds_with(m, mp, &options(cfg)) {
        Ok(b) => {
            bound_rows(cfg, name, dir, &b.combinatorial, &b.adaptive, &mut out);
            out.push(ResultRow::new(
                name,
                dir,
                IMPROVEMENT,
                b.improvement_percent(),
                b.per_slab_improvement_percent(),
            ));
        }
        Err(e) => out.push(failure(name, dir, &e.to_string())),
    }
    let reps = cfg.repetitions;
    mc_rows(
        cfg,
        name,
        dir,
        series,
        |s, seed| if reps >= 2 { mc_kl_repeated(m, mp, s, reps, seed) } else { mc_kl(m, mp, s, seed) },
        &mut out,
    );
    out
}

/// Bounds and MC rows for both directions of every configured pair.
/// Failures become [`FAILURE`] rows.
pub fn run_kl_experiment(cfg: &ExperimentConfig) -> Vec<ResultRow> {
    let jobs: Vec<(usize, &NamedPair, Direction)> = cfg
        .pairs
        .iter()
        .enumerate()
        .flat_map(|(i, p)| [(i, p, Direction::Forward), (i, p, Direction::Reverse)])
        .collect();
    let mut rows: Vec<ResultRow> = jobs
        .par_iter()
        .map(|&(i, p, dir)| {
            let series = 2 * i as u64 + u64::from(dir == Direction::Reverse);
            match dir {
                Direction::Forward => kl_direction(cfg, &p.name, dir, &p.m, &p.m_prime, series),
                _ => kl_direction(cfg, &p.name, dir, &p.m_prime, &p.m, series),
            }
        })
        .flatten()
        .collect();
    sort_rows(&mut rows);
    rows
}

/// Entropy bounds, MEUB and MC rows for every configured mixture.
pub fn run_entropy_experiment(cfg: &ExperimentConfig) -> Vec<ResultRow> {
    let dir = Direction::Entropy;
    let mut rows: Vec<ResultRow> = cfg
        .mixtures
        .par_iter()
        .enumerate()
        .map(|(i, nm)| {
            let (name, m) = (nm.name.as_str(), &nm.mixture);
            let mut out = Vec::new();
            match entropy_bounds_detailed(m, &options(cfg)) {
                Ok(e) => {
                    bound_rows(cfg, name, dir, &e.combinatorial, &e.adaptive, &mut out);
                    if cfg.wants(BoundName::Meub) {
                        out.push(ResultRow::new(name, dir, BoundName::Meub.as_str(), e.meub, 0.0));
                    }
                    let single = e.per_slab_improvement_percent();
                    out.push(ResultRow::new(name, dir, IMPROVEMENT, e.improvement_percent(), single));
                }
                Err(e) => out.push(failure(name, dir, &e.to_string())),
            }
            let reps = cfg.repetitions;
            mc_rows(
                cfg,
                name,
                dir,
                i as u64,
                |s, seed| if reps >= 2 { mc_entropy_repeated(m, s, reps, seed) } else { mc_entropy(m, s, seed) },
                &mut out,
            );
            out
        })
        .flatten()
        .collect();
    sort_rows(&mut rows);
    rows
}

/// Smallest sample size whose MC rows are checked against the bounds;
/// smaller runs are too noisy to be expected inside.
pub const SANDWICH_MIN_SAMPLES: usize = 10_000;

/// Checks the bound invariants on a finished row set and returns one
/// diagnostic per violation.
pub fn check_invariants(rows: &[ResultRow], cfg: &ExperimentConfig) -> Vec<String> {
    let mut bad = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        let j = rows[i..]
            .iter()
            .position(|r| (r.pair.as_str(), r.direction) != (rows[i].pair.as_str(), rows[i].direction))
            .map_or(rows.len(), |k| i + k);
        check_group(&rows[i..j], cfg, &mut bad);
        i = j;
    }
    bad
}

fn check_group(group: &[ResultRow], cfg: &ExperimentConfig, bad: &mut Vec<String>) {
    let tag = format!("{} {}", group[0].pair, group[0].direction);
    let get = |q: &str| group.iter().find(|r| r.quantity == q).map(|r| r.value);
    if group.iter().any(|r| r.quantity == FAILURE) {
        bad.push(format!("{tag}: computation failed"));
    }
    let tol = 1e-12;
    let (celb, ceub) = (get("CELB"), get("CEUB"));
    let (cealb, ceaub) = (get("CEALB"), get("CEAUB"));
    let meub = get("MEUB");
    let mut check = |ok: bool, what: String| {
        if !ok {
            bad.push(format!("{tag}: {what}"));
        }
    };
    if let (Some(l), Some(u)) = (celb, ceub) {
        check(l <= u + tol, format!("CELB {l} > CEUB {u}"));
    }
    if let (Some(l), Some(u)) = (cealb, ceaub) {
        check(l <= u + tol, format!("CEALB {l} > CEAUB {u}"));
    }
    if let (Some(a), Some(c)) = (cealb, celb) {
        check(a >= c - tol, format!("CEALB {a} < CELB {c}"));
    }
    if let (Some(a), Some(c)) = (ceaub, ceub) {
        check(a <= c + tol, format!("CEAUB {a} > CEUB {c}"));
    }
    if let (Some(l), Some(m)) = (cealb.or(celb), meub) {
        check(l <= m + tol, format!("lower bound {l} above MEUB {m}"));
    }
    let lower = celb.or(cealb);
    let upper = match (ceub.or(ceaub), meub) {
        (Some(u), Some(m)) => Some(u.min(m)),
        (u, m) => u.or(m),
    };
    for r in group {
        let Some(s) = mc_size(&r.quantity) else { continue };
        if s < SANDWICH_MIN_SAMPLES {
            continue;
        }
        let se = if cfg.repetitions >= 2 {
            r.aux / (cfg.repetitions as f64).sqrt()
        } else {
            r.aux
        };
        if let Some(l) = lower {
            check(r.value >= l - 3.0 * se, format!("{} = {} below {l} - 3·{se}", r.quantity, r.value));
        }
        if let Some(u) = upper {
            check(r.value <= u + 3.0 * se, format!("{} = {} above {u} + 3·{se}", r.quantity, r.value));
        }
    }
}

#[derive(Debug, Serialize)]
pub struct IntervalJson {
    pub lower: f64,
    pub upper: f64,
    pub slack: f64,
}

impl From<BoundInterval64> for IntervalJson {
    fn from(b: BoundInterval64) -> Self {
        Self {
            lower: b.lower,
            upper: b.upper,
            slack: b.quadrature_slack,
        }
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Serialize)]
pub struct DirectionJson {
    pub CELB: f64,
    pub CEUB: f64,
    pub CEALB: f64,
    pub CEAUB: f64,
    pub slack: f64,
    pub improvement_pct: f64,
}

#[derive(Debug, Serialize)]
pub struct PairBoundsJson {
    pub pair: String,
    pub family: String,
    pub k: usize,
    pub k_prime: usize,
    pub forward: DirectionJson,
    pub reverse: DirectionJson,
    pub jeffreys: IntervalJson,
    pub js: IntervalJson,
}

/// All bounds of one pair, for the one-line `bounds` output.
pub fn pair_bounds(p: &NamedPair, quad_tol: f64) -> mixbound::Result<PairBoundsJson> {
    let opts = BoundOptions {
        quad_tol,
        ..BoundOptions::default()
    };
    let dir = |m: &Mixture64, mp: &Mixture64| {
        kl_bounds_with(m, mp, &opts).map(|b| DirectionJson {
            CELB: b.combinatorial.lower,
            CEUB: b.combinatorial.upper,
            CEALB: b.adaptive.lower,
            CEAUB: b.adaptive.upper,
            slack: b.combinatorial.quadrature_slack.max(b.adaptive.quadrature_slack),
            improvement_pct: b.improvement_percent(),
        })
    };
    Ok(PairBoundsJson {
        pair: p.name.clone(),
        family: p.m.family().to_string(),
        k: p.m.len(),
        k_prime: p.m_prime.len(),
        forward: dir(&p.m, &p.m_prime)?,
        reverse: dir(&p.m_prime, &p.m)?,
        jeffreys: jeffreys_bounds_with(&p.m, &p.m_prime, &opts)?.into(),
        js: js_bounds_with(&p.m, &p.m_prime, &opts)?.into(),
    })
}
