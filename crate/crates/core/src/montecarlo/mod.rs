//! Seeded mixture sampling and Monte-Carlo estimators of KL divergence and
//! entropy.

use rayon::prelude::*;

use crate::envelope::Mixture;
use crate::error::{Error, Result};
use crate::families::{special, ComponentParams};
use crate::rng::{derive_seed, Xoshiro256StarStar};
use crate::scalar::Real;

#[cfg(test)]
mod tests;

/// Summary of one or more Monte-Carlo runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate<T> {
    pub mean: T,
    /// Spread of a single run: across repetitions when `repetitions > 1`,
    /// otherwise the per-sample standard deviation divided by `√s`.
    pub stddev: T,
    pub sample_size: usize,
    pub repetitions: usize,
    pub seed: u64,
}

impl<T: Real> McEstimate<T> {
    /// Standard error of `mean`.
    pub fn standard_error(&self) -> T {
        if self.repetitions > 1 {
            self.stddev / T::count(self.repetitions).sqrt()
        } else {
            self.stddev
        }
    }
}

/// `n` iid draws from `m`; deterministic in `seed`.
pub fn sample_mixture<T: Real>(m: &Mixture<T>, n: usize, seed: u64) -> Vec<T> {
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    (0..n).map(|_| m.sample(&mut rng)).collect()
}

#[derive(Debug, Clone, Copy)]
struct Term {
    k0: f64,
    center: f64,
    lin: f64,
    quad: f64,
    log: f64,
}

/// Precompiled `ln m(x)`: each weighted log-density as
/// `k0 + lin·y + quad·y² + log·ln x` with `y = x - center`.
#[derive(Debug, Clone)]
pub struct LogDensityEval {
    terms: Vec<Term>,
    uses_log: bool,
}

impl LogDensityEval {
    pub fn new<T: Real>(m: &Mixture<T>) -> Self {
        let half_ln_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
        let terms: Vec<Term> = m
            .components()
            .iter()
            .map(|c| {
                let lw = c.weight.f64().ln();
                match c.params {
                    ComponentParams::Exponential { rate } => {
                        let r = rate.f64();
                        Term { k0: lw + r.ln(), center: 0.0, lin: -r, quad: 0.0, log: 0.0 }
                    }
                    ComponentParams::Rayleigh { scale } => {
                        let s = scale.f64();
                        Term { k0: lw - 2.0 * s.ln(), center: 0.0, lin: 0.0, quad: -0.5 / (s * s), log: 1.0 }
                    }
                    ComponentParams::Gaussian { mean, stddev } => {
                        let s = stddev.f64();
                        Term {
                            k0: lw - s.ln() - half_ln_2pi,
                            center: mean.f64(),
                            lin: 0.0,
                            quad: -0.5 / (s * s),
                            log: 0.0,
                        }
                    }
                    ComponentParams::Gamma { shape, scale } => {
                        let (k, s) = (shape.f64(), scale.f64());
                        Term {
                            k0: lw - k * s.ln() - special::ln_gamma(k),
                            center: 0.0,
                            lin: -1.0 / s,
                            quad: 0.0,
                            log: k - 1.0,
                        }
                    }
                }
            })
            .collect();
        let uses_log = terms.iter().any(|t| t.log != 0.0);
        Self { terms, uses_log }
    }

    /// `ln m(x)`, using `buf` as scratch space.
    #[inline]
    pub fn eval(&self, x: f64, buf: &mut Vec<f64>) -> f64 {
        let lx = if self.uses_log { x.ln() } else { 0.0 };
        buf.clear();
        let mut max = f64::NEG_INFINITY;
        for t in &self.terms {
            let y = x - t.center;
            let mut v = t.k0 + y * (t.lin + t.quad * y);
            if t.log != 0.0 {
                v += t.log * lx;
            }
            max = max.max(v);
            buf.push(v);
        }
        if !max.is_finite() {
            return max;
        }
        let s: f64 = buf.iter().map(|v| (v - max).exp()).sum();
        max + s.ln()
    }
}

/// Mean and (n - 1)-normalized standard deviation, two passes in index order.
fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

fn log_ratio_samples<T: Real>(
    m: &Mixture<T>,
    mp: Option<&Mixture<T>>,
    s: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if s == 0 {
        return Err(Error::Argument("sample size must be positive".into()));
    }
    let em = LogDensityEval::new(m);
    let emp = mp.map(LogDensityEval::new);
    let same = mp.is_some_and(|mp| mp == m);
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let mut buf = Vec::with_capacity(m.len().max(mp.map_or(0, |x| x.len())));
    let mut out = Vec::with_capacity(s);
    for _ in 0..s {
        let x = m.sample(&mut rng).f64();
        let v = if same {
            0.0
        } else {
            let lm = em.eval(x, &mut buf);
            match &emp {
                Some(e) => lm - e.eval(x, &mut buf),
                None => -lm,
            }
        };
        if !v.is_finite() {
            return Err(Error::NonFiniteSample { x });
        }
        out.push(v);
    }
    Ok(out)
}

fn single_run<T: Real>(xs: &[f64], seed: u64) -> McEstimate<T> {
    let (mean, sd) = mean_sd(xs);
    McEstimate {
        mean: T::of(mean),
        stddev: T::of(sd / (xs.len() as f64).sqrt()),
        sample_size: xs.len(),
        repetitions: 1,
        seed,
    }
}

/// `(1/s) Σ ln(m(xᵢ)/m'(xᵢ))` with `xᵢ ~ m`. Identical mixtures give exactly
/// zero.
pub fn mc_kl<T: Real>(m: &Mixture<T>, mp: &Mixture<T>, s: usize, seed: u64) -> Result<McEstimate<T>> {
    if m.family() != mp.family() {
        return Err(Error::FamilyMismatch(m.family().to_string(), mp.family().to_string()));
    }
    Ok(single_run(&log_ratio_samples(m, Some(mp), s, seed)?, seed))
}

/// Plug-in entropy estimate `-(1/s) Σ ln m(xᵢ)`.
pub fn mc_entropy<T: Real>(m: &Mixture<T>, s: usize, seed: u64) -> Result<McEstimate<T>> {
    Ok(single_run(&log_ratio_samples(m, None, s, seed)?, seed))
}

/// Runs `estimator` once per repetition with seeds
/// `derive_seed(base_seed, 0..reps)` and summarizes the results.
///
/// Repetitions may run in parallel; the reduction is always in index order.
pub fn repetition_stats<T, F>(estimator: F, sample_size: usize, reps: usize, base_seed: u64) -> Result<McEstimate<T>>
where
    T: Real,
    F: Fn(u64) -> Result<T> + Sync,
{
    if reps < 2 {
        return Err(Error::Argument(format!("repetition statistics need at least 2 runs, got {reps}")));
    }
    let runs: Vec<T> = (0..reps as u64)
        .into_par_iter()
        .map(|i| estimator(derive_seed(base_seed, i)))
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = runs.iter().map(|v| v.f64()).collect();
    let (mean, sd) = mean_sd(&xs);
    Ok(McEstimate {
        mean: T::of(mean),
        stddev: T::of(sd),
        sample_size,
        repetitions: reps,
        seed: base_seed,
    })
}

/// [`mc_kl`] repeated `reps` times.
pub fn mc_kl_repeated<T: Real>(
    m: &Mixture<T>,
    mp: &Mixture<T>,
    s: usize,
    reps: usize,
    base_seed: u64,
) -> Result<McEstimate<T>> {
    repetition_stats(|seed| mc_kl(m, mp, s, seed).map(|e| e.mean), s, reps, base_seed)
}

/// [`mc_entropy`] repeated `reps` times.
pub fn mc_entropy_repeated<T: Real>(m: &Mixture<T>, s: usize, reps: usize, base_seed: u64) -> Result<McEstimate<T>> {
    repetition_stats(|seed| mc_entropy(m, s, seed).map(|e| e.mean), s, reps, base_seed)
}
