use super::{a_term_with, BoundInterval, BoundOptions, KlBounds};
use crate::envelope::{mixture_partition, EnvelopeMode, EnvelopePartition, Mixture, WeightedComponent};
use crate::error::Result;
use crate::families::SupportInterval;
use crate::integrals::QuadratureValue;
use crate::scalar::Real;

/// Bounds on the residual `t(x) = ln(1 + Σ_{i≠δ} rᵢ(x))`, with
/// `rᵢ = w_i p_i / (w_δ p_δ)`, over one slab `(lo, hi)` of an upper envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabResidual<T> {
    pub slab: usize,
    pub lo: T,
    pub hi: T,
    /// Index `δ` of the dominating component.
    pub dominant: usize,
    pub t_lower: T,
    pub t_upper: T,
    /// `sup rᵢ` over the slab; the entry for `δ` is zero.
    pub per_component_max: Vec<T>,
    /// `inf rᵢ` over the slab; the entry for `δ` is zero.
    pub per_component_min: Vec<T>,
}

/// Extrema of `ln rᵢ` over `[lo, hi]` from the endpoint values (limits at
/// support boundaries) and the interior stationary points.
fn log_ratio_range<T: Real>(
    ci: &WeightedComponent<T>,
    cd: &WeightedComponent<T>,
    support: SupportInterval<T>,
    lo: T,
    hi: T,
) -> (T, T) {
    let form = ci.log_quadratic() - cd.log_quadratic();
    let at = |x: T| {
        if x.is_infinite() || x <= support.lo {
            form.eval(x)
        } else {
            ci.ln_weighted(x) - cd.ln_weighted(x)
        }
    };
    let mut vmin = T::infinity();
    let mut vmax = T::neg_infinity();
    let pts = [lo, hi].into_iter().chain(form.critical_points(lo, hi));
    for x in pts {
        let v = at(x);
        if v.is_nan() {
            // ill-defined corner: fall back to the trivial range
            return (T::neg_infinity(), T::infinity());
        }
        vmin = vmin.min(v);
        vmax = vmax.max(v);
    }
    (vmin, vmax)
}

fn residual_on<T: Real>(mp: &Mixture<T>, d: usize, lo: T, hi: T) -> (T, T, Vec<T>, Vec<T>) {
    let cd = &mp.components()[d];
    let k = mp.len();
    let mut maxes = vec![T::zero(); k];
    let mut mins = vec![T::zero(); k];
    for (i, ci) in mp.components().iter().enumerate() {
        if i == d {
            continue;
        }
        let (vmin, vmax) = log_ratio_range(ci, cd, mp.support(), lo, hi);
        mins[i] = vmin.exp();
        maxes[i] = vmax.exp();
    }
    let sum_min: T = mins.iter().copied().sum();
    let sum_max: T = maxes.iter().copied().sum();
    (sum_min.ln_1p(), sum_max.ln_1p(), maxes, mins)
}

/// Residual bounds for every slab of an upper-envelope partition of `mp`.
pub fn slab_residuals<T: Real>(mp: &Mixture<T>, partition: &EnvelopePartition<T>) -> Vec<SlabResidual<T>> {
    partition
        .intervals()
        .enumerate()
        .map(|(slab, (lo, hi, d))| {
            let (t_lower, t_upper, per_component_max, per_component_min) = residual_on(mp, d, lo, hi);
            SlabResidual {
                slab,
                lo,
                hi,
                dominant: d,
                t_lower,
                t_upper,
                per_component_max,
                per_component_min,
            }
        })
        .collect()
}

struct Sub<T> {
    lo: T,
    hi: T,
    d: usize,
    mass: T,
    t_lo: T,
    t_hi: T,
    open: bool,
}

impl<T: Real> Sub<T> {
    fn new(m: &Mixture<T>, mp: &Mixture<T>, lo: T, hi: T, d: usize) -> Self {
        let (t_lo, t_hi, _, _) = residual_on(mp, d, lo, hi);
        Self {
            lo,
            hi,
            d,
            mass: m.interval_mass(lo, hi),
            t_lo,
            t_hi,
            open: true,
        }
    }

    fn score(&self) -> T {
        let s = self.mass * (self.t_hi - self.t_lo);
        if s.is_nan() {
            T::infinity()
        } else {
            s
        }
    }
}

/// `Σ M_s t̲_s` and `Σ M_s t̄_s` over a set of sub-slabs.
fn sums<T: Real>(subs: &[Sub<T>]) -> (T, T) {
    let lo = subs.iter().map(|s| s.mass * s.t_lo).sum();
    let hi = subs.iter().map(|s| s.mass * s.t_hi).sum();
    (lo, hi)
}

/// Point splitting the `m`-mass of `(lo, hi)` in half, by bisection on the
/// tail-accurate interval mass.
fn mass_median<T: Real>(m: &Mixture<T>, lo: T, hi: T) -> Option<T> {
    let total = m.interval_mass(lo, hi);
    if !(total > T::zero()) {
        return None;
    }
    let target = total * T::of(0.5);
    let step = m.variance().sqrt().max(T::epsilon());
    let start = if lo.is_finite() && hi.is_finite() {
        lo + (hi - lo) * T::of(0.5)
    } else if lo.is_finite() {
        lo + step
    } else if hi.is_finite() {
        hi - step
    } else {
        m.mean()
    };
    let below = |x: T| m.interval_mass(lo, x);
    let mut a = if lo.is_finite() { lo } else { start };
    let mut b = if hi.is_finite() { hi } else { start };
    let mut s = step;
    while !lo.is_finite() && below(a) > target {
        a = a - s;
        s = s + s;
        if !a.is_finite() {
            return None;
        }
    }
    s = step;
    while !hi.is_finite() && below(b) < target {
        b = b + s;
        s = s + s;
        if !b.is_finite() {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = a + (b - a) * T::of(0.5);
        if mid <= a || mid >= b {
            break;
        }
        if below(mid) < target {
            a = mid;
        } else {
            b = mid;
        }
    }
    let x = a + (b - a) * T::of(0.5);
    (x > lo && x < hi).then_some(x)
}

/// Residual sums `(Σ M t̲, Σ M t̄)` for the single-pass slab rule and after
/// greedy refinement: the sub-slab with the largest `M (t̄ - t̲)` is split
/// at its `m`-mass median until the budget is spent.
fn residual_sums<T: Real>(
    m: &Mixture<T>,
    mp: &Mixture<T>,
    part: &EnvelopePartition<T>,
    budget: usize,
) -> ((T, T), (T, T)) {
    let mut subs: Vec<Sub<T>> = part
        .intervals()
        .map(|(lo, hi, d)| Sub::new(m, mp, lo, hi, d))
        .collect();
    let single = sums(&subs);
    while subs.len() < budget {
        let best = subs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.open)
            .max_by(|(_, a), (_, b)| a.score().partial_cmp(&b.score()).expect("scores are not NaN"))
            .map(|(i, _)| i);
        let Some(i) = best else { break };
        if !(subs[i].score() > T::min_positive_value()) {
            break;
        }
        let (lo, hi, d) = (subs[i].lo, subs[i].hi, subs[i].d);
        match mass_median(m, lo, hi) {
            Some(x) => {
                subs[i] = Sub::new(m, mp, lo, x, d);
                subs.insert(i + 1, Sub::new(m, mp, x, hi, d));
            }
            None => subs[i].open = false,
        }
    }
    (sums(&subs), single)
}

/// Adaptive bounds on `H×(m:m') = A(m:m') - ∫ m t`, returned as
/// `(refined, single_pass)`.
pub fn adaptive_cross_entropy<T: Real>(
    m: &Mixture<T>,
    mp: &Mixture<T>,
    opts: &BoundOptions<T>,
) -> Result<(BoundInterval<T>, BoundInterval<T>)> {
    let a = a_term_with(m, mp, opts)?;
    Ok(adaptive_from_a(m, mp, a, opts))
}

pub(crate) fn adaptive_from_a<T: Real>(
    m: &Mixture<T>,
    mp: &Mixture<T>,
    a: QuadratureValue<T>,
    opts: &BoundOptions<T>,
) -> (BoundInterval<T>, BoundInterval<T>) {
    let part = mixture_partition(mp, EnvelopeMode::Upper);
    let (refined, single) = residual_sums(m, mp, &part, opts.max_sub_slabs);
    let s = a.error_bound;
    let make = |(t_lo, t_hi): (T, T)| BoundInterval::new(a.value - t_hi - s, a.value - t_lo + s, s);
    let ce = BoundInterval::new(a.value - T::count(mp.len()).ln() - s, a.value + s, s);
    (make(refined).intersect(&ce), make(single).intersect(&ce))
}

/// `(refined, single_pass)` KL bounds from both cross-entropies.
pub(crate) fn kl_from_parts<T: Real>(
    m: &Mixture<T>,
    mp: &Mixture<T>,
    cross: QuadratureValue<T>,
    own: QuadratureValue<T>,
    opts: &BoundOptions<T>,
) -> Result<(BoundInterval<T>, BoundInterval<T>)> {
    let (hx, hx1) = adaptive_from_a(m, mp, cross, opts);
    let (h, h1) = adaptive_from_a(m, m, own, opts);
    let kl = |hx: BoundInterval<T>, h: BoundInterval<T>| {
        BoundInterval::new(
            hx.lower - h.upper,
            hx.upper - h.lower,
            hx.quadrature_slack + h.quadrature_slack,
        )
    };
    Ok((kl(hx, h), kl(hx1, h1)))
}

/// CEALB/CEAUB: refined slab-residual KL bounds, intersected with the
/// combinatorial ones.
pub fn adaptive_kl_bounds<T: Real>(m: &Mixture<T>, mp: &Mixture<T>) -> Result<BoundInterval<T>> {
    super::kl_bounds(m, mp).map(|b: KlBounds<T>| b.adaptive)
}
