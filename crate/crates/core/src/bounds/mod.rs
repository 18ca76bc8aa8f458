//! Certified bounds on cross-entropy, KL divergence and entropy of mixtures.
//!
//! The combinatorial bounds come from the log-sum-exp sandwich between the
//! upper envelope of the weighted components and `k` times it. The adaptive
//! bounds bound the residual `t = ln(1 + Σ rᵢ)` slab by slab.

mod adaptive;
mod composite;
mod entropy;


pub use adaptive::{adaptive_cross_entropy, adaptive_kl_bounds, slab_residuals, SlabResidual};
pub use composite::{jeffreys_bounds, jeffreys_bounds_with, js_bounds, js_bounds_with};
pub use entropy::{entropy_bounds, entropy_bounds_detailed, meub, EntropyBounds};

use crate::envelope::{
    mixture_partition, overlay_all, pairwise_intersections, EnvelopeMode, Mixture,
    WeightedComponent,
};
use crate::error::{Error, Result};
use crate::integrals::{expected_log_terms, partial_cross_entropy_c_tol, QuadratureValue};
use crate::scalar::Real;

/// A certified `[lower, upper]` pair; `quadrature_slack` is the total
/// quadrature error already folded into both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInterval<T> {
    pub lower: T,
    pub upper: T,
    pub quadrature_slack: T,
}

impl<T: Real> BoundInterval<T> {
    pub fn new(lower: T, upper: T, quadrature_slack: T) -> Self {
        Self {
            lower,
            upper,
            quadrature_slack,
        }
    }

    /// `[value - error, value + error]` from a quadrature result.
    pub fn around(q: QuadratureValue<T>) -> Self {
        Self::new(q.lower(), q.upper(), q.error_bound)
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> T {
        T::of(0.5) * (self.lower + self.upper)
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.lower && x <= self.upper
    }

    /// Both intervals certify the same quantity, so their intersection does.
    pub fn intersect(&self, other: &Self) -> Self {
        Self {
            lower: self.lower.max(other.lower),
            upper: self.upper.min(other.upper),
            quadrature_slack: self.quadrature_slack.max(other.quadrature_slack),
        }
    }
}

/// Knobs shared by the bound routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundOptions<T> {
    /// Absolute tolerance of each quadrature term.
    pub quad_tol: T,
    /// Sub-slab budget of the adaptive refinement, per cross-entropy.
    pub max_sub_slabs: usize,
}

impl<T: Real> Default for BoundOptions<T> {
    fn default() -> Self {
        Self {
            quad_tol: T::default_quad_tol(),
            max_sub_slabs: 256,
        }
    }
}

/// `max(max xs, ln l + min xs) ≤ lse(xs) ≤ ln l + max xs`.
pub fn lse_bounds<T: Real>(xs: &[T]) -> Result<BoundInterval<T>> {
    if xs.is_empty() {
        return Err(Error::Argument("lse bounds of an empty list".into()));
    }
    let max = xs.iter().copied().fold(T::neg_infinity(), T::max);
    let min = xs.iter().copied().fold(T::infinity(), T::min);
    let ln_l = T::count(xs.len()).ln();
    Ok(BoundInterval::new(max.max(ln_l + min), ln_l + max, T::zero()))
}

fn check_pair<T: Real>(m: &Mixture<T>, mp: &Mixture<T>) -> Result<()> {
    if m.family() != mp.family() {
        return Err(Error::FamilyMismatch(
            m.family().to_string(),
            mp.family().to_string(),
        ));
    }
    Ok(())
}

/// `A(m:m') = -∫ m ln(max_j w'_j p'_j)`, summed slab by slab over the upper
/// envelope of `m'` as `Σ_r Σ_s C_{s,δ(r)}(a_r, a_{r+1})`.
pub fn a_term<T: Real>(m: &Mixture<T>, mp: &Mixture<T>) -> Result<QuadratureValue<T>> {
    a_term_with(m, mp, &BoundOptions::default())
}

pub fn a_term_with<T: Real>(
    m: &Mixture<T>,
    mp: &Mixture<T>,
    opts: &BoundOptions<T>,
) -> Result<QuadratureValue<T>> {
    check_pair(m, mp)?;
    let part = mixture_partition(mp, EnvelopeMode::Upper);
    let mut total = QuadratureValue::zero();
    for (a, b, d) in part.intervals() {
        let top = &mp.components()[d];
        for c in m.components() {
            let r = partial_cross_entropy_c_tol(c, top, a, b, opts.quad_tol);
            total = total + QuadratureValue::recover(r)?;
        }
    }
    Ok(total)
}

/// `A(m:m') - ln k' ≤ H×(m:m') ≤ A(m:m')`, widened by the quadrature slack.
pub fn cross_entropy_bounds<T: Real>(m: &Mixture<T>, mp: &Mixture<T>) -> Result<BoundInterval<T>> {
    cross_entropy_bounds_with(m, mp, &BoundOptions::default())
}

pub fn cross_entropy_bounds_with<T: Real>(
    m: &Mixture<T>,
    mp: &Mixture<T>,
    opts: &BoundOptions<T>,
) -> Result<BoundInterval<T>> {
    let a = a_term_with(m, mp, opts)?;
    Ok(ce_from_a(a, mp.len()))
}

fn ce_from_a<T: Real>(a: QuadratureValue<T>, k_prime: usize) -> BoundInterval<T> {
    let s = a.error_bound;
    BoundInterval::new(a.value - T::count(k_prime).ln() - s, a.value + s, s)
}

/// KL bounds from two cross-entropy sandwiches,
/// `L×(m:m') - U×(m:m) ≤ KL(m:m') ≤ U×(m:m') - L×(m:m)`.
pub fn kl_bounds_ce<T: Real>(m: &Mixture<T>, mp: &Mixture<T>) -> Result<BoundInterval<T>> {
    kl_bounds_ce_with(m, mp, &BoundOptions::default())
}

pub fn kl_bounds_ce_with<T: Real>(
    m: &Mixture<T>,
    mp: &Mixture<T>,
    opts: &BoundOptions<T>,
) -> Result<BoundInterval<T>> {
    let cross = a_term_with(m, mp, opts)?;
    let own = a_term_with(m, m, opts)?;
    Ok(kl_from_a(cross, own, m.len(), mp.len()))
}

fn kl_from_a<T: Real>(
    cross: QuadratureValue<T>,
    own: QuadratureValue<T>,
    k: usize,
    k_prime: usize,
) -> BoundInterval<T> {
    let s = cross.error_bound + own.error_bound;
    let d = cross.value - own.value;
    BoundInterval::new(
        d - T::count(k_prime).ln() - s,
        d + T::count(k).ln() + s,
        s,
    )
}

/// One elementary interval of the envelope sandwich
/// `max(k·minEnv, maxEnv) ≤ m ≤ k·maxEnv` for each listed mixture: the
/// scaled weighted components realizing the lower and upper side.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichPiece<T> {
    pub lo: T,
    pub hi: T,
    pub lower: Vec<WeightedComponent<T>>,
    pub upper: Vec<WeightedComponent<T>>,
}

/// Overlays the upper and lower envelopes of every mixture, then splits
/// further wherever `k·minEnv` and `maxEnv` cross.
pub fn sandwich_pieces<T: Real>(mixtures: &[&Mixture<T>]) -> Result<Vec<SandwichPiece<T>>> {
    let support = mixtures
        .first()
        .ok_or_else(|| Error::Argument("no mixtures".into()))?
        .support();
    let parts: Vec<_> = mixtures
        .iter()
        .flat_map(|m| {
            [
                mixture_partition(m, EnvelopeMode::Upper),
                mixture_partition(m, EnvelopeMode::Lower),
            ]
        })
        .collect();
    let refs: Vec<_> = parts.iter().collect();
    let cells = overlay_all(&refs)?;
    let mut out = Vec::new();
    for cell in cells {
        let mut cuts = Vec::new();
        let sides: Vec<_> = mixtures
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let k = T::count(m.len());
                let up = m.components()[cell.pieces[2 * j]];
                let low = m.components()[cell.pieces[2 * j + 1]].scaled(k);
                (low, up, up.scaled(k))
            })
            .collect();
        for (low, up, _) in &sides {
            if low != up {
                cuts.extend(
                    pairwise_intersections(low, up, support)
                        .into_iter()
                        .filter(|&x| x > cell.lo && x < cell.hi),
                );
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        cuts.dedup();
        let mut knots = vec![cell.lo];
        knots.extend(cuts);
        knots.push(cell.hi);
        for w in knots.windows(2) {
            let x = probe(w[0], w[1]);
            let mut lower = Vec::with_capacity(sides.len());
            let mut upper = Vec::with_capacity(sides.len());
            for (low, up, kup) in &sides {
                lower.push(if low.ln_weighted(x) >= up.ln_weighted(x) { *low } else { *up });
                upper.push(*kup);
            }
            out.push(SandwichPiece {
                lo: w[0],
                hi: w[1],
                lower,
                upper,
            });
        }
    }
    Ok(out)
}

pub(crate) fn probe<T: Real>(a: T, b: T) -> T {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => a + (b - a) * T::of(0.5),
        (true, false) => a + a.abs().max(T::one()),
        (false, true) => b - b.abs().max(T::one()),
        (false, false) => T::zero(),
    }
}

/// `w_i ∫_a^b p_i ln(num / den)`. When the carriers cancel (same natural
/// family) this is the closed form of
/// [`kl3_truncated`](crate::integrals::kl3_truncated), expanded about the
/// integrating component for conditioning; otherwise the `ln x` moment is
/// integrated numerically.
pub(crate) fn log_ratio_integral<T: Real>(
    ci: &WeightedComponent<T>,
    num: &WeightedComponent<T>,
    den: &WeightedComponent<T>,
    a: T,
    b: T,
    tol: T,
) -> Result<QuadratureValue<T>> {
    let r = expected_log_terms(&ci.params, &[(T::one(), *num), (-T::one(), *den)], a, b, tol / ci.weight);
    Ok(QuadratureValue::recover(r)?.scale(ci.weight))
}

/// KL bounds from the pointwise ratio sandwich
/// `ln(L_m / U_m') ≤ ln(m / m') ≤ ln(U_m / L_m')`, integrated against each
/// weighted component of `m` on the overlay of all four envelopes.
pub fn kl_bounds_ratio<T: Real>(m: &Mixture<T>, mp: &Mixture<T>) -> Result<BoundInterval<T>> {
    kl_bounds_ratio_with(m, mp, &BoundOptions::default())
}

pub fn kl_bounds_ratio_with<T: Real>(
    m: &Mixture<T>,
    mp: &Mixture<T>,
    opts: &BoundOptions<T>,
) -> Result<BoundInterval<T>> {
    check_pair(m, mp)?;
    let pieces = sandwich_pieces(&[m, mp])?;
    let mut lo = QuadratureValue::zero();
    let mut hi = QuadratureValue::zero();
    for p in &pieces {
        for c in m.components() {
            lo = lo + log_ratio_integral(c, &p.lower[0], &p.upper[1], p.lo, p.hi, opts.quad_tol)?;
            hi = hi + log_ratio_integral(c, &p.upper[0], &p.lower[1], p.lo, p.hi, opts.quad_tol)?;
        }
    }
    let s = lo.error_bound + hi.error_bound;
    Ok(BoundInterval::new(lo.lower(), hi.upper(), s))
}

/// Every KL bound computed for one ordered pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlBounds<T> {
    /// Cross-entropy-difference form.
    pub ce: BoundInterval<T>,
    /// Ratio form.
    pub ratio: BoundInterval<T>,
    /// `ce ∩ ratio`, reported as CELB/CEUB.
    pub combinatorial: BoundInterval<T>,
    /// Refined slab-residual bounds intersected with `combinatorial`,
    /// reported as CEALB/CEAUB.
    pub adaptive: BoundInterval<T>,
    /// Single-pass slab-residual bounds (no refinement) intersected with
    /// `combinatorial`.
    pub per_slab: BoundInterval<T>,
}

impl<T: Real> KlBounds<T> {
    /// `100·(1 - adaptiveGap / combinatorialGap)`.
    pub fn improvement_percent(&self) -> T {
        improvement(&self.combinatorial, &self.adaptive)
    }

    /// Same measure for the single-pass slab rule.
    pub fn per_slab_improvement_percent(&self) -> T {
        improvement(&self.combinatorial, &self.per_slab)
    }
}

pub(crate) fn improvement<T: Real>(base: &BoundInterval<T>, better: &BoundInterval<T>) -> T {
    let g = base.width();
    if g > T::zero() {
        T::of(100.0) * (T::one() - better.width() / g)
    } else {
        T::zero()
    }
}

/// All KL bounds for `KL(m:m')`.
pub fn kl_bounds<T: Real>(m: &Mixture<T>, mp: &Mixture<T>) -> Result<KlBounds<T>> {
    kl_bounds_with(m, mp, &BoundOptions::default())
}

pub fn kl_bounds_with<T: Real>(
    m: &Mixture<T>,
    mp: &Mixture<T>,
    opts: &BoundOptions<T>,
) -> Result<KlBounds<T>> {
    check_pair(m, mp)?;
    let cross = a_term_with(m, mp, opts)?;
    let own = a_term_with(m, m, opts)?;
    let ce = kl_from_a(cross, own, m.len(), mp.len());
    let ratio = kl_bounds_ratio_with(m, mp, opts)?;
    let combinatorial = ce.intersect(&ratio);
    let (refined, single) = adaptive::kl_from_parts(m, mp, cross, own, opts)?;
    Ok(KlBounds {
        ce,
        ratio,
        combinatorial,
        adaptive: refined.intersect(&combinatorial),
        per_slab: single.intersect(&combinatorial),
    })
}

/// CELB/CEUB: the intersection of [`kl_bounds_ce`] and [`kl_bounds_ratio`].
pub fn combinatorial_kl_bounds<T: Real>(m: &Mixture<T>, mp: &Mixture<T>) -> Result<BoundInterval<T>> {
    let opts = BoundOptions::default();
    Ok(kl_bounds_ce_with(m, mp, &opts)?.intersect(&kl_bounds_ratio_with(m, mp, &opts)?))
}
