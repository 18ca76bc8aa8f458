use super::adaptive::adaptive_from_a;
use super::{a_term_with, improvement, sandwich_pieces, BoundInterval, BoundOptions};
use crate::envelope::Mixture;
use crate::error::Result;
use crate::integrals::{partial_cross_entropy_c_tol, QuadratureValue};
use crate::scalar::Real;

/// Entropy bounds of one mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyBounds<T> {
    /// `A(m:m) - ln k ≤ H(m) ≤ -∫ m ln max(k·minEnv, maxEnv)`.
    pub combinatorial: BoundInterval<T>,
    /// Refined slab-residual bounds intersected with `combinatorial`.
    pub adaptive: BoundInterval<T>,
    /// Single-pass slab-residual bounds intersected with `combinatorial`.
    pub per_slab: BoundInterval<T>,
    /// Maximum entropy upper bound.
    pub meub: T,
}

impl<T: Real> EntropyBounds<T> {
    /// The tightest certified interval, with MEUB folded into the upper end.
    pub fn best(&self) -> BoundInterval<T> {
        let mut b = self.adaptive;
        b.upper = b.upper.min(self.meub);
        b
    }

    pub fn improvement_percent(&self) -> T {
        improvement(&self.combinatorial, &self.adaptive)
    }

    pub fn per_slab_improvement_percent(&self) -> T {
        improvement(&self.combinatorial, &self.per_slab)
    }
}

/// Certified differential entropy interval (refined envelope bounds).
pub fn entropy_bounds<T: Real>(m: &Mixture<T>) -> Result<BoundInterval<T>> {
    Ok(entropy_bounds_detailed(m, &BoundOptions::default())?.adaptive)
}

pub fn entropy_bounds_detailed<T: Real>(
    m: &Mixture<T>,
    opts: &BoundOptions<T>,
) -> Result<EntropyBounds<T>> {
    let a = a_term_with(m, m, opts)?;
    let ln_k = T::count(m.len()).ln();
    let mut upper = QuadratureValue::zero();
    for p in sandwich_pieces(&[m])? {
        for c in m.components() {
            let r = partial_cross_entropy_c_tol(c, &p.lower[0], p.lo, p.hi, opts.quad_tol);
            upper = upper + QuadratureValue::recover(r)?;
        }
    }
    let s = a.error_bound + upper.error_bound;
    let combinatorial = BoundInterval::new(
        a.lower() - ln_k,
        upper.upper().min(a.upper()),
        s,
    );
    let (refined, single) = adaptive_from_a(m, m, a, opts);
    Ok(EntropyBounds {
        combinatorial,
        adaptive: refined.intersect(&combinatorial),
        per_slab: single.intersect(&combinatorial),
        meub: meub(m),
    })
}

/// `½ ln(2πe Var[m])`, the entropy of the Gaussian with the mixture's
/// variance.
pub fn meub<T: Real>(m: &Mixture<T>) -> T {
    let two_pi_e = T::of(2.0) * T::PI() * T::E();
    T::of(0.5) * (two_pi_e * m.variance()).ln()
}
