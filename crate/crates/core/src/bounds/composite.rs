use super::{kl_bounds_with, BoundInterval, BoundOptions};
use crate::envelope::Mixture;
use crate::error::Result;
use crate::scalar::Real;

/// Jeffreys divergence `KL(m:m') + KL(m':m)` from the best directed bounds.
pub fn jeffreys_bounds<T: Real>(m: &Mixture<T>, mp: &Mixture<T>) -> Result<BoundInterval<T>> {
    jeffreys_bounds_with(m, mp, &BoundOptions::default())
}

pub fn jeffreys_bounds_with<T: Real>(
    m: &Mixture<T>,
    mp: &Mixture<T>,
    opts: &BoundOptions<T>,
) -> Result<BoundInterval<T>> {
    let f = kl_bounds_with(m, mp, opts)?.adaptive;
    let r = kl_bounds_with(mp, m, opts)?.adaptive;
    Ok(BoundInterval::new(
        f.lower + r.lower,
        f.upper + r.upper,
        f.quadrature_slack + r.quadrature_slack,
    ))
}

/// Jensen-Shannon divergence `½[KL(m:a) + KL(m':a)]` with `a = (m + m')/2`,
/// clamped to `[0, ln 2]`.
pub fn js_bounds<T: Real>(m: &Mixture<T>, mp: &Mixture<T>) -> Result<BoundInterval<T>> {
    js_bounds_with(m, mp, &BoundOptions::default())
}

pub fn js_bounds_with<T: Real>(
    m: &Mixture<T>,
    mp: &Mixture<T>,
    opts: &BoundOptions<T>,
) -> Result<BoundInterval<T>> {
    let avg = m.average(mp)?;
    let a = kl_bounds_with(m, &avg, opts)?.adaptive;
    let b = kl_bounds_with(mp, &avg, opts)?.adaptive;
    let half = T::of(0.5);
    let ln2 = T::LN_2();
    let lower = (half * (a.lower + b.lower)).max(T::zero());
    let upper = (half * (a.upper + b.upper)).min(ln2);
    Ok(BoundInterval::new(
        lower,
        upper,
        half * (a.quadrature_slack + b.quadrature_slack),
    ))
}
