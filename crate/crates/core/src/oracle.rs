//! Brute-force reference values by adaptive quadrature of the defining
//! integrands, and random mixture generation, for cross-checking the
//! certified bounds.

use crate::envelope::{mixture_partition, EnvelopeMode, Mixture, WeightedComponent};
use crate::error::Result;
use crate::families::{ComponentParams, FamilyTag};
use crate::integrals::{adaptive_quadrature, integrate_with_breaks, QuadratureValue};
use crate::rng::UniformSource;
use crate::scalar::Real;

fn breaks<T: Real>(ms: &[&Mixture<T>]) -> (Vec<T>, T) {
    let mut pts = Vec::new();
    let mut scale = T::zero();
    for m in ms {
        for c in m.components() {
            let mu = c.params.typical_point();
            let sd = c.params.scale_length();
            scale = scale.max(m.variance().sqrt());
            pts.push(mu);
            for k in [0.25, 1.0, 3.0, 8.0, 20.0] {
                pts.push(mu - sd * T::of(k));
                pts.push(mu + sd * T::of(k));
            }
        }
    }
    (pts, scale.max(T::epsilon()))
}

/// `∫ m f(ln m, ·)` with the integrand zero wherever `m` vanishes.
fn integrate_against<T: Real>(
    m: &Mixture<T>,
    others: &[&Mixture<T>],
    extra: &[T],
    tol: T,
    f: impl Fn(T, T) -> T,
) -> Result<QuadratureValue<T>> {
    let mut all = vec![m];
    all.extend_from_slice(others);
    let (mut pts, scale) = breaks(&all);
    pts.extend_from_slice(extra);
    let s = m.support();
    let g = |x: T| {
        let l = m.ln_density(x);
        if l == T::neg_infinity() {
            T::zero()
        } else {
            l.exp() * f(l, x)
        }
    };
    integrate_with_breaks(g, s.lo, s.hi, &pts, scale, tol)
}

/// `KL(m:m') = ∫ m ln(m/m')`.
pub fn kl_quadrature<T: Real>(m: &Mixture<T>, mp: &Mixture<T>, tol: T) -> Result<QuadratureValue<T>> {
    integrate_against(m, &[mp], &[], tol, |l, x| l - mp.ln_density(x))
}

/// `H×(m:m') = -∫ m ln m'`.
pub fn cross_entropy_quadrature<T: Real>(m: &Mixture<T>, mp: &Mixture<T>, tol: T) -> Result<QuadratureValue<T>> {
    integrate_against(m, &[mp], &[], tol, |_, x| -mp.ln_density(x))
}

/// `H(m) = -∫ m ln m`.
pub fn entropy_quadrature<T: Real>(m: &Mixture<T>, tol: T) -> Result<QuadratureValue<T>> {
    integrate_against(m, &[], &[], tol, |l, _| -l)
}

/// `-∫ m ln max_j w'_j p'_j`, split at the envelope breakpoints.
pub fn max_envelope_quadrature<T: Real>(m: &Mixture<T>, mp: &Mixture<T>, tol: T) -> Result<QuadratureValue<T>> {
    let part = mixture_partition(mp, EnvelopeMode::Upper);
    integrate_against(m, &[mp], &part.breakpoints, tol, |_, x| {
        -mp.components()
            .iter()
            .map(|c| c.ln_weighted(x))
            .fold(T::neg_infinity(), T::max)
    })
}

/// A `k`-component mixture with moderately spread random parameters.
pub fn random_mixture<T: Real, R: UniformSource + ?Sized>(rng: &mut R, family: FamilyTag, k: usize) -> Mixture<T> {
    let mut u = |lo: f64, hi: f64| T::of(lo + (hi - lo) * rng.next_open01());
    let comps = (0..k)
        .map(|_| {
            let p = match family {
                FamilyTag::Exponential => ComponentParams::exponential(u(0.1, 10.0)),
                FamilyTag::Rayleigh => ComponentParams::rayleigh(u(0.2, 20.0)),
                FamilyTag::Gaussian => ComponentParams::gaussian(u(-10.0, 10.0), u(0.1, 3.0)),
                FamilyTag::Gamma => ComponentParams::gamma(u(0.5, 6.0), u(0.2, 5.0)),
            }
            .expect("parameters drawn inside the valid ranges");
            let w = u(0.05, 1.0);
            WeightedComponent { weight: w, params: p }
        })
        .collect::<Vec<_>>();
    let total: T = comps.iter().map(|c| c.weight).sum();
    Mixture::new(
        comps
            .into_iter()
            .map(|c| WeightedComponent { weight: c.weight / total, params: c.params })
            .collect(),
    )
    .expect("normalized random mixture")
}

/// A random component with parameters in a moderate range.
pub fn random_component<R: UniformSource + ?Sized>(rng: &mut R, family: FamilyTag) -> ComponentParams<f64> {
    let mut u = |lo: f64, hi: f64| lo + (hi - lo) * rng.next_open01();
    match family {
        FamilyTag::Exponential => ComponentParams::exponential(u(0.2, 5.0)),
        FamilyTag::Rayleigh => ComponentParams::rayleigh(u(0.3, 5.0)),
        FamilyTag::Gaussian => ComponentParams::gaussian(u(-5.0, 5.0), u(0.3, 3.0)),
        FamilyTag::Gamma => ComponentParams::gamma(u(1.0, 6.0), u(0.3, 3.0)),
    }
    .expect("parameters drawn inside the valid ranges")
}

/// A random finite interval between the 2% and 98% quantiles of `p`.
pub fn random_range<R: UniformSource + ?Sized>(rng: &mut R, p: &ComponentParams<f64>) -> (f64, f64) {
    let u1 = 0.02 + 0.96 * rng.next_open01();
    let u2 = 0.02 + 0.96 * rng.next_open01();
    let (x1, x2) = (p.quantile(u1.min(u2)), p.quantile(u1.max(u2)));
    if x2 - x1 < 1e-6 {
        (x1, x1 + 0.1)
    } else {
        (x1, x2)
    }
}

fn weighted_integral_oracle(
    ci: &WeightedComponent<f64>,
    a: f64,
    b: f64,
    tol: f64,
    f: impl Fn(f64) -> f64,
) -> Result<QuadratureValue<f64>> {
    adaptive_quadrature(
        |x| {
            let d = ci.weight * ci.params.ln_pdf(x).exp();
            if d == 0.0 {
                0.0
            } else {
                d * f(x)
            }
        },
        a,
        b,
        tol,
    )
}

/// `w_i ∫_a^b p_i` by quadrature.
pub fn mass_oracle(ci: &WeightedComponent<f64>, a: f64, b: f64, tol: f64) -> Result<QuadratureValue<f64>> {
    weighted_integral_oracle(ci, a, b, tol, |_| 1.0)
}

/// `-∫_a^b w_i p_i ln(w_j p_j)` by quadrature.
pub fn cross_entropy_c_oracle(
    ci: &WeightedComponent<f64>,
    cj: &WeightedComponent<f64>,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureValue<f64>> {
    weighted_integral_oracle(ci, a, b, tol, |x| -cj.ln_weighted(x))
}

/// `∫_a^b w_1 p_1 ln(w_2 p_2 / w_3 p_3)` by quadrature.
pub fn kl3_oracle(
    c1: &WeightedComponent<f64>,
    c2: &WeightedComponent<f64>,
    c3: &WeightedComponent<f64>,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureValue<f64>> {
    weighted_integral_oracle(c1, a, b, tol, |x| c2.ln_weighted(x) - c3.ln_weighted(x))
}
