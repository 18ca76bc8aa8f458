//! Closed-form mass and partial cross-entropy integrals, the truncated and
//! scaled exponential-family divergences, and the quadrature used for the
//! `∫ p ln x` terms that have no closed form.

mod quadrature;


pub use quadrature::{adaptive_quadrature, QuadratureValue, MAX_INTERVALS};
pub(crate) use quadrature::integrate_with_breaks;

use crate::envelope::WeightedComponent;
use crate::error::{Error, Result};
use crate::families::{edge, ComponentParams, NaturalFamily, NaturalForm};
use crate::scalar::Real;

fn check_range<T: Real>(p: &ComponentParams<T>, a: T, b: T) -> Result<()> {
    if a.is_nan() || b.is_nan() || !(a < b) {
        return Err(Error::Argument(format!("integration range needs a < b, got ({a}, {b})")));
    }
    let s = p.support();
    for x in [a, b] {
        if !s.contains(x) {
            return Err(Error::Domain {
                x: x.f64(),
                lo: s.lo.f64(),
                hi: s.hi.f64(),
            });
        }
    }
    Ok(())
}

/// `M(a, b) = -∫_a^b w p(x) dx`.
pub fn mass_m<T: Real>(c: &WeightedComponent<T>, a: T, b: T) -> Result<T> {
    check_range(&c.params, a, b)?;
    Ok(-c.weight * c.params.interval_mass(a, b))
}

/// `C_{i,j}(a, b) = -∫_a^b w_i p_i(x) ln(w_j p_j(x)) dx` at the default
/// quadrature tolerance.
pub fn partial_cross_entropy_c<T: Real>(
    ci: &WeightedComponent<T>,
    cj: &WeightedComponent<T>,
    a: T,
    b: T,
) -> Result<QuadratureValue<T>> {
    partial_cross_entropy_c_tol(ci, cj, a, b, T::default_quad_tol())
}

/// [`partial_cross_entropy_c`] with an explicit quadrature tolerance.
///
/// Exponential and Gaussian components are pure closed form. Rayleigh and
/// gamma integrate the `ln x` moment numerically; everything else (mass,
/// first and second truncated moments) is closed form.
pub fn partial_cross_entropy_c_tol<T: Real>(
    ci: &WeightedComponent<T>,
    cj: &WeightedComponent<T>,
    a: T,
    b: T,
    tol: T,
) -> Result<QuadratureValue<T>> {
    check_range(&ci.params, a, b)?;
    let e = expected_log_terms(&ci.params, &[(T::one(), *cj)], a, b, tol)?;
    Ok(e.scale(-ci.weight))
}

/// `∫_a^b p(x) Σ_k s_k ln(w_k p_k(x)) dx` for signed weighted log-densities
/// of the same family as `p`.
///
/// The integrand is log-quadratic (plus `ln x`), so only the `ln x` moment
/// can need quadrature, and it cancels whenever the signed `ln x`
/// coefficients sum to zero. Gaussian integrands are expanded about the
/// mean of `p` to avoid cancellation far from the origin.
pub fn expected_log_terms<T: Real>(
    p: &ComponentParams<T>,
    terms: &[(T, WeightedComponent<T>)],
    a: T,
    b: T,
    tol: T,
) -> Result<QuadratureValue<T>> {
    check_range(p, a, b)?;
    if let Some((_, c)) = terms.iter().find(|(_, c)| c.family() != p.family()) {
        return Err(Error::FamilyMismatch(
            p.family().to_string(),
            c.family().to_string(),
        ));
    }
    let mass = p.interval_mass(a, b);
    if let ComponentParams::Gaussian { mean, stddev } = *p {
        let mut v0 = T::zero();
        let mut slope = T::zero();
        let mut curv = T::zero();
        for (s, c) in terms {
            let ComponentParams::Gaussian { mean: mk, stddev: sk } = c.params else {
                unreachable!("family checked above")
            };
            let inv = T::one() / (sk * sk);
            v0 = v0 + *s * c.ln_weighted(mean);
            slope = slope + *s * (mk - mean) * inv;
            curv = curv - *s * T::of(0.5) * inv;
        }
        let s2 = stddev * stddev;
        let pdf = |x: T| p.ln_pdf(x).exp();
        let m1 = s2 * (edge(a, pdf) - edge(b, pdf));
        let m2 = s2 * (mass + edge(a, |x| (x - mean) * pdf(x)) - edge(b, |x| (x - mean) * pdf(x)));
        let mut value = T::zero();
        if v0 != T::zero() {
            value = value + v0 * mass;
        }
        if slope != T::zero() {
            value = value + slope * m1;
        }
        if curv != T::zero() {
            value = value + curv * m2;
        }
        return Ok(QuadratureValue::exact(value));
    }

    let mut c0 = T::zero();
    let mut c1 = T::zero();
    let mut c2 = T::zero();
    let mut c_log = T::zero();
    for (s, c) in terms {
        let q = c.log_quadratic();
        c0 = c0 + *s * q.c0;
        c1 = c1 + *s * q.c1;
        c2 = c2 + *s * q.c2;
        c_log = c_log + *s * q.c_log;
    }
    let mut value = c0 * mass;
    if c1 != T::zero() {
        value = value + c1 * p.partial_first_moment(a, b);
    }
    if c2 != T::zero() {
        value = value + c2 * p.partial_second_moment(a, b);
    }
    let mut out = QuadratureValue::exact(value);
    if c_log != T::zero() {
        let tol_l = tol / c_log.abs();
        let l = log_moment(p, a, b, tol_l)?;
        out = out + l.scale(c_log);
    }
    Ok(out)
}

/// `∫_a^b p(x) ln x dx` by adaptive quadrature, with the range pre-split at
/// points spread over the bulk of `p`.
pub fn log_moment<T: Real>(p: &ComponentParams<T>, a: T, b: T, tol: T) -> Result<QuadratureValue<T>> {
    let a = a.max(T::zero());
    if !(a < b) {
        return Ok(QuadratureValue::zero());
    }
    let mean = p.mean();
    let sd = p.scale_length();
    let mut breaks: Vec<T> = [-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0]
        .iter()
        .map(|&k| mean + T::of(k) * sd)
        .collect();
    if let ComponentParams::Gamma { shape, scale } = *p {
        if shape > T::one() {
            breaks.push((shape - T::one()) * scale);
        }
        breaks.push(scale * T::of(1e-3));
    }
    breaks.push(sd * T::of(1e-2));
    let f = |x: T| {
        let d = p.ln_pdf(x).exp();
        if d == T::zero() {
            T::zero()
        } else {
            d * x.ln()
        }
    };
    integrate_with_breaks(f, a, b, &breaks, sd, tol)
}

/// `∫_a^b w₁p₁ ln(w₂p₂ / w₃p₃) dx` for three members of one exponential
/// family, in closed form: the carriers cancel in the ratio, leaving
/// `w₁[m ln(w₂/w₃) + (θ₂ - θ₃)ᵀ T - m (F(θ₂) - F(θ₃))]` with `m` the
/// truncated mass and `T` the truncated sufficient-statistic moment of `p₁`.
#[allow(clippy::too_many_arguments)]
pub fn kl3_truncated<T: Real>(
    w1: T,
    n1: &NaturalForm<T>,
    w2: T,
    n2: &NaturalForm<T>,
    w3: T,
    n3: &NaturalForm<T>,
    a: T,
    b: T,
) -> Result<T> {
    same_family(n1, n2)?;
    same_family(n1, n3)?;
    check_range(&n1.params(), a, b)?;
    let m = n1.truncated_mass(a, b);
    let t = n1.truncated_stat_moment(a, b);
    let dtheta: T = n2
        .theta
        .iter()
        .zip(&n3.theta)
        .zip(&t)
        .map(|((&x, &y), &s)| (x - y) * s)
        .sum();
    let df = n2.log_normalizer() - n3.log_normalizer();
    Ok(w1 * (m * (w2 / w3).ln() + dtheta - m * df))
}

/// `∫_a^b w p ln(w p / (w' p')) dx`, the truncated and scaled divergence:
/// `w m_D(θ) (ln(w/w') + B_F(θ':θ)) - w (θ' - θ)ᵀ ∇m_D(θ)`.
pub fn truncated_kl_scaled<T: Real>(
    w: T,
    n: &NaturalForm<T>,
    w_prime: T,
    n_prime: &NaturalForm<T>,
    a: T,
    b: T,
) -> Result<T> {
    same_family(n, n_prime)?;
    check_range(&n.params(), a, b)?;
    let m = n.truncated_mass(a, b);
    let bf = bregman(&n.family, &n_prime.theta, &n.theta)?;
    let grad = n.grad_truncated_mass(a, b);
    let lin: T = n_prime
        .theta
        .iter()
        .zip(&n.theta)
        .zip(&grad)
        .map(|((&tp, &t), &g)| (tp - t) * g)
        .sum();
    Ok(w * m * ((w / w_prime).ln() + bf) - w * lin)
}

fn same_family<T: Real>(a: &NaturalForm<T>, b: &NaturalForm<T>) -> Result<()> {
    if a.family.same_as(&b.family) {
        Ok(())
    } else {
        Err(Error::FamilyMismatch(a.family.to_string(), b.family.to_string()))
    }
}

/// A strictly convex generator `F` with its gradient.
pub trait BregmanGenerator<T> {
    fn generator(&self, theta: &[T]) -> Result<T>;
    fn gradient(&self, theta: &[T]) -> Result<Vec<T>>;
}

impl<T: Real> BregmanGenerator<T> for NaturalFamily<T> {
    fn generator(&self, theta: &[T]) -> Result<T> {
        self.log_normalizer(theta)
    }

    fn gradient(&self, theta: &[T]) -> Result<Vec<T>> {
        self.grad_log_normalizer(theta)
    }
}

/// `B_F(θ':θ) = F(θ') - F(θ) - (θ' - θ)ᵀ ∇F(θ)`, floored at zero against
/// rounding.
pub fn bregman<T: Real, G: BregmanGenerator<T> + ?Sized>(
    g: &G,
    theta_prime: &[T],
    theta: &[T],
) -> Result<T> {
    if theta_prime.len() != theta.len() {
        return Err(Error::Argument(format!(
            "parameter dimensions differ: {} vs {}",
            theta_prime.len(),
            theta.len()
        )));
    }
    let fp = g.generator(theta_prime)?;
    let f = g.generator(theta)?;
    let grad = g.gradient(theta)?;
    let lin: T = theta_prime
        .iter()
        .zip(theta)
        .zip(&grad)
        .map(|((&tp, &t), &d)| (tp - t) * d)
        .sum();
    Ok((fp - f - lin).max(T::zero()))
}
