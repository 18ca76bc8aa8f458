//! Parametric component families: exponential, Rayleigh, Gaussian and gamma.
//!
//! Densities are evaluated in log-space; the plain density is only ever
//! `exp(log_density)`.

mod logquad;
mod natural;
pub mod special;

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::UniformSource;
use crate::scalar::Real;

pub use logquad::LogQuadratic;
pub use natural::{NaturalFamily, NaturalForm};

/// Closed set of supported component families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyTag {
    Exponential,
    Rayleigh,
    Gaussian,
    Gamma,
}

impl FamilyTag {
    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::Exponential => "exponential",
            FamilyTag::Rayleigh => "rayleigh",
            FamilyTag::Gaussian => "gaussian",
            FamilyTag::Gamma => "gamma",
        }
    }

    pub fn support<T: Real>(self) -> SupportInterval<T> {
        match self {
            FamilyTag::Gaussian => SupportInterval::real_line(),
            _ => SupportInterval::positive_half_line(),
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Support of a family, with possibly infinite ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportInterval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> SupportInterval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Argument(format!(
                "support requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn real_line() -> Self {
        Self {
            lo: T::neg_infinity(),
            hi: T::infinity(),
        }
    }

    pub fn positive_half_line() -> Self {
        Self {
            lo: T::zero(),
            hi: T::infinity(),
        }
    }

    /// Membership in the closed support.
    pub fn contains(&self, x: T) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Membership in the open support.
    pub fn contains_open(&self, x: T) -> bool {
        x > self.lo && x < self.hi
    }

    pub(crate) fn check(&self, x: T) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                x: x.f64(),
                lo: self.lo.f64(),
                hi: self.hi.f64(),
            })
        }
    }
}

/// Parameters of one component density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComponentParams<T> {
    /// `λ e^{-λx}` on `[0, ∞)`.
    Exponential { rate: T },
    /// `x/σ² e^{-x²/(2σ²)}` on `[0, ∞)`.
    Rayleigh { scale: T },
    /// `N(μ, σ²)` on the real line.
    Gaussian { mean: T, stddev: T },
    /// `x^{k-1} e^{-x/λ} / (λ^k Γ(k))` on `(0, ∞)`.
    Gamma { shape: T, scale: T },
}

fn positive<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v.is_finite() && v > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v.f64(),
            reason: "must be finite and strictly positive",
        })
    }
}

impl<T: Real> ComponentParams<T> {
    pub fn exponential(rate: T) -> Result<Self> {
        let p = Self::Exponential { rate };
        p.validate().map(|_| p)
    }

    pub fn rayleigh(scale: T) -> Result<Self> {
        let p = Self::Rayleigh { scale };
        p.validate().map(|_| p)
    }

    pub fn gaussian(mean: T, stddev: T) -> Result<Self> {
        let p = Self::Gaussian { mean, stddev };
        p.validate().map(|_| p)
    }

    pub fn gamma(shape: T, scale: T) -> Result<Self> {
        let p = Self::Gamma { shape, scale };
        p.validate().map(|_| p)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Exponential { rate } => positive("rate", rate),
            Self::Rayleigh { scale } => positive("scale", scale),
            Self::Gaussian { mean, stddev } => {
                if !mean.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "mean",
                        value: mean.f64(),
                        reason: "must be finite",
                    });
                }
                positive("stddev", stddev)
            }
            Self::Gamma { shape, scale } => {
                positive("shape", shape)?;
                positive("scale", scale)
            }
        }
    }

    pub fn family(&self) -> FamilyTag {
        match self {
            Self::Exponential { .. } => FamilyTag::Exponential,
            Self::Rayleigh { .. } => FamilyTag::Rayleigh,
            Self::Gaussian { .. } => FamilyTag::Gaussian,
            Self::Gamma { .. } => FamilyTag::Gamma,
        }
    }

    pub fn support(&self) -> SupportInterval<T> {
        self.family().support()
    }

    /// Log-density at `x`; a domain error outside the closed support.
    pub fn log_density(&self, x: T) -> Result<T> {
        self.support().check(x)?;
        Ok(self.ln_pdf(x))
    }

    pub fn density(&self, x: T) -> Result<T> {
        self.log_density(x).map(T::exp)
    }

    /// Log-density without the support check: `-∞` outside the support and
    /// the one-sided limit on its boundary.
    pub fn ln_pdf(&self, x: T) -> T {
        let half = T::of(0.5);
        match *self {
            Self::Exponential { rate } => {
                if x < T::zero() {
                    T::neg_infinity()
                } else {
                    rate.ln() - rate * x
                }
            }
            Self::Rayleigh { scale } => {
                if x < T::zero() {
                    T::neg_infinity()
                } else {
                    let s2 = scale * scale;
                    x.ln() - s2.ln() - x * x / (s2 + s2)
                }
            }
            Self::Gaussian { mean, stddev } => {
                let z = (x - mean) / stddev;
                -half * z * z - stddev.ln() - half * (T::PI() + T::PI()).ln()
            }
            Self::Gamma { shape, scale } => {
                if x < T::zero() {
                    T::neg_infinity()
                } else if x == T::zero() {
                    if shape == T::one() {
                        -scale.ln()
                    } else if shape > T::one() {
                        T::neg_infinity()
                    } else {
                        T::infinity()
                    }
                } else {
                    (shape - T::one()) * x.ln()
                        - x / scale
                        - shape * scale.ln()
                        - special::ln_gamma(shape)
                }
            }
        }
    }

    /// Cumulative distribution function, clamped to 0 and 1 outside the support.
    pub fn cdf(&self, x: T) -> T {
        if x.is_nan() {
            return x;
        }
        match *self {
            Self::Exponential { rate } => {
                if x <= T::zero() {
                    T::zero()
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Self::Rayleigh { scale } => {
                if x <= T::zero() {
                    T::zero()
                } else {
                    -(-x * x / (T::of(2.0) * scale * scale)).exp_m1()
                }
            }
            Self::Gaussian { mean, stddev } => {
                T::of(0.5) * special::erfc(-(x - mean) / (stddev * T::SQRT_2()))
            }
            Self::Gamma { shape, scale } => {
                if x <= T::zero() {
                    T::zero()
                } else {
                    special::gamma_p(shape, x / scale)
                }
            }
        }
    }

    /// Survival function `1 - cdf(x)`, accurate in the upper tail.
    pub fn sf(&self, x: T) -> T {
        if x.is_nan() {
            return x;
        }
        match *self {
            Self::Exponential { rate } => {
                if x <= T::zero() {
                    T::one()
                } else {
                    (-rate * x).exp()
                }
            }
            Self::Rayleigh { scale } => {
                if x <= T::zero() {
                    T::one()
                } else {
                    (-x * x / (T::of(2.0) * scale * scale)).exp()
                }
            }
            Self::Gaussian { mean, stddev } => {
                T::of(0.5) * special::erfc((x - mean) / (stddev * T::SQRT_2()))
            }
            Self::Gamma { shape, scale } => {
                if x <= T::zero() {
                    T::one()
                } else {
                    special::gamma_q(shape, x / scale)
                }
            }
        }
    }

    /// Probability mass of `(a, b)`, evaluated from whichever tail keeps
    /// relative precision.
    pub fn interval_mass(&self, a: T, b: T) -> T {
        if !(a < b) {
            return T::zero();
        }
        match *self {
            Self::Exponential { rate } => {
                let a = a.max(T::zero());
                let b = b.max(T::zero());
                if a >= b {
                    return T::zero();
                }
                -(-rate * a).exp() * (-rate * (b - a)).exp_m1()
            }
            Self::Rayleigh { scale } => {
                let a = a.max(T::zero());
                let b = b.max(T::zero());
                if a >= b {
                    return T::zero();
                }
                let inv = T::one() / (T::of(2.0) * scale * scale);
                let head = (-a * a * inv).exp();
                if b.is_infinite() {
                    head
                } else {
                    -head * (-(b - a) * (b + a) * inv).exp_m1()
                }
            }
            Self::Gaussian { .. } | Self::Gamma { .. } => {
                let center = self.mean();
                let m = if a >= center {
                    self.sf(a) - self.sf(b)
                } else if b <= center {
                    self.cdf(b) - self.cdf(a)
                } else {
                    T::one() - self.cdf(a) - self.sf(b)
                };
                m.max(T::zero())
            }
        }
    }

    /// `∫_a^b x p(x) dx`.
    pub fn partial_first_moment(&self, a: T, b: T) -> T {
        if !(a < b) {
            return T::zero();
        }
        match *self {
            Self::Exponential { rate } => {
                let inv = T::one() / rate;
                edge(a.max(T::zero()), |x| (x + inv) * (-rate * x).exp())
                    - edge(b.max(T::zero()), |x| (x + inv) * (-rate * x).exp())
            }
            Self::Rayleigh { scale } => {
                // ∫ x² /σ² e^{-x²/2σ²} = σ √(π/2) (2Φ₀(x/σ) - 1) - x e^{-x²/2σ²}
                let s = scale;
                let g = Self::Gaussian {
                    mean: T::zero(),
                    stddev: s,
                };
                let a = a.max(T::zero());
                let b = b.max(T::zero());
                let gauss = T::of(2.0) * g.interval_mass(a, b);
                let c = s * (T::PI() / T::of(2.0)).sqrt();
                let tail = |x: T| x * (-x * x / (T::of(2.0) * s * s)).exp();
                c * gauss + edge(a, tail) - edge(b, tail)
            }
            Self::Gaussian { mean, stddev } => {
                let s2 = stddev * stddev;
                mean * self.interval_mass(a, b) + s2 * (self.pdf_edge(a) - self.pdf_edge(b))
            }
            Self::Gamma { shape, scale } => {
                shape
                    * scale
                    * Self::Gamma {
                        shape: shape + T::one(),
                        scale,
                    }
                    .interval_mass(a, b)
            }
        }
    }

    /// `∫_a^b x² p(x) dx`.
    pub fn partial_second_moment(&self, a: T, b: T) -> T {
        if !(a < b) {
            return T::zero();
        }
        let two = T::of(2.0);
        match *self {
            Self::Exponential { rate } => {
                // ∫ x² λe^{-λx} = -(x² + 2x/λ + 2/λ²) e^{-λx}
                let f = |x: T| (x * x + two * x / rate + two / (rate * rate)) * (-rate * x).exp();
                edge(a.max(T::zero()), f) - edge(b.max(T::zero()), f)
            }
            Self::Rayleigh { scale } => {
                let s2 = scale * scale;
                let f = |x: T| (x * x + two * s2) * (-x * x / (two * s2)).exp();
                edge(a.max(T::zero()), f) - edge(b.max(T::zero()), f)
            }
            Self::Gaussian { mean, stddev } => {
                let s2 = stddev * stddev;
                let f = |x: T| (x + mean) * self.pdf_edge_raw(x);
                (mean * mean + s2) * self.interval_mass(a, b) + s2 * (edge(a, f) - edge(b, f))
            }
            Self::Gamma { shape, scale } => {
                shape
                    * (shape + T::one())
                    * scale
                    * scale
                    * Self::Gamma {
                        shape: shape + two,
                        scale,
                    }
                    .interval_mass(a, b)
            }
        }
    }

    fn pdf_edge_raw(&self, x: T) -> T {
        self.ln_pdf(x).exp()
    }

    /// Density at a (possibly infinite) interval end; zero at infinity.
    fn pdf_edge(&self, x: T) -> T {
        edge(x, |x| self.pdf_edge_raw(x))
    }

    pub fn mean(&self) -> T {
        match *self {
            Self::Exponential { rate } => T::one() / rate,
            Self::Rayleigh { scale } => scale * (T::PI() / T::of(2.0)).sqrt(),
            Self::Gaussian { mean, .. } => mean,
            Self::Gamma { shape, scale } => shape * scale,
        }
    }

    pub fn variance(&self) -> T {
        match *self {
            Self::Exponential { rate } => T::one() / (rate * rate),
            Self::Rayleigh { scale } => (T::of(4.0) - T::PI()) / T::of(2.0) * scale * scale,
            Self::Gaussian { stddev, .. } => stddev * stddev,
            Self::Gamma { shape, scale } => shape * scale * scale,
        }
    }

    /// Quantile solving `cdf(x) = p` given both `p` and `q = 1 - p`; the
    /// smaller of the two carries the precision.
    pub fn quantile_pq(&self, p: T, q: T) -> T {
        let support = self.support();
        if p <= T::zero() {
            return support.lo;
        }
        if q <= T::zero() {
            return support.hi;
        }
        let two = T::of(2.0);
        match *self {
            Self::Exponential { rate } => {
                if p <= q {
                    -(-p).ln_1p() / rate
                } else {
                    -q.ln() / rate
                }
            }
            Self::Rayleigh { scale } => {
                let e = if p <= q { -(-p).ln_1p() } else { -q.ln() };
                scale * (two * e).sqrt()
            }
            Self::Gamma { shape, scale } => scale * special::inverse_gamma_pq(shape, p, q),
            Self::Gaussian { mean, stddev } => {
                // bisection on the standardized tail that is being matched
                let (target, upper) = if p <= q { (p, false) } else { (q, true) };
                let std = Self::Gaussian {
                    mean: T::zero(),
                    stddev: T::one(),
                };
                let f = |z: T| if upper { std.sf(-z) } else { std.cdf(z) };
                let (mut lo, mut hi) = (-T::of(40.0), T::zero());
                for _ in 0..200 {
                    let mid = T::of(0.5) * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if f(mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let z = T::of(0.5) * (lo + hi);
                mean + stddev * if upper { -z } else { z }
            }
        }
    }

    pub fn quantile(&self, p: T) -> T {
        self.quantile_pq(p, T::one() - p)
    }

    /// Draws one variate.
    ///
    /// Exponential and Rayleigh by inverse CDF, Gaussian by the Marsaglia polar
    /// method, gamma by the Marsaglia-Tsang squeeze (shape < 1 boosted through
    /// `U^{1/k}`).
    pub fn sample<R: UniformSource + ?Sized>(&self, rng: &mut R) -> T {
        match *self {
            Self::Exponential { rate } => T::of(-rng.next_open01().ln()) / rate,
            Self::Rayleigh { scale } => scale * T::of((-2.0 * rng.next_open01().ln()).sqrt()),
            Self::Gaussian { mean, stddev } => mean + stddev * T::of(standard_normal(rng)),
            Self::Gamma { shape, scale } => {
                scale * T::of(standard_gamma(shape.f64(), rng))
            }
        }
    }

    /// Coefficients of the log-density as `c0 + c1 x + c2 x² + c_log ln x`.
    pub fn log_quadratic(&self) -> LogQuadratic<T> {
        let half = T::of(0.5);
        match *self {
            Self::Exponential { rate } => LogQuadratic::new(rate.ln(), -rate, T::zero(), T::zero()),
            Self::Rayleigh { scale } => {
                let s2 = scale * scale;
                LogQuadratic::new(-s2.ln(), T::zero(), -half / s2, T::one())
            }
            Self::Gaussian { mean, stddev } => {
                let s2 = stddev * stddev;
                LogQuadratic::new(
                    -stddev.ln() - half * (T::PI() + T::PI()).ln() - half * mean * mean / s2,
                    mean / s2,
                    -half / s2,
                    T::zero(),
                )
            }
            Self::Gamma { shape, scale } => LogQuadratic::new(
                -shape * scale.ln() - special::ln_gamma(shape),
                -T::one() / scale,
                T::zero(),
                shape - T::one(),
            ),
        }
    }

    /// Exponential-family natural form; a gamma component is placed in the
    /// fixed-shape family of its own shape.
    pub fn to_natural(&self) -> NaturalForm<T> {
        NaturalForm::from_params(self)
    }

    /// A finite point strictly inside the support that is representative of
    /// where this component puts its mass.
    pub fn typical_point(&self) -> T {
        match *self {
            Self::Gaussian { mean, .. } => mean,
            _ => self.mean(),
        }
    }

    /// Characteristic length scale.
    pub fn scale_length(&self) -> T {
        self.variance().sqrt()
    }
}

impl<T: Real> fmt::Display for ComponentParams<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exponential { rate } => write!(f, "Exponential(rate={rate})"),
            Self::Rayleigh { scale } => write!(f, "Rayleigh(scale={scale})"),
            Self::Gaussian { mean, stddev } => write!(f, "Gaussian(mean={mean}, stddev={stddev})"),
            Self::Gamma { shape, scale } => write!(f, "Gamma(shape={shape}, scale={scale})"),
        }
    }
}

/// Evaluates an antiderivative term at an interval end; terms vanish at ±∞.
#[inline]
pub(crate) fn edge<T: Real>(x: T, f: impl Fn(T) -> T) -> T {
    if x.is_infinite() {
        T::zero()
    } else {
        f(x)
    }
}

fn standard_normal<R: UniformSource + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u = 2.0 * rng.next_open01() - 1.0;
        let v = 2.0 * rng.next_open01() - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * (-2.0 * s.ln() / s).sqrt();
        }
    }
}

fn standard_gamma<R: UniformSource + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let g = standard_gamma(shape + 1.0, rng);
        return g * rng.next_open01().powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let (x, v) = loop {
            let x = standard_normal(rng);
            let v = 1.0 + c * x;
            if v > 0.0 {
                break (x, v * v * v);
            }
        };
        let u = rng.next_open01();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

#[cfg(test)]
mod tests;
