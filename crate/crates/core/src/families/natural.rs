use std::fmt;

use super::{special, ComponentParams};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Exponential family as a Bregman generator: the log-normalizer `F`, the
/// sufficient statistic `t(x)` and the carrier `k(x)`.
///
/// Gamma is the fixed-shape family: `θ = -1/λ`, `t(x) = x`,
/// `k(x) = (shape - 1) ln x - ln Γ(shape)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NaturalFamily<T> {
    /// `θ = -λ`, `t(x) = x`, `F(θ) = -ln(-θ)`, `k(x) = 0`.
    Exponential,
    /// `θ = -1/(2σ²)`, `t(x) = x²`, `F(θ) = -ln(-2θ)`, `k(x) = ln x`.
    Rayleigh,
    /// `θ = (μ/σ², -1/(2σ²))`, `t(x) = (x, x²)`,
    /// `F(θ) = -θ₁²/(4θ₂) + ½ ln(-π/θ₂)`, `k(x) = 0`.
    Gaussian,
    Gamma { shape: T },
}

impl<T: Real> NaturalFamily<T> {
    pub fn dim(&self) -> usize {
        match self {
            Self::Gaussian => 2,
            _ => 1,
        }
    }

    pub fn in_domain(&self, theta: &[T]) -> bool {
        theta.len() == self.dim()
            && theta.iter().all(|t| t.is_finite())
            && match self {
                Self::Gaussian => theta[1] < T::zero(),
                _ => theta[0] < T::zero(),
            }
    }

    fn check(&self, theta: &[T]) -> Result<()> {
        if self.in_domain(theta) {
            Ok(())
        } else {
            Err(Error::NaturalDomain(format!("{self} at θ = {theta:?}")))
        }
    }

    /// Log-normalizer `F(θ)`.
    pub fn log_normalizer(&self, theta: &[T]) -> Result<T> {
        self.check(theta)?;
        Ok(match *self {
            Self::Exponential => -(-theta[0]).ln(),
            Self::Rayleigh => -(-(theta[0] + theta[0])).ln(),
            Self::Gaussian => {
                let (t1, t2) = (theta[0], theta[1]);
                -t1 * t1 / (T::of(4.0) * t2) + T::of(0.5) * (-T::PI() / t2).ln()
            }
            Self::Gamma { shape } => -shape * (-theta[0]).ln(),
        })
    }

    /// Gradient `∇F(θ)`, the expected sufficient statistic.
    pub fn grad_log_normalizer(&self, theta: &[T]) -> Result<Vec<T>> {
        self.check(theta)?;
        Ok(match *self {
            Self::Exponential | Self::Rayleigh => vec![-T::one() / theta[0]],
            Self::Gaussian => {
                let (t1, t2) = (theta[0], theta[1]);
                vec![
                    -t1 / (t2 + t2),
                    t1 * t1 / (T::of(4.0) * t2 * t2) - T::one() / (t2 + t2),
                ]
            }
            Self::Gamma { shape } => vec![-shape / theta[0]],
        })
    }

    pub fn sufficient_stat(&self, x: T) -> Vec<T> {
        match self {
            Self::Exponential | Self::Gamma { .. } => vec![x],
            Self::Rayleigh => vec![x * x],
            Self::Gaussian => vec![x, x * x],
        }
    }

    pub fn carrier(&self, x: T) -> T {
        match *self {
            Self::Exponential | Self::Gaussian => T::zero(),
            Self::Rayleigh => x.ln(),
            Self::Gamma { shape } => (shape - T::one()) * x.ln() - special::ln_gamma(shape),
        }
    }

    /// Inverse of the parameter map.
    pub fn params(&self, theta: &[T]) -> Result<ComponentParams<T>> {
        self.check(theta)?;
        Ok(match *self {
            Self::Exponential => ComponentParams::Exponential { rate: -theta[0] },
            Self::Rayleigh => ComponentParams::Rayleigh {
                scale: (-T::one() / (theta[0] + theta[0])).sqrt(),
            },
            Self::Gaussian => {
                let var = -T::one() / (theta[1] + theta[1]);
                ComponentParams::Gaussian {
                    mean: theta[0] * var,
                    stddev: var.sqrt(),
                }
            }
            Self::Gamma { shape } => ComponentParams::Gamma {
                shape,
                scale: -T::one() / theta[0],
            },
        })
    }

    /// Same family and, for gamma, the same fixed shape.
    pub fn same_as(&self, other: &Self) -> bool {
        self == other
    }
}

impl<T: Real> fmt::Display for NaturalFamily<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exponential => f.write_str("exponential"),
            Self::Rayleigh => f.write_str("rayleigh"),
            Self::Gaussian => f.write_str("gaussian"),
            Self::Gamma { shape } => write!(f, "gamma(shape={shape})"),
        }
    }
}

/// A component written as `exp(θᵀt(x) - F(θ) + k(x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalForm<T> {
    pub family: NaturalFamily<T>,
    pub theta: Vec<T>,
}

impl<T: Real> NaturalForm<T> {
    pub fn from_params(p: &ComponentParams<T>) -> Self {
        match *p {
            ComponentParams::Exponential { rate } => Self {
                family: NaturalFamily::Exponential,
                theta: vec![-rate],
            },
            ComponentParams::Rayleigh { scale } => Self {
                family: NaturalFamily::Rayleigh,
                theta: vec![-T::one() / (T::of(2.0) * scale * scale)],
            },
            ComponentParams::Gaussian { mean, stddev } => {
                let var = stddev * stddev;
                Self {
                    family: NaturalFamily::Gaussian,
                    theta: vec![mean / var, -T::one() / (T::of(2.0) * var)],
                }
            }
            ComponentParams::Gamma { shape, scale } => Self {
                family: NaturalFamily::Gamma { shape },
                theta: vec![-T::one() / scale],
            },
        }
    }

    pub fn log_normalizer(&self) -> T {
        self.family
            .log_normalizer(&self.theta)
            .expect("natural form built from valid parameters")
    }

    pub fn grad_log_normalizer(&self) -> Vec<T> {
        self.family
            .grad_log_normalizer(&self.theta)
            .expect("natural form built from valid parameters")
    }

    pub fn sufficient_stat(&self, x: T) -> Vec<T> {
        self.family.sufficient_stat(x)
    }

    pub fn carrier(&self, x: T) -> T {
        self.family.carrier(x)
    }

    /// `θᵀt(x) - F(θ) + k(x)`.
    pub fn log_density(&self, x: T) -> T {
        dot(&self.theta, &self.sufficient_stat(x)) - self.log_normalizer() + self.carrier(x)
    }

    pub fn params(&self) -> ComponentParams<T> {
        self.family
            .params(&self.theta)
            .expect("natural form built from valid parameters")
    }

    /// Truncated mass `m_D(θ) = ∫_a^b p(x; θ) dx`.
    pub fn truncated_mass(&self, a: T, b: T) -> T {
        self.params().interval_mass(a, b)
    }

    /// Truncated sufficient-statistic moment `∫_a^b t(x) p(x; θ) dx`.
    pub fn truncated_stat_moment(&self, a: T, b: T) -> Vec<T> {
        let p = self.params();
        match self.family {
            NaturalFamily::Exponential | NaturalFamily::Gamma { .. } => {
                vec![p.partial_first_moment(a, b)]
            }
            NaturalFamily::Rayleigh => vec![p.partial_second_moment(a, b)],
            NaturalFamily::Gaussian => {
                vec![p.partial_first_moment(a, b), p.partial_second_moment(a, b)]
            }
        }
    }

    /// `∇m_D(θ) = ∫_a^b (t(x) - ∇F(θ)) p(x; θ) dx`.
    pub fn grad_truncated_mass(&self, a: T, b: T) -> Vec<T> {
        let mass = self.truncated_mass(a, b);
        self.truncated_stat_moment(a, b)
            .into_iter()
            .zip(self.grad_log_normalizer())
            .map(|(m, g)| m - mass * g)
            .collect()
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}
