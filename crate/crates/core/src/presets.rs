//! Built-in benchmark mixtures.
//!
//! The four KL pairs use exponential, Rayleigh, Gaussian and gamma mixtures;
//! the entropy set covers separated, symmetric, merged and near-Dirac GMMs.

use crate::envelope::Mixture;
use crate::families::ComponentParams;
use crate::scalar::Real;

fn third<T: Real>() -> T {
    T::one() / T::of(3.0)
}

fn build<T: Real>(pairs: Vec<(T, ComponentParams<T>)>) -> Mixture<T> {
    Mixture::from_pairs(pairs).expect("preset mixtures are valid")
}

fn exponential<T: Real>(parts: &[(f64, T)]) -> Mixture<T> {
    build(
        parts.iter()
            .map(|&(rate, w)| (w, ComponentParams::Exponential { rate: T::of(rate) }))
            .collect(),
    )
}

fn rayleigh<T: Real>(parts: &[(f64, T)]) -> Mixture<T> {
    build(
        parts.iter()
            .map(|&(scale, w)| (w, ComponentParams::Rayleigh { scale: T::of(scale) }))
            .collect(),
    )
}

/// `(mean, stddev, weight)` triples.
pub fn gaussian_mixture<T: Real>(parts: &[(f64, f64, f64)]) -> Mixture<T> {
    build(
        parts.iter()
            .map(|&(mean, stddev, w)| {
                (
                    T::of(w),
                    ComponentParams::Gaussian {
                        mean: T::of(mean),
                        stddev: T::of(stddev),
                    },
                )
            })
            .collect(),
    )
}

fn gamma<T: Real>(shape: f64, scales: &[f64]) -> Mixture<T> {
    build(
        scales
            .iter()
            .map(|&scale| {
                (
                    third(),
                    ComponentParams::Gamma {
                        shape: T::of(shape),
                        scale: T::of(scale),
                    },
                )
            })
            .collect(),
    )
}

pub fn emm1<T: Real>() -> Mixture<T> {
    exponential(&[(0.1, third()), (0.5, third()), (1.0, third())])
}

pub fn emm2<T: Real>() -> Mixture<T> {
    exponential(&[(2.0, T::of(0.2)), (10.0, T::of(0.4)), (20.0, T::of(0.4))])
}

pub fn rmm1<T: Real>() -> Mixture<T> {
    rayleigh(&[(0.5, third()), (2.0, third()), (10.0, third())])
}

pub fn rmm2<T: Real>() -> Mixture<T> {
    rayleigh(&[(5.0, T::of(0.25)), (60.0, T::of(0.25)), (100.0, T::of(0.5))])
}

pub fn gmm1<T: Real>() -> Mixture<T> {
    gaussian_mixture(&[
        (-5.0, 1.0, 0.05),
        (-2.0, 0.5, 0.1),
        (5.0, 0.3, 0.2),
        (10.0, 0.5, 0.2),
        (15.0, 0.4, 0.05),
        (25.0, 0.5, 0.3),
        (30.0, 2.0, 0.1),
    ])
}

pub fn gmm2<T: Real>() -> Mixture<T> {
    gaussian_mixture(&[
        (-16.0, 0.5, 0.1),
        (-12.0, 0.2, 0.1),
        (-8.0, 0.5, 0.1),
        (-4.0, 0.2, 0.1),
        (0.0, 0.5, 0.2),
        (4.0, 0.2, 0.1),
        (8.0, 0.5, 0.1),
        (12.0, 0.2, 0.1),
        (16.0, 0.5, 0.1),
    ])
}

pub fn gamm1<T: Real>() -> Mixture<T> {
    gamma(2.0, &[0.5, 2.0, 4.0])
}

pub fn gamm2<T: Real>() -> Mixture<T> {
    gamma(4.0, &[5.0, 8.0, 10.0])
}

/// The four KL benchmark pairs, named `EMM`, `RMM`, `GMM`, `GaMM`.
pub fn kl_pairs<T: Real>() -> Vec<(&'static str, Mixture<T>, Mixture<T>)> {
    vec![
        ("EMM", emm1(), emm2()),
        ("RMM", rmm1(), rmm2()),
        ("GMM", gmm1(), gmm2()),
        ("GaMM", gamm1(), gamm2()),
    ]
}

/// Equal-weight unit-variance components with nearly coincident means.
pub fn merged_gmm<T: Real>() -> Mixture<T> {
    gaussian_mixture(&[
        (-0.5, 1.0, 0.2),
        (-0.25, 1.0, 0.2),
        (0.0, 1.0, 0.2),
        (0.25, 1.0, 0.2),
        (0.5, 1.0, 0.2),
    ])
}

/// Two very narrow components at `±1`.
pub fn near_dirac_gmm<T: Real>() -> Mixture<T> {
    gaussian_mixture(&[(-1.0, 1e-3, 0.5), (1.0, 1e-3, 0.5)])
}

/// The six entropy benchmark mixtures.
pub fn entropy_mixtures<T: Real>() -> Vec<(&'static str, Mixture<T>)> {
    vec![
        ("GMM1", gmm1()),
        ("GMM2", gmm2()),
        ("symmetric", gaussian_mixture(&[(-1.0, 1.0, 0.5), (1.0, 1.0, 0.5)])),
        (
            "unequal",
            gaussian_mixture(&[(-3.0, 0.7, 0.6), (0.5, 1.5, 0.3), (4.0, 0.4, 0.1)]),
        ),
        ("merged", merged_gmm()),
        ("near-dirac", near_dirac_gmm()),
    ]
}
