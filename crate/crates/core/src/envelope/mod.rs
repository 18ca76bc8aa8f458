//! Weighted components, mixtures, and the upper/lower envelope partition of
//! the support into elementary intervals.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::families::{ComponentParams, FamilyTag, LogQuadratic, SupportInterval};
use crate::rng::UniformSource;
use crate::scalar::Real;


/// One component density with its mixing weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedComponent<T> {
    pub weight: T,
    pub params: ComponentParams<T>,
}

impl<T: Real> WeightedComponent<T> {
    /// The weight only has to be positive and finite, so scaled components
    /// such as `k·w p` are representable too.
    pub fn new(weight: T, params: ComponentParams<T>) -> Result<Self> {
        if !(weight.is_finite() && weight > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "weight",
                value: weight.f64(),
                reason: "must be finite and strictly positive",
            });
        }
        params.validate()?;
        Ok(Self { weight, params })
    }

    pub fn family(&self) -> FamilyTag {
        self.params.family()
    }

    /// `ln w + ln p(x)` without a support check.
    #[inline]
    pub fn ln_weighted(&self, x: T) -> T {
        self.weight.ln() + self.params.ln_pdf(x)
    }

    /// `ln w + ln p(x)` as a log-quadratic form.
    pub fn log_quadratic(&self) -> LogQuadratic<T> {
        self.params.log_quadratic().shift(self.weight.ln())
    }

    /// Same component with its weight multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            weight: self.weight * factor,
            params: self.params,
        }
    }
}

/// A finite mixture of same-family weighted components.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture<T> {
    family: FamilyTag,
    components: Vec<WeightedComponent<T>>,
    support: SupportInterval<T>,
}

impl<T: Real> Mixture<T> {
    /// Validates the components and renormalizes the weights.
    ///
    /// Weights must sum to one within [`Real::weight_sum_tol`]. Gamma
    /// components may carry different shapes.
    pub fn new(components: Vec<WeightedComponent<T>>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::Argument("a mixture needs at least one component".into()))?;
        let family = first.family();
        for c in &components {
            c.params.validate()?;
            if !(c.weight.is_finite() && c.weight > T::zero()) {
                return Err(Error::InvalidParameter {
                    name: "weight",
                    value: c.weight.f64(),
                    reason: "must be finite and strictly positive",
                });
            }
            if c.family() != family {
                return Err(Error::FamilyMismatch(
                    family.to_string(),
                    c.family().to_string(),
                ));
            }
        }
        let sum: T = components.iter().map(|c| c.weight).sum();
        if (sum - T::one()).abs() > T::weight_sum_tol() {
            return Err(Error::WeightSum { sum: sum.f64() });
        }
        let components = components
            .into_iter()
            .map(|c| WeightedComponent {
                weight: c.weight / sum,
                params: c.params,
            })
            .collect();
        Ok(Self {
            family,
            components,
            support: family.support(),
        })
    }

    /// Builds a mixture from `(weight, params)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (T, ComponentParams<T>)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(weight, params)| WeightedComponent { weight, params })
                .collect(),
        )
    }

    /// A single-component mixture.
    pub fn single(params: ComponentParams<T>) -> Result<Self> {
        Self::new(vec![WeightedComponent::new(T::one(), params)?])
    }

    pub fn family(&self) -> FamilyTag {
        self.family
    }

    pub fn support(&self) -> SupportInterval<T> {
        self.support
    }

    pub fn components(&self) -> &[WeightedComponent<T>] {
        &self.components
    }

    /// Number of components `k`.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `ln m(x)` by log-sum-exp; a domain error outside the support.
    pub fn log_density(&self, x: T) -> Result<T> {
        self.support.check(x)?;
        Ok(self.ln_density(x))
    }

    /// `ln m(x)` without the support check.
    pub fn ln_density(&self, x: T) -> T {
        log_sum_exp(self.components.iter().map(|c| c.ln_weighted(x)))
    }

    pub fn density(&self, x: T) -> Result<T> {
        self.log_density(x).map(T::exp)
    }

    pub fn cdf(&self, x: T) -> T {
        self.components
            .iter()
            .map(|c| c.weight * c.params.cdf(x))
            .sum()
    }

    pub fn interval_mass(&self, a: T, b: T) -> T {
        self.components
            .iter()
            .map(|c| c.weight * c.params.interval_mass(a, b))
            .sum()
    }

    pub fn mean(&self) -> T {
        self.components
            .iter()
            .map(|c| c.weight * c.params.mean())
            .sum()
    }

    /// Law of total variance.
    pub fn variance(&self) -> T {
        let mean = self.mean();
        self.components
            .iter()
            .map(|c| {
                let d = c.params.mean() - mean;
                c.weight * (c.params.variance() + d * d)
            })
            .sum()
    }

    /// Picks a component by its weight, then draws from it.
    pub fn sample<R: UniformSource + ?Sized>(&self, rng: &mut R) -> T {
        let idx = self.pick(rng.next_open01());
        self.components[idx].params.sample(rng)
    }

    pub(crate) fn pick(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, c) in self.components.iter().enumerate() {
            acc += c.weight.f64();
            if u < acc {
                return i;
            }
        }
        self.components.len() - 1
    }

    /// The mixture `½(self + other)` with `k + k'` components and halved
    /// weights, components sorted into a canonical order so that the result
    /// does not depend on argument order.
    pub fn average(&self, other: &Self) -> Result<Self> {
        if self.family != other.family {
            return Err(Error::FamilyMismatch(
                self.family.to_string(),
                other.family.to_string(),
            ));
        }
        let half = T::of(0.5);
        let mut comps: Vec<_> = self
            .components
            .iter()
            .chain(&other.components)
            .map(|c| c.scaled(half))
            .collect();
        comps.sort_by(canonical_order);
        Self::new(comps)
    }
}

fn canonical_order<T: Real>(a: &WeightedComponent<T>, b: &WeightedComponent<T>) -> Ordering {
    let key = |c: &WeightedComponent<T>| -> [f64; 3] {
        match c.params {
            ComponentParams::Exponential { rate } => [rate.f64(), 0.0, c.weight.f64()],
            ComponentParams::Rayleigh { scale } => [scale.f64(), 0.0, c.weight.f64()],
            ComponentParams::Gaussian { mean, stddev } => [mean.f64(), stddev.f64(), c.weight.f64()],
            ComponentParams::Gamma { shape, scale } => [shape.f64(), scale.f64(), c.weight.f64()],
        }
    };
    let (ka, kb) = (key(a), key(b));
    ka.iter()
        .zip(&kb)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// `ln Σ exp(xᵢ)`, stable for any finite or `-∞` inputs.
pub fn log_sum_exp<T: Real>(xs: impl Iterator<Item = T> + Clone) -> T {
    let max = xs.clone().fold(T::neg_infinity(), T::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.map(|x| (x - max).exp()).sum::<T>().ln()
}

/// Which envelope a partition tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvelopeMode {
    /// Pointwise maximum of the weighted densities.
    Upper,
    /// Pointwise minimum.
    Lower,
}

/// Breakpoints `a₁ < … < a_{m+1}` of the support with the index of the
/// dominating (or minimizing) component on each interval.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopePartition<T> {
    pub breakpoints: Vec<T>,
    pub piece_index: Vec<usize>,
    pub mode: EnvelopeMode,
}

impl<T: Real> EnvelopePartition<T> {
    pub fn len(&self) -> usize {
        self.piece_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.piece_index.is_empty()
    }

    /// `(a_r, a_{r+1}, δ(r))` for each interval.
    pub fn intervals(&self) -> impl Iterator<Item = (T, T, usize)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.piece_index)
            .map(|(w, &i)| (w[0], w[1], i))
    }

    /// Index of the interval containing `x`; breakpoints go to the right.
    pub fn locate(&self, x: T) -> usize {
        let inner = &self.breakpoints[1..self.breakpoints.len() - 1];
        inner.partition_point(|&b| b <= x)
    }

    /// Component index of the envelope at `x`.
    pub fn piece_at(&self, x: T) -> usize {
        self.piece_index[self.locate(x)]
    }
}

/// An elementary interval of an overlay, with the piece index of every
/// overlaid partition.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlayInterval<T> {
    pub lo: T,
    pub hi: T,
    pub pieces: Vec<usize>,
}

/// Points strictly inside the support where `w₁p₁ = w₂p₂`, sorted.
///
/// Identical weighted components yield no roots.
pub fn pairwise_intersections<T: Real>(
    c1: &WeightedComponent<T>,
    c2: &WeightedComponent<T>,
    support: SupportInterval<T>,
) -> Vec<T> {
    if c1 == c2 {
        return Vec::new();
    }
    let diff = c1.log_quadratic() - c2.log_quadratic();
    let g = |x: T| c1.ln_weighted(x) - c2.ln_weighted(x);
    let mut roots: Vec<T> = diff
        .roots(support.lo, support.hi)
        .into_iter()
        .map(|x| polish(x, &g, &diff))
        .filter(|&x| support.contains_open(x))
        .collect();
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.dedup();
    roots
}

/// Newton steps on the directly evaluated log-density difference, which is
/// better conditioned than the expanded coefficients far from the origin.
fn polish<T: Real>(mut x: T, g: &impl Fn(T) -> T, form: &LogQuadratic<T>) -> T {
    let mut gx = g(x);
    for _ in 0..8 {
        let d = form.derivative(x);
        if gx == T::zero() || d == T::zero() || !d.is_finite() {
            break;
        }
        let next = x - gx / d;
        let gn = g(next);
        if !(gn.abs() < gx.abs()) {
            break;
        }
        x = next;
        gx = gn;
    }
    x
}

/// Representative interior point of `(a, b)`.
fn probe<T: Real>(a: T, b: T) -> T {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => a + (b - a) * T::of(0.5),
        (true, false) => a + a.abs().max(T::one()),
        (false, true) => b - b.abs().max(T::one()),
        (false, false) => T::zero(),
    }
}

fn pick_extreme<T: Real>(components: &[WeightedComponent<T>], x: T, mode: EnvelopeMode) -> usize {
    let mut best = 0;
    let mut best_val = components[0].ln_weighted(x);
    for (j, c) in components.iter().enumerate().skip(1) {
        let v = c.ln_weighted(x);
        let better = match mode {
            EnvelopeMode::Upper => v > best_val,
            EnvelopeMode::Lower => v < best_val,
        };
        if better {
            best = j;
            best_val = v;
        }
    }
    best
}

/// Sorts and merges near-duplicate candidate breakpoints.
fn dedup_points<T: Real>(pts: &mut Vec<T>) {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    let tol = T::of(1e-12);
    pts.dedup_by(|b, a| (*b - *a).abs() <= tol * (T::one() + a.abs()));
}

/// Upper or lower envelope partition of `support` for the given components.
///
/// All pairwise roots are collected, and each candidate interval is assigned
/// the extreme component at an interior probe point; ties go to the lower
/// index and equal neighbours are merged.
pub fn build_partition<T: Real>(
    components: &[WeightedComponent<T>],
    support: SupportInterval<T>,
    mode: EnvelopeMode,
) -> Result<EnvelopePartition<T>> {
    if components.is_empty() {
        return Err(Error::Argument("envelope of an empty component list".into()));
    }
    let family = components[0].family();
    if let Some(c) = components.iter().find(|c| c.family() != family) {
        return Err(Error::FamilyMismatch(
            family.to_string(),
            c.family().to_string(),
        ));
    }
    let mut cuts = Vec::new();
    for (i, a) in components.iter().enumerate() {
        for b in &components[i + 1..] {
            cuts.extend(pairwise_intersections(a, b, support));
        }
    }
    dedup_points(&mut cuts);

    let mut knots = Vec::with_capacity(cuts.len() + 2);
    knots.push(support.lo);
    knots.extend(cuts.into_iter().filter(|&x| support.contains_open(x)));
    knots.push(support.hi);

    let mut breakpoints = vec![support.lo];
    let mut piece_index: Vec<usize> = Vec::new();
    for w in knots.windows(2) {
        let idx = pick_extreme(components, probe(w[0], w[1]), mode);
        if piece_index.last() == Some(&idx) {
            *breakpoints.last_mut().expect("non-empty") = w[1];
        } else {
            breakpoints.push(w[1]);
            piece_index.push(idx);
        }
    }
    Ok(EnvelopePartition {
        breakpoints,
        piece_index,
        mode,
    })
}

/// Envelope of a mixture's weighted components over its support.
pub fn mixture_partition<T: Real>(m: &Mixture<T>, mode: EnvelopeMode) -> EnvelopePartition<T> {
    build_partition(m.components(), m.support(), mode).expect("mixture is non-empty and single-family")
}

/// Overlays two partitions of the same support.
pub fn overlay<T: Real>(
    p1: &EnvelopePartition<T>,
    p2: &EnvelopePartition<T>,
) -> Result<Vec<OverlayInterval<T>>> {
    overlay_all(&[p1, p2])
}

/// Overlays any number of partitions: the breakpoint set is the sorted union,
/// and each elementary interval carries one piece index per partition.
pub fn overlay_all<T: Real>(parts: &[&EnvelopePartition<T>]) -> Result<Vec<OverlayInterval<T>>> {
    let first = parts
        .first()
        .ok_or_else(|| Error::Argument("overlay of no partitions".into()))?;
    let lo = first.breakpoints[0];
    let hi = *first.breakpoints.last().expect("non-empty");
    for p in parts {
        if p.breakpoints[0] != lo || *p.breakpoints.last().expect("non-empty") != hi {
            return Err(Error::Argument("overlaid partitions cover different supports".into()));
        }
    }
    let mut pts: Vec<T> = parts
        .iter()
        .flat_map(|p| p.breakpoints.iter().copied())
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("comparable breakpoints"));
    pts.dedup();
    Ok(pts
        .windows(2)
        .map(|w| {
            let x = probe(w[0], w[1]);
            OverlayInterval {
                lo: w[0],
                hi: w[1],
                pieces: parts.iter().map(|p| p.piece_at(x)).collect(),
            }
        })
        .collect())
}
