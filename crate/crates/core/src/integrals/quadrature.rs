//! Adaptive Gauss-Kronrod (7/15) quadrature with a global error budget.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// An integral estimate with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadratureValue<T> {
    pub value: T,
    pub error_bound: T,
}

impl<T: Real> QuadratureValue<T> {
    pub fn new(value: T, error_bound: T) -> Self {
        Self { value, error_bound }
    }

    /// A closed-form value.
    pub fn exact(value: T) -> Self {
        Self {
            value,
            error_bound: T::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::exact(T::zero())
    }

    pub fn scale(self, by: T) -> Self {
        Self {
            value: self.value * by,
            error_bound: self.error_bound * by.abs(),
        }
    }

    /// `[value - error_bound, value + error_bound]`.
    pub fn lower(&self) -> T {
        self.value - self.error_bound
    }

    pub fn upper(&self) -> T {
        self.value + self.error_bound
    }

    /// Turns a non-converged quadrature error into its best estimate, keeping
    /// the reported error as the bound. Other errors pass through.
    pub fn recover(r: Result<Self>) -> Result<Self> {
        match r {
            Err(Error::Quadrature { estimate, error, .. }) => {
                let value = T::of(estimate);
                let error_bound = T::of(error);
                if value.is_finite() && error_bound.is_finite() {
                    Ok(Self { value, error_bound })
                } else {
                    Ok(Self {
                        value: T::zero(),
                        error_bound: T::infinity(),
                    })
                }
            }
            other => other,
        }
    }
}

impl<T: Real> Add for QuadratureValue<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            value: self.value + rhs.value,
            error_bound: self.error_bound + rhs.error_bound,
        }
    }
}

impl<T: Real> Sub for QuadratureValue<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            value: self.value - rhs.value,
            error_bound: self.error_bound + rhs.error_bound,
        }
    }
}

impl<T: Real> Neg for QuadratureValue<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: -self.value,
            error_bound: self.error_bound,
        }
    }
}

impl<T: Real> std::iter::Sum for QuadratureValue<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Subinterval cap before the routine gives up.
pub const MAX_INTERVALS: usize = 2000;

/// Change of variables applied to one initial segment.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Map<T> {
    /// `x = t` on a finite segment.
    Identity,
    /// `x = a + s t/(1 - t)`, `t ∈ [0, 1)`.
    Right { a: T, s: T },
    /// `x = b - s t/(1 - t)`, `t ∈ [0, 1)`.
    Left { b: T, s: T },
}

impl<T: Real> Map<T> {
    #[inline]
    fn apply(&self, t: T) -> (T, T) {
        match *self {
            Map::Identity => (t, T::one()),
            Map::Right { a, s } => {
                let d = T::one() - t;
                (a + s * t / d, s / (d * d))
            }
            Map::Left { b, s } => {
                let d = T::one() - t;
                (b - s * t / d, s / (d * d))
            }
        }
    }
}

struct Piece<T> {
    map: usize,
    lo: T,
    hi: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Piece<T> {}
impl<T: Real> PartialOrd for Piece<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Piece<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // NaN errors sort as largest so they get split first
        match self.error.partial_cmp(&other.error) {
            Some(o) => o.then_with(|| other.lo.partial_cmp(&self.lo).unwrap_or(Ordering::Equal)),
            None => {
                if self.error.is_nan() {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }
}

/// One 15-point Kronrod evaluation with the QUADPACK error heuristic.
fn gk15<T: Real>(f: &impl Fn(T) -> T, map: &Map<T>, lo: T, hi: T) -> (T, T) {
    let center = T::of(0.5) * (lo + hi);
    let half = T::of(0.5) * (hi - lo);
    let eval = |t: T| {
        let (x, jac) = map.apply(t);
        if !x.is_finite() {
            return T::zero();
        }
        let v = f(x);
        if v == T::zero() {
            T::zero()
        } else {
            v * jac
        }
    };
    let fc = eval(center);
    let mut res_k = fc * T::of(WGK[7]);
    let mut res_g = fc * T::of(WG[3]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half * T::of(XGK[j]);
        let f1 = eval(center - dx);
        let f2 = eval(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + T::of(WGK[j]) * (f1 + f2);
        res_abs = res_abs + T::of(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::of(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * T::of(0.5);
    let mut res_asc = T::of(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + T::of(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::of(200.0) * err / res_asc).powf(T::of(1.5));
        err = res_asc * scale.min(T::one());
    }
    let fifty_eps = T::of(50.0) * T::epsilon();
    if res_abs > T::min_positive_value() / fifty_eps {
        err = err.max(fifty_eps * res_abs);
    }
    (result, err)
}

/// Adaptive integration over initial segments `(map, t_lo, t_hi)`, splitting
/// the piece with the largest error until the total error is within `tol`
/// (or within a few ulps of the result, whichever is larger).
pub(crate) fn integrate_segments<T: Real>(
    f: impl Fn(T) -> T,
    maps: &[Map<T>],
    segments: &[(usize, T, T)],
    tol: T,
    bounds: (T, T),
) -> Result<QuadratureValue<T>> {
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut total_err = T::zero();
    for &(map, lo, hi) in segments {
        if !(lo < hi) {
            continue;
        }
        let (value, error) = gk15(&f, &maps[map], lo, hi);
        total = total + value;
        total_err = total_err + error;
        heap.push(Piece {
            map,
            lo,
            hi,
            value,
            error,
        });
    }
    let floor = |v: T| T::of(100.0) * T::epsilon() * v.abs();
    let mut count = heap.len();
    while !(total_err <= tol.max(floor(total))) {
        if count >= MAX_INTERVALS {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = T::of(0.5) * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, &maps[worst.map], worst.lo, mid);
        let (v2, e2) = gk15(&f, &maps[worst.map], mid, worst.hi);
        total = total - worst.value + v1 + v2;
        total_err = total_err - worst.error + e1 + e2;
        heap.push(Piece {
            map: worst.map,
            lo: worst.lo,
            hi: mid,
            value: v1,
            error: e1,
        });
        heap.push(Piece {
            map: worst.map,
            lo: mid,
            hi: worst.hi,
            value: v2,
            error: e2,
        });
        count += 1;
    }
    // re-sum in a fixed order to shed the running-update drift
    let mut pieces = heap.into_vec();
    pieces.sort_by(|a, b| {
        (a.map, a.lo)
            .partial_cmp(&(b.map, b.lo))
            .unwrap_or(Ordering::Equal)
    });
    let value: T = pieces.iter().map(|p| p.value).sum();
    let error: T = pieces.iter().map(|p| p.error).sum();
    if error <= tol.max(floor(value)) && value.is_finite() {
        Ok(QuadratureValue::new(value, error))
    } else {
        Err(Error::Quadrature {
            a: bounds.0.f64(),
            b: bounds.1.f64(),
            estimate: value.f64(),
            error: error.f64(),
            intervals: pieces.len(),
        })
    }
}

/// `∫_a^b f` split at the given interior `breaks`; an infinite end is mapped
/// through `x = a + s t/(1 - t)` with length scale `s`.
pub(crate) fn integrate_with_breaks<T: Real>(
    f: impl Fn(T) -> T,
    a: T,
    b: T,
    breaks: &[T],
    scale: T,
    tol: T,
) -> Result<QuadratureValue<T>> {
    let mut knots: Vec<T> = breaks
        .iter()
        .copied()
        .filter(|&x| x > a && x < b && x.is_finite())
        .collect();
    knots.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    knots.dedup();
    let mut maps = vec![Map::Identity];
    let mut segs = Vec::new();
    let lo_fin = if a.is_finite() {
        a
    } else {
        let b0 = *knots.first().unwrap_or(&if b.is_finite() { b } else { T::zero() });
        maps.push(Map::Left { b: b0, s: scale });
        segs.push((maps.len() - 1, T::zero(), T::one()));
        b0
    };
    let hi_fin = if b.is_finite() {
        b
    } else {
        let a0 = *knots.last().unwrap_or(&lo_fin);
        maps.push(Map::Right { a: a0, s: scale });
        segs.push((maps.len() - 1, T::zero(), T::one()));
        a0
    };
    let mut pts = vec![lo_fin];
    pts.extend(knots.iter().copied().filter(|&x| x > lo_fin && x < hi_fin));
    pts.push(hi_fin);
    for w in pts.windows(2) {
        if w[0] < w[1] {
            segs.push((0, w[0], w[1]));
        }
    }
    integrate_segments(f, &maps, &segs, tol, (a, b))
}

/// Adaptive Gauss-Kronrod quadrature of `f` over `(a, b)` to absolute
/// tolerance `tol`. Infinite ends are accepted and mapped onto `[0, 1)`.
///
/// Fails with [`Error::Quadrature`], carrying the best estimate, when the
/// error budget is not met within [`MAX_INTERVALS`] subintervals.
pub fn adaptive_quadrature<T: Real>(
    f: impl Fn(T) -> T,
    a: T,
    b: T,
    tol: T,
) -> Result<QuadratureValue<T>> {
    if a.is_nan() || b.is_nan() || !(a < b) {
        return Err(Error::Argument(format!("quadrature needs a < b, got ({a}, {b})")));
    }
    if !(tol > T::zero()) {
        return Err(Error::Argument(format!("quadrature tolerance must be positive, got {tol}")));
    }
    let breaks = if a.is_infinite() && b.is_infinite() {
        vec![T::zero()]
    } else {
        Vec::new()
    };
    integrate_with_breaks(f, a, b, &breaks, T::one(), tol)
}
