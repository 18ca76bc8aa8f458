use crate::scalar::Real;

/// A function of the form `c0 + c1 x + c2 x² + c_log ln x`.
///
/// Every weighted log-density of the four families has this shape, and so
/// does the difference of any two of them. Pairwise intersections and the
/// extrema of density ratios reduce to roots of this form or of its
/// derivative `c1 + 2 c2 x + c_log / x`, which are quadratic after clearing
/// the denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogQuadratic<T> {
    pub c0: T,
    pub c1: T,
    pub c2: T,
    pub c_log: T,
}

impl<T: Real> std::ops::Sub for LogQuadratic<T> {
    type Output = Self;

    fn sub(self, other: Self) -> Self {
        Self {
            c0: self.c0 - other.c0,
            c1: self.c1 - other.c1,
            c2: self.c2 - other.c2,
            c_log: self.c_log - other.c_log,
        }
    }
}

impl<T: Real> LogQuadratic<T> {
    pub fn new(c0: T, c1: T, c2: T, c_log: T) -> Self {
        Self { c0, c1, c2, c_log }
    }

    pub fn shift(self, by: T) -> Self {
        Self {
            c0: self.c0 + by,
            ..self
        }
    }

    pub fn has_log(&self) -> bool {
        self.c_log != T::zero()
    }

    /// Value at `x`, with limits at `±∞` and at `0` when the log term is present.
    pub fn eval(&self, x: T) -> T {
        if x.is_infinite() {
            return self.limit_at_infinity(x > T::zero());
        }
        let poly = self.c0 + x * (self.c1 + x * self.c2);
        if self.has_log() {
            if x == T::zero() {
                // ln x → -∞ dominates the polynomial
                return if self.c_log > T::zero() {
                    T::neg_infinity()
                } else {
                    T::infinity()
                };
            }
            poly + self.c_log * x.ln()
        } else {
            poly
        }
    }

    fn limit_at_infinity(&self, positive: bool) -> T {
        let inf = |sign: bool| if sign { T::infinity() } else { T::neg_infinity() };
        if self.c2 != T::zero() {
            return inf(self.c2 > T::zero());
        }
        if self.c1 != T::zero() {
            return inf((self.c1 > T::zero()) == positive);
        }
        if self.has_log() {
            return inf(self.c_log > T::zero());
        }
        self.c0
    }

    pub fn derivative(&self, x: T) -> T {
        let lin = self.c1 + (self.c2 + self.c2) * x;
        if self.has_log() {
            lin + self.c_log / x
        } else {
            lin
        }
    }

    /// Stationary points strictly inside `(lo, hi)`, sorted.
    pub fn critical_points(&self, lo: T, hi: T) -> Vec<T> {
        // x·f'(x) = 2 c2 x² + c1 x + c_log (log case); f'(x) = 2 c2 x + c1 otherwise
        let mut pts = if self.has_log() {
            solve_quadratic(self.c2 + self.c2, self.c1, self.c_log)
                .into_iter()
                .filter(|&x| x > T::zero())
                .collect()
        } else if self.c2 != T::zero() {
            vec![-self.c1 / (self.c2 + self.c2)]
        } else {
            Vec::new()
        };
        pts.retain(|&x| x > lo && x < hi && x.is_finite());
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        pts.dedup();
        pts
    }

    /// Sign-changing roots strictly inside `(lo, hi)`, sorted.
    ///
    /// Without the log term the roots come from the stable quadratic formula
    /// and a Newton polish. With it, the stationary points split the domain
    /// into monotone pieces, each bracketed and bisected.
    pub fn roots(&self, lo: T, hi: T) -> Vec<T> {
        let mut out = Vec::new();
        if !self.has_log() {
            let cands = if self.c2 == T::zero() {
                if self.c1 == T::zero() {
                    Vec::new()
                } else {
                    vec![-self.c0 / self.c1]
                }
            } else {
                let disc = self.c1 * self.c1 - T::of(4.0) * self.c2 * self.c0;
                if disc > T::zero() {
                    solve_quadratic(self.c2, self.c1, self.c0)
                } else {
                    Vec::new()
                }
            };
            for x in cands {
                let x = self.newton_polish(x);
                if x > lo && x < hi && x.is_finite() {
                    out.push(x);
                }
            }
        } else {
            let lo = lo.max(T::zero());
            let mut knots = vec![lo];
            knots.extend(self.critical_points(lo, hi));
            knots.push(hi);
            for w in knots.windows(2) {
                if let Some(r) = self.bracketed_root(w[0], w[1]) {
                    if r > lo && r < hi {
                        out.push(r);
                    }
                }
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        out.dedup();
        out
    }

    fn newton_polish(&self, mut x: T) -> T {
        for _ in 0..4 {
            let d = self.derivative(x);
            if d == T::zero() || !d.is_finite() {
                break;
            }
            let next = x - self.eval(x) / d;
            if !next.is_finite() || (next - x).abs() >= T::one().max(x.abs()) {
                break;
            }
            if self.eval(next).abs() > self.eval(x).abs() {
                break;
            }
            x = next;
        }
        x
    }

    /// Root of a monotone piece `[a, b]`, if the sign changes strictly.
    fn bracketed_root(&self, a: T, b: T) -> Option<T> {
        let fa = self.eval(a);
        let fb = self.eval(b);
        if fa.is_nan() || fb.is_nan() || fa == T::zero() || fb == T::zero() {
            return None;
        }
        if (fa > T::zero()) == (fb > T::zero()) {
            return None;
        }
        let (mut lo, mut hi) = (a, b);
        // finite brackets for infinite ends or the log singularity at 0
        if hi.is_infinite() {
            let mut x = lo.abs().max(T::one()) + T::one();
            while (self.eval(x) > T::zero()) == (fa > T::zero()) {
                lo = x;
                x = x * T::of(2.0);
                if x.is_infinite() {
                    return None;
                }
            }
            hi = x;
        }
        if lo == T::zero() {
            let mut x = hi.min(T::one()) * T::of(0.5);
            while (self.eval(x) > T::zero()) != (fa > T::zero()) {
                hi = x;
                x = x * T::of(0.5);
                if x == T::zero() {
                    return None;
                }
            }
            lo = x;
        }
        let neg_at_lo = self.eval(lo) < T::zero();
        for _ in 0..400 {
            let mid = lo + (hi - lo) * T::of(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = self.eval(mid);
            if fm == T::zero() {
                return Some(mid);
            }
            if (fm < T::zero()) == neg_at_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(if self.eval(lo).abs() <= self.eval(hi).abs() {
            lo
        } else {
            hi
        })
    }
}

/// Real roots of `a x² + b x + c` by the cancellation-free formula.
fn solve_quadratic<T: Real>(a: T, b: T, c: T) -> Vec<T> {
    if a == T::zero() {
        return if b == T::zero() { Vec::new() } else { vec![-c / b] };
    }
    let disc = b * b - T::of(4.0) * a * c;
    if disc < T::zero() {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let q = -T::of(0.5) * (b + if b >= T::zero() { sq } else { -sq });
    let mut r = Vec::with_capacity(2);
    r.push(q / a);
    if q != T::zero() {
        r.push(c / q);
    }
    r.retain(|x| x.is_finite());
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots_are_sorted_and_inside() {
        // (x - 1)(x - 3) = x² - 4x + 3
        let q = LogQuadratic::new(3.0f64, -4.0, 1.0, 0.0);
        assert_eq!(q.roots(f64::NEG_INFINITY, f64::INFINITY), vec![1.0, 3.0]);
        assert_eq!(q.roots(2.0, 10.0), vec![3.0]);
        assert!(q.roots(3.0, 10.0).is_empty());
    }

    #[test]
    fn tangent_and_constant_have_no_roots() {
        let q = LogQuadratic::new(1.0f64, -2.0, 1.0, 0.0);
        assert!(q.roots(-10.0, 10.0).is_empty());
        let c = LogQuadratic::new(1.0f64, 0.0, 0.0, 0.0);
        assert!(c.roots(-10.0, 10.0).is_empty());
    }

    #[test]
    fn log_linear_roots_by_bracketing() {
        // ln x - x + 2 has roots near 0.1586 and 3.1462
        let q = LogQuadratic::new(2.0f64, -1.0, 0.0, 1.0);
        let r = q.roots(0.0, f64::INFINITY);
        assert_eq!(r.len(), 2);
        for x in r {
            assert!(q.eval(x).abs() < 1e-12, "residual at {x}");
        }
        assert_eq!(q.critical_points(0.0, f64::INFINITY), vec![1.0]);
    }

    #[test]
    fn limits() {
        let q = LogQuadratic::new(0.0f64, 1.0, 0.0, 0.0);
        assert_eq!(q.eval(f64::INFINITY), f64::INFINITY);
        assert_eq!(q.eval(f64::NEG_INFINITY), f64::NEG_INFINITY);
        let g = LogQuadratic::new(0.0f64, 0.0, -1.0, 0.0);
        assert_eq!(g.eval(f64::NEG_INFINITY), f64::NEG_INFINITY);
        let l = LogQuadratic::new(0.0f64, 0.0, 0.0, 2.0);
        assert_eq!(l.eval(0.0), f64::NEG_INFINITY);
    }
}
