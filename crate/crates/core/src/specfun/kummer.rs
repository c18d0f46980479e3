//! Kummer's confluent hypergeometric function `1F1(a; b; z)` for complex
//! parameters and real argument.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;

use super::dd::{CDd, Dd};
use super::{EvalDiagnostics, Route};
use crate::error::{Error, Result};
use crate::real::{lit, to_f64, Real};

pub(crate) const MAX_TERMS: usize = 100_000;

/// Arithmetic needed to sum a hypergeometric series, so one routine serves
/// both working precision and double-word precision.
pub(crate) trait SeriesScalar<T: Real>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn from_parts(re: T, im: T) -> Self;
    fn modulus(self) -> T;
    fn unit_roundoff() -> T;
}

impl<T: Real> SeriesScalar<T> for Complex<T> {
    fn from_parts(re: T, im: T) -> Self {
        Complex::new(re, im)
    }
    fn modulus(self) -> T {
        self.norm()
    }
    fn unit_roundoff() -> T {
        T::epsilon() * lit(0.5)
    }
}

impl<T: Real> SeriesScalar<T> for CDd<T> {
    fn from_parts(re: T, im: T) -> Self {
        CDd::new(Dd::from_t(re), Dd::from_t(im))
    }
    fn modulus(self) -> T {
        self.abs_approx()
    }
    fn unit_roundoff() -> T {
        T::epsilon() * T::epsilon() * lit(0.25)
    }
}

pub(crate) fn is_nonpositive_integer<T: Real>(b: Complex<T>) -> bool {
    let tol = lit::<T>(1e-14);
    b.im.abs() < tol && b.re < tol && (b.re - b.re.round()).abs() < tol
}

/// Sums `Σ (a)_k z^k / ((b)_k k!)` until the terms drop below the unit
/// roundoff of `S` relative to the partial sum while shrinking.
pub(crate) fn kummer_series<T: Real, S: SeriesScalar<T>>(a: S, b: S, z: S) -> Result<(S, EvalDiagnostics)> {
    let tol = S::unit_roundoff();
    let mut term = S::from_parts(T::one(), T::zero());
    let mut sum = term;
    let mut max_partial = T::one();
    for k in 0..MAX_TERMS {
        let kf = S::from_parts(lit(k as f64), T::zero());
        let k1 = S::from_parts(lit(k as f64 + 1.0), T::zero());
        let ratio = (a + kf) * z / ((b + kf) * k1);
        term = term * ratio;
        sum = sum + term;
        let s = sum.modulus();
        if s > max_partial {
            max_partial = s;
        }
        let t = term.modulus();
        if t == T::zero() || (t <= tol * s && ratio.modulus() < T::one()) {
            let est = if s > T::zero() {
                tol * max_partial / s
            } else {
                T::infinity()
            };
            return Ok((
                sum,
                EvalDiagnostics {
                    terms_used: k + 2,
                    est_rel_error: to_f64(est),
                    route: Route::Series,
                },
            ));
        }
    }
    Err(Error::NoConvergence {
        what: "Kummer 1F1 series",
        iterations: MAX_TERMS,
        best: to_f64(sum.modulus()),
        est_error: f64::INFINITY,
    })
}

/// Cancellation factor above which the series is summed again in
/// double-word arithmetic.
const CANCELLATION_RESUM: f64 = 1e3;

/// `1F1(a; b; z)` by direct summation.
///
/// `est_rel_error` grows with the ratio of the largest partial sum to the
/// final value, so cancellation (negative `z`, large negative `Re a`) is
/// visible. Past a modest cancellation the series is summed again in
/// double-word arithmetic and the better estimate is returned.
pub fn kummer_1f1<T: Real>(a: Complex<T>, b: Complex<T>, z: T) -> Result<(Complex<T>, EvalDiagnostics)> {
    if is_nonpositive_integer(b) {
        return Err(Error::Pole {
            re: to_f64(b.re),
            im: to_f64(b.im),
        });
    }
    let first = kummer_series(a, b, Complex::new(z, T::zero()))?;
    let roundoff = to_f64(<Complex<T> as SeriesScalar<T>>::unit_roundoff());
    if first.1.est_rel_error <= CANCELLATION_RESUM * roundoff {
        return Ok(first);
    }
    let (sum, mut d) = kummer_series(CDd::from_complex(a), CDd::from_complex(b), CDd::from_complex(Complex::new(z, T::zero())))?;
    d.est_rel_error = d.est_rel_error.max(roundoff);
    if d.est_rel_error < first.1.est_rel_error {
        Ok((sum.to_complex(), d))
    } else {
        Ok(first)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_parameters_give_exponential() {
        let a = Complex::new(0.7_f64, -1.1);
        for z in [0.1, 2.0, 15.0] {
            let (v, d) = kummer_1f1(a, a, z).unwrap();
            assert!((v - Complex::new(z.exp(), 0.0)).norm() < 1e-14 * z.exp());
            assert!(d.terms_used >= 1);
        }
    }

    #[test]
    fn zero_numerator_truncates() {
        let (v, _) = kummer_1f1(Complex::new(0.0_f64, 0.0), Complex::new(2.5, 1.0), 9.0).unwrap();
        assert_eq!(v, Complex::new(1.0, 0.0));
    }

    #[test]
    fn pole_in_denominator() {
        let r = kummer_1f1(Complex::new(0.5_f64, 0.0), Complex::new(-2.0, 0.0), 1.0);
        assert!(matches!(r, Err(Error::Pole { .. })));
    }

    #[test]
    fn cancellation_is_reported() {
        // 1F1(-30; 1; 20) is a Laguerre polynomial value with heavy cancellation
        let (a, b) = (Complex::new(-30.0_f64, 0.0), Complex::new(1.0, 0.0));
        let (_, d) = kummer_series(a, b, Complex::new(20.0, 0.0)).unwrap();
        assert!(d.est_rel_error > 1e-12, "{d:?}");
        let (v, d) = kummer_1f1(a, b, 20.0).unwrap();
        let l30 = crate::specfun::laguerre(30, 0.0, 20.0);
        assert!((v.re - l30).abs() < 1e-9 * l30.abs(), "{v} vs {l30}");
        assert!(d.est_rel_error < 1e-12, "{d:?}");
    }

    #[test]
    fn negative_argument_is_resummed() {
        let a = Complex::new(0.2_f64, 0.0);
        let (v, d) = kummer_1f1(a, a, -15.0).unwrap();
        assert!((v.re - (-15.0f64).exp()).abs() < 1e-14 * (-15.0f64).exp(), "{v}");
        assert!(d.est_rel_error < 1e-15);
    }
}
