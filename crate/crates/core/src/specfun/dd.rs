//! Double-word ("double-double") arithmetic.
//!
//! A [`Dd`] carries an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! roughly doubling the working precision of the underlying scalar. It is
//! used where a formula subtracts two large, nearly equal quantities, most
//! notably the connection formula for the Whittaker W function.
//!
//! Algorithms follow the classical error-free transformations (Knuth's
//! two-sum, Dekker's split product) so no fused multiply-add is required.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;

use crate::real::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Dd<T> {
    pub hi: T,
    pub lo: T,
}

#[inline]
fn two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn split<T: Real>(a: T) -> (T, T) {
    let t = T::SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod<T: Real>(a: T, b: T) -> (T, T) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

impl<T: Real> Dd<T> {
    #[inline]
    pub fn new(hi: T, lo: T) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_t(x: T) -> Self {
        Dd { hi: x, lo: T::zero() }
    }

    pub fn zero() -> Self {
        Self::from_t(T::zero())
    }

    pub fn one() -> Self {
        Self::from_t(T::one())
    }

    pub fn pi() -> Self {
        Dd { hi: T::PI(), lo: T::PI_LO }
    }

    pub fn ln_2() -> Self {
        Dd { hi: T::LN_2(), lo: T::LN_2_LO }
    }

    /// Exact ratio of two scalars to double-word precision.
    pub fn ratio(num: T, den: T) -> Self {
        Self::from_t(num) / Self::from_t(den)
    }

    #[inline]
    pub fn to_t(self) -> T {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < T::zero() {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn mul_t(self, b: T) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sqr(self) -> Self {
        self * self
    }

    /// Multiplication by `2^k`, exact barring over/underflow.
    fn ldexp(self, k: i32) -> Self {
        let two = lit::<T>(2.0);
        // split the scaling so 2^k itself never overflows before the product does
        let half = k / 2;
        let s1 = two.powi(half);
        let s2 = two.powi(k - half);
        Dd {
            hi: self.hi * s1 * s2,
            lo: self.lo * s1 * s2,
        }
    }

    pub fn exp(self) -> Self {
        let max_ln = T::max_value().ln();
        if self.hi > max_ln {
            return Self::from_t(T::infinity());
        }
        if self.hi < -max_ln - lit(40.0) {
            return Self::zero();
        }
        let k = (self.hi / T::LN_2()).round();
        let r = self - Dd::ln_2().mul_t(k);
        // reduce by 2^10 then undo through expm1 doubling
        let r = r.mul_t(lit(1.0 / 1024.0));
        let tiny = T::epsilon() * T::epsilon() * lit(1e-3);
        let mut term = r;
        let mut sum = r;
        let mut i = 2.0;
        while term.hi.abs() > tiny {
            term = term * r;
            term = term / Dd::from_t(lit(i));
            sum = sum + term;
            i += 1.0;
        }
        for _ in 0..10 {
            sum = sum * (sum + Dd::from_t(lit(2.0)));
        }
        let e = sum + Dd::one();
        e.ldexp(k.to_i32().unwrap_or(0))
    }

    pub fn ln(self) -> Self {
        if self.hi <= T::zero() {
            return Self::from_t(T::nan());
        }
        let mut x = Self::from_t(self.hi.ln());
        for _ in 0..2 {
            x = x + self * (-x).exp() - Dd::one();
        }
        x
    }

    /// Simultaneous sine and cosine.
    pub fn sin_cos(self) -> (Self, Self) {
        let half_pi = Dd::pi().mul_t(lit(0.5));
        let k = (self.hi / half_pi.hi).round();
        let r = self - half_pi.mul_t(k);
        let r2 = r.sqr();
        let tiny = T::epsilon() * T::epsilon() * lit(1e-3);

        let mut term = r;
        let mut s = r;
        let mut i = 3.0;
        while term.hi.abs() > tiny {
            term = -(term * r2) / Dd::from_t(lit((i - 1.0) * i));
            s = s + term;
            i += 2.0;
        }
        let mut term: Dd<T> = Dd::one();
        let mut c = Dd::one();
        let mut i = 2.0;
        while term.hi.abs() > tiny {
            term = -(term * r2) / Dd::from_t(lit((i - 1.0) * i));
            c = c + term;
            i += 2.0;
        }
        let quadrant = k.to_i64().unwrap_or(0).rem_euclid(4);
        match quadrant {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl<T: Real> Add for Dd<T> {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl<T: Real> Neg for Dd<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl<T: Real> Sub for Dd<T> {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl<T: Real> Mul for Dd<T> {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl<T: Real> Div for Dd<T> {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_t(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_t(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_t(q3)
    }
}

/// Complex number with double-word components.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CDd<T> {
    pub re: Dd<T>,
    pub im: Dd<T>,
}

impl<T: Real> CDd<T> {
    pub fn new(re: Dd<T>, im: Dd<T>) -> Self {
        CDd { re, im }
    }

    pub fn from_complex(z: Complex<T>) -> Self {
        CDd {
            re: Dd::from_t(z.re),
            im: Dd::from_t(z.im),
        }
    }

    pub fn from_real(x: Dd<T>) -> Self {
        CDd { re: x, im: Dd::zero() }
    }

    pub fn to_complex(self) -> Complex<T> {
        Complex::new(self.re.to_t(), self.im.to_t())
    }

    pub fn zero() -> Self {
        CDd::from_real(Dd::zero())
    }

    pub fn one() -> Self {
        CDd::from_real(Dd::one())
    }

    pub fn conj(self) -> Self {
        CDd {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm_sqr(self) -> Dd<T> {
        self.re.sqr() + self.im.sqr()
    }

    /// Leading-order modulus; adequate for convergence tests.
    pub fn abs_approx(self) -> T {
        self.re.hi.hypot(self.im.hi)
    }

    pub fn scale(self, s: Dd<T>) -> Self {
        CDd {
            re: self.re * s,
            im: self.im * s,
        }
    }

    pub fn exp(self) -> Self {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        CDd { re: m * c, im: m * s }
    }

    /// Principal logarithm.
    pub fn ln(self) -> Self {
        let x = self.re;
        let y = self.im;
        let modulus = self.norm_sqr().ln().mul_t(lit(0.5));
        let theta0 = Dd::from_t(y.hi.atan2(x.hi));
        let (s, c) = theta0.sin_cos();
        let correction = (y * c - x * s) / (x * c + y * s);
        CDd {
            re: modulus,
            im: theta0 + correction,
        }
    }
}

impl<T: Real> Add for CDd<T> {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        CDd {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }
}

impl<T: Real> Sub for CDd<T> {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        CDd {
            re: self.re - b.re,
            im: self.im - b.im,
        }
    }
}

impl<T: Real> Neg for CDd<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        CDd {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl<T: Real> Mul for CDd<T> {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        CDd {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

impl<T: Real> Div for CDd<T> {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let d = b.norm_sqr();
        let n = self * b.conj();
        CDd {
            re: n.re / d,
            im: n.im / d,
        }
    }
}
