//! Functions sampled on a grid, with natural cubic spline interpolation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::{lit, Real};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tabulated<T> {
    xs: Vec<T>,
    values: Vec<T>,
    #[serde(skip)]
    second: Vec<T>,
}

impl<T: Real> Tabulated<T> {
    pub fn new(xs: Vec<T>, values: Vec<T>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::invalid("values", "length differs from the grid"));
        }
        if xs.len() < 2 {
            return Err(Error::invalid("xs", "need at least two grid points"));
        }
        if xs.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::invalid("samples", "must be finite"));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("xs", "must be strictly increasing"));
        }
        let second = spline_second_derivatives(&xs, &values);
        Ok(Tabulated { xs, values, second })
    }

    /// Samples `f` on `xs`.
    pub fn from_fn<F: Fn(T) -> T>(xs: Vec<T>, f: F) -> Result<Self> {
        let values = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, values)
    }

    /// Uniform grid of `n` points on `[a, b]`.
    pub fn uniform_grid(a: T, b: T, n: usize) -> Vec<T> {
        let step = (b - a) / lit((n.max(2) - 1) as f64);
        (0..n.max(2)).map(|i| a + step * lit(i as f64)).collect()
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn span(&self) -> (T, T) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Spline value; zero outside the grid.
    pub fn eval(&self, x: T) -> T {
        let (lo, hi) = self.span();
        if x < lo || x > hi {
            return T::zero();
        }
        let i = match self.xs.partition_point(|&g| g <= x) {
            0 => 0,
            k if k >= self.xs.len() => self.xs.len() - 2,
            k => k - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        let six = lit::<T>(6.0);
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h / six
    }

    /// Relative L² distance to `reference` on `[lo, hi]`, by the trapezoid
    /// rule on this grid.
    pub fn relative_l2_error<F: Fn(T) -> T>(&self, reference: F, lo: T, hi: T) -> T {
        let mut num = T::zero();
        let mut den = T::zero();
        for w in self.xs.windows(2).zip(self.values.windows(2)) {
            let ((x0, x1), (v0, v1)) = ((w.0[0], w.0[1]), (w.1[0], w.1[1]));
            if x0 < lo || x1 > hi {
                continue;
            }
            let (r0, r1) = (reference(x0), reference(x1));
            let h = (x1 - x0) * lit(0.5);
            num = num + h * ((v0 - r0).powi(2) + (v1 - r1).powi(2));
            den = den + h * (r0 * r0 + r1 * r1);
        }
        (num / den).sqrt()
    }
}

fn spline_second_derivatives<T: Real>(xs: &[T], ys: &[T]) -> Vec<T> {
    let n = xs.len();
    let mut y2 = vec![T::zero(); n];
    let mut u = vec![T::zero(); n];
    let two = lit::<T>(2.0);
    let six = lit::<T>(6.0);
    for i in 1..n - 1 {
        let sig = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
        let p = sig * y2[i - 1] + two;
        y2[i] = (sig - T::one()) / p;
        let d = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) - (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
        u[i] = (six * d / (xs[i + 1] - xs[i - 1]) - sig * u[i - 1]) / p;
    }
    y2[n - 1] = T::zero();
    for k in (0..n - 1).rev() {
        y2[k] = y2[k] * y2[k + 1] + u[k];
    }
    y2
}
