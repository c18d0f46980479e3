//! Gauss-Legendre quadrature: globally adaptive integration on finite
//! intervals and panel chaining on half-lines with an explicit tail cut.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::{lit, to_f64, Real};

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    fn compute(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = nf * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }
}

/// Cached rule, computed once per node count.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("node cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(GaussLegendre::compute(n)))
        .clone()
}

/// Upper bound on `∫_x^∞ |g|`, used to cut a half-line integral.
pub type TailBound<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
pub struct QuadratureSpec<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_panels: usize,
    pub nodes_per_panel: usize,
    /// Width of the chained panels on a half-line.
    pub panel_width: T,
    pub truncation_envelope: Option<TailBound<T>>,
}

impl<T: fmt::Debug> fmt::Debug for QuadratureSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadratureSpec")
            .field("rel_tol", &self.rel_tol)
            .field("abs_tol", &self.abs_tol)
            .field("max_panels", &self.max_panels)
            .field("nodes_per_panel", &self.nodes_per_panel)
            .field("panel_width", &self.panel_width)
            .field("truncation_envelope", &self.truncation_envelope.is_some())
            .finish()
    }
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: lit(1e-12),
            abs_tol: lit(1e-14),
            max_panels: 2000,
            nodes_per_panel: 32,
            panel_width: lit(0.5),
            truncation_envelope: None,
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn with_tolerances(mut self, rel_tol: T, abs_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_nodes(mut self, nodes_per_panel: usize) -> Self {
        self.nodes_per_panel = nodes_per_panel;
        self
    }

    pub fn with_envelope(mut self, envelope: TailBound<T>) -> Self {
        self.truncation_envelope = Some(envelope);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero()) {
            return Err(Error::invalid("rel_tol", "must be positive"));
        }
        if !(self.abs_tol > T::zero()) {
            return Err(Error::invalid("abs_tol", "must be positive"));
        }
        if !(4..=64).contains(&self.nodes_per_panel) {
            return Err(Error::invalid("nodes_per_panel", "must lie in [4, 64]"));
        }
        if self.max_panels < 1 {
            return Err(Error::invalid("max_panels", "must be at least 1"));
        }
        if !(self.panel_width > T::zero()) {
            return Err(Error::invalid("panel_width", "must be positive"));
        }
        Ok(())
    }
}

/// Tail bound for integrands dominated by `exp(ln_scale + growth·p − τp²/2)`.
///
/// Integrating the envelope past `p` gives at most
/// `exp(ln_scale + growth·p − τp²/2) / (τp − growth)` once `τp > growth`.
pub fn gaussian_tail_bound<T: Real>(ln_scale: T, growth: T, tau: T) -> TailBound<T> {
    Arc::new(move |p: T| {
        let slope = tau * p - growth;
        if slope <= T::one() {
            return T::infinity();
        }
        (ln_scale + growth * p - tau * p * p * lit(0.5)).exp() / slope
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult<T, V = T> {
    pub value: V,
    pub est_error: T,
    pub panels_used: usize,
    pub truncated_at: T,
}

/// Values a quadrature rule can accumulate: scalars, complex numbers, and
/// small fixed-size vectors integrated in one pass.
pub trait QuadValue<T: Real>: Copy + Send + Sync {
    fn zero() -> Self;
    fn plus(self, other: Self) -> Self;
    fn minus(self, other: Self) -> Self;
    fn scale(self, s: T) -> Self;
    fn magnitude(&self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn plus(self, o: Self) -> Self {
        self + o
    }
    fn minus(self, o: Self) -> Self {
        self - o
    }
    fn scale(self, s: T) -> Self {
        self * s
    }
    fn magnitude(&self) -> T {
        self.abs()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn plus(self, o: Self) -> Self {
        self + o
    }
    fn minus(self, o: Self) -> Self {
        self - o
    }
    fn scale(self, s: T) -> Self {
        self * s
    }
    fn magnitude(&self) -> T {
        self.norm()
    }
}

impl<T: Real, const N: usize> QuadValue<T> for [T; N] {
    fn zero() -> Self {
        [T::zero(); N]
    }
    fn plus(mut self, o: Self) -> Self {
        self.iter_mut().zip(o).for_each(|(a, b)| *a = *a + b);
        self
    }
    fn minus(mut self, o: Self) -> Self {
        self.iter_mut().zip(o).for_each(|(a, b)| *a = *a - b);
        self
    }
    fn scale(mut self, s: T) -> Self {
        self.iter_mut().for_each(|a| *a = *a * s);
        self
    }
    fn magnitude(&self) -> T {
        self.iter().fold(T::zero(), |m, a| m.max(a.abs()))
    }
}

/// One Gauss-Legendre panel on `[a, b]`.
pub fn gl_panel<T: Real, V: QuadValue<T>, F: Fn(T) -> V + ?Sized>(g: &F, a: T, b: T, rule: &GaussLegendre) -> V {
    let half = (b - a) * lit(0.5);
    let mid = (a + b) * lit(0.5);
    let mut acc = V::zero();
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        acc = acc.plus(g(mid + half * lit(x)).scale(lit(w)));
    }
    acc.scale(half)
}

/// Composite rule: `(node, weight)` pairs for `n_panels` equal panels on `[a, b]`.
pub fn composite_rule<T: Real>(a: T, b: T, n_panels: usize, nodes_per_panel: usize) -> Vec<(T, T)> {
    let rule = gauss_legendre(nodes_per_panel);
    let width = (b - a) / lit(n_panels as f64);
    let mut out = Vec::with_capacity(n_panels * nodes_per_panel);
    for k in 0..n_panels {
        let lo = a + width * lit(k as f64);
        let half = width * lit(0.5);
        let mid = lo + half;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            out.push((mid + half * lit(x), half * lit(w)));
        }
    }
    out
}

struct Panel<T, V> {
    a: T,
    b: T,
    left: V,
    right: V,
    err: T,
}

impl<T: Real, V: QuadValue<T>> Panel<T, V> {
    fn build<F: Fn(T) -> V + ?Sized>(g: &F, a: T, b: T, coarse: V, rule: &GaussLegendre) -> Self {
        let mid = (a + b) * lit(0.5);
        let left = gl_panel(g, a, mid, rule);
        let right = gl_panel(g, mid, b, rule);
        let err = left.plus(right).minus(coarse).magnitude();
        Panel {
            a,
            b,
            left,
            right,
            err,
        }
    }

    fn fine(&self) -> V {
        self.left.plus(self.right)
    }
}

/// Globally adaptive integration starting from the given breakpoints.
///
/// Returns the result and whether the tolerance was met.
pub fn adaptive<T: Real, V: QuadValue<T>, F: Fn(T) -> V + ?Sized>(
    g: &F,
    breakpoints: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<(QuadratureResult<T, V>, bool)> {
    spec.validate()?;
    if breakpoints.len() < 2 {
        return Err(Error::invalid("breakpoints", "need at least two"));
    }
    for w in breakpoints.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::invalid("breakpoints", "must be strictly increasing"));
        }
    }
    let rule = gauss_legendre(spec.nodes_per_panel);
    let mut panels: Vec<Panel<T, V>> = breakpoints
        .windows(2)
        .map(|w| {
            let coarse = gl_panel(g, w[0], w[1], &rule);
            Panel::build(g, w[0], w[1], coarse, &rule)
        })
        .collect();

    let total = |panels: &[Panel<T, V>]| -> (V, T) {
        let mut v = V::zero();
        let mut e = T::zero();
        for p in panels {
            v = v.plus(p.fine());
            e = e + p.err;
        }
        (v, e)
    };

    loop {
        let (value, err) = total(&panels);
        let target = spec.abs_tol.max(spec.rel_tol * value.magnitude());
        let done = err <= target;
        if done || panels.len() >= spec.max_panels {
            panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(std::cmp::Ordering::Equal));
            let (value, err) = total(&panels);
            let last = breakpoints[breakpoints.len() - 1];
            return Ok((
                QuadratureResult {
                    value,
                    est_error: err,
                    panels_used: panels.len(),
                    truncated_at: last,
                },
                done,
            ));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| p.err.partial_cmp(&q.err).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .expect("non-empty");
        let p = panels.swap_remove(worst);
        let mid = (p.a + p.b) * lit(0.5);
        panels.push(Panel::build(g, p.a, mid, p.left, &rule));
        panels.push(Panel::build(g, mid, p.b, p.right, &rule));
    }
}

/// `∫_a^b g` to `max(abs_tol, rel_tol·|value|)`.
pub fn integrate_finite<T: Real, F: Fn(T) -> T + ?Sized>(g: &F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<QuadratureResult<T>> {
    if !(a < b) {
        return Err(Error::invalid("interval", "requires a < b"));
    }
    let (res, ok) = adaptive(g, &[a, b], spec)?;
    if ok {
        Ok(res)
    } else {
        Err(Error::NoConvergence {
            what: "adaptive Gauss-Legendre",
            iterations: res.panels_used,
            best: to_f64(res.value),
            est_error: to_f64(res.est_error),
        })
    }
}

/// `∫_a^∞ g` by chaining panels of width `spec.panel_width`.
///
/// With a truncation envelope, chaining stops once the envelope's tail
/// bound drops below `abs_tol`, and that bound is added to `est_error`.
/// Without one, chaining stops after three consecutive negligible panels,
/// and sustained growth is reported as [`Error::MissingEnvelope`].
pub fn integrate_semi_infinite_with<T: Real, V: QuadValue<T>, F: Fn(T) -> V + ?Sized>(
    g: &F,
    a: T,
    spec: &QuadratureSpec<T>,
) -> Result<QuadratureResult<T, V>> {
    spec.validate()?;
    let w = spec.panel_width;
    let panel_spec = QuadratureSpec {
        abs_tol: spec.abs_tol * lit(0.01),
        truncation_envelope: None,
        ..spec.clone()
    };
    let mut value = V::zero();
    let mut err = T::zero();
    let mut panels = 0;
    let mut quiet = 0;
    let mut growing = 0;
    let mut last_mag = T::zero();
    let max_chain = spec.max_panels.max(1);
    for k in 0..max_chain {
        let lo = a + w * lit(k as f64);
        let hi = lo + w;
        let (res, _) = adaptive(g, &[lo, hi], &panel_spec)?;
        value = value.plus(res.value);
        err = err + res.est_error;
        panels += res.panels_used;
        let mag = res.value.magnitude();

        if let Some(env) = &spec.truncation_envelope {
            let tail = env(hi);
            if tail < spec.abs_tol {
                return Ok(QuadratureResult {
                    value,
                    est_error: err + tail,
                    panels_used: panels,
                    truncated_at: hi,
                });
            }
        } else {
            let scale = spec.abs_tol.max(spec.rel_tol * value.magnitude());
            if mag < scale * lit(0.01) {
                quiet += 1;
                if quiet >= 3 {
                    return Ok(QuadratureResult {
                        value,
                        est_error: err + mag,
                        panels_used: panels,
                        truncated_at: hi,
                    });
                }
            } else {
                quiet = 0;
            }
            if k > 0 && mag > last_mag * lit(1.0 + 1e-9) && mag > scale {
                growing += 1;
                if growing >= 10 {
                    return Err(Error::MissingEnvelope { at: to_f64(hi) });
                }
            } else {
                growing = 0;
            }
        }
        last_mag = mag;
    }
    Err(Error::NoConvergence {
        what: "semi-infinite panel chain",
        iterations: max_chain,
        best: to_f64(value.magnitude()),
        est_error: to_f64(err),
    })
}

pub fn integrate_semi_infinite<T: Real, F: Fn(T) -> T + ?Sized>(g: &F, a: T, spec: &QuadratureSpec<T>) -> Result<QuadratureResult<T>> {
    integrate_semi_infinite_with(g, a, spec)
}
