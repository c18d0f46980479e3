//! Expansion of a sampled function over the Morse eigenbasis:
//! `f = Σ_n ⟨ψ_n, f⟩ ψ_n + ∫₀^∞ ⟨ψ_λ, f⟩ ψ_λ dλ`.
//!
//! The continuum integral is taken in `p` with `λ = p²/4`, on chained
//! Gauss-Legendre panels, until two consecutive panels change the result by
//! a negligible amount. Inner products use a composite rule on the
//! part of the grid where `f` is not negligible.

use rayon::prelude::*;
use serde::Serialize;

use super::{psi_n, ContinuumEigenfunction, MorsePotential};
use crate::error::{Error, Result};
use crate::quadrature::{composite_rule, gauss_legendre, QuadratureSpec};
use crate::real::{lit, to_f64, Real};
use crate::tabulated::Tabulated;

#[derive(Debug, Clone)]
pub struct ReconstructSpec<T> {
    /// Chained panels in `p = 2√λ`: `panel_width`, `nodes_per_panel` and
    /// `max_panels`. Chaining stops after two consecutive panels whose
    /// contribution to the output stays below `rel_tol · max|f|`.
    pub continuum: QuadratureSpec<T>,
    pub x_panel_width: T,
    pub x_nodes: usize,
    /// Relative size below which samples of `f` and eigenfunction values
    /// are dropped.
    pub negligible: T,
}

impl<T: Real> Default for ReconstructSpec<T> {
    fn default() -> Self {
        ReconstructSpec {
            continuum: QuadratureSpec {
                rel_tol: lit(1e-6),
                max_panels: 300,
                nodes_per_panel: 8,
                panel_width: lit(1.0),
                ..QuadratureSpec::default()
            },
            x_panel_width: lit(0.25),
            x_nodes: 16,
            negligible: lit(1e-14),
        }
    }
}

impl<T: Real> ReconstructSpec<T> {
    pub fn with_continuum_panels(mut self, panel_width: T, nodes_per_panel: usize) -> Self {
        self.continuum.panel_width = panel_width;
        self.continuum.nodes_per_panel = nodes_per_panel;
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Reconstruction<T> {
    /// The expansion evaluated on the input grid.
    pub approx: Tabulated<T>,
    /// `(n, ⟨ψ_n, f⟩)`.
    pub discrete: Vec<(usize, T)>,
    /// `(λ, ⟨ψ_λ, f⟩)` at the continuum nodes.
    pub continuum: Vec<(T, T)>,
    pub p_max: T,
    /// Largest special-function error estimate met.
    pub max_eval_error: f64,
}

struct Node<T> {
    lambda: T,
    coefficient: T,
    weight: T,
    out: Vec<T>,
    eval_error: f64,
}

pub fn reconstruct<T: Real>(f: &Tabulated<T>, pot: &MorsePotential<T>, spec: &ReconstructSpec<T>) -> Result<Reconstruction<T>> {
    spec.continuum.validate()?;
    if !(spec.x_panel_width > T::zero()) || !(2..=64).contains(&spec.x_nodes) {
        return Err(Error::invalid("x rule", "panel width must be positive and nodes in [2, 64]"));
    }
    let xs = f.xs();
    let fmax = f.values().iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if fmax == T::zero() {
        return Ok(Reconstruction {
            approx: Tabulated::new(xs.to_vec(), vec![T::zero(); xs.len()])?,
            discrete: Vec::new(),
            continuum: Vec::new(),
            p_max: T::zero(),
            max_eval_error: 0.0,
        });
    }

    // composite rule over the support of f
    let cut = spec.negligible * fmax;
    let first = f.values().iter().position(|v| v.abs() > cut).unwrap_or(0);
    let last = f.values().iter().rposition(|v| v.abs() > cut).unwrap_or(xs.len() - 1);
    let lo = xs[first.saturating_sub(1)];
    let hi = xs[(last + 1).min(xs.len() - 1)];
    let n_panels = to_f64(((hi - lo) / spec.x_panel_width).ceil()).max(1.0) as usize;
    let rule = composite_rule(lo, hi, n_panels, spec.x_nodes);
    let nodes: Vec<T> = rule.iter().map(|r| r.0).collect();
    let weighted: Vec<T> = rule.iter().map(|&(x, w)| w * f.eval(x)).collect();

    let mut out = vec![T::zero(); xs.len()];
    let mut discrete = Vec::new();
    for s in pot.bound_states() {
        let mut c = T::zero();
        for (&x, &wf) in nodes.iter().zip(&weighted) {
            c = c + wf * psi_n(x, &s, pot)?;
        }
        for (o, &x) in out.iter_mut().zip(xs) {
            *o = *o + c * psi_n(x, &s, pot)?;
        }
        discrete.push((s.n, c));
    }

    let gl = gauss_legendre(spec.continuum.nodes_per_panel);
    let width = spec.continuum.panel_width;
    let half = lit::<T>(0.5);
    let mut continuum = Vec::new();
    let mut quiet = 0;
    let mut max_eval_error = 0.0f64;
    let mut p_max = T::zero();
    for k in 0..spec.continuum.max_panels {
        let a = width * lit(k as f64);
        let mid = a + width * half;
        let panel: Vec<Node<T>> = gl
            .nodes
            .par_iter()
            .zip(gl.weights.par_iter())
            .map(|(&t, &w)| {
                let p = mid + width * half * lit(t);
                let lambda = p * p * lit(0.25);
                let psi = ContinuumEigenfunction::new(pot, lambda)?;
                let (on_nodes, e1) = psi.eval_grid(&nodes, spec.negligible)?;
                let coefficient = on_nodes.iter().zip(&weighted).map(|(&v, &wf)| v * wf).sum::<T>();
                let (on_out, e2) = psi.eval_grid(xs, spec.negligible)?;
                // dλ = (p/2) dp
                let weight = width * half * lit(w) * p * half;
                Ok(Node {
                    lambda,
                    coefficient,
                    weight,
                    out: on_out,
                    eval_error: e1.max(e2),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut contribution = vec![T::zero(); xs.len()];
        for node in &panel {
            for (c, &v) in contribution.iter_mut().zip(&node.out) {
                *c = *c + node.weight * node.coefficient * v;
            }
            max_eval_error = max_eval_error.max(node.eval_error);
            continuum.push((node.lambda, node.coefficient));
        }
        let mut panel_size = T::zero();
        for (o, c) in out.iter_mut().zip(contribution) {
            *o = *o + c;
            panel_size = panel_size.max(c.abs());
        }
        p_max = a + width;
        if panel_size <= spec.continuum.rel_tol * fmax {
            quiet += 1;
            if quiet >= 2 {
                return Ok(Reconstruction {
                    approx: Tabulated::new(xs.to_vec(), out)?,
                    discrete,
                    continuum,
                    p_max,
                    max_eval_error,
                });
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::QuadratureFailure(format!(
        "continuum panels still contribute more than {} of max|f| at p = {}",
        to_f64(spec.continuum.rel_tol),
        to_f64(p_max)
    )))
}
