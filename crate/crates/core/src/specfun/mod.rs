//! Special functions: complex log-gamma, Kummer's 1F1, Whittaker M and W,
//! generalized Laguerre polynomials.

pub mod dd;
mod gamma;
mod kummer;
mod laguerre;
mod whittaker;

use serde::Serialize;

pub use gamma::{abs_gamma_sq, ln_abs_gamma, log_gamma};
pub use kummer::kummer_1f1;
pub use laguerre::laguerre;
pub use whittaker::{whittaker_m, whittaker_w, whittaker_w_complex, WhittakerW, DEGENERATE_OFFSET, INTEGRAL_MAX_IM_MU, REALNESS_TOL, Z_SWITCH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Series,
    Connection,
    Asymptotic,
    IntegralRep,
}

/// How a special-function value was obtained and how far to trust it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalDiagnostics {
    pub terms_used: usize,
    pub est_rel_error: f64,
    pub route: Route,
}
