//! Whittaker functions `M_{κ,μ}(z)` and `W_{κ,μ}(z)` for real `κ`, complex
//! `μ` and real `z > 0`.
//!
//! `W` has three routes:
//! * connection: `W = Γ(−2μ)/Γ(½−κ−μ)·M_{κ,μ} + Γ(2μ)/Γ(½−κ+μ)·M_{κ,−μ}`,
//!   summed in double-word precision because the two terms grow like
//!   `e^{z/2}` while `W` decays like `e^{−z/2}`;
//! * asymptotic: `e^{−z/2} z^κ Σ (½+μ−κ)_k (½−μ−κ)_k / (k! (−z)^k)`, used
//!   for large `z` when the series reaches full precision;
//! * integral: Tricomi's `U` as a Laplace-type integral, shifted to a
//!   well-behaved first parameter and brought back with the (stable)
//!   backward recurrence in that parameter.

use num_complex::Complex;

use super::dd::{CDd, Dd};
use super::gamma::{log_gamma, log_gamma_dd};
use super::kummer::{is_nonpositive_integer, kummer_series};
use super::{EvalDiagnostics, Route};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive, QuadratureSpec};
use crate::real::{lit, to_f64, Real};

/// Argument above which `W` tries the asymptotic series first.
pub const Z_SWITCH: f64 = 40.0;
/// Imaginary offset used to step around integer `2μ`.
pub const DEGENERATE_OFFSET: f64 = 1e-8;
/// Estimated relative error above which the dispatcher tries another route.
const ROUTE_FALLBACK_TOL: f64 = 1e-10;
/// Estimated error below which the working-precision connection sum is kept.
const FAST_PATH_TOL: f64 = 1e-14;
/// Estimated error at which the asymptotic series is used without trying
/// the other routes.
const ASYMPTOTIC_TOL: f64 = 1e-14;
/// Largest argument at which the connection formula is attempted.
const CONNECTION_MAX_Z: f64 = 400.0;
/// Largest `|Im μ|` for which the integral route is attempted.
pub const INTEGRAL_MAX_IM_MU: f64 = 8.0;
/// Relative imaginary residue tolerated when `W` is known to be real.
pub const REALNESS_TOL: f64 = 1e-10;

fn check_argument<T: Real>(z: T) -> Result<()> {
    if !(z > T::zero()) || !z.is_finite() {
        return Err(Error::invalid("z", "Whittaker argument must be positive and finite"));
    }
    Ok(())
}

/// `M_{κ,μ}(z) = e^{−z/2} z^{μ+½} 1F1(μ−κ+½; 1+2μ; z)`.
pub fn whittaker_m<T: Real>(kappa: T, mu: Complex<T>, z: T) -> Result<(Complex<T>, EvalDiagnostics)> {
    check_argument(z)?;
    let half = lit::<T>(0.5);
    let b = mu * lit::<T>(2.0) + T::one();
    if is_nonpositive_integer(b) {
        return Err(Error::Pole {
            re: to_f64(b.re),
            im: to_f64(b.im),
        });
    }
    let a = mu - kappa + half;
    let (f, diag) = kummer_series(a, b, Complex::new(z, T::zero()))?;
    let pre = ((mu + half) * z.ln() - z * half).exp();
    Ok((pre * f, diag))
}

fn m_dd<T: Real>(kappa: T, mu: Complex<T>, z: T) -> Result<(CDd<T>, EvalDiagnostics)> {
    let half = lit::<T>(0.5);
    let a = CDd::from_complex(mu - kappa + half);
    let b = CDd::from_complex(mu * lit::<T>(2.0) + T::one());
    let zd = Dd::from_t(z);
    let (f, diag) = kummer_series(a, b, CDd::from_real(zd))?;
    let expo = CDd::from_complex(mu + half) * CDd::from_real(zd.ln()) - CDd::from_real(zd.mul_t(half));
    Ok((expo.exp() * f, diag))
}

fn gamma_ratio_dd<T: Real>(num: Complex<T>, den: Complex<T>) -> Result<CDd<T>> {
    match log_gamma_dd(den) {
        // 1/Γ vanishes at its poles
        Err(Error::Pole { .. }) => Ok(CDd::zero()),
        Err(e) => Err(e),
        Ok(lg_den) => Ok((log_gamma_dd(num)? - lg_den).exp()),
    }
}

fn two_mu_is_integer<T: Real>(mu: Complex<T>) -> bool {
    let two = mu * lit::<T>(2.0);
    let tol = lit::<T>(1e-9);
    two.im.abs() < tol && (two.re - two.re.round()).abs() < tol
}

#[derive(Debug, Clone)]
struct Connection<T> {
    coef_plus: CDd<T>,
    coef_minus: CDd<T>,
    plus: Complex<T>,
    minus: Complex<T>,
}

/// `W_{κ,μ}` prepared for repeated evaluation at fixed `(κ, μ)`.
///
/// The connection coefficients are computed once, which is what makes
/// tabulating an eigenfunction on a grid affordable.
#[derive(Debug, Clone)]
pub struct WhittakerW<T> {
    kappa: T,
    mu: Complex<T>,
    connection: Option<Connection<T>>,
    /// Plans at `μ ± iδ` when `2μ` is an integer.
    offsets: Option<Box<(WhittakerW<T>, WhittakerW<T>)>>,
}

impl<T: Real> WhittakerW<T> {
    pub fn new(kappa: T, mu: Complex<T>) -> Result<Self> {
        if !kappa.is_finite() || !mu.re.is_finite() || !mu.im.is_finite() {
            return Err(Error::invalid("kappa/mu", "must be finite"));
        }
        if two_mu_is_integer(mu) {
            let d = Complex::new(T::zero(), lit::<T>(DEGENERATE_OFFSET));
            let up = WhittakerW::new(kappa, mu + d)?;
            let down = WhittakerW::new(kappa, mu - d)?;
            return Ok(WhittakerW {
                kappa,
                mu,
                connection: None,
                offsets: Some(Box::new((up, down))),
            });
        }
        let half = lit::<T>(0.5);
        let two = lit::<T>(2.0);
        let one = Complex::new(half, T::zero()) - kappa;
        let coef_plus = gamma_ratio_dd(-mu * two, one - mu)?;
        let coef_minus = gamma_ratio_dd(mu * two, one + mu)?;
        Ok(WhittakerW {
            kappa,
            mu,
            connection: Some(Connection {
                coef_plus,
                coef_minus,
                plus: coef_plus.to_complex(),
                minus: coef_minus.to_complex(),
            }),
            offsets: None,
        })
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn mu(&self) -> Complex<T> {
        self.mu
    }

    /// Connection-formula route. Fails with [`Error::DegenerateIndex`] when
    /// `2μ` is an integer.
    pub fn connection(&self, z: T) -> Result<(Complex<T>, EvalDiagnostics)> {
        check_argument(z)?;
        let c = self.connection.as_ref().ok_or_else(|| {
            let two = self.mu * lit::<T>(2.0);
            Error::DegenerateIndex {
                two_mu_re: to_f64(two.re),
                two_mu_im: to_f64(two.im),
            }
        })?;
        // working precision first; double-word only when the two terms cancel
        let (mp, dp) = whittaker_m(self.kappa, self.mu, z)?;
        let (mm, dm) = whittaker_m(self.kappa, -self.mu, z)?;
        let tp = c.plus * mp;
        let tm = c.minus * mm;
        let w = tp + tm;
        let amplification = tp.norm().max(tm.norm()) / w.norm();
        let series_err = lit::<T>(dp.est_rel_error.max(dm.est_rel_error));
        let est = (series_err + T::epsilon() * lit(8.0)) * amplification;
        let dd_unit = T::epsilon() * T::epsilon() * lit(64.0);
        let hopeless = amplification * dd_unit > lit(ROUTE_FALLBACK_TOL);
        if est <= lit(FAST_PATH_TOL) || hopeless {
            return Ok((
                w,
                EvalDiagnostics {
                    terms_used: dp.terms_used + dm.terms_used,
                    est_rel_error: to_f64(est),
                    route: Route::Connection,
                },
            ));
        }

        let (mp, dp) = m_dd(self.kappa, self.mu, z)?;
        let (mm, dm) = m_dd(self.kappa, -self.mu, z)?;
        let tp = c.coef_plus * mp;
        let tm = c.coef_minus * mm;
        let w = tp + tm;
        let size = tp.abs_approx().max(tm.abs_approx());
        let wn = w.abs_approx();
        let unit = T::epsilon() * T::epsilon();
        let amplification = if wn > T::zero() { size / wn } else { T::infinity() };
        let series_err = lit::<T>(dp.est_rel_error.max(dm.est_rel_error));
        let est = (series_err + unit * lit(64.0)) * amplification;
        Ok((
            w.to_complex(),
            EvalDiagnostics {
                terms_used: dp.terms_used + dm.terms_used,
                est_rel_error: to_f64(est),
                route: Route::Connection,
            },
        ))
    }

    /// Large-argument expansion, truncated at convergence or at its smallest
    /// term; `None` when the terms never shrink.
    pub fn asymptotic(&self, z: T) -> Option<(Complex<T>, EvalDiagnostics)> {
        if check_argument(z).is_err() {
            return None;
        }
        let half = lit::<T>(0.5);
        let a = self.mu + half - self.kappa;
        let b = -self.mu + half - self.kappa;
        let unit = T::epsilon() * half;
        let mut term = Complex::new(T::one(), T::zero());
        let mut sum = term;
        let mut max_term = T::one();
        let mut prev = T::one();
        let mut decreasing = false;
        let mut used = 1;
        let mut truncation = T::zero();
        for k in 0..400 {
            let kf: T = lit(k as f64);
            let next = term * (a + kf) * (b + kf) / (-(kf + T::one()) * z);
            let t = next.norm();
            if !t.is_finite() {
                return None;
            }
            if decreasing && t >= prev {
                // divergent tail: stop at the smallest term
                truncation = prev;
                break;
            }
            if t < prev {
                decreasing = true;
            }
            term = next;
            sum = sum + term;
            used = k + 2;
            max_term = max_term.max(t);
            prev = t;
            if t <= unit * sum.norm() {
                break;
            }
            if k == 399 {
                truncation = t;
            }
        }
        if !decreasing && used > 1 {
            return None;
        }
        let s = sum.norm();
        if !(s > T::zero()) {
            return None;
        }
        let est = (unit * max_term + truncation) / s;
        let pre = (-z * half + self.kappa * z.ln()).exp();
        Some((
            sum * pre,
            EvalDiagnostics {
                terms_used: used,
                est_rel_error: to_f64(est),
                route: Route::Asymptotic,
            },
        ))
    }

    /// Integral-representation route, valid for every `κ` by way of the
    /// backward recurrence in the first parameter of `U`.
    ///
    /// The integrand oscillates like `t^{i Im μ}` and the integral is smaller
    /// than its magnitude by about `e^{−π|Im μ|}`, so the route is refused
    /// for `|Im μ|` above [`INTEGRAL_MAX_IM_MU`].
    pub fn integral(&self, z: T) -> Result<(Complex<T>, EvalDiagnostics)> {
        check_argument(z)?;
        if self.mu.im.abs() > lit(INTEGRAL_MAX_IM_MU) {
            return Err(Error::UnsupportedRegime(format!(
                "integral route for W with |Im mu| = {} > {INTEGRAL_MAX_IM_MU}",
                to_f64(self.mu.im.abs())
            )));
        }
        let half = lit::<T>(0.5);
        let a = self.mu + half - self.kappa;
        let b = self.mu * lit::<T>(2.0) + T::one();
        let target = lit::<T>(1.5);
        let shift = if a.re < target {
            (target - a.re).ceil().to_usize().unwrap_or(0)
        } else {
            0
        };
        let c0 = a + lit::<T>(shift as f64);
        let c1 = c0 + T::one();
        let e0 = b - c0 - T::one();
        let e1 = b - c1 - T::one();
        let ln_z = z.ln();

        // s = e^v turns the s^{c-1} factor into a uniform oscillation in v
        let integrand = |v: T| -> [T; 5] {
            let s = v.exp();
            let base = -s;
            let log1p = (s / z).ln_1p();
            let f0 = (Complex::new(base, T::zero()) + c0 * v + e0 * log1p).exp();
            let f1 = (Complex::new(base, T::zero()) + c1 * v + e1 * log1p).exp();
            [f0.re, f0.im, f1.re, f1.im, f0.norm()]
        };
        let v_lo = lit::<T>(-40.0) / c0.re;
        let grow = e0.re.abs().max(e1.re.abs()) + c1.re;
        let s_hi = lit::<T>(50.0) + grow * lit(3.0);
        let v_hi = s_hi.ln();
        let scale = log_gamma(Complex::new(c0.re, T::zero()))?.re.exp();
        let n_init = ((v_hi - v_lo) / lit::<T>(0.5)).ceil().to_usize().unwrap_or(1).max(1);
        let step = (v_hi - v_lo) / lit(n_init as f64);
        let breaks: Vec<T> = (0..=n_init).map(|k| v_lo + step * lit(k as f64)).collect();
        let spec = QuadratureSpec {
            rel_tol: lit(1e-15),
            abs_tol: scale * lit(1e-16),
            max_panels: 4000,
            nodes_per_panel: 16,
            ..QuadratureSpec::default()
        };
        let (res, ok) = adaptive(&integrand, &breaks, &spec)?;
        let [r0, i0, r1, i1, abs0] = res.value;
        let i0c = Complex::new(r0, i0);
        let i1c = Complex::new(r1, i1);

        // U(c) = z^{-c} / Γ(c) · I(c)
        let u_at = |c: Complex<T>, i: Complex<T>| -> Result<Complex<T>> { Ok((-c * ln_z - log_gamma(c)?).exp() * i) };
        let mut u_hi = u_at(c1, i1c)?;
        let mut u_lo = u_at(c0, i0c)?;
        let mut c = c0;
        for _ in 0..shift {
            // U(c−1) = (2c − b + z) U(c) − c (c − b + 1) U(c+1)
            let next = (c * lit::<T>(2.0) - b + z) * u_lo - c * (c - b + T::one()) * u_hi;
            u_hi = u_lo;
            u_lo = next;
            c = c - T::one();
        }
        let pre = ((self.mu + half) * ln_z - z * half).exp();
        let w = pre * u_lo;

        let magnitude = i0c.norm();
        let amplification = if magnitude > T::zero() { abs0 / magnitude } else { T::infinity() };
        let mut est = (res.est_error / abs0.max(T::min_positive_value()) + T::epsilon()) * amplification;
        if !ok {
            est = est.max(lit(1e-6));
        }
        Ok((
            w,
            EvalDiagnostics {
                terms_used: res.panels_used,
                est_rel_error: to_f64(est),
                route: Route::IntegralRep,
            },
        ))
    }

    /// Dispatches between the routes: connection for `z ≤ Z_SWITCH`, then
    /// the integral if that reports a large error. Beyond, the asymptotic
    /// series, then the connection formula (which stays accurate for large
    /// `|μ|`), then the integral; the smallest error estimate wins.
    pub fn eval(&self, z: T) -> Result<(Complex<T>, EvalDiagnostics)> {
        check_argument(z)?;
        if let Some(pair) = &self.offsets {
            let (wu, du) = pair.0.eval(z)?;
            let (wd, dd) = pair.1.eval(z)?;
            let w = (wu + wd) * lit::<T>(0.5);
            let scale = wu.norm().max(wd.norm());
            // offsets cost roughly δ² of accuracy plus the cancellation of 1/δ
            let est = du.est_rel_error.max(dd.est_rel_error) + DEGENERATE_OFFSET * DEGENERATE_OFFSET;
            let est = if w.norm() > T::zero() { est * to_f64(scale / w.norm()) } else { f64::INFINITY };
            return Ok((
                w,
                EvalDiagnostics {
                    terms_used: du.terms_used + dd.terms_used,
                    est_rel_error: est,
                    route: du.route,
                },
            ));
        }
        if z <= lit(Z_SWITCH) {
            let first = self.connection(z)?;
            if first.1.est_rel_error <= ROUTE_FALLBACK_TOL {
                return Ok(first);
            }
            return match self.integral(z) {
                Ok(second) if second.1.est_rel_error < first.1.est_rel_error => Ok(second),
                _ => Ok(first),
            };
        }
        let mut best = self.asymptotic(z);
        if let Some(r) = &best {
            if r.1.est_rel_error <= ASYMPTOTIC_TOL {
                return Ok(*r);
            }
        }
        let better = |best: Option<(Complex<T>, EvalDiagnostics)>, r: (Complex<T>, EvalDiagnostics)| match best {
            Some(b) if b.1.est_rel_error <= r.1.est_rel_error => Some(b),
            _ => Some(r),
        };
        if z <= lit(CONNECTION_MAX_Z) {
            if let Ok(r) = self.connection(z) {
                if r.1.est_rel_error <= ROUTE_FALLBACK_TOL {
                    return Ok(r);
                }
                best = better(best, r);
            }
        }
        match (self.integral(z), best) {
            (Ok(r), b) => Ok(better(b, r).expect("candidate present")),
            (Err(_), Some(b)) => Ok(b),
            (Err(e), None) => Err(e),
        }
    }

    /// Real-valued `W` (real `κ`, `μ` real or purely imaginary).
    ///
    /// A relative imaginary residue above [`REALNESS_TOL`] is folded into
    /// `est_rel_error`.
    pub fn eval_real(&self, z: T) -> Result<(T, EvalDiagnostics)> {
        let (w, mut d) = self.eval(z)?;
        let denom = w.re.abs();
        let residue = if denom > T::zero() {
            to_f64(w.im.abs() / denom)
        } else if w.im == T::zero() {
            0.0
        } else {
            f64::INFINITY
        };
        if residue > REALNESS_TOL {
            d.est_rel_error = d.est_rel_error.max(residue);
        }
        Ok((w.re, d))
    }
}

/// `W_{κ,μ}(z)` for real `κ`, `μ` real or purely imaginary, `z > 0`.
pub fn whittaker_w<T: Real>(kappa: T, mu: Complex<T>, z: T) -> Result<(T, EvalDiagnostics)> {
    WhittakerW::new(kappa, mu)?.eval_real(z)
}

/// `W_{κ,μ}(z)` for arbitrary complex `μ`.
pub fn whittaker_w_complex<T: Real>(kappa: T, mu: Complex<T>, z: T) -> Result<(Complex<T>, EvalDiagnostics)> {
    WhittakerW::new(kappa, mu)?.eval(z)
}
