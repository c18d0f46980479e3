//! Command-line front end. Results go to standard output as one JSON
//! object (or CSV rows); diagnostics go to standard error.
//!
//! Exit codes: 0 success, 1 a `validate` check failed, 2 invalid input,
//! 3 unsupported regime, 4 quadrature or convergence failure.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::asian::{self, MarketParams, Payoff, Warning};
use crate::error::Error;
use crate::mc::{self, McConfig};
use crate::morse::{self, MorsePotential, ReconstructSpec};
use crate::quadrature::QuadratureSpec;
use crate::tabulated::Tabulated;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Prices within this distance below zero are reported as `0.0`.
pub const CLAMP_SLACK: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "morse-spectral", version, about = "Morse-potential spectral tools and spectral Asian option pricing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PayoffArg {
    Put,
    Call,
}

impl From<PayoffArg> for Payoff {
    fn from(p: PayoffArg) -> Self {
        match p {
            PayoffArg::Put => Payoff::Put,
            PayoffArg::Call => Payoff::Call,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case {
    /// S0=2, K=2, r=0.05, sigma=0.5, T=1
    Standard,
    /// S0=2, K=2, r=0.02, sigma=0.3, T=1
    LowVol,
}

#[derive(Debug, Args)]
pub struct MarketArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub s0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub strike: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub rate: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub expiry: f64,
}

impl MarketArgs {
    fn params(&self) -> Result<MarketParams<f64>, Error> {
        MarketParams::new(self.s0, self.strike, self.rate, self.sigma, self.expiry)
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-12, allow_hyphen_values = true)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 100_000)]
    pub paths: u64,
    #[arg(long, default_value_t = 512)]
    pub steps: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Disable antithetic pairing.
    #[arg(long)]
    pub no_antithetic: bool,
}

impl McArgs {
    fn config(&self) -> Result<McConfig, Error> {
        McConfig::new(self.paths, self.steps, self.seed, !self.no_antithetic)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Asian option price by the spectral formula.
    Price {
        #[command(flatten)]
        market: MarketArgs,
        #[arg(long, value_enum, default_value_t = PayoffArg::Put)]
        payoff: PayoffArg,
        #[command(flatten)]
        common: Common,
    },
    /// Bound-state eigenvalues of the Morse operator.
    Spectrum {
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Density K(a, 0; tau) of the exponential functional on a log grid.
    Kernel {
        #[command(flatten)]
        market: MarketArgs,
        #[arg(long, default_value_t = 41)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Eigenfunction expansion of a Gaussian exp(-((x-center)/width)^2).
    Reconstruct {
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
        /// Offset of the Gaussian centre from x0.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        center: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        width: f64,
        #[arg(long, default_value_t = 1e-6, allow_hyphen_values = true)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Monte Carlo price.
    Mc {
        #[command(flatten)]
        market: MarketArgs,
        #[arg(long, value_enum, default_value_t = PayoffArg::Put)]
        payoff: PayoffArg,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Spectral price against the payoff-quadrature and Monte Carlo oracles.
    Validate {
        #[arg(long, value_enum)]
        case: Case,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        common: Common,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter { .. } | Error::Spectrum { .. } => EXIT_INVALID,
        Error::UnsupportedRegime(_) => EXIT_UNSUPPORTED,
        _ => EXIT_NUMERICAL,
    }
}

fn quad_spec(tol: f64) -> Result<QuadratureSpec<f64>, Error> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("must lie in (0, 1), got {tol}"),
        });
    }
    Ok(asian::price_spec().with_tolerances(tol, 1e-14))
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable output") + "\n"
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",") + "\n";
    for r in rows {
        s += &r.join(",");
        s.push('\n');
    }
    s
}

fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite number")
}

#[derive(Debug, Serialize)]
struct PriceOutput {
    price: f64,
    discrete_part: f64,
    continuum_part: f64,
    n_terms: usize,
    quad_error: f64,
    nu: f64,
    tau: f64,
    k: f64,
    payoff: Payoff,
    clamped: bool,
    warnings: Vec<Warning>,
}

#[derive(Debug, Serialize)]
struct SpectrumRow {
    n: usize,
    lambda: f64,
}

#[derive(Debug, Serialize)]
struct KernelPoint {
    a: f64,
    density: f64,
}

#[derive(Debug, Serialize)]
struct KernelOutput {
    nu: f64,
    tau: f64,
    p_max: f64,
    points: Vec<KernelPoint>,
}

#[derive(Debug, Serialize)]
struct ReconstructPoint {
    x: f64,
    f: f64,
    approx: f64,
}

#[derive(Debug, Serialize)]
struct ReconstructOutput {
    relative_l2_error: f64,
    p_max: f64,
    discrete: Vec<(usize, f64)>,
    n_continuum_nodes: usize,
    points: Vec<ReconstructPoint>,
}

#[derive(Debug, Serialize)]
struct McOutput {
    mean: f64,
    std_error: f64,
    n_effective: u64,
    payoff: Payoff,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
struct ValidateOutput {
    case: &'static str,
    market: MarketParams<f64>,
    mc: McConfig,
    checks: Vec<Check>,
    all_pass: bool,
}

struct Outcome {
    stdout: String,
    code: i32,
}

fn ok(stdout: String) -> Result<Outcome, Error> {
    Ok(Outcome { stdout, code: EXIT_OK })
}

fn price_cmd(market: &MarketArgs, payoff: PayoffArg, common: &Common, err: &mut dyn Write) -> Result<Outcome, Error> {
    let m = market.params()?;
    let spec = quad_spec(common.tol)?;
    let b = asian::put_price(&m, &spec)?;
    for w in &b.warnings {
        let Warning::PrecisionWarning { message, .. } = w;
        let _ = writeln!(err, "warning: {message}");
    }
    let mut price = b.price;
    if payoff == PayoffArg::Call {
        price += m.discount() * (m.expected_average() - m.strike);
    }
    let mut clamped = false;
    if price < 0.0 && price >= -CLAMP_SLACK {
        price = 0.0;
        clamped = true;
    }
    let out = PriceOutput {
        price,
        discrete_part: b.discrete_part,
        continuum_part: b.continuum_part,
        n_terms: b.n_terms,
        quad_error: b.quad.est_error,
        nu: b.reduced.nu,
        tau: b.reduced.tau,
        k: b.reduced.k,
        payoff: payoff.into(),
        clamped,
        warnings: b.warnings.clone(),
    };
    ok(match common.format {
        Format::Json => json(&out),
        Format::Csv => csv(
            &["price", "discrete_part", "continuum_part", "n_terms", "quad_error", "nu", "tau", "k", "clamped"],
            [vec![
                num(out.price),
                num(out.discrete_part),
                num(out.continuum_part),
                out.n_terms.to_string(),
                num(out.quad_error),
                num(out.nu),
                num(out.tau),
                num(out.k),
                out.clamped.to_string(),
            ]],
        ),
    })
}

fn spectrum_cmd(kappa: f64, x0: f64, format: Format) -> Result<Outcome, Error> {
    let pot = MorsePotential::new(kappa, x0)?;
    let rows: Vec<SpectrumRow> = pot.bound_states().iter().map(|s| SpectrumRow { n: s.n, lambda: s.lambda_n }).collect();
    ok(match format {
        Format::Json => json(&rows),
        Format::Csv => csv(&["n", "lambda"], rows.iter().map(|r| vec![r.n.to_string(), num(r.lambda)])),
    })
}

fn kernel_cmd(market: &MarketArgs, points: usize, common: &Common) -> Result<Outcome, Error> {
    if points < 2 {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: "must be at least 2".into(),
        });
    }
    let m = market.params()?;
    quad_spec(common.tol)?;
    let rp = asian::reduce(&m)?;
    let hk = asian::HeatKernel::new(rp.nu, rp.tau, &asian::HeatKernel::default_rule())?;
    let (lo, hi) = hk.effective_support(1e-12)?;
    let (ylo, yhi) = (lo.ln(), hi.ln());
    let pts = (0..points)
        .map(|i| {
            let a = (ylo + (yhi - ylo) * i as f64 / (points - 1) as f64).exp();
            Ok(KernelPoint { a, density: hk.eval(a)? })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let out = KernelOutput {
        nu: rp.nu,
        tau: rp.tau,
        p_max: hk.p_max(),
        points: pts,
    };
    ok(match common.format {
        Format::Json => json(&out),
        Format::Csv => csv(&["a", "density"], out.points.iter().map(|p| vec![num(p.a), num(p.density)])),
    })
}

fn reconstruct_cmd(kappa: f64, x0: f64, center: f64, width: f64, tol: f64, format: Format) -> Result<Outcome, Error> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::InvalidParameter {
            name: "width",
            reason: "must be positive".into(),
        });
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("must lie in (0, 1), got {tol}"),
        });
    }
    let pot = MorsePotential::new(kappa, x0)?;
    let c = x0 + center;
    let gauss = move |x: f64| (-((x - c) / width).powi(2)).exp();
    let xs = Tabulated::uniform_grid(c - 8.0 * width, c + 8.0 * width, 321);
    let f = Tabulated::from_fn(xs, gauss)?;
    let mut spec = ReconstructSpec::default();
    spec.continuum.rel_tol = tol;
    let r = morse::reconstruct(&f, &pot, &spec)?;
    let err = r.approx.relative_l2_error(gauss, c - 3.0 * width, c + 3.0 * width);
    let out = ReconstructOutput {
        relative_l2_error: err,
        p_max: r.p_max,
        discrete: r.discrete.clone(),
        n_continuum_nodes: r.continuum.len(),
        points: f
            .xs()
            .iter()
            .zip(f.values())
            .zip(r.approx.values())
            .map(|((&x, &fv), &av)| ReconstructPoint { x, f: fv, approx: av })
            .collect(),
    };
    ok(match format {
        Format::Json => json(&out),
        Format::Csv => csv(&["x", "f", "approx"], out.points.iter().map(|p| vec![num(p.x), num(p.f), num(p.approx)])),
    })
}

fn mc_cmd(market: &MarketArgs, payoff: PayoffArg, args: &McArgs, format: Format) -> Result<Outcome, Error> {
    let m = market.params()?;
    let est = mc::price_asian(&m, payoff.into(), &args.config()?)?;
    let out = McOutput {
        mean: est.mean,
        std_error: est.std_error,
        n_effective: est.n_effective,
        payoff: payoff.into(),
    };
    ok(match format {
        Format::Json => json(&out),
        Format::Csv => csv(
            &["mean", "std_error", "n_effective"],
            [vec![num(out.mean), num(out.std_error), out.n_effective.to_string()]],
        ),
    })
}

fn case_params(case: Case) -> (&'static str, MarketParams<f64>) {
    match case {
        Case::Standard => ("standard", MarketParams::new(2.0, 2.0, 0.05, 0.5, 1.0).expect("valid case")),
        Case::LowVol => ("low-vol", MarketParams::new(2.0, 2.0, 0.02, 0.3, 1.0).expect("valid case")),
    }
}

/// Comparisons behind `validate`: payoff quadrature to `1e-6` relative,
/// Monte Carlo put and call within 3 standard errors, and put stability
/// between `steps` and `2·steps` within 2 combined standard errors.
pub fn validation_checks(m: &MarketParams<f64>, cfg: &McConfig, spec: &QuadratureSpec<f64>) -> Result<Vec<Check>, Error> {
    let b = asian::put_price(m, spec)?;
    let quad = asian::put_price_by_payoff_quadrature(m, spec)?;
    let call = b.price + m.discount() * (m.expected_average() - m.strike);
    let mc_put = mc::price_asian(m, Payoff::Put, cfg)?;
    let mc_call = mc::price_asian(m, Payoff::Call, cfg)?;
    let fine = McConfig {
        n_steps: 2 * cfg.n_steps,
        ..*cfg
    };
    let mc_fine = mc::price_asian(m, Payoff::Put, &fine)?;
    let rel = (b.price - quad).abs() / quad.abs();
    let combined = (mc_put.std_error.powi(2) + mc_fine.std_error.powi(2)).sqrt();
    Ok(vec![
        Check {
            name: "put_vs_payoff_quadrature",
            value: b.price,
            reference: quad,
            tolerance: 1e-6,
            pass: rel < 1e-6,
        },
        Check {
            name: "put_vs_monte_carlo",
            value: b.price,
            reference: mc_put.mean,
            tolerance: 3.0 * mc_put.std_error,
            pass: (b.price - mc_put.mean).abs() < 3.0 * mc_put.std_error,
        },
        Check {
            name: "call_vs_monte_carlo",
            value: call,
            reference: mc_call.mean,
            tolerance: 3.0 * mc_call.std_error,
            pass: (call - mc_call.mean).abs() < 3.0 * mc_call.std_error,
        },
        Check {
            name: "monte_carlo_step_doubling",
            value: mc_put.mean,
            reference: mc_fine.mean,
            tolerance: 2.0 * combined,
            pass: (mc_put.mean - mc_fine.mean).abs() < 2.0 * combined,
        },
        Check {
            name: "whittaker_realness",
            value: b.max_imag_residue,
            reference: 0.0,
            tolerance: 1e-10,
            pass: b.max_imag_residue < 1e-10,
        },
    ])
}

fn validate_cmd(case: Case, args: &McArgs, common: &Common, err: &mut dyn Write) -> Result<Outcome, Error> {
    let (name, m) = case_params(case);
    let cfg = args.config()?;
    let spec = quad_spec(common.tol)?;
    let checks = validation_checks(&m, &cfg, &spec)?;
    let all_pass = checks.iter().all(|c| c.pass);
    let _ = writeln!(err, "{:<28} {:>22} {:>22} {:>12}  result", "check", "value", "reference", "tolerance");
    for c in &checks {
        let _ = writeln!(
            err,
            "{:<28} {:>22.15e} {:>22.15e} {:>12.3e}  {}",
            c.name,
            c.value,
            c.reference,
            c.tolerance,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    let out = ValidateOutput {
        case: name,
        market: m,
        mc: cfg,
        checks,
        all_pass,
    };
    let stdout = match common.format {
        Format::Json => json(&out),
        Format::Csv => csv(
            &["check", "value", "reference", "tolerance", "pass"],
            out.checks
                .iter()
                .map(|c| vec![c.name.to_string(), num(c.value), num(c.reference), num(c.tolerance), c.pass.to_string()]),
        ),
    };
    Ok(Outcome {
        stdout,
        code: if all_pass { EXIT_OK } else { EXIT_CHECK_FAILED },
    })
}

fn dispatch(cli: &Cli, err: &mut dyn Write) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Price { market, payoff, common } => price_cmd(market, *payoff, common, err),
        Command::Spectrum { kappa, x0, format } => spectrum_cmd(*kappa, *x0, *format),
        Command::Kernel { market, points, common } => kernel_cmd(market, *points, common),
        Command::Reconstruct {
            kappa,
            x0,
            center,
            width,
            tol,
            format,
        } => reconstruct_cmd(*kappa, *x0, *center, *width, *tol, *format),
        Command::Mc {
            market,
            payoff,
            mc,
            format,
        } => mc_cmd(market, *payoff, mc, *format),
        Command::Validate { case, mc, common } => validate_cmd(*case, mc, common, err),
    }
}

/// Caps rayon's global pool from `THREADS` when set.
fn configure_threads(err: &mut dyn Write) -> Result<(), i32> {
    let Ok(v) = std::env::var("THREADS") else {
        return Ok(());
    };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            // a pool configured earlier in the same process is kept
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            Ok(())
        }
        _ => {
            let _ = writeln!(err, "error: invalid parameter `THREADS`: must be a positive integer, got {v:?}");
            Err(EXIT_INVALID)
        }
    }
}

/// Parses `argv`, runs the command, and returns the exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    if let Err(code) = configure_threads(err) {
        return code;
    }
    match dispatch(&cli, err) {
        Ok(o) => {
            let _ = out.write_all(o.stdout.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
