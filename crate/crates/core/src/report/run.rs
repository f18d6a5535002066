use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::RunConfig;
use super::io::{write_atomic, write_with};
use crate::dilation::{SpectralDecomposition, DEFAULT_CLUSTER_TOL};
use crate::error::{Error, Result};
use crate::extrapolation::{block_norms, decompose, default_base_bound, extrapolation_sum, j_series_constant, omega_llogl};
use crate::linalg::{euclid, real_frobenius};
use crate::oscillatory::{decay_sweep, phase_coefficients, vdc_partition, verify_partition, SweepMode, SweepSpec, Window, H_MAX};
use crate::polar::SurfaceMeasure;
use crate::quadrature::log_grid;
use crate::quasinorm::{exponent_budget, quasi_triangle_constant, unit_sphere_sample, DilationGroup, QuasiNormContext};
use crate::rough::{
    sigma_hat_direct, verify_sigma_decay, DyadicMeasures, MeasureMode, MeasureSweep, RoughKernel, TauMethod, WindowFamily,
};

/// Growth allowed across decades in every decay sweep.
pub const GROWTH_LIMIT: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Dilation,
    Quasinorm,
    Oscillatory,
    Measures,
    Extrapolate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Dilation => "dilation",
            Self::Quasinorm => "quasinorm",
            Self::Oscillatory => "oscillatory",
            Self::Measures => "measures",
            Self::Extrapolate => "extrapolate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            pass: value <= limit,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            limit: 1.0,
            pass: ok,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub command: Command,
    pub seed: u64,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub results: Value,
    pub files: Vec<String>,
    pub notes: Vec<String>,
}

impl Summary {
    pub fn failing(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub summary: Summary,
    pub summary_path: PathBuf,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    out: &'a Path,
    checks: Vec<Check>,
    files: Vec<String>,
    notes: Vec<String>,
}

impl Ctx<'_> {
    fn csv<F>(&mut self, name: &str, render: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> Result<()>,
    {
        write_with(&self.out.join(name), render)?;
        self.files.push(name.to_string());
        Ok(())
    }
}

/// Runs one subcommand, writing `<name>_summary.json` and CSV tables into `out`.
pub fn run_subcommand(cmd: Command, cfg: &RunConfig, out: &Path) -> Result<RunOutcome> {
    cfg.validate()?;
    let p = cfg.matrix()?;
    // every subcommand works with an expanding group
    DilationGroup::new(&p)?;
    let mut cx = Ctx {
        cfg,
        out,
        checks: Vec::new(),
        files: Vec::new(),
        notes: Vec::new(),
    };
    let results = match cmd {
        Command::Dilation => dilation(&mut cx)?,
        Command::Quasinorm => quasinorm(&mut cx)?,
        Command::Oscillatory => oscillatory(&mut cx)?,
        Command::Measures => measures(&mut cx)?,
        Command::Extrapolate => extrapolate(&mut cx)?,
    };
    let mut echo = cfg.clone();
    echo.output_dir = None;
    let summary = Summary {
        command: cmd,
        seed: cfg.seed,
        config: echo,
        pass: cx.checks.iter().all(|c| c.pass),
        checks: cx.checks,
        results,
        files: cx.files,
        notes: cx.notes,
    };
    let path = out.join(format!("{}_summary.json", cmd.name()));
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    Ok(RunOutcome {
        summary,
        summary_path: path,
    })
}

fn rel_diff(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> f64 {
    real_frobenius(&(a - b)) / real_frobenius(b).max(f64::MIN_POSITIVE)
}

fn dilation(cx: &mut Ctx) -> Result<Value> {
    let p = cx.cfg.matrix()?;
    let sd = SpectralDecomposition::new(&p, DEFAULT_CLUSTER_TOL)?;
    let res = sd.residuals();
    let mut rng = ChaCha8Rng::seed_from_u64(cx.cfg.seed);
    let mut oracle_err: f64 = 0.0;
    let mut group_err: f64 = 0.0;
    for _ in 0..cx.cfg.samples.dilation.max(1) {
        let t = 10f64.powf(rng.random_range(-2.0..=2.0));
        let u = 10f64.powf(rng.random_range(-2.0..=2.0));
        let at = sd.dilation_real(t)?;
        let exact = (p.as_matrix() * t.ln()).exp();
        oracle_err = oracle_err.max(rel_diff(&at, &exact));
        let au = sd.dilation_real(u)?;
        group_err = group_err.max(rel_diff(&(&at * &au), &sd.dilation_real(t * u)?));
    }
    cx.checks.push(Check::at_most("projection_residual", res.max(), 1e-7));
    cx.checks.push(Check::at_most("exponential_oracle_relative", oracle_err, 1e-8));
    cx.checks.push(Check::at_most("group_law_relative", group_err, 1e-8));
    let clusters: Vec<Value> = sd
        .clusters()
        .iter()
        .map(|c| json!({"re": c.eigenvalue.re, "im": c.eigenvalue.im, "index": c.multiplicity, "algebraic": c.algebraic}))
        .collect();
    Ok(json!({
        "minimal_degree": sd.degree(),
        "clusters": clusters,
        "condition_number": sd.condition_number(),
        "residuals": res,
        "exponential_oracle_relative": oracle_err,
        "group_law_relative": group_err,
    }))
}

fn quasinorm(cx: &mut Ctx) -> Result<Value> {
    let p = cx.cfg.matrix()?;
    let ctx = QuasiNormContext::new(&p)?;
    let n = ctx.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cx.cfg.seed);
    let mut homogeneity: f64 = 0.0;
    let mut round_trip: f64 = 0.0;
    for _ in 0..cx.cfg.samples.quasinorm.max(1) {
        let scale = 10f64.powf(rng.random_range(-2.0..=2.0));
        let x: Vec<f64> = unit_sphere_sample(n, &mut rng).iter().map(|v| v * scale).collect();
        let t = 10f64.powf(rng.random_range(-3.0..=3.0));
        let r = ctx.quasi_norm(&x)?;
        let rt = ctx.quasi_norm(&ctx.dilate(t, &x)?)?;
        homogeneity = homogeneity.max((rt / (t * r) - 1.0).abs());
        let polar = ctx.polar_decompose(&x)?;
        let back = ctx.dilate(polar.radius, &polar.theta)?;
        let diff: Vec<f64> = back.iter().zip(&x).map(|(a, b)| a - b).collect();
        round_trip = round_trip.max(euclid(&diff) / euclid(&x));
    }
    let budget = exponent_budget(&ctx, cx.cfg.exponents.q_dual(), cx.cfg.samples.budget, cx.cfg.seed)?;
    let triangle = quasi_triangle_constant(&ctx, cx.cfg.samples.quasinorm.max(1), cx.cfg.seed)?;
    let lyap = ctx.lyapunov_residual().max(ctx.lyapunov_residual_adjoint());
    cx.checks.push(Check::at_most("lyapunov_residual", lyap, 1e-10));
    cx.checks.push(Check::at_most("homogeneity_relative", homogeneity, 1e-6));
    cx.checks.push(Check::at_most("polar_round_trip_relative", round_trip, 1e-8));
    cx.notes.push("exponent constants carry a 10% margin and are validated on independent samples".into());
    Ok(json!({
        "context": ctx.snapshot(),
        "homogeneity_relative": homogeneity,
        "polar_round_trip_relative": round_trip,
        "quasi_triangle_constant": triangle,
        "budget": budget,
    }))
}

fn oscillatory(cx: &mut Ctx) -> Result<Value> {
    let p = cx.cfg.matrix()?;
    let o = &cx.cfg.oscillatory;
    let sd = SpectralDecomposition::shared(&p, DEFAULT_CLUSTER_TOL)?;
    let mut spec = SweepSpec::new(o.eta.clone(), o.zeta.clone(), log_grid(o.lambda_min, o.lambda_max, o.points));
    spec.subsamples = o.subsamples;
    spec.tol = cx.cfg.tol;
    let mut reports = Vec::new();
    for mode in [SweepMode::PhaseHeight, SweepMode::Pairing, SweepMode::LogAverage, SweepMode::LogPhase] {
        let rep = decay_sweep(sd.clone(), &spec, mode)?;
        let tag = serde_json::to_value(mode)?.as_str().unwrap_or("mode").to_string();
        cx.csv(&format!("oscillatory_{tag}.csv"), |w| rep.write_csv(w))?;
        cx.checks.push(Check::at_most(format!("{tag}_growth"), rep.growth, GROWTH_LIMIT));
        cx.checks.push(Check::at_most(format!("{tag}_slope"), rep.slope, rep.slope_limit()));
        reports.push(json!({
            "mode": mode,
            "exponent_order": rep.exponent_order,
            "slope": rep.slope,
            "growth": rep.growth,
            "sup_ratio": rep.sup_ratio,
            "max_error": rep.max_error,
            "window": rep.window,
        }));
    }
    let window = Window::default();
    let interval = (window.lo.ln(), window.hi.ln());
    let pe = phase_coefficients(&sd, &o.eta, &o.zeta)?;
    let part = vdc_partition(&pe, interval, 64)?;
    let check = verify_partition(&pe, &part, interval, 1000);
    cx.checks.push(Check::at_most("partition_pieces", part.pieces.len() as f64, H_MAX as f64));
    cx.checks.push(Check::holds("partition_verified", check.passes()));
    Ok(json!({
        "sweeps": reports,
        "partition": {"pieces": part.pieces, "coefficient_norm": part.coefficient_norm, "floor": check.floor},
    }))
}

fn measure_setup(cfg: &RunConfig) -> Result<(Arc<QuasiNormContext>, SurfaceMeasure, RoughKernel)> {
    let ctx = Arc::new(QuasiNormContext::new(&cfg.matrix()?)?);
    let sm = SurfaceMeasure::new(ctx.clone(), cfg.kernel.resolution)?;
    let omega = cfg.kernel.omega.build(&sm)?;
    let kernel = RoughKernel::new(&sm, omega, cfg.kernel.h.build()?, cfg.kernel.curve.clone(), cfg.beta())?;
    Ok((ctx, sm, kernel))
}

/// The direct route on a surface rule fine enough for the oscillation of
/// `exp(-2 pi i <A_r theta, xi>)` around the ellipsoid at the block's top radius.
pub fn direct_converged(
    kernel: &RoughKernel,
    ctx: &Arc<QuasiNormContext>,
    k: i32,
    xi: &[f64],
    eta: &[f64],
) -> Result<num_complex::Complex64> {
    let coarse = SurfaceMeasure::new(ctx.clone(), 64)?;
    let top = kernel.beta().powi(k + 1);
    let sd = ctx.group().spectral();
    let reach = coarse
        .nodes()
        .iter()
        .map(|nd| euclid(&sd.orbit(&nd.theta).eval(top)))
        .fold(0.0, f64::max);
    let bandwidth = 2.0 * std::f64::consts::PI * reach * euclid(xi);
    let res = ((1.25 * bandwidth / 64.0).ceil() as usize + 1).clamp(4, 64) * 64;
    sigma_hat_direct(kernel, &SurfaceMeasure::new(ctx.clone(), res)?, k, xi, eta, 16)
}

fn measures(cx: &mut Ctx) -> Result<Value> {
    let cfg = cx.cfg;
    let (ctx, sm, kernel) = measure_setup(cfg)?;
    let budget = exponent_budget(&ctx, cfg.exponents.q_dual(), cfg.samples.budget, cfg.seed)?;
    let dm = DyadicMeasures::new(kernel.clone(), &sm, TauMethod::Auto)?.with_tolerance(cfg.tol)?;
    let m = &cfg.measures;
    let sweep = MeasureSweep {
        k: m.k,
        direction: m.direction.clone(),
        eta: m.eta.clone(),
        s: cfg.exponents.s,
        points_per_decade: m.points_per_decade,
        subsamples: m.subsamples,
        max_unresolved: 0,
    };
    let mut reports = Vec::new();
    for mode in MeasureMode::ALL {
        let rep = verify_sigma_decay(&dm, &budget, mode, &sweep)?;
        let tag = serde_json::to_value(mode)?.as_str().unwrap_or("mode").to_string();
        cx.csv(&format!("measures_{tag}.csv"), |w| rep.write_csv(w))?;
        cx.checks.push(Check::at_most(format!("{tag}_growth"), rep.growth, GROWTH_LIMIT));
        if mode.is_tail() {
            cx.checks.push(Check::at_most(format!("{tag}_slope"), rep.slope, rep.slope_limit()));
        }
        cx.checks.push(Check::at_most(format!("{tag}_mass_violations"), rep.mass_violations as f64, 0.0));
        reports.push(json!({
            "mode": mode,
            "exponent": rep.exponent,
            "slope": rep.slope,
            "growth": rep.growth,
            "sup_ratio": rep.sup_ratio,
            "max_error": rep.max_error,
        }));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let mut two_route: f64 = 0.0;
    for _ in 0..3 {
        let xi: Vec<f64> = (0..ctx.dim()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let eta: Vec<f64> = (0..kernel.curve().dim()).map(|_| rng.random_range(-0.5..=0.5)).collect();
        let k = rng.random_range(-1..=0);
        let a = dm.sigma_hat(k, &xi, &eta)?.value;
        let b = direct_converged(&kernel, &ctx, k, &xi, &eta)?;
        two_route = two_route.max((a - b).norm() / a.norm().max(b.norm()).max(1e-300));
    }
    cx.checks.push(Check::at_most("two_route_relative", two_route, 1e-6));

    let windows = WindowFamily::new(cfg.beta())?;
    let unity = log_grid(1e-6, 1e6, 1000)
        .into_iter()
        .map(|t| (windows.square_sum(t) - 1.0).abs())
        .fold(0.0, f64::max);
    cx.checks.push(Check::at_most("window_partition_of_unity", unity, 1e-10));
    if !dm.tau_signed().spectrum_resolved() {
        cx.notes.push("angular spectrum of Omega is not resolved by the surface rule".into());
    }
    Ok(json!({
        "beta": cfg.beta(),
        "q_dual": cfg.exponents.q_dual(),
        "s_dual": cfg.exponents.s_dual(),
        "epsilon0": budget.epsilon0,
        "d": budget.d,
        "b1": budget.b1(),
        "mass_bound_k": dm.mass_bound(m.k)?,
        "sweeps": reports,
        "two_route_relative": two_route,
        "window_derivative_sup": windows.derivative_sup(4000),
    }))
}

fn extrapolate(cx: &mut Ctx) -> Result<Value> {
    let cfg = cx.cfg;
    let (_, sm, kernel) = measure_setup(cfg)?;
    let e = &cfg.extrapolation;
    let omega = kernel.omega_values(&sm);
    let dec = decompose(kernel.h(), &omega, &sm, e.blocks, e.m_max)?;
    let a = cfg.exponents.a;
    let norms = block_norms(&dec, a)?;
    let sum = extrapolation_sum(&dec, a, default_base_bound)?;
    let llogl = omega_llogl(&dec, &sm);
    let c = j_series_constant(sm.total_mass());
    let sup = omega.iter().map(|v| v.abs()).fold(0.0, f64::max);
    cx.checks.push(Check::at_most("radial_reconstruction", dec.radial_reconstruction_error(200), 0.0));
    cx.checks.push(Check::at_most("angular_reconstruction", dec.omega_reconstruction_error(), 1e-12 * sup.max(1.0)));
    cx.checks.push(Check::at_most("piece_mean_zero", dec.mean_zero_defect(), 1e-12));
    let rmax = norms.radial_ratios.iter().copied().fold(0.0, f64::max);
    let amax = norms.angular_ratios.iter().copied().fold(0.0, f64::max);
    cx.checks.push(Check::at_most("radial_block_ratio", rmax, norms.radial_ceiling));
    cx.checks.push(Check::at_most("angular_block_ratio", amax, norms.angular_ceiling));
    cx.checks.push(Check::at_most("j_series_vs_llogl", sum.j_series, c * (1.0 + llogl)));
    if a > 2.0 {
        cx.checks.push(Check::holds("series_converged", sum.converged));
    }
    cx.notes.extend(sum.warnings.iter().cloned());
    cx.notes.push("aggregate is the right-hand side with absolute constants set to 1, not an operator norm".into());
    cx.csv("extrapolation_terms.csv", |w| {
        use std::io::Write;
        writeln!(w, "m,j,term")?;
        for (mi, row) in sum.terms.iter().enumerate() {
            for (ji, t) in row.iter().enumerate() {
                if *t != 0.0 {
                    writeln!(w, "{},{},{:.16e}", mi + 1, ji + 1, t)?;
                }
            }
        }
        Ok(())
    })?;
    Ok(json!({
        "norms": norms,
        "sum": {
            "total": sum.total,
            "m_series_partial": sum.m_series_partial,
            "m_series": sum.m_series,
            "m_series_terms": sum.m_series_terms,
            "m_series_tail_bound": sum.m_series_tail_bound,
            "m_series_truncation_tail": sum.m_series_truncation_tail,
            "j_series": sum.j_series,
            "split": sum.split,
            "relative_bound": sum.relative_bound,
            "converged": sum.converged,
        },
        "llogl": llogl,
        "j_series_constant": c,
        "masses": dec.masses(),
    }))
}

/// Maps an error to the process exit status: 2 for bad input, 1 otherwise.
pub fn exit_status(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::Json(_)
        | Error::InvalidInput(_)
        | Error::NonExpanding { .. }
        | Error::Domain(_)
        | Error::UnsupportedDimension(_)
        | Error::AmbiguousClustering { .. } => 2,
        _ => 1,
    }
}
