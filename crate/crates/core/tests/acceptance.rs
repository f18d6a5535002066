//! End-to-end acceptance checks. Each criterion prints one pass/fail line;
//! the test fails at the end if any criterion failed.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use aniso::dilation::{SpectralDecomposition, DEFAULT_CLUSTER_TOL};
use aniso::extrapolation::{block_norms, decompose, default_base_bound, extrapolation_sum, j_series_constant, omega_llogl};
use aniso::linalg::{euclid, real_frobenius};
use aniso::oscillatory::{
    decay_sweep, oscillatory_integral, phase_coefficients, vdc_partition, verify_partition, OscillatoryProblem,
    SweepMode, SweepSpec, Weight, Window, H_MAX,
};
use aniso::polar::SurfaceMeasure;
use aniso::quadrature::log_grid;
use aniso::quasinorm::{exponent_budget, unit_sphere_sample, QuasiNormContext};
use aniso::report::{direct_converged, run_subcommand, Command, RunConfig};
use aniso::rough::{
    verify_sigma_decay, BlockRange, Curve, DyadicMeasures, MeasureMode, MeasureSweep, OmegaSpec, RadialProfile,
    RoughKernel, TauMethod, TrigTerm, WindowFamily,
};
use aniso::SquareMatrix;

type Outcome = Result<String, String>;

fn fixed_set() -> Vec<(&'static str, SquareMatrix)> {
    let m = |rows: &[&[f64]]| SquareMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
    vec![
        ("identity", SquareMatrix::identity(2)),
        ("diag(1,2)", m(&[&[1.0, 0.0], &[0.0, 2.0]])),
        ("diag(1,2,3)", m(&[&[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 3.0]])),
        ("jordan-2", m(&[&[1.0, 1.0], &[0.0, 1.0]])),
        ("complex-pair", m(&[&[1.0, -2.0], &[2.0, 1.0]])),
    ]
}

fn rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    real_frobenius(&(a - b)) / real_frobenius(b)
}

/// `S D S^{-1}` with `D` block diagonal: separated real eigenvalues, rotation
/// blocks and occasionally a 2x2 Jordan block; real parts lie in [0.3, 3.3].
fn random_generator(rng: &mut ChaCha8Rng) -> SquareMatrix {
    let n = rng.random_range(2..=6usize);
    let mut reals: Vec<f64> = (0..11).map(|i| 0.3 + 0.3 * i as f64).collect();
    for i in (1..reals.len()).rev() {
        reals.swap(i, rng.random_range(0..=i));
    }
    let mut d = DMatrix::<f64>::zeros(n, n);
    let mut i = 0;
    while i < n {
        let re = reals.pop().unwrap();
        let room = n - i;
        match rng.random_range(0..3) {
            1 if room >= 2 => {
                let im = rng.random_range(0.5..2.5);
                d[(i, i)] = re;
                d[(i + 1, i + 1)] = re;
                d[(i, i + 1)] = -im;
                d[(i + 1, i)] = im;
                i += 2;
            }
            2 if room >= 2 => {
                d[(i, i)] = re;
                d[(i + 1, i + 1)] = re;
                d[(i, i + 1)] = rng.random_range(0.5..1.5);
                i += 2;
            }
            _ => {
                d[(i, i)] = re;
                i += 1;
            }
        }
    }
    let s = DMatrix::<f64>::identity(n, n) + DMatrix::from_fn(n, n, |_, _| rng.random_range(-0.25..0.25));
    let s_inv = s.clone().try_inverse().expect("perturbed identity is invertible");
    SquareMatrix::new(&s * d * s_inv).unwrap()
}

fn spectral_checks(p: &SquareMatrix, rng: &mut ChaCha8Rng) -> Result<(f64, f64, f64), String> {
    let sd = SpectralDecomposition::new(p, DEFAULT_CLUSTER_TOL).map_err(|e| e.to_string())?;
    let mut oracle: f64 = 0.0;
    let mut group: f64 = 0.0;
    for _ in 0..8 {
        let t = 10f64.powf(rng.random_range(-1.5..1.5));
        let u = 10f64.powf(rng.random_range(-1.5..1.5));
        let at = sd.dilation_real(t).map_err(|e| e.to_string())?;
        oracle = oracle.max(rel(&at, &(p.as_matrix() * t.ln()).exp()));
        let au = sd.dilation_real(u).map_err(|e| e.to_string())?;
        let atu = sd.dilation_real(t * u).map_err(|e| e.to_string())?;
        group = group.max(rel(&(&at * &au), &atu));
    }
    Ok((sd.residuals().max(), oracle, group))
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mats: Vec<SquareMatrix> = fixed_set().into_iter().map(|(_, m)| m).collect();
    mats.extend((0..200).map(|_| random_generator(&mut rng)));
    let (mut res, mut ora, mut grp) = (0.0f64, 0.0f64, 0.0f64);
    for p in &mats {
        let (r, o, g) = spectral_checks(p, &mut rng)?;
        res = res.max(r);
        ora = ora.max(o);
        grp = grp.max(g);
    }
    let msg = format!("{} matrices: residual {res:.1e}, exp oracle {ora:.1e}, group law {grp:.1e}", mats.len());
    if res <= 1e-7 && ora <= 1e-8 && grp <= 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut homog, mut lyap, mut trip) = (0.0f64, 0.0f64, 0.0f64);
    let mats = fixed_set();
    let per = 10_000 / mats.len();
    for (_, p) in &mats {
        let ctx = QuasiNormContext::new(p).map_err(|e| e.to_string())?;
        lyap = lyap.max(ctx.lyapunov_residual()).max(ctx.lyapunov_residual_adjoint());
        for _ in 0..per {
            let scale = 10f64.powf(rng.random_range(-2.0..2.0));
            let x: Vec<f64> = unit_sphere_sample(p.dim(), &mut rng).iter().map(|v| v * scale).collect();
            let t = 10f64.powf(rng.random_range(-3.0..3.0));
            let r = ctx.quasi_norm(&x).map_err(|e| e.to_string())?;
            let rt = ctx.quasi_norm(&ctx.dilate(t, &x).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            homog = homog.max((rt / (t * r) - 1.0).abs());
            let polar = ctx.polar_decompose(&x).map_err(|e| e.to_string())?;
            let back = ctx.dilate(polar.radius, &polar.theta).map_err(|e| e.to_string())?;
            let diff: Vec<f64> = back.iter().zip(&x).map(|(a, b)| a - b).collect();
            trip = trip.max(euclid(&diff) / euclid(&x));
        }
    }
    let msg = format!("homogeneity {homog:.1e}, Lyapunov {lyap:.1e}, polar round-trip {trip:.1e}");
    if homog <= 1e-6 && lyap <= 1e-10 && trip <= 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// `(1 + b.x + (d.x)^2) exp(-(x - c)^T M (x - c))` and its closed-form integral.
struct GaussianMoment {
    m: DMatrix<f64>,
    c: Vec<f64>,
    b: Vec<f64>,
    d: Vec<f64>,
}

impl GaussianMoment {
    fn random(n: usize, rng: &mut ChaCha8Rng) -> Self {
        let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-0.3..0.3));
        let m = (DMatrix::<f64>::identity(n, n) + &g * g.transpose()) * rng.random_range(1.0..3.0);
        let v = |rng: &mut ChaCha8Rng, s: f64| (0..n).map(|_| rng.random_range(-s..s)).collect::<Vec<_>>();
        Self {
            c: v(rng, 0.5),
            b: v(rng, 1.0),
            d: v(rng, 1.0),
            m,
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let n = x.len();
        let y: Vec<f64> = (0..n).map(|i| x[i] - self.c[i]).collect();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                q += y[i] * self.m[(i, j)] * y[j];
            }
        }
        let bx: f64 = self.b.iter().zip(x).map(|(a, b)| a * b).sum();
        let dx: f64 = self.d.iter().zip(x).map(|(a, b)| a * b).sum();
        (1.0 + bx + dx * dx) * (-q).exp()
    }

    fn exact(&self) -> f64 {
        let n = self.c.len();
        let z = PI.powf(n as f64 / 2.0) / self.m.determinant().sqrt();
        let inv = self.m.clone().try_inverse().unwrap();
        let bc: f64 = self.b.iter().zip(&self.c).map(|(a, b)| a * b).sum();
        let dc: f64 = self.d.iter().zip(&self.c).map(|(a, b)| a * b).sum();
        let mut dmd = 0.0;
        for i in 0..n {
            for j in 0..n {
                dmd += self.d[i] * inv[(i, j)] * self.d[j];
            }
        }
        z * (1.0 + bc + dc * dc + 0.5 * dmd)
    }
}

fn criterion_3() -> Outcome {
    let ctx = Arc::new(QuasiNormContext::new(&SquareMatrix::identity(2)).map_err(|e| e.to_string())?);
    let sm = SurfaceMeasure::new(ctx, 64).map_err(|e| e.to_string())?;
    let gauss = sm
        .integrate_polar(|x| (-PI * (x[0] * x[0] + x[1] * x[1])).exp(), 1e-8, 20.0, 24)
        .map_err(|e| e.to_string())?;
    let gauss_err = (gauss - 1.0).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let planar: Vec<SquareMatrix> = fixed_set().into_iter().map(|(_, m)| m).filter(|m| m.dim() == 2).collect();
    let spatial = [
        SquareMatrix::diagonal(&[1.0, 2.0, 3.0]).unwrap(),
        SquareMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.5], vec![0.0, 0.0, 1.5]]).unwrap(),
    ];
    let mut worst = [0.0f64; 2];
    for (slot, (mats, res)) in [(&planar[..], 128usize), (&spatial[..], 40)].into_iter().enumerate() {
        let measures: Vec<SurfaceMeasure> = mats
            .iter()
            .map(|p| SurfaceMeasure::new(Arc::new(QuasiNormContext::new(p).unwrap()), res).unwrap())
            .collect();
        for i in 0..20 {
            let sm = &measures[i % measures.len()];
            let f = GaussianMoment::random(sm.context().dim(), &mut rng);
            let got = sm.integrate_polar(|x| f.eval(x), 1e-8, 40.0, 24).map_err(|e| e.to_string())?;
            let want = f.exact();
            worst[slot] = worst[slot].max((got - want).abs() / want.abs());
        }
    }
    let msg = format!(
        "Gaussian {gauss_err:.1e}, Cartesian oracle n=2 {:.1e}, n=3 {:.1e}",
        worst[0], worst[1]
    );
    if gauss_err <= 1e-6 && worst[0] <= 1e-5 && worst[1] <= 1e-3 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn sweep_vectors(n: usize) -> (Vec<f64>, Vec<f64>) {
    let eta = vec![1.0; n];
    let zeta = [1.0, -0.35, 0.6][..n].to_vec();
    (eta, zeta)
}

fn sweep_all(modes: &[SweepMode]) -> Result<Vec<String>, String> {
    let mut fails = Vec::new();
    let mut rows = Vec::new();
    for (name, p) in fixed_set() {
        let sd = SpectralDecomposition::shared(&p, DEFAULT_CLUSTER_TOL).map_err(|e| e.to_string())?;
        let (eta, zeta) = sweep_vectors(p.dim());
        let spec = SweepSpec::new(eta, zeta, log_grid(1.0, 1e4, 25));
        for &mode in modes {
            let rep = decay_sweep(sd.clone(), &spec, mode).map_err(|e| format!("{name} {mode:?}: {e}"))?;
            let row = format!("{name} {mode:?} growth {:.2} slope {:.3}/{:.3}", rep.growth, rep.slope, rep.slope_limit());
            if !rep.passes(1.5) {
                fails.push(row.clone());
            }
            rows.push(row);
        }
    }
    if fails.is_empty() {
        Ok(rows)
    } else {
        Err(fails.join("; "))
    }
}

fn criterion_4() -> Outcome {
    let rows = sweep_all(&[SweepMode::PhaseHeight])?;
    // identity: int_1^2 exp(i lambda t <eta, zeta>) dt in closed form
    let sd = SpectralDecomposition::shared(&SquareMatrix::identity(2), DEFAULT_CLUSTER_TOL).map_err(|e| e.to_string())?;
    let (eta, zeta) = sweep_vectors(2);
    let pairing: f64 = eta.iter().zip(&zeta).map(|(a, b)| a * b).sum();
    let mut closed: f64 = 0.0;
    for lambda in log_grid(1.0, 1e4, 25) {
        let z: Vec<f64> = zeta.iter().map(|v| v * lambda).collect();
        let prob = OscillatoryProblem::new(sd.clone(), eta.clone(), z, 1.0, 2.0, Weight::Dt);
        let got = oscillatory_integral(&prob, 1e-12).map_err(|e| e.to_string())?.value;
        let w = lambda * pairing;
        let want = (Complex64::new(0.0, 2.0 * w).exp() - Complex64::new(0.0, w).exp()) / Complex64::new(0.0, w);
        closed = closed.max((got - want).norm());
    }
    let msg = format!("{} sweeps pass, identity closed form {closed:.1e}", rows.len());
    if closed <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_5() -> Outcome {
    let rows = sweep_all(&[SweepMode::Pairing, SweepMode::LogAverage])?;
    Ok(format!("{} sweeps pass", rows.len()))
}

fn criterion_6() -> Outcome {
    let window = Window::default();
    let interval = (window.lo.ln(), window.hi.ln());
    let mut most = 0;
    for (name, p) in fixed_set() {
        let sd = SpectralDecomposition::new(&p, DEFAULT_CLUSTER_TOL).map_err(|e| e.to_string())?;
        let (eta, zeta) = sweep_vectors(p.dim());
        let pe = phase_coefficients(&sd, &eta, &zeta).map_err(|e| e.to_string())?;
        let part = vdc_partition(&pe, interval, 64).map_err(|e| format!("{name}: {e}"))?;
        let check = verify_partition(&pe, &part, interval, 1000);
        if part.pieces.len() > H_MAX || !check.passes() {
            return Err(format!("{name}: {} pieces, {check:?}", part.pieces.len()));
        }
        most = most.max(part.pieces.len());
    }
    let rows = sweep_all(&[SweepMode::LogPhase])?;
    Ok(format!("at most {most} pieces, verified; {} sweeps pass", rows.len()))
}

fn criterion_7() -> Outcome {
    let p = SquareMatrix::diagonal(&[1.0, 2.0]).unwrap();
    let ctx = Arc::new(QuasiNormContext::new(&p).map_err(|e| e.to_string())?);
    let sm = SurfaceMeasure::new(ctx.clone(), 64).map_err(|e| e.to_string())?;
    let budget = exponent_budget(&ctx, 2.0, 2000, 7).map_err(|e| e.to_string())?;
    let omega = OmegaSpec::Trig {
        terms: vec![TrigTerm { order: 1, cos: 1.0, sin: 0.0 }, TrigTerm { order: 2, cos: 0.3, sin: 0.7 }],
    };
    let profiles = [
        ("h=1", RadialProfile::Constant(1.0)),
        ("h=steps", RadialProfile::steps(vec![1.5, 3.0], vec![1.0, -0.5, 2.0]).unwrap()),
    ];
    let curves = [("G=0", Curve::Zero, vec![]), ("G=(t,t^3)", Curve::power(vec![1.0, 3.0]).unwrap(), vec![0.3, -0.2])];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut fails = Vec::new();
    let mut two_route: f64 = 0.0;
    let mut configs = 0;
    for beta in [2.0, 8.0] {
        for (hname, h) in &profiles {
            for (cname, curve, eta) in &curves {
                let label = format!("beta={beta} {hname} {cname}");
                let kernel = RoughKernel::new(&sm, omega.build(&sm).unwrap(), h.clone(), curve.clone(), beta)
                    .map_err(|e| format!("{label}: {e}"))?;
                let dm = DyadicMeasures::new(kernel.clone(), &sm, TauMethod::Auto).map_err(|e| e.to_string())?;
                let sweep = MeasureSweep::new(vec![1.0, 0.0], eta.clone(), 2.0);
                for mode in MeasureMode::ALL {
                    let rep = verify_sigma_decay(&dm, &budget, mode, &sweep).map_err(|e| format!("{label} {mode:?}: {e}"))?;
                    if !rep.passes(1.5) {
                        fails.push(format!(
                            "{label} {mode:?} growth {:.2} slope {:.3} mass {}",
                            rep.growth, rep.slope, rep.mass_violations
                        ));
                    }
                }
                for _ in 0..2 {
                    let xi = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                    let k = rng.random_range(-1..=0);
                    let a = dm.sigma_hat(k, &xi, eta).map_err(|e| e.to_string())?.value;
                    let b = direct_converged(&kernel, &ctx, k, &xi, eta).map_err(|e| e.to_string())?;
                    two_route = two_route.max((a - b).norm() / a.norm().max(b.norm()));
                }
                configs += 1;
            }
        }
    }
    if two_route > 1e-6 {
        fails.push(format!("two-route {two_route:.1e}"));
    }
    if fails.is_empty() {
        Ok(format!("{configs} configurations x 5 modes pass, two-route {two_route:.1e}"))
    } else {
        Err(fails.join("; "))
    }
}

fn criterion_8() -> Outcome {
    let mut sups = Vec::new();
    let mut unity: f64 = 0.0;
    for beta in [2.0, 4.0, 16.0] {
        let w = WindowFamily::new(beta).map_err(|e| e.to_string())?;
        for t in log_grid(1e-6, 1e6, 1000) {
            unity = unity.max((w.square_sum(t) - 1.0).abs());
        }
        for k in -3..=3 {
            let (lo, hi) = w.support(k);
            let (blo, bhi) = w.support_bound(k);
            if lo < blo * (1.0 - 1e-12) || hi > bhi * (1.0 + 1e-12) {
                return Err(format!("beta {beta}: support of psi_{k} leaves [beta^(-k-1), beta^(-k+1)]"));
            }
            let outside = log_grid(lo * 1e-3, lo * 0.999_999, 200).into_iter().chain(log_grid(hi * 1.000_001, hi * 1e3, 200));
            if outside.into_iter().any(|t| w.psi(k, t) != 0.0) {
                return Err(format!("beta {beta}: psi_{k} nonzero outside its support"));
            }
            if !(w.psi(k, lo * 1.01) > 0.0 && w.psi(k, hi * 0.99) > 0.0) {
                return Err(format!("beta {beta}: psi_{k} vanishes inside its support"));
            }
        }
        sups.push(w.derivative_sup(20_000));
    }
    let (min, max) = sups.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &s| (a.min(s), b.max(s)));
    let spread = (max - min) / min;
    let msg = format!("sum defect {unity:.1e}, support exact, t|psi'| spread {:.2e}", spread);
    if unity <= 1e-10 && spread < 0.05 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_9() -> Outcome {
    let p = SquareMatrix::diagonal(&[1.0, 2.0]).unwrap();
    let sm = SurfaceMeasure::new(Arc::new(QuasiNormContext::new(&p).map_err(|e| e.to_string())?), 128)
        .map_err(|e| e.to_string())?;
    let omegas: [(&str, fn(f64) -> f64); 5] = [
        ("cos", |phi| phi.cos()),
        ("trig", |phi| 4.0 * phi.cos() + 9.0 * (3.0 * phi).sin()),
        ("exp", |phi| (6.0 * phi.cos()).exp()),
        ("spike", |phi| phi.sin().abs().max(1e-6).powf(-0.5)),
        ("sign", |phi| 25.0 * phi.cos().signum()),
    ];
    let h = RadialProfile::dyadic_blocks(-3, &[0.5, 3.0, 7.0, 20.0, 1.0, 300.0, 2e4]).unwrap();
    let blocks = BlockRange { first: -4, last: 4 };
    let c = j_series_constant(sm.total_mass());
    let mut worst_recon: f64 = 0.0;
    let mut worst_mean: f64 = 0.0;
    let mut fails = Vec::new();
    for (name, f) in omegas {
        let raw: Vec<f64> = sm.nodes().iter().map(|nd| f(nd.u[1].atan2(nd.u[0]))).collect();
        let mean = sm.nodes().iter().zip(&raw).map(|(nd, v)| nd.weight * v).sum::<f64>() / sm.total_mass();
        let values: Vec<f64> = raw.iter().map(|v| v - mean).collect();
        let dec = decompose(&h, &values, &sm, blocks, 50).map_err(|e| format!("{name}: {e}"))?;
        let sup = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        worst_recon = worst_recon
            .max(dec.radial_reconstruction_error(500))
            .max(dec.omega_reconstruction_error() / sup);
        worst_mean = worst_mean.max(dec.mean_zero_defect());
        let norms = block_norms(&dec, 3.0).map_err(|e| e.to_string())?;
        let rmax = norms.radial_ratios.iter().copied().fold(0.0, f64::max);
        let amax = norms.angular_ratios.iter().copied().fold(0.0, f64::max);
        if rmax > norms.radial_ceiling || amax > norms.angular_ceiling {
            fails.push(format!("{name}: ratios {rmax:.3}/{:.3}, {amax:.3}/{:.3}", norms.radial_ceiling, norms.angular_ceiling));
        }
        let three = extrapolation_sum(&dec, 3.0, default_base_bound).map_err(|e| e.to_string())?;
        if !three.converged || three.m_series.is_none() || three.m_series_tail_bound >= 1e-8 {
            fails.push(format!("{name}: a = 3 series tail {:.1e}", three.m_series_tail_bound));
        }
        let two = extrapolation_sum(&dec, 2.0, default_base_bound).map_err(|e| e.to_string())?;
        if two.converged || two.warnings.is_empty() {
            fails.push(format!("{name}: a = 2 did not warn"));
        }
        let ll = omega_llogl(&dec, &sm);
        if three.j_series > c * (1.0 + ll) {
            fails.push(format!("{name}: j-series {:.3e} > C(1 + LlogL) = {:.3e}", three.j_series, c * (1.0 + ll)));
        }
    }
    if worst_recon > 1e-12 || worst_mean > 1e-12 {
        fails.push(format!("reconstruction {worst_recon:.1e}, mean-zero {worst_mean:.1e}"));
    }
    if fails.is_empty() {
        Ok(format!(
            "5 Omegas: reconstruction {worst_recon:.1e}, mean-zero {worst_mean:.1e}, C = {c:.3}"
        ))
    } else {
        Err(fails.join("; "))
    }
}

fn criterion_10() -> Outcome {
    let base = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = RunConfig::default();
    cfg.seed = 42;
    cfg.samples.quasinorm = 500;
    cfg.measures.points_per_decade = 2;
    let mut compared = 0;
    for cmd in [Command::Dilation, Command::Quasinorm, Command::Oscillatory, Command::Measures, Command::Extrapolate] {
        let mut runs = Vec::new();
        for rep in 0..2 {
            let dir = base.path().join(format!("{}-{rep}", cmd.name()));
            let out = run_subcommand(cmd, &cfg, &dir).map_err(|e| e.to_string())?;
            let mut files = vec![out.summary_path.clone()];
            files.extend(out.summary.files.iter().map(|f| dir.join(f)));
            let bytes: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(f).unwrap()).collect();
            runs.push(bytes);
        }
        if runs[0] != runs[1] {
            return Err(format!("{} output differs between runs", cmd.name()));
        }
        compared += runs[0].len();
    }
    Ok(format!("{compared} files byte-identical across two runs"))
}

#[test]
fn acceptance() {
    // wall-clock limits in seconds; None where no limit applies
    let criteria: [(&str, fn() -> Outcome, Option<f64>); 10] = [
        ("1 spectral calculus", criterion_1, Some(30.0)),
        ("2 quasi-norm", criterion_2, Some(30.0)),
        ("3 polar identity", criterion_3, Some(120.0)),
        ("4 oscillatory decay, J envelope", criterion_4, Some(300.0)),
        ("5 oscillatory decay, pairing envelopes", criterion_5, Some(300.0)),
        ("6 phase partition", criterion_6, None),
        ("7 rough measure estimates", criterion_7, Some(600.0)),
        ("8 windows", criterion_8, None),
        ("9 extrapolation", criterion_9, Some(60.0)),
        ("10 determinism", criterion_10, None),
    ];
    let mut failed = Vec::new();
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let mut outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        if let (Ok(msg), Some(limit)) = (&outcome, limit) {
            if secs > limit {
                outcome = Err(format!("{msg}; runtime over {limit} s"));
            }
        }
        match outcome {
            Ok(msg) => println!("PASS criterion {name} ({secs:.1} s): {msg}"),
            Err(msg) => {
                println!("FAIL criterion {name} ({secs:.1} s): {msg}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
