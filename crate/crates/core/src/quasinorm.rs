//! Homogeneous quasi-norms attached to a dilation group `t^P`.
//!
//! `B` solves the Lyapunov equation `P^T B + B P = E`, so the map
//! `s -> <B A_{e^-s} x, A_{e^-s} x>` has derivative `-|A_{e^-s} x|^2` and
//! crosses 1 exactly once. The quasi-norm `r(x)` is `e^s` at that crossing.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::dilation::{SpectralDecomposition, DEFAULT_CLUSTER_TOL};
use crate::error::{Error, Result};
use crate::linalg::{euclid, inverse_sqrt_spd, mat_vec, quadratic_form, real_frobenius, SquareMatrix};

/// Smallest real part accepted for an eigenvalue of `P`.
pub const EXPANSION_THRESHOLD: f64 = 1e-8;
/// Root brackets never leave `|log t| <= 60 log 10`.
pub const LOG_BRACKET_LIMIT: f64 = 60.0 * std::f64::consts::LN_10;
const LOG_TOLERANCE: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct DilationGroup {
    matrix: SquareMatrix,
    gamma: f64,
    sd: Arc<SpectralDecomposition>,
    sd_adj: Arc<SpectralDecomposition>,
}

impl DilationGroup {
    pub fn new(p: &SquareMatrix) -> Result<Self> {
        for ev in p.eigenvalues() {
            if ev.re <= EXPANSION_THRESHOLD {
                return Err(Error::NonExpanding {
                    eigenvalue: ev,
                    threshold: EXPANSION_THRESHOLD,
                });
            }
        }
        let sd = SpectralDecomposition::shared(p, DEFAULT_CLUSTER_TOL)?;
        let sd_adj = SpectralDecomposition::shared(&p.transpose(), DEFAULT_CLUSTER_TOL)?;
        Ok(Self {
            matrix: p.clone(),
            gamma: p.trace(),
            sd,
            sd_adj,
        })
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `gamma = trace P`, the homogeneous dimension.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn spectral(&self) -> &Arc<SpectralDecomposition> {
        &self.sd
    }

    pub fn spectral_adjoint(&self) -> &Arc<SpectralDecomposition> {
        &self.sd_adj
    }

    /// Degree of the minimal polynomial of `P`.
    pub fn minimal_degree(&self) -> usize {
        self.sd.degree()
    }

    /// Smallest and largest real parts of the spectrum.
    pub fn real_part_range(&self) -> (f64, f64) {
        self.sd.clusters().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
            (lo.min(c.eigenvalue.re), hi.max(c.eigenvalue.re))
        })
    }
}

/// Solves `M^T X + X M = E` through the Kronecker form.
pub fn lyapunov(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let mt = m.transpose();
    let system = eye.kronecker(&mt) + mt.kronecker(&eye);
    let rhs = nalgebra::DVector::from_iterator(n * n, eye.iter().copied());
    let sol = system.lu().solve(&rhs).ok_or_else(|| Error::Degenerate {
        what: "Lyapunov system is singular".into(),
        residual: f64::INFINITY,
    })?;
    let x = DMatrix::from_column_slice(n, n, sol.as_slice());
    let x = (&x + x.transpose()) * 0.5;
    if x.clone().cholesky().is_none() {
        return Err(Error::Degenerate {
            what: "Lyapunov solution is not positive definite".into(),
            residual: nalgebra::SymmetricEigen::new(x).eigenvalues.min(),
        });
    }
    Ok(x)
}

/// `||M^T X + X M - E||_F`.
pub fn lyapunov_residual(m: &DMatrix<f64>, x: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    real_frobenius(&(m.transpose() * x + x * m - DMatrix::<f64>::identity(n, n)))
}

/// One homogeneous gauge: a group together with its ellipsoid matrix.
#[derive(Clone, Debug)]
pub struct Gauge {
    sd: Arc<SpectralDecomposition>,
    form: DMatrix<f64>,
    form_inv_sqrt: DMatrix<f64>,
}

impl Gauge {
    fn new(sd: Arc<SpectralDecomposition>) -> Result<Self> {
        let form = lyapunov(sd.matrix().as_matrix())?;
        let form_inv_sqrt = inverse_sqrt_spd(&form)?;
        Ok(Self {
            sd,
            form,
            form_inv_sqrt,
        })
    }

    pub fn form(&self) -> &DMatrix<f64> {
        &self.form
    }

    /// `B^{-1/2}`, mapping the unit sphere onto the ellipsoid.
    pub fn form_inv_sqrt(&self) -> &DMatrix<f64> {
        &self.form_inv_sqrt
    }

    pub fn spectral(&self) -> &Arc<SpectralDecomposition> {
        &self.sd
    }

    pub fn level(&self, x: &[f64]) -> f64 {
        quadratic_form(&self.form, x)
    }

    /// Solves `<B A_{e^-s} x, A_{e^-s} x> = 1` for `s`; `x` must be nonzero.
    fn log_norm(&self, x: &[f64]) -> Result<f64> {
        let orbit = self.sd.orbit(x);
        let mut buf = vec![0.0; x.len()];
        let mut excess = |s: f64| {
            orbit.eval_log_into(-s, &mut buf);
            quadratic_form(&self.form, &buf) - 1.0
        };
        let q0 = self.level(x);
        let spread = self.sd.matrix().trace() / x.len() as f64;
        let guess = (0.5 * q0.ln() / spread.max(1e-3)).clamp(-LOG_BRACKET_LIMIT, LOG_BRACKET_LIMIT);
        let point = || x.to_vec();
        let f_guess = excess(guess);
        if f_guess == 0.0 {
            return Ok(guess);
        }
        // expand the bracket geometrically away from the guess
        let dir = if f_guess > 0.0 { 1.0 } else { -1.0 };
        let mut near = guess;
        let mut step = 0.5;
        let far = loop {
            let cand = guess + dir * step;
            if cand.abs() > LOG_BRACKET_LIMIT {
                let edge = dir * LOG_BRACKET_LIMIT;
                if (excess(edge) > 0.0) == (f_guess > 0.0) {
                    return Err(Error::BracketOverflow { point: point() });
                }
                break edge;
            }
            let fc = excess(cand);
            if !fc.is_finite() {
                return Err(Error::NonFinite {
                    location: vec![cand],
                });
            }
            if (fc > 0.0) != (f_guess > 0.0) || fc == 0.0 {
                break cand;
            }
            near = cand;
            step *= 2.0;
        };
        let (mut lo, mut hi) = if dir > 0.0 { (near, far) } else { (far, near) };
        // excess(lo) > 0 > excess(hi)
        while hi - lo > LOG_TOLERANCE * (1.0 + lo.abs().max(hi.abs())) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if excess(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        if x.iter().all(|&v| v == 0.0) {
            return Ok(0.0);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                location: x.to_vec(),
            });
        }
        Ok(self.log_norm(x)?.exp())
    }

    pub fn polar(&self, x: &[f64]) -> Result<Polar> {
        if x.iter().all(|&v| v == 0.0) {
            return Err(Error::Domain("polar decomposition of the zero vector".into()));
        }
        let s = self.log_norm(x)?;
        let theta = self.sd.orbit(x).eval_log(-s);
        Ok(Polar {
            radius: s.exp(),
            theta,
        })
    }

    /// `A_t x` (or `B_t x` for the adjoint gauge).
    pub fn dilate(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("dilation parameter t = {t} must be positive")));
        }
        Ok(self.sd.orbit(x).eval_log(t.ln()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polar {
    pub radius: f64,
    pub theta: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct QuasiNormContext {
    group: DilationGroup,
    primal: Gauge,
    adjoint: Gauge,
}

pub fn build_context(p: &SquareMatrix) -> Result<QuasiNormContext> {
    QuasiNormContext::new(p)
}

impl QuasiNormContext {
    pub fn new(p: &SquareMatrix) -> Result<Self> {
        let group = DilationGroup::new(p)?;
        let primal = Gauge::new(group.sd.clone())?;
        let adjoint = Gauge::new(group.sd_adj.clone())?;
        Ok(Self {
            group,
            primal,
            adjoint,
        })
    }

    pub fn group(&self) -> &DilationGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.group.dim()
    }

    pub fn gamma(&self) -> f64 {
        self.group.gamma
    }

    pub fn primal(&self) -> &Gauge {
        &self.primal
    }

    pub fn adjoint(&self) -> &Gauge {
        &self.adjoint
    }

    pub fn form(&self) -> &DMatrix<f64> {
        &self.primal.form
    }

    pub fn form_adjoint(&self) -> &DMatrix<f64> {
        &self.adjoint.form
    }

    pub fn lyapunov_residual(&self) -> f64 {
        lyapunov_residual(self.group.matrix.as_matrix(), &self.primal.form)
    }

    pub fn lyapunov_residual_adjoint(&self) -> f64 {
        lyapunov_residual(&self.group.matrix.as_matrix().transpose(), &self.adjoint.form)
    }

    pub fn quasi_norm(&self, x: &[f64]) -> Result<f64> {
        self.primal.norm(x)
    }

    pub fn adjoint_norm(&self, xi: &[f64]) -> Result<f64> {
        self.adjoint.norm(xi)
    }

    pub fn polar_decompose(&self, x: &[f64]) -> Result<Polar> {
        self.primal.polar(x)
    }

    pub fn dilate(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        self.primal.dilate(t, x)
    }

    pub fn dilate_adjoint(&self, t: f64, xi: &[f64]) -> Result<Vec<f64>> {
        self.adjoint.dilate(t, xi)
    }

    pub fn snapshot(&self) -> ContextSnapshot {
        ContextSnapshot {
            p: self.group.matrix.rows(),
            b: rows_of(&self.primal.form),
            b_adjoint: rows_of(&self.adjoint.form),
            gamma: self.group.gamma,
            minimal_degree: self.group.minimal_degree(),
            eigenvalues: self.group.sd.clusters().iter().map(|c| c.eigenvalue).collect(),
        }
    }
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ContextSnapshot {
    pub p: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub b_adjoint: Vec<Vec<f64>>,
    pub gamma: f64,
    pub minimal_degree: usize,
    pub eigenvalues: Vec<Complex64>,
}

/// Uniform sample on the ellipsoid `<B theta, theta> = 1`.
pub fn sample_on_ellipsoid<R: Rng>(gauge: &Gauge, rng: &mut R) -> Vec<f64> {
    let n = gauge.form.nrows();
    let u = unit_sphere_sample(n, rng);
    mat_vec(&gauge.form_inv_sqrt, &u)
}

pub fn unit_sphere_sample<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let len = euclid(&g);
        if len > 1e-12 {
            return g.into_iter().map(|v| v / len).collect();
        }
    }
}

/// Two-sided power envelopes for one gauge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Envelope {
    /// Lower exponent above the unit level set (`alpha_1`, `a_1`).
    pub outer_lower: f64,
    /// Upper exponent above the unit level set (`alpha_2`, `a_2`).
    pub outer_upper: f64,
    /// Lower exponent inside the unit level set (`beta_1`, `b_1`).
    pub inner_lower: f64,
    /// Upper exponent inside the unit level set (`beta_2`, `b_2`).
    pub inner_upper: f64,
    /// Constants `c_1..c_4` (or `d_1..d_4`).
    pub constants: [f64; 4],
}

impl Envelope {
    fn seeded(lambda_min: f64, lambda_max: f64, delta: f64) -> Self {
        Self {
            outer_lower: 1.0 / (lambda_max + delta),
            outer_upper: 1.0 / (lambda_min - delta),
            inner_lower: 1.0 / (lambda_min - delta),
            inner_upper: 1.0 / (lambda_max + delta),
            constants: [f64::INFINITY, 0.0, f64::INFINITY, 0.0],
        }
    }

    fn absorb(&mut self, norm: f64, len: f64) {
        let c = &mut self.constants;
        if norm >= 1.0 {
            c[0] = c[0].min(norm / len.powf(self.outer_lower));
            c[1] = c[1].max(norm / len.powf(self.outer_upper));
        }
        if norm <= 1.0 {
            c[2] = c[2].min(norm / len.powf(self.inner_lower));
            c[3] = c[3].max(norm / len.powf(self.inner_upper));
        }
    }

    fn with_margin(mut self, margin: f64) -> Self {
        self.constants[0] /= margin;
        self.constants[1] *= margin;
        self.constants[2] /= margin;
        self.constants[3] *= margin;
        self
    }

    /// Whether `norm` at Euclidean length `len` satisfies the strict envelope.
    pub fn holds(&self, norm: f64, len: f64) -> bool {
        let c = &self.constants;
        let mut ok = true;
        if norm >= 1.0 {
            ok &= c[0] * len.powf(self.outer_lower) < norm && norm < c[1] * len.powf(self.outer_upper);
        }
        if norm <= 1.0 {
            ok &= c[2] * len.powf(self.inner_lower) < norm && norm < c[3] * len.powf(self.inner_upper);
        }
        ok
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentBudget {
    pub primal: Envelope,
    pub adjoint: Envelope,
    pub delta: f64,
    /// `d = b_1 / alpha_1`.
    pub d: f64,
    pub epsilon0: f64,
    pub q_dual: f64,
    pub minimal_degree: usize,
    pub samples: usize,
}

impl ExponentBudget {
    pub fn alpha1(&self) -> f64 {
        self.primal.outer_lower
    }
    pub fn alpha2(&self) -> f64 {
        self.primal.outer_upper
    }
    pub fn beta1(&self) -> f64 {
        self.primal.inner_lower
    }
    pub fn beta2(&self) -> f64 {
        self.primal.inner_upper
    }
    pub fn a1(&self) -> f64 {
        self.adjoint.outer_lower
    }
    pub fn a2(&self) -> f64 {
        self.adjoint.outer_upper
    }
    pub fn b1(&self) -> f64 {
        self.adjoint.inner_lower
    }
    pub fn b2(&self) -> f64 {
        self.adjoint.inner_upper
    }
}

/// Range of `log10 t` used when sampling dilated points.
const SAMPLE_LOG10_RANGE: f64 = 3.0;
const CONSTANT_MARGIN: f64 = 1.1;

/// Fits and validates the growth envelopes of `r` and `s`.
pub fn exponent_budget(
    ctx: &QuasiNormContext,
    q_dual: f64,
    sample_count: usize,
    seed: u64,
) -> Result<ExponentBudget> {
    if !(q_dual > 1.0) || !q_dual.is_finite() {
        return Err(Error::InvalidInput(format!("dual exponent q' = {q_dual} must exceed 1")));
    }
    if sample_count == 0 {
        return Err(Error::InvalidInput("exponent budget needs samples".into()));
    }
    let (lambda_min, lambda_max) = ctx.group.real_part_range();
    let delta = 0.01 * lambda_min;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let fit = |gauge: &Gauge, rng: &mut ChaCha8Rng| -> Result<Envelope> {
        let mut env = Envelope::seeded(lambda_min, lambda_max, delta);
        for k in 0..sample_count {
            let theta = sample_on_ellipsoid(gauge, rng);
            let t = if k % 16 == 0 {
                1.0
            } else {
                10f64.powf(rng.random_range(-SAMPLE_LOG10_RANGE..=SAMPLE_LOG10_RANGE))
            };
            let x = gauge.dilate(t, &theta)?;
            env.absorb(t, euclid(&x));
        }
        Ok(env.with_margin(CONSTANT_MARGIN))
    };
    let primal = fit(&ctx.primal, &mut rng)?;
    let adjoint = fit(&ctx.adjoint, &mut rng)?;

    // independent validation with norms recomputed by root finding
    for (gauge, env, name) in [(&ctx.primal, &primal, "r"), (&ctx.adjoint, &adjoint, "s")] {
        for _ in 0..sample_count {
            let theta = sample_on_ellipsoid(gauge, &mut rng);
            let t = 10f64.powf(rng.random_range(-SAMPLE_LOG10_RANGE..=SAMPLE_LOG10_RANGE));
            let x = gauge.dilate(t, &theta)?;
            let norm = gauge.norm(&x)?;
            if !env.holds(norm, euclid(&x)) {
                return Err(Error::ExponentSlack(format!(
                    "envelope for {name} fails at |x| = {:.6e}, norm = {norm:.6e}; increase delta beyond {delta:.3e}",
                    euclid(&x)
                )));
            }
        }
    }

    let minimal_degree = ctx.group.minimal_degree();
    let epsilon0 = 0.5 / adjoint.outer_upper * (0.5f64).min(q_dual / minimal_degree as f64);
    Ok(ExponentBudget {
        d: adjoint.inner_lower / primal.outer_lower,
        primal,
        adjoint,
        delta,
        epsilon0,
        q_dual,
        minimal_degree,
        samples: sample_count,
    })
}

/// Empirical `sup r(x+y) / (r(x) + r(y))` over seeded random pairs.
pub fn quasi_triangle_constant(ctx: &QuasiNormContext, pairs: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sup: f64 = 0.0;
    for _ in 0..pairs {
        let draw = |rng: &mut ChaCha8Rng| -> Result<Vec<f64>> {
            let theta = sample_on_ellipsoid(&ctx.primal, rng);
            let t = 10f64.powf(rng.random_range(-2.0..=2.0));
            ctx.dilate(t, &theta)
        };
        let x = draw(&mut rng)?;
        let y = draw(&mut rng)?;
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let denom = ctx.quasi_norm(&x)? + ctx.quasi_norm(&y)?;
        sup = sup.max(ctx.quasi_norm(&sum)? / denom);
    }
    Ok(sup)
}
