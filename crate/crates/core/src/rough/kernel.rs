//! Rough kernels `K(y) = h(r(y)) Omega(y') r(y)^{-gamma}` and the Fourier
//! transforms of their dyadic pieces.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::profile::{delta_norm, BlockRange, Curve, RadialProfile};
use super::tau::{TauEvaluator, TauMethod};
use crate::dilation::Orbit;
use crate::error::{Error, Result};
use crate::linalg::{dot, mat_vec};
use crate::polar::{SurfaceFn, SurfaceMeasure};
use crate::quadrature::{adaptive_gk15, GaussRule};
use crate::quasinorm::QuasiNormContext;

/// Node budget for one dyadic transform.
pub const MAX_EVALUATIONS: usize = 10_000_000;
/// Mean of `Omega` accepted as zero, relative to `||Omega||_1`.
pub const MEAN_ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub order: u32,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coef: f64,
    pub powers: Vec<u32>,
}

/// How `Omega` is specified in kernel files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OmegaSpec {
    /// `sum cos_k cos(k phi) + sin_k sin(k phi)` with `phi` the angle of the
    /// sphere preimage `u`; plane only.
    Trig { terms: Vec<TrigTerm> },
    /// Polynomial in the coordinates of `u`.
    Polynomial { terms: Vec<Monomial> },
    /// Values at the surface nodes, extended by nearest node.
    Samples { values: Vec<f64> },
}

fn sqrt_spd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).sqrt()));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

impl OmegaSpec {
    /// Builds `Omega` as a function of `theta in Sigma`.
    pub fn build(&self, sm: &SurfaceMeasure) -> Result<SurfaceFn> {
        let n = sm.context().dim();
        let root = sqrt_spd(sm.context().form());
        match self {
            Self::Trig { terms } => {
                if n != 2 {
                    return Err(Error::InvalidInput("trigonometric Omega needs n = 2".into()));
                }
                let terms = terms.clone();
                Ok(Arc::new(move |th: &[f64]| {
                    let u = mat_vec(&root, th);
                    let phi = u[1].atan2(u[0]);
                    terms
                        .iter()
                        .map(|t| {
                            let a = t.order as f64 * phi;
                            t.cos * a.cos() + t.sin * a.sin()
                        })
                        .sum()
                }))
            }
            Self::Polynomial { terms } => {
                if terms.iter().any(|m| m.powers.len() != n) {
                    return Err(Error::InvalidInput(format!("monomial powers must have length {n}")));
                }
                let terms = terms.clone();
                Ok(Arc::new(move |th: &[f64]| {
                    let u = mat_vec(&root, th);
                    let len = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                    terms
                        .iter()
                        .map(|m| {
                            m.coef
                                * m.powers
                                    .iter()
                                    .zip(&u)
                                    .map(|(&p, &x)| (x / len).powi(p as i32))
                                    .product::<f64>()
                        })
                        .sum()
                }))
            }
            Self::Samples { values } => {
                if values.len() != sm.nodes().len() {
                    return Err(Error::InvalidInput(format!(
                        "{} Omega samples for {} surface nodes",
                        values.len(),
                        sm.nodes().len()
                    )));
                }
                let pts: Vec<(Vec<f64>, f64)> =
                    sm.nodes().iter().zip(values).map(|(nd, v)| (nd.u.clone(), *v)).collect();
                Ok(Arc::new(move |th: &[f64]| {
                    let u = mat_vec(&root, th);
                    let len = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                    pts.iter()
                        .map(|(p, v)| (dot(p, &u) / len, *v))
                        .max_by(|a, b| a.0.total_cmp(&b.0))
                        .map(|(_, v)| v)
                        .unwrap_or(0.0)
                }))
            }
        }
    }
}

#[derive(Clone)]
pub struct RoughKernel {
    omega: SurfaceFn,
    h: RadialProfile,
    curve: Curve,
    beta: f64,
}

impl std::fmt::Debug for RoughKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RoughKernel")
            .field("h", &self.h)
            .field("curve", &self.curve)
            .field("beta", &self.beta)
            .finish_non_exhaustive()
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 2.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("dyadic base must be >= 2, got {beta}")));
    }
    Ok(())
}

impl RoughKernel {
    /// Projects `omega` to mean zero on `sm`.
    pub fn new(sm: &SurfaceMeasure, omega: SurfaceFn, h: RadialProfile, curve: Curve, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self {
            omega: sm.mean_zero_project(omega),
            h,
            curve,
            beta,
        })
    }

    /// Keeps `omega` as given; used for total-mass checks.
    pub fn unprojected(omega: SurfaceFn, h: RadialProfile, curve: Curve, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self { omega, h, curve, beta })
    }

    pub fn omega(&self) -> &SurfaceFn {
        &self.omega
    }

    pub fn h(&self) -> &RadialProfile {
        &self.h
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn omega_values(&self, sm: &SurfaceMeasure) -> Vec<f64> {
        sm.nodes().iter().map(|nd| (self.omega)(&nd.theta)).collect()
    }

    /// `(int Omega dsigma) / ||Omega||_1`.
    pub fn mean_residual(&self, sm: &SurfaceMeasure) -> f64 {
        let v = self.omega_values(sm);
        let l1 = omega_norm(sm, &v, 1.0);
        let mean: f64 = sm.nodes().iter().zip(&v).map(|(nd, x)| nd.weight * x).sum();
        if l1 > 0.0 {
            mean.abs() / l1
        } else {
            0.0
        }
    }

    /// `[k log beta, (k+1) log beta]`.
    pub fn log_block(&self, k: i32) -> (f64, f64) {
        let lb = self.beta.ln();
        (k as f64 * lb, (k + 1) as f64 * lb)
    }

    /// `int_{beta^k}^{beta^{k+1}} K(y) dy` direction-free: `||Omega||_1 int |h| dr/r`.
    pub fn block_mass(&self, sm: &SurfaceMeasure, k: i32) -> f64 {
        let (lo, hi) = self.log_block(k);
        omega_norm(sm, &self.omega_values(sm), 1.0) * self.h.log_integral(lo, hi, |v| v)
    }

    /// `(log_2 beta + 2) ||Omega||_1 ||h||_{Delta_1}`, the mass bound with its
    /// logarithmic constant made explicit. The `Delta_1` supremum runs over the
    /// dyadic blocks meeting the `k`-th `beta`-block.
    pub fn mass_bound(&self, sm: &SurfaceMeasure, k: i32) -> Result<f64> {
        self.mass_bound_with(omega_norm(sm, &self.omega_values(sm), 1.0), k)
    }

    fn mass_bound_with(&self, omega_l1: f64, k: i32) -> Result<f64> {
        let lb2 = self.beta.log2();
        let blocks = BlockRange {
            first: (k as f64 * lb2).floor() as i32,
            last: ((k + 1) as f64 * lb2).ceil() as i32,
        };
        Ok((lb2 + 2.0) * omega_l1 * delta_norm(&self.h, 1.0, blocks)?)
    }
}

/// `(int |Omega|^q dsigma)^{1/q}` from node values.
pub fn omega_norm(sm: &SurfaceMeasure, values: &[f64], q: f64) -> f64 {
    sm.nodes()
        .iter()
        .zip(values)
        .map(|(nd, v)| nd.weight * v.abs().powf(q))
        .sum::<f64>()
        .powf(1.0 / q)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasureValue {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
    /// Sphere-transform evaluations whose phase outran the node spacing.
    pub unresolved: usize,
}

/// The dyadic measures `sigma_k` (signed kernel) and `mu_k` (its modulus) of a
/// kernel, ready for Fourier evaluation.
#[derive(Clone, Debug)]
pub struct DyadicMeasures {
    kernel: RoughKernel,
    ctx: Arc<QuasiNormContext>,
    signed: TauEvaluator,
    modulus: TauEvaluator,
    /// `max |theta|` over `Sigma`.
    reach: f64,
    omega_l1: f64,
    tol: f64,
}

/// Pre-pass segments per block.
const PREPASS_SEGMENTS: usize = 64;
const PREPASS_SAMPLES: usize = 9;
/// Phase change allowed per initial panel, in radians.
const PANEL_PHASE: f64 = 2.0;

impl DyadicMeasures {
    pub fn new(kernel: RoughKernel, sm: &SurfaceMeasure, method: TauMethod) -> Result<Self> {
        let values = kernel.omega_values(sm);
        let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
        let signed = TauEvaluator::new(sm, &values, method)?;
        let modulus = TauEvaluator::new(sm, &abs, method)?;
        let reach = sm
            .nodes()
            .iter()
            .map(|nd| nd.theta.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
            * 1.05;
        Ok(Self {
            omega_l1: omega_norm(sm, &values, 1.0),
            kernel,
            ctx: sm.context().clone(),
            signed,
            modulus,
            reach,
            tol: 1e-10,
        })
    }

    /// Relative quadrature tolerance; default `1e-10`.
    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol >= 1e-14) {
            return Err(Error::InvalidInput(format!("tolerance {tol} below 1e-14")));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn kernel(&self) -> &RoughKernel {
        &self.kernel
    }

    pub fn context(&self) -> &Arc<QuasiNormContext> {
        &self.ctx
    }

    pub fn omega_l1(&self) -> f64 {
        self.omega_l1
    }

    /// See [`RoughKernel::mass_bound`].
    pub fn mass_bound(&self, k: i32) -> Result<f64> {
        self.kernel.mass_bound_with(self.omega_l1, k)
    }

    pub fn tau_signed(&self) -> &TauEvaluator {
        &self.signed
    }

    pub fn tau_modulus(&self) -> &TauEvaluator {
        &self.modulus
    }

    fn adjoint_orbit(&self, xi: &[f64]) -> Orbit {
        self.ctx.group().spectral_adjoint().orbit(xi)
    }

    /// Initial panels in `u = log r` sized so the phase moves at most
    /// `PANEL_PHASE` radians across each.
    fn panels(&self, k: i32, orbit: &Orbit, eta: &[f64], phase_factor: f64) -> Vec<(f64, f64)> {
        let (lo, hi) = self.kernel.log_block(k);
        let pt = self.ctx.group().matrix().as_matrix().transpose();
        let rate = |u: f64| {
            let xu = orbit.eval_log(u);
            let v = mat_vec(&pt, &xu);
            let speed = v.iter().map(|x| x * x).sum::<f64>().sqrt() * self.reach;
            2.0 * PI * phase_factor * (speed + self.kernel.curve.log_rate(u.exp(), eta))
        };
        let mut cuts: Vec<f64> = self
            .kernel
            .h
            .breakpoints()
            .iter()
            .map(|b| b.ln())
            .filter(|&u| u > lo && u < hi)
            .collect();
        let seg = (hi - lo) / PREPASS_SEGMENTS as f64;
        for s in 0..PREPASS_SEGMENTS {
            let a = lo + seg * s as f64;
            let peak = (0..PREPASS_SAMPLES)
                .map(|i| rate(a + seg * i as f64 / (PREPASS_SAMPLES - 1) as f64))
                .fold(0.0, f64::max);
            let pieces = ((peak * seg / PANEL_PHASE).ceil() as usize).max(1);
            for p in 0..pieces {
                cuts.push(a + seg * p as f64 / pieces as f64);
            }
        }
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| b > a).collect()
    }

    fn radial<F>(&self, k: i32, xi: &[f64], eta: &[f64], phase_factor: f64, scale: f64, mut f: F) -> Result<MeasureValue>
    where
        F: FnMut(f64, &[f64]) -> (Complex64, bool),
    {
        if eta.len() != self.kernel.curve.dim() {
            return Err(Error::InvalidInput(format!(
                "eta has length {}, curve dimension is {}",
                eta.len(),
                self.kernel.curve.dim()
            )));
        }
        if xi.len() != self.ctx.dim() {
            return Err(Error::InvalidInput(format!("xi must have length {}", self.ctx.dim())));
        }
        let orbit = self.adjoint_orbit(xi);
        let panels = self.panels(k, &orbit, eta, phase_factor);
        let mut unresolved = 0;
        let mut buf = vec![0.0; xi.len()];
        let mut bad = None;
        let r = adaptive_gk15(
            |u| {
                orbit.eval_log_into(u, &mut buf);
                let (v, ok) = f(u, &buf);
                if !ok {
                    unresolved += 1;
                }
                if !(v.re.is_finite() && v.im.is_finite()) && bad.is_none() {
                    bad = Some(u);
                }
                v
            },
            &panels,
            (self.tol * scale).max(1e-300),
            MAX_EVALUATIONS,
        )?;
        if let Some(u) = bad {
            return Err(Error::NonFinite { location: vec![u.exp()] });
        }
        Ok(MeasureValue {
            value: r.value,
            error: r.error,
            evaluations: r.evaluations,
            unresolved,
        })
    }

    fn curve_phase(&self, u: f64, eta: &[f64]) -> Complex64 {
        let p = -2.0 * PI * self.kernel.curve.pairing(u.exp(), eta);
        Complex64::new(p.cos(), p.sin())
    }

    /// `sigma_k^(xi, eta) = int_{beta^k}^{beta^{k+1}} e^{-2 pi i <Gamma(r), eta>} h(r) tau(B_r xi) dr/r`.
    pub fn sigma_hat(&self, k: i32, xi: &[f64], eta: &[f64]) -> Result<MeasureValue> {
        let scale = self.kernel.block_mass_hint(k, self.omega_l1);
        self.radial(k, xi, eta, 1.0, scale, |u, bxi| {
            let t = self.signed.eval(bxi);
            (self.curve_phase(u, eta) * self.kernel.h.eval(u.exp()) * t.value, t.resolved)
        })
    }

    /// As `sigma_hat` with `|h|` and `|Omega|`.
    pub fn mu_hat(&self, k: i32, xi: &[f64], eta: &[f64]) -> Result<MeasureValue> {
        let scale = self.kernel.block_mass_hint(k, self.omega_l1);
        self.radial(k, xi, eta, 1.0, scale, |u, bxi| {
            let t = self.modulus.eval(bxi);
            (self.curve_phase(u, eta) * self.kernel.h.abs(u.exp()) * t.value, t.resolved)
        })
    }

    /// `mu_k^(xi, eta) - mu_k^(0, eta)`, integrated as one quantity so small
    /// `xi` loses no digits.
    pub fn mu_hat_increment(&self, k: i32, xi: &[f64], eta: &[f64]) -> Result<MeasureValue> {
        let scale = self.kernel.block_mass_hint(k, self.omega_l1);
        self.radial(k, xi, eta, 1.0, scale, |u, bxi| {
            let t = self.modulus.eval_increment(bxi);
            (self.curve_phase(u, eta) * self.kernel.h.abs(u.exp()) * t.value, t.resolved)
        })
    }

    /// `int_{beta^k}^{beta^{k+1}} |tau(B_r xi)|^2 dr/r`.
    pub fn square_average(&self, k: i32, xi: &[f64]) -> Result<MeasureValue> {
        let scale = self.omega_l1 * self.omega_l1 * self.kernel.beta.ln();
        let eta = vec![0.0; self.kernel.curve.dim()];
        self.radial(k, xi, &eta, 2.0, scale, |_, bxi| {
            let t = self.signed.eval(bxi);
            (Complex64::new(t.value.norm_sqr(), 0.0), t.resolved)
        })
    }
}

impl RoughKernel {
    fn block_mass_hint(&self, k: i32, omega_l1: f64) -> f64 {
        let (lo, hi) = self.log_block(k);
        let m = omega_l1 * self.h.log_integral(lo, hi, |v| v);
        if m > 0.0 {
            m
        } else {
            omega_l1.max(1e-300)
        }
    }
}

/// `sigma_k^` from its defining integral over `{beta^k < r(y) <= beta^{k+1}}`,
/// in polar coordinates `y = r^P theta` with a linear radial rule and the
/// phase taken from the orbit itself, so the factorisation through the
/// sphere transform is not used.
pub fn sigma_hat_direct(
    kernel: &RoughKernel,
    sm: &SurfaceMeasure,
    k: i32,
    xi: &[f64],
    eta: &[f64],
    order: usize,
) -> Result<Complex64> {
    let ctx = sm.context();
    let (lo, hi) = (kernel.beta.powi(k), kernel.beta.powi(k + 1));
    let rule = GaussRule::new(order.max(4));
    let xi_len = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    let eta_abs: Vec<f64> = eta.iter().map(|v| v.abs()).collect();
    let mut breaks: Vec<f64> = vec![lo];
    breaks.extend(kernel.h.breakpoints().iter().copied().filter(|&b| b > lo && b < hi));
    breaks.push(hi);
    let mut acc = Complex64::new(0.0, 0.0);
    for nd in sm.nodes() {
        let orbit = ctx.group().spectral().orbit(&nd.theta);
        let top = orbit.eval(hi);
        let swing = 2.0 * PI * (xi_len * top.iter().map(|v| v * v).sum::<f64>().sqrt() + kernel.curve.pairing(hi, &eta_abs));
        let panels = ((swing / 4.0).ceil() as usize).clamp(2, 4096);
        let omega = (kernel.omega)(&nd.theta);
        let mut part = Complex64::new(0.0, 0.0);
        for w in breaks.windows(2) {
            let step = (w[1] - w[0]) / panels as f64;
            for p in 0..panels {
                let a = w[0] + step * p as f64;
                for (r, wr) in rule.mapped(a, a + step) {
                    let y = orbit.eval(r);
                    let phase = -2.0 * PI * (dot(&y, xi) + kernel.curve.pairing(r, eta));
                    part += Complex64::new(phase.cos(), phase.sin()) * kernel.h.eval(r) * (wr / r);
                }
            }
        }
        acc += part * omega * nd.weight;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SquareMatrix;

    fn measure(rows: &[&[f64]], res: usize) -> SurfaceMeasure {
        let m = SquareMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
        SurfaceMeasure::new(Arc::new(QuasiNormContext::new(&m).unwrap()), res).unwrap()
    }

    fn trig(sm: &SurfaceMeasure) -> SurfaceFn {
        OmegaSpec::Trig {
            terms: vec![
                TrigTerm { order: 1, cos: 1.0, sin: 0.0 },
                TrigTerm { order: 3, cos: 0.0, sin: 0.5 },
            ],
        }
        .build(sm)
        .unwrap()
    }

    #[test]
    fn mean_zero_kernel_vanishes_at_origin() {
        let sm = measure(&[&[1.0, 0.0], &[0.0, 2.0]], 64);
        let omega = Arc::new(|th: &[f64]| 1.0 + th[0] * th[0]) as SurfaceFn;
        let kern = RoughKernel::new(&sm, omega, RadialProfile::Constant(1.0), Curve::Zero, 2.0).unwrap();
        assert!(kern.mean_residual(&sm) < MEAN_ZERO_TOL);
        let dm = DyadicMeasures::new(kern, &sm, TauMethod::Auto).unwrap();
        assert!(dm.sigma_hat(0, &[0.0, 0.0], &[]).unwrap().value.norm() < 1e-13);
        assert!(dm.square_average(0, &[0.0, 0.0]).unwrap().value.norm() < 1e-25);
    }

    #[test]
    fn total_masses() {
        let sm = measure(&[&[1.0, 0.0], &[0.0, 2.0]], 64);
        let beta: f64 = 8.0;
        let one = RoughKernel::unprojected(Arc::new(|_: &[f64]| 1.0), RadialProfile::Constant(1.0), Curve::Zero, beta).unwrap();
        let dm = DyadicMeasures::new(one, &sm, TauMethod::Auto).unwrap();
        let l1 = dm.square_average(2, &[0.0, 0.0]).unwrap().value.re;
        assert!((l1 - sm.total_mass().powi(2) * beta.ln()).abs() < 1e-10 * l1);

        // |Omega| = 1 with mean zero: a sign pattern symmetric under theta -> -theta
        let sign = RoughKernel::new(
            &sm,
            Arc::new(|th: &[f64]| if th[0] >= 0.0 { 1.0 } else { -1.0 }),
            RadialProfile::Constant(1.0),
            Curve::Zero,
            beta,
        )
        .unwrap();
        let dm = DyadicMeasures::new(sign, &sm, TauMethod::Auto).unwrap();
        let mu = dm.mu_hat(-1, &[0.0, 0.0], &[]).unwrap().value;
        assert!((mu.re - sm.total_mass() * beta.ln()).abs() < 1e-10 * mu.re);
        assert!(mu.im.abs() < 1e-14);
    }

    #[test]
    fn two_routes_agree() {
        let sm = measure(&[&[1.0, 0.0], &[0.0, 2.0]], 64);
        let kern = RoughKernel::new(&sm, trig(&sm), RadialProfile::Constant(1.0), Curve::power(vec![1.0, 3.0]).unwrap(), 2.0).unwrap();
        let dm = DyadicMeasures::new(kern.clone(), &sm, TauMethod::Auto).unwrap();
        let fine = measure(&[&[1.0, 0.0], &[0.0, 2.0]], 256);
        for (k, xi, eta) in [(0, [0.7, -0.4], [0.3, 0.1]), (-1, [2.0, 1.5], [0.0, -0.5])] {
            let a = dm.sigma_hat(k, &xi, &eta).unwrap().value;
            let b = sigma_hat_direct(&kern, &fine, k, &xi, &eta, 16).unwrap();
            assert!((a - b).norm() <= 1e-6 * a.norm().max(1e-3), "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn increment_matches_difference() {
        let sm = measure(&[&[1.0, 1.0], &[0.0, 1.0]], 64);
        let kern = RoughKernel::new(&sm, trig(&sm), RadialProfile::Constant(1.0), Curve::Zero, 2.0).unwrap();
        let dm = DyadicMeasures::new(kern, &sm, TauMethod::Auto).unwrap();
        let xi = [0.3, 0.2];
        let d = dm.mu_hat_increment(0, &xi, &[]).unwrap().value;
        let full = dm.mu_hat(0, &xi, &[]).unwrap().value - dm.mu_hat(0, &[0.0, 0.0], &[]).unwrap().value;
        assert!((d - full).norm() < 1e-10);
    }

    #[test]
    fn mass_bound_dominates() {
        let sm = measure(&[&[1.0, 0.0], &[0.0, 2.0]], 64);
        let h = RadialProfile::steps(vec![1.5, 3.0], vec![1.0, 4.0, 0.5]).unwrap();
        let kern = RoughKernel::new(&sm, trig(&sm), h, Curve::Zero, 8.0).unwrap();
        let bound = kern.mass_bound(&sm, 0).unwrap();
        let dm = DyadicMeasures::new(kern, &sm, TauMethod::Auto).unwrap();
        for xi in [[0.0, 0.0], [0.4, 0.1], [3.0, -7.0]] {
            assert!(dm.sigma_hat(0, &xi, &[]).unwrap().value.norm() <= bound);
        }
    }

    #[test]
    fn beta_below_two_rejected() {
        let r = RoughKernel::unprojected(Arc::new(|_: &[f64]| 1.0), RadialProfile::Constant(1.0), Curve::Zero, 1.5);
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
