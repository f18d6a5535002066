//! The sphere transform `tau(xi) = int_Sigma Omega(theta) e^{-2 pi i <xi, theta>} dsigma`.
//!
//! In the plane the density `Omega * dsigma/dphi` is expanded in Fourier modes
//! of the sphere angle and `tau` is summed through the Jacobi-Anger identity,
//! which stays exact at frequencies far beyond the node spacing. Otherwise the
//! surface rule is applied directly.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::bessel::bessel_j_sequence;
use crate::error::{Error, Result};
use crate::linalg::mat_vec;
use crate::polar::SurfaceMeasure;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauMethod {
    /// Spectral in the plane, direct otherwise.
    #[default]
    Auto,
    Spectral,
    Direct,
}

/// Relative size of the upper half of the angular spectrum above which the
/// density is reported as under-resolved.
const SPECTRAL_TAIL_LIMIT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TauValue {
    pub value: Complex64,
    /// False when the node spacing cannot follow the phase.
    pub resolved: bool,
}

#[derive(Clone, Debug)]
enum Kind {
    Spectral {
        /// `(m, g_m)` with `G(phi) = sum g_m e^{i m phi}`.
        modes: Vec<(i64, Complex64)>,
        max_order: usize,
        inv_sqrt: DMatrix<f64>,
    },
    Direct {
        /// `(theta, w * Omega(theta))`.
        nodes: Vec<(Vec<f64>, f64)>,
        /// Largest distance between neighbouring nodes.
        spacing: f64,
    },
}

#[derive(Clone, Debug)]
pub struct TauEvaluator {
    kind: Kind,
    origin: f64,
    spectrum_resolved: bool,
}

fn spectral_modes(sm: &SurfaceMeasure, values: &[f64]) -> (Vec<(i64, Complex64)>, bool) {
    let m = sm.nodes().len();
    let dphi = 2.0 * PI / m as f64;
    let mut buf: Vec<Complex64> = sm
        .nodes()
        .iter()
        .zip(values)
        .map(|(nd, v)| Complex64::new(v * nd.weight / dphi, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let half = m / 2;
    let mut modes = Vec::with_capacity(m);
    let scale = 1.0 / m as f64;
    for (k, c) in buf.iter().enumerate() {
        let c = c * scale;
        if m % 2 == 0 && k == half {
            // split the Nyquist mode evenly between +half and -half
            modes.push((half as i64, c * 0.5));
            modes.push((-(half as i64), c * 0.5));
        } else if k <= half {
            modes.push((k as i64, c));
        } else {
            modes.push((k as i64 - m as i64, c));
        }
    }
    let peak = modes.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    let tail = modes
        .iter()
        .filter(|(k, _)| k.unsigned_abs() as usize >= m / 4)
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    let resolved = tail <= SPECTRAL_TAIL_LIMIT * peak;
    let floor = 1e-17 * modes.iter().map(|(_, c)| c.norm()).sum::<f64>();
    modes.retain(|(_, c)| c.norm() > floor);
    (modes, resolved)
}

/// `J_0(x) - 1` without cancellation for small `x`.
fn j0_minus_one(x: f64, j0: f64) -> f64 {
    if x >= 1.0 {
        return j0 - 1.0;
    }
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut acc = 0.0;
    for k in 1..30 {
        term *= q / (k * k) as f64;
        acc += term;
        if term.abs() < 1e-18 * acc.abs() {
            break;
        }
    }
    acc
}

impl TauEvaluator {
    /// `values` are `Omega` at the nodes of `sm`, in node order.
    pub fn new(sm: &SurfaceMeasure, values: &[f64], method: TauMethod) -> Result<Self> {
        if values.len() != sm.nodes().len() {
            return Err(Error::InvalidInput(format!(
                "{} values for {} surface nodes",
                values.len(),
                sm.nodes().len()
            )));
        }
        let n = sm.context().dim();
        let origin = sm.nodes().iter().zip(values).map(|(nd, v)| nd.weight * v).sum();
        let spectral = match method {
            TauMethod::Auto => n == 2,
            TauMethod::Spectral if n != 2 => {
                return Err(Error::InvalidInput("spectral sphere transform needs n = 2".into()))
            }
            TauMethod::Spectral => true,
            TauMethod::Direct => false,
        };
        let inv_sqrt = sm.context().primal().form_inv_sqrt().clone();
        if spectral {
            let (modes, spectrum_resolved) = spectral_modes(sm, values);
            let max_order = modes.iter().map(|(k, _)| k.unsigned_abs() as usize).max().unwrap_or(0);
            return Ok(Self {
                kind: Kind::Spectral {
                    modes,
                    max_order,
                    inv_sqrt,
                },
                origin,
                spectrum_resolved,
            });
        }
        let res = sm.resolution() as f64;
        let stretch = nalgebra::SymmetricEigen::new(inv_sqrt).eigenvalues.max();
        let step = if n == 2 { 2.0 * PI / res } else { PI / res };
        Ok(Self {
            kind: Kind::Direct {
                nodes: sm
                    .nodes()
                    .iter()
                    .zip(values)
                    .map(|(nd, v)| (nd.theta.clone(), nd.weight * v))
                    .collect(),
                spacing: stretch * step,
            },
            origin,
            spectrum_resolved: true,
        })
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self.kind, Kind::Spectral { .. })
    }

    /// Whether the angular spectrum of the density decays within the node set.
    pub fn spectrum_resolved(&self) -> bool {
        self.spectrum_resolved
    }

    /// `tau(0) = int Omega dsigma`.
    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn eval(&self, xi: &[f64]) -> TauValue {
        self.eval_inner(xi, false)
    }

    /// `tau(xi) - tau(0)`, accurate when `xi` is small.
    pub fn eval_increment(&self, xi: &[f64]) -> TauValue {
        self.eval_inner(xi, true)
    }

    fn eval_inner(&self, xi: &[f64], increment: bool) -> TauValue {
        match &self.kind {
            Kind::Spectral {
                modes,
                max_order,
                inv_sqrt,
            } => {
                let v = mat_vec(inv_sqrt, xi);
                let radius = v[0].hypot(v[1]);
                let z = 2.0 * PI * radius;
                let bessel = bessel_j_sequence(*max_order, z);
                let unit = if radius > 0.0 {
                    Complex64::new(v[0] / radius, v[1] / radius)
                } else {
                    Complex64::new(1.0, 0.0)
                };
                let mut acc = Complex64::new(0.0, 0.0);
                for &(m, g) in modes {
                    let order = m.unsigned_abs() as usize;
                    let rot = if m >= 0 { unit.powu(order as u32) } else { unit.conj().powu(order as u32) };
                    let phase = Complex64::new(0.0, -1.0).powu(order as u32);
                    let j = if order == 0 && increment {
                        j0_minus_one(z, bessel[0])
                    } else {
                        bessel[order]
                    };
                    acc += g * rot * phase * j;
                }
                TauValue {
                    value: acc * (2.0 * PI),
                    resolved: true,
                }
            }
            Kind::Direct { nodes, spacing } => {
                let len = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
                let mut acc = Complex64::new(0.0, 0.0);
                for (theta, wv) in nodes {
                    let phi = 2.0 * PI * theta.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>();
                    let e = if increment {
                        let s = (0.5 * phi).sin();
                        Complex64::new(-2.0 * s * s, -phi.sin())
                    } else {
                        Complex64::new(phi.cos(), -phi.sin())
                    };
                    acc += e * *wv;
                }
                TauValue {
                    value: acc,
                    resolved: 2.0 * PI * len * spacing <= 0.5 * PI,
                }
            }
        }
    }
}

/// `tau` for a surface function given by node values.
pub fn tau_hat(sm: &SurfaceMeasure, values: &[f64], xi: &[f64]) -> Result<TauValue> {
    Ok(TauEvaluator::new(sm, values, TauMethod::Auto)?.eval(xi))
}
