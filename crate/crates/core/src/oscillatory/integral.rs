use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::phase::PhaseFunction;
use crate::dilation::SpectralDecomposition;
use crate::error::{Error, Result};
use crate::linalg::euclid;
use crate::quadrature::adaptive_gk15;

/// Node budget for a single integral.
pub const MAX_NODES: usize = 10_000_000;
const PREPASS_SEGMENTS: usize = 64;
const PREPASS_SAMPLES: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    /// `dt`
    Dt,
    /// `dt / t`
    DtOverT,
}

/// Compact interval of admissible endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Default for Window {
    fn default() -> Self {
        Self { lo: 0.25, hi: 4.0 }
    }
}

impl Window {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }
}

/// `int_a^b exp(i <t^A eta, zeta>) w(t)`.
#[derive(Clone, Debug)]
pub struct OscillatoryProblem {
    pub sd: Arc<SpectralDecomposition>,
    pub eta: Vec<f64>,
    pub zeta: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub weight: Weight,
    pub window: Window,
}

impl OscillatoryProblem {
    pub fn new(sd: Arc<SpectralDecomposition>, eta: Vec<f64>, zeta: Vec<f64>, a: f64, b: f64, weight: Weight) -> Self {
        Self {
            sd,
            eta,
            zeta,
            a,
            b,
            weight,
            window: Window::default(),
        }
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.sd.dim();
        if self.eta.len() != n || self.zeta.len() != n {
            return Err(Error::InvalidInput(format!("eta and zeta must have length {n}")));
        }
        if !(self.window.lo > 0.0 && self.window.hi > self.window.lo) {
            return Err(Error::InvalidInput(format!(
                "window [{}, {}] is not a compact subinterval of (0, inf)",
                self.window.lo, self.window.hi
            )));
        }
        if !(self.a > 0.0 && self.b > self.a) {
            return Err(Error::InvalidInput(format!("need 0 < a < b, got [{}, {}]", self.a, self.b)));
        }
        if !self.window.contains(self.a) || !self.window.contains(self.b) {
            return Err(Error::InvalidInput(format!(
                "[{}, {}] leaves the window [{}, {}]",
                self.a, self.b, self.window.lo, self.window.hi
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OscillatoryValue {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
    pub panels: usize,
}

/// Adaptive Gauss-Kronrod in `s = log t` on panels whose phase variation is
/// at most `pi/2`.
pub fn oscillatory_integral(prob: &OscillatoryProblem, tol: f64) -> Result<OscillatoryValue> {
    if !(tol >= 1e-12) {
        return Err(Error::InvalidInput(format!("tolerance {tol} below 1e-12")));
    }
    prob.validate()?;
    let phase = PhaseFunction::new(&prob.sd, &prob.eta, &prob.zeta)?;
    let (lo, hi) = (prob.a.ln(), prob.b.ln());

    let scale = euclid(&prob.eta) * euclid(&prob.zeta) * prob.sd.matrix().as_matrix().norm();
    if phase.expansion().coefficient_norm() <= 1e-15 * scale {
        let e = Complex64::new(0.0, phase.value(lo)).exp();
        let length = match prob.weight {
            Weight::Dt => prob.b - prob.a,
            Weight::DtOverT => hi - lo,
        };
        return Ok(OscillatoryValue {
            value: e * length,
            error: 0.0,
            evaluations: 1,
            panels: 0,
        });
    }

    let seg = (hi - lo) / PREPASS_SEGMENTS as f64;
    let mut panels = Vec::new();
    for k in 0..PREPASS_SEGMENTS {
        let a = lo + seg * k as f64;
        let b = if k + 1 == PREPASS_SEGMENTS { hi } else { a + seg };
        let peak = (0..PREPASS_SAMPLES)
            .map(|m| phase.slope(a + (b - a) * m as f64 / (PREPASS_SAMPLES - 1) as f64).abs())
            .fold(0.0, f64::max);
        let pieces = ((1.25 * peak * (b - a) / FRAC_PI_2).ceil() as usize).max(1);
        if pieces > MAX_NODES / 15 {
            return Err(Error::BudgetExceeded {
                budget: MAX_NODES,
                achieved: f64::INFINITY,
            });
        }
        let h = (b - a) / pieces as f64;
        for p in 0..pieces {
            let start = a + h * p as f64;
            let end = if p + 1 == pieces { b } else { start + h };
            panels.push((start, end));
        }
    }
    let weight = prob.weight;
    let integrand = |s: f64| {
        let e = Complex64::new(0.0, phase.value(s)).exp();
        match weight {
            Weight::Dt => e * s.exp(),
            Weight::DtOverT => e,
        }
    };
    let res = adaptive_gk15(integrand, &panels, tol, MAX_NODES)?;
    Ok(OscillatoryValue {
        value: res.value,
        error: res.error,
        evaluations: res.evaluations,
        panels: panels.len(),
    })
}
