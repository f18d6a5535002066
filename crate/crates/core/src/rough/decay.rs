//! Decay sweeps for the dyadic measure transforms in the variable
//! `x = beta^k s(xi)`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{DyadicMeasures, MeasureValue};
use crate::error::{Error, Result};
use crate::quadrature::{log_grid, loglog_slope, tail_supremum};
use crate::quasinorm::ExponentBudget;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureMode {
    /// `|sigma_k^| <= C (beta^{k+d} s(xi))^{1/b_1}` as `x -> 0`.
    SigmaSmall,
    /// `|sigma_k^| <= C x^{-epsilon_0/(q' s')}` as `x -> inf`.
    SigmaTail,
    /// The same envelope for `mu_k^`.
    MuTail,
    /// `|mu_k^(xi, eta) - mu_k^(0, eta)| <= C (beta^{k+d} s(xi))^{1/b_1}` as `x -> 0`.
    MuIncrement,
    /// `int |tau(B_r xi)|^2 dr/r <= C x^{-epsilon_0/q'}` as `x -> inf`.
    SquareTail,
}

impl MeasureMode {
    pub const ALL: [MeasureMode; 5] = [
        MeasureMode::SigmaSmall,
        MeasureMode::SigmaTail,
        MeasureMode::MuTail,
        MeasureMode::MuIncrement,
        MeasureMode::SquareTail,
    ];

    pub fn is_tail(self) -> bool {
        matches!(self, Self::SigmaTail | Self::MuTail | Self::SquareTail)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureSweep {
    pub k: i32,
    /// Direction of `xi`; rescaled so that `s(xi_0) = 1`.
    pub direction: Vec<f64>,
    pub eta: Vec<f64>,
    /// Exponent `s` of the radial class; `s' = s/(s-1)` enters the tail envelope.
    pub s: f64,
    pub points_per_decade: usize,
    /// Extra scales per grid cell; the recorded modulus is the maximum.
    pub subsamples: usize,
    /// Unresolved sphere-transform evaluations tolerated before failing.
    pub max_unresolved: usize,
}

impl MeasureSweep {
    pub fn new(direction: Vec<f64>, eta: Vec<f64>, s: f64) -> Self {
        Self {
            k: 0,
            direction,
            eta,
            s,
            points_per_decade: 6,
            subsamples: 4,
            max_unresolved: 0,
        }
    }
}

/// Decades swept on each side of `x = 1`.
pub const SWEEP_DECADES: f64 = 3.0;

#[derive(Clone, Debug, Serialize)]
pub struct MeasureDecayReport {
    pub mode: MeasureMode,
    pub k: i32,
    pub beta: f64,
    /// Exponent of the envelope in `x`.
    pub exponent: f64,
    pub xs: Vec<f64>,
    pub moduli: Vec<f64>,
    pub envelopes: Vec<f64>,
    pub ratios: Vec<f64>,
    pub slope: f64,
    pub sup_ratio: f64,
    /// Maximum ratio in the decade farthest from `x = 1` over the maximum in
    /// the rest of the sweep.
    pub growth: f64,
    pub max_error: f64,
    pub unresolved: usize,
    /// Samples where `|sigma_k^|` or `|mu_k^|` exceeded the block mass bound.
    pub mass_violations: usize,
}

impl MeasureDecayReport {
    /// Fitted tail slope allowed: the envelope exponent plus `0.05`.
    pub fn slope_limit(&self) -> f64 {
        self.exponent + 0.05
    }

    pub fn passes(&self, growth_limit: f64) -> bool {
        let slope_ok = !self.mode.is_tail() || self.slope <= self.slope_limit();
        self.growth <= growth_limit && slope_ok && self.mass_violations == 0
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,modulus,envelope,ratio")?;
        for i in 0..self.xs.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.xs[i], self.moduli[i], self.envelopes[i], self.ratios[i]
            )?;
        }
        Ok(())
    }
}

/// Sweeps `x = beta^k s(xi)` over `[1e-3, 1]` (small modes) or `[1, 1e3]`
/// (tail modes) with `xi = B_{x / beta^k} xi_0`.
pub fn verify_sigma_decay(
    dm: &DyadicMeasures,
    budget: &ExponentBudget,
    mode: MeasureMode,
    sweep: &MeasureSweep,
) -> Result<MeasureDecayReport> {
    let ctx = dm.context();
    let beta = dm.kernel().beta();
    if !(sweep.s > 1.0) {
        return Err(Error::InvalidInput(format!("radial exponent s = {} must exceed 1", sweep.s)));
    }
    if sweep.points_per_decade < 2 {
        return Err(Error::InvalidInput("need at least two points per decade".into()));
    }
    let s_dual = sweep.s / (sweep.s - 1.0);
    let q_dual = budget.q_dual;
    let exponent = match mode {
        MeasureMode::SigmaSmall | MeasureMode::MuIncrement => 1.0 / budget.b1(),
        MeasureMode::SigmaTail | MeasureMode::MuTail => -budget.epsilon0 / (q_dual * s_dual),
        MeasureMode::SquareTail => -budget.epsilon0 / q_dual,
    };
    let prefactor = match mode {
        MeasureMode::SigmaSmall | MeasureMode::MuIncrement => beta.powf(budget.d / budget.b1()),
        _ => 1.0,
    };
    let unit = ctx.adjoint().polar(&sweep.direction)?.theta;
    let count = (SWEEP_DECADES * sweep.points_per_decade as f64).round() as usize + 1;
    let xs = if mode.is_tail() {
        log_grid(1.0, 10f64.powf(SWEEP_DECADES), count)
    } else {
        log_grid(10f64.powf(-SWEEP_DECADES), 1.0, count)
    };
    let bound = dm.mass_bound(sweep.k)?;
    let beta_k = beta.powi(sweep.k);
    let cell = 10f64.powf(1.0 / sweep.points_per_decade as f64);
    let sub = sweep.subsamples.max(1);

    let eval = |x: f64| -> Result<MeasureValue> {
        let xi = ctx.dilate_adjoint(x / beta_k, &unit)?;
        match mode {
            MeasureMode::SigmaSmall | MeasureMode::SigmaTail => dm.sigma_hat(sweep.k, &xi, &sweep.eta),
            MeasureMode::MuTail => dm.mu_hat(sweep.k, &xi, &sweep.eta),
            MeasureMode::MuIncrement => dm.mu_hat_increment(sweep.k, &xi, &sweep.eta),
            MeasureMode::SquareTail => dm.square_average(sweep.k, &xi),
        }
    };
    let checks_mass = !matches!(mode, MeasureMode::SquareTail | MeasureMode::MuIncrement);
    let points: Vec<Result<(f64, f64, f64, usize, usize)>> = xs
        .par_iter()
        .map(|&x| {
            let mut modulus: f64 = 0.0;
            let mut ratio: f64 = 0.0;
            let mut error: f64 = 0.0;
            let mut unresolved = 0;
            let mut violations = 0;
            for m in 0..sub {
                let xm = x * cell.powf(m as f64 / sub as f64);
                let v = eval(xm)?;
                let a = v.value.norm();
                modulus = modulus.max(a);
                ratio = ratio.max(a / (prefactor * xm.powf(exponent)));
                error = error.max(v.error);
                unresolved += v.unresolved;
                if checks_mass && a > bound {
                    violations += 1;
                }
            }
            Ok((modulus, ratio, error, unresolved, violations))
        })
        .collect();
    let mut moduli = Vec::with_capacity(count);
    let mut ratios = Vec::with_capacity(count);
    let mut max_error: f64 = 0.0;
    let mut unresolved = 0;
    let mut mass_violations = 0;
    for p in points {
        let (m, r, e, u, v) = p?;
        moduli.push(m);
        ratios.push(r);
        max_error = max_error.max(e);
        unresolved += u;
        mass_violations += v;
    }
    if unresolved > sweep.max_unresolved {
        return Err(Error::BudgetExceeded {
            budget: sweep.max_unresolved,
            achieved: unresolved as f64,
        });
    }
    let envelopes: Vec<f64> = xs.iter().map(|x| prefactor * x.powf(exponent)).collect();
    let far: Vec<usize> = (0..count)
        .filter(|&i| (xs[i].log10()).abs() >= SWEEP_DECADES - 1.0 - 1e-12)
        .collect();
    let rest: Vec<usize> = (0..count)
        .filter(|&i| (xs[i].log10()).abs() < SWEEP_DECADES - 1.0 - 1e-12)
        .collect();
    let max_over = |idx: &[usize]| idx.iter().map(|&i| ratios[i]).fold(0.0, f64::max);
    let growth = max_over(&far) / max_over(&rest);
    let slope = if mode.is_tail() {
        let sup = tail_supremum(&moduli);
        let fx: Vec<f64> = far.iter().map(|&i| xs[i]).collect();
        let fy: Vec<f64> = far.iter().map(|&i| sup[i]).collect();
        loglog_slope(&fx, &fy).unwrap_or(f64::NAN)
    } else {
        loglog_slope(&xs, &moduli).unwrap_or(f64::NAN)
    };
    Ok(MeasureDecayReport {
        mode,
        k: sweep.k,
        beta,
        exponent,
        sup_ratio: ratios.iter().copied().fold(0.0, f64::max),
        xs,
        moduli,
        envelopes,
        ratios,
        slope,
        growth,
        max_error,
        unresolved,
        mass_violations,
    })
}
