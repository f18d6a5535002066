use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integral::{oscillatory_integral, OscillatoryProblem, Weight, Window};
use super::phase::{compute_j, lower_bound_pairing, phase_coefficients};
use crate::dilation::{SpectralDecomposition, DEFAULT_CLUSTER_TOL};
use crate::error::{Error, Result};
use crate::quadrature::{loglog_slope, tail_supremum};

/// Which decay law a sweep tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// `|I| <= C J^{-1/N}` with `zeta` scaled.
    PhaseHeight,
    /// `|I| <= C |<A eta, zeta>|^{-1/N}` with `zeta` scaled.
    Pairing,
    /// `|int_1^2 exp(i <B_t eta, zeta>) dt/t| <= C |<eta, P zeta>|^{-1/L}` with `eta`
    /// scaled; the supplied decomposition is that of `P`.
    LogAverage,
    /// `|int exp(i psi(s)) ds| <= C N_1^{-1/N}` in the logarithmic variable.
    LogPhase,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSpec {
    pub eta: Vec<f64>,
    pub direction: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub lambdas: Vec<f64>,
    /// Extra scales per grid cell; the recorded modulus is the maximum.
    pub subsamples: usize,
    pub tol: f64,
    #[serde(default)]
    pub window: Window,
}

impl SweepSpec {
    pub fn new(eta: Vec<f64>, direction: Vec<f64>, lambdas: Vec<f64>) -> Self {
        Self {
            eta,
            direction,
            a: 1.0,
            b: 2.0,
            lambdas,
            subsamples: 8,
            tol: 1e-10,
            window: Window::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub mode: SweepMode,
    /// `N` (or `L`) in the decay exponent `-1/N`.
    pub exponent_order: usize,
    pub lambdas: Vec<f64>,
    pub moduli: Vec<f64>,
    pub envelopes: Vec<f64>,
    pub ratios: Vec<f64>,
    pub slope: f64,
    pub sup_ratio: f64,
    /// Last-decade maximum ratio over first-decade maximum ratio.
    pub growth: f64,
    pub max_error: f64,
    pub window: Window,
    pub interval: (f64, f64),
}

impl DecayReport {
    pub fn slope_limit(&self) -> f64 {
        -1.0 / self.exponent_order as f64 + 0.05
    }

    pub fn passes(&self, growth_limit: f64) -> bool {
        self.growth <= growth_limit && self.slope <= self.slope_limit()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "lambda,modulus,envelope,ratio")?;
        for i in 0..self.lambdas.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.lambdas[i], self.moduli[i], self.envelopes[i], self.ratios[i]
            )?;
        }
        Ok(())
    }
}

struct Setup {
    sd: Arc<SpectralDecomposition>,
    weight: Weight,
    order: usize,
}

fn scaled(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|x| x * s).collect()
}

/// Integrals along `lambda * direction` (or `lambda * eta`) compared with the
/// mode's envelope.
pub fn decay_sweep(sd: Arc<SpectralDecomposition>, spec: &SweepSpec, mode: SweepMode) -> Result<DecayReport> {
    if spec.lambdas.len() < 2 || spec.lambdas.windows(2).any(|w| !(w[1] > w[0])) || spec.lambdas[0] <= 0.0 {
        return Err(Error::InvalidInput("sweep grid must be positive and strictly increasing".into()));
    }
    let setup = match mode {
        SweepMode::LogAverage => {
            let adj = SpectralDecomposition::shared(&sd.matrix().transpose(), DEFAULT_CLUSTER_TOL)?;
            Setup {
                order: adj.degree(),
                sd: adj,
                weight: Weight::DtOverT,
            }
        }
        SweepMode::LogPhase => Setup {
            order: sd.degree(),
            sd: sd.clone(),
            weight: Weight::DtOverT,
        },
        SweepMode::PhaseHeight | SweepMode::Pairing => Setup {
            order: sd.degree(),
            sd: sd.clone(),
            weight: Weight::Dt,
        },
    };
    let vectors = |mu: f64| -> (Vec<f64>, Vec<f64>) {
        match mode {
            SweepMode::LogAverage => (scaled(&spec.eta, mu), spec.direction.clone()),
            _ => (spec.eta.clone(), scaled(&spec.direction, mu)),
        }
    };
    let envelope = |eta: &[f64], zeta: &[f64]| -> Result<f64> {
        match mode {
            SweepMode::PhaseHeight => compute_j(&setup.sd, eta, zeta),
            SweepMode::Pairing | SweepMode::LogAverage => Ok(lower_bound_pairing(&setup.sd, eta, zeta)),
            SweepMode::LogPhase => Ok(phase_coefficients(&setup.sd, eta, zeta)?.coefficient_norm()),
        }
    };
    let (eta1, zeta1) = vectors(1.0);
    let env1 = envelope(&eta1, &zeta1)?;
    let scale = crate::linalg::euclid(&eta1) * crate::linalg::euclid(&zeta1);
    if !(env1 > 1e-12 * scale) {
        return Err(Error::DegenerateDirection(format!(
            "{mode:?} envelope is {env1:.3e} at unit scale"
        )));
    }

    let n = spec.lambdas.len();
    let sub = spec.subsamples.max(1);
    let points: Vec<Result<(f64, f64, f64, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let lambda = spec.lambdas[i];
            let ratio = if i + 1 < n {
                spec.lambdas[i + 1] / lambda
            } else {
                lambda / spec.lambdas[i - 1]
            };
            let mut best_modulus: f64 = 0.0;
            let mut best_ratio: f64 = 0.0;
            let mut worst_error: f64 = 0.0;
            for m in 0..sub {
                let mu = lambda * ratio.powf(m as f64 / sub as f64);
                let (eta, zeta) = vectors(mu);
                let prob = OscillatoryProblem::new(setup.sd.clone(), eta.clone(), zeta.clone(), spec.a, spec.b, setup.weight)
                    .with_window(spec.window);
                let v = oscillatory_integral(&prob, spec.tol)?;
                let modulus = v.value.norm();
                let env = envelope(&eta, &zeta)?;
                best_modulus = best_modulus.max(modulus);
                best_ratio = best_ratio.max(modulus * env.powf(1.0 / setup.order as f64));
                worst_error = worst_error.max(v.error);
            }
            let (eta, zeta) = vectors(lambda);
            Ok((best_modulus, envelope(&eta, &zeta)?, best_ratio, worst_error))
        })
        .collect();
    let mut moduli = Vec::with_capacity(n);
    let mut envelopes = Vec::with_capacity(n);
    let mut ratios = Vec::with_capacity(n);
    let mut max_error: f64 = 0.0;
    for p in points {
        let (m, e, r, err) = p?;
        moduli.push(m);
        envelopes.push(e);
        ratios.push(r);
        max_error = max_error.max(err);
    }

    let (first, last) = (spec.lambdas[0], spec.lambdas[n - 1]);
    let top: Vec<usize> = (0..n).filter(|&i| spec.lambdas[i] >= last / 10.0 * (1.0 - 1e-12)).collect();
    let bottom: Vec<usize> = (0..n).filter(|&i| spec.lambdas[i] <= first * 10.0 * (1.0 + 1e-12)).collect();
    let sup = tail_supremum(&moduli);
    let xs: Vec<f64> = top.iter().map(|&i| spec.lambdas[i]).collect();
    let ys: Vec<f64> = top.iter().map(|&i| sup[i]).collect();
    let slope = loglog_slope(&xs, &ys).unwrap_or(f64::NAN);
    let max_over = |idx: &[usize]| idx.iter().map(|&i| ratios[i]).fold(0.0, f64::max);
    let growth = max_over(&top) / max_over(&bottom);
    Ok(DecayReport {
        mode,
        exponent_order: setup.order,
        lambdas: spec.lambdas.clone(),
        sup_ratio: ratios.iter().copied().fold(0.0, f64::max),
        moduli,
        envelopes,
        ratios,
        slope,
        growth,
        max_error,
        window: spec.window,
        interval: (spec.a, spec.b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SquareMatrix;
    use crate::quadrature::log_grid;

    #[test]
    fn identity_sweep_decays_like_inverse() {
        let sd = SpectralDecomposition::shared(&SquareMatrix::identity(2), 1e-6).unwrap();
        let spec = SweepSpec::new(vec![1.0, 1.0], vec![1.0, 0.5], log_grid(1.0, 1e4, 13));
        let rep = decay_sweep(sd, &spec, SweepMode::PhaseHeight).unwrap();
        assert_eq!(rep.exponent_order, 1);
        assert!((rep.slope + 1.0).abs() < 0.1, "slope {}", rep.slope);
        assert!(rep.passes(1.5), "{rep:?}");
    }

    #[test]
    fn degenerate_direction_rejected() {
        let sd = SpectralDecomposition::shared(&SquareMatrix::identity(2), 1e-6).unwrap();
        let spec = SweepSpec::new(vec![1.0, 0.0], vec![0.0, 1.0], log_grid(1.0, 10.0, 4));
        assert!(matches!(
            decay_sweep(sd, &spec, SweepMode::Pairing),
            Err(Error::DegenerateDirection(_))
        ));
    }
}
