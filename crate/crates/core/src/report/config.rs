//! Run configuration and its JSON schema.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::rough::{BlockRange, Curve, OmegaSpec, RadialProfile, TrigTerm};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exponents {
    /// Angular integrability exponent `q`; `q' = q/(q-1)`.
    pub q: f64,
    /// Radial integrability exponent `s`.
    pub s: f64,
    /// Zygmund exponent `a` of the radial class.
    pub a: f64,
}

impl Default for Exponents {
    fn default() -> Self {
        Self { q: 2.0, s: 2.0, a: 3.0 }
    }
}

fn dual(p: f64) -> f64 {
    p / (p - 1.0)
}

impl Exponents {
    pub fn q_dual(&self) -> f64 {
        dual(self.q)
    }

    pub fn s_dual(&self) -> f64 {
        dual(self.s)
    }
}

/// `beta = 2^{q'}`.
pub fn beta_from_q(q: f64) -> Result<f64> {
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::Config(format!("q = {q} must exceed 1")));
    }
    Ok(2f64.powf(dual(q)))
}

/// `beta = 2^{q' s'}`.
pub fn beta_from_qs(q: f64, s: f64) -> Result<f64> {
    beta_from_q(q)?;
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::Config(format!("s = {s} must exceed 1")));
    }
    Ok(2f64.powf(dual(q) * dual(s)))
}

/// `h` in kernel files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum RadialSpec {
    Constant { value: f64 },
    Power { re: f64, im: f64 },
    Steps { breaks: Vec<f64>, values: Vec<f64> },
    DyadicBlocks { first: i32, values: Vec<f64> },
}

impl RadialSpec {
    pub fn build(&self) -> Result<RadialProfile> {
        match self {
            Self::Constant { value } => Ok(RadialProfile::Constant(*value)),
            Self::Power { re, im } => Ok(RadialProfile::Power { re: *re, im: *im }),
            Self::Steps { breaks, values } => RadialProfile::steps(breaks.clone(), values.clone()),
            Self::DyadicBlocks { first, values } => RadialProfile::dyadic_blocks(*first, values),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub omega: OmegaSpec,
    pub h: RadialSpec,
    #[serde(default = "zero_curve")]
    pub curve: Curve,
    /// Surface resolution.
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn zero_curve() -> Curve {
    Curve::Zero
}

fn default_resolution() -> usize {
    64
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            omega: OmegaSpec::Trig {
                terms: vec![
                    TrigTerm { order: 1, cos: 1.0, sin: 0.0 },
                    TrigTerm { order: 2, cos: 0.3, sin: 0.7 },
                ],
            },
            h: RadialSpec::Constant { value: 1.0 },
            curve: Curve::Zero,
            resolution: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorySweepConfig {
    pub eta: Vec<f64>,
    pub zeta: Vec<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub points: usize,
    pub subsamples: usize,
}

impl Default for OscillatorySweepConfig {
    fn default() -> Self {
        Self {
            eta: vec![1.0, 1.0],
            zeta: vec![1.0, -0.35],
            lambda_min: 1.0,
            lambda_max: 1e4,
            points: 25,
            subsamples: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSweepConfig {
    pub k: i32,
    pub direction: Vec<f64>,
    /// Frequency paired with the curve; empty for the zero curve.
    #[serde(default)]
    pub eta: Vec<f64>,
    pub points_per_decade: usize,
    pub subsamples: usize,
}

impl Default for MeasureSweepConfig {
    fn default() -> Self {
        Self {
            k: 0,
            direction: vec![1.0, 0.0],
            eta: Vec::new(),
            points_per_decade: 4,
            subsamples: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    /// Random points for homogeneity and round-trip checks.
    pub quasinorm: usize,
    /// Samples fitting each growth envelope.
    pub budget: usize,
    /// Random dilation parameters for the group checks.
    pub dilation: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            quasinorm: 2000,
            budget: 2000,
            dilation: 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtrapolationConfig {
    pub m_max: usize,
    pub blocks: BlockRange,
}

impl Default for ExtrapolationConfig {
    fn default() -> Self {
        Self {
            m_max: 50,
            blocks: BlockRange { first: -4, last: 4 },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Rows of the dilation generator `P`.
    pub matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<String>,
    /// Relative quadrature tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Dyadic base; `None` means `2`.
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub exponents: Exponents,
    #[serde(default)]
    pub kernel: KernelConfig,
    #[serde(default)]
    pub oscillatory: OscillatorySweepConfig,
    #[serde(default)]
    pub measures: MeasureSweepConfig,
    #[serde(default)]
    pub samples: SampleConfig,
    #[serde(default)]
    pub extrapolation: ExtrapolationConfig,
}

fn default_tol() -> f64 {
    1e-10
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            matrix: vec![vec![1.0, 0.0], vec![0.0, 2.0]],
            seed: 0,
            output_dir: None,
            tol: default_tol(),
            beta: None,
            exponents: Exponents::default(),
            kernel: KernelConfig::default(),
            oscillatory: OscillatorySweepConfig::default(),
            measures: MeasureSweepConfig::default(),
            samples: SampleConfig::default(),
            extrapolation: ExtrapolationConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn matrix(&self) -> Result<SquareMatrix> {
        SquareMatrix::from_rows(&self.matrix).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn beta(&self) -> f64 {
        self.beta.unwrap_or(2.0)
    }

    pub fn validate(&self) -> Result<()> {
        self.matrix()?;
        let bad = |what: &str| Err(Error::Config(what.to_string()));
        if !(self.tol >= 1e-14 && self.tol < 1.0) {
            return bad("tol must lie in [1e-14, 1)");
        }
        if let Some(b) = self.beta {
            if !(b >= 2.0) || !b.is_finite() {
                return bad("beta must be a finite number >= 2");
            }
        }
        let e = &self.exponents;
        if !(e.q > 1.0 && e.s > 1.0 && e.a > 0.0) {
            return bad("exponents need q > 1, s > 1, a > 0");
        }
        let o = &self.oscillatory;
        if !(o.lambda_min > 0.0 && o.lambda_max > o.lambda_min) || o.points < 2 {
            return bad("oscillatory sweep needs 0 < lambda_min < lambda_max and at least 2 points");
        }
        if self.measures.points_per_decade < 2 {
            return bad("measure sweep needs at least 2 points per decade");
        }
        if self.extrapolation.m_max == 0 || self.extrapolation.blocks.last < self.extrapolation.blocks.first {
            return bad("extrapolation needs m_max >= 1 and a non-empty block range");
        }
        Ok(())
    }
}
