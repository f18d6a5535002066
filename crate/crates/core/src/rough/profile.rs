//! Radial profiles `h`, curves `Gamma`, and the block norms built on them.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polar::SurfaceMeasure;
use crate::quadrature::GaussRule;

pub type RadialFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A function `h` on `(0, inf)`.
#[derive(Clone)]
pub enum RadialProfile {
    Constant(f64),
    /// `t^{re + i im}`.
    Power { re: f64, im: f64 },
    /// `values[0]` below `breaks[0]`, `values[i]` on `[breaks[i-1], breaks[i])`,
    /// `values[last]` from `breaks[last]` on.
    Steps { breaks: Vec<f64>, values: Vec<f64> },
    /// Arbitrary callable; `breaks` lists its discontinuities.
    Custom { f: RadialFn, breaks: Vec<f64> },
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::Power { re, im } => write!(f, "Power({re}+{im}i)"),
            Self::Steps { breaks, values } => write!(f, "Steps({breaks:?}, {values:?})"),
            Self::Custom { breaks, .. } => write!(f, "Custom(breaks = {breaks:?})"),
        }
    }
}

impl RadialProfile {
    pub fn steps(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "{} step values for {} breaks",
                values.len(),
                breaks.len()
            )));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) || breaks.iter().any(|&b| !(b > 0.0)) {
            return Err(Error::InvalidInput("step breaks must be positive and increasing".into()));
        }
        Ok(Self::Steps { breaks, values })
    }

    /// Constant `values[i]` on `[2^{first + i}, 2^{first + i + 1})`, zero elsewhere.
    pub fn dyadic_blocks(first: i32, values: &[f64]) -> Result<Self> {
        let breaks: Vec<f64> = (0..=values.len()).map(|i| 2f64.powi(first + i as i32)).collect();
        let mut vals = vec![0.0];
        vals.extend_from_slice(values);
        vals.push(0.0);
        Self::steps(breaks, vals)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        match self {
            Self::Constant(c) => Complex64::new(*c, 0.0),
            Self::Power { re, im } => Complex64::new(*re, *im).scale(t.ln()).exp(),
            Self::Steps { breaks, values } => {
                let idx = breaks.partition_point(|&b| b <= t);
                Complex64::new(values[idx], 0.0)
            }
            Self::Custom { f, .. } => f(t),
        }
    }

    pub fn abs(&self, t: f64) -> f64 {
        self.eval(t).norm()
    }

    pub fn breakpoints(&self) -> &[f64] {
        match self {
            Self::Steps { breaks, .. } | Self::Custom { breaks, .. } => breaks,
            _ => &[],
        }
    }

    /// `|h|` as a profile.
    pub fn modulus(&self) -> RadialProfile {
        match self {
            Self::Constant(c) => Self::Constant(c.abs()),
            Self::Power { re, .. } => Self::Power { re: *re, im: 0.0 },
            Self::Steps { breaks, values } => Self::Steps {
                breaks: breaks.clone(),
                values: values.iter().map(|v| v.abs()).collect(),
            },
            Self::Custom { f, breaks } => {
                let f = f.clone();
                Self::Custom {
                    f: Arc::new(move |t| Complex64::new(f(t).norm(), 0.0)),
                    breaks: breaks.clone(),
                }
            }
        }
    }

    /// `h chi_S` for the set where `keep(|h(t)|)` holds; level crossings are
    /// supplied as extra breakpoints.
    pub fn restricted<K>(&self, keep: K, extra_breaks: Vec<f64>) -> RadialProfile
    where
        K: Fn(f64) -> bool + Send + Sync + 'static,
    {
        let base = self.clone();
        let mut breaks: Vec<f64> = self.breakpoints().to_vec();
        breaks.extend(extra_breaks);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        Self::Custom {
            f: Arc::new(move |t| {
                let v = base.eval(t);
                if keep(v.norm()) {
                    v
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
            breaks,
        }
    }

    /// `int_lo^hi g(|h(e^u)|) du` by Gauss-Legendre panels split at breakpoints.
    pub fn log_integral<G: Fn(f64) -> f64>(&self, lo: f64, hi: f64, g: G) -> f64 {
        self.log_integral_with(lo, hi, &[], g)
    }

    /// As `log_integral`, also splitting at the points `extra` (in `t`).
    pub fn log_integral_with<G: Fn(f64) -> f64>(&self, lo: f64, hi: f64, extra: &[f64], g: G) -> f64 {
        let mut cuts = vec![lo];
        cuts.extend(
            self.breakpoints()
                .iter()
                .chain(extra)
                .map(|b| b.ln())
                .filter(|&u| u > lo && u < hi),
        );
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        let rule = GaussRule::new(16);
        rule.composite(&cuts, 4, |u| g(self.abs(u.exp())))
    }
}

/// Inclusive range of dyadic blocks `[2^j, 2^{j+1}]` standing in for `j in Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRange {
    pub first: i32,
    pub last: i32,
}

impl Default for BlockRange {
    fn default() -> Self {
        Self { first: -8, last: 8 }
    }
}

impl BlockRange {
    pub fn iter(&self) -> impl Iterator<Item = i32> {
        self.first..=self.last
    }
}

fn block_sup<F: Fn(i32) -> f64>(blocks: BlockRange, f: F) -> Result<f64> {
    if blocks.last < blocks.first {
        return Err(Error::InvalidInput("empty block range".into()));
    }
    Ok(blocks.iter().map(f).fold(0.0, f64::max))
}

/// `sup_j (int_{2^j}^{2^{j+1}} |h|^s dt/t)^{1/s}` over the block range.
pub fn delta_norm(h: &RadialProfile, s: f64, blocks: BlockRange) -> Result<f64> {
    if !(s >= 1.0) || !s.is_finite() {
        return Err(Error::Domain(format!("Delta_s needs s >= 1, got {s}")));
    }
    let ln2 = std::f64::consts::LN_2;
    let sup = block_sup(blocks, |j| {
        h.log_integral(j as f64 * ln2, (j + 1) as f64 * ln2, |v| v.powf(s))
    })?;
    Ok(sup.powf(1.0 / s))
}

/// `sup_j int_{2^j}^{2^{j+1}} |h| log(2 + |h|)^a dt/t`.
pub fn zygmund_la(h: &RadialProfile, a: f64, blocks: BlockRange) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("L_a needs a > 0, got {a}")));
    }
    let ln2 = std::f64::consts::LN_2;
    block_sup(blocks, |j| {
        h.log_integral(j as f64 * ln2, (j + 1) as f64 * ln2, |v| v * (2.0 + v).ln().powf(a))
    })
}

/// `int_Sigma |Omega| log(2 + |Omega|) dsigma` from node values.
pub fn llogl(sm: &SurfaceMeasure, values: &[f64]) -> f64 {
    sm.nodes()
        .iter()
        .zip(values)
        .map(|(nd, v)| nd.weight * v.abs() * (2.0 + v.abs()).ln())
        .sum()
}

/// Level index `m` with `2^{m-1} < v <= 2^m`, and `1` for `v <= 2`.
pub fn level_index(v: f64) -> usize {
    if v <= 2.0 {
        1
    } else {
        let m = v.log2().ceil() as usize;
        // guard the rounding of log2 at exact powers of two
        if 2f64.powi(m as i32 - 1) >= v {
            m - 1
        } else if 2f64.powi(m as i32) < v {
            m + 1
        } else {
            m
        }
    }
}

/// Samples per dyadic block when measuring level sets of `h`.
pub const LEVEL_SAMPLES: usize = 10_000;

/// `d_m(h) = sup_k 2^{-k} |E(k, m)|` for `m = 1..=m_max`, by uniform sampling.
pub fn level_densities(h: &RadialProfile, blocks: BlockRange, m_max: usize) -> Vec<f64> {
    let mut d = vec![0.0f64; m_max];
    for k in blocks.iter() {
        let lo = 2f64.powi(k);
        let mut counts = vec![0usize; m_max];
        for i in 0..LEVEL_SAMPLES {
            let t = lo * (1.0 + (i as f64 + 0.5) / LEVEL_SAMPLES as f64);
            let v = h.abs(t);
            if v > 0.0 {
                let m = level_index(v);
                if m <= m_max {
                    counts[m - 1] += 1;
                }
            }
        }
        for (dm, c) in d.iter_mut().zip(counts) {
            *dm = dm.max(c as f64 / LEVEL_SAMPLES as f64);
        }
    }
    d
}

#[derive(Clone, Debug, Serialize)]
pub struct ZygmundReport {
    pub a: f64,
    pub l_a: f64,
    pub llogl: Option<f64>,
    pub n_a: f64,
    pub d: Vec<f64>,
    pub blocks: BlockRange,
}

/// `L_a(h)`, `N_a(h) = sum m^a 2^m d_m(h)`, the `d_m`, and optionally `L log L(Omega)`.
pub fn zygmund_functionals(
    h: &RadialProfile,
    omega: Option<(&SurfaceMeasure, &[f64])>,
    a: f64,
    blocks: BlockRange,
    m_max: usize,
) -> Result<ZygmundReport> {
    let l_a = zygmund_la(h, a, blocks)?;
    let d = level_densities(h, blocks, m_max);
    let n_a = d
        .iter()
        .enumerate()
        .map(|(i, dm)| ((i + 1) as f64).powf(a) * 2f64.powi(i as i32 + 1) * dm)
        .sum();
    Ok(ZygmundReport {
        a,
        l_a,
        llogl: omega.map(|(sm, v)| llogl(sm, v)),
        n_a,
        d,
        blocks,
    })
}

/// `Gamma: [0, inf) -> R^m` with `Gamma(0) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Curve {
    Zero,
    /// `t -> (t^{d_1}, ..., t^{d_m})`.
    Power(Vec<f64>),
}

impl Curve {
    pub fn power(exponents: Vec<f64>) -> Result<Self> {
        if exponents.is_empty() || exponents.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::InvalidInput("power curve exponents must be positive".into()));
        }
        Ok(Self::Power(exponents))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Zero => 0,
            Self::Power(d) => d.len(),
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        match self {
            Self::Zero => Vec::new(),
            Self::Power(d) => d.iter().map(|e| t.powf(*e)).collect(),
        }
    }

    /// `<Gamma(t), eta>`; a zero curve ignores `eta`.
    pub fn pairing(&self, t: f64, eta: &[f64]) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Power(d) => d.iter().zip(eta).map(|(e, y)| t.powf(*e) * y).sum(),
        }
    }

    /// `|d/du <Gamma(e^u), eta>|` bound at `t = e^u`.
    pub fn log_rate(&self, t: f64, eta: &[f64]) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Power(d) => d.iter().zip(eta).map(|(e, y)| (e * t.powf(*e) * y).abs()).sum(),
        }
    }
}
