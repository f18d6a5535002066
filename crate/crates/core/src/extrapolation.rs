//! Level-set decompositions of `h` and `Omega` and the double series that
//! assembles per-exponent bounds into an `L log L` / `L_a` bound.
//!
//! The aggregate is the right-hand side of the extrapolation inequality with
//! every absolute constant set to 1; it is a bound relative to that constant,
//! not a measured operator norm.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polar::SurfaceMeasure;
use crate::rough::{delta_norm, level_index, llogl, zygmund_la, BlockRange, RadialProfile, LEVEL_SAMPLES};

/// Relative tail mass above which a truncated decomposition is rejected.
pub const TAIL_LIMIT: f64 = 1e-10;
/// Relative size of the last row and column of the double sum accepted as converged.
pub const CONVERGENCE_TOL: f64 = 1e-8;
/// Largest index summed when pushing the `m`-series to convergence.
pub const SERIES_CAP: u64 = 1_000_000_000;

/// `E_m` restricted `h`, with the level crossings located inside the blocks.
#[derive(Clone, Debug)]
pub struct RadialLevel {
    pub m: usize,
    pub piece: RadialProfile,
    /// Points where `|h|` changes level, found by bisection.
    pub crossings: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LevelSetDecomposition {
    h: RadialProfile,
    blocks: BlockRange,
    m_max: usize,
    levels: Vec<RadialLevel>,
    weights: Vec<f64>,
    omega: Vec<f64>,
    /// `level_index(|Omega|)` per node.
    omega_level: Vec<usize>,
    /// `e_j = sigma(F_j)`.
    masses: Vec<f64>,
    /// `sigma(Sigma)^{-1} int_{F_j} Omega dsigma`.
    corrections: Vec<f64>,
    total_mass: f64,
}

fn find_crossings(h: &RadialProfile, blocks: BlockRange) -> Vec<f64> {
    if matches!(h, RadialProfile::Constant(_) | RadialProfile::Steps { .. }) {
        return Vec::new();
    }
    let level = |t: f64| level_index(h.abs(t));
    let mut out = Vec::new();
    for k in blocks.iter() {
        let lo = 2f64.powi(k);
        let mut prev_t = lo;
        let mut prev = level(lo);
        for i in 1..=LEVEL_SAMPLES {
            let t = lo * (1.0 + i as f64 / LEVEL_SAMPLES as f64);
            let cur = level(t);
            if cur != prev {
                let (mut a, mut b) = (prev_t, t);
                for _ in 0..60 {
                    let mid = 0.5 * (a + b);
                    if level(mid) == prev {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                out.push(b);
            }
            prev_t = t;
            prev = cur;
        }
    }
    out
}

/// Splits `h` over its dyadic level sets `E_m` and `Omega` over `F_j`, with
/// `Omega_j = Omega chi_{F_j} - sigma(Sigma)^{-1} int_{F_j} Omega`.
pub fn decompose(
    h: &RadialProfile,
    omega: &[f64],
    sm: &SurfaceMeasure,
    blocks: BlockRange,
    m_max: usize,
) -> Result<LevelSetDecomposition> {
    if m_max == 0 {
        return Err(Error::InvalidInput("level truncation must be at least 1".into()));
    }
    if omega.len() != sm.nodes().len() {
        return Err(Error::InvalidInput(format!(
            "{} Omega values for {} surface nodes",
            omega.len(),
            sm.nodes().len()
        )));
    }
    let ln_lo = blocks.first as f64 * LN_2;
    let ln_hi = (blocks.last + 1) as f64 * LN_2;
    let crossings = find_crossings(h, blocks);
    let all = h.log_integral_with(ln_lo, ln_hi, &crossings, |v| v);
    let tail = h.log_integral_with(ln_lo, ln_hi, &crossings, |v| if level_index(v) > m_max { v } else { 0.0 });
    if all > 0.0 && tail > TAIL_LIMIT * all {
        return Err(Error::Truncation {
            m_max,
            tail_mass: tail,
            relative: tail / all,
        });
    }
    let weights: Vec<f64> = sm.nodes().iter().map(|nd| nd.weight).collect();
    let omega_level: Vec<usize> = omega.iter().map(|v| level_index(v.abs())).collect();
    let l1: f64 = weights.iter().zip(omega).map(|(w, v)| w * v.abs()).sum();
    let over: f64 = weights
        .iter()
        .zip(omega)
        .zip(&omega_level)
        .filter(|(_, &l)| l > m_max)
        .map(|((w, v), _)| w * v.abs())
        .sum();
    if l1 > 0.0 && over > TAIL_LIMIT * l1 {
        return Err(Error::Truncation {
            m_max,
            tail_mass: over,
            relative: over / l1,
        });
    }
    let total_mass = sm.total_mass();
    let mut masses = vec![0.0; m_max];
    let mut integrals = vec![0.0; m_max];
    for ((w, v), &l) in weights.iter().zip(omega).zip(&omega_level) {
        if l <= m_max {
            masses[l - 1] += w;
            integrals[l - 1] += w * v;
        }
    }
    let corrections = integrals.iter().map(|i| i / total_mass).collect();
    let levels = (1..=m_max)
        .map(|m| RadialLevel {
            m,
            piece: h.restricted(move |v| level_index(v) == m, crossings.clone()),
            crossings: crossings.clone(),
        })
        .collect();
    Ok(LevelSetDecomposition {
        h: h.clone(),
        blocks,
        m_max,
        levels,
        weights,
        omega: omega.to_vec(),
        omega_level,
        masses,
        corrections,
        total_mass,
    })
}

impl LevelSetDecomposition {
    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn blocks(&self) -> BlockRange {
        self.blocks
    }

    pub fn levels(&self) -> &[RadialLevel] {
        &self.levels
    }

    /// `e_1, ..., e_{M}`.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Indices `m` with `E_m` met by the sampled blocks.
    pub fn occupied_radial(&self) -> Vec<usize> {
        let d = crate::rough::level_densities(&self.h, self.blocks, self.m_max);
        (1..=self.m_max).filter(|&m| d[m - 1] > 0.0).collect()
    }

    /// Node values of `Omega_j`.
    pub fn omega_piece(&self, j: usize) -> Vec<f64> {
        let c = self.corrections[j - 1];
        self.omega
            .iter()
            .zip(&self.omega_level)
            .map(|(v, &l)| if l == j { v - c } else { -c })
            .collect()
    }

    /// `max_t |sum_m h chi_{E_m}(t) - h(t)|` over `samples` points per block.
    pub fn radial_reconstruction_error(&self, samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for k in self.blocks.iter() {
            let lo = 2f64.powi(k);
            for i in 0..samples {
                let t = lo * (1.0 + (i as f64 + 0.5) / samples as f64);
                let sum: num_complex::Complex64 = self.levels.iter().map(|l| l.piece.eval(t)).sum();
                worst = worst.max((sum - self.h.eval(t)).norm());
            }
        }
        worst
    }

    /// `max |sum_j Omega_j - (Omega - mean Omega)|` over the nodes.
    pub fn omega_reconstruction_error(&self) -> f64 {
        let mean: f64 = self.weights.iter().zip(&self.omega).map(|(w, v)| w * v).sum::<f64>() / self.total_mass;
        let mut sum = vec![0.0; self.omega.len()];
        for j in 1..=self.m_max {
            for (s, v) in sum.iter_mut().zip(self.omega_piece(j)) {
                *s += v;
            }
        }
        sum.iter()
            .zip(&self.omega)
            .map(|(s, v)| (s - (v - mean)).abs())
            .fold(0.0, f64::max)
    }

    /// `max_j |int Omega_j dsigma| / (||Omega||_inf sigma(Sigma))`.
    pub fn mean_zero_defect(&self) -> f64 {
        let sup = self.omega.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if sup == 0.0 {
            return 0.0;
        }
        (1..=self.m_max)
            .map(|j| {
                let s: f64 = self.weights.iter().zip(self.omega_piece(j)).map(|(w, v)| w * v).sum();
                s.abs() / (sup * self.total_mass)
            })
            .fold(0.0, f64::max)
    }

    fn omega_lq(&self, values: &[f64], q: f64) -> f64 {
        self.weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v.abs().powf(q))
            .sum::<f64>()
            .powf(1.0 / q)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockNorms {
    pub a: f64,
    pub l_a: f64,
    /// `||h chi_{E_m}||_{Delta_{1+1/m}}`.
    pub radial: Vec<f64>,
    /// `||Omega_j||_{1+1/j}`.
    pub angular: Vec<f64>,
    pub masses: Vec<f64>,
    /// `||h chi_{E_m}|| / (m^{-am/(m+1)} L_a^{m/(m+1)})`.
    pub radial_ratios: Vec<f64>,
    /// `||Omega_j|| / (2^j e_j^{j/(j+1)})`; zero where `e_j = 0`.
    pub angular_ratios: Vec<f64>,
    /// Certified ceiling for `radial_ratios`: `max_m (2 (m / log(2 + 2^{m-1}))^a)^{m/(m+1)}`,
    /// with `log 2` in place of the logarithm for `m = 1`.
    pub radial_ceiling: f64,
    /// Certified ceiling for `angular_ratios`.
    pub angular_ceiling: f64,
}

pub fn block_norms(dec: &LevelSetDecomposition, a: f64) -> Result<BlockNorms> {
    let l_a = zygmund_la(&dec.h, a, dec.blocks)?;
    let mut radial = Vec::with_capacity(dec.m_max);
    let mut radial_ratios = Vec::with_capacity(dec.m_max);
    let mut radial_ceiling: f64 = 0.0;
    for lvl in &dec.levels {
        let mf = lvl.m as f64;
        let s = 1.0 + 1.0 / mf;
        let v = delta_norm(&lvl.piece, s, dec.blocks)?;
        let scale = mf.powf(-a * mf / (mf + 1.0)) * l_a.powf(mf / (mf + 1.0));
        radial.push(v);
        radial_ratios.push(if scale > 0.0 { v / scale } else { 0.0 });
        let log_floor = if lvl.m == 1 { LN_2 } else { (2.0 + 2f64.powi(lvl.m as i32 - 1)).ln() };
        radial_ceiling = radial_ceiling.max((2.0 * (mf / log_floor).powf(a)).powf(mf / (mf + 1.0)));
    }
    let mut angular = Vec::with_capacity(dec.m_max);
    let mut angular_ratios = Vec::with_capacity(dec.m_max);
    for j in 1..=dec.m_max {
        let jf = j as f64;
        let v = dec.omega_lq(&dec.omega_piece(j), 1.0 + 1.0 / jf);
        let e = dec.masses[j - 1];
        let scale = 2f64.powi(j as i32) * e.powf(jf / (jf + 1.0));
        angular.push(v);
        angular_ratios.push(if e > 0.0 { v / scale } else { 0.0 });
    }
    Ok(BlockNorms {
        a,
        l_a,
        radial,
        angular,
        masses: dec.masses.clone(),
        radial_ratios,
        angular_ratios,
        radial_ceiling,
        angular_ceiling: 2.0,
    })
}

/// `(q - 1)^{-1} (s - 1)^{-1}`, which is `j m` at `q = 1 + 1/j`, `s = 1 + 1/m`.
pub fn default_base_bound(q: f64, s: f64) -> f64 {
    1.0 / ((q - 1.0) * (s - 1.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesSplit {
    /// Terms with `e_j < 3^{-j}`.
    pub small: f64,
    pub large: f64,
    /// `sum_j j 2^j 3^{-j^2/(j+1)}`, the bound for `small`.
    pub small_bound: f64,
    /// `sum_j j 2^j e_j 3^{j/(j+1)}`, the bound for `large`.
    pub large_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtrapolationSum {
    pub a: f64,
    /// `terms[m-1][j-1] = base(1+1/j, 1+1/m) ||h chi_{E_m}|| ||Omega_j||`.
    pub terms: Vec<Vec<f64>>,
    pub total: f64,
    /// `sum_{m <= M} m^{1 - am/(m+1)}` at the decomposition's truncation.
    pub m_series_partial: f64,
    /// The `m`-series summed until its remainder bound is below `CONVERGENCE_TOL`
    /// relative; `None` when `a <= 2`.
    pub m_series: Option<f64>,
    /// Index reached and remainder bound for `m_series`.
    pub m_series_terms: u64,
    pub m_series_tail_bound: f64,
    /// Remainder bound of the `m`-series after the decomposition's truncation.
    pub m_series_truncation_tail: f64,
    pub j_series: f64,
    pub split: SeriesSplit,
    /// `(1 + L_a) * m_series * j_series` with all constants set to 1.
    pub relative_bound: Option<f64>,
    /// Last row and column of `terms` within `CONVERGENCE_TOL` of `total`, and `a > 2`.
    pub converged: bool,
    pub warnings: Vec<String>,
}

/// Bound on `sum_{m > M} m^{1 - am/(m+1)}`: `m^{a/(m+1)}` decreases for
/// `m >= 4`, so it is at most `(M+1)^{a/(M+2)} int_M^inf x^{1-a} dx`.
pub fn m_series_tail_bound(a: f64, m: u64) -> f64 {
    if m < 3 {
        return (m + 1..=3).map(|k| m_term(a, k)).sum::<f64>() + m_series_tail_bound(a, 3);
    }
    let mf = m as f64;
    (mf + 1.0).powf(a / (mf + 2.0)) * mf.powf(2.0 - a) / (a - 2.0)
}

fn m_term(a: f64, m: u64) -> f64 {
    let mf = m as f64;
    mf.powf(1.0 - a * mf / (mf + 1.0))
}

/// Remainder allowed for the `m`-series: `CONVERGENCE_TOL`, absolute and relative.
fn series_tolerance(sum: f64) -> f64 {
    CONVERGENCE_TOL * sum.min(1.0)
}

fn m_series_converged(a: f64) -> (f64, u64, f64) {
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut m = 0u64;
    loop {
        for _ in 0..4096 {
            m += 1;
            // Kahan summation keeps the long tail accurate
            let y = m_term(a, m) - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        let tail = m_series_tail_bound(a, m);
        if tail <= series_tolerance(sum) || m >= SERIES_CAP {
            return (sum, m, tail);
        }
    }
}

pub fn extrapolation_sum<F>(dec: &LevelSetDecomposition, a: f64, base_bound: F) -> Result<ExtrapolationSum>
where
    F: Fn(f64, f64) -> f64,
{
    let norms = block_norms(dec, a)?;
    let mm = dec.m_max;
    let mut terms = vec![vec![0.0; mm]; mm];
    let mut total = 0.0;
    for m in 1..=mm {
        for j in 1..=mm {
            let base = base_bound(1.0 + 1.0 / j as f64, 1.0 + 1.0 / m as f64);
            let t = base * norms.radial[m - 1] * norms.angular[j - 1];
            terms[m - 1][j - 1] = t;
            total += t;
        }
    }
    let last_row: f64 = terms[mm - 1].iter().sum();
    let last_col: f64 = terms.iter().map(|r| r[mm - 1]).sum();

    let mut warnings = Vec::new();
    let m_series_partial: f64 = (1..=mm as u64).map(|m| m_term(a, m)).sum();
    let (m_series, m_series_terms, m_series_tail_bound, m_series_truncation_tail) = if a > 2.0 {
        let (s, n, tail) = m_series_converged(a);
        if tail > series_tolerance(s) {
            warnings.push(format!("m-series remainder bound {tail:.3e} after {n} terms"));
        }
        (Some(s), n, tail, m_series_tail_bound(a, mm as u64))
    } else {
        warnings.push(format!(
            "a = {a} <= 2: sum m^(1 - am/(m+1)) diverges; partial sums reported only"
        ));
        (None, mm as u64, f64::INFINITY, f64::INFINITY)
    };

    let mut split = SeriesSplit {
        small: 0.0,
        large: 0.0,
        small_bound: 0.0,
        large_bound: 0.0,
    };
    let mut j_series = 0.0;
    for j in 1..=mm {
        let jf = j as f64;
        let e = dec.masses[j - 1];
        let t = jf * 2f64.powi(j as i32) * e.powf(jf / (jf + 1.0));
        j_series += t;
        if e < 3f64.powf(-jf) {
            split.small += t;
        } else {
            split.large += t;
            split.large_bound += jf * 2f64.powi(j as i32) * e * 3f64.powf(jf / (jf + 1.0));
        }
        split.small_bound += jf * 2f64.powi(j as i32) * 3f64.powf(-jf * jf / (jf + 1.0));
    }
    let converged = a > 2.0
        && m_series_tail_bound <= series_tolerance(m_series.unwrap_or(0.0))
        && last_row <= CONVERGENCE_TOL * total
        && last_col <= CONVERGENCE_TOL * total;
    if last_row > CONVERGENCE_TOL * total || last_col > CONVERGENCE_TOL * total {
        warnings.push(format!("double sum truncated at M = {mm} with non-negligible edge terms"));
    }
    Ok(ExtrapolationSum {
        a,
        terms,
        total,
        m_series_partial,
        relative_bound: m_series.map(|m| (1.0 + norms.l_a) * m * j_series),
        m_series,
        m_series_terms,
        m_series_tail_bound,
        m_series_truncation_tail,
        j_series,
        split,
        converged,
        warnings,
    })
}

/// `C` for which `sum_j j 2^j e_j^{j/(j+1)} <= C + C LlogL(Omega)` holds for
/// every `Omega` on a surface of mass `sigma`:
/// `max(sum_j j 2^j 3^{-j^2/(j+1)} + 6 sigma, 12 / log 2)`.
pub fn j_series_constant(total_mass: f64) -> f64 {
    let head: f64 = (1..=200)
        .map(|j| {
            let jf = j as f64;
            jf * 2f64.powi(j) * 3f64.powf(-jf * jf / (jf + 1.0))
        })
        .sum();
    (head + 6.0 * total_mass).max(12.0 / LN_2)
}

/// `LlogL(Omega)` for the decomposition's `Omega`.
pub fn omega_llogl(dec: &LevelSetDecomposition, sm: &SurfaceMeasure) -> f64 {
    llogl(sm, &dec.omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SquareMatrix;
    use crate::quasinorm::QuasiNormContext;
    use std::sync::Arc;

    fn circle() -> SurfaceMeasure {
        let ctx = Arc::new(QuasiNormContext::new(&SquareMatrix::identity(2)).unwrap());
        SurfaceMeasure::new(ctx, 256).unwrap()
    }

    fn values(sm: &SurfaceMeasure, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        sm.nodes().iter().map(|nd| f(&nd.u)).collect()
    }

    const BLOCKS: BlockRange = BlockRange { first: -4, last: 4 };

    #[test]
    fn bounded_data_collapse_to_first_level() {
        let sm = circle();
        let om = values(&sm, |u| 1.5 * u[0] + 0.2);
        let dec = decompose(&RadialProfile::Constant(1.0), &om, &sm, BLOCKS, 10).unwrap();
        assert_eq!(dec.occupied_radial(), vec![1]);
        assert!((dec.masses()[0] - sm.total_mass()).abs() < 1e-12);
        let mean: f64 = sm.nodes().iter().zip(&om).map(|(n, v)| n.weight * v).sum::<f64>() / sm.total_mass();
        for (p, v) in dec.omega_piece(1).iter().zip(&om) {
            assert!((p - (v - mean)).abs() < 1e-14);
        }
        let norms = block_norms(&dec, 3.0).unwrap();
        assert!((norms.radial[0] - LN_2.sqrt()).abs() < 1e-12);
        let sum = extrapolation_sum(&dec, 3.0, default_base_bound).unwrap();
        assert!((sum.total - sum.terms[0][0]).abs() <= 1e-15 * sum.total);
        assert!(sum.converged);
    }

    #[test]
    fn raised_block_lands_in_second_level() {
        let sm = circle();
        let h = RadialProfile::steps(vec![2.0, 4.0], vec![1.0, 3.0, 1.0]).unwrap();
        let dec = decompose(&h, &values(&sm, |u| u[0]), &sm, BLOCKS, 10).unwrap();
        assert_eq!(dec.occupied_radial(), vec![1, 2]);
        assert_eq!(dec.levels()[1].piece.eval(3.0).re, 3.0);
        assert_eq!(dec.levels()[1].piece.eval(5.0).re, 0.0);
        assert_eq!(dec.levels()[0].piece.eval(3.0).re, 0.0);
        assert!(dec.radial_reconstruction_error(200) == 0.0);
    }

    #[test]
    fn linear_omega_spreads_over_three_levels() {
        let sm = circle();
        let om = values(&sm, |u| 5.0 * u[0]);
        let dec = decompose(&RadialProfile::Constant(1.0), &om, &sm, BLOCKS, 10).unwrap();
        let e = dec.masses();
        assert!(e[0] > 0.0 && e[1] > 0.0 && e[2] > 0.0);
        assert!(e[3..].iter().all(|&v| v == 0.0));
        // counted independently from the nodes
        let want: f64 = sm.nodes().iter().filter(|n| 5.0 * n.u[0].abs() > 4.0).map(|n| n.weight).sum();
        assert!((e[2] - want).abs() < 1e-13);
        assert!((e.iter().sum::<f64>() - sm.total_mass()).abs() < 1e-12);
        assert!(dec.mean_zero_defect() < 1e-12);
        assert!(dec.omega_reconstruction_error() < 1e-13);
        let norms = block_norms(&dec, 3.0).unwrap();
        assert!(norms.angular_ratios.iter().all(|&r| r <= norms.angular_ceiling));
    }

    #[test]
    fn smooth_crossings_found() {
        let sm = circle();
        let h = RadialProfile::Power { re: 1.0, im: 0.5 };
        let dec = decompose(&h, &values(&sm, |u| u[1]), &sm, BlockRange { first: -2, last: 3 }, 10).unwrap();
        assert!(dec.levels()[0].crossings.iter().any(|c| (c - 2.0).abs() < 1e-9));
        assert!(dec.radial_reconstruction_error(500) < 1e-15);
        let norms = block_norms(&dec, 3.0).unwrap();
        for r in &norms.radial_ratios {
            assert!(*r <= norms.radial_ceiling);
        }
    }

    #[test]
    fn heavy_tail_is_rejected() {
        let sm = circle();
        let h = RadialProfile::Power { re: 40.0, im: 0.0 };
        let r = decompose(&h, &values(&sm, |u| u[0]), &sm, BlockRange { first: 0, last: 2 }, 50);
        assert!(matches!(r, Err(Error::Truncation { m_max: 50, .. })));
    }

    #[test]
    fn boundary_exponent_warns() {
        let sm = circle();
        let dec = decompose(&RadialProfile::Constant(1.0), &values(&sm, |u| u[0]), &sm, BLOCKS, 5).unwrap();
        let s = extrapolation_sum(&dec, 2.0, default_base_bound).unwrap();
        assert!(!s.converged);
        assert!(s.m_series.is_none());
        assert!(!s.warnings.is_empty());
    }

    #[test]
    fn m_series_remainder_bound_holds() {
        // the bound at M dominates a long direct partial tail
        let a = 3.0;
        let direct: f64 = (51..200_000u64).map(|m| m_term(a, m)).sum();
        assert!(direct <= m_series_tail_bound(a, 50));
        assert!(direct > 0.01);
    }
}
