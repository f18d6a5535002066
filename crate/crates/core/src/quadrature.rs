//! Gauss-Legendre rules, an adaptive Gauss-Kronrod integrator and the
//! log-log regression used by the decay reports.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// A fixed Gauss-Legendre rule mapped to arbitrary intervals.
#[derive(Clone, Debug)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        self.mapped(lo, hi).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over `panels` equal sub-intervals of each piece
    /// delimited by `breaks` (sorted, endpoints included).
    pub fn composite<F: FnMut(f64) -> f64>(&self, breaks: &[f64], panels: usize, mut f: F) -> f64 {
        let mut acc = 0.0;
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b <= a {
                continue;
            }
            let h = (b - a) / panels as f64;
            for p in 0..panels {
                let lo = a + h * p as f64;
                acc += self.integrate(lo, lo + h, &mut f);
            }
        }
        acc
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod 7/15 panel: (Kronrod value, |Kronrod - Gauss|).
pub fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, lo: f64, hi: f64) -> (Complex64, f64) {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let fc = f(mid);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * half, ((kron - gauss) * half).norm())
}

#[derive(Clone, Copy, Debug)]
pub struct Adaptive {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// Adaptive Gauss-Kronrod over a list of initial panels. A panel is accepted
/// once its Kronrod/Gauss discrepancy is below `abs_tol` scaled by the panel's
/// share of the total length. Panels are processed left to right, so the
/// summation order is deterministic.
pub fn adaptive_gk15<F: FnMut(f64) -> Complex64>(
    mut f: F,
    panels: &[(f64, f64)],
    abs_tol: f64,
    max_evaluations: usize,
) -> Result<Adaptive> {
    let total: f64 = panels.iter().map(|(a, b)| b - a).sum();
    if total <= 0.0 {
        return Ok(Adaptive {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut stack: Vec<(f64, f64, usize)> = panels.iter().rev().map(|&(a, b)| (a, b, 0)).collect();
    while let Some((a, b, depth)) = stack.pop() {
        let (v, e) = gk15(&mut f, a, b);
        evaluations += 15;
        let local = abs_tol * (b - a) / total;
        let mid = 0.5 * (a + b);
        if e <= local || depth >= 60 || mid <= a || mid >= b {
            value += v;
            error += e;
        } else {
            stack.push((mid, b, depth + 1));
            stack.push((a, mid, depth + 1));
        }
        if evaluations > max_evaluations {
            return Err(Error::BudgetExceeded {
                budget: max_evaluations,
                achieved: error,
            });
        }
    }
    Ok(Adaptive {
        value,
        error,
        evaluations,
    })
}

/// Splits `[lo, hi]` at the interior `breaks` and then uniformly into at
/// least `pieces` panels overall.
pub fn initial_panels(lo: f64, hi: f64, breaks: &[f64], pieces: usize) -> Vec<(f64, f64)> {
    let mut cuts = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&b| b > lo && b < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(hi);
    let total = hi - lo;
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let share = ((b - a) / total * pieces as f64).ceil().max(1.0) as usize;
        let h = (b - a) / share as f64;
        for p in 0..share {
            let start = a + h * p as f64;
            let end = if p + 1 == share { b } else { start + h };
            out.push((start, end));
        }
    }
    out
}

/// `count` points geometrically spaced from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`. Points with non-positive
/// values are skipped; `None` if fewer than two points remain.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Running supremum from the right: `out[i] = max(ys[i..])`.
pub fn tail_supremum(ys: &[f64]) -> Vec<f64> {
    let mut out = ys.to_vec();
    for i in (0..out.len().saturating_sub(1)).rev() {
        out[i] = out[i].max(out[i + 1]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 12, 33] {
            let rule = GaussRule::new(n);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "n={n} weight sum {wsum}");
            let deg = 2 * n - 1;
            let got = rule.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((got - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let omega = 200.0;
        let exact = ((omega * 3.0_f64).sin() - (omega * 1.0_f64).sin()) / omega;
        let panels = initial_panels(1.0, 3.0, &[], 64);
        let r = adaptive_gk15(|x| Complex64::new((omega * x).cos(), 0.0), &panels, 1e-12, 1_000_000).unwrap();
        assert!((r.value.re - exact).abs() < 1e-11);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = log_grid(1.0, 1e3, 10);
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-0.75)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() + 0.75).abs() < 1e-12);
    }

    #[test]
    fn panels_respect_breaks() {
        let p = initial_panels(0.0, 1.0, &[0.3, 0.3, 2.0], 4);
        assert!(p.iter().any(|&(a, _)| a == 0.3));
        assert_eq!(p.first().unwrap().0, 0.0);
        assert_eq!(p.last().unwrap().1, 1.0);
    }
}
