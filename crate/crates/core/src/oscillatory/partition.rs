//! Splitting an interval into pieces on which one derivative of the phase
//! dominates and `phi'` is monotone.

use serde::Serialize;

use super::phase::PhaseExpansion;
use crate::error::{Error, Result};

/// Largest number of pieces accepted before the phase is declared pathological.
pub const H_MAX: usize = 64;
const TIE_SLACK: f64 = 1e-12;
const MIN_GRID: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct State {
    order: usize,
    increasing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    /// The dominant derivative order `l` in `1..=k`.
    pub order: usize,
    /// Whether `phi'` is nondecreasing on the piece.
    pub increasing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Partition {
    pub pieces: Vec<Piece>,
    /// `N_1 = sum |c_ij|`.
    pub coefficient_norm: f64,
}

struct Evaluator {
    stack: Vec<PhaseExpansion>,
    curvature: PhaseExpansion,
    k: usize,
}

impl Evaluator {
    fn new(pe: &PhaseExpansion) -> Self {
        let k = pe.order();
        let mut stack = vec![pe.clone()];
        for _ in 1..k {
            let next = stack.last().expect("nonempty").differentiate(1);
            stack.push(next);
        }
        Self {
            curvature: pe.differentiate(1),
            stack,
            k,
        }
    }

    /// `|phi^{(l)}(s)|` for `l = 1..=k`.
    fn magnitudes(&self, s: f64) -> Vec<f64> {
        self.stack.iter().map(|d| d.eval(s).abs()).collect()
    }

    fn state(&self, s: f64) -> State {
        let mags = self.magnitudes(s);
        let peak = mags.iter().copied().fold(0.0, f64::max);
        let order = mags
            .iter()
            .position(|&m| m >= peak * (1.0 - TIE_SLACK))
            .unwrap_or(0)
            + 1;
        let curv = self.curvature.eval(s);
        let scale = peak.max(curv.abs());
        State {
            order,
            increasing: curv >= -TIE_SLACK * scale,
        }
    }
}

fn refine(ev: &Evaluator, a: f64, sa: State, b: f64, sb: State, out: &mut Vec<f64>, budget: &mut usize) {
    if sa == sb || *budget == 0 {
        return;
    }
    let mid = 0.5 * (a + b);
    if b - a <= 1e-12 * (1.0 + a.abs().max(b.abs())) || mid <= a || mid >= b {
        out.push(mid);
        *budget -= 1;
        return;
    }
    let sm = ev.state(mid);
    refine(ev, a, sa, mid, sm, out, budget);
    refine(ev, mid, sm, b, sb, out, budget);
}

/// Locates the pieces by scanning a grid of `grid_density` cells and bisecting
/// each cell whose endpoints disagree.
pub fn vdc_partition(pe: &PhaseExpansion, interval: (f64, f64), grid_density: usize) -> Result<Partition> {
    let (lo, hi) = interval;
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput(format!("interval [{lo}, {hi}] is empty")));
    }
    if pe.is_degenerate() {
        return Err(Error::InvalidInput("phase derivative vanishes identically".into()));
    }
    let ev = Evaluator::new(pe);
    let cells = grid_density.max(MIN_GRID);
    let grid: Vec<f64> = (0..=cells)
        .map(|i| if i == cells { hi } else { lo + (hi - lo) * i as f64 / cells as f64 })
        .collect();
    let states: Vec<State> = grid.iter().map(|&s| ev.state(s)).collect();
    let mut cuts = Vec::new();
    let mut budget = 4 * H_MAX;
    for i in 0..cells {
        refine(&ev, grid[i], states[i], grid[i + 1], states[i + 1], &mut cuts, &mut budget);
    }
    let mut bounds = vec![lo];
    bounds.extend(cuts);
    bounds.push(hi);

    let mut pieces: Vec<Piece> = Vec::new();
    for w in bounds.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let st = ev.state(0.5 * (w[0] + w[1]));
        match pieces.last_mut() {
            Some(p) if p.order == st.order && p.increasing == st.increasing => p.hi = w[1],
            _ => pieces.push(Piece {
                lo: w[0],
                hi: w[1],
                order: st.order,
                increasing: st.increasing,
            }),
        }
    }
    if pieces.len() > H_MAX {
        return Err(Error::PathologicalPhase {
            count: pieces.len(),
            limit: H_MAX,
        });
    }
    debug_assert!(pieces.iter().all(|p| p.order <= ev.k));
    Ok(Partition {
        pieces,
        coefficient_norm: pe.coefficient_norm(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionCheck {
    pub dominance_holds: bool,
    pub monotone_holds: bool,
    /// `min |phi^{(l_m)}| / N_1` over all samples.
    pub floor: f64,
    pub covers: bool,
}

impl PartitionCheck {
    pub fn passes(&self) -> bool {
        self.dominance_holds && self.monotone_holds && self.covers && self.floor > 0.0
    }
}

/// Samples every piece and checks dominance, monotonicity and coverage.
pub fn verify_partition(pe: &PhaseExpansion, part: &Partition, interval: (f64, f64), samples: usize) -> PartitionCheck {
    const SLACK: f64 = 1e-9;
    let ev = Evaluator::new(pe);
    let mut dominance_holds = true;
    let mut monotone_holds = true;
    let mut floor = f64::INFINITY;
    let n1 = part.coefficient_norm;
    for p in &part.pieces {
        for m in 0..samples.max(2) {
            let s = p.lo + (p.hi - p.lo) * m as f64 / (samples.max(2) - 1) as f64;
            let mags = ev.magnitudes(s);
            let peak = mags.iter().copied().fold(0.0, f64::max);
            let lead = mags[p.order - 1];
            if lead < peak * (1.0 - SLACK) {
                dominance_holds = false;
            }
            let curv = ev.curvature.eval(s);
            let scale = peak.max(curv.abs());
            let signed = if p.increasing { curv } else { -curv };
            if signed < -SLACK * scale {
                monotone_holds = false;
            }
            floor = floor.min(lead / n1);
        }
    }
    let covers = part.pieces.first().map(|p| p.lo) == Some(interval.0)
        && part.pieces.last().map(|p| p.hi) == Some(interval.1)
        && part.pieces.windows(2).all(|w| w[0].hi == w[1].lo);
    PartitionCheck {
        dominance_holds,
        monotone_holds,
        floor,
        covers,
    }
}
