//! Smooth dyadic windows `psi_k` with `sum_k psi_k^2 = 1`.
//!
//! In `v = log t + k log beta` every window is the same profile
//! `Phi(v) = sin(Theta(v + L/2)) cos(Theta(v - L/2))`, `L = log beta`, where
//! `Theta` rises from `0` to `pi/2` across a transition of fixed width
//! `log 2`. Neighbouring windows overlap only inside one transition, where
//! they are `cos` and `sin` of the same angle.

use std::f64::consts::{FRAC_PI_2, LN_2};

use serde::Serialize;

use crate::error::{Error, Result};

/// Width of each transition in `log t`.
pub const TRANSITION: f64 = LN_2;

fn bump(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

fn bump_prime(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        bump(x) / (x * x)
    }
}

/// Smooth step from 0 on `x <= 0` to 1 on `x >= 1`.
fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = bump(x);
        a / (a + bump(1.0 - x))
    }
}

fn smooth_step_prime(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let (a, b) = (bump(x), bump(1.0 - x));
    (bump_prime(x) * b + a * bump_prime(1.0 - x)) / ((a + b) * (a + b))
}

fn angle(v: f64) -> f64 {
    FRAC_PI_2 * smooth_step(v / TRANSITION + 0.5)
}

fn angle_prime(v: f64) -> f64 {
    FRAC_PI_2 * smooth_step_prime(v / TRANSITION + 0.5) / TRANSITION
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindowFamily {
    beta: f64,
    log_beta: f64,
}

pub fn build_windows(beta: f64) -> Result<WindowFamily> {
    WindowFamily::new(beta)
}

impl WindowFamily {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta >= 2.0) || !beta.is_finite() {
            return Err(Error::Domain(format!("window base must be >= 2, got {beta}")));
        }
        Ok(Self {
            beta,
            log_beta: beta.ln(),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn profile(&self, v: f64) -> f64 {
        let half = 0.5 * self.log_beta;
        // cos(pi/2 s(x)) = sin(pi/2 s(1 - x)) keeps tiny values and exact zeros
        let rise = smooth_step((v + half) / TRANSITION + 0.5);
        let fall = smooth_step(0.5 - (v - half) / TRANSITION);
        (FRAC_PI_2 * rise).sin() * (FRAC_PI_2 * fall).sin()
    }

    fn profile_prime(&self, v: f64) -> f64 {
        let half = 0.5 * self.log_beta;
        let (a, b) = (angle(v + half), angle(v - half));
        a.cos() * angle_prime(v + half) * b.cos() - a.sin() * b.sin() * angle_prime(v - half)
    }

    pub fn psi(&self, k: i32, t: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        self.profile(t.ln() + k as f64 * self.log_beta)
    }

    pub fn psi_prime(&self, k: i32, t: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        self.profile_prime(t.ln() + k as f64 * self.log_beta) / t
    }

    /// Indices `k` with `psi_k(t) != 0` possible.
    pub fn active(&self, t: f64) -> std::ops::RangeInclusive<i32> {
        let c = -t.ln() / self.log_beta;
        (c.floor() as i32 - 1)..=(c.ceil() as i32 + 1)
    }

    pub fn square_sum(&self, t: f64) -> f64 {
        self.active(t).map(|k| self.psi(k, t).powi(2)).sum()
    }

    /// Exact support of `psi_k`: `|log t + k log beta| < (log beta + log 2) / 2`.
    pub fn support(&self, k: i32) -> (f64, f64) {
        let reach = 0.5 * (self.log_beta + TRANSITION);
        let centre = -(k as f64) * self.log_beta;
        ((centre - reach).exp(), (centre + reach).exp())
    }

    /// `[beta^{-k-1}, beta^{-k+1}]`, which contains the support.
    pub fn support_bound(&self, k: i32) -> (f64, f64) {
        (self.beta.powi(-k - 1), self.beta.powi(-k + 1))
    }

    /// `sup_t t |psi_0'(t)|` over `samples` points of the support.
    pub fn derivative_sup(&self, samples: usize) -> f64 {
        let reach = 0.5 * (self.log_beta + TRANSITION);
        (0..=samples)
            .map(|i| {
                let v = -reach + 2.0 * reach * i as f64 / samples as f64;
                self.profile_prime(v).abs()
            })
            .fold(0.0, f64::max)
    }
}
