use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dilation::SpectralDecomposition;
use crate::error::{Error, Result};
use crate::linalg::{bilinear, complexify_vec};

fn check_nonzero(name: &str, v: &[f64]) -> Result<()> {
    if v.iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidInput(format!("{name} must be nonzero")));
    }
    Ok(())
}

/// `<(A - gamma_i E)^j P_i(A) eta, A^T zeta>` for every cluster `i` and `j < m_i`,
/// without the factorial.
fn raw_pairings(sd: &SpectralDecomposition, eta: &[f64], target: &[f64]) -> Vec<Vec<Complex64>> {
    let eta_c = complexify_vec(eta);
    let target_c = complexify_vec(target);
    sd.clusters()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            (0..c.multiplicity)
                .map(|j| bilinear(&(sd.nilpotent_power(i, j) * &eta_c), &target_c))
                .collect()
        })
        .collect()
}

fn adjoint_image(sd: &SpectralDecomposition, zeta: &[f64]) -> Vec<f64> {
    let a = sd.matrix().as_matrix();
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)] * zeta[i]).sum())
        .collect()
}

/// `J(A, eta, zeta) = sum_ij |<(A - gamma_i E)^j P_i(A) eta, A^T zeta>|`.
pub fn compute_j(sd: &SpectralDecomposition, eta: &[f64], zeta: &[f64]) -> Result<f64> {
    check_nonzero("eta", eta)?;
    check_nonzero("zeta", zeta)?;
    let at_zeta = adjoint_image(sd, zeta);
    Ok(raw_pairings(sd, eta, &at_zeta)
        .iter()
        .flatten()
        .map(|z| z.norm())
        .sum())
}

/// `|<A eta, zeta>|`, never larger than `J`.
pub fn lower_bound_pairing(sd: &SpectralDecomposition, eta: &[f64], zeta: &[f64]) -> f64 {
    let at_zeta = adjoint_image(sd, zeta);
    eta.iter().zip(&at_zeta).map(|(a, b)| a * b).sum::<f64>().abs()
}

/// One cluster of `sum_j c_j s^j e^{gamma s}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTerm {
    pub gamma: Complex64,
    pub coeffs: Vec<Complex64>,
}

impl PhaseTerm {
    /// Coefficients of `d/ds` of this term, in the same basis.
    fn derivative(&self) -> PhaseTerm {
        let m = self.coeffs.len();
        let coeffs = (0..m)
            .map(|j| {
                let next = if j + 1 < m {
                    self.coeffs[j + 1] * (j + 1) as f64
                } else {
                    Complex64::new(0.0, 0.0)
                };
                self.gamma * self.coeffs[j] + next
            })
            .collect();
        PhaseTerm {
            gamma: self.gamma,
            coeffs,
        }
    }

    fn eval(&self, s: f64) -> Complex64 {
        let mut poly = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            poly = poly * s + c;
        }
        poly * (self.gamma * s).exp()
    }
}

/// `phi'(s) = sum_i sum_j c_ij s^j e^{gamma_i s}`, the derivative of the phase
/// in the logarithmic variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseExpansion {
    terms: Vec<PhaseTerm>,
}

impl PhaseExpansion {
    pub fn new(terms: Vec<PhaseTerm>) -> Result<Self> {
        if terms.is_empty() || terms.iter().any(|t| t.coeffs.is_empty()) {
            return Err(Error::InvalidInput("phase expansion needs nonempty clusters".into()));
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[PhaseTerm] {
        &self.terms
    }

    /// `N = sum m_i`, the order of the underlying linear ODE.
    pub fn order(&self) -> usize {
        self.terms.iter().map(|t| t.coeffs.len()).sum()
    }

    /// `N_1 = sum |c_ij|`.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.iter().flat_map(|t| &t.coeffs).map(|c| c.norm()).sum()
    }

    pub fn is_degenerate(&self) -> bool {
        self.coefficient_norm() == 0.0
    }

    /// `phi'(s)`; the imaginary part cancels for real data.
    pub fn eval(&self, s: f64) -> f64 {
        self.eval_complex(s).re
    }

    pub fn eval_complex(&self, s: f64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(s)).sum()
    }

    /// The expansion of `d^order/ds^order phi'`.
    pub fn differentiate(&self, order: usize) -> PhaseExpansion {
        let mut cur = self.clone();
        for _ in 0..order {
            cur = PhaseExpansion {
                terms: cur.terms.iter().map(PhaseTerm::derivative).collect(),
            };
        }
        cur
    }

    /// `phi^{(1)}, ..., phi^{(k)}` at `s`, with `k = N`.
    pub fn derivative_stack(&self, s: f64) -> Vec<f64> {
        let k = self.order();
        let mut out = Vec::with_capacity(k);
        let mut cur = self.clone();
        for l in 0..k {
            if l > 0 {
                cur = cur.differentiate(1);
            }
            out.push(cur.eval(s));
        }
        out
    }
}

/// Coefficients `c_ij = (1/j!) <(A - gamma_i E)^j P_i(A) eta, A^T zeta>`.
pub fn phase_coefficients(sd: &SpectralDecomposition, eta: &[f64], zeta: &[f64]) -> Result<PhaseExpansion> {
    check_nonzero("eta", eta)?;
    check_nonzero("zeta", zeta)?;
    let at_zeta = adjoint_image(sd, zeta);
    let raw = raw_pairings(sd, eta, &at_zeta);
    let terms = sd
        .clusters()
        .iter()
        .zip(raw)
        .map(|(c, vals)| {
            let mut fact = 1.0;
            let coeffs = vals
                .into_iter()
                .enumerate()
                .map(|(j, v)| {
                    if j > 0 {
                        fact *= j as f64;
                    }
                    v / fact
                })
                .collect();
            PhaseTerm {
                gamma: c.eigenvalue,
                coeffs,
            }
        })
        .collect();
    PhaseExpansion::new(terms)
}

/// The phase `psi(s) = <e^{sA} eta, zeta>` together with its `s`-derivative.
#[derive(Clone, Debug)]
pub struct PhaseFunction {
    value: PhaseExpansion,
    derivative: PhaseExpansion,
}

impl PhaseFunction {
    pub fn new(sd: &SpectralDecomposition, eta: &[f64], zeta: &[f64]) -> Result<Self> {
        check_nonzero("eta", eta)?;
        check_nonzero("zeta", zeta)?;
        let raw = raw_pairings(sd, eta, zeta);
        let terms = sd
            .clusters()
            .iter()
            .zip(raw)
            .map(|(c, vals)| {
                let mut fact = 1.0;
                let coeffs = vals
                    .into_iter()
                    .enumerate()
                    .map(|(j, v)| {
                        if j > 0 {
                            fact *= j as f64;
                        }
                        v / fact
                    })
                    .collect();
                PhaseTerm {
                    gamma: c.eigenvalue,
                    coeffs,
                }
            })
            .collect();
        Ok(Self {
            value: PhaseExpansion::new(terms)?,
            derivative: phase_coefficients(sd, eta, zeta)?,
        })
    }

    /// `psi(s)`.
    pub fn value(&self, s: f64) -> f64 {
        self.value.eval(s)
    }

    /// `psi'(s) = t d/dt <t^A eta, zeta>` at `t = e^s`.
    pub fn slope(&self, s: f64) -> f64 {
        self.derivative.eval(s)
    }

    pub fn expansion(&self) -> &PhaseExpansion {
        &self.derivative
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SquareMatrix;
    use approx::assert_relative_eq;

    fn sd(rows: &[&[f64]]) -> SpectralDecomposition {
        let m = SquareMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
        SpectralDecomposition::new(&m, 1e-6).unwrap()
    }

    #[test]
    fn identity_j_is_inner_product() {
        let s = sd(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let (eta, zeta) = ([1.0, 2.0], [3.0, -0.5]);
        assert_relative_eq!(compute_j(&s, &eta, &zeta).unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(lower_bound_pairing(&s, &eta, &zeta), 2.0, epsilon = 1e-14);
        let pe = phase_coefficients(&s, &eta, &zeta).unwrap();
        assert_eq!(pe.order(), 1);
        assert_relative_eq!(pe.terms()[0].coeffs[0].re, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn diagonal_hand_computation() {
        let s = sd(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let (eta, zeta) = ([1.0, 1.0], [0.0, 1.0]);
        assert_relative_eq!(compute_j(&s, &eta, &zeta).unwrap(), 2.0, epsilon = 1e-13);
        assert_relative_eq!(lower_bound_pairing(&s, &eta, &zeta), 2.0, epsilon = 1e-13);
        let big = [0.0, 10.0];
        assert_relative_eq!(compute_j(&s, &eta, &big).unwrap(), 20.0, epsilon = 1e-12);
    }

    #[test]
    fn cancelling_clusters_witness_strict_inequality() {
        let s = sd(&[&[1.0, 0.0], &[0.0, 2.0]]);
        // <A eta, zeta> = 2 - 2 = 0 while both cluster terms are 2
        let (eta, zeta) = ([2.0, 1.0], [1.0, -1.0]);
        assert!(lower_bound_pairing(&s, &eta, &zeta) < 1e-14);
        assert_relative_eq!(compute_j(&s, &eta, &zeta).unwrap(), 4.0, epsilon = 1e-13);
    }

    #[test]
    fn jordan_coefficients() {
        let s = sd(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let (eta, zeta) = ([0.0, 1.0], [1.0, 0.0]);
        let pe = phase_coefficients(&s, &eta, &zeta).unwrap();
        // A^T zeta = (1, 1); P = E so c_10 = eta . (1, 1) = 1
        assert_relative_eq!(pe.terms()[0].coeffs[0].re, 1.0, epsilon = 1e-12);
        // (A - E) eta = (1, 0) so c_11 = 1
        assert_relative_eq!(pe.terms()[0].coeffs[1].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn reconstruction_matches_finite_difference() {
        let s = sd(&[&[1.0, -1.0, 0.0], &[1.0, 1.0, 0.0], &[0.0, 0.3, 2.0]]);
        let (eta, zeta) = ([0.4, 1.0, -0.7], [1.0, 0.2, 0.5]);
        let phase = PhaseFunction::new(&s, &eta, &zeta).unwrap();
        for &x in &[-0.5, 0.0, 0.3, 1.1] {
            let h = 1e-5;
            let fd = (phase.value(x + h) - phase.value(x - h)) / (2.0 * h);
            assert!((fd - phase.slope(x)).abs() < 1e-8 * (1.0 + fd.abs()));
            // direct evaluation through the dilation
            let d = s.dilation_real(x.exp()).unwrap();
            let direct: f64 = crate::linalg::mat_vec(&d, &eta).iter().zip(&zeta).map(|(a, b)| a * b).sum();
            assert!((direct - phase.value(x)).abs() < 1e-11 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn derivative_recurrence() {
        let pe = PhaseExpansion::new(vec![PhaseTerm {
            gamma: Complex64::new(0.5, 0.0),
            coeffs: vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
        }])
        .unwrap();
        // f = (1 + 2s) e^{s/2}, f' = (2.5 + s) e^{s/2}
        let d = pe.differentiate(1);
        for s in [0.0, 1.0, -2.0] {
            assert_relative_eq!(d.eval(s), (2.5 + s) * (0.5 * s).exp(), max_relative = 1e-14);
        }
    }
}
