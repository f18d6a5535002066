//! Minimal polynomials, spectral projections by partial fractions, and the
//! finite-sum evaluation of `t^A`.
//!
//! For `phi_A(t) = prod (t - gamma_i)^{m_i}` the projections are
//! `P_i(A) = b_i(A) prod_{l != i} (A - gamma_l E)^{m_l}` where the `b_i` solve
//! `1 / phi_A = sum b_i / (t - gamma_i)^{m_i}`. With the nilpotent parts
//! `N_i = (A - gamma_i E) P_i(A)` cached, the dilation is
//! `t^A = sum_i t^{gamma_i} sum_{j < m_i} (log t)^j / j! N_i^j P_i(A)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{complexify, frobenius, singular_values, CMatrix, CVector, SquareMatrix};

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-5;

/// Ceiling on `||sum P_i - E||` before a decomposition is rejected.
const PROJECTION_SUM_LIMIT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cluster {
    pub eigenvalue: Complex64,
    /// Size of the largest Jordan block, the exponent in the minimal polynomial.
    pub multiplicity: usize,
    /// Algebraic multiplicity (number of eigenvalues in the cluster).
    pub algebraic: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimalPolynomial {
    clusters: Vec<Cluster>,
}

impl MinimalPolynomial {
    pub fn from_clusters(clusters: Vec<Cluster>) -> Self {
        Self { clusters }
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    /// Number of distinct eigenvalues `k`.
    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    /// `N = sum m_i`.
    pub fn degree(&self) -> usize {
        self.clusters.iter().map(|c| c.multiplicity).sum()
    }

    /// Monic coefficients, lowest degree first.
    pub fn coefficients(&self) -> Vec<Complex64> {
        let mut poly = vec![Complex64::new(1.0, 0.0)];
        for c in &self.clusters {
            for _ in 0..c.multiplicity {
                poly = poly_mul(&poly, &[-c.eigenvalue, Complex64::new(1.0, 0.0)]);
            }
        }
        poly
    }

    /// `phi_A(A)`, which vanishes for the true minimal polynomial.
    pub fn evaluate_at(&self, a: &SquareMatrix) -> CMatrix {
        let ac = a.to_complex();
        let n = a.dim();
        let eye = CMatrix::identity(n, n);
        let mut acc = eye.clone();
        for c in &self.clusters {
            let shifted = &ac - &eye * c.eigenvalue;
            for _ in 0..c.multiplicity {
                acc = &acc * &shifted;
            }
        }
        acc
    }
}

/// Clusters the spectrum of `a` and finds each Jordan index by rank tests.
pub fn minimal_polynomial(a: &SquareMatrix, tol: f64) -> Result<MinimalPolynomial> {
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(Error::InvalidInput(format!(
            "clustering tolerance {tol} outside (0, 1e-4]"
        )));
    }
    let n = a.dim();
    let scale = a.as_matrix().norm().max(1.0);
    let eig = a.eigenvalues();
    let radius = tol * scale;

    // single-linkage clustering
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut c = i;
        while p[c] != r {
            let nx = p[c];
            p[c] = r;
            c = nx;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (eig[i] - eig[j]).norm() <= radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    let mut centers: Vec<(Complex64, usize)> = groups
        .iter()
        .map(|g| {
            let sum: Complex64 = g.iter().map(|&i| eig[i]).sum();
            (sum / g.len() as f64, g.len())
        })
        .collect();
    centers.sort_by(|x, y| {
        x.0.re
            .total_cmp(&y.0.re)
            .then_with(|| x.0.im.total_cmp(&y.0.im))
    });

    let threshold = 10.0 * radius;
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            let gap = (centers[i].0 - centers[j].0).norm();
            if gap <= threshold {
                return Err(Error::AmbiguousClustering {
                    first: centers[i].0,
                    second: centers[j].0,
                    gap,
                    threshold,
                });
            }
        }
    }

    let ac = a.to_complex();
    let eye = CMatrix::identity(n, n);
    let mut clusters = Vec::with_capacity(centers.len());
    for &(gamma, algebraic) in &centers {
        let shifted = &ac - &eye * gamma;
        let mut power = shifted.clone();
        let mut multiplicity = None;
        for j in 1..=algebraic {
            if j > 1 {
                power = &power * &shifted;
            }
            let cutoff = tol * scale.powi(j as i32);
            let nullity = singular_values(&power)
                .iter()
                .filter(|&&s| s <= cutoff)
                .count();
            if nullity >= algebraic {
                multiplicity = Some(j);
                break;
            }
        }
        let multiplicity = multiplicity.ok_or_else(|| Error::Degenerate {
            what: format!("generalized eigenspace of {gamma} never reached dimension {algebraic}"),
            residual: f64::NAN,
        })?;
        clusters.push(Cluster {
            eigenvalue: gamma,
            multiplicity,
            algebraic,
        });
    }
    Ok(MinimalPolynomial { clusters })
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow_linear(root: Complex64, power: usize) -> Vec<Complex64> {
    let mut p = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..power {
        p = poly_mul(&p, &[-root, Complex64::new(1.0, 0.0)]);
    }
    p
}

/// Residuals of the projection identities.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct ProjectionResiduals {
    pub sum_to_identity: f64,
    pub idempotent: f64,
    pub orthogonal: f64,
    pub nilpotent: f64,
    pub commutes: f64,
}

impl ProjectionResiduals {
    pub fn max(&self) -> f64 {
        [
            self.sum_to_identity,
            self.idempotent,
            self.orthogonal,
            self.nilpotent,
            self.commutes,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    matrix: SquareMatrix,
    minimal: MinimalPolynomial,
    projections: Vec<CMatrix>,
    /// `nilpotent_powers[i][j] = (A - gamma_i E)^j P_i(A)` for `j < m_i`.
    nilpotent_powers: Vec<Vec<CMatrix>>,
    /// `b_i` in the basis `(t - gamma_i)^j`.
    numerators: Vec<Vec<Complex64>>,
    condition: f64,
}

/// Builds `P_i(A)` from the partial-fraction expansion of `1 / phi_A`.
pub fn spectral_projections(a: &SquareMatrix, mp: &MinimalPolynomial) -> Result<SpectralDecomposition> {
    let n = a.dim();
    let clusters = mp.clusters();
    let degree = mp.degree();
    let one = Complex64::new(1.0, 0.0);

    // Column (i, j) holds the monomial coefficients of (t - gamma_i)^j q_i(t),
    // where q_i = prod_{l != i} (t - gamma_l)^{m_l}.
    let mut system = DMatrix::<Complex64>::zeros(degree, degree);
    let mut col = 0;
    for (i, ci) in clusters.iter().enumerate() {
        let mut q = vec![one];
        for (l, cl) in clusters.iter().enumerate() {
            if l != i {
                q = poly_mul(&q, &poly_pow_linear(cl.eigenvalue, cl.multiplicity));
            }
        }
        for j in 0..ci.multiplicity {
            let p = poly_mul(&poly_pow_linear(ci.eigenvalue, j), &q);
            for (row, c) in p.iter().enumerate().take(degree) {
                system[(row, col)] = *c;
            }
            col += 1;
        }
    }
    let sv = singular_values(&system);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let mut rhs = DVector::<Complex64>::zeros(degree);
    rhs[0] = one;
    let coeffs = system.lu().solve(&rhs).ok_or_else(|| Error::Degenerate {
        what: "partial-fraction system is singular".into(),
        residual: f64::INFINITY,
    })?;

    let ac = a.to_complex();
    let eye = CMatrix::identity(n, n);
    let shifted: Vec<CMatrix> = clusters.iter().map(|c| &ac - &eye * c.eigenvalue).collect();

    let mut numerators = Vec::with_capacity(clusters.len());
    let mut projections = Vec::with_capacity(clusters.len());
    let mut offset = 0;
    for (i, ci) in clusters.iter().enumerate() {
        let b: Vec<Complex64> = (0..ci.multiplicity).map(|j| coeffs[offset + j]).collect();
        offset += ci.multiplicity;
        // b_i(A) by Horner in the shifted basis
        let mut b_at = CMatrix::zeros(n, n);
        for c in b.iter().rev() {
            b_at = &b_at * &shifted[i] + &eye * *c;
        }
        let mut p = b_at;
        for (l, cl) in clusters.iter().enumerate() {
            if l != i {
                for _ in 0..cl.multiplicity {
                    p = &p * &shifted[l];
                }
            }
        }
        numerators.push(b);
        projections.push(p);
    }

    let nilpotent_powers: Vec<Vec<CMatrix>> = clusters
        .iter()
        .zip(&projections)
        .zip(&shifted)
        .map(|((c, p), s)| {
            let mut powers = Vec::with_capacity(c.multiplicity);
            let mut cur = p.clone();
            for _ in 0..c.multiplicity {
                powers.push(cur.clone());
                cur = s * &cur;
            }
            powers
        })
        .collect();

    let sum: CMatrix = projections.iter().fold(CMatrix::zeros(n, n), |acc, p| acc + p);
    let residual = frobenius(&(sum - &eye));
    if !(residual <= PROJECTION_SUM_LIMIT) {
        return Err(Error::Degenerate {
            what: "spectral projections do not sum to the identity".into(),
            residual,
        });
    }

    Ok(SpectralDecomposition {
        matrix: a.clone(),
        minimal: mp.clone(),
        projections,
        nilpotent_powers,
        numerators,
        condition,
    })
}

/// `t^A` by the finite spectral sum.
pub fn dilation(sd: &SpectralDecomposition, t: f64) -> Result<CMatrix> {
    sd.dilation(t)
}

impl SpectralDecomposition {
    /// Minimal polynomial and projections in one step.
    pub fn new(a: &SquareMatrix, tol: f64) -> Result<Self> {
        let mp = minimal_polynomial(a, tol)?;
        spectral_projections(a, &mp)
    }

    pub fn shared(a: &SquareMatrix, tol: f64) -> Result<Arc<Self>> {
        Self::new(a, tol).map(Arc::new)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn minimal_polynomial(&self) -> &MinimalPolynomial {
        &self.minimal
    }

    pub fn clusters(&self) -> &[Cluster] {
        self.minimal.clusters()
    }

    pub fn degree(&self) -> usize {
        self.minimal.degree()
    }

    pub fn projections(&self) -> &[CMatrix] {
        &self.projections
    }

    /// `(A - gamma_i E)^j P_i(A)` for `j < m_i`.
    pub fn nilpotent_power(&self, cluster: usize, j: usize) -> &CMatrix {
        &self.nilpotent_powers[cluster][j]
    }

    pub fn numerators(&self) -> &[Vec<Complex64>] {
        &self.numerators
    }

    /// Condition number of the partial-fraction linear system.
    pub fn condition_number(&self) -> f64 {
        self.condition
    }

    pub fn dilation(&self, t: f64) -> Result<CMatrix> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("dilation parameter t = {t} must be positive")));
        }
        let n = self.dim();
        let lt = t.ln();
        let mut out = CMatrix::zeros(n, n);
        for (c, powers) in self.clusters().iter().zip(&self.nilpotent_powers) {
            let scale = (c.eigenvalue * lt).exp();
            let mut coef = scale;
            for (j, m) in powers.iter().enumerate() {
                if j > 0 {
                    coef *= lt / j as f64;
                }
                out += m * coef;
            }
        }
        Ok(out)
    }

    /// Real part of `t^A`, rejecting a non-negligible imaginary part.
    pub fn dilation_real(&self, t: f64) -> Result<DMatrix<f64>> {
        let m = self.dilation(t)?;
        let re = m.map(|z| z.re);
        let im = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let size = re.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        if im > 1e-8 * size {
            return Err(Error::Degenerate {
                what: format!("t^A at t = {t} has a non-real part"),
                residual: im / size,
            });
        }
        Ok(re)
    }

    /// Precomputes the orbit `t -> t^A x` of a fixed vector.
    pub fn orbit(&self, x: &[f64]) -> Orbit {
        let xv = crate::linalg::complexify_vec(x);
        let terms = self
            .clusters()
            .iter()
            .zip(&self.nilpotent_powers)
            .map(|(c, powers)| {
                let mut fact = 1.0;
                let vecs = powers
                    .iter()
                    .enumerate()
                    .map(|(j, m)| {
                        if j > 0 {
                            fact *= j as f64;
                        }
                        (m * &xv) / Complex64::new(fact, 0.0)
                    })
                    .collect();
                (c.eigenvalue, vecs)
            })
            .collect();
        Orbit { terms, dim: x.len() }
    }

    pub fn residuals(&self) -> ProjectionResiduals {
        let n = self.dim();
        let eye = CMatrix::identity(n, n);
        let ac = self.matrix.to_complex();
        let mut r = ProjectionResiduals::default();
        let sum = self.projections.iter().fold(CMatrix::zeros(n, n), |acc, p| acc + p);
        r.sum_to_identity = frobenius(&(sum - &eye));
        for (i, p) in self.projections.iter().enumerate() {
            r.idempotent = r.idempotent.max(frobenius(&(p * p - p)));
            r.commutes = r.commutes.max(frobenius(&(&ac * p - p * &ac)));
            for (j, q) in self.projections.iter().enumerate() {
                if i != j {
                    r.orthogonal = r.orthogonal.max(frobenius(&(p * q)));
                }
            }
            let c = self.clusters()[i];
            let last = self.nilpotent_powers[i].last().expect("m_i >= 1");
            let shifted = &ac - &eye * c.eigenvalue;
            r.nilpotent = r.nilpotent.max(frobenius(&(shifted * last)));
        }
        r
    }

    /// `A^* zeta` with `A^*` the transpose.
    pub fn adjoint_apply(&self, zeta: &[f64]) -> CVector {
        let at = complexify(&self.matrix.as_matrix().transpose());
        at * crate::linalg::complexify_vec(zeta)
    }
}

/// `t -> t^A x` as `sum_i t^{gamma_i} sum_j (log t)^j v_ij`.
#[derive(Clone, Debug)]
pub struct Orbit {
    terms: Vec<(Complex64, Vec<CVector>)>,
    dim: usize,
}

impl Orbit {
    /// Evaluates at `t = exp(log_t)`, writing the real part into `out`.
    pub fn eval_log_into(&self, log_t: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (gamma, vecs) in &self.terms {
            let base = (gamma * log_t).exp();
            let mut coef = base;
            for (j, v) in vecs.iter().enumerate() {
                if j > 0 {
                    coef *= log_t;
                }
                for (o, z) in out.iter_mut().zip(v.iter()) {
                    *o += (coef * z).re;
                }
            }
        }
    }

    pub fn eval_log(&self, log_t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_log_into(log_t, &mut out);
        out
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.eval_log(t.ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn m(rows: &[&[f64]]) -> SquareMatrix {
        SquareMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_has_linear_minimal_polynomial() {
        let mp = minimal_polynomial(&SquareMatrix::identity(2), 1e-6).unwrap();
        assert_eq!(mp.cluster_count(), 1);
        assert_eq!(mp.degree(), 1);
        assert_relative_eq!(mp.clusters()[0].eigenvalue.re, 1.0, epsilon = 1e-12);
        let c = mp.coefficients();
        assert_relative_eq!(c[0].re, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn jordan_block_needs_square() {
        let a = m(&[&[1.0, 1.0], &[0.0, 1.0]]);
        // (A - E) != 0 while (A - E)^2 == 0
        let shifted = a.as_matrix() - DMatrix::identity(2, 2);
        assert!(shifted.norm() > 0.5);
        assert!((&shifted * &shifted).norm() == 0.0);
        let mp = minimal_polynomial(&a, 1e-6).unwrap();
        assert_eq!(mp.cluster_count(), 1);
        assert_eq!(mp.clusters()[0].multiplicity, 2);
        assert_eq!(mp.degree(), 2);
        assert!(frobenius(&mp.evaluate_at(&a)) < 1e-12);
    }

    #[test]
    fn distinct_diagonal() {
        let a = SquareMatrix::diagonal(&[1.0, 2.0]).unwrap();
        let sd = SpectralDecomposition::new(&a, 1e-6).unwrap();
        assert_eq!(sd.degree(), 2);
        let p1 = sd.projections()[0].map(|z| z.re);
        let p2 = sd.projections()[1].map(|z| z.re);
        assert_relative_eq!(p1, DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0])), epsilon = 1e-12);
        assert_relative_eq!(p2, DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 1.0])), epsilon = 1e-12);
        let d = sd.dilation_real(3.0).unwrap();
        assert_relative_eq!(d, DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 9.0])), epsilon = 1e-12);
    }

    #[test]
    fn identity_projection_and_scalar_dilation() {
        let sd = SpectralDecomposition::new(&SquareMatrix::identity(2), 1e-6).unwrap();
        assert_eq!(sd.projections().len(), 1);
        assert_relative_eq!(sd.projections()[0].map(|z| z.re), DMatrix::identity(2, 2), epsilon = 1e-14);
        for t in [0.1, 1.0, 7.0] {
            assert_relative_eq!(sd.dilation_real(t).unwrap(), DMatrix::identity(2, 2) * t, epsilon = 1e-12);
        }
    }

    #[test]
    fn jordan_block_projection_and_log_term() {
        let a = m(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let sd = SpectralDecomposition::new(&a, 1e-6).unwrap();
        assert_relative_eq!(sd.projections()[0].map(|z| z.re), DMatrix::identity(2, 2), epsilon = 1e-12);
        let nil = sd.nilpotent_power(0, 1).map(|z| z.re);
        assert_relative_eq!(nil, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]), epsilon = 1e-12);
        for t in [0.3f64, 2.0, 11.0] {
            let want = DMatrix::from_row_slice(2, 2, &[t, t * t.ln(), 0.0, t]);
            assert_relative_eq!(sd.dilation_real(t).unwrap(), want, epsilon = 1e-12);
        }
    }

    #[test]
    fn unit_dilation_is_identity_and_rejects_nonpositive() {
        let a = m(&[&[1.0, -2.0], &[2.0, 1.0]]);
        let sd = SpectralDecomposition::new(&a, 1e-6).unwrap();
        assert_relative_eq!(sd.dilation_real(1.0).unwrap(), DMatrix::identity(2, 2), epsilon = 1e-12);
        assert!(matches!(sd.dilation(0.0), Err(Error::Domain(_))));
        assert!(matches!(sd.dilation(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn near_collision_is_ambiguous() {
        let a = SquareMatrix::diagonal(&[1.0, 1.0 + 5e-5]).unwrap();
        match minimal_polynomial(&a, 1e-5) {
            Err(Error::AmbiguousClustering { .. }) => {}
            other => panic!("expected ambiguity, got {other:?}"),
        }
    }

    #[test]
    fn orbit_matches_matrix_product() {
        let a = m(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.5, 2.5]]);
        let sd = SpectralDecomposition::new(&a, 1e-6).unwrap();
        let x = [0.3, -1.2, 2.0];
        let orbit = sd.orbit(&x);
        for t in [0.2, 1.7, 5.0] {
            let d = sd.dilation_real(t).unwrap();
            let want = crate::linalg::mat_vec(&d, &x);
            let got = orbit.eval(t);
            for (g, w) in got.iter().zip(&want) {
                assert_relative_eq!(g, w, epsilon = 1e-11, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn tolerance_domain() {
        assert!(minimal_polynomial(&SquareMatrix::identity(2), 1e-3).is_err());
        assert!(minimal_polynomial(&SquareMatrix::identity(2), 0.0).is_err());
    }
}
