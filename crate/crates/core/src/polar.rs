//! Surface measure on the unit ellipsoid and polar-coordinate integration.
//!
//! Nodes are `theta = B^{-1/2} u` for a sphere rule in `u`. The polar identity
//! `dx = t^{gamma - 1} dsigma dt` fixes `dsigma = det(B)^{-1/2} <B theta, P theta> dS(u)`.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, mat_vec};
use crate::quadrature::{gauss_legendre, GaussRule};
use crate::quasinorm::QuasiNormContext;

pub const MIN_RESOLUTION: usize = 16;
/// Widest radial panel in `log t`.
const RADIAL_PANEL: f64 = 0.5;

/// A real function on the ellipsoid, shared across threads.
pub type SurfaceFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceNode {
    /// Unit-sphere preimage.
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
    pub weight: f64,
}

#[derive(Clone)]
pub struct SurfaceMeasure {
    ctx: Arc<QuasiNormContext>,
    nodes: Vec<SurfaceNode>,
    total_mass: f64,
    resolution: usize,
}

impl std::fmt::Debug for SurfaceMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SurfaceMeasure")
            .field("nodes", &self.nodes.len())
            .field("total_mass", &self.total_mass)
            .field("resolution", &self.resolution)
            .finish()
    }
}

fn sphere_rule(n: usize, resolution: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    use std::f64::consts::PI;
    match n {
        2 => Ok((0..resolution)
            .map(|k| {
                let phi = 2.0 * PI * k as f64 / resolution as f64;
                (vec![phi.cos(), phi.sin()], 2.0 * PI / resolution as f64)
            })
            .collect()),
        3 => {
            let (zs, wz) = gauss_legendre(resolution);
            let azimuths = 2 * resolution;
            let dphi = 2.0 * PI / azimuths as f64;
            let mut out = Vec::with_capacity(resolution * azimuths);
            for (z, w) in zs.iter().zip(&wz) {
                let rho = (1.0 - z * z).sqrt();
                for k in 0..azimuths {
                    let phi = dphi * (k as f64 + 0.5);
                    out.push((vec![rho * phi.cos(), rho * phi.sin(), *z], w * dphi));
                }
            }
            Ok(out)
        }
        other => Err(Error::UnsupportedDimension(other)),
    }
}

pub fn build_surface_measure(ctx: Arc<QuasiNormContext>, resolution: usize) -> Result<SurfaceMeasure> {
    SurfaceMeasure::new(ctx, resolution)
}

impl SurfaceMeasure {
    pub fn new(ctx: Arc<QuasiNormContext>, resolution: usize) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::InvalidInput(format!(
                "surface resolution {resolution} below the minimum {MIN_RESOLUTION}"
            )));
        }
        let n = ctx.dim();
        let rule = sphere_rule(n, resolution)?;
        let b = ctx.form();
        let p = ctx.group().matrix().as_matrix();
        let jac = 1.0 / b.determinant().sqrt();
        let mut nodes = Vec::with_capacity(rule.len());
        for (u, w) in rule {
            let theta = mat_vec(ctx.primal().form_inv_sqrt(), &u);
            let density = dot(&mat_vec(b, &theta), &mat_vec(p, &theta));
            if !(density > 0.0) {
                return Err(Error::Degenerate {
                    what: "surface density is not positive".into(),
                    residual: density,
                });
            }
            nodes.push(SurfaceNode {
                u,
                theta,
                weight: jac * density * w,
            });
        }
        let total_mass = nodes.iter().map(|nd| nd.weight).sum();
        Ok(Self {
            ctx,
            nodes,
            total_mass,
            resolution,
        })
    }

    pub fn context(&self) -> &Arc<QuasiNormContext> {
        &self.ctx
    }

    pub fn nodes(&self) -> &[SurfaceNode] {
        &self.nodes
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// `sigma(Sigma)`.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().map(|nd| nd.weight * f(&nd.theta)).sum()
    }

    /// `int_Sigma int_{t_min}^{t_max} f(A_t theta) t^{gamma - 1} dt dsigma(theta)`.
    pub fn integrate_polar<F>(&self, f: F, t_min: f64, t_max: f64, radial_nodes: usize) -> Result<f64>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        if !(t_min > 0.0 && t_max > t_min) {
            return Err(Error::Domain(format!("radial range [{t_min}, {t_max}] is not a shell")));
        }
        if radial_nodes == 0 {
            return Err(Error::InvalidInput("radial rule needs at least one node".into()));
        }
        let (lo, hi) = (t_min.ln(), t_max.ln());
        let panels = ((hi - lo) / RADIAL_PANEL).ceil().max(1.0) as usize;
        let rule = GaussRule::new(radial_nodes);
        let width = (hi - lo) / panels as f64;
        let radial: Vec<(f64, f64)> = (0..panels)
            .flat_map(|k| {
                let a = lo + k as f64 * width;
                rule.mapped(a, a + width).collect::<Vec<_>>()
            })
            .collect();
        let gamma = self.ctx.gamma();
        let sd = self.ctx.group().spectral();
        let per_node: Vec<Result<f64>> = self
            .nodes
            .par_iter()
            .map(|nd| {
                let orbit = sd.orbit(&nd.theta);
                let mut buf = vec![0.0; nd.theta.len()];
                let mut acc = 0.0;
                for &(s, w) in &radial {
                    orbit.eval_log_into(s, &mut buf);
                    let v = f(&buf);
                    if !v.is_finite() {
                        return Err(Error::NonFinite { location: buf.clone() });
                    }
                    acc += w * v * (gamma * s).exp();
                }
                Ok(acc * nd.weight)
            })
            .collect();
        let mut total = 0.0;
        for v in per_node {
            total += v?;
        }
        Ok(total)
    }

    /// Subtracts the `dsigma` average of `omega`.
    pub fn mean_zero_project(&self, omega: SurfaceFn) -> SurfaceFn {
        let mean = self.integrate(|th| omega(th)) / self.total_mass;
        Arc::new(move |th: &[f64]| omega(th) - mean)
    }

    /// Writes `u, theta, weight` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let n = self.ctx.dim();
        let mut header: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
        header.extend((0..n).map(|i| format!("theta{i}")));
        header.push("weight".into());
        writeln!(out, "{}", header.join(","))?;
        for nd in &self.nodes {
            let row: Vec<String> = nd
                .u
                .iter()
                .chain(&nd.theta)
                .chain(std::iter::once(&nd.weight))
                .map(|v| format!("{v:.16e}"))
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// `omega_{n-1} gamma / (n sqrt(det B))`, the mass of `dsigma` in closed form.
pub fn closed_form_mass(ctx: &QuasiNormContext) -> f64 {
    use std::f64::consts::PI;
    let n = ctx.dim();
    let sphere_area = match n {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => {
            let half = n as f64 / 2.0;
            2.0 * PI.powf(half) / gamma_fn(half)
        }
    };
    sphere_area * ctx.gamma() / (n as f64 * ctx.form().determinant().sqrt())
}

fn gamma_fn(x: f64) -> f64 {
    // half-integers only
    if (x - x.round()).abs() < 1e-12 {
        (1..x.round() as usize).map(|k| k as f64).product()
    } else {
        let mut v = std::f64::consts::PI.sqrt();
        let mut k = 0.5;
        while k < x - 1e-12 {
            v *= k;
            k += 1.0;
        }
        v
    }
}
