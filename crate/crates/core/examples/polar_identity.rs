//! Integrates a Gaussian through the anisotropic polar identity.

use std::sync::Arc;

use aniso::polar::SurfaceMeasure;
use aniso::quasinorm::QuasiNormContext;
use aniso::SquareMatrix;

fn main() -> aniso::Result<()> {
    for rows in [vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![vec![1.0, 0.0], vec![0.0, 2.0]]] {
        let p = SquareMatrix::from_rows(&rows)?;
        let ctx = Arc::new(QuasiNormContext::new(&p)?);
        let sm = SurfaceMeasure::new(ctx, 128)?;
        let gauss = |x: &[f64]| (-std::f64::consts::PI * (x[0] * x[0] + x[1] * x[1])).exp();
        let v = sm.integrate_polar(gauss, 1e-8, 40.0, 24)?;
        println!("P = {rows:?}: sigma(Sigma) = {:.10}, Gaussian integral = {v:.12}", sm.total_mass());
    }
    Ok(())
}
