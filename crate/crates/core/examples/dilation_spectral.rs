//! Spectral projections of a Jordan block and the dilation `t^P`.

use aniso::dilation::{SpectralDecomposition, DEFAULT_CLUSTER_TOL};
use aniso::SquareMatrix;

fn main() -> aniso::Result<()> {
    let p = SquareMatrix::from_rows(&[vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 2.5]])?;
    let sd = SpectralDecomposition::new(&p, DEFAULT_CLUSTER_TOL)?;
    println!("minimal polynomial degree {}", sd.degree());
    for c in sd.clusters() {
        println!("  eigenvalue {:.4} index {}", c.eigenvalue, c.multiplicity);
    }
    println!("projection residuals {:.2e}", sd.residuals().max());
    for t in [0.5, 2.0, 10.0] {
        let at = sd.dilation_real(t)?;
        let exact = (p.as_matrix() * t.ln()).exp();
        println!("t = {t:>4}: |t^P - exp(P ln t)| = {:.2e}", (&at - &exact).norm());
    }
    // orbit evaluation reuses the projections of a fixed point
    let orbit = sd.orbit(&[1.0, -1.0, 0.5]);
    println!("t^P x at t = 3: {:?}", orbit.eval(3.0));
    Ok(())
}
