//! Homogeneous quasi-norm and polar coordinates for `P = diag(1, 2)`.

use aniso::quasinorm::QuasiNormContext;
use aniso::SquareMatrix;

fn main() -> aniso::Result<()> {
    let p = SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]])?;
    let ctx = QuasiNormContext::new(&p)?;
    println!("Lyapunov form B = {:?}", ctx.snapshot().b);
    println!("Lyapunov residual {:.2e}", ctx.lyapunov_residual());
    let x = [0.0, 2.0];
    let r = ctx.quasi_norm(&x)?;
    println!("r({x:?}) = {r:.12}");
    for t in [0.1, 3.0, 40.0] {
        let rt = ctx.quasi_norm(&ctx.dilate(t, &x)?)?;
        println!("r(t^P x) / (t r(x)) at t = {t}: {:.15}", rt / (t * r));
    }
    let polar = ctx.polar_decompose(&[0.3, -1.7])?;
    let back = ctx.dilate(polar.radius, &polar.theta)?;
    println!("polar radius {:.6}, theta {:?}, back {:?}", polar.radius, polar.theta, back);
    Ok(())
}
