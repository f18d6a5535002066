//! Smooth windows with `sum psi_k^2 = 1` adapted to a dyadic base.

use aniso::quadrature::log_grid;
use aniso::rough::WindowFamily;

fn main() -> aniso::Result<()> {
    for beta in [2.0, 4.0, 16.0] {
        let w = WindowFamily::new(beta)?;
        let defect = log_grid(1e-4, 1e4, 1000)
            .into_iter()
            .map(|t| (w.square_sum(t) - 1.0).abs())
            .fold(0.0, f64::max);
        let (lo, hi) = w.support(0);
        println!(
            "beta {beta:>4}: support of psi_0 [{lo:.4}, {hi:.4}], sum defect {defect:.1e}, sup t|psi'| {:.6}",
            w.derivative_sup(4000)
        );
    }
    Ok(())
}
