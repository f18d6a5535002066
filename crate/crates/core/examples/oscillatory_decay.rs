//! Decay of `int exp(i <t^P eta, lambda zeta>) dt` as `lambda` grows.

use aniso::dilation::{SpectralDecomposition, DEFAULT_CLUSTER_TOL};
use aniso::oscillatory::{decay_sweep, SweepMode, SweepSpec};
use aniso::quadrature::log_grid;
use aniso::SquareMatrix;

fn main() -> aniso::Result<()> {
    let p = SquareMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]])?;
    let sd = SpectralDecomposition::shared(&p, DEFAULT_CLUSTER_TOL)?;
    let spec = SweepSpec::new(vec![1.0, 1.0], vec![1.0, -0.35], log_grid(1.0, 1e4, 25));
    for mode in [SweepMode::PhaseHeight, SweepMode::Pairing, SweepMode::LogAverage, SweepMode::LogPhase] {
        let rep = decay_sweep(sd.clone(), &spec, mode)?;
        println!(
            "{mode:?}: exponent -1/{}, slope {:.3} (limit {:.3}), growth {:.3}, sup ratio {:.3e}",
            rep.exponent_order,
            rep.slope,
            rep.slope_limit(),
            rep.growth,
            rep.sup_ratio
        );
    }
    let rep = decay_sweep(sd, &spec, SweepMode::PhaseHeight)?;
    rep.write_csv(std::io::stdout().lock())?;
    Ok(())
}
