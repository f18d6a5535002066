//! Fourier transforms of dyadic rough-kernel measures and their decay.

use std::sync::Arc;

use aniso::polar::SurfaceMeasure;
use aniso::quasinorm::{exponent_budget, QuasiNormContext};
use aniso::rough::{
    verify_sigma_decay, Curve, DyadicMeasures, MeasureMode, MeasureSweep, OmegaSpec, RadialProfile, RoughKernel,
    TauMethod, TrigTerm,
};
use aniso::SquareMatrix;

fn main() -> aniso::Result<()> {
    let p = SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]])?;
    let ctx = Arc::new(QuasiNormContext::new(&p)?);
    let sm = SurfaceMeasure::new(ctx.clone(), 64)?;
    let omega = OmegaSpec::Trig {
        terms: vec![TrigTerm { order: 1, cos: 1.0, sin: 0.0 }, TrigTerm { order: 2, cos: 0.3, sin: 0.7 }],
    }
    .build(&sm)?;
    let h = RadialProfile::steps(vec![1.5, 3.0], vec![1.0, -0.5, 2.0])?;
    let kernel = RoughKernel::new(&sm, omega, h, Curve::power(vec![1.0, 3.0])?, 2.0)?;
    let dm = DyadicMeasures::new(kernel, &sm, TauMethod::Auto)?;
    println!("mass bound at k = 0: {:.4}", dm.mass_bound(0)?);
    let v = dm.sigma_hat(0, &[3.0, -1.0], &[0.3])?;
    println!("sigma_0 at xi = (3, -1), eta = 0.3: {:.6} (error {:.1e})", v.value, v.error);

    let budget = exponent_budget(&ctx, 2.0, 2000, 7)?;
    let sweep = MeasureSweep::new(vec![1.0, 0.0], vec![0.3], 2.0);
    for mode in MeasureMode::ALL {
        let rep = verify_sigma_decay(&dm, &budget, mode, &sweep)?;
        println!(
            "{mode:?}: exponent {:.4}, slope {:.3}, growth {:.3}, passes {}",
            rep.exponent,
            rep.slope,
            rep.growth,
            rep.passes(1.5)
        );
    }
    Ok(())
}
