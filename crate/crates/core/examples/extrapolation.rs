//! Level-set decomposition of a rough kernel and the extrapolation series.

use std::sync::Arc;

use aniso::extrapolation::{block_norms, decompose, default_base_bound, extrapolation_sum};
use aniso::polar::SurfaceMeasure;
use aniso::quasinorm::QuasiNormContext;
use aniso::rough::{BlockRange, OmegaSpec, RadialProfile, TrigTerm};
use aniso::SquareMatrix;

fn main() -> aniso::Result<()> {
    let p = SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]])?;
    let sm = SurfaceMeasure::new(Arc::new(QuasiNormContext::new(&p)?), 64)?;
    let omega = OmegaSpec::Trig {
        terms: vec![TrigTerm { order: 1, cos: 4.0, sin: 0.0 }, TrigTerm { order: 3, cos: 0.0, sin: 9.0 }],
    }
    .build(&sm)?;
    let values: Vec<f64> = sm.nodes().iter().map(|nd| omega(&nd.theta)).collect();
    let h = RadialProfile::dyadic_blocks(-2, &[0.5, 3.0, 7.0, 20.0, 1.0])?;
    let dec = decompose(&h, &values, &sm, BlockRange { first: -3, last: 3 }, 50)?;
    println!("occupied radial levels {:?}", dec.occupied_radial());
    println!("mean-zero defect of angular pieces {:.1e}", dec.mean_zero_defect());
    for a in [3.0, 2.0] {
        let norms = block_norms(&dec, a)?;
        let sum = extrapolation_sum(&dec, a, default_base_bound)?;
        println!(
            "a = {a}: radial ceiling {:.3}, total {:.4e}, m-series {:?}, converged {}",
            norms.radial_ceiling, sum.total, sum.m_series, sum.converged
        );
        for w in &sum.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
