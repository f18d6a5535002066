//! Splits a phase into pieces where one derivative dominates.

use aniso::dilation::{SpectralDecomposition, DEFAULT_CLUSTER_TOL};
use aniso::oscillatory::{phase_coefficients, vdc_partition, verify_partition};
use aniso::SquareMatrix;

fn main() -> aniso::Result<()> {
    let p = SquareMatrix::from_rows(&[vec![1.0, -2.0], vec![2.0, 1.0]])?;
    let sd = SpectralDecomposition::new(&p, DEFAULT_CLUSTER_TOL)?;
    let pe = phase_coefficients(&sd, &[1.0, 0.2], &[0.4, -1.0])?;
    println!("phase has {} terms, N_1 = {:.4}", pe.terms().len(), pe.coefficient_norm());
    let interval = (0.25f64.ln(), 4.0f64.ln());
    let part = vdc_partition(&pe, interval, 64)?;
    for piece in &part.pieces {
        println!(
            "  [{:+.4}, {:+.4}] derivative {} {}",
            piece.lo,
            piece.hi,
            piece.order,
            if piece.increasing { "increasing" } else { "decreasing" }
        );
    }
    let check = verify_partition(&pe, &part, interval, 1000);
    println!("verified: {} (floor {:.3e})", check.passes(), check.floor);
    Ok(())
}
