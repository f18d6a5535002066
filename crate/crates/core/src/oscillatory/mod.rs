//! Oscillatory integrals with phases `<t^A eta, zeta>`.

mod integral;
mod partition;
mod phase;
mod sweep;

pub use integral::{oscillatory_integral, OscillatoryProblem, OscillatoryValue, Weight, Window, MAX_NODES};
pub use partition::{vdc_partition, verify_partition, Partition, PartitionCheck, Piece, H_MAX};
pub use phase::{compute_j, lower_bound_pairing, phase_coefficients, PhaseExpansion, PhaseFunction, PhaseTerm};
pub use sweep::{decay_sweep, DecayReport, SweepMode, SweepSpec};
