//! First passage percolation on finite boxes of `Z^2` and `Z^3`.

mod field;
mod geodesic;
mod influence;
mod lattice;

pub use field::{Provenance, WeightField};
pub use geodesic::{
    brute_force_passage_time, passage_time, randomized_passage_time, randomized_passage_time_with, GeodesicResult,
    Solver, BRUTE_FORCE_MAX_VERTICES, TIE_TOLERANCE,
};
pub use influence::{
    edge_breakpoint, edge_influence, edge_influence_exact, geodesic_derivative_check, sweep_edge_weight,
    v_e_plus_bernoulli, v_e_plus_bernoulli_with, CheckStatus, DerivativeReport, EnergyBoundReport, SweepReport,
};
pub use lattice::{BoxSpec, LatticeBox};
