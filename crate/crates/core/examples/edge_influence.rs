//! Per-edge influence on one geodesic: W_{e,+}, the derivative in x_e, and
//! the Bernoulli energy bound.
//!
//! cargo run --example edge_influence

use std::sync::Arc;

use fpplab::distributions::Distribution;
use fpplab::fpp::{
    edge_breakpoint, edge_influence, edge_influence_exact, geodesic_derivative_check, v_e_plus_bernoulli, LatticeBox,
    Solver, WeightField,
};
use fpplab::rng::{replica_rng, Stream};

fn main() -> fpplab::Result<()> {
    let lattice = Arc::new(LatticeBox::new(&[0, 0], &[9, 9])?);
    let (s, t) = (0, lattice.num_vertices() - 1);

    let law = Distribution::exponential(1.0)?;
    let field = WeightField::sample(lattice.clone(), &law, 3, 0);
    let mut solver = Solver::new();
    let g = solver.solve(&field, s, t)?;
    println!("corner to corner: time {:.6} over {} edges", g.time, g.len());
    let mut rng = replica_rng(3, 0, Stream::Resample);
    println!(
        "{:>6} {:>10} {:>10} {:>12} {:>12}",
        "edge", "x_e", "y_inf", "W_e (exact)", "W_e (MC)"
    );
    for &e in g.edges.iter().take(6) {
        let y_inf = edge_breakpoint(&mut solver, &field, &g, e)?;
        let exact = edge_influence_exact(field.weight(e), y_inf, &law)?;
        let mc = edge_influence(&field, &g, e, &law, 4000, &mut rng)?;
        println!(
            "{e:>6} {:>10.6} {:>10.6} {exact:>12.6} {mc:>12.6}",
            field.weight(e),
            y_inf
        );
    }
    let e = g.edges[0];
    let d = geodesic_derivative_check(&field, &g, e, 1e-7)?;
    println!(
        "perturbing edge {e} by 1e-7 moves the time by {:.3e} ({:?})",
        d.delta_time, d.status
    );

    let bern = Distribution::bernoulli(1.0, 2.0, 0.5)?;
    let field = WeightField::sample(lattice, &bern, 3, 0);
    let g = solver.solve(&field, s, t)?;
    let v = v_e_plus_bernoulli(&field, &g)?;
    println!(
        "\nBernoulli field: V_E+ = {} <= (b-a)^2/a f = {}: {}",
        v.value, v.bound, v.pass
    );
    Ok(())
}
