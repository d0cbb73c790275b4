//! Point-to-point passage times and geodesics on a lattice box.
//!
//! cargo run --example passage_time -- 30

use std::sync::Arc;

use fpplab::distributions::Distribution;
use fpplab::fpp::{brute_force_passage_time, passage_time, LatticeBox, Solver, WeightField};

fn main() -> fpplab::Result<()> {
    let n: i64 = std::env::args().nth(1).map_or(30, |s| s.parse().expect("n"));
    let lattice = Arc::new(LatticeBox::around_segment(&[n, 0], n / 2)?);
    let law = Distribution::exponential(1.0)?;
    println!(
        "box {:?}..{:?}: {} vertices, {} edges",
        lattice.lo(),
        lattice.hi(),
        lattice.num_vertices(),
        lattice.num_edges()
    );
    for replica in 0..5 {
        let field = WeightField::sample(lattice.clone(), &law, 2024, replica);
        let g = passage_time(&field, &[0, 0], &[n, 0])?;
        println!(
            "replica {replica}: time {:.6}, {} edges, unique {}",
            g.time,
            g.len(),
            g.unique
        );
    }

    // The solver agrees with enumerating every self-avoiding path on a small box.
    let small = Arc::new(LatticeBox::new(&[0, 0], &[2, 2])?);
    let field = WeightField::sample(small.clone(), &law, 5, 0);
    let (s, t) = (0, small.num_vertices() - 1);
    let fast = Solver::new().solve(&field, s, t)?;
    let (brute, paths) = brute_force_passage_time(&small, field.weights(), s, t)?;
    println!(
        "\n3x3 box: Dijkstra {}, enumeration {} ({paths} optimal paths)",
        fast.time, brute
    );
    Ok(())
}
