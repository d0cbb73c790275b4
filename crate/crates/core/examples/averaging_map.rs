//! The averaging map g_m: exhaustive checks for small m and a sampled offset.
//!
//! cargo run --example averaging_map

use fpplab::averaging::{verify_averaging_properties, AveragingMap, ClassOrder};
use fpplab::rng::{replica_rng, Stream};

fn main() -> fpplab::Result<()> {
    for m in 2..=4 {
        for order in [ClassOrder::Descending, ClassOrder::Ascending] {
            let r = verify_averaging_properties(m, order)?;
            println!(
                "m={m} {order:?}: k = {}, gradient in {{0,1}}: {}, level sizes {:?}, max level {:.4} (4/m = {:.4})",
                r.k,
                r.gradient_holds,
                r.level_sizes,
                r.max_level_measure,
                4.0 / m as f64
            );
        }
    }
    let map = AveragingMap::new(5, ClassOrder::default())?;
    let sample = map.sample_offset(&mut replica_rng(1, 0, Stream::Offset), 2)?;
    println!("\nm=5 offset for one replica: z = {:?}", sample.z);
    Ok(())
}
