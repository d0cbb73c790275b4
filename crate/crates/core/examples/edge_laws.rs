//! Edge-time laws: parsing, tail-accurate quantiles and the psi transport.
//!
//! cargo run --example edge_laws -- "gamma:a=0.5,b=2"

use fpplab::distributions::{gauss_quantile, psi, tail_asymptotic_ratio, Distribution};

fn main() -> fpplab::Result<()> {
    let spec = std::env::args().nth(1).unwrap_or_else(|| "gamma:a=0.5,b=2".into());
    let law: Distribution = spec.parse()?;
    println!("{law}: support {:?}, mean {}", law.support(), law.mean()?);

    println!("\n{:>10} {:>22} {:>22}", "p", "quantile", "psi(quantile)");
    for p in [1e-12, 1e-6, 0.01, 0.5, 0.99] {
        let x = law.quantile(p)?;
        let y = if law.is_continuous() { psi(&law, x)? } else { f64::NAN };
        println!("{p:>10.2e} {x:>22.15e} {y:>22.15e}");
    }

    // psi(y) = g(G^{-1}(H(y))) / h(y), so in the deep tails it rests on the Gaussian quantile.
    println!("\nG^-1(1e-300) = {}", gauss_quantile(1e-300)?);
    for y in [1e-4, 1e-8, 1e-12] {
        println!(
            "g(G^-1(y)) / (y sqrt(2 ln 1/y)) at y = {y:.0e}: {:.6}",
            tail_asymptotic_ratio(y)?
        );
    }
    Ok(())
}
