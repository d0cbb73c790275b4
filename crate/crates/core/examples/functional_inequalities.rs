//! Exact checks on Bernoulli product spaces and one-dimensional log-Sobolev
//! inequalities by quadrature.
//!
//! cargo run --example functional_inequalities

use fpplab::distributions::lsi_constant_bernoulli;
use fpplab::funcineq::{
    gaussian_lsi_check, onedim_lsi_check, random_suite, verify_fs_bound, verify_modified_poincare, OneDimLaw,
    ProductTable, SuiteConfig,
};

fn main() -> fpplab::Result<()> {
    for p in [0.01, 0.1, 0.5] {
        println!("c_LS({p}) = {}", lsi_constant_bernoulli(p)?);
    }

    // Majority on five biased bits.
    let f = ProductTable::from_fn(vec![0.1, 0.5, 0.9, 0.5, 0.3], |x| {
        (x.iter().filter(|&&b| b).count() >= 3) as u8 as f64
    })?;
    let mp = verify_modified_poincare(&f)?;
    let fs = verify_fs_bound(&f)?;
    println!(
        "\nmajority: modified Poincaré {:.6} <= {:.6}: {}",
        mp.lhs, mp.rhs, mp.pass
    );
    println!(
        "majority: entropy bound     {:.6} <= {:.6}: {}",
        fs.lhs, fs.rhs, fs.pass
    );

    let s = random_suite(&SuiteConfig::default())?;
    println!(
        "\n{} random tables: violations {} / {} / {}, tightest relative slack {:.4}",
        s.config.tables,
        s.modified_poincare_violations,
        s.fs_violations,
        s.energy_violations,
        s.min_poincare_relative_slack
    );

    let g = gaussian_lsi_check(|x| (x / 2.0).exp(), |x| 0.5 * (x / 2.0).exp())?;
    println!("\nGaussian, f = e^(x/2): Ent = {:.12}, 2 E f'^2 = {:.12}", g.lhs, g.rhs);
    let law = OneDimLaw::Gamma { a: 2.0, b: 1.0 };
    let r = onedim_lsi_check(law, |x| 1.0 + x.sin(), |x| x.cos())?;
    println!("gamma(2,1), f = 1 + sin x: {:.6} <= {:.6}", r.lhs, r.rhs);
    Ok(())
}
