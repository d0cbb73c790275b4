//! Runs the nearly-gamma classifier on a few laws and prints the verdicts.
//!
//! cargo run --example nearly_gamma

use fpplab::distributions::{classify_nearly_gamma, Distribution, GridSpec};

fn main() -> fpplab::Result<()> {
    let laws = [
        "gamma:a=0.5,b=1",
        "gamma:a=2,b=1",
        "exp:rate=3",
        "uniform:lo=1,hi=2",
        "halfnormal",
        "trunc(exp:rate=1;k=100,c5=8)",
    ];
    println!("{:<32} {:>7} {:>12} {:>11}", "law", "direct", "bound A", "sufficient");
    for spec in laws {
        let law: Distribution = spec.parse()?;
        let v = classify_nearly_gamma(&law, &GridSpec::default())?;
        let bound = v.bound.map_or("-".to_string(), |a| format!("{a:.4}"));
        println!("{spec:<32} {:>7} {bound:>12} {:>11}", v.direct_pass, v.sufficient_pass);
    }
    Ok(())
}
