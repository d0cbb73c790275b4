use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::quadrature::{integrate_pieces, QuadOptions};

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn continuous_kinds() -> Vec<Distribution> {
    let exp = Distribution::exponential(1.0).unwrap();
    vec![
        Distribution::gamma(0.5, 2.0).unwrap(),
        Distribution::gamma(2.0, 0.5).unwrap(),
        Distribution::gamma(1.0, 1.0).unwrap(),
        exp.clone(),
        Distribution::uniform(1.0, 2.0).unwrap(),
        Distribution::half_normal(),
        Distribution::truncate(&exp, 100, 1.0, Bump::default()).unwrap(),
        Distribution::truncate(&exp, 10, 0.5, Bump::Quartic).unwrap(),
        Distribution::tabulated(vec![0.0, 1.0, 3.0], vec![0.5, 2.0, 0.0]).unwrap(),
    ]
}

// Integration range covering all but a negligible tail.
fn effective_support(d: &Distribution) -> (f64, f64) {
    let (lo, hi) = d.support();
    let hi = if hi.is_finite() {
        hi
    } else {
        d.quantile(Probability::from_upper(1e-40).unwrap()).unwrap()
    };
    (lo, hi)
}

#[test]
fn density_integrates_to_one() {
    for d in continuous_kinds() {
        let (lo, hi) = effective_support(&d);
        let mass = integrate_pieces(|x| d.pdf(x), &d.breakpoints(lo, hi), QuadOptions::default())
            .unwrap()
            .value;
        assert!((mass - 1.0).abs() <= 1e-9, "{d}: mass {mass}");
    }
}

#[test]
fn cdf_agrees_with_integrated_density() {
    for d in continuous_kinds() {
        let (lo, hi) = effective_support(&d);
        for j in 1..40 {
            let x = lo + (hi - lo) * (j as f64 / 40.0).powi(2);
            let mut pts = d.breakpoints(lo, x);
            pts.dedup();
            let integral = integrate_pieces(|t| d.pdf(t), &pts, QuadOptions::default())
                .unwrap()
                .value;
            assert!((d.cdf(x) - integral).abs() <= 1e-8, "{d} at {x}");
        }
    }
}

#[test]
fn cdf_is_monotone_with_correct_limits() {
    for d in continuous_kinds() {
        let (lo, hi) = d.support();
        assert_eq!(d.cdf(lo - 1e-9), 0.0, "{d}");
        let top = if hi.is_finite() { hi } else { 1e4 };
        assert_eq!(d.cdf(top), 1.0, "{d}");
        let mut prev = 0.0;
        for j in 0..=2000 {
            let x = lo + (top - lo) * j as f64 / 2000.0;
            let c = d.cdf(x);
            assert!(c >= prev, "{d} not monotone at {x}");
            prev = c;
        }
    }
}

#[test]
fn quantile_inverts_cdf() {
    for d in continuous_kinds() {
        let (lo, hi) = effective_support(&d);
        for j in 1..200 {
            let x = lo + (hi - lo) * j as f64 / 200.0;
            if d.pdf(x) < 1e-250 {
                continue;
            }
            let back = d.quantile(d.prob(x)).unwrap();
            assert!(rel(back, x) <= 1e-10, "{d}: {x} -> {back}");
        }
    }
}

#[test]
fn gamma_reference_values() {
    // 50-digit references
    let g = Distribution::gamma(0.5, 2.0).unwrap();
    assert!(rel(g.cdf(0.1), 0.472_910_743_134_461_9) < 1e-12);
    assert!(rel(g.sf(50.0), 2.088_487_583_762_544_8e-45) < 1e-10);
    let g = Distribution::gamma(2.0, 0.5).unwrap();
    assert!(rel(g.cdf(3.0), 0.442_174_599_628_925_4) < 1e-12);
    assert!(rel(g.sf(200.0), 3.757_276_735_781_044e-42) < 1e-10);
}

#[test]
fn means() {
    assert!(rel(Distribution::gamma(2.0, 0.5).unwrap().mean().unwrap(), 4.0) < 1e-15);
    assert_eq!(Distribution::bernoulli(1.0, 2.0, 0.25).unwrap().mean().unwrap(), 1.25);
    let exp = Distribution::exponential(1.0).unwrap();
    let t = Distribution::truncate(&exp, 100, 1.0, Bump::default()).unwrap();
    // Mass moved down from beyond 2 ln 100 lowers the mean slightly.
    let m = t.mean().unwrap();
    assert!(m < 1.0 && m > 0.99, "{m}");
    let (lo, hi) = t.support();
    let direct = integrate_pieces(|x| x * t.pdf(x), &t.breakpoints(lo, hi), QuadOptions::default())
        .unwrap()
        .value;
    assert!(rel(m, direct) < 1e-10);
}

#[test]
fn lsi_constant_examples() {
    assert_eq!(lsi_constant_bernoulli(0.5).unwrap(), 2.0);
    assert_eq!(
        lsi_constant_bernoulli(0.3).unwrap(),
        lsi_constant_bernoulli(0.7).unwrap()
    );
    assert!(rel(lsi_constant_bernoulli(0.9).unwrap(), 9f64.ln() / 0.8) < 1e-15);
    assert!(rel(lsi_constant_bernoulli(0.9).unwrap(), 2.746_530_721_670_274) < 1e-15);
    for p in [0.0, 1.0, -0.1, f64::NAN] {
        assert!(lsi_constant_bernoulli(p).is_err());
    }
}

#[test]
fn lsi_constant_continuous_through_one_half() {
    let mut prev = lsi_constant_bernoulli(0.5 - 1e-3).unwrap();
    for j in 1..2000 {
        let p = 0.5 - 1e-3 + j as f64 * 1e-6;
        let c = lsi_constant_bernoulli(p).unwrap();
        assert!(c >= 2.0);
        assert!((c - prev).abs() < 1e-8, "jump at {p}");
        prev = c;
    }
}

#[test]
fn truncation_support_and_domination() {
    let exp = Distribution::exponential(1.0).unwrap();
    let t = Distribution::truncate(&exp, 100, 1.0, Bump::default()).unwrap();
    let cutoff = 2.0 * 100f64.ln();
    assert!((t.cdf(cutoff) - 1.0).abs() <= 1e-12);
    assert_eq!(t.support(), (0.0, cutoff));
    for j in 0..=10_000 {
        let x = 1.2 * cutoff * j as f64 / 10_000.0;
        assert!(t.cdf(x) - exp.cdf(x) >= -1e-12, "at {x}");
        if x <= 100f64.ln() {
            assert_eq!(t.cdf(x), exp.cdf(x));
        }
    }
}

#[test]
fn truncation_is_identity_without_tail_mass() {
    let u = Distribution::uniform(0.0, 1.0).unwrap();
    let t = Distribution::truncate(&u, 100, 1.0, Bump::default()).unwrap();
    for j in 0..=1000 {
        let x = 1.5 * j as f64 / 1000.0;
        assert!((t.cdf(x) - u.cdf(x)).abs() <= 1e-12);
    }
}

#[test]
fn truncation_errors() {
    let exp = Distribution::exponential(1.0).unwrap();
    assert!(matches!(
        Distribution::truncate(&exp, 1, 1.0, Bump::default()),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        Distribution::truncate(&exp, 10, 1.0, Bump::Hat { lo: 0.5, hi: 1.5 }),
        Err(Error::Domain(_))
    ));
    let b = Distribution::bernoulli(1.0, 2.0, 0.5).unwrap();
    assert!(Distribution::truncate(&b, 10, 1.0, Bump::default()).is_err());
}

#[test]
fn truncated_quantile_lies_below_base_quantile() {
    let g = Distribution::gamma(2.0, 1.0).unwrap();
    let t = Distribution::truncate(&g, 20, 1.5, Bump::default()).unwrap();
    for j in 1..1000 {
        let u = j as f64 / 1000.0;
        assert!(t.quantile(u).unwrap() <= g.quantile(u).unwrap());
    }
}

#[test]
fn sampling_is_deterministic() {
    let exp = Distribution::exponential(1.0).unwrap();
    let draw = |seed| exp.sample(&mut ChaCha8Rng::seed_from_u64(seed));
    assert_eq!(draw(42).to_bits(), draw(42).to_bits());
    assert_ne!(draw(42), draw(43));
}

#[test]
fn bernoulli_frequency() {
    let b = Distribution::bernoulli(1.0, 2.0, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 100_000;
    let hits = (0..n).filter(|_| b.sample(&mut rng) == 2.0).count();
    assert!((hits as f64 / n as f64 - 0.5).abs() < 0.01);
}

fn ks_statistic(d: &Distribution, seed: u64, n: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
    xs.sort_by(f64::total_cmp);
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = d.cdf(x);
            (c - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - c)
        })
        .fold(0.0, f64::max)
}

#[test]
fn kolmogorov_smirnov_at_one_in_a_thousand() {
    let n = 100_000;
    // Asymptotic critical value K_{1-alpha} = sqrt(-ln(alpha/2)/2) for alpha = 1e-3.
    let crit = (-(0.5e-3f64).ln() / 2.0).sqrt() / (n as f64).sqrt();
    for d in [
        Distribution::uniform(0.0, 1.0).unwrap(),
        Distribution::exponential(1.0).unwrap(),
        Distribution::gamma(0.5, 2.0).unwrap(),
        Distribution::half_normal(),
    ] {
        let ks = ks_statistic(&d, 5, n);
        assert!(ks < crit, "{d}: KS {ks} >= {crit}");
    }
}

#[test]
fn psi_positive_on_interior() {
    for d in continuous_kinds() {
        let (lo, hi) = effective_support(&d);
        for j in 1..100 {
            let y = lo + (hi - lo) * j as f64 / 100.0;
            if d.pdf(y) < 1e-250 {
                continue;
            }
            let v = psi(&d, y).unwrap();
            assert!(v > 0.0 && v.is_finite(), "{d} at {y}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gaussian_round_trip(x in -8.0f64..8.0) {
        let back = gauss_quantile(gauss_cdf(x)).unwrap();
        prop_assert!((back - x).abs() <= 1e-10 * x.abs().max(1.0));
    }

    #[test]
    fn gaussian_cdf_symmetric(x in -37.0f64..37.0) {
        prop_assert_eq!(gauss_cdf(-x).value(), gauss_cdf(x).complement());
    }

    #[test]
    fn tail_ratio_near_one_deep_in_the_tail(e in 8.0f64..300.0) {
        let r = tail_asymptotic_ratio(10f64.powf(-e)).unwrap();
        prop_assert!((r - 1.0).abs() < 0.05);
    }

    #[test]
    fn lsi_constant_symmetric(p in 0.001f64..0.999) {
        // Snap p so that p and 1 - p are an exact floating-point pair.
        let p = 1.0 - (1.0 - p);
        prop_assert_eq!(lsi_constant_bernoulli(p).unwrap(), lsi_constant_bernoulli(1.0 - p).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn truncation_post_conditions(
        base_ix in 0usize..3,
        k in 2u64..10_000,
        c5 in 0.2f64..10.0,
    ) {
        let base = match base_ix {
            0 => Distribution::exponential(1.0).unwrap(),
            1 => Distribution::gamma(2.0, 1.5).unwrap(),
            _ => Distribution::half_normal(),
        };
        let t = Distribution::truncate(&base, k, c5, Bump::default()).unwrap();
        let threshold = c5 * (k as f64).ln();
        let cutoff = 2.0 * threshold;
        prop_assert!((t.cdf(cutoff) - 1.0).abs() <= 1e-12);
        prop_assert_eq!(t.support().1, cutoff);
        for j in 0..=1000 {
            let x = 1.1 * cutoff * j as f64 / 1000.0;
            prop_assert!(t.cdf(x) - base.cdf(x) >= -1e-12);
            if x <= threshold {
                prop_assert_eq!(t.cdf(x), base.cdf(x));
            }
        }
        let mass = integrate_pieces(|x| t.pdf(x), &t.breakpoints(0.0, cutoff), QuadOptions::default())
            .unwrap()
            .value;
        prop_assert!((mass - 1.0).abs() <= 1e-9);
    }
}
