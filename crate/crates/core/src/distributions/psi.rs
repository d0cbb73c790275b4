use super::{gauss_profile, Distribution};
use crate::error::{domain, Error, Result};

/// Densities below this are treated as zero when dividing.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// `psi(y) = g(G^{-1}(H(y))) / h(y)` for a continuous law with CDF `H` and density `h`.
pub fn psi(d: &Distribution, y: f64) -> Result<f64> {
    if !d.is_continuous() {
        return Err(Error::UnsupportedKind(format!("psi of discrete law {d}")));
    }
    let (lo, hi) = d.support();
    if !(y > lo && y < hi) {
        return domain(format!("psi: y = {y} outside the open support ({lo}, {hi})"));
    }
    let h = d.pdf(y);
    if !(h >= DENSITY_FLOOR) {
        return Err(Error::Singularity { y, density: h });
    }
    let p = d.prob(y);
    if !p.is_interior() {
        return Err(Error::Numeric(format!(
            "psi: H({y}) underflows to an endpoint of [0, 1]"
        )));
    }
    Ok(gauss_profile(p)? / h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::INV_SQRT_2PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn uniform_median_maps_to_gaussian_mode() {
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        assert!(rel(psi(&u, 0.5).unwrap(), INV_SQRT_2PI) < 1e-15);
    }

    #[test]
    fn exponential_far_tail_matches_asymptotics() {
        let e = Distribution::exponential(1.0).unwrap();
        let v = psi(&e, 40.0).unwrap();
        assert!(rel(v, 80f64.sqrt()) < 0.05);
        // 50-digit reference
        assert!(rel(v, 8.706_095_960_157_628) < 1e-9);
        assert!(rel(psi(&e, 1.0).unwrap(), 1.024_409_952_983_805_9) < 1e-12);
    }

    #[test]
    fn reference_values_other_kinds() {
        let hn = Distribution::half_normal();
        assert!(rel(psi(&hn, 2.0).unwrap(), 0.885_644_633_427_039_9) < 1e-10);
        let g = Distribution::gamma(2.0, 1.0).unwrap();
        assert!(rel(psi(&g, 0.5).unwrap(), 0.536_375_285_077_184_3) < 1e-10);
    }

    #[test]
    fn outside_support_is_a_domain_error() {
        let e = Distribution::exponential(1.0).unwrap();
        assert!(matches!(psi(&e, -1.0), Err(Error::Domain(_))));
        assert!(matches!(psi(&e, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn discrete_laws_are_rejected() {
        let b = Distribution::bernoulli(1.0, 2.0, 0.5).unwrap();
        assert!(matches!(psi(&b, 1.5), Err(Error::UnsupportedKind(_))));
    }

    #[test]
    fn vanishing_density_is_a_singularity() {
        let t = Distribution::tabulated(vec![0.0, 1.0, 2.0, 3.0], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(psi(&t, 1.5), Err(Error::Singularity { .. })));
    }
}
