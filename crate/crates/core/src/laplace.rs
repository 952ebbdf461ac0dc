//! Laplace obfuscation noise.
//!
//! `lambda` is the *rate* of the noise: the density is `(lambda/2) exp(-lambda |z|)`,
//! so the scale is `1/lambda` and the variance `2/lambda^2`. Smaller `lambda`
//! means wider noise and stronger privacy.

use rand::distributions::Open01;
use rand::Rng;

use crate::error::{ensure_finite, invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyParams {
    lambda: f64,
}

impl PrivacyParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(invalid("lambda", format!("must be a finite value > 0, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Scale `b = 1/lambda` of the noise.
    pub fn scale(&self) -> f64 {
        1.0 / self.lambda
    }

    pub fn variance(&self) -> f64 {
        2.0 / (self.lambda * self.lambda)
    }
}

/// A noisy declared availability. Continuous, never rounded or clamped to `[0, n]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Declaration(f64);

impl Declaration {
    pub fn new(x: f64) -> Result<Self> {
        ensure_finite("x", x).map(Declaration)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `ln(lambda/2) - lambda * |x - center|`.
pub fn laplace_log_density(params: &PrivacyParams, center: f64, x: f64) -> Result<f64> {
    ensure_finite("center", center)?;
    ensure_finite("x", x)?;
    Ok(log_kernel(params, center, x))
}

#[inline]
pub(crate) fn log_kernel(params: &PrivacyParams, center: f64, x: f64) -> f64 {
    (0.5 * params.lambda).ln() - params.lambda * (x - center).abs()
}

/// Linear-space density. Underflows to 0 far in the tails; use the log form for inference.
pub fn laplace_density(params: &PrivacyParams, center: f64, x: f64) -> Result<f64> {
    laplace_log_density(params, center, x).map(f64::exp)
}

pub fn laplace_cdf(params: &PrivacyParams, center: f64, x: f64) -> f64 {
    let z = x - center;
    if z < 0.0 {
        0.5 * (params.lambda * z).exp()
    } else {
        1.0 - 0.5 * (-params.lambda * z).exp()
    }
}

/// Inverse CDF of zero-centred Laplace noise at `u` in (0, 1).
pub fn laplace_quantile(params: &PrivacyParams, u: f64) -> f64 {
    debug_assert!(u > 0.0 && u < 1.0);
    if u < 0.5 {
        (2.0 * u).ln() / params.lambda
    } else {
        -(2.0 * (1.0 - u)).ln() / params.lambda
    }
}

/// Declaration `true_k + L` with `L` obtained from the single uniform variate `u`.
pub fn declaration_from_uniform(params: &PrivacyParams, true_k: u64, u: f64) -> Declaration {
    Declaration(true_k as f64 + laplace_quantile(params, u))
}

/// Draws one noisy declaration; consumes exactly one open-interval uniform from `rng`.
pub fn sample_declaration<R: Rng + ?Sized>(
    params: &PrivacyParams,
    true_k: u64,
    rng: &mut R,
) -> Declaration {
    let u: f64 = rng.sample(Open01);
    declaration_from_uniform(params, true_k, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lam(v: f64) -> PrivacyParams {
        PrivacyParams::new(v).unwrap()
    }

    #[test]
    fn rejects_bad_lambda() {
        assert!(PrivacyParams::new(0.0).is_err());
        assert!(PrivacyParams::new(-1.0).is_err());
        assert!(PrivacyParams::new(f64::NAN).is_err());
        assert!(PrivacyParams::new(f64::INFINITY).is_err());
    }

    #[test]
    fn log_density_examples() {
        let d = laplace_log_density(&lam(1.5), 0.0, 0.0).unwrap();
        assert!((d - 0.75f64.ln()).abs() < 1e-15);
        assert!((d + 0.287_682_072_451_780_9).abs() < 1e-12);

        let d = laplace_log_density(&lam(1.5), 100.0, 0.0).unwrap();
        assert_eq!(d, 0.75f64.ln() - 150.0);

        let d = laplace_log_density(&lam(2.0), 5.0, 3.0).unwrap();
        assert_eq!(d, -4.0);
    }

    #[test]
    fn log_density_stays_finite_far_out() {
        let d = laplace_log_density(&lam(1.5), 0.0, 1e6).unwrap();
        assert!(d.is_finite());
        assert_eq!(laplace_density(&lam(1.5), 0.0, 1e6).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_inputs_are_errors() {
        assert!(laplace_log_density(&lam(1.0), 0.0, f64::NAN).is_err());
        assert!(laplace_log_density(&lam(1.0), f64::INFINITY, 0.0).is_err());
        assert!(Declaration::new(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(declaration_from_uniform(&lam(3.7), 7, 0.5).value(), 7.0);
        let x = declaration_from_uniform(&lam(1.0), 0, 0.75).value();
        assert!((x - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn quantile_inverts_cdf() {
        let p = lam(0.8);
        for &u in &[1e-9, 0.01, 0.3, 0.5, 0.77, 0.999_999] {
            let z = laplace_quantile(&p, u);
            assert!((laplace_cdf(&p, 0.0, z) - u).abs() < 1e-12, "u={u}");
        }
    }

    #[test]
    fn density_integrates_to_one() {
        for &l in &[0.1, 1.5, 7.0] {
            let p = lam(l);
            let c = 3.25;
            let (a, b) = (c - 30.0 / l, c + 30.0 / l);
            // the kink at the centre falls on a grid node
            let steps = 200_000;
            let h = (b - a) / steps as f64;
            let mut acc = 0.0;
            for k in 0..=steps {
                let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
                acc += w * laplace_density(&p, c, a + k as f64 * h).unwrap();
            }
            assert!((acc * h - 1.0).abs() < 1e-6, "lambda={l}: {}", acc * h);
        }
    }

    #[test]
    fn sample_mean_matches_true_count() {
        let p = lam(1.5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let mean = (0..n)
            .map(|_| sample_declaration(&p, 50, &mut rng).value())
            .sum::<f64>()
            / n as f64;
        let tol = 3.0 * (2f64.sqrt() / 1.5) / 1e3;
        assert!((mean - 50.0).abs() < tol, "mean={mean} tol={tol}");
    }

    #[test]
    fn empirical_cdf_matches_ks() {
        let p = lam(0.9);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 100_000;
        let mut xs: Vec<f64> = (0..n)
            .map(|_| sample_declaration(&p, 0, &mut rng).value())
            .collect();
        xs.sort_by(f64::total_cmp);
        let mut d: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let f = laplace_cdf(&p, 0.0, x);
            d = d.max((f - i as f64 / n as f64).abs());
            d = d.max(((i + 1) as f64 / n as f64 - f).abs());
        }
        assert!(d < 0.01, "KS statistic {d}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = lam(1.2);
        let a: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            (0..16).map(|_| sample_declaration(&p, 3, &mut rng).value()).collect()
        };
        let b: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            (0..16).map(|_| sample_declaration(&p, 3, &mut rng).value()).collect()
        };
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn log_density_symmetric(l in 0.01f64..20.0, c in -500.0f64..500.0, d in 0.0f64..200.0) {
            let p = lam(l);
            let up = laplace_log_density(&p, c, c + d).unwrap();
            let down = laplace_log_density(&p, c, c - d).unwrap();
            // c +/- d rounds, so allow an ulp of the centre scaled by lambda
            let tol = 1e-12 * (1.0 + up.abs()) + 4.0 * l * f64::EPSILON * (c.abs() + d);
            prop_assert!((up - down).abs() <= tol);
        }

        #[test]
        fn log_density_peaks_at_center(l in 0.01f64..20.0, c in -500.0f64..500.0, d in 1e-6f64..200.0) {
            let p = lam(l);
            let peak = laplace_log_density(&p, c, c).unwrap();
            prop_assert!(laplace_log_density(&p, c, c + d).unwrap() < peak);
            prop_assert!(laplace_log_density(&p, c, c - d).unwrap() < peak);
        }
    }
}
