//! Binomial log-probabilities without catastrophic cancellation.
//!
//! `ln C(n, i) p^i q^(n-i)` is assembled from the Stirling remainder of
//! `ln Gamma` and the deviance term `bd0` (Loader's saddle-point form), so no
//! large `ln Gamma` values are ever subtracted from each other.

use std::f64::consts::PI;

/// `ln Gamma(n + 1) - [(n + 1/2) ln n - n + ln sqrt(2 pi)]` for n = 0..=15.
#[allow(clippy::excessive_precision)]
const STIRLERR_TABLE: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_258_219_67,
    0.041_340_695_955_409_294_093_82,
    0.027_677_925_684_998_339_148_79,
    0.020_790_672_103_765_093_111_52,
    0.016_644_691_189_821_192_163_19,
    0.013_876_128_823_070_747_998_75,
    0.011_896_709_945_891_770_095_06,
    0.010_411_265_261_972_096_497_48,
    0.009_255_462_182_712_732_917_729,
    0.008_330_563_433_362_871_256_469,
    0.007_573_675_487_951_840_794_972,
    0.006_942_840_107_209_529_865_664,
    0.006_408_994_188_004_207_068_44,
    0.005_951_370_112_758_847_735_624,
    0.005_554_733_551_962_801_371_039,
];

const S0: f64 = 1.0 / 12.0;
const S1: f64 = 1.0 / 360.0;
const S2: f64 = 1.0 / 1260.0;
const S3: f64 = 1.0 / 1680.0;
const S4: f64 = 1.0 / 1188.0;

/// Stirling-series remainder of `ln n!`.
pub(crate) fn stirlerr(n: u64) -> f64 {
    if let Some(v) = STIRLERR_TABLE.get(n as usize) {
        return *v;
    }
    let n = n as f64;
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance `x ln(x / m) + m - x`, by series when `x` is close to `m`.
pub(crate) fn bd0(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let next = s + ej / (2 * j + 1) as f64;
            if next == s {
                return next;
            }
            s = next;
        }
        s
    } else {
        x * (x / m).ln() + m - x
    }
}

/// `ln [C(n, i) p^i (1-p)^(n-i)]` for `0 < p < 1` and `i <= n`.
pub(crate) fn ln_binomial_pmf(n: u64, i: u64, p: f64) -> f64 {
    debug_assert!(i <= n && p > 0.0 && p < 1.0);
    let q = 1.0 - p;
    if i == 0 {
        return n as f64 * (-p).ln_1p();
    }
    if i == n {
        return n as f64 * p.ln();
    }
    let (nf, xf) = (n as f64, i as f64);
    let lc = stirlerr(n) - stirlerr(i) - stirlerr(n - i) - bd0(xf, nf * p) - bd0(nf - xf, nf * q);
    let lf = (2.0 * PI).ln() + xf.ln() + (-xf / nf).ln_1p();
    lc - 0.5 * lf
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_factorial_direct(n: u64) -> f64 {
        (1..=n).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn stirlerr_is_continuous_across_the_table_boundary() {
        for n in 14..40u64 {
            let nf = n as f64;
            let direct = ln_factorial_direct(n) - ((nf + 0.5) * nf.ln() - nf + 0.5 * (2.0 * PI).ln());
            // the direct sum loses ~n ulps of ln n!, so compare absolutely
            assert!((stirlerr(n) - direct).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn bd0_branches_agree() {
        for &(x, m) in &[(10.0, 10.5), (100.0, 95.0), (3.0, 3.2)] {
            let direct: f64 = x * (x / m as f64).ln() + m - x;
            assert!((bd0(x, m) - direct).abs() < 1e-12);
        }
        assert_eq!(bd0(7.0, 7.0), 0.0);
    }

    #[test]
    fn small_binomial_values() {
        assert!((ln_binomial_pmf(4, 2, 0.5) - (6.0f64 / 16.0).ln()).abs() < 1e-15);
        assert!((ln_binomial_pmf(10, 3, 0.2) - (120.0 * 0.008 * 0.8f64.powi(7)).ln()).abs() < 1e-14);
    }
}
