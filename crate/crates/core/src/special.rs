//! Log-space special functions used by the mass functions and densities.

use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `n!` as a double; exact for every `n <= 20`.
fn small_factorial(n: u64) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Stirling remainder `ln n! - [(n + 1/2) ln n - n + ln sqrt(2 pi)]`.
///
/// Only used for n >= 16, where five terms are accurate far below f64 resolution.
pub(crate) fn stirling_correction(n: f64) -> f64 {
    let inv = 1.0 / n;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0
        - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))))
}

/// `ln(n!)`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 16 {
        small_factorial(n).ln()
    } else {
        let x = n as f64;
        (x + 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_correction(x)
    }
}

const GAMMA_R: f64 = 10.900511;
const GAMMA_DK: [f64; 11] = [
    2.485_740_891_387_535_5e-5,
    1.051_423_785_817_219_7,
    -3.456_870_972_220_162_5,
    4.512_277_094_668_948,
    -2.982_852_253_235_766_4,
    1.056_397_115_771_267,
    -1.954_287_731_916_458_7e-1,
    1.709_705_434_044_412e-2,
    -5.719_261_174_043_057e-4,
    4.633_994_733_599_057e-6,
    -2.719_949_084_886_077_2e-9,
];
const LN_2_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_2;

/// `ln Gamma(x)` for `x > 0` (Lanczos approximation, relative accuracy around 1e-15).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = GAMMA_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(GAMMA_DK[0], |s, (i, &dk)| s + dk / (i as f64 - x));
        PI.ln()
            - (PI * x).sin().abs().ln()
            - s.ln()
            - LN_2_SQRT_E_OVER_PI
            - (0.5 - x) * ((0.5 - x + GAMMA_R) / std::f64::consts::E).ln()
    } else {
        let s = GAMMA_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(GAMMA_DK[0], |s, (i, &dk)| s + dk / (x + i as f64 - 1.0));
        s.ln() + LN_2_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + GAMMA_R) / std::f64::consts::E).ln()
    }
}

/// `ln(sqrt(2 pi))`.
pub(crate) fn ln_sqrt_2pi() -> f64 {
    LN_SQRT_2PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_match_products() {
        let mut acc = 0.0f64;
        for n in 1..=170u64 {
            acc += (n as f64).ln();
            assert!(
                (ln_factorial(n) - acc).abs() <= 1e-12 * acc.max(1.0),
                "n={n}"
            );
        }
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
    }

    #[test]
    fn stirling_branch_is_continuous() {
        // 16! and 15! are exact doubles; check the switch-over point against them
        let exact16 = small_factorial(16).ln();
        assert!((ln_factorial(16) - exact16).abs() < 1e-14 * exact16);
        let exact20 = small_factorial(20).ln();
        assert!((ln_factorial(20) - exact20).abs() < 1e-14 * exact20);
    }

    #[test]
    fn gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert!((ln_gamma(0.5) - 0.5 * PI.ln()).abs() < 1e-14);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(0.25) - 1.288_022_524_698_077_5).abs() < 1e-13);
        for n in 1..60u64 {
            let g = ln_gamma(n as f64 + 1.0);
            assert!(
                (g - ln_factorial(n)).abs() <= 1e-12 * g.abs().max(1.0),
                "n={n}"
            );
        }
    }
}
