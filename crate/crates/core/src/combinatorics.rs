//! Factorials and multinomial coefficients, exact and in log space.

use std::sync::OnceLock;

/// Below this argument `ln k!` comes from a compensated direct sum.
const DIRECT_SUM_CUTOFF: u64 = 256;

fn direct_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(DIRECT_SUM_CUTOFF as usize + 1);
        table.push(0.0);
        // Neumaier summation of ln 1 + ln 2 + ... + ln k
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for k in 1..=DIRECT_SUM_CUTOFF {
            let term = (k as f64).ln();
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            table.push(sum + comp);
        }
        table
    })
}

/// `ln k!` in nats.
pub fn log_factorial(k: u64) -> f64 {
    if k <= DIRECT_SUM_CUTOFF {
        return direct_table()[k as usize];
    }
    // Stirling series for ln Gamma(k + 1); truncation error < 1e-20 past the cutoff.
    let x = k as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

/// `ln (n choose k)`.
pub fn log_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    log_factorial(n) - log_factorial(k) - log_factorial(n - k)
}

/// `ln (n! / prod counts[i]!)` with `n = sum counts`.
pub fn log_multinomial(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    log_factorial(n) - counts.iter().map(|&c| log_factorial(c)).sum::<f64>()
}

/// Exact binomial coefficient, `None` on `u128` overflow.
pub fn binomial_exact(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    // acc == C(n - k + i, i) after step i, so each division is exact
    for i in 1..=k as u128 {
        let num = (n - k) as u128 + i;
        let g = gcd(acc, i);
        acc = (acc / g).checked_mul(num / (i / g))?;
    }
    Some(acc)
}

/// Exact multinomial coefficient, `None` on `u128` overflow.
pub fn multinomial_exact(counts: &[u64]) -> Option<u128> {
    let mut total: u64 = 0;
    let mut acc: u128 = 1;
    for &c in counts {
        total = total.checked_add(c)?;
        acc = acc.checked_mul(binomial_exact(total, c)?)?;
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn log_factorial_examples() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        assert_relative_eq!(log_factorial(5), 120f64.ln(), max_relative = 1e-15);
        // mpmath: loggamma(101)
        assert_relative_eq!(log_factorial(100), 363.739_375_555_563_5, max_relative = 1e-14);
    }

    #[test]
    fn series_matches_table_at_cutoff() {
        // both branches evaluated at the seam
        let x = DIRECT_SUM_CUTOFF;
        let table = direct_table()[x as usize];
        let xf = x as f64;
        let inv = 1.0 / xf;
        let series = xf * xf.ln() - xf + 0.5 * (2.0 * std::f64::consts::PI * xf).ln() + inv / 12.0
            - inv.powi(3) / 360.0
            + inv.powi(5) / 1260.0;
        assert_relative_eq!(table, series, max_relative = 1e-14);
        assert_relative_eq!(
            log_factorial(x + 1) - table,
            ((x + 1) as f64).ln(),
            max_relative = 1e-11
        );
    }

    #[test]
    fn large_arguments_match_high_precision_values() {
        // mpmath loggamma(k + 1), 30 digits
        assert_relative_eq!(log_factorial(1000), 5_912.128_178_488_163, max_relative = 1e-14);
        assert_relative_eq!(log_factorial(1_000_000), 12_815_518.384_658_17, max_relative = 1e-14);
    }

    #[test]
    fn exact_binomials() {
        assert_eq!(binomial_exact(4, 2), Some(6));
        assert_eq!(binomial_exact(5, 0), Some(1));
        assert_eq!(binomial_exact(3, 5), Some(0));
        assert_eq!(binomial_exact(10, 3), Some(120));
        assert_eq!(binomial_exact(100, 50), Some(100_891_344_545_564_193_334_812_497_256));
        assert_eq!(binomial_exact(1000, 500), None);
    }

    #[test]
    fn exact_multinomials() {
        assert_eq!(multinomial_exact(&[2, 2]), Some(6));
        assert_eq!(multinomial_exact(&[0, 3]), Some(1));
        assert_eq!(multinomial_exact(&[1, 2, 3]), Some(60));
        assert_eq!(multinomial_exact(&[]), Some(1));
        assert_relative_eq!(log_multinomial(&[1, 2, 3]), 60f64.ln(), max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn increments_are_logs(k in 1u64..=1_000_000) {
            let diff = log_factorial(k) - log_factorial(k - 1);
            // absolute 1e-10 exceeds f64 resolution once ln k! passes ~2e5
            let tol = if k <= 20_000 { 1e-10 } else { 1e-10 * log_factorial(k) };
            prop_assert!((diff - (k as f64).ln()).abs() <= tol, "k={k} diff={diff}");
        }

        #[test]
        fn exact_and_log_multinomial_agree(counts in prop::collection::vec(0u64..30, 1..5)) {
            let exact = multinomial_exact(&counts);
            prop_assume!(exact.is_some());
            let exact = exact.unwrap() as f64;
            prop_assert!((exact.ln() - log_multinomial(&counts)).abs() <= 1e-10 * exact.ln().max(1.0));
        }
    }
}
