//! Binary detection of a constant signal in white Gaussian noise.
//!
//! Hypothesis 1 sends `s1 = (m, ..., m)` and hypothesis 2 sends the zero
//! vector, each with probability 1/2. The receiver sees `r = s_i + n` with
//! `n ~ N(0, I_N)` and picks the nearer signal, which is the same as
//! comparing `sum_k r_k` with `N m / 2`.
//!
//! # Seeds
//!
//! Random streams come from [`mix_seed`]: SplitMix64's finalizer applied to
//! `seed + (counter + 1) * 0x9E3779B97F4A7C15`. Trials are cut into chunks
//! of [`CHUNK_TRIALS`]; chunk `c` of a run with seed `s` uses
//! `ChaCha8Rng::seed_from_u64(mix_seed(s, c))`. Row `i` of a [`sweep`] runs
//! with seed `mix_seed(master, i)`. Chunk counts are summed, so the result
//! does not depend on how many threads execute the chunks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{invalid, Result};

/// Trials per independently seeded chunk.
pub const CHUNK_TRIALS: u64 = 1 << 16;

/// `Q(x) = P(Z > x)` for a standard normal `Z`, as `erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Chernoff bound `Q(x) <= exp(-x^2 / 2)`, valid for `x >= 0`.
pub fn q_chernoff_bound(x: f64) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(invalid(format!("Chernoff tail bound needs finite x >= 0, got {x}")));
    }
    Ok((-0.5 * x * x).exp())
}

fn check_signal(dim: u64, amplitude: f64) -> Result<()> {
    if dim == 0 {
        return Err(invalid("dim must be >= 1"));
    }
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(invalid(format!("amplitude must be finite and >= 0, got {amplitude}")));
    }
    Ok(())
}

/// Exact error probability `Q(sqrt(N) m / 2)` of the minimum-distance rule.
pub fn analytic_error(dim: u64, amplitude: f64) -> Result<f64> {
    check_signal(dim, amplitude)?;
    Ok(q_function((dim as f64).sqrt() * amplitude / 2.0))
}

/// `exp(-m^2 N / 8)`.
pub fn chernoff_error_bound(dim: u64, amplitude: f64) -> Result<f64> {
    check_signal(dim, amplitude)?;
    Ok((-amplitude * amplitude * dim as f64 / 8.0).exp())
}

/// One Monte Carlo configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionScenario {
    dim: u64,
    amplitude: f64,
    trials: u64,
    seed: u64,
}

impl DetectionScenario {
    pub fn new(dim: u64, amplitude: f64, trials: u64, seed: u64) -> Result<Self> {
        check_signal(dim, amplitude)?;
        if trials == 0 {
            return Err(invalid("trials must be >= 1"));
        }
        Ok(Self {
            dim,
            amplitude,
            trials,
            seed,
        })
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Derives the seed of stream `counter` from a master seed.
pub fn mix_seed(seed: u64, counter: u64) -> u64 {
    let mut z = seed.wrapping_add(counter.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn chunk_errors(s: &DetectionScenario, chunk: u64) -> u64 {
    let start = chunk * CHUNK_TRIALS;
    let len = CHUNK_TRIALS.min(s.trials - start);
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(s.seed, chunk));
    let threshold = s.dim as f64 * s.amplitude / 2.0;
    let mut errors = 0;
    for _ in 0..len {
        let sends_signal: bool = rng.random();
        let offset = if sends_signal { s.amplitude } else { 0.0 };
        let stat: f64 = (0..s.dim).map(|_| offset + rng.sample::<f64, _>(StandardNormal)).sum();
        if (stat > threshold) != sends_signal {
            errors += 1;
        }
    }
    errors
}

/// Number of wrong decisions over `s.trials` trials.
pub fn count_detection_errors(s: &DetectionScenario) -> u64 {
    let chunks = s.trials.div_ceil(CHUNK_TRIALS);
    (0..chunks).into_par_iter().map(|c| chunk_errors(s, c)).sum()
}

/// Empirical error rate of the minimum-distance receiver.
pub fn simulate_detection(s: &DetectionScenario) -> f64 {
    count_detection_errors(s) as f64 / s.trials as f64
}

/// One cell of a [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub dim: u64,
    pub amplitude: f64,
    pub analytic_pe: f64,
    pub chernoff_bound: f64,
    pub empirical_pe: f64,
    pub trials: u64,
}

/// Every `(dim, amplitude)` pair, dims outer and amplitudes inner.
pub fn sweep(dims: &[u64], amplitudes: &[f64], trials: u64, seed: u64) -> Result<Vec<SweepRow>> {
    if dims.is_empty() || amplitudes.is_empty() {
        return Err(invalid("sweep needs at least one dim and one amplitude"));
    }
    let mut rows = Vec::with_capacity(dims.len() * amplitudes.len());
    for &dim in dims {
        for &amplitude in amplitudes {
            let row_seed = mix_seed(seed, rows.len() as u64);
            let scenario = DetectionScenario::new(dim, amplitude, trials, row_seed)?;
            rows.push(SweepRow {
                dim,
                amplitude,
                analytic_pe: analytic_error(dim, amplitude)?,
                chernoff_bound: chernoff_error_bound(dim, amplitude)?,
                empirical_pe: simulate_detection(&scenario),
                trials,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Normal tail by 5-point Gauss-Legendre on unit panels over `[x, x + 40]`.
    fn tail_quadrature(x: f64) -> f64 {
        if x < 0.0 {
            return 1.0 - tail_quadrature(-x);
        }
        const NODES: [f64; 5] = [
            0.0,
            0.538_469_310_105_683_1,
            -0.538_469_310_105_683_1,
            0.906_179_845_938_664,
            -0.906_179_845_938_664,
        ];
        const WEIGHTS: [f64; 5] = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let density = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let h = 0.125;
        (0..320)
            .map(|i| {
                let mid = x + (i as f64 + 0.5) * h;
                NODES
                    .iter()
                    .zip(WEIGHTS)
                    .map(|(&u, w)| w * density(mid + 0.5 * h * u))
                    .sum::<f64>()
                    * 0.5
                    * h
            })
            .sum()
    }

    #[test]
    fn q_examples() {
        assert_eq!(q_function(0.0), 0.5);
        // mpmath erfc(x / sqrt 2) / 2
        assert_relative_eq!(q_function(1.0), 0.158_655_253_931_457_05, max_relative = 1e-14);
        assert_relative_eq!(q_function(2.0), 0.022_750_131_948_179_21, max_relative = 1e-14);
        assert_relative_eq!(q_function(3.0), 0.001_349_898_031_630_094_5, max_relative = 1e-13);
        assert_relative_eq!(q_function(8.0), 6.220_960_574_271_784e-16, max_relative = 1e-12);
        assert_relative_eq!(q_function(-1.0), 0.841_344_746_068_542_9, max_relative = 1e-14);
    }

    #[test]
    fn q_matches_quadrature() {
        for i in -160..=160 {
            let x = i as f64 * 0.05;
            let (q, oracle) = (q_function(x), tail_quadrature(x));
            assert!((q - oracle).abs() <= 1e-12 * oracle, "x={x}: {q} vs {oracle}");
        }
    }

    #[test]
    fn tail_bound_and_symmetry_on_grid() {
        for i in 0..=8000 {
            let x = i as f64 * 1e-3;
            assert!(q_function(x) <= q_chernoff_bound(x).unwrap());
            assert!((q_function(x) + q_function(-x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn chernoff_bound_examples() {
        assert_eq!(q_chernoff_bound(0.0).unwrap(), 1.0);
        assert_relative_eq!(q_chernoff_bound(2.0).unwrap(), (-2.0f64).exp());
        assert!(q_chernoff_bound(-0.1).is_err());
        assert!(q_chernoff_bound(f64::NAN).is_err());
        assert_relative_eq!(chernoff_error_bound(4, 2.0).unwrap(), (-2.0f64).exp());
        assert_relative_eq!(chernoff_error_bound(1, 4.0).unwrap(), (-2.0f64).exp());
        assert_eq!(chernoff_error_bound(3, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn analytic_examples() {
        assert_eq!(analytic_error(7, 0.0).unwrap(), 0.5);
        assert_eq!(analytic_error(4, 2.0).unwrap(), q_function(2.0));
        assert_eq!(analytic_error(1, 6.0).unwrap(), q_function(3.0));
        assert!(analytic_error(0, 1.0).is_err());
        assert!(analytic_error(1, -1.0).is_err());
    }

    #[test]
    fn scenario_validation() {
        assert!(DetectionScenario::new(0, 1.0, 10, 0).is_err());
        assert!(DetectionScenario::new(1, 1.0, 0, 0).is_err());
        assert!(DetectionScenario::new(1, f64::INFINITY, 10, 0).is_err());
    }

    fn within_four_sigma(p: f64, empirical: f64, trials: u64) -> bool {
        (empirical - p).abs() <= 4.0 * (p * (1.0 - p) / trials as f64).sqrt()
    }

    #[test]
    fn coin_flip_regime() {
        for seed in [0, 1, 99] {
            let s = DetectionScenario::new(3, 0.0, 100_000, seed).unwrap();
            assert!(within_four_sigma(0.5, simulate_detection(&s), 100_000));
        }
    }

    #[test]
    fn monte_carlo_matches_q() {
        let s = DetectionScenario::new(4, 2.0, 1_000_000, 5).unwrap();
        assert!(within_four_sigma(q_function(2.0), simulate_detection(&s), 1_000_000));
    }

    #[test]
    fn deterministic_for_any_thread_count() {
        let s = DetectionScenario::new(2, 1.5, 300_001, 17).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| count_detection_errors(&s));
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| count_detection_errors(&s));
        assert_eq!(single, many);
        assert_eq!(single, count_detection_errors(&s));
    }

    #[test]
    fn sweep_layout_and_row_seeds() {
        let rows = sweep(&[1, 4], &[1.0, 2.0, 3.0], 1000, 42).unwrap();
        let cells: Vec<(u64, f64)> = rows.iter().map(|r| (r.dim, r.amplitude)).collect();
        assert_eq!(cells, [(1, 1.0), (1, 2.0), (1, 3.0), (4, 1.0), (4, 2.0), (4, 3.0)]);
        assert_relative_eq!(rows[1].analytic_pe, 0.158_655_253_931_457_05, max_relative = 1e-14);

        // extending the amplitude list leaves the first rows untouched
        let wider = sweep(&[1], &[1.0, 2.0, 3.0, 4.0], 1000, 42).unwrap();
        assert_eq!(&wider[..3], &rows[..3]);
        let s = DetectionScenario::new(1, 2.0, 1000, mix_seed(42, 1)).unwrap();
        assert_eq!(rows[1].empirical_pe, simulate_detection(&s));

        assert!(sweep(&[], &[1.0], 10, 0).is_err());
        assert!(sweep(&[1], &[], 10, 0).is_err());
    }

    #[test]
    fn mix_seed_separates_streams() {
        let seeds: std::collections::HashSet<u64> = (0..1000).flat_map(|c| [mix_seed(0, c), mix_seed(1, c)]).collect();
        assert_eq!(seeds.len(), 2000);
    }

    proptest! {
        #[test]
        fn analytic_below_bound(dim in 1u64..64, m in 0.0f64..10.0) {
            prop_assert!(analytic_error(dim, m).unwrap() <= chernoff_error_bound(dim, m).unwrap());
        }

        #[test]
        fn monotone_in_amplitude_and_dim(dim in 1u64..32, m in 0.01f64..4.0, dm in 0.01f64..1.0) {
            prop_assert!(analytic_error(dim, m + dm).unwrap() < analytic_error(dim, m).unwrap());
            prop_assert!(analytic_error(dim + 1, m).unwrap() < analytic_error(dim, m).unwrap());
        }

        #[test]
        fn depends_only_on_n_m_squared(n1 in 1u64..50, n2 in 1u64..50, m1 in 0.0f64..6.0) {
            let m2 = m1 * (n1 as f64 / n2 as f64).sqrt();
            let (a, b) = (analytic_error(n1, m1).unwrap(), analytic_error(n2, m2).unwrap());
            prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }
}
