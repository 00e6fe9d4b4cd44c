//! Maximum-entropy occupation of discrete energy levels.
//!
//! All logarithms in this module are natural. Energies are plain numbers in
//! a caller-chosen unit and `beta` is the matching inverse energy
//! `1 / (k_B T)`, so only the product `beta * energy` ever matters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::combinatorics::log_multinomial;
use crate::dist::DiscreteDistribution;
use crate::error::{invalid, Error, Result};

const MAX_SOLVE_STEPS: usize = 200;

/// Energy levels at a fixed inverse temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySystem {
    levels: Vec<f64>,
    beta: f64,
}

impl EnergySystem {
    pub fn new(levels: Vec<f64>, beta: f64) -> Result<Self> {
        check_levels(&levels)?;
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(invalid(format!(
                "beta = {beta}; must be finite and >= 0 (negative temperatures are not supported)"
            )));
        }
        Ok(Self { levels, beta })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn ground_energy(&self) -> f64 {
        min_level(&self.levels)
    }
}

fn check_levels(levels: &[f64]) -> Result<()> {
    if levels.len() < 2 {
        return Err(invalid("need at least two energy levels"));
    }
    if let Some(e) = levels.iter().find(|e| !e.is_finite()) {
        return Err(invalid(format!("energy level {e} is not finite")));
    }
    Ok(())
}

fn min_level(levels: &[f64]) -> f64 {
    levels.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Boltzmann weights relative to the ground level, `exp(-beta (e - e_min))`.
fn shifted_weights(levels: &[f64], beta: f64) -> (f64, Vec<f64>) {
    let ground = min_level(levels);
    let w = levels.iter().map(|&e| (-beta * (e - ground)).exp()).collect();
    (ground, w)
}

/// `Z = sum_j exp(-beta e_j)`.
pub fn partition_function(sys: &EnergySystem) -> f64 {
    let (ground, w) = shifted_weights(&sys.levels, sys.beta);
    (-sys.beta * ground).exp() * w.iter().sum::<f64>()
}

/// `ln Z`, finite even when `Z` itself would overflow.
pub fn log_partition_function(sys: &EnergySystem) -> f64 {
    let (ground, w) = shifted_weights(&sys.levels, sys.beta);
    -sys.beta * ground + w.iter().sum::<f64>().ln()
}

/// `P_j = exp(-beta e_j) / Z`.
pub fn boltzmann_distribution(sys: &EnergySystem) -> DiscreteDistribution {
    let (_, w) = shifted_weights(&sys.levels, sys.beta);
    let z: f64 = w.iter().sum();
    DiscreteDistribution::from_normalized(w.into_iter().map(|x| x / z).collect())
}

/// Mean energy above the ground level; no cancellation at large `beta`.
fn excess_energy(levels: &[f64], beta: f64) -> f64 {
    let (ground, w) = shifted_weights(levels, beta);
    let z: f64 = w.iter().sum();
    levels.iter().zip(&w).map(|(&e, &x)| (e - ground) * x).sum::<f64>() / z
}

/// `sum_j e_j P_j(beta)`.
pub fn mean_energy(sys: &EnergySystem) -> f64 {
    sys.ground_energy() + excess_energy(&sys.levels, sys.beta)
}

/// Inverse temperature whose Boltzmann distribution has mean energy
/// `target_mean`.
///
/// The mean decreases strictly from the arithmetic mean of the levels at
/// `beta = 0` toward the ground energy, so a target in
/// `(min level, arithmetic mean]` has exactly one solution. The bracket grows
/// geometrically from `beta = 1` and is then bisected down to `f64`
/// resolution; the result is checked against `tol`.
pub fn solve_beta(levels: &[f64], target_mean: f64, tol: f64) -> Result<f64> {
    check_levels(levels)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(invalid(format!("tolerance {tol} must be finite and > 0")));
    }
    if !target_mean.is_finite() {
        return Err(invalid(format!("target mean {target_mean} is not finite")));
    }
    let ground = min_level(levels);
    let uniform_mean = levels.iter().sum::<f64>() / levels.len() as f64;
    if target_mean <= ground || target_mean > uniform_mean + tol {
        return Err(Error::Infeasible(format!(
            "mean energy {target_mean} outside ({ground}, {uniform_mean}] reachable with beta >= 0"
        )));
    }
    if target_mean >= uniform_mean {
        return Ok(0.0);
    }

    let target = target_mean - ground;
    let excess = |beta: f64| excess_energy(levels, beta);
    let mut steps = 0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while excess(hi) > target {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps >= MAX_SOLVE_STEPS || !hi.is_finite() {
            return Err(Error::Numerical(format!(
                "could not bracket beta for mean {target_mean}"
            )));
        }
    }
    while steps < MAX_SOLVE_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    let beta = 0.5 * (lo + hi);
    let err = (excess(beta) - target).abs();
    if err > tol {
        return Err(Error::Numerical(format!(
            "beta = {beta} misses the target mean by {err} > {tol}"
        )));
    }
    Ok(beta)
}

/// Particle counts per energy level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupancy {
    counts: Vec<u64>,
    total: u64,
}

impl Occupancy {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        let total = counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| Error::Overflow("occupancy total".into()))?;
        if total == 0 {
            return Err(invalid("occupancy must hold at least one particle"));
        }
        Ok(Self { counts, total })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// `sum_j e_j N_j`.
    pub fn energy(&self, levels: &[f64]) -> Result<f64> {
        if levels.len() != self.counts.len() {
            return Err(Error::AlphabetMismatch {
                left: self.counts.len(),
                right: levels.len(),
            });
        }
        Ok(levels.iter().zip(&self.counts).map(|(e, &c)| e * c as f64).sum())
    }
}

/// `ln W = ln N! - sum_j ln N_j!`.
pub fn log_multiplicity_exact(occ: &Occupancy) -> f64 {
    log_multinomial(&occ.counts)
}

/// Stirling form `N ln N - sum_j N_j ln N_j`; the `-N` terms cancel.
pub fn log_multiplicity_stirling(occ: &Occupancy) -> f64 {
    let x_ln_x = |c: u64| if c == 0 { 0.0 } else { c as f64 * (c as f64).ln() };
    x_ln_x(occ.total) - occ.counts.iter().map(|&c| x_ln_x(c)).sum::<f64>()
}

/// Outcome of [`maxent_verify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxentReport {
    /// False when the mean-energy constraint pins the distribution
    /// (fewer than three levels, or only two distinct directions).
    pub applicable: bool,
    pub passed: bool,
    /// Perturbations actually evaluated.
    pub trials: usize,
    /// Largest `H(perturbed) - H(boltzmann)` seen, nats; `None` when no
    /// perturbation was possible.
    pub max_excess: Option<f64>,
}

/// Allowed entropy excess before a perturbation counts as beating the
/// Boltzmann law.
const ENTROPY_SLACK: f64 = 1e-12;

/// Probes the Boltzmann distribution with random perturbations that keep
/// both normalization and mean energy fixed, and checks none of them has
/// higher entropy.
///
/// Directions are Gaussian vectors projected onto the orthogonal complement
/// of `span{1, levels}`; step lengths are uniform up to the boundary of the
/// simplex.
pub fn maxent_verify(sys: &EnergySystem, trials: usize, seed: u64) -> Result<MaxentReport> {
    if trials == 0 {
        return Err(invalid("trials must be >= 1"));
    }
    let p = boltzmann_distribution(sys);
    let k = p.len();
    let basis = constraint_basis(&sys.levels);
    if k < 3 || basis.len() >= k {
        return Ok(MaxentReport {
            applicable: false,
            passed: true,
            trials: 0,
            max_excess: None,
        });
    }

    let base_entropy = p.entropy_nats();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_excess = f64::NEG_INFINITY;
    let mut done = 0;
    let mut attempts = 0usize;
    while done < trials {
        attempts += 1;
        if attempts > trials.saturating_mul(100) {
            return Err(Error::Numerical("too many rejected perturbation draws".into()));
        }
        let Some(dir) = feasible_direction(&mut rng, &basis, k) else {
            continue;
        };
        // largest step keeping every probability nonnegative
        let t_max = p
            .probs()
            .iter()
            .zip(&dir)
            .filter(|(_, &d)| d < 0.0)
            .map(|(&pj, &d)| pj / -d)
            .fold(f64::INFINITY, f64::min);
        if !t_max.is_finite() || t_max <= 0.0 {
            continue;
        }
        let t = t_max * (1.0 - rng.random::<f64>());
        let mut q: Vec<f64> = p.probs().iter().zip(&dir).map(|(&pj, &d)| pj + t * d).collect();
        if q.iter().any(|&x| x < -1e-12) {
            continue;
        }
        for x in &mut q {
            *x = x.max(0.0);
        }
        let h: f64 = -q.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>();
        max_excess = max_excess.max(h - base_entropy);
        done += 1;
    }
    Ok(MaxentReport {
        applicable: true,
        passed: max_excess <= ENTROPY_SLACK,
        trials: done,
        max_excess: Some(max_excess),
    })
}

/// Orthonormal basis of `span{1, levels}` via Gram-Schmidt; one vector when
/// all levels coincide.
fn constraint_basis(levels: &[f64]) -> Vec<Vec<f64>> {
    let k = levels.len() as f64;
    let ones = vec![1.0 / k.sqrt(); levels.len()];
    let mean = levels.iter().sum::<f64>() / k;
    let centred: Vec<f64> = levels.iter().map(|e| e - mean).collect();
    let norm = centred.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = levels.iter().map(|e| e.abs()).fold(0.0, f64::max).max(1.0);
    if norm <= 1e-12 * scale {
        vec![ones]
    } else {
        vec![ones, centred.into_iter().map(|x| x / norm).collect()]
    }
}

fn feasible_direction(rng: &mut ChaCha8Rng, basis: &[Vec<f64>], k: usize) -> Option<Vec<f64>> {
    let mut d: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
    for b in basis {
        let dot: f64 = d.iter().zip(b).map(|(x, y)| x * y).sum();
        for (x, y) in d.iter_mut().zip(b) {
            *x -= dot * y;
        }
    }
    let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    (norm > 1e-9).then(|| d.into_iter().map(|x| x / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn sys(levels: &[f64], beta: f64) -> EnergySystem {
        EnergySystem::new(levels.to_vec(), beta).unwrap()
    }

    #[test]
    fn system_validation() {
        assert!(EnergySystem::new(vec![0.0], 1.0).is_err());
        assert!(EnergySystem::new(vec![0.0, 1.0], -0.5).is_err());
        assert!(EnergySystem::new(vec![0.0, f64::NAN], 1.0).is_err());
        assert!(EnergySystem::new(vec![0.0, 1.0], f64::INFINITY).is_err());
    }

    #[test]
    fn partition_function_examples() {
        assert_abs_diff_eq!(partition_function(&sys(&[0.0, 0.0], 3.7)), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(partition_function(&sys(&[0.0, 1.0], LN_2)), 1.5, epsilon = 1e-15);
        assert_eq!(partition_function(&sys(&[0.0, 1.0, 2.0], 0.0)), 3.0);
        // shifted levels would overflow a naive sum
        let big = sys(&[-1000.0, -999.0], 1.0);
        assert_abs_diff_eq!(
            log_partition_function(&big),
            1000.0 + (1.0 + (-1.0f64).exp()).ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn distribution_examples() {
        assert_eq!(
            boltzmann_distribution(&sys(&[0.0, 1.0, 2.0], 0.0)).probs(),
            &[1.0 / 3.0; 3]
        );
        let p = boltzmann_distribution(&sys(&[0.0, 1.0], LN_2));
        assert_abs_diff_eq!(p.prob(0), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.prob(1), 1.0 / 3.0, epsilon = 1e-15);
        let cold = boltzmann_distribution(&sys(&[1.0, 0.0, 2.0], 50.0));
        // 1 - 1e-20 is not representable; the ground mass rounds to exactly 1
        assert_eq!(cold.prob(1), 1.0);
        assert!(cold.probs().iter().all(|&x| x > 0.0));
    }

    #[test]
    fn degenerate_levels_share_mass() {
        let p = boltzmann_distribution(&sys(&[0.0, 0.0, 1.0], 2.0));
        assert_eq!(p.prob(0), p.prob(1));
    }

    #[test]
    fn solve_beta_examples() {
        assert_eq!(solve_beta(&[0.0, 1.0], 0.5, 1e-12).unwrap(), 0.0);
        assert_abs_diff_eq!(
            solve_beta(&[0.0, 1.0], 1.0 / 3.0, 1e-12).unwrap(),
            LN_2,
            epsilon = 1e-12
        );
        let levels = [0.0, 1.0, 2.0];
        let beta = solve_beta(&levels, 0.1, 1e-12).unwrap();
        assert!(beta > 2.0);
        assert_abs_diff_eq!(mean_energy(&sys(&levels, beta)), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn solve_beta_rejects_unreachable_means() {
        for target in [0.0, -1.0, 0.75] {
            assert!(matches!(
                solve_beta(&[0.0, 1.0], target, 1e-10),
                Err(Error::Infeasible(_))
            ));
        }
        assert!(matches!(solve_beta(&[2.0, 2.0], 2.0, 1e-10), Err(Error::Infeasible(_))));
        assert!(solve_beta(&[0.0, 1.0], 0.3, 0.0).is_err());
    }

    #[test]
    fn offset_ground_loses_beta() {
        // the mean sits ~6e-16 above a ground of 0.127, below half an ulp of
        // resolution, so beta is only recoverable to a few parts in 1e5
        let levels = [0.127_348_872_837_413_17, 2.858_353_422_219_994];
        let beta = 13.196_039_093_796_475;
        let offset = mean_energy(&sys(&levels, beta));
        let err = (solve_beta(&levels, offset, 1e-10).unwrap() - beta).abs();
        assert!(err > 1e-8 && err < 1e-2, "{err}");

        let shifted = [0.0, levels[1] - levels[0]];
        let mean = mean_energy(&sys(&shifted, beta));
        assert_abs_diff_eq!(solve_beta(&shifted, mean, 1e-10).unwrap(), beta, epsilon = 1e-12);
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(log_multiplicity_exact(&Occupancy::new(vec![7, 0, 0]).unwrap()), 0.0);
        assert_abs_diff_eq!(
            log_multiplicity_exact(&Occupancy::new(vec![2, 2]).unwrap()),
            6f64.ln(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            log_multiplicity_exact(&Occupancy::new(vec![1, 2, 3]).unwrap()),
            60f64.ln(),
            epsilon = 1e-13
        );
        assert!(Occupancy::new(vec![0, 0]).is_err());
    }

    #[test]
    fn stirling_examples() {
        let half = Occupancy::new(vec![500, 500]).unwrap();
        let s = log_multiplicity_stirling(&half);
        assert_abs_diff_eq!(s, 1000.0 * LN_2, epsilon = 1e-9);
        // mpmath: ln C(1000, 500)
        let e = log_multiplicity_exact(&half);
        assert_abs_diff_eq!(e, 689.467_261_567_851_2, epsilon = 1e-9);
        assert!((s - e).abs() / e < 0.01);

        assert_eq!(log_multiplicity_stirling(&Occupancy::new(vec![40, 0]).unwrap()), 0.0);

        let occ = Occupancy::new(vec![100, 200, 300]).unwrap();
        let (s, e) = (log_multiplicity_stirling(&occ), log_multiplicity_exact(&occ));
        assert!((s - e).abs() / e < 0.02);
    }

    #[test]
    fn stirling_error_near_hundred_exceeds_one_percent() {
        // the sqrt(2 pi N_j) factors Stirling drops are still ~2% of ln W here
        let occ = Occupancy::new(vec![100, 100]).unwrap();
        let (s, e) = (log_multiplicity_stirling(&occ), log_multiplicity_exact(&occ));
        assert!((s - e) / e > 0.02);
    }

    #[test]
    fn maxent_two_levels_is_vacuous() {
        let r = maxent_verify(&sys(&[0.0, 1.0], 1.0), 100, 0).unwrap();
        assert!(!r.applicable && r.passed && r.max_excess.is_none());
    }

    #[test]
    fn maxent_holds_for_small_systems() {
        for (levels, beta) in [(vec![0.0, 1.0, 2.0], 1.0), (vec![0.0, 1.0, 2.0, 3.0], 0.5)] {
            let r = maxent_verify(&sys(&levels, beta), 10_000, 7).unwrap();
            assert!(r.applicable && r.passed, "{r:?}");
            assert_eq!(r.trials, 10_000);
            assert!(r.max_excess.unwrap() <= 0.0);
        }
    }

    #[test]
    fn maxent_perturbations_keep_constraints() {
        let s = sys(&[0.0, 0.4, 1.3, 2.0], 0.8);
        let basis = constraint_basis(s.levels());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let d = feasible_direction(&mut rng, &basis, 4).unwrap();
            assert!(d.iter().sum::<f64>().abs() < 1e-12);
            assert!(d.iter().zip(s.levels()).map(|(x, e)| x * e).sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn maxent_is_deterministic() {
        let s = sys(&[0.0, 0.5, 1.5], 1.2);
        assert_eq!(maxent_verify(&s, 500, 11).unwrap(), maxent_verify(&s, 500, 11).unwrap());
    }

    fn arb_system() -> impl Strategy<Value = EnergySystem> {
        (prop::collection::vec(0.0f64..3.0, 2..7), 0.0f64..20.0)
            .prop_filter("distinct levels", |(l, _)| l.iter().any(|&e| (e - l[0]).abs() > 1e-3))
            // energies measured from the ground state, see `offset_ground_loses_beta`
            .prop_map(|(l, b)| {
                let ground = min_level(&l);
                EnergySystem::new(l.iter().map(|e| e - ground).collect(), b).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn normalized(s in arb_system()) {
            let p = boltzmann_distribution(&s);
            prop_assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn mean_decreases_in_beta(s in arb_system()) {
            let grid: Vec<f64> = (0..40).map(|i| i as f64 * 0.25).collect();
            let means: Vec<f64> = grid
                .iter()
                .map(|&b| mean_energy(&EnergySystem::new(s.levels().to_vec(), b).unwrap()))
                .collect();
            prop_assert!(means.windows(2).all(|w| w[1] < w[0]), "{means:?}");
        }

        #[test]
        fn limits(s in arb_system()) {
            let hot = boltzmann_distribution(&EnergySystem::new(s.levels().to_vec(), 0.0).unwrap());
            let k = s.levels().len() as f64;
            prop_assert!(hot.probs().iter().all(|&x| (x - 1.0 / k).abs() < 1e-12));

            let ground = s.ground_energy();
            let gap = s.levels().iter().filter(|&&e| e > ground).fold(f64::INFINITY, |m, &e| m.min(e - ground));
            let cold = boltzmann_distribution(&EnergySystem::new(s.levels().to_vec(), 40.0 / gap).unwrap());
            let ground_mass: f64 = s
                .levels()
                .iter()
                .zip(cold.probs())
                .filter(|(&e, _)| e == ground)
                .map(|(_, &p)| p)
                .sum();
            prop_assert!(ground_mass >= 1.0 - 1e-15, "ground mass {ground_mass}");
        }

        #[test]
        fn solve_beta_round_trip(s in arb_system()) {
            let target = mean_energy(&s);
            let beta = solve_beta(s.levels(), target, 1e-10).unwrap();
            prop_assert!((beta - s.beta()).abs() < 1e-8, "beta {} recovered as {beta}", s.beta());
        }
    }
}
