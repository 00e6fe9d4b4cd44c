//! Finite-alphabet probability distributions.
//!
//! Information quantities here are measured in bits. The Boltzmann module
//! works in nats; [`NATS_PER_BIT`] is the single conversion factor between
//! the two.

use crate::error::{invalid, Error, Result};

/// `ln 2`: multiply bits by this to get nats.
pub const NATS_PER_BIT: f64 = std::f64::consts::LN_2;

/// Absolute tolerance on `sum(p) == 1` for a valid distribution.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// A probability vector over the symbols `0..len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    /// Validates an already-normalized probability vector.
    ///
    /// Vectors that do not sum to 1 within [`SUM_TOLERANCE`] are rejected,
    /// never renormalized. Use [`make_distribution`] to normalize weights.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_entries(&probs)?;
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(invalid(format!("probabilities sum to {sum}, expected 1")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(alphabet_size: usize) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(invalid("alphabet must have at least one symbol"));
        }
        Ok(Self {
            probs: vec![1.0 / alphabet_size as f64; alphabet_size],
        })
    }

    /// Internal constructor for vectors normalized by construction.
    pub(crate) fn from_normalized(probs: Vec<f64>) -> Self {
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }

    /// Entropy in bits, with `0 log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        entropy(self)
    }

    /// Entropy in nats.
    pub fn entropy_nats(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }

    pub(crate) fn ensure_same_alphabet(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::AlphabetMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }
}

fn check_entries(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(invalid("alphabet must have at least one symbol"));
    }
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
        return Err(invalid(format!("entry {i} is {v}; must be finite and >= 0")));
    }
    Ok(())
}

/// Normalizes nonnegative weights into a distribution.
pub fn make_distribution(weights: &[f64]) -> Result<DiscreteDistribution> {
    check_entries(weights)?;
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(invalid("weights must contain a strictly positive entry"));
    }
    Ok(DiscreteDistribution {
        probs: weights.iter().map(|w| w / total).collect(),
    })
}

/// `H(p) = -sum p(a) log2 p(a)`.
pub fn entropy(p: &DiscreteDistribution) -> f64 {
    -p.probs.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

/// Relative entropy `D(p || q)` in bits.
///
/// Returns `f64::INFINITY` when `p` puts mass where `q` has none.
pub fn kl_divergence(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    p.ensure_same_alphabet(q)?;
    Ok(kl_bits(p.probs(), q.probs()))
}

/// Unchecked KL sum over equal-length slices.
pub(crate) fn kl_bits(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&pa, &qa) in p.iter().zip(q) {
        if pa == 0.0 {
            continue;
        }
        if qa == 0.0 {
            return f64::INFINITY;
        }
        acc += pa * (pa / qa).log2();
    }
    // rounding can push an exact zero slightly negative
    acc.max(0.0)
}

/// The geometric path `P_lambda ∝ p1^lambda * p2^(1-lambda)` between two
/// hypotheses. `lambda = 1` is `p1`, `lambda = 0` is `p2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedFamily {
    p1: DiscreteDistribution,
    p2: DiscreteDistribution,
}

impl TiltedFamily {
    pub fn new(p1: DiscreteDistribution, p2: DiscreteDistribution) -> Result<Self> {
        p1.ensure_same_alphabet(&p2)?;
        Ok(Self { p1, p2 })
    }

    pub fn p1(&self) -> &DiscreteDistribution {
        &self.p1
    }

    pub fn p2(&self) -> &DiscreteDistribution {
        &self.p2
    }

    /// Member of the family at `lambda`.
    ///
    /// Symbols where both endpoints vanish get zero mass and drop out of
    /// the normalizer.
    pub fn tilted(&self, lambda: f64) -> Result<DiscreteDistribution> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(invalid(format!("lambda = {lambda} outside [0, 1]")));
        }
        let weights: Vec<f64> = self
            .p1
            .probs()
            .iter()
            .zip(self.p2.probs())
            .map(|(&a, &b)| {
                if a == 0.0 && b == 0.0 {
                    0.0
                } else {
                    // powf(0, 0) == 1, so the endpoints reproduce p1 and p2
                    a.powf(lambda) * b.powf(1.0 - lambda)
                }
            })
            .collect();
        let z: f64 = weights.iter().sum();
        if z.is_nan() || z <= 0.0 {
            return Err(Error::DegenerateSupport(format!(
                "tilted normalizer is zero at lambda = {lambda}"
            )));
        }
        Ok(DiscreteDistribution::from_normalized(
            weights.into_iter().map(|w| w / z).collect(),
        ))
    }
}

/// Free-function form of [`TiltedFamily::tilted`].
pub fn tilted(family: &TiltedFamily, lambda: f64) -> Result<DiscreteDistribution> {
    family.tilted(lambda)
}
