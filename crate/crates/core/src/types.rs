//! The method of types.
//!
//! A sequence of length `n` over an alphabet of size `k` is summarized by its
//! type: the count of each symbol. All sequences in a type class are
//! equiprobable under any i.i.d. source, so probabilities of events that
//! depend only on the type reduce to sums over the `C(n+k-1, k-1)` types
//! instead of the `k^n` sequences. Everything here returns log2 values where
//! the underlying quantities can underflow.

use crate::combinatorics::{log_binomial, log_multinomial, multinomial_exact};
use crate::dist::{kl_bits, DiscreteDistribution, NATS_PER_BIT};
use crate::error::{invalid, Error, Result};
use crate::logspace::Log2Sum;

/// Maximum number of types any enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Two divergences closer than this are a tie for the Sanov minimizer.
const TIE_TOLERANCE: f64 = 1e-14;

/// Symbol counts of a length-`n` sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EmpiricalType {
    counts: Vec<u64>,
    n: u64,
}

impl EmpiricalType {
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(invalid("type needs at least one symbol"));
        }
        let n = counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| Error::Overflow("type length".into()))?;
        if n == 0 {
            return Err(invalid("type must describe a nonempty sequence"));
        }
        Ok(Self { counts, n })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// The empirical distribution `counts / n`.
    pub fn to_distribution(&self) -> DiscreteDistribution {
        DiscreteDistribution::from_normalized(self.frequencies())
    }

    /// Entropy of the empirical distribution, bits.
    pub fn entropy(&self) -> f64 {
        entropy_of_counts(&self.counts, self.n)
    }

    fn ensure_alphabet(&self, q: &DiscreteDistribution) -> Result<()> {
        if self.alphabet_size() != q.len() {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet_size(),
                right: q.len(),
            });
        }
        Ok(())
    }
}

fn entropy_of_counts(counts: &[u64], n: u64) -> f64 {
    let n = n as f64;
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let f = c as f64 / n;
            f * f.log2()
        })
        .sum::<f64>()
}

/// Counts the symbols of `sequence`.
pub fn empirical_type(sequence: &[usize], alphabet_size: usize) -> Result<EmpiricalType> {
    if sequence.is_empty() {
        return Err(invalid("sequence is empty"));
    }
    let mut counts = vec![0u64; alphabet_size];
    for (i, &s) in sequence.iter().enumerate() {
        *counts.get_mut(s).ok_or_else(|| {
            invalid(format!(
                "symbol {s} at position {i} outside alphabet of size {alphabet_size}"
            ))
        })? += 1;
    }
    EmpiricalType::from_counts(counts)
}

/// Number of `n`-types over `alphabet_size` symbols, `C(n+k-1, k-1)`.
pub fn count_types(n: u64, alphabet_size: usize) -> Result<u64> {
    check_dims(n, alphabet_size)?;
    let k = alphabet_size as u64 - 1;
    let mut acc: u128 = 1;
    // acc == C(n + i, i) after step i
    for i in 1..=k as u128 {
        acc = acc
            .checked_mul(n as u128 + i)
            .ok_or_else(|| Error::Overflow(format!("count_types({n}, {alphabet_size})")))?
            / i;
        if acc > u64::MAX as u128 {
            return Err(Error::Overflow(format!("count_types({n}, {alphabet_size})")));
        }
    }
    Ok(acc as u64)
}

/// `log2 C(n+k-1, k-1)`; never overflows.
pub fn log2_count_types(n: u64, alphabet_size: usize) -> f64 {
    let k = alphabet_size as u64;
    log_binomial(n + k - 1, k - 1) / NATS_PER_BIT
}

fn check_dims(n: u64, alphabet_size: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("sequence length n must be >= 1"));
    }
    if alphabet_size == 0 {
        return Err(invalid("alphabet size must be >= 1"));
    }
    Ok(())
}

/// Fails with [`Error::ResourceCap`] when the type space is larger than `cap`.
pub fn check_enumeration(n: u64, alphabet_size: usize, cap: u64) -> Result<u64> {
    match count_types(n, alphabet_size) {
        Ok(count) if count <= cap => Ok(count),
        Ok(count) => Err(Error::ResourceCap {
            required: count as u128,
            cap,
        }),
        Err(Error::Overflow(_)) => Err(Error::ResourceCap {
            required: u128::MAX,
            cap,
        }),
        Err(e) => Err(e),
    }
}

/// Lazy lexicographic walk over all count vectors of length `k` summing to `n`.
///
/// Starts at `(0, .., 0, n)` and ends at `(n, 0, .., 0)`.
#[derive(Debug, Clone)]
pub struct TypeIter {
    current: Option<Vec<u64>>,
}

impl TypeIter {
    pub fn new(n: u64, alphabet_size: usize) -> Self {
        let current = (alphabet_size > 0).then(|| {
            let mut v = vec![0; alphabet_size];
            v[alphabet_size - 1] = n;
            v
        });
        Self { current }
    }

    fn advance(counts: &mut [u64]) -> bool {
        let k = counts.len();
        let mut tail = counts[k - 1];
        for j in (0..k - 1).rev() {
            if tail > 0 {
                counts[j] += 1;
                for c in &mut counts[j + 1..] {
                    *c = 0;
                }
                counts[k - 1] = tail - 1;
                return true;
            }
            tail += counts[j];
        }
        false
    }
}

impl Iterator for TypeIter {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        if Self::advance(&mut next) {
            self.current = Some(next);
        }
        Some(out)
    }
}

/// Checked, lazy walk over the n-types; the building block for every exact sum.
pub(crate) fn walk_types(n: u64, alphabet_size: usize, cap: u64) -> Result<TypeIter> {
    check_enumeration(n, alphabet_size, cap)?;
    Ok(TypeIter::new(n, alphabet_size))
}

/// All n-types in lexicographic order, subject to [`DEFAULT_ENUMERATION_CAP`].
pub fn enumerate_types(n: u64, alphabet_size: usize) -> Result<Vec<EmpiricalType>> {
    enumerate_types_capped(n, alphabet_size, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_types_capped(n: u64, alphabet_size: usize, cap: u64) -> Result<Vec<EmpiricalType>> {
    Ok(walk_types(n, alphabet_size, cap)?
        .map(|counts| EmpiricalType { counts, n })
        .collect())
}

/// Size of a type class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeClassSize {
    /// `log2 |T(P)|`.
    pub log2: f64,
    /// `|T(P)|` when it fits in `u128`.
    pub exact: Option<u128>,
}

pub fn type_class_size(t: &EmpiricalType) -> TypeClassSize {
    TypeClassSize {
        log2: log2_class_size(&t.counts),
        exact: multinomial_exact(&t.counts),
    }
}

fn log2_class_size(counts: &[u64]) -> f64 {
    log_multinomial(counts) / NATS_PER_BIT
}

/// `(nH(P) - log2 C(n+k-1, k-1), nH(P))`, bracketing `log2 |T(P)|`.
pub fn type_class_size_bounds(t: &EmpiricalType) -> (f64, f64) {
    let nh = t.n as f64 * t.entropy();
    (nh - log2_count_types(t.n, t.alphabet_size()), nh)
}

/// The looser bracket `(nH(P) - k log2(n+1), nH(P))`.
pub fn type_class_size_bounds_loose(t: &EmpiricalType) -> (f64, f64) {
    let nh = t.n as f64 * t.entropy();
    (nh - t.alphabet_size() as f64 * ((t.n + 1) as f64).log2(), nh)
}

/// `log2 Q^n(T(P))`.
///
/// Equals `log2|T(P)| - n (D(P||Q) + H(P))`; evaluated as
/// `log2|T(P)| + sum_a counts[a] log2 Q(a)`, which is `-inf` when the type
/// uses a symbol `Q` never emits.
pub fn type_class_log_prob(t: &EmpiricalType, q: &DiscreteDistribution) -> Result<f64> {
    t.ensure_alphabet(q)?;
    Ok(log2_class_prob(&t.counts, q.probs()))
}

fn log2_class_prob(counts: &[u64], q: &[f64]) -> f64 {
    let mut acc = log2_class_size(counts);
    for (&c, &qa) in counts.iter().zip(q) {
        if c == 0 {
            continue;
        }
        if qa == 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += c as f64 * qa.log2();
    }
    acc
}

/// `(-nD(P||Q) - log2 C(n+k-1, k-1), -nD(P||Q))`, bracketing `log2 Q^n(T(P))`.
pub fn type_class_prob_bounds(t: &EmpiricalType, q: &DiscreteDistribution) -> Result<(f64, f64)> {
    t.ensure_alphabet(q)?;
    let upper = -(t.n as f64) * kl_bits(&t.frequencies(), q.probs());
    Ok((upper - log2_count_types(t.n, t.alphabet_size()), upper))
}

/// `log2` of the right-hand side `C(n+k-1, k-1) 2^(-n delta)` of the
/// deviation bound.
pub fn deviation_bound_log2(n: u64, alphabet_size: usize, delta: f64) -> f64 {
    log2_count_types(n, alphabet_size) - n as f64 * delta
}

/// Exact `P(D(P_hat_n || p) >= delta)` for an i.i.d. sample of length `n`.
pub fn deviation_probability_exact(n: u64, p: &DiscreteDistribution, delta: f64) -> Result<f64> {
    Ok(deviation_log2_probability_exact(n, p, delta)?.exp2())
}

pub fn deviation_log2_probability_exact(n: u64, p: &DiscreteDistribution, delta: f64) -> Result<f64> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(invalid(format!("delta = {delta}; must be > 0")));
    }
    let mut acc = Log2Sum::new();
    let n_f = n as f64;
    for counts in walk_types(n, p.len(), DEFAULT_ENUMERATION_CAP)? {
        let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / n_f).collect();
        if kl_bits(&freq, p.probs()) >= delta {
            acc.add(log2_class_prob(&counts, p.probs()));
        }
    }
    Ok(acc.value())
}

/// Direction of a single-symbol mass constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintMode {
    /// `Q(symbol) >= threshold`.
    AtLeast,
    /// `Q(symbol) <= threshold`.
    AtMost,
}

/// A closed half-space `{Q : Q(symbol) >= t}` or `{Q : Q(symbol) <= t}` of
/// the probability simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSet {
    mode: ConstraintMode,
    symbol: usize,
    threshold: f64,
}

impl ConstraintSet {
    pub fn new(mode: ConstraintMode, symbol: usize, threshold: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(invalid(format!("threshold {threshold} outside [0, 1]")));
        }
        Ok(Self {
            mode,
            symbol,
            threshold,
        })
    }

    pub fn at_least(symbol: usize, threshold: f64) -> Result<Self> {
        Self::new(ConstraintMode::AtLeast, symbol, threshold)
    }

    pub fn at_most(symbol: usize, threshold: f64) -> Result<Self> {
        Self::new(ConstraintMode::AtMost, symbol, threshold)
    }

    /// The whole simplex.
    pub fn everything() -> Self {
        Self {
            mode: ConstraintMode::AtLeast,
            symbol: 0,
            threshold: 0.0,
        }
    }

    pub fn mode(&self) -> ConstraintMode {
        self.mode
    }

    pub fn symbol(&self) -> usize {
        self.symbol
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn contains(&self, q: &[f64]) -> bool {
        let mass = q[self.symbol];
        match self.mode {
            ConstraintMode::AtLeast => mass >= self.threshold,
            ConstraintMode::AtMost => mass <= self.threshold,
        }
    }

    fn contains_counts(&self, counts: &[u64], n: u64) -> bool {
        // c / n rounds the same way as a threshold written as that fraction
        let mass = counts[self.symbol] as f64 / n as f64;
        match self.mode {
            ConstraintMode::AtLeast => mass >= self.threshold,
            ConstraintMode::AtMost => mass <= self.threshold,
        }
    }

    pub fn contains_type(&self, t: &EmpiricalType) -> bool {
        self.contains_counts(&t.counts, t.n)
    }

    fn check_alphabet(&self, alphabet_size: usize) -> Result<()> {
        if self.symbol >= alphabet_size {
            return Err(invalid(format!(
                "constraint symbol {} outside alphabet of size {alphabet_size}",
                self.symbol
            )));
        }
        Ok(())
    }
}

/// Minimum divergence over the n-types of a constraint set.
#[derive(Debug, Clone, PartialEq)]
pub struct SanovExponent {
    /// `min_{Q in Pi_n} D(Q || p)`, bits.
    pub d_star: f64,
    pub minimizer: EmpiricalType,
}

/// `D(Pi_n || p)` with its argmin; ties go to the lexicographically smallest
/// count vector.
pub fn sanov_exponent(pi: &ConstraintSet, p: &DiscreteDistribution, n: u64) -> Result<SanovExponent> {
    pi.check_alphabet(p.len())?;
    let n_f = n as f64;
    let mut best: Option<(f64, Vec<u64>)> = None;
    for counts in walk_types(n, p.len(), DEFAULT_ENUMERATION_CAP)? {
        if !pi.contains_counts(&counts, n) {
            continue;
        }
        let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / n_f).collect();
        let d = kl_bits(&freq, p.probs());
        match &best {
            Some((b, _)) if d >= b - TIE_TOLERANCE => {}
            _ => best = Some((d, counts)),
        }
    }
    let (d_star, counts) = best.ok_or_else(|| Error::Infeasible(format!("constraint set contains no {n}-type")))?;
    Ok(SanovExponent {
        d_star,
        minimizer: EmpiricalType { counts, n },
    })
}

/// Exact `P(P_hat_n in Pi)`.
pub fn sanov_exact_prob(pi: &ConstraintSet, p: &DiscreteDistribution, n: u64) -> Result<f64> {
    Ok(sanov_exact_log2_prob(pi, p, n)?.exp2())
}

/// Exact `log2 P(P_hat_n in Pi)`; `-inf` when no type qualifies.
pub fn sanov_exact_log2_prob(pi: &ConstraintSet, p: &DiscreteDistribution, n: u64) -> Result<f64> {
    pi.check_alphabet(p.len())?;
    let mut acc = Log2Sum::new();
    for counts in walk_types(n, p.len(), DEFAULT_ENUMERATION_CAP)? {
        if pi.contains_counts(&counts, n) {
            acc.add(log2_class_prob(&counts, p.probs()));
        }
    }
    Ok(acc.value())
}

/// Exact Sanov probability together with its two-sided type-counting bracket.
#[derive(Debug, Clone, PartialEq)]
pub struct SanovSandwich {
    pub n: u64,
    pub d_star: f64,
    pub minimizer: EmpiricalType,
    /// `log2 P(P_hat_n in Pi)`.
    pub log2_prob: f64,
    /// `-n D(Pi_n||p) - log2 C(n+k-1, k-1)`.
    pub log2_lower: f64,
    /// `-n D(Pi_n||p) + log2 C(n+k-1, k-1)`.
    pub log2_upper: f64,
}

impl SanovSandwich {
    /// `-(1/n) log2 P(P_hat_n in Pi)`.
    pub fn empirical_exponent(&self) -> f64 {
        -self.log2_prob / self.n as f64
    }

    pub fn holds(&self) -> bool {
        self.log2_lower <= self.log2_prob && self.log2_prob <= self.log2_upper
    }
}

pub fn sanov_sandwich(pi: &ConstraintSet, p: &DiscreteDistribution, n: u64) -> Result<SanovSandwich> {
    let SanovExponent { d_star, minimizer } = sanov_exponent(pi, p, n)?;
    let log2_prob = sanov_exact_log2_prob(pi, p, n)?;
    let centre = -(n as f64) * d_star;
    let slack = log2_count_types(n, p.len());
    Ok(SanovSandwich {
        n,
        d_star,
        minimizer,
        log2_prob,
        log2_lower: centre - slack,
        log2_upper: centre + slack,
    })
}
