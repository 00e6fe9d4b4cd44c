//! Binary hypothesis testing between two i.i.d. sources.
//!
//! Errors are computed exactly over types: the log-likelihood ratio of a
//! sequence depends only on its type, so every test considered here
//! (the two-sided Stein band, the Neyman-Pearson threshold test, the MAP
//! rule) accepts or rejects whole type classes.

use crate::dist::{kl_bits, DiscreteDistribution, TiltedFamily};
use crate::error::{invalid, Error, Result};
use crate::logspace::Log2Sum;
use crate::types::{walk_types, EmpiricalType, DEFAULT_ENUMERATION_CAP};

/// Default tolerance on `|D(P_l||p1) - D(P_l||p2)|` for the Chernoff search.
pub const DEFAULT_CHERNOFF_TOL: f64 = 1e-10;
const MAX_BISECTION_STEPS: usize = 200;

/// `H1: X ~ p1` against `H2: X ~ p2`, with prior weights for the Bayesian
/// error.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryHypothesis {
    p1: DiscreteDistribution,
    p2: DiscreteDistribution,
    priors: (f64, f64),
}

impl BinaryHypothesis {
    /// Equal priors.
    pub fn new(p1: DiscreteDistribution, p2: DiscreteDistribution) -> Result<Self> {
        Self::with_priors(p1, p2, (0.5, 0.5))
    }

    pub fn with_priors(p1: DiscreteDistribution, p2: DiscreteDistribution, priors: (f64, f64)) -> Result<Self> {
        p1.ensure_same_alphabet(&p2)?;
        if kl_bits(p1.probs(), p2.probs()).is_infinite() {
            return Err(invalid("D(p1 || p2) is infinite: p1 has mass where p2 has none"));
        }
        let (a, b) = priors;
        if !(a > 0.0 && b > 0.0) || ((a + b) - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("priors ({a}, {b}) must be positive and sum to 1")));
        }
        Ok(Self { p1, p2, priors })
    }

    pub fn p1(&self) -> &DiscreteDistribution {
        &self.p1
    }

    pub fn p2(&self) -> &DiscreteDistribution {
        &self.p2
    }

    pub fn priors(&self) -> (f64, f64) {
        self.priors
    }

    pub fn alphabet_size(&self) -> usize {
        self.p1.len()
    }

    /// `D(p1 || p2)`, bits. Finite by construction.
    pub fn divergence(&self) -> f64 {
        kl_bits(self.p1.probs(), self.p2.probs())
    }

    /// Per-symbol `log2 p1(a)/p2(a)`: `+inf` where only `p1` has mass, `-inf`
    /// where only `p2` has mass, NaN where neither does.
    fn symbol_llr(&self) -> Vec<f64> {
        self.p1
            .probs()
            .iter()
            .zip(self.p2.probs())
            .map(|(&a, &b)| match (a > 0.0, b > 0.0) {
                (true, true) => (a / b).log2(),
                (true, false) => f64::INFINITY,
                (false, true) => f64::NEG_INFINITY,
                (false, false) => f64::NAN,
            })
            .collect()
    }
}

/// Average log-likelihood ratio of a type; NaN when the type is impossible
/// under both hypotheses.
fn type_llr(counts: &[u64], n: u64, llr: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&c, &l) in counts.iter().zip(llr) {
        if c > 0 {
            acc += c as f64 * l;
        }
    }
    acc / n as f64
}

/// `log2 P^n(T)` for the type with the given counts.
fn log2_type_prob(counts: &[u64], log2_size: f64, p: &[f64]) -> f64 {
    let mut acc = log2_size;
    for (&c, &pa) in counts.iter().zip(p) {
        if c > 0 {
            if pa == 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += c as f64 * pa.log2();
        }
    }
    acc
}

fn log2_size(counts: &[u64]) -> f64 {
    crate::combinatorics::log_multinomial(counts) / crate::dist::NATS_PER_BIT
}

/// Per-type quantities shared by all exact error computations.
struct TypeRow {
    llr: f64,
    log2_p1: f64,
    log2_p2: f64,
}

fn type_rows(h: &BinaryHypothesis, n: u64) -> Result<impl Iterator<Item = TypeRow> + '_> {
    let llr = h.symbol_llr();
    Ok(
        walk_types(n, h.alphabet_size(), DEFAULT_ENUMERATION_CAP)?.map(move |counts| {
            let size = log2_size(&counts);
            TypeRow {
                llr: type_llr(&counts, n, &llr),
                log2_p1: log2_type_prob(&counts, size, h.p1.probs()),
                log2_p2: log2_type_prob(&counts, size, h.p2.probs()),
            }
        }),
    )
}

fn in_stein_band(avg_llr: f64, d: f64, delta: f64) -> bool {
    // infinite or undefined ratios sit outside the two-sided band
    avg_llr.is_finite() && (avg_llr - d).abs() <= delta
}

/// Whether sequences of type `t` fall in the acceptance region
/// `{x : 2^{n(D-delta)} <= p1(x)/p2(x) <= 2^{n(D+delta)}}`.
pub fn stein_region_membership(t: &EmpiricalType, h: &BinaryHypothesis, delta: f64) -> Result<bool> {
    check_delta(delta)?;
    if t.alphabet_size() != h.alphabet_size() {
        return Err(Error::AlphabetMismatch {
            left: t.alphabet_size(),
            right: h.alphabet_size(),
        });
    }
    let avg = type_llr(t.counts(), t.n(), &h.symbol_llr());
    Ok(in_stein_band(avg, h.divergence(), delta))
}

fn check_delta(delta: f64) -> Result<()> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(invalid(format!("delta = {delta}; must be > 0")));
    }
    Ok(())
}

/// Exact error probabilities of the Stein acceptance region at length `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteinReport {
    pub n: u64,
    pub delta: f64,
    /// `P1^n(A_n^c)`.
    pub alpha_n: f64,
    /// `P2^n(A_n)`.
    pub beta_n: f64,
    /// `log2 beta_n`, kept separately since `beta_n` underflows for large `n`.
    pub log2_beta_n: f64,
    /// `-(1/n) log2 beta_n`, bits.
    pub exponent: f64,
    /// `D(p1 || p2)`, bits.
    pub divergence: f64,
}

impl SteinReport {
    /// Interval that must contain [`exponent`](Self::exponent):
    /// `D -+ delta - log2(1 - alpha_n)/n`.
    pub fn exponent_window(&self) -> (f64, f64) {
        let shift = -(1.0 - self.alpha_n).log2() / self.n as f64;
        (
            self.divergence - self.delta + shift,
            self.divergence + self.delta + shift,
        )
    }
}

pub fn stein_errors(h: &BinaryHypothesis, n: u64, delta: f64) -> Result<SteinReport> {
    check_delta(delta)?;
    let d = h.divergence();
    let mut miss = Log2Sum::new();
    let mut hit = Log2Sum::new();
    for row in type_rows(h, n)? {
        if in_stein_band(row.llr, d, delta) {
            hit.add(row.log2_p2);
        } else {
            miss.add(row.log2_p1);
        }
    }
    let log2_beta_n = hit.value();
    Ok(SteinReport {
        n,
        delta,
        alpha_n: miss.value().exp2().min(1.0),
        beta_n: log2_beta_n.exp2().min(1.0),
        log2_beta_n,
        exponent: -log2_beta_n / n as f64,
        divergence: d,
    })
}

/// Optimal randomized test with type-I error at most `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeymanPearsonReport {
    pub n: u64,
    pub epsilon: f64,
    /// Minimal `beta_n`.
    pub beta: f64,
    pub log2_beta: f64,
    /// Average log-likelihood ratio of the boundary type class.
    pub threshold_llr: f64,
    /// Probability of accepting H1 on the boundary class.
    pub boundary_weight: f64,
}

impl NeymanPearsonReport {
    /// `-(1/n) log2 beta`, bits.
    pub fn exponent(&self) -> f64 {
        -self.log2_beta / self.n as f64
    }
}

/// Minimal `beta_n` over all randomized tests with `alpha_n <= epsilon`.
pub fn neyman_pearson_min_beta(h: &BinaryHypothesis, n: u64, epsilon: f64) -> Result<f64> {
    Ok(neyman_pearson(h, n, epsilon)?.beta)
}

/// Admits type classes into the H1 region in decreasing likelihood-ratio
/// order until they carry `1 - epsilon` of the `p1` mass, randomizing on the
/// class that crosses the line.
pub fn neyman_pearson(h: &BinaryHypothesis, n: u64, epsilon: f64) -> Result<NeymanPearsonReport> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(invalid(format!("epsilon = {epsilon}; must lie in (0, 1/2)")));
    }
    let mut rows: Vec<TypeRow> = type_rows(h, n)?.filter(|r| r.log2_p1 > f64::NEG_INFINITY).collect();
    // +inf ratios first; NaN cannot survive the filter above
    rows.sort_by(|a, b| b.llr.total_cmp(&a.llr));

    let need = 1.0 - epsilon;
    let mut accepted = 0.0;
    let mut beta = Log2Sum::new();
    let mut boundary = (f64::NEG_INFINITY, 0.0);
    for row in &rows {
        let mass = row.log2_p1.exp2();
        if accepted + mass >= need {
            let weight = ((need - accepted) / mass).clamp(0.0, 1.0);
            if weight > 0.0 {
                beta.add(row.log2_p2 + weight.log2());
            }
            boundary = (row.llr, weight);
            break;
        }
        accepted += mass;
        beta.add(row.log2_p2);
        boundary = (row.llr, 1.0);
    }
    let log2_beta = beta.value();
    Ok(NeymanPearsonReport {
        n,
        epsilon,
        beta: log2_beta.exp2(),
        log2_beta,
        threshold_llr: boundary.0,
        boundary_weight: boundary.1,
    })
}

/// Exact minimal Bayesian error `sum_T min(pi1 P1^n(T), pi2 P2^n(T))`, as
/// `log2`.
pub fn bayes_error_log2_exact(h: &BinaryHypothesis, n: u64) -> Result<f64> {
    let (l1, l2) = (h.priors.0.log2(), h.priors.1.log2());
    Ok(type_rows(h, n)?
        .map(|r| (l1 + r.log2_p1).min(l2 + r.log2_p2))
        .collect::<Log2Sum>()
        .value())
}

/// The equalizing member of the tilted family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffReport {
    pub lambda_star: f64,
    /// Chernoff information `C(p1, p2)`, bits; reported as `d1`.
    pub c_info: f64,
    /// `D(P_lambda* || p1)`.
    pub d1: f64,
    /// `D(P_lambda* || p2)`.
    pub d2: f64,
    pub iterations: usize,
}

/// Bisection on `g(l) = D(P_l||p1) - D(P_l||p2)` over `l` in `[0, 1]`.
///
/// `g(0) = D(p2||p1) > 0` and `g(1) = -D(p1||p2) < 0` whenever `p1 != p2`,
/// so the bracket is always valid; the search stops once `|g| <= tol`.
pub fn chernoff_lambda_star(h: &BinaryHypothesis, tol: f64) -> Result<ChernoffReport> {
    chernoff_information(h.p1(), h.p2(), tol)
}

/// [`chernoff_lambda_star`] on a bare pair of distributions.
pub fn chernoff_information(p1: &DiscreteDistribution, p2: &DiscreteDistribution, tol: f64) -> Result<ChernoffReport> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(invalid(format!("tolerance {tol} must be > 0")));
    }
    let family = TiltedFamily::new(p1.clone(), p2.clone())?;
    if p1 == p2 {
        return Err(Error::DegenerateHypothesis("p1 and p2 are identical".into()));
    }
    let gap = |lambda: f64| -> Result<(f64, f64)> {
        let t = family.tilted(lambda)?;
        Ok((kl_bits(t.probs(), p1.probs()), kl_bits(t.probs(), p2.probs())))
    };

    let (a, b) = gap(0.0)?;
    let (c, d) = gap(1.0)?;
    if !(a - b > 0.0 && c - d < 0.0) {
        return Err(Error::Numerical(format!(
            "no sign change in D(P_l||p1) - D(P_l||p2): g(0) = {}, g(1) = {}",
            a - b,
            c - d
        )));
    }

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for step in 1..=MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let (d1, d2) = gap(mid)?;
        let g = d1 - d2;
        if g.abs() <= tol {
            return Ok(ChernoffReport {
                lambda_star: mid,
                c_info: d1,
                d1,
                d2,
                iterations: step,
            });
        }
        if mid <= lo || mid >= hi {
            return Err(Error::Numerical(format!(
                "bracket collapsed at lambda = {mid} with |g| = {} > {tol}",
                g.abs()
            )));
        }
        if g > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Numerical(format!(
        "bisection did not reach |g| <= {tol} in {MAX_BISECTION_STEPS} steps"
    )))
}

/// Best achievable exponent of the Bayesian error `pi1 alpha_n + pi2 beta_n`.
///
/// The exponent is the Chernoff information and does not depend on the
/// (positive) priors or on `n`; `n` only has to be a valid length.
pub fn bayesian_error_exponent(h: &BinaryHypothesis, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n must be >= 1"));
    }
    Ok(chernoff_lambda_star(h, DEFAULT_CHERNOFF_TOL)?.c_info)
}
