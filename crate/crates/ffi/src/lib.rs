//! C ABI over `infobounds`.
//!
//! Every fallible function returns an [`IbStatus`] and writes its result
//! through an out pointer, which is left untouched on failure. The message
//! for the most recent failure on the calling thread is available from
//! [`ib_last_error_message`]. Distributions cross the boundary as opaque
//! [`IbDistribution`] handles owned by the caller and released with
//! [`ib_distribution_free`]. Panics never unwind into C; they surface as
//! [`IbStatus::Panic`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use infobounds::boltzmann::{boltzmann_distribution, solve_beta, EnergySystem};
use infobounds::detection::{q_function, simulate_detection, DetectionScenario};
use infobounds::hypothesis::{chernoff_lambda_star, neyman_pearson, stein_errors, BinaryHypothesis};
use infobounds::types::{count_types, sanov_sandwich, ConstraintSet};
use infobounds::{kl_divergence, make_distribution, tilted, DiscreteDistribution, Error, TiltedFamily};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IbStatus {
    Ok = 0,
    NullPointer = 1,
    /// Invalid input, mismatched alphabets or a degenerate hypothesis.
    Invalid = 2,
    /// A constraint has no solution.
    Infeasible = 3,
    /// Enumeration cap or integer range exceeded.
    Resource = 4,
    Numerical = 5,
    Panic = 6,
}

impl From<&Error> for IbStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Validation(_)
            | Error::AlphabetMismatch { .. }
            | Error::DegenerateSupport(_)
            | Error::DegenerateHypothesis(_) => IbStatus::Invalid,
            Error::Infeasible(_) => IbStatus::Infeasible,
            Error::Overflow(_) | Error::ResourceCap { .. } => IbStatus::Resource,
            Error::Numerical(_) => IbStatus::Numerical,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IbConstraintMode {
    AtLeast = 0,
    AtMost = 1,
}

/// Opaque probability distribution.
pub struct IbDistribution(DiscreteDistribution);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct IbChernoff {
    pub lambda_star: f64,
    /// Bits.
    pub c_info: f64,
    pub d1: f64,
    pub d2: f64,
    pub iterations: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct IbStein {
    pub alpha_n: f64,
    pub log2_beta_n: f64,
    /// `-(1/n) log2 beta_n`, bits.
    pub exponent: f64,
    pub divergence: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct IbSanov {
    /// Bits.
    pub d_star: f64,
    pub log2_prob: f64,
    pub log2_lower: f64,
    pub log2_upper: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> IbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IbStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            IbStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(e.to_string());
            IbStatus::from(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            IbStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn handle<'a>(p: *const IbDistribution, what: &'static str) -> Result<&'a DiscreteDistribution, Fail> {
    p.as_ref().map(|d| &d.0).ok_or(Fail::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

fn boxed(d: DiscreteDistribution) -> *mut IbDistribution {
    Box::into_raw(Box::new(IbDistribution(d)))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ib_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Normalizes `len` nonnegative weights into a new distribution.
#[no_mangle]
pub unsafe extern "C" fn ib_distribution_new(
    weights: *const f64,
    len: usize,
    out_dist: *mut *mut IbDistribution,
) -> IbStatus {
    guard(|| {
        let w = slice(weights, len, "weights")?;
        let o = out(out_dist, "out_dist")?;
        *o = boxed(make_distribution(w)?);
        Ok(())
    })
}

/// Releases a handle; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn ib_distribution_free(dist: *mut IbDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// Alphabet size; 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn ib_distribution_len(dist: *const IbDistribution) -> usize {
    dist.as_ref().map_or(0, |d| d.0.len())
}

/// Copies the probabilities into `out_probs`, which must hold `len` entries.
#[no_mangle]
pub unsafe extern "C" fn ib_distribution_probs(
    dist: *const IbDistribution,
    out_probs: *mut f64,
    len: usize,
) -> IbStatus {
    guard(|| {
        let d = handle(dist, "dist")?;
        if out_probs.is_null() {
            return Err(Fail::Null("out_probs"));
        }
        if len != d.len() {
            return Err(Error::AlphabetMismatch {
                left: d.len(),
                right: len,
            }
            .into());
        }
        std::slice::from_raw_parts_mut(out_probs, len).copy_from_slice(d.probs());
        Ok(())
    })
}

/// Shannon entropy in bits.
#[no_mangle]
pub unsafe extern "C" fn ib_entropy(dist: *const IbDistribution, out_bits: *mut f64) -> IbStatus {
    guard(|| {
        let d = handle(dist, "dist")?;
        *out(out_bits, "out_bits")? = d.entropy();
        Ok(())
    })
}

/// `D(p || q)` in bits; `INFINITY` when `p` is not absolutely continuous
/// with respect to `q`.
#[no_mangle]
pub unsafe extern "C" fn ib_kl_divergence(
    p: *const IbDistribution,
    q: *const IbDistribution,
    out_bits: *mut f64,
) -> IbStatus {
    guard(|| {
        let (p, q) = (handle(p, "p")?, handle(q, "q")?);
        *out(out_bits, "out_bits")? = kl_divergence(p, q)?;
        Ok(())
    })
}

/// Member `p1^lambda p2^(1-lambda) / Z` of the tilted family.
#[no_mangle]
pub unsafe extern "C" fn ib_tilted(
    p1: *const IbDistribution,
    p2: *const IbDistribution,
    lambda: f64,
    out_dist: *mut *mut IbDistribution,
) -> IbStatus {
    guard(|| {
        let family = TiltedFamily::new(handle(p1, "p1")?.clone(), handle(p2, "p2")?.clone())?;
        let o = out(out_dist, "out_dist")?;
        *o = boxed(tilted(&family, lambda)?);
        Ok(())
    })
}

unsafe fn hypothesis(p1: *const IbDistribution, p2: *const IbDistribution) -> Result<BinaryHypothesis, Fail> {
    Ok(BinaryHypothesis::new(
        handle(p1, "p1")?.clone(),
        handle(p2, "p2")?.clone(),
    )?)
}

/// Chernoff information and the equalizing tilt.
#[no_mangle]
pub unsafe extern "C" fn ib_chernoff(
    p1: *const IbDistribution,
    p2: *const IbDistribution,
    tol: f64,
    out_report: *mut IbChernoff,
) -> IbStatus {
    guard(|| {
        let r = chernoff_lambda_star(&hypothesis(p1, p2)?, tol)?;
        *out(out_report, "out_report")? = IbChernoff {
            lambda_star: r.lambda_star,
            c_info: r.c_info,
            d1: r.d1,
            d2: r.d2,
            iterations: r.iterations as u64,
        };
        Ok(())
    })
}

/// `log2` of the minimal type-II error at type-I level `epsilon`.
#[no_mangle]
pub unsafe extern "C" fn ib_neyman_pearson_log2_beta(
    p1: *const IbDistribution,
    p2: *const IbDistribution,
    n: u64,
    epsilon: f64,
    out_log2_beta: *mut f64,
) -> IbStatus {
    guard(|| {
        let r = neyman_pearson(&hypothesis(p1, p2)?, n, epsilon)?;
        *out(out_log2_beta, "out_log2_beta")? = r.log2_beta;
        Ok(())
    })
}

/// Exact errors of the Stein acceptance region with band half-width `delta`.
#[no_mangle]
pub unsafe extern "C" fn ib_stein(
    p1: *const IbDistribution,
    p2: *const IbDistribution,
    n: u64,
    delta: f64,
    out_report: *mut IbStein,
) -> IbStatus {
    guard(|| {
        let r = stein_errors(&hypothesis(p1, p2)?, n, delta)?;
        *out(out_report, "out_report")? = IbStein {
            alpha_n: r.alpha_n,
            log2_beta_n: r.log2_beta_n,
            exponent: r.exponent,
            divergence: r.divergence,
        };
        Ok(())
    })
}

/// Exact probability that the empirical frequency of `symbol` is at least
/// (or at most) `threshold`, with its type-counting bracket.
#[no_mangle]
pub unsafe extern "C" fn ib_sanov(
    p: *const IbDistribution,
    mode: IbConstraintMode,
    symbol: usize,
    threshold: f64,
    n: u64,
    out_report: *mut IbSanov,
) -> IbStatus {
    guard(|| {
        let p = handle(p, "p")?;
        let pi = match mode {
            IbConstraintMode::AtLeast => ConstraintSet::at_least(symbol, threshold)?,
            IbConstraintMode::AtMost => ConstraintSet::at_most(symbol, threshold)?,
        };
        let s = sanov_sandwich(&pi, p, n)?;
        *out(out_report, "out_report")? = IbSanov {
            d_star: s.d_star,
            log2_prob: s.log2_prob,
            log2_lower: s.log2_lower,
            log2_upper: s.log2_upper,
        };
        Ok(())
    })
}

/// Number of n-types over `k` symbols.
#[no_mangle]
pub unsafe extern "C" fn ib_count_types(n: u64, k: usize, out_count: *mut u64) -> IbStatus {
    guard(|| {
        *out(out_count, "out_count")? = count_types(n, k)?;
        Ok(())
    })
}

/// Standard normal tail `P(Z > x)`.
#[no_mangle]
pub extern "C" fn ib_q_function(x: f64) -> f64 {
    q_function(x)
}

/// Boltzmann probabilities for `len` levels at inverse temperature `beta`,
/// written to `out_probs` (`len` entries).
#[no_mangle]
pub unsafe extern "C" fn ib_boltzmann(levels: *const f64, len: usize, beta: f64, out_probs: *mut f64) -> IbStatus {
    guard(|| {
        let levels = slice(levels, len, "levels")?;
        if out_probs.is_null() {
            return Err(Fail::Null("out_probs"));
        }
        let p = boltzmann_distribution(&EnergySystem::new(levels.to_vec(), beta)?);
        std::slice::from_raw_parts_mut(out_probs, len).copy_from_slice(p.probs());
        Ok(())
    })
}

/// Inverse temperature reproducing `target_mean`.
#[no_mangle]
pub unsafe extern "C" fn ib_solve_beta(
    levels: *const f64,
    len: usize,
    target_mean: f64,
    tol: f64,
    out_beta: *mut f64,
) -> IbStatus {
    guard(|| {
        let levels = slice(levels, len, "levels")?;
        *out(out_beta, "out_beta")? = solve_beta(levels, target_mean, tol)?;
        Ok(())
    })
}

/// Monte Carlo error rate of the minimum-distance detector.
#[no_mangle]
pub unsafe extern "C" fn ib_simulate_detection(
    dim: u64,
    amplitude: f64,
    trials: u64,
    seed: u64,
    out_rate: *mut f64,
) -> IbStatus {
    guard(|| {
        let s = DetectionScenario::new(dim, amplitude, trials, seed)?;
        *out(out_rate, "out_rate")? = simulate_detection(&s);
        Ok(())
    })
}
