//! Command-line front end. Every subcommand prints one CSV table.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), so parsing a
//! field gives back the exact `f64`. Non-finite values appear only where a
//! subcommand's help says so.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::boltzmann::{boltzmann_distribution, solve_beta, EnergySystem};
use crate::detection::sweep;
use crate::dist::{entropy, kl_divergence, make_distribution, DiscreteDistribution};
use crate::error::{invalid, Result};
use crate::hypothesis::{chernoff_lambda_star, neyman_pearson, stein_errors, BinaryHypothesis};
use crate::types::{
    check_enumeration, sanov_sandwich, type_class_size, type_class_size_bounds, ConstraintSet, EmpiricalType, TypeIter,
    DEFAULT_ENUMERATION_CAP,
};

#[derive(Debug, Parser)]
#[command(
    name = "infobounds",
    version,
    about = "Error exponents, types and maximum-entropy experiments as CSV"
)]
pub struct Cli {
    /// Seed for stochastic subcommands; accepted and ignored by the others.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the CSV here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropies and relative entropy of two distributions, in bits.
    ///
    /// Columns: h_p_bits,h_q_bits,kl_bits. kl_bits is the token `inf` when
    /// p puts mass where q has none.
    Kl(KlArgs),
    /// Every n-type over a k-letter alphabet with its type-class size, in bits.
    ///
    /// Columns: c0..c{k-1},log2_class_size,log2_lower,log2_upper. The bounds
    /// are nH(P) - log2 C(n+k-1,k-1) and nH(P).
    Types(TypesArgs),
    /// Exact large-deviation probability of a one-symbol frequency constraint, in bits.
    ///
    /// Columns: n,d_star_bits,log2_prob,exponent_bits,log2_lower,log2_upper.
    /// log2_prob is `-inf` when every qualifying type is impossible under p.
    Sanov(SanovArgs),
    /// Exact Stein-region and Neyman-Pearson errors per sample size, in bits.
    ///
    /// Columns: n,delta,alpha_n,log2_beta_n,stein_exponent_bits,window_lo_bits,
    /// window_hi_bits,epsilon,np_log2_beta,np_exponent_bits,divergence_bits.
    Stein(SteinArgs),
    /// Chernoff information by bisection on the tilted family, in bits.
    ///
    /// Columns: lambda_star,c_info_bits,d1_bits,d2_bits,iterations.
    Chernoff(ChernoffArgs),
    /// Boltzmann distribution over energy levels; beta in inverse energy units, logs natural.
    ///
    /// Columns: level,energy,prob,beta. `level` is the zero-based index.
    Boltzmann(BoltzmannArgs),
    /// Monte Carlo binary detection in unit Gaussian noise against the analytic error.
    ///
    /// Columns: dim,amplitude,analytic_pe,chernoff_bound,empirical_pe,trials.
    /// Probabilities are plain (not logarithmic).
    Detect(DetectArgs),
}

#[derive(Debug, Args)]
pub struct KlArgs {
    /// First distribution, comma-separated nonnegative weights (normalized).
    #[arg(long)]
    pub p: String,
    /// Second distribution, same alphabet.
    #[arg(long)]
    pub q: String,
}

#[derive(Debug, Args)]
pub struct TypesArgs {
    /// Sequence length.
    #[arg(long)]
    pub n: u64,
    /// Alphabet size.
    #[arg(long)]
    pub k: usize,
    /// Refuse to enumerate more types than this.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mode {
    AtLeast,
    AtMost,
}

#[derive(Debug, Args)]
pub struct SanovArgs {
    /// Source distribution, comma-separated weights (normalized).
    #[arg(long)]
    pub p: String,
    /// Zero-based symbol whose frequency is constrained.
    #[arg(long)]
    pub symbol: usize,
    /// Frequency threshold in [0, 1].
    #[arg(long)]
    pub threshold: f64,
    /// Direction of the constraint.
    #[arg(long, value_enum, default_value = "at-least")]
    pub mode: Mode,
    /// Sample sizes, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
}

#[derive(Debug, Args)]
pub struct SteinArgs {
    /// Distribution under H1 (normalized).
    #[arg(long)]
    pub p1: String,
    /// Distribution under H2 (normalized).
    #[arg(long)]
    pub p2: String,
    /// Sample sizes, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    /// Half-width of the Stein band on the average log-likelihood ratio, bits.
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Type-I error budget for the Neyman-Pearson test, in (0, 0.5).
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct ChernoffArgs {
    /// Distribution under H1 (normalized).
    #[arg(long)]
    pub p1: String,
    /// Distribution under H2 (normalized).
    #[arg(long)]
    pub p2: String,
    /// Stop once |D(P_l||p1) - D(P_l||p2)| is below this, bits.
    #[arg(long, default_value_t = crate::hypothesis::DEFAULT_CHERNOFF_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("temperature").required(true).args(["beta", "mean_energy"]))]
pub struct BoltzmannArgs {
    /// Energy levels, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub levels: Vec<f64>,
    /// Inverse temperature 1/(k_B T), inverse energy units.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Solve for beta so the mean energy equals this value.
    #[arg(long, allow_hyphen_values = true)]
    pub mean_energy: Option<f64>,
    /// Tolerance on the mean energy when solving for beta, energy units.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Noise-vector lengths N, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<u64>,
    /// Per-component signal amplitudes m, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub amplitudes: Vec<f64>,
    /// Monte Carlo trials per (N, m) cell.
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
}

/// Header plus rows, already formatted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// 17 significant digits; `inf`, `-inf` and `NaN` pass through.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Comma-separated nonnegative weights, normalized to a distribution.
pub fn parse_distribution(text: &str) -> Result<DiscreteDistribution> {
    let weights = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .map_err(|_| invalid(format!("cannot parse {s:?} as a number")))
        })
        .collect::<Result<Vec<f64>>>()?;
    make_distribution(&weights)
}

pub fn run(cli: &Cli) -> Result<Table> {
    match &cli.command {
        Command::Kl(a) => run_kl(a),
        Command::Types(a) => run_types(a),
        Command::Sanov(a) => run_sanov(a),
        Command::Stein(a) => run_stein(a),
        Command::Chernoff(a) => run_chernoff(a),
        Command::Boltzmann(a) => run_boltzmann(a),
        Command::Detect(a) => run_detect(a, cli.seed),
    }
}

fn run_kl(a: &KlArgs) -> Result<Table> {
    let (p, q) = (parse_distribution(&a.p)?, parse_distribution(&a.q)?);
    let kl = kl_divergence(&p, &q)?;
    let mut t = Table::new(["h_p_bits", "h_q_bits", "kl_bits"]);
    t.rows
        .push(vec![fmt_real(entropy(&p)), fmt_real(entropy(&q)), fmt_real(kl)]);
    Ok(t)
}

fn run_types(a: &TypesArgs) -> Result<Table> {
    if a.k == 0 {
        return Err(invalid("alphabet size must be >= 1"));
    }
    check_enumeration(a.n, a.k, a.cap)?;
    let mut header: Vec<String> = (0..a.k).map(|i| format!("c{i}")).collect();
    header.extend(["log2_class_size", "log2_lower", "log2_upper"].map(String::from));
    let mut t = Table::new(header);
    for counts in TypeIter::new(a.n, a.k) {
        let ty = EmpiricalType::from_counts(counts)?;
        let (lo, hi) = type_class_size_bounds(&ty);
        let mut row: Vec<String> = ty.counts().iter().map(u64::to_string).collect();
        row.extend([fmt_real(type_class_size(&ty).log2), fmt_real(lo), fmt_real(hi)]);
        t.rows.push(row);
    }
    Ok(t)
}

fn run_sanov(a: &SanovArgs) -> Result<Table> {
    let p = parse_distribution(&a.p)?;
    let pi = match a.mode {
        Mode::AtLeast => ConstraintSet::at_least(a.symbol, a.threshold)?,
        Mode::AtMost => ConstraintSet::at_most(a.symbol, a.threshold)?,
    };
    let mut t = Table::new([
        "n",
        "d_star_bits",
        "log2_prob",
        "exponent_bits",
        "log2_lower",
        "log2_upper",
    ]);
    for &n in &a.n {
        if n == 0 {
            return Err(invalid("sample sizes must be >= 1"));
        }
        let s = sanov_sandwich(&pi, &p, n)?;
        t.rows.push(vec![
            n.to_string(),
            fmt_real(s.d_star),
            fmt_real(s.log2_prob),
            fmt_real(s.empirical_exponent()),
            fmt_real(s.log2_lower),
            fmt_real(s.log2_upper),
        ]);
    }
    Ok(t)
}

fn hypothesis(p1: &str, p2: &str) -> Result<BinaryHypothesis> {
    BinaryHypothesis::new(parse_distribution(p1)?, parse_distribution(p2)?)
}

fn run_stein(a: &SteinArgs) -> Result<Table> {
    let h = hypothesis(&a.p1, &a.p2)?;
    let mut t = Table::new([
        "n",
        "delta",
        "alpha_n",
        "log2_beta_n",
        "stein_exponent_bits",
        "window_lo_bits",
        "window_hi_bits",
        "epsilon",
        "np_log2_beta",
        "np_exponent_bits",
        "divergence_bits",
    ]);
    for &n in &a.n {
        if n == 0 {
            return Err(invalid("sample sizes must be >= 1"));
        }
        let s = stein_errors(&h, n, a.delta)?;
        let np = neyman_pearson(&h, n, a.epsilon)?;
        let (lo, hi) = s.exponent_window();
        t.rows.push(vec![
            n.to_string(),
            fmt_real(a.delta),
            fmt_real(s.alpha_n),
            fmt_real(s.log2_beta_n),
            fmt_real(s.exponent),
            fmt_real(lo),
            fmt_real(hi),
            fmt_real(a.epsilon),
            fmt_real(np.log2_beta),
            fmt_real(np.exponent()),
            fmt_real(s.divergence),
        ]);
    }
    Ok(t)
}

fn run_chernoff(a: &ChernoffArgs) -> Result<Table> {
    let r = chernoff_lambda_star(&hypothesis(&a.p1, &a.p2)?, a.tol)?;
    let mut t = Table::new(["lambda_star", "c_info_bits", "d1_bits", "d2_bits", "iterations"]);
    t.rows.push(vec![
        fmt_real(r.lambda_star),
        fmt_real(r.c_info),
        fmt_real(r.d1),
        fmt_real(r.d2),
        r.iterations.to_string(),
    ]);
    Ok(t)
}

fn run_boltzmann(a: &BoltzmannArgs) -> Result<Table> {
    let beta = match (a.beta, a.mean_energy) {
        (Some(b), None) => b,
        (None, Some(e)) => solve_beta(&a.levels, e, a.tol)?,
        _ => return Err(invalid("give exactly one of --beta and --mean-energy")),
    };
    let sys = EnergySystem::new(a.levels.clone(), beta)?;
    let p = boltzmann_distribution(&sys);
    let mut t = Table::new(["level", "energy", "prob", "beta"]);
    for (i, (&e, &pi)) in a.levels.iter().zip(p.probs()).enumerate() {
        t.rows
            .push(vec![i.to_string(), fmt_real(e), fmt_real(pi), fmt_real(beta)]);
    }
    Ok(t)
}

fn run_detect(a: &DetectArgs, seed: u64) -> Result<Table> {
    let rows = sweep(&a.dims, &a.amplitudes, a.trials, seed)?;
    let mut t = Table::new([
        "dim",
        "amplitude",
        "analytic_pe",
        "chernoff_bound",
        "empirical_pe",
        "trials",
    ]);
    for r in rows {
        t.rows.push(vec![
            r.dim.to_string(),
            fmt_real(r.amplitude),
            fmt_real(r.analytic_pe),
            fmt_real(r.chernoff_bound),
            fmt_real(r.empirical_pe),
            r.trials.to_string(),
        ]);
    }
    Ok(t)
}

/// Parses `args`, runs, writes the CSV and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let table = match run(&cli) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, table.to_csv()),
        None => table.write_csv(&mut std::io::stdout().lock()),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: cannot write CSV: {e}");
            1
        }
    }
}
