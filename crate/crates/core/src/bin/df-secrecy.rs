//! Command-line front-end: point evaluation, Monte Carlo estimation, SNR
//! sweeps and the self-validation suite.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use df_secrecy::analytic::{slope_fixed_eve, slope_scaled_eve, sop_closed_form, sop_limit};
use df_secrecy::model::{db_to_linear, CaseId, RateThreshold, SnrTriple};
use df_secrecy::montecarlo::{estimate_sop_paired, Parallelism};
use df_secrecy::sweep::{run_sweep, write_rows, write_table, Scenario, SweepSpec, TableFormat};
use df_secrecy::validate::{run_validation, ClosedForm, ValidationConfig};
use df_secrecy::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "df-secrecy",
    version,
    about = "Secrecy outage analysis of decode-and-forward relay wiretap systems",
    long_about = "Secrecy outage analysis of decode-and-forward relay wiretap systems.\n\n\
        SNR flags ending in -db take decibels; the variants without the suffix take linear values.\n\
        Exit status: 0 success, 1 validation failure, 2 usage error."
)]
struct Cli {
    /// Print progress and summaries to stderr (repeat for more detail)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form SOP, asymptotes, limits and slope constants at one point
    Eval(PointArgs),
    /// Monte Carlo SOP estimates at one point (all cases share the same draws)
    Mc(McArgs),
    /// SNR sweep over gamma_d written as CSV or JSON lines
    Sweep(SweepArgs),
    /// Run the property and cross-validation suite
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CaseArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    #[value(name = "1conv")]
    OneConv,
    #[value(name = "all")]
    All,
}

impl CaseArg {
    /// `all` selects the three cases with closed forms.
    fn cases(self) -> Vec<CaseId> {
        match self {
            CaseArg::One => vec![CaseId::Case1],
            CaseArg::Two => vec![CaseId::Case2],
            CaseArg::Three => vec![CaseId::Case3],
            CaseArg::OneConv => vec![CaseId::Case1Conventional],
            CaseArg::All => CaseId::ANALYTIC.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    FixedEve,
    ScaledEve,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

impl From<FormatArg> for TableFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => TableFormat::Csv,
            FormatArg::Jsonl => TableFormat::JsonLines,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct PointArgs {
    /// Case to evaluate: 1 (E hears R), 2 (E hears S), 3 (E hears both), 1conv, or all
    #[arg(long, value_enum, default_value = "all")]
    case: CaseArg,
    /// Average R->D SNR gamma_d [dB]
    #[arg(long, allow_hyphen_values = true, conflicts_with = "gamma_d")]
    gamma_d_db: Option<f64>,
    /// Average R->D SNR gamma_d [linear]
    #[arg(long)]
    gamma_d: Option<f64>,
    /// Average S->R SNR gamma_r [dB]; defaults to alpha * gamma_d
    #[arg(long, allow_hyphen_values = true, conflicts_with = "gamma_r")]
    gamma_r_db: Option<f64>,
    /// Average S->R SNR gamma_r [linear]
    #[arg(long)]
    gamma_r: Option<f64>,
    /// Average eavesdropper SNR gamma_e [dB]; defaults to gamma_r / beta
    #[arg(long, allow_hyphen_values = true, conflicts_with = "gamma_e")]
    gamma_e_db: Option<f64>,
    /// Average eavesdropper SNR gamma_e [linear, 0 = no eavesdropper]
    #[arg(long)]
    gamma_e: Option<f64>,
    /// Ratio gamma_r / gamma_d [linear]
    #[arg(long)]
    alpha: Option<f64>,
    /// Ratio gamma_r / gamma_e [linear]
    #[arg(long)]
    beta: Option<f64>,
    /// Target secrecy rate R [bits per channel use]
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    rate: f64,
}

impl PointArgs {
    fn snrs(&self) -> Result<SnrTriple> {
        let pick = |db: Option<f64>, lin: Option<f64>| -> Result<Option<f64>> {
            match (db, lin) {
                (Some(db), _) => db_to_linear(db).map(Some),
                (None, lin) => Ok(lin),
            }
        };
        let gamma_d = pick(self.gamma_d_db, self.gamma_d)?
            .ok_or_else(|| Error::Validation("gamma_d is required (--gamma-d-db or --gamma-d)".into()))?;
        let gamma_r = match pick(self.gamma_r_db, self.gamma_r)? {
            Some(g) => g,
            None => match self.alpha {
                Some(a) => a * gamma_d,
                None => {
                    return Err(Error::Validation(
                        "gamma_r is required (--gamma-r-db, --gamma-r or --alpha)".into(),
                    ))
                }
            },
        };
        let gamma_e = match (self.gamma_e_db, self.gamma_e) {
            (Some(db), _) if db == f64::NEG_INFINITY => 0.0,
            _ => match pick(self.gamma_e_db, self.gamma_e)? {
                Some(g) => g,
                None => match self.beta {
                    Some(b) if b > 0.0 => gamma_r / b,
                    Some(b) => return Err(Error::Validation(format!("beta must be > 0, got {b}"))),
                    None => {
                        return Err(Error::Validation(
                            "gamma_e is required (--gamma-e-db, --gamma-e or --beta)".into(),
                        ))
                    }
                },
            },
        };
        SnrTriple::new(gamma_r, gamma_d, gamma_e)
    }
}

#[derive(Args, Debug)]
struct McArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Number of channel draws
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Random seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Cases to sweep: 1, 2, 3, 1conv, or all (1, 2 and 3); repeatable
    #[arg(long, value_enum, default_values = ["all"])]
    case: Vec<CaseArg>,
    /// High-SNR scenario: fixed-eve (gamma_e constant) or scaled-eve (gamma_e = gamma_r / beta)
    #[arg(long, value_enum, default_value = "fixed-eve")]
    scenario: ScenarioArg,
    /// First gamma_d grid point [dB]
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    from_db: f64,
    /// Last gamma_d grid point [dB]
    #[arg(long, default_value_t = 50.0, allow_hyphen_values = true)]
    to_db: f64,
    /// Grid spacing [dB]
    #[arg(long, default_value_t = 2.0)]
    step_db: f64,
    /// Ratio gamma_r / gamma_d [linear]
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Ratio gamma_r / gamma_e [linear]; scaled-eve only (default 1)
    #[arg(long)]
    beta: Option<f64>,
    /// Fixed eavesdropper SNR [dB]; fixed-eve only (default 1 dB)
    #[arg(long, allow_hyphen_values = true, conflicts_with = "gamma_e")]
    gamma_e_db: Option<f64>,
    /// Fixed eavesdropper SNR [linear]; fixed-eve only
    #[arg(long)]
    gamma_e: Option<f64>,
    /// Target secrecy rate R [bits per channel use]
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    rate: f64,
    /// Monte Carlo draws per grid point (0 disables simulation)
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Random seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output table format
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

impl SweepArgs {
    fn spec(&self) -> Result<SweepSpec> {
        let mut cases: Vec<CaseId> = self.case.iter().flat_map(|c| c.cases()).collect();
        cases.sort();
        cases.dedup();
        let (scenario, beta, gamma_e_fixed) = match self.scenario {
            ScenarioArg::FixedEve => {
                if self.beta.is_some() {
                    return Err(Error::Validation("--beta applies to the scaled-eve scenario only".into()));
                }
                let ge = match (self.gamma_e_db, self.gamma_e) {
                    (Some(db), _) => db_to_linear(db)?,
                    (None, Some(g)) => g,
                    (None, None) => db_to_linear(1.0)?,
                };
                (Scenario::FixedEve, None, Some(ge))
            }
            ScenarioArg::ScaledEve => {
                if self.gamma_e_db.is_some() || self.gamma_e.is_some() {
                    return Err(Error::Validation(
                        "a fixed gamma_e applies to the fixed-eve scenario only".into(),
                    ));
                }
                (Scenario::ScaledEve, Some(self.beta.unwrap_or(1.0)), None)
            }
        };
        let spec = SweepSpec {
            scenario,
            cases,
            gamma_d_db_start: self.from_db,
            gamma_d_db_stop: self.to_db,
            gamma_d_db_step: self.step_db,
            alpha: self.alpha,
            beta,
            gamma_e_fixed,
            r: RateThreshold::new(self.rate)?,
            mc_samples: self.samples,
            seed: self.seed,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Monte Carlo draws per grid cell
    #[arg(long, default_value_t = ValidationConfig::default().mc_samples)]
    samples: u64,
    /// Randomized trials for the capacity and ordering checks
    #[arg(long, default_value_t = ValidationConfig::default().trials)]
    trials: usize,
    /// Random seed
    #[arg(long, default_value_t = ValidationConfig::default().seed)]
    seed: u64,
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.8}")).unwrap_or_else(|| "-".into())
}

fn cmd_eval(args: &PointArgs) -> Result<()> {
    let snrs = args.snrs()?;
    let r = RateThreshold::new(args.rate)?;
    let alpha = snrs.gamma_r() / snrs.gamma_d();
    let beta = (snrs.gamma_e() > 0.0).then(|| snrs.gamma_r() / snrs.gamma_e());
    let cases = args.case.cases();

    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "gamma_r={} gamma_d={} gamma_e={} (linear)  R={} bit/cu  alpha={} beta={}",
        snrs.gamma_r(),
        snrs.gamma_d(),
        snrs.gamma_e(),
        r.bits(),
        alpha,
        beta.map_or("inf".to_string(), |b| b.to_string()),
    );
    let _ = writeln!(
        out,
        "{:<5} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "case", "sop", "M_fixed", "asym_fixed", "limit", "M_scaled", "asym_scaled"
    );
    for case in cases {
        let sop = sop_closed_form(case, &snrs, r)?;
        let m = slope_fixed_eve(case, alpha, snrs.gamma_e(), r)?;
        let (lim, mh) = match beta {
            Some(b) => (Some(sop_limit(case, alpha, b, r)?), Some(slope_scaled_eve(case, alpha, b, r)?)),
            None => (None, None),
        };
        let asym_scaled = lim.zip(mh).map(|(l, m)| l + m / snrs.gamma_d());
        let _ = writeln!(
            out,
            "{:<5} {:>12.8} {:>12.6} {:>12.8} {:>12} {:>12} {:>12}",
            case.label(),
            sop,
            m,
            m / snrs.gamma_d(),
            fmt_opt(lim),
            fmt_opt(mh),
            fmt_opt(asym_scaled),
        );
    }
    Ok(())
}

fn cmd_mc(args: &McArgs) -> Result<()> {
    let snrs = args.point.snrs()?;
    let r = RateThreshold::new(args.point.rate)?;
    let cases = args.point.case.cases();
    let est = estimate_sop_paired(&cases, &snrs, r, args.samples, args.seed, Parallelism::Auto)?;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "{:<5} {:>12} {:>12} {:>12} {:>12} {:>10} {:>8}",
        "case", "sop_mc", "ci_low", "ci_high", "analytic", "n", "seed"
    );
    for e in est {
        let analytic = e.case.has_closed_form().then(|| sop_closed_form(e.case, &snrs, r)).transpose()?;
        let _ = writeln!(
            out,
            "{:<5} {:>12.8} {:>12.8} {:>12.8} {:>12} {:>10} {:>8}",
            e.case.label(),
            e.value,
            e.ci_low,
            e.ci_high,
            fmt_opt(analytic),
            e.n,
            e.seed
        );
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs, verbose: u8) -> Result<()> {
    let spec = args.spec()?;
    if verbose > 0 {
        eprintln!(
            "sweep: {:?}, cases {:?}, {} grid points, R={}, alpha={}, beta={:?}, gamma_e={:?}, {} samples, seed {}",
            spec.scenario,
            spec.cases,
            spec.grid_db().len(),
            spec.r.bits(),
            spec.alpha,
            spec.beta,
            spec.gamma_e_fixed,
            spec.mc_samples,
            spec.seed
        );
    }
    let rows = run_sweep(&spec)?;
    match &args.out {
        Some(path) => write_table(&rows, path, args.format.into())?,
        None => write_rows(&rows, std::io::stdout().lock(), args.format.into()).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })?,
    }
    if verbose > 0 {
        eprintln!("{:<5} {:>8} {:>14} {:>14} {:>14}", "case", "gd_db", "analytic", "asymptotic", "mc");
        for row in &rows {
            eprintln!(
                "{:<5} {:>8.2} {:>14} {:>14} {:>14}",
                row.case.label(),
                row.gamma_d_db,
                fmt_opt(row.sop_analytic),
                fmt_opt(row.sop_asymptotic),
                fmt_opt(row.sop_mc)
            );
        }
    }
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<i32> {
    let cfg = ValidationConfig {
        mc_samples: args.samples,
        trials: args.trials,
        seed: args.seed,
    };
    let report = run_validation(&ClosedForm, &cfg);
    print!("{}", report.render());
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a).map(|_| 0),
        Command::Mc(a) => cmd_mc(a).map(|_| 0),
        Command::Sweep(a) => cmd_sweep(a, cli.verbose).map(|_| 0),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
