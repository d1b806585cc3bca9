//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a core operation rejects the input
//! (domain, parameter, parse, or I/O errors), 2 for usage errors.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ces::{
    fit_ces_params, rank_by_occupancy, rank_channels, CesGrid, CesParams, ChannelObservation,
    RankedChannel,
};
use crate::error::Result;
use crate::io::{
    emit_curve_samples, emit_observations, parse_observations, parse_reference_ranking, sha256_hex,
    BaselineReport, RankReport, ReportMeta,
};
use crate::sim::{parse_scenario, run_scenario};
use crate::utility::{sample_curve, CurveFamily, UtilityCurve};

#[derive(Parser)]
#[command(
    name = "chanrank",
    version,
    about = "Rank sensed radio channels by combined SNR and occupancy utility"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank observations by combined CES utility
    Rank(RankArgs),
    /// Occupancy-sorted baseline with utility-rank cross references
    Baseline(BaselineArgs),
    /// Sample a utility curve to CSV for plotting
    Curves(CurvesArgs),
    /// Grid-search CES parameters against a reference ranking
    Fit(FitArgs),
    /// Generate observations from a simulated sensing scenario
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    LogisticMidpoint,
    Logistic,
    TanhScaled,
    TanhHalf,
}

impl From<FamilyArg> for CurveFamily {
    fn from(arg: FamilyArg) -> Self {
        match arg {
            FamilyArg::LogisticMidpoint => CurveFamily::LogisticMidpoint,
            FamilyArg::Logistic => CurveFamily::Logistic,
            FamilyArg::TanhScaled => CurveFamily::TanhScaled,
            FamilyArg::TanhHalf => CurveFamily::TanhHalf,
        }
    }
}

fn default_snr_alpha(family: CurveFamily) -> f64 {
    match family {
        CurveFamily::LogisticMidpoint | CurveFamily::Logistic => 0.2,
        CurveFamily::TanhScaled => 0.1,
        CurveFamily::TanhHalf => 0.5,
    }
}

fn default_occ_alpha(family: CurveFamily) -> f64 {
    match family {
        CurveFamily::TanhHalf => 0.5,
        _ => 5.0,
    }
}

#[derive(Args)]
struct CurveOpts {
    /// Curve family for both utility sides
    #[arg(long, value_enum, default_value_t = FamilyArg::TanhHalf)]
    curve: FamilyArg,
    /// SNR-side steepness (defaults per family)
    #[arg(long)]
    alpha_snr: Option<f64>,
    /// Occupancy-side steepness (defaults per family)
    #[arg(long)]
    alpha_occ: Option<f64>,
    /// SNR-curve midpoint in dB
    #[arg(long, default_value_t = 0.0)]
    snr_midpoint: f64,
    /// Occupancy-curve midpoint as a fraction
    #[arg(long, default_value_t = 0.5)]
    occ_midpoint: f64,
    /// Utility ceiling A (display scale only; curves are normalized)
    #[arg(long, default_value_t = 100.0)]
    max_utility: f64,
    /// Highest SNR of the sweep (X_max)
    #[arg(long, default_value_t = 20.0)]
    snr_max: f64,
}

impl CurveOpts {
    fn build(&self) -> Result<(UtilityCurve, UtilityCurve)> {
        let family = CurveFamily::from(self.curve);
        let snr = UtilityCurve::new(
            family,
            self.alpha_snr.unwrap_or_else(|| default_snr_alpha(family)),
            self.max_utility,
            self.snr_midpoint,
            self.snr_max,
        )?;
        let occ = UtilityCurve::new(
            family,
            self.alpha_occ.unwrap_or_else(|| default_occ_alpha(family)),
            self.max_utility,
            self.occ_midpoint,
            1.0,
        )?;
        Ok((snr, occ))
    }
}

#[derive(Args)]
struct CesOpts {
    /// CES elasticity exponent, in (0, 1]
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    /// SNR weight; the occupancy weight is its complement
    #[arg(long, default_value_t = 0.5)]
    w_snr: f64,
}

impl CesOpts {
    fn build(&self) -> Result<CesParams> {
        CesParams::new(self.w_snr, 1.0 - self.w_snr, self.sigma)
    }
}

#[derive(Args)]
struct RankArgs {
    /// Observations CSV (frequency_ghz,snr_db,occupancy_pct)
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    curve_opts: CurveOpts,
    #[command(flatten)]
    ces: CesOpts,
    /// Emit the report as JSON instead of a text table
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BaselineArgs {
    /// Observations CSV (frequency_ghz,snr_db,occupancy_pct)
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    curve_opts: CurveOpts,
    #[command(flatten)]
    ces: CesOpts,
    /// Emit the report as JSON instead of a text table
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DomainArg {
    Snr,
    Occupancy,
}

#[derive(Args)]
struct CurvesArgs {
    /// Curve family to sample
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Input variable: snr sweeps dB, occupancy sweeps the mirrored curve
    #[arg(long, value_enum)]
    domain: DomainArg,
    /// Number of evenly spaced samples (endpoints inclusive)
    #[arg(long)]
    points: usize,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// Steepness (defaults per family and domain)
    #[arg(long)]
    alpha: Option<f64>,
    /// Curve midpoint (default 0 dB for snr, 0.5 for occupancy)
    #[arg(long)]
    midpoint: Option<f64>,
    /// Domain lower bound (default -20 dB for snr, 0 for occupancy)
    #[arg(long)]
    lo: Option<f64>,
    /// Domain upper bound (default +20 dB for snr, 1 for occupancy)
    #[arg(long)]
    hi: Option<f64>,
}

#[derive(Args)]
struct FitArgs {
    /// Observations CSV (frequency_ghz,snr_db,occupancy_pct)
    #[arg(long)]
    input: PathBuf,
    /// Reference ranking CSV (index,rank)
    #[arg(long)]
    reference: PathBuf,
    #[command(flatten)]
    curve_opts: CurveOpts,
    /// Emit the result as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario TOML describing sensing settings and channels
    #[arg(long)]
    scenario: PathBuf,
    /// Base RNG seed; channel i runs with seed + i
    #[arg(long)]
    seed: u64,
    /// Output observations CSV path
    #[arg(long)]
    out: PathBuf,
}

/// Parse `argv` and run one subcommand, returning the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Rank(args) => cmd_rank(args),
        Command::Baseline(args) => cmd_baseline(args),
        Command::Curves(args) => cmd_curves(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn load_observations(path: &PathBuf) -> Result<(Vec<ChannelObservation>, String)> {
    let raw = fs::read_to_string(path)?;
    let digest = sha256_hex(raw.as_bytes());
    Ok((parse_observations(&raw)?, digest))
}

fn utility_ranks_by_index(ranked: &[RankedChannel], n: usize) -> Vec<usize> {
    let mut ranks = vec![0usize; n];
    for channel in ranked {
        ranks[channel.input_index] = channel.rank;
    }
    ranks
}

fn cmd_rank(args: RankArgs) -> Result<()> {
    let (observations, digest) = load_observations(&args.input)?;
    let (snr_curve, occ_curve) = args.curve_opts.build()?;
    let params = args.ces.build()?;
    let ranked = rank_channels(&observations, &snr_curve, &occ_curve, &params)?;
    let meta = ReportMeta::new(&snr_curve, &occ_curve, &params, unix_now(), digest);
    let report = RankReport::from_ranked(&ranked, meta);
    if args.json {
        println!("{}", report.to_json()?);
    } else {
        print!("{}", report.render_text());
    }
    Ok(())
}

fn cmd_baseline(args: BaselineArgs) -> Result<()> {
    let (observations, digest) = load_observations(&args.input)?;
    let (snr_curve, occ_curve) = args.curve_opts.build()?;
    let params = args.ces.build()?;
    let baseline = rank_by_occupancy(&observations)?;
    let ranked = rank_channels(&observations, &snr_curve, &occ_curve, &params)?;
    let cross = utility_ranks_by_index(&ranked, observations.len());
    let meta = ReportMeta::new(&snr_curve, &occ_curve, &params, unix_now(), digest);
    let report = BaselineReport::from_rankings(&baseline, &cross, meta);
    if args.json {
        println!("{}", report.to_json()?);
    } else {
        print!("{}", report.render_text());
    }
    Ok(())
}

fn cmd_curves(args: CurvesArgs) -> Result<()> {
    let family = CurveFamily::from(args.family);
    let mirrored = matches!(args.domain, DomainArg::Occupancy);
    let (default_alpha, default_midpoint, default_lo, default_hi, input_max) = if mirrored {
        (default_occ_alpha(family), 0.5, 0.0, 1.0, 1.0)
    } else {
        (default_snr_alpha(family), 0.0, -20.0, 20.0, 20.0)
    };
    let curve = UtilityCurve::new(
        family,
        args.alpha.unwrap_or(default_alpha),
        100.0,
        args.midpoint.unwrap_or(default_midpoint),
        input_max,
    )?;
    let samples = sample_curve(
        &curve,
        args.lo.unwrap_or(default_lo),
        args.hi.unwrap_or(default_hi),
        args.points,
        mirrored,
    )?;
    fs::write(&args.out, emit_curve_samples(&samples))?;
    Ok(())
}

#[derive(serde::Serialize)]
struct FitOutcome {
    sigma: f64,
    w_snr: f64,
    w_occ: f64,
    tau_b: f64,
}

fn cmd_fit(args: FitArgs) -> Result<()> {
    let (observations, _) = load_observations(&args.input)?;
    let reference = parse_reference_ranking(&fs::read_to_string(&args.reference)?)?;
    let (snr_curve, occ_curve) = args.curve_opts.build()?;
    let (params, tau) = fit_ces_params(
        &observations,
        &reference,
        &snr_curve,
        &occ_curve,
        &CesGrid::default(),
    )?;
    let outcome = FitOutcome {
        sigma: params.sigma(),
        w_snr: params.w_snr(),
        w_occ: params.w_occ(),
        tau_b: tau,
    };
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&outcome)
                .map_err(|e| crate::error::Error::Parameter(format!("fit serialization: {e}")))?
        );
    } else {
        println!("sigma: {}", outcome.sigma);
        println!("w_snr: {}", outcome.w_snr);
        println!("w_occ: {}", outcome.w_occ);
        println!("tau_b: {}", outcome.tau_b);
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let scenario = parse_scenario(&fs::read_to_string(&args.scenario)?)?;
    let observations = run_scenario(&scenario, args.seed)?;
    fs::write(&args.out, emit_observations(&observations))?;
    Ok(())
}
