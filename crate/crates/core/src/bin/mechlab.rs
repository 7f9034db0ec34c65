use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mechlab::characterization::{lower_bound_experiment, lp_residuals, normalized_residual};
use mechlab::harness::json::{fmt_g17, to_compact_json, to_pretty_json};
use mechlab::harness::{generate_profiles, load_profile, run_campaign, CampaignConfig, ReportFormat};
use mechlab::{CheckConfig, Error, MechanismSpec, Property, SpaceConfig, Verdict};

const SEED_ENV: &str = "MECHLAB_SEED";

/// Facility-location mechanism lab.
#[derive(Parser)]
#[command(name = "mechlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one mechanism on a profile file.
    Eval {
        #[arg(long)]
        mechanism: MechanismSpec,
        /// CSV profile, one agent per line.
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, default_value = "2,2")]
        space: SpaceConfig,
    },
    /// Check one property of one mechanism.
    Check {
        #[arg(long)]
        mechanism: MechanismSpec,
        #[arg(long)]
        property: Property,
        /// Verdict the exit code is judged against.
        #[arg(long, default_value = "pass")]
        expect: Verdict,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run a full campaign from a TOML config, or the built-in catalog.
    Fuzz {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        format: Option<ReportFormat>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Residual sweep for a two-agent mechanism, as CSV.
    Characterize {
        #[arg(long)]
        mechanism: MechanismSpec,
        /// Exponents to sweep; defaults to the exponent of --space.
        #[arg(long, value_delimiter = ',')]
        exponents: Vec<f64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Maximum-cost lower-bound experiment for a two-agent mechanism.
    Ratio {
        #[arg(long)]
        mechanism: MechanismSpec,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Dimension and exponent as `m,p`.
    #[arg(long, default_value = "2,2")]
    space: SpaceConfig,
    /// Overridden by MECHLAB_SEED when set.
    #[arg(long)]
    seed: Option<u64>,
    /// Sampled profiles per check.
    #[arg(long)]
    trials: Option<usize>,
    /// Sampling box as `lo,hi`.
    #[arg(long = "box", value_name = "LO,HI", value_delimiter = ',', num_args = 1)]
    bounds: Option<Vec<f64>>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Agents per profile for mechanisms without a fixed arity.
    #[arg(long)]
    agents: Option<usize>,
    /// Grid points per axis in the misreport search.
    #[arg(long)]
    grid: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn apply(&self, mut cfg: CheckConfig) -> Result<CheckConfig, Error> {
        if let Some(seed) = env_seed()?.or(self.seed) {
            cfg.seed = seed;
        }
        if let Some(n) = self.trials {
            cfg.num_profiles = n;
        }
        if let Some(b) = &self.bounds {
            let [lo, hi] = b[..] else {
                return Err(Error::InvalidConfig("--box takes exactly two values, lo,hi".into()));
            };
            (cfg.box_lo, cfg.box_hi) = (lo, hi);
        }
        if let Some(t) = self.tolerance {
            cfg.tolerance = t;
        }
        if self.agents.is_some() {
            cfg.agents = self.agents;
        }
        if let Some(g) = self.grid {
            cfg.grid_points_per_axis = g;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn config(&self) -> Result<CheckConfig, Error> {
        self.apply(CheckConfig::default())
    }

    fn emit(&self, text: &str) -> Result<(), Error> {
        match &self.out {
            Some(path) => {
                std::fs::write(path, text).map_err(|e| Error::File { path: path.clone(), source: e })
            }
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn env_seed() -> Result<Option<u64>, Error> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidConfig(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("mechlab: {e}");
            ExitCode::from(2)
        }
    }
}

/// Ok(false) means the run completed but some verdict was unexpected.
fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Eval { mechanism, profile, space } => {
            let profile = load_profile(&profile)?;
            let w = mechanism.evaluate(&profile, &space)?;
            println!("{}", to_compact_json(&w)?);
            Ok(true)
        }
        Command::Check { mechanism, property, expect, run } => {
            let cfg = run.config()?;
            let report = mechlab::run_check(property, &mechanism, &run.space, &cfg)?;
            run.emit(&to_pretty_json(&report)?)?;
            if report.verdict != expect {
                eprintln!("{mechanism} {property}: expected {expect}, got {}", report.verdict);
            }
            Ok(report.verdict == expect)
        }
        Command::Fuzz { config, format, run } => {
            let mut cfg = match &config {
                Some(path) => {
                    let mut cfg = CampaignConfig::load(path)?;
                    cfg.check_config = run.apply(cfg.check_config)?;
                    cfg
                }
                None => CampaignConfig::catalog(run.space, run.config()?),
            };
            if let Some(f) = format {
                cfg.format = f;
            }
            if run.out.is_some() {
                cfg.output_path = run.out.clone();
            }
            let report = run_campaign(&cfg)?;
            if cfg.output_path.is_none() {
                print!("{}", report.render(cfg.format)?);
            }
            for (property, tally) in &report.summary {
                eprintln!("{property:<24} pass {:>3}  fail {:>3}", tally.pass, tally.fail);
            }
            for u in &report.unexpected {
                eprintln!(
                    "unexpected: {} {} expected {}, got {}",
                    u.mechanism, u.property, u.expected, u.actual
                );
            }
            Ok(report.as_expected())
        }
        Command::Characterize { mechanism, exponents, run } => {
            characterize(&mechanism, &exponents, &run)?;
            Ok(true)
        }
        Command::Ratio { mechanism, run } => {
            let cfg = run.config()?;
            let outcome = lower_bound_experiment(&mechanism, &run.space, &cfg)?;
            let Some(worst) = outcome.worst else {
                return Err(Error::Domain(format!(
                    "{mechanism} placed the facility on the second agent in all {} profiles",
                    outcome.profiles
                )));
            };
            run.emit(&to_pretty_json(&worst)?)?;
            eprintln!(
                "{} profiles, {} with W != B, {} stability violations",
                outcome.profiles, outcome.nondegenerate, outcome.stability_violations
            );
            Ok(outcome.stable())
        }
    }
}

fn characterize(mechanism: &MechanismSpec, exponents: &[f64], run: &RunArgs) -> Result<(), Error> {
    if mechanism.fixed_arity() != Some(2) {
        return Err(Error::Unsupported(format!("{mechanism} is not a two-agent mechanism")));
    }
    let cfg = run.config()?;
    let m = run.space.m();
    let spaces = if exponents.is_empty() {
        vec![run.space]
    } else {
        exponents.iter().map(|&p| SpaceConfig::new(m, p)).collect::<Result<_, _>>()?
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["mechanism".to_string(), "p".into(), "m".into()];
    for prefix in ["a", "b", "w"] {
        header.extend((1..=m).map(|i| format!("{prefix}{i}")));
    }
    header.extend(["residual_raw", "residual_normalized", "r_g", "r_h"].map(String::from));
    w.write_record(&header)?;
    for space in &spaces {
        if space.p() <= 2.0 {
            eprintln!(
                "warning: the residual characterization is established for p > 2; p = {} is reported as is",
                space.p()
            );
        }
        for profile in generate_profiles(space, 2, &cfg).take(cfg.num_profiles) {
            let (a, b) = (profile.agent(0), profile.agent(1));
            let out = mechanism.evaluate(&profile, space)?;
            let r = lp_residuals(a, b, &out, space)?;
            let raw = r.dominant();
            let mut row = vec![mechanism.to_string(), fmt_g17(space.p()), m.to_string()];
            for pt in [a, b, &out] {
                row.extend(pt.coords().iter().map(|&c| fmt_g17(c)));
            }
            row.extend([raw, normalized_residual(raw, a, b, space)?, r.r_g, r.r_h].map(fmt_g17));
            w.write_record(&row)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    run.emit(&String::from_utf8(bytes).expect("UTF-8 fields"))
}
