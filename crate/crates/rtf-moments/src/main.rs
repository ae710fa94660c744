use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rtf_moments::harness::{self, Command, RunConfig};
use rtf_moments::Result;

#[derive(Parser)]
#[command(name = "rtf", version, about = "Relative trace formula moment checks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a moment identity over a (weight, level, Hecke index) grid.
    Verify {
        #[arg(value_enum)]
        moment: MomentArg,
        #[command(flatten)]
        common: Common,
    },
    /// Limiting non-vanishing proportions per regime.
    Proportion {
        /// `all` or a comma-separated list of regime names.
        #[arg(long)]
        regimes: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Property suites for the special functions.
    SpecfunCheck {
        #[arg(long)]
        samples: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Mollified moments at level 1 against their main terms.
    Mollified {
        #[arg(long)]
        xi_exponent: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MomentArg {
    SecondMoment,
    FirstMoment,
}

#[derive(Args)]
struct Common {
    /// Key-value configuration file; command-line options override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    hecke: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    truncation_tol: Option<String>,
    #[arg(long)]
    n_max: Option<String>,
    #[arg(long, env = "RTF_CACHE_DIR")]
    cache_dir: Option<String>,
    #[arg(long)]
    report: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    /// Prime-level newform eigenvalue file.
    #[arg(long)]
    ingest: Option<String>,
    /// Omit wall times so reports are byte-for-byte reproducible.
    #[arg(long)]
    no_timings: bool,
}

impl Common {
    fn build(&self, command: Command, extra: &[(&str, &Option<String>)]) -> Result<RunConfig> {
        let mut cfg = RunConfig::new(command);
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let pairs = [
            ("field", &self.field),
            ("weights", &self.weights),
            ("levels", &self.levels),
            ("hecke", &self.hecke),
            ("tol", &self.tol),
            ("truncation-tol", &self.truncation_tol),
            ("n-max", &self.n_max),
            ("cache-dir", &self.cache_dir),
            ("report", &self.report),
            ("threads", &self.threads),
            ("ingest", &self.ingest),
        ];
        for (key, value) in pairs.iter().chain(extra) {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if self.no_timings {
            cfg.timings = false;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<bool> {
    let (cfg, text, json, pass) = match &cli.command {
        Cmd::Verify { moment, common } => {
            let cfg = match moment {
                MomentArg::SecondMoment => common.build(Command::VerifySecond, &[])?,
                MomentArg::FirstMoment => common.build(Command::VerifyFirst, &[])?,
            };
            let report = match moment {
                MomentArg::SecondMoment => harness::cmd_verify_second(&cfg)?,
                MomentArg::FirstMoment => harness::cmd_verify_first(&cfg)?,
            };
            (cfg, harness::render_moment_table(&report), harness::to_json(&report)?, report.pass())
        }
        Cmd::Proportion { regimes, common } => {
            let cfg = common.build(Command::Proportion, &[("regimes", regimes)])?;
            let report = harness::cmd_proportion(&cfg)?;
            (cfg, harness::render_proportion_table(&report), harness::to_json(&report)?, report.pass)
        }
        Cmd::SpecfunCheck { samples, seed, common } => {
            let cfg = common.build(Command::SpecfunCheck, &[("samples", samples), ("seed", seed)])?;
            let report = harness::cmd_specfun_check(&cfg)?;
            (cfg, harness::render_specfun_table(&report), harness::to_json(&report)?, report.pass)
        }
        Cmd::Mollified { xi_exponent, common } => {
            let cfg = common.build(Command::Mollified, &[("xi-exponent", xi_exponent)])?;
            let report = harness::cmd_mollified(&cfg)?;
            (cfg, harness::render_mollified_table(&report), harness::to_json(&report)?, report.pass)
        }
    };
    print!("{text}");
    match &cfg.report {
        Some(path) => std::fs::write(path, json)?,
        None if matches!(cfg.command, Command::Proportion) => print!("{json}"),
        None => {}
    }
    Ok(pass)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
