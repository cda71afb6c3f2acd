use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use memsync::config::ConstantsSource;
use memsync::model::BuiltinParams;
use memsync_cli::{load_config, simulate, thresholds, verify, CliError, SimulateOptions, VerifyOptions};

#[derive(Parser)]
#[command(name = "memsync", version, about = "Memristive reaction-diffusion network simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Constants {
    Published,
    Derived,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write norms.csv, diffs.csv and report.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run even if 4*eta*dt/dx^2 > 1.
        #[arg(long)]
        allow_unstable: bool,
        /// 0-based cell `i,j` whose point values go to probe.csv.
        #[arg(long, value_parser = parse_probe)]
        probe: Option<(usize, usize)>,
    },
    /// Print the dissipativity constants and the synchronization threshold.
    Thresholds {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Sample the model assumptions on a lattice.
    Verify {
        /// `hindmarsh_rose` (`hr`) or `fitzhugh_nagumo` (`fhn`), default parameters.
        #[arg(long, required_unless_present = "config")]
        model: Option<String>,
        /// Take the model block from a scenario config instead.
        #[arg(long, conflicts_with = "model")]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Sampling range of the potential `s`.
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-5:5")]
        range: (f64, f64),
        /// Sampling range of each ionic component; defaults to `--range`.
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        sigma_range: Option<(f64, f64)>,
        /// Structural-constant map for built-in models.
        #[arg(long, value_enum, default_value = "derived")]
        constants: Constants,
        /// Replace a structural constant, e.g. `alpha=0.5`.
        #[arg(long = "set", value_parser = parse_assign)]
        set: Vec<(String, f64)>,
        /// Multiply a structural constant, e.g. `alpha=2`.
        #[arg(long = "scale", value_parser = parse_assign)]
        scale: Vec<(String, f64)>,
        #[arg(long)]
        json: bool,
    },
}

fn parse_probe(s: &str) -> Result<(usize, usize), String> {
    let (i, j) = s.split_once(',').ok_or("expected i,j")?;
    let i = i.trim().parse().map_err(|e| format!("{e}"))?;
    let j = j.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((i, j))
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(format!("invalid range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn parse_assign(s: &str) -> Result<(String, f64), String> {
    let (name, v) = s.split_once('=').ok_or("expected name=value")?;
    let v = v.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((name.trim().to_string(), v))
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn execute(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Simulate {
            config,
            out,
            allow_unstable,
            probe,
        } => {
            let cfg = load_config(&config)?;
            let report = simulate(&cfg, &out, &SimulateOptions { allow_unstable, probe })?;
            println!(
                "{} steps, final t = {}, wrote {}",
                report.n_steps,
                report.final_time,
                out.display()
            );
            if let Some(rate) = report.min_pair_rate {
                println!("smallest fitted pairwise decay rate: {rate}");
            }
            println!("asynchronous degree estimate: {}", report.asynchronous_degree.estimate);
            Ok(())
        }
        Command::Thresholds { config, json: as_json } => {
            let cfg = load_config(&config)?;
            let report = thresholds(&cfg)?;
            if as_json {
                println!("{}", json(&report));
            } else {
                print!("{}", report.to_text());
            }
            Ok(())
        }
        Command::Verify {
            model,
            config,
            samples,
            range,
            sigma_range,
            constants,
            set,
            scale,
            json: as_json,
        } => {
            let params = match (model, config) {
                (Some(tag), _) => BuiltinParams::from_tag(&tag)
                    .ok_or_else(|| CliError::Config(format!("unknown model tag `{tag}`")))?,
                (None, Some(path)) => load_config(&path)?.model,
                (None, None) => unreachable!("clap requires one of --model/--config"),
            };
            let opts = VerifyOptions {
                samples,
                s_range: range,
                sigma_range: sigma_range.unwrap_or(range),
                constants: match constants {
                    Constants::Published => ConstantsSource::Published,
                    Constants::Derived => ConstantsSource::Derived,
                },
                set,
                scale,
                ..VerifyOptions::new(params)
            };
            let report = verify(&opts)?;
            if as_json {
                println!("{}", json(&report));
            } else {
                print!("{}", report.to_text());
            }
            if report.passed {
                Ok(())
            } else {
                Err(CliError::VerifyFailed("assumption check failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("memsync: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
