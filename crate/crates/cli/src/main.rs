use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use waveortho::scenario::{render_report, run_scenario, Config, Format, Scenario, ScenarioName};
use waveortho::Error;

const AFTER_HELP: &str = "\
Scenarios: sphere, strip, slit, spheroid, born, kernel-profile, riemann-decay.

Any scenario parameter can be given as `--key value` (e.g. `--ka 5 --bc hard
--solver iterate:50`); command-line values override the config file. Angles
accept `deg` and `pi` suffixes (`--incidence 10deg`). A flag given without a
value (`--born-alt-reading`) is set to true.

The main data table is written to --out (default `<scenario>.<format>`), the
report to `<stem>.report.<format>` and printed on stdout.

Exit status: 0 all thresholds met, 1 a threshold failed, 2 usage error,
3 runtime or I/O error.";

#[derive(Parser, Debug)]
#[command(name = "waveortho", version, about = "Approximate-orthogonality wave scattering experiments", after_help = AFTER_HELP)]
struct Cli {
    /// Scenario to run.
    scenario: String,
    /// `--key value` parameters, plus `--config path`, `--out path` and
    /// `--format csv|json`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--key value")]
    args: Vec<String>,
}

struct Invocation {
    scenario: Scenario,
    format: Format,
}

fn parse(cli: Cli) -> Result<Invocation, Error> {
    let name: ScenarioName = cli.scenario.parse()?;
    let mut overrides = Config::default();
    let mut config_path: Option<PathBuf> = None;
    let mut it = cli.args.into_iter().peekable();
    while let Some(arg) = it.next() {
        let key = arg
            .strip_prefix("--")
            .filter(|k| !k.is_empty())
            .ok_or_else(|| Error::Usage(format!("expected --key, got '{arg}'")))?
            .to_string();
        let (key, value) = match key.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => match it.peek() {
                Some(next) if !next.starts_with("--") => (key, it.next().unwrap_or_default()),
                _ => (key, "true".to_string()),
            },
        };
        if key == "config" {
            config_path = Some(PathBuf::from(value));
        } else {
            overrides.set(&key, &value);
        }
    }
    let mut params = match &config_path {
        Some(p) => Config::from_file(p)?,
        None => Config::default(),
    };
    params.merge(&overrides);
    let format: Format = params.get("format").unwrap_or("csv").parse()?;
    if params.get("out").is_none() {
        params.set("out", &format!("{name}.{}", format.extension()));
    }
    Ok(Invocation { scenario: Scenario { name, params }, format })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let inv = match parse(cli) {
        Ok(inv) => inv,
        Err(e) => {
            eprintln!("waveortho: {e}");
            return ExitCode::from(2);
        }
    };
    match run_scenario(&inv.scenario) {
        Ok(out) => {
            match render_report(&out.report, inv.format) {
                Ok(text) => print!("{text}"),
                Err(e) => eprintln!("waveortho: {e}"),
            }
            for w in &out.report.warnings {
                eprintln!("warning: {w}");
            }
            if out.report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e @ Error::Usage(_)) => {
            eprintln!("waveortho: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("waveortho: {e}");
            ExitCode::from(3)
        }
    }
}
