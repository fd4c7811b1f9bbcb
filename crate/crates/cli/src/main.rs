use clap::{Parser, Subcommand};
use hypflow_cli::{exit_code, run_scenario, ScenarioConfig, ScenarioKind};
use std::path::PathBuf;
use std::process::ExitCode;

/// Numerical experiments for geometric flows into the hyperbolic plane.
#[derive(Parser)]
#[command(name = "hypflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its artifacts and summary.json.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config file without running it.
    Validate { config: PathBuf },
    /// List the available scenarios.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, out } => match ScenarioConfig::from_path(&config) {
            Err(e) => {
                eprintln!("{e}");
                1
            }
            Ok(cfg) => match run_scenario(&cfg, out.as_deref()) {
                Err(e) => {
                    eprintln!("{e}");
                    e.exit_code()
                }
                Ok(sum) => {
                    for p in &sum.properties {
                        println!("{}", p.line());
                    }
                    for w in &sum.warnings {
                        eprintln!("warning: {w}");
                    }
                    let dir = out.unwrap_or(cfg.output_dir);
                    println!("summary: {}", dir.join("summary.json").display());
                    exit_code(&sum)
                }
            },
        },
        Command::Validate { config } => match ScenarioConfig::from_path(&config) {
            Err(e) => {
                eprintln!("{e}");
                1
            }
            Ok(cfg) => {
                println!("ok: {} ({})", config.display(), cfg.scenario.name());
                0
            }
        },
        Command::List => {
            for k in ScenarioKind::ALL {
                let crit: Vec<String> = k.criteria().iter().map(u8::to_string).collect();
                println!("{:<20} criteria {:<8} {}", k.name(), crit.join(","), k.description());
            }
            0
        }
    };
    ExitCode::from(code as u8)
}
