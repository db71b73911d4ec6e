use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gpsol::harness::{run_experiment, scenario, write_csv, ConfigMap, ExperimentConfig};
use gpsol::validation::run_all;
use gpsol::Result;

#[derive(Parser)]
#[command(name = "gpsol", version, about = "Soliton dynamics in inhomogeneous condensates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a key=value configuration file.
    Run(Box<RunArgs>),
    /// Run a named parameter sweep.
    Scenario {
        /// dark-accel | dark-compare | bright-accel | bright-compare
        name: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Check every acceptance criterion and print one line per criterion.
    Validate,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long = "C", allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long = "D", allow_hyphen_values = true)]
    d: Option<String>,
    #[arg(long = "A0", allow_hyphen_values = true)]
    a0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xi0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t_max: Option<String>,
    #[arg(long)]
    dt_pde: Option<String>,
    #[arg(long)]
    dt_ode: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<String>,
    #[arg(long)]
    n_points: Option<String>,
    #[arg(long)]
    stepper: Option<String>,
    /// Comma-separated: pde,ode-full,ode-taylor,eom,eom-a
    #[arg(long)]
    tiers: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let text = fs::read_to_string(&self.config)?;
        let mut map = ConfigMap::parse(&text)?;
        let overrides = [
            ("C", &self.c),
            ("D", &self.d),
            ("A0", &self.a0),
            ("eta0", &self.eta0),
            ("xi0", &self.xi0),
            ("t_max", &self.t_max),
            ("dt_pde", &self.dt_pde),
            ("dt_ode", &self.dt_ode),
            ("x_min", &self.x_min),
            ("x_max", &self.x_max),
            ("n_points", &self.n_points),
            ("stepper", &self.stepper),
            ("tiers", &self.tiers),
            ("out_path", &self.out),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                map.set(key, v.as_str())?;
            }
        }
        map.build()
    }
}

fn execute(config: &ExperimentConfig) -> Result<()> {
    let record = run_experiment(config)?;
    if let Some(pde) = record.pde.as_ref().filter(|p| p.norm_drift_warning) {
        eprintln!(
            "warning: relative norm drift {:.3e} exceeds tolerance",
            pde.max_norm_drift
        );
    }
    write_csv(&record, &config.out_path)?;
    println!("wrote {}", config.out_path.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(args) => execute(&args.load()?).map(|_| true),
        Command::Scenario { name, out_dir } => {
            for config in scenario(&name, &out_dir)? {
                execute(&config)?;
            }
            Ok(true)
        }
        Command::Validate => {
            let results = run_all(|r| println!("{r}"));
            Ok(results.iter().all(|r| r.passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
