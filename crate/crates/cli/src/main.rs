use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use chirpaddr::emitter::{CouplingConvention, Frame};
use chirpaddr_cli::config::{self, Experiment, PRESETS};
use chirpaddr_cli::{run, CliError, RunConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

/// Chirped-pulse addressing experiments. Units: ω_c = v = 1.
#[derive(Parser)]
#[command(name = "chirpaddr", version, about)]
struct Cli {
    /// List the experiments and presets, then exit.
    #[arg(long)]
    list: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// List the experiments and presets.
    List,
    /// Run one experiment.
    #[command(allow_negative_numbers = true)]
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameArg {
    Rwa,
    Lab,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    LabMax,
    RwaMax,
}

/// Precedence: built-in defaults < --preset < --config < individual flags.
#[derive(Args)]
struct RunArgs {
    /// Experiment name (see `chirpaddr list`); may also come from --config.
    experiment: Option<String>,

    /// Named parameter set applied over the defaults.
    #[arg(long)]
    preset: Option<String>,

    /// JSON config, or any CSV/JSON output whose metadata records a run.
    #[arg(long)]
    config: Option<PathBuf>,

    /// ω₀/ω_c: carrier frequency over the cutoff (> 1).
    #[arg(long = "omega0", value_name = "RATIO")]
    omega0: Option<f64>,

    /// d_f/λ₀: focal distance in carrier wavelengths.
    #[arg(long = "d-f", value_name = "RATIO")]
    d_f: Option<f64>,

    /// σ_f/λ₀: focal width in carrier wavelengths.
    #[arg(long = "sigma-f", value_name = "RATIO")]
    sigma_f: Option<f64>,

    /// Ω₀/ω_c: peak Rabi scale (meaning set by --convention).
    #[arg(long = "Omega0", value_name = "RATIO")]
    omega_peak: Option<f64>,

    /// Γ/ω_q: emitter decay rate.
    #[arg(long = "gamma", value_name = "RATIO")]
    gamma: Option<f64>,

    /// φ: carrier phase of the pulse.
    #[arg(long, value_name = "RAD")]
    phi: Option<f64>,

    /// α/ω_q: transmon anharmonicity (negative).
    #[arg(long = "alpha", value_name = "RATIO")]
    alpha: Option<f64>,

    /// Initial transmon Fock truncation (raised until converged).
    #[arg(long)]
    n_levels: Option<usize>,

    /// Frame for the emitter equations.
    #[arg(long, value_enum)]
    frame: Option<FrameArg>,

    /// lab-max: Ω₀ is the peak lab-frame coupling (rotating peak Ω₀/2);
    /// rwa-max: Ω₀ is the rotating-frame peak.
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,

    /// Relative ODE tolerance.
    #[arg(long)]
    rtol: Option<f64>,

    /// Absolute ODE tolerance.
    #[arg(long)]
    atol: Option<f64>,

    /// Position grid d_f ± N·σ_f (uniform, with --d-points).
    #[arg(long, value_name = "N")]
    d_half_widths: Option<f64>,

    /// Number of points on the uniform position grid.
    #[arg(long)]
    d_points: Option<usize>,

    /// Time samples for traces.
    #[arg(long)]
    t_points: Option<usize>,

    /// Γ/ω_q values for gamma-sweep, comma separated.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    gamma_list: Option<Vec<f64>>,

    /// σ_f/λ₀ values for pulse-spectrum, comma separated.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    sigma_f_list: Option<Vec<f64>>,

    /// Sample count for the drive experiments.
    #[arg(long)]
    n_samples: Option<usize>,

    /// ω_r/ω_c: truncation frequency for drive-truncate.
    #[arg(long = "omega-r", value_name = "RATIO")]
    omega_r: Option<f64>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,

    /// Omit wall-clock timing from the summary so repeated runs print
    /// identical output. Results never depend on a seed or thread count.
    #[arg(long)]
    seedless: bool,
}

impl RunArgs {
    fn flag_layer(&self) -> Value {
        let mut top = Map::new();
        let mut grids = Map::new();
        let put = |m: &mut Map<String, Value>, k: &str, v: Option<Value>| {
            if let Some(v) = v {
                m.insert(k.into(), v);
            }
        };
        put(&mut top, "experiment", self.experiment.as_ref().map(|s| json!(s)));
        put(&mut top, "omega0_over_omega_c", self.omega0.map(|v| json!(v)));
        put(&mut top, "d_f_over_lambda0", self.d_f.map(|v| json!(v)));
        put(&mut top, "sigma_f_over_lambda0", self.sigma_f.map(|v| json!(v)));
        put(&mut top, "Omega0_over_omega_c", self.omega_peak.map(|v| json!(v)));
        put(&mut top, "Gamma_over_omega_q", self.gamma.map(|v| json!(v)));
        put(&mut top, "phi", self.phi.map(|v| json!(v)));
        put(&mut top, "alpha_over_omega_q", self.alpha.map(|v| json!(v)));
        put(&mut top, "n_levels", self.n_levels.map(|v| json!(v)));
        put(&mut top, "frame", self.frame.map(|f| json!(match f {
            FrameArg::Rwa => Frame::Rwa,
            FrameArg::Lab => Frame::Lab,
        })));
        put(&mut top, "coupling_convention", self.convention.map(|c| json!(match c {
            ConventionArg::LabMax => CouplingConvention::LabMax,
            ConventionArg::RwaMax => CouplingConvention::RwaMax,
        })));
        put(&mut top, "rtol", self.rtol.map(|v| json!(v)));
        put(&mut top, "atol", self.atol.map(|v| json!(v)));
        put(&mut top, "output_dir", self.out.as_ref().map(|v| json!(v)));
        put(&mut grids, "d_half_widths", self.d_half_widths.map(|v| json!(v)));
        put(&mut grids, "d_points", self.d_points.map(|v| json!(v)));
        put(&mut grids, "t_points", self.t_points.map(|v| json!(v)));
        put(&mut grids, "gamma_list", self.gamma_list.as_ref().map(|v| json!(v)));
        put(&mut grids, "sigma_f_list", self.sigma_f_list.as_ref().map(|v| json!(v)));
        put(&mut grids, "n_samples", self.n_samples.map(|v| json!(v)));
        put(&mut grids, "omega_r_over_omega_c", self.omega_r.map(|v| json!(v)));
        if !grids.is_empty() {
            top.insert("grids".into(), Value::Object(grids));
        }
        Value::Object(top)
    }

    fn resolve(&self) -> Result<RunConfig, CliError> {
        if let Some(name) = &self.experiment {
            name.parse::<Experiment>().map_err(CliError::Config)?;
        }
        let mut v = config::defaults();
        if let Some(p) = &self.preset {
            config::merge(&mut v, &config::preset(p)?);
        }
        if let Some(path) = &self.config {
            config::merge(&mut v, &config::load_layer(path)?);
        }
        config::merge(&mut v, &self.flag_layer());
        RunConfig::from_value(v)
    }
}

fn print_list() {
    println!("experiments:");
    for e in Experiment::ALL {
        println!("  {:<16} {}", e.name(), e.describe());
    }
    println!("presets:");
    for (name, what) in PRESETS {
        println!("  {name:<16} {what}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match cli.command {
        _ if cli.list => {
            print_list();
            return ExitCode::SUCCESS;
        }
        Some(Command::List) => {
            print_list();
            return ExitCode::SUCCESS;
        }
        Some(Command::Run(a)) => a,
        None => {
            eprintln!("nothing to do; try `chirpaddr list` or `chirpaddr run --help`");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = args.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(2);
        }
    }
    let result = args.resolve().and_then(|cfg| {
        eprintln!("running {} → {}", cfg.experiment, cfg.output_dir.display());
        let start = Instant::now();
        let report = run(&cfg)?;
        Ok((report, start.elapsed().as_secs_f64()))
    });
    match result {
        Ok((report, elapsed)) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let mut summary = serde_json::to_value(&report).expect("report serializes");
            if !args.seedless {
                summary["elapsed_s"] = json!(elapsed);
            }
            println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
