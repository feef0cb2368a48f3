use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use floquet_core::observables::{
    lambda_infty_profile, mp_bin_probabilities, mp_density, stationary_purities, FitOptions,
    OtocSpec, MP_BINS,
};
use floquet_core::runner::{
    self, fit_report, fit_series, format_float, parse_series_csv, write_atomic, ExperimentConfig,
    OutputFormat, SweepConfig,
};
use floquet_core::{Axis, Boundary, CircuitKind, Error, Result};

#[derive(Parser)]
#[command(name = "floquet", version, about = "Floquet circuit relaxation experiments")]
struct Cli {
    /// Worker threads for ensemble averaging (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `ensemble.master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut config = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            config.ensemble.master_seed = seed;
        }
        if let Some(out) = &self.out {
            config.output.path = Some(out.clone());
        }
        if let Some(f) = self.format {
            config.output.format = f.into();
        }
        Ok(config)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    /// Marchenko-Pastur density and bin probabilities.
    Mp,
    /// Mean ordered eigenvalues of random states.
    Lambda,
    /// Random-state purities of orders 2, 3, 4.
    Purities,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Simulate(RunArgs),
    /// Run every combination of a sweep config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the sweep output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Two-phase fit of the purity series in a results CSV.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Qubit count of the run.
        #[arg(long)]
        n: usize,
        /// Initial states averaged in the run.
        #[arg(long, default_value_t = 1)]
        num_states: usize,
        #[arg(long, value_parser = parse_kind)]
        kind: Option<CircuitKind>,
        #[arg(long, value_parser = parse_boundary)]
        boundary: Option<Boundary>,
        #[arg(long, default_value_t = 2)]
        order: u32,
        #[arg(long, default_value_t = 2)]
        t_min: usize,
        #[arg(long)]
        t_max: Option<usize>,
        #[arg(long, default_value_t = 3)]
        min_segment: usize,
        /// End the window below this many random-state standard deviations.
        #[arg(long, default_value_t = 0.0)]
        floor_sigmas: f64,
        /// `json` for machine-readable output; anything else prints text.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Random-state reference tables.
    Reference {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        what: Table,
        #[arg(long, default_value_t = MP_BINS)]
        bins: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// OTOC series for the circuit and ensemble of a config.
    Otoc {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        j: usize,
        #[arg(long, value_parser = parse_axis)]
        alpha: Axis,
        /// Site of the σ^α perturbation.
        #[arg(long, default_value_t = 1)]
        site: usize,
    },
}

fn parse_axis(s: &str) -> std::result::Result<Axis, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_kind(s: &str) -> std::result::Result<CircuitKind, String> {
    match s {
        "S" => Ok(CircuitKind::S),
        "BW" => Ok(CircuitKind::BW),
        "LayeredAB" => Ok(CircuitKind::LayeredAB),
        _ => Err(format!("unknown circuit kind {s:?}")),
    }
}

fn parse_boundary(s: &str) -> std::result::Result<Boundary, String> {
    match s {
        "OBC" => Ok(Boundary::OBC),
        "PBC" => Ok(Boundary::PBC),
        _ => Err(format!("unknown boundary {s:?}")),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn simulate(config: &ExperimentConfig) -> Result<()> {
    let record = runner::execute(config)?;
    eprintln!(
        "{} n={} t_max={} states={} hash={} wall={:.2}s",
        config.circuit.label(),
        config.circuit.n,
        config.t_max,
        config.ensemble.num_states,
        &record.config_hash[..12],
        record.wall_clock_secs
    );
    if config.output.path.is_none() {
        match config.output.format {
            OutputFormat::Csv => print!("{}", runner::to_csv(&record)),
            OutputFormat::Json => print!("{}", runner::to_json(&record)?),
        }
    }
    if let Some(options) = &config.observables.fit {
        let report = fit_report(&record, options)?;
        eprint!("{}", report.to_text());
    }
    Ok(())
}

fn reference(n: usize, what: Table, bins: usize) -> Result<String> {
    if n < 2 || n % 2 != 0 || n > 40 {
        return Err(Error::InvalidArgument(format!("n must be even and in 2..=40, got {n}")));
    }
    let na = 1u64 << (n / 2);
    let mut s = String::new();
    match what {
        Table::Mp => {
            if bins == 0 {
                return Err(Error::InvalidArgument("bins must be positive".into()));
            }
            s.push_str("x_lo,x_hi,x_mid,density,probability\n");
            let width = 4.0 / bins as f64;
            for (b, p) in mp_bin_probabilities(bins).iter().enumerate() {
                let lo = b as f64 * width;
                let mid = lo + width / 2.0;
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    format_float(lo),
                    format_float(lo + width),
                    format_float(mid),
                    format_float(mp_density(mid)),
                    format_float(*p)
                ));
            }
        }
        Table::Lambda => {
            s.push_str("k,lambda\n");
            for (k, l) in lambda_infty_profile(na)?.iter().enumerate() {
                s.push_str(&format!("{},{}\n", k + 1, format_float(*l)));
            }
        }
        Table::Purities => {
            let p = stationary_purities(na)?;
            s.push_str("order,value\n");
            for (order, v) in [(2, p.i2), (3, p.i3), (4, p.i4)] {
                s.push_str(&format!("{order},{}\n", format_float(v)));
            }
        }
    }
    Ok(s)
}

fn dispatch(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()
            .map_err(|e| Error::Resource(format!("cannot start thread pool: {e}")))?;
    }
    match cli.command {
        Command::Simulate(args) => simulate(&args.load()?),
        Command::Sweep { config, out, seed } => {
            let mut sweep = SweepConfig::load(&config)?;
            if let Some(out) = out {
                sweep.output_dir = out;
            }
            if let Some(seed) = seed {
                sweep.base.ensemble.master_seed = seed;
            }
            let configs = sweep.expand();
            let results = runner::sweep(&configs, rayon::current_num_threads())?;
            let mut worst: Option<Error> = None;
            for (config, result) in configs.iter().zip(results) {
                let path = config.output.path.as_ref().expect("sweep sets paths");
                match result {
                    Ok(_) => eprintln!("ok     {}", path.display()),
                    Err(e) => {
                        eprintln!("failed {}: {e}", path.display());
                        if worst.as_ref().map_or(true, |w| e.exit_code() > w.exit_code()) {
                            worst = Some(e);
                        }
                    }
                }
            }
            worst.map_or(Ok(()), Err)
        }
        Command::Fit {
            input,
            n,
            num_states,
            kind,
            boundary,
            order,
            t_min,
            t_max,
            min_segment,
            floor_sigmas,
            format,
        } => {
            let text = std::fs::read_to_string(&input).map_err(|e| Error::Io {
                path: input.display().to_string(),
                source: e,
            })?;
            let series = parse_series_csv(&text)?.purity_series(n, num_states)?;
            let options = FitOptions {
                t_min,
                t_max,
                min_segment,
                order,
                floor_sigmas,
            };
            let layout = kind.zip(boundary);
            let report = fit_series(&series, n, layout, &options)?;
            match format {
                Some(Format::Json) => println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                ),
                _ => print!("{}", report.to_text()),
            }
            Ok(())
        }
        Command::Reference { n, what, bins, out } => emit(&reference(n, what, bins)?, out.as_ref()),
        Command::Otoc { run, j, alpha, site } => {
            let mut config = run.load()?;
            config.observables = runner::Observables {
                otoc: vec![OtocSpec::new(j, alpha).at_site(site)],
                ..runner::Observables::default()
            };
            simulate(&config)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
