use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, ValueEnum};

use nonlocal::spec::{parse_grid, parse_number};
use nonlocal::{load_config, run_scan, write_table, Format, Grid, OptionValue, ScanSpec, Subcommand};

const EXIT_RUNTIME: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Parameter scans over interference, beam-splitter, Franson and chained
/// Bell models.
///
/// Every subcommand writes one row per grid point: the parameter values,
/// then the outputs, then an `error` column that is empty unless the row
/// failed. Rows that fail do not stop the scan, but the exit status is 1.
#[derive(Parser)]
#[command(name = "nonlocal", version)]
enum Cli {
    /// Single-photon interferometer.
    ///
    /// Options: model = monochromatic | wavepacket | local, shape =
    /// rectangular | gaussian. Parameters: phi (monochromatic, local);
    /// tau, omega0, bandwidth, ratio_threshold (wavepacket). Outputs:
    /// p_plus, p_minus, p_double, p_null, total, plus center_phase and
    /// regime for wavepackets.
    Interf(Common),
    /// Output-splitter unitarity.
    ///
    /// Options: matrix = symmetric | hadamard | pi_quarter | identity |
    /// custom. Parameters: phi, long_weight and, for custom, a11_re … a22_im.
    /// Outputs: p_plus, p_minus, total, excess, residual, norm_long,
    /// norm_short, valid.
    Unitarity(Common),
    /// Two-photon Franson arrangement.
    ///
    /// Options: model = physical | ideal, shape, post_selection (default
    /// true), window. Parameters: pump_center, pump_bandwidth,
    /// offset_center, offset_bandwidth, tau_a, tau_b, ratio_threshold
    /// (physical); phi, visibility (ideal).
    Franson(Common),
    /// Chained Bell expression I(N, Θ).
    ///
    /// Options: model = quantum | pr_box | suppressed | lhv. Parameters: n,
    /// theta (default π), visibility (quantum). Outputs: i_value,
    /// closed_form, classification, strategy.
    Chained(Common),
    /// Biased-marginal bound and the chain length that violates it.
    ///
    /// Options: mode = falsify | bound | leggett. Parameters: d, theta,
    /// n_cap (falsify); n, d, theta (bound); bias, n_cap (leggett).
    Extensions(Common),
    /// Seeded Monte Carlo detection events.
    ///
    /// Options: model = quantum | local. Parameters: phi, runs. Row k draws
    /// from stream k of the seed. Outputs: plus, minus, double, null,
    /// double_fraction, null_fraction.
    Sample(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// TOML scan file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Grid for one parameter: `name=start:stop:count` or `name=v1,v2,…`.
    /// Numbers accept a `pi` factor, e.g. `pi/4`.
    #[arg(long, value_name = "NAME=GRID")]
    grid: Vec<String>,
    /// Fixed parameter value, `name=value`.
    #[arg(long, value_name = "NAME=VALUE")]
    param: Vec<String>,
    /// Model switch, `key=value`.
    #[arg(long, value_name = "KEY=VALUE")]
    option: Vec<String>,
    /// Absolute tolerance for spectral integration and validity checks.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Random seed, required by `sample`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Print the effective scan file and exit.
    #[arg(long)]
    dump_spec: bool,
}

fn split_pair<'a>(flag: &str, s: &'a str) -> Result<(&'a str, &'a str), String> {
    s.split_once('=').ok_or_else(|| format!("--{flag} expects NAME=VALUE, got `{s}`"))
}

fn build_spec(sub: Subcommand, args: &Common) -> Result<ScanSpec, String> {
    let mut spec = match &args.config {
        Some(path) => {
            let spec = load_config(path).map_err(|e| e.to_string())?;
            if spec.subcommand != sub {
                return Err(format!("{} describes a `{}` scan, not `{sub}`", path.display(), spec.subcommand));
            }
            spec
        }
        None => ScanSpec::new(sub),
    };
    for g in &args.grid {
        let (name, value) = split_pair("grid", g)?;
        let grid = parse_grid(value).ok_or_else(|| format!("cannot parse grid `{value}` for `{name}`"))?;
        spec.grid.insert(name.to_string(), grid);
    }
    for p in &args.param {
        let (name, value) = split_pair("param", p)?;
        let v = parse_number(value).ok_or_else(|| format!("cannot parse number `{value}` for `{name}`"))?;
        spec.grid.insert(name.to_string(), Grid::Values(vec![v]));
    }
    for o in &args.option {
        let (key, value) = split_pair("option", o)?;
        spec.options.insert(key.to_string(), OptionValue::parse(value));
    }
    if let Some(t) = args.tolerance {
        spec.tolerance = t;
    }
    if let Some(path) = &args.output {
        spec.output.path = Some(path.clone());
    }
    if let Some(f) = args.format {
        spec.output.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    if let Some(seed) = args.seed {
        spec.seed = Some(seed);
    }
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn main() -> ExitCode {
    let (sub, args) = match Cli::parse() {
        Cli::Interf(a) => (Subcommand::Interf, a),
        Cli::Unitarity(a) => (Subcommand::Unitarity, a),
        Cli::Franson(a) => (Subcommand::Franson, a),
        Cli::Chained(a) => (Subcommand::Chained, a),
        Cli::Extensions(a) => (Subcommand::Extensions, a),
        Cli::Sample(a) => (Subcommand::Sample, a),
    };
    let spec = match build_spec(sub, &args) {
        Ok(s) => s,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if args.dump_spec {
        return match spec.to_toml() {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_RUNTIME)
            }
        };
    }
    let table = match run_scan(&spec, args.threads) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    let written = match &spec.output.path {
        Some(path) => File::create(path)
            .map_err(nonlocal::ScanError::from)
            .and_then(|f| write_table(&spec, &table, BufWriter::new(f))),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_table(&spec, &table, &mut lock).and_then(|()| lock.flush().map_err(Into::into))
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_RUNTIME);
    }
    if table.failures > 0 {
        eprintln!("error: {} of {} rows failed; see the `error` column", table.failures, table.rows.len());
        return ExitCode::from(EXIT_RUNTIME);
    }
    ExitCode::SUCCESS
}
