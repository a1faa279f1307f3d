//! Sweep CLI for the sphere-substrate Casimir calculator.
//!
//! Subcommands: `sweep`, `fig2`, `fig3`, `fig4`, `pfa-compare`,
//! `dos-profile`, `fit`. Exit codes: 0 success, 2 validation error,
//! 3 numerical failure, 4 I/O failure. When `--output` is omitted, files
//! land in `$CASIMIR_OUT_DIR` (or the working directory).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use casimir_spectral::config::{load_config, ConfigFile};
use casimir_spectral::dos::{dos_greens, dos_lorentzian};
use casimir_spectral::error::{Error, Result};
use casimir_spectral::materials::{DielectricModel, MaterialLibrary};
use casimir_spectral::modes::EnergyMethod;
use casimir_spectral::pfa::{compare_with_spectral, PfaVariant};
use casimir_spectral::sweep::{
    fig2_spec, fig3_specs, fig4_spec, fit_power_law_samples, run_sweep, write_rows, GridSpacing,
    OutputFormat, SweepRow, SweepSpec,
};
use casimir_spectral::system::SystemSpec;

#[derive(Parser)]
#[command(
    name = "casimir-sweep",
    about = "Sphere-substrate Casimir / van der Waals sweeps via the spectral representation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpacingArg {
    Linear,
    Log,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    ModeSum,
    Dos,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    IdealRetarded,
    HamakerNonretarded,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    LorentzianSum,
    GreensTrace,
}

#[derive(Args)]
struct SweepArgs {
    /// Sphere material names (comma-separated, case-insensitive)
    #[arg(long, value_delimiter = ',')]
    sphere: Vec<String>,
    /// Substrate material names (comma-separated, case-insensitive)
    #[arg(long, value_delimiter = ',')]
    substrate: Vec<String>,
    /// Sphere radii in nm (comma-separated)
    #[arg(long, value_delimiter = ',')]
    radius_nm: Vec<f64>,
    /// Smallest gap in nm
    #[arg(long)]
    z_min: Option<f64>,
    /// Largest gap in nm
    #[arg(long)]
    z_max: Option<f64>,
    /// Number of gap grid points
    #[arg(long)]
    points: Option<usize>,
    /// Gap grid spacing
    #[arg(long, value_enum)]
    spacing: Option<SpacingArg>,
    /// Energy route
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Output path (default: sweep.csv under $CASIMIR_OUT_DIR or .)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Flat key-value config file; CLI flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Ambient permittivity
    #[arg(long)]
    ambient: Option<f64>,
    /// Damping-ratio override for the DOS route
    #[arg(long)]
    damping: Option<f64>,
    /// Worker threads (0 = rayon default)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct FigArgs {
    /// Gap grid points
    #[arg(long)]
    points: Option<usize>,
    /// Energy route
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep over (z, R, sphere, substrate)
    Sweep(SweepArgs),
    /// Energy vs z/R for all sphere/substrate presets (R = 50 nm)
    Fig2(FigArgs),
    /// Force vs z for K over Al2O3 and Al over Inf, four radii
    Fig3(FigArgs),
    /// Force vs z for all metals at R = 50 nm over Al2O3 and TiO2
    Fig4(FigArgs),
    /// Compare a proximity-theorem force against the spectral force
    PfaCompare {
        #[arg(long, default_value = "Au")]
        sphere: String,
        #[arg(long, default_value = "Inf")]
        substrate: String,
        #[arg(long, default_value_t = 100.0)]
        radius_nm: f64,
        #[arg(long, default_value_t = 10.0)]
        z_nm: f64,
        #[arg(long, value_enum, default_value_t = VariantArg::IdealRetarded)]
        variant: VariantArg,
        /// Hamaker constant in eV (hamaker-nonretarded variant only)
        #[arg(long)]
        hamaker_ev: Option<f64>,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Emit a density-of-states profile as CSV (omega_ev, rho_per_ev)
    DosProfile {
        #[arg(long, default_value = "Al")]
        sphere: String,
        #[arg(long, default_value = "Inf")]
        substrate: String,
        #[arg(long, default_value_t = 50.0)]
        radius_nm: f64,
        #[arg(long, default_value_t = 5.0)]
        z_nm: f64,
        /// Damping-ratio override (defaults to the sphere's tabulated value)
        #[arg(long)]
        damping: Option<f64>,
        #[arg(long, value_enum, default_value_t = RouteArg::LorentzianSum)]
        route: RouteArg,
        #[arg(long, default_value_t = 0.0)]
        omega_min: f64,
        /// Upper edge of the omega grid in eV (default: 2 omega_p)
        #[arg(long)]
        omega_max: Option<f64>,
        #[arg(long, default_value_t = 2000)]
        points: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Least-squares power-law fit on two columns of a CSV file
    Fit {
        /// CSV file with a header line (e.g. a sweep output)
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "z_over_R")]
        x_column: String,
        #[arg(long, default_value = "energy_ev")]
        y_column: String,
        #[arg(long, default_value_t = f64::NEG_INFINITY)]
        x_min: f64,
        #[arg(long, default_value_t = f64::INFINITY)]
        x_max: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn default_output(name: &str) -> PathBuf {
    match std::env::var_os("CASIMIR_OUT_DIR") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(name),
        _ => PathBuf::from(name),
    }
}

fn with_threads<T: Send>(
    threads: Option<usize>,
    job: impl FnOnce() -> Result<T> + Send,
) -> Result<T> {
    match threads {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidGrid(format!("thread pool: {e}")))?;
            pool.install(job)
        }
        _ => job(),
    }
}

fn library_with(materials: &[(String, DielectricModel)]) -> Result<MaterialLibrary> {
    let mut library = MaterialLibrary::standard();
    for (name, model) in materials {
        library.add_user(name, *model)?;
    }
    Ok(library)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Sweep(args) => run_sweep_command(args),
        Command::Fig2(args) => run_fig(args, "fig2", |points| {
            vec![fig2_spec(points.unwrap_or(200))]
        }),
        Command::Fig3(args) => run_fig(args, "fig3", |points| fig3_specs(points.unwrap_or(81))),
        Command::Fig4(args) => {
            run_fig(args, "fig4", |points| vec![fig4_spec(points.unwrap_or(81))])
        }
        Command::PfaCompare {
            sphere,
            substrate,
            radius_nm,
            z_nm,
            variant,
            hamaker_ev,
            output,
        } => {
            let library = MaterialLibrary::standard();
            let (_, sphere_model) = library.resolve(&sphere)?;
            let (_, substrate_model) = library.resolve(&substrate)?;
            let system = SystemSpec::new(radius_nm, z_nm, *sphere_model, *substrate_model, 1.0)?;
            let variant = match variant {
                VariantArg::IdealRetarded => PfaVariant::IdealRetarded,
                VariantArg::HamakerNonretarded => PfaVariant::HamakerNonRetarded,
            };
            let report = compare_with_spectral(&system, variant, hamaker_ev)?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            match output {
                Some(path) => {
                    casimir_spectral::emit::write_atomic(&path, json.as_bytes())?;
                    eprintln!("wrote PFA comparison to {}", path.display());
                }
                None => println!("{json}"),
            }
            Ok(())
        }
        Command::DosProfile {
            sphere,
            substrate,
            radius_nm,
            z_nm,
            damping,
            route,
            omega_min,
            omega_max,
            points,
            output,
        } => {
            let library = MaterialLibrary::standard();
            let (_, sphere_model) = library.resolve(&sphere)?;
            let (_, substrate_model) = library.resolve(&substrate)?;
            let sphere_model = match (damping, sphere_model) {
                (Some(ratio), DielectricModel::Drude { omega_p_ev, .. }) => {
                    DielectricModel::drude(*omega_p_ev, ratio)?
                }
                _ => *sphere_model,
            };
            let omega_p = match sphere_model {
                DielectricModel::Drude { omega_p_ev, .. } => omega_p_ev,
                ref other => {
                    return Err(Error::UnsupportedSphereModel {
                        model: other.label(),
                    })
                }
            };
            let system = SystemSpec::new(radius_nm, z_nm, sphere_model, *substrate_model, 1.0)?;
            let decomposition = system.decomposition()?;
            let omega_max = omega_max.unwrap_or(2.0 * omega_p);
            let grid_ok = points >= 2 && omega_min >= 0.0 && omega_max > omega_min;
            if !grid_ok {
                return Err(Error::InvalidGrid(
                    "need points >= 2 and 0 <= omega_min < omega_max".into(),
                ));
            }
            let grid: Vec<f64> = (0..points)
                .map(|i| omega_min + (omega_max - omega_min) * i as f64 / (points - 1) as f64)
                .collect();
            let profile = match route {
                RouteArg::LorentzianSum => dos_lorentzian(&decomposition, &sphere_model, &grid)?,
                RouteArg::GreensTrace => dos_greens(&decomposition, &sphere_model, &grid)?,
            };
            let path = output.unwrap_or_else(|| default_output("dos_profile.csv"));
            profile.write_csv(&path)?;
            eprintln!(
                "wrote {} DOS samples ({}) to {}",
                profile.omega_ev.len(),
                match route {
                    RouteArg::LorentzianSum => "lorentzian_sum",
                    RouteArg::GreensTrace => "greens_trace",
                },
                path.display()
            );
            Ok(())
        }
        Command::Fit {
            input,
            x_column,
            y_column,
            x_min,
            x_max,
        } => {
            let (xs, ys) = read_csv_columns(&input, &x_column, &y_column, x_min, x_max)?;
            let fit = fit_power_law_samples(&xs, &ys)?;
            println!(
                "slope = {:.6} +/- {:.6}\nintercept(log) = {:.6}\nresidual_rms = {:.3e}\npoints = {}",
                fit.slope, fit.slope_std_error, fit.intercept, fit.residual_rms, fit.points_used
            );
            Ok(())
        }
    }
}

fn run_sweep_command(args: SweepArgs) -> Result<()> {
    let config = match &args.config {
        Some(path) => load_config(path)?,
        None => ConfigFile::default(),
    };
    let library = library_with(&config.materials)?;

    let parse_spacing = |s: &str| -> Result<GridSpacing> {
        match s {
            "linear" => Ok(GridSpacing::Linear),
            "log" => Ok(GridSpacing::Log),
            other => Err(Error::InvalidGrid(format!("unknown spacing '{other}'"))),
        }
    };
    let parse_method = |s: &str| -> Result<EnergyMethod> {
        match s {
            "mode_sum" => Ok(EnergyMethod::ModeSum),
            "dos" => Ok(EnergyMethod::Dos),
            other => Err(Error::InvalidGrid(format!("unknown method '{other}'"))),
        }
    };
    let parse_format = |s: &str| -> Result<OutputFormat> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidGrid(format!("unknown format '{other}'"))),
        }
    };

    // CLI flags override config values; hard defaults apply last.
    let spheres = if args.sphere.is_empty() {
        config.spheres.clone().unwrap_or_default()
    } else {
        args.sphere.clone()
    };
    let substrates = if args.substrate.is_empty() {
        config.substrates.clone().unwrap_or_default()
    } else {
        args.substrate.clone()
    };
    let radii = if args.radius_nm.is_empty() {
        config.radii_nm.clone().unwrap_or_default()
    } else {
        args.radius_nm.clone()
    };
    let spacing = match args.spacing {
        Some(SpacingArg::Linear) => GridSpacing::Linear,
        Some(SpacingArg::Log) => GridSpacing::Log,
        None => match &config.spacing {
            Some(s) => parse_spacing(s)?,
            None => GridSpacing::Log,
        },
    };
    let method = match args.method {
        Some(MethodArg::ModeSum) => EnergyMethod::ModeSum,
        Some(MethodArg::Dos) => EnergyMethod::Dos,
        None => match &config.method {
            Some(m) => parse_method(m)?,
            None => EnergyMethod::ModeSum,
        },
    };
    let format = match args.format {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
        None => match &config.format {
            Some(f) => parse_format(f)?,
            None => OutputFormat::Csv,
        },
    };

    let spec = SweepSpec {
        z_min_nm: args.z_min.or(config.z_min_nm).unwrap_or(0.1),
        z_max_nm: args.z_max.or(config.z_max_nm).unwrap_or(100.0),
        points: args.points.or(config.points).unwrap_or(100),
        spacing,
        radii_nm: radii,
        spheres,
        substrates,
        ambient_epsilon: args.ambient.or(config.ambient).unwrap_or(1.0),
        method,
        damping_override: args.damping.or(config.damping),
    };

    let threads = args.threads.or(config.threads);
    let rows = with_threads(threads, || run_sweep(&spec, &library))?;

    let path = args
        .output
        .or_else(|| config.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| default_output(&format!("sweep.{}", format.extension())));
    write_rows(&rows, format, &path)?;
    eprintln!("wrote {} rows to {}", rows.len(), path.display());
    Ok(())
}

fn run_fig(
    args: FigArgs,
    name: &str,
    specs: impl Fn(Option<usize>) -> Vec<SweepSpec>,
) -> Result<()> {
    let library = MaterialLibrary::standard();
    let method = match args.method {
        Some(MethodArg::Dos) => EnergyMethod::Dos,
        _ => EnergyMethod::ModeSum,
    };
    let format = match args.format {
        Some(FormatArg::Json) => OutputFormat::Json,
        _ => OutputFormat::Csv,
    };
    let spec_list: Vec<SweepSpec> = specs(args.points)
        .into_iter()
        .map(|mut spec| {
            spec.method = method;
            spec
        })
        .collect();
    let rows = with_threads(args.threads, || {
        let mut rows: Vec<SweepRow> = Vec::new();
        for spec in &spec_list {
            rows.extend(run_sweep(spec, &library)?);
        }
        Ok(rows)
    })?;
    let path = args
        .output
        .unwrap_or_else(|| default_output(&format!("{name}.{}", format.extension())));
    write_rows(&rows, format, &path)?;
    eprintln!("wrote {} rows to {}", rows.len(), path.display());
    Ok(())
}

fn read_csv_columns(
    path: &PathBuf,
    x_column: &str,
    y_column: &str,
    x_min: f64,
    x_max: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidGrid("empty CSV file".into()))?;
    let columns: Vec<&str> = header.split(',').collect();
    let find = |name: &str| -> Result<usize> {
        columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    };
    let xi = find(x_column)?;
    let yi = find(y_column)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (line_no, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |idx: usize| -> Result<f64> {
            fields.get(idx).and_then(|v| v.parse().ok()).ok_or_else(|| {
                Error::InvalidGrid(format!(
                    "row {}: cannot read a number from column {}",
                    line_no + 2,
                    idx
                ))
            })
        };
        let x = parse(xi)?;
        if x < x_min || x > x_max {
            continue;
        }
        xs.push(x);
        ys.push(parse(yi)?);
    }
    Ok((xs, ys))
}
