use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use pcd_circle::io::{self, RunManifest};
use pcd_circle::metrics;
use pcd_circle::{
    sample_circle, svg, CircularDensity, DensitySpec, Direction, Error, ProjectionMode, Result, SamplerConfig,
    UnivariateProjection,
};

/// Deterministic sampling of circular densities.
#[derive(Parser)]
#[command(name = "pcd-circle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate a density by L equally weighted samples.
    Sample(SampleArgs),
    /// Compare a samples file against a density.
    Eval(EvalArgs),
    /// Tabulate a projected density and its cumulative.
    Project(ProjectArgs),
}

#[derive(Args)]
struct SampleArgs {
    /// Density spec (JSON).
    #[arg(long, required_unless_present = "from_manifest", conflicts_with = "from_manifest")]
    density: Option<PathBuf>,
    /// Repeat the run recorded in a manifest. Sampling flags are ignored.
    #[arg(long)]
    from_manifest: Option<PathBuf>,
    #[arg(short = 'L', long, default_value_t = 15)]
    count: usize,
    #[arg(short = 'M', long, default_value_t = 200)]
    iterations: usize,
    #[arg(short = 'N', long, default_value_t = 2)]
    projections: usize,
    #[arg(long, default_value_t = 0.99)]
    decay: f64,
    #[arg(long, default_value_t = 30)]
    fixed_points: usize,
    #[arg(long, default_value_t = ProjectionMode::Orthographic)]
    mode: ProjectionMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for samples.csv, trace.csv and manifest.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write an SVG plot to this path.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Use only the fixed evaluation points.
    #[arg(long)]
    no_adaptive_points: bool,
    /// Record the circular Wasserstein distance after every iteration.
    #[arg(long)]
    trace_metric: bool,
    /// Stop once the steps have vanished.
    #[arg(long)]
    early_stop: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    density: PathBuf,
    /// Number of bins for the Wasserstein distance.
    #[arg(long, default_value_t = 3600)]
    resolution: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProjectArgs {
    #[arg(long)]
    density: PathBuf,
    /// Direction angle in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    angle: f64,
    #[arg(long, default_value_t = ProjectionMode::Orthographic)]
    mode: ProjectionMode,
    #[arg(long, default_value_t = 201)]
    points: usize,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_density(path: &Path) -> Result<CircularDensity> {
    let text = fs::read_to_string(path)?;
    CircularDensity::new(DensitySpec::from_json(&text)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_sample(args: SampleArgs) -> Result<()> {
    let (density_path, spec, config) = match &args.from_manifest {
        Some(m) => {
            let manifest = RunManifest::read(m)?;
            (manifest.density_path, manifest.density, manifest.config)
        }
        None => {
            let path = args.density.clone().expect("clap requires --density");
            let spec = DensitySpec::from_json(&fs::read_to_string(&path)?)?;
            let config = SamplerConfig {
                count: args.count,
                iterations: args.iterations,
                projections: args.projections,
                decay: args.decay,
                fixed_points: args.fixed_points,
                mode: args.mode,
                seed: args.seed,
                adaptive_points: !args.no_adaptive_points,
                trace_metric: args.trace_metric,
                early_stop: args.early_stop,
                ..SamplerConfig::default()
            };
            (Some(path), spec, config)
        }
    };
    config.validate()?;
    let density = CircularDensity::new(spec.clone())?;
    if density.was_renormalized() {
        eprintln!("note: density rescaled from total mass {}", density.raw_integral());
    }

    let start = Instant::now();
    let run = sample_circle(&density, &config)?;
    let duration = start.elapsed().as_secs_f64();

    fs::create_dir_all(&args.out)?;
    let samples_path = args.out.join("samples.csv");
    let trace_path = args.out.join("trace.csv");
    io::write_samples(&samples_path, &run.samples)?;
    io::write_trace(&trace_path, &run.trace)?;
    if let Some(plot) = &args.plot {
        svg::write(plot, &density, &run.samples)?;
    }
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        density_path,
        density: spec,
        config,
        samples_path,
        trace_path,
        plot_path: args.plot.clone(),
        duration_seconds: duration,
        clamped_targets: run.diagnostics.clamped_targets,
        degenerate_updates: run.diagnostics.degenerate_updates,
    };
    fs::write(args.out.join("manifest.json"), manifest.to_json())?;
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let samples = io::read_samples(&args.samples)?;
    let density = load_density(&args.density)?;
    let w1 = metrics::circular_wasserstein(&samples, &density, args.resolution)?;
    let mut moments = Vec::new();
    for n in 1..=4 {
        let dm = metrics::trig_moment_dm(&samples, n);
        let reference = metrics::trig_moment_continuous(&density, n, 1 << 16)?;
        moments.push(json!({
            "order": n,
            "samples": [dm.re, dm.im],
            "reference": [reference.re, reference.im],
            "gap": (dm - reference).norm(),
        }));
    }
    let report = json!({
        "count": samples.len(),
        "resolution": args.resolution,
        "wasserstein": w1,
        "moments": moments,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    emit(args.out.as_deref(), &text)
}

fn cmd_project(args: ProjectArgs) -> Result<()> {
    if args.points < 2 {
        return Err(Error::Config("points must be >= 2".into()));
    }
    let density = load_density(&args.density)?;
    let projection = UnivariateProjection::new(&density, Direction::from_angle(args.angle), args.mode);
    let mut text = String::from("r,density,cdf\n");
    for row in projection.table(args.points) {
        writeln!(text, "{:.16e},{:.16e},{:.16e}", row.r, row.density, row.cdf).unwrap();
    }
    emit(args.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Project(a) => cmd_project(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
