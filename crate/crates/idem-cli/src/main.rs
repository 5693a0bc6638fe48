//! Command-line front end for the idem library.
//!
//! Subcommands map one-to-one onto library modules: `metric` evaluates a
//! pair once, `sweep` walks a misalignment lattice, `register` refines a
//! pose, `degrade` applies one corruption to a file, `sensitivity` runs
//! the Monte Carlo noise study, and `reproduce` executes an experiment
//! manifest. Commands that produce files write them under `--out-dir`
//! together with a `run-metadata.json` recording version, seed, and
//! parameters (no timestamps, so reruns are byte-identical).
//!
//! Exit codes: 0 success, 1 manifest expectation failures, 2 I/O or parse
//! problems, 3 invalid arguments or preconditions.

use clap::{Args, Parser, Subcommand};
use idem::degrade::{DegradationSpec, KeepSide};
use idem::entropy::EntropyParams;
use idem::io::{load_cloud, save_cloud};
use idem::manifest::{
    load_manifest, run_manifest, run_manifest_par, write_run_metadata, write_table, ManifestRun,
    ScenarioStatus,
};
use idem::register::{
    register, write_trace_csv, write_transform_json, Optimizer, PoseRoi, RegistrationConfig,
};
use idem::sensitivity::{run_sensitivity, write_report_csv};
use idem::sweep::{
    export_grid, export_image, run_sweep, summarize, Axis, MetricKind, SweepGrid, SweepMode,
    SweepSpec,
};
use idem::{Error, Point3d, PointCloudD, RigidTransformD};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(name = "idem", version, about = "Differential-entropy point cloud alignment toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every randomized operation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads; also runs manifest scenarios in parallel. 0 keeps
    /// scenarios sequential with the default thread pool.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Suppress progress output; file outputs and errors are unaffected.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate q_tot and the baseline metrics for a pair at identity pose.
    Metric(MetricArgs),
    /// Evaluate metrics over a translation or rotation lattice.
    Sweep(SweepArgs),
    /// Refine the moving cloud's pose by minimizing q_tot.
    Register(RegisterArgs),
    /// Apply one degradation to a cloud file.
    Degrade(DegradeArgs),
    /// Monte Carlo sensitivity of q_tot to Gaussian perturbation.
    Sensitivity(SensitivityArgs),
    /// Run an experiment manifest and check its expectations.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct MetricArgs {
    /// Fixed (reference) cloud file.
    fixed: PathBuf,
    /// Moving cloud file.
    moving: PathBuf,

    /// Neighborhood radius as a multiple of the pair's weighted r4th.
    #[arg(long, default_value_t = 1.0)]
    a: f64,

    /// Explicit neighborhood radius, overriding the r4th rule.
    #[arg(long)]
    radius: Option<f64>,

    /// Also write metric.json and run metadata here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    fixed: PathBuf,
    moving: PathBuf,

    /// translate-axis | translate-plane | translate-volume | rotate-axis |
    /// rotate-plane | rotate-volume.
    #[arg(long, default_value = "translate-plane")]
    mode: String,

    /// Swept axes, e.g. "x", "xy", "xyz"; one letter per mode arity.
    #[arg(long, default_value = "xy")]
    axes: String,

    /// Half-extent of the lattice (length units, or degrees for rotations).
    #[arg(long, default_value_t = 5.0)]
    range: f64,

    #[arg(long, default_value_t = 1.0)]
    step: f64,

    #[arg(long, default_value_t = 1.0)]
    a: f64,

    /// Metrics to evaluate: qtot, rmse-12, rmse-21, chamfer, hausdorff.
    #[arg(long, value_delimiter = ',', default_values_t =
        MetricKind::ALL.map(|m| m.name().to_string()))]
    metrics: Vec<String>,

    /// Output directory for grids, images, and summary.json.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RegisterArgs {
    fixed: PathBuf,
    moving: PathBuf,

    #[arg(long, default_value_t = 1.0)]
    a: f64,

    /// pattern | nelder-mead.
    #[arg(long, default_value = "pattern")]
    optimizer: String,

    /// Initial pose "tx,ty,tz,rx,ry,rz" (rotations in degrees about the
    /// moving centroid); default identity.
    #[arg(long)]
    start: Option<String>,

    /// Symmetric translation bound of the search region; requires
    /// --roi-rotation. Without both, the region is derived by axis sweeps.
    #[arg(long)]
    roi_translation: Option<f64>,

    /// Symmetric rotation bound of the search region in degrees.
    #[arg(long)]
    roi_rotation: Option<f64>,

    #[arg(long, default_value_t = 1000)]
    max_iters: usize,

    /// Output directory for transform.json and trace.csv.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct DegradeArgs {
    /// Input cloud file.
    #[arg(long = "in")]
    input: PathBuf,

    /// Output cloud file; format follows the extension.
    #[arg(long)]
    out: PathBuf,

    /// downsample | bbox-noise | holes | partial-crop | gaussian-perturb.
    #[arg(long)]
    kind: String,

    /// Surviving fraction for downsample.
    #[arg(long)]
    fraction: Option<f64>,

    /// Added-point percentage for bbox-noise.
    #[arg(long)]
    percent: Option<f64>,

    /// Hole count for holes.
    #[arg(long)]
    seeds: Option<usize>,

    /// Points removed per hole.
    #[arg(long)]
    neighbors_per_seed: Option<usize>,

    /// Crop plane normal "x,y,z" for partial-crop.
    #[arg(long)]
    normal: Option<String>,

    /// Crop plane offset along the normal.
    #[arg(long)]
    offset: Option<f64>,

    /// below | above: which side of the crop plane survives.
    #[arg(long)]
    keep: Option<String>,

    /// Displacement standard deviation for gaussian-perturb.
    #[arg(long)]
    sigma: Option<f64>,
}

#[derive(Args)]
struct SensitivityArgs {
    /// Reference cloud file.
    cloud: PathBuf,

    /// Noise levels to test.
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.02, 0.05, 0.1])]
    sigma: Vec<f64>,

    #[arg(long, default_value_t = 200)]
    trials: usize,

    /// Output directory for sensitivity.csv.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Manifest file; scenario paths resolve against its directory.
    manifest: PathBuf,

    /// Overrides the manifest's own out_dir.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }

    let outcome = match &cli.command {
        Command::Metric(args) => cmd_metric(&cli, args),
        Command::Sweep(args) => cmd_sweep(&cli, args),
        Command::Register(args) => cmd_register(&cli, args),
        Command::Degrade(args) => cmd_degrade(&cli, args),
        Command::Sensitivity(args) => cmd_sensitivity(&cli, args),
        Command::Reproduce(args) => cmd_reproduce(&cli, args),
    };

    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for problems with the outside world, 3 for problems with the request.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::Parse { .. } | Error::Unsupported { .. } => 2,
        Error::Validation(_) | Error::NoRoi(_) | Error::PreAlignmentRequired(_) => 3,
    }
}

/// Writes `run-metadata.json` describing a command invocation.
fn write_metadata(
    dir: &Path,
    seed: u64,
    command: &str,
    parameters: serde_json::Value,
) -> idem::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let doc = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": seed,
        "parameters": parameters,
    });
    let path = dir.join("run-metadata.json");
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap())
        .map_err(|e| Error::io(&path, e))
}

fn load_pair(fixed: &Path, moving: &Path) -> idem::Result<(PointCloudD, PointCloudD)> {
    Ok((load_cloud(fixed)?, load_cloud(moving)?))
}

fn parse_floats<const N: usize>(text: &str, what: &str) -> idem::Result<[f64; N]> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != N {
        return Err(Error::validation(format!(
            "{what} needs {N} comma-separated numbers, got {}",
            parts.len()
        )));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::validation(format!("{what}: '{part}' is not a number")))?;
    }
    Ok(out)
}

fn cmd_metric(cli: &Cli, args: &MetricArgs) -> idem::Result<ExitCode> {
    let (fixed, moving) = load_pair(&args.fixed, &args.moving)?;
    let params = match args.radius {
        Some(r) => EntropyParams::with_radius(args.a, r)?,
        None => EntropyParams::for_pair(&fixed, &moving, args.a)?,
    };
    let report = idem::baselines::evaluate_pair(&fixed, &moving, &params)?;

    let doc = serde_json::json!({
        "fixed": { "file": args.fixed.display().to_string(), "points": fixed.len() },
        "moving": { "file": args.moving.display().to_string(), "points": moving.len() },
        "report": report,
    });
    let text = serde_json::to_string_pretty(&doc).unwrap();
    println!("{text}");

    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("metric.json");
        std::fs::write(&path, &text).map_err(|e| Error::io(&path, e))?;
        write_metadata(
            dir,
            cli.seed,
            "metric",
            serde_json::json!({ "a": args.a, "radius": args.radius }),
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Writes a 2D plane of a volume grid as a matrix CSV, the same layout
/// `export_grid` uses for plane sweeps.
fn write_slice_csv(
    grid: &SweepGrid<f64>,
    metric: MetricKind,
    axis_a: usize,
    axis_b: usize,
    path: &Path,
) -> idem::Result<()> {
    let values = grid.slice_through_zero(metric, axis_a, axis_b)?;
    let cols = grid.dims[axis_b];
    let mut out = format!(
        "{}\\{}",
        grid.spec.axes[axis_a].name(),
        grid.spec.axes[axis_b].name()
    );
    for c in &grid.coords[axis_b] {
        out.push_str(&format!(",{c}"));
    }
    out.push('\n');
    for (i, row) in values.chunks(cols).enumerate() {
        out.push_str(&format!("{}", grid.coords[axis_a][i]));
        for v in row {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn cmd_sweep(cli: &Cli, args: &SweepArgs) -> idem::Result<ExitCode> {
    let mode = SweepMode::from_str(&args.mode)?;
    let metrics = args
        .metrics
        .iter()
        .map(|m| MetricKind::from_str(m))
        .collect::<idem::Result<Vec<_>>>()?;
    let spec = SweepSpec {
        mode,
        axes: Axis::parse_list(&args.axes)?,
        range: args.range,
        step: args.step,
        metrics,
        a: args.a,
    };

    let (fixed, moving) = load_pair(&args.fixed, &args.moving)?;
    let grid = run_sweep(&fixed, &moving, &spec)?;

    let dir = &args.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for metric in &spec.metrics {
        export_grid(&grid, *metric, dir.join(format!("{metric}.csv")))?;
        if grid.dims.len() <= 2 {
            export_image(&grid, *metric, dir.join(format!("{metric}.pgm")))?;
        } else {
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                let name = format!(
                    "{metric}-slice-{}{}.csv",
                    spec.axes[a].name(),
                    spec.axes[b].name()
                );
                write_slice_csv(&grid, *metric, a, b, &dir.join(name))?;
            }
        }
    }

    let summary = summarize(&grid)?;
    let path = dir.join("summary.json");
    std::fs::write(&path, serde_json::to_string_pretty(&summary).unwrap())
        .map_err(|e| Error::io(&path, e))?;
    write_metadata(
        dir,
        cli.seed,
        "sweep",
        serde_json::json!({
            "mode": mode.name(),
            "axes": args.axes,
            "range": args.range,
            "step": args.step,
            "a": args.a,
        }),
    )?;

    if !cli.quiet {
        for m in &summary.metrics {
            println!(
                "{}: argmin offset {:?}, error {:.6}",
                m.metric, m.argmin_offset, m.argmin_error
            );
        }
        println!("outputs in {}", dir.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_register(cli: &Cli, args: &RegisterArgs) -> idem::Result<ExitCode> {
    let (fixed, moving) = load_pair(&args.fixed, &args.moving)?;

    let mut config = RegistrationConfig::new(args.a);
    config.max_iters = args.max_iters;
    config.optimizer = match args.optimizer.as_str() {
        "pattern" => Optimizer::PatternSearch,
        "nelder-mead" => Optimizer::NelderMead,
        other => {
            return Err(Error::validation(format!(
                "unknown optimizer '{other}', expected pattern or nelder-mead"
            )));
        }
    };
    config.roi = match (args.roi_translation, args.roi_rotation) {
        (Some(t), Some(r)) => Some(PoseRoi::new(
            [-t, -t, -t, -r, -r, -r],
            [t, t, t, r, r, r],
        )?),
        (None, None) => None,
        _ => {
            return Err(Error::validation(
                "--roi-translation and --roi-rotation go together",
            ));
        }
    };
    if let Some(start) = &args.start {
        let p = parse_floats::<6>(start, "--start")?;
        config.initial_pose = RigidTransformD::from_pose(
            moving.centroid(),
            Point3d::new(p[0], p[1], p[2]),
            [p[3], p[4], p[5]],
        );
    }

    let result = register(&fixed, &moving, &config)?;

    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_transform_json(&result, dir.join("transform.json"))?;
        write_trace_csv(&result, dir.join("trace.csv"))?;
        write_metadata(
            dir,
            cli.seed,
            "register",
            serde_json::json!({
                "a": args.a,
                "optimizer": args.optimizer,
                "start": args.start,
                "max_iters": args.max_iters,
            }),
        )?;
    }

    if !cli.quiet {
        let (t, angles) = result.transform.to_pose(moving.centroid());
        println!(
            "q_idem {:.6} after {} iterations ({} evaluations), converged: {}",
            result.q_idem, result.iterations, result.evaluations, result.converged
        );
        println!(
            "translation ({:.4}, {:.4}, {:.4}), rotation ({:.3}, {:.3}, {:.3}) deg",
            t.x, t.y, t.z, angles[0], angles[1], angles[2]
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_degrade(cli: &Cli, args: &DegradeArgs) -> idem::Result<ExitCode> {
    fn require<T>(value: Option<T>, kind: &str, flag: &str) -> idem::Result<T> {
        value.ok_or_else(|| Error::validation(format!("{kind} needs --{flag}")))
    }

    let spec = match args.kind.as_str() {
        "downsample" => DegradationSpec::Downsample {
            fraction: require(args.fraction, "downsample", "fraction")?,
            seed: cli.seed,
        },
        "bbox-noise" => DegradationSpec::BboxNoise {
            percent: require(args.percent, "bbox-noise", "percent")?,
            seed: cli.seed,
        },
        "holes" => DegradationSpec::Holes {
            seeds: require(args.seeds, "holes", "seeds")?,
            neighbors_per_seed: require(args.neighbors_per_seed, "holes", "neighbors-per-seed")?,
            seed: cli.seed,
        },
        "partial-crop" => {
            let normal =
                parse_floats::<3>(&require(args.normal.clone(), "partial-crop", "normal")?, "--normal")?;
            let keep = match require(args.keep.as_deref(), "partial-crop", "keep")? {
                "below" => KeepSide::Below,
                "above" => KeepSide::Above,
                other => {
                    return Err(Error::validation(format!(
                        "--keep must be below or above, got '{other}'"
                    )));
                }
            };
            DegradationSpec::PartialCrop {
                normal,
                offset: require(args.offset, "partial-crop", "offset")?,
                keep,
            }
        }
        "gaussian-perturb" => DegradationSpec::GaussianPerturb {
            sigma: require(args.sigma, "gaussian-perturb", "sigma")?,
            seed: cli.seed,
        },
        other => {
            return Err(Error::validation(format!(
                "unknown degradation kind '{other}'"
            )));
        }
    };

    let cloud: PointCloudD = load_cloud(&args.input)?;
    let out = idem::degrade::apply(&cloud, &spec)?;
    save_cloud(&out, &args.out)?;
    if !cli.quiet {
        println!(
            "{} -> {} ({} -> {} points)",
            args.input.display(),
            args.out.display(),
            cloud.len(),
            out.len()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sensitivity(cli: &Cli, args: &SensitivityArgs) -> idem::Result<ExitCode> {
    let cloud: PointCloudD = load_cloud(&args.cloud)?;
    let report = run_sensitivity(&cloud, &args.sigma, args.trials, cli.seed)?;

    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_report_csv(&report, dir.join("sensitivity.csv"))?;
        write_metadata(
            dir,
            cli.seed,
            "sensitivity",
            serde_json::json!({ "sigma": args.sigma, "trials": args.trials }),
        )?;
    }

    if !cli.quiet {
        println!("sigma mean_qtot std_qtot cv negatives (r {:.6}, {} trials)", report.r, report.trials);
        for row in &report.rows {
            println!(
                "{:<8} {:>12.4} {:>10.4} {:>8.4} {}",
                row.sigma, row.mean, row.std_dev, row.cv, row.negative_samples
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_run(run: &ManifestRun, quiet: bool) {
    for o in &run.outcomes {
        if quiet && o.status != ScenarioStatus::Fail {
            continue;
        }
        println!("{:<20} {}", o.id, o.status.name());
        for failure in &o.failures {
            println!("    {failure}");
        }
    }
}

fn cmd_reproduce(cli: &Cli, args: &ReproduceArgs) -> idem::Result<ExitCode> {
    let (manifest, base) = load_manifest(&args.manifest)?;
    let run = if cli.jobs > 0 {
        run_manifest_par(&manifest, &base)?
    } else {
        run_manifest(&manifest, &base)?
    };

    let out_dir = match &args.out_dir {
        Some(dir) => dir.clone(),
        None => base.join(manifest.out_dir.as_deref().unwrap_or("results")),
    };
    write_table(&run, &out_dir)?;
    write_run_metadata(&out_dir, &manifest, cli.seed)?;

    print_run(&run, cli.quiet);
    if !cli.quiet {
        println!("table written to {}", out_dir.join("table.csv").display());
    }
    Ok(if run.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
