//! `physica`: compile driving scenes into conditioning bundles.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use physica_core::compile::{compile_file, render_overlay, with_threads, CompileConfig, CompileError, Precision, MANIFEST_FORMAT};
use physica_core::noise::{linear_schedule, DEFAULT_BETA_END, DEFAULT_BETA_START, DEFAULT_STEPS};
use physica_core::png_io::write_png;
use physica_core::scenario::{overlap_warnings, parse_scenario_config};
use physica_core::scene::{parse_scene_with, parse_unvalidated, serialize_scene, validate_scene_with};

#[derive(Parser)]
#[command(name = "physica", version, about = "Condition compiler for multi-view driving scenes")]
struct Cli {
    /// JSON file mirroring the command-line flags (a manifest.json also works).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; output bytes do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Base seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a scene into flow/box/map PNGs, tensors and a manifest.
    Compile {
        scene: PathBuf,
        /// Output directory.
        #[arg(short, long)]
        out: PathBuf,
        #[command(flatten)]
        flags: CompileFlags,
    },
    /// Generate a scene from a scenario config.
    Simulate {
        scenario: PathBuf,
        /// Output scene file (stdout when omitted).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Render a map, boxes and flow overlay for one frame and camera.
    Render {
        scene: PathBuf,
        #[arg(long)]
        frame: usize,
        /// Camera name or index.
        #[arg(long)]
        camera: String,
        /// Output PNG.
        #[arg(short, long)]
        out: PathBuf,
        /// Flow opacity over the layout.
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[command(flatten)]
        flags: CompileFlags,
    },
    /// Check a scene file and list invariant violations.
    Validate { scene: PathBuf },
    /// Print the noise schedule as CSV (t, beta, alpha_bar).
    Schedule {
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: usize,
        #[arg(long, default_value_t = DEFAULT_BETA_START)]
        beta_start: f64,
        #[arg(long, default_value_t = DEFAULT_BETA_END)]
        beta_end: f64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Default)]
struct CompileFlags {
    /// Flow clamp bound in meters per frame.
    #[arg(long)]
    o_max: Option<f64>,
    /// Fourier bands per scalar.
    #[arg(long)]
    fourier_frequencies: Option<usize>,
    /// Embedding width.
    #[arg(long)]
    d_model: Option<usize>,
    /// f32 or f64.
    #[arg(long, value_parser = parse_precision)]
    precision: Option<Precision>,
    /// Also write unquantized flow tensors.
    #[arg(long)]
    write_raw_flow: bool,
    /// Tensor file with pretrained MLP weights.
    #[arg(long)]
    weights: Option<PathBuf>,
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    match s {
        "f32" => Ok(Precision::F32),
        "f64" => Ok(Precision::F64),
        _ => Err(format!("expected f32 or f64, got {s}")),
    }
}

/// Failure tagged with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn input(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 1, error: error.into() }
}

fn io(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: error.into() }
}

impl From<CompileError> for Failure {
    fn from(e: CompileError) -> Self {
        Failure { code: if e.is_io() { 2 } else { 1 }, error: e.into() }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display())).map_err(io)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display())).map_err(io)
}

/// Config file, then CLI flags on top.
fn resolve_config(cli: &Cli, flags: &CompileFlags) -> Result<CompileConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let bytes = read(path)?;
            let mut value: serde_json::Value =
                serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display())).map_err(input)?;
            if value.get("format").and_then(|f| f.as_str()) == Some(MANIFEST_FORMAT) {
                value = value.get("config").cloned().ok_or_else(|| input(anyhow!("manifest has no config")))?;
            }
            serde_json::from_value(value).with_context(|| format!("config {}", path.display())).map_err(input)?
        }
        None => CompileConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(v) = flags.o_max {
        cfg.o_max = v;
    }
    if let Some(v) = flags.fourier_frequencies {
        cfg.fourier_frequencies = v;
    }
    if let Some(v) = flags.d_model {
        cfg.d_model = v;
    }
    if let Some(v) = flags.precision {
        cfg.precision = v;
    }
    if flags.write_raw_flow {
        cfg.write_raw_flow = true;
    }
    if let Some(v) = &flags.weights {
        cfg.weights = Some(v.clone());
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Compile { scene, out, flags } => {
            let cfg = resolve_config(cli, flags)?;
            let report = compile_file(scene, out, &cfg)?;
            log::info!("wrote {} files to {}", report.manifest.files.len() + 1, out.display());
            Ok(())
        }
        Command::Simulate { scenario, out } => {
            let cfg = parse_scenario_config(&read(scenario)?).map_err(input)?;
            let scene = cfg.build(cli.seed, &Default::default()).map_err(input)?;
            for w in overlap_warnings(&scene) {
                log::warn!("frame {}: tracks {} and {} overlap", w.frame, w.first, w.second);
            }
            let bytes = serialize_scene(&scene);
            match out {
                Some(path) => write(path, &bytes),
                None => {
                    print!("{}", String::from_utf8_lossy(&bytes));
                    Ok(())
                }
            }
        }
        Command::Render { scene, frame, camera, out, alpha, flags } => {
            let cfg = resolve_config(cli, flags)?;
            let parsed = parse_scene_with(&read(scene)?, &cfg.registry()).map_err(input)?;
            let index = match camera.parse::<usize>() {
                Ok(i) => i,
                Err(_) => parsed
                    .cameras
                    .iter()
                    .position(|c| &c.name == camera)
                    .ok_or_else(|| input(anyhow!("no camera named {camera:?}")))?,
            };
            let image = render_overlay(&parsed, *frame, index, &cfg, *alpha)?;
            write_png(out, &image, &[]).with_context(|| format!("writing {}", out.display())).map_err(io)
        }
        Command::Validate { scene } => {
            let cfg = resolve_config(cli, &CompileFlags::default())?;
            let parsed = parse_unvalidated(&read(scene)?).map_err(input)?;
            let violations = validate_scene_with(&parsed, &cfg.registry());
            for v in &violations {
                println!("{:?}: {v}", v.severity());
            }
            if violations.iter().any(|v| v.is_error()) {
                return Err(input(anyhow!("{} violation(s)", violations.len())));
            }
            println!("ok: {} frames, {} cameras", parsed.frames.len(), parsed.cameras.len());
            Ok(())
        }
        Command::Schedule { steps, beta_start, beta_end, out } => {
            let sched = linear_schedule::<f64>(*steps, *beta_start, *beta_end).map_err(input)?;
            let csv = sched.to_csv();
            match out {
                Some(path) => write(path, csv.as_bytes()),
                None => {
                    print!("{csv}");
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Usage errors are input errors (exit 1); clap would use 2, which is reserved for I/O.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = cli.threads.unwrap_or(0);
    match with_threads(threads, || run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
