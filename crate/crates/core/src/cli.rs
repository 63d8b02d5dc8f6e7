//! Command-line front end.
//!
//! Exit status: 0 success, 2 configuration or argument error, 3 input
//! error, 4 data-integrity error. Progress goes to standard error; results
//! are written only under the path given by `--output`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flowviz;
use crate::geometry::{self, FlowField};
use crate::io;
use crate::jitter::{self, JitterCurve, MeasurementErrorModel};
use crate::pipeline::{self, DatasetManifest, DegradationConfig, EvalRow, EvalSummary, Variant};
use crate::plot::{self, Panel, Series, PALETTE};
use crate::sensor;
use crate::sidecar::Sidecar;

/// Environment variable consulted when `--jobs` is not given.
pub const JOBS_ENV: &str = "LAPJITTER_JOBS";

#[derive(Debug, Parser)]
#[command(
    name = "lapjitter",
    version,
    about = "Pushbroom jitter degradation simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Crop, degrade and record every image of a directory.
    Synth(SynthArgs),
    /// Degrade a single image with the parameters of one dataset index.
    DegradeOne(DegradeOneArgs),
    /// Pre-correct a synthesized dataset with simulated noisy jitter readings.
    Precorrect(PrecorrectArgs),
    /// Compute PSNR, SSIM, GMSD and spectral L1 for every pair of a manifest.
    Eval(EvalArgs),
    /// Render the pre-correction flow of a sidecar as a color-wheel PNG.
    FlowViz(FlowVizArgs),
    /// Write ideal, averaged and noisy jitter curves as CSV and PNG.
    CurvePlot(CurvePlotArgs),
}

#[derive(Debug, Args)]
pub struct Jobs {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, env = JOBS_ENV)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// TOML degradation config; built-in defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory of source images.
    #[arg(long)]
    pub input: PathBuf,
    /// Dataset directory to create.
    #[arg(long)]
    pub output: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub jobs: Jobs,
}

#[derive(Debug, Args)]
pub struct DegradeOneArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Source image; the whole frame is degraded.
    #[arg(long)]
    pub input: PathBuf,
    /// Directory receiving clean.png, degraded.png, jitter.lapj, params.json.
    #[arg(long)]
    pub output: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Dataset index whose per-image parameters are used.
    #[arg(long, default_value_t = 0)]
    pub entry: usize,
}

#[derive(Debug, Args)]
pub struct PrecorrectArgs {
    /// Dataset directory or its manifest.json.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Relative measurement error bound; the dataset config value when omitted.
    #[arg(long)]
    pub bound: Option<f64>,
    /// Measurement error seed; the dataset config value when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Border excluded from the recorded metrics.
    #[arg(long, default_value_t = 0)]
    pub margin: usize,
    #[command(flatten)]
    pub jobs: Jobs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Degraded,
    Precorrected,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Degraded => Variant::Degraded,
            VariantArg::Precorrected => Variant::Precorrected,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// manifest.json or precorrect_manifest.json.
    #[arg(long)]
    pub input: PathBuf,
    /// Directory receiving eval_<variant>.csv and eval_<variant>.json.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = VariantArg::Degraded)]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 0)]
    pub margin: usize,
    #[command(flatten)]
    pub jobs: Jobs,
}

#[derive(Debug, Args)]
pub struct SidecarInput {
    /// A .lapj sidecar, or a dataset manifest.json together with --entry.
    #[arg(long)]
    pub input: PathBuf,
    /// Manifest entry index.
    #[arg(long, default_value_t = 0)]
    pub entry: usize,
    /// Image height for sidecars that do not record one.
    #[arg(long)]
    pub height: Option<usize>,
    /// Image seed keying the measurement error; taken from the manifest
    /// entry when reading a manifest.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FlowVizArgs {
    #[command(flatten)]
    pub source: SidecarInput,
    /// Output PNG file.
    #[arg(long)]
    pub output: PathBuf,
    /// Relative measurement error applied before averaging.
    #[arg(long, default_value_t = 0.0)]
    pub bound: f64,
}

#[derive(Debug, Args)]
pub struct CurvePlotArgs {
    #[command(flatten)]
    pub source: SidecarInput,
    /// Directory receiving curves.csv and curves.png.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    pub bound: f64,
}

/// Parses `args` and runs the selected subcommand, returning the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => cmd_synth(&a),
        Command::DegradeOne(a) => cmd_degrade_one(&a),
        Command::Precorrect(a) => cmd_precorrect(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::FlowViz(a) => cmd_flow_viz(&a),
        Command::CurvePlot(a) => cmd_curve_plot(&a),
    }
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<DegradationConfig> {
    let mut cfg = match path {
        Some(p) => DegradationConfig::load(p)?,
        None => DegradationConfig::default(),
    };
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    Ok(cfg)
}

fn require_dir(path: &Path) -> Result<()> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(Error::Input(format!(
            "{} is not a directory",
            path.display()
        )))
    }
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::Input(format!("{} does not exist", path.display())))
    }
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    io::write_bytes(path, text.as_bytes())
}

pub fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let cfg = load_config(a.config.as_deref(), a.seed)?;
    require_dir(&a.input)?;
    let manifest = pipeline::synthesize_dataset(&a.input, &a.output, &cfg, a.jobs.jobs)?;
    println!("{} pairs", manifest.entries.len());
    println!(
        "manifest: {}",
        a.output.join(pipeline::MANIFEST_FILE).display()
    );
    Ok(())
}

pub fn cmd_degrade_one(a: &DegradeOneArgs) -> Result<()> {
    let cfg = load_config(a.config.as_deref(), a.seed)?;
    require_file(&a.input)?;
    let clean = sensor::quantize(&io::read_luma(&a.input)?, 16)?;
    let (params, out) = pipeline::degrade_indexed(&clean, &cfg, a.entry)?;
    create_dir(&a.output)?;
    io::write_png16(&a.output.join("clean.png"), &clean)?;
    io::write_png16(&a.output.join("degraded.png"), &out.degraded)?;
    out.sidecar().write(&a.output.join("jitter.lapj"))?;
    write_json(&a.output.join("params.json"), &params)?;
    println!(
        "degraded {}x{} image: {}",
        clean.height(),
        clean.width(),
        a.output.display()
    );
    Ok(())
}

fn dataset_manifest_path(input: &Path) -> PathBuf {
    if input.is_dir() {
        input.join(pipeline::MANIFEST_FILE)
    } else {
        input.to_path_buf()
    }
}

pub fn cmd_precorrect(a: &PrecorrectArgs) -> Result<()> {
    let manifest_path = dataset_manifest_path(&a.input);
    require_file(&manifest_path)?;
    let manifest = DatasetManifest::read(&manifest_path)?;
    let mut measurement = manifest.config.measurement;
    if let Some(b) = a.bound {
        measurement.relative_bound = b;
    }
    if let Some(s) = a.seed {
        measurement.seed = s;
    }
    measurement.validate()?;
    let dataset_dir = manifest_path.parent().unwrap_or(Path::new("."));
    let out = pipeline::precorrect_dataset(
        &manifest,
        dataset_dir,
        &measurement,
        &a.output,
        a.margin,
        a.jobs.jobs,
    )?;
    let failed = out.entries.iter().filter(|e| e.error.is_some()).count();
    println!("{} pairs pre-corrected", out.entries.len() - failed);
    if let Some(g) = out.mean_psnr_gain() {
        println!("mean PSNR gain: {g:.4} dB");
    }
    println!(
        "manifest: {}",
        a.output.join(pipeline::PRECORRECT_MANIFEST_FILE).display()
    );
    if failed > 0 {
        return Err(Error::integrity(
            &manifest_path,
            format!("{failed} of {} entries failed", out.entries.len()),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct EvalDocument<'a> {
    summary: &'a EvalSummary,
    rows: &'a [EvalRow],
}

pub fn cmd_eval(a: &EvalArgs) -> Result<()> {
    require_file(&a.input)?;
    let variant = Variant::from(a.variant);
    let pairs = pipeline::eval_pairs(&a.input, variant)?;
    let rows = pipeline::evaluate_pairs(&pairs, a.margin, a.jobs.jobs)?;
    let summary = pipeline::summarize(&rows, variant, a.margin);
    let name = match variant {
        Variant::Degraded => "degraded",
        Variant::Precorrected => "precorrected",
    };
    create_dir(&a.output)?;
    io::write_bytes(
        &a.output.join(format!("eval_{name}.csv")),
        pipeline::eval_rows_csv(&rows).as_bytes(),
    )?;
    write_json(
        &a.output.join(format!("eval_{name}.json")),
        &EvalDocument {
            summary: &summary,
            rows: &rows,
        },
    )?;
    println!(
        "{name}: {} pairs, mean PSNR {} dB, SSIM {:.6}, GMSD {:.6}",
        summary.pairs - summary.failed,
        crate::metrics::DisplayDb(summary.mean_psnr_db),
        summary.mean_ssim,
        summary.mean_gmsd
    );
    if summary.failed > 0 {
        return Err(Error::Input(format!(
            "{} of {} pairs could not be evaluated",
            summary.failed, summary.pairs
        )));
    }
    Ok(())
}

/// A sidecar plus the image seed that keys its measurement error.
struct LoadedSidecar {
    sidecar: Sidecar,
    height: usize,
    image_seed: u64,
}

fn load_sidecar(src: &SidecarInput) -> Result<LoadedSidecar> {
    require_file(&src.input)?;
    let is_manifest = src.input.extension().is_some_and(|e| e == "json");
    let (sidecar, seed) = if is_manifest {
        let manifest = DatasetManifest::read(&src.input)?;
        let entry = manifest
            .entries
            .iter()
            .find(|e| e.index == src.entry)
            .ok_or_else(|| Error::Argument(format!("manifest has no entry {}", src.entry)))?;
        let dir = src.input.parent().unwrap_or(Path::new("."));
        let path = dir.join(&entry.sidecar_path);
        if io::file_sha256(&path)? != entry.sha256.sidecar {
            return Err(Error::integrity(&path, "checksum mismatch"));
        }
        (Sidecar::read(&path)?, src.seed.unwrap_or(entry.params.seed))
    } else {
        (Sidecar::read(&src.input)?, src.seed.unwrap_or(0))
    };
    let height = match (src.height, sidecar.height) {
        (Some(h), _) if h > 0 => h,
        (_, h) if h > 0 => h,
        _ => {
            return Err(Error::Argument(
                "sidecar records no image height; pass --height".into(),
            ))
        }
    };
    Ok(LoadedSidecar {
        sidecar,
        height,
        image_seed: seed,
    })
}

/// Flow that pre-correction applies: the negated mean of the (optionally
/// noisy) subdivision maps.
pub fn correction_flow(
    sidecar: &Sidecar,
    height: usize,
    image_seed: u64,
    bound: f64,
) -> Result<FlowField> {
    let maps = if bound > 0.0 {
        let model = MeasurementErrorModel::new(bound, 0)?;
        pipeline::noisy_maps(&sidecar.records, height, image_seed, &model)?
    } else {
        pipeline::maps_from_curves(&sidecar.records, height)?
    };
    Ok(geometry::flow_from_noisy_map(&geometry::mean_flow(&maps)?))
}

pub fn cmd_flow_viz(a: &FlowVizArgs) -> Result<()> {
    MeasurementErrorModel::new(a.bound, 0)?;
    let loaded = load_sidecar(&a.source)?;
    let flow = correction_flow(&loaded.sidecar, loaded.height, loaded.image_seed, a.bound)?;
    if let Some(dir) = a.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    io::write_rgb_png(&a.output, &flowviz::render_flow(&flow))?;
    println!("flow: {}", a.output.display());
    Ok(())
}

/// The eight series written by `curve-plot`, in CSV column order.
pub struct CurveSeries {
    pub ideal: JitterCurve,
    pub cdsm: JitterCurve,
    pub noisy: JitterCurve,
    pub cdsm_noisy: JitterCurve,
}

pub const CURVE_CSV_HEADER: &str = "column,roll_ideal,roll_cdsm,roll_noisy,roll_cdsm_noisy,\
pitch_ideal,pitch_cdsm,pitch_noisy,pitch_cdsm_noisy";

/// Ideal (subdivision 0), averaged, single noisy and averaged noisy curves
/// for both directions.
pub fn curve_series(
    sidecar: &Sidecar,
    image_seed: u64,
    bound: f64,
) -> Result<(CurveSeries, CurveSeries)> {
    let model = MeasurementErrorModel::new(bound, 0)?;
    let (roll_model, pitch_model) = pipeline::measurement_models(image_seed, &model);
    let build = |curves: Vec<JitterCurve>, model: &MeasurementErrorModel| -> Result<CurveSeries> {
        let noisy = jitter::noisy_subdivision_curves(&curves, model)?;
        Ok(CurveSeries {
            ideal: curves[0].clone(),
            cdsm: jitter::average_curves(&curves)?,
            noisy: noisy[0].clone(),
            cdsm_noisy: jitter::average_curves(&noisy)?,
        })
    };
    let rolls = sidecar.records.iter().map(|r| r.roll.clone()).collect();
    let pitches = sidecar.records.iter().map(|r| r.pitch.clone()).collect();
    Ok((build(rolls, &roll_model)?, build(pitches, &pitch_model)?))
}

pub fn curves_csv(roll: &CurveSeries, pitch: &CurveSeries) -> String {
    let mut s = String::from(CURVE_CSV_HEADER);
    s.push('\n');
    for c in 0..roll.ideal.width() {
        let _ = writeln!(
            s,
            "{c},{},{},{},{},{},{},{},{}",
            roll.ideal.samples[c],
            roll.cdsm.samples[c],
            roll.noisy.samples[c],
            roll.cdsm_noisy.samples[c],
            pitch.ideal.samples[c],
            pitch.cdsm.samples[c],
            pitch.noisy.samples[c],
            pitch.cdsm_noisy.samples[c],
        );
    }
    s
}

fn panel<'a>(title: &'a str, s: &'a CurveSeries) -> Panel<'a> {
    let labels = ["ideal", "cdsm", "noisy", "cdsm noisy"];
    let curves = [&s.ideal, &s.cdsm, &s.noisy, &s.cdsm_noisy];
    Panel {
        title,
        series: labels
            .iter()
            .zip(curves)
            .zip(PALETTE)
            .map(|((label, c), color)| Series {
                label,
                color,
                values: &c.samples,
            })
            .collect(),
    }
}

pub fn cmd_curve_plot(a: &CurvePlotArgs) -> Result<()> {
    MeasurementErrorModel::new(a.bound, 0)?;
    let loaded = load_sidecar(&a.source)?;
    let (roll, pitch) = curve_series(&loaded.sidecar, loaded.image_seed, a.bound)?;
    create_dir(&a.output)?;
    io::write_bytes(
        &a.output.join("curves.csv"),
        curves_csv(&roll, &pitch).as_bytes(),
    )?;
    let width = (loaded.sidecar.width() as u32).clamp(320, 1280);
    let png = plot::render_panels(
        &[panel("roll (px)", &roll), panel("pitch (px)", &pitch)],
        width,
        240,
    );
    io::write_rgb_png(&a.output.join("curves.png"), &png)?;
    println!("curves: {}", a.output.display());
    Ok(())
}
