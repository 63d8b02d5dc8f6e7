//! Dataset synthesis, batch pre-correction and batch evaluation.
//!
//! Output layout of [`synthesize_dataset`]:
//!
//! ```text
//! <out>/manifest.json
//! <out>/clean/000000.png      16-bit grayscale crop
//! <out>/degraded/000000.png   16-bit grayscale degraded crop
//! <out>/jitter/000000.lapj    ideal subdivision curves (sidecar format)
//! ```
//!
//! Every random draw is keyed by the master seed and the global crop index,
//! so outputs are byte-identical regardless of thread count.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, BoundaryPolicy, FlowField};
use crate::image::Image;
use crate::io;
use crate::jitter::{
    self, Direction, MeasurementErrorModel, SamplingGrid, SinusoidComponent, SinusoidSet,
};
use crate::metrics::{self, MetricReport};
use crate::seed;
use crate::sensor::{self, GammaConfig, NoiseConfig};
use crate::sidecar::{CurvePair, Sidecar};

pub const PIPELINE_VERSION: &str = "1";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const PRECORRECT_MANIFEST_FILE: &str = "precorrect_manifest.json";

const SALT_PARAMS: u64 = 1;
const SALT_NOISE: u64 = 2;
const SALT_MEASURE_ROLL: u64 = 3;
const SALT_MEASURE_PITCH: u64 = 4;

/// Gaussian multiplier applied to amplitudes or frequencies of one image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VibrationFactor {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CropSize {
    pub width: usize,
    pub height: usize,
}

/// Full degradation recipe. Field names are the config-file keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DegradationConfig {
    pub tau_s: f64,
    #[serde(rename = "M")]
    pub subdivisions: usize,
    pub master_seed: u64,
    pub degrade_boundary: BoundaryPolicy,
    pub precorrect_boundary: BoundaryPolicy,
    pub gamma: GammaConfig,
    pub noise: NoiseConfig,
    pub measurement: MeasurementErrorModel,
    pub amp_vibration: VibrationFactor,
    pub freq_vibration: VibrationFactor,
    pub crop: CropSize,
    pub roll_sinusoids: SinusoidSet,
    pub pitch_sinusoids: SinusoidSet,
}

/// The four main jitter components: frequencies paired index-wise with
/// roll and pitch amplitudes, zero phase (phases are drawn per image).
pub fn default_sinusoids() -> (SinusoidSet, SinusoidSet) {
    const FREQS: [f64; 4] = [1000.0, 2000.0, 3000.0, 4000.0];
    const ROLL: [f64; 4] = [4.0, 1.5, 1.0, 0.5];
    const PITCH: [f64; 4] = [1.0, 0.5, 0.3, 0.2];
    let build = |amps: &[f64; 4]| {
        SinusoidSet::new(
            amps.iter()
                .zip(FREQS)
                .map(|(&a, f)| SinusoidComponent::new(a, f, 0.0).expect("valid constants"))
                .collect(),
        )
    };
    (build(&ROLL), build(&PITCH))
}

impl Default for DegradationConfig {
    fn default() -> Self {
        let (roll, pitch) = default_sinusoids();
        Self {
            tau_s: 3.54e-5,
            subdivisions: 6,
            master_seed: 0,
            degrade_boundary: BoundaryPolicy::ClampEdge,
            precorrect_boundary: BoundaryPolicy::ZeroFill,
            gamma: GammaConfig::default(),
            noise: NoiseConfig::default(),
            measurement: MeasurementErrorModel::default(),
            amp_vibration: VibrationFactor {
                mean: 1.0,
                std: 0.1,
            },
            freq_vibration: VibrationFactor {
                mean: 1.0,
                std: 0.01,
            },
            crop: CropSize {
                width: 640,
                height: 480,
            },
            roll_sinusoids: roll,
            pitch_sinusoids: pitch,
        }
    }
}

impl DegradationConfig {
    /// Zero jitter amplitude and no sensor noise: the pipeline reduces to a
    /// gamma round trip.
    pub fn identity() -> Self {
        let zero = |set: &SinusoidSet| {
            SinusoidSet::new(
                set.components()
                    .iter()
                    .map(|c| SinusoidComponent::new(0.0, c.frequency_hz(), 0.0).unwrap())
                    .collect(),
            )
        };
        let base = Self::default();
        Self {
            roll_sinusoids: zero(&base.roll_sinusoids),
            pitch_sinusoids: zero(&base.pitch_sinusoids),
            noise: NoiseConfig::noiseless(),
            ..base
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::Config(format!("{key}: {msg}")));
        if !(self.tau_s.is_finite() && self.tau_s > 0.0) {
            return bad("tau_s", format!("must be > 0, got {}", self.tau_s));
        }
        if self.subdivisions == 0 {
            return bad("M", "must be >= 1".into());
        }
        if let Err(e) = self.gamma.validate() {
            return bad("gamma", e.to_string());
        }
        if let Err(e) = self.noise.validate() {
            return bad("noise", e.to_string());
        }
        if let Err(e) = self.measurement.validate() {
            return bad("measurement", e.to_string());
        }
        for (key, v) in [
            ("amp_vibration", self.amp_vibration),
            ("freq_vibration", self.freq_vibration),
        ] {
            if !(v.std.is_finite() && v.std >= 0.0 && v.mean.is_finite()) {
                return bad(key, format!("needs finite mean and std >= 0, got {v:?}"));
            }
        }
        if self.freq_vibration.mean <= 0.0 {
            return bad("freq_vibration", "mean must be > 0".into());
        }
        if self.crop.width == 0 || self.crop.height == 0 {
            return bad("crop", "width and height must be >= 1".into());
        }
        Ok(())
    }

    /// Parses and validates a TOML document. Error messages carry the line
    /// number of the offending key where it can be located.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate().map_err(|e| match e {
            Error::Config(msg) => {
                let key = msg.split(':').next().unwrap_or_default();
                match locate_key(text, key) {
                    Some(line) => Error::Config(format!("line {line}: {msg}")),
                    None => Error::Config(msg),
                }
            }
            other => other,
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), strip_prefix(&e))))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn grid(&self, width: usize) -> Result<SamplingGrid> {
        SamplingGrid::new(width, self.tau_s, self.subdivisions)
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

/// 1-based line of the first `key = ...` or `[key]` occurrence.
fn locate_key(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|l| {
            let t = l.trim_start();
            t.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
                || t == format!("[{key}]")
        })
        .map(|i| i + 1)
}

/// Seed of image `index`; distinct indices give distinct seeds.
pub fn image_seed(master_seed: u64, index: usize) -> u64 {
    seed::derive(master_seed, index as u64)
}

/// Randomized parameters resolved for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerImageParams {
    pub seed: u64,
    pub amplitude_factor: f64,
    pub frequency_factor: f64,
    pub rejections: u32,
    pub roll: SinusoidSet,
    pub pitch: SinusoidSet,
}

fn draw_factor(v: VibrationFactor, rng: &mut impl Rng, rejections: &mut u32) -> Result<f64> {
    let normal = Normal::new(v.mean, v.std).map_err(|e| Error::Config(e.to_string()))?;
    for _ in 0..1000 {
        let x = normal.sample(rng);
        if x > 0.0 {
            return Ok(x);
        }
        *rejections += 1;
    }
    Err(Error::Config(format!(
        "vibration factor {v:?} produced no positive draw in 1000 attempts"
    )))
}

/// Draws the vibration factors and phases for image `index`.
///
/// One amplitude factor and one frequency factor are drawn per image and
/// applied to every component of both directions; each component gets its
/// own uniform phase.
pub fn sample_per_image_params(cfg: &DegradationConfig, index: usize) -> Result<PerImageParams> {
    let seed = image_seed(cfg.master_seed, index);
    let mut rng = seed::rng(seed::derive(seed, SALT_PARAMS), 0);
    let mut rejections = 0;
    let amplitude_factor = draw_factor(cfg.amp_vibration, &mut rng, &mut rejections)?;
    let frequency_factor = draw_factor(cfg.freq_vibration, &mut rng, &mut rejections)?;
    if rejections > 0 {
        log::debug!("image {index}: {rejections} vibration draws rejected");
    }
    let mut resolve = |set: &SinusoidSet| -> Result<SinusoidSet> {
        set.components()
            .iter()
            .map(|c| {
                SinusoidComponent::new(
                    c.amplitude_px() * amplitude_factor,
                    c.frequency_hz() * frequency_factor,
                    rng.random_range(0.0..TAU),
                )
            })
            .collect::<Result<Vec<_>>>()
            .map(SinusoidSet::new)
    };
    let roll = resolve(&cfg.roll_sinusoids)?;
    let pitch = resolve(&cfg.pitch_sinusoids)?;
    Ok(PerImageParams {
        seed,
        amplitude_factor,
        frequency_factor,
        rejections,
        roll,
        pitch,
    })
}

/// Ideal roll/pitch curves of every subdivision, ordered by index.
pub fn ideal_curves(
    roll: &SinusoidSet,
    pitch: &SinusoidSet,
    grid: &SamplingGrid,
) -> Vec<CurvePair> {
    jitter::subdivision_curves(roll, Direction::Roll, grid)
        .into_iter()
        .zip(jitter::subdivision_curves(pitch, Direction::Pitch, grid))
        .map(|(r, p)| CurvePair { roll: r, pitch: p })
        .collect()
}

/// Jitter maps for each subdivision's curve pair.
pub fn maps_from_curves(curves: &[CurvePair], height: usize) -> Result<Vec<FlowField>> {
    curves
        .iter()
        .map(|c| geometry::build_jitter_map(&c.roll, &c.pitch, height))
        .collect()
}

/// Result of degrading one clean image.
#[derive(Debug, Clone)]
pub struct Degradation {
    /// Display-domain degraded image, clamped to `[0, 1]`, not quantized.
    pub degraded: Image,
    pub ideal_maps: Vec<FlowField>,
    pub curves: Vec<CurvePair>,
}

impl Degradation {
    pub fn sidecar(&self) -> Sidecar {
        Sidecar {
            height: self.degraded.height(),
            records: self.curves.clone(),
        }
    }
}

/// Inverse gamma, multi-subdivision warp, sensor noise, forward gamma.
///
/// The noise draws use `cfg.noise.seed` as given.
pub fn degrade_one(
    clean: &Image,
    roll: &SinusoidSet,
    pitch: &SinusoidSet,
    cfg: &DegradationConfig,
) -> Result<Degradation> {
    let grid = cfg.grid(clean.width())?;
    let energy = sensor::inverse_gamma(clean, &cfg.gamma)?;
    let curves = ideal_curves(roll, pitch, &grid);
    let ideal_maps = maps_from_curves(&curves, clean.height())?;
    let deformed = geometry::deform_multi_subdivision(&energy, &ideal_maps, cfg.degrade_boundary)?
        .map(|v| v.clamp(0.0, 1.0));
    let noisy = sensor::add_sensor_noise(&deformed, &cfg.noise)?.map(|v| v.clamp(0.0, 1.0));
    let degraded = sensor::forward_gamma(&noisy, &cfg.gamma)?;
    Ok(Degradation {
        degraded,
        ideal_maps,
        curves,
    })
}

/// Degrades image `index` with its resolved per-image parameters and noise
/// seed.
pub fn degrade_indexed(
    clean: &Image,
    cfg: &DegradationConfig,
    index: usize,
) -> Result<(PerImageParams, Degradation)> {
    let params = sample_per_image_params(cfg, index)?;
    let mut local = cfg.clone();
    local.noise.seed = seed::derive(seed::derive(params.seed, SALT_NOISE), cfg.noise.seed);
    let out = degrade_one(clean, &params.roll, &params.pitch, &local)?;
    Ok((params, out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    /// One in nine images goes to the test split, chosen by seed.
    pub fn for_seed(seed: u64) -> Split {
        if seed.is_multiple_of(9) {
            Split::Test
        } else {
            Split::Train
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checksums {
    pub clean: String,
    pub degraded: String,
    pub sidecar: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub index: usize,
    pub source: String,
    pub crop_top: usize,
    pub crop_left: usize,
    pub clean_path: String,
    pub degraded_path: String,
    pub sidecar_path: String,
    pub split: Split,
    pub params: PerImageParams,
    pub sha256: Checksums,
}

/// Record of a synthesized dataset. Paths are relative to the manifest's
/// directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub kind: String,
    pub pipeline_version: String,
    pub config: DegradationConfig,
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub const KIND: &'static str = "dataset";

    pub fn empty(config: DegradationConfig) -> Self {
        Self {
            kind: Self::KIND.into(),
            pipeline_version: PIPELINE_VERSION.into(),
            config,
            entries: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: Self = serde_json::from_str(&text)
            .map_err(|e| Error::integrity(path, format!("invalid manifest: {e}")))?;
        if m.kind != Self::KIND {
            return Err(Error::integrity(
                path,
                format!("not a dataset manifest (kind {:?})", m.kind),
            ));
        }
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_bytes(path, self.to_json().as_bytes())
    }

    /// Checks that every referenced file exists and matches its checksum.
    pub fn verify(&self, dir: &Path) -> Result<()> {
        self.entries.iter().try_for_each(|e| verify_entry(e, dir))
    }
}

pub fn verify_entry(entry: &ManifestEntry, dir: &Path) -> Result<()> {
    for (rel, expected) in [
        (&entry.clean_path, &entry.sha256.clean),
        (&entry.degraded_path, &entry.sha256.degraded),
        (&entry.sidecar_path, &entry.sha256.sidecar),
    ] {
        let path = dir.join(rel);
        let actual = io::file_sha256(&path)
            .map_err(|e| Error::integrity(&path, format!("unreadable: {e}")))?;
        if &actual != expected {
            return Err(Error::integrity(&path, "checksum mismatch"));
        }
    }
    Ok(())
}

/// Rebuilds the sidecar an entry was degraded with from its stored
/// parameters.
pub fn regenerate_sidecar(entry: &ManifestEntry, cfg: &DegradationConfig) -> Result<Sidecar> {
    let grid = cfg.grid(cfg.crop.width)?;
    Sidecar::new(
        cfg.crop.height,
        ideal_curves(&entry.params.roll, &entry.params.pitch, &grid),
    )
}

struct CropTask {
    index: usize,
    top: usize,
    left: usize,
}

struct Source {
    path: PathBuf,
    name: String,
    tasks: Vec<CropTask>,
}

/// Runs `f` on a pool of `jobs` threads, or the global pool when `None`.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Argument(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn plan_sources(input_dir: &Path, crop: CropSize) -> Result<Vec<Source>> {
    if !input_dir.is_dir() {
        return Err(Error::Input(format!(
            "input directory {} does not exist",
            input_dir.display()
        )));
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(input_dir)
        .map_err(|e| Error::io(input_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let mut next = 0;
    let mut sources = Vec::new();
    for path in files {
        let (h, w) = match io::probe_dimensions(&path) {
            Ok(dims) => dims,
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                continue;
            }
        };
        let mut tasks = Vec::new();
        for row in 0..h / crop.height {
            for col in 0..w / crop.width {
                tasks.push(CropTask {
                    index: next,
                    top: row * crop.height,
                    left: col * crop.width,
                });
                next += 1;
            }
        }
        if tasks.is_empty() {
            log::warn!(
                "skipping {}: {h}x{w} is smaller than one crop",
                path.display()
            );
            continue;
        }
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        sources.push(Source { path, name, tasks });
    }
    Ok(sources)
}

/// Total number of crops `input_dir` yields, without decoding pixel data.
pub fn count_crops(input_dir: &Path, crop: CropSize) -> Result<usize> {
    Ok(plan_sources(input_dir, crop)?
        .iter()
        .map(|s| s.tasks.len())
        .sum())
}

fn file_name(index: usize, ext: &str) -> String {
    format!("{index:06}.{ext}")
}

fn synthesize_crop(
    src: &Image,
    source_name: &str,
    task: &CropTask,
    cfg: &DegradationConfig,
    out: &Path,
) -> Result<ManifestEntry> {
    let crop = src.crop(task.top, task.left, cfg.crop.height, cfg.crop.width)?;
    let clean = sensor::quantize(&crop, 16)?;
    let (params, result) = degrade_indexed(&clean, cfg, task.index)?;

    let clean_path = format!("clean/{}", file_name(task.index, "png"));
    let degraded_path = format!("degraded/{}", file_name(task.index, "png"));
    let sidecar_path = format!("jitter/{}", file_name(task.index, "lapj"));

    let clean_sum = io::write_png16(&out.join(&clean_path), &clean)?;
    let degraded_sum = io::write_png16(&out.join(&degraded_path), &result.degraded)?;
    let sidecar_bytes = result.sidecar().to_bytes();
    io::write_bytes(&out.join(&sidecar_path), &sidecar_bytes)?;

    Ok(ManifestEntry {
        index: task.index,
        source: source_name.to_string(),
        crop_top: task.top,
        crop_left: task.left,
        clean_path,
        degraded_path,
        sidecar_path,
        split: Split::for_seed(params.seed),
        params,
        sha256: Checksums {
            clean: clean_sum,
            degraded: degraded_sum,
            sidecar: io::sha256_hex(&sidecar_bytes),
        },
    })
}

/// Crops every readable image in `input_dir`, degrades each crop and writes
/// pairs, sidecars and `manifest.json` into `output_dir`.
pub fn synthesize_dataset(
    input_dir: &Path,
    output_dir: &Path,
    cfg: &DegradationConfig,
    jobs: Option<usize>,
) -> Result<DatasetManifest> {
    cfg.validate()?;
    let sources = plan_sources(input_dir, cfg.crop)?;
    let total: usize = sources.iter().map(|s| s.tasks.len()).sum();
    if total == 0 {
        return Err(Error::Input(format!(
            "no usable {}x{} crops in {}",
            cfg.crop.width,
            cfg.crop.height,
            input_dir.display()
        )));
    }
    for sub in ["clean", "degraded", "jitter"] {
        let d = output_dir.join(sub);
        std::fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    }

    let mut manifest = DatasetManifest::empty(cfg.clone());
    for source in &sources {
        let image = match io::read_luma(&source.path) {
            Ok(img) => img,
            Err(e) => {
                log::warn!("skipping {}: {e}", source.path.display());
                continue;
            }
        };
        log::info!("{}: {} crops", source.name, source.tasks.len());
        let entries = with_jobs(jobs, || {
            source
                .tasks
                .par_iter()
                .map(|t| synthesize_crop(&image, &source.name, t, cfg, output_dir))
                .collect::<Result<Vec<_>>>()
        })??;
        manifest.entries.extend(entries);
    }
    if manifest.entries.is_empty() {
        return Err(Error::Input(format!(
            "no decodable images in {}",
            input_dir.display()
        )));
    }
    manifest.entries.sort_by_key(|e| e.index);
    manifest.write(&output_dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}

/// Measurement models for the roll and pitch readings of one image.
pub fn measurement_models(
    image_seed: u64,
    measurement: &MeasurementErrorModel,
) -> (MeasurementErrorModel, MeasurementErrorModel) {
    let key = |salt| seed::derive(seed::derive(image_seed, salt), measurement.seed);
    (
        measurement.with_seed(key(SALT_MEASURE_ROLL)),
        measurement.with_seed(key(SALT_MEASURE_PITCH)),
    )
}

/// Noisy subdivision maps derived from ideal curves; each subdivision and
/// direction gets independent measurement draws.
pub fn noisy_maps(
    curves: &[CurvePair],
    height: usize,
    image_seed: u64,
    measurement: &MeasurementErrorModel,
) -> Result<Vec<FlowField>> {
    let (roll_model, pitch_model) = measurement_models(image_seed, measurement);
    let rolls: Vec<_> = curves.iter().map(|c| c.roll.clone()).collect();
    let pitches: Vec<_> = curves.iter().map(|c| c.pitch.clone()).collect();
    let noisy_roll = jitter::noisy_subdivision_curves(&rolls, &roll_model)?;
    let noisy_pitch = jitter::noisy_subdivision_curves(&pitches, &pitch_model)?;
    noisy_roll
        .iter()
        .zip(&noisy_pitch)
        .map(|(r, p)| geometry::build_jitter_map(r, p, height))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecorrectEntry {
    pub index: usize,
    pub clean_path: String,
    pub degraded_path: String,
    pub precorrected_path: Option<String>,
    pub precorrected_sha256: Option<String>,
    pub degraded: Option<MetricReport>,
    pub precorrected: Option<MetricReport>,
    pub error: Option<String>,
}

impl PrecorrectEntry {
    /// PSNR improvement of the pre-corrected image over the degraded one.
    pub fn psnr_gain(&self) -> Option<f64> {
        Some(self.precorrected?.psnr_db - self.degraded?.psnr_db)
    }
}

/// Record of a batch pre-correction run. `clean_path` and `degraded_path`
/// are relative to `dataset_dir`; `precorrected_path` to this manifest's
/// directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecorrectManifest {
    pub kind: String,
    pub pipeline_version: String,
    pub dataset_dir: String,
    pub measurement: MeasurementErrorModel,
    pub margin: usize,
    pub boundary: BoundaryPolicy,
    pub entries: Vec<PrecorrectEntry>,
}

impl PrecorrectManifest {
    pub const KIND: &'static str = "precorrect";

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: Self = serde_json::from_str(&text)
            .map_err(|e| Error::integrity(path, format!("invalid manifest: {e}")))?;
        if m.kind != Self::KIND {
            return Err(Error::integrity(
                path,
                format!("not a precorrect manifest (kind {:?})", m.kind),
            ));
        }
        Ok(m)
    }

    pub fn mean_psnr_gain(&self) -> Option<f64> {
        let gains: Vec<f64> = self
            .entries
            .iter()
            .filter_map(PrecorrectEntry::psnr_gain)
            .collect();
        (!gains.is_empty()).then(|| gains.iter().sum::<f64>() / gains.len() as f64)
    }
}

fn precorrect_entry(
    entry: &ManifestEntry,
    cfg: &DegradationConfig,
    dataset_dir: &Path,
    measurement: &MeasurementErrorModel,
    output_dir: &Path,
    margin: usize,
) -> Result<(String, String, MetricReport, MetricReport)> {
    verify_entry(entry, dataset_dir)?;
    let sidecar_path = dataset_dir.join(&entry.sidecar_path);
    let sidecar = Sidecar::read(&sidecar_path)?;
    if sidecar != regenerate_sidecar(entry, cfg)? {
        return Err(Error::integrity(
            &sidecar_path,
            "stored curves differ from curves regenerated from manifest parameters",
        ));
    }
    let clean = io::read_luma(&dataset_dir.join(&entry.clean_path))?;
    let degraded = io::read_luma(&dataset_dir.join(&entry.degraded_path))?;
    let maps = noisy_maps(
        &sidecar.records,
        sidecar.height,
        entry.params.seed,
        measurement,
    )?;
    let corrected = geometry::precorrect(&degraded, &maps, cfg.precorrect_boundary)?;
    let corrected = sensor::quantize(&corrected, 16)?;

    let rel = format!("precorrected/{}", file_name(entry.index, "png"));
    let sum = io::write_png16(&output_dir.join(&rel), &corrected)?;
    let before = metrics::evaluate(&clean, &degraded, margin)?;
    let after = metrics::evaluate(&clean, &corrected, margin)?;
    Ok((rel, sum, before, after))
}

/// Pre-corrects every pair of a dataset using simulated noisy jitter
/// readings and writes `precorrect_manifest.json` with per-pair metrics.
/// Failures are recorded per entry; the batch continues.
pub fn precorrect_dataset(
    manifest: &DatasetManifest,
    dataset_dir: &Path,
    measurement: &MeasurementErrorModel,
    output_dir: &Path,
    margin: usize,
    jobs: Option<usize>,
) -> Result<PrecorrectManifest> {
    measurement.validate()?;
    let cfg = &manifest.config;
    let sub = output_dir.join("precorrected");
    std::fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
    let entries = with_jobs(jobs, || {
        manifest
            .entries
            .par_iter()
            .map(|e| {
                let mut rec = PrecorrectEntry {
                    index: e.index,
                    clean_path: e.clean_path.clone(),
                    degraded_path: e.degraded_path.clone(),
                    precorrected_path: None,
                    precorrected_sha256: None,
                    degraded: None,
                    precorrected: None,
                    error: None,
                };
                match precorrect_entry(e, cfg, dataset_dir, measurement, output_dir, margin) {
                    Ok((path, sum, before, after)) => {
                        rec.precorrected_path = Some(path);
                        rec.precorrected_sha256 = Some(sum);
                        rec.degraded = Some(before);
                        rec.precorrected = Some(after);
                    }
                    Err(err) => {
                        log::error!("entry {}: {err}", e.index);
                        rec.error = Some(err.to_string());
                    }
                }
                rec
            })
            .collect::<Vec<_>>()
    })?;
    let out = PrecorrectManifest {
        kind: PrecorrectManifest::KIND.into(),
        pipeline_version: PIPELINE_VERSION.into(),
        dataset_dir: dataset_dir.to_string_lossy().into_owned(),
        measurement: *measurement,
        margin,
        boundary: cfg.precorrect_boundary,
        entries,
    };
    io::write_bytes(
        &output_dir.join(PRECORRECT_MANIFEST_FILE),
        out.to_json().as_bytes(),
    )?;
    Ok(out)
}

/// Which image of each pair is compared against the clean reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Degraded,
    Precorrected,
}

/// One reference/test pair to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPair {
    pub index: usize,
    pub reference: PathBuf,
    pub test: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub index: usize,
    pub reference: String,
    pub test: String,
    pub report: Option<MetricReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub variant: Variant,
    pub margin: usize,
    pub pairs: usize,
    pub failed: usize,
    #[serde(
        serialize_with = "crate::metrics::ser_db",
        deserialize_with = "crate::metrics::de_db"
    )]
    pub mean_psnr_db: f64,
    pub mean_ssim: f64,
    pub mean_gmsd: f64,
    pub mean_spectral_l1: f64,
}

/// Pairs to evaluate for a manifest file of either kind.
pub fn eval_pairs(manifest_path: &Path, variant: Variant) -> Result<Vec<EvalPair>> {
    let text = std::fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::integrity(manifest_path, format!("invalid JSON: {e}")))?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    match value.get("kind").and_then(|k| k.as_str()) {
        Some(DatasetManifest::KIND) => {
            if variant == Variant::Precorrected {
                return Err(Error::Argument(
                    "a dataset manifest has no pre-corrected images; pass the precorrect manifest"
                        .into(),
                ));
            }
            let m = DatasetManifest::read(manifest_path)?;
            Ok(m.entries
                .iter()
                .map(|e| EvalPair {
                    index: e.index,
                    reference: base.join(&e.clean_path),
                    test: base.join(&e.degraded_path),
                })
                .collect())
        }
        Some(PrecorrectManifest::KIND) => {
            let m = PrecorrectManifest::read(manifest_path)?;
            let data = PathBuf::from(&m.dataset_dir);
            Ok(m.entries
                .iter()
                .map(|e| EvalPair {
                    index: e.index,
                    reference: data.join(&e.clean_path),
                    test: match variant {
                        Variant::Degraded => data.join(&e.degraded_path),
                        Variant::Precorrected => e
                            .precorrected_path
                            .as_ref()
                            .map(|p| base.join(p))
                            .unwrap_or_default(),
                    },
                })
                .collect())
        }
        other => Err(Error::integrity(
            manifest_path,
            format!("unknown manifest kind {other:?}"),
        )),
    }
}

fn eval_one(pair: &EvalPair, margin: usize) -> Result<MetricReport> {
    if pair.test.as_os_str().is_empty() {
        return Err(Error::Input("no test image recorded for this pair".into()));
    }
    let reference = io::read_luma(&pair.reference)?;
    let test = io::read_luma(&pair.test)?;
    metrics::evaluate(&reference, &test, margin)
}

/// Evaluates every pair; failures become rows with an error message.
pub fn evaluate_pairs(
    pairs: &[EvalPair],
    margin: usize,
    jobs: Option<usize>,
) -> Result<Vec<EvalRow>> {
    with_jobs(jobs, || {
        pairs
            .par_iter()
            .map(|p| {
                let (report, error) = match eval_one(p, margin) {
                    Ok(r) => (Some(r), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                EvalRow {
                    index: p.index,
                    reference: p.reference.to_string_lossy().into_owned(),
                    test: p.test.to_string_lossy().into_owned(),
                    report,
                    error,
                }
            })
            .collect()
    })
}

pub fn summarize(rows: &[EvalRow], variant: Variant, margin: usize) -> EvalSummary {
    let reports: Vec<&MetricReport> = rows.iter().filter_map(|r| r.report.as_ref()).collect();
    let n = reports.len() as f64;
    let mean = |f: fn(&MetricReport) -> f64| {
        if reports.is_empty() {
            f64::NAN
        } else {
            reports.iter().map(|r| f(r)).sum::<f64>() / n
        }
    };
    EvalSummary {
        variant,
        margin,
        pairs: rows.len(),
        failed: rows.len() - reports.len(),
        mean_psnr_db: mean(|r| r.psnr_db),
        mean_ssim: mean(|r| r.ssim),
        mean_gmsd: mean(|r| r.gmsd),
        mean_spectral_l1: mean(|r| r.spectral_l1),
    }
}

/// CSV with one row per pair; failed rows leave metrics empty and fill
/// `error`.
pub fn eval_rows_csv(rows: &[EvalRow]) -> String {
    let mut s = format!("index,reference,test,{},error\n", MetricReport::CSV_HEADER);
    for r in rows {
        let metrics = match &r.report {
            Some(rep) => rep.csv_row(),
            None => ",,,,,,,".into(),
        };
        let err = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        s.push_str(&format!(
            "{},{},{},{metrics},{err}\n",
            r.index, r.reference, r.test
        ));
    }
    s
}
