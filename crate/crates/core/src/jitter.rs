//! Sinusoidal jitter curves and finer-grained subdivision sampling.
//!
//! A jitter curve holds one pixel offset per image column. Column `c`
//! (0-based) is imaged at time `t = (c + 1) * tau`. Subdivision `m` of `M`
//! shifts every sample time by `m / M * tau`; averaging all `M` subdivisions
//! models the motion integrated over one line period.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// One sinusoidal jitter term. Amplitude is already expressed in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawComponent")]
pub struct SinusoidComponent {
    amplitude_px: f64,
    frequency_hz: f64,
    phase_rad: f64,
}

#[derive(Deserialize)]
struct RawComponent {
    amplitude_px: f64,
    frequency_hz: f64,
    #[serde(default)]
    phase_rad: f64,
}

impl TryFrom<RawComponent> for SinusoidComponent {
    type Error = Error;

    fn try_from(raw: RawComponent) -> Result<Self> {
        Self::new(raw.amplitude_px, raw.frequency_hz, raw.phase_rad)
    }
}

impl SinusoidComponent {
    /// Validates the amplitude and frequency and wraps the phase into `[0, 2π)`.
    pub fn new(amplitude_px: f64, frequency_hz: f64, phase_rad: f64) -> Result<Self> {
        if !(amplitude_px.is_finite() && amplitude_px >= 0.0) {
            return Err(Error::Argument(format!(
                "amplitude must be finite and >= 0, got {amplitude_px}"
            )));
        }
        if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
            return Err(Error::Argument(format!(
                "frequency must be finite and > 0, got {frequency_hz}"
            )));
        }
        if !phase_rad.is_finite() {
            return Err(Error::Domain(format!(
                "phase must be finite, got {phase_rad}"
            )));
        }
        Ok(Self {
            amplitude_px,
            frequency_hz,
            phase_rad: wrap_phase(phase_rad),
        })
    }

    pub fn amplitude_px(&self) -> f64 {
        self.amplitude_px
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn phase_rad(&self) -> f64 {
        self.phase_rad
    }

    #[inline]
    fn eval(&self, t: f64) -> f64 {
        self.amplitude_px * (TAU * self.frequency_hz * t + self.phase_rad).sin()
    }
}

fn wrap_phase(phase: f64) -> f64 {
    let wrapped = phase.rem_euclid(TAU);
    // rem_euclid rounds tiny negatives up to exactly 2π
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Ordered set of sinusoidal components for one jitter direction.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SinusoidSet(pub Vec<SinusoidComponent>);

impl SinusoidSet {
    pub fn new(components: Vec<SinusoidComponent>) -> Self {
        Self(components)
    }

    pub fn components(&self) -> &[SinusoidComponent] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of amplitudes; bounds the magnitude of every sample.
    pub fn amplitude_sum(&self) -> f64 {
        self.0.iter().map(|c| c.amplitude_px).sum()
    }

    /// Concatenation of two sets.
    pub fn union(&self, other: &SinusoidSet) -> SinusoidSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        SinusoidSet(v)
    }

    /// Jitter offset in pixels at time `t` seconds.
    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().map(|c| c.eval(t)).sum()
    }
}

/// Attitude direction a curve describes. Roll displaces pixels across track
/// (image rows), pitch along track (image columns).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Roll,
    Pitch,
}

/// Optical and timing parameters of the pushbroom camera.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraSpec {
    pub focal_length: f64,
    pub pixel_size: f64,
    pub line_interval_s: f64,
    pub subdivision_count: usize,
}

impl CameraSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("focal_length", self.focal_length),
            ("pixel_size", self.pixel_size),
            ("line_interval_s", self.line_interval_s),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Argument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.subdivision_count == 0 {
            return Err(Error::Argument("subdivision_count must be >= 1".into()));
        }
        Ok(())
    }

    /// Sampling grid for an image of the given width.
    pub fn grid(&self, width: usize) -> Result<SamplingGrid> {
        SamplingGrid::new(width, self.line_interval_s, self.subdivision_count)
    }
}

/// Converts an attitude angle (radians) into a pixel offset on the focal plane.
pub fn angle_amplitude_to_pixels(angle_rad: f64, camera: &CameraSpec) -> Result<f64> {
    if !angle_rad.is_finite() {
        return Err(Error::Domain(format!(
            "angle must be finite, got {angle_rad}"
        )));
    }
    camera.validate()?;
    Ok(angle_rad * camera.focal_length / camera.pixel_size)
}

/// Column count, line period and subdivision count shared by every curve of
/// one image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingGrid {
    width: usize,
    tau_s: f64,
    subdivisions: usize,
}

impl SamplingGrid {
    pub fn new(width: usize, tau_s: f64, subdivisions: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::Argument("curve width must be >= 1".into()));
        }
        if !(tau_s.is_finite() && tau_s > 0.0) {
            return Err(Error::Argument(format!(
                "tau must be positive, got {tau_s}"
            )));
        }
        if subdivisions == 0 {
            return Err(Error::Argument("subdivision count must be >= 1".into()));
        }
        Ok(Self {
            width,
            tau_s,
            subdivisions,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn tau_s(&self) -> f64 {
        self.tau_s
    }

    pub fn subdivisions(&self) -> usize {
        self.subdivisions
    }

    /// Sample time of `column` (0-based) in subdivision `m`.
    #[inline]
    pub fn time(&self, column: usize, m: usize) -> f64 {
        (column + 1) as f64 * self.tau_s + (m as f64 / self.subdivisions as f64) * self.tau_s
    }
}

/// Per-column pixel offsets in one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct JitterCurve {
    pub direction: Direction,
    pub samples: Vec<f64>,
}

impl JitterCurve {
    pub fn zeros(direction: Direction, width: usize) -> Self {
        Self {
            direction,
            samples: vec![0.0; width],
        }
    }

    pub fn new(direction: Direction, samples: Vec<f64>) -> Result<Self> {
        if let Some(v) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("curve sample {v} is not finite")));
        }
        Ok(Self { direction, samples })
    }

    pub fn width(&self) -> usize {
        self.samples.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Bounded relative measurement error of a gyroscope-style jitter reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementErrorModel {
    pub relative_bound: f64,
    pub seed: u64,
}

impl Default for MeasurementErrorModel {
    fn default() -> Self {
        Self {
            relative_bound: 0.20,
            seed: 0,
        }
    }
}

impl MeasurementErrorModel {
    pub fn new(relative_bound: f64, seed: u64) -> Result<Self> {
        let model = Self {
            relative_bound,
            seed,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.relative_bound) {
            return Err(Error::Argument(format!(
                "relative_bound must lie in [0, 1], got {}",
                self.relative_bound
            )));
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    /// Standard deviation of the multiplicative error factor.
    pub fn relative_std(&self) -> f64 {
        self.relative_bound / 3f64.sqrt()
    }
}

/// Samples subdivision `m` of the ideal curve.
pub fn sample_ideal_curve(
    set: &SinusoidSet,
    direction: Direction,
    grid: &SamplingGrid,
    m: usize,
) -> Result<JitterCurve> {
    if m >= grid.subdivisions {
        return Err(Error::Argument(format!(
            "subdivision index {m} out of range for M = {}",
            grid.subdivisions
        )));
    }
    let samples = (0..grid.width).map(|c| set.eval(grid.time(c, m))).collect();
    Ok(JitterCurve { direction, samples })
}

/// All `M` subdivision curves, ordered by subdivision index.
pub fn subdivision_curves(
    set: &SinusoidSet,
    direction: Direction,
    grid: &SamplingGrid,
) -> Vec<JitterCurve> {
    (0..grid.subdivisions)
        .map(|m| sample_ideal_curve(set, direction, grid, m).expect("m < M"))
        .collect()
}

/// Element-wise mean of equally sized curves.
pub fn average_curves(curves: &[JitterCurve]) -> Result<JitterCurve> {
    let first = curves
        .first()
        .ok_or_else(|| Error::Argument("cannot average an empty curve list".into()))?;
    if curves.iter().any(|c| c.width() != first.width()) {
        return Err(Error::Argument("curves to average differ in width".into()));
    }
    if curves.len() == 1 {
        return Ok(first.clone());
    }
    let n = curves.len() as f64;
    let samples = (0..first.width())
        .map(|k| curves.iter().map(|c| c.samples[k]).sum::<f64>() / n)
        .collect();
    Ok(JitterCurve {
        direction: first.direction,
        samples,
    })
}

/// Mean of the `M` ideal subdivision curves.
pub fn cdsm_average(
    set: &SinusoidSet,
    direction: Direction,
    grid: &SamplingGrid,
) -> Result<JitterCurve> {
    average_curves(&subdivision_curves(set, direction, grid))
}

/// Multiplies every sample by `1 + u`, `u ~ Uniform[-bound, bound]`, drawn
/// independently per column from stream 0 of the model seed.
pub fn add_measurement_error(
    curve: &JitterCurve,
    model: &MeasurementErrorModel,
) -> Result<JitterCurve> {
    perturb(curve, model, 0)
}

fn perturb(curve: &JitterCurve, model: &MeasurementErrorModel, stream: u64) -> Result<JitterCurve> {
    model.validate()?;
    let bound = model.relative_bound;
    if bound == 0.0 {
        return Ok(curve.clone());
    }
    let mut rng = seed::rng(model.seed, stream);
    let samples = curve
        .samples
        .iter()
        .map(|&v| {
            let u: f64 = rng.random_range(-bound..=bound);
            v + v * u
        })
        .collect();
    Ok(JitterCurve {
        direction: curve.direction,
        samples,
    })
}

/// Applies measurement error to each subdivision curve with independent
/// draws: subdivision `m` uses stream `m` of the model seed.
pub fn noisy_subdivision_curves(
    curves: &[JitterCurve],
    model: &MeasurementErrorModel,
) -> Result<Vec<JitterCurve>> {
    curves
        .iter()
        .enumerate()
        .map(|(m, c)| perturb(c, model, m as u64))
        .collect()
}

/// Averages independently perturbed copies of the given subdivision curves.
pub fn average_noisy_subdivisions(
    curves: &[JitterCurve],
    model: &MeasurementErrorModel,
) -> Result<JitterCurve> {
    average_curves(&noisy_subdivision_curves(curves, model)?)
}

/// Noisy subdivision curves averaged: the smoothed measurement used for
/// pre-correction.
pub fn cdsm_noisy_curve(
    set: &SinusoidSet,
    direction: Direction,
    grid: &SamplingGrid,
    model: &MeasurementErrorModel,
) -> Result<JitterCurve> {
    average_noisy_subdivisions(&subdivision_curves(set, direction, grid), model)
}

/// Amplitude attenuation and phase lag that averaging `M` uniformly spaced
/// subdivisions applies to a sinusoid of frequency `f`.
pub fn subdivision_response(frequency_hz: f64, tau_s: f64, subdivisions: usize) -> (f64, f64) {
    let m = subdivisions as f64;
    let x = PI * frequency_hz * tau_s;
    let gain = if subdivisions == 1 {
        1.0
    } else {
        x.sin() / (m * (x / m).sin())
    };
    (gain, x * (m - 1.0) / m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};

    fn comp(a: f64, f: f64, p: f64) -> SinusoidComponent {
        SinusoidComponent::new(a, f, p).unwrap()
    }

    #[test]
    fn angle_conversion() {
        let cam = CameraSpec {
            focal_length: 1.0,
            pixel_size: 1e-5,
            line_interval_s: 1e-4,
            subdivision_count: 1,
        };
        assert_eq!(angle_amplitude_to_pixels(0.0, &cam).unwrap(), 0.0);
        assert!((angle_amplitude_to_pixels(1e-6, &cam).unwrap() - 0.1).abs() < 1e-15);
        let cam2 = CameraSpec {
            focal_length: 2.5,
            pixel_size: 1.25e-5,
            ..cam
        };
        assert!((angle_amplitude_to_pixels(2e-5, &cam2).unwrap() - 4.0).abs() < 1e-12);
        assert!(matches!(
            angle_amplitude_to_pixels(f64::NAN, &cam),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn component_validation_and_phase_wrap() {
        assert!(SinusoidComponent::new(-1.0, 10.0, 0.0).is_err());
        assert!(SinusoidComponent::new(1.0, 0.0, 0.0).is_err());
        let c = comp(1.0, 1.0, -PI / 2.0);
        assert!((c.phase_rad() - 1.5 * PI).abs() < 1e-12);
        assert_eq!(comp(1.0, 1.0, TAU).phase_rad(), 0.0);
        assert_eq!(comp(1.0, 1.0, -1e-300).phase_rad(), 0.0);
    }

    #[test]
    fn empty_set_gives_zero_curve() {
        let grid = SamplingGrid::new(10, 1e-3, 4).unwrap();
        let c = sample_ideal_curve(&SinusoidSet::default(), Direction::Roll, &grid, 2).unwrap();
        assert_eq!(c.samples, vec![0.0; 10]);
    }

    #[test]
    fn subdivision_index_out_of_range() {
        let grid = SamplingGrid::new(10, 1e-3, 4).unwrap();
        let set = SinusoidSet::new(vec![comp(1.0, 5.0, 0.0)]);
        assert!(matches!(
            sample_ideal_curve(&set, Direction::Roll, &grid, 4),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn integer_cycles_per_line_vanish() {
        // f * tau = 1: every sample lands on a multiple of 2π.
        let grid = SamplingGrid::new(32, 1e-3, 1).unwrap();
        let set = SinusoidSet::new(vec![comp(3.0, 1000.0, 0.0)]);
        let c = sample_ideal_curve(&set, Direction::Pitch, &grid, 0).unwrap();
        assert!(c.samples.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn matches_scalar_sine_at_dataset_parameters() {
        let tau = 3.54e-5;
        let grid = SamplingGrid::new(5, tau, 6).unwrap();
        let set = SinusoidSet::new(vec![comp(4.0, 1000.0, 0.0)]);
        let c = sample_ideal_curve(&set, Direction::Roll, &grid, 0).unwrap();
        for k in 1..=5 {
            let expected = 4.0 * (2.0 * PI * 1000.0 * k as f64 * tau).sin();
            assert!((c.samples[k - 1] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn single_subdivision_average_is_plain_sampling() {
        let grid = SamplingGrid::new(64, 3.54e-5, 1).unwrap();
        let set = SinusoidSet::new(vec![comp(4.0, 1000.0, 0.3), comp(1.5, 2000.0, 2.0)]);
        let avg = cdsm_average(&set, Direction::Roll, &grid).unwrap();
        let plain = sample_ideal_curve(&set, Direction::Roll, &grid, 0).unwrap();
        for (a, b) in avg.samples.iter().zip(&plain.samples) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn zero_bound_noise_is_identity() {
        let curve = JitterCurve::new(Direction::Roll, vec![1.0, -2.5, 3.25]).unwrap();
        let model = MeasurementErrorModel::new(0.0, 9).unwrap();
        assert_eq!(add_measurement_error(&curve, &model).unwrap(), curve);
        let zero = JitterCurve::zeros(Direction::Roll, 8);
        let model = MeasurementErrorModel::new(0.2, 9).unwrap();
        assert_eq!(
            add_measurement_error(&zero, &model).unwrap().samples,
            vec![0.0; 8]
        );
        assert!(MeasurementErrorModel::new(1.5, 0).is_err());
    }

    #[test]
    fn noisy_cdsm_special_cases() {
        let set = SinusoidSet::new(vec![comp(4.0, 1000.0, 0.3)]);
        let grid = SamplingGrid::new(100, 3.54e-5, 6).unwrap();
        let clean = MeasurementErrorModel::new(0.0, 1).unwrap();
        assert_eq!(
            cdsm_noisy_curve(&set, Direction::Roll, &grid, &clean).unwrap(),
            cdsm_average(&set, Direction::Roll, &grid).unwrap()
        );

        let grid1 = SamplingGrid::new(100, 3.54e-5, 1).unwrap();
        let model = MeasurementErrorModel::new(0.2, 5).unwrap();
        let ideal = sample_ideal_curve(&set, Direction::Roll, &grid1, 0).unwrap();
        assert_eq!(
            cdsm_noisy_curve(&set, Direction::Roll, &grid1, &model).unwrap(),
            add_measurement_error(&ideal, &model).unwrap()
        );
    }

    #[test]
    fn uniform_error_statistics_on_constant_curve() {
        let curve = JitterCurve::new(Direction::Roll, vec![4.0; 100_000]).unwrap();
        let model = MeasurementErrorModel::new(0.2, 2024).unwrap();
        let noisy = add_measurement_error(&curve, &model).unwrap();
        let mean = noisy.samples.iter().sum::<f64>() / noisy.width() as f64;
        assert!((mean - 4.0).abs() < 0.01, "mean {mean}");
        assert!(noisy.samples.iter().all(|v| (3.2..=4.8).contains(v)));
    }

    #[test]
    fn subdivision_response_matches_unit_gain_at_m1() {
        assert_eq!(subdivision_response(1000.0, 3.54e-5, 1), (1.0, 0.0));
    }

    proptest! {
        #[test]
        fn sampling_is_linear_in_the_component_set(
            a1 in 0.0f64..5.0, f1 in 100.0f64..5000.0, p1 in 0.0f64..TAU,
            a2 in 0.0f64..5.0, f2 in 100.0f64..5000.0, p2 in 0.0f64..TAU,
            m in 0usize..6,
        ) {
            let grid = SamplingGrid::new(64, 3.54e-5, 6).unwrap();
            let s1 = SinusoidSet::new(vec![comp(a1, f1, p1)]);
            let s2 = SinusoidSet::new(vec![comp(a2, f2, p2)]);
            let both = sample_ideal_curve(&s1.union(&s2), Direction::Roll, &grid, m).unwrap();
            let c1 = sample_ideal_curve(&s1, Direction::Roll, &grid, m).unwrap();
            let c2 = sample_ideal_curve(&s2, Direction::Roll, &grid, m).unwrap();
            for k in 0..64 {
                prop_assert!((both.samples[k] - c1.samples[k] - c2.samples[k]).abs() <= 1e-12);
            }
        }

        #[test]
        fn cdsm_average_is_bounded_by_amplitude_sum(
            amps in proptest::collection::vec(0.0f64..5.0, 1..5),
            seed in any::<u64>(),
        ) {
            let mut rng = seed::rng(seed, 0);
            let set = SinusoidSet::new(amps.iter().map(|&a| {
                comp(a, rng.random_range(100.0..5000.0), rng.random_range(0.0..TAU))
            }).collect());
            let grid = SamplingGrid::new(128, 3.54e-5, 6).unwrap();
            let avg = cdsm_average(&set, Direction::Pitch, &grid).unwrap();
            let bound = set.amplitude_sum() + 1e-12;
            prop_assert!(avg.samples.iter().all(|v| v.abs() <= bound));
        }

        #[test]
        fn measurement_error_respects_bound_and_seed(
            samples in proptest::collection::vec(-10.0f64..10.0, 1..200),
            bound in 0.0f64..1.0,
            seed in any::<u64>(),
        ) {
            let curve = JitterCurve::new(Direction::Roll, samples).unwrap();
            let model = MeasurementErrorModel::new(bound, seed).unwrap();
            let a = add_measurement_error(&curve, &model).unwrap();
            let b = add_measurement_error(&curve, &model).unwrap();
            prop_assert_eq!(&a, &b);
            for (n, i) in a.samples.iter().zip(&curve.samples) {
                prop_assert!((n - i).abs() <= bound * i.abs() * (1.0 + 1e-12) + 1e-300);
            }
        }
    }
}
