//! Radiometric sensor model: gamma transfer, shot and read noise,
//! quantization.

use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaConfig {
    pub gamma: f64,
}

impl Default for GammaConfig {
    fn default() -> Self {
        Self { gamma: 2.2 }
    }
}

impl GammaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::Argument(format!(
                "gamma must be > 0, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Gaussian read noise plus scaled Poisson shot noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub sigma_gauss: f64,
    pub lambda_poisson: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            sigma_gauss: 0.01,
            lambda_poisson: 1e-4,
            seed: 0,
        }
    }
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        Self {
            sigma_gauss: 0.0,
            lambda_poisson: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma_gauss", self.sigma_gauss),
            ("lambda_poisson", self.lambda_poisson),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Argument(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// Display values to linear energy: `out = in^γ`.
pub fn inverse_gamma(image: &Image, cfg: &GammaConfig) -> Result<Image> {
    cfg.validate()?;
    image.ensure_unit_range("inverse_gamma")?;
    Ok(power(image, cfg.gamma))
}

/// Linear energy back to display values: `out = in^(1/γ)`.
pub fn forward_gamma(image: &Image, cfg: &GammaConfig) -> Result<Image> {
    cfg.validate()?;
    image.ensure_unit_range("forward_gamma")?;
    Ok(power(image, 1.0 / cfg.gamma))
}

fn power(image: &Image, exponent: f64) -> Image {
    if exponent == 1.0 {
        return image.clone();
    }
    image.map(|v| v.powf(exponent))
}

/// `out = λ·Poisson(in/λ) + N(0, σ²)` per pixel. No clamping.
///
/// Row `r` draws from stream `r` of the configured seed, so the result does
/// not depend on how rows are scheduled across threads.
pub fn add_sensor_noise(image: &Image, cfg: &NoiseConfig) -> Result<Image> {
    cfg.validate()?;
    image.ensure_unit_range("add_sensor_noise")?;
    let (sigma, lambda) = (cfg.sigma_gauss, cfg.lambda_poisson);
    if sigma == 0.0 && lambda == 0.0 {
        return Ok(image.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Argument(e.to_string()))?;
    let w = image.width();
    let mut out = image.as_slice().to_vec();
    out.par_chunks_mut(w).enumerate().for_each(|(r, row)| {
        let mut rng = seed::rng(cfg.seed, r as u64);
        for v in row.iter_mut() {
            if lambda > 0.0 {
                *v = if *v > 0.0 {
                    let shot = Poisson::new(*v / lambda).expect("positive finite rate");
                    lambda * shot.sample(&mut rng)
                } else {
                    0.0
                };
            }
            if sigma > 0.0 {
                *v += normal.sample(&mut rng);
            }
        }
    });
    Image::from_vec(image.height(), w, out)
}

/// Clamps to `[0, 1]` and snaps to the `bit_depth` lattice (8 or 16 bits),
/// rounding half away from zero.
pub fn quantize(image: &Image, bit_depth: u32) -> Result<Image> {
    let levels = levels(bit_depth)?;
    Ok(image.map(|v| (v.clamp(0.0, 1.0) * levels).round() / levels))
}

pub(crate) fn levels(bit_depth: u32) -> Result<f64> {
    match bit_depth {
        8 => Ok(255.0),
        16 => Ok(65535.0),
        other => Err(Error::Argument(format!(
            "unsupported bit depth {other}; expected 8 or 16"
        ))),
    }
}
