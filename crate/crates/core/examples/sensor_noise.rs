//! Gamma conversion, Poisson-Gaussian noise and quantization on flat
//! patches, with measured against predicted noise.
//!
//! cargo run --release --example sensor_noise

use lapjitter::sensor::{self, GammaConfig, NoiseConfig};
use lapjitter::Image;

fn main() -> lapjitter::Result<()> {
    let gamma = GammaConfig::default();
    for display in [0.25, 0.5, 0.75] {
        let energy = display_f64(display, &gamma)?;
        let patch = Image::filled(500, 500, energy);
        let noise = NoiseConfig::default().with_seed(1);
        let noisy = sensor::add_sensor_noise(&patch, &noise)?;
        let v = noisy.as_slice();
        let mean = noisy.mean();
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
        let predicted = noise.lambda_poisson * energy + noise.sigma_gauss.powi(2);
        println!(
            "display {display:.2} -> energy {energy:.4}: variance {var:.3e} (predicted {predicted:.3e})"
        );
    }
    let ramp = Image::from_fn(1, 9, |_, c| c as f64 / 8.0);
    let q8 = sensor::quantize(&ramp, 8)?;
    println!(
        "8-bit ramp: {:?}",
        q8.as_slice()
            .iter()
            .map(|v| (v * 255.0).round() as u8)
            .collect::<Vec<_>>()
    );
    Ok(())
}

fn display_f64(v: f64, gamma: &GammaConfig) -> lapjitter::Result<f64> {
    Ok(sensor::inverse_gamma(&Image::filled(1, 1, v), gamma)?.get(0, 0))
}
