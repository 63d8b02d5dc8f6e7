//! PSNR, SSIM, GMSD and spectral L1 for a few controlled distortions.
//!
//! cargo run --release --example quality_metrics

use lapjitter::geometry::{self, BoundaryPolicy, Displacement, FlowField};
use lapjitter::metrics::{self, DisplayDb};
use lapjitter::sensor::{self, NoiseConfig};
use lapjitter::{scene, Image};

fn main() -> lapjitter::Result<()> {
    let clean = scene::aerial_scene(240, 320, 8);
    let shift = FlowField::constant(240, 320, Displacement::new(0.5, 0.5));
    let noise = NoiseConfig {
        sigma_gauss: 0.02,
        lambda_poisson: 0.0,
        seed: 4,
    };
    let cases: Vec<(&str, Image)> = vec![
        ("identical", clean.clone()),
        ("brightness +0.05", clean.map(|v| (v + 0.05).min(1.0))),
        (
            "half-pixel shift",
            geometry::grid_sample(&clean, &shift, BoundaryPolicy::ClampEdge)?,
        ),
        (
            "gaussian noise 0.02",
            sensor::add_sensor_noise(&clean, &noise)?.map(|v| v.clamp(0.0, 1.0)),
        ),
    ];
    println!(
        "{:<22}{:>10}  {:>6}  {:>6}  {:>8}",
        "case", "psnr dB", "ssim", "gmsd", "spectral"
    );
    for (name, test) in &cases {
        let r = metrics::evaluate(&clean, test, 8)?;
        println!(
            "{name:<22}{:>10.3}  {:.4}  {:.4}  {:>8.4}",
            DisplayDb(r.psnr_db),
            r.ssim,
            r.gmsd,
            r.spectral_l1
        );
    }
    Ok(())
}
