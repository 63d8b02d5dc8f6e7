//! Degrades one procedural scene and undoes most of the distortion with
//! exact and with noisy jitter readings.
//!
//! cargo run --release --example warp_and_precorrect -- [out_dir]

use std::path::PathBuf;

use lapjitter::pipeline::{self, DegradationConfig};
use lapjitter::{geometry, io, metrics, scene, MeasurementErrorModel};

fn main() -> lapjitter::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "warp_demo".into()),
    );
    let cfg = DegradationConfig::default();
    let clean = scene::aerial_scene(480, 640, 3);
    let (params, result) = pipeline::degrade_indexed(&clean, &cfg, 0)?;
    println!(
        "amplitude factor {:.4}, frequency factor {:.4}",
        params.amplitude_factor, params.frequency_factor
    );

    io::write_png16(&out.join("clean.png"), &clean)?;
    io::write_png16(&out.join("degraded.png"), &result.degraded)?;
    let before = metrics::evaluate(&clean, &result.degraded, 16)?;
    println!(
        "degraded       PSNR {:>7.3} dB  SSIM {:.4}",
        before.psnr_db, before.ssim
    );

    for bound in [0.0, 0.2] {
        let model = MeasurementErrorModel::new(bound, 0)?;
        let maps = pipeline::noisy_maps(&result.curves, clean.height(), params.seed, &model)?;
        let fixed = geometry::precorrect(&result.degraded, &maps, cfg.precorrect_boundary)?;
        let after = metrics::evaluate(&clean, &fixed, 16)?;
        println!(
            "bound {bound:.1}      PSNR {:>7.3} dB  SSIM {:.4}",
            after.psnr_db, after.ssim
        );
        io::write_png16(&out.join(format!("precorrected_{bound:.1}.png")), &fixed)?;
    }
    println!("images written to {}", out.display());
    Ok(())
}
