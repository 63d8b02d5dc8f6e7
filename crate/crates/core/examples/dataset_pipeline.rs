//! End-to-end run: procedural corpus, dataset synthesis, pre-correction and
//! evaluation, the same steps as `lapjitter synth`, `precorrect` and `eval`.
//!
//! cargo run --release --example dataset_pipeline -- [work_dir]

use std::path::PathBuf;

use lapjitter::metrics::DisplayDb;
use lapjitter::pipeline::{self, DegradationConfig, Variant};
use lapjitter::{io, scene};

fn main() -> lapjitter::Result<()> {
    let work = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "pipeline_demo".into()),
    );
    let corpus = work.join("corpus");
    for i in 0..3 {
        io::write_png16(
            &corpus.join(format!("scene_{i}.png")),
            &scene::aerial_scene(480, 1280, i),
        )?;
    }

    let cfg = DegradationConfig {
        master_seed: 2024,
        ..Default::default()
    };
    let dataset = work.join("dataset");
    let manifest = pipeline::synthesize_dataset(&corpus, &dataset, &cfg, None)?;
    println!(
        "synthesized {} pairs into {}",
        manifest.entries.len(),
        dataset.display()
    );

    let pre = work.join("precorrected");
    let out = pipeline::precorrect_dataset(&manifest, &dataset, &cfg.measurement, &pre, 16, None)?;
    let manifest_path = pre.join(pipeline::PRECORRECT_MANIFEST_FILE);
    for variant in [Variant::Degraded, Variant::Precorrected] {
        let pairs = pipeline::eval_pairs(&manifest_path, variant)?;
        let rows = pipeline::evaluate_pairs(&pairs, 16, None)?;
        let s = pipeline::summarize(&rows, variant, 16);
        println!(
            "{variant:?}: mean PSNR {:.3} dB, SSIM {:.4}, GMSD {:.4}",
            DisplayDb(s.mean_psnr_db),
            s.mean_ssim,
            s.mean_gmsd
        );
    }
    if let Some(g) = out.mean_psnr_gain() {
        println!("mean PSNR gain from pre-correction: {g:.3} dB");
    }
    Ok(())
}
