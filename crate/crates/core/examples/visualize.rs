//! Writes the pre-correction flow of one degraded image as a color-wheel
//! PNG and its jitter curves as CSV plus a line plot, the artifacts of
//! `lapjitter flow-viz` and `lapjitter curve-plot`.
//!
//! cargo run --release --example visualize -- [out_dir]

use std::path::PathBuf;

use lapjitter::cli::{correction_flow, curve_series, curves_csv};
use lapjitter::pipeline::{self, DegradationConfig};
use lapjitter::plot::{self, Panel, Series, PALETTE};
use lapjitter::{flowviz, io, scene};

fn main() -> lapjitter::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "viz_demo".into()));
    let cfg = DegradationConfig::default();
    let clean = scene::aerial_scene(480, 640, 1);
    let (params, result) = pipeline::degrade_indexed(&clean, &cfg, 0)?;
    let sidecar = result.sidecar();

    let flow = correction_flow(&sidecar, 480, params.seed, 0.2)?;
    io::write_rgb_png(&out.join("flow.png"), &flowviz::render_flow(&flow))?;
    println!("largest correction: {:.3} px", flow.max_magnitude());

    let (roll, pitch) = curve_series(&sidecar, params.seed, 0.2)?;
    io::write_bytes(
        &out.join("curves.csv"),
        curves_csv(&roll, &pitch).as_bytes(),
    )?;
    let panels = [
        Panel {
            title: "roll (px)",
            series: vec![
                Series {
                    label: "ideal",
                    color: PALETTE[0],
                    values: &roll.ideal.samples,
                },
                Series {
                    label: "cdsm",
                    color: PALETTE[1],
                    values: &roll.cdsm.samples,
                },
                Series {
                    label: "cdsm noisy",
                    color: PALETTE[3],
                    values: &roll.cdsm_noisy.samples,
                },
            ],
        },
        Panel {
            title: "pitch (px)",
            series: vec![
                Series {
                    label: "ideal",
                    color: PALETTE[0],
                    values: &pitch.ideal.samples,
                },
                Series {
                    label: "cdsm",
                    color: PALETTE[1],
                    values: &pitch.cdsm.samples,
                },
                Series {
                    label: "cdsm noisy",
                    color: PALETTE[3],
                    values: &pitch.cdsm_noisy.samples,
                },
            ],
        },
    ];
    io::write_rgb_png(
        &out.join("curves.png"),
        &plot::render_panels(&panels, 640, 240),
    )?;
    println!("artifacts written to {}", out.display());
    Ok(())
}
