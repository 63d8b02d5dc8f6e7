//! Samples the default roll/pitch sinusoid sets on the line grid and shows
//! how averaging subdivisions attenuates each frequency.
//!
//! cargo run --example jitter_curves

use lapjitter::jitter::{self, Direction};
use lapjitter::DegradationConfig;

fn main() -> lapjitter::Result<()> {
    let cfg = DegradationConfig::default();
    let grid = cfg.grid(640)?;

    println!("frequency  gain(M={})  phase lag (rad)", cfg.subdivisions);
    for c in cfg.roll_sinusoids.components() {
        let (gain, lag) =
            jitter::subdivision_response(c.frequency_hz(), cfg.tau_s, cfg.subdivisions);
        println!("{:>7.0} Hz  {gain:.6}   {lag:.6}", c.frequency_hz());
    }

    let ideal = jitter::sample_ideal_curve(&cfg.roll_sinusoids, Direction::Roll, &grid, 0)?;
    let cdsm = jitter::cdsm_average(&cfg.roll_sinusoids, Direction::Roll, &grid)?;
    println!("\ncolumn  roll ideal (px)  roll averaged (px)");
    for c in (0..640).step_by(64) {
        println!(
            "{c:>6}  {:>15.6}  {:>18.6}",
            ideal.samples[c], cdsm.samples[c]
        );
    }
    println!(
        "\npeak |roll|: ideal {:.4} px, averaged {:.4} px",
        ideal.max_abs(),
        cdsm.max_abs()
    );
    Ok(())
}
