//! Averaging M independently perturbed subdivision readings shrinks the
//! measurement error by about 1/sqrt(M).
//!
//! cargo run --example cdsm_smoothing

use lapjitter::jitter::{self, Direction, JitterCurve, MeasurementErrorModel};

fn std_dev(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

fn main() -> lapjitter::Result<()> {
    let width = 100_000;
    let offset = 4.0;
    let model = MeasurementErrorModel::new(0.2, 1)?;
    let ideal = JitterCurve::new(Direction::Roll, vec![offset; width])?;
    let single = model.relative_std() * offset;
    println!("single reading error std: {single:.5} px");
    println!("   M   measured std   sigma/sqrt(M)");
    for m in [1, 2, 4, 6, 12] {
        let avg = jitter::average_noisy_subdivisions(&vec![ideal.clone(); m], &model)?;
        let residual: Vec<f64> = avg.samples.iter().map(|v| v - offset).collect();
        println!(
            "{m:>4}   {:>12.5}   {:>13.5}",
            std_dev(&residual),
            single / (m as f64).sqrt()
        );
    }
    Ok(())
}
