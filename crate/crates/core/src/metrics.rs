//! Full-reference image quality metrics.
//!
//! All metrics assume peak value 1.0. Constants follow the reference
//! definitions of each metric:
//!
//! * SSIM: 11×11 Gaussian window, σ = 1.5, `K1 = 0.01`, `K2 = 0.03`,
//!   averaged over window positions fully inside the image.
//! * GMSD: 2×2 average-pool downsampling, 3×3 Prewitt gradients with edge
//!   replication, `c = 170 / 255²`, sample standard deviation (n − 1).
//! * Spectral L1: unnormalized 2-D DFT, mean of `|Re|` and `|Im|` of the
//!   coefficient differences over all `2·H·W` parts.

use std::fmt;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::image::Image;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;
pub const GMSD_C: f64 = 170.0 / (255.0 * 255.0);

/// Peak signal-to-noise ratio in dB. Identical inputs give `f64::INFINITY`.
pub fn psnr(reference: &Image, test: &Image, peak: f64) -> Result<f64> {
    reference.ensure_same_shape(test, "psnr")?;
    if !(peak.is_finite() && peak > 0.0) {
        return Err(Error::Argument(format!("peak must be > 0, got {peak}")));
    }
    let mse = reference
        .as_slice()
        .iter()
        .zip(test.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / reference.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / mse).log10())
}

/// Normalized 1-D Gaussian taps of the SSIM window.
pub fn ssim_kernel() -> [f64; SSIM_WINDOW] {
    let half = (SSIM_WINDOW / 2) as f64;
    let mut k = [0.0; SSIM_WINDOW];
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - half;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Separable "valid" filtering: output is `(H-10) × (W-10)`.
fn filter_valid(data: &[f64], h: usize, w: usize, k: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let (oh, ow) = (h - SSIM_WINDOW + 1, w - SSIM_WINDOW + 1);
    let mut horiz = vec![0.0; h * ow];
    for r in 0..h {
        let row = &data[r * w..(r + 1) * w];
        for c in 0..ow {
            horiz[r * ow + c] = k
                .iter()
                .zip(&row[c..c + SSIM_WINDOW])
                .map(|(a, b)| a * b)
                .sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for r in 0..oh {
        for c in 0..ow {
            out[r * ow + c] = k
                .iter()
                .enumerate()
                .map(|(i, kv)| kv * horiz[(r + i) * ow + c])
                .sum();
        }
    }
    out
}

/// Mean structural similarity over all fully contained 11×11 windows.
pub fn ssim(reference: &Image, test: &Image) -> Result<f64> {
    reference.ensure_same_shape(test, "ssim")?;
    let (h, w) = reference.shape();
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(Error::Argument(format!(
            "ssim needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {h}x{w}"
        )));
    }
    let k = ssim_kernel();
    let x = reference.as_slice();
    let y = test.as_slice();
    let sq = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).collect::<Vec<_>>();
    let mu_x = filter_valid(x, h, w, &k);
    let mu_y = filter_valid(y, h, w, &k);
    let xx = filter_valid(&sq(x, x), h, w, &k);
    let yy = filter_valid(&sq(y, y), h, w, &k);
    let xy = filter_valid(&sq(x, y), h, w, &k);
    let c1 = (SSIM_K1 * 1.0).powi(2);
    let c2 = (SSIM_K2 * 1.0).powi(2);
    let n = mu_x.len();
    let total: f64 = (0..n)
        .map(|i| ssim_term(mu_x[i], mu_y[i], xx[i], yy[i], xy[i], c1, c2))
        .sum();
    Ok(total / n as f64)
}

/// Local SSIM from windowed first and second moments.
#[inline]
pub(crate) fn ssim_term(mx: f64, my: f64, exx: f64, eyy: f64, exy: f64, c1: f64, c2: f64) -> f64 {
    let sxx = exx - mx * mx;
    let syy = eyy - my * my;
    let sxy = exy - mx * my;
    ((2.0 * (mx * my) + c1) * (2.0 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2))
}

fn downsample2(image: &Image) -> (Vec<f64>, usize, usize) {
    let (h, w) = (image.height() / 2, image.width() / 2);
    let mut out = Vec::with_capacity(h * w);
    for r in 0..h {
        for c in 0..w {
            let s = image.get(2 * r, 2 * c)
                + image.get(2 * r, 2 * c + 1)
                + image.get(2 * r + 1, 2 * c)
                + image.get(2 * r + 1, 2 * c + 1);
            out.push(s / 4.0);
        }
    }
    (out, h, w)
}

fn prewitt_magnitude(data: &[f64], h: usize, w: usize) -> Vec<f64> {
    let at = |r: isize, c: isize| {
        let r = r.clamp(0, h as isize - 1) as usize;
        let c = c.clamp(0, w as isize - 1) as usize;
        data[r * w + c]
    };
    let mut out = Vec::with_capacity(h * w);
    for r in 0..h as isize {
        for c in 0..w as isize {
            let mut gx = 0.0;
            let mut gy = 0.0;
            for d in -1..=1 {
                gx += at(r + d, c + 1) - at(r + d, c - 1);
                gy += at(r + 1, c + d) - at(r - 1, c + d);
            }
            gx /= 3.0;
            gy /= 3.0;
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    out
}

/// Gradient magnitude similarity deviation. Lower is better; 0 for identical
/// inputs.
pub fn gmsd(reference: &Image, test: &Image) -> Result<f64> {
    reference.ensure_same_shape(test, "gmsd")?;
    let (h, w) = reference.shape();
    if h < 4 || w < 4 {
        return Err(Error::Argument(format!(
            "gmsd needs at least 4x4 pixels, got {h}x{w}"
        )));
    }
    let (a, dh, dw) = downsample2(reference);
    let (b, _, _) = downsample2(test);
    let ga = prewitt_magnitude(&a, dh, dw);
    let gb = prewitt_magnitude(&b, dh, dw);
    let gms: Vec<f64> = ga
        .iter()
        .zip(&gb)
        .map(|(&m1, &m2)| (2.0 * (m1 * m2) + GMSD_C) / (m1 * m1 + m2 * m2 + GMSD_C))
        .collect();
    let n = gms.len() as f64;
    let mean = gms.iter().sum::<f64>() / n;
    let var = gms.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / (n - 1.0);
    Ok(var.sqrt())
}

/// Unnormalized 2-D DFT, row-major `H×W` coefficients.
pub fn dft2(image: &Image) -> Vec<Complex<f64>> {
    let (h, w) = image.shape();
    let mut buf: Vec<Complex<f64>> = image
        .as_slice()
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = planner.plan_fft_forward(w);
    row_fft.process(&mut buf);
    let col_fft = planner.plan_fft_forward(h);
    let mut col = vec![Complex::new(0.0, 0.0); h];
    for c in 0..w {
        for r in 0..h {
            col[r] = buf[r * w + c];
        }
        col_fft.process(&mut col);
        for r in 0..h {
            buf[r * w + c] = col[r];
        }
    }
    buf
}

/// Mean absolute difference of DFT real and imaginary parts.
pub fn spectral_l1(reference: &Image, test: &Image) -> Result<f64> {
    reference.ensure_same_shape(test, "spectral_l1")?;
    let (h, w) = reference.shape();
    let diff = Image::from_vec(
        h,
        w,
        reference
            .as_slice()
            .iter()
            .zip(test.as_slice())
            .map(|(a, b)| a - b)
            .collect(),
    )?;
    let total: f64 = dft2(&diff).iter().map(|z| z.re.abs() + z.im.abs()).sum();
    Ok(total / (2 * h * w) as f64)
}

/// Rectangle a report was computed over, in the original image frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub top: usize,
    pub left: usize,
    pub height: usize,
    pub width: usize,
}

/// All metrics for one reference/test pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    #[serde(serialize_with = "ser_db", deserialize_with = "de_db")]
    pub psnr_db: f64,
    pub ssim: f64,
    pub gmsd: f64,
    pub spectral_l1: f64,
    pub region: Region,
}

impl MetricReport {
    pub const CSV_HEADER: &'static str = "psnr_db,ssim,gmsd,spectral_l1,top,left,height,width";

    /// One CSV row matching [`MetricReport::CSV_HEADER`]; infinite PSNR is
    /// written as `inf`.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            DisplayDb(self.psnr_db),
            self.ssim,
            self.gmsd,
            self.spectral_l1,
            self.region.top,
            self.region.left,
            self.region.height,
            self.region.width
        )
    }
}

/// Formats a dB value, spelling infinities as `inf` / `-inf`.
pub struct DisplayDb(pub f64);

impl fmt::Display for DisplayDb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            f.pad("inf")
        } else if self.0 == f64::NEG_INFINITY {
            f.pad("-inf")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}

pub(crate) fn ser_db<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&DisplayDb(*v).to_string())
    }
}

pub(crate) fn de_db<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Db {
        Num(f64),
        Text(String),
    }
    match Db::deserialize(d)? {
        Db::Num(v) => Ok(v),
        Db::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Db::Text(t) if t == "-inf" => Ok(f64::NEG_INFINITY),
        Db::Text(t) => Err(serde::de::Error::custom(format!("invalid dB value {t:?}"))),
    }
}

/// Evaluates every metric after trimming `margin` pixels from each border.
pub fn evaluate(reference: &Image, test: &Image, margin: usize) -> Result<MetricReport> {
    reference.ensure_same_shape(test, "evaluate")?;
    let (a, b) = if margin == 0 {
        (reference.clone(), test.clone())
    } else {
        (reference.interior(margin)?, test.interior(margin)?)
    };
    Ok(MetricReport {
        psnr_db: psnr(&a, &b, 1.0)?,
        ssim: ssim(&a, &b)?,
        gmsd: gmsd(&a, &b)?,
        spectral_l1: spectral_l1(&a, &b)?,
        region: Region {
            top: margin,
            left: margin,
            height: a.height(),
            width: a.width(),
        },
    })
}
