//! Independent reference implementations and fixtures shared by the
//! integration tests. Oracles are deliberately naive: direct loops over the
//! defining sums, no shared code with the library beyond the `Image` type.

#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;
use std::path::Path;

use lapjitter::{io, scene, Image};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(rng: &mut impl Rng, h: usize, w: usize) -> Image {
    Image::from_fn(h, w, |_, _| rng.random::<f64>())
}

/// Averaged subdivision samples of one sinusoid, from the sum-of-sines
/// identity: the mean of `M` equally spaced phases is a scaled sine with a
/// half-spread phase shift.
pub fn dirichlet_cdsm(amp: f64, freq: f64, phase: f64, tau: f64, m: usize, column: usize) -> f64 {
    let mf = m as f64;
    let x = PI * freq * tau;
    let gain = if (x / mf).sin().abs() < 1e-300 {
        1.0
    } else {
        x.sin() / (mf * (x / mf).sin())
    };
    let k = (column + 1) as f64;
    amp * gain * (2.0 * PI * freq * k * tau + phase + x * (mf - 1.0) / mf).sin()
}

pub fn naive_mse(a: &Image, b: &Image) -> f64 {
    let mut s = 0.0;
    for r in 0..a.height() {
        for c in 0..a.width() {
            let d = a.get(r, c) - b.get(r, c);
            s += d * d;
        }
    }
    s / (a.height() * a.width()) as f64
}

pub fn naive_psnr(a: &Image, b: &Image) -> f64 {
    let mse = naive_mse(a, b);
    if mse == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * mse.log10()
    }
}

/// 2-D Gaussian window built directly from the 2-D exponential.
fn gaussian_window() -> Vec<Vec<f64>> {
    let mut w = vec![vec![0.0; 11]; 11];
    let mut total = 0.0;
    for (i, row) in w.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (di, dj) = (i as f64 - 5.0, j as f64 - 5.0);
            *v = (-(di * di + dj * dj) / (2.0 * 1.5 * 1.5)).exp();
            total += *v;
        }
    }
    for row in &mut w {
        for v in row {
            *v /= total;
        }
    }
    w
}

/// SSIM as the mean over every fully contained window of the local index,
/// with local statistics computed as weighted central moments.
pub fn naive_ssim(a: &Image, b: &Image) -> f64 {
    let g = gaussian_window();
    let c1 = 0.01f64.powi(2);
    let c2 = 0.03f64.powi(2);
    let mut total = 0.0;
    let mut count = 0;
    for r0 in 0..=a.height() - 11 {
        for c0 in 0..=a.width() - 11 {
            let (mut mx, mut my) = (0.0, 0.0);
            for i in 0..11 {
                for j in 0..11 {
                    mx += g[i][j] * a.get(r0 + i, c0 + j);
                    my += g[i][j] * b.get(r0 + i, c0 + j);
                }
            }
            let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
            for i in 0..11 {
                for j in 0..11 {
                    let dx = a.get(r0 + i, c0 + j) - mx;
                    let dy = b.get(r0 + i, c0 + j) - my;
                    vx += g[i][j] * dx * dx;
                    vy += g[i][j] * dy * dy;
                    cxy += g[i][j] * dx * dy;
                }
            }
            total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1;
        }
    }
    total / count as f64
}

/// GMSD with per-pixel Prewitt responses on the 2×2-averaged image, edge
/// replication at the border.
pub fn naive_gmsd(a: &Image, b: &Image) -> f64 {
    fn pooled(img: &Image) -> Vec<Vec<f64>> {
        (0..img.height() / 2)
            .map(|r| {
                (0..img.width() / 2)
                    .map(|c| {
                        (img.get(2 * r, 2 * c)
                            + img.get(2 * r + 1, 2 * c)
                            + img.get(2 * r, 2 * c + 1)
                            + img.get(2 * r + 1, 2 * c + 1))
                            / 4.0
                    })
                    .collect()
            })
            .collect()
    }
    fn magnitude(p: &[Vec<f64>], r: usize, c: usize) -> f64 {
        let h = p.len() as i64;
        let w = p[0].len() as i64;
        let px = |i: i64, j: i64| p[i.clamp(0, h - 1) as usize][j.clamp(0, w - 1) as usize];
        let hx = [[1.0, 0.0, -1.0]; 3];
        let (r, c) = (r as i64, c as i64);
        let (mut gx, mut gy) = (0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                let v = px(r + i as i64 - 1, c + j as i64 - 1);
                // correlation with [1 0 -1] gives left minus right; negate
                gx -= hx[i][j] / 3.0 * v;
                gy -= hx[j][i] / 3.0 * v;
            }
        }
        (gx * gx + gy * gy).sqrt()
    }
    let pa = pooled(a);
    let pb = pooled(b);
    let c = 170.0 / (255.0 * 255.0);
    let mut gms = Vec::new();
    for r in 0..pa.len() {
        for col in 0..pa[0].len() {
            let m1 = magnitude(&pa, r, col);
            let m2 = magnitude(&pb, r, col);
            gms.push((2.0 * m1 * m2 + c) / (m1 * m1 + m2 * m2 + c));
        }
    }
    let n = gms.len() as f64;
    let mean = gms.iter().sum::<f64>() / n;
    (gms.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// O(N²) 2-D DFT by the defining double sum.
pub fn naive_dft(img: &Image) -> Vec<(f64, f64)> {
    let (h, w) = img.shape();
    let mut out = Vec::with_capacity(h * w);
    for u in 0..h {
        for v in 0..w {
            let (mut re, mut im) = (0.0, 0.0);
            for r in 0..h {
                for c in 0..w {
                    let ang = -2.0 * PI * ((u * r) as f64 / h as f64 + (v * c) as f64 / w as f64);
                    re += img.get(r, c) * ang.cos();
                    im += img.get(r, c) * ang.sin();
                }
            }
            out.push((re, im));
        }
    }
    out
}

pub fn naive_spectral_l1(a: &Image, b: &Image) -> f64 {
    let fa = naive_dft(a);
    let fb = naive_dft(b);
    let s: f64 = fa
        .iter()
        .zip(&fb)
        .map(|(p, q)| (p.0 - q.0).abs() + (p.1 - q.1).abs())
        .sum();
    s / (2 * a.len()) as f64
}

/// Writes `count` procedural scenes of the given size as 16-bit PNGs.
pub fn write_corpus(dir: &Path, count: usize, h: usize, w: usize, seed: u64) {
    for i in 0..count {
        let img = scene::aerial_scene(h, w, seed + i as u64);
        io::write_png16(&dir.join(format!("img_{i:02}.png")), &img).unwrap();
    }
}

pub fn sample_std(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Largest absolute horizontal or vertical neighbor difference.
pub fn max_gradient(img: &Image) -> f64 {
    let mut m: f64 = 0.0;
    for r in 0..img.height() {
        for c in 0..img.width() {
            if c + 1 < img.width() {
                m = m.max((img.get(r, c + 1) - img.get(r, c)).abs());
            }
            if r + 1 < img.height() {
                m = m.max((img.get(r + 1, c) - img.get(r, c)).abs());
            }
        }
    }
    m
}
