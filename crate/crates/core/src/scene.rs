//! Procedural aerial-like test scenes.
//!
//! Used as a deterministic stand-in corpus for examples and tests: smooth
//! multi-octave terrain, field parcels with row texture, road lines and
//! rectangular buildings with hard edges.

use rand::Rng;

use crate::image::Image;
use crate::seed;

fn value_noise(height: usize, width: usize, cell: usize, rng: &mut impl Rng) -> Vec<f64> {
    let gh = height / cell + 2;
    let gw = width / cell + 2;
    let lattice: Vec<f64> = (0..gh * gw).map(|_| rng.random()).collect();
    let mut out = Vec::with_capacity(height * width);
    for r in 0..height {
        let fy = r as f64 / cell as f64;
        let (y0, ty) = (fy.floor() as usize, fy.fract());
        for c in 0..width {
            let fx = c as f64 / cell as f64;
            let (x0, tx) = (fx.floor() as usize, fx.fract());
            let (sy, sx) = (ty * ty * (3.0 - 2.0 * ty), tx * tx * (3.0 - 2.0 * tx));
            let at = |y: usize, x: usize| lattice[y * gw + x];
            let top = at(y0, x0) * (1.0 - sx) + at(y0, x0 + 1) * sx;
            let bot = at(y0 + 1, x0) * (1.0 - sx) + at(y0 + 1, x0 + 1) * sx;
            out.push(top * (1.0 - sy) + bot * sy);
        }
    }
    out
}

/// Generates a `height × width` scene with values in `[0, 1]`.
pub fn aerial_scene(height: usize, width: usize, seed: u64) -> Image {
    let mut rng = seed::rng(seed, 0x5CE4E);
    let coarse = value_noise(height, width, 64, &mut rng);
    let mid = value_noise(height, width, 16, &mut rng);
    let fine = value_noise(height, width, 4, &mut rng);
    let mut img = Image::from_fn(height, width, |r, c| {
        let i = r * width + c;
        0.25 + 0.3 * coarse[i] + 0.15 * mid[i] + 0.08 * fine[i]
    });

    let area = (height * width) as f64;
    let parcels = (area / 40_000.0).ceil() as usize + 2;
    for _ in 0..parcels {
        let (h, w) = (rng.random_range(20..=90), rng.random_range(20..=120));
        let (top, left) = (rng.random_range(0..height), rng.random_range(0..width));
        let base = rng.random_range(0.2..0.75);
        let period = rng.random_range(3.0..9.0);
        let angle: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let (s, co) = angle.sin_cos();
        for r in top..(top + h).min(height) {
            for c in left..(left + w).min(width) {
                let u = r as f64 * s + c as f64 * co;
                img.set(
                    r,
                    c,
                    base + 0.08 * (u * std::f64::consts::TAU / period).sin(),
                );
            }
        }
    }

    let roads = rng.random_range(2..=4);
    for i in 0..roads {
        let shade = rng.random_range(0.05..0.2);
        let thick = rng.random_range(2..6);
        if i % 2 == 0 {
            let r0 = rng.random_range(0..height);
            for r in r0..(r0 + thick).min(height) {
                (0..width).for_each(|c| img.set(r, c, shade));
            }
        } else {
            let c0 = rng.random_range(0..width);
            for r in 0..height {
                for c in c0..(c0 + thick).min(width) {
                    img.set(r, c, shade);
                }
            }
        }
    }

    let buildings = (area / 6_000.0).ceil() as usize + 3;
    for _ in 0..buildings {
        let (h, w) = (rng.random_range(4..=24), rng.random_range(4..=24));
        let (top, left) = (rng.random_range(0..height), rng.random_range(0..width));
        let roof = rng.random_range(0.55..0.95);
        for r in top..(top + h).min(height) {
            for c in left..(left + w).min(width) {
                img.set(r, c, roof);
            }
        }
        // cast shadow on the lower-right side
        for r in (top + h).min(height)..(top + h + 3).min(height) {
            for c in (left + 2).min(width)..(left + w + 2).min(width) {
                img.set(r, c, img.get(r, c) * 0.5);
            }
        }
    }
    img.map(|v| v.clamp(0.0, 1.0))
}
