//! Minimal line-plot rasterizer for jitter curves.

use image::{Rgb, RgbImage};

const GLYPH_W: u32 = 5;
const GLYPH_H: u32 = 7;

fn glyph(ch: char) -> [u8; 7] {
    match ch.to_ascii_uppercase() {
        'A' => [0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11],
        'B' => [0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E],
        'C' => [0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E],
        'D' => [0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C],
        'E' => [0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F],
        'F' => [0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10],
        'G' => [0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F],
        'H' => [0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11],
        'I' => [0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E],
        'J' => [0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C],
        'K' => [0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11],
        'L' => [0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F],
        'M' => [0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11],
        'N' => [0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11],
        'O' => [0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E],
        'P' => [0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10],
        'Q' => [0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D],
        'R' => [0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11],
        'S' => [0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E],
        'T' => [0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04],
        'U' => [0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E],
        'V' => [0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04],
        'W' => [0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A],
        'X' => [0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11],
        'Y' => [0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04],
        'Z' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F],
        '0' => [0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E],
        '1' => [0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E],
        '2' => [0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F],
        '3' => [0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E],
        '4' => [0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02],
        '5' => [0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E],
        '6' => [0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E],
        '7' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
        '8' => [0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E],
        '9' => [0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C],
        '-' => [0, 0, 0, 0x1F, 0, 0, 0],
        '.' => [0, 0, 0, 0, 0, 0x0C, 0x0C],
        '+' => [0, 0x04, 0x04, 0x1F, 0x04, 0x04, 0],
        _ => [0; 7],
    }
}

pub fn draw_text(img: &mut RgbImage, x: u32, y: u32, text: &str, color: Rgb<u8>) {
    for (i, ch) in text.chars().enumerate() {
        let gx = x + i as u32 * (GLYPH_W + 1);
        for (row, bits) in glyph(ch).iter().enumerate() {
            for col in 0..GLYPH_W {
                if bits & (1 << (GLYPH_W - 1 - col)) != 0 {
                    put(img, (gx + col) as i64, (y + row as u32) as i64, color);
                }
            }
        }
    }
}

#[inline]
fn put(img: &mut RgbImage, x: i64, y: i64, color: Rgb<u8>) {
    if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.put_pixel(x as u32, y as u32, color);
    }
}

/// Bresenham line.
pub fn draw_line(img: &mut RgbImage, (x0, y0): (i64, i64), (x1, y1): (i64, i64), color: Rgb<u8>) {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        put(img, x, y, color);
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

pub struct Series<'a> {
    pub label: &'a str,
    pub color: Rgb<u8>,
    pub values: &'a [f64],
}

pub struct Panel<'a> {
    pub title: &'a str,
    pub series: Vec<Series<'a>>,
}

pub const PALETTE: [Rgb<u8>; 4] = [
    Rgb([31, 119, 180]),
    Rgb([255, 127, 14]),
    Rgb([44, 160, 44]),
    Rgb([214, 39, 40]),
];

const LEFT: u32 = 56;
const RIGHT: u32 = 12;
const TOP: u32 = 20;
const BOTTOM: u32 = 14;

/// Screen y coordinate of value `v` in a panel spanning `[lo, hi]`.
pub fn value_to_y(v: f64, lo: f64, hi: f64, y0: u32, plot_h: u32) -> i64 {
    let t = (v - lo) / (hi - lo);
    (y0 as f64 + (1.0 - t) * (plot_h - 1) as f64).round() as i64
}

/// Stacks the panels vertically, each `panel_height` pixels tall.
pub fn render_panels(panels: &[Panel<'_>], width: u32, panel_height: u32) -> RgbImage {
    let mut img = RgbImage::from_pixel(
        width,
        panel_height * panels.len() as u32,
        Rgb([255, 255, 255]),
    );
    let axis = Rgb([0, 0, 0]);
    let grid = Rgb([200, 200, 200]);
    for (p, panel) in panels.iter().enumerate() {
        let oy = p as u32 * panel_height;
        let plot_w = width - LEFT - RIGHT;
        let plot_h = panel_height - TOP - BOTTOM;
        let y0 = oy + TOP;

        let (mut lo, mut hi) = panel
            .series
            .iter()
            .flat_map(|s| s.values.iter().copied())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(v), b.max(v))
            });
        if !lo.is_finite() || hi - lo < 1e-12 {
            let mid = if lo.is_finite() { lo } else { 0.0 };
            lo = mid - 1.0;
            hi = mid + 1.0;
        }
        let pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;

        draw_text(&mut img, LEFT, oy + 4, panel.title, axis);
        if lo < 0.0 && hi > 0.0 {
            let zy = value_to_y(0.0, lo, hi, y0, plot_h);
            for x in (LEFT..LEFT + plot_w).step_by(3) {
                put(&mut img, x as i64, zy, grid);
            }
        }
        draw_text(&mut img, 2, y0, &format!("{hi:.2}"), axis);
        draw_text(
            &mut img,
            2,
            y0 + plot_h - GLYPH_H,
            &format!("{lo:.2}"),
            axis,
        );

        for s in &panel.series {
            let n = s.values.len();
            let xs = |i: usize| {
                if n <= 1 {
                    LEFT as i64
                } else {
                    LEFT as i64 + (i as f64 * (plot_w - 1) as f64 / (n - 1) as f64).round() as i64
                }
            };
            for i in 1..n {
                draw_line(
                    &mut img,
                    (xs(i - 1), value_to_y(s.values[i - 1], lo, hi, y0, plot_h)),
                    (xs(i), value_to_y(s.values[i], lo, hi, y0, plot_h)),
                    s.color,
                );
            }
            if n == 1 {
                put(
                    &mut img,
                    xs(0),
                    value_to_y(s.values[0], lo, hi, y0, plot_h),
                    s.color,
                );
            }
        }

        draw_line(
            &mut img,
            (LEFT as i64, y0 as i64),
            (LEFT as i64, (y0 + plot_h) as i64),
            axis,
        );
        draw_line(
            &mut img,
            (LEFT as i64, (y0 + plot_h) as i64),
            ((LEFT + plot_w) as i64, (y0 + plot_h) as i64),
            axis,
        );

        let longest = panel
            .series
            .iter()
            .map(|s| s.label.len())
            .max()
            .unwrap_or(0) as u32;
        let lx = (LEFT + plot_w).saturating_sub(longest * (GLYPH_W + 1) + 16);
        for (i, s) in panel.series.iter().enumerate() {
            let ly = oy + 4 + i as u32 * (GLYPH_H + 3);
            for dx in 0..10 {
                for dy in 2..5 {
                    put(&mut img, (lx + dx) as i64, (ly + dy) as i64, s.color);
                }
            }
            draw_text(&mut img, lx + 14, ly, s.label, axis);
        }
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_series_draws_a_horizontal_line() {
        let zeros = vec![0.0; 50];
        let img = render_panels(
            &[Panel {
                title: "ROLL",
                series: vec![Series {
                    label: "IDEAL",
                    color: PALETTE[0],
                    values: &zeros,
                }],
            }],
            300,
            120,
        );
        let plot_h = 120 - TOP - BOTTOM;
        let y = value_to_y(0.0, -1.1, 1.1, TOP, plot_h) as u32;
        let colored = (LEFT + 1..LEFT + 200)
            .filter(|&x| *img.get_pixel(x, y) == PALETTE[0])
            .count();
        assert!(colored > 190);
    }

    #[test]
    fn bresenham_hits_endpoints() {
        let mut img = RgbImage::new(10, 10);
        let c = Rgb([1, 2, 3]);
        draw_line(&mut img, (1, 8), (7, 2), c);
        assert_eq!(*img.get_pixel(1, 8), c);
        assert_eq!(*img.get_pixel(7, 2), c);
    }
}
