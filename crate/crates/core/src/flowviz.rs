//! Color-wheel rendering of flow fields: hue encodes direction, saturation
//! encodes magnitude relative to the field maximum, value is always 1.

use image::{Rgb, RgbImage};

use crate::geometry::{Displacement, FlowField};

/// HSV (hue in degrees) to 8-bit RGB.
pub fn hsv_to_rgb(hue_deg: f64, saturation: f64, value: f64) -> Rgb<u8> {
    let h = hue_deg.rem_euclid(360.0) / 60.0;
    let c = value * saturation;
    let x = c * (1.0 - (h % 2.0 - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = value - c;
    let q = |v: f64| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    Rgb([q(r), q(g), q(b)])
}

/// Hue of a displacement in degrees. The x axis points along the image
/// width (along track), the y axis down the rows (cross track).
pub fn direction_hue(d: Displacement) -> f64 {
    d.cross_track
        .atan2(d.along_track)
        .to_degrees()
        .rem_euclid(360.0)
}

/// Renders the field; a zero field is uniformly white.
pub fn render_flow(flow: &FlowField) -> RgbImage {
    let max = flow.max_magnitude();
    RgbImage::from_fn(flow.width() as u32, flow.height() as u32, |x, y| {
        let d = flow.get(y as usize, x as usize);
        let mag = d.cross_track.hypot(d.along_track);
        let sat = if max > 0.0 { mag / max } else { 0.0 };
        hsv_to_rgb(direction_hue(d), sat, 1.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_is_neutral() {
        let img = render_flow(&FlowField::zeros(4, 6));
        assert!(img.pixels().all(|p| *p == Rgb([255, 255, 255])));
    }

    #[test]
    fn constant_field_is_single_hue() {
        let img = render_flow(&FlowField::constant(3, 5, Displacement::new(0.0, 1.0)));
        assert!(img.pixels().all(|p| *p == Rgb([255, 0, 0])));
        let down = render_flow(&FlowField::constant(2, 2, Displacement::new(2.0, 0.0)));
        let first = *down.get_pixel(0, 0);
        assert!(down.pixels().all(|p| *p == first));
        assert_ne!(first, Rgb([255, 0, 0]));
    }

    #[test]
    fn primary_hues() {
        assert_eq!(hsv_to_rgb(120.0, 1.0, 1.0), Rgb([0, 255, 0]));
        assert_eq!(hsv_to_rgb(240.0, 1.0, 1.0), Rgb([0, 0, 255]));
        assert_eq!(hsv_to_rgb(0.0, 0.0, 1.0), Rgb([255, 255, 255]));
    }
}
