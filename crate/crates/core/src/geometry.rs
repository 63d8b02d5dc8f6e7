//! Jitter maps, bilinear backward warping and flow-based pre-correction.
//!
//! A [`FlowField`] stores, for every destination pixel, the displacement of
//! the source position it reads from. Warping by `+J` deforms a clean image;
//! warping by `-J` undoes that deformation to first order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::jitter::JitterCurve;
use crate::sidecar::{CurvePair, Sidecar};

/// Per-pixel displacement, in pixels.
///
/// `cross_track` moves along image rows (the sensor line, height axis) and
/// comes from roll. `along_track` moves along image columns (the pushbroom
/// axis, width) and comes from pitch.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Displacement {
    pub cross_track: f64,
    pub along_track: f64,
}

impl Displacement {
    pub const ZERO: Displacement = Displacement {
        cross_track: 0.0,
        along_track: 0.0,
    };

    pub fn new(cross_track: f64, along_track: f64) -> Self {
        Self {
            cross_track,
            along_track,
        }
    }

    fn is_finite(&self) -> bool {
        self.cross_track.is_finite() && self.along_track.is_finite()
    }
}

impl std::ops::Neg for Displacement {
    type Output = Displacement;

    fn neg(self) -> Displacement {
        Displacement::new(-self.cross_track, -self.along_track)
    }
}

/// H×W field of displacements, channel order (roll, pitch).
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    height: usize,
    width: usize,
    data: Vec<Displacement>,
}

impl FlowField {
    pub fn zeros(height: usize, width: usize) -> Self {
        Self::constant(height, width, Displacement::ZERO)
    }

    pub fn constant(height: usize, width: usize, d: Displacement) -> Self {
        Self {
            height,
            width,
            data: vec![d; height * width],
        }
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize) -> Displacement,
    ) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Displacement {
        self.data[row * self.width + col]
    }

    pub fn row(&self, row: usize) -> &[Displacement] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    pub fn as_slice(&self) -> &[Displacement] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(Displacement::is_finite)
    }

    /// Largest displacement magnitude in the field.
    pub fn max_magnitude(&self) -> f64 {
        self.data
            .iter()
            .map(|d| d.cross_track.hypot(d.along_track))
            .fold(0.0, f64::max)
    }

    /// True when every row equals the first one.
    pub fn rows_identical(&self) -> bool {
        let first = self.row(0);
        (1..self.height).all(|r| self.row(r) == first)
    }

    /// Recovers the (roll, pitch) curves of a field whose rows are identical.
    pub fn to_curves(&self) -> Result<CurvePair> {
        if self.height == 0 || !self.rows_identical() {
            return Err(Error::Argument(
                "only fields with identical rows reduce to curves".into(),
            ));
        }
        let row = self.row(0);
        CurvePair::new(
            JitterCurve::new(
                crate::jitter::Direction::Roll,
                row.iter().map(|d| d.cross_track).collect(),
            )?,
            JitterCurve::new(
                crate::jitter::Direction::Pitch,
                row.iter().map(|d| d.along_track).collect(),
            )?,
        )
    }

    /// Serializes as a one-record sidecar (curves once plus the height).
    pub fn to_sidecar(&self) -> Result<Sidecar> {
        Sidecar::new(self.height, vec![self.to_curves()?])
    }

    /// Rebuilds the field stored in a one-record sidecar.
    pub fn from_sidecar(sidecar: &Sidecar) -> Result<FlowField> {
        match sidecar.records.as_slice() {
            [pair] => build_jitter_map(&pair.roll, &pair.pitch, sidecar.height),
            _ => Err(Error::Argument(format!(
                "a flow field sidecar holds exactly one record, found {}",
                sidecar.records.len()
            ))),
        }
    }

    fn ensure_same_shape(&self, other: &FlowField) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Argument(format!(
                "flow shape mismatch {}x{} vs {}x{}",
                self.height, self.width, other.height, other.width
            )));
        }
        Ok(())
    }
}

/// How samples outside the source image are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPolicy {
    /// Out-of-bounds taps contribute zero.
    #[default]
    ZeroFill,
    /// Source coordinates are clamped to the image rectangle.
    ClampEdge,
}

/// Duplicates the curves along the height and stacks them into a flow field.
pub fn build_jitter_map(
    roll: &JitterCurve,
    pitch: &JitterCurve,
    height: usize,
) -> Result<FlowField> {
    if roll.width() != pitch.width() {
        return Err(Error::Argument(format!(
            "roll width {} differs from pitch width {}",
            roll.width(),
            pitch.width()
        )));
    }
    if height == 0 {
        return Err(Error::Argument("jitter map height must be >= 1".into()));
    }
    let row: Vec<Displacement> = roll
        .samples
        .iter()
        .zip(&pitch.samples)
        .map(|(&r, &p)| Displacement::new(r, p))
        .collect();
    let mut data = Vec::with_capacity(height * row.len());
    for _ in 0..height {
        data.extend_from_slice(&row);
    }
    Ok(FlowField {
        height,
        width: row.len(),
        data,
    })
}

#[inline]
fn bilinear(image: &Image, y: f64, x: f64, boundary: BoundaryPolicy) -> f64 {
    let (h, w) = image.shape();
    let (y, x) = match boundary {
        BoundaryPolicy::ClampEdge => (y.clamp(0.0, (h - 1) as f64), x.clamp(0.0, (w - 1) as f64)),
        BoundaryPolicy::ZeroFill => (y, x),
    };
    let y0 = y.floor();
    let x0 = x.floor();
    let fy = y - y0;
    let fx = x - x0;
    let (r0, c0) = (y0 as i64, x0 as i64);
    let mut acc = 0.0;
    for (dr, wy) in [(0, 1.0 - fy), (1, fy)] {
        if wy == 0.0 {
            continue;
        }
        let r = r0 + dr;
        if r < 0 || r >= h as i64 {
            continue;
        }
        for (dc, wx) in [(0, 1.0 - fx), (1, fx)] {
            if wx == 0.0 {
                continue;
            }
            let c = c0 + dc;
            if c < 0 || c >= w as i64 {
                continue;
            }
            acc += image.get(r as usize, c as usize) * (wy * wx);
        }
    }
    acc
}

/// Backward bilinear warp: `out(r, c) = image(r + cross_track, c + along_track)`.
pub fn grid_sample(image: &Image, flow: &FlowField, boundary: BoundaryPolicy) -> Result<Image> {
    if image.shape() != flow.shape() {
        return Err(Error::Argument(format!(
            "image {}x{} and flow {}x{} differ in shape",
            image.height(),
            image.width(),
            flow.height,
            flow.width
        )));
    }
    if !flow.is_finite() {
        return Err(Error::Domain(
            "flow field contains non-finite entries".into(),
        ));
    }
    let w = image.width();
    let mut out = vec![0.0; image.len()];
    out.par_chunks_mut(w).enumerate().for_each(|(r, dst)| {
        for (c, (px, d)) in dst.iter_mut().zip(flow.row(r)).enumerate() {
            *px = bilinear(
                image,
                r as f64 + d.cross_track,
                c as f64 + d.along_track,
                boundary,
            );
        }
    });
    Image::from_vec(image.height(), w, out)
}

/// Mean of the warps of `image` by each map.
pub fn deform_multi_subdivision(
    image: &Image,
    maps: &[FlowField],
    boundary: BoundaryPolicy,
) -> Result<Image> {
    let (first, rest) = maps
        .split_first()
        .ok_or_else(|| Error::Argument("at least one jitter map is required".into()))?;
    let mut acc = grid_sample(image, first, boundary)?;
    if rest.is_empty() {
        return Ok(acc);
    }
    for map in rest {
        let warped = grid_sample(image, map, boundary)?;
        for (a, v) in acc.as_mut_slice().iter_mut().zip(warped.as_slice()) {
            *a += v;
        }
    }
    let n = maps.len() as f64;
    Ok(acc.map(|v| v / n))
}

/// Element-wise mean of flow fields.
pub fn mean_flow(maps: &[FlowField]) -> Result<FlowField> {
    let (first, rest) = maps
        .split_first()
        .ok_or_else(|| Error::Argument("at least one jitter map is required".into()))?;
    let mut acc = first.clone();
    if rest.is_empty() {
        return Ok(acc);
    }
    for map in rest {
        acc.ensure_same_shape(map)?;
        for (a, d) in acc.data.iter_mut().zip(&map.data) {
            a.cross_track += d.cross_track;
            a.along_track += d.along_track;
        }
    }
    let n = maps.len() as f64;
    for a in &mut acc.data {
        a.cross_track /= n;
        a.along_track /= n;
    }
    Ok(acc)
}

/// Optical flow approximated by the negated noisy jitter map.
pub fn flow_from_noisy_map(noisy_map: &FlowField) -> FlowField {
    FlowField {
        height: noisy_map.height,
        width: noisy_map.width,
        data: noisy_map.data.iter().map(|&d| -d).collect(),
    }
}

/// Warps `degraded` by the negated mean of the noisy subdivision maps.
pub fn precorrect(
    degraded: &Image,
    noisy_maps: &[FlowField],
    boundary: BoundaryPolicy,
) -> Result<Image> {
    let flow = flow_from_noisy_map(&mean_flow(noisy_maps)?);
    grid_sample(degraded, &flow, boundary)
}

/// Mean absolute difference over all `2·H·W` flow components.
pub fn flow_l1_distance(a: &FlowField, b: &FlowField) -> Result<f64> {
    a.ensure_same_shape(b)?;
    let total: f64 = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(p, q)| (p.cross_track - q.cross_track).abs() + (p.along_track - q.along_track).abs())
        .sum();
    Ok(total / (2 * a.data.len()) as f64)
}
