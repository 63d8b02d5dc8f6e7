//! PNG reading/writing and content checksums.

use std::io::Cursor;
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::{DynamicImage, ImageBuffer, Luma};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::sensor;

/// Rec. 601 luma weights.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// Converts any decoded image to a `[0, 1]` luma raster. Gray inputs are
/// taken as-is; color inputs use Rec. 601 weights. Alpha is ignored.
pub fn to_luma(decoded: DynamicImage) -> Result<Image> {
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    let data: Vec<f64> = if decoded.color().has_color() {
        decoded
            .into_rgb16()
            .pixels()
            .map(|p| {
                let [r, g, b] = p.0;
                (LUMA_WEIGHTS[0] * r as f64
                    + LUMA_WEIGHTS[1] * g as f64
                    + LUMA_WEIGHTS[2] * b as f64)
                    / 65535.0
            })
            .collect()
    } else {
        decoded
            .into_luma16()
            .pixels()
            .map(|p| p.0[0] as f64 / 65535.0)
            .collect()
    };
    Image::from_vec(h, w, data)
}

fn codec_error(path: &Path, e: image::ImageError) -> Error {
    match e {
        image::ImageError::IoError(source) => Error::io(path, source),
        source => Error::Image {
            path: path.to_path_buf(),
            source,
        },
    }
}

/// Reads an image file as luma.
pub fn read_luma(path: &Path) -> Result<Image> {
    let decoded = image::open(path).map_err(|e| codec_error(path, e))?;
    to_luma(decoded)
}

/// Reads only the dimensions `(height, width)` from the file header.
pub fn probe_dimensions(path: &Path) -> Result<(usize, usize)> {
    let (w, h) = image::image_dimensions(path).map_err(|e| codec_error(path, e))?;
    Ok((h as usize, w as usize))
}

/// Encodes as a 16-bit grayscale PNG after clamping and quantizing.
pub fn encode_png16(image: &Image) -> Result<Vec<u8>> {
    let levels = sensor::levels(16)?;
    let samples: Vec<u16> = image
        .as_slice()
        .iter()
        .map(|v| (v.clamp(0.0, 1.0) * levels).round() as u16)
        .collect();
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(image.width() as u32, image.height() as u32, samples)
            .expect("buffer sized from image");
    let mut bytes = Vec::new();
    DynamicImage::ImageLuma16(buf)
        .write_with_encoder(PngEncoder::new(Cursor::new(&mut bytes)))
        .map_err(|source| Error::Image {
            path: "<memory>".into(),
            source,
        })?;
    Ok(bytes)
}

/// Writes a 16-bit PNG and returns the SHA-256 of the written bytes.
pub fn write_png16(path: &Path, image: &Image) -> Result<String> {
    let bytes = encode_png16(image)?;
    write_bytes(path, &bytes)?;
    Ok(sha256_hex(&bytes))
}

/// Writes an 8-bit RGB image as PNG.
pub fn write_rgb_png(path: &Path, image: &image::RgbImage) -> Result<String> {
    let mut bytes = Vec::new();
    image
        .write_with_encoder(PngEncoder::new(Cursor::new(&mut bytes)))
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?;
    write_bytes(path, &bytes)?;
    Ok(sha256_hex(&bytes))
}

/// Writes `bytes`, creating missing parent directories.
pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}
