//! Quantization and raster-image containers.
//!
//! A [`SampleGrid`] in `[0, 1]` is quantized to integer pixels at 8 or 16
//! bits, serialized into PNG, TIFF or JPEG bytes, and recovered again. PNG
//! and uncompressed TIFF round-trip pixels bit-exactly; baseline JPEG is
//! lossy. Decode metadata (geometry, mode, sample rate, counts) travels in a
//! sidecar manifest, see [`manifest`].

mod manifest;
mod tiff;

pub use manifest::{read_manifest, write_manifest, Manifest, MANIFEST_MAGIC};

use std::fmt;
use std::io::Cursor;

use image::{DynamicImage, ImageBuffer, Luma};

use crate::prep::SampleGrid;
use crate::real::{from_u32, Real};

/// Raster container formats the pipeline can carry audio in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImageFormat {
    Png,
    Tiff,
    Jpeg,
}

impl ImageFormat {
    /// Guess the format from a file extension (`png`, `tif`/`tiff`,
    /// `jpg`/`jpeg`), case-insensitive.
    pub fn from_extension(ext: &str) -> Option<Self> {
        match ext.to_ascii_lowercase().as_str() {
            "png" => Some(ImageFormat::Png),
            "tif" | "tiff" => Some(ImageFormat::Tiff),
            "jpg" | "jpeg" => Some(ImageFormat::Jpeg),
            _ => None,
        }
    }
}

impl fmt::Display for ImageFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImageFormat::Png => "PNG",
            ImageFormat::Tiff => "TIFF",
            ImageFormat::Jpeg => "JPEG",
        })
    }
}

/// Errors from quantization, container codecs, and manifests.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("unsupported pixel depth {0} (expected 8 or 16)")]
    UnsupportedDepth(u8),
    #[error("codec depth {spec} does not match grid depth {grid}")]
    DepthMismatch { spec: u8, grid: u8 },
    #[error("jpeg quality {0} out of range 1..=100")]
    InvalidQuality(u8),
    #[error("malformed image: {0}")]
    MalformedImage(String),
    #[error("unsupported image: {0}")]
    UnsupportedImage(String),
    #[error("malformed manifest: {0}")]
    MalformedManifest(String),
}

/// Integer pixel grid at a declared bit depth.
///
/// Pixels are stored row-major as `u16` regardless of depth; at 8 bits every
/// value fits in `[0, 255]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedGrid {
    rows: usize,
    cols: usize,
    bits: u8,
    pixels: Vec<u16>,
}

impl QuantizedGrid {
    pub fn new(rows: usize, cols: usize, bits: u8, pixels: Vec<u16>) -> Result<Self, CodecError> {
        if bits != 8 && bits != 16 {
            return Err(CodecError::UnsupportedDepth(bits));
        }
        let cells = rows
            .checked_mul(cols)
            .filter(|_| rows > 0 && cols > 0)
            .ok_or_else(|| CodecError::MalformedImage("empty or oversized grid".into()))?;
        if pixels.len() != cells {
            return Err(CodecError::MalformedImage(format!(
                "{} pixels do not fill a {}x{} grid",
                pixels.len(),
                rows,
                cols
            )));
        }
        let max = max_code(bits);
        if pixels.iter().any(|&p| p > max) {
            return Err(CodecError::MalformedImage(format!(
                "pixel exceeds {bits}-bit range"
            )));
        }
        Ok(QuantizedGrid {
            rows,
            cols,
            bits,
            pixels,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bits(&self) -> u8 {
        self.bits
    }

    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }
}

/// Container format plus the knobs for one encode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecSpec {
    format: ImageFormat,
    bits: u8,
    jpeg_quality: u8,
}

impl CodecSpec {
    pub const DEFAULT_JPEG_QUALITY: u8 = 75;

    /// A codec spec with the default JPEG quality.
    pub fn new(format: ImageFormat, bits: u8) -> Result<Self, CodecError> {
        Self::with_quality(format, bits, Self::DEFAULT_JPEG_QUALITY)
    }

    pub fn with_quality(format: ImageFormat, bits: u8, jpeg_quality: u8) -> Result<Self, CodecError> {
        if bits != 8 && bits != 16 {
            return Err(CodecError::UnsupportedDepth(bits));
        }
        // Baseline JPEG carries 8-bit samples only.
        if format == ImageFormat::Jpeg && bits != 8 {
            return Err(CodecError::UnsupportedDepth(bits));
        }
        if !(1..=100).contains(&jpeg_quality) {
            return Err(CodecError::InvalidQuality(jpeg_quality));
        }
        Ok(CodecSpec {
            format,
            bits,
            jpeg_quality,
        })
    }

    pub fn format(&self) -> ImageFormat {
        self.format
    }

    pub fn bits(&self) -> u8 {
        self.bits
    }

    pub fn jpeg_quality(&self) -> u8 {
        self.jpeg_quality
    }
}

fn max_code(bits: u8) -> u16 {
    ((1u32 << bits) - 1) as u16
}

/// Map unit-interval values onto integer codes:
/// `pixel = round_half_away_from_zero(value * (2^bits - 1))`.
///
/// Values are clamped into `[0, 1]` first, so float noise slightly outside
/// the interval cannot produce out-of-range codes.
pub fn quantize<T: Real>(grid: &SampleGrid<T>, bits: u8) -> Result<QuantizedGrid, CodecError> {
    if bits != 8 && bits != 16 {
        return Err(CodecError::UnsupportedDepth(bits));
    }
    let max = max_code(bits);
    let scale = from_u32::<T>(max as u32);
    let pixels = grid
        .values()
        .iter()
        .map(|&v| {
            let clamped = v.max(T::zero()).min(T::one());
            (clamped * scale).round().to_u16().unwrap_or(max)
        })
        .collect();
    QuantizedGrid::new(grid.rows(), grid.cols(), bits, pixels)
}

/// Inverse of [`quantize`]: `value = pixel / (2^bits - 1)`.
///
/// The grid's `meaningful_count` is not recoverable here; it spans the whole
/// rectangle until the manifest restores the real count.
pub fn dequantize<T: Real>(q: &QuantizedGrid) -> SampleGrid<T> {
    let scale = from_u32::<T>(max_code(q.bits) as u32);
    let values: Vec<T> = q
        .pixels
        .iter()
        .map(|&p| from_u32::<T>(p as u32) / scale)
        .collect();
    SampleGrid::new(q.rows, q.cols, values, q.rows * q.cols)
        .expect("quantized grid geometry is valid")
}

/// Serialize a pixel grid into container bytes.
///
/// PNG is single-channel grayscale at 8 or 16 bits, losslessly compressed.
/// TIFF is baseline grayscale, uncompressed, little-endian, single strip.
/// JPEG is baseline grayscale at the spec's quality.
pub fn encode_image(q: &QuantizedGrid, spec: &CodecSpec) -> Result<Vec<u8>, CodecError> {
    if spec.bits != q.bits {
        return Err(CodecError::DepthMismatch {
            spec: spec.bits,
            grid: q.bits,
        });
    }
    match spec.format {
        ImageFormat::Png => {
            let mut out = Cursor::new(Vec::new());
            let result = match q.bits {
                8 => DynamicImage::ImageLuma8(to_luma8(q)).write_to(&mut out, image::ImageFormat::Png),
                16 => DynamicImage::ImageLuma16(to_luma16(q)).write_to(&mut out, image::ImageFormat::Png),
                _ => unreachable!("grid depth is validated"),
            };
            result.map_err(|e| CodecError::MalformedImage(format!("png encode: {e}")))?;
            Ok(out.into_inner())
        }
        ImageFormat::Tiff => tiff::encode(q),
        ImageFormat::Jpeg => {
            let mut out = Cursor::new(Vec::new());
            let mut encoder =
                image::codecs::jpeg::JpegEncoder::new_with_quality(&mut out, spec.jpeg_quality);
            encoder
                .encode_image(&to_luma8(q))
                .map_err(|e| CodecError::MalformedImage(format!("jpeg encode: {e}")))?;
            Ok(out.into_inner())
        }
    }
}

/// Parse container bytes back into a pixel grid.
///
/// Geometry comes from the container header. Grayscale at 8 or 16 bits is
/// accepted; color and multi-channel images are rejected.
pub fn decode_image(bytes: &[u8], format: ImageFormat) -> Result<QuantizedGrid, CodecError> {
    match format {
        ImageFormat::Tiff => tiff::decode(bytes),
        ImageFormat::Png | ImageFormat::Jpeg => {
            let native = match format {
                ImageFormat::Png => image::ImageFormat::Png,
                _ => image::ImageFormat::Jpeg,
            };
            let img = image::load_from_memory_with_format(bytes, native)
                .map_err(|e| CodecError::MalformedImage(format!("{format} decode: {e}")))?;
            match img {
                DynamicImage::ImageLuma8(buf) => {
                    let (cols, rows) = (buf.width() as usize, buf.height() as usize);
                    let pixels = buf.into_raw().into_iter().map(u16::from).collect();
                    QuantizedGrid::new(rows, cols, 8, pixels)
                }
                DynamicImage::ImageLuma16(buf) => {
                    let (cols, rows) = (buf.width() as usize, buf.height() as usize);
                    QuantizedGrid::new(rows, cols, 16, buf.into_raw())
                }
                other => Err(CodecError::UnsupportedImage(format!(
                    "{format} with color type {:?} (single-channel grayscale only)",
                    other.color()
                ))),
            }
        }
    }
}

fn to_luma8(q: &QuantizedGrid) -> ImageBuffer<Luma<u8>, Vec<u8>> {
    let data: Vec<u8> = q.pixels.iter().map(|&p| p as u8).collect();
    ImageBuffer::from_raw(dim(q.cols), dim(q.rows), data).expect("pixel count matches geometry")
}

fn to_luma16(q: &QuantizedGrid) -> ImageBuffer<Luma<u16>, Vec<u16>> {
    ImageBuffer::from_raw(dim(q.cols), dim(q.rows), q.pixels.clone())
        .expect("pixel count matches geometry")
}

fn dim(n: usize) -> u32 {
    u32::try_from(n).expect("grid dimensions fit the container header")
}
