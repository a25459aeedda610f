//! Minimal baseline TIFF: grayscale, uncompressed, little-endian ("II"),
//! one strip holding the whole image. Nothing else is written, and the
//! reader rejects anything outside that subset rather than guessing.

use super::{CodecError, QuantizedGrid};

const LITTLE_ENDIAN: &[u8; 2] = b"II";
const BIG_ENDIAN: &[u8; 2] = b"MM";
const MAGIC: u16 = 42;

// Baseline tags, in the ascending order TIFF requires inside an IFD.
const TAG_IMAGE_WIDTH: u16 = 256;
const TAG_IMAGE_LENGTH: u16 = 257;
const TAG_BITS_PER_SAMPLE: u16 = 258;
const TAG_COMPRESSION: u16 = 259;
const TAG_PHOTOMETRIC: u16 = 262;
const TAG_STRIP_OFFSETS: u16 = 273;
const TAG_SAMPLES_PER_PIXEL: u16 = 277;
const TAG_ROWS_PER_STRIP: u16 = 278;
const TAG_STRIP_BYTE_COUNTS: u16 = 279;
const TAG_SAMPLE_FORMAT: u16 = 339;

const TYPE_SHORT: u16 = 3;
const TYPE_LONG: u16 = 4;

const COMPRESSION_NONE: u32 = 1;
const PHOTOMETRIC_BLACK_IS_ZERO: u32 = 1;
const SAMPLE_FORMAT_UNSIGNED: u32 = 1;

/// Pixel data sits right after the 8-byte header; the IFD follows it.
const DATA_OFFSET: u32 = 8;

pub fn encode(q: &QuantizedGrid) -> Result<Vec<u8>, CodecError> {
    let cols = u32::try_from(q.cols())
        .map_err(|_| CodecError::UnsupportedImage("width exceeds u32".into()))?;
    let rows = u32::try_from(q.rows())
        .map_err(|_| CodecError::UnsupportedImage("height exceeds u32".into()))?;
    let bytes_per_pixel = (q.bits() / 8) as u32;
    let data_len = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(bytes_per_pixel))
        .ok_or_else(|| CodecError::UnsupportedImage("image larger than 4 GiB".into()))?;
    // IFDs must start on a word boundary.
    let align = data_len & 1;
    let ifd_offset = DATA_OFFSET + data_len + align;

    let mut out = Vec::with_capacity((ifd_offset + 2 + 10 * 12 + 4) as usize);
    out.extend_from_slice(LITTLE_ENDIAN);
    out.extend_from_slice(&MAGIC.to_le_bytes());
    out.extend_from_slice(&ifd_offset.to_le_bytes());

    match q.bits() {
        8 => out.extend(q.pixels().iter().map(|&p| p as u8)),
        16 => {
            for &p in q.pixels() {
                out.extend_from_slice(&p.to_le_bytes());
            }
        }
        _ => unreachable!("grid depth is validated"),
    }
    if align == 1 {
        out.push(0);
    }

    let entries: [(u16, u16, u32); 10] = [
        (TAG_IMAGE_WIDTH, TYPE_LONG, cols),
        (TAG_IMAGE_LENGTH, TYPE_LONG, rows),
        (TAG_BITS_PER_SAMPLE, TYPE_SHORT, q.bits() as u32),
        (TAG_COMPRESSION, TYPE_SHORT, COMPRESSION_NONE),
        (TAG_PHOTOMETRIC, TYPE_SHORT, PHOTOMETRIC_BLACK_IS_ZERO),
        (TAG_STRIP_OFFSETS, TYPE_LONG, DATA_OFFSET),
        (TAG_SAMPLES_PER_PIXEL, TYPE_SHORT, 1),
        (TAG_ROWS_PER_STRIP, TYPE_LONG, rows),
        (TAG_STRIP_BYTE_COUNTS, TYPE_LONG, data_len),
        (TAG_SAMPLE_FORMAT, TYPE_SHORT, SAMPLE_FORMAT_UNSIGNED),
    ];
    out.extend_from_slice(&(entries.len() as u16).to_le_bytes());
    for (tag, kind, value) in entries {
        out.extend_from_slice(&tag.to_le_bytes());
        out.extend_from_slice(&kind.to_le_bytes());
        out.extend_from_slice(&1u32.to_le_bytes());
        match kind {
            // SHORT values occupy the low two bytes of the value field.
            TYPE_SHORT => {
                out.extend_from_slice(&(value as u16).to_le_bytes());
                out.extend_from_slice(&[0, 0]);
            }
            _ => out.extend_from_slice(&value.to_le_bytes()),
        }
    }
    // No further IFDs.
    out.extend_from_slice(&0u32.to_le_bytes());
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<QuantizedGrid, CodecError> {
    if bytes.len() < 8 {
        return Err(CodecError::MalformedImage("tiff shorter than header".into()));
    }
    match &bytes[0..2] {
        b if b == LITTLE_ENDIAN => {}
        b if b == BIG_ENDIAN => {
            return Err(CodecError::UnsupportedImage(
                "big-endian tiff (little-endian subset only)".into(),
            ))
        }
        _ => return Err(CodecError::MalformedImage("tiff byte-order mark missing".into())),
    }
    if read_u16(bytes, 2)? != MAGIC {
        return Err(CodecError::MalformedImage("tiff magic is not 42".into()));
    }

    let ifd_offset = read_u32(bytes, 4)? as usize;
    let entry_count = read_u16(bytes, ifd_offset)? as usize;
    let mut width: Option<u32> = None;
    let mut height: Option<u32> = None;
    let mut bits: Option<u32> = None;
    let mut compression = COMPRESSION_NONE;
    let mut photometric: Option<u32> = None;
    let mut strip_offset: Option<u32> = None;
    let mut strip_len: Option<u32> = None;
    let mut samples_per_pixel = 1;
    let mut sample_format = SAMPLE_FORMAT_UNSIGNED;

    for i in 0..entry_count {
        let at = ifd_offset
            .checked_add(2 + i * 12)
            .ok_or_else(|| CodecError::MalformedImage("ifd offset overflows".into()))?;
        let tag = read_u16(bytes, at)?;
        let kind = read_u16(bytes, at + 2)?;
        let count = read_u32(bytes, at + 4)?;
        let value = match (kind, count) {
            (TYPE_SHORT, 1) => read_u16(bytes, at + 8)? as u32,
            (TYPE_LONG, 1) => read_u32(bytes, at + 8)?,
            _ => {
                // Arrays and exotic types never occur in the subset we
                // write; tolerate them only on tags we ignore anyway.
                if is_required_tag(tag) {
                    return Err(CodecError::UnsupportedImage(format!(
                        "tag {tag} with type {kind} count {count}"
                    )));
                }
                continue;
            }
        };
        match tag {
            TAG_IMAGE_WIDTH => width = Some(value),
            TAG_IMAGE_LENGTH => height = Some(value),
            TAG_BITS_PER_SAMPLE => bits = Some(value),
            TAG_COMPRESSION => compression = value,
            TAG_PHOTOMETRIC => photometric = Some(value),
            TAG_STRIP_OFFSETS => strip_offset = Some(value),
            TAG_ROWS_PER_STRIP => {}
            TAG_STRIP_BYTE_COUNTS => strip_len = Some(value),
            TAG_SAMPLES_PER_PIXEL => samples_per_pixel = value,
            TAG_SAMPLE_FORMAT => sample_format = value,
            _ => {}
        }
    }

    let width = width.ok_or_else(|| missing("ImageWidth"))?;
    let height = height.ok_or_else(|| missing("ImageLength"))?;
    let bits = bits.ok_or_else(|| missing("BitsPerSample"))?;
    let photometric = photometric.ok_or_else(|| missing("PhotometricInterpretation"))?;
    let strip_offset = strip_offset.ok_or_else(|| missing("StripOffsets"))? as usize;
    let strip_len = strip_len.ok_or_else(|| missing("StripByteCounts"))? as usize;

    if compression != COMPRESSION_NONE {
        return Err(CodecError::UnsupportedImage(format!(
            "compression scheme {compression} (uncompressed only)"
        )));
    }
    if samples_per_pixel != 1 {
        return Err(CodecError::UnsupportedImage(format!(
            "{samples_per_pixel} samples per pixel (grayscale only)"
        )));
    }
    if photometric != PHOTOMETRIC_BLACK_IS_ZERO {
        return Err(CodecError::UnsupportedImage(format!(
            "photometric interpretation {photometric} (BlackIsZero only)"
        )));
    }
    if sample_format != SAMPLE_FORMAT_UNSIGNED {
        return Err(CodecError::UnsupportedImage(format!(
            "sample format {sample_format} (unsigned only)"
        )));
    }
    if bits != 8 && bits != 16 {
        return Err(CodecError::UnsupportedImage(format!(
            "{bits} bits per sample (8 or 16 only)"
        )));
    }

    let rows = height as usize;
    let cols = width as usize;
    let bytes_per_pixel = (bits / 8) as usize;
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(bytes_per_pixel))
        .ok_or_else(|| CodecError::MalformedImage("pixel count overflows".into()))?;
    if strip_len != expected {
        return Err(CodecError::MalformedImage(format!(
            "strip holds {strip_len} bytes, geometry needs {expected}"
        )));
    }
    let end = strip_offset
        .checked_add(strip_len)
        .filter(|&e| e <= bytes.len())
        .ok_or_else(|| CodecError::MalformedImage("strip extends past end of file".into()))?;
    let data = &bytes[strip_offset..end];

    let pixels: Vec<u16> = match bits {
        8 => data.iter().map(|&b| b as u16).collect(),
        _ => data
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect(),
    };
    QuantizedGrid::new(rows, cols, bits as u8, pixels)
}

fn is_required_tag(tag: u16) -> bool {
    matches!(
        tag,
        TAG_IMAGE_WIDTH
            | TAG_IMAGE_LENGTH
            | TAG_BITS_PER_SAMPLE
            | TAG_COMPRESSION
            | TAG_PHOTOMETRIC
            | TAG_STRIP_OFFSETS
            | TAG_SAMPLES_PER_PIXEL
            | TAG_STRIP_BYTE_COUNTS
            | TAG_SAMPLE_FORMAT
    )
}

fn missing(tag: &str) -> CodecError {
    CodecError::MalformedImage(format!("required tag {tag} missing"))
}

fn read_u16(bytes: &[u8], at: usize) -> Result<u16, CodecError> {
    bytes
        .get(at..at + 2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .ok_or_else(|| CodecError::MalformedImage("read past end of tiff".into()))
}

fn read_u32(bytes: &[u8], at: usize) -> Result<u32, CodecError> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| CodecError::MalformedImage("read past end of tiff".into()))
}
