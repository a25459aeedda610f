//! Sidecar manifest: the geometry, depth, mode, rate and counts a decoder
//! needs to invert an encode. Line-based ASCII, fixed key order, no
//! tolerance for unknown or duplicate keys — this file is the only record
//! of how to read the image back, so corruption must be loud.

use super::CodecError;
use crate::prep::PrepMode;

/// First line of every manifest.
pub const MANIFEST_MAGIC: &str = "WIF1";

/// Keys in the exact order they appear on disk.
const KEYS: [&str; 7] = [
    "rows",
    "cols",
    "bits",
    "mode",
    "sample_rate",
    "meaningful_count",
    "source_total_samples",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub rows: usize,
    pub cols: usize,
    pub bits: u8,
    pub mode: PrepMode,
    pub sample_rate: u32,
    pub meaningful_count: usize,
    pub source_total_samples: usize,
}

impl Manifest {
    fn validate(&self) -> Result<(), CodecError> {
        let bad = |msg: String| Err(CodecError::MalformedManifest(msg));
        if self.rows < 1 || self.cols < 1 {
            return bad(format!("{}x{} grid is empty", self.rows, self.cols));
        }
        if self.sample_rate < 1 {
            return bad("sample_rate must be positive".into());
        }
        if self.bits != 8 && self.bits != 16 {
            return bad(format!("bits={} (8 or 16 only)", self.bits));
        }
        match self.rows.checked_mul(self.cols) {
            Some(cells) if self.meaningful_count <= cells => Ok(()),
            _ => bad(format!(
                "meaningful_count {} exceeds {}x{} grid",
                self.meaningful_count, self.rows, self.cols
            )),
        }
    }
}

/// Serialize to the exact on-disk byte layout.
pub fn write_manifest(m: &Manifest) -> Vec<u8> {
    debug_assert!(m.validate().is_ok(), "writing an invalid manifest");
    format!(
        "{MANIFEST_MAGIC}\nrows={}\ncols={}\nbits={}\nmode={}\nsample_rate={}\nmeaningful_count={}\nsource_total_samples={}\n",
        m.rows,
        m.cols,
        m.bits,
        m.mode.token(),
        m.sample_rate,
        m.meaningful_count,
        m.source_total_samples,
    )
    .into_bytes()
}

/// Parse manifest bytes, enforcing magic, key order, integer syntax and the
/// manifest invariants. `read_manifest(write_manifest(m)) == m`.
pub fn read_manifest(bytes: &[u8]) -> Result<Manifest, CodecError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| CodecError::MalformedManifest("not ASCII text".into()))?;
    let mut lines: Vec<&str> = text.split('\n').collect();
    // A trailing newline after the last key is canonical but not required.
    if lines.last() == Some(&"") {
        lines.pop();
    }
    if lines.first().copied() != Some(MANIFEST_MAGIC) {
        return Err(CodecError::MalformedManifest(format!(
            "first line must be {MANIFEST_MAGIC:?}"
        )));
    }
    if lines.len() != 1 + KEYS.len() {
        return Err(CodecError::MalformedManifest(format!(
            "expected {} key lines, found {}",
            KEYS.len(),
            lines.len() - 1
        )));
    }

    let mut values = [""; KEYS.len()];
    for (i, key) in KEYS.iter().enumerate() {
        let line = lines[1 + i];
        match line.strip_prefix(key).and_then(|r| r.strip_prefix('=')) {
            Some(value) => values[i] = value,
            None => {
                return Err(CodecError::MalformedManifest(format!(
                    "line {} must be {key}=<value>, found {line:?}",
                    i + 2
                )))
            }
        }
    }

    let mode = PrepMode::from_token(values[3]).ok_or_else(|| {
        CodecError::MalformedManifest(format!(
            "mode must be \"positive\" or \"offset\", found {:?}",
            values[3]
        ))
    })?;
    let bits = match parse_int("bits", values[2])? {
        b @ (8 | 16) => b as u8,
        b => {
            return Err(CodecError::MalformedManifest(format!(
                "bits={b} (8 or 16 only)"
            )))
        }
    };
    let manifest = Manifest {
        rows: parse_count("rows", values[0])?,
        cols: parse_count("cols", values[1])?,
        bits,
        mode,
        sample_rate: u32::try_from(parse_int("sample_rate", values[4])?)
            .map_err(|_| CodecError::MalformedManifest("sample_rate exceeds u32".into()))?,
        meaningful_count: parse_count("meaningful_count", values[5])?,
        source_total_samples: parse_count("source_total_samples", values[6])?,
    };
    manifest.validate()?;
    Ok(manifest)
}

/// Unsigned decimal only: no sign, no whitespace, no empty value.
fn parse_int(key: &str, value: &str) -> Result<u64, CodecError> {
    if value.is_empty() || !value.bytes().all(|b| b.is_ascii_digit()) {
        return Err(CodecError::MalformedManifest(format!(
            "{key} must be an unsigned decimal integer, found {value:?}"
        )));
    }
    value
        .parse::<u64>()
        .map_err(|_| CodecError::MalformedManifest(format!("{key}={value} out of range")))
}

fn parse_count(key: &str, value: &str) -> Result<usize, CodecError> {
    usize::try_from(parse_int(key, value)?)
        .map_err(|_| CodecError::MalformedManifest(format!("{key}={value} out of range")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn paper_manifest() -> Manifest {
        Manifest {
            rows: 1000,
            cols: 2000,
            bits: 16,
            mode: PrepMode::PositiveOnly,
            sample_rate: 42100,
            meaningful_count: 2_000_000,
            source_total_samples: 4_725_975,
        }
    }

    #[test]
    fn golden_byte_layout() {
        let bytes = write_manifest(&paper_manifest());
        let expected = "WIF1\n\
                        rows=1000\n\
                        cols=2000\n\
                        bits=16\n\
                        mode=positive\n\
                        sample_rate=42100\n\
                        meaningful_count=2000000\n\
                        source_total_samples=4725975\n";
        assert_eq!(bytes, expected.as_bytes());
    }

    #[test]
    fn roundtrip_identity() {
        let m = paper_manifest();
        assert_eq!(read_manifest(&write_manifest(&m)).unwrap(), m);
        let mut offset = paper_manifest();
        offset.mode = PrepMode::OffsetFull;
        offset.bits = 8;
        assert_eq!(read_manifest(&write_manifest(&offset)).unwrap(), offset);
    }

    #[test]
    fn trailing_newline_is_optional() {
        let mut bytes = write_manifest(&paper_manifest());
        assert_eq!(bytes.pop(), Some(b'\n'));
        assert_eq!(read_manifest(&bytes).unwrap(), paper_manifest());
    }

    fn expect_malformed(bytes: &[u8]) {
        assert!(
            matches!(read_manifest(bytes), Err(CodecError::MalformedManifest(_))),
            "accepted: {:?}",
            String::from_utf8_lossy(bytes)
        );
    }

    #[test]
    fn missing_key_is_rejected() {
        let text = String::from_utf8(write_manifest(&paper_manifest())).unwrap();
        let without_rows: String = text.lines().filter(|l| !l.starts_with("rows=")).fold(
            String::new(),
            |mut acc, l| {
                acc.push_str(l);
                acc.push('\n');
                acc
            },
        );
        expect_malformed(without_rows.as_bytes());
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let text = String::from_utf8(write_manifest(&paper_manifest())).unwrap();
        let duplicated = text.replace("cols=2000\n", "rows=1000\nrows=1000\n");
        expect_malformed(duplicated.as_bytes());
    }

    #[test]
    fn unknown_key_is_rejected() {
        let mut bytes = write_manifest(&paper_manifest());
        bytes.extend_from_slice(b"extra=1\n");
        expect_malformed(&bytes);
    }

    #[test]
    fn shuffled_key_order_is_rejected() {
        let text = String::from_utf8(write_manifest(&paper_manifest())).unwrap();
        let swapped = text.replace("rows=1000\ncols=2000\n", "cols=2000\nrows=1000\n");
        expect_malformed(swapped.as_bytes());
    }

    #[test]
    fn non_integer_values_are_rejected() {
        for bad in ["rows=10.5", "rows=-3", "rows=+3", "rows= 3", "rows="] {
            let text = String::from_utf8(write_manifest(&paper_manifest())).unwrap();
            expect_malformed(text.replace("rows=1000", bad).as_bytes());
        }
    }

    #[test]
    fn bad_magic_is_rejected() {
        let text = String::from_utf8(write_manifest(&paper_manifest())).unwrap();
        expect_malformed(text.replace("WIF1", "WIF2").as_bytes());
        expect_malformed(b"");
    }

    #[test]
    fn invariant_violations_are_rejected() {
        let text = String::from_utf8(write_manifest(&paper_manifest())).unwrap();
        expect_malformed(text.replace("meaningful_count=2000000", "meaningful_count=2000001").as_bytes());
        expect_malformed(text.replace("bits=16", "bits=12").as_bytes());
        expect_malformed(text.replace("sample_rate=42100", "sample_rate=0").as_bytes());
        expect_malformed(text.replace("rows=1000", "rows=0").as_bytes());
        expect_malformed(text.replace("mode=positive", "mode=Positive").as_bytes());
    }

    proptest! {
        #[test]
        fn roundtrip_over_random_valid_manifests(
            rows in 1usize..5000,
            cols in 1usize..5000,
            bits in prop_oneof![Just(8u8), Just(16u8)],
            positive in any::<bool>(),
            sample_rate in 1u32..400_000,
            fill in 0.0f64..=1.0,
            source_total_samples in 0usize..100_000_000,
        ) {
            let m = Manifest {
                rows,
                cols,
                bits,
                mode: if positive { PrepMode::PositiveOnly } else { PrepMode::OffsetFull },
                sample_rate,
                meaningful_count: ((rows * cols) as f64 * fill) as usize,
                source_total_samples,
            };
            prop_assert_eq!(read_manifest(&write_manifest(&m)).unwrap(), m);
        }
    }
}
