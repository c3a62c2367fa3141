//! Bit-exact file formats: the flat-array container and binary PPM/PGM.
//!
//! Flat-array layout, little-endian throughout:
//!
//! ```text
//! magic   8 bytes  "EGARRAY1"
//! ndim    u32
//! dim0..dim3  4 x u32 (unused trailing dims written as 1)
//! dtype   u32      0 = u8, 1 = f32, 2 = f64, 3 = u16 labels
//! payload row-major
//! ```
//!
//! Label maps are serialized 0-based (class id minus 1) and restored to the
//! in-memory 1-based convention on load.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::containers::{DepthMap, ImageTensor, SegLabelMap, SegProbMap};
use super::ArrayError;
use crate::edgeops::EdgeField;

const MAGIC: &[u8; 8] = b"EGARRAY1";

const DTYPE_U8: u32 = 0;
const DTYPE_F32: u32 = 1;
const DTYPE_F64: u32 = 2;
const DTYPE_U16_LABELS: u32 = 3;

struct RawArray {
    dims: Vec<usize>,
    dtype: u32,
    payload: Vec<u8>,
}

fn write_raw(path: &Path, dims: &[usize], dtype: u32, payload: &[u8]) -> Result<(), ArrayError> {
    assert!(dims.len() <= 4, "flat format supports up to 4 dims");
    let mut buf = Vec::with_capacity(32 + payload.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for i in 0..4 {
        let d = dims.get(i).copied().unwrap_or(1) as u32;
        buf.extend_from_slice(&d.to_le_bytes());
    }
    buf.extend_from_slice(&dtype.to_le_bytes());
    buf.extend_from_slice(payload);
    let mut file = fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

fn read_raw(path: &Path) -> Result<RawArray, ArrayError> {
    let bytes = fs::read(path)?;
    if bytes.len() < 32 {
        return Err(ArrayError::MalformedHeader(format!(
            "file too short ({} bytes) for flat-array header",
            bytes.len()
        )));
    }
    if &bytes[..8] != MAGIC {
        return Err(ArrayError::MalformedHeader(
            "bad magic, expected EGARRAY1".into(),
        ));
    }
    let u32_at = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
    let ndim = u32_at(8) as usize;
    if ndim == 0 || ndim > 4 {
        return Err(ArrayError::MalformedHeader(format!(
            "ndim {ndim} outside 1..=4"
        )));
    }
    let mut dims = Vec::with_capacity(ndim);
    for i in 0..ndim {
        dims.push(u32_at(12 + 4 * i) as usize);
    }
    let dtype = u32_at(28);
    let elem = match dtype {
        DTYPE_U8 => 1,
        DTYPE_F32 => 4,
        DTYPE_F64 => 8,
        DTYPE_U16_LABELS => 2,
        other => {
            return Err(ArrayError::MalformedHeader(format!(
                "unknown dtype code {other}"
            )))
        }
    };
    let count: usize = dims.iter().product();
    let expected = count * elem;
    let payload = bytes[32..].to_vec();
    if payload.len() != expected {
        return Err(ArrayError::ShapeMismatch(format!(
            "payload is {} bytes, header implies {}",
            payload.len(),
            expected
        )));
    }
    Ok(RawArray {
        dims,
        dtype,
        payload,
    })
}

fn f32_payload(values: &[f32]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 4);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn f64_payload(values: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 8);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn payload_f32(raw: &RawArray) -> Vec<f32> {
    raw.payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect()
}

fn payload_f64(raw: &RawArray) -> Vec<f64> {
    raw.payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect()
}

fn expect_dtype(raw: &RawArray, dtype: u32, name: &'static str) -> Result<(), ArrayError> {
    if raw.dtype != dtype {
        return Err(ArrayError::DtypeMismatch {
            expected: name,
            found: raw.dtype,
        });
    }
    Ok(())
}

fn expect_ndim(raw: &RawArray, ndim: usize) -> Result<(), ArrayError> {
    if raw.dims.len() != ndim {
        return Err(ArrayError::ShapeMismatch(format!(
            "expected {ndim} dims, file has {:?}",
            raw.dims
        )));
    }
    Ok(())
}

pub fn save_image(image: &ImageTensor, path: &Path) -> Result<(), ArrayError> {
    write_raw(
        path,
        &[image.height(), image.width(), image.channels()],
        DTYPE_F32,
        &f32_payload(image.data()),
    )
}

pub fn load_image(path: &Path) -> Result<ImageTensor, ArrayError> {
    let raw = read_raw(path)?;
    expect_ndim(&raw, 3)?;
    expect_dtype(&raw, DTYPE_F32, "f32")?;
    ImageTensor::new(raw.dims[0], raw.dims[1], raw.dims[2], payload_f32(&raw))
}

pub fn save_depth(depth: &DepthMap, path: &Path) -> Result<(), ArrayError> {
    write_raw(
        path,
        &[depth.height(), depth.width()],
        DTYPE_F32,
        &f32_payload(depth.data()),
    )
}

pub fn load_depth(path: &Path) -> Result<DepthMap, ArrayError> {
    let raw = read_raw(path)?;
    expect_ndim(&raw, 2)?;
    expect_dtype(&raw, DTYPE_F32, "f32")?;
    DepthMap::new(raw.dims[0], raw.dims[1], payload_f32(&raw))
}

pub fn save_probs(probs: &SegProbMap, path: &Path) -> Result<(), ArrayError> {
    write_raw(
        path,
        &[probs.height(), probs.width(), probs.num_classes()],
        DTYPE_F32,
        &f32_payload(probs.data()),
    )
}

pub fn load_probs(path: &Path) -> Result<SegProbMap, ArrayError> {
    let raw = read_raw(path)?;
    expect_ndim(&raw, 3)?;
    expect_dtype(&raw, DTYPE_F32, "f32")?;
    SegProbMap::new(raw.dims[0], raw.dims[1], raw.dims[2], payload_f32(&raw))
}

/// Labels are written 0-based; `num_classes` is recovered as the max id + 1.
pub fn save_labels(labels: &SegLabelMap, path: &Path) -> Result<(), ArrayError> {
    let mut payload = Vec::with_capacity(labels.data().len() * 2);
    for &l in labels.data() {
        payload.extend_from_slice(&(l - 1).to_le_bytes());
    }
    write_raw(
        path,
        &[labels.height(), labels.width()],
        DTYPE_U16_LABELS,
        &payload,
    )
}

pub fn load_labels(path: &Path, num_classes: usize) -> Result<SegLabelMap, ArrayError> {
    let raw = read_raw(path)?;
    expect_ndim(&raw, 2)?;
    expect_dtype(&raw, DTYPE_U16_LABELS, "u16 labels")?;
    let data: Vec<u16> = raw
        .payload
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes(c.try_into().unwrap()).wrapping_add(1))
        .collect();
    SegLabelMap::new(raw.dims[0], raw.dims[1], num_classes, data)
}

/// Edge fields serialize as (2, H, W) f64 with plane order (height, width).
/// The binary flag is re-derived on load from the stored values.
pub fn save_edge_field(edges: &EdgeField, path: &Path) -> Result<(), ArrayError> {
    let mut values = Vec::with_capacity(2 * edges.height() * edges.width());
    values.extend_from_slice(edges.plane_h());
    values.extend_from_slice(edges.plane_w());
    write_raw(
        path,
        &[2, edges.height(), edges.width()],
        DTYPE_F64,
        &f64_payload(&values),
    )
}

pub fn load_edge_field(path: &Path) -> Result<EdgeField, ArrayError> {
    let raw = read_raw(path)?;
    expect_ndim(&raw, 3)?;
    expect_dtype(&raw, DTYPE_F64, "f64")?;
    if raw.dims[0] != 2 {
        return Err(ArrayError::ShapeMismatch(format!(
            "edge field leading dim must be 2, got {}",
            raw.dims[0]
        )));
    }
    let values = payload_f64(&raw);
    let (h, w) = (raw.dims[1], raw.dims[2]);
    let plane_h = values[..h * w].to_vec();
    let plane_w = values[h * w..].to_vec();
    EdgeField::from_planes(h, w, plane_h, plane_w)
        .map_err(|e| ArrayError::OutOfRange(e.to_string()))
}

/// A typed array recovered from a flat-array file.
#[derive(Debug, Clone)]
pub enum LoadedArray {
    Image(ImageTensor),
    Depth(DepthMap),
    Probs(SegProbMap),
    Labels(SegLabelMap),
}

/// Load a flat-array file, inferring the container type from the header.
///
/// u16 payloads are labels (`num_classes` = max stored id + 1); 2-d f32 is a
/// depth map; 3-d f32 is an image when the trailing dim is 1 or 3 and the
/// values fit [0, 1], otherwise a probability map.
pub fn load_array(path: &Path) -> Result<LoadedArray, ArrayError> {
    let raw = read_raw(path)?;
    match raw.dtype {
        DTYPE_U16_LABELS => {
            expect_ndim(&raw, 2)?;
            let data: Vec<u16> = raw
                .payload
                .chunks_exact(2)
                .map(|c| u16::from_le_bytes(c.try_into().unwrap()).wrapping_add(1))
                .collect();
            let num_classes = data.iter().copied().max().unwrap_or(1) as usize;
            Ok(LoadedArray::Labels(SegLabelMap::new(
                raw.dims[0],
                raw.dims[1],
                num_classes,
                data,
            )?))
        }
        DTYPE_F32 => {
            let values = payload_f32(&raw);
            match raw.dims.len() {
                2 => Ok(LoadedArray::Depth(DepthMap::new(
                    raw.dims[0],
                    raw.dims[1],
                    values,
                )?)),
                3 => {
                    let c = raw.dims[2];
                    if (c == 1 || c == 3) && values.iter().all(|v| (0.0..=1.0).contains(v)) {
                        Ok(LoadedArray::Image(ImageTensor::new(
                            raw.dims[0],
                            raw.dims[1],
                            c,
                            values,
                        )?))
                    } else {
                        Ok(LoadedArray::Probs(SegProbMap::new(
                            raw.dims[0],
                            raw.dims[1],
                            c,
                            values,
                        )?))
                    }
                }
                _ => Err(ArrayError::ShapeMismatch(format!(
                    "no f32 container with dims {:?}",
                    raw.dims
                ))),
            }
        }
        other => Err(ArrayError::DtypeMismatch {
            expected: "f32 or u16 labels",
            found: other,
        }),
    }
}

// --- binary PPM (P6) / PGM (P5), maxval 255 -------------------------------

/// Load a binary PPM or PGM with maxval 255; values map as v/255.
pub fn load_ppm(path: &Path) -> Result<ImageTensor, ArrayError> {
    let bytes = fs::read(path)?;
    let (magic, rest) = bytes
        .split_at_checked(2)
        .ok_or_else(|| ArrayError::MalformedHeader("file shorter than magic".into()))?;
    let channels = match magic {
        b"P5" => 1,
        b"P6" => 3,
        _ => {
            return Err(ArrayError::MalformedHeader(
                "magic must be P5 or P6 (binary PGM/PPM)".into(),
            ))
        }
    };
    let mut pos = 0usize;
    let mut next_token = || -> Result<u32, ArrayError> {
        // skip whitespace and # comments
        loop {
            match rest.get(pos) {
                Some(b'#') => {
                    while pos < rest.len() && rest[pos] != b'\n' {
                        pos += 1;
                    }
                }
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while pos < rest.len() && rest[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(ArrayError::MalformedHeader(
                "expected integer in PNM header".into(),
            ));
        }
        std::str::from_utf8(&rest[start..pos])
            .unwrap()
            .parse::<u32>()
            .map_err(|e| ArrayError::MalformedHeader(e.to_string()))
    };
    let width = next_token()? as usize;
    let height = next_token()? as usize;
    let maxval = next_token()?;
    if maxval != 255 {
        return Err(ArrayError::MalformedHeader(format!(
            "maxval must be 255, got {maxval}"
        )));
    }
    // exactly one whitespace byte after maxval
    let data_start = {
        match rest.get(pos) {
            Some(c) if c.is_ascii_whitespace() => pos + 1,
            _ => {
                return Err(ArrayError::MalformedHeader(
                    "missing whitespace after maxval".into(),
                ))
            }
        }
    };
    let expected = height * width * channels;
    let payload = &rest[data_start..];
    if payload.len() != expected {
        return Err(ArrayError::ShapeMismatch(format!(
            "pixel payload is {} bytes, expected {}",
            payload.len(),
            expected
        )));
    }
    let data: Vec<f32> = payload.iter().map(|&b| b as f32 / 255.0).collect();
    ImageTensor::new(height, width, channels, data)
}

/// Save as binary PGM (1 channel) or PPM (3 channels) with the canonical
/// header `P5|P6\n<w> <h>\n255\n`; values quantize as round(v * 255).
pub fn save_ppm(image: &ImageTensor, path: &Path) -> Result<(), ArrayError> {
    let magic: &[u8] = match image.channels() {
        1 => b"P5",
        3 => b"P6",
        c => {
            return Err(ArrayError::Invalid(format!(
                "PNM output needs 1 or 3 channels, got {c}"
            )))
        }
    };
    let mut buf = Vec::with_capacity(image.data().len() + 32);
    buf.extend_from_slice(magic);
    buf.extend_from_slice(format!("\n{} {}\n255\n", image.width(), image.height()).as_bytes());
    for &v in image.data() {
        buf.push((v * 255.0).round().clamp(0.0, 255.0) as u8);
    }
    let mut file = fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arraycore::SeededRng;
    use tempfile::tempdir;

    #[test]
    fn image_roundtrip_bit_exact() {
        let dir = tempdir().unwrap();
        let mut rng = SeededRng::new(11);
        let data: Vec<f32> = (0..16 * 16 * 3).map(|_| rng.next_f64() as f32).collect();
        let img = ImageTensor::new(16, 16, 3, data).unwrap();
        let path = dir.path().join("img.arr");
        save_image(&img, &path).unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!(img, back);
    }

    #[test]
    fn tiny_header_example() {
        let dir = tempdir().unwrap();
        let img = ImageTensor::new(2, 2, 1, vec![0.0, 0.25, 0.5, 1.0]).unwrap();
        let path = dir.path().join("t.arr");
        save_image(&img, &path).unwrap();
        match load_array(&path).unwrap() {
            LoadedArray::Image(i) => assert_eq!(i, img),
            other => panic!("expected image, got {other:?}"),
        }
    }

    #[test]
    fn depth_out_of_range_rejected_on_load() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("d.arr");
        // bypass the constructor by writing raw bytes
        write_raw(&path, &[1, 1], DTYPE_F32, &f32_payload(&[0.05])).unwrap();
        let err = load_depth(&path).unwrap_err();
        assert!(matches!(err, ArrayError::OutOfRange(_)), "{err}");
    }

    #[test]
    fn malformed_header_detected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.arr");
        std::fs::write(&path, b"NOTMAGIC\x00\x00").unwrap();
        assert!(matches!(
            load_image(&path),
            Err(ArrayError::MalformedHeader(_))
        ));
    }

    #[test]
    fn dtype_mismatch_detected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("labels.arr");
        let labels = SegLabelMap::new(1, 2, 3, vec![1, 3]).unwrap();
        save_labels(&labels, &path).unwrap();
        assert!(matches!(
            load_image(&path),
            Err(ArrayError::DtypeMismatch { .. })
        ));
    }

    #[test]
    fn labels_roundtrip_with_offset() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("l.arr");
        let labels = SegLabelMap::new(2, 2, 5, vec![1, 5, 2, 2]).unwrap();
        save_labels(&labels, &path).unwrap();
        let back = load_labels(&path, 5).unwrap();
        assert_eq!(labels, back);
    }

    #[test]
    fn pgm_endpoint_values() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("g.pgm");
        std::fs::write(&path, b"P5\n2 1\n255\n\x00\xff").unwrap();
        let img = load_ppm(&path).unwrap();
        assert_eq!(img.data(), &[0.0, 1.0]);
    }

    #[test]
    fn ppm_linear_map() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.ppm");
        std::fs::write(&path, b"P6\n1 1\n255\n\x80\x80\x80").unwrap();
        let img = load_ppm(&path).unwrap();
        for &v in img.data() {
            assert!((v - 128.0 / 255.0).abs() < 1e-7);
        }
    }

    #[test]
    fn ppm_rejects_other_maxval() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.pgm");
        std::fs::write(&path, b"P5\n1 1\n65535\n\x00\x00").unwrap();
        assert!(matches!(
            load_ppm(&path),
            Err(ArrayError::MalformedHeader(_))
        ));
    }

    #[test]
    fn ppm_save_load_save_byte_identical() {
        let dir = tempdir().unwrap();
        let mut rng = SeededRng::new(3);
        for case in 0..8 {
            let c = if case % 2 == 0 { 3 } else { 1 };
            let (h, w) = (1 + (case % 5), 1 + (case % 7));
            let data: Vec<f32> = (0..h * w * c)
                .map(|_| (rng.below(256) as f32) / 255.0)
                .collect();
            let img = ImageTensor::new(h, w, c, data).unwrap();
            let p1 = dir.path().join(format!("a{case}.pnm"));
            let p2 = dir.path().join(format!("b{case}.pnm"));
            save_ppm(&img, &p1).unwrap();
            save_ppm(&load_ppm(&p1).unwrap(), &p2).unwrap();
            assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
        }
    }
}
