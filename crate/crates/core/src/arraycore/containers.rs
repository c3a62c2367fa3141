//! Typed containers for images, depth maps, and segmentation data.

use super::ArrayError;

/// Lower bound of the representable depth range.
pub const DEPTH_MIN: f32 = 0.1;
/// Upper bound of the representable depth range.
pub const DEPTH_MAX: f32 = 100.0;

/// H x W x C image with values in [0, 1], row-major, channel-interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageTensor {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f32>,
}

impl ImageTensor {
    pub fn new(
        height: usize,
        width: usize,
        channels: usize,
        data: Vec<f32>,
    ) -> Result<Self, ArrayError> {
        if channels != 1 && channels != 3 {
            return Err(ArrayError::Invalid(format!(
                "image channels must be 1 or 3, got {channels}"
            )));
        }
        if data.len() != height * width * channels {
            return Err(ArrayError::ShapeMismatch(format!(
                "image data length {} != {}x{}x{}",
                data.len(),
                height,
                width,
                channels
            )));
        }
        for (i, &v) in data.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(ArrayError::OutOfRange(format!(
                    "image value {v} at index {i} outside [0, 1]"
                )));
            }
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize, ch: usize) -> f32 {
        self.data[(row * self.width + col) * self.channels + ch]
    }

    /// Copy of the pixel data widened to f64, same layout.
    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&v| v as f64).collect()
    }
}

/// H x W depth map with values in [`DEPTH_MIN`, `DEPTH_MAX`].
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl DepthMap {
    pub fn new(height: usize, width: usize, data: Vec<f32>) -> Result<Self, ArrayError> {
        if data.len() != height * width {
            return Err(ArrayError::ShapeMismatch(format!(
                "depth data length {} != {}x{}",
                data.len(),
                height,
                width
            )));
        }
        for (i, &v) in data.iter().enumerate() {
            if !(DEPTH_MIN..=DEPTH_MAX).contains(&v) {
                return Err(ArrayError::OutOfRange(format!(
                    "depth value {v} at index {i} outside [{DEPTH_MIN}, {DEPTH_MAX}]"
                )));
            }
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.data[row * self.width + col]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&v| v as f64).collect()
    }
}

/// H x W x |S| per-pixel class probabilities, normalized per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct SegProbMap {
    height: usize,
    width: usize,
    num_classes: usize,
    data: Vec<f32>,
}

impl SegProbMap {
    pub fn new(
        height: usize,
        width: usize,
        num_classes: usize,
        data: Vec<f32>,
    ) -> Result<Self, ArrayError> {
        if num_classes == 0 {
            return Err(ArrayError::Invalid("num_classes must be >= 1".into()));
        }
        if data.len() != height * width * num_classes {
            return Err(ArrayError::ShapeMismatch(format!(
                "probability data length {} != {}x{}x{}",
                data.len(),
                height,
                width,
                num_classes
            )));
        }
        for (i, &v) in data.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(ArrayError::OutOfRange(format!(
                    "probability {v} at index {i} outside [0, 1]"
                )));
            }
        }
        for px in 0..height * width {
            let sum: f64 = data[px * num_classes..(px + 1) * num_classes]
                .iter()
                .map(|&v| v as f64)
                .sum();
            if (sum - 1.0).abs() > 1e-5 {
                return Err(ArrayError::OutOfRange(format!(
                    "pixel {px} probabilities sum to {sum}, expected 1"
                )));
            }
        }
        Ok(Self {
            height,
            width,
            num_classes,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize, class: usize) -> f32 {
        self.data[(row * self.width + col) * self.num_classes + class]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&v| v as f64).collect()
    }
}

/// H x W map of 1-based class ids in {1, ..., |S|}.
#[derive(Debug, Clone, PartialEq)]
pub struct SegLabelMap {
    height: usize,
    width: usize,
    num_classes: usize,
    data: Vec<u16>,
}

impl SegLabelMap {
    pub fn new(
        height: usize,
        width: usize,
        num_classes: usize,
        data: Vec<u16>,
    ) -> Result<Self, ArrayError> {
        if num_classes == 0 || num_classes > u16::MAX as usize {
            return Err(ArrayError::Invalid(format!(
                "num_classes {num_classes} unsupported"
            )));
        }
        if data.len() != height * width {
            return Err(ArrayError::ShapeMismatch(format!(
                "label data length {} != {}x{}",
                data.len(),
                height,
                width
            )));
        }
        for (i, &v) in data.iter().enumerate() {
            if v == 0 || v as usize > num_classes {
                return Err(ArrayError::OutOfRange(format!(
                    "label {v} at index {i} outside 1..={num_classes}"
                )));
            }
        }
        Ok(Self {
            height,
            width,
            num_classes,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn data(&self) -> &[u16] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> u16 {
        self.data[row * self.width + col]
    }
}

/// Per-pixel argmax over class probabilities; ties break to the lowest class id.
pub fn argmax_labels(probs: &SegProbMap) -> SegLabelMap {
    let s = probs.num_classes();
    let mut labels = Vec::with_capacity(probs.height() * probs.width());
    for px in 0..probs.height() * probs.width() {
        let row = &probs.data()[px * s..(px + 1) * s];
        let mut best = 0usize;
        for (c, &p) in row.iter().enumerate() {
            if p > row[best] {
                best = c;
            }
        }
        labels.push(best as u16 + 1);
    }
    SegLabelMap::new(probs.height(), probs.width(), s, labels)
        .expect("argmax labels are valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn image_rejects_out_of_range() {
        let err = ImageTensor::new(1, 2, 1, vec![0.5, 1.2]).unwrap_err();
        assert!(matches!(err, ArrayError::OutOfRange(_)));
    }

    #[test]
    fn image_rejects_bad_channels() {
        assert!(ImageTensor::new(1, 1, 2, vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn depth_range_enforced() {
        assert!(DepthMap::new(1, 1, vec![0.05]).is_err());
        assert!(DepthMap::new(1, 1, vec![100.5]).is_err());
        assert!(DepthMap::new(1, 1, vec![0.1]).is_ok());
    }

    #[test]
    fn probs_must_sum_to_one() {
        assert!(SegProbMap::new(1, 1, 2, vec![0.6, 0.6]).is_err());
        assert!(SegProbMap::new(1, 1, 2, vec![0.6, 0.4]).is_ok());
    }

    #[test]
    fn labels_are_one_based() {
        assert!(SegLabelMap::new(1, 1, 3, vec![0]).is_err());
        assert!(SegLabelMap::new(1, 1, 3, vec![4]).is_err());
        assert!(SegLabelMap::new(1, 1, 3, vec![3]).is_ok());
    }

    #[test]
    fn argmax_picks_max() {
        let probs = SegProbMap::new(1, 1, 3, vec![0.1, 0.7, 0.2]).unwrap();
        assert_eq!(argmax_labels(&probs).get(0, 0), 2);
    }

    #[test]
    fn argmax_tie_breaks_low() {
        let probs = SegProbMap::new(1, 1, 2, vec![0.5, 0.5]).unwrap();
        assert_eq!(argmax_labels(&probs).get(0, 0), 1);
    }

    #[test]
    fn argmax_uniform_over_many_classes() {
        let s = 19;
        let data = vec![1.0 / s as f32; s * 4];
        let probs = SegProbMap::new(2, 2, s, data).unwrap();
        let labels = argmax_labels(&probs);
        assert!(labels.data().iter().all(|&l| l == 1));
    }
}
