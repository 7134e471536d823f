//! Image decoding into [`PixelGrid`]s.
//!
//! Only 8-bit samples are accepted. Color sources become 3-channel grids,
//! single-channel sources 1-channel grids; alpha is dropped.

use std::path::Path;

use image::{DynamicImage, ImageError, ImageReader};

use crate::error::{Error, Result};

/// A decoded image: row-major, channel-interleaved 8-bit intensities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PixelGrid {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl PixelGrid {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGrid(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidGrid(format!(
                "channel count must be 1 or 3, got {channels}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(channels))
            .ok_or_else(|| Error::InvalidGrid("dimensions overflow".into()))?;
        if data.len() != expected {
            return Err(Error::InvalidGrid(format!(
                "expected {expected} samples for {width}x{height}x{channels}, got {}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    /// Number of pixels, `width * height`.
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// Intensity tuple of the pixel at row-major index `index`.
    pub fn pixel(&self, index: usize) -> &[u8] {
        &self.data[index * self.channels..(index + 1) * self.channels]
    }

    /// Intensity tuples in row-major order.
    pub fn pixels(&self) -> std::slice::ChunksExact<'_, u8> {
        self.data.chunks_exact(self.channels)
    }

    /// Euclidean diameter of the intensity cube, `255 * sqrt(channels)`.
    pub fn intensity_diameter(&self) -> f64 {
        255.0 * (self.channels as f64).sqrt()
    }
}

/// Decode a PNG, JPEG, PPM or PGM file.
pub fn load_image(path: impl AsRef<Path>) -> Result<PixelGrid> {
    let path = path.as_ref();
    let reader = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    let image = reader.decode().map_err(|e| match e {
        ImageError::IoError(io) => Error::io(path, io),
        other => Error::format(path, other.to_string()),
    })?;
    from_dynamic(image).map_err(|msg| Error::format(path, msg))
}

/// Decode an in-memory encoded image (format sniffed from the bytes).
pub fn decode_image(bytes: &[u8]) -> Result<PixelGrid> {
    let image =
        image::load_from_memory(bytes).map_err(|e| Error::format("<memory>", e.to_string()))?;
    from_dynamic(image).map_err(|msg| Error::format("<memory>", msg))
}

fn from_dynamic(image: DynamicImage) -> std::result::Result<PixelGrid, String> {
    let (width, height) = (image.width() as usize, image.height() as usize);
    let (channels, data) = match image {
        DynamicImage::ImageLuma8(buf) => (1, buf.into_raw()),
        DynamicImage::ImageLumaA8(buf) => {
            (1, buf.into_raw().chunks_exact(2).map(|p| p[0]).collect())
        }
        DynamicImage::ImageRgb8(buf) => (3, buf.into_raw()),
        DynamicImage::ImageRgba8(buf) => (
            3,
            buf.into_raw()
                .chunks_exact(4)
                .flat_map(|p| [p[0], p[1], p[2]])
                .collect(),
        ),
        other => {
            return Err(format!(
                "unsupported sample layout {:?}: only 8-bit samples are supported",
                other.color()
            ))
        }
    };
    PixelGrid::new(width, height, channels, data).map_err(|e| e.to_string())
}

/// Convert to a single channel with BT.601 luma weights, rounded half-up.
///
/// Single-channel grids are returned unchanged.
pub fn to_grayscale(grid: &PixelGrid) -> PixelGrid {
    if grid.channels == 1 {
        return grid.clone();
    }
    let data = grid
        .pixels()
        .map(|p| {
            // integer weights keep the half-up rounding exact
            let weighted = 299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32;
            ((weighted + 500) / 1000) as u8
        })
        .collect();
    PixelGrid {
        width: grid.width,
        height: grid.height,
        channels: 1,
        data,
    }
}
