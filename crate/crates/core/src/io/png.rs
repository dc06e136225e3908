//! PNG masks and heatmap rendering.

use std::fmt;
use std::str::FromStr;

use image::codecs::png::PngEncoder;
use image::{ExtendedColorType, ImageEncoder};
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::PixelMask;

fn encode(data: &[u8], cols: usize, rows: usize, color: ExtendedColorType) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    PngEncoder::new(&mut out)
        .write_image(data, cols as u32, rows as u32, color)
        .map_err(|e| Error::Image(e.to_string()))?;
    Ok(out)
}

/// Decodes a PNG (any colour type) into an occupancy mask; non-zero luma is occupied.
pub fn decode_mask_png(bytes: &[u8]) -> Result<PixelMask> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| Error::Image(e.to_string()))?
        .to_luma8();
    let (w, h) = img.dimensions();
    PixelMask::from_data(
        w as usize,
        h as usize,
        img.into_raw().into_iter().map(|v| v != 0).collect(),
    )
}

/// Encodes a mask as 8-bit grayscale: occupied 255, free 0.
pub fn encode_mask_png(mask: &PixelMask) -> Result<Vec<u8>> {
    let data: Vec<u8> = mask.data.iter().map(|&b| if b { 255 } else { 0 }).collect();
    encode(&data, mask.width, mask.height, ExtendedColorType::L8)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Colormap {
    Gray,
    /// Black through red and yellow to white.
    #[default]
    Heat,
}

impl FromStr for Colormap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gray" | "grey" => Ok(Colormap::Gray),
            "heat" => Ok(Colormap::Heat),
            other => Err(Error::InvalidConfig(format!("unknown colormap `{other}`"))),
        }
    }
}

impl fmt::Display for Colormap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Colormap::Gray => "gray",
            Colormap::Heat => "heat",
        })
    }
}

impl Colormap {
    /// Colour for a level in `0..=255`.
    pub fn color(self, level: u8) -> [u8; 3] {
        match self {
            Colormap::Gray => [level; 3],
            Colormap::Heat => {
                let t = level as u32 * 3;
                let r = t.min(255) as u8;
                let g = t.saturating_sub(255).min(255) as u8;
                let b = t.saturating_sub(510).min(255) as u8;
                [r, g, b]
            }
        }
    }
}

/// Renders a `rows x cols` plane as an RGB PNG, mapping `range` linearly onto
/// the colormap. Values outside the range saturate.
pub fn render_heatmap<T: Float>(
    plane: &[T],
    rows: usize,
    cols: usize,
    range: (f64, f64),
    cmap: Colormap,
) -> Result<Vec<u8>> {
    if plane.len() != rows * cols {
        return Err(Error::ShapeMismatch(format!(
            "plane has {} values, expected {rows}x{cols}",
            plane.len()
        )));
    }
    let (lo, hi) = range;
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut rgb = Vec::with_capacity(3 * plane.len());
    for v in plane {
        let t = ((v.to_f64().unwrap_or(lo) - lo) / span).clamp(0.0, 1.0);
        let t = if t.is_nan() { 0.0 } else { t };
        rgb.extend_from_slice(&cmap.color((t * 255.0).round() as u8));
    }
    encode(&rgb, cols, rows, ExtendedColorType::Rgb8)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pixels(png: &[u8]) -> Vec<[u8; 3]> {
        image::load_from_memory(png)
            .unwrap()
            .to_rgb8()
            .pixels()
            .map(|p| p.0)
            .collect()
    }

    #[test]
    fn zero_and_one_planes() {
        for cmap in [Colormap::Gray, Colormap::Heat] {
            let zeros = render_heatmap(&[0.0f32; 12], 3, 4, (0.0, 1.0), cmap).unwrap();
            assert!(pixels(&zeros).iter().all(|&p| p == cmap.color(0)));
            let ones = render_heatmap(&[1.0f32; 12], 3, 4, (0.0, 1.0), cmap).unwrap();
            assert!(pixels(&ones).iter().all(|&p| p == cmap.color(255)));
        }
        assert_eq!(Colormap::Heat.color(255), [255, 255, 255]);
        assert_eq!(Colormap::Heat.color(0), [0, 0, 0]);
    }

    #[test]
    fn checkerboard_two_colours() {
        let plane: Vec<f32> = (0..16).map(|k| ((k / 4 + k % 4) % 2) as f32).collect();
        let png = render_heatmap(&plane, 4, 4, (0.0, 1.0), Colormap::Heat).unwrap();
        let px = pixels(&png);
        for (k, p) in px.iter().enumerate() {
            let want = if plane[k] > 0.5 {
                Colormap::Heat.color(255)
            } else {
                Colormap::Heat.color(0)
            };
            assert_eq!(*p, want);
        }
        assert_eq!(png, render_heatmap(&plane, 4, 4, (0.0, 1.0), Colormap::Heat).unwrap());
    }

    #[test]
    fn mask_round_trip() {
        let mut m = PixelMask::new(5, 3);
        m.set(1, 4, true);
        m.set(2, 0, true);
        let back = decode_mask_png(&encode_mask_png(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(decode_mask_png(b"not a png").is_err());
    }
}
