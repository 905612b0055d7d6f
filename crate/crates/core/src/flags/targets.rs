use std::fmt;
use std::str::FromStr;

use super::image::{GrayImage, ImageError};

/// The four benchmark patterns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TargetKind {
    /// Top half black, bottom half white.
    TwoBands,
    /// Horizontal thirds at levels 0 / 128 / 255.
    ThreeBands,
    /// White disc on black, radius `0.35 * min(w, h)`.
    Disc,
    /// Two half discs of radius `0.4 * w` at the top (gray) and bottom
    /// (white) edge midpoints.
    HalfDiscs,
}

impl TargetKind {
    pub const ALL: [TargetKind; 4] = [
        TargetKind::TwoBands,
        TargetKind::ThreeBands,
        TargetKind::Disc,
        TargetKind::HalfDiscs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TargetKind::TwoBands => "2bands",
            TargetKind::ThreeBands => "3bands",
            TargetKind::Disc => "disc",
            TargetKind::HalfDiscs => "halfdiscs",
        }
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TargetKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "2bands" | "twobands" => Ok(TargetKind::TwoBands),
            "3bands" | "threebands" => Ok(TargetKind::ThreeBands),
            "disc" => Ok(TargetKind::Disc),
            "halfdiscs" => Ok(TargetKind::HalfDiscs),
            _ => Err(format!(
                "unknown target `{s}` (expected 2bands, 3bands, disc or halfdiscs)"
            )),
        }
    }
}

fn inside(row: usize, col: usize, center_row: f64, center_col: f64, radius: f64) -> bool {
    let dr = row as f64 - center_row;
    let dc = col as f64 - center_col;
    dr * dr + dc * dc <= radius * radius
}

/// Renders a target at `width x height`. Both dimensions must be at least 2.
pub fn make_target(kind: TargetKind, width: usize, height: usize) -> Result<GrayImage, ImageError> {
    if width < 2 || height < 2 {
        return Err(ImageError::Empty(width, height));
    }
    let (w, h) = (width as f64, height as f64);
    match kind {
        TargetKind::TwoBands => {
            let split = height / 2;
            GrayImage::from_fn(width, height, |r, _| if r < split { 0 } else { 255 })
        }
        TargetKind::ThreeBands => {
            // Remainder rows join the middle band.
            let third = height / 3;
            GrayImage::from_fn(width, height, |r, _| {
                if r < third {
                    0
                } else if r < height - third {
                    128
                } else {
                    255
                }
            })
        }
        TargetKind::Disc => {
            let radius = 0.35 * w.min(h);
            let (cr, cc) = ((h - 1.0) / 2.0, (w - 1.0) / 2.0);
            GrayImage::from_fn(width, height, |r, c| if inside(r, c, cr, cc, radius) { 255 } else { 0 })
        }
        TargetKind::HalfDiscs => {
            let radius = 0.4 * w;
            let cc = (w - 1.0) / 2.0;
            GrayImage::from_fn(width, height, |r, c| {
                if inside(r, c, h - 1.0, cc, radius) {
                    255
                } else if inside(r, c, 0.0, cc, radius) {
                    128
                } else {
                    0
                }
            })
        }
    }
}
