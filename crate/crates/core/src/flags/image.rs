use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {0}x{1}")]
    Empty(usize, usize),
    #[error("level buffer has {got} entries, expected {expected}")]
    BufferSize { got: usize, expected: usize },
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("invalid graymap: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Rounds `v * 255` half-up after clamping `v` to `[0, 1]`. NaN maps to 0.
pub fn discretize(v: f64) -> u8 {
    let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    (v * 255.0 + 0.5).floor() as u8
}

/// Row-major 8-bit grayscale image.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    levels: Vec<u8>,
}

/// Graymap encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PgmFormat {
    /// `P2`, decimal text.
    Plain,
    /// `P5`, one byte per pixel.
    Raw,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, levels: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::Empty(width, height));
        }
        if levels.len() != width * height {
            return Err(ImageError::BufferSize { got: levels.len(), expected: width * height });
        }
        Ok(GrayImage { width, height, levels })
    }

    pub fn filled(width: usize, height: usize, level: u8) -> Result<Self, ImageError> {
        Self::new(width, height, vec![level; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self, ImageError> {
        let mut levels = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                levels.push(f(row, col));
            }
        }
        Self::new(width, height, levels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn levels(&self) -> &[u8] {
        &self.levels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.levels[row * self.width + col]
    }

    pub fn distinct_levels(&self) -> usize {
        let mut seen = [false; 256];
        self.levels.iter().for_each(|&l| seen[l as usize] = true);
        seen.iter().filter(|&&s| s).count()
    }

    pub fn transpose(&self) -> GrayImage {
        GrayImage::from_fn(self.height, self.width, |r, c| self.get(c, r)).unwrap()
    }

    pub fn write_pgm<W: Write>(&self, mut out: W, format: PgmFormat) -> io::Result<()> {
        match format {
            PgmFormat::Plain => {
                writeln!(out, "P2\n{} {}\n255", self.width, self.height)?;
                for row in self.levels.chunks(self.width) {
                    let line: Vec<String> = row.iter().map(|l| l.to_string()).collect();
                    writeln!(out, "{}", line.join(" "))?;
                }
            }
            PgmFormat::Raw => {
                write!(out, "P5\n{} {}\n255\n", self.width, self.height)?;
                out.write_all(&self.levels)?;
            }
        }
        out.flush()
    }

    pub fn save_pgm(&self, path: impl AsRef<Path>, format: PgmFormat) -> Result<(), ImageError> {
        let file = std::fs::File::create(path)?;
        self.write_pgm(io::BufWriter::new(file), format)?;
        Ok(())
    }

    /// Reads a `P2` or `P5` graymap with maxval up to 255. Samples are
    /// rescaled to 0..=255 when maxval is smaller.
    pub fn read_pgm<R: Read>(input: R) -> Result<Self, ImageError> {
        let mut reader = BufReader::new(input);
        let mut magic = [0u8; 2];
        reader.read_exact(&mut magic)?;
        let format = match &magic {
            b"P2" => PgmFormat::Plain,
            b"P5" => PgmFormat::Raw,
            _ => return Err(ImageError::Format("expected P2 or P5 magic".into())),
        };
        let width = header_number(&mut reader)?;
        let height = header_number(&mut reader)?;
        let maxval = header_number(&mut reader)?;
        if maxval == 0 || maxval > 255 {
            return Err(ImageError::Format(format!("unsupported maxval {maxval}")));
        }
        let count = width * height;
        let raw: Vec<usize> = match format {
            PgmFormat::Raw => {
                let mut buf = vec![0u8; count];
                reader
                    .read_exact(&mut buf)
                    .map_err(|_| ImageError::Format("truncated pixel data".into()))?;
                buf.into_iter().map(usize::from).collect()
            }
            PgmFormat::Plain => {
                let mut text = String::new();
                reader.read_to_string(&mut text)?;
                let samples: Result<Vec<usize>, _> = strip_comments(&text)
                    .split_whitespace()
                    .map(str::parse::<usize>)
                    .collect();
                let samples = samples.map_err(|e| ImageError::Format(format!("bad sample: {e}")))?;
                if samples.len() < count {
                    return Err(ImageError::Format("truncated pixel data".into()));
                }
                samples[..count].to_vec()
            }
        };
        if let Some(&bad) = raw.iter().find(|&&v| v > maxval) {
            return Err(ImageError::Format(format!("sample {bad} exceeds maxval {maxval}")));
        }
        let levels = raw
            .into_iter()
            .map(|v| ((v * 255 + maxval / 2) / maxval) as u8)
            .collect();
        GrayImage::new(width, height, levels)
    }

    pub fn load_pgm(path: impl AsRef<Path>) -> Result<Self, ImageError> {
        Self::read_pgm(std::fs::File::open(path)?)
    }
}

fn strip_comments(text: &str) -> String {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Next whitespace-delimited header number; `#` comments run to end of line.
/// Consumes exactly one whitespace byte after the number, as the format
/// requires before raw data.
fn header_number<R: BufRead>(reader: &mut R) -> Result<usize, ImageError> {
    let mut digits = String::new();
    let mut byte = [0u8; 1];
    loop {
        if reader.read(&mut byte)? == 0 {
            break;
        }
        let c = byte[0];
        if c == b'#' && digits.is_empty() {
            let mut skip = Vec::new();
            reader.read_until(b'\n', &mut skip)?;
        } else if c.is_ascii_whitespace() {
            if !digits.is_empty() {
                break;
            }
        } else if c.is_ascii_digit() {
            digits.push(c as char);
        } else {
            return Err(ImageError::Format(format!("unexpected byte {c:#04x} in header")));
        }
    }
    digits
        .parse()
        .map_err(|_| ImageError::Format("missing header field".into()))
}

/// `1 - mean((A/255 - B/255)^2)`: 1 for identical images, 0 for an all-black
/// versus all-white pair.
pub fn similarity(a: &GrayImage, b: &GrayImage) -> Result<f64, ImageError> {
    if a.width != b.width || a.height != b.height {
        return Err(ImageError::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    let sum: f64 = a
        .levels
        .iter()
        .zip(&b.levels)
        .map(|(&x, &y)| {
            let d = f64::from(x) / 255.0 - f64::from(y) / 255.0;
            d * d
        })
        .sum();
    Ok(1.0 - sum / (a.width * a.height) as f64)
}
