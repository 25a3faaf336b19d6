//! Color-name descriptors: a quantized RGB lookup table mapping each pixel
//! to a probability distribution over the 11 basic color terms.

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::grid::RealMap;
use std::io::{BufRead, Write};
use std::path::Path;

pub const COLOR_NAME_COUNT: usize = 11;
/// Color channels per scale block: the 11 names plus one zero pad so the
/// color block matches the 12 texture orientations.
pub const COLOR_CHANNELS: usize = 12;

const NAMES: [&str; COLOR_NAME_COUNT] = [
    "black", "blue", "brown", "grey", "green", "orange", "pink", "purple", "red", "white",
    "yellow",
];

/// RGB prototypes for the analytic fallback table, one per color name.
const PROTOTYPES: [[f64; 3]; COLOR_NAME_COUNT] = [
    [0.0, 0.0, 0.0],       // black
    [0.0, 0.0, 255.0],     // blue
    [139.0, 69.0, 19.0],   // brown
    [128.0, 128.0, 128.0], // grey
    [0.0, 200.0, 0.0],     // green
    [255.0, 165.0, 0.0],   // orange
    [255.0, 192.0, 203.0], // pink
    [128.0, 0.0, 128.0],   // purple
    [255.0, 0.0, 0.0],     // red
    [255.0, 255.0, 255.0], // white
    [255.0, 255.0, 0.0],   // yellow
];

/// Lookup table from quantized RGB to 11 color-name probabilities.
#[derive(Debug, Clone)]
pub struct ColorNameTable {
    bins_per_axis: usize,
    rows: Vec<[f64; COLOR_NAME_COUNT]>,
}

impl ColorNameTable {
    /// Deterministic analytic table: soft assignment of each quantized bin
    /// center to the 11 prototypes by RGB distance. Self-contained stand-in
    /// for a learned mapping.
    pub fn builtin(bins_per_axis: usize) -> Result<Self> {
        if bins_per_axis == 0 || bins_per_axis > 256 {
            return Err(Error::Parameter(format!(
                "bins_per_axis must be in 1..=256, got {bins_per_axis}"
            )));
        }
        let tau = 60.0;
        let bin_center = |b: usize| (b as f64 + 0.5) * 256.0 / bins_per_axis as f64;
        let n = bins_per_axis;
        let mut rows = Vec::with_capacity(n * n * n);
        for rb in 0..n {
            for gb in 0..n {
                for bb in 0..n {
                    let (r, g, b) = (bin_center(rb), bin_center(gb), bin_center(bb));
                    let mut row = [0.0; COLOR_NAME_COUNT];
                    let mut sum = 0.0;
                    for (i, p) in PROTOTYPES.iter().enumerate() {
                        let d2 = (r - p[0]).powi(2) + (g - p[1]).powi(2) + (b - p[2]).powi(2);
                        let w = (-d2 / (2.0 * tau * tau)).exp();
                        row[i] = w;
                        sum += w;
                    }
                    for v in &mut row {
                        *v /= sum;
                    }
                    rows.push(row);
                }
            }
        }
        Ok(ColorNameTable {
            bins_per_axis,
            rows,
        })
    }

    pub fn bins_per_axis(&self) -> usize {
        self.bins_per_axis
    }

    pub fn names() -> &'static [&'static str; COLOR_NAME_COUNT] {
        &NAMES
    }

    /// Probability row for an 8-bit RGB triple.
    #[inline]
    pub fn lookup(&self, r: u8, g: u8, b: u8) -> &[f64; COLOR_NAME_COUNT] {
        let n = self.bins_per_axis;
        let quant = |v: u8| (v as usize * n) / 256;
        &self.rows[(quant(r) * n + quant(g)) * n + quant(b)]
    }

    /// Reads a `CNTABLE v1` text file: a header line with the axis bin
    /// count, then `bins^3` rows of 11 probabilities.
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = std::io::BufReader::new(file).lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Format {
                line: 1,
                message: "empty color table file".into(),
            })
            .and_then(|(i, l)| l.map(|l| (i, l)).map_err(|e| Error::io(path, e)))?;
        let mut parts = header.split_whitespace();
        let (magic, version) = (parts.next(), parts.next());
        if magic != Some("CNTABLE") || version != Some("v1") {
            return Err(Error::Format {
                line: 1,
                message: format!("expected 'CNTABLE v1 <bins>' header, got '{header}'"),
            });
        }
        let bins_per_axis: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .filter(|&b| b > 0 && b <= 256)
            .ok_or_else(|| Error::Format {
                line: 1,
                message: "missing or invalid bins_per_axis in header".into(),
            })?;
        let expected = bins_per_axis * bins_per_axis * bins_per_axis;
        let mut rows = Vec::with_capacity(expected);
        for (idx, line) in lines {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let values: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Format {
                    line: idx + 1,
                    message: format!("bad probability: {e}"),
                })?;
            if values.len() != COLOR_NAME_COUNT {
                return Err(Error::Format {
                    line: idx + 1,
                    message: format!("expected {COLOR_NAME_COUNT} columns, got {}", values.len()),
                });
            }
            let mut row = [0.0; COLOR_NAME_COUNT];
            row.copy_from_slice(&values);
            let sum: f64 = row.iter().sum();
            if row.iter().any(|&v| v < 0.0) || (sum - 1.0).abs() > 1e-6 {
                return Err(Error::Format {
                    line: idx + 1,
                    message: format!("row is not a probability distribution (sum {sum})"),
                });
            }
            rows.push(row);
        }
        if rows.len() != expected {
            return Err(Error::Format {
                line: rows.len() + 1,
                message: format!("expected {expected} rows, got {}", rows.len()),
            });
        }
        Ok(ColorNameTable {
            bins_per_axis,
            rows,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        writeln!(out, "CNTABLE v1 {}", self.bins_per_axis).map_err(|e| Error::io(path, e))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.9}")).collect();
            writeln!(out, "{}", line.join(" ")).map_err(|e| Error::io(path, e))?;
        }
        Ok(())
    }
}

/// Per-pixel color-name probability maps: channels 0..11 hold the 11 name
/// probabilities, channel 11 is the zero pad. Grayscale frames produce all
/// zeros.
pub fn color_names(frame: &Frame, table: &ColorNameTable) -> Vec<RealMap> {
    let (rows, cols) = frame.dims();
    let mut maps = vec![RealMap::zeros(rows, cols); COLOR_CHANNELS];
    let Some(planes) = &frame.rgb else {
        return maps;
    };
    for r in 0..rows {
        for c in 0..cols {
            let probs = table.lookup(planes.r.at(r, c), planes.g.at(r, c), planes.b.at(r, c));
            for (k, &p) in probs.iter().enumerate() {
                maps[k].set(r, c, p);
            }
        }
    }
    maps
}
