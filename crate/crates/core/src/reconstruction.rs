//! Reconstruction from sparse codes and image-quality metrics.
//!
//! `Ŝ = Σ a_i φ_i`, divided by the factor the encoder applied to the input,
//! so reconstructions come back in the units the input was given in (0–255
//! pixels for images). Metrics use a 255 peak.

use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::dictionary::ExemplarDictionary;
use crate::error::{check_len, DseldError, Result};
use crate::lca::SparseCode;
use crate::linalg;

/// Peak pixel value for PSNR and the SSIM dynamic range.
pub const PIXEL_PEAK: f64 = 255.0;

/// `Σ a_i φ_i / input_scale`: the input estimate in the input's own units.
/// Never clamped; clamping happens only on image export.
pub fn reconstruct(dict: &ExemplarDictionary, code: &SparseCode) -> Result<Vec<f64>> {
    check_len("code length", dict.len(), code.len())?;
    let mut out = vec![0.0; dict.dim()];
    let inv = 1.0 / code.input_scale;
    for (i, a) in code.iter() {
        linalg::axpy_mixed(a * inv, dict.atom(i), &mut out);
    }
    Ok(out)
}

/// Mean squared elementwise difference.
pub fn mse(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len("image size", x.len(), y.len())?;
    if x.is_empty() {
        return Err(DseldError::Empty("image"));
    }
    let sum: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(sum / x.len() as f64)
}

/// `10·log10(255² / mse)`; `+∞` when `mse == 0`.
pub fn psnr(mse: f64) -> Result<f64> {
    if mse.is_nan() || mse < 0.0 {
        return Err(DseldError::invalid("mse", format!("must be >= 0, got {mse}")));
    }
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (PIXEL_PEAK * PIXEL_PEAK / mse).log10())
}

/// Layout of an image stored as a flat slice: row-major, channels
/// interleaved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ImageShape {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
}

impl ImageShape {
    pub fn gray(width: usize, height: usize) -> Self {
        ImageShape {
            width,
            height,
            channels: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.width * self.height * self.channels
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// MNIST digits.
pub const MNIST_SHAPE: ImageShape = ImageShape {
    width: 28,
    height: 28,
    channels: 1,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SsimParams {
    /// Side of the square Gaussian window.
    pub window: usize,
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        SsimParams {
            window: 11,
            sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            dynamic_range: PIXEL_PEAK,
        }
    }
}

fn gaussian_kernel(window: usize, sigma: f64) -> Vec<f64> {
    let c = (window as f64 - 1.0) / 2.0;
    let w: Vec<f64> = (0..window)
        .map(|i| (-((i as f64 - c).powi(2)) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// Mean local SSIM over every fully contained window position, averaged
/// over channels.
pub fn ssim(x: &[f64], y: &[f64], shape: ImageShape, params: &SsimParams) -> Result<f64> {
    check_len("image size", shape.len(), x.len())?;
    check_len("image size", shape.len(), y.len())?;
    if shape.is_empty() {
        return Err(DseldError::Empty("image"));
    }
    let win = params.window;
    if win == 0 || win > shape.width.min(shape.height) {
        return Err(DseldError::invalid(
            "window",
            format!("{win} does not fit a {}x{} image", shape.width, shape.height),
        ));
    }
    if !(params.sigma > 0.0 && params.sigma.is_finite()) {
        return Err(DseldError::invalid("sigma", "must be > 0"));
    }
    let kernel = gaussian_kernel(win, params.sigma);
    let c1 = (params.k1 * params.dynamic_range).powi(2);
    let c2 = (params.k2 * params.dynamic_range).powi(2);
    let (w, h, ch) = (shape.width, shape.height, shape.channels);

    let mut total = 0.0;
    let mut count = 0usize;
    for c in 0..ch {
        let at = |img: &[f64], r: usize, col: usize| img[(r * w + col) * ch + c];
        for r0 in 0..=(h - win) {
            for c0 in 0..=(w - win) {
                let (mut mx, mut my, mut xx, mut yy, mut xy) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for (dr, kr) in kernel.iter().enumerate() {
                    for (dc, kc) in kernel.iter().enumerate() {
                        let g = kr * kc;
                        let a = at(x, r0 + dr, c0 + dc);
                        let b = at(y, r0 + dr, c0 + dc);
                        mx += g * a;
                        my += g * b;
                        xx += g * a * a;
                        yy += g * b * b;
                        xy += g * a * b;
                    }
                }
                let vx = xx - mx * mx;
                let vy = yy - my * my;
                let cov = xy - mx * my;
                total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
                count += 1;
            }
        }
    }
    Ok(total / count as f64)
}

/// Quality of one reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityReport {
    pub mse: f64,
    pub psnr: f64,
    pub ssim: f64,
    /// LCA steps executed for this reconstruction.
    pub iterations: usize,
}

impl QualityReport {
    pub fn measure(
        original: &[f64],
        reconstruction: &[f64],
        shape: ImageShape,
        params: &SsimParams,
        iterations: usize,
    ) -> Result<Self> {
        let mse = mse(original, reconstruction)?;
        Ok(QualityReport {
            mse,
            psnr: psnr(mse)?,
            ssim: ssim(original, reconstruction, shape, params)?,
            iterations,
        })
    }

    /// Strictly better on all three metrics.
    pub fn beats(&self, other: &QualityReport) -> bool {
        self.mse < other.mse && self.psnr > other.psnr && self.ssim > other.ssim
    }

    pub const CSV_HEADER: &'static str = "label,mse,psnr,ssim,iterations";

    pub fn csv_row(&self, label: &str) -> String {
        format!("{label},{},{},{},{}", self.mse, self.psnr, self.ssim, self.iterations)
    }
}

/// Appends report rows to `path`, writing the header if the file is new.
pub fn append_quality_csv(path: &Path, rows: &[(String, QualityReport)]) -> Result<()> {
    let fresh = !path.exists();
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| DseldError::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let result = (|| -> std::io::Result<()> {
        if fresh {
            writeln!(w, "{}", QualityReport::CSV_HEADER)?;
        }
        for (label, report) in rows {
            writeln!(w, "{}", report.csv_row(label))?;
        }
        w.flush()
    })();
    result.map_err(|e| DseldError::io(path, e))
}

/// One step of classic dictionary learning: for every firing atom,
/// `φ_i ← φ_i + η (S − Ŝ) a_i`, then each touched atom is re-normalized.
///
/// `s` is the raw input; it is scaled by `code.input_scale` so the residual
/// is taken in the space the code was computed in. Labels and stored norms
/// are left as they are.
pub fn dictionary_update_baseline(
    dict: &ExemplarDictionary,
    s: &[f64],
    code: &SparseCode,
    eta: f64,
) -> Result<ExemplarDictionary> {
    check_len("input dimension", dict.dim(), s.len())?;
    check_len("code length", dict.len(), code.len())?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(DseldError::invalid("eta", "must be > 0"));
    }
    if code.is_silent() {
        return Ok(dict.clone());
    }
    let mut residual: Vec<f64> = s.iter().map(|v| v * code.input_scale).collect();
    for (i, a) in code.iter() {
        linalg::axpy_mixed(-a, dict.atom(i), &mut residual);
    }
    let n = dict.dim();
    let mut atoms = dict.atoms().to_vec();
    for (i, a) in code.iter() {
        let row: Vec<f64> = dict
            .atom(i)
            .iter()
            .zip(&residual)
            .map(|(&p, r)| p as f64 + eta * r * a)
            .collect();
        let norm = linalg::norm_sq_f64(&row).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(DseldError::ZeroNormRow { row: i });
        }
        for (dst, v) in atoms[i * n..(i + 1) * n].iter_mut().zip(&row) {
            *dst = (v / norm) as f32;
        }
    }
    let mut out = dict.clone();
    out.replace_atoms(atoms);
    Ok(out)
}

/// `M` atoms with entries drawn from `N(0, 1)`, normalized. Labels cycle
/// through the classes so every class is represented; they carry no
/// meaning for this baseline.
pub fn random_dictionary(atoms: usize, dim: usize, class_count: u32, seed: u64) -> Result<ExemplarDictionary> {
    if atoms < class_count as usize {
        return Err(DseldError::NotEnoughRows {
            requested: class_count as usize,
            available: atoms,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let features: Vec<f32> = (0..atoms * dim)
        .map(|_| {
            let v: f64 = StandardNormal.sample(&mut rng);
            v as f32
        })
        .collect();
    let labels: Vec<u32> = (0..atoms).map(|i| (i % class_count as usize) as u32).collect();
    ExemplarDictionary::build(&features, dim, &labels, class_count)
}

fn to_byte(v: f64) -> u8 {
    v.clamp(0.0, PIXEL_PEAK).round() as u8
}

fn write_netpbm(path: &Path, magic: &str, shape: ImageShape, pixels: &[f64]) -> Result<()> {
    check_len("image size", shape.len(), pixels.len())?;
    let mut bytes = format!("{magic}\n{} {}\n255\n", shape.width, shape.height).into_bytes();
    bytes.extend(pixels.iter().map(|&v| to_byte(v)));
    std::fs::write(path, bytes).map_err(|e| DseldError::io(path, e))
}

/// Binary PGM, values clamped to [0, 255].
pub fn write_pgm(path: impl AsRef<Path>, width: usize, height: usize, pixels: &[f64]) -> Result<()> {
    write_netpbm(path.as_ref(), "P5", ImageShape::gray(width, height), pixels)
}

/// Binary PPM from interleaved RGB, values clamped to [0, 255].
pub fn write_ppm(path: impl AsRef<Path>, width: usize, height: usize, rgb: &[f64]) -> Result<()> {
    let shape = ImageShape {
        width,
        height,
        channels: 3,
    };
    write_netpbm(path.as_ref(), "P6", shape, rgb)
}
