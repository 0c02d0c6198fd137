//! Input data locations: an MNIST directory (four IDX files) or a
//! feature-matrix file.

use std::path::{Path, PathBuf};

use dseld_core::pipeline::{MNIST_FILES, MNIST_PIXEL_SCALE};
use dseld_core::reconstruction::MNIST_SHAPE;
use dseld_core::{load_idx, read_feature_matrix, Dataset, ImageShape, Mnist};

use crate::{usage, CliResult};

#[derive(Debug, Clone)]
pub enum Source {
    Mnist(PathBuf),
    Features(PathBuf),
}

/// Units for MNIST pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pixels {
    /// [0, 1], for classification.
    Unit,
    /// 0–255, for reconstruction metrics.
    Byte,
}

impl Pixels {
    fn scale(self) -> f32 {
        match self {
            Pixels::Unit => MNIST_PIXEL_SCALE,
            Pixels::Byte => 1.0,
        }
    }
}

impl Source {
    /// Directories are MNIST; files are feature matrices. Fails before any
    /// data is read when the path is missing or incomplete.
    pub fn parse(path: &Path) -> CliResult<Self> {
        if path.is_dir() {
            Mnist::locate(Some(path)).ok_or_else(|| {
                usage(format!(
                    "{} is not an MNIST directory (expected {})",
                    path.display(),
                    MNIST_FILES.join(", ")
                ))
            })?;
            Ok(Source::Mnist(path.to_path_buf()))
        } else if path.is_file() {
            Ok(Source::Features(path.to_path_buf()))
        } else {
            Err(usage(format!("{} does not exist", path.display())))
        }
    }

    fn load(&self, images: &str, labels: &str, pixels: Pixels) -> CliResult<Dataset> {
        match self {
            Source::Mnist(dir) => {
                let set = load_idx(dir.join(images), dir.join(labels))?;
                Ok(Dataset::from_images(&set, pixels.scale())?)
            }
            Source::Features(path) => Ok(Dataset::from_feature_matrix(read_feature_matrix(path)?)?),
        }
    }

    /// MNIST training split, or the whole feature file.
    pub fn train(&self, pixels: Pixels) -> CliResult<Dataset> {
        self.load(MNIST_FILES[0], MNIST_FILES[1], pixels)
    }

    /// MNIST test split, or the whole feature file.
    pub fn test(&self, pixels: Pixels) -> CliResult<Dataset> {
        self.load(MNIST_FILES[2], MNIST_FILES[3], pixels)
    }

    pub fn image_shape(&self) -> Option<ImageShape> {
        match self {
            Source::Mnist(_) => Some(MNIST_SHAPE),
            Source::Features(_) => None,
        }
    }
}

/// Parses `WxH` or `WxHxC`.
pub fn parse_shape(text: &str) -> CliResult<ImageShape> {
    let parts: Vec<usize> = text
        .split('x')
        .map(|p| p.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad image shape {text:?}; expected WxH or WxHxC")))?;
    match parts[..] {
        [width, height] => Ok(ImageShape::gray(width, height)),
        [width, height, channels] => Ok(ImageShape {
            width,
            height,
            channels,
        }),
        _ => Err(usage(format!("bad image shape {text:?}; expected WxH or WxHxC"))),
    }
}

/// Parses a comma-separated list.
pub fn parse_list<T: std::str::FromStr>(name: &str, text: &str) -> CliResult<Vec<T>> {
    text.split(',')
        .map(|v| v.trim().parse::<T>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad value list for {name}: {text:?}")))
}
