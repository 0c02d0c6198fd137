//! Small dense kernels shared by the dictionary and encoder.
//!
//! Storage is `f32`; every reduction accumulates in `f64` with a fixed
//! lane split so results do not depend on call site or thread count.

const LANES: usize = 4;

/// `<x, y>` for two `f32` slices, accumulated in `f64`.
#[inline]
pub fn dot_f32(x: &[f32], y: &[f32]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = [0.0f64; LANES];
    let xc = x.chunks_exact(LANES);
    let yc = y.chunks_exact(LANES);
    let (xr, yr) = (xc.remainder(), yc.remainder());
    for (a, b) in xc.zip(yc) {
        for l in 0..LANES {
            acc[l] += a[l] as f64 * b[l] as f64;
        }
    }
    let mut tail = 0.0;
    for (a, b) in xr.iter().zip(yr) {
        tail += *a as f64 * *b as f64;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `<x, y>` for an `f32` atom against an `f64` vector.
#[inline]
pub fn dot_mixed(x: &[f32], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = [0.0f64; LANES];
    let xc = x.chunks_exact(LANES);
    let yc = y.chunks_exact(LANES);
    let (xr, yr) = (xc.remainder(), yc.remainder());
    for (a, b) in xc.zip(yc) {
        for l in 0..LANES {
            acc[l] += a[l] as f64 * b[l];
        }
    }
    let mut tail = 0.0;
    for (a, b) in xr.iter().zip(yr) {
        tail += *a as f64 * *b;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `y += alpha * x`
#[inline]
pub fn axpy_mixed(alpha: f64, x: &[f32], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi as f64;
    }
}

pub fn norm_sq_f32(x: &[f32]) -> f64 {
    dot_f32(x, x)
}

pub fn norm_sq_f64(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}
