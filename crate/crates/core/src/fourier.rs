//! Centered discrete Fourier helpers tied to explicit axis geometry.
//!
//! A uniform axis x_j = x0 + j·h carries the dual frequency lattice
//! f_m = (m − N/2)·2π/(N·h). All transforms here are expressed directly in
//! terms of those physical points and frequencies, so sign and centering
//! conventions live in one place:
//!
//!   analyze:    c[m] = (1/N) Σ_j v[j] e^{−i f_m x_j}
//!   synthesize: v[j] =       Σ_m c[m] e^{+i f_m x_j}
//!
//! which are exact inverses of each other on the lattice.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(data: &mut [Complex64], forward: bool) {
    let fft: Arc<dyn rustfft::Fft<f64>> = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(data.len())
        } else {
            p.plan_fft_inverse(data.len())
        }
    });
    fft.process(data);
}

/// Plain index-space DFT, out[d] = Σ_m v[m] e^{−2πi m d / N} (unnormalized).
pub fn raw_fft_forward(values: &[Complex64]) -> Vec<Complex64> {
    let mut data = values.to_vec();
    fft_in_place(&mut data, true);
    data
}

/// Plain index-space inverse DFT, out[d] = Σ_m v[m] e^{+2πi m d / N}
/// (unnormalized).
pub fn raw_fft_inverse(values: &[Complex64]) -> Vec<Complex64> {
    let mut data = values.to_vec();
    fft_in_place(&mut data, false);
    data
}

/// Geometry of one uniform sampled axis together with its frequency lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisGeom {
    pub n: usize,
    pub x0: f64,
    pub h: f64,
    pub freq0: f64,
    pub dfreq: f64,
}

impl AxisGeom {
    /// Axis with the canonical centered dual lattice.
    pub fn space(n: usize, x0: f64, h: f64) -> Self {
        assert!(n >= 2 && n % 2 == 0, "axis length must be even");
        let dfreq = 2.0 * PI / (n as f64 * h);
        Self {
            n,
            x0,
            h,
            freq0: -(n as f64 / 2.0) * dfreq,
            dfreq,
        }
    }

    /// Symmetric axis on [−l, l) with n points.
    pub fn centered(n: usize, l: f64) -> Self {
        Self::space(n, -l, 2.0 * l / n as f64)
    }

    pub fn point(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.h
    }

    pub fn freq(&self, m: usize) -> f64 {
        self.freq0 + m as f64 * self.dfreq
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.freq(m)).collect()
    }

    /// The doubled axis: same origin, half the spacing, twice the points.
    pub fn doubled(&self) -> Self {
        Self::space(2 * self.n, self.x0, self.h / 2.0)
    }

    /// Largest representable frequency magnitude π/h.
    pub fn nyquist(&self) -> f64 {
        PI / self.h
    }
}

/// c[m] = (1/N) Σ_j v[j] e^{−i f_m x_j}.
pub fn analyze(geom: &AxisGeom, values: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(values.len(), geom.n);
    let n = geom.n;
    // e^{−i f_m x_j} = e^{−i freq0 x_j} · e^{−i m dfreq x0} · e^{−2πi m j / N}
    let mut buf: Vec<Complex64> = (0..n)
        .map(|j| values[j] * Complex64::from_polar(1.0, -geom.freq0 * geom.point(j)))
        .collect();
    fft_in_place(&mut buf, true);
    let scale = 1.0 / n as f64;
    (0..n)
        .map(|m| buf[m] * Complex64::from_polar(scale, -(m as f64) * geom.dfreq * geom.x0))
        .collect()
}

/// v[j] = Σ_m c[m] e^{+i f_m x_j}.
pub fn synthesize(geom: &AxisGeom, coeffs: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(coeffs.len(), geom.n);
    let n = geom.n;
    let mut buf: Vec<Complex64> = (0..n)
        .map(|m| coeffs[m] * Complex64::from_polar(1.0, geom.freq(m) * geom.x0))
        .collect();
    fft_in_place(&mut buf, false);
    (0..n)
        .map(|j| buf[j] * Complex64::from_polar(1.0, geom.freq0 * (geom.h * j as f64)))
        .collect()
}

/// Evaluate the trigonometric interpolant of `coeffs` at arbitrary points.
pub fn synthesize_at(geom: &AxisGeom, coeffs: &[Complex64], xs: &[f64]) -> Vec<Complex64> {
    assert_eq!(coeffs.len(), geom.n);
    xs.iter()
        .map(|&x| {
            (0..geom.n)
                .map(|m| coeffs[m] * Complex64::from_polar(1.0, geom.freq(m) * x))
                .sum()
        })
        .collect()
}

/// Band-limited resampling of `values` onto the doubled axis (2N points at
/// spacing h/2). Exact for trigonometric interpolants; restriction to the
/// even-index points returns the input samples.
pub fn upsample2(geom: &AxisGeom, values: &[Complex64]) -> Vec<Complex64> {
    let coeffs = analyze(geom, values);
    let g2 = geom.doubled();
    // The doubled axis has the same frequency spacing and twice the span, so
    // our lattice embeds with an offset of N/2.
    let mut c2 = vec![Complex64::new(0.0, 0.0); g2.n];
    let off = geom.n / 2;
    c2[off..off + geom.n].copy_from_slice(&coeffs);
    synthesize(&g2, &c2)
}

/// Band-limited periodic translate: samples of the trigonometric interpolant
/// of `values` at x − a.
pub fn shift(geom: &AxisGeom, values: &[Complex64], a: f64) -> Vec<Complex64> {
    let mut coeffs = analyze(geom, values);
    for (m, c) in coeffs.iter_mut().enumerate() {
        *c *= Complex64::from_polar(1.0, -geom.freq(m) * a);
    }
    synthesize(geom, &coeffs)
}

/// Apply a length n_in → n_out line operation along configuration axis `ax`
/// of a flattened (config × momentum) array. `sizes` are the per-axis
/// configuration point counts of the input.
pub fn map_config_lines<F>(
    values: &Array2<Complex64>,
    sizes: &[usize],
    ax: usize,
    n_out: usize,
    op: F,
) -> Array2<Complex64>
where
    F: Fn(&[Complex64]) -> Vec<Complex64> + Sync,
{
    let n_in = sizes[ax];
    assert_eq!(
        values.nrows(),
        sizes.iter().product::<usize>(),
        "row count must match config sizes"
    );
    let cols = values.ncols();
    let mut out_sizes = sizes.to_vec();
    out_sizes[ax] = n_out;
    let out_rows: usize = out_sizes.iter().product();
    let mut out = Array2::zeros((out_rows, cols));

    // Row-major strides for the input and output config índices.
    let stride_in: usize = sizes[ax + 1..].iter().product();
    let stride_out: usize = out_sizes[ax + 1..].iter().product();
    let outer: usize = sizes[..ax].iter().product();
    let inner = stride_in;

    let mut line = vec![Complex64::new(0.0, 0.0); n_in];
    for o in 0..outer {
        for i in 0..inner {
            let base_in = o * n_in * stride_in + i;
            let base_out = o * n_out * stride_out + i;
            for col in 0..cols {
                for j in 0..n_in {
                    line[j] = values[[base_in + j * stride_in, col]];
                }
                let new_line = op(&line);
                assert_eq!(new_line.len(), n_out);
                for (j, v) in new_line.iter().enumerate() {
                    out[[base_out + j * stride_out, col]] = *v;
                }
            }
        }
    }
    out
}

/// Same as [`map_config_lines`], along momentum axis `ax` (columns).
pub fn map_momentum_lines<F>(
    values: &Array2<Complex64>,
    sizes: &[usize],
    ax: usize,
    n_out: usize,
    op: F,
) -> Array2<Complex64>
where
    F: Fn(&[Complex64]) -> Vec<Complex64> + Sync,
{
    let n_in = sizes[ax];
    assert_eq!(
        values.ncols(),
        sizes.iter().product::<usize>(),
        "column count must match momentum sizes"
    );
    let rows = values.nrows();
    let mut out_sizes = sizes.to_vec();
    out_sizes[ax] = n_out;
    let out_cols: usize = out_sizes.iter().product();
    let mut out = Array2::zeros((rows, out_cols));

    let stride_in: usize = sizes[ax + 1..].iter().product();
    let stride_out: usize = out_sizes[ax + 1..].iter().product();
    let outer: usize = sizes[..ax].iter().product();
    let inner = stride_in;

    let mut line = vec![Complex64::new(0.0, 0.0); n_in];
    for o in 0..outer {
        for i in 0..inner {
            let base_in = o * n_in * stride_in + i;
            let base_out = o * n_out * stride_out + i;
            for row in 0..rows {
                for j in 0..n_in {
                    line[j] = values[[row, base_in + j * stride_in]];
                }
                let new_line = op(&line);
                assert_eq!(new_line.len(), n_out);
                for (j, v) in new_line.iter().enumerate() {
                    out[[row, base_out + j * stride_out]] = *v;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn direct_analyze(geom: &AxisGeom, values: &[Complex64]) -> Vec<Complex64> {
        (0..geom.n)
            .map(|m| {
                values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * Complex64::from_polar(1.0, -geom.freq(m) * geom.point(j)))
                    .sum::<Complex64>()
                    / geom.n as f64
            })
            .collect()
    }

    fn rand_values(n: usize, seed: u64) -> Vec<Complex64> {
        // Small deterministic pseudo-random data; quality is irrelevant here.
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        (0..n)
            .map(|_| {
                let mut next = || {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    (state as f64 / u64::MAX as f64) - 0.5
                };
                c(next(), next())
            })
            .collect()
    }

    #[test]
    fn analyze_matches_direct_sum() {
        let geom = AxisGeom::centered(16, 5.0);
        let vals = rand_values(16, 7);
        let fast = analyze(&geom, &vals);
        let slow = direct_analyze(&geom, &vals);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn synthesize_inverts_analyze() {
        let geom = AxisGeom::centered(64, 7.5);
        let vals = rand_values(64, 3);
        let back = synthesize(&geom, &analyze(&geom, &vals));
        for (a, b) in back.iter().zip(&vals) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn upsample_preserves_even_points_and_interpolates() {
        let geom = AxisGeom::centered(32, 4.0);
        // A band-limited function: a few low harmonics.
        let vals: Vec<Complex64> = geom
            .points()
            .iter()
            .map(|&x| c((0.7 * x).cos() + 0.3 * (1.4 * x).sin(), 0.2 * (0.35 * x).cos()))
            .collect();
        let up = upsample2(&geom, &vals);
        assert_eq!(up.len(), 64);
        for j in 0..32 {
            assert!((up[2 * j] - vals[j]).norm() < 1e-11);
        }
        // Frequencies used (0.35/0.7/1.4) are not lattice frequencies, so
        // compare the interpolant with itself evaluated directly.
        let coeffs = analyze(&geom, &vals);
        let g2 = geom.doubled();
        let direct = synthesize_at(&geom, &coeffs, &g2.points());
        for (a, b) in up.iter().zip(&direct) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn shift_translates_lattice_modes_exactly() {
        let geom = AxisGeom::centered(32, 6.0);
        let k = geom.freq(20); // a lattice frequency
        let vals: Vec<Complex64> = geom
            .points()
            .iter()
            .map(|&x| Complex64::from_polar(1.0, k * x))
            .collect();
        let a = 1.37; // arbitrary non-commensurate shift
        let shifted = shift(&geom, &vals, a);
        for (j, v) in shifted.iter().enumerate() {
            let want = Complex64::from_polar(1.0, k * (geom.point(j) - a));
            assert!((v - want).norm() < 1e-11);
        }
    }

    #[test]
    fn config_line_mapping_respects_tensor_layout() {
        // 2 axes: sizes [2, 3]; one momentum column with distinct entries.
        let sizes = [2usize, 3usize];
        let values = Array2::from_shape_fn((6, 1), |(r, _)| c(r as f64, 0.0));
        // Reverse each line along axis 1: rows (0,1,2)->(2,1,0), (3,4,5)->(5,4,3).
        let rev = map_config_lines(&values, &sizes, 1, 3, |line| {
            line.iter().rev().cloned().collect()
        });
        let got: Vec<f64> = (0..6).map(|r| rev[[r, 0]].re).collect();
        assert_eq!(got, vec![2.0, 1.0, 0.0, 5.0, 4.0, 3.0]);
        // Along axis 0: pairs (0,3),(1,4),(2,5) swap.
        let rev0 = map_config_lines(&values, &sizes, 0, 2, |line| {
            line.iter().rev().cloned().collect()
        });
        let got0: Vec<f64> = (0..6).map(|r| rev0[[r, 0]].re).collect();
        assert_eq!(got0, vec![3.0, 4.0, 5.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn momentum_line_mapping_mirrors_config_mapping() {
        let sizes = [2usize, 2usize];
        let values = Array2::from_shape_fn((1, 4), |(_, c_)| c(c_ as f64, 0.0));
        let doubled = map_momentum_lines(&values, &sizes, 0, 4, |line| {
            let mut v = line.to_vec();
            v.extend_from_slice(line);
            v
        });
        assert_eq!(doubled.ncols(), 8);
        let got: Vec<f64> = (0..8).map(|k| doubled[[0, k]].re).collect();
        assert_eq!(got, vec![0.0, 1.0, 2.0, 3.0, 0.0, 1.0, 2.0, 3.0]);
    }
}
