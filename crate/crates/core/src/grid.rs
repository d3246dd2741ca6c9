use crate::error::{CalcError, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A uniform tensor sampling grid on the phase-space box
/// [−Lx, Lx)^n × [−Lξ, Lξ)^n.
///
/// Per axis i the configuration points are x_j = −Lx[i] + j·hx[i],
/// j = 0..Nx[i], with hx = 2Lx/Nx, and likewise on the momentum side.
/// Point counts must be even (the half-step and dual-lattice constructions
/// assume it) and the momentum box must sit inside the Nyquist range π/hx
/// induced by the configuration spacing, so kernel transforms are consistent
/// with the sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    lx: Vec<f64>,
    nx: Vec<usize>,
    lxi: Vec<f64>,
    nxi: Vec<usize>,
}

impl GridSpec {
    pub fn new(lx: Vec<f64>, nx: Vec<usize>, lxi: Vec<f64>, nxi: Vec<usize>) -> Result<Self> {
        let n = lx.len();
        if n == 0 || nx.len() != n || lxi.len() != n || nxi.len() != n {
            return Err(CalcError::InvalidGrid(format!(
                "inconsistent axis counts: lx {}, nx {}, lxi {}, nxi {}",
                lx.len(),
                nx.len(),
                lxi.len(),
                nxi.len()
            )));
        }
        for i in 0..n {
            if !(lx[i].is_finite() && lxi[i].is_finite()) || lx[i] <= 0.0 || lxi[i] <= 0.0 {
                return Err(CalcError::InvalidGrid(format!(
                    "half-widths must be positive finite, axis {i}: lx={}, lxi={}",
                    lx[i], lxi[i]
                )));
            }
            if nx[i] < 2 || nx[i] % 2 != 0 || nxi[i] < 2 || nxi[i] % 2 != 0 {
                return Err(CalcError::InvalidGrid(format!(
                    "point counts must be even and at least 2, axis {i}: nx={}, nxi={}",
                    nx[i], nxi[i]
                )));
            }
            let hx = 2.0 * lx[i] / nx[i] as f64;
            let nyquist = PI / hx;
            if lxi[i] > nyquist * (1.0 + 1e-12) {
                return Err(CalcError::InvalidGrid(format!(
                    "momentum box exceeds the Nyquist bound on axis {i}: lxi={} > pi/hx={nyquist}",
                    lxi[i]
                )));
            }
        }
        Ok(Self {
            n,
            lx,
            nx,
            lxi,
            nxi,
        })
    }

    /// Isotropic 1-d grid.
    pub fn d1(lx: f64, nx: usize, lxi: f64, nxi: usize) -> Result<Self> {
        Self::new(vec![lx], vec![nx], vec![lxi], vec![nxi])
    }

    /// The Fourier-dual grid over a configuration box: the momentum axis is
    /// the DFT-dual lattice of the configuration axis (Lξ = π/hx, Nξ = Nx).
    ///
    /// This is the unique momentum sampling for which the discrete
    /// quantization kernel reproduces Op(1) = Id exactly, so operator
    /// construction requires it.
    pub fn fourier_dual(lx: Vec<f64>, nx: Vec<usize>) -> Result<Self> {
        let lxi: Vec<f64> = lx
            .iter()
            .zip(&nx)
            .map(|(l, n)| PI / (2.0 * l / *n as f64))
            .collect();
        let nxi = nx.clone();
        Self::new(lx, nx, lxi, nxi)
    }

    /// 1-d Fourier-dual convenience constructor.
    pub fn fourier_dual_d1(lx: f64, nx: usize) -> Result<Self> {
        Self::fourier_dual(vec![lx], vec![nx])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lx(&self, axis: usize) -> f64 {
        self.lx[axis]
    }

    pub fn lxi(&self, axis: usize) -> f64 {
        self.lxi[axis]
    }

    pub fn nx(&self, axis: usize) -> usize {
        self.nx[axis]
    }

    pub fn nxi(&self, axis: usize) -> usize {
        self.nxi[axis]
    }

    /// Configuration spacing hx on an axis.
    pub fn hx(&self, axis: usize) -> f64 {
        2.0 * self.lx[axis] / self.nx[axis] as f64
    }

    /// Momentum spacing hξ on an axis.
    pub fn hxi(&self, axis: usize) -> f64 {
        2.0 * self.lxi[axis] / self.nxi[axis] as f64
    }

    /// True when the momentum axes coincide with the DFT-dual lattice of the
    /// configuration axes (up to roundoff), which operator construction needs.
    pub fn is_fourier_dual(&self) -> bool {
        (0..self.n).all(|i| {
            let dual_l = PI / self.hx(i);
            self.nxi[i] == self.nx[i] && (self.lxi[i] - dual_l).abs() <= 1e-9 * dual_l
        })
    }

    /// Configuration points along an axis.
    pub fn x_axis(&self, axis: usize) -> Vec<f64> {
        let h = self.hx(axis);
        (0..self.nx[axis])
            .map(|j| -self.lx[axis] + j as f64 * h)
            .collect()
    }

    /// Momentum points along an axis.
    pub fn xi_axis(&self, axis: usize) -> Vec<f64> {
        let h = self.hxi(axis);
        (0..self.nxi[axis])
            .map(|m| -self.lxi[axis] + m as f64 * h)
            .collect()
    }

    /// Half-step configuration points (the 2Nx midpoint lattice) on an axis.
    pub fn x_half_axis(&self, axis: usize) -> Vec<f64> {
        let h = self.hx(axis) / 2.0;
        (0..2 * self.nx[axis])
            .map(|s| -self.lx[axis] + s as f64 * h)
            .collect()
    }

    /// Total number of configuration points Π_i Nx[i].
    pub fn config_len(&self) -> usize {
        self.nx.iter().product()
    }

    /// Total number of momentum points Π_i Nξ[i].
    pub fn momentum_len(&self) -> usize {
        self.nxi.iter().product()
    }

    /// Phase-space cell volume Π_i hx[i] · Π_i hξ[i].
    pub fn cell_volume(&self) -> f64 {
        (0..self.n).map(|i| self.hx(i) * self.hxi(i)).product()
    }

    /// Row-major multi-index for a flat configuration index.
    pub fn config_multi(&self, flat: usize) -> Vec<usize> {
        unflatten(flat, &self.nx)
    }

    /// Row-major multi-index for a flat momentum index.
    pub fn momentum_multi(&self, flat: usize) -> Vec<usize> {
        unflatten(flat, &self.nxi)
    }

    pub fn config_flat(&self, multi: &[usize]) -> usize {
        flatten(multi, &self.nx)
    }

    pub fn momentum_flat(&self, multi: &[usize]) -> usize {
        flatten(multi, &self.nxi)
    }

    /// Configuration point for a flat index.
    pub fn config_point(&self, flat: usize) -> Vec<f64> {
        self.config_multi(flat)
            .iter()
            .enumerate()
            .map(|(axis, &j)| -self.lx[axis] + j as f64 * self.hx(axis))
            .collect()
    }

    /// Momentum point for a flat index.
    pub fn momentum_point(&self, flat: usize) -> Vec<f64> {
        self.momentum_multi(flat)
            .iter()
            .enumerate()
            .map(|(axis, &m)| -self.lxi[axis] + m as f64 * self.hxi(axis))
            .collect()
    }

    /// Same box and axis counts.
    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.n == other.n
            && self.nx == other.nx
            && self.nxi == other.nxi
            && self
                .lx
                .iter()
                .zip(&other.lx)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
            && self
                .lxi
                .iter()
                .zip(&other.lxi)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
    }
}

fn flatten(multi: &[usize], sizes: &[usize]) -> usize {
    let mut flat = 0usize;
    for (m, s) in multi.iter().zip(sizes) {
        flat = flat * s + m;
    }
    flat
}

fn unflatten(mut flat: usize, sizes: &[usize]) -> Vec<usize> {
    let mut multi = vec![0usize; sizes.len()];
    for i in (0..sizes.len()).rev() {
        multi[i] = flat % sizes[i];
        flat /= sizes[i];
    }
    multi
}
