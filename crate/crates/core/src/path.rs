//! Diverging parameterized curves in phase space and families thereof.
//!
//! An [`AsymptoticPath`] is a labelled curve t ↦ X(t) together with a finite
//! evaluation ladder t₁ < … < t_m.  Paths are the computable stand-in for
//! "directions to infinity": downstream code translates a symbol or operator
//! along the path and studies the limiting behaviour at the far end of the
//! ladder.  A [`PathFamily`] bundles several paths with a free-text note
//! recording how complete the family is believed to be for the symbol class
//! at hand.
//!
//! Templates cover the common shapes: straight rays along a fixed direction
//! (axes and diagonals), spirals t ↦ (t·cos θ(t), t·sin θ(t)), and custom
//! tabulated curves with piecewise-linear interpolation.

use crate::error::{CalcError, Result};
use crate::phase::PhasePoint;
use std::fmt;
use std::sync::Arc;

/// Shared closure type for path evaluation maps.
pub type PathFn = Arc<dyn Fn(f64) -> PhasePoint + Send + Sync>;

/// Slack allowed when checking that |X(t)| is nondecreasing along the ladder.
const MONOTONE_SLACK: f64 = 1e-9;

/// A labelled diverging curve in phase space with a finite evaluation ladder.
///
/// Invariants enforced at construction: the ladder is strictly increasing,
/// positive, finite, and has at least two entries; every ladder point
/// evaluates to a finite phase point of the declared dimension.
/// Divergence itself (|X(t)| nondecreasing and eventually large) depends on a
/// caller-chosen radius and is checked by [`AsymptoticPath::validate`].
#[derive(Clone)]
pub struct AsymptoticPath {
    label: String,
    dim: usize,
    point_at: PathFn,
    ladder: Vec<f64>,
}

impl fmt::Debug for AsymptoticPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AsymptoticPath")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("ladder_len", &self.ladder.len())
            .field("t_first", &self.ladder.first())
            .field("t_last", &self.ladder.last())
            .finish()
    }
}

fn check_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.len() < 2 {
        return Err(CalcError::InvalidPath(format!(
            "ladder needs at least 2 parameters, got {}",
            ladder.len()
        )));
    }
    if ladder.iter().any(|t| !t.is_finite()) {
        return Err(CalcError::NonFinite("ladder parameter".into()));
    }
    if ladder[0] <= 0.0 {
        return Err(CalcError::InvalidPath(format!(
            "ladder parameters must be positive, got t1 = {}",
            ladder[0]
        )));
    }
    for w in ladder.windows(2) {
        if w[1] <= w[0] {
            return Err(CalcError::InvalidPath(format!(
                "ladder must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

impl AsymptoticPath {
    /// Builds a path from an arbitrary evaluation map.
    ///
    /// Checks the ladder shape and evaluates the map on every ladder point to
    /// verify dimension and finiteness.
    pub fn new<F>(label: impl Into<String>, dim: usize, ladder: Vec<f64>, point_at: F) -> Result<Self>
    where
        F: Fn(f64) -> PhasePoint + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(CalcError::InvalidPath("path dimension must be positive".into()));
        }
        check_ladder(&ladder)?;
        let path = Self {
            label: label.into(),
            dim,
            point_at: Arc::new(point_at),
            ladder,
        };
        for &t in &path.ladder {
            let p = path.point_at(t);
            if p.dim() != path.dim {
                return Err(CalcError::DimensionMismatch(format!(
                    "path '{}' evaluates to dimension {} at t = {}, declared {}",
                    path.label,
                    p.dim(),
                    t,
                    path.dim
                )));
            }
            if p.x.iter().chain(p.xi.iter()).any(|v| !v.is_finite()) {
                return Err(CalcError::NonFinite(format!(
                    "path '{}' coordinate at t = {}",
                    path.label, t
                )));
            }
        }
        Ok(path)
    }

    /// Straight ray X(t) = t·d along a fixed nonzero direction d.
    ///
    /// The direction is normalized to unit length so that the ladder
    /// parameter measures phase-space distance uniformly across a family.
    pub fn ray(label: impl Into<String>, direction: &PhasePoint, ladder: Vec<f64>) -> Result<Self> {
        let norm = direction.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(CalcError::InvalidPath(
                "ray direction must be nonzero and finite".into(),
            ));
        }
        let d = direction.scale(1.0 / norm);
        let dim = d.dim();
        Self::new(label, dim, ladder, move |t| d.scale(t))
    }

    /// Spiral in a single conjugate plane: X(t) = (t·cos θ(t), t·sin θ(t))
    /// with θ(t) = θ₀ + ω·t, all other coordinates zero.
    ///
    /// `plane` selects which (x_i, ξ_i) pair carries the spiral.
    pub fn spiral(
        label: impl Into<String>,
        dim: usize,
        plane: usize,
        theta0: f64,
        omega: f64,
        ladder: Vec<f64>,
    ) -> Result<Self> {
        if plane >= dim {
            return Err(CalcError::InvalidPath(format!(
                "spiral plane {} out of range for dimension {}",
                plane, dim
            )));
        }
        if !theta0.is_finite() || !omega.is_finite() {
            return Err(CalcError::NonFinite("spiral angle parameter".into()));
        }
        Self::new(label, dim, ladder, move |t| {
            let mut x = vec![0.0; dim];
            let mut xi = vec![0.0; dim];
            let theta = theta0 + omega * t;
            x[plane] = t * theta.cos();
            xi[plane] = t * theta.sin();
            PhasePoint { x, xi }
        })
    }

    /// Custom tabulated path: samples (t_k, X_k) become the ladder, and
    /// intermediate parameters are filled by piecewise-linear interpolation
    /// (clamped at both ends).
    pub fn tabulated(label: impl Into<String>, samples: Vec<(f64, PhasePoint)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(CalcError::InvalidPath(format!(
                "tabulated path needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        let dim = samples[0].1.dim();
        let ladder: Vec<f64> = samples.iter().map(|(t, _)| *t).collect();
        let table: Arc<Vec<(f64, PhasePoint)>> = Arc::new(samples);
        let eval_table = Arc::clone(&table);
        Self::new(label, dim, ladder, move |t| {
            let pts = &eval_table;
            if t <= pts[0].0 {
                return pts[0].1.clone();
            }
            if t >= pts[pts.len() - 1].0 {
                return pts[pts.len() - 1].1.clone();
            }
            // Find the bracketing segment and interpolate linearly.
            let k = pts.partition_point(|(s, _)| *s <= t);
            let (t0, p0) = &pts[k - 1];
            let (t1, p1) = &pts[k];
            let w = (t - t0) / (t1 - t0);
            let x = p0
                .x
                .iter()
                .zip(&p1.x)
                .map(|(a, b)| a + w * (b - a))
                .collect();
            let xi = p0
                .xi
                .iter()
                .zip(&p1.xi)
                .map(|(a, b)| a + w * (b - a))
                .collect();
            PhasePoint { x, xi }
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Configuration-space dimension n (phase space has 2n coordinates).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ladder(&self) -> &[f64] {
        &self.ladder
    }

    /// Evaluates the curve at parameter t.
    pub fn point_at(&self, t: f64) -> PhasePoint {
        (self.point_at)(t)
    }

    /// Phase-space radius at the top of the ladder.
    pub fn final_radius(&self) -> f64 {
        self.point_at(*self.ladder.last().expect("non-empty ladder")).norm()
    }

    /// Returns a copy of this path running on a different ladder.
    ///
    /// This is how a family is refined: keeping the curve but thinning or
    /// extending the parameter list (for example restricting to multiples of
    /// a period) selects a sub-net of the same direction to infinity.
    pub fn with_ladder(&self, ladder: Vec<f64>) -> Result<Self> {
        check_ladder(&ladder)?;
        let refined = Self {
            label: self.label.clone(),
            dim: self.dim,
            point_at: Arc::clone(&self.point_at),
            ladder,
        };
        for &t in &refined.ladder {
            let p = refined.point_at(t);
            if p.x.iter().chain(p.xi.iter()).any(|v| !v.is_finite()) {
                return Err(CalcError::NonFinite(format!(
                    "path '{}' coordinate at t = {}",
                    refined.label, t
                )));
            }
        }
        Ok(refined)
    }

    /// Checks the divergence invariants on the ladder samples:
    /// |X(t_k)| nondecreasing (up to rounding slack) and the final radius
    /// exceeding `divergence_radius`.
    pub fn validate(&self, divergence_radius: f64) -> Result<()> {
        let radii: Vec<f64> = self.ladder.iter().map(|&t| self.point_at(t).norm()).collect();
        for (k, w) in radii.windows(2).enumerate() {
            if w[1] < w[0] - MONOTONE_SLACK * (1.0 + w[0]) {
                return Err(CalcError::InvalidPath(format!(
                    "path '{}' radius decreases along the ladder: |X(t_{})| = {:.6} then |X(t_{})| = {:.6}",
                    self.label,
                    k + 1,
                    w[0],
                    k + 2,
                    w[1]
                )));
            }
        }
        let last = *radii.last().expect("non-empty ladder");
        if last < divergence_radius {
            return Err(CalcError::InvalidPath(format!(
                "path '{}' reaches radius {:.6} at the top of its ladder, below the required divergence radius {:.6}",
                self.label, last, divergence_radius
            )));
        }
        Ok(())
    }
}

/// A non-empty collection of diverging paths probed together, plus a note on
/// how exhaustive the collection is believed to be.
#[derive(Clone, Debug)]
pub struct PathFamily {
    paths: Vec<AsymptoticPath>,
    completeness_note: String,
}

impl PathFamily {
    pub fn new(paths: Vec<AsymptoticPath>, completeness_note: impl Into<String>) -> Result<Self> {
        if paths.is_empty() {
            return Err(CalcError::InvalidPath("path family must be non-empty".into()));
        }
        let dim = paths[0].dim();
        for p in &paths {
            if p.dim() != dim {
                return Err(CalcError::DimensionMismatch(format!(
                    "path family mixes dimensions {} and {} (path '{}')",
                    dim,
                    p.dim(),
                    p.label()
                )));
            }
        }
        Ok(Self {
            paths,
            completeness_note: completeness_note.into(),
        })
    }

    /// The standard straight-ray family: for every conjugate pair (x_i, ξ_i)
    /// the four axis directions ±x_i, ±ξ_i and the four diagonals
    /// (±x_i ± ξ_i)/√2, all on the shared ladder.  For n = 1 this is the
    /// familiar 8-direction family.
    ///
    /// Known sufficient for symbols that settle to directional limits along
    /// rays; the completeness note records exactly that.
    pub fn axes_and_diagonals(dim: usize, ladder: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(CalcError::InvalidPath("path dimension must be positive".into()));
        }
        let mut paths = Vec::with_capacity(8 * dim);
        let plane_tag = |i: usize| -> String {
            if dim == 1 {
                String::new()
            } else {
                format!("{}", i + 1)
            }
        };
        for i in 0..dim {
            let tag = plane_tag(i);
            let dir = |x: f64, xi: f64| -> PhasePoint {
                let mut xv = vec![0.0; dim];
                let mut xiv = vec![0.0; dim];
                xv[i] = x;
                xiv[i] = xi;
                PhasePoint { x: xv, xi: xiv }
            };
            paths.push(AsymptoticPath::ray(
                format!("x{tag}+"),
                &dir(1.0, 0.0),
                ladder.clone(),
            )?);
            paths.push(AsymptoticPath::ray(
                format!("x{tag}-"),
                &dir(-1.0, 0.0),
                ladder.clone(),
            )?);
            paths.push(AsymptoticPath::ray(
                format!("xi{tag}+"),
                &dir(0.0, 1.0),
                ladder.clone(),
            )?);
            paths.push(AsymptoticPath::ray(
                format!("xi{tag}-"),
                &dir(0.0, -1.0),
                ladder.clone(),
            )?);
            for (sx, sxi, name) in [
                (1.0, 1.0, "diag++"),
                (1.0, -1.0, "diag+-"),
                (-1.0, 1.0, "diag-+"),
                (-1.0, -1.0, "diag--"),
            ] {
                paths.push(AsymptoticPath::ray(
                    format!("{name}{tag}"),
                    &dir(sx, sxi),
                    ladder.clone(),
                )?);
            }
        }
        Self::new(
            paths,
            "axes and conjugate-plane diagonals; sufficient for symbols with directional limits along rays, a lower bound otherwise",
        )
    }

    /// Only the configuration-axis rays ±x_i (no momentum or diagonal
    /// directions).
    pub fn config_axes(dim: usize, ladder: Vec<f64>) -> Result<Self> {
        let full = Self::axes_and_diagonals(dim, ladder)?;
        let paths = full
            .paths
            .into_iter()
            .filter(|p| p.label().starts_with('x') && !p.label().starts_with("xi"))
            .collect();
        Self::new(paths, "configuration-axis rays only; lower bound family")
    }

    /// Only the momentum-axis rays ±ξ_i.
    pub fn momentum_axes(dim: usize, ladder: Vec<f64>) -> Result<Self> {
        let full = Self::axes_and_diagonals(dim, ladder)?;
        let paths = full
            .paths
            .into_iter()
            .filter(|p| p.label().starts_with("xi"))
            .collect();
        Self::new(paths, "momentum-axis rays only; lower bound family")
    }

    pub fn paths(&self) -> &[AsymptoticPath] {
        &self.paths
    }

    pub fn completeness_note(&self) -> &str {
        &self.completeness_note
    }

    pub fn dim(&self) -> usize {
        self.paths[0].dim()
    }

    /// Adds a path after checking its dimension matches the family.
    pub fn push(&mut self, path: AsymptoticPath) -> Result<()> {
        if path.dim() != self.dim() {
            return Err(CalcError::DimensionMismatch(format!(
                "path '{}' has dimension {}, family has {}",
                path.label(),
                path.dim(),
                self.dim()
            )));
        }
        self.paths.push(path);
        Ok(())
    }

    /// Validates divergence of every member path.
    pub fn validate(&self, divergence_radius: f64) -> Result<()> {
        for p in &self.paths {
            p.validate(divergence_radius)?;
        }
        Ok(())
    }
}

/// Arithmetic ladder t_k = t0 + k·dt for k = 0..count.
pub fn ladder_linear(t0: f64, dt: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| t0 + k as f64 * dt).collect()
}

/// Geometric ladder t_k = t0·ratio^k for k = 0..count.
pub fn ladder_geometric(t0: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| t0 * ratio.powi(k as i32)).collect()
}
