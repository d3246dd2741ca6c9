//! Eigensolving on truncation ladders, spectrum and essential-spectrum
//! estimation, and resolvents.
//!
//! A [`TruncationLadder`] is a short sequence of grids with strictly growing
//! box size and resolution.  An operator family is eigensolved on every rung
//! and the rung spectra are merged: values that are stable across rungs are
//! kept as isolated points, and regions whose eigenvalue count keeps growing
//! with the rung size are reported as intervals.  The essential-spectrum
//! classifier additionally discards stable finite-multiplicity points, so
//! that only persistent spectral mass survives.
//!
//! All results are carried by [`SpectrumSet`]: disjoint closed intervals plus
//! isolated points with multiplicities, a resolution, and report flags.

use crate::error::{CalcError, Result};
use crate::grid::GridSpec;
use crate::linalg;
use crate::symbol::SymbolProvider;
use crate::weyl::OperatorMatrix;
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Relative Hermitian-defect tolerance for eigensolves.
const HERMITIAN_TOL: f64 = 1e-8;
/// Growth factor for the "eigenvalue density keeps growing" persistence test.
const GROWTH_FACTOR: f64 = 1.5;
/// An interval narrower than this many resolutions collapses to a point.
const POINT_WIDTH_FACTOR: f64 = 2.0;
/// Interval edges may drift by this many resolutions between rungs.
const EDGE_DRIFT_FACTOR: f64 = 2.0;
/// A growing interval top at least this fraction of the grid's largest
/// representable momentum energy is treated as truncation-limited.
const NYQUIST_TRACK_FRACTION: f64 = 0.5;
/// Band-edge extension absorbs a value when its gap to the run above is at
/// most this fraction of the previous rung's local level spacing.
const BAND_EDGE_SHRINK: f64 = 0.85;
/// Cap on the length of the reported undecided list.
const UNDECIDED_CAP: usize = 64;

/// Flag set when the top of a growing interval tracks the grid's largest
/// momentum energy, so the interval should be read as unbounded above.
pub const FLAG_UNBOUNDED_ABOVE: &str = "unbounded_above";
/// Flag set when some eigenvalues had to be dropped as unstable.
pub const FLAG_DROPPED_UNSTABLE: &str = "dropped_unstable";
/// Flag set by union assembly when a contributing path did not converge, so
/// the union is only a lower bound.
pub const FLAG_LOWER_BOUND_ONLY: &str = "lower_bound_only";

// ---------------------------------------------------------------------------
// Truncation ladders
// ---------------------------------------------------------------------------

/// A strictly growing sequence of at least three grids used to separate
/// genuine spectrum from truncation artifacts.
#[derive(Clone, Debug)]
pub struct TruncationLadder {
    rungs: Vec<GridSpec>,
}

impl TruncationLadder {
    /// Validates and wraps a rung sequence: at least three rungs, all
    /// Fourier-dual and of one dimension, with box size growing and grid
    /// step shrinking strictly on every axis.
    pub fn new(rungs: Vec<GridSpec>) -> Result<Self> {
        if rungs.len() < 3 {
            return Err(CalcError::InvalidGrid(format!(
                "truncation ladder needs at least 3 rungs, got {}",
                rungs.len()
            )));
        }
        let dim = rungs[0].dim();
        for g in &rungs {
            if g.dim() != dim {
                return Err(CalcError::DimensionMismatch(
                    "ladder rungs must share one dimension".into(),
                ));
            }
            if !g.is_fourier_dual() {
                return Err(CalcError::InvalidGrid(
                    "ladder rungs must use momentum lattices dual to their configuration grids"
                        .into(),
                ));
            }
        }
        for w in rungs.windows(2) {
            for ax in 0..dim {
                if w[1].lx(ax) <= w[0].lx(ax) {
                    return Err(CalcError::InvalidGrid(format!(
                        "ladder box size must grow strictly on axis {}: {} then {}",
                        ax,
                        w[0].lx(ax),
                        w[1].lx(ax)
                    )));
                }
                if w[1].nx(ax) <= w[0].nx(ax) || w[1].hx(ax) >= w[0].hx(ax) {
                    return Err(CalcError::InvalidGrid(format!(
                        "ladder resolution must grow strictly on axis {}",
                        ax
                    )));
                }
            }
        }
        Ok(Self { rungs })
    }

    /// Geometric ladder in one dimension: box sizes l0·l_ratio^k and point
    /// counts n0·n_ratio^k (rounded to even), k = 0..count.
    ///
    /// For the persistence classifier to see density growth, `l_ratio` and
    /// `n_ratio / l_ratio` should both exceed the growth factor 1.5.
    pub fn geometric_d1(l0: f64, n0: usize, count: usize, l_ratio: f64, n_ratio: f64) -> Result<Self> {
        let mut rungs = Vec::with_capacity(count);
        for k in 0..count {
            let l = l0 * l_ratio.powi(k as i32);
            let n_raw = (n0 as f64) * n_ratio.powi(k as i32);
            let n = 2 * ((n_raw / 2.0).round() as usize).max(2);
            rungs.push(GridSpec::fourier_dual_d1(l, n)?);
        }
        Self::new(rungs)
    }

    /// The default one-dimensional ladder: boxes 7.8125 → 12.5 → 20 with
    /// 118 → 308 → 800 points, giving both lattice densities a growth
    /// factor ≈ 1.6 per rung.
    pub fn standard_d1() -> Self {
        let rungs = vec![
            GridSpec::fourier_dual_d1(7.8125, 118).expect("valid rung"),
            GridSpec::fourier_dual_d1(12.5, 308).expect("valid rung"),
            GridSpec::fourier_dual_d1(20.0, 800).expect("valid rung"),
        ];
        Self::new(rungs).expect("valid ladder")
    }

    /// A lighter one-dimensional ladder (boxes 5 → 8 → 12.8, points
    /// 80 → 208 → 540) for quick estimates and tests.
    pub fn light_d1() -> Self {
        let rungs = vec![
            GridSpec::fourier_dual_d1(5.0, 80).expect("valid rung"),
            GridSpec::fourier_dual_d1(8.0, 208).expect("valid rung"),
            GridSpec::fourier_dual_d1(12.8, 540).expect("valid rung"),
        ];
        Self::new(rungs).expect("valid ladder")
    }

    pub fn rungs(&self) -> &[GridSpec] {
        &self.rungs
    }

    pub fn finest(&self) -> &GridSpec {
        self.rungs.last().expect("non-empty ladder")
    }

    pub fn dim(&self) -> usize {
        self.rungs[0].dim()
    }
}

// ---------------------------------------------------------------------------
// Spectrum sets
// ---------------------------------------------------------------------------

/// An isolated spectral value with its multiplicity.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpectrumPoint {
    pub v: f64,
    pub mult: usize,
}

/// Closed intervals plus isolated points at a stated resolution.
///
/// Canonical form (maintained by every constructor and combinator): intervals
/// sorted and pairwise separated by more than the resolution, points sorted
/// and lying outside all intervals.  `flags` carries report markers such as
/// [`FLAG_UNBOUNDED_ABOVE`]; `undecided` lists values whose classification
/// was ambiguous.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpectrumSet {
    pub intervals: Vec<(f64, f64)>,
    pub points: Vec<SpectrumPoint>,
    pub resolution: f64,
    pub flags: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undecided: Vec<f64>,
}

impl SpectrumSet {
    pub fn empty(resolution: f64) -> Self {
        Self {
            intervals: Vec::new(),
            points: Vec::new(),
            resolution,
            flags: Vec::new(),
            undecided: Vec::new(),
        }
    }

    pub fn from_points(values: &[(f64, usize)], resolution: f64) -> Self {
        let mut s = Self::empty(resolution);
        s.points = values
            .iter()
            .map(|&(v, mult)| SpectrumPoint { v, mult })
            .collect();
        s.canonicalize();
        s
    }

    pub fn from_intervals(intervals: &[(f64, f64)], resolution: f64) -> Self {
        let mut s = Self::empty(resolution);
        s.intervals = intervals.to_vec();
        s.canonicalize();
        s
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag || f.starts_with(&format!("{flag}:")))
    }

    pub fn add_flag(&mut self, flag: impl Into<String>) {
        let flag = flag.into();
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
        }
    }

    /// Restores canonical form: merges intervals that overlap or come within
    /// the resolution of each other, merges points within the resolution
    /// (summing multiplicities), and absorbs points lying inside or within
    /// the resolution of an interval.
    pub fn canonicalize(&mut self) {
        let delta = self.resolution;
        self.intervals
            .retain(|&(a, b)| a.is_finite() && b.is_finite() && b >= a);
        self.intervals
            .sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite interval ends"));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for &(a, b) in &self.intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 + delta => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        self.intervals = merged;

        self.points.retain(|p| p.v.is_finite());
        self.points
            .sort_by(|x, y| x.v.partial_cmp(&y.v).expect("finite points"));
        let mut pts: Vec<SpectrumPoint> = Vec::new();
        for p in self.points.drain(..) {
            match pts.last_mut() {
                Some(last) if p.v - last.v <= delta => {
                    // Weighted merge keeps the center of mass of the cluster.
                    let total = last.mult + p.mult;
                    last.v = (last.v * last.mult as f64 + p.v * p.mult as f64) / total as f64;
                    last.mult = total;
                }
                _ => pts.push(p),
            }
        }
        pts.retain(|p| {
            !self
                .intervals
                .iter()
                .any(|&(a, b)| p.v >= a - delta && p.v <= b + delta)
        });
        self.points = pts;
        self.undecided
            .sort_by(|x, y| x.partial_cmp(y).expect("finite undecided values"));
        self.undecided.dedup();
    }

    /// Union of two sets at the coarser of the two resolutions; flags and
    /// undecided lists are concatenated.
    pub fn union(&self, other: &SpectrumSet) -> SpectrumSet {
        let mut out = self.clone();
        out.resolution = self.resolution.max(other.resolution);
        out.intervals.extend_from_slice(&other.intervals);
        out.points.extend_from_slice(&other.points);
        out.undecided.extend_from_slice(&other.undecided);
        for f in &other.flags {
            out.add_flag(f.clone());
        }
        out.canonicalize();
        out
    }

    /// All maximal components as closed intervals (points become degenerate
    /// intervals), optionally clipped from above at `cap`.
    fn components(&self, cap: Option<f64>) -> Vec<(f64, f64)> {
        let mut comps: Vec<(f64, f64)> = self
            .intervals
            .iter()
            .copied()
            .chain(self.points.iter().map(|p| (p.v, p.v)))
            .collect();
        if let Some(c) = cap {
            comps.retain(|&(a, _)| a <= c);
            for comp in comps.iter_mut() {
                comp.1 = comp.1.min(c);
            }
        }
        comps.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite components"));
        comps
    }

    /// Distance from a real value to the set (∞ when the set is empty).
    pub fn distance_to(&self, x: f64) -> f64 {
        self.components(None)
            .iter()
            .map(|&(a, b)| {
                if x < a {
                    a - x
                } else if x > b {
                    x - b
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// True when `x` lies within `tol` of the set.
    pub fn covers(&self, x: f64, tol: f64) -> bool {
        self.distance_to(x) <= tol
    }

    /// Smallest value in the set, if any.
    pub fn support_min(&self) -> Option<f64> {
        self.components(None).first().map(|&(a, _)| a)
    }

    /// Largest value in the set, if any.
    pub fn support_max(&self) -> Option<f64> {
        self.components(None)
            .iter()
            .map(|&(_, b)| b)
            .fold(None, |acc, b| Some(acc.map_or(b, |a: f64| a.max(b))))
    }

    /// One-sided Hausdorff excess sup_{x ∈ self} dist(x, other), optionally
    /// comparing only below `cap` (used when one side is unbounded above).
    ///
    /// Empty-over-empty is 0; a non-empty set against an empty one is ∞.
    pub fn excess_over(&self, other: &SpectrumSet, cap: Option<f64>) -> f64 {
        let mine = self.components(cap);
        let theirs = other.components(cap);
        if mine.is_empty() {
            return 0.0;
        }
        if theirs.is_empty() {
            return f64::INFINITY;
        }
        let dist = |x: f64| -> f64 {
            theirs
                .iter()
                .map(|&(a, b)| {
                    if x < a {
                        a - x
                    } else if x > b {
                        x - b
                    } else {
                        0.0
                    }
                })
                .fold(f64::INFINITY, f64::min)
        };
        let mut worst = 0.0f64;
        for &(a, b) in &mine {
            worst = worst.max(dist(a)).max(dist(b));
            // Inside [a, b] the distance to the other set peaks midway
            // between two consecutive components of the other set.
            for w in theirs.windows(2) {
                let gap_mid = 0.5 * (w[0].1 + w[1].0);
                if gap_mid > a && gap_mid < b {
                    worst = worst.max(dist(gap_mid));
                }
            }
        }
        worst
    }

    /// Symmetric Hausdorff distance, optionally capped from above.
    pub fn hausdorff_distance(&self, other: &SpectrumSet, cap: Option<f64>) -> f64 {
        self.excess_over(other, cap).max(other.excess_over(self, cap))
    }

    /// A cap for comparisons against `other`: when either side is flagged
    /// unbounded above, comparisons are restricted below the smaller of the
    /// two tops.
    pub fn comparison_cap(&self, other: &SpectrumSet) -> Option<f64> {
        if !self.has_flag(FLAG_UNBOUNDED_ABOVE) && !other.has_flag(FLAG_UNBOUNDED_ABOVE) {
            return None;
        }
        match (self.support_max(), other.support_max()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Eigensolving
// ---------------------------------------------------------------------------

/// Full real spectrum of a Hermitian truncation, ascending.
///
/// Non-Hermitian input (beyond a small relative defect) is rejected.
pub fn eigensolve(s: &OperatorMatrix) -> Result<Vec<f64>> {
    let (values, _) = linalg::eigh(s.data(), HERMITIAN_TOL)?;
    Ok(values)
}

/// Eigenvalues and orthonormal eigenvectors (columns), ascending.
pub fn eigensolve_full(s: &OperatorMatrix) -> Result<(Vec<f64>, Array2<Complex64>)> {
    linalg::eigh(s.data(), HERMITIAN_TOL)
}

/// Resolvent (S − z)^{-1} of a Hermitian truncation at a non-real point.
///
/// The returned inverse is verified against the exact Hermitian resolvent
/// bound ‖(S − z)^{-1}‖ ≤ 1/|Im z|.
pub fn resolvent(s: &OperatorMatrix, z: Complex64) -> Result<OperatorMatrix> {
    if z.im == 0.0 {
        return Err(CalcError::Precondition(
            "resolvent requires Im z ≠ 0 for a Hermitian operator".into(),
        ));
    }
    if !s.is_hermitian(HERMITIAN_TOL * (1.0 + s.data().iter().map(|v| v.norm()).fold(0.0, f64::max))) {
        return Err(CalcError::NotHermitian(s.hermitian_defect()));
    }
    let n = s.dim();
    let mut shifted = s.data().clone();
    for j in 0..n {
        shifted[[j, j]] -= z;
    }
    let inv = linalg::solve(&shifted, &linalg::identity(n))?;
    let bound = 1.0 / z.im.abs();
    let norm_est = operator_norm_estimate(&inv);
    if norm_est > bound * (1.0 + 1e-6) {
        return Err(CalcError::Singular(format!(
            "resolvent norm estimate {:.6e} exceeds the Hermitian bound {:.6e}",
            norm_est, bound
        )));
    }
    OperatorMatrix::new(s.grid().clone(), inv)
}

/// Largest-singular-value estimate by power iteration on A†A.
///
/// Deterministic start vector; accurate to a few digits, which is all the
/// resolvent bound check needs.
pub fn operator_norm_estimate(a: &Array2<Complex64>) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut v: Vec<Complex64> = (0..n)
        .map(|j| Complex64::new(1.0 + (j as f64 * 0.7391).sin(), (j as f64 * 0.3571).cos()))
        .collect();
    let mut norm = 0.0;
    for _ in 0..40 {
        // w = A v, u = A† w.
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        for r in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..n {
                acc += a[[r, c]] * v[c];
            }
            w[r] = acc;
        }
        let mut u = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..n {
                acc += a[[r, c]].conj() * w[r];
            }
            u[c] = acc;
        }
        let len = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if len == 0.0 {
            return 0.0;
        }
        norm = len.sqrt();
        for x in u.iter_mut() {
            *x /= len;
        }
        v = u;
    }
    norm
}

// ---------------------------------------------------------------------------
// Ladder evaluation
// ---------------------------------------------------------------------------

/// Supplies a Hermitian truncation for each requested rung.
pub trait RungBuilder: Sync {
    fn build(&self, grid: &GridSpec) -> Result<OperatorMatrix>;
}

impl<F> RungBuilder for F
where
    F: Fn(&GridSpec) -> Result<OperatorMatrix> + Sync,
{
    fn build(&self, grid: &GridSpec) -> Result<OperatorMatrix> {
        self(grid)
    }
}

/// Rung builder that quantizes a fixed symbol on every rung.
pub struct QuantizeBuilder<'a>(pub &'a SymbolProvider);

impl RungBuilder for QuantizeBuilder<'_> {
    fn build(&self, grid: &GridSpec) -> Result<OperatorMatrix> {
        crate::quantize::quantize_provider(self.0, grid)
    }
}

/// Sorted eigenvalue lists for every rung of a ladder.
#[derive(Clone, Debug)]
pub struct LadderEigendata {
    pub rungs: Vec<(GridSpec, Vec<f64>)>,
}

/// Builds and eigensolves every rung (rungs run in parallel).
pub fn solve_ladder<B: RungBuilder + ?Sized>(
    builder: &B,
    ladder: &TruncationLadder,
) -> Result<LadderEigendata> {
    let rungs: Vec<(GridSpec, Vec<f64>)> = ladder
        .rungs()
        .par_iter()
        .map(|g| {
            let op = builder.build(g)?;
            if !op.grid().same_as(g) {
                return Err(CalcError::GridMismatch(
                    "rung builder returned an operator on a different grid".into(),
                ));
            }
            let vals = eigensolve(&op)?;
            Ok((g.clone(), vals))
        })
        .collect::<Result<_>>()?;
    Ok(LadderEigendata { rungs })
}

fn count_in(sorted: &[f64], a: f64, b: f64) -> usize {
    let lo = sorted.partition_point(|&v| v < a);
    let hi = sorted.partition_point(|&v| v <= b);
    hi - lo
}

fn nearest_distance(sorted: &[f64], x: f64) -> f64 {
    if sorted.is_empty() {
        return f64::INFINITY;
    }
    let i = sorted.partition_point(|&v| v < x);
    let mut best = f64::INFINITY;
    if i < sorted.len() {
        best = best.min((sorted[i] - x).abs());
    }
    if i > 0 {
        best = best.min((sorted[i - 1] - x).abs());
    }
    best
}

/// The gap between the two values of `sorted` that bracket `x`, or `None`
/// when `x` lies outside the sorted range.
fn bracket_gap(sorted: &[f64], x: f64) -> Option<f64> {
    let i = sorted.partition_point(|&v| v < x);
    if i == 0 || i >= sorted.len() {
        return None;
    }
    Some(sorted[i] - sorted[i - 1])
}

/// Joint classification of a ladder's eigenvalue data.
#[derive(Clone, Debug)]
pub struct LadderClassification {
    /// Intervals with stable edges (or a truncation-tracking top).
    pub intervals: Vec<(f64, f64)>,
    /// True when the top of the last interval tracks the momentum cap.
    pub unbounded_above: bool,
    /// Position-stable isolated values: (value, finest multiplicity,
    /// essential flag).  Essential means the local count kept growing with
    /// the rung size; non-essential means it stayed fixed.
    pub stable_points: Vec<(f64, usize, bool)>,
    /// Values that could not be classified.
    pub undecided: Vec<f64>,
    /// Number of finest-rung eigenvalues dropped as unstable.
    pub dropped: usize,
}

/// Classifies finest-rung eigenvalues into continuum intervals, stable
/// isolated points, and undecided values, by comparing eigenvalue counts and
/// positions across the last three rungs.
///
/// Continuum detection: for each pair of neighbouring finest-rung
/// eigenvalues, the count of eigenvalues in a window around the pair must
/// grow by ≥ 1.5× per rung for two consecutive rung steps; maximal bridged
/// runs become candidate intervals.  A candidate is kept when its edges are
/// reproduced by the two previous rungs (within a small multiple of the
/// resolution); a moving top edge is accepted only when it tracks the grid's
/// largest momentum energy, which marks the interval as unbounded above.
pub fn classify_ladder(data: &LadderEigendata, delta: f64) -> Result<LadderClassification> {
    if data.rungs.len() < 3 {
        return Err(CalcError::Precondition(
            "classification needs at least three rungs".into(),
        ));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(CalcError::Precondition("resolution must be positive".into()));
    }
    let m = data.rungs.len();
    let (fin_grid, fin) = &data.rungs[m - 1];
    let (_, prev) = &data.rungs[m - 2];
    let (_, prev2) = &data.rungs[m - 3];
    if fin.is_empty() {
        return Err(CalcError::NonConvergent("no eigenvalues on the finest rung".into()));
    }

    // Momentum-energy cap of the finest rung: the largest representable
    // |η|² along the most limited axis.
    let nyquist_energy = (0..fin_grid.dim())
        .map(|ax| {
            let nyq = std::f64::consts::PI / fin_grid.hx(ax);
            nyq * nyq
        })
        .fold(f64::INFINITY, f64::min);

    // Per-rung spectral tops.  When the top itself keeps growing with the
    // truncation, the stretch above the second-finest rung's reach cannot be
    // cross-validated by counts — coarser rungs have no eigenvalues there —
    // and is treated as the truncation-limited tail of a growing interval.
    let top2 = *prev2.last().expect("non-empty rung");
    let top1 = *prev.last().expect("non-empty rung");
    let top0 = *fin.last().expect("non-empty rung");
    let tops_growing = top1 > 0.0 && top2 > 0.0 && top0 >= 1.25 * top1 && top1 >= 1.25 * top2;
    let cap_ceiling = 0.8 * top1;

    // Pair bridging: neighbouring finest eigenvalues belong to a common
    // continuum stretch when the local eigenvalue count grows persistently
    // with the rung AND the previous rung already resolves the pair's gap.
    // The count test carries one unit of slack per step because windowed
    // counts at desk scale are small integers.
    let mut bridged = vec![false; fin.len().saturating_sub(1)];
    for i in 0..bridged.len() {
        let gap = fin[i + 1] - fin[i];
        if gap <= delta {
            bridged[i] = true;
            continue;
        }
        if tops_growing && fin[i] >= cap_ceiling {
            bridged[i] = true;
            continue;
        }
        let w = delta.max(4.0 * gap);
        let (a, b) = (fin[i] - w, fin[i + 1] + w);
        let width = b - a;
        let c2 = count_in(prev2, a, b) as f64;
        let c1 = count_in(prev, a, b) as f64;
        let c0 = count_in(fin, a, b) as f64;
        let first_step = if c2 == 0.0 {
            c1 >= 2.0
        } else {
            c1 >= GROWTH_FACTOR * c2 - 1.0
        };
        let second_step = c1 > 0.0 && c0 >= GROWTH_FACTOR * c1 - 1.0 && c0 >= 4.0;
        // The previous rung's mean local spacing must already resolve the
        // gap; otherwise the window is measuring global size, not density.
        let gap_fill = gap <= width / (c1 + 1.0);
        bridged[i] = first_step && second_step && gap_fill;
    }
    // Heal isolated breaks: a lone failed pair between two bridged ones is
    // integer noise in the window counts.
    let raw = bridged.clone();
    for i in 0..bridged.len() {
        if !raw[i] && i > 0 && raw[i - 1] && i + 1 < raw.len() && raw[i + 1] {
            bridged[i] = true;
        }
    }

    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut unbounded_above = false;
    let mut stable_points: Vec<(f64, usize, bool)> = Vec::new();
    let mut undecided: Vec<f64> = Vec::new();
    let mut dropped = 0usize;

    let edge_tol = EDGE_DRIFT_FACTOR * delta;
    // Shared classifier for isolated values and degenerate clusters: stable
    // position with a fixed local count is a discrete point; stable position
    // with persistently growing count is an essential point; anything else
    // is undecided (returned as false).
    let classify_point = |center: f64,
                              stable_points: &mut Vec<(f64, usize, bool)>,
                              undecided: &mut Vec<f64>|
     -> bool {
        let pos_stable = nearest_distance(prev, center) <= delta
            && nearest_distance(prev2, center) <= delta;
        if !pos_stable {
            undecided.push(center);
            return false;
        }
        let c2 = count_in(prev2, center - delta, center + delta) as f64;
        let c1 = count_in(prev, center - delta, center + delta) as f64;
        let c0 = count_in(fin, center - delta, center + delta) as f64;
        if (c0 - c1).abs() < 0.5 && (c1 - c2).abs() < 0.5 {
            stable_points.push((center, c0 as usize, false));
            true
        } else if c1 >= GROWTH_FACTOR * c2 && c0 >= GROWTH_FACTOR * c1 {
            stable_points.push((center, c0 as usize, true));
            true
        } else {
            undecided.push(center);
            false
        }
    };

    // Maximal runs of bridged pairs, as index ranges [start, end] into `fin`.
    let mut runs: Vec<(usize, usize)> = Vec::new();
    {
        let mut i = 0usize;
        while i < fin.len() {
            let mut j = i;
            while j < bridged.len() && bridged[j] {
                j += 1;
            }
            if j > i {
                runs.push((i, j));
                i = j + 1;
            } else {
                i += 1;
            }
        }
    }
    let mut consumed = vec![false; fin.len()];
    for &(s, e) in &runs {
        for flag in &mut consumed[s..=e] {
            *flag = true;
        }
    }

    let prev_min = prev[0];
    for &(s, e) in &runs {
        let b = fin[e];
        if b - fin[s] < POINT_WIDTH_FACTOR * delta {
            // Too narrow for an interval: classify the cluster as a point.
            let center = fin[s..=e].iter().sum::<f64>() / (e - s + 1) as f64;
            if !classify_point(center, &mut stable_points, &mut undecided) {
                dropped += e - s + 1;
            }
            continue;
        }
        // Extend the lower edge downward over sparse band-edge modes: near a
        // band bottom the level spacing shrinks with the rung even though
        // the counts are too small for the bridging test.  Each absorbed
        // value must be corroborated by the previous rung and its gap to the
        // run must be finer than the previous rung's local spacing there.
        let mut s2 = s;
        while s2 > 0 && !consumed[s2 - 1] {
            let v = fin[s2 - 1];
            let gap_up = fin[s2] - v;
            let below_reach = v < prev_min && prev_min - v <= edge_tol;
            let stable_enough = below_reach || nearest_distance(prev, v) <= edge_tol;
            let shrink_ok = gap_up <= delta
                || below_reach
                || match bracket_gap(prev, v) {
                    Some(g1) => gap_up <= BAND_EDGE_SHRINK * g1,
                    None => false,
                };
            if !(stable_enough && shrink_ok) {
                break;
            }
            s2 -= 1;
            consumed[s2] = true;
        }
        let a = fin[s2];
        let lower_ok = (nearest_distance(prev, a) <= edge_tol
            && nearest_distance(prev2, nearest_value(prev, a)) <= edge_tol)
            || (a < prev_min && prev_min - a <= edge_tol);
        let upper_stable = nearest_distance(prev, b) <= edge_tol;
        let upper_tracks_cap = b >= NYQUIST_TRACK_FRACTION * nyquist_energy;
        // An interval growing with the truncation must already have been
        // visible from the coarsest rung for its lower edge to be trusted.
        let coarse_visible = a <= 0.5 * top2;
        if lower_ok && upper_stable {
            intervals.push((a, b));
        } else if lower_ok && upper_tracks_cap && coarse_visible {
            intervals.push((a, b));
            unbounded_above = true;
        } else if lower_ok {
            // Corroborated body under a drifting top: the run's density
            // grows with the rung, but its upper stretch neither stabilizes
            // nor tracks the momentum cap (difference-scheme kinetic bands
            // top out near 4/h², below the tracking fraction).  Keep the
            // sub-run up to the last value both previous rungs reproduce
            // and leave the drifting tail unclassified.
            let mut e2 = e;
            while e2 > s2 {
                let v = fin[e2];
                if nearest_distance(prev, v) <= edge_tol
                    && nearest_distance(prev2, nearest_value(prev, v)) <= edge_tol
                {
                    break;
                }
                e2 -= 1;
            }
            let b2 = fin[e2];
            if e2 > s2 && b2 - a >= POINT_WIDTH_FACTOR * delta {
                intervals.push((a, b2));
                dropped += e - e2;
                undecided.push(b);
            } else {
                dropped += e - s2 + 1;
                undecided.push(a);
                undecided.push(b);
            }
        } else {
            dropped += e - s2 + 1;
            undecided.push(a);
            undecided.push(b);
        }
    }

    // Whatever no run claimed is an isolated candidate point.
    for k in 0..fin.len() {
        if !consumed[k] && !classify_point(fin[k], &mut stable_points, &mut undecided) {
            dropped += 1;
        }
    }

    // Keep the undecided report readable.
    undecided.sort_by(|x, y| x.partial_cmp(y).expect("finite values"));
    undecided.dedup();
    if undecided.len() > UNDECIDED_CAP {
        let step = undecided.len() as f64 / UNDECIDED_CAP as f64;
        undecided = (0..UNDECIDED_CAP)
            .map(|k| undecided[(k as f64 * step) as usize])
            .collect();
    }

    Ok(LadderClassification {
        intervals,
        unbounded_above,
        stable_points,
        undecided,
        dropped,
    })
}

fn nearest_value(sorted: &[f64], x: f64) -> f64 {
    if sorted.is_empty() {
        return f64::INFINITY;
    }
    let i = sorted.partition_point(|&v| v < x);
    let mut best = f64::INFINITY;
    let mut val = f64::INFINITY;
    if i < sorted.len() && (sorted[i] - x).abs() < best {
        best = (sorted[i] - x).abs();
        val = sorted[i];
    }
    if i > 0 && (sorted[i - 1] - x).abs() < best {
        val = sorted[i - 1];
    }
    val
}

fn classification_to_spectrum(
    cls: &LadderClassification,
    delta: f64,
    essential_only: bool,
) -> SpectrumSet {
    let mut out = SpectrumSet::empty(delta);
    out.intervals = cls.intervals.clone();
    out.points = cls
        .stable_points
        .iter()
        .filter(|&&(_, _, essential)| !essential_only || essential)
        .map(|&(v, mult, _)| SpectrumPoint { v, mult })
        .collect();
    out.undecided = cls.undecided.clone();
    if cls.unbounded_above {
        out.add_flag(FLAG_UNBOUNDED_ABOVE);
    }
    if cls.dropped > 0 {
        out.add_flag(format!("{FLAG_DROPPED_UNSTABLE}:{}", cls.dropped));
    }
    out.canonicalize();
    out
}

/// Full-spectrum estimate across a ladder: position-stable values are kept
/// as points, persistent-density regions as intervals.
///
/// Errors with a non-convergent verdict when nothing stabilizes.
pub fn estimate_spectrum<B: RungBuilder + ?Sized>(
    builder: &B,
    ladder: &TruncationLadder,
    delta: f64,
) -> Result<SpectrumSet> {
    let data = solve_ladder(builder, ladder)?;
    spectrum_from_data(&data, delta)
}

/// Spectrum estimate from precomputed ladder eigendata.
pub fn spectrum_from_data(data: &LadderEigendata, delta: f64) -> Result<SpectrumSet> {
    let cls = classify_ladder(data, delta)?;
    let out = classification_to_spectrum(&cls, delta, false);
    if out.is_empty() {
        return Err(CalcError::NonConvergent(
            "no spectral value stabilized across the truncation ladder".into(),
        ));
    }
    Ok(out)
}

/// Essential-spectrum estimate: growing-density intervals plus points whose
/// local eigenvalue count keeps growing; stable finite-multiplicity points
/// are classified discrete and excluded.  Ambiguous values are reported in
/// the `undecided` list.  An empty essential estimate is a legitimate result
/// (compact-resolvent operators), not an error.
pub fn estimate_essential<B: RungBuilder + ?Sized>(
    builder: &B,
    ladder: &TruncationLadder,
    delta: f64,
) -> Result<SpectrumSet> {
    let data = solve_ladder(builder, ladder)?;
    essential_from_data(&data, delta)
}

/// Essential-spectrum estimate from precomputed ladder eigendata.
pub fn essential_from_data(data: &LadderEigendata, delta: f64) -> Result<SpectrumSet> {
    let cls = classify_ladder(data, delta)?;
    Ok(classification_to_spectrum(&cls, delta, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{sample, SymbolClass, SymbolProvider};
    use crate::weyl::{translate_operator, OperatorMatrix};
    use crate::phase::PhasePoint;
    use num_complex::Complex64;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigensolve_identity_is_all_ones() {
        let grid = GridSpec::fourier_dual_d1(4.0, 16).unwrap();
        let vals = eigensolve(&OperatorMatrix::identity(&grid)).unwrap();
        assert_eq!(vals.len(), 16);
        for v in vals {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eigensolve_oscillator_matches_odd_integers() {
        let grid = GridSpec::fourier_dual_d1(10.0, 256).unwrap();
        let f = SymbolProvider::new(
            "osc",
            1,
            SymbolClass::SmoothBoundedDerivatives,
            Arc::new(|x: &[f64], xi: &[f64]| c(x[0] * x[0] + xi[0] * xi[0], 0.0)),
        );
        let op = crate::quantize::quantize_provider(&f, &grid).unwrap();
        let vals = eigensolve(&op).unwrap();
        for (k, want) in (0..8).map(|k| (k, (2 * k + 1) as f64)) {
            assert!(
                (vals[k] - want).abs() < 1e-3,
                "eigenvalue {k}: got {}, want {want}",
                vals[k]
            );
        }
    }

    #[test]
    fn eigensolve_diagonal_multiplication_returns_samples() {
        let grid = GridSpec::fourier_dual_d1(6.0, 48).unwrap();
        let op = OperatorMatrix::from_position_fn(&grid, |y| c(y[0].tanh(), 0.0)).unwrap();
        let vals = eigensolve(&op).unwrap();
        let mut samples: Vec<f64> = grid.x_axis(0).iter().map(|x| x.tanh()).collect();
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (v, s) in vals.iter().zip(&samples) {
            assert!((v - s).abs() < 1e-12);
        }
    }

    #[test]
    fn eigensolve_rejects_non_hermitian() {
        let grid = GridSpec::fourier_dual_d1(4.0, 8).unwrap();
        let mut data = ndarray::Array2::zeros((8, 8));
        data[[0, 1]] = c(1.0, 0.0);
        let op = OperatorMatrix::new(grid, data).unwrap();
        assert!(matches!(eigensolve(&op), Err(CalcError::NotHermitian(_))));
    }

    #[test]
    fn eigenvalues_survive_phase_space_translation() {
        let grid = GridSpec::fourier_dual_d1(8.0, 64).unwrap();
        let f = SymbolProvider::new(
            "bump",
            1,
            SymbolClass::SmoothBoundedDerivatives,
            Arc::new(|x: &[f64], xi: &[f64]| {
                c((-(x[0] * x[0] + xi[0] * xi[0])).exp() + 0.3 * x[0].tanh(), 0.0)
            }),
        );
        let op = crate::quantize::quantize_provider(&f, &grid).unwrap();
        // Shift by a lattice-commensurate phase-space vector.
        let shift = PhasePoint::d1(4.0 * grid.hx(0), -3.0 * grid.hxi(0));
        let moved = translate_operator(&op, &shift).unwrap();
        let a = eigensolve(&op).unwrap();
        let b = eigensolve(&moved).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-8, "eigenvalue moved under translation");
        }
    }

    #[test]
    fn resolvent_of_identity_and_zero_match_scalar_formulas() {
        let grid = GridSpec::fourier_dual_d1(4.0, 8).unwrap();
        let id = OperatorMatrix::identity(&grid);
        let r = resolvent(&id, c(0.0, 1.0)).unwrap();
        // (1 − i)^{-1} = (1 + i)/2.
        for j in 0..8 {
            assert!((r.data()[[j, j]] - c(0.5, 0.5)).norm() < 1e-12);
        }
        let zero = OperatorMatrix::new(grid.clone(), ndarray::Array2::zeros((8, 8))).unwrap();
        let r0 = resolvent(&zero, c(0.0, 1.0)).unwrap();
        // (0 − i)^{-1} = i.
        for j in 0..8 {
            assert!((r0.data()[[j, j]] - c(0.0, 1.0)).norm() < 1e-12);
        }
        assert!(resolvent(&id, c(0.5, 0.0)).is_err());
    }

    #[test]
    fn resolvent_norm_matches_spectral_distance() {
        let grid = GridSpec::fourier_dual_d1(10.0, 128).unwrap();
        let f = SymbolProvider::new(
            "osc",
            1,
            SymbolClass::SmoothBoundedDerivatives,
            Arc::new(|x: &[f64], xi: &[f64]| c(x[0] * x[0] + xi[0] * xi[0], 0.0)),
        );
        let op = crate::quantize::quantize_provider(&f, &grid).unwrap();
        let r = resolvent(&op, c(0.0, 1.0)).unwrap();
        // Nearest eigenvalue to i is 1, so ‖R(i)‖ = 1/|1 − i| = 1/√2.
        let want = 1.0 / 2.0f64.sqrt();
        let got = operator_norm_estimate(r.data());
        assert!(
            (got - want).abs() < 1e-3,
            "resolvent norm {got}, want {want}"
        );
        assert!(got <= 1.0 + 1e-9);
    }

    #[test]
    fn ladder_shape_is_validated() {
        let g1 = GridSpec::fourier_dual_d1(4.0, 32).unwrap();
        let g2 = GridSpec::fourier_dual_d1(6.0, 80).unwrap();
        let g3 = GridSpec::fourier_dual_d1(9.0, 200).unwrap();
        assert!(TruncationLadder::new(vec![g1.clone(), g2.clone(), g3.clone()]).is_ok());
        assert!(TruncationLadder::new(vec![g1.clone(), g2.clone()]).is_err());
        // Shrinking box rejected.
        let small = GridSpec::fourier_dual_d1(5.0, 300).unwrap();
        assert!(TruncationLadder::new(vec![g1.clone(), g2.clone(), small]).is_err());
        // Non-growing resolution (hx) rejected even though N grows.
        let coarse = GridSpec::fourier_dual_d1(40.0, 220).unwrap();
        assert!(TruncationLadder::new(vec![g1, g2, coarse]).is_err());
        let std = TruncationLadder::standard_d1();
        assert_eq!(std.rungs().len(), 3);
        assert_eq!(std.finest().nx(0), 800);
    }

    #[test]
    fn spectrum_of_bounded_multiplication_is_its_essential_range() {
        let ladder = TruncationLadder::geometric_d1(5.0, 80, 3, 1.6, 2.6).unwrap();
        let builder = |g: &GridSpec| OperatorMatrix::from_position_fn(g, |y| c(y[0].tanh(), 0.0));
        let spec = estimate_spectrum(&builder, &ladder, 0.02).unwrap();
        assert_eq!(spec.intervals.len(), 1, "want a single interval, got {:?}", spec);
        let (a, b) = spec.intervals[0];
        assert!((a + 1.0).abs() < 0.02, "low edge {a}");
        assert!((b - 1.0).abs() < 0.02, "high edge {b}");
        assert!(!spec.has_flag(FLAG_UNBOUNDED_ABOVE));
        let oracle = SpectrumSet::from_intervals(&[(-1.0, 1.0)], 0.02);
        assert!(spec.hausdorff_distance(&oracle, None) < 0.02);
    }

    #[test]
    fn spectrum_of_oscillator_is_isolated_odd_integers() {
        let ladder = TruncationLadder::geometric_d1(5.0, 80, 3, 1.6, 2.6).unwrap();
        let f = SymbolProvider::new(
            "osc",
            1,
            SymbolClass::SmoothBoundedDerivatives,
            Arc::new(|x: &[f64], xi: &[f64]| c(x[0] * x[0] + xi[0] * xi[0], 0.0)),
        );
        let spec = estimate_spectrum(&QuantizeBuilder(&f), &ladder, 0.02).unwrap();
        assert!(spec.intervals.is_empty(), "oscillator must have no intervals: {:?}", spec.intervals);
        for k in 0..8 {
            let want = (2 * k + 1) as f64;
            let hit = spec
                .points
                .iter()
                .find(|p| (p.v - want).abs() < 1e-3)
                .unwrap_or_else(|| panic!("missing eigenvalue {want}; points {:?}", spec.points));
            assert_eq!(hit.mult, 1);
        }
        // Discrete spectrum only: the essential classifier must reject it all.
        let data = solve_ladder(&QuantizeBuilder(&f), &ladder).unwrap();
        let ess = essential_from_data(&data, 0.02).unwrap();
        assert!(ess.intervals.is_empty(), "essential intervals {:?}", ess.intervals);
        assert!(ess.points.is_empty(), "essential points {:?}", ess.points);
    }

    #[test]
    fn free_kinetic_spectrum_grows_with_truncation_and_is_flagged() {
        let ladder = TruncationLadder::geometric_d1(5.0, 80, 3, 1.6, 2.6).unwrap();
        let f = SymbolProvider::new(
            "kinetic",
            1,
            SymbolClass::SmoothBoundedDerivatives,
            Arc::new(|_x: &[f64], xi: &[f64]| c(xi[0] * xi[0], 0.0)),
        );
        let spec = estimate_spectrum(&QuantizeBuilder(&f), &ladder, 0.02).unwrap();
        assert_eq!(spec.intervals.len(), 1);
        let (a, b) = spec.intervals[0];
        assert!(a.abs() < 1e-6, "low edge {a}");
        assert!(spec.has_flag(FLAG_UNBOUNDED_ABOVE), "flags {:?}", spec.flags);
        // The top tracks the finest momentum cap (π/hx)².
        let nyq = std::f64::consts::PI / ladder.finest().hx(0);
        assert!(b > 0.8 * nyq * nyq, "top {b} vs cap {}", nyq * nyq);
        assert!(spec.points.is_empty());
    }

    #[test]
    fn essential_estimate_keeps_two_sided_band_and_drops_nothing_below_edge() {
        let ladder = TruncationLadder::geometric_d1(5.0, 80, 3, 1.6, 2.6).unwrap();
        let f = SymbolProvider::new(
            "kinetic+step",
            1,
            SymbolClass::SmoothBoundedDerivatives,
            Arc::new(|x: &[f64], xi: &[f64]| c(xi[0] * xi[0] + x[0].tanh(), 0.0)),
        );
        let ess = estimate_essential(&QuantizeBuilder(&f), &ladder, 0.1).unwrap();
        assert_eq!(ess.intervals.len(), 1, "essential {:?}", ess);
        let (a, _) = ess.intervals[0];
        assert!((a + 1.0).abs() < 0.1, "essential low edge {a}");
        assert!(ess.has_flag(FLAG_UNBOUNDED_ABOVE));
        assert!(ess.points.is_empty());
        // Nothing sits below the band edge.
        assert!(ess.support_min().unwrap() > -1.0 - 0.1);
    }

    #[test]
    fn identity_ladder_yields_one_growing_point() {
        let ladder = TruncationLadder::geometric_d1(3.0, 16, 3, 1.6, 2.6).unwrap();
        let builder = |g: &GridSpec| Ok(OperatorMatrix::identity(g));
        let spec = estimate_spectrum(&builder, &ladder, 0.05).unwrap();
        assert!(spec.intervals.is_empty());
        assert_eq!(spec.points.len(), 1);
        assert!((spec.points[0].v - 1.0).abs() < 1e-12);
        assert_eq!(spec.points[0].mult, ladder.finest().config_len());
        // A multiplicity that keeps growing with the rung is essential.
        let ess = estimate_essential(&builder, &ladder, 0.05).unwrap();
        assert_eq!(ess.points.len(), 1);
        assert!((ess.points[0].v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flip_flopping_rungs_are_reported_non_convergent() {
        let ladder = TruncationLadder::geometric_d1(3.0, 16, 3, 1.6, 2.6).unwrap();
        let sizes: Vec<usize> = ladder.rungs().iter().map(|g| g.nx(0)).collect();
        let builder = move |g: &GridSpec| {
            let rung = sizes.iter().position(|&n| n == g.nx(0)).unwrap_or(0);
            let v = if rung % 2 == 0 { 0.0 } else { 1.0 };
            OperatorMatrix::from_position_fn(g, |_| c(v, 0.0))
        };
        match estimate_spectrum(&builder, &ladder, 0.05) {
            Err(CalcError::NonConvergent(_)) => {}
            other => panic!("expected a non-convergent verdict, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn compact_probe_spectrum_concentrates_at_zero_with_one_discrete_point() {
        let ladder = TruncationLadder::geometric_d1(5.0, 80, 3, 1.6, 2.6).unwrap();
        let f = SymbolProvider::new(
            "projector",
            1,
            SymbolClass::SmoothBoundedDerivatives,
            Arc::new(|x: &[f64], xi: &[f64]| c(2.0 * (-(x[0] * x[0] + xi[0] * xi[0])).exp(), 0.0)),
        );
        let data = solve_ladder(&QuantizeBuilder(&f), &ladder).unwrap();
        let spec = spectrum_from_data(&data, 0.01).unwrap();
        // One stable simple eigenvalue at 1 plus the degenerate mass at 0.
        assert!(spec.covers(1.0, 1e-6));
        assert!(spec.covers(0.0, 1e-6));
        let ess = essential_from_data(&data, 0.01).unwrap();
        assert!(ess.intervals.is_empty());
        assert_eq!(ess.points.len(), 1, "essential {:?}", ess);
        assert!(ess.points[0].v.abs() < 1e-9);
        assert!(!ess.covers(1.0, 0.5), "the simple eigenvalue 1 is discrete");
    }

    #[test]
    fn sampled_symbol_route_and_provider_route_agree_for_multiplication() {
        // Sanity link with the sampling machinery: a sampled bounded symbol
        // quantizes to the same spectrum as its provider.
        let grid = GridSpec::fourier_dual_d1(6.0, 48).unwrap();
        let f = SymbolProvider::new(
            "step",
            1,
            SymbolClass::SmoothBoundedDerivatives,
            Arc::new(|x: &[f64], _xi: &[f64]| c(x[0].tanh(), 0.0)),
        );
        let s = sample(&f, &grid).unwrap();
        let a = eigensolve(&crate::quantize::quantize(&s).unwrap()).unwrap();
        let b = eigensolve(&crate::quantize::quantize_provider(&f, &grid).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn spectrum_set_canonical_form_and_serialization() {
        let mut s = SpectrumSet::empty(0.1);
        s.intervals = vec![(0.0, 1.0), (1.05, 2.0), (5.0, 6.0)];
        s.points = vec![
            SpectrumPoint { v: 0.5, mult: 1 },
            SpectrumPoint { v: 3.0, mult: 2 },
            SpectrumPoint { v: 3.04, mult: 1 },
        ];
        s.canonicalize();
        // First two intervals merge; the point at 0.5 is absorbed; the two
        // points near 3 merge with combined multiplicity.
        assert_eq!(s.intervals, vec![(0.0, 2.0), (5.0, 6.0)]);
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.points[0].mult, 3);
        assert!((s.points[0].v - 3.013).abs() < 1e-2);

        let json = serde_json::to_value(&s).unwrap();
        assert!(json.get("intervals").is_some());
        assert!(json.get("points").is_some());
        assert!(json.get("resolution").is_some());
        assert!(json.get("flags").is_some());
        let back: SpectrumSet = serde_json::from_value(json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn hausdorff_distance_between_interval_sets() {
        let a = SpectrumSet::from_intervals(&[(0.0, 1.0)], 0.01);
        let b = SpectrumSet::from_intervals(&[(0.2, 1.0)], 0.01);
        assert!((a.hausdorff_distance(&b, None) - 0.2).abs() < 1e-12);
        // A gap inside the interval is seen from its midpoint.
        let c1 = SpectrumSet::from_intervals(&[(0.0, 4.0)], 0.01);
        let c2 = SpectrumSet::from_intervals(&[(0.0, 1.0), (3.0, 4.0)], 0.01);
        assert!((c1.hausdorff_distance(&c2, None) - 1.0).abs() < 1e-12);
        // Caps restrict the comparison from above.
        let d1 = SpectrumSet::from_intervals(&[(0.0, 100.0)], 0.01);
        let d2 = SpectrumSet::from_intervals(&[(0.0, 7.0)], 0.01);
        assert!((d1.hausdorff_distance(&d2, None) - 93.0).abs() < 1e-12);
        assert!(d1.hausdorff_distance(&d2, Some(7.0)) < 1e-12);
        // Union merges at the coarser resolution.
        let u = b.union(&c2);
        assert_eq!(u.intervals, vec![(0.0, 1.0), (3.0, 4.0)]);
        let empty = SpectrumSet::empty(0.01);
        assert_eq!(empty.hausdorff_distance(&empty, None), 0.0);
        assert_eq!(a.hausdorff_distance(&empty, None), f64::INFINITY);
    }
}
