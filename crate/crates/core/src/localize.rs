//! Asymptotic localization of operators along diverging phase-space paths.
//!
//! Translating an operator by a diverging path and following the translates
//! on a fixed observation window produces, when the translates settle, a
//! limit operator.  The essential spectrum is then assembled as the union of
//! the limit spectra over a declared family of paths and compared with the
//! direct truncation-ladder estimate.
//!
//! Two detection routes are provided.  The symbol route follows the
//! translated symbol `f(· − X(t))` in the sup norm on the window and is
//! meaningful for bounded symbols.  The resolvent route follows
//! `(H_t − z)⁻¹` against a fixed compact probe — the seminorm
//! `‖KR‖ + ‖RK‖` — which also handles unbounded candidates: translates
//! whose resolvent itself is crushed to zero (the operator escapes the
//! window entirely) are reported as `trivial_resolvent` and contribute an
//! empty spectrum.

use crate::error::{CalcError, Result};
use crate::grid::GridSpec;
use crate::linalg;
use crate::path::{AsymptoticPath, PathFamily};
use crate::phase::PhasePoint;
use crate::quantize::{gaussian_probe, quantize_provider};
use crate::spectral::{
    estimate_essential, estimate_spectrum, SpectrumSet, TruncationLadder, FLAG_LOWER_BOUND_ONLY,
};
use crate::symbol::{sample, SampledSymbol, SymbolClass, SymbolProvider};
use crate::weyl::{CompactProbe, OperatorMatrix};
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Relative tolerance for the Hermitian check on translated truncations.
const HERMITIAN_TOL: f64 = 1e-8;
/// Relative eigenvalue cutoff when factoring a compact probe.
const PROBE_RANK_CUT: f64 = 1e-12;
/// Default resolution for the spectra reported with localization results.
const DEFAULT_SPECTRAL_DELTA: f64 = 0.05;
/// Default rank of the probe used by the union assembler.
const DEFAULT_PROBE_RANK: usize = 6;

/// Outcome of following one path to its limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalizationStatus {
    /// The translates settled; a limit operator (or symbol) was extracted.
    Converged,
    /// The resolvent itself vanished against the probe: the translates
    /// escape every compact region and the limit contributes no spectrum.
    TrivialResolvent,
    /// The translates kept moving at the final ladder steps.
    NonConvergent,
}

/// What one path contributed: a status, the limit symbol when one exists,
/// the spectrum of the limit operator, and the convergence curve
/// (t, defect) actually measured.
#[derive(Clone, Debug)]
pub struct LocalizationResult {
    pub path_label: String,
    pub status: LocalizationStatus,
    pub limit_symbol: Option<SampledSymbol>,
    pub spectrum: SpectrumSet,
    pub convergence_curve: Vec<(f64, f64)>,
}

impl LocalizationResult {
    pub fn is_converged(&self) -> bool {
        self.status == LocalizationStatus::Converged
    }
}

/// Options shared by the localization routines.
#[derive(Clone, Debug)]
pub struct LocalizeOptions {
    /// Resolution of the reported limit spectrum.
    pub spectral_delta: f64,
    /// Ladder for the limit-spectrum estimate; derived from the window when
    /// absent.
    pub spectral_ladder: Option<TruncationLadder>,
    /// Skip the limit-spectrum eigensolves (the union assembler does its
    /// own, after deduplicating limits).
    pub compute_spectrum: bool,
}

impl Default for LocalizeOptions {
    fn default() -> Self {
        Self {
            spectral_delta: DEFAULT_SPECTRAL_DELTA,
            spectral_ladder: None,
            compute_spectrum: true,
        }
    }
}

/// Supplier of truncations of the translated operator `T_X(H)` on a grid.
///
/// Implementations translate at the source level — shifted symbols or
/// shifted coefficient fields — so truncation and translation commute by
/// construction.
pub trait TranslatedBuilder: Sync {
    fn build(&self, shift: &PhasePoint, grid: &GridSpec) -> Result<OperatorMatrix>;

    /// The translated symbol sampled on the window, when the operator comes
    /// from a symbol; used for deduplication and reporting.
    fn limit_symbol(&self, _shift: &PhasePoint, _window: &GridSpec) -> Option<SampledSymbol> {
        None
    }
}

/// Translated quantization of a fixed symbol.
pub struct SymbolTranslated<'a>(pub &'a SymbolProvider);

impl TranslatedBuilder for SymbolTranslated<'_> {
    fn build(&self, shift: &PhasePoint, grid: &GridSpec) -> Result<OperatorMatrix> {
        quantize_provider(&self.0.translate(shift)?, grid)
    }

    fn limit_symbol(&self, shift: &PhasePoint, window: &GridSpec) -> Option<SampledSymbol> {
        let shifted = self.0.translate(shift).ok()?;
        sample(&shifted, window).ok()
    }
}

/// A three-rung truncation ladder ending at the given window, with the box
/// and the resolution both refined geometrically toward it.  For small
/// windows the ratios are tamed so the coarsest rung still has enough
/// points and every rung strictly refines the previous one.
pub fn ladder_for_window(window: &GridSpec) -> Result<TruncationLadder> {
    let dim = window.dim();
    let n_min = (0..dim).map(|ax| window.nx(ax)).min().expect("dim >= 1");
    if n_min < 22 {
        return Err(CalcError::Precondition(format!(
            "window with {n_min} points per axis is too coarse to derive a \
             truncation ladder; supply one explicitly"
        )));
    }
    let n_ratio = f64::min(2.6, (n_min as f64 / 8.0).sqrt());
    let l_ratio = f64::min(1.6, n_ratio / 1.3);
    let mut rungs = Vec::with_capacity(3);
    for k in (0..3).rev() {
        let lx: Vec<f64> = (0..dim).map(|ax| window.lx(ax) / l_ratio.powi(k)).collect();
        let nx: Vec<usize> = (0..dim)
            .map(|ax| {
                let raw = window.nx(ax) as f64 / n_ratio.powi(k);
                (((raw / 2.0).round() as usize) * 2).max(8)
            })
            .collect();
        rungs.push(GridSpec::fourier_dual(lx, nx)?);
    }
    TruncationLadder::new(rungs)
}

/// Follows the translated symbol `f(· − X(t))` on the window along the
/// path's ladder.  Convergence means the sup-window defect between
/// consecutive translates stayed below `tol` for the last two steps; the
/// limit spectrum is then estimated from quantizations of the translated
/// symbol over a truncation ladder.  Non-convergence is a reported outcome,
/// not an error.
pub fn localize_symbol(
    f: &SymbolProvider,
    path: &AsymptoticPath,
    window: &GridSpec,
    tol: f64,
) -> Result<LocalizationResult> {
    localize_symbol_with(f, path, window, tol, &LocalizeOptions::default())
}

pub fn localize_symbol_with(
    f: &SymbolProvider,
    path: &AsymptoticPath,
    window: &GridSpec,
    tol: f64,
    opts: &LocalizeOptions,
) -> Result<LocalizationResult> {
    check_tol(tol)?;
    if f.dim() != path.dim() || f.dim() != window.dim() {
        return Err(CalcError::DimensionMismatch(format!(
            "symbol dim {}, path dim {}, window dim {}",
            f.dim(),
            path.dim(),
            window.dim()
        )));
    }
    if f.class() == SymbolClass::UnboundedAffiliationCandidate {
        return Err(CalcError::Precondition(
            "symbol-level localization needs a bounded symbol; follow the resolvent instead"
                .into(),
        ));
    }
    let ladder = path.ladder().to_vec();
    let mut curve: Vec<(f64, f64)> = Vec::with_capacity(ladder.len().saturating_sub(1));
    let mut prev: Option<SampledSymbol> = None;
    for &t in &ladder {
        let g = sample(&f.translate(&path.point_at(t))?, window)?;
        if let Some(p) = &prev {
            curve.push((t, g.sup_distance(p)?));
        }
        prev = Some(g);
    }
    let limit = prev.expect("path ladders are non-empty");
    if !settled(&curve, tol) {
        return Ok(LocalizationResult {
            path_label: path.label().to_string(),
            status: LocalizationStatus::NonConvergent,
            limit_symbol: None,
            spectrum: SpectrumSet::empty(opts.spectral_delta),
            convergence_curve: curve,
        });
    }
    let spectrum = if opts.compute_spectrum {
        let t_last = *ladder.last().expect("non-empty ladder");
        let shifted = f.translate(&path.point_at(t_last))?;
        let rungs = spectral_ladder(opts, window)?;
        estimate_spectrum(
            &|g: &GridSpec| quantize_provider(&shifted, g),
            &rungs,
            opts.spectral_delta,
        )?
    } else {
        SpectrumSet::empty(opts.spectral_delta)
    };
    Ok(LocalizationResult {
        path_label: path.label().to_string(),
        status: LocalizationStatus::Converged,
        limit_symbol: Some(limit),
        spectrum,
        convergence_curve: curve,
    })
}

/// Follows the resolvent `(H_t − z)⁻¹` of the translated truncations
/// against a compact probe.  The probe seminorm of the final resolvent
/// deciding `trivial_resolvent` takes precedence: when the resolvent itself
/// is crushed, the difference defects vanish trivially and say nothing.
pub fn localize_resolvent(
    builder: &dyn TranslatedBuilder,
    path: &AsymptoticPath,
    window: &GridSpec,
    probe: &CompactProbe,
    z: Complex64,
    tol: f64,
) -> Result<LocalizationResult> {
    localize_resolvent_with(builder, path, window, probe, z, tol, &LocalizeOptions::default())
}

pub fn localize_resolvent_with(
    builder: &dyn TranslatedBuilder,
    path: &AsymptoticPath,
    window: &GridSpec,
    probe: &CompactProbe,
    z: Complex64,
    tol: f64,
    opts: &LocalizeOptions,
) -> Result<LocalizationResult> {
    check_tol(tol)?;
    if z.im == 0.0 || !z.is_finite() {
        return Err(CalcError::Precondition(
            "resolvent point must lie off the real axis".into(),
        ));
    }
    if path.dim() != window.dim() {
        return Err(CalcError::DimensionMismatch(format!(
            "path dim {}, window dim {}",
            path.dim(),
            window.dim()
        )));
    }
    if !probe.matrix().grid().same_as(window) {
        return Err(CalcError::GridMismatch(
            "probe grid differs from the observation window".into(),
        ));
    }
    let (u, lam) = probe_factor(probe)?;
    let ladder = path.ladder().to_vec();
    let mut curve: Vec<(f64, f64)> = Vec::with_capacity(ladder.len().saturating_sub(1));
    let mut prev_cols: Option<(Array2<Complex64>, Array2<Complex64>)> = None;
    let mut final_seminorm = f64::INFINITY;
    for &t in &ladder {
        let h = builder.build(&path.point_at(t), window)?;
        if !h.grid().same_as(window) {
            return Err(CalcError::GridMismatch(
                "translated builder returned a different grid than the window".into(),
            ));
        }
        let scale = h
            .data()
            .iter()
            .fold(1.0f64, |m, v| m.max(v.norm()));
        let defect = h.hermitian_defect();
        if defect > HERMITIAN_TOL * scale {
            return Err(CalcError::NotHermitian(defect));
        }
        // Only the probe-range columns of the resolvent are needed:
        // ‖RK‖ = ‖(RU)Λ‖ and ‖KR‖ = ‖(R†U)Λ‖ for K = UΛU† with U isometric.
        let ru = linalg::solve(&shifted_by(h.data(), z), &u)?;
        let rsu = linalg::solve(&shifted_by(h.data(), z.conj()), &u)?;
        if let Some((pru, prsu)) = &prev_cols {
            let d = scaled_cols_norm(&(&ru - pru), &lam) + scaled_cols_norm(&(&rsu - prsu), &lam);
            curve.push((t, d));
        }
        final_seminorm = scaled_cols_norm(&ru, &lam) + scaled_cols_norm(&rsu, &lam);
        prev_cols = Some((ru, rsu));
    }
    let label = path.label().to_string();
    if final_seminorm < tol {
        return Ok(LocalizationResult {
            path_label: label,
            status: LocalizationStatus::TrivialResolvent,
            limit_symbol: None,
            spectrum: SpectrumSet::empty(opts.spectral_delta),
            convergence_curve: curve,
        });
    }
    if !settled(&curve, tol) {
        return Ok(LocalizationResult {
            path_label: label,
            status: LocalizationStatus::NonConvergent,
            limit_symbol: None,
            spectrum: SpectrumSet::empty(opts.spectral_delta),
            convergence_curve: curve,
        });
    }
    let t_last = *ladder.last().expect("non-empty ladder");
    let shift = path.point_at(t_last);
    let limit_symbol = builder.limit_symbol(&shift, window);
    let spectrum = if opts.compute_spectrum {
        let rungs = spectral_ladder(opts, window)?;
        estimate_spectrum(
            &|g: &GridSpec| builder.build(&shift, g),
            &rungs,
            opts.spectral_delta,
        )?
    } else {
        SpectrumSet::empty(opts.spectral_delta)
    };
    Ok(LocalizationResult {
        path_label: label,
        status: LocalizationStatus::Converged,
        limit_symbol,
        spectrum,
        convergence_curve: curve,
    })
}

/// Groups converged localization results whose limit symbols agree on the
/// window within `tol`; the union computation then only needs one spectrum
/// per group.  Indices refer to the input slice; the representative is the
/// first member.
#[derive(Clone, Debug)]
pub struct LimitGroup {
    pub representative: usize,
    pub members: Vec<usize>,
    pub labels: Vec<String>,
}

pub fn dedup_limits(results: &[LocalizationResult], tol: f64) -> Result<Vec<LimitGroup>> {
    check_tol(tol)?;
    for r in results {
        if r.status != LocalizationStatus::Converged || r.limit_symbol.is_none() {
            return Err(CalcError::Precondition(format!(
                "dedup takes converged results with limit symbols; path '{}' has neither",
                r.path_label
            )));
        }
    }
    let mut groups: Vec<LimitGroup> = Vec::new();
    'outer: for (i, r) in results.iter().enumerate() {
        let symbol = r.limit_symbol.as_ref().expect("checked above");
        for g in &mut groups {
            let rep = results[g.representative]
                .limit_symbol
                .as_ref()
                .expect("checked above");
            if symbol.sup_distance(rep)? <= tol {
                g.members.push(i);
                g.labels.push(r.path_label.clone());
                continue 'outer;
            }
        }
        groups.push(LimitGroup {
            representative: i,
            members: vec![i],
            labels: vec![r.path_label.clone()],
        });
    }
    Ok(groups)
}

/// Options for the union assembler.
#[derive(Clone, Debug)]
pub struct AssemblyOptions {
    /// Strict-convergence tolerance for the per-path resolvent limits.
    pub tol: f64,
    /// Sup-window agreement below which two limit symbols are the same.
    pub dedup_tol: f64,
    /// Resolvent point.
    pub z: Complex64,
    /// Rank of the compact probe (lowest Hermite modes in one dimension, a
    /// quantized Gaussian otherwise).
    pub probe_rank: usize,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-2,
            dedup_tol: 1e-3,
            z: Complex64::new(0.0, 1.0),
            probe_rank: DEFAULT_PROBE_RANK,
        }
    }
}

/// The assembled union of path-limit spectra together with the comparison
/// against the direct truncation-ladder estimate.
#[derive(Clone, Debug)]
pub struct EssentialAssembly {
    /// Per-path outcomes, in family order.
    pub results: Vec<LocalizationResult>,
    /// Limit groups over the converged results (indices into `results`).
    pub groups: Vec<LimitGroup>,
    /// Union of the limit spectra, merged at the requested resolution.
    pub union: SpectrumSet,
    /// Direct essential-spectrum estimate for the untranslated operator.
    pub direct: SpectrumSet,
    /// Hausdorff distance between union and direct estimate, capped where
    /// either side is unbounded above.
    pub hausdorff: f64,
    /// Whether the union sits inside the direct estimate (within twice the
    /// resolution) — expected always.
    pub union_within_direct: bool,
    /// Whether union and direct estimate agree within twice the resolution
    /// — expected when the family is complete for the symbol class.
    pub equal_within_tolerance: bool,
    /// Set when some path did not converge, so the union only bounds the
    /// essential spectrum from below.
    pub lower_bound_only: bool,
    /// The family's own account of why it should exhaust the limits.
    pub completeness_note: String,
}

/// Runs every path of the family through the resolvent route on the
/// ladder's finest grid, deduplicates the converged limits, unions one
/// spectrum per group, and compares with the direct estimate on the same
/// ladder.
pub fn assemble_essential(
    builder: &dyn TranslatedBuilder,
    family: &PathFamily,
    ladder: &TruncationLadder,
    delta: f64,
    opts: &AssemblyOptions,
) -> Result<EssentialAssembly> {
    check_tol(delta)?;
    let window = ladder.finest().clone();
    if window.dim() != family.dim() {
        return Err(CalcError::DimensionMismatch(format!(
            "family dim {}, ladder dim {}",
            family.dim(),
            window.dim()
        )));
    }
    let probe = if window.dim() == 1 {
        CompactProbe::hermite(&window, opts.probe_rank)?
    } else {
        gaussian_probe(&window)?
    };
    let lopts = LocalizeOptions {
        spectral_delta: delta,
        spectral_ladder: Some(ladder.clone()),
        compute_spectrum: false,
    };
    // Paths are independent; the union below is an order-independent merge.
    let mut results: Vec<LocalizationResult> = family
        .paths()
        .par_iter()
        .map(|p| localize_resolvent_with(builder, p, &window, &probe, opts.z, opts.tol, &lopts))
        .collect::<Result<Vec<_>>>()?;

    let converged_idx: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, r)| r.is_converged())
        .map(|(i, _)| i)
        .collect();
    // Group the converged limits; when a builder cannot exhibit limit
    // symbols (no symbol behind it), every converged path is its own group.
    let groups: Vec<LimitGroup> = if converged_idx
        .iter()
        .all(|&i| results[i].limit_symbol.is_some())
    {
        let conv: Vec<LocalizationResult> = converged_idx
            .iter()
            .map(|&i| results[i].clone())
            .collect();
        dedup_limits(&conv, opts.dedup_tol)?
            .into_iter()
            .map(|g| LimitGroup {
                representative: converged_idx[g.representative],
                members: g.members.iter().map(|&m| converged_idx[m]).collect(),
                labels: g.labels,
            })
            .collect()
    } else {
        converged_idx
            .iter()
            .map(|&i| LimitGroup {
                representative: i,
                members: vec![i],
                labels: vec![results[i].path_label.clone()],
            })
            .collect()
    };

    // One limit spectrum per group, shared with every member.
    for g in &groups {
        let rep = g.representative;
        let t_last = *family.paths()[rep]
            .ladder()
            .last()
            .expect("non-empty ladder");
        let shift = family.paths()[rep].point_at(t_last);
        let spectrum = estimate_spectrum(
            &|grid: &GridSpec| builder.build(&shift, grid),
            ladder,
            delta,
        )?;
        for &m in &g.members {
            results[m].spectrum = spectrum.clone();
        }
    }

    let mut union = SpectrumSet::empty(delta);
    for g in &groups {
        union = union.union(&results[g.representative].spectrum);
    }
    let lower_bound_only = results
        .iter()
        .any(|r| r.status == LocalizationStatus::NonConvergent);
    if lower_bound_only {
        union.add_flag(FLAG_LOWER_BOUND_ONLY);
    }

    let origin = PhasePoint::zero(window.dim());
    let direct = estimate_essential(
        &|grid: &GridSpec| builder.build(&origin, grid),
        ladder,
        delta,
    )?;

    let cap = union.comparison_cap(&direct);
    let hausdorff = union.hausdorff_distance(&direct, cap);
    let union_within_direct = union.excess_over(&direct, cap) <= 2.0 * delta;
    let equal_within_tolerance = hausdorff <= 2.0 * delta;

    Ok(EssentialAssembly {
        results,
        groups,
        union,
        direct,
        hausdorff,
        union_within_direct,
        equal_within_tolerance,
        lower_bound_only,
        completeness_note: family.completeness_note().to_string(),
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CalcError::Precondition(format!(
            "tolerance must be a positive real, got {tol}"
        )));
    }
    Ok(())
}

/// Convergence means the defect stayed below tolerance for the final two
/// steps of the ladder.
fn settled(curve: &[(f64, f64)], tol: f64) -> bool {
    curve.len() >= 2 && curve[curve.len() - 1].1 < tol && curve[curve.len() - 2].1 < tol
}

fn spectral_ladder(opts: &LocalizeOptions, window: &GridSpec) -> Result<TruncationLadder> {
    match &opts.spectral_ladder {
        Some(l) => Ok(l.clone()),
        None => ladder_for_window(window),
    }
}

/// `A − zI` for the resolvent solves.
fn shifted_by(a: &Array2<Complex64>, z: Complex64) -> Array2<Complex64> {
    let mut out = a.clone();
    for i in 0..out.nrows() {
        out[[i, i]] -= z;
    }
    out
}

/// Spectral factorization `K = U Λ U†` of a compact probe, truncated at the
/// numerical rank: `U` has orthonormal columns, `Λ` the retained (signed)
/// eigenvalues.  Probe seminorms only need these columns.
fn probe_factor(probe: &CompactProbe) -> Result<(Array2<Complex64>, Vec<f64>)> {
    let (vals, vecs) = linalg::eigh(probe.matrix().data(), HERMITIAN_TOL)?;
    let top = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if top == 0.0 {
        return Err(CalcError::Precondition(
            "compact probe is numerically zero".into(),
        ));
    }
    let keep: Vec<usize> = (0..vals.len())
        .filter(|&j| vals[j].abs() > PROBE_RANK_CUT * top)
        .collect();
    let n = vecs.nrows();
    let mut u = Array2::zeros((n, keep.len()));
    let mut lam = Vec::with_capacity(keep.len());
    for (c, &j) in keep.iter().enumerate() {
        for r in 0..n {
            u[[r, c]] = vecs[[r, j]];
        }
        lam.push(vals[j]);
    }
    Ok((u, lam))
}

/// Largest singular value of `cols · diag(lam)`.
fn scaled_cols_norm(cols: &Array2<Complex64>, lam: &[f64]) -> f64 {
    let mut scaled = cols.clone();
    for (c, &l) in lam.iter().enumerate() {
        for r in 0..scaled.nrows() {
            scaled[[r, c]] *= Complex64::new(l, 0.0);
        }
    }
    linalg::singular_values(&scaled)
        .into_iter()
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::ladder_linear;
    use crate::quantize::quantize;
    use crate::spectral::resolvent;
    use crate::symbol::StructureTag;
    use crate::weyl::strict_seminorm;
    use std::sync::Arc;

    fn tanh_symbol() -> SymbolProvider {
        SymbolProvider::new(
            "tanh(x)",
            1,
            SymbolClass::SmoothBoundedDerivatives,
            Arc::new(|x: &[f64], _xi: &[f64]| Complex64::new(x[0].tanh(), 0.0)),
        )
        .with_structure(StructureTag::Multiplication)
    }

    fn sin_symbol() -> SymbolProvider {
        SymbolProvider::new(
            "sin(x)",
            1,
            SymbolClass::SmoothBoundedDerivatives,
            Arc::new(|x: &[f64], _xi: &[f64]| Complex64::new(x[0].sin(), 0.0)),
        )
        .with_structure(StructureTag::Multiplication)
    }

    fn gaussian_symbol() -> SymbolProvider {
        SymbolProvider::new(
            "exp(-x^2-xi^2)",
            1,
            SymbolClass::VanishingAtInfinity,
            Arc::new(|x: &[f64], xi: &[f64]| {
                Complex64::new((-x[0] * x[0] - xi[0] * xi[0]).exp(), 0.0)
            }),
        )
    }

    fn oscillator_symbol() -> SymbolProvider {
        SymbolProvider::new(
            "x^2+xi^2",
            1,
            SymbolClass::UnboundedAffiliationCandidate,
            Arc::new(|x: &[f64], xi: &[f64]| {
                Complex64::new(x[0] * x[0] + xi[0] * xi[0], 0.0)
            }),
        )
    }

    fn kinetic_plus_tanh() -> SymbolProvider {
        SymbolProvider::new(
            "xi^2+tanh(x)",
            1,
            SymbolClass::UnboundedAffiliationCandidate,
            Arc::new(|x: &[f64], xi: &[f64]| {
                Complex64::new(xi[0] * xi[0] + x[0].tanh(), 0.0)
            }),
        )
    }

    fn ray_x_plus(ladder: Vec<f64>) -> AsymptoticPath {
        AsymptoticPath::ray("x+", &PhasePoint::d1(1.0, 0.0), ladder).unwrap()
    }

    fn ray_x_minus(ladder: Vec<f64>) -> AsymptoticPath {
        AsymptoticPath::ray("x-", &PhasePoint::d1(-1.0, 0.0), ladder).unwrap()
    }

    #[test]
    fn constant_symbol_localizes_to_itself() {
        let f = SymbolProvider::constant(1, 2.5);
        let window = GridSpec::fourier_dual_d1(8.0, 32).unwrap();
        let path = ray_x_plus(ladder_linear(1.0, 1.0, 4));
        let r = localize_symbol(&f, &path, &window, 1e-10).unwrap();
        assert_eq!(r.status, LocalizationStatus::Converged);
        for &(_, d) in &r.convergence_curve {
            assert!(d < 1e-12);
        }
        let limit = r.limit_symbol.unwrap();
        assert!(limit
            .values()
            .iter()
            .all(|v| (v - Complex64::new(2.5, 0.0)).norm() < 1e-12));
        assert!(r.spectrum.covers(2.5, 1e-6));
    }

    #[test]
    fn plateau_symbol_localizes_to_the_plateau_value() {
        let f = tanh_symbol();
        let window = GridSpec::fourier_dual_d1(8.0, 64).unwrap();
        let plus = localize_symbol(&f, &ray_x_plus(ladder_linear(8.0, 4.0, 4)), &window, 1e-2)
            .unwrap();
        assert_eq!(plus.status, LocalizationStatus::Converged);
        let limit = plus.limit_symbol.as_ref().unwrap();
        let worst = limit
            .values()
            .iter()
            .map(|v| (v - Complex64::new(-1.0, 0.0)).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-4, "plateau defect {worst}");
        assert!(plus.spectrum.covers(-1.0, 0.05));
        assert!(!plus.spectrum.covers(1.0, 0.5));

        let minus =
            localize_symbol(&f, &ray_x_minus(ladder_linear(8.0, 4.0, 4)), &window, 1e-2)
                .unwrap();
        assert_eq!(minus.status, LocalizationStatus::Converged);
        assert!(minus.spectrum.covers(1.0, 0.05));
    }

    #[test]
    fn periodic_symbol_convergence_depends_on_the_ladder() {
        let f = sin_symbol();
        let window = GridSpec::fourier_dual_d1(12.8, 128).unwrap();
        let integer_ladder = ray_x_plus(ladder_linear(1.0, 1.0, 6));
        let coarse = localize_symbol(&f, &integer_ladder, &window, 1e-2).unwrap();
        assert_eq!(coarse.status, LocalizationStatus::NonConvergent);
        assert!(coarse.limit_symbol.is_none());
        assert!(coarse.spectrum.is_empty());
        // Every step moves the symbol by a fixed sup distance 2·sin(1/2),
        // up to the grid's sampling of the supremum.
        let expected = 2.0 * (0.5f64).sin();
        for &(_, d) in &coarse.convergence_curve {
            assert!((d - expected).abs() < 1e-2, "defect {d} vs {expected}");
        }

        let two_pi = std::f64::consts::TAU;
        let refined_ladder =
            ray_x_plus((1..=4).map(|k| two_pi * k as f64).collect::<Vec<_>>());
        let fine = localize_symbol(&f, &refined_ladder, &window, 1e-8).unwrap();
        assert_eq!(fine.status, LocalizationStatus::Converged);
        let limit = fine.limit_symbol.as_ref().unwrap();
        let original = sample(&f, &window).unwrap();
        assert!(limit.sup_distance(&original).unwrap() < 1e-9);
        assert!(fine.spectrum.covers(0.0, 0.05));
        assert!(fine.spectrum.covers(1.0, 0.05));
        assert!(fine.spectrum.covers(-1.0, 0.05));
    }

    #[test]
    fn symbol_route_rejects_unbounded_symbols() {
        let f = oscillator_symbol();
        let window = GridSpec::fourier_dual_d1(8.0, 32).unwrap();
        let path = ray_x_plus(ladder_linear(1.0, 1.0, 4));
        let err = localize_symbol(&f, &path, &window, 1e-2).unwrap_err();
        assert!(matches!(err, CalcError::Precondition(_)));
    }

    #[test]
    fn escaping_well_gives_trivial_resolvent() {
        let f = oscillator_symbol();
        let builder = SymbolTranslated(&f);
        let window = GridSpec::fourier_dual_d1(10.0, 96).unwrap();
        let probe = CompactProbe::hermite(&window, 4).unwrap();
        let path = ray_x_plus(ladder_linear(6.0, 4.0, 5));
        let r = localize_resolvent(&builder, &path, &window, &probe, Complex64::i(), 1e-2)
            .unwrap();
        assert_eq!(r.status, LocalizationStatus::TrivialResolvent);
        assert!(r.spectrum.is_empty());
        assert!(r.limit_symbol.is_none());
    }

    #[test]
    fn shifted_free_operator_emerges_along_the_configuration_axis() {
        let f = kinetic_plus_tanh();
        let builder = SymbolTranslated(&f);
        let window = GridSpec::fourier_dual_d1(12.8, 256).unwrap();
        let probe = CompactProbe::hermite(&window, 4).unwrap();
        // The box spans [−12.8, 12.8), so the wall must travel past the far
        // edge before the translates settle.
        let path = ray_x_plus(ladder_linear(16.0, 4.0, 4));
        let opts = LocalizeOptions {
            spectral_delta: 0.1,
            ..LocalizeOptions::default()
        };
        let r = localize_resolvent_with(
            &builder,
            &path,
            &window,
            &probe,
            Complex64::i(),
            1e-2,
            &opts,
        )
        .unwrap();
        assert_eq!(r.status, LocalizationStatus::Converged);
        // The limit operator is the free kinetic part shifted down by one.
        let bottom = r.spectrum.support_min().unwrap();
        assert!((bottom + 1.0).abs() < 0.1, "band bottom {bottom}");
        assert!(r.spectrum.covers(0.0, 0.1));
        assert!(r.spectrum.covers(5.0, 0.1));
        assert!(!r.spectrum.covers(-1.5, 0.2));
        assert!(r.spectrum.has_flag(crate::spectral::FLAG_UNBOUNDED_ABOVE));
        // The limit symbol is the translated symbol at the final time.
        let limit = r.limit_symbol.as_ref().unwrap();
        let expected = sample(&f.translate(&PhasePoint::d1(28.0, 0.0)).unwrap(), &window).unwrap();
        assert!(limit.sup_distance(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn compact_operator_resolvent_converges_to_the_zero_operator() {
        let f = gaussian_symbol();
        let builder = SymbolTranslated(&f);
        let window = GridSpec::fourier_dual_d1(12.8, 128).unwrap();
        let probe = CompactProbe::hermite(&window, 4).unwrap();
        let path = ray_x_plus(ladder_linear(4.0, 4.0, 4));
        let r = localize_resolvent(&builder, &path, &window, &probe, Complex64::i(), 1e-2)
            .unwrap();
        assert_eq!(r.status, LocalizationStatus::Converged);
        assert!(!r.spectrum.is_empty());
        assert!(r.spectrum.covers(0.0, 1e-3));
        let top = r.spectrum.support_max().unwrap();
        let bottom = r.spectrum.support_min().unwrap();
        assert!(top.abs() < 1e-3 && bottom.abs() < 1e-3);
    }

    #[test]
    fn momentum_path_on_an_unbounded_symbol_is_trivial() {
        let f = kinetic_plus_tanh();
        let builder = SymbolTranslated(&f);
        let window = GridSpec::fourier_dual_d1(12.8, 128).unwrap();
        let probe = CompactProbe::hermite(&window, 4).unwrap();
        let path =
            AsymptoticPath::ray("xi+", &PhasePoint::d1(0.0, 1.0), ladder_linear(40.0, 30.0, 4))
                .unwrap();
        let r = localize_resolvent(&builder, &path, &window, &probe, Complex64::i(), 1e-2)
            .unwrap();
        assert_eq!(r.status, LocalizationStatus::TrivialResolvent);
        assert!(r.spectrum.is_empty());
    }

    #[test]
    fn probe_column_route_matches_the_full_strict_seminorm() {
        let window = GridSpec::fourier_dual_d1(8.0, 48).unwrap();
        let probe = CompactProbe::hermite(&window, 3).unwrap();
        let h = quantize_provider(&tanh_symbol(), &window).unwrap();
        let z = Complex64::i();
        let r = resolvent(&h, z).unwrap();
        let full = strict_seminorm(&r, &probe).unwrap();
        let (u, lam) = probe_factor(&probe).unwrap();
        let ru = linalg::solve(&shifted_by(h.data(), z), &u).unwrap();
        let rsu = linalg::solve(&shifted_by(h.data(), z.conj()), &u).unwrap();
        let via_columns = scaled_cols_norm(&ru, &lam) + scaled_cols_norm(&rsu, &lam);
        assert!(
            (full - via_columns).abs() < 1e-8,
            "full {full} vs columns {via_columns}"
        );
    }

    #[test]
    fn covariance_between_symbol_and_resolvent_routes() {
        let f = tanh_symbol();
        let window = GridSpec::fourier_dual_d1(8.0, 64).unwrap();
        let path = ray_x_plus(ladder_linear(8.0, 4.0, 4));
        let r = localize_symbol(&f, &path, &window, 1e-2).unwrap();
        let from_symbol = quantize(r.limit_symbol.as_ref().unwrap()).unwrap();
        let builder = SymbolTranslated(&f);
        let t_last = *path.ladder().last().unwrap();
        let from_operator = builder.build(&path.point_at(t_last), &window).unwrap();
        let diff = from_symbol.sub(&from_operator).unwrap().op_norm();
        assert!(diff < 1e-6, "route disagreement {diff}");
    }

    #[test]
    fn dedup_groups_parallel_translates_and_splits_opposite_directions() {
        let f = tanh_symbol();
        let window = GridSpec::fourier_dual_d1(8.0, 64).unwrap();
        let ladder = ladder_linear(8.0, 4.0, 4);
        let shifted_ray = AsymptoticPath::new("x+offset", 1, ladder.clone(), |t: f64| {
            PhasePoint::d1(t + 5.0, 0.0)
        })
        .unwrap();
        let opts = LocalizeOptions {
            compute_spectrum: false,
            ..LocalizeOptions::default()
        };
        let results = vec![
            localize_symbol_with(&f, &ray_x_plus(ladder.clone()), &window, 1e-2, &opts).unwrap(),
            localize_symbol_with(&f, &shifted_ray, &window, 1e-2, &opts).unwrap(),
            localize_symbol_with(&f, &ray_x_minus(ladder), &window, 1e-2, &opts).unwrap(),
        ];
        let groups = dedup_limits(&results, 1e-3).unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].members, vec![0, 1]);
        assert_eq!(groups[1].members, vec![2]);
    }

    #[test]
    fn dedup_merges_every_direction_for_a_radial_symbol() {
        let f = gaussian_symbol();
        let window = GridSpec::fourier_dual_d1(8.0, 48).unwrap();
        // The window spans [−8, 8) with momentum extent ±π/hx ≈ ±9.4, so the
        // ladder must diverge well past both before the tails vanish.
        let family =
            PathFamily::axes_and_diagonals(1, ladder_linear(15.0, 10.0, 4)).unwrap();
        let opts = LocalizeOptions {
            compute_spectrum: false,
            ..LocalizeOptions::default()
        };
        let results: Vec<LocalizationResult> = family
            .paths()
            .iter()
            .map(|p| localize_symbol_with(&f, p, &window, 1e-2, &opts).unwrap())
            .collect();
        assert_eq!(results.len(), 8);
        let groups = dedup_limits(&results, 1e-3).unwrap();
        assert_eq!(groups.len(), 1, "all tails vanish identically");
    }

    #[test]
    fn dedup_requires_converged_inputs() {
        let f = sin_symbol();
        let window = GridSpec::fourier_dual_d1(8.0, 32).unwrap();
        let path = ray_x_plus(ladder_linear(1.0, 1.0, 5));
        let bad = localize_symbol(&f, &path, &window, 1e-3).unwrap();
        assert_eq!(bad.status, LocalizationStatus::NonConvergent);
        let err = dedup_limits(&[bad], 1e-3).unwrap_err();
        assert!(matches!(err, CalcError::Precondition(_)));
    }

    #[test]
    fn union_for_the_two_limit_schrodinger_symbol() {
        let f = kinetic_plus_tanh();
        let builder = SymbolTranslated(&f);
        let window = GridSpec::fourier_dual_d1(12.8, 256).unwrap();
        let ladder = ladder_for_window(&window).unwrap();
        let family =
            PathFamily::axes_and_diagonals(1, ladder_linear(20.0, 30.0, 5)).unwrap();
        let assembly =
            assemble_essential(&builder, &family, &ladder, 0.1, &AssemblyOptions::default())
                .unwrap();

        let converged: Vec<&str> = assembly
            .results
            .iter()
            .filter(|r| r.is_converged())
            .map(|r| r.path_label.as_str())
            .collect();
        assert_eq!(converged, vec!["x+", "x-"], "only the configuration axis survives");
        let trivial = assembly
            .results
            .iter()
            .filter(|r| r.status == LocalizationStatus::TrivialResolvent)
            .count();
        assert_eq!(trivial, 6, "momentum and diagonal paths escape");
        assert!(!assembly.lower_bound_only);

        let bottom = assembly.union.support_min().unwrap();
        assert!((bottom + 1.0).abs() < 0.1, "union bottom {bottom}");
        assert!(assembly.union.covers(0.0, 0.1));
        assert!(assembly.union.covers(3.0, 0.1));
        assert!(assembly.union.has_flag(crate::spectral::FLAG_UNBOUNDED_ABOVE));
        assert!(assembly.union_within_direct);
        assert!(assembly.hausdorff < 0.15, "hausdorff {}", assembly.hausdorff);
    }

    #[test]
    fn adding_a_path_never_shrinks_the_union() {
        let f = tanh_symbol();
        let builder = SymbolTranslated(&f);
        let window = GridSpec::fourier_dual_d1(8.0, 64).unwrap();
        let ladder = ladder_for_window(&window).unwrap();
        let steps = ladder_linear(8.0, 4.0, 4);
        let one = PathFamily::new(
            vec![ray_x_plus(steps.clone())],
            "single direction, incomplete by construction",
        )
        .unwrap();
        let both = PathFamily::new(
            vec![ray_x_plus(steps.clone()), ray_x_minus(steps)],
            "both plateau directions",
        )
        .unwrap();
        let opts = AssemblyOptions::default();
        let small = assemble_essential(&builder, &one, &ladder, 0.05, &opts).unwrap();
        let large = assemble_essential(&builder, &both, &ladder, 0.05, &opts).unwrap();
        // Monotone: the one-path union sits inside the two-path union.
        assert!(small.union.excess_over(&large.union, None) <= 1e-9);
        assert!(large.union.excess_over(&small.union, None) > 1.0);
        assert!(small.union.covers(-1.0, 0.05));
        assert!(!small.union.covers(1.0, 0.05));
        assert!(large.union.covers(1.0, 0.05));
        // Both unions stay inside the direct band estimate; one direction
        // alone cannot reproduce it.
        assert!(small.union_within_direct);
        assert!(large.union_within_direct);
        assert!(!small.equal_within_tolerance);
    }

    #[test]
    fn window_ladder_refines_toward_the_window() {
        let window = GridSpec::fourier_dual_d1(12.8, 256).unwrap();
        let ladder = ladder_for_window(&window).unwrap();
        assert_eq!(ladder.rungs().len(), 3);
        assert!(ladder.finest().same_as(&window));
        for rung in ladder.rungs() {
            assert!(rung.is_fourier_dual());
        }
    }
}
