use crate::error::{CalcError, Result};
use crate::fourier::{self, AxisGeom};
use crate::grid::GridSpec;
use crate::phase::PhasePoint;
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Declared regularity/decay class of a symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolClass {
    SmoothBoundedDerivatives,
    BoundedUniformlyContinuous,
    VanishingAtInfinity,
    UnboundedAffiliationCandidate,
}

/// Declared operator structure of a symbol: a function of position only
/// (multiplication operator b(Q)), of momentum only (Fourier multiplier
/// a(P)), or a genuine phase-space symbol for the midpoint calculus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureTag {
    Multiplication,
    FourierMultiplier,
    Weyl,
}

pub type EvalFn = Arc<dyn Fn(&[f64], &[f64]) -> Complex64 + Send + Sync>;
/// First-order partial with respect to phase coordinate k, where coordinates
/// are ordered (x_1..x_n, ξ_1..ξ_n).
pub type PartialFn = Arc<dyn Fn(&[f64], &[f64], usize) -> Complex64 + Send + Sync>;

/// A symbol f: Ξ → C presented as point evaluators.
///
/// Providers carry a declared class (taken on trust, exercised by the
/// checks that consume them) and optionally exact first-order partials; the
/// seminorm and modulus routines fall back to central differences when the
/// latter are missing and record that they did.
#[derive(Clone)]
pub struct SymbolProvider {
    name: String,
    dim: usize,
    class: SymbolClass,
    structure: Option<StructureTag>,
    eval: EvalFn,
    partial: Option<PartialFn>,
}

impl std::fmt::Debug for SymbolProvider {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymbolProvider")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("class", &self.class)
            .field("structure", &self.structure)
            .field("analytic_partials", &self.partial.is_some())
            .finish()
    }
}

impl SymbolProvider {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        class: SymbolClass,
        eval: EvalFn,
    ) -> Self {
        Self {
            name: name.into(),
            dim,
            class,
            structure: None,
            eval,
            partial: None,
        }
    }

    pub fn with_partials(mut self, partial: PartialFn) -> Self {
        self.partial = Some(partial);
        self
    }

    pub fn with_structure(mut self, tag: StructureTag) -> Self {
        self.structure = Some(tag);
        self
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        let v = Complex64::new(value, 0.0);
        Self::new(
            format!("const({value})"),
            dim,
            SymbolClass::SmoothBoundedDerivatives,
            Arc::new(move |_, _| v),
        )
        .with_partials(Arc::new(|_, _, _| Complex64::new(0.0, 0.0)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class(&self) -> SymbolClass {
        self.class
    }

    pub fn structure(&self) -> Option<StructureTag> {
        self.structure
    }

    pub fn has_partials(&self) -> bool {
        self.partial.is_some()
    }

    /// Evaluate at raw coordinate slices (no allocation).
    pub fn eval_xp(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        (self.eval)(x, xi)
    }

    pub fn eval(&self, p: &PhasePoint) -> Result<Complex64> {
        if p.dim() != self.dim {
            return Err(CalcError::DimensionMismatch(format!(
                "symbol '{}' has dimension {}, point has {}",
                self.name,
                self.dim,
                p.dim()
            )));
        }
        Ok(self.eval_xp(&p.x, &p.xi))
    }

    /// Exact first-order partial along phase coordinate k, if provided.
    pub fn partial_xp(&self, x: &[f64], xi: &[f64], k: usize) -> Option<Complex64> {
        self.partial.as_ref().map(|p| p(x, xi, k))
    }

    /// The translated symbol (𝒯_X f)(Z) = f(Z − X); exact, no resampling.
    pub fn translate(&self, shift: &PhasePoint) -> Result<SymbolProvider> {
        if shift.dim() != self.dim {
            return Err(CalcError::DimensionMismatch(format!(
                "translating {}-dim symbol by {}-dim point",
                self.dim,
                shift.dim()
            )));
        }
        let n = self.dim;
        let sx = shift.x.clone();
        let sxi = shift.xi.clone();
        let eval = self.eval.clone();
        let shifted_eval: EvalFn = Arc::new(move |x: &[f64], xi: &[f64]| {
            let mut bx = [0.0f64; 4];
            let mut bxi = [0.0f64; 4];
            debug_assert!(n <= 4);
            for i in 0..n {
                bx[i] = x[i] - sx[i];
                bxi[i] = xi[i] - sxi[i];
            }
            eval(&bx[..n], &bxi[..n])
        });
        let shifted_partial = self.partial.as_ref().map(|p| {
            let p = p.clone();
            let sx = shift.x.clone();
            let sxi = shift.xi.clone();
            let f: PartialFn = Arc::new(move |x: &[f64], xi: &[f64], k: usize| {
                let mut bx = [0.0f64; 4];
                let mut bxi = [0.0f64; 4];
                for i in 0..n {
                    bx[i] = x[i] - sx[i];
                    bxi[i] = xi[i] - sxi[i];
                }
                p(&bx[..n], &bxi[..n], k)
            });
            f
        });
        let mut out = SymbolProvider {
            name: format!("{}<-shift", self.name),
            dim: self.dim,
            class: self.class,
            structure: self.structure,
            eval: shifted_eval,
            partial: None,
        };
        out.partial = shifted_partial;
        Ok(out)
    }

    /// The swapped symbol f°(x, ξ) = f(ξ, x), using the Euclidean
    /// identification of the two factors; exchanges the multiplication and
    /// Fourier-multiplier structure tags.
    pub fn swap(&self) -> SymbolProvider {
        let n = self.dim;
        let eval = self.eval.clone();
        let swapped_eval: EvalFn = Arc::new(move |x: &[f64], xi: &[f64]| eval(xi, x));
        let swapped_partial = self.partial.as_ref().map(|p| {
            let p = p.clone();
            let f: PartialFn = Arc::new(move |x: &[f64], xi: &[f64], k: usize| {
                let k2 = if k < n { k + n } else { k - n };
                p(xi, x, k2)
            });
            f
        });
        let structure = self.structure.map(|s| match s {
            StructureTag::Multiplication => StructureTag::FourierMultiplier,
            StructureTag::FourierMultiplier => StructureTag::Multiplication,
            StructureTag::Weyl => StructureTag::Weyl,
        });
        SymbolProvider {
            name: format!("{}-swapped", self.name),
            dim: self.dim,
            class: self.class,
            structure,
            eval: swapped_eval,
            partial: swapped_partial,
        }
    }
}

/// A symbol sampled on a phase-space grid, stored as a
/// (configuration × momentum) matrix of values in row-major multi-index
/// order.
#[derive(Debug, Clone)]
pub struct SampledSymbol {
    grid: GridSpec,
    values: Array2<Complex64>,
}

impl SampledSymbol {
    pub fn new(grid: GridSpec, values: Array2<Complex64>) -> Result<Self> {
        if values.nrows() != grid.config_len() || values.ncols() != grid.momentum_len() {
            return Err(CalcError::DimensionMismatch(format!(
                "sampled values {}×{} do not match grid {}×{}",
                values.nrows(),
                values.ncols(),
                grid.config_len(),
                grid.momentum_len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(CalcError::NonFinite("sampled symbol value".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<Complex64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// sup |self − other| over the common grid.
    pub fn sup_distance(&self, other: &SampledSymbol) -> Result<f64> {
        if !self.grid.same_as(&other.grid) {
            return Err(CalcError::GridMismatch(
                "sup distance needs identical grids".into(),
            ));
        }
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest imaginary part in magnitude; a real symbol has ~0 here.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }
}

/// Evaluate a provider on every grid point.
pub fn sample(provider: &SymbolProvider, grid: &GridSpec) -> Result<SampledSymbol> {
    if provider.dim() != grid.dim() {
        return Err(CalcError::DimensionMismatch(format!(
            "symbol '{}' has dimension {}, grid has {}",
            provider.name(),
            provider.dim(),
            grid.dim()
        )));
    }
    let rows = grid.config_len();
    let cols = grid.momentum_len();
    let data: Vec<Complex64> = (0..rows)
        .into_par_iter()
        .flat_map_iter(|r| {
            let x = grid.config_point(r);
            (0..cols).map(move |c| {
                let xi = grid.momentum_point(c);
                provider.eval_xp(&x, &xi)
            })
        })
        .collect();
    let values = Array2::from_shape_vec((rows, cols), data)
        .expect("shape matches by construction");
    SampledSymbol::new(grid.clone(), values)
}

/// Interpolation rule used when translating sampled data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpMethod {
    /// Band-limited (trigonometric) interpolation on the periodic box.
    Trig,
    /// Snap the shift to the nearest lattice vector.
    NearestNode,
}

/// Result of translating a sampled symbol, carrying how it was produced.
#[derive(Debug, Clone)]
pub struct Translated {
    pub symbol: SampledSymbol,
    /// True when the requested shift lay on the sampling lattice, making the
    /// translation an exact reindexing.
    pub commensurate: bool,
    pub method: InterpMethod,
    /// Lattice vector actually applied when snapping.
    pub snapped_shift: Option<PhasePoint>,
}

/// Translate sampled data by X on its own periodic box: samples of
/// f(· − X).
///
/// The window must be the sampling grid itself; asking for a different box
/// would require extrapolating beyond the reliable data and is rejected.
pub fn translate_symbol(
    f: &SampledSymbol,
    shift: &PhasePoint,
    window: &GridSpec,
    method: InterpMethod,
) -> Result<Translated> {
    let grid = f.grid();
    if shift.dim() != grid.dim() {
        return Err(CalcError::DimensionMismatch(format!(
            "shift dimension {} vs grid dimension {}",
            shift.dim(),
            grid.dim()
        )));
    }
    if !window.same_as(grid) {
        return Err(CalcError::Extrapolation(
            "translation window must coincide with the sampling grid; sampled data \
             cannot be resampled onto a different box"
                .into(),
        ));
    }
    let n = grid.dim();
    let commensurate = (0..n).all(|i| {
        let rx = shift.x[i] / grid.hx(i);
        let rxi = shift.xi[i] / grid.hxi(i);
        (rx - rx.round()).abs() < 1e-9 && (rxi - rxi.round()).abs() < 1e-9
    });

    let (applied, snapped) = match method {
        InterpMethod::Trig => (shift.clone(), None),
        InterpMethod::NearestNode => {
            let sx: Vec<f64> = (0..n)
                .map(|i| (shift.x[i] / grid.hx(i)).round() * grid.hx(i))
                .collect();
            let sxi: Vec<f64> = (0..n)
                .map(|i| (shift.xi[i] / grid.hxi(i)).round() * grid.hxi(i))
                .collect();
            let p = PhasePoint::new(sx, sxi)?;
            (p.clone(), Some(p))
        }
    };

    // Shift axis by axis: configuration axes by x_i, momentum axes by ξ_i.
    let nx_sizes: Vec<usize> = (0..n).map(|i| grid.nx(i)).collect();
    let nxi_sizes: Vec<usize> = (0..n).map(|i| grid.nxi(i)).collect();
    let mut values = f.values().clone();
    for ax in 0..n {
        if applied.x[ax] != 0.0 {
            let geom = AxisGeom::space(grid.nx(ax), -grid.lx(ax), grid.hx(ax));
            let a = applied.x[ax];
            values = fourier::map_config_lines(&values, &nx_sizes, ax, grid.nx(ax), |line| {
                fourier::shift(&geom, line, a)
            });
        }
        if applied.xi[ax] != 0.0 {
            let geom = AxisGeom::space(grid.nxi(ax), -grid.lxi(ax), grid.hxi(ax));
            let a = applied.xi[ax];
            values = fourier::map_momentum_lines(&values, &nxi_sizes, ax, grid.nxi(ax), |line| {
                fourier::shift(&geom, line, a)
            });
        }
    }
    Ok(Translated {
        symbol: SampledSymbol::new(grid.clone(), values)?,
        commensurate,
        method,
        snapped_shift: snapped,
    })
}

/// How derivatives were obtained for a seminorm evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DerivativeSource {
    /// All requested orders used exact partial evaluators.
    Analytic,
    /// Orders above the analytic ones used central differences at the given
    /// steps (one per phase coordinate).
    CentralDifference { steps: Vec<f64> },
}

/// Value and provenance of a symbol seminorm ‖f‖^{(j)}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeminormReport {
    pub order: usize,
    pub value: f64,
    pub derivative_source: DerivativeSource,
    /// sup |∂^α f| per multi-index, in the enumeration order used.
    pub contributions: Vec<(Vec<usize>, f64)>,
}

/// ‖f‖^{(j)} = Σ_{|α| ≤ j} (1/|α|!) sup |∂^α f|, with the sup taken over the
/// given grid.
///
/// First-order factors of each mixed derivative use the provider's exact
/// partials when present; remaining orders use nested central differences at
/// the grid spacing, and the report says so.
pub fn symbol_seminorm(
    provider: &SymbolProvider,
    order: usize,
    grid: &GridSpec,
) -> Result<SeminormReport> {
    if provider.dim() != grid.dim() {
        return Err(CalcError::DimensionMismatch(format!(
            "symbol dimension {} vs grid dimension {}",
            provider.dim(),
            grid.dim()
        )));
    }
    let n = grid.dim();
    let ncoords = 2 * n;
    let steps: Vec<f64> = (0..n)
        .map(|i| grid.hx(i))
        .chain((0..n).map(|i| grid.hxi(i)))
        .collect();

    let mut multis: Vec<Vec<usize>> = Vec::new();
    enumerate_multi_indices(ncoords, order, &mut vec![0; ncoords], 0, &mut multis);

    let rows = grid.config_len();
    let cols = grid.momentum_len();
    let mut contributions = Vec::with_capacity(multis.len());
    let mut used_fd = false;
    let mut value = 0.0;
    for alpha in &multis {
        let total: usize = alpha.iter().sum();
        // Pure first order with analytic partials is the only fully exact
        // case; everything else applies differences somewhere.
        if total >= 2 || (total == 1 && !provider.has_partials()) {
            used_fd = true;
        }
        let sup = (0..rows)
            .into_par_iter()
            .map(|r| {
                let x = grid.config_point(r);
                let mut best = 0.0f64;
                for c in 0..cols {
                    let xi = grid.momentum_point(c);
                    let d = derivative_at(provider, &x, &xi, alpha, &steps);
                    let m = d.norm();
                    if m > best {
                        best = m;
                    }
                }
                best
            })
            .reduce(|| 0.0, f64::max);
        if !sup.is_finite() {
            return Err(CalcError::NonFinite(format!(
                "derivative sup for multi-index {alpha:?}"
            )));
        }
        let weight = 1.0 / factorial(total);
        value += weight * sup;
        contributions.push((alpha.clone(), sup));
    }

    Ok(SeminormReport {
        order,
        value,
        derivative_source: if used_fd {
            DerivativeSource::CentralDifference { steps }
        } else {
            DerivativeSource::Analytic
        },
        contributions,
    })
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product::<f64>().max(1.0)
}

fn enumerate_multi_indices(
    ncoords: usize,
    budget: usize,
    current: &mut Vec<usize>,
    coord: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if coord == ncoords {
        out.push(current.clone());
        return;
    }
    let used: usize = current[..coord].iter().sum();
    for v in 0..=(budget - used) {
        current[coord] = v;
        enumerate_multi_indices(ncoords, budget, current, coord + 1, out);
    }
    current[coord] = 0;
}

/// ∂^α f at a point: peel one order at a time, bottoming out on the analytic
/// partial when the remaining index is pure first order.
pub fn derivative_at(
    provider: &SymbolProvider,
    x: &[f64],
    xi: &[f64],
    alpha: &[usize],
    steps: &[f64],
) -> Complex64 {
    let total: usize = alpha.iter().sum();
    if total == 0 {
        return provider.eval_xp(x, xi);
    }
    let k = alpha.iter().position(|&a| a > 0).expect("total > 0");
    if total == 1 {
        if let Some(v) = provider.partial_xp(x, xi, k) {
            return v;
        }
    }
    // Central difference in coordinate k of the (α − e_k)-derivative.
    let mut rest = alpha.to_vec();
    rest[k] -= 1;
    let n = x.len();
    let h = steps[k];
    let mut xp = x.to_vec();
    let mut xip = xi.to_vec();
    let (plus, minus) = if k < n {
        xp[k] = x[k] + h;
        let p = derivative_at(provider, &xp, xi, &rest, steps);
        xp[k] = x[k] - h;
        let m = derivative_at(provider, &xp, xi, &rest, steps);
        (p, m)
    } else {
        let kk = k - n;
        xip[kk] = xi[kk] + h;
        let p = derivative_at(provider, x, &xip, &rest, steps);
        xip[kk] = xi[kk] - h;
        let m = derivative_at(provider, x, &xip, &rest, steps);
        (p, m)
    };
    (plus - minus) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use std::f64::consts::E;

    fn sin_x_provider() -> SymbolProvider {
        SymbolProvider::new(
            "sin(x)",
            1,
            SymbolClass::SmoothBoundedDerivatives,
            Arc::new(|x: &[f64], _: &[f64]| Complex64::new(x[0].sin(), 0.0)),
        )
        .with_partials(Arc::new(|x: &[f64], _: &[f64], k: usize| {
            if k == 0 {
                Complex64::new(x[0].cos(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    fn gaussian_provider() -> SymbolProvider {
        SymbolProvider::new(
            "exp(-x^2-xi^2)",
            1,
            SymbolClass::VanishingAtInfinity,
            Arc::new(|x: &[f64], xi: &[f64]| {
                Complex64::new((-x[0] * x[0] - xi[0] * xi[0]).exp(), 0.0)
            }),
        )
        .with_partials(Arc::new(|x: &[f64], xi: &[f64], k: usize| {
            let f = (-x[0] * x[0] - xi[0] * xi[0]).exp();
            let z = if k == 0 { x[0] } else { xi[0] };
            Complex64::new(-2.0 * z * f, 0.0)
        }))
    }

    #[test]
    fn seminorm_of_constant_is_its_modulus() {
        let grid = GridSpec::d1(5.0, 32, 5.0, 32).unwrap();
        let c = SymbolProvider::constant(1, -2.5);
        for j in 0..3 {
            let rep = symbol_seminorm(&c, j, &grid).unwrap();
            assert!(
                (rep.value - 2.5).abs() < 1e-12,
                "order {j}: {}",
                rep.value
            );
        }
    }

    #[test]
    fn seminorm_of_sin_first_order_is_two() {
        let grid = GridSpec::d1(10.0, 512, 5.0, 8).unwrap();
        let rep = symbol_seminorm(&sin_x_provider(), 1, &grid).unwrap();
        assert!((rep.value - 2.0).abs() < 2e-3, "{}", rep.value);
        assert_eq!(rep.derivative_source, DerivativeSource::Analytic);
    }

    #[test]
    fn seminorm_of_gaussian_first_order() {
        // sup|f| + sup|∂_x f| + sup|∂_ξ f| = 1 + 2·max|2z e^{−z²}| = 1 + 2√(2/e).
        let grid = GridSpec::d1(6.0, 384, 6.0, 384).unwrap();
        let rep = symbol_seminorm(&gaussian_provider(), 1, &grid).unwrap();
        let expected = 1.0 + 2.0 * (2.0 / E).sqrt();
        assert!((rep.value - expected).abs() < 2e-3, "{}", rep.value);
    }

    #[test]
    fn seminorm_monotone_in_order() {
        let grid = GridSpec::d1(6.0, 96, 6.0, 96).unwrap();
        let p = gaussian_provider();
        let mut prev = 0.0;
        for j in 0..4 {
            let rep = symbol_seminorm(&p, j, &grid).unwrap();
            assert!(rep.value >= prev - 1e-12, "j={j}: {} < {prev}", rep.value);
            prev = rep.value;
        }
    }

    #[test]
    fn finite_difference_fallback_is_declared_and_accurate() {
        let p = SymbolProvider::new(
            "sin(x) no partials",
            1,
            SymbolClass::SmoothBoundedDerivatives,
            Arc::new(|x: &[f64], _: &[f64]| Complex64::new(x[0].sin(), 0.0)),
        );
        let grid = GridSpec::d1(10.0, 1024, 5.0, 4).unwrap();
        let rep = symbol_seminorm(&p, 1, &grid).unwrap();
        assert!(matches!(
            rep.derivative_source,
            DerivativeSource::CentralDifference { .. }
        ));
        assert!((rep.value - 2.0).abs() < 2e-3, "{}", rep.value);
    }

    #[test]
    fn second_derivative_via_mixed_route() {
        // ∂²/∂x² of sin at x: −sin(x); analytic first order + one FD layer.
        let p = sin_x_provider();
        let steps = [1e-3, 1e-3];
        let d = derivative_at(&p, &[0.7], &[0.0], &[2, 0], &steps);
        assert!((d.re + 0.7f64.sin()).abs() < 1e-6, "{d}");
    }

    #[test]
    fn sample_and_translate_roundtrip() {
        let grid = GridSpec::fourier_dual_d1(8.0, 64).unwrap();
        let f = sample(&gaussian_provider(), &grid).unwrap();
        let shift = PhasePoint::d1(0.83, -0.41); // non-commensurate
        let there = translate_symbol(&f, &shift, &grid, InterpMethod::Trig).unwrap();
        assert!(!there.commensurate);
        let back =
            translate_symbol(&there.symbol, &shift.neg(), &grid, InterpMethod::Trig).unwrap();
        let dist = back.symbol.sup_distance(&f).unwrap();
        assert!(dist < 1e-9, "round-trip defect {dist}");
    }

    #[test]
    fn commensurate_translation_matches_reindexing() {
        let grid = GridSpec::fourier_dual_d1(8.0, 64).unwrap();
        let f = sample(&gaussian_provider(), &grid).unwrap();
        let shift = PhasePoint::d1(4.0 * grid.hx(0), 0.0);
        let t = translate_symbol(&f, &shift, &grid, InterpMethod::Trig).unwrap();
        assert!(t.commensurate);
        for j in 0..64usize {
            let src = (j + 64 - 4) % 64;
            for m in 0..64usize {
                let want = f.values()[[src, m]];
                let got = t.symbol.values()[[j, m]];
                assert!((want - got).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn nearest_node_snaps_and_reports() {
        let grid = GridSpec::fourier_dual_d1(8.0, 64).unwrap();
        let f = sample(&gaussian_provider(), &grid).unwrap();
        let h = grid.hx(0);
        let t = translate_symbol(
            &f,
            &PhasePoint::d1(1.49 * h, 0.0),
            &grid,
            InterpMethod::NearestNode,
        )
        .unwrap();
        let snapped = t.snapped_shift.unwrap();
        assert!((snapped.x[0] - h).abs() < 1e-12);
    }

    #[test]
    fn translation_rejects_foreign_window() {
        let grid = GridSpec::fourier_dual_d1(8.0, 64).unwrap();
        let other = GridSpec::fourier_dual_d1(10.0, 64).unwrap();
        let f = sample(&gaussian_provider(), &grid).unwrap();
        let err = translate_symbol(&f, &PhasePoint::d1(1.0, 0.0), &other, InterpMethod::Trig);
        assert!(matches!(err, Err(CalcError::Extrapolation(_))));
    }

    #[test]
    fn provider_translate_and_swap() {
        let p = gaussian_provider();
        let t = p.translate(&PhasePoint::d1(2.0, 0.0)).unwrap();
        let v = t.eval(&PhasePoint::d1(2.0, 0.0)).unwrap();
        assert!((v.re - 1.0).abs() < 1e-12);

        let q = SymbolProvider::new(
            "x",
            1,
            SymbolClass::UnboundedAffiliationCandidate,
            Arc::new(|x: &[f64], _: &[f64]| Complex64::new(x[0], 0.0)),
        )
        .with_structure(StructureTag::Multiplication);
        let s = q.swap();
        assert_eq!(s.structure(), Some(StructureTag::FourierMultiplier));
        let v = s.eval(&PhasePoint::d1(0.0, 3.5)).unwrap();
        assert!((v.re - 3.5).abs() < 1e-12);
        // Swapping twice is the identity.
        let ss = s.swap();
        let v2 = ss.eval(&PhasePoint::d1(1.25, -0.5)).unwrap();
        assert!((v2.re - 1.25).abs() < 1e-12);
    }
}
