use crate::error::{CalcError, Result};
use crate::fourier::{self, AxisGeom};
use crate::grid::GridSpec;
use crate::linalg;
use crate::phase::{symplectic_form, PhasePoint};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A dense operator on the position lattice of a grid, i.e. a
/// config_len × config_len matrix acting on sampled wavefunctions.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    grid: GridSpec,
    data: Array2<Complex64>,
}

impl OperatorMatrix {
    pub fn new(grid: GridSpec, data: Array2<Complex64>) -> Result<Self> {
        let n = grid.config_len();
        if data.nrows() != n || data.ncols() != n {
            return Err(CalcError::DimensionMismatch(format!(
                "operator matrix {}×{} does not act on the {}-point position lattice",
                data.nrows(),
                data.ncols(),
                n
            )));
        }
        if data.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(CalcError::NonFinite("operator matrix entry".into()));
        }
        Ok(Self { grid, data })
    }

    pub fn identity(grid: &GridSpec) -> Self {
        Self {
            grid: grid.clone(),
            data: linalg::identity(grid.config_len()),
        }
    }

    /// Multiplication operator diag(g(y)) for a function of position.
    pub fn from_position_fn(
        grid: &GridSpec,
        g: impl Fn(&[f64]) -> Complex64,
    ) -> Result<Self> {
        let n = grid.config_len();
        let mut data = Array2::zeros((n, n));
        for j in 0..n {
            let y = grid.config_point(j);
            data[[j, j]] = g(&y);
        }
        Self::new(grid.clone(), data)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn into_data(self) -> Array2<Complex64> {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn hermitian_defect(&self) -> f64 {
        linalg::hermitian_defect(&self.data)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    pub fn adjoint(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            data: linalg::adjoint(&self.data),
        }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if !self.grid.same_as(&other.grid) {
            return Err(CalcError::GridMismatch(
                "composing operators from different grids".into(),
            ));
        }
        Ok(Self {
            grid: self.grid.clone(),
            data: self.data.dot(&other.data),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.grid.same_as(&other.grid) {
            return Err(CalcError::GridMismatch(
                "adding operators from different grids".into(),
            ));
        }
        Ok(Self {
            grid: self.grid.clone(),
            data: &self.data + &other.data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if !self.grid.same_as(&other.grid) {
            return Err(CalcError::GridMismatch(
                "subtracting operators from different grids".into(),
            ));
        }
        Ok(Self {
            grid: self.grid.clone(),
            data: &self.data - &other.data,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            data: self.data.mapv(|v| v * factor),
        }
    }

    pub fn apply(&self, v: &Array1<Complex64>) -> Array1<Complex64> {
        self.data.dot(v)
    }

    pub fn op_norm(&self) -> f64 {
        linalg::op_norm(&self.data)
    }

    pub fn hs_norm(&self) -> f64 {
        linalg::hs_norm(&self.data)
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.data)
    }
}

/// The phase-space translation unitary W(X) on the lattice:
/// (W(x₀,ξ₀)u)(y) = e^{i(y − x₀/2)·ξ₀} u(y − x₀), with the position shift
/// realized band-limited through the lattice Fourier transform.
///
/// W(X) is exactly unitary for every X. The composition law
/// W(X)W(Y) = e^{(i/2)[[X,Y]]} W(X+Y) holds to rounding on the subgroup of
/// translations the torus can represent — both components on their sampling
/// lattices. Off-lattice parameters still give perfectly good unitaries,
/// but modes wrapping the band edge acquire an O(1) phase mismatch, so the
/// law only holds modulo top-band content; randomized checks therefore draw
/// from the representable subgroup.
pub fn weyl_unitary(grid: &GridSpec, point: &PhasePoint) -> Result<OperatorMatrix> {
    let n = grid.dim();
    if point.dim() != n {
        return Err(CalcError::DimensionMismatch(format!(
            "translation point dimension {} vs grid dimension {}",
            point.dim(),
            n
        )));
    }
    let nc = grid.config_len();
    let sizes: Vec<usize> = (0..n).map(|i| grid.nx(i)).collect();
    let mut w = linalg::identity(nc);
    // Position shift, axis by axis (each exactly unitary).
    for ax in 0..n {
        if point.x[ax] != 0.0 {
            let geom = AxisGeom::space(grid.nx(ax), -grid.lx(ax), grid.hx(ax));
            let a = point.x[ax];
            w = fourier::map_config_lines(&w, &sizes, ax, grid.nx(ax), |line| {
                fourier::shift(&geom, line, a)
            });
        }
    }
    // Momentum boost: diagonal phase e^{i(y − x₀/2)·ξ₀}.
    for j in 0..nc {
        let y = grid.config_point(j);
        let mut phase = 0.0;
        for i in 0..n {
            phase += (y[i] - 0.5 * point.x[i]) * point.xi[i];
        }
        let ph = Complex64::from_polar(1.0, phase);
        for c in 0..nc {
            w[[j, c]] *= ph;
        }
    }
    OperatorMatrix::new(grid.clone(), w)
}

/// Conjugation by the translation unitary: T_X(S) = W(X) S W(X)†.
pub fn translate_operator(s: &OperatorMatrix, point: &PhasePoint) -> Result<OperatorMatrix> {
    let w = weyl_unitary(s.grid(), point)?;
    w.compose(s)?.compose(&w.adjoint())
}

/// Draw a random representable translation: both components uniform on
/// their sampling lattices, within `box_fraction` of the grid box.
pub fn random_lattice_point(
    grid: &GridSpec,
    rng: &mut impl Rng,
    box_fraction: f64,
) -> PhasePoint {
    let n = grid.dim();
    let x: Vec<f64> = (0..n)
        .map(|i| {
            let max_k = ((box_fraction * grid.lx(i)) / grid.hx(i)).floor() as i64;
            rng.gen_range(-max_k..=max_k) as f64 * grid.hx(i)
        })
        .collect();
    let xi: Vec<f64> = (0..n)
        .map(|i| {
            let max_k = ((box_fraction * grid.lxi(i)) / grid.hxi(i)).floor() as i64;
            rng.gen_range(-max_k..=max_k) as f64 * grid.hxi(i)
        })
        .collect();
    PhasePoint::new(x, xi).expect("finite coordinates by construction")
}

/// Outcome of the randomized two-point composition-law check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectiveReport {
    pub pairs_tested: usize,
    /// max over pairs of ‖W(X)W(Y) − e^{(i/2)[[X,Y]]} W(X+Y)‖.
    pub max_defect: f64,
    /// max over sampled points of ‖W(X)†W(X) − 1‖.
    pub max_unitarity_defect: f64,
}

/// Verify W(X)W(Y) = e^{(i/2)[[X,Y]]} W(X+Y) in operator norm for seeded
/// random pairs from the representable translation subgroup, along with
/// unitarity of every sampled W.
pub fn check_projective_relation(
    grid: &GridSpec,
    pairs: usize,
    seed: u64,
) -> Result<ProjectiveReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = linalg::identity(grid.config_len());
    let mut max_defect = 0.0f64;
    let mut max_unit = 0.0f64;
    for _ in 0..pairs {
        let x = random_lattice_point(grid, &mut rng, 0.4);
        let y = random_lattice_point(grid, &mut rng, 0.4);
        let wx = weyl_unitary(grid, &x)?;
        let wy = weyl_unitary(grid, &y)?;
        let unit = linalg::op_norm(&(&linalg::adjoint(wx.data()).dot(wx.data()) - &id));
        max_unit = max_unit.max(unit);
        let lhs = wx.compose(&wy)?;
        let phase = Complex64::from_polar(1.0, 0.5 * symplectic_form(&x, &y)?);
        let rhs = weyl_unitary(grid, &x.add(&y)?)?.scale(phase);
        let defect = lhs.sub(&rhs)?.op_norm();
        max_defect = max_defect.max(defect);
    }
    Ok(ProjectiveReport {
        pairs_tested: pairs,
        max_defect,
        max_unitarity_defect: max_unit,
    })
}

/// A reference compact operator: an explicit finite-rank orthogonal
/// projector used to probe strict convergence and quasi-locality.
#[derive(Debug, Clone)]
pub struct CompactProbe {
    name: String,
    matrix: OperatorMatrix,
}

impl CompactProbe {
    pub fn from_matrix(name: impl Into<String>, matrix: OperatorMatrix) -> Self {
        Self {
            name: name.into(),
            matrix,
        }
    }

    /// Rank-`rank` projector onto the span of the first Hermite functions
    /// sampled on the lattice (re-orthonormalized, so exactly a projector).
    pub fn hermite(grid: &GridSpec, rank: usize) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(CalcError::Precondition(
                "hermite probe is one-dimensional".into(),
            ));
        }
        let n = grid.config_len();
        if rank == 0 || rank > n / 2 {
            return Err(CalcError::Precondition(format!(
                "probe rank {rank} outside 1..={}",
                n / 2
            )));
        }
        let basis = hermite_columns(grid, rank);
        let q = orthonormalize(basis);
        let p = q.dot(&linalg::adjoint(&q));
        Ok(Self {
            name: format!("hermite-projector-rank-{rank}"),
            matrix: OperatorMatrix::new(grid.clone(), p)?,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.matrix
    }
}

/// Sampled Hermite functions ψ_m, m = 0..rank, as columns (not yet
/// orthonormal on the lattice).
fn hermite_columns(grid: &GridSpec, rank: usize) -> Array2<Complex64> {
    let n = grid.config_len();
    let mut cols = Array2::zeros((n, rank));
    let pts = grid.x_axis(0);
    // Three-term recurrence ψ_{m+1} = (√(2/(m+1)) y) ψ_m − √(m/(m+1)) ψ_{m−1}
    // keeps values normalized enough to avoid overflow.
    let mut prev: Vec<f64> = vec![0.0; n];
    let mut curr: Vec<f64> = pts
        .iter()
        .map(|&y| (-0.5 * y * y).exp() / std::f64::consts::PI.powf(0.25))
        .collect();
    for m in 0..rank {
        for j in 0..n {
            cols[[j, m]] = Complex64::new(curr[j], 0.0);
        }
        let next: Vec<f64> = (0..n)
            .map(|j| {
                ((2.0 / (m as f64 + 1.0)).sqrt() * pts[j] * curr[j])
                    - ((m as f64 / (m as f64 + 1.0)).sqrt() * prev[j])
            })
            .collect();
        prev = std::mem::take(&mut curr);
        curr = next;
    }
    cols
}

/// Modified Gram–Schmidt on the columns.
fn orthonormalize(mut a: Array2<Complex64>) -> Array2<Complex64> {
    let (n, k) = (a.nrows(), a.ncols());
    for c in 0..k {
        for prev in 0..c {
            let mut inner = Complex64::new(0.0, 0.0);
            for r in 0..n {
                inner += a[[r, prev]].conj() * a[[r, c]];
            }
            for r in 0..n {
                let sub = inner * a[[r, prev]];
                a[[r, c]] -= sub;
            }
        }
        let norm: f64 = (0..n).map(|r| a[[r, c]].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..n {
            a[[r, c]] /= Complex64::new(norm, 0.0);
        }
    }
    a
}

/// Two-sided compression norm ‖KS‖ + ‖SK‖ against a compact probe — the
/// quantity that must survive translation limits for strict convergence.
pub fn strict_seminorm(s: &OperatorMatrix, probe: &CompactProbe) -> Result<f64> {
    let k = probe.matrix();
    let ks = k.compose(s)?.op_norm();
    let sk = s.compose(k)?.op_norm();
    Ok(ks + sk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn grid64() -> GridSpec {
        GridSpec::fourier_dual_d1(8.0, 64).unwrap()
    }

    #[test]
    fn weyl_unitary_is_unitary_for_arbitrary_points() {
        let grid = grid64();
        let id = linalg::identity(64);
        for p in [
            PhasePoint::d1(1.37, 0.0),
            PhasePoint::d1(0.0, 2.41),
            PhasePoint::d1(-2.93, 1.618),
            PhasePoint::d1(0.5, -0.25),
        ] {
            let w = weyl_unitary(&grid, &p).unwrap();
            let defect = linalg::op_norm(&(&linalg::adjoint(w.data()).dot(w.data()) - &id));
            assert!(defect < 1e-10, "unitarity defect {defect} at {p:?}");
        }
    }

    #[test]
    fn weyl_of_zero_is_identity() {
        let grid = grid64();
        let w = weyl_unitary(&grid, &PhasePoint::d1(0.0, 0.0)).unwrap();
        let defect = linalg::op_norm(&(w.data() - &linalg::identity(64)));
        assert!(defect < 1e-12);
    }

    #[test]
    fn adjoint_is_inverse_point() {
        let grid = grid64();
        let p = PhasePoint::d1(5.0 * grid.hx(0), 3.0 * grid.hxi(0));
        let w = weyl_unitary(&grid, &p).unwrap();
        let wm = weyl_unitary(&grid, &p.neg()).unwrap();
        let defect = w.adjoint().sub(&wm).unwrap().op_norm();
        assert!(defect < 1e-10, "W(X)† vs W(−X): {defect}");
    }

    #[test]
    fn composition_phase_for_shift_then_boost() {
        // X = (x,0), Y = (0,η): W(X)W(Y) = e^{−i x η / 2} W(X+Y).
        let grid = grid64();
        let x = 7.0 * grid.hx(0);
        let eta = 4.0 * grid.hxi(0);
        let wx = weyl_unitary(&grid, &PhasePoint::d1(x, 0.0)).unwrap();
        let wy = weyl_unitary(&grid, &PhasePoint::d1(0.0, eta)).unwrap();
        let lhs = wx.compose(&wy).unwrap();
        let rhs = weyl_unitary(&grid, &PhasePoint::d1(x, eta))
            .unwrap()
            .scale(Complex64::from_polar(1.0, -0.5 * x * eta));
        let defect = lhs.sub(&rhs).unwrap().op_norm();
        assert!(defect < 1e-10, "composition defect {defect}");
    }

    #[test]
    fn projective_relation_randomized() {
        let grid = grid64();
        let report = check_projective_relation(&grid, 25, 42).unwrap();
        assert!(report.max_defect < 1e-8, "defect {}", report.max_defect);
        assert!(
            report.max_unitarity_defect < 1e-10,
            "unitarity {}",
            report.max_unitarity_defect
        );
    }

    #[test]
    fn translation_covariance_of_position_multiplier() {
        // Conjugating diag(g) by a lattice shift gives diag(g(· − a)) exactly
        // (up to the periodic wrap, so use a function supported well inside).
        let grid = grid64();
        let g = |y: &[f64]| Complex64::new((-y[0] * y[0]).exp(), 0.0);
        let op = OperatorMatrix::from_position_fn(&grid, g).unwrap();
        let a = 8.0 * grid.hx(0);
        let moved = translate_operator(&op, &PhasePoint::d1(a, 0.0)).unwrap();
        for j in 0..64 {
            let y = grid.config_point(j)[0];
            let src = y - a;
            // Compare against the periodized shift.
            let wrapped = if src < -grid.lx(0) { src + 2.0 * grid.lx(0) } else { src };
            let want = Complex64::new((-wrapped * wrapped).exp(), 0.0);
            let got = moved.data()[[j, j]];
            assert!((want - got).norm() < 1e-10, "row {j}: {want} vs {got}");
        }
        // Off-diagonal stays numerically zero.
        let mut off = 0.0f64;
        for r in 0..64 {
            for c in 0..64 {
                if r != c {
                    off = off.max(moved.data()[[r, c]].norm());
                }
            }
        }
        assert!(off < 1e-10, "off-diagonal leakage {off}");
    }

    #[test]
    fn momentum_boost_conjugates_shift_phase() {
        // T_X with X = (0,η) multiplies the kernel by e^{iη(y−y')}; on a
        // position multiplier it acts trivially.
        let grid = grid64();
        let op = OperatorMatrix::from_position_fn(&grid, |y| {
            Complex64::new(y[0].tanh(), 0.0)
        })
        .unwrap();
        let moved = translate_operator(&op, &PhasePoint::d1(0.0, 1.3)).unwrap();
        let defect = moved.sub(&op).unwrap().op_norm();
        assert!(defect < 1e-10, "boost should commute with multipliers: {defect}");
    }

    #[test]
    fn hermite_probe_is_projector() {
        let grid = GridSpec::fourier_dual_d1(10.0, 128).unwrap();
        let probe = CompactProbe::hermite(&grid, 5).unwrap();
        let p = probe.matrix();
        assert!(p.is_hermitian(1e-12));
        let idem = p.compose(p).unwrap().sub(p).unwrap().op_norm();
        assert!(idem < 1e-12, "idempotency defect {idem}");
        assert!((p.trace().re - 5.0).abs() < 1e-10, "rank {}", p.trace().re);
        assert!((p.op_norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn strict_seminorm_basics() {
        let grid = grid64();
        let probe = CompactProbe::hermite(&grid, 3).unwrap();
        let id = OperatorMatrix::identity(&grid);
        let s = strict_seminorm(&id, &probe).unwrap();
        assert!((s - 2.0).abs() < 1e-10, "identity should give 2: {s}");
        let zero = id.scale(Complex64::new(0.0, 0.0));
        assert!(strict_seminorm(&zero, &probe).unwrap() < 1e-14);
    }
}
