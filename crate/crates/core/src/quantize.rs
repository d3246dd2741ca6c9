use crate::error::{CalcError, Result};
use crate::families::CoordSpace;
use crate::fourier::{self, AxisGeom};
use crate::grid::GridSpec;
use crate::symbol::{SampledSymbol, SymbolProvider};
use crate::weyl::{CompactProbe, OperatorMatrix};
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

fn require_dual(grid: &GridSpec, what: &str) -> Result<()> {
    if !grid.is_fourier_dual() {
        return Err(CalcError::Precondition(format!(
            "{what} needs the momentum lattice dual to the position lattice \
             (Lξ = π/hx, Nξ = Nx per axis); otherwise the calculus cannot be \
             exact on constants — build the grid with GridSpec::fourier_dual"
        )));
    }
    Ok(())
}

/// Decode `flat` into a row-major multi-index for the given sizes.
fn decode(flat: usize, sizes: &[usize]) -> Vec<usize> {
    let mut rem = flat;
    let mut out = vec![0; sizes.len()];
    for i in (0..sizes.len()).rev() {
        out[i] = rem % sizes[i];
        rem /= sizes[i];
    }
    out
}

fn strides(sizes: &[usize]) -> Vec<usize> {
    let mut s = vec![1; sizes.len()];
    for i in (0..sizes.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * sizes[i + 1];
    }
    s
}

/// Midpoint-rule operator assembly from symbol values on the half-step
/// configuration lattice: the shared core of both quantization routes.
///
/// Per axis, with a = centered residue of j−k in [−N/2, N/2):
///
///   M[j,k] = N^{−n} · (−1)^{Σaᵢ} · G[(2j−a) mod 2N][(j−k) mod N],
///
/// where G[s][d] = Σ_m f(u_s, η_m) e^{+2πi m·d/N} on the half-step midpoint
/// lattice u_s. The centered residue matters: the midpoint is taken between
/// the *nearest* periodic images of the two grid points, which keeps the
/// kernel of a decaying symbol free of wrap-around ghosts in the far
/// corners. On the edge diagonal |j−k| = N/2 both image pairs are
/// equidistant and their midpoints are averaged, so real symbols quantize
/// exactly Hermitian. With the dual momentum lattice this reproduces
/// multiplication operators, Fourier multipliers, and the identity exactly.
fn assemble(grid: &GridSpec, f_mid: Array2<Complex64>) -> Result<OperatorMatrix> {
    let n = grid.dim();
    let nc = grid.config_len();
    let nm = grid.momentum_len();
    let sizes_xi: Vec<usize> = (0..n).map(|i| grid.nxi(i)).collect();
    let sizes_x: Vec<usize> = (0..n).map(|i| grid.nx(i)).collect();
    let sizes_dbl: Vec<usize> = sizes_x.iter().map(|&s| 2 * s).collect();

    // G[s][d]: unnormalized inverse DFT along every momentum axis.
    let mut g = f_mid;
    for ax in 0..n {
        g = fourier::map_momentum_lines(&g, &sizes_xi, ax, sizes_xi[ax], |line| {
            fourier::raw_fft_inverse(line)
        });
    }

    let cfg_multi: Vec<Vec<usize>> = (0..nc).map(|j| decode(j, &sizes_x)).collect();
    let dbl_strides = strides(&sizes_dbl);
    let mom_strides = strides(&sizes_xi);
    let norm = 1.0 / nm as f64;

    let rows: Vec<Vec<Complex64>> = (0..nc)
        .into_par_iter()
        .map(|j| {
            let jm = &cfg_multi[j];
            let mut row = Vec::with_capacity(nc);
            let mut base = vec![0usize; n];
            let mut edge = vec![false; n];
            for k in 0..nc {
                let km = &cfg_multi[k];
                let mut d_flat = 0usize;
                let mut parity = 0usize;
                let mut n_edges = 0usize;
                for i in 0..n {
                    let ni = sizes_x[i];
                    let r = (jm[i] + ni - km[i]) % ni;
                    d_flat += r * mom_strides[i];
                    parity += jm[i] + km[i];
                    let a = if r < ni / 2 {
                        r as i64
                    } else {
                        r as i64 - ni as i64
                    };
                    base[i] = (2 * jm[i] as i64 - a).rem_euclid(2 * ni as i64) as usize;
                    edge[i] = r == ni / 2;
                    if edge[i] {
                        n_edges += 1;
                    }
                }
                let mut val = Complex64::new(0.0, 0.0);
                let combos = 1usize << n_edges;
                for bits in 0..combos {
                    let mut s_flat = 0usize;
                    let mut bit = 0usize;
                    for i in 0..n {
                        let mut s = base[i];
                        if edge[i] {
                            if bits >> bit & 1 == 1 {
                                s = (s + sizes_x[i]) % sizes_dbl[i];
                            }
                            bit += 1;
                        }
                        s_flat += s * dbl_strides[i];
                    }
                    val += g[[s_flat, d_flat]];
                }
                val /= combos as f64;
                let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
                row.push(val * (sign * norm));
            }
            row
        })
        .collect();

    let mut data = Array2::zeros((nc, nc));
    for (j, row) in rows.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            data[[j, k]] = v;
        }
    }
    OperatorMatrix::new(grid.clone(), data)
}

/// Quantize a sampled symbol: the sampled data is read as a trigonometric
/// polynomial on the periodic box, so the half-step midpoint values come
/// from band-limited interpolation.
///
/// Symbols whose periodic extension is rough at the box edge (steps, growing
/// coordinates) should be quantized through a provider instead — the
/// interpolant would ring.
pub fn quantize(f: &SampledSymbol) -> Result<OperatorMatrix> {
    let grid = f.grid().clone();
    require_dual(&grid, "quantize")?;
    let n = grid.dim();
    let sizes_x: Vec<usize> = (0..n).map(|i| grid.nx(i)).collect();
    let mut mid = f.values().clone();
    let mut cur_sizes = sizes_x;
    for ax in 0..n {
        let geom = AxisGeom::space(grid.nx(ax), -grid.lx(ax), grid.hx(ax));
        mid = fourier::map_config_lines(&mid, &cur_sizes, ax, 2 * grid.nx(ax), |line| {
            fourier::upsample2(&geom, line)
        });
        cur_sizes[ax] *= 2;
    }
    assemble(&grid, mid)
}

/// Quantize through exact point evaluation of the symbol at the half-step
/// midpoints — no interpolation, so non-periodic symbols (steps, polynomial
/// growth) are handled faithfully.
pub fn quantize_provider(p: &SymbolProvider, grid: &GridSpec) -> Result<OperatorMatrix> {
    require_dual(grid, "quantize")?;
    if p.dim() != grid.dim() {
        return Err(CalcError::DimensionMismatch(format!(
            "symbol '{}' has dimension {}, grid has {}",
            p.name(),
            p.dim(),
            grid.dim()
        )));
    }
    let n = grid.dim();
    let sizes_dbl: Vec<usize> = (0..n).map(|i| 2 * grid.nx(i)).collect();
    let half_axes: Vec<Vec<f64>> = (0..n).map(|i| grid.x_half_axis(i)).collect();
    let rows: usize = sizes_dbl.iter().product();
    let nm = grid.momentum_len();
    let data: Vec<Complex64> = (0..rows)
        .into_par_iter()
        .flat_map_iter(|s| {
            let sm = decode(s, &sizes_dbl);
            let u: Vec<f64> = (0..n).map(|i| half_axes[i][sm[i]]).collect();
            (0..nm).map(move |m| {
                let eta = grid.momentum_point(m);
                p.eval_xp(&u, &eta)
            })
        })
        .collect();
    let mid = Array2::from_shape_vec((rows, nm), data).expect("shape by construction");
    if mid.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(CalcError::NonFinite(
            "symbol evaluation at a quantization midpoint".into(),
        ));
    }
    assemble(grid, mid)
}

/// Recover the symbol of an operator by expanding it in the orthogonal
/// family of lattice translation unitaries and resubstituting each unitary's
/// symbol — a route through operator traces, independent of the midpoint
/// kernel assembly used by quantization.
///
/// Exact for diagonal operators and for the translation unitaries
/// themselves; for decaying kernels the round trip with quantization agrees
/// to the size of the kernel's wrap-around tail.
pub fn dequantize(op: &OperatorMatrix) -> Result<SampledSymbol> {
    let grid = op.grid().clone();
    require_dual(&grid, "dequantize")?;
    let n = grid.dim();
    let nc = grid.config_len();
    let sizes_x: Vec<usize> = (0..n).map(|i| grid.nx(i)).collect();
    let cfg_multi: Vec<Vec<usize>> = (0..nc).map(|j| decode(j, &sizes_x)).collect();
    let s = op.data();

    // A[α, j] = S[j, j − a] with a the centered lattice shift of row α.
    let mut a_mat = Array2::zeros((nc, nc));
    for alpha in 0..nc {
        let am = &cfg_multi[alpha];
        for j in 0..nc {
            let jm = &cfg_multi[j];
            let mut k_flat = 0usize;
            let k_strides = strides(&sizes_x);
            for i in 0..n {
                let half = sizes_x[i] / 2;
                let k = (jm[i] + half + sizes_x[i] - am[i]) % sizes_x[i];
                k_flat += k * k_strides[i];
            }
            a_mat[[alpha, j]] = s[[j, k_flat]];
        }
    }

    // Columns j → β: c₀[α, β] = (1/N^n) Σ_j e^{−i y_j·η_β} A[α, j].
    let mut c = a_mat;
    for ax in 0..n {
        let geom = AxisGeom::space(grid.nx(ax), -grid.lx(ax), grid.hx(ax));
        c = fourier::map_momentum_lines(&c, &sizes_x, ax, sizes_x[ax], |line| {
            fourier::analyze(&geom, line)
        });
    }
    // Half-angle phase: c[α, β] = e^{i y_α·η_β / 2} c₀[α, β].
    for alpha in 0..nc {
        let y = grid.config_point(alpha);
        for beta in 0..nc {
            let eta = grid.momentum_point(beta);
            let dot: f64 = y.iter().zip(eta.iter()).map(|(a, b)| a * b).sum();
            c[[alpha, beta]] *= Complex64::from_polar(1.0, 0.5 * dot);
        }
    }

    // Resynthesis f(x_j, η_m) = Σ_{α,β} c[α,β] e^{i x_j·η_β} e^{−i y_α·η_m}:
    // columns β → j (synthesis), then rows α → m (scaled analysis).
    let mut r = c;
    for ax in 0..n {
        let geom = AxisGeom::space(grid.nx(ax), -grid.lx(ax), grid.hx(ax));
        r = fourier::map_momentum_lines(&r, &sizes_x, ax, sizes_x[ax], |line| {
            fourier::synthesize(&geom, line)
        });
    }
    for ax in 0..n {
        let geom = AxisGeom::space(grid.nx(ax), -grid.lx(ax), grid.hx(ax));
        let scale = sizes_x[ax] as f64;
        r = fourier::map_config_lines(&r, &sizes_x, ax, sizes_x[ax], |line| {
            fourier::analyze(&geom, line)
                .into_iter()
                .map(|v| v * scale)
                .collect()
        });
    }
    // r[m-row, j-col] — transpose into symbol layout.
    let values = r.t().to_owned();
    SampledSymbol::new(grid, values)
}

/// Tail-safety thresholds for the twisted product.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarOptions {
    /// Outermost fraction of the mode box counted as "near the band edge".
    pub tail_fraction: f64,
    /// Largest admissible relative l² mode mass in that shell.
    pub tail_tol: f64,
}

impl Default for StarOptions {
    fn default() -> Self {
        Self {
            tail_fraction: 0.05,
            tail_tol: 1e-7,
        }
    }
}

/// The twisted product plus the diagnostics that certify it.
#[derive(Debug, Clone)]
pub struct StarOutcome {
    pub symbol: SampledSymbol,
    /// Relative band-edge mode mass of the two inputs.
    pub tail_f: f64,
    pub tail_g: f64,
    /// Relative mass of product modes falling outside the representable
    /// band (they are discarded).
    pub discarded_mass: f64,
}

/// Relative l² mass of modes whose index lies within `frac` of the box edge
/// on any axis.
fn band_tail_mass(modes: &Array2<Complex64>, grid: &GridSpec, frac: f64) -> f64 {
    let n = grid.dim();
    let sizes_x: Vec<usize> = (0..n).map(|i| grid.nx(i)).collect();
    let sizes_xi: Vec<usize> = (0..n).map(|i| grid.nxi(i)).collect();
    let in_core = |idx: usize, len: usize| {
        let m = (len as f64 * frac).ceil() as usize;
        idx >= m && idx < len - m
    };
    let mut total = 0.0;
    let mut tail = 0.0;
    for (rf, row) in modes.outer_iter().enumerate() {
        let rm = decode(rf, &sizes_x);
        let row_core = (0..n).all(|i| in_core(rm[i], sizes_x[i]));
        for (cf, v) in row.iter().enumerate() {
            let cm = decode(cf, &sizes_xi);
            let core = row_core && (0..n).all(|i| in_core(cm[i], sizes_xi[i]));
            let e = v.norm_sqr();
            total += e;
            if !core {
                tail += e;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        (tail / total).sqrt()
    }
}

/// Mode coefficients of a sampled symbol: g[j,m] = Σ ĝ[q,p] e^{i u_q x_j}
/// e^{i v_p η_m}, where u runs over the momentum lattice and v over the
/// position lattice (the two lattices are mutually dual here).
fn symbol_modes(f: &SampledSymbol) -> Array2<Complex64> {
    let grid = f.grid();
    let n = grid.dim();
    let sizes_x: Vec<usize> = (0..n).map(|i| grid.nx(i)).collect();
    let sizes_xi: Vec<usize> = (0..n).map(|i| grid.nxi(i)).collect();
    let mut m = f.values().clone();
    for ax in 0..n {
        let geom = AxisGeom::space(grid.nx(ax), -grid.lx(ax), grid.hx(ax));
        m = fourier::map_config_lines(&m, &sizes_x, ax, sizes_x[ax], |line| {
            fourier::analyze(&geom, line)
        });
    }
    for ax in 0..n {
        let geom = AxisGeom::space(grid.nxi(ax), -grid.lxi(ax), grid.hxi(ax));
        m = fourier::map_momentum_lines(&m, &sizes_xi, ax, sizes_xi[ax], |line| {
            fourier::analyze(&geom, line)
        });
    }
    m
}

fn modes_to_symbol(modes: Array2<Complex64>, grid: &GridSpec) -> Result<SampledSymbol> {
    let n = grid.dim();
    let sizes_x: Vec<usize> = (0..n).map(|i| grid.nx(i)).collect();
    let sizes_xi: Vec<usize> = (0..n).map(|i| grid.nxi(i)).collect();
    let mut m = modes;
    for ax in 0..n {
        let geom = AxisGeom::space(grid.nx(ax), -grid.lx(ax), grid.hx(ax));
        m = fourier::map_config_lines(&m, &sizes_x, ax, sizes_x[ax], |line| {
            fourier::synthesize(&geom, line)
        });
    }
    for ax in 0..n {
        let geom = AxisGeom::space(grid.nxi(ax), -grid.lxi(ax), grid.hxi(ax));
        m = fourier::map_momentum_lines(&m, &sizes_xi, ax, sizes_xi[ax], |line| {
            fourier::synthesize(&geom, line)
        });
    }
    SampledSymbol::new(grid.clone(), m)
}

/// The deformed (noncommutative) product of two symbols, computed as a
/// twisted convolution in the symplectic Fourier domain:
///
///   (f#g)^[W] = Σ_{W'+W″=W} f̂[W'] ĝ[W″] e^{(i/2)(u″·v' − u'·v″)}
///
/// with W = (u,v) the mode labels. Plane-wave pairs multiply exactly (the
/// phase is a table of exact roots of unity), so the only approximations
/// are the declared band-edge tails of the inputs and the discarded
/// out-of-band product modes, both measured and reported.
///
/// Cost is quadratic in the number of phase-space modes; grids beyond
/// roughly 2·10⁹ mode pairs are rejected.
pub fn star_product(
    f: &SampledSymbol,
    g: &SampledSymbol,
    opts: &StarOptions,
) -> Result<StarOutcome> {
    let grid = f.grid().clone();
    require_dual(&grid, "star_product")?;
    if !grid.same_as(g.grid()) {
        return Err(CalcError::GridMismatch(
            "product factors sampled on different grids".into(),
        ));
    }
    let n = grid.dim();
    let nc = grid.config_len();
    let nm = grid.momentum_len();
    let work = (nc as f64 * nm as f64).powi(2);
    if work > 2.1e9 {
        return Err(CalcError::Precondition(format!(
            "twisted product on this grid needs {work:.2e} mode pairs; \
             reduce the grid (limit 2.1e9)"
        )));
    }

    let fh = symbol_modes(f);
    let gh = symbol_modes(g);
    let tail_f = band_tail_mass(&fh, &grid, opts.tail_fraction);
    let tail_g = band_tail_mass(&gh, &grid, opts.tail_fraction);
    let worst = tail_f.max(tail_g);
    if worst > opts.tail_tol {
        return Err(CalcError::Precondition(format!(
            "input modes carry relative mass {worst:.3e} near the band edge \
             (limit {:.1e}); the product would alias — enlarge the grid or \
             smooth the symbols",
            opts.tail_tol
        )));
    }

    let sizes_x: Vec<usize> = (0..n).map(|i| grid.nx(i)).collect();
    let sizes_xi: Vec<usize> = (0..n).map(|i| grid.nxi(i)).collect();
    let dbl_x: Vec<usize> = sizes_x.iter().map(|&s| 2 * s).collect();
    let dbl_xi: Vec<usize> = sizes_xi.iter().map(|&s| 2 * s).collect();
    let nc2: usize = dbl_x.iter().product();
    let nm2: usize = dbl_xi.iter().product();
    let dbl_x_str = strides(&dbl_x);
    let dbl_xi_str = strides(&dbl_xi);

    // Per-axis tables of exact roots of unity: the phase angle per axis is
    // (π/N_i)·K_i with integer K_i, since u·v products are integer multiples
    // of hx·hξ = 2π/N.
    let phase_tables: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            let m = 2 * sizes_x[i];
            (0..m)
                .map(|k| Complex64::from_polar(1.0, PI * k as f64 / sizes_x[i] as f64))
                .collect()
        })
        .collect();

    let cfg_multi: Vec<Vec<usize>> = (0..nc).map(|j| decode(j, &sizes_x)).collect();
    let mom_multi: Vec<Vec<usize>> = (0..nm).map(|m| decode(m, &sizes_xi)).collect();

    // Accumulate on the doubled mode lattice, parallel over f-modes.
    let acc = (0..nc)
        .into_par_iter()
        .fold(
            || Array2::<Complex64>::zeros((nc2, nm2)),
            |mut acc, qf| {
                let qfm = &cfg_multi[qf];
                for pf in 0..nm {
                    let fv = fh[[qf, pf]];
                    if fv.norm_sqr() < 1e-64 {
                        continue;
                    }
                    let pfm = &mom_multi[pf];
                    for qg in 0..nc {
                        let qgm = &cfg_multi[qg];
                        for pg in 0..nm {
                            let gv = gh[[qg, pg]];
                            if gv.norm_sqr() < 1e-64 {
                                continue;
                            }
                            let pgm = &mom_multi[pg];
                            // phase (i/2)(u″·v' − u'·v″): per axis the
                            // integer K = (q″−c)(p'−c) − (q'−c)(p″−c).
                            let mut phase = Complex64::new(1.0, 0.0);
                            let mut row = 0usize;
                            let mut col = 0usize;
                            for i in 0..n {
                                let cx = (sizes_x[i] / 2) as i64;
                                let cxi = (sizes_xi[i] / 2) as i64;
                                let k = (qgm[i] as i64 - cx) * (pfm[i] as i64 - cxi)
                                    - (qfm[i] as i64 - cx) * (pgm[i] as i64 - cxi);
                                let m = 2 * sizes_x[i] as i64;
                                let km = ((k % m) + m) % m;
                                phase *= phase_tables[i][km as usize];
                                row += (qfm[i] + qgm[i]) * dbl_x_str[i];
                                col += (pfm[i] + pgm[i]) * dbl_xi_str[i];
                            }
                            acc[[row, col]] += fv * gv * phase;
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || Array2::<Complex64>::zeros((nc2, nm2)),
            |a, b| a + b,
        );

    // Keep the representable band: doubled index q_out with centered offset
    // (q_out − N_i) in [−N_i/2, N_i/2), i.e. q_out ∈ [N_i/2, 3N_i/2).
    let mut kept = Array2::zeros((nc, nm));
    let mut total = 0.0;
    let mut discarded = 0.0;
    for rf in 0..nc2 {
        let rm = decode(rf, &dbl_x);
        let in_r: Vec<Option<usize>> = (0..n)
            .map(|i| {
                let lo = sizes_x[i] / 2;
                let hi = lo + sizes_x[i];
                if rm[i] >= lo && rm[i] < hi {
                    Some(rm[i] - lo)
                } else {
                    None
                }
            })
            .collect();
        for cf in 0..nm2 {
            let v = acc[[rf, cf]];
            let e = v.norm_sqr();
            if e == 0.0 {
                continue;
            }
            total += e;
            let cm = decode(cf, &dbl_xi);
            let mut ok = true;
            let mut row = 0usize;
            let mut col = 0usize;
            let x_str = strides(&sizes_x);
            let xi_str = strides(&sizes_xi);
            for i in 0..n {
                match in_r[i] {
                    Some(r) => row += r * x_str[i],
                    None => {
                        ok = false;
                        break;
                    }
                }
                let lo = sizes_xi[i] / 2;
                let hi = lo + sizes_xi[i];
                if cm[i] >= lo && cm[i] < hi {
                    col += (cm[i] - lo) * xi_str[i];
                } else {
                    ok = false;
                    break;
                }
            }
            if ok {
                kept[[row, col]] = v;
            } else {
                discarded += e;
            }
        }
    }
    let discarded_mass = if total == 0.0 {
        0.0
    } else {
        (discarded / total).sqrt()
    };

    Ok(StarOutcome {
        symbol: modes_to_symbol(kept, &grid)?,
        tail_f,
        tail_g,
        discarded_mass,
    })
}

/// A band-limited stand-in for the linear coordinate x (or ξ): the periodic
/// sawtooth convolved with a Gaussian of width `sigma`, built directly from
/// its Fourier series. Away from the box edge (|z| ≲ L − 6σ) it equals the
/// coordinate to machine precision, because convolving a linear function
/// with a centered unit-mass Gaussian reproduces it exactly.
pub fn mollified_coordinate(
    grid: &GridSpec,
    space: CoordSpace,
    axis: usize,
    sigma: f64,
) -> Result<SampledSymbol> {
    let n = grid.dim();
    if axis >= n {
        return Err(CalcError::DimensionMismatch(format!(
            "axis {axis} out of range for dimension {n}"
        )));
    }
    if sigma <= 0.0 {
        return Err(CalcError::Precondition("sigma must be positive".into()));
    }
    let (l, count) = match space {
        CoordSpace::X => (grid.lx(axis), grid.nx(axis)),
        CoordSpace::Xi => (grid.lxi(axis), grid.nxi(axis)),
    };
    // Sawtooth series on (−L, L): z = Σ_{k≠0} i·L·(−1)^k/(πk) e^{iπkz/L};
    // damped by the Gaussian factor e^{−σ²ω²/2}.
    let line: Vec<Complex64> = {
        let pts: Vec<f64> = (0..count).map(|j| -l + 2.0 * l * j as f64 / count as f64).collect();
        pts.iter()
            .map(|&z| {
                let mut v = Complex64::new(0.0, 0.0);
                for k in 1..=(count as i64 / 2) {
                    let om = PI * k as f64 / l;
                    let coeff = l / (PI * k as f64)
                        * if k % 2 == 0 { -1.0 } else { 1.0 }
                        * (-0.5 * sigma * sigma * om * om).exp();
                    v += Complex64::new(2.0 * coeff * (om * z).sin(), 0.0);
                }
                v
            })
            .collect()
    };
    let rows = grid.config_len();
    let cols = grid.momentum_len();
    let values = Array2::from_shape_fn((rows, cols), |(r, c)| match space {
        CoordSpace::X => {
            let multi = decode(r, &(0..n).map(|i| grid.nx(i)).collect::<Vec<_>>());
            line[multi[axis]]
        }
        CoordSpace::Xi => {
            let multi = decode(c, &(0..n).map(|i| grid.nxi(i)).collect::<Vec<_>>());
            line[multi[axis]]
        }
    });
    SampledSymbol::new(grid.clone(), values)
}

/// The quantized unit-width Gaussian bump scaled to unit trace — the
/// canonical non-finite-rank compact reference operator (numerically a
/// rank-one projector up to exponentially small corrections).
pub fn gaussian_probe(grid: &GridSpec) -> Result<CompactProbe> {
    let n = grid.dim();
    let amp = 2.0f64.powi(n as i32);
    let p = SymbolProvider::new(
        "gaussian-probe",
        n,
        crate::symbol::SymbolClass::VanishingAtInfinity,
        Arc::new(move |x: &[f64], xi: &[f64]| {
            let r2: f64 = x.iter().map(|v| v * v).sum::<f64>()
                + xi.iter().map(|v| v * v).sum::<f64>();
            Complex64::new(amp * (-r2).exp(), 0.0)
        }),
    );
    let m = quantize_provider(&p, grid)?;
    Ok(CompactProbe::from_matrix("quantized-gaussian", m))
}
