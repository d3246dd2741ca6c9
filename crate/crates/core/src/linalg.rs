use crate::error::{CalcError, Result};
use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64;

/// Convert a flattened operator matrix to nalgebra's dense layout.
pub fn to_na(a: &Array2<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |r, c| a[[r, c]])
}

pub fn from_na(m: &DMatrix<Complex64>) -> Array2<Complex64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(r, c)| m[(r, c)])
}

/// Largest deviation from Hermitian symmetry, max |A − A†|.
pub fn hermitian_defect(a: &Array2<Complex64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in r..n {
            let d = (a[[r, c]] - a[[c, r]].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// (A + A†)/2, the Hermitian part.
pub fn hermitize(a: &Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    Array2::from_shape_fn((n, n), |(r, c)| 0.5 * (a[[r, c]] + a[[c, r]].conj()))
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors as columns.
///
/// Rejects matrices whose Hermitian defect exceeds `tol` scaled by the
/// matrix magnitude; below that the defect is projected out before solving.
pub fn eigh(a: &Array2<Complex64>, tol: f64) -> Result<(Vec<f64>, Array2<Complex64>)> {
    if a.nrows() != a.ncols() {
        return Err(CalcError::DimensionMismatch(format!(
            "eigh needs a square matrix, got {}×{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let defect = hermitian_defect(a);
    if defect > tol * scale {
        return Err(CalcError::NotHermitian(defect));
    }
    let h = hermitize(a);
    let m = to_na(&h);
    let eig = m.symmetric_eigen();
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("finite eigenvalues")
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors =
        Array2::from_shape_fn((n, n), |(r, c)| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Operator norm (largest singular value).
pub fn op_norm(a: &Array2<Complex64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let svd = to_na(a).svd(false, false);
    svd.singular_values.iter().copied().fold(0.0, f64::max)
}

/// All singular values, descending (nalgebra's order).
pub fn singular_values(a: &Array2<Complex64>) -> Vec<f64> {
    let svd = to_na(a).svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).expect("finite singular values"));
    sv
}

/// Frobenius (Hilbert–Schmidt) norm.
pub fn hs_norm(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(a: &Array2<Complex64>) -> Complex64 {
    a.diag().iter().sum()
}

/// Solve A X = B by LU decomposition.
pub fn solve(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    if a.nrows() != a.ncols() || a.nrows() != b.nrows() {
        return Err(CalcError::DimensionMismatch(format!(
            "solve: A is {}×{}, B is {}×{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let lu = to_na(a).lu();
    lu.solve(&to_na(b))
        .map(|m| from_na(&m))
        .ok_or_else(|| CalcError::Singular("LU solve failed (singular matrix)".into()))
}

pub fn inverse(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    to_na(a)
        .try_inverse()
        .map(|m| from_na(&m))
        .ok_or_else(|| CalcError::Singular("matrix is not invertible".into()))
}

pub fn identity(n: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((n, n), |(r, c)| {
        if r == c {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn adjoint(a: &Array2<Complex64>) -> Array2<Complex64> {
    Array2::from_shape_fn((a.ncols(), a.nrows()), |(r, c)| a[[c, r]].conj())
}

/// Apply a scalar function to a Hermitian matrix through its
/// eigendecomposition: f(A) = V f(Λ) V†.
pub fn func_of_hermitian(
    a: &Array2<Complex64>,
    tol: f64,
    f: impl Fn(f64) -> Complex64,
) -> Result<Array2<Complex64>> {
    let (vals, vecs) = eigh(a, tol)?;
    let n = vals.len();
    let mut scaled = vecs.clone();
    for (c, &lam) in vals.iter().enumerate() {
        let fv = f(lam);
        for r in 0..n {
            scaled[[r, c]] *= fv;
        }
    }
    Ok(scaled.dot(&adjoint(&vecs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> Array2<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = Array2::from_shape_fn((n, n), |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        hermitize(&raw)
    }

    #[test]
    fn eigh_sorts_ascending_and_reconstructs() {
        let a = random_hermitian(24, 7);
        let (vals, vecs) = eigh(&a, 1e-10).unwrap();
        for w in vals.windows(2) {
            assert!(w[0] <= w[1] + 1e-14, "unsorted: {w:?}");
        }
        // A = V Λ V†
        let mut scaled = vecs.clone();
        for (c, &lam) in vals.iter().enumerate() {
            for r in 0..24 {
                scaled[[r, c]] *= Complex64::new(lam, 0.0);
            }
        }
        let rebuilt = scaled.dot(&adjoint(&vecs));
        let err = (&rebuilt - &a).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "reconstruction error {err}");
        // V is unitary.
        let gram = adjoint(&vecs).dot(&vecs);
        let id_err = (&gram - &identity(24))
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        assert!(id_err < 1e-11, "orthonormality defect {id_err}");
    }

    #[test]
    fn eigh_known_two_by_two() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let mut a = Array2::zeros((2, 2));
        a[[0, 0]] = Complex64::new(2.0, 0.0);
        a[[0, 1]] = Complex64::new(0.0, 1.0);
        a[[1, 0]] = Complex64::new(0.0, -1.0);
        a[[1, 1]] = Complex64::new(2.0, 0.0);
        let (vals, _) = eigh(&a, 1e-12).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut a = Array2::zeros((2, 2));
        a[[0, 1]] = Complex64::new(1.0, 0.0);
        assert!(matches!(eigh(&a, 1e-10), Err(CalcError::NotHermitian(_))));
    }

    #[test]
    fn op_norm_matches_hermitian_extremes() {
        let a = random_hermitian(16, 3);
        let (vals, _) = eigh(&a, 1e-10).unwrap();
        let lam_max = vals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        assert!((op_norm(&a) - lam_max).abs() < 1e-10);
    }

    #[test]
    fn solve_and_inverse_agree() {
        let a = random_hermitian(12, 11) + &(identity(12).mapv(|v| v * 5.0));
        let b = random_hermitian(12, 13);
        let x = solve(&a, &b).unwrap();
        let residual = op_norm(&(&a.dot(&x) - &b));
        assert!(residual < 1e-10, "residual {residual}");
        let inv = inverse(&a).unwrap();
        let x2 = inv.dot(&b);
        assert!(op_norm(&(&x - &x2)) < 1e-9);
    }

    #[test]
    fn function_calculus_squares() {
        let a = random_hermitian(10, 17);
        let sq = func_of_hermitian(&a, 1e-10, |l| Complex64::new(l * l, 0.0)).unwrap();
        let direct = a.dot(&a);
        assert!(op_norm(&(&sq - &direct)) < 1e-11);
    }

    #[test]
    fn singular_values_descend_and_match_norm() {
        let a = random_hermitian(9, 23);
        let sv = singular_values(&a);
        for w in sv.windows(2) {
            assert!(w[0] >= w[1] - 1e-14);
        }
        assert!((sv[0] - op_norm(&a)).abs() < 1e-12);
    }
}
