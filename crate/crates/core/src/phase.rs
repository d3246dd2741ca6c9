use crate::error::{CalcError, Result};
use serde::{Deserialize, Serialize};

/// A point X = (x, ξ) of phase space Ξ = R^n × R^n.
///
/// `x` and `xi` always have the same length n; constructors enforce this and
/// reject non-finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, xi: Vec<f64>) -> Result<Self> {
        if x.len() != xi.len() || x.is_empty() {
            return Err(CalcError::DimensionMismatch(format!(
                "phase point needs matching non-empty components, got x: {}, xi: {}",
                x.len(),
                xi.len()
            )));
        }
        if x.iter().chain(xi.iter()).any(|v| !v.is_finite()) {
            return Err(CalcError::NonFinite("phase point coordinate".into()));
        }
        Ok(Self { x, xi })
    }

    /// 1-dimensional convenience constructor.
    pub fn d1(x: f64, xi: f64) -> Self {
        Self::new(vec![x], vec![xi]).expect("finite 1-d phase point")
    }

    /// 2-dimensional convenience constructor.
    pub fn d2(x: [f64; 2], xi: [f64; 2]) -> Self {
        Self::new(x.to_vec(), xi.to_vec()).expect("finite 2-d phase point")
    }

    pub fn zero(n: usize) -> Self {
        Self {
            x: vec![0.0; n],
            xi: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Euclidean norm |X| on Ξ ≃ R^{2n}.
    pub fn norm(&self) -> f64 {
        self.x
            .iter()
            .chain(self.xi.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn neg(&self) -> Self {
        Self {
            x: self.x.iter().map(|v| -v).collect(),
            xi: self.xi.iter().map(|v| -v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_dim(self, other)?;
        Ok(Self {
            x: self
                .x
                .iter()
                .zip(&other.x)
                .map(|(a, b)| a + b)
                .collect(),
            xi: self
                .xi
                .iter()
                .zip(&other.xi)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            x: self.x.iter().map(|v| s * v).collect(),
            xi: self.xi.iter().map(|v| s * v).collect(),
        }
    }
}

fn check_same_dim(a: &PhasePoint, b: &PhasePoint) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(CalcError::DimensionMismatch(format!(
            "phase points of dimension {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// The symplectic form [[X, Y]] = y·ξ − x·η for X = (x, ξ), Y = (y, η).
///
/// This is the bilinear form governing the commutation phase of the
/// Heisenberg translations: W(X)W(Y) = e^{i[[X,Y]]/2} W(X+Y).
pub fn symplectic_form(a: &PhasePoint, b: &PhasePoint) -> Result<f64> {
    check_same_dim(a, b)?;
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| p * q).sum::<f64>();
    Ok(dot(&b.x, &a.xi) - dot(&a.x, &b.xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn form_on_unit_vectors() {
        // X = (1, 0), Y = (0, 1): [[X,Y]] = y·ξ − x·η = 0 − 1 = −1.
        let x = PhasePoint::d1(1.0, 0.0);
        let y = PhasePoint::d1(0.0, 1.0);
        assert_eq!(symplectic_form(&x, &y).unwrap(), -1.0);
        assert_eq!(symplectic_form(&y, &x).unwrap(), 1.0);
    }

    #[test]
    fn rejects_mismatched_dims() {
        let a = PhasePoint::d1(1.0, 2.0);
        let b = PhasePoint::d2([0.0, 1.0], [1.0, 0.0]);
        assert!(symplectic_form(&a, &b).is_err());
        assert!(PhasePoint::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(PhasePoint::new(vec![f64::NAN], vec![0.0]).is_err());
    }

    proptest! {
        #[test]
        fn antisymmetry(coords in proptest::collection::vec(-1e3f64..1e3, 4)) {
            let a = PhasePoint::d1(coords[0], coords[1]);
            let b = PhasePoint::d1(coords[2], coords[3]);
            let ab = symplectic_form(&a, &b).unwrap();
            let ba = symplectic_form(&b, &a).unwrap();
            prop_assert!((ab + ba).abs() <= 1e-9 * (1.0 + ab.abs()));
        }

        #[test]
        fn antisymmetry_2d(coords in proptest::collection::vec(-1e3f64..1e3, 8)) {
            let a = PhasePoint::d2([coords[0], coords[1]], [coords[2], coords[3]]);
            let b = PhasePoint::d2([coords[4], coords[5]], [coords[6], coords[7]]);
            let ab = symplectic_form(&a, &b).unwrap();
            let ba = symplectic_form(&b, &a).unwrap();
            prop_assert!((ab + ba).abs() <= 1e-9 * (1.0 + ab.abs()));
        }

        #[test]
        fn bilinearity_in_first_slot(coords in proptest::collection::vec(-1e2f64..1e2, 6), s in -10.0f64..10.0) {
            let a = PhasePoint::d1(coords[0], coords[1]);
            let b = PhasePoint::d1(coords[2], coords[3]);
            let c = PhasePoint::d1(coords[4], coords[5]);
            let lhs = symplectic_form(&a.scale(s).add(&b).unwrap(), &c).unwrap();
            let rhs = s * symplectic_form(&a, &c).unwrap() + symplectic_form(&b, &c).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-7 * (1.0 + lhs.abs()));
        }
    }
}
