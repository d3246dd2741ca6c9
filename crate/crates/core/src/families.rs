use crate::error::{CalcError, Result};
use crate::symbol::{EvalFn, PartialFn, SymbolClass, SymbolProvider, StructureTag};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Which half of phase space a coordinate lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordSpace {
    X,
    Xi,
}

/// A single phase coordinate: axis `axis` of the position or momentum block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordRef {
    pub space: CoordSpace,
    pub axis: usize,
}

impl CoordRef {
    pub fn x(axis: usize) -> Self {
        Self {
            space: CoordSpace::X,
            axis,
        }
    }

    pub fn xi(axis: usize) -> Self {
        Self {
            space: CoordSpace::Xi,
            axis,
        }
    }

    fn value(&self, x: &[f64], xi: &[f64]) -> f64 {
        match self.space {
            CoordSpace::X => x[self.axis],
            CoordSpace::Xi => xi[self.axis],
        }
    }

    /// Flat index into the (x_1..x_n, ξ_1..ξ_n) coordinate list.
    fn flat(&self, n: usize) -> usize {
        match self.space {
            CoordSpace::X => self.axis,
            CoordSpace::Xi => n + self.axis,
        }
    }
}

/// One monomial coeff · Π x_i^{p_i} · Π ξ_i^{q_i}; shorter power lists are
/// padded with zeros.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyTerm {
    pub coeff: f64,
    #[serde(default)]
    pub x_powers: Vec<u32>,
    #[serde(default)]
    pub xi_powers: Vec<u32>,
}

/// Declarative, serializable symbol expressions with exact derivatives.
///
/// Every constructor that appears in the verification corpus is expressible
/// here, so runs driven by configuration files evaluate the same functions
/// as the in-code tests, with analytic first partials throughout.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "form")]
pub enum SymbolForm {
    Constant {
        value: f64,
    },
    Polynomial {
        terms: Vec<PolyTerm>,
    },
    /// amplitude · exp(−(|x−c_x|² + |ξ−c_ξ|²)/width²)
    Gaussian {
        amplitude: f64,
        #[serde(default)]
        x_center: Vec<f64>,
        #[serde(default)]
        xi_center: Vec<f64>,
        width: f64,
    },
    /// tanh(z/scale) in one coordinate.
    TanhStep {
        coord: CoordRef,
        scale: f64,
    },
    /// sin(frequency·z) or, with `of_square`, sin(frequency·z²).
    Sinusoid {
        coord: CoordRef,
        frequency: f64,
        #[serde(default)]
        of_square: bool,
    },
    /// exp(Σ s_i x_i + Σ t_i ξ_i)
    ExpLinear {
        #[serde(default)]
        x_slopes: Vec<f64>,
        #[serde(default)]
        xi_slopes: Vec<f64>,
    },
    /// (1 + z²)^{exponent/2}, the Japanese-bracket weight ⟨z⟩^exponent.
    BracketPower {
        coord: CoordRef,
        exponent: f64,
    },
    /// 1 / (1 + (z/scale)²)
    InverseQuadratic {
        coord: CoordRef,
        scale: f64,
    },
    Sum {
        terms: Vec<SymbolForm>,
    },
    Product {
        factors: Vec<SymbolForm>,
    },
    Scaled {
        factor: f64,
        inner: Box<SymbolForm>,
    },
}

impl SymbolForm {
    pub fn eval(&self, x: &[f64], xi: &[f64]) -> f64 {
        match self {
            SymbolForm::Constant { value } => *value,
            SymbolForm::Polynomial { terms } => terms
                .iter()
                .map(|t| {
                    let mut v = t.coeff;
                    for (i, &p) in t.x_powers.iter().enumerate() {
                        v *= x[i].powi(p as i32);
                    }
                    for (i, &q) in t.xi_powers.iter().enumerate() {
                        v *= xi[i].powi(q as i32);
                    }
                    v
                })
                .sum(),
            SymbolForm::Gaussian {
                amplitude,
                x_center,
                xi_center,
                width,
            } => {
                let mut s = 0.0;
                for (i, &v) in x.iter().enumerate() {
                    let c = x_center.get(i).copied().unwrap_or(0.0);
                    s += (v - c) * (v - c);
                }
                for (i, &v) in xi.iter().enumerate() {
                    let c = xi_center.get(i).copied().unwrap_or(0.0);
                    s += (v - c) * (v - c);
                }
                amplitude * (-s / (width * width)).exp()
            }
            SymbolForm::TanhStep { coord, scale } => (coord.value(x, xi) / scale).tanh(),
            SymbolForm::Sinusoid {
                coord,
                frequency,
                of_square,
            } => {
                let z = coord.value(x, xi);
                if *of_square {
                    (frequency * z * z).sin()
                } else {
                    (frequency * z).sin()
                }
            }
            SymbolForm::ExpLinear { x_slopes, xi_slopes } => {
                let mut s = 0.0;
                for (i, &v) in x.iter().enumerate() {
                    s += x_slopes.get(i).copied().unwrap_or(0.0) * v;
                }
                for (i, &v) in xi.iter().enumerate() {
                    s += xi_slopes.get(i).copied().unwrap_or(0.0) * v;
                }
                s.exp()
            }
            SymbolForm::BracketPower { coord, exponent } => {
                let z = coord.value(x, xi);
                (1.0 + z * z).powf(exponent / 2.0)
            }
            SymbolForm::InverseQuadratic { coord, scale } => {
                let z = coord.value(x, xi) / scale;
                1.0 / (1.0 + z * z)
            }
            SymbolForm::Sum { terms } => terms.iter().map(|t| t.eval(x, xi)).sum(),
            SymbolForm::Product { factors } => {
                factors.iter().map(|f| f.eval(x, xi)).product()
            }
            SymbolForm::Scaled { factor, inner } => factor * inner.eval(x, xi),
        }
    }

    /// Exact ∂/∂z_k with k indexing (x_1..x_n, ξ_1..ξ_n); `n` is the spatial
    /// dimension.
    pub fn partial(&self, x: &[f64], xi: &[f64], k: usize, n: usize) -> f64 {
        match self {
            SymbolForm::Constant { .. } => 0.0,
            SymbolForm::Polynomial { terms } => terms
                .iter()
                .map(|t| {
                    let (idx, in_x) = if k < n { (k, true) } else { (k - n, false) };
                    let powers = if in_x { &t.x_powers } else { &t.xi_powers };
                    let p = powers.get(idx).copied().unwrap_or(0);
                    if p == 0 {
                        return 0.0;
                    }
                    let coord = if in_x { x[idx] } else { xi[idx] };
                    let mut v = t.coeff * p as f64 * coord.powi(p as i32 - 1);
                    for (i, &q) in t.x_powers.iter().enumerate() {
                        if !(in_x && i == idx) {
                            v *= x[i].powi(q as i32);
                        }
                    }
                    for (i, &q) in t.xi_powers.iter().enumerate() {
                        if !(!in_x && i == idx) {
                            v *= xi[i].powi(q as i32);
                        }
                    }
                    v
                })
                .sum(),
            SymbolForm::Gaussian {
                x_center,
                xi_center,
                width,
                ..
            } => {
                let val = self.eval(x, xi);
                let (z, c) = if k < n {
                    (x[k], x_center.get(k).copied().unwrap_or(0.0))
                } else {
                    (xi[k - n], xi_center.get(k - n).copied().unwrap_or(0.0))
                };
                -2.0 * (z - c) / (width * width) * val
            }
            SymbolForm::TanhStep { coord, scale } => {
                if coord.flat(n) != k {
                    return 0.0;
                }
                let t = (coord.value(x, xi) / scale).tanh();
                (1.0 - t * t) / scale
            }
            SymbolForm::Sinusoid {
                coord,
                frequency,
                of_square,
            } => {
                if coord.flat(n) != k {
                    return 0.0;
                }
                let z = coord.value(x, xi);
                if *of_square {
                    2.0 * frequency * z * (frequency * z * z).cos()
                } else {
                    frequency * (frequency * z).cos()
                }
            }
            SymbolForm::ExpLinear { x_slopes, xi_slopes } => {
                let slope = if k < n {
                    x_slopes.get(k).copied().unwrap_or(0.0)
                } else {
                    xi_slopes.get(k - n).copied().unwrap_or(0.0)
                };
                slope * self.eval(x, xi)
            }
            SymbolForm::BracketPower { coord, exponent } => {
                if coord.flat(n) != k {
                    return 0.0;
                }
                let z = coord.value(x, xi);
                exponent * z * (1.0 + z * z).powf(exponent / 2.0 - 1.0)
            }
            SymbolForm::InverseQuadratic { coord, scale } => {
                if coord.flat(n) != k {
                    return 0.0;
                }
                let z = coord.value(x, xi) / scale;
                let val = 1.0 / (1.0 + z * z);
                -2.0 * z / scale * val * val
            }
            SymbolForm::Sum { terms } => terms.iter().map(|t| t.partial(x, xi, k, n)).sum(),
            SymbolForm::Product { factors } => {
                let vals: Vec<f64> = factors.iter().map(|f| f.eval(x, xi)).collect();
                factors
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        let mut v = f.partial(x, xi, k, n);
                        for (j, &fv) in vals.iter().enumerate() {
                            if j != i {
                                v *= fv;
                            }
                        }
                        v
                    })
                    .sum()
            }
            SymbolForm::Scaled { factor, inner } => factor * inner.partial(x, xi, k, n),
        }
    }

    /// (uses any x coordinate, uses any ξ coordinate)
    pub fn coordinate_usage(&self) -> (bool, bool) {
        match self {
            SymbolForm::Constant { .. } => (false, false),
            SymbolForm::Polynomial { terms } => {
                let ux = terms.iter().any(|t| t.x_powers.iter().any(|&p| p > 0));
                let uxi = terms.iter().any(|t| t.xi_powers.iter().any(|&p| p > 0));
                (ux, uxi)
            }
            SymbolForm::Gaussian { .. } => (true, true),
            SymbolForm::TanhStep { coord, .. }
            | SymbolForm::Sinusoid { coord, .. }
            | SymbolForm::BracketPower { coord, .. }
            | SymbolForm::InverseQuadratic { coord, .. } => match coord.space {
                CoordSpace::X => (true, false),
                CoordSpace::Xi => (false, true),
            },
            SymbolForm::ExpLinear { x_slopes, xi_slopes } => (
                x_slopes.iter().any(|&s| s != 0.0),
                xi_slopes.iter().any(|&s| s != 0.0),
            ),
            SymbolForm::Sum { terms } => terms.iter().fold((false, false), |acc, t| {
                let u = t.coordinate_usage();
                (acc.0 || u.0, acc.1 || u.1)
            }),
            SymbolForm::Product { factors } => factors.iter().fold((false, false), |acc, t| {
                let u = t.coordinate_usage();
                (acc.0 || u.0, acc.1 || u.1)
            }),
            SymbolForm::Scaled { inner, .. } => inner.coordinate_usage(),
        }
    }

    /// Largest coordinate axis referenced, for dimension validation.
    fn max_axis(&self) -> usize {
        match self {
            SymbolForm::Constant { .. } => 0,
            SymbolForm::Polynomial { terms } => terms
                .iter()
                .map(|t| t.x_powers.len().max(t.xi_powers.len()).saturating_sub(1))
                .max()
                .unwrap_or(0),
            SymbolForm::Gaussian {
                x_center, xi_center, ..
            } => x_center.len().max(xi_center.len()).saturating_sub(1),
            SymbolForm::TanhStep { coord, .. }
            | SymbolForm::Sinusoid { coord, .. }
            | SymbolForm::BracketPower { coord, .. }
            | SymbolForm::InverseQuadratic { coord, .. } => coord.axis,
            SymbolForm::ExpLinear { x_slopes, xi_slopes } => {
                x_slopes.len().max(xi_slopes.len()).saturating_sub(1)
            }
            SymbolForm::Sum { terms } => terms.iter().map(|t| t.max_axis()).max().unwrap_or(0),
            SymbolForm::Product { factors } => {
                factors.iter().map(|t| t.max_axis()).max().unwrap_or(0)
            }
            SymbolForm::Scaled { inner, .. } => inner.max_axis(),
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.max_axis() >= dim {
            return Err(CalcError::Config(format!(
                "symbol references axis {} but dimension is {dim}",
                self.max_axis()
            )));
        }
        match self {
            SymbolForm::Gaussian { width, .. } if *width <= 0.0 => Err(CalcError::Config(
                "gaussian width must be positive".into(),
            )),
            SymbolForm::TanhStep { scale, .. } | SymbolForm::InverseQuadratic { scale, .. }
                if *scale <= 0.0 =>
            {
                Err(CalcError::Config("scale must be positive".into()))
            }
            SymbolForm::Sum { terms } => terms.iter().try_for_each(|t| t.validate(dim)),
            SymbolForm::Product { factors } => {
                factors.iter().try_for_each(|t| t.validate(dim))
            }
            SymbolForm::Scaled { inner, .. } => inner.validate(dim),
            _ => Ok(()),
        }
    }
}

/// A named symbol definition: expression plus declared class and structure.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolEntry {
    pub name: String,
    pub dim: usize,
    pub class: SymbolClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureTag>,
    pub form: SymbolForm,
}

impl SymbolEntry {
    pub fn build(&self) -> Result<SymbolProvider> {
        if self.dim == 0 || self.dim > 4 {
            return Err(CalcError::Config(format!(
                "symbol '{}': dimension {} outside supported range 1..=4",
                self.name, self.dim
            )));
        }
        self.form.validate(self.dim)?;
        let (uses_x, uses_xi) = self.form.coordinate_usage();
        match self.structure {
            Some(StructureTag::Multiplication) if uses_xi => {
                return Err(CalcError::Config(format!(
                    "symbol '{}' is tagged multiplication but depends on ξ",
                    self.name
                )));
            }
            Some(StructureTag::FourierMultiplier) if uses_x => {
                return Err(CalcError::Config(format!(
                    "symbol '{}' is tagged fourier_multiplier but depends on x",
                    self.name
                )));
            }
            _ => {}
        }
        let n = self.dim;
        let form = self.form.clone();
        let eval: EvalFn = Arc::new(move |x: &[f64], xi: &[f64]| {
            Complex64::new(form.eval(x, xi), 0.0)
        });
        let form2 = self.form.clone();
        let partial: PartialFn = Arc::new(move |x: &[f64], xi: &[f64], k: usize| {
            Complex64::new(form2.partial(x, xi, k, n), 0.0)
        });
        let mut p = SymbolProvider::new(self.name.clone(), n, self.class, eval)
            .with_partials(partial);
        if let Some(tag) = self.structure {
            p = p.with_structure(tag);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::PhasePoint;
    use proptest::prelude::*;

    fn entry(form: SymbolForm) -> SymbolEntry {
        SymbolEntry {
            name: "test".into(),
            dim: 1,
            class: SymbolClass::SmoothBoundedDerivatives,
            structure: None,
            form,
        }
    }

    #[test]
    fn polynomial_eval_and_partial() {
        // 3 x² ξ  →  ∂_x = 6xξ, ∂_ξ = 3x²
        let form = SymbolForm::Polynomial {
            terms: vec![PolyTerm {
                coeff: 3.0,
                x_powers: vec![2],
                xi_powers: vec![1],
            }],
        };
        let (x, xi) = ([2.0], [5.0]);
        assert!((form.eval(&x, &xi) - 60.0).abs() < 1e-12);
        assert!((form.partial(&x, &xi, 0, 1) - 60.0).abs() < 1e-12);
        assert!((form.partial(&x, &xi, 1, 1) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn structure_tag_validation() {
        let mut e = entry(SymbolForm::TanhStep {
            coord: CoordRef::x(0),
            scale: 1.0,
        });
        e.structure = Some(StructureTag::FourierMultiplier);
        assert!(e.build().is_err());
        e.structure = Some(StructureTag::Multiplication);
        assert!(e.build().is_ok());
    }

    #[test]
    fn serde_round_trip() {
        let e = SymbolEntry {
            name: "oscillator".into(),
            dim: 1,
            class: SymbolClass::UnboundedAffiliationCandidate,
            structure: Some(StructureTag::Weyl),
            form: SymbolForm::Polynomial {
                terms: vec![
                    PolyTerm {
                        coeff: 1.0,
                        x_powers: vec![2],
                        xi_powers: vec![],
                    },
                    PolyTerm {
                        coeff: 1.0,
                        x_powers: vec![],
                        xi_powers: vec![2],
                    },
                ],
            },
        };
        let json = serde_json::to_string(&e).unwrap();
        let back: SymbolEntry = serde_json::from_str(&json).unwrap();
        let p = back.build().unwrap();
        let v = p.eval(&PhasePoint::d1(2.0, 3.0)).unwrap();
        assert!((v.re - 13.0).abs() < 1e-12);
    }

    fn forms_for_prop() -> Vec<SymbolForm> {
        vec![
            SymbolForm::Gaussian {
                amplitude: 1.7,
                x_center: vec![0.3],
                xi_center: vec![-0.2],
                width: 1.4,
            },
            SymbolForm::TanhStep {
                coord: CoordRef::x(0),
                scale: 0.8,
            },
            SymbolForm::Sinusoid {
                coord: CoordRef::xi(0),
                frequency: 1.0,
                of_square: true,
            },
            SymbolForm::ExpLinear {
                x_slopes: vec![0.0],
                xi_slopes: vec![0.5],
            },
            SymbolForm::BracketPower {
                coord: CoordRef::xi(0),
                exponent: 1.0,
            },
            SymbolForm::InverseQuadratic {
                coord: CoordRef::x(0),
                scale: 1.0,
            },
            SymbolForm::Product {
                factors: vec![
                    SymbolForm::Gaussian {
                        amplitude: 1.0,
                        x_center: vec![],
                        xi_center: vec![],
                        width: 2.0,
                    },
                    SymbolForm::Sinusoid {
                        coord: CoordRef::x(0),
                        frequency: 2.0,
                        of_square: false,
                    },
                ],
            },
            SymbolForm::Sum {
                terms: vec![
                    SymbolForm::Polynomial {
                        terms: vec![PolyTerm {
                            coeff: 1.0,
                            x_powers: vec![],
                            xi_powers: vec![2],
                        }],
                    },
                    SymbolForm::TanhStep {
                        coord: CoordRef::x(0),
                        scale: 1.0,
                    },
                ],
            },
        ]
    }

    proptest! {
        /// Analytic partials agree with central differences everywhere.
        #[test]
        fn partials_match_finite_differences(
            which in 0usize..8,
            x in -3.0f64..3.0,
            xi in -3.0f64..3.0,
            k in 0usize..2,
        ) {
            let form = forms_for_prop()[which].clone();
            let h = 1e-5;
            let analytic = form.partial(&[x], &[xi], k, 1);
            let (fp, fm) = if k == 0 {
                (form.eval(&[x + h], &[xi]), form.eval(&[x - h], &[xi]))
            } else {
                (form.eval(&[x], &[xi + h]), form.eval(&[x], &[xi - h]))
            };
            let fd = (fp - fm) / (2.0 * h);
            let scale = 1.0 + analytic.abs().max(fd.abs());
            prop_assert!(
                (analytic - fd).abs() / scale < 1e-6,
                "form {which}: analytic {analytic} vs fd {fd}"
            );
        }
    }
}
