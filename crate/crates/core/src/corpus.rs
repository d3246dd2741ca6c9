//! The shipped reference catalogue: a fixed table of named symbols and
//! coefficient fields together with the classifications the toolkit is
//! expected to produce for them.
//!
//! Expectations are closed-form facts about each entry — essential ranges,
//! eigenvalues, the decay pattern behind an ideal membership — rather than
//! recorded outputs, so the consistency suites that iterate the table are
//! genuine cross-checks, and the command-line catalogue can print where
//! every expectation comes from.

use crate::affiliate::Verdict;
use crate::divform::{CoefficientField, NogoStatus};
use crate::symbol::{StructureTag, SymbolClass, SymbolProvider};
use num_complex::Complex64;
use serde::Serialize;
use std::sync::Arc;

/// Closed-form description of an entry's essential spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SpectrumOracle {
    /// The closed interval [lo, hi].
    Band { lo: f64, hi: f64 },
    /// The half line [lo, ∞).
    HalfLine { lo: f64 },
    /// The whole real line.
    FullLine,
    /// Purely discrete spectrum (empty essential part); the lowest
    /// eigenvalues in ascending order.
    Discrete { lowest: &'static [f64] },
}

/// The gate that settles affiliation for an entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AffiliationRoute {
    /// Translation-modulus norm continuity of the symbol.
    NormContinuity,
    /// Resolvent-difference modulus for momentum multipliers.
    FourierModulus,
    /// Derivative-to-weight ratio for one-sided weights.
    WeightBound,
}

/// Expected outcome of the canonical affiliation gate for an entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffiliationExpectation {
    pub route: AffiliationRoute,
    /// Half-width of the sampling range handed to the gate.
    pub radius: f64,
    pub verdict: Verdict,
}

/// One catalogue entry: a symbol, its declared structure, and every
/// classification the suites expect of it.
#[derive(Clone, Serialize)]
pub struct SymbolEntry {
    pub name: &'static str,
    pub formula: &'static str,
    pub structure: StructureTag,
    pub class: SymbolClass,
    /// Bounded entries run through the quantized compactness sweep;
    /// unbounded ones are affiliation candidates.
    pub bounded: bool,
    /// Smooth with bounded derivatives: eligible for the star-homomorphism
    /// and translation-equicontinuity sweeps.
    pub smooth: bool,
    /// Rapidly decaying in every phase variable: the trace and
    /// Hilbert–Schmidt identities apply.
    pub schwartz: bool,
    /// Verdict of the translation-family compactness test, where it applies.
    pub expect_compact: Option<bool>,
    /// Membership in the ideal killed by configuration translations.
    pub expect_e: Option<bool>,
    /// Membership in the ideal killed by momentum translations.
    pub expect_f: Option<bool>,
    pub affiliation: Option<AffiliationExpectation>,
    pub oracle: Option<SpectrumOracle>,
    /// Where the expectations come from.
    pub source: &'static str,
    #[serde(skip)]
    make: fn() -> SymbolProvider,
}

impl std::fmt::Debug for SymbolEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymbolEntry")
            .field("name", &self.name)
            .field("formula", &self.formula)
            .field("structure", &self.structure)
            .finish()
    }
}

impl SymbolEntry {
    /// Build a fresh provider for this entry.
    pub fn provider(&self) -> SymbolProvider {
        (self.make)()
    }
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn const_one() -> SymbolProvider {
    SymbolProvider::new(
        "const_one",
        1,
        SymbolClass::SmoothBoundedDerivatives,
        Arc::new(|_: &[f64], _: &[f64]| re(1.0)),
    )
    .with_partials(Arc::new(|_: &[f64], _: &[f64], _| re(0.0)))
    .with_structure(StructureTag::Multiplication)
}

fn gaussian_phase() -> SymbolProvider {
    SymbolProvider::new(
        "gaussian_phase",
        1,
        SymbolClass::VanishingAtInfinity,
        Arc::new(|x: &[f64], xi: &[f64]| re((-x[0] * x[0] - xi[0] * xi[0]).exp())),
    )
    .with_partials(Arc::new(|x: &[f64], xi: &[f64], k| {
        let f = (-x[0] * x[0] - xi[0] * xi[0]).exp();
        let z = if k == 0 { x[0] } else { xi[0] };
        re(-2.0 * z * f)
    }))
    .with_structure(StructureTag::Weyl)
}

fn gaussian_position() -> SymbolProvider {
    SymbolProvider::new(
        "gaussian_position",
        1,
        SymbolClass::VanishingAtInfinity,
        Arc::new(|x: &[f64], _: &[f64]| re((-x[0] * x[0]).exp())),
    )
    .with_partials(Arc::new(|x: &[f64], _: &[f64], k| {
        if k == 0 {
            re(-2.0 * x[0] * (-x[0] * x[0]).exp())
        } else {
            re(0.0)
        }
    }))
    .with_structure(StructureTag::Multiplication)
}

fn gaussian_momentum() -> SymbolProvider {
    SymbolProvider::new(
        "gaussian_momentum",
        1,
        SymbolClass::VanishingAtInfinity,
        Arc::new(|_: &[f64], xi: &[f64]| re((-xi[0] * xi[0]).exp())),
    )
    .with_partials(Arc::new(|_: &[f64], xi: &[f64], k| {
        if k == 1 {
            re(-2.0 * xi[0] * (-xi[0] * xi[0]).exp())
        } else {
            re(0.0)
        }
    }))
    .with_structure(StructureTag::FourierMultiplier)
}

fn tanh_position() -> SymbolProvider {
    SymbolProvider::new(
        "tanh_position",
        1,
        SymbolClass::BoundedUniformlyContinuous,
        Arc::new(|x: &[f64], _: &[f64]| re(x[0].tanh())),
    )
    .with_partials(Arc::new(|x: &[f64], _: &[f64], k| {
        if k == 0 {
            let t = x[0].tanh();
            re(1.0 - t * t)
        } else {
            re(0.0)
        }
    }))
    .with_structure(StructureTag::Multiplication)
}

fn sin_position() -> SymbolProvider {
    SymbolProvider::new(
        "sin_position",
        1,
        SymbolClass::SmoothBoundedDerivatives,
        Arc::new(|x: &[f64], _: &[f64]| re(x[0].sin())),
    )
    .with_partials(Arc::new(|x: &[f64], _: &[f64], k| {
        if k == 0 {
            re(x[0].cos())
        } else {
            re(0.0)
        }
    }))
    .with_structure(StructureTag::Multiplication)
}

fn lorentz_position() -> SymbolProvider {
    SymbolProvider::new(
        "lorentz_position",
        1,
        SymbolClass::VanishingAtInfinity,
        Arc::new(|x: &[f64], _: &[f64]| re(1.0 / (1.0 + x[0] * x[0]))),
    )
    .with_partials(Arc::new(|x: &[f64], _: &[f64], k| {
        if k == 0 {
            let d = 1.0 + x[0] * x[0];
            re(-2.0 * x[0] / (d * d))
        } else {
            re(0.0)
        }
    }))
    .with_structure(StructureTag::Multiplication)
}

fn sin_momentum_sq() -> SymbolProvider {
    SymbolProvider::new(
        "sin_momentum_sq",
        1,
        SymbolClass::BoundedUniformlyContinuous,
        Arc::new(|_: &[f64], xi: &[f64]| re((xi[0] * xi[0]).sin())),
    )
    .with_partials(Arc::new(|_: &[f64], xi: &[f64], k| {
        if k == 1 {
            re(2.0 * xi[0] * (xi[0] * xi[0]).cos())
        } else {
            re(0.0)
        }
    }))
    .with_structure(StructureTag::FourierMultiplier)
}

fn product_mixed() -> SymbolProvider {
    SymbolProvider::new(
        "product_mixed",
        1,
        SymbolClass::SmoothBoundedDerivatives,
        Arc::new(|x: &[f64], xi: &[f64]| re(x[0].tanh() * xi[0].sin())),
    )
    .with_partials(Arc::new(|x: &[f64], xi: &[f64], k| {
        let t = x[0].tanh();
        if k == 0 {
            re((1.0 - t * t) * xi[0].sin())
        } else {
            re(t * xi[0].cos())
        }
    }))
    .with_structure(StructureTag::Weyl)
}

fn kinetic() -> SymbolProvider {
    SymbolProvider::new(
        "kinetic",
        1,
        SymbolClass::UnboundedAffiliationCandidate,
        Arc::new(|_: &[f64], xi: &[f64]| re(xi[0] * xi[0])),
    )
    .with_partials(Arc::new(|_: &[f64], xi: &[f64], k| {
        if k == 1 {
            re(2.0 * xi[0])
        } else {
            re(0.0)
        }
    }))
    .with_structure(StructureTag::FourierMultiplier)
}

fn kinetic_plus_tanh() -> SymbolProvider {
    SymbolProvider::new(
        "kinetic_plus_tanh",
        1,
        SymbolClass::UnboundedAffiliationCandidate,
        Arc::new(|x: &[f64], xi: &[f64]| re(xi[0] * xi[0] + x[0].tanh())),
    )
    .with_partials(Arc::new(|x: &[f64], xi: &[f64], k| {
        if k == 0 {
            let t = x[0].tanh();
            re(1.0 - t * t)
        } else {
            re(2.0 * xi[0])
        }
    }))
    .with_structure(StructureTag::Weyl)
}

fn exp_momentum() -> SymbolProvider {
    SymbolProvider::new(
        "exp_momentum",
        1,
        SymbolClass::UnboundedAffiliationCandidate,
        Arc::new(|_: &[f64], xi: &[f64]| re(xi[0].exp())),
    )
    .with_partials(Arc::new(|_: &[f64], xi: &[f64], k| {
        if k == 1 {
            re(xi[0].exp())
        } else {
            re(0.0)
        }
    }))
    .with_structure(StructureTag::FourierMultiplier)
}

fn bracket_momentum() -> SymbolProvider {
    SymbolProvider::new(
        "bracket_momentum",
        1,
        SymbolClass::UnboundedAffiliationCandidate,
        Arc::new(|_: &[f64], xi: &[f64]| re((1.0 + xi[0] * xi[0]).sqrt())),
    )
    .with_partials(Arc::new(|_: &[f64], xi: &[f64], k| {
        if k == 1 {
            re(xi[0] / (1.0 + xi[0] * xi[0]).sqrt())
        } else {
            re(0.0)
        }
    }))
    .with_structure(StructureTag::FourierMultiplier)
}

fn coordinate() -> SymbolProvider {
    SymbolProvider::new(
        "coordinate",
        1,
        SymbolClass::UnboundedAffiliationCandidate,
        Arc::new(|x: &[f64], _: &[f64]| re(x[0])),
    )
    .with_partials(Arc::new(|_: &[f64], _: &[f64], k| {
        if k == 0 {
            re(1.0)
        } else {
            re(0.0)
        }
    }))
    .with_structure(StructureTag::Multiplication)
}

fn harmonic() -> SymbolProvider {
    SymbolProvider::new(
        "harmonic",
        1,
        SymbolClass::UnboundedAffiliationCandidate,
        Arc::new(|x: &[f64], xi: &[f64]| re(x[0] * x[0] + xi[0] * xi[0])),
    )
    .with_partials(Arc::new(|x: &[f64], xi: &[f64], k| {
        if k == 0 {
            re(2.0 * x[0])
        } else {
            re(2.0 * xi[0])
        }
    }))
    .with_structure(StructureTag::Weyl)
}

const HARMONIC_EIGS: [f64; 8] = [1.0, 3.0, 5.0, 7.0, 9.0, 11.0, 13.0, 15.0];

/// The full symbol catalogue.
pub fn corpus() -> Vec<SymbolEntry> {
    vec![
        SymbolEntry {
            name: "const_one",
            formula: "1",
            structure: StructureTag::Multiplication,
            class: SymbolClass::SmoothBoundedDerivatives,
            bounded: true,
            smooth: true,
            schwartz: false,
            expect_compact: Some(false),
            expect_e: Some(false),
            expect_f: Some(false),
            affiliation: Some(AffiliationExpectation {
                route: AffiliationRoute::NormContinuity,
                radius: 100.0,
                verdict: Verdict::Affiliated,
            }),
            oracle: Some(SpectrumOracle::Band { lo: 1.0, hi: 1.0 }),
            source: "quantizes to the identity; a constant is its own essential range \
                     and decays in no direction",
            make: const_one,
        },
        SymbolEntry {
            name: "gaussian_phase",
            formula: "exp(-z^2 - eta^2)",
            structure: StructureTag::Weyl,
            class: SymbolClass::VanishingAtInfinity,
            bounded: true,
            smooth: true,
            schwartz: true,
            expect_compact: Some(true),
            expect_e: Some(true),
            expect_f: Some(true),
            affiliation: Some(AffiliationExpectation {
                route: AffiliationRoute::NormContinuity,
                radius: 1e3,
                verdict: Verdict::Affiliated,
            }),
            oracle: Some(SpectrumOracle::Band { lo: 0.0, hi: 0.0 }),
            source: "quantizes to half the ground-state projector: eigenvalues one half \
                     and zero, hence compact with essential spectrum {0}",
            make: gaussian_phase,
        },
        SymbolEntry {
            name: "gaussian_position",
            formula: "exp(-z^2)",
            structure: StructureTag::Multiplication,
            class: SymbolClass::VanishingAtInfinity,
            bounded: true,
            smooth: true,
            schwartz: false,
            expect_compact: Some(false),
            expect_e: Some(false),
            expect_f: Some(true),
            affiliation: Some(AffiliationExpectation {
                route: AffiliationRoute::NormContinuity,
                radius: 100.0,
                verdict: Verdict::Affiliated,
            }),
            oracle: Some(SpectrumOracle::Band { lo: 0.0, hi: 1.0 }),
            source: "multiplication by a positive bump: essential range [0, 1]; \
                     invariant under momentum translations, so never compact",
            make: gaussian_position,
        },
        SymbolEntry {
            name: "gaussian_momentum",
            formula: "exp(-eta^2)",
            structure: StructureTag::FourierMultiplier,
            class: SymbolClass::VanishingAtInfinity,
            bounded: true,
            smooth: true,
            schwartz: false,
            expect_compact: Some(false),
            expect_e: Some(true),
            expect_f: Some(false),
            affiliation: Some(AffiliationExpectation {
                route: AffiliationRoute::NormContinuity,
                radius: 100.0,
                verdict: Verdict::Affiliated,
            }),
            oracle: Some(SpectrumOracle::Band { lo: 0.0, hi: 1.0 }),
            source: "momentum multiplier decaying at infinity: essential range [0, 1]; \
                     invariant under configuration translations, so never compact",
            make: gaussian_momentum,
        },
        SymbolEntry {
            name: "tanh_position",
            formula: "tanh(z)",
            structure: StructureTag::Multiplication,
            class: SymbolClass::BoundedUniformlyContinuous,
            bounded: true,
            smooth: true,
            schwartz: false,
            expect_compact: Some(false),
            expect_e: Some(false),
            expect_f: Some(false),
            affiliation: Some(AffiliationExpectation {
                route: AffiliationRoute::NormContinuity,
                radius: 100.0,
                verdict: Verdict::Affiliated,
            }),
            oracle: Some(SpectrumOracle::Band { lo: -1.0, hi: 1.0 }),
            source: "essential range [-1, 1]; the two configuration limits are the \
                     constants -1 and +1",
            make: tanh_position,
        },
        SymbolEntry {
            name: "sin_position",
            formula: "sin(z)",
            structure: StructureTag::Multiplication,
            class: SymbolClass::SmoothBoundedDerivatives,
            bounded: true,
            smooth: true,
            schwartz: false,
            expect_compact: Some(false),
            expect_e: Some(false),
            expect_f: Some(false),
            affiliation: Some(AffiliationExpectation {
                route: AffiliationRoute::NormContinuity,
                radius: 100.0,
                verdict: Verdict::Affiliated,
            }),
            oracle: Some(SpectrumOracle::Band { lo: -1.0, hi: 1.0 }),
            source: "essential range [-1, 1]; configuration translates oscillate \
                     without converging to a limit",
            make: sin_position,
        },
        SymbolEntry {
            name: "lorentz_position",
            formula: "1/(1+z^2)",
            structure: StructureTag::Multiplication,
            class: SymbolClass::VanishingAtInfinity,
            bounded: true,
            smooth: true,
            schwartz: false,
            expect_compact: Some(false),
            expect_e: Some(false),
            expect_f: Some(true),
            affiliation: Some(AffiliationExpectation {
                route: AffiliationRoute::NormContinuity,
                radius: 100.0,
                verdict: Verdict::Affiliated,
            }),
            oracle: Some(SpectrumOracle::Band { lo: 0.0, hi: 1.0 }),
            source: "slowly decaying bump: essential range [0, 1]; decays in position \
                     but not in momentum",
            make: lorentz_position,
        },
        SymbolEntry {
            name: "sin_momentum_sq",
            formula: "sin(eta^2)",
            structure: StructureTag::FourierMultiplier,
            class: SymbolClass::BoundedUniformlyContinuous,
            bounded: true,
            smooth: false,
            schwartz: false,
            expect_compact: Some(false),
            expect_e: Some(false),
            expect_f: Some(false),
            affiliation: Some(AffiliationExpectation {
                route: AffiliationRoute::FourierModulus,
                radius: 1e3,
                verdict: Verdict::NotAffiliated,
            }),
            oracle: Some(SpectrumOracle::Band { lo: -1.0, hi: 1.0 }),
            source: "bounded multiplier oscillating ever faster: essential range \
                     [-1, 1], but the translation modulus stays above one tenth",
            make: sin_momentum_sq,
        },
        SymbolEntry {
            name: "product_mixed",
            formula: "tanh(z) sin(eta)",
            structure: StructureTag::Weyl,
            class: SymbolClass::SmoothBoundedDerivatives,
            bounded: true,
            smooth: true,
            schwartz: false,
            expect_compact: Some(false),
            expect_e: Some(false),
            expect_f: Some(false),
            affiliation: Some(AffiliationExpectation {
                route: AffiliationRoute::NormContinuity,
                radius: 100.0,
                verdict: Verdict::Affiliated,
            }),
            oracle: None,
            source: "product of a position kink and a momentum wave: smooth and \
                     bounded but decaying in neither slot",
            make: product_mixed,
        },
        SymbolEntry {
            name: "kinetic",
            formula: "eta^2",
            structure: StructureTag::FourierMultiplier,
            class: SymbolClass::UnboundedAffiliationCandidate,
            bounded: false,
            smooth: false,
            schwartz: false,
            expect_compact: None,
            expect_e: None,
            expect_f: None,
            affiliation: Some(AffiliationExpectation {
                route: AffiliationRoute::FourierModulus,
                radius: 60.0,
                verdict: Verdict::Affiliated,
            }),
            oracle: Some(SpectrumOracle::HalfLine { lo: 0.0 }),
            source: "free kinetic multiplier: half line [0, inf); the resolvent \
                     modulus decays linearly in the shift",
            make: kinetic,
        },
        SymbolEntry {
            name: "kinetic_plus_tanh",
            formula: "eta^2 + tanh(z)",
            structure: StructureTag::Weyl,
            class: SymbolClass::UnboundedAffiliationCandidate,
            bounded: false,
            smooth: false,
            schwartz: false,
            expect_compact: None,
            expect_e: None,
            expect_f: None,
            affiliation: None,
            oracle: Some(SpectrumOracle::HalfLine { lo: -1.0 }),
            source: "kinetic multiplier plus a bounded kink: the two configuration \
                     limits are eta^2 -/+ 1, whose union of spectra is [-1, inf)",
            make: kinetic_plus_tanh,
        },
        SymbolEntry {
            name: "exp_momentum",
            formula: "exp(eta)",
            structure: StructureTag::FourierMultiplier,
            class: SymbolClass::UnboundedAffiliationCandidate,
            bounded: false,
            smooth: false,
            schwartz: false,
            expect_compact: None,
            expect_e: None,
            expect_f: None,
            affiliation: Some(AffiliationExpectation {
                route: AffiliationRoute::WeightBound,
                radius: 12.0,
                verdict: Verdict::Affiliated,
            }),
            oracle: Some(SpectrumOracle::HalfLine { lo: 0.0 }),
            source: "one-sided exponential weight: range (0, inf), closure [0, inf); \
                     derivative-to-weight ratio exactly one",
            make: exp_momentum,
        },
        SymbolEntry {
            name: "bracket_momentum",
            formula: "sqrt(1 + eta^2)",
            structure: StructureTag::FourierMultiplier,
            class: SymbolClass::UnboundedAffiliationCandidate,
            bounded: false,
            smooth: false,
            schwartz: false,
            expect_compact: None,
            expect_e: None,
            expect_f: None,
            affiliation: Some(AffiliationExpectation {
                route: AffiliationRoute::WeightBound,
                radius: 12.0,
                verdict: Verdict::Affiliated,
            }),
            oracle: Some(SpectrumOracle::HalfLine { lo: 1.0 }),
            source: "smoothed absolute value of the momentum: half line [1, inf); \
                     derivative-to-weight ratio below one",
            make: bracket_momentum,
        },
        SymbolEntry {
            name: "coordinate",
            formula: "z",
            structure: StructureTag::Multiplication,
            class: SymbolClass::UnboundedAffiliationCandidate,
            bounded: false,
            smooth: false,
            schwartz: false,
            expect_compact: None,
            expect_e: None,
            expect_f: None,
            affiliation: None,
            oracle: Some(SpectrumOracle::FullLine),
            source: "the position coordinate: essential range is the whole line",
            make: coordinate,
        },
        SymbolEntry {
            name: "harmonic",
            formula: "z^2 + eta^2",
            structure: StructureTag::Weyl,
            class: SymbolClass::UnboundedAffiliationCandidate,
            bounded: false,
            smooth: false,
            schwartz: false,
            expect_compact: None,
            expect_e: None,
            expect_f: None,
            affiliation: None,
            oracle: Some(SpectrumOracle::Discrete {
                lowest: &HARMONIC_EIGS,
            }),
            source: "quantized harmonic oscillator: odd-integer eigenvalues, purely \
                     discrete spectrum",
            make: harmonic,
        },
    ]
}

/// Look up a symbol entry by name.
pub fn find(name: &str) -> Option<SymbolEntry> {
    corpus().into_iter().find(|e| e.name == name)
}

/// One coefficient-field entry for the divergence-form checks.
#[derive(Clone, Serialize)]
pub struct CoefficientEntry {
    pub name: &'static str,
    pub formula: &'static str,
    /// Expected flag from the vanishing-well detector under the standard
    /// schedule (centers m^2, radii m).
    pub expect_nogo: Option<NogoStatus>,
    /// Whether the growth detector should expect a compact resolvent.
    pub expect_compact_resolvent: Option<bool>,
    pub source: &'static str,
    #[serde(skip)]
    make: fn() -> CoefficientField,
}

impl std::fmt::Debug for CoefficientEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoefficientEntry")
            .field("name", &self.name)
            .field("formula", &self.formula)
            .finish()
    }
}

impl CoefficientEntry {
    pub fn field(&self) -> CoefficientField {
        (self.make)()
    }
}

fn unit_coefficients() -> CoefficientField {
    CoefficientField::scalar("unit", 1, Arc::new(|_: &[f64]| 1.0))
}

fn decaying_well() -> CoefficientField {
    CoefficientField::scalar("decaying_well", 1, Arc::new(|x: &[f64]| 1.0 / (1.0 + x[0] * x[0])))
}

fn elliptic_band() -> CoefficientField {
    CoefficientField::scalar("elliptic_band", 1, Arc::new(|x: &[f64]| 2.0 + x[0].sin()))
}

fn quartic_growth() -> CoefficientField {
    CoefficientField::scalar(
        "quartic_growth",
        1,
        Arc::new(|x: &[f64]| 1.0 + x[0] * x[0] * x[0] * x[0]),
    )
}

/// The coefficient-field catalogue for divergence-form operators.
pub fn coefficient_corpus() -> Vec<CoefficientEntry> {
    vec![
        CoefficientEntry {
            name: "unit",
            formula: "1",
            expect_nogo: Some(NogoStatus::NotRaised),
            expect_compact_resolvent: Some(false),
            source: "constant coefficients give the plain second-difference operator: \
                     a band from zero up to the grid cap",
            make: unit_coefficients,
        },
        CoefficientEntry {
            name: "decaying_well",
            formula: "1/(1 + z^2)",
            expect_nogo: Some(NogoStatus::Raised),
            expect_compact_resolvent: None,
            source: "coefficients vanish at infinity: shifted operators collapse to \
                     zero along configuration paths, and the well detector fires",
            make: decaying_well,
        },
        CoefficientEntry {
            name: "elliptic_band",
            formula: "2 + sin(z)",
            expect_nogo: Some(NogoStatus::NotRaised),
            expect_compact_resolvent: Some(false),
            source: "uniformly elliptic band 1 <= a <= 3: bounded below, so no well \
                     and no compact resolvent",
            make: elliptic_band,
        },
        CoefficientEntry {
            name: "quartic_growth",
            formula: "1 + z^4",
            expect_nogo: Some(NogoStatus::NotRaised),
            expect_compact_resolvent: Some(true),
            source: "coefficients grow like the fourth power: empty essential \
                     spectrum expected from the growth detector",
            make: quartic_growth,
        },
    ]
}

/// Look up a coefficient entry by name.
pub fn find_coefficient(name: &str) -> Option<CoefficientEntry> {
    coefficient_corpus().into_iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::PhasePoint;

    #[test]
    fn catalogue_has_at_least_twelve_distinct_entries() {
        let entries = corpus();
        assert!(entries.len() >= 12, "only {} entries", entries.len());
        let mut names: Vec<_> = entries.iter().map(|e| e.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), entries.len(), "duplicate names");
    }

    #[test]
    fn providers_match_their_table_row() {
        for e in corpus() {
            let p = e.provider();
            assert_eq!(p.name(), e.name);
            assert_eq!(p.dim(), 1);
            assert_eq!(p.class(), e.class);
            assert_eq!(p.structure(), Some(e.structure));
            assert!(p.has_partials(), "{} lacks partials", e.name);
            let v = p.eval(&PhasePoint::d1(0.3, -0.7)).unwrap();
            assert!(v.re.is_finite() && v.im.abs() < 1e-15, "{}", e.name);
        }
    }

    #[test]
    fn expectations_are_internally_consistent() {
        for e in corpus() {
            // Flags are nested: rapidly decaying entries are smooth, smooth
            // entries are bounded.
            if e.schwartz {
                assert!(e.smooth, "{}", e.name);
            }
            if e.smooth {
                assert!(e.bounded, "{}", e.name);
            }
            // Bounded entries carry the full compact/ideal triple and the
            // intersection identity; unbounded ones carry none of it.
            assert_eq!(e.expect_compact.is_some(), e.bounded, "{}", e.name);
            assert_eq!(e.expect_e.is_some(), e.bounded, "{}", e.name);
            assert_eq!(e.expect_f.is_some(), e.bounded, "{}", e.name);
            if let (Some(c), Some(ee), Some(ff)) =
                (e.expect_compact, e.expect_e, e.expect_f)
            {
                assert_eq!(c, ee && ff, "ideal intersection broken for {}", e.name);
            }
            if let Some(SpectrumOracle::Band { lo, hi }) = e.oracle {
                assert!(lo <= hi, "{}", e.name);
            }
            if let Some(SpectrumOracle::Discrete { lowest }) = e.oracle {
                assert!(lowest.windows(2).all(|w| w[0] < w[1]), "{}", e.name);
            }
        }
    }

    #[test]
    fn structure_tags_reflect_the_coordinate_dependence() {
        for e in corpus() {
            let p = e.provider();
            let base = p.eval(&PhasePoint::d1(0.4, 0.9)).unwrap();
            let moved_x = p.eval(&PhasePoint::d1(1.7, 0.9)).unwrap();
            let moved_xi = p.eval(&PhasePoint::d1(0.4, 2.3)).unwrap();
            match e.structure {
                StructureTag::Multiplication => {
                    assert!((base - moved_xi).norm() < 1e-15, "{}", e.name)
                }
                StructureTag::FourierMultiplier => {
                    assert!((base - moved_x).norm() < 1e-15, "{}", e.name)
                }
                StructureTag::Weyl => {
                    assert!(
                        (base - moved_x).norm() > 1e-12
                            && (base - moved_xi).norm() > 1e-12,
                        "{} does not depend on both slots",
                        e.name
                    )
                }
            }
        }
    }

    #[test]
    fn lookup_finds_every_entry_and_rejects_strangers() {
        for e in corpus() {
            assert!(find(e.name).is_some());
        }
        assert!(find("no_such_symbol").is_none());
        for c in coefficient_corpus() {
            assert!(find_coefficient(c.name).is_some());
        }
        assert!(find_coefficient("no_such_field").is_none());
    }

    #[test]
    fn coefficient_fields_are_positive_at_the_origin() {
        let entries = coefficient_corpus();
        assert!(entries.len() >= 4);
        for c in entries {
            let f = c.field();
            let m = f.min_eig_at(&[0.0]).unwrap();
            assert!(m > 0.0, "{}: {}", c.name, m);
        }
    }
}
