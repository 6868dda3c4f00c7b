//! Provenance-tagged lower and upper bounds for weightless simplicial
//! volumes, the transfer rules that move bounds between coefficient
//! systems and manifolds, and the per-field report compiler.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{ComplexError, DeltaComplex, OrientationOutcome};
use crate::field::{FieldError, FieldSpec};
use crate::homology::{max_betti, HomologyError};
use crate::model::{algebraic_min_cycle_size, AugmentedSystem, ModelError, ENUMERATION_GUARD};
use crate::snf::elementary_divisor_primes;
use crate::with_field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("complex is non-orientable")]
    NonOrientable,
    #[error("mapping degree must be nonzero")]
    ZeroDegree,
    #[error("reports are over different coefficient systems")]
    FieldMismatch,
    #[error("volumes of nonempty manifolds are at least 1, got an upper bound of 0")]
    ZeroVolume,
    #[error("connected closed manifolds have positive Betti numbers, got 0")]
    ZeroBetti,
    #[error("inconsistent facts: Betti number {betti} exceeds integral volume {isv}")]
    BettiAboveIntegralVolume { betti: u64, isv: u64 },
    #[error("inconsistent facts: lower bound {lower} exceeds upper bound {upper}")]
    Inconsistent { lower: u64, upper: u64 },
    #[error("binomial coefficient overflow for dimensions {0} and {1}")]
    BinomialOverflow(usize, usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Which rule produced a lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerRule {
    Betti,
    Euler,
    ModelSearch,
    Strictness,
    Transfer,
}

/// Which rule produced an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperRule {
    Triangulation,
    Transfer,
    Product,
    Fact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBound {
    pub value: u64,
    pub by: LowerRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperBound {
    pub value: u64,
    pub by: UpperRule,
}

/// Lower/upper bounds for one coefficient system, exact when they meet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub field: FieldSpec,
    pub lower: LowerBound,
    pub upper: UpperBound,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<u64>,
}

impl BoundReport {
    pub fn new(field: FieldSpec, lower: LowerBound, upper: UpperBound) -> Result<Self, BoundsError> {
        if lower.value > upper.value {
            return Err(BoundsError::Inconsistent { lower: lower.value, upper: upper.value });
        }
        let exact = (lower.value == upper.value).then_some(lower.value);
        Ok(BoundReport { field, lower, upper, exact })
    }
}

/// A literature fact supplied by the user, never derived by the tool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KnownFact {
    /// The integral simplicial volume of the manifold under report.
    #[serde(rename = "isv")]
    IntegralVolume { value: u64, cite: String },
    /// `source` dominates the manifold under report with this degree, and
    /// `upper` bounds the weightless volume of `source`.
    Domination { degree: i64, source: String, upper: u64, cite: String },
}

/// Largest Betti number over all degrees (free rank over `Z`).
pub fn betti_lower(x: &DeltaComplex, spec: &FieldSpec) -> Result<u64, BoundsError> {
    Ok(max_betti(x, spec)? as u64)
}

/// `⌈|χ| / (n+1)⌉`.
pub fn euler_lower(x: &DeltaComplex) -> u64 {
    let chi = x.euler_characteristic().unsigned_abs();
    let n = x.dimension() as u64;
    chi.div_ceil(n + 1)
}

/// The top-cell count, valid once an orientation exists. The count does
/// not depend on the coefficient system; the argument records which
/// report the bound belongs to.
pub fn triangulation_upper(x: &DeltaComplex, _spec: &FieldSpec) -> Result<u64, BoundsError> {
    match x.orientation()? {
        OrientationOutcome::Oriented(_) => Ok(x.top_cells() as u64),
        OrientationOutcome::NonOrientable => Err(BoundsError::NonOrientable),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transfer {
    Upper(u64),
    Inapplicable,
}

/// Pushes an upper bound for the dominating manifold down to the dominated
/// one when the degree is a unit in the coefficient system.
pub fn degree_transfer(
    source_upper: u64,
    degree: i64,
    spec: &FieldSpec,
) -> Result<Transfer, BoundsError> {
    if degree == 0 {
        return Err(BoundsError::ZeroDegree);
    }
    if spec.is_unit(degree) {
        Ok(Transfer::Upper(source_upper))
    } else {
        Ok(Transfer::Inapplicable)
    }
}

fn binomial(n: usize, k: usize) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    u64::try_from(acc).ok()
}

/// Bounds for a product manifold from bounds for the factors:
/// `max` of the lower bounds, and `C(dim M + dim N, dim M)` times the
/// product of the upper bounds.
pub fn product_bound(
    a: &BoundReport,
    dim_a: usize,
    b: &BoundReport,
    dim_b: usize,
) -> Result<BoundReport, BoundsError> {
    if a.field != b.field {
        return Err(BoundsError::FieldMismatch);
    }
    if a.upper.value == 0 || b.upper.value == 0 {
        return Err(BoundsError::ZeroVolume);
    }
    let lower = if b.lower.value > a.lower.value { b.lower } else { a.lower };
    let coeff = binomial(dim_a + dim_b, dim_a)
        .ok_or(BoundsError::BinomialOverflow(dim_a, dim_b))?;
    let value = coeff
        .checked_mul(a.upper.value)
        .and_then(|v| v.checked_mul(b.upper.value))
        .ok_or(BoundsError::BinomialOverflow(dim_a, dim_b))?;
    BoundReport::new(a.field.clone(), lower, UpperBound { value, by: UpperRule::Product })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    /// The integral weightless volume strictly exceeds the Betti number.
    Improved { lower: u64 },
    /// Betti number, weightless integral volume, and integral volume agree.
    Certified { value: u64 },
}

/// The Betti-equality rule: equality of the maximal Betti number with the
/// integral simplicial volume forces equality with the weightless integral
/// volume, so strict inequality on one side improves the other.
pub fn strictness_inference(betti_z: u64, isv: u64) -> Result<Strictness, BoundsError> {
    if betti_z == 0 {
        return Err(BoundsError::ZeroBetti);
    }
    if betti_z > isv {
        return Err(BoundsError::BettiAboveIntegralVolume { betti: betti_z, isv });
    }
    if betti_z < isv {
        Ok(Strictness::Improved { lower: betti_z + 1 })
    } else {
        Ok(Strictness::Certified { value: betti_z })
    }
}

/// The finite set of primes at which solvability of the stacked system can
/// differ between `Q` and `F_p`: primes dividing an elementary divisor of
/// the stacked matrix or of the stacked matrix with the target appended.
/// Outside this set, ranks (and hence feasibility) reduce faithfully.
pub fn exceptional_primes_report(sys: &AugmentedSystem) -> BTreeSet<BigInt> {
    let stacked = sys.stacked();
    let mut primes = elementary_divisor_primes(&stacked);
    let with_target =
        stacked.with_column(&sys.target()).expect("target length matches stacked rows");
    primes.extend(elementary_divisor_primes(&with_target));
    primes
}

/// Per-field assembly: lower bounds from Betti numbers, the Euler
/// characteristic, the model search, and the Betti-equality rule; upper
/// bounds from the triangulation and from user facts. Candidates are
/// folded in a fixed order and only strict improvements change provenance.
pub fn compile_report(
    x: &DeltaComplex,
    fields: &[FieldSpec],
    facts: &[KnownFact],
) -> Result<Vec<BoundReport>, BoundsError> {
    let n = x.dimension();
    let tri_upper = triangulation_upper(x, &FieldSpec::Rationals)?;
    let m_cap = (tri_upper.saturating_sub(1) as usize).min(ENUMERATION_GUARD / (n + 1));

    let mut reports = Vec::with_capacity(fields.len());
    for spec in fields {
        let mut lower = LowerBound { value: betti_lower(x, spec)?, by: LowerRule::Betti };

        let euler = euler_lower(x);
        if euler > lower.value {
            lower = LowerBound { value: euler, by: LowerRule::Euler };
        }

        // over Z the model search runs over Q: an integer cycle with all
        // coefficients nonzero is in particular a rational one
        let search_spec =
            if spec.is_field() { spec.clone() } else { FieldSpec::Rationals };
        let model_lower = with_field!(&search_spec, |f| {
            algebraic_min_cycle_size(f, n, m_cap).map(|s| s.lower_bound())
        })?? as u64;
        if model_lower > lower.value {
            lower = LowerBound { value: model_lower, by: LowerRule::ModelSearch };
        }

        if *spec == FieldSpec::Integers {
            if let Some(isv) = facts.iter().find_map(|f| match f {
                KnownFact::IntegralVolume { value, .. } => Some(*value),
                _ => None,
            }) {
                let betti_z = betti_lower(x, spec)?;
                if let Strictness::Improved { lower: improved } =
                    strictness_inference(betti_z, isv)?
                {
                    if improved > lower.value {
                        lower = LowerBound { value: improved, by: LowerRule::Strictness };
                    }
                }
            }
        }

        let mut upper = UpperBound { value: tri_upper, by: UpperRule::Triangulation };
        for fact in facts {
            match fact {
                KnownFact::Domination { degree, upper: src_upper, .. } => {
                    if let Transfer::Upper(v) = degree_transfer(*src_upper, *degree, spec)? {
                        if v < upper.value {
                            upper = UpperBound { value: v, by: UpperRule::Transfer };
                        }
                    }
                }
                KnownFact::IntegralVolume { value, .. } => {
                    if *value < upper.value {
                        upper = UpperBound { value: *value, by: UpperRule::Fact };
                    }
                }
            }
        }

        reports.push(BoundReport::new(spec.clone(), lower, upper)?);
    }
    Ok(reports)
}
