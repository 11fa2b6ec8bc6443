//! Upper limits on the AC code length of reduced configurations.
//!
//! Every reduced configuration is described relative to a reference
//! configuration whose coefficients all have unquantized size 8. Moving from
//! the reference to a target is a unique sequence of local size replacements
//! (see [`OpKind`]). Replacements that shrink sizes cost bits ("losses"),
//! promotions to size 9 or 10 earn bits ("gains"). The AC energy budget forces
//! at least `3a + 15b` losses for `a` size-9 and `b` size-10 promotions, so
//!
//! ```text
//! limit = len(reference) + max over (a, b) of  A(a) + B(b) - Delta(3a + 15b)
//! ```
//!
//! where `A`, `B` sum the largest available gains and `Delta` the smallest
//! available losses. The engine works for any number of AC positions so the
//! same code path serves the 63-position block and small brute-force instances.

mod decompose;
mod deltas;
mod refine;

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize, Serializer};

pub use decompose::{decompose, recompose_length};
pub use deltas::{enumerate_deltas, gain_functions, loss_function, CaseCensus, DeltaEntry, LossGainSets, OpKind};
pub use refine::{is_dominated, refine_capacity, refine_maxconfig};

use crate::entropy_model::{CodeLengthTable, ComponentKind, AC_POSITIONS};
use crate::error::{Error, Result};
use crate::quantization::{pow2_table, Pow2QuantTable, QuantTable, ScaleFactor, SizeVector, MAX_SUPPORTED_FACTOR};

/// Exact rational used for per-position code-length differences.
pub type Rational = Ratio<i64>;

/// Unquantized size of every reference coefficient.
pub const REFERENCE_SIZE: u8 = 8;

/// Energy of one reference coefficient, `2^(2 * 8 - 2)`.
pub const REFERENCE_UNIT: u64 = 1 << (2 * REFERENCE_SIZE as u32 - 2);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    Base,
    CapacityPruned,
    MaxconfigPruned,
}

impl Refinement {
    pub const ALL: [Refinement; 3] = [Refinement::Base, Refinement::CapacityPruned, Refinement::MaxconfigPruned];

    pub fn symbol(self) -> &'static str {
        match self {
            Refinement::Base => "Λ",
            Refinement::CapacityPruned => "Λ̃",
            Refinement::MaxconfigPruned => "Λ̃̃",
        }
    }
}

impl fmt::Display for Refinement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Refinement::Base => "base",
            Refinement::CapacityPruned => "capacity_pruned",
            Refinement::MaxconfigPruned => "maxconfig_pruned",
        })
    }
}

impl FromStr for Refinement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "base" => Ok(Refinement::Base),
            "capacity" | "capacity_pruned" => Ok(Refinement::CapacityPruned),
            "maxconfig" | "maxconfig_pruned" | "best" => Ok(Refinement::MaxconfigPruned),
            other => Err(Error::Parameter(format!("unknown refinement `{other}`"))),
        }
    }
}

/// The reference configuration for one exponent table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReferenceConfig {
    pub component: ComponentKind,
    pub exponents: Pow2QuantTable,
    /// Quantized reference sizes `8 - C(k)`.
    pub sbar: SizeVector,
    pub ref_len: u32,
    #[serde(skip)]
    prefix: Vec<u32>,
}

impl ReferenceConfig {
    pub fn positions(&self) -> usize {
        self.sbar.len()
    }

    pub fn table(&self) -> &'static CodeLengthTable {
        self.component.table()
    }

    pub(crate) fn exponent(&self, p: usize) -> u8 {
        self.exponents.exponent(p)
    }

    /// Quantized reference size at 1-based position `p`.
    pub fn sbar_at(&self, p: usize) -> u8 {
        self.sbar.at(p)
    }

    /// `len(0, sbar_p)`.
    pub(crate) fn single(&self, p: usize) -> u32 {
        self.table().len(0, self.sbar_at(p))
    }

    /// Sum of `len(0, sbar_i)` for `i` in `from..=to` (1-based, empty if `from > to`).
    pub(crate) fn span(&self, from: usize, to: usize) -> u32 {
        if from > to {
            0
        } else {
            self.prefix[to] - self.prefix[from - 1]
        }
    }

    /// AC energy budget `(n + 1) * 2^14` for `n` positions.
    pub fn ball_budget(&self) -> u64 {
        (self.positions() as u64 + 1) * REFERENCE_UNIT
    }
}

/// Builds the reference configuration for an exponent table.
pub fn reference_length(component: ComponentKind, c: &Pow2QuantTable) -> Result<ReferenceConfig> {
    let n = c.exponents().len();
    if n == 0 || n > AC_POSITIONS {
        return Err(Error::Parameter(format!("{n} AC positions outside 1..=63")));
    }
    if let Some((k, &e)) = c.exponents().iter().enumerate().find(|(_, &e)| e > REFERENCE_SIZE - 2) {
        return Err(Error::UnsupportedTable(format!(
            "exponent {e} at position {} leaves a reference size below 2",
            k + 1
        )));
    }
    let table = component.table();
    let sbar = SizeVector::new(c.exponents().iter().map(|&e| REFERENCE_SIZE - e).collect())?;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0);
    for &s in sbar.iter() {
        prefix.push(prefix.last().unwrap() + table.len(0, s));
    }
    Ok(ReferenceConfig {
        component,
        exponents: Pow2QuantTable::from_exponents(component, c.exponents().to_vec()),
        ref_len: *prefix.last().unwrap(),
        sbar,
        prefix,
    })
}

/// Pairs `(a, b)` of size-9 and size-10 promotion counts compatible with the
/// energy budget of `positions` AC coefficients: `4a + 16b <= n`.
pub fn admissible_pairs_for(positions: usize) -> Vec<(u8, u8)> {
    let mut out = Vec::new();
    for b in 0..=positions / 16 {
        for a in 0..=positions / 4 {
            if 4 * a + 16 * b <= positions {
                out.push((a as u8, b as u8));
            }
        }
    }
    out.sort();
    out
}

/// The 40 pairs with `a + 4b < 16` for a full 8x8 block.
pub fn admissible_pairs() -> Vec<(u8, u8)> {
    admissible_pairs_for(AC_POSITIONS)
}

/// Number of losses forced by `a` size-9 and `b` size-10 promotions.
pub fn forced_losses(a: u8, b: u8) -> usize {
    3 * usize::from(a) + 15 * usize::from(b)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObjectiveCell {
    pub a: u8,
    pub b: u8,
    #[serde(serialize_with = "serialize_ratio")]
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundResult {
    pub component: ComponentKind,
    pub sf: Option<ScaleFactor>,
    pub refinement: Refinement,
    pub ref_len: u32,
    pub limit: u32,
    pub argmax: [u8; 2],
    #[serde(serialize_with = "serialize_ratio")]
    pub max_objective: Rational,
    #[serde(rename = "objective_table")]
    pub objective: Vec<ObjectiveCell>,
}

impl BoundResult {
    pub fn objective_at(&self, a: u8, b: u8) -> Option<Rational> {
        self.objective.iter().find(|c| c.a == a && c.b == b).map(|c| c.value)
    }
}

pub(crate) fn serialize_ratio<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    if r.is_integer() {
        s.collect_str(&r.to_integer())
    } else {
        s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
    }
}

/// Loss/gain sets at the requested refinement level.
pub fn refined_sets(reference: &ReferenceConfig, refinement: Refinement) -> Result<LossGainSets> {
    let base = enumerate_deltas(reference);
    check_sign_structure(&base)?;
    Ok(match refinement {
        Refinement::Base => base,
        Refinement::CapacityPruned => refine_capacity(&base),
        Refinement::MaxconfigPruned => refine_capacity(&refine_maxconfig(&base, reference)?),
    })
}

fn check_sign_structure(sets: &LossGainSets) -> Result<()> {
    if let Some(e) = sets.losses.iter().find(|e| e.value.is_negative()) {
        return Err(Error::UnsupportedTable(format!(
            "{:?} at p={} r={} s={} gains {} bits; the loss/gain split does not hold",
            e.kind, e.position, e.run, e.size, -e.value
        )));
    }
    Ok(())
}

/// Maximizes the objective over the admissible pairs.
pub fn maximize(reference: &ReferenceConfig, sets: &LossGainSets) -> Result<BoundResult> {
    let pairs = admissible_pairs_for(reference.positions());
    let max_losses = pairs.iter().map(|&(a, b)| forced_losses(a, b)).max().unwrap_or(0);
    let max_a = pairs.iter().map(|p| p.0).max().unwrap_or(0);
    let max_b = pairs.iter().map(|p| p.1).max().unwrap_or(0);

    let loss_prefix = sets.loss_prefix(max_losses)?;
    let gain9 = prefix_sums(&sets.largest_gains(&sets.gains9, usize::from(max_a)));
    let gain10 = prefix_sums(&sets.largest_gains(&sets.gains10, usize::from(max_b)));

    let mut objective = Vec::with_capacity(pairs.len());
    let mut best: Option<(Rational, u8, u8)> = None;
    for (a, b) in pairs {
        let value = gain9[usize::from(a).min(gain9.len() - 1)] + gain10[usize::from(b).min(gain10.len() - 1)]
            - loss_prefix[forced_losses(a, b)];
        if best.is_none_or(|(v, _, _)| value > v) {
            best = Some((value, a, b));
        }
        objective.push(ObjectiveCell { a, b, value });
    }
    let (max_objective, a, b) = best.ok_or_else(|| Error::Internal("no admissible pairs".into()))?;
    let limit = i64::from(reference.ref_len) + max_objective.ceil().to_integer();
    Ok(BoundResult {
        component: reference.component,
        sf: None,
        refinement: sets.refinement,
        ref_len: reference.ref_len,
        limit: u32::try_from(limit).map_err(|_| Error::Internal(format!("negative limit {limit}")))?,
        argmax: [a, b],
        max_objective,
        objective,
    })
}

fn prefix_sums(values: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(values.len() + 1);
    out.push(Rational::zero());
    for v in values {
        out.push(*out.last().unwrap() + v);
    }
    out
}

/// Limit for an arbitrary exponent table (any number of positions).
pub fn limit_for_exponents(c: &Pow2QuantTable, refinement: Refinement) -> Result<BoundResult> {
    let reference = reference_length(c.component(), c)?;
    let sets = refined_sets(&reference, refinement)?;
    maximize(&reference, &sets)
}

/// Upper limit on the AC code length of any 8x8 block quantized with `q`.
pub fn upper_limit(component: ComponentKind, q: &QuantTable, refinement: Refinement) -> Result<BoundResult> {
    if let Some((k, &f)) = q.ac().iter().enumerate().find(|(_, &f)| f > MAX_SUPPORTED_FACTOR) {
        return Err(Error::UnsupportedTable(format!(
            "AC factor {f} at zigzag position {} exceeds {MAX_SUPPORTED_FACTOR}",
            k + 1
        )));
    }
    let c = Pow2QuantTable::from_exponents(component, pow2_table(q).exponents().to_vec());
    let mut result = limit_for_exponents(&c, refinement)?;
    result.sf = q.scale();
    Ok(result)
}

/// All three refinement levels for one table, in [`Refinement::ALL`] order.
pub fn all_limits(component: ComponentKind, q: &QuantTable) -> Result<[BoundResult; 3]> {
    Ok([
        upper_limit(component, q, Refinement::Base)?,
        upper_limit(component, q, Refinement::CapacityPruned)?,
        upper_limit(component, q, Refinement::MaxconfigPruned)?,
    ])
}
