use std::cmp::Reverse;
use std::ops::RangeInclusive;

use serde::Serialize;

use super::{serialize_ratio, Rational, ReferenceConfig, Refinement, REFERENCE_SIZE};
use crate::error::{Error, Result};

/// Local size replacements that take the reference to a reduced configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    /// Shrink one coefficient that follows a nonzero one.
    Op1,
    /// Zero out a run of `r` coefficients and shrink the next one.
    Op2,
    /// Zero out a run of `r` coefficients; the next keeps its reference size.
    Op3,
    /// Zero out every coefficient after `p`; the block ends with EOB.
    Op4,
    /// Promote a coefficient with no preceding zeros to size 9.
    Op5Alpha,
    /// Promote a coefficient with no preceding zeros to size 10.
    Op5Beta,
    /// Promote a coefficient after a run of zeros to size 9.
    Op6Alpha,
    /// Promote a coefficient after a run of zeros to size 10.
    Op6Beta,
}

impl OpKind {
    pub fn is_gain(self) -> bool {
        matches!(self, OpKind::Op5Alpha | OpKind::Op5Beta | OpKind::Op6Alpha | OpKind::Op6Beta)
    }
}

/// One per-position code-length difference and the number of positions it
/// is charged to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaEntry {
    pub kind: OpKind,
    /// Position of the (last) affected coefficient; 0 for an all-zero block.
    pub position: u8,
    pub run: u8,
    /// Quantized size written at `position` (0 for [`OpKind::Op4`]).
    pub size: u8,
    #[serde(serialize_with = "serialize_ratio")]
    pub value: Rational,
    pub multiplicity: u32,
}

impl DeltaEntry {
    /// Positions whose reference coefficient this replacement rewrites.
    pub fn footprint(&self, positions: usize) -> RangeInclusive<usize> {
        let p = usize::from(self.position);
        let r = usize::from(self.run);
        match self.kind {
            OpKind::Op1 | OpKind::Op5Alpha | OpKind::Op5Beta | OpKind::Op6Alpha | OpKind::Op6Beta => p..=p,
            OpKind::Op2 => p - r..=p,
            OpKind::Op3 => p - r..=p - 1,
            OpKind::Op4 => p + 1..=positions,
        }
    }

    fn sort_key(&self) -> (Rational, OpKind, u8, u8, u8) {
        (self.value, self.kind, self.position, self.run, self.size)
    }
}

/// How many `(position, run, size)` cases were evaluated per replacement kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CaseCensus {
    pub op1: usize,
    pub op2: usize,
    pub op3: usize,
    pub op4: usize,
    pub alpha1: usize,
    pub beta1: usize,
    pub alpha2: usize,
    pub beta2: usize,
}

impl CaseCensus {
    pub fn total(&self) -> usize {
        self.op1 + self.op2 + self.op3 + self.op4 + self.alpha1 + self.beta1 + self.alpha2 + self.beta2
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LossGainSets {
    pub positions: usize,
    pub losses: Vec<DeltaEntry>,
    /// Size-9 promotion gains.
    pub gains9: Vec<DeltaEntry>,
    /// Size-10 promotion gains.
    pub gains10: Vec<DeltaEntry>,
    pub refinement: Refinement,
    pub census: CaseCensus,
}

impl LossGainSets {
    /// Cumulative sums of the smallest losses, counting multiplicities:
    /// element `n` is `Delta(n)` for `n` in `0..=count`.
    pub fn loss_prefix(&self, count: usize) -> Result<Vec<Rational>> {
        let mut sorted: Vec<&DeltaEntry> = self.losses.iter().collect();
        sorted.sort_by_key(|e| e.sort_key());
        let mut out = Vec::with_capacity(count + 1);
        let mut acc = Rational::from_integer(0);
        out.push(acc);
        'fill: for e in sorted {
            for _ in 0..e.multiplicity {
                if out.len() > count {
                    break 'fill;
                }
                acc += e.value;
                out.push(acc);
            }
        }
        if out.len() <= count {
            return Err(Error::Internal(format!("only {} losses available, {count} requested", out.len() - 1)));
        }
        Ok(out)
    }

    /// The `count` largest values of `set` (fewer if the set is smaller).
    pub fn largest_gains(&self, set: &[DeltaEntry], count: usize) -> Vec<Rational> {
        let mut values: Vec<Rational> =
            set.iter().flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity as usize)).collect();
        values.sort_by_key(|&v| Reverse(v));
        values.truncate(count);
        values
    }

    pub fn loss_count(&self) -> usize {
        self.losses.iter().map(|e| e.multiplicity as usize).sum()
    }
}

/// Sum of the `n` smallest losses.
pub fn loss_function(sets: &LossGainSets, n: usize) -> Result<Rational> {
    Ok(sets.loss_prefix(n)?[n])
}

/// Sums of the `a` largest size-9 gains and the `b` largest size-10 gains.
pub fn gain_functions(sets: &LossGainSets, a: usize, b: usize) -> (Rational, Rational) {
    let sum = |v: Vec<Rational>| v.into_iter().fold(Rational::from_integer(0), |x, y| x + y);
    (sum(sets.largest_gains(&sets.gains9, a)), sum(sets.largest_gains(&sets.gains10, b)))
}

fn ratio(numer: i64, denom: usize) -> Rational {
    Rational::new(numer, denom as i64)
}

fn diff(x: u32, y: u32) -> i64 {
    i64::from(x) - i64::from(y)
}

pub(crate) fn op1_value(rf: &ReferenceConfig, p: usize, s: u8) -> Rational {
    Rational::from_integer(diff(rf.single(p), rf.table().len(0, s)))
}

pub(crate) fn op2_value(rf: &ReferenceConfig, p: usize, r: usize, s: u8) -> Rational {
    ratio(diff(rf.span(p - r, p), rf.table().len(r, s)), r + 1)
}

pub(crate) fn op3_value(rf: &ReferenceConfig, p: usize, r: usize) -> Rational {
    ratio(diff(rf.span(p - r, p), rf.table().len(r, rf.sbar_at(p))), r)
}

pub(crate) fn op4_value(rf: &ReferenceConfig, p: usize) -> Rational {
    let n = rf.positions();
    ratio(diff(rf.span(p + 1, n), rf.table().eob_bits()), n - p)
}

/// Gain of promoting position `p` after `r` zeros by `step` sizes.
pub(crate) fn promotion_value(rf: &ReferenceConfig, p: usize, r: usize, step: u8) -> Rational {
    let sbar = rf.sbar_at(p);
    Rational::from_integer(diff(rf.table().len(r, sbar + step), rf.table().len(r, sbar)))
}

fn promotion_kind(r: usize, step: u8) -> OpKind {
    match (r, step) {
        (0, 1) => OpKind::Op5Alpha,
        (0, _) => OpKind::Op5Beta,
        (_, 1) => OpKind::Op6Alpha,
        _ => OpKind::Op6Beta,
    }
}

/// Enumerates every loss and gain for the reference configuration.
pub fn enumerate_deltas(rf: &ReferenceConfig) -> LossGainSets {
    let n = rf.positions();
    let mut census = CaseCensus::default();
    let mut losses = Vec::new();
    let mut gains9 = Vec::new();
    let mut gains10 = Vec::new();
    let entry = |kind, p: usize, r: usize, size, value, multiplicity: usize| DeltaEntry {
        kind,
        position: p as u8,
        run: r as u8,
        size,
        value,
        multiplicity: multiplicity as u32,
    };

    for p in 1..=n {
        let sbar = rf.sbar_at(p);
        for s in 1..REFERENCE_SIZE {
            census.op1 += 1;
            if s < sbar {
                losses.push(entry(OpKind::Op1, p, 0, s, op1_value(rf, p, s), 1));
            }
        }
        for r in 1..p {
            for s in 1..REFERENCE_SIZE {
                census.op2 += 1;
                if s < sbar {
                    losses.push(entry(OpKind::Op2, p, r, s, op2_value(rf, p, r, s), r + 1));
                }
            }
            census.op3 += 1;
            losses.push(entry(OpKind::Op3, p, r, sbar, op3_value(rf, p, r), r));
        }
        if p < n {
            census.op4 += 1;
            losses.push(entry(OpKind::Op4, p, 0, 0, op4_value(rf, p), n - p));
        }
        for r in 0..p {
            for step in [1, 2] {
                let e = entry(promotion_kind(r, step), p, r, sbar + step, promotion_value(rf, p, r, step), 1);
                match (r, step) {
                    (0, 1) => census.alpha1 += 1,
                    (0, _) => census.beta1 += 1,
                    (_, 1) => census.alpha2 += 1,
                    _ => census.beta2 += 1,
                }
                if step == 1 {
                    gains9.push(e);
                } else {
                    gains10.push(e);
                }
            }
        }
    }

    LossGainSets { positions: n, losses, gains9, gains10, refinement: Refinement::Base, census }
}
