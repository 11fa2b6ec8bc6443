use std::cmp::Reverse;

use super::deltas::{DeltaEntry, LossGainSets, OpKind};
use super::{ReferenceConfig, Refinement};
use crate::error::{Error, Result};

/// Keeps, for every position, only the cheapest loss and the largest gains
/// that touch it. A configuration charges each position at most once, so the
/// refined sums still bound every configuration.
pub fn refine_capacity(sets: &LossGainSets) -> LossGainSets {
    let n = sets.positions;

    let mut sorted: Vec<&DeltaEntry> = sets.losses.iter().collect();
    sorted.sort_by_key(|e| (e.value, e.kind, e.position, e.run, e.size));
    let mut owner: Vec<Option<usize>> = vec![None; n + 1];
    let mut charged = vec![0u32; sorted.len()];
    let mut remaining = n;
    for (i, e) in sorted.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        for q in e.footprint(n) {
            if owner[q].is_none() {
                owner[q] = Some(i);
                charged[i] += 1;
                remaining -= 1;
            }
        }
    }
    let losses = sorted
        .iter()
        .zip(&charged)
        .filter(|(_, &c)| c > 0)
        .map(|(e, &c)| DeltaEntry { multiplicity: c, ..(*e).clone() })
        .collect();

    LossGainSets {
        positions: n,
        losses,
        gains9: best_gain_per_position(&sets.gains9, n),
        gains10: best_gain_per_position(&sets.gains10, n),
        refinement: sets.refinement.max(Refinement::CapacityPruned),
        census: sets.census,
    }
}

fn best_gain_per_position(gains: &[DeltaEntry], n: usize) -> Vec<DeltaEntry> {
    let mut sorted: Vec<&DeltaEntry> = gains.iter().collect();
    sorted.sort_by_key(|e| (Reverse(e.value), e.kind, e.position, e.run, e.size));
    let mut taken = vec![false; n + 1];
    let mut out = Vec::new();
    for e in sorted {
        let p = usize::from(e.position);
        if !taken[p] {
            taken[p] = true;
            out.push(DeltaEntry { multiplicity: 1, ..e.clone() });
        }
    }
    out.sort_by_key(|e| e.position);
    out
}

/// Whether writing quantized size `size` at position `p` after `run` zeros is
/// never part of a maximum-length configuration.
///
/// The alternative lowers `p` by one unquantized size and spends the freed
/// energy on up to three of the zeros, each at the same unquantized size.
/// Four coefficients one size down carry the energy of one coefficient at the
/// original size, so the alternative stays inside the ball. Only sizes above
/// 2 are tested so that `p` stays nonzero and the tail of the block is
/// unchanged.
pub fn is_dominated(rf: &ReferenceConfig, p: usize, run: usize, size: u8) -> bool {
    if size <= 2 || run == 0 {
        return false;
    }
    let table = rf.table();
    let unquantized = size + rf.exponent(p);
    let start = p - run;
    const FILLS: usize = 3;
    const NONE: i64 = i64::MIN;

    // best[z][f]: bits so far with `z` pending zeros and `f` fills used
    let mut best = vec![[NONE; FILLS + 1]; run + 1];
    best[0][0] = 0;
    for l in start..p {
        let fill = (unquantized - 1).saturating_sub(rf.exponent(l));
        let mut next = vec![[NONE; FILLS + 1]; run + 1];
        for z in 0..=run {
            for f in 0..=FILLS {
                let bits = best[z][f];
                if bits == NONE {
                    continue;
                }
                if z < run {
                    next[z + 1][f] = next[z + 1][f].max(bits);
                }
                if fill > 0 && f < FILLS {
                    let b = bits + i64::from(table.len(z, fill));
                    next[0][f + 1] = next[0][f + 1].max(b);
                }
            }
        }
        best = next;
    }
    let original = i64::from(table.len(run, size));
    (0..=run).any(|z| best[z].iter().any(|&bits| bits != NONE && bits + i64::from(table.len(z, size - 1)) > original))
}

/// Drops replacements whose written symbol is dominated in the sense of
/// [`is_dominated`]. Must be applied to the base sets, before
/// [`refine_capacity`] picks per-position representatives.
pub fn refine_maxconfig(sets: &LossGainSets, rf: &ReferenceConfig) -> Result<LossGainSets> {
    if sets.refinement != Refinement::Base {
        return Err(Error::Parameter(format!("max-configuration pruning expects base sets, got {}", sets.refinement)));
    }
    let keep = |e: &DeltaEntry| {
        let p = usize::from(e.position);
        let r = usize::from(e.run);
        match e.kind {
            OpKind::Op2 | OpKind::Op6Alpha | OpKind::Op6Beta => !is_dominated(rf, p, r, e.size),
            // also accompanies the size-9 and size-10 promotions at p
            OpKind::Op3 => !(0..=2).all(|step| is_dominated(rf, p, r, e.size + step)),
            _ => true,
        }
    };
    let filter = |v: &[DeltaEntry]| v.iter().filter(|e| keep(e)).cloned().collect::<Vec<_>>();
    Ok(LossGainSets {
        positions: sets.positions,
        losses: filter(&sets.losses),
        gains9: filter(&sets.gains9),
        gains10: filter(&sets.gains10),
        refinement: Refinement::MaxconfigPruned,
        census: sets.census,
    })
}
