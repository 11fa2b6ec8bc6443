use super::deltas::{op1_value, op2_value, op3_value, op4_value, promotion_value, DeltaEntry, OpKind};
use super::{Rational, ReferenceConfig, REFERENCE_SIZE};
use crate::error::{Error, Result};
use crate::quantization::SizeVector;

/// Splits the move from the reference to `target` (unquantized sizes) into
/// its unique sequence of replacements.
///
/// The target must be reduced (every nonzero size exceeds its exponent) and
/// satisfy the energy budget of the reference.
pub fn decompose(target: &SizeVector, rf: &ReferenceConfig) -> Result<Vec<DeltaEntry>> {
    let n = rf.positions();
    if target.len() != n {
        return Err(Error::Parameter(format!("target has {} positions, expected {n}", target.len())));
    }
    let mut energy = 0u64;
    for k in 1..=n {
        let s = target.at(k);
        if s == 0 {
            continue;
        }
        if s <= rf.exponent(k) {
            return Err(Error::Constraint(format!(
                "size {s} at position {k} quantizes to zero under exponent {}",
                rf.exponent(k)
            )));
        }
        energy += 1 << (2 * u32::from(s) - 2);
    }
    if energy >= rf.ball_budget() {
        return Err(Error::Constraint(format!("energy {energy} >= budget {}", rf.ball_budget())));
    }

    let quantized: Vec<u8> = (1..=n).map(|k| target.at(k).saturating_sub(rf.exponent(k))).collect();
    let mut out = Vec::new();
    let push = |out: &mut Vec<DeltaEntry>, kind, p: usize, r: usize, size, value, mult: usize| {
        out.push(DeltaEntry { kind, position: p as u8, run: r as u8, size, value, multiplicity: mult as u32 });
    };

    let mut last = 0;
    for p in 1..=n {
        let s = quantized[p - 1];
        if s == 0 {
            continue;
        }
        let r = p - last - 1;
        let sbar = rf.sbar_at(p);
        let unq = target.at(p);
        if s < sbar {
            if r == 0 {
                push(&mut out, OpKind::Op1, p, 0, s, op1_value(rf, p, s), 1);
            } else {
                push(&mut out, OpKind::Op2, p, r, s, op2_value(rf, p, r, s), r + 1);
            }
        } else {
            if r > 0 {
                push(&mut out, OpKind::Op3, p, r, sbar, op3_value(rf, p, r), r);
            }
            if unq > REFERENCE_SIZE {
                let step = unq - REFERENCE_SIZE;
                let kind = match (r, step) {
                    (0, 1) => OpKind::Op5Alpha,
                    (0, _) => OpKind::Op5Beta,
                    (_, 1) => OpKind::Op6Alpha,
                    _ => OpKind::Op6Beta,
                };
                push(&mut out, kind, p, r, s, promotion_value(rf, p, r, step), 1);
            }
        }
        last = p;
    }
    if last < n {
        push(&mut out, OpKind::Op4, last, 0, 0, op4_value(rf, last), n - last);
    }
    Ok(out)
}

/// `len(reference) + sum(gains) - sum(loss * multiplicity)`.
pub fn recompose_length(rf: &ReferenceConfig, entries: &[DeltaEntry]) -> Rational {
    entries.iter().fold(Rational::from_integer(i64::from(rf.ref_len)), |acc, e| {
        let contribution = e.value * Rational::from_integer(i64::from(e.multiplicity));
        if e.kind.is_gain() {
            acc + contribution
        } else {
            acc - contribution
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::reference_length;
    use crate::entropy_model::{sizes_length, ComponentKind};
    use crate::quantization::{pow2_table, quantized_sizes, QuantTable};

    fn chroma_sf1() -> ReferenceConfig {
        let q = QuantTable::annex_k(ComponentKind::Chrominance);
        reference_length(ComponentKind::Chrominance, &pow2_table(&q)).unwrap()
    }

    fn check_identity(rf: &ReferenceConfig, target: Vec<u8>) -> Vec<DeltaEntry> {
        let target = SizeVector::new(target).unwrap();
        let entries = decompose(&target, rf).unwrap();
        let q = quantized_sizes(&target, &rf.exponents).unwrap();
        assert_eq!(recompose_length(rf, &entries), Rational::from_integer(i64::from(sizes_length(rf.table(), &q))));
        entries
    }

    #[test]
    fn reference_decomposes_to_nothing() {
        let rf = chroma_sf1();
        assert!(check_identity(&rf, vec![8; 63]).is_empty());
    }

    #[test]
    fn all_zero_target() {
        let rf = chroma_sf1();
        let entries = check_identity(&rf, vec![0; 63]);
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].kind, OpKind::Op4);
        assert_eq!((entries[0].position, entries[0].multiplicity), (0, 63));
    }

    #[test]
    fn mixed_target() {
        let rf = chroma_sf1();
        let mut t = vec![8; 63];
        t[2] = 0;
        t[3] = 0;
        t[4] = 9;
        t[10] = 7;
        t[20] = 0;
        t[21] = 7;
        t[30] = 10;
        t[40..].fill(0);
        let entries = check_identity(&rf, t);
        let kinds: Vec<OpKind> = entries.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, vec![OpKind::Op3, OpKind::Op6Alpha, OpKind::Op1, OpKind::Op2, OpKind::Op5Beta, OpKind::Op4]);
    }

    #[test]
    fn rejects_unreduced_and_oversized() {
        let rf = chroma_sf1();
        let mut t = vec![8; 63];
        t[62] = 1;
        assert!(matches!(decompose(&SizeVector::new(t).unwrap(), &rf), Err(Error::Constraint(_))));
        let mut t = vec![8; 63];
        t[0] = 9;
        assert!(matches!(decompose(&SizeVector::new(t).unwrap(), &rf), Err(Error::Constraint(_))));
        assert!(decompose(&SizeVector::new(vec![8; 10]).unwrap(), &rf).is_err());
    }
}
