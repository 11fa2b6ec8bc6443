use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bound::{decompose, recompose_length, Rational, ReferenceConfig};
use crate::entropy_model::{sizes_length, MAX_AC_SIZE};
use crate::error::Result;
use crate::quantization::{quantized_sizes, SizeVector};

/// Random unquantized sizes that are reduced for `exponents` (every nonzero
/// size exceeds its exponent) and stay strictly inside the energy budget of
/// `exponents.len()` positions. Positions are visited in random order and a
/// drawn size that would overflow the budget is lowered until it fits, so
/// most samples sit close to the boundary of the budget.
pub fn random_reduced_sizes<R: Rng>(rng: &mut R, exponents: &[u8]) -> SizeVector {
    let n = exponents.len();
    let budget = (n as u64 + 1) << 14;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut sizes = vec![0u8; n];
    let mut energy = 0u64;
    for k in order {
        if rng.gen_bool(0.2) || exponents[k] >= MAX_AC_SIZE {
            continue;
        }
        let mut s = rng.gen_range(exponents[k] + 1..=MAX_AC_SIZE);
        while s > exponents[k] && energy + (1u64 << (2 * s - 2)) >= budget {
            s -= 1;
        }
        if s > exponents[k] {
            sizes[k] = s;
            energy += 1 << (2 * s - 2);
        }
    }
    SizeVector::new(sizes).expect("sizes within 0..=10")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionCheck {
    pub checked: usize,
    pub mismatches: usize,
    /// First configuration whose recomposed length differs, if any.
    pub counterexample: Option<SizeVector>,
}

/// Decomposes `samples` random reduced configurations and compares the
/// recomposed length with the directly encoded one.
pub fn decomposition_check(rf: &ReferenceConfig, samples: usize, seed: u64) -> Result<DecompositionCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = DecompositionCheck { checked: 0, mismatches: 0, counterexample: None };
    for _ in 0..samples {
        let target = random_reduced_sizes(&mut rng, rf.exponents.exponents());
        let entries = decompose(&target, rf)?;
        let direct = sizes_length(rf.table(), &quantized_sizes(&target, &rf.exponents)?);
        if recompose_length(rf, &entries) != Rational::from_integer(i64::from(direct)) {
            out.mismatches += 1;
            out.counterexample.get_or_insert(target);
        }
        out.checked += 1;
    }
    Ok(out)
}
