use serde::Serialize;

use crate::bound::{limit_for_exponents, Refinement, REFERENCE_UNIT};
use crate::entropy_model::{sizes_length, ComponentKind, MAX_AC_SIZE};
use crate::error::{Error, Result};
use crate::quantization::Pow2QuantTable;

pub const MAX_TOY_POSITIONS: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ToyOutcome {
    pub component: ComponentKind,
    pub exponents: Vec<u8>,
    pub exact_max: u32,
    /// Quantized sizes of one longest configuration.
    pub witness: Vec<u8>,
    /// Engine limits in [`Refinement::ALL`] order.
    pub engine_limits: [u32; 3],
}

impl ToyOutcome {
    pub fn engine_limit(&self) -> u32 {
        self.engine_limits[0]
    }

    pub fn is_sound(&self) -> bool {
        self.engine_limits.iter().all(|&l| l >= self.exact_max)
    }
}

/// Exhaustive maximum code length over every quantized size vector on
/// `exponents.len()` positions whose unquantized energy stays below
/// `(n + 1) * 2^14`, next to the engine limits for the same instance.
pub fn toy_oracle(component: ComponentKind, exponents: &[u8]) -> Result<ToyOutcome> {
    let n = exponents.len();
    if n == 0 {
        return Err(Error::Parameter("toy instance needs at least one position".into()));
    }
    if n > MAX_TOY_POSITIONS {
        return Err(Error::OracleTooLarge(n));
    }
    let c = Pow2QuantTable::from_exponents(component, exponents.to_vec());
    let limits = Refinement::ALL.map(|r| limit_for_exponents(&c, r).map(|b| b.limit));
    let mut engine_limits = [0; 3];
    for (slot, l) in engine_limits.iter_mut().zip(limits) {
        *slot = l?;
    }

    let budget = (n as u64 + 1) * REFERENCE_UNIT;
    let mut search = Search { component, exponents, budget, sizes: vec![0; n], best: 0, witness: vec![0; n] };
    search.run(0, 0);
    Ok(ToyOutcome {
        component,
        exponents: exponents.to_vec(),
        exact_max: search.best,
        witness: search.witness,
        engine_limits,
    })
}

struct Search<'a> {
    component: ComponentKind,
    exponents: &'a [u8],
    budget: u64,
    sizes: Vec<u8>,
    best: u32,
    witness: Vec<u8>,
}

impl Search<'_> {
    fn run(&mut self, k: usize, energy: u64) {
        if k == self.sizes.len() {
            let bits = sizes_length(self.component.table(), &self.sizes);
            if bits > self.best {
                self.best = bits;
                self.witness.clone_from(&self.sizes);
            }
            return;
        }
        let e = u32::from(self.exponents[k]);
        for s in 0..=MAX_AC_SIZE {
            let cost = if s == 0 { 0 } else { 1u64 << (2 * (u32::from(s) + e) - 2) };
            if energy + cost >= self.budget {
                break;
            }
            self.sizes[k] = s;
            self.run(k + 1, energy + cost);
        }
        self.sizes[k] = 0;
    }
}
