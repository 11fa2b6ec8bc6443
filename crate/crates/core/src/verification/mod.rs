//! Empirical checks of the limits: a full single-block encoder, adversarial
//! search for long codes, random and structured fuzzing, and an exhaustive
//! oracle on small instances.

mod fuzz;
mod oracle;
mod sampling;
mod search;

use serde::Serialize;

pub use fuzz::{soundness_fuzz, structured_blocks, FuzzSummary};
pub use oracle::{toy_oracle, ToyOutcome, MAX_TOY_POSITIONS};
pub use sampling::{decomposition_check, random_reduced_sizes, DecompositionCheck};
pub use search::{adversarial_search, adversarial_search_with_table, Mutation, SearchConfig, SearchOutcome};

use crate::bound::{upper_limit, Refinement};
use crate::entropy_model::{sequence_length, symbolize, ComponentKind, SymbolSequence, AC_POSITIONS};
use crate::error::Result;
use crate::quantization::{coefficient_size, quantize, QuantTable, Rounding, ScaleFactor, SizeVector};
use crate::transform::{forward_dct, DctConfig, PixelBlock};

/// A block whose 63 AC coefficients all land at size 7 or 8 when quantized
/// with unit factors; 999 luminance bits, 936 chrominance bits.
#[rustfmt::skip]
pub const DENSE_EXAMPLE_BLOCK: [[u8; 8]; 8] = [
    [252,  61, 199, 116, 120, 203,  71,  99],
    [ 61,  18,  34, 231,   2, 254, 111,  68],
    [199,  34, 229, 165, 192, 247, 250,  53],
    [116, 231, 165, 244, 136,   9,  59,   4],
    [120,   2, 192, 136, 233, 252,  27,  59],
    [203, 254, 247,   9, 252,   4,  16, 174],
    [ 71, 111, 250,  59,  27,  16, 247,  11],
    [ 99,  68,  53,   4,  59, 174,  11,   1],
];

pub fn dense_example() -> PixelBlock {
    PixelBlock::from_samples(DENSE_EXAMPLE_BLOCK)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EncodeReport {
    pub component: ComponentKind,
    pub sf: Option<ScaleFactor>,
    pub quantized_sizes: SizeVector,
    pub symbols: SymbolSequence,
    pub ac_bits: u32,
    pub limit: u32,
    pub slack: i64,
}

/// Encodes AC coefficients of single blocks against one quantization table.
/// The limit is the pruned one, the strongest the engine produces.
#[derive(Clone, Debug)]
pub struct BlockEncoder {
    component: ComponentKind,
    table: QuantTable,
    limit: u32,
    rounding: Rounding,
}

impl BlockEncoder {
    pub fn new(table: &QuantTable, component: ComponentKind) -> Result<Self> {
        let limit = upper_limit(component, table, Refinement::MaxconfigPruned)?.limit;
        Ok(BlockEncoder { component, table: table.clone(), limit, rounding: Rounding::Truncate })
    }

    pub fn with_rounding(mut self, rounding: Rounding) -> Self {
        self.rounding = rounding;
        self
    }

    pub fn limit(&self) -> u32 {
        self.limit
    }

    pub fn component(&self) -> ComponentKind {
        self.component
    }

    /// Quantized AC sizes in zigzag order.
    pub fn sizes(&self, config: &DctConfig) -> [u8; AC_POSITIONS] {
        std::array::from_fn(|i| {
            let k = i + 1;
            let a = quantize(config.zigzag(k), self.table.factor(k), self.rounding);
            // |F_uv| <= 1024 for any valid block, far inside the 11-bit range
            coefficient_size(a).unwrap_or(11)
        })
    }

    /// AC code length of a transformed block.
    pub fn ac_bits(&self, config: &DctConfig) -> u32 {
        crate::entropy_model::sizes_length(self.component.table(), &self.sizes(config))
    }

    pub fn encode(&self, block: &PixelBlock) -> Result<EncodeReport> {
        self.report(&forward_dct(block))
    }

    pub fn report(&self, config: &DctConfig) -> Result<EncodeReport> {
        let sizes = self.sizes(config);
        let symbols = symbolize(&sizes);
        let ac_bits = sequence_length(self.component.table(), &symbols);
        Ok(EncodeReport {
            component: self.component,
            sf: self.table.scale(),
            quantized_sizes: SizeVector::new(sizes.to_vec())?,
            symbols,
            ac_bits,
            limit: self.limit,
            slack: i64::from(self.limit) - i64::from(ac_bits),
        })
    }
}

/// DCT, quantization, run/size grouping and Huffman code length for one block.
pub fn encode_block(block: &PixelBlock, q: &QuantTable, component: ComponentKind) -> Result<EncodeReport> {
    BlockEncoder::new(q, component)?.encode(block)
}

/// Plain-text dump of a block as 8 lines of 8 samples in `0..=255`.
pub fn block_to_text(block: &PixelBlock) -> String {
    let mut out = String::new();
    for row in block.samples() {
        let line: Vec<String> = row.iter().map(u8::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finest(component: ComponentKind) -> QuantTable {
        QuantTable::annex_k_scaled(component, ScaleFactor::MIN).unwrap()
    }

    #[test]
    fn dense_example_lengths() {
        for (component, bits) in [(ComponentKind::Luminance, 999), (ComponentKind::Chrominance, 936)] {
            let r = encode_block(&dense_example(), &finest(component), component).unwrap();
            assert_eq!(r.ac_bits, bits);
            assert!(!r.symbols.has_eob);
            assert_eq!(r.quantized_sizes.iter().filter(|&&s| s == 8).count(), 18);
            assert_eq!(r.quantized_sizes.iter().filter(|&&s| s == 7).count(), 45);
            assert!(r.slack > 0);
        }
    }

    #[test]
    fn constant_block_is_eob_only() {
        for component in ComponentKind::ALL {
            for sf in ScaleFactor::standard_set() {
                let q = QuantTable::annex_k_scaled(component, sf).unwrap();
                for level in [-128, 0, 127] {
                    let r = encode_block(&PixelBlock::constant(level).unwrap(), &q, component).unwrap();
                    assert_eq!(r.ac_bits, component.table().eob_bits());
                    assert!(r.symbols.symbols.is_empty());
                }
            }
        }
    }

    #[test]
    fn text_dump_round_trips_samples() {
        let text = block_to_text(&dense_example());
        let first = text.lines().next().unwrap();
        assert_eq!(first, "252 61 199 116 120 203 71 99");
        assert_eq!(text.lines().count(), 8);
    }

    #[test]
    fn report_serializes() {
        let r = encode_block(&dense_example(), &finest(ComponentKind::Luminance), ComponentKind::Luminance).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["ac_bits"], 999);
        assert_eq!(v["sf"], "1/64");
        assert_eq!(v["limit"], 1134);
        assert_eq!(v["slack"], 135);
    }
}
