use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{dense_example, BlockEncoder};
use crate::entropy_model::ComponentKind;
use crate::error::{Error, Result};
use crate::quantization::{QuantTable, ScaleFactor};
use crate::transform::{dct_matrix, forward_dct, PixelBlock};

const CHUNK: usize = 4096;
const SATURATED_NOISE_BLOCKS: u64 = 256;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzSummary {
    pub component: ComponentKind,
    pub sf: Option<ScaleFactor>,
    pub random_blocks: usize,
    pub structured_blocks: usize,
    pub limit: u32,
    pub max_bits: u32,
    pub min_slack: i64,
    pub worst_block: PixelBlock,
}

fn block_from_fn(mut f: impl FnMut(usize, usize) -> i32) -> PixelBlock {
    let mut b = PixelBlock::constant(0).expect("zero block");
    for x in 0..8 {
        for y in 0..8 {
            b.set_clamped(x, y, f(x, y));
        }
    }
    b
}

/// Extreme blocks that uniform noise rarely reaches: constants,
/// checkerboards, cosine and square-wave gratings at every frequency,
/// saturated two-level noise, and the dense example block.
pub fn structured_blocks(seed: u64) -> Vec<PixelBlock> {
    let mut out = Vec::new();
    for level in [-128, 0, 127] {
        out.push(block_from_fn(|_, _| level));
    }
    for period in [1, 2, 4] {
        for (lo, hi) in [(-128, 127), (127, -128)] {
            out.push(block_from_fn(|x, y| if (x / period + y / period) % 2 == 0 { lo } else { hi }));
            out.push(block_from_fn(|x, _| if (x / period) % 2 == 0 { lo } else { hi }));
            out.push(block_from_fn(|_, y| if (y / period) % 2 == 0 { lo } else { hi }));
        }
    }
    let k = dct_matrix();
    for u in 0..8 {
        for v in 0..8 {
            if u == 0 && v == 0 {
                continue;
            }
            let basis = |x: usize, y: usize| k[x][u] * k[y][v];
            let peak = (0..64).map(|i| basis(i / 8, i % 8).abs()).fold(0.0, f64::max);
            for sign in [1.0, -1.0] {
                out.push(block_from_fn(|x, y| (sign * 127.5 * basis(x, y) / peak - 0.5).round() as i32));
                out.push(block_from_fn(|x, y| if sign * basis(x, y) >= 0.0 { 127 } else { -128 }));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    for _ in 0..SATURATED_NOISE_BLOCKS {
        out.push(block_from_fn(|_, _| if rng.gen::<bool>() { 127 } else { -128 }));
    }
    out.push(dense_example());
    out
}

fn uniform_chunk(seed: u64, chunk: usize, count: usize) -> impl Iterator<Item = PixelBlock> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    (0..count).map(move |_| {
        let mut b = PixelBlock::constant(0).expect("zero block");
        for x in 0..8 {
            for y in 0..8 {
                b.set_clamped(x, y, rng.gen_range(-128..=127));
            }
        }
        b
    })
}

fn better(a: (u32, PixelBlock), b: (u32, PixelBlock)) -> (u32, PixelBlock) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Encodes `trials` uniform random blocks plus [`structured_blocks`] and
/// checks every code length against the pruned limit.
pub fn soundness_fuzz(trials: usize, q: &QuantTable, component: ComponentKind, seed: u64) -> Result<FuzzSummary> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be positive".into()));
    }
    let encoder = BlockEncoder::new(q, component)?;
    let score = |b: PixelBlock| (encoder.ac_bits(&forward_dct(&b)), b);

    let structured = structured_blocks(seed);
    let chunks = trials.div_ceil(CHUNK);
    let random_best = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(trials - c * CHUNK);
            uniform_chunk(seed, c, count).map(score).reduce(better).expect("non-empty chunk")
        })
        .reduce_with(better)
        .expect("at least one chunk");
    let worst =
        structured.par_iter().map(|&b| score(b)).reduce_with(better).map_or(random_best, |s| better(random_best, s));

    let (max_bits, worst_block) = worst;
    if max_bits > encoder.limit() {
        return Err(Error::SoundnessViolation {
            bits: max_bits,
            limit: encoder.limit(),
            block: Box::new(*worst_block.values()),
        });
    }
    Ok(FuzzSummary {
        component,
        sf: q.scale(),
        random_blocks: trials,
        structured_blocks: structured.len(),
        limit: encoder.limit(),
        max_bits,
        min_slack: i64::from(encoder.limit()) - i64::from(max_bits),
        worst_block,
    })
}
