#![allow(dead_code)]

/// Code length accumulated coefficient by coefficient, emitting explicit
/// zero-run extensions instead of extended runs.
pub fn per_coefficient_length(component: acbound::ComponentKind, sizes: &[u8]) -> u32 {
    let table = component.table();
    let mut bits = 0;
    let mut run = 0;
    for &s in sizes {
        if s == 0 {
            run += 1;
            continue;
        }
        while run > 15 {
            bits += table.zrl_bits();
            run -= 16;
        }
        bits += table.cell(run, s).unwrap();
        run = 0;
    }
    if run > 0 {
        bits += table.eob_bits();
    }
    bits
}

pub const DENSE_BLOCK_SAMPLES: &str = include_str!("../data/dense_block.txt");
