//! Code-length accounting for JPEG Baseline AC coefficients.
//!
//! Lengths are "Huffman code + amplitude bits" for each run/size symbol under
//! the typical annex-K AC Huffman tables. Runs of 16 to 62 zeros are kept as a
//! single symbol and charged one ZRL code per complete group of 16 zeros.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of AC coefficients in an 8x8 block.
pub const AC_POSITIONS: usize = 63;

/// Largest size a quantized AC coefficient can reach.
pub const MAX_AC_SIZE: u8 = 10;

/// Longest run of zeros that can precede a nonzero AC coefficient.
pub const MAX_RUN: usize = AC_POSITIONS - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Luminance,
    Chrominance,
}

impl ComponentKind {
    pub const ALL: [ComponentKind; 2] = [ComponentKind::Luminance, ComponentKind::Chrominance];

    pub fn table(self) -> &'static CodeLengthTable {
        match self {
            ComponentKind::Luminance => &LUMINANCE,
            ComponentKind::Chrominance => &CHROMINANCE,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            ComponentKind::Luminance => "lum",
            ComponentKind::Chrominance => "chroma",
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComponentKind::Luminance => "luminance",
            ComponentKind::Chrominance => "chrominance",
        })
    }
}

impl FromStr for ComponentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lum" | "luma" | "luminance" | "y" => Ok(ComponentKind::Luminance),
            "chroma" | "chrominance" | "c" | "cb" | "cr" => Ok(ComponentKind::Chrominance),
            other => Err(Error::Parameter(format!("unknown component `{other}`"))),
        }
    }
}

/// Per-component map from `(runlength, size)` to the total code length in bits.
#[derive(Debug, PartialEq, Eq)]
pub struct CodeLengthTable {
    component: ComponentKind,
    /// `grid[s - 1][r]` for sizes 1..=10 and runlengths 0..=15.
    grid: [[u8; 16]; 10],
    eob_bits: u8,
    zrl_bits: u8,
}

#[rustfmt::skip]
static CHROMINANCE: CodeLengthTable = CodeLengthTable {
    component: ComponentKind::Chrominance,
    grid: [
        [ 3,  5,  6,  6,  7,  7,  8,  8,  9, 10, 10, 10, 10, 12, 15, 16],
        [ 5,  8, 10, 10, 11, 12, 13, 13, 18, 18, 18, 18, 18, 18, 18, 18],
        [ 7, 11, 13, 13, 19, 19, 19, 19, 19, 19, 19, 19, 19, 19, 19, 19],
        [ 9, 13, 16, 16, 20, 20, 20, 20, 20, 20, 20, 20, 20, 20, 20, 20],
        [10, 16, 20, 21, 21, 21, 21, 21, 21, 21, 21, 21, 21, 21, 21, 21],
        [12, 18, 22, 22, 22, 22, 22, 22, 22, 22, 22, 22, 22, 22, 22, 22],
        [14, 23, 23, 23, 23, 23, 23, 23, 23, 23, 23, 23, 23, 23, 23, 23],
        [17, 24, 24, 24, 24, 24, 24, 24, 24, 24, 24, 24, 24, 24, 24, 24],
        [19, 25, 25, 25, 25, 25, 25, 25, 25, 25, 25, 25, 25, 25, 25, 25],
        [22, 26, 26, 26, 26, 26, 26, 26, 26, 26, 26, 26, 26, 26, 26, 26],
    ],
    eob_bits: 2,
    zrl_bits: 10,
};

#[rustfmt::skip]
static LUMINANCE: CodeLengthTable = CodeLengthTable {
    component: ComponentKind::Luminance,
    grid: [
        [ 3,  5,  6,  7,  7,  8,  8,  9, 10, 10, 10, 11, 11, 12, 17, 17],
        [ 4,  7, 10, 11, 12, 13, 14, 14, 17, 18, 18, 18, 18, 18, 18, 18],
        [ 6, 10, 13, 15, 19, 19, 19, 19, 19, 19, 19, 19, 19, 19, 19, 19],
        [ 8, 13, 16, 20, 20, 20, 20, 20, 20, 20, 20, 20, 20, 20, 20, 20],
        [10, 16, 21, 21, 21, 21, 21, 21, 21, 21, 21, 21, 21, 21, 21, 21],
        [13, 22, 22, 22, 22, 22, 22, 22, 22, 22, 22, 22, 22, 22, 22, 22],
        [15, 23, 23, 23, 23, 23, 23, 23, 23, 23, 23, 23, 23, 23, 23, 23],
        [18, 24, 24, 24, 24, 24, 24, 24, 24, 24, 24, 24, 24, 24, 24, 24],
        [25, 25, 25, 25, 25, 25, 25, 25, 25, 25, 25, 25, 25, 25, 25, 25],
        [26, 26, 26, 26, 26, 26, 26, 26, 26, 26, 26, 26, 26, 26, 26, 26],
    ],
    eob_bits: 4,
    zrl_bits: 11,
};

impl CodeLengthTable {
    pub fn component(&self) -> ComponentKind {
        self.component
    }

    pub fn eob_bits(&self) -> u32 {
        u32::from(self.eob_bits)
    }

    pub fn zrl_bits(&self) -> u32 {
        u32::from(self.zrl_bits)
    }

    /// Raw table cell for `r <= 15`, `1 <= s <= 10`.
    pub fn cell(&self, r: usize, s: u8) -> Result<u32> {
        if r > 15 || s == 0 || s > MAX_AC_SIZE {
            return Err(Error::Parameter(format!("no table cell for ({r}, {s})")));
        }
        Ok(u32::from(self.grid[usize::from(s) - 1][r]))
    }

    /// Bits for a nonzero coefficient of size `s` preceded by `r` zeros.
    pub fn code_length(&self, r: usize, s: u8) -> Result<u32> {
        if r > MAX_RUN || s == 0 || s > MAX_AC_SIZE {
            return Err(Error::Parameter(format!("symbol ({r}, {s}) outside runlength 0..=62, size 1..=10")));
        }
        Ok(self.len(r, s))
    }

    /// Unchecked variant of [`code_length`](Self::code_length) for hot loops.
    #[inline]
    pub(crate) fn len(&self, r: usize, s: u8) -> u32 {
        debug_assert!((1..=MAX_AC_SIZE).contains(&s) && r <= MAX_RUN);
        (r / 16) as u32 * u32::from(self.zrl_bits) + u32::from(self.grid[usize::from(s) - 1][r % 16])
    }

    /// Table layout used for documentation: rows are sizes 0..=10, columns
    /// runlengths 0..=15. Row 0 only carries EOB (r = 0) and ZRL (r = 15).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("size");
        for r in 0..16 {
            out.push_str(&format!(",{r}"));
        }
        out.push('\n');
        out.push('0');
        for r in 0..16 {
            out.push(',');
            match r {
                0 => out.push_str(&self.eob_bits.to_string()),
                15 => out.push_str(&self.zrl_bits.to_string()),
                _ => {}
            }
        }
        out.push('\n');
        for (i, row) in self.grid.iter().enumerate() {
            out.push_str(&(i + 1).to_string());
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// A run of zeros followed by a nonzero coefficient of the given size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub run: u8,
    pub size: u8,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolSequence {
    pub symbols: Vec<Symbol>,
    pub has_eob: bool,
}

impl SymbolSequence {
    /// Expands back into a size vector of length `positions`.
    pub fn expand(&self, positions: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(positions);
        for sym in &self.symbols {
            out.extend(std::iter::repeat_n(0, usize::from(sym.run)));
            out.push(sym.size);
        }
        out.resize(positions, 0);
        out
    }

    /// Number of coefficient positions consumed by the symbols.
    pub fn covered(&self) -> usize {
        self.symbols.iter().map(|s| usize::from(s.run) + 1).sum()
    }
}

/// Groups zigzag-ordered sizes into run/size symbols.
pub fn symbolize(sizes: &[u8]) -> SymbolSequence {
    let mut symbols = Vec::new();
    let mut run = 0u8;
    for &s in sizes {
        if s == 0 {
            run += 1;
        } else {
            symbols.push(Symbol { run, size: s });
            run = 0;
        }
    }
    SymbolSequence { symbols, has_eob: run > 0 }
}

pub fn sequence_length(table: &CodeLengthTable, seq: &SymbolSequence) -> u32 {
    let body: u32 = seq.symbols.iter().map(|s| table.len(usize::from(s.run), s.size)).sum();
    body + if seq.has_eob { table.eob_bits() } else { 0 }
}

/// Code length of a size vector without building the symbol list.
pub fn sizes_length(table: &CodeLengthTable, sizes: &[u8]) -> u32 {
    let mut bits = 0;
    let mut run = 0usize;
    for &s in sizes {
        if s == 0 {
            run += 1;
        } else {
            bits += table.len(run, s);
            run = 0;
        }
    }
    if run > 0 {
        bits += table.eob_bits();
    }
    bits
}

/// 63 coefficients at the longest Huffman code plus the longest amplitude,
/// plus the luminance EOB.
pub const fn crude_bound() -> u32 {
    const MAX_HUFFMAN_BITS: u32 = 16;
    63 * (MAX_HUFFMAN_BITS + MAX_AC_SIZE as u32) + 4
}

/// Largest magnitude of the difference between two quantized DC values.
pub fn max_dc_diff_amplitude(q00: u32) -> Result<u32> {
    if q00 == 0 {
        return Err(Error::Parameter("DC quantization factor must be >= 1".into()));
    }
    Ok(2 * (1 << 10) / q00)
}
