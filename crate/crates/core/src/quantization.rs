//! Quantization tables, scale factors, power-of-2 reduction and coefficient sizes.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::entropy_model::{ComponentKind, AC_POSITIONS, MAX_AC_SIZE};
use crate::error::{Error, Result};
use crate::transform::to_zigzag;

/// Largest AC factor accepted by the bound engine. Keeps every exponent at
/// most 6 so every reference size is at least 2.
pub const MAX_SUPPORTED_FACTOR: u16 = 121;

#[rustfmt::skip]
const ANNEX_K1: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61,
    12, 12, 14, 19, 26, 58, 60, 55,
    14, 13, 16, 24, 40, 57, 69, 56,
    14, 17, 22, 29, 51, 87, 80, 62,
    18, 22, 37, 56, 68, 109, 103, 77,
    24, 35, 55, 64, 81, 104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103, 99,
];

#[rustfmt::skip]
const ANNEX_K2: [u16; 64] = [
    17, 18, 24, 47, 99, 99, 99, 99,
    18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99,
    47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
];

/// Exact scale factor applied to the annex-K tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScaleFactor(Ratio<u64>);

impl ScaleFactor {
    pub const MIN: ScaleFactor = ScaleFactor(Ratio::new_raw(1, 64));
    pub const ONE: ScaleFactor = ScaleFactor(Ratio::new_raw(1, 1));

    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 || numer == 0 {
            return Err(Error::UnsupportedScale(format!("{numer}/{denom}")));
        }
        Ok(ScaleFactor(Ratio::new(numer, denom)))
    }

    /// The seven scale factors tabulated for the annex-K tables.
    pub fn standard_set() -> Vec<ScaleFactor> {
        [64, 16, 8, 6, 4, 2, 1].into_iter().map(|d| ScaleFactor(Ratio::new(1, d))).collect()
    }

    pub fn is_supported(&self) -> bool {
        *self >= Self::MIN && *self <= Self::ONE
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    /// `max(INT(sf * q0), 1)` in exact arithmetic.
    pub fn apply(&self, q0: u16) -> u16 {
        let scaled = (self.numer() * u64::from(q0)) / self.denom();
        scaled.max(1) as u16
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for ScaleFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for ScaleFactor {
    type Err = Error;

    /// Accepts `p/q`, integers, and finite decimals (`0.25` becomes `1/4`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnsupportedScale(s.to_string());
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| bad())?;
            let d: u64 = d.trim().parse().map_err(|_| bad())?;
            return ScaleFactor::new(n, d).map_err(|_| bad());
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
            let denom = 10u64.pow(frac.len() as u32);
            let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
            return ScaleFactor::new(int * denom + frac, denom).map_err(|_| bad());
        }
        let n: u64 = s.parse().map_err(|_| bad())?;
        ScaleFactor::new(n, 1).map_err(|_| bad())
    }
}

impl Serialize for ScaleFactor {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ScaleFactor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// 64 quantization factors in zigzag order; entry 0 is the DC factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantTable {
    component: ComponentKind,
    factors: [u16; 64],
    scale: Option<ScaleFactor>,
}

impl QuantTable {
    pub fn from_zigzag(component: ComponentKind, factors: [u16; 64]) -> Result<Self> {
        if let Some((k, q)) = factors.iter().enumerate().find(|(_, &q)| q == 0 || q > 255) {
            return Err(Error::Parameter(format!("factor {q} at zigzag index {k} outside 1..=255")));
        }
        Ok(QuantTable { component, factors, scale: None })
    }

    pub fn from_raster(component: ComponentKind, raster: [u16; 64]) -> Result<Self> {
        Self::from_zigzag(component, to_zigzag(&raster))
    }

    /// Table K.1 for luminance, K.2 for chrominance.
    pub fn annex_k(component: ComponentKind) -> Self {
        let raster = match component {
            ComponentKind::Luminance => ANNEX_K1,
            ComponentKind::Chrominance => ANNEX_K2,
        };
        QuantTable { component, factors: to_zigzag(&raster), scale: None }
    }

    /// Annex-K table for `component` scaled by `sf`.
    pub fn annex_k_scaled(component: ComponentKind, sf: ScaleFactor) -> Result<Self> {
        scale_table(&Self::annex_k(component), sf)
    }

    pub fn component(&self) -> ComponentKind {
        self.component
    }

    pub fn scale(&self) -> Option<ScaleFactor> {
        self.scale
    }

    pub fn dc(&self) -> u16 {
        self.factors[0]
    }

    /// Factor at zigzag position `k` (0 is DC).
    pub fn factor(&self, k: usize) -> u16 {
        self.factors[k]
    }

    pub fn zigzag(&self) -> &[u16; 64] {
        &self.factors
    }

    /// AC factors, zigzag positions 1..=63.
    pub fn ac(&self) -> &[u16] {
        &self.factors[1..]
    }

    /// Raster (row-major) copy of the factors.
    pub fn raster(&self) -> [u16; 64] {
        crate::transform::from_zigzag(&self.factors)
    }

    /// `Q(l) <= 2 Q(k) + 1` for every pair of AC positions `l < k`.
    pub fn satisfies_doubling_relation(&self) -> bool {
        let ac = self.ac();
        (0..ac.len()).all(|k| ac[..k].iter().all(|&l| u32::from(l) <= 2 * u32::from(ac[k]) + 1))
    }

    pub fn with_component(mut self, component: ComponentKind) -> Self {
        self.component = component;
        self
    }

    /// Parses the plain-text table format: an `order: raster|zigzag` header
    /// line followed by 64 whitespace-separated integers. Lines starting with
    /// `#` are ignored.
    pub fn parse(component: ComponentKind, text: &str) -> Result<Self> {
        let mut order: Option<bool> = None; // Some(true) = raster
        let mut values = Vec::with_capacity(64);
        for (ln, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if order.is_none() {
                let (key, val) = trimmed.split_once(':').ok_or_else(|| Error::Parse {
                    line: ln + 1,
                    column: 1,
                    message: "expected `order: raster|zigzag` header".into(),
                })?;
                if key.trim() != "order" {
                    return Err(Error::Parse {
                        line: ln + 1,
                        column: 1,
                        message: format!("unknown header key `{}`", key.trim()),
                    });
                }
                order = Some(match val.trim() {
                    "raster" => true,
                    "zigzag" => false,
                    other => {
                        return Err(Error::Parse {
                            line: ln + 1,
                            column: line.find(other).unwrap_or(0) + 1,
                            message: format!("unknown order `{other}`"),
                        })
                    }
                });
                continue;
            }
            for (col, tok) in tokens_with_columns(line) {
                let v: u16 = tok.parse().map_err(|_| Error::Parse {
                    line: ln + 1,
                    column: col,
                    message: format!("`{tok}` is not a quantization factor"),
                })?;
                if v == 0 || v > 255 {
                    return Err(Error::Parse {
                        line: ln + 1,
                        column: col,
                        message: format!("factor {v} outside 1..=255"),
                    });
                }
                values.push(v);
            }
        }
        let raster =
            order.ok_or_else(|| Error::Parse { line: 1, column: 1, message: "missing `order:` header".into() })?;
        let arr: [u16; 64] = values.as_slice().try_into().map_err(|_| Error::Parse {
            line: text.lines().count().max(1),
            column: 1,
            message: format!("expected 64 factors, found {}", values.len()),
        })?;
        if raster {
            Self::from_raster(component, arr)
        } else {
            Self::from_zigzag(component, arr)
        }
    }
}

/// Whitespace-separated tokens with their 1-based column.
pub(crate) fn tokens_with_columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut start = None;
    let mut out = Vec::new();
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out.into_iter()
}

/// Scales every factor by `sf`, flooring and clamping at 1.
pub fn scale_table(base: &QuantTable, sf: ScaleFactor) -> Result<QuantTable> {
    if !sf.is_supported() {
        return Err(Error::UnsupportedScale(sf.to_string()));
    }
    Ok(QuantTable { component: base.component, factors: base.factors.map(|q| sf.apply(q)), scale: Some(sf) })
}

/// Exponents `C(k) = floor(log2 Q(k))` for the AC positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pow2QuantTable {
    component: ComponentKind,
    exponents: Vec<u8>,
}

impl Pow2QuantTable {
    /// Exponents for an arbitrary number of AC positions (used by small
    /// test instances).
    pub fn from_exponents(component: ComponentKind, exponents: Vec<u8>) -> Self {
        Pow2QuantTable { component, exponents }
    }

    pub fn component(&self) -> ComponentKind {
        self.component
    }

    /// `exponents()[k - 1]` is `C(k)`.
    pub fn exponents(&self) -> &[u8] {
        &self.exponents
    }

    pub fn exponent(&self, k: usize) -> u8 {
        self.exponents[k - 1]
    }

    pub fn max_exponent(&self) -> u8 {
        self.exponents.iter().copied().max().unwrap_or(0)
    }

    /// `C(l) <= C(k) + 1` for every `l < k`.
    pub fn satisfies_interdependence(&self) -> bool {
        let mut running_max = 0u8;
        for (i, &c) in self.exponents.iter().enumerate() {
            if i > 0 && running_max > c + 1 {
                return false;
            }
            running_max = running_max.max(c);
        }
        true
    }
}

pub fn pow2_table(q: &QuantTable) -> Pow2QuantTable {
    Pow2QuantTable { component: q.component, exponents: q.ac().iter().map(|&f| floor_log2(f)).collect() }
}

fn floor_log2(q: u16) -> u8 {
    debug_assert!(q >= 1);
    (15 - q.leading_zeros()) as u8
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    /// Integer portion, truncating toward zero.
    #[default]
    Truncate,
    /// Nearest integer, halves away from zero.
    Nearest,
}

pub fn quantize(value: f64, q: u16, rounding: Rounding) -> i32 {
    let x = value / f64::from(q);
    match rounding {
        Rounding::Truncate => x.trunc() as i32,
        Rounding::Nearest => x.round() as i32,
    }
}

/// Smallest `s` with `|a| < 2^s`.
pub fn coefficient_size(a: i32) -> Result<u8> {
    let m = a.unsigned_abs();
    if m > 2047 {
        return Err(Error::Range(a));
    }
    Ok((32 - m.leading_zeros()) as u8)
}

/// Coefficient sizes in zigzag order, each in `0..=10`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SizeVector(Vec<u8>);

impl SizeVector {
    pub fn new(sizes: Vec<u8>) -> Result<Self> {
        if let Some((k, &s)) = sizes.iter().enumerate().find(|(_, &s)| s > MAX_AC_SIZE) {
            return Err(Error::Parameter(format!("size {s} at position {} exceeds 10", k + 1)));
        }
        if sizes.len() > AC_POSITIONS {
            return Err(Error::Parameter(format!("{} positions exceed 63", sizes.len())));
        }
        Ok(SizeVector(sizes))
    }

    pub fn constant(size: u8, positions: usize) -> Result<Self> {
        Self::new(vec![size; positions])
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    /// Size at 1-based zigzag position `k`.
    pub fn at(&self, k: usize) -> u8 {
        self.0[k - 1]
    }
}

impl Deref for SizeVector {
    type Target = [u8];

    fn deref(&self) -> &[u8] {
        &self.0
    }
}

/// `s_k = max(S(k) - C(k), 0)`.
pub fn quantized_sizes(unquantized: &SizeVector, c: &Pow2QuantTable) -> Result<SizeVector> {
    if unquantized.len() != c.exponents.len() {
        return Err(Error::Parameter(format!(
            "size vector has {} positions, exponent table {}",
            unquantized.len(),
            c.exponents.len()
        )));
    }
    Ok(SizeVector(unquantized.iter().zip(&c.exponents).map(|(&s, &e)| s.saturating_sub(e)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sf(s: &str) -> ScaleFactor {
        s.parse().unwrap()
    }

    #[test]
    fn annex_k_scaling_endpoints() {
        let k1 = QuantTable::annex_k(ComponentKind::Luminance);
        let tiny = scale_table(&k1, ScaleFactor::MIN).unwrap();
        assert!(tiny.zigzag().iter().all(|&q| q == 1));
        let same = scale_table(&k1, ScaleFactor::ONE).unwrap();
        assert_eq!(same.zigzag(), k1.zigzag());
        assert_eq!(sf("1/2").apply(16), 8);
    }

    #[test]
    fn unsupported_scales() {
        let k1 = QuantTable::annex_k(ComponentKind::Luminance);
        assert!(matches!(scale_table(&k1, sf("2")), Err(Error::UnsupportedScale(_))));
        assert!(matches!(scale_table(&k1, sf("1/65")), Err(Error::UnsupportedScale(_))));
        assert!("0".parse::<ScaleFactor>().is_err());
        assert!("abc".parse::<ScaleFactor>().is_err());
    }

    #[test]
    fn scale_factor_parsing_is_exact() {
        assert_eq!(sf("1/6").to_string(), "1/6");
        assert_eq!(sf("0.25"), sf("1/4"));
        assert_eq!(sf("2/12"), sf("1/6"));
        assert_eq!(sf("1").to_string(), "1");
        assert_eq!(sf("1/6").apply(96), 16);
        assert_eq!(sf("0.1666").apply(96), 15);
    }

    #[test]
    fn chroma_zigzag_listing() {
        let k2 = QuantTable::annex_k(ComponentKind::Chrominance);
        assert_eq!(&k2.ac()[..14], &[18, 18, 24, 21, 24, 47, 26, 26, 47, 99, 66, 56, 66, 99]);
        assert!(k2.ac()[14..].iter().all(|&q| q == 99));
    }

    #[test]
    fn chroma_exponents() {
        let c = pow2_table(&QuantTable::annex_k(ComponentKind::Chrominance));
        for k in 1..=63 {
            let expect = match k {
                1..=5 | 7 | 8 => 4,
                6 | 9 | 12 => 5,
                _ => 6,
            };
            assert_eq!(c.exponent(k), expect, "k = {k}");
        }
    }

    #[test]
    fn exponents_use_integer_bit_length() {
        let mut f = [1u16; 64];
        assert!(pow2_table(&QuantTable::from_zigzag(ComponentKind::Luminance, f).unwrap())
            .exponents()
            .iter()
            .all(|&c| c == 0));
        f[1] = 121;
        f[2] = 64;
        f[3] = 63;
        let c = pow2_table(&QuantTable::from_zigzag(ComponentKind::Luminance, f).unwrap());
        assert_eq!(&c.exponents()[..3], &[6, 6, 5]);
        for q in 1..=255u16 {
            let e = floor_log2(q);
            assert!(1u32 << e <= u32::from(q) && u32::from(q) < 1u32 << (e + 1));
        }
    }

    #[test]
    fn quantize_truncates() {
        assert_eq!(quantize(-17.0, 10, Rounding::Truncate), -1);
        assert_eq!(quantize(255.0, 1, Rounding::Truncate), 255);
        assert_eq!(quantize(127.9, 16, Rounding::Truncate), 7);
        assert_eq!(quantize(-17.0, 10, Rounding::Nearest), -2);
    }

    #[test]
    fn sizes() {
        assert_eq!(coefficient_size(0).unwrap(), 0);
        assert_eq!(coefficient_size(-1).unwrap(), 1);
        assert_eq!(coefficient_size(255).unwrap(), 8);
        assert_eq!(coefficient_size(-2047).unwrap(), 11);
        assert!(matches!(coefficient_size(2048), Err(Error::Range(2048))));
    }

    #[test]
    fn reference_sizes_for_chroma() {
        let c = pow2_table(&QuantTable::annex_k(ComponentKind::Chrominance));
        let s = quantized_sizes(&SizeVector::constant(8, 63).unwrap(), &c).unwrap();
        assert_eq!(s.iter().filter(|&&x| x == 4).count(), 7);
        assert_eq!(s.iter().filter(|&&x| x == 3).count(), 3);
        assert_eq!(s.iter().filter(|&&x| x == 2).count(), 53);

        let z = quantized_sizes(&SizeVector::constant(0, 63).unwrap(), &c).unwrap();
        assert!(z.iter().all(|&x| x == 0));

        let ones = pow2_table(&QuantTable::from_zigzag(ComponentKind::Chrominance, [1; 64]).unwrap());
        let s = quantized_sizes(&SizeVector::constant(8, 63).unwrap(), &ones).unwrap();
        assert!(s.iter().all(|&x| x == 8));
    }

    #[test]
    fn size_vector_validation() {
        assert!(SizeVector::new(vec![11]).is_err());
        assert!(SizeVector::new(vec![0; 64]).is_err());
    }

    #[test]
    fn table_file_parsing() {
        let mut text = String::from("# annex K.2\norder: raster\n");
        for row in ANNEX_K2.chunks(8) {
            text.push_str(&row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "));
            text.push('\n');
        }
        let t = QuantTable::parse(ComponentKind::Chrominance, &text).unwrap();
        assert_eq!(t, QuantTable::annex_k(ComponentKind::Chrominance));

        let zz: Vec<String> = t.zigzag().iter().map(|v| v.to_string()).collect();
        let text = format!("order: zigzag\n{}\n", zz.join(" "));
        assert_eq!(QuantTable::parse(ComponentKind::Chrominance, &text).unwrap(), t);
    }

    #[test]
    fn table_file_errors_carry_position() {
        let err = QuantTable::parse(ComponentKind::Luminance, "order: raster\n1 2 x 4\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 2, column: 5, message: "`x` is not a quantization factor".into() });
        assert!(matches!(QuantTable::parse(ComponentKind::Luminance, "1 2 3"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(QuantTable::parse(ComponentKind::Luminance, "order: diagonal\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            QuantTable::parse(ComponentKind::Luminance, "order: zigzag\n1 2 3\n"),
            Err(Error::Parse { .. })
        ));
    }
}
