use std::fmt::{self, Debug, Display};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

/// Coefficient field of a matrix or matroid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldTag {
    #[serde(rename = "GF2")]
    Gf2,
    #[serde(rename = "Rational")]
    Rational,
}

impl FieldTag {
    pub fn name(self) -> &'static str {
        match self {
            FieldTag::Gf2 => "GF2",
            FieldTag::Rational => "Rational",
        }
    }

    pub fn parse(s: &str) -> Option<FieldTag> {
        match s.trim() {
            "GF2" | "gf2" | "F2" => Some(FieldTag::Gf2),
            "Rational" | "rational" | "Q" => Some(FieldTag::Rational),
            _ => None,
        }
    }
}

impl Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exact field arithmetic used by every elimination routine in the crate.
pub trait Field: Clone + PartialEq + Eq + Hash + Debug + Display + Send + Sync + 'static {
    const TAG: FieldTag;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Panics on division by zero.
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_i64(v: i64) -> Self;
    fn parse_elem(s: &str) -> Option<Self>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// `self - factor * other`, the inner step of every row operation.
    fn sub_mul(&self, factor: &Self, other: &Self) -> Self {
        self.sub(&factor.mul(other))
    }

    /// Reduce `rows` (each of length `ncols`) to reduced row echelon form in
    /// place and return the pivots as `(row, col)` pairs in column order.
    ///
    /// Pivot rule: scan columns left to right and take the smallest-index
    /// row that is not yet a pivot row and has a nonzero entry.
    fn eliminate(rows: &mut [Vec<Self>], ncols: usize) -> Vec<(usize, usize)> {
        eliminate_generic(rows, ncols)
    }
}

pub(crate) fn eliminate_generic<F: Field>(rows: &mut [Vec<F>], ncols: usize) -> Vec<(usize, usize)> {
    let mut used = vec![false; rows.len()];
    let mut pivots = Vec::new();
    for c in 0..ncols {
        let Some(p) = (0..rows.len()).find(|&r| !used[r] && !rows[r][c].is_zero()) else {
            continue;
        };
        used[p] = true;
        let inv = F::one().div(&rows[p][c]);
        if !inv.is_one() {
            for x in rows[p][c..].iter_mut() {
                *x = x.mul(&inv);
            }
        }
        let pivot_row = rows[p].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == p || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                if !y.is_zero() {
                    *x = x.sub_mul(&factor, y);
                }
            }
        }
        pivots.push((p, c));
        if pivots.len() == rows.len() {
            break;
        }
    }
    pivots
}

/// The two-element field.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gf2(pub bool);

impl Gf2 {
    pub const ZERO: Gf2 = Gf2(false);
    pub const ONE: Gf2 = Gf2(true);
}

impl Debug for Gf2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(self.0))
    }
}

impl Display for Gf2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(self.0))
    }
}

impl Field for Gf2 {
    const TAG: FieldTag = FieldTag::Gf2;

    fn zero() -> Self {
        Gf2(false)
    }
    fn one() -> Self {
        Gf2(true)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
    fn add(&self, other: &Self) -> Self {
        Gf2(self.0 ^ other.0)
    }
    fn sub(&self, other: &Self) -> Self {
        Gf2(self.0 ^ other.0)
    }
    fn mul(&self, other: &Self) -> Self {
        Gf2(self.0 & other.0)
    }
    fn div(&self, other: &Self) -> Self {
        assert!(other.0, "division by zero in GF(2)");
        *self
    }
    fn neg(&self) -> Self {
        *self
    }
    fn from_i64(v: i64) -> Self {
        Gf2(v.rem_euclid(2) == 1)
    }
    fn parse_elem(s: &str) -> Option<Self> {
        // Accept rationals with odd denominator, reduced mod 2.
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((p, q)) => (p.trim().parse::<i64>().ok()?, q.trim().parse::<i64>().ok()?),
            None => (s.parse::<i64>().ok()?, 1),
        };
        if den.rem_euclid(2) == 0 {
            return None;
        }
        Some(Gf2::from_i64(num))
    }

    fn eliminate(rows: &mut [Vec<Self>], ncols: usize) -> Vec<(usize, usize)> {
        let mut packed: Vec<BitRow> = rows.iter().map(|r| BitRow::from_bits(r.iter().map(|x| x.0))).collect();
        let pivots = BitRow::eliminate(&mut packed, ncols);
        for (row, bits) in rows.iter_mut().zip(&packed) {
            for (c, x) in row.iter_mut().enumerate() {
                *x = Gf2(bits.get(c));
            }
        }
        pivots
    }
}

/// A GF(2) row packed 64 entries per word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BitRow {
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(len: usize) -> BitRow {
        BitRow { words: vec![0; len.div_ceil(64)] }
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> BitRow {
        let mut words = Vec::new();
        for (i, b) in bits.into_iter().enumerate() {
            if i % 64 == 0 {
                words.push(0);
            }
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        BitRow { words }
    }

    pub fn get(&self, i: usize) -> bool {
        self.words.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub fn set(&mut self, i: usize, v: bool) {
        if i / 64 >= self.words.len() {
            self.words.resize(i / 64 + 1, 0);
        }
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + t)
            })
        })
    }

    /// Bit-packed counterpart of [`eliminate_generic`], same pivot rule.
    pub fn eliminate(rows: &mut [BitRow], ncols: usize) -> Vec<(usize, usize)> {
        let mut used = vec![false; rows.len()];
        let mut pivots = Vec::new();
        for c in 0..ncols {
            let Some(p) = (0..rows.len()).find(|&r| !used[r] && rows[r].get(c)) else {
                continue;
            };
            used[p] = true;
            let pivot_row = rows[p].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != p && row.get(c) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push((p, c));
            if pivots.len() == rows.len() {
                break;
            }
        }
        pivots
    }
}
