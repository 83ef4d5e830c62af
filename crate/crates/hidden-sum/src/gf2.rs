//! Dense linear algebra over GF(2) for widths up to 16.
//!
//! Conventions used across the whole crate:
//!
//! * Vectors are **row** vectors and matrices act on the **right**:
//!   `y = x * A`, so row `i` of a matrix is the image of the `i`-th standard
//!   basis vector.
//! * Coordinate `x_1` lives in the least-significant bit.  Every textual
//!   format prints coordinates in `x_1, x_2, ...` order, i.e. the leftmost
//!   character of a bitstring is `x_1`.
//! * Indices in code are 0-based (`unit(w, 0)` is `e_1`); human-readable
//!   output uses the customary 1-based names.

use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported vector width.
pub const MAX_WIDTH: u8 = 16;

fn check_width(width: u8) {
    assert!(
        (1..=MAX_WIDTH).contains(&width),
        "width must be between 1 and {MAX_WIDTH}, got {width}"
    );
}

/// A vector in GF(2)^width, packed into a `u16`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    width: u8,
    bits: u16,
}

impl BitVector {
    /// Builds a vector from packed bits (coordinate `x_{i+1}` at bit `i`).
    ///
    /// Panics if the width is out of range or `bits` has bits set beyond it.
    pub fn new(width: u8, bits: u16) -> Self {
        check_width(width);
        assert!(
            (bits as u32) < (1u32 << width),
            "bits 0x{bits:x} out of range for width {width}"
        );
        BitVector { width, bits }
    }

    /// The zero vector.
    pub fn zero(width: u8) -> Self {
        BitVector::new(width, 0)
    }

    /// The standard basis vector with coordinate `i` (0-based) set.
    pub fn unit(width: u8, i: usize) -> Self {
        assert!(i < width as usize, "coordinate {i} out of range");
        BitVector::new(width, 1 << i)
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    /// The packed representation (coordinate `x_{i+1}` at bit `i`).
    pub fn bits(&self) -> u16 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Coordinate `i` (0-based).
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.width as usize, "coordinate {i} out of range");
        (self.bits >> i) & 1 == 1
    }

    /// Copy of `self` with coordinate `i` set to `value`.
    pub fn with_bit(&self, i: usize, value: bool) -> Self {
        assert!(i < self.width as usize, "coordinate {i} out of range");
        let bits = if value { self.bits | 1 << i } else { self.bits & !(1 << i) };
        BitVector { width: self.width, bits }
    }

    /// Number of nonzero coordinates.
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Standard inner product `sum_i x_i y_i` over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.width, other.width, "width mismatch");
        (self.bits & other.bits).count_ones() % 2 == 1
    }

    /// Iterator over the indices of nonzero coordinates (ascending).
    pub fn support(&self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..16).filter(move |i| (bits >> i) & 1 == 1)
    }

    /// Concatenation: `self` occupies the low coordinates, `other` the high.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let width = self.width + other.width;
        check_width(width);
        BitVector::new(width, self.bits | other.bits << self.width)
    }

    /// Splits into `(low, high)` parts of widths `low_width` and the rest.
    pub fn split(&self, low_width: u8) -> (BitVector, BitVector) {
        assert!(0 < low_width && low_width < self.width, "bad split width");
        let low = self.bits & ((1 << low_width) - 1);
        let high = self.bits >> low_width;
        (
            BitVector::new(low_width, low),
            BitVector::new(self.width - low_width, high),
        )
    }

    /// All vectors of the given width, in packed-value order.
    pub fn all(width: u8) -> impl Iterator<Item = BitVector> {
        check_width(width);
        (0..1u32 << width).map(move |b| BitVector::new(width, b as u16))
    }
}

impl BitXor for BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: BitVector) -> BitVector {
        assert_eq!(self.width, rhs.width, "width mismatch");
        BitVector { width: self.width, bits: self.bits ^ rhs.bits }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width as usize {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    /// Parses a bitstring; the leftmost character is coordinate `x_1`.
    fn from_str(s: &str) -> Result<BitVector> {
        let s = s.trim();
        if s.is_empty() || s.len() > MAX_WIDTH as usize {
            return Err(Error::Parse(format!(
                "bitstring must have 1..={MAX_WIDTH} characters, got {:?}",
                s
            )));
        }
        let mut bits = 0u16;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => bits |= 1 << i,
                '0' => {}
                other => {
                    return Err(Error::Parse(format!(
                        "bitstring may only contain 0/1, found {other:?}"
                    )))
                }
            }
        }
        Ok(BitVector::new(s.len() as u8, bits))
    }
}

/// A square matrix over GF(2), stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    width: u8,
    rows: Vec<u16>,
}

impl BitMatrix {
    /// The zero matrix.
    pub fn zero(width: u8) -> Self {
        check_width(width);
        BitMatrix { width, rows: vec![0; width as usize] }
    }

    /// The identity matrix.
    pub fn identity(width: u8) -> Self {
        check_width(width);
        BitMatrix { width, rows: (0..width as usize).map(|i| 1 << i).collect() }
    }

    /// Builds a matrix from its rows (row `i` = image of `e_{i+1}`).
    pub fn from_rows(rows: &[BitVector]) -> Self {
        assert!(!rows.is_empty(), "matrix needs at least one row");
        let width = rows[0].width();
        assert_eq!(rows.len(), width as usize, "matrix must be square");
        assert!(rows.iter().all(|r| r.width() == width), "row width mismatch");
        BitMatrix { width, rows: rows.iter().map(|r| r.bits()).collect() }
    }

    /// Builds a matrix from packed row values.
    pub fn from_row_bits(width: u8, rows: &[u16]) -> Self {
        BitMatrix::from_rows(
            &rows.iter().map(|&r| BitVector::new(width, r)).collect::<Vec<_>>(),
        )
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    /// Row `i` as a vector.
    pub fn row(&self, i: usize) -> BitVector {
        BitVector::new(self.width, self.rows[i])
    }

    pub fn set_row(&mut self, i: usize, row: BitVector) {
        assert_eq!(row.width(), self.width, "width mismatch");
        self.rows[i] = row.bits();
    }

    /// Right action `x * A`: XOR of the rows selected by the bits of `x`.
    pub fn apply(&self, x: BitVector) -> BitVector {
        assert_eq!(x.width(), self.width, "width mismatch");
        let mut acc = 0u16;
        let mut bits = x.bits();
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            acc ^= self.rows[i];
        }
        BitVector { width: self.width, bits: acc }
    }

    /// Matrix product `self * rhs` (apply `self` first: `x (A B) = (x A) B`).
    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.width, rhs.width, "width mismatch");
        let rows = (0..self.width as usize)
            .map(|i| rhs.apply(self.row(i)).bits())
            .collect();
        BitMatrix { width: self.width, rows }
    }

    /// Entrywise sum (= XOR of rows).
    pub fn add(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.width, rhs.width, "width mismatch");
        let rows = self.rows.iter().zip(&rhs.rows).map(|(a, b)| a ^ b).collect();
        BitMatrix { width: self.width, rows }
    }

    pub fn transpose(&self) -> BitMatrix {
        let n = self.width as usize;
        let mut rows = vec![0u16; n];
        for (i, &r) in self.rows.iter().enumerate() {
            for (j, row) in rows.iter_mut().enumerate() {
                *row |= (r >> j & 1) << i;
            }
        }
        BitMatrix { width: self.width, rows }
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, &r)| r == 1 << i)
    }

    /// Rank via Gaussian elimination.
    pub fn rank(&self) -> usize {
        rank_of(&mut self.rows.clone())
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.width as usize
    }

    /// Inverse matrix, or [`Error::Singular`].
    pub fn inverse(&self) -> Result<BitMatrix> {
        let n = self.width as usize;
        let mut m = self.rows.clone();
        let mut inv: Vec<u16> = (0..n).map(|i| 1 << i).collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| m[r] >> col & 1 == 1)
                .ok_or(Error::Singular)?;
            m.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..n {
                if r != col && m[r] >> col & 1 == 1 {
                    m[r] ^= m[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Ok(BitMatrix { width: self.width, rows: inv })
    }

    /// Basis of the left kernel `{x : x * A = 0}`.
    pub fn kernel_basis(&self) -> Vec<BitVector> {
        let mut pivots: Vec<(u16, u16)> = Vec::new(); // (reduced row, combination)
        let mut kernel = Vec::new();
        for i in 0..self.width as usize {
            let mut v = self.rows[i];
            let mut combo = 1u16 << i;
            for &(pv, pc) in &pivots {
                let col = pv.trailing_zeros();
                if v >> col & 1 == 1 {
                    v ^= pv;
                    combo ^= pc;
                }
            }
            if v == 0 {
                kernel.push(BitVector::new(self.width, combo));
            } else {
                pivots.push((v, combo));
            }
        }
        kernel
    }

    /// Whether `A + I` is nilpotent, i.e. `A` is unipotent.
    pub fn is_unipotent(&self) -> bool {
        let mut n = self.add(&BitMatrix::identity(self.width));
        // Nilpotency index is at most the width; four squarings reach 16.
        for _ in 0..4 {
            n = n.mul(&n);
        }
        n.rows.iter().all(|&r| r == 0)
    }
}

fn rank_of(rows: &mut [u16]) -> usize {
    let mut rank = 0;
    for col in 0..16 {
        if let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] >> col & 1 == 1) {
            rows.swap(rank, pivot);
            for r in 0..rows.len() {
                if r != rank && rows[r] >> col & 1 == 1 {
                    rows[r] ^= rows[rank];
                }
            }
            rank += 1;
        }
    }
    rank
}

impl fmt::Display for BitMatrix {
    /// Emits the matrix text format: `n=<width>` then one bitstring row per
    /// line, leftmost character = first coordinate of the row.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.width)?;
        for i in 0..self.width as usize {
            writeln!(f, "{}", self.row(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix[")?;
        for i in 0..self.width as usize {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    /// Parses the matrix text format produced by [`fmt::Display`].
    fn from_str(s: &str) -> Result<BitMatrix> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let width = parse_width_header(header)?;
        let mut rows = Vec::with_capacity(width as usize);
        for i in 0..width as usize {
            let line = lines.next().ok_or_else(|| {
                Error::Parse(format!("matrix text ends after {i} of {width} rows"))
            })?;
            let row: BitVector = line.parse()?;
            if row.width() != width {
                return Err(Error::Parse(format!(
                    "row {} has {} columns, expected {width}",
                    i + 1,
                    row.width()
                )));
            }
            rows.push(row);
        }
        if let Some(extra) = lines.next() {
            return Err(Error::Parse(format!(
                "unexpected trailing content in matrix text: {extra:?}"
            )));
        }
        Ok(BitMatrix::from_rows(&rows))
    }
}

/// Enumerates all invertible matrices of the given width by extending
/// partial bases (168 at width 3, 20160 at width 4).  Restricted to
/// width ≤ 4; the next group, GL(5, 2), already has ~10^7 elements.
pub fn enumerate_invertible(width: u8) -> Result<Vec<BitMatrix>> {
    check_width(width);
    if width > 4 {
        return Err(Error::Invalid(format!(
            "invertible-matrix enumeration supports width <= 4, got {width}"
        )));
    }
    let n = width as usize;
    let size = 1usize << n;
    let mut out = Vec::new();
    let mut rows: Vec<u16> = Vec::new();
    let mut span = vec![false; size];
    span[0] = true;
    fn rec(
        width: u8,
        n: usize,
        size: usize,
        rows: &mut Vec<u16>,
        span: &mut Vec<bool>,
        out: &mut Vec<BitMatrix>,
    ) {
        if rows.len() == n {
            out.push(BitMatrix::from_row_bits(width, rows));
            return;
        }
        for c in 1..size as u16 {
            if span[c as usize] {
                continue;
            }
            let marked: Vec<usize> =
                (0..size).filter(|&s| span[s]).map(|s| s ^ c as usize).collect();
            for &m in &marked {
                span[m] = true;
            }
            rows.push(c);
            rec(width, n, size, rows, span, out);
            rows.pop();
            for &m in &marked {
                span[m] = false;
            }
        }
    }
    rec(width, n, size, &mut rows, &mut span, &mut out);
    Ok(out)
}

/// Parses a `n=<int>` header line shared by several file formats.
pub(crate) fn parse_width_header(line: &str) -> Result<u8> {
    let rest = line
        .strip_prefix("n=")
        .ok_or_else(|| Error::Parse(format!("expected `n=<int>` header, got {line:?}")))?;
    let width: u8 = rest
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad width in header: {rest:?}")))?;
    if !(1..=MAX_WIDTH).contains(&width) {
        return Err(Error::Parse(format!(
            "width {width} out of range 1..={MAX_WIDTH}"
        )));
    }
    Ok(width)
}

/// An invertible affine permutation `x -> x * A + b` of GF(2)^width.
#[derive(Clone, PartialEq, Eq)]
pub struct AffineMap {
    linear: BitMatrix,
    translation: BitVector,
}

impl AffineMap {
    /// Builds the map `x -> x * linear + translation`; the linear part must
    /// be invertible.
    pub fn new(linear: BitMatrix, translation: BitVector) -> Result<Self> {
        assert_eq!(linear.width(), translation.width(), "width mismatch");
        if !linear.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(AffineMap { linear, translation })
    }

    pub fn identity(width: u8) -> Self {
        AffineMap {
            linear: BitMatrix::identity(width),
            translation: BitVector::zero(width),
        }
    }

    /// The translation `x -> x + t`.
    pub fn translation_by(t: BitVector) -> Self {
        AffineMap { linear: BitMatrix::identity(t.width()), translation: t }
    }

    pub fn width(&self) -> u8 {
        self.linear.width()
    }

    pub fn linear(&self) -> &BitMatrix {
        &self.linear
    }

    pub fn translation(&self) -> BitVector {
        self.translation
    }

    pub fn apply(&self, x: BitVector) -> BitVector {
        self.linear.apply(x) ^ self.translation
    }

    /// Composition `x -> then(self(x))`.
    pub fn then(&self, then: &AffineMap) -> AffineMap {
        AffineMap {
            linear: self.linear.mul(&then.linear),
            translation: then.apply(self.translation),
        }
    }

    pub fn inverse(&self) -> AffineMap {
        let inv = self
            .linear
            .inverse()
            .expect("linear part is invertible by construction");
        let translation = inv.apply(self.translation);
        AffineMap { linear: inv, translation }
    }
}

impl fmt::Debug for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AffineMap({:?} + {})", self.linear, self.translation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bitstring_puts_x1_first() {
        let v: BitVector = "100".parse().unwrap();
        assert_eq!(v, BitVector::new(3, 0b001));
        assert_eq!(v.to_string(), "100");
        assert!(v.get(0));
        assert!(!v.get(2));
    }

    #[test]
    fn bitstring_rejects_garbage() {
        assert!("10a".parse::<BitVector>().is_err());
        assert!("".parse::<BitVector>().is_err());
        assert!("10101010101010101".parse::<BitVector>().is_err());
    }

    #[test]
    fn concat_and_split_round_trip() {
        let low = BitVector::new(3, 0b101);
        let high = BitVector::new(3, 0b011);
        let joined = low.concat(&high);
        assert_eq!(joined.width(), 6);
        assert_eq!(joined.to_string(), "101110");
        assert_eq!(joined.split(3), (low, high));
    }

    #[test]
    fn apply_selects_rows() {
        // Row convention: y = x * A = XOR of rows at the set bits of x.
        let m = BitMatrix::from_row_bits(3, &[0b011, 0b100, 0b111]);
        assert_eq!(m.apply(BitVector::new(3, 0b101)).bits(), 0b011 ^ 0b111);
        assert_eq!(m.apply(BitVector::zero(3)).bits(), 0);
    }

    #[test]
    fn identity_facts() {
        let id = BitMatrix::identity(4);
        assert!(id.is_identity());
        assert!(id.is_invertible());
        assert!(id.is_unipotent());
        assert_eq!(id.rank(), 4);
        assert!(id.kernel_basis().is_empty());
    }

    #[test]
    fn singular_matrix_detected() {
        let m = BitMatrix::from_row_bits(3, &[0b011, 0b011, 0b100]);
        assert_eq!(m.rank(), 2);
        assert!(matches!(m.inverse(), Err(Error::Singular)));
        let kernel = m.kernel_basis();
        assert_eq!(kernel.len(), 1);
        // e_1 + e_2 maps to row0 ^ row1 = 0.
        assert_eq!(kernel[0].bits(), 0b011);
    }

    #[test]
    fn transpose_involution() {
        let m = BitMatrix::from_row_bits(4, &[0b0011, 0b0100, 0b1111, 0b1000]);
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn unipotent_detects_nilpotent_offset() {
        // Strictly upper-triangular + I is unipotent.
        let m = BitMatrix::from_row_bits(3, &[0b001 | 0b010, 0b010 | 0b100, 0b100]);
        assert!(m.is_unipotent());
        // A transposition *is* unipotent over GF(2) ((M+I)^2 = M^2 + I = 0),
        // so the interesting negative case is a matrix of odd order > 1.
        let swap = BitMatrix::from_row_bits(2, &[0b10, 0b01]);
        assert!(swap.is_unipotent());
        let order_three = BitMatrix::from_row_bits(2, &[0b10, 0b11]);
        assert!(!order_three.is_unipotent());
    }

    #[test]
    fn matrix_text_round_trip() {
        let m = BitMatrix::from_row_bits(3, &[0b001, 0b110, 0b011]);
        let text = m.to_string();
        assert!(text.starts_with("n=3\n"));
        let back: BitMatrix = text.parse().unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn matrix_text_rejects_bad_shapes() {
        assert!("n=3\n101\n010".parse::<BitMatrix>().is_err()); // missing row
        assert!("n=2\n101\n010".parse::<BitMatrix>().is_err()); // wrong width
        assert!("m=2\n10\n01".parse::<BitMatrix>().is_err()); // bad header
        assert!("n=2\n10\n01\n11".parse::<BitMatrix>().is_err()); // trailing row
    }

    #[test]
    fn affine_map_requires_invertible_linear_part() {
        let singular = BitMatrix::from_row_bits(2, &[0b01, 0b01]);
        assert!(AffineMap::new(singular, BitVector::zero(2)).is_err());
    }

    #[test]
    fn affine_composition_and_inverse() {
        let a = AffineMap::new(
            BitMatrix::from_row_bits(3, &[0b010, 0b001, 0b100]),
            BitVector::new(3, 0b101),
        )
        .unwrap();
        let b = AffineMap::translation_by(BitVector::new(3, 0b011));
        let ab = a.then(&b);
        let x = BitVector::new(3, 0b110);
        assert_eq!(ab.apply(x), b.apply(a.apply(x)));
        let inv = a.inverse();
        for v in BitVector::all(3) {
            assert_eq!(inv.apply(a.apply(v)), v);
        }
    }

    #[test]
    fn invertible_enumeration_counts() {
        let gl2 = enumerate_invertible(2).unwrap();
        assert_eq!(gl2.len(), 6);
        let gl3 = enumerate_invertible(3).unwrap();
        assert_eq!(gl3.len(), 168);
        assert!(gl3.iter().all(|m| m.is_invertible()));
        assert!(enumerate_invertible(5).is_err());
    }

    fn arb_matrix(width: u8) -> impl Strategy<Value = BitMatrix> {
        proptest::collection::vec(0..1u16 << width, width as usize)
            .prop_map(move |rows| BitMatrix::from_row_bits(width, &rows))
    }

    proptest! {
        #[test]
        fn rank_plus_kernel_dim_is_width(m in arb_matrix(5)) {
            prop_assert_eq!(m.rank() + m.kernel_basis().len(), 5);
        }

        #[test]
        fn kernel_vectors_map_to_zero(m in arb_matrix(6)) {
            for k in m.kernel_basis() {
                prop_assert!(m.apply(k).is_zero());
            }
        }

        #[test]
        fn inverse_is_two_sided(m in arb_matrix(5)) {
            if let Ok(inv) = m.inverse() {
                prop_assert!(m.mul(&inv).is_identity());
                prop_assert!(inv.mul(&m).is_identity());
            } else {
                prop_assert!(m.rank() < 5);
            }
        }

        #[test]
        fn mul_matches_sequential_apply(a in arb_matrix(4), b in arb_matrix(4), x in 0..16u16) {
            let v = BitVector::new(4, x);
            let ab = a.mul(&b);
            prop_assert_eq!(ab.apply(v), b.apply(a.apply(v)));
        }
    }
}
