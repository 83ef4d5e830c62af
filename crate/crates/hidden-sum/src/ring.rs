//! Alternating bilinear products on GF(2)^n and the hidden sums they induce.
//!
//! A *product table* assigns a vector `Γ[i][j] = e_i * e_j` to every
//! unordered pair of standard basis vectors (the diagonal is forced to zero,
//! so every element squares to zero).  Bilinear extension gives a commutative
//! product `x * y` on the whole space, and the candidate group operation is
//!
//! ```text
//! x ∘ y = x + y + x * y .
//! ```
//!
//! The table is **valid** when two checks pass:
//!
//! 1. *regularity*: for every `a`, the linear map `κ_a : x -> x + x * a` is
//!    invertible (checked exhaustively over all `2^n` values of `a`), and
//! 2. *associativity* of `*` on all basis triples (which extends bilinearly).
//!
//! For a valid table, `∘` makes GF(2)^n an elementary abelian group whose
//! translations `τ_a : x -> x ∘ a = x * (I + R_a) + a` are affine over
//! GF(2) — a "hidden sum" living inside the affine group of `+`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::diff::PermutationTable;
use crate::error::{Error, ProductDefect, Result};
use crate::gf2::{parse_width_header, AffineMap, BitMatrix, BitVector};

/// Widest product the workbench constructs (the exterior algebra on four
/// generators needs 2^4 - 1 = 15 coordinates).
pub const MAX_PRODUCT_WIDTH: u8 = 15;

/// Exhaustive enumeration is refused above this width unless forced: the
/// assignment space at width 5 already has 2^50 candidate tables.
pub const MAX_EXHAUSTIVE_WIDTH: u8 = 4;

// ---------------------------------------------------------------------------
// Raw validation scratch, shared by the public constructor and the scans.
// ---------------------------------------------------------------------------

/// Number of unordered pairs `i < j` at a given width.
pub(crate) fn pair_count(width: u8) -> usize {
    let n = width as usize;
    n * (n - 1) / 2
}

/// Unordered pairs in lexicographic order; this fixes the canonical pair
/// numbering used by the enumeration order and the sampled streams.
pub(crate) fn pairs(width: u8) -> Vec<(usize, usize)> {
    let n = width as usize;
    let mut out = Vec::with_capacity(pair_count(width));
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

/// Allocation-free validator for candidate tables, used in the hot
/// enumeration loops.
pub(crate) struct Scratch {
    width: usize,
    tbl: [[u16; 16]; 16],
}

impl Scratch {
    pub(crate) fn new(width: u8) -> Self {
        Scratch { width: width as usize, tbl: [[0; 16]; 16] }
    }

    /// Loads pair values in canonical pair order.
    pub(crate) fn load(&mut self, pair_values: &[u16]) {
        debug_assert_eq!(pair_values.len(), self.width * (self.width - 1) / 2);
        let mut idx = 0;
        for i in 0..self.width {
            self.tbl[i][i] = 0;
            for j in i + 1..self.width {
                self.tbl[i][j] = pair_values[idx];
                self.tbl[j][i] = pair_values[idx];
                idx += 1;
            }
        }
    }

    pub(crate) fn prod(&self, x: u16, y: u16) -> u16 {
        let mut acc = 0;
        let mut xs = x;
        while xs != 0 {
            let i = xs.trailing_zeros() as usize;
            xs &= xs - 1;
            let mut ys = y;
            while ys != 0 {
                let j = ys.trailing_zeros() as usize;
                ys &= ys - 1;
                acc ^= self.tbl[i][j];
            }
        }
        acc
    }

    fn rank(&self, rows: &mut [u16]) -> usize {
        let mut rank = 0;
        for col in 0..self.width {
            if let Some(p) = (rank..rows.len()).find(|&r| rows[r] >> col & 1 == 1) {
                rows.swap(rank, p);
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

    /// Fast validity check with early exit; regularity first, matching the
    /// diagnostic order of [`Scratch::defect`].
    pub(crate) fn is_valid(&self) -> bool {
        let n = self.width;
        let mut rows = [0u16; 16];
        for a in 1..1u32 << n {
            for (i, row) in rows.iter_mut().enumerate().take(n) {
                *row = (1 << i) ^ self.prod(1 << i, a as u16);
            }
            if self.rank(&mut rows[..n]) != n {
                return false;
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.prod(self.tbl[i][j], 1 << k) != self.prod(1 << i, self.tbl[j][k]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Like [`Scratch::is_valid`] but reports the first failure: the
    /// smallest `a` with singular `κ_a`, else the lexicographically first
    /// non-associative basis triple.
    fn defect(&self) -> Option<ProductDefect> {
        let n = self.width;
        let mut rows = [0u16; 16];
        for a in 1..1u32 << n {
            for (i, row) in rows.iter_mut().enumerate().take(n) {
                *row = (1 << i) ^ self.prod(1 << i, a as u16);
            }
            if self.rank(&mut rows[..n]) != n {
                let witness = BitVector::new(n as u8, a as u16).to_string();
                return Some(ProductDefect::NotRegular { witness });
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.prod(self.tbl[i][j], 1 << k) != self.prod(1 << i, self.tbl[j][k]) {
                        return Some(ProductDefect::NotAssociative { i: i + 1, j: j + 1, k: k + 1 });
                    }
                }
            }
        }
        None
    }
}

// ---------------------------------------------------------------------------
// RingProduct
// ---------------------------------------------------------------------------

/// A validated alternating bilinear product on GF(2)^width.
///
/// Construction always runs the full validation (regularity of every `κ_a`,
/// then associativity on basis triples), so a value of this type is a proof
/// that `x ∘ y = x + y + x*y` is an elementary abelian group operation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingProduct {
    width: u8,
    /// Flattened `width × width` table, symmetric with zero diagonal.
    table: Vec<u16>,
}

impl RingProduct {
    /// Builds and validates a product from its nonzero upper-triangle
    /// entries, given as `(i, j, value)` with `i < j` (0-based).
    pub fn new(width: u8, entries: &[(usize, usize, BitVector)]) -> Result<Self> {
        assert!(
            (1..=MAX_PRODUCT_WIDTH).contains(&width),
            "product width must be 1..={MAX_PRODUCT_WIDTH}, got {width}"
        );
        let mut values = vec![0u16; pair_count(width)];
        let index = pairs(width);
        for &(i, j, v) in entries {
            if i >= j || j >= width as usize {
                return Err(Error::Invalid(format!(
                    "pair ({i}, {j}) is not an upper-triangle pair at width {width}"
                )));
            }
            if v.width() != width {
                return Err(Error::Invalid(format!(
                    "entry for pair ({i}, {j}) has width {}, expected {width}",
                    v.width()
                )));
            }
            let k = index.iter().position(|&p| p == (i, j)).expect("pair exists");
            if values[k] != 0 {
                return Err(Error::Invalid(format!("duplicate entry for pair ({i}, {j})")));
            }
            values[k] = v.bits();
        }
        Self::from_pair_values(width, &values)
    }

    /// Builds and validates a product from all pair values in canonical
    /// (lexicographic) pair order.
    pub fn from_pair_values(width: u8, pair_values: &[u16]) -> Result<Self> {
        assert_eq!(pair_values.len(), pair_count(width), "wrong number of pair values");
        let mut scratch = Scratch::new(width);
        scratch.load(pair_values);
        if let Some(defect) = scratch.defect() {
            return Err(Error::InvalidProduct(defect));
        }
        Ok(Self::from_validated(width, pair_values))
    }

    /// Internal constructor for values already known valid.
    pub(crate) fn from_validated(width: u8, pair_values: &[u16]) -> Self {
        let n = width as usize;
        let mut table = vec![0u16; n * n];
        for (idx, &(i, j)) in pairs(width).iter().enumerate() {
            table[i * n + j] = pair_values[idx];
            table[j * n + i] = pair_values[idx];
        }
        RingProduct { width, table }
    }

    /// The zero product; `∘` degenerates to `+`.
    pub fn zero(width: u8) -> Self {
        Self::from_validated(width, &vec![0; pair_count(width)])
    }

    /// The reduced exterior algebra on `k` generators: basis vectors are
    /// indexed by the nonempty subsets of `{1, ..., k}` ordered by size and
    /// then lexicographically, and `e_S * e_T` is `e_{S ∪ T}` when `S` and
    /// `T` are disjoint and `0` otherwise (signs vanish in characteristic
    /// two).  Width is `2^k - 1`; `k = 2` reproduces the basic one-pair
    /// structure on GF(2)^3.
    pub fn exterior_algebra(k: u8) -> Self {
        assert!((1..=4).contains(&k), "exterior algebra supports 1..=4 generators");
        let width = (1u16 << k) - 1;
        // Subsets of {0..k-1} as masks, ordered by (popcount, numeric value);
        // numeric order on equal-size masks matches lexicographic order on
        // sorted element lists for the sizes that occur here.
        let mut subsets: Vec<u16> = (1..1u16 << k).collect();
        subsets.sort_by_key(|s| (s.count_ones(), *s));
        let position = |mask: u16| subsets.iter().position(|&s| s == mask).unwrap();
        let mut entries = Vec::new();
        for i in 0..subsets.len() {
            for j in i + 1..subsets.len() {
                if subsets[i] & subsets[j] == 0 {
                    let union = position(subsets[i] | subsets[j]);
                    entries.push((i, j, BitVector::unit(width as u8, union)));
                }
            }
        }
        Self::new(width as u8, &entries).expect("exterior algebra is always valid")
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    /// Table entry `e_i * e_j` (0-based, any order; diagonal is zero).
    pub fn gamma(&self, i: usize, j: usize) -> BitVector {
        let n = self.width as usize;
        assert!(i < n && j < n, "index out of range");
        BitVector::new(self.width, self.table[i * n + j])
    }

    /// Nonzero upper-triangle entries in canonical pair order.
    pub fn entries(&self) -> Vec<(usize, usize, BitVector)> {
        pairs(self.width)
            .into_iter()
            .filter_map(|(i, j)| {
                let v = self.gamma(i, j);
                (!v.is_zero()).then_some((i, j, v))
            })
            .collect()
    }

    /// Pair values in canonical pair order (including zeros).
    pub fn pair_values(&self) -> Vec<u16> {
        let n = self.width as usize;
        pairs(self.width).into_iter().map(|(i, j)| self.table[i * n + j]).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|&v| v == 0)
    }

    pub(crate) fn prod_bits(&self, x: u16, y: u16) -> u16 {
        let n = self.width as usize;
        let mut acc = 0;
        let mut xs = x;
        while xs != 0 {
            let i = xs.trailing_zeros() as usize;
            xs &= xs - 1;
            let mut ys = y;
            while ys != 0 {
                let j = ys.trailing_zeros() as usize;
                ys &= ys - 1;
                acc ^= self.table[i * n + j];
            }
        }
        acc
    }

    /// The bilinear product `x * y`.
    pub fn prod(&self, x: BitVector, y: BitVector) -> BitVector {
        assert_eq!(x.width(), self.width, "width mismatch");
        assert_eq!(y.width(), self.width, "width mismatch");
        BitVector::new(self.width, self.prod_bits(x.bits(), y.bits()))
    }

    /// The hidden sum `x ∘ y = x + y + x * y`.
    pub fn circ(&self, x: BitVector, y: BitVector) -> BitVector {
        x ^ y ^ self.prod(x, y)
    }

    /// Full `2^n × 2^n` table of `∘`, indexed by `x << n | y`.
    pub(crate) fn circ_table_raw(&self) -> Vec<u16> {
        let n = self.width as usize;
        let size = 1usize << n;
        let mut out = vec![0u16; size * size];
        for x in 0..size {
            for y in x..size {
                let v = (x as u16) ^ (y as u16) ^ self.prod_bits(x as u16, y as u16);
                out[x << n | y] = v;
                out[y << n | x] = v;
            }
        }
        out
    }

    /// The linear involution `κ_a : x -> x + x * a` (invertible by validity).
    pub fn kappa(&self, a: BitVector) -> BitMatrix {
        assert_eq!(a.width(), self.width, "width mismatch");
        let rows: Vec<BitVector> = (0..self.width as usize)
            .map(|i| {
                let e = BitVector::unit(self.width, i);
                e ^ self.prod(e, a)
            })
            .collect();
        BitMatrix::from_rows(&rows)
    }

    /// The `∘`-translation `τ_a : x -> x ∘ a = x κ_a + a` as an affine map
    /// over `+`; its linear part is `κ_a` and its translation part is `a`.
    pub fn tau(&self, a: BitVector) -> AffineMap {
        AffineMap::new(self.kappa(a), a).expect("κ_a is invertible for a valid product")
    }

    /// Basis of `U = {a : x * a = 0 for all x}`, the set of elements whose
    /// `∘`-translation coincides with the `+`-translation (`τ_a = σ_a`).
    /// Always nonempty in dimension ≥ 1 for a valid nonzero-width product.
    pub fn u_space(&self) -> Vec<BitVector> {
        let n = self.width as usize;
        let mut basis: Vec<u16> = Vec::new();
        let mut span = vec![false; 1 << n];
        span[0] = true;
        for a in 1..1u32 << n {
            let a = a as u16;
            if span[a as usize] {
                continue;
            }
            if (0..n).all(|i| self.prod_bits(1 << i, a) == 0) {
                let mut extra: Vec<u16> = Vec::new();
                for (v, hit) in span.iter().enumerate() {
                    if *hit {
                        extra.push(v as u16 ^ a);
                    }
                }
                for v in extra {
                    span[v as usize] = true;
                }
                basis.push(a);
            }
        }
        basis.into_iter().map(|b| BitVector::new(self.width, b)).collect()
    }

    /// The same subspace as [`RingProduct::u_space`], presented as the
    /// intersection `T_+ ∩ T_∘` seen from the `∘` side: the translations
    /// shared by both groups.  On this set `∘` and `+` agree (`a * b = 0`
    /// for members), so the returned basis is simultaneously a `+`-basis and
    /// a `∘`-basis; the function exists separately because several bounds
    /// measure this dimension inside `(V, ∘)` rather than `(V, +)`.
    pub fn u_space_dual(&self) -> Vec<BitVector> {
        self.u_space()
    }

    /// Basis of the annihilator `Ann(a) = {x : x * a = 0}`.
    pub fn annihilator(&self, a: BitVector) -> Vec<BitVector> {
        assert_eq!(a.width(), self.width, "width mismatch");
        let rows: Vec<BitVector> = (0..self.width as usize)
            .map(|i| self.prod(BitVector::unit(self.width, i), a))
            .collect();
        BitMatrix::from_rows(&rows).kernel_basis()
    }

    /// Whether every standard `+`-translation `σ_{e_i}` is affine for `∘`,
    /// i.e. `T_+ ⊆ AGL(V, ∘)` (it suffices to test the generators).
    pub fn contains_std_translations(&self) -> bool {
        (0..self.width as usize).all(|i| {
            let t = BitVector::unit(self.width, i);
            let table = PermutationTable::from_fn(self.width, |x| x ^ t);
            is_op_affine(&table, self)
        })
    }

    /// Pushes the product forward along the change of basis `v -> v * m`:
    /// the result satisfies `x *' y = ((x m^-1) * (y m^-1)) m`.  Transport
    /// preserves validity and all dimension invariants.
    pub fn transport(&self, m: &BitMatrix) -> Result<RingProduct> {
        assert_eq!(m.width(), self.width, "width mismatch");
        let minv = m.inverse()?;
        let values: Vec<u16> = pairs(self.width)
            .into_iter()
            .map(|(i, j)| m.apply(self.prod(minv.row(i), minv.row(j))).bits())
            .collect();
        let mut scratch = Scratch::new(self.width);
        scratch.load(&values);
        debug_assert!(scratch.is_valid(), "transport must preserve validity");
        Ok(Self::from_validated(self.width, &values))
    }
}

impl fmt::Display for RingProduct {
    /// Emits the product file format: `n=<width>`, then one line
    /// `<i> <j> <bitstring>` per nonzero entry (1-based, `i < j`,
    /// bitstring character 1 = coordinate `x_1`); unlisted pairs are zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.width)?;
        for (i, j, v) in self.entries() {
            writeln!(f, "{} {} {}", i + 1, j + 1, v)?;
        }
        Ok(())
    }
}

impl fmt::Debug for RingProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingProduct(n={}", self.width)?;
        for (i, j, v) in self.entries() {
            write!(f, "; {},{}->{}", i + 1, j + 1, v)?;
        }
        write!(f, ")")
    }
}

impl FromStr for RingProduct {
    type Err = Error;

    /// Parses the product file format produced by [`fmt::Display`].
    fn from_str(s: &str) -> Result<RingProduct> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty product text".into()))?;
        let width = parse_width_header(header)?;
        let mut entries = Vec::new();
        for line in lines {
            let mut fields = line.split_whitespace();
            let (i, j, bits) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
                (Some(i), Some(j), Some(b), None) => (i, j, b),
                _ => {
                    return Err(Error::Parse(format!(
                        "product entry must be `<i> <j> <bitstring>`, got {line:?}"
                    )))
                }
            };
            let i: usize = i
                .parse()
                .map_err(|_| Error::Parse(format!("bad index {i:?} in {line:?}")))?;
            let j: usize = j
                .parse()
                .map_err(|_| Error::Parse(format!("bad index {j:?} in {line:?}")))?;
            if i == 0 || j == 0 || i >= j || j > width as usize {
                return Err(Error::Parse(format!(
                    "indices must satisfy 1 <= i < j <= {width}, got {i} {j}"
                )));
            }
            let v: BitVector = bits.parse()?;
            if v.width() != width {
                return Err(Error::Parse(format!(
                    "entry bitstring {bits:?} has width {}, expected {width}",
                    v.width()
                )));
            }
            entries.push((i - 1, j - 1, v));
        }
        RingProduct::new(width, &entries)
    }
}

// ---------------------------------------------------------------------------
// ∘-affinity and coordinates
// ---------------------------------------------------------------------------

/// Whether `f` is affine with respect to the hidden sum of `product`:
/// writing `g(x) = f(x) ∘ f(0)`, checks `g(x ∘ y) = g(x) ∘ g(y)` on all
/// pairs.
pub fn is_op_affine(f: &PermutationTable, product: &RingProduct) -> bool {
    let n = product.width() as usize;
    assert_eq!(f.width(), product.width(), "width mismatch");
    let circ = product.circ_table_raw();
    let size = 1usize << n;
    let t0 = f.image_bits(0) as usize;
    let g: Vec<usize> =
        (0..size).map(|x| circ[(f.image_bits(x as u16) as usize) << n | t0] as usize).collect();
    for x in 0..size {
        for y in x..size {
            let lhs = g[circ[x << n | y] as usize];
            let rhs = circ[g[x] << n | g[y]] as usize;
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Precomputed coordinates of GF(2)^n with respect to a `∘`-basis.
///
/// `combine(λ)` folds `∘` over the chosen basis (`λ_1 b_1 ∘ λ_2 b_2 ∘ ...`);
/// `coordinates` is its exact inverse.  Both are total tables over the
/// `2^n` values, so lookups never fail once construction succeeds.
pub struct CoordinateTable {
    width: u8,
    basis: Vec<BitVector>,
    forward: Vec<u16>,
    backward: Vec<u16>,
}

impl CoordinateTable {
    /// Builds the table for an explicit candidate basis; fails with
    /// [`Error::NotABasis`] if the vectors are not `∘`-independent.
    pub fn with_basis(product: &RingProduct, basis: &[BitVector]) -> Result<Self> {
        let width = product.width();
        if basis.len() != width as usize || basis.iter().any(|b| b.width() != width) {
            return Err(Error::NotABasis);
        }
        let size = 1usize << width;
        let mut forward = vec![0u16; size];
        for lambda in 1..size {
            // Incremental fold: strip the lowest set coordinate.
            let low = lambda.trailing_zeros() as usize;
            let rest = forward[lambda & (lambda - 1)];
            forward[lambda] = product
                .circ(BitVector::new(width, rest), basis[low])
                .bits();
        }
        let mut backward = vec![u16::MAX; size];
        for (lambda, &x) in forward.iter().enumerate() {
            if backward[x as usize] != u16::MAX {
                return Err(Error::NotABasis);
            }
            backward[x as usize] = lambda as u16;
        }
        Ok(CoordinateTable { width, basis: basis.to_vec(), forward, backward })
    }

    /// Builds the table for the standard basis `e_1, ..., e_n`; fails when
    /// the standard basis is not `∘`-independent (this happens for some
    /// valid products, e.g. the width-3 table with all entries `1+2+4`).
    pub fn standard(product: &RingProduct) -> Result<Self> {
        let basis: Vec<BitVector> =
            (0..product.width() as usize).map(|i| BitVector::unit(product.width(), i)).collect();
        Self::with_basis(product, &basis)
    }

    /// Builds the table for the lexicographically least greedy `∘`-basis;
    /// this always succeeds for a valid product.  The standard basis is used
    /// when it happens to be `∘`-independent (the greedy choice then picks
    /// exactly the standard vectors).
    pub fn auto(product: &RingProduct) -> Self {
        let width = product.width();
        let size = 1usize << width;
        let mut basis = Vec::with_capacity(width as usize);
        let mut span = vec![false; size];
        span[0] = true;
        for v in 1..size as u32 {
            if basis.len() == width as usize {
                break;
            }
            if span[v as usize] {
                continue;
            }
            let vec = BitVector::new(width, v as u16);
            let mut extra = Vec::new();
            for (s, hit) in span.iter().enumerate() {
                if *hit {
                    extra.push(product.circ(BitVector::new(width, s as u16), vec).bits());
                }
            }
            for s in extra {
                span[s as usize] = true;
            }
            basis.push(vec);
        }
        assert_eq!(basis.len(), width as usize, "greedy ∘-basis must exist");
        Self::with_basis(product, &basis).expect("greedy basis is ∘-independent")
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    pub fn basis(&self) -> &[BitVector] {
        &self.basis
    }

    /// Coordinates `λ` of `x` in the chosen basis: `combine(λ) = x`.
    pub fn coordinates(&self, x: BitVector) -> BitVector {
        assert_eq!(x.width(), self.width, "width mismatch");
        BitVector::new(self.width, self.backward[x.bits() as usize])
    }

    /// The `∘`-combination `λ_1 b_1 ∘ ... ∘ λ_n b_n`.
    pub fn combine(&self, lambda: BitVector) -> BitVector {
        assert_eq!(lambda.width(), self.width, "width mismatch");
        BitVector::new(self.width, self.forward[lambda.bits() as usize])
    }
}

// ---------------------------------------------------------------------------
// The affine group of ∘
// ---------------------------------------------------------------------------

/// Number of elements of `AGL(V, ∘)` at a given width:
/// `2^n · (2^n - 1)(2^n - 2)(2^n - 4)...(2^n - 2^{n-1})`.
pub fn affine_group_order(width: u8) -> u64 {
    let n = width as u32;
    let size = 1u64 << n;
    (0..n).fold(size, |acc, i| acc * (size - (1u64 << i)))
}

/// Enumerates all of `AGL(V, ∘)` as permutation tables: every choice of
/// `∘`-independent images for a fixed `∘`-basis, combined with every
/// `∘`-translation.  Restricted to width ≤ 4 (the group has 322560 elements
/// there already).
pub fn enumerate_affine_group(product: &RingProduct) -> Result<AffineGroupIter> {
    if product.width() > 4 {
        return Err(Error::Invalid(format!(
            "affine group enumeration supports width <= 4, got {}",
            product.width()
        )));
    }
    let coords = CoordinateTable::auto(product);
    let n = product.width() as usize;
    let size = 1usize << n;
    let circ = product.circ_table_raw();

    // Collect all ∘-independent image tuples (the linear parts in the
    // coordinate picture); 20160 tuples at width 4.
    let mut tuples: Vec<u16> = Vec::new();
    let mut stack: Vec<u16> = Vec::new();
    let mut span = vec![false; size];
    span[0] = true;
    fn rec(
        n: usize,
        size: usize,
        circ: &[u16],
        stack: &mut Vec<u16>,
        span: &mut Vec<bool>,
        out: &mut Vec<u16>,
    ) {
        if stack.len() == n {
            out.extend_from_slice(stack);
            return;
        }
        for c in 1..size as u16 {
            if span[c as usize] {
                continue;
            }
            let marked: Vec<u16> = (0..size)
                .filter(|&s| span[s])
                .map(|s| circ[s << n | c as usize])
                .collect();
            for &m in &marked {
                span[m as usize] = true;
            }
            stack.push(c);
            rec(n, size, circ, stack, span, out);
            stack.pop();
            for &m in &marked {
                span[m as usize] = false;
            }
        }
    }
    rec(n, size, &circ, &mut stack, &mut span, &mut tuples);

    Ok(AffineGroupIter {
        n,
        combine: (0..size).map(|l| coords.combine(BitVector::new(n as u8, l as u16)).bits()).collect(),
        circ,
        tuples,
        tuple_idx: 0,
        translation: 0,
        comb_images: vec![0; size],
        comb_ready: false,
    })
}

/// Iterator over `AGL(V, ∘)`; see [`enumerate_affine_group`].
pub struct AffineGroupIter {
    n: usize,
    /// `combine[λ]`: the domain point with coordinates `λ`.
    combine: Vec<u16>,
    circ: Vec<u16>,
    /// Flat list of image tuples, `n` entries each.
    tuples: Vec<u16>,
    tuple_idx: usize,
    translation: usize,
    /// `comb_images[λ]` = `∘`-combination of the current tuple at `λ`.
    comb_images: Vec<u16>,
    comb_ready: bool,
}

impl Iterator for AffineGroupIter {
    type Item = PermutationTable;

    fn next(&mut self) -> Option<PermutationTable> {
        let size = 1usize << self.n;
        if self.tuple_idx * self.n >= self.tuples.len() {
            return None;
        }
        if !self.comb_ready {
            let tuple = &self.tuples[self.tuple_idx * self.n..(self.tuple_idx + 1) * self.n];
            self.comb_images[0] = 0;
            for lambda in 1..size {
                let low = lambda.trailing_zeros() as usize;
                let rest = self.comb_images[lambda & (lambda - 1)] as usize;
                self.comb_images[lambda] = self.circ[rest << self.n | tuple[low] as usize];
            }
            self.comb_ready = true;
        }
        let t = self.translation;
        let mut images = vec![0u16; size];
        for lambda in 0..size {
            let x = self.combine[lambda] as usize;
            images[x] = self.circ[(self.comb_images[lambda] as usize) << self.n | t];
        }
        self.translation += 1;
        if self.translation == size {
            self.translation = 0;
            self.tuple_idx += 1;
            self.comb_ready = false;
        }
        Some(PermutationTable::new(self.n as u8, images).expect("group member is a bijection"))
    }
}

/// Draws a uniformly random element of `AGL(V, ∘)`: rejection-samples a
/// `∘`-independent image tuple, then a uniform `∘`-translation.
pub fn random_op_affine<R: Rng>(product: &RingProduct, rng: &mut R) -> PermutationTable {
    let n = product.width() as usize;
    let size = 1usize << n;
    let circ = product.circ_table_raw();
    let coords = CoordinateTable::auto(product);
    let tuple = loop {
        let candidate: Vec<u16> =
            (0..n).map(|_| rng.gen_range(1..size as u32) as u16).collect();
        let mut span = vec![false; size];
        span[0] = true;
        let mut ok = true;
        'outer: for &c in &candidate {
            if span[c as usize] {
                ok = false;
                break 'outer;
            }
            let marked: Vec<usize> = (0..size)
                .filter(|&s| span[s])
                .map(|s| circ[s << n | c as usize] as usize)
                .collect();
            for m in marked {
                span[m] = true;
            }
        }
        if ok {
            break candidate;
        }
    };
    let t = rng.gen_range(0..size as u32) as usize;
    let mut comb = vec![0u16; size];
    for lambda in 1..size {
        let low = lambda.trailing_zeros() as usize;
        comb[lambda] = circ[(comb[lambda & (lambda - 1)] as usize) << n | tuple[low] as usize];
    }
    let mut images = vec![0u16; size];
    for lambda in 0..size {
        let x = coords.combine(BitVector::new(n as u8, lambda as u16)).bits() as usize;
        images[x] = circ[(comb[lambda] as usize) << n | t];
    }
    PermutationTable::new(n as u8, images).expect("random group member is a bijection")
}

// ---------------------------------------------------------------------------
// Enumeration and sampling
// ---------------------------------------------------------------------------

/// How [`enumerate_products`] walks the assignment space.
#[derive(Clone, Copy, Debug)]
pub enum EnumerationMode {
    /// Walk every assignment in canonical order and keep the valid ones.
    /// Widths above [`MAX_EXHAUSTIVE_WIDTH`] are refused unless `force` is
    /// set (the space has `2^(width · pairs)` candidates).
    Exhaustive { force: bool },
    /// Draw `limit` valid products uniformly at random (duplicates possible),
    /// reproducibly from `seed`.  Supported at widths 3..=5.
    Sampled { seed: u64, limit: usize },
}

/// Streams valid products at the given width.
///
/// Exhaustive streams yield each valid table exactly once, ordered by the
/// tuple of packed pair values in canonical pair order (all-zero first).
///
/// Sampled streams are uniform over the set of *valid* products:
///
/// * widths 3 and 4 draw from the cached exhaustive enumeration (8 and 106
///   products respectively);
/// * width 5 cannot be enumerated or rejection-sampled (the valid set has
///   density ≈ 7.5e-12 in the 2^50 assignment space), so draws pick one of
///   the four isomorphism-class representatives in [`width5_catalogue`]
///   weighted by its exact orbit size and push it forward along a uniform
///   invertible change of basis.  The resulting distribution is exactly
///   uniform over all 8464 valid width-5 products.
pub fn enumerate_products(width: u8, mode: EnumerationMode) -> Result<ProductStream> {
    assert!((1..=MAX_PRODUCT_WIDTH).contains(&width), "width out of range");
    match mode {
        EnumerationMode::Exhaustive { force } => {
            let bits = width as u32 * pair_count(width) as u32;
            if width > MAX_EXHAUSTIVE_WIDTH && !force {
                return Err(Error::ExhaustiveRefused { width, bits });
            }
            if bits > 63 {
                return Err(Error::Invalid(format!(
                    "exhaustive walk of 2^{bits} candidates cannot be indexed"
                )));
            }
            Ok(ProductStream(StreamInner::Exhaustive {
                width,
                next: 0,
                total: 1u64 << bits,
                scratch: Box::new(Scratch::new(width)),
            }))
        }
        EnumerationMode::Sampled { seed, limit } => {
            let rng = ChaCha12Rng::seed_from_u64(seed);
            match width {
                3 | 4 => Ok(ProductStream(StreamInner::SampledSmall {
                    pool: valid_products(width)?,
                    rng,
                    remaining: limit,
                })),
                5 => Ok(ProductStream(StreamInner::SampledWidth5 { rng, remaining: limit })),
                other => Err(Error::SampledUnsupported(other)),
            }
        }
    }
}

/// Iterator over valid products; see [`enumerate_products`].
pub struct ProductStream(StreamInner);

enum StreamInner {
    Exhaustive { width: u8, next: u64, total: u64, scratch: Box<Scratch> },
    SampledSmall { pool: &'static [RingProduct], rng: ChaCha12Rng, remaining: usize },
    SampledWidth5 { rng: ChaCha12Rng, remaining: usize },
}

/// Decodes candidate index `c` into pair values (pair 0 in the most
/// significant bits, so ascending `c` is lexicographic pair-major order).
fn decode_candidate(width: u8, c: u64, out: &mut [u16]) {
    let n = width as u32;
    let npairs = out.len() as u32;
    let mask = (1u64 << n) - 1;
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = ((c >> ((npairs - 1 - k as u32) * n)) & mask) as u16;
    }
}

impl Iterator for ProductStream {
    type Item = RingProduct;

    fn next(&mut self) -> Option<RingProduct> {
        match &mut self.0 {
            StreamInner::Exhaustive { width, next, total, scratch } => {
                let mut values = vec![0u16; pair_count(*width)];
                while next < total {
                    decode_candidate(*width, *next, &mut values);
                    *next += 1;
                    scratch.load(&values);
                    if scratch.is_valid() {
                        return Some(RingProduct::from_validated(*width, &values));
                    }
                }
                None
            }
            StreamInner::SampledSmall { pool, rng, remaining } => {
                if *remaining == 0 {
                    return None;
                }
                *remaining -= 1;
                Some(pool[rng.gen_range(0..pool.len())].clone())
            }
            StreamInner::SampledWidth5 { rng, remaining } => {
                if *remaining == 0 {
                    return None;
                }
                *remaining -= 1;
                Some(sample_width5(rng))
            }
        }
    }
}

/// Exhaustively collects the valid products at a width, in stream order,
/// parallelizing the scan across candidate-space chunks.
pub fn collect_valid_products(width: u8) -> Result<Vec<RingProduct>> {
    let bits = width as u32 * pair_count(width) as u32;
    if width > MAX_EXHAUSTIVE_WIDTH {
        return Err(Error::ExhaustiveRefused { width, bits });
    }
    let total = 1u64 << bits;
    let chunks = if bits > 16 { 1u64 << 10 } else { 1 };
    let per = total / chunks;
    let mut found: Vec<(u64, Vec<u16>)> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let mut scratch = Scratch::new(width);
            let mut values = vec![0u16; pair_count(width)];
            let mut hits = Vec::new();
            for c in chunk * per..(chunk + 1) * per {
                decode_candidate(width, c, &mut values);
                scratch.load(&values);
                if scratch.is_valid() {
                    hits.push((c, values.clone()));
                }
            }
            hits
        })
        .collect();
    found.sort_by_key(|&(c, _)| c);
    Ok(found
        .into_iter()
        .map(|(_, values)| RingProduct::from_validated(width, &values))
        .collect())
}

/// Cached exhaustive enumerations for widths 1..=4 (1, 1, 8 and 106 valid
/// products respectively).
pub fn valid_products(width: u8) -> Result<&'static [RingProduct]> {
    static CACHE: [OnceLock<Vec<RingProduct>>; 4] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if !(1..=MAX_EXHAUSTIVE_WIDTH).contains(&width) {
        return Err(Error::ExhaustiveRefused {
            width,
            bits: width as u32 * pair_count(width) as u32,
        });
    }
    let cell = &CACHE[width as usize - 1];
    Ok(cell.get_or_init(|| collect_valid_products(width).expect("width checked above")))
}

/// Canonical representatives of the four isomorphism classes of valid
/// width-5 products, with their exact orbit sizes under change of basis.
///
/// Classification: a valid product makes the span of all products `A²`
/// annihilate everything in dimension ≤ 5, so the structure is determined
/// by the induced alternating form on the generator space `V/A²`.  Up to
/// change of basis that leaves, at width 5: the zero product; one pair
/// `e_1 e_2 = e_3` (rank-2 form, 1-dimensional `A²`); the rank-4 form
/// `e_1 e_2 = e_3 e_4 = e_5`; and the two-output quotient
/// `e_1 e_2 = e_4`, `e_1 e_3 = e_5`.  The same classification reproduces
/// the exhaustive counts at widths 3 and 4 (8 = 1 + 7 and 106 = 1 + 105),
/// and the orbit sizes below were computed by walking all of GL(5, 2); the
/// `#[ignore]`d census test re-derives them.
pub fn width5_catalogue() -> Vec<(RingProduct, u64)> {
    let e = |i| BitVector::unit(5, i);
    let zero = RingProduct::zero(5);
    let rank2 = RingProduct::new(5, &[(0, 1, e(2))]).expect("valid");
    let rank4 = RingProduct::new(5, &[(0, 1, e(4)), (2, 3, e(4))]).expect("valid");
    let quotient = RingProduct::new(5, &[(0, 1, e(3)), (0, 2, e(4))]).expect("valid");
    vec![(zero, 1), (rank2, 1085), (rank4, 868), (quotient, 6510)]
}

/// Total number of valid width-5 products (sum of the catalogue orbits).
pub const WIDTH5_VALID_COUNT: u64 = 8464;

/// Draws a uniformly random invertible matrix by rejection.
pub fn random_invertible<R: Rng>(width: u8, rng: &mut R) -> BitMatrix {
    loop {
        let rows: Vec<u16> =
            (0..width).map(|_| rng.gen_range(0..1u32 << width) as u16).collect();
        let m = BitMatrix::from_row_bits(width, &rows);
        if m.is_invertible() {
            return m;
        }
    }
}

fn sample_width5<R: Rng>(rng: &mut R) -> RingProduct {
    static CATALOGUE: OnceLock<Vec<(RingProduct, u64)>> = OnceLock::new();
    let catalogue = CATALOGUE.get_or_init(width5_catalogue);
    let mut ticket = rng.gen_range(0..WIDTH5_VALID_COUNT);
    for (rep, weight) in catalogue {
        if ticket < *weight {
            let m = random_invertible(5, rng);
            return rep.transport(&m).expect("random invertible transport");
        }
        ticket -= weight;
    }
    unreachable!("weights sum to WIDTH5_VALID_COUNT");
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn demo_product() -> RingProduct {
        RingProduct::new(3, &[(0, 1, BitVector::unit(3, 2))]).unwrap()
    }

    /// Independent recomputation of u_space by whole-space scan.
    fn u_space_bruteforce(p: &RingProduct) -> Vec<u16> {
        BitVector::all(p.width())
            .filter(|&a| BitVector::all(p.width()).all(|x| p.prod(x, a).is_zero()))
            .map(|a| a.bits())
            .collect()
    }

    #[test]
    fn zero_product_facts() {
        let p = RingProduct::zero(3);
        assert!(p.is_zero());
        assert_eq!(p.u_space().len(), 3);
        for a in BitVector::all(3) {
            // τ_a degenerates to the plain translation σ_a.
            assert!(p.tau(a).linear().is_identity());
            for x in BitVector::all(3) {
                assert_eq!(p.circ(x, a), x ^ a);
            }
        }
    }

    #[test]
    fn demo_product_tau_matrices_and_closed_forms() {
        let p = demo_product();
        assert_eq!(p.tau(BitVector::unit(3, 0)).linear(), &BitMatrix::from_row_bits(3, &[1, 6, 4]));
        assert_eq!(p.tau(BitVector::unit(3, 1)).linear(), &BitMatrix::from_row_bits(3, &[5, 2, 4]));
        assert!(p.tau(BitVector::unit(3, 2)).linear().is_identity());
        for x in BitVector::all(3) {
            for y in BitVector::all(3) {
                // x ∘ y = x + y + (x1 y2 + x2 y1) e_3.
                let cross = (x.get(0) & y.get(1)) ^ (x.get(1) & y.get(0));
                let expect = x ^ y ^ BitVector::new(3, if cross { 4 } else { 0 });
                assert_eq!(p.circ(x, y), expect);
            }
        }
        let coords = CoordinateTable::standard(&p).unwrap();
        for x in BitVector::all(3) {
            // Closed-form coordinates: (x1, x2, x3 + x1 x2).
            let expect = x.with_bit(2, x.get(2) ^ (x.get(0) & x.get(1)));
            assert_eq!(coords.coordinates(x), expect);
            assert_eq!(coords.combine(expect), x);
        }
    }

    #[test]
    fn demo_product_subspaces() {
        let p = demo_product();
        let u = p.u_space();
        assert_eq!(u.len(), 1);
        assert_eq!(u[0], BitVector::unit(3, 2));
        assert_eq!(p.u_space_dual(), u);
        assert_eq!(u_space_bruteforce(&p), vec![0, 4]);
        // Ann(e_1) = {x : x_2 = 0}, dimension 2.
        let ann = p.annihilator(BitVector::unit(3, 0));
        assert_eq!(ann.len(), 2);
        for b in &ann {
            assert!(p.prod(*b, BitVector::unit(3, 0)).is_zero());
        }
        assert!(p.contains_std_translations());
    }

    #[test]
    fn validation_reports_regularity_first() {
        // e_1 e_2 = e_1 makes κ_{e_2} kill e_1; the witness is the smallest
        // offending a, here e_2 = "010".
        let err = RingProduct::new(3, &[(0, 1, BitVector::unit(3, 0))]).unwrap_err();
        match err {
            Error::InvalidProduct(ProductDefect::NotRegular { witness }) => {
                assert_eq!(witness, "010");
            }
            other => panic!("expected NotRegular, got {other:?}"),
        }
    }

    #[test]
    fn validation_reports_associativity_defects() {
        // Γ13 = e_2, Γ23 = e_1 + e_2 is regular everywhere but fails
        // (e_1 e_3) e_3 = e_1 (e_3 e_3).
        let err = RingProduct::new(
            3,
            &[(0, 2, BitVector::unit(3, 1)), (1, 2, BitVector::new(3, 0b011))],
        )
        .unwrap_err();
        match err {
            Error::InvalidProduct(ProductDefect::NotAssociative { i, j, k }) => {
                assert_eq!((i, j, k), (1, 3, 3));
            }
            other => panic!("expected NotAssociative, got {other:?}"),
        }
    }

    #[test]
    fn width3_census_is_frozen() {
        let got: Vec<Vec<u16>> =
            valid_products(3).unwrap().iter().map(|p| p.pair_values()).collect();
        let expected: Vec<Vec<u16>> = vec![
            vec![0, 0, 0],
            vec![0, 0, 1],
            vec![0, 2, 0],
            vec![0, 3, 3],
            vec![4, 0, 0],
            vec![5, 0, 5],
            vec![6, 6, 0],
            vec![7, 7, 7],
        ];
        // Stream order is pair-major lexicographic on packed values.
        let mut sorted = expected.clone();
        sorted.sort();
        assert_eq!(got, sorted);
        // Every width-3 product admits the standard translations.
        for p in valid_products(3).unwrap() {
            assert!(p.contains_std_translations());
        }
        // u_space dimensions: 3 for the zero product, 1 for the other seven.
        let dims: Vec<usize> =
            valid_products(3).unwrap().iter().map(|p| p.u_space().len()).collect();
        assert_eq!(dims.iter().filter(|&&d| d == 3).count(), 1);
        assert_eq!(dims.iter().filter(|&&d| d == 1).count(), 7);
    }

    #[test]
    fn stream_matches_parallel_collection() {
        let streamed: Vec<RingProduct> =
            enumerate_products(3, EnumerationMode::Exhaustive { force: false })
                .unwrap()
                .collect();
        assert_eq!(streamed.len(), 8);
        assert!(streamed[0].is_zero(), "all-zero table comes first");
        assert_eq!(streamed, collect_valid_products(3).unwrap());
    }

    #[test]
    fn exhaustive_width5_is_refused_without_force() {
        match enumerate_products(5, EnumerationMode::Exhaustive { force: false }) {
            Err(Error::ExhaustiveRefused { width: 5, bits: 50 }) => {}
            other => panic!("expected refusal, got {:?}", other.err()),
        }
        // With force it must at least start and yield the zero product.
        let mut forced =
            enumerate_products(5, EnumerationMode::Exhaustive { force: true }).unwrap();
        assert!(forced.next().unwrap().is_zero());
    }

    #[test]
    fn exterior_algebra_two_generators_is_the_demo_product() {
        assert_eq!(RingProduct::exterior_algebra(2), demo_product());
    }

    #[test]
    fn exterior_algebra_three_generators_facts() {
        let p = RingProduct::exterior_algebra(3);
        assert_eq!(p.width(), 7);
        // U is spanned by the top wedge e_{123} (basis position 7).
        let u = p.u_space();
        assert_eq!(u.len(), 1);
        assert_eq!(u[0], BitVector::unit(7, 6));
        // |Ann(e_1)| = 2^4, meeting the half-dimension bound exactly.
        assert_eq!(p.annihilator(BitVector::unit(7, 0)).len(), 4);
        let min_ann = BitVector::all(7)
            .skip(1)
            .map(|a| p.annihilator(a).len())
            .min()
            .unwrap();
        assert_eq!(min_ann, 4);
        // σ translations by single generators are not ∘-affine, but the ones
        // by wedge-degree ≥ 2 basis vectors are; so T_+ is not contained in
        // AGL(V, ∘) here.
        let verdicts: Vec<bool> = (0..7)
            .map(|i| {
                let t = BitVector::unit(7, i);
                is_op_affine(&PermutationTable::from_fn(7, |x| x ^ t), &p)
            })
            .collect();
        assert_eq!(verdicts, vec![false, false, false, true, true, true, true]);
        assert!(!p.contains_std_translations());
    }

    #[test]
    fn coordinate_table_falls_back_to_greedy_basis() {
        // The all-(1+2+4) table is valid but makes e_1 ∘ e_2 = e_3, so the
        // standard basis is ∘-dependent.
        let seven = BitVector::new(3, 7);
        let p = RingProduct::new(3, &[(0, 1, seven), (0, 2, seven), (1, 2, seven)]).unwrap();
        assert!(matches!(CoordinateTable::standard(&p), Err(Error::NotABasis)));
        let coords = CoordinateTable::auto(&p);
        assert_eq!(
            coords.basis(),
            &[BitVector::new(3, 1), BitVector::new(3, 2), BitVector::new(3, 3)]
        );
        for x in BitVector::all(3) {
            assert_eq!(coords.combine(coords.coordinates(x)), x);
        }
    }

    #[test]
    fn affine_group_has_the_right_order() {
        assert_eq!(affine_group_order(3), 1344);
        assert_eq!(affine_group_order(4), 322560);
        let p = demo_product();
        let mut seen = std::collections::HashSet::new();
        for f in enumerate_affine_group(&p).unwrap() {
            assert!(f.is_bijection());
            assert!(is_op_affine(&f, &p));
            seen.insert(f.images().to_vec());
        }
        assert_eq!(seen.len(), 1344);
    }

    #[test]
    fn affine_group_enumeration_covers_translations() {
        let p = demo_product();
        let group: std::collections::HashSet<Vec<u16>> = enumerate_affine_group(&p)
            .unwrap()
            .map(|f| f.images().to_vec())
            .collect();
        for a in BitVector::all(3) {
            let tau: Vec<u16> = (0..8).map(|x| p.circ(BitVector::new(3, x), a).bits()).collect();
            assert!(group.contains(&tau), "τ_{a} missing from the enumeration");
        }
    }

    #[test]
    fn random_op_affine_members_check_out() {
        let p = RingProduct::exterior_algebra(2);
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..20 {
            let f = random_op_affine(&p, &mut rng);
            assert!(f.is_bijection());
            assert!(is_op_affine(&f, &p));
        }
    }

    #[test]
    fn transport_preserves_structure() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for p in valid_products(3).unwrap() {
            let m = random_invertible(3, &mut rng);
            let q = p.transport(&m).unwrap();
            assert_eq!(q.u_space().len(), p.u_space().len());
            // Transported product is again in the valid set.
            assert!(valid_products(3).unwrap().contains(&q));
        }
    }

    #[test]
    fn sampled_streams_are_deterministic() {
        let a: Vec<RingProduct> =
            enumerate_products(4, EnumerationMode::Sampled { seed: 9, limit: 12 })
                .unwrap()
                .collect();
        let b: Vec<RingProduct> =
            enumerate_products(4, EnumerationMode::Sampled { seed: 9, limit: 12 })
                .unwrap()
                .collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), 12);
        let c: Vec<RingProduct> =
            enumerate_products(4, EnumerationMode::Sampled { seed: 10, limit: 12 })
                .unwrap()
                .collect();
        assert_ne!(a, c, "different seeds should draw different streams");
    }

    #[test]
    fn width5_catalogue_reps_are_valid_and_distinct() {
        let catalogue = width5_catalogue();
        assert_eq!(catalogue.iter().map(|(_, w)| *w).sum::<u64>(), WIDTH5_VALID_COUNT);
        // Class invariants: (dim of span of all products, dim U).
        let invariants: Vec<(usize, usize)> = catalogue
            .iter()
            .map(|(p, _)| {
                let mut rows: Vec<BitVector> = Vec::new();
                for (_, _, v) in p.entries() {
                    rows.push(v);
                }
                while rows.len() < 5 {
                    rows.push(BitVector::zero(5));
                }
                let square_dim = BitMatrix::from_rows(&rows[..5]).rank();
                (square_dim, p.u_space().len())
            })
            .collect();
        assert_eq!(invariants, vec![(0, 5), (1, 3), (1, 1), (2, 2)]);
    }

    #[test]
    fn width5_sampler_yields_valid_products() {
        let stream =
            enumerate_products(5, EnumerationMode::Sampled { seed: 3, limit: 40 }).unwrap();
        let mut seen_nonzero_square = false;
        for p in stream {
            assert_eq!(p.width(), 5);
            // Construction re-validates in debug builds; perform a cheap
            // independent spot-check of the group axioms here.
            let x = BitVector::new(5, 0b10110);
            let y = BitVector::new(5, 0b01011);
            let z = BitVector::new(5, 0b11100);
            assert_eq!(p.circ(p.circ(x, y), z), p.circ(x, p.circ(y, z)));
            assert_eq!(p.circ(x, y), p.circ(y, x));
            assert!(!p.u_space().is_empty());
            seen_nonzero_square |= !p.is_zero();
        }
        assert!(seen_nonzero_square);
    }

    /// Recomputes the width-5 orbit sizes recorded in [`width5_catalogue`]
    /// by walking all of GL(5, 2) for each representative.  Slow (~10 s);
    /// run with `cargo test -- --ignored` to audit the constants.
    #[test]
    #[ignore = "census walk over GL(5,2); run explicitly to audit catalogue constants"]
    fn width5_catalogue_census() {
        fn orbit_size(rep: &RingProduct) -> usize {
            // Enumerate GL(5,2) by extending partial bases, parallelized
            // over the first row.
            let first: Vec<u16> = (1..32).collect();
            let sets: Vec<std::collections::HashSet<Vec<u16>>> = first
                .par_iter()
                .map(|&r0| {
                    let mut seen = std::collections::HashSet::new();
                    let mut rows = vec![r0];
                    let mut span = vec![0u16, r0];
                    extend(rep, &mut rows, &mut span, &mut seen);
                    seen
                })
                .collect();
            let mut all = std::collections::HashSet::new();
            for s in sets {
                all.extend(s);
            }
            all.len()
        }
        fn extend(
            rep: &RingProduct,
            rows: &mut Vec<u16>,
            span: &mut Vec<u16>,
            seen: &mut std::collections::HashSet<Vec<u16>>,
        ) {
            if rows.len() == 5 {
                let m = BitMatrix::from_row_bits(5, rows);
                seen.insert(rep.transport(&m).unwrap().pair_values());
                return;
            }
            for c in 1..32u16 {
                if span.contains(&c) {
                    continue;
                }
                let added: Vec<u16> = span.iter().map(|&s| s ^ c).collect();
                let old = span.len();
                span.extend(added);
                rows.push(c);
                extend(rep, rows, span, seen);
                rows.pop();
                span.truncate(old);
            }
        }
        let catalogue = width5_catalogue();
        for (rep, expected) in &catalogue {
            if rep.is_zero() {
                continue;
            }
            assert_eq!(orbit_size(rep) as u64, *expected);
        }
    }

    #[test]
    fn product_text_round_trip() {
        let p = RingProduct::exterior_algebra(3);
        let text = p.to_string();
        let back: RingProduct = text.parse().unwrap();
        assert_eq!(back, p);
        // A file listing only some pairs treats the rest as zero.
        let sparse: RingProduct = "n=3\n1 2 001\n".parse().unwrap();
        assert_eq!(sparse, demo_product());
    }

    #[test]
    fn product_text_rejects_malformed_input() {
        assert!("".parse::<RingProduct>().is_err());
        assert!("n=3\n2 1 001".parse::<RingProduct>().is_err()); // i >= j
        assert!("n=3\n1 4 001".parse::<RingProduct>().is_err()); // j out of range
        assert!("n=3\n1 2 01".parse::<RingProduct>().is_err()); // short bitstring
        assert!("n=3\n1 2".parse::<RingProduct>().is_err()); // missing value
        // Invalid products are rejected at parse time too.
        assert!(matches!(
            "n=3\n1 2 100".parse::<RingProduct>(),
            Err(Error::InvalidProduct(_))
        ));
    }

    proptest! {
        /// ∘ is an elementary abelian group operation for every valid
        /// width-3 product: commutative, associative, identity 0, and every
        /// element is an involution.
        #[test]
        fn circ_group_laws(idx in 0usize..8, x in 0u16..8, y in 0u16..8, z in 0u16..8) {
            let p = &valid_products(3).unwrap()[idx];
            let (x, y, z) = (BitVector::new(3, x), BitVector::new(3, y), BitVector::new(3, z));
            prop_assert_eq!(p.circ(x, y), p.circ(y, x));
            prop_assert_eq!(p.circ(p.circ(x, y), z), p.circ(x, p.circ(y, z)));
            prop_assert_eq!(p.circ(x, BitVector::zero(3)), x);
            prop_assert_eq!(p.circ(x, x), BitVector::zero(3));
        }

        /// τ is a group isomorphism onto the translation group:
        /// τ_a ; τ_b = τ_{a ∘ b}, and every κ_a is a unipotent involution.
        #[test]
        fn tau_is_homomorphic(idx in 0usize..8, a in 0u16..8, b in 0u16..8, x in 0u16..8) {
            let p = &valid_products(3).unwrap()[idx];
            let (a, b, x) = (BitVector::new(3, a), BitVector::new(3, b), BitVector::new(3, x));
            let composed = p.tau(a).then(&p.tau(b));
            let direct = p.tau(p.circ(a, b));
            prop_assert_eq!(composed.apply(x), direct.apply(x));
            prop_assert!(p.kappa(a).is_unipotent());
            prop_assert!(p.kappa(a).mul(&p.kappa(a)).is_identity());
        }

        /// τ_a is the identity exactly on U, and coordinates round-trip.
        #[test]
        fn coordinates_round_trip(idx in 0usize..8, x in 0u16..8) {
            let p = &valid_products(3).unwrap()[idx];
            let coords = CoordinateTable::auto(p);
            let x = BitVector::new(3, x);
            prop_assert_eq!(coords.combine(coords.coordinates(x)), x);
            prop_assert_eq!(coords.coordinates(coords.combine(x)), x);
        }
    }
}
