//! Bit-packed linear algebra over F2.
//!
//! Vectors pack 64 bits per word, least significant bit first. Matrices are
//! stored row-major as a list of [`BitVec`] rows, so row operations are word-wise
//! XORs. Gaussian elimination always takes the leftmost pivot column and, within
//! it, the lowest-indexed candidate row; every "choose a basis" step built on top
//! of this module is therefore deterministic.

use std::fmt;

use rand::Rng;
use thiserror::Error;

const WORD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum F2Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("symplectic vectors must have even length, got {0}")]
    OddLength(usize),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("vector does not lie in the ambient row space")]
    NotInSpace,
    #[error("rows of the partial basis are linearly dependent")]
    NotIndependent,
}

/// A fixed-length vector over F2.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    /// Unit vector `e_index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0`/`1` characters, ignoring anything else.
    pub fn from_bit_str(s: &str) -> Self {
        Self::from_bools(s.chars().filter_map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        }))
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = rng.gen();
        }
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// In-place XOR. Panics on length mismatch.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Standard dot product mod 2. Panics on length mismatch.
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next()
    }

    pub fn last_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(wi * WORD + (WORD - 1 - w.leading_zeros() as usize));
            }
        }
        None
    }

    /// Concatenation `self | other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Bits `start..end` as a new vector.
    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        assert!(start <= end && end <= self.len);
        let mut out = BitVec::zeros(end - start);
        for i in self.iter_ones().filter(|&i| i >= start && i < end) {
            out.set(i - start, true);
        }
        out
    }

    /// For a symplectic vector `(x | z)` returns `(z | x)`, i.e. `B v`.
    pub fn symplectic_dual(&self) -> BitVec {
        let n = self.len / 2;
        self.slice(n, 2 * n).concat(&self.slice(0, n))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// The symplectic form `v^T B w` with `B = [[0, I], [I, 0]]`.
pub fn symplectic_product(v: &BitVec, w: &BitVec) -> Result<bool, F2Error> {
    if v.len() != w.len() {
        return Err(F2Error::LengthMismatch {
            left: v.len(),
            right: w.len(),
        });
    }
    if !v.len().is_multiple_of(2) {
        return Err(F2Error::OddLength(v.len()));
    }
    Ok(symplectic_unchecked(v, w))
}

/// Symplectic form without validation; callers guarantee equal even lengths.
#[inline]
pub(crate) fn symplectic_unchecked(v: &BitVec, w: &BitVec) -> bool {
    let n = v.len() / 2;
    if n.is_multiple_of(WORD) {
        let h = n / WORD;
        let (vx, vz) = v.words.split_at(h);
        let (wx, wz) = w.words.split_at(h);
        let mut acc = 0u32;
        for i in 0..h {
            acc ^= (vx[i] & wz[i]).count_ones() ^ (vz[i] & wx[i]).count_ones();
        }
        return acc & 1 == 1;
    }
    let mut acc = false;
    for i in v.iter_ones() {
        let j = if i < n { i + n } else { i - n };
        acc ^= w.get(j);
    }
    acc
}

/// A dense matrix over F2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    cols: usize,
    rows: Vec<BitVec>,
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{} [", self.nrows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            cols: dim,
            rows: (0..dim).map(|i| BitVec::unit(dim, i)).collect(),
        }
    }

    /// Builds a matrix from rows of a common length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self, F2Error> {
        for r in &rows {
            if r.len() != cols {
                return Err(F2Error::LengthMismatch {
                    left: cols,
                    right: r.len(),
                });
            }
        }
        Ok(Self { cols, rows })
    }

    pub fn from_bool_rows(rows: &[Vec<bool>]) -> Result<Self, F2Error> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| BitVec::from_bools(r.iter().copied()))
                .collect(),
        )
    }

    /// Parses rows written as `0`/`1` strings; convenient in tests.
    pub fn from_strs(rows: &[&str]) -> Self {
        let rows: Vec<BitVec> = rows.iter().map(|s| BitVec::from_bit_str(s)).collect();
        let cols = rows.first().map_or(0, BitVec::len);
        Self::from_rows(cols, rows).expect("ragged rows")
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self {
            cols,
            rows: (0..rows).map(|_| BitVec::random(cols, rng)).collect(),
        }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVec> {
        self.rows
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.nrows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &F2Matrix) -> Result<F2Matrix, F2Error> {
        if self.cols != rhs.nrows() {
            return Err(F2Error::LengthMismatch {
                left: self.cols,
                right: rhs.nrows(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = BitVec::zeros(rhs.cols);
                for k in row.iter_ones() {
                    acc.xor_assign(&rhs.rows[k]);
                }
                acc
            })
            .collect();
        Ok(F2Matrix {
            cols: rhs.cols,
            rows,
        })
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec, F2Error> {
        if v.len() != self.cols {
            return Err(F2Error::LengthMismatch {
                left: self.cols,
                right: v.len(),
            });
        }
        Ok(BitVec::from_bools(self.rows.iter().map(|r| r.dot(v))))
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &F2Matrix) -> Result<F2Matrix, F2Error> {
        if self.cols != other.cols {
            return Err(F2Error::LengthMismatch {
                left: self.cols,
                right: other.cols,
            });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(F2Matrix {
            cols: self.cols,
            rows,
        })
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (F2Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows.len() {
                break;
            }
            let Some(p) = (r..self.rows.len()).find(|&i| self.rows[i].get(c)) else {
                continue;
            };
            self.rows.swap(r, p);
            let pivot_row = self.rows[r].clone();
            for (i, row) in self.rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut basis = RowBasis::new(self.cols);
        self.rows.iter().filter(|r| basis.insert(r)).count()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.cols
    }

    /// Inverse by Gauss-Jordan elimination on `[M | I]`.
    pub fn invert(&self) -> Result<F2Matrix, F2Error> {
        if !self.is_square() {
            return Err(F2Error::NotSquare {
                rows: self.nrows(),
                cols: self.cols,
            });
        }
        let n = self.cols;
        let id = F2Matrix::identity(n);
        let mut aug = F2Matrix {
            cols: 2 * n,
            rows: self
                .rows
                .iter()
                .zip(&id.rows)
                .map(|(a, b)| a.concat(b))
                .collect(),
        };
        let pivots = aug.rref_in_place();
        if pivots.len() < n || (n > 0 && pivots[n - 1] >= n) {
            return Err(F2Error::SingularMatrix);
        }
        Ok(F2Matrix {
            cols: n,
            rows: aug.rows.iter().map(|r| r.slice(n, 2 * n)).collect(),
        })
    }

    /// Basis of the right kernel `{x : M x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<BitVec> {
        let (r, pivots) = self.rref();
        kernel_from_rref(&r, &pivots, self.cols)
    }

    /// Solves `M x = b`.
    ///
    /// The particular solution sets every free variable to zero; the returned
    /// kernel basis spans all homogeneous solutions, so the solution set is
    /// `x + span(kernel)`.
    pub fn solve_affine(&self, b: &BitVec) -> Result<(BitVec, Vec<BitVec>), F2Error> {
        if b.len() != self.nrows() {
            return Err(F2Error::LengthMismatch {
                left: self.nrows(),
                right: b.len(),
            });
        }
        let cols = self.cols;
        let mut aug = F2Matrix {
            cols: cols + 1,
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| r.concat(&BitVec::from_bools([b.get(i)])))
                .collect(),
        };
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&cols) {
            return Err(F2Error::Inconsistent);
        }
        let mut x = BitVec::zeros(cols);
        for (r, &c) in pivots.iter().enumerate() {
            if aug.rows[r].get(cols) {
                x.set(c, true);
            }
        }
        let coeffs = F2Matrix {
            cols,
            rows: aug.rows.iter().map(|r| r.slice(0, cols)).collect(),
        };
        Ok((x, kernel_from_rref(&coeffs, &pivots, cols)))
    }

    /// Completes the rows of `partial` to a basis of the row space of `space`,
    /// greedily taking rows of `space` in order. Returns only the added rows.
    pub fn extend_basis(partial: &F2Matrix, space: &F2Matrix) -> Result<F2Matrix, F2Error> {
        if partial.cols != space.cols {
            return Err(F2Error::LengthMismatch {
                left: partial.cols,
                right: space.cols,
            });
        }
        let mut span = RowBasis::new(space.cols);
        for r in &space.rows {
            span.insert(r);
        }
        let mut basis = RowBasis::new(space.cols);
        for r in &partial.rows {
            if !span.contains(r) {
                return Err(F2Error::NotInSpace);
            }
            if !basis.insert(r) {
                return Err(F2Error::NotIndependent);
            }
        }
        let added = space
            .rows
            .iter()
            .filter(|r| basis.insert(r))
            .cloned()
            .collect();
        Ok(F2Matrix {
            cols: space.cols,
            rows: added,
        })
    }

    /// Basis of `rowspace(a) ∩ rowspace(b)` by the Zassenhaus construction.
    pub fn intersect_rowspaces(a: &F2Matrix, b: &F2Matrix) -> Result<F2Matrix, F2Error> {
        if a.cols != b.cols {
            return Err(F2Error::LengthMismatch {
                left: a.cols,
                right: b.cols,
            });
        }
        let c = a.cols;
        let zero = BitVec::zeros(c);
        let mut rows: Vec<BitVec> = a.rows.iter().map(|r| r.concat(r)).collect();
        rows.extend(b.rows.iter().map(|r| r.concat(&zero)));
        let mut z = F2Matrix { cols: 2 * c, rows };
        let pivots = z.rref_in_place();
        let out = pivots
            .iter()
            .enumerate()
            .filter(|&(_, &p)| p >= c)
            .map(|(r, _)| z.rows[r].slice(c, 2 * c))
            .collect();
        Ok(F2Matrix { cols: c, rows: out })
    }

    /// Uniform element of `GL(F2, dim)` by rejection sampling.
    pub fn random_gl<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> F2Matrix {
        loop {
            let m = F2Matrix::random(dim, dim, rng);
            if m.rank() == dim {
                return m;
            }
        }
    }
}

fn kernel_from_rref(r: &F2Matrix, pivots: &[usize], cols: usize) -> Vec<BitVec> {
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = BitVec::unit(cols, f);
            for (row, &p) in pivots.iter().enumerate() {
                if r.rows[row].get(f) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

/// Incrementally built echelon basis that remembers, for every stored row, which
/// inserted vectors it is a combination of.
///
/// `reduce` expresses a vector as a combination of the independent inserted
/// vectors, which is what group-membership tests with sign reconstruction need.
#[derive(Clone, Debug)]
pub struct RowBasis {
    width: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    combos: Vec<Vec<usize>>,
    inserted: usize,
}

impl RowBasis {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
            combos: Vec::new(),
            inserted: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Reduces `v` against the basis. Returns the residual and the sorted
    /// indices (in insertion order of accepted vectors) whose XOR equals
    /// `v - residual`.
    pub fn reduce(&self, v: &BitVec) -> (BitVec, Vec<usize>) {
        assert_eq!(v.len(), self.width);
        let mut res = v.clone();
        let mut used = vec![false; self.inserted];
        for ((row, &p), combo) in self.rows.iter().zip(&self.pivots).zip(&self.combos) {
            if res.get(p) {
                res.xor_assign(row);
                for &c in combo {
                    used[c] ^= true;
                }
            }
        }
        let idx = used
            .iter()
            .enumerate()
            .filter_map(|(i, &u)| u.then_some(i))
            .collect();
        (res, idx)
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Inserts `v` if it is independent of the basis; returns whether it was.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        let (res, idx) = self.reduce(v);
        let Some(p) = res.first_one() else {
            return false;
        };
        let id = self.inserted;
        self.inserted += 1;
        let mut combo = idx;
        combo.push(id);
        // Keep rows fully reduced on their pivots so a single pass suffices.
        for (row, c) in self.rows.iter_mut().zip(self.combos.iter_mut()) {
            if row.get(p) {
                row.xor_assign(&res);
                *c = sym_diff(c, &combo);
            }
        }
        self.rows.push(res);
        self.pivots.push(p);
        self.combos.push(combo);
        true
    }
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(*x);
                i += 1;
            }
            (Some(_), Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (Some(x), None) => {
                out.push(*x);
                i += 1;
            }
            (None, Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}
