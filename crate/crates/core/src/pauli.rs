//! Signed Pauli operators and stabilizer codes in the symplectic picture.
//!
//! A [`PauliOp`] on `n` qubits is `±σ(x_1,z_1) ⊗ … ⊗ σ(x_n,z_n)` where
//! `σ(1,0) = X`, `σ(0,1) = Z`, `σ(1,1) = Y`. Products are tracked with their
//! full phase mod 4; only Hermitian results are handed back as `PauliOp`.
//! String form puts qubit 1 leftmost, with an optional `+`/`-` prefix.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::f2::{symplectic_unchecked, BitVec, F2Matrix, RowBasis};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("line {line}: unexpected character {ch:?}")]
    BadCharacter { line: usize, ch: char },
    #[error("line {line}: expected {expected} qubits, found {found}")]
    WrongLength {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("generators {first} and {second} anticommute")]
    AnticommutingGenerators { first: usize, second: usize },
    #[error("generators are linearly dependent (rank {rank} < {count})")]
    DependentGenerators { rank: usize, count: usize },
    #[error("qubit count mismatch: {expected} vs {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("product of anticommuting operators is not Hermitian")]
    NonHermitianProduct,
    #[error("declared k = {declared} but generators imply k = {implied}")]
    LogicalCountMismatch { declared: usize, implied: usize },
    #[error("code has no generators and no declared qubit count")]
    Empty,
    #[error("too many generators: {count} on {n} qubits")]
    TooManyGenerators { count: usize, n: usize },
    #[error("invalid code JSON: {0}")]
    Json(String),
    #[error("invalid permutation: {0}")]
    BadPermutation(String),
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub const NON_IDENTITY: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

/// A Hermitian Pauli operator with sign `±1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOp {
    x: BitVec,
    z: BitVec,
    negative: bool,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
            negative: false,
        }
    }

    pub fn new(x: BitVec, z: BitVec, negative: bool) -> Self {
        assert_eq!(x.len(), z.len(), "x and z parts must have equal length");
        Self { x, z, negative }
    }

    /// Builds `+P` from a symplectic vector `(x | z)` of length `2n`.
    pub fn from_symplectic(v: &BitVec) -> Self {
        assert!(v.len().is_multiple_of(2), "symplectic vector of odd length");
        let n = v.len() / 2;
        Self {
            x: v.slice(0, n),
            z: v.slice(n, 2 * n),
            negative: false,
        }
    }

    /// Single-qubit `letter` on `qubit` (0-based) of an `n`-qubit register.
    pub fn single(n: usize, qubit: usize, letter: Letter) -> Self {
        let mut p = Self::identity(n);
        p.set_letter(qubit, letter);
        p
    }

    pub fn from_letters(letters: &[Letter], negative: bool) -> Self {
        let mut p = Self::identity(letters.len());
        for (i, &l) in letters.iter().enumerate() {
            p.set_letter(i, l);
        }
        p.negative = negative;
        p
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    #[inline]
    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn with_sign(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }

    pub fn negated(&self) -> Self {
        let mut p = self.clone();
        p.negative = !p.negative;
        p
    }

    /// `+1` or `-1`.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn letter(&self, qubit: usize) -> Letter {
        Letter::from_bits(self.x.get(qubit), self.z.get(qubit))
    }

    pub fn set_letter(&mut self, qubit: usize, letter: Letter) {
        let (x, z) = letter.bits();
        self.x.set(qubit, x);
        self.z.set(qubit, z);
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.num_qubits()).map(|q| self.letter(q)).collect()
    }

    /// The symplectic vector `(x | z)`; the sign is dropped.
    pub fn to_symplectic(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    pub fn weight(&self) -> usize {
        self.support().count()
    }

    /// Qubits with a non-identity factor, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_qubits()).filter(move |&q| self.x.get(q) || self.z.get(q))
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// True iff the two operators commute.
    pub fn commutes_with(&self, other: &PauliOp) -> bool {
        !self.anticommutes_with(other)
    }

    pub fn anticommutes_with(&self, other: &PauliOp) -> bool {
        assert_eq!(
            self.num_qubits(),
            other.num_qubits(),
            "qubit count mismatch"
        );
        self.x.dot(&other.z) ^ self.z.dot(&other.x)
    }

    /// `self · other = i^phase · (+Q)`; returns `(phase mod 4, +Q)`.
    pub fn phased_product(&self, other: &PauliOp) -> (u8, PauliOp) {
        assert_eq!(
            self.num_qubits(),
            other.num_qubits(),
            "qubit count mismatch"
        );
        let mut e: i64 = 2 * (self.negative as i64 + other.negative as i64);
        let words = self
            .x
            .words()
            .iter()
            .zip(self.z.words())
            .zip(other.x.words().iter().zip(other.z.words()));
        for ((&x1, &z1), (&x2, &z2)) in words {
            let (px, py, pz) = (x1 & !z1, x1 & z1, !x1 & z1);
            let (qx, qy, qz) = (x2 & !z2, x2 & z2, !x2 & z2);
            // XY = iZ, YZ = iX, ZX = iY and the reverses pick up -i
            let plus = (px & qy) | (py & qz) | (pz & qx);
            let minus = (py & qx) | (pz & qy) | (px & qz);
            e += plus.count_ones() as i64 - minus.count_ones() as i64;
        }
        let out = PauliOp {
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
            negative: false,
        };
        (e.rem_euclid(4) as u8, out)
    }

    /// Product of two commuting operators. Errors if they anticommute.
    pub fn multiply(&self, other: &PauliOp) -> Result<PauliOp, PauliError> {
        let (phase, p) = self.phased_product(other);
        match phase {
            0 => Ok(p),
            2 => Ok(p.with_sign(true)),
            _ => Err(PauliError::NonHermitianProduct),
        }
    }

    /// Relabels qubits: the factor on qubit `q` moves to `perm[q]`.
    pub fn permuted(&self, perm: &[usize]) -> PauliOp {
        assert_eq!(perm.len(), self.num_qubits());
        let mut out = PauliOp::identity(self.num_qubits());
        for (q, &to) in perm.iter().enumerate() {
            out.set_letter(to, self.letter(q));
        }
        out.negative = self.negative;
        out
    }

    /// Appends `extra` identity qubits.
    pub fn padded(&self, extra: usize) -> PauliOp {
        let n = self.num_qubits() + extra;
        let mut out = PauliOp::identity(n);
        for q in 0..self.num_qubits() {
            out.set_letter(q, self.letter(q));
        }
        out.negative = self.negative;
        out
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PauliOp {
        PauliOp {
            x: BitVec::random(n, rng),
            z: BitVec::random(n, rng),
            negative: rng.gen(),
        }
    }

    /// Parses a signed Pauli string such as `-YXXYIZZ`.
    pub fn parse_line(s: &str, line: usize) -> Result<PauliOp, PauliError> {
        let s = s.trim();
        let (negative, body) = if let Some(rest) = s.strip_prefix('-') {
            (true, rest)
        } else if let Some(rest) = s.strip_prefix('\u{2212}') {
            (true, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (false, rest)
        } else {
            (false, s)
        };
        let letters = body
            .trim_start()
            .chars()
            .map(|c| Letter::from_char(c).ok_or(PauliError::BadCharacter { line, ch: c }))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PauliOp::from_letters(&letters, negative))
    }
}

impl FromStr for PauliOp {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PauliOp::parse_line(s, 1)
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        for q in 0..self.num_qubits() {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

impl Serialize for PauliOp {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliOp {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Syndrome bits, one per generator of the code that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syndrome(pub BitVec);

impl Syndrome {
    pub fn is_trivial(&self) -> bool {
        self.0.is_zero()
    }

    pub fn bits(&self) -> &BitVec {
        &self.0
    }
}

/// Result of a stabilizer-group membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Membership {
    /// The vector lies in the span of the generator vectors.
    pub in_group: bool,
    /// The generator product reproducing the vector has the same sign.
    pub sign_matches: bool,
}

/// An `[[n, k]]` stabilizer code given by an ordered list of independent,
/// pairwise commuting, Hermitian generators.
#[derive(Clone)]
pub struct StabilizerCode {
    n: usize,
    gens: Vec<PauliOp>,
    basis: RowBasis,
}

impl PartialEq for StabilizerCode {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.gens == other.gens
    }
}

impl Eq for StabilizerCode {}

impl fmt::Debug for StabilizerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "StabilizerCode[[{}, {}]] {:?}",
            self.n,
            self.k(),
            self.gens
        )
    }
}

impl StabilizerCode {
    pub fn new(n: usize, gens: Vec<PauliOp>) -> Result<Self, PauliError> {
        if gens.len() > n {
            return Err(PauliError::TooManyGenerators {
                count: gens.len(),
                n,
            });
        }
        for (i, g) in gens.iter().enumerate() {
            if g.num_qubits() != n {
                return Err(PauliError::WrongLength {
                    line: i + 1,
                    expected: n,
                    found: g.num_qubits(),
                });
            }
        }
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                if gens[i].anticommutes_with(&gens[j]) {
                    return Err(PauliError::AnticommutingGenerators {
                        first: i + 1,
                        second: j + 1,
                    });
                }
            }
        }
        let mut basis = RowBasis::new(2 * n);
        let rank = gens
            .iter()
            .filter(|g| basis.insert(&g.to_symplectic()))
            .count();
        if rank < gens.len() {
            return Err(PauliError::DependentGenerators {
                rank,
                count: gens.len(),
            });
        }
        Ok(Self { n, gens, basis })
    }

    /// The trivial `[[n, n]]` code with no generators.
    pub fn trivial(n: usize) -> Self {
        Self::new(n, Vec::new()).expect("empty code is valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.n - self.gens.len()
    }

    pub fn generators(&self) -> &[PauliOp] {
        &self.gens
    }

    pub fn num_generators(&self) -> usize {
        self.gens.len()
    }

    /// Generator matrix with one symplectic row `(x | z)` per generator.
    pub fn matrix(&self) -> F2Matrix {
        F2Matrix::from_rows(
            2 * self.n,
            self.gens.iter().map(PauliOp::to_symplectic).collect(),
        )
        .expect("generator rows have length 2n")
    }

    fn check_size(&self, e: &PauliOp) -> Result<(), PauliError> {
        if e.num_qubits() != self.n {
            return Err(PauliError::SizeMismatch {
                expected: self.n,
                found: e.num_qubits(),
            });
        }
        Ok(())
    }

    /// Bit `i` is set iff `e` anticommutes with generator `i`. Signs are ignored.
    pub fn syndrome(&self, e: &PauliOp) -> Result<Syndrome, PauliError> {
        self.check_size(e)?;
        Ok(Syndrome(BitVec::from_bools(
            self.gens.iter().map(|g| g.anticommutes_with(e)),
        )))
    }

    /// Vector-level membership in the stabilizer group, plus a sign comparison
    /// against the reconstructed generator product.
    pub fn membership(&self, e: &PauliOp) -> Result<Membership, PauliError> {
        self.check_size(e)?;
        Ok(match self.group_element(&e.to_symplectic()) {
            Some(p) => Membership {
                in_group: true,
                sign_matches: p.is_negative() == e.is_negative(),
            },
            None => Membership {
                in_group: false,
                sign_matches: false,
            },
        })
    }

    /// True iff `e`'s vector is in the generator row space.
    pub fn contains_vector(&self, v: &BitVec) -> bool {
        self.basis.contains(v)
    }

    /// The signed group element whose vector is `v`, if `v` is in the span.
    pub fn group_element(&self, v: &BitVec) -> Option<PauliOp> {
        let (res, idx) = self.basis.reduce(v);
        if !res.is_zero() {
            return None;
        }
        Some(self.product_of(&idx))
    }

    /// Product of the generators with the given indices, sign-exact.
    pub fn product_of(&self, indices: &[usize]) -> PauliOp {
        indices.iter().fold(PauliOp::identity(self.n), |acc, &i| {
            acc.multiply(&self.gens[i])
                .expect("stabilizer generators commute")
        })
    }

    /// Basis of the normalizer `N(S)` as symplectic vectors: the kernel of the
    /// syndrome map, dimension `n + k`.
    pub fn normalizer_basis(&self) -> Vec<BitVec> {
        let dual = F2Matrix::from_rows(
            2 * self.n,
            self.gens
                .iter()
                .map(|g| g.to_symplectic().symplectic_dual())
                .collect(),
        )
        .expect("rows have length 2n");
        dual.kernel()
    }

    /// Same group, generators relabelled by the qubit permutation `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, PauliError> {
        validate_permutation(perm, self.n)?;
        Self::new(self.n, self.gens.iter().map(|g| g.permuted(perm)).collect())
    }

    /// True iff both codes define the same signed stabilizer group.
    pub fn same_group(&self, other: &StabilizerCode) -> bool {
        self.n == other.n
            && self.gens.len() == other.gens.len()
            && other.gens.iter().all(|g| {
                self.membership(g)
                    .map(|m| m.in_group && m.sign_matches)
                    .unwrap_or(false)
            })
    }

    /// Same group as vectors, ignoring signs.
    pub fn same_rowspace(&self, other: &StabilizerCode) -> bool {
        self.n == other.n
            && self.gens.len() == other.gens.len()
            && other
                .gens
                .iter()
                .all(|g| self.contains_vector(&g.to_symplectic()))
    }

    /// Parses the text format: optional `#` comment lines, then one signed
    /// Pauli string per line, all of equal length.
    pub fn parse_text(text: &str) -> Result<Self, PauliError> {
        let mut gens = Vec::new();
        let mut n = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let p = PauliOp::parse_line(line, i + 1)?;
            match n {
                None => n = Some(p.num_qubits()),
                Some(n) if n != p.num_qubits() => {
                    return Err(PauliError::WrongLength {
                        line: i + 1,
                        expected: n,
                        found: p.num_qubits(),
                    })
                }
                _ => {}
            }
            gens.push(p);
        }
        let n = n.ok_or(PauliError::Empty)?;
        Self::new(n, gens)
    }

    pub fn format_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gens {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse_json(text: &str) -> Result<Self, PauliError> {
        let raw: CodeJson =
            serde_json::from_str(text).map_err(|e| PauliError::Json(e.to_string()))?;
        raw.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CodeJson::from(self)).expect("code serializes")
    }

    /// Accepts either the JSON or the text format.
    pub fn parse_any(text: &str) -> Result<Self, PauliError> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_text(text)
        }
    }

    /// Uniformly random independent commuting generators with random signs.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Self {
        assert!(k <= n);
        let mut gens: Vec<PauliOp> = Vec::new();
        let mut basis = RowBasis::new(2 * n);
        while gens.len() < n - k {
            let dual = F2Matrix::from_rows(
                2 * n,
                gens.iter()
                    .map(|g| g.to_symplectic().symplectic_dual())
                    .collect(),
            )
            .expect("rows have length 2n");
            let complement = dual.kernel();
            let mut v = BitVec::zeros(2 * n);
            for c in &complement {
                if rng.gen::<bool>() {
                    v.xor_assign(c);
                }
            }
            if basis.insert(&v) {
                gens.push(PauliOp::from_symplectic(&v).with_sign(rng.gen()));
            }
        }
        Self::new(n, gens).expect("construction yields a valid code")
    }
}

impl fmt::Display for StabilizerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_text())
    }
}

pub(crate) fn validate_permutation(perm: &[usize], n: usize) -> Result<(), PauliError> {
    if perm.len() != n {
        return Err(PauliError::BadPermutation(format!(
            "length {} for {n} qubits",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(PauliError::BadPermutation(format!("{perm:?}")));
        }
    }
    Ok(())
}

/// On-disk JSON form of a code.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeJson {
    pub n: usize,
    pub k: usize,
    pub generators: Vec<String>,
}

impl From<&StabilizerCode> for CodeJson {
    fn from(code: &StabilizerCode) -> Self {
        CodeJson {
            n: code.n(),
            k: code.k(),
            generators: code.gens.iter().map(ToString::to_string).collect(),
        }
    }
}

impl TryFrom<CodeJson> for StabilizerCode {
    type Error = PauliError;

    fn try_from(raw: CodeJson) -> Result<Self, Self::Error> {
        let gens = raw
            .generators
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let p = PauliOp::parse_line(s, i + 1)?;
                if p.num_qubits() != raw.n {
                    return Err(PauliError::WrongLength {
                        line: i + 1,
                        expected: raw.n,
                        found: p.num_qubits(),
                    });
                }
                Ok(p)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let code = StabilizerCode::new(raw.n, gens)?;
        if code.k() != raw.k {
            return Err(PauliError::LogicalCountMismatch {
                declared: raw.k,
                implied: code.k(),
            });
        }
        Ok(code)
    }
}

impl Serialize for StabilizerCode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CodeJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StabilizerCode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = CodeJson::deserialize(deserializer)?;
        raw.try_into().map_err(serde::de::Error::custom)
    }
}

/// Symplectic product of two operators as a bit.
pub fn symplectic(a: &PauliOp, b: &PauliOp) -> bool {
    symplectic_unchecked(&a.to_symplectic(), &b.to_symplectic())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    fn code(lines: &[&str]) -> StabilizerCode {
        StabilizerCode::parse_text(&lines.join("\n")).unwrap()
    }

    fn steane() -> StabilizerCode {
        code(&[
            "XXXXIII", "XXIIXXI", "XIXIXIX", "ZZZZIII", "ZZIIZZI", "ZIZIZIZ",
        ])
    }

    fn five() -> StabilizerCode {
        code(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"])
    }

    // Dense matrix oracle: 2^n x 2^n complex matrices, qubit 1 most significant.
    type Dense = Vec<Vec<Complex64>>;

    fn dense(p: &PauliOp) -> Dense {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let single = |l: Letter| -> [[Complex64; 2]; 2] {
            match l {
                Letter::I => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(1., 0.)]],
                Letter::X => [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
                Letter::Y => [[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]],
                Letter::Z => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
            }
        };
        let mut m: Dense = vec![vec![c(p.sign() as f64, 0.)]];
        for l in p.letters() {
            let s = single(l);
            let d = m.len();
            let mut out = vec![vec![c(0., 0.); 2 * d]; 2 * d];
            for i in 0..d {
                for j in 0..d {
                    for a in 0..2 {
                        for b in 0..2 {
                            out[2 * i + a][2 * j + b] = m[i][j] * s[a][b];
                        }
                    }
                }
            }
            m = out;
        }
        m
    }

    fn matmul(a: &Dense, b: &Dense) -> Dense {
        let n = a.len();
        let mut out = vec![vec![Complex64::new(0., 0.); n]; n];
        for i in 0..n {
            for k in 0..n {
                if a[i][k] == Complex64::new(0., 0.) {
                    continue;
                }
                for j in 0..n {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }

    fn close(a: &Dense, b: &Dense) -> bool {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn multiply_examples() {
        let (phase, q) = p("X").phased_product(&p("Z"));
        assert_eq!((phase, q), (3, p("Y"))); // XZ = -iY
        assert_eq!(
            p("X").multiply(&p("Z")),
            Err(PauliError::NonHermitianProduct)
        );
        assert_eq!(p("X").multiply(&p("X")).unwrap(), p("I"));
        let g = p("-YXXYIZZ");
        assert_eq!(g.multiply(&g).unwrap(), PauliOp::identity(7));
    }

    #[test]
    fn multiply_matches_dense_oracle_on_table_rows() {
        let a = p("ZZZZIII");
        let b = p("-YYXXZZI");
        let prod = a.multiply(&b).unwrap();
        assert_eq!(
            prod.to_symplectic(),
            a.to_symplectic().xor(&b.to_symplectic())
        );
        assert!(close(&dense(&prod), &matmul(&dense(&a), &dense(&b))));
    }

    #[test]
    fn syndrome_examples() {
        let s = steane();
        assert!(s.syndrome(&PauliOp::identity(7)).unwrap().is_trivial());
        for g in s.generators() {
            assert!(s.syndrome(g).unwrap().is_trivial());
        }
        let e = PauliOp::single(7, 0, Letter::X);
        assert_eq!(
            s.syndrome(&e).unwrap().bits(),
            &BitVec::from_bit_str("000111")
        );
        assert!(matches!(
            s.syndrome(&PauliOp::identity(5)),
            Err(PauliError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn membership_examples() {
        let c = five();
        for g in c.generators() {
            assert_eq!(
                c.membership(g).unwrap(),
                Membership {
                    in_group: true,
                    sign_matches: true
                }
            );
            assert!(!c.membership(&g.negated()).unwrap().sign_matches);
        }
        assert!(c.membership(&PauliOp::identity(5)).unwrap().in_group);
        // ZZZZZ * XZZXI is a weight-3 logical
        let logical = p("ZZZZZ").multiply(&p("XZZXI")).unwrap();
        assert_eq!(logical.weight(), 3);
        assert!(c.syndrome(&logical).unwrap().is_trivial());
        assert!(!c.membership(&logical).unwrap().in_group);
    }

    #[test]
    fn membership_reconstructs_signed_products() {
        let c = code(&[
            "-YXXYIZZ", "IXZZXII", "XZZXIII", "XIXZZII", "ZXIXZII", "IIIIIZI",
        ]);
        let prod = c.generators()[0].multiply(&c.generators()[5]).unwrap();
        let m = c.membership(&prod).unwrap();
        assert!(m.in_group && m.sign_matches);
        assert!(!c.membership(&prod.negated()).unwrap().sign_matches);
    }

    #[test]
    fn normalizer_examples() {
        assert_eq!(StabilizerCode::trivial(1).normalizer_basis().len(), 2);
        assert_eq!(five().normalizer_basis().len(), 6);
        let s = steane();
        let basis = s.normalizer_basis();
        assert_eq!(basis.len(), 8);
        let mut span = RowBasis::new(14);
        for b in &basis {
            assert!(span.insert(b));
            assert!(s
                .syndrome(&PauliOp::from_symplectic(b))
                .unwrap()
                .is_trivial());
        }
        assert!(span.contains(&p("XXXXXXX").to_symplectic()));
        assert!(span.contains(&p("ZZZZZZZ").to_symplectic()));
        for g in s.generators() {
            assert!(span.contains(&g.to_symplectic()));
        }
    }

    #[test]
    fn parse_examples() {
        let c = StabilizerCode::parse_text("+ZZ\n+XX").unwrap();
        assert_eq!((c.n(), c.k()), (2, 0));
        let t1 =
            "# Table 1, [[5,1,3]] side\n-YXXYIZZ\nIXZZXII\nXZZXIII\nXIXZZII\nZXIXZII\nIIIIIZI\n";
        let c = StabilizerCode::parse_text(t1).unwrap();
        assert_eq!((c.n(), c.k()), (7, 1));
        assert_eq!(
            StabilizerCode::parse_text("+XI\n+ZI"),
            Err(PauliError::AnticommutingGenerators {
                first: 1,
                second: 2
            })
        );
        assert_eq!(
            StabilizerCode::parse_text("XQ"),
            Err(PauliError::BadCharacter { line: 1, ch: 'Q' })
        );
        assert!(matches!(
            StabilizerCode::parse_text("XX\nZZZ"),
            Err(PauliError::WrongLength {
                line: 2,
                expected: 2,
                found: 3
            })
        ));
        assert!(matches!(
            StabilizerCode::parse_text("ZZ\n-ZZ"),
            Err(PauliError::DependentGenerators { .. })
        ));
        assert_eq!(
            StabilizerCode::parse_text("# nothing\n"),
            Err(PauliError::Empty)
        );
        assert_eq!(p("\u{2212}XZ"), p("-XZ"));
    }

    #[test]
    fn json_format() {
        let c = StabilizerCode::parse_json(r#"{"n":1,"k":1,"generators":[]}"#).unwrap();
        assert_eq!((c.n(), c.k()), (1, 1));
        let s = steane();
        assert_eq!(StabilizerCode::parse_any(&s.to_json()).unwrap(), s);
        assert!(matches!(
            StabilizerCode::parse_json(r#"{"n":2,"k":0,"generators":["ZZ"]}"#),
            Err(PauliError::LogicalCountMismatch {
                declared: 0,
                implied: 1
            })
        ));
        assert!(matches!(
            StabilizerCode::parse_json(r#"{"n":3,"k":2,"generators":["ZZ"]}"#),
            Err(PauliError::WrongLength { .. })
        ));
    }

    #[test]
    fn permutation_moves_letters() {
        let perm = vec![0, 1, 3, 2, 4, 5, 6];
        assert_eq!(p("-XIYZIII").permuted(&perm), p("-XIZYIII"));
        assert_eq!(p("XZ").padded(2), p("XZII"));
        let s = steane().permuted(&perm).unwrap();
        assert_eq!(s.generators()[2], p("XIIXXIX"));
        assert!(steane().permuted(&[0, 0, 1, 2, 3, 4, 5]).is_err());
    }

    fn code_strategy() -> impl Strategy<Value = StabilizerCode> {
        (1usize..8, any::<u64>()).prop_flat_map(|(n, seed)| {
            (0..=n).prop_map(move |k| {
                StabilizerCode::random(n, k, &mut ChaCha8Rng::seed_from_u64(seed))
            })
        })
    }

    proptest! {
        #[test]
        fn random_codes_are_valid(c in code_strategy()) {
            prop_assert_eq!(c.matrix().rank(), c.num_generators());
            for a in c.generators() {
                for b in c.generators() {
                    prop_assert!(a.commutes_with(b));
                }
            }
            prop_assert_eq!(c.normalizer_basis().len(), c.n() + c.k());
        }

        #[test]
        fn text_and_json_round_trip(c in code_strategy()) {
            prop_assume!(c.num_generators() > 0);
            prop_assert_eq!(StabilizerCode::parse_text(&c.format_text()).unwrap(), c.clone());
            prop_assert_eq!(StabilizerCode::parse_json(&c.to_json()).unwrap(), c);
        }

        #[test]
        fn syndrome_is_a_homomorphism(c in code_strategy(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = PauliOp::random(c.n(), &mut rng);
            let b = PauliOp::random(c.n(), &mut rng);
            let (_, ab) = a.phased_product(&b);
            let lhs = c.syndrome(&ab).unwrap();
            let rhs = c.syndrome(&a).unwrap().bits().xor(c.syndrome(&b).unwrap().bits());
            prop_assert_eq!(lhs.bits(), &rhs);
        }

        #[test]
        fn basis_change_acts_on_syndromes(c in code_strategy(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = c.num_generators();
            let a = F2Matrix::random_gl(r, &mut rng);
            let gens: Vec<PauliOp> = a
                .rows()
                .iter()
                .map(|row| c.product_of(&row.iter_ones().collect::<Vec<_>>()))
                .collect();
            let changed = StabilizerCode::new(c.n(), gens).unwrap();
            prop_assert!(changed.same_group(&c));
            let e = PauliOp::random(c.n(), &mut rng);
            let s = c.syndrome(&e).unwrap();
            let mapped = a.mul_vec(s.bits()).unwrap();
            let got = changed.syndrome(&e).unwrap();
            prop_assert_eq!(got.bits(), &mapped);
        }

        #[test]
        fn product_matches_dense_oracle(n in 1usize..4, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = PauliOp::random(n, &mut rng);
            let b = PauliOp::random(n, &mut rng);
            let (phase, q) = a.phased_product(&b);
            let i_pow = [
                Complex64::new(1., 0.),
                Complex64::new(0., 1.),
                Complex64::new(-1., 0.),
                Complex64::new(0., -1.),
            ][phase as usize];
            let expect: Dense = dense(&q).into_iter().map(|r| r.into_iter().map(|v| v * i_pow).collect()).collect();
            prop_assert!(close(&expect, &matmul(&dense(&a), &dense(&b))));
        }
    }
}
