//! Distance verification, error classification and the failure-probability
//! bounds behind the randomized construction.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::f2::{BitVec, F2Matrix, RowBasis};
use crate::pauli::{Letter, PauliOp, StabilizerCode};
use crate::rsra::{self, ConversionPath, ConversionStep, PaddedPair};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("code encodes no logical qubits")]
    ZeroLogicalQubits,
    #[error("weight cap must be at least 1")]
    ZeroCap,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("enumeration needs {needed} matrices, budget is {budget}")]
    Infeasible { needed: u128, budget: u128 },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("{0}")]
    Pipeline(String),
}

/// Result of a capped search for low-weight logical operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DistanceBound {
    Exact(usize),
    /// No logical operator up to the cap; the value is cap + 1.
    AtLeast(usize),
    /// Every operator was examined and none is a logical.
    Infinite,
}

impl DistanceBound {
    /// True iff the distance is known to be at least `d`.
    pub fn at_least(self, d: usize) -> bool {
        match self {
            DistanceBound::Exact(w) | DistanceBound::AtLeast(w) => w >= d,
            DistanceBound::Infinite => true,
        }
    }

    pub fn exact(self) -> Option<usize> {
        match self {
            DistanceBound::Exact(w) => Some(w),
            _ => None,
        }
    }
}

impl std::fmt::Display for DistanceBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DistanceBound::Exact(w) => write!(f, "{w}"),
            DistanceBound::AtLeast(w) => write!(f, ">={w}"),
            DistanceBound::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightCount {
    pub weight: usize,
    pub examined: u64,
    pub zero_syndrome: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub distance: DistanceBound,
    pub witness: Option<PauliOp>,
    pub per_weight_counts: Vec<WeightCount>,
}

const LETTERS: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];
const PARALLEL_LEAVES: f64 = 2e5;

/// Weight-ordered search for operators that commute with a set of checks but
/// lie outside a given group.
#[derive(Debug, Clone)]
pub struct LogicalSearch {
    n: usize,
    words: usize,
    /// `masks[q][l]`: checks anticommuting with letter `l` on qubit `q`.
    masks: Vec<[Vec<u64>; 3]>,
    group: RowBasis,
}

struct Scan {
    examined: u64,
    zero_syndrome: u64,
    witness: Option<PauliOp>,
}

/// Odometer step over letter indices, last position fastest; false after
/// the final assignment.
fn advance_letters(digits: &mut [usize]) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < 3 {
            return true;
        }
        *d = 0;
    }
    false
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl LogicalSearch {
    pub fn new(n: usize, checks: &[PauliOp], group: &[PauliOp]) -> Self {
        let words = checks.len().div_ceil(64).max(1);
        let masks = (0..n)
            .map(|q| {
                LETTERS.map(|l| {
                    let single = PauliOp::single(n, q, l);
                    let mut m = vec![0u64; words];
                    for (i, c) in checks.iter().enumerate() {
                        if c.anticommutes_with(&single) {
                            m[i / 64] |= 1 << (i % 64);
                        }
                    }
                    m
                })
            })
            .collect();
        let mut basis = RowBasis::new(2 * n);
        for g in group {
            basis.insert(&g.to_symplectic());
        }
        Self {
            n,
            words,
            masks,
            group: basis,
        }
    }

    /// Scans weight-`w` operators whose support starts at `first`, in
    /// lexicographic support order with letters X, Y, Z per position.
    fn scan_partition(&self, w: usize, first: usize) -> Scan {
        let mut scan = Scan {
            examined: 0,
            zero_syndrome: 0,
            witness: None,
        };
        let mut support: Vec<usize> = (0..w).map(|i| first + i).collect();
        if support.last().is_some_and(|&q| q >= self.n) {
            return scan;
        }
        let mut digits = vec![0usize; w];
        let mut syn = vec![0u64; self.words];
        loop {
            digits.iter_mut().for_each(|d| *d = 0);
            loop {
                syn.iter_mut().for_each(|s| *s = 0);
                for (&q, &d) in support.iter().zip(&digits) {
                    for (s, m) in syn.iter_mut().zip(&self.masks[q][d]) {
                        *s ^= m;
                    }
                }
                scan.examined += 1;
                if syn.iter().all(|&s| s == 0) {
                    scan.zero_syndrome += 1;
                    let mut op = PauliOp::identity(self.n);
                    for (&q, &d) in support.iter().zip(&digits) {
                        op.set_letter(q, LETTERS[d]);
                    }
                    if !self.group.contains(&op.to_symplectic()) {
                        scan.witness = Some(op);
                        return scan;
                    }
                }
                if !advance_letters(&mut digits) {
                    break;
                }
            }
            // Next support with the first qubit held fixed.
            let Some(i) = (1..w).rev().find(|&i| support[i] < self.n - (w - i)) else {
                return scan;
            };
            support[i] += 1;
            for j in i + 1..w {
                support[j] = support[j - 1] + 1;
            }
        }
    }

    /// Scans all weight-`w` operators, stopping at the first witness in
    /// enumeration order. Large scans are split by first support qubit.
    pub fn scan_weight(&self, w: usize) -> (WeightCount, Option<PauliOp>) {
        let count = |examined, zero_syndrome| WeightCount {
            weight: w,
            examined,
            zero_syndrome,
        };
        if w == 0 || w > self.n {
            return (count(0, 0), None);
        }
        let firsts = 0..=self.n - w;
        let leaves = binomial(self.n, w) * 3f64.powi(w as i32);
        let scans: Vec<Scan> = if leaves > PARALLEL_LEAVES {
            let best = std::sync::atomic::AtomicUsize::new(usize::MAX);
            firsts
                .into_par_iter()
                .map(|f| {
                    if f > best.load(std::sync::atomic::Ordering::Relaxed) {
                        return None;
                    }
                    let s = self.scan_partition(w, f);
                    if s.witness.is_some() {
                        best.fetch_min(f, std::sync::atomic::Ordering::Relaxed);
                    }
                    Some(s)
                })
                .collect::<Vec<_>>()
                .into_iter()
                .map_while(|s| s)
                .collect()
        } else {
            let mut out = Vec::new();
            for f in firsts {
                let s = self.scan_partition(w, f);
                let stop = s.witness.is_some();
                out.push(s);
                if stop {
                    break;
                }
            }
            out
        };
        let mut examined = 0;
        let mut zero = 0;
        for s in scans {
            examined += s.examined;
            zero += s.zero_syndrome;
            if s.witness.is_some() {
                return (count(examined, zero), s.witness);
            }
        }
        (count(examined, zero), None)
    }

    /// Least weight up to `cap` carrying a witness.
    pub fn min_weight(&self, cap: usize) -> (DistanceBound, Option<PauliOp>, Vec<WeightCount>) {
        let mut counts = Vec::new();
        for w in 1..=cap.min(self.n) {
            let (c, witness) = self.scan_weight(w);
            counts.push(c);
            if witness.is_some() {
                return (DistanceBound::Exact(w), witness, counts);
            }
        }
        let bound = if cap >= self.n {
            DistanceBound::Infinite
        } else {
            DistanceBound::AtLeast(cap + 1)
        };
        (bound, None, counts)
    }
}

/// Searcher for nontrivial logical operators of `code`.
pub fn logical_search(code: &StabilizerCode) -> LogicalSearch {
    LogicalSearch::new(code.n(), code.generators(), code.generators())
}

/// Minimum weight of a logical operator, searched exhaustively up to `cap`.
pub fn code_distance(code: &StabilizerCode, cap: usize) -> Result<DistanceReport, AnalysisError> {
    if code.k() == 0 {
        return Err(AnalysisError::ZeroLogicalQubits);
    }
    if cap == 0 {
        return Err(AnalysisError::ZeroCap);
    }
    let (distance, witness, per_weight_counts) = logical_search(code).min_weight(cap);
    Ok(DistanceReport {
        distance,
        witness,
        per_weight_counts,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathVerification {
    pub pass: bool,
    pub min_distance: usize,
    pub reports: Vec<DistanceReport>,
    /// Index of the first code below the target, with its witness.
    pub first_failure: Option<(usize, PauliOp)>,
}

/// Checks that every code on the path, endpoints included, has distance at
/// least `d`. Distances up to `d` are reported exactly.
pub fn verify_path(path: &ConversionPath, d: usize) -> PathVerification {
    let cap = d.max(1);
    let reports: Vec<DistanceReport> = path
        .intermediates
        .iter()
        .map(|code| {
            let (distance, witness, per_weight_counts) = logical_search(code).min_weight(cap);
            DistanceReport {
                distance,
                witness,
                per_weight_counts,
            }
        })
        .collect();
    let first_failure = reports.iter().enumerate().find_map(|(i, r)| {
        (!r.distance.at_least(d)).then(|| (i, r.witness.clone().expect("failure has a witness")))
    });
    PathVerification {
        pass: first_failure.is_none(),
        min_distance: d,
        reports,
        first_failure,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDistance {
    pub distance: DistanceBound,
    /// First code index (at the least weight) holding a logical of weight
    /// at most the cap, with that logical.
    pub failure: Option<(usize, PauliOp)>,
}

/// Least logical weight over all codes on the path, scanning weight by weight
/// across codes so that the cheapest witness is found first.
pub fn path_min_distance(path: &ConversionPath, cap: usize) -> PathDistance {
    let searches: Vec<LogicalSearch> = path.intermediates.iter().map(logical_search).collect();
    for w in 1..=cap.min(path.n) {
        for (i, s) in searches.iter().enumerate() {
            if let (_, Some(witness)) = s.scan_weight(w) {
                return PathDistance {
                    distance: DistanceBound::Exact(w),
                    failure: Some((i, witness)),
                };
            }
        }
    }
    PathDistance {
        distance: if cap >= path.n {
            DistanceBound::Infinite
        } else {
            DistanceBound::AtLeast(cap + 1)
        },
        failure: None,
    }
}

/// Cases of the error analysis for a pair of codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorClass {
    InBothGroups,
    InSNotNormalizerSp,
    InSpNotNormalizerS,
    OutsideBothNormalizers,
    Other,
}

fn check_n(code: &StabilizerCode, e: &PauliOp) -> Result<(), AnalysisError> {
    if code.n() != e.num_qubits() {
        return Err(AnalysisError::SizeMismatch(format!(
            "{}-qubit error on a {}-qubit code",
            e.num_qubits(),
            code.n()
        )));
    }
    Ok(())
}

fn in_normalizer(code: &StabilizerCode, e: &PauliOp) -> bool {
    code.generators().iter().all(|g| g.commutes_with(e))
}

/// Places `e` (up to phase) in exactly one case of the error analysis.
pub fn classify_error(
    e: &PauliOp,
    s: &StabilizerCode,
    sp: &StabilizerCode,
) -> Result<ErrorClass, AnalysisError> {
    check_n(s, e)?;
    check_n(sp, e)?;
    let v = e.to_symplectic();
    let (in_s, in_sp) = (s.contains_vector(&v), sp.contains_vector(&v));
    let (n_s, n_sp) = (in_normalizer(s, e), in_normalizer(sp, e));
    Ok(if in_s && in_sp {
        ErrorClass::InBothGroups
    } else if in_s && !n_sp {
        ErrorClass::InSNotNormalizerSp
    } else if in_sp && !n_s {
        ErrorClass::InSpNotNormalizerS
    } else if !n_s && !n_sp {
        ErrorClass::OutsideBothNormalizers
    } else {
        ErrorClass::Other
    })
}

/// True iff `e` has a nonzero syndrome or lies in the group (up to phase).
pub fn detectable(code: &StabilizerCode, e: &PauliOp) -> Result<bool, AnalysisError> {
    check_n(code, e)?;
    Ok(!in_normalizer(code, e) || code.contains_vector(&e.to_symplectic()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemReport {
    pub distance: DistanceBound,
    pub witness: Option<PauliOp>,
}

impl SubsystemReport {
    /// A step tolerates `t` faults iff its subsystem distance is at least
    /// `2t + 1`.
    pub fn tolerates(&self, t: usize) -> bool {
        self.distance.at_least(2 * t + 1)
    }
}

/// Distance of the subsystem code formed during a step: the kept generators
/// are the stabilizer, the exchanged pair `{g, g'}` is gauge. Dressed
/// logicals commute with the stabilizer but lie outside the gauge group.
pub fn step_subsystem_distance(
    pre: &StabilizerCode,
    step: &ConversionStep,
    cap: usize,
) -> Result<SubsystemReport, AnalysisError> {
    let r = step.replaced_index;
    if r >= pre.num_generators() {
        return Err(AnalysisError::SizeMismatch(format!(
            "replaced index {r} in a code with {} generators",
            pre.num_generators()
        )));
    }
    check_n(pre, &step.measure)?;
    let stabilizer: Vec<PauliOp> = pre
        .generators()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != r)
        .map(|(_, g)| g.clone())
        .collect();
    let mut gauge = stabilizer.clone();
    gauge.push(step.correct.clone());
    gauge.push(step.measure.clone());
    let (distance, witness, _) = LogicalSearch::new(pre.n(), &stabilizer, &gauge).min_weight(cap);
    Ok(SubsystemReport { distance, witness })
}

/// Exponent convention of the failure bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BoundExponent {
    /// `(d - 1) / (n + m)`: an error of weight below `d` is the relevant event.
    #[default]
    DMinusOne,
    /// `d / (n + m)`, a slightly looser variant.
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub gc: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub ln_raw: f64,
    pub raw: f64,
    /// `raw` clamped to `[0, 1]`.
    pub effective: f64,
}

/// Binary relative entropy `D(p || q)` in nats, with `0 ln 0 = 0`.
pub fn relative_entropy(p: f64, q: f64) -> f64 {
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    term(p, q) + term(1.0 - p, 1.0 - q)
}

/// `4^(n+m) · exp(-D(p || 3/4)(n+m)) · (gc + 1) · 2^(-gc)`, evaluated in
/// log space.
pub fn failure_bound(b: BoundInputs, exponent: BoundExponent) -> Result<BoundValue, AnalysisError> {
    let total = b.n + b.m;
    if total == 0 || b.d == 0 {
        return Err(AnalysisError::Domain("need n + m >= 1 and d >= 1".into()));
    }
    let num = match exponent {
        BoundExponent::DMinusOne => b.d - 1,
        BoundExponent::D => b.d,
    };
    let p = num as f64 / total as f64;
    if 4 * num >= 3 * total {
        return Err(AnalysisError::Domain(format!(
            "{num}/{total} is not below 3/4"
        )));
    }
    let t = total as f64;
    let ln4 = 4f64.ln();
    let ln_raw = t * ln4 - relative_entropy(p, 0.75) * t + ((b.gc + 1) as f64).ln()
        - b.gc as f64 * std::f64::consts::LN_2;
    let raw = ln_raw.exp();
    Ok(BoundValue {
        ln_raw,
        raw,
        effective: raw.clamp(0.0, 1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinAncilla {
    pub m: usize,
    pub bound: f64,
    /// `d·log2(n/d) + log2(1/ε)`, the asymptotic scale for comparison.
    pub reference: f64,
}

pub const MAX_ANCILLA_SCAN: usize = 1 << 20;

/// Least `m` with `failure_bound(n, m, d, gc = m) < ε`.
pub fn min_ancilla(
    n: usize,
    d: usize,
    epsilon: f64,
    exponent: BoundExponent,
) -> Result<MinAncilla, AnalysisError> {
    if d == 0 || !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(AnalysisError::Domain(
            "need d >= 1 and 0 < epsilon <= 1".into(),
        ));
    }
    let ln_eps = epsilon.ln();
    let reference = d as f64 * (n as f64 / d as f64).log2() - epsilon.log2();
    for m in 0..MAX_ANCILLA_SCAN {
        if let Ok(v) = failure_bound(BoundInputs { n, m, d, gc: m }, exponent) {
            if v.ln_raw < ln_eps {
                return Ok(MinAncilla {
                    m,
                    bound: v.raw,
                    reference,
                });
            }
        }
    }
    Err(AnalysisError::Domain(format!(
        "no m below {MAX_ANCILLA_SCAN} reaches epsilon"
    )))
}

/// Exact probability as a reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u128,
    pub den: u128,
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Ratio {
    pub fn new(num: u128, den: u128) -> Self {
        let g = gcd(num, den).max(1);
        Ratio {
            num: num / g,
            den: den / g,
        }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Closed form `((n-2)2^(n-1) + 1) / ((2^n - 1)(2^(n-1) - 1))` for an
/// orthogonal pair; 0 for `n = 1`, where no orthogonal nonzero pair exists.
pub fn lemma1_exact(n: usize) -> Result<Ratio, AnalysisError> {
    if n == 0 || n > 62 {
        return Err(AnalysisError::Domain("need 1 <= n <= 62".into()));
    }
    if n == 1 {
        return Ok(Ratio { num: 0, den: 1 });
    }
    let half = 1u128 << (n - 1);
    Ok(Ratio::new(
        (n as u128 - 2) * half + 1,
        ((half << 1) - 1) * (half - 1),
    ))
}

/// The bound `(n - 1) 2^-n`.
pub fn lemma1_bound(n: usize) -> f64 {
    (n as f64 - 1.0) * 2f64.powi(-(n as i32))
}

/// Small dense matrices over F2 with row `i` stored as the bits of `rows[i]`
/// (bit `j` = column `j`).
fn small_invert(rows: &[u64], n: usize) -> Option<Vec<u64>> {
    let mut a = rows.to_vec();
    let mut inv: Vec<u64> = (0..n).map(|i| 1 << i).collect();
    for c in 0..n {
        let p = (c..n).find(|&r| a[r] >> c & 1 == 1)?;
        a.swap(c, p);
        inv.swap(c, p);
        for r in 0..n {
            if r != c && a[r] >> c & 1 == 1 {
                a[r] ^= a[c];
                inv[r] ^= inv[c];
            }
        }
    }
    Some(inv)
}

fn small_mul_vec(rows: &[u64], v: u64) -> u64 {
    rows.iter().enumerate().fold(0, |acc, (i, r)| {
        acc | (((r & v).count_ones() as u64) & 1) << i
    })
}

fn small_transpose(rows: &[u64], n: usize) -> Vec<u64> {
    (0..n)
        .map(|j| (0..n).fold(0, |acc, i| acc | ((rows[i] >> j) & 1) << i))
        .collect()
}

fn last_one(v: u64) -> u32 {
    63 - v.leading_zeros()
}

/// Whether the last 1 of `U v` precedes the first 1 of `(U^-1)^T w`; `None`
/// for singular `U`.
fn lemma1_event(u: &[u64], n: usize, v: u64, w: u64) -> Option<bool> {
    let inv = small_invert(u, n)?;
    let uv = small_mul_vec(u, v);
    let wt = small_mul_vec(&small_transpose(&inv, n), w);
    Some(last_one(uv) < wt.trailing_zeros())
}

fn bits_of(v: &BitVec) -> u64 {
    v.iter_ones().fold(0, |acc, i| acc | 1 << i)
}

fn check_lemma1_inputs(n: usize, v: &BitVec, w: &BitVec) -> Result<(u64, u64), AnalysisError> {
    if n == 0 || n > 63 || v.len() != n || w.len() != n {
        return Err(AnalysisError::Domain(
            "vectors must have length n in 1..=63".into(),
        ));
    }
    if v.is_zero() || w.is_zero() {
        return Err(AnalysisError::Domain("vectors must be nonzero".into()));
    }
    Ok((bits_of(v), bits_of(w)))
}

pub const LEMMA1_DEFAULT_BUDGET: u128 = 1 << 16;

/// Exact probability over all of `GL(F2, n)`, found by filtering all `2^(n²)`
/// matrices.
pub fn lemma1_enumerate(
    n: usize,
    v: &BitVec,
    w: &BitVec,
    budget: u128,
) -> Result<Ratio, AnalysisError> {
    let (vb, wb) = check_lemma1_inputs(n, v, w)?;
    if n * n >= 127 || (1u128 << (n * n)) > budget {
        return Err(AnalysisError::Infeasible {
            needed: if n * n >= 127 {
                u128::MAX
            } else {
                1 << (n * n)
            },
            budget,
        });
    }
    let mask = (1u64 << n) - 1;
    let (mut hits, mut total) = (0u128, 0u128);
    let mut rows = vec![0u64; n];
    for code in 0..(1u64 << (n * n)) {
        for (i, r) in rows.iter_mut().enumerate() {
            *r = (code >> (i * n)) & mask;
        }
        if let Some(event) = lemma1_event(&rows, n, vb, wb) {
            total += 1;
            hits += event as u128;
        }
    }
    Ok(Ratio::new(hits, total))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl Estimate {
    fn from_hits(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials.max(1) as f64;
        Estimate {
            mean: p,
            stderr: (p * (1.0 - p) / trials.max(1) as f64).sqrt(),
            trials,
        }
    }
}

/// Monte Carlo estimate over uniformly sampled `U ∈ GL(F2, n)`.
pub fn lemma1_mc<R: Rng + ?Sized>(
    n: usize,
    v: &BitVec,
    w: &BitVec,
    trials: u64,
    rng: &mut R,
) -> Result<Estimate, AnalysisError> {
    let (vb, wb) = check_lemma1_inputs(n, v, w)?;
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut hits = 0;
    let mut rows = vec![0u64; n];
    for _ in 0..trials {
        loop {
            rows.iter_mut().for_each(|r| *r = rng.gen::<u64>() & mask);
            if let Some(event) = lemma1_event(&rows, n, vb, wb) {
                hits += event as u64;
                break;
            }
        }
    }
    Ok(Estimate::from_hits(hits, trials))
}

/// Independent estimate that samples the pair `(U v, (U^-1)^T w)` directly:
/// `GL(F2, n)` acts transitively on nonzero pairs with a fixed inner
/// product, so this is a uniform pair of nonzero vectors with that product.
pub fn lemma1_mc_pairs<R: Rng + ?Sized>(
    n: usize,
    inner: bool,
    trials: u64,
    rng: &mut R,
) -> Result<Estimate, AnalysisError> {
    if n == 0 || n > 63 || (n == 1 && !inner) {
        return Err(AnalysisError::Domain("no such pair of vectors".into()));
    }
    let mask = (1u64 << n) - 1;
    let mut hits = 0;
    for _ in 0..trials {
        let (a, b) = loop {
            let a = rng.gen::<u64>() & mask;
            let b = rng.gen::<u64>() & mask;
            if a != 0 && b != 0 && ((a & b).count_ones() % 2 == 1) == inner {
                break (a, b);
            }
        };
        hits += (last_one(a) < b.trailing_zeros()) as u64;
    }
    Ok(Estimate::from_hits(hits, trials))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma2Report {
    pub gc: usize,
    pub m: usize,
    pub h_invertible: bool,
    pub gc_at_least_m: bool,
    /// Rank of the full commutation matrix between the two generator lists.
    pub generator_rank: usize,
}

impl Lemma2Report {
    pub fn pass(&self) -> bool {
        self.h_invertible && self.gc_at_least_m && self.generator_rank == self.gc
    }
}

/// Rank of the matrix of symplectic products between two generator lists.
pub fn commutation_rank(a: &[PauliOp], b: &[PauliOp]) -> usize {
    rsra::commutativity_matrix(a, b).rank()
}

/// Checks the exchanged block of the deterministic decomposition of a padded
/// pair: its commutativity matrix is invertible, it has at least `m` rows,
/// and its size equals the basis-independent commutation rank.
pub fn lemma2_check(pair: &PaddedPair) -> Result<Lemma2Report, AnalysisError> {
    let raw = rsra::raw_bases(&pair.source, &pair.target)
        .map_err(|e| AnalysisError::Pipeline(e.to_string()))?;
    let h: F2Matrix = rsra::commutativity_matrix(&raw.gcp, &raw.gc);
    let gc = raw.gc.len();
    Ok(Lemma2Report {
        gc,
        m: pair.m,
        h_invertible: h.invert().is_ok(),
        gc_at_least_m: gc >= pair.m,
        generator_rank: commutation_rank(pair.source.generators(), pair.target.generators()),
    })
}

/// All `n`-qubit Paulis of weight exactly `w`, in the same order as the
/// distance search.
pub fn paulis_of_weight(n: usize, w: usize) -> Vec<PauliOp> {
    fn rec(
        n: usize,
        w: usize,
        start: usize,
        cur: &mut PauliOp,
        out: &mut Vec<PauliOp>,
        support: &mut Vec<usize>,
    ) {
        if support.len() == w {
            let mut digits = vec![0usize; w];
            loop {
                for (&q, &d) in support.iter().zip(&digits) {
                    cur.set_letter(q, LETTERS[d]);
                }
                out.push(cur.clone());
                if !advance_letters(&mut digits) {
                    break;
                }
            }
            for &q in support.iter() {
                cur.set_letter(q, Letter::I);
            }
            return;
        }
        for q in start..n {
            if n - q < w - support.len() {
                break;
            }
            support.push(q);
            rec(n, w, q + 1, cur, out, support);
            support.pop();
        }
    }
    let mut out = Vec::new();
    if w <= n {
        rec(
            n,
            w,
            0,
            &mut PauliOp::identity(n),
            &mut out,
            &mut Vec::new(),
        );
    }
    out
}
