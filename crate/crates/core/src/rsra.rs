//! Randomized stabilizer rewiring: decomposition of a code pair, randomized
//! rewiring of the exchanged blocks, and the resulting chain of adjacent codes.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{self, DistanceBound};
use crate::f2::{BitVec, F2Error, F2Matrix};
use crate::pauli::{CodeJson, Letter, PauliError, PauliOp, StabilizerCode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RsraError {
    #[error("codes encode different numbers of logical qubits ({source_k} vs {target_k})")]
    MismatchedLogicalCount { source_k: usize, target_k: usize },
    #[error("codes act on different numbers of qubits ({0} vs {1})")]
    MismatchedQubitCount(usize, usize),
    #[error("commutativity matrix is singular")]
    SingularCommutativityMatrix,
    #[error("no complementary generator exists for bridge {index}")]
    Inconsistent { index: usize },
    #[error("step {step} is not an adjacent move: {reason}")]
    AdjacencyViolation { step: usize, reason: String },
    #[error("path endpoint does not match the padded {0} code")]
    EndpointMismatch(&'static str),
    #[error("{which} code has distance {distance}, below the requested {required}")]
    EndpointDistance {
        which: &'static str,
        distance: usize,
        required: usize,
    },
    #[error("no distance-preserving path in {retries} draws (best minimum distance {best_min_distance})")]
    SearchExhausted {
        retries: usize,
        best_min_distance: usize,
    },
    #[error("invalid fixture: {0}")]
    FixtureInvalid(String),
    #[error("malformed path: {0}")]
    MalformedPath(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Code(#[from] PauliError),
}

impl From<F2Error> for RsraError {
    fn from(e: F2Error) -> Self {
        RsraError::Internal(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsraConfig {
    pub m: usize,
    pub seed: u64,
    pub max_retries: usize,
    pub min_distance: usize,
    /// Number of random coset elements tried when picking each complementary
    /// generator; 0 keeps the canonical solution.
    pub gbar_weight_search: usize,
}

impl Default for RsraConfig {
    fn default() -> Self {
        Self {
            m: 0,
            seed: 0,
            max_retries: 1000,
            min_distance: 3,
            gbar_weight_search: 0,
        }
    }
}

/// Seed of retry `index` derived from a base seed with a SplitMix64 step.
pub fn child_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Both codes of a pair on a common qubit count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedPair {
    pub source: StabilizerCode,
    pub target: StabilizerCode,
    pub m: usize,
    /// Qubits that only carry single-qubit stabilizers in the padded target
    /// and are discarded at the end of a conversion.
    pub ancilla_qubits: Vec<usize>,
}

fn extend_with(
    code: &StabilizerCode,
    n: usize,
    extra: &[(usize, Letter)],
) -> Result<StabilizerCode, RsraError> {
    let pad = n - code.n();
    let mut gens: Vec<PauliOp> = code.generators().iter().map(|g| g.padded(pad)).collect();
    gens.extend(extra.iter().map(|&(q, l)| PauliOp::single(n, q, l)));
    Ok(StabilizerCode::new(n, gens)?)
}

/// Brings both codes to `max(n1, n2) + m` qubits: the smaller code first gets
/// `Z` stabilizers on its missing qubits, then the source gains `Z` and the
/// target `X` on each of the last `m` qubits.
pub fn pad(a: &StabilizerCode, b: &StabilizerCode, m: usize) -> Result<PaddedPair, RsraError> {
    if a.k() != b.k() {
        return Err(RsraError::MismatchedLogicalCount {
            source_k: a.k(),
            target_k: b.k(),
        });
    }
    let base = a.n().max(b.n());
    let n = base + m;
    let side = |code: &StabilizerCode, letter: Letter| -> Vec<(usize, Letter)> {
        (code.n()..base)
            .map(|q| (q, Letter::Z))
            .chain((base..n).map(|q| (q, letter)))
            .collect()
    };
    Ok(PaddedPair {
        source: extend_with(a, n, &side(a, Letter::Z))?,
        target: extend_with(b, n, &side(b, Letter::X))?,
        m,
        ancilla_qubits: (b.n()..n).collect(),
    })
}

/// Position of a generator within the block structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    A(usize),
    B(usize),
    C(usize),
}

/// One adjacent move of a conversion schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    /// `g_i -> ḡ_i`
    Bridge(usize),
    /// `gC_i -> gC'_i`
    Swap(usize),
    /// `ḡ_i -> g'_i`
    Unbridge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub padded_n: usize,
    pub m: usize,
    pub ancilla_qubits: Vec<usize>,
    pub source: StabilizerCode,
    pub target: StabilizerCode,
    pub ga: Vec<PauliOp>,
    pub gb: Vec<PauliOp>,
    pub gc: Vec<PauliOp>,
    pub gbp: Vec<PauliOp>,
    pub gcp: Vec<PauliOp>,
    /// Empty until solved, then one per `gb` element.
    pub gbars: Vec<PauliOp>,
    /// Order of the generator list of every intermediate code.
    pub layout: Vec<Slot>,
    pub schedule: Vec<Move>,
}

fn canonical_layout(a: usize, b: usize, c: usize) -> Vec<Slot> {
    (0..a)
        .map(Slot::A)
        .chain((0..b).map(Slot::B))
        .chain((0..c).map(Slot::C))
        .collect()
}

fn canonical_schedule(b: usize, c: usize) -> Vec<Move> {
    (0..b)
        .map(Move::Bridge)
        .chain((0..c).map(Move::Swap))
        .chain((0..b).rev().map(Move::Unbridge))
        .collect()
}

/// Sign-exact product of the selected commuting operators.
fn combine(ops: &[PauliOp], coeffs: impl Iterator<Item = bool>, n: usize) -> PauliOp {
    ops.iter()
        .zip(coeffs)
        .filter(|(_, c)| *c)
        .fold(PauliOp::identity(n), |acc, (p, _)| {
            acc.multiply(p)
                .expect("operators in one stabilizer group commute")
        })
}

fn elements(code: &StabilizerCode, rows: &[BitVec]) -> Result<Vec<PauliOp>, RsraError> {
    rows.iter()
        .map(|v| {
            code.group_element(v)
                .ok_or_else(|| RsraError::Internal("basis vector outside its group".into()))
        })
        .collect()
}

/// Matrix `H` with `H[i][j] = <gcp_i, gc_j>`.
pub fn commutativity_matrix(gcp: &[PauliOp], gc: &[PauliOp]) -> F2Matrix {
    let rows: Vec<Vec<bool>> = gcp
        .iter()
        .map(|p| gc.iter().map(|c| p.anticommutes_with(c)).collect())
        .collect();
    let mut h = F2Matrix::zeros(gcp.len(), gc.len());
    for (i, r) in rows.iter().enumerate() {
        for (j, &b) in r.iter().enumerate() {
            h.set(i, j, b);
        }
    }
    h
}

/// Block bases before the commutativity matrix is normalized.
pub(crate) struct RawBases {
    pub ga: Vec<PauliOp>,
    pub gb: Vec<PauliOp>,
    pub gc: Vec<PauliOp>,
    pub gbp: Vec<PauliOp>,
    pub gcp: Vec<PauliOp>,
}

pub(crate) fn raw_bases(s: &StabilizerCode, t: &StabilizerCode) -> Result<RawBases, RsraError> {
    if s.n() != t.n() {
        return Err(RsraError::MismatchedQubitCount(s.n(), t.n()));
    }
    let cols = 2 * s.n();
    let gs = s.matrix();
    let gt = t.matrix();

    // Vectors shared by both groups; those whose signs disagree form a
    // codimension-one subspace complement spanned by one defect vector `v0`,
    // since the sign difference is linear on the intersection.
    let shared = F2Matrix::intersect_rowspaces(&gs, &gt)?;
    let mut plain = Vec::new();
    let mut defect: Option<BitVec> = None;
    for v in shared.rows() {
        let a = s.group_element(v).expect("in source span");
        let b = t.group_element(v).expect("in target span");
        if a.is_negative() == b.is_negative() {
            plain.push(v.clone());
        } else if let Some(v0) = &defect {
            plain.push(v.xor(v0));
        } else {
            defect = Some(v.clone());
        }
    }
    let ga = elements(s, &plain)?;

    let normalizer = |code: &StabilizerCode| {
        F2Matrix::from_rows(cols, code.normalizer_basis()).expect("normalizer rows have length 2n")
    };
    let mut start = plain.clone();
    start.extend(defect.iter().cloned());
    let start = F2Matrix::from_rows(cols, start)?;

    let b_space = F2Matrix::intersect_rowspaces(&gs, &normalizer(t))?;
    let bp_space = F2Matrix::intersect_rowspaces(&gt, &normalizer(s))?;
    let mut b_rows: Vec<BitVec> = defect.iter().cloned().collect();
    let mut bp_rows = b_rows.clone();
    b_rows.extend(F2Matrix::extend_basis(&start, &b_space)?.into_rows());
    bp_rows.extend(F2Matrix::extend_basis(&start, &bp_space)?.into_rows());
    if b_rows.len() != bp_rows.len() {
        return Err(RsraError::Internal(format!(
            "bridge blocks differ in size ({} vs {})",
            b_rows.len(),
            bp_rows.len()
        )));
    }
    let gb = elements(s, &b_rows)?;
    let gbp = elements(t, &bp_rows)?;

    let mut ab = plain.clone();
    ab.extend(b_rows);
    let mut abp = plain;
    abp.extend(bp_rows);
    let gc = elements(
        s,
        F2Matrix::extend_basis(&F2Matrix::from_rows(cols, ab)?, &gs)?.rows(),
    )?;
    let gcp = elements(
        t,
        F2Matrix::extend_basis(&F2Matrix::from_rows(cols, abp)?, &gt)?.rows(),
    )?;
    if gc.len() != gcp.len() {
        return Err(RsraError::Internal(
            "exchanged blocks differ in size".into(),
        ));
    }
    Ok(RawBases {
        ga,
        gb,
        gc,
        gbp,
        gcp,
    })
}

/// Deterministic block decomposition of a padded pair, with the exchanged
/// target block rescaled so that `gcp_i` anticommutes with `gc_j` iff `i = j`.
pub fn decompose(pair: &PaddedPair) -> Result<Decomposition, RsraError> {
    let RawBases {
        ga,
        gb,
        gc,
        gbp,
        gcp,
    } = raw_bases(&pair.source, &pair.target)?;
    let n = pair.source.n();
    let h = commutativity_matrix(&gcp, &gc);
    let hinv = h
        .invert()
        .map_err(|_| RsraError::SingularCommutativityMatrix)?;
    let gcp: Vec<PauliOp> = (0..gcp.len())
        .map(|i| combine(&gcp, hinv.row(i).iter(), n))
        .collect();
    let layout = canonical_layout(ga.len(), gb.len(), gc.len());
    let schedule = canonical_schedule(gb.len(), gc.len());
    Ok(Decomposition {
        padded_n: n,
        m: pair.m,
        ancilla_qubits: pair.ancilla_qubits.clone(),
        source: pair.source.clone(),
        target: pair.target.clone(),
        ga,
        gb,
        gc,
        gbp,
        gcp,
        gbars: Vec::new(),
        layout,
        schedule,
    })
}

/// Rewires the exchanged blocks: `gC <- U(V gB + gC)` and
/// `gC' <- (U^-1)^T (V' gB' + gC')` for uniform `V`, `V'` and `U ∈ GL`.
/// Any previously chosen complementary generators are discarded.
pub fn randomize<R: Rng + ?Sized>(dec: &Decomposition, rng: &mut R) -> Decomposition {
    let n = dec.padded_n;
    let (b, c) = (dec.gb.len(), dec.gc.len());
    let v = F2Matrix::random(c, b, rng);
    let vp = F2Matrix::random(c, b, rng);
    let u = F2Matrix::random_gl(c, rng);
    let w = u.invert().expect("U is invertible").transpose();
    let shift = |blk: &[PauliOp], bridge: &[PauliOp], vm: &F2Matrix| -> Vec<PauliOp> {
        blk.iter()
            .enumerate()
            .map(|(j, g)| {
                g.multiply(&combine(bridge, vm.row(j).iter(), n))
                    .expect("same group")
            })
            .collect()
    };
    let pre = shift(&dec.gc, &dec.gb, &v);
    let prep = shift(&dec.gcp, &dec.gbp, &vp);
    let mut out = dec.clone();
    out.gc = (0..c).map(|i| combine(&pre, u.row(i).iter(), n)).collect();
    out.gcp = (0..c).map(|i| combine(&prep, w.row(i).iter(), n)).collect();
    out.gbars.clear();
    out
}

fn gbar_key(p: &PauliOp) -> (usize, String) {
    (p.weight(), p.to_string())
}

/// Chooses each complementary generator `ḡ_i`: anticommuting with `g_i` and
/// `g'_i`, commuting with `gA`, `gC`, `gC'`, later `g_j`, `g'_j` and earlier
/// `ḡ_j`. With `weight_search > 0`, that many random coset elements compete
/// with the canonical solution for the lowest weight.
pub fn solve_gbars<R: Rng + ?Sized>(
    dec: &Decomposition,
    weight_search: usize,
    rng: &mut R,
) -> Result<Decomposition, RsraError> {
    let mut out = dec.clone();
    if out.gbars.len() == out.gb.len() {
        return Ok(out);
    }
    out.gbars.clear();
    let cols = 2 * dec.padded_n;
    for i in 0..dec.gb.len() {
        let mut rows: Vec<&PauliOp> = Vec::new();
        rows.extend(&dec.ga);
        rows.extend(&dec.gc);
        rows.extend(&dec.gcp);
        rows.extend(&dec.gb[i + 1..]);
        rows.extend(&dec.gbp[i + 1..]);
        rows.extend(&out.gbars);
        let zeros = rows.len();
        rows.push(&dec.gb[i]);
        rows.push(&dec.gbp[i]);
        let a = F2Matrix::from_rows(
            cols,
            rows.iter()
                .map(|p| p.to_symplectic().symplectic_dual())
                .collect(),
        )?;
        let rhs = BitVec::from_bools((0..rows.len()).map(|r| r >= zeros));
        let (x, kernel) = a
            .solve_affine(&rhs)
            .map_err(|_| RsraError::Inconsistent { index: i })?;
        let mut best = PauliOp::from_symplectic(&x);
        if !kernel.is_empty() {
            for _ in 0..weight_search {
                let mut v = x.clone();
                for k in &kernel {
                    if rng.gen::<bool>() {
                        v.xor_assign(k);
                    }
                }
                let cand = PauliOp::from_symplectic(&v);
                if gbar_key(&cand) < gbar_key(&best) {
                    best = cand;
                }
            }
        }
        out.gbars.push(best);
    }
    Ok(out)
}

/// One measure-and-correct move between adjacent codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversionStep {
    /// Incoming generator, measured; its sign is the expected outcome.
    pub measure: PauliOp,
    /// Outgoing generator, applied when the outcome differs from that sign.
    pub correct: PauliOp,
    pub replaced_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversionPath {
    pub n: usize,
    pub m: usize,
    pub ancilla_qubits: Vec<usize>,
    pub source: StabilizerCode,
    pub target: StabilizerCode,
    pub steps: Vec<ConversionStep>,
    pub intermediates: Vec<StabilizerCode>,
    pub seed: Option<u64>,
    pub retry: Option<usize>,
}

impl ConversionPath {
    /// Checks that every step is an adjacent move linking consecutive
    /// intermediates and that the endpoints are the first and last codes.
    pub fn check_adjacency(&self) -> Result<(), RsraError> {
        if self.intermediates.len() != self.steps.len() + 1 {
            return Err(RsraError::MalformedPath(format!(
                "{} steps need {} intermediates, found {}",
                self.steps.len(),
                self.steps.len() + 1,
                self.intermediates.len()
            )));
        }
        for (i, step) in self.steps.iter().enumerate() {
            let pre = self.intermediates[i].generators();
            let post = self.intermediates[i + 1].generators();
            let bad = |reason: &str| RsraError::AdjacencyViolation {
                step: i,
                reason: reason.to_string(),
            };
            let r = step.replaced_index;
            if r >= pre.len() || pre.len() != post.len() {
                return Err(bad("replaced index out of range"));
            }
            if pre[r] != step.correct || post[r] != step.measure {
                return Err(bad("step does not match the neighbouring codes"));
            }
            if (0..pre.len()).any(|j| j != r && pre[j] != post[j]) {
                return Err(bad("codes differ in more than one generator"));
            }
            if !step.measure.anticommutes_with(&step.correct) {
                return Err(bad("measured and corrected operators commute"));
            }
            if pre
                .iter()
                .enumerate()
                .any(|(j, g)| j != r && g.anticommutes_with(&step.measure))
            {
                return Err(bad("measured operator anticommutes with a kept generator"));
            }
        }
        let first = &self.intermediates[0];
        let last = self.intermediates.last().expect("nonempty");
        if !first.same_group(&self.source) {
            return Err(RsraError::EndpointMismatch("source"));
        }
        if !last.same_group(&self.target) {
            return Err(RsraError::EndpointMismatch("target"));
        }
        Ok(())
    }

    /// Serializes to the path JSON format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PathJson::from(self)).expect("path serializes")
    }

    /// Parses path JSON. Codes and sizes are validated; adjacency is not, so
    /// that damaged paths can still be inspected (see `check_adjacency`).
    pub fn from_json(text: &str) -> Result<Self, RsraError> {
        let raw: PathJson =
            serde_json::from_str(text).map_err(|e| RsraError::MalformedPath(e.to_string()))?;
        ConversionPath::try_from(raw)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StepJson {
    measure: String,
    correct: String,
    replaced_index: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PathJson {
    n: usize,
    ancilla_qubits: Vec<usize>,
    source: CodeJson,
    target: CodeJson,
    steps: Vec<StepJson>,
    intermediates: Vec<CodeJson>,
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    retry: Option<usize>,
    m: usize,
}

impl From<&ConversionPath> for PathJson {
    fn from(p: &ConversionPath) -> Self {
        PathJson {
            n: p.n,
            ancilla_qubits: p.ancilla_qubits.clone(),
            source: CodeJson::from(&p.source),
            target: CodeJson::from(&p.target),
            steps: p
                .steps
                .iter()
                .map(|s| StepJson {
                    measure: s.measure.to_string(),
                    correct: s.correct.to_string(),
                    replaced_index: s.replaced_index,
                })
                .collect(),
            intermediates: p.intermediates.iter().map(CodeJson::from).collect(),
            seed: p.seed,
            retry: p.retry,
            m: p.m,
        }
    }
}

impl TryFrom<PathJson> for ConversionPath {
    type Error = RsraError;

    fn try_from(raw: PathJson) -> Result<Self, Self::Error> {
        let n = raw.n;
        let code = |c: CodeJson| -> Result<StabilizerCode, RsraError> {
            let c = StabilizerCode::try_from(c)?;
            if c.n() != n {
                return Err(RsraError::MalformedPath(format!(
                    "code on {} qubits in a {n}-qubit path",
                    c.n()
                )));
            }
            Ok(c)
        };
        let op = |s: &str| -> Result<PauliOp, RsraError> {
            let p = PauliOp::parse_line(s, 1)?;
            if p.num_qubits() != n {
                return Err(RsraError::MalformedPath(format!(
                    "operator {s} has wrong length"
                )));
            }
            Ok(p)
        };
        if let Some(&q) = raw.ancilla_qubits.iter().find(|&&q| q >= n) {
            return Err(RsraError::MalformedPath(format!(
                "ancilla qubit {q} out of range"
            )));
        }
        let steps = raw
            .steps
            .iter()
            .map(|s| {
                Ok(ConversionStep {
                    measure: op(&s.measure)?,
                    correct: op(&s.correct)?,
                    replaced_index: s.replaced_index,
                })
            })
            .collect::<Result<Vec<_>, RsraError>>()?;
        let intermediates = raw
            .intermediates
            .into_iter()
            .map(code)
            .collect::<Result<Vec<_>, _>>()?;
        if intermediates.len() != steps.len() + 1 {
            return Err(RsraError::MalformedPath(format!(
                "{} steps need {} intermediates, found {}",
                steps.len(),
                steps.len() + 1,
                intermediates.len()
            )));
        }
        Ok(ConversionPath {
            n,
            m: raw.m,
            ancilla_qubits: raw.ancilla_qubits,
            source: code(raw.source)?,
            target: code(raw.target)?,
            steps,
            intermediates,
            seed: raw.seed,
            retry: raw.retry,
        })
    }
}

impl Decomposition {
    fn slot_op(&self, slot: Slot) -> &PauliOp {
        match slot {
            Slot::A(i) => &self.ga[i],
            Slot::B(i) => &self.gb[i],
            Slot::C(i) => &self.gc[i],
        }
    }

    fn position(&self, slot: Slot) -> Result<usize, RsraError> {
        self.layout
            .iter()
            .position(|&s| s == slot)
            .ok_or_else(|| RsraError::Internal(format!("{slot:?} missing from layout")))
    }

    /// The same decomposition read from target to source. The canonical
    /// schedule of the result visits the same intermediate codes in reverse.
    pub fn swapped(&self) -> Decomposition {
        let c = self.gc.len();
        let rev = |v: &[PauliOp]| v.iter().rev().cloned().collect::<Vec<_>>();
        Decomposition {
            source: self.target.clone(),
            target: self.source.clone(),
            gb: self.gbp.clone(),
            gbp: self.gb.clone(),
            gc: rev(&self.gcp),
            gcp: rev(&self.gc),
            layout: self
                .layout
                .iter()
                .map(|&s| match s {
                    Slot::C(i) => Slot::C(c - 1 - i),
                    other => other,
                })
                .collect(),
            schedule: canonical_schedule(self.gb.len(), c),
            ..self.clone()
        }
    }
}

/// Walks the schedule, emitting one adjacent step per move and recording
/// every intermediate code.
pub fn build_path(dec: &Decomposition) -> Result<ConversionPath, RsraError> {
    if dec.gbars.len() != dec.gb.len() {
        return Err(RsraError::Internal(
            "complementary generators not chosen".into(),
        ));
    }
    let n = dec.padded_n;
    let mut gens: Vec<PauliOp> = dec.layout.iter().map(|&s| dec.slot_op(s).clone()).collect();
    let first = StabilizerCode::new(n, gens.clone())
        .map_err(|e| RsraError::Internal(format!("source presentation: {e}")))?;
    if !first.same_group(&dec.source) {
        return Err(RsraError::EndpointMismatch("source"));
    }
    let mut intermediates = vec![first];
    let mut steps = Vec::with_capacity(dec.schedule.len());
    for (k, mv) in dec.schedule.iter().enumerate() {
        let (pos, incoming) = match *mv {
            Move::Bridge(i) => (dec.position(Slot::B(i))?, dec.gbars[i].clone()),
            Move::Swap(i) => (dec.position(Slot::C(i))?, dec.gcp[i].clone()),
            Move::Unbridge(i) => (dec.position(Slot::B(i))?, dec.gbp[i].clone()),
        };
        let outgoing = gens[pos].clone();
        let violation = |reason: String| RsraError::AdjacencyViolation { step: k, reason };
        if !incoming.anticommutes_with(&outgoing) {
            return Err(violation(format!("{incoming} commutes with {outgoing}")));
        }
        if let Some((j, g)) = gens
            .iter()
            .enumerate()
            .find(|&(j, g)| j != pos && g.anticommutes_with(&incoming))
        {
            return Err(violation(format!(
                "{incoming} anticommutes with generator {j} ({g})"
            )));
        }
        gens[pos] = incoming.clone();
        intermediates.push(
            StabilizerCode::new(n, gens.clone())
                .map_err(|e| violation(format!("invalid intermediate: {e}")))?,
        );
        steps.push(ConversionStep {
            measure: incoming,
            correct: outgoing,
            replaced_index: pos,
        });
    }
    let last = intermediates.last().expect("nonempty");
    if !last.same_group(&dec.target) {
        return Err(RsraError::EndpointMismatch("target"));
    }
    Ok(ConversionPath {
        n,
        m: dec.m,
        ancilla_qubits: dec.ancilla_qubits.clone(),
        source: intermediates[0].clone(),
        target: last.clone(),
        steps,
        intermediates,
        seed: None,
        retry: None,
    })
}

/// Why a draw was rejected: the first code (by index) holding a logical
/// operator of the least weight found on the path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedDraw {
    pub retry: usize,
    pub code_index: usize,
    pub weight: usize,
    pub witness: PauliOp,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub path: ConversionPath,
    /// Index of the successful draw; equals the number of rejected draws.
    pub retry: usize,
    pub rejected: Vec<RejectedDraw>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchError {
    Failed(RsraError),
    /// Carries every rejected draw alongside the summary error.
    Exhausted {
        error: RsraError,
        rejected: Vec<RejectedDraw>,
    },
}

impl SearchError {
    pub fn error(&self) -> &RsraError {
        match self {
            SearchError::Failed(e) | SearchError::Exhausted { error: e, .. } => e,
        }
    }
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.error().fmt(f)
    }
}

impl std::error::Error for SearchError {}

impl From<RsraError> for SearchError {
    fn from(e: RsraError) -> Self {
        SearchError::Failed(e)
    }
}

enum Draw {
    Accepted(Box<ConversionPath>),
    Rejected(RejectedDraw),
}

fn draw(base: &Decomposition, config: &RsraConfig, index: usize) -> Result<Draw, RsraError> {
    let seed = child_seed(config.seed, index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dec = randomize(base, &mut rng);
    let dec = solve_gbars(&dec, config.gbar_weight_search, &mut rng)?;
    let mut path = build_path(&dec)?;
    path.seed = Some(config.seed);
    path.retry = Some(index);
    let worst = analysis::path_min_distance(&path, config.min_distance.saturating_sub(1));
    Ok(match worst.failure {
        None => Draw::Accepted(Box::new(path)),
        Some((code_index, witness)) => Draw::Rejected(RejectedDraw {
            retry: index,
            code_index,
            weight: witness.weight(),
            witness,
        }),
    })
}

fn endpoint_distance(code: &StabilizerCode, d: usize) -> Option<usize> {
    match analysis::logical_search(code)
        .min_weight(d.saturating_sub(1))
        .0
    {
        DistanceBound::Exact(w) => Some(w),
        _ => None,
    }
}

/// Repeats the randomized pipeline with child seeds until every code on the
/// path has distance at least `min_distance`. Draws run in parallel chunks;
/// the lowest successful retry index wins, so results do not depend on
/// scheduling.
pub fn search(
    s: &StabilizerCode,
    sp: &StabilizerCode,
    config: &RsraConfig,
) -> Result<SearchOutcome, SearchError> {
    let pair = pad(s, sp, config.m)?;
    let d = config.min_distance.max(1);
    for (which, code) in [("source", &pair.source), ("target", &pair.target)] {
        if let Some(distance) = endpoint_distance(code, d) {
            return Err(RsraError::EndpointDistance {
                which,
                distance,
                required: d,
            }
            .into());
        }
    }
    let base = decompose(&pair)?;
    let mut rejected = Vec::new();
    let chunk = (rayon::current_num_threads() * 8).max(1);
    let mut start = 0;
    while start < config.max_retries {
        let end = (start + chunk).min(config.max_retries);
        let results: Vec<Result<Draw, RsraError>> = (start..end)
            .into_par_iter()
            .map(|i| draw(&base, config, i))
            .collect();
        for r in results {
            match r? {
                Draw::Accepted(path) => {
                    let retry = path.retry.unwrap_or(0);
                    return Ok(SearchOutcome {
                        path: *path,
                        retry,
                        rejected,
                    });
                }
                Draw::Rejected(rej) => rejected.push(rej),
            }
        }
        start = end;
    }
    let best_min_distance = rejected.iter().map(|r| r.weight).max().unwrap_or(0);
    Err(SearchError::Exhausted {
        error: RsraError::SearchExhausted {
            retries: config.max_retries,
            best_min_distance,
        },
        rejected,
    })
}

fn fixture_err(line: usize, msg: impl fmt::Display) -> RsraError {
    RsraError::FixtureInvalid(format!("line {line}: {msg}"))
}

/// Reads a printed conversion table (see [`crate::fixtures`] for the grammar)
/// into a decomposition whose layout and schedule follow the printed rows.
pub fn load_fixture_decomposition(text: &str) -> Result<Decomposition, RsraError> {
    let mut source_n = None;
    let mut target_n = None;
    let mut m = None;
    let mut rows: Vec<(usize, char, PauliOp, PauliOp)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let number = |f: &[&str]| -> Result<usize, RsraError> {
            match f {
                [_, v] => v
                    .parse()
                    .map_err(|_| fixture_err(line_no, "expected a number")),
                _ => Err(fixture_err(line_no, "expected one value")),
            }
        };
        match fields[0] {
            "source_n" => source_n = Some(number(&fields)?),
            "target_n" => target_n = Some(number(&fields)?),
            "m" => m = Some(number(&fields)?),
            t @ ("A" | "B" | "C" | "L") => {
                let [_, l, r] = fields[..] else {
                    return Err(fixture_err(line_no, "expected a type and two operators"));
                };
                let l = PauliOp::parse_line(l, line_no)?;
                let r = PauliOp::parse_line(r, line_no)?;
                rows.push((line_no, t.chars().next().unwrap_or('?'), l, r));
            }
            other => return Err(fixture_err(line_no, format!("unknown row type {other:?}"))),
        }
    }
    let (Some(source_n), Some(target_n), Some(m)) = (source_n, target_n, m) else {
        return Err(RsraError::FixtureInvalid(
            "missing source_n, target_n or m header".into(),
        ));
    };
    let n = source_n.max(target_n) + m;
    let mut dec = Decomposition {
        padded_n: n,
        m,
        ancilla_qubits: (target_n..n).collect(),
        source: StabilizerCode::trivial(n),
        target: StabilizerCode::trivial(n),
        ga: Vec::new(),
        gb: Vec::new(),
        gc: Vec::new(),
        gbp: Vec::new(),
        gcp: Vec::new(),
        gbars: Vec::new(),
        layout: Vec::new(),
        schedule: Vec::new(),
    };
    let mut unbridged: Vec<Move> = Vec::new();
    let mut bridged_rows = 0;
    for (line_no, kind, l, r) in rows {
        if l.num_qubits() != n || r.num_qubits() != n {
            return Err(fixture_err(
                line_no,
                format!("operators must act on {n} qubits"),
            ));
        }
        match kind {
            'A' => {
                if l != r {
                    return Err(fixture_err(
                        line_no,
                        "shared rows must agree, including sign",
                    ));
                }
                dec.layout.push(Slot::A(dec.ga.len()));
                dec.ga.push(l);
            }
            'B' => {
                let i = dec.gb.len();
                dec.layout.push(Slot::B(i));
                dec.schedule.push(Move::Bridge(i));
                unbridged.push(Move::Unbridge(i));
                dec.gb.push(l);
                dec.gbp.push(r);
            }
            'L' => {
                if dec.gb.len() != bridged_rows + 1 {
                    return Err(fixture_err(
                        line_no,
                        "logical row must follow its bridge row",
                    ));
                }
                let bar = l.multiply(&r).map_err(|_| {
                    fixture_err(line_no, "product of the logicals is not Hermitian")
                })?;
                dec.gbars.push(bar.with_sign(false));
                bridged_rows += 1;
                // The printed order finishes each bridge before the next row.
                if let Some(mv) = unbridged.pop() {
                    dec.schedule.push(mv);
                }
            }
            _ => {
                let i = dec.gc.len();
                dec.layout.push(Slot::C(i));
                dec.schedule.push(Move::Swap(i));
                dec.gc.push(l);
                dec.gcp.push(r);
            }
        }
    }
    if !dec.gbars.is_empty() && dec.gbars.len() != dec.gb.len() {
        return Err(RsraError::FixtureInvalid(
            "either every bridge row or none needs a logical row".into(),
        ));
    }
    dec.schedule.extend(unbridged.into_iter().rev());

    let column = |pick: &dyn Fn(Slot) -> PauliOp| -> Result<StabilizerCode, RsraError> {
        StabilizerCode::new(n, dec.layout.iter().map(|&s| pick(s)).collect())
            .map_err(|e| RsraError::FixtureInvalid(e.to_string()))
    };
    let source = column(&|s| dec.slot_op(s).clone())?;
    let target = column(&|s| match s {
        Slot::A(i) => dec.ga[i].clone(),
        Slot::B(i) => dec.gbp[i].clone(),
        Slot::C(i) => dec.gcp[i].clone(),
    })?;
    dec.source = source;
    dec.target = target;
    if dec.source.k() != dec.target.k() {
        return Err(RsraError::FixtureInvalid(
            "columns encode different k".into(),
        ));
    }
    for (b, bp) in dec.gb.iter().zip(&dec.gbp) {
        if dec
            .target
            .generators()
            .iter()
            .any(|g| g.anticommutes_with(b))
            || dec
                .source
                .generators()
                .iter()
                .any(|g| g.anticommutes_with(bp))
        {
            return Err(RsraError::FixtureInvalid(format!(
                "bridge pair {b} / {bp} is not in the opposite normalizer"
            )));
        }
    }
    let h = commutativity_matrix(&dec.gcp, &dec.gc);
    if h != F2Matrix::identity(dec.gc.len()) {
        return Err(RsraError::FixtureInvalid(
            "exchanged rows must anticommute exactly in pairs".into(),
        ));
    }
    Ok(dec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{catalog, fixtures};
    use std::collections::HashSet;

    fn p(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    fn strs(ops: &[PauliOp]) -> Vec<String> {
        ops.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn pad_examples() {
        let s = catalog::steane7();
        let same = pad(&s, &s, 0).unwrap();
        assert_eq!(same.source, s);
        assert!(same.ancilla_qubits.is_empty());

        let pair = pad(&catalog::perfect5(), &s, 0).unwrap();
        assert_eq!(pair.source.n(), 7);
        assert_eq!(strs(&pair.source.generators()[4..]), ["IIIIIZI", "IIIIIIZ"]);
        assert_eq!(pair.target, s);

        let perm = catalog::resolve("perm(steane7,(34))").unwrap();
        let pair = pad(&s, &perm, 2).unwrap();
        assert_eq!(pair.source.n(), 9);
        assert_eq!(
            strs(&pair.source.generators()[6..]),
            ["IIIIIIIZI", "IIIIIIIIZ"]
        );
        assert_eq!(
            strs(&pair.target.generators()[6..]),
            ["IIIIIIIXI", "IIIIIIIIX"]
        );
        assert_eq!(pair.ancilla_qubits, vec![7, 8]);

        assert!(matches!(
            pad(&s, &StabilizerCode::trivial(2), 0),
            Err(RsraError::MismatchedLogicalCount { .. })
        ));
    }

    #[test]
    fn identical_codes_give_empty_path() {
        let s = catalog::steane7();
        let dec = decompose(&pad(&s, &s, 0).unwrap()).unwrap();
        assert_eq!((dec.ga.len(), dec.gb.len(), dec.gc.len()), (6, 0, 0));
        let dec = solve_gbars(&dec, 0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let path = build_path(&dec).unwrap();
        assert!(path.steps.is_empty());
        assert_eq!(path.intermediates.len(), 1);
    }

    fn fixture_pair(text: &str) -> PaddedPair {
        let dec = load_fixture_decomposition(text).unwrap();
        PaddedPair {
            source: dec.source,
            target: dec.target,
            m: dec.m,
            ancilla_qubits: dec.ancilla_qubits,
        }
    }

    #[test]
    fn decompose_block_sizes_on_table_pairs() {
        let d1 = decompose(&fixture_pair(fixtures::TABLE1)).unwrap();
        assert_eq!((d1.ga.len(), d1.gb.len(), d1.gc.len()), (1, 0, 5));
        let d2 = decompose(&fixture_pair(fixtures::TABLE2)).unwrap();
        assert_eq!((d2.ga.len(), d2.gb.len(), d2.gc.len()), (2, 1, 5));
        let d3 = decompose(&fixture_pair(fixtures::TABLE3)).unwrap();
        assert_eq!((d3.ga.len(), d3.gb.len(), d3.gc.len()), (4, 0, 4));
        for d in [&d1, &d2, &d3] {
            assert_eq!(
                commutativity_matrix(&d.gcp, &d.gc),
                F2Matrix::identity(d.gc.len())
            );
        }
    }

    #[test]
    fn sign_defect_goes_to_bridge_block() {
        let s = StabilizerCode::parse_text("ZZ").unwrap();
        let t = StabilizerCode::parse_text("-ZZ").unwrap();
        let dec = decompose(&pad(&s, &t, 0).unwrap()).unwrap();
        assert!(dec.ga.is_empty());
        assert_eq!(strs(&dec.gb), ["ZZ"]);
        assert_eq!(strs(&dec.gbp), ["-ZZ"]);
        let dec = solve_gbars(&dec, 0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let path = build_path(&dec).unwrap();
        assert_eq!(path.steps.len(), 2);
        assert!(path.target.same_group(&t));
    }

    fn check_gbar_constraints(dec: &Decomposition) {
        for (i, bar) in dec.gbars.iter().enumerate() {
            assert!(!bar.is_negative());
            let commute: Vec<&PauliOp> = dec
                .ga
                .iter()
                .chain(&dec.gc)
                .chain(&dec.gcp)
                .chain(&dec.gb[i + 1..])
                .chain(&dec.gbp[i + 1..])
                .chain(&dec.gbars[..i])
                .collect();
            assert!(commute.iter().all(|g| g.commutes_with(bar)));
            assert!(bar.anticommutes_with(&dec.gb[i]));
            assert!(bar.anticommutes_with(&dec.gbp[i]));
        }
    }

    #[test]
    fn randomized_pipeline_invariants() {
        let pair = fixture_pair(fixtures::TABLE2);
        let base = decompose(&pair).unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dec = randomize(&base, &mut rng);
            assert_eq!(
                commutativity_matrix(&dec.gcp, &dec.gc),
                F2Matrix::identity(dec.gc.len())
            );
            let dec = solve_gbars(&dec, (seed % 3) as usize * 8, &mut rng).unwrap();
            check_gbar_constraints(&dec);
            let path = build_path(&dec).unwrap();
            path.check_adjacency().unwrap();
            assert_eq!(path.steps.len(), 1 + 5 + 1);
            assert!(path.source.same_group(&pair.source));
            assert!(path.target.same_group(&pair.target));
        }
    }

    #[test]
    fn randomize_with_one_exchanged_pair_is_a_no_op() {
        // GL(F2, 1) is trivial and there is no bridge block to mix in.
        let s = StabilizerCode::parse_text("Z").unwrap();
        let t = StabilizerCode::parse_text("X").unwrap();
        let dec = decompose(&pad(&s, &t, 0).unwrap()).unwrap();
        assert_eq!((dec.gb.len(), dec.gc.len()), (0, 1));
        for seed in 0..5 {
            let out = randomize(&dec, &mut ChaCha8Rng::seed_from_u64(seed));
            assert_eq!(out, dec);
        }
    }

    fn rowspaces(path: &ConversionPath) -> HashSet<Vec<String>> {
        path.intermediates
            .iter()
            .map(|c| {
                let (r, _) = c.matrix().rref();
                let mut rows: Vec<String> = r
                    .rows()
                    .iter()
                    .filter(|v| !v.is_zero())
                    .map(ToString::to_string)
                    .collect();
                rows.sort();
                rows
            })
            .collect()
    }

    #[test]
    fn swapping_source_and_target_visits_the_same_codes() {
        let pair = fixture_pair(fixtures::TABLE2);
        let base = decompose(&pair).unwrap();
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dec = solve_gbars(&randomize(&base, &mut rng), 0, &mut rng).unwrap();
            let fwd = build_path(&dec).unwrap();
            let back = build_path(&dec.swapped()).unwrap();
            assert_eq!(rowspaces(&fwd), rowspaces(&back));
            assert!(back.target.same_group(&pair.source));
        }
    }

    #[test]
    fn fixture_loading() {
        let d1 = load_fixture_decomposition(fixtures::TABLE1).unwrap();
        assert_eq!(strs(&d1.ga), ["-YXXYIZZ"]);
        assert_eq!(d1.ancilla_qubits, vec![5, 6]);
        let d2 = load_fixture_decomposition(fixtures::TABLE2).unwrap();
        assert_eq!(strs(&d2.gb), ["ZZZZIIIZI"]);
        assert_eq!(strs(&d2.gbp), ["ZZIIIIZZI"]);
        assert_eq!(strs(&d2.gbars), ["IIIIIIIXX"]);
        assert_eq!(
            d2.schedule,
            [
                Move::Swap(0),
                Move::Bridge(0),
                Move::Unbridge(0),
                Move::Swap(1),
                Move::Swap(2),
                Move::Swap(3),
                Move::Swap(4)
            ]
        );
        let d3 = load_fixture_decomposition(fixtures::TABLE3).unwrap();
        assert_eq!(d3.ga.len(), 4);
        assert_eq!(d3.padded_n, 9);
        let path3 = build_path(&d3).unwrap();
        assert_eq!(path3.steps.len(), 4);
        let path1 = build_path(&d1).unwrap();
        assert_eq!((path1.steps.len(), path1.intermediates.len()), (5, 6));
        assert_eq!(path1.source, d1.source);
    }

    #[test]
    fn fixture_errors() {
        let bad_shared = fixtures::TABLE1.replace("A -YXXYIZZ  -YXXYIZZ", "A -YXXYIZZ  YXXYIZZ");
        assert!(matches!(
            load_fixture_decomposition(&bad_shared),
            Err(RsraError::FixtureInvalid(_))
        ));
        let swapped_rows = fixtures::TABLE1.replace("C ZZZZIII   IXZZXII", "C ZZZZIII   XZZXIII");
        assert!(load_fixture_decomposition(&swapped_rows).is_err());
        assert!(load_fixture_decomposition("A X X").is_err());
        assert!(load_fixture_decomposition("source_n 1\ntarget_n 1\nm 0\nQ X X").is_err());
    }

    #[test]
    fn path_json_round_trip() {
        let path = build_path(&load_fixture_decomposition(fixtures::TABLE2).unwrap()).unwrap();
        let text = path.to_json();
        let back = ConversionPath::from_json(&text).unwrap();
        assert_eq!(back, path);
        assert_eq!(back.to_json(), text);
        back.check_adjacency().unwrap();
        assert!(ConversionPath::from_json("{}").is_err());
    }

    #[test]
    fn child_seeds_differ() {
        let seeds: HashSet<u64> = (0..1000).map(|i| child_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_eq!(child_seed(7, 3), child_seed(7, 3));
    }

    #[test]
    fn search_is_deterministic_and_distance_preserving() {
        let cfg = RsraConfig {
            m: 0,
            seed: 11,
            max_retries: 5000,
            min_distance: 3,
            gbar_weight_search: 0,
        };
        let a = search(&catalog::steane7(), &catalog::perfect5(), &cfg).unwrap();
        let b = search(&catalog::steane7(), &catalog::perfect5(), &cfg).unwrap();
        assert_eq!(a.path, b.path);
        assert_eq!(a.retry, a.rejected.len());
        assert!(a.rejected.iter().all(|r| r.weight < 3));
        a.path.check_adjacency().unwrap();
        let report = analysis::path_min_distance(&a.path, 2);
        assert!(report.failure.is_none());
    }

    #[test]
    fn search_identical_codes() {
        let s = catalog::shor9();
        let out = search(&s, &s, &RsraConfig::default()).unwrap();
        assert!(out.path.steps.is_empty());
        assert_eq!(out.retry, 0);
    }

    #[test]
    fn search_rejects_weak_endpoints() {
        let weak = StabilizerCode::parse_text("ZZI\nIZZ").unwrap();
        let cfg = RsraConfig {
            min_distance: 3,
            ..RsraConfig::default()
        };
        let err = search(&weak, &weak, &cfg).unwrap_err();
        assert!(matches!(
            err.error(),
            RsraError::EndpointDistance { distance: 1, .. }
        ));
    }

    #[test]
    fn gbar_sign_is_positive_and_adjacency_violation_reported() {
        let mut dec = load_fixture_decomposition(fixtures::TABLE2).unwrap();
        assert!(!dec.gbars[0].is_negative());
        dec.gbars[0] = p("XXXXXXXXX");
        assert!(matches!(
            build_path(&dec),
            Err(RsraError::AdjacencyViolation { .. })
        ));
    }
}
