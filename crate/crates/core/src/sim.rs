//! Stabilizer-tableau simulation of the measure-and-correct conversion steps.

use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis;
use crate::f2::{BitVec, F2Matrix, RowBasis};
use crate::pauli::{Letter, PauliOp, StabilizerCode};
use crate::rsra::{child_seed, ConversionPath, ConversionStep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("inconsistent logical state: {0}")]
    InconsistentSpec(String),
    #[error("operator on {found} qubits, tableau has {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("stabilizer rows are not a maximal commuting independent set: {0}")]
    NotAStabilizerState(String),
    #[error("state is not stabilized by the code after step {step}")]
    StabilizationFailure { step: usize },
    #[error("logical operator cannot be repaired at step {step}")]
    TransportFailure { step: usize },
    #[error("invalid logical frame: {0}")]
    InvalidFrame(String),
    #[error("bad outcome schedule {0:?}")]
    BadSchedule(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    fn from_negative(negative: bool) -> Self {
        if negative {
            Outcome::Minus
        } else {
            Outcome::Plus
        }
    }
}

/// Stabilizer state as `n` destabilizer and `n` stabilizer rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    destab: Vec<PauliOp>,
    stab: Vec<PauliOp>,
}

impl Tableau {
    /// `|0...0>`.
    pub fn zero_state(n: usize) -> Self {
        Tableau {
            n,
            destab: (0..n).map(|q| PauliOp::single(n, q, Letter::X)).collect(),
            stab: (0..n).map(|q| PauliOp::single(n, q, Letter::Z)).collect(),
        }
    }

    /// The state stabilized by `n` independent commuting signed operators.
    pub fn from_stabilizers(n: usize, stab: Vec<PauliOp>) -> Result<Self, SimError> {
        let code = StabilizerCode::new(n, stab.clone())
            .map_err(|e| SimError::NotAStabilizerState(e.to_string()))?;
        if code.k() != 0 {
            return Err(SimError::NotAStabilizerState(format!(
                "{} generators on {n} qubits",
                stab.len()
            )));
        }
        // Destabilizers: D_i with <D_i, S_j> = δ_ij, then made to commute
        // pairwise by adding stabilizers.
        let duals = F2Matrix::from_rows(
            2 * n,
            stab.iter()
                .map(|s| s.to_symplectic().symplectic_dual())
                .collect(),
        )
        .expect("rows have length 2n");
        let mut destab: Vec<BitVec> = (0..n)
            .map(|i| {
                duals
                    .solve_affine(&BitVec::unit(n, i))
                    .map(|(x, _)| x)
                    .map_err(|e| SimError::NotAStabilizerState(e.to_string()))
            })
            .collect::<Result<_, _>>()?;
        let stab_vecs: Vec<BitVec> = stab.iter().map(PauliOp::to_symplectic).collect();
        for i in 0..n {
            for j in 0..i {
                if crate::f2::symplectic_unchecked(&destab[i], &destab[j]) {
                    let s = stab_vecs[j].clone();
                    destab[i].xor_assign(&s);
                }
            }
        }
        Ok(Tableau {
            n,
            destab: destab.iter().map(PauliOp::from_symplectic).collect(),
            stab,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[PauliOp] {
        &self.stab
    }

    pub fn destabilizers(&self) -> &[PauliOp] {
        &self.destab
    }

    fn check(&self, p: &PauliOp) -> Result<(), SimError> {
        if p.num_qubits() != self.n {
            return Err(SimError::SizeMismatch {
                expected: self.n,
                found: p.num_qubits(),
            });
        }
        Ok(())
    }

    /// Row-frame invariants: stabilizers commute, destabilizers commute, and
    /// destabilizer `i` anticommutes exactly with stabilizer `i`.
    pub fn is_valid_frame(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                self.stab[i].commutes_with(&self.stab[j])
                    && self.destab[i].commutes_with(&self.destab[j])
                    && self.destab[i].anticommutes_with(&self.stab[j]) == (i == j)
            })
        })
    }

    /// The deterministic outcome of measuring `p`, or `None` when the outcome
    /// would be random.
    pub fn expectation(&self, p: &PauliOp) -> Result<Option<Outcome>, SimError> {
        self.check(p)?;
        if self.stab.iter().any(|s| s.anticommutes_with(p)) {
            return Ok(None);
        }
        let product = self
            .destab
            .iter()
            .zip(&self.stab)
            .filter(|(d, _)| d.anticommutes_with(p))
            .fold(PauliOp::identity(self.n), |acc, (_, s)| {
                acc.multiply(s).expect("stabilizers commute")
            });
        debug_assert_eq!(product.to_symplectic(), p.to_symplectic());
        Ok(Some(Outcome::from_negative(
            product.is_negative() != p.is_negative(),
        )))
    }

    /// Measures `p`. A random outcome is drawn from `rng` unless `forced`
    /// is given; a deterministic outcome ignores `forced`. Returns the
    /// outcome and whether it was deterministic.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        p: &PauliOp,
        forced: Option<Outcome>,
        rng: &mut R,
    ) -> Result<(Outcome, bool), SimError> {
        self.check(p)?;
        let Some(pivot) = self.stab.iter().position(|s| s.anticommutes_with(p)) else {
            let outcome = self
                .expectation(p)?
                .expect("commutes with every stabilizer");
            return Ok((outcome, true));
        };
        let pivot_row = self.stab[pivot].clone();
        for i in 0..self.n {
            if i != pivot && self.stab[i].anticommutes_with(p) {
                self.stab[i] = self.stab[i]
                    .multiply(&pivot_row)
                    .expect("stabilizers commute");
            }
            if i != pivot && self.destab[i].anticommutes_with(p) {
                self.destab[i] = self.destab[i]
                    .multiply(&pivot_row)
                    .expect("destabilizer commutes with other stabilizers");
            }
        }
        let outcome = forced.unwrap_or_else(|| Outcome::from_negative(rng.gen()));
        self.destab[pivot] = pivot_row;
        self.stab[pivot] = match outcome {
            Outcome::Plus => p.clone(),
            Outcome::Minus => p.negated(),
        };
        Ok((outcome, false))
    }

    /// Conjugates the state by `p`: rows anticommuting with `p` change sign.
    pub fn apply_pauli(&mut self, p: &PauliOp) -> Result<(), SimError> {
        self.check(p)?;
        for row in self.stab.iter_mut().chain(self.destab.iter_mut()) {
            if row.anticommutes_with(p) {
                *row = row.negated();
            }
        }
        Ok(())
    }

    /// Every generator of `code`, with its sign, has outcome +1.
    pub fn is_stabilized_by(&self, code: &StabilizerCode) -> bool {
        code.n() == self.n
            && code
                .generators()
                .iter()
                .all(|g| matches!(self.expectation(g), Ok(Some(Outcome::Plus))))
    }
}

/// Logical Pauli representatives of a code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalFrame {
    pub logical_x: Vec<PauliOp>,
    pub logical_z: Vec<PauliOp>,
}

impl LogicalFrame {
    /// A symplectic basis of `N(S)/S`, built by Gram-Schmidt over the
    /// normalizer vectors independent of the stabilizer.
    pub fn for_code(code: &StabilizerCode) -> Result<Self, SimError> {
        let mut basis = RowBasis::new(2 * code.n());
        for g in code.generators() {
            basis.insert(&g.to_symplectic());
        }
        let mut pool: Vec<BitVec> = code
            .normalizer_basis()
            .into_iter()
            .filter(|v| basis.insert(v))
            .collect();
        let mut frame = LogicalFrame {
            logical_x: Vec::new(),
            logical_z: Vec::new(),
        };
        let sym = crate::f2::symplectic_unchecked;
        while !pool.is_empty() {
            let a = pool.remove(0);
            let j = pool
                .iter()
                .position(|b| sym(&a, b))
                .ok_or_else(|| SimError::InvalidFrame("degenerate normalizer".into()))?;
            let b = pool.remove(j);
            for c in pool.iter_mut() {
                let (ca, cb) = (sym(c, &a), sym(c, &b));
                if cb {
                    c.xor_assign(&a);
                }
                if ca {
                    c.xor_assign(&b);
                }
            }
            frame.logical_x.push(PauliOp::from_symplectic(&a));
            frame.logical_z.push(PauliOp::from_symplectic(&b));
        }
        frame.validate(code)?;
        Ok(frame)
    }

    pub fn k(&self) -> usize {
        self.logical_x.len()
    }

    pub fn validate(&self, code: &StabilizerCode) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::InvalidFrame(msg));
        if self.logical_x.len() != code.k() || self.logical_z.len() != code.k() {
            return bad(format!("expected {} logical pairs", code.k()));
        }
        let all: Vec<&PauliOp> = self.logical_x.iter().chain(&self.logical_z).collect();
        for l in &all {
            if l.num_qubits() != code.n() {
                return bad("wrong operator length".into());
            }
            if code.generators().iter().any(|g| g.anticommutes_with(l)) {
                return bad(format!("{l} does not commute with the stabilizer"));
            }
            if code.contains_vector(&l.to_symplectic()) {
                return bad(format!("{l} is a stabilizer"));
            }
        }
        let k = self.k();
        for i in 0..k {
            for j in 0..k {
                let xz = self.logical_x[i].anticommutes_with(&self.logical_z[j]);
                if xz != (i == j)
                    || (i != j && self.logical_x[i].anticommutes_with(&self.logical_x[j]))
                    || (i != j && self.logical_z[i].anticommutes_with(&self.logical_z[j]))
                {
                    return bad(format!("pairs {i} and {j} do not form a symplectic basis"));
                }
            }
        }
        Ok(())
    }

    pub fn operator(&self, axis: Axis, i: usize) -> &PauliOp {
        match axis {
            Axis::X => &self.logical_x[i],
            Axis::Z => &self.logical_z[i],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Z,
}

/// Eigenstate selection: one `(axis, eigenvalue)` per logical qubit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalSpec(pub Vec<(Axis, Outcome)>);

impl LogicalSpec {
    pub fn all(axis: Axis, k: usize) -> Self {
        LogicalSpec(vec![(axis, Outcome::Plus); k])
    }
}

impl std::fmt::Display for LogicalSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (axis, o) in &self.0 {
            let sign = if *o == Outcome::Plus { '+' } else { '-' };
            write!(f, "{sign}{axis:?}")?;
        }
        Ok(())
    }
}

fn signed(p: &PauliOp, o: Outcome) -> PauliOp {
    match o {
        Outcome::Plus => p.clone(),
        Outcome::Minus => p.negated(),
    }
}

/// The code state that is an eigenstate of the selected logical operators.
pub fn encode(
    code: &StabilizerCode,
    frame: &LogicalFrame,
    spec: &LogicalSpec,
) -> Result<Tableau, SimError> {
    if spec.0.len() != code.k() {
        return Err(SimError::InconsistentSpec(format!(
            "{} logical selections for k = {}",
            spec.0.len(),
            code.k()
        )));
    }
    frame
        .validate(code)
        .map_err(|e| SimError::InconsistentSpec(e.to_string()))?;
    let mut stab = code.generators().to_vec();
    for (i, &(axis, o)) in spec.0.iter().enumerate() {
        stab.push(signed(frame.operator(axis, i), o));
    }
    Tableau::from_stabilizers(code.n(), stab)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub outcome: Outcome,
    pub deterministic: bool,
    pub corrected: bool,
}

/// Measures the incoming generator and applies the outgoing one when the
/// outcome differs from the incoming generator's sign.
pub fn run_step<R: Rng + ?Sized>(
    t: &mut Tableau,
    step: &ConversionStep,
    forced: Option<Outcome>,
    rng: &mut R,
) -> Result<StepRecord, SimError> {
    let (outcome, deterministic) = t.measure(&step.measure, forced, rng)?;
    let corrected = outcome == Outcome::Minus;
    if corrected {
        t.apply_pauli(&step.correct)?;
    }
    Ok(StepRecord {
        outcome,
        deterministic,
        corrected,
    })
}

/// Which measurement outcomes to force on non-deterministic steps.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum OutcomeSchedule {
    #[default]
    Random,
    AllPlus,
    AllMinus,
    /// One entry per step; `None` draws at random.
    PerStep(Vec<Option<Outcome>>),
}

impl OutcomeSchedule {
    pub fn forced(&self, step: usize) -> Option<Outcome> {
        match self {
            OutcomeSchedule::Random => None,
            OutcomeSchedule::AllPlus => Some(Outcome::Plus),
            OutcomeSchedule::AllMinus => Some(Outcome::Minus),
            OutcomeSchedule::PerStep(v) => v.get(step).copied().flatten(),
        }
    }
}

/// `random`, `all-plus`, `all-minus`, or one of `+`, `-`, `?` per step.
impl FromStr for OutcomeSchedule {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(OutcomeSchedule::Random),
            "all-plus" => Ok(OutcomeSchedule::AllPlus),
            "all-minus" => Ok(OutcomeSchedule::AllMinus),
            _ => s
                .chars()
                .map(|c| match c {
                    '+' => Ok(Some(Outcome::Plus)),
                    '-' => Ok(Some(Outcome::Minus)),
                    '?' => Ok(None),
                    _ => Err(SimError::BadSchedule(s.to_string())),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(OutcomeSchedule::PerStep),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRun {
    pub records: Vec<StepRecord>,
    /// Each discarded qubit is in an eigenstate of its single-qubit `Z` or `X`.
    pub ancillas_disentangled: bool,
}

/// Runs every step, checking after each one that the state is stabilized
/// by the next code on the path.
pub fn run_path<R: Rng + ?Sized>(
    t: &mut Tableau,
    path: &ConversionPath,
    schedule: &OutcomeSchedule,
    rng: &mut R,
) -> Result<PathRun, SimError> {
    let mut records = Vec::with_capacity(path.steps.len());
    for (i, step) in path.steps.iter().enumerate() {
        records.push(run_step(t, step, schedule.forced(i), rng)?);
        if !path
            .intermediates
            .get(i + 1)
            .is_some_and(|c| t.is_stabilized_by(c))
        {
            return Err(SimError::StabilizationFailure { step: i });
        }
    }
    let ancillas_disentangled = path.ancilla_qubits.iter().all(|&q| {
        [Letter::Z, Letter::X]
            .iter()
            .any(|&l| matches!(t.expectation(&PauliOp::single(path.n, q, l)), Ok(Some(_))))
    });
    Ok(PathRun {
        records,
        ancillas_disentangled,
    })
}

/// Carries logical representatives along the path: whenever one
/// anticommutes with the measured operator it is multiplied by the outgoing
/// generator.
pub fn transport_logicals(
    frame: &LogicalFrame,
    path: &ConversionPath,
) -> Result<LogicalFrame, SimError> {
    let mut out = frame.clone();
    for (i, step) in path.steps.iter().enumerate() {
        for l in out.logical_x.iter_mut().chain(out.logical_z.iter_mut()) {
            if l.anticommutes_with(&step.measure) {
                *l = l
                    .multiply(&step.correct)
                    .map_err(|_| SimError::TransportFailure { step: i })?;
            }
        }
        let next = &path.intermediates[i + 1];
        if out
            .logical_x
            .iter()
            .chain(&out.logical_z)
            .any(|l| next.generators().iter().any(|g| g.anticommutes_with(l)))
        {
            return Err(SimError::TransportFailure { step: i });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialReport {
    pub seed: u64,
    pub spec: String,
    pub outcomes: Vec<i8>,
    pub corrected: Vec<bool>,
    pub target_stabilized: bool,
    pub ancillas_disentangled: bool,
    pub logical_preserved: bool,
    pub pass: bool,
    pub error: Option<String>,
}

/// Encodes `spec` on the source, runs the path, and checks the target code,
/// the ancillas, and the transported logical eigenvalues.
pub fn run_trial(
    path: &ConversionPath,
    spec: &LogicalSpec,
    schedule: &OutcomeSchedule,
    seed: u64,
) -> Result<TrialReport, SimError> {
    let frame = LogicalFrame::for_code(&path.source)?;
    let moved = transport_logicals(&frame, path)?;
    moved.validate(&path.target)?;
    let mut t = encode(&path.source, &frame, spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TrialReport {
        seed,
        spec: spec.to_string(),
        outcomes: Vec::new(),
        corrected: Vec::new(),
        target_stabilized: false,
        ancillas_disentangled: false,
        logical_preserved: false,
        pass: false,
        error: None,
    };
    let run = match run_path(&mut t, path, schedule, &mut rng) {
        Ok(run) => run,
        Err(e) => {
            report.error = Some(e.to_string());
            return Ok(report);
        }
    };
    report.outcomes = run.records.iter().map(|r| r.outcome.value()).collect();
    report.corrected = run.records.iter().map(|r| r.corrected).collect();
    report.target_stabilized = t.is_stabilized_by(&path.target);
    report.ancillas_disentangled = run.ancillas_disentangled;
    report.logical_preserved =
        spec.0.iter().enumerate().all(|(i, &(axis, o))| {
            t.expectation(moved.operator(axis, i)).ok().flatten() == Some(o)
        });
    report.pass =
        report.target_stabilized && report.ancillas_disentangled && report.logical_preserved;
    Ok(report)
}

/// Trials over `trials` child seeds for both `+Z̄` and `+X̄` on every
/// logical qubit.
pub fn simulate(
    path: &ConversionPath,
    trials: usize,
    seed: u64,
    schedule: &OutcomeSchedule,
) -> Result<Vec<TrialReport>, SimError> {
    let k = path.source.k();
    let mut out = Vec::with_capacity(2 * trials);
    for axis in [Axis::Z, Axis::X] {
        for t in 0..trials {
            out.push(run_trial(
                path,
                &LogicalSpec::all(axis, k),
                schedule,
                child_seed(seed, t as u64),
            )?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectionReport {
    pub pass: bool,
    pub errors_checked: u64,
    pub syndrome_mismatches: u64,
    /// First code index with an undetectable error, and that error.
    pub failure: Option<(usize, PauliOp)>,
}

/// Injects every error of weight at most `cap` into encoded `+Z̄` and `+X̄`
/// states of each code on the path. An error is undetectable when the
/// simulated syndrome is trivial but a logical eigenvalue flips. Simulated
/// syndromes are compared with the algebraic ones.
pub fn inject_and_check(path: &ConversionPath, cap: usize) -> Result<InjectionReport, SimError> {
    let mut report = InjectionReport {
        pass: true,
        errors_checked: 0,
        syndrome_mismatches: 0,
        failure: None,
    };
    for (index, code) in path.intermediates.iter().enumerate() {
        let frame = LogicalFrame::for_code(code)?;
        let k = code.k();
        let states = [Axis::Z, Axis::X]
            .map(|axis| encode(code, &frame, &LogicalSpec::all(axis, k)).map(|t| (axis, t)));
        let [z, x] = states;
        let states = [z?, x?];
        for w in 1..=cap.min(code.n()) {
            for e in analysis::paulis_of_weight(code.n(), w) {
                report.errors_checked += 1;
                let expected = code.syndrome(&e).expect("sizes match");
                let mut logical_flip = false;
                for (axis, base) in &states {
                    let mut t = base.clone();
                    t.apply_pauli(&e)?;
                    let simulated = BitVec::from_bools(
                        code.generators()
                            .iter()
                            .map(|g| t.expectation(g).ok().flatten() != Some(Outcome::Plus)),
                    );
                    if &simulated != expected.bits() {
                        report.syndrome_mismatches += 1;
                    }
                    logical_flip |= (0..k).any(|i| {
                        t.expectation(frame.operator(*axis, i)).ok().flatten()
                            != Some(Outcome::Plus)
                    });
                }
                if expected.is_trivial() && logical_flip {
                    report.pass = false;
                    report.failure = Some((index, e));
                    return Ok(report);
                }
            }
        }
    }
    report.pass = report.syndrome_mismatches == 0;
    Ok(report)
}
