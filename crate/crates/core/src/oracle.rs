//! Exact loop simulation and differential fuzzing against the analysis.
//!
//! Simulation can only ever refute non-termination: `Survived` means the
//! guard held for the whole step budget, nothing more.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::exact::{ExactError, QuadNum, Rational, Scalar, Sign};
use crate::frontend::{render, LoopSpec};
use crate::linalg::{Mat2, Matrix, Vec2};
use crate::ntcore::{analyze_single, AnalysisReport, NtSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("initial state has {got} coordinates, loop has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("step budget must be positive")]
    StepBudgetZero,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("invalid fuzz configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Terminated,
    /// Inconclusive: the guard held at every check within the budget.
    Survived,
}

/// Outcome of a bounded run. For `Terminated`, `steps` counts the updates
/// completed before the guard failed; for `Survived` it is the budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SimResult {
    pub outcome: Outcome,
    pub steps: u64,
    /// Termination happened with every guard row `>= 0` and some strict row
    /// exactly zero, i.e. the state sat on the guard boundary.
    pub exit_on_boundary: bool,
}

impl SimResult {
    pub fn terminated(&self) -> bool {
        self.outcome == Outcome::Terminated
    }
}

impl fmt::Display for SimResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.outcome {
            Outcome::Terminated => write!(f, "Terminated({})", self.steps),
            Outcome::Survived => write!(f, "Survived({}) (inconclusive)", self.steps),
        }
    }
}

/// Runs `while (Bx > 0) { x := Ax }` from `x0` for at most `max_steps`
/// updates. The guard is checked before every update, so a run that never
/// fails checks it `max_steps + 1` times.
///
/// Internally the state `p + q sqrt(d)` is kept as two integer vectors and
/// the matrices are scaled to integers; positive scalings leave every guard
/// sign unchanged.
pub fn simulate<T: Scalar + ToQuad>(
    spec: &LoopSpec,
    x0: &[T],
    max_steps: u64,
) -> Result<SimResult, OracleError> {
    let n = spec.dim();
    if x0.len() != n {
        return Err(OracleError::DimensionMismatch {
            expected: n,
            got: x0.len(),
        });
    }
    if max_steps == 0 {
        return Err(OracleError::StepBudgetZero);
    }
    let xs: Vec<QuadNum> = x0.iter().map(ToQuad::to_quad).collect();
    let radicand = common_radicand(&xs)?;
    let d = radicand.clone().unwrap_or_else(BigInt::one);

    let (mut p, mut q) = split_integer(&xs);
    let a = integer_rows(spec.update());
    let b = integer_rows(spec.guard());
    let strict = spec.guard_strict();

    for step in 0..=max_steps {
        let mut failed = false;
        let mut on_boundary = true;
        for (row, &is_strict) in b.iter().zip(strict) {
            let s = quad_sign(&dot(row, &p), &dot(row, &q), &d);
            let ok = s.is_positive() || (!is_strict && s.is_zero());
            if !ok {
                failed = true;
                if s.is_negative() {
                    on_boundary = false;
                }
            }
        }
        if failed {
            return Ok(SimResult {
                outcome: Outcome::Terminated,
                steps: step,
                exit_on_boundary: on_boundary,
            });
        }
        if step == max_steps {
            break;
        }
        p = mat_vec(&a, &p);
        q = mat_vec(&a, &q);
        if step % 8 == 7 {
            reduce(&mut p, &mut q);
        }
    }
    Ok(SimResult {
        outcome: Outcome::Survived,
        steps: max_steps,
        exit_on_boundary: false,
    })
}

/// Straightforward simulation in the scalar type itself, recording every
/// state visited (the last one is where the guard failed, if it did).
pub fn simulate_traced<T: Scalar>(
    spec: &LoopSpec,
    x0: &[T],
    max_steps: u64,
) -> Result<(SimResult, Vec<Vec<T>>), OracleError>
where
    Rational: Into<T>,
{
    if x0.len() != spec.dim() {
        return Err(OracleError::DimensionMismatch {
            expected: spec.dim(),
            got: x0.len(),
        });
    }
    if max_steps == 0 {
        return Err(OracleError::StepBudgetZero);
    }
    let mut x = x0.to_vec();
    let mut trace = vec![x.clone()];
    for step in 0..=max_steps {
        let values = spec.guard().apply(&x).expect("dimension checked");
        let mut failed = false;
        let mut on_boundary = true;
        for (v, &is_strict) in values.iter().zip(spec.guard_strict()) {
            let s = v.sign();
            if !(s.is_positive() || (!is_strict && s.is_zero())) {
                failed = true;
                on_boundary &= !s.is_negative();
            }
        }
        if failed {
            return Ok((
                SimResult {
                    outcome: Outcome::Terminated,
                    steps: step,
                    exit_on_boundary: on_boundary,
                },
                trace,
            ));
        }
        if step == max_steps {
            break;
        }
        x = spec.update().apply(&x).expect("dimension checked");
        trace.push(x.clone());
    }
    Ok((
        SimResult {
            outcome: Outcome::Survived,
            steps: max_steps,
            exit_on_boundary: false,
        },
        trace,
    ))
}

/// Conversion into the quadratic field, for the integer simulation path.
pub trait ToQuad {
    fn to_quad(&self) -> QuadNum;
}

impl ToQuad for Rational {
    fn to_quad(&self) -> QuadNum {
        QuadNum::from_rational(self.clone())
    }
}

impl ToQuad for QuadNum {
    fn to_quad(&self) -> QuadNum {
        self.clone()
    }
}

fn common_radicand(xs: &[QuadNum]) -> Result<Option<BigInt>, ExactError> {
    let mut found: Option<BigInt> = None;
    for x in xs.iter().filter(|x| !x.is_rational()) {
        match &found {
            Some(d) if d != x.radicand() => {
                return Err(ExactError::IncompatibleRadicands(
                    d.clone(),
                    x.radicand().clone(),
                ))
            }
            _ => found = Some(x.radicand().clone()),
        }
    }
    Ok(found)
}

/// Clears denominators of `p + q sqrt(d)` with one positive factor.
fn split_integer(xs: &[QuadNum]) -> (Vec<BigInt>, Vec<BigInt>) {
    let l = xs.iter().fold(BigInt::one(), |acc, x| {
        acc.lcm(x.rat_part().denom()).lcm(x.quad_part().denom())
    });
    let scale = |r: &Rational| r.numer() * (&l / r.denom());
    (
        xs.iter().map(|x| scale(x.rat_part())).collect(),
        xs.iter().map(|x| scale(x.quad_part())).collect(),
    )
}

/// The whole matrix times one positive factor, so `A'^k = c^k A^k`.
fn integer_rows(m: &Matrix<Rational>) -> Vec<Vec<BigInt>> {
    let l = m
        .row_iter()
        .flatten()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    m.row_iter()
        .map(|row| row.iter().map(|r| r.numer() * (&l / r.denom())).collect())
        .collect()
}

fn dot(row: &[BigInt], v: &[BigInt]) -> BigInt {
    row.iter()
        .zip(v)
        .filter(|(a, _)| !a.is_zero())
        .map(|(a, x)| a * x)
        .sum()
}

fn mat_vec(a: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    a.iter().map(|row| dot(row, v)).collect()
}

fn reduce(p: &mut [BigInt], q: &mut [BigInt]) {
    let g = p
        .iter()
        .chain(q.iter())
        .fold(BigInt::zero(), |g, x| g.gcd(x));
    if g > BigInt::one() {
        for x in p.iter_mut().chain(q.iter_mut()) {
            *x /= &g;
        }
    }
}

/// Sign of `a + b sqrt(d)` for integers.
fn quad_sign(a: &BigInt, b: &BigInt, d: &BigInt) -> Sign {
    let sa = int_sign(a);
    let sb = int_sign(b);
    match (sa, sb) {
        (_, Sign::Zero) => sa,
        (Sign::Zero, _) => sb,
        _ if sa == sb => sa,
        _ => match (a * a).cmp(&(b * b * d)) {
            std::cmp::Ordering::Greater => sa,
            std::cmp::Ordering::Less => sb,
            std::cmp::Ordering::Equal => Sign::Zero,
        },
    }
}

fn int_sign(x: &BigInt) -> Sign {
    if x.is_zero() {
        Sign::Zero
    } else if x.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

/// Source of random single-guard loops for [`fuzz_compare_with`].
pub trait LoopSampler: Sync {
    fn sample(&self, rng: &mut ChaCha8Rng) -> (Mat2<Rational>, Vec2<Rational>);
}

/// Integer entries uniform in `[-bound, bound]`, rejecting `A = 0` and `B = 0`.
#[derive(Debug, Clone, Copy)]
pub struct UniformLoops {
    pub bound: i64,
}

impl LoopSampler for UniformLoops {
    fn sample(&self, rng: &mut ChaCha8Rng) -> (Mat2<Rational>, Vec2<Rational>) {
        let k = self.bound;
        loop {
            let mut e = || rng.gen_range(-k..=k);
            let a = Mat2::from_ints(e(), e(), e(), e());
            let b = Vec2::<Rational>::from_ints(e(), e());
            if !a.is_zero() && !b.is_zero() {
                return (a, b);
            }
        }
    }
}

/// Always the same loop.
#[derive(Debug, Clone)]
pub struct FixedLoop {
    pub a: Mat2<Rational>,
    pub b: Vec2<Rational>,
}

impl LoopSampler for FixedLoop {
    fn sample(&self, _rng: &mut ChaCha8Rng) -> (Mat2<Rational>, Vec2<Rational>) {
        (self.a.clone(), self.b.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzConfig {
    pub trials: u64,
    pub coeff_bound: i64,
    pub points_per_loop: usize,
    pub max_steps: u64,
    pub seed: u64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            trials: 1000,
            coeff_bound: 5,
            points_per_loop: 40,
            max_steps: 64,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckKind {
    /// Claimed in the set but the simulation terminated.
    ClaimedInButTerminated,
    /// `member(p) != (guard(p) && member(A p))`.
    ForwardInvariance,
    /// `member(p) != member(k p)` for some `k > 0`.
    Cone,
    /// Two members whose midpoint is not a member.
    Convexity,
    /// An open boundary generator that is a member, or that does not exit
    /// exactly on the guard boundary.
    OpenBoundary,
    /// The analysis itself failed.
    AnalysisError,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub trial: u64,
    pub loop_text: String,
    pub point: Vec2<QuadNum>,
    pub check: CheckKind,
    pub claim: bool,
    pub sim: Option<SimResult>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzReport {
    pub trials: u64,
    pub loops_generated: u64,
    pub points_checked: u64,
    pub violations: Vec<Violation>,
    pub seed: u64,
    /// Loops per case tag.
    pub cases: BTreeMap<String, u64>,
    /// Points claimed inside the set (all of which survived).
    pub points_in_nt: u64,
    /// Points whose simulation terminated within the budget.
    pub points_terminated: u64,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn fuzz_compare(cfg: &FuzzConfig) -> Result<FuzzReport, OracleError> {
    fuzz_compare_with(
        cfg,
        &UniformLoops {
            bound: cfg.coeff_bound,
        },
    )
}

/// Differential check of the analysis against exact simulation.
///
/// Trial `i` draws from a ChaCha stream derived from `(seed, i)`, so the
/// report does not depend on how trials are scheduled across threads.
pub fn fuzz_compare_with(
    cfg: &FuzzConfig,
    sampler: &dyn LoopSampler,
) -> Result<FuzzReport, OracleError> {
    if cfg.trials == 0 || cfg.points_per_loop == 0 || cfg.max_steps == 0 {
        return Err(OracleError::InvalidConfig(
            "trials, points and max-steps must be positive".into(),
        ));
    }
    if cfg.coeff_bound <= 0 {
        return Err(OracleError::InvalidConfig(
            "coeff-bound must be positive".into(),
        ));
    }
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, sampler, i))
        .collect();

    let mut report = FuzzReport {
        trials: cfg.trials,
        loops_generated: 0,
        points_checked: 0,
        violations: vec![],
        seed: cfg.seed,
        cases: BTreeMap::new(),
        points_in_nt: 0,
        points_terminated: 0,
    };
    for t in outcomes {
        report.loops_generated += 1;
        report.points_checked += t.points;
        report.points_in_nt += t.in_nt;
        report.points_terminated += t.terminated;
        if let Some(case) = t.case {
            *report.cases.entry(case).or_default() += 1;
        }
        report.violations.extend(t.violations);
    }
    Ok(report)
}

struct TrialOutcome {
    case: Option<String>,
    points: u64,
    in_nt: u64,
    terminated: u64,
    violations: Vec<Violation>,
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn run_trial(cfg: &FuzzConfig, sampler: &dyn LoopSampler, trial: u64) -> TrialOutcome {
    let mut rng = trial_rng(cfg.seed, trial);
    let (a, b) = sampler.sample(&mut rng);
    let spec = LoopSpec::with_default_names(
        a.to_matrix(),
        Matrix::from_rows(vec![vec![b.x1.clone(), b.x2.clone()]]).expect("1x2"),
        vec![true],
    )
    .expect("2-variable loop");
    let loop_text = render(&spec);
    let mut out = TrialOutcome {
        case: None,
        points: 0,
        in_nt: 0,
        terminated: 0,
        violations: vec![],
    };
    let flag = |point: &Vec2<QuadNum>, check, claim, sim, detail: String| Violation {
        trial,
        loop_text: loop_text.clone(),
        point: point.clone(),
        check,
        claim,
        sim,
        detail,
    };

    let report = match analyze_single(&a, &b) {
        Ok(r) => r,
        Err(e) => {
            let origin = Vec2::<QuadNum>::from_ints(0, 0);
            out.violations.push(flag(
                &origin,
                CheckKind::AnalysisError,
                false,
                None,
                e.to_string(),
            ));
            return out;
        }
    };
    out.case = Some(report.case_tag.name().to_string());
    let nt = &report.nt;
    let aq = crate::linalg::lift(&a);
    let bq = b.to_quad();

    let points = sample_points(&report, cfg.points_per_loop, &mut rng);
    let mut members: Vec<Vec2<QuadNum>> = Vec::new();
    for p in &points {
        out.points += 1;
        let claim = match nt.member(p) {
            Ok(c) => c,
            Err(e) => {
                out.violations.push(flag(
                    p,
                    CheckKind::AnalysisError,
                    false,
                    None,
                    e.to_string(),
                ));
                continue;
            }
        };
        let sim = simulate(&spec, &p.as_slice(), cfg.max_steps).expect("validated inputs");
        if claim {
            out.in_nt += 1;
            members.push(p.clone());
        }
        if sim.terminated() {
            out.terminated += 1;
            if claim {
                out.violations.push(flag(
                    p,
                    CheckKind::ClaimedInButTerminated,
                    claim,
                    Some(sim),
                    String::new(),
                ));
            }
        }

        let guard_ok = bq.dot(p).sign().is_positive();
        let image = aq.apply(p);
        let image_in = nt.member(&image).unwrap_or(false);
        if claim != (guard_ok && image_in) {
            out.violations.push(flag(
                p,
                CheckKind::ForwardInvariance,
                claim,
                Some(sim),
                format!("guard {guard_ok}, image member {image_in}"),
            ));
        }

        let k = random_positive(&mut rng);
        if nt.member(&p.scale(&k)).unwrap_or(!claim) != claim {
            out.violations.push(flag(
                p,
                CheckKind::Cone,
                claim,
                None,
                format!("scaled by {k}"),
            ));
        }
    }

    for pair in members.windows(2) {
        let mid = pair[0]
            .add(&pair[1])
            .scale(&Rational::new(1.into(), 2.into()));
        if !nt.member(&mid).unwrap_or(false) {
            out.violations.push(flag(
                &mid,
                CheckKind::Convexity,
                false,
                None,
                format!("midpoint of {} and {}", pair[0], pair[1]),
            ));
        }
    }

    for g in open_boundaries(nt) {
        let claim = nt.member(&g).unwrap_or(true);
        let sim = simulate(&spec, &g.as_slice(), cfg.max_steps).expect("validated inputs");
        if claim || !sim.terminated() || !sim.exit_on_boundary {
            out.violations.push(flag(
                &g,
                CheckKind::OpenBoundary,
                claim,
                Some(sim),
                String::new(),
            ));
        }
    }
    out
}

/// Generators whose boundary ray is excluded from the set.
pub fn open_boundaries(nt: &NtSet) -> Vec<Vec2<QuadNum>> {
    match nt {
        NtSet::Sector {
            right,
            left,
            right_closed,
            left_closed,
        } => {
            let mut v = Vec::new();
            if !right_closed {
                v.push(right.clone());
            }
            if !left_closed {
                v.push(left.clone());
            }
            v
        }
        _ => vec![],
    }
}

fn random_positive(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(1..=12).into(), rng.gen_range(1..=7).into())
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-10..=10).into(), rng.gen_range(1..=5).into())
}

/// Interior, boundary and exterior points by construction, the branch
/// witnesses and their negations, then uniform rational points.
pub fn sample_points(
    report: &AnalysisReport,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec2<QuadNum>> {
    let mut structured: Vec<Vec2<QuadNum>> = Vec::new();
    let combo = |u: &Vec2<QuadNum>, su: i8, v: &Vec2<QuadNum>, sv: i8, rng: &mut ChaCha8Rng| {
        let k1 = random_positive(rng) * Rational::from_integer(su.into());
        let k2 = random_positive(rng) * Rational::from_integer(sv.into());
        u.scale(&k1).add(&v.scale(&k2))
    };
    match &report.nt {
        NtSet::Empty => {}
        NtSet::Ray { dir } => {
            let perp = dir.perp();
            structured.push(dir.clone());
            structured.push(dir.scale(&random_positive(rng)));
            structured.push(dir.neg());
            structured.push(combo(dir, 1, &perp, 1, rng));
            structured.push(combo(dir, 1, &perp, -1, rng));
        }
        NtSet::Sector { right, left, .. } => {
            let half_plane = report.nt.is_half_plane();
            let (r, l) = if half_plane {
                // split the half-plane at its middle direction
                (right.clone(), right.perp())
            } else {
                (right.clone(), left.clone())
            };
            for _ in 0..3 {
                structured.push(combo(&r, 1, &l, 1, rng));
            }
            if half_plane {
                structured.push(combo(left, 1, &l, 1, rng));
            }
            structured.push(right.clone());
            structured.push(left.clone());
            structured.push(right.scale(&random_positive(rng)));
            structured.push(left.scale(&random_positive(rng)));
            structured.push(right.neg());
            structured.push(left.neg());
            structured.push(combo(&r, 1, &l, -1, rng));
            structured.push(combo(&r, -1, &l, 1, rng));
            structured.push(combo(&r, -1, &l, -1, rng));
        }
    }
    for (_, w) in &report.witnesses {
        if !w.is_zero() {
            structured.push(w.clone());
            structured.push(w.neg());
        }
    }
    if let Some(eigen) = &report.eigen {
        if let crate::linalg::Eigenvectors::Distinct(v1, v2) = &eigen.eigenvectors {
            for v in [v1, v2] {
                structured.push(v.clone());
                structured.push(v.neg());
            }
        }
    }
    let mut points: Vec<Vec2<QuadNum>> = structured.into_iter().take(count / 2).collect();
    while points.len() < count {
        points.push(Vec2::new(
            QuadNum::from_rational(random_rational(rng)),
            QuadNum::from_rational(random_rational(rng)),
        ));
    }
    points
}
