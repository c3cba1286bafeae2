//! Non-termination sets of two-variable homogeneous loops.
//!
//! [`analyze_single`] handles one guard row by case analysis on the
//! eigenvalues of `A`; [`analyze`] intersects the per-row sets, since a
//! conjunctive guard runs forever exactly when every conjunct does.

mod set;

use std::fmt;

use thiserror::Error;

use crate::exact::{ExactError, QuadNum, Rational, Sign, DEFAULT_FACTOR_BOUND};
use crate::frontend::{validate_for_analysis, FrontendError, LoopSpec};
use crate::linalg::{
    eigen2_with_bound, kernel_dir, EigenInfo, Eigenvectors, LinalgError, Mat2, Vec2,
};

pub use set::{intersect, member, HalfSpace, Membership, NtSet, SignTest};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NtError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Linalg(LinalgError),
    #[error("invalid non-termination set: {0}")]
    InvalidSet(String),
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
}

impl From<LinalgError> for NtError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::Exact(x) => NtError::Exact(x),
            other => NtError::Linalg(other),
        }
    }
}

/// Which branch of the case analysis produced the result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    /// `A = 0` or `B = 0`.
    ZeroMatrix,
    /// No positive real eigenvalue (complex pair included).
    NoPositiveEigenvalue,
    /// The guard kernel is an eigen-direction and the guard survives one step
    /// from inside: the whole open half-plane `Bx > 0`.
    Lemma4,
    /// As above but the guard fails after one step: empty.
    Lemma5,
    /// One zero and one positive eigenvalue: `Bx > 0 and BAx > 0`.
    Lemma6,
    /// Two positive eigenvalues, distinct or defective.
    Lemma7or8,
    /// `lambda1 > 0 > lambda2` with `lambda1 >= |lambda2|`.
    Lemma9,
    /// `lambda1 > 0 > lambda2` with `lambda1 < |lambda2|`: a single ray.
    Lemma10,
}

impl CaseTag {
    pub fn name(self) -> &'static str {
        match self {
            CaseTag::ZeroMatrix => "ZeroMatrix",
            CaseTag::NoPositiveEigenvalue => "NoPositiveEigenvalue",
            CaseTag::Lemma4 => "Lemma4",
            CaseTag::Lemma5 => "Lemma5",
            CaseTag::Lemma6 => "Lemma6",
            CaseTag::Lemma7or8 => "Lemma7or8",
            CaseTag::Lemma9 => "Lemma9",
            CaseTag::Lemma10 => "Lemma10",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Result of analysing one guard row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisReport {
    pub nt: NtSet,
    pub case_tag: CaseTag,
    /// `None` only for [`CaseTag::ZeroMatrix`], which returns before any
    /// eigen computation.
    pub eigen: Option<EigenInfo>,
    /// Named vectors the branch used, in the order they were chosen.
    pub witnesses: Vec<(String, Vec2<QuadNum>)>,
}

impl AnalysisReport {
    pub fn witness(&self, name: &str) -> Option<&Vec2<QuadNum>> {
        self.witnesses
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
    }
}

/// Result of analysing a loop with any number of strict guard rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopAnalysis {
    pub nt: NtSet,
    pub rows: Vec<AnalysisReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Trial-division bound for squarefree radicands.
    pub factor_bound: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            factor_bound: DEFAULT_FACTOR_BOUND,
        }
    }
}

pub fn analyze_single(a: &Mat2<Rational>, b: &Vec2<Rational>) -> Result<AnalysisReport, NtError> {
    analyze_single_with(a, b, &AnalysisOptions::default())
}

fn violation(msg: impl Into<String>) -> NtError {
    NtError::InternalInvariantViolation(msg.into())
}

/// Non-termination set of `while (b . x > 0) { x := a x }`.
pub fn analyze_single_with(
    a: &Mat2<Rational>,
    b: &Vec2<Rational>,
    opts: &AnalysisOptions,
) -> Result<AnalysisReport, NtError> {
    if a.is_zero() || b.is_zero() {
        return Ok(AnalysisReport {
            nt: NtSet::Empty,
            case_tag: CaseTag::ZeroMatrix,
            eigen: None,
            witnesses: vec![],
        });
    }

    let eigen = eigen2_with_bound(a, opts.factor_bound)?;
    let mut report = AnalysisReport {
        nt: NtSet::Empty,
        case_tag: CaseTag::NoPositiveEigenvalue,
        eigen: None,
        witnesses: vec![],
    };
    let (l1, l2) = match &eigen.eigenvalues {
        Some((l1, l2)) if l1.sign().is_positive() => (l1.clone(), l2.clone()),
        _ => {
            report.eigen = Some(eigen);
            return Ok(report);
        }
    };

    let ba = a.left_apply(b);
    let bq = b.to_quad();

    // kernel direction of the guard, oriented so that B A alpha0 >= 0
    let mut alpha0 = kernel_dir(b)?;
    let mut ba_alpha0 = ba.dot(&alpha0);
    if Sign::of_rational(&ba_alpha0).is_negative() {
        alpha0 = alpha0.neg();
        ba_alpha0 = -ba_alpha0;
    }
    if !Sign::of_rational(&b.dot(&alpha0)).is_zero() {
        return Err(violation("B alpha0 != 0"));
    }
    report.witnesses.push(("alpha0".into(), alpha0.to_quad()));

    let (nt, tag) = if Sign::of_rational(&ba_alpha0).is_zero() {
        // alpha0 is an eigen-direction; decide by one step from xi = B^T
        let xi = b.clone();
        report.witnesses.push(("xi".into(), xi.to_quad()));
        if Sign::of_rational(&ba.dot(&xi)).is_positive() {
            (NtSet::half_plane(&bq)?, CaseTag::Lemma4)
        } else {
            (NtSet::Empty, CaseTag::Lemma5)
        }
    } else if l2.sign().is_zero() {
        let nt = NtSet::half_plane(&bq)?.intersect(&NtSet::half_plane(&ba.to_quad())?)?;
        (nt, CaseTag::Lemma6)
    } else if l2.sign().is_positive() {
        let beta2 = match &eigen.eigenvectors {
            Eigenvectors::Distinct(_, v2) => v2.clone(),
            Eigenvectors::Single(v) => v.clone(),
            _ => return Err(violation("scalar matrix reached the two-positive branch")),
        };
        let beta2 = orient_positive(&bq, beta2, "beta2")?;
        report.witnesses.push(("beta2".into(), beta2.clone()));
        let nt = NtSet::sector_from_pair(beta2, true, alpha0.to_quad(), false)?;
        (nt, CaseTag::Lemma7or8)
    } else if l1.clone() + l2.clone() >= QuadNum::from_int(0) {
        // lambda1 >= |lambda2|
        let inv = a
            .inverse()
            .map_err(|_| violation("A singular with nonzero eigenvalues"))?;
        let alpha_m1 = inv.apply(&alpha0);
        report
            .witnesses
            .push(("alpha_minus1".into(), alpha_m1.to_quad()));
        let nt = NtSet::sector_from_pair(alpha0.to_quad(), false, alpha_m1.to_quad(), false)?;
        (nt, CaseTag::Lemma9)
    } else {
        let beta1 = match &eigen.eigenvectors {
            Eigenvectors::Distinct(v1, _) => v1.clone(),
            _ => {
                return Err(violation(
                    "distinct-sign eigenvalues without two eigenvectors",
                ))
            }
        };
        let beta = orient_positive(&bq, beta1, "beta")?;
        report.witnesses.push(("beta".into(), beta.clone()));
        (NtSet::ray(beta)?, CaseTag::Lemma10)
    };

    report.nt = nt;
    report.case_tag = tag;
    report.eigen = Some(eigen);
    Ok(report)
}

/// Flips `v` so that `b . v > 0`; `b . v = 0` is impossible on the branches
/// that call this.
fn orient_positive(
    b: &Vec2<QuadNum>,
    v: Vec2<QuadNum>,
    name: &str,
) -> Result<Vec2<QuadNum>, NtError> {
    match b.dot(&v).sign() {
        Sign::Positive => Ok(v),
        Sign::Negative => Ok(v.neg()),
        Sign::Zero => Err(violation(format!("B {name} = 0"))),
    }
}

pub fn analyze(spec: &LoopSpec) -> Result<LoopAnalysis, NtError> {
    analyze_with(spec, &AnalysisOptions::default())
}

/// Intersects the per-row sets of a validated two-variable loop.
pub fn analyze_with(spec: &LoopSpec, opts: &AnalysisOptions) -> Result<LoopAnalysis, NtError> {
    validate_for_analysis(spec)?;
    let a = Mat2::from_matrix(spec.update())?;
    let mut rows = Vec::with_capacity(spec.guard().rows());
    let mut nt: Option<NtSet> = None;
    for row in spec.guard().row_iter() {
        let b = Vec2::new(row[0].clone(), row[1].clone());
        let report = analyze_single_with(&a, &b, opts)?;
        nt = Some(match nt {
            None => report.nt.clone(),
            Some(acc) => acc.intersect(&report.nt)?,
        });
        rows.push(report);
    }
    Ok(LoopAnalysis {
        nt: nt.expect("at least one guard row"),
        rows,
    })
}
