//! Planar non-termination cones.
//!
//! A set is stored by its generators; for membership and intersection it is
//! converted to a conjunction of homogeneous half-plane constraints
//! `w . x > 0` or `w . x >= 0`, with the origin always excluded.

use std::fmt;

use num_bigint::BigInt;

use super::NtError;
use crate::exact::{ExactError, QuadNum, Sign};
use crate::linalg::Vec2;

type QVec = Vec2<QuadNum>;

/// Non-termination set of a two-variable loop.
///
/// * `Ray`: `{k * dir : k > 0}`.
/// * `Sector`: `{k1 * right + k2 * left : k1, k2 >= 0, not both 0}`, with the
///   right (resp. left) boundary ray removed when its flag is false. Either
///   `cross(right, left) > 0`, or the generators are antiparallel and the
///   set is the open half-plane counterclockwise of `right`.
#[derive(Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum NtSet {
    Empty,
    Ray {
        dir: QVec,
    },
    Sector {
        right: QVec,
        left: QVec,
        right_closed: bool,
        left_closed: bool,
    },
}

/// One constraint `normal . x > 0` (strict) or `>= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfSpace {
    pub normal: QVec,
    pub strict: bool,
}

impl HalfSpace {
    pub fn eval(&self, p: &QVec) -> QuadNum {
        self.normal.dot(p)
    }

    pub fn holds(&self, p: &QVec) -> bool {
        let s = self.eval(p).sign();
        s.is_positive() || (!self.strict && s.is_zero())
    }

    fn holds_closed(&self, p: &QVec) -> bool {
        !self.eval(p).sign().is_negative()
    }
}

/// A single sign test performed while deciding membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignTest {
    pub constraint: HalfSpace,
    pub value: QuadNum,
    pub sign: Sign,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    pub is_origin: bool,
    pub tests: Vec<SignTest>,
}

impl NtSet {
    pub fn ray(dir: QVec) -> Result<NtSet, NtError> {
        if dir.is_zero() {
            return Err(NtError::InvalidSet("ray direction is zero".into()));
        }
        dir.radicand()?;
        Ok(NtSet::Ray {
            dir: dir.canonical_direction(),
        })
    }

    /// Checks the orientation invariant and canonicalizes the generators.
    pub fn sector(
        right: QVec,
        left: QVec,
        right_closed: bool,
        left_closed: bool,
    ) -> Result<NtSet, NtError> {
        if right.is_zero() || left.is_zero() {
            return Err(NtError::InvalidSet("sector generator is zero".into()));
        }
        compatible(&right, &left)?;
        match right.cross(&left).sign() {
            Sign::Positive => {}
            Sign::Zero if right.dot(&left).sign().is_negative() => {
                if right_closed || left_closed {
                    return Err(NtError::InvalidSet(
                        "half-plane sectors must have open boundaries".into(),
                    ));
                }
            }
            _ => {
                return Err(NtError::InvalidSet(
                    "sector generators must span a counterclockwise angle in (0, pi]".into(),
                ))
            }
        }
        Ok(NtSet::Sector {
            right: right.canonical_direction(),
            left: left.canonical_direction(),
            right_closed,
            left_closed,
        })
    }

    /// Sector spanned by two independent generators, oriented automatically.
    pub fn sector_from_pair(
        u: QVec,
        u_closed: bool,
        v: QVec,
        v_closed: bool,
    ) -> Result<NtSet, NtError> {
        if u.cross(&v).sign().is_negative() {
            NtSet::sector(v, u, v_closed, u_closed)
        } else {
            NtSet::sector(u, v, u_closed, v_closed)
        }
    }

    /// The open half-plane `{x : w . x > 0}`.
    pub fn half_plane(w: &QVec) -> Result<NtSet, NtError> {
        if w.is_zero() {
            return Err(NtError::InvalidSet("half-plane normal is zero".into()));
        }
        // rotate w clockwise for the right boundary
        let right = Vec2::new(w.x2.clone(), -w.x1.clone());
        let left = right.neg();
        NtSet::sector(right, left, false, false)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, NtSet::Empty)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            NtSet::Empty => "empty",
            NtSet::Ray { .. } => "ray",
            NtSet::Sector { .. } => "sector",
        }
    }

    pub fn is_half_plane(&self) -> bool {
        match self {
            NtSet::Sector { right, left, .. } => right.cross(left).sign().is_zero(),
            _ => false,
        }
    }

    pub fn generators(&self) -> Vec<&QVec> {
        match self {
            NtSet::Empty => vec![],
            NtSet::Ray { dir } => vec![dir],
            NtSet::Sector { right, left, .. } => vec![right, left],
        }
    }

    /// Non-rational radicand shared by the generators, if any.
    pub fn radicand(&self) -> Result<Option<BigInt>, ExactError> {
        let mut found: Option<BigInt> = None;
        for g in self.generators() {
            if let Some(d) = g.radicand()? {
                match &found {
                    Some(e) if *e != d => {
                        return Err(ExactError::IncompatibleRadicands(e.clone(), d))
                    }
                    _ => found = Some(d),
                }
            }
        }
        Ok(found)
    }

    /// Constraint form. Empty has none and must be special-cased.
    pub fn constraints(&self) -> Vec<HalfSpace> {
        // w . x = cross(g, x) for w = perp-like normal of g
        let left_of = |g: &QVec| Vec2::new(-g.x2.clone(), g.x1.clone());
        let right_of = |g: &QVec| Vec2::new(g.x2.clone(), -g.x1.clone());
        match self {
            NtSet::Empty => vec![],
            NtSet::Ray { dir } => vec![
                HalfSpace {
                    normal: left_of(dir),
                    strict: false,
                },
                HalfSpace {
                    normal: right_of(dir),
                    strict: false,
                },
                HalfSpace {
                    normal: dir.clone(),
                    strict: true,
                },
            ],
            NtSet::Sector {
                right,
                left,
                right_closed,
                left_closed,
            } => {
                if right.cross(left).sign().is_zero() {
                    vec![HalfSpace {
                        normal: left_of(right),
                        strict: true,
                    }]
                } else {
                    vec![
                        HalfSpace {
                            normal: left_of(right),
                            strict: !right_closed,
                        },
                        HalfSpace {
                            normal: right_of(left),
                            strict: !left_closed,
                        },
                    ]
                }
            }
        }
    }

    pub fn check_point(&self, p: &QVec) -> Result<(), NtError> {
        p.radicand()?;
        if let (Some(d), Some(e)) = (self.radicand()?, p.radicand()?) {
            if d != e {
                return Err(ExactError::IncompatibleRadicands(d, e).into());
            }
        }
        Ok(())
    }

    pub fn member(&self, p: &QVec) -> Result<bool, NtError> {
        Ok(self.explain_member(p)?.member)
    }

    /// Membership together with every sign test that decided it.
    pub fn explain_member(&self, p: &QVec) -> Result<Membership, NtError> {
        self.check_point(p)?;
        let is_origin = p.is_zero();
        let tests: Vec<SignTest> = self
            .constraints()
            .into_iter()
            .map(|c| {
                let value = c.eval(p);
                let sign = value.sign();
                let satisfied = c.holds(p);
                SignTest {
                    constraint: c,
                    value,
                    sign,
                    satisfied,
                }
            })
            .collect();
        let member = !self.is_empty() && !is_origin && tests.iter().all(|t| t.satisfied);
        Ok(Membership {
            member,
            is_origin,
            tests,
        })
    }

    /// Exact intersection, normalized to the tightest representation.
    pub fn intersect(&self, other: &NtSet) -> Result<NtSet, NtError> {
        if self.is_empty() || other.is_empty() {
            return Ok(NtSet::Empty);
        }
        if let (Some(d), Some(e)) = (self.radicand()?, other.radicand()?) {
            if d != e {
                return Err(ExactError::IncompatibleRadicands(d, e).into());
            }
        }
        let mut cons = self.constraints();
        cons.extend(other.constraints());
        from_constraints(&cons)
    }
}

fn compatible(u: &QVec, v: &QVec) -> Result<(), ExactError> {
    if let (Some(d), Some(e)) = (u.radicand()?, v.radicand()?) {
        if d != e {
            return Err(ExactError::IncompatibleRadicands(d, e));
        }
    }
    Ok(())
}

fn same_direction(u: &QVec, v: &QVec) -> bool {
    u.cross(v).sign().is_zero() && u.dot(v).sign().is_positive()
}

/// Solution cone of a nonempty constraint list.
///
/// The closure `T` of the cone (all constraints made non-strict) is bounded
/// by rays lying on constraint lines, so its extreme directions are among
/// the `+-` line directions. When `T` has interior, every interior point
/// satisfies every constraint strictly, so only the boundary rays need the
/// strict test.
pub(crate) fn from_constraints(cons: &[HalfSpace]) -> Result<NtSet, NtError> {
    let mut dirs: Vec<QVec> = Vec::new();
    for c in cons {
        let e = Vec2::new(c.normal.x2.clone(), -c.normal.x1.clone());
        for d in [e.neg(), e] {
            if d.is_zero() || !cons.iter().all(|c| c.holds_closed(&d)) {
                continue;
            }
            if !dirs.iter().any(|k| same_direction(k, &d)) {
                dirs.push(d.canonical_direction());
            }
        }
    }
    let in_set = |d: &QVec| cons.iter().all(|c| c.holds(d));
    match dirs.as_slice() {
        [] => Ok(NtSet::Empty),
        [d] => {
            if in_set(d) {
                NtSet::ray(d.clone())
            } else {
                Ok(NtSet::Empty)
            }
        }
        [u, v] => match u.cross(v).sign() {
            Sign::Positive => NtSet::sector(u.clone(), v.clone(), in_set(u), in_set(v)),
            Sign::Negative => NtSet::sector(v.clone(), u.clone(), in_set(v), in_set(u)),
            Sign::Zero => {
                let (u_in, v_in) = (in_set(u), in_set(v));
                let ccw_of_u = u.perp();
                let ccw_of_v = v.perp();
                let closed_side = |d: &QVec| cons.iter().all(|c| c.holds_closed(d));
                if closed_side(&ccw_of_u) || closed_side(&ccw_of_v) {
                    if u_in || v_in {
                        return Err(NtError::InternalInvariantViolation(
                            "intersection produced a closed half-plane".into(),
                        ));
                    }
                    let (r, l) = if closed_side(&ccw_of_u) {
                        (u, v)
                    } else {
                        (v, u)
                    };
                    NtSet::sector(r.clone(), l.clone(), false, false)
                } else {
                    match (u_in, v_in) {
                        (false, false) => Ok(NtSet::Empty),
                        (true, false) => NtSet::ray(u.clone()),
                        (false, true) => NtSet::ray(v.clone()),
                        (true, true) => Err(NtError::InternalInvariantViolation(
                            "intersection produced a full line".into(),
                        )),
                    }
                }
            }
        },
        _ => Err(NtError::InternalInvariantViolation(format!(
            "cone closure has {} extreme directions",
            dirs.len()
        ))),
    }
}

pub fn member(s: &NtSet, p: &QVec) -> Result<bool, NtError> {
    s.member(p)
}

pub fn intersect(s1: &NtSet, s2: &NtSet) -> Result<NtSet, NtError> {
    s1.intersect(s2)
}

impl fmt::Display for NtSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bracket = |closed: bool| if closed { "closed" } else { "open" };
        match self {
            NtSet::Empty => f.write_str("empty"),
            NtSet::Ray { dir } => write!(f, "ray {{k*{dir} : k > 0}}"),
            NtSet::Sector {
                right,
                left,
                right_closed,
                left_closed,
            } => {
                if self.is_half_plane() {
                    write!(f, "open half-plane counterclockwise of {right}")
                } else {
                    write!(
                        f,
                        "sector from {right} ({}) to {left} ({})",
                        bracket(*right_closed),
                        bracket(*left_closed)
                    )
                }
            }
        }
    }
}

impl fmt::Debug for NtSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn v(a: i64, b: i64) -> QVec {
        Vec2::<QuadNum>::from_ints(a, b)
    }

    fn hp(a: i64, b: i64) -> NtSet {
        NtSet::half_plane(&v(a, b)).unwrap()
    }

    fn beta() -> QVec {
        Vec2::new(
            QuadNum::from_int(1),
            QuadNum::new(rat(1, 4), rat(1, 4), 17.into()).unwrap(),
        )
    }

    #[test]
    fn half_plane_generators() {
        assert_eq!(
            hp(1, 0),
            NtSet::Sector {
                right: v(0, -1),
                left: v(0, 1),
                right_closed: false,
                left_closed: false
            }
        );
    }

    #[test]
    fn sector_membership() {
        let s = NtSet::sector(v(1, 0), v(-1, 1), true, false).unwrap();
        assert!(s.member(&v(1, 0)).unwrap());
        assert!(!s.member(&v(-1, 1)).unwrap());
        assert!(!s.member(&v(0, 0)).unwrap());
        assert!(s.member(&v(0, 1)).unwrap());
        assert!(!s.member(&v(1, -1)).unwrap());
        assert!(!s.member(&v(-1, 0)).unwrap());
    }

    #[test]
    fn ray_membership() {
        let r = NtSet::ray(beta()).unwrap();
        let p = Vec2::new(
            QuadNum::from_int(2),
            QuadNum::new(rat(1, 2), rat(1, 2), 17.into()).unwrap(),
        );
        assert!(r.member(&p).unwrap());
        assert!(!r.member(&p.neg()).unwrap());
        assert!(!r.member(&v(1, 1)).unwrap());
        assert!(!r.member(&v(0, 0)).unwrap());
        let other = Vec2::new(
            QuadNum::from_int(1),
            QuadNum::new(int(0), int(1), 2.into()).unwrap(),
        );
        assert!(matches!(
            r.member(&other),
            Err(NtError::Exact(ExactError::IncompatibleRadicands(_, _)))
        ));
    }

    #[test]
    fn empty_has_no_members() {
        assert!(!NtSet::Empty.member(&v(1, 0)).unwrap());
    }

    #[test]
    fn intersections() {
        assert_eq!(
            hp(1, 0).intersect(&hp(0, 1)).unwrap(),
            NtSet::sector(v(1, 0), v(0, 1), false, false).unwrap()
        );
        assert_eq!(hp(1, 0).intersect(&NtSet::Empty).unwrap(), NtSet::Empty);
        let r = NtSet::ray(v(1, 0)).unwrap();
        assert_eq!(r.intersect(&hp(1, 0)).unwrap(), r);
        assert_eq!(hp(1, 0).intersect(&hp(-1, 0)).unwrap(), NtSet::Empty);
        assert_eq!(hp(1, 0).intersect(&hp(2, 0)).unwrap(), hp(1, 0));
    }

    #[test]
    fn intersections_touching_boundaries() {
        // two closed-boundary sectors meeting only along (1,0)
        let upper = NtSet::sector(v(1, 0), v(0, 1), true, false).unwrap();
        let lower = NtSet::sector(v(0, -1), v(1, 0), false, true).unwrap();
        assert_eq!(
            upper.intersect(&lower).unwrap(),
            NtSet::ray(v(1, 0)).unwrap()
        );
        let lower_open = NtSet::sector(v(0, -1), v(1, 0), false, false).unwrap();
        assert_eq!(upper.intersect(&lower_open).unwrap(), NtSet::Empty);
        // ray on an open boundary
        let r = NtSet::ray(v(0, 1)).unwrap();
        assert_eq!(r.intersect(&hp(1, 0)).unwrap(), NtSet::Empty);
        // nested sectors keep the tighter boundary and its flag
        let wide = NtSet::sector(v(1, -1), v(-1, 1), false, false);
        assert!(wide.is_ok());
        let narrow = NtSet::sector(v(1, 0), v(1, 1), true, true).unwrap();
        assert_eq!(
            narrow.intersect(&hp(0, 1)).unwrap(),
            NtSet::sector(v(1, 0), v(1, 1), false, true).unwrap()
        );
    }

    #[test]
    fn invalid_sectors() {
        assert!(NtSet::sector(v(0, 1), v(1, 0), false, false).is_err());
        assert!(NtSet::sector(v(1, 0), v(-1, 0), true, false).is_err());
        assert!(NtSet::sector(v(1, 0), v(2, 0), false, false).is_err());
        assert!(NtSet::ray(v(0, 0)).is_err());
    }

    #[test]
    fn explain_lists_tests() {
        let s = NtSet::sector(v(1, 0), v(-1, 1), true, false).unwrap();
        let m = s.explain_member(&v(-1, 1)).unwrap();
        assert!(!m.member);
        assert_eq!(m.tests.len(), 2);
        assert!(m.tests.iter().any(|t| t.sign == Sign::Zero && !t.satisfied));
    }
}
