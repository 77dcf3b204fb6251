//! Inertial reference frames and the affine maps between them.
//!
//! A frame attached to a body with absolute spatial velocity `v` and proper
//! time velocity `w` maps into the absolute frame through
//!
//! ```text
//!   standard:  [ 1/w  v/w ]      symmetric:  [ -1/w  v/w ]
//!              [ v/w  1/w ]                  [ -v/w  1/w ]
//! ```
//!
//! The light-like directions `(1, 1)` and `(-1, 1)` are eigenvectors of a
//! standard map and are swapped by a symmetric one.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{initial_center, InertialSignature, Trace};
use crate::lattice::BodyRef;
use crate::rational::{self, int, Rational};

/// An event `(x, t)` in some frame.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EventPoint {
    #[serde(with = "rational::serde_str")]
    pub x: Rational,
    #[serde(with = "rational::serde_str")]
    pub t: Rational,
}

impl EventPoint {
    pub fn new(x: Rational, t: Rational) -> Self {
        EventPoint { x, t }
    }

    pub fn origin() -> Self {
        EventPoint::new(Rational::zero(), Rational::zero())
    }
}

impl fmt::Display for EventPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", rational::short(&self.x), rational::short(&self.t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfigKind {
    Standard,
    Symmetric,
}

impl fmt::Display for ConfigKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigKind::Standard => f.write_str("standard"),
            ConfigKind::Symmetric => f.write_str("symmetric"),
        }
    }
}

fn classify(a: &[[Rational; 2]; 2]) -> Option<ConfigKind> {
    if a[0][0] == a[1][1] && a[0][1] == a[1][0] {
        Some(ConfigKind::Standard)
    } else if a[0][0] == -&a[1][1] && a[0][1] == -&a[1][0] {
        Some(ConfigKind::Symmetric)
    } else {
        None
    }
}

/// Affine map `p -> A p + o` between event spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameMap {
    a: [[Rational; 2]; 2],
    offset: EventPoint,
    kind: ConfigKind,
}

impl FrameMap {
    /// Linear map with the given entries. Fails unless the matrix is in
    /// standard or symmetric configuration with a non-zero determinant.
    pub fn new(a11: Rational, a12: Rational, a21: Rational, a22: Rational) -> Result<Self> {
        let a = [[a11, a12], [a21, a22]];
        let kind = classify(&a).ok_or(Error::CorruptFrameMap)?;
        let det = &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0];
        if det.is_zero() {
            return Err(Error::CorruptFrameMap);
        }
        Ok(FrameMap {
            a,
            offset: EventPoint::origin(),
            kind,
        })
    }

    pub fn identity() -> Self {
        FrameMap::new(int(1), int(0), int(0), int(1)).expect("identity is standard")
    }

    /// Frame of a body moving with `v` and proper time velocity `w`.
    pub fn from_kinematics(v: &Rational, w: &Rational, kind: ConfigKind) -> Result<Self> {
        check_kinematics(v, w)?;
        let inv_w = w.recip();
        let vw = v / w;
        match kind {
            ConfigKind::Standard => FrameMap::new(inv_w.clone(), vw.clone(), vw, inv_w),
            ConfigKind::Symmetric => FrameMap::new(-&inv_w, vw.clone(), -vw, inv_w),
        }
    }

    /// Same linear part, translation `(ox, ot)` added after it.
    pub fn with_translation(mut self, ox: Rational, ot: Rational) -> Self {
        self.offset = EventPoint::new(ox, ot);
        self
    }

    pub fn linear(&self) -> &[[Rational; 2]; 2] {
        &self.a
    }

    pub fn translation(&self) -> &EventPoint {
        &self.offset
    }

    pub fn kind(&self) -> ConfigKind {
        self.kind
    }

    pub fn determinant(&self) -> Rational {
        &self.a[0][0] * &self.a[1][1] - &self.a[0][1] * &self.a[1][0]
    }

    pub fn is_linear(&self) -> bool {
        self.offset.x.is_zero() && self.offset.t.is_zero()
    }

    pub fn apply_linear(&self, e: &EventPoint) -> EventPoint {
        EventPoint::new(
            &self.a[0][0] * &e.x + &self.a[0][1] * &e.t,
            &self.a[1][0] * &e.x + &self.a[1][1] * &e.t,
        )
    }

    pub fn apply(&self, e: &EventPoint) -> EventPoint {
        let p = self.apply_linear(e);
        EventPoint::new(p.x + &self.offset.x, p.t + &self.offset.t)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &FrameMap) -> FrameMap {
        let a = &self.a;
        let b = &other.a;
        let m = [
            [
                &a[0][0] * &b[0][0] + &a[0][1] * &b[1][0],
                &a[0][0] * &b[0][1] + &a[0][1] * &b[1][1],
            ],
            [
                &a[1][0] * &b[0][0] + &a[1][1] * &b[1][0],
                &a[1][0] * &b[0][1] + &a[1][1] * &b[1][1],
            ],
        ];
        let o = self.apply(&other.offset);
        let kind = classify(&m).expect("standard and symmetric maps form a group");
        FrameMap { a: m, offset: o, kind }
    }

    pub fn invert(&self) -> FrameMap {
        let det = self.determinant();
        let a = &self.a;
        let m = [[&a[1][1] / &det, -&a[0][1] / &det], [-&a[1][0] / &det, &a[0][0] / &det]];
        let lin = FrameMap {
            a: m,
            offset: EventPoint::origin(),
            kind: self.kind,
        };
        let o = lin.apply_linear(&self.offset);
        lin.with_translation(-o.x, -o.t)
    }

    /// `(v, w)` of the body whose frame this map leaves: `w = 1/a22`,
    /// `v = a12/a22`.
    pub fn kinematics(&self) -> Result<(Rational, Rational)> {
        if !self.a[1][1].is_positive() {
            return Err(Error::InvalidKinematics(format!(
                "time-time entry {} is not positive",
                rational::short(&self.a[1][1])
            )));
        }
        let w = self.a[1][1].recip();
        let v = &self.a[0][1] / &self.a[1][1];
        Ok((v, w))
    }

    /// Verifies the light-like direction structure directly on the matrix.
    pub fn eigendirection_check(&self) -> Result<DirectionCheck> {
        let right = self.apply_linear(&EventPoint::new(int(1), int(1)));
        let left = self.apply_linear(&EventPoint::new(int(-1), int(1)));
        // right = (a, b) is parallel to (1, 1) iff a == b, to (-1, 1) iff a == -b
        if right.x == right.t && left.x == -&left.t {
            Ok(DirectionCheck {
                kind: ConfigKind::Standard,
                factors: (right.t, left.t),
            })
        } else if right.x == -&right.t && left.x == left.t {
            Ok(DirectionCheck {
                kind: ConfigKind::Symmetric,
                factors: (right.t, left.t),
            })
        } else {
            Err(Error::CorruptFrameMap)
        }
    }
}

impl fmt::Display for FrameMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = rational::short;
        write!(
            f,
            "[[{}, {}], [{}, {}]] + ({}, {})",
            s(&self.a[0][0]),
            s(&self.a[0][1]),
            s(&self.a[1][0]),
            s(&self.a[1][1]),
            s(&self.offset.x),
            s(&self.offset.t)
        )
    }
}

/// Result of [`FrameMap::eigendirection_check`].
///
/// For a standard map `factors` are the eigenvalues on `(1, 1)` and
/// `(-1, 1)`. For a symmetric map they are the scale factors with which
/// `(1, 1)` lands on `(-1, 1)` and `(-1, 1)` lands on `(1, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionCheck {
    pub kind: ConfigKind,
    pub factors: (Rational, Rational),
}

pub fn check_kinematics(v: &Rational, w: &Rational) -> Result<()> {
    if w.is_zero() {
        return Err(Error::LightLike);
    }
    if w.is_negative() {
        return Err(Error::InvalidKinematics(format!(
            "w = {} is negative",
            rational::short(w)
        )));
    }
    if v.abs() >= Rational::one() {
        return Err(Error::InvalidKinematics(format!(
            "|v| = {} is not below 1",
            rational::short(&v.abs())
        )));
    }
    Ok(())
}

/// `(v_AB, w_AB)` from `(v_BA, w_BA)`: `v_AB = -v_BA`, `w_AB = (1 - v²) / w_BA`.
pub fn reciprocal_kinematics(v: &Rational, w: &Rational) -> Result<(Rational, Rational)> {
    check_kinematics(v, w)?;
    Ok((-v, (Rational::one() - v * v) / w))
}

/// `(v_BA + v_CB) / (1 + v_BA v_CB)`.
pub fn velocity_add(v_ba: &Rational, v_cb: &Rational) -> Result<Rational> {
    let one = Rational::one();
    if v_ba.abs() > one || v_cb.abs() > one {
        return Err(Error::InvalidKinematics("speed above 1".into()));
    }
    let denom = &one + v_ba * v_cb;
    if denom.is_zero() {
        return Err(Error::OppositeLightSpeeds);
    }
    Ok((v_ba + v_cb) / denom)
}

/// Separation of two co-moving bodies seen from another frame:
/// `Δx' = w_CA · |x_AA - x_BA|`.
pub fn length_in_frame(x_a_in_a: &Rational, x_b_in_a: &Rational, w_ca: &Rational) -> Result<Rational> {
    if w_ca.is_zero() {
        return Err(Error::LightLike);
    }
    if w_ca.is_negative() {
        return Err(Error::InvalidKinematics("negative w".into()));
    }
    Ok(w_ca * (x_a_in_a - x_b_in_a).abs())
}

/// Motion of body A seen from body B's frame:
/// `x_AB(τ_B) = x0 + v τ_B`, `τ_AB(τ_B) = tau0 + w τ_B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelativeKinematics {
    #[serde(with = "rational::serde_str")]
    pub v: Rational,
    #[serde(with = "rational::serde_str")]
    pub w: Rational,
    #[serde(with = "rational::serde_str")]
    pub x0: Rational,
    #[serde(with = "rational::serde_str")]
    pub tau0: Rational,
}

impl RelativeKinematics {
    pub fn position_at(&self, tau_b: &Rational) -> Rational {
        &self.x0 + &self.v * tau_b
    }

    pub fn proper_time_at(&self, tau_b: &Rational) -> Rational {
        &self.tau0 + &self.w * tau_b
    }

    /// Reads the kinematics of the body leaving `map` (which sends its frame
    /// into the observer's frame).
    pub fn from_map(map: &FrameMap) -> Result<Self> {
        let (v, w) = map.kinematics()?;
        let o = map.translation();
        Ok(RelativeKinematics {
            x0: &o.x - &v * &o.t,
            tau0: -(&o.t * &w),
            v,
            w,
        })
    }
}

/// Reference frame of an inertial, non-light-like body.
///
/// `to_absolute` sends `(x, τ_B)` to absolute coordinates; its origin is pinned
/// to the event `(x_B(0), 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyFrame {
    pub members: Vec<BodyRef>,
    pub signature: InertialSignature,
    pub origin: Rational,
    pub to_absolute: FrameMap,
}

impl BodyFrame {
    pub fn new(trace: &Trace, members: &[BodyRef], p_max: u64) -> Result<Self> {
        let signature = trace
            .inertial_signature(members, p_max)?
            .ok_or(Error::NotInertial { p_max })?;
        if signature.is_light_like() {
            return Err(Error::LightLike);
        }
        let origin = initial_center(trace.initial(), members)?;
        let to_absolute = FrameMap::from_kinematics(&signature.v, &signature.w, ConfigKind::Standard)?
            .with_translation(origin.clone(), Rational::zero());
        let mut members = members.to_vec();
        members.sort();
        members.dedup();
        Ok(BodyFrame {
            members,
            signature,
            origin,
            to_absolute,
        })
    }

    /// The frame of an immovable body at the absolute origin.
    pub fn absolute() -> Self {
        BodyFrame {
            members: Vec::new(),
            signature: InertialSignature {
                period: 1,
                displacement: 0,
                v: Rational::zero(),
                w: Rational::one(),
            },
            origin: Rational::zero(),
            to_absolute: FrameMap::identity(),
        }
    }

    /// `L_AB`, sending this body's frame into `observer`'s frame.
    pub fn map_into(&self, observer: &BodyFrame) -> FrameMap {
        observer.to_absolute.invert().compose(&self.to_absolute)
    }

    pub fn relative_to(&self, observer: &BodyFrame) -> Result<RelativeKinematics> {
        RelativeKinematics::from_map(&self.map_into(observer))
    }
}

/// Kinematics of body `a` (in `trace_a`) observed from body `b` (in
/// `trace_b`). Both traces share the absolute frame.
pub fn relative_kinematics(
    trace_a: &Trace,
    a: &[BodyRef],
    trace_b: &Trace,
    b: &[BodyRef],
    p_max: u64,
) -> Result<RelativeKinematics> {
    let fa = BodyFrame::new(trace_a, a, p_max)?;
    let fb = BodyFrame::new(trace_b, b, p_max)?;
    fa.relative_to(&fb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::simulate;
    use crate::lattice::{Configuration, Edge, Topology};
    use crate::rational::q;
    use proptest::prelude::*;

    fn m(a11: Rational, a12: Rational, a21: Rational, a22: Rational) -> [[Rational; 2]; 2] {
        [[a11, a12], [a21, a22]]
    }

    fn half_step_map() -> FrameMap {
        FrameMap::from_kinematics(&q(1, 3), &q(2, 3), ConfigKind::Standard)
            .unwrap()
            .with_translation(q(-1, 2), q(-1, 2))
    }

    #[test]
    fn matrices_from_kinematics() {
        let id = FrameMap::from_kinematics(&int(0), &int(1), ConfigKind::Standard).unwrap();
        assert_eq!(id, FrameMap::identity());

        let std = FrameMap::from_kinematics(&q(1, 3), &q(2, 3), ConfigKind::Standard).unwrap();
        assert_eq!(std.linear(), &m(q(3, 2), q(1, 2), q(1, 2), q(3, 2)));

        let sym = FrameMap::from_kinematics(&q(1, 3), &q(2, 3), ConfigKind::Symmetric).unwrap();
        assert_eq!(sym.linear(), &m(q(-3, 2), q(1, 2), q(-1, 2), q(3, 2)));
        assert_eq!(sym.kind(), ConfigKind::Symmetric);
    }

    #[test]
    fn invalid_kinematics_are_rejected() {
        assert_eq!(
            FrameMap::from_kinematics(&int(1), &int(0), ConfigKind::Standard),
            Err(Error::LightLike)
        );
        assert!(matches!(
            FrameMap::from_kinematics(&int(1), &q(1, 2), ConfigKind::Standard),
            Err(Error::InvalidKinematics(_))
        ));
        assert!(FrameMap::new(int(1), int(2), int(3), int(4)).is_err());
        assert!(FrameMap::new(int(1), int(1), int(1), int(1)).is_err());
    }

    #[test]
    fn applying_the_example_transform() {
        let f = half_step_map();
        assert_eq!(f.apply(&EventPoint::origin()), EventPoint::new(q(-1, 2), q(-1, 2)));
        assert_eq!(
            f.apply(&EventPoint::new(int(0), int(1))),
            EventPoint::new(int(0), int(1))
        );
        let e = EventPoint::new(q(5, 7), int(-3));
        assert_eq!(FrameMap::identity().apply(&e), e);
    }

    #[test]
    fn inverse_of_the_example_transform() {
        let lin = FrameMap::from_kinematics(&q(1, 3), &q(2, 3), ConfigKind::Standard).unwrap();
        let inv = lin.invert();
        assert_eq!(inv.linear(), &m(q(3, 4), q(-1, 4), q(-1, 4), q(3, 4)));
        assert_eq!(inv.kinematics().unwrap(), (q(-1, 3), q(4, 3)));
        assert_eq!(FrameMap::identity().invert(), FrameMap::identity());
        let f = half_step_map();
        assert_eq!(f.compose(&f.invert()), FrameMap::identity());
        assert_eq!(f.invert().compose(&f), FrameMap::identity());
    }

    #[test]
    fn composition_kinds() {
        let a = FrameMap::from_kinematics(&q(1, 5), &q(1, 2), ConfigKind::Standard).unwrap();
        let s = FrameMap::from_kinematics(&q(-1, 4), &q(3, 5), ConfigKind::Symmetric).unwrap();
        assert_eq!(a.compose(&s).kind(), ConfigKind::Symmetric);
        assert_eq!(s.compose(&a).kind(), ConfigKind::Symmetric);
        assert_eq!(s.compose(&s).kind(), ConfigKind::Standard);
    }

    #[test]
    fn reciprocal_values() {
        assert_eq!(reciprocal_kinematics(&int(0), &int(1)).unwrap(), (int(0), int(1)));
        let (v, w) = reciprocal_kinematics(&q(1, 3), &q(2, 3)).unwrap();
        assert_eq!((v.clone(), w.clone()), (q(-1, 3), q(4, 3)));
        assert_eq!(q(2, 3) * w, int(1) - q(1, 3) * q(1, 3));
        assert_eq!(q(8, 9), int(1) - q(1, 9));
    }

    #[test]
    fn velocity_addition_values() {
        assert_eq!(velocity_add(&q(2, 7), &int(0)).unwrap(), q(2, 7));
        assert_eq!(velocity_add(&q(1, 3), &q(1, 3)).unwrap(), q(3, 5));
        assert_eq!(velocity_add(&int(1), &q(-5, 9)).unwrap(), int(1));
        assert_eq!(velocity_add(&int(1), &int(-1)), Err(Error::OppositeLightSpeeds));
    }

    #[test]
    fn length_values() {
        assert_eq!(length_in_frame(&int(0), &int(3), &int(1)).unwrap(), int(3));
        assert_eq!(length_in_frame(&int(0), &int(3), &q(2, 3)).unwrap(), int(2));
        assert_eq!(length_in_frame(&int(0), &int(-3), &q(4, 3)).unwrap(), int(4));
        assert_eq!(length_in_frame(&int(0), &int(3), &int(0)), Err(Error::LightLike));
    }

    #[test]
    fn eigendirections() {
        let id = FrameMap::identity().eigendirection_check().unwrap();
        assert_eq!(
            id,
            DirectionCheck {
                kind: ConfigKind::Standard,
                factors: (int(1), int(1))
            }
        );
        let ex = half_step_map().eigendirection_check().unwrap();
        assert_eq!(ex.factors, (int(2), int(1)));
        let mirror = FrameMap::from_kinematics(&int(0), &int(1), ConfigKind::Symmetric).unwrap();
        assert_eq!(mirror.linear(), &m(int(-1), int(0), int(0), int(1)));
        assert_eq!(mirror.eigendirection_check().unwrap().kind, ConfigKind::Symmetric);
    }

    fn example1() -> Configuration {
        Configuration::standard(Topology::Periodic(2), [(0, Edge::plus(0)), (1, Edge::minus(1))]).unwrap()
    }

    fn example2() -> Configuration {
        Configuration::standard(
            Topology::Periodic(4),
            [(0, Edge::plus(0)), (1, Edge::minus(1)), (2, Edge::plus(2))],
        )
        .unwrap()
    }

    #[test]
    fn relative_kinematics_of_the_example_bodies() {
        let t1 = simulate(&example1(), 12).unwrap();
        let t2 = simulate(&example2(), 12).unwrap();
        let a1 = [BodyRef::new(0), BodyRef::new(1), BodyRef::copy(0, 1)];
        let a2 = [BodyRef::new(0), BodyRef::new(1), BodyRef::new(2)];

        let same = relative_kinematics(&t1, &a1, &t1, &a1, 64).unwrap();
        assert_eq!(
            same,
            RelativeKinematics {
                v: int(0),
                w: int(1),
                x0: int(0),
                tau0: int(0)
            }
        );

        let k21 = relative_kinematics(&t2, &a2, &t1, &a1, 64).unwrap();
        assert_eq!((k21.v, k21.w), (q(1, 3), q(2, 3)));
        let k12 = relative_kinematics(&t1, &a1, &t2, &a2, 64).unwrap();
        assert_eq!((k12.v, k12.w), (q(-1, 3), q(4, 3)));

        let f1 = BodyFrame::new(&t1, &a1, 64).unwrap();
        let f2 = BodyFrame::new(&t2, &a2, 64).unwrap();
        assert_eq!(f2.map_into(&f1).linear(), &m(q(3, 2), q(1, 2), q(1, 2), q(3, 2)));
    }

    #[test]
    fn light_like_bodies_have_no_frame() {
        let c = Configuration::standard(Topology::Finite, [(0, Edge::plus(0))]).unwrap();
        let t = simulate(&c, 4).unwrap();
        assert_eq!(BodyFrame::new(&t, &[BodyRef::new(0)], 8), Err(Error::LightLike));
    }

    fn kin() -> impl Strategy<Value = (Rational, Rational)> {
        (1i64..40, -39i64..40, 1i64..30, 1i64..30)
            .prop_filter_map("|v| < 1", |(d, n, wn, wd)| (n.abs() < d).then(|| (q(n, d), q(wn, wd))))
    }

    proptest! {
        #[test]
        fn standard_maps_keep_light_directions((v, w) in kin()) {
            let f = FrameMap::from_kinematics(&v, &w, ConfigKind::Standard).unwrap();
            let check = f.eigendirection_check().unwrap();
            prop_assert_eq!(check.kind, ConfigKind::Standard);
            prop_assert_eq!(&check.factors.0, &((int(1) + &v) / &w));
            prop_assert_eq!(&check.factors.1, &((int(1) - &v) / &w));
            prop_assert!(check.factors.0.is_positive() && check.factors.1.is_positive());
            prop_assert_eq!(f.determinant(), (int(1) - &v * &v) / (&w * &w));
        }

        #[test]
        fn inverse_is_the_reciprocal_frame((v, w) in kin()) {
            let f = FrameMap::from_kinematics(&v, &w, ConfigKind::Standard).unwrap();
            let (rv, rw) = reciprocal_kinematics(&v, &w).unwrap();
            let g = FrameMap::from_kinematics(&rv, &rw, ConfigKind::Standard).unwrap();
            prop_assert_eq!(f.invert(), g);
        }

        #[test]
        fn composition_adds_velocities((v1, w1) in kin(), (v2, w2) in kin()) {
            let f = FrameMap::from_kinematics(&v1, &w1, ConfigKind::Standard).unwrap();
            let g = FrameMap::from_kinematics(&v2, &w2, ConfigKind::Standard).unwrap();
            let h = f.compose(&g);
            prop_assert_eq!(h.kind(), ConfigKind::Standard);
            let (v, _) = h.kinematics().unwrap();
            prop_assert_eq!(v, velocity_add(&v1, &v2).unwrap());
        }

        #[test]
        fn affine_inverse_round_trips((v, w) in kin(), ox in -9i64..9, ot in -9i64..9, x in -20i64..20, t in -20i64..20) {
            let f = FrameMap::from_kinematics(&v, &w, ConfigKind::Symmetric)
                .unwrap()
                .with_translation(int(ox), q(ot, 3));
            let e = EventPoint::new(q(x, 7), int(t));
            prop_assert_eq!(f.invert().apply(&f.apply(&e)), e);
        }
    }
}
