//! External and internal state of bodies.
//!
//! Two bodies share an external state when one is a rigid lattice shift of
//! the other. They share an internal state (are affine isomorphic) when the
//! color-tagged coordinates of their parts, each measured in the body's own
//! inertial frame at some proper time, coincide as multisets.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::frames::{BodyFrame, EventPoint, FrameMap};
use crate::kinematics::{member_set, Trace};
use crate::lattice::{BodyRef, Color, Edge};
use crate::rational::{half, int, Rational};

/// Colored edges of `members` at time `t`, sorted.
fn colored_edges(trace: &Trace, members: &[BodyRef], t: u64) -> Result<Vec<(Color, Edge)>> {
    let members = member_set(trace.initial(), members)?;
    let mut out = Vec::with_capacity(members.len());
    for b in members {
        let color = trace
            .initial()
            .placement(b.id)
            .map(|p| p.color)
            .ok_or(Error::UnknownBody(b))?;
        out.push((color, trace.edge(b, t)?));
    }
    out.sort();
    Ok(out)
}

/// True iff some shift `k` maps A's parts at `t_a` onto B's parts at `t_b`
/// with colors and directions preserved.
pub fn external_state_equal(
    trace_a: &Trace,
    a: &[BodyRef],
    t_a: u64,
    trace_b: &Trace,
    b: &[BodyRef],
    t_b: u64,
) -> Result<bool> {
    let ea = colored_edges(trace_a, a, t_a)?;
    let eb = colored_edges(trace_b, b, t_b)?;
    if ea.len() != eb.len() {
        return Ok(false);
    }
    let min_x = |edges: &[(Color, Edge)]| edges.iter().map(|(_, e)| e.x).min().unwrap_or(0);
    let k = min_x(&eb) - min_x(&ea);
    let mut shifted: Vec<(Color, Edge)> = ea.into_iter().map(|(c, e)| (c, e.shifted(k))).collect();
    shifted.sort();
    Ok(shifted == eb)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotPart {
    pub body: BodyRef,
    pub color: Color,
    /// Coordinate in the body's frame at the snapshot's proper time.
    pub x: Rational,
    /// Absolute event where the part's world line meets that proper time.
    pub event: EventPoint,
}

/// Parts of a body in its own frame at one proper time.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSnapshot {
    pub members: Vec<BodyRef>,
    /// Absolute frame into the body's frame.
    pub frame: FrameMap,
    pub tau: Rational,
    pub parts: Vec<SnapshotPart>,
}

impl StateSnapshot {
    /// Mean frame coordinate of the parts.
    pub fn centroid(&self) -> Rational {
        let n = self.parts.len() as i64;
        self.parts.iter().fold(Rational::zero(), |acc, p| acc + &p.x) / int(n)
    }

    /// `(color, coordinate)` pairs sorted; ties keep member order.
    pub fn key(&self) -> Vec<(Color, Rational)> {
        let mut key: Vec<(Color, Rational)> = self.parts.iter().map(|p| (p.color, p.x.clone())).collect();
        key.sort();
        key
    }

    fn ordered_parts(&self) -> Vec<&SnapshotPart> {
        let mut parts: Vec<&SnapshotPart> = self.parts.iter().collect();
        parts.sort_by(|l, r| (l.color, &l.x).cmp(&(r.color, &r.x)));
        parts
    }
}

/// Absolute event where `body`'s world line reaches frame time `tau` under
/// `into_frame` (absolute -> body frame). Frame time grows strictly along
/// every world line because all segments are light-like and the frame is
/// time-like.
fn crossing(trace: &Trace, body: BodyRef, into_frame: &FrameMap, tau: &Rational) -> Result<EventPoint> {
    let a = into_frame.linear();
    let ot = &into_frame.translation().t;
    let frame_time = |x: &Rational, s: &Rational| &a[1][0] * x + &a[1][1] * s + ot;
    let at = |s: Rational| -> Result<Rational> {
        let x = trace.continuous_position(body, &s)?;
        Ok(frame_time(&x, &s))
    };
    let horizon = trace.horizon();
    let (lo, hi) = trace.window();
    if &at(lo.clone())? > tau || &at(hi.clone())? < tau {
        return Err(Error::OutOfHorizon {
            t: format!("proper time {}", crate::rational::short(tau)),
            lo: crate::rational::short(&lo),
            hi: crate::rational::short(&hi),
        });
    }
    // smallest step k whose piece ends at or after tau
    let (mut left, mut right) = (0u64, horizon);
    while left < right {
        let mid = (left + right) / 2;
        if &at(int(mid as i64) + half())? >= tau {
            right = mid;
        } else {
            left = mid + 1;
        }
    }
    let k = left;
    let edge = trace.edge(body, k)?;
    let r = int(edge.dir.sign());
    let kq = int(k as i64);
    let slope = &a[1][0] * &r + &a[1][1];
    let g_k = frame_time(&int(edge.x), &kq);
    let s = &kq + (tau - g_k) / slope;
    let x = int(edge.x) + r * (&s - &kq);
    Ok(EventPoint::new(x, s))
}

fn snapshot_in(trace: &Trace, frame: &BodyFrame, tau: &Rational) -> Result<StateSnapshot> {
    let into = frame.to_absolute.invert();
    let mut parts = Vec::with_capacity(frame.members.len());
    for &body in &frame.members {
        let color = trace
            .initial()
            .placement(body.id)
            .map(|p| p.color)
            .ok_or(Error::UnknownBody(body))?;
        let event = crossing(trace, body, &into, tau)?;
        let x = into.apply(&event).x;
        parts.push(SnapshotPart { body, color, x, event });
    }
    Ok(StateSnapshot {
        members: frame.members.clone(),
        frame: into,
        tau: tau.clone(),
        parts,
    })
}

/// Frame coordinates of every part of `members` at proper time `tau`.
pub fn state_snapshot(trace: &Trace, members: &[BodyRef], tau: &Rational, p_max: u64) -> Result<StateSnapshot> {
    let frame = BodyFrame::new(trace, members, p_max)?;
    snapshot_in(trace, &frame, tau)
}

/// A matching of two bodies' parts at proper times `tau_a`, `tau_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsoWitness {
    pub pairs: Vec<(BodyRef, BodyRef)>,
    pub tau_a: Rational,
    pub tau_b: Rational,
    /// `L_BA`: B's frame into A's frame.
    pub frame_b_to_a: FrameMap,
    pub coordinates: Vec<(Color, Rational)>,
}

/// Proper-time samples over one recurrence of the body: `2p` points spaced
/// by `w/2` (the body's proper time over half an absolute step), shifted by
/// whole proper periods until every sample lies inside the trace.
fn proper_time_grid(trace: &Trace, frame: &BodyFrame) -> Result<Vec<StateSnapshot>> {
    let sig = &frame.signature;
    let step = &sig.w * half();
    let proper_period = &sig.w * int(sig.period as i64);
    let count = 2 * sig.period;
    let mut last_err = None;
    for m in 0..=trace.horizon() / sig.period.max(1) {
        let base = &proper_period * int(m as i64);
        let end = &base + &step * int(count as i64 - 1);
        match (snapshot_in(trace, frame, &base), snapshot_in(trace, frame, &end)) {
            (Ok(_), Ok(_)) => {
                return (0..count)
                    .map(|k| snapshot_in(trace, frame, &(&base + &step * int(k as i64))))
                    .collect();
            }
            (Err(e), _) | (_, Err(e)) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or(Error::OutOfHorizon {
        t: "proper-time grid".into(),
        lo: "0".into(),
        hi: trace.horizon().to_string(),
    }))
}

/// Searches one proper period of each body for a pair of proper times at
/// which the colored frame coordinates coincide.
pub fn affine_isomorphic(
    trace_a: &Trace,
    a: &[BodyRef],
    trace_b: &Trace,
    b: &[BodyRef],
    p_max: u64,
) -> Result<Option<IsoWitness>> {
    let fa = BodyFrame::new(trace_a, a, p_max)?;
    let fb = BodyFrame::new(trace_b, b, p_max)?;
    if fa.members.len() != fb.members.len() {
        return Ok(None);
    }
    let grid_a = proper_time_grid(trace_a, &fa)?;
    let grid_b = proper_time_grid(trace_b, &fb)?;
    let keys_b: Vec<Vec<(Color, Rational)>> = grid_b.iter().map(StateSnapshot::key).collect();
    for sa in &grid_a {
        let key_a = sa.key();
        if let Some(j) = keys_b.iter().position(|kb| kb == &key_a) {
            let sb = &grid_b[j];
            let pairs = sa
                .ordered_parts()
                .into_iter()
                .zip(sb.ordered_parts())
                .map(|(pa, pb)| (pa.body, pb.body))
                .collect();
            return Ok(Some(IsoWitness {
                pairs,
                tau_a: sa.tau.clone(),
                tau_b: sb.tau.clone(),
                frame_b_to_a: fb.map_into(&fa),
                coordinates: key_a,
            }));
        }
    }
    Ok(None)
}
