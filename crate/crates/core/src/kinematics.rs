//! Traces, per-body observables and inertia detection.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::frames::EventPoint;
use crate::lattice::{BodyRef, Configuration, Direction, Edge};
use crate::rational::{self, half, int, q, Rational};

/// Caps on simulated horizons and period searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_steps: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_steps: 1_000_000 }
    }
}

impl Limits {
    pub fn check(&self, what: &'static str, value: u64) -> Result<()> {
        if value > self.max_steps {
            return Err(Error::ResourceLimit {
                what,
                value,
                limit: self.max_steps,
            });
        }
        Ok(())
    }
}

/// Snapshots of a configuration at `t = 0..=horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    snapshots: Vec<Configuration>,
}

pub fn simulate(config: &Configuration, horizon: u64) -> Result<Trace> {
    simulate_with(config, horizon, &Limits::default())
}

pub fn simulate_with(config: &Configuration, horizon: u64, limits: &Limits) -> Result<Trace> {
    limits.check("horizon", horizon)?;
    let mut snapshots = Vec::with_capacity(horizon as usize + 1);
    snapshots.push(config.clone());
    for _ in 0..horizon {
        let next = snapshots.last().expect("non-empty").step();
        snapshots.push(next);
    }
    Ok(Trace { snapshots })
}

/// Series of a single elementary body. `v` and `w` have `horizon` entries,
/// the others `horizon + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryObservables {
    pub x: Vec<i64>,
    pub v: Vec<i64>,
    pub w: Vec<i64>,
    pub tau: Vec<i64>,
    pub s: Vec<i64>,
}

/// Series of a collective body, in exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyObservables {
    pub members: Vec<BodyRef>,
    pub x: Vec<Rational>,
    pub v: Vec<Rational>,
    pub w: Vec<Rational>,
    pub tau: Vec<Rational>,
}

/// Recurrence of the ambient configuration: `step^period = shift(displacement)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InertialSignature {
    pub period: u64,
    pub displacement: i64,
    pub v: Rational,
    pub w: Rational,
}

impl InertialSignature {
    pub fn is_light_like(&self) -> bool {
        self.w.is_zero()
    }
}

/// Normalizes a member list to a sorted set and checks every entry resolves.
pub(crate) fn member_set(config: &Configuration, members: &[BodyRef]) -> Result<Vec<BodyRef>> {
    if members.is_empty() {
        return Err(Error::EmptyBody);
    }
    let mut set = members.to_vec();
    set.sort();
    set.dedup();
    for &b in &set {
        config.resolve(b)?;
    }
    Ok(set)
}

impl Trace {
    pub fn horizon(&self) -> u64 {
        self.snapshots.len() as u64 - 1
    }

    pub fn snapshots(&self) -> &[Configuration] {
        &self.snapshots
    }

    pub fn snapshot(&self, t: u64) -> Option<&Configuration> {
        self.snapshots.get(t as usize)
    }

    pub fn initial(&self) -> &Configuration {
        &self.snapshots[0]
    }

    fn lift(&self, body: BodyRef) -> i64 {
        body.copy * self.initial().period().unwrap_or(0)
    }

    /// Edge of `body` at integer time `t`.
    pub fn edge(&self, body: BodyRef, t: u64) -> Result<Edge> {
        let idx = self.initial().resolve(body)?;
        let snap = self.snapshot(t).ok_or_else(|| Error::OutOfHorizon {
            t: t.to_string(),
            lo: "0".into(),
            hi: self.horizon().to_string(),
        })?;
        Ok(snap.placements()[idx].edge.shifted(self.lift(body)))
    }

    /// Whether placement `idx` turns between `t` and `t + 1`.
    pub fn turned(&self, idx: usize, t: u64) -> bool {
        let a = self.snapshots[t as usize].placements()[idx].edge;
        let b = self.snapshots[t as usize + 1].placements()[idx].edge;
        b == a.contrary()
    }

    pub fn elementary_observables(&self, body: BodyRef) -> Result<ElementaryObservables> {
        let idx = self.initial().resolve(body)?;
        let lift = self.lift(body);
        let x: Vec<i64> = self
            .snapshots
            .iter()
            .map(|c| c.placements()[idx].edge.x + lift)
            .collect();
        let v: Vec<i64> = x.windows(2).map(|p| p[1] - p[0]).collect();
        let w: Vec<i64> = (0..self.horizon()).map(|t| self.turned(idx, t) as i64).collect();
        let mut tau = vec![0];
        let mut s = vec![0];
        for t in 0..v.len() {
            tau.push(tau[t] + w[t]);
            s.push(s[t] + v[t].abs());
        }
        Ok(ElementaryObservables { x, v, w, tau, s })
    }

    pub fn body_observables(&self, members: &[BodyRef]) -> Result<BodyObservables> {
        let members = member_set(self.initial(), members)?;
        let n = members.len() as i64;
        let series = members
            .iter()
            .map(|&b| self.elementary_observables(b))
            .collect::<Result<Vec<_>>>()?;
        let len = self.snapshots.len();
        let x: Vec<Rational> = (0..len).map(|t| q(series.iter().map(|o| o.x[t]).sum(), n)).collect();
        let v: Vec<Rational> = x.windows(2).map(|p| &p[1] - &p[0]).collect();
        let w: Vec<Rational> = (0..len - 1)
            .map(|t| q(series.iter().map(|o| o.w[t]).sum(), n))
            .collect();
        let mut tau = vec![Rational::zero()];
        for wt in &w {
            let next = tau.last().expect("non-empty") + wt;
            tau.push(next);
        }
        Ok(BodyObservables { members, x, v, w, tau })
    }

    /// Lower and upper end of the continuous time window, `[-1/2, T + 1/2]`.
    pub fn window(&self) -> (Rational, Rational) {
        (-half(), int(self.horizon() as i64) + half())
    }

    fn out_of_window(&self, t: &Rational) -> Error {
        let (lo, hi) = self.window();
        Error::OutOfHorizon {
            t: rational::short(t),
            lo: rational::short(&lo),
            hi: rational::short(&hi),
        }
    }

    /// Integer step whose half-open neighbourhood `(t - 1/2, t + 1/2]` holds
    /// `t_real`. The point `-1/2` is attached to step 0 by continuity.
    pub(crate) fn step_of(&self, t_real: &Rational) -> Result<u64> {
        let (lo, hi) = self.window();
        if t_real < &lo || t_real > &hi {
            return Err(self.out_of_window(t_real));
        }
        let t = rational::ceil_i64(&(t_real - half()));
        Ok(t.max(0) as u64)
    }

    /// `x_b(t + Δ) = x_b(t) + r(b(t)) Δ` for `-1/2 < Δ <= 1/2`.
    pub fn continuous_position(&self, body: BodyRef, t_real: &Rational) -> Result<Rational> {
        let t = self.step_of(t_real)?;
        let edge = self.edge(body, t)?;
        let delta = t_real - int(t as i64);
        Ok(int(edge.x) + int(edge.dir.sign()) * delta)
    }

    /// Breakpoints of the continuous world line on `[t1, t2]`. Consecutive
    /// points are joined by straight segments along `(1, 1)` or `(-1, 1)`.
    pub fn world_line(&self, body: BodyRef, t1: &Rational, t2: &Rational) -> Result<Vec<EventPoint>> {
        if t1 > t2 {
            return Err(Error::ReversedRange {
                t1: rational::short(t1),
                t2: rational::short(t2),
            });
        }
        let first = self.step_of(t1)?;
        let last = self.step_of(t2)?;
        let point =
            |t: &Rational| -> Result<EventPoint> { Ok(EventPoint::new(self.continuous_position(body, t)?, t.clone())) };
        let mut points = vec![point(t1)?];
        let mut prev: Direction = self.edge(body, first)?.dir;
        for k in first + 1..=last {
            let dir = self.edge(body, k)?.dir;
            let corner = int(k as i64) - half();
            if dir != prev && &corner > t1 && &corner < t2 {
                points.push(point(&corner)?);
            }
            prev = dir;
        }
        if t2 > t1 {
            points.push(point(t2)?);
        }
        Ok(points)
    }

    /// Inertial signature of `members` from the trace's initial configuration.
    pub fn inertial_signature(&self, members: &[BodyRef], p_max: u64) -> Result<Option<InertialSignature>> {
        detect_inertial(self.initial(), members, p_max)
    }
}

/// Smallest `p <= p_max` with `step^p(config) == shift(config, d)`, each body
/// returning to its own (lifted) identity.
pub fn detect_inertial(config: &Configuration, members: &[BodyRef], p_max: u64) -> Result<Option<InertialSignature>> {
    detect_inertial_with(config, members, p_max, &Limits::default())
}

pub fn detect_inertial_with(
    config: &Configuration,
    members: &[BodyRef],
    p_max: u64,
    limits: &Limits,
) -> Result<Option<InertialSignature>> {
    limits.check("p_max", p_max)?;
    let members = member_set(config, members)?;
    let idx: Vec<usize> = members.iter().map(|&b| config.resolve(b)).collect::<Result<_>>()?;
    let mut current = config.clone();
    let mut turns: i64 = 0;
    for p in 1..=p_max {
        let next = current.step();
        turns += idx
            .iter()
            .filter(|&&i| next.placements()[i].edge == current.placements()[i].edge.contrary())
            .count() as i64;
        current = next;
        let d = current.placements()[0].edge.x - config.placements()[0].edge.x;
        if config.equals_shifted(&current, d) {
            let p_i = p as i64;
            return Ok(Some(InertialSignature {
                period: p,
                displacement: d,
                v: q(d, p_i),
                w: q(turns, members.len() as i64 * p_i),
            }));
        }
    }
    Ok(None)
}

/// `x_B(0)`, the mean initial coordinate of `members`.
pub fn initial_center(config: &Configuration, members: &[BodyRef]) -> Result<Rational> {
    let members = member_set(config, members)?;
    let mut sum = 0i64;
    for &b in &members {
        sum += config.edge_of(b)?.x;
    }
    Ok(q(sum, members.len() as i64))
}

/// True if every entry equals the first.
pub fn is_uniform(series: &[Rational]) -> bool {
    series.windows(2).all(|p| p[0] == p[1])
}

/// Budget check `w + |v| <= 1` for a collective step.
pub fn within_budget(v: &Rational, w: &Rational) -> bool {
    w >= &Rational::zero() && w + v.abs() <= int(1)
}
