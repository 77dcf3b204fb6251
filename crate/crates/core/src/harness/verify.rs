//! End-to-end verification of a scenario.
//!
//! Every identity is checked by exact rational equality. Failures (including
//! errors from simulation or frame construction) become failed records; the
//! verifier never aborts half-way.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::frames::{length_in_frame, velocity_add, BodyFrame, ConfigKind, EventPoint, FrameMap, RelativeKinematics};
use crate::harness::scenario::{Run, Scenario, ABSOLUTE};
use crate::isostate::{affine_isomorphic, state_snapshot};
use crate::kinematics::{within_budget, Limits, Trace};
use crate::lattice::BodyRef;
use crate::rational::{self, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub subject: String,
    /// The identity being checked.
    pub identity: String,
    pub passed: bool,
    pub values: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

impl CheckRecord {
    fn new(check: &str, subject: impl Into<String>, identity: &str) -> Self {
        CheckRecord {
            check: check.to_string(),
            subject: subject.into(),
            identity: identity.to_string(),
            passed: true,
            values: BTreeMap::new(),
            failures: Vec::new(),
        }
    }

    fn value(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.values.insert(key.to_string(), value.to_string());
        self
    }

    fn q(&mut self, key: &str, value: &Rational) -> &mut Self {
        self.value(key, rational::short(value))
    }

    fn fail(&mut self, why: impl Into<String>) -> &mut Self {
        self.passed = false;
        // long failure lists carry no extra information
        if self.failures.len() < 8 {
            self.failures.push(why.into());
        }
        self
    }

    fn expect(&mut self, ok: bool, why: impl FnOnce() -> String) -> &mut Self {
        if !ok {
            self.fail(why());
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub passed: bool,
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed)
    }

    pub fn find(&self, check: &str, subject: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.check == check && r.subject == subject)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.records {
            let status = if r.passed { "PASS" } else { "FAIL" };
            write!(f, "{status}  {:<20} {:<28} {}", r.check, r.subject, r.identity)?;
            for (k, v) in &r.values {
                write!(f, "  {k}={v}")?;
            }
            writeln!(f)?;
            for why in &r.failures {
                writeln!(f, "      - {why}")?;
            }
        }
        let failed = self.failed().count();
        write!(
            f,
            "{}: {} checks, {} failed => {}",
            self.scenario,
            self.records.len(),
            failed,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

pub fn run_verification(scenario: &Scenario) -> VerificationReport {
    run_verification_with(scenario, &Limits::default())
}

pub fn run_verification_with(scenario: &Scenario, limits: &Limits) -> VerificationReport {
    let mut records = Vec::new();
    match Run::new(scenario.clone(), limits) {
        Ok(run) => Verifier::new(&run, &mut records).run(),
        Err(e) => {
            let mut r = CheckRecord::new("simulate", &scenario.name, "snapshots[t+1] = step(snapshots[t])");
            r.fail(e.to_string());
            records.push(r);
        }
    }
    VerificationReport {
        scenario: scenario.name.clone(),
        passed: records.iter().all(|r| r.passed),
        records,
    }
}

struct Framed<'a> {
    name: String,
    trace: Option<&'a Trace>,
    frame: BodyFrame,
}

struct Verifier<'a, 'r> {
    run: &'a Run,
    out: &'r mut Vec<CheckRecord>,
}

impl<'a, 'r> Verifier<'a, 'r> {
    fn new(run: &'a Run, out: &'r mut Vec<CheckRecord>) -> Self {
        Verifier { run, out }
    }

    fn scenario(&self) -> &Scenario {
        &self.run.scenario
    }

    fn run(mut self) {
        for (w, trace) in self.run.traces.iter().enumerate() {
            let name = self.scenario().worlds[w].name.clone();
            self.unit_budget(&name, trace);
        }
        let mut framed = vec![Framed {
            name: ABSOLUTE.to_string(),
            trace: None,
            frame: BodyFrame::absolute(),
        }];
        let names: Vec<String> = self.scenario().bodies.iter().map(|b| b.name.clone()).collect();
        for name in &names {
            match self.run.body(name) {
                Ok((trace, members)) => {
                    self.light_speed(name, trace, &members);
                    if let Some(frame) = self.inertia(name, trace, &members) {
                        framed.push(Framed {
                            name: name.clone(),
                            trace: Some(trace),
                            frame,
                        });
                    }
                }
                Err(e) => {
                    let mut r = CheckRecord::new("body", name.clone(), "members resolve");
                    r.fail(e.to_string());
                    self.out.push(r);
                }
            }
        }
        self.pairs(&framed);
        self.triples(&framed);
        self.lengths(&framed);
        self.expected_frames(&framed);
        self.isomorphisms();
    }

    fn unit_budget(&mut self, world: &str, trace: &Trace) {
        let mut budget = CheckRecord::new("unit-budget", world, "w_b(t) + |x_b(t+1) - x_b(t)| = 1");
        let mut clock = CheckRecord::new("clock-identity", world, "t = tau_b(t) - tau_b(0) + s_b(t)");
        let mut steps = 0u64;
        for p in trace.initial().placements() {
            let b = BodyRef::new(p.id);
            let obs = match trace.elementary_observables(b) {
                Ok(o) => o,
                Err(e) => {
                    budget.fail(e.to_string());
                    continue;
                }
            };
            for t in 0..obs.v.len() {
                steps += 1;
                budget.expect(obs.w[t] + obs.v[t].abs() == 1, || {
                    format!("body {b} at t={t}: w={} dx={}", obs.w[t], obs.v[t])
                });
            }
            for t in 0..obs.x.len() {
                clock.expect(t as i64 == obs.tau[t] - obs.tau[0] + obs.s[t], || {
                    format!("body {b} at t={t}: tau={} s={}", obs.tau[t], obs.s[t])
                });
            }
        }
        budget
            .value("bodies", trace.initial().placements().len())
            .value("steps", steps);
        clock
            .value("bodies", trace.initial().placements().len())
            .value("horizon", trace.horizon());
        self.out.push(budget);
        self.out.push(clock);
    }

    fn light_speed(&mut self, name: &str, trace: &Trace, members: &[BodyRef]) {
        let mut r = CheckRecord::new(
            "light-speed-freeze",
            name,
            "|v_B(t)| = 1 => w_B(t) = 0; w_B <= 1 - |v_B|",
        );
        match trace.body_observables(members) {
            Ok(obs) => {
                let mut at_light = 0;
                let mut max_v = Rational::zero();
                for (t, (v, w)) in obs.v.iter().zip(&obs.w).enumerate() {
                    if v.abs() > max_v {
                        max_v = v.abs();
                    }
                    if v.abs().is_one() {
                        at_light += 1;
                        r.expect(w.is_zero(), || format!("t={t}: |v|=1 but w={}", rational::short(w)));
                    }
                    r.expect(within_budget(v, w), || {
                        format!(
                            "t={t}: w={} exceeds 1-|v| with v={}",
                            rational::short(w),
                            rational::short(v)
                        )
                    });
                }
                r.value("steps_at_light_speed", at_light).q("max_abs_v", &max_v);
            }
            Err(e) => {
                r.fail(e.to_string());
            }
        }
        self.out.push(r);
    }

    /// Records the inertia check and returns the body's frame when it has one.
    fn inertia(&mut self, name: &str, trace: &Trace, members: &[BodyRef]) -> Option<BodyFrame> {
        let p_max = self.scenario().p_max;
        let mut r = CheckRecord::new("inertia", name, "step^p(config) = shift(config, d); v_B, w_B constant");
        let sig = match trace.inertial_signature(members, p_max) {
            Ok(Some(sig)) => sig,
            Ok(None) => {
                r.fail(format!("no recurrence within p_max={p_max}"));
                self.out.push(r);
                return None;
            }
            Err(e) => {
                r.fail(e.to_string());
                self.out.push(r);
                return None;
            }
        };
        r.value("p", sig.period)
            .value("d", sig.displacement)
            .q("v", &sig.v)
            .q("w", &sig.w);
        if let Ok(obs) = trace.body_observables(members) {
            for (t, v) in obs.v.iter().enumerate() {
                r.expect(v == &sig.v, || {
                    format!(
                        "v_B({t}) = {} differs from {}",
                        rational::short(v),
                        rational::short(&sig.v)
                    )
                });
            }
            let p = sig.period as usize;
            r.expect(obs.w.len() >= p, || {
                format!("horizon {} is shorter than the period {p}", obs.w.len())
            });
            for (k, window) in obs.w.chunks_exact(p).enumerate() {
                let mean = window.iter().fold(Rational::zero(), |a, w| a + w) / int(p as i64);
                r.expect(mean == sig.w, || {
                    format!(
                        "period #{k}: mean w_B = {} differs from {}",
                        rational::short(&mean),
                        rational::short(&sig.w)
                    )
                });
            }
        }
        let frame = if sig.is_light_like() {
            r.value("frame", "none (light-like)");
            None
        } else {
            match BodyFrame::new(trace, members, p_max) {
                Ok(f) => Some(f),
                Err(e) => {
                    r.fail(e.to_string());
                    None
                }
            }
        };
        self.out.push(r);
        frame
    }

    fn pairs(&mut self, framed: &[Framed<'_>]) {
        for a in framed {
            for b in framed {
                if a.name == b.name {
                    continue;
                }
                let subject = format!("{} in {}", a.name, b.name);
                let map = a.frame.map_into(&b.frame);
                let rk = match RelativeKinematics::from_map(&map) {
                    Ok(rk) => rk,
                    Err(e) => {
                        let mut r = CheckRecord::new("frame-matrix", subject, "L_AB = [[1/w, v/w], [v/w, 1/w]]");
                        r.fail(e.to_string());
                        self.out.push(r);
                        continue;
                    }
                };
                self.frame_matrix(&subject, a, b, &map, &rk);
                self.eigendirections(&subject, &map, &rk);
                if let Some(trace) = a.trace {
                    self.linearity(&subject, trace, a, b, &rk);
                }
                if a.name < b.name {
                    self.reciprocity(a, b, &rk);
                }
            }
        }
    }

    fn frame_matrix(&mut self, subject: &str, a: &Framed<'_>, b: &Framed<'_>, map: &FrameMap, rk: &RelativeKinematics) {
        let mut r = CheckRecord::new("frame-matrix", subject, "L_AB = [[1/w, v/w], [v/w, 1/w]]");
        r.q("v", &rk.v)
            .q("w", &rk.w)
            .q("x0", &rk.x0)
            .q("tau0", &rk.tau0)
            .value("L", map);
        match FrameMap::from_kinematics(&rk.v, &rk.w, ConfigKind::Standard) {
            Ok(expected) => {
                r.expect(expected.linear() == map.linear(), || {
                    format!("rebuilt matrix {expected} differs")
                });
            }
            Err(e) => {
                r.fail(e.to_string());
            }
        }
        if b.name == ABSOLUTE {
            let sig = &a.frame.signature;
            r.expect(rk.v == sig.v && rk.w == sig.w, || {
                format!(
                    "frame algebra gives (v, w) = ({}, {}), trace gives ({}, {})",
                    rational::short(&rk.v),
                    rational::short(&rk.w),
                    rational::short(&sig.v),
                    rational::short(&sig.w)
                )
            });
        }
        self.out.push(r);
    }

    fn eigendirections(&mut self, subject: &str, map: &FrameMap, rk: &RelativeKinematics) {
        let mut r = CheckRecord::new(
            "eigendirections",
            subject,
            "L(1,1) = (1+v)/w (1,1), L(-1,1) = (1-v)/w (-1,1)",
        );
        match map.eigendirection_check() {
            Ok(check) => {
                let one = Rational::one();
                let want = ((&one + &rk.v) / &rk.w, (&one - &rk.v) / &rk.w);
                r.value("kind", check.kind)
                    .q("lambda_plus", &check.factors.0)
                    .q("lambda_minus", &check.factors.1);
                r.expect(check.kind == ConfigKind::Standard, || {
                    "map is not in standard configuration".into()
                });
                r.expect(check.factors == want, || "eigenvalues differ from (1±v)/w".into());
                r.expect(check.factors.0.is_positive() && check.factors.1.is_positive(), || {
                    "non-positive eigenvalue".into()
                });
            }
            Err(e) => {
                r.fail(e.to_string());
            }
        }
        self.out.push(r);
    }

    /// Samples A's average world line at multiples of its period and reads
    /// the events in B's frame.
    fn linearity(&mut self, subject: &str, trace: &Trace, a: &Framed<'_>, b: &Framed<'_>, rk: &RelativeKinematics) {
        let mut r = CheckRecord::new(
            "inertial-linearity",
            subject,
            "x_AB(tau_B) = x_AB(0) + v tau_B, tau_AB(tau_B) = tau_AB(0) + w tau_B",
        );
        let obs = match trace.body_observables(&a.frame.members) {
            Ok(o) => o,
            Err(e) => {
                r.fail(e.to_string());
                self.out.push(r);
                return;
            }
        };
        let into_b = b.frame.to_absolute.invert();
        let p = a.frame.signature.period as usize;
        let mut samples = 0;
        for t in (0..obs.x.len()).step_by(p.max(1)) {
            samples += 1;
            let e = into_b.apply(&EventPoint::new(obs.x[t].clone(), int(t as i64)));
            r.expect(e.x == rk.position_at(&e.t), || {
                format!(
                    "t={t}: x' = {} but x0 + v tau' = {}",
                    rational::short(&e.x),
                    rational::short(&rk.position_at(&e.t))
                )
            });
            r.expect(obs.tau[t] == rk.proper_time_at(&e.t), || {
                format!(
                    "t={t}: tau_A = {} but tau0 + w tau' = {}",
                    rational::short(&obs.tau[t]),
                    rational::short(&rk.proper_time_at(&e.t))
                )
            });
        }
        r.value("samples", samples).value("sample_step", p);
        self.out.push(r);
    }

    fn reciprocity(&mut self, a: &Framed<'_>, b: &Framed<'_>, rk_ab: &RelativeKinematics) {
        let subject = format!("{} <-> {}", a.name, b.name);
        let mut r = CheckRecord::new("reciprocity", subject, "v_AB = -v_BA, w_AB*w_BA = 1 - v^2");
        match b.frame.relative_to(&a.frame) {
            Ok(rk_ba) => {
                let one = Rational::one();
                r.q("v_AB", &rk_ab.v)
                    .q("w_AB", &rk_ab.w)
                    .q("v_BA", &rk_ba.v)
                    .q("w_BA", &rk_ba.w);
                r.expect(rk_ab.v == -&rk_ba.v, || "v_AB != -v_BA".into());
                r.expect(&rk_ab.w * &rk_ba.w == &one - &rk_ab.v * &rk_ab.v, || {
                    "w_AB*w_BA != 1 - v_AB^2".into()
                });
                r.expect(&rk_ab.w * &rk_ba.w == &one - &rk_ba.v * &rk_ba.v, || {
                    "w_AB*w_BA != 1 - v_BA^2".into()
                });
            }
            Err(e) => {
                r.fail(e.to_string());
            }
        }
        self.out.push(r);
    }

    fn triples(&mut self, framed: &[Framed<'_>]) {
        let mut r = CheckRecord::new(
            "velocity-addition",
            format!("{} frames", framed.len()),
            "v_CA = (v_BA + v_CB) / (1 + v_BA v_CB), L_CA = L_BA L_CB",
        );
        let mut triples = 0;
        for a in framed {
            for b in framed {
                for c in framed {
                    if a.name == b.name || b.name == c.name || a.name == c.name {
                        continue;
                    }
                    triples += 1;
                    let l_ba = b.frame.map_into(&a.frame);
                    let l_cb = c.frame.map_into(&b.frame);
                    let l_ca = c.frame.map_into(&a.frame);
                    let label = format!("A={} B={} C={}", a.name, b.name, c.name);
                    r.expect(l_ba.compose(&l_cb) == l_ca, || format!("{label}: L_BA L_CB != L_CA"));
                    let kin = |m: &FrameMap| m.kinematics().map(|(v, _)| v);
                    match (kin(&l_ba), kin(&l_cb), kin(&l_ca)) {
                        (Ok(v_ba), Ok(v_cb), Ok(v_ca)) => match velocity_add(&v_ba, &v_cb) {
                            Ok(sum) => {
                                r.expect(sum == v_ca, || {
                                    format!(
                                        "{label}: formula {} vs matrix {}",
                                        rational::short(&sum),
                                        rational::short(&v_ca)
                                    )
                                });
                            }
                            Err(e) => {
                                r.fail(format!("{label}: {e}"));
                            }
                        },
                        _ => {
                            r.fail(format!("{label}: invalid kinematics"));
                        }
                    }
                }
            }
        }
        r.value("triples", triples);
        self.out.push(r);
    }

    /// For every pair of bodies moving with the same absolute velocity,
    /// compares the separation read off two frames' geometry with
    /// `w_CA * Δx`.
    fn lengths(&mut self, framed: &[Framed<'_>]) {
        for (i, a) in framed.iter().enumerate() {
            for bb in &framed[i + 1..] {
                if a.trace.is_none() || bb.trace.is_none() || a.frame.signature.v != bb.frame.signature.v {
                    continue;
                }
                let subject = format!("{} & {}", a.name, bb.name);
                let mut r = CheckRecord::new("length", subject, "dx' = w_CA * dx for co-moving A, B");
                let b_in_a = match bb.frame.relative_to(&a.frame) {
                    Ok(k) => k,
                    Err(e) => {
                        r.fail(e.to_string());
                        self.out.push(r);
                        continue;
                    }
                };
                r.expect(b_in_a.v.is_zero(), || "co-moving bodies have v_BA != 0".into());
                r.q("dx", &b_in_a.x0.abs());
                let mut contraction = false;
                let mut extension = false;
                for c in framed {
                    if c.name == a.name || c.name == bb.name {
                        continue;
                    }
                    let (Ok(a_in_c), Ok(b_in_c), Ok(c_in_a)) = (
                        a.frame.relative_to(&c.frame),
                        bb.frame.relative_to(&c.frame),
                        c.frame.relative_to(&a.frame),
                    ) else {
                        r.fail(format!("observer {}: frame error", c.name));
                        continue;
                    };
                    r.expect(a_in_c.v == b_in_c.v, || format!("observer {}: v_AC != v_BC", c.name));
                    let measured = (&a_in_c.x0 - &b_in_c.x0).abs();
                    match length_in_frame(&Rational::zero(), &b_in_a.x0, &c_in_a.w) {
                        Ok(formula) => {
                            r.expect(formula == measured, || {
                                format!(
                                    "observer {}: measured {} vs w_CA*dx = {}",
                                    c.name,
                                    rational::short(&measured),
                                    rational::short(&formula)
                                )
                            });
                        }
                        Err(e) => {
                            r.fail(format!("observer {}: {e}", c.name));
                        }
                    }
                    contraction |= c_in_a.w < Rational::one();
                    extension |= c_in_a.w > Rational::one();
                    r.value(
                        &format!("dx'[{}]", c.name),
                        format!("{} (w_CA={})", rational::short(&measured), rational::short(&c_in_a.w)),
                    );
                }
                r.value("contraction_seen", contraction)
                    .value("extension_seen", extension);
                self.out.push(r);
            }
        }
    }

    fn expected_frames(&mut self, framed: &[Framed<'_>]) {
        let find = |n: &str| framed.iter().find(|f| f.name == n);
        for exp in self.scenario().expect.frames.clone() {
            let subject = format!("{} in {}", exp.body, exp.observer);
            let mut r = CheckRecord::new("expected-frame", subject, "declared v_AB, w_AB and L_AB");
            let (Some(a), Some(b)) = (find(&exp.body), find(&exp.observer)) else {
                r.fail("body has no inertial frame");
                self.out.push(r);
                continue;
            };
            let map = a.frame.map_into(&b.frame);
            match RelativeKinematics::from_map(&map) {
                Ok(rk) => {
                    r.q("v", &rk.v).q("w", &rk.w);
                    if let Some(v) = &exp.v {
                        r.expect(&rk.v == v, || {
                            format!("v = {}, expected {}", rational::short(&rk.v), rational::short(v))
                        });
                    }
                    if let Some(w) = &exp.w {
                        r.expect(&rk.w == w, || {
                            format!("w = {}, expected {}", rational::short(&rk.w), rational::short(w))
                        });
                    }
                }
                Err(e) => {
                    r.fail(e.to_string());
                }
            }
            if let Some(m) = &exp.matrix {
                r.value("L", &map);
                let parsed: Result<Vec<Rational>, _> = m.iter().flatten().map(|s| rational::parse(s)).collect();
                match parsed {
                    Ok(p) => {
                        let want = [[p[0].clone(), p[1].clone()], [p[2].clone(), p[3].clone()]];
                        r.expect(map.linear() == &want, || {
                            format!("matrix {map} differs from declared {m:?}")
                        });
                    }
                    Err(e) => {
                        r.fail(e.to_string());
                    }
                }
            }
            self.out.push(r);
        }
    }

    fn isomorphisms(&mut self) {
        let p_max = self.scenario().p_max;
        let expected: Vec<([String; 2], bool)> = self
            .scenario()
            .expect
            .isomorphic
            .iter()
            .map(|p| (p.clone(), true))
            .chain(self.scenario().expect.not_isomorphic.iter().map(|p| (p.clone(), false)))
            .collect();
        for ([a, b], want) in expected {
            let check = if want { "isomorphic" } else { "not-isomorphic" };
            let mut r = CheckRecord::new(
                check,
                format!("{a} ~ {b}"),
                "{(phi(b), x_bA(tau_A))} = {(b, x_bB(tau_B))}",
            );
            let outcome = self.run.body(&a).and_then(|(ta, ma)| {
                let (tb, mb) = self.run.body(&b)?;
                let w = affine_isomorphic(ta, &ma, tb, &mb, p_max)?;
                if let Some(w) = &w {
                    let sa = state_snapshot(ta, &ma, &w.tau_a, p_max)?;
                    let sb = state_snapshot(tb, &mb, &w.tau_b, p_max)?;
                    r.expect(sa.key() == sb.key(), || "witness coordinate multisets differ".into());
                    let color = |t: &Trace, id: u32| t.initial().placement(id).map(|p| p.color);
                    for (x, y) in &w.pairs {
                        r.expect(color(ta, x.id) == color(tb, y.id), || {
                            format!("pair {x} -> {y} changes color")
                        });
                    }
                    r.q("tau_A", &w.tau_a)
                        .q("tau_B", &w.tau_b)
                        .value("L_BA", &w.frame_b_to_a);
                    let coords: Vec<String> = w.coordinates.iter().map(|(_, x)| rational::short(x)).collect();
                    r.value("coordinates", coords.join(" "));
                }
                Ok(w.is_some())
            });
            match outcome {
                Ok(found) => {
                    r.value("witness", found);
                    r.expect(found == want, || {
                        if want {
                            "no witness found".into()
                        } else {
                            "unexpected witness".into()
                        }
                    });
                }
                Err(e) => {
                    r.fail(e.to_string());
                }
            }
            self.out.push(r);
        }
    }
}
