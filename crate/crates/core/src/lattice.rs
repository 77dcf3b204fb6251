//! The directed-edge lattice, colored elementary bodies and the synchronous
//! update rule.
//!
//! Every integer coordinate `x` carries two edges, `x^+` and `x^-`. A body on
//! `x^i` reads the per-color counts of its own edge and of the opposite edge
//! `(x+i)^-i`, then either moves straight to `(x+i)^i` or turns onto the
//! contrary edge `x^-i`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Automaton color, numbered from 1.
pub type Color = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Minus,
    Plus,
}

impl Direction {
    pub fn from_sign(sign: i64) -> Result<Self> {
        match sign {
            1 => Ok(Direction::Plus),
            -1 => Ok(Direction::Minus),
            other => Err(Error::InvalidDirection(other)),
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            Direction::Plus => 1,
            Direction::Minus => -1,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Plus => Direction::Minus,
            Direction::Minus => Direction::Plus,
        }
    }
}

impl Serialize for Direction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.sign())
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let sign = i64::deserialize(d)?;
        Direction::from_sign(sign).map_err(serde::de::Error::custom)
    }
}

/// A lattice edge `x^dir`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub x: i64,
    pub dir: Direction,
}

impl Edge {
    pub fn new(x: i64, dir: i64) -> Result<Self> {
        Ok(Edge {
            x,
            dir: Direction::from_sign(dir)?,
        })
    }

    pub fn plus(x: i64) -> Self {
        Edge {
            x,
            dir: Direction::Plus,
        }
    }

    pub fn minus(x: i64) -> Self {
        Edge {
            x,
            dir: Direction::Minus,
        }
    }

    /// The edge this one faces: `(x+i)^-i`.
    pub fn opposite(self) -> Self {
        Edge {
            x: self.x + self.dir.sign(),
            dir: self.dir.reversed(),
        }
    }

    /// Same coordinate, reversed direction: `x^-i`.
    pub fn contrary(self) -> Self {
        Edge {
            x: self.x,
            dir: self.dir.reversed(),
        }
    }

    /// Where a straight move leads: `(x+i)^i`.
    pub fn advanced(self) -> Self {
        Edge {
            x: self.x + self.dir.sign(),
            dir: self.dir,
        }
    }

    pub fn shifted(self, k: i64) -> Self {
        Edge {
            x: self.x + k,
            dir: self.dir,
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.dir {
            Direction::Plus => '+',
            Direction::Minus => '-',
        };
        write!(f, "{}^{}", self.x, sign)
    }
}

/// Identity of a body, lifted to a particular periodic copy.
///
/// In a finite configuration `copy` is always 0. In a spatially periodic one,
/// copy `m` of placement `id` sits `m * period` to the right of the stored
/// representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BodyRef {
    pub id: u32,
    pub copy: i64,
}

impl BodyRef {
    pub fn new(id: u32) -> Self {
        BodyRef { id, copy: 0 }
    }

    pub fn copy(id: u32, copy: i64) -> Self {
        BodyRef { id, copy }
    }
}

impl From<u32> for BodyRef {
    fn from(id: u32) -> Self {
        BodyRef::new(id)
    }
}

impl fmt::Display for BodyRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.copy == 0 {
            write!(f, "{}", self.id)
        } else {
            write!(f, "{}@{}", self.id, self.copy)
        }
    }
}

/// Per-color occupancy of an edge (`p`) and of its opposite edge (`q`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NeighborhoodState {
    pub p: Vec<u32>,
    pub q: Vec<u32>,
}

impl NeighborhoodState {
    pub fn empty(colors: usize) -> Self {
        NeighborhoodState {
            p: vec![0; colors],
            q: vec![0; colors],
        }
    }

    pub fn opposite_is_empty(&self) -> bool {
        self.q.iter().all(|&n| n == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// The body's own edge.
    P,
    /// The opposite edge.
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
}

impl CmpOp {
    fn holds(self, lhs: u32, rhs: u32) -> bool {
        match self {
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
        }
    }
}

/// `count(side, color) op value`; with `color` absent the count is summed over
/// all colors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub side: Side,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Color>,
    pub op: CmpOp,
    pub value: u32,
}

impl Comparison {
    fn count(&self, ns: &NeighborhoodState) -> u32 {
        let counts = match self.side {
            Side::P => &ns.p,
            Side::Q => &ns.q,
        };
        match self.color {
            Some(c) => counts.get(c as usize - 1).copied().unwrap_or(0),
            None => counts.iter().sum(),
        }
    }

    pub fn holds(&self, ns: &NeighborhoodState) -> bool {
        self.op.holds(self.count(ns), self.value)
    }
}

/// Conjunction of comparisons.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Clause(pub Vec<Comparison>);

impl Clause {
    pub fn holds(&self, ns: &NeighborhoodState) -> bool {
        self.0.iter().all(|c| c.holds(ns))
    }

    /// True if some `q` comparison fails whenever the opposite edge is empty.
    fn needs_opposite(&self) -> bool {
        self.0
            .iter()
            .filter(|c| c.side == Side::Q)
            .any(|c| !c.op.holds(0, c.value))
    }
}

/// Arbitrary predicate supplied from code. Evaluation is always masked so it
/// never fires on an empty opposite edge.
#[derive(Clone)]
pub struct CustomRule(Arc<dyn Fn(&NeighborhoodState) -> bool + Send + Sync>);

impl fmt::Debug for CustomRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomRule(..)")
    }
}

impl PartialEq for CustomRule {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

/// The set of neighborhood states on which a body of one color turns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TurnRule {
    /// Turn iff the opposite edge holds at least one body.
    Standard,
    /// Turn iff any clause holds.
    Clauses(Vec<Clause>),
    #[serde(skip)]
    Custom(CustomRule),
}

impl TurnRule {
    pub fn standard() -> Self {
        TurnRule::Standard
    }

    /// Rejects clause sets that could fire with an empty opposite edge.
    pub fn clauses(clauses: Vec<Clause>) -> Result<Self> {
        let rule = TurnRule::Clauses(clauses);
        rule.check_vacuum(1)?;
        Ok(rule)
    }

    pub fn from_fn<F>(predicate: F) -> Self
    where
        F: Fn(&NeighborhoodState) -> bool + Send + Sync + 'static,
    {
        TurnRule::Custom(CustomRule(Arc::new(predicate)))
    }

    fn check_vacuum(&self, color: Color) -> Result<()> {
        if let TurnRule::Clauses(clauses) = self {
            if clauses.iter().any(|c| !c.needs_opposite()) {
                return Err(Error::RuleFiresInVacuum { color });
            }
        }
        Ok(())
    }

    pub fn validate(&self, color: Color, colors: u32) -> Result<()> {
        self.check_vacuum(color)?;
        if let TurnRule::Clauses(clauses) = self {
            for cmp in clauses.iter().flat_map(|c| c.0.iter()) {
                if let Some(c) = cmp.color {
                    if c == 0 || c > colors {
                        return Err(Error::InvalidColor { color: c, colors });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn turns(&self, ns: &NeighborhoodState) -> bool {
        if ns.opposite_is_empty() {
            return false;
        }
        match self {
            TurnRule::Standard => true,
            TurnRule::Clauses(clauses) => clauses.iter().any(|c| c.holds(ns)),
            TurnRule::Custom(f) => (f.0)(ns),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// Bodies on an otherwise empty infinite line.
    Finite,
    /// Placements describe one spatial period of an infinite configuration.
    Periodic(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Placement {
    pub id: u32,
    pub color: Color,
    pub edge: Edge,
}

/// An immutable placement of colored bodies together with the rules that
/// drive them.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    topology: Topology,
    placements: Vec<Placement>,
    rules: Arc<Vec<TurnRule>>,
}

impl Configuration {
    /// `rules[c - 1]` drives color `c`.
    pub fn new(topology: Topology, placements: Vec<Placement>, rules: Vec<TurnRule>) -> Result<Self> {
        if let Topology::Periodic(0) = topology {
            return Err(Error::InvalidPeriod);
        }
        let colors = rules.len() as u32;
        for (i, rule) in rules.iter().enumerate() {
            rule.validate(i as Color + 1, colors)?;
        }
        let mut seen = std::collections::HashSet::new();
        for p in &placements {
            if p.color == 0 || p.color > colors {
                return Err(Error::InvalidColor { color: p.color, colors });
            }
            if !seen.insert(p.id) {
                return Err(Error::DuplicateBody(p.id));
            }
        }
        Ok(Configuration {
            topology,
            placements,
            rules: Arc::new(rules),
        })
    }

    /// Single-color configuration under the standard rule.
    pub fn standard(topology: Topology, edges: impl IntoIterator<Item = (u32, Edge)>) -> Result<Self> {
        let placements = edges
            .into_iter()
            .map(|(id, edge)| Placement { id, color: 1, edge })
            .collect();
        Configuration::new(topology, placements, vec![TurnRule::Standard])
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn period(&self) -> Option<i64> {
        match self.topology {
            Topology::Finite => None,
            Topology::Periodic(l) => Some(l as i64),
        }
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    pub fn rules(&self) -> &[TurnRule] {
        &self.rules
    }

    pub fn colors(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.placements.iter().position(|p| p.id == id)
    }

    pub fn placement(&self, id: u32) -> Option<&Placement> {
        self.placements.iter().find(|p| p.id == id)
    }

    /// Checks that `body` names an existing placement and a legal copy.
    pub fn resolve(&self, body: BodyRef) -> Result<usize> {
        let idx = self.index_of(body.id).ok_or(Error::UnknownBody(body))?;
        if body.copy != 0 && self.period().is_none() {
            return Err(Error::CopyInFiniteTopology(body));
        }
        Ok(idx)
    }

    /// Edge of a (possibly lifted) body.
    pub fn edge_of(&self, body: BodyRef) -> Result<Edge> {
        let idx = self.resolve(body)?;
        Ok(self.placements[idx]
            .edge
            .shifted(body.copy * self.period().unwrap_or(0)))
    }

    fn key(&self, e: Edge) -> (i64, Direction) {
        match self.period() {
            Some(l) => (e.x.rem_euclid(l), e.dir),
            None => (e.x, e.dir),
        }
    }

    fn occupancy(&self) -> HashMap<(i64, Direction), Vec<u32>> {
        let mut occ: HashMap<(i64, Direction), Vec<u32>> = HashMap::new();
        let colors = self.colors();
        for p in &self.placements {
            occ.entry(self.key(p.edge)).or_insert_with(|| vec![0; colors])[p.color as usize - 1] += 1;
        }
        occ
    }

    fn state_from(&self, occ: &HashMap<(i64, Direction), Vec<u32>>, e: Edge) -> NeighborhoodState {
        let colors = self.colors();
        let get = |edge: Edge| occ.get(&self.key(edge)).cloned().unwrap_or_else(|| vec![0; colors]);
        NeighborhoodState {
            p: get(e),
            q: get(e.opposite()),
        }
    }

    /// Per-color counts on `e` and on its opposite edge.
    pub fn neighborhood_state(&self, e: Edge) -> NeighborhoodState {
        self.state_from(&self.occupancy(), e)
    }

    /// Whether the body at `placements()[idx]` turns on the next step.
    pub fn turns(&self, idx: usize) -> bool {
        let p = &self.placements[idx];
        let ns = self.neighborhood_state(p.edge);
        self.rules[p.color as usize - 1].turns(&ns)
    }

    /// One synchronous update; all decisions read the current configuration.
    pub fn step(&self) -> Configuration {
        let occ = self.occupancy();
        let placements = self
            .placements
            .iter()
            .map(|p| {
                let ns = self.state_from(&occ, p.edge);
                let edge = if self.rules[p.color as usize - 1].turns(&ns) {
                    p.edge.contrary()
                } else {
                    p.edge.advanced()
                };
                Placement { edge, ..*p }
            })
            .collect();
        Configuration {
            topology: self.topology,
            placements,
            rules: Arc::clone(&self.rules),
        }
    }

    /// Translates every edge by `k`; directions are unchanged.
    pub fn shift(&self, k: i64) -> Configuration {
        let placements = self
            .placements
            .iter()
            .map(|p| Placement {
                edge: p.edge.shifted(k),
                ..*p
            })
            .collect();
        Configuration {
            topology: self.topology,
            placements,
            rules: Arc::clone(&self.rules),
        }
    }

    /// True if every body of `self`, shifted by `d`, sits on its own edge in
    /// `other`.
    pub fn equals_shifted(&self, other: &Configuration, d: i64) -> bool {
        self.placements.len() == other.placements.len()
            && self
                .placements
                .iter()
                .zip(&other.placements)
                .all(|(a, b)| a.id == b.id && a.color == b.color && a.edge.shifted(d) == b.edge)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn edges(c: &Configuration) -> Vec<Edge> {
        c.placements().iter().map(|p| p.edge).collect()
    }

    #[test]
    fn opposite_and_contrary_are_involutions() {
        for x in -3..3 {
            for e in [Edge::plus(x), Edge::minus(x)] {
                assert_eq!(e.opposite().opposite(), e);
                assert_eq!(e.contrary().contrary(), e);
            }
        }
        assert_eq!(Edge::plus(0).opposite(), Edge::minus(1));
        assert_eq!(Edge::minus(0).opposite(), Edge::plus(-1));
    }

    #[test]
    fn direction_must_be_unit() {
        assert_eq!(Edge::new(0, 2), Err(Error::InvalidDirection(2)));
        assert!(Edge::new(0, -1).is_ok());
    }

    #[test]
    fn neighborhood_of_example_configurations() {
        let ns = example1().neighborhood_state(Edge::plus(0));
        assert_eq!((ns.p, ns.q), (vec![1], vec![1]));

        let ns = example2().neighborhood_state(Edge::plus(2));
        assert_eq!((ns.p, ns.q), (vec![1], vec![0]));

        let empty = Configuration::standard(Topology::Finite, []).unwrap();
        let ns = empty.neighborhood_state(Edge::minus(7));
        assert_eq!((ns.p, ns.q), (vec![0], vec![0]));
    }

    #[test]
    fn periodic_counts_wrap_around() {
        // body 1 at 1^- is also seen at -1^- and 3^- by periodicity
        let c = example1();
        assert_eq!(c.neighborhood_state(Edge::minus(-1)).p, vec![1]);
        assert_eq!(c.neighborhood_state(Edge::plus(-2)).q, vec![1]);
    }

    #[test]
    fn multiset_occupancy_counts_colors() {
        let rules = vec![TurnRule::Standard, TurnRule::Standard];
        let c = Configuration::new(
            Topology::Finite,
            vec![
                Placement {
                    id: 0,
                    color: 1,
                    edge: Edge::plus(0),
                },
                Placement {
                    id: 1,
                    color: 2,
                    edge: Edge::plus(0),
                },
                Placement {
                    id: 2,
                    color: 2,
                    edge: Edge::plus(0),
                },
                Placement {
                    id: 3,
                    color: 1,
                    edge: Edge::minus(1),
                },
            ],
            rules,
        )
        .unwrap();
        let ns = c.neighborhood_state(Edge::plus(0));
        assert_eq!(ns.p, vec![1, 2]);
        assert_eq!(ns.q, vec![1, 0]);
    }

    #[test]
    fn example1_flips_every_body() {
        let c = example1();
        let next = c.step();
        assert_eq!(edges(&next), vec![Edge::minus(0), Edge::plus(1)]);
        assert_eq!(next.step(), c);
    }

    #[test]
    fn lone_body_streams_freely() {
        let mut c = Configuration::standard(Topology::Finite, [(0, Edge::plus(0))]).unwrap();
        for t in 1..=5 {
            c = c.step();
            assert_eq!(edges(&c), vec![Edge::plus(t)]);
        }
    }

    #[test]
    fn example2_recurs_shifted_by_one_after_three_steps() {
        let c0 = example2();
        let c1 = c0.step();
        assert_eq!(edges(&c1), vec![Edge::minus(0), Edge::plus(1), Edge::plus(3)]);
        let c2 = c1.step();
        assert_eq!(edges(&c2), vec![Edge::plus(0), Edge::plus(2), Edge::minus(3)]);
        let c3 = c2.step();
        assert_eq!(c3, c0.shift(1));
    }

    #[test]
    fn shift_identity_and_inverse() {
        let c = example2();
        assert_eq!(c.shift(0), c);
        assert_eq!(c.shift(3).shift(-3), c);
    }

    #[test]
    fn rejects_malformed_configurations() {
        let dup = Configuration::standard(Topology::Finite, [(0, Edge::plus(0)), (0, Edge::plus(1))]);
        assert_eq!(dup, Err(Error::DuplicateBody(0)));
        let color = Configuration::new(
            Topology::Finite,
            vec![Placement {
                id: 0,
                color: 2,
                edge: Edge::plus(0),
            }],
            vec![TurnRule::Standard],
        );
        assert_eq!(color, Err(Error::InvalidColor { color: 2, colors: 1 }));
        assert_eq!(
            Configuration::standard(Topology::Periodic(0), []),
            Err(Error::InvalidPeriod)
        );
    }

    #[test]
    fn clause_rules_must_need_the_opposite_edge() {
        let p_only = Clause(vec![Comparison {
            side: Side::P,
            color: None,
            op: CmpOp::Ge,
            value: 1,
        }]);
        assert!(TurnRule::clauses(vec![p_only.clone()]).is_err());
        let q_le = Clause(vec![Comparison {
            side: Side::Q,
            color: Some(1),
            op: CmpOp::Le,
            value: 2,
        }]);
        assert!(TurnRule::clauses(vec![q_le]).is_err());
        let mut ok = p_only;
        ok.0.push(Comparison {
            side: Side::Q,
            color: Some(1),
            op: CmpOp::Ge,
            value: 2,
        });
        let rule = TurnRule::clauses(vec![ok]).unwrap();
        assert!(rule.turns(&NeighborhoodState { p: vec![1], q: vec![2] }));
        assert!(!rule.turns(&NeighborhoodState { p: vec![1], q: vec![1] }));
    }

    #[test]
    fn custom_rules_are_masked_in_vacuum() {
        let always = TurnRule::from_fn(|_| true);
        assert!(!always.turns(&NeighborhoodState { p: vec![3], q: vec![0] }));
        assert!(always.turns(&NeighborhoodState { p: vec![0], q: vec![1] }));
    }

    #[test]
    fn rule_serialization_shape() {
        let json = serde_json::to_string(&TurnRule::Standard).unwrap();
        assert_eq!(json, "\"standard\"");
        let rule: TurnRule =
            serde_json::from_str(r#"{"clauses": [[{"side": "q", "color": 1, "op": ">=", "value": 2}]]}"#).unwrap();
        assert!(matches!(rule, TurnRule::Clauses(ref c) if c.len() == 1));
    }
}
