//! Scenario files.
//!
//! A scenario is a JSON document describing one or more independent worlds
//! (each a configuration with its own topology), the named bodies to study in
//! them, and optional expectations checked by the verifier:
//!
//! ```json
//! {
//!   "name": "example2",
//!   "colors": 1,
//!   "rules": ["standard"],
//!   "worlds": [
//!     { "name": "example2", "topology": { "periodic": 4 },
//!       "placements": [ { "id": 0, "color": 1, "x": 0, "dir": 1 } ] }
//!   ],
//!   "bodies": [ { "name": "A2", "world": "example2", "members": [0, { "id": 0, "copy": 1 }] } ],
//!   "horizon": 64,
//!   "p_max": 64
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{simulate_with, Limits, Trace};
use crate::lattice::{BodyRef, Configuration, Edge, Placement, Topology, TurnRule};
use crate::rational::{self, Rational};

pub const DEFAULT_P_MAX: u64 = 64;

fn default_p_max() -> u64 {
    DEFAULT_P_MAX
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementSpec {
    pub id: u32,
    pub color: u32,
    pub x: i64,
    pub dir: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldSpec {
    pub name: String,
    pub topology: Topology,
    pub placements: Vec<PlacementSpec>,
}

/// A body member: a bare id (copy 0) or an explicit periodic copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MemberSpec {
    Id(u32),
    Copy { id: u32, copy: i64 },
}

impl From<MemberSpec> for BodyRef {
    fn from(m: MemberSpec) -> Self {
        match m {
            MemberSpec::Id(id) => BodyRef::new(id),
            MemberSpec::Copy { id, copy } => BodyRef::copy(id, copy),
        }
    }
}

impl From<BodyRef> for MemberSpec {
    fn from(b: BodyRef) -> Self {
        if b.copy == 0 {
            MemberSpec::Id(b.id)
        } else {
            MemberSpec::Copy { id: b.id, copy: b.copy }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    pub name: String,
    /// Defaults to the first world.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub world: Option<String>,
    pub members: Vec<MemberSpec>,
}

/// Expected kinematics of `body` seen from `observer` (a body name or
/// `"absolute"`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameExpectation {
    pub body: String,
    pub observer: String,
    #[serde(default, with = "rational::serde_opt_str", skip_serializing_if = "Option::is_none")]
    pub v: Option<Rational>,
    #[serde(default, with = "rational::serde_opt_str", skip_serializing_if = "Option::is_none")]
    pub w: Option<Rational>,
    /// Expected linear part of the map from the body's frame into the
    /// observer's frame, as `p/q` strings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<[[String; 2]; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frames: Vec<FrameExpectation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub isomorphic: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub not_isomorphic: Vec<[String; 2]>,
}

impl Expectations {
    pub fn is_empty(&self) -> bool {
        self.frames.is_empty() && self.isomorphic.is_empty() && self.not_isomorphic.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub colors: u32,
    /// One rule per color, `rules[c - 1]` for color `c`.
    pub rules: Vec<TurnRule>,
    pub worlds: Vec<WorldSpec>,
    #[serde(default)]
    pub bodies: Vec<BodySpec>,
    pub horizon: u64,
    #[serde(default = "default_p_max")]
    pub p_max: u64,
    #[serde(default, skip_serializing_if = "Expectations::is_empty")]
    pub expect: Expectations,
}

/// Name of the pseudo-body for the absolute rest frame in expectations.
pub const ABSOLUTE: &str = "absolute";

const BUILTINS: &[(&str, &str)] = &[
    ("example1", include_str!("../../scenarios/example1.json")),
    ("example2", include_str!("../../scenarios/example2.json")),
    ("examples", include_str!("../../scenarios/examples.json")),
    ("free", include_str!("../../scenarios/free.json")),
];

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Scenario = serde_json::from_str(text)
            .map_err(|e| Error::Scenario(format!("parse error at line {}, column {}: {e}", e.line(), e.column())))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Bundled scenarios: `example1`, `example2`, `examples` (both examples
    /// side by side with expectations) and `free`.
    pub fn builtin(name: &str) -> Option<Self> {
        BUILTINS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Scenario::from_json(text).expect("bundled scenario is valid"))
    }

    pub fn builtin_names() -> impl Iterator<Item = &'static str> {
        BUILTINS.iter().map(|(n, _)| *n)
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w.name == name)
    }

    pub fn body(&self, name: &str) -> Option<&BodySpec> {
        self.bodies.iter().find(|b| b.name == name)
    }

    /// World index and member list of a named body.
    pub fn resolve_body(&self, name: &str) -> Result<(usize, Vec<BodyRef>)> {
        let body = self
            .body(name)
            .ok_or_else(|| Error::Scenario(format!("unknown body {name:?}")))?;
        let world = match &body.world {
            Some(w) => self
                .world_index(w)
                .ok_or_else(|| Error::Scenario(format!("body {name:?}: unknown world {w:?}")))?,
            None => 0,
        };
        Ok((world, body.members.iter().map(|&m| m.into()).collect()))
    }

    pub fn configuration(&self, world: usize) -> Result<Configuration> {
        let spec = self
            .worlds
            .get(world)
            .ok_or_else(|| Error::Scenario(format!("no world #{world}")))?;
        let mut placements = Vec::with_capacity(spec.placements.len());
        for (i, p) in spec.placements.iter().enumerate() {
            let edge = Edge::new(p.x, p.dir)
                .map_err(|e| Error::Scenario(format!("worlds[{world}].placements[{i}].dir: {e}")))?;
            placements.push(Placement {
                id: p.id,
                color: p.color,
                edge,
            });
        }
        Configuration::new(spec.topology, placements, self.rules.clone())
            .map_err(|e| Error::Scenario(format!("worlds[{world}] ({}): {e}", spec.name)))
    }

    pub fn validate(&self) -> Result<()> {
        if self.colors == 0 {
            return Err(Error::Scenario("colors: at least one color is required".into()));
        }
        if self.rules.len() != self.colors as usize {
            return Err(Error::Scenario(format!(
                "rules: {}",
                Error::RuleCount {
                    expected: self.colors as usize,
                    got: self.rules.len()
                }
            )));
        }
        for (i, rule) in self.rules.iter().enumerate() {
            rule.validate(i as u32 + 1, self.colors)
                .map_err(|e| Error::Scenario(format!("rules[{i}]: {e}")))?;
        }
        if self.worlds.is_empty() {
            return Err(Error::Scenario("worlds: at least one world is required".into()));
        }
        let mut configs = Vec::with_capacity(self.worlds.len());
        for (w, spec) in self.worlds.iter().enumerate() {
            if self.worlds[..w].iter().any(|o| o.name == spec.name) {
                return Err(Error::Scenario(format!("worlds[{w}].name: duplicate {:?}", spec.name)));
            }
            if spec.topology == Topology::Periodic(0) {
                return Err(Error::Scenario(format!(
                    "worlds[{w}].topology: period must be at least 1"
                )));
            }
            configs.push(self.configuration(w)?);
        }
        for (i, body) in self.bodies.iter().enumerate() {
            if self.bodies[..i].iter().any(|o| o.name == body.name) {
                return Err(Error::Scenario(format!("bodies[{i}].name: duplicate {:?}", body.name)));
            }
            if body.name == ABSOLUTE {
                return Err(Error::Scenario(format!("bodies[{i}].name: {ABSOLUTE:?} is reserved")));
            }
            if body.members.is_empty() {
                return Err(Error::Scenario(format!("bodies[{i}].members: {}", Error::EmptyBody)));
            }
            let (world, members) = self.resolve_body(&body.name)?;
            for m in members {
                configs[world]
                    .resolve(m)
                    .map_err(|e| Error::Scenario(format!("bodies[{i}].members: {e}")))?;
            }
        }
        let known = |n: &str| n == ABSOLUTE || self.body(n).is_some();
        for (i, f) in self.expect.frames.iter().enumerate() {
            for n in [&f.body, &f.observer] {
                if !known(n) {
                    return Err(Error::Scenario(format!("expect.frames[{i}]: unknown body {n:?}")));
                }
            }
            if let Some(m) = &f.matrix {
                for entry in m.iter().flatten() {
                    rational::parse(entry).map_err(|e| Error::Scenario(format!("expect.frames[{i}].matrix: {e}")))?;
                }
            }
        }
        for (key, pairs) in [
            ("isomorphic", &self.expect.isomorphic),
            ("not_isomorphic", &self.expect.not_isomorphic),
        ] {
            for (i, pair) in pairs.iter().enumerate() {
                for n in pair {
                    if self.body(n).is_none() {
                        return Err(Error::Scenario(format!("expect.{key}[{i}]: unknown body {n:?}")));
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Scenario::from_json(&text).map_err(|e| match e {
        Error::Scenario(msg) => Error::Scenario(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Loads a file if `arg` names one, otherwise a bundled scenario.
pub fn open_scenario(arg: &str) -> Result<Scenario> {
    if Path::new(arg).is_file() {
        return load_scenario(arg);
    }
    Scenario::builtin(arg).ok_or_else(|| {
        let names: Vec<&str> = Scenario::builtin_names().collect();
        Error::Scenario(format!(
            "{arg:?} is neither a file nor a bundled scenario ({})",
            names.join(", ")
        ))
    })
}

/// A scenario with every world simulated to the scenario horizon.
#[derive(Debug, Clone)]
pub struct Run {
    pub scenario: Scenario,
    pub traces: Vec<Trace>,
}

impl Run {
    pub fn new(scenario: Scenario, limits: &Limits) -> Result<Self> {
        Run::with_horizon(scenario.horizon, scenario, limits)
    }

    pub fn with_horizon(horizon: u64, scenario: Scenario, limits: &Limits) -> Result<Self> {
        limits.check("p_max", scenario.p_max)?;
        let traces = (0..scenario.worlds.len())
            .map(|w| simulate_with(&scenario.configuration(w)?, horizon, limits))
            .collect::<Result<_>>()?;
        Ok(Run { scenario, traces })
    }

    pub fn body(&self, name: &str) -> Result<(&Trace, Vec<BodyRef>)> {
        let (world, members) = self.scenario.resolve_body(name)?;
        Ok((&self.traces[world], members))
    }

    pub fn world(&self, name: Option<&str>) -> Result<(usize, &Trace)> {
        let idx = match name {
            Some(n) => self
                .scenario
                .world_index(n)
                .ok_or_else(|| Error::Scenario(format!("unknown world {n:?}")))?,
            None => 0,
        };
        Ok((idx, &self.traces[idx]))
    }
}
