//! Scenario fixtures: spaces, maps, control functions, witness sequences
//! and typed expectations, loaded from JSON.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::compat::WitnessSequence;
use crate::conditions::{Condition, Maps};
use crate::control::ControlFunction;
use crate::domain::DomainSet;
use crate::error::FixtureError;
use crate::iteration::{Mode, PipelineConfig};
use crate::mobius::Form;
use crate::piecewise::{IndexedPiece, MapFamily, PiecewiseMap};
use crate::scalar::{serde_scalar, Scalar};

/// Names of the bundled scenarios.
pub const FIXTURE_NAMES: [&str; 6] = ["ex3_3", "ex3_4", "ex3_8", "ex4_2", "ex4_4", "ex4_7"];

const EMBEDDED: [(&str, &str); 6] = [
    ("ex3_3", include_str!("../fixtures/ex3_3.json")),
    ("ex3_4", include_str!("../fixtures/ex3_4.json")),
    ("ex3_8", include_str!("../fixtures/ex3_8.json")),
    ("ex4_2", include_str!("../fixtures/ex4_2.json")),
    ("ex4_4", include_str!("../fixtures/ex4_4.json")),
    ("ex4_7", include_str!("../fixtures/ex4_7.json")),
];

/// A rational written as a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Q(#[serde(with = "serde_scalar")] pub Scalar);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub domain: DomainSet,
    pub pieces: Vec<IndexedPiece>,
}

/// A set built from the scenario's spaces and maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetExpr {
    /// `"X"` (the space) or `"K"` (the working domain).
    Named(String),
    /// Image of `of` (default `K`) under a map reference.
    Image {
        image: String,
        #[serde(default)]
        of: Option<Box<SetExpr>>,
    },
    Closure {
        closure: Box<SetExpr>,
    },
    Intersect {
        intersect: Vec<SetExpr>,
    },
    Union {
        union: Vec<SetExpr>,
    },
    /// Common fixed points of the listed maps.
    Fixed {
        fixed: Vec<String>,
    },
    Coincidence {
        coincidence: (String, String),
        #[serde(default)]
        on: Option<Box<SetExpr>>,
    },
    Literal {
        literal: DomainSet,
    },
}

/// Pipeline settings of an expectation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineSpec {
    #[serde(default)]
    pub x0: Option<Q>,
    #[serde(default)]
    pub condition: Option<Condition>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub priority: Vec<(Q, Q)>,
    #[serde(default)]
    pub resolution: Option<usize>,
    #[serde(default)]
    pub max_iter: Option<usize>,
}

impl PipelineSpec {
    pub fn to_config(&self) -> PipelineConfig {
        let mut c = PipelineConfig {
            x0: self.x0.as_ref().map(|q| q.0.clone()),
            condition: self.condition.clone(),
            mode: self.mode,
            priority_pairs: self.priority.iter().map(|(x, y)| (x.0.clone(), y.0.clone())).collect(),
            ..PipelineConfig::default()
        };
        if let Some(r) = self.resolution {
            c.resolution = r;
        }
        if let Some(n) = self.max_iter {
            c.iteration.max_iter = n;
        }
        c
    }
}

fn default_grid_points() -> usize {
    200
}

/// What to compute. Variants with an `expect` object compare it against
/// the serialized result: every key given must match, other keys are
/// ignored, arrays must match element by element and rational strings
/// compare by value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Check {
    SetEquals {
        expr: SetExpr,
        expected: DomainSet,
    },
    Complete {
        expr: SetExpr,
        expect: Value,
    },
    Subset {
        left: SetExpr,
        right: SetExpr,
        expected: bool,
    },
    Evaluate {
        map: String,
        x: Q,
        expected: Q,
    },
    /// Whether `map` agrees with `form` at every point of `region`.
    FormOn {
        map: String,
        region: DomainSet,
        form: Form,
        expected: bool,
    },
    Condition {
        condition: Condition,
        maps: Vec<String>,
        #[serde(default)]
        family: Option<String>,
        #[serde(default)]
        resolution: Option<usize>,
        #[serde(default)]
        priority: Vec<(Q, Q)>,
        expect: Value,
    },
    PairValues {
        condition: Condition,
        maps: Vec<String>,
        #[serde(default)]
        family: Option<String>,
        x: Q,
        y: Q,
        expect: Value,
    },
    WorstRatio {
        condition: Condition,
        maps: Vec<String>,
        #[serde(default)]
        resolution: Option<usize>,
        expect: Value,
    },
    Implication {
        strong: Condition,
        weak: Condition,
        maps: Vec<String>,
        #[serde(default)]
        family: Option<String>,
        #[serde(default)]
        resolution: Option<usize>,
        expect: Value,
    },
    SequenceLimits {
        maps: (String, String),
        witness: String,
        expect: Value,
    },
    Compatibility {
        maps: (String, String),
        witness: String,
        expect: Value,
    },
    ReciprocalContinuity {
        maps: (String, String),
        witness: String,
        t: Q,
        expect: Value,
    },
    WeaklyCompatible {
        maps: (String, String),
        expect: Value,
    },
    CommutesOn {
        maps: (String, String),
        set: SetExpr,
        expect: Value,
    },
    Trace {
        maps: Vec<String>,
        x0: Q,
        #[serde(default)]
        max_iter: Option<usize>,
        /// Control function for the descent check.
        #[serde(default)]
        descent: Option<String>,
        #[serde(default)]
        cauchy_eps: Option<Q>,
        expect: Value,
    },
    CommonFixedPoint {
        maps: Vec<String>,
        #[serde(default)]
        pipeline: PipelineSpec,
        expect: Value,
    },
    Iterated {
        maps: (String, String),
        m: usize,
        #[serde(default)]
        pipeline: PipelineSpec,
        expect: Value,
    },
    Family {
        family: String,
        f: String,
        indices: Vec<usize>,
        #[serde(default)]
        pipeline: PipelineSpec,
        expect: Value,
    },
    Regularity {
        control: String,
        upper: Q,
        #[serde(default = "default_grid_points")]
        grid_points: usize,
        expect: Value,
    },
    Synthesize {
        control: String,
        upper: Q,
        #[serde(default = "default_grid_points")]
        grid_points: usize,
        expect: Value,
    },
}

impl Check {
    pub fn op(&self) -> &'static str {
        match self {
            Check::SetEquals { .. } => "set_equals",
            Check::Complete { .. } => "complete",
            Check::Subset { .. } => "subset",
            Check::Evaluate { .. } => "evaluate",
            Check::FormOn { .. } => "form_on",
            Check::Condition { .. } => "condition",
            Check::PairValues { .. } => "pair_values",
            Check::WorstRatio { .. } => "worst_ratio",
            Check::Implication { .. } => "implication",
            Check::SequenceLimits { .. } => "sequence_limits",
            Check::Compatibility { .. } => "compatibility",
            Check::ReciprocalContinuity { .. } => "reciprocal_continuity",
            Check::WeaklyCompatible { .. } => "weakly_compatible",
            Check::CommutesOn { .. } => "commutes_on",
            Check::Trace { .. } => "trace",
            Check::CommonFixedPoint { .. } => "common_fixed_point",
            Check::Iterated { .. } => "iterated",
            Check::Family { .. } => "family",
            Check::Regularity { .. } => "regularity",
            Check::Synthesize { .. } => "synthesize",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub label: String,
    #[serde(flatten)]
    pub check: Check,
    /// Set when the expected value is the computed one and differs from the
    /// value stated in the source text, which is quoted here.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_discrepancy: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub summary: String,
    pub space: DomainSet,
    pub working: DomainSet,
    pub maps: BTreeMap<String, PiecewiseMap>,
    #[serde(default)]
    pub families: BTreeMap<String, FamilySpec>,
    #[serde(default)]
    pub controls: BTreeMap<String, ControlFunction>,
    #[serde(default)]
    pub witnesses: BTreeMap<String, WitnessSequence>,
    pub expectations: Vec<Expectation>,
}

/// Replaces string values under `phi` / `psi` keys by the named control.
fn inline_controls(v: &mut Value, controls: &serde_json::Map<String, Value>) -> Result<(), FixtureError> {
    match v {
        Value::Object(obj) => {
            for (k, child) in obj.iter_mut() {
                if k == "phi" || k == "psi" {
                    if let Value::String(name) = child {
                        let c = controls
                            .get(name.as_str())
                            .ok_or_else(|| FixtureError::Invalid(format!("unknown control function {name:?}")))?;
                        *child = c.clone();
                        continue;
                    }
                }
                inline_controls(child, controls)?;
            }
        }
        Value::Array(items) => {
            for item in items {
                inline_controls(item, controls)?;
            }
        }
        _ => {}
    }
    Ok(())
}

impl Scenario {
    /// Parses and validates a scenario. Inside expectations, a `phi` or
    /// `psi` given as a string names an entry of `controls`.
    pub fn from_json(text: &str) -> Result<Scenario, FixtureError> {
        let mut raw: Value = serde_json::from_str(text).map_err(|e| FixtureError::Parse(e.to_string()))?;
        let controls = raw
            .get("controls")
            .and_then(Value::as_object)
            .cloned()
            .unwrap_or_default();
        if let Some(exps) = raw.get_mut("expectations") {
            inline_controls(exps, &controls)?;
        }
        let sc: Scenario = serde_json::from_value(raw).map_err(|e| FixtureError::Parse(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<(), FixtureError> {
        if let Some(w) = self.working.subset_witness(&self.space) {
            return Err(FixtureError::Invalid(format!(
                "working domain point {w} lies outside the space"
            )));
        }
        for (name, m) in &self.maps {
            if m.domain() != &self.working {
                return Err(FixtureError::Invalid(format!(
                    "map {name} is not defined on the working domain"
                )));
            }
        }
        for name in self.families.keys() {
            if self.maps.contains_key(name) {
                return Err(FixtureError::Invalid(format!("{name} names both a map and a family")));
            }
            let first = self.family(name)?.member(1)?;
            if first.domain() != &self.working {
                return Err(FixtureError::Invalid(format!(
                    "family {name} is not defined on the working domain"
                )));
            }
        }
        Ok(())
    }

    pub fn family(&self, name: &str) -> Result<MapFamily, FixtureError> {
        let spec = self
            .families
            .get(name)
            .ok_or_else(|| FixtureError::Invalid(format!("unknown family {name:?}")))?;
        Ok(MapFamily::from_pieces(spec.domain.clone(), spec.pieces.clone()))
    }

    /// Resolves `"T"`, `"T^2"`, `"T_3"` or `"T_3^2"`.
    pub fn map(&self, reference: &str) -> Result<Arc<PiecewiseMap>, FixtureError> {
        let bad = || FixtureError::Invalid(format!("unknown map reference {reference:?}"));
        let (head, power) = match reference.split_once('^') {
            Some((h, p)) => (h, p.parse::<usize>().map_err(|_| bad())?),
            None => (reference, 1),
        };
        let base = if let Some(m) = self.maps.get(head) {
            Arc::new(m.clone())
        } else {
            let (fam, idx) = head.rsplit_once('_').ok_or_else(bad)?;
            let idx = idx.parse::<usize>().map_err(|_| bad())?;
            self.family(fam)?.member(idx)?
        };
        if power == 1 {
            Ok(base)
        } else {
            Ok(Arc::new(base.iterate(power)?))
        }
    }

    pub fn resolve_maps(&self, names: &[String]) -> Result<Vec<Arc<PiecewiseMap>>, FixtureError> {
        names.iter().map(|n| self.map(n)).collect()
    }

    /// `T, f, g` when present, `T, f` for two-map scenarios and `T_1, f`
    /// when `T` is a family.
    pub fn default_maps(&self) -> Vec<String> {
        let t = if self.maps.contains_key("T") { "T" } else { "T_1" };
        let mut names = vec![t.to_string(), "f".to_string()];
        if self.maps.contains_key("g") {
            names.push("g".into());
        }
        names
    }

    pub fn control(&self, name: &str) -> Result<&ControlFunction, FixtureError> {
        self.controls
            .get(name)
            .ok_or_else(|| FixtureError::Invalid(format!("unknown control function {name:?}")))
    }

    pub fn witness(&self, name: &str) -> Result<&WitnessSequence, FixtureError> {
        self.witnesses
            .get(name)
            .ok_or_else(|| FixtureError::Invalid(format!("unknown witness sequence {name:?}")))
    }
}

/// Loads a bundled scenario by name.
pub fn load_fixture(name: &str) -> Result<Scenario, FixtureError> {
    let (_, text) = EMBEDDED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| FixtureError::UnknownFixture(name.to_string()))?;
    Scenario::from_json(text)
}

/// Loads `<dir>/<name>.json`.
pub fn load_fixture_from_dir(dir: &Path, name: &str) -> Result<Scenario, FixtureError> {
    let path = dir.join(format!("{name}.json"));
    if !path.exists() {
        return Err(FixtureError::UnknownFixture(name.to_string()));
    }
    load_fixture_file(&path)
}

pub fn load_fixture_file(path: &Path) -> Result<Scenario, FixtureError> {
    let text = std::fs::read_to_string(path).map_err(|e| FixtureError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Scenario::from_json(&text)
}

/// Fixture names available in `dir`, sorted.
pub fn list_fixtures_in(dir: &Path) -> Result<Vec<String>, FixtureError> {
    let io = |e: std::io::Error| FixtureError::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    };
    let mut names = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let p = entry.map_err(io)?.path();
        if p.extension().is_some_and(|e| e == "json") {
            if let Some(stem) = p.file_stem().and_then(|s| s.to_str()) {
                names.push(stem.to_string());
            }
        }
    }
    names.sort();
    Ok(names)
}

/// Binds two maps as `(T, f)` or three as `(T, f, g)`.
pub fn bind_maps<'a>(maps: &'a [Arc<PiecewiseMap>], family: Option<&'a MapFamily>) -> Result<Maps<'a>, FixtureError> {
    let m = match maps {
        [t, f] => Maps::two(t, f),
        [t, f, g] => Maps::three(t, f, g),
        _ => return Err(FixtureError::Invalid("conditions take two or three maps".into())),
    };
    Ok(match family {
        Some(fam) => m.with_family(fam),
        None => m,
    })
}
