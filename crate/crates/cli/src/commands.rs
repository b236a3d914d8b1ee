use std::path::Path;
use std::sync::Arc;

use cofix_core::fixture::{list_fixtures_in, load_fixture_file};
use cofix_core::iteration::{pipeline_samples, StageReport};
use cofix_core::{
    bind_maps, check_condition_with_priority, common_fixed_point, family_common_fixed_point, grid_with_distances,
    is_compatible_on, is_reciprocal_continuous_on, is_weakly_compatible, iterated_common_fixed_point, load_fixture,
    load_fixture_from_dir, run_scenario, sequence_limits, synthesize_psi, Check, CheckReport, Condition, ControlError,
    ControlFunction, CorpusReport, EdgeOffset, IteratedStatus, IterationTrace, Mode, PiecewiseMap, PipelineConfig,
    PipelineSpec, Scalar, Scenario, Stage, Status, FIXTURE_NAMES,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{corpus_csv, json_text, kv};
use crate::{
    Cli, Command, CompatArgs, CorpusArgs, Format, IterateArgs, ModeArg, SamplingArgs, SynthesizeArgs, VerifyArgs,
};

pub struct Output {
    pub status: u8,
    pub text: String,
}

impl Output {
    fn new(holds: bool, text: String) -> Self {
        Output {
            status: if holds { 0 } else { 1 },
            text,
        }
    }
}

type Res<T> = Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn run(cli: &Cli) -> Res<Output> {
    match &cli.command {
        Command::Verify(a) => verify(cli, a),
        Command::Iterate(a) => iterate(cli, a),
        Command::Synthesize(a) => synthesize(cli, a),
        Command::Compat(a) => compat(cli, a),
        Command::Corpus(a) => corpus(cli, a),
    }
}

fn load(cli: &Cli, fixture: &str) -> Res<Scenario> {
    let path = Path::new(fixture);
    if path.is_file() {
        return load_fixture_file(path).map_err(err);
    }
    match &cli.fixture_dir {
        Some(dir) => load_fixture_from_dir(dir, fixture).map_err(err),
        None => load_fixture(fixture).map_err(err),
    }
}

fn no_csv(cli: &Cli, what: &str) -> Res<()> {
    if cli.format == Format::Csv {
        return Err(format!("csv output is not available for {what}; use json or text"));
    }
    Ok(())
}

fn apply_sampling(config: &mut PipelineConfig, s: &SamplingArgs) {
    if let Some(r) = s.resolution {
        config.resolution = r;
    }
    if let Some(e) = &s.edge_offset {
        config.edge_offset = EdgeOffset::Relative(e.clone());
    }
}

/// The first pipeline declared by a scenario.
enum Pipeline<'a> {
    Three {
        maps: &'a [String],
        spec: &'a PipelineSpec,
    },
    Power {
        maps: (&'a str, &'a str),
        m: usize,
        spec: &'a PipelineSpec,
    },
    Family {
        family: &'a str,
        f: &'a str,
        indices: &'a [usize],
        spec: &'a PipelineSpec,
    },
}

fn declared_pipeline(sc: &Scenario) -> Option<Pipeline<'_>> {
    sc.expectations.iter().find_map(|e| match &e.check {
        Check::CommonFixedPoint { maps, pipeline, .. } => Some(Pipeline::Three { maps, spec: pipeline }),
        Check::Iterated { maps, m, pipeline, .. } => Some(Pipeline::Power {
            maps: (&maps.0, &maps.1),
            m: *m,
            spec: pipeline,
        }),
        Check::Family {
            family,
            f,
            indices,
            pipeline,
            ..
        } => Some(Pipeline::Family {
            family,
            f,
            indices,
            spec: pipeline,
        }),
        _ => None,
    })
}

fn triple(sc: &Scenario, names: &[String]) -> Res<(Arc<PiecewiseMap>, Arc<PiecewiseMap>, Arc<PiecewiseMap>)> {
    let ms = sc.resolve_maps(names).map_err(err)?;
    match ms.as_slice() {
        [t, f] => Ok((t.clone(), f.clone(), f.clone())),
        [t, f, g] => Ok((t.clone(), f.clone(), g.clone())),
        _ => Err("expected two or three maps".into()),
    }
}

// ---------------------------------------------------------------- verify

#[derive(Serialize)]
struct VerifyReport {
    fixture: String,
    holds: bool,
    checks: Vec<StageReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    condition: Option<CheckReport>,
}

struct ConditionRun {
    condition: Condition,
    maps: Vec<String>,
    family: Option<String>,
    priority: Vec<(Scalar, Scalar)>,
    resolution: Option<usize>,
}

fn declared_condition(sc: &Scenario, a: &VerifyArgs, variant: &str) -> Res<Option<ConditionRun>> {
    let wanted = a.control.as_deref().map(|c| sc.control(c).map_err(err)).transpose()?;
    Ok(sc.expectations.iter().find_map(|e| match &e.check {
        Check::Condition {
            condition,
            maps,
            family,
            resolution,
            priority,
            ..
        } if condition.name() == variant && wanted.is_none_or(|w| condition.control() == Some(w)) => {
            Some(ConditionRun {
                condition: condition.clone(),
                maps: if a.maps.is_empty() {
                    maps.clone()
                } else {
                    a.maps.clone()
                },
                family: family.clone(),
                priority: priority.iter().map(|(x, y)| (x.0.clone(), y.0.clone())).collect(),
                resolution: *resolution,
            })
        }
        _ => None,
    }))
}

fn built_condition(sc: &Scenario, a: &VerifyArgs, variant: &str) -> Res<ConditionRun> {
    let mut obj = serde_json::Map::new();
    obj.insert("variant".into(), json!(variant));
    if let Some(name) = &a.control {
        let key = if variant == "main" { "psi" } else { "phi" };
        obj.insert(
            key.into(),
            serde_json::to_value(sc.control(name).map_err(err)?).map_err(err)?,
        );
    }
    if let Some(c) = &a.coeff {
        let key = if variant == "babu_triple" { "c1" } else { "r" };
        obj.insert(key.into(), json!(c.to_string()));
    }
    if let Some(m) = a.m {
        obj.insert("m".into(), json!(m));
    }
    if let Some(j) = a.j {
        obj.insert("j".into(), json!(j));
    }
    let condition: Condition =
        serde_json::from_value(Value::Object(obj)).map_err(|e| format!("cannot build condition {variant}: {e}"))?;
    condition.validate().map_err(err)?;
    let family = matches!(condition, Condition::FamilyTwoMap { .. } | Condition::Som { .. })
        .then(|| sc.families.keys().next().cloned())
        .flatten();
    Ok(ConditionRun {
        condition,
        maps: if a.maps.is_empty() {
            sc.default_maps()
        } else {
            a.maps.clone()
        },
        family,
        priority: Vec::new(),
        resolution: None,
    })
}

fn verify(cli: &Cli, a: &VerifyArgs) -> Res<Output> {
    no_csv(cli, "verify")?;
    let sc = load(cli, &a.fixture)?;
    let report = match &a.condition {
        Some(variant) => verify_condition(&sc, a, variant)?,
        None => verify_hypotheses(&sc, a)?,
    };
    let text = match cli.format {
        Format::Json => json_text(&report),
        _ => verify_text(&report),
    };
    Ok(Output::new(report.holds, text))
}

fn verify_condition(sc: &Scenario, a: &VerifyArgs, variant: &str) -> Res<VerifyReport> {
    let explicit = a.coeff.is_some() || a.m.is_some() || a.j.is_some();
    let declared = if explicit {
        None
    } else {
        declared_condition(sc, a, variant)?
    };
    let run = match declared {
        Some(run) => run,
        None => built_condition(sc, a, variant)?,
    };
    let ms = sc.resolve_maps(&run.maps).map_err(err)?;
    let fam = run.family.as_deref().map(|f| sc.family(f)).transpose().map_err(err)?;
    let refs: Vec<&PiecewiseMap> = ms.iter().map(|m| m.as_ref()).collect();
    let mut config = PipelineConfig::default();
    if let Some(r) = run.resolution {
        config.resolution = r;
    }
    apply_sampling(&mut config, &a.sampling);
    let samples = pipeline_samples(&refs, config.resolution, &config.edge_offset).map_err(err)?;
    let maps = bind_maps(&ms, fam.as_ref()).map_err(err)?;
    let r = check_condition_with_priority(&run.condition, maps, &samples, &run.priority).map_err(err)?;
    let stage = StageReport {
        stage: Stage::Condition,
        passed: Some(r.holds),
        witness: r.violation_witness.as_ref().map(|v| format!("({}, {})", v.x, v.y)),
        detail: format!(
            "{} over {} pairs, min margin {}",
            r.condition, r.pairs_checked, r.min_margin
        ),
    };
    Ok(VerifyReport {
        fixture: sc.name.clone(),
        holds: r.holds,
        checks: vec![stage],
        condition: Some(r),
    })
}

const HYPOTHESES: [Stage; 4] = [
    Stage::Inclusion,
    Stage::Completeness,
    Stage::Condition,
    Stage::WeakCompatibility,
];

fn verify_hypotheses(sc: &Scenario, a: &VerifyArgs) -> Res<VerifyReport> {
    let default_spec = PipelineSpec::default();
    let default_maps = sc.default_maps();
    let pipeline = declared_pipeline(sc).unwrap_or(Pipeline::Three {
        maps: &default_maps,
        spec: &default_spec,
    });
    let (result, extra) = match pipeline {
        Pipeline::Three { maps, spec } => {
            let names = if a.maps.is_empty() {
                maps.to_vec()
            } else {
                a.maps.clone()
            };
            let (t, f, g) = triple(sc, &names)?;
            let mut config = spec.to_config();
            apply_sampling(&mut config, &a.sampling);
            (common_fixed_point(&t, &f, &g, &config).map_err(err)?, None)
        }
        Pipeline::Power { maps, m, spec } => {
            let (t, f) = (sc.map(maps.0).map_err(err)?, sc.map(maps.1).map_err(err)?);
            let mut config = spec.to_config();
            apply_sampling(&mut config, &a.sampling);
            (
                iterated_common_fixed_point(&t, &f, m, &config)
                    .map_err(err)?
                    .power_result,
                None,
            )
        }
        Pipeline::Family {
            family,
            f,
            indices,
            spec,
        } => {
            let fam = sc.family(family).map_err(err)?;
            let fm = sc.map(f).map_err(err)?;
            let mut config = spec.to_config();
            apply_sampling(&mut config, &a.sampling);
            let r = family_common_fixed_point(&fam, &fm, indices, &config).map_err(err)?;
            (r.first_member_result, r.family_condition)
        }
    };
    let mut checks: Vec<StageReport> = result
        .diagnostics
        .into_iter()
        .filter(|d| HYPOTHESES.contains(&d.stage))
        .collect();
    let mut condition = result.condition_report;
    if let Some(fc) = extra {
        checks.push(StageReport {
            stage: Stage::Condition,
            passed: Some(fc.holds),
            witness: fc.violation_witness.as_ref().map(|v| format!("({}, {})", v.x, v.y)),
            detail: format!(
                "{} over {} pairs, min margin {}",
                fc.condition, fc.pairs_checked, fc.min_margin
            ),
        });
        condition = Some(fc);
    }
    let holds = checks.iter().all(|c| c.passed != Some(false));
    Ok(VerifyReport {
        fixture: sc.name.clone(),
        holds,
        checks,
        condition,
    })
}

fn verify_text(r: &VerifyReport) -> String {
    let mut out = format!("verify {}\n", r.fixture);
    for c in &r.checks {
        let mark = match c.passed {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "skip",
        };
        out += &format!("  {:<20} {mark}  {}\n", c.stage.to_string(), c.detail);
        if let (Some(false), Some(w)) = (c.passed, &c.witness) {
            out += &format!("  {:<20}       witness {w}\n", "");
        }
    }
    if let Some(c) = &r.condition {
        out += &kv("min margin", &c.min_margin.to_string());
        if let Some(v) = &c.violation_witness {
            let kernel = v.kernel.as_ref().map_or("-".to_string(), ToString::to_string);
            out += &kv(
                "violation",
                &format!("({}, {}): lhs {} > rhs {}, kernel {kernel}", v.x, v.y, v.lhs, v.rhs),
            );
        }
    }
    out += &kv(
        "result",
        if r.holds {
            "all hypotheses hold"
        } else {
            "hypothesis fails"
        },
    );
    out
}

// --------------------------------------------------------------- iterate

#[derive(Serialize)]
struct IterateReport {
    fixture: String,
    kind: &'static str,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterated_status: Option<IteratedStatus>,
    #[serde(with = "cofix_core::scalar::serde_scalar_opt")]
    z: Option<Scalar>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    family_failures: Vec<usize>,
    diagnostics: Vec<StageReport>,
    #[serde(skip)]
    trace: Option<IterationTrace>,
}

fn iterate(cli: &Cli, a: &IterateArgs) -> Res<Output> {
    let sc = load(cli, &a.fixture)?;
    let declared = declared_pipeline(&sc);
    let default_spec = PipelineSpec::default();
    let spec = match &declared {
        Some(Pipeline::Three { spec, .. } | Pipeline::Power { spec, .. } | Pipeline::Family { spec, .. }) => *spec,
        None => &default_spec,
    };
    let mut config = spec.to_config();
    apply_sampling(&mut config, &a.sampling);
    if let Some(x) = &a.x0 {
        config.x0 = Some(x.clone());
    }
    if let Some(n) = a.max_iter {
        config.iteration.max_iter = n;
    }
    if let Some(t) = &a.tol {
        config.iteration.tol = t.clone();
    }
    if let Some(m) = a.mode {
        config.mode = match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::Advisory => Mode::Advisory,
        };
    }

    let power = a.power.or(match &declared {
        Some(Pipeline::Power { m, .. }) if a.indices.is_empty() => Some(*m),
        _ => None,
    });
    let family = if !a.indices.is_empty() {
        let name = match &declared {
            Some(Pipeline::Family { family, .. }) => family.to_string(),
            _ => sc
                .families
                .keys()
                .next()
                .cloned()
                .ok_or("the fixture has no map family")?,
        };
        Some((name, a.indices.clone()))
    } else {
        match &declared {
            Some(Pipeline::Family { family, indices, .. }) if power.is_none() => {
                Some((family.to_string(), indices.to_vec()))
            }
            _ => None,
        }
    };
    let names: Vec<String> = if !a.maps.is_empty() {
        a.maps.clone()
    } else {
        match &declared {
            Some(Pipeline::Three { maps, .. }) => maps.to_vec(),
            Some(Pipeline::Power { maps, .. }) => vec![maps.0.to_string(), maps.1.to_string()],
            _ => sc.default_maps(),
        }
    };

    let report = if let Some((name, indices)) = family {
        let fam = sc.family(&name).map_err(err)?;
        let f_name = match &declared {
            Some(Pipeline::Family { f, .. }) => f.to_string(),
            _ => "f".to_string(),
        };
        let fm = sc.map(&f_name).map_err(err)?;
        let r = family_common_fixed_point(&fam, &fm, &indices, &config).map_err(err)?;
        IterateReport {
            fixture: sc.name.clone(),
            kind: "family",
            status: r.first_member_result.status,
            iterated_status: None,
            z: r.z,
            family_failures: r.failures,
            diagnostics: r.first_member_result.diagnostics,
            trace: r.first_member_result.trace,
        }
    } else if let Some(m) = power {
        if let Some(Condition::IteratedTwoMap { m: cm, .. }) = &mut config.condition {
            *cm = m;
        }
        let (t, f) = (sc.map(&names[0]).map_err(err)?, sc.map(&names[1]).map_err(err)?);
        let r = iterated_common_fixed_point(&t, &f, m, &config).map_err(err)?;
        let z = match &r.status {
            IteratedStatus::CommonFixedPoint { z } => Some(z.clone()),
            _ => None,
        };
        IterateReport {
            fixture: sc.name.clone(),
            kind: "power",
            status: r.power_result.status,
            iterated_status: Some(r.status),
            z,
            family_failures: Vec::new(),
            diagnostics: r.power_result.diagnostics,
            trace: r.power_result.trace,
        }
    } else {
        let (t, f, g) = triple(&sc, &names)?;
        let r = common_fixed_point(&t, &f, &g, &config).map_err(err)?;
        let z = r.z().cloned();
        IterateReport {
            fixture: sc.name.clone(),
            kind: "common_fixed_point",
            status: r.status,
            iterated_status: None,
            z,
            family_failures: Vec::new(),
            diagnostics: r.diagnostics,
            trace: r.trace,
        }
    };
    let text = match cli.format {
        Format::Json => {
            let mut v = serde_json::to_value(&report).map_err(err)?;
            if let Some(tr) = &report.trace {
                v["trace"] = serde_json::to_value(tr).map_err(err)?;
            }
            json_text(&v)
        }
        Format::Csv => report.trace.as_ref().map(IterationTrace::to_csv).unwrap_or_default(),
        Format::Text => iterate_text(&report),
    };
    Ok(Output::new(report.z.is_some(), text))
}

fn iterate_text(r: &IterateReport) -> String {
    let mut out = format!("iterate {} ({})\n", r.fixture, r.kind);
    if let Some(tr) = &r.trace {
        out += &kv("steps", &tr.alpha_seq.len().to_string());
        out += &kv("terminated by", &format!("{:?}", tr.terminated_by));
        if let Some(y) = tr.y_seq.last() {
            out += &kv("last iterate", &y.to_string());
        }
    }
    for d in &r.diagnostics {
        let mark = match d.passed {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "skip",
        };
        out += &format!("  {:<20} {mark}  {}\n", d.stage.to_string(), d.detail);
    }
    out += &kv("status", &r.status.to_string());
    if let Some(s) = &r.iterated_status {
        out += &kv("iterated", &serde_json::to_string(s).unwrap_or_default());
    }
    if !r.family_failures.is_empty() {
        out += &kv("family failures", &format!("{:?}", r.family_failures));
    }
    out += &kv("z", &r.z.as_ref().map_or("none".to_string(), ToString::to_string));
    out
}

// ------------------------------------------------------------ synthesize

/// The control function named by `source`, with the distances at which the
/// fixture's checks evaluate it or would evaluate a ψ built from it.
fn control_source(cli: &Cli, source: &str) -> Res<(ControlFunction, Vec<Scalar>)> {
    if let Some(r) = source.strip_prefix("linear:") {
        let r = cofix_core::parse_scalar(r).map_err(err)?;
        return Ok((ControlFunction::linear(r), Vec::new()));
    }
    let path = Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(err)?;
        let c = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        return Ok((c, Vec::new()));
    }
    let (fixture, name) = source
        .rsplit_once('.')
        .ok_or_else(|| format!("expected fixture.control, a file or linear:r, got {source:?}"))?;
    let sc = load(cli, fixture)?;
    let phi = sc.control(name).cloned().map_err(err)?;
    let distances = realized_distances(&sc, &phi)?;
    Ok((phi, distances))
}

fn realized_distances(sc: &Scenario, c: &ControlFunction) -> Res<Vec<Scalar>> {
    let mut out = Vec::new();
    for e in &sc.expectations {
        let Check::Condition {
            condition,
            maps,
            family,
            resolution,
            ..
        } = &e.check
        else {
            continue;
        };
        if condition.control() != Some(c) && !matches!(condition, Condition::Main { .. }) {
            continue;
        }
        let ms = sc.resolve_maps(maps).map_err(err)?;
        let fam = family.as_deref().map(|f| sc.family(f)).transpose().map_err(err)?;
        let refs: Vec<&PiecewiseMap> = ms.iter().map(|m| m.as_ref()).collect();
        let config = PipelineConfig::default();
        let samples =
            pipeline_samples(&refs, resolution.unwrap_or(config.resolution), &config.edge_offset).map_err(err)?;
        let r = check_condition_with_priority(condition, bind_maps(&ms, fam.as_ref()).map_err(err)?, &samples, &[])
            .map_err(err)?;
        out.extend(r.distance_set);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn synthesize(cli: &Cli, a: &SynthesizeArgs) -> Res<Output> {
    no_csv(cli, "synthesize")?;
    let (phi, distances) = control_source(cli, &a.source)?;
    let upper = match &a.upper {
        Some(u) => u.clone(),
        None => {
            let last = phi.breakpoints().into_iter().max().unwrap_or_default();
            let widest = distances.last().cloned().unwrap_or_default();
            (last * Scalar::from_integer(2.into()))
                .max(widest)
                .max(Scalar::from_integer(3.into()))
        }
    };
    let distances: Vec<Scalar> = distances.into_iter().filter(|d| d <= &upper).collect();
    let grid = grid_with_distances(&phi, &upper, a.grid, &distances);
    match synthesize_psi(&phi, &grid) {
        Ok((psi, cert)) => {
            if let Some(path) = &a.out {
                std::fs::write(path, json_text(&psi)).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            let holds = cert.all_green();
            let text = match cli.format {
                Format::Json => json_text(&json!({
                    "source": a.source,
                    "upper": upper.to_string(),
                    "all_green": holds,
                    "psi": psi,
                    "certificate": cert,
                })),
                _ => {
                    let mut out = format!("synthesize {}\n", a.source);
                    out += &kv("grid", &format!("{} points on (0, {upper}]", cert.grid_points));
                    out += &kv("psi", &psi.to_string());
                    for (name, v) in [
                        ("dominates phi", &cert.dominates),
                        ("monotone", &cert.regularity.monotone),
                        ("continuous", &cert.regularity.continuous_at_breakpoints),
                        ("usc", &cert.regularity.usc_at_breakpoints),
                        ("below identity", &cert.regularity.strictly_below_identity),
                    ] {
                        out += &kv(name, if v.holds { "pass" } else { "FAIL" });
                    }
                    out += &kv(
                        "result",
                        if holds {
                            "certificate all green"
                        } else {
                            "certificate fails"
                        },
                    );
                    out
                }
            };
            Ok(Output::new(holds, text))
        }
        Err(e @ (ControlError::RatioReachesOne { .. } | ControlError::EnvelopeImpossible { .. })) => {
            let text = match cli.format {
                Format::Json => json_text(&json!({ "source": a.source, "all_green": false, "error": e.to_string() })),
                _ => format!("synthesize {}\n{}", a.source, kv("result", &e.to_string())),
            };
            Ok(Output::new(false, text))
        }
        Err(e) => Err(e.to_string()),
    }
}

// ---------------------------------------------------------------- compat

fn compat(cli: &Cli, a: &CompatArgs) -> Res<Output> {
    no_csv(cli, "compat")?;
    let sc = load(cli, &a.fixture)?;
    let wname = match &a.witness {
        Some(w) => w.clone(),
        None => sc
            .witnesses
            .keys()
            .next()
            .cloned()
            .ok_or("the fixture has no witness sequence")?,
    };
    let w = sc.witness(&wname).map_err(err)?;
    let names = if a.maps.is_empty() {
        sc.default_maps()
    } else {
        a.maps.clone()
    };
    let (t, f) = (sc.map(&names[0]).map_err(err)?, sc.map(&names[1]).map_err(err)?);

    let limits = sequence_limits(&t, &f, w).map_err(err)?;
    let outcome = |r: Result<cofix_core::ProbeVerdict, cofix_core::CompatError>| match r {
        Ok(v) => (v.is_falsified(), serde_json::to_value(&v).expect("verdict serializes")),
        Err(e) => (false, json!({ "outcome": "inapplicable", "reason": e.to_string() })),
    };
    let (incompatible, compatible) = outcome(is_compatible_on(&t, &f, w));
    let point = a.t.clone().or_else(|| limits.lim_t.clone());
    let (discontinuous, reciprocal) = match &point {
        Some(p) => outcome(is_reciprocal_continuous_on(&t, &f, w, p)),
        None => (
            false,
            json!({ "outcome": "inapplicable", "reason": "lim T x_n is undetermined" }),
        ),
    };
    let weak = is_weakly_compatible(&t, &f).map_err(err)?;
    let holds = !incompatible && !discontinuous && weak.holds;
    let report = json!({
        "fixture": sc.name,
        "maps": names[..2],
        "witness": wname,
        "holds": holds,
        "limits": limits,
        "compatibility": compatible,
        "reciprocal_continuity": reciprocal,
        "weak_compatibility": weak,
    });
    let text = match cli.format {
        Format::Json => json_text(&report),
        _ => {
            let lim = |v: &Option<Scalar>| v.as_ref().map_or("undetermined".to_string(), ToString::to_string);
            let mut out = format!("compat {} ({}, {}) along {wname}\n", sc.name, names[0], names[1]);
            out += &kv("lim T x_n", &lim(&limits.lim_t));
            out += &kv("lim f x_n", &lim(&limits.lim_f));
            out += &kv("lim T f x_n", &lim(&limits.lim_tf));
            out += &kv("lim f T x_n", &lim(&limits.lim_ft));
            out += &kv("compatibility", &summary(&compatible));
            out += &kv("reciprocal continuity", &summary(&reciprocal));
            out += &kv(
                "weak compatibility",
                &format!(
                    "{} on C = {}",
                    if weak.holds { "holds" } else { "fails" },
                    weak.coincidence_set
                ),
            );
            out
        }
    };
    Ok(Output::new(holds, text))
}

fn summary(v: &Value) -> String {
    let outcome = v["outcome"].as_str().unwrap_or("?");
    match (outcome, v["gap"].as_str(), v["reason"].as_str()) {
        ("falsified", Some(gap), _) => format!("falsified, gap {gap}"),
        (_, _, Some(reason)) => format!("{outcome}: {reason}"),
        _ => outcome.replace('_', " "),
    }
}

// ---------------------------------------------------------------- corpus

fn corpus(cli: &Cli, a: &CorpusArgs) -> Res<Output> {
    let available: Vec<String> = match &cli.fixture_dir {
        Some(dir) => list_fixtures_in(dir).map_err(err)?,
        None => FIXTURE_NAMES.iter().map(ToString::to_string).collect(),
    };
    for name in &a.only {
        if !available.contains(name) {
            return Err(format!(
                "unknown scenario {name:?}; available: {}",
                available.join(", ")
            ));
        }
    }
    let mut scenarios = Vec::new();
    for name in available.iter().filter(|n| a.only.is_empty() || a.only.contains(n)) {
        let sc = load(cli, name)?;
        scenarios.push(run_scenario(&sc));
    }
    let report = CorpusReport {
        passed: scenarios.iter().all(|s| s.passed),
        scenarios,
    };
    let text = match cli.format {
        Format::Json => json_text(&report),
        Format::Csv => corpus_csv(&report)?,
        Format::Text => report.to_string(),
    };
    Ok(Output::new(report.passed, text))
}
