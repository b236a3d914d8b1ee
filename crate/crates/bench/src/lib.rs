//! Workloads shared by the benchmarks.

use std::sync::Arc;

use cofix_core::iteration::pipeline_samples;
use cofix_core::scalar::rat;
use cofix_core::{load_fixture, Condition, ControlFunction, PiecewiseMap, PipelineConfig, SampleSet, Scenario};

/// The maps of the first scenario, their main condition and its samples.
pub struct ConditionWorkload {
    pub t: Arc<PiecewiseMap>,
    pub f: Arc<PiecewiseMap>,
    pub g: Arc<PiecewiseMap>,
    pub condition: Condition,
    pub samples: SampleSet,
}

pub fn scenario(name: &str) -> Scenario {
    load_fixture(name).expect("bundled fixture")
}

pub fn condition_workload(resolution: usize) -> ConditionWorkload {
    let sc = scenario("ex3_3");
    let t = sc.map("T").unwrap();
    let f = sc.map("f").unwrap();
    let g = sc.map("g").unwrap();
    let psi = ControlFunction::linear(rat(2, 3));
    let samples = pipeline_samples(&[&t, &f, &g], resolution, &Default::default()).unwrap();
    ConditionWorkload {
        t,
        f,
        g,
        condition: Condition::Main { psi },
        samples,
    }
}

pub fn pipeline_config() -> PipelineConfig {
    PipelineConfig::default()
        .with_condition(Condition::Main {
            psi: ControlFunction::linear(rat(2, 3)),
        })
        .with_x0(rat(1, 2))
}

/// A piecewise φ that is only upper semicontinuous at 1, used for ψ synthesis.
pub fn jump_phi() -> ControlFunction {
    scenario("ex3_3").control("phi").expect("control phi").clone()
}
