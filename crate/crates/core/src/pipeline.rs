//! Pieces shared by the matmul and trace pipelines.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::circuit::{stats, CircuitBuilder, ThresholdCircuit};
use crate::error::{Error, Result};
use crate::fabric::{CostModel, Fabric};
use crate::fmm::{FmmAlgorithm, Side};
use crate::matrix::Matrix;
use crate::schedule::{LevelSchedule, Regime};
use crate::stage::{expand_forward_level, LevelMatrices};

/// Gates emitted by one named stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageCount {
    pub name: String,
    pub gates: u64,
}

/// Size measures of a pipeline, from a built circuit or from the cost model.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CostReport {
    pub gates: u64,
    pub depth: u32,
    pub wires: u64,
    pub max_fanin: u64,
    pub per_layer_gate_counts: Vec<u64>,
    pub stages: Vec<StageCount>,
}

const STAGE_PREFIX: &str = "stage.";

impl CostReport {
    pub(crate) fn from_model(model: &CostModel, depth: u32, stages: Vec<StageCount>) -> Self {
        let t = model.totals();
        CostReport {
            gates: t.gates,
            depth,
            wires: t.wires,
            max_fanin: t.max_fanin,
            per_layer_gate_counts: t.per_layer_gate_counts.clone(),
            stages,
        }
    }

    /// Measures a built circuit; stage counts come from its metadata.
    pub fn of_circuit(circuit: &ThresholdCircuit) -> Self {
        let st = stats(circuit);
        let stages = circuit
            .metadata()
            .iter()
            .filter_map(|(k, v)| {
                let (idx, name) = k.strip_prefix(STAGE_PREFIX)?.split_once('.')?;
                Some((idx.parse::<u32>().ok()?, (name, v.parse().ok()?)))
            })
            .collect::<BTreeMap<_, _>>();
        CostReport {
            gates: st.gates,
            depth: st.depth,
            wires: st.wires,
            max_fanin: st.max_fanin,
            per_layer_gate_counts: st.per_layer_gate_counts,
            stages: stages
                .into_iter()
                .map(|(_, (name, gates))| StageCount {
                    name: name.to_string(),
                    gates,
                })
                .collect(),
        }
    }
}

/// Records stage counts as ordered metadata entries.
pub(crate) fn record_stages(builder: &mut CircuitBuilder, stages: &[StageCount]) {
    for (i, s) in stages.iter().enumerate() {
        builder.set_metadata(format!("{STAGE_PREFIX}{i:03}.{}", s.name), s.gates.to_string());
    }
}

pub(crate) fn record_schedule(builder: &mut CircuitBuilder, alg: &FmmAlgorithm, schedule: &LevelSchedule) {
    let levels: Vec<String> = schedule.levels.iter().map(|h| h.to_string()).collect();
    builder.set_metadata("algorithm", alg.name.clone());
    builder.set_metadata("levels", levels.join(","));
    builder.set_metadata("t", schedule.t().to_string());
    let regime = match schedule.regime {
        Regime::LogLog => "loglog".to_string(),
        Regime::ConstantDepth(d) => format!("depth-budget {d}"),
        Regime::Uniform(t) => format!("uniform {t}"),
    };
    builder.set_metadata("regime", regime);
}

/// Runs `f` and appends the number of gates it emitted under `name`.
pub(crate) fn counted<F: Fabric, T>(
    fabric: &mut F,
    stages: &mut Vec<StageCount>,
    name: String,
    f: impl FnOnce(&mut F) -> Result<T>,
) -> Result<T> {
    let before = fabric.gates();
    let out = f(fabric)?;
    stages.push(StageCount {
        name,
        gates: fabric.gates() - before,
    });
    Ok(out)
}

/// Materializes the leaves of one tree along the schedule.
pub(crate) fn forward_tree<F: Fabric>(
    fabric: &mut F,
    alg: &FmmAlgorithm,
    side: Side,
    tag: &str,
    root: Matrix<F::Value>,
    schedule: &LevelSchedule,
    stages: &mut Vec<StageCount>,
) -> Result<LevelMatrices<F::Value>> {
    let mut level = LevelMatrices::root(root);
    for &h in &schedule.levels {
        level = counted(fabric, stages, format!("forward-{tag}-h{h}"), |f| {
            expand_forward_level(f, alg, side, &level, h)
        })?;
    }
    Ok(level)
}

/// `l = log_T n`, checking that the schedule was made for it.
pub(crate) fn check_plan(alg: &FmmAlgorithm, n: usize, bits: u32, schedule: &LevelSchedule) -> Result<u32> {
    alg.check_shape()?;
    let l = alg.levels_for(n)?;
    if schedule.l != l || schedule.levels.last() != Some(&l) {
        return Err(Error::ShapeMismatch(format!(
            "schedule ends at level {:?}, N = {n} needs {l}",
            schedule.levels.last()
        )));
    }
    if bits == 0 {
        return Err(Error::ShapeMismatch("entries need at least one bit".into()));
    }
    Ok(l)
}
