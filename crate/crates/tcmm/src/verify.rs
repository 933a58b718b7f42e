//! Seeded end-to-end checks of built circuits against the reference oracles.
//!
//! Trial `i` draws its instance from `ChaCha8Rng::seed_from_u64(seed + i)`
//! (wrapping), so trials can run in any order and on any number of threads.

use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tcmm_core::matmul::encode_matmul_inputs;
use tcmm_core::oracle::{oracle_matmul, trace_cubed};
use tcmm_core::trace::{decision_gate, encode_trace_inputs};
use tcmm_core::{
    decode_outputs, stats, FmmAlgorithm, IntMatrix, Matrix, Regime, Simulator, ThresholdCircuit,
};

use crate::circuits::{build_circuit, predicted_exponent, BuildConfig, Kind};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub kind: Kind,
    pub n: usize,
    pub bits: u32,
    pub regime: Regime,
    pub symmetric: bool,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub kind: Kind,
    pub algorithm: String,
    pub n: usize,
    pub bits: u32,
    pub symmetric: bool,
    pub levels: Vec<u32>,
    pub gates: u64,
    pub depth: u32,
    pub expected_depth: u32,
    pub wires: u64,
    pub max_fanin: u64,
    pub predicted_exponent: f64,
    pub trials: u64,
    pub trials_passed: u64,
    /// Individual comparisons: one per trial for matmul, three per trial for trace.
    pub checks: u64,
    pub checks_passed: u64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.trials_passed == self.trials && self.checks_passed == self.checks
    }
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial))
}

/// Entries uniform in `[-(2^bits - 1), 2^bits - 1]`.
pub fn random_matrix(rng: &mut impl Rng, n: usize, bits: u32) -> IntMatrix {
    let m = (1i64 << bits) - 1;
    Matrix::from_fn(n, |_, _| BigInt::from(rng.gen_range(-m..=m)))
}

/// Uniform random simple graph (each edge with probability 1/2).
pub fn random_graph(rng: &mut impl Rng, n: usize) -> IntMatrix {
    let mut a = IntMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let e = BigInt::from(u8::from(rng.gen_bool(0.5)));
            a[(i, j)] = e.clone();
            a[(j, i)] = e;
        }
    }
    a
}

/// Outcome of one trial: `(comparisons, comparisons passed)`.
fn run_trial(
    cfg: &VerifyConfig,
    circuit: &ThresholdCircuit,
    sim: &mut Simulator<'_>,
    trial: u64,
) -> Result<(u64, u64)> {
    let mut rng = trial_rng(cfg.seed, trial);
    match cfg.kind {
        Kind::Matmul => {
            let a = random_matrix(&mut rng, cfg.n, cfg.bits);
            let b = random_matrix(&mut rng, cfg.n, cfg.bits);
            sim.run(&encode_matmul_inputs(circuit, &a, &b)?)?;
            let c = decode_outputs(circuit, &sim.outputs())?;
            Ok((1, u64::from(c == oracle_matmul(&a, &b)?)))
        }
        Kind::Trace => {
            let a = if cfg.symmetric {
                random_graph(&mut rng, cfg.n)
            } else {
                random_matrix(&mut rng, cfg.n, cfg.bits)
            };
            let inputs = encode_trace_inputs(circuit, &a, cfg.symmetric)?;
            let value = trace_cubed(&a);
            let gate = decision_gate(circuit).expect("trace circuits end in a gate");
            let mut ok = 0;
            for delta in [-1i64, 0, 1] {
                let tau = &value + delta;
                sim.override_threshold(gate, tau.clone());
                sim.run(&inputs)?;
                ok += u64::from(sim.outputs()[0] == (value >= tau));
            }
            Ok((3, ok))
        }
    }
}

/// Builds the circuit once and checks `cfg.trials` random instances.
pub fn verify(alg: &FmmAlgorithm, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let build = BuildConfig {
        kind: cfg.kind,
        n: cfg.n,
        bits: cfg.bits,
        regime: cfg.regime,
        tau: (cfg.kind == Kind::Trace).then(BigInt::default),
        symmetric: cfg.symmetric,
    };
    let plan = build.plan(alg)?;
    let circuit = build_circuit(alg, &plan)?;
    let st = stats(&circuit);
    let schedule = plan.schedule();

    let workers = std::thread::available_parallelism()
        .map_or(1, NonZeroUsize::get)
        .min(cfg.trials.max(1) as usize);
    let checks = AtomicU64::new(0);
    let passed = AtomicU64::new(0);
    let trials_passed = AtomicU64::new(0);
    std::thread::scope(|s| -> Result<()> {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (circuit, checks, passed, trials_passed) =
                    (&circuit, &checks, &passed, &trials_passed);
                s.spawn(move || -> Result<()> {
                    let mut sim = Simulator::new(circuit);
                    for trial in (w as u64..cfg.trials).step_by(workers) {
                        let (n, ok) = run_trial(cfg, circuit, &mut sim, trial)?;
                        checks.fetch_add(n, Ordering::Relaxed);
                        passed.fetch_add(ok, Ordering::Relaxed);
                        trials_passed.fetch_add(u64::from(ok == n), Ordering::Relaxed);
                    }
                    Ok(())
                })
            })
            .collect();
        for h in handles {
            h.join().expect("trial worker panicked")?;
        }
        Ok(())
    })?;

    Ok(VerifyReport {
        kind: cfg.kind,
        algorithm: alg.name.clone(),
        n: cfg.n,
        bits: cfg.bits,
        symmetric: cfg.symmetric,
        levels: schedule.levels.clone(),
        gates: st.gates,
        depth: st.depth,
        expected_depth: cfg.kind.depth(schedule.t()),
        wires: st.wires,
        max_fanin: st.max_fanin,
        predicted_exponent: predicted_exponent(alg, schedule)?,
        trials: cfg.trials,
        trials_passed: trials_passed.into_inner(),
        checks: checks.into_inner(),
        checks_passed: passed.into_inner(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kind: Kind, symmetric: bool, trials: u64) -> VerifyConfig {
        VerifyConfig {
            kind,
            n: 4,
            bits: if symmetric { 1 } else { 3 },
            regime: Regime::LogLog,
            symmetric,
            trials,
            seed: 7,
        }
    }

    #[test]
    fn small_runs_pass() {
        let alg = FmmAlgorithm::strassen();
        for c in [cfg(Kind::Matmul, false, 20), cfg(Kind::Trace, false, 20), cfg(Kind::Trace, true, 20)] {
            let r = verify(&alg, &c).unwrap();
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.depth, r.expected_depth);
            let per = if c.kind == Kind::Trace { 3 } else { 1 };
            assert_eq!(r.checks, per * c.trials);
        }
    }

    #[test]
    fn zero_trials_is_vacuous() {
        let r = verify(&FmmAlgorithm::strassen(), &cfg(Kind::Matmul, false, 0)).unwrap();
        assert!(r.passed());
        assert_eq!(r.checks, 0);
        assert!(r.gates > 0);
    }

    #[test]
    fn instances_depend_only_on_seed_and_index() {
        let a = random_matrix(&mut trial_rng(7, 3), 4, 5);
        let b = random_matrix(&mut trial_rng(7, 3), 4, 5);
        assert_eq!(a, b);
        assert_ne!(a, random_matrix(&mut trial_rng(8, 3), 4, 5));
        assert!(a.rows().flatten().all(|x| x.magnitude().bits() <= 5));
        let g = random_graph(&mut trial_rng(1, 0), 6);
        tcmm_core::oracle::check_adjacency(&g).unwrap();
    }
}
