//! Which tree levels get materialized.

use alloc::vec::Vec;

use crate::fmm::DerivedParams;

/// Guards `ceil` against values a rounding error above an integer.
const CEIL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    LogLog,
    ConstantDepth(u32),
    /// Equal spacing `h_i = ceil(i l / t)`; for comparison only.
    Uniform(u32),
}

/// Strictly increasing levels `h_1 < ... < h_t = l`; `h_0 = 0` is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSchedule {
    pub levels: Vec<u32>,
    pub l: u32,
    pub rho: f64,
    pub regime: Regime,
}

impl LevelSchedule {
    pub fn t(&self) -> u32 {
        self.levels.len() as u32
    }

    /// `0, h_1, ..., h_t`.
    pub fn with_root(&self) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.levels.len() + 1);
        v.push(0);
        v.extend_from_slice(&self.levels);
        v
    }

    pub fn for_regime(params: &DerivedParams, l: u32, regime: Regime) -> Self {
        match regime {
            Regime::LogLog => schedule_loglog(params, l),
            Regime::ConstantDepth(d) => schedule_constant_depth(params, l, d),
            Regime::Uniform(t) => schedule_uniform(l, t),
        }
    }

    /// Consecutive `(h_{i-1}, h_i)` pairs.
    pub fn steps(&self) -> Vec<(u32, u32)> {
        self.with_root().windows(2).map(|w| (w[0], w[1])).collect()
    }
}

/// Unrounded levels `(1 - gamma^i) rho` for `i = 1..=count`.
pub fn unrounded_levels(gamma: f64, rho: f64, count: u32) -> Vec<f64> {
    (1..=count)
        .map(|i| (1.0 - libm::pow(gamma, f64::from(i))) * rho)
        .collect()
}

fn round_levels(raw: &[f64], l: u32) -> Vec<u32> {
    let mut levels: Vec<u32> = Vec::with_capacity(raw.len() + 1);
    for &h in raw {
        let h = (libm::ceil(h - CEIL_SLACK).max(1.0) as u32).min(l);
        if levels.last().is_none_or(|&prev| h > prev) {
            levels.push(h);
        }
        if h == l {
            break;
        }
    }
    if levels.last() != Some(&l) {
        levels.push(l);
    }
    levels
}

/// Log-log regime: `rho = l`, `t = floor(log_{1/gamma} l) + 1`.
pub fn schedule_loglog(params: &DerivedParams, l: u32) -> LevelSchedule {
    let l = l.max(1);
    let rho = f64::from(l);
    let t = libm::floor(libm::log(rho) / libm::log(1.0 / params.gamma)) as u32 + 1;
    LevelSchedule {
        levels: round_levels(&unrounded_levels(params.gamma, rho, t), l),
        l,
        rho,
        regime: Regime::LogLog,
    }
}

/// `rho = l + eps log_{alpha beta} N` with `eps = gamma^d c`; note
/// `log_{alpha beta} N = l / log_T(alpha beta)`, so `rho = l (1 + gamma^d / (1 - gamma))`.
pub fn constant_depth_rho(params: &DerivedParams, l: u32, d: u32) -> f64 {
    let eps = libm::pow(params.gamma, f64::from(d)) * params.c_const;
    f64::from(l) + eps * f64::from(l) / params.log_t_alpha_beta()
}

/// Constant-depth regime: at most `d` stages.
pub fn schedule_constant_depth(params: &DerivedParams, l: u32, d: u32) -> LevelSchedule {
    let l = l.max(1);
    let d = d.max(1);
    let rho = constant_depth_rho(params, l, d);
    LevelSchedule {
        levels: round_levels(&unrounded_levels(params.gamma, rho, d), l),
        l,
        rho,
        regime: Regime::ConstantDepth(d),
    }
}

/// Equal spacing over `t` stages.
pub fn schedule_uniform(l: u32, t: u32) -> LevelSchedule {
    let l = l.max(1);
    let t = t.clamp(1, l);
    let raw: Vec<f64> = (1..=t)
        .map(|i| f64::from(i) * f64::from(l) / f64::from(t))
        .collect();
    LevelSchedule {
        levels: round_levels(&raw, l),
        l,
        rho: f64::from(l),
        regime: Regime::Uniform(t),
    }
}

/// `omega + c gamma^d`.
pub fn predict_gate_exponent(params: &DerivedParams, d: u32) -> f64 {
    params.omega + params.c_const * libm::pow(params.gamma, f64::from(d))
}

/// Per-stage cost terms `alpha^{h_{i-1}} beta^{h_i}` on unrounded levels, with `h_0 = 0`.
pub fn balance_terms(params: &DerivedParams, rho: f64, count: u32) -> Vec<f64> {
    let mut prev = 0.0;
    unrounded_levels(params.gamma, rho, count)
        .into_iter()
        .map(|h| {
            let term = libm::pow(params.alpha_f64(), prev) * libm::pow(params.beta_f64(), h);
            prev = h;
            term
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::FmmAlgorithm;

    fn strassen() -> DerivedParams {
        FmmAlgorithm::strassen().derive_params().unwrap()
    }

    #[test]
    fn loglog_examples() {
        let p = strassen();
        assert_eq!(schedule_loglog(&p, 4).levels, [3, 4]);
        assert_eq!(schedule_loglog(&p, 1).levels, [1]);
        let s = schedule_loglog(&p, 16);
        assert_eq!(s.t(), 4);
        assert_eq!(s.levels.last(), Some(&16));
    }

    #[test]
    fn constant_depth_examples() {
        let p = strassen();
        let s = schedule_constant_depth(&p, 4, 2);
        assert!((s.rho - 5.891).abs() < 1e-3);
        assert_eq!(s.levels, [4]);
        let s = schedule_constant_depth(&p, 4, 10);
        assert!(s.t() <= 4);
        assert_eq!(s.levels, schedule_loglog(&p, 4).levels);
        // gamma^d underflows: eps = 0 and rho = l
        let s = schedule_constant_depth(&p, 6, 5000);
        assert_eq!(s.rho, 6.0);
        assert_eq!(s.levels.last(), Some(&6));
    }

    #[test]
    fn schedules_end_at_l() {
        let p = strassen();
        for l in 1..=20 {
            let s = schedule_loglog(&p, l);
            assert_eq!(*s.levels.last().unwrap(), l);
            assert!(s.levels.windows(2).all(|w| w[0] < w[1]));
            assert!(s.levels[0] > 0);
            for d in 1..=8 {
                let s = schedule_constant_depth(&p, l, d);
                assert_eq!(*s.levels.last().unwrap(), l);
                assert!(s.t() <= d);
            }
        }
    }

    #[test]
    fn constant_depth_stage_count_is_monotone() {
        let p = strassen();
        for l in 1..=20 {
            let target = schedule_loglog(&p, l).t();
            let mut prev = 0;
            for d in 1..=12 {
                let t = schedule_constant_depth(&p, l, d).t();
                if prev < target {
                    assert!(t >= prev, "l={l} d={d}");
                }
                prev = t;
            }
        }
    }

    #[test]
    fn balance_terms_are_equal() {
        let p = strassen();
        let ab = p.alpha_f64() * p.beta_f64();
        for l in 1..=20 {
            for rho in [f64::from(l), constant_depth_rho(&p, l, 3)] {
                let want = libm::pow(ab, rho);
                for term in balance_terms(&p, rho, 6) {
                    assert!((term / want - 1.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn exponent_prediction() {
        let p = strassen();
        assert!((predict_gate_exponent(&p, 4) - 2.899).abs() < 1e-3);
        assert!((predict_gate_exponent(&p, 1) - 3.585).abs() < 2e-3);
        assert!((predict_gate_exponent(&p, 200) - p.omega).abs() < 1e-12);
    }

    #[test]
    fn uniform_spacing() {
        assert_eq!(schedule_uniform(6, 3).levels, [2, 4, 6]);
        assert_eq!(schedule_uniform(5, 2).levels, [3, 5]);
        assert_eq!(schedule_uniform(2, 9).levels, [1, 2]);
    }
}
