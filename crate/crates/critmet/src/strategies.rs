//! Control policies mapping the current posterior and step index to the
//! next control setting.

use crate::error::{Error, Result};
use crate::inference::{posterior_mean, posterior_std, PosteriorGrid};

/// Measurement control policy.
///
/// `TwoStep` holds the initial setting until the posterior standard
/// deviation drops below `threshold`, then locks the control-law value at
/// the trigger-time estimate for the rest of the trajectory. When `epsilon`
/// is set the trigger is instead a fixed burn-in fraction of the
/// measurement budget.
#[derive(Clone, Debug)]
pub enum Strategy {
    NonAdaptive { setting: f64 },
    TwoStep { initial: f64, threshold: f64, epsilon: Option<f64> },
    RealTime,
}

impl Strategy {
    pub fn two_step(initial: f64, threshold: f64, epsilon: Option<f64>) -> Result<Self> {
        if !(threshold > 0.0) {
            return Err(Error::Config(format!("two-step threshold must be positive, got {threshold}")));
        }
        if let Some(e) = epsilon {
            if !(0.0 < e && e < 1.0) {
                return Err(Error::Config(format!("two-step burn-in fraction must be in (0, 1), got {e}")));
            }
        }
        Ok(Strategy::TwoStep { initial, threshold, epsilon })
    }

    /// Fresh per-trajectory state.
    pub fn start(&self) -> StrategyState {
        StrategyState { switched: false, locked_setting: f64::NAN }
    }

    /// Setting for measurement `step` (1-based) of `total_steps`, given the
    /// current posterior. `control_law` maps an estimate to the setting
    /// whose critical point sits at that estimate.
    pub fn next_setting<F: Fn(f64) -> f64>(
        &self,
        state: &mut StrategyState,
        posterior: &PosteriorGrid,
        step: usize,
        total_steps: usize,
        control_law: F,
    ) -> f64 {
        match self {
            Strategy::NonAdaptive { setting } => *setting,
            Strategy::RealTime => control_law(posterior_mean(posterior)),
            Strategy::TwoStep { initial, threshold, epsilon } => {
                if !state.switched {
                    let triggered = match epsilon {
                        Some(e) => {
                            let burn_in = (e * total_steps as f64).ceil().max(1.0) as usize;
                            step > burn_in
                        }
                        None => posterior_std(posterior) < *threshold,
                    };
                    if triggered {
                        state.switched = true;
                        state.locked_setting = control_law(posterior_mean(posterior));
                    }
                }
                if state.switched {
                    state.locked_setting
                } else {
                    *initial
                }
            }
        }
    }
}

/// Per-trajectory policy state; the switch fires at most once.
#[derive(Clone, Copy, Debug)]
pub struct StrategyState {
    switched: bool,
    locked_setting: f64,
}

impl StrategyState {
    pub fn switched(&self) -> bool {
        self.switched
    }
}

/// Feasibility of the two-step protocol's burn-in estimate: the sample
/// budget must dominate `N^{(2/(d nu)) - 1/2}` for the first-stage estimate
/// to resolve the critical window.
#[derive(Clone, Copy, Debug)]
pub struct BudgetReport {
    pub ratio: f64,
    pub feasible: bool,
}

pub fn two_step_sample_budget_check(m: usize, n_sites: usize, d: u32, nu: f64) -> BudgetReport {
    let dnu = d as f64 * nu;
    let required = (n_sites as f64).powf(2.0 / dnu - 0.5);
    let ratio = m as f64 / required;
    BudgetReport { ratio, feasible: ratio >= 1.0 }
}
