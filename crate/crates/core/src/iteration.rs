//! Fixed-point iteration with convergence, limit-cycle and divergence
//! classification shared by the series and recursive evaluators.

use std::collections::VecDeque;

use crate::error::EvalError;
use crate::linalg::{diff_inf, norm_inf};

pub const HISTORY: usize = 16;
pub const MAX_PERIOD: usize = 8;
pub const REPEAT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Declare divergence once ‖f‖∞ exceeds this.
    pub divergence_bound: Option<f64>,
}

impl IterationConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(EvalError::InvalidTolerance(self.tol));
        }
        if self.max_iter == 0 {
            return Err(EvalError::InvalidIterationBudget);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Classified {
    Converged {
        state: Vec<f64>,
        iterations: usize,
    },
    Oscillating {
        period: usize,
        states: Vec<Vec<f64>>,
    },
    Diverging {
        growth: f64,
    },
    Exhausted {
        iterations: usize,
        last_step: f64,
    },
}

/// Iterates `step` from `f0`. A period-p cycle is reported when f_i repeats
/// f_{i−p} within `REPEAT_TOL` while the step size stays far above both the
/// repeat error and `tol`; a slowly decaying alternation is not a cycle.
pub fn run<F>(f0: Vec<f64>, cfg: &IterationConfig, mut step: F) -> Result<Classified, EvalError>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    cfg.validate()?;
    let mut history: VecDeque<Vec<f64>> = VecDeque::with_capacity(HISTORY + 1);
    history.push_back(f0);
    let mut last_step = f64::INFINITY;
    for i in 1..=cfg.max_iter {
        let prev = history.back().expect("history is never empty");
        let next = step(prev);
        last_step = diff_inf(&next, prev);
        if let Some(bound) = cfg.divergence_bound {
            let size = norm_inf(&next);
            if !size.is_finite() || size > bound {
                let growth = size / norm_inf(prev).max(f64::MIN_POSITIVE);
                return Ok(Classified::Diverging { growth });
            }
        }
        if next.iter().any(|x| !x.is_finite()) {
            return Ok(Classified::Diverging {
                growth: f64::INFINITY,
            });
        }
        if last_step <= cfg.tol {
            return Ok(Classified::Converged {
                state: next,
                iterations: i,
            });
        }
        history.push_back(next);
        if history.len() > HISTORY {
            history.pop_front();
        }
        let len = history.len();
        let cur = &history[len - 1];
        for p in 2..=MAX_PERIOD.min(len - 1) {
            let repeat = diff_inf(cur, &history[len - 1 - p]);
            if repeat <= REPEAT_TOL * (1.0 + norm_inf(cur))
                && last_step > 10.0 * cfg.tol
                && last_step > 1e3 * repeat
            {
                let mut states = vec![Vec::new(); p];
                for back in 0..p {
                    let idx = i - back;
                    states[idx % p] = history[len - 1 - back].clone();
                }
                return Ok(Classified::Oscillating { period: p, states });
            }
        }
    }
    Ok(Classified::Exhausted {
        iterations: cfg.max_iter,
        last_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> IterationConfig {
        IterationConfig {
            tol: 1e-9,
            max_iter: 10_000,
            divergence_bound: Some(1e12),
        }
    }

    #[test]
    fn contraction_converges() {
        let out = run(vec![1.0], &cfg(), |f| vec![0.5 * f[0] + 1.0]).unwrap();
        match out {
            Classified::Converged { state, .. } => assert!((state[0] - 2.0).abs() < 1e-8),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn alternating_decay_is_not_a_cycle() {
        // Eigenvalue −0.5: consecutive differences halve, two-step differences
        // are smaller still, and the iteration must still report convergence.
        let out = run(vec![1.0], &cfg(), |f| vec![1.0 - 0.5 * f[0]]).unwrap();
        assert!(matches!(out, Classified::Converged { .. }), "{out:?}");
        let slow = run(vec![1.0], &cfg(), |f| vec![1.0 - 0.95 * f[0]]).unwrap();
        assert!(matches!(slow, Classified::Converged { .. }), "{slow:?}");
    }

    #[test]
    fn period_three() {
        let out = run(vec![0.0], &cfg(), |f| vec![(f[0] + 1.0) % 3.0]).unwrap();
        assert_eq!(
            out,
            Classified::Oscillating {
                period: 3,
                states: vec![vec![0.0], vec![1.0], vec![2.0]]
            }
        );
    }

    #[test]
    fn growth_diverges() {
        let out = run(vec![1.0], &cfg(), |f| vec![2.0 * f[0]]).unwrap();
        match out {
            Classified::Diverging { growth } => assert_eq!(growth, 2.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn budget_exhausted() {
        let c = IterationConfig {
            max_iter: 3,
            ..cfg()
        };
        let out = run(vec![0.0], &c, |f| vec![f[0] + 1.0]).unwrap();
        assert_eq!(
            out,
            Classified::Exhausted {
                iterations: 3,
                last_step: 1.0
            }
        );
    }

    #[test]
    fn invalid_config() {
        let c = IterationConfig { tol: 0.0, ..cfg() };
        assert!(matches!(
            run(vec![0.0], &c, |f| f.to_vec()),
            Err(EvalError::InvalidTolerance(_))
        ));
        let c = IterationConfig {
            max_iter: 0,
            ..cfg()
        };
        assert!(matches!(
            run(vec![0.0], &c, |f| f.to_vec()),
            Err(EvalError::InvalidIterationBudget)
        ));
    }
}
