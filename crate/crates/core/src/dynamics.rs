//! Dynamical check of the effective generator: evolve the full perturbed
//! Lindbladian, project onto the DFS with `P∞`, and compare against the
//! effective evolution over a ladder of perturbation strengths.

use rayon::prelude::*;

use crate::channel::{hermitian_eigenvalues, trace_distance};
use crate::effective::{effective_lindbladian_closed, Perturbation};
use crate::error::{EjofError, Result};
use crate::linalg;
use crate::lindblad::{
    assemble_lindbladian, asymptotic_projection_analytic, StructuredLindbladian,
};
use crate::operator::{
    devectorize, ensure_dim, hermitian_residual, real, vectorize, Operator, Superoperator,
};

/// Errors at or below this value are treated as numerical zero by the fits.
pub const ERROR_FLOOR: f64 = 1e-11;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Allowed growth of the drift constant across the ε ladder.
pub const DRIFT_SPREAD: f64 = 1.5;
pub const DEFAULT_TIMES: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
pub const DEFAULT_EPSILONS: [f64; 3] = [0.04, 0.02, 0.01];

/// How rescaled time maps to physical time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeScaling {
    /// `t = τ/ε`
    FirstOrder,
    /// `t = τ/ε²`
    SecondOrder,
}

impl TimeScaling {
    pub fn exponent(self) -> i32 {
        match self {
            TimeScaling::FirstOrder => 1,
            TimeScaling::SecondOrder => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TimeScaling::FirstOrder => "first-order",
            TimeScaling::SecondOrder => "second-order",
        }
    }

    pub fn physical_time(self, tau: f64, epsilon: f64) -> f64 {
        tau / epsilon.powi(self.exponent())
    }
}

impl std::str::FromStr for TimeScaling {
    type Err = EjofError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-order" | "first" | "1" => Ok(TimeScaling::FirstOrder),
            "second-order" | "second" | "2" => Ok(TimeScaling::SecondOrder),
            other => Err(EjofError::InvalidInput(format!(
                "unknown time scaling '{other}' (expected first-order or second-order)"
            ))),
        }
    }
}

/// Sweep over perturbation strengths and rescaled times. Initial states are
/// DFS density matrices in DFS coordinates.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub epsilons: Vec<f64>,
    pub times: Vec<f64>,
    pub initial_states: Vec<Operator>,
    pub mode: TimeScaling,
}

impl SweepConfig {
    pub fn new(initial_states: Vec<Operator>, mode: TimeScaling) -> Self {
        Self {
            epsilons: DEFAULT_EPSILONS.to_vec(),
            times: DEFAULT_TIMES.to_vec(),
            initial_states,
            mode,
        }
    }

    pub fn with_default_states(dfs_dim: usize, mode: TimeScaling) -> Self {
        Self::new(default_states(dfs_dim), mode)
    }

    pub fn validate(&self, dfs_dim: usize) -> Result<()> {
        if self.epsilons.is_empty() || self.times.is_empty() || self.initial_states.is_empty() {
            return Err(EjofError::InvalidInput(
                "sweep needs at least one epsilon, time and initial state".into(),
            ));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(EjofError::InvalidInput(format!(
                "epsilon {e} is not positive"
            )));
        }
        if let Some(t) = self.times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return Err(EjofError::InvalidInput(format!("time {t} is negative")));
        }
        for (k, rho) in self.initial_states.iter().enumerate() {
            ensure_dim(rho, dfs_dim)?;
            let scale = rho.norm().max(1.0);
            if hermitian_residual(rho) > TRACE_TOL * scale {
                return Err(EjofError::InvalidInput(format!(
                    "initial state {k} is not Hermitian"
                )));
            }
            if (rho.trace() - real(1.0)).norm() > TRACE_TOL {
                return Err(EjofError::InvalidInput(format!(
                    "initial state {k} has trace {}",
                    rho.trace()
                )));
            }
            let min = hermitian_eigenvalues(rho).min();
            if min < -POSITIVITY_TOL {
                return Err(EjofError::InvalidInput(format!(
                    "initial state {k} has negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(())
    }
}

/// `|0⟩⟨0|`, `|d−1⟩⟨d−1|` and the uniform superposition.
pub fn default_states(dfs_dim: usize) -> Vec<Operator> {
    let mut out = vec![Operator::zeros(dfs_dim, dfs_dim)];
    out[0][(0, 0)] = real(1.0);
    if dfs_dim > 1 {
        let mut last = Operator::zeros(dfs_dim, dfs_dim);
        last[(dfs_dim - 1, dfs_dim - 1)] = real(1.0);
        out.push(last);
        out.push(Operator::from_element(
            dfs_dim,
            dfs_dim,
            real(1.0 / dfs_dim as f64),
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub epsilon_index: usize,
    pub tau_index: usize,
    pub state_index: usize,
    pub epsilon: f64,
    pub tau: f64,
    pub physical_time: f64,
    /// Trace distance between projected full and effective evolution.
    pub trace_distance: f64,
    /// Trace distance between projected full evolution and the initial state.
    pub drift: f64,
    pub full_trace_error: f64,
    pub effective_trace_error: f64,
    pub full_min_eigenvalue: f64,
    pub effective_min_eigenvalue: f64,
}

#[derive(Debug, Clone)]
pub struct ErrorTable {
    pub mode: TimeScaling,
    pub epsilons: Vec<f64>,
    pub times: Vec<f64>,
    pub state_count: usize,
    /// Ordered by `(epsilon_index, tau_index, state_index)`.
    pub rows: Vec<ErrorRow>,
}

impl ErrorTable {
    /// `max` over states and times of the trace distance at one ε.
    pub fn max_error(&self, epsilon_index: usize) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.epsilon_index == epsilon_index)
            .map(|r| r.trace_distance)
            .fold(0.0, f64::max)
    }

    pub fn max_error_at(&self, epsilon_index: usize, tau_index: usize) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.epsilon_index == epsilon_index && r.tau_index == tau_index)
            .map(|r| r.trace_distance)
            .fold(0.0, f64::max)
    }

    pub fn max_trace_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.full_trace_error.max(r.effective_trace_error))
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.full_min_eigenvalue.min(r.effective_min_eigenvalue))
            .fold(f64::INFINITY, f64::min)
    }

    /// Trace within `TRACE_TOL` and no eigenvalue below `-POSITIVITY_TOL`.
    pub fn physical(&self) -> bool {
        self.max_trace_error() <= TRACE_TOL && self.min_eigenvalue() >= -POSITIVITY_TOL
    }
}

/// Runs the sweep. The full generator at scale ε is assembled from
/// `H + εV` and `F + εf`; the effective one is the closed form at the same
/// scale, divided by `ε^k` so that it acts in rescaled time.
pub fn evolve_and_compare(
    l: &StructuredLindbladian,
    pert: &Perturbation,
    cfg: &SweepConfig,
) -> Result<ErrorTable> {
    let dfs = l.dfs();
    cfg.validate(dfs.dfs_dim())?;
    let p_inf = asymptotic_projection_analytic(l)?;

    let generators = cfg
        .epsilons
        .iter()
        .map(|&eps| {
            let scaled = pert.scaled(eps);
            let h = l.hamiltonian() + &scaled.v;
            let jumps: Vec<Operator> = l
                .jumps()
                .iter()
                .zip(&scaled.fs)
                .map(|(big, small)| big + small)
                .collect();
            let full = assemble_lindbladian(&h, &jumps)?;
            let eff = effective_lindbladian_closed(l, &scaled)?.superop;
            let eff = eff.scale(real(eps.powi(-cfg.mode.exponent())));
            Ok((full, eff))
        })
        .collect::<Result<Vec<(Superoperator, Superoperator)>>>()?;

    let cells: Vec<(usize, usize)> = (0..cfg.epsilons.len())
        .flat_map(|e| (0..cfg.times.len()).map(move |t| (e, t)))
        .collect();

    let lifted: Vec<Operator> = cfg.initial_states.iter().map(|r| dfs.from_dfs(r)).collect();

    let blocks = cells
        .par_iter()
        .map(|&(ei, ti)| {
            let eps = cfg.epsilons[ei];
            let tau = cfg.times[ti];
            let t = cfg.mode.physical_time(tau, eps);
            let (full, eff) = &generators[ei];
            let full_prop = p_inf.matrix() * linalg::expm(full.matrix(), t);
            let eff_prop = linalg::expm(eff.matrix(), tau);
            cfg.initial_states
                .iter()
                .zip(&lifted)
                .enumerate()
                .map(|(si, (rho0, big0))| {
                    let e_full = dfs.to_dfs(&devectorize(&(&full_prop * vectorize(big0)))?);
                    let e_eff = devectorize(&(&eff_prop * vectorize(rho0)))?;
                    Ok(ErrorRow {
                        epsilon_index: ei,
                        tau_index: ti,
                        state_index: si,
                        epsilon: eps,
                        tau,
                        physical_time: t,
                        trace_distance: trace_distance(&e_full, &e_eff),
                        drift: trace_distance(&e_full, rho0),
                        full_trace_error: (e_full.trace() - real(1.0)).norm(),
                        effective_trace_error: (e_eff.trace() - real(1.0)).norm(),
                        full_min_eigenvalue: hermitian_eigenvalues(&e_full).min(),
                        effective_min_eigenvalue: hermitian_eigenvalues(&e_eff).min(),
                    })
                })
                .collect::<Result<Vec<ErrorRow>>>()
        })
        .collect::<Result<Vec<Vec<ErrorRow>>>>()?;

    Ok(ErrorTable {
        mode: cfg.mode,
        epsilons: cfg.epsilons.clone(),
        times: cfg.times.clone(),
        state_count: cfg.initial_states.len(),
        rows: blocks.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitOutcome {
    Slope(f64),
    /// Every error is at the numerical floor.
    AtFloor,
    /// Errors grow somewhere along the decreasing ε ladder.
    NonMonotone,
}

impl FitOutcome {
    pub fn slope(&self) -> Option<f64> {
        match self {
            FitOutcome::Slope(s) => Some(*s),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            FitOutcome::Slope(s) => format!("slope {s}"),
            FitOutcome::AtFloor => "at floor".into(),
            FitOutcome::NonMonotone => "non-monotone".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceFit {
    /// Fit of the max-over-τ error.
    pub overall: FitOutcome,
    /// One fit per τ.
    pub per_tau: Vec<(f64, FitOutcome)>,
    pub max_errors: Vec<f64>,
}

impl ConvergenceFit {
    /// Slope at least `min_slope`, or all errors at the floor.
    pub fn converges(&self, min_slope: f64) -> bool {
        match self.overall {
            FitOutcome::Slope(s) => s >= min_slope,
            FitOutcome::AtFloor => true,
            FitOutcome::NonMonotone => false,
        }
    }
}

/// Log-log slope of error against ε. Requires at least three ε values in
/// geometric progression.
pub fn convergence_order(table: &ErrorTable) -> Result<ConvergenceFit> {
    let eps = &table.epsilons;
    if eps.len() < 3 {
        return Err(EjofError::InvalidInput(format!(
            "need at least 3 epsilon values, got {}",
            eps.len()
        )));
    }
    let ratio = eps[1] / eps[0];
    if !(ratio > 0.0 && ratio != 1.0)
        || eps
            .windows(2)
            .any(|w| ((w[1] / w[0]) / ratio - 1.0).abs() > 1e-6)
    {
        return Err(EjofError::InvalidInput(
            "epsilon values are not a geometric progression".into(),
        ));
    }
    let max_errors: Vec<f64> = (0..eps.len()).map(|e| table.max_error(e)).collect();
    let per_tau = (0..table.times.len())
        .map(|ti| {
            let errs: Vec<f64> = (0..eps.len()).map(|e| table.max_error_at(e, ti)).collect();
            (table.times[ti], fit(eps, &errs))
        })
        .collect();
    Ok(ConvergenceFit {
        overall: fit(eps, &max_errors),
        per_tau,
        max_errors,
    })
}

fn fit(eps: &[f64], errs: &[f64]) -> FitOutcome {
    if errs.iter().all(|e| *e <= ERROR_FLOOR) {
        return FitOutcome::AtFloor;
    }
    let mut order: Vec<usize> = (0..eps.len()).collect();
    order.sort_by(|a, b| eps[*b].total_cmp(&eps[*a]));
    let monotone = order.windows(2).all(|w| {
        let (big, small) = (errs[w[0]], errs[w[1]]);
        small <= big || small <= ERROR_FLOOR
    });
    if !monotone {
        return FitOutcome::NonMonotone;
    }
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(errs)
        .filter(|(_, e)| **e > ERROR_FLOOR)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return FitOutcome::AtFloor;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    FitOutcome::Slope(sxy / sxx)
}

/// Drift of the projected full state away from `ρ₀`, normalized as
/// `C_ε = max_{τ,ρ₀} drift / (ε (1 + τ))`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    pub constants: Vec<(f64, f64)>,
    pub spread: f64,
    pub pass: bool,
}

/// Passes when no `C_ε` exceeds `DRIFT_SPREAD` times the constant fitted at
/// the largest ε. A decay at rate `ε²` in physical time gives drift `O(τ)`
/// independent of ε, so `C_ε` grows like `1/ε` and the check fails.
pub fn drift_check(table: &ErrorTable) -> DriftReport {
    let constants: Vec<(f64, f64)> = table
        .epsilons
        .iter()
        .enumerate()
        .map(|(ei, &eps)| {
            let c = table
                .rows
                .iter()
                .filter(|r| r.epsilon_index == ei)
                .map(|r| {
                    if r.drift <= ERROR_FLOOR {
                        0.0
                    } else {
                        r.drift / (eps * (1.0 + r.tau))
                    }
                })
                .fold(0.0, f64::max);
            (eps, c)
        })
        .collect();
    let reference = constants
        .iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|c| c.1)
        .unwrap_or(0.0);
    let worst = constants.iter().map(|c| c.1).fold(0.0, f64::max);
    let spread = if worst == 0.0 {
        1.0
    } else if reference == 0.0 {
        f64::INFINITY
    } else {
        worst / reference
    };
    DriftReport {
        constants,
        spread,
        pass: spread <= DRIFT_SPREAD,
    }
}

/// Population `⟨i|ρ|i⟩`.
pub fn population(rho: &Operator, index: usize) -> f64 {
    rho[(index, index)].re
}
