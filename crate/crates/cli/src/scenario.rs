//! Named scenarios shared by the `scenario` command and problem files.

use ejof_core::effective::{
    effective_lindbladian_closed, effective_lindbladian_general, Perturbation,
};
use ejof_core::lindblad::StructuredLindbladian;
use ejof_core::operator::{c64, ket_bra, real, relative_difference, zeros, DEFAULT_TOL};
use ejof_core::qec::{pauli_miscalibration, repetition_code_recovery, robustness_check, Pauli};
use ejof_core::random::{random_hermitian, random_matrix, random_rect, rng};
use ejof_core::scenarios::{
    cancellation_check, coherent_cancellation_drive, random_orthogonal_family,
    random_structured_instance, target_generator, three_level_system, universal_dissipation,
    with_hamiltonian_compensation, ThreeLevelParams, CANCELLATION_TOL, SURJECTIVITY_TOL,
};
use ejof_core::{Corner, DfsProjector, EjofError, Operator, Result, Superoperator};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::report::{complex, Verdict};

pub const NAMES: [&str; 5] = [
    "three-level",
    "cancellation",
    "coherent-cancel",
    "universal",
    "repetition",
];

/// Tolerance for the closed-form three-level checks.
pub const THREE_LEVEL_TOL: f64 = 1e-11;
pub const DARK_TOL: f64 = 1e-12;
pub const COHERENT_TOL: f64 = 1e-11;
pub const UNIVERSAL_TOL: f64 = 1e-9;
/// `‖L_eff‖ ≤ tol·‖pert‖²` for cancelled scenarios.
pub const ZERO_TOL: f64 = 1e-10;
/// Amplitude of the Pauli targets of the universal scenario.
pub const TARGET_SCALE: f64 = 0.1;

/// Scenario selector as it appears in problem files.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioParams {
    pub name: String,
    pub delta: Option<f64>,
    #[serde(rename = "Gamma")]
    pub gamma_big: Option<f64>,
    pub gamma: Option<f64>,
    pub seed: Option<u64>,
    pub targets: Option<String>,
    pub miscal: Option<String>,
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Targets {
    Pauli,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    ThreeLevel(ThreeLevelParams),
    Cancellation { seed: u64 },
    CoherentCancel { seed: u64 },
    Universal { seed: u64, targets: Targets },
    Repetition { miscal: Pauli, eps: f64 },
}

pub struct Built {
    pub l: StructuredLindbladian,
    pub pert: Perturbation,
    pub details: Value,
    pub verdicts: Vec<Verdict>,
}

impl Built {
    pub fn into_system(self) -> (StructuredLindbladian, Perturbation) {
        (self.l, self.pert)
    }
}

impl Scenario {
    pub fn from_params(p: &ScenarioParams, default_seed: u64) -> Result<Self> {
        let seed = p.seed.unwrap_or(default_seed);
        match p.name.as_str() {
            "three-level" => Ok(Scenario::ThreeLevel(ThreeLevelParams {
                delta: p.delta.unwrap_or(1.0),
                gamma_big: p.gamma_big.unwrap_or(2.0),
                gamma: p.gamma.unwrap_or(0.04),
            })),
            "cancellation" => Ok(Scenario::Cancellation { seed }),
            "coherent-cancel" => Ok(Scenario::CoherentCancel { seed }),
            "universal" => {
                let targets = match p.targets.as_deref().unwrap_or("pauli") {
                    "pauli" => Targets::Pauli,
                    "random" => Targets::Random,
                    other => {
                        return Err(EjofError::InvalidInput(format!(
                            "unknown targets '{other}' (expected pauli or random)"
                        )))
                    }
                };
                Ok(Scenario::Universal { seed, targets })
            }
            "repetition" => Ok(Scenario::Repetition {
                miscal: p.miscal.as_deref().unwrap_or("Z").parse()?,
                eps: p.eps.unwrap_or(ejof_core::qec::DEFAULT_EPSILON),
            }),
            other => Err(EjofError::InvalidInput(format!(
                "unknown scenario '{other}'; valid names: {}",
                NAMES.join(", ")
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::ThreeLevel(_) => NAMES[0],
            Scenario::Cancellation { .. } => NAMES[1],
            Scenario::CoherentCancel { .. } => NAMES[2],
            Scenario::Universal { .. } => NAMES[3],
            Scenario::Repetition { .. } => NAMES[4],
        }
    }

    pub fn build(&self) -> Result<Built> {
        match *self {
            Scenario::ThreeLevel(p) => three_level(p),
            Scenario::Cancellation { seed } => cancellation(seed),
            Scenario::CoherentCancel { seed } => coherent(seed),
            Scenario::Universal { seed, targets } => universal(seed, targets),
            Scenario::Repetition { miscal, eps } => repetition(miscal, eps),
        }
    }
}

fn three_level(p: ThreeLevelParams) -> Result<Built> {
    let (l, pert) = three_level_system(p)?;
    let eff = effective_lindbladian_closed(&l, &pert)?;
    let coefficient = real(p.gamma.sqrt() * p.delta) / c64(p.delta, -p.gamma_big / 2.0);
    let expected = ket_bra(2, 0, 1) * coefficient;
    let lamb = p.gamma_big * p.gamma * p.delta
        / (4.0 * (p.delta * p.delta + p.gamma_big * p.gamma_big / 4.0));
    let shift = Superoperator::hamiltonian(&(ket_bra(2, 1, 1) * real(lamb)))?;
    let h_gen = Superoperator::hamiltonian(&eff.h_eff)?;
    let shift_residual = (shift.matrix() - h_gen.matrix()).norm() / shift.norm().max(1.0);

    let mut verdicts = vec![
        Verdict::at_most(
            "F_eff = √γ δ/(δ − iΓ/2) |0⟩⟨1|",
            relative_difference(&expected, &eff.f_effs[0]),
            THREE_LEVEL_TOL,
        ),
        Verdict::at_most(
            "H_eff generates the shift λ|1⟩⟨1|",
            shift_residual,
            THREE_LEVEL_TOL,
        ),
    ];
    if p.delta == 0.0 {
        verdicts.push(Verdict::at_most(
            "F_eff vanishes",
            eff.f_effs[0].norm(),
            DARK_TOL,
        ));
    }
    Ok(Built {
        l,
        pert,
        details: json!({
            "delta": p.delta,
            "Gamma": p.gamma_big,
            "gamma": p.gamma,
            "f_eff_coefficient": complex(eff.f_effs[0][(0, 1)]),
            "expected_coefficient": complex(coefficient),
            "f_eff_norm": eff.f_effs[0].norm(),
            "lamb_shift": lamb,
        }),
        verdicts,
    })
}

fn dfs_first(d: usize, n: usize) -> Result<DfsProjector> {
    DfsProjector::from_indices(d + n, &(0..d).collect::<Vec<_>>())
}

/// Two orthogonal jumps on a 2-dim DFS with 4 decaying states, optionally
/// with a random `H_lr`.
fn orthogonal_instance(seed: u64, hamiltonian: bool) -> Result<StructuredLindbladian> {
    let (d, n) = (2, 4);
    let fam = random_orthogonal_family(d, n, &[2, 2], seed)?;
    let dfs = dfs_first(d, n)?;
    let h = if hamiltonian {
        dfs.from_decaying(&random_hermitian(&mut rng(seed.wrapping_add(1)), n))
    } else {
        zeros(d + n)
    };
    StructuredLindbladian::structured(h, fam, dfs, DEFAULT_TOL)
}

fn random_in(l: &StructuredLindbladian, seed: u64, corners: &[Corner]) -> Vec<Operator> {
    let mut g = rng(seed);
    (0..l.jumps().len())
        .map(|_| l.dfs().corners(&random_matrix(&mut g, l.dim()), corners))
        .collect()
}

const FREE_CORNERS: [Corner; 3] = [Corner::Ul, Corner::Ur, Corner::Lr];

fn cancellation(seed: u64) -> Result<Built> {
    let l = orthogonal_instance(seed, false)?;
    let fs = random_in(&l, seed.wrapping_add(2), &FREE_CORNERS);
    let pert = Perturbation::new(zeros(l.dim()), fs)?;
    let report = cancellation_check(&l, &pert)?;
    let norm_sq = pert.norm_squared();
    let verdicts = vec![
        Verdict::at_most(
            "surjectivity and orthogonality",
            if report.violations.is_empty() {
                0.0
            } else {
                f64::INFINITY
            },
            SURJECTIVITY_TOL,
        ),
        Verdict::at_most("‖L_eff‖ / ‖pert‖²", report.l_eff_norm / norm_sq, ZERO_TOL),
    ];
    Ok(Built {
        l,
        pert,
        details: json!({
            "seed": seed,
            "f_eff_norms": report.f_eff_norms,
            "e_eff_norm": report.e_eff_norm,
            "l_eff_norm": report.l_eff_norm,
            "violations": report.violations,
            "cancellation_tol": CANCELLATION_TOL,
        }),
        verdicts,
    })
}

fn coherent(seed: u64) -> Result<Built> {
    let l = orthogonal_instance(seed, true)?;
    let fs = random_in(&l, seed.wrapping_add(2), &FREE_CORNERS);
    let drive = coherent_cancellation_drive(&l, &fs)?;
    let eff = effective_lindbladian_closed(&l, &drive)?;
    let f_eff_max = eff.f_effs.iter().map(|f| f.norm()).fold(0.0, f64::max);
    let compensated = with_hamiltonian_compensation(&l, &drive)?;
    let l_eff = effective_lindbladian_general(&l, &compensated)?.norm();
    let verdicts = vec![
        Verdict::at_most("max ‖F_eff‖", f_eff_max, COHERENT_TOL),
        Verdict::at_most(
            "‖L_eff‖ / ‖pert‖² with compensation",
            l_eff / compensated.norm_squared(),
            ZERO_TOL,
        ),
    ];
    Ok(Built {
        l,
        pert: compensated,
        details: json!({
            "seed": seed,
            "f_eff_norms": eff.f_effs.iter().map(|f| f.norm()).collect::<Vec<_>>(),
            "h_eff_norm_before_compensation": eff.h_eff.norm(),
            "l_eff_norm": l_eff,
        }),
        verdicts,
    })
}

fn pauli_targets() -> (Operator, Vec<Operator>) {
    let s = TARGET_SCALE;
    let mut x = zeros(2);
    x[(0, 1)] = real(s);
    x[(1, 0)] = real(s);
    let mut y = zeros(2);
    y[(0, 1)] = c64(0.0, -s);
    y[(1, 0)] = c64(0.0, s);
    let mut z = zeros(2);
    z[(0, 0)] = real(s);
    z[(1, 1)] = real(-s);
    (&z * real(0.5), vec![x, y, z])
}

fn universal(seed: u64, targets: Targets) -> Result<Built> {
    let l = random_structured_instance(2, 3, 3, seed)?;
    let (h, jumps) = match targets {
        Targets::Pauli => pauli_targets(),
        Targets::Random => {
            let mut g = rng(seed.wrapping_add(1));
            let h = random_hermitian(&mut g, 2) * real(TARGET_SCALE);
            let jumps = (0..3)
                .map(|_| random_rect(&mut g, 2, 2) * real(TARGET_SCALE))
                .collect();
            (h, jumps)
        }
    };
    let pert = universal_dissipation(&l, &h, &jumps)?;
    let general = effective_lindbladian_general(&l, &pert)?;
    let target = target_generator(&h, &jumps)?;
    let residual = relative_difference(target.matrix(), general.matrix());
    Ok(Built {
        l,
        pert,
        details: json!({
            "seed": seed,
            "targets": match targets { Targets::Pauli => "pauli", Targets::Random => "random" },
            "target_hamiltonian": crate::report::matrix(&h),
            "target_jumps": jumps.iter().map(crate::report::matrix).collect::<Vec<_>>(),
        }),
        verdicts: vec![Verdict::at_most(
            "generator match (relative)",
            residual,
            UNIVERSAL_TOL,
        )],
    })
}

fn repetition(miscal: Pauli, eps: f64) -> Result<Built> {
    let (r, l) = repetition_code_recovery()?;
    let pert = pauli_miscalibration(miscal, eps);
    let report = robustness_check(&r, &pert)?;
    let mut verdicts = Vec::new();
    if report.hypotheses_met() {
        verdicts.push(Verdict::at_most(
            "‖L_eff‖ / ‖pert‖²",
            report.general_norm / report.pert_norm.powi(2),
            ZERO_TOL,
        ));
    }
    Ok(Built {
        l,
        pert,
        details: json!({
            "miscalibration": miscal.label(),
            "eps": eps,
            "hypotheses_met": report.hypotheses_met(),
            "l_eff_norm": report.general_norm,
            "robust": report.robust(ZERO_TOL),
        }),
        verdicts,
    })
}
