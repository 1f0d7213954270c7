//! JSON rendering of library results. Every numeric verdict carries its
//! residual and tolerance. serde_json prints doubles as shortest round-trip
//! decimals, and object keys are sorted, so reports are byte-deterministic.

use ejof_core::effective::{
    effective_lindbladian_closed, effective_lindbladian_general_detailed, identity_suite,
    verify_equivalence, Perturbation, IDENTITY_TOL,
};
use ejof_core::lindblad::{StructureReport, StructuredLindbladian};
use ejof_core::C64;
use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Default dual-route tolerance.
pub const EQUIVALENCE_TOL: f64 = 1e-9;
/// Kraus operators of `E_eff` below this weight are dropped from reports.
pub const KRAUS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn at_most(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tol,
            pass: residual <= tol,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {:.3e} (tol {:.1e})",
            if self.pass { "ok  " } else { "FAIL" },
            self.name,
            self.residual,
            self.tol
        )
    }
}

pub fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix(m: &DMatrix<C64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

pub fn structure(report: &StructureReport) -> Value {
    json!({
        "tol": report.tol,
        "hamiltonian_lr_residual": report.hamiltonian_lr_residual,
        "jump_ur_residuals": report.jump_ur_residuals,
        "dfs_steady_residual": report.dfs_steady_residual,
        "zero_multiplicity": report.zero_multiplicity,
        "expected_zero_multiplicity": report.expected_zero_multiplicity,
        "valid": report.is_valid(),
        "failures": report.failures(),
    })
}

pub struct Section {
    pub value: Value,
    pub verdicts: Vec<Verdict>,
}

/// Structure validation, both routes, the closed-form pieces and the
/// identity suite. With `force`, an invalid structure only yields the
/// general route.
pub fn effective_section(
    l: &StructuredLindbladian,
    pert: &Perturbation,
    structure_tol: f64,
    equivalence_tol: f64,
    force: bool,
) -> Result<Section, CliError> {
    let report = l.validate(structure_tol)?;
    let structure_value = structure(&report);
    if !report.is_valid() {
        if !force {
            return Err(CliError::Input(format!(
                "structure validation failed: {}",
                report.failures().join("; ")
            )));
        }
        let general = effective_lindbladian_general_detailed(l, pert)?;
        return Ok(Section {
            value: json!({
                "structure": structure_value,
                "forced": true,
                "l_eff": {
                    "convention": "column-stacking vectorization, DFS coordinates",
                    "general": matrix(general.total.matrix()),
                    "projection_residual": general.projection_residual,
                    "drazin_warning": general.drazin_warning,
                },
            }),
            verdicts: Vec::new(),
        });
    }

    let general = effective_lindbladian_general_detailed(l, pert)?;
    let closed = effective_lindbladian_closed(l, pert)?;
    let equivalence = verify_equivalence(l, pert, equivalence_tol)?;
    let ids = identity_suite(l, pert)?;
    let verdicts = vec![
        Verdict::at_most(
            "dual-route equivalence",
            equivalence.scaled_residual,
            equivalence_tol,
        ),
        Verdict::at_most(
            "identity: dual of E_eff at I",
            ids.dual_identity,
            IDENTITY_TOL,
        ),
        Verdict::at_most(
            "identity: off-diagonal inverse",
            ids.off_diagonal_inverse,
            IDENTITY_TOL,
        ),
        Verdict::at_most(
            "identity: inverse Kamiltonian",
            ids.inverse_kamiltonian,
            IDENTITY_TOL,
        ),
        Verdict::at_most(
            "identity: jump bookkeeping",
            ids.jump_bookkeeping,
            IDENTITY_TOL,
        ),
    ];
    let kraus: Vec<Value> = closed.e_eff_kraus(KRAUS_TOL).iter().map(matrix).collect();
    Ok(Section {
        value: json!({
            "structure": structure_value,
            "forced": false,
            "l_eff": {
                "convention": "column-stacking vectorization, DFS coordinates",
                "general": matrix(general.total.matrix()),
                "closed": matrix(closed.superop.matrix()),
                "general_norm": general.total.norm(),
                "projection_residual": general.projection_residual,
                "drazin_warning": general.drazin_warning,
            },
            "h_eff": matrix(&closed.h_eff),
            "f_eff": closed.f_effs.iter().map(matrix).collect::<Vec<_>>(),
            "e_eff": {
                "superoperator": matrix(closed.e_eff.matrix()),
                "dual_identity": matrix(&closed.e_eff_dual_identity),
                "kraus": kraus,
            },
            "identities": {
                "dual_identity": ids.dual_identity,
                "off_diagonal_inverse": ids.off_diagonal_inverse,
                "inverse_kamiltonian": ids.inverse_kamiltonian,
                "jump_bookkeeping": ids.jump_bookkeeping,
                "tol": ids.tol,
            },
        }),
        verdicts,
    })
}

pub fn verdicts(v: &[Verdict]) -> Value {
    serde_json::to_value(v).expect("verdicts serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use ejof_core::operator::c64;

    #[test]
    fn matrices_are_row_major_pairs() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = c64(0.1, -2.0);
        let v = matrix(&m);
        assert_eq!(v[0][1], json!([0.1, -2.0]));
        assert_eq!(v[1][0], json!([0.0, 0.0]));
        assert_eq!(
            serde_json::to_string(&json!(0.1 + 0.2)).unwrap(),
            "0.30000000000000004"
        );
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            digest(b"abc"),
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn verdict_directions() {
        assert!(Verdict::at_most("a", 1e-12, 1e-10).pass);
        assert!(!Verdict::at_most("a", 1e-9, 1e-10).pass);
    }
}
