//! Continuous error correction: Lindbladians built from recovery channels,
//! their miscalibrations, and the leading-order robustness check.

use nalgebra::{DMatrix, DVector};

use crate::effective::{
    effective_lindbladian_closed, effective_lindbladian_general, effective_to_superop, Perturbation,
};
use crate::error::{EjofError, Result};
use crate::lindblad::StructuredLindbladian;
use crate::operator::{
    identity, ket_bra, real, zeros, Corner, CorneredOperator, DfsProjector, Operator,
    Superoperator, C64, DEFAULT_TOL, RESIDUAL_FLOOR,
};
use crate::scenarios::{
    coherent_cancellation_drive, orthogonality_residual, surjectivity_residual,
    with_hamiltonian_compensation,
};

/// Relative residual allowed when fitting `R E(ρ) = c ρ`.
pub const PROPORTIONALITY_TOL: f64 = 1e-9;
/// Default miscalibration amplitude.
pub const DEFAULT_EPSILON: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    fn matrix(self) -> Operator {
        let mut m = zeros(2);
        match self {
            Pauli::X => {
                m[(0, 1)] = real(1.0);
                m[(1, 0)] = real(1.0);
            }
            Pauli::Y => {
                m[(0, 1)] = C64::new(0.0, -1.0);
                m[(1, 0)] = C64::new(0.0, 1.0);
            }
            Pauli::Z => {
                m[(0, 0)] = real(1.0);
                m[(1, 1)] = real(-1.0);
            }
        }
        m
    }

    pub fn label(self) -> &'static str {
        match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        }
    }
}

impl std::str::FromStr for Pauli {
    type Err = EjofError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Pauli::X),
            "Y" | "y" => Ok(Pauli::Y),
            "Z" | "z" => Ok(Pauli::Z),
            other => Err(EjofError::InvalidInput(format!(
                "unknown Pauli '{other}', expected X, Y or Z"
            ))),
        }
    }
}

/// Pauli on `qubit` of an `n`-qubit register; qubit 0 is the most
/// significant bit of the basis index.
pub fn pauli(n: usize, qubit: usize, kind: Pauli) -> Operator {
    assert!(qubit < n, "qubit {qubit} out of range for {n} qubits");
    let mut out = Operator::identity(1, 1);
    for q in 0..n {
        let factor = if q == qubit {
            kind.matrix()
        } else {
            identity(2)
        };
        out = out.kronecker(&factor);
    }
    out
}

/// A recovery channel split into the identity Kraus on the code and the
/// jumps that return errors to it.
#[derive(Debug, Clone)]
pub struct RecoveryChannel {
    code: DfsProjector,
    identity_kraus: Operator,
    jumps: Vec<Operator>,
    syndrome_supports: Vec<Operator>,
}

impl RecoveryChannel {
    pub fn new(code: DfsProjector, identity_kraus: Operator, jumps: Vec<Operator>) -> Result<Self> {
        crate::operator::ensure_dim(&identity_kraus, code.dim())?;
        for f in &jumps {
            crate::operator::ensure_dim(f, code.dim())?;
        }
        let syndrome_supports = jumps.iter().map(|f| f.adjoint() * f).collect();
        Ok(Self {
            code,
            identity_kraus,
            jumps,
            syndrome_supports,
        })
    }

    pub fn code(&self) -> &DfsProjector {
        &self.code
    }

    pub fn identity_kraus(&self) -> &Operator {
        &self.identity_kraus
    }

    pub fn jumps(&self) -> &[Operator] {
        &self.jumps
    }

    /// `F^ℓ† F^ℓ`; projectors onto the syndrome subspaces for isometric jumps.
    pub fn syndrome_supports(&self) -> &[Operator] {
        &self.syndrome_supports
    }

    /// The full channel, identity Kraus included.
    pub fn channel(&self) -> Superoperator {
        let mut r = Superoperator::sandwich(&self.identity_kraus, &self.identity_kraus.adjoint())
            .expect("square Kraus operator");
        for f in &self.jumps {
            r = &r + &Superoperator::sandwich(f, &f.adjoint()).expect("square Kraus operator");
        }
        r
    }

    /// `Σ_ℓ D[F^ℓ]` with no Hamiltonian; the identity Kraus is left out.
    pub fn lindbladian(&self) -> Result<StructuredLindbladian> {
        self.lindbladian_with(zeros(self.code.dim()))
    }

    pub fn lindbladian_with(&self, h: Operator) -> Result<StructuredLindbladian> {
        StructuredLindbladian::new(h, self.jumps.clone(), self.code.clone())
    }
}

/// Three-qubit bit-flip code with jumps `F^ℓ = P X^ℓ`.
pub fn repetition_code_recovery() -> Result<(RecoveryChannel, StructuredLindbladian)> {
    let code = DfsProjector::from_indices(8, &[0, 7])?;
    let p = code.projector().clone();
    let jumps = (0..3).map(|q| &p * pauli(3, q, Pauli::X)).collect();
    let r = RecoveryChannel::new(code, p, jumps)?;
    let l = r.lindbladian()?;
    Ok((r, l))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryConditionReport {
    /// `‖F − F_ur‖` per jump.
    pub lowering: Vec<f64>,
    pub surjectivity: Vec<f64>,
    /// `max_{ℓ≠ℓ'} ‖F^ℓ F^ℓ'†‖`.
    pub orthogonality: f64,
    /// `‖Σ F†F − I_lr‖`.
    pub decaying_completeness: f64,
    /// `‖R⁰†R⁰ + Σ F†F − I‖`.
    pub channel_completeness: f64,
    pub tol: f64,
}

impl RecoveryConditionReport {
    pub fn pass(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (l, &r) in self.lowering.iter().enumerate() {
            if r > self.tol {
                out.push(format!(
                    "jump {l} leaves part of the error space uncorrected (residual {r:.3e})"
                ));
            }
        }
        for (l, &r) in self.surjectivity.iter().enumerate() {
            if r > self.tol {
                out.push(format!(
                    "jump {l} is not surjective onto the code (residual {r:.3e})"
                ));
            }
        }
        if self.orthogonality > self.tol {
            out.push(format!(
                "jumps are not orthogonal (residual {:.3e})",
                self.orthogonality
            ));
        }
        if self.decaying_completeness > self.tol {
            out.push(format!(
                "jumps are not complete on the error space (residual {:.3e})",
                self.decaying_completeness
            ));
        }
        if self.channel_completeness > self.tol {
            out.push(format!(
                "recovery is not trace preserving (residual {:.3e})",
                self.channel_completeness
            ));
        }
        out
    }
}

pub fn check_recovery_conditions(r: &RecoveryChannel) -> RecoveryConditionReport {
    let code = r.code();
    let sum = r
        .jumps()
        .iter()
        .fold(zeros(code.dim()), |acc, f| acc + f.adjoint() * f);
    let full = &sum + r.identity_kraus().adjoint() * r.identity_kraus();
    RecoveryConditionReport {
        lowering: r
            .jumps()
            .iter()
            .map(|f| (f - code.corner(f, Corner::Ur)).norm())
            .collect(),
        surjectivity: r
            .jumps()
            .iter()
            .map(|f| surjectivity_residual(code, f))
            .collect(),
        orthogonality: orthogonality_residual(r.jumps()),
        decaying_completeness: (&sum - code.complement()).norm(),
        channel_completeness: (full - identity(code.dim())).norm(),
        tol: DEFAULT_TOL,
    }
}

/// Corner split of one miscalibration, named by its effect on the code.
#[derive(Debug, Clone, PartialEq)]
pub struct MiscalibrationEntry {
    pub corners: CorneredOperator,
    /// `‖f_ll‖`, errors leaving the code.
    pub detectable: f64,
    /// `‖f_ul‖`, errors acting within the code.
    pub undetectable: f64,
    /// `‖f_ur‖`, errors in the recovery step.
    pub recovery: f64,
    /// `‖f_lr‖`, errors within the error space.
    pub correctable: f64,
    pub tol: f64,
}

impl MiscalibrationEntry {
    pub fn labels(&self) -> Vec<&'static str> {
        [
            (self.detectable, "detectable"),
            (self.undetectable, "undetectable"),
            (self.recovery, "recovery"),
            (self.correctable, "correctable"),
        ]
        .into_iter()
        .filter(|(n, _)| *n > self.tol)
        .map(|(_, name)| name)
        .collect()
    }

    pub fn has_undetectable(&self) -> bool {
        self.undetectable > self.tol
    }
}

pub fn classify_miscalibration(f: &Operator, r: &RecoveryChannel) -> Result<MiscalibrationEntry> {
    let corners = r.code().four_corners(f)?;
    Ok(MiscalibrationEntry {
        detectable: corners.ll.norm(),
        undetectable: corners.ul.norm(),
        recovery: corners.ur.norm(),
        correctable: corners.lr.norm(),
        corners,
        tol: DEFAULT_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectabilityVerdict {
    /// Least-squares `c` in `R E(ρ) ≈ c ρ`.
    pub c: C64,
    /// `‖R E − c·id‖ / ‖R E‖` over the code.
    pub residual: f64,
    pub pass: bool,
}

/// Fits `R(E(ρ)) = c ρ` over a matrix-unit basis of the code, with
/// `E(·) = Σ f_ll (·) f_ll†`.
pub fn correctability_check(
    f_lls: &[Operator],
    r: &RecoveryChannel,
) -> Result<CorrectabilityVerdict> {
    let code = r.code();
    let mut e = Superoperator::zeros(code.dim());
    for f in f_lls {
        crate::operator::ensure_dim(f, code.dim())?;
        let fll = code.corner(f, Corner::Ll);
        e = &e + &Superoperator::sandwich(&fll, &fll.adjoint())?;
    }
    let re = r.channel().compose(&e)?.restrict_to_dfs(code)?;
    let id = Superoperator::identity(code.dfs_dim());
    let x = DVector::from_column_slice(id.matrix().as_slice());
    let y = DVector::from_column_slice(re.matrix().as_slice());
    let c = x.dotc(&y) / x.dotc(&x);
    let residual = (&y - &x * c).norm() / y.norm().max(RESIDUAL_FLOOR);
    let residual = if y.norm() == 0.0 { 0.0 } else { residual };
    Ok(CorrectabilityVerdict {
        c,
        residual,
        pass: residual <= PROPORTIONALITY_TOL,
    })
}

/// `f^ℓ = ε σ^ℓ` on every qubit of the repetition code.
pub fn pauli_miscalibration(kind: Pauli, epsilon: f64) -> Perturbation {
    Perturbation {
        v: zeros(8),
        fs: (0..3).map(|q| pauli(3, q, kind) * real(epsilon)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessReport {
    pub conditions: RecoveryConditionReport,
    pub correctability: CorrectabilityVerdict,
    pub entries: Vec<MiscalibrationEntry>,
    pub general_norm: f64,
    pub closed_norm: f64,
    pub h_eff_norm: f64,
    pub max_f_eff_norm: f64,
    /// `‖E_eff − ½{E_eff‡(I),·}‖`.
    pub cp_part_norm: f64,
    /// Gap between the two routes over `max(‖general‖, ‖pert‖²)`.
    pub route_residual: f64,
    pub pert_norm: f64,
}

impl RobustnessReport {
    pub fn hypotheses_met(&self) -> bool {
        self.conditions.pass() && self.correctability.pass
    }

    /// `‖L_eff‖ ≤ tol·‖pert‖²` on both routes.
    pub fn robust(&self, tol: f64) -> bool {
        let bound = tol * self.pert_norm.powi(2);
        self.general_norm <= bound && self.closed_norm <= bound
    }
}

pub fn robustness_check(r: &RecoveryChannel, pert: &Perturbation) -> Result<RobustnessReport> {
    let l = r.lindbladian()?;
    let conditions = check_recovery_conditions(r);
    let correctability = correctability_check(&pert.fs, r)?;
    let entries = pert
        .fs
        .iter()
        .map(|f| classify_miscalibration(f, r))
        .collect::<Result<Vec<_>>>()?;
    let general = effective_lindbladian_general(&l, pert)?;
    let closed = effective_lindbladian_closed(&l, pert)?;
    let d = r.code().dfs_dim();
    let cp_part = effective_to_superop(&zeros(d), &[], &closed.e_eff, &closed.e_eff_dual_identity)?;
    let pert_norm = pert
        .fs
        .iter()
        .fold(pert.v.norm_squared(), |acc, f| acc + f.norm_squared())
        .sqrt();
    Ok(RobustnessReport {
        conditions,
        correctability,
        entries,
        general_norm: general.norm(),
        closed_norm: closed.superop.norm(),
        h_eff_norm: closed.h_eff.norm(),
        max_f_eff_norm: closed.f_effs.iter().map(|f| f.norm()).fold(0.0, f64::max),
        cp_part_norm: cp_part.norm(),
        route_residual: (general.matrix() - closed.superop.matrix()).norm()
            / general
                .norm()
                .max(pert_norm * pert_norm)
                .max(crate::operator::RESIDUAL_FLOOR),
        pert_norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstructionCell {
    pub hamiltonian: bool,
    pub detectable: bool,
    pub l_eff_norm: f64,
    pub predicted_zero: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionTable {
    pub cells: Vec<ObstructionCell>,
    /// Zero threshold relative to `‖pert‖²`.
    pub tol: f64,
    pub pert_norm: f64,
}

impl ObstructionTable {
    pub fn cell(&self, hamiltonian: bool, detectable: bool) -> &ObstructionCell {
        self.cells
            .iter()
            .find(|c| c.hamiltonian == hamiltonian && c.detectable == detectable)
            .expect("all four cells are present")
    }

    pub fn matches_prediction(&self) -> bool {
        let bound = self.tol * self.pert_norm.powi(2).max(RESIDUAL_FLOOR);
        self.cells.iter().all(|c| {
            if c.predicted_zero {
                c.l_eff_norm <= bound
            } else {
                c.l_eff_norm > 1e3 * bound
            }
        })
    }
}

/// `‖L_eff‖` for `H ∈ {0, h_lr}` times `f_ll ∈ {0, given}`. Whenever
/// `H ≠ 0` the coherent-cancellation drive and its Hamiltonian
/// compensation are added to `V`. Only the cell with both a Hamiltonian
/// and detectable errors is expected to be nonzero.
pub fn hamiltonian_obstruction_demo(
    r: &RecoveryChannel,
    h_lr: &Operator,
    pert: &Perturbation,
    tol: f64,
) -> Result<ObstructionTable> {
    let code = r.code();
    let h_lr = code.corner(h_lr, Corner::Lr);
    if h_lr.norm() <= DEFAULT_TOL {
        return Err(EjofError::InvalidInput(
            "the Hamiltonian has no decaying-block part".into(),
        ));
    }
    let without_ll = Perturbation {
        v: pert.v.clone(),
        fs: pert
            .fs
            .iter()
            .map(|f| f - code.corner(f, Corner::Ll))
            .collect(),
    };
    let mut cells = Vec::with_capacity(4);
    for hamiltonian in [false, true] {
        let l = if hamiltonian {
            r.lindbladian_with(h_lr.clone())?
        } else {
            r.lindbladian()?
        };
        for detectable in [false, true] {
            let base = if detectable { pert } else { &without_ll };
            let p = if hamiltonian {
                let drive = coherent_cancellation_drive(&l, &base.fs)?;
                with_hamiltonian_compensation(&l, &drive)?
            } else {
                base.clone()
            };
            let l_eff = effective_lindbladian_general(&l, &p)?;
            cells.push(ObstructionCell {
                hamiltonian,
                detectable,
                l_eff_norm: l_eff.norm(),
                predicted_zero: !(hamiltonian && detectable),
            });
        }
    }
    let pert_norm = pert
        .fs
        .iter()
        .fold(pert.v.norm_squared(), |acc, f| acc + f.norm_squared())
        .sqrt();
    Ok(ObstructionTable {
        cells,
        tol,
        pert_norm,
    })
}

/// `|a⟩⟨b|` on the three-qubit register from bit strings such as `"011"`.
pub fn basis_outer(a: &str, b: &str) -> Operator {
    let idx = |s: &str| usize::from_str_radix(s, 2).expect("binary label");
    ket_bra(8, idx(a), idx(b))
}

/// Kamiltonian superoperator of a recovery Lindbladian on the error space,
/// in error-space coordinates; `−id` for a complete recovery.
pub fn recovery_ksuper_block(l: &StructuredLindbladian) -> DMatrix<C64> {
    let e = l.dfs().corner_embedding(&[Corner::Lr]);
    e.adjoint() * l.kamiltonian().superoperator().matrix() * &e
}
