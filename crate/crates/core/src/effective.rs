//! Second-order effective Lindbladians on the DFS.
//!
//! Two independent routes are provided. [`effective_lindbladian_general`]
//! works with superoperator matrices only: the Drazin inverse of `L`, the
//! perturbation superoperators `O₁`, `O₂` and the asymptotic projection.
//! [`effective_lindbladian_closed`] assembles the effective Hamiltonian,
//! jumps and CP map from operator algebra and one linear solve on the
//! decaying block. [`verify_equivalence`] compares them.

use nalgebra::DMatrix;

use crate::channel;
use crate::error::{EjofError, Result};
use crate::linalg;
use crate::lindblad::{drazin_inverse, Kamiltonian, StructuredLindbladian};
use crate::operator::{
    ensure_dim, hermitian_part, hermitian_residual, identity_residual, real, relative_difference,
    star_commutator, zeros, Corner, Operator, Superoperator, C64, DEFAULT_TOL, I,
};

/// `H → H + V`, `F^ℓ → F^ℓ + f^ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub v: Operator,
    pub fs: Vec<Operator>,
}

impl Perturbation {
    pub fn new(v: Operator, fs: Vec<Operator>) -> Result<Self> {
        let dim = crate::operator::ensure_square(&v)?;
        let herm = hermitian_residual(&v);
        if herm > DEFAULT_TOL * v.norm().max(1.0) {
            return Err(EjofError::NotHermitian {
                what: "perturbation V".into(),
                residual: herm,
            });
        }
        for f in &fs {
            ensure_dim(f, dim)?;
        }
        Ok(Self { v, fs })
    }

    pub fn zero(dim: usize, jumps: usize) -> Self {
        Self {
            v: zeros(dim),
            fs: vec![zeros(dim); jumps],
        }
    }

    /// Pads `fs` with zeros up to `jumps` entries.
    pub fn padded(mut self, jumps: usize) -> Self {
        let dim = self.v.nrows();
        while self.fs.len() < jumps {
            self.fs.push(zeros(dim));
        }
        self
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            v: &self.v * real(s),
            fs: self.fs.iter().map(|f| f * real(s)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.v.nrows()
    }

    /// `‖V‖² + Σ‖f‖²` (Frobenius).
    pub fn norm_squared(&self) -> f64 {
        self.fs
            .iter()
            .fold(self.v.norm_squared(), |acc, f| acc + f.norm_squared())
    }

    fn check_against(&self, l: &StructuredLindbladian) -> Result<()> {
        ensure_dim(&self.v, l.dim())?;
        if self.fs.len() != l.jumps().len() {
            return Err(EjofError::InvalidInput(format!(
                "{} jump perturbations for {} unperturbed jumps",
                self.fs.len(),
                l.jumps().len()
            )));
        }
        Ok(())
    }
}

/// `K_eff = V_of − (i/2) Σ_ℓ (F^ℓ† f^ℓ_ul + f^ℓ_ul† F^ℓ)`, supported on the
/// off-diagonal corners.
pub fn effective_kamiltonian(l: &StructuredLindbladian, pert: &Perturbation) -> Result<Operator> {
    pert.check_against(l)?;
    let dfs = l.dfs();
    let mut k = dfs.corners(&pert.v, &Corner::OFF_DIAGONAL);
    for (big, small) in l.jumps().iter().zip(&pert.fs) {
        let ful = dfs.corner(small, Corner::Ul);
        k -= (big.adjoint() * &ful + ful.adjoint() * big) * (I * 0.5);
    }
    Ok(k)
}

/// The perturbation superoperators, split by the number of perturbation
/// factors they contain.
#[derive(Debug, Clone)]
pub struct PerturbationSuperops {
    /// `−i[V_di − (i/2)Σ(f_ur†F + F†f_ur), ·]⋆`.
    pub v_part: Superoperator,
    /// `−i[K_eff, ·]⋆`.
    pub k_eff_part: Superoperator,
    /// `Σ (F(·)f† + f(·)F†)`.
    pub jump_part: Superoperator,
    /// `v_part + k_eff_part + jump_part`.
    pub first: Superoperator,
    /// `Σ D[f]`.
    pub second: Superoperator,
}

impl PerturbationSuperops {
    pub fn total(&self) -> Superoperator {
        &self.first + &self.second
    }
}

pub fn perturbation_superops(
    l: &StructuredLindbladian,
    pert: &Perturbation,
) -> Result<PerturbationSuperops> {
    pert.check_against(l)?;
    let dfs = l.dfs();
    let mut m_di = dfs.corners(&pert.v, &Corner::DIAGONAL);
    for (big, small) in l.jumps().iter().zip(&pert.fs) {
        let fur = dfs.corner(small, Corner::Ur);
        m_di -= (fur.adjoint() * big + big.adjoint() * &fur) * (I * 0.5);
    }
    let v_part = Superoperator::star_commutator(&m_di)?.scale(-I);
    let k_eff = effective_kamiltonian(l, pert)?;
    let k_eff_part = Superoperator::star_commutator(&k_eff)?.scale(-I);

    let dim = l.dim();
    let mut jump_part = Superoperator::zeros(dim);
    let mut second = Superoperator::zeros(dim);
    for (big, small) in l.jumps().iter().zip(&pert.fs) {
        jump_part = &jump_part + &Superoperator::sandwich(big, &small.adjoint())?;
        jump_part = &jump_part + &Superoperator::sandwich(small, &big.adjoint())?;
        second = &second + &Superoperator::dissipator(small)?;
    }
    let first = &(&v_part + &k_eff_part) + &jump_part;
    Ok(PerturbationSuperops {
        v_part,
        k_eff_part,
        jump_part,
        first,
        second,
    })
}

/// Intermediate results of the superoperator route, all in DFS coordinates.
#[derive(Debug, Clone)]
pub struct GeneralRoute {
    /// `P∞ (O₁ + O₂) P∞`.
    pub first_order: Superoperator,
    /// `−P∞ O₁ L^D O₁ P∞`.
    pub second_order: Superoperator,
    pub total: Superoperator,
    /// `‖P∞ − p_ul P∞ p_di‖`, relative.
    pub projection_residual: f64,
    pub drazin_warning: Option<String>,
}

pub fn effective_lindbladian_general_detailed(
    l: &StructuredLindbladian,
    pert: &Perturbation,
) -> Result<GeneralRoute> {
    let ops = perturbation_superops(l, pert)?;
    let drazin = drazin_inverse(l.superop())?;
    let dfs = l.dfs();
    let d = dfs.dfs_dim();
    if drazin.kernel_dim != d * d {
        return Err(EjofError::NotStructured(format!(
            "steady subspace has dimension {} instead of {}",
            drazin.kernel_dim,
            d * d
        )));
    }
    let dim = l.dim();
    let p_inf = &Superoperator::identity(dim) - &l.superop().compose(&drazin.inverse)?;

    let p = dfs.projector();
    let q = dfs.complement();
    let p_ul = Superoperator::sandwich(p, p)?;
    let p_di = &p_ul + &Superoperator::sandwich(q, q)?;
    let factored = p_ul.compose(&p_inf)?.compose(&p_di)?;
    let projection_residual = relative_difference(p_inf.matrix(), factored.matrix());
    if projection_residual > 1e-8 {
        return Err(EjofError::NotStructured(format!(
            "asymptotic projection does not factor through the DFS (residual {projection_residual:.3e})"
        )));
    }

    let e = dfs.corner_embedding(&[Corner::Ul]);
    let restrict = |s: &DMatrix<C64>| -> Result<Superoperator> {
        Superoperator::from_matrix(d, e.adjoint() * s * &e)
    };
    let first_order = restrict(&(p_inf.matrix() * ops.total().matrix()))?;
    let second = p_inf.matrix() * ops.first.matrix() * drazin.inverse.matrix() * ops.first.matrix();
    let second_order = restrict(&(-second))?;
    let total = &first_order + &second_order;
    Ok(GeneralRoute {
        first_order,
        second_order,
        total,
        projection_residual,
        drazin_warning: drazin.warning,
    })
}

/// `P∞ O P∞ − P∞ O₁ L^D O₁ P∞` on the DFS block, from superoperator
/// matrices only.
pub fn effective_lindbladian_general(
    l: &StructuredLindbladian,
    pert: &Perturbation,
) -> Result<Superoperator> {
    Ok(effective_lindbladian_general_detailed(l, pert)?.total)
}

/// Closed-form effective Lindbladian, all operators in DFS coordinates.
#[derive(Debug, Clone)]
pub struct EffectiveLindbladian {
    pub h_eff: Operator,
    pub f_effs: Vec<Operator>,
    /// The CP map `E_eff` on the DFS.
    pub e_eff: Superoperator,
    /// `E_eff‡(I) = Σ f_ll† f_ll`.
    pub e_eff_dual_identity: Operator,
    pub superop: Superoperator,
}

impl EffectiveLindbladian {
    pub fn dfs_dim(&self) -> usize {
        self.h_eff.nrows()
    }

    /// Kraus operators of `E_eff` from its Choi matrix.
    pub fn e_eff_kraus(&self, tol: f64) -> Vec<Operator> {
        channel::kraus_from_choi(&self.e_eff, tol)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.superop.norm() <= tol
    }
}

/// `−i[H,·] + Σ D[F^ℓ] + E − ½{E‡(I),·}`.
pub fn effective_to_superop(
    h_eff: &Operator,
    f_effs: &[Operator],
    e_eff: &Superoperator,
    e_eff_dual_identity: &Operator,
) -> Result<Superoperator> {
    let mut s = Superoperator::hamiltonian(h_eff)?;
    for f in f_effs {
        s = &s + &Superoperator::dissipator(f)?;
    }
    let anti =
        &Superoperator::left(e_eff_dual_identity)? + &Superoperator::right(e_eff_dual_identity)?;
    Ok(&(&s + e_eff) - &anti.scale(real(0.5)))
}

pub fn effective_lindbladian_closed(
    l: &StructuredLindbladian,
    pert: &Perturbation,
) -> Result<EffectiveLindbladian> {
    pert.check_against(l)?;
    let dfs = l.dfs();
    let k = l.kamiltonian();
    let k_inv = k.inverse()?;
    let k_eff = effective_kamiltonian(l, pert)?;

    let v_ul = dfs.corner(&pert.v, Corner::Ul);
    let h_full = hermitian_part(&(v_ul - &k_eff * &k_inv * &k_eff));
    let h_eff = dfs.to_dfs(&h_full);

    let f_effs: Vec<Operator> = l
        .jumps()
        .iter()
        .zip(&pert.fs)
        .map(|(big, small)| {
            let ful = dfs.corner(small, Corner::Ul);
            dfs.to_dfs(&(ful - big * &k_inv * &k_eff))
        })
        .collect();

    let (e_eff, e_eff_dual_identity) = effective_cp_map(l, &k, pert)?;
    let superop = effective_to_superop(&h_eff, &f_effs, &e_eff, &e_eff_dual_identity)?;
    Ok(EffectiveLindbladian {
        h_eff,
        f_effs,
        e_eff,
        e_eff_dual_identity,
        superop,
    })
}

/// `E_eff(ρ) = −Σ_ℓ' F^ℓ' 𝒦_lr⁻¹(Σ_ℓ f_ll ρ f_ll†) F^ℓ'†`, one decaying-block
/// solve per DFS matrix unit.
fn effective_cp_map(
    l: &StructuredLindbladian,
    k: &Kamiltonian,
    pert: &Perturbation,
) -> Result<(Superoperator, Operator)> {
    let dfs = l.dfs();
    let dim = l.dim();
    let d = dfs.dfs_dim();
    let f_lls: Vec<Operator> = pert.fs.iter().map(|f| dfs.corner(f, Corner::Ll)).collect();

    let mut raise = Superoperator::zeros(dim);
    for f in &f_lls {
        raise = &raise + &Superoperator::sandwich(f, &f.adjoint())?;
    }
    let mut lower = Superoperator::zeros(dim);
    for f in l.jumps() {
        lower = &lower + &Superoperator::sandwich(f, &f.adjoint())?;
    }

    let e_ul = dfs.corner_embedding(&[Corner::Ul]);
    let e_lr = dfs.corner_embedding(&[Corner::Lr]);
    let k_block = e_lr.adjoint() * k.superoperator().matrix() * &e_lr;
    // columns: vectorized lr coordinates of Σ f_ll E_ij f_ll† for each unit E_ij
    let rhs = e_lr.adjoint() * raise.matrix() * &e_ul;
    let decayed = if rhs.norm() == 0.0 {
        DMatrix::zeros(rhs.nrows(), rhs.ncols())
    } else {
        linalg::solve(
            &k_block,
            &rhs,
            "Kamiltonian superoperator on the decaying block",
        )?
    };
    let e_eff = -(e_ul.adjoint() * lower.matrix() * &e_lr * decayed);
    let e_eff = Superoperator::from_matrix(d, e_eff)?;

    let dual = f_lls
        .iter()
        .fold(zeros(dim), |acc, f| acc + f.adjoint() * f);
    Ok((e_eff, dfs.to_dfs(&dual)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceReport {
    /// `‖general − closed‖_F / max(‖general‖_F, floor)`.
    pub frobenius_residual: f64,
    /// `‖general − closed‖_F / max(‖general‖_F, ‖pert‖², floor)`. Stays
    /// meaningful when `L_eff` cancels and both routes are round-off.
    pub scaled_residual: f64,
    pub general_norm: f64,
    pub tol: f64,
    /// Decided on `scaled_residual`.
    pub pass: bool,
}

pub fn verify_equivalence(
    l: &StructuredLindbladian,
    pert: &Perturbation,
    tol: f64,
) -> Result<EquivalenceReport> {
    let general = effective_lindbladian_general(l, pert)?;
    let closed = effective_lindbladian_closed(l, pert)?;
    let frobenius_residual = relative_difference(general.matrix(), closed.superop.matrix());
    let diff = (general.matrix() - closed.superop.matrix()).norm();
    let scale = general
        .norm()
        .max(pert.norm_squared())
        .max(crate::operator::RESIDUAL_FLOOR);
    let scaled_residual = diff / scale;
    Ok(EquivalenceReport {
        frobenius_residual,
        scaled_residual,
        general_norm: general.norm(),
        tol,
        pass: scaled_residual <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    /// `E_eff‡(I)` versus `Σ f_ll† f_ll`.
    pub dual_identity: f64,
    /// `𝒦_of⁻¹(σ)` versus `i[K⁻¹, σ]⋆` for the off-diagonal part `σ` of
    /// the perturbation.
    pub off_diagonal_inverse: f64,
    /// `Σ K⁻¹† F† F K⁻¹` versus `−i(K⁻¹ − K⁻¹†)`.
    pub inverse_kamiltonian: f64,
    /// `Σ (F_eff† F_eff − f_ul† f_ul)` versus `−i(K_eff K⁻¹ K_eff − h.c.)`.
    pub jump_bookkeeping: f64,
    pub tol: f64,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.dual_identity
            .max(self.off_diagonal_inverse)
            .max(self.inverse_kamiltonian)
            .max(self.jump_bookkeeping)
    }

    pub fn pass(&self) -> bool {
        self.max_residual() <= self.tol
    }
}

pub const IDENTITY_TOL: f64 = 1e-11;

pub fn identity_suite(l: &StructuredLindbladian, pert: &Perturbation) -> Result<IdentityReport> {
    let eff = effective_lindbladian_closed(l, pert)?;
    let dfs = l.dfs();
    let d = dfs.dfs_dim();

    let dual_applied = eff.e_eff.adjoint().apply(&crate::operator::identity(d))?;
    let dual_identity = identity_residual(&dual_applied, &eff.e_eff_dual_identity);

    let k = l.kamiltonian();
    let k_inv = k.inverse()?;
    let dim = l.dim();
    let sigma = pert.fs.iter().fold(pert.v.clone(), |acc, f| acc + f);
    let sigma = dfs.corners(&sigma, &Corner::OFF_DIAGONAL);
    let solved = k.solve_super(&sigma, &Corner::OFF_DIAGONAL)?;
    let off_diagonal_inverse = identity_residual(&solved, &(star_commutator(&k_inv, &sigma) * I));

    let lhs = l.jumps().iter().fold(zeros(dim), |acc, f| {
        acc + k_inv.adjoint() * f.adjoint() * f * &k_inv
    });
    let rhs = (&k_inv - k_inv.adjoint()) * (-I);
    let inverse_kamiltonian = identity_residual(&lhs, &rhs);

    let k_eff = effective_kamiltonian(l, pert)?;
    let mut lhs = zeros(d);
    for (f_eff, small) in eff.f_effs.iter().zip(&pert.fs) {
        let ful = dfs.to_dfs(small);
        lhs += f_eff.adjoint() * f_eff - ful.adjoint() * ful;
    }
    let kk = &k_eff * &k_inv * &k_eff;
    let rhs = dfs.to_dfs(&((&kk - kk.adjoint()) * (-I)));
    let jump_bookkeeping = identity_residual(&lhs, &rhs);

    Ok(IdentityReport {
        dual_identity,
        off_diagonal_inverse,
        inverse_kamiltonian,
        jump_bookkeeping,
        tol: IDENTITY_TOL,
    })
}

/// Effect of the corners that should not enter at second order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerSensitivityReport {
    pub baseline_norm: f64,
    /// With `V_lr = 0`.
    pub without_v_lr: f64,
    /// With every `f_lr = 0`.
    pub without_f_lr: f64,
    /// With every `f_ur = 0`.
    pub without_f_ur: f64,
    /// With all of the above removed at once.
    pub without_all: f64,
    pub tol: f64,
}

impl CornerSensitivityReport {
    pub fn max_difference(&self) -> f64 {
        self.without_v_lr
            .max(self.without_f_lr)
            .max(self.without_f_ur)
            .max(self.without_all)
    }

    pub fn pass(&self) -> bool {
        self.max_difference() <= self.tol
    }
}

pub const CORNER_TOL: f64 = 1e-10;

/// Recomputes the general-route `L_eff` with the lower-right Hamiltonian
/// corner and the right-column jump corners removed. Differences are
/// relative to `max(‖L_eff‖, 1)`.
pub fn corner_sensitivity(
    l: &StructuredLindbladian,
    pert: &Perturbation,
) -> Result<CornerSensitivityReport> {
    let dfs = l.dfs();
    let baseline = effective_lindbladian_general(l, pert)?;
    let scale = baseline.norm().max(1.0);
    let diff = |p: Perturbation| -> Result<f64> {
        let other = effective_lindbladian_general(l, &p)?;
        Ok((baseline.matrix() - other.matrix()).norm() / scale)
    };
    let strip = |corners: &[Corner], hamiltonian: bool, jumps: bool| -> Perturbation {
        let remove = |o: &Operator| o - dfs.corners(o, corners);
        Perturbation {
            v: if hamiltonian {
                remove(&pert.v)
            } else {
                pert.v.clone()
            },
            fs: pert
                .fs
                .iter()
                .map(|f| if jumps { remove(f) } else { f.clone() })
                .collect(),
        }
    };
    let without_v_lr = diff(strip(&[Corner::Lr], true, false))?;
    let without_f_lr = diff(strip(&[Corner::Lr], false, true))?;
    let without_f_ur = diff(strip(&[Corner::Ur], false, true))?;
    let mut all = strip(&[Corner::Lr], true, true);
    all.fs = all
        .fs
        .iter()
        .map(|f| f - dfs.corner(f, Corner::Ur))
        .collect();
    let without_all = diff(all)?;
    Ok(CornerSensitivityReport {
        baseline_norm: baseline.norm(),
        without_v_lr,
        without_f_lr,
        without_f_ur,
        without_all,
        tol: CORNER_TOL,
    })
}
