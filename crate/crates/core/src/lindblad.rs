//! Unperturbed Lindbladians with a unique decoherence-free subspace.
//!
//! A [`StructuredLindbladian`] is `L(·) = −i[H,·] + Σ_ℓ D[F^ℓ](·)` together
//! with the DFS projector. The effective-jump formalism additionally needs
//! `H = H_lr` and `F^ℓ = F^ℓ_ur`; [`StructuredLindbladian::validate`]
//! measures how far an instance is from those assumptions and whether the
//! DFS is the unique steady subspace.

use nalgebra::DMatrix;

use crate::error::{EjofError, Result};
use crate::linalg::{self, Drazin, ZERO_EIGENVALUE_RTOL};
use crate::operator::{
    ensure_dim, ensure_square, hermitian_residual, identity, real, vectorize, Corner, DfsProjector,
    Operator, Superoperator, C64, DEFAULT_TOL, I,
};

/// `−i[H,·] + Σ_ℓ D[F^ℓ]` as a superoperator.
pub fn assemble_lindbladian(h: &Operator, jumps: &[Operator]) -> Result<Superoperator> {
    let dim = ensure_square(h)?;
    let herm = hermitian_residual(h);
    if herm > DEFAULT_TOL * h.norm().max(1.0) {
        return Err(EjofError::NotHermitian {
            what: "Hamiltonian".into(),
            residual: herm,
        });
    }
    let mut l = Superoperator::hamiltonian(h)?;
    for f in jumps {
        ensure_dim(f, dim)?;
        l = &l + &Superoperator::dissipator(f)?;
    }
    Ok(l)
}

#[derive(Debug, Clone)]
pub struct StructuredLindbladian {
    hamiltonian: Operator,
    jumps: Vec<Operator>,
    dfs: DfsProjector,
    superop: Superoperator,
}

impl StructuredLindbladian {
    /// Assembles the Lindbladian without checking the structural assumptions.
    pub fn new(hamiltonian: Operator, jumps: Vec<Operator>, dfs: DfsProjector) -> Result<Self> {
        ensure_dim(&hamiltonian, dfs.dim())?;
        let superop = assemble_lindbladian(&hamiltonian, &jumps)?;
        Ok(Self {
            hamiltonian,
            jumps,
            dfs,
            superop,
        })
    }

    /// Assembles and validates; fails with [`EjofError::NotStructured`] when
    /// any structural check does not pass at `tol`.
    pub fn structured(
        hamiltonian: Operator,
        jumps: Vec<Operator>,
        dfs: DfsProjector,
        tol: f64,
    ) -> Result<Self> {
        let l = Self::new(hamiltonian, jumps, dfs)?;
        let report = l.validate(tol)?;
        if !report.is_valid() {
            return Err(EjofError::NotStructured(report.failures().join("; ")));
        }
        Ok(l)
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Operator] {
        &self.jumps
    }

    pub fn dfs(&self) -> &DfsProjector {
        &self.dfs
    }

    pub fn superop(&self) -> &Superoperator {
        &self.superop
    }

    pub fn dim(&self) -> usize {
        self.dfs.dim()
    }

    pub fn validate(&self, tol: f64) -> Result<StructureReport> {
        let dfs = &self.dfs;
        let h = &self.hamiltonian;
        let hamiltonian_lr_residual = (h - dfs.corner(h, Corner::Lr)).norm() / h.norm().max(1.0);
        let jump_ur_residuals = self
            .jumps
            .iter()
            .map(|f| (f - dfs.corner(f, Corner::Ur)).norm() / f.norm().max(1.0))
            .collect();

        let embed = dfs.corner_embedding(&[Corner::Ul]);
        let l = self.superop.matrix();
        let dfs_steady_residual = (l * embed).norm() / l.norm().max(1.0);

        let threshold = ZERO_EIGENVALUE_RTOL * linalg::spectral_norm(l);
        let zero_multiplicity = linalg::eigenvalues(l)?
            .iter()
            .filter(|lam| lam.norm() < threshold || threshold == 0.0)
            .count();
        let d = dfs.dfs_dim();

        Ok(StructureReport {
            tol,
            hamiltonian_lr_residual,
            jump_ur_residuals,
            dfs_steady_residual,
            zero_multiplicity,
            expected_zero_multiplicity: d * d,
        })
    }

    pub fn kamiltonian(&self) -> Kamiltonian {
        Kamiltonian::new(&self.hamiltonian, &self.jumps, &self.dfs)
    }

    pub fn drazin_inverse(&self) -> Result<DrazinInverse> {
        drazin_inverse(&self.superop)
    }

    /// Slowest nonzero relaxation rate, `min |Re λ|` over nonzero eigenvalues.
    pub fn slowest_decay_rate(&self) -> Result<Option<f64>> {
        slowest_decay_rate(&self.superop)
    }
}

/// Residuals of the structural checks, each normalized by `max(1, ‖·‖)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub tol: f64,
    /// `‖H − H_lr‖`.
    pub hamiltonian_lr_residual: f64,
    /// `‖F^ℓ − F^ℓ_ur‖` per jump.
    pub jump_ur_residuals: Vec<f64>,
    /// `‖L(ρ)‖` over DFS-supported `ρ`.
    pub dfs_steady_residual: f64,
    pub zero_multiplicity: usize,
    pub expected_zero_multiplicity: usize,
}

impl StructureReport {
    pub fn hamiltonian_ok(&self) -> bool {
        self.hamiltonian_lr_residual <= self.tol
    }

    pub fn jumps_ok(&self) -> bool {
        self.jump_ur_residuals.iter().all(|&r| r <= self.tol)
    }

    pub fn steady_ok(&self) -> bool {
        self.dfs_steady_residual <= self.tol
    }

    pub fn unique_ok(&self) -> bool {
        self.zero_multiplicity == self.expected_zero_multiplicity
    }

    pub fn is_valid(&self) -> bool {
        self.hamiltonian_ok() && self.jumps_ok() && self.steady_ok() && self.unique_ok()
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.hamiltonian_ok() {
            out.push(format!(
                "H has support outside the decaying block (residual {:.3e})",
                self.hamiltonian_lr_residual
            ));
        }
        for (l, &r) in self.jump_ur_residuals.iter().enumerate() {
            if r > self.tol {
                out.push(format!(
                    "jump {l} is not a pure lowering operator (residual {r:.3e})"
                ));
            }
        }
        if !self.steady_ok() {
            out.push(format!(
                "DFS is not steady (residual {:.3e})",
                self.dfs_steady_residual
            ));
        }
        if !self.unique_ok() {
            out.push(format!(
                "steady subspace has dimension {} instead of {}",
                self.zero_multiplicity, self.expected_zero_multiplicity
            ));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct DrazinInverse {
    pub inverse: Superoperator,
    /// Spectral projector onto the kernel.
    pub kernel_projector: Superoperator,
    pub kernel_dim: usize,
    pub threshold: f64,
    pub warning: Option<String>,
}

pub fn drazin_inverse(s: &Superoperator) -> Result<DrazinInverse> {
    let Drazin {
        inverse,
        kernel_projector,
        kernel_dim,
        threshold,
        warning,
        ..
    } = linalg::drazin(s.matrix())?;
    Ok(DrazinInverse {
        inverse: Superoperator::from_matrix(s.hdim(), inverse)?,
        kernel_projector: Superoperator::from_matrix(s.hdim(), kernel_projector)?,
        kernel_dim,
        threshold,
        warning,
    })
}

/// `P∞ = 1 − L L^D`.
pub fn asymptotic_projection(s: &Superoperator) -> Result<Superoperator> {
    let d = drazin_inverse(s)?;
    Ok(&Superoperator::identity(s.hdim()) - &s.compose(&d.inverse)?)
}

/// `P∞(·) = I_ul(·)I_ul − Σ_ℓ F^ℓ 𝒦_lr⁻¹((·)_lr) F^ℓ†`, valid for structured
/// Lindbladians.
pub fn asymptotic_projection_analytic(l: &StructuredLindbladian) -> Result<Superoperator> {
    let report = l.validate(DEFAULT_TOL)?;
    if !report.is_valid() {
        return Err(EjofError::NotStructured(report.failures().join("; ")));
    }
    let dfs = l.dfs();
    let p = dfs.projector();
    let k = l.kamiltonian();
    let e_lr = dfs.corner_embedding(&[Corner::Lr]);
    let block_inv = k.super_block_inverse(&[Corner::Lr])?;
    let decay_back = &e_lr * block_inv * e_lr.adjoint();
    let mut out = Superoperator::sandwich(p, p)?.into_matrix();
    for f in l.jumps() {
        let jump = Superoperator::sandwich(f, &f.adjoint())?;
        out -= jump.matrix() * &decay_back;
    }
    Superoperator::from_matrix(l.dim(), out)
}

/// `exp(t S)`; for large `t` this converges to `P∞`.
pub fn asymptotic_projection_limit(s: &Superoperator, t: f64) -> Superoperator {
    Superoperator::from_matrix(s.hdim(), linalg::expm(s.matrix(), t))
        .expect("exponential preserves the shape")
}

/// `exp(t S)(ρ)`.
pub fn matrix_exp_apply(s: &Superoperator, t: f64, rho: &Operator) -> Result<Operator> {
    if t < 0.0 {
        return Err(EjofError::InvalidInput(format!("negative time {t}")));
    }
    ensure_dim(rho, s.hdim())?;
    let v = linalg::expm(s.matrix(), t) * vectorize(rho);
    crate::operator::devectorize(&v)
}

pub fn slowest_decay_rate(s: &Superoperator) -> Result<Option<f64>> {
    let threshold = ZERO_EIGENVALUE_RTOL * linalg::spectral_norm(s.matrix());
    Ok(linalg::eigenvalues(s.matrix())?
        .into_iter()
        .filter(|lam| lam.norm() >= threshold)
        .map(|lam| lam.re.abs())
        .min_by(|a, b| a.total_cmp(b)))
}

/// Non-Hermitian generator `K = H − (i/2) Σ_ℓ F^ℓ†F^ℓ` of the decaying block.
#[derive(Debug, Clone)]
pub struct Kamiltonian {
    k: Operator,
    dfs: DfsProjector,
}

impl Kamiltonian {
    pub fn new(h: &Operator, jumps: &[Operator], dfs: &DfsProjector) -> Self {
        let mut k = h.clone();
        for f in jumps {
            k -= (f.adjoint() * f) * (I * 0.5);
        }
        Self {
            k,
            dfs: dfs.clone(),
        }
    }

    pub fn matrix(&self) -> &Operator {
        &self.k
    }

    /// `‖K − K_lr‖`; zero for structured Lindbladians.
    pub fn lr_residual(&self) -> f64 {
        (&self.k - self.dfs.corner(&self.k, Corner::Lr)).norm()
    }

    /// Inverse on the decaying block, padded with zeros elsewhere.
    pub fn inverse(&self) -> Result<Operator> {
        let block = self.dfs.to_decaying(&self.k);
        match linalg::inverse(&block, "Kamiltonian on the decaying block") {
            Ok(inv) => Ok(self.dfs.from_decaying(&inv)),
            Err(_) => {
                let smallest = linalg::eigenvalues(&block)?
                    .into_iter()
                    .min_by(|a, b| a.norm().total_cmp(&b.norm()))
                    .unwrap_or(C64::new(0.0, 0.0));
                Err(EjofError::Singular {
                    what: "Kamiltonian on the decaying block".into(),
                    detail: format!("eigenvalue {smallest:.3e} vanishes"),
                })
            }
        }
    }

    /// `𝒦(X) = −i(K X − X K†)`.
    pub fn superoperator(&self) -> Superoperator {
        Superoperator::star_commutator(&self.k)
            .expect("square Kamiltonian")
            .scale(-I)
    }

    /// Inverse of `𝒦` restricted to the given corners, in block coordinates.
    pub fn super_block_inverse(&self, corners: &[Corner]) -> Result<DMatrix<C64>> {
        let e = self.dfs.corner_embedding(corners);
        let block = e.adjoint() * self.superoperator().matrix() * &e;
        linalg::inverse(&block, "Kamiltonian superoperator block")
    }

    /// Solves `𝒦(X) = σ` with `X` and `σ` supported on `corners`.
    ///
    /// No eigendecomposition of `K` is used, so non-diagonalizable `K` is
    /// handled like any other.
    pub fn solve_super(&self, sigma: &Operator, corners: &[Corner]) -> Result<Operator> {
        ensure_dim(sigma, self.dfs.dim())?;
        let outside = (sigma - self.dfs.corners(sigma, corners)).norm();
        if outside > DEFAULT_TOL * sigma.norm().max(1.0) {
            return Err(EjofError::InvalidInput(format!(
                "operator has support outside the requested corners (residual {outside:.3e})"
            )));
        }
        let e = self.dfs.corner_embedding(corners);
        let block = e.adjoint() * self.superoperator().matrix() * &e;
        let rhs = e.adjoint() * vectorize(sigma);
        let rhs = DMatrix::from_column_slice(rhs.len(), 1, rhs.as_slice());
        let x = linalg::solve(&block, &rhs, "Kamiltonian superoperator block")?;
        let full = &e * x;
        let n = self.dfs.dim();
        Ok(Operator::from_column_slice(n, n, full.as_slice()))
    }

    /// `𝒦_lr⁻¹(σ)` for `σ` on the decaying block.
    pub fn ksuper_inverse_apply(&self, sigma: &Operator) -> Result<Operator> {
        self.solve_super(sigma, &[Corner::Lr])
    }
}

/// Maximally mixed state `I/D`.
pub fn maximally_mixed(dim: usize) -> Operator {
    identity(dim) * real(1.0 / dim as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{c64, ket_bra, star_commutator, zeros};
    use crate::random::{random_hermitian, random_matrix, random_rect, rng};

    fn three_level(delta: f64, gamma: f64) -> StructuredLindbladian {
        let dfs = DfsProjector::from_indices(3, &[0, 1]).unwrap();
        let h = ket_bra(3, 2, 2) * real(delta);
        let f = ket_bra(3, 0, 2) * real(gamma.sqrt());
        StructuredLindbladian::new(h, vec![f], dfs).unwrap()
    }

    /// d = 2 DFS on the first states, random H_lr and random lowering jumps.
    fn random_structured(seed: u64, n: usize, jumps: usize) -> StructuredLindbladian {
        let mut r = rng(seed);
        let d = 2;
        let dim = d + n;
        let dfs = DfsProjector::from_indices(dim, &[0, 1]).unwrap();
        let mut h = zeros(dim);
        h.view_mut((d, d), (n, n))
            .copy_from(&random_hermitian(&mut r, n));
        let fs = (0..jumps)
            .map(|_| {
                let mut f = zeros(dim);
                f.view_mut((0, d), (d, n))
                    .copy_from(&random_rect(&mut r, d, n));
                f
            })
            .collect();
        StructuredLindbladian::new(h, fs, dfs).unwrap()
    }

    #[test]
    fn assemble_examples() {
        let l = three_level(0.0, 2.0);
        let out = l.superop().apply(&ket_bra(3, 2, 2)).unwrap();
        assert!((out - (ket_bra(3, 0, 0) - ket_bra(3, 2, 2)) * real(2.0)).norm() < 1e-14);
        assert_eq!(assemble_lindbladian(&zeros(3), &[]).unwrap().norm(), 0.0);
        let mut bad = zeros(2);
        bad[(0, 1)] = real(1.0);
        assert!(matches!(
            assemble_lindbladian(&bad, &[]),
            Err(EjofError::NotHermitian { .. })
        ));
    }

    #[test]
    fn random_structured_instances_keep_the_dfs_steady() {
        let l = random_structured(31, 4, 2);
        let mut r = rng(32);
        let rho = l.dfs().from_dfs(&random_hermitian(&mut r, 2));
        assert!(l.superop().apply(&rho).unwrap().norm() < 1e-12);
        assert!(l.superop().trace_residual() < 1e-12);
        assert!(l.superop().hermiticity_residual() < 1e-12);
        assert!(l.validate(DEFAULT_TOL).unwrap().is_valid());
    }

    #[test]
    fn validation_examples() {
        let report = three_level(1.0, 2.0).validate(DEFAULT_TOL).unwrap();
        assert!(report.is_valid(), "{:?}", report.failures());
        assert_eq!(report.zero_multiplicity, 4);

        let dfs = DfsProjector::from_indices(3, &[0, 1]).unwrap();
        let raising = ket_bra(3, 2, 0) * real(2.0_f64.sqrt());
        let bad = StructuredLindbladian::new(ket_bra(3, 2, 2), vec![raising], dfs.clone()).unwrap();
        let report = bad.validate(DEFAULT_TOL).unwrap();
        assert!(!report.jumps_ok());
        assert!(!report.is_valid());

        // no decay out of |e⟩: steady subspace too large
        let idle = StructuredLindbladian::new(ket_bra(3, 2, 2), vec![], dfs.clone()).unwrap();
        let report = idle.validate(DEFAULT_TOL).unwrap();
        assert!(!report.unique_ok());
        assert!(
            StructuredLindbladian::structured(ket_bra(3, 2, 2), vec![], dfs, DEFAULT_TOL).is_err()
        );
    }

    #[test]
    fn drazin_of_three_level_matches_exponential_limit() {
        let gamma = 2.0;
        let l = three_level(1.0, gamma);
        let d = l.drazin_inverse().unwrap();
        assert_eq!(d.kernel_dim, 4);
        let p_limit = asymptotic_projection_limit(l.superop(), 60.0 / gamma);
        let ssd = l.superop().compose(&d.inverse).unwrap();
        let expected = &Superoperator::identity(3) - &p_limit;
        assert!((ssd.matrix() - expected.matrix()).norm() < 1e-9);
    }

    #[test]
    fn asymptotic_projection_examples() {
        let p = asymptotic_projection(&Superoperator::zeros(3)).unwrap();
        assert_eq!(p, Superoperator::identity(3));

        let l = three_level(1.0, 2.0);
        let p = asymptotic_projection(l.superop()).unwrap();
        let out = p.apply(&ket_bra(3, 2, 2)).unwrap();
        assert!((out - ket_bra(3, 0, 0)).norm() < 1e-10);

        let l = random_structured(33, 3, 1);
        let p = asymptotic_projection(l.superop()).unwrap();
        let mut r = rng(34);
        let rho = l.dfs().from_dfs(&random_hermitian(&mut r, 2));
        assert!((p.apply(&rho).unwrap() - &rho).norm() < 1e-10);
        assert!((p.compose(&p).unwrap().matrix() - p.matrix()).norm() < 1e-9);
        assert!(p.compose(l.superop()).unwrap().norm() < 1e-9);
        assert!(l.superop().compose(&p).unwrap().norm() < 1e-9);
    }

    #[test]
    fn analytic_projection_examples() {
        let l = three_level(1.0, 2.0);
        let analytic = asymptotic_projection_analytic(&l).unwrap();
        let drazin = asymptotic_projection(l.superop()).unwrap();
        assert!((analytic.matrix() - drazin.matrix()).norm() < 1e-10);

        let l = three_level(0.0, 1.3);
        let p = asymptotic_projection_analytic(&l).unwrap();
        assert!((p.apply(&ket_bra(3, 2, 2)).unwrap() - ket_bra(3, 0, 0)).norm() < 1e-14);
        // coherences between the DFS and the decaying state are destroyed
        let of = ket_bra(3, 0, 2) + ket_bra(3, 2, 1) * c64(0.3, 0.4);
        assert!(p.apply(&of).unwrap().norm() < 1e-14);

        for seed in 0..5 {
            let l = random_structured(100 + seed, 2 + seed as usize % 4, 1 + seed as usize % 3);
            let analytic = asymptotic_projection_analytic(&l).unwrap();
            let drazin = asymptotic_projection(l.superop()).unwrap();
            assert!((analytic.matrix() - drazin.matrix()).norm() < 1e-9);
        }
    }

    #[test]
    fn kamiltonian_examples() {
        let (delta, gamma) = (0.8, 2.0);
        let k = three_level(delta, gamma).kamiltonian();
        assert!((k.matrix() - ket_bra(3, 2, 2) * c64(delta, -gamma / 2.0)).norm() < 1e-15);
        assert_eq!(k.lr_residual(), 0.0);
        let inv = k.inverse().unwrap();
        assert!((inv[(2, 2)] - c64(delta, -gamma / 2.0).inv()).norm() < 1e-15);

        let l = random_structured(35, 5, 3);
        let k = l.kamiltonian();
        let inv = k.inverse().unwrap();
        let id_lr = l.dfs().complement();
        assert!((k.matrix() * &inv - id_lr).norm() < 1e-12);
        assert!((&inv * k.matrix() - id_lr).norm() < 1e-12);
    }

    #[test]
    fn singular_kamiltonian_is_reported() {
        let dfs = DfsProjector::from_indices(3, &[0, 1]).unwrap();
        let k = Kamiltonian::new(&zeros(3), &[], &dfs);
        match k.inverse() {
            Err(EjofError::Singular { detail, .. }) => assert!(detail.contains("vanishes")),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn ksuper_inverse_with_jordan_block() {
        // H_lr and F chosen so that K restricted to lr is a 2x2 Jordan block
        let dim = 4;
        let dfs = DfsProjector::from_indices(dim, &[0, 1]).unwrap();
        let (g1, g2) = (2.0_f64, 1.0_f64);
        let mut h = zeros(dim);
        h[(2, 3)] = real((g1 - g2) / 4.0);
        h[(3, 2)] = real((g1 - g2) / 4.0);
        let mut f = zeros(dim);
        f[(0, 2)] = real(g1.sqrt());
        f[(1, 3)] = real(g2.sqrt());
        let l = StructuredLindbladian::new(h, vec![f], dfs.clone()).unwrap();
        let k = l.kamiltonian();
        let block = dfs.to_decaying(k.matrix());
        let lam = block.trace() * real(0.5);
        let shifted = &block - Operator::identity(2, 2) * lam;
        assert!(shifted.norm() > 0.1);
        assert!((&shifted * &shifted).norm() < 1e-14);

        let mut r = rng(36);
        let sigma = dfs.corner(&random_matrix(&mut r, dim), Corner::Lr);
        let x = k.ksuper_inverse_apply(&sigma).unwrap();
        assert!((k.superoperator().apply(&x).unwrap() - &sigma).norm() < 1e-12);
        assert!(l.validate(DEFAULT_TOL).unwrap().is_valid());
    }

    #[test]
    fn ksuper_of_corner_equals_operator_inverse_form() {
        let l = random_structured(37, 3, 2);
        let k = l.kamiltonian();
        let kinv = k.inverse().unwrap();
        let mut r = rng(38);
        let sigma = l
            .dfs()
            .corners(&random_matrix(&mut r, 5), &Corner::OFF_DIAGONAL);
        let x = k.solve_super(&sigma, &Corner::OFF_DIAGONAL).unwrap();
        let expected = star_commutator(&kinv, &sigma) * I;
        assert!((x - expected).norm() < 1e-12);
        assert!(k.solve_super(&sigma, &[Corner::Lr]).is_err());
    }

    #[test]
    fn matrix_exp_examples() {
        let gamma = 2.0;
        let l = three_level(0.5, gamma);
        let rho = ket_bra(3, 2, 2);
        assert_eq!(matrix_exp_apply(l.superop(), 0.0, &rho).unwrap(), rho);
        let out = matrix_exp_apply(l.superop(), 50.0 / gamma, &rho).unwrap();
        assert!((out - ket_bra(3, 0, 0)).norm() < 1e-9);
        assert!(matrix_exp_apply(l.superop(), -1.0, &rho).is_err());

        let mut r = rng(39);
        let h = random_hermitian(&mut r, 3);
        let fs: Vec<Operator> = (0..2).map(|_| random_matrix(&mut r, 3)).collect();
        let s = assemble_lindbladian(&h, &fs).unwrap();
        let rho = maximally_mixed(3);
        let out = matrix_exp_apply(&s, 1.7, &rho).unwrap();
        assert!((out.trace() - rho.trace()).norm() < 1e-11);
    }

    #[test]
    fn curious_identity_holds() {
        let l = random_structured(40, 4, 2);
        let kinv = l.kamiltonian().inverse().unwrap();
        let lhs = l
            .jumps()
            .iter()
            .map(|f| kinv.adjoint() * f.adjoint() * f * &kinv)
            .fold(zeros(6), |a, b| a + b);
        let rhs = (&kinv - kinv.adjoint()) * (-I);
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
