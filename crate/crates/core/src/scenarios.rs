//! Concrete instances: the three-level system, jump families with the
//! surjectivity and orthogonality conditions, engineered cancellation
//! drives, and seeded random instances.

use nalgebra::{DMatrix, DVector};

use crate::effective::{
    effective_kamiltonian, effective_lindbladian_closed, effective_lindbladian_general,
    Perturbation,
};
use crate::error::{EjofError, Result};
use crate::lindblad::StructuredLindbladian;
use crate::operator::{
    hermitian_part, ket_bra, real, zeros, Corner, DfsProjector, Operator, Superoperator, C64,
    DEFAULT_TOL, I,
};
use crate::random::{random_hermitian, random_matrix, random_rect, random_unitary, rng};

/// Tolerance for the surjectivity condition `F (F†F)⁺ F† = I_ul`.
pub const SURJECTIVITY_TOL: f64 = 1e-10;
/// Redraws allowed when a random jump misses the surjectivity condition.
pub const MAX_REDRAWS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelParams {
    /// Energy `δ` of the excited level.
    pub delta: f64,
    /// Decay rate `Γ` of the excited level.
    pub gamma_big: f64,
    /// Rate `γ` of the perturbing jump.
    pub gamma: f64,
}

/// Basis `(|0⟩, |1⟩, |e⟩)`, `H = δ|e⟩⟨e|`, `F = √Γ|0⟩⟨e|`, `f = √γ|0⟩⟨1|`.
pub fn three_level_system(p: ThreeLevelParams) -> Result<(StructuredLindbladian, Perturbation)> {
    if !(p.gamma_big > 0.0) {
        return Err(EjofError::InvalidInput(format!(
            "decay rate must be positive, got {}",
            p.gamma_big
        )));
    }
    if !(p.gamma >= 0.0) {
        return Err(EjofError::InvalidInput(format!(
            "perturbing rate must be nonnegative, got {}",
            p.gamma
        )));
    }
    let dfs = DfsProjector::from_indices(3, &[0, 1])?;
    let h = ket_bra(3, 2, 2) * real(p.delta);
    let f_big = ket_bra(3, 0, 2) * real(p.gamma_big.sqrt());
    let l = StructuredLindbladian::new(h, vec![f_big], dfs)?;
    let pert = Perturbation::new(zeros(3), vec![ket_bra(3, 0, 1) * real(p.gamma.sqrt())])?;
    Ok((l, pert))
}

/// `f = √γ|0⟩⟨ψ|` for a normalized `ψ` in the DFS of the three-level system.
pub fn generalized_three_level(psi: &[C64; 2], gamma: f64) -> Result<Perturbation> {
    let norm = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
    if (norm - 1.0).abs() > DEFAULT_TOL {
        return Err(EjofError::InvalidInput(format!(
            "state is not normalized (norm {norm})"
        )));
    }
    if gamma < 0.0 {
        return Err(EjofError::InvalidInput(format!("negative rate {gamma}")));
    }
    let mut f = zeros(3);
    f[(0, 0)] = psi[0].conj() * gamma.sqrt();
    f[(0, 1)] = psi[1].conj() * gamma.sqrt();
    Perturbation::new(zeros(3), vec![f])
}

/// Moore–Penrose inverse via SVD, singular values below `1e-12·σ_max`
/// treated as zero.
pub fn pseudo_inverse(a: &DMatrix<C64>) -> DMatrix<C64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    svd.pseudo_inverse(1e-12 * smax.max(f64::MIN_POSITIVE))
        .expect("both singular vector sets were computed")
}

/// `‖F (F†F)⁺ F† − I_ul‖_F`.
pub fn surjectivity_residual(dfs: &DfsProjector, f: &Operator) -> f64 {
    let fdf = f.adjoint() * f;
    (f * pseudo_inverse(&fdf) * f.adjoint() - dfs.projector()).norm()
}

/// `max_{ℓ≠ℓ'} ‖F^ℓ F^ℓ'†‖_F`; the diagonal case holds trivially.
pub fn orthogonality_residual(family: &[Operator]) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, fa) in family.iter().enumerate() {
        for (b, fb) in family.iter().enumerate() {
            if a != b {
                worst = worst.max((fa * fb.adjoint()).norm());
            }
        }
    }
    worst
}

/// Lowering jump `F = F_ur` with complex normal entries on a DFS of
/// dimension `d` (first `d` basis states) and `n` decaying states.
pub fn random_surjective_jump(d: usize, n: usize, seed: u64) -> Result<Operator> {
    if n < d {
        return Err(EjofError::InvalidInput(format!(
            "a map from {n} decaying states cannot cover a {d}-dimensional DFS"
        )));
    }
    let dfs = dfs_first(d, n)?;
    let mut r = rng(seed);
    for _ in 0..MAX_REDRAWS {
        let f = embed_ur(d, n, &random_rect(&mut r, d, n));
        if surjectivity_residual(&dfs, &f) <= SURJECTIVITY_TOL {
            return Ok(f);
        }
    }
    Err(EjofError::InvalidInput(format!(
        "no surjective jump found in {MAX_REDRAWS} draws"
    )))
}

/// Jumps occupying disjoint consecutive blocks of the `n` decaying states.
pub fn random_orthogonal_family(
    d: usize,
    n: usize,
    blocks: &[usize],
    seed: u64,
) -> Result<Vec<Operator>> {
    let total: usize = blocks.iter().sum();
    if total > n {
        return Err(EjofError::InvalidInput(format!(
            "blocks need {total} decaying states but only {n} exist"
        )));
    }
    if let Some(&small) = blocks.iter().find(|&&b| b < d) {
        return Err(EjofError::InvalidInput(format!(
            "block of size {small} cannot cover a {d}-dimensional DFS"
        )));
    }
    let dfs = dfs_first(d, n)?;
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(blocks.len());
    let mut offset = 0;
    for &size in blocks {
        let mut found = None;
        for _ in 0..MAX_REDRAWS {
            let mut f = zeros(d + n);
            f.view_mut((0, d + offset), (d, size))
                .copy_from(&random_rect(&mut r, d, size));
            if surjectivity_residual(&dfs, &f) <= SURJECTIVITY_TOL {
                found = Some(f);
                break;
            }
        }
        out.push(found.ok_or_else(|| {
            EjofError::InvalidInput(format!("no surjective jump found in {MAX_REDRAWS} draws"))
        })?);
        offset += size;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub surjectivity: Vec<f64>,
    pub orthogonality: f64,
    pub tol: f64,
}

impl ConditionReport {
    pub fn surjective(&self) -> bool {
        self.surjectivity.iter().all(|&r| r <= self.tol)
    }

    pub fn orthogonal(&self) -> bool {
        self.orthogonality <= self.tol
    }

    pub fn holds(&self) -> bool {
        self.surjective() && self.orthogonal()
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (l, &r) in self.surjectivity.iter().enumerate() {
            if r > self.tol {
                out.push(format!(
                    "jump {l} is not surjective onto the DFS (residual {r:.3e})"
                ));
            }
        }
        if !self.orthogonal() {
            out.push(format!(
                "jumps are not mutually orthogonal (residual {:.3e})",
                self.orthogonality
            ));
        }
        out
    }
}

pub fn check_conditions(dfs: &DfsProjector, family: &[Operator]) -> ConditionReport {
    ConditionReport {
        surjectivity: family
            .iter()
            .map(|f| surjectivity_residual(dfs, f))
            .collect(),
        orthogonality: orthogonality_residual(family),
        tol: SURJECTIVITY_TOL,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CancellationReport {
    /// `‖F_eff^ℓ‖` from the closed form.
    pub f_eff_norms: Vec<f64>,
    /// `‖E_eff‖` from the closed form.
    pub e_eff_norm: f64,
    /// `‖L_eff‖` from the general route.
    pub l_eff_norm: f64,
    /// Violated preconditions; cancellation is not expected if nonempty.
    pub violations: Vec<String>,
    pub tol: f64,
}

impl CancellationReport {
    pub fn cancelled(&self) -> bool {
        self.l_eff_norm <= self.tol && self.f_eff_norms.iter().all(|&n| n <= self.tol)
    }
}

pub const CANCELLATION_TOL: f64 = 1e-10;

/// Evaluates both routes for a jump-only perturbation of a Lindbladian with
/// `H = 0` and records which cancellation preconditions fail.
pub fn cancellation_check(
    l: &StructuredLindbladian,
    pert: &Perturbation,
) -> Result<CancellationReport> {
    let dfs = l.dfs();
    let mut violations = check_conditions(dfs, l.jumps()).failures();
    if l.hamiltonian().norm() > DEFAULT_TOL {
        violations.push("unperturbed Hamiltonian is nonzero".into());
    }
    for (k, f) in pert.fs.iter().enumerate() {
        let ll = dfs.corner(f, Corner::Ll).norm();
        if ll > DEFAULT_TOL {
            violations.push(format!(
                "perturbation {k} maps out of the DFS (norm {ll:.3e})"
            ));
        }
    }
    let closed = effective_lindbladian_closed(l, pert)?;
    let general = effective_lindbladian_general(l, pert)?;
    Ok(CancellationReport {
        f_eff_norms: closed.f_effs.iter().map(|f| f.norm()).collect(),
        e_eff_norm: closed.e_eff.norm(),
        l_eff_norm: general.norm(),
        violations,
        tol: CANCELLATION_TOL,
    })
}

/// `V = (i/2) Σ (F†f − f†F) + Ṽ` with `Ṽ = X + X†`,
/// `X = K Σ (F†F)⁺ F† f_ul`. This removes every effective jump when the
/// jumps are mutually orthogonal and each `f_ul` lies in the range of its
/// `F` (implied by surjectivity), and `f_ll = 0`; those conditions are not
/// enforced here.
pub fn coherent_cancellation_drive(
    l: &StructuredLindbladian,
    fs: &[Operator],
) -> Result<Perturbation> {
    let dfs = l.dfs();
    let dim = l.dim();
    if fs.len() != l.jumps().len() {
        return Err(EjofError::InvalidInput(format!(
            "{} jump perturbations for {} unperturbed jumps",
            fs.len(),
            l.jumps().len()
        )));
    }
    for (big, small) in l.jumps().iter().zip(fs) {
        if big.norm() == 0.0 && dfs.corner(small, Corner::Ul).norm() > 0.0 {
            return Err(EjofError::Singular {
                what: "F†F".into(),
                detail: "a vanishing jump carries a nonzero perturbation".into(),
            });
        }
    }
    let k = l.kamiltonian();
    // fails with the vanishing eigenvalue when K is singular on the decaying block
    k.inverse()?;
    let mut v = zeros(dim);
    let mut x = zeros(dim);
    for (big, small) in l.jumps().iter().zip(fs) {
        v += (big.adjoint() * small - small.adjoint() * big) * (I * 0.5);
        let fdf = big.adjoint() * big;
        let ful = dfs.corner(small, Corner::Ul);
        x += pseudo_inverse(&fdf) * big.adjoint() * ful;
    }
    let x = k.matrix() * x;
    v += &x + x.adjoint();
    Perturbation::new(hermitian_part(&v), fs.to_vec())
}

/// Adds the DFS Hamiltonian `Herm(K_eff K⁻¹ K_eff)_ul` to `V`, which cancels
/// the second-order effective Hamiltonian without changing `K_eff`.
pub fn with_hamiltonian_compensation(
    l: &StructuredLindbladian,
    pert: &Perturbation,
) -> Result<Perturbation> {
    let k_eff = effective_kamiltonian(l, pert)?;
    let k_inv = l.kamiltonian().inverse()?;
    let shift = l
        .dfs()
        .corner(&hermitian_part(&(&k_eff * k_inv * &k_eff)), Corner::Ul);
    Perturbation::new(&pert.v + shift, pert.fs.clone())
}

/// Perturbation whose effective generator is `−i[target_h,·] + Σ D[target_k]`
/// on the DFS. Targets are given in DFS coordinates.
pub fn universal_dissipation(
    l: &StructuredLindbladian,
    target_h: &Operator,
    target_jumps: &[Operator],
) -> Result<Perturbation> {
    let dfs = l.dfs();
    let d = dfs.dfs_dim();
    if target_jumps.len() > l.jumps().len() {
        return Err(EjofError::InvalidInput(format!(
            "{} target jumps need at least as many unperturbed jumps, found {}",
            target_jumps.len(),
            l.jumps().len()
        )));
    }
    crate::operator::ensure_dim(target_h, d)?;
    let mut fs = Vec::with_capacity(l.jumps().len());
    for t in target_jumps {
        crate::operator::ensure_dim(t, d)?;
        fs.push(dfs.from_dfs(t));
    }
    let pert = Perturbation::new(zeros(l.dim()), fs)?.padded(l.jumps().len());
    let mut v = dfs.from_dfs(target_h);
    for (big, small) in l.jumps().iter().zip(&pert.fs) {
        v += (big.adjoint() * small - small.adjoint() * big) * (I * 0.5);
    }
    Perturbation::new(hermitian_part(&v), pert.fs)
}

/// `−i[H,·] + Σ D[F]` on the DFS for targets in DFS coordinates.
pub fn target_generator(target_h: &Operator, target_jumps: &[Operator]) -> Result<Superoperator> {
    crate::lindblad::assemble_lindbladian(target_h, target_jumps)
}

/// Random structured Lindbladian: DFS on the first `d` states, Hermitian
/// `H_lr` and `jumps` lowering operators with complex normal entries.
pub fn random_structured_instance(
    d: usize,
    n: usize,
    jumps: usize,
    seed: u64,
) -> Result<StructuredLindbladian> {
    if d == 0 || n == 0 {
        return Err(EjofError::InvalidInput(
            "DFS and decaying space must be nonempty".into(),
        ));
    }
    let mut r = rng(seed);
    let dfs = dfs_first(d, n)?;
    let h = embed_lr(d, n, &random_hermitian(&mut r, n));
    let fs = (0..jumps)
        .map(|_| embed_ur(d, n, &random_rect(&mut r, d, n)))
        .collect();
    StructuredLindbladian::structured(h, fs, dfs, DEFAULT_TOL)
}

/// Random perturbation with every corner populated.
pub fn random_perturbation(l: &StructuredLindbladian, seed: u64) -> Perturbation {
    let mut r = rng(seed);
    let dim = l.dim();
    let v = random_hermitian(&mut r, dim);
    let fs = (0..l.jumps().len())
        .map(|_| random_matrix(&mut r, dim))
        .collect();
    Perturbation { v, fs }
}

/// Rates on the two states of the defective block of [`jordan_instance`].
pub const JORDAN_RATES: (f64, f64) = (2.0, 1.0);

/// Structured instance whose `K` has a 2x2 Jordan block on the first two
/// decaying states. A second random jump covers the remaining `n − 2`.
pub fn jordan_instance(d: usize, n: usize, seed: u64) -> Result<StructuredLindbladian> {
    if d < 2 || n < 2 {
        return Err(EjofError::InvalidInput(
            "a Jordan block needs d ≥ 2 and at least two decaying states".into(),
        ));
    }
    let mut r = rng(seed);
    let dfs = dfs_first(d, n)?;
    let (g1, g2) = JORDAN_RATES;
    let coupling = (g1 - g2) / 4.0;

    let mut h_lr = DMatrix::zeros(n, n);
    h_lr[(0, 1)] = real(coupling);
    h_lr[(1, 0)] = real(coupling);
    if n > 2 {
        h_lr.view_mut((2, 2), (n - 2, n - 2))
            .copy_from(&random_hermitian(&mut r, n - 2));
    }

    let u = random_unitary(&mut r, d);
    let mut block = DMatrix::zeros(d, n);
    for row in 0..d {
        block[(row, 0)] = u[(row, 0)] * g1.sqrt();
        block[(row, 1)] = u[(row, 1)] * g2.sqrt();
    }
    let mut fs = vec![embed_ur(d, n, &block)];
    if n > 2 {
        let mut rest = DMatrix::zeros(d, n);
        rest.view_mut((0, 2), (d, n - 2))
            .copy_from(&random_rect(&mut r, d, n - 2));
        fs.push(embed_ur(d, n, &rest));
    }
    StructuredLindbladian::structured(embed_lr(d, n, &h_lr), fs, dfs, DEFAULT_TOL)
}

/// `‖(K_lr − λ)²‖ / ‖K_lr − λ‖` for the defective block of a
/// [`jordan_instance`]; zero for a genuine Jordan block.
pub fn jordan_defect(l: &StructuredLindbladian) -> f64 {
    let k = l.dfs().to_decaying(l.kamiltonian().matrix());
    let block = k.view((0, 0), (2, 2)).into_owned();
    let shifted = &block - DMatrix::identity(2, 2) * (block.trace() * real(0.5));
    (&shifted * &shifted).norm() / shifted.norm()
}

fn dfs_first(d: usize, n: usize) -> Result<DfsProjector> {
    let idx: Vec<usize> = (0..d).collect();
    DfsProjector::from_indices(d + n, &idx)
}

fn embed_ur(d: usize, n: usize, block: &DMatrix<C64>) -> Operator {
    let mut f = zeros(d + n);
    f.view_mut((0, d), (d, n)).copy_from(block);
    f
}

fn embed_lr(d: usize, n: usize, block: &DMatrix<C64>) -> Operator {
    let mut h = zeros(d + n);
    h.view_mut((d, d), (n, n)).copy_from(block);
    h
}

/// Normalized state vector from complex amplitudes.
pub fn normalized(v: &[C64]) -> DVector<C64> {
    let v = DVector::from_column_slice(v);
    let n = v.norm();
    v / real(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{c64, relative_difference};

    fn tl(delta: f64) -> (StructuredLindbladian, Perturbation) {
        three_level_system(ThreeLevelParams {
            delta,
            gamma_big: 2.0,
            gamma: 0.04,
        })
        .unwrap()
    }

    /// `H = 0` Lindbladian with `m` orthogonal jumps, each on its own block of
    /// `d` decaying states.
    fn orthogonal_instance(d: usize, m: usize, seed: u64) -> StructuredLindbladian {
        let n = d * m;
        let fs = random_orthogonal_family(d, n, &vec![d; m], seed).unwrap();
        StructuredLindbladian::structured(zeros(d + n), fs, dfs_first(d, n).unwrap(), DEFAULT_TOL)
            .unwrap()
    }

    fn jumps_in(l: &StructuredLindbladian, seed: u64, corners: &[Corner]) -> Vec<Operator> {
        let mut r = rng(seed);
        (0..l.jumps().len())
            .map(|_| l.dfs().corners(&random_matrix(&mut r, l.dim()), corners))
            .collect()
    }

    #[test]
    fn three_level_layout() {
        let (l, pert) = tl(1.0);
        assert_eq!(l.hamiltonian()[(2, 2)], real(1.0));
        assert_eq!(l.jumps()[0][(0, 2)], real(2.0_f64.sqrt()));
        assert_eq!(pert.fs[0][(0, 1)], real(0.2));
        assert!(l.validate(DEFAULT_TOL).unwrap().is_valid());
        let bad = ThreeLevelParams {
            delta: 1.0,
            gamma_big: 0.0,
            gamma: 0.1,
        };
        assert!(three_level_system(bad).is_err());
    }

    #[test]
    fn generalized_three_level_examples() {
        let (l, _) = tl(0.0);
        let one = [real(0.0), real(1.0)];
        let pert = generalized_three_level(&one, 0.04).unwrap();
        assert_eq!(pert, tl(0.0).1);
        let eff = effective_lindbladian_closed(&l, &pert).unwrap();
        assert!(eff.f_effs[0].norm() < 1e-15);

        let plus = normalized(&[real(1.0), real(1.0)]);
        let pert = generalized_three_level(&[plus[0], plus[1]], 0.04).unwrap();
        let eff = effective_lindbladian_closed(&l, &pert).unwrap();
        assert!(eff.f_effs[0].norm() <= 1e-12);

        let (l, _) = tl(1.0);
        let pert = generalized_three_level(&one, 0.04).unwrap();
        let eff = effective_lindbladian_closed(&l, &pert).unwrap();
        assert!(eff.f_effs[0].norm() > 1e-3);

        assert!(generalized_three_level(&[real(1.0), real(1.0)], 0.04).is_err());
    }

    #[test]
    fn surjective_jump_examples() {
        let f = random_surjective_jump(2, 4, 7).unwrap();
        let dfs = dfs_first(2, 4).unwrap();
        assert!(surjectivity_residual(&dfs, &f) <= 1e-10);
        assert_eq!(dfs.corner(&f, Corner::Ur), f);
        assert!(random_surjective_jump(2, 1, 7).is_err());

        let dfs1 = dfs_first(1, 1).unwrap();
        let f1 = ket_bra(2, 0, 1) * real(3.0_f64.sqrt());
        assert!(surjectivity_residual(&dfs1, &f1) < 1e-15);
        assert_eq!(random_surjective_jump(2, 4, 7).unwrap(), f);
    }

    #[test]
    fn orthogonal_family_examples() {
        let fam = random_orthogonal_family(2, 4, &[2, 2], 3).unwrap();
        let report = check_conditions(&dfs_first(2, 4).unwrap(), &fam);
        assert_eq!(report.orthogonality, 0.0);
        assert!(report.surjective());

        let single = random_orthogonal_family(2, 3, &[3], 3).unwrap();
        assert_eq!(single.len(), 1);
        assert!(surjectivity_residual(&dfs_first(2, 3).unwrap(), &single[0]) <= 1e-10);

        // both jumps on the same block
        let dfs = dfs_first(2, 2).unwrap();
        let a = random_surjective_jump(2, 2, 1).unwrap();
        let b = random_surjective_jump(2, 2, 2).unwrap();
        let report = check_conditions(&dfs, &[a, b]);
        assert!(!report.orthogonal());
        assert!(!report.failures().is_empty());

        assert!(random_orthogonal_family(2, 3, &[2, 2], 0).is_err());
        assert!(random_orthogonal_family(2, 4, &[1, 3], 0).is_err());
    }

    #[test]
    fn cancellation_holds_under_the_conditions() {
        let mut count = 0;
        for seed in 0..50u64 {
            let d = 1 + seed as usize % 3;
            let m = 1 + seed as usize % 2 + (seed as usize / 25);
            let l = orthogonal_instance(d, m, seed);
            let fs = jumps_in(&l, 1000 + seed, &[Corner::Ul, Corner::Ur, Corner::Lr]);
            let pert = Perturbation::new(zeros(l.dim()), fs).unwrap();
            let report = cancellation_check(&l, &pert).unwrap();
            assert!(report.violations.is_empty(), "{:?}", report.violations);
            assert!(report.cancelled(), "seed {seed}: {report:?}");
            // both routes are round-off here; only the scaled residual is meaningful
            assert!(
                crate::effective::verify_equivalence(&l, &pert, 1e-9)
                    .unwrap()
                    .pass
            );
            count += 1;
        }
        assert_eq!(count, 50);
    }

    #[test]
    fn cancellation_fails_when_conditions_break() {
        // f_ll ≠ 0
        for seed in 0..3u64 {
            let l = orthogonal_instance(2, 2, seed);
            let fs = jumps_in(&l, 2000 + seed, &Corner::ALL);
            let pert = Perturbation::new(zeros(l.dim()), fs).unwrap();
            let report = cancellation_check(&l, &pert).unwrap();
            assert!(!report.violations.is_empty());
            assert!(report.e_eff_norm > 1e-6);
            assert!(report.l_eff_norm > 1e-6);
        }
        // overlapping supports
        for seed in 0..3u64 {
            let dfs = dfs_first(2, 2).unwrap();
            let fam = vec![
                random_surjective_jump(2, 2, 10 + seed).unwrap(),
                random_surjective_jump(2, 2, 20 + seed).unwrap(),
            ];
            let l = StructuredLindbladian::structured(zeros(4), fam, dfs, DEFAULT_TOL).unwrap();
            let fs = jumps_in(&l, 3000 + seed, &[Corner::Ul]);
            let pert = Perturbation::new(zeros(4), fs).unwrap();
            let report = cancellation_check(&l, &pert).unwrap();
            assert!(!report.violations.is_empty());
            assert!(report.l_eff_norm > 1e-6, "{report:?}");
        }
        let l = orthogonal_instance(2, 2, 9);
        let report = cancellation_check(&l, &Perturbation::zero(l.dim(), 2)).unwrap();
        assert!(report.cancelled());
    }

    #[test]
    fn coherent_drive_examples() {
        let (l, pert) = tl(1.0);
        let drive = coherent_cancellation_drive(&l, &pert.fs).unwrap();
        assert!(crate::operator::hermitian_residual(&drive.v) < 1e-12);
        let eff = effective_lindbladian_closed(&l, &drive).unwrap();
        assert!(eff.f_effs[0].norm() < 1e-12);

        let (l0, pert0) = tl(0.0);
        let drive0 = coherent_cancellation_drive(&l0, &pert0.fs).unwrap();
        let eff = effective_lindbladian_closed(&l0, &drive0).unwrap();
        assert!(eff.f_effs[0].norm() < 1e-12);

        let zero = coherent_cancellation_drive(&l, &[zeros(3)]).unwrap();
        assert_eq!(zero.v, zeros(3));

        assert!(coherent_cancellation_drive(&l, &[]).is_err());
    }

    #[test]
    fn coherent_drive_on_random_orthogonal_families() {
        for seed in 0..5u64 {
            let d = 2;
            let n = 4;
            let fam = random_orthogonal_family(d, n, &[2, 2], 40 + seed).unwrap();
            let mut r = rng(50 + seed);
            let h = embed_lr(d, n, &random_hermitian(&mut r, n));
            let l =
                StructuredLindbladian::structured(h, fam, dfs_first(d, n).unwrap(), DEFAULT_TOL)
                    .unwrap();
            let fs = jumps_in(&l, 60 + seed, &[Corner::Ul, Corner::Ur]);
            let drive = coherent_cancellation_drive(&l, &fs).unwrap();
            let eff = effective_lindbladian_closed(&l, &drive).unwrap();
            for f in &eff.f_effs {
                assert!(f.norm() < 1e-11, "seed {seed}: {}", f.norm());
            }
            // the residual Hamiltonian is removed by the compensation
            let full = with_hamiltonian_compensation(&l, &drive).unwrap();
            let eff = effective_lindbladian_closed(&l, &full).unwrap();
            assert!(eff.superop.norm() < 1e-10);
            let general = effective_lindbladian_general(&l, &full).unwrap();
            assert!(general.norm() < 1e-9);
        }
    }

    #[test]
    fn universal_dissipation_examples() {
        let l = random_structured_instance(2, 3, 3, 77).unwrap();
        let s = 0.05;
        let sm = ket_bra(2, 1, 0) * real(s);
        let mut sz = zeros(2);
        sz[(0, 0)] = real(0.5 * s);
        sz[(1, 1)] = real(-0.5 * s);
        let sp = ket_bra(2, 0, 1) * real(s);
        let mut th = zeros(2);
        th[(0, 1)] = c64(0.01, 0.02);
        th[(1, 0)] = c64(0.01, -0.02);
        let targets = vec![sm, sz, sp];
        let pert = universal_dissipation(&l, &th, &targets).unwrap();
        let general = effective_lindbladian_general(&l, &pert).unwrap();
        let target = target_generator(&th, &targets).unwrap();
        assert!(relative_difference(target.matrix(), general.matrix()) < 1e-9);

        let pert = universal_dissipation(&l, &th, &[]).unwrap();
        let general = effective_lindbladian_general(&l, &pert).unwrap();
        let target = Superoperator::hamiltonian(&th).unwrap();
        assert!(relative_difference(target.matrix(), general.matrix()) < 1e-9);

        let pert = universal_dissipation(&l, &zeros(2), &[]).unwrap();
        assert!(effective_lindbladian_general(&l, &pert).unwrap().norm() < 1e-10);

        let too_many = vec![zeros(2); 4];
        assert!(universal_dissipation(&l, &th, &too_many).is_err());
    }

    #[test]
    fn jordan_instance_is_defective() {
        let l = jordan_instance(2, 4, 1).unwrap();
        assert!(jordan_defect(&l) < 1e-12);
        let k = l.kamiltonian();
        assert!(k.inverse().is_ok());
        assert!(jordan_instance(1, 4, 1).is_err());
    }

    #[test]
    fn random_instances_are_deterministic() {
        let a = random_structured_instance(2, 3, 2, 5).unwrap();
        let b = random_structured_instance(2, 3, 2, 5).unwrap();
        assert_eq!(a.superop(), b.superop());
        assert_eq!(random_perturbation(&a, 1), random_perturbation(&b, 1));
    }
}
