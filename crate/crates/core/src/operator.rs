//! Dense complex operator algebra.
//!
//! Operators are `D x D` complex matrices. Superoperators act on operators
//! through column-stacking vectorization, so that
//!
//! ```text
//! vec(A X B) = (B^T ⊗ A) vec(X)
//! ```
//!
//! holds everywhere in the crate. Corner pieces of an operator relative to a
//! DFS projector `P` (and its complement `Q = 1 - P`) are stored at full
//! dimension, zero-padded outside their block.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{EjofError, Result};

pub type C64 = Complex64;
pub type Operator = DMatrix<C64>;

/// Default tolerance for structural checks (relative, Frobenius).
pub const DEFAULT_TOL: f64 = 1e-10;

/// Denominator floor for relative residuals.
pub const RESIDUAL_FLOOR: f64 = 1e-14;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn dagger(a: &Operator) -> Operator {
    a.adjoint()
}

pub fn identity(dim: usize) -> Operator {
    Operator::identity(dim, dim)
}

pub fn zeros(dim: usize) -> Operator {
    Operator::zeros(dim, dim)
}

/// `|i⟩⟨j|` on a `dim`-dimensional space.
pub fn ket_bra(dim: usize, i: usize, j: usize) -> Operator {
    let mut m = zeros(dim);
    m[(i, j)] = real(1.0);
    m
}

pub fn ensure_square(a: &Operator) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(EjofError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

pub fn ensure_dim(a: &Operator, dim: usize) -> Result<()> {
    let n = ensure_square(a)?;
    if n != dim {
        return Err(EjofError::DimensionMismatch {
            expected: dim,
            found: n,
        });
    }
    Ok(())
}

/// `‖A − A†‖_F`.
pub fn hermitian_residual(a: &Operator) -> f64 {
    (a - a.adjoint()).norm()
}

/// Hermitian part `(A + A†)/2`.
pub fn hermitian_part(a: &Operator) -> Operator {
    (a + a.adjoint()) * real(0.5)
}

pub fn is_hermitian(a: &Operator, tol: f64) -> bool {
    hermitian_residual(a) <= tol * a.norm().max(1.0)
}

/// `‖a − b‖_F / max(‖reference‖_F, floor)`.
pub fn relative_difference(reference: &DMatrix<C64>, other: &DMatrix<C64>) -> f64 {
    (reference - other).norm() / reference.norm().max(RESIDUAL_FLOOR)
}

/// Residual of an identity `lhs = rhs`, absolute for small terms and
/// relative once the terms are larger than one.
pub fn identity_residual(lhs: &DMatrix<C64>, rhs: &DMatrix<C64>) -> f64 {
    let scale = lhs.norm().max(rhs.norm()).max(1.0);
    (lhs - rhs).norm() / scale
}

/// Generalized commutator `[A, X]⋆ = A X − X A†`.
pub fn star_commutator(a: &Operator, x: &Operator) -> Operator {
    a * x - x * a.adjoint()
}

pub fn commutator(a: &Operator, x: &Operator) -> Operator {
    a * x - x * a
}

pub fn anticommutator(a: &Operator, x: &Operator) -> Operator {
    a * x + x * a
}

/// Column-stacking vectorization.
pub fn vectorize(x: &Operator) -> DVector<C64> {
    DVector::from_column_slice(x.as_slice())
}

pub fn devectorize(v: &DVector<C64>) -> Result<Operator> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n * n != v.len() {
        return Err(EjofError::NotPerfectSquare(v.len()));
    }
    Ok(Operator::from_column_slice(n, n, v.as_slice()))
}

/// One of the four blocks of an operator relative to the DFS projector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    /// `P O P`, acting within the DFS.
    Ul,
    /// `P O Q`, lowering from the decaying space into the DFS.
    Ur,
    /// `Q O P`, raising out of the DFS.
    Ll,
    /// `Q O Q`, acting within the decaying space.
    Lr,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::Ul, Corner::Ur, Corner::Ll, Corner::Lr];
    pub const OFF_DIAGONAL: [Corner; 2] = [Corner::Ur, Corner::Ll];
    pub const DIAGONAL: [Corner; 2] = [Corner::Ul, Corner::Lr];

    pub fn label(self) -> &'static str {
        match self {
            Corner::Ul => "ul",
            Corner::Ur => "ur",
            Corner::Ll => "ll",
            Corner::Lr => "lr",
        }
    }
}

/// Orthogonal projector onto a decoherence-free subspace together with
/// orthonormal bases for the DFS and its complement.
#[derive(Debug, Clone, PartialEq)]
pub struct DfsProjector {
    projector: Operator,
    complement: Operator,
    dfs_basis: DMatrix<C64>,
    decaying_basis: DMatrix<C64>,
}

impl DfsProjector {
    /// Projector onto the span of the given computational basis states.
    pub fn from_indices(dim: usize, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(EjofError::InvalidInput(
                "DFS must contain at least one state".into(),
            ));
        }
        let mut seen = vec![false; dim];
        for &i in indices {
            if i >= dim {
                return Err(EjofError::InvalidInput(format!(
                    "DFS index {i} out of range for dimension {dim}"
                )));
            }
            if seen[i] {
                return Err(EjofError::InvalidInput(format!("duplicate DFS index {i}")));
            }
            seen[i] = true;
        }
        let rest: Vec<usize> = (0..dim).filter(|&i| !seen[i]).collect();
        let columns = |idx: &[usize]| {
            let mut m = DMatrix::zeros(dim, idx.len());
            for (col, &i) in idx.iter().enumerate() {
                m[(i, col)] = real(1.0);
            }
            m
        };
        Ok(Self::from_bases(columns(indices), columns(&rest)))
    }

    /// Accepts an explicit projector matrix, verifying `P = P†` and `P² = P`.
    pub fn from_matrix(p: &Operator, tol: f64) -> Result<Self> {
        let dim = ensure_square(p)?;
        let scale = p.norm().max(1.0);
        let herm = hermitian_residual(p);
        if herm > tol * scale {
            return Err(EjofError::NotHermitian {
                what: "DFS projector".into(),
                residual: herm,
            });
        }
        let idem = (p * p - p).norm();
        if idem > tol * scale {
            return Err(EjofError::NotProjector { residual: idem });
        }
        let eig = hermitian_part(p).symmetric_eigen();
        let (mut ones, mut zeros) = (Vec::new(), Vec::new());
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > 0.5 {
                ones.push(k);
            } else {
                zeros.push(k);
            }
        }
        if ones.is_empty() {
            return Err(EjofError::InvalidInput(
                "DFS projector has rank zero".into(),
            ));
        }
        let pick = |ks: &[usize]| {
            let mut m = DMatrix::zeros(dim, ks.len());
            for (col, &k) in ks.iter().enumerate() {
                m.set_column(col, &eig.eigenvectors.column(k));
            }
            m
        };
        Ok(Self::from_bases(pick(&ones), pick(&zeros)))
    }

    fn from_bases(dfs_basis: DMatrix<C64>, decaying_basis: DMatrix<C64>) -> Self {
        let projector = &dfs_basis * dfs_basis.adjoint();
        let complement = &decaying_basis * decaying_basis.adjoint();
        Self {
            projector,
            complement,
            dfs_basis,
            decaying_basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.projector.nrows()
    }

    pub fn dfs_dim(&self) -> usize {
        self.dfs_basis.ncols()
    }

    pub fn decaying_dim(&self) -> usize {
        self.decaying_basis.ncols()
    }

    /// `I_ul`.
    pub fn projector(&self) -> &Operator {
        &self.projector
    }

    /// `I_lr = 1 − I_ul`.
    pub fn complement(&self) -> &Operator {
        &self.complement
    }

    /// `D x d` isometry whose columns span the DFS.
    pub fn dfs_basis(&self) -> &DMatrix<C64> {
        &self.dfs_basis
    }

    /// `D x N` isometry whose columns span the decaying space.
    pub fn decaying_basis(&self) -> &DMatrix<C64> {
        &self.decaying_basis
    }

    /// Compresses an operator to `d x d` DFS coordinates, `W† X W`.
    pub fn to_dfs(&self, x: &Operator) -> Operator {
        self.dfs_basis.adjoint() * x * &self.dfs_basis
    }

    /// Embeds a `d x d` DFS-coordinate operator at full dimension.
    pub fn from_dfs(&self, y: &Operator) -> Operator {
        &self.dfs_basis * y * self.dfs_basis.adjoint()
    }

    /// Compresses to `N x N` decaying-space coordinates.
    pub fn to_decaying(&self, x: &Operator) -> Operator {
        self.decaying_basis.adjoint() * x * &self.decaying_basis
    }

    pub fn from_decaying(&self, y: &Operator) -> Operator {
        &self.decaying_basis * y * self.decaying_basis.adjoint()
    }

    fn sides(&self, corner: Corner) -> (&Operator, &Operator) {
        match corner {
            Corner::Ul => (&self.projector, &self.projector),
            Corner::Ur => (&self.projector, &self.complement),
            Corner::Ll => (&self.complement, &self.projector),
            Corner::Lr => (&self.complement, &self.complement),
        }
    }

    fn side_bases(&self, corner: Corner) -> (&DMatrix<C64>, &DMatrix<C64>) {
        match corner {
            Corner::Ul => (&self.dfs_basis, &self.dfs_basis),
            Corner::Ur => (&self.dfs_basis, &self.decaying_basis),
            Corner::Ll => (&self.decaying_basis, &self.dfs_basis),
            Corner::Lr => (&self.decaying_basis, &self.decaying_basis),
        }
    }

    pub fn corner(&self, o: &Operator, corner: Corner) -> Operator {
        let (left, right) = self.sides(corner);
        left * o * right
    }

    /// Sum of the requested corners of `o`.
    pub fn corners(&self, o: &Operator, corners: &[Corner]) -> Operator {
        corners
            .iter()
            .fold(zeros(self.dim()), |acc, &c| acc + self.corner(o, c))
    }

    pub fn four_corners(&self, o: &Operator) -> Result<CorneredOperator> {
        ensure_dim(o, self.dim())?;
        Ok(CorneredOperator {
            ul: self.corner(o, Corner::Ul),
            ur: self.corner(o, Corner::Ur),
            ll: self.corner(o, Corner::Ll),
            lr: self.corner(o, Corner::Lr),
        })
    }

    /// Isometry `D² x (rows·cols)` embedding the vectorized coordinates of
    /// the given corners into the full vectorized space. Its adjoint
    /// extracts those coordinates.
    pub fn corner_embedding(&self, corners: &[Corner]) -> DMatrix<C64> {
        let blocks: Vec<DMatrix<C64>> = corners
            .iter()
            .map(|&c| {
                let (a, b) = self.side_bases(c);
                b.conjugate().kronecker(a)
            })
            .collect();
        let cols = blocks.iter().map(|b| b.ncols()).sum();
        let dim2 = self.dim() * self.dim();
        let mut out = DMatrix::zeros(dim2, cols);
        let mut offset = 0;
        for b in &blocks {
            out.view_mut((0, offset), (dim2, b.ncols())).copy_from(b);
            offset += b.ncols();
        }
        out
    }
}

/// An operator split into its four corners.
#[derive(Debug, Clone, PartialEq)]
pub struct CorneredOperator {
    pub ul: Operator,
    pub ur: Operator,
    pub ll: Operator,
    pub lr: Operator,
}

impl CorneredOperator {
    pub fn get(&self, corner: Corner) -> &Operator {
        match corner {
            Corner::Ul => &self.ul,
            Corner::Ur => &self.ur,
            Corner::Ll => &self.ll,
            Corner::Lr => &self.lr,
        }
    }

    pub fn reconstruct(&self) -> Operator {
        &self.ul + &self.ur + &self.ll + &self.lr
    }

    /// `ur + ll`.
    pub fn off_diagonal(&self) -> Operator {
        &self.ur + &self.ll
    }

    /// `ul + lr`.
    pub fn diagonal(&self) -> Operator {
        &self.ul + &self.lr
    }
}

/// Linear map on `hdim x hdim` operators, stored as a `hdim² x hdim²` matrix
/// acting on column-stacked operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    hdim: usize,
    matrix: DMatrix<C64>,
}

impl Superoperator {
    pub fn from_matrix(hdim: usize, matrix: DMatrix<C64>) -> Result<Self> {
        let n = hdim * hdim;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(EjofError::DimensionMismatch {
                expected: n,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { hdim, matrix })
    }

    pub fn identity(hdim: usize) -> Self {
        Self {
            hdim,
            matrix: DMatrix::identity(hdim * hdim, hdim * hdim),
        }
    }

    pub fn zeros(hdim: usize) -> Self {
        Self {
            hdim,
            matrix: DMatrix::zeros(hdim * hdim, hdim * hdim),
        }
    }

    pub fn hdim(&self) -> usize {
        self.hdim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    /// `X ↦ A X B`.
    pub fn sandwich(a: &Operator, b: &Operator) -> Result<Self> {
        let n = ensure_square(a)?;
        ensure_dim(b, n)?;
        Ok(Self {
            hdim: n,
            matrix: b.transpose().kronecker(a),
        })
    }

    /// `X ↦ A X`.
    pub fn left(a: &Operator) -> Result<Self> {
        let n = ensure_square(a)?;
        Self::sandwich(a, &identity(n))
    }

    /// `X ↦ X B`.
    pub fn right(b: &Operator) -> Result<Self> {
        let n = ensure_square(b)?;
        Self::sandwich(&identity(n), b)
    }

    /// `X ↦ [A, X]⋆ = A X − X A†`.
    pub fn star_commutator(a: &Operator) -> Result<Self> {
        Ok(&Self::left(a)? - &Self::right(&a.adjoint())?)
    }

    /// `X ↦ −i[H, X]`.
    pub fn hamiltonian(h: &Operator) -> Result<Self> {
        Ok((&Self::left(h)? - &Self::right(h)?).scale(-I))
    }

    /// `D[F](X) = F X F† − ½{F†F, X}`.
    pub fn dissipator(f: &Operator) -> Result<Self> {
        let fd = f.adjoint();
        let fdf = &fd * f;
        let jump = Self::sandwich(f, &fd)?;
        let anti = &Self::left(&fdf)? + &Self::right(&fdf)?;
        Ok(&jump - &anti.scale(real(0.5)))
    }

    pub fn apply(&self, x: &Operator) -> Result<Operator> {
        ensure_dim(x, self.hdim)?;
        devectorize(&(&self.matrix * vectorize(x)))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.hdim != other.hdim {
            return Err(EjofError::DimensionMismatch {
                expected: self.hdim,
                found: other.hdim,
            });
        }
        Ok(Self {
            hdim: self.hdim,
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// Hilbert–Schmidt adjoint: `Σ A(·)B† ↦ Σ A†(·)B`.
    pub fn adjoint(&self) -> Self {
        Self {
            hdim: self.hdim,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            hdim: self.hdim,
            matrix: &self.matrix * s,
        }
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// DFS-block restriction (`ul → ul`) expressed in DFS coordinates.
    pub fn restrict_to_dfs(&self, dfs: &DfsProjector) -> Result<Self> {
        self.check_hdim(dfs.dim())?;
        let e = dfs.corner_embedding(&[Corner::Ul]);
        Ok(Self {
            hdim: dfs.dfs_dim(),
            matrix: e.adjoint() * &self.matrix * e,
        })
    }

    /// Inverse of [`Superoperator::restrict_to_dfs`] for maps supported on
    /// the DFS block.
    pub fn lift_from_dfs(&self, dfs: &DfsProjector) -> Result<Self> {
        self.check_hdim(dfs.dfs_dim())?;
        let e = dfs.corner_embedding(&[Corner::Ul]);
        Ok(Self {
            hdim: dfs.dim(),
            matrix: &e * &self.matrix * e.adjoint(),
        })
    }

    /// `‖S‡(1)‖_F`; zero exactly when `S` annihilates traces.
    pub fn trace_residual(&self) -> f64 {
        let id = vectorize(&identity(self.hdim));
        (self.matrix.adjoint() * id).norm()
    }

    /// `max_ij ‖S(E_ji) − S(E_ij)†‖_F`; zero when `S` preserves Hermiticity.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.hdim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = self.column_operator(i, j);
                let b = self.column_operator(j, i);
                worst = worst.max((b - a.adjoint()).norm());
            }
        }
        worst
    }

    /// `S(|i⟩⟨j|)`.
    pub fn column_operator(&self, i: usize, j: usize) -> Operator {
        let n = self.hdim;
        let col = self.matrix.column(j * n + i);
        Operator::from_column_slice(n, n, col.as_slice())
    }

    fn check_hdim(&self, hdim: usize) -> Result<()> {
        if self.hdim != hdim {
            return Err(EjofError::DimensionMismatch {
                expected: hdim,
                found: self.hdim,
            });
        }
        Ok(())
    }
}

impl Add for &Superoperator {
    type Output = Superoperator;

    fn add(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.hdim, rhs.hdim, "superoperator dimension mismatch");
        Superoperator {
            hdim: self.hdim,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Superoperator {
    type Output = Superoperator;

    fn sub(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.hdim, rhs.hdim, "superoperator dimension mismatch");
        Superoperator {
            hdim: self.hdim,
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &Superoperator {
    type Output = Superoperator;

    fn mul(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.hdim, rhs.hdim, "superoperator dimension mismatch");
        Superoperator {
            hdim: self.hdim,
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

impl Neg for &Superoperator {
    type Output = Superoperator;

    fn neg(self) -> Superoperator {
        self.scale(real(-1.0))
    }
}

impl std::iter::Sum for Superoperator {
    fn sum<It: Iterator<Item = Superoperator>>(mut iter: It) -> Self {
        let first = iter.next().expect("sum of an empty superoperator iterator");
        iter.fold(first, |acc, s| &acc + &s)
    }
}
