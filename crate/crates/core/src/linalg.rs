//! Dense linear algebra: ordered complex Schur forms, the Drazin inverse,
//! guarded linear solves and the matrix exponential.

use nalgebra::{DMatrix, Schur};

use crate::error::{EjofError, Result};
use crate::operator::{real, C64};
use crate::random::{random_unitary, rng};

/// An eigenvalue counts as zero when `|λ| < ZERO_EIGENVALUE_RTOL · ‖S‖₂`.
pub const ZERO_EIGENVALUE_RTOL: f64 = 1e-8;

/// The spectral separation is flagged when the smallest nonzero eigenvalue
/// lies within this factor of the zero threshold.
pub const GAP_WARNING_FACTOR: f64 = 100.0;

/// Pivot ratio below which a dense solve is reported singular.
pub const SINGULAR_PIVOT_RTOL: f64 = 1e-13;

/// QR iterations allowed per matrix dimension before a Schur attempt is
/// abandoned.
pub const SCHUR_ITERATIONS_PER_DIM: usize = 60;

/// Relative size below which a subdiagonal entry is deflated. Machine
/// epsilon itself stalls next to exactly zero eigenvalues.
pub const SCHUR_DEFLATION_EPS: f64 = 1e-15;

/// Randomly rotated retries after the direct Schur iteration stalls.
pub const SCHUR_RETRIES: u64 = 4;

pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Complex Schur form `M = Q T Q†` with `T` upper triangular.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub q: DMatrix<C64>,
    pub t: DMatrix<C64>,
}

impl SchurForm {
    /// The shifted QR iteration can stall on matrices with exactly
    /// degenerate, highly structured spectra. A stalled attempt is retried
    /// on `U† M U` for a fixed pseudo-random unitary `U`, and `U` is folded
    /// back into `Q`.
    pub fn new(m: &DMatrix<C64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(EjofError::NotSquare {
                rows: n,
                cols: m.ncols(),
            });
        }
        if n == 0 {
            return Ok(Self {
                q: DMatrix::zeros(0, 0),
                t: DMatrix::zeros(0, 0),
            });
        }
        let max_iter = SCHUR_ITERATIONS_PER_DIM * n;
        let found = Schur::try_new(m.clone(), SCHUR_DEFLATION_EPS, max_iter)
            .map(|s| s.unpack())
            .or_else(|| {
                (0..SCHUR_RETRIES).find_map(|attempt| {
                    let u = random_unitary(&mut rng(attempt), n);
                    let rotated = u.adjoint() * m * &u;
                    Schur::try_new(rotated, SCHUR_DEFLATION_EPS, max_iter).map(|s| {
                        let (q, t) = s.unpack();
                        (u * q, t)
                    })
                })
            });
        let (q, mut t) = found.ok_or_else(|| {
            EjofError::NoConvergence(format!(
                "Schur iteration on a {n}x{n} matrix did not converge"
            ))
        })?;
        // the QR sweep leaves round-off below the diagonal
        for j in 0..n {
            for i in j + 1..n {
                t[(i, j)] = C64::new(0.0, 0.0);
            }
        }
        Ok(Self { q, t })
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.t[(i, i)]).collect()
    }

    pub fn reconstruct(&self) -> DMatrix<C64> {
        &self.q * &self.t * self.q.adjoint()
    }

    /// Exchanges the diagonal entries `k` and `k+1` by a unitary rotation,
    /// keeping `T` upper triangular.
    fn swap_adjacent(&mut self, k: usize) {
        let n = self.dim();
        let t11 = self.t[(k, k)];
        let t22 = self.t[(k + 1, k + 1)];
        let (cs, sn) = givens(self.t[(k, k + 1)], t22 - t11);
        for j in k + 2..n {
            let (x, y) = rotate(self.t[(k, j)], self.t[(k + 1, j)], cs, sn);
            self.t[(k, j)] = x;
            self.t[(k + 1, j)] = y;
        }
        for i in 0..k {
            let (x, y) = rotate(self.t[(i, k)], self.t[(i, k + 1)], cs, sn.conj());
            self.t[(i, k)] = x;
            self.t[(i, k + 1)] = y;
        }
        self.t[(k, k)] = t22;
        self.t[(k + 1, k + 1)] = t11;
        for i in 0..n {
            let (x, y) = rotate(self.q[(i, k)], self.q[(i, k + 1)], cs, sn.conj());
            self.q[(i, k)] = x;
            self.q[(i, k + 1)] = y;
        }
    }

    /// Moves every eigenvalue satisfying `select` to the leading block,
    /// preserving relative order within both groups. Returns the size of
    /// the leading block.
    pub fn reorder<F: Fn(C64) -> bool>(&mut self, select: F) -> usize {
        let mut leading = 0;
        for i in 0..self.dim() {
            if select(self.t[(i, i)]) {
                for k in (leading..i).rev() {
                    self.swap_adjacent(k);
                }
                leading += 1;
            }
        }
        leading
    }
}

/// `(cs, sn)` with `[cs sn; −conj(sn) cs] [f; g] = [r; 0]`.
fn givens(f: C64, g: C64) -> (f64, C64) {
    let (fa, ga) = (f.norm(), g.norm());
    if ga == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if fa == 0.0 {
        return (0.0, g.conj() / ga);
    }
    let norm = fa.hypot(ga);
    (fa / norm, (f / fa) * g.conj() / norm)
}

#[inline]
fn rotate(x: C64, y: C64, cs: f64, sn: C64) -> (C64, C64) {
    (x * cs + sn * y, y * cs - sn.conj() * x)
}

pub fn eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    Ok(SchurForm::new(m)?.eigenvalues())
}

/// Drazin inverse of a matrix whose zero eigenvalue is semisimple, together
/// with the data of the spectral separation.
#[derive(Debug, Clone)]
pub struct Drazin {
    pub inverse: DMatrix<C64>,
    /// Spectral projector onto the zero-eigenvalue subspace.
    pub kernel_projector: DMatrix<C64>,
    pub kernel_dim: usize,
    pub threshold: f64,
    /// Frobenius norm of the Schur block attached to the zero cluster.
    pub nilpotent_norm: f64,
    pub smallest_nonzero: Option<f64>,
    pub warning: Option<String>,
}

/// Separates the (near-)zero spectrum with an ordered Schur form, decouples
/// it from the rest with a triangular Sylvester solve and inverts on the
/// complement.
pub fn drazin(m: &DMatrix<C64>) -> Result<Drazin> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(EjofError::NotSquare {
            rows: n,
            cols: m.ncols(),
        });
    }
    let norm = spectral_norm(m);
    let threshold = ZERO_EIGENVALUE_RTOL * norm;
    if norm == 0.0 {
        return Ok(Drazin {
            inverse: DMatrix::zeros(n, n),
            kernel_projector: DMatrix::identity(n, n),
            kernel_dim: n,
            threshold,
            nilpotent_norm: 0.0,
            smallest_nonzero: None,
            warning: None,
        });
    }

    let mut schur = SchurForm::new(m)?;
    let k = schur.reorder(|lam| lam.norm() < threshold);
    let t = &schur.t;
    let t11 = t.view((0, 0), (k, k)).into_owned();
    let t12 = t.view((0, k), (k, n - k)).into_owned();
    let t22 = t.view((k, k), (n - k, n - k)).into_owned();

    let nilpotent_norm = t11.norm();
    if nilpotent_norm > threshold {
        return Err(EjofError::NonSemisimpleZero {
            residual: nilpotent_norm,
            threshold,
        });
    }

    let smallest_nonzero = (0..n - k)
        .map(|i| t22[(i, i)].norm())
        .min_by(|a, b| a.total_cmp(b));
    let warning = smallest_nonzero.and_then(|s| {
        (k > 0 && s < GAP_WARNING_FACTOR * threshold).then(|| {
            format!(
                "poor spectral separation: smallest nonzero |λ| = {s:.3e} is within \
                 {GAP_WARNING_FACTOR}x of the zero threshold {threshold:.3e}"
            )
        })
    });

    let coupling = solve_sylvester_triangular(&t11, &t22, &(-&t12));
    let t22_inv = t22
        .solve_upper_triangular(&DMatrix::identity(n - k, n - k))
        .ok_or_else(|| EjofError::Singular {
            what: "nonzero spectral block".into(),
            detail: "triangular factor has a zero pivot".into(),
        })?;

    let mut td = DMatrix::zeros(n, n);
    td.view_mut((0, k), (k, n - k))
        .copy_from(&(&coupling * &t22_inv));
    td.view_mut((k, k), (n - k, n - k)).copy_from(&t22_inv);

    let mut p0 = DMatrix::zeros(n, n);
    p0.view_mut((0, 0), (k, k)).fill_with_identity();
    p0.view_mut((0, k), (k, n - k)).copy_from(&(-&coupling));

    let q = &schur.q;
    Ok(Drazin {
        inverse: q * td * q.adjoint(),
        kernel_projector: q * p0 * q.adjoint(),
        kernel_dim: k,
        threshold,
        nilpotent_norm,
        smallest_nonzero,
        warning,
    })
}

/// Solves `A X − X B = C` for upper-triangular `A` and `B` with disjoint
/// spectra by column-wise back substitution.
fn solve_sylvester_triangular(
    a: &DMatrix<C64>,
    b: &DMatrix<C64>,
    c: &DMatrix<C64>,
) -> DMatrix<C64> {
    let (k, m) = (a.nrows(), b.nrows());
    let mut x = DMatrix::<C64>::zeros(k, m);
    for j in 0..m {
        let mut rhs = c.column(j).into_owned();
        for i in 0..j {
            rhs += x.column(i) * b[(i, j)];
        }
        let mut shifted = a.clone();
        for i in 0..k {
            shifted[(i, i)] -= b[(j, j)];
        }
        let col = shifted
            .solve_upper_triangular(&rhs)
            .expect("disjoint spectra give a nonsingular shifted block");
        x.set_column(j, &col);
    }
    x
}

/// LU solve of `A X = B` that reports near-singular systems instead of
/// returning garbage.
pub fn solve(a: &DMatrix<C64>, b: &DMatrix<C64>, what: &str) -> Result<DMatrix<C64>> {
    if a.nrows() != a.ncols() || a.nrows() != b.nrows() {
        return Err(EjofError::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    if a.is_empty() {
        return Ok(b.clone());
    }
    let lu = a.clone().lu();
    let u = lu.u();
    let pivots: Vec<f64> = (0..u.nrows()).map(|i| u[(i, i)].norm()).collect();
    let max = pivots.iter().cloned().fold(0.0, f64::max);
    let min = pivots.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 || min < SINGULAR_PIVOT_RTOL * max {
        return Err(EjofError::Singular {
            what: what.into(),
            detail: format!(
                "pivot ratio {:.3e}",
                if max == 0.0 { 0.0 } else { min / max }
            ),
        });
    }
    lu.solve(b).ok_or_else(|| EjofError::Singular {
        what: what.into(),
        detail: "zero pivot".into(),
    })
}

pub fn inverse(a: &DMatrix<C64>, what: &str) -> Result<DMatrix<C64>> {
    solve(a, &DMatrix::identity(a.nrows(), a.nrows()), what)
}

/// `exp(t·M)` by Padé scaling and squaring.
pub fn expm(m: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    (m * real(t)).exp()
}
