//! Dense complex matrices and the Hermitian eigensolver.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type Matrix = DMatrix<C64>;
pub type Vector = DVector<C64>;

/// Tolerance for structural checks (Hermiticity, unitarity, traces).
pub const STRUCTURE_TOL: f64 = 1e-9;
/// Largest spectral violation that is silently clamped back into range.
pub const CLAMP_TOL: f64 = 1e-8;

#[inline]
pub fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Modulus of a complex number.
#[inline]
pub fn cabs(z: C64) -> f64 {
    crate::math::sqrt(z.norm_sqr())
}

#[inline]
pub fn ci(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity(n: usize) -> Matrix {
    Matrix::identity(n, n)
}

pub fn zeros(n: usize) -> Matrix {
    Matrix::zeros(n, n)
}

pub fn from_real_diagonal(d: &[f64]) -> Matrix {
    let mut m = zeros(d.len());
    for (i, &x) in d.iter().enumerate() {
        m[(i, i)] = c(x);
    }
    m
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(cabs(*z)))
}

pub fn hermiticity_defect(m: &Matrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.adjoint()))
}

pub fn unitarity_defect(m: &Matrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(m.adjoint() * m - identity(m.nrows())))
}

pub fn trace(m: &Matrix) -> C64 {
    m.trace()
}

/// `(A + A†) / 2`, removing round-off asymmetry before eigensolving.
pub fn hermitian_part(m: &Matrix) -> Matrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

pub fn outer(u: &Vector, v: &Vector) -> Matrix {
    u * v.adjoint()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending, with the
/// eigenvectors as the columns of the returned matrix in the same order.
pub fn eigh(m: &Matrix) -> (Vec<f64>, Matrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(m: &Matrix) -> Vec<f64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = SymmetricEigen::new(hermitian_part(m)).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Clamps eigenvalues into `[lo, hi]` when they stray by at most
/// [`CLAMP_TOL`]; returns the largest violation otherwise.
pub fn clamp_spectrum(values: &mut [f64], lo: f64, hi: f64) -> core::result::Result<(), f64> {
    let mut worst: f64 = 0.0;
    for v in values.iter_mut() {
        let over = (*v - hi).max(lo - *v).max(0.0);
        worst = worst.max(over);
        *v = v.clamp(lo, hi);
    }
    if worst > CLAMP_TOL {
        Err(worst)
    } else {
        Ok(())
    }
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &Matrix) -> f64 {
    eigvalsh(m).iter().map(|x| x.abs()).sum()
}

/// Haar-ish random unitary: QR of a complex Gaussian matrix with the phase
/// of `R`'s diagonal folded back into `Q`.
pub fn random_unitary(n: usize, rng: &mut crate::rng::StreamRng) -> Matrix {
    let g = Matrix::from_fn(n, n, |_, _| ci(rng.normal(), rng.normal()));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if cabs(d) > 0.0 { d / c(cabs(d)) } else { c(1.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random unit vector in `C^n`.
pub fn random_vector(n: usize, rng: &mut crate::rng::StreamRng) -> Vector {
    let v = Vector::from_fn(n, |_, _| ci(rng.normal(), rng.normal()));
    let norm = v.norm();
    v.unscale(norm)
}

/// Random Hermitian operator with eigenvalues drawn uniformly from `[0, 1]`.
pub fn random_unit_interval_operator(n: usize, rng: &mut crate::rng::StreamRng) -> Matrix {
    let u = random_unitary(n, rng);
    let d: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
    hermitian_part(&(&u * from_real_diagonal(&d) * u.adjoint()))
}

/// Random orthogonal projector of the given rank.
pub fn random_projector(n: usize, rank: usize, rng: &mut crate::rng::StreamRng) -> Matrix {
    let u = random_unitary(n, rng);
    let cols = u.columns(0, rank).into_owned();
    &cols * cols.adjoint()
}

/// Random density matrix: a random pure state of `n * n` dimensions traced
/// down to `n`.
pub fn random_density(n: usize, rng: &mut crate::rng::StreamRng) -> Matrix {
    let g = Matrix::from_fn(n, n, |_, _| ci(rng.normal(), rng.normal()));
    let rho = &g * g.adjoint();
    let t = rho.trace().re;
    rho.unscale(t)
}
