//! Dense helpers shared by every module: norms, rank-revealing bases, spectral functions.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<C64>;
pub type RVec = DVector<f64>;
pub type CVec = DVector<C64>;

/// Relative rank threshold for every rank decision.
pub const RANK_TOL: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Scalars accepted by the SVD wrappers.
pub trait SvdScalar:
    faer::traits::ComplexField + faer::traits::Conjugate<Canonical = Self> + nalgebra::ComplexField<RealField = f64> + Copy
{
}

impl SvdScalar for f64 {}
impl SvdScalar for C64 {}

/// A = U diag(s) V^*, singular values descending. Thin factors unless `full`.
#[derive(Debug, Clone)]
pub struct Svd<T: SvdScalar> {
    pub u: DMatrix<T>,
    pub s: Vec<f64>,
    pub v: DMatrix<T>,
}

// nalgebra's SVD returns wrong factors for some rank-deficient inputs, so all SVDs go through faer.
pub fn svd<T: SvdScalar>(m: &DMatrix<T>, full: bool) -> Svd<T> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Svd { u: DMatrix::zeros(r, 0), s: Vec::new(), v: DMatrix::zeros(c, if full { c } else { 0 }) };
    }
    let a = faer::Mat::<T>::from_fn(r, c, |i, j| m[(i, j)]);
    let f = if full { faer::linalg::solvers::Svd::new(a.as_ref()) } else { faer::linalg::solvers::Svd::new_thin(a.as_ref()) };
    let Ok(f) = f else {
        let k = r.min(c);
        return Svd { u: DMatrix::zeros(r, k), s: vec![f64::NAN; k], v: DMatrix::zeros(c, if full { c } else { k }) };
    };
    let (u, v, sd) = (f.U(), f.V(), f.S().column_vector());
    Svd {
        u: DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]),
        s: (0..r.min(c)).map(|i| nalgebra::ComplexField::real(sd[i])).collect(),
        v: DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]),
    }
}

pub fn singular_values<T: SvdScalar>(m: &DMatrix<T>) -> Vec<f64> {
    svd(m, false).s
}

pub fn op_norm(m: &RMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn op_norm_c(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn min_singular(m: &RMat) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

fn orth_generic<T: SvdScalar>(m: &DMatrix<T>, tol: f64) -> DMatrix<T> {
    let rows = m.nrows();
    let f = svd(m, false);
    let smax = f.s.first().copied().unwrap_or(0.0);
    if smax == 0.0 || !smax.is_finite() {
        return DMatrix::zeros(rows, 0);
    }
    let keep = f.s.iter().take_while(|&&x| x > tol * smax).count();
    f.u.columns(0, keep).into_owned()
}

/// Orthonormal basis of the column span; `tol` is relative to the largest singular value.
pub fn orth(m: &RMat, tol: f64) -> RMat {
    orth_generic(m, tol)
}

pub fn orth_c(m: &CMat, tol: f64) -> CMat {
    orth_generic(m, tol)
}

fn nullspace_generic<T: SvdScalar>(a: &DMatrix<T>, abs_tol: f64) -> DMatrix<T> {
    let n = a.ncols();
    if a.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    let f = svd(a, true);
    let rank = f.s.iter().take_while(|&&x| x > abs_tol).count();
    f.v.columns(rank, n - rank).into_owned()
}

/// Orthonormal basis of the kernel; singular values below `abs_tol` count as zero.
pub fn nullspace(a: &RMat, abs_tol: f64) -> RMat {
    nullspace_generic(a, abs_tol)
}

pub fn nullspace_c(a: &CMat, abs_tol: f64) -> CMat {
    nullspace_generic(a, abs_tol)
}

/// Unitary polar factor U V^* of a square matrix.
pub fn polar_unitary<T: SvdScalar>(m: &DMatrix<T>) -> DMatrix<T> {
    let f = svd(m, false);
    &f.u * f.v.adjoint()
}

/// Operator norm of P_a - P_b for orthonormal bases (sine of the largest principal angle).
pub fn span_distance(a: &RMat, b: &RMat) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    op_norm(&(a - b * (b.transpose() * a)))
}

pub fn span_distance_c(a: &CMat, b: &CMat) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    op_norm_c(&(a - b * (b.adjoint() * a)))
}

/// f applied to a real symmetric matrix through its eigendecomposition.
pub fn sym_fn(m: &RMat, f: impl Fn(f64) -> f64) -> RMat {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let q = &eig.eigenvectors;
    let d = RVec::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&x| f(x)));
    q * RMat::from_diagonal(&d) * q.transpose()
}

/// f applied to a hermitian matrix; f may be complex valued.
pub fn herm_fn(m: &CMat, f: impl Fn(f64) -> C64) -> CMat {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let q = &eig.eigenvectors;
    let d = CVec::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&x| f(x)));
    q * CMat::from_diagonal(&d) * q.adjoint()
}

pub fn herm_eigenvalues(m: &CMat) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

pub fn sym_eigenvalues(m: &RMat) -> Vec<f64> {
    let s = (m + m.transpose()) * 0.5;
    let mut v: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(m: &RMat) -> RMat {
    let n = m.nrows();
    let norm = m.norm();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let a = m / 2f64.powi(s);
    let mut term = RMat::identity(n, n);
    let mut sum = RMat::identity(n, n);
    for k in 1..=20 {
        term = &term * &a / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

pub fn cvec_from_real(re: &[f64], im: &[f64]) -> CVec {
    CVec::from_iterator(re.len(), re.iter().zip(im).map(|(&a, &b)| c(a, b)))
}

pub fn is_finite(m: &RMat) -> bool {
    m.iter().all(|x| x.is_finite())
}
