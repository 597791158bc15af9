//! Complex d-space realified to R^{2d}, ordered (Re coordinates, Im coordinates).

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, RMat, RVec, C64, RANK_TOL};

/// Default residual tolerance for linearity tags.
pub const LIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure {
    dim_c: usize,
    matrix: RMat,
}

impl ComplexStructure {
    pub fn new(dim_c: usize) -> Self {
        let n = 2 * dim_c;
        let mut m = RMat::zeros(n, n);
        for k in 0..dim_c {
            m[(k, dim_c + k)] = -1.0;
            m[(dim_c + k, k)] = 1.0;
        }
        ComplexStructure { dim_c, matrix: m }
    }

    pub fn dim_c(&self) -> usize {
        self.dim_c
    }

    pub fn dim_r(&self) -> usize {
        2 * self.dim_c
    }

    pub fn matrix(&self) -> &RMat {
        &self.matrix
    }

    /// Multiplication by i without forming the matrix.
    pub fn apply(&self, v: &RMat) -> RMat {
        let d = self.dim_c;
        let mut out = RMat::zeros(v.nrows(), v.ncols());
        out.rows_mut(0, d).copy_from(&(-v.rows(d, d)));
        out.rows_mut(d, d).copy_from(&v.rows(0, d));
        out
    }
}

/// Hermitian form, linear in the second argument.
pub fn inner(v: &RVec, w: &RVec) -> C64 {
    let d = v.len() / 2;
    let (a, b) = (v.rows(0, d), v.rows(d, d));
    let (x, y) = (w.rows(0, d), w.rows(d, d));
    c(a.dot(&x) + b.dot(&y), a.dot(&y) - b.dot(&x))
}

/// omega(v, w) = Im <v, w>.
pub fn omega(v: &RVec, w: &RVec) -> f64 {
    inner(v, w).im
}

pub fn realify_vec(v: &CVec) -> RVec {
    let d = v.len();
    RVec::from_fn(2 * d, |i, _| if i < d { v[i].re } else { v[i - d].im })
}

pub fn complexify_vec(v: &RVec) -> CVec {
    let d = v.len() / 2;
    CVec::from_fn(d, |i, _| c(v[i], v[d + i]))
}

/// Columns of a complex matrix as realified column vectors.
pub fn realify_cols(m: &CMat) -> RMat {
    let (d, k) = m.shape();
    RMat::from_fn(2 * d, k, |i, j| if i < d { m[(i, j)].re } else { m[(i - d, j)].im })
}

pub fn complexify_cols(m: &RMat) -> CMat {
    let d = m.nrows() / 2;
    CMat::from_fn(d, m.ncols(), |i, j| c(m[(i, j)], m[(d + i, j)]))
}

/// Realified matrix [[Re, -Im], [Im, Re]] of a complex-linear map.
pub fn realify(m: &CMat) -> RMat {
    let (r, k) = m.shape();
    let mut out = RMat::zeros(2 * r, 2 * k);
    for i in 0..r {
        for j in 0..k {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i, k + j)] = -z.im;
            out[(r + i, j)] = z.im;
            out[(r + i, k + j)] = z.re;
        }
    }
    out
}

/// Complex matrix of a complex-linear realified operator (reads the left block column).
pub fn complexify(m: &RMat) -> CMat {
    let r = m.nrows() / 2;
    let k = m.ncols() / 2;
    CMat::from_fn(r, k, |i, j| c(m[(i, j)], m[(r + i, j)]))
}

/// Componentwise conjugation diag(I, -I).
pub fn conjugation_matrix(d: usize) -> RMat {
    RMat::from_diagonal(&RVec::from_fn(2 * d, |i, _| if i < d { 1.0 } else { -1.0 }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Linearity {
    ComplexLinear,
    Antilinear,
    General,
}

impl Linearity {
    pub fn compose(self, other: Linearity) -> Linearity {
        use Linearity::*;
        match (self, other) {
            (ComplexLinear, ComplexLinear) | (Antilinear, Antilinear) => ComplexLinear,
            (ComplexLinear, Antilinear) | (Antilinear, ComplexLinear) => Antilinear,
            _ => General,
        }
    }
}

/// Real-linear operator on realified C^d with its linearity tag.
#[derive(Debug, Clone, PartialEq)]
pub struct RlOperator {
    matrix: RMat,
    linearity: Linearity,
}

fn commutator_residuals(m: &RMat) -> (f64, f64) {
    let d = m.nrows() / 2;
    let i = ComplexStructure::new(d);
    let ti = m * i.matrix();
    let it = i.apply(m);
    let scale = m.norm().max(1.0);
    ((&ti - &it).norm() / scale, (&ti + &it).norm() / scale)
}

impl RlOperator {
    /// Classifies the linearity of a 2d x 2d real matrix.
    pub fn new(matrix: RMat) -> Result<Self> {
        let (r, k) = matrix.shape();
        if r != k || r % 2 != 0 {
            return Err(Error::DimensionMismatch { expected: r + r % 2, got: k });
        }
        let (lin, anti) = commutator_residuals(&matrix);
        let linearity = if lin < LIN_TOL {
            Linearity::ComplexLinear
        } else if anti < LIN_TOL {
            Linearity::Antilinear
        } else {
            Linearity::General
        };
        Ok(RlOperator { matrix, linearity })
    }

    /// Tags without checking; callers guarantee the commutation law.
    pub(crate) fn tagged(matrix: RMat, linearity: Linearity) -> Self {
        RlOperator { matrix, linearity }
    }

    pub fn with_tag(matrix: RMat, linearity: Linearity) -> Result<Self> {
        let (lin, anti) = commutator_residuals(&matrix);
        match linearity {
            Linearity::ComplexLinear if lin >= LIN_TOL => Err(Error::NotComplexLinear(lin)),
            Linearity::Antilinear if anti >= LIN_TOL => Err(Error::NotAntilinear(anti)),
            _ => Ok(RlOperator { matrix, linearity }),
        }
    }

    pub fn complex_linear(m: &CMat) -> Self {
        RlOperator { matrix: realify(m), linearity: Linearity::ComplexLinear }
    }

    /// v -> m * conj(v).
    pub fn antilinear(m: &CMat) -> Self {
        let d = m.ncols();
        RlOperator {
            matrix: realify(m) * conjugation_matrix(d),
            linearity: Linearity::Antilinear,
        }
    }

    pub fn identity(d: usize) -> Self {
        RlOperator { matrix: RMat::identity(2 * d, 2 * d), linearity: Linearity::ComplexLinear }
    }

    pub fn conjugation(d: usize) -> Self {
        RlOperator { matrix: conjugation_matrix(d), linearity: Linearity::Antilinear }
    }

    pub fn imaginary_unit(d: usize) -> Self {
        RlOperator {
            matrix: ComplexStructure::new(d).matrix().clone(),
            linearity: Linearity::ComplexLinear,
        }
    }

    pub fn matrix(&self) -> &RMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> RMat {
        self.matrix
    }

    pub fn linearity(&self) -> Linearity {
        self.linearity
    }

    pub fn dim_c(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// Complex matrix M with T = M (linear) or T = M K (antilinear).
    pub fn complex_matrix(&self) -> Option<CMat> {
        match self.linearity {
            Linearity::ComplexLinear => Some(complexify(&self.matrix)),
            Linearity::Antilinear => {
                Some(complexify(&(&self.matrix * conjugation_matrix(self.dim_c()))))
            }
            Linearity::General => None,
        }
    }

    pub fn compose(&self, other: &RlOperator) -> RlOperator {
        RlOperator {
            matrix: &self.matrix * &other.matrix,
            linearity: self.linearity.compose(other.linearity),
        }
    }

    /// Real transpose; for (anti)linear operators this is the (anti)linear adjoint.
    pub fn transpose(&self) -> RlOperator {
        RlOperator { matrix: self.matrix.transpose(), linearity: self.linearity }
    }

    pub fn inverse(&self) -> Result<RlOperator> {
        let smin = linalg::min_singular(&self.matrix);
        if smin < 1e-12 * linalg::op_norm(&self.matrix).max(1.0) {
            return Err(Error::Singular(smin));
        }
        let inv = self.matrix.clone().try_inverse().ok_or(Error::Singular(smin))?;
        Ok(RlOperator { matrix: inv, linearity: self.linearity })
    }

    pub fn apply(&self, v: &RVec) -> RVec {
        &self.matrix * v
    }

    pub fn apply_c(&self, v: &CVec) -> CVec {
        complexify_vec(&(&self.matrix * realify_vec(v)))
    }

    pub fn scale(&self, s: f64) -> RlOperator {
        RlOperator { matrix: &self.matrix * s, linearity: self.linearity }
    }

    /// Relative residuals (||TI - IT||, ||TI + IT||).
    pub fn commutation_residuals(&self) -> (f64, f64) {
        commutator_residuals(&self.matrix)
    }

    pub fn isometry_residual(&self) -> f64 {
        let n = self.matrix.nrows();
        (self.matrix.transpose() * &self.matrix - RMat::identity(n, n)).norm()
    }

    pub fn distance(&self, other: &RlOperator) -> f64 {
        linalg::op_norm(&(&self.matrix - &other.matrix))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpFunction {
    Power(f64),
    Log,
    Exp,
}

/// Real functional calculus of a symmetric complex-linear operator.
pub fn operator_function(p: &RlOperator, f: OpFunction) -> Result<RlOperator> {
    let (lin, _) = p.commutation_residuals();
    if lin >= LIN_TOL {
        return Err(Error::NotComplexLinear(lin));
    }
    let m = p.matrix();
    if !matches!(f, OpFunction::Exp) {
        let lo = linalg::sym_eigenvalues(m)[0];
        if lo <= 0.0 {
            return Err(Error::NotPositive(lo));
        }
    }
    let out = match f {
        OpFunction::Power(s) => linalg::sym_fn(m, |x| x.powf(s)),
        OpFunction::Log => linalg::sym_fn(m, f64::ln),
        OpFunction::Exp => linalg::sym_fn(m, f64::exp),
    };
    Ok(RlOperator::tagged(out, Linearity::ComplexLinear))
}

/// P^{it} for positive complex-linear P, via the hermitian eigendecomposition over C.
pub fn imaginary_power(p: &RlOperator, t: f64) -> Result<RlOperator> {
    let (lin, _) = p.commutation_residuals();
    if lin >= LIN_TOL {
        return Err(Error::NotComplexLinear(lin));
    }
    let pc = complexify(p.matrix());
    let lo = linalg::herm_eigenvalues(&pc)[0];
    if lo <= 0.0 {
        return Err(Error::NotPositive(lo));
    }
    let u = linalg::herm_fn(&pc, |x| C64::from_polar(1.0, t * x.ln()));
    Ok(RlOperator::complex_linear(&u))
}

/// Complex eigenvalues of a positive complex-linear operator, ascending (each once).
pub fn positive_spectrum(p: &RlOperator) -> Vec<f64> {
    linalg::herm_eigenvalues(&complexify(p.matrix()))
}

/// Polar decomposition S = J Delta^{1/2} of an invertible antilinear operator.
pub fn antilinear_polar(s: &RlOperator) -> Result<(RlOperator, RlOperator)> {
    let (_, anti) = s.commutation_residuals();
    if anti >= LIN_TOL {
        return Err(Error::NotAntilinear(anti));
    }
    let m = s.matrix();
    let sv = linalg::singular_values(m);
    let (smin, smax) = (sv[sv.len() - 1], sv[0]);
    if smin <= 1e-12 * smax.max(1.0) {
        return Err(Error::Singular(smin));
    }
    let delta = m.transpose() * m;
    let delta = (&delta + delta.transpose()) * 0.5;
    let inv_sqrt = linalg::sym_fn(&delta, |x| x.powf(-0.5));
    let j = m * inv_sqrt;
    Ok((
        RlOperator::tagged(delta, Linearity::ComplexLinear),
        RlOperator::tagged(j, Linearity::Antilinear),
    ))
}

/// Real subspace of realified C^d with an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSubspace {
    basis: RMat,
    ambient: ComplexStructure,
}

impl RealSubspace {
    pub fn from_spanning(dim_c: usize, vectors: &RMat) -> Result<Self> {
        if vectors.nrows() != 2 * dim_c {
            return Err(Error::DimensionMismatch { expected: 2 * dim_c, got: vectors.nrows() });
        }
        Ok(RealSubspace { basis: linalg::orth(vectors, RANK_TOL), ambient: ComplexStructure::new(dim_c) })
    }

    /// Real span of complex column vectors.
    pub fn from_complex_spanning(vectors: &CMat) -> Self {
        let d = vectors.nrows();
        RealSubspace {
            basis: linalg::orth(&realify_cols(vectors), RANK_TOL),
            ambient: ComplexStructure::new(d),
        }
    }

    /// Trusts the caller that the columns are orthonormal.
    pub(crate) fn from_orthonormal(dim_c: usize, basis: RMat) -> Self {
        RealSubspace { basis, ambient: ComplexStructure::new(dim_c) }
    }

    pub fn zero(dim_c: usize) -> Self {
        RealSubspace { basis: RMat::zeros(2 * dim_c, 0), ambient: ComplexStructure::new(dim_c) }
    }

    /// The canonical real points R^d.
    pub fn real_points(dim_c: usize) -> Self {
        let n = 2 * dim_c;
        RealSubspace {
            basis: RMat::identity(n, n).columns(0, dim_c).into_owned(),
            ambient: ComplexStructure::new(dim_c),
        }
    }

    pub fn whole(dim_c: usize) -> Self {
        let n = 2 * dim_c;
        RealSubspace { basis: RMat::identity(n, n), ambient: ComplexStructure::new(dim_c) }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn dim_c(&self) -> usize {
        self.ambient.dim_c()
    }

    pub fn basis(&self) -> &RMat {
        &self.basis
    }

    pub fn ambient(&self) -> &ComplexStructure {
        &self.ambient
    }

    pub fn projector(&self) -> RMat {
        &self.basis * self.basis.transpose()
    }

    fn check(&self, other: &RealSubspace) -> Result<()> {
        if self.dim_c() != other.dim_c() {
            return Err(Error::DimensionMismatch { expected: self.dim_c(), got: other.dim_c() });
        }
        Ok(())
    }

    pub fn distance(&self, other: &RealSubspace) -> Result<f64> {
        self.check(other)?;
        Ok(linalg::span_distance(&self.basis, &other.basis))
    }

    pub fn sum(&self, other: &RealSubspace) -> Result<RealSubspace> {
        self.check(other)?;
        let mut m = RMat::zeros(self.basis.nrows(), self.dim() + other.dim());
        m.columns_mut(0, self.dim()).copy_from(&self.basis);
        m.columns_mut(self.dim(), other.dim()).copy_from(&other.basis);
        RealSubspace::from_spanning(self.dim_c(), &m)
    }

    pub fn intersection(&self, other: &RealSubspace) -> Result<RealSubspace> {
        self.check(other)?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(RealSubspace::zero(self.dim_c()));
        }
        let resid = &self.basis - &other.basis * (other.basis.transpose() * &self.basis);
        let ker = linalg::nullspace(&resid, RANK_TOL);
        Ok(RealSubspace::from_orthonormal(self.dim_c(), linalg::orth(&(&self.basis * ker), RANK_TOL)))
    }

    /// Orthogonal complement for g = Re <.,.>.
    pub fn orth_complement(&self) -> RealSubspace {
        let n = self.basis.nrows();
        if self.dim() == 0 {
            return RealSubspace::whole(self.dim_c());
        }
        let q = RMat::identity(n, n) - self.projector();
        RealSubspace::from_orthonormal(self.dim_c(), linalg::orth(&q, 0.5))
    }

    /// Image under a real-linear operator.
    pub fn image(&self, op: &RlOperator) -> Result<RealSubspace> {
        if op.dim_c() != self.dim_c() {
            return Err(Error::DimensionMismatch { expected: self.dim_c(), got: op.dim_c() });
        }
        RealSubspace::from_spanning(self.dim_c(), &(op.matrix() * &self.basis))
    }

    pub fn times_i(&self) -> RealSubspace {
        RealSubspace::from_orthonormal(self.dim_c(), self.ambient.apply(&self.basis))
    }

    /// ||(1 - P_self) B_other||: zero iff other is contained in self.
    pub fn containment_residual(&self, other: &RealSubspace) -> Result<f64> {
        self.check(other)?;
        if other.dim() == 0 {
            return Ok(0.0);
        }
        let r = &other.basis - &self.basis * (self.basis.transpose() * &other.basis);
        Ok(linalg::op_norm(&r))
    }

    pub fn contains_vector(&self, v: &RVec) -> f64 {
        let r = v - &self.basis * (self.basis.transpose() * v);
        r.norm()
    }
}
