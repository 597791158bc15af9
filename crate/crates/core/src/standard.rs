//! Standard subspaces of C^d and their modular objects.

use crate::error::{Error, Result};
use crate::json;
use crate::linalg::{self, c, CMat, RMat, RVec, C64};
use crate::realified::{
    antilinear_polar, complexify, complexify_cols, imaginary_power, operator_function, realify_cols, ComplexStructure, Linearity, OpFunction, RealSubspace, RlOperator,
};

/// Threshold on the smallest singular value of [B | iB].
pub const STANDARD_TOL: f64 = 1e-9;

/// Default flow scaling: U_{e^s} = Delta^{i kappa s} with kappa = -1/(2 pi).
pub const PAPER_SCALING: f64 = -1.0 / (2.0 * std::f64::consts::PI);

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct StandardDiagnostics {
    pub standard: bool,
    pub dim: usize,
    pub dim_c: usize,
    pub dim_v_cap_iv: usize,
    pub smallest_singular: f64,
    pub condition: f64,
}

fn basis_change(v: &RealSubspace) -> RMat {
    let b = v.basis();
    let ib = v.ambient().apply(b);
    let k = b.ncols();
    let mut m = RMat::zeros(b.nrows(), 2 * k);
    m.columns_mut(0, k).copy_from(b);
    m.columns_mut(k, k).copy_from(&ib);
    m
}

pub fn is_standard(v: &RealSubspace) -> StandardDiagnostics {
    let cap = v.intersection(&v.times_i()).map(|s| s.dim()).unwrap_or(0);
    let m = basis_change(v);
    let (smin, smax) = if m.ncols() == 0 {
        (0.0, 0.0)
    } else {
        let sv = linalg::singular_values(&m);
        (sv[sv.len() - 1], sv[0])
    };
    let standard = v.dim() == v.dim_c() && v.dim() > 0 && smin > STANDARD_TOL;
    StandardDiagnostics {
        standard,
        dim: v.dim(),
        dim_c: v.dim_c(),
        dim_v_cap_iv: cap,
        smallest_singular: smin,
        condition: if smin > 0.0 { smax / smin } else { f64::INFINITY },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardSubspace {
    space: RealSubspace,
}

impl StandardSubspace {
    pub fn new(space: RealSubspace) -> Result<Self> {
        let diag = is_standard(&space);
        if !diag.standard {
            return Err(Error::NotStandard(format!(
                "dim {} in C^{}, dim(V cap iV) = {}, smallest singular value {:.3e}",
                diag.dim, diag.dim_c, diag.dim_v_cap_iv, diag.smallest_singular
            )));
        }
        Ok(StandardSubspace { space })
    }

    /// V = g R^d for an invertible complex matrix g.
    pub fn from_complex_matrix(g: &CMat) -> Result<Self> {
        StandardSubspace::new(RealSubspace::from_complex_spanning(g))
    }

    pub fn real_points(d: usize) -> Self {
        StandardSubspace { space: RealSubspace::real_points(d) }
    }

    pub fn space(&self) -> &RealSubspace {
        &self.space
    }

    pub fn dim_c(&self) -> usize {
        self.space.dim_c()
    }

    pub fn basis(&self) -> &RMat {
        self.space.basis()
    }

    pub fn diagnostics(&self) -> StandardDiagnostics {
        is_standard(&self.space)
    }

    pub fn distance(&self, other: &StandardSubspace) -> Result<f64> {
        self.space.distance(&other.space)
    }

    /// The Tomita operator S(x + iy) = x - iy by exact basis change.
    pub fn tomita_operator(&self) -> Result<RlOperator> {
        let d = self.dim_c();
        let m = basis_change(&self.space);
        let minv = m.clone().try_inverse().ok_or(Error::Singular(0.0))?;
        let sign = RMat::from_diagonal(&RVec::from_fn(2 * d, |i, _| if i < d { 1.0 } else { -1.0 }));
        Ok(RlOperator::tagged(m * sign * minv, Linearity::Antilinear))
    }

    pub fn modular_objects(&self) -> Result<ModularTriple> {
        let s = self.tomita_operator()?;
        let (delta, j) = antilinear_polar(&s)?;
        Ok(ModularTriple { s, delta, j })
    }

    /// V' = i V^{perp g}.
    pub fn symplectic_complement(&self) -> Result<StandardSubspace> {
        StandardSubspace::new(self.space.orth_complement().times_i())
    }

    /// {dim, basis} with the realified 2d x d basis.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "dim": self.dim_c(), "basis": json::real_matrix(self.basis()) })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let dim = v["dim"].as_u64().ok_or_else(|| Error::Json("dim must be an integer".into()))? as usize;
        let basis = json::parse_real_matrix(&v["basis"])?;
        if basis.shape() != (2 * dim, dim) {
            return Err(Error::DimensionMismatch { expected: 2 * dim, got: basis.nrows() });
        }
        // an orthonormal basis is kept verbatim so that round trips are exact
        let gram = basis.transpose() * &basis - RMat::identity(dim, dim);
        let space = if gram.norm() < 1e-12 {
            RealSubspace::from_orthonormal(dim, basis)
        } else {
            RealSubspace::from_spanning(dim, &basis)?
        };
        StandardSubspace::new(space)
    }

    /// Direct sum in C^{d1 + d2}.
    pub fn direct_sum(&self, other: &StandardSubspace) -> Result<StandardSubspace> {
        let (d1, d2) = (self.dim_c(), other.dim_c());
        let d = d1 + d2;
        let a = complexify_cols(self.basis());
        let b = complexify_cols(other.basis());
        let mut m = CMat::zeros(d, d);
        m.view_mut((0, 0), (d1, d1)).copy_from(&a);
        m.view_mut((d1, d1), (d2, d2)).copy_from(&b);
        StandardSubspace::from_complex_matrix(&m)
    }
}

/// Modular objects (S, Delta, J) of a standard subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularTriple {
    pub s: RlOperator,
    pub delta: RlOperator,
    pub j: RlOperator,
}

impl ModularTriple {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "S": json::real_matrix(self.s.matrix()),
            "Delta": json::real_matrix(self.delta.matrix()),
            "J": json::real_matrix(self.j.matrix()),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let op = |k: &str| RlOperator::new(json::parse_real_matrix(&v[k])?);
        Ok(ModularTriple { s: op("S")?, delta: op("Delta")?, j: op("J")? })
    }

    /// ||J Delta J Delta - 1||.
    pub fn modular_residual(&self) -> f64 {
        modular_relation_residual(&self.delta, &self.j)
    }

    pub fn spectrum(&self) -> Vec<f64> {
        crate::realified::positive_spectrum(&self.delta)
    }

    /// Delta^{it}.
    pub fn modular_group(&self, t: f64) -> Result<RlOperator> {
        imaginary_power(&self.delta, t)
    }

    /// U_t for t in R^x: U_{e^s} = Delta^{i kappa s}, U_{-1} = J.
    pub fn evaluate(&self, t: f64, kappa: f64) -> Result<RlOperator> {
        if t == 0.0 {
            return Err(Error::InvalidParameters("t must be nonzero".into()));
        }
        let u = imaginary_power(&self.delta, kappa * t.abs().ln())?;
        Ok(if t < 0.0 { self.j.compose(&u) } else { u })
    }

    pub fn fix_s(&self) -> RealSubspace {
        let n = self.s.matrix().nrows();
        let q = self.s.matrix() + RMat::identity(n, n);
        RealSubspace::from_orthonormal(n / 2, linalg::orth(&q, 1e-6))
    }
}

pub fn modular_relation_residual(delta: &RlOperator, j: &RlOperator) -> f64 {
    let n = delta.matrix().nrows();
    let m = j.matrix() * delta.matrix() * j.matrix() * delta.matrix();
    linalg::op_norm(&(m - RMat::identity(n, n)))
}

/// Largest mismatch |log l_i + log l_{n-1-i}| of a sorted positive spectrum.
pub fn spectral_symmetry_residual(spec: &[f64]) -> f64 {
    let mut logs: Vec<f64> = spec.iter().map(|x| x.ln()).collect();
    logs.sort_by(|a, b| a.total_cmp(b));
    let n = logs.len();
    (0..n).map(|i| (logs[i] + logs[n - 1 - i]).abs()).fold(0.0, f64::max)
}

/// V = Delta^{-1/4} Fix(J).
pub fn from_modular(delta: &RlOperator, j: &RlOperator) -> Result<StandardSubspace> {
    let r = modular_relation_residual(delta, j);
    if r > 1e-8 {
        return Err(Error::ModularRelationViolated(r));
    }
    let d = delta.dim_c();
    let fix = RealStructure::from_conjugation(j)?;
    let q = operator_function(delta, OpFunction::Power(-0.25))?;
    let v = q.matrix() * &fix.fix_basis;
    StandardSubspace::new(RealSubspace::from_spanning(d, &v)?)
}

/// A conjugation J with an orthonormal real basis of Fix(J).
#[derive(Debug, Clone, PartialEq)]
pub struct RealStructure {
    pub j: RlOperator,
    pub fix_basis: RMat,
}

impl RealStructure {
    pub fn canonical(d: usize) -> Self {
        RealStructure {
            j: RlOperator::conjugation(d),
            fix_basis: RealSubspace::real_points(d).basis().clone(),
        }
    }

    pub fn from_conjugation(j: &RlOperator) -> Result<Self> {
        let (_, anti) = j.commutation_residuals();
        if anti >= 1e-9 {
            return Err(Error::NotAntilinear(anti));
        }
        let n = j.matrix().nrows();
        let inv = (j.matrix() * j.matrix() - RMat::identity(n, n)).norm();
        if inv > 1e-8 {
            return Err(Error::ConjugationMismatch(inv));
        }
        let q = j.matrix() + RMat::identity(n, n);
        let basis = linalg::orth(&q, 1e-6);
        if basis.ncols() != n / 2 {
            return Err(Error::ConjugationMismatch(basis.ncols() as f64));
        }
        Ok(RealStructure { j: j.clone(), fix_basis: basis })
    }

    /// Unitary whose columns are the fixed basis vectors.
    pub fn unitary(&self) -> CMat {
        complexify_cols(&self.fix_basis)
    }
}

/// V = (1 + iC) Fix(J) for real skew C on Fix(J) with ||C|| < 1.
pub fn from_c(rs: &RealStructure, cmat: &RMat) -> Result<StandardSubspace> {
    let d = rs.fix_basis.ncols();
    if cmat.shape() != (d, d) {
        return Err(Error::DimensionMismatch { expected: d, got: cmat.nrows() });
    }
    let norm = linalg::op_norm(cmat);
    if norm >= 1.0 {
        return Err(Error::NormBoundViolated(norm));
    }
    let u = rs.unitary();
    let g = CMat::from_fn(d, d, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        c(delta, cmat[(i, j)])
    });
    StandardSubspace::from_complex_matrix(&(u * g))
}

/// C = i (Delta^{1/2} - 1)(Delta^{1/2} + 1)^{-1} restricted to Fix(J).
pub fn to_c(rs: &RealStructure, v: &StandardSubspace) -> Result<RMat> {
    let m = v.modular_objects()?;
    let mismatch = m.j.distance(&rs.j);
    if mismatch > 1e-8 {
        return Err(Error::ConjugationMismatch(mismatch));
    }
    let half = complexify(operator_function(&m.delta, OpFunction::Power(0.5))?.matrix());
    let d = half.nrows();
    let id = CMat::identity(d, d);
    let den = (&half + &id).try_inverse().ok_or(Error::Singular(0.0))?;
    let cc = (&half - &id) * den * c(0.0, 1.0);
    let u = rs.unitary();
    let local = u.adjoint() * cc * u;
    Ok(local.map(|z| z.re))
}

/// Delta^{1/2} predicted by the C-parametrization, (1 - iC)/(1 + iC) transported by the basis unitary.
pub fn half_delta_from_c(rs: &RealStructure, cmat: &RMat) -> Result<RlOperator> {
    let d = cmat.nrows();
    let ic = cmat.map(|x| c(0.0, x));
    let id = CMat::identity(d, d);
    let inv = (&id + &ic).try_inverse().ok_or(Error::Singular(0.0))?;
    let u = rs.unitary();
    Ok(RlOperator::complex_linear(&(&u * ((&id - &ic) * inv) * u.adjoint())))
}

#[derive(Debug, Clone)]
pub struct FlowEmbedding {
    /// iota(v) = R v with G = R^* R.
    pub iota: CMat,
    pub c: RMat,
    pub v: StandardSubspace,
}

/// C = I (1 - e^{-|D|})/(1 + e^{-|D|}) written as D h(-D^2), h(s) = tanh(sqrt s / 2)/sqrt s.
pub fn c_from_generator(dgen: &RMat) -> RMat {
    let neg_sq = -(dgen * dgen);
    let h = linalg::sym_fn(&neg_sq, |s| {
        let s = s.max(0.0);
        if s < 1e-16 {
            0.5
        } else {
            (s.sqrt() / 2.0).tanh() / s.sqrt()
        }
    });
    dgen * h
}

/// D = I log((1 + |C|)/(1 - |C|)) written as C k(-C^2), k(s) = log((1+sqrt s)/(1-sqrt s))/sqrt s.
pub fn generator_from_c(cmat: &RMat) -> RMat {
    let neg_sq = -(cmat * cmat);
    let k = linalg::sym_fn(&neg_sq, |s| {
        let s = s.max(0.0);
        if s < 1e-16 {
            2.0
        } else {
            let r = s.sqrt();
            ((1.0 + r) / (1.0 - r)).ln() / r
        }
    });
    cmat * k
}

pub fn flow_embedding(dgen: &RMat) -> Result<FlowEmbedding> {
    let m = dgen.nrows();
    if dgen.ncols() != m {
        return Err(Error::DimensionMismatch { expected: m, got: dgen.ncols() });
    }
    let skew = (dgen + dgen.transpose()).norm();
    if skew > 1e-10 * dgen.norm().max(1.0) {
        return Err(Error::InvalidParameters("D must be skew-symmetric".into()));
    }
    let cmat = c_from_generator(dgen);
    let gram = CMat::from_fn(m, m, |i, j| c(if i == j { 1.0 } else { 0.0 }, cmat[(i, j)]));
    let chol = gram.cholesky().ok_or(Error::NotPositive(0.0))?;
    let iota = chol.l().adjoint();
    let v = StandardSubspace::from_complex_matrix(&iota)?;
    Ok(FlowEmbedding { iota, c: cmat, v })
}

impl FlowEmbedding {
    /// Realified iota as a 2m x m real matrix.
    pub fn iota_real(&self) -> RMat {
        realify_cols(&self.iota)
    }

    /// Generator read off the modular flow: D = iota^{-1} (i log Delta) iota.
    pub fn generator_from_flow(&self) -> Result<RMat> {
        let mt = self.v.modular_objects()?;
        let log = operator_function(&mt.delta, OpFunction::Log)?;
        let d = self.iota.nrows();
        let ilog = ComplexStructure::new(d).apply(log.matrix());
        let ir = self.iota_real();
        let pinv = (ir.transpose() * &ir).try_inverse().ok_or(Error::Singular(0.0))? * ir.transpose();
        Ok(pinv * ilog * ir)
    }

    /// Symplectic form C_{jk} = Im <iota e_j, iota e_k>.
    pub fn form(&self) -> RMat {
        (self.iota.adjoint() * &self.iota).map(|z: C64| z.im)
    }
}

#[derive(Debug, Clone)]
pub struct FactorialSplit {
    pub fixed: RealSubspace,
    pub rest: RealSubspace,
    /// Orthonormal complex basis of the summand carrying `rest`.
    pub summand: CMat,
    pub rest_standard: Option<StandardSubspace>,
    pub reassembly_residual: f64,
}

/// V = (V cap V') + V_1 with V_1 standard in the orthogonal complement of the fixed part.
pub fn factorial_split(v: &StandardSubspace) -> Result<FactorialSplit> {
    let d = v.dim_c();
    let vp = v.symplectic_complement()?;
    let fixed = v.space().intersection(vp.space())?;
    let fixed_c = complexify_cols(fixed.basis());
    let span_fixed = linalg::orth_c(&fixed_c, linalg::RANK_TOL);
    let id = CMat::identity(d, d);
    let comp = &id - &span_fixed * span_fixed.adjoint();
    let summand = if span_fixed.ncols() == d { CMat::zeros(d, 0) } else { linalg::orth_c(&comp, 0.5) };
    let summand_r = RealSubspace::from_complex_spanning(&{
        let mut m = CMat::zeros(d, 2 * summand.ncols());
        let k = summand.ncols();
        m.columns_mut(0, k).copy_from(&summand);
        m.columns_mut(k, k).copy_from(&(&summand * c(0.0, 1.0)));
        m
    });
    let rest = v.space().intersection(&summand_r)?;
    let rest_standard = if summand.ncols() == 0 {
        None
    } else {
        let coords = summand.adjoint() * complexify_cols(rest.basis());
        Some(StandardSubspace::new(RealSubspace::from_complex_spanning(&coords))?)
    };
    let reassembly_residual = fixed.sum(&rest)?.distance(v.space())?;
    Ok(FactorialSplit { fixed, rest, summand, rest_standard, reassembly_residual })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SplitReport {
    pub direct_sum: bool,
    pub orthogonal: bool,
    pub invariant: bool,
    pub direct_sum_residual: f64,
    pub orthogonal_residual: f64,
    pub invariance_residual: f64,
    pub agree: bool,
}

pub const SPLIT_TOL: f64 = 1e-8;

pub fn split_check(v: &StandardSubspace, v1: &RealSubspace, ts: &[f64]) -> Result<SplitReport> {
    let contain = v.space().containment_residual(v1)?;
    if contain > 1e-8 {
        return Err(Error::NotContained(contain));
    }
    let v2 = v.space().intersection(&v1.orth_complement())?;
    let b1 = v1.basis();
    let ib1 = v1.ambient().apply(b1);
    let b2 = v2.basis();
    let ds = linalg::op_norm(&(b1.transpose() * b2)).max(linalg::op_norm(&(ib1.transpose() * b2)));
    let orth = linalg::op_norm(&(ib1.transpose() * b2));
    let mt = v.modular_objects()?;
    let mut inv: f64 = 0.0;
    for &t in ts {
        let u = mt.modular_group(t)?;
        inv = inv.max(v1.image(&u)?.distance(v1)?);
    }
    let (a, b, cc) = (ds < SPLIT_TOL, orth < SPLIT_TOL, inv < SPLIT_TOL);
    Ok(SplitReport {
        direct_sum: a,
        orthogonal: b,
        invariant: cc,
        direct_sum_residual: ds,
        orthogonal_residual: orth,
        invariance_residual: inv,
        agree: a == b && b == cc,
    })
}

/// The d = 2 example V = (1 + iC) R^2 with C = [[0, c],[-c, 0]].
pub fn c_example(cval: f64) -> Result<StandardSubspace> {
    let cm = RMat::from_row_slice(2, 2, &[0.0, cval, -cval, 0.0]);
    from_c(&RealStructure::canonical(2), &cm)
}

/// Realified conjugation of a complex unitary: J = U K U^*.
pub fn conjugation_from_unitary(u: &CMat) -> RlOperator {
    let ut = u.transpose();
    RlOperator::antilinear(&(u * ut))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn half_example_spectrum() {
        let v = c_example(0.5).unwrap();
        let mt = v.modular_objects().unwrap();
        assert!(close(&mt.spectrum(), &[1.0 / 9.0, 9.0], 1e-10));
        assert!(mt.modular_residual() < 1e-10);
        let half = operator_function(&mt.delta, OpFunction::Power(0.5)).unwrap();
        let spec = crate::realified::positive_spectrum(&half);
        assert!(close(&spec, &[1.0 / 3.0, 3.0], 1e-10));
    }

    #[test]
    fn complement_inverts_spectrum() {
        let v = c_example(0.5).unwrap();
        let vp = v.symplectic_complement().unwrap();
        let (m, mp) = (v.modular_objects().unwrap(), vp.modular_objects().unwrap());
        assert!(m.j.distance(&mp.j) < 1e-10);
        let prod = m.delta.compose(&mp.delta);
        assert!(prod.distance(&RlOperator::identity(2)) < 1e-10);
        assert!(vp.symplectic_complement().unwrap().distance(&v).unwrap() < 1e-10);
    }

    #[test]
    fn round_trip_modular() {
        let v = c_example(0.5).unwrap();
        let m = v.modular_objects().unwrap();
        let back = from_modular(&m.delta, &m.j).unwrap();
        assert!(back.distance(&v).unwrap() < 1e-10);
    }

    #[test]
    fn c_round_trip() {
        let rs = RealStructure::canonical(2);
        let cm = RMat::from_row_slice(2, 2, &[0.0, 0.5, -0.5, 0.0]);
        let v = from_c(&rs, &cm).unwrap();
        let back = to_c(&rs, &v).unwrap();
        assert!((back - &cm).norm() < 1e-10);
        let predicted = half_delta_from_c(&rs, &cm).unwrap();
        let half = operator_function(&v.modular_objects().unwrap().delta, OpFunction::Power(0.5)).unwrap();
        assert!(predicted.distance(&half) < 1e-10);
    }

    #[test]
    fn norm_bound_rejected() {
        let rs = RealStructure::canonical(2);
        let cm = RMat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(matches!(from_c(&rs, &cm), Err(Error::NormBoundViolated(_))));
    }

    #[test]
    fn flow_log3_gives_three() {
        let w = 3f64.ln();
        let d = RMat::from_row_slice(2, 2, &[0.0, w, -w, 0.0]);
        let fe = flow_embedding(&d).unwrap();
        let spec = fe.v.modular_objects().unwrap().spectrum();
        assert!(close(&spec, &[1.0 / 3.0, 3.0], 1e-10));
        assert!((fe.generator_from_flow().unwrap() - &d).norm() < 1e-9);
        assert!((generator_from_c(&fe.form()) - &d).norm() < 1e-9);
    }

    #[test]
    fn flow_intertwines() {
        let d = RMat::from_row_slice(3, 3, &[0.0, 0.7, -0.2, -0.7, 0.0, 1.3, 0.2, -1.3, 0.0]);
        let fe = flow_embedding(&d).unwrap();
        let mt = fe.v.modular_objects().unwrap();
        let ir = fe.iota_real();
        for t in [0.3, -0.3, 1.0, -1.0] {
            let lhs = mt.modular_group(t).unwrap().matrix() * &ir;
            let rhs = &ir * linalg::expm(&(&d * t));
            assert!((lhs - rhs).norm() < 1e-8);
        }
    }

    #[test]
    fn zero_generator_trivial() {
        let fe = flow_embedding(&RMat::zeros(3, 3)).unwrap();
        let mt = fe.v.modular_objects().unwrap();
        assert!(mt.delta.distance(&RlOperator::identity(3)) < 1e-12);
    }

    #[test]
    fn factorial_split_cases() {
        let r = StandardSubspace::real_points(3);
        let s = factorial_split(&r).unwrap();
        assert_eq!((s.fixed.dim(), s.rest.dim()), (3, 0));
        let v = c_example(0.5).unwrap();
        let s = factorial_split(&v).unwrap();
        assert_eq!(s.fixed.dim(), 0);
        let sum = StandardSubspace::real_points(1).direct_sum(&v).unwrap();
        let s = factorial_split(&sum).unwrap();
        assert_eq!((s.fixed.dim(), s.rest.dim()), (1, 2));
        assert!(s.reassembly_residual < 1e-10);
        let rest = s.rest_standard.unwrap();
        assert_eq!(factorial_split(&rest).unwrap().fixed.dim(), 0);
    }

    #[test]
    fn split_check_cases() {
        let ts = [0.3, -0.7, 1.1];
        let v = StandardSubspace::real_points(2);
        let line = RealSubspace::from_spanning(2, &RMat::from_column_slice(4, 1, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        let rep = split_check(&v, &line, &ts).unwrap();
        assert!(rep.direct_sum && rep.orthogonal && rep.invariant && rep.agree);
        let rep = split_check(&v, v.space(), &ts).unwrap();
        assert!(rep.direct_sum && rep.orthogonal && rep.invariant);
        let v = c_example(0.5).unwrap();
        let g = v.basis() * RVec::from_column_slice(&[0.8, 0.6]);
        let line = RealSubspace::from_spanning(2, &RMat::from_column_slice(4, 1, g.as_slice())).unwrap();
        let rep = split_check(&v, &line, &ts).unwrap();
        assert!(!rep.direct_sum && !rep.orthogonal && !rep.invariant && rep.agree);
    }

    #[test]
    fn non_standard_detected() {
        let m = RMat::from_column_slice(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let v = RealSubspace::from_spanning(2, &m).unwrap();
        let d = is_standard(&v);
        assert!(!d.standard);
        assert_eq!(d.dim_v_cap_iv, 2);
    }

    #[test]
    fn evaluator_is_homomorphism() {
        let mt = c_example(0.3).unwrap().modular_objects().unwrap();
        for (s, t) in [(2.0, -0.5), (-1.5, -3.0), (0.2, 7.0)] {
            let lhs = mt.evaluate(s, PAPER_SCALING).unwrap().compose(&mt.evaluate(t, PAPER_SCALING).unwrap());
            let rhs = mt.evaluate(s * t, PAPER_SCALING).unwrap();
            assert!(lhs.distance(&rhs) < 1e-10);
        }
    }
}
