//! Fermionic Fock space over C^d (subset basis) and the coherent-vector calculus on the bosonic side.

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, C64};
use crate::random::{self, TrialRng};
use crate::realified::{complexify, complexify_cols, Linearity, OpFunction, RealSubspace, RlOperator};
use crate::standard::StandardSubspace;
use crate::vn::{tomita_modular, vector_status, StarAlgebra, DEFAULT_CAP};

pub const MAX_FERMI_DIM: usize = 5;

/// Annihilators/creators, parity Z and Klein twist on C^{2^d}; basis index = subset bitmask.
#[derive(Debug, Clone)]
pub struct FermiContext {
    d: usize,
    annihilators: Vec<CMat>,
    creators: Vec<CMat>,
    parity: CMat,
    klein: CMat,
}

impl FermiContext {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 || d > MAX_FERMI_DIM {
            return Err(Error::DimensionOverflow(MAX_FERMI_DIM));
        }
        let n = 1usize << d;
        let creators: Vec<CMat> = (0..d)
            .map(|k| {
                let mut m = CMat::zeros(n, n);
                for s in 0..n {
                    if s & (1 << k) == 0 {
                        let sign = if (s & ((1 << k) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                        m[(s | (1 << k), s)] = c(sign, 0.0);
                    }
                }
                m
            })
            .collect();
        let annihilators = creators.iter().map(|m| m.adjoint()).collect();
        let parity = CMat::from_diagonal(&CVec::from_fn(n, |s, _| {
            c(if s.count_ones() % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        }));
        let klein = CMat::from_diagonal(&CVec::from_fn(n, |s, _| {
            if s.count_ones() % 2 == 0 { c(1.0, 0.0) } else { c(0.0, -1.0) }
        }));
        Ok(FermiContext { d, annihilators, creators, parity, klein })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn fock_dim(&self) -> usize {
        1 << self.d
    }

    pub fn vacuum(&self) -> CVec {
        let mut v = CVec::zeros(self.fock_dim());
        v[0] = c(1.0, 0.0);
        v
    }

    pub fn parity(&self) -> &CMat {
        &self.parity
    }

    /// Z~ = diag((-i)^{|S| mod 2}) = (1 + iZ)/(1 + i).
    pub fn klein(&self) -> &CMat {
        &self.klein
    }

    pub fn creation(&self, f: &CVec) -> Result<CMat> {
        self.check(f)?;
        let n = self.fock_dim();
        Ok(self.creators.iter().zip(f.iter()).fold(CMat::zeros(n, n), |acc, (m, &z)| acc + m * z))
    }

    /// c(f) is antilinear in f.
    pub fn annihilation(&self, f: &CVec) -> Result<CMat> {
        self.check(f)?;
        let n = self.fock_dim();
        Ok(self.annihilators.iter().zip(f.iter()).fold(CMat::zeros(n, n), |acc, (m, &z)| acc + m * z.conj()))
    }

    fn check(&self, f: &CVec) -> Result<()> {
        if f.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: f.len() });
        }
        Ok(())
    }

    /// b(f) = c(f) + c*(f).
    pub fn field_operator(&self, f: &CVec) -> Result<CMat> {
        Ok(self.annihilation(f)? + self.creation(f)?)
    }

    /// Largest CAR violation over all basis pairs.
    pub fn car_residual(&self) -> f64 {
        let n = self.fock_dim();
        let id = CMat::identity(n, n);
        let mut worst: f64 = 0.0;
        for k in 0..self.d {
            for l in 0..self.d {
                let (ck, cl) = (&self.annihilators[k], &self.annihilators[l]);
                let cdl = &self.creators[l];
                let delta = if k == l { c(1.0, 0.0) } else { c(0.0, 0.0) };
                worst = worst.max((ck * cdl + cdl * ck - &id * delta).norm());
                worst = worst.max((ck * cl + cl * ck).norm());
            }
        }
        worst
    }

    pub fn klein_residual(&self) -> f64 {
        let n = self.fock_dim();
        let sq = (&self.klein * &self.klein - &self.parity).norm();
        let id = CMat::identity(n, n);
        let formula = (&id + &self.parity * c(0.0, 1.0)) / c(1.0, 1.0);
        sq.max((formula - &self.klein).norm())
    }
}

/// Functorial lift of any d x d matrix to the exterior algebra (minors on equal-size subsets).
pub fn exterior(m: &CMat) -> CMat {
    let d = m.nrows();
    let n = 1usize << d;
    let bits = |s: usize| (0..d).filter(|&k| s & (1 << k) != 0).collect::<Vec<_>>();
    let mut out = CMat::zeros(n, n);
    for s in 0..n {
        let cols = bits(s);
        for t in 0..n {
            if t.count_ones() != s.count_ones() {
                continue;
            }
            let rows = bits(t);
            out[(t, s)] = if cols.is_empty() {
                c(1.0, 0.0)
            } else {
                CMat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])]).determinant()
            };
        }
    }
    out
}

/// Gamma_-(T) for unitary or antiunitary T.
pub fn second_quantize_minus(ctx: &FermiContext, t: &RlOperator) -> Result<RlOperator> {
    if t.dim_c() != ctx.d() {
        return Err(Error::DimensionMismatch { expected: ctx.d(), got: t.dim_c() });
    }
    let iso = t.isometry_residual();
    if iso > 1e-10 {
        return Err(Error::NotIsometric(iso));
    }
    let m = t.complex_matrix().ok_or(Error::NotIsometric(f64::INFINITY))?;
    let g = exterior(&m);
    Ok(match t.linearity() {
        Linearity::Antilinear => RlOperator::antilinear(&g),
        _ => RlOperator::complex_linear(&g),
    })
}

pub fn fermi_algebra(ctx: &FermiContext, v: &RealSubspace) -> Result<StarAlgebra> {
    if v.dim_c() != ctx.d() {
        return Err(Error::DimensionMismatch { expected: ctx.d(), got: v.dim_c() });
    }
    let vecs = complexify_cols(v.basis());
    let gens = (0..vecs.ncols())
        .map(|k| ctx.field_operator(&vecs.column(k).into_owned()))
        .collect::<Result<Vec<_>>>()?;
    StarAlgebra::generate(ctx.fock_dim(), &gens, DEFAULT_CAP)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TwistedDualityReport {
    pub distance: f64,
    pub supercommutation_residual: f64,
    pub dim_lhs: usize,
    pub dim_rhs: usize,
}

/// R(V^{perp beta}) against Z~^{-1} R(V)' Z~.
pub fn twisted_duality_check(ctx: &FermiContext, v: &RealSubspace) -> Result<TwistedDualityReport> {
    let perp = v.orth_complement();
    let lhs = fermi_algebra(ctx, &perp)?;
    let r = fermi_algebra(ctx, v)?;
    let z = ctx.klein();
    let zinv = z.adjoint();
    let rhs = r.commutant().conjugate(&zinv, z);
    let par = ctx.parity();
    let vecs = complexify_cols(v.basis());
    let fields = (0..vecs.ncols())
        .map(|k| ctx.field_operator(&vecs.column(k).into_owned()))
        .collect::<Result<Vec<_>>>()?;
    let mut sup: f64 = 0.0;
    for a in lhs.basis() {
        let zaz = par * &a * par;
        let even = (&a + &zaz) * c(0.5, 0.0);
        let odd = (&a - &zaz) * c(0.5, 0.0);
        for b in &fields {
            let r = (&even * b - b * &even) + (&odd * b + b * &odd);
            sup = sup.max(r.norm());
        }
    }
    Ok(TwistedDualityReport {
        distance: lhs.distance(&rhs),
        supercommutation_residual: sup,
        dim_lhs: lhs.dim(),
        dim_rhs: rhs.dim(),
    })
}

/// Which fermionic modular conjugation formula to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KleinConvention {
    /// J_F = Z~ Gamma_-(i J_V) for R(V).
    #[default]
    Standard,
    /// Z~ J_F = Gamma_-(J_V) for R(zeta V), zeta = e^{i pi/4}.
    Rotated,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FermiModularReport {
    pub cyclic: bool,
    pub separating: bool,
    pub delta_residual: f64,
    pub j_residual: f64,
    pub algebra_dim: usize,
    pub fock_spectrum: Vec<f64>,
}

pub fn fermi_modular_check(ctx: &FermiContext, v: &StandardSubspace, conv: KleinConvention) -> Result<FermiModularReport> {
    let d = ctx.d();
    if v.dim_c() != d {
        return Err(Error::DimensionMismatch { expected: d, got: v.dim_c() });
    }
    let space = match conv {
        KleinConvention::Standard => v.space().clone(),
        KleinConvention::Rotated => {
            let zeta = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
            v.space().image(&RlOperator::complex_linear(&(CMat::identity(d, d) * zeta)))?
        }
    };
    let alg = fermi_algebra(ctx, &space)?;
    let om = ctx.vacuum();
    let st = vector_status(&alg, &om);
    let (md, _) = tomita_modular(&alg, &om)?;
    let mt = v.modular_objects()?;
    let gamma_delta = exterior(&complexify(mt.delta.matrix()));
    let delta_f = complexify(md.triple.delta.matrix());
    let delta_residual = linalg::op_norm_c(&(delta_f - gamma_delta));
    let jv = mt.j.complex_matrix().expect("antilinear");
    let jf = md.triple.j.complex_matrix().expect("antilinear");
    let j_residual = match conv {
        KleinConvention::Standard => {
            let pred = ctx.klein() * exterior(&(jv * c(0.0, 1.0)));
            linalg::op_norm_c(&(jf - pred))
        }
        KleinConvention::Rotated => linalg::op_norm_c(&(ctx.klein() * jf - exterior(&jv))),
    };
    Ok(FermiModularReport {
        cyclic: st.cyclic,
        separating: st.separating,
        delta_residual,
        j_residual,
        algebra_dim: alg.dim(),
        fock_spectrum: md.triple.spectrum(),
    })
}

/// Finite combination sum_k c_k Exp(v_k).
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentVector {
    terms: Vec<(C64, CVec)>,
}

const MERGE_TOL: f64 = 1e-10;

impl CoherentVector {
    pub fn new(terms: Vec<(C64, CVec)>) -> Result<Self> {
        let mut out = CoherentVector { terms: Vec::new() };
        let d = terms.first().map(|t| t.1.len());
        for (coef, label) in terms {
            if Some(label.len()) != d {
                return Err(Error::DimensionMismatch { expected: d.unwrap_or(0), got: label.len() });
            }
            out.push(coef, label);
        }
        Ok(out)
    }

    pub fn exp(v: CVec) -> Self {
        CoherentVector { terms: vec![(c(1.0, 0.0), v)] }
    }

    pub fn vacuum(d: usize) -> Self {
        CoherentVector::exp(CVec::zeros(d))
    }

    fn push(&mut self, coef: C64, label: CVec) {
        match self.terms.iter_mut().find(|(_, l)| (l - &label).norm() < MERGE_TOL) {
            Some(t) => t.0 += coef,
            None => self.terms.push((coef, label)),
        }
    }

    pub fn terms(&self) -> &[(C64, CVec)] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.terms.first().map(|t| t.1.len()).unwrap_or(0)
    }

    /// Gram matrix exp(<v_j, v_k>) of the labels.
    pub fn gram(&self) -> CMat {
        let n = self.terms.len();
        CMat::from_fn(n, n, |j, k| self.terms[j].1.dotc(&self.terms[k].1).exp())
    }

    pub fn map_labels(&self, f: impl Fn(&CVec) -> CVec, antilinear: bool) -> Self {
        let mut out = CoherentVector { terms: Vec::new() };
        for (coef, l) in &self.terms {
            out.push(if antilinear { coef.conj() } else { *coef }, f(l));
        }
        out
    }
}

/// sum_{j,k} conj(c_j) d_k exp(<v_j, w_k>).
pub fn coherent_inner(x: &CoherentVector, y: &CoherentVector) -> C64 {
    x.terms
        .iter()
        .flat_map(|(a, v)| y.terms.iter().map(move |(b, w)| a.conj() * b * v.dotc(w).exp()))
        .sum()
}

/// U_x Exp(v) = exp(-<x,v> - |x|^2/2) Exp(v + x).
pub fn weyl_apply(x: &CVec, xi: &CoherentVector) -> Result<CoherentVector> {
    if !xi.terms.is_empty() && x.len() != xi.dim() {
        return Err(Error::DimensionMismatch { expected: xi.dim(), got: x.len() });
    }
    let half = x.norm_squared() / 2.0;
    let mut out = CoherentVector { terms: Vec::new() };
    for (coef, v) in &xi.terms {
        out.push(coef * (-x.dotc(v) - half).exp(), v + x);
    }
    Ok(out)
}

/// W(v) = U_{i v / sqrt 2}.
pub fn weyl_operator(v: &CVec, xi: &CoherentVector) -> Result<CoherentVector> {
    weyl_apply(&(v * c(0.0, std::f64::consts::FRAC_1_SQRT_2)), xi)
}

/// Gamma_+(T) Exp(v) = Exp(T v), antilinear on coefficients when T is.
pub fn second_quantize_plus(t: &RlOperator, xi: &CoherentVector) -> CoherentVector {
    xi.map_labels(|v| t.apply_c(v), t.linearity() == Linearity::Antilinear)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BoseReport {
    pub weyl_u_residual: f64,
    pub weyl_w_residual: f64,
    pub vacuum_residual: f64,
    pub gamma_residual: f64,
    pub modular_residual: f64,
    pub locality_residual: f64,
    pub samples: usize,
}

fn rand_cvec(rng: &mut TrialRng, d: usize, scale: f64) -> CVec {
    CVec::from_fn(d, |_, _| c(random::normal(rng), random::normal(rng)) * scale)
}

fn rand_coherent(rng: &mut TrialRng, d: usize, terms: usize) -> CoherentVector {
    let t = (0..terms)
        .map(|_| (c(random::normal(rng), random::normal(rng)), rand_cvec(rng, d, 0.4)))
        .collect();
    CoherentVector::new(t).expect("consistent labels")
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Scalar identities of the Weyl calculus and of second quantization on coherent vectors.
pub fn bose_checks(v: &StandardSubspace, samples: usize, rng: &mut TrialRng) -> Result<BoseReport> {
    let d = v.dim_c();
    let mt = v.modular_objects()?;
    let half = crate::realified::operator_function(&mt.delta, OpFunction::Power(0.5))?;
    let jhalf = mt.j.compose(&half);
    let unit = mt.modular_group(0.37)?;
    let vp = v.symplectic_complement()?;
    let mut rep = BoseReport {
        weyl_u_residual: 0.0,
        weyl_w_residual: 0.0,
        vacuum_residual: 0.0,
        gamma_residual: 0.0,
        modular_residual: 0.0,
        locality_residual: 0.0,
        samples,
    };
    for _ in 0..samples {
        let x = rand_cvec(rng, d, 0.5);
        let y = rand_cvec(rng, d, 0.5);
        let xi = rand_coherent(rng, d, 2);
        let probe = rand_coherent(rng, d, 2);
        let lhs = coherent_inner(&probe, &weyl_apply(&x, &weyl_apply(&y, &xi)?)?);
        let phase = C64::from_polar(1.0, -x.dotc(&y).im);
        let rhs = phase * coherent_inner(&probe, &weyl_apply(&(&x + &y), &xi)?);
        rep.weyl_u_residual = rep.weyl_u_residual.max(rel(lhs, rhs));

        let lhs = coherent_inner(&probe, &weyl_operator(&x, &weyl_operator(&y, &xi)?)?);
        let phase = C64::from_polar(1.0, -x.dotc(&y).im / 2.0);
        let rhs = phase * coherent_inner(&probe, &weyl_operator(&(&x + &y), &xi)?);
        rep.weyl_w_residual = rep.weyl_w_residual.max(rel(lhs, rhs));

        let vac = CoherentVector::vacuum(d);
        let got = coherent_inner(&vac, &weyl_operator(&x, &vac)?);
        let want = c((-x.norm_squared() / 4.0).exp(), 0.0);
        rep.vacuum_residual = rep.vacuum_residual.max((got - want).norm());

        let (a, b) = (CoherentVector::exp(x.clone()), CoherentVector::exp(y.clone()));
        let base = coherent_inner(&a, &b);
        let gu = coherent_inner(&second_quantize_plus(&unit, &a), &second_quantize_plus(&unit, &b));
        let gj = coherent_inner(&second_quantize_plus(&mt.j, &a), &second_quantize_plus(&mt.j, &b));
        rep.gamma_residual = rep.gamma_residual.max(rel(gu, base)).max(rel(gj, base.conj()));

        let lhs = second_quantize_plus(&mt.j, &second_quantize_plus(&half, &a));
        let rhs = second_quantize_plus(&mt.s, &a);
        let label = (&lhs.terms()[0].1 - &rhs.terms()[0].1).norm() / x.norm().max(1.0);
        let lj = jhalf.apply_c(&x);
        rep.modular_residual = rep.modular_residual.max(label).max((&lj - &lhs.terms()[0].1).norm());

        let cx = complexify_cols(&(v.basis() * crate::random::real_matrix(rng, d, 1)));
        let cy = complexify_cols(&(vp.basis() * crate::random::real_matrix(rng, d, 1)));
        let p = cx.column(0).dotc(&cy.column(0));
        rep.locality_residual = rep.locality_residual.max((C64::from_polar(1.0, -p.im) - c(1.0, 0.0)).norm());
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::trial_rng;
    use crate::standard::c_example;

    fn e(d: usize, k: usize, z: C64) -> CVec {
        let mut v = CVec::zeros(d);
        v[k] = z;
        v
    }

    #[test]
    fn car_and_klein() {
        for d in 1..=5 {
            let ctx = FermiContext::new(d).unwrap();
            assert!(ctx.car_residual() < 1e-12);
            assert!(ctx.klein_residual() < 1e-12);
        }
        assert!(FermiContext::new(6).is_err());
    }

    #[test]
    fn field_examples() {
        let ctx = FermiContext::new(1).unwrap();
        let b = ctx.field_operator(&e(1, 0, c(1.0, 0.0))).unwrap();
        assert!((&b * &b - CMat::identity(2, 2)).norm() < 1e-14);
        let bi = ctx.field_operator(&e(1, 0, c(0.0, 1.0))).unwrap();
        assert!((&bi * &b + &b * &bi).norm() < 1e-14);
    }

    #[test]
    fn algebra_dimensions() {
        let ctx = FermiContext::new(1).unwrap();
        assert_eq!(fermi_algebra(&ctx, &RealSubspace::zero(1)).unwrap().dim(), 1);
        assert_eq!(fermi_algebra(&ctx, &RealSubspace::real_points(1)).unwrap().dim(), 2);
        let ctx = FermiContext::new(2).unwrap();
        assert_eq!(fermi_algebra(&ctx, &RealSubspace::whole(2)).unwrap().dim(), 16);
    }

    #[test]
    fn gamma_minus_examples() {
        let ctx = FermiContext::new(1).unwrap();
        let th = 0.7;
        let ph = RlOperator::complex_linear(&CMat::from_element(1, 1, C64::from_polar(1.0, th)));
        let g = second_quantize_minus(&ctx, &ph).unwrap().complex_matrix().unwrap();
        assert!((g[(1, 1)] - C64::from_polar(1.0, th)).norm() < 1e-14 && (g[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14);
        let ctx = FermiContext::new(3).unwrap();
        let j = second_quantize_minus(&ctx, &RlOperator::conjugation(3)).unwrap();
        assert!(j.distance(&RlOperator::conjugation(8)) < 1e-14);
        assert!(second_quantize_minus(&ctx, &RlOperator::identity(3).scale(2.0)).is_err());
    }

    #[test]
    fn gamma_minus_functorial() {
        let mut rng = trial_rng(5, 0);
        let ctx = FermiContext::new(3).unwrap();
        for _ in 0..5 {
            let a = RlOperator::antilinear(&random::unitary(&mut rng, 3));
            let b = RlOperator::complex_linear(&random::unitary(&mut rng, 3));
            let lhs = second_quantize_minus(&ctx, &a.compose(&b)).unwrap();
            let rhs = second_quantize_minus(&ctx, &a).unwrap().compose(&second_quantize_minus(&ctx, &b).unwrap());
            assert!(lhs.distance(&rhs) < 1e-10);
        }
    }

    #[test]
    fn twisted_duality_small() {
        let ctx = FermiContext::new(1).unwrap();
        let r = twisted_duality_check(&ctx, &RealSubspace::real_points(1)).unwrap();
        assert!(r.distance < 1e-8 && r.supercommutation_residual < 1e-10);
        let r = twisted_duality_check(&ctx, &RealSubspace::zero(1)).unwrap();
        assert!(r.distance < 1e-8 && r.dim_lhs == 4);
        let ctx = FermiContext::new(2).unwrap();
        let v = c_example(0.5).unwrap();
        let r = twisted_duality_check(&ctx, v.space()).unwrap();
        assert!(r.distance < 1e-8 && r.supercommutation_residual < 1e-10);
    }

    #[test]
    fn fermi_modular_conventions() {
        let ctx = FermiContext::new(1).unwrap();
        let r = fermi_modular_check(&ctx, &StandardSubspace::real_points(1), KleinConvention::Standard).unwrap();
        assert!(r.cyclic && r.separating && r.delta_residual < 1e-8 && r.j_residual < 1e-8);
        let ctx = FermiContext::new(2).unwrap();
        let v = c_example(0.5).unwrap();
        for conv in [KleinConvention::Standard, KleinConvention::Rotated] {
            let r = fermi_modular_check(&ctx, &v, conv).unwrap();
            assert!(r.delta_residual < 1e-8, "{conv:?} {r:?}");
            assert!(r.j_residual < 1e-8, "{conv:?} {r:?}");
            let want = [1.0 / 9.0, 1.0, 1.0, 9.0];
            assert!(r.fock_spectrum.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-9));
        }
    }

    #[test]
    fn coherent_examples() {
        let d = 2;
        let vac = CoherentVector::vacuum(d);
        assert!((coherent_inner(&vac, &vac) - c(1.0, 0.0)).norm() < 1e-15);
        let v = CVec::from_column_slice(&[c(0.3, -0.2), c(0.1, 0.5)]);
        let ev = CoherentVector::exp(v.clone());
        assert!((coherent_inner(&ev, &ev) - c(v.norm_squared().exp(), 0.0)).norm() < 1e-12);
        let ux = weyl_apply(&v, &vac).unwrap();
        assert!((ux.terms()[0].0 - c((-v.norm_squared() / 2.0).exp(), 0.0)).norm() < 1e-15);
        let back = weyl_apply(&(-&v), &weyl_apply(&v, &ev).unwrap()).unwrap();
        assert!((coherent_inner(&back, &ev) - coherent_inner(&ev, &ev)).norm() < 1e-12);
        let w = weyl_operator(&v, &vac).unwrap();
        assert!((coherent_inner(&vac, &w) - c((-v.norm_squared() / 4.0).exp(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn bose_report() {
        let mut rng = trial_rng(9, 0);
        let r = bose_checks(&c_example(0.5).unwrap(), 50, &mut rng).unwrap();
        assert!(r.weyl_u_residual < 1e-12 && r.weyl_w_residual < 1e-12 && r.vacuum_residual < 1e-12);
        assert!(r.gamma_residual < 1e-12 && r.modular_residual < 1e-12 && r.locality_residual < 1e-12, "{r:?}");
    }
}
