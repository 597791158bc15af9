//! Finite-dimensional von Neumann algebras and their Tomita-Takesaki data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, C64, RANK_TOL};
use crate::realified::{complexify, OpFunction, RealSubspace, RlOperator};
use crate::standard::{ModularTriple, StandardSubspace};

pub const DEFAULT_CAP: usize = 4096;

/// *-subalgebra of M_n stored as an orthonormal (Frobenius) basis, vectorized column-major.
#[derive(Debug, Clone)]
pub struct StarAlgebra {
    n: usize,
    q: CMat,
    gens: Vec<CMat>,
}

fn vec_of(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

fn mat_of(v: &[C64], n: usize) -> CMat {
    CMat::from_column_slice(n, n, v)
}

impl StarAlgebra {
    /// Smallest unital *-algebra containing the generators.
    pub fn generate(n: usize, generators: &[CMat], cap: usize) -> Result<Self> {
        if generators.iter().any(|g| g.shape() != (n, n)) {
            return Err(Error::DimensionMismatch { expected: n, got: generators.iter().map(|g| g.nrows()).find(|&r| r != n).unwrap_or(0) });
        }
        let mut gens: Vec<CMat> = Vec::new();
        for g in generators {
            gens.push(g.clone());
            if (g - g.adjoint()).norm() > 1e-12 * g.norm().max(1.0) {
                gens.push(g.adjoint());
            }
        }
        let mut basis: Vec<CVec> = Vec::new();
        let mut frontier = Vec::new();
        let add = |v: CVec, basis: &mut Vec<CVec>| -> Option<CVec> {
            let norm0 = v.norm();
            if norm0 == 0.0 {
                return None;
            }
            let mut w = v / c(norm0, 0.0);
            for _ in 0..2 {
                for b in basis.iter() {
                    let p = b.dotc(&w);
                    w -= b * p;
                }
            }
            let r = w.norm();
            if r > 1e-8 {
                let w = w / c(r, 0.0);
                basis.push(w.clone());
                Some(w)
            } else {
                None
            }
        };
        if let Some(w) = add(vec_of(&CMat::identity(n, n)), &mut basis) {
            frontier.push(w);
        }
        for g in &gens {
            if let Some(w) = add(vec_of(g), &mut basis) {
                frontier.push(w);
            }
        }
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for f in &frontier {
                let fm = mat_of(f.as_slice(), n);
                for g in &gens {
                    if let Some(w) = add(vec_of(&(g * &fm)), &mut basis) {
                        next.push(w);
                    }
                    if basis.len() > cap {
                        return Err(Error::DimensionOverflow(cap));
                    }
                }
            }
            frontier = next;
        }
        let q = CMat::from_columns(&basis);
        Ok(StarAlgebra { n, q, gens })
    }

    /// Span of the given matrices, assumed to already form a *-algebra.
    pub fn from_basis(n: usize, mats: &[CMat]) -> Self {
        let stacked = CMat::from_columns(&mats.iter().map(vec_of).collect::<Vec<_>>());
        let q = if mats.is_empty() { CMat::zeros(n * n, 0) } else { linalg::orth_c(&stacked, 1e-9) };
        StarAlgebra { n, q, gens: Vec::new() }
    }

    pub fn scalars(n: usize) -> Self {
        StarAlgebra::generate(n, &[], DEFAULT_CAP).expect("scalars")
    }

    pub fn full(n: usize) -> Self {
        let units: Vec<CMat> = (0..n * n)
            .map(|k| {
                let mut e = CMat::zeros(n, n);
                e[(k % n, k / n)] = c(1.0, 0.0);
                e
            })
            .collect();
        StarAlgebra::from_basis(n, &units)
    }

    pub fn diagonal(n: usize) -> Self {
        let units: Vec<CMat> = (0..n)
            .map(|k| {
                let mut e = CMat::zeros(n, n);
                e[(k, k)] = c(1.0, 0.0);
                e
            })
            .collect();
        StarAlgebra::from_basis(n, &units)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.q.ncols()
    }

    pub fn span(&self) -> &CMat {
        &self.q
    }

    pub fn basis(&self) -> Vec<CMat> {
        (0..self.dim()).map(|k| self.element(k)).collect()
    }

    pub fn element(&self, k: usize) -> CMat {
        mat_of(self.q.column(k).as_slice(), self.n)
    }

    /// Hermitian spanning set (b + b*)/2, (b - b*)/2i.
    pub fn hermitian_spanning(&self) -> Vec<CMat> {
        let half = c(0.5, 0.0);
        let mhalf_i = c(0.0, -0.5);
        self.basis()
            .into_iter()
            .flat_map(|b| [(&b + b.adjoint()) * half, (&b - b.adjoint()) * mhalf_i])
            .collect()
    }

    /// Frobenius distance from X to the algebra span.
    pub fn residual(&self, x: &CMat) -> f64 {
        let v = vec_of(x);
        (&v - &self.q * (self.q.adjoint() * &v)).norm()
    }

    pub fn distance(&self, other: &StarAlgebra) -> f64 {
        linalg::span_distance_c(&self.q, &other.q)
    }

    /// Worst residual of products and adjoints of basis pairs.
    pub fn closure_residual(&self) -> f64 {
        let b = self.basis();
        let mut worst: f64 = self.residual(&CMat::identity(self.n, self.n));
        for x in &b {
            worst = worst.max(self.residual(&x.adjoint()));
            for y in &b {
                worst = worst.max(self.residual(&(x * y)));
            }
        }
        worst
    }

    fn commutant_from(&self, gens: &[CMat]) -> CMat {
        let n = self.n;
        let id = CMat::identity(n, n);
        let blocks: Vec<CMat> = gens
            .iter()
            .map(|g| {
                let g = g / c(g.norm().max(1e-300), 0.0);
                g.transpose().kronecker(&id) - id.kronecker(&g)
            })
            .collect();
        let mut a = CMat::zeros(blocks.len() * n * n, n * n);
        for (i, b) in blocks.iter().enumerate() {
            a.view_mut((i * n * n, 0), (n * n, n * n)).copy_from(b);
        }
        if blocks.is_empty() {
            return CMat::identity(n * n, n * n);
        }
        linalg::nullspace_c(&a, 1e-8)
    }

    /// A' as the solution space of [X, b] = 0.
    pub fn commutant(&self) -> StarAlgebra {
        let n = self.n;
        let small: Vec<CMat> = if !self.gens.is_empty() && self.gens.len() <= 16 {
            self.gens.clone()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0xc0_ffee);
            let mut picks = Vec::new();
            for _ in 0..3 {
                let mut x = CMat::zeros(n, n);
                for k in 0..self.dim() {
                    x += self.element(k) * c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                }
                picks.push(x.adjoint());
                picks.push(x);
            }
            picks
        };
        let mut q = self.commutant_from(&small);
        let check = |q: &CMat| {
            (0..q.ncols())
                .flat_map(|k| {
                    let x = mat_of(q.column(k).as_slice(), n);
                    self.basis().into_iter().map(move |b| (&x * &b - &b * &x).norm())
                })
                .fold(0.0, f64::max)
        };
        if check(&q) > 1e-8 {
            q = self.commutant_from(&self.basis());
        }
        let gens = (0..q.ncols()).map(|k| mat_of(q.column(k).as_slice(), n)).collect();
        StarAlgebra { n, q: linalg::orth_c(&q, 1e-9), gens }
    }

    /// A cap B as a span.
    pub fn intersection(&self, other: &StarAlgebra) -> StarAlgebra {
        let resid = &self.q - &other.q * (other.q.adjoint() * &self.q);
        let ker = linalg::nullspace_c(&resid, 1e-8);
        let q = linalg::orth_c(&(&self.q * ker), 1e-9);
        StarAlgebra { n: self.n, q, gens: Vec::new() }
    }

    /// X -> W X W^{-1} applied to the whole algebra.
    pub fn conjugate(&self, w: &CMat, winv: &CMat) -> StarAlgebra {
        let mats: Vec<CMat> = self.basis().iter().map(|b| w * b * winv).collect();
        StarAlgebra::from_basis(self.n, &mats)
    }

    /// Real span of {h Omega : h hermitian in A}.
    pub fn hermitian_orbit(&self, omega: &CVec) -> RealSubspace {
        let cols: Vec<CVec> = self.hermitian_spanning().iter().map(|h| h * omega).collect();
        RealSubspace::from_complex_spanning(&CMat::from_columns(&cols))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "basis": self.basis().iter().map(crate::json::complex_matrix).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct VectorStatus {
    pub cyclic: bool,
    pub separating: bool,
    pub orbit_rank: usize,
    /// Separating for A agrees with cyclic for A'.
    pub cross_check: bool,
}

fn orbit_rank(a: &StarAlgebra, omega: &CVec) -> usize {
    let cols: Vec<CVec> = a.basis().iter().map(|b| b * omega).collect();
    if cols.is_empty() {
        return 0;
    }
    linalg::orth_c(&CMat::from_columns(&cols), RANK_TOL).ncols()
}

pub fn vector_status(a: &StarAlgebra, omega: &CVec) -> VectorStatus {
    let rank = orbit_rank(a, omega);
    let cyclic = rank == a.n();
    let separating = rank == a.dim();
    let comm = a.commutant();
    let cross_check = separating == (orbit_rank(&comm, omega) == a.n());
    VectorStatus { cyclic, separating, orbit_rank: rank, cross_check }
}

#[derive(Debug, Clone)]
pub struct ModularData {
    pub v: StandardSubspace,
    pub triple: ModularTriple,
    pub omega: CVec,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TomitaReport {
    pub jmj_distance: f64,
    pub flow_residual: f64,
    pub center_dim: usize,
    pub center_residual: f64,
    pub j_omega: f64,
    pub delta_omega: f64,
    pub modular_residual: f64,
}

/// J X J for antilinear J = M K.
pub fn conjugate_by_antilinear(m: &CMat, x: &CMat) -> CMat {
    m * x.map(|z| z.conj()) * m.map(|z| z.conj())
}

pub fn tomita_modular(a: &StarAlgebra, omega: &CVec) -> Result<(ModularData, TomitaReport)> {
    let st = vector_status(a, omega);
    if !(st.cyclic && st.separating) {
        return Err(Error::NotCyclicSeparating { cyclic: st.cyclic, separating: st.separating });
    }
    let v = StandardSubspace::new(a.hermitian_orbit(omega))?;
    let triple = v.modular_objects()?;
    let jm = triple.j.complex_matrix().expect("antilinear J");
    let comm = a.commutant();
    let jaj = StarAlgebra::from_basis(a.n(), &a.basis().iter().map(|b| conjugate_by_antilinear(&jm, b)).collect::<Vec<_>>());
    let jmj_distance = jaj.distance(&comm);
    let log = crate::realified::operator_function(&triple.delta, OpFunction::Log)?;
    let h = complexify(log.matrix());
    let flow_residual = a.basis().iter().map(|b| a.residual(&(&h * b - b * &h))).fold(0.0, f64::max);
    let center = a.intersection(&comm);
    let center_residual = center
        .basis()
        .iter()
        .map(|z| (conjugate_by_antilinear(&jm, z) - z.adjoint()).norm())
        .fold(0.0, f64::max);
    let dm = complexify(triple.delta.matrix());
    let j_omega = (&jm * omega.map(|z| z.conj()) - omega).norm();
    let delta_omega = (&dm * omega - omega).norm();
    let report = TomitaReport {
        jmj_distance,
        flow_residual,
        center_dim: center.dim(),
        center_residual,
        j_omega,
        delta_omega,
        modular_residual: triple.modular_residual(),
    };
    Ok((ModularData { v, triple, omega: omega.clone() }, report))
}

/// Hilbert-Schmidt model: M = B(K) acting on K (x) K by left multiplication on k x k matrices.
#[derive(Debug, Clone)]
pub struct HsModel {
    pub k: usize,
    pub density: CMat,
}

impl HsModel {
    pub fn new(density: CMat) -> Result<Self> {
        let k = density.nrows();
        let ev = linalg::herm_eigenvalues(&density);
        if ev[0] <= 1e-12 {
            return Err(Error::NotInvertible);
        }
        Ok(HsModel { k, density })
    }

    pub fn algebra(&self) -> StarAlgebra {
        let k = self.k;
        let id = CMat::identity(k, k);
        let gens: Vec<CMat> = (0..k * k)
            .map(|p| {
                let mut e = CMat::zeros(k, k);
                e[(p % k, p / k)] = c(1.0, 0.0);
                id.kronecker(&e)
            })
            .collect();
        StarAlgebra::from_basis(k * k, &gens)
    }

    /// Right multiplications, the commutant of the left action.
    pub fn right_algebra(&self) -> StarAlgebra {
        let k = self.k;
        let id = CMat::identity(k, k);
        let gens: Vec<CMat> = (0..k * k)
            .map(|p| {
                let mut e = CMat::zeros(k, k);
                e[(p % k, p / k)] = c(1.0, 0.0);
                e.transpose().kronecker(&id)
            })
            .collect();
        StarAlgebra::from_basis(k * k, &gens)
    }

    pub fn vectorize(x: &CMat) -> CVec {
        vec_of(x)
    }

    pub fn omega(&self) -> CVec {
        let root = linalg::herm_fn(&self.density, |x| c(x.max(0.0).sqrt(), 0.0));
        let v = vec_of(&root);
        let n = v.norm();
        v / c(n, 0.0)
    }

    /// vec(D X D^{-1}) = (D^{-T} (x) D) vec X.
    pub fn delta_closed(&self) -> RlOperator {
        let dinv = self.density.clone().try_inverse().expect("invertible density");
        RlOperator::complex_linear(&dinv.transpose().kronecker(&self.density))
    }

    /// vec(X*) = P conj(vec X) with P the transpose permutation.
    pub fn j_closed(&self) -> RlOperator {
        let k = self.k;
        let mut p = CMat::zeros(k * k, k * k);
        for i in 0..k {
            for j in 0..k {
                p[(j + k * i, i + k * j)] = c(1.0, 0.0);
            }
        }
        RlOperator::antilinear(&p)
    }
}

#[derive(Debug, Clone)]
pub struct ConePolar {
    pub right_unitary: CMat,
    pub xi_plus: CMat,
    pub residual: f64,
}

/// xi = xi_+ u with xi_+ = (xi xi*)^{1/2} in the cone and u acting by right multiplication.
pub fn cone_polar(xi: &CMat) -> Result<ConePolar> {
    let sv = crate::linalg::singular_values(xi);
    let hi = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let lo = sv.iter().fold(f64::INFINITY, |a: f64, &b| a.min(b));
    if hi == 0.0 || lo < 1e-12 * hi {
        return Err(Error::NotInvertible);
    }
    let xi_plus = linalg::herm_fn(&(xi * xi.adjoint()), |x| c(x.max(0.0).sqrt(), 0.0));
    let inv = xi_plus.clone().try_inverse().ok_or(Error::NotInvertible)?;
    let u = inv * xi;
    let residual = (xi - &xi_plus * &u).norm();
    Ok(ConePolar { right_unitary: u, xi_plus, residual })
}

#[derive(Debug, Clone)]
pub struct SubalgebraMap {
    pub spaces: Vec<RealSubspace>,
    pub distances: Vec<Vec<f64>>,
    pub monotone_violations: usize,
}

/// N -> V_N = real span of N_h Omega, with injectivity and monotonicity data.
pub fn subalgebra_standard_map(a: &StarAlgebra, omega: &CVec, subs: &[StarAlgebra]) -> Result<SubalgebraMap> {
    let st = vector_status(a, omega);
    if !st.separating {
        return Err(Error::NotCyclicSeparating { cyclic: st.cyclic, separating: false });
    }
    for s in subs {
        let r = s.basis().iter().map(|b| a.residual(b)).fold(0.0, f64::max);
        if r > 1e-8 {
            return Err(Error::NotSubalgebra(r));
        }
    }
    let spaces: Vec<RealSubspace> = subs.iter().map(|s| s.hermitian_orbit(omega)).collect();
    let m = spaces.len();
    let mut distances = vec![vec![0.0; m]; m];
    let mut monotone_violations = 0;
    for i in 0..m {
        for j in 0..m {
            distances[i][j] = spaces[i].distance(&spaces[j])?;
            let sub = subs[i].basis().iter().map(|b| subs[j].residual(b)).fold(0.0, f64::max) < 1e-8;
            if sub && spaces[j].containment_residual(&spaces[i])? > 1e-8 {
                monotone_violations += 1;
            }
        }
    }
    Ok(SubalgebraMap { spaces, distances, monotone_violations })
}

/// (M_{n_1} (x) 1_{n_1}) + ... conjugated by a unitary; Omega generic is cyclic and separating.
pub fn block_algebra(sizes: &[usize], w: &CMat) -> StarAlgebra {
    let n: usize = sizes.iter().map(|s| s * s).sum();
    let mut mats = Vec::new();
    let mut off = 0;
    for &s in sizes {
        let id = CMat::identity(s, s);
        for p in 0..s * s {
            let mut e = CMat::zeros(s, s);
            e[(p % s, p / s)] = c(1.0, 0.0);
            let blk = e.kronecker(&id);
            let mut m = CMat::zeros(n, n);
            m.view_mut((off, off), (s * s, s * s)).copy_from(&blk);
            mats.push(w * m * w.adjoint());
        }
        off += s * s;
    }
    StarAlgebra::from_basis(n, &mats)
}

/// V_{M'} from the commutant, to compare with the symplectic complement of V_M.
pub fn commutant_space(a: &StarAlgebra, omega: &CVec) -> RealSubspace {
    a.commutant().hermitian_orbit(omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{self, trial_rng};

    fn cv(v: &[C64]) -> CVec {
        CVec::from_column_slice(v)
    }

    #[test]
    fn generation_examples() {
        assert_eq!(StarAlgebra::generate(3, &[], 100).unwrap().dim(), 1);
        let mut e = CMat::zeros(2, 2);
        e[(0, 0)] = c(1.0, 0.0);
        assert_eq!(StarAlgebra::generate(2, &[e], 100).unwrap().dim(), 2);
        let mut rng = trial_rng(1, 0);
        let gens = [random::hermitian(&mut rng, 3), random::hermitian(&mut rng, 3)];
        let a = StarAlgebra::generate(3, &gens, 100).unwrap();
        assert_eq!(a.dim(), 9);
        assert!(a.closure_residual() < 1e-10);
        assert!(matches!(StarAlgebra::generate(3, &gens, 4), Err(Error::DimensionOverflow(4))));
    }

    #[test]
    fn commutant_examples() {
        assert_eq!(StarAlgebra::full(3).commutant().dim(), 1);
        let d = StarAlgebra::diagonal(2);
        assert!(d.commutant().distance(&d) < 1e-10);
        let hs = HsModel::new(CMat::identity(2, 2) * c(0.5, 0.0)).unwrap();
        let left = hs.algebra();
        assert!(left.commutant().distance(&hs.right_algebra()) < 1e-10);
        assert!(left.commutant().commutant().distance(&left) < 1e-10);
    }

    #[test]
    fn vector_status_examples() {
        let d = StarAlgebra::diagonal(2);
        let s = 0.5f64.sqrt();
        let st = vector_status(&d, &cv(&[c(s, 0.0), c(s, 0.0)]));
        assert!(st.cyclic && st.separating && st.cross_check);
        let st = vector_status(&d, &cv(&[c(1.0, 0.0), c(0.0, 0.0)]));
        assert!(!st.cyclic && !st.separating && st.cross_check);
        let st = vector_status(&StarAlgebra::full(2), &cv(&[c(1.0, 0.0), c(0.0, 0.0)]));
        assert!(st.cyclic && !st.separating);
    }

    #[test]
    fn abelian_model_trivial_delta() {
        let a = StarAlgebra::diagonal(3);
        let om = cv(&[c(0.5, 0.1), c(-0.3, 0.6), c(0.2, -0.5)]);
        let om = &om / c(om.norm(), 0.0);
        let (md, rep) = tomita_modular(&a, &om).unwrap();
        assert!(md.triple.delta.distance(&RlOperator::identity(3)) < 1e-10);
        assert!(rep.jmj_distance < 1e-8 && rep.j_omega < 1e-10);
    }

    #[test]
    fn hs_model_closed_forms() {
        let d = CMat::from_diagonal(&CVec::from_column_slice(&[c(0.8, 0.0), c(0.2, 0.0)]));
        let hs = HsModel::new(d).unwrap();
        let (md, rep) = tomita_modular(&hs.algebra(), &hs.omega()).unwrap();
        let spec = md.triple.spectrum();
        let want = [0.25, 1.0, 1.0, 4.0];
        assert!(spec.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-10));
        assert!(md.triple.delta.distance(&hs.delta_closed()) < 1e-8);
        assert!(md.triple.j.distance(&hs.j_closed()) < 1e-8);
        assert!(rep.jmj_distance < 1e-8 && rep.flow_residual < 1e-8);
    }

    #[test]
    fn cone_polar_examples() {
        let s = 0.5f64.sqrt();
        let xi = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)]);
        let p = cone_polar(&xi).unwrap();
        assert!((&p.xi_plus - CMat::identity(2, 2) * c(s, 0.0)).norm() < 1e-12);
        assert!((&p.right_unitary - xi * c(2f64.sqrt(), 0.0)).norm() < 1e-12);
        assert!(matches!(cone_polar(&CMat::zeros(2, 2)), Err(Error::NotInvertible)));
        let pos = CMat::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.1, 0.0), c(0.1, 0.0), c(0.3, 0.0)]);
        let p = cone_polar(&pos).unwrap();
        assert!((&p.right_unitary - CMat::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn subalgebra_map_examples() {
        let hs = HsModel::new(CMat::from_diagonal(&CVec::from_column_slice(&[c(0.7, 0.0), c(0.3, 0.0)]))).unwrap();
        let m = hs.algebra();
        let om = hs.omega();
        let scal = StarAlgebra::scalars(4);
        let mut p = CMat::zeros(2, 2);
        p[(0, 0)] = c(1.0, 0.0);
        let diag = StarAlgebra::generate(4, &[CMat::identity(2, 2).kronecker(&p)], 64).unwrap();
        let map = subalgebra_standard_map(&m, &om, &[scal, diag, m.clone()]).unwrap();
        assert_eq!(map.spaces.iter().map(|s| s.dim()).collect::<Vec<_>>(), vec![1, 2, 4]);
        assert_eq!(map.monotone_violations, 0);
        assert!(map.distances[1][2] > 1e-6);
    }

    #[test]
    fn block_algebra_report() {
        let mut rng = trial_rng(3, 0);
        let w = random::unitary(&mut rng, 5);
        let a = block_algebra(&[2, 1], &w);
        assert_eq!(a.dim(), 5);
        let om = random::unit_vector(&mut rng, 5);
        let (md, rep) = tomita_modular(&a, &om).unwrap();
        assert!(rep.jmj_distance < 1e-8 && rep.flow_residual < 1e-8);
        assert_eq!(rep.center_dim, 2);
        assert!(rep.center_residual < 1e-8);
        let vp = md.v.symplectic_complement().unwrap();
        assert!(commutant_space(&a, &om).distance(vp.space()).unwrap() < 1e-8);
    }
}
