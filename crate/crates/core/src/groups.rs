//! Antiunitary representations of finite group pairs (G, G1) with [G : G1] = 2.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, C64};
use crate::realified::{realify, RlOperator};

const SOLVE_TOL: f64 = 1e-9;
const REP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GroupJson {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    pub subgroup_mask: Vec<bool>,
    pub r_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroupPair {
    name: String,
    table: Vec<Vec<usize>>,
    mask: Vec<bool>,
    r: usize,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroupPair {
    pub fn new(name: &str, table: Vec<Vec<usize>>, mask: Vec<bool>, r: usize) -> Result<Self> {
        let n = table.len();
        let bad = |m: &str| Err(Error::InvalidGroup(m.to_string()));
        if n == 0 || n > 64 || mask.len() != n || r >= n {
            return bad("order must be in 1..=64 with matching mask and r");
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return bad("table is not n x n over 0..n");
        }
        let identity = match (0..n).find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x)) {
            Some(e) => e,
            None => return bad("no identity"),
        };
        let mut inverse = vec![0; n];
        for (a, inv) in inverse.iter_mut().enumerate() {
            match (0..n).find(|&b| table[a][b] == identity) {
                Some(b) => *inv = b,
                None => return bad("missing inverse"),
            }
        }
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    if table[table[a][b]][cc] != table[a][table[b][cc]] {
                        return bad("not associative");
                    }
                }
            }
        }
        let count = mask.iter().filter(|&&m| m).count();
        if 2 * count != n || !mask[identity] || mask[r] {
            return bad("subgroup must have index 2, contain e and exclude r");
        }
        for a in 0..n {
            for b in 0..n {
                if mask[a] && mask[b] && !mask[table[a][b]] {
                    return bad("subgroup not closed");
                }
            }
        }
        let pair = FiniteGroupPair { name: name.to_string(), table, mask, r, identity, inverse };
        if pair.g1().any(|g| !pair.in_g1(pair.tau(g))) {
            return bad("conjugation by r does not preserve G1");
        }
        Ok(pair)
    }

    pub fn from_json(j: &GroupJson) -> Result<Self> {
        if j.order != j.table.len() {
            return Err(Error::InvalidGroup("order does not match table".into()));
        }
        FiniteGroupPair::new("custom", j.table.clone(), j.subgroup_mask.clone(), j.r_index)
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson {
            order: self.order(),
            table: self.table.clone(),
            subgroup_mask: self.mask.clone(),
            r_index: self.r,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn in_g1(&self, g: usize) -> bool {
        self.mask[g]
    }

    pub fn g1(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.order()).filter(|&g| self.mask[g])
    }

    /// tau(g) = r g r^{-1}.
    pub fn tau(&self, g: usize) -> usize {
        self.mul(self.mul(self.r, g), self.inv(self.r))
    }

    pub fn r_squared(&self) -> usize {
        self.mul(self.r, self.r)
    }

    /// (Z_2, {e}).
    pub fn z2_trivial() -> Self {
        Self::cyclic_pair(1)
    }

    /// (Z_{2n}, Z_n) with r the generator; n = 2 gives (Z_4, Z_2).
    pub fn cyclic_pair(n: usize) -> Self {
        let m = 2 * n;
        let table = (0..m).map(|a| (0..m).map(|b| (a + b) % m).collect()).collect();
        let mask = (0..m).map(|a| a % 2 == 0).collect();
        Self::new(&format!("cyclic:{n}"), table, mask, 1).expect("cyclic preset")
    }

    /// Dihedral D_n with rotations as G1 and r a reflection; tau is inversion. D_3 = S_3.
    pub fn dihedral(n: usize) -> Self {
        let idx = |k: usize, s: usize| k + n * s;
        let mut table = vec![vec![0; 2 * n]; 2 * n];
        for (a, s) in (0..n).flat_map(|a| [(a, 0), (a, 1)]) {
            for (b, t) in (0..n).flat_map(|b| [(b, 0), (b, 1)]) {
                let k = if s == 0 { (a + b) % n } else { (a + n - b) % n };
                table[idx(a, s)][idx(b, t)] = idx(k, (s + t) % 2);
            }
        }
        let mask = (0..2 * n).map(|g| g < n).collect();
        Self::new(&format!("dihedral:{n}"), table, mask, idx(0, 1)).expect("dihedral preset")
    }

    /// Z_n x Z_2 with tau = id.
    pub fn cyclic_times_z2(n: usize) -> Self {
        let idx = |k: usize, s: usize| k + n * s;
        let mut table = vec![vec![0; 2 * n]; 2 * n];
        for g in 0..2 * n {
            for h in 0..2 * n {
                table[g][h] = idx((g % n + h % n) % n, (g / n + h / n) % 2);
            }
        }
        let mask = (0..2 * n).map(|g| g < n).collect();
        Self::new(&format!("cyclic-x-z2:{n}"), table, mask, idx(0, 1)).expect("product preset")
    }

    /// Q_8 x Z_2 with tau = id. Element u + 4 s + 8 t encodes (-1)^s u in {1, i, j, k}, t in Z_2.
    pub fn q8_times_z2() -> Self {
        // unit products: (sign, unit) of u*v for u, v in {1, i, j, k}
        const UNIT: [[(usize, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        let mut table = vec![vec![0; 16]; 16];
        for g in 0..16 {
            for h in 0..16 {
                let (ug, sg, tg) = (g % 4, (g / 4) % 2, g / 8);
                let (uh, sh, th) = (h % 4, (h / 4) % 2, h / 8);
                let (s, u) = UNIT[ug][uh];
                table[g][h] = u + 4 * ((s + sg + sh) % 2) + 8 * ((tg + th) % 2);
            }
        }
        let mask = (0..16).map(|g| g < 8).collect();
        Self::new("q8-x-z2", table, mask, 8).expect("q8 preset")
    }

    /// Parses preset names: z2, z4, cyclic:N, dihedral:N, s3, cyclic-x-z2:N, q8-x-z2.
    pub fn preset(name: &str) -> Result<Self> {
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (name, None),
        };
        let num = |default: usize| -> Result<usize> {
            match arg {
                None => Ok(default),
                Some(a) => a
                    .parse::<usize>()
                    .ok()
                    .filter(|&n| (1..=32).contains(&n))
                    .ok_or_else(|| Error::InvalidGroup(format!("bad preset argument {a}"))),
            }
        };
        match head {
            "z2" => Ok(Self::z2_trivial()),
            "z4" => Ok(Self::cyclic_pair(2)),
            "cyclic" => Ok(Self::cyclic_pair(num(2)?)),
            "s3" => Ok(Self::dihedral(3)),
            "dihedral" => Ok(Self::dihedral(num(3)?.max(2))),
            "cyclic-x-z2" => Ok(Self::cyclic_times_z2(num(3)?)),
            "q8-x-z2" => Ok(Self::q8_times_z2()),
            _ => Err(Error::InvalidGroup(format!("unknown preset {name}"))),
        }
    }
}

/// Unitary representation of G1, keyed by element index.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgroupRep {
    dim: usize,
    mats: BTreeMap<usize, CMat>,
}

impl SubgroupRep {
    /// Closes generator images under products; inconsistent images are rejected.
    pub fn from_generators(pair: &FiniteGroupPair, gens: &[(usize, CMat)]) -> Result<Self> {
        let dim = gens.first().map(|g| g.1.nrows()).unwrap_or(1);
        let mut mats = BTreeMap::new();
        mats.insert(pair.identity(), CMat::identity(dim, dim));
        let mut queue = VecDeque::from([pair.identity()]);
        while let Some(x) = queue.pop_front() {
            let ux = mats[&x].clone();
            for (g, m) in gens {
                if *g >= pair.order() || !pair.in_g1(*g) || m.shape() != (dim, dim) {
                    return Err(Error::InvalidRep("generator outside G1 or wrong size".into()));
                }
                let y = pair.mul(*g, x);
                let uy = m * &ux;
                match mats.get(&y) {
                    Some(prev) => {
                        let r = (prev - &uy).norm();
                        if r > 1e-9 {
                            return Err(Error::InvalidRep(format!("inconsistent images (residual {r:.2e})")));
                        }
                    }
                    None => {
                        mats.insert(y, uy);
                        queue.push_back(y);
                    }
                }
            }
        }
        if mats.len() != pair.g1().count() {
            return Err(Error::InvalidRep("generators do not generate G1".into()));
        }
        let rep = SubgroupRep { dim, mats };
        rep.validate(pair)?;
        Ok(rep)
    }

    pub fn validate(&self, pair: &FiniteGroupPair) -> Result<()> {
        for (&a, ua) in &self.mats {
            let unit = (ua.adjoint() * ua - CMat::identity(self.dim, self.dim)).norm();
            if unit > REP_TOL {
                return Err(Error::InvalidRep(format!("U_{a} not unitary ({unit:.2e})")));
            }
            for (&b, ub) in &self.mats {
                let r = (ua * ub - &self.mats[&pair.mul(a, b)]).norm();
                if r > REP_TOL {
                    return Err(Error::InvalidRep(format!("homomorphism residual {r:.2e}")));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, g: usize) -> &CMat {
        &self.mats[&g]
    }

    pub fn elements(&self) -> impl Iterator<Item = (&usize, &CMat)> {
        self.mats.iter()
    }

    /// Q^* U Q on an invariant subspace with orthonormal basis Q.
    pub fn restrict(&self, q: &CMat) -> SubgroupRep {
        let mats = self.mats.iter().map(|(&g, m)| (g, q.adjoint() * m * q)).collect();
        SubgroupRep { dim: q.ncols(), mats }
    }

    /// W U W^* for a unitary W.
    pub fn conjugate_by(&self, w: &CMat) -> SubgroupRep {
        let mats = self.mats.iter().map(|(&g, m)| (g, w * m * w.adjoint())).collect();
        SubgroupRep { dim: self.dim, mats }
    }

    /// U^* o tau: g -> conj(U_{tau g}).
    pub fn dual_twisted(&self, pair: &FiniteGroupPair) -> SubgroupRep {
        let mats = self.mats.keys().map(|&g| (g, self.mats[&pair.tau(g)].map(|z| z.conj()))).collect();
        SubgroupRep { dim: self.dim, mats }
    }

    /// Complex dimension of the commutant U_{G1}'.
    pub fn commutant_dim_c(&self) -> usize {
        let n = self.dim;
        let sols = real_solutions(n, n, |a| self.mats.values().map(|m| a * m - m * a).collect());
        sols.len() / 2
    }

    pub fn commutant_basis_c(&self) -> Vec<CMat> {
        let n = self.dim;
        let sols = real_solutions(n, n, |a| self.mats.values().map(|m| a * m - m * a).collect());
        complex_span(&sols)
    }
}

/// Character of a cyclic-generated G1: generator -> e^{2 pi i k / order}.
pub fn character(pair: &FiniteGroupPair, generator: usize, k: i64, order: usize) -> Result<SubgroupRep> {
    let phase = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / order as f64);
    SubgroupRep::from_generators(pair, &[(generator, CMat::from_element(1, 1, phase))])
}

/// The 2-dim irrep of Q_8 inside q8_times_z2 (i -> diag(i, -i), j -> [[0,1],[-1,0]]).
pub fn q8_irrep(pair: &FiniteGroupPair) -> Result<SubgroupRep> {
    let i = CMat::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]);
    let j = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
    SubgroupRep::from_generators(pair, &[(1, i), (2, j)])
}

/// Real basis of the solution space of a real-linear map on n x m complex matrices.
fn real_solutions(n: usize, m: usize, f: impl Fn(&CMat) -> Vec<CMat>) -> Vec<CMat> {
    let unknowns = 2 * n * m;
    let unit = |k: usize| {
        let mut e = CMat::zeros(n, m);
        let (pos, imag) = (k % (n * m), k >= n * m);
        e[(pos % n, pos / n)] = if imag { c(0.0, 1.0) } else { c(1.0, 0.0) };
        e
    };
    let cols: Vec<Vec<f64>> = (0..unknowns)
        .map(|k| f(&unit(k)).iter().flat_map(|r| r.iter().flat_map(|z| [z.re, z.im]).collect::<Vec<_>>()).collect())
        .collect();
    let rows = cols.first().map(|c| c.len()).unwrap_or(0);
    let a = linalg::RMat::from_fn(rows, unknowns, |i, j| cols[j][i]);
    let ker = linalg::nullspace(&a, SOLVE_TOL);
    (0..ker.ncols())
        .map(|col| {
            CMat::from_fn(n, m, |i, j| {
                let pos = i + n * j;
                c(ker[(pos, col)], ker[(n * m + pos, col)])
            })
        })
        .collect()
}

/// Orthonormal complex basis of the complex span of a list of matrices.
fn complex_span(list: &[CMat]) -> Vec<CMat> {
    if list.is_empty() {
        return Vec::new();
    }
    let (n, m) = list[0].shape();
    let stacked = CMat::from_fn(n * m, list.len(), |p, k| list[k][(p % n, p / n)]);
    let q = linalg::orth_c(&stacked, 1e-8);
    (0..q.ncols()).map(|k| CMat::from_fn(n, m, |i, j| q[(i + n * j, k)])).collect()
}

/// Antiunitary representation: each element carries M_g with U_g = M_g or U_g = M_g K.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteAntiunitaryRep {
    dim: usize,
    mats: Vec<CMat>,
    anti: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RepElementJson {
    pub index: usize,
    pub antilinear: bool,
    pub matrix: serde_json::Value,
}

impl FiniteAntiunitaryRep {
    pub fn new(pair: &FiniteGroupPair, mats: Vec<CMat>) -> Result<Self> {
        if mats.len() != pair.order() {
            return Err(Error::InvalidRep("one matrix per element required".into()));
        }
        let dim = mats[0].nrows();
        let anti = (0..pair.order()).map(|g| !pair.in_g1(g)).collect();
        let rep = FiniteAntiunitaryRep { dim, mats, anti };
        let r = rep.homomorphism_residual(pair);
        if r > REP_TOL {
            return Err(Error::InvalidRep(format!("homomorphism residual {r:.2e}")));
        }
        Ok(rep)
    }

    /// U_{h r} = U_h Phi with Phi = phi K.
    pub fn from_subgroup_and_phi(pair: &FiniteGroupPair, u: &SubgroupRep, phi: &CMat) -> Result<Self> {
        let rinv = pair.inv(pair.r());
        let mats = (0..pair.order())
            .map(|g| if pair.in_g1(g) { u.get(g).clone() } else { u.get(pair.mul(g, rinv)) * phi })
            .collect();
        FiniteAntiunitaryRep::new(pair, mats)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &CMat {
        &self.mats[g]
    }

    pub fn is_antilinear(&self, g: usize) -> bool {
        self.anti[g]
    }

    pub fn operator(&self, g: usize) -> RlOperator {
        if self.anti[g] {
            RlOperator::antilinear(&self.mats[g])
        } else {
            RlOperator::complex_linear(&self.mats[g])
        }
    }

    fn product(&self, a: usize, b: usize) -> CMat {
        if self.anti[a] {
            &self.mats[a] * self.mats[b].map(|z| z.conj())
        } else {
            &self.mats[a] * &self.mats[b]
        }
    }

    pub fn homomorphism_residual(&self, pair: &FiniteGroupPair) -> f64 {
        let n = pair.order();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            let unit = (self.mats[a].adjoint() * &self.mats[a] - CMat::identity(self.dim, self.dim)).norm();
            worst = worst.max(unit);
            for b in 0..n {
                worst = worst.max((self.product(a, b) - &self.mats[pair.mul(a, b)]).norm());
            }
        }
        worst
    }

    pub fn restrict(&self, pair: &FiniteGroupPair) -> SubgroupRep {
        let mats = pair.g1().map(|g| (g, self.mats[g].clone())).collect();
        SubgroupRep { dim: self.dim, mats }
    }

    /// W U_g W^* for a unitary W.
    pub fn conjugate_by(&self, w: &CMat) -> FiniteAntiunitaryRep {
        let wt = w.transpose();
        let mats = self
            .mats
            .iter()
            .zip(&self.anti)
            .map(|(m, &a)| if a { w * m * &wt } else { w * m * w.adjoint() })
            .collect();
        FiniteAntiunitaryRep { dim: self.dim, mats, anti: self.anti.clone() }
    }

    pub fn to_json(&self) -> Vec<RepElementJson> {
        self.mats
            .iter()
            .enumerate()
            .map(|(g, m)| RepElementJson {
                index: g,
                antilinear: self.anti[g],
                matrix: crate::json::complex_matrix(m),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Division {
    Real,
    Complex,
    Quaternionic,
    Reducible,
}

#[derive(Debug, Clone)]
pub struct CommutantReport {
    pub basis: Vec<CMat>,
    pub real_dim: usize,
    pub hermitian_dim: usize,
    pub class: Division,
    pub subgroup_dim_c: usize,
    pub complexification_ok: bool,
}

/// U_G' as a real algebra, classified as R, C, H or reducible.
pub fn commutant_classify(pair: &FiniteGroupPair, rep: &FiniteAntiunitaryRep) -> Result<CommutantReport> {
    let r = rep.homomorphism_residual(pair);
    if r > REP_TOL {
        return Err(Error::InvalidRep(format!("homomorphism residual {r:.2e}")));
    }
    let n = rep.dim();
    let basis = real_solutions(n, n, |a| {
        (0..pair.order())
            .map(|g| {
                let m = rep.matrix(g);
                if rep.is_antilinear(g) {
                    a * m - m * a.map(|z| z.conj())
                } else {
                    a * m - m * a
                }
            })
            .collect()
    });
    let herm: Vec<CMat> = basis.iter().map(|a| (a + a.adjoint()) * c(0.5, 0.0)).collect();
    let hermitian_dim = real_rank(&herm);
    let real_dim = basis.len();
    let class = match (real_dim, hermitian_dim) {
        (1, 1) => Division::Real,
        (2, 1) => Division::Complex,
        (4, 1) => Division::Quaternionic,
        _ => Division::Reducible,
    };
    let subgroup_dim_c = rep.restrict(pair).commutant_dim_c();
    Ok(CommutantReport {
        basis,
        real_dim,
        hermitian_dim,
        class,
        subgroup_dim_c,
        complexification_ok: subgroup_dim_c == real_dim,
    })
}

fn real_rank(list: &[CMat]) -> usize {
    if list.is_empty() {
        return 0;
    }
    let (n, m) = list[0].shape();
    let a = linalg::RMat::from_fn(2 * n * m, list.len(), |p, k| {
        let z = list[k][((p / 2) % n, (p / 2) / n)];
        if p % 2 == 0 { z.re } else { z.im }
    });
    linalg::orth(&a, 1e-8).ncols()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RepType {
    Real,
    Complex,
    Quaternionic,
}

#[derive(Debug, Clone)]
pub struct TypeReport {
    pub kind: RepType,
    /// Phi = phi K, unitary, when the intertwiner solve succeeds.
    pub phi: Option<CMat>,
    pub kernel_dim: usize,
    pub square_residual: f64,
}

/// Fixes the phase of a matrix so its first dominant entry is real positive.
fn canonical_phase(m: &CMat) -> CMat {
    let big = m.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let pivot = m.iter().find(|z| z.norm() > 0.5 * big).copied().unwrap_or(c(1.0, 0.0));
    m * (pivot.conj() / pivot.norm())
}

/// Nearest unitary (polar factor).
fn unitary_part(m: &CMat) -> CMat {
    crate::linalg::polar_unitary(m)
}

/// Real, complex or quaternionic type of an irreducible U of G1 relative to tau.
pub fn classify_type(pair: &FiniteGroupPair, u: &SubgroupRep) -> Result<TypeReport> {
    let cd = u.commutant_dim_c();
    if cd != 1 {
        return Err(Error::NotIrreducible(cd));
    }
    let n = u.dim();
    let sols = real_solutions(n, n, |m| {
        pair.g1().map(|g| m * u.get(g).map(|z| z.conj()) - u.get(pair.tau(g)) * m).collect()
    });
    let kernel_dim = sols.len();
    if kernel_dim == 0 {
        return Ok(TypeReport { kind: RepType::Complex, phi: None, kernel_dim, square_residual: 0.0 });
    }
    if kernel_dim != 2 {
        return Err(Error::InvalidRep(format!("intertwiner kernel has real dimension {kernel_dim}")));
    }
    let phi = canonical_phase(&unitary_part(&sols[0]));
    let sq = &phi * phi.map(|z| z.conj());
    let ur2 = u.get(pair.r_squared());
    let plus = (&sq - ur2).norm();
    let minus = (&sq + ur2).norm();
    let (kind, square_residual) = if plus < 1e-8 {
        (RepType::Real, plus)
    } else if minus < 1e-8 {
        (RepType::Quaternionic, minus)
    } else {
        return Err(Error::InvalidRep(format!("Phi^2 is not +-U_(r^2) ({plus:.2e}, {minus:.2e})")));
    };
    Ok(TypeReport { kind, phi: Some(phi), kernel_dim, square_residual })
}

/// Rescales Phi by a function of Phi^2 so that the result J satisfies J^4 = 1.
/// Returns (J, ||J^4 - 1||, max_g ||J U_g J^{-1} - U_{tau g}||).
pub fn fourth_root_normalize(pair: &FiniteGroupPair, u: &SubgroupRep, phi: &CMat) -> (CMat, f64, f64) {
    let n = phi.nrows();
    let sq = phi * phi.map(|z| z.conj());
    let (q, t) = sq.clone().schur().unpack();
    let diag = CMat::from_diagonal(&t.diagonal().map(|z| {
        if (z + c(1.0, 0.0)).norm() < 1e-8 {
            c(1.0, 0.0)
        } else {
            z.sqrt()
        }
    }));
    let a = &q * diag * q.adjoint();
    let ainv = a.clone().try_inverse().unwrap_or_else(|| CMat::identity(n, n));
    let j = ainv * phi;
    let jc = j.map(|z| z.conj());
    let j2 = &j * &jc;
    let j4 = (&j2 * &j2 - CMat::identity(n, n)).norm();
    let cov = pair
        .g1()
        .map(|g| (&j * u.get(g).map(|z| z.conj()) - u.get(pair.tau(g)) * &j).norm())
        .fold(0.0, f64::max);
    (j, j4, cov)
}

#[derive(Debug, Clone)]
pub struct Extension {
    pub rep: FiniteAntiunitaryRep,
    pub doubled: bool,
    pub block_types: Vec<RepType>,
}

/// Splits a unitary representation into irreducible blocks (orthonormal bases).
pub fn decompose(u: &SubgroupRep, seed: u64) -> Vec<CMat> {
    let n = u.dim();
    let basis = u.commutant_basis_c();
    if basis.len() <= 1 {
        return vec![CMat::identity(n, n)];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = CMat::zeros(n, n);
    for a in &basis {
        let w = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        h += a * w;
    }
    let h = (&h + h.adjoint()) * c(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut blocks = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eig.eigenvalues[order[end]] - eig.eigenvalues[order[start]]).abs() < 1e-6 {
            end += 1;
        }
        let q = CMat::from_fn(n, end - start, |i, k| eig.eigenvectors[(i, order[start + k])]);
        let sub = u.restrict(&q);
        if sub.commutant_dim_c() == 1 {
            blocks.push(q);
        } else {
            for inner in decompose(&sub, seed.wrapping_add(1)) {
                blocks.push(&q * inner);
            }
        }
        start = end;
    }
    blocks
}

/// Extends U to G: on the same space when every irreducible block is of real type,
/// otherwise on H + H* via V = U + U* o tau.
pub fn extend_representation(pair: &FiniteGroupPair, u: &SubgroupRep) -> Result<Extension> {
    u.validate(pair)?;
    let n = u.dim();
    let blocks = decompose(u, 0x5eed);
    let mut types = Vec::new();
    let mut phi = CMat::zeros(n, n);
    for q in &blocks {
        let t = classify_type(pair, &u.restrict(q))?;
        types.push(t.kind);
        if let Some(p) = &t.phi {
            phi += q * p * q.transpose();
        }
    }
    if types.iter().all(|&t| t == RepType::Real) {
        let rep = FiniteAntiunitaryRep::from_subgroup_and_phi(pair, u, &phi)?;
        return Ok(Extension { rep, doubled: false, block_types: types });
    }
    Ok(Extension { rep: doubled_extension(pair, u)?, doubled: true, block_types: types })
}

/// V_g = diag(U_g, conj U_{tau g}), J(v, l) = (conj l, conj(U_{r^2} v)).
pub fn doubled_extension(pair: &FiniteGroupPair, u: &SubgroupRep) -> Result<FiniteAntiunitaryRep> {
    let n = u.dim();
    let mut v = SubgroupRep { dim: 2 * n, mats: BTreeMap::new() };
    for g in pair.g1() {
        let mut m = CMat::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(u.get(g));
        m.view_mut((n, n), (n, n)).copy_from(&u.get(pair.tau(g)).map(|z| z.conj()));
        v.mats.insert(g, m);
    }
    let mut j = CMat::zeros(2 * n, 2 * n);
    j.view_mut((0, n), (n, n)).copy_from(&CMat::identity(n, n));
    j.view_mut((n, 0), (n, n)).copy_from(&u.get(pair.r_squared()).map(|z| z.conj()));
    FiniteAntiunitaryRep::from_subgroup_and_phi(pair, &v, &j)
}

#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub intertwiner: Option<CMat>,
    pub residual: f64,
    pub g1_equivalent: bool,
    pub g1_residual: f64,
    pub agree: bool,
}

fn search_intertwiner(
    n: usize,
    sols: Vec<CMat>,
    check: impl Fn(&CMat) -> f64,
    seed: u64,
) -> (Option<CMat>, f64) {
    if sols.is_empty() {
        return (None, f64::INFINITY);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (None, f64::INFINITY);
    for _ in 0..4 {
        let mut psi = CMat::zeros(n, n);
        for s in &sols {
            psi += s * c(rng.random_range(-1.0..1.0), 0.0);
        }
        let sv = crate::linalg::singular_values(&psi);
        let (lo, hi) = (sv[sv.len() - 1], sv[0]);
        if hi == 0.0 || lo < 1e-6 * hi {
            continue;
        }
        let w = unitary_part(&psi);
        let r = check(&w);
        if r < best.1 {
            best = (Some(w), r);
        }
    }
    best
}

/// Searches for a unitary intertwiner over G and, independently, over G1.
pub fn are_equivalent(
    pair: &FiniteGroupPair,
    a: &FiniteAntiunitaryRep,
    b: &FiniteAntiunitaryRep,
) -> Result<EquivalenceReport> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let n = a.dim();
    let full = |psi: &CMat| -> Vec<CMat> {
        (0..pair.order())
            .map(|g| {
                if a.is_antilinear(g) {
                    psi * a.matrix(g) - b.matrix(g) * psi.map(|z| z.conj())
                } else {
                    psi * a.matrix(g) - b.matrix(g) * psi
                }
            })
            .collect()
    };
    let sub = |psi: &CMat| -> Vec<CMat> { pair.g1().map(|g| psi * a.matrix(g) - b.matrix(g) * psi).collect() };
    let worst = |f: &dyn Fn(&CMat) -> Vec<CMat>, w: &CMat| f(w).iter().map(|m| m.norm()).fold(0.0, f64::max);
    let (intertwiner, residual) = search_intertwiner(n, real_solutions(n, n, full), |w| worst(&full, w), 11);
    let (_, g1_residual) = search_intertwiner(n, real_solutions(n, n, sub), |w| worst(&sub, w), 13);
    let equivalent = residual < 1e-8;
    let g1_equivalent = g1_residual < 1e-8;
    Ok(EquivalenceReport {
        equivalent,
        intertwiner,
        residual,
        g1_equivalent,
        g1_residual,
        agree: equivalent == g1_equivalent,
    })
}

/// Brute-force real dimension of U_G' from real 2n x 2n matrices commuting with i and all U_g.
pub fn brute_force_commutant_dim(pair: &FiniteGroupPair, rep: &FiniteAntiunitaryRep) -> usize {
    let n = 2 * rep.dim();
    let mut ops: Vec<linalg::RMat> = (0..pair.order()).map(|g| rep.operator(g).into_matrix()).collect();
    ops.push(realify(&CMat::from_diagonal_element(rep.dim(), rep.dim(), c(0.0, 1.0))));
    let rows = ops.len() * n * n;
    let mut a = linalg::RMat::zeros(rows, n * n);
    for k in 0..n * n {
        let mut e = linalg::RMat::zeros(n, n);
        e[(k % n, k / n)] = 1.0;
        for (o, u) in ops.iter().enumerate() {
            let r = &e * u - u * &e;
            for (p, x) in r.iter().enumerate() {
                a[(o * n * n + p, k)] = *x;
            }
        }
    }
    linalg::nullspace(&a, SOLVE_TOL).ncols()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(v: [C64; 4]) -> CMat {
        CMat::from_row_slice(2, 2, &v)
    }

    #[test]
    fn presets_validate() {
        for name in ["z2", "z4", "cyclic:4", "s3", "dihedral:5", "cyclic-x-z2:3", "q8-x-z2"] {
            let p = FiniteGroupPair::preset(name).unwrap();
            assert_eq!(FiniteGroupPair::from_json(&p.to_json()).unwrap().order(), p.order());
        }
        assert!(FiniteGroupPair::preset("nope").is_err());
    }

    #[test]
    fn z2_conjugation_is_real() {
        let p = FiniteGroupPair::z2_trivial();
        let triv = SubgroupRep::from_generators(&p, &[]).unwrap();
        let ext = extend_representation(&p, &triv).unwrap();
        assert!(!ext.doubled);
        assert!((ext.rep.matrix(1) - CMat::identity(1, 1)).norm() < 1e-12);
        let rep = commutant_classify(&p, &ext.rep).unwrap();
        assert_eq!(rep.class, Division::Real);
    }

    #[test]
    fn z4_anticonjugation_is_quaternionic() {
        let p = FiniteGroupPair::cyclic_pair(2);
        let o = c(0.0, 0.0);
        let phi = m2([o, c(-1.0, 0.0), c(1.0, 0.0), o]);
        let u = SubgroupRep::from_generators(&p, &[(2, CMat::identity(2, 2) * c(-1.0, 0.0))]).unwrap();
        let rep = FiniteAntiunitaryRep::from_subgroup_and_phi(&p, &u, &phi).unwrap();
        let cr = commutant_classify(&p, &rep).unwrap();
        assert_eq!(cr.class, Division::Quaternionic);
        assert_eq!(cr.subgroup_dim_c, 4);
        assert!(cr.complexification_ok);
    }

    #[test]
    fn z8_example_is_complex() {
        let p = FiniteGroupPair::cyclic_pair(4);
        let o = c(0.0, 0.0);
        let phi = m2([o, c(0.0, 1.0), c(1.0, 0.0), o]);
        let gen = m2([c(0.0, 1.0), o, o, c(0.0, -1.0)]);
        let u = SubgroupRep::from_generators(&p, &[(2, gen)]).unwrap();
        let rep = FiniteAntiunitaryRep::from_subgroup_and_phi(&p, &u, &phi).unwrap();
        let cr = commutant_classify(&p, &rep).unwrap();
        assert_eq!(cr.class, Division::Complex);
        assert_eq!(cr.subgroup_dim_c, 2);
        let (j, j4, _) = fourth_root_normalize(&p, &u, &phi);
        assert!(j4 < 1e-10);
        assert!((&j * j.adjoint() - CMat::identity(2, 2)).norm() < 1e-10);
    }

    #[test]
    fn trichotomy() {
        let s3 = FiniteGroupPair::dihedral(3);
        let chi = character(&s3, 1, 1, 3).unwrap();
        assert_eq!(classify_type(&s3, &chi).unwrap().kind, RepType::Real);

        let z3 = FiniteGroupPair::cyclic_times_z2(3);
        let chi = character(&z3, 1, 1, 3).unwrap();
        assert_eq!(classify_type(&z3, &chi).unwrap().kind, RepType::Complex);
        let ext = extend_representation(&z3, &chi).unwrap();
        assert!(ext.doubled);
        let cr = commutant_classify(&z3, &ext.rep).unwrap();
        assert_eq!((cr.class, cr.real_dim), (Division::Complex, 2));
        assert_eq!(brute_force_commutant_dim(&z3, &ext.rep), 2);

        let q = FiniteGroupPair::q8_times_z2();
        let u = q8_irrep(&q).unwrap();
        assert_eq!(classify_type(&q, &u).unwrap().kind, RepType::Quaternionic);
        let ext = extend_representation(&q, &u).unwrap();
        assert_eq!(ext.rep.dim(), 4);
        let cr = commutant_classify(&q, &ext.rep).unwrap();
        assert_eq!((cr.class, cr.real_dim), (Division::Quaternionic, 4));
        assert_eq!(brute_force_commutant_dim(&q, &ext.rep), 4);
    }

    #[test]
    fn abelian_inversion_always_real() {
        for n in 2..7 {
            let p = FiniteGroupPair::dihedral(n);
            for k in 0..n as i64 {
                let chi = character(&p, 1, k, n).unwrap();
                assert_eq!(classify_type(&p, &chi).unwrap().kind, RepType::Real);
            }
        }
    }

    #[test]
    fn phase_changed_extensions_equivalent() {
        let p = FiniteGroupPair::dihedral(3);
        let chi = character(&p, 1, 1, 3).unwrap();
        let a = extend_representation(&p, &chi).unwrap().rep;
        let phi = a.matrix(p.r()) * C64::from_polar(1.0, 0.9);
        let b = FiniteAntiunitaryRep::from_subgroup_and_phi(&p, &chi, &phi).unwrap();
        let eq = are_equivalent(&p, &a, &b).unwrap();
        assert!(eq.equivalent && eq.agree && eq.residual < 1e-8);
    }

    #[test]
    fn doubled_conjugate_characters_equivalent() {
        let p = FiniteGroupPair::cyclic_times_z2(3);
        let a = doubled_extension(&p, &character(&p, 1, 1, 3).unwrap()).unwrap();
        let b = doubled_extension(&p, &character(&p, 1, 2, 3).unwrap()).unwrap();
        let eq = are_equivalent(&p, &a, &b).unwrap();
        assert!(eq.equivalent && eq.agree);
        let c2 = doubled_extension(&p, &character(&p, 1, 0, 3).unwrap()).unwrap();
        let eq = are_equivalent(&p, &a, &c2).unwrap();
        assert!(!eq.equivalent && eq.agree);
    }

    #[test]
    fn reducible_real_blocks_extend_in_place() {
        let p = FiniteGroupPair::dihedral(4);
        let o = c(0.0, 0.0);
        let g = m2([c(0.0, 1.0), o, o, c(-1.0, 0.0)]);
        let u = SubgroupRep::from_generators(&p, &[(1, g)]).unwrap();
        let ext = extend_representation(&p, &u).unwrap();
        assert!(!ext.doubled);
        assert_eq!(ext.block_types.len(), 2);
        assert_eq!(&ext.rep.restrict(&p), &u);
    }
}
