//! Minkowski space R^{1,d-1}: Poincare elements, wedges, reflections, causal complements.

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::linalg::{self, RMat, RVec};
use crate::random::{self, TrialRng};

const METRIC_TOL: f64 = 1e-10;
const LIGHT_TOL: f64 = 1e-9;

/// [x, y] = x0 y0 - x.y
pub fn minkowski(x: &RVec, y: &RVec) -> f64 {
    x[0] * y[0] - x.rows(1, x.len() - 1).dot(&y.rows(1, y.len() - 1))
}

pub fn eta(d: usize) -> RMat {
    RMat::from_diagonal(&RVec::from_fn(d, |i, _| if i == 0 { 1.0 } else { -1.0 }))
}

/// Boost generator b0 = E10 + E01.
pub fn boost_generator(d: usize) -> RMat {
    let mut b = RMat::zeros(d, d);
    b[(0, 1)] = 1.0;
    b[(1, 0)] = 1.0;
    b
}

pub fn lightlike(d: usize, sign: f64) -> RVec {
    let mut v = RVec::zeros(d);
    v[0] = 1.0;
    v[1] = sign;
    v
}

fn diag_flip(d: usize, flips: &[usize]) -> RMat {
    RMat::from_diagonal(&RVec::from_fn(d, |i, _| if flips.contains(&i) { -1.0 } else { 1.0 }))
}

/// (b, a): x -> a x + b.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincareElement {
    pub translation: RVec,
    pub lorentz: RMat,
}

impl PoincareElement {
    pub fn new(translation: RVec, lorentz: RMat) -> Result<Self> {
        let d = translation.len();
        if !(2..=6).contains(&d) || lorentz.shape() != (d, d) {
            return Err(Error::DimensionMismatch { expected: d, got: lorentz.nrows() });
        }
        let g = PoincareElement { translation, lorentz };
        let r = g.metric_residual();
        if r > METRIC_TOL {
            return Err(Error::NotLorentz(r));
        }
        Ok(g)
    }

    pub fn identity(d: usize) -> Self {
        PoincareElement { translation: RVec::zeros(d), lorentz: RMat::identity(d, d) }
    }

    pub fn translation(b: RVec) -> Self {
        let d = b.len();
        PoincareElement { translation: b, lorentz: RMat::identity(d, d) }
    }

    pub fn lorentz(a: RMat) -> Result<Self> {
        let d = a.nrows();
        PoincareElement::new(RVec::zeros(d), a)
    }

    /// exp(s b0).
    pub fn boost(d: usize, s: f64) -> Self {
        let mut a = RMat::identity(d, d);
        a[(0, 0)] = s.cosh();
        a[(1, 1)] = s.cosh();
        a[(0, 1)] = s.sinh();
        a[(1, 0)] = s.sinh();
        PoincareElement { translation: RVec::zeros(d), lorentz: a }
    }

    /// R01 = diag(-1, -1, 1, ..., 1).
    pub fn r01(d: usize) -> Self {
        PoincareElement { translation: RVec::zeros(d), lorentz: diag_flip(d, &[0, 1]) }
    }

    /// Time reversal diag(-1, 1, ..., 1), the reflection stabilizing W_R.
    pub fn time_reversal(d: usize) -> Self {
        PoincareElement { translation: RVec::zeros(d), lorentz: diag_flip(d, &[0]) }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn metric_residual(&self) -> f64 {
        let e = eta(self.dim());
        (self.lorentz.transpose() * &e * &self.lorentz - e).norm()
    }

    pub fn compose(&self, other: &PoincareElement) -> PoincareElement {
        PoincareElement {
            translation: &self.translation + &self.lorentz * &other.translation,
            lorentz: &self.lorentz * &other.lorentz,
        }
    }

    /// a^{-1} = eta a^T eta.
    pub fn inverse(&self) -> PoincareElement {
        let e = eta(self.dim());
        let ainv = &e * self.lorentz.transpose() * &e;
        PoincareElement { translation: -(&ainv * &self.translation), lorentz: ainv }
    }

    pub fn apply(&self, x: &RVec) -> RVec {
        &self.lorentz * x + &self.translation
    }

    pub fn is_orthochronous(&self) -> bool {
        self.lorentz[(0, 0)] > 0.0
    }

    pub fn is_proper(&self) -> bool {
        self.lorentz.determinant() > 0.0
    }

    pub fn distance(&self, other: &PoincareElement) -> f64 {
        (&self.lorentz - &other.lorentz).norm() + (&self.translation - &other.translation).norm()
    }

    /// Random element of the proper orthochronous group.
    pub fn random(rng: &mut TrialRng, d: usize, spread: f64) -> Self {
        let rot = |rng: &mut TrialRng| {
            let mut q = random::real_matrix(rng, d - 1, d - 1).qr().q();
            if q.determinant() < 0.0 {
                q.column_mut(0).neg_mut();
            }
            let mut a = RMat::identity(d, d);
            a.view_mut((1, 1), (d - 1, d - 1)).copy_from(&q);
            a
        };
        let a = rot(rng) * PoincareElement::boost(d, spread * random::normal(rng)).lorentz * rot(rng);
        let b = RVec::from_fn(d, |_, _| spread * random::normal(rng));
        PoincareElement { translation: b, lorentz: a }
    }
}

fn in_closed_future(y: &RVec, tol: f64) -> bool {
    y[0] >= y.rows(1, y.len() - 1).norm() - tol
}

/// W = g W_R with W_R = {x1 > |x0|}.
#[derive(Debug, Clone, PartialEq)]
pub struct Wedge {
    frame: PoincareElement,
    inv: PoincareElement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WedgeRelation {
    Equal,
    Subset,
    Superset,
    Other,
}

impl Wedge {
    pub fn right(d: usize) -> Self {
        Wedge::new(PoincareElement::identity(d))
    }

    pub fn new(frame: PoincareElement) -> Self {
        let inv = frame.inverse();
        Wedge { frame, inv }
    }

    pub fn frame(&self) -> &PoincareElement {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn transformed(&self, g: &PoincareElement) -> Wedge {
        Wedge::new(g.compose(&self.frame))
    }

    fn local(&self, x: &RVec) -> RVec {
        self.inv.apply(x)
    }

    pub fn contains(&self, x: &RVec) -> bool {
        let y = self.local(x);
        y[1] > y[0].abs()
    }

    pub fn closure_contains(&self, x: &RVec, tol: f64) -> bool {
        let y = self.local(x);
        y[1] >= y[0].abs() - tol
    }

    /// Open complement g R01 W_R.
    pub fn complement(&self) -> Wedge {
        Wedge::new(self.frame.compose(&PoincareElement::r01(self.dim())))
    }

    /// r_W = g R01 g^{-1}.
    pub fn reflection(&self) -> PoincareElement {
        self.frame.compose(&PoincareElement::r01(self.dim())).compose(&self.frame.inverse())
    }

    /// gamma_W in an orthochronous frame (g or g T0).
    pub fn hom(&self) -> WedgeHom {
        let frame = if self.frame.is_orthochronous() {
            self.frame.clone()
        } else {
            self.frame.compose(&PoincareElement::time_reversal(self.dim()))
        };
        WedgeHom { frame, dual: false }
    }

    pub fn sample(&self, rng: &mut TrialRng, scale: f64) -> RVec {
        let d = self.dim();
        let y0: f64 = scale * random::normal(rng);
        let gap: f64 = rng.sample(Exp1);
        let mut y = RVec::from_fn(d, |_, _| scale * random::normal(rng));
        y[0] = y0;
        y[1] = y0.abs() + scale * gap;
        self.frame.apply(&y)
    }
}

fn ray_matches(v: &RVec, u: &RVec) -> bool {
    let (nv, nu) = (v.norm(), u.norm());
    nv > 0.0 && (v / nv - u / nu).norm() < LIGHT_TOL
}

/// W1 subset-or-equal W2 from h = g2^{-1} g1 in the semigroup closure(W_R) x| stabilizer.
pub fn wedge_leq(w1: &Wedge, w2: &Wedge) -> Result<bool> {
    if w1.dim() != w2.dim() {
        return Err(Error::DimensionMismatch { expected: w1.dim(), got: w2.dim() });
    }
    let d = w1.dim();
    let h = w2.inv.compose(&w1.frame);
    let b = &h.translation;
    let tol = 1e-9 * b.norm().max(1.0);
    let (lp, lm) = (lightlike(d, 1.0), lightlike(d, -1.0));
    let in_closure = minkowski(b, &lp) <= tol && minkowski(b, &lm) >= -tol;
    let (ap, am) = (&h.lorentz * &lp, &h.lorentz * &lm);
    let keeps = ray_matches(&ap, &lp) && ray_matches(&am, &lm);
    let swaps = ray_matches(&ap, &(-&lm)) && ray_matches(&am, &(-&lp));
    Ok(in_closure && (keeps || swaps))
}

pub fn wedge_relation(w1: &Wedge, w2: &Wedge) -> Result<WedgeRelation> {
    Ok(match (wedge_leq(w1, w2)?, wedge_leq(w2, w1)?) {
        (true, true) => WedgeRelation::Equal,
        (true, false) => WedgeRelation::Subset,
        (false, true) => WedgeRelation::Superset,
        (false, false) => WedgeRelation::Other,
    })
}

/// Rejection search for x in w1 with x outside w2, over scales 1e-4 .. 1e4.
pub fn non_inclusion_witness(w1: &Wedge, w2: &Wedge, rng: &mut TrialRng, budget: usize) -> Option<RVec> {
    let scales = [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1e3, 1e4];
    (0..budget).find_map(|i| {
        let x = w1.sample(rng, scales[i % scales.len()]);
        (w1.contains(&x) && !w2.closure_contains(&x, 0.0)).then_some(x)
    })
}

/// Counts sampled points of w1 that fall outside the closure of w2.
pub fn inclusion_violations(w1: &Wedge, w2: &Wedge, rng: &mut TrialRng, samples: usize) -> usize {
    let scales = [1e-3, 1e-1, 1.0, 10.0, 1e3];
    (0..samples)
        .filter(|&i| {
            let x = w1.sample(rng, scales[i % scales.len()]);
            let tol = 1e-9 * x.norm().max(1.0);
            w1.contains(&x) && !w2.closure_contains(&x, tol)
        })
        .count()
}

/// t -> g exp(s b0) g^{-1} (t = e^s), t = -1 -> r_W; `dual` evaluates at 1/t.
#[derive(Debug, Clone, PartialEq)]
pub struct WedgeHom {
    frame: PoincareElement,
    dual: bool,
}

impl WedgeHom {
    /// Same function t -> f gamma_R(t) f^{-1}, stored with an orthochronous frame.
    pub fn from_frame(frame: PoincareElement, dual: bool) -> Self {
        if frame.is_orthochronous() {
            WedgeHom { frame, dual }
        } else {
            let d = frame.dim();
            WedgeHom { frame: frame.compose(&PoincareElement::time_reversal(d)), dual: !dual }
        }
    }

    pub fn frame(&self) -> &PoincareElement {
        &self.frame
    }

    pub fn is_dual(&self) -> bool {
        self.dual
    }

    pub fn eval(&self, t: f64) -> Result<PoincareElement> {
        if t == 0.0 {
            return Err(Error::InvalidParameters("t must be nonzero".into()));
        }
        let d = self.frame.dim();
        let s = if self.dual { -t.abs().ln() } else { t.abs().ln() };
        let g = &self.frame;
        let mut core = PoincareElement::boost(d, s);
        if t < 0.0 {
            core = PoincareElement::r01(d).compose(&core);
        }
        Ok(g.compose(&core).compose(&g.inverse()))
    }

    /// gamma^vee(t) = gamma(1/t).
    pub fn dual(&self) -> WedgeHom {
        WedgeHom { frame: self.frame.clone(), dual: !self.dual }
    }

    /// gamma^g(t) = g gamma(t) g^{-1}.
    pub fn conjugate(&self, g: &PoincareElement) -> WedgeHom {
        WedgeHom::from_frame(g.compose(&self.frame), self.dual)
    }

    pub fn distance_at(&self, other: &WedgeHom, ts: &[f64]) -> Result<f64> {
        ts.iter().try_fold(0.0f64, |acc, &t| Ok(acc.max(self.eval(t)?.distance(&other.eval(t)?))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transport {
    Conjugate,
    Dual,
}

/// BGL transport at the index level: gamma -> gamma^g or gamma^vee; g must lie in P(d)_+.
pub fn bgl_transport(gamma: &WedgeHom, g: &PoincareElement, mode: Transport) -> Result<WedgeHom> {
    if !g.is_proper() {
        return Err(Error::NotProper);
    }
    Ok(match mode {
        Transport::Conjugate => gamma.conjugate(g),
        Transport::Dual => gamma.dual(),
    })
}

/// Regions of Minkowski space with membership, complements and samplers.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Wedge(Wedge),
    /// Closed double cone (top - V+) cap (bottom + V+).
    DoubleCone { top: RVec, bottom: RVec },
    Points(Vec<RVec>),
    /// Points strictly spacelike to every listed point.
    Spacelike(Vec<RVec>),
}

impl Region {
    pub fn double_cone(top: RVec, bottom: RVec) -> Result<Region> {
        let diff = &top - &bottom;
        if !(minkowski(&diff, &diff) > 0.0 && diff[0] > 0.0) {
            return Err(Error::InvalidParameters("top - bottom must be future timelike".into()));
        }
        Ok(Region::DoubleCone { top, bottom })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Region::Wedge(_) => "wedge",
            Region::DoubleCone { .. } => "double_cone",
            Region::Points(_) => "points",
            Region::Spacelike(_) => "spacelike",
        }
    }

    pub fn contains(&self, x: &RVec) -> bool {
        match self {
            Region::Wedge(w) => w.contains(x),
            Region::DoubleCone { top, bottom } => {
                in_closed_future(&(top - x), 0.0) && in_closed_future(&(x - bottom), 0.0)
            }
            Region::Points(ps) => ps.iter().any(|p| (p - x).norm() < 1e-12),
            Region::Spacelike(ps) => ps.iter().all(|p| {
                let v = x - p;
                minkowski(&v, &v) < 0.0
            }),
        }
    }

    /// Causal complement; wedge complements stay open wedges.
    pub fn complement(&self) -> Result<Region> {
        match self {
            Region::Wedge(w) => Ok(Region::Wedge(w.complement())),
            Region::DoubleCone { top, bottom } => Ok(Region::Spacelike(vec![top.clone(), bottom.clone()])),
            Region::Points(ps) => Ok(Region::Spacelike(ps.clone())),
            Region::Spacelike(ps) => match ps.as_slice() {
                [] => Ok(Region::Points(Vec::new())),
                [x] => Ok(Region::Points(vec![x.clone()])),
                [a, b] => {
                    let (t, s) = if a[0] >= b[0] { (a, b) } else { (b, a) };
                    Region::double_cone(t.clone(), s.clone())
                        .map_err(|_| Error::Unsupported("complement of a non-timelike pair".into()))
                }
                _ => Err(Error::Unsupported("complement of more than two points".into())),
            },
        }
    }

    /// Points in the region (rejection inside a bounded window for predicate regions).
    pub fn sample(&self, rng: &mut TrialRng, n: usize) -> Vec<RVec> {
        match self {
            Region::Wedge(w) => (0..n).map(|i| w.sample(rng, [0.1, 1.0, 10.0][i % 3])).collect(),
            Region::DoubleCone { top, bottom } => {
                let mid = (top + bottom) / 2.0;
                let r = (top - bottom).norm();
                let d = mid.len();
                let mut out = Vec::with_capacity(n);
                while out.len() < n {
                    let x = &mid + RVec::from_fn(d, |_, _| r * (rng.random::<f64>() - 0.5));
                    if self.contains(&x) {
                        out.push(x);
                    }
                }
                out
            }
            Region::Points(ps) if ps.is_empty() => Vec::new(),
            Region::Points(ps) => (0..n).map(|i| ps[i % ps.len()].clone()).collect(),
            Region::Spacelike(ps) => {
                let d = ps.first().map(|p| p.len()).unwrap_or(2);
                let center = ps.iter().fold(RVec::zeros(d), |a, p| a + p) / (ps.len().max(1) as f64);
                let mut out = Vec::with_capacity(n);
                let mut tries = 0;
                while out.len() < n && tries < 1000 * n {
                    tries += 1;
                    let scale = [1.0, 10.0, 100.0][tries % 3];
                    let x = &center + RVec::from_fn(d, |_, _| scale * random::normal(rng));
                    if self.contains(&x) {
                        out.push(x);
                    }
                }
                out
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pts = |ps: &[RVec]| ps.iter().map(|p| p.as_slice().to_vec()).collect::<Vec<_>>();
        match self {
            Region::Wedge(w) => serde_json::json!({
                "tag": "wedge",
                "translation": w.frame.translation.as_slice(),
                "lorentz": crate::json::real_matrix(&w.frame.lorentz),
            }),
            Region::DoubleCone { top, bottom } => serde_json::json!({
                "tag": "double_cone", "top": top.as_slice(), "bottom": bottom.as_slice(),
            }),
            Region::Points(ps) => serde_json::json!({ "tag": "points", "points": pts(ps) }),
            Region::Spacelike(ps) => serde_json::json!({ "tag": "spacelike", "points": pts(ps) }),
        }
    }
}

fn spacelike_strict(a: &RVec, b: &RVec) -> bool {
    let v = a - b;
    minkowski(&v, &v) < 0.0
}

/// Algebraic inclusion a subset-or-equal b; None when not decidable in closed form.
pub fn region_leq(a: &Region, b: &Region) -> Result<Option<bool>> {
    use Region::*;
    Ok(match (a, b) {
        (Points(ps), _) => Some(ps.iter().all(|p| b.contains(p))),
        (Wedge(w1), Wedge(w2)) => Some(wedge_leq(w1, w2)?),
        (Wedge(_), DoubleCone { .. }) | (Wedge(_), Points(_)) => Some(false),
        (Wedge(w), Spacelike(ps)) => {
            let comp = w.complement();
            Some(ps.iter().all(|p| comp.closure_contains(p, 0.0)))
        }
        (DoubleCone { top, bottom }, Wedge(w)) => Some(w.contains(top) && w.contains(bottom)),
        (DoubleCone { top: t1, bottom: b1 }, DoubleCone { top: t2, bottom: b2 }) => {
            Some(in_closed_future(&(t2 - t1), 0.0) && in_closed_future(&(b1 - b2), 0.0))
        }
        (DoubleCone { .. }, Points(_)) => Some(false),
        (DoubleCone { top, bottom }, Spacelike(ps)) => {
            Some(ps.iter().all(|p| spacelike_strict(p, top) && spacelike_strict(p, bottom)))
        }
        (Spacelike(_), Spacelike(t)) if t.is_empty() => Some(true),
        (Spacelike(s), _) if s.is_empty() => Some(false),
        (Spacelike(_), Wedge(_)) | (Spacelike(_), DoubleCone { .. }) | (Spacelike(_), Points(_)) => Some(false),
        (Spacelike(_), Spacelike(_)) => match b.complement().ok().zip(a.complement().ok()) {
            // S' <= T'  iff  T'' <= S''
            Some((tc, sc)) => region_leq(&tc, &sc)?,
            None => None,
        },
    })
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct OrderReport {
    pub pairs: usize,
    pub decided: usize,
    pub a1_violations: usize,
    pub a2_violations: usize,
    pub bidual_violations: usize,
    pub triple_violations: usize,
}

impl OrderReport {
    pub fn violations(&self) -> usize {
        self.a1_violations + self.a2_violations + self.bidual_violations + self.triple_violations
    }
}

fn equal_regions(a: &Region, b: &Region) -> Result<Option<bool>> {
    Ok(match (region_leq(a, b)?, region_leq(b, a)?) {
        (Some(x), Some(y)) => Some(x && y),
        _ => None,
    })
}

/// (A1) order reversal, (A2) l1 <= l2' iff l2 <= l1', l <= l'' and l' = l'''.
pub fn order_axiom_check(pairs: &[(Region, Region)]) -> Result<OrderReport> {
    let mut rep = OrderReport { pairs: pairs.len(), ..Default::default() };
    for (a, b) in pairs {
        let (ac, bc) = match (a.complement(), b.complement()) {
            (Ok(x), Ok(y)) => (x, y),
            _ => continue,
        };
        let mut decided = true;
        match (region_leq(a, b)?, region_leq(&bc, &ac)?) {
            (Some(true), Some(false)) => rep.a1_violations += 1,
            (Some(_), Some(_)) => {}
            _ => decided = false,
        }
        match (region_leq(a, &bc)?, region_leq(b, &ac)?) {
            (Some(x), Some(y)) if x != y => rep.a2_violations += 1,
            (Some(_), Some(_)) => {}
            _ => decided = false,
        }
        for r in [a, b] {
            let rc = r.complement()?;
            let rcc = rc.complement()?;
            match region_leq(r, &rcc)? {
                Some(false) => rep.bidual_violations += 1,
                Some(true) => {}
                None => decided = false,
            }
            match equal_regions(&rc, &rcc.complement()?)? {
                Some(false) => rep.triple_violations += 1,
                Some(true) => {}
                None => decided = false,
            }
        }
        if decided {
            rep.decided += 1;
        }
    }
    Ok(rep)
}

/// Random P(d) element that maps W_R into itself: stabilizer part times a translation in closure(W_R).
pub fn random_semigroup_element(rng: &mut TrialRng, d: usize, time_flip: bool) -> PoincareElement {
    let mut a = RMat::identity(d, d);
    if d > 2 {
        let q = random::real_matrix(rng, d - 2, d - 2).qr().q();
        a.view_mut((2, 2), (d - 2, d - 2)).copy_from(&q);
    }
    let mut a = PoincareElement::boost(d, random::normal(rng)).lorentz * a;
    if time_flip {
        a = PoincareElement::time_reversal(d).lorentz * a;
    }
    let mut b = RVec::from_fn(d, |_, _| random::normal(rng));
    b[1] = b[0].abs() + rng.sample::<f64, _>(Exp1);
    PoincareElement { translation: b, lorentz: a }
}

pub fn metric_ok(g: &PoincareElement) -> bool {
    linalg::is_finite(&g.lorentz) && g.metric_residual() < METRIC_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::trial_rng;

    #[test]
    fn group_laws() {
        let mut rng = trial_rng(1, 0);
        let g = PoincareElement::random(&mut rng, 4, 0.7);
        let h = PoincareElement::random(&mut rng, 4, 0.7);
        assert!(g.metric_residual() < 1e-10);
        assert!(g.compose(&g.inverse()).distance(&PoincareElement::identity(4)) < 1e-10);
        let x = RVec::from_vec(vec![0.3, 1.0, -2.0, 0.5]);
        assert!((g.compose(&h).apply(&x) - g.apply(&h.apply(&x))).norm() < 1e-10);
        assert!(matches!(PoincareElement::lorentz(RMat::identity(4, 4) * 2.0), Err(Error::NotLorentz(_))));
    }

    #[test]
    fn relations_and_witnesses() {
        let mut rng = trial_rng(2, 0);
        let wr = Wedge::right(4);
        let inner = wr.transformed(&random_semigroup_element(&mut rng, 4, true));
        assert_eq!(wedge_relation(&inner, &wr).unwrap(), WedgeRelation::Subset);
        assert_eq!(wedge_relation(&wr, &wr.transformed(&PoincareElement::boost(4, 0.8))).unwrap(), WedgeRelation::Equal);
        assert_eq!(inclusion_violations(&inner, &wr, &mut rng, 2000), 0);
        assert!(non_inclusion_witness(&wr, &inner, &mut rng, 10_000).is_some());
        let shifted = wr.transformed(&PoincareElement::translation(RVec::from_vec(vec![1e-3, 0.0, 0.0, 0.0])));
        assert_eq!(wedge_relation(&shifted, &wr).unwrap(), WedgeRelation::Other);
        assert!(non_inclusion_witness(&shifted, &wr, &mut rng, 10_000).is_some());
        assert_eq!(wedge_relation(&wr, &wr.complement()).unwrap(), WedgeRelation::Other);
    }

    #[test]
    fn reflections_and_homs() {
        let mut rng = trial_rng(3, 0);
        let w = Wedge::new(PoincareElement::random(&mut rng, 3, 0.5));
        let r = w.reflection();
        assert!(r.compose(&r).distance(&PoincareElement::identity(3)) < 1e-9);
        assert!(w.hom().eval(-1.0).unwrap().distance(&r) < 1e-9);
        let gam = w.hom();
        let (a, b) = (gam.eval(2.0).unwrap(), gam.eval(-3.0).unwrap());
        assert!(a.compose(&b).distance(&gam.eval(-6.0).unwrap()) < 1e-8);
        let comp = w.complement().hom();
        assert!(comp.distance_at(&gam.dual(), &[0.5, 2.0, -1.5]).unwrap() < 1e-8);
        assert!(comp.eval(-1.0).unwrap().distance(&r) < 1e-9);
        assert!(comp.eval(2.0).unwrap().distance(&gam.eval(2.0).unwrap()) > 1e-3);
        // reflection-space law
        let w2 = Wedge::new(PoincareElement::random(&mut rng, 3, 0.5));
        let lhs = r.compose(&w2.reflection()).compose(&r);
        assert!(lhs.distance(&w2.transformed(&r).reflection()) < 1e-8);
    }

    #[test]
    fn covariance_with_time_reversal() {
        let mut rng = trial_rng(4, 0);
        let w = Wedge::new(PoincareElement::random(&mut rng, 4, 0.5));
        let ts = [0.4, 3.0, -2.0];
        let g = PoincareElement::random(&mut rng, 4, 0.5);
        let conj = bgl_transport(&w.hom(), &g, Transport::Conjugate).unwrap();
        assert!(w.transformed(&g).hom().distance_at(&conj, &ts).unwrap() < 1e-8);
        let flip = PoincareElement::r01(4).compose(&g);
        assert!(!flip.is_orthochronous() && flip.is_proper());
        let moved = w.transformed(&flip).hom();
        let direct = w.hom().conjugate(&flip);
        assert!(moved.distance_at(&direct.dual(), &ts).unwrap() < 1e-8);
        let plain: Vec<_> = ts.iter().map(|&t| flip.compose(&w.hom().eval(t).unwrap()).compose(&flip.inverse())).collect();
        let dual_ok = ts.iter().zip(&plain).all(|(&t, p)| moved.dual().eval(t).unwrap().distance(p) < 1e-8);
        assert!(dual_ok);
        let parity = PoincareElement::lorentz(diag_flip(4, &[1])).unwrap();
        assert!(matches!(bgl_transport(&w.hom(), &parity, Transport::Conjugate), Err(Error::NotProper)));
    }

    #[test]
    fn regions_and_axioms() {
        let z = RVec::zeros(3);
        let top = RVec::from_vec(vec![1.0, 0.0, 0.0]);
        let dc = Region::double_cone(top.clone(), -&top).unwrap();
        assert_eq!(dc.complement().unwrap().complement().unwrap(), dc);
        assert!(dc.contains(&z));
        let big = Region::double_cone(&top * 2.0, -&top * 2.0).unwrap();
        assert_eq!(region_leq(&dc, &big).unwrap(), Some(true));
        assert_eq!(region_leq(&big, &dc).unwrap(), Some(false));
        let wr = Region::Wedge(Wedge::right(3));
        let far = Region::double_cone(RVec::from_vec(vec![0.5, 3.0, 0.0]), RVec::from_vec(vec![-0.5, 3.0, 0.0])).unwrap();
        assert_eq!(region_leq(&far, &wr).unwrap(), Some(true));
        assert_eq!(region_leq(&wr.complement().unwrap(), &far.complement().unwrap()).unwrap(), Some(true));
        assert!(matches!(Region::Spacelike(vec![z.clone(), RVec::from_vec(vec![0.0, 1.0, 0.0])]).complement(), Err(Error::Unsupported(_))));
        let rep = order_axiom_check(&[(dc.clone(), big.clone()), (far.clone(), wr.clone()), (wr.clone(), dc)]).unwrap();
        assert_eq!(rep.violations(), 0);
        assert_eq!(rep.decided, 3);
        let json = far.to_json();
        assert_eq!(json["tag"], "double_cone");
    }
}
