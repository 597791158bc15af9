//! Log-coordinate strip model of the positive-energy representation of Aff(R):
//! (U_{(b,e^t)} psi)(theta) = e^{i b e^theta} psi(theta + t), U_{(0,-1)} = complex conjugation.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, CMat, C64};
use crate::realified::{RealSubspace, RlOperator};
use crate::standard::StandardSubspace;

/// Largest grid for which dense subspaces are materialized.
pub const DENSE_CAP: usize = 256;
/// Largest per-ray grid for the two-ray tensor model.
pub const TWO_RAY_CAP: usize = 1024;

/// Frozen convergence study on the unit Gaussian probe at 0 (b = 1, t = 0.25).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub n: usize,
    pub l: f64,
    pub borchers: f64,
    pub inclusion: f64,
    pub inclusion_wrong_sign: f64,
    pub mi2: f64,
}

pub const CALIBRATION_COARSE: Calibration = Calibration {
    n: 256,
    l: 4.0,
    borchers: 4.857965964990196e-3,
    inclusion: 7.728738403963574e-5,
    inclusion_wrong_sign: 0.714388738555107,
    mi2: 3.3580962786718783e-4,
};

pub const CALIBRATION_FINE: Calibration = Calibration {
    n: 1024,
    l: 8.0,
    borchers: 6.841781022260886e-12,
    inclusion: 1.8693846607199716e-7,
    inclusion_wrong_sign: 0.7021930642571423,
    mi2: 3.275980741601145e-7,
};

/// Required improvement under (N, L) -> (4N, 2L).
pub const REFINEMENT_FACTOR: f64 = 10.0;
/// Required b = -1 over b = +1 inclusion ratio at the fine grid.
pub const ONE_SIDEDNESS_RATIO: f64 = 100.0;
/// Residuals below this are rounding noise and count as converged.
pub const ROUNDING_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StripGrid {
    pub n: usize,
    pub l: f64,
}

impl StripGrid {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("N = {n} must be a power of two >= 8")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidGrid(format!("L = {l} must be positive")));
        }
        Ok(StripGrid { n, l })
    }

    pub fn h(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        -self.l + j as f64 * self.h()
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.theta(j)).collect()
    }

    /// Symmetric frequency index in -N/2 .. N/2-1.
    pub fn freq_index(&self, m: usize) -> i64 {
        let n = self.n as i64;
        let m = m as i64;
        if m < n / 2 { m } else { m - n }
    }

    /// Angular frequency of DFT slot m; the Nyquist slot is its own partner and gets 0.
    pub fn omega(&self, m: usize) -> f64 {
        if m == self.n / 2 {
            0.0
        } else {
            2.0 * PI * self.freq_index(m) as f64 / (self.n as f64 * self.h())
        }
    }

    pub fn partner(&self, m: usize) -> usize {
        (self.n - m) % self.n
    }

    /// Number of grid steps closest to a dilation by t.
    pub fn steps(&self, t: f64) -> i64 {
        (t / self.h()).round() as i64
    }
}

/// Tagged operators on C^N.
#[derive(Debug, Clone, PartialEq)]
pub enum GridOperator {
    PositionDiagonal(Vec<C64>),
    /// (S_k psi)_j = psi_{j+k mod N}.
    Shift(i64),
    FourierDiagonal(Vec<C64>),
    /// psi -> op(conj psi).
    Conjugated(Box<GridOperator>),
    /// First factor after the second.
    Product(Box<GridOperator>, Box<GridOperator>),
    Dense(CMat),
}

fn roll(v: &[C64], k: i64) -> Vec<C64> {
    let n = v.len() as i64;
    (0..n).map(|j| v[(j + k).rem_euclid(n) as usize]).collect()
}

fn conj(v: &[C64]) -> Vec<C64> {
    v.iter().map(|z| z.conj()).collect()
}

fn mul(d: &[C64], v: &[C64]) -> Vec<C64> {
    d.iter().zip(v).map(|(a, b)| a * b).collect()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn diff_norm(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn normalized(v: Vec<C64>) -> Vec<C64> {
    let n = norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Built representation: grid plus FFT plans.
#[derive(Clone)]
pub struct AffineContext {
    grid: StripGrid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for AffineContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AffineContext").field("grid", &self.grid).finish()
    }
}

pub fn build_rep(n: usize, l: f64) -> Result<AffineContext> {
    let grid = StripGrid::new(n, l)?;
    let mut planner = FftPlanner::new();
    Ok(AffineContext { grid, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) })
}

impl AffineContext {
    pub fn grid(&self) -> StripGrid {
        self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    /// Unitary DFT: hat(m) = N^{-1/2} sum_j psi_j e^{-2 pi i jm/N}.
    pub fn fft(&self, v: &[C64]) -> Vec<C64> {
        let mut buf = v.to_vec();
        self.fwd.process(&mut buf);
        let s = 1.0 / (self.n() as f64).sqrt();
        buf.iter_mut().for_each(|z| *z *= s);
        buf
    }

    pub fn ifft(&self, v: &[C64]) -> Vec<C64> {
        let mut buf = v.to_vec();
        self.inv.process(&mut buf);
        let s = 1.0 / (self.n() as f64).sqrt();
        buf.iter_mut().for_each(|z| *z *= s);
        buf
    }

    /// Translation generator P = e^theta (diagonal, strictly positive).
    pub fn generator(&self) -> Vec<f64> {
        self.grid.thetas().into_iter().map(f64::exp).collect()
    }

    pub fn translation_phases(&self, b: f64) -> Vec<C64> {
        self.generator().into_iter().map(|p| C64::from_polar(1.0, b * p)).collect()
    }

    /// U_{(b,1)}.
    pub fn translate(&self, b: f64, v: &[C64]) -> Vec<C64> {
        mul(&self.translation_phases(b), v)
    }

    /// U_{(0,e^{kh})}, exact cyclic shift.
    pub fn dilate(&self, k: i64, v: &[C64]) -> Vec<C64> {
        roll(v, k)
    }

    /// psi(theta + t) by Fourier continuation.
    pub fn frac_shift(&self, t: f64, v: &[C64]) -> Vec<C64> {
        let mut hat = self.fft(v);
        hat.iter_mut().enumerate().for_each(|(m, z)| *z *= C64::from_polar(1.0, self.grid.omega(m) * t));
        self.ifft(&hat)
    }

    /// Delta_0^{is} = U_{(0, e^{shift_per_unit * s})}.
    pub fn modular_power(&self, s: f64, scaling: ModularScaling, v: &[C64]) -> Vec<C64> {
        self.frac_shift(scaling.shift_per_unit * s, v)
    }

    pub fn conjugate(&self, v: &[C64]) -> Vec<C64> {
        conj(v)
    }

    /// Real-orthogonal projection onto V_0 = Fix(J_0 Delta_0^{1/2}), Delta_0 = e^{-2 pi omega}.
    pub fn project_v0(&self, v: &[C64]) -> Vec<C64> {
        let mut hat = self.fft(v);
        let g = self.grid;
        project_pairs(&mut hat, |m| g.partner(m), |m| g.omega(m));
        self.ifft(&hat)
    }

    /// Projection onto V_x = U_{(x,1)} V_0.
    pub fn project_vx(&self, x: f64, v: &[C64]) -> Vec<C64> {
        self.translate(x, &self.project_v0(&self.translate(-x, v)))
    }

    /// Plain Gaussian e^{-(theta-c)^2 / 2 sigma^2}, normalized.
    pub fn gaussian_probe(&self, center: f64, sigma: f64) -> Vec<C64> {
        normalized(
            self.grid.thetas().iter().map(|&t| c((-(t - center).powi(2) / (2.0 * sigma * sigma)).exp(), 0.0)).collect(),
        )
    }

    /// Gaussian continued to the strip midline, projected onto V_0 and normalized.
    pub fn hardy_probe(&self, center: f64, sigma: f64) -> Vec<C64> {
        let raw: Vec<C64> = self
            .grid
            .thetas()
            .iter()
            .map(|&t| {
                let z = c(t - center, -PI / 2.0);
                (-(z * z) / (2.0 * sigma * sigma)).exp()
            })
            .collect();
        normalized(self.project_v0(&raw))
    }

    /// Smooth bump supported in |theta - c| < r, exactly zero outside.
    pub fn bump_probe(&self, center: f64, radius: f64) -> Vec<C64> {
        normalized(
            self.grid
                .thetas()
                .iter()
                .map(|&t| {
                    let x = (t - center) / radius;
                    c(if x.abs() < 1.0 { (-1.0 / (1.0 - x * x)).exp() } else { 0.0 }, 0.0)
                })
                .collect(),
        )
    }

    /// Mass of v on the k grid points at each end.
    pub fn wrap_mass(&self, v: &[C64], k: usize) -> f64 {
        let n = self.n();
        let k = k.min(n / 2);
        v[..k].iter().chain(&v[n - k..]).map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// U_{(b, sign e^{kh})} as a tagged operator: translation after dilation, conjugation for sign < 0.
    pub fn rep_operator(&self, b: f64, k: i64, antiunitary: bool) -> GridOperator {
        let lin = GridOperator::PositionDiagonal(self.translation_phases(b)).compose(&GridOperator::Shift(k));
        if antiunitary { GridOperator::Conjugated(Box::new(lin)) } else { lin }
    }

    pub fn apply(&self, op: &GridOperator, v: &[C64]) -> Vec<C64> {
        match op {
            GridOperator::PositionDiagonal(d) => mul(d, v),
            GridOperator::Shift(k) => roll(v, *k),
            GridOperator::FourierDiagonal(d) => self.ifft(&mul(d, &self.fft(v))),
            GridOperator::Conjugated(inner) => self.apply(inner, &conj(v)),
            GridOperator::Product(a, b) => self.apply(a, &self.apply(b, v)),
            GridOperator::Dense(m) => (m * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec(),
        }
    }

    /// Realified form; dense, so only for small grids.
    pub fn to_rl(&self, op: &GridOperator) -> Result<RlOperator> {
        let n = self.n();
        if n > DENSE_CAP {
            return Err(Error::DimensionOverflow(n));
        }
        let mut m = crate::linalg::RMat::zeros(2 * n, 2 * n);
        for j in 0..2 * n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j % n] = if j < n { c(1.0, 0.0) } else { c(0.0, 1.0) };
            let col = crate::realified::realify_vec(&nalgebra::DVector::from_vec(self.apply(op, &e)));
            m.set_column(j, &col);
        }
        RlOperator::new(m)
    }
}

impl GridOperator {
    /// self after other.
    pub fn compose(&self, other: &GridOperator) -> GridOperator {
        use GridOperator::*;
        match (self, other) {
            (PositionDiagonal(a), PositionDiagonal(b)) => PositionDiagonal(mul(a, b)),
            (Shift(a), Shift(b)) => Shift(a + b),
            (FourierDiagonal(a), FourierDiagonal(b)) => FourierDiagonal(mul(a, b)),
            (Dense(a), Dense(b)) => Dense(a * b),
            _ => Product(Box::new(self.clone()), Box::new(other.clone())),
        }
    }
}

/// Projects each Fourier pair (p, q) onto {hat(q) = e^{-pi Omega_p} conj hat(p)} with Omega_p >= 0;
/// self-paired slots keep their real part.
fn project_pairs(hat: &mut [C64], partner: impl Fn(usize) -> usize, omega: impl Fn(usize) -> f64) {
    for p in 0..hat.len() {
        let q = partner(p);
        if q == p {
            hat[p] = c(hat[p].re, 0.0);
            continue;
        }
        if q < p {
            continue;
        }
        let (a, b) = if omega(p) >= 0.0 { (p, q) } else { (q, p) };
        let lam = (-PI * omega(a).abs()).exp();
        let nrm2 = 1.0 + lam * lam;
        let (za, zb) = (hat[a], hat[b]);
        let c1 = za.re + lam * zb.re;
        let c2 = za.im - lam * zb.im;
        hat[a] = c(c1, c2) / nrm2;
        hat[b] = c(c1, -c2) * (lam / nrm2);
    }
}

/// Delta^{it} = U_{(0, e^{shift_per_unit * t})}; the default -2 pi matches U_{(0,e^t)} = Delta^{-it/2pi}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModularScaling {
    pub shift_per_unit: f64,
}

impl Default for ModularScaling {
    fn default() -> Self {
        ModularScaling { shift_per_unit: -2.0 * PI }
    }
}

impl ModularScaling {
    /// Delta^{it} = U_{(0,e^{-t})}.
    pub fn unit() -> Self {
        ModularScaling { shift_per_unit: -1.0 }
    }
}

/// V_x as an implicit projection, with a dense form on small grids.
#[derive(Debug, Clone)]
pub struct GridStandard {
    pub x: f64,
    ctx: AffineContext,
}

pub fn standard_family(ctx: &AffineContext, x: f64) -> GridStandard {
    GridStandard { x, ctx: ctx.clone() }
}

impl GridStandard {
    pub fn project(&self, v: &[C64]) -> Vec<C64> {
        self.ctx.project_vx(self.x, v)
    }

    /// Dense real basis: Fourier pair vectors (1, lam), (i, -i lam) and the self-paired real slots.
    /// Numerically standard only while e^{-pi omega_max} stays well above the rank tolerance (h of order 1).
    pub fn to_standard(&self) -> Result<StandardSubspace> {
        let ctx = &self.ctx;
        let n = ctx.n();
        if n > DENSE_CAP {
            return Err(Error::DimensionOverflow(n));
        }
        let g = ctx.grid();
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        let zero = vec![C64::new(0.0, 0.0); n];
        for p in 0..n {
            let q = g.partner(p);
            if q == p {
                let mut e = zero.clone();
                e[p] = c(1.0, 0.0);
                cols.push(e);
            } else if q > p {
                let (a, b) = if g.omega(p) >= 0.0 { (p, q) } else { (q, p) };
                let lam = (-PI * g.omega(a).abs()).exp();
                let mut u1 = zero.clone();
                u1[a] = c(1.0, 0.0);
                u1[b] = c(lam, 0.0);
                let mut u2 = zero.clone();
                u2[a] = c(0.0, 1.0);
                u2[b] = c(0.0, -lam);
                cols.push(u1);
                cols.push(u2);
            }
        }
        let mut spatial = CMat::zeros(n, cols.len());
        for (j, hat) in cols.iter().enumerate() {
            let col = ctx.translate(self.x, &ctx.ifft(hat));
            spatial.set_column(j, &nalgebra::DVector::from_vec(col));
        }
        let real = crate::realified::realify_cols(&spatial);
        StandardSubspace::new(RealSubspace::from_spanning(n, &real)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BorchersReport {
    pub b: f64,
    pub steps: i64,
    pub residual: f64,
    pub wrap_mass: f64,
    pub bump_residual: f64,
}

/// Shift_k U_b Shift_{-k} against U_{b e^{kh}} with k = round(1/h).
pub fn borchers_check(ctx: &AffineContext, b: f64, probe: &[C64]) -> BorchersReport {
    let k = ctx.grid().steps(1.0);
    let lhs = |v: &[C64]| ctx.dilate(k, &ctx.translate(b, &ctx.dilate(-k, v)));
    let rhs = |v: &[C64]| ctx.translate(b * (k as f64 * ctx.grid().h()).exp(), v);
    let l = ctx.grid().l;
    let bump = ctx.bump_probe(0.0, l / 2.0);
    BorchersReport {
        b,
        steps: k,
        residual: diff_norm(&lhs(probe), &rhs(probe)),
        wrap_mass: ctx.wrap_mass(probe, k.unsigned_abs() as usize),
        bump_residual: diff_norm(&lhs(&bump), &rhs(&bump)),
    }
}

/// ||(1 - P_{V_0}) U_{(b,1)} phi|| for a unit probe phi in V_0.
pub fn inclusion_residual(ctx: &AffineContext, b: f64, probe: &[C64]) -> f64 {
    let w = ctx.translate(b, probe);
    diff_norm(&w, &ctx.project_v0(&w))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InclusionReport {
    pub b: f64,
    pub residual: f64,
    pub wrong_sign: f64,
    pub ratio: f64,
}

pub fn inclusion_report(ctx: &AffineContext, b: f64, probe: &[C64]) -> InclusionReport {
    let residual = inclusion_residual(ctx, b, probe);
    let wrong_sign = inclusion_residual(ctx, -b, probe);
    InclusionReport { b, residual, wrong_sign, ratio: wrong_sign / residual.max(f64::MIN_POSITIVE) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InnerReport {
    pub b: f64,
    pub max_modulus: f64,
    pub symmetry: f64,
    pub endomorphism: f64,
    pub samples: usize,
}

/// B(z) = e^{i b e^z} on the strip 0 <= Im z <= pi.
pub fn inner_function(b: f64, z: C64) -> C64 {
    (C64::i() * b * z.exp()).exp()
}

pub fn inner_function_check(ctx: &AffineContext, b: f64) -> Result<InnerReport> {
    if b < 0.0 {
        let z = c(0.0, PI / 2.0);
        let w = inner_function(b, z);
        return Err(Error::NotDecaying { re: z.re, im: z.im, modulus: w.norm() });
    }
    let l = ctx.grid().l;
    let (nx, ny) = (201usize, 101usize);
    let mut max_modulus = 0.0f64;
    let mut symmetry = 0.0f64;
    for i in 0..nx {
        let x = -l + 2.0 * l * i as f64 / (nx - 1) as f64;
        for j in 0..ny {
            let z = c(x, PI * j as f64 / (ny - 1) as f64);
            let bz = inner_function(b, z);
            max_modulus = max_modulus.max(bz.norm());
            let mirrored = inner_function(b, c(0.0, PI) + z.conj()).conj();
            symmetry = symmetry.max((mirrored - bz).norm());
        }
    }
    let probe = ctx.hardy_probe(0.0, 1.0);
    Ok(InnerReport {
        b,
        max_modulus,
        symmetry,
        endomorphism: inclusion_residual(ctx, b, &probe),
        samples: nx * ny,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModularIntersectionReport {
    pub scaling: ModularScaling,
    /// (t, ||S_t phi - W(-1) phi||)
    pub limit_series: Vec<(f64, f64)>,
    /// (t, ||S_t phi - W(e^{a t} - 1) phi||), the continuum value of S_t
    pub closed_form_series: Vec<(f64, f64)>,
    /// (t, ||S_t phi - S_{t'} phi||) for consecutive t
    pub cauchy_series: Vec<(f64, f64)>,
    pub converged: bool,
    pub mi2_t: f64,
    pub mi2: f64,
    pub trivial_case: f64,
}

/// S_t = Delta_{H1}^{it} Delta_{H2}^{-it} for H1 = V_0, H2 = V_1.
pub fn modular_flow_quotient(ctx: &AffineContext, t: f64, scaling: ModularScaling, x: f64, v: &[C64]) -> Vec<C64> {
    let d2 = ctx.translate(x, &ctx.modular_power(-t, scaling, &ctx.translate(-x, v)));
    ctx.modular_power(t, scaling, &d2)
}

pub fn modular_intersection_check(
    ctx: &AffineContext,
    probe: &[C64],
    ts: &[f64],
    mi2_t: f64,
    scaling: ModularScaling,
) -> ModularIntersectionReport {
    let limit = ctx.translate(-1.0, probe);
    let states: Vec<Vec<C64>> = ts.iter().map(|&t| modular_flow_quotient(ctx, t, scaling, 1.0, probe)).collect();
    let limit_series: Vec<(f64, f64)> = ts.iter().zip(&states).map(|(&t, s)| (t, diff_norm(s, &limit))).collect();
    let closed_form_series: Vec<(f64, f64)> = ts
        .iter()
        .zip(&states)
        .map(|(&t, s)| (t, diff_norm(s, &ctx.translate((scaling.shift_per_unit * t).exp() - 1.0, probe))))
        .collect();
    let cauchy_series: Vec<(f64, f64)> =
        ts.iter().zip(states.windows(2)).map(|(&t, w)| (t, diff_norm(&w[0], &w[1]))).collect();
    let converged = cauchy_series.windows(2).all(|w| w[1].1 <= w[0].1 * 1.000_001);
    let s = |v: &[C64]| modular_flow_quotient(ctx, mi2_t, scaling, 1.0, v);
    let twice = ctx.conjugate(&s(&ctx.conjugate(&s(probe))));
    let trivial = modular_flow_quotient(ctx, mi2_t, scaling, 0.0, probe);
    ModularIntersectionReport {
        scaling,
        limit_series,
        closed_form_series,
        cauchy_series,
        converged,
        mi2_t,
        mi2: diff_norm(&twice, probe),
        trivial_case: diff_norm(&trivial, probe),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeisenbergReport {
    pub s: f64,
    pub steps: i64,
    pub relation_residual: f64,
    pub global_residual: f64,
    pub j_commutes: f64,
    pub min_generator: f64,
}

/// W_s = e^{is theta} = e^{is log P}; V_t W_s V_{-t} = e^{ist} W_s with V_t the dilation.
pub fn heisenberg_lift(ctx: &AffineContext, s: f64, k: i64) -> HeisenbergReport {
    let g = ctx.grid();
    let ws: Vec<C64> = g.thetas().iter().map(|&th| C64::from_polar(1.0, s * th)).collect();
    let t = k as f64 * g.h();
    let phase = C64::from_polar(1.0, s * t);
    let rel = |v: &[C64]| {
        let lhs = ctx.dilate(k, &mul(&ws, &ctx.dilate(-k, v)));
        let rhs: Vec<C64> = mul(&ws, v).into_iter().map(|z| z * phase).collect();
        diff_norm(&lhs, &rhs)
    };
    let p = ctx.generator();
    let pc: Vec<C64> = p.iter().map(|&x| c(x, 0.0)).collect();
    let j_commutes = diff_norm(&conj(&pc), &pc);
    HeisenbergReport {
        s,
        steps: k,
        relation_residual: rel(&ctx.bump_probe(0.0, g.l / 2.0)),
        global_residual: rel(&ctx.gaussian_probe(0.0, 1.0)),
        j_commutes,
        min_generator: p.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

/// Tensor product of two strip models, psi[i * N + j] with i on ray one.
#[derive(Debug, Clone)]
pub struct TwoRay {
    ray: AffineContext,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoRayReport {
    pub n: usize,
    pub covariance: f64,
    pub j_rel: f64,
    pub plus_inclusion: f64,
    pub plus_wrong_sign: f64,
    pub minus_inclusion: f64,
    pub minus_wrong_sign: f64,
}

impl TwoRay {
    pub fn new(ctx: &AffineContext) -> Result<Self> {
        if ctx.n() > TWO_RAY_CAP {
            return Err(Error::DimensionOverflow(ctx.n() * ctx.n()));
        }
        Ok(TwoRay { ray: ctx.clone() })
    }

    fn n(&self) -> usize {
        self.ray.n()
    }

    fn map_rows(&self, v: &[C64], f: impl Fn(&[C64]) -> Vec<C64>) -> Vec<C64> {
        v.chunks(self.n()).flat_map(f).collect()
    }

    fn map_cols(&self, v: &[C64], f: impl Fn(&[C64]) -> Vec<C64>) -> Vec<C64> {
        let n = self.n();
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let col: Vec<C64> = (0..n).map(|i| v[i * n + j]).collect();
            for (i, z) in f(&col).into_iter().enumerate() {
                out[i * n + j] = z;
            }
        }
        out
    }

    pub fn product(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
    }

    /// U_{(b+, b-, 1)} = W(b+) (x) W(b-).
    pub fn translate(&self, bp: f64, bm: f64, v: &[C64]) -> Vec<C64> {
        let (p, m) = (self.ray.translation_phases(bp), self.ray.translation_phases(bm));
        let n = self.n();
        v.iter().enumerate().map(|(idx, z)| z * p[idx / n] * m[idx % n]).collect()
    }

    /// Boost U^V(e^{kh}) = D(e^{kh}) (x) D(e^{-kh}).
    pub fn boost(&self, k: i64, v: &[C64]) -> Vec<C64> {
        let n = self.n() as i64;
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for i in 0..n {
            for j in 0..n {
                let si = (i + k).rem_euclid(n);
                let sj = (j - k).rem_euclid(n);
                out[(i * n + j) as usize] = v[(si * n + sj) as usize];
            }
        }
        out
    }

    /// Projection onto V = Fix(J_V Delta_V^{1/2}), Delta_V = Delta_0 (x) Delta_0^{-1}.
    pub fn project_v(&self, v: &[C64]) -> Vec<C64> {
        let n = self.n();
        let g = self.ray.grid();
        let hat = self.map_cols(&self.map_rows(v, |r| self.ray.fft(r)), |col| self.ray.fft(col));
        let mut hat = hat;
        project_pairs(
            &mut hat,
            |p| g.partner(p / n) * n + g.partner(p % n),
            |p| g.omega(p / n) - g.omega(p % n),
        );
        self.map_cols(&self.map_rows(&hat, |r| self.ray.ifft(r)), |col| self.ray.ifft(col))
    }

    pub fn inclusion(&self, bp: f64, bm: f64, probe: &[C64]) -> f64 {
        let w = self.translate(bp, bm, probe);
        diff_norm(&w, &self.project_v(&w))
    }

    pub fn check(&self) -> TwoRayReport {
        let ray = &self.ray;
        let g = ray.grid();
        let k = g.steps(0.5);
        let bump = ray.bump_probe(0.0, g.l / 2.0);
        let bump2 = self.product(&bump, &bump);
        let (bp, bm) = (0.7, -1.3);
        let e = (k as f64 * g.h()).exp();
        let lhs = self.boost(k, &self.translate(bp, bm, &self.boost(-k, &bump2)));
        let rhs = self.translate(bp * e, bm / e, &bump2);
        let covariance = diff_norm(&lhs, &rhs);

        let gauss = ray.gaussian_probe(0.0, 1.0);
        let g2 = self.product(&gauss, &gauss);
        let jv = |v: &[C64]| conj(v);
        let jh1 = |v: &[C64]| self.translate(2.0, 0.0, &jv(v));
        let jh2 = |v: &[C64]| self.translate(0.0, 2.0, &jv(v));
        let left = jh1(&jh2(&g2));
        let right = jv(&jh2(&jh1(&jv(&g2))));
        let j_rel = diff_norm(&left, &right);

        // V_0 (x) V_0' sits inside V since ray two carries the inverse modular group.
        let hardy = ray.hardy_probe(0.0, 1.0);
        let probe = self.product(&hardy, &conj(&hardy));
        TwoRayReport {
            n: g.n,
            covariance,
            j_rel,
            plus_inclusion: self.inclusion(1.0, 0.0, &probe),
            plus_wrong_sign: self.inclusion(-1.0, 0.0, &probe),
            minus_inclusion: self.inclusion(0.0, -1.0, &probe),
            minus_wrong_sign: self.inclusion(0.0, 1.0, &probe),
        }
    }
}

pub fn two_ray_poincare(ctx: &AffineContext) -> Result<TwoRayReport> {
    Ok(TwoRay::new(ctx)?.check())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sl2Report {
    pub m: usize,
    pub k: usize,
    pub bracket_l0_l1: f64,
    pub bracket_l0_lm1: f64,
    pub bracket_l1_lm1: f64,
    pub skew_adjoint: f64,
    pub conj_e: f64,
    pub conj_t: f64,
    pub conj_s: f64,
    pub lowest: f64,
}

impl Sl2Report {
    pub fn max_residual(&self) -> f64 {
        [
            self.bracket_l0_l1,
            self.bracket_l0_lm1,
            self.bracket_l1_lm1,
            self.skew_adjoint,
            self.conj_e,
            self.conj_t,
            self.conj_s,
            self.lowest,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Truncated lowest-weight module in the orthonormal basis e_n = xi_n / ||xi_n||, n = m..=m+K.
#[derive(Debug, Clone)]
pub struct Sl2Model {
    pub l0: CMat,
    pub l1: CMat,
    pub lm1: CMat,
    pub e: CMat,
    pub t: CMat,
    pub s: CMat,
    /// ||xi_n||^2 relative to ||xi_m||^2.
    pub norms: Vec<f64>,
    pub report: Sl2Report,
}

fn interior_norm(m: &CMat, levels: usize) -> f64 {
    m.columns(0, levels).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn sl2_lowest_weight(m: usize, k: usize) -> Result<Sl2Model> {
    if m < 1 || k < 3 {
        return Err(Error::InvalidParameters(format!("need m >= 1 and K >= 3, got m = {m}, K = {k}")));
    }
    let size = k + 1;
    // L1 xi_n = c_n xi_{n-1}: c_m = 0, c_{n+1} = c_n - 2n from [L1, L-1] = -2 L0.
    let mut coef = vec![0.0f64; size];
    for i in 1..size {
        coef[i] = coef[i - 1] - 2.0 * (m + i - 1) as f64;
    }
    // Skew-adjointness of L1 + L-1 forces ||xi_{n+1}||^2 = -c_{n+1} ||xi_n||^2.
    let mut norms = vec![1.0f64; size];
    for i in 1..size {
        norms[i] = -coef[i] * norms[i - 1];
    }
    let zero = C64::new(0.0, 0.0);
    let mut l0 = CMat::from_element(size, size, zero);
    let mut l1 = l0.clone();
    let mut lm1 = l0.clone();
    for i in 0..size {
        l0[(i, i)] = c((m + i) as f64, 0.0);
        if i + 1 < size {
            lm1[(i + 1, i)] = c((norms[i + 1] / norms[i]).sqrt(), 0.0);
        }
        if i > 0 {
            l1[(i - 1, i)] = c(coef[i] * (norms[i - 1] / norms[i]).sqrt(), 0.0);
        }
    }
    let half = c(0.5, 0.0);
    let ihalf = c(0.0, 0.5);
    let i1 = c(0.0, 1.0);
    let e = (&l1 + &lm1) * half;
    let t = &l0 * i1 + (&l1 - &lm1) * ihalf;
    let s = &l0 * i1 - (&l1 - &lm1) * ihalf;
    let interior = size - 1;
    let comm = |a: &CMat, b: &CMat| a * b - b * a;
    let conj_m = |a: &CMat| a.map(|z| z.conj());
    let report = Sl2Report {
        m,
        k,
        bracket_l0_l1: interior_norm(&(comm(&l0, &l1) + &l1), interior),
        bracket_l0_lm1: interior_norm(&(comm(&l0, &lm1) - &lm1), interior),
        bracket_l1_lm1: interior_norm(&(comm(&l1, &lm1) + &l0 * c(2.0, 0.0)), interior),
        skew_adjoint: [&e, &t, &s].iter().map(|x| (x.adjoint() + *x).norm()).fold(0.0, f64::max),
        conj_e: interior_norm(&(conj_m(&e) - &e), interior),
        conj_t: interior_norm(&(conj_m(&t) + &t), interior),
        conj_s: interior_norm(&(conj_m(&s) + &s), interior),
        lowest: l1.column(0).norm(),
    };
    Ok(Sl2Model { l0, l1, lm1, e, t, s, norms, report })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridStudy {
    pub n: usize,
    pub l: f64,
    pub positivity_min: f64,
    pub borchers: f64,
    pub inclusion: f64,
    pub inclusion_wrong_sign: f64,
    pub mi2: f64,
}

/// The standard probes at one grid: unit Gaussian at 0, b = 1, t = 0.25.
pub fn grid_study(n: usize, l: f64) -> Result<GridStudy> {
    let ctx = build_rep(n, l)?;
    let hardy = ctx.hardy_probe(0.0, 1.0);
    let inc = inclusion_report(&ctx, 1.0, &hardy);
    let mi = modular_intersection_check(&ctx, &hardy, &[0.25], 0.25, ModularScaling::default());
    Ok(GridStudy {
        n,
        l,
        positivity_min: ctx.generator().into_iter().fold(f64::INFINITY, f64::min),
        borchers: borchers_check(&ctx, 1.0, &ctx.gaussian_probe(0.0, 1.0)).residual,
        inclusion: inc.residual,
        inclusion_wrong_sign: inc.wrong_sign,
        mi2: mi.mi2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-6 * b.abs().max(1e-300) || (a - b).abs() < 1e-15
    }

    #[test]
    fn grid_validation_and_rep() {
        assert!(matches!(build_rep(100, 4.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(build_rep(4, 4.0), Err(Error::InvalidGrid(_))));
        let ctx = build_rep(64, 4.0).unwrap();
        let v = ctx.gaussian_probe(0.3, 1.0);
        assert_eq!(ctx.translate(0.0, &v), v);
        let ab = ctx.translate(0.4, &ctx.translate(0.9, &v));
        assert!(diff_norm(&ab, &ctx.translate(1.3, &v)) < 1e-15);
        let min = ctx.generator().into_iter().fold(f64::INFINITY, f64::min);
        assert_eq!(min, (-4.0f64).exp());
        let narrow = ctx.gaussian_probe(0.0, 0.5);
        assert!(diff_norm(&ctx.frac_shift(3.0 * ctx.grid().h(), &narrow), &ctx.dilate(3, &narrow)) < 1e-10);
    }

    #[test]
    fn operator_conversion() {
        let ctx = build_rep(16, 2.0).unwrap();
        let op = ctx.rep_operator(0.7, 2, true);
        let rl = ctx.to_rl(&op).unwrap();
        assert_eq!(rl.linearity(), crate::realified::Linearity::Antilinear);
        let v = ctx.hardy_probe(0.0, 1.0);
        let via = crate::realified::complexify_vec(&rl.apply(&crate::realified::realify_vec(&nalgebra::DVector::from_vec(v.clone()))));
        assert!(diff_norm(via.as_slice(), &ctx.apply(&op, &v)) < 1e-12);
        let p = GridOperator::Shift(1).compose(&GridOperator::Shift(-3));
        assert_eq!(p, GridOperator::Shift(-2));
    }

    #[test]
    fn v0_is_standard_and_projection_agrees() {
        let ctx = build_rep(16, 8.0).unwrap();
        let v0 = standard_family(&ctx, 0.0).to_standard().unwrap();
        assert!(v0.diagnostics().standard);
        let triple = v0.modular_objects().unwrap();
        // spec(Delta_0) = {e^{-2 pi omega_m}}; the extreme eigenvalues lose digits to conditioning
        let mut logs: Vec<f64> = triple.spectrum().iter().map(|x| x.ln()).collect();
        logs.sort_by(f64::total_cmp);
        let mut expect: Vec<f64> = (0..16).map(|m| -2.0 * PI * ctx.grid().omega(m)).collect();
        expect.sort_by(f64::total_cmp);
        assert_eq!(logs.len(), expect.len());
        let err = logs.iter().zip(&expect).filter(|(_, b)| b.abs() < 10.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-4, "{logs:?}");
        let w = ctx.gaussian_probe(0.5, 0.7);
        let pw = ctx.project_v0(&w);
        let p = v0.space().projector();
        let dense = crate::realified::complexify_vec(&(p * crate::realified::realify_vec(&nalgebra::DVector::from_vec(w))));
        assert!(diff_norm(dense.as_slice(), &pw) < 1e-10);
        assert!(diff_norm(&ctx.project_v0(&pw), &pw) < 1e-12);
    }

    #[test]
    fn borchers_and_heisenberg_exact_off_wrap() {
        let ctx = build_rep(256, 4.0).unwrap();
        let rep = borchers_check(&ctx, 1.0, &ctx.gaussian_probe(0.0, 1.0));
        assert!(rep.bump_residual < 1e-12);
        assert!(borchers_check(&ctx, 0.0, &ctx.gaussian_probe(0.0, 1.0)).residual == 0.0);
        let h = heisenberg_lift(&ctx, 0.8, 5);
        assert!(h.relation_residual < 1e-12);
        assert_eq!(h.j_commutes, 0.0);
        assert!(h.min_generator > 0.0);
    }

    #[test]
    fn frozen_calibration_reproduces() {
        for cal in [CALIBRATION_COARSE, CALIBRATION_FINE] {
            let s = grid_study(cal.n, cal.l).unwrap();
            assert!(close(s.borchers, cal.borchers), "{s:?}");
            assert!(close(s.inclusion, cal.inclusion), "{s:?}");
            assert!(close(s.inclusion_wrong_sign, cal.inclusion_wrong_sign), "{s:?}");
            assert!(close(s.mi2, cal.mi2), "{s:?}");
        }
    }

    #[test]
    fn inner_functions() {
        let ctx = build_rep(64, 4.0).unwrap();
        for b in [0.0, 0.5, 1.0, 2.0] {
            let r = inner_function_check(&ctx, b).unwrap();
            assert!(r.max_modulus <= 1.0 + 1e-12);
            assert!(r.symmetry < 1e-12);
        }
        let b0 = inner_function_check(&ctx, 0.0).unwrap();
        assert!(b0.endomorphism < 1e-14);
        match inner_function_check(&ctx, -1.0) {
            Err(Error::NotDecaying { modulus, .. }) => assert!(modulus > 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn modular_intersection_trend() {
        let ctx = build_rep(256, 4.0).unwrap();
        let probe = ctx.hardy_probe(0.0, 1.0);
        let rep = modular_intersection_check(&ctx, &probe, &[0.05, 0.1, 0.2, 0.3], 0.25, ModularScaling::default());
        assert!(rep.trivial_case < 1e-12);
        assert!(rep.limit_series.last().unwrap().1 < rep.limit_series[0].1);
        assert!(rep.closed_form_series[..3].iter().all(|&(_, r)| r < 1e-2), "{rep:?}");
        assert!(rep.mi2 < 1e-3);
    }

    #[test]
    fn two_ray_small() {
        let ctx = build_rep(64, 4.0).unwrap();
        let r = two_ray_poincare(&ctx).unwrap();
        assert!(r.covariance < 1e-10);
        assert!(r.j_rel < 1e-14);
        assert!(r.plus_wrong_sign > 10.0 * r.plus_inclusion);
        assert!(r.minus_wrong_sign > 10.0 * r.minus_inclusion);
        assert!(matches!(two_ray_poincare(&build_rep(2048, 8.0).unwrap()), Err(Error::DimensionOverflow(_))));
    }

    #[test]
    fn sl2_brackets() {
        for m in [1, 2] {
            let model = sl2_lowest_weight(m, 12).unwrap();
            assert!(model.report.max_residual() < 1e-12, "{:?}", model.report);
            assert_eq!(model.l0[(0, 0)].re, m as f64);
            assert_eq!(model.l0[(12, 12)].re, (m + 12) as f64);
        }
        // m = 1: ||xi_{1+k}||^2 = k! (k+1)! / 1
        let model = sl2_lowest_weight(1, 4).unwrap();
        assert_eq!(model.norms, vec![1.0, 2.0, 12.0, 144.0, 2880.0]);
        assert!(matches!(sl2_lowest_weight(0, 5), Err(Error::InvalidParameters(_))));
    }
}
