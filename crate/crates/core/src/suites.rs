//! Verification suites behind each CLI command. Trials draw counter-split streams from the
//! master seed, so reports do not depend on thread scheduling.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::affine::{self, ModularScaling, CALIBRATION_COARSE, CALIBRATION_FINE};
use crate::error::{Error, Result};
use crate::fock::{self, FermiContext, KleinConvention};
use crate::groups::{self, FiniteGroupPair, RepType, SubgroupRep};
use crate::linalg::{self, CMat, RMat, RVec};
use nalgebra::Complex;
use crate::random::{self, trial_rng, TrialRng};
use crate::realified::{self, RealSubspace, RlOperator};
use crate::report::{Check, Provenance, Report, Series};
use crate::standard::{self, RealStructure, StandardSubspace};
use crate::vn::{self, HsModel};
use crate::wedge::{self, PoincareElement, Region, Transport, Wedge};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Standard,
    Group,
    Vn,
    Fock,
    Wedge,
    Affine,
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Standard => "standard",
            Command::Group => "group",
            Command::Vn => "vn",
            Command::Fock => "fock",
            Command::Wedge => "wedge",
            Command::Affine => "affine",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub dim: Option<usize>,
    pub trials: Option<usize>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub grid_n: usize,
    pub grid_l: f64,
    pub fermi_dim: usize,
    pub preset: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            dim: None,
            trials: None,
            seed: 0,
            tol: None,
            grid_n: 256,
            grid_l: 4.0,
            fermi_dim: 4,
            preset: None,
        }
    }
}

impl SuiteConfig {
    /// --tol overrides every absolute residual tolerance.
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn trials(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

pub fn run(cmd: Command, cfg: &SuiteConfig) -> Result<Report> {
    let start = Instant::now();
    let mut report = match cmd {
        Command::Standard => standard_suite(cfg)?,
        Command::Group => group_suite(cfg)?,
        Command::Vn => vn_suite(cfg)?,
        Command::Fock => fock_suite(cfg)?,
        Command::Wedge => wedge_suite(cfg)?,
        Command::Affine => affine_suite(cfg)?,
        Command::All => {
            let mut all = Report::new("all", cfg.seed);
            for c in [Command::Standard, Command::Group, Command::Vn, Command::Fock, Command::Wedge, Command::Affine] {
                all.absorb(run(c, cfg)?);
            }
            all
        }
    };
    report.command = cmd.name().to_string();
    report.seed = cfg.seed;
    for (k, v) in serde_json::to_value(cfg)?.as_object().into_iter().flatten() {
        report.input.insert(k.clone(), v.clone());
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

// ---------------------------------------------------------------- standard

/// Largest ||C|| for random V = U (1 + iC) R^d, keeping spec(Delta) within [1/361, 361].
pub const MAX_C_NORM: f64 = 0.9;

pub fn random_standard(rng: &mut TrialRng, d: usize) -> Result<StandardSubspace> {
    let u = random::unitary(rng, d);
    let mut cm = random::skew(rng, d);
    let norm = linalg::op_norm(&cm);
    if norm > 0.0 {
        cm *= rng.random_range(0.0..MAX_C_NORM) / norm;
    }
    let g = CMat::from_fn(d, d, |i, j| Complex::new(if i == j { 1.0 } else { 0.0 }, cm[(i, j)]));
    StandardSubspace::from_complex_matrix(&(u * g))
}

struct StdTrial {
    d: usize,
    bijection: f64,
    modular: f64,
    j_dual: f64,
    delta_dual: f64,
    bidual: f64,
    factorial: f64,
}

/// Fix(J) cap ker(Delta - 1) as a real subspace.
fn fixed_points(triple: &standard::ModularTriple) -> Result<RealSubspace> {
    let n = triple.delta.matrix().nrows();
    let id = RMat::identity(n, n);
    let mut stack = RMat::zeros(2 * n, n);
    stack.rows_mut(0, n).copy_from(&(triple.delta.matrix() - &id));
    stack.rows_mut(n, n).copy_from(&(triple.j.matrix() - &id));
    let null = linalg::nullspace(&stack, 1e-9);
    if null.ncols() == 0 {
        Ok(RealSubspace::zero(n / 2))
    } else {
        RealSubspace::from_spanning(n / 2, &null)
    }
}

fn standard_trial(seed: u64, i: usize, dmax: usize) -> Result<StdTrial> {
    let mut rng = trial_rng(seed, i as u64);
    let d = 1 + i % dmax;
    let v = if i % 4 == 3 && d >= 2 {
        StandardSubspace::real_points(1).direct_sum(&random_standard(&mut rng, d - 1)?)?
    } else {
        random_standard(&mut rng, d)?
    };
    let m = v.modular_objects()?;
    let vp = v.symplectic_complement()?;
    let mp = vp.modular_objects()?;
    let fixed = v.space().intersection(vp.space())?;
    Ok(StdTrial {
        d,
        bijection: m.fix_s().distance(v.space())?,
        modular: m.modular_residual(),
        j_dual: mp.j.distance(&m.j),
        delta_dual: mp.delta.compose(&m.delta).distance(&RlOperator::identity(d)),
        bidual: vp.symplectic_complement()?.distance(&v)?,
        factorial: fixed.distance(&fixed_points(&m)?)?,
    })
}

struct FlowTrial {
    generator: f64,
    form: f64,
    intertwining: f64,
}

fn flow_trial(seed: u64, i: usize, mmax: usize) -> Result<FlowTrial> {
    let mut rng = trial_rng(seed ^ 0x5eed_f10e, i as u64);
    let m = 1 + i % mmax;
    let dgen = random::skew(&mut rng, m);
    let fe = standard::flow_embedding(&dgen)?;
    let mt = fe.v.modular_objects()?;
    let ir = fe.iota_real();
    let mut inter: f64 = 0.0;
    for t in [0.3, -0.3, 1.0, -1.0] {
        let lhs = mt.modular_group(t)?.matrix() * &ir;
        let rhs = &ir * linalg::expm(&(&dgen * t));
        inter = inter.max((lhs - rhs).norm());
    }
    Ok(FlowTrial {
        generator: (fe.generator_from_flow()? - &dgen).norm(),
        form: (standard::generator_from_c(&fe.form()) - &dgen).norm(),
        intertwining: inter,
    })
}

/// Spectrum of the c-example by the polar path and by the C-formula path.
pub fn closed_form_spectra(cval: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let polar = standard::c_example(cval)?.modular_objects()?.spectrum();
    let cm = RMat::from_row_slice(2, 2, &[0.0, cval, -cval, 0.0]);
    let half = standard::half_delta_from_c(&RealStructure::canonical(2), &cm)?;
    let formula = realified::positive_spectrum(&half.compose(&half));
    Ok((polar, formula))
}

fn spectrum_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    max_of(a.iter().zip(b).map(|(x, y)| (x - y).abs()))
}

pub fn standard_suite(cfg: &SuiteConfig) -> Result<Report> {
    let dmax = cfg.dim.unwrap_or(8);
    if dmax == 0 {
        return Err(Error::InvalidParameters("--dim must be at least 1".into()));
    }
    let trials = cfg.trials(200);
    let seed = cfg.seed;
    let res: Vec<StdTrial> = (0..trials).into_par_iter().map(|i| standard_trial(seed, i, dmax)).collect::<Result<_>>()?;
    let flows: Vec<FlowTrial> =
        (0..trials).into_par_iter().map(|i| flow_trial(seed, i, dmax.min(8))).collect::<Result<_>>()?;
    let tol = cfg.tol(1e-9);
    let mut r = Report::new("standard", seed);
    use Provenance::*;
    r.push(Check::new("fix(J Delta^1/2) recovers V", max_of(res.iter().map(|t| t.bijection)), tol, Derived));
    r.push(Check::new("J Delta J Delta = 1", max_of(res.iter().map(|t| t.modular)), tol, Derived));
    r.push(Check::new("J of V' equals J of V", max_of(res.iter().map(|t| t.j_dual)), tol, Derived));
    r.push(Check::new("Delta of V' is the inverse", max_of(res.iter().map(|t| t.delta_dual)), tol, Derived));
    r.push(Check::new("V'' = V", max_of(res.iter().map(|t| t.bidual)), tol, Derived));
    r.push(Check::new("V cap V' = Fix(J) cap ker(Delta - 1)", max_of(res.iter().map(|t| t.factorial)), tol, Derived));

    let want = [1.0 / 9.0, 9.0];
    let (polar, formula) = closed_form_spectra(0.5)?;
    r.push(Check::new("c = 1/2 spectrum {1/9, 9} by polar decomposition", spectrum_distance(&polar, &want), cfg.tol(1e-10), ClosedForm));
    r.push(Check::new("c = 1/2 spectrum {1/9, 9} by the C formula", spectrum_distance(&formula, &want), cfg.tol(1e-10), ClosedForm));
    r.push(Check::new("polar and C-formula spectra agree", spectrum_distance(&polar, &formula), cfg.tol(1e-10), Derived));

    r.push(Check::new("flow generator recovered from Delta", max_of(flows.iter().map(|f| f.generator)), tol, Derived));
    r.push(Check::new("flow generator recovered from Im<iota, iota>", max_of(flows.iter().map(|f| f.form)), tol, Derived));
    r.push(Check::new("Delta^{it} iota = iota e^{tD}", max_of(flows.iter().map(|f| f.intertwining)), cfg.tol(1e-8), Derived));
    let w = 3f64.ln();
    let fe = standard::flow_embedding(&RMat::from_row_slice(2, 2, &[0.0, w, -w, 0.0]))?;
    let spec = fe.v.modular_objects()?.spectrum();
    r.push(Check::new("flow with omega = log 3 has spectrum {1/3, 3}", spectrum_distance(&spec, &[1.0 / 3.0, 3.0]), cfg.tol(1e-10), ClosedForm));

    let series = (1..=dmax)
        .map(|d| (d as f64, max_of(res.iter().filter(|t| t.d == d).map(|t| t.bijection))))
        .collect();
    r.series.push(Series::new("bijection residual vs dim", series));
    Ok(r)
}

// ---------------------------------------------------------------- group

pub const DEFAULT_PRESETS: [&str; 3] = ["s3", "cyclic-x-z2:3", "q8-x-z2"];

fn expected_type(name: &str) -> Option<RepType> {
    match name {
        "s3" => Some(RepType::Real),
        "cyclic-x-z2" | "cyclic-x-z2:3" => Some(RepType::Complex),
        "q8-x-z2" => Some(RepType::Quaternionic),
        _ => None,
    }
}

fn type_dim(t: RepType) -> usize {
    match t {
        RepType::Real => 1,
        RepType::Complex => 2,
        RepType::Quaternionic => 4,
    }
}

/// A faithful-ish irreducible representation of G1 for each preset family.
pub fn preset_irrep(pair: &FiniteGroupPair, name: &str) -> Result<SubgroupRep> {
    let param = |s: &str| -> Result<usize> {
        s.parse().map_err(|_| Error::InvalidGroup(format!("bad preset parameter in {name}")))
    };
    match name.split_once(':') {
        None if name == "q8-x-z2" => groups::q8_irrep(pair),
        None if name == "s3" => groups::character(pair, 1, 1, 3),
        None if name == "z2" => SubgroupRep::from_generators(pair, &[]),
        None if name == "z4" => groups::character(pair, 2, 1, 2),
        None if name == "cyclic" => groups::character(pair, 2, 1, 2),
        None if name == "dihedral" || name == "cyclic-x-z2" => groups::character(pair, 1, 1, 3),
        Some(("cyclic", "1")) | Some(("cyclic-x-z2", "1")) => SubgroupRep::from_generators(pair, &[]),
        Some(("dihedral", n)) | Some(("cyclic-x-z2", n)) => groups::character(pair, 1, 1, param(n)?),
        Some(("cyclic", n)) => groups::character(pair, 2, 1, param(n)?),
        _ => Err(Error::InvalidGroup(format!("no irreducible preset representation for {name}"))),
    }
}

pub fn group_suite(cfg: &SuiteConfig) -> Result<Report> {
    let names: Vec<String> = match &cfg.preset {
        Some(p) => vec![p.clone()],
        None => DEFAULT_PRESETS.iter().map(|s| s.to_string()).collect(),
    };
    let mut r = Report::new("group", cfg.seed);
    let mut series = Vec::new();
    use Provenance::*;
    for (idx, name) in names.iter().enumerate() {
        let pair = FiniteGroupPair::preset(name)?;
        let u = preset_irrep(&pair, name)?;
        let kind = groups::classify_type(&pair, &u)?.kind;
        if let Some(want) = expected_type(name) {
            r.push(Check::flag(format!("{name}: type is {want:?}"), kind == want, ClosedForm));
        }
        let ext = groups::extend_representation(&pair, &u)?;
        let cr = groups::commutant_classify(&pair, &ext.rep)?;
        let brute = groups::brute_force_commutant_dim(&pair, &ext.rep);
        r.push(Check::new(
            format!("{name}: brute-force commutant dimension = {}", type_dim(kind)),
            (brute as f64 - type_dim(kind) as f64).abs(),
            0.0,
            Derived,
        ));
        r.push(Check::flag(format!("{name}: commutant classifier agrees"), cr.real_dim == brute, Derived));
        r.push(Check::new(format!("{name}: extension is a homomorphism"), ext.rep.homomorphism_residual(&pair), cfg.tol(1e-10), Derived));

        let mut rng = trial_rng(cfg.seed, 7000 + idx as u64);
        let w = random::unitary(&mut rng, u.dim());
        let mut others = vec![groups::extend_representation(&pair, &u.conjugate_by(&w))?.rep];
        if kind == RepType::Complex {
            others.push(groups::doubled_extension(&pair, &u.dual_twisted(&pair))?);
        }
        let mut worst: f64 = 0.0;
        let mut agree = true;
        for b in &others {
            let eq = groups::are_equivalent(&pair, &ext.rep, b)?;
            worst = worst.max(eq.residual);
            agree &= eq.agree;
        }
        r.push(Check::new(format!("{name}: independent extensions are equivalent"), worst, cfg.tol(1e-8), Derived));
        r.push(Check::flag(format!("{name}: G and G1 equivalence agree"), agree, Derived));
        series.push((idx as f64, worst));
    }
    r.series.push(Series::new("intertwiner residual by preset", series));
    Ok(r)
}

// ---------------------------------------------------------------- vn

struct VnTrial {
    n: usize,
    flow: f64,
    jmj: f64,
    center: f64,
    commutant_space: f64,
    modular: f64,
}

fn block_trial(seed: u64, i: usize) -> Result<VnTrial> {
    let mut rng = trial_rng(seed, i as u64);
    let blocks = rng.random_range(1..=3);
    let sizes: Vec<usize> = (0..blocks).map(|_| rng.random_range(1..=2)).collect();
    let n: usize = sizes.iter().map(|s| s * s).sum();
    let w = random::unitary(&mut rng, n);
    let a = vn::block_algebra(&sizes, &w);
    let omega = random::unit_vector(&mut rng, n);
    let (md, rep) = vn::tomita_modular(&a, &omega)?;
    let vp = md.v.symplectic_complement()?;
    Ok(VnTrial {
        n,
        flow: rep.flow_residual,
        jmj: rep.jmj_distance,
        center: rep.center_residual,
        commutant_space: vn::commutant_space(&a, &omega).distance(vp.space())?,
        modular: rep.modular_residual / delta_condition(&md.triple.spectrum()),
    })
}

fn delta_condition(spec: &[f64]) -> f64 {
    let hi = spec.iter().copied().fold(0.0, f64::max);
    let lo = spec.iter().copied().fold(f64::INFINITY, f64::min);
    (hi / lo).max(1.0)
}

struct HsTrial {
    delta: f64,
    j: f64,
    jmj: f64,
}

fn hs_trial(seed: u64, i: usize) -> Result<HsTrial> {
    let mut rng = trial_rng(seed, 100_000 + i as u64);
    let k = 1 + i % 4;
    let hs = HsModel::new(random::density(&mut rng, k))?;
    let (md, rep) = vn::tomita_modular(&hs.algebra(), &hs.omega())?;
    Ok(HsTrial {
        delta: md.triple.delta.distance(&hs.delta_closed()),
        j: md.triple.j.distance(&hs.j_closed()),
        jmj: rep.jmj_distance,
    })
}

pub fn vn_suite(cfg: &SuiteConfig) -> Result<Report> {
    let seed = cfg.seed;
    let hs: Vec<HsTrial> = (0..8).into_par_iter().map(|i| hs_trial(seed, i)).collect::<Result<_>>()?;
    let blocks: Vec<VnTrial> =
        (0..cfg.trials(50)).into_par_iter().map(|i| block_trial(seed, i)).collect::<Result<_>>()?;
    let tol = cfg.tol(1e-8);
    let mut r = Report::new("vn", seed);
    use Provenance::*;
    r.push(Check::new("HS model: Delta = (A -> D A D^-1)", max_of(hs.iter().map(|t| t.delta)), tol, ClosedForm));
    r.push(Check::new("HS model: J = (A -> A*)", max_of(hs.iter().map(|t| t.j)), tol, ClosedForm));
    r.push(Check::new("HS model: J M J = M'", max_of(hs.iter().map(|t| t.jmj)), tol, Derived));
    r.push(Check::new("blocks: log Delta normalizes M", max_of(blocks.iter().map(|t| t.flow)), tol, Derived));
    r.push(Check::new("blocks: J M J = M'", max_of(blocks.iter().map(|t| t.jmj)), tol, Derived));
    r.push(Check::new("blocks: J z J = z* on the center", max_of(blocks.iter().map(|t| t.center)), tol, Derived));
    r.push(Check::new("blocks: V_{M'} = (V_M)'", max_of(blocks.iter().map(|t| t.commutant_space)), tol, Derived));
    r.push(Check::new("blocks: J Delta J Delta = 1 relative to cond(Delta)", max_of(blocks.iter().map(|t| t.modular)), tol, Derived));
    let mut dims: Vec<usize> = blocks.iter().map(|t| t.n).collect();
    dims.sort_unstable();
    dims.dedup();
    let series = dims
        .iter()
        .map(|&n| (n as f64, max_of(blocks.iter().filter(|t| t.n == n).map(|t| t.jmj))))
        .collect();
    r.series.push(Series::new("JMJ = M' residual vs dim", series));
    Ok(r)
}

// ---------------------------------------------------------------- fock

struct FermiTrial {
    d: usize,
    twisted: f64,
    supercommutation: f64,
    delta: f64,
    j: f64,
    cyclic_separating: bool,
}

fn fermi_trial(ctx: &FermiContext, seed: u64, i: usize) -> Result<FermiTrial> {
    let d = ctx.d();
    let mut rng = trial_rng(seed, (d * 10_000 + i) as u64);
    let v = random_standard(&mut rng, d)?;
    let tw = fock::twisted_duality_check(ctx, v.space())?;
    let fm = fock::fermi_modular_check(ctx, &v, KleinConvention::Standard)?;
    Ok(FermiTrial {
        d,
        twisted: tw.distance,
        supercommutation: tw.supercommutation_residual,
        delta: fm.delta_residual,
        j: fm.j_residual,
        cyclic_separating: fm.cyclic && fm.separating,
    })
}

pub fn fock_suite(cfg: &SuiteConfig) -> Result<Report> {
    let dmax = cfg.fermi_dim;
    if !(1..=fock::MAX_FERMI_DIM).contains(&dmax) {
        return Err(Error::InvalidParameters(format!("--fermi-dim must be in 1..={}", fock::MAX_FERMI_DIM)));
    }
    let seed = cfg.seed;
    let trials = cfg.trials(20);
    let ctxs: Vec<FermiContext> = (1..=fock::MAX_FERMI_DIM).map(FermiContext::new).collect::<Result<_>>()?;
    let car = max_of(ctxs.iter().map(|c| c.car_residual()));
    let klein = max_of(ctxs.iter().map(|c| c.klein_residual()));
    let jobs: Vec<(usize, usize)> = (1..=dmax).flat_map(|d| (0..trials).map(move |i| (d, i))).collect();
    let res: Vec<FermiTrial> =
        jobs.par_iter().map(|&(d, i)| fermi_trial(&ctxs[d - 1], seed, i)).collect::<Result<_>>()?;
    let mut rng = trial_rng(seed, 999_999);
    let bv = random_standard(&mut rng, 2)?;
    let bose = fock::bose_checks(&bv, 100, &mut rng)?;

    let tol = cfg.tol(1e-8);
    let exact = cfg.tol(1e-12);
    let mut r = Report::new("fock", seed);
    use Provenance::*;
    r.push(Check::new("CAR relations, d <= 5", car, exact, Exact));
    r.push(Check::new("Klein twist relations", klein, exact, Exact));
    r.push(Check::flag("vacuum cyclic and separating", res.iter().all(|t| t.cyclic_separating), Derived));
    r.push(Check::new("twisted duality R(V')  = Z R(V)' Z*", max_of(res.iter().map(|t| t.twisted)), tol, Derived));
    r.push(Check::new("twisted commutant supercommutes", max_of(res.iter().map(|t| t.supercommutation)), tol, Derived));
    r.push(Check::new("Delta_Fock = Gamma(Delta_V)", max_of(res.iter().map(|t| t.delta)), tol, Derived));
    r.push(Check::new("J_Fock = Z Gamma(i J_V)", max_of(res.iter().map(|t| t.j)), tol, Derived));
    r.push(Check::new("Weyl relation U(x)U(y)", bose.weyl_u_residual, exact, Derived));
    r.push(Check::new("Weyl relation W(x)W(y)", bose.weyl_w_residual, exact, Derived));
    r.push(Check::new("<Omega, W(v) Omega> = exp(-|v|^2/4)", bose.vacuum_residual, exact, ClosedForm));
    // these go through the numerically computed J and Delta of V
    let computed = cfg.tol(1e-10);
    r.push(Check::new("second quantization preserves coherent products", bose.gamma_residual, computed, Derived));
    r.push(Check::new("Gamma(J Delta^1/2) = Gamma(S) on coherent vectors", bose.modular_residual, computed, Derived));
    r.push(Check::new("Weyl operators of V and V' commute", bose.locality_residual, exact, Derived));
    let series = (1..=dmax)
        .map(|d| (d as f64, max_of(res.iter().filter(|t| t.d == d).map(|t| t.twisted.max(t.delta).max(t.j)))))
        .collect();
    r.series.push(Series::new("fermionic residual vs d", series));
    Ok(r)
}

// ---------------------------------------------------------------- wedge

pub const WEDGE_SAMPLES: usize = 10_000;

struct WedgeTrial {
    contradictions: usize,
    involution: f64,
    reflection_hom: f64,
    complement_dual: f64,
    covariance: f64,
    reflection_law: f64,
}

fn perturbed(rng: &mut TrialRng, d: usize, kind: usize) -> PoincareElement {
    match kind {
        0 => PoincareElement::random(rng, d, 0.5),
        1 => {
            let flip = rng.random_bool(0.5);
            wedge::random_semigroup_element(rng, d, flip)
        }
        _ => {
            let g = wedge::random_semigroup_element(rng, d, false);
            let eps = RVec::from_fn(d, |_, _| 1e-2 * random::normal(rng));
            PoincareElement::translation(eps).compose(&g)
        }
    }
}

fn wedge_trial(seed: u64, i: usize, d: usize) -> Result<WedgeTrial> {
    let mut rng = trial_rng(seed, i as u64);
    let wr = Wedge::right(d);
    let w = wr.transformed(&perturbed(&mut rng, d, i % 3));
    let mut contradictions = 0;
    for (a, b) in [(&w, &wr), (&wr, &w)] {
        if wedge::wedge_leq(a, b)? {
            contradictions += usize::from(wedge::inclusion_violations(a, b, &mut rng, WEDGE_SAMPLES) > 0);
        } else {
            contradictions += usize::from(wedge::non_inclusion_witness(a, b, &mut rng, WEDGE_SAMPLES).is_none());
        }
    }
    let ts = [0.5, 2.0, -0.7, -3.0];
    let r = w.reflection();
    let id = PoincareElement::identity(d);
    let gam = w.hom();
    let mut g = PoincareElement::random(&mut rng, d, 0.5);
    if i % 2 == 1 {
        g = PoincareElement::r01(d).compose(&g);
    }
    let moved = w.transformed(&g).hom();
    // pointwise g gamma_W(t^{+-1}) g^{-1}, inverted argument when g reverses time
    let ginv = g.inverse();
    let mut covariance: f64 = 0.0;
    for &t in &ts {
        let arg = if g.is_orthochronous() { t } else { 1.0 / t };
        let expected = g.compose(&gam.eval(arg)?).compose(&ginv);
        covariance = covariance.max(moved.eval(t)?.distance(&expected));
    }
    let transported = wedge::bgl_transport(&gam, &g, Transport::Conjugate)?;
    let transported = if g.is_orthochronous() { transported } else { wedge::bgl_transport(&transported, &g, Transport::Dual)? };
    covariance = covariance.max(moved.distance_at(&transported, &ts)?);
    let other = Wedge::new(PoincareElement::random(&mut rng, d, 0.5));
    let lhs = r.compose(&other.reflection()).compose(&r);
    Ok(WedgeTrial {
        contradictions,
        involution: r.compose(&r).distance(&id),
        reflection_hom: gam.eval(-1.0)?.distance(&r),
        complement_dual: w.complement().hom().distance_at(&gam.dual(), &ts)?,
        covariance,
        reflection_law: lhs.distance(&other.transformed(&r).reflection()),
    })
}

fn random_point(rng: &mut TrialRng, d: usize) -> RVec {
    RVec::from_fn(d, |_, _| random::normal(rng))
}

fn random_timelike_pair(rng: &mut TrialRng, d: usize) -> (RVec, RVec) {
    let c = random_point(rng, d);
    let half = |rng: &mut TrialRng| {
        let a = rng.random_range(0.5..1.5);
        let mut v = RVec::from_fn(d, |_, _| random::normal(rng));
        v[0] = 0.0;
        let scale = rng.random_range(0.0..0.45) * a / v.norm().max(1e-12);
        let mut u = v * scale;
        u[0] = a;
        u
    };
    let (up, down) = (half(rng), half(rng));
    (&c + up, c - down)
}

fn random_region(rng: &mut TrialRng, d: usize) -> Result<Region> {
    Ok(match rng.random_range(0..5) {
        0 => Region::Wedge(Wedge::new(PoincareElement::random(rng, d, 0.5))),
        1 => {
            let (t, b) = random_timelike_pair(rng, d);
            Region::double_cone(t, b)?
        }
        2 => Region::Points(vec![random_point(rng, d)]),
        3 => Region::Spacelike(vec![random_point(rng, d)]),
        _ => {
            let (t, b) = random_timelike_pair(rng, d);
            Region::Spacelike(vec![t, b])
        }
    })
}

/// Second region of a pair: often built inside or around the first so inclusions occur.
fn related_region(rng: &mut TrialRng, d: usize, a: &Region) -> Result<Region> {
    if rng.random_bool(0.5) {
        return random_region(rng, d);
    }
    Ok(match a {
        Region::Wedge(w) => {
            let h = wedge::random_semigroup_element(rng, d, false);
            Region::Wedge(Wedge::new(w.frame().compose(&h)))
        }
        Region::DoubleCone { top, bottom } => {
            let mid = (top + bottom) / 2.0;
            let s = if rng.random_bool(0.5) { 1.5 } else { 0.6 };
            Region::double_cone(&mid + (top - &mid) * s, &mid + (bottom - &mid) * s)?
        }
        Region::Points(ps) | Region::Spacelike(ps) => {
            let x = &ps[0];
            let mut up = RVec::zeros(d);
            up[0] = 1.0;
            Region::double_cone(x + &up, x - &up)?
        }
    })
}

pub fn region_pairs(seed: u64, count: usize, d: usize) -> Result<Vec<(Region, Region)>> {
    (0..count)
        .map(|i| {
            let mut rng = trial_rng(seed, 500_000 + i as u64);
            let a = random_region(&mut rng, d)?;
            let b = related_region(&mut rng, d, &a)?;
            Ok(if rng.random_bool(0.5) { (a, b) } else { (b, a) })
        })
        .collect()
}

pub fn wedge_suite(cfg: &SuiteConfig) -> Result<Report> {
    let d = cfg.dim.unwrap_or(4);
    if !(2..=6).contains(&d) {
        return Err(Error::InvalidParameters("wedge dimension must be in 2..=6".into()));
    }
    let seed = cfg.seed;
    let trials = cfg.trials(500);
    let res: Vec<WedgeTrial> = (0..trials).into_par_iter().map(|i| wedge_trial(seed, i, d)).collect::<Result<_>>()?;
    let pairs = region_pairs(seed, 1000, d)?;
    let order = wedge::order_axiom_check(&pairs)?;
    let tol = cfg.tol(1e-8);
    let mut r = Report::new("wedge", seed);
    use Provenance::*;
    let contradictions: usize = res.iter().map(|t| t.contradictions).sum();
    r.push(Check::new("inclusion test agrees with sampling and witnesses", contradictions as f64, 0.0, Derived));
    r.push(Check::new("order reversal (A1)", order.a1_violations as f64, 0.0, Derived));
    r.push(Check::new("l <= m' iff m <= l' (A2)", order.a2_violations as f64, 0.0, Derived));
    r.push(Check::new("l <= l'' and l' = l'''", (order.bidual_violations + order.triple_violations) as f64, 0.0, Derived));
    r.push(Check::new(
        "order axioms decided on most pairs",
        1.0 - order.decided as f64 / order.pairs.max(1) as f64,
        0.1,
        Derived,
    ));
    r.push(Check::new("r_W is an involution", max_of(res.iter().map(|t| t.involution)), tol, Exact));
    r.push(Check::new("gamma_W(-1) = r_W", max_of(res.iter().map(|t| t.reflection_hom)), tol, Exact));
    r.push(Check::new("gamma_{W'} = dual of gamma_W", max_of(res.iter().map(|t| t.complement_dual)), tol, Derived));
    r.push(Check::new("gamma_{gW} from transport", max_of(res.iter().map(|t| t.covariance)), tol, Derived));
    r.push(Check::new("r_W r_U r_W = r_{r_W U}", max_of(res.iter().map(|t| t.reflection_law)), tol, Derived));
    r.echo("region_pairs", order.pairs);
    r.echo("region_pairs_decided", order.decided);
    let series = (0..3)
        .map(|k| (k as f64, max_of(res.iter().skip(k).step_by(3).map(|t| t.covariance))))
        .collect();
    r.series.push(Series::new("transport residual by element family", series));
    Ok(r)
}

// ---------------------------------------------------------------- affine

/// fine / coarse, with coarse values at rounding level treated as the floor.
pub fn refinement_ratio(coarse: f64, fine: f64) -> f64 {
    fine / coarse.max(10.0 * affine::ROUNDING_FLOOR)
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn affine_suite(cfg: &SuiteConfig) -> Result<Report> {
    let ctx = affine::build_rep(cfg.grid_n, cfg.grid_l)?;
    let grid = ctx.grid();
    let mut r = Report::new("affine", cfg.seed);
    use Provenance::*;
    let exact = cfg.tol(1e-12);
    let loose = cfg.tol(1e-2);

    let p = ctx.generator();
    let pmin = p.iter().copied().fold(f64::INFINITY, f64::min);
    r.push(Check::flag("translation generator e^theta > 0", p.iter().all(|&x| x > 0.0), Exact));
    r.push(Check::new("min spec P = e^-L", (pmin - (-grid.l).exp()).abs(), exact, ClosedForm));

    let gauss = ctx.gaussian_probe(0.0, 1.0);
    let hardy = ctx.hardy_probe(0.0, 1.0);
    let bor = affine::borchers_check(&ctx, 1.0, &gauss);
    r.push(Check::new("Borchers relation on a bulk bump", bor.bump_residual, exact, Derived));
    r.push(Check::new("Borchers residual within wrap-band mass", bor.residual, 2.0 * bor.wrap_mass + 1e-15, Derived));
    let inc = affine::inclusion_report(&ctx, 1.0, &hardy);
    r.push(Check::new("U(1) V_0 inside V_0", inc.residual, loose, Convergence));
    r.push(Check::new("one-sided: residual(+1) / residual(-1)", inc.residual / inc.wrong_sign, cfg.tol(1e-2), Derived));
    let ts = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3];
    let mi = affine::modular_intersection_check(&ctx, &hardy, &ts, 0.25, ModularScaling::default());
    r.push(Check::new("MI2: J S J S = 1", mi.mi2, loose, Convergence));
    r.push(Check::new("S_t = 1 when H1 = H2", mi.trivial_case, exact, Exact));
    r.push(Check::new(
        "S_t matches W(e^{-2 pi t} - 1) at t = 0.1",
        mi.closed_form_series[1].1,
        loose,
        Convergence,
    ));
    let std0 = affine::standard_family(&ctx, 0.0);
    let cov = affine::diff_norm(&std0.project(&hardy), &ctx.project_vx(0.0, &hardy));
    r.push(Check::new("V_x at x = 0 is V_0", cov, exact, Exact));

    for b in [0.5, 1.0, 2.0] {
        let inner = affine::inner_function_check(&ctx, b)?;
        r.push(Check::new(format!("|B| <= 1 for b = {b}"), (inner.max_modulus - 1.0).max(0.0), exact, ClosedForm));
        r.push(Check::new(format!("B symmetric for b = {b}"), inner.symmetry, exact, ClosedForm));
    }
    let rejected = matches!(affine::inner_function_check(&ctx, -1.0), Err(Error::NotDecaying { modulus, .. }) if modulus > 1.0);
    r.push(Check::flag("b = -1 rejected with |B| > 1 witness", rejected, Exact));

    let heis = affine::heisenberg_lift(&ctx, 0.8, grid.steps(0.5));
    r.push(Check::new("V_t W_s V_-t = e^{ist} W_s", heis.relation_residual, exact, Derived));
    r.push(Check::new("J P J = P", heis.j_commutes, exact, Exact));

    if grid.n <= affine::TWO_RAY_CAP {
        let two = affine::two_ray_poincare(&ctx)?;
        r.push(Check::new("light-ray covariance under boosts", two.covariance, cfg.tol(1e-10), Derived));
        r.push(Check::new("J_H1 J_H2 = J_V J_H2 J_H1 J_V", two.j_rel, exact, Derived));
        r.push(Check::new("ray + half-sided inclusion", two.plus_inclusion, loose, Convergence));
        r.push(Check::new("ray - half-sided inclusion", two.minus_inclusion, loose, Convergence));
    }

    for m in [1, 2] {
        let model = affine::sl2_lowest_weight(m, 12)?;
        r.push(Check::new(format!("sl2 brackets and conjugations, m = {m}"), model.report.max_residual(), exact, Derived));
    }

    // frozen refinement pair
    let coarse = affine::grid_study(CALIBRATION_COARSE.n, CALIBRATION_COARSE.l)?;
    let fine = affine::grid_study(CALIBRATION_FINE.n, CALIBRATION_FINE.l)?;
    let two_c = affine::two_ray_poincare(&affine::build_rep(CALIBRATION_COARSE.n, CALIBRATION_COARSE.l)?)?;
    let two_f = affine::two_ray_poincare(&affine::build_rep(CALIBRATION_FINE.n, CALIBRATION_FINE.l)?)?;
    let need = 1.0 / affine::REFINEMENT_FACTOR;
    r.push(Check::new("refinement: Borchers", refinement_ratio(coarse.borchers, fine.borchers), need, Convergence));
    r.push(Check::new("refinement: inclusion", refinement_ratio(coarse.inclusion, fine.inclusion), need, Convergence));
    r.push(Check::new("refinement: MI2", refinement_ratio(coarse.mi2, fine.mi2), need, Convergence));
    r.push(Check::new("refinement: J relation", refinement_ratio(two_c.j_rel, two_f.j_rel), need, Convergence));
    r.push(Check::new(
        "fine grid one-sidedness ratio >= 1e2",
        fine.inclusion / fine.inclusion_wrong_sign,
        1.0 / affine::ONE_SIDEDNESS_RATIO,
        Convergence,
    ));
    let drift = max_of([
        rel_diff(coarse.borchers, CALIBRATION_COARSE.borchers),
        rel_diff(coarse.inclusion, CALIBRATION_COARSE.inclusion),
        rel_diff(coarse.mi2, CALIBRATION_COARSE.mi2),
        rel_diff(fine.borchers, CALIBRATION_FINE.borchers),
        rel_diff(fine.inclusion, CALIBRATION_FINE.inclusion),
        rel_diff(fine.mi2, CALIBRATION_FINE.mi2),
    ]);
    r.push(Check::new("frozen calibration reproduced", drift, 1e-6, Convergence));

    let ladder: Vec<affine::GridStudy> =
        [(64, 2.0), (256, 4.0), (1024, 8.0)].iter().map(|&(n, l)| affine::grid_study(n, l)).collect::<Result<_>>()?;
    r.series.push(Series::new("inclusion residual vs N", ladder.iter().map(|s| (s.n as f64, s.inclusion)).collect()));
    r.series.push(Series::new("MI2 residual vs N", ladder.iter().map(|s| (s.n as f64, s.mi2)).collect()));
    r.series.push(Series::new("Borchers residual vs N", ladder.iter().map(|s| (s.n as f64, s.borchers)).collect()));
    r.series.push(Series::new("|S_t phi - W(-1) phi| vs t", mi.limit_series.clone()));
    r.echo("mi_converged", mi.converged);
    Ok(r)
}

/// Dense check that the grid V_0 basis and the Fourier projection agree, exported for tests.
pub fn grid_projection_agreement(n: usize, l: f64) -> Result<f64> {
    let ctx = affine::build_rep(n, l)?;
    let v0 = affine::standard_family(&ctx, 0.0).to_standard()?;
    let w = ctx.gaussian_probe(0.5, 0.7);
    let pw = ctx.project_v0(&w);
    let dense = realified::complexify_vec(&(v0.space().projector() * realified::realify_vec(&nalgebra::DVector::from_vec(w))));
    Ok(affine::diff_norm(dense.as_slice(), &pw))
}
