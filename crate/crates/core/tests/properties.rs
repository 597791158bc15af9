use modkit::affine::{self, build_rep};
use modkit::linalg::{self, c, RMat};
use modkit::random::{self, trial_rng};
use modkit::report::{Check, Provenance, Report, Series};
use modkit::standard::{self, RealStructure, StandardSubspace};
use modkit::suites::random_standard;
use modkit::wedge::{self, PoincareElement, Wedge};
use modkit::json;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn modular_objects_recover_v(seed in any::<u64>(), d in 1usize..=5) {
        let mut rng = trial_rng(seed, 0);
        let v = random_standard(&mut rng, d).unwrap();
        let m = v.modular_objects().unwrap();
        prop_assert!(m.modular_residual() < 1e-9);
        prop_assert!(m.fix_s().distance(v.space()).unwrap() < 1e-9);
        prop_assert!(standard::spectral_symmetry_residual(&m.spectrum()) < 1e-9);
    }

    #[test]
    fn complement_is_an_involution(seed in any::<u64>(), d in 1usize..=5) {
        let mut rng = trial_rng(seed, 1);
        let v = random_standard(&mut rng, d).unwrap();
        let vpp = v.symplectic_complement().unwrap().symplectic_complement().unwrap();
        prop_assert!(vpp.distance(&v).unwrap() < 1e-9);
    }

    #[test]
    fn c_parametrization_round_trips(seed in any::<u64>(), d in 1usize..=5, scale in 0.0f64..0.95) {
        let mut rng = trial_rng(seed, 2);
        let mut cm = random::skew(&mut rng, d);
        let n = linalg::op_norm(&cm);
        if n > 0.0 {
            cm *= scale / n;
        }
        let rs = RealStructure::canonical(d);
        let v = standard::from_c(&rs, &cm).unwrap();
        let back = standard::to_c(&rs, &v).unwrap();
        prop_assert!((back - cm).norm() < 1e-8);
    }

    #[test]
    fn standard_json_round_trips(seed in any::<u64>(), d in 1usize..=4) {
        let mut rng = trial_rng(seed, 3);
        let v = random_standard(&mut rng, d).unwrap();
        let text = serde_json::to_string(&v.to_json()).unwrap();
        let back = StandardSubspace::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back.basis(), v.basis());
        let m = v.modular_objects().unwrap();
        let mj = standard::ModularTriple::from_json(&m.to_json()).unwrap();
        prop_assert_eq!(mj.delta.matrix(), m.delta.matrix());
    }

    #[test]
    fn matrix_json_round_trips(rows in 1usize..5, cols in 1usize..5, seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 4);
        let m = random::complex_matrix(&mut rng, rows, cols);
        prop_assert_eq!(json::parse_complex_matrix(&json::complex_matrix(&m)).unwrap(), m);
        let r = RMat::from_fn(rows, cols, |i, j| (i * cols + j) as f64 / 7.0);
        prop_assert_eq!(json::parse_real_matrix(&json::real_matrix(&r)).unwrap(), r);
    }

    #[test]
    fn poincare_group_laws(seed in any::<u64>(), d in 2usize..=6) {
        let mut rng = trial_rng(seed, 5);
        let g = PoincareElement::random(&mut rng, d, 0.7);
        let h = PoincareElement::random(&mut rng, d, 0.7);
        let id = PoincareElement::identity(d);
        prop_assert!(g.compose(&g.inverse()).distance(&id) < 1e-9);
        prop_assert!(g.compose(&h).inverse().distance(&h.inverse().compose(&g.inverse())) < 1e-9);
        prop_assert!(g.is_proper() && g.is_orthochronous());
    }

    #[test]
    fn semigroup_shrinks_the_right_wedge(seed in any::<u64>(), d in 2usize..=5, flip in any::<bool>()) {
        let mut rng = trial_rng(seed, 6);
        let h = wedge::random_semigroup_element(&mut rng, d, flip);
        let wr = Wedge::right(d);
        let w = wr.transformed(&h);
        prop_assert!(wedge::wedge_leq(&w, &wr).unwrap());
        prop_assert!(wedge::wedge_leq(&wr.complement(), &w.complement()).unwrap());
        prop_assert_eq!(wedge::inclusion_violations(&w, &wr, &mut rng, 500), 0);
    }

    #[test]
    fn wedge_complement_is_an_involution(seed in any::<u64>(), d in 2usize..=6) {
        let mut rng = trial_rng(seed, 7);
        let w = Wedge::new(PoincareElement::random(&mut rng, d, 0.5));
        let back = w.complement().complement();
        prop_assert_eq!(wedge::wedge_relation(&back, &w).unwrap(), wedge::WedgeRelation::Equal);
    }

    #[test]
    fn inner_function_is_bounded(b in 0.01f64..5.0, re in -10.0f64..10.0, im in 0.0f64..std::f64::consts::PI) {
        let z = affine::inner_function(b, c(re, im));
        prop_assert!(z.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn grid_projection_is_idempotent(center in -1.0f64..1.0, width in 0.3f64..1.5) {
        let ctx = build_rep(128, 4.0).unwrap();
        let v = ctx.gaussian_probe(center, width);
        let p = ctx.project_v0(&v);
        let pp = ctx.project_v0(&p);
        prop_assert!(affine::diff_norm(&p, &pp) < 1e-12 * affine::norm(&v).max(1.0));
        let t = ctx.translate(0.7, &v);
        prop_assert!((affine::norm(&t) - affine::norm(&v)).abs() < 1e-12);
    }

    #[test]
    fn report_json_is_bit_exact(xs in prop::collection::vec((any::<f64>(), 1e-15f64..1.0), 1..8), seed in any::<u64>()) {
        let mut r = Report::new("standard", seed);
        for (i, (x, t)) in xs.iter().enumerate() {
            r.push(Check::new(format!("c{i}"), *x, *t, Provenance::Derived));
        }
        let pts = xs.iter().map(|(x, t)| (*t, if x.is_finite() { *x } else { 0.0 })).collect();
        r.series.push(Series::new("s", pts));
        let back = Report::from_json(&r.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.to_json().unwrap(), r.to_json().unwrap());
        prop_assert_eq!(back, r);
    }
}
