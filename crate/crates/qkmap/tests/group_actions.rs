//! Fiber group law, Heisenberg Killing fields, the Heis₃ ⋊ O(2) isometries of
//! the deformed universal hypermultiplet, and the Killing rank probe.

use jetcalc::{lie_bracket, pullback_residual, sup_norm};
use nalgebra::DVector;
use qkmap::geometries::{fs_higher, fs_uhm};
use qkmap::groups::{
    dilation_field, g_group_act, group_action_map, heisenberg_basis, killing_rank_probe,
    killing_residual_sup, uhm_isometry, uhm_killing_basis, FiberPoint, GroupElement, UhmIsometry,
};
use qkmap::report::sampling;
use qkmap::QkError;
use rand::Rng;

fn random_element(k: usize, rng: &mut impl Rng) -> GroupElement {
    GroupElement {
        lam: rng.random_range(-0.8..0.8),
        alpha: rng.random_range(-1.5..1.5),
        vt: DVector::from_fn(k + 1, |_, _| rng.random_range(-1.0..1.0)),
        v: DVector::from_fn(k + 1, |_, _| rng.random_range(-1.0..1.0)),
    }
}

fn random_fiber(k: usize, rng: &mut impl Rng) -> FiberPoint {
    FiberPoint {
        rho: rng.random_range(0.3..4.0),
        phi: rng.random_range(-2.0..2.0),
        zt: DVector::from_fn(k + 1, |_, _| rng.random_range(-1.5..1.5)),
        z: DVector::from_fn(k + 1, |_, _| rng.random_range(-1.5..1.5)),
    }
}

#[test]
fn group_law_identity_and_associativity() {
    let mut rng = sampling::rng(12);
    for k in [0usize, 1, 2] {
        let id = GroupElement::identity(k);
        for _ in 0..20 {
            let x = random_fiber(k, &mut rng);
            let same = g_group_act(&id, &x).unwrap();
            assert!((same.rho - x.rho).abs() < 1e-15);
            assert!((same.phi - x.phi).abs() < 1e-15);

            // (ab)·x = a·(b·x): associativity through double evaluation
            let a = random_element(k, &mut rng);
            let b = random_element(k, &mut rng);
            let lhs = g_group_act(&a.compose(&b), &x).unwrap();
            let rhs = g_group_act(&a, &g_group_act(&b, &x).unwrap()).unwrap();
            assert!((lhs.rho - rhs.rho).abs() < 1e-12);
            assert!((lhs.phi - rhs.phi).abs() < 1e-12);
            assert!((&lhs.zt - &rhs.zt).amax() < 1e-12);
            assert!((&lhs.z - &rhs.z).amax() < 1e-12);

            // associativity of the law itself on a random triple
            let c = random_element(k, &mut rng);
            let p1 = g_group_act(&a.compose(&b).compose(&c), &x).unwrap();
            let p2 = g_group_act(&a.compose(&b.compose(&c)), &x).unwrap();
            assert!((p1.phi - p2.phi).abs() < 1e-10);
        }
    }

    // pure φ̃-shift
    let shift = GroupElement {
        lam: 0.0,
        alpha: 1.7,
        vt: DVector::zeros(1),
        v: DVector::zeros(1),
    };
    let x = FiberPoint {
        rho: 2.0,
        phi: 0.3,
        zt: DVector::from_vec(vec![0.5]),
        z: DVector::from_vec(vec![-0.2]),
    };
    let y = g_group_act(&shift, &x).unwrap();
    assert_eq!(y.rho, 2.0);
    assert!((y.phi - 2.0).abs() < 1e-15);
    assert_eq!(y.zt, x.zt);
    assert_eq!(y.z, x.z);

    // domain guard
    let bad = FiberPoint { rho: -1.0, ..x };
    assert!(g_group_act(&shift, &bad).is_err());
}

#[test]
fn heisenberg_fields_are_killing_for_all_c() {
    let mut rng = sampling::rng(99);
    for (k, cs) in [(1usize, vec![0.0, 0.5]), (2, vec![0.0, 0.5])] {
        for c in cs {
            let case = fs_higher(k, c).unwrap();
            let fields = heisenberg_basis(&case);
            assert_eq!(fields.len(), 2 * k + 3);
            let points: Vec<_> = (0..50)
                .map(|_| sampling::case_point(&case, &mut rng).unwrap())
                .collect();
            for (i, f) in fields.iter().enumerate() {
                let sup = killing_residual_sup(&case.metric, f, &points).unwrap();
                assert!(sup < 1e-9, "k={k} c={c} generator {i}: {sup}");
            }
        }
    }
}

#[test]
fn dilation_kills_metric_only_at_c_zero() {
    let mut rng = sampling::rng(7);
    {
        let k = 1usize;
        let case0 = fs_higher(k, 0.0).unwrap();
        let case1 = fs_higher(k, 1.0).unwrap();
        let points0: Vec<_> = (0..30)
            .map(|_| sampling::case_point(&case0, &mut rng).unwrap())
            .collect();
        let d0 = dilation_field(&case0);
        assert!(killing_residual_sup(&case0.metric, &d0, &points0).unwrap() < 1e-9);

        let d1 = dilation_field(&case1);
        let points1: Vec<_> = (0..30)
            .map(|_| sampling::case_point(&case1, &mut rng).unwrap())
            .collect();
        assert!(killing_residual_sup(&case1.metric, &d1, &points1).unwrap() > 1e-3);
    }
    // and on the universal hypermultiplet
    let u0 = fs_uhm(0.0).unwrap();
    let u1 = fs_uhm(1.0).unwrap();
    let mut rng = sampling::rng(8);
    let pts0: Vec<_> = (0..30)
        .map(|_| sampling::case_point(&u0, &mut rng).unwrap())
        .collect();
    let pts1: Vec<_> = (0..30)
        .map(|_| sampling::case_point(&u1, &mut rng).unwrap())
        .collect();
    assert!(killing_residual_sup(&u0.metric, &dilation_field(&u0), &pts0).unwrap() < 1e-9);
    assert!(killing_residual_sup(&u1.metric, &dilation_field(&u1), &pts1).unwrap() > 1e-3);
}

#[test]
fn group_action_map_matches_generators() {
    // the pullback by a group element leaves the metric invariant iff λ = 0
    // or c = 0; spot-check both directions
    let mut rng = sampling::rng(21);
    for &c in &[0.0, 1.0] {
        let case = fs_uhm(c).unwrap();
        let heis = GroupElement {
            lam: 0.0,
            alpha: rng.random_range(-1.0..1.0),
            vt: DVector::from_vec(vec![rng.random_range(-1.0..1.0)]),
            v: DVector::from_vec(vec![rng.random_range(-1.0..1.0)]),
        };
        let map = group_action_map(&heis, &case);
        for _ in 0..20 {
            let p = sampling::case_point(&case, &mut rng).unwrap();
            let res = pullback_residual(&map, &case.metric, &p).unwrap();
            assert!(
                sup_norm(&res) < 1e-12,
                "Heisenberg element must be isometric"
            );
        }

        let dil = GroupElement {
            lam: 0.3,
            alpha: 0.0,
            vt: DVector::zeros(1),
            v: DVector::zeros(1),
        };
        let map = group_action_map(&dil, &case);
        let p = case.chart.point(vec![1.0, 0.4, 0.7, -0.3]).unwrap();
        let res = sup_norm(&pullback_residual(&map, &case.metric, &p).unwrap());
        if c == 0.0 {
            assert!(res < 1e-12, "λ-scaling is isometric at c = 0, got {res}");
        } else {
            assert!(res > 1e-3, "λ-scaling must fail at c = 1, got {res}");
        }
    }
}

#[test]
fn uhm_killing_basis_relations() {
    let case = fs_uhm(0.3).unwrap();
    let [x1, x2, x3, x4] = uhm_killing_basis(&case);
    let p = case.chart.point(vec![1.2, 0.5, 0.7, -0.4]).unwrap();

    // [X2, X3] = 2 X1
    let b = lie_bracket(&x2, &x3, &p).unwrap();
    let expect = 2.0 * x1.eval_vector(&p).unwrap();
    assert!((b - expect).amax() < 1e-13);

    // X1 is central in the Heisenberg part
    for other in [&x2, &x3] {
        assert!(lie_bracket(&x1, other, &p).unwrap().amax() < 1e-14);
    }

    // rotation acts on the translations: [X4, X2] = X3, [X4, X3] = −X2
    let b = lie_bracket(&x4, &x2, &p).unwrap();
    assert!((b - x3.eval_vector(&p).unwrap()).amax() < 1e-13);
    let b = lie_bracket(&x4, &x3, &p).unwrap();
    assert!((b + x2.eval_vector(&p).unwrap()).amax() < 1e-13);

    // X4 = (ζ̃² + ζ²) X1 + ζ̃ X2 − ζ X3 pointwise
    let (zeta, zeta_t) = (0.7, -0.4);
    let combo = (zeta_t * zeta_t + zeta * zeta) * x1.eval_vector(&p).unwrap()
        + zeta_t * x2.eval_vector(&p).unwrap()
        - zeta * x3.eval_vector(&p).unwrap();
    assert!((combo - x4.eval_vector(&p).unwrap()).amax() < 1e-14);

    // all four are Killing for every tested c
    let mut rng = sampling::rng(31);
    for &c in &[0.0, 0.3, 1.0] {
        let case = fs_uhm(c).unwrap();
        let points: Vec<_> = (0..50)
            .map(|_| sampling::case_point(&case, &mut rng).unwrap())
            .collect();
        for x in uhm_killing_basis(&case) {
            assert!(killing_residual_sup(&case.metric, &x, &points).unwrap() < 1e-9);
        }
    }

    // [∂ρ, D] = ∂ρ
    let d_rho = jetcalc::TensorFieldSpec::new(
        case.chart.clone(),
        jetcalc::Valence::Vector,
        jetcalc::ConstField(vec![1.0, 0.0, 0.0, 0.0]),
    );
    let d = dilation_field(&case);
    let b = lie_bracket(&d_rho, &d, &p).unwrap();
    assert!((b - DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0])).amax() < 1e-14);
}

#[test]
fn uhm_isometries_preserve_the_deformed_metric() {
    let mut rng = sampling::rng(55);
    for &c in &[0.0, 1.0] {
        let case = fs_uhm(c).unwrap();
        for trial in 0..20 {
            let iso = UhmIsometry {
                theta: rng.random_range(-3.0..3.0),
                u_re: rng.random_range(-1.0..1.0),
                u_im: rng.random_range(-1.0..1.0),
                kshift: rng.random_range(-2.0..2.0),
                reflected: trial % 2 == 1,
            };
            let map = uhm_isometry(&case, &iso);
            for _ in 0..10 {
                let p = sampling::case_point(&case, &mut rng).unwrap();
                let res = sup_norm(&pullback_residual(&map, &case.metric, &p).unwrap());
                assert!(
                    res < 1e-10,
                    "c={c} reflected={} residual {res}",
                    iso.reflected
                );
            }
        }
    }

    // identity parameters, direct branch → identity map
    let case = fs_uhm(1.0).unwrap();
    let iso = UhmIsometry {
        theta: 0.0,
        u_re: 0.0,
        u_im: 0.0,
        kshift: 0.0,
        reflected: false,
    };
    let map = uhm_isometry(&case, &iso);
    let p = case.chart.point(vec![1.3, 0.2, -0.4, 0.8]).unwrap();
    let q = map.apply(&p).unwrap();
    assert_eq!(p.coords(), q.coords());

    // quarter rotation: explicit check of the references
    let rot = UhmIsometry {
        theta: std::f64::consts::FRAC_PI_2,
        u_re: 0.0,
        u_im: 0.0,
        kshift: 0.0,
        reflected: false,
    };
    let map = uhm_isometry(&case, &rot);
    let res = sup_norm(&pullback_residual(&map, &case.metric, &p).unwrap());
    assert!(res < 1e-10);

    // reflected branch with the cited parameters
    let refl = UhmIsometry {
        theta: 0.0,
        u_re: 0.3,
        u_im: 0.4,
        kshift: 2.0,
        reflected: true,
    };
    let map = uhm_isometry(&case, &refl);
    let res = sup_norm(&pullback_residual(&map, &case.metric, &p).unwrap());
    assert!(res < 1e-10);
}

#[test]
fn rank_probe_counts_killing_directions() {
    let mut rng = sampling::rng(77);
    for (c, expected) in [(1.0, 4usize), (0.0, 5usize)] {
        let case = fs_uhm(c).unwrap();
        let [x1, x2, x3, x4] = uhm_killing_basis(&case);
        let d = dilation_field(&case);
        let candidates = vec![x1, x2, x3, x4, d];
        let points: Vec<_> = (0..12)
            .map(|_| sampling::case_point(&case, &mut rng).unwrap())
            .collect();
        let dim = killing_rank_probe(&case.metric, &candidates, &points).unwrap();
        assert_eq!(dim, expected, "c = {c}");

        // invariance under invertible recombination: replace X2 by X2 + 3X4
        let [x1, x2, x3, x4] = uhm_killing_basis(&case);
        let recombined = jetcalc::lincomb_field(1.0, &x2, 3.0, &x4);
        let candidates = vec![x1, recombined, x3, x4, dilation_field(&case)];
        let dim2 = killing_rank_probe(&case.metric, &candidates, &points).unwrap();
        assert_eq!(dim, dim2);
    }

    // degenerate inputs
    let case = fs_uhm(0.0).unwrap();
    let points: Vec<_> = {
        let mut rng = sampling::rng(1);
        (0..3)
            .map(|_| sampling::case_point(&case, &mut rng).unwrap())
            .collect()
    };
    assert_eq!(killing_rank_probe(&case.metric, &[], &points).unwrap(), 0);
    let [x1, x2, ..] = uhm_killing_basis(&case);
    match killing_rank_probe(&case.metric, &[x1, x2], &points[..2]) {
        Err(QkError::InsufficientSamples { needed, got }) => {
            assert_eq!((needed, got), (4, 2));
        }
        other => panic!("expected InsufficientSamples, got {other:?}"),
    }
}

#[test]
fn higher_family_total_fiber_symmetry_count() {
    // Heisenberg (2k+3 fields) ∪ {D} has kernel 2k+3 at c > 0
    let case = fs_higher(1, 0.5).unwrap();
    let mut cands = heisenberg_basis(&case);
    cands.push(dilation_field(&case));
    let mut rng = sampling::rng(13);
    let points: Vec<_> = (0..2 * cands.len() + 4)
        .map(|_| sampling::case_point(&case, &mut rng).unwrap())
        .collect();
    let dim = killing_rank_probe(&case.metric, &cands, &points).unwrap();
    assert_eq!(dim, 5);
}
