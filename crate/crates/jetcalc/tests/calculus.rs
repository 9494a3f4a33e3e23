//! Operator-level checks against independent oracles: textbook curvature
//! values, hand-expanded derivatives, and finite differences.

use jetcalc::testing::{
    fd_gradients, fd_hessians, fixtures, random_poly, random_poly_2form, SplitMix64,
};
use jetcalc::{
    christoffel, curvature_operator, d_field, exterior_derivative, lie_bracket, lie_derivative,
    lie_field, pullback_residual, ricci_scalar, riemann, sup_slice, AffineVectorField, CalcError,
    Chart, ChartMap, ConstField, IdentityMap, Point, TensorFieldSpec, Valence,
};
use nalgebra::{DMatrix, DVector};

fn pt(field: &TensorFieldSpec, coords: &[f64]) -> Point {
    field.chart().point(coords.to_vec()).unwrap()
}

#[test]
fn flat_metric_is_flat() {
    let g = fixtures::flat_metric(&[1.0, 1.0, 1.0, 1.0]);
    let p = pt(&g, &[0.3, -1.2, 0.5, 2.0]);
    let gamma = christoffel(&g, &p).unwrap();
    assert!(gamma.sup_norm() < 1e-15);
    let r = riemann(&g, &p).unwrap();
    assert!(r.sup_norm() < 1e-15);
    let (ric, scal) = ricci_scalar(&g, &p).unwrap();
    assert!(ric.amax() < 1e-15 && scal.abs() < 1e-15);
    let op = curvature_operator(&g, &p).unwrap();
    assert!(op.eigenvalues.iter().all(|l| l.abs() < 1e-14));
}

#[test]
fn indefinite_flat_metric_is_flat() {
    let g = fixtures::flat_metric(&[-1.0, -1.0, 1.0, 1.0]);
    let p = pt(&g, &[1.5, 0.0, 0.2, 0.1]);
    assert!(riemann(&g, &p).unwrap().sup_norm() < 1e-15);
}

// Sign calibration fixture: unit round 2-sphere, R_{1212} = +1 at the
// equator, Ric = g, scal = 2.
#[test]
fn sphere_calibrates_sign_convention() {
    let (_, g) = fixtures::unit_sphere();
    let p = pt(&g, &[std::f64::consts::FRAC_PI_2, 0.4]);
    let r = riemann(&g, &p).unwrap();
    assert!((r.get(0, 1, 0, 1) - 1.0).abs() < 1e-12);

    let q = pt(&g, &[1.1, -0.3]);
    let (ric, scal) = ricci_scalar(&g, &q).unwrap();
    assert!((scal - 2.0).abs() < 1e-11);
    // Einstein in dim 2: Ric = (scal/2) g
    let gm = g.eval_matrix(&q).unwrap();
    assert!((ric - gm).amax() < 1e-11);

    let op = curvature_operator(&g, &q).unwrap();
    assert_eq!(op.eigenvalues.len(), 1);
    assert!((op.eigenvalues[0] - 1.0).abs() < 1e-11);
    assert!(op.trace_gate < 1e-11);
}

// Conformal-metric oracle: for e^{2φ}δ in dim 2, Γ^x_{xx} = ∂_x φ.
#[test]
fn disk_christoffel_against_conformal_formula() {
    let (_, g) = fixtures::hyperbolic_disk();
    let p = pt(&g, &[0.5, 0.0]);
    let gamma = christoffel(&g, &p).unwrap();
    // φ = −log(1 − r²); ∂_x φ = 2x/(1−r²) = 4/3 at (0.5, 0)
    assert!((gamma.get(0, 0, 0) - 4.0 / 3.0).abs() < 1e-12);
    // symmetry in the lower pair
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                assert!((gamma.get(k, i, j) - gamma.get(k, j, i)).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn disk_has_constant_curvature_minus_four() {
    let (_, g) = fixtures::hyperbolic_disk();
    let p = pt(&g, &[0.0, 0.0]);
    let r = riemann(&g, &p).unwrap();
    assert!((r.get(0, 1, 0, 1) - (-4.0)).abs() < 1e-11);

    // κ = −4 everywhere: R_{ijkl} = κ(g_ik g_jl − g_il g_jk)
    let q = pt(&g, &[0.3, -0.4]);
    let rq = riemann(&g, &q).unwrap();
    let gm = g.eval_matrix(&q).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let expect = -4.0 * (gm[(i, k)] * gm[(j, l)] - gm[(i, l)] * gm[(j, k)]);
                    assert!((rq.get(i, j, k, l) - expect).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn riemann_symmetries_and_bianchi_on_random_metric() {
    // Curved but benign: δ + small quadratic perturbation, via a polynomial.
    let mut rng = SplitMix64(7);
    let d = 3;
    let chart = Chart::new("pert3", d);
    let mut comps = vec![Vec::new(); d * d];
    for i in 0..d {
        for j in 0..d {
            let mut monos = vec![(if i == j { 1.0 } else { 0.0 }, vec![0; d])];
            for a in 0..d {
                for b in a..d {
                    let mut e = vec![0u32; d];
                    e[a] += 1;
                    e[b] += 1;
                    let c = rng.uniform(-0.05, 0.05);
                    monos.push((c, e.clone()));
                    if i != j {
                        // keep symmetric
                    }
                }
            }
            comps[i * d + j] = monos;
        }
    }
    // symmetrize components
    for i in 0..d {
        for j in 0..i {
            let merged: Vec<(f64, Vec<u32>)> = comps[i * d + j]
                .iter()
                .chain(&comps[j * d + i])
                .map(|(c, e)| (0.5 * c, e.clone()))
                .collect();
            comps[i * d + j] = merged.clone();
            comps[j * d + i] = merged;
        }
    }
    let g = TensorFieldSpec::new(
        chart.clone(),
        Valence::Sym2,
        jetcalc::testing::PolyField { components: comps },
    );

    for trial in 0..50 {
        let x: Vec<f64> = (0..d).map(|_| rng.uniform(-0.5, 0.5)).collect();
        let p = chart.point(x).unwrap();
        let r = riemann(&g, &p).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let v = r.get(i, j, k, l);
                        worst = worst.max((v + r.get(j, i, k, l)).abs());
                        worst = worst.max((v + r.get(i, j, l, k)).abs());
                        worst = worst.max((v - r.get(k, l, i, j)).abs());
                        // first Bianchi: R_{i[jkl]} = 0
                        let bianchi = v + r.get(i, k, l, j) + r.get(i, l, j, k);
                        worst = worst.max(bianchi.abs());
                    }
                }
            }
        }
        assert!(
            worst < 1e-10,
            "trial {}: symmetry residual {}",
            trial,
            worst
        );
    }
}

#[test]
fn jets_match_finite_differences_on_fixtures() {
    let mut rng = SplitMix64(42);
    for (field, lo, hi) in [
        (fixtures::hyperbolic_disk().1, -0.5, 0.5),
        (fixtures::unit_sphere().1, 0.8, 2.0),
    ] {
        for _ in 0..20 {
            let d = field.dim();
            let x: Vec<f64> = (0..d).map(|_| rng.uniform(lo, hi)).collect();
            let p = field.chart().point(x.clone()).unwrap();
            let jets = field.jets(&p).unwrap();
            let fd = fd_gradients(&field, &x, 1e-5);
            for c in 0..jets.values.len() {
                for i in 0..d {
                    let scale = jets.grads[c][i].abs().max(1.0);
                    assert!(
                        (jets.grads[c][i] - fd[c][i]).abs() / scale < 1e-6,
                        "grad mismatch: {} vs {}",
                        jets.grads[c][i],
                        fd[c][i]
                    );
                }
            }
            let jets2 = field.jets2(&p).unwrap();
            let fdh = fd_hessians(&field, &x, 1e-4);
            for c in 0..jets2.len() {
                if jets2[c].hess.is_empty() {
                    continue;
                }
                for i in 0..d {
                    for j in 0..d {
                        let scale = jets2[c].hess[(i, j)].abs().max(1.0);
                        assert!(
                            (jets2[c].hess[(i, j)] - fdh[c][(i, j)]).abs() / scale < 1e-5,
                            "hess mismatch"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn lie_derivative_of_killing_rotation_vanishes() {
    // Rotations are isometries of the flat plane and of the disk metric.
    let (chart, g) = fixtures::hyperbolic_disk();
    let rot = TensorFieldSpec::new(
        chart.clone(),
        Valence::Vector,
        AffineVectorField::linear(DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])),
    );
    let mut rng = SplitMix64(3);
    for _ in 0..20 {
        let x = [rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6)];
        let p = chart.point(x.to_vec()).unwrap();
        let lg = lie_derivative(&g, &rot, &p).unwrap();
        assert!(sup_slice_ok(&lg, 1e-11));
    }
}

fn sup_slice_ok(v: &[f64], tol: f64) -> bool {
    sup_slice(v) < tol
}

#[test]
fn lie_bracket_oracles() {
    let chart = Chart::new("plane4", 4);
    // X2 = ∂_2 − x_3 ∂_1, X3 = ∂_3 + x_2 ∂_1 (Heisenberg pattern on
    // coordinates (φ, ζ, ζ̃, τ)): [X2, X3] = 2 ∂_1.
    struct X2;
    impl jetcalc::FieldExpr for X2 {
        fn eval<S: jetcalc::Ring>(&self, x: &[S]) -> Vec<S> {
            vec![
                -x[2].clone(),
                S::from_f64(1.0),
                S::from_f64(0.0),
                S::from_f64(0.0),
            ]
        }
    }
    struct X3;
    impl jetcalc::FieldExpr for X3 {
        fn eval<S: jetcalc::Ring>(&self, x: &[S]) -> Vec<S> {
            vec![
                x[1].clone(),
                S::from_f64(0.0),
                S::from_f64(1.0),
                S::from_f64(0.0),
            ]
        }
    }
    let x2 = TensorFieldSpec::new(chart.clone(), Valence::Vector, X2);
    let x3 = TensorFieldSpec::new(chart.clone(), Valence::Vector, X3);
    let p = chart.point(vec![0.3, 1.2, -0.8, 0.5]).unwrap();

    let b = lie_bracket(&x2, &x3, &p).unwrap();
    assert!((b - DVector::from_vec(vec![2.0, 0.0, 0.0, 0.0])).amax() < 1e-14);

    // [X, X] = 0
    let bb = lie_bracket(&x2, &x2, &p).unwrap();
    assert!(bb.amax() < 1e-14);
}

#[test]
fn exterior_derivative_oracles() {
    let chart = Chart::new("zz", 2);
    // ω = ζ dζ̃ − ζ̃ dζ on coordinates (ζ, ζ̃): dω = 2 dζ∧dζ̃
    struct W;
    impl jetcalc::FieldExpr for W {
        fn eval<S: jetcalc::Ring>(&self, x: &[S]) -> Vec<S> {
            vec![-x[1].clone(), x[0].clone()]
        }
    }
    let w = TensorFieldSpec::new(chart.clone(), Valence::Covector, W);
    let p = chart.point(vec![0.7, -0.2]).unwrap();
    let dw = exterior_derivative(&w, &p).unwrap();
    // full layout: (dω)_{01} = 2, (dω)_{10} = −2
    assert!((dw[1] - 2.0).abs() < 1e-14);
    assert!((dw[2] + 2.0).abs() < 1e-14);
    assert!(dw[0].abs() < 1e-14 && dw[3].abs() < 1e-14);

    // d of an exact form: d(dφ) = 0 for a scalar φ
    let phi = TensorFieldSpec::new(
        chart.clone(),
        Valence::Scalar,
        jetcalc::testing::PolyField {
            components: vec![vec![(1.3, vec![2, 1]), (-0.4, vec![0, 3])]],
        },
    );
    let dphi = d_field(&phi);
    let ddphi = exterior_derivative(&dphi, &p).unwrap();
    assert!(sup_slice(&ddphi) < 1e-12);
}

#[test]
fn d_squared_zero_and_lie_d_commute_on_random_forms() {
    let mut rng = SplitMix64(99);
    let d = 3;
    let chart = Chart::new("r3", d);
    for _ in 0..10 {
        let omega = TensorFieldSpec::new(
            chart.clone(),
            Valence::Form(2),
            random_poly_2form(&mut rng, d),
        );
        let x_field =
            TensorFieldSpec::new(chart.clone(), Valence::Vector, random_poly(&mut rng, d, d));
        let p = chart
            .point(vec![
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
            ])
            .unwrap();

        // d∘d = 0
        let ddw = exterior_derivative(&d_field(&omega), &p).unwrap();
        assert!(sup_slice(&ddw) < 1e-10, "ddω = {}", sup_slice(&ddw));

        // L_X (dω) = d (L_X ω)
        let lhs = lie_derivative(&d_field(&omega), &x_field, &p).unwrap();
        let rhs = exterior_derivative(&lie_field(&omega, &x_field), &p).unwrap();
        let worst = lhs
            .iter()
            .zip(&rhs)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(worst < 1e-10, "L_X d vs d L_X residual {}", worst);
    }
}

#[test]
fn pullback_residuals() {
    let (chart, g) = fixtures::hyperbolic_disk();
    let p = chart.point(vec![0.2, 0.3]).unwrap();

    // identity map → 0 residual
    let idm = ChartMap::new(chart.clone(), chart.clone(), IdentityMap);
    let res = pullback_residual(&idm, &g, &p).unwrap();
    assert!(res.amax() < 1e-14);

    // rotation is an isometry of the disk
    let th = 0.77_f64;
    let rot = ChartMap::new(
        chart.clone(),
        chart.clone(),
        AffineVectorField::linear(DMatrix::from_row_slice(
            2,
            2,
            &[th.cos(), -th.sin(), th.sin(), th.cos()],
        )),
    );
    let res = pullback_residual(&rot, &g, &p).unwrap();
    assert!(res.amax() < 1e-13);

    // a plain translation is not
    let shift = ChartMap::new(
        chart.clone(),
        chart.clone(),
        AffineVectorField {
            matrix: DMatrix::identity(2, 2),
            offset: DVector::from_vec(vec![0.25, 0.0]),
        },
    );
    let res = pullback_residual(&shift, &g, &p).unwrap();
    assert!(res.amax() > 1e-2);
}

#[test]
fn domain_and_singularity_errors() {
    let (chart, g) = fixtures::hyperbolic_disk();
    assert!(matches!(
        chart.point(vec![1.2, 0.0]),
        Err(CalcError::DomainError { .. })
    ));

    // degenerate constant metric → SingularMetric
    let dchart = Chart::new("deg", 2);
    let gdeg = TensorFieldSpec::new(
        dchart.clone(),
        Valence::Sym2,
        ConstField(vec![1.0, 0.0, 0.0, 0.0]),
    );
    let p = dchart.point(vec![0.0, 0.0]).unwrap();
    assert!(matches!(
        christoffel(&gdeg, &p),
        Err(CalcError::SingularMetric { .. })
    ));

    // chart mismatch
    let other = Chart::new("other2", 2).point(vec![0.0, 0.0]).unwrap();
    assert!(matches!(
        g.eval(&other),
        Err(CalcError::ChartMismatch { .. })
    ));
}

#[test]
fn generalized_eigensolver_paths() {
    use jetcalc::generalized_sym_eigenvalues;
    use nalgebra::DMatrix;

    // definite pencil → Cholesky path
    let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
    let b = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 1.0]);
    let eig = generalized_sym_eigenvalues(&a, &b).unwrap();
    // det(A − λB) = 0 ⇔ 4λ² − 14λ + 5 = 0
    for l in &eig {
        assert!((4.0 * l * l - 14.0 * l + 5.0).abs() < 1e-10);
    }

    // indefinite pencil with a real spectrum → fallback path
    let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -2.0]);
    let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let eig = generalized_sym_eigenvalues(&a, &b).unwrap();
    assert!((eig[0] - 1.0).abs() < 1e-12 && (eig[1] - 2.0).abs() < 1e-12);

    // indefinite pencil whose eigenvalues leave the real axis → EigenFailure
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    assert!(matches!(
        generalized_sym_eigenvalues(&a, &b),
        Err(CalcError::EigenFailure(_))
    ));
}

#[test]
fn trace_gate_holds_on_curved_fixture() {
    let (chart, g) = fixtures::hyperbolic_disk();
    let mut rng = SplitMix64(5);
    for _ in 0..10 {
        let p = chart
            .point(vec![rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6)])
            .unwrap();
        let op = curvature_operator(&g, &p).unwrap();
        assert!(op.trace_gate < 1e-9);
    }
}
