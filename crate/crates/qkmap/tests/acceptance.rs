//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Run with `cargo test --test acceptance -- --nocapture` to see every line.

use std::time::Instant;

use jetcalc::{exterior_derivative, lie_derivative, pullback_residual, sup_norm, sup_slice};
use nalgebra::DMatrix;
use qkmap::geometries::{
    cask_domain, elementary_deformation, fs_higher, fs_uhm, rigid_cmap, QkMetricCase,
};
use qkmap::groups::{
    dilation_field, heisenberg_basis, killing_rank_probe, uhm_isometry, uhm_killing_basis,
    UhmIsometry,
};
use qkmap::invariants::{curvature_report, injectivity_scan, linear_grid, uhm_lambdas};
use qkmap::report::sampling;
use qkmap::symmetries::{
    canonical_lift, cocycle, modified_field, structure_constants, twist_killing_residual,
    unitary_generators,
};
use rand::Rng;

struct Criterion {
    id: usize,
    label: &'static str,
    start: Instant,
    budget_s: Option<f64>,
}

impl Criterion {
    fn begin(id: usize, label: &'static str, budget_s: Option<f64>) -> Self {
        Criterion {
            id,
            label,
            start: Instant::now(),
            budget_s,
        }
    }

    fn check(&self, ok: bool, detail: &str) {
        if !ok {
            println!(
                "criterion {:2}: FAIL — {} ({})",
                self.id, self.label, detail
            );
            panic!("criterion {} failed: {}", self.id, detail);
        }
    }

    fn finish(self) {
        let elapsed = self.start.elapsed().as_secs_f64();
        if let Some(budget) = self.budget_s {
            if elapsed > budget {
                println!(
                    "criterion {:2}: FAIL — {} (runtime {:.2}s exceeds {:.0}s)",
                    self.id, self.label, elapsed, budget
                );
                panic!("criterion {} exceeded its runtime budget", self.id);
            }
        }
        println!(
            "criterion {:2}: PASS — {} ({:.2}s)",
            self.id, self.label, elapsed
        );
    }
}

fn full_spectrum(case: &QkMetricCase, rho: f64) -> (Vec<f64>, f64, f64) {
    let p = case.point_at_rho(rho).unwrap();
    let report = curvature_report(case, &p).unwrap();
    let eig: Vec<f64> = report
        .spectrum
        .iter()
        .flat_map(|(v, m)| std::iter::repeat(*v).take(*m))
        .collect();
    (eig, report.norm_r2, report.scal)
}

#[test]
fn criterion_01_uhm_spectrum_formulas() {
    let c1 = Criterion::begin(
        1,
        "deformed spectrum matches the branch formulas",
        Some(5.0),
    );
    for &rho in &[0.5, 1.0, 2.0, 5.0] {
        for &c in &[0.0, 0.25, 1.0] {
            let case = fs_uhm(c).unwrap();
            let (eig, _, _) = full_spectrum(&case, rho);
            let [l1, l2, l3] = uhm_lambdas(rho, c);
            c1.check(eig.len() == 6, "six eigenvalues expected");
            c1.check((eig[0] - l1).abs() < 1e-7, "λ1 branch");
            for e in &eig[1..4] {
                c1.check((e - l2).abs() < 1e-7, "λ2 branch");
            }
            for e in &eig[4..6] {
                c1.check((e - l3).abs() < 1e-7, "λ3 branch");
            }
        }
    }
    // pinned multiset at (ρ, c) = (2, 1)
    let case = fs_uhm(1.0).unwrap();
    let (eig, norm, _) = full_spectrum(&case, 2.0);
    let expect = [-1.25, -1.0, -1.0, -1.0, -0.875, -0.875];
    for (e, x) in eig.iter().zip(expect) {
        c1.check((e - x).abs() < 1e-7, "multiset at (2, 1)");
    }
    c1.check((norm - 6.09375).abs() < 1e-9, "‖R‖² at (2, 1)");
    c1.finish();
}

#[test]
fn criterion_02_uhm_symmetric_case() {
    let c2 = Criterion::begin(
        2,
        "undeformed spectrum, norm and scal are point-independent",
        Some(10.0),
    );
    let case = fs_uhm(0.0).unwrap();
    let mut rng = sampling::rng(2024);
    let mut norms = Vec::new();
    let mut scals = Vec::new();
    for _ in 0..50 {
        let p = sampling::case_point(&case, &mut rng).unwrap();
        let report = curvature_report(&case, &p).unwrap();
        let eig: Vec<f64> = report
            .spectrum
            .iter()
            .flat_map(|(v, m)| std::iter::repeat(*v).take(*m))
            .collect();
        let expect = [-3.0, -1.0, -1.0, -1.0, 0.0, 0.0];
        for (e, x) in eig.iter().zip(expect) {
            c2.check((e - x).abs() < 1e-7, "spectrum {−3, −1×3, 0×2}");
        }
        norms.push(report.norm_r2);
        scals.push(report.scal);
    }
    let mean_n = norms.iter().sum::<f64>() / norms.len() as f64;
    let mean_s = scals.iter().sum::<f64>() / scals.len() as f64;
    c2.check((mean_n - 12.0).abs() < 1e-9, "‖R‖² = 12");
    c2.check((mean_s + 12.0).abs() < 1e-9, "scal = −12");
    let spread_n = norms.iter().fold(0.0f64, |m, v| m.max((v - mean_n).abs()));
    let spread_s = scals.iter().fold(0.0f64, |m, v| m.max((v - mean_s).abs()));
    c2.check(spread_n < 1e-8 && spread_s < 1e-8, "point independence");
    c2.finish();
}

#[test]
fn criterion_03_higher_family_norm() {
    let c3 = Criterion::begin(
        3,
        "dim-8 curvature norm matches its closed form",
        Some(120.0),
    );
    let grid = linear_grid(0.5, 5.0, 50);
    for &c in &[0.0, 0.5] {
        let case = fs_higher(1, c).unwrap();
        let scan = injectivity_scan(&case, &grid).unwrap();
        c3.check(
            scan.max_deviation < 1e-6,
            &format!("closed-form deviation {} at c={c}", scan.max_deviation),
        );
        if c == 0.0 {
            for n in &scan.norms {
                c3.check((n - 40.0).abs() < 1e-6, "constant 40 at c=0");
            }
        }
    }
    c3.finish();
}

#[test]
fn criterion_04_einstein_property() {
    let c4 = Criterion::begin(4, "Einstein residual and scal spread stay below 1e-8", None);
    let mut cases = vec![];
    for &c in &[0.0, 0.3, 1.0] {
        cases.push(fs_uhm(c).unwrap());
    }
    for &c in &[0.0, 0.5] {
        cases.push(fs_higher(1, c).unwrap());
    }
    let mut rng = sampling::rng(4004);
    for case in &cases {
        let n_points = 50;
        let mut scals = Vec::new();
        for _ in 0..n_points {
            let p = sampling::case_point(case, &mut rng).unwrap();
            let report = curvature_report(case, &p).unwrap();
            c4.check(
                report.einstein_residual < 1e-8,
                &format!("Einstein residual {}", report.einstein_residual),
            );
            scals.push(report.scal);
        }
        let mean = scals.iter().sum::<f64>() / scals.len() as f64;
        let spread = scals.iter().fold(0.0f64, |m, v| m.max((v - mean).abs()));
        c4.check(spread < 1e-8, &format!("scal spread {spread}"));
    }
    c4.finish();
}

#[test]
fn criterion_05_killing_residuals() {
    let c5 = Criterion::begin(
        5,
        "Killing catalogs: basis fields hold, the dilation breaks",
        None,
    );
    let mut rng = sampling::rng(5005);

    for &c in &[0.0, 0.3, 1.0] {
        let case = fs_uhm(c).unwrap();
        let points: Vec<_> = (0..50)
            .map(|_| sampling::case_point(&case, &mut rng).unwrap())
            .collect();
        for x in uhm_killing_basis(&case) {
            for p in &points {
                let res = sup_slice(&lie_derivative(&case.metric, &x, p).unwrap());
                c5.check(res < 1e-9, &format!("uhm basis residual {res} at c={c}"));
            }
        }
    }

    for k in [1usize, 2] {
        for &c in &[0.0, 0.5] {
            let case = fs_higher(k, c).unwrap();
            let points: Vec<_> = (0..50)
                .map(|_| sampling::case_point(&case, &mut rng).unwrap())
                .collect();
            let basis = heisenberg_basis(&case);
            assert_eq!(basis.len(), 2 * k + 3);
            for x in &basis {
                for p in &points {
                    let res = sup_slice(&lie_derivative(&case.metric, x, p).unwrap());
                    c5.check(
                        res < 1e-9,
                        &format!("Heisenberg residual {res} k={k} c={c}"),
                    );
                }
            }
        }
    }

    // dilation: Killing exactly at c = 0
    for case in [fs_uhm(0.0).unwrap(), fs_higher(1, 0.0).unwrap()] {
        let d = dilation_field(&case);
        let points: Vec<_> = (0..30)
            .map(|_| sampling::case_point(&case, &mut rng).unwrap())
            .collect();
        for p in &points {
            let res = sup_slice(&lie_derivative(&case.metric, &d, p).unwrap());
            c5.check(res < 1e-9, &format!("dilation at c=0: {res}"));
        }
    }
    for case in [fs_uhm(1.0).unwrap(), fs_higher(1, 1.0).unwrap()] {
        let d = dilation_field(&case);
        let p = sampling::case_point(&case, &mut rng).unwrap();
        let res = sup_slice(&lie_derivative(&case.metric, &d, &p).unwrap());
        c5.check(
            res > 1e-3,
            &format!("dilation must break at c=1, got {res}"),
        );
    }
    c5.finish();
}

#[test]
fn criterion_06_twist_killing_pipeline() {
    let c6 = Criterion::begin(
        6,
        "modified lifts satisfy the twist-Killing criterion",
        None,
    );
    for k in [0usize, 1, 2] {
        let cask = cask_domain(k);
        for &c in &[0.0, 0.7] {
            let hk = rigid_cmap(&cask, c);
            let defo = elementary_deformation(&hk);
            let probe = sampling::rigid_points(&hk, 8, 606).unwrap();
            let points = sampling::rigid_points(&hk, 30, 6000 + k as u64).unwrap();
            for gen in unitary_generators(k) {
                let cand = canonical_lift(&gen.real_mat, &hk, &probe).unwrap();
                let yh = modified_field(&cand, &hk, &defo);
                for p in &points {
                    let res = sup_norm(&twist_killing_residual(&yh, &hk, &defo, p).unwrap());
                    c6.check(
                        res < 1e-9,
                        &format!("k={k} c={c} {}: residual {res}", gen.label),
                    );
                }
                if !gen.central {
                    let p = &points[0];
                    let res = sup_norm(&twist_killing_residual(&cand.y, &hk, &defo, p).unwrap());
                    c6.check(
                        res > 1e-4,
                        &format!("ψ=0 must fail for {} (k={k}, c={c}): {res}", gen.label),
                    );
                }
            }
        }
    }
    c6.finish();
}

#[test]
fn criterion_07_rotating_symmetry_and_hk_checks() {
    let c7 = Criterion::begin(
        7,
        "rigid c-map: quaternion relations, closedness, rotation",
        None,
    );
    for k in [0usize, 1, 2] {
        let cask = cask_domain(k);
        let hk = rigid_cmap(&cask, 0.0);
        let d = hk.dim();
        let id = DMatrix::<f64>::identity(d, d);
        let points = sampling::rigid_points(&hk, 10, 7000 + k as u64).unwrap();
        for p in &points {
            let i1 = hk.i1.eval_matrix(p).unwrap();
            let i2 = hk.i2.eval_matrix(p).unwrap();
            let i3 = hk.i3.eval_matrix(p).unwrap();
            c7.check(sup_norm(&(&i1 * &i1 + &id)) < 1e-10, "I1² = −1");
            c7.check(sup_norm(&(&i2 * &i2 + &id)) < 1e-10, "I2² = −1");
            c7.check(sup_norm(&(&i1 * &i2 - &i3)) < 1e-10, "I1 I2 = I3");

            for om in [&hk.om1, &hk.om2, &hk.om3] {
                c7.check(
                    sup_slice(&exterior_derivative(om, p).unwrap()) < 1e-10,
                    "dω_a = 0",
                );
            }

            c7.check(
                sup_slice(&lie_derivative(&hk.g, &hk.z, p).unwrap()) < 1e-10,
                "L_Z g = 0",
            );
            c7.check(
                sup_slice(&lie_derivative(&hk.om1, &hk.z, p).unwrap()) < 1e-10,
                "L_Z ω₁ = 0",
            );
            let l2 = lie_derivative(&hk.om2, &hk.z, p).unwrap();
            let om3 = hk.om3.eval(p).unwrap();
            let r2 = l2
                .iter()
                .zip(&om3)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            c7.check(r2 < 1e-10, "L_Z ω₂ = ω₃");
            let l3 = lie_derivative(&hk.om3, &hk.z, p).unwrap();
            let om2 = hk.om2.eval(p).unwrap();
            let r3 = l3
                .iter()
                .zip(&om2)
                .fold(0.0f64, |m, (a, b)| m.max((a + b).abs()));
            c7.check(r3 < 1e-10, "L_Z ω₃ = −ω₂");
        }
    }
    c7.finish();
}

#[test]
fn criterion_08_cocycle_constancy() {
    let c8 = Criterion::begin(
        8,
        "central-extension cocycle is constant and antisymmetric",
        None,
    );
    let cask = cask_domain(1);
    let hk = rigid_cmap(&cask, 0.0);
    let defo = elementary_deformation(&hk);
    let probe = sampling::rigid_points(&hk, 8, 808).unwrap();
    let cands: Vec<_> = unitary_generators(1)
        .iter()
        .map(|g| canonical_lift(&g.real_mat, &hk, &probe).unwrap())
        .collect();
    let consts = structure_constants(&cands, &probe[..4]).unwrap();
    let cloud = sampling::rigid_points(&hk, 100, 8800).unwrap();
    let report = cocycle(&cands, &consts, &defo, &cloud).unwrap();
    c8.check(
        report.max_spread < 1e-8,
        &format!("spread {}", report.max_spread),
    );
    let asym = sup_norm(&(report.matrix.clone() + report.matrix.transpose()));
    c8.check(asym == 0.0, "exact antisymmetry");
    c8.finish();
}

#[test]
fn criterion_09_isometry_group_of_the_deformed_uhm() {
    let c9 = Criterion::begin(
        9,
        "Heis₃ ⋊ O(2) isometries and the Killing rank probe",
        None,
    );
    let mut rng = sampling::rng(909);
    let case = fs_uhm(1.0).unwrap();
    let points: Vec<_> = (0..50)
        .map(|_| sampling::case_point(&case, &mut rng).unwrap())
        .collect();
    for trial in 0..20 {
        let iso = UhmIsometry {
            theta: rng.random_range(-3.0..3.0),
            u_re: rng.random_range(-1.0..1.0),
            u_im: rng.random_range(-1.0..1.0),
            kshift: rng.random_range(-2.0..2.0),
            reflected: trial % 2 == 1,
        };
        let map = uhm_isometry(&case, &iso);
        for p in &points {
            let res = sup_norm(&pullback_residual(&map, &case.metric, p).unwrap());
            c9.check(
                res < 1e-10,
                &format!("pullback residual {res} (reflected={})", iso.reflected),
            );
        }
    }

    for (c, expected) in [(1.0, 4usize), (0.0, 5usize)] {
        let case = fs_uhm(c).unwrap();
        let [x1, x2, x3, x4] = uhm_killing_basis(&case);
        let cands = vec![x1, x2, x3, x4, dilation_field(&case)];
        let pts: Vec<_> = (0..12)
            .map(|_| sampling::case_point(&case, &mut rng).unwrap())
            .collect();
        let dim = killing_rank_probe(&case.metric, &cands, &pts).unwrap();
        c9.check(
            dim == expected,
            &format!("kernel {dim} ≠ {expected} at c={c}"),
        );
    }
    c9.finish();
}

#[test]
fn criterion_10_cohomogeneity_evidence() {
    let c10 = Criterion::begin(
        10,
        "curvature norm: flat in the fiber, strictly monotone in ρ",
        None,
    );
    let grid = linear_grid(0.5, 5.0, 200);

    // constant at c = 0
    for case in [fs_uhm(0.0).unwrap(), fs_higher(1, 0.0).unwrap()] {
        let scan = injectivity_scan(&case, &grid).unwrap();
        c10.check(!scan.strictly_monotonic, "no monotonicity at c=0");
        let mean = scan.norms.iter().sum::<f64>() / scan.norms.len() as f64;
        let spread = scan
            .norms
            .iter()
            .fold(0.0f64, |m, v| m.max((v - mean).abs()));
        c10.check(
            spread < 1e-8,
            &format!("constant norm at c=0, spread {spread}"),
        );
    }

    // strictly monotone at c ∈ {0.5, 1}
    for &c in &[0.5, 1.0] {
        for case in [fs_uhm(c).unwrap(), fs_higher(1, c).unwrap()] {
            let scan = injectivity_scan(&case, &grid).unwrap();
            c10.check(
                scan.strictly_monotonic,
                &format!("monotonicity at c={c}, family {:?}", case.family),
            );
        }
    }

    // fixed-ρ level sets
    let mut rng = sampling::rng(1010);
    for case in [fs_uhm(1.0).unwrap(), fs_higher(1, 0.5).unwrap()] {
        let mut norms = Vec::new();
        for _ in 0..10 {
            let p = sampling::level_set_point(&case, 2.2, &mut rng).unwrap();
            norms.push(curvature_report(&case, &p).unwrap().norm_r2);
        }
        let mean = norms.iter().sum::<f64>() / norms.len() as f64;
        let spread = norms.iter().fold(0.0f64, |m, v| m.max((v - mean).abs()));
        c10.check(spread < 1e-8, &format!("level-set spread {spread}"));
    }
    c10.finish();
}
