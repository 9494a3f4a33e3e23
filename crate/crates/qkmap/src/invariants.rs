//! Curvature diagnostics: operator spectra with multiplicities, ‖R‖²,
//! Einstein residuals, closed-form references and ρ-sweeps.

use jetcalc::{curvature_operator, ricci_scalar, sup_norm, Point};

use crate::error::Result;
use crate::geometries::{Family, QkMetricCase};

/// Absolute gap under which eigenvalues are merged into one cluster. Sits
/// three orders above jet-exact eigenvalue accuracy and three below the
/// smallest eigenvalue gaps on the tested grids.
pub const CLUSTER_TOL: f64 = 1e-7;

/// Spectrum, norm and Einstein data of the curvature operator at one point.
#[derive(Clone, Debug)]
pub struct CurvatureReport {
    pub point: Vec<f64>,
    /// Clustered eigenvalues of the curvature operator on Λ², ascending,
    /// as (eigenvalue, multiplicity).
    pub spectrum: Vec<(f64, usize)>,
    /// Σ multiplicity · eigenvalue² over the unclustered spectrum.
    pub norm_r2: f64,
    pub scal: f64,
    /// sup |Ric − (scal/dim) g|.
    pub einstein_residual: f64,
    /// |Σλ − scal/2|, the internal consistency gate.
    pub trace_gate: f64,
}

/// Merge eigenvalues closer than `tol` into (mean, multiplicity) clusters.
pub fn cluster_eigenvalues(eigs: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut sorted = eigs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &l in &sorted {
        match out.last_mut() {
            Some((mean, count)) if (l - *mean).abs() < tol => {
                *mean = (*mean * *count as f64 + l) / (*count as f64 + 1.0);
                *count += 1;
            }
            _ => out.push((l, 1)),
        }
    }
    out
}

/// Full curvature report of a metric case at a point.
pub fn curvature_report(case: &QkMetricCase, p: &Point) -> Result<CurvatureReport> {
    let op = curvature_operator(&case.metric, p)?;
    let (ric, scal) = ricci_scalar(&case.metric, p)?;
    let gm = case.metric.eval_matrix(p)?;
    let dim = case.dim() as f64;
    let einstein_residual = sup_norm(&(ric - (scal / dim) * gm));
    let norm_r2 = op.eigenvalues.iter().map(|l| l * l).sum();
    Ok(CurvatureReport {
        point: p.coords().to_vec(),
        spectrum: cluster_eigenvalues(&op.eigenvalues, CLUSTER_TOL),
        norm_r2,
        scal,
        einstein_residual,
        trace_gate: op.trace_gate,
    })
}

/// The three universal-hypermultiplet eigenvalue branches
/// λ₁ = −(1 + 2r³), λ₂ = −1, λ₃ = −(1 − r³) with r = ρ/(ρ+2c), of
/// multiplicities 1, 3, 2.
pub fn uhm_lambdas(rho: f64, c: f64) -> [f64; 3] {
    let r = rho / (rho + 2.0 * c);
    let r3 = r * r * r;
    [-(1.0 + 2.0 * r3), -1.0, -(1.0 - r3)]
}

/// Closed-form curvature norm ‖R‖² for quaternionic dimension n ≥ 1:
/// n(5n+1) + 3((n−1)r + r³)² + 3((n−1)r² + r⁶), r = ρ/(ρ+2c).
/// For n = 1 this reduces to the universal-hypermultiplet value 6(1 + r⁶).
pub fn closed_form_norm(family: Family, n: usize, rho: f64, c: f64) -> f64 {
    assert!(n >= 1 && rho > 0.0 && c >= 0.0);
    let r = rho / (rho + 2.0 * c);
    match family {
        Family::Uhm => {
            debug_assert_eq!(n, 1);
            6.0 * (1.0 + r.powi(6))
        }
        Family::Higher => {
            let nf = n as f64;
            nf * (5.0 * nf + 1.0)
                + 3.0 * ((nf - 1.0) * r + r.powi(3)).powi(2)
                + 3.0 * ((nf - 1.0) * r.powi(2) + r.powi(6))
        }
    }
}

/// Sweep of ‖R‖² along a ρ-grid, against the closed-form reference.
#[derive(Clone, Debug)]
pub struct SweepReport {
    pub family: Family,
    pub k: usize,
    pub c: f64,
    pub rhos: Vec<f64>,
    pub norms: Vec<f64>,
    pub references: Vec<f64>,
    /// Universal-hypermultiplet eigenvalue branches per grid point (1,3,2
    /// multiplicity split of the six raw eigenvalues); empty for the higher
    /// family.
    pub lambdas: Vec<[f64; 3]>,
    pub scals: Vec<f64>,
    pub max_deviation: f64,
    /// True iff consecutive ‖R‖² differences all share one strict sign.
    pub strictly_monotonic: bool,
}

/// Compute ‖R‖² along `rho_grid` at the fiber origin and compare with the
/// closed form. The grid must be strictly increasing with at least 10 points.
pub fn injectivity_scan(case: &QkMetricCase, rho_grid: &[f64]) -> Result<SweepReport> {
    if rho_grid.len() < 10 {
        return Err(crate::QkError::InvalidParameter(
            "injectivity scan needs a grid of at least 10 points".into(),
        ));
    }
    if !rho_grid.windows(2).all(|w| w[1] > w[0]) {
        return Err(crate::QkError::InvalidParameter(
            "injectivity scan needs a strictly increasing grid".into(),
        ));
    }
    let n = case.quaternionic_dim();
    let mut norms = Vec::with_capacity(rho_grid.len());
    let mut references = Vec::with_capacity(rho_grid.len());
    let mut lambdas = Vec::new();
    let mut scals = Vec::with_capacity(rho_grid.len());
    let mut max_deviation: f64 = 0.0;
    for &rho in rho_grid {
        let p = case.point_at_rho(rho)?;
        let op = curvature_operator(&case.metric, &p)?;
        let norm: f64 = op.eigenvalues.iter().map(|l| l * l).sum();
        let reference = closed_form_norm(case.family, n, rho, case.c);
        max_deviation = max_deviation.max((norm - reference).abs());
        if case.family == Family::Uhm {
            // fixed 1-3-2 split of the six ascending eigenvalues
            let e = &op.eigenvalues;
            lambdas.push([e[0], (e[1] + e[2] + e[3]) / 3.0, (e[4] + e[5]) / 2.0]);
        }
        norms.push(norm);
        scals.push(op.scal);
        references.push(reference);
    }
    let eps = 1e-12;
    let increasing = norms.windows(2).all(|w| w[1] - w[0] > eps);
    let decreasing = norms.windows(2).all(|w| w[0] - w[1] > eps);
    Ok(SweepReport {
        family: case.family,
        k: case.k,
        c: case.c,
        rhos: rho_grid.to_vec(),
        norms,
        references,
        lambdas,
        scals,
        max_deviation,
        strictly_monotonic: increasing || decreasing,
    })
}

/// Evenly spaced strictly increasing grid on [lo, hi].
pub fn linear_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    assert!(steps >= 2 && hi > lo);
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}
