//! Explicit group actions and Killing-field catalogs on the c-map spaces:
//! the solvable fiber group, the universal-hypermultiplet Killing basis and
//! its Heis₃ ⋊ O(2) isometries, and a finite-rank Killing probe.

use jetcalc::{
    lie_derivative, sup_slice, AffineVectorField, ChartMap, Point, TensorFieldSpec, Valence,
};
use nalgebra::{DMatrix, DVector};

use crate::error::{QkError, Result};
use crate::geometries::{Family, QkMetricCase};

/// Element of the solvable fiber group: a one-dimensional extension (scale
/// parameter λ) of the Heisenberg group parametrized by (α, ṽ_I, v^I).
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub lam: f64,
    pub alpha: f64,
    pub vt: DVector<f64>,
    pub v: DVector<f64>,
}

impl GroupElement {
    pub fn identity(k: usize) -> Self {
        GroupElement {
            lam: 0.0,
            alpha: 0.0,
            vt: DVector::zeros(k + 1),
            v: DVector::zeros(k + 1),
        }
    }

    pub fn k(&self) -> usize {
        self.vt.len() - 1
    }

    /// Group law, read off from the action on the fiber coordinates:
    /// (e^λ, α, ṽ, v) · (e^μ, β, w̃, w).
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let e = self.lam.exp();
        let eh = (self.lam / 2.0).exp();
        let pairing = self.vt.dot(&other.v) - self.v.dot(&other.vt);
        GroupElement {
            lam: self.lam + other.lam,
            alpha: e * other.alpha + self.alpha + eh * pairing,
            vt: &self.vt + eh * &other.vt,
            v: &self.v + eh * &other.v,
        }
    }
}

/// Fiber coordinates (ρ, φ̃, ζ̃_I, ζ^I) the group acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberPoint {
    pub rho: f64,
    pub phi: f64,
    pub zt: DVector<f64>,
    pub z: DVector<f64>,
}

/// Action of a group element on a fiber point:
/// (e^λρ, e^λφ̃ + α + e^{λ/2}(Σ ṽ_I ζ^I − v^I ζ̃_I), ṽ + e^{λ/2}ζ̃, v + e^{λ/2}ζ).
pub fn g_group_act(elem: &GroupElement, fiber: &FiberPoint) -> Result<FiberPoint> {
    if fiber.rho <= 0.0 {
        return Err(QkError::Calc(jetcalc::CalcError::DomainError {
            chart: "fiber".into(),
            coords: vec![fiber.rho],
        }));
    }
    let e = elem.lam.exp();
    let eh = (elem.lam / 2.0).exp();
    let pairing = elem.vt.dot(&fiber.z) - elem.v.dot(&fiber.zt);
    Ok(FiberPoint {
        rho: e * fiber.rho,
        phi: e * fiber.phi + elem.alpha + eh * pairing,
        zt: &elem.vt + eh * &fiber.zt,
        z: &elem.v + eh * &fiber.z,
    })
}

/// Index bookkeeping for the two chart layouts.
fn fiber_indices(case: &QkMetricCase) -> (usize, usize, Vec<usize>, Vec<usize>) {
    match case.family {
        Family::Uhm => (0, 1, vec![3], vec![2]),
        Family::Higher => {
            let k = case.k;
            let zt = (0..=k).map(|i| 2 * k + 2 + 2 * i).collect();
            let z = (0..=k).map(|i| 2 * k + 3 + 2 * i).collect();
            (2 * k, 2 * k + 1, zt, z)
        }
    }
}

/// The group action as a chart map of a metric case (base coordinates fixed).
pub fn group_action_map(elem: &GroupElement, case: &QkMetricCase) -> ChartMap {
    let d = case.dim();
    let (i_rho, i_phi, i_zt, i_z) = fiber_indices(case);
    assert_eq!(i_zt.len(), elem.vt.len(), "group rank must match the case");

    let e = elem.lam.exp();
    let eh = (elem.lam / 2.0).exp();
    let mut m = DMatrix::identity(d, d);
    let mut b = DVector::zeros(d);
    m[(i_rho, i_rho)] = e;
    m[(i_phi, i_phi)] = e;
    b[i_phi] = elem.alpha;
    for i in 0..i_zt.len() {
        m[(i_phi, i_z[i])] = eh * elem.vt[i];
        m[(i_phi, i_zt[i])] = -eh * elem.v[i];
        m[(i_zt[i], i_zt[i])] = eh;
        m[(i_z[i], i_z[i])] = eh;
        b[i_zt[i]] = elem.vt[i];
        b[i_z[i]] = elem.v[i];
    }
    ChartMap::new(
        case.chart.clone(),
        case.chart.clone(),
        AffineVectorField {
            matrix: m,
            offset: b,
        },
    )
}

/// The 2k+3 Heisenberg generators obtained by differentiating the action at
/// the identity in the (α, ṽ_I, v^I) directions.
pub fn heisenberg_basis(case: &QkMetricCase) -> Vec<TensorFieldSpec> {
    let d = case.dim();
    let (_, i_phi, i_zt, i_z) = fiber_indices(case);
    let mut out = Vec::new();

    // ∂/∂α: ∂_φ̃
    let mut b = DVector::zeros(d);
    b[i_phi] = 1.0;
    out.push(TensorFieldSpec::new(
        case.chart.clone(),
        Valence::Vector,
        AffineVectorField {
            matrix: DMatrix::zeros(d, d),
            offset: b,
        },
    ));

    for i in 0..i_zt.len() {
        // ∂/∂ṽ_I: ζ^I ∂_φ̃ + ∂_{ζ̃_I}
        let mut m = DMatrix::zeros(d, d);
        let mut b = DVector::zeros(d);
        m[(i_phi, i_z[i])] = 1.0;
        b[i_zt[i]] = 1.0;
        out.push(TensorFieldSpec::new(
            case.chart.clone(),
            Valence::Vector,
            AffineVectorField {
                matrix: m,
                offset: b,
            },
        ));

        // ∂/∂v^I: −ζ̃_I ∂_φ̃ + ∂_{ζ^I}
        let mut m = DMatrix::zeros(d, d);
        let mut b = DVector::zeros(d);
        m[(i_phi, i_zt[i])] = -1.0;
        b[i_z[i]] = 1.0;
        out.push(TensorFieldSpec::new(
            case.chart.clone(),
            Valence::Vector,
            AffineVectorField {
                matrix: m,
                offset: b,
            },
        ));
    }
    out
}

/// The λ-direction derivative of the action: D = ρ∂_ρ + φ̃∂_φ̃ + ½Σ(ζ̃∂_ζ̃ + ζ∂_ζ).
pub fn dilation_field(case: &QkMetricCase) -> TensorFieldSpec {
    let d = case.dim();
    let (i_rho, i_phi, i_zt, i_z) = fiber_indices(case);
    let mut m = DMatrix::zeros(d, d);
    m[(i_rho, i_rho)] = 1.0;
    m[(i_phi, i_phi)] = 1.0;
    for i in 0..i_zt.len() {
        m[(i_zt[i], i_zt[i])] = 0.5;
        m[(i_z[i], i_z[i])] = 0.5;
    }
    TensorFieldSpec::new(
        case.chart.clone(),
        Valence::Vector,
        AffineVectorField::linear(m),
    )
}

/// The universal-hypermultiplet Killing basis
/// X1 = ∂_φ̃, X2 = ∂_ζ − ζ̃∂_φ̃, X3 = ∂_ζ̃ + ζ∂_φ̃, X4 = ζ̃∂_ζ − ζ∂_ζ̃
/// on the chart (ρ, φ̃, ζ, ζ̃).
pub fn uhm_killing_basis(case: &QkMetricCase) -> [TensorFieldSpec; 4] {
    assert_eq!(case.family, Family::Uhm);
    let chart = &case.chart;
    let mk = |m: DMatrix<f64>, b: DVector<f64>| {
        TensorFieldSpec::new(
            chart.clone(),
            Valence::Vector,
            AffineVectorField {
                matrix: m,
                offset: b,
            },
        )
    };
    let x1 = mk(
        DMatrix::zeros(4, 4),
        DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]),
    );
    let mut m2 = DMatrix::zeros(4, 4);
    m2[(1, 3)] = -1.0; // −ζ̃ ∂_φ̃
    let x2 = mk(m2, DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]));
    let mut m3 = DMatrix::zeros(4, 4);
    m3[(1, 2)] = 1.0; // ζ ∂_φ̃
    let x3 = mk(m3, DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0]));
    let mut m4 = DMatrix::zeros(4, 4);
    m4[(2, 3)] = 1.0; // ζ̃ ∂_ζ
    m4[(3, 2)] = -1.0; // −ζ ∂_ζ̃
    let x4 = mk(m4, DVector::zeros(4));
    [x1, x2, x3, x4]
}

/// Parameters of a universal-hypermultiplet isometry in Heis₃ ⋊ O(2):
/// a rotation/reflection in ξ = ζ̃ + iζ, a translation u, and a φ̃ shift.
#[derive(Clone, Debug)]
pub struct UhmIsometry {
    pub theta: f64,
    pub u_re: f64,
    pub u_im: f64,
    pub kshift: f64,
    pub reflected: bool,
}

struct UhmIsometryMap {
    iso: UhmIsometry,
}

impl jetcalc::FieldExpr for UhmIsometryMap {
    fn eval<S: jetcalc::Ring>(&self, x: &[S]) -> Vec<S> {
        let (ct, st) = (self.iso.theta.cos(), self.iso.theta.sin());
        let (ur, ui) = (self.iso.u_re, self.iso.u_im);
        let rho = x[0].clone();
        let phi = x[1].clone();
        let zeta = x[2].clone();
        let zeta_t = x[3].clone();
        // a + ib = ξ + u with ξ = ζ̃ + iζ
        let a = zeta_t + S::from_f64(ur);
        let b = zeta + S::from_f64(ui);
        if !self.iso.reflected {
            // ξ' = e^{iθ}(ξ + u), φ̃' = φ̃ − Im(u ξ̄) + k
            let zt_new = S::from_f64(ct) * a.clone() - S::from_f64(st) * b.clone();
            let z_new = S::from_f64(st) * a + S::from_f64(ct) * b;
            let phi_new = phi - S::from_f64(ui) * x[3].clone()
                + S::from_f64(ur) * x[2].clone()
                + S::from_f64(self.iso.kshift);
            vec![rho, phi_new, z_new, zt_new]
        } else {
            // ξ' = e^{−iθ}(ξ̄ + ū), φ̃' = −φ̃ + Im(u ξ̄) + k
            let zt_new = S::from_f64(ct) * a.clone() - S::from_f64(st) * b.clone();
            let z_new = -(S::from_f64(st) * a + S::from_f64(ct) * b);
            let phi_new = -phi + S::from_f64(ui) * x[3].clone() - S::from_f64(ur) * x[2].clone()
                + S::from_f64(self.iso.kshift);
            vec![rho, phi_new, z_new, zt_new]
        }
    }
}

/// The isometry as a chart map on the (ρ, φ̃, ζ, ζ̃) chart.
pub fn uhm_isometry(case: &QkMetricCase, iso: &UhmIsometry) -> ChartMap {
    assert_eq!(case.family, Family::Uhm);
    ChartMap::new(
        case.chart.clone(),
        case.chart.clone(),
        UhmIsometryMap { iso: iso.clone() },
    )
}

/// Rank probe: dimension of the numerical kernel of the Gram matrix
/// ⟨L_{Y_i}g, L_{Y_j}g⟩ summed over sample points. A kernel vector is a
/// candidate combination that is Killing at every sampled point.
pub fn killing_rank_probe(
    g: &TensorFieldSpec,
    candidates: &[TensorFieldSpec],
    points: &[Point],
) -> Result<usize> {
    let m = candidates.len();
    if m == 0 {
        return Ok(0);
    }
    if points.len() < 2 * m {
        return Err(QkError::InsufficientSamples {
            needed: 2 * m,
            got: points.len(),
        });
    }
    let mut gram: DMatrix<f64> = DMatrix::zeros(m, m);
    for p in points {
        let residuals: Vec<Vec<f64>> = candidates
            .iter()
            .map(|y| lie_derivative(g, y, p))
            .collect::<std::result::Result<_, _>>()?;
        for i in 0..m {
            for j in 0..=i {
                let dot: f64 = residuals[i]
                    .iter()
                    .zip(&residuals[j])
                    .map(|(a, b)| a * b)
                    .sum();
                gram[(i, j)] += dot;
                gram[(j, i)] = gram[(i, j)];
            }
        }
    }
    let svals = gram.singular_values();
    let largest = svals.max();
    if largest < 1e-16 {
        return Ok(m);
    }
    Ok(svals.iter().filter(|s| **s < 1e-8 * largest).count())
}

/// Sup-norm of L_Y g over a point set (convenience for Killing checks).
pub fn killing_residual_sup(
    g: &TensorFieldSpec,
    y: &TensorFieldSpec,
    points: &[Point],
) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for p in points {
        sup = sup.max(sup_slice(&lie_derivative(g, y, p)?));
    }
    Ok(sup)
}
