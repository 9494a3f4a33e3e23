//! The rigid c-map: cotangent-bundle hyper-Kähler structure over a CASK
//! domain, its rotating circle symmetry, and the elementary deformation that
//! feeds the twist.

use std::sync::Arc;

use jetcalc::{
    contract_field, d_field, lincomb_field, AffineVectorField, Chart, ConstField, FieldEval,
    FieldExpr, QuadraticScalarField, Ring, TensorFieldSpec, Valence,
};
use nalgebra::DMatrix;

use crate::error::{QkError, Result};
use crate::geometries::cask::{cask_domain_contains, row_major, CaskStructure};

/// Hyper-Kähler package on T*M_k in canonical coordinates (q, p): metric,
/// the three complex structures and Kähler forms, the rotating field Z and
/// its ω₁-Hamiltonian f_Z (with the one-loop offset folded in).
#[derive(Clone)]
pub struct HKData {
    pub base: CaskStructure,
    pub c: f64,
    pub chart: Arc<Chart>,
    pub g: TensorFieldSpec,
    pub i1: TensorFieldSpec,
    pub i2: TensorFieldSpec,
    pub i3: TensorFieldSpec,
    pub om1: TensorFieldSpec,
    pub om2: TensorFieldSpec,
    pub om3: TensorFieldSpec,
    pub z: TensorFieldSpec,
    pub f_z: TensorFieldSpec,
    /// Component matrix of g on T*M (block diagonal, constant).
    pub g_mat: DMatrix<f64>,
    /// Component matrices of ω_1, ω_2, ω_3.
    pub om_mats: [DMatrix<f64>; 3],
    /// Matrix generating Z (Z = Z_mat · (q, p)).
    pub z_mat: DMatrix<f64>,
}

impl std::fmt::Debug for HKData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HKData")
            .field("k", &self.base.k)
            .field("c", &self.c)
            .finish()
    }
}

impl HKData {
    pub fn dim(&self) -> usize {
        4 * self.base.k + 4
    }

    /// Kähler form by index, with ω_0 = g.
    pub fn omega(&self, i: usize) -> &TensorFieldSpec {
        match i {
            0 => &self.g,
            1 => &self.om1,
            2 => &self.om2,
            3 => &self.om3,
            _ => panic!("omega index out of range"),
        }
    }
}

fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((n, n), (m, m)).copy_from(b);
    out
}

/// Rigid c-map of a CASK domain, with Hamiltonian offset c:
/// f_Z = −½ g_M(ξ, ξ)∘π − c/2.
pub fn rigid_cmap(cask: &CaskStructure, c: f64) -> HKData {
    let n = cask.dim();
    let d = 2 * n;
    let chart = Chart::with_domain(format!("tstar_m{}", cask.k), d, move |x| {
        cask_domain_contains(&x[..n])
    });

    let g_base = &cask.g_mat;
    let g_inv = g_base
        .clone()
        .try_inverse()
        .expect("flat CASK metric invertible");
    let j = &cask.j_mat;
    let omega = &cask.omega_mat;
    let omega_inv = omega
        .clone()
        .try_inverse()
        .expect("symplectic form invertible");

    let g_mat = block_diag(g_base, &g_inv);

    // I1 = diag(J, J*); J* acts on covector components as Jᵀ.
    let i1_mat = block_diag(j, &j.transpose());

    // I2 swaps base and fiber through the symplectic form: with the musical
    // map (ι_X ω)_i = X^j Ω_{ji}, the blocks are [[0, Ω⁻¹], [−Ω, 0]].
    let mut i2_mat = DMatrix::zeros(d, d);
    i2_mat.view_mut((0, n), (n, n)).copy_from(&omega_inv);
    i2_mat.view_mut((n, 0), (n, n)).copy_from(&(-omega.clone()));

    let i3_mat = &i1_mat * &i2_mat;

    // ω_a(U, V) = g(I_a U, V)
    let om1_mat = i1_mat.transpose() * &g_mat;
    let om2_mat = i2_mat.transpose() * &g_mat;
    let om3_mat = i3_mat.transpose() * &g_mat;

    // Z = −(Jξ)^h: base components −J·q, no fiber components.
    let mut z_mat = DMatrix::zeros(d, d);
    z_mat.view_mut((0, 0), (n, n)).copy_from(&(-j.clone()));

    // f_Z = −½ qᵀ G q − c/2
    let mut fz_quad = DMatrix::zeros(d, d);
    fz_quad
        .view_mut((0, 0), (n, n))
        .copy_from(&(-0.5 * g_base.clone()));

    let mk = |valence, m: &DMatrix<f64>| {
        TensorFieldSpec::new(chart.clone(), valence, ConstField(row_major(m)))
    };

    HKData {
        base: cask.clone(),
        c,
        chart: chart.clone(),
        g: mk(Valence::Sym2, &g_mat),
        i1: mk(Valence::Endo, &i1_mat),
        i2: mk(Valence::Endo, &i2_mat),
        i3: mk(Valence::Endo, &i3_mat),
        om1: mk(Valence::Form(2), &om1_mat),
        om2: mk(Valence::Form(2), &om2_mat),
        om3: mk(Valence::Form(2), &om3_mat),
        z: TensorFieldSpec::new(
            chart.clone(),
            Valence::Vector,
            AffineVectorField::linear(z_mat.clone()),
        ),
        f_z: TensorFieldSpec::new(
            chart.clone(),
            Valence::Scalar,
            QuadraticScalarField {
                quad: fz_quad,
                constant: -c / 2.0,
            },
        ),
        g_mat,
        om_mats: [om1_mat, om2_mat, om3_mat],
        z_mat,
    }
}

/// The elementary deformation used by the HK/QK twist:
/// g_H = g/f_Z + g_α/f_Z², ω_H = ω₁ + dα₀, f_H = f_Z + g(Z, Z).
#[derive(Clone)]
pub struct Deformation {
    pub g_h: TensorFieldSpec,
    pub om_h: TensorFieldSpec,
    pub f_h: TensorFieldSpec,
    /// α_0 = ι_Z g, kept for diagnostics.
    pub alpha0: TensorFieldSpec,
}

/// g/f_Z + g_α/f_Z² with g_α = Σ_{i=0..3} α_i ⊗ α_i, α_i = ι_Z ω_i, ω_0 = g.
struct DeformedMetric {
    g: Arc<dyn FieldEval>,
    oms: [Arc<dyn FieldEval>; 3],
    z: Arc<dyn FieldEval>,
    f_z: Arc<dyn FieldEval>,
}

impl FieldExpr for DeformedMetric {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
        let d = x.len();
        let g = S::eval_field(self.g.as_ref(), x);
        let z = S::eval_field(self.z.as_ref(), x);
        let fz = S::eval_field(self.f_z.as_ref(), x).remove(0);

        let contract = |t: &[S]| -> Vec<S> {
            (0..d)
                .map(|a| {
                    let mut acc = S::from_f64(0.0);
                    for b in 0..d {
                        acc = acc + z[b].clone() * t[b * d + a].clone();
                    }
                    acc
                })
                .collect()
        };

        let mut alphas = vec![contract(&g)];
        for om in &self.oms {
            alphas.push(contract(&S::eval_field(om.as_ref(), x)));
        }

        let inv_f = fz.recip();
        let inv_f2 = inv_f.clone() * inv_f.clone();
        let mut out = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                let mut galpha = S::from_f64(0.0);
                for alpha in &alphas {
                    galpha = galpha + alpha[a].clone() * alpha[b].clone();
                }
                out.push(g[a * d + b].clone() * inv_f.clone() + galpha * inv_f2.clone());
            }
        }
        out
    }
}

/// f_H = f_Z + g(Z, Z).
struct TwistMoment {
    g: Arc<dyn FieldEval>,
    z: Arc<dyn FieldEval>,
    f_z: Arc<dyn FieldEval>,
}

impl FieldExpr for TwistMoment {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
        let d = x.len();
        let g = S::eval_field(self.g.as_ref(), x);
        let z = S::eval_field(self.z.as_ref(), x);
        let fz = S::eval_field(self.f_z.as_ref(), x).remove(0);
        let mut gzz = S::from_f64(0.0);
        for a in 0..d {
            for b in 0..d {
                gzz = gzz + g[a * d + b].clone() * z[a].clone() * z[b].clone();
            }
        }
        vec![fz + gzz]
    }
}

/// Build the elementary deformation of a rigid c-map space.
pub fn elementary_deformation(hk: &HKData) -> Deformation {
    let alpha0 = contract_field(&hk.g, &hk.z);
    let g_h = TensorFieldSpec::new(
        hk.chart.clone(),
        Valence::Sym2,
        DeformedMetric {
            g: hk.g.program().clone(),
            oms: [
                hk.om1.program().clone(),
                hk.om2.program().clone(),
                hk.om3.program().clone(),
            ],
            z: hk.z.program().clone(),
            f_z: hk.f_z.program().clone(),
        },
    );
    let om_h = lincomb_field(1.0, &hk.om1, 1.0, &d_field(&alpha0));
    let f_h = TensorFieldSpec::new(
        hk.chart.clone(),
        Valence::Scalar,
        TwistMoment {
            g: hk.g.program().clone(),
            z: hk.z.program().clone(),
            f_z: hk.f_z.program().clone(),
        },
    );
    Deformation {
        g_h,
        om_h,
        f_h,
        alpha0,
    }
}

/// Guard used by twist-stage operations: both f_Z and f_H must stay away
/// from zero at the evaluation point.
pub fn check_twist_regular(
    hk: &HKData,
    defo: &Deformation,
    p: &jetcalc::Point,
) -> Result<(f64, f64)> {
    let fz = hk.f_z.eval_scalar(p)?;
    if fz.abs() < 1e-12 {
        return Err(QkError::TwistSingularity {
            name: "f_Z",
            value: fz,
        });
    }
    let fh = defo.f_h.eval_scalar(p)?;
    if fh.abs() < 1e-12 {
        return Err(QkError::TwistSingularity {
            name: "f_H",
            value: fh,
        });
    }
    Ok((fz, fh))
}
