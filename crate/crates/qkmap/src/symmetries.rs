//! The symmetry pipeline on the hyper-Kähler side of the twist: pseudo-unitary
//! CASK automorphisms, their canonical lifts to T*M with ω₁-Hamiltonians, the
//! modified fields whose twists are Killing, the twist-Killing criterion, and
//! the central-extension cocycle.

use std::sync::Arc;

use jetcalc::{
    contract, lie_bracket, lie_derivative, sup_norm, sup_slice, sym_product, AffineVectorField,
    FieldEval, FieldExpr, Point, QuadraticScalarField, Ring, TensorFieldSpec, Valence,
};
use nalgebra::{DMatrix, DVector};

use crate::error::{QkError, Result};
use crate::geometries::{check_twist_regular, CaskStructure, Deformation, HKData};

/// A generator of the pseudo-unitary algebra preserving the flat CASK data.
#[derive(Clone, Debug)]
pub struct Generator {
    pub label: String,
    /// Realified matrix acting on the chart coordinates of M_k.
    pub real_mat: DMatrix<f64>,
    /// Generates the distinguished circle (the Jξ direction).
    pub central: bool,
    /// Lies in the traceless subalgebra.
    pub traceless: bool,
}

/// Embed the complex entry re + i·im at block position (μ, ν) of the
/// realified matrix (interleaved x/y coordinates).
fn put_complex(m: &mut DMatrix<f64>, mu: usize, nu: usize, re: f64, im: f64) {
    m[(2 * mu, 2 * nu)] += re;
    m[(2 * mu + 1, 2 * nu + 1)] += re;
    m[(2 * mu + 1, 2 * nu)] += im;
    m[(2 * mu, 2 * nu + 1)] -= im;
}

/// Real basis of 𝔲(k,1) acting on ℂ^{k+1} with the Hermitian form
/// η = diag(−1, 1, ..., 1). The first generator is the central iI; the rest
/// span 𝔰𝔲(k,1). Count: (k+1)² in total.
pub fn unitary_generators(k: usize) -> Vec<Generator> {
    let n = k + 1;
    let d = 2 * n;
    let mut out = Vec::new();

    let mut central = DMatrix::zeros(d, d);
    for mu in 0..n {
        put_complex(&mut central, mu, mu, 0.0, 1.0);
    }
    out.push(Generator {
        label: "iI".into(),
        real_mat: central,
        central: true,
        traceless: false,
    });

    // traceless diagonals i(E_00 − E_jj)
    for j in 1..n {
        let mut m = DMatrix::zeros(d, d);
        put_complex(&mut m, 0, 0, 0.0, 1.0);
        put_complex(&mut m, j, j, 0.0, -1.0);
        out.push(Generator {
            label: format!("i(E00-E{j}{j})"),
            real_mat: m,
            central: false,
            traceless: true,
        });
    }

    // mixed-signature pairs (0, j): E_0j + E_j0 and i(E_0j − E_j0)
    for j in 1..n {
        let mut m = DMatrix::zeros(d, d);
        put_complex(&mut m, 0, j, 1.0, 0.0);
        put_complex(&mut m, j, 0, 1.0, 0.0);
        out.push(Generator {
            label: format!("E0{j}+E{j}0"),
            real_mat: m,
            central: false,
            traceless: true,
        });
        let mut m = DMatrix::zeros(d, d);
        put_complex(&mut m, 0, j, 0.0, 1.0);
        put_complex(&mut m, j, 0, 0.0, -1.0);
        out.push(Generator {
            label: format!("i(E0{j}-E{j}0)"),
            real_mat: m,
            central: false,
            traceless: true,
        });
    }

    // definite pairs (i, j), 1 ≤ i < j: E_ij − E_ji and i(E_ij + E_ji)
    for i in 1..n {
        for j in (i + 1)..n {
            let mut m = DMatrix::zeros(d, d);
            put_complex(&mut m, i, j, 1.0, 0.0);
            put_complex(&mut m, j, i, -1.0, 0.0);
            out.push(Generator {
                label: format!("E{i}{j}-E{j}{i}"),
                real_mat: m,
                central: false,
                traceless: true,
            });
            let mut m = DMatrix::zeros(d, d);
            put_complex(&mut m, i, j, 0.0, 1.0);
            put_complex(&mut m, j, i, 0.0, 1.0);
            out.push(Generator {
                label: format!("i(E{i}{j}+E{j}{i})"),
                real_mat: m,
                central: false,
                traceless: true,
            });
        }
    }

    debug_assert_eq!(out.len(), n * n);
    out
}

/// Residual of the pseudo-unitarity conditions MᵀG + GM = 0 and MJ − JM = 0
/// for a realified generator.
pub fn generator_residual(gen: &Generator, cask: &CaskStructure) -> f64 {
    let m = &gen.real_mat;
    let a = m.transpose() * &cask.g_mat + &cask.g_mat * m;
    let b = m * &cask.j_mat - &cask.j_mat * m;
    sup_norm(&a).max(sup_norm(&b))
}

/// The linear vector field X_A(z) = Az on the CASK chart.
pub fn generator_field(gen: &Generator, cask: &CaskStructure) -> TensorFieldSpec {
    TensorFieldSpec::new(
        cask.chart.clone(),
        Valence::Vector,
        AffineVectorField::linear(gen.real_mat.clone()),
    )
}

/// A lifted symmetry of the rigid c-map structure: the canonical lift Y of a
/// CASK automorphism, with its Hamiltonians for ω₁ and ω_H.
#[derive(Clone)]
pub struct SymmetryCandidate {
    /// Realified automorphism matrix that generated the lift.
    pub origin: DMatrix<f64>,
    pub y: TensorFieldSpec,
    pub f_omega1: TensorFieldSpec,
    pub f_omega_h: TensorFieldSpec,
    /// Quadratic form of f_omega_h, kept so constant shifts stay cheap.
    quad_h: DMatrix<f64>,
    offset_h: f64,
}

impl std::fmt::Debug for SymmetryCandidate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymmetryCandidate").finish()
    }
}

impl SymmetryCandidate {
    /// The same candidate with its ω_H-Hamiltonian shifted by a constant.
    pub fn with_shifted_hamiltonian(&self, shift: f64, hk: &HKData) -> SymmetryCandidate {
        let mut out = self.clone();
        out.offset_h += shift;
        out.f_omega_h = TensorFieldSpec::new(
            hk.chart.clone(),
            Valence::Scalar,
            QuadraticScalarField {
                quad: out.quad_h.clone(),
                constant: out.offset_h,
            },
        );
        out
    }
}

/// Tolerance for the post-construction validation of a candidate.
const CANDIDATE_TOL: f64 = 1e-9;

/// Canonical lift of a CASK automorphism to T*M:
/// Y = (M q, −Mᵀ p), f_{ω₁} = ½ ω_M(ξ, X)∘π + ½ S(η, η) with
/// S = M J G⁻¹ on the fiber, f_{ω_H} = f_{ω₁} + g(Z, Y).
///
/// The candidate is validated at `probe_points` (Hamiltonian identity,
/// invariance of the hyper-Kähler data and of f_Z, commutation with Z).
pub fn canonical_lift(
    a_real: &DMatrix<f64>,
    hk: &HKData,
    probe_points: &[Point],
) -> Result<SymmetryCandidate> {
    let n = hk.base.dim();
    let d = 2 * n;
    let m = a_real;
    assert_eq!(m.nrows(), n, "generator must act on the base chart");

    let mut lift = DMatrix::zeros(d, d);
    lift.view_mut((0, 0), (n, n)).copy_from(m);
    lift.view_mut((n, n), (n, n)).copy_from(&(-m.transpose()));
    let y = TensorFieldSpec::new(
        hk.chart.clone(),
        Valence::Vector,
        AffineVectorField::linear(lift),
    );

    let g = &hk.base.g_mat;
    let j = &hk.base.j_mat;
    let omega = &hk.base.omega_mat;
    let g_inv = g.clone().try_inverse().expect("flat metric invertible");

    // base moment map ½ qᵀ (Ω M) q and fiber term ½ pᵀ (M J G⁻¹) p
    let mut quad1 = DMatrix::zeros(d, d);
    quad1.view_mut((0, 0), (n, n)).copy_from(&(0.5 * omega * m));
    quad1
        .view_mut((n, n), (n, n))
        .copy_from(&(0.5 * m * j * &g_inv));
    let f_omega1 = TensorFieldSpec::new(
        hk.chart.clone(),
        Valence::Scalar,
        QuadraticScalarField {
            quad: quad1.clone(),
            constant: 0.0,
        },
    );

    // g(Z, Y)(q) = (−Jq)ᵀ G (Mq), added to the base block
    let mut quad_h = quad1;
    let zy = -(j.transpose() * g * m);
    let upper = quad_h.view((0, 0), (n, n)) + zy;
    quad_h.view_mut((0, 0), (n, n)).copy_from(&upper);
    let f_omega_h = TensorFieldSpec::new(
        hk.chart.clone(),
        Valence::Scalar,
        QuadraticScalarField {
            quad: quad_h.clone(),
            constant: 0.0,
        },
    );

    let cand = SymmetryCandidate {
        origin: m.clone(),
        y,
        f_omega1,
        f_omega_h,
        quad_h,
        offset_h: 0.0,
    };

    let residual = candidate_residual(&cand, hk, probe_points)?;
    if residual > CANDIDATE_TOL {
        return Err(QkError::ValidationError {
            what: "canonical lift does not satisfy the symmetry-candidate identities".into(),
            residual,
        });
    }
    Ok(cand)
}

/// Max residual of the defining identities of a symmetry candidate:
/// d f_{ω₁} + ι_Y ω₁ = 0, L_Y g = L_Y ω_a = 0, L_Y f_Z = 0, [Y, Z] = 0.
pub fn candidate_residual(cand: &SymmetryCandidate, hk: &HKData, points: &[Point]) -> Result<f64> {
    let df = jetcalc::d_field(&cand.f_omega1);
    let mut worst: f64 = 0.0;
    for p in points {
        let dfv = df.eval(p)?;
        let iy = contract(&hk.om1, &cand.y, p)?;
        for (a, b) in dfv.iter().zip(&iy) {
            worst = worst.max((a + b).abs());
        }
        for t in [&hk.g, &hk.om1, &hk.om2, &hk.om3] {
            worst = worst.max(sup_slice(&lie_derivative(t, &cand.y, p)?));
        }
        worst = worst.max(sup_slice(&lie_derivative(&hk.f_z, &cand.y, p)?));
        worst = worst.max(lie_bracket(&cand.y, &hk.z, p)?.amax());
    }
    Ok(worst)
}

/// Y − (f_{ω_H}/f_H) Z, the field whose twist is Killing.
struct ModifiedLift {
    y: Arc<dyn FieldEval>,
    z: Arc<dyn FieldEval>,
    f_wh: Arc<dyn FieldEval>,
    f_h: Arc<dyn FieldEval>,
}

impl FieldExpr for ModifiedLift {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
        let y = S::eval_field(self.y.as_ref(), x);
        let z = S::eval_field(self.z.as_ref(), x);
        let fw = S::eval_field(self.f_wh.as_ref(), x).remove(0);
        let fh = S::eval_field(self.f_h.as_ref(), x).remove(0);
        let psi = -(fw / fh);
        y.into_iter()
            .zip(z)
            .map(|(yi, zi)| yi + psi.clone() * zi)
            .collect()
    }
}

/// Build Y_H = Y − (f_{ω_H}/f_H) Z.
pub fn modified_field(
    cand: &SymmetryCandidate,
    hk: &HKData,
    defo: &Deformation,
) -> TensorFieldSpec {
    TensorFieldSpec::new(
        hk.chart.clone(),
        Valence::Vector,
        ModifiedLift {
            y: cand.y.program().clone(),
            z: hk.z.program().clone(),
            f_wh: cand.f_omega_h.program().clone(),
            f_h: defo.f_h.program().clone(),
        },
    )
}

/// The twist-Killing criterion: L_V g_H − 2 f_H⁻¹ (ι_V ω_H) ∨ (ι_Z g_H) at `p`.
/// Vanishing is equivalent to the twist of V being Killing downstairs.
pub fn twist_killing_residual(
    v: &TensorFieldSpec,
    hk: &HKData,
    defo: &Deformation,
    p: &Point,
) -> Result<DMatrix<f64>> {
    let (_, fh) = check_twist_regular(hk, defo, p)?;
    let d = hk.dim();
    let lg = lie_derivative(&defo.g_h, v, p)?;
    let lg = DMatrix::from_row_slice(d, d, &lg);
    let a = DVector::from_vec(contract(&defo.om_h, v, p)?);
    let b = DVector::from_vec(contract(&defo.g_h, &hk.z, p)?);
    Ok(lg - (2.0 / fh) * sym_product(&a, &b))
}

/// Structure constants of a candidate list, solved from bracket values at
/// sample points by least squares. Errors if the span does not close.
pub fn structure_constants(
    cands: &[SymmetryCandidate],
    points: &[Point],
) -> Result<Vec<DMatrix<f64>>> {
    let m = cands.len();
    let d = points
        .first()
        .map(|p| p.coords().len())
        .ok_or(QkError::InsufficientSamples { needed: 1, got: 0 })?;
    let rows = d * points.len();

    let mut basis = DMatrix::zeros(rows, m);
    for (pi, p) in points.iter().enumerate() {
        for (l, cand) in cands.iter().enumerate() {
            let vals = cand.y.eval_vector(p)?;
            basis.view_mut((pi * d, l), (d, 1)).copy_from(&vals);
        }
    }
    let svd = basis.clone().svd(true, true);

    // consts[l][(j,k)] = c^l_{jk}
    let mut consts = vec![DMatrix::zeros(m, m); m];
    for jj in 0..m {
        for kk in 0..jj {
            let mut rhs = DVector::zeros(rows);
            for (pi, p) in points.iter().enumerate() {
                let br = lie_bracket(&cands[jj].y, &cands[kk].y, p)?;
                rhs.view_mut((pi * d, 0), (d, 1)).copy_from(&br);
            }
            let sol = svd.solve(&rhs, 1e-12).map_err(|_| QkError::ClosureError {
                residual: f64::INFINITY,
            })?;
            let residual = (&basis * &sol - rhs).amax();
            if residual > 1e-9 {
                return Err(QkError::ClosureError { residual });
            }
            for l in 0..m {
                consts[l][(jj, kk)] = sol[l];
                consts[l][(kk, jj)] = -sol[l];
            }
        }
    }
    Ok(consts)
}

/// Central-extension cocycle evaluation: per candidate pair the combination
/// ω_H(Y_j, Y_k) − Σ_l c^l_{jk} f_{Y_l}, its mean over the samples and the
/// spread around that mean.
#[derive(Clone, Debug)]
pub struct CocycleReport {
    /// Antisymmetric matrix of means (the cocycle representatives).
    pub matrix: DMatrix<f64>,
    /// Max |value − mean| over all pairs and sample points.
    pub max_spread: f64,
    /// Max bracket-closure residual found while validating the input.
    pub closure_residual: f64,
}

/// Evaluate the cocycle over the sample points. The candidates must close
/// under the bracket with the supplied structure constants (residual < 1e-9).
pub fn cocycle(
    cands: &[SymmetryCandidate],
    consts: &[DMatrix<f64>],
    defo: &Deformation,
    points: &[Point],
) -> Result<CocycleReport> {
    let m = cands.len();
    if m == 0 || points.is_empty() {
        return Ok(CocycleReport {
            matrix: DMatrix::zeros(m, m),
            max_spread: 0.0,
            closure_residual: 0.0,
        });
    }
    let d = points[0].coords().len();

    let mut closure: f64 = 0.0;
    for p in points.iter().take(3) {
        for jj in 0..m {
            for kk in 0..jj {
                let br = lie_bracket(&cands[jj].y, &cands[kk].y, p)?;
                let mut combo = DVector::zeros(d);
                for l in 0..m {
                    combo += consts[l][(jj, kk)] * cands[l].y.eval_vector(p)?;
                }
                closure = closure.max((br - combo).amax());
            }
        }
    }
    if closure > 1e-9 {
        return Err(QkError::ClosureError { residual: closure });
    }

    let mut matrix = DMatrix::zeros(m, m);
    let mut max_spread: f64 = 0.0;
    for jj in 0..m {
        for kk in 0..jj {
            let mut vals = Vec::with_capacity(points.len());
            for p in points {
                let omh = defo.om_h.eval_matrix(p)?;
                let yj = cands[jj].y.eval_vector(p)?;
                let yk = cands[kk].y.eval_vector(p)?;
                let mut v = (yj.transpose() * &omh * yk)[(0, 0)];
                for l in 0..m {
                    v -= consts[l][(jj, kk)] * cands[l].f_omega_h.eval_scalar(p)?;
                }
                vals.push(v);
            }
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let spread = vals.iter().fold(0.0f64, |s, v| s.max((v - mean).abs()));
            max_spread = max_spread.max(spread);
            matrix[(jj, kk)] = mean;
            matrix[(kk, jj)] = -mean;
        }
    }
    Ok(CocycleReport {
        matrix,
        max_spread,
        closure_residual: closure,
    })
}

/// Residuals of the projectability checks of a CASK automorphism at a point
/// of the level set g(ξ, ξ) = −1.
#[derive(Clone, Debug)]
pub struct PskProjection {
    /// |g(X_A, ξ)|.
    pub orthogonality: f64,
    /// sup |[X_A, ξ]|.
    pub commute_xi: f64,
    /// sup |[X_A, Jξ]|.
    pub commute_jxi: f64,
    /// Hamiltonian property of the vertical coefficient: with the level-set
    /// connection form θ = g(Jξ, ·), whose curvature is dθ = 2ω_M in the flat
    /// chart, f equals θ(X_A) and satisfies df(W) + dθ(X_A, W) = 0 along
    /// horizontal directions. This reports sup_W of that residual.
    pub hamiltonian: f64,
    /// The vertical coefficient f at the point.
    pub vertical_coeff: f64,
    /// Horizontal part X^H at the point.
    pub horizontal: DVector<f64>,
}

/// Vertical coefficient f in X_A = X^H − f·Jξ as a scalar field:
/// f(z) = −g(Az, Jz)/g(Jz, Jz), and g(Jz, Jz) = g(z, z).
struct VerticalCoeff {
    a: DMatrix<f64>,
    g: DMatrix<f64>,
    j: DMatrix<f64>,
}

impl FieldExpr for VerticalCoeff {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
        let n = self.a.nrows();
        let matvec = |m: &DMatrix<f64>| -> Vec<S> {
            (0..n)
                .map(|i| {
                    let mut acc = S::from_f64(0.0);
                    for l in 0..n {
                        if m[(i, l)] != 0.0 {
                            acc = acc + S::from_f64(m[(i, l)]) * x[l].clone();
                        }
                    }
                    acc
                })
                .collect()
        };
        let ax = matvec(&self.a);
        let jx = matvec(&self.j);
        let mut num = S::from_f64(0.0);
        let mut den = S::from_f64(0.0);
        for i in 0..n {
            for l in 0..n {
                let gil = self.g[(i, l)];
                if gil != 0.0 {
                    num = num + S::from_f64(gil) * ax[i].clone() * jx[l].clone();
                    den = den + S::from_f64(gil) * x[i].clone() * x[l].clone();
                }
            }
        }
        vec![-(num / den)]
    }
}

/// Check the projectability data of a generator at a level-set point:
/// orthogonality to ξ, commutation with ξ and Jξ, and the Hamiltonian
/// property of the vertical coefficient along horizontal directions.
pub fn psk_projection_check(
    gen: &Generator,
    cask: &CaskStructure,
    p: &Point,
) -> Result<PskProjection> {
    let n = cask.dim();
    let coords = DVector::from_column_slice(p.coords());
    let g = &cask.g_mat;
    let gxx = (coords.transpose() * g * &coords)[(0, 0)];
    if (gxx + 1.0).abs() > 1e-9 {
        return Err(QkError::InvalidParameter(format!(
            "point is not on the level set g(ξ,ξ) = −1 (got {gxx})"
        )));
    }

    let x_field = generator_field(gen, cask);
    let jxi_field = TensorFieldSpec::new(
        cask.chart.clone(),
        Valence::Vector,
        AffineVectorField::linear(cask.j_mat.clone()),
    );

    let xv = x_field.eval_vector(p)?;
    let xi_v = coords.clone();
    let jxi_v = &cask.j_mat * &coords;

    let orthogonality = (xv.transpose() * g * &xi_v)[(0, 0)].abs();
    let commute_xi = lie_bracket(&x_field, &cask.xi, p)?.amax();
    let commute_jxi = lie_bracket(&x_field, &jxi_field, p)?.amax();

    // split X = a·ξ − f·Jξ + X^H against the g-orthogonal decomposition
    let g_xi = (xi_v.transpose() * g * &xi_v)[(0, 0)];
    let g_jxi = (jxi_v.transpose() * g * &jxi_v)[(0, 0)];
    let a_coef = (xv.transpose() * g * &xi_v)[(0, 0)] / g_xi;
    let f = -(xv.transpose() * g * &jxi_v)[(0, 0)] / g_jxi;
    let horizontal = &xv - a_coef * &xi_v + f * &jxi_v;

    let f_field = TensorFieldSpec::new(
        cask.chart.clone(),
        Valence::Scalar,
        VerticalCoeff {
            a: gen.real_mat.clone(),
            g: cask.g_mat.clone(),
            j: cask.j_mat.clone(),
        },
    );
    let df = DVector::from_vec(jetcalc::d_field(&f_field).eval(p)?);

    let mut hamiltonian: f64 = 0.0;
    for b in 0..n {
        // project e_b onto the g-orthogonal complement of span{ξ, Jξ}
        let mut w = DVector::zeros(n);
        w[b] = 1.0;
        let w_xi = (w.transpose() * g * &xi_v)[(0, 0)] / g_xi;
        let w_jxi = (w.transpose() * g * &jxi_v)[(0, 0)] / g_jxi;
        let w = w - w_xi * &xi_v - w_jxi * &jxi_v;

        let dfw = df.dot(&w);
        // dθ(X, W) = 2 ω_M(X, W)
        let mut dtheta_xw = 0.0;
        for i in 0..n {
            for c in 0..n {
                dtheta_xw += 2.0 * xv[i] * cask.omega_mat[(i, c)] * w[c];
            }
        }
        hamiltonian = hamiltonian.max((dfw + dtheta_xw).abs());
    }

    Ok(PskProjection {
        orthogonality,
        commute_xi,
        commute_jxi,
        hamiltonian,
        vertical_coeff: f,
        horizontal,
    })
}
