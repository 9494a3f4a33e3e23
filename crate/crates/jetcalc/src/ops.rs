//! The standard differential-geometry operators, evaluated pointwise.
//!
//! Sign conventions are pinned by fixtures: the round unit 2-sphere has
//! R_{1212} = +1 and scal = +2, and a constant-curvature-κ metric satisfies
//! R_{ijkl} = κ (g_{ik} g_{jl} − g_{il} g_{jk}).

use nalgebra::{DMatrix, DVector};

use crate::error::{CalcError, Result};
use crate::field::{contract_field, d_field, lie_field, ChartMap, Point, TensorFieldSpec, Valence};

/// Dense rank-3 component array Γ[k][i][j] with all three indices of size d.
#[derive(Clone, Debug)]
pub struct Tensor3 {
    pub dim: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dim: usize) -> Self {
        Tensor3 {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.dim + i) * self.dim + j] = v;
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Dense rank-4 component array R[i][j][k][l].
#[derive(Clone, Debug)]
pub struct Tensor4 {
    pub dim: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Self {
        Tensor4 {
            dim,
            data: vec![0.0; dim * dim * dim * dim],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[((i * self.dim + j) * self.dim + k) * self.dim + l]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        self.data[((i * self.dim + j) * self.dim + k) * self.dim + l] = v;
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn require_metric(g: &TensorFieldSpec) -> Result<()> {
    match g.valence() {
        Valence::Sym2 => Ok(()),
        other => Err(CalcError::ValenceMismatch {
            expected: "Sym2".into(),
            found: format!("{:?}", other),
        }),
    }
}

/// Inverse and determinant of the metric component matrix.
pub fn invert_metric(gm: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let lu = gm.clone().lu();
    let det = lu.determinant();
    if det.abs() < 1e-14 {
        return Err(CalcError::SingularMetric { det });
    }
    let inv = lu.try_inverse().ok_or(CalcError::SingularMetric { det })?;
    Ok((inv, det))
}

/// Christoffel symbols of the second kind, Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} +
/// ∂_j g_{il} − ∂_l g_{ij}).
pub fn christoffel(g: &TensorFieldSpec, p: &Point) -> Result<Tensor3> {
    require_metric(g)?;
    let d = g.dim();
    let jets = g.jets(p)?;
    let gm = DMatrix::from_fn(d, d, |i, j| jets.values[i * d + j]);
    let (ginv, _) = invert_metric(&gm)?;
    // dg[l](i,j) = ∂_l g_{ij}
    let dg = |l: usize, i: usize, j: usize| jets.grads[i * d + j][l];
    let mut gamma = Tensor3::zeros(d);
    for k in 0..d {
        for i in 0..d {
            for j in 0..=i {
                let mut acc = 0.0;
                for l in 0..d {
                    acc += ginv[(k, l)] * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                }
                gamma.set(k, i, j, 0.5 * acc);
                gamma.set(k, j, i, 0.5 * acc);
            }
        }
    }
    Ok(gamma)
}

/// Fully lowered Riemann tensor R_{ijkl} in the sphere-positive convention.
pub fn riemann(g: &TensorFieldSpec, p: &Point) -> Result<Tensor4> {
    require_metric(g)?;
    let d = g.dim();
    let jets2 = g.jets2(p)?;
    let gm = DMatrix::from_fn(d, d, |i, j| jets2[i * d + j].val);
    let (ginv, _) = invert_metric(&gm)?;

    let dg = |l: usize, i: usize, j: usize| -> f64 {
        let jet = &jets2[i * d + j];
        if jet.grad.is_empty() {
            0.0
        } else {
            jet.grad[l]
        }
    };
    let d2g = |m: usize, l: usize, i: usize, j: usize| -> f64 {
        let jet = &jets2[i * d + j];
        if jet.hess.is_empty() {
            0.0
        } else {
            jet.hess[(m, l)]
        }
    };

    let mut gamma = Tensor3::zeros(d);
    for k in 0..d {
        for i in 0..d {
            for j in 0..=i {
                let mut acc = 0.0;
                for l in 0..d {
                    acc += ginv[(k, l)] * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                }
                gamma.set(k, i, j, 0.5 * acc);
                gamma.set(k, j, i, 0.5 * acc);
            }
        }
    }

    // R_{ijkl} = ½(∂_j∂_k g_{il} + ∂_i∂_l g_{jk} − ∂_j∂_l g_{ik} − ∂_i∂_k g_{jl})
    //            + g_{mn}(Γ^m_{jk} Γ^n_{il} − Γ^m_{jl} Γ^n_{ik})
    let mut r = Tensor4::zeros(d);
    for i in 0..d {
        for j in 0..i {
            // antisymmetric in (i,j); fill i>j and mirror
            for k in 0..d {
                for l in 0..k {
                    let second = 0.5
                        * (d2g(j, k, i, l) + d2g(i, l, j, k) - d2g(j, l, i, k) - d2g(i, k, j, l));
                    let mut quad = 0.0;
                    for m in 0..d {
                        for n in 0..d {
                            quad += gm[(m, n)]
                                * (gamma.get(m, j, k) * gamma.get(n, i, l)
                                    - gamma.get(m, j, l) * gamma.get(n, i, k));
                        }
                    }
                    let v = second + quad;
                    r.set(i, j, k, l, v);
                    r.set(j, i, k, l, -v);
                    r.set(i, j, l, k, -v);
                    r.set(j, i, l, k, v);
                }
            }
        }
    }
    Ok(r)
}

/// Ricci tensor Ric_{jl} = g^{ik} R_{ijkl} and scalar curvature.
pub fn ricci_scalar(g: &TensorFieldSpec, p: &Point) -> Result<(DMatrix<f64>, f64)> {
    let d = g.dim();
    let r = riemann(g, p)?;
    let gm = g.eval_matrix(p)?;
    let (ginv, _) = invert_metric(&gm)?;
    let ric = DMatrix::from_fn(d, d, |j, l| {
        let mut acc = 0.0;
        for i in 0..d {
            for k in 0..d {
                acc += ginv[(i, k)] * r.get(i, j, k, l);
            }
        }
        acc
    });
    let mut scal = 0.0;
    for j in 0..d {
        for l in 0..d {
            scal += ginv[(j, l)] * ric[(j, l)];
        }
    }
    Ok((ric, scal))
}

/// The curvature operator on Λ² together with the induced inner product and
/// its generalized spectrum.
#[derive(Clone, Debug)]
pub struct CurvatureOperator {
    /// Index pairs (i, j), i < j, labelling the Λ² basis.
    pub pairs: Vec<(usize, usize)>,
    /// Bilinear form of R on the Λ² basis.
    pub op: DMatrix<f64>,
    /// Induced inner product G_{(ij)(kl)} = g_{ik} g_{jl} − g_{il} g_{jk}.
    pub lambda2_metric: DMatrix<f64>,
    /// Generalized eigenvalues of R v = λ G v, ascending.
    pub eigenvalues: Vec<f64>,
    /// Scalar curvature at the point.
    pub scal: f64,
    /// |trace(G⁻¹R) − scal/2|, an internal consistency gate.
    pub trace_gate: f64,
}

/// Builds the curvature operator on Λ² and solves the generalized eigenvalue
/// problem R v = λ G v.
pub fn curvature_operator(g: &TensorFieldSpec, p: &Point) -> Result<CurvatureOperator> {
    let d = g.dim();
    let r = riemann(g, p)?;
    let gm = g.eval_matrix(p)?;
    let (ginv, _) = invert_metric(&gm)?;

    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| ((i + 1)..d).map(move |j| (i, j)))
        .collect();
    let n = pairs.len();

    let op = DMatrix::from_fn(n, n, |a, b| {
        let (i, j) = pairs[a];
        let (k, l) = pairs[b];
        r.get(i, j, k, l)
    });
    let lambda2 = DMatrix::from_fn(n, n, |a, b| {
        let (i, j) = pairs[a];
        let (k, l) = pairs[b];
        gm[(i, k)] * gm[(j, l)] - gm[(i, l)] * gm[(j, k)]
    });

    let eigenvalues = generalized_sym_eigenvalues(&op, &lambda2)?;

    // scal for the gate
    let mut scal = 0.0;
    for j in 0..d {
        for l in 0..d {
            let mut acc = 0.0;
            for i in 0..d {
                for k in 0..d {
                    acc += ginv[(i, k)] * r.get(i, j, k, l);
                }
            }
            scal += ginv[(j, l)] * acc;
        }
    }
    let trace: f64 = eigenvalues.iter().sum();
    let trace_gate = (trace - scal / 2.0).abs();

    Ok(CurvatureOperator {
        pairs,
        op,
        lambda2_metric: lambda2,
        eigenvalues,
        scal,
        trace_gate,
    })
}

/// Eigenvalues of the pencil (A, B) for symmetric A and symmetric B. Uses the
/// Cholesky reduction when B is positive definite and falls back to the
/// non-symmetric solve of B⁻¹A otherwise.
pub fn generalized_sym_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>> {
    if let Some(chol) = b.clone().cholesky() {
        let l = chol.l();
        let linv = l
            .clone()
            .try_inverse()
            .ok_or_else(|| CalcError::EigenFailure("Cholesky factor not invertible".into()))?;
        let sym = &linv * a * linv.transpose();
        let sym = (&sym + sym.transpose()) * 0.5;
        let mut eig: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
        return Ok(eig);
    }
    let lu = b.clone().lu();
    let m = lu
        .solve(a)
        .ok_or_else(|| CalcError::EigenFailure("Λ² inner product is singular".into()))?;
    let scale = m.amax().max(1.0);
    let complex = m.complex_eigenvalues();
    let mut eig = Vec::with_capacity(complex.len());
    for z in complex.iter() {
        if z.im.abs() > 1e-8 * scale {
            return Err(CalcError::EigenFailure(format!(
                "complex eigenvalue {} in an indefinite pencil",
                z
            )));
        }
        eig.push(z.re);
    }
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(eig)
}

/// Lie derivative components L_X T at a point (same layout as `T.eval`).
pub fn lie_derivative(
    tensor: &TensorFieldSpec,
    flow: &TensorFieldSpec,
    p: &Point,
) -> Result<Vec<f64>> {
    if tensor.chart().name() != flow.chart().name() {
        return Err(CalcError::ChartMismatch {
            expected: tensor.chart().name().to_string(),
            found: flow.chart().name().to_string(),
        });
    }
    lie_field(tensor, flow).eval(p)
}

/// Lie bracket [X, Y] at a point.
pub fn lie_bracket(
    x_field: &TensorFieldSpec,
    y_field: &TensorFieldSpec,
    p: &Point,
) -> Result<DVector<f64>> {
    if x_field.chart().name() != y_field.chart().name() {
        return Err(CalcError::ChartMismatch {
            expected: x_field.chart().name().to_string(),
            found: y_field.chart().name().to_string(),
        });
    }
    // [X, Y] = L_X Y
    let comps = lie_field(y_field, x_field).eval(p)?;
    Ok(DVector::from_vec(comps))
}

/// Exterior derivative components (dω) at a point, full index layout.
pub fn exterior_derivative(form: &TensorFieldSpec, p: &Point) -> Result<Vec<f64>> {
    d_field(form).eval(p)
}

/// Pullback residual φ*g − g at `p`.
pub fn pullback_residual(map: &ChartMap, g: &TensorFieldSpec, p: &Point) -> Result<DMatrix<f64>> {
    require_metric(g)?;
    let (image, jac) = map.jacobian(p)?;
    let g_img = g.eval_matrix(&image)?;
    let g_here = g.eval_matrix(p)?;
    Ok(jac.transpose() * g_img * jac - g_here)
}

/// ι_X ω components at a point.
pub fn contract(tensor: &TensorFieldSpec, vector: &TensorFieldSpec, p: &Point) -> Result<Vec<f64>> {
    contract_field(tensor, vector).eval(p)
}

/// Nijenhuis tensor N_A(∂_i, ∂_j)^k of an endomorphism field, sup norm over
/// all components. Vanishes iff the almost complex structure is integrable.
pub fn nijenhuis_sup(a: &TensorFieldSpec, p: &Point) -> Result<f64> {
    if a.valence() != Valence::Endo {
        return Err(CalcError::ValenceMismatch {
            expected: "Endo".into(),
            found: format!("{:?}", a.valence()),
        });
    }
    let d = a.dim();
    let jets = a.jets(p)?;
    let av = |i: usize, j: usize| jets.values[i * d + j];
    let da = |l: usize, i: usize, j: usize| jets.grads[i * d + j][l];
    let mut sup: f64 = 0.0;
    for i in 0..d {
        for j in 0..i {
            for k in 0..d {
                let mut acc = 0.0;
                for l in 0..d {
                    acc += av(l, i) * da(l, k, j)
                        - av(l, j) * da(l, k, i)
                        - av(k, l) * (da(i, l, j) - da(j, l, i));
                }
                sup = sup.max(acc.abs());
            }
        }
    }
    Ok(sup)
}

/// Symmetrized product (a ∨ b)_{ij} = ½(a_i b_j + a_j b_i).
pub fn sym_product(a: &DVector<f64>, b: &DVector<f64>) -> DMatrix<f64> {
    let d = a.len();
    DMatrix::from_fn(d, d, |i, j| 0.5 * (a[i] * b[j] + a[j] * b[i]))
}

/// Largest absolute entry of a matrix (sup norm used by the residual checks).
pub fn sup_norm(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Largest absolute entry of a component slice.
pub fn sup_slice(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}
