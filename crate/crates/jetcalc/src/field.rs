//! Charts, points, and evaluable tensor fields.
//!
//! A [`TensorFieldSpec`] bundles a chart, a valence, and an evaluation
//! program. The program is written once over a generic [`Ring`] (trait
//! [`FieldExpr`]); the object-safe [`FieldEval`] facade exposes it
//! monomorphized at the four rings the engine instantiates.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{CalcError, Result};
use crate::jet::{jet2_vars, Jet1, Jet2};
use crate::ring::Ring;

type DomainFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A named coordinate chart with a dimension and a membership predicate.
pub struct Chart {
    name: String,
    dim: usize,
    domain: DomainFn,
}

impl std::fmt::Debug for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Chart")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .finish()
    }
}

impl Chart {
    pub fn new(name: impl Into<String>, dim: usize) -> Arc<Self> {
        Arc::new(Chart {
            name: name.into(),
            dim,
            domain: Arc::new(|_| true),
        })
    }

    pub fn with_domain(
        name: impl Into<String>,
        dim: usize,
        domain: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Arc<Self> {
        Arc::new(Chart {
            name: name.into(),
            dim,
            domain: Arc::new(domain),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, coords: &[f64]) -> bool {
        coords.len() == self.dim && (self.domain)(coords)
    }

    /// Build a point of this chart, validating length and domain membership.
    pub fn point(self: &Arc<Self>, coords: impl Into<Vec<f64>>) -> Result<Point> {
        let coords = coords.into();
        if coords.len() != self.dim {
            return Err(CalcError::DimensionMismatch(format!(
                "chart `{}` has dimension {}, got {} coordinates",
                self.name,
                self.dim,
                coords.len()
            )));
        }
        if !(self.domain)(&coords) {
            return Err(CalcError::DomainError {
                chart: self.name.clone(),
                coords,
            });
        }
        Ok(Point {
            chart: Arc::clone(self),
            coords,
        })
    }
}

/// A point of a chart. Construction via [`Chart::point`] guarantees the
/// coordinate count matches the chart dimension.
#[derive(Clone, Debug)]
pub struct Point {
    chart: Arc<Chart>,
    coords: Vec<f64>,
}

impl Point {
    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Tensor character of a field's components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valence {
    Scalar,
    Vector,
    Covector,
    /// Symmetric bilinear form (metrics, Lie derivatives of metrics, ...).
    Sym2,
    /// Antisymmetric p-form, stored with all d^p index tuples.
    Form(usize),
    /// Endomorphism field A^i_j.
    Endo,
}

impl Valence {
    pub fn component_count(&self, dim: usize) -> usize {
        match self {
            Valence::Scalar => 1,
            Valence::Vector | Valence::Covector => dim,
            Valence::Sym2 | Valence::Endo => dim * dim,
            Valence::Form(p) => dim.pow(*p as u32),
        }
    }

    /// Covariant rank as used by Lie-derivative and contraction formulas.
    pub fn covariant_rank(&self) -> Option<usize> {
        match self {
            Valence::Scalar => Some(0),
            Valence::Covector => Some(1),
            Valence::Sym2 => Some(2),
            Valence::Form(p) => Some(*p),
            _ => None,
        }
    }
}

/// A tensor field program, generic over the scalar ring.
///
/// Implementors write the evaluation once; the blanket impl of [`FieldEval`]
/// exposes it at `f64`, `Jet1<f64>`, `Jet1<Jet1<f64>>` and `Jet2`.
pub trait FieldExpr: Send + Sync + 'static {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S>;
}

/// Object-safe evaluation facade over the four instantiated rings.
pub trait FieldEval: Send + Sync {
    fn eval_f64(&self, x: &[f64]) -> Vec<f64>;
    fn eval_j1(&self, x: &[Jet1<f64>]) -> Vec<Jet1<f64>>;
    fn eval_j11(&self, x: &[Jet1<Jet1<f64>>]) -> Vec<Jet1<Jet1<f64>>>;
    fn eval_j2(&self, x: &[Jet2]) -> Vec<Jet2>;
}

impl<T: FieldExpr> FieldEval for T {
    fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.eval(x)
    }
    fn eval_j1(&self, x: &[Jet1<f64>]) -> Vec<Jet1<f64>> {
        self.eval(x)
    }
    fn eval_j11(&self, x: &[Jet1<Jet1<f64>>]) -> Vec<Jet1<Jet1<f64>>> {
        self.eval(x)
    }
    fn eval_j2(&self, x: &[Jet2]) -> Vec<Jet2> {
        self.eval(x)
    }
}

/// First jets of all components of a field at a point.
#[derive(Clone, Debug)]
pub struct FirstJets {
    /// Component values.
    pub values: Vec<f64>,
    /// `grads[c][i]` = ∂_i (component c).
    pub grads: Vec<Vec<f64>>,
}

/// An evaluable tensor field on a chart.
#[derive(Clone)]
pub struct TensorFieldSpec {
    chart: Arc<Chart>,
    valence: Valence,
    prog: Arc<dyn FieldEval>,
}

impl std::fmt::Debug for TensorFieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TensorFieldSpec")
            .field("chart", &self.chart.name())
            .field("valence", &self.valence)
            .finish()
    }
}

impl TensorFieldSpec {
    pub fn new(chart: Arc<Chart>, valence: Valence, prog: impl FieldExpr) -> Self {
        TensorFieldSpec {
            chart,
            valence,
            prog: Arc::new(prog),
        }
    }

    pub fn from_shared(chart: Arc<Chart>, valence: Valence, prog: Arc<dyn FieldEval>) -> Self {
        TensorFieldSpec {
            chart,
            valence,
            prog,
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn valence(&self) -> Valence {
        self.valence
    }

    pub fn program(&self) -> &Arc<dyn FieldEval> {
        &self.prog
    }

    pub(crate) fn check_point(&self, p: &Point) -> Result<()> {
        if p.chart().name() != self.chart.name() {
            return Err(CalcError::ChartMismatch {
                expected: self.chart.name().to_string(),
                found: p.chart().name().to_string(),
            });
        }
        if !self.chart.contains(p.coords()) {
            return Err(CalcError::DomainError {
                chart: self.chart.name().to_string(),
                coords: p.coords().to_vec(),
            });
        }
        Ok(())
    }

    /// Component values at a point.
    pub fn eval(&self, p: &Point) -> Result<Vec<f64>> {
        self.check_point(p)?;
        Ok(self.prog.eval_f64(p.coords()))
    }

    /// Components together with their first coordinate derivatives.
    pub fn jets(&self, p: &Point) -> Result<FirstJets> {
        self.check_point(p)?;
        let jets = <f64 as Ring>::eval_field_jets(self.prog.as_ref(), p.coords())
            .expect("f64 always supports first jets");
        let d = self.dim();
        Ok(FirstJets {
            values: jets.iter().map(|j| j.val).collect(),
            grads: jets
                .iter()
                .map(|j| (0..d).map(|i| j.grad_at(i)).collect())
                .collect(),
        })
    }

    /// Components with first and second coordinate derivatives.
    pub fn jets2(&self, p: &Point) -> Result<Vec<Jet2>> {
        self.check_point(p)?;
        Ok(self.prog.eval_j2(&jet2_vars(p.coords())))
    }

    /// Components as a square matrix (Sym2, Endo or Form(2) valence).
    pub fn eval_matrix(&self, p: &Point) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let comps = self.eval(p)?;
        if comps.len() != d * d {
            return Err(CalcError::ValenceMismatch {
                expected: "rank-2".into(),
                found: format!("{:?}", self.valence),
            });
        }
        Ok(DMatrix::from_row_slice(d, d, &comps))
    }

    /// Components as a vector (Vector or Covector valence).
    pub fn eval_vector(&self, p: &Point) -> Result<DVector<f64>> {
        let d = self.dim();
        let comps = self.eval(p)?;
        if comps.len() != d {
            return Err(CalcError::ValenceMismatch {
                expected: "rank-1".into(),
                found: format!("{:?}", self.valence),
            });
        }
        Ok(DVector::from_vec(comps))
    }

    /// Scalar value (Scalar valence).
    pub fn eval_scalar(&self, p: &Point) -> Result<f64> {
        let comps = self.eval(p)?;
        if comps.len() != 1 {
            return Err(CalcError::ValenceMismatch {
                expected: "scalar".into(),
                found: format!("{:?}", self.valence),
            });
        }
        Ok(comps[0])
    }
}

/// A differentiable map between charts (used for pullbacks and isometry
/// checks). The program outputs target coordinates from source coordinates.
#[derive(Clone)]
pub struct ChartMap {
    src: Arc<Chart>,
    dst: Arc<Chart>,
    prog: Arc<dyn FieldEval>,
}

impl ChartMap {
    pub fn new(src: Arc<Chart>, dst: Arc<Chart>, prog: impl FieldExpr) -> Self {
        ChartMap {
            src,
            dst,
            prog: Arc::new(prog),
        }
    }

    pub fn src(&self) -> &Arc<Chart> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<Chart> {
        &self.dst
    }

    /// Image of a point; errors if it leaves the target chart domain.
    pub fn apply(&self, p: &Point) -> Result<Point> {
        if p.chart().name() != self.src.name() {
            return Err(CalcError::ChartMismatch {
                expected: self.src.name().to_string(),
                found: p.chart().name().to_string(),
            });
        }
        let out = self.prog.eval_f64(p.coords());
        self.dst.point(out)
    }

    /// Jacobian ∂(target)/∂(source) at `p`, rows indexed by target components.
    pub fn jacobian(&self, p: &Point) -> Result<(Point, DMatrix<f64>)> {
        let image = self.apply(p)?;
        let jets = <f64 as Ring>::eval_field_jets(self.prog.as_ref(), p.coords())
            .expect("f64 always supports first jets");
        let (rows, cols) = (self.dst.dim(), self.src.dim());
        let jac = DMatrix::from_fn(rows, cols, |r, c| jets[r].grad_at(c));
        Ok((image, jac))
    }
}

/// Identity map of a chart.
pub struct IdentityMap;

impl FieldExpr for IdentityMap {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
        x.to_vec()
    }
}

// ---------------------------------------------------------------------------
// Generic building blocks
// ---------------------------------------------------------------------------

/// Field with constant components.
pub struct ConstField(pub Vec<f64>);

impl FieldExpr for ConstField {
    fn eval<S: Ring>(&self, _x: &[S]) -> Vec<S> {
        self.0.iter().map(|&c| S::from_f64(c)).collect()
    }
}

/// Vector field x ↦ A·x + b.
pub struct AffineVectorField {
    pub matrix: DMatrix<f64>,
    pub offset: DVector<f64>,
}

impl AffineVectorField {
    pub fn linear(matrix: DMatrix<f64>) -> Self {
        let n = matrix.nrows();
        AffineVectorField {
            matrix,
            offset: DVector::zeros(n),
        }
    }
}

impl FieldExpr for AffineVectorField {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
        let n = self.matrix.nrows();
        (0..n)
            .map(|i| {
                let mut acc = S::from_f64(self.offset[i]);
                for (j, xj) in x.iter().enumerate() {
                    let a = self.matrix[(i, j)];
                    if a != 0.0 {
                        acc = acc + S::from_f64(a) * xj.clone();
                    }
                }
                acc
            })
            .collect()
    }
}

/// Scalar field x ↦ xᵀQx + c₀ (Q need not be symmetric; only Sym(Q) matters).
pub struct QuadraticScalarField {
    pub quad: DMatrix<f64>,
    pub constant: f64,
}

impl FieldExpr for QuadraticScalarField {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
        let mut acc = S::from_f64(self.constant);
        for i in 0..self.quad.nrows() {
            for j in 0..self.quad.ncols() {
                let q = self.quad[(i, j)];
                if q != 0.0 {
                    acc = acc + S::from_f64(q) * x[i].clone() * x[j].clone();
                }
            }
        }
        vec![acc]
    }
}

/// Pointwise linear combination a·F + b·G of two fields with equal shape.
pub struct LinComb {
    pub a: f64,
    pub f: TensorFieldSpec,
    pub b: f64,
    pub g: TensorFieldSpec,
}

impl FieldExpr for LinComb {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
        let fv = S::eval_field(self.f.program().as_ref(), x);
        let gv = S::eval_field(self.g.program().as_ref(), x);
        fv.into_iter()
            .zip(gv)
            .map(|(u, v)| S::from_f64(self.a) * u + S::from_f64(self.b) * v)
            .collect()
    }
}

/// Contraction ι_X T on the first index of a covariant tensor.
pub struct ContractFirst {
    pub tensor: TensorFieldSpec,
    pub vector: TensorFieldSpec,
}

impl FieldExpr for ContractFirst {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
        let d = x.len();
        let t = S::eval_field(self.tensor.program().as_ref(), x);
        let v = S::eval_field(self.vector.program().as_ref(), x);
        let rank = self
            .tensor
            .valence()
            .covariant_rank()
            .expect("contraction needs a covariant tensor");
        assert!(rank >= 1, "cannot contract a scalar");
        let block = d.pow((rank - 1) as u32);
        (0..block)
            .map(|rest| {
                let mut acc = S::from_f64(0.0);
                for i in 0..d {
                    acc = acc + v[i].clone() * t[i * block + rest].clone();
                }
                acc
            })
            .collect()
    }
}

/// Exterior derivative of a p-form field, as a field of (p+1)-form components.
pub struct ExteriorDerivative {
    pub form: TensorFieldSpec,
}

impl FieldExpr for ExteriorDerivative {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
        let d = x.len();
        let p = self
            .form
            .valence()
            .covariant_rank()
            .expect("exterior derivative needs a form");
        let jets = S::eval_field_jets(self.form.program().as_ref(), x)
            .expect("differentiation depth exceeded: d of a field nested too deep");
        // (dω)_{i0..ip} = Σ_a (-1)^a ∂_{i_a} ω_{i0..î_a..ip}
        let out_len = d.pow((p + 1) as u32);
        let mut out = Vec::with_capacity(out_len);
        let mut idx = vec![0usize; p + 1];
        for flat in 0..out_len {
            let mut rem = flat;
            for a in (0..=p).rev() {
                idx[a] = rem % d;
                rem /= d;
            }
            let mut acc = S::from_f64(0.0);
            for a in 0..=p {
                let mut sub = 0usize;
                for (b, &ib) in idx.iter().enumerate() {
                    if b != a {
                        sub = sub * d + ib;
                    }
                }
                let term = jets[sub].grad_at(idx[a]);
                acc = if a % 2 == 0 { acc + term } else { acc - term };
            }
            out.push(acc);
        }
        out
    }
}

/// Lie derivative L_X T as a field, for covariant T (scalar, covector, Sym2,
/// Form) and for vectors (where it is the Lie bracket) and endomorphisms.
pub struct LieDerivativeField {
    pub tensor: TensorFieldSpec,
    pub flow: TensorFieldSpec,
}

impl FieldExpr for LieDerivativeField {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
        let d = x.len();
        let t = S::eval_field_jets(self.tensor.program().as_ref(), x)
            .expect("differentiation depth exceeded in Lie derivative");
        let v = S::eval_field_jets(self.flow.program().as_ref(), x)
            .expect("differentiation depth exceeded in Lie derivative");

        let transport = |comp: &Jet1<S>| -> S {
            // X^k ∂_k T_...
            let mut acc = S::from_f64(0.0);
            for k in 0..d {
                acc = acc + v[k].val.clone() * comp.grad_at(k);
            }
            acc
        };

        match self.tensor.valence() {
            Valence::Scalar => vec![transport(&t[0])],
            Valence::Vector => (0..d)
                .map(|i| {
                    let mut acc = transport(&t[i]);
                    for k in 0..d {
                        acc = acc - t[k].val.clone() * v[i].grad_at(k);
                    }
                    acc
                })
                .collect(),
            Valence::Covector => (0..d)
                .map(|i| {
                    let mut acc = transport(&t[i]);
                    for k in 0..d {
                        acc = acc + t[k].val.clone() * v[k].grad_at(i);
                    }
                    acc
                })
                .collect(),
            Valence::Sym2 | Valence::Form(2) => (0..d * d)
                .map(|flat| {
                    let (i, j) = (flat / d, flat % d);
                    let mut acc = transport(&t[flat]);
                    for k in 0..d {
                        acc = acc
                            + t[k * d + j].val.clone() * v[k].grad_at(i)
                            + t[i * d + k].val.clone() * v[k].grad_at(j);
                    }
                    acc
                })
                .collect(),
            Valence::Form(p) => {
                let len = d.pow(p as u32);
                let mut idx = vec![0usize; p];
                (0..len)
                    .map(|flat| {
                        let mut rem = flat;
                        for a in (0..p).rev() {
                            idx[a] = rem % d;
                            rem /= d;
                        }
                        let mut acc = transport(&t[flat]);
                        for a in 0..p {
                            for k in 0..d {
                                let mut sub = 0usize;
                                for (b, &ib) in idx.iter().enumerate() {
                                    sub = sub * d + if b == a { k } else { ib };
                                }
                                acc = acc + t[sub].val.clone() * v[k].grad_at(idx[a]);
                            }
                        }
                        acc
                    })
                    .collect()
            }
            Valence::Endo => (0..d * d)
                .map(|flat| {
                    let (i, j) = (flat / d, flat % d);
                    let mut acc = transport(&t[flat]);
                    for k in 0..d {
                        acc = acc - t[k * d + j].val.clone() * v[i].grad_at(k)
                            + t[i * d + k].val.clone() * v[k].grad_at(j);
                    }
                    acc
                })
                .collect(),
        }
    }
}

/// Lie derivative as a field spec with the matching valence.
pub fn lie_field(tensor: &TensorFieldSpec, flow: &TensorFieldSpec) -> TensorFieldSpec {
    TensorFieldSpec::new(
        tensor.chart().clone(),
        tensor.valence(),
        LieDerivativeField {
            tensor: tensor.clone(),
            flow: flow.clone(),
        },
    )
}

/// Exterior derivative as a field spec (Scalar → Covector, p-form → (p+1)-form).
pub fn d_field(form: &TensorFieldSpec) -> TensorFieldSpec {
    let p = form
        .valence()
        .covariant_rank()
        .expect("exterior derivative needs a covariant antisymmetric field");
    let out = if p == 0 {
        Valence::Covector
    } else {
        Valence::Form(p + 1)
    };
    TensorFieldSpec::new(
        form.chart().clone(),
        out,
        ExteriorDerivative { form: form.clone() },
    )
}

/// ι_X T as a field spec (rank drops by one).
pub fn contract_field(tensor: &TensorFieldSpec, vector: &TensorFieldSpec) -> TensorFieldSpec {
    let p = tensor
        .valence()
        .covariant_rank()
        .expect("contraction needs a covariant tensor");
    let out = match p {
        1 => Valence::Scalar,
        2 => Valence::Covector,
        q => Valence::Form(q - 1),
    };
    TensorFieldSpec::new(
        tensor.chart().clone(),
        out,
        ContractFirst {
            tensor: tensor.clone(),
            vector: vector.clone(),
        },
    )
}

/// a·F + b·G as a field spec.
pub fn lincomb_field(a: f64, f: &TensorFieldSpec, b: f64, g: &TensorFieldSpec) -> TensorFieldSpec {
    assert_eq!(f.valence(), g.valence(), "lincomb needs equal valences");
    TensorFieldSpec::new(
        f.chart().clone(),
        f.valence(),
        LinComb {
            a,
            f: f.clone(),
            b,
            g: g.clone(),
        },
    )
}
