//! Truncated Taylor values (jets) used for exact differentiation.
//!
//! [`Jet1`] carries a value and a gradient, [`Jet2`] additionally carries the
//! symmetric Hessian. Arithmetic propagates the Leibniz and chain rules, so a
//! field program evaluated on seeded jets returns its exact coordinate
//! derivatives at the evaluation point — no step-size tuning, no cancellation.
//!
//! Constants are represented with an empty gradient (and 0×0 Hessian); binary
//! operations treat a missing slot as zero. This keeps `Ring::from_f64` free
//! of any notion of chart dimension.

use nalgebra::{DMatrix, DVector};

use crate::ring::Ring;

/// First-order jet over an arbitrary scalar ring.
#[derive(Clone, Debug)]
pub struct Jet1<S> {
    pub val: S,
    /// Coordinate gradient; empty means identically zero (a constant).
    pub grad: Vec<S>,
}

/// Seed jets for the coordinate functions at `x`: the i-th jet has unit
/// gradient in slot i.
pub fn jet1_vars<S: Ring>(x: &[S]) -> Vec<Jet1<S>> {
    let d = x.len();
    x.iter()
        .enumerate()
        .map(|(i, xi)| Jet1 {
            val: xi.clone(),
            grad: (0..d)
                .map(|j| S::from_f64(if i == j { 1.0 } else { 0.0 }))
                .collect(),
        })
        .collect()
}

impl<S: Ring> Jet1<S> {
    pub fn constant(val: S) -> Self {
        Jet1 {
            val,
            grad: Vec::new(),
        }
    }

    /// Gradient entry, materializing the implicit zero of constants.
    pub fn grad_at(&self, i: usize) -> S {
        self.grad
            .get(i)
            .cloned()
            .unwrap_or_else(|| S::from_f64(0.0))
    }

    fn map_grad(&self, f: impl Fn(&S) -> S) -> Vec<S> {
        self.grad.iter().map(f).collect()
    }

    fn zip_grad(&self, other: &Self, fa: impl Fn(&S) -> S, fb: impl Fn(&S) -> S) -> Vec<S> {
        match (self.grad.is_empty(), other.grad.is_empty()) {
            (true, true) => Vec::new(),
            (false, true) => self.map_grad(fa),
            (true, false) => other.map_grad(fb),
            (false, false) => {
                debug_assert_eq!(self.grad.len(), other.grad.len());
                self.grad
                    .iter()
                    .zip(&other.grad)
                    .map(|(a, b)| fa(a) + fb(b))
                    .collect()
            }
        }
    }

    pub(crate) fn chain_unary(&self, val: S, dval: S) -> Self {
        Jet1 {
            val,
            grad: self.map_grad(|g| g.clone() * dval.clone()),
        }
    }

    pub(crate) fn chain_sqrt(&self) -> Self {
        let s = self.val.sqrt();
        let d = (S::from_f64(2.0) * s.clone()).recip();
        self.chain_unary(s, d)
    }

    pub(crate) fn chain_exp(&self) -> Self {
        let e = self.val.exp();
        self.chain_unary(e.clone(), e)
    }

    pub(crate) fn chain_ln(&self) -> Self {
        self.chain_unary(self.val.ln(), self.val.recip())
    }

    pub(crate) fn chain_sin(&self) -> Self {
        self.chain_unary(self.val.sin(), self.val.cos())
    }

    pub(crate) fn chain_cos(&self) -> Self {
        self.chain_unary(self.val.cos(), -self.val.sin())
    }

    pub(crate) fn chain_recip(&self) -> Self {
        let iv = self.val.recip();
        let d = -(iv.clone() * iv.clone());
        self.chain_unary(iv, d)
    }
}

impl<S: Ring> std::ops::Add for Jet1<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Jet1 {
            grad: self.zip_grad(&rhs, |a| a.clone(), |b| b.clone()),
            val: self.val + rhs.val,
        }
    }
}

impl<S: Ring> std::ops::Sub for Jet1<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Jet1 {
            grad: self.zip_grad(&rhs, |a| a.clone(), |b| -b.clone()),
            val: self.val - rhs.val,
        }
    }
}

impl<S: Ring> std::ops::Mul for Jet1<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (av, bv) = (self.val.clone(), rhs.val.clone());
        Jet1 {
            grad: self.zip_grad(&rhs, |a| a.clone() * bv.clone(), |b| b.clone() * av.clone()),
            val: self.val * rhs.val,
        }
    }
}

impl<S: Ring> std::ops::Div for Jet1<S> {
    type Output = Self;
    // (f/g)' = (f' - (f/g) g') / g
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        let ib = rhs.val.recip();
        let q = self.val.clone() * ib.clone();
        let qc = q.clone();
        Jet1 {
            grad: self.zip_grad(
                &rhs,
                |a| a.clone() * ib.clone(),
                |b| -(qc.clone() * b.clone() * ib.clone()),
            ),
            val: q,
        }
    }
}

impl<S: Ring> std::ops::Neg for Jet1<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet1 {
            val: -self.val,
            grad: self.grad.into_iter().map(|g| -g).collect(),
        }
    }
}

/// Second-order jet over `f64`: value, gradient and symmetric Hessian.
#[derive(Clone, Debug)]
pub struct Jet2 {
    pub val: f64,
    /// Empty when constant.
    pub grad: DVector<f64>,
    /// 0×0 when constant; otherwise d×d and symmetric.
    pub hess: DMatrix<f64>,
}

/// Seed second-order jets for the coordinate functions at `x`.
pub fn jet2_vars(x: &[f64]) -> Vec<Jet2> {
    let d = x.len();
    x.iter()
        .enumerate()
        .map(|(i, &xi)| {
            let mut grad = DVector::zeros(d);
            grad[i] = 1.0;
            Jet2 {
                val: xi,
                grad,
                hess: DMatrix::zeros(d, d),
            }
        })
        .collect()
}

impl Jet2 {
    pub fn constant(val: f64) -> Self {
        Jet2 {
            val,
            grad: DVector::zeros(0),
            hess: DMatrix::zeros(0, 0),
        }
    }

    fn is_const(&self) -> bool {
        self.grad.is_empty()
    }

    /// Apply a smooth unary function with first and second derivative values.
    fn chain(&self, val: f64, d1: f64, d2: f64) -> Self {
        if self.is_const() {
            return Jet2::constant(val);
        }
        let grad = &self.grad * d1;
        let mut hess = &self.hess * d1;
        hess.ger(d2, &self.grad, &self.grad, 1.0);
        Jet2 { val, grad, hess }
    }

    pub fn sqrt(&self) -> Self {
        let s = self.val.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * s * s))
    }

    pub fn exp(&self) -> Self {
        let e = self.val.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let iv = 1.0 / self.val;
        self.chain(self.val.ln(), iv, -iv * iv)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn recip(&self) -> Self {
        let iv = 1.0 / self.val;
        self.chain(iv, -iv * iv, 2.0 * iv * iv * iv)
    }
}

impl std::ops::Add for Jet2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        match (self.is_const(), rhs.is_const()) {
            (_, true) => Jet2 {
                val: self.val + rhs.val,
                ..self
            },
            (true, false) => Jet2 {
                val: self.val + rhs.val,
                ..rhs
            },
            (false, false) => Jet2 {
                val: self.val + rhs.val,
                grad: self.grad + rhs.grad,
                hess: self.hess + rhs.hess,
            },
        }
    }
}

impl std::ops::Sub for Jet2 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl std::ops::Neg for Jet2 {
    type Output = Self;
    fn neg(self) -> Self {
        Jet2 {
            val: -self.val,
            grad: -self.grad,
            hess: -self.hess,
        }
    }
}

impl std::ops::Mul for Jet2 {
    type Output = Self;
    // (fg)'' = f''g + f'⊗g' + g'⊗f' + fg''
    fn mul(self, rhs: Self) -> Self {
        match (self.is_const(), rhs.is_const()) {
            (_, true) => Jet2 {
                val: self.val * rhs.val,
                grad: self.grad * rhs.val,
                hess: self.hess * rhs.val,
            },
            (true, false) => Jet2 {
                val: self.val * rhs.val,
                grad: rhs.grad * self.val,
                hess: rhs.hess * self.val,
            },
            (false, false) => {
                let grad = &self.grad * rhs.val + &rhs.grad * self.val;
                let mut hess = &self.hess * rhs.val + &rhs.hess * self.val;
                hess.ger(1.0, &self.grad, &rhs.grad, 1.0);
                hess.ger(1.0, &rhs.grad, &self.grad, 1.0);
                Jet2 {
                    val: self.val * rhs.val,
                    grad,
                    hess,
                }
            }
        }
    }
}

impl std::ops::Div for Jet2 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        if rhs.is_const() {
            let iv = 1.0 / rhs.val;
            return Jet2 {
                val: self.val * iv,
                grad: self.grad * iv,
                hess: self.hess * iv,
            };
        }
        self * rhs.recip()
    }
}
