//! The scalar ring abstraction.
//!
//! Every tensor field in this crate is a program written once, generically,
//! over a [`Ring`]. Evaluating the same program over plain `f64` gives
//! values; evaluating it over [`Jet1`]/[`Jet2`] gives exact first and second
//! derivatives by forward-mode propagation. Nesting `Jet1<Jet1<f64>>` is used
//! for fields whose own definition contains a derivative (e.g. an exterior
//! derivative appearing inside another differentiated expression).

use crate::field::FieldEval;
use crate::jet::{jet1_vars, Jet1, Jet2};

/// Scalar ring over which field programs are evaluated.
///
/// Implemented by `f64`, [`Jet1<f64>`], [`Jet1<Jet1<f64>>`] and [`Jet2`].
/// The two `eval_field*` hooks perform the double dispatch that lets a
/// composite field evaluate a sub-field (or its first jets) at the ring it is
/// itself being evaluated over.
pub trait Ring:
    Clone
    + Send
    + Sync
    + std::fmt::Debug
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
    + 'static
{
    fn from_f64(c: f64) -> Self;

    /// The underlying value, all derivative information stripped.
    fn value(&self) -> f64;

    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn recip(&self) -> Self;

    fn powi(&self, n: i32) -> Self {
        match n {
            0 => Self::from_f64(1.0),
            _ if n < 0 => self.recip().powi(-n),
            _ => {
                let mut acc = self.clone();
                for _ in 1..n {
                    acc = acc * self.clone();
                }
                acc
            }
        }
    }

    /// Evaluate a field program pointwise over this ring.
    fn eval_field(prog: &dyn FieldEval, x: &[Self]) -> Vec<Self>;

    /// Evaluate a field program together with its first derivatives over this
    /// ring. Returns `None` when the nesting depth is exhausted.
    fn eval_field_jets(prog: &dyn FieldEval, x: &[Self]) -> Option<Vec<Jet1<Self>>>;
}

impl Ring for f64 {
    fn from_f64(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn recip(&self) -> Self {
        1.0 / *self
    }

    fn eval_field(prog: &dyn FieldEval, x: &[Self]) -> Vec<Self> {
        prog.eval_f64(x)
    }

    fn eval_field_jets(prog: &dyn FieldEval, x: &[Self]) -> Option<Vec<Jet1<Self>>> {
        Some(prog.eval_j1(&jet1_vars(x)))
    }
}

impl Ring for Jet1<f64> {
    fn from_f64(c: f64) -> Self {
        Jet1::constant(c)
    }
    fn value(&self) -> f64 {
        self.val
    }
    fn sqrt(&self) -> Self {
        self.chain_sqrt()
    }
    fn exp(&self) -> Self {
        self.chain_exp()
    }
    fn ln(&self) -> Self {
        self.chain_ln()
    }
    fn sin(&self) -> Self {
        self.chain_sin()
    }
    fn cos(&self) -> Self {
        self.chain_cos()
    }
    fn recip(&self) -> Self {
        self.chain_recip()
    }

    fn eval_field(prog: &dyn FieldEval, x: &[Self]) -> Vec<Self> {
        prog.eval_j1(x)
    }

    fn eval_field_jets(prog: &dyn FieldEval, x: &[Self]) -> Option<Vec<Jet1<Self>>> {
        Some(prog.eval_j11(&jet1_vars(x)))
    }
}

impl Ring for Jet1<Jet1<f64>> {
    fn from_f64(c: f64) -> Self {
        Jet1::constant(Jet1::constant(c))
    }
    fn value(&self) -> f64 {
        self.val.val
    }
    fn sqrt(&self) -> Self {
        self.chain_sqrt()
    }
    fn exp(&self) -> Self {
        self.chain_exp()
    }
    fn ln(&self) -> Self {
        self.chain_ln()
    }
    fn sin(&self) -> Self {
        self.chain_sin()
    }
    fn cos(&self) -> Self {
        self.chain_cos()
    }
    fn recip(&self) -> Self {
        self.chain_recip()
    }

    fn eval_field(prog: &dyn FieldEval, x: &[Self]) -> Vec<Self> {
        prog.eval_j11(x)
    }

    fn eval_field_jets(_prog: &dyn FieldEval, _x: &[Self]) -> Option<Vec<Jet1<Self>>> {
        None
    }
}

impl Ring for Jet2 {
    fn from_f64(c: f64) -> Self {
        Jet2::constant(c)
    }
    fn value(&self) -> f64 {
        self.val
    }
    fn sqrt(&self) -> Self {
        Jet2::sqrt(self)
    }
    fn exp(&self) -> Self {
        Jet2::exp(self)
    }
    fn ln(&self) -> Self {
        Jet2::ln(self)
    }
    fn sin(&self) -> Self {
        Jet2::sin(self)
    }
    fn cos(&self) -> Self {
        Jet2::cos(self)
    }
    fn recip(&self) -> Self {
        Jet2::recip(self)
    }

    fn eval_field(prog: &dyn FieldEval, x: &[Self]) -> Vec<Self> {
        prog.eval_j2(x)
    }

    fn eval_field_jets(_prog: &dyn FieldEval, _x: &[Self]) -> Option<Vec<Jet1<Self>>> {
        None
    }
}
