//! Complex hyperbolic space ℂH^k on the unit ball, in realified coordinates.

use std::sync::Arc;

use jetcalc::{Chart, FieldExpr, Ring, TensorFieldSpec, Valence};

use crate::error::{QkError, Result};

/// g = (1−|X|²)⁻¹ ( Σ|dX_j|² + (1−|X|²)⁻¹ |Σ X̄_j dX_j|² ) with X_j = x_j + i y_j.
pub struct ComplexHyperbolicMetric {
    pub k: usize,
}

/// Evaluate the ℂH^k metric components for ball coordinates `x` (length 2k).
/// Shared with the Ferrara–Sabharwal base block.
pub fn ch_metric_components<S: Ring>(k: usize, x: &[S]) -> Vec<S> {
    let d = 2 * k;
    let mut r2 = S::from_f64(0.0);
    for xi in x.iter().take(d) {
        r2 = r2 + xi.clone() * xi.clone();
    }
    let s = (S::from_f64(1.0) - r2).recip();

    // Re(Σ X̄_j dX_j) = Σ (x_j dx_j + y_j dy_j); Im = Σ (x_j dy_j − y_j dx_j)
    let re_w: Vec<S> = x.iter().take(d).cloned().collect();
    let mut im_w = Vec::with_capacity(d);
    for j in 0..k {
        im_w.push(-x[2 * j + 1].clone());
        im_w.push(x[2 * j].clone());
    }

    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut v = s.clone()
                * s.clone()
                * (re_w[a].clone() * re_w[b].clone() + im_w[a].clone() * im_w[b].clone());
            if a == b {
                v = v + s.clone();
            }
            out.push(v);
        }
    }
    out
}

impl FieldExpr for ComplexHyperbolicMetric {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
        ch_metric_components(self.k, x)
    }
}

/// Ball chart of ℂH^k with |X| < 1.
pub fn ball_chart(k: usize) -> Arc<Chart> {
    Chart::with_domain(format!("ball{}", k), 2 * k, |x| {
        x.iter().map(|v| v * v).sum::<f64>() < 1.0
    })
}

/// The complex hyperbolic metric as a field on the ball chart.
pub fn complex_hyperbolic(k: usize) -> Result<TensorFieldSpec> {
    if k < 1 {
        return Err(QkError::InvalidParameter(
            "complex hyperbolic space needs k ≥ 1".into(),
        ));
    }
    Ok(TensorFieldSpec::new(
        ball_chart(k),
        Valence::Sym2,
        ComplexHyperbolicMetric { k },
    ))
}

struct BallPotential;

impl FieldExpr for BallPotential {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
        let mut r2 = S::from_f64(0.0);
        for xi in x {
            r2 = r2 + xi.clone() * xi.clone();
        }
        vec![-(S::from_f64(1.0) - r2).ln()]
    }
}

/// Kähler potential 𝒦 = −log(1 − |X|²) of the ball metric: its complex
/// Hessian ∂_a ∂_b̄ 𝒦 reproduces the Hermitian form of [`complex_hyperbolic`].
pub fn kahler_potential(k: usize) -> Result<TensorFieldSpec> {
    if k < 1 {
        return Err(QkError::InvalidParameter(
            "complex hyperbolic space needs k ≥ 1".into(),
        ));
    }
    Ok(TensorFieldSpec::new(
        ball_chart(k),
        Valence::Scalar,
        BallPotential,
    ))
}
