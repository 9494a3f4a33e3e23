//! One-loop deformed Ferrara–Sabharwal metrics for the quadratic-prepotential
//! family: the universal hypermultiplet (dim 4) and its higher-dimensional
//! relatives over ℂH^k (dim 4k + 4).

use std::sync::Arc;

use jetcalc::{Chart, FieldExpr, Point, Ring, TensorFieldSpec, Valence};

use crate::error::{QkError, Result};
use crate::geometries::hyperbolic::ch_metric_components;

/// Which member of the quadratic-prepotential family a metric belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Universal hypermultiplet, coordinates (ρ, φ̃, ζ, ζ̃).
    Uhm,
    /// Base ℂH^k, coordinates (x_1, y_1, .., x_k, y_k, ρ, φ̃, ζ̃_0, ζ^0, .., ζ̃_k, ζ^k).
    Higher,
}

/// A positive-definite quaternionic Kähler metric case with its chart layout.
#[derive(Clone)]
pub struct QkMetricCase {
    pub family: Family,
    pub k: usize,
    pub c: f64,
    pub chart: Arc<Chart>,
    pub metric: TensorFieldSpec,
}

impl std::fmt::Debug for QkMetricCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QkMetricCase")
            .field("family", &self.family)
            .field("k", &self.k)
            .field("c", &self.c)
            .finish()
    }
}

impl QkMetricCase {
    pub fn dim(&self) -> usize {
        match self.family {
            Family::Uhm => 4,
            Family::Higher => 4 * self.k + 4,
        }
    }

    /// Quaternionic dimension n entering the closed-form curvature constants.
    pub fn quaternionic_dim(&self) -> usize {
        match self.family {
            Family::Uhm => 1,
            Family::Higher => self.k + 1,
        }
    }

    /// Index of the ρ coordinate in this chart.
    pub fn rho_index(&self) -> usize {
        match self.family {
            Family::Uhm => 0,
            Family::Higher => 2 * self.k,
        }
    }

    /// Base point with the given ρ and every other coordinate zero.
    pub fn point_at_rho(&self, rho: f64) -> Result<Point> {
        let mut coords = vec![0.0; self.dim()];
        coords[self.rho_index()] = rho;
        Ok(self.chart.point(coords)?)
    }
}

/// g = 1/(2ρ²) [ (ρ+2c)/(ρ+c) dρ² + (ρ+c)/(ρ+2c) (dφ̃ + ζdζ̃ − ζ̃dζ)²
///              + 2(ρ+2c) (dζ̃² + dζ²) ]
struct UhmMetric {
    c: f64,
}

impl FieldExpr for UhmMetric {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
        let c = S::from_f64(self.c);
        let two_c = S::from_f64(2.0 * self.c);
        let rho = x[0].clone();
        let zeta = x[2].clone();
        let zeta_t = x[3].clone();

        let rho_c = rho.clone() + c;
        let rho_2c = rho.clone() + two_c;
        let pref = (S::from_f64(2.0) * rho.clone() * rho.clone()).recip();

        // β = dφ̃ + ζ dζ̃ − ζ̃ dζ
        let beta = [
            S::from_f64(0.0),
            S::from_f64(1.0),
            -zeta_t.clone(),
            zeta.clone(),
        ];

        let a = rho_2c.clone() / rho_c.clone();
        let b = rho_c / rho_2c.clone();
        let f = S::from_f64(2.0) * rho_2c;

        let mut out = vec![S::from_f64(0.0); 16];
        out[0] = pref.clone() * a;
        for i in 0..4 {
            for j in 0..4 {
                let add = pref.clone() * b.clone() * beta[i].clone() * beta[j].clone();
                out[i * 4 + j] = out[i * 4 + j].clone() + add;
            }
        }
        out[2 * 4 + 2] = out[2 * 4 + 2].clone() + pref.clone() * f.clone();
        out[3 * 4 + 3] = out[3 * 4 + 3].clone() + pref * f;
        out
    }
}

/// Universal hypermultiplet metric with one-loop parameter c ≥ 0.
pub fn fs_uhm(c: f64) -> Result<QkMetricCase> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(QkError::InvalidParameter(format!(
            "one-loop parameter must satisfy c ≥ 0, got {}",
            c
        )));
    }
    let chart = Chart::with_domain("uhm", 4, |x| x[0] > 0.0);
    let metric = TensorFieldSpec::new(chart.clone(), Valence::Sym2, UhmMetric { c });
    Ok(QkMetricCase {
        family: Family::Uhm,
        k: 0,
        c,
        chart,
        metric,
    })
}

/// The higher-family metric over ℂH^k in global coordinates
/// (x_1, y_1, .., x_k, y_k, ρ, φ̃, ζ̃_0, ζ^0, .., ζ̃_k, ζ^k).
///
/// Normalized so that the reduced scalar curvature is −1: at k = 0 it
/// reproduces the universal hypermultiplet componentwise, and for every k its
/// curvature norm matches the closed form n(5n+1) + 3((n−1)r + r³)² +
/// 3((n−1)r² + r⁶). (The half-scale variant fails both checks by a uniform
/// factor: scal −64 instead of −32 and ‖R‖² 160 instead of 40 at k = 1, c = 0.)
struct FsHigherMetric {
    k: usize,
    c: f64,
}

impl FsHigherMetric {
    fn dim(&self) -> usize {
        4 * self.k + 4
    }
}

impl FieldExpr for FsHigherMetric {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
        let k = self.k;
        let d = self.dim();
        let idx_rho = 2 * k;
        let idx_phi = 2 * k + 1;
        let idx_zt = |i: usize| 2 * k + 2 + 2 * i;
        let idx_z = |i: usize| 2 * k + 3 + 2 * i;

        let c = S::from_f64(self.c);
        let two_c = S::from_f64(2.0 * self.c);
        let rho = x[idx_rho].clone();
        let rho_c = rho.clone() + c.clone();
        let rho_2c = rho.clone() + two_c;
        let rho2 = rho.clone() * rho.clone();

        let mut out = vec![S::from_f64(0.0); d * d];
        let mut add = |a: usize, b: usize, v: S| {
            out[a * d + b] = out[a * d + b].clone() + v;
        };

        // 1 − |X|² and the ℂH^k block, scaled by 2(ρ+c)/ρ
        let mut r2 = S::from_f64(0.0);
        for xi in x.iter().take(2 * k) {
            r2 = r2 + xi.clone() * xi.clone();
        }
        let s = (S::from_f64(1.0) - r2).recip();
        if k > 0 {
            let ch = ch_metric_components(k, &x[..2 * k]);
            let scale = S::from_f64(2.0) * rho_c.clone() / rho.clone();
            for a in 0..2 * k {
                for b in 0..2 * k {
                    add(a, b, scale.clone() * ch[a * 2 * k + b].clone());
                }
            }
        }

        // (1/2ρ²) (ρ+2c)/(ρ+c) dρ²
        let quarter = (S::from_f64(2.0) * rho2.clone()).recip();
        add(
            idx_rho,
            idx_rho,
            quarter.clone() * rho_2c.clone() / rho_c.clone(),
        );

        // β = dφ̃ + Σ_I (ζ^I dζ̃_I − ζ̃_I dζ^I) + (2c/(1−|X|²)) Σ_j (x_j dy_j − y_j dx_j)
        let mut beta = vec![S::from_f64(0.0); d];
        beta[idx_phi] = S::from_f64(1.0);
        for i in 0..=k {
            beta[idx_zt(i)] = x[idx_z(i)].clone();
            beta[idx_z(i)] = -x[idx_zt(i)].clone();
        }
        let conn = S::from_f64(2.0 * self.c) * s.clone();
        for j in 0..k {
            beta[2 * j] = -(conn.clone() * x[2 * j + 1].clone());
            beta[2 * j + 1] = conn.clone() * x[2 * j].clone();
        }
        let beta_coef = quarter * rho_c.clone() / rho_2c.clone();
        for a in 0..d {
            for b in 0..d {
                let v = beta_coef.clone() * beta[a].clone() * beta[b].clone();
                add(a, b, v);
            }
        }

        // (1/ρ) ( Σ_{j≥1} (dζ̃_j² + dζ^j²) − dζ̃_0² − dζ^0² )
        let half_rho = rho.clone().recip();
        add(idx_zt(0), idx_zt(0), -half_rho.clone());
        add(idx_z(0), idx_z(0), -half_rho.clone());
        for j in 1..=k {
            add(idx_zt(j), idx_zt(j), half_rho.clone());
            add(idx_z(j), idx_z(j), half_rho.clone());
        }

        // (2(ρ+c)/ρ²) (1−|X|²)⁻¹ |dζ̃_0 + i dζ^0 + Σ_j X^j (dζ̃_j − i dζ^j)|²
        let mut re_w = vec![S::from_f64(0.0); d];
        let mut im_w = vec![S::from_f64(0.0); d];
        re_w[idx_zt(0)] = S::from_f64(1.0);
        im_w[idx_z(0)] = S::from_f64(1.0);
        for j in 1..=k {
            let xr = x[2 * (j - 1)].clone();
            let xi = x[2 * (j - 1) + 1].clone();
            // X^j (dζ̃_j − i dζ^j) = (xr + i xi)(dζ̃_j − i dζ^j)
            re_w[idx_zt(j)] = xr.clone();
            re_w[idx_z(j)] = xi.clone();
            im_w[idx_zt(j)] = xi;
            im_w[idx_z(j)] = -xr;
        }
        let w_coef = S::from_f64(2.0) * rho_c * s / rho2;
        for a in 0..d {
            for b in 0..d {
                let v = w_coef.clone()
                    * (re_w[a].clone() * re_w[b].clone() + im_w[a].clone() * im_w[b].clone());
                add(a, b, v);
            }
        }

        out
    }
}

/// Higher-family one-loop deformed metric (k ≥ 1, c ≥ 0).
pub fn fs_higher(k: usize, c: f64) -> Result<QkMetricCase> {
    if k < 1 {
        return Err(QkError::InvalidParameter(
            "the higher family needs k ≥ 1; use fs_uhm for the 4-dimensional case".into(),
        ));
    }
    if !(c.is_finite() && c >= 0.0) {
        return Err(QkError::InvalidParameter(format!(
            "one-loop parameter must satisfy c ≥ 0, got {}",
            c
        )));
    }
    let d = 4 * k + 4;
    let idx_rho = 2 * k;
    let chart = Chart::with_domain(format!("fs{}", k), d, move |x| {
        x[idx_rho] > 0.0 && x[..2 * k].iter().map(|v| v * v).sum::<f64>() < 1.0
    });
    let metric = TensorFieldSpec::new(chart.clone(), Valence::Sym2, FsHigherMetric { k, c });
    Ok(QkMetricCase {
        family: Family::Higher,
        k,
        c,
        chart,
        metric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uhm_component_values() {
        // (ρ, c) = (1, 0) at the fiber origin
        let case = fs_uhm(0.0).unwrap();
        let p = case.point_at_rho(1.0).unwrap();
        let g = case.metric.eval_matrix(&p).unwrap();
        let expected = [0.5, 0.5, 1.0, 1.0];
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { expected[i] } else { 0.0 };
                assert!((g[(i, j)] - e).abs() < 1e-14);
            }
        }

        // (ρ, c) = (1, 1)
        let case = fs_uhm(1.0).unwrap();
        let p = case.point_at_rho(1.0).unwrap();
        let g = case.metric.eval_matrix(&p).unwrap();
        let expected = [0.75, 1.0 / 3.0, 3.0, 3.0];
        for i in 0..4 {
            assert!((g[(i, i)] - expected[i]).abs() < 1e-14);
        }

        // off-diagonal from the β² expansion at ζ = 1
        let case = fs_uhm(0.0).unwrap();
        let p = case.chart.point(vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let g = case.metric.eval_matrix(&p).unwrap();
        assert!((g[(1, 3)] - 0.5).abs() < 1e-14);
        assert!((g[(3, 1)] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn higher_reduces_to_uhm_at_k_zero() {
        // k = 0 member of the family formula, compared componentwise with the
        // dim-4 metric under the coordinate identification ζ = ζ⁰, ζ̃ = ζ̃_0.
        for &c in &[0.0, 0.5, 1.0] {
            let uhm = fs_uhm(c).unwrap();
            let chart0 = Chart::with_domain("fs0", 4, |x: &[f64]| x[0] > 0.0);
            let higher0 =
                TensorFieldSpec::new(chart0.clone(), Valence::Sym2, FsHigherMetric { k: 0, c });
            // uhm order (ρ, φ̃, ζ, ζ̃) → family order (ρ, φ̃, ζ̃_0, ζ^0)
            let perm = [0usize, 1, 3, 2];
            for (rho, phi, zeta, zeta_t) in [
                (1.0, 0.0, 0.0, 0.0),
                (2.3, 0.7, -1.1, 0.4),
                (0.5, -2.0, 1.5, 1.5),
            ] {
                let up = uhm.chart.point(vec![rho, phi, zeta, zeta_t]).unwrap();
                let hp = chart0.point(vec![rho, phi, zeta_t, zeta]).unwrap();
                let gu = uhm.metric.eval_matrix(&up).unwrap();
                let gh = higher0.eval_matrix(&hp).unwrap();
                for a in 0..4 {
                    for b in 0..4 {
                        let diff = (gu[(a, b)] - gh[(perm[a], perm[b])]).abs();
                        assert!(
                            diff < 1e-12,
                            "c={} entry ({},{}) differs by {}",
                            c,
                            a,
                            b,
                            diff
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn higher_k1_component_values() {
        let case = fs_higher(1, 0.0).unwrap();
        let p = case.point_at_rho(1.0).unwrap();
        let g = case.metric.eval_matrix(&p).unwrap();
        // order (x, y, ρ, φ̃, ζ̃_0, ζ^0, ζ̃_1, ζ^1) at X = 0, ζ = ζ̃ = 0, ρ = 1:
        // the −1/ρ flat term and the +2/ρ² norm-square term combine to +1 on
        // the (ζ̃_0, ζ^0) pair.
        let expected = [2.0, 2.0, 0.5, 0.5, 1.0, 1.0, 1.0, 1.0];
        for i in 0..8 {
            for j in 0..8 {
                let e = if i == j { expected[i] } else { 0.0 };
                assert!(
                    (g[(i, j)] - e).abs() < 1e-14,
                    "entry ({i},{j}) = {} vs {e}",
                    g[(i, j)]
                );
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(fs_uhm(-0.5).is_err());
        assert!(fs_higher(0, 1.0).is_err());
        assert!(fs_higher(1, -1.0).is_err());
        assert!(fs_uhm(0.0)
            .unwrap()
            .chart
            .point(vec![-1.0, 0.0, 0.0, 0.0])
            .is_err());
    }
}
