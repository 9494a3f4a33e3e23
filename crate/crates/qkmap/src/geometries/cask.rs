//! Conical affine special Kähler domains M_k ⊂ ℂ^{k+1}.
//!
//! Complex coordinates (z_0, ..., z_k) are realified once and for all as
//! interleaved pairs (x_0, y_0, x_1, y_1, ...). The flat pseudo-Kähler
//! structure has signature (2k, 2), the two negative directions spanned by
//! the cone directions {ξ, Jξ} over the domain |z_0|² > Σ_{j≥1} |z_j|².

use std::sync::Arc;

use jetcalc::{AffineVectorField, Chart, ConstField, TensorFieldSpec, Valence};
use nalgebra::DMatrix;

use crate::error::{QkError, Result};

/// Flat CASK data on the domain M_k: metric, Kähler form, complex structure
/// and Euler field, all in one real chart.
#[derive(Clone)]
pub struct CaskStructure {
    pub k: usize,
    pub chart: Arc<Chart>,
    pub g_m: TensorFieldSpec,
    pub omega_m: TensorFieldSpec,
    pub j: TensorFieldSpec,
    pub xi: TensorFieldSpec,
    /// Component matrix of g_M (constant in the flat chart).
    pub g_mat: DMatrix<f64>,
    /// Component matrix Ω_{ij} = ω_M(∂_i, ∂_j).
    pub omega_mat: DMatrix<f64>,
    /// Matrix of J, (JX)^i = J^i_j X^j.
    pub j_mat: DMatrix<f64>,
}

impl std::fmt::Debug for CaskStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CaskStructure").field("k", &self.k).finish()
    }
}

impl CaskStructure {
    pub fn dim(&self) -> usize {
        2 * self.k + 2
    }
}

/// Membership test for |z_0|² > Σ_{j≥1} |z_j|² in realified coordinates.
pub fn cask_domain_contains(coords: &[f64]) -> bool {
    let head = coords[0] * coords[0] + coords[1] * coords[1];
    let tail: f64 = coords[2..].iter().map(|v| v * v).sum();
    head > tail
}

/// Build the CASK domain M_k with its flat structure.
pub fn cask_domain(k: usize) -> CaskStructure {
    let d = 2 * k + 2;
    let chart = Chart::with_domain(format!("cask_m{}", k), d, cask_domain_contains);

    // g = Σ_{j≥1} |dz_j|² − |dz_0|², realified
    let mut g_mat = DMatrix::identity(d, d);
    g_mat[(0, 0)] = -1.0;
    g_mat[(1, 1)] = -1.0;

    // standard complex structure: J ∂x = ∂y, J ∂y = −∂x on each pair
    let mut j_mat = DMatrix::zeros(d, d);
    for pair in 0..=k {
        let (a, b) = (2 * pair, 2 * pair + 1);
        j_mat[(b, a)] = 1.0;
        j_mat[(a, b)] = -1.0;
    }

    // ω(∂_i, ∂_j) = g(J∂_i, ∂_j)
    let omega_mat = j_mat.transpose() * &g_mat;

    let g_m = TensorFieldSpec::new(chart.clone(), Valence::Sym2, ConstField(row_major(&g_mat)));
    let omega_m = TensorFieldSpec::new(
        chart.clone(),
        Valence::Form(2),
        ConstField(row_major(&omega_mat)),
    );
    let j = TensorFieldSpec::new(chart.clone(), Valence::Endo, ConstField(row_major(&j_mat)));
    let xi = TensorFieldSpec::new(
        chart.clone(),
        Valence::Vector,
        AffineVectorField::linear(DMatrix::identity(d, d)),
    );

    CaskStructure {
        k,
        chart,
        g_m,
        omega_m,
        j,
        xi,
        g_mat,
        omega_mat,
        j_mat,
    }
}

/// Row-major component list of a matrix (the layout ConstField expects for
/// rank-2 fields: comps[i*d + j] = M_{ij}).
pub fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Scale a point of M_k onto the level set g(ξ, ξ) = −1.
pub fn to_unit_level_set(coords: &[f64]) -> Result<Vec<f64>> {
    let head = coords[0] * coords[0] + coords[1] * coords[1];
    let tail: f64 = coords[2..].iter().map(|v| v * v).sum();
    let gxx = tail - head;
    if gxx >= 0.0 {
        return Err(QkError::InvalidParameter(
            "point is outside the cone domain; cannot normalize".into(),
        ));
    }
    let lambda = 1.0 / (-gxx).sqrt();
    Ok(coords.iter().map(|v| v * lambda).collect())
}
