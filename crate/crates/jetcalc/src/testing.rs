//! Cross-check oracles and standard fixtures for tests.
//!
//! Finite differences live here, deliberately outside the main evaluation
//! path: jets are the engine, central differences are the independent check.

use nalgebra::DMatrix;

use crate::field::{FieldExpr, TensorFieldSpec};
use crate::ring::Ring;

/// Central-difference gradient of every component of a field program.
/// Returns `grads[c][i] ≈ ∂_i comp_c`.
pub fn fd_gradients(field: &TensorFieldSpec, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let d = x.len();
    let n = field.valence().component_count(d);
    let mut out = vec![vec![0.0; d]; n];
    let prog = field.program();
    for i in 0..d {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        let fp = prog.eval_f64(&xp);
        let fm = prog.eval_f64(&xm);
        for c in 0..n {
            out[c][i] = (fp[c] - fm[c]) / (2.0 * h);
        }
    }
    out
}

/// Central-difference Hessians of every component of a field program.
/// Returns `hess[c][(i,j)] ≈ ∂_i ∂_j comp_c` built purely from values.
pub fn fd_hessians(field: &TensorFieldSpec, x: &[f64], h: f64) -> Vec<DMatrix<f64>> {
    let d = x.len();
    let n = field.valence().component_count(d);
    let prog = field.program();
    let f0 = prog.eval_f64(x);
    let mut out = vec![DMatrix::zeros(d, d); n];
    for i in 0..d {
        for j in 0..=i {
            let vals = if i == j {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                let fp = prog.eval_f64(&xp);
                let fm = prog.eval_f64(&xm);
                (0..n)
                    .map(|c| (fp[c] - 2.0 * f0[c] + fm[c]) / (h * h))
                    .collect::<Vec<_>>()
            } else {
                let mut xpp = x.to_vec();
                let mut xpm = x.to_vec();
                let mut xmp = x.to_vec();
                let mut xmm = x.to_vec();
                xpp[i] += h;
                xpp[j] += h;
                xpm[i] += h;
                xpm[j] -= h;
                xmp[i] -= h;
                xmp[j] += h;
                xmm[i] -= h;
                xmm[j] -= h;
                let fpp = prog.eval_f64(&xpp);
                let fpm = prog.eval_f64(&xpm);
                let fmp = prog.eval_f64(&xmp);
                let fmm = prog.eval_f64(&xmm);
                (0..n)
                    .map(|c| (fpp[c] - fpm[c] - fmp[c] + fmm[c]) / (4.0 * h * h))
                    .collect::<Vec<_>>()
            };
            for c in 0..n {
                out[c][(i, j)] = vals[c];
                out[c][(j, i)] = vals[c];
            }
        }
    }
    out
}

/// Tiny deterministic generator (splitmix64) so the oracle module needs no
/// external RNG dependency.
#[derive(Clone)]
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform draw in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + u * (hi - lo)
    }
}

/// Multivariate polynomial with explicit monomials, usable as any valence.
/// Component c is Σ coeff · Π x_i^{e_i}.
pub struct PolyField {
    /// One monomial list per component.
    pub components: Vec<Vec<(f64, Vec<u32>)>>,
}

impl FieldExpr for PolyField {
    fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
        self.components
            .iter()
            .map(|monos| {
                let mut acc = S::from_f64(0.0);
                for (c, exps) in monos {
                    let mut term = S::from_f64(*c);
                    for (i, &e) in exps.iter().enumerate() {
                        if e > 0 {
                            term = term * x[i].powi(e as i32);
                        }
                    }
                    acc = acc + term;
                }
                acc
            })
            .collect()
    }
}

/// Random polynomial with degree ≤ 2 monomials in every component.
pub fn random_poly(rng: &mut SplitMix64, dim: usize, components: usize) -> PolyField {
    let mut comps = Vec::with_capacity(components);
    for _ in 0..components {
        let mut monos = Vec::new();
        // constant, linear and quadratic terms with varied coefficients
        monos.push((rng.uniform(-1.0, 1.0), vec![0; dim]));
        for i in 0..dim {
            let mut e = vec![0u32; dim];
            e[i] = 1;
            monos.push((rng.uniform(-1.0, 1.0), e));
        }
        for i in 0..dim {
            for j in i..dim {
                let mut e = vec![0u32; dim];
                e[i] += 1;
                e[j] += 1;
                monos.push((rng.uniform(-0.5, 0.5), e));
            }
        }
        comps.push(monos);
    }
    PolyField { components: comps }
}

/// Antisymmetrized random polynomial 2-form.
pub fn random_poly_2form(rng: &mut SplitMix64, dim: usize) -> PolyField {
    let raw = random_poly(rng, dim, dim * dim);
    let mut comps = vec![Vec::new(); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            if i == j {
                comps[i * dim + j] = vec![(0.0, vec![0; dim])];
                continue;
            }
            let mut monos = Vec::new();
            for (c, e) in &raw.components[i * dim + j] {
                monos.push((0.5 * c, e.clone()));
            }
            for (c, e) in &raw.components[j * dim + i] {
                monos.push((-0.5 * c, e.clone()));
            }
            comps[i * dim + j] = monos;
        }
    }
    PolyField { components: comps }
}

pub mod fixtures {
    //! Textbook metrics used to calibrate signs and tolerances.

    use std::sync::Arc;

    use crate::field::{Chart, FieldExpr, TensorFieldSpec, Valence};
    use crate::ring::Ring;

    /// Flat metric with the given diagonal signs.
    pub fn flat_metric(signs: &[f64]) -> TensorFieldSpec {
        let d = signs.len();
        let chart = Chart::new(format!("flat{}", d), d);
        let mut comps = vec![0.0; d * d];
        for (i, &s) in signs.iter().enumerate() {
            comps[i * d + i] = s;
        }
        TensorFieldSpec::new(chart, Valence::Sym2, crate::field::ConstField(comps))
    }

    struct Sphere;

    impl FieldExpr for Sphere {
        // ds² = dθ² + sin²θ dφ² on the unit sphere
        fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
            let s = x[0].sin();
            vec![
                S::from_f64(1.0),
                S::from_f64(0.0),
                S::from_f64(0.0),
                s.clone() * s,
            ]
        }
    }

    /// Unit round 2-sphere in polar coordinates (θ, φ), θ away from the poles.
    pub fn unit_sphere() -> (Arc<Chart>, TensorFieldSpec) {
        let chart = Chart::with_domain("sphere", 2, |x| {
            x[0] > 0.05 && x[0] < std::f64::consts::PI - 0.05
        });
        (
            chart.clone(),
            TensorFieldSpec::new(chart, Valence::Sym2, Sphere),
        )
    }

    struct Disk;

    impl FieldExpr for Disk {
        // (1 − r²)⁻² δ on the unit disk
        fn eval<S: Ring>(&self, x: &[S]) -> Vec<S> {
            let one = S::from_f64(1.0);
            let r2 = x[0].clone() * x[0].clone() + x[1].clone() * x[1].clone();
            let f = one.clone() - r2;
            let c = (f.clone() * f).recip();
            vec![c.clone(), S::from_f64(0.0), S::from_f64(0.0), c]
        }
    }

    /// The disk model metric (1 − |X|²)⁻² δ of constant curvature −4.
    pub fn hyperbolic_disk() -> (Arc<Chart>, TensorFieldSpec) {
        let chart = Chart::with_domain("disk", 2, |x| x[0] * x[0] + x[1] * x[1] < 1.0);
        (
            chart.clone(),
            TensorFieldSpec::new(chart, Valence::Sym2, Disk),
        )
    }
}
