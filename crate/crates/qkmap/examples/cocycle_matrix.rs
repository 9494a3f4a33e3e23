//! The central-extension bookkeeping of the lifted symmetry algebra: numeric
//! structure constants, the cocycle matrix A_jk = ω_H(Y_j, Y_k) − Σ c^l_jk f_l,
//! and its constancy across disjoint point clouds.

use qkmap::geometries::{cask_domain, elementary_deformation, rigid_cmap};
use qkmap::report::sampling;
use qkmap::symmetries::{canonical_lift, cocycle, structure_constants, unitary_generators};

fn main() -> qkmap::Result<()> {
    let k = 1;
    let cask = cask_domain(k);
    let hk = rigid_cmap(&cask, 0.0);
    let defo = elementary_deformation(&hk);
    let probe = sampling::rigid_points(&hk, 8, 41)?;

    let gens = unitary_generators(k);
    let cands: Vec<_> = gens
        .iter()
        .map(|g| canonical_lift(&g.real_mat, &hk, &probe))
        .collect::<qkmap::Result<_>>()?;

    println!("lifted algebra basis:");
    for (i, g) in gens.iter().enumerate() {
        println!(
            "  Y{} = lift of {}{}",
            i,
            g.label,
            if g.central { " (central)" } else { "" }
        );
    }

    let consts = structure_constants(&cands, &probe[..4])?;
    println!("\nnonzero structure constants c^l_jk ([Y_j, Y_k] = Σ c^l_jk Y_l):");
    for l in 0..cands.len() {
        for j in 0..cands.len() {
            for kk in 0..j {
                let v = consts[l][(j, kk)];
                if v.abs() > 1e-9 {
                    println!("  c^{l}_({j},{kk}) = {v:+.3}");
                }
            }
        }
    }

    for seed in [1234u64, 4321] {
        let cloud = sampling::rigid_points(&hk, 100, seed)?;
        let report = cocycle(&cands, &consts, &defo, &cloud)?;
        println!(
            "\ncloud seed {seed}: constancy spread {:.2e}, closure residual {:.2e}",
            report.max_spread, report.closure_residual
        );
        println!("A = {:.3}", report.matrix);
    }

    println!("the cocycle vanishes for this algebra with the canonical Hamiltonian");
    println!("choice, so the lifted algebra splits off the extra circle direction.");
    Ok(())
}
