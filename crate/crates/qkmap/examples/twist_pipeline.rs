//! From a pseudo-unitary base symmetry to a Killing field downstairs: lift,
//! correct by −(f_Y/f_H)Z, and watch the twist-Killing residual vanish.

use jetcalc::sup_norm;
use qkmap::geometries::{cask_domain, elementary_deformation, rigid_cmap};
use qkmap::report::sampling;
use qkmap::symmetries::{
    canonical_lift, modified_field, twist_killing_residual, unitary_generators,
};

fn main() -> qkmap::Result<()> {
    let k = 1;
    let c = 0.7;
    let cask = cask_domain(k);
    let hk = rigid_cmap(&cask, c);
    let defo = elementary_deformation(&hk);
    let probe = sampling::rigid_points(&hk, 8, 5)?;
    let points = sampling::rigid_points(&hk, 30, 55)?;

    println!("twist-Killing residual L_V g_H − 2 f_H⁻¹ (ι_V ω_H) ∨ (ι_Z g_H)");
    println!("base M_{k}, one-loop offset c = {c}, 30 random points\n");
    println!(
        "{:<16} {:>14} {:>14}",
        "generator", "V = Y (ψ = 0)", "V = Y_H"
    );

    for gen in unitary_generators(k) {
        let cand = canonical_lift(&gen.real_mat, &hk, &probe)?;
        let yh = modified_field(&cand, &hk, &defo);

        let mut raw: f64 = 0.0;
        let mut corrected: f64 = 0.0;
        for p in &points {
            raw = raw.max(sup_norm(&twist_killing_residual(&cand.y, &hk, &defo, p)?));
            corrected = corrected.max(sup_norm(&twist_killing_residual(&yh, &hk, &defo, p)?));
        }
        println!(
            "{:<16} {raw:>14.3e} {corrected:>14.3e}{}",
            gen.label,
            if gen.central { "   (central)" } else { "" }
        );
    }

    println!("\nthe uncorrected lift fails for every non-central generator;");
    println!("the corrected field passes at the 1e-9 level for all of them.");
    Ok(())
}
