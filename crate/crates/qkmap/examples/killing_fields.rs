//! Killing-field catalogs on the deformed metrics, and the rank probe that
//! counts how many independent candidate directions are actually Killing.

use qkmap::geometries::{fs_higher, fs_uhm};
use qkmap::groups::{
    dilation_field, heisenberg_basis, killing_rank_probe, killing_residual_sup, uhm_killing_basis,
};
use qkmap::report::sampling;

fn main() -> qkmap::Result<()> {
    println!("universal hypermultiplet: basis X1..X4 plus the dilation D\n");
    for &c in &[0.0, 0.3, 1.0] {
        let case = fs_uhm(c)?;
        let points = sampling::case_points(&case, 50, 11)?;
        let [x1, x2, x3, x4] = uhm_killing_basis(&case);
        print!("  c = {c:<4}");
        for (name, x) in [("X1", &x1), ("X2", &x2), ("X3", &x3), ("X4", &x4)] {
            print!(
                "  {name} {:9.2e}",
                killing_residual_sup(&case.metric, x, &points)?
            );
        }
        let d = dilation_field(&case);
        println!(
            "  D {:9.2e}",
            killing_residual_sup(&case.metric, &d, &points)?
        );
    }

    println!("\nrank probe over the span {{X1, X2, X3, X4, D}}:");
    for &c in &[0.0, 1.0] {
        let case = fs_uhm(c)?;
        let [x1, x2, x3, x4] = uhm_killing_basis(&case);
        let cands = vec![x1, x2, x3, x4, dilation_field(&case)];
        let points = sampling::case_points(&case, 12, 21)?;
        let dim = killing_rank_probe(&case.metric, &cands, &points)?;
        println!("  c = {c}: kernel dimension {dim} (D survives only at c = 0)");
    }

    println!("\nhigher family: the 2k+3 Heisenberg generators stay Killing for all c");
    for k in [1usize, 2] {
        for &c in &[0.0, 0.5] {
            let case = fs_higher(k, c)?;
            let points = sampling::case_points(&case, 40, 31)?;
            let mut worst: f64 = 0.0;
            for x in heisenberg_basis(&case) {
                worst = worst.max(killing_residual_sup(&case.metric, &x, &points)?);
            }
            println!("  k = {k}, c = {c:<4} sup L_X g = {worst:9.2e}");
        }
    }
    Ok(())
}
