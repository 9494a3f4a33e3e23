//! ρ-sweeps of the curvature norm: constant in the symmetric case, strictly
//! monotone once the one-loop deformation is switched on — the coordinate ρ
//! becomes an isometry invariant.

use qkmap::geometries::{fs_higher, fs_uhm};
use qkmap::invariants::{injectivity_scan, linear_grid};

fn main() -> qkmap::Result<()> {
    let grid = linear_grid(0.5, 5.0, 40);

    for (label, case) in [
        ("dim 4,  c = 0.0", fs_uhm(0.0)?),
        ("dim 4,  c = 1.0", fs_uhm(1.0)?),
        ("dim 8,  c = 0.0", fs_higher(1, 0.0)?),
        ("dim 8,  c = 0.5", fs_higher(1, 0.5)?),
    ] {
        let scan = injectivity_scan(&case, &grid)?;
        println!("{label}:");
        println!(
            "  |R|² range [{:.6}, {:.6}], closed-form deviation {:.2e}, strictly monotone: {}",
            scan.norms.first().unwrap(),
            scan.norms.last().unwrap(),
            scan.max_deviation,
            scan.strictly_monotonic
        );
        print!("  samples: ");
        for i in (0..grid.len()).step_by(8) {
            print!("ρ={:.2}→{:.4}  ", scan.rhos[i], scan.norms[i]);
        }
        println!("\n");
    }

    println!("interpretation: for c > 0 the norm separates the ρ-level sets,");
    println!("so no isometry can move points across them.");
    Ok(())
}
