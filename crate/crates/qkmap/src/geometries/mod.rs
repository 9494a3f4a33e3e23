//! Explicit geometries in real coordinates: CASK domains, complex hyperbolic
//! bases, rigid c-map hyper-Kähler structures, elementary deformations and
//! the one-loop deformed Ferrara–Sabharwal metrics.

pub mod cask;
pub mod cmap;
pub mod fs;
pub mod hyperbolic;

pub use cask::{cask_domain, to_unit_level_set, CaskStructure};
pub use cmap::{check_twist_regular, elementary_deformation, rigid_cmap, Deformation, HKData};
pub use fs::{fs_higher, fs_uhm, Family, QkMetricCase};
pub use hyperbolic::{ball_chart, complex_hyperbolic, kahler_potential};
