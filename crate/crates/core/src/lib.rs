//! Perfect simulation of the jamming limit of lattice parking processes.
//!
//! Particles arrive at the sites of `Z^d` in the order given by an i.i.d.
//! uniform field and adsorb when their `ν`-neighbourhood is admissible under
//! a [`ParkingScheme`]. The infinite-volume jamming limit at any finite
//! window is sampled exactly by parking on the window's [`Armour`], the
//! finite set of sites that can influence it.
//!
//! ```
//! use jamlim_core::{perfect_site, Norm, ParkingScheme, Site, UniformField, DEFAULT_BUDGET};
//!
//! let scheme = ParkingScheme::nn_exclusion(2, 1, Norm::L1).unwrap();
//! let field = UniformField::new(7, 2).unwrap();
//! let spin = perfect_site(&field, &Site::origin(2), &scheme, DEFAULT_BUDGET).unwrap();
//! assert!(spin <= 1);
//! ```

pub mod armour;
pub mod error;
pub mod estimate;
pub mod exact1d;
pub mod field;
pub mod scheme;
pub mod simulate;

pub use armour::{
    armour, perfect_site, perfect_window, perfect_window_with_armour, Armour, DEFAULT_BUDGET,
};
pub use error::{Error, Result};
pub use estimate::{
    correlation, density_box, density_ergodic, density_perfect, density_perfect_at,
    local_discrepancy, replica_seed, tail_bound, CorrelationReport, DiscrepancyRow, Estimate,
    LocalEvent,
};
pub use exact1d::{p_by_enumeration, p_exact, rho_bounds, total_mass, SeriesBounds};
pub use field::{LatticeBox, Site, UniformField};
pub use scheme::{Norm, ParkingScheme, SchemeFile, SchemeKind, Window};
pub use simulate::{park, park_box, BoundaryCondition, Configuration};
