pub mod bessel;
mod coulomb;
pub mod error;
pub mod extension;
pub mod fit;
pub mod ground_state;
pub mod io;
pub mod linearization;
pub mod potentials;
pub mod radial;
pub mod transform;

pub use error::{Error, Result};
pub use radial::{inner_product, mass, sup_distance, RadialGrid, RadialProfile, SpectralProfile};
