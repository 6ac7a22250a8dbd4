//! Torus grids, coefficient storage, transforms and Fourier multipliers.

mod field;
mod grid;
mod ops;
mod transform;

pub use field::SpectralField;
pub use grid::{dot, norm_sq, TorusGrid, Wavevector};
pub use ops::{
    dealias, dealias_in_place, directional_derivative, fractional_laplacian, leray_project,
    leray_project_in_place, sobolev_norm, sobolev_weight, Sobolev,
};
pub use transform::{transform_roundtrip, SpectralTransform};
