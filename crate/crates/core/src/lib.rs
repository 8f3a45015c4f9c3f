//! Numerical laboratory for the relative trace formula of central L-values
//! of GL(2): field and ideal data, characters, local factors, spectral
//! measures and the explicit constants of the trace formula identity.

pub mod characters;
pub mod checks;
pub mod empirical;
pub mod error;
pub mod field_profile;
pub mod local_factors;
pub mod numeric;
pub mod rtf_constants;
pub mod spectral_measures;

pub use characters::{DirichletCharacter, QuadraticCharacterProfile};
pub use empirical::{EmpiricalSample, SampleRow};
pub use error::{Result, RtfError};
pub use field_profile::{FieldProfile, FinitePlace, LevelIdeal};
pub use local_factors::LocalRepresentation;
pub use num_complex::Complex64;
pub use numeric::quadrature::QuadratureResult;
pub use rtf_constants::{DCoefficients, LaurentData, RhoAssignment, YBuildingBlock};
pub use spectral_measures::{Density, SpectralPlace, TabulatedCdf};
