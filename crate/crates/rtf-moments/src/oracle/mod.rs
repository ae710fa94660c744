//! Spectral side over ℚ: level-1 eigenforms, central and adjoint L-values,
//! prime-level data ingestion and the spectral moment sums.

pub mod lfunc;
pub mod modforms;
pub mod records;
pub mod spectral;

pub use modforms::{eta_newform_lambdas, eta_product};
pub use lfunc::{adjoint_l, central_l, root_number};
pub use records::{ingest_newforms, level1_eigenforms, level1_eigenforms_cached, NewformRecord, Source};
pub use spectral::{spectral_firstmoment, spectral_secondmoment, SpectralMoment};
