//! Spectral-gap and bipartiteness certificates for Cayley-type and
//! vertex-transitive graphs built from finite-group data.
//!
//! The library constructs regular multigraphs as sums of permutation
//! operators over a finite group action, computes their spectra and exact
//! combinatorial constants, runs the correlation-pivoting pipeline, and
//! evaluates a fixed battery of fifteen inequality checks (C1..C15) into a
//! machine-readable certificate.
//!
//! Floating-point work is generic over the scalar (see [`real::Real`]);
//! the exact constants are integer and rational arithmetic throughout.

pub mod certify;
pub mod corpus;
pub mod eigen;
pub mod error;
pub mod freiman;
pub mod graph;
pub mod group;
pub mod invariants;
pub mod io;
pub mod real;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{build_instance, validate_instance, vertex_transitive_instance, GraphKind,
                SpectralInstance};
pub use group::{FiniteGroup, GroupAction};
pub use real::Real;

/// Default scalar for the CLI and reports.
pub type Scalar = f64;

pub type Spectrum64 = spectral::Spectrum<f64>;
pub type SpectralProfile64 = spectral::SpectralProfile<f64>;
pub type DerivedConstants64 = spectral::DerivedConstants<f64>;
pub type CorrelationProfile64 = freiman::CorrelationProfile<f64>;
pub type CertifyOptions64 = certify::CertifyOptions<f64>;
pub type CertificateReport64 = certify::CertificateReport<f64>;
pub type ScanResult64 = certify::ScanResult<f64>;
