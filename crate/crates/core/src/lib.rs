//! Time-frequency analysis on finite abelian groups `G = Z_N1 x ... x Z_Nd`.
//!
//! Signals live on `G`, phase-space functions on `G x Ĝ`. A subgroup
//! `K = d_1 Z_N1 x ... x d_d Z_Nd` fixes the quasi-lattice `D1 x D2` of coset
//! representatives on which Gabor systems are sampled.
//!
//! - [`group`]: groups, characters, Haar masses, subgroup and annihilator.
//! - [`signal`]: signals and phase-space functions with shifts, Fourier transform, convolution.
//! - [`tfa`]: short-time Fourier transform, Rihaczek distribution, test-function expansions.
//! - [`norms`]: weights, mixed quasi-norms, Wiener amalgam and modulation quasi-norms.
//! - [`gabor`]: quasi-lattices, frame operators, frame bounds, dual windows.
//! - [`operators`]: Kohn-Nirenberg and localization operators, Gabor matrices.
//! - [`spectral`]: Hermitian eigensolver and the eigenfunction decay comparison.
//! - [`experiment`]: config-driven runner behind the `lca-tfa` binary.
//!
//! ```
//! use lca_tfa::group::make_group;
//! use lca_tfa::gabor::{frame_bounds, QuasiLattice};
//! use lca_tfa::tfa::gaussian_window;
//!
//! let g = make_group(&[8], &[4]).unwrap();
//! let bounds = frame_bounds(&gaussian_window(&g), &QuasiLattice::canonical(g.clone())).unwrap();
//! assert!(bounds.is_tight(1e-12));
//! ```

pub mod error;
pub mod experiment;
pub mod gabor;
pub mod group;
pub mod io;
pub mod matrix;
pub mod norms;
pub mod operators;
pub mod random;
pub mod signal;
pub mod spectral;
pub mod tfa;

pub use error::{Error, Result};
pub use group::{make_group, Group, GroupSpec};
pub use signal::{PhaseFunction, Signal};
