//! Forward and inverse spectral computations for the magnetic Schrödinger
//! operator `H = (i∂ + A)² + V` on a flat two-dimensional torus `ℝ²/L`.
//!
//! The forward direction turns a periodic magnetic field `B` and a mean-zero
//! electric potential `V` into the one-dimensional band invariants `F_k(δ)`
//! and `G_k(δ)` attached to every primitive direction `δ` of the dual
//! lattice. The inverse direction recovers `B` and `V` from those numbers
//! whenever the total flux is one quantum and `|B − b₀| < |b₀|`.
//!
//! All numerical code is generic over the scalar type (see [`Real`]);
//! the `*64` aliases below are the instantiations used by the CLI.

mod error;
pub mod fields;
pub mod invariants;
pub mod inversion;
pub mod io;
pub mod lattice;
pub mod operators;
mod scalar;

pub use error::{Error, Result};
pub use fields::{DirectionalProfile, FourierField2D, MagneticPotential};
pub use invariants::{DirectionInvariants, InvariantSet};
pub use inversion::{MonotoneMap, Reconstruction, ReconstructionReport, RoundtripParams};
pub use lattice::{DualIndex, FluxQuantum, Lattice, PrimitiveDirection};
pub use operators::{GridFunction, MagneticTranslation};
pub use scalar::Real;

pub type Vec2<T> = [T; 2];

pub type Lattice64 = Lattice<f64>;
pub type Lattice32 = Lattice<f32>;
pub type Field64 = FourierField2D<f64>;
pub type Field32 = FourierField2D<f32>;
pub type Potential64 = MagneticPotential<f64>;
pub type Profile64 = DirectionalProfile<f64>;
pub type InvariantSet64 = InvariantSet<f64>;
pub type MonotoneMap64 = MonotoneMap<f64>;
pub type Report64 = ReconstructionReport<f64>;
