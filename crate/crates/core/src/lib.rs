//! Numerical spectral theory for half-line Schrödinger operators
//! `−u'' + Vu` with distributional potentials `V = σ' + τ`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dd;
pub mod error;
pub mod linalg;
pub mod ode;
pub mod potential;
pub mod propagate;
pub mod prufer;
pub mod quadrature;
pub mod sparse;
pub mod special;
pub mod spectral;
pub mod weyl;

pub use error::{Error, Result};
pub use linalg::{Mat2, C64};
pub use dd::{Dd, ExactLength};
pub use potential::{
    build_potential, gauge_transform, local_size, preset_potential, relabel_boundary,
    BoundaryAngle, ClosedForm, Form, Part, PotentialSpec, Preset, Profile, SegmentDescriptor,
    Shape,
};
pub use propagate::{transfer, Tolerances, TransferMatrix};
pub use prufer::{gap_advance, prufer_flow, PruferState};
pub use sparse::{SparseConfig, TransitionThresholds, TransitionTrace};
pub use spectral::{DensityVariant, DiagnosticReport, LogValue, SpectralTag};
pub use weyl::{m_function, weyl_disk, WeylDisk};
