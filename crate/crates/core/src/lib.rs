//! Relaxation kernels, cluster eigenvalues and spectral inversion for the
//! isotropic extended Burgers model (EBM).
//!
//! The pipeline runs forward from an [`EbmModel`] to its Prony-form kernel
//! ([`relaxation`]), the radial modes of a traction-free ball ([`ball`]) and
//! the cluster eigenvalues of each mode ([`spectrum`]). [`inversion`] maps two
//! clusters back to the model's moduli and modal weights.

pub mod ball;
pub mod error;
pub mod inversion;
pub mod io;
pub mod model;
pub mod numerics;
pub mod relaxation;
pub mod sampling;
pub mod spectrum;
pub mod tensor;
pub mod verify;

pub use ball::{eval_f, eval_mode_fields, solve_mode, verify_mode, ModeFields, ModeReport, RadialMode};
pub use error::{Error, Result};
pub use inversion::{
    fit_residual, invert_known_c, recover_moduli, recover_prony, self_consistent_invert, ClusterData, Diagnostics, FitReport,
    InversionResult, PronyEstimate,
};
pub use model::{assemble, assemble_unsymmetrized_shear, EbmModel, Element, ModeKind, ModeMatrix, Violation};
pub use numerics::{DenseMatrix, EighResult, Poly};
pub use relaxation::{compute_spectrum, eval_kernel, stress_from_strain_history, KernelValues, Mode, RelaxationSpectrum};
pub use spectrum::{
    augmented_matrix, build_prony, char_poly_ell, coefficient_scales, cluster_roots, cluster_roots_with_c, limit_poly, modal_simulate,
    ClusterSpectrum, PronyPair, Trajectory,
};
pub use tensor::{apply_iso, check_strong_convexity, project, IsoTensor4, Part, SymTensor3};
