//! Calderon-Zygmund kernels, cutoffs and dyadic pieces.

mod bumps;
mod kernel;
mod params;
mod pieces;

pub use bumps::{
    bump_profile, mollifier, phi_1d, phi_radial, smooth_step, smooth_step_derivative, BumpPair, SCutoff, SCUTOFF_SLOPE,
};
pub use kernel::{KernelSpec, Omega};
pub use params::{ell, ell_eps, n_of_eps};
pub(crate) use pieces::check_dims;
pub use pieces::{
    dyadic_piece, grad_l1, gradient, kj_value, mollification_error_l1, mollified_kernel, mollified_piece,
    mollified_piece_sampled, mollified_value, mollifier_grid, mollifier_rule, ErrorQuadrature, MollifyMethod,
};
