//! CoG differentiation, joint-force recursion, ground reaction force and
//! the force CSV export.

mod export;
mod inverse;
mod savgol;

pub use export::{write_forces_csv, ForceTable};
pub use inverse::{
    gravity_vector, ground_reaction_force, inverse_dynamics_tree, segment_accelerations,
    GrfTrace, JointForceTrace, KinematicsTrace,
};
pub use savgol::{savgol_coefficients, smooth_differentiate, SavGolSpec};
