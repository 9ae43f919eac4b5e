//! Finite atomic measures in R^n, their beta numbers and curvature energies,
//! and exact checks of the inequalities relating them.

pub mod beta;
pub mod curvature;
pub mod error;
pub mod geometry;
pub mod index;
pub mod lab;
pub mod measure;
pub mod sum;
pub mod synth;

pub use beta::{
    beta_ball, beta_cube, beta_given_plane, scale_profile, BetaParams, BetaValue, ScaleProfile,
};
pub use curvature::{
    curvature_exact, curvature_mc, e_integrand, m_p_functional, CurvatureEstimate, CurvatureParams,
    Method,
};
pub use error::{Error, Result};
pub use geometry::{
    affine_hull, diam, dist_to_plane, h_min, kappa, menger_c, simplex_measure, AffinePlane,
};
pub use lab::{
    gamma_lemma1, gamma_lemma2, multiscale_integral, verify_corollary_lw11, verify_lemma1,
    verify_lemma2, verify_pointwise_bounds, MultiscaleParams, VerificationReport,
};
pub use measure::{
    load_csv, theta_ball, theta_cube, unit_ball_volume, Ball, DyadicCube, PointCloudMeasure,
};
pub use synth::{synthesize, Generator};
