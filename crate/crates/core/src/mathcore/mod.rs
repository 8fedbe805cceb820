//! Special functions, random streams, primitive samplers and quadrature.

pub mod quad;
mod rng;
mod special;

pub use rng::{
    draw_beta, draw_gamma, draw_standard_normal, draw_uniform, draw_uniform_sphere, RngStream,
};
pub(crate) use rng::draw_normal_one;
pub use special::{
    log_beta, log_gamma, log_sphere_area, log_unit_ball_volume, std_normal_cdf,
    std_normal_quantile, std_normal_sf, unit_ball_volume,
};
pub(crate) use special::log_gamma_unchecked;
