//! Matrix-variate elliptical laws: generators, constants, densities and samplers.

mod family;
mod model;
mod sampler;

pub use family::{
    h_deriv0, h_value, normalizing_constant, normalizing_constant_quadrature, radial_moment,
    BoundFamily, Dims, GeneratorFamily,
};
pub use model::{density_x, EllipticalModel};
pub use sampler::{sample_x, sample_x_with, EllipticalSampler, SampleOptions};

pub(crate) use sampler::embedded_trace_product;
