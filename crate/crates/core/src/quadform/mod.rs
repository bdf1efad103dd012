//! Density and characteristic-function series for W = X* A X.

mod closed;
mod model;
mod series;

pub use closed::{cf_normal_closed, cf_normal_closed_spectral};
pub use model::{PearsonSign, QuadFormFile, QuadFormModel, QuadFormSpectra, SplittingConvention};
pub use series::{
    cf_w, cf_w_with, density_w, density_w_with, series_partial_table, EvalPoint, PartialRow,
    RawNormalization, SeriesPath,
};
