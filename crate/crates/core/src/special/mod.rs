//! Scalar special functions, partitions and Jack polynomials.

mod algebra;
mod gamma;
mod hypergeom;
mod jack;
mod partition;
mod scalar;
mod series;

pub use algebra::AlgebraKind;
pub use gamma::{
    gen_pochhammer, ln_mv_gamma, ln_stiefel_volume, mv_gamma, pochhammer, stiefel_volume,
};
pub use hypergeom::hypergeom_1f0;
pub use jack::{jack_c, jack_c_identity, jack_table, JackTable};
pub use partition::{enumerate_partitions, Partition};
pub use scalar::Scalar;
pub use series::{pairwise_sum, LayerRecord, SeriesControl, SeriesResult};

pub(crate) use jack::PreparedSpectrum;
pub(crate) use series::sum_layers;
