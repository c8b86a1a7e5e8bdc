//! Matrix primitives: dense and CSR storage, norms, factorizations and
//! subspace distances.

mod align;
mod dense;
mod eigen;
mod norms;
mod operator;
mod qr;
mod sparse;
mod spectrum;
mod svd;

pub use align::{coherence, dist_2, dist_2inf_proxy, procrustes_align};
pub use dense::{ColumnBlock, Mat, SmallSquare};
pub use eigen::sym_eigen;
pub use norms::{inf_op_norm, operator_norm, row_norms, spectral_norm, two_to_inf_norm, EXACT_NORM_DIM};
pub use operator::{Deflated, DenseSym, Shifted, SymOperator};
pub use qr::{thin_qr, RANK_TOL};
pub use sparse::SparseSymMatrix;
pub use spectrum::Spectrum;
pub use svd::{small_svd, Svd};

pub(crate) use dense::{dot, norm2, project_out_prefix};
