//! Test-problem builders and instance file I/O.

pub mod ncm;
pub mod qsdp;
pub mod sparse;

pub use ncm::{build_ncm, NcmInstance, NormKind, Weights};
pub use qsdp::{build_biq, build_random_qsdp, scalar_qsdp, QsdpInstance};
pub use sparse::{load_sparse_instance, parse_sparse_instance, write_sparse_instance, SparseInstance};
