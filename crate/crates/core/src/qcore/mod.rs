//! Dense complex linear algebra for two- and three-qubit registers.

pub mod density;
pub mod eigen;
pub mod matrix;
pub mod ops;

pub use density::DensityMatrix;
pub use eigen::{herm_eigen, herm_eigvals, HermitianEigen};
pub use matrix::{ComplexMatrix, MAX_DIM};
pub use ops::{
    basis, conjugate, expm_skew, on_qubit, partial_trace3, pauli, projector, tensor, tensor_all,
    trace_out_qubit, Subsystem,
};
