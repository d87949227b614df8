//! Construction and entanglement classification of bipartite `d × d` qudit
//! states that are invariant under simultaneous cyclic basis shifts and
//! opposite local phase rotations.
//!
//! The crate covers the full pipeline on this family:
//!
//! - [`family`]: parametrization, validity, vertices and dense materialization.
//! - [`criteria`]: closed-form PPT and realignment (CCNR) criteria and the
//!   complete separable / bound entangled / NPT classification of the facet
//!   spanned by `|φ+⟩` and the shifted diagonal states.
//! - [`twirl`]: projection of arbitrary states onto the family.
//! - [`schmidt`]: Schmidt ranks, fidelity witnesses and circulant upper bounds.
//! - [`entropy`]: linear entropy and its facet minimization.
//! - [`weyl`]: displacement operators and Bloch coefficients of facet states.
//! - [`oracle`]: brute-force cross-checks (Gilbert distance, LP hull
//!   membership, explicit separable decomposition).
//! - [`qmat`]: the dense linear-algebra kernel.

pub mod criteria;
pub mod entropy;
pub mod error;
pub mod family;
pub mod oracle;
pub mod qmat;
pub mod schmidt;
pub mod twirl;
pub mod weyl;

pub use criteria::{ClassificationReport, Verdict};
pub use error::{Error, Result};
pub use family::{FacetCoordsD3, FacetState, FamilyState};
pub use qmat::{ComplexMatrix, DensityMatrix};
