//! Fermion-to-qubit encodings on locality graphs.
//!
//! Local fermionic operators `A_jk = -i c_j c_k` (edges) and `B_k = -i c_k c_{N+k}`
//! (vertices) are mapped to Pauli operators. Trees admit exact local encodings;
//! graphs with cycles need block encodings on a stabilizer codespace, and
//! overlapping cycles (8-shaped subgraphs) force entangled encoded states whose
//! preparation depth is bounded below by the 8-shape size.
//!
//! Modules follow the data flow: [`pauli`] and [`fermion`] algebra,
//! [`graph`] structure, [`encodings`] construction, [`verifier`] relation
//! checks and [`states`] dense simulation. [`analysis`] summarizes a graph.

pub mod analysis;
pub mod dense;
pub mod encodings;
pub mod fermion;
pub mod graph;
pub mod pauli;
pub mod phase;
pub mod states;
pub mod verifier;

pub use analysis::{analyze, AnalysisReport, GraphClass, VacuumClass};
pub use dense::{CMatrix, CVector, CapExceeded, DEFAULT_DENSE_CAP};
pub use encodings::{encode, AnyEncoding, BlockEncoding, Encoding, EncodingError, EncodingKind, Method};
pub use fermion::{FermionError, MajoranaMonomial};
pub use graph::{GraphError, LocalityGraph, SearchConfig};
pub use pauli::{Letter, PauliError, PauliString, QubitLayout};
pub use phase::Phase;
pub use states::{ProductSearchResult, StateVector, StatesError};
pub use verifier::{Relation, RelationReport};
