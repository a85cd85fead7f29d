//! Finite-set model of generalized principal bundles and quotient stacks.
//!
//! The ambient category is finite sets with the canonical topology. On top
//! of it the crate builds group actions, principal bundles, the quotient
//! prestack `[X/G]` with its restriction functors and coherence cells, and
//! constructive descent: gluing of morphisms and objects along covers.

pub mod atom;
pub mod bundle;
pub mod corpus;
pub mod descent;
pub mod finset;
pub mod group;
pub mod partition;
pub mod site;
pub mod stack;

pub use atom::Atom;
pub use bundle::Bundle;
pub use descent::DescentDatum;
pub use finset::{FinError, FinMap, FinSet};
pub use group::{EquivariantMap, FinGroup, GAction};
pub use site::CoveringFamily;
pub use stack::{QSMorphism, QSObject, QuotientStack};
