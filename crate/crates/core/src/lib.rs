pub mod canon;
pub mod coset;
pub mod encoding;
pub mod error;
pub mod group;
pub mod io;
pub mod object;
pub mod oracle;
pub mod perm;

pub use canon::{CanonResult, Canonizer, Code};
pub use coset::LabelingCoset;
pub use error::{Error, Result};
pub use group::PermutationGroup;
pub use object::{GroundSet, Node, NodeId, Object, ObjectDag};
pub use perm::Perm;
