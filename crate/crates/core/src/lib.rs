//! Fusion systems on finite p-groups: construction, saturation, group
//! models with a word problem, and stable elements in mod-p cohomology.

pub mod error;
pub mod group;
pub mod fusion;
pub mod fp;
pub mod cohomology;
pub mod stable;
pub mod models;
pub mod files;
pub mod corpus;
