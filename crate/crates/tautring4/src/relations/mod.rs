//! Relations in degree two: low-genus divisor relations, the native table,
//! their propagation to any space, and reduction to the essential basis.

mod catalog;
mod data;
mod degree1;
mod degree1cat;

pub use catalog::{catalog, catalog_with_order, eliminated_first, native_images, natives, span_rank, Catalog, Reduced, Relation, Source};
pub use data::{builtin_natives, load_natives, load_natives_from, Correction, NativeRelation, CATALOG_ENV};
pub use degree1::degree_one_relations;
pub use degree1cat::{divisor_catalog, tensor_normal_form, DivisorCatalog};
