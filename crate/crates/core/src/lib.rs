//! Secret key agreement and secure omniscience for tree-PIN sources observed
//! by a linear wiretapper.
//!
//! The crate evaluates the wiretap secret key capacity and the minimum
//! leakage rate for omniscience in closed form, reduces instances to
//! irreducible form, synthesizes linear non-interactive communication
//! schemes achieving both, and checks everything by rank computations,
//! simulation, and brute-force enumeration on small instances.

pub mod capacity;
pub mod error;
pub mod falinalg;
pub mod fixtures;
pub mod gfield;
pub mod mcf;
pub mod model;
pub mod oracle;
pub mod reduce;
pub mod report;
pub mod scheme;
pub mod simulate;
pub mod verify;

pub use capacity::{analyze, CapacityReport, Rate};
pub use error::{Error, Result};
pub use falinalg::FMatrix;
pub use gfield::{make_ext_field, ExtFieldCtx, FieldElem};
pub use mcf::LinearMcf;
pub use model::{load_instance, random_instance, save_instance, Edge, Instance, TreePinSource, Wiretapper};
pub use reduce::{is_irreducible, reduce_full, reduce_once, ReductionStep, ReductionTrace};
pub use report::Report;
pub use scheme::{
    choose_extension_degree, extract_key, load_scheme, save_scheme, synth_explicit_unit, synth_random, CommScheme,
    KeyExtractor,
};
pub use simulate::{run_protocol, sample_block, SimReport};
pub use verify::{verify, VerificationReport};
