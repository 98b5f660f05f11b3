//! Exact logarithmic decomposition of Shannon entropy.
//!
//! Every subset of at least two outcomes (an atom) carries a signed measure
//! `μ`, the Möbius inversion of the merging loss
//! `L(p) = P log P − Σ p log p`. A random variable is a partition of the
//! outcomes and its content `ΔX` is the set of atoms crossing its block
//! boundaries; entropies, mutual information and their relatives are the
//! measures of set expressions over contents.
//!
//! ```
//! use ld_core::{InfoSystem, OutcomeSpace, Partition, QuantityKind, quantity};
//!
//! let space = OutcomeSpace::numbered(&[0.25; 4]).unwrap();
//! let x = Partition::from_masks(4, [0b0101, 0b1010]).unwrap();
//! let y = Partition::from_masks(4, [0b0011, 0b1100]).unwrap();
//! let sys = InfoSystem::new(space, vec![("X".into(), x), ("Y".into(), y)]).unwrap();
//! let mi = quantity(&sys, QuantityKind::MutualInformation, &["X", "Y"]).unwrap();
//! assert!(mi.abs() < 1e-12);
//! ```

pub mod atoms;
pub mod error;
pub mod measure;
pub mod quantities;
pub mod refinement;
pub mod representability;
pub mod space;
pub mod systems;

pub use atoms::{
    atom_count, atomset_algebra, enumerate_atoms, formal_combine, render_atom, Atom, AtomSet,
    FormalSum, Restrict, SetOp,
};
pub use error::{Error, Result};
pub use measure::{
    entropy_partition_law, interior_loss, measure_atom_set, measure_formal_sum, mu_table,
    shannon_entropy, subset_loss, total_loss, tsallis_interior_loss, tsallis_loss, LogBase,
    MuTable,
};
pub use quantities::{
    content, content_of_blocks, eval_region, expression_to_formal_sum, multiplicity_quantity,
    multiplicity_sum, quantity, quantity_region, EntropyExpr, InfoSystem, MultiplicityKind,
    QuantityKind, SetExpr,
};
pub use refinement::{
    equivalent_under_refinement, kl_via_measure, micro_macro_split, refine_space, restrict, star,
    RefinementMap, RegionPart, SplitOrder,
};
pub use representability::{
    ci_residual, gacs_korner, is_conditionally_independent, is_representable,
    max_representable_subset, max_representable_subset_with_cap, wyner, wyner_with_config,
    CommonInfoResult, SearchConfig,
};
pub use space::{
    bell, enumerate_coarsenings, enumerate_partitions, members, Mask, OutcomeSpace, Partition,
    RestrictedGrowth, DEFAULT_MAX_OUTCOMES, HARD_MAX_OUTCOMES,
};
pub use systems::{
    build_canonical_system, discriminate, upper_set, CanonicalSystem, CanonicalSystemName,
};
