//! Certified computation on gaps between the Markov and Lagrange spectra.
//!
//! Values λ₀(S) of eventually periodic sequences are exact sums of square
//! roots; every comparison in the crate is decided exactly.

pub mod automaton;
pub mod certifier;
pub mod error;
pub mod explorer;
pub mod extremal;
pub mod lambda;
pub mod ledger;
pub mod presets;
pub mod regions;
pub mod surd;
pub mod words;

pub use error::{Error, Result};
pub use surd::{Decimal, QuadSurd, RadicalSum, RatInterval, Rounding};
pub use words::{BiSeq, Digit, Literal, PointedWord, Word};
pub use lambda::{bound_pair, lambda, lambda0, markov_sup, BoundPair, SupResult};
pub use certifier::{certify_forbidden, derive_forbidden, DeriveOptions, DerivedCert, ForbiddenCert};
pub use ledger::{recheck_ledger, Ledger, LedgerEntry, Provenance};
pub use extremal::{extremal, minimax_endpoint, Direction, ExtremalOptions, ExtremalResult, MinimaxResult, Template};
pub use explorer::{build_tree, local_uniqueness, propagate, replicate_to_period, Arms, NodeStatus, PropagateOptions, PropagationTrace, Replication, SideOutcome, Tree, Uniqueness};
pub use presets::Preset;
pub use regions::{
    check_inequalities, compute_endpoint, hausdorff_bound, lprime_witnesses, sample_region_members, verify_region, HausdorffBound,
    InequalityCheck, RegionBudgets, RegionReport,
};
