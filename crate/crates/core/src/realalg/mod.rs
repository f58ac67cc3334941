//! Exact real-algebraic tools: Gröbner bases, Sturm sequences and interval
//! branch-and-bound.

pub mod groebner;
pub mod interval;
pub mod sturm;

pub use groebner::{buchberger, eliminate, elimination_basis, GroebnerBasis, GroebnerBudget, MonomialOrder};
pub use interval::{bb_sup_bound, interval_eval, BbBudget, BbStatus, IntBox, Interval, SupBound};
pub use sturm::{count_real_roots, max_real_root_leq, refine_root, sturm_isolate, UniPoly};
