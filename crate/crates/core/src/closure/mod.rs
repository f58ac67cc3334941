//! Closure expressions for `Cl(φ(L))` and their compilation into polynomial
//! constraint systems.

mod compile;
mod expr;

pub use compile::{
    compile, select_system, witness_check, witness_check_system, witness_for_word, ConstraintSystem,
    LeafVars, PolyMat, Witness,
};
pub use expr::{expr_for_language, expr_linear_cfg, expr_semilinear, expr_sigma_star, ClosureExpr};
