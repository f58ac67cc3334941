//! Emptiness of the intersection of a language with the cut-point language
//! of a measure-once quantum finite automaton over rational orthogonal
//! matrices.

pub mod alphademo;
pub mod closure;
pub mod decide;
pub mod error;
pub mod lang;
pub mod poly;
pub mod qfa;
pub mod ratmat;
pub mod realalg;

pub use closure::{ClosureExpr, ConstraintSystem, Witness};
pub use decide::{decide_intersection, Certificate, DecideConfig, Verdict, VerdictKind};
pub use error::{Error, Result};
pub use lang::{LanguageSpec, LinearComponent, LinearGrammar, Rule, SemilinearLanguage};
pub use poly::Poly;
pub use qfa::QuantumAutomaton;
pub use ratmat::{QMat, QVec, Rat};
