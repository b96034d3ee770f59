//! Input formats and syntactic transformations.

pub mod dimacs;
pub mod dnf;
pub mod formula;
pub mod tseytin;

pub use dimacs::{cnf_to_func, parse_dimacs, CnfDocument, DimacsError};
pub use dnf::{canonical_dnf, jw_value, x_orthogonalize, Dnf, Lit};
pub use formula::{formula_to_func, parse_formula, parse_formula_with, Formula, FormulaError, VarMap};
pub use tseytin::{tseytin, TseytinEncoder};
