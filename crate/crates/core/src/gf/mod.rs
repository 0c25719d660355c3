//! Height-indexed polynomial recursions and the growth constants they
//! determine.
//!
//! A recursion `F_h = f(F_{h-1}, ..., F_{h-c})` with non-negative
//! coefficients has a fixed point `C = f(C, ..., C)`. The positive roots
//! `alpha_h` of `F_h(z) = C` converge to the growth constant of the counted
//! family; maxima and minima over consecutive windows of `c` heights give
//! upper and lower brackets.
//!
//! Building `F_h` explicitly is only practical for small `h` (the degree
//! roughly doubles per step), so roots are found by evaluating the
//! recursion pointwise in high-precision fixed point. [`Poly`] and
//! [`RecursionSpec::iterate`] cover the exact small cases.

mod growth;
mod poly;
mod real;
mod spec;

pub use growth::{
    alpha_h, convergence_table, count_exact, count_exact_with, fixed_point, growth_bracket, growth_bracket_unchecked,
    AlphaRow, GrowthReport, DEFAULT_H_MAX, DEFAULT_TOL,
};
pub use poly::{Poly, MAX_TERMS};
pub use real::{Fixed, Interval, PREC};
pub use spec::{Dependence, Monomial, RecursionSpec};
