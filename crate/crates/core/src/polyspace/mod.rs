//! Exact multihomogeneous polynomials in the image variables
//! `u_{i0..2}, v_{i0..2}` and the linear algebra of their spans.

mod counts;
mod expand;
mod poly;
mod ring;
mod span;

pub use counts::{conjecture_generator_count, sextic_total, ClassCount, DegreeClassCount};
pub use expand::{
    expand_bilinear_symbolic, expand_octic_symbolic, expand_wedge5_symbolic, ideal_component_basis,
    poly_det, OcticExpander,
};
pub use poly::{
    monomial_basis, var_index, Monomial, MultiDegree, MultiHomogPoly, Side, MAX_CAMERAS,
};
pub use ring::{is_prime, random_prime, CoeffRing, PrimeField, RationalField};
pub use span::{
    coefficient_rows, span_dimension, span_dimension_rational, span_facts, Modulus, SpanFacts,
    SpanReport, EXPECTED_OCTIC_SPAN, EXPECTED_QUOTIENT,
};
