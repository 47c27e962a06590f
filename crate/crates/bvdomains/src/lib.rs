//! Boolean-valued domain theory over finite complete Boolean algebras,
//! an interpreter for untyped λ-calculus in the graph model on 𝒫(E), and
//! random-variable semantics over finite coin-flip spaces, culminating in a
//! desk-scale construction of many-one-incomparable oracle prefixes.

pub mod algebra;
pub mod bvset;
pub mod delta0;
pub mod lambda;
pub mod engeler;
pub mod setoid;
