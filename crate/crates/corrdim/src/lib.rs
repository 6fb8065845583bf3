//! Lower bounds on the local Hilbert-space dimension needed to generate a
//! two-party correlation.
//!
//! Given a table p(ab|xy) of conditional outcome probabilities, this crate
//! computes two easy-to-evaluate quantities `f1` and `f2` that bound from
//! below the dimension of the local systems in *any* quantum realization of
//! the table — infinite when no finite dimension suffices. Around that core
//! sit generators for the canonical tables the bounds are sharp on, a small
//! complex-Hermitian linear-algebra layer for building and verifying quantum
//! representations, a numerical audit that replays the bound's derivation
//! on a concrete representation, and a closely related fidelity bound on the
//! PSD-rank of an arbitrary nonnegative matrix.
//!
//! # Layout
//! - [`corr`] — validated correlation tables, marginals, signaling checks,
//!   JSON serialization.
//! - [`generators`] — canonical tables plus deterministic / mixture /
//!   product combinators.
//! - [`bounds`] — `f1`, `f2`, the integer dimension bound, and a
//!   perturbation-robustness scan.
//! - [`quantum`] — states, POVMs, representation evaluation, verification,
//!   and the derivation audit.
//! - [`psdrank`] — the fidelity lower bound on PSD-rank of a nonnegative
//!   matrix.
//! - [`tol`] — the numerical tolerances shared across modules.

pub mod bounds;
pub mod corr;
pub mod generators;
pub mod psdrank;
pub mod quantum;
pub mod tol;
