//! Exact complexity oracles for promise functions.
//!
//! Three measures, each computed exactly:
//!
//! * **Deterministic query depth** — the least depth of a decision tree
//!   that answers correctly on every promise input, found by memoized
//!   minimax over restrictions ([`det_query_complexity`]). A total-function
//!   specialization ([`det_query_complexity_total`]) runs the same search
//!   over subcubes, and [`midrijanis_check`] tests it against the cubic
//!   degree bound.
//! * **Certificate complexity** — the largest, over promise inputs, of the
//!   smallest slot set that pins the function value
//!   ([`certificate_complexity`]), via branch-and-bound hitting sets.
//! * **Approximate certificate complexity** — the best certificate
//!   complexity achievable after flipping labels on an error set of
//!   weighted mass at most δ ([`approx_certificate_complexity`]), by exact
//!   enumeration of admissible error sets.
//!
//! The sensitive-block framework ([`check_framework`]) certifies lower
//! bounds on approximate certificate complexity from local combinatorial
//! data: families of disjoint label-flipping blocks with bounded overlap
//! on the zero side. [`opposite_edge_blocks`] builds the canonical family
//! for Hamiltonian-cycle promises.

mod certificate;
mod depth;
mod framework;

pub use certificate::{
    approx_certificate_complexity, approx_certificate_complexity_with_cap,
    certificate_complexity, ApproxCertificate, CertificateReport, DEFAULT_ERROR_SET_CAP,
};
pub use depth::{
    decision_tree, det_query_complexity, det_query_complexity_total,
    det_query_complexity_with_budget, midrijanis_check, DecisionTree, MidrijanisReport,
    Restriction, DEFAULT_DEPTH_NODE_BUDGET,
};
pub use framework::{
    check_framework, opposite_edge_blocks, FrameworkReport, FrameworkViolation,
    SensitiveBlockFamily,
};

#[cfg(test)]
mod tests;
