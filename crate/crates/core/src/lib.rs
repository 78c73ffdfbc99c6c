//! Exact ε-subdifferential geometry for max-affine convex functions, and
//! Lipschitz/constancy certification for their differences.
//!
//! The toolkit works with finite maxima of affine pieces on R^n. For such a
//! function every ε-subdifferential at a point is a polytope with an exact
//! implicit description (a simplex of piece multipliers cut by one
//! halfspace), so set-level questions reduce to small dense linear
//! programs: support values, vertices, pairwise distance, Minkowski-sum
//! inclusion, Hausdorff distance. On top of those primitives, [`certify`] evaluates
//! the subdifferential conditions that characterize when a difference of two
//! such functions is Lipschitz (or constant), produces per-point verdicts
//! with machine-checkable witnesses, and builds segment-chain certificates
//! for variation lower bounds. [`oracle`] provides independent ground truth:
//! an exact Lipschitz constant from coincidence-cell enumeration, sampled
//! difference quotients, and definitional membership checks.

pub mod certify;
pub mod error;
pub mod funcrep;
pub mod geometry;
pub mod lp;
pub mod oracle;
pub mod subdiff;

pub use certify::{
    chain_certificate, certify_lipschitz, certify_lipschitz_exact, check_condition,
    check_constancy, check_exact_subdiff, check_global_min, min_lipschitz, CertReport,
    ChainCertificate, ChainTriple, CheckResult, Condition, ConstancyResult, ModulusSpec,
    Refutation, SubdiffComparison, Verdict,
};
pub use error::{Error, Result};
pub use funcrep::{
    maxaffine_json, parse_maxaffine, parse_pointset, pointset_json, validate_modulus, MaxAffine,
    Piece, PointSet,
};
pub use geometry::{distance, hausdorff, included_in_sum, intersects, DualBallSpec, Inclusion,
    ModulusSet, Norm};
pub use lp::{LpBuilder, LpProblem, LpSolution, LpStatus};
pub use oracle::{
    coincidence_cells, definitional_membership, lipschitz_exact, lipschitz_sampled,
    random_instance, CellWitness, Lcg64,
};
pub use subdiff::{eps_subdiff, exact_subdiff, SubdiffPolytope};
