//! Diophantine toolkit: X-polynomials, roots, scans and estimators.

pub mod dirichlet;
pub mod estimate;
pub mod liouville;
pub mod roots;
pub mod scan;
pub mod xpoly;

pub use dirichlet::{dirichlet_witness, DirichletWitness};
pub use estimate::{applio_consistency, type_bounds, ApplioReport, ApplioRow, TypeBounds, TypeRow};
pub use liouville::{
    liouville_approximants, liouville_check, liouville_rationals, reduced_rationals, ApproximantPairs,
    LiouvilleCheck, LiouvilleSummary,
};
pub use roots::{rational_root, roots_in_field, RootDescriptor, ROOT_RECURSION_CAP};
pub use scan::{scan, wn_scan, wstar_scan, RecordRow, RecordTable, ScanConfig, ScanKind, Witness};
pub use xpoly::{random_xpoly, xpoly_eval, xpoly_height, XPoly};
