//! Shared inputs for the benchmarks.

use tnum_core::{Field, MahlerSpec};

/// ξ(r, m) with r = p and m_j = 2 for j ≥ 1.
pub fn uniform_spec(p: u64) -> MahlerSpec {
    let f = Field::prime(p).expect("prime");
    MahlerSpec::uniform(&f, 1, 2).expect("valid spec")
}
