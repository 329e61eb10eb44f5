/// Resource caps shared by the constructions, scans and checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budgets {
    /// Largest horizon adaptive refinement may reach.
    pub horizon_cap: u64,
    /// Largest dense exponent (polynomial degree, window length) to allocate.
    pub exponent_budget: u64,
    /// Largest number of candidates a scan may enumerate.
    pub enumeration_budget: u64,
    /// Number of horizon doublings before giving up on a `Below` value.
    pub refinement_cap: u32,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            horizon_cap: 1 << 20,
            exponent_budget: 1 << 24,
            enumeration_budget: 1 << 24,
            refinement_cap: 4,
        }
    }
}
