//! Size-structured division trees: cells grow at an individual rate, divide
//! at a size-dependent hazard and split their size between two daughters.

mod config;
mod rates;
mod tree;

pub use config::{
    sample_growth_rate, GrowthLaw, HeredityKernel, RootRate, SimConfig, SplitRule, DEFAULT_CELL_CAP,
};
pub use rates::{
    lifetime, sample_daughter_size_unit_time, sample_division_size, sample_division_size_unit_time,
    DivisionMode, PowerLagShape, SizeDivisionRate,
};
pub use tree::{biomass_at, child_key, living_at, simulate_tree, CellRecord, LivingCell, TreeResult};
