//! Direction nets, sector and Littlewood-Paley multipliers, tube majorants.

mod multipliers;
mod net;
mod tube;

pub use multipliers::{
    apply_lp, apply_pm, apply_sector, overlap_count, LpFamily, LpOperator, SectorMultiplier, WidthPower,
};
pub use net::{sphere_candidates, DirectionNet, MAX_NET_SIZE};
pub use tube::{in_tube, tube_dimensions, tube_l1_estimate, tube_majorant};
