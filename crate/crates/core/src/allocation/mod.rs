//! Power allocation: per-user water-filling and max-min fairness across users.

mod bounds;
mod mmf;
mod waterfill;

pub use bounds::{
    equal_gain_mmf, mmf_massive_mimo, zf_mmf_bounds, zf_rate_bounds_per_user, EqualGainMmf,
    ServedUser,
};
pub use mmf::{mmf_bd_mrc, mmf_brackets, MmfSolution};
pub use waterfill::{waterfill, UserRateFunction, Waterfill};
