//! Exact big-integer, exact rational and extended-range log-domain
//! arithmetic for tower-sized quantities.

pub mod extreal;
pub mod magnitude;
pub mod tower;

pub use extreal::{ln2, ln_u64, log_sum_accumulate, ExtReal, MIN_PRECISION};
pub use magnitude::{
    floor_drop_error_ln, floor_mul, mag_mul, mag_pow, mag_sub_exponent, ArithCtx, Magnitude,
};
pub use tower::TowerReal;
