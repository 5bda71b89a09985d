//! Maxmin reserve prices for second-price auctions with iid values when the
//! seller knows only the mean of the value distribution and either an upper
//! bound on values or an upper bound on their variance.

pub mod asymptotics;
pub mod bounded;
pub mod cli;
pub mod dist;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod simulate;
pub mod solution;
pub mod variance;

pub use dist::{expected_revenue, AuctionSetting, Constraint, Distribution, TieRule};
pub use error::{Error, Result};
pub use solution::{maxmin, MaxminSolution};
