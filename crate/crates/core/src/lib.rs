// `!(x > y)` guards deliberately reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dark;
pub mod error;
pub mod experiment;
pub mod model;
pub mod ode;
pub mod pulse;
pub mod reduction;
pub mod series;
pub mod spectral;

pub use error::{Error, Result};
pub use experiment::{preset, simulate, ScenarioConfig};
pub use model::{System, Variant};
pub use pulse::PulseSchedule;
pub use reduction::ReductionLevel;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/pulses.md")]
    mod pulses {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/reduction.md")]
    mod reduction {}
    #[doc = include_str!("../../../book/src/runner.md")]
    mod runner {}
}
