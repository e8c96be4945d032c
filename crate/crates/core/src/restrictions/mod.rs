//! Random restrictions, generalized restrictions and their distributions.

mod conditional;
mod generalized;
mod grr;
mod increment;
mod pairing;
mod plain;
mod stability;
mod uniformize;

pub use conditional::{conditional_grr, conditional_grr_property_check, ConditionalCheck, ConditionalEntry, ConditionalGrr};
pub use generalized::{apply_generalized, compose, GeneralizedRestriction, EVENT_CAP};
pub use grr::{grr_distribution_error, GeneralizedRandomRestriction};
pub use increment::{
    expected_squared_mean, increment_grr, increment_grr_with, IncrementConfig, IncrementReport, IncrementState,
    INCREMENT_CAP,
};
pub use pairing::{pairing_error_exact, pairing_error_mc, pairing_grr};
pub use plain::{apply_restriction, merge_coordinates, sample_p_random_restriction, Restriction};
pub use stability::{
    random_restriction_degree_schedule, restriction_stability_identity_check, restriction_stability_identity_exact,
    ScheduleEstimate, IDENTITY_CAP,
};
pub use uniformize::{uniformize, uniformize_with, IterationRecord, UniformizeConfig, UniformizeReport};
