//! Effective capacity of two-user downlink NOMA and OMA with finite
//! blocklength coding over Rayleigh fading.
//!
//! * [`specfun`]: Gaussian tail, Tricomi `U`, exponential integral, quadrature.
//! * [`channel`]: link parameters and ordered Rayleigh gains.
//! * [`rates`]: normal-approximation achievable rates.
//! * [`effcap`]: effective capacity by simulation, quadrature and closed form.
//! * [`sweep`]: parameter grids, figure presets and CSV output.
//! * [`validate`]: cross-method agreement checks.

pub mod channel;
pub mod effcap;
pub mod error;
pub mod rates;
pub mod specfun;
pub mod sweep;
pub mod validate;

pub use channel::{ChannelSample, LinkConfig, OrderStatSpec};
pub use effcap::{
    ec_user, total_ec, ClosedFormOptions, EcEstimate, EcMethod, McConfig, Method, MultiUserConfig, Pairing,
    QosConfig, Scheme, UserLink, UserRole,
};
pub use error::{Error, Result};
pub use rates::{RateModel, RateSample, Service};
pub use specfun::AccuracyPolicy;
pub use sweep::{figure_preset, run_sweep, Axis, OperatingPoint, Preset, ResultRow, SweepSpec, UserSel};
pub use validate::{run_validation, ToleranceProfile, ValidationOptions, ValidationReport};
