use thiserror::Error;

/// Errors raised while assembling or validating a run configuration.
///
/// All configuration problems surface before round 0; the round loop itself
/// never errors (node death is a state transition, not a failure).
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("scenario must be 1..5, got {0}")]
    UnknownScenario(u8),

    #[error("unknown protocol `{0}` (expected `dare` or `baseline-direct`)")]
    UnknownProtocol(String),

    #[error("rounds must be > 0")]
    ZeroRounds,

    #[error("no sinks configured")]
    NoSinks,

    #[error("run manifest is empty")]
    EmptyManifest,

    #[error("path-loss exponent {0} not present in the amplifier table")]
    UnknownExponent(f64),

    #[error("threshold band for {kind} must satisfy low < high (got {low} >= {high})")]
    InvalidBand { kind: String, low: f64, high: f64 },

    #[error("threshold band supplied for continuous sensor kind {0}")]
    UnexpectedBand(String),

    #[error("threshold band missing for sensor kind {0}")]
    MissingBand(String),

    #[error("sink speed must be > 0, got {0}")]
    InvalidSpeed(f64),

    #[error("node position ({x}, {y}) lies outside the 40 x 20 ft ward")]
    OutOfWard { x: f64, y: f64 },

    #[error("radio energy constants must be strictly positive")]
    NonPositiveEnergy,

    #[error("packet size must be > 0 bits")]
    ZeroPacketBits,

    #[error("layout must define exactly 8 bed anchors, got {0}")]
    BadBedCount(usize),

    #[error("layout must define exactly 7 body-sensor offsets, got {0}")]
    BadOffsetCount(usize),

    #[error("internal consistency: packets received ({received}) exceed packets sent ({sent})")]
    ReceivedExceedsSent { received: u64, sent: u64 },

    #[error("failed to read config file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("failed to parse config file {path}: {message}")]
    Parse { path: String, message: String },
}
