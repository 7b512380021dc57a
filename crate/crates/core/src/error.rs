use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid time series: {0}")]
    InvalidSeries(String),

    #[error("non-finite sample in channel {channel} at t={index}")]
    NonFinite { channel: usize, index: usize },

    #[error("invalid frequency band [{lo}, {hi}) Hz: {reason}")]
    InvalidBand { lo: f64, hi: f64, reason: String },

    #[error("band [{lo}, {hi}) Hz contains no Fourier frequency")]
    EmptyBand { lo: f64, hi: f64 },

    #[error("invalid smoothing kernel: {0}")]
    InvalidKernel(String),

    #[error("smoothing span {span} too large for {bins} Fourier frequencies")]
    SpanTooLarge { span: usize, bins: usize },

    #[error("zero auto-spectrum for channel {channel} at {freq} Hz")]
    ZeroAutoSpectrum { channel: usize, freq: f64 },

    #[error("expected a {expected} field, got {actual}")]
    WrongFieldKind { expected: &'static str, actual: &'static str },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    Asymmetric(f64),

    #[error("invalid cluster pair: {0}")]
    InvalidPair(String),

    #[error("Lp exponent must be 1 or 2, got {0}")]
    InvalidExponent(u32),

    #[error("singular {block} block (normalized determinant {det:e})")]
    SingularBlock { block: &'static str, det: f64 },

    #[error("need at least {needed} channels, got {got}")]
    TooFewChannels { needed: usize, got: usize },

    #[error("k = {k} out of range 1..={n}")]
    KOutOfRange { k: usize, n: usize },

    #[error("inconsistent sizes: {0}")]
    SizeMismatch(String),

    #[error("unknown {what}: {name}")]
    Unknown { what: &'static str, name: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },

    #[error("malformed spectral field container: {0}")]
    Container(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
