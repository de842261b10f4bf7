use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid clip: {0}")]
    InvalidClip(&'static str),
    #[error("frame dimensions {height}x{width} are not multiples of 4")]
    NotDivisible { height: usize, width: usize },
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("frame dimensions differ")]
    DimMismatch,
    #[error("frame {height}x{width} is smaller than the {window}x{window} window")]
    FrameTooSmall { height: usize, width: usize, window: usize },
    #[error("invalid configuration: {0}")]
    ConfigInvalid(&'static str),
    #[error("dataset size {0} is odd")]
    OddCount(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(&'static str),
    #[error("kernel depth {depth} exceeds input depth {input}")]
    KernelTooDeep { depth: usize, input: usize },
    #[error("pool window larger than input")]
    PoolTooLarge,
    #[error("architecture underflow: a pooled extent reaches zero")]
    ArchitectureUnderflow,
    #[error("dataset is missing a class")]
    ClassMissing,
    #[error("empty sample set")]
    EmptySet,
    #[error("loss became non-finite")]
    NonFiniteLoss,
}
