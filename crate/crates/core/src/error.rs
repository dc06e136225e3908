use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grasp rectangle: {0}")]
    InvalidRectangle(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("scene `{0}` has no grasp annotations")]
    EmptyAnnotations(String),

    #[error("scene `{scene}`: grasp {index} centre ({cx}, {cy}) lies outside the {cols}x{rows} image")]
    GraspOutsideImage {
        scene: String,
        index: usize,
        cx: f64,
        cy: f64,
        rows: usize,
        cols: usize,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("angle undefined: both cos and sin components are zero")]
    UndefinedAngle,

    #[error("no grasp: quality map is zero everywhere")]
    NoGrasp,

    #[error("ground-truth grasp list is empty")]
    EmptyGroundTruth,

    #[error("missing prediction for scene `{0}`")]
    MissingPrediction(String),

    #[error("missing occupancy mask for scene `{0}`")]
    MissingMask(String),

    #[error("duplicate scene id `{0}`")]
    DuplicateScene(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("tensor: {0}")]
    Tensor(String),

    #[error("depth image has no valid pixels")]
    DepthAllInvalid,

    #[error("image: {0}")]
    Image(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the caller's input rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
