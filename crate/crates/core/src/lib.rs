//! gaussgrasp: ground-truth grasp maps and grasp evaluation for planar
//! antipodal grasping.
//!
//! - [`geometry`]: oriented grasp rectangles, rasterisation, exact IoU
//! - [`ground_truth`]: binary, soft and strong quality maps with angle bins
//! - [`extraction`]: argmax decoding of predicted map stacks
//! - [`loss`]: MSE / smooth-L1 network losses, positional weighting, gradients
//! - [`metrics`]: rectangle-metric evaluation and reports
//! - [`oracle`]: planar jaw collision / miss checker on occupancy masks
//! - [`io`]: annotation text, GMAP1 tensors, PNG, input preprocessing
//! - [`synth`]: seeded synthetic scenes

pub mod error;
pub mod extraction;
pub mod geometry;
pub mod ground_truth;
pub mod io;
pub mod loss;
pub mod metrics;
pub mod oracle;
pub mod raster;
pub mod stack;
pub mod synth;

pub use error::{Error, Result};
pub use extraction::{decode_angle, extract_grasp, extract_top_k, DecodedGrasp};
pub use geometry::{
    angle_offset, center_third, normalize_angle, rasterize_center_third, rect_corners, rect_iou, GraspRectangle,
    PixelMask, Point,
};
pub use ground_truth::{
    assign_bin, encode_angle, generate_maps, pixel_quality, support, GraspScene, MapGenConfig, MapMode, SoftRule,
};
pub use loss::{
    channel_loss, loss_gradient, positional_loss, total_loss, LossBreakdown, LossConfig, LossKind, Reduction,
};
pub use metrics::{evaluate_dataset, grasp_success, scene_best_iou, EvalReport};
pub use oracle::{check_grasp, sgt_proxy_rate, GraspOutcome, GripperParams};
pub use raster::Raster;
pub use stack::{Channel, GraspMapStack};
