pub mod annotations;
pub mod png;
pub mod preprocess;
pub mod tensor;

pub use annotations::{
    degrees_for, degrees_to_theta, normalize_degrees, parse_annotations, parse_records, parse_scene_json,
    serialize_annotations, AnnotationRecord, SceneDocument,
};
pub use png::{decode_mask_png, encode_mask_png, render_heatmap, Colormap};
pub use preprocess::{inpaint_depth, preprocess_depth, preprocess_rgb};
pub use tensor::{read_tensor, write_tensor, HEADER_LEN, MAGIC};
