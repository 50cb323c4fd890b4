//! Noise synthesis, experiment fixtures and error metrics.

pub mod fixtures;
mod metrics;
mod noise;

pub use metrics::{
    corner_angle_histogram, count_flipped_faces, evaluate, extreme_angle_fraction, mean_median,
    normal_angle_error, normal_angles_deg, reference_face_normals, vertex_position_error,
    CornerAngleHistogram, MetricsReport,
};
pub use noise::add_gaussian_noise;
