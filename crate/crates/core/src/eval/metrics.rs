use crate::error::{Error, Result};
use crate::mesh::{Mesh, NormalDomain, NormalField, VertexNormalScheme};

/// Mean and median of a sample; the median of an even-sized sample is the
/// average of the two middle values. Empty samples give `(0, 0)`.
pub fn mean_median(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len().is_multiple_of(2) {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    };
    (mean, median)
}

/// Per-face angle (degrees) between estimated and ground-truth normals,
/// over faces that are non-degenerate in both meshes. Computed as
/// `atan2(|a x b|, a . b)`, which equals `acos(a . b)` for unit vectors and
/// stays exact near 0 and 180 degrees.
pub fn normal_angles_deg(est: &Mesh, gt: &Mesh) -> Result<Vec<f64>> {
    if !est.same_topology(gt) {
        return Err(Error::TopologyMismatch);
    }
    let est_n = est.face_normals();
    let gt_n = gt.face_normals();
    Ok((0..gt.n_faces())
        .filter_map(|f| {
            let (a, b) = (est_n.get(f)?, gt_n.get(f)?);
            Some(a.cross(&b).norm().atan2(a.dot(&b)).to_degrees())
        })
        .collect())
}

/// Mean and median normal angle error in degrees.
pub fn normal_angle_error(est: &Mesh, gt: &Mesh) -> Result<(f64, f64)> {
    Ok(mean_median(&normal_angles_deg(est, gt)?))
}

/// Mean and median Euclidean distance between corresponding vertices.
pub fn vertex_position_error(est: &Mesh, gt: &Mesh) -> Result<(f64, f64)> {
    if est.n_vertices() != gt.n_vertices() {
        return Err(Error::DimensionMismatch {
            expected: gt.n_vertices(),
            found: est.n_vertices(),
        });
    }
    let d: Vec<f64> = est
        .vertices()
        .iter()
        .zip(gt.vertices())
        .map(|(a, b)| (a - b).norm())
        .collect();
    Ok(mean_median(&d))
}

/// Per-face reference for flip detection when no ground truth exists: the
/// normalized average of the face's angle-weighted vertex normals.
pub fn reference_face_normals(mesh: &Mesh) -> NormalField {
    let vn = mesh.vertex_normals(VertexNormalScheme::AngleWeighted);
    let mut values = Vec::with_capacity(mesh.n_faces());
    let mut valid = Vec::with_capacity(mesh.n_faces());
    for face in mesh.faces() {
        let sum = face.iter().filter_map(|&v| vn.get(v)).sum::<crate::mesh::Vec3>();
        let norm = sum.norm();
        if norm > 1e-12 {
            values.push(sum / norm);
            valid.push(true);
        } else {
            values.push(crate::mesh::Vec3::zeros());
            valid.push(false);
        }
    }
    NormalField::with_flags(NormalDomain::Face, values, valid).expect("lengths match")
}

/// Number of non-degenerate faces whose normal points away from the
/// reference (`n . ref < 0`). Flagged reference entries are skipped.
pub fn count_flipped_faces(mesh: &Mesh, reference: &NormalField) -> Result<usize> {
    if reference.domain() != NormalDomain::Face {
        return Err(Error::invalid("reference", "expected a per-face field"));
    }
    if reference.len() != mesh.n_faces() {
        return Err(Error::DimensionMismatch {
            expected: mesh.n_faces(),
            found: reference.len(),
        });
    }
    let normals = mesh.face_normals();
    Ok((0..mesh.n_faces())
        .filter(|&f| match (normals.get(f), reference.get(f)) {
            (Some(n), Some(r)) => n.dot(&r) < 0.0,
            _ => false,
        })
        .count())
}

/// Histogram of all `3 N_F` corner angles. Degenerate faces contribute
/// `{0, 0, 180}` and are listed in `degenerate_faces`.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerAngleHistogram {
    pub bin_width_deg: f64,
    pub counts: Vec<usize>,
    pub degenerate_faces: Vec<usize>,
}

impl CornerAngleHistogram {
    pub fn lower_edges(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|k| k as f64 * self.bin_width_deg).collect()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

fn bin_of(deg: f64, width: f64, n_bins: usize) -> usize {
    (((deg + 1e-9) / width).floor().max(0.0) as usize).min(n_bins - 1)
}

/// Bins corner angles into `180 / bin_width_deg` bins `[k w, (k + 1) w)`;
/// the last bin also holds 180.
pub fn corner_angle_histogram(mesh: &Mesh, bin_width_deg: f64) -> Result<CornerAngleHistogram> {
    let n_bins = 180.0 / bin_width_deg;
    if bin_width_deg.is_nan() || bin_width_deg <= 0.0 || (n_bins - n_bins.round()).abs() > 1e-9 {
        return Err(Error::invalid("bin_width", "must divide 180 degrees"));
    }
    let n_bins = n_bins.round() as usize;
    let mut counts = vec![0; n_bins];
    let mut degenerate_faces = Vec::new();
    for f in 0..mesh.n_faces() {
        if mesh.is_degenerate(f) {
            degenerate_faces.push(f);
        }
        for angle in mesh.corner_angles(f) {
            counts[bin_of(angle.to_degrees(), bin_width_deg, n_bins)] += 1;
        }
    }
    Ok(CornerAngleHistogram {
        bin_width_deg,
        counts,
        degenerate_faces,
    })
}

/// Fraction of corner angles below `low_deg` or above `high_deg`.
pub fn extreme_angle_fraction(mesh: &Mesh, low_deg: f64, high_deg: f64) -> f64 {
    let total = 3 * mesh.n_faces();
    let extreme = (0..mesh.n_faces())
        .flat_map(|f| mesh.corner_angles(f))
        .map(f64::to_degrees)
        .filter(|&a| a < low_deg || a > high_deg)
        .count();
    extreme as f64 / total as f64
}

/// Error metrics of an estimate against ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub mean_ne_deg: f64,
    pub median_ne_deg: f64,
    pub mean_vpe: f64,
    pub median_vpe: f64,
    pub flipped_face_count: usize,
    pub corner_angle_histogram: CornerAngleHistogram,
}

impl MetricsReport {
    /// Flat key/value pairs in a fixed order.
    pub fn key_values(&self) -> Vec<(&'static str, String)> {
        vec![
            ("mean_NE_deg", self.mean_ne_deg.to_string()),
            ("median_NE_deg", self.median_ne_deg.to_string()),
            ("mean_VPE", self.mean_vpe.to_string()),
            ("median_VPE", self.median_vpe.to_string()),
            ("flipped_face_count", self.flipped_face_count.to_string()),
        ]
    }
}

/// All metrics of `est` against `gt`; flips are counted against the ground
/// truth face normals.
pub fn evaluate(est: &Mesh, gt: &Mesh, bin_width_deg: f64) -> Result<MetricsReport> {
    let (mean_ne_deg, median_ne_deg) = normal_angle_error(est, gt)?;
    let (mean_vpe, median_vpe) = vertex_position_error(est, gt)?;
    Ok(MetricsReport {
        mean_ne_deg,
        median_ne_deg,
        mean_vpe,
        median_vpe,
        flipped_face_count: count_flipped_faces(est, &gt.face_normals())?,
        corner_angle_histogram: corner_angle_histogram(est, bin_width_deg)?,
    })
}
