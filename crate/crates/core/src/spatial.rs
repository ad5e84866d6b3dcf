use std::collections::HashMap;

use crate::geometry::Vec2;

/// Uniform bucket grid over a fixed set of points.
pub(crate) struct SpatialIndex {
    points: Vec<Vec2>,
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl SpatialIndex {
    pub(crate) fn new(points: &[Vec2], cell: f64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(key(*p, cell)).or_default().push(i);
        }
        Self {
            points: points.to_vec(),
            cell,
            buckets,
        }
    }

    /// Indices of all points within `radius` of `center`, ascending.
    pub(crate) fn within(&self, center: Vec2, radius: f64) -> Vec<usize> {
        let span = (radius / self.cell).ceil() as i64;
        let (cx, cy) = key(center, self.cell);
        let r_sq = radius * radius;
        let mut out = Vec::new();
        for gx in cx - span..=cx + span {
            for gy in cy - span..=cy + span {
                if let Some(bucket) = self.buckets.get(&(gx, gy)) {
                    out.extend(
                        bucket
                            .iter()
                            .copied()
                            .filter(|&i| (self.points[i] - center).norm_sq() <= r_sq),
                    );
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn key(p: Vec2, cell: f64) -> (i64, i64) {
    ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
}
