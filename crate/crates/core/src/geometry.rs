//! Axis-aligned boxes and the basic distance kernels used by every relation.

use alloc::format;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or displacement in meters, ordered `[x, y, z]`.
pub type Vec3 = [f64; 3];

pub(crate) fn norm(v: Vec3) -> f64 {
    libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
}

pub(crate) fn distance(a: Vec3, b: Vec3) -> f64 {
    norm([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

/// Axis-aligned bounding box in meters.
///
/// `min[k] <= max[k]` on every axis and all coordinates are finite. Use
/// [`Aabb::new`] to get a checked box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Result<Self> {
        let b = Aabb { min, max };
        b.validate()?;
        Ok(b)
    }

    /// Box of the given full extents centered on `center`.
    pub fn from_center(center: Vec3, size: Vec3) -> Self {
        let h = [size[0] / 2.0, size[1] / 2.0, size[2] / 2.0];
        Aabb {
            min: [center[0] - h[0], center[1] - h[1], center[2] - h[2]],
            max: [center[0] + h[0], center[1] + h[1], center[2] + h[2]],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for k in 0..3 {
            if !self.min[k].is_finite() || !self.max[k].is_finite() {
                return Err(Error::InvalidBox(format!(
                    "non-finite coordinate on axis {k}"
                )));
            }
            if self.min[k] > self.max[k] {
                return Err(Error::InvalidBox(format!(
                    "min {} > max {} on axis {k}",
                    self.min[k], self.max[k]
                )));
            }
        }
        Ok(())
    }

    pub fn center(&self) -> Vec3 {
        [
            (self.min[0] + self.max[0]) / 2.0,
            (self.min[1] + self.max[1]) / 2.0,
            (self.min[2] + self.max[2]) / 2.0,
        ]
    }

    pub fn size(&self) -> Vec3 {
        [
            self.max[0] - self.min[0],
            self.max[1] - self.min[1],
            self.max[2] - self.min[2],
        ]
    }

    pub fn translated(&self, d: Vec3) -> Self {
        Aabb {
            min: [self.min[0] + d[0], self.min[1] + d[1], self.min[2] + d[2]],
            max: [self.max[0] + d[0], self.max[1] + d[1], self.max[2] + d[2]],
        }
    }

    /// Mirror the y axis (world-up <-> image-style down).
    pub fn flip_y(&self) -> Self {
        Aabb {
            min: [self.min[0], -self.max[1], self.min[2]],
            max: [self.max[0], -self.min[1], self.max[2]],
        }
    }

    /// Per-axis separation; zero on axes where the projections overlap or touch.
    pub fn face_gaps(&self, other: &Aabb) -> Vec3 {
        let mut g = [0.0; 3];
        for (k, gk) in g.iter_mut().enumerate() {
            let d = (self.min[k] - other.max[k]).max(other.min[k] - self.max[k]);
            *gk = d.max(0.0);
        }
        g
    }

    /// Euclidean distance between the closest points of the two boxes.
    pub fn separation(&self, other: &Aabb) -> f64 {
        norm(self.face_gaps(other))
    }

    /// True when `other` lies within `self` (boundaries included).
    pub fn contains(&self, other: &Aabb) -> bool {
        (0..3).all(|k| self.min[k] <= other.min[k] && other.max[k] <= self.max[k])
    }

    /// Length of the overlap of the projections on axis `k` (0 if disjoint).
    pub fn overlap_len(&self, other: &Aabb, k: usize) -> f64 {
        (self.max[k].min(other.max[k]) - self.min[k].max(other.min[k])).max(0.0)
    }

    /// True when the projections on axis `k` are strictly disjoint.
    pub fn disjoint_on(&self, other: &Aabb, k: usize) -> bool {
        self.min[k] > other.max[k] || self.max[k] < other.min[k]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AabbMetrics {
    pub center_a: Vec3,
    pub center_b: Vec3,
    pub center_distance: f64,
    pub face_gap: Vec3,
}

pub fn aabb_metrics(a: &Aabb, b: &Aabb) -> AabbMetrics {
    let center_a = a.center();
    let center_b = b.center();
    AabbMetrics {
        center_a,
        center_b,
        center_distance: distance(center_a, center_b),
        face_gap: a.face_gaps(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_at(c: Vec3) -> Aabb {
        Aabb::from_center(c, [1.0, 1.0, 1.0])
    }

    #[test]
    fn identical_boxes_have_zero_metrics() {
        let a = unit_at([0.0, 0.0, 0.0]);
        let m = aabb_metrics(&a, &a);
        assert_eq!(m.center_distance, 0.0);
        assert_eq!(m.face_gap, [0.0; 3]);
    }

    #[test]
    fn three_four_five() {
        let m = aabb_metrics(&unit_at([0.0, 0.0, 0.0]), &unit_at([3.0, 4.0, 0.0]));
        assert_eq!(m.center_distance, 5.0);
    }

    #[test]
    fn axis_separation() {
        let a = Aabb::new([0.0; 3], [1.0; 3]).unwrap();
        let b = Aabb::new([2.0, 0.0, 0.0], [3.0, 1.0, 1.0]).unwrap();
        assert_eq!(aabb_metrics(&a, &b).face_gap, [1.0, 0.0, 0.0]);
        assert_eq!(aabb_metrics(&b, &a).face_gap, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_inverted_and_non_finite() {
        assert!(Aabb::new([1.0, 0.0, 0.0], [0.0, 1.0, 1.0]).is_err());
        assert!(Aabb::new([f64::NAN, 0.0, 0.0], [1.0, 1.0, 1.0]).is_err());
        assert!(Aabb::new([0.0; 3], [f64::INFINITY, 1.0, 1.0]).is_err());
    }

    #[test]
    fn flip_y_is_an_involution() {
        let a = Aabb::new([0.0, 0.2, 0.0], [1.0, 0.7, 1.0]).unwrap();
        assert_eq!(
            a.flip_y(),
            Aabb::new([0.0, -0.7, 0.0], [1.0, -0.2, 1.0]).unwrap()
        );
        assert_eq!(a.flip_y().flip_y(), a);
    }
}
