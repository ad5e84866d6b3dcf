//! Planar primitives, the occlusion-limited observation predicate and
//! dense-circle construction.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guard added before flooring closed-form counts so that values which land
/// on an integer are not lost to rounding in `acos`.
pub(crate) const FLOOR_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Unit vector in the same direction, or zero for the zero vector.
    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        if n > 0.0 {
            self * (1.0 / n)
        } else {
            Vec2::ZERO
        }
    }

    /// Shrinks the vector to at most `max_len`, keeping its direction.
    pub fn clamp_length(self, max_len: f64) -> Vec2 {
        let n = self.norm();
        if n > max_len && n > 0.0 {
            self * (max_len / n)
        } else {
            self
        }
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Physical and game parameters shared by every agent.
///
/// Every field has a default, so JSON overrides may name any subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    /// Inner observation radius; agents at or below this distance are not seen.
    pub s_min: f64,
    /// Outer observation radius.
    pub s_max: f64,
    /// Agent body diameter.
    pub d_r: f64,
    pub arena_width: f64,
    pub arena_height: f64,
    /// Maximum displacement per step.
    pub v_max: f64,
    /// Time bound of a game, in steps.
    pub t_max: u64,
    /// Number of unchanged steps after which a game ends in stagnation.
    pub stagnation_window: u64,
    /// Largest clique sustainable under the observation radii.
    pub max_clique_size: usize,
    /// Resolution of the sampled fence test.
    pub fence_samples: usize,
    /// Geometric tolerance.
    pub eps: f64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            s_min: 2.0,
            s_max: 6.0,
            d_r: 0.25,
            arena_width: 100.0,
            arena_height: 100.0,
            v_max: 0.5,
            t_max: 1024,
            stagnation_window: 200,
            max_clique_size: 9,
            fence_samples: 360,
            eps: 1e-9,
        }
    }
}

impl WorldConfig {
    pub fn with_radii(s_min: f64, s_max: f64, d_r: f64) -> Self {
        Self {
            s_min,
            s_max,
            d_r,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        let reals = [
            self.s_min,
            self.s_max,
            self.d_r,
            self.arena_width,
            self.arena_height,
            self.v_max,
            self.eps,
        ];
        if reals.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return bad("radii, arena size, v_max and eps must be finite and positive");
        }
        if !(self.d_r < self.s_min && self.s_min < self.s_max) {
            return bad("expected d_r < s_min < s_max");
        }
        if self.t_max < 1 || self.stagnation_window < 1 {
            return bad("t_max and stagnation_window must be at least 1");
        }
        if self.max_clique_size < 2 {
            return bad("max_clique_size must be at least 2");
        }
        if self.fence_samples < 8 {
            return bad("fence_samples must be at least 8");
        }
        Ok(())
    }

    /// Radius of an agent body.
    pub fn body_radius(&self) -> f64 {
        self.d_r / 2.0
    }
}

pub fn distance(a: Vec2, b: Vec2) -> f64 {
    (a - b).norm()
}

/// True iff the closed segment from `p` to `q` comes within `radius` of `center`.
pub fn segment_intersects_disk(p: Vec2, q: Vec2, center: Vec2, radius: f64) -> bool {
    distance_to_segment(center, p, q) <= radius
}

pub(crate) fn distance_to_segment(c: Vec2, p: Vec2, q: Vec2) -> f64 {
    let d = q - p;
    let len_sq = d.norm_sq();
    let t = if len_sq == 0.0 {
        0.0
    } else {
        ((c - p).dot(d) / len_sq).clamp(0.0, 1.0)
    };
    distance(c, p + d * t)
}

/// Distance band of the observation annulus: open at `s_min`, closed at
/// `s_max` up to `eps`.
pub fn in_observation_band(d: f64, cfg: &WorldConfig) -> bool {
    d > cfg.s_min && d <= cfg.s_max + cfg.eps
}

/// Whether `observer` sees `target`: the two centers are inside the
/// observation band and no blocker body touches the line between them.
///
/// `blockers` must not contain the observer or the target.
pub fn can_observe(observer: Vec2, target: Vec2, blockers: &[Vec2], cfg: &WorldConfig) -> bool {
    in_observation_band(distance(observer, target), cfg) && line_is_clear(observer, target, blockers.iter().copied(), cfg)
}

pub(crate) fn line_is_clear(
    from: Vec2,
    to: Vec2,
    blockers: impl IntoIterator<Item = Vec2>,
    cfg: &WorldConfig,
) -> bool {
    let r = cfg.body_radius();
    blockers
        .into_iter()
        .all(|b| !segment_intersects_disk(from, to, b, r))
}

/// Angular step between neighbours of a dense circle: the arc whose chord
/// is `2 * d_r`.
pub fn dense_arc(radius: f64, d_r: f64) -> f64 {
    (1.0 - 2.0 * d_r * d_r / (radius * radius)).acos()
}

/// Number of agents that fit densely on a circle of the given radius.
pub fn dense_circle_capacity(radius: f64, d_r: f64) -> Result<usize> {
    if !(radius.is_finite() && d_r > 0.0) || radius < d_r {
        return Err(Error::Domain(format!(
            "dense circle radius {radius} must be at least the diameter {d_r}"
        )));
    }
    Ok((2.0 * PI / dense_arc(radius, d_r) + FLOOR_GUARD).floor() as usize)
}

/// `n` points packed along the circle at chord spacing `2 * d_r`, starting at
/// angle zero. Any leftover arc appears once, between the last point and
/// the first.
pub fn dense_circle_positions(n: usize, radius: f64, center: Vec2, d_r: f64) -> Result<Vec<Vec2>> {
    let capacity = dense_circle_capacity(radius, d_r)?;
    if n == 0 || n > capacity {
        return Err(Error::Capacity {
            count: n,
            radius,
            capacity,
        });
    }
    let step = dense_arc(radius, d_r);
    Ok((0..n)
        .map(|k| center + Vec2::from_angle(k as f64 * step) * radius)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        assert_eq!(distance(Vec2::new(0.0, 0.0), Vec2::new(3.0, 4.0)), 5.0);
        assert_eq!(distance(Vec2::new(1.0, 1.0), Vec2::new(1.0, 1.0)), 0.0);
        assert_eq!(distance(Vec2::new(-1.25, 0.0), Vec2::new(1.25, 0.0)), 2.5);
    }

    #[test]
    fn segment_disk_examples() {
        let p = Vec2::new(-1.25, 0.0);
        let q = Vec2::new(1.25, 0.0);
        assert!(segment_intersects_disk(p, q, Vec2::ZERO, 0.125));
        assert!(!segment_intersects_disk(p, q, Vec2::new(0.0, -1.1), 0.125));
        assert!(segment_intersects_disk(
            Vec2::ZERO,
            Vec2::ZERO,
            Vec2::new(0.0, 0.1),
            0.2
        ));
        // beyond the endpoint the closest point is the endpoint itself
        assert!(!segment_intersects_disk(p, q, Vec2::new(1.5, 0.0), 0.2));
    }

    #[test]
    fn observation_examples() {
        let cfg = WorldConfig::default();
        assert!(can_observe(Vec2::ZERO, Vec2::new(3.0, 0.0), &[], &cfg));
        assert!(!can_observe(Vec2::ZERO, Vec2::new(1.0, 0.0), &[], &cfg));
        assert!(!can_observe(Vec2::ZERO, Vec2::new(2.0, 0.0), &[], &cfg));
        assert!(can_observe(Vec2::ZERO, Vec2::new(6.0, 0.0), &[], &cfg));
        assert!(!can_observe(Vec2::ZERO, Vec2::new(6.001, 0.0), &[], &cfg));

        let small = WorldConfig::with_radii(1.0, 3.0, 0.5);
        let a1 = Vec2::new(-1.25, 0.0);
        let a2 = Vec2::new(1.25, 0.0);
        assert!(!can_observe(a1, a2, &[Vec2::ZERO], &small));
        assert!(can_observe(a1, a2, &[Vec2::new(0.0, -1.1)], &small));
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(dense_circle_capacity(0.25, 0.25).unwrap(), 2);
        assert_eq!(dense_circle_capacity(3.0, 0.25).unwrap(), 37);
        assert_eq!(dense_circle_capacity(6.0, 0.25).unwrap(), 75);
        assert!(matches!(
            dense_circle_capacity(0.2, 0.25),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn dense_positions_two_antipodal() {
        let pts = dense_circle_positions(2, 0.25, Vec2::ZERO, 0.25).unwrap();
        assert!((pts[0] + pts[1]).norm() < 1e-12);
        assert!((distance(pts[0], pts[1]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dense_positions_full_circle_has_unit_chords() {
        let pts = dense_circle_positions(37, 3.0, Vec2::new(10.0, -4.0), 0.25).unwrap();
        assert_eq!(pts.len(), 37);
        for w in pts.windows(2) {
            assert!((distance(w[0], w[1]) - 0.5).abs() < 1e-9);
        }
        // wrap-around gap is at least one chord
        assert!(distance(pts[36], pts[0]) >= 0.5 - 1e-9);
    }

    #[test]
    fn dense_positions_partial_circle_leaves_one_gap() {
        let pts = dense_circle_positions(4, 3.0, Vec2::ZERO, 0.25).unwrap();
        let chords: Vec<f64> = (0..4).map(|k| distance(pts[k], pts[(k + 1) % 4])).collect();
        for c in &chords[..3] {
            assert!((c - 0.5).abs() < 1e-9);
        }
        let gap = 6.0 * (1.5 * dense_arc(3.0, 0.25)).sin();
        assert!((chords[3] - gap).abs() < 1e-9, "{chords:?}");
    }

    #[test]
    fn dense_positions_over_capacity() {
        assert!(matches!(
            dense_circle_positions(38, 3.0, Vec2::ZERO, 0.25),
            Err(Error::Capacity { capacity: 37, .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(WorldConfig::default().validate().is_ok());
        let mut cfg = WorldConfig::default();
        cfg.s_min = 7.0;
        assert!(cfg.validate().is_err());
        let cfg: WorldConfig = serde_json::from_str(r#"{"s_max": 4.0}"#).unwrap();
        assert_eq!(cfg.s_max, 4.0);
        assert_eq!(cfg.max_clique_size, 9);
    }
}
