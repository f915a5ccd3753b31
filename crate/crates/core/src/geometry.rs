//! Tracked-space world model.
//!
//! The physical room is an axis-aligned rectangle centered on the origin.
//! Obstacles are axis-aligned squares (cubes seen from above) that lie fully
//! inside the room. The walking agent is a point.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of proximity rays around the user.
pub const RAY_COUNT: usize = 60;
/// Angular spacing between proximity rays (6 degrees).
pub const RAY_SPACING: f64 = 2.0 * PI / RAY_COUNT as f64;
/// Placement attempts per obstacle before it is dropped for the epoch.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 1000;

pub const DEFAULT_HALF_EXTENT: f64 = 7.5;
pub const DEFAULT_OBSTACLE_HALF_SIDE: f64 = 1.25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("query point ({x:.4}, {y:.4}) is not in free space")]
    OutsideFreeSpace { x: f64, y: f64 },
    #[error("invalid tracked space: {0}")]
    InvalidSpace(String),
}

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

    /// Unit vector at `angle` radians, counterclockwise from +x.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { x: c, y: s }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn length(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (other - self).length()
    }

    /// Bearing of the vector, in (−π, π].
    pub fn angle(self) -> f64 {
        wrap_angle(self.y.atan2(self.x))
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Renormalize an angle into (−π, π].
pub fn wrap_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    // rem_euclid can round up to exactly 2π for tiny negative inputs.
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Position plus heading. The heading is kept in (−π, π].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec2,
    heading: f64,
}

impl Pose {
    pub fn new(position: Vec2, heading: f64) -> Self {
        Self {
            position,
            heading: wrap_angle(heading),
        }
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    pub fn set_heading(&mut self, heading: f64) {
        self.heading = wrap_angle(heading);
    }

    /// Rotate counterclockwise by `delta` radians.
    pub fn rotate(&mut self, delta: f64) {
        self.heading = wrap_angle(self.heading + delta);
    }

    pub fn forward(&self) -> Vec2 {
        Vec2::from_angle(self.heading)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub center: Vec2,
    #[serde(default = "default_half_side")]
    pub half_side: f64,
}

fn default_half_side() -> f64 {
    DEFAULT_OBSTACLE_HALF_SIDE
}

impl Obstacle {
    pub fn new(center: Vec2, half_side: f64) -> Self {
        Self { center, half_side }
    }

    /// Closed-square containment with the footprint inflated by `margin`.
    fn covers(&self, p: Vec2, margin: f64) -> bool {
        let h = self.half_side + margin;
        (p.x - self.center.x).abs() <= h && (p.y - self.center.y).abs() <= h
    }

    /// Entry parameter of the ray `origin + t * dir` into the (inflated)
    /// square, restricted to `t` in `[0, t_max]`.
    fn ray_entry(&self, origin: Vec2, dir: Vec2, margin: f64, t_max: f64) -> Option<f64> {
        let h = self.half_side + margin;
        let mut t_lo = 0.0_f64;
        let mut t_hi = t_max;
        for (o, d, c) in [
            (origin.x, dir.x, self.center.x),
            (origin.y, dir.y, self.center.y),
        ] {
            let (lo, hi) = (c - h, c + h);
            if d == 0.0 {
                if o < lo || o > hi {
                    return None;
                }
                continue;
            }
            let (mut t0, mut t1) = ((lo - o) / d, (hi - o) / d);
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_lo = t_lo.max(t0);
            t_hi = t_hi.min(t1);
            if t_lo > t_hi {
                return None;
            }
        }
        Some(t_lo)
    }
}

/// The physical room plus its current obstacle layout.
///
/// Immutable during an epoch; [`TrackedSpace::reposition_obstacles`] returns
/// a fresh value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackedSpace {
    half_width: f64,
    half_depth: f64,
    obstacles: Vec<Obstacle>,
    /// Inflation applied to obstacles (and deflation of the boundary) for
    /// collision tests only. Ray casting uses the true geometry.
    safety_margin: f64,
}

impl Default for TrackedSpace {
    fn default() -> Self {
        Self::empty(DEFAULT_HALF_EXTENT, DEFAULT_HALF_EXTENT).expect("default room is valid")
    }
}

impl TrackedSpace {
    pub fn empty(half_width: f64, half_depth: f64) -> Result<Self, GeometryError> {
        Self::new(half_width, half_depth, Vec::new())
    }

    pub fn new(
        half_width: f64,
        half_depth: f64,
        obstacles: Vec<Obstacle>,
    ) -> Result<Self, GeometryError> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(GeometryError::InvalidSpace(format!(
                "half_width must be positive, got {half_width}"
            )));
        }
        if !(half_depth > 0.0 && half_depth.is_finite()) {
            return Err(GeometryError::InvalidSpace(format!(
                "half_depth must be positive, got {half_depth}"
            )));
        }
        let space = Self {
            half_width,
            half_depth,
            obstacles: Vec::new(),
            safety_margin: 0.0,
        };
        for ob in &obstacles {
            space.check_obstacle(ob)?;
        }
        Ok(Self { obstacles, ..space })
    }

    pub fn with_safety_margin(mut self, margin: f64) -> Result<Self, GeometryError> {
        if !(margin >= 0.0 && margin < self.half_width.min(self.half_depth)) {
            return Err(GeometryError::InvalidSpace(format!(
                "safety margin {margin} out of range"
            )));
        }
        self.safety_margin = margin;
        Ok(self)
    }

    fn check_obstacle(&self, ob: &Obstacle) -> Result<(), GeometryError> {
        if !(ob.half_side > 0.0 && ob.half_side.is_finite()) {
            return Err(GeometryError::InvalidSpace(format!(
                "obstacle half_side must be positive, got {}",
                ob.half_side
            )));
        }
        if ob.center.x.abs() + ob.half_side > self.half_width
            || ob.center.y.abs() + ob.half_side > self.half_depth
        {
            return Err(GeometryError::InvalidSpace(format!(
                "obstacle at ({}, {}) extends past the boundary",
                ob.center.x, ob.center.y
            )));
        }
        Ok(())
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn half_depth(&self) -> f64 {
        self.half_depth
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    pub fn safety_margin(&self) -> f64 {
        self.safety_margin
    }

    /// Length of the room diagonal, the upper bound of any ray distance.
    pub fn diagonal(&self) -> f64 {
        (2.0 * self.half_width).hypot(2.0 * self.half_depth)
    }

    /// Strictly inside the boundary and outside every closed obstacle square.
    pub fn is_free(&self, p: Vec2) -> bool {
        p.x.abs() < self.half_width
            && p.y.abs() < self.half_depth
            && !self.obstacles.iter().any(|ob| ob.covers(p, 0.0))
    }

    fn require_free(&self, p: Vec2) -> Result<(), GeometryError> {
        if self.is_free(p) {
            Ok(())
        } else {
            Err(GeometryError::OutsideFreeSpace { x: p.x, y: p.y })
        }
    }

    /// Distance from `origin` along `direction` to the nearest wall or
    /// obstacle face.
    pub fn cast_ray(&self, origin: Vec2, direction: f64) -> Result<f64, GeometryError> {
        self.require_free(origin)?;
        let dir = Vec2::from_angle(direction);
        let mut t = boundary_exit(origin, dir, self.half_width, self.half_depth);
        for ob in &self.obstacles {
            if let Some(hit) = ob.ray_entry(origin, dir, 0.0, t) {
                t = t.min(hit);
            }
        }
        Ok(t)
    }

    /// The 60 proximity distances, ray `k` cast at `heading + k * 6°`.
    pub fn sense_surroundings(&self, pose: &Pose) -> Result<[f64; RAY_COUNT], GeometryError> {
        self.require_free(pose.position)?;
        let mut out = [0.0; RAY_COUNT];
        for (k, d) in out.iter_mut().enumerate() {
            *d = self.cast_ray(pose.position, pose.heading() + k as f64 * RAY_SPACING)?;
        }
        Ok(out)
    }

    /// True iff the segment leaves the room or touches an obstacle square,
    /// with both inflated by the safety margin. `from` is assumed free.
    pub fn collides(&self, from: Vec2, to: Vec2) -> bool {
        let m = self.safety_margin;
        if to.x.abs() >= self.half_width - m || to.y.abs() >= self.half_depth - m {
            return true;
        }
        let delta = to - from;
        self.obstacles
            .iter()
            .any(|ob| ob.ray_entry(from, delta, m, 1.0).is_some())
    }

    /// A new space with `count` obstacles placed uniformly at random, each
    /// fully inside the room. Obstacles may overlap each other; a placement
    /// covering `forbidden` is resampled, and dropped after
    /// [`MAX_PLACEMENT_ATTEMPTS`] failures.
    pub fn reposition_obstacles<R: Rng + ?Sized>(
        &self,
        count: usize,
        rng: &mut R,
        forbidden: Vec2,
    ) -> TrackedSpace {
        let half_side = self
            .obstacles
            .first()
            .map_or(DEFAULT_OBSTACLE_HALF_SIDE, |ob| ob.half_side);
        self.reposition_with_size(count, half_side, rng, forbidden)
    }

    pub fn reposition_with_size<R: Rng + ?Sized>(
        &self,
        count: usize,
        half_side: f64,
        rng: &mut R,
        forbidden: Vec2,
    ) -> TrackedSpace {
        let range_x = (self.half_width - half_side).max(0.0);
        let range_y = (self.half_depth - half_side).max(0.0);
        let mut obstacles = Vec::with_capacity(count);
        for _ in 0..count {
            for _ in 0..MAX_PLACEMENT_ATTEMPTS {
                let center = Vec2::new(
                    rng.random_range(-range_x..=range_x),
                    rng.random_range(-range_y..=range_y),
                );
                let ob = Obstacle::new(center, half_side);
                if !ob.covers(forbidden, self.safety_margin) {
                    obstacles.push(ob);
                    break;
                }
            }
        }
        TrackedSpace {
            obstacles,
            ..self.clone()
        }
    }
}

/// Ray parameter at which `origin + t * dir` leaves the rectangle.
fn boundary_exit(origin: Vec2, dir: Vec2, half_width: f64, half_depth: f64) -> f64 {
    let axis = |o: f64, d: f64, h: f64| {
        if d > 0.0 {
            (h - o) / d
        } else if d < 0.0 {
            (-h - o) / d
        } else {
            f64::INFINITY
        }
    };
    axis(origin.x, dir.x, half_width).min(axis(origin.y, dir.y, half_depth))
}

/// Scene description loadable from a TOML document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneConfig {
    pub half_width: f64,
    pub half_depth: f64,
    /// Number of randomly placed obstacles (ignored when `obstacles` is set).
    pub obstacle_count: usize,
    pub obstacle_half_side: f64,
    /// Fixed obstacle layout; disables repositioning when present.
    pub obstacles: Option<Vec<Obstacle>>,
    pub safety_margin: f64,
    pub seed: u64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            half_width: DEFAULT_HALF_EXTENT,
            half_depth: DEFAULT_HALF_EXTENT,
            obstacle_count: 0,
            obstacle_half_side: DEFAULT_OBSTACLE_HALF_SIDE,
            obstacles: None,
            safety_margin: 0.0,
            seed: 0,
        }
    }
}

impl SceneConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, GeometryError> {
        toml::from_str(text).map_err(|e| GeometryError::InvalidSpace(e.to_string()))
    }

    /// The room with the fixed obstacle list, or empty when obstacles are
    /// random (they are placed by the journey at epoch boundaries).
    pub fn build_space(&self) -> Result<TrackedSpace, GeometryError> {
        if !(self.obstacle_half_side > 0.0) {
            return Err(GeometryError::InvalidSpace(
                "obstacle_half_side must be positive".into(),
            ));
        }
        let obstacles = self.obstacles.clone().unwrap_or_default();
        TrackedSpace::new(self.half_width, self.half_depth, obstacles)?
            .with_safety_margin(self.safety_margin)
    }

    pub fn fixed_layout(&self) -> bool {
        self.obstacles.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn room() -> TrackedSpace {
        TrackedSpace::default()
    }

    fn room_with(obstacles: &[(f64, f64)]) -> TrackedSpace {
        let obs = obstacles
            .iter()
            .map(|&(x, y)| Obstacle::new(Vec2::new(x, y), 1.25))
            .collect();
        TrackedSpace::new(7.5, 7.5, obs).unwrap()
    }

    /// Walk along the ray in 1 mm increments until the point leaves free space.
    fn march(space: &TrackedSpace, origin: Vec2, dir: f64) -> f64 {
        let step = 1e-3;
        let u = Vec2::from_angle(dir);
        let mut t = 0.0;
        while space.is_free(origin + u * (t + step)) {
            t += step;
        }
        t + step / 2.0
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
        assert!(wrap_angle(-1e-300) <= PI && wrap_angle(-1e-300) > -PI);
    }

    #[test]
    fn ray_to_wall_and_corner() {
        let s = room();
        assert!((s.cast_ray(Vec2::ZERO, 0.0).unwrap() - 7.5).abs() < 1e-12);
        let diag = s.cast_ray(Vec2::ZERO, PI / 4.0).unwrap();
        assert!((diag - 7.5 * 2f64.sqrt()).abs() < 1e-9, "{diag}");
        assert!((diag - 10.6066).abs() < 1e-4);
    }

    #[test]
    fn ray_to_obstacle_face() {
        let s = room_with(&[(4.0, 0.0)]);
        assert!((s.cast_ray(Vec2::ZERO, 0.0).unwrap() - 2.75).abs() < 1e-12);
        // Looking away from it reaches the far wall.
        assert!((s.cast_ray(Vec2::ZERO, PI).unwrap() - 7.5).abs() < 1e-12);
    }

    #[test]
    fn ray_from_invalid_origin() {
        let s = room_with(&[(4.0, 0.0)]);
        assert!(matches!(
            s.cast_ray(Vec2::new(4.0, 0.0), 0.0),
            Err(GeometryError::OutsideFreeSpace { .. })
        ));
        assert!(s.cast_ray(Vec2::new(8.0, 0.0), 0.0).is_err());
        assert!(s.cast_ray(Vec2::new(7.5, 0.0), 0.0).is_err());
    }

    #[test]
    fn surroundings_at_center() {
        let s = room();
        let rays = s.sense_surroundings(&Pose::new(Vec2::ZERO, 0.0)).unwrap();
        for k in [0, 15, 30, 45] {
            assert!((rays[k] - 7.5).abs() < 1e-9, "ray {k} = {}", rays[k]);
        }
        assert!(rays[7] > 7.5 && rays[8] > 7.5);
        for (k, &d) in rays.iter().enumerate() {
            let expected = 7.5 / (k as f64 * RAY_SPACING).cos().abs().max((k as f64 * RAY_SPACING).sin().abs());
            assert!((d - expected).abs() < 1e-9, "ray {k}");
            assert!(d <= s.diagonal());
        }
    }

    #[test]
    fn surroundings_adjacent_to_face() {
        let s = room_with(&[(4.0, 0.0)]);
        let pose = Pose::new(Vec2::new(2.75 - 0.3, 0.0), 0.0);
        let rays = s.sense_surroundings(&pose).unwrap();
        assert!((rays[0] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn collision_cases() {
        let s = room();
        assert!(!s.collides(Vec2::ZERO, Vec2::new(1.0, 0.0)));
        assert!(s.collides(Vec2::new(7.4, 0.0), Vec2::new(7.6, 0.0)));
        let s = room_with(&[(4.0, 0.0)]);
        assert!(s.collides(Vec2::new(2.0, 0.0), Vec2::new(3.0, 0.0)));
        assert!(!s.collides(Vec2::new(2.0, 0.0), Vec2::new(2.7, 0.0)));
        // Passing fully through a corner region still counts.
        assert!(s.collides(Vec2::new(2.0, -2.0), Vec2::new(6.0, 2.0)));
    }

    #[test]
    fn safety_margin_inflates_collision_only() {
        let s = room_with(&[(4.0, 0.0)]).with_safety_margin(0.2).unwrap();
        assert!(s.collides(Vec2::new(2.0, 0.0), Vec2::new(2.6, 0.0)));
        assert!(s.collides(Vec2::ZERO, Vec2::new(7.35, 0.0)));
        assert!((s.cast_ray(Vec2::ZERO, 0.0).unwrap() - 2.75).abs() < 1e-12);
    }

    #[test]
    fn reposition_zero_and_deterministic() {
        let s = room();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(s.reposition_obstacles(0, &mut rng, Vec2::ZERO).obstacles().is_empty());

        let a = s.reposition_obstacles(3, &mut ChaCha8Rng::seed_from_u64(9), Vec2::ZERO);
        let b = s.reposition_obstacles(3, &mut ChaCha8Rng::seed_from_u64(9), Vec2::ZERO);
        assert_eq!(a, b);
        assert_eq!(a.obstacles().len(), 3);
    }

    #[test]
    fn reposition_resamples_over_forbidden_point() {
        // Find the first center this seed would produce, then forbid it.
        let s = room();
        let first = s.reposition_obstacles(1, &mut ChaCha8Rng::seed_from_u64(4), Vec2::new(100.0, 100.0));
        let forbidden = first.obstacles()[0].center;
        let placed = s.reposition_obstacles(1, &mut ChaCha8Rng::seed_from_u64(4), forbidden);
        assert_eq!(placed.obstacles().len(), 1);
        assert_ne!(placed.obstacles()[0].center, forbidden);
        assert!(placed.is_free(forbidden));
    }

    #[test]
    fn crowded_placement_is_dropped() {
        // An obstacle as large as the room always covers the agent.
        let s = TrackedSpace::empty(1.0, 1.0).unwrap();
        let out = s.reposition_with_size(2, 1.0, &mut ChaCha8Rng::seed_from_u64(0), Vec2::ZERO);
        assert!(out.obstacles().is_empty());
    }

    #[test]
    fn invalid_spaces_rejected() {
        assert!(TrackedSpace::empty(0.0, 1.0).is_err());
        assert!(TrackedSpace::empty(1.0, -1.0).is_err());
        assert!(TrackedSpace::new(7.5, 7.5, vec![Obstacle::new(Vec2::new(7.0, 0.0), 1.25)]).is_err());
        assert!(TrackedSpace::new(7.5, 7.5, vec![Obstacle::new(Vec2::ZERO, 0.0)]).is_err());
    }

    #[test]
    fn scene_config_from_toml() {
        let cfg = SceneConfig::from_toml_str(
            r#"
            half_width = 5.0
            half_depth = 4.0
            seed = 7
            [[obstacles]]
            center = { x = 1.0, y = 1.0 }
            half_side = 0.5
            "#,
        )
        .unwrap();
        let space = cfg.build_space().unwrap();
        assert_eq!(space.half_width(), 5.0);
        assert_eq!(space.obstacles().len(), 1);
        assert!(cfg.fixed_layout());
        assert!(SceneConfig::from_toml_str("bogus = 1").is_err());
    }

    fn scene_strategy() -> impl Strategy<Value = TrackedSpace> {
        (any::<u64>(), 0usize..4).prop_map(|(seed, n)| {
            room().reposition_obstacles(n, &mut ChaCha8Rng::seed_from_u64(seed), Vec2::new(100.0, 100.0))
        })
    }

    fn free_point(space: &TrackedSpace, x: f64, y: f64) -> Option<Vec2> {
        let p = Vec2::new(x, y);
        space.is_free(p).then_some(p)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ray_matches_marching_oracle(space in scene_strategy(), x in -7.4f64..7.4, y in -7.4f64..7.4, dir in -PI..PI) {
            if let Some(p) = free_point(&space, x, y) {
                let d = space.cast_ray(p, dir).unwrap();
                let m = march(&space, p, dir);
                prop_assert!((d - m).abs() <= 2e-3, "cast {d} march {m}");
            }
        }

        #[test]
        fn ray_bounds(space in scene_strategy(), x in -7.49f64..7.49, y in -7.49f64..7.49, dir in -PI..PI) {
            if let Some(p) = free_point(&space, x, y) {
                let d = space.cast_ray(p, dir).unwrap();
                prop_assert!(d > 0.0 && d.is_finite());
                prop_assert!(d <= space.diagonal());
            }
        }

        #[test]
        fn collides_is_monotone(space in scene_strategy(), x in -7.4f64..7.4, y in -7.4f64..7.4,
                                dir in -PI..PI, short in 0.0f64..3.0, extra in 0.0f64..3.0) {
            if let Some(p) = free_point(&space, x, y) {
                let u = Vec2::from_angle(dir);
                let a = space.collides(p, p + u * short);
                let b = space.collides(p, p + u * (short + extra));
                prop_assert!(!a || b);
            }
        }

        #[test]
        fn reposition_respects_invariants(seed in any::<u64>(), n in 0usize..6, fx in -7.0f64..7.0, fy in -7.0f64..7.0) {
            let forbidden = Vec2::new(fx, fy);
            let s = room().reposition_obstacles(n, &mut ChaCha8Rng::seed_from_u64(seed), forbidden);
            prop_assert!(TrackedSpace::new(s.half_width(), s.half_depth(), s.obstacles().to_vec()).is_ok());
            prop_assert!(s.is_free(forbidden));
            prop_assert!(!s.collides(forbidden, forbidden));
        }
    }
}
