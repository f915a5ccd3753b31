//! Procedural virtual paths. Each new target is placed relative to the
//! user's current virtual position and heading; the user then walks the
//! straight segment to it (the virtual world is open and unbounded).

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{Pose, Vec2};
use crate::locomotion::STEP_LENGTH;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMethod {
    #[serde(rename = "office")]
    OfficeBuilding,
    #[serde(rename = "exp_small")]
    ExplorationSmall,
    #[serde(rename = "exp_large")]
    ExplorationLarge,
    LongWalk,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceLaw {
    Uniform(f64, f64),
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirectionLaw {
    Uniform(f64, f64),
    /// Equiprobable choice among the listed turns.
    Discrete(&'static [f64]),
}

const OFFICE_TURNS: [f64; 2] = [-FRAC_PI_2, FRAC_PI_2];

impl PathMethod {
    pub const ALL: [PathMethod; 5] = [
        PathMethod::OfficeBuilding,
        PathMethod::ExplorationSmall,
        PathMethod::ExplorationLarge,
        PathMethod::LongWalk,
        PathMethod::Random,
    ];

    pub fn distance_law(self) -> DistanceLaw {
        match self {
            PathMethod::OfficeBuilding => DistanceLaw::Uniform(2.0, 8.0),
            PathMethod::ExplorationSmall => DistanceLaw::Uniform(2.0, 6.0),
            PathMethod::ExplorationLarge => DistanceLaw::Uniform(8.0, 12.0),
            PathMethod::LongWalk => DistanceLaw::Constant(1000.0),
            PathMethod::Random => DistanceLaw::Uniform(2.0, 12.0),
        }
    }

    pub fn direction_law(self) -> DirectionLaw {
        match self {
            PathMethod::OfficeBuilding => DirectionLaw::Discrete(&OFFICE_TURNS),
            _ => DirectionLaw::Uniform(-PI, PI),
        }
    }

    pub fn mean_distance(self) -> f64 {
        match self.distance_law() {
            DistanceLaw::Uniform(a, b) => 0.5 * (a + b),
            DistanceLaw::Constant(d) => d,
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            PathMethod::OfficeBuilding => "office",
            PathMethod::ExplorationSmall => "exp_small",
            PathMethod::ExplorationLarge => "exp_large",
            PathMethod::LongWalk => "long_walk",
            PathMethod::Random => "random",
        }
    }

    pub fn sample_distance<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self.distance_law() {
            DistanceLaw::Uniform(a, b) => rng.random_range(a..b),
            DistanceLaw::Constant(d) => d,
        }
    }

    pub fn sample_direction<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self.direction_law() {
            DirectionLaw::Uniform(a, b) => rng.random_range(a..b),
            DirectionLaw::Discrete(set) => set[rng.random_range(0..set.len())],
        }
    }

    /// A new target relative to the current virtual position and heading.
    pub fn next_target<R: Rng + ?Sized>(self, virtual_pose: &Pose, rng: &mut R) -> Vec2 {
        let distance = self.sample_distance(rng);
        let turn = self.sample_direction(rng);
        virtual_pose.position + Vec2::from_angle(virtual_pose.heading() + turn) * distance
    }
}

impl fmt::Display for PathMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for PathMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PathMethod::ALL
            .into_iter()
            .find(|m| m.key() == s)
            .ok_or_else(|| format!("unknown path method `{s}` (expected office|exp_small|exp_large|long_walk|random)"))
    }
}

/// The current target is within one step of the user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetReached;

/// Bearing from the virtual position to `target`.
pub fn walk_direction(virtual_pose: &Pose, target: Vec2) -> Result<f64, TargetReached> {
    let offset = target - virtual_pose.position;
    if offset.length() < STEP_LENGTH {
        return Err(TargetReached);
    }
    Ok(offset.angle())
}

/// Owns the target sequence for one user.
#[derive(Debug, Clone)]
pub struct PathWalker {
    method: PathMethod,
    target: Option<Vec2>,
    targets_reached: u64,
}

impl PathWalker {
    pub fn new(method: PathMethod) -> Self {
        Self {
            method,
            target: None,
            targets_reached: 0,
        }
    }

    pub fn method(&self) -> PathMethod {
        self.method
    }

    pub fn target(&self) -> Option<Vec2> {
        self.target
    }

    pub fn targets_reached(&self) -> u64 {
        self.targets_reached
    }

    /// Heading and length of the next virtual step. A consumed target is
    /// replaced immediately; the last step of a segment is shortened so it
    /// lands exactly on the target.
    pub fn plan_step<R: Rng + ?Sized>(&mut self, virtual_pose: &Pose, rng: &mut R) -> (f64, f64) {
        loop {
            let target = match self.target {
                Some(t) => t,
                None => {
                    let t = self.method.next_target(virtual_pose, rng);
                    self.target = Some(t);
                    t
                }
            };
            match walk_direction(virtual_pose, target) {
                Ok(bearing) => {
                    let remaining = target.distance(virtual_pose.position);
                    return (bearing, remaining.min(STEP_LENGTH));
                }
                Err(TargetReached) => {
                    self.targets_reached += 1;
                    self.target = None;
                }
            }
        }
    }
}
