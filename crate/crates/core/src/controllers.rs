//! Heuristic redirection controllers.
//!
//! Translation: CTG (binary) and ACTG (smooth cosine). Reset: 2:1-Turn,
//! Turn-to-Center and Turn-to-Furthest. Curvature: Steer-to-Center.
//! All are pure functions of the physical pose and the tracked space, whose
//! center is the origin.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::{wrap_angle, GeometryError, Pose, TrackedSpace, Vec2};
use crate::locomotion::{MAX_CURVATURE_GAIN, MAX_TRANSLATION_GAIN};

const TIE_TOLERANCE: f64 = 1e-9;

/// A slot of the controller stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Translation,
    Reset,
    Curvature,
}

impl Slot {
    pub const ALL: [Slot; 3] = [Slot::Translation, Slot::Reset, Slot::Curvature];

    pub fn key(self) -> &'static str {
        match self {
            Slot::Translation => "translation",
            Slot::Reset => "reset",
            Slot::Curvature => "curvature",
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Slot {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Slot::ALL
            .into_iter()
            .find(|slot| slot.key() == s)
            .ok_or_else(|| format!("unknown slot `{s}` (expected translation|reset|curvature)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranslationAlgo {
    Ctg,
    Actg,
    Fixed(f64),
    Rl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResetAlgo {
    TwoOneTurn,
    T2c,
    T2f,
    Rl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureAlgo {
    S2c,
    Zero,
    Rl,
}

impl FromStr for TranslationAlgo {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ctg" => Ok(Self::Ctg),
            "actg" => Ok(Self::Actg),
            "fixed" => Ok(Self::Fixed(1.0)),
            "rl" => Ok(Self::Rl),
            _ => Err(format!("unknown translation algorithm `{s}` (expected ctg|actg|fixed|rl)")),
        }
    }
}

impl FromStr for ResetAlgo {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "2to1" => Ok(Self::TwoOneTurn),
            "t2c" => Ok(Self::T2c),
            "t2f" => Ok(Self::T2f),
            "rl" => Ok(Self::Rl),
            _ => Err(format!("unknown reset algorithm `{s}` (expected 2to1|t2c|t2f|rl)")),
        }
    }
}

impl FromStr for CurvatureAlgo {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "s2c" => Ok(Self::S2c),
            "zero" => Ok(Self::Zero),
            "rl" => Ok(Self::Rl),
            _ => Err(format!("unknown curvature algorithm `{s}` (expected s2c|zero|rl)")),
        }
    }
}

impl fmt::Display for TranslationAlgo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ctg => f.write_str("ctg"),
            Self::Actg => f.write_str("actg"),
            Self::Fixed(g) if *g == 1.0 => f.write_str("fixed"),
            Self::Fixed(g) => write!(f, "fixed{g}"),
            Self::Rl => f.write_str("rl"),
        }
    }
}

impl fmt::Display for ResetAlgo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TwoOneTurn => "2to1",
            Self::T2c => "t2c",
            Self::T2f => "t2f",
            Self::Rl => "rl",
        })
    }
}

impl fmt::Display for CurvatureAlgo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::S2c => "s2c",
            Self::Zero => "zero",
            Self::Rl => "rl",
        })
    }
}

/// One algorithm per slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerStack {
    pub translation: TranslationAlgo,
    pub reset: ResetAlgo,
    pub curvature: CurvatureAlgo,
}

impl ControllerStack {
    pub fn new(translation: TranslationAlgo, reset: ResetAlgo, curvature: CurvatureAlgo) -> Self {
        Self {
            translation,
            reset,
            curvature,
        }
    }

    /// The best heuristic combination (ACTG, T2F, S2C).
    pub fn heuristic() -> Self {
        Self::new(TranslationAlgo::Actg, ResetAlgo::T2f, CurvatureAlgo::S2c)
    }

    /// The heuristic stack with `slot` handed to the learned policy.
    pub fn with_rl(slot: Slot) -> Self {
        let mut stack = Self::heuristic();
        match slot {
            Slot::Translation => stack.translation = TranslationAlgo::Rl,
            Slot::Reset => stack.reset = ResetAlgo::Rl,
            Slot::Curvature => stack.curvature = CurvatureAlgo::Rl,
        }
        stack
    }

    pub fn rl_slots(&self) -> Vec<Slot> {
        let mut slots = Vec::new();
        if self.translation == TranslationAlgo::Rl {
            slots.push(Slot::Translation);
        }
        if self.reset == ResetAlgo::Rl {
            slots.push(Slot::Reset);
        }
        if self.curvature == CurvatureAlgo::Rl {
            slots.push(Slot::Curvature);
        }
        slots
    }

    pub fn label(&self) -> String {
        format!("{}-{}-{}", self.translation, self.reset, self.curvature)
    }
}

impl fmt::Display for ControllerStack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Tunables for the heuristics that are not pinned down by their
/// definitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeuristicConfig {
    pub s2c_max_gain: f64,
    /// Heading error at which S2C saturates.
    pub s2c_saturation_angle: f64,
    /// S2C applies no curvature within this distance of the center.
    pub s2c_dead_zone: f64,
    /// Number of candidate directions scanned by T2F.
    pub t2f_resolution: usize,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self {
            s2c_max_gain: MAX_CURVATURE_GAIN,
            s2c_saturation_angle: FRAC_PI_4,
            s2c_dead_zone: 1.25,
            t2f_resolution: 360,
        }
    }
}

/// Vector from the user to the room center.
fn to_center(pose: &Pose, _space: &TrackedSpace) -> Vec2 {
    -pose.position
}

/// Counterclockwise angle from the heading to the bearing of the room
/// center, or `None` at the exact center.
pub fn angle_to_center(pose: &Pose, space: &TrackedSpace) -> Option<f64> {
    let v = to_center(pose, space);
    if v.length() == 0.0 {
        None
    } else {
        Some(wrap_angle(v.angle() - pose.heading()))
    }
}

/// Center-based translation gain: slow the user down when walking away from
/// the center.
pub fn ctg(pose: &Pose, space: &TrackedSpace) -> f64 {
    if to_center(pose, space).dot(pose.forward()) < 0.0 {
        MAX_TRANSLATION_GAIN
    } else {
        1.0
    }
}

/// Smooth variant: `1.06 - 0.2 cos(alpha)` with alpha the angle between the
/// heading and the direction to the center. At the center the cosine is
/// taken as zero.
pub fn actg(pose: &Pose, space: &TrackedSpace) -> f64 {
    let cos_alpha = angle_to_center(pose, space).map_or(0.0, f64::cos);
    1.06 - 0.2 * cos_alpha
}

pub fn two_one_turn(pose: &Pose) -> f64 {
    wrap_angle(pose.heading() + PI)
}

/// Face the room center; falls back to a 2:1 turn at the center itself.
pub fn t2c(pose: &Pose, space: &TrackedSpace) -> f64 {
    let v = to_center(pose, space);
    if v.length() == 0.0 {
        two_one_turn(pose)
    } else {
        v.angle()
    }
}

/// Face the direction with the longest free straight walk, scanning
/// `resolution` evenly spaced absolute directions. Near-ties go to the
/// smallest turn from the current heading.
pub fn t2f(pose: &Pose, space: &TrackedSpace, resolution: usize) -> Result<f64, GeometryError> {
    let resolution = resolution.max(1);
    let mut best: Option<(f64, f64, f64)> = None; // (distance, |turn|, direction)
    for k in 0..resolution {
        let dir = wrap_angle(k as f64 * 2.0 * PI / resolution as f64);
        let dist = space.cast_ray(pose.position, dir)?;
        let turn = wrap_angle(dir - pose.heading()).abs();
        best = match best {
            None => Some((dist, turn, dir)),
            Some((bd, bt, bdir)) => {
                if dist > bd + TIE_TOLERANCE || (dist >= bd - TIE_TOLERANCE && turn < bt) {
                    Some((dist.max(bd), turn, dir))
                } else {
                    Some((bd, bt, bdir))
                }
            }
        };
    }
    Ok(best.map(|(_, _, dir)| dir).expect("at least one direction"))
}

/// Steer-to-Center curvature gain (positive is clockwise).
///
/// The heading error is measured clockwise from the heading to the center
/// bearing. The gain grows linearly up to the saturation angle and is zero
/// inside the dead zone around the center.
pub fn s2c(pose: &Pose, space: &TrackedSpace, cfg: &HeuristicConfig) -> f64 {
    if to_center(pose, space).length() <= cfg.s2c_dead_zone {
        return 0.0;
    }
    let err = s2c_heading_error(pose, space);
    s2c_gain_for_error(err, cfg)
}

/// Clockwise angle from the heading to the center bearing.
pub fn s2c_heading_error(pose: &Pose, space: &TrackedSpace) -> f64 {
    angle_to_center(pose, space).map_or(0.0, |a| -a)
}

pub fn s2c_gain_for_error(err: f64, cfg: &HeuristicConfig) -> f64 {
    let scale = (err.abs() / cfg.s2c_saturation_angle).min(1.0);
    err.signum() * cfg.s2c_max_gain * scale
}
