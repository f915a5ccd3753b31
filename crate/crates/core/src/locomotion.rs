//! Coupling of virtual walking to physical motion through gains, plus reset
//! turns when the next physical step would collide.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{wrap_angle, Pose, TrackedSpace, Vec2};

/// Virtual distance covered per simulation step.
pub const STEP_LENGTH: f64 = 0.1;
pub const MIN_TRANSLATION_GAIN: f64 = 0.86;
pub const MAX_TRANSLATION_GAIN: f64 = 1.26;
/// Curvature gain bound in 1/m (a 7.5 m radius).
pub const MAX_CURVATURE_GAIN: f64 = 0.1333;

const RANGE_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocomotionError {
    #[error("translation gain {0} outside [0.86, 1.26]")]
    TranslationOutOfRange(f64),
    #[error("curvature gain {0} outside [-0.1333, 0.1333]")]
    CurvatureOutOfRange(f64),
    #[error("reset angle {0} outside [0, 2π)")]
    ResetAngleOutOfRange(f64),
    #[error("virtual step must be positive and finite, got {0}")]
    InvalidStep(f64),
}

/// Gains applied over one step.
///
/// `translation` is virtual distance over physical distance, so values above
/// one slow the user down physically. Positive `curvature` rotates the user
/// clockwise in the physical room.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainSet {
    pub translation: f64,
    pub curvature: f64,
    /// Relative physical turn requested for the next reset, in [0, 2π).
    pub reset_angle: f64,
}

impl Default for GainSet {
    fn default() -> Self {
        Self::NEUTRAL
    }
}

impl GainSet {
    pub const NEUTRAL: GainSet = GainSet {
        translation: 1.0,
        curvature: 0.0,
        reset_angle: 0.0,
    };

    pub fn new(translation: f64, curvature: f64) -> Self {
        Self {
            translation,
            curvature,
            reset_angle: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), LocomotionError> {
        let t = self.translation;
        if !(MIN_TRANSLATION_GAIN - RANGE_SLACK..=MAX_TRANSLATION_GAIN + RANGE_SLACK).contains(&t) {
            return Err(LocomotionError::TranslationOutOfRange(t));
        }
        let c = self.curvature;
        if !(c.abs() <= MAX_CURVATURE_GAIN + RANGE_SLACK) {
            return Err(LocomotionError::CurvatureOutOfRange(c));
        }
        let r = self.reset_angle;
        if !(0.0..2.0 * std::f64::consts::PI).contains(&r) {
            return Err(LocomotionError::ResetAngleOutOfRange(r));
        }
        Ok(())
    }
}

/// The next physical step would leave free space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionEvent {
    pub position: Vec2,
    pub attempted: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Advance {
    Moved(UserState),
    Blocked(CollisionEvent),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserState {
    pub physical: Pose,
    pub virtual_pose: Pose,
    pub distance_walked_virtual: f64,
    pub distance_walked_physical: f64,
    pub reset_count: u64,
    pub last_gains: GainSet,
}

impl UserState {
    /// Physical and virtual poses start aligned.
    pub fn new(physical: Pose, virtual_pose: Pose) -> Self {
        Self {
            physical,
            virtual_pose,
            distance_walked_virtual: 0.0,
            distance_walked_physical: 0.0,
            reset_count: 0,
            last_gains: GainSet::NEUTRAL,
        }
    }

    /// Turn the user in place to face `bearing` in the virtual world. Outside
    /// of resets no rotation gain is applied, so the physical heading turns
    /// by the same amount.
    pub fn face_virtual(&mut self, bearing: f64) {
        let delta = wrap_angle(bearing - self.virtual_pose.heading());
        self.virtual_pose.set_heading(bearing);
        self.physical.rotate(delta);
    }

    /// Walk `virtual_step` meters along the virtual heading.
    ///
    /// The physical displacement is `virtual_step / g_T` along the physical
    /// heading, after which the physical heading rotates clockwise by
    /// `g_C * physical_distance`. A colliding step leaves the state untouched.
    pub fn advance(
        &self,
        gains: GainSet,
        space: &TrackedSpace,
        virtual_step: f64,
    ) -> Result<Advance, LocomotionError> {
        gains.validate()?;
        if !(virtual_step > 0.0 && virtual_step.is_finite()) {
            return Err(LocomotionError::InvalidStep(virtual_step));
        }
        let physical_step = virtual_step / gains.translation;
        let from = self.physical.position;
        let to = from + self.physical.forward() * physical_step;
        if space.collides(from, to) {
            return Ok(Advance::Blocked(CollisionEvent {
                position: from,
                attempted: to,
            }));
        }

        let mut next = self.clone();
        next.physical.position = to;
        next.physical.rotate(-gains.curvature * physical_step);
        next.virtual_pose.position =
            self.virtual_pose.position + self.virtual_pose.forward() * virtual_step;
        next.distance_walked_virtual += virtual_step;
        next.distance_walked_physical += physical_step;
        next.last_gains = gains;
        Ok(Advance::Moved(next))
    }

    /// Instantaneous reset turn. Only the physical heading changes; the
    /// virtual world rotates with the user so the virtual pose is unchanged.
    pub fn perform_reset(&self, new_physical_heading: f64) -> UserState {
        let mut next = self.clone();
        next.physical.set_heading(new_physical_heading);
        next.reset_count += 1;
        next
    }
}

/// One row of the optional per-step trajectory log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub step: u64,
    pub physical_x: f64,
    pub physical_y: f64,
    pub physical_heading: f64,
    pub virtual_x: f64,
    pub virtual_y: f64,
    pub virtual_heading: f64,
    pub g_t: f64,
    pub g_c: f64,
    pub reset: bool,
}

impl TrajectoryRecord {
    pub fn capture(step: u64, state: &UserState, gains: GainSet, reset: bool) -> Self {
        Self {
            step,
            physical_x: state.physical.position.x,
            physical_y: state.physical.position.y,
            physical_heading: state.physical.heading(),
            virtual_x: state.virtual_pose.position.x,
            virtual_y: state.virtual_pose.position.y,
            virtual_heading: state.virtual_pose.heading(),
            g_t: gains.translation,
            g_c: gains.curvature,
            reset,
        }
    }
}

pub fn write_trajectory_csv<W: Write>(records: &[TrajectoryRecord], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn at_center() -> UserState {
        UserState::new(Pose::new(Vec2::ZERO, 0.0), Pose::new(Vec2::ZERO, 0.0))
    }

    fn moved(a: Advance) -> UserState {
        match a {
            Advance::Moved(s) => s,
            Advance::Blocked(e) => panic!("unexpected collision {e:?}"),
        }
    }

    #[test]
    fn identity_gains() {
        let space = TrackedSpace::default();
        let s = moved(at_center().advance(GainSet::NEUTRAL, &space, STEP_LENGTH).unwrap());
        assert!((s.physical.position.x - 0.1).abs() < 1e-15);
        assert_eq!(s.physical.heading(), 0.0);
        assert_eq!(s.virtual_pose.position, Vec2::new(0.1, 0.0));
    }

    #[test]
    fn max_translation_gain_shortens_physical_step() {
        let space = TrackedSpace::default();
        let s = moved(at_center().advance(GainSet::new(1.26, 0.0), &space, STEP_LENGTH).unwrap());
        assert!((s.physical.position.x - 0.079365).abs() < 1e-6);
        assert!((s.distance_walked_physical - 0.1 / 1.26).abs() < 1e-15);
    }

    #[test]
    fn constant_curvature_traces_circle() {
        // Least-squares circle fit (Kasa) to the physical trace.
        let space = TrackedSpace::new(1e3, 1e3, vec![]).unwrap();
        let mut s = at_center();
        let mut pts = vec![s.physical.position];
        for _ in 0..2000 {
            s = moved(s.advance(GainSet::new(1.0, MAX_CURVATURE_GAIN), &space, STEP_LENGTH).unwrap());
            pts.push(s.physical.position);
        }
        let n = pts.len() as f64;
        let (mx, my) = (
            pts.iter().map(|p| p.x).sum::<f64>() / n,
            pts.iter().map(|p| p.y).sum::<f64>() / n,
        );
        let (mut suu, mut svv, mut suv, mut suuu, mut svvv, mut suvv, mut svuu) =
            (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for p in &pts {
            let (u, v) = (p.x - mx, p.y - my);
            suu += u * u;
            svv += v * v;
            suv += u * v;
            suuu += u * u * u;
            svvv += v * v * v;
            suvv += u * v * v;
            svuu += v * u * u;
        }
        let (b1, b2) = (0.5 * (suuu + suvv), 0.5 * (svvv + svuu));
        let det = suu * svv - suv * suv;
        let uc = (b1 * svv - b2 * suv) / det;
        let vc = (suu * b2 - suv * b1) / det;
        let r = (uc * uc + vc * vc + (suu + svv) / n).sqrt();
        let expected = 1.0 / MAX_CURVATURE_GAIN;
        assert!((r - expected).abs() / expected < 1e-3, "radius {r}");
        // Clockwise: the circle center lies to the right of the initial +x heading.
        assert!(vc + my < 0.0);
    }

    #[test]
    fn blocked_step_leaves_state() {
        let space = TrackedSpace::default();
        let s = UserState::new(Pose::new(Vec2::new(7.45, 0.0), 0.0), Pose::new(Vec2::ZERO, 0.0));
        match s.advance(GainSet::NEUTRAL, &space, STEP_LENGTH).unwrap() {
            Advance::Blocked(ev) => assert_eq!(ev.position, s.physical.position),
            Advance::Moved(_) => panic!("should collide"),
        }
    }

    #[test]
    fn out_of_range_gains_rejected() {
        let space = TrackedSpace::default();
        let s = at_center();
        assert!(matches!(
            s.advance(GainSet::new(1.3, 0.0), &space, STEP_LENGTH),
            Err(LocomotionError::TranslationOutOfRange(_))
        ));
        assert!(matches!(
            s.advance(GainSet::new(1.0, -0.2), &space, STEP_LENGTH),
            Err(LocomotionError::CurvatureOutOfRange(_))
        ));
        let bad = GainSet { reset_angle: 7.0, ..GainSet::NEUTRAL };
        assert!(s.advance(bad, &space, STEP_LENGTH).is_err());
        assert!(s.advance(GainSet::NEUTRAL, &space, 0.0).is_err());
    }

    #[test]
    fn reset_semantics() {
        let s = at_center();
        let r = s.perform_reset(PI / 2.0);
        assert_eq!(r.physical.heading(), PI / 2.0);
        assert_eq!(r.physical.position, s.physical.position);
        assert_eq!(r.virtual_pose, s.virtual_pose);
        assert_eq!(r.perform_reset(0.0).reset_count, 2);
    }

    #[test]
    fn reset_at_wall_then_walk_inward() {
        let space = TrackedSpace::default();
        let s = UserState::new(Pose::new(Vec2::new(7.45, 0.0), 0.0), Pose::new(Vec2::ZERO, 0.0));
        assert!(matches!(s.advance(GainSet::NEUTRAL, &space, STEP_LENGTH).unwrap(), Advance::Blocked(_)));
        let r = s.perform_reset(PI);
        assert!(matches!(r.advance(GainSet::NEUTRAL, &space, STEP_LENGTH).unwrap(), Advance::Moved(_)));
    }

    #[test]
    fn virtual_turn_carries_physical_heading() {
        let mut s = UserState::new(Pose::new(Vec2::ZERO, 1.0), Pose::new(Vec2::ZERO, 0.0));
        s.face_virtual(PI / 2.0);
        assert!((s.physical.heading() - (1.0 + PI / 2.0)).abs() < 1e-12);
        assert_eq!(s.virtual_pose.heading(), PI / 2.0);
    }

    #[test]
    fn trajectory_csv_header() {
        let s = at_center();
        let rec = TrajectoryRecord::capture(0, &s, GainSet::NEUTRAL, false);
        let mut buf = Vec::new();
        write_trajectory_csv(&[rec], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "step,physical_x,physical_y,physical_heading,virtual_x,virtual_y,virtual_heading,g_t,g_c,reset\n"
        ));
    }

    proptest! {
        #[test]
        fn physical_length_bookkeeping(g_t in MIN_TRANSLATION_GAIN..MAX_TRANSLATION_GAIN, n in 1usize..400) {
            let space = TrackedSpace::new(100.0, 100.0, vec![]).unwrap();
            let mut s = at_center();
            for _ in 0..n {
                s = moved(s.advance(GainSet::new(g_t, 0.0), &space, STEP_LENGTH).unwrap());
            }
            let expected = n as f64 * STEP_LENGTH / g_t;
            prop_assert!((s.distance_walked_physical - expected).abs() <= 1e-9 * expected);
        }

        #[test]
        fn virtual_path_ignores_gains(schedule in proptest::collection::vec((MIN_TRANSLATION_GAIN..MAX_TRANSLATION_GAIN, -MAX_CURVATURE_GAIN..MAX_CURVATURE_GAIN), 1..100)) {
            let space = TrackedSpace::new(100.0, 100.0, vec![]).unwrap();
            let mut a = at_center();
            let mut b = at_center();
            for (g_t, g_c) in schedule {
                a = moved(a.advance(GainSet::new(g_t, g_c), &space, STEP_LENGTH).unwrap());
                b = moved(b.advance(GainSet::NEUTRAL, &space, STEP_LENGTH).unwrap());
                prop_assert_eq!(a.virtual_pose, b.virtual_pose);
            }
        }

        #[test]
        fn per_step_turn_bounded(g_t in MIN_TRANSLATION_GAIN..MAX_TRANSLATION_GAIN, g_c in -MAX_CURVATURE_GAIN..MAX_CURVATURE_GAIN, h in -PI..PI) {
            let space = TrackedSpace::default();
            let s = UserState::new(Pose::new(Vec2::ZERO, h), Pose::new(Vec2::ZERO, h));
            let n = moved(s.advance(GainSet::new(g_t, g_c), &space, STEP_LENGTH).unwrap());
            let turn = wrap_angle(n.physical.heading() - h).abs();
            prop_assert!(turn <= MAX_CURVATURE_GAIN * STEP_LENGTH / MIN_TRANSLATION_GAIN + 1e-12);
            prop_assert!(space.is_free(n.physical.position));
        }
    }
}
