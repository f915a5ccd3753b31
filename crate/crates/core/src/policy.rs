//! RL-facing side of the simulator: observation layout, action decoding,
//! the per-step reward, and [`Environment`], the step loop shared by
//! evaluation journeys and training rollouts.

use std::f64::consts::PI;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controllers::{
    self, ControllerStack, CurvatureAlgo, HeuristicConfig, ResetAlgo, Slot, TranslationAlgo,
};
use crate::geometry::{GeometryError, Pose, SceneConfig, TrackedSpace, Vec2, RAY_COUNT};
use crate::locomotion::{
    Advance, GainSet, LocomotionError, UserState, MAX_CURVATURE_GAIN, MAX_TRANSLATION_GAIN,
};
use crate::pathgen::{PathMethod, PathWalker};
use crate::SimRng;

pub const OBS_DIM: usize = 3 + RAY_COUNT + 1;
pub const ACTION_DIM: usize = 1;
/// Steps between obstacle repositionings (100 m of walking).
pub const EPOCH_LENGTH: u64 = 1000;

const TRANSLATION_SCALE: f64 = 0.2;
const TRANSLATION_OFFSET: f64 = 1.06;
/// Normalizer of the translation penalty, `max(g_T) - 1`.
const TRANSLATION_RANGE: f64 = MAX_TRANSLATION_GAIN - 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Locomotion(#[from] LocomotionError),
    #[error("controller stack has an RL slot but no action was supplied")]
    MissingAction,
    #[error("user is enclosed at step {step}: no direction leaves room for a step")]
    Trapped { step: u64 },
}

/// Policy input, see [`encode_observation`] for the layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation(pub [f64; OBS_DIM]);

impl Observation {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Observation layout:
///
/// - `[0]`, `[1]`: physical position divided by the half extents of the room;
/// - `[2]`: counterclockwise angle from the heading to the room center,
///   divided by π (0 when facing the center);
/// - `[3..63]`: the 60 proximity rays divided by the room diagonal;
/// - `[63]`: the previous (clamped) raw action.
pub fn encode_observation(
    state: &UserState,
    space: &TrackedSpace,
    rays: &[f64; RAY_COUNT],
    prev_action: f64,
) -> Observation {
    let mut obs = [0.0; OBS_DIM];
    let p = state.physical.position;
    obs[0] = p.x / space.half_width();
    obs[1] = p.y / space.half_depth();
    obs[2] = controllers::angle_to_center(&state.physical, space).unwrap_or(0.0) / PI;
    let diag = space.diagonal();
    for (o, r) in obs[3..3 + RAY_COUNT].iter_mut().zip(rays) {
        *o = r / diag;
    }
    obs[OBS_DIM - 1] = prev_action.clamp(-1.0, 1.0);
    Observation(obs)
}

/// Map a raw policy output in [−1, 1] to the quantity controlled by `slot`:
/// translation gain, relative reset turn in radians within [0, 2π), or
/// curvature gain.
pub fn decode_action(raw: f64, slot: Slot) -> f64 {
    let raw = raw.clamp(-1.0, 1.0);
    match slot {
        Slot::Translation => TRANSLATION_SCALE * raw + TRANSLATION_OFFSET,
        Slot::Reset => (raw * 180.0).rem_euclid(360.0).to_radians().rem_euclid(2.0 * PI),
        Slot::Curvature => MAX_CURVATURE_GAIN * raw,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvaturePenaltyMode {
    /// `|g_C - 1|` exactly as printed in the reward table.
    Verbatim,
    /// `|g_C|`, penalizing deviation from the neutral gain of zero.
    NeutralZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardConfig {
    pub curvature_magnitude: f64,
    pub curvature_change: f64,
    pub translation_magnitude: f64,
    pub translation_change: f64,
    pub reset: f64,
    pub near_obstacle: f64,
    pub curvature_penalty_mode: CurvaturePenaltyMode,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            curvature_magnitude: -0.01,
            curvature_change: -0.1,
            translation_magnitude: -0.01,
            translation_change: -0.1,
            reset: -45.0,
            near_obstacle: 0.2,
            curvature_penalty_mode: CurvaturePenaltyMode::NeutralZero,
        }
    }
}

/// `0.2 * (d_min / d_max - 1)` over the proximity rays.
pub fn near_obstacle_term(rays: &[f64; RAY_COUNT], coefficient: f64) -> f64 {
    let (lo, hi) = rays
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    coefficient * (lo / hi - 1.0)
}

/// Reward for one step. Gain penalties only apply to the slots in
/// `rl_slots`; the reset and near-obstacle terms always apply.
pub fn step_reward(
    gains: &GainSet,
    prev_gains: &GainSet,
    reset_occurred: bool,
    rays: &[f64; RAY_COUNT],
    rl_slots: &[Slot],
    cfg: &RewardConfig,
) -> f64 {
    let mut reward = near_obstacle_term(rays, cfg.near_obstacle);
    if reset_occurred {
        reward += cfg.reset;
    }
    for slot in rl_slots {
        match slot {
            Slot::Translation => {
                let mag = (gains.translation - 1.0).abs() / TRANSLATION_RANGE;
                let change = (gains.translation - prev_gains.translation) / TRANSLATION_RANGE;
                reward += cfg.translation_magnitude * mag * mag + cfg.translation_change * change.abs();
            }
            Slot::Curvature => {
                let deviation = match cfg.curvature_penalty_mode {
                    CurvaturePenaltyMode::Verbatim => (gains.curvature - 1.0).abs(),
                    CurvaturePenaltyMode::NeutralZero => gains.curvature.abs(),
                };
                let mag = deviation / MAX_CURVATURE_GAIN;
                let change = (gains.curvature - prev_gains.curvature) / MAX_CURVATURE_GAIN;
                reward += cfg.curvature_magnitude * mag * mag + cfg.curvature_change * change.abs();
            }
            Slot::Reset => {}
        }
    }
    reward
}

/// Everything needed to build an [`Environment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    pub scene: SceneConfig,
    pub path: PathMethod,
    pub stack: ControllerStack,
    pub heuristics: HeuristicConfig,
    pub reward: RewardConfig,
    pub epoch_length: u64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            scene: SceneConfig::default(),
            path: PathMethod::Random,
            stack: ControllerStack::heuristic(),
            heuristics: HeuristicConfig::default(),
            reward: RewardConfig::default(),
            epoch_length: EPOCH_LENGTH,
        }
    }
}

impl EnvConfig {
    pub fn with_obstacles(mut self, count: usize) -> Self {
        self.scene.obstacle_count = count;
        self
    }

    pub fn with_path(mut self, path: PathMethod) -> Self {
        self.path = path;
        self
    }

    pub fn with_stack(mut self, stack: ControllerStack) -> Self {
        self.stack = stack;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResetEvent {
    pub step: u64,
    pub position: Vec2,
    /// Relative physical turn in degrees, within [0, 360).
    pub turn_degrees: f64,
    /// The reset heading came from the fallback rather than the stack.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub gains: GainSet,
    pub resets: Vec<ResetEvent>,
    /// The step closed a 1000-step epoch; obstacles have been repositioned.
    pub epoch_end: bool,
    pub virtual_step: f64,
}

/// One simulated user walking a procedural virtual path inside a tracked
/// space, redirected by a controller stack.
///
/// Each step: the user faces the current virtual target, the stack picks
/// gains, and the user walks one step. If the physical step would collide,
/// a reset turn is performed and the same step is retried. Consecutive
/// resets within one step fall back to Turn-to-Furthest so absolute-heading
/// reset rules cannot loop against the same face.
#[derive(Debug, Clone)]
pub struct Environment {
    cfg: EnvConfig,
    rl_slots: Vec<Slot>,
    space: TrackedSpace,
    state: UserState,
    walker: PathWalker,
    path_rng: SimRng,
    obstacle_rng: SimRng,
    steps: u64,
    pending_step: f64,
    rays: [f64; RAY_COUNT],
    prev_action: f64,
    prev_gains: Option<GainSet>,
}

const PATH_STREAM: u64 = 1;
const OBSTACLE_STREAM: u64 = 2;
const MAX_RESETS_PER_STEP: usize = 8;

impl Environment {
    pub fn new(cfg: EnvConfig, seed: u64) -> Result<Self, EnvError> {
        let mut path_rng = SimRng::seed_from_u64(seed);
        path_rng.set_stream(PATH_STREAM);
        let mut obstacle_rng = SimRng::seed_from_u64(seed);
        obstacle_rng.set_stream(OBSTACLE_STREAM);

        let mut space = cfg.scene.build_space()?;
        let start = Vec2::ZERO;
        if !cfg.scene.fixed_layout() && cfg.scene.obstacle_count > 0 {
            space = space.reposition_with_size(
                cfg.scene.obstacle_count,
                cfg.scene.obstacle_half_side,
                &mut obstacle_rng,
                start,
            );
        }
        let start_pose = Pose::new(start, 0.0);
        if !space.is_free(start) {
            return Err(GeometryError::OutsideFreeSpace { x: 0.0, y: 0.0 }.into());
        }
        let mut env = Self {
            rl_slots: cfg.stack.rl_slots(),
            walker: PathWalker::new(cfg.path),
            state: UserState::new(start_pose, start_pose),
            space,
            cfg,
            path_rng,
            obstacle_rng,
            steps: 0,
            pending_step: 0.0,
            rays: [0.0; RAY_COUNT],
            prev_action: 0.0,
            prev_gains: None,
        };
        env.prepare()?;
        Ok(env)
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn state(&self) -> &UserState {
        &self.state
    }

    pub fn space(&self) -> &TrackedSpace {
        &self.space
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn rays(&self) -> &[f64; RAY_COUNT] {
        &self.rays
    }

    pub fn rl_slots(&self) -> &[Slot] {
        &self.rl_slots
    }

    pub fn observation(&self) -> Observation {
        encode_observation(&self.state, &self.space, &self.rays, self.prev_action)
    }

    /// Face the next virtual waypoint and refresh the proximity rays.
    fn prepare(&mut self) -> Result<(), EnvError> {
        let (bearing, step) = self
            .walker
            .plan_step(&self.state.virtual_pose, &mut self.path_rng);
        self.state.face_virtual(bearing);
        self.pending_step = step;
        self.rays = self.space.sense_surroundings(&self.state.physical)?;
        Ok(())
    }

    fn heuristic_reset_heading(&self, algo: ResetAlgo) -> Result<f64, EnvError> {
        let pose = &self.state.physical;
        Ok(match algo {
            ResetAlgo::TwoOneTurn => controllers::two_one_turn(pose),
            ResetAlgo::T2c => controllers::t2c(pose, &self.space),
            ResetAlgo::T2f | ResetAlgo::Rl => {
                controllers::t2f(pose, &self.space, self.cfg.heuristics.t2f_resolution)?
            }
        })
    }

    /// Advance one step. `action` is the policy's raw output and is required
    /// when the stack has an RL slot.
    pub fn step(&mut self, action: Option<f64>) -> Result<StepOutcome, EnvError> {
        let raw = match (self.rl_slots.is_empty(), action) {
            (true, _) => None,
            (false, Some(a)) => Some(a.clamp(-1.0, 1.0)),
            (false, None) => return Err(EnvError::MissingAction),
        };
        let rl = |slot| decode_action(raw.unwrap_or(0.0), slot);
        let pose = self.state.physical;
        let heur = &self.cfg.heuristics;
        let stack = self.cfg.stack;

        let translation = match stack.translation {
            TranslationAlgo::Ctg => controllers::ctg(&pose, &self.space),
            TranslationAlgo::Actg => controllers::actg(&pose, &self.space),
            TranslationAlgo::Fixed(g) => g,
            TranslationAlgo::Rl => rl(Slot::Translation),
        };
        let curvature = match stack.curvature {
            CurvatureAlgo::S2c => controllers::s2c(&pose, &self.space, heur),
            CurvatureAlgo::Zero => 0.0,
            CurvatureAlgo::Rl => rl(Slot::Curvature),
        };
        let reset_angle = if stack.reset == ResetAlgo::Rl {
            rl(Slot::Reset)
        } else {
            0.0
        };
        let gains = GainSet {
            translation,
            curvature,
            reset_angle,
        };

        let mut resets = Vec::new();
        loop {
            match self.state.advance(gains, &self.space, self.pending_step)? {
                Advance::Moved(next) => {
                    self.state = next;
                    break;
                }
                Advance::Blocked(event) => {
                    if resets.len() >= MAX_RESETS_PER_STEP {
                        return Err(EnvError::Trapped { step: self.steps });
                    }
                    let fallback = !resets.is_empty();
                    let old = self.state.physical.heading();
                    if resets.len() >= 2 {
                        // Even the freest direction is blocked.
                        self.relocate_obstacles_or_fail()?;
                    }
                    let heading = if fallback {
                        self.heuristic_reset_heading(ResetAlgo::T2f)?
                    } else if stack.reset == ResetAlgo::Rl {
                        old + reset_angle
                    } else {
                        self.heuristic_reset_heading(stack.reset)?
                    };
                    self.state = self.state.perform_reset(heading);
                    let turn = (self.state.physical.heading() - old).rem_euclid(2.0 * PI);
                    resets.push(ResetEvent {
                        step: self.steps,
                        position: event.position,
                        turn_degrees: turn.to_degrees().rem_euclid(360.0),
                        fallback,
                    });
                }
            }
        }

        self.steps += 1;
        let virtual_step = self.pending_step;
        let epoch_end = self.cfg.epoch_length > 0 && self.steps.is_multiple_of(self.cfg.epoch_length);
        if epoch_end && !self.cfg.scene.fixed_layout() && self.cfg.scene.obstacle_count > 0 {
            self.space = self.space.reposition_with_size(
                self.cfg.scene.obstacle_count,
                self.cfg.scene.obstacle_half_side,
                &mut self.obstacle_rng,
                self.state.physical.position,
            );
        }
        self.prepare()?;

        let prev = self.prev_gains.unwrap_or(gains);
        let reward = step_reward(
            &gains,
            &prev,
            !resets.is_empty(),
            &self.rays,
            &self.rl_slots,
            &self.cfg.reward,
        );
        self.prev_gains = Some(gains);
        if let Some(a) = raw {
            self.prev_action = a;
        }
        Ok(StepOutcome {
            reward,
            gains,
            resets,
            epoch_end,
            virtual_step,
        })
    }

    fn relocate_obstacles_or_fail(&mut self) -> Result<(), EnvError> {
        if self.cfg.scene.fixed_layout() || self.cfg.scene.obstacle_count == 0 {
            return Err(EnvError::Trapped { step: self.steps });
        }
        self.space = self.space.reposition_with_size(
            self.cfg.scene.obstacle_count,
            self.cfg.scene.obstacle_half_side,
            &mut self.obstacle_rng,
            self.state.physical.position,
        );
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Obstacle;
    use proptest::prelude::*;

    fn rays_at(space: &TrackedSpace, p: Vec2, h: f64) -> [f64; RAY_COUNT] {
        space.sense_surroundings(&Pose::new(p, h)).unwrap()
    }

    fn user(x: f64, y: f64, h: f64) -> UserState {
        let p = Pose::new(Vec2::new(x, y), h);
        UserState::new(p, p)
    }

    #[test]
    fn observation_at_center() {
        let space = TrackedSpace::default();
        let s = user(0.0, 0.0, 0.0);
        let obs = encode_observation(&s, &space, &rays_at(&space, Vec2::ZERO, 0.0), 0.0);
        assert_eq!(obs.0.len(), 64);
        assert_eq!(&obs.0[..3], &[0.0, 0.0, 0.0]);
        assert!((obs.0[3] - 0.35355).abs() < 1e-5);
        assert_eq!(obs.0[63], 0.0);
    }

    #[test]
    fn observation_normalizes_position_and_facing() {
        let space = TrackedSpace::default();
        let s = user(3.75, 0.0, PI);
        let obs = encode_observation(&s, &space, &rays_at(&space, Vec2::new(3.75, 0.0), PI), 0.4);
        assert!((obs.0[0] - 0.5).abs() < 1e-15);
        assert_eq!(obs.0[2], 0.0);
        assert_eq!(obs.0[63], 0.4);
        let side = user(3.75, 0.0, PI / 2.0);
        let obs = encode_observation(&side, &space, &rays_at(&space, Vec2::new(3.75, 0.0), PI / 2.0), 0.0);
        assert!((obs.0[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn decode_cases() {
        assert!((decode_action(0.0, Slot::Translation) - 1.06).abs() < 1e-15);
        assert_eq!(decode_action(0.0, Slot::Curvature), 0.0);
        assert_eq!(decode_action(0.0, Slot::Reset), 0.0);
        assert!((decode_action(1.0, Slot::Translation) - 1.26).abs() < 1e-15);
        assert!((decode_action(1.0, Slot::Curvature) - 0.1333).abs() < 1e-15);
        assert!((decode_action(1.0, Slot::Reset) - PI).abs() < 1e-15);
        assert!((decode_action(-0.5, Slot::Reset).to_degrees() - 270.0).abs() < 1e-9);
        assert!((decode_action(-1.0, Slot::Translation) - 0.86).abs() < 1e-15);
        // Out-of-range inputs are clamped.
        assert_eq!(decode_action(3.0, Slot::Curvature), decode_action(1.0, Slot::Curvature));
    }

    #[test]
    fn reward_cases() {
        let space = TrackedSpace::default();
        let cfg = RewardConfig::default();
        let rays = rays_at(&space, Vec2::ZERO, 0.0);
        let neutral = GainSet::new(1.0, 0.0);
        let r = step_reward(&neutral, &neutral, false, &rays, &[Slot::Curvature, Slot::Translation], &cfg);
        // With 6° spacing from heading 0 the longest rays are at 42° and 48°.
        let d_max = 7.5 / 42f64.to_radians().cos();
        assert!((r - 0.2 * (7.5 / d_max - 1.0)).abs() < 1e-9);
        // A heading that puts a ray on the corner diagonal reaches the full diagonal.
        let diag_rays = rays_at(&space, Vec2::ZERO, 3f64.to_radians());
        let d_min = diag_rays.iter().cloned().fold(f64::INFINITY, f64::min);
        let r = step_reward(&neutral, &neutral, false, &diag_rays, &[], &cfg);
        assert!((r - 0.2 * (d_min / (7.5 * 2f64.sqrt()) - 1.0)).abs() < 1e-9);

        let flat = [3.0; RAY_COUNT];
        assert_eq!(step_reward(&neutral, &neutral, true, &flat, &[], &cfg), -45.0);

        let full = GainSet::new(1.0, MAX_CURVATURE_GAIN);
        let r = step_reward(&full, &full, false, &flat, &[Slot::Curvature], &cfg);
        assert!((r + 0.01).abs() < 1e-15);
        // Heuristic slots are not charged.
        assert_eq!(step_reward(&full, &neutral, false, &flat, &[Slot::Reset], &cfg), 0.0);

        let verbatim = RewardConfig { curvature_penalty_mode: CurvaturePenaltyMode::Verbatim, ..cfg };
        let r = step_reward(&neutral, &neutral, false, &flat, &[Slot::Curvature], &verbatim);
        assert!((r + 0.01 * (1.0 / 0.1333f64).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn near_obstacle_zero_only_when_uniform() {
        let flat = [2.0; RAY_COUNT];
        assert_eq!(near_obstacle_term(&flat, 0.2), 0.0);
        let mut bumpy = flat;
        bumpy[5] = 1.9;
        let a = near_obstacle_term(&bumpy, 0.2);
        bumpy[5] = 1.0;
        let b = near_obstacle_term(&bumpy, 0.2);
        assert!(a < 0.0 && b < a);
    }

    fn gain_strategy() -> impl Strategy<Value = GainSet> {
        (0.86f64..=1.26, -MAX_CURVATURE_GAIN..=MAX_CURVATURE_GAIN).prop_map(|(t, c)| GainSet::new(t, c))
    }

    proptest! {
        #[test]
        fn reward_terms_bounded(g in gain_strategy(), p in gain_strategy(), reset: bool,
                                x in -7.4f64..7.4, y in -7.4f64..7.4, h in -PI..PI,
                                slot in prop_oneof![Just(Slot::Translation), Just(Slot::Reset), Just(Slot::Curvature)]) {
            let space = TrackedSpace::default();
            let rays = rays_at(&space, Vec2::new(x, y), h);
            let r = step_reward(&g, &p, reset, &rays, &[slot], &RewardConfig::default());
            prop_assert!(r <= 0.0);
            prop_assert!(r >= -45.0 - 0.44);
        }

        #[test]
        fn decode_monotone(a in -1.0f64..1.0, b in -1.0f64..1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            for slot in [Slot::Translation, Slot::Curvature] {
                prop_assert!(decode_action(lo, slot) <= decode_action(hi, slot));
            }
            let r = decode_action(a, Slot::Reset);
            prop_assert!((0.0..2.0 * PI).contains(&r));
        }

        #[test]
        fn observation_bounded_and_scale_consistent(x in -0.99f64..0.99, y in -0.99f64..0.99, h in -PI..PI, prev in -1.0f64..1.0) {
            let small = TrackedSpace::new(7.5, 7.5, vec![Obstacle::new(Vec2::new(3.0, -2.0), 1.25)]).unwrap();
            let big = TrackedSpace::new(15.0, 15.0, vec![Obstacle::new(Vec2::new(6.0, -4.0), 2.5)]).unwrap();
            let ps = Vec2::new(7.5 * x, 7.5 * y);
            let pb = Vec2::new(15.0 * x, 15.0 * y);
            if small.is_free(ps) {
                let os = encode_observation(&user(ps.x, ps.y, h), &small, &rays_at(&small, ps, h), prev);
                let ob = encode_observation(&user(pb.x, pb.y, h), &big, &rays_at(&big, pb, h), prev);
                for (i, (a, b)) in os.0.iter().zip(ob.0.iter()).enumerate() {
                    prop_assert!((-1.0..=1.0).contains(a), "component {i} = {a}");
                    if i != 2 && i != 63 {
                        prop_assert!((a - b).abs() < 1e-9, "component {i}: {a} vs {b}");
                    }
                }
                for r in &os.0[3..63] {
                    prop_assert!(*r >= 0.0);
                }
            }
        }
    }

    #[test]
    fn environment_is_deterministic() {
        let cfg = EnvConfig::default().with_obstacles(2);
        let run = || {
            let mut env = Environment::new(cfg.clone(), 17).unwrap();
            let mut resets = 0;
            for _ in 0..3000 {
                resets += env.step(None).unwrap().resets.len();
            }
            (resets, env.state().clone())
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn environment_requires_action_for_rl_slot() {
        let cfg = EnvConfig::default().with_stack(ControllerStack::with_rl(Slot::Curvature));
        let mut env = Environment::new(cfg, 1).unwrap();
        assert_eq!(env.step(None), Err(EnvError::MissingAction));
        assert!(env.step(Some(0.3)).is_ok());
        assert_eq!(env.observation().0[63], 0.3);
    }

    #[test]
    fn user_stays_in_free_space() {
        let cfg = EnvConfig::default().with_obstacles(3);
        let mut env = Environment::new(cfg, 5).unwrap();
        for _ in 0..5000 {
            let out = env.step(None).unwrap();
            assert!(env.space().is_free(env.state().physical.position));
            for r in &out.resets {
                assert!((0.0..360.0).contains(&r.turn_degrees));
            }
        }
        assert!(env.state().reset_count > 0);
    }

    #[test]
    fn virtual_walk_independent_of_stack() {
        let a = EnvConfig::default();
        let b = EnvConfig::default().with_stack(ControllerStack::new(
            TranslationAlgo::Ctg,
            ResetAlgo::T2c,
            CurvatureAlgo::Zero,
        ));
        let mut ea = Environment::new(a, 3).unwrap();
        let mut eb = Environment::new(b, 3).unwrap();
        for _ in 0..2000 {
            ea.step(None).unwrap();
            eb.step(None).unwrap();
            assert_eq!(ea.state().virtual_pose, eb.state().virtual_pose);
        }
    }

    #[test]
    fn t2c_blocked_by_central_obstacle_falls_back() {
        let mut scene = SceneConfig {
            obstacles: Some(vec![Obstacle::new(Vec2::new(2.0, 0.0), 1.25)]),
            ..SceneConfig::default()
        };
        scene.obstacle_count = 0;
        let cfg = EnvConfig {
            scene,
            stack: ControllerStack::new(TranslationAlgo::Fixed(1.0), ResetAlgo::T2c, CurvatureAlgo::Zero),
            ..EnvConfig::default()
        };
        let mut env = Environment::new(cfg, 2).unwrap();
        // Place the user right behind the obstacle, facing the center.
        env.state = user(3.30, 0.0, PI);
        let out = env.step(None).unwrap();
        assert!(!out.resets.is_empty());
        if out.resets.len() > 1 {
            assert!(out.resets[1].fallback);
        }
        assert!(env.space().is_free(env.state().physical.position));
    }
}
