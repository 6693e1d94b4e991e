//! Scripted synthesis of the ten experimental actions.
//!
//! Each action is a keyframe script over a hand, a ground slab and a few
//! boxes. Moves run at fixed speeds; the remaining time of the sampled
//! duration is spread over the holds between them, so timing varies across
//! variants while the relational script does not. Coordinates are world-up
//! (`y_down = false`), the ground top is at `y = 0`.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Vec3};
use crate::scene::{FrameRecord, ObjectState, SceneStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Hide,
    Cut,
    Chop,
    TakeDown,
    PutOnTop,
    Shake,
    Lay,
    Push,
    Uncover,
    Stir,
}

impl Action {
    pub const ALL: [Action; 10] = [
        Action::Hide,
        Action::Cut,
        Action::Chop,
        Action::TakeDown,
        Action::PutOnTop,
        Action::Shake,
        Action::Lay,
        Action::Push,
        Action::Uncover,
        Action::Stir,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Action::Hide => "hide",
            Action::Cut => "cut",
            Action::Chop => "chop",
            Action::TakeDown => "take_down",
            Action::PutOnTop => "put_on_top",
            Action::Shake => "shake",
            Action::Lay => "lay",
            Action::Push => "push",
            Action::Uncover => "uncover",
            Action::Stir => "stir",
        }
    }

    /// Duration mean and standard deviation (s).
    pub fn default_duration(self) -> (f64, f64) {
        match self {
            Action::TakeDown => (11.7, 2.9),
            Action::PutOnTop => (12.0, 2.1),
            Action::Shake => (12.5, 2.1),
            Action::Push => (12.7, 1.9),
            Action::Hide => (13.8, 2.5),
            Action::Cut => (13.0, 2.0),
            Action::Chop => (11.0, 2.0),
            Action::Lay => (10.5, 2.0),
            Action::Uncover => (11.5, 2.0),
            Action::Stir => (13.5, 2.0),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Action::ALL
            .into_iter()
            .find(|a| a.name() == key)
            .ok_or_else(|| Error::UnknownAction(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenParams {
    pub action: Action,
    pub fps: f64,
    pub seed: u64,
    /// Untouched extra objects, 0 to 3.
    pub distractors: usize,
    /// Multiplies every motion speed, within [0.9, 1.1]. Wider factors push
    /// some moves across the dynamic-relation thresholds.
    pub speed_scale: f64,
    /// Multiplies object sizes, within [0.8, 1.2].
    pub size_scale: f64,
    /// Half-width (m) of the random offset of the whole arrangement.
    pub position_jitter: f64,
    /// Duration mean and standard deviation (s); the action default if unset.
    pub duration: Option<(f64, f64)>,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            action: Action::Hide,
            fps: 30.0,
            seed: 0,
            distractors: 0,
            speed_scale: 1.0,
            size_scale: 1.0,
            position_jitter: 0.1,
            duration: None,
        }
    }
}

impl GenParams {
    pub fn new(action: Action, seed: u64) -> Self {
        GenParams {
            action,
            seed,
            ..GenParams::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.fps.is_finite() && self.fps >= 10.0 && self.fps <= 240.0) {
            return bad("fps must lie in [10, 240]");
        }
        if self.distractors > 3 {
            return bad("at most 3 distractors");
        }
        if !(0.9..=1.1).contains(&self.speed_scale) {
            return bad("speed_scale must lie in [0.9, 1.1]");
        }
        if !(0.8..=1.2).contains(&self.size_scale) {
            return bad("size_scale must lie in [0.8, 1.2]");
        }
        if !(0.0..=0.3).contains(&self.position_jitter) {
            return bad("position_jitter must lie in [0, 0.3]");
        }
        if let Some((m, sd)) = self.duration {
            if !(m > 0.0 && m.is_finite() && sd >= 0.0 && sd.is_finite()) {
                return bad("duration mean must be positive and sd non-negative");
            }
        }
        Ok(())
    }
}

/// Minimum length of a hold (s); longer than the default debounce.
const MIN_HOLD: f64 = 1.0;
/// Cruise speed of ordinary moves (m/s).
const CRUISE: f64 = 0.45;
/// Speed of slow carries (m/s), clear of every dynamic threshold.
const CARRY: f64 = 0.25;
/// Speed of moves meant to read as getting close / moving apart (m/s).
const FAST: f64 = 0.6;
/// Vertical speed cap of approach moves (m/s), well below the closing rate
/// that reads as getting close.
const APPROACH_VY: f64 = 0.2;
/// Hand bottom clearance over the ground for low grasps (m).
const LOW: f64 = 0.015;

#[derive(Debug, Clone, Copy)]
enum Event {
    Hide,
    Show,
    Destroy,
}

#[derive(Debug, Clone)]
enum Step {
    Motion {
        targets: Vec<(usize, Vec3, Vec3)>,
        secs: f64,
    },
    Hold {
        weight: f64,
    },
    Event {
        body: usize,
        event: Event,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Hand,
    Ground,
    Object,
}

#[derive(Debug, Clone)]
struct Body {
    id: String,
    kind: Kind,
    center: Vec3,
    size: Vec3,
    visible: bool,
}

/// Script under construction: bodies with their current planned pose.
struct Plan {
    bodies: Vec<Body>,
    pos: Vec<Vec3>,
    size: Vec<Vec3>,
    attached: Vec<usize>,
    steps: Vec<Step>,
    /// Speed factor.
    k: f64,
}

const HAND: usize = 1;

fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn len(a: Vec3) -> f64 {
    libm::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])
}

/// Center of a box of `size` resting on the ground at `(x, z)`.
fn rest(x: f64, z: f64, size: Vec3) -> Vec3 {
    [x, size[1] / 2.0, z]
}

impl Plan {
    fn new(hand_size: f64, hand_center: Vec3, k: f64) -> Self {
        let mut plan = Plan {
            bodies: Vec::new(),
            pos: Vec::new(),
            size: Vec::new(),
            attached: Vec::new(),
            steps: Vec::new(),
            k,
        };
        plan.push("table", Kind::Ground, [0.0, -50.0, 0.0], [4.0, 100.0, 4.0]);
        plan.push("hand", Kind::Hand, hand_center, [hand_size; 3]);
        plan
    }

    fn push(&mut self, id: &str, kind: Kind, center: Vec3, size: Vec3) -> usize {
        self.bodies.push(Body {
            id: id.into(),
            kind,
            center,
            size,
            visible: true,
        });
        self.pos.push(center);
        self.size.push(size);
        self.bodies.len() - 1
    }

    fn object(&mut self, id: &str, center: Vec3, size: Vec3) -> usize {
        self.push(id, Kind::Object, center, size)
    }

    fn hs(&self) -> f64 {
        self.size[HAND][0]
    }

    fn hand(&self) -> Vec3 {
        self.pos[HAND]
    }

    /// Hand center touching the -x face of `body` with its bottom at `bottom`.
    fn side_grasp(&self, body: usize, bottom: f64) -> Vec3 {
        let (c, s, hs) = (self.pos[body], self.size[body], self.hs());
        [c[0] - s[0] / 2.0 - hs / 2.0, bottom + hs / 2.0, c[2]]
    }

    /// Hand center resting on top of `body`, over its -x end.
    fn top_grasp(&self, body: usize) -> Vec3 {
        let (c, s, hs) = (self.pos[body], self.size[body], self.hs());
        let x = (c[0] - s[0] / 2.0 + hs / 2.0).min(c[0]);
        [x, c[1] + s[1] / 2.0 + hs / 2.0, c[2]]
    }

    fn motion(&mut self, targets: Vec<(usize, Vec3, Vec3)>, secs: f64) {
        for &(b, c, s) in &targets {
            self.pos[b] = c;
            self.size[b] = s;
        }
        self.steps.push(Step::Motion { targets, secs });
    }

    /// Move the hand and everything attached to it by `d`.
    fn hand_by_capped(&mut self, d: Vec3, speed: f64, vy_max: Option<f64>) {
        let speed = speed * self.k;
        let mut secs = len(d) / speed;
        if let Some(vy) = vy_max {
            secs = secs.max(d[1].abs() / (vy * self.k));
        }
        if secs <= 0.0 {
            return;
        }
        let mut targets = vec![(HAND, add(self.pos[HAND], d), self.size[HAND])];
        for &b in &self.attached {
            targets.push((b, add(self.pos[b], d), self.size[b]));
        }
        self.motion(targets, secs);
    }

    fn hand_by(&mut self, d: Vec3, speed: f64) {
        self.hand_by_capped(d, speed, None);
    }

    fn hand_to(&mut self, target: Vec3, speed: f64) {
        self.hand_by(sub(target, self.hand()), speed);
    }

    fn hand_to_capped(&mut self, target: Vec3, speed: f64, vy: f64) {
        self.hand_by_capped(sub(target, self.hand()), speed, Some(vy));
    }

    fn hold(&mut self, weight: f64) {
        self.steps.push(Step::Hold { weight });
    }

    fn attach(&mut self, b: usize) {
        self.attached.push(b);
    }

    fn event(&mut self, body: usize, event: Event) {
        self.steps.push(Step::Event { body, event });
    }

    /// Side approach: drop to a hover 0.2 m left of the grasp pose at the
    /// grasp height, wait, then glide in.
    fn approach_side(&mut self, body: usize, bottom: f64) {
        let grasp = self.side_grasp(body, bottom);
        self.hold(1.0);
        self.hand_to_capped([grasp[0] - 0.2, grasp[1], grasp[2]], CRUISE, APPROACH_VY);
        self.hold(0.7);
        self.hand_to(grasp, CRUISE);
        self.hold(1.0);
    }

    /// Move over `body`, then descend vertically onto its top.
    fn approach_top(&mut self, body: usize) {
        let grasp = self.top_grasp(body);
        self.hold(1.0);
        let h = self.hand();
        self.hand_to([grasp[0], h[1], grasp[2]], CRUISE);
        self.hand_to(grasp, APPROACH_VY);
        self.hold(1.0);
    }

    /// Release and retreat up and back fast, then wait far away.
    fn leave(&mut self) {
        self.attached.clear();
        self.hand_by([-0.45, 0.5, 0.0], FAST);
        self.hold(1.5);
    }

    /// Horizontal circles of radius `r` around the current hand position.
    fn circles(&mut self, r: f64, turns: usize, speed: f64) {
        let n = 8;
        let h = self.hand();
        let center = [h[0] - r, h[1], h[2]];
        for s in 1..=turns * n {
            let a = core::f64::consts::TAU * s as f64 / n as f64;
            let p = [
                center[0] + r * libm::cos(a),
                h[1],
                center[2] + r * libm::sin(a),
            ];
            self.hand_to(p, speed);
        }
    }

    /// Move the hand and reshape `body` over `secs` (before speed scaling).
    fn reshape(&mut self, body: usize, center: Vec3, size: Vec3, hand: Vec3, secs: f64) {
        let hs = self.size[HAND];
        self.motion(vec![(HAND, hand, hs), (body, center, size)], secs / self.k);
    }

    fn motion_time(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| {
                if let Step::Motion { secs, .. } = s {
                    *secs
                } else {
                    0.0
                }
            })
            .sum()
    }

    fn render(&self, duration: f64, fps: f64, label: &str) -> SceneStream {
        let weights: f64 = self
            .steps
            .iter()
            .map(|s| {
                if let Step::Hold { weight } = s {
                    *weight
                } else {
                    0.0
                }
            })
            .sum();
        let spare = (duration - self.motion_time()).max(0.0);

        // Keyframes per body: (t, center, size).
        let mut keys: Vec<Vec<(f64, Vec3, Vec3)>> = self
            .bodies
            .iter()
            .map(|b| vec![(0.0, b.center, b.size)])
            .collect();
        let mut events: Vec<(f64, usize, Event)> = Vec::new();
        let mut t = 0.0;
        for step in &self.steps {
            match step {
                Step::Motion { targets, secs } => {
                    for &(b, c, s) in targets {
                        let last = *keys[b].last().unwrap_or(&(0.0, c, s));
                        if last.0 < t {
                            keys[b].push((t, last.1, last.2));
                        }
                        keys[b].push((t + secs, c, s));
                    }
                    t += secs;
                }
                Step::Hold { weight } => {
                    let share = if weights > 0.0 {
                        spare * weight / weights
                    } else {
                        0.0
                    };
                    t += share.max(MIN_HOLD * weight);
                }
                Step::Event { body, event } => events.push((t, *body, *event)),
            }
        }

        let n = libm::floor(t * fps + 1e-9) as usize + 1;
        let first_at = |te: f64| libm::ceil(te * fps - 1e-9).max(0.0) as usize;
        let mut visible: Vec<Vec<bool>> = self.bodies.iter().map(|b| vec![b.visible; n]).collect();
        let mut intact: Vec<Vec<bool>> = self.bodies.iter().map(|_| vec![true; n]).collect();
        for &(te, b, ev) in &events {
            match ev {
                // Hidden one frame after the covering pose is reached.
                Event::Hide => visible[b]
                    .iter_mut()
                    .skip(first_at(te) + 1)
                    .for_each(|v| *v = false),
                Event::Show => visible[b]
                    .iter_mut()
                    .skip(first_at(te))
                    .for_each(|v| *v = true),
                Event::Destroy => intact[b]
                    .iter_mut()
                    .skip(first_at(te))
                    .for_each(|v| *v = false),
            }
        }

        let frames = (0..n)
            .map(|i| {
                let ti = i as f64 / fps;
                let objects = self
                    .bodies
                    .iter()
                    .enumerate()
                    .map(|(b, body)| {
                        let (c, s) = sample(&keys[b], ti);
                        let aabb = Aabb::from_center(c, s);
                        let mut o = match body.kind {
                            Kind::Hand => ObjectState::hand(body.id.clone(), aabb),
                            Kind::Ground => ObjectState::ground(body.id.clone(), aabb),
                            Kind::Object => ObjectState::new(body.id.clone(), aabb),
                        };
                        o.visible = visible[b][i];
                        o.intact = intact[b][i];
                        o
                    })
                    .collect();
                FrameRecord {
                    index: i as u64,
                    t: ti,
                    objects,
                }
            })
            .collect();
        SceneStream {
            frames,
            fps,
            label: Some(label.into()),
            y_down: false,
        }
    }
}

/// Piecewise-linear interpolation of keyframes.
fn sample(keys: &[(f64, Vec3, Vec3)], t: f64) -> (Vec3, Vec3) {
    let j = keys.partition_point(|k| k.0 <= t);
    if j == 0 {
        return (keys[0].1, keys[0].2);
    }
    if j == keys.len() {
        let k = keys[j - 1];
        return (k.1, k.2);
    }
    let (a, b) = (keys[j - 1], keys[j]);
    let u = if b.0 > a.0 {
        (t - a.0) / (b.0 - a.0)
    } else {
        1.0
    };
    let lerp = |p: Vec3, q: Vec3| {
        [
            p[0] + (q[0] - p[0]) * u,
            p[1] + (q[1] - p[1]) * u,
            p[2] + (q[2] - p[2]) * u,
        ]
    };
    (lerp(a.1, b.1), lerp(a.2, b.2))
}

/// Random draws of one variant.
struct Draw<'a> {
    rng: &'a mut ChaCha8Rng,
    size_scale: f64,
}

impl Draw<'_> {
    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    fn size(&mut self, x: (f64, f64), y: (f64, f64), z: (f64, f64)) -> Vec3 {
        let s = self.size_scale;
        [
            self.range(x.0, x.1) * s,
            self.range(y.0, y.1) * s,
            self.range(z.0, z.1) * s,
        ]
    }

    fn cube(&mut self, lo: f64, hi: f64) -> Vec3 {
        let e = self.range(lo, hi) * self.size_scale;
        [e; 3]
    }
}

/// Generate one labelled stream.
pub fn generate_scene(params: &GenParams) -> Result<SceneStream> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let k = params.speed_scale * rng.random_range(0.92..1.08);
    let hs = rng.random_range(0.075..0.085);
    let j = params.position_jitter;
    let x0 = -0.2
        + if j > 0.0 {
            rng.random_range(-j..j)
        } else {
            0.0
        };
    let z0 = if j > 0.0 {
        rng.random_range(-j / 2.0..j / 2.0)
    } else {
        0.0
    };
    let (mean, sd) = params
        .duration
        .unwrap_or_else(|| params.action.default_duration());
    let duration = if sd > 0.0 {
        let normal =
            Normal::new(mean, sd).map_err(|_| Error::InvalidConfig("bad duration".into()))?;
        let mut d = normal.sample(&mut rng);
        while (d - mean).abs() > 2.0 * sd {
            d = normal.sample(&mut rng);
        }
        d
    } else {
        mean
    };

    let start = [x0 - 0.6, 0.34, z0];
    let mut plan = Plan::new(hs, start, k);
    let mut draw = Draw {
        rng: &mut rng,
        size_scale: params.size_scale,
    };
    let d = &mut draw;
    let gap = d.range(0.28, 0.36);

    match params.action {
        Action::Hide => {
            let cs = d.size((0.10, 0.11), (0.10, 0.11), (0.10, 0.11));
            let bs = d.size((0.045, 0.055), (0.075, 0.08), (0.045, 0.055));
            let cup = plan.object("cup", rest(x0, z0, cs), cs);
            let block = plan.object("block", rest(x0 + gap, z0, bs), bs);
            plan.approach_side(cup, 0.025);
            plan.attach(cup);
            plan.hand_by([0.0, bs[1] + 0.015, 0.0], FAST);
            plan.hand_by([gap, 0.0, 0.0], 0.25);
            // Slow cover down to the ground.
            plan.hand_by([0.0, -(bs[1] + 0.015), 0.0], 0.09);
            plan.event(block, Event::Hide);
            plan.hold(1.0);
            plan.leave();
        }
        Action::Push => {
            let bs = d.cube(0.06, 0.08);
            let boxed = plan.object("box", rest(x0, z0, bs), bs);
            plan.approach_side(boxed, LOW);
            plan.attach(boxed);
            plan.hand_by([gap * 0.8, 0.0, 0.0], 0.3);
            plan.leave();
        }
        Action::Chop => {
            let ks = [d.range(0.18, 0.22), 0.02, d.range(0.03, 0.035)];
            let bs = d.size((0.2, 0.24), (0.012, 0.015), (0.12, 0.14));
            let vs = d.size((0.04, 0.045), (0.035, 0.04), (0.12, 0.15));
            let knife = plan.object("knife", rest(x0, z0, ks), ks);
            let bx = x0 + ks[0] / 2.0 + gap;
            plan.object("board", rest(bx, z0, bs), bs);
            let veg = plan.object("cucumber", [bx, bs[1] + vs[1] / 2.0, z0], vs);
            plan.approach_top(knife);
            plan.attach(knife);
            plan.hand_by([0.0, 0.6, 0.0], FAST);
            let over = plan.pos[veg][0] - plan.pos[knife][0];
            plan.hand_by([over, 0.0, 0.0], CRUISE);
            plan.hold(0.3);
            let strike = plan.pos[knife][1] - ks[1] / 2.0 - bs[1] - vs[1];
            plan.hand_by([0.0, -strike, 0.0], FAST);
            // The blade bites in, then goes through onto the board.
            plan.hand_by([0.0, -vs[1] / 2.0, 0.0], FAST);
            plan.event(veg, Event::Destroy);
            plan.hand_by([0.0, -vs[1] / 2.0, 0.0], FAST);
            plan.hold(1.0);
            plan.leave();
        }
        Action::Cut => {
            let ks = [d.range(0.18, 0.22), 0.02, d.range(0.03, 0.035)];
            let bs = d.size((0.2, 0.24), (0.012, 0.015), (0.12, 0.14));
            let vs = d.size((0.04, 0.045), (0.035, 0.04), (0.12, 0.15));
            let knife = plan.object("knife", rest(x0, z0, ks), ks);
            let bx = x0 + ks[0] / 2.0 + gap;
            let board = plan.object("board", rest(bx, z0, bs), bs);
            let veg = plan.object("cucumber", [bx, bs[1] + vs[1] / 2.0, z0], vs);
            plan.approach_top(knife);
            plan.attach(knife);
            let top = bs[1] + vs[1];
            plan.hand_by([0.0, top + 0.012, 0.0], FAST);
            // Blade center over the cucumber, then down onto it.
            let over = plan.pos[veg][0] - plan.pos[knife][0];
            plan.hand_by([over, 0.0, 0.0], CRUISE);
            plan.hand_by([0.0, -0.012, 0.0], 0.08);
            plan.hold(0.3);
            // Slice: draw the blade along itself while sinking through.
            plan.hand_by([-0.1, -vs[1], 0.0], 0.06);
            plan.event(veg, Event::Destroy);
            plan.hold(0.7);
            plan.hand_by([0.0, 0.06, 0.0], FAST);
            plan.hand_by([0.0, 0.0, -0.25], CRUISE);
            plan.hand_by([0.0, -(0.06 + bs[1]), 0.0], FAST);
            let _ = board;
            plan.hold(0.7);
            plan.leave();
        }
        Action::PutOnTop => {
            let cs = d.cube(0.055, 0.065);
            let bs = d.cube(0.08, 0.09);
            let cube = plan.object("cube", rest(x0, z0, cs), cs);
            plan.object("block", rest(x0 + gap, z0, bs), bs);
            plan.approach_top(cube);
            plan.attach(cube);
            plan.hand_by([0.0, 0.2, 0.0], FAST);
            plan.hand_by([gap, 0.0, 0.0], CRUISE);
            plan.hand_by([0.0, -(0.2 - bs[1]), 0.0], FAST);
            plan.hold(1.0);
            plan.leave();
        }
        Action::Uncover => {
            let cs = d.size((0.12, 0.13), (0.12, 0.13), (0.12, 0.13));
            let bs = d.cube(0.05, 0.06);
            let cup = plan.object("cup", rest(x0, z0, cs), cs);
            let block = plan.object("block", rest(x0, z0, bs), bs);
            plan.bodies[block].visible = false;
            plan.approach_top(cup);
            plan.attach(cup);
            plan.event(block, Event::Show);
            plan.hand_by([0.0, 0.09, 0.0], FAST);
            plan.hold(1.0);
            plan.hand_by([0.5, 0.0, 0.0], FAST);
            plan.hand_by([0.0, -0.09, 0.0], FAST);
            plan.hold(1.0);
            plan.leave();
        }
        Action::TakeDown => {
            let ps = d.size((0.08, 0.09), (0.15, 0.17), (0.08, 0.09));
            let cs = d.cube(0.05, 0.06);
            plan.object("pedestal", rest(x0, z0, ps), ps);
            let cube = plan.object("cube", [x0, ps[1] + cs[1] / 2.0, z0], cs);
            plan.approach_side(cube, ps[1] + 0.006);
            plan.attach(cube);
            plan.hand_by([0.0, 0.06, 0.0], FAST);
            plan.hand_by([0.3, 0.0, 0.0], CRUISE);
            let drop = plan.pos[cube][1] - cs[1] / 2.0;
            plan.hand_by([0.0, -drop, 0.0], FAST);
            plan.hold(1.0);
            plan.leave();
        }
        Action::Shake => {
            let bs = d.size((0.06, 0.07), (0.19, 0.22), (0.06, 0.07));
            let bottle = plan.object("bottle", rest(x0, z0, bs), bs);
            plan.approach_side(bottle, 0.13);
            plan.attach(bottle);
            let lift = d.range(0.55, 0.6);
            plan.hand_by([0.0, lift, 0.0], FAST);
            plan.circles(0.05, 3, CRUISE);
            plan.hand_by([0.0, -lift, 0.0], FAST);
            plan.hold(1.0);
            plan.leave();
        }
        Action::Stir => {
            let cs = d.size((0.09, 0.1), (0.1, 0.12), (0.09, 0.1));
            let ss = d.size((0.015, 0.02), (0.22, 0.24), (0.015, 0.02));
            let spoon = plan.object("spoon", rest(x0, z0, ss), ss);
            plan.object("cup", rest(x0 + gap, z0, cs), cs);
            let hs = plan.hs();
            plan.approach_side(spoon, ss[1] - hs);
            plan.attach(spoon);
            let up = cs[1] + 0.02;
            plan.hand_by([0.0, up, 0.0], FAST);
            plan.hand_by([gap, 0.0, 0.0], CARRY);
            plan.hand_by([0.0, -(up - 0.01), 0.0], FAST);
            // Tiny circles keep every non-touching distance steady.
            plan.circles(0.0037, 5, 0.035);
            plan.hand_by([0.0, up - 0.01, 0.0], FAST);
            plan.hold(1.0);
            plan.hand_by([0.15, 0.0, 0.0], CRUISE);
            plan.hand_by([0.0, -up, 0.0], FAST);
            plan.hold(1.0);
            plan.leave();
        }
        Action::Lay => {
            let bs = d.size((0.06, 0.07), (0.2, 0.23), (0.06, 0.07));
            let tall = plan.object("tall_box", rest(x0, z0, bs), bs);
            let hs = plan.hs();
            let grasp = plan.top_grasp(tall);
            plan.approach_top(tall);
            // Tip over about the bottom +x edge, hand rigidly attached.
            let pivot = [x0 + bs[0] / 2.0, 0.0];
            let hand_rel = [grasp[0] - pivot[0], grasp[1] - pivot[1]];
            let corners = [[-bs[0], 0.0], [0.0, 0.0], [0.0, bs[1]], [-bs[0], bs[1]]];
            let steps = 6;
            for s in 1..=steps {
                let th = core::f64::consts::FRAC_PI_2 * s as f64 / steps as f64;
                let (sn, cs) = (libm::sin(th), libm::cos(th));
                let rot = |p: [f64; 2]| [p[0] * cs + p[1] * sn, -p[0] * sn + p[1] * cs];
                let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
                for c in corners {
                    let r = rot(c);
                    for a in 0..2 {
                        lo[a] = lo[a].min(r[a]);
                        hi[a] = hi[a].max(r[a]);
                    }
                }
                let center = [pivot[0] + (lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0, z0];
                let size = [hi[0] - lo[0], hi[1] - lo[1], bs[2]];
                let h = rot(hand_rel);
                let hand = [pivot[0] + h[0], (pivot[1] + h[1]).max(hs / 2.0), z0];
                plan.reshape(tall, center, size, hand, 1.2 / steps as f64);
            }
            plan.hold(1.0);
            plan.leave();
        }
    }

    // Distractors come from their own stream so they never disturb the
    // roled geometry.
    let mut drng = ChaCha8Rng::seed_from_u64(params.seed);
    drng.set_stream(1);
    let mut placed: Vec<Aabb> = Vec::new();
    for i in 0..params.distractors {
        for _ in 0..100 {
            let size = [drng.random_range(0.05..0.12); 3];
            let side = if drng.random_bool(0.5) { 1.0 } else { -1.0 };
            let c = rest(
                drng.random_range(-0.8..0.6),
                z0 + side * drng.random_range(0.45..0.65),
                size,
            );
            let b = Aabb::from_center(c, size);
            if placed.iter().all(|p| p.separation(&b) > 0.05) {
                placed.push(b);
                plan.object(&alloc::format!("distractor_{i}"), c, size);
                break;
            }
        }
    }

    check_start(&plan)?;
    Ok(plan.render(duration, params.fps, params.action.name()))
}

/// Objects must not interpenetrate at the start, except a hidden object
/// inside its cover.
fn check_start(plan: &Plan) -> Result<()> {
    let objs: Vec<(usize, Aabb)> = plan
        .bodies
        .iter()
        .enumerate()
        .filter(|(_, b)| b.kind != Kind::Ground)
        .map(|(i, b)| (i, Aabb::from_center(b.center, b.size)))
        .collect();
    for (x, (i, a)) in objs.iter().enumerate() {
        for (j, b) in &objs[x + 1..] {
            if !plan.bodies[*i].visible || !plan.bodies[*j].visible {
                continue;
            }
            if (0..3).all(|k| a.overlap_len(b, k) > 1e-9) {
                return Err(Error::InfeasibleGeometry(alloc::format!(
                    "{} and {} overlap at the start",
                    plan.bodies[*i].id,
                    plan.bodies[*j].id
                )));
            }
        }
    }
    Ok(())
}

/// Seed of variant `variant` of `action` under a master seed.
pub fn variant_seed(master: u64, action: Action, variant: usize) -> u64 {
    let a = Action::ALL.iter().position(|&x| x == action).unwrap_or(0) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(1000 + a * 10_000 + variant as u64);
    rng.random()
}

/// Parameters of a full suite: `variants` per action, distractor counts
/// cycling through 0..=3.
pub fn suite_params(actions: &[Action], variants: usize, master: u64) -> Vec<GenParams> {
    actions
        .iter()
        .flat_map(|&action| {
            (0..variants).map(move |v| GenParams {
                action,
                seed: variant_seed(master, action, v),
                distractors: v % 4,
                ..GenParams::default()
            })
        })
        .collect()
}
