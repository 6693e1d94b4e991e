//! Role assignment, ESEC construction and SEC projection.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relations::{
    dsr_track, main_ssr, touching, DsrRelation, DynamicConfig, SsrRelation, StaticConfig,
    TnRelation,
};
use crate::scene::{FrameRecord, ObjectState, SceneStream};

/// Abstract object roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "H")]
    Hand,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3")]
    Three,
    #[serde(rename = "G")]
    Ground,
}

impl Role {
    pub fn symbol(self) -> &'static str {
        match self {
            Role::Hand => "H",
            Role::One => "1",
            Role::Two => "2",
            Role::Three => "3",
            Role::Ground => "G",
        }
    }
}

/// Number of object pairs, i.e. rows per sub-table.
pub const ROWS: usize = 10;

/// Fixed row order of every sub-table.
pub const PAIRS: [(Role, Role); ROWS] = {
    use Role::*;
    [
        (Hand, One),
        (Hand, Two),
        (Hand, Three),
        (Hand, Ground),
        (One, Two),
        (One, Three),
        (One, Ground),
        (Two, Three),
        (Two, Ground),
        (Three, Ground),
    ]
};

pub const PAIR_LABELS: [&str; ROWS] = [
    "H,1", "H,2", "H,3", "H,G", "1,2", "1,3", "1,G", "2,3", "2,G", "3,G",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleBinding {
    pub id: String,
    /// Frame index at which the role was bound.
    pub frame: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleMap {
    pub hand: Option<RoleBinding>,
    pub ground: Option<RoleBinding>,
    /// Objects 1, 2 and 3.
    pub objects: [Option<RoleBinding>; 3],
}

impl RoleMap {
    pub fn binding(&self, role: Role) -> Option<&RoleBinding> {
        match role {
            Role::Hand => self.hand.as_ref(),
            Role::Ground => self.ground.as_ref(),
            Role::One => self.objects[0].as_ref(),
            Role::Two => self.objects[1].as_ref(),
            Role::Three => self.objects[2].as_ref(),
        }
    }

    pub fn id(&self, role: Role) -> Option<&str> {
        self.binding(role).map(|b| b.id.as_str())
    }

    /// Role bound at or before `frame`.
    pub fn bound_at(&self, role: Role, frame: u64) -> Option<&str> {
        self.binding(role)
            .filter(|b| b.frame <= frame)
            .map(|b| b.id.as_str())
    }

    fn is_roled(&self, id: &str) -> bool {
        [Role::Hand, Role::Ground, Role::One, Role::Two, Role::Three]
            .iter()
            .any(|&r| self.id(r) == Some(id))
    }
}

/// Settings of the stream-to-table transduction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EsecConfig {
    #[serde(rename = "static")]
    pub static_cfg: StaticConfig,
    pub dynamic: DynamicConfig,
    /// Frames a new relation vector must persist before it becomes a column.
    /// `None` means half a second at the stream frame rate.
    pub debounce: Option<usize>,
    /// Objects 2 and 3 by the verbal rule (first un-touched / first touched by
    /// object 1) instead of chronological order.
    pub literal_roles: bool,
}

impl EsecConfig {
    pub fn validate(&self) -> Result<()> {
        self.static_cfg.validate()?;
        self.dynamic.validate()
    }

    pub fn debounce_frames(&self, fps: f64) -> usize {
        self.debounce
            .unwrap_or_else(|| libm::round(0.5 * fps) as usize)
            .max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RelationVector {
    pub tn: [TnRelation; ROWS],
    pub ssr: [SsrRelation; ROWS],
    pub dsr: [DsrRelation; ROWS],
}

impl RelationVector {
    pub const UNDEFINED: RelationVector = RelationVector {
        tn: [TnRelation::Undefined; ROWS],
        ssr: [SsrRelation::Undefined; ROWS],
        dsr: [DsrRelation::Undefined; ROWS],
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsecColumn {
    pub t: f64,
    pub frame: u64,
    pub tn: [TnRelation; ROWS],
    pub ssr: [SsrRelation; ROWS],
    pub dsr: [DsrRelation; ROWS],
}

impl EsecColumn {
    pub fn vector(&self) -> RelationVector {
        RelationVector {
            tn: self.tn,
            ssr: self.ssr,
            dsr: self.dsr,
        }
    }

    fn from_vector(frame: u64, t: f64, v: RelationVector) -> Self {
        EsecColumn {
            t,
            frame,
            tn: v.tn,
            ssr: v.ssr,
            dsr: v.dsr,
        }
    }
}

/// Extended semantic event chain of one action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Esec {
    pub columns: Vec<EsecColumn>,
    pub roles: RoleMap,
    pub label: Option<String>,
    /// First and last hand-visible instants (s).
    pub t_start: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecColumn {
    pub t: f64,
    pub frame: u64,
    pub tn: [TnRelation; ROWS],
}

/// Touching-only projection of an ESEC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sec {
    pub columns: Vec<SecColumn>,
    pub label: Option<String>,
    pub t_start: f64,
    pub t_end: f64,
}

/// Read access shared by ESECs and SECs, used by similarity and prediction.
///
/// A SEC reports `U` for its missing static and dynamic cells so both kinds
/// compare through the same measure.
pub trait EventChain {
    fn column_count(&self) -> usize;
    fn cell(&self, column: usize, row: usize) -> (TnRelation, SsrRelation, DsrRelation);
    fn column_time(&self, column: usize) -> f64;
    /// Action start and end (s).
    fn span(&self) -> (f64, f64);
    fn label(&self) -> Option<&str>;
}

impl EventChain for Esec {
    fn column_count(&self) -> usize {
        self.columns.len()
    }

    fn cell(&self, column: usize, row: usize) -> (TnRelation, SsrRelation, DsrRelation) {
        let c = &self.columns[column];
        (c.tn[row], c.ssr[row], c.dsr[row])
    }

    fn column_time(&self, column: usize) -> f64 {
        self.columns[column].t
    }

    fn span(&self) -> (f64, f64) {
        (self.t_start, self.t_end)
    }

    fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }
}

impl EventChain for Sec {
    fn column_count(&self) -> usize {
        self.columns.len()
    }

    fn cell(&self, column: usize, row: usize) -> (TnRelation, SsrRelation, DsrRelation) {
        (
            self.columns[column].tn[row],
            SsrRelation::Undefined,
            DsrRelation::Undefined,
        )
    }

    fn column_time(&self, column: usize) -> f64 {
        self.columns[column].t
    }

    fn span(&self) -> (f64, f64) {
        (self.t_start, self.t_end)
    }

    fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }
}

impl Esec {
    /// Relation vectors of the columns with their frames and times.
    pub fn replay(&self) -> Vec<(u64, f64, RelationVector)> {
        self.columns
            .iter()
            .map(|c| (c.frame, c.t, c.vector()))
            .collect()
    }
}

/// First and last frame positions (into `stream.frames`) with a visible hand.
fn hand_window(stream: &SceneStream) -> Option<(usize, usize)> {
    let visible = |f: &FrameRecord| f.hand().is_some_and(|h| h.visible);
    let first = stream.frames.iter().position(visible)?;
    let last = stream.frames.iter().rposition(visible)?;
    Some((first, last))
}

/// Action start and end: first and last instants with the hand visible.
pub fn action_window(stream: &SceneStream) -> Result<(f64, f64)> {
    let (a, b) = hand_window(stream).ok_or(Error::NoActionWindow)?;
    Ok((stream.frames[a].t, stream.frames[b].t))
}

fn touches(a: Option<&ObjectState>, b: Option<&ObjectState>, cfg: &StaticConfig) -> Option<bool> {
    match (a, b) {
        (Some(a), Some(b)) if a.present() && b.present() => {
            Some(touching(a, b, cfg) == TnRelation::Touching)
        }
        _ => None,
    }
}

/// Bind hand, ground and objects 1-3 over the action window.
///
/// Object 1 is the first non-ground object touched by the hand. By default
/// objects 2 and 3 go, in order, to the next objects that start or stop
/// touching an already roled object (hand, 1 or 2; never the ground). With
/// `literal_roles`, object 2 is the first object un-touched by object 1 and
/// object 3 the first touched by it. Simultaneous candidates bind in
/// lexicographic id order.
pub fn assign_roles(stream: &SceneStream, cfg: &EsecConfig) -> RoleMap {
    let mut roles = RoleMap::default();
    let Some((first, last)) = hand_window(stream) else {
        if let Some(g) = stream.ground_id() {
            roles.ground = Some(RoleBinding {
                id: g.into(),
                frame: stream.frames[0].index,
            });
        }
        return roles;
    };
    let start_index = stream.frames[first].index;
    let hand_id = stream.frames[first]
        .hand()
        .map(|h| h.id.clone())
        .unwrap_or_default();
    roles.hand = Some(RoleBinding {
        id: hand_id.clone(),
        frame: start_index,
    });
    if let Some(g) = stream.ground_id() {
        roles.ground = Some(RoleBinding {
            id: g.into(),
            frame: start_index,
        });
    }
    let ground_id = roles.ground.as_ref().map(|g| g.id.clone());
    let scfg = &cfg.static_cfg;

    for pos in first..=last {
        if roles.objects.iter().all(|o| o.is_some()) {
            break;
        }
        let frame = &stream.frames[pos];
        let prev = (pos > first).then(|| &stream.frames[pos - 1]);
        let unroled = |roles: &RoleMap| -> Vec<&ObjectState> {
            let mut v: Vec<&ObjectState> = frame
                .objects
                .iter()
                .filter(|o| {
                    !o.is_hand && Some(&o.id) != ground_id.as_ref() && !roles.is_roled(&o.id)
                })
                .collect();
            v.sort_by(|a, b| a.id.cmp(&b.id));
            v
        };

        if roles.objects[0].is_none() {
            let hand = frame.object(&hand_id);
            if let Some(o) = unroled(&roles)
                .into_iter()
                .find(|o| touches(hand, Some(o), scfg) == Some(true))
            {
                roles.objects[0] = Some(RoleBinding {
                    id: o.id.clone(),
                    frame: frame.index,
                });
            }
        }
        let Some(prev) = prev else { continue };
        if roles.objects[0].is_none() {
            continue;
        }

        // (started touching, stopped touching) relative to `partner`.
        let change = |o: &ObjectState, partner: &str| -> (bool, bool) {
            let now = touches(Some(o), frame.object(partner), scfg);
            let before = touches(prev.object(&o.id), prev.object(partner), scfg);
            match (before, now) {
                (Some(false), Some(true)) => (true, false),
                (Some(true), Some(false)) => (false, true),
                _ => (false, false),
            }
        };

        if cfg.literal_roles {
            let one = roles.objects[0]
                .as_ref()
                .map(|b| b.id.clone())
                .unwrap_or_default();
            for o in unroled(&roles) {
                let (on, off) = change(o, &one);
                if off && roles.objects[1].is_none() {
                    roles.objects[1] = Some(RoleBinding {
                        id: o.id.clone(),
                        frame: frame.index,
                    });
                } else if on && roles.objects[2].is_none() {
                    roles.objects[2] = Some(RoleBinding {
                        id: o.id.clone(),
                        frame: frame.index,
                    });
                }
            }
        } else {
            let partners: Vec<String> = [Role::Hand, Role::One, Role::Two]
                .iter()
                .filter_map(|&r| roles.id(r).map(String::from))
                .collect();
            let hits: Vec<String> = unroled(&roles)
                .into_iter()
                .filter(|o| {
                    partners.iter().any(|p| {
                        let (on, off) = change(o, p);
                        on || off
                    })
                })
                .map(|o| o.id.clone())
                .collect();
            for id in hits {
                if let Some(slot) = roles.objects.iter_mut().find(|s| s.is_none()) {
                    *slot = Some(RoleBinding {
                        id,
                        frame: frame.index,
                    });
                }
            }
        }
    }
    roles
}

/// Collapse a frame-wise vector sequence into columns.
///
/// The first vector always opens column 0. Afterwards a run of identical
/// vectors becomes a column when it differs from the last column and lasts at
/// least `debounce` frames; shorter runs are dropped.
pub fn compress<I>(vectors: I, debounce: usize) -> Vec<EsecColumn>
where
    I: IntoIterator<Item = (u64, f64, RelationVector)>,
{
    let debounce = debounce.max(1);
    let mut columns: Vec<EsecColumn> = Vec::new();
    let mut run: Option<(u64, f64, RelationVector, usize)> = None;

    let flush = |columns: &mut Vec<EsecColumn>, run: (u64, f64, RelationVector, usize)| {
        let (frame, t, v, len) = run;
        match columns.last() {
            None => columns.push(EsecColumn::from_vector(frame, t, v)),
            Some(last) if last.vector() != v && len >= debounce => {
                columns.push(EsecColumn::from_vector(frame, t, v))
            }
            _ => {}
        }
    };

    for (frame, t, v) in vectors {
        match run.as_mut() {
            Some(r) if r.2 == v => r.3 += 1,
            _ => {
                if let Some(r) = run.take() {
                    flush(&mut columns, r);
                }
                run = Some((frame, t, v, 1));
            }
        }
    }
    if let Some(r) = run {
        flush(&mut columns, r);
    }
    columns
}

/// Build the ESEC of a stream.
pub fn build_esec(stream: &SceneStream, cfg: &EsecConfig) -> Esec {
    let stream = stream.to_y_down();
    let roles = assign_roles(&stream, cfg);
    let Some((first, last)) = hand_window(&stream) else {
        let f0 = &stream.frames[0];
        return Esec {
            columns: vec![EsecColumn::from_vector(
                f0.index,
                f0.t,
                RelationVector::UNDEFINED,
            )],
            roles,
            label: stream.label.clone(),
            t_start: f0.t,
            t_end: f0.t,
        };
    };

    let tracks: Vec<Option<Vec<DsrRelation>>> = PAIRS
        .iter()
        .map(|&(p, q)| {
            let (a, b) = (roles.id(p)?, roles.id(q)?);
            Some(dsr_track(&stream, a, b, &cfg.static_cfg, &cfg.dynamic))
        })
        .collect();

    let vectors = (first..=last).map(|pos| {
        let frame = &stream.frames[pos];
        let mut v = RelationVector::UNDEFINED;
        for (row, &(p, q)) in PAIRS.iter().enumerate() {
            let (Some(a), Some(b)) = (
                roles.bound_at(p, frame.index),
                roles.bound_at(q, frame.index),
            ) else {
                continue;
            };
            let (Some(a), Some(b)) = (frame.object(a), frame.object(b)) else {
                continue;
            };
            if !a.intact || !b.intact {
                v.tn[row] = TnRelation::Destroyed;
                v.ssr[row] = SsrRelation::Destroyed;
                v.dsr[row] = DsrRelation::Destroyed;
            } else if !a.visible || !b.visible {
                v.tn[row] = TnRelation::Absent;
                v.ssr[row] = SsrRelation::Absent;
                v.dsr[row] = DsrRelation::Absent;
            } else {
                let tn = touching(a, b, &cfg.static_cfg);
                v.tn[row] = tn;
                v.ssr[row] = main_ssr(a, b, tn, &cfg.static_cfg);
                v.dsr[row] = tracks[row]
                    .as_ref()
                    .map_or(DsrRelation::Undefined, |track| track[pos]);
            }
        }
        (frame.index, frame.t, v)
    });

    Esec {
        columns: compress(vectors, cfg.debounce_frames(stream.fps)),
        roles,
        label: stream.label.clone(),
        t_start: stream.frames[first].t,
        t_end: stream.frames[last].t,
    }
}

/// Keep only the touching sub-table and merge repeated columns.
pub fn project_sec(esec: &Esec) -> Sec {
    let mut columns: Vec<SecColumn> = Vec::new();
    for c in &esec.columns {
        if columns.last().is_none_or(|last| last.tn != c.tn) {
            columns.push(SecColumn {
                t: c.t,
                frame: c.frame,
                tn: c.tn,
            });
        }
    }
    Sec {
        columns,
        label: esec.label.clone(),
        t_start: esec.t_start,
        t_end: esec.t_end,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Aabb, Vec3};
    use crate::scene::FrameRecord;
    use alloc::string::ToString;

    fn cube(center: Vec3, side: f64) -> Aabb {
        Aabb::from_center(center, [side; 3])
    }

    fn ground() -> ObjectState {
        ObjectState::ground(
            "table",
            Aabb::new([-1.0, -1.0, -1.0], [1.0, 0.0, 1.0]).unwrap(),
        )
    }

    /// World-up stream from per-frame object lists.
    fn stream(frames: Vec<Vec<ObjectState>>) -> SceneStream {
        SceneStream {
            frames: frames
                .into_iter()
                .enumerate()
                .map(|(i, objects)| FrameRecord {
                    index: i as u64,
                    t: i as f64 / 30.0,
                    objects,
                })
                .collect(),
            fps: 30.0,
            label: Some("test".to_string()),
            y_down: false,
        }
    }

    fn vector(tag: u8) -> RelationVector {
        let mut v = RelationVector::UNDEFINED;
        v.tn[0] = if tag == 0 {
            TnRelation::Touching
        } else {
            TnRelation::NonTouching
        };
        v.ssr[1] = if tag == 2 {
            SsrRelation::Above
        } else {
            SsrRelation::Undefined
        };
        v
    }

    fn seq(tags: &[(u8, usize)]) -> Vec<(u64, f64, RelationVector)> {
        let mut out = Vec::new();
        for &(tag, n) in tags {
            for _ in 0..n {
                let f = out.len() as u64;
                out.push((f, f as f64, vector(tag)));
            }
        }
        out
    }

    #[test]
    fn compress_emits_on_change() {
        let cols = compress(seq(&[(0, 3), (1, 2), (2, 4)]), 1);
        assert_eq!(cols.len(), 3);
        assert_eq!(cols.iter().map(|c| c.frame).collect::<Vec<_>>(), [0, 3, 5]);
    }

    #[test]
    fn debounce_drops_short_runs() {
        let cols = compress(seq(&[(0, 5), (1, 2), (0, 5), (2, 3)]), 3);
        assert_eq!(cols.len(), 2);
        assert_eq!(cols[1].frame, 12);
        // First run is kept even when shorter than the debounce.
        let cols = compress(seq(&[(0, 1), (1, 5)]), 3);
        assert_eq!(cols.len(), 2);
    }

    #[test]
    fn compress_is_idempotent_on_replay() {
        let cols = compress(seq(&[(0, 3), (1, 2), (2, 4), (0, 1)]), 1);
        let esec = Esec {
            columns: cols.clone(),
            roles: RoleMap::default(),
            label: None,
            t_start: 0.0,
            t_end: 9.0,
        };
        assert_eq!(compress(esec.replay(), 1), cols);
    }

    fn hand_at(c: Vec3) -> ObjectState {
        ObjectState::hand("hand", cube(c, 0.08))
    }

    /// Hand approaches a cup resting on the table, grasps it and sets it
    /// onto a block.
    fn put_stream() -> SceneStream {
        let mut frames = Vec::new();
        let cup_rest = [0.0, 0.05, 0.0];
        let block = ObjectState::new("block", cube([0.4, 0.05, 0.0], 0.1));
        for i in 0..120 {
            let s = i as f64 / 119.0;
            // Approach, hold, lift and carry, then rest on the block.
            let cup_c = if s < 0.35 {
                cup_rest
            } else if s < 0.65 {
                let u = (s - 0.35) / 0.3;
                [
                    0.4 * u,
                    0.05 + 0.2 * (1.0 - (2.0 * u - 1.0) * (2.0 * u - 1.0)) + 0.1 * u,
                    0.0,
                ]
            } else {
                [0.4, 0.15, 0.0]
            };
            let hand_c = if s < 0.25 {
                let u = s / 0.25;
                [-0.5 + 0.41 * u, 0.05, 0.0]
            } else if s < 0.35 {
                let u = 1.0;
                [-0.5 + 0.41 * u, 0.05, 0.0]
            } else {
                [cup_c[0] - 0.09, cup_c[1], 0.0]
            };
            frames.push(vec![
                ground(),
                hand_at(hand_c),
                ObjectState::new("cup", cube(cup_c, 0.1)),
                block.clone(),
                ObjectState::new("zz_distractor", cube([-0.6, 0.05, 0.5], 0.1)),
            ]);
        }
        stream(frames)
    }

    #[test]
    fn chronological_roles() {
        let s = put_stream();
        let roles = assign_roles(&s.to_y_down(), &EsecConfig::default());
        assert_eq!(roles.id(Role::Hand), Some("hand"));
        assert_eq!(roles.id(Role::Ground), Some("table"));
        assert_eq!(roles.id(Role::One), Some("cup"));
        assert_eq!(roles.id(Role::Two), Some("block"));
        assert_eq!(roles.id(Role::Three), None);
        assert!(roles.binding(Role::Two).unwrap().frame >= roles.binding(Role::One).unwrap().frame);
    }

    #[test]
    fn literal_roles_use_object_one_contacts() {
        let s = put_stream().to_y_down();
        let cfg = EsecConfig {
            literal_roles: true,
            ..EsecConfig::default()
        };
        let roles = assign_roles(&s, &cfg);
        assert_eq!(roles.id(Role::One), Some("cup"));
        // The cup never leaves a non-ground object, it only touches the block.
        assert_eq!(roles.id(Role::Two), None);
        assert_eq!(roles.id(Role::Three), Some("block"));
    }

    #[test]
    fn simultaneous_first_contact_breaks_ties_by_id() {
        let frames = (0..20)
            .map(|_| {
                vec![
                    ground(),
                    ObjectState::hand("hand", Aabb::new([0.0, 0.1, 0.0], [0.1, 0.2, 0.1]).unwrap()),
                    ObjectState::new("b", Aabb::new([0.1, 0.1, 0.0], [0.2, 0.2, 0.1]).unwrap()),
                    ObjectState::new("a", Aabb::new([-0.1, 0.1, 0.0], [0.0, 0.2, 0.1]).unwrap()),
                ]
            })
            .collect();
        let roles = assign_roles(&stream(frames), &EsecConfig::default());
        assert_eq!(roles.id(Role::One), Some("a"));
    }

    #[test]
    fn put_esec_rows() {
        let s = put_stream();
        let cfg = EsecConfig {
            debounce: Some(3),
            ..EsecConfig::default()
        };
        let esec = build_esec(&s, &cfg);
        use TnRelation::*;
        let tn: Vec<[TnRelation; 3]> = esec
            .columns
            .iter()
            .map(|c| [c.tn[0], c.tn[4], c.tn[6]])
            .collect();
        // (H,1), (1,2), (1,G) touching rows change in the scripted order.
        assert_eq!(tn.first().unwrap(), &[Undefined, Undefined, Undefined]);
        assert_eq!(tn.last().unwrap(), &[Touching, Touching, NonTouching]);
        let sec = project_sec(&esec);
        let pattern: Vec<[TnRelation; 3]> = sec
            .columns
            .iter()
            .map(|c| [c.tn[0], c.tn[4], c.tn[6]])
            .collect();
        assert_eq!(
            pattern,
            [
                [Undefined, Undefined, Undefined],
                [Touching, Undefined, Touching],
                [Touching, Undefined, NonTouching],
                [Touching, Touching, NonTouching],
            ]
        );
        assert!(sec.columns.len() <= esec.columns.len());
        // Distractors never enter the table.
        assert!(!esec.roles.is_roled("zz_distractor"));
        assert_eq!(build_esec(&s, &cfg), esec);
    }

    #[test]
    fn esec_invariants_hold() {
        let esec = build_esec(&put_stream(), &EsecConfig::default());
        for w in esec.columns.windows(2) {
            assert_ne!(w[0].vector(), w[1].vector());
            assert!(w[0].t < w[1].t);
        }
        for c in &esec.columns {
            for row in 0..ROWS {
                if matches!(
                    c.ssr[row],
                    SsrRelation::Top | SsrRelation::Bottom | SsrRelation::AroundTouching
                ) {
                    assert_eq!(c.tn[row], TnRelation::Touching);
                }
                if c.tn[row] == TnRelation::Undefined {
                    assert_eq!(c.ssr[row], SsrRelation::Undefined);
                    assert_eq!(c.dsr[row], DsrRelation::Undefined);
                }
            }
            // Pairs with object 3 are never instantiated here.
            for row in [2, 5, 7, 9] {
                assert_eq!(c.tn[row], TnRelation::Undefined);
            }
        }
    }

    #[test]
    fn static_scene_has_one_column() {
        let frames = (0..40)
            .map(|_| {
                vec![
                    ground(),
                    hand_at([0.0, 0.5, 0.0]),
                    ObjectState::new("cup", cube([0.5, 0.05, 0.0], 0.1)),
                ]
            })
            .collect();
        let esec = build_esec(&stream(frames), &EsecConfig::default());
        assert_eq!(esec.columns.len(), 1);
        assert_eq!(esec.roles.id(Role::One), None);
    }

    #[test]
    fn no_hand_gives_single_undefined_column() {
        let frames = (0..5).map(|_| vec![ground()]).collect();
        let s = stream(frames);
        let esec = build_esec(&s, &EsecConfig::default());
        assert_eq!(esec.columns.len(), 1);
        assert_eq!(esec.columns[0].vector(), RelationVector::UNDEFINED);
        assert_eq!(action_window(&s), Err(Error::NoActionWindow));
    }

    #[test]
    fn action_window_bounds() {
        let frames: Vec<Vec<ObjectState>> = (0..330)
            .map(|i| {
                if i < 30 {
                    vec![ground()]
                } else {
                    vec![ground(), hand_at([0.0, 0.5, 0.0])]
                }
            })
            .collect();
        let (a, b) = action_window(&stream(frames)).unwrap();
        assert!((a - 1.0).abs() < 1e-12);
        assert!((b - 329.0 / 30.0).abs() < 1e-12);
    }

    #[test]
    fn hidden_and_destroyed_override_rows() {
        let mut frames = Vec::new();
        for i in 0..60 {
            let mut block = ObjectState::new("block", cube([0.0, 0.05, 0.0], 0.1));
            block.intact = i < 40;
            let mut hand = hand_at([0.0, 0.14, 0.0]);
            hand.visible = true;
            frames.push(vec![ground(), hand, block]);
        }
        let esec = build_esec(
            &stream(frames),
            &EsecConfig {
                debounce: Some(1),
                ..EsecConfig::default()
            },
        );
        let last = esec.columns.last().unwrap();
        assert_eq!(last.tn[0], TnRelation::Destroyed);
        assert_eq!(last.ssr[6], SsrRelation::Destroyed);
        assert_eq!(last.tn[3], TnRelation::NonTouching);
    }
}
