//! Windowed dynamic spatial relations.
//!
//! The relation at frame `f` compares the pair at `f` with the pair at
//! `f + window`, so the label describes the motion that starts at `f`.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{distance, Aabb};
use crate::scene::SceneStream;

use super::spatial::touching;
use super::{DsrRelation, DynamicConfig, StaticConfig, TnRelation};

/// One end of a comparison window: both boxes and their touching relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowEnd {
    pub a: Aabb,
    pub b: Aabb,
    pub tn: TnRelation,
}

/// Dynamic relation between the window start and end samples.
///
/// A non-touching pair whose boxes are further apart than `far_threshold`
/// at the window start is never `S`; it can still be getting close or moving
/// apart.
pub fn dsr(start: &WindowEnd, end: &WindowEnd, cfg: &DynamicConfig) -> DsrRelation {
    use TnRelation::{NonTouching, Touching};

    let ca0 = start.a.center();
    let cb0 = start.b.center();
    let ca1 = end.a.center();
    let cb1 = end.b.center();

    match (start.tn, end.tn) {
        (Touching, Touching) => {
            let a_moved = distance(ca0, ca1) > cfg.move_eps;
            let b_moved = distance(cb0, cb1) > cfg.move_eps;
            match (a_moved, b_moved) {
                (true, true) => DsrRelation::MovingTogether,
                (false, false) => DsrRelation::HaltingTogether,
                _ => DsrRelation::FixedMovingTogether,
            }
        }
        (NonTouching, NonTouching) => {
            let delta = distance(ca1, cb1) - distance(ca0, cb0);
            let closing = if cfg.literal_gc {
                delta < cfg.xi
            } else {
                delta < -cfg.xi
            };
            if closing {
                DsrRelation::GettingClose
            } else if delta > cfg.xi {
                DsrRelation::MovingApart
            } else if delta.abs() < cfg.stable_eps
                && start.a.separation(&start.b) <= cfg.far_threshold
            {
                DsrRelation::Stable
            } else {
                DsrRelation::VeryFar
            }
        }
        _ => DsrRelation::VeryFar,
    }
}

/// Per-frame dynamic relation of objects `a_id` and `b_id`.
///
/// Frames whose window does not fit in the stream repeat the last computed
/// label; a stream shorter than one window is all `U`. Frames where either
/// object is missing, hidden or destroyed are `U`; when only the window end
/// lacks the pair, the previous frame's label is kept.
pub fn dsr_track(
    stream: &SceneStream,
    a_id: &str,
    b_id: &str,
    static_cfg: &StaticConfig,
    cfg: &DynamicConfig,
) -> Vec<DsrRelation> {
    let n = stream.frames.len();
    let w = cfg.window.max(1);
    let mut out = vec![DsrRelation::Undefined; n];
    if n <= w {
        return out;
    }
    let sample = |f: usize| -> Option<WindowEnd> {
        let frame = &stream.frames[f];
        let a = frame.object(a_id).filter(|o| o.present())?;
        let b = frame.object(b_id).filter(|o| o.present())?;
        Some(WindowEnd {
            a: a.aabb,
            b: b.aabb,
            tn: touching(a, b, static_cfg),
        })
    };
    let ends: Vec<Option<WindowEnd>> = (0..n).map(sample).collect();
    for f in 0..n - w {
        match (&ends[f], &ends[f + w]) {
            (Some(s), Some(e)) => out[f] = dsr(s, e, cfg),
            // The pair vanishes inside the window: keep the running label.
            (Some(_), None) if f > 0 && ends[f - 1].is_some() => out[f] = out[f - 1],
            _ => {}
        }
    }
    for f in n - w..n {
        if ends[f].is_some() {
            out[f] = out[f - 1];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use crate::scene::{FrameRecord, ObjectState};

    fn cube_at(c: Vec3) -> Aabb {
        Aabb::from_center(c, [0.1, 0.1, 0.1])
    }

    fn end(a: Vec3, b: Vec3, tn: TnRelation) -> WindowEnd {
        WindowEnd {
            a: cube_at(a),
            b: cube_at(b),
            tn,
        }
    }

    #[test]
    fn touching_pair_moving_together() {
        let cfg = DynamicConfig::default();
        let s = end([0.0; 3], [0.1, 0.0, 0.0], TnRelation::Touching);
        let e = end([0.05, 0.0, 0.0], [0.15, 0.0, 0.0], TnRelation::Touching);
        assert_eq!(dsr(&s, &e, &cfg), DsrRelation::MovingTogether);
    }

    #[test]
    fn touching_pair_halting_and_fixed_moving() {
        let cfg = DynamicConfig::default();
        let s = end([0.0; 3], [0.1, 0.0, 0.0], TnRelation::Touching);
        assert_eq!(dsr(&s, &s, &cfg), DsrRelation::HaltingTogether);
        let e = end([0.0, 0.05, 0.0], [0.1, 0.0, 0.0], TnRelation::Touching);
        assert_eq!(dsr(&s, &e, &cfg), DsrRelation::FixedMovingTogether);
    }

    #[test]
    fn closing_distance_is_getting_close() {
        // Hand-stepped: centers 0.50 m apart, then 0.30 m apart.
        let cfg = DynamicConfig::default();
        let s = end([0.0; 3], [0.5, 0.0, 0.0], TnRelation::NonTouching);
        let e = end([0.2, 0.0, 0.0], [0.5, 0.0, 0.0], TnRelation::NonTouching);
        assert_eq!(dsr(&s, &e, &cfg), DsrRelation::GettingClose);
        assert_eq!(dsr(&e, &s, &cfg), DsrRelation::MovingApart);
    }

    #[test]
    fn mixed_touching_is_very_far() {
        let cfg = DynamicConfig::default();
        let s = end([0.0; 3], [0.1, 0.0, 0.0], TnRelation::Touching);
        let e = end([0.0; 3], [0.3, 0.0, 0.0], TnRelation::NonTouching);
        assert_eq!(dsr(&s, &e, &cfg), DsrRelation::VeryFar);
    }

    #[test]
    fn literal_gc_reading_labels_stable_pairs_as_closing() {
        let cfg = DynamicConfig {
            literal_gc: true,
            ..DynamicConfig::default()
        };
        let s = end([0.0; 3], [0.5, 0.0, 0.0], TnRelation::NonTouching);
        assert_eq!(dsr(&s, &s, &cfg), DsrRelation::GettingClose);
    }

    fn static_stream(gap: f64, frames: usize) -> SceneStream {
        let frames = (0..frames)
            .map(|i| FrameRecord {
                index: i as u64,
                t: i as f64 / 30.0,
                objects: alloc::vec![
                    ObjectState::new("a", cube_at([0.0; 3])),
                    ObjectState::new("b", cube_at([0.1 + gap, 0.0, 0.0])),
                ],
            })
            .collect();
        SceneStream {
            frames,
            fps: 30.0,
            label: None,
            y_down: true,
        }
    }

    #[test]
    fn static_close_pair_is_stable() {
        let s = static_stream(0.05, 40);
        let track = dsr_track(
            &s,
            "a",
            "b",
            &StaticConfig::default(),
            &DynamicConfig::default(),
        );
        assert!(track.iter().all(|&r| r == DsrRelation::Stable));
    }

    #[test]
    fn static_far_pair_is_very_far() {
        let s = static_stream(1.0, 40);
        let track = dsr_track(
            &s,
            "a",
            "b",
            &StaticConfig::default(),
            &DynamicConfig::default(),
        );
        assert!(track.iter().all(|&r| r == DsrRelation::VeryFar));
    }

    #[test]
    fn short_stream_is_undefined() {
        let s = static_stream(0.05, 9);
        let track = dsr_track(
            &s,
            "a",
            "b",
            &StaticConfig::default(),
            &DynamicConfig::default(),
        );
        assert!(track.iter().all(|&r| r == DsrRelation::Undefined));
    }

    #[test]
    fn missing_object_is_undefined() {
        let s = static_stream(0.05, 20);
        let track = dsr_track(
            &s,
            "a",
            "zz",
            &StaticConfig::default(),
            &DynamicConfig::default(),
        );
        assert!(track.iter().all(|&r| r == DsrRelation::Undefined));
    }

    #[test]
    fn vanishing_object_keeps_running_label() {
        let mut s = static_stream(0.05, 30);
        for f in &mut s.frames[20..] {
            f.objects[1].visible = false;
        }
        let track = dsr_track(
            &s,
            "a",
            "b",
            &StaticConfig::default(),
            &DynamicConfig::default(),
        );
        assert!(track[..20].iter().all(|&r| r == DsrRelation::Stable));
        assert!(track[20..].iter().all(|&r| r == DsrRelation::Undefined));
    }
}
