//! Scene data model: objects, frames and validated streams.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectState {
    pub id: String,
    pub aabb: Aabb,
    pub visible: bool,
    pub intact: bool,
    pub is_hand: bool,
    pub is_ground: bool,
    /// Optional surface samples for point-set touching.
    pub points: Option<Vec<Vec3>>,
}

impl ObjectState {
    pub fn new(id: impl Into<String>, aabb: Aabb) -> Self {
        ObjectState {
            id: id.into(),
            aabb,
            visible: true,
            intact: true,
            is_hand: false,
            is_ground: false,
            points: None,
        }
    }

    pub fn hand(id: impl Into<String>, aabb: Aabb) -> Self {
        ObjectState {
            is_hand: true,
            ..ObjectState::new(id, aabb)
        }
    }

    pub fn ground(id: impl Into<String>, aabb: Aabb) -> Self {
        ObjectState {
            is_ground: true,
            ..ObjectState::new(id, aabb)
        }
    }

    /// Visible and intact: relations can be evaluated geometrically.
    pub fn present(&self) -> bool {
        self.visible && self.intact
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub index: u64,
    /// Seconds.
    pub t: f64,
    pub objects: Vec<ObjectState>,
}

impl FrameRecord {
    pub fn object(&self, id: &str) -> Option<&ObjectState> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn hand(&self) -> Option<&ObjectState> {
        self.objects.iter().find(|o| o.is_hand)
    }

    pub fn ground(&self) -> Option<&ObjectState> {
        self.objects.iter().find(|o| o.is_ground)
    }
}

/// Time-ordered frames of one recorded (or generated) action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneStream {
    pub frames: Vec<FrameRecord>,
    /// Frame rate (frames per second).
    pub fps: f64,
    pub label: Option<String>,
    /// When true, smaller y means higher (image-style axis), the convention
    /// all relation rules are written in. World-up data sets this to false.
    pub y_down: bool,
}

impl SceneStream {
    /// Check the stream invariants: at least one frame, strictly increasing
    /// time, unique ids per frame, at most one ground (and the same one
    /// throughout), at most one hand per frame and no frame without a hand
    /// once one has appeared.
    pub fn validate(&self) -> Result<()> {
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(Error::InvalidFps(self.fps));
        }
        if self.frames.is_empty() {
            return Err(Error::NoFrames);
        }
        let mut ground_id: Option<&str> = None;
        let mut hand_seen = false;
        let mut prev_t: Option<f64> = None;
        for frame in &self.frames {
            if !frame.t.is_finite() || prev_t.is_some_and(|p| frame.t <= p) {
                return Err(Error::NonMonotonic { index: frame.index });
            }
            prev_t = Some(frame.t);

            let mut ids = BTreeSet::new();
            let mut grounds = 0;
            let mut hands = 0;
            for o in &frame.objects {
                o.aabb.validate()?;
                if !ids.insert(o.id.as_str()) {
                    return Err(Error::DuplicateObject {
                        index: frame.index,
                        id: o.id.clone(),
                    });
                }
                if o.is_ground {
                    grounds += 1;
                }
                if o.is_hand {
                    hands += 1;
                }
            }
            if grounds > 1 {
                return Err(Error::MultipleGrounds { index: frame.index });
            }
            if let Some(g) = frame.ground() {
                match ground_id {
                    None => ground_id = Some(g.id.as_str()),
                    Some(id) if id != g.id => {
                        return Err(Error::GroundChanged { index: frame.index })
                    }
                    _ => {}
                }
            }
            if hands > 1 {
                return Err(Error::MultipleHands { index: frame.index });
            }
            if hands == 1 {
                hand_seen = true;
            } else if hand_seen {
                return Err(Error::HandMissing { index: frame.index });
            }
        }
        Ok(())
    }

    /// Copy of the stream expressed with the image-style y axis.
    pub fn to_y_down(&self) -> SceneStream {
        if self.y_down {
            return self.clone();
        }
        let mut out = self.clone();
        out.y_down = true;
        for f in &mut out.frames {
            for o in &mut f.objects {
                o.aabb = o.aabb.flip_y();
                if let Some(pts) = o.points.as_mut() {
                    for p in pts.iter_mut() {
                        p[1] = -p[1];
                    }
                }
            }
        }
        out
    }

    pub fn hand_id(&self) -> Option<&str> {
        self.frames
            .iter()
            .find_map(|f| f.hand())
            .map(|h| h.id.as_str())
    }

    pub fn ground_id(&self) -> Option<&str> {
        self.frames
            .iter()
            .find_map(|f| f.ground())
            .map(|g| g.id.as_str())
    }
}
