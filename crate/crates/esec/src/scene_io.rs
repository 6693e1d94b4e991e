//! Line-delimited JSON scene files.
//!
//! The first line is a header `{"fps":30.0,"label":"hide","y_down":true}`;
//! every following line is one frame
//! `{"i":0,"t":0.0,"objects":[{"id":"cup","min":[..],"max":[..],...}]}`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use esec_core::geometry::{Aabb, Vec3};
use esec_core::scene::{FrameRecord, ObjectState, SceneStream};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    fps: f64,
    label: Option<String>,
    #[serde(default = "yes")]
    y_down: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectRecord {
    id: String,
    min: Vec3,
    max: Vec3,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    visible: bool,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    intact: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    hand: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    ground: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec3>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameLine {
    i: u64,
    t: f64,
    objects: Vec<ObjectRecord>,
}

impl ObjectRecord {
    fn into_state(self, line: usize) -> Result<ObjectState> {
        let aabb = Aabb::new(self.min, self.max).map_err(|e| Error::Malformed {
            line,
            message: format!("object {:?}: {e}", self.id),
        })?;
        Ok(ObjectState {
            id: self.id,
            aabb,
            visible: self.visible,
            intact: self.intact,
            is_hand: self.hand,
            is_ground: self.ground,
            points: self.points,
        })
    }

    fn from_state(o: &ObjectState) -> Self {
        ObjectRecord {
            id: o.id.clone(),
            min: o.aabb.min,
            max: o.aabb.max,
            visible: o.visible,
            intact: o.intact,
            hand: o.is_hand,
            ground: o.is_ground,
            points: o.points.clone(),
        }
    }
}

fn malformed(line: usize, e: impl std::fmt::Display) -> Error {
    Error::Malformed {
        line,
        message: e.to_string(),
    }
}

/// Parse and validate a scene from any line reader.
pub fn read_scene_from(reader: impl BufRead) -> Result<SceneStream> {
    let mut header: Option<Header> = None;
    let mut frames = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| malformed(line_no, e))?;
        if line.trim().is_empty() {
            continue;
        }
        if header.is_none() {
            header = Some(serde_json::from_str(&line).map_err(|e| malformed(line_no, e))?);
            continue;
        }
        let rec: FrameLine = serde_json::from_str(&line).map_err(|e| malformed(line_no, e))?;
        let objects = rec
            .objects
            .into_iter()
            .map(|o| o.into_state(line_no))
            .collect::<Result<Vec<_>>>()?;
        frames.push(FrameRecord {
            index: rec.i,
            t: rec.t,
            objects,
        });
    }
    let header = header.ok_or(esec_core::Error::NoFrames)?;
    let stream = SceneStream {
        frames,
        fps: header.fps,
        label: header.label,
        y_down: header.y_down,
    };
    stream.validate()?;
    Ok(stream)
}

/// Parse and validate a scene held in memory.
pub fn parse_scene(bytes: &[u8]) -> Result<SceneStream> {
    read_scene_from(bytes)
}

pub fn read_scene(path: &Path) -> Result<SceneStream> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_scene_from(BufReader::new(file)).map_err(|e| match e {
        Error::Io { .. } => e,
        other => Error::Format(format!("{}: {other}", path.display())),
    })
}

pub fn write_scene_to(mut w: impl Write, stream: &SceneStream) -> Result<()> {
    let header = Header {
        fps: stream.fps,
        label: stream.label.clone(),
        y_down: stream.y_down,
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    for f in &stream.frames {
        let rec = FrameLine {
            i: f.index,
            t: f.t,
            objects: f.objects.iter().map(ObjectRecord::from_state).collect(),
        };
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))
}

pub fn serialize_scene(stream: &SceneStream) -> Vec<u8> {
    let mut out = Vec::new();
    write_scene_to(&mut out, stream).expect("writing to memory cannot fail");
    out
}

pub fn write_scene(path: &Path, stream: &SceneStream) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_scene_to(BufWriter::new(file), stream)
}
