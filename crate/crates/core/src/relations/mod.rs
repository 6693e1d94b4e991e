//! Relation vocabularies and the thresholds that drive them.
//!
//! Symbols follow the usual ESEC legend: `T N U X A` for touching, the static
//! set `Ab Be R L F Ba Ar To Bo ArT In Sa Bw O` and the dynamic set
//! `MT HT FMT GC MA S Q`. The static and dynamic enums also carry `U`, `A`
//! and `X` so that undefined, absent and destroyed objects can fill all
//! three sub-tables of a column.

use alloc::format;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod dynamic;
mod spatial;

pub use dynamic::{dsr, dsr_track, WindowEnd};
pub use spatial::{
    between, main_ssr, main_ssr_boxes, shadow_area, ssr_candidates, touching, touching_boxes,
    CandidateSet,
};

macro_rules! symbolic_enum {
    (
        $(#[$meta:meta])*
        pub enum $name:ident { $($(#[$vmeta:meta])* $variant:ident => $sym:literal,)+ }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $($(#[$vmeta])* #[serde(rename = $sym)] $variant,)+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant,)+];

            pub fn symbol(self) -> &'static str {
                match self {
                    $($name::$variant => $sym,)+
                }
            }

            pub fn from_symbol(s: &str) -> Option<Self> {
                match s {
                    $($sym => Some($name::$variant),)+
                    _ => None,
                }
            }
        }

        impl core::fmt::Display for $name {
            fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
                f.write_str(self.symbol())
            }
        }

        impl core::str::FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                $name::from_symbol(s).ok_or_else(|| {
                    Error::InvalidConfig(format!(concat!("unknown ", stringify!($name), " symbol {:?}"), s))
                })
            }
        }
    };
}

symbolic_enum! {
    /// Touching relation between two objects.
    pub enum TnRelation {
        Touching => "T",
        NonTouching => "N",
        /// Role not yet instantiated.
        Undefined => "U",
        Destroyed => "X",
        Absent => "A",
    }
}

symbolic_enum! {
    /// Main static spatial relation of an ordered pair.
    pub enum SsrRelation {
        Above => "Ab",
        Below => "Be",
        Right => "R",
        Left => "L",
        Front => "F",
        Back => "Ba",
        Around => "Ar",
        Top => "To",
        Bottom => "Bo",
        AroundTouching => "ArT",
        Inside => "In",
        Surround => "Sa",
        Between => "Bw",
        Null => "O",
        Undefined => "U",
        Absent => "A",
        Destroyed => "X",
    }
}

symbolic_enum! {
    /// Dynamic spatial relation of a pair over a time window.
    pub enum DsrRelation {
        MovingTogether => "MT",
        HaltingTogether => "HT",
        FixedMovingTogether => "FMT",
        GettingClose => "GC",
        MovingApart => "MA",
        Stable => "S",
        VeryFar => "Q",
        Undefined => "U",
        Absent => "A",
        Destroyed => "X",
    }
}

impl TnRelation {
    pub fn from_touching(t: bool) -> Self {
        if t {
            TnRelation::Touching
        } else {
            TnRelation::NonTouching
        }
    }
}

/// Thresholds for touching and static relations, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StaticConfig {
    /// Largest per-axis box gap still counted as contact.
    pub eps_touch: f64,
    /// Separation beyond which the static relation is `O`.
    pub null_radius: f64,
    /// Radius within which R/L/F/Ba collapse into `Ar`.
    pub around_radius: f64,
    /// Use nearest-neighbour distance between point sets when both objects
    /// carry them.
    pub point_mode: bool,
}

impl Default for StaticConfig {
    fn default() -> Self {
        StaticConfig {
            eps_touch: 0.005,
            null_radius: 0.10,
            around_radius: 0.10,
            point_mode: false,
        }
    }
}

impl StaticConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_touch", self.eps_touch),
            ("null_radius", self.null_radius),
            ("around_radius", self.around_radius),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Window length and thresholds for dynamic relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DynamicConfig {
    /// Frames between the two compared samples.
    pub window: usize,
    /// Center-distance change marking getting close / moving apart (m).
    pub xi: f64,
    /// Center-distance change below which a non-touching pair is stable (m).
    pub stable_eps: f64,
    /// Distance above which unmatched pairs are reported as very far (m).
    pub far_threshold: f64,
    /// Center displacement counted as motion for touching pairs (m).
    pub move_eps: f64,
    /// Use `delta < xi` for getting close instead of `delta < -xi`.
    pub literal_gc: bool,
}

impl Default for DynamicConfig {
    fn default() -> Self {
        DynamicConfig {
            window: 10,
            xi: 0.10,
            stable_eps: 0.01,
            far_threshold: 0.10,
            move_eps: 0.005,
            literal_gc: false,
        }
    }
}

impl DynamicConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 1 {
            return Err(Error::InvalidConfig("window must be >= 1".into()));
        }
        for (name, v) in [
            ("xi", self.xi),
            ("stable_eps", self.stable_eps),
            ("far_threshold", self.far_threshold),
            ("move_eps", self.move_eps),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.stable_eps >= self.xi {
            return Err(Error::InvalidConfig(
                "stable_eps must be smaller than xi".into(),
            ));
        }
        Ok(())
    }
}
