//! Extraction and use of extended semantic event chains (ESECs).
//!
//! An ESEC is a symbolic table with one column per moment at which any
//! relation between the hand, the ground and up to three manipulated objects
//! changes. Each column holds ten touching relations, ten static spatial
//! relations and ten dynamic spatial relations, one per object pair.
//!
//! This crate is `no_std` (it needs `alloc`). File formats, parallel drivers
//! and the command line live in the `esec` companion crate.
//!
//! Module map:
//!
//! - [`geometry`] and [`scene`]: boxes, frames and validated scene streams.
//! - [`relations`]: per-frame touching and static relations, windowed dynamic
//!   relations.
//! - [`event_chain`]: role assignment, ESEC construction and SEC projection.
//! - [`similarity`] and [`cluster`]: the positional ESEC similarity and
//!   agglomerative clustering of similarity matrices.
//! - [`predict`]: causal column-by-column prediction and predictive power.
//! - [`generator`]: scripted synthesis of the ten experimental actions.
//! - [`chaining`]: two-agent predictive action chaining and its Monte-Carlo
//!   evaluation.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod chaining;
pub mod cluster;
pub mod error;
pub mod event_chain;
pub mod generator;
pub mod geometry;
pub mod predict;
pub mod relations;
pub mod scene;
pub mod similarity;

pub use chaining::{
    monte_carlo, schedule_chain, schedule_means, ActionTiming, ChainTimeline, MonteCarloConfig,
    MonteCarloStats, PredictionMode,
};
pub use cluster::{cluster, Dendrogram, Linkage};
pub use error::Error;
pub use event_chain::{action_window, build_esec, project_sec, Esec, EsecColumn, EsecConfig, Sec};
pub use generator::{generate_scene, Action, GenParams};
pub use geometry::{aabb_metrics, Aabb, AabbMetrics, Vec3};
pub use predict::{predict, Prediction, PredictorConfig, ReferenceLibrary};
pub use relations::{DsrRelation, DynamicConfig, SsrRelation, StaticConfig, TnRelation};
pub use scene::{FrameRecord, ObjectState, SceneStream};
pub use similarity::{esec_similarity, prefix_similarity, SimilarityConfig, SimilarityMatrix};
