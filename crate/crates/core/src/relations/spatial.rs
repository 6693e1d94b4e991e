//! Per-frame touching and static spatial relations.
//!
//! Boxes are expected in the image-style frame: x grows to the right, smaller
//! y is higher, smaller z is closer to the camera (front).

use crate::error::{Error, Result};
use crate::geometry::{distance, Aabb};
use crate::scene::ObjectState;

use super::{SsrRelation, StaticConfig, TnRelation};

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;

pub fn touching_boxes(a: &Aabb, b: &Aabb, eps_touch: f64) -> bool {
    a.face_gaps(b).iter().all(|&g| g <= eps_touch)
}

/// Touching (`T`) or not (`N`). Overlapping and enclosing boxes touch.
pub fn touching(a: &ObjectState, b: &ObjectState, cfg: &StaticConfig) -> TnRelation {
    if cfg.point_mode {
        if let (Some(pa), Some(pb)) = (&a.points, &b.points) {
            if !pa.is_empty() && !pb.is_empty() {
                let nearest = pa
                    .iter()
                    .flat_map(|p| pb.iter().map(move |q| distance(*p, *q)))
                    .fold(f64::INFINITY, f64::min);
                return TnRelation::from_touching(nearest <= cfg.eps_touch);
            }
        }
    }
    TnRelation::from_touching(touching_boxes(&a.aabb, &b.aabb, cfg.eps_touch))
}

/// Set of candidate relations before the shadow tie-break.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CandidateSet(u16);

impl CandidateSet {
    /// Tie-break precedence, also the iteration order.
    const ORDER: [SsrRelation; 8] = [
        SsrRelation::Above,
        SsrRelation::Below,
        SsrRelation::Right,
        SsrRelation::Left,
        SsrRelation::Front,
        SsrRelation::Back,
        SsrRelation::Inside,
        SsrRelation::Surround,
    ];

    fn bit(r: SsrRelation) -> u16 {
        Self::ORDER
            .iter()
            .position(|&o| o == r)
            .map_or(0, |i| 1 << i)
    }

    pub fn insert(&mut self, r: SsrRelation) {
        self.0 |= Self::bit(r);
    }

    pub fn contains(&self, r: SsrRelation) -> bool {
        let b = Self::bit(r);
        b != 0 && self.0 & b != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = SsrRelation> + '_ {
        Self::ORDER
            .iter()
            .copied()
            .filter(move |r| self.contains(*r))
    }
}

// `a` strictly before `b` on `axis` in both extremes, with the two other axes
// overlapping.
fn ordered_on(a: &Aabb, b: &Aabb, axis: usize) -> bool {
    let others = [X, Y, Z];
    a.min[axis] < b.min[axis]
        && a.max[axis] < b.max[axis]
        && others
            .iter()
            .filter(|&&k| k != axis)
            .all(|&k| !a.disjoint_on(b, k))
}

fn inside(a: &Aabb, b: &Aabb) -> bool {
    a != b
        && b.min[X] <= a.min[X]
        && a.max[X] <= b.max[X]
        && b.min[Z] <= a.min[Z]
        && a.max[Z] <= b.max[Z]
        && b.min[Y] <= a.min[Y]
        && a.min[Y] < a.max[Y]
        && a.max[Y] <= b.max[Y]
}

/// Directional and containment relations that hold for `a` relative to `b`.
pub fn ssr_candidates(a: &Aabb, b: &Aabb) -> CandidateSet {
    let mut set = CandidateSet::default();
    if ordered_on(a, b, Y) {
        set.insert(SsrRelation::Above);
    }
    if ordered_on(b, a, Y) {
        set.insert(SsrRelation::Below);
    }
    if ordered_on(b, a, X) {
        set.insert(SsrRelation::Right);
    }
    if ordered_on(a, b, X) {
        set.insert(SsrRelation::Left);
    }
    if ordered_on(a, b, Z) {
        set.insert(SsrRelation::Front);
    }
    if ordered_on(b, a, Z) {
        set.insert(SsrRelation::Back);
    }
    if inside(a, b) {
        set.insert(SsrRelation::Inside);
    }
    if inside(b, a) {
        set.insert(SsrRelation::Surround);
    }
    set
}

/// Area of the overlap between the facing surfaces of `a` and `b` for a
/// directional relation, projected along that relation's axis.
pub fn shadow_area(a: &Aabb, b: &Aabb, r: SsrRelation) -> Result<f64> {
    let (p, q) = match r {
        SsrRelation::Above | SsrRelation::Below => (X, Z),
        SsrRelation::Right | SsrRelation::Left => (Y, Z),
        SsrRelation::Front | SsrRelation::Back => (X, Y),
        other => return Err(Error::NoFacingSurface(other.symbol())),
    };
    Ok(a.overlap_len(b, p) * a.overlap_len(b, q))
}

/// Main static relation from boxes and a precomputed touching flag.
pub fn main_ssr_boxes(a: &Aabb, b: &Aabb, touch: bool, cfg: &StaticConfig) -> SsrRelation {
    let set = ssr_candidates(a, b);
    if set.contains(SsrRelation::Inside) {
        return SsrRelation::Inside;
    }
    if set.contains(SsrRelation::Surround) {
        return SsrRelation::Surround;
    }
    let separation = a.separation(b);
    if separation > cfg.null_radius {
        return SsrRelation::Null;
    }

    let mut best: Option<(SsrRelation, f64)> = None;
    for r in set.iter() {
        let area = shadow_area(a, b, r).unwrap_or(0.0);
        if best.is_none_or(|(_, s)| area > s) {
            best = Some((r, area));
        }
    }
    // Overlapping boxes without a strict ordering on any axis count as
    // lateral neighbours.
    let mut rel = best.map_or(SsrRelation::Around, |(r, _)| r);
    if matches!(
        rel,
        SsrRelation::Right | SsrRelation::Left | SsrRelation::Front | SsrRelation::Back
    ) && separation <= cfg.around_radius
    {
        rel = SsrRelation::Around;
    }
    if touch {
        rel = match rel {
            SsrRelation::Above => SsrRelation::Top,
            SsrRelation::Below => SsrRelation::Bottom,
            SsrRelation::Around => SsrRelation::AroundTouching,
            other => other,
        };
    }
    rel
}

/// Main static relation of `a` relative to `b`.
///
/// Undefined, destroyed and absent pairs are resolved by the caller; here
/// both objects are assumed to exist.
pub fn main_ssr(
    a: &ObjectState,
    b: &ObjectState,
    tn: TnRelation,
    cfg: &StaticConfig,
) -> SsrRelation {
    main_ssr_boxes(&a.aabb, &b.aabb, tn == TnRelation::Touching, cfg)
}

/// True when `k` lies completely in the between-space of `a` and `b`
/// (extension of the two boxes toward each other along x).
pub fn between(a: &Aabb, k: &Aabb, b: &Aabb) -> bool {
    k.min[X] >= a.max[X].min(b.max[X])
        && k.max[X] <= a.min[X].max(b.min[X])
        && k.min[Y] >= a.min[Y].max(b.min[Y])
        && k.max[Y] <= a.max[Y].min(b.max[Y])
        && k.min[Z] >= a.min[Z].max(b.min[Z])
        && k.max[Z] <= a.max[Z].min(b.max[Z])
}
