//! Integer weights and saturating distances.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize, Serializer};

/// Vertex identifier in `[0, n)`.
pub type VertexId = usize;

/// Edge weight. Nonnegative for undirected graphs, signed for digraphs.
pub type Weight = i64;

/// A path length, or [`Distance::INFINITY`] when no path is known.
///
/// `INFINITY` is a sentinel, not a large number: adding anything to it
/// yields `INFINITY`, and it compares greater than every finite value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(from = "Option<i64>")]
pub struct Distance(i64);

impl Distance {
    pub const INFINITY: Distance = Distance(i64::MAX);
    pub const ZERO: Distance = Distance(0);

    /// Wraps a finite value.
    ///
    /// `i64::MAX` is reserved for the sentinel and is rejected in debug builds.
    pub fn new(value: i64) -> Self {
        debug_assert!(value != i64::MAX, "i64::MAX is reserved for INFINITY");
        Distance(value)
    }

    pub fn is_finite(self) -> bool {
        self.0 != i64::MAX
    }

    pub fn is_infinite(self) -> bool {
        !self.is_finite()
    }

    /// The finite value, or `None` for `INFINITY`.
    pub fn finite(self) -> Option<i64> {
        self.is_finite().then_some(self.0)
    }

    /// Adds a weight. `INFINITY` stays `INFINITY`; a finite sum that does not
    /// fit in 63 bits panics rather than silently becoming the sentinel.
    pub fn add_weight(self, w: Weight) -> Distance {
        if self.is_infinite() {
            return self;
        }
        match self.0.checked_add(w) {
            Some(v) if v != i64::MAX => Distance(v),
            _ => panic!("distance overflow: {} + {}", self.0, w),
        }
    }
}

impl Add<Weight> for Distance {
    type Output = Distance;

    fn add(self, w: Weight) -> Distance {
        self.add_weight(w)
    }
}

impl Add for Distance {
    type Output = Distance;

    fn add(self, other: Distance) -> Distance {
        if other.is_infinite() {
            return Distance::INFINITY;
        }
        self.add_weight(other.0)
    }
}

impl From<Option<i64>> for Distance {
    fn from(v: Option<i64>) -> Self {
        v.map_or(Distance::INFINITY, Distance::new)
    }
}

impl From<i64> for Distance {
    fn from(v: i64) -> Self {
        Distance::new(v)
    }
}

impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.finite().serialize(s)
    }
}

impl fmt::Debug for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.finite() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("inf"),
        }
    }
}

/// Lexicographic (distance, hop count) pair.
///
/// Comparing estimates by hop count after distance makes every edge strictly
/// positive in the pair order, which keeps parent pointers acyclic even when
/// edge weights are zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PathLen {
    pub dist: Distance,
    pub hops: u32,
}

impl PathLen {
    pub const INFINITY: PathLen = PathLen { dist: Distance::INFINITY, hops: u32::MAX };
    pub const ZERO: PathLen = PathLen { dist: Distance::ZERO, hops: 0 };

    pub fn new(dist: Distance, hops: u32) -> Self {
        PathLen { dist, hops }
    }

    pub fn is_finite(self) -> bool {
        self.dist.is_finite()
    }

    /// Extends by one edge of weight `w`.
    pub fn step(self, w: Weight) -> PathLen {
        if !self.is_finite() {
            return PathLen::INFINITY;
        }
        PathLen { dist: self.dist + w, hops: self.hops + 1 }
    }

    /// Concatenates with another finite path length.
    pub fn join(self, other: PathLen) -> PathLen {
        if !self.is_finite() || !other.is_finite() {
            return PathLen::INFINITY;
        }
        PathLen { dist: self.dist + other.dist, hops: self.hops + other.hops }
    }
}
