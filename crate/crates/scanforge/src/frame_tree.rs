//! Static transform graph between named frames.
//!
//! Edges are directed parent -> child but the graph is searched undirected,
//! so a transform between any two connected frames can be resolved by
//! chaining edges, inverting those traversed against their stored direction.
//! The graph must stay a forest: an edge that would close a cycle (or
//! duplicate an existing pair) is rejected, which keeps every lookup path
//! unique.

use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::geometry::{FrameId, GeometryError, RigidTransform};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("transform parent and child are both {frame:?}")]
    SelfEdge { frame: String },
    #[error("a transform between {a:?} and {b:?} already exists")]
    DuplicateEdge { a: String, b: String },
    #[error("transform {parent:?} -> {child:?} would close a cycle in the frame graph")]
    CycleRejected { parent: String, child: String },
    #[error("frame {frame:?} is not in the transform tree")]
    UnknownFrame { frame: String },
    #[error("frames {from:?} and {to:?} are not connected by any transform chain")]
    Disconnected { from: String, to: String },
    #[error(transparent)]
    Transform(#[from] GeometryError),
}

#[derive(Debug, Clone)]
struct Edge {
    parent: FrameId,
    child: FrameId,
}

/// Forest of static rigid transforms. Build it up front, then share it
/// read-only; lookups never mutate.
#[derive(Debug, Clone, Default)]
pub struct TransformTree {
    edges: Vec<Edge>,
    // per frame: (neighbor, transform mapping this frame's coords into the neighbor's)
    adjacency: HashMap<FrameId, Vec<(FrameId, RigidTransform)>>,
}

impl TransformTree {
    pub fn new() -> Self {
        TransformTree::default()
    }

    /// Insert an edge whose transform maps child-frame coordinates into
    /// parent-frame coordinates.
    pub fn add_edge(
        &mut self,
        parent: FrameId,
        child: FrameId,
        child_to_parent: RigidTransform,
    ) -> Result<(), TreeError> {
        if parent == child {
            return Err(TreeError::SelfEdge {
                frame: parent.as_str().to_owned(),
            });
        }
        for e in &self.edges {
            let same = (e.parent == parent && e.child == child)
                || (e.parent == child && e.child == parent);
            if same {
                return Err(TreeError::DuplicateEdge {
                    a: parent.as_str().to_owned(),
                    b: child.as_str().to_owned(),
                });
            }
        }
        if self.contains_frame(&parent) && self.contains_frame(&child) {
            return Err(TreeError::CycleRejected {
                parent: parent.as_str().to_owned(),
                child: child.as_str().to_owned(),
            });
        }
        self.adjacency
            .entry(child.clone())
            .or_default()
            .push((parent.clone(), child_to_parent));
        self.adjacency
            .entry(parent.clone())
            .or_default()
            .push((child.clone(), child_to_parent.invert()));
        self.edges.push(Edge { parent, child });
        Ok(())
    }

    /// Insert an edge from `x y z yaw pitch roll` values, the argument order
    /// used by static transform broadcasters.
    pub fn add_static_transform(
        &mut self,
        parent: FrameId,
        child: FrameId,
        xyz: [f64; 3],
        ypr: [f64; 3],
    ) -> Result<(), TreeError> {
        let t = RigidTransform::from_xyz_ypr(xyz, ypr)?;
        self.add_edge(parent, child, t)
    }

    pub fn contains_frame(&self, frame: &FrameId) -> bool {
        self.adjacency.contains_key(frame)
    }

    pub fn frame_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Resolve the transform mapping points expressed in `from` into `to`,
    /// composed along the unique undirected path between them.
    /// `lookup(f, f)` is the identity even for frames the tree has never seen.
    pub fn lookup(&self, from: &FrameId, to: &FrameId) -> Result<RigidTransform, TreeError> {
        if from == to {
            return Ok(RigidTransform::identity());
        }
        if !self.contains_frame(from) {
            return Err(TreeError::UnknownFrame {
                frame: from.as_str().to_owned(),
            });
        }
        if !self.contains_frame(to) {
            return Err(TreeError::UnknownFrame {
                frame: to.as_str().to_owned(),
            });
        }

        let mut visited: HashSet<&FrameId> = HashSet::new();
        let mut queue: VecDeque<(&FrameId, RigidTransform)> = VecDeque::new();
        visited.insert(from);
        queue.push_back((from, RigidTransform::identity()));
        while let Some((frame, acc)) = queue.pop_front() {
            for (neighbor, step) in &self.adjacency[frame] {
                if visited.contains(neighbor) {
                    continue;
                }
                let acc = step.compose(&acc);
                if neighbor == to {
                    return Ok(acc);
                }
                visited.insert(neighbor);
                queue.push_back((neighbor, acc));
            }
        }
        Err(TreeError::Disconnected {
            from: from.as_str().to_owned(),
            to: to.as_str().to_owned(),
        })
    }
}
