//! Exact nearest-neighbour and radius queries over a point cloud.
//!
//! The index is a static kd-tree with leaf buckets, built once over an
//! immutable cloud. Queries are exact, never approximate:
//!
//! * radius queries are inclusive (`d <= r`, compared in squared form) and
//!   include the query's own point when querying from inside the cloud;
//! * k-nearest queries exclude a caller-supplied index, which is how the
//!   "distance to the k-th *other* point" statistic is defined.
//!
//! Returned index lists are sorted ascending so results are a pure function
//! of the point set.

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::Scalar;

const LEAF_SIZE: usize = 24;

enum Node<T> {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: T,
        left: usize,
        right: usize,
    },
}

/// kd-tree over a borrowed cloud.
pub struct SpatialIndex<'a, T> {
    cloud: &'a PointCloud<T>,
    nodes: Vec<Node<T>>,
    order: Vec<usize>,
    root: usize,
}

/// Result of a radius query: the member indices (sorted) around a center.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood<T> {
    pub center: Point3<T>,
    pub indices: Vec<usize>,
}

impl<T: Scalar> Neighborhood<T> {
    /// Number of members, conventionally called k.
    pub fn k(&self) -> usize {
        self.indices.len()
    }
}

impl<'a, T: Scalar> SpatialIndex<'a, T> {
    pub fn build(cloud: &'a PointCloud<T>) -> Self {
        let mut order: Vec<usize> = (0..cloud.len()).collect();
        let mut nodes = Vec::new();
        let root = build_node(cloud, &mut order, 0, cloud.len(), &mut nodes);
        SpatialIndex {
            cloud,
            nodes,
            order,
            root,
        }
    }

    pub fn cloud(&self) -> &PointCloud<T> {
        self.cloud
    }

    /// All points within `radius` of `center`, boundary inclusive.
    pub fn radius_query(&self, center: &Point3<T>, radius: T) -> Result<Neighborhood<T>> {
        if radius < T::zero() {
            return Err(Error::validation("radius must be non-negative"));
        }
        let mut indices = Vec::new();
        self.radius_into(center, radius, &mut indices);
        Ok(Neighborhood {
            center: *center,
            indices,
        })
    }

    /// Radius query writing into a reused buffer; the hot path for entropy.
    pub(crate) fn radius_into(&self, center: &Point3<T>, radius: T, out: &mut Vec<usize>) {
        out.clear();
        let r2 = radius * radius;
        self.collect_radius(self.root, center, radius, r2, out);
        out.sort_unstable();
    }

    fn collect_radius(&self, node: usize, c: &Point3<T>, r: T, r2: T, out: &mut Vec<usize>) {
        match &self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[*start..*end] {
                    if self.cloud.point(i).distance_squared(c) <= r2 {
                        out.push(i);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let coord = c.coord(*axis);
                if coord - r <= *value {
                    self.collect_radius(*left, c, r, r2, out);
                }
                if coord + r >= *value {
                    self.collect_radius(*right, c, r, r2, out);
                }
            }
        }
    }

    /// Distance from point `index` to its k-th nearest other point.
    pub fn kth_neighbor_distance(&self, index: usize, k: usize) -> Result<T> {
        let n = self.cloud.len();
        if index >= n {
            return Err(Error::validation(format!("point index {index} out of range")));
        }
        if k == 0 {
            return Err(Error::validation("k must be at least 1"));
        }
        if k > n - 1 {
            return Err(Error::validation(format!(
                "k = {k} requested but the cloud has only {} other points",
                n - 1
            )));
        }
        let center = *self.cloud.point(index);
        let mut heap = BoundedHeap::new(k);
        self.collect_knn(self.root, &center, Some(index), &mut heap);
        Ok(heap.worst().sqrt())
    }

    /// Distance from an arbitrary query point to the nearest cloud point.
    pub fn nearest_distance(&self, query: &Point3<T>) -> T {
        let mut heap = BoundedHeap::new(1);
        self.collect_knn(self.root, query, None, &mut heap);
        heap.worst().sqrt()
    }

    fn collect_knn(
        &self,
        node: usize,
        c: &Point3<T>,
        exclude: Option<usize>,
        heap: &mut BoundedHeap<T>,
    ) {
        match &self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[*start..*end] {
                    if Some(i) == exclude {
                        continue;
                    }
                    heap.offer(self.cloud.point(i).distance_squared(c));
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let delta = c.coord(*axis) - *value;
                let (near, far) = if delta <= T::zero() {
                    (*left, *right)
                } else {
                    (*right, *left)
                };
                self.collect_knn(near, c, exclude, heap);
                if !heap.is_full() || delta * delta <= heap.worst() {
                    self.collect_knn(far, c, exclude, heap);
                }
            }
        }
    }
}

fn build_node<T: Scalar>(
    cloud: &PointCloud<T>,
    order: &mut [usize],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node<T>>,
) -> usize {
    let len = end - start;
    if len <= LEAF_SIZE {
        nodes.push(Node::Leaf { start, end });
        return nodes.len() - 1;
    }

    // Split on the axis with the widest spread; degenerate (flat or
    // collinear) data then still produces balanced trees.
    let mut axis = 0;
    let mut best_spread = T::neg_infinity();
    for a in 0..3 {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for &i in &order[start..end] {
            let v = cloud.point(i).coord(a);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let spread = hi - lo;
        if spread > best_spread {
            best_spread = spread;
            axis = a;
        }
    }

    let mid = len / 2;
    order[start..end].select_nth_unstable_by(mid, |&a, &b| {
        cloud
            .point(a)
            .coord(axis)
            .partial_cmp(&cloud.point(b).coord(axis))
            .expect("finite coordinates")
    });
    let value = cloud.point(order[start + mid]).coord(axis);

    nodes.push(Node::Leaf { start: 0, end: 0 }); // placeholder, patched below
    let this = nodes.len() - 1;
    let left = build_node(cloud, order, start, start + mid, nodes);
    let right = build_node(cloud, order, start + mid, end, nodes);
    nodes[this] = Node::Split {
        axis,
        value,
        left,
        right,
    };
    this
}

/// Fixed-capacity max-heap over squared distances. Tracks the k smallest
/// values seen; `worst` is the current k-th smallest.
struct BoundedHeap<T> {
    capacity: usize,
    data: Vec<T>,
}

impl<T: Scalar> BoundedHeap<T> {
    fn new(capacity: usize) -> Self {
        BoundedHeap {
            capacity,
            data: Vec::with_capacity(capacity),
        }
    }

    fn is_full(&self) -> bool {
        self.data.len() == self.capacity
    }

    fn worst(&self) -> T {
        if self.is_full() {
            self.data[0]
        } else {
            T::infinity()
        }
    }

    fn offer(&mut self, d2: T) {
        if !self.is_full() {
            self.data.push(d2);
            // sift up
            let mut i = self.data.len() - 1;
            while i > 0 {
                let parent = (i - 1) / 2;
                if self.data[parent] < self.data[i] {
                    self.data.swap(parent, i);
                    i = parent;
                } else {
                    break;
                }
            }
        } else if d2 < self.data[0] {
            self.data[0] = d2;
            // sift down
            let mut i = 0;
            loop {
                let (l, r) = (2 * i + 1, 2 * i + 2);
                let mut largest = i;
                if l < self.data.len() && self.data[l] > self.data[largest] {
                    largest = l;
                }
                if r < self.data.len() && self.data[r] > self.data[largest] {
                    largest = r;
                }
                if largest == i {
                    break;
                }
                self.data.swap(i, largest);
                i = largest;
            }
        }
    }
}
