//! The derived routing network on which both optimization models are built.
//!
//! Each cloud node `v` is split into `m_v = min(n_v, ell_max)` processing
//! clones `v#1..v#m_v`, where `n_v` is the number of function types `v` can
//! process and `ell_max` the longest requested chain; the physical node
//! itself keeps only its routing role. Every clone hangs off its anchor by
//! a zero-delay link pair `(v, v#t)` and `(v#t, v)`. Clone links are
//! logically uncapacitated; they carry a finite surrogate capacity equal to
//! the total offered rate, which no feasible routing can exceed, so the
//! uniform link-capacity constraints stay finite.
//!
//! Splitting nodes this way lets a service pass through the same physical
//! cloud several times — once per hosted function — while each clone hosts
//! at most one function of any service, which is what makes per-function
//! placement binary variables well defined.

use std::collections::BTreeMap;

use crate::model::{Link, PhysicalNetwork, SlicingInstance};
use crate::scalar::Scalar;

/// The derived network: physical topology plus processing clones.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualNetwork<S> {
    /// The physical network this was derived from.
    pub physical: PhysicalNetwork<S>,
    /// Every node id: physical nodes first (original order), then clones
    /// grouped by cloud in id order.
    pub nodes: Vec<String>,
    /// Clone ids per cloud, in clone-index order.
    pub clones: BTreeMap<String, Vec<String>>,
    /// Anchor cloud of each clone.
    pub anchor: BTreeMap<String, String>,
    /// Every directed link: physical links first (original order), then
    /// clone link pairs. Clone links have delay zero and the surrogate
    /// capacity.
    pub links: Vec<Link<S>>,
    /// Capacity installed on clone links: the instance's total offered
    /// rate, an upper bound on any feasible link load.
    pub surrogate_capacity: S,
    out_links: BTreeMap<String, Vec<usize>>,
    in_links: BTreeMap<String, Vec<usize>>,
}

impl<S: Scalar> VirtualNetwork<S> {
    /// Derives the routing network for an instance.
    ///
    /// Panics if a physical node id contains `'#'` (reserved for clone
    /// ids); `validate_instance` reports that case as `reserved-node-id`.
    pub fn build(instance: &SlicingInstance<S>) -> Self {
        let physical = instance.network.clone();
        for n in &physical.nodes {
            assert!(
                !n.contains('#'),
                "physical node id {n} uses the reserved clone separator '#'"
            );
        }
        let ell_max = instance.ell_max();
        let surrogate_capacity = instance.total_rate();

        let mut nodes = physical.nodes.clone();
        let mut links = physical.links.clone();
        let mut clones: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut anchor = BTreeMap::new();

        // Clones grouped by cloud id order for deterministic layout.
        let mut cloud_ids: Vec<&str> = physical.clouds.iter().map(|c| c.id.as_str()).collect();
        cloud_ids.sort_unstable();
        for cloud_id in cloud_ids {
            let cloud = physical.cloud(cloud_id).expect("listed cloud exists");
            let m = cloud.processable.len().min(ell_max);
            let mut ids = Vec::new();
            for t in 1..=m {
                let clone_id = format!("{cloud_id}#{t}");
                nodes.push(clone_id.clone());
                links.push(Link {
                    from: cloud_id.to_string(),
                    to: clone_id.clone(),
                    capacity: surrogate_capacity.clone(),
                    delay: S::zero(),
                });
                links.push(Link {
                    from: clone_id.clone(),
                    to: cloud_id.to_string(),
                    capacity: surrogate_capacity.clone(),
                    delay: S::zero(),
                });
                anchor.insert(clone_id.clone(), cloud_id.to_string());
                ids.push(clone_id);
            }
            clones.insert(cloud_id.to_string(), ids);
        }

        let mut out_links: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut in_links: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (idx, l) in links.iter().enumerate() {
            out_links.entry(l.from.clone()).or_default().push(idx);
            in_links.entry(l.to.clone()).or_default().push(idx);
        }

        VirtualNetwork {
            physical,
            nodes,
            clones,
            anchor,
            links,
            surrogate_capacity,
            out_links,
            in_links,
        }
    }

    /// Whether `id` names a processing clone.
    pub fn is_clone(&self, id: &str) -> bool {
        self.anchor.contains_key(id)
    }

    /// The anchor cloud of a clone, or `None` for physical nodes.
    pub fn anchor_of(&self, id: &str) -> Option<&str> {
        self.anchor.get(id).map(String::as_str)
    }

    /// Number of processing clones.
    pub fn clone_count(&self) -> usize {
        self.anchor.len()
    }

    /// Indices into [`Self::links`] of the links leaving `node`.
    pub fn out_links(&self, node: &str) -> &[usize] {
        self.out_links.get(node).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Indices into [`Self::links`] of the links entering `node`.
    pub fn in_links(&self, node: &str) -> &[usize] {
        self.in_links.get(node).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Whether link `idx` touches a clone (and therefore has zero delay
    /// and surrogate capacity).
    pub fn is_clone_link(&self, idx: usize) -> bool {
        let l = &self.links[idx];
        self.is_clone(&l.from) || self.is_clone(&l.to)
    }

    /// The clones able to process `function`, in deterministic order
    /// (cloud id, then clone index).
    pub fn hosts(&self, function: &str) -> Vec<&str> {
        let mut out = Vec::new();
        for (cloud_id, clone_ids) in &self.clones {
            let cloud = self.physical.cloud(cloud_id).expect("clone anchor is a cloud");
            if cloud.processable.contains(function) {
                out.extend(clone_ids.iter().map(String::as_str));
            }
        }
        out
    }

    /// Whether a clone can process `function`; always false for
    /// physical nodes, which only route.
    pub fn clone_can_process(&self, id: &str, function: &str) -> bool {
        self.anchor_of(id)
            .and_then(|cloud_id| self.physical.cloud(cloud_id))
            .is_some_and(|c| c.processable.contains(function))
    }

    /// Sum of all link delays — a coarse upper bound on any simple path's
    /// delay (clone links contribute zero).
    pub fn total_delay(&self) -> S {
        let mut sum = S::zero();
        for l in &self.links {
            sum = sum + l.delay.clone();
        }
        sum
    }

    /// Drops clones and clone links again. Inverse of [`Self::build`]:
    /// the result equals the original physical network.
    pub fn without_clones(&self) -> PhysicalNetwork<S> {
        PhysicalNetwork {
            nodes: self.nodes.iter().filter(|n| !self.is_clone(n)).cloned().collect(),
            links: self
                .links
                .iter()
                .filter(|l| !self.is_clone(&l.from) && !self.is_clone(&l.to))
                .cloned()
                .collect(),
            clouds: self.physical.clouds.clone(),
        }
    }

    /// Graphviz rendering: clouds as boxes, clones as dashed ellipses tied
    /// to their anchors, physical links solid.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph routing {\n  rankdir=LR;\n");
        for n in &self.nodes {
            if self.is_clone(n) {
                out.push_str(&format!("  \"{n}\" [shape=ellipse, style=dashed];\n"));
            } else if self.physical.is_cloud(n) {
                out.push_str(&format!("  \"{n}\" [shape=box, style=bold];\n"));
            } else {
                out.push_str(&format!("  \"{n}\" [shape=circle];\n"));
            }
        }
        for (idx, l) in self.links.iter().enumerate() {
            if self.is_clone_link(idx) {
                out.push_str(&format!("  \"{}\" -> \"{}\" [style=dashed];\n", l.from, l.to));
            } else {
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\" [label=\"c={} d={}\"];\n",
                    l.from, l.to, l.capacity, l.delay
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}
