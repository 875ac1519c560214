//! Flow decomposition: turning a per-segment edge flow back into explicit
//! paths, and the path-count / data-rate statistics of a whole solution.
//!
//! Small flows (at most [`EXACT_DECOMPOSITION_LIMIT`] flow-carrying links)
//! are decomposed into the provably minimum number of paths by exhaustive
//! search; larger flows fall back to deterministic widest-path peeling,
//! which needs at most one path per flow-carrying link. The result reports
//! which mode ran.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{SegmentPath, SlicingInstance, SlicingSolution};
use crate::scalar::Scalar;
use crate::vnet::VirtualNetwork;

/// Largest number of flow-carrying links the exhaustive minimum-path search
/// accepts before the decomposer switches to greedy widest-path peeling.
pub const EXACT_DECOMPOSITION_LIMIT: usize = 12;

/// Which decomposition algorithm produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompMode {
    /// Exhaustive search; the path count is minimum.
    ExactMinimal,
    /// Widest-path peeling; the path count is at most the number of
    /// flow-carrying links.
    GreedyWidest,
}

/// A decomposed flow: simple paths whose rates add up to the flow volume.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<S> {
    /// Simple source-to-sink paths with positive rates.
    pub paths: Vec<SegmentPath<S>>,
    /// The algorithm that produced them.
    pub mode: DecompMode,
}

/// Why an edge flow cannot be decomposed into paths.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecompError {
    /// Net in/out flow is nonzero somewhere other than one source and one
    /// sink.
    #[error("flow conservation fails at {}", nodes.join(", "))]
    Unbalanced { nodes: Vec<String> },
    /// The flow uses an edge the network does not have.
    #[error("flow uses a link absent from the network: {from} -> {to}")]
    UnknownLink { from: String, to: String },
    /// A negative flow value.
    #[error("flow on {from} -> {to} is negative")]
    NegativeFlow { from: String, to: String },
    /// Part of the flow only runs in cycles and reaches neither endpoint.
    #[error("{links} flow-carrying links form circulations disconnected from the endpoints")]
    Circulation { links: usize },
    /// A segment of the solution carries no flow at all.
    #[error("service {service} segment {segment} carries no flow")]
    MissingFlow { service: u32, segment: usize },
}

fn negligible<S: Scalar>(v: &S) -> bool {
    if S::EXACT {
        v.is_zero()
    } else {
        v.abs() <= S::tol()
    }
}

/// Validated positive flow plus its inferred endpoints. `None` endpoints
/// mean the flow is empty.
struct CheckedFlow<S> {
    residual: BTreeMap<(String, String), S>,
    ends: Option<(String, String)>,
}

fn check_flow<S: Scalar>(
    flow: &BTreeMap<(String, String), S>,
    vnet: &VirtualNetwork<S>,
) -> Result<CheckedFlow<S>, DecompError> {
    let known: BTreeSet<(&str, &str)> =
        vnet.links.iter().map(|l| (l.from.as_str(), l.to.as_str())).collect();
    let mut residual: BTreeMap<(String, String), S> = BTreeMap::new();
    for ((from, to), rate) in flow {
        if !known.contains(&(from.as_str(), to.as_str())) {
            return Err(DecompError::UnknownLink { from: from.clone(), to: to.clone() });
        }
        if *rate < S::zero() {
            return Err(DecompError::NegativeFlow { from: from.clone(), to: to.clone() });
        }
        if !negligible(rate) {
            residual.insert((from.clone(), to.clone()), rate.clone());
        }
    }
    if residual.is_empty() {
        return Ok(CheckedFlow { residual, ends: None });
    }
    let mut net: BTreeMap<&String, S> = BTreeMap::new();
    for ((from, to), rate) in &residual {
        let f = net.entry(from).or_insert_with(S::zero);
        *f = f.clone() + rate.clone();
        let t = net.entry(to).or_insert_with(S::zero);
        *t = t.clone() - rate.clone();
    }
    let sources: Vec<&String> =
        net.iter().filter(|(_, v)| !negligible(*v) && **v > S::zero()).map(|(n, _)| *n).collect();
    let sinks: Vec<&String> =
        net.iter().filter(|(_, v)| !negligible(*v) && **v < S::zero()).map(|(n, _)| *n).collect();
    match (sources.as_slice(), sinks.as_slice()) {
        ([], []) => Err(DecompError::Circulation { links: residual.len() }),
        ([source], [sink]) => {
            let ends = Some(((*source).clone(), (*sink).clone()));
            Ok(CheckedFlow { residual, ends })
        }
        _ => Err(DecompError::Unbalanced {
            nodes: net
                .iter()
                .filter(|(_, v)| !negligible(*v))
                .map(|(n, _)| (*n).clone())
                .collect(),
        }),
    }
}

/// Every simple path from `source` to `sink` using only `edges`, in
/// lexicographic node order.
fn simple_paths(
    edges: &BTreeSet<(String, String)>,
    source: &str,
    sink: &str,
) -> Vec<Vec<String>> {
    let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (from, to) in edges {
        adjacency.entry(from.as_str()).or_default().push(to.as_str());
    }
    let mut out: Vec<Vec<String>> = Vec::new();
    let mut stack: Vec<String> = vec![source.to_string()];
    fn walk(
        adjacency: &BTreeMap<&str, Vec<&str>>,
        sink: &str,
        stack: &mut Vec<String>,
        out: &mut Vec<Vec<String>>,
    ) {
        let cur = stack.last().expect("stack starts nonempty").clone();
        if cur == sink {
            out.push(stack.clone());
            return;
        }
        let Some(nexts) = adjacency.get(cur.as_str()) else { return };
        for next in nexts {
            if stack.iter().any(|n| n == next) {
                continue;
            }
            stack.push(next.to_string());
            walk(adjacency, sink, stack, out);
            stack.pop();
        }
    }
    walk(&adjacency, sink, &mut stack, &mut out);
    out
}

/// Solves the square-or-tall exact linear system `a * r = f` by Gaussian
/// elimination; `Some` only when the solution exists and is unique.
fn solve_unique<S: Scalar>(a: &[Vec<S>], f: &[S]) -> Option<Vec<S>> {
    let rows = a.len();
    let cols = if rows == 0 { return None } else { a[0].len() };
    let mut m: Vec<Vec<S>> = a
        .iter()
        .zip(f)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivot_row = 0usize;
    for col in 0..cols {
        let Some(pr) = (pivot_row..rows).find(|&r| !negligible(&m[r][col])) else {
            return None; // rank-deficient: no unique solution
        };
        m.swap(pivot_row, pr);
        let piv = m[pivot_row][col].clone();
        for c in col..=cols {
            m[pivot_row][c] = m[pivot_row][c].clone() / piv.clone();
        }
        for r in 0..rows {
            if r != pivot_row && !negligible(&m[r][col]) {
                let factor = m[r][col].clone();
                for c in col..=cols {
                    m[r][c] = m[r][c].clone() - factor.clone() * m[pivot_row][c].clone();
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    if pivot_row < cols {
        return None;
    }
    for r in pivot_row..rows {
        if !negligible(&m[r][cols]) {
            return None; // inconsistent
        }
    }
    Some((0..cols).map(|c| m[c][cols].clone()).collect())
}

/// Ascending index combinations of size `k` from `0..n`.
struct Combinations {
    idx: Vec<usize>,
    n: usize,
    fresh: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations { idx: (0..k).collect(), n, fresh: true }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let k = self.idx.len();
        if k > self.n {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(self.idx.clone());
        }
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                break;
            }
        }
        self.idx[i] += 1;
        for j in i + 1..k {
            self.idx[j] = self.idx[j - 1] + 1;
        }
        Some(self.idx.clone())
    }
}

/// Minimum-count decomposition by exhaustive search: try every set of k
/// simple paths in increasing k; the first set whose unique exact rate
/// assignment reproduces the flow with all-positive rates is minimal.
fn exact_minimal<S: Scalar>(
    residual: &BTreeMap<(String, String), S>,
    source: &str,
    sink: &str,
) -> Option<Vec<SegmentPath<S>>> {
    let edges: BTreeSet<(String, String)> = residual.keys().cloned().collect();
    let paths = simple_paths(&edges, source, sink);
    let edge_list: Vec<&(String, String)> = residual.keys().collect();
    let f: Vec<S> = residual.values().cloned().collect();
    let on_path: Vec<BTreeSet<(&str, &str)>> = paths
        .iter()
        .map(|p| p.windows(2).map(|h| (h[0].as_str(), h[1].as_str())).collect())
        .collect();
    for k in 1..=residual.len().min(paths.len()) {
        for combo in Combinations::new(paths.len(), k) {
            let a: Vec<Vec<S>> = edge_list
                .iter()
                .map(|(from, to)| {
                    combo
                        .iter()
                        .map(|&pi| {
                            if on_path[pi].contains(&(from.as_str(), to.as_str())) {
                                S::one()
                            } else {
                                S::zero()
                            }
                        })
                        .collect()
                })
                .collect();
            let Some(rates) = solve_unique(&a, &f) else { continue };
            if rates.iter().all(|r| *r > S::zero() && !negligible(r)) {
                return Some(
                    combo
                        .iter()
                        .zip(rates)
                        .map(|(&pi, rate)| SegmentPath { nodes: paths[pi].clone(), rate })
                        .collect(),
                );
            }
        }
    }
    None
}

/// Bottleneck width of the best residual path from each node to the sink;
/// `None` stands for unbounded (the sink itself).
fn widths_to_sink<'a, S: Scalar>(
    residual: &'a BTreeMap<(String, String), S>,
    sink: &'a str,
) -> BTreeMap<&'a str, Option<S>> {
    let mut best: BTreeMap<&str, Option<S>> = BTreeMap::new();
    best.insert(sink, None);
    loop {
        let mut changed = false;
        for ((from, to), rate) in residual {
            let Some(down) = best.get(to.as_str()) else { continue };
            let cand = match down {
                None => rate.clone(),
                Some(w) if *w < *rate => w.clone(),
                Some(_) => rate.clone(),
            };
            let better = match best.get(from.as_str()) {
                None => true,
                Some(None) => false,
                Some(Some(cur)) => cand > *cur,
            };
            if better {
                best.insert(from.as_str(), Some(cand));
                changed = true;
            }
        }
        if !changed {
            return best;
        }
    }
}

/// The lexicographically smallest simple path from `source` to `sink`
/// whose every residual edge carries at least `width`.
fn widest_walk<S: Scalar>(
    residual: &BTreeMap<(String, String), S>,
    source: &str,
    sink: &str,
    width: &S,
) -> Option<Vec<String>> {
    let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for ((from, to), rate) in residual {
        if *rate >= *width {
            adjacency.entry(from.as_str()).or_default().push(to.as_str());
        }
    }
    fn walk(
        adjacency: &BTreeMap<&str, Vec<&str>>,
        sink: &str,
        stack: &mut Vec<String>,
    ) -> bool {
        let cur = stack.last().expect("stack starts nonempty").clone();
        if cur == sink {
            return true;
        }
        let Some(nexts) = adjacency.get(cur.as_str()) else { return false };
        for next in nexts {
            if stack.iter().any(|n| n == next) {
                continue;
            }
            stack.push(next.to_string());
            if walk(adjacency, sink, stack) {
                return true;
            }
            stack.pop();
        }
        false
    }
    let mut stack = vec![source.to_string()];
    walk(&adjacency, sink, &mut stack).then_some(stack)
}

/// Widest-path peeling: repeatedly extract the widest (then
/// lexicographically smallest) source-to-sink path at its bottleneck rate.
/// Each round zeroes at least one edge, so the path count never exceeds
/// the number of flow-carrying links.
fn greedy_widest<S: Scalar>(
    mut residual: BTreeMap<(String, String), S>,
    source: &str,
    sink: &str,
) -> Result<Vec<SegmentPath<S>>, DecompError> {
    let mut out: Vec<SegmentPath<S>> = Vec::new();
    loop {
        if residual.is_empty() {
            return Ok(out);
        }
        let Some(Some(width)) = widths_to_sink(&residual, sink).get(source).cloned() else {
            return Err(DecompError::Circulation { links: residual.len() });
        };
        let nodes = widest_walk(&residual, source, sink, &width)
            .expect("a path of the computed width exists");
        for hop in nodes.windows(2) {
            let key = (hop[0].clone(), hop[1].clone());
            let left = residual[&key].clone() - width.clone();
            if negligible(&left) {
                residual.remove(&key);
            } else {
                residual.insert(key, left);
            }
        }
        out.push(SegmentPath { nodes, rate: width });
    }
}

/// Decomposes a conserved edge flow into simple paths from its (inferred)
/// source to its sink. Flows with at most [`EXACT_DECOMPOSITION_LIMIT`]
/// flow-carrying links get the provably minimum path count; larger ones
/// are peeled greedily. The rates add up to the flow volume exactly.
pub fn decompose<S: Scalar>(
    flow: &BTreeMap<(String, String), S>,
    vnet: &VirtualNetwork<S>,
) -> Result<Decomposition<S>, DecompError> {
    let checked = check_flow(flow, vnet)?;
    let Some((source, sink)) = checked.ends else {
        return Ok(Decomposition { paths: Vec::new(), mode: DecompMode::ExactMinimal });
    };
    if checked.residual.len() <= EXACT_DECOMPOSITION_LIMIT {
        if let Some(paths) = exact_minimal(&checked.residual, &source, &sink) {
            return Ok(Decomposition { paths, mode: DecompMode::ExactMinimal });
        }
        // No set of simple paths covers the flow, so part of it circulates;
        // peeling reaches and reports that leftover.
    }
    greedy_widest(checked.residual, &source, &sink)
        .map(|paths| Decomposition { paths, mode: DecompMode::GreedyWidest })
}

/// [`decompose`], but always using greedy widest-path peeling. Exists so
/// the two modes can be compared on flows small enough for both.
pub fn decompose_greedy<S: Scalar>(
    flow: &BTreeMap<(String, String), S>,
    vnet: &VirtualNetwork<S>,
) -> Result<Decomposition<S>, DecompError> {
    let checked = check_flow(flow, vnet)?;
    let Some((source, sink)) = checked.ends else {
        return Ok(Decomposition { paths: Vec::new(), mode: DecompMode::GreedyWidest });
    };
    greedy_widest(checked.residual, &source, &sink)
        .map(|paths| Decomposition { paths, mode: DecompMode::GreedyWidest })
}

/// Path statistics of one service: how many end-to-end paths its traffic
/// really needs, and the smallest data rate among them.
#[derive(Debug, Clone, PartialEq)]
pub struct ServicePathStats<S> {
    /// End-to-end path count after stitching the per-segment
    /// decompositions.
    pub nump: usize,
    /// Minimum data rate over the stitched paths: the narrowest stitched
    /// slice times the smallest per-segment rate.
    pub dr: S,
    /// Whether every segment got the exhaustive (count-minimal)
    /// decomposition.
    pub exact: bool,
}

/// Path statistics of a whole solution.
#[derive(Debug, Clone, PartialEq)]
pub struct PathStats<S> {
    /// Per-service statistics, keyed by service id.
    pub per_service: BTreeMap<u32, ServicePathStats<S>>,
    /// Largest per-service path count (0 without services).
    pub max_nump: usize,
    /// Smallest per-service data rate (absent without services).
    pub min_dr: Option<S>,
}

/// Stitches per-segment share partitions (each summing to one, in the
/// order the shares should be matched) into end-to-end slices: returns the
/// slice count and the narrowest slice.
fn stitch<S: Scalar>(partitions: &[Vec<S>]) -> (usize, S) {
    let mut cuts: Vec<S> = Vec::new();
    for shares in partitions {
        let mut acc = S::zero();
        for share in &shares[..shares.len().saturating_sub(1)] {
            acc = acc + share.clone();
            cuts.push(acc.clone());
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("shares are ordered"));
    cuts.dedup();
    let nump = cuts.len() + 1;
    let mut prev = S::zero();
    let mut narrowest: Option<S> = None;
    for cut in cuts.into_iter().chain(std::iter::once(S::one())) {
        let width = cut.clone() - prev;
        if narrowest.as_ref().is_none_or(|n| width < *n) {
            narrowest = Some(width);
        }
        prev = cut;
    }
    (nump, narrowest.expect("at least one slice"))
}

/// Computes per-service path counts (NUMP) and minimum data rates (DR),
/// plus their instance-wide extremes: each segment's aggregated edge flow
/// is decomposed into paths, and the per-segment decompositions are
/// stitched at the processing nodes by matching rate shares in
/// nonincreasing-rate order (ties by lexicographic node sequence).
///
/// Feasible solutions never error; a missing or empty segment surfaces the
/// underlying decomposition error.
pub fn path_stats<S: Scalar>(
    solution: &SlicingSolution<S>,
    instance: &SlicingInstance<S>,
) -> Result<PathStats<S>, DecompError> {
    let vnet = VirtualNetwork::build(instance);
    let mut per_service = BTreeMap::new();
    for svc in &instance.services {
        let mut partitions: Vec<Vec<S>> = Vec::new();
        let mut exact = true;
        for s in 0..=svc.chain_len() {
            let mut flow: BTreeMap<(String, String), S> = BTreeMap::new();
            for (_, path) in solution.paths.range((svc.id, s, 0)..=(svc.id, s, usize::MAX)) {
                for hop in path.nodes.windows(2) {
                    let slot = flow
                        .entry((hop[0].clone(), hop[1].clone()))
                        .or_insert_with(S::zero);
                    *slot = slot.clone() + path.rate.clone();
                }
            }
            let mut dec = decompose(&flow, &vnet)?;
            if dec.paths.is_empty() {
                return Err(DecompError::MissingFlow { service: svc.id, segment: s });
            }
            if dec.mode == DecompMode::GreedyWidest {
                exact = false;
            }
            dec.paths.sort_by(|a, b| {
                b.rate
                    .partial_cmp(&a.rate)
                    .expect("rates are ordered")
                    .then_with(|| a.nodes.cmp(&b.nodes))
            });
            let total = dec.paths.iter().fold(S::zero(), |acc, p| acc + p.rate.clone());
            partitions.push(dec.paths.iter().map(|p| p.rate.clone() / total.clone()).collect());
        }
        let (nump, narrowest) = stitch(&partitions);
        let min_rate = (0..=svc.chain_len())
            .map(|s| svc.rate(s))
            .fold(None::<S>, |acc, r| match acc {
                Some(m) if m <= *r => Some(m),
                _ => Some(r.clone()),
            })
            .expect("chains have at least one segment rate");
        per_service.insert(
            svc.id,
            ServicePathStats { nump, dr: narrowest * min_rate, exact },
        );
    }
    let max_nump = per_service.values().map(|s: &ServicePathStats<S>| s.nump).max().unwrap_or(0);
    let min_dr = per_service.values().map(|s| s.dr.clone()).fold(None::<S>, |acc, d| match acc {
        Some(m) if m <= d => Some(m),
        _ => Some(d),
    });
    Ok(PathStats { per_service, max_nump, min_dr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::gen::{example_chain, example_pair};
    use crate::milp::{solve_exact, SolveLimits, SolveStatus};
    use crate::model::{Link, ObjectiveWeights, PhysicalNetwork};
    use crate::ns1::{build_ns1, BuildOptions};
    use crate::semantics::decode_ns1;
    use crate::{Instance, Rat, Vnet};

    fn rat(v: i64) -> Rat {
        Rat::from_int(v)
    }

    fn chain_vnet() -> (Instance, Vnet) {
        let instance = example_chain();
        let vnet = VirtualNetwork::build(&instance);
        (instance, vnet)
    }

    fn flow(edges: &[(&str, &str, i64)]) -> BTreeMap<(String, String), Rat> {
        edges
            .iter()
            .map(|(f, t, r)| ((f.to_string(), t.to_string()), rat(*r)))
            .collect()
    }

    fn aggregate(paths: &[SegmentPath<Rat>]) -> BTreeMap<(String, String), Rat> {
        let mut out: BTreeMap<(String, String), Rat> = BTreeMap::new();
        for path in paths {
            for hop in path.nodes.windows(2) {
                let slot =
                    out.entry((hop[0].clone(), hop[1].clone())).or_insert_with(Rat::zero);
                *slot = slot.clone() + path.rate.clone();
            }
        }
        out
    }

    #[test]
    fn parallel_two_unit_routes_decompose_exactly() {
        let (_, vnet) = chain_vnet();
        let f = flow(&[("A", "B", 2), ("B", "E", 2), ("A", "C", 2), ("C", "E", 2)]);
        let dec = decompose(&f, &vnet).unwrap();
        assert_eq!(dec.mode, DecompMode::ExactMinimal);
        assert_eq!(dec.paths.len(), 2);
        assert_eq!(dec.paths[0].nodes, ["A", "B", "E"]);
        assert_eq!(dec.paths[1].nodes, ["A", "C", "E"]);
        assert!(dec.paths.iter().all(|p| p.rate == rat(2)));
        // The greedy mode happens to agree here.
        let greedy = decompose_greedy(&f, &vnet).unwrap();
        assert_eq!(greedy.paths, dec.paths);
        assert_eq!(greedy.mode, DecompMode::GreedyWidest);
    }

    #[test]
    fn single_edge_flow_is_one_path() {
        let (_, vnet) = chain_vnet();
        let dec = decompose(&flow(&[("A", "B", 3)]), &vnet).unwrap();
        assert_eq!(dec.paths.len(), 1);
        assert_eq!(dec.paths[0].nodes, ["A", "B"]);
        assert_eq!(dec.paths[0].rate, rat(3));
    }

    #[test]
    fn unit_diamond_needs_two_paths() {
        let (_, vnet) = chain_vnet();
        let f = flow(&[("A", "B", 1), ("B", "E", 1), ("A", "C", 1), ("C", "E", 1)]);
        let dec = decompose(&f, &vnet).unwrap();
        assert_eq!(dec.mode, DecompMode::ExactMinimal);
        assert_eq!(dec.paths.len(), 2);
        assert!(dec.paths.iter().all(|p| p.rate == rat(1)));
    }

    #[test]
    fn crossing_flows_need_three_paths() {
        // B->E carries traffic from both A->B and the C detour; no two
        // simple paths can cover all five links with consistent rates.
        let (_, vnet) = chain_vnet();
        let f = flow(&[
            ("A", "B", 1),
            ("A", "C", 2),
            ("C", "B", 1),
            ("C", "E", 1),
            ("B", "E", 2),
        ]);
        let dec = decompose(&f, &vnet).unwrap();
        assert_eq!(dec.mode, DecompMode::ExactMinimal);
        assert_eq!(dec.paths.len(), 3);
        assert!(dec.paths.iter().all(|p| p.rate == rat(1)));
        assert_eq!(aggregate(&dec.paths), f);
    }

    #[test]
    fn unbalanced_flows_name_the_offending_nodes() {
        let (_, vnet) = chain_vnet();
        let err = decompose(&flow(&[("A", "B", 2), ("B", "E", 1)]), &vnet).unwrap_err();
        match err {
            DecompError::Unbalanced { ref nodes } => {
                assert!(nodes.contains(&"B".to_string()), "{err}");
            }
            other => panic!("expected an unbalanced error, got {other}"),
        }
    }

    #[test]
    fn pure_cycles_are_refused() {
        let (_, vnet) = chain_vnet();
        let err =
            decompose(&flow(&[("B", "E", 1), ("E", "D", 1), ("D", "B", 1)]), &vnet).unwrap_err();
        assert_eq!(err, DecompError::Circulation { links: 3 });
    }

    #[test]
    fn leftover_cycles_are_refused() {
        // A valid A->E unit flow plus a disjoint three-link cycle.
        let (_, vnet) = chain_vnet();
        let f = flow(&[
            ("A", "C", 1),
            ("C", "E", 1),
            ("B", "E", 1),
            ("E", "D", 1),
            ("D", "B", 1),
        ]);
        let err = decompose(&f, &vnet).unwrap_err();
        assert_eq!(err, DecompError::Circulation { links: 3 });
    }

    #[test]
    fn foreign_links_and_negative_rates_are_refused() {
        let (_, vnet) = chain_vnet();
        assert_eq!(
            decompose(&flow(&[("A", "E", 1)]), &vnet).unwrap_err(),
            DecompError::UnknownLink { from: "A".into(), to: "E".into() }
        );
        assert_eq!(
            decompose(&flow(&[("A", "B", -1)]), &vnet).unwrap_err(),
            DecompError::NegativeFlow { from: "A".into(), to: "B".into() }
        );
    }

    #[test]
    fn empty_flows_decompose_to_nothing() {
        let (_, vnet) = chain_vnet();
        let dec = decompose(&BTreeMap::new(), &vnet).unwrap();
        assert!(dec.paths.is_empty());
    }

    #[test]
    fn wide_parallel_flows_switch_to_greedy_peeling() {
        // Fourteen flow-carrying links exceed the exhaustive-search limit.
        let lanes: Vec<String> = (0..7).map(|i| format!("m{i}")).collect();
        let mut nodes = vec!["s".to_string(), "t".to_string()];
        nodes.extend(lanes.iter().cloned());
        let mut links = Vec::new();
        for lane in &lanes {
            for (from, to) in [("s", lane.as_str()), (lane.as_str(), "t")] {
                links.push(Link {
                    from: from.to_string(),
                    to: to.to_string(),
                    capacity: rat(5),
                    delay: rat(1),
                });
            }
        }
        let instance: Instance = crate::SlicingInstance {
            network: PhysicalNetwork { nodes, links, clouds: Vec::new() },
            services: Vec::new(),
            weights: ObjectiveWeights::standard(),
        };
        let vnet = VirtualNetwork::build(&instance);
        let f: BTreeMap<(String, String), Rat> = lanes
            .iter()
            .flat_map(|lane| {
                [
                    (("s".to_string(), lane.clone()), rat(1)),
                    ((lane.clone(), "t".to_string()), rat(1)),
                ]
            })
            .collect();
        let dec = decompose(&f, &vnet).unwrap();
        assert_eq!(dec.mode, DecompMode::GreedyWidest);
        assert_eq!(dec.paths.len(), 7);
        assert_eq!(aggregate(&dec.paths), f);
    }

    #[test]
    fn random_path_mixes_round_trip_and_greedy_never_beats_exact() {
        let (_, vnet) = chain_vnet();
        let routes: [&[&str]; 3] = [&["A", "B", "E"], &["A", "C", "E"], &["A", "C", "B", "E"]];
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut f: BTreeMap<(String, String), Rat> = BTreeMap::new();
            let picks: usize = rng.gen_range(1..=3);
            for _ in 0..picks {
                let route = routes[rng.gen_range(0..routes.len())];
                let rate = Rat::ratio(rng.gen_range(1..=4), rng.gen_range(1..=3));
                for hop in route.windows(2) {
                    let slot = f
                        .entry((hop[0].to_string(), hop[1].to_string()))
                        .or_insert_with(Rat::zero);
                    *slot = slot.clone() + rate.clone();
                }
            }
            let exact = decompose(&f, &vnet).unwrap();
            let greedy = decompose_greedy(&f, &vnet).unwrap();
            assert_eq!(exact.mode, DecompMode::ExactMinimal);
            assert_eq!(aggregate(&exact.paths), f, "seed {seed}");
            assert_eq!(aggregate(&greedy.paths), f, "seed {seed}");
            assert!(greedy.paths.len() >= exact.paths.len(), "seed {seed}");
            assert!(exact.paths.len() <= picks, "seed {seed}");
            // Determinism: same input, same output.
            assert_eq!(decompose(&f, &vnet).unwrap(), exact);
        }
    }

    #[test]
    fn stitching_refines_mismatched_partitions() {
        let quarters = [
            vec![Rat::ratio(3, 4), Rat::ratio(1, 4)],
            vec![Rat::ratio(1, 2), Rat::ratio(1, 2)],
        ];
        assert_eq!(stitch(&quarters), (3, Rat::ratio(1, 4)));
        let aligned = [vec![rat(1)], vec![rat(1)], vec![rat(1)]];
        assert_eq!(stitch(&aligned), (1, rat(1)));
    }

    #[test]
    fn tight_chain_solution_reports_two_wide_paths() {
        let instance = example_chain();
        let vnet = VirtualNetwork::build(&instance);
        let (model, map) = build_ns1(&instance, &vnet, &BuildOptions::default()).unwrap();
        let sol = solve_exact(&model, &SolveLimits { gap: 0.0, ..SolveLimits::default() })
            .unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        let decoded: SlicingSolution<Rat> =
            decode_ns1(&model, &map, &sol.assignment.unwrap(), &instance, &vnet).unwrap();
        let stats = path_stats(&decoded, &instance).unwrap();
        let svc = &stats.per_service[&1];
        assert_eq!(svc.nump, 2);
        assert_eq!(svc.dr, rat(2));
        assert!(svc.exact);
        assert_eq!(stats.max_nump, 2);
        assert_eq!(stats.min_dr, Some(rat(2)));
    }

    #[test]
    fn single_route_services_report_one_path_at_full_rate() {
        let instance = example_pair();
        let vnet = VirtualNetwork::build(&instance);
        let (model, map) = build_ns1(&instance, &vnet, &BuildOptions::default()).unwrap();
        let sol = solve_exact(&model, &SolveLimits { gap: 0.0, ..SolveLimits::default() })
            .unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        let decoded: SlicingSolution<Rat> =
            decode_ns1(&model, &map, &sol.assignment.unwrap(), &instance, &vnet).unwrap();
        let stats = path_stats(&decoded, &instance).unwrap();
        for svc in &instance.services {
            let per = &stats.per_service[&svc.id];
            assert_eq!(per.nump, 1, "service {}", svc.id);
            let min_rate = (0..=svc.chain_len()).map(|s| svc.rate(s)).min().unwrap();
            assert_eq!(per.dr, *min_rate, "service {}", svc.id);
        }
        assert_eq!(stats.max_nump, 1);
    }
}
