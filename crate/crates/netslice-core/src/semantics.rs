//! Solution semantics: decoding solver assignments into domain solutions,
//! verifying feasibility at the domain level (graph traversal and exact
//! arithmetic, never the constraint matrices), encoding domain solutions
//! back into complete model assignments, and converting solutions between
//! the two formulations.
//!
//! The decoders recompute the delay ledger from the extracted paths (the
//! binding values) instead of copying possibly-slack solver values, so a
//! decoded solution reports true delays even when the objective puts no
//! weight on them.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::milp::{Assignment, MilpModel, VarId};
use crate::model::{
    SegmentPath, ServiceRequest, SlicingInstance, SlicingSolution, SolutionError, Violation,
};
use crate::ns1::Ns1VarMap;
use crate::ns2::Ns2VarMap;
use crate::scalar::Scalar;
use crate::vnet::VirtualNetwork;

/// How far a binary may sit from 0/1 before decoding refuses it.
pub const BINARY_TOL: f64 = 1e-6;

/// Slack allowed when decoded path rates are compared against link
/// capacities, as a rational (numerator, denominator) = 1e-6.
///
/// Path rates are the one part of a decoded solution that crosses the
/// floating-point solver boundary: placements are discrete, delays are
/// recomputed exactly from instance data, and per-segment rate sums are
/// renormalized to match the service rate exactly. A solver-saturated
/// link therefore decodes to a load that may sit within rounding error
/// of the exact capacity, and only this one comparison absorbs that;
/// every self-consistency check stays exact.
pub const RATE_SLACK: (i64, i64) = (1, 1_000_000);

/// Why an assignment could not be decoded into a domain solution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("assignment is missing variable {0}")]
    Missing(String),
    #[error("binary variable {name} = {value} is neither 0 nor 1")]
    Fractional { name: String, value: f64 },
    #[error("assignment does not describe a solution: {0}")]
    Structure(String),
}

struct Reader<'a> {
    model: &'a MilpModel,
    assignment: &'a Assignment,
}

impl<'a> Reader<'a> {
    fn value(&self, id: VarId) -> Result<f64, DecodeError> {
        let name = &self.model.var(id).name;
        self.assignment
            .get(name.as_str())
            .copied()
            .ok_or_else(|| DecodeError::Missing(name.clone()))
    }

    fn bit(&self, id: VarId) -> Result<bool, DecodeError> {
        let v = self.value(id)?;
        if (v - v.round()).abs() > BINARY_TOL {
            return Err(DecodeError::Fractional {
                name: self.model.var(id).name.clone(),
                value: v,
            });
        }
        Ok(v.round() == 1.0)
    }
}

/// Paths-per-segment budget a model was built with (stamped into its
/// metadata by both builders).
fn paths_of(model: &MilpModel) -> Result<usize, DecodeError> {
    model
        .metadata
        .get("paths")
        .and_then(|v| v.parse::<usize>().ok())
        .ok_or_else(|| DecodeError::Structure("model metadata lacks a paths count".into()))
}

/// Segment origin and target in the virtual network: the placed clones,
/// or the service endpoints at the boundaries.
fn segment_ends<S: Scalar>(
    svc: &ServiceRequest<S>,
    s: usize,
    placement_virtual: &BTreeMap<(u32, usize), String>,
) -> Option<(String, String)> {
    let ell = svc.chain_len();
    let origin = if s == 0 {
        svc.source.clone()
    } else {
        placement_virtual.get(&(svc.id, s))?.clone()
    };
    let target = if s == ell {
        svc.destination.clone()
    } else {
        placement_virtual.get(&(svc.id, s + 1))?.clone()
    };
    Some((origin, target))
}

/// One path slot's raw solver data: its index, rate value, and selected
/// link indices.
struct RawSlot {
    p: usize,
    rate: f64,
    support: Vec<usize>,
}

/// Turns a segment's raw slots into rate-carrying simple paths: walks each
/// slot's selected links from origin to target (excising any loops the
/// selection contains), snaps rates to scalars, and adjusts the largest
/// path so the segment total is exactly the segment rate.
fn decode_segment<S: Scalar>(
    vnet: &VirtualNetwork<S>,
    lambda: &S,
    origin: &str,
    target: &str,
    slots: &[RawSlot],
    label: &str,
) -> Result<Vec<(usize, SegmentPath<S>)>, DecodeError> {
    let mut kept: Vec<(usize, SegmentPath<S>)> = Vec::new();
    for slot in slots {
        let rate = S::snap_f64(slot.rate);
        if rate <= S::zero() {
            continue; // padding slot
        }
        let mut unused: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for &li in &slot.support {
            unused.entry(vnet.links[li].from.as_str()).or_default().push(li);
        }
        let mut nodes: Vec<String> = vec![origin.to_string()];
        let mut cur = origin.to_string();
        let mut steps = 0usize;
        while cur != target {
            steps += 1;
            if steps > slot.support.len() + 1 {
                return Err(DecodeError::Structure(format!(
                    "{label} path {} never reaches {target}",
                    slot.p
                )));
            }
            let li = unused
                .get_mut(cur.as_str())
                .and_then(|outs| if outs.is_empty() { None } else { Some(outs.remove(0)) })
                .ok_or_else(|| {
                    DecodeError::Structure(format!(
                        "{label} path {} is stuck at {cur} before reaching {target}",
                        slot.p
                    ))
                })?;
            let next = vnet.links[li].to.clone();
            if let Some(pos) = nodes.iter().position(|n| *n == next) {
                nodes.truncate(pos + 1); // drop the loop the selection carries
            } else {
                nodes.push(next.clone());
            }
            cur = next;
        }
        kept.push((slot.p, SegmentPath { nodes, rate }));
    }
    if kept.is_empty() {
        return Err(DecodeError::Structure(format!("{label} carries no rate")));
    }
    let total = kept.iter().fold(S::zero(), |acc, (_, sp)| acc + sp.rate.clone());
    if total != *lambda {
        let residual = lambda.clone() - total;
        let mut idx = 0;
        for (i, (_, sp)) in kept.iter().enumerate() {
            if sp.rate > kept[idx].1.rate {
                idx = i;
            }
        }
        let adjusted = kept[idx].1.rate.clone() + residual;
        if adjusted <= S::zero() {
            return Err(DecodeError::Structure(format!(
                "{label} path rates do not add up to the segment rate"
            )));
        }
        kept[idx].1.rate = adjusted;
    }
    Ok(kept)
}

/// Delay of a node path, when every hop is a virtual link.
fn path_delay<S: Scalar>(vnet: &VirtualNetwork<S>, nodes: &[String]) -> Option<S> {
    let mut delay_of: BTreeMap<(&str, &str), &S> = BTreeMap::new();
    for l in &vnet.links {
        delay_of.insert((l.from.as_str(), l.to.as_str()), &l.delay);
    }
    let mut total = S::zero();
    for hop in nodes.windows(2) {
        total = total + (*delay_of.get(&(hop[0].as_str(), hop[1].as_str()))?).clone();
    }
    Some(total)
}

/// Shared tail of both decoders: store the kept paths, derive link rates,
/// and recompute the delay ledger from the paths and placements.
fn finish_solution<S: Scalar>(
    instance: &SlicingInstance<S>,
    vnet: &VirtualNetwork<S>,
    mut solution: SlicingSolution<S>,
    kept: BTreeMap<(u32, usize), Vec<(usize, SegmentPath<S>)>>,
) -> Result<SlicingSolution<S>, DecodeError> {
    for ((k, s), paths) in kept {
        let mut worst: Option<S> = None;
        for (p, path) in paths {
            let mut rates: BTreeMap<(String, String), S> = BTreeMap::new();
            for hop in path.nodes.windows(2) {
                rates.insert((hop[0].clone(), hop[1].clone()), path.rate.clone());
            }
            solution.link_rate.insert((k, s, p), rates);
            let d = path_delay(vnet, &path.nodes).ok_or_else(|| {
                DecodeError::Structure(format!(
                    "service {k} segment {s} path {p} uses a nonexistent link"
                ))
            })?;
            if worst.as_ref().is_none_or(|w| d > *w) {
                worst = Some(d);
            }
            solution.paths.insert((k, s, p), path);
        }
        solution.hop_delay.insert((k, s), worst.expect("kept segments are nonempty"));
    }
    for svc in &instance.services {
        let mut comm = S::zero();
        for s in 0..=svc.chain_len() {
            comm = comm
                + solution
                    .hop_delay
                    .get(&(svc.id, s))
                    .cloned()
                    .ok_or_else(|| {
                        DecodeError::Structure(format!(
                            "service {} segment {s} produced no paths",
                            svc.id
                        ))
                    })?;
        }
        let mut proc = S::zero();
        for s in 1..=svc.chain_len() {
            let v = &solution.placement_physical[&(svc.id, s)];
            proc = proc
                + svc.nfv_delays.get(&(v.clone(), s)).cloned().unwrap_or_else(S::zero);
        }
        solution.comm_delay.insert(svc.id, comm);
        solution.proc_delay.insert(svc.id, proc);
    }
    Ok(solution)
}

/// Reads the placement block (identical in both formulations) into the
/// solution: activations plus the virtual and physical placement of every
/// stage, cross-checked against each other.
fn decode_placements<S: Scalar>(
    reader: &Reader,
    instance: &SlicingInstance<S>,
    vnet: &VirtualNetwork<S>,
    placement: &crate::ns1::PlacementVars,
) -> Result<SlicingSolution<S>, DecodeError> {
    let mut solution = SlicingSolution::default();
    for (v, &id) in &placement.y {
        if reader.bit(id)? {
            solution.activated.insert(v.clone());
        }
    }
    for svc in &instance.services {
        for s in 1..=svc.chain_len() {
            let mut placed: Vec<&String> = Vec::new();
            for ((k, stage, clone), &id) in &placement.x {
                if *k == svc.id && *stage == s && reader.bit(id)? {
                    placed.push(clone);
                }
            }
            if placed.len() != 1 {
                return Err(DecodeError::Structure(format!(
                    "service {} stage {s} is placed on {} clones",
                    svc.id,
                    placed.len()
                )));
            }
            let clone = placed[0].clone();
            let anchor = vnet
                .anchor_of(&clone)
                .ok_or_else(|| {
                    DecodeError::Structure(format!("{clone} is not a processing clone"))
                })?
                .to_string();
            let phys = placement.x0[&(svc.id, s, anchor.clone())];
            if !reader.bit(phys)? {
                return Err(DecodeError::Structure(format!(
                    "service {} stage {s} sits on {clone} but {anchor} is not marked",
                    svc.id
                )));
            }
            solution.placement_virtual.insert((svc.id, s), clone);
            solution.placement_physical.insert((svc.id, s), anchor);
        }
    }
    Ok(solution)
}

/// Decodes a solved pairwise-model assignment into a domain solution.
pub fn decode_ns1<S: Scalar>(
    model: &MilpModel,
    map: &Ns1VarMap,
    assignment: &Assignment,
    instance: &SlicingInstance<S>,
    vnet: &VirtualNetwork<S>,
) -> Result<SlicingSolution<S>, DecodeError> {
    let reader = Reader { model, assignment };
    let paths = paths_of(model)?;
    let solution = decode_placements(&reader, instance, vnet, &map.placement)?;
    let mut kept = BTreeMap::new();
    for svc in &instance.services {
        for s in 0..=svc.chain_len() {
            let (origin, target) = segment_ends(svc, s, &solution.placement_virtual)
                .expect("placements were just decoded");
            let mut slots = Vec::with_capacity(paths);
            for p in 1..=paths {
                let rate = reader.value(
                    *map.r
                        .get(&(svc.id, s, origin.clone(), target.clone(), p))
                        .ok_or_else(|| {
                            DecodeError::Structure(format!(
                                "service {} segment {s} runs {origin} -> {target}, \
                                 which the model does not offer",
                                svc.id
                            ))
                        })?,
                )?;
                let mut support = Vec::new();
                let lo = (svc.id, s, origin.clone(), target.clone(), p, 0);
                let hi = (svc.id, s, origin.clone(), target.clone(), p, usize::MAX);
                for ((.., li), &id) in map.z.range(lo..=hi) {
                    if reader.bit(id)? {
                        support.push(*li);
                    }
                }
                slots.push(RawSlot { p, rate, support });
            }
            let label = format!("service {} segment {s}", svc.id);
            kept.insert(
                (svc.id, s),
                decode_segment(vnet, svc.rate(s), &origin, &target, &slots, &label)?,
            );
        }
    }
    finish_solution(instance, vnet, solution, kept)
}

/// Decodes a solved aggregated-model assignment into a domain solution.
pub fn decode_ns2<S: Scalar>(
    model: &MilpModel,
    map: &Ns2VarMap,
    assignment: &Assignment,
    instance: &SlicingInstance<S>,
    vnet: &VirtualNetwork<S>,
) -> Result<SlicingSolution<S>, DecodeError> {
    let reader = Reader { model, assignment };
    let paths = paths_of(model)?;
    let solution = decode_placements(&reader, instance, vnet, &map.placement)?;
    let mut kept = BTreeMap::new();
    for svc in &instance.services {
        for s in 0..=svc.chain_len() {
            let (origin, target) = segment_ends(svc, s, &solution.placement_virtual)
                .expect("placements were just decoded");
            let mut slots = Vec::with_capacity(paths);
            for p in 1..=paths {
                let rate = reader.value(map.r[&(svc.id, s, p)])?;
                let mut support = Vec::new();
                for ((.., li), &id) in map.z.range((svc.id, s, p, 0)..=(svc.id, s, p, usize::MAX))
                {
                    if reader.bit(id)? {
                        support.push(*li);
                    }
                }
                slots.push(RawSlot { p, rate, support });
            }
            let label = format!("service {} segment {s}", svc.id);
            kept.insert(
                (svc.id, s),
                decode_segment(vnet, svc.rate(s), &origin, &target, &slots, &label)?,
            );
        }
    }
    finish_solution(instance, vnet, solution, kept)
}

fn code(family: &str, detail: String, indices: String) -> Violation {
    Violation::new(&format!("{family}[{indices}]"), detail)
}

/// Checks a domain solution against the slicing problem itself: SFC order,
/// single-cloud placement, clone exclusivity, capacities, conservation of
/// the stored paths, and the latency budgets. All arithmetic is exact in
/// `S`; nothing here consults an optimization model. An empty result means
/// the solution is feasible for the instance with the given per-segment
/// path budget.
pub fn verify_domain<S: Scalar>(
    solution: &SlicingSolution<S>,
    instance: &SlicingInstance<S>,
    vnet: &VirtualNetwork<S>,
    paths: usize,
) -> Vec<Violation> {
    let mut out: Vec<Violation> = Vec::new();
    let services: BTreeMap<u32, &ServiceRequest<S>> =
        instance.services.iter().map(|svc| (svc.id, svc)).collect();

    for v in &solution.activated {
        if !instance.network.is_cloud(v) {
            out.push(code("activation", format!("activated node {v} is not a cloud"), format!("v={v}")));
        }
    }

    // Placements: present, anchored, capable, activated, exclusive.
    for svc in &instance.services {
        let mut per_clone: BTreeMap<&String, usize> = BTreeMap::new();
        for s in 1..=svc.chain_len() {
            let key = (svc.id, s);
            let idx = format!("k={},s={s}", svc.id);
            let (Some(clone), Some(phys)) =
                (solution.placement_virtual.get(&key), solution.placement_physical.get(&key))
            else {
                out.push(code("placement", format!("stage {s} of service {} is not placed", svc.id), idx));
                continue;
            };
            if vnet.anchor_of(clone) != Some(phys.as_str()) {
                out.push(code(
                    "placement",
                    format!("clone {clone} is not hosted by cloud {phys}"),
                    idx.clone(),
                ));
            }
            if !vnet.clone_can_process(clone, &svc.chain[s - 1]) {
                out.push(code(
                    "placement",
                    format!("clone {clone} cannot process {}", svc.chain[s - 1]),
                    idx.clone(),
                ));
            }
            if !solution.activated.contains(phys) {
                out.push(code(
                    "activation",
                    format!("cloud {phys} hosts service {} stage {s} but is not activated", svc.id),
                    idx,
                ));
            }
            *per_clone.entry(clone).or_default() += 1;
        }
        for (clone, n) in per_clone {
            if n > 1 {
                out.push(code(
                    "clone-exclusivity",
                    format!("clone {clone} hosts {n} stages of service {}", svc.id),
                    format!("k={},v={clone}", svc.id),
                ));
            }
        }
    }
    for (k, s) in solution.placement_virtual.keys() {
        let known = services.get(k).map(|svc| *s >= 1 && *s <= svc.chain_len());
        if known != Some(true) {
            out.push(code(
                "placement",
                "placement for unknown service or stage".into(),
                format!("k={k},s={s}"),
            ));
        }
    }

    // Paths: structure first, then aggregated balances.
    let mut link_use: BTreeMap<(&str, &str), S> = BTreeMap::new();
    for ((k, s, p), path) in &solution.paths {
        let idx = format!("k={k},s={s},p={p}");
        let Some(svc) = services.get(k).copied().filter(|svc| *s <= svc.chain_len()) else {
            out.push(code("path-key", "path for unknown service or segment".into(), idx));
            continue;
        };
        if *p < 1 || *p > paths {
            out.push(code(
                "path-count",
                format!("path index {p} is outside the budget of {paths}"),
                format!("k={k},s={s}"),
            ));
        }
        if path.rate <= S::zero() {
            out.push(code("path-rate", format!("stored path carries rate {}", path.rate), idx.clone()));
        }
        let Some((origin, target)) = segment_ends(svc, *s, &solution.placement_virtual) else {
            continue; // unplaced stages were already reported
        };
        if path.nodes.first() != Some(&origin) || path.nodes.last() != Some(&target) {
            out.push(code(
                "sfc-order",
                format!(
                    "segment must run {origin} -> {target}, path runs {} -> {}",
                    path.nodes.first().map_or("?", |n| n),
                    path.nodes.last().map_or("?", |n| n)
                ),
                idx.clone(),
            ));
        }
        for mid in path.nodes.iter().skip(1).rev().skip(1) {
            if vnet.is_clone(mid) {
                out.push(code(
                    "sfc-order",
                    format!("path visits processing clone {mid} in the middle of a segment"),
                    idx.clone(),
                ));
            }
        }
        let mut seen: BTreeSet<&String> = BTreeSet::new();
        for n in &path.nodes {
            if !seen.insert(n) {
                out.push(code("path-cycle", format!("node {n} repeats"), idx.clone()));
                break;
            }
        }
        let mut broken = false;
        for hop in path.nodes.windows(2) {
            let exists = vnet
                .links
                .iter()
                .any(|l| l.from == hop[0] && l.to == hop[1]);
            if !exists {
                out.push(code(
                    "path-link",
                    format!("no link {} -> {}", hop[0], hop[1]),
                    idx.clone(),
                ));
                broken = true;
            }
        }
        if !broken {
            for hop in path.nodes.windows(2) {
                let slot = link_use
                    .entry((hop[0].as_str(), hop[1].as_str()))
                    .or_insert_with(S::zero);
                *slot = slot.clone() + path.rate.clone();
            }
        }
        // Stored link rates must mirror the path.
        let derived: BTreeMap<(String, String), S> = path
            .nodes
            .windows(2)
            .map(|hop| ((hop[0].clone(), hop[1].clone()), path.rate.clone()))
            .collect();
        if solution.link_rate.get(&(*k, *s, *p)) != Some(&derived) {
            out.push(code(
                "link-rate",
                "stored per-link rates do not match the path".into(),
                idx,
            ));
        }
    }
    for (k, s, p) in solution.link_rate.keys() {
        if !solution.paths.contains_key(&(*k, *s, *p)) {
            out.push(code(
                "link-rate",
                "per-link rates for a path that does not exist".into(),
                format!("k={k},s={s},p={p}"),
            ));
        }
    }

    // Every segment's paths carry exactly the segment rate.
    for svc in &instance.services {
        for s in 0..=svc.chain_len() {
            let total = solution
                .paths
                .range((svc.id, s, 0)..=(svc.id, s, usize::MAX))
                .fold(S::zero(), |acc, (_, path)| acc + path.rate.clone());
            if total != *svc.rate(s) {
                out.push(code(
                    "rate-sum",
                    format!("paths carry {total}, segment rate is {}", svc.rate(s)),
                    format!("k={},s={s}", svc.id),
                ));
            }
        }
    }

    // Aggregated link load within capacity, up to the float-boundary
    // slack on the rates (see [`RATE_SLACK`]).
    let slack = S::ratio(RATE_SLACK.0, RATE_SLACK.1);
    for l in &vnet.links {
        if let Some(used) = link_use.get(&(l.from.as_str(), l.to.as_str())) {
            if used.clone() > l.capacity.clone() + slack.clone() {
                out.push(code(
                    "link-capacity",
                    format!("load {used} exceeds capacity {}", l.capacity),
                    format!("link=({},{})", l.from, l.to),
                ));
            }
        }
    }

    // Hosted processing rate within each cloud's capacity.
    for cloud in &instance.network.clouds {
        let mut hosted = S::zero();
        for svc in &instance.services {
            for s in 1..=svc.chain_len() {
                if solution.placement_physical.get(&(svc.id, s)) == Some(&cloud.id) {
                    hosted = hosted + svc.rate(s).clone();
                }
            }
        }
        if hosted > cloud.capacity {
            out.push(code(
                "node-capacity",
                format!("hosted rate {hosted} exceeds capacity {}", cloud.capacity),
                format!("v={}", cloud.id),
            ));
        }
    }

    // The recorded delay ledger must match the paths, and the true
    // end-to-end delay must fit the budget.
    for svc in &instance.services {
        let mut comm = S::zero();
        let mut complete = true;
        for s in 0..=svc.chain_len() {
            let worst = solution
                .paths
                .range((svc.id, s, 0)..=(svc.id, s, usize::MAX))
                .filter_map(|(_, path)| path_delay(vnet, &path.nodes))
                .fold(None::<S>, |acc, d| match acc {
                    Some(w) if w >= d => Some(w),
                    _ => Some(d),
                });
            let Some(worst) = worst else {
                complete = false; // no usable paths; rate-sum already fired
                continue;
            };
            if solution.hop_delay.get(&(svc.id, s)) != Some(&worst) {
                out.push(code(
                    "delay-ledger",
                    format!("recorded hop delay differs from the binding value {worst}"),
                    format!("k={},s={s}", svc.id),
                ));
            }
            comm = comm + worst;
        }
        let mut proc = S::zero();
        for s in 1..=svc.chain_len() {
            if let Some(v) = solution.placement_physical.get(&(svc.id, s)) {
                proc = proc + svc.nfv_delays.get(&(v.clone(), s)).cloned().unwrap_or_else(S::zero);
            } else {
                complete = false;
            }
        }
        if complete {
            if solution.comm_delay.get(&svc.id) != Some(&comm) {
                out.push(code(
                    "delay-ledger",
                    format!("recorded communication delay differs from {comm}"),
                    format!("k={}", svc.id),
                ));
            }
            if solution.proc_delay.get(&svc.id) != Some(&proc) {
                out.push(code(
                    "delay-ledger",
                    format!("recorded processing delay differs from {proc}"),
                    format!("k={}", svc.id),
                ));
            }
            let total = comm + proc;
            if total > svc.latency_budget {
                out.push(code(
                    "e2e-latency",
                    format!("end-to-end delay {total} exceeds budget {}", svc.latency_budget),
                    format!("k={}", svc.id),
                ));
            }
        }
    }

    out
}

/// Looks up each hop of a path as a virtual-network link index.
fn path_links<S: Scalar>(
    vnet: &VirtualNetwork<S>,
    nodes: &[String],
) -> Result<Vec<usize>, SolutionError> {
    let mut index: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for (li, l) in vnet.links.iter().enumerate() {
        index.insert((l.from.as_str(), l.to.as_str()), li);
    }
    nodes
        .windows(2)
        .map(|hop| {
            index.get(&(hop[0].as_str(), hop[1].as_str())).copied().ok_or_else(|| {
                SolutionError::Inconsistent(format!("no link {} -> {}", hop[0], hop[1]))
            })
        })
        .collect()
}

/// The segment's stored paths, with the lowest-index one repeated as the
/// filler for unused path slots (every slot of a model must trace some
/// origin-to-target route even at rate zero).
fn slot_paths<'s, S: Scalar>(
    solution: &'s SlicingSolution<S>,
    k: u32,
    s: usize,
    paths: usize,
) -> Result<Vec<(&'s SegmentPath<S>, bool)>, SolutionError> {
    let stored: BTreeMap<usize, &SegmentPath<S>> = solution
        .paths
        .range((k, s, 0)..=(k, s, usize::MAX))
        .map(|((.., p), path)| (*p, path))
        .collect();
    let filler = *stored.values().next().ok_or_else(|| {
        SolutionError::Incomplete(format!("service {k} segment {s} has no paths"))
    })?;
    Ok((1..=paths)
        .map(|p| stored.get(&p).map_or((filler, false), |path| (*path, true)))
        .collect())
}

/// Encodes a domain solution as a complete assignment for a pairwise
/// model: all placement, pair, routing, and delay variables get values
/// (zero everywhere the solution is silent). Feasibility of the result is
/// the caller's concern — run the assignment checker or [`verify_domain`]
/// first; structural mismatches (unknown links, missing placements) are
/// errors here.
pub fn encode_ns1<S: Scalar>(
    model: &MilpModel,
    map: &Ns1VarMap,
    instance: &SlicingInstance<S>,
    vnet: &VirtualNetwork<S>,
    solution: &SlicingSolution<S>,
) -> Result<Assignment, SolutionError> {
    let paths =
        paths_of(model).map_err(|e| SolutionError::Inconsistent(e.to_string()))?;
    let mut asg: Assignment =
        model.vars().iter().map(|v| (v.name.clone(), 0.0)).collect();
    let name = |id: VarId| model.var(id).name.clone();

    encode_placements(&map.placement, model, solution, &mut asg)?;

    for svc in &instance.services {
        let ell = svc.chain_len();
        for s in 0..=ell {
            let (origin, target) =
                segment_ends(svc, s, &solution.placement_virtual).ok_or_else(|| {
                    SolutionError::Incomplete(format!(
                        "service {} is missing a placement next to segment {s}",
                        svc.id
                    ))
                })?;
            if s >= 1 && s < ell {
                let w = map.w.get(&(svc.id, s, origin.clone(), target.clone())).ok_or_else(
                    || {
                        SolutionError::Inconsistent(format!(
                            "service {} segment {s} pair ({origin},{target}) is not modeled",
                            svc.id
                        ))
                    },
                )?;
                asg.insert(name(*w), 1.0);
            }
            for (p, (path, carries)) in
                slot_paths(solution, svc.id, s, paths)?.into_iter().enumerate()
            {
                let p = p + 1;
                let rate = if carries { path.rate.to_f64() } else { 0.0 };
                let r = map
                    .r
                    .get(&(svc.id, s, origin.clone(), target.clone(), p))
                    .ok_or_else(|| {
                        SolutionError::Inconsistent(format!(
                            "service {} segment {s} pair ({origin},{target}) is not modeled",
                            svc.id
                        ))
                    })?;
                asg.insert(name(*r), rate);
                for li in path_links(vnet, &path.nodes)? {
                    let key = (svc.id, s, origin.clone(), target.clone(), p, li);
                    let z = map.z.get(&key).ok_or_else(|| {
                        SolutionError::Inconsistent(format!(
                            "service {} segment {s} path {p} uses a link unavailable to it",
                            svc.id
                        ))
                    })?;
                    asg.insert(name(*z), 1.0);
                    asg.insert(name(map.rij[&key]), rate);
                }
            }
        }
    }

    encode_delays(&map.delays, model, instance, solution, &mut asg)?;
    Ok(asg)
}

/// Encodes a domain solution as a complete assignment for an aggregated
/// model; the counterpart of [`encode_ns1`].
pub fn encode_ns2<S: Scalar>(
    model: &MilpModel,
    map: &Ns2VarMap,
    instance: &SlicingInstance<S>,
    vnet: &VirtualNetwork<S>,
    solution: &SlicingSolution<S>,
) -> Result<Assignment, SolutionError> {
    let paths =
        paths_of(model).map_err(|e| SolutionError::Inconsistent(e.to_string()))?;
    let mut asg: Assignment =
        model.vars().iter().map(|v| (v.name.clone(), 0.0)).collect();
    let name = |id: VarId| model.var(id).name.clone();

    encode_placements(&map.placement, model, solution, &mut asg)?;

    for svc in &instance.services {
        let ell = svc.chain_len();
        for s in 0..=ell {
            for (p, (path, carries)) in
                slot_paths(solution, svc.id, s, paths)?.into_iter().enumerate()
            {
                let p = p + 1;
                let rate = if carries { path.rate.to_f64() } else { 0.0 };
                asg.insert(name(map.r[&(svc.id, s, p)]), rate);
                for li in path_links(vnet, &path.nodes)? {
                    let key = (svc.id, s, p, li);
                    let z = map.z.get(&key).ok_or_else(|| {
                        SolutionError::Inconsistent(format!(
                            "service {} segment {s} path {p} uses a link unavailable to it",
                            svc.id
                        ))
                    })?;
                    asg.insert(name(*z), 1.0);
                    asg.insert(name(map.rij[&key]), rate);
                }
                // Product variables: the path's rate on the placed clone's
                // attachment links, zero on every other candidate.
                if s >= 1 {
                    let placed = &solution.placement_virtual[&(svc.id, s)];
                    if let Some(om) = map.omega_exit.get(&(svc.id, s, p, placed.clone())) {
                        asg.insert(name(*om), rate);
                    }
                }
                if s < ell {
                    let placed = &solution.placement_virtual[&(svc.id, s + 1)];
                    if let Some(om) = map.omega_entry.get(&(svc.id, s, p, placed.clone())) {
                        asg.insert(name(*om), rate);
                    }
                }
            }
        }
    }

    encode_delays(&map.delays, model, instance, solution, &mut asg)?;
    Ok(asg)
}

fn encode_placements<S: Scalar>(
    placement: &crate::ns1::PlacementVars,
    model: &MilpModel,
    solution: &SlicingSolution<S>,
    asg: &mut Assignment,
) -> Result<(), SolutionError> {
    let name = |id: VarId| model.var(id).name.clone();
    for (v, &id) in &placement.y {
        if solution.activated.contains(v) {
            asg.insert(name(id), 1.0);
        }
    }
    for ((k, s), clone) in &solution.placement_virtual {
        let id = placement.x.get(&(*k, *s, clone.clone())).ok_or_else(|| {
            SolutionError::Inconsistent(format!(
                "service {k} stage {s} placement {clone} is not a candidate"
            ))
        })?;
        asg.insert(name(*id), 1.0);
    }
    for ((k, s), phys) in &solution.placement_physical {
        let id = placement.x0.get(&(*k, *s, phys.clone())).ok_or_else(|| {
            SolutionError::Inconsistent(format!(
                "service {k} stage {s} cloud {phys} is not a candidate"
            ))
        })?;
        asg.insert(name(*id), 1.0);
    }
    Ok(())
}

fn encode_delays<S: Scalar>(
    delays: &crate::ns1::DelayVars,
    model: &MilpModel,
    instance: &SlicingInstance<S>,
    solution: &SlicingSolution<S>,
    asg: &mut Assignment,
) -> Result<(), SolutionError> {
    let name = |id: VarId| model.var(id).name.clone();
    for svc in &instance.services {
        let mut comm = 0.0;
        for s in 0..=svc.chain_len() {
            let hop = solution.hop_delay.get(&(svc.id, s)).ok_or_else(|| {
                SolutionError::Incomplete(format!(
                    "service {} segment {s} has no recorded hop delay",
                    svc.id
                ))
            })?;
            let v = hop.to_f64();
            asg.insert(name(delays.theta[&(svc.id, s)]), v);
            comm += v;
        }
        asg.insert(name(delays.theta_link[&svc.id]), comm);
        let mut proc = 0.0;
        for s in 1..=svc.chain_len() {
            let v = solution.placement_physical.get(&(svc.id, s)).ok_or_else(|| {
                SolutionError::Incomplete(format!("service {} stage {s} is not placed", svc.id))
            })?;
            proc += svc.nfv_delays.get(&(v.clone(), s)).map_or(0.0, Scalar::to_f64);
        }
        asg.insert(name(delays.theta_node[&svc.id]), proc);
    }
    Ok(())
}

/// Converts a domain-feasible solution of the aggregated formulation into
/// one usable with the pairwise formulation. The domain representation is
/// already common to both models, so the conversion verifies feasibility
/// (refusing otherwise) and rebuilds the derived fields; encoding the
/// result with [`encode_ns1`] yields an assignment satisfying every
/// pairwise-model constraint with the same objective value.
pub fn map_ns2_to_ns1<S: Scalar>(
    solution: &SlicingSolution<S>,
    instance: &SlicingInstance<S>,
    vnet: &VirtualNetwork<S>,
    paths: usize,
) -> Result<SlicingSolution<S>, Vec<Violation>> {
    convert(solution, instance, vnet, paths)
}

/// Converts a domain-feasible solution of the pairwise formulation into
/// one usable with the aggregated formulation; the inverse of
/// [`map_ns2_to_ns1`] and its exact round-trip partner.
pub fn map_ns1_to_ns2<S: Scalar>(
    solution: &SlicingSolution<S>,
    instance: &SlicingInstance<S>,
    vnet: &VirtualNetwork<S>,
    paths: usize,
) -> Result<SlicingSolution<S>, Vec<Violation>> {
    convert(solution, instance, vnet, paths)
}

fn convert<S: Scalar>(
    solution: &SlicingSolution<S>,
    instance: &SlicingInstance<S>,
    vnet: &VirtualNetwork<S>,
    paths: usize,
) -> Result<SlicingSolution<S>, Vec<Violation>> {
    let violations = verify_domain(solution, instance, vnet, paths);
    if !violations.is_empty() {
        return Err(violations);
    }
    let mut out = solution.clone();
    // Rebuild the derived fields from the primary ones so the result is
    // internally consistent even if the input carried extra precision.
    out.link_rate.clear();
    for ((k, s, p), path) in &out.paths {
        let rates = path
            .nodes
            .windows(2)
            .map(|hop| ((hop[0].clone(), hop[1].clone()), path.rate.clone()))
            .collect();
        out.link_rate.insert((*k, *s, *p), rates);
    }
    Ok(out)
}

/// The objective value a model assigns to an encoded assignment.
pub fn objective_of(model: &MilpModel, assignment: &Assignment) -> Option<f64> {
    let x: Option<Vec<f64>> =
        model.vars().iter().map(|v| assignment.get(v.name.as_str()).copied()).collect();
    Some(model.objective_value(&x?))
}
