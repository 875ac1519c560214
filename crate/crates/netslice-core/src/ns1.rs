//! The pairwise routing formulation.
//!
//! One MILP variable block per *endpoint pair*: for every chain segment the
//! builder enumerates all candidate (source clone, destination clone) pairs
//! and creates per-pair, per-path routing variables. Placement products
//! `x·x` are linearized through auxiliary pair binaries. The formulation is
//! exact but large — variable and constraint counts grow with the square of
//! the candidate-host count — which is what the aggregated formulation
//! ([`crate::ns2`]) removes.
//!
//! Both formulations share the placement/activation/capacity block and the
//! delay ledger, emitted by the `pub(crate)` helpers in this module, so the
//! shared constraint families are coefficient-identical across the two
//! models (same tags, same variable names).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::milp::{MilpModel, Sense, VarId};
use crate::model::{ServiceRequest, SlicingInstance};
use crate::scalar::Scalar;
use crate::vnet::VirtualNetwork;

/// Build-time parameters shared by both formulations.
#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Number of paths `P` a segment's traffic may split across (>= 1).
    pub paths: usize,
    /// Delay weight in the objective; `None` uses the instance's own
    /// `weights.sigma`.
    pub sigma: Option<f64>,
    /// Whether the per-service end-to-end latency budgets are enforced as
    /// constraints. Off, the delay ledger is still built (and still enters
    /// the objective) but budgets do not restrict feasibility.
    pub latency_enforced: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { paths: 2, sigma: None, latency_enforced: true }
    }
}

/// Why a model could not be built.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("path count must be at least 1")]
    PathCount,
    /// A chain stage has no capable cloud node anywhere in the network
    /// (also covers functions that no cloud knows at all).
    #[error("service {service}: function {function} at stage {stage} has no capable cloud node")]
    UnplaceableFunction { service: u32, function: String, stage: usize },
    /// Node ids are embedded in variable names, so they must stay within
    /// the name alphabet (ASCII letters and digits).
    #[error("node id {0} is not usable in variable names (ASCII letters and digits only)")]
    NodeIdChar(String),
}

/// Placement variables shared by both formulations: activation `y` per
/// cloud, clone placement `x` per (service, stage, clone), physical
/// placement `x0` per (service, stage, cloud). Capability-infeasible
/// placements are never created (equivalent to fixing them to zero).
#[derive(Debug, Clone, Default)]
pub struct PlacementVars {
    pub y: BTreeMap<String, VarId>,
    pub x: BTreeMap<(u32, usize, String), VarId>,
    pub x0: BTreeMap<(u32, usize, String), VarId>,
}

/// Delay-ledger variables shared by both formulations: per-segment hop
/// delay `theta`, per-service communication total and processing total.
#[derive(Debug, Clone, Default)]
pub struct DelayVars {
    pub theta: BTreeMap<(u32, usize), VarId>,
    pub theta_link: BTreeMap<u32, VarId>,
    pub theta_node: BTreeMap<u32, VarId>,
}

/// Lookup tables from semantic indices to the variables of a built
/// pairwise model. Pair-indexed families are keyed by the segment's
/// endpoint pair `(a, b)`; the boundary convention fixes `a` to the
/// service source at `s = 0` and `b` to the destination at `s = ell`.
/// Link-indexed families use indices into [`VirtualNetwork::links`].
#[derive(Debug, Clone, Default)]
pub struct Ns1VarMap {
    pub placement: PlacementVars,
    /// Pair activation `w = x_a * x_b` for interior segments `1..ell`.
    pub w: BTreeMap<(u32, usize, String, String), VarId>,
    /// Path rate per (service, segment, a, b, path).
    pub r: BTreeMap<(u32, usize, String, String, usize), VarId>,
    /// Link-use indicator per (service, segment, a, b, path, link).
    pub z: BTreeMap<(u32, usize, String, String, usize, usize), VarId>,
    /// Link rate per (service, segment, a, b, path, link).
    pub rij: BTreeMap<(u32, usize, String, String, usize, usize), VarId>,
    pub delays: DelayVars,
}

/// Everything both builders derive from the inputs before creating
/// variables; [`prepare`] also performs the shared precondition checks.
pub(crate) struct BuildPrep<'a, S> {
    pub instance: &'a SlicingInstance<S>,
    pub vnet: &'a VirtualNetwork<S>,
    /// Capable clones per service (outer) and stage (inner, 1-based
    /// stage `s` at index `s - 1`), in deterministic host order.
    pub hosts: Vec<Vec<Vec<String>>>,
    pub paths: usize,
    pub sigma: f64,
    pub latency_enforced: bool,
}

impl<'a, S: Scalar> BuildPrep<'a, S> {
    /// Segment endpoints: candidate source-side nodes and destination-side
    /// nodes of segment `s in 0..=ell` for service index `ki`.
    pub fn sides(&self, ki: usize, s: usize) -> (Vec<String>, Vec<String>) {
        let svc = &self.instance.services[ki];
        let ell = svc.chain_len();
        let a = if s == 0 { vec![svc.source.clone()] } else { self.hosts[ki][s - 1].clone() };
        let b = if s == ell {
            vec![svc.destination.clone()]
        } else {
            self.hosts[ki][s].clone()
        };
        (a, b)
    }

    /// Ordered (a, b) pairs of segment `s`: the cross product minus the
    /// diagonal (a node cannot be both endpoints of one segment).
    pub fn pairs(&self, ki: usize, s: usize) -> Vec<(String, String)> {
        let (sa, sb) = self.sides(ki, s);
        let mut out = Vec::new();
        for a in &sa {
            for b in &sb {
                if a != b {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
        out
    }
}

pub(crate) fn prepare<'a, S: Scalar>(
    instance: &'a SlicingInstance<S>,
    vnet: &'a VirtualNetwork<S>,
    options: &BuildOptions,
) -> Result<BuildPrep<'a, S>, BuildError> {
    assert!(
        vnet.physical == instance.network,
        "derived routing network was built from a different instance"
    );
    if options.paths < 1 {
        return Err(BuildError::PathCount);
    }
    for n in &instance.network.nodes {
        if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric()) {
            return Err(BuildError::NodeIdChar(n.clone()));
        }
    }
    let mut hosts = Vec::with_capacity(instance.services.len());
    for svc in &instance.services {
        let mut per_stage = Vec::with_capacity(svc.chain_len());
        for (idx, function) in svc.chain.iter().enumerate() {
            let capable: Vec<String> =
                vnet.hosts(function).into_iter().map(str::to_string).collect();
            if capable.is_empty() {
                return Err(BuildError::UnplaceableFunction {
                    service: svc.id,
                    function: function.clone(),
                    stage: idx + 1,
                });
            }
            per_stage.push(capable);
        }
        hosts.push(per_stage);
    }
    let sigma = options.sigma.unwrap_or_else(|| instance.weights.sigma.to_f64());
    Ok(BuildPrep {
        instance,
        vnet,
        hosts,
        paths: options.paths,
        sigma,
        latency_enforced: options.latency_enforced,
    })
}

/// Physical clouds hosting the given clones, deduplicated, in host order.
pub(crate) fn anchors<S: Scalar>(vnet: &VirtualNetwork<S>, clones: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for c in clones {
        let a = vnet.anchor_of(c).expect("host lists contain only clones");
        if out.last().map(String::as_str) != Some(a) {
            out.push(a.to_string());
        }
    }
    out
}

/// Link indices available to a segment with endpoints `a` and `b`: every
/// physical link plus the attachment links of whichever endpoints are
/// clones. Sorted by link index (physical links first).
pub(crate) fn segment_links<S: Scalar>(
    vnet: &VirtualNetwork<S>,
    a: &str,
    b: &str,
) -> Vec<usize> {
    let n_phys = vnet.physical.links.len();
    let mut out: Vec<usize> = (0..n_phys).collect();
    for node in [a, b] {
        if vnet.is_clone(node) {
            out.extend_from_slice(vnet.out_links(node));
            out.extend_from_slice(vnet.in_links(node));
        }
    }
    out.sort_unstable();
    out
}

pub(crate) fn add_placement_vars<S: Scalar>(
    model: &mut MilpModel,
    prep: &BuildPrep<S>,
) -> PlacementVars {
    // Branching priorities follow the decision hierarchy: activations
    // steer everything, placements steer routing, and the routing
    // binaries (priority 0) are usually forced once those are fixed.
    let mut pv = PlacementVars::default();
    for cloud in &prep.instance.network.clouds {
        pv.y.insert(
            cloud.id.clone(),
            model.add_binary_with_priority(format!("y_{}", cloud.id), 0),
        );
    }
    for (ki, svc) in prep.instance.services.iter().enumerate() {
        for s in 1..=svc.chain_len() {
            for i in &prep.hosts[ki][s - 1] {
                let id = model.add_binary_with_priority(format!("x_k{}_s{}_{}", svc.id, s, i), 0);
                pv.x.insert((svc.id, s, i.clone()), id);
            }
            for v in anchors(prep.vnet, &prep.hosts[ki][s - 1]) {
                let id =
                    model.add_binary_with_priority(format!("x0_k{}_s{}_{}", svc.id, s, v), 0);
                pv.x0.insert((svc.id, s, v), id);
            }
        }
    }
    pv
}

pub(crate) fn add_placement_rows<S: Scalar>(
    model: &mut MilpModel,
    prep: &BuildPrep<S>,
    pv: &PlacementVars,
) {
    let services = &prep.instance.services;
    // A clone may host at most one stage of a service. Rows with fewer
    // than two candidate stages are implied by the binary bound.
    for svc in services {
        for clone_ids in prep.vnet.clones.values() {
            for clone in clone_ids {
                let terms: Vec<(VarId, f64)> = (1..=svc.chain_len())
                    .filter_map(|s| pv.x.get(&(svc.id, s, clone.clone())))
                    .map(|&id| (id, 1.0))
                    .collect();
                if terms.len() >= 2 {
                    model.add_constraint(
                        format!("clone-exclusivity[k={},v={}]", svc.id, clone),
                        terms,
                        Sense::Le,
                        1.0,
                    );
                }
            }
        }
    }
    // Each stage runs on exactly one physical cloud.
    for (ki, svc) in services.iter().enumerate() {
        for s in 1..=svc.chain_len() {
            let terms: Vec<(VarId, f64)> = anchors(prep.vnet, &prep.hosts[ki][s - 1])
                .iter()
                .map(|v| (pv.x0[&(svc.id, s, v.clone())], 1.0))
                .collect();
            model.add_constraint(
                format!("exactly-one-node[k={},s={s}]", svc.id),
                terms,
                Sense::Eq,
                1.0,
            );
        }
    }
    // Physical placement aggregates the placements on the cloud's clones.
    for (ki, svc) in services.iter().enumerate() {
        for s in 1..=svc.chain_len() {
            for v in anchors(prep.vnet, &prep.hosts[ki][s - 1]) {
                let mut terms = vec![(pv.x0[&(svc.id, s, v.clone())], 1.0)];
                for i in &prep.hosts[ki][s - 1] {
                    if prep.vnet.anchor_of(i) == Some(v.as_str()) {
                        terms.push((pv.x[&(svc.id, s, i.clone())], -1.0));
                    }
                }
                model.add_constraint(
                    format!("physical-placement-link[k={},s={s},v={v}]", svc.id),
                    terms,
                    Sense::Eq,
                    0.0,
                );
            }
        }
    }
    // Placement forces activation.
    for (ki, svc) in services.iter().enumerate() {
        for s in 1..=svc.chain_len() {
            for v in anchors(prep.vnet, &prep.hosts[ki][s - 1]) {
                model.add_constraint(
                    format!("placement-activation[k={},s={s},v={v}]", svc.id),
                    vec![(pv.x0[&(svc.id, s, v.clone())], 1.0), (pv.y[&v], -1.0)],
                    Sense::Le,
                    0.0,
                );
            }
        }
    }
    // Hosted rate must fit the cloud's capacity (zero when inactive).
    for cloud in &prep.instance.network.clouds {
        let mut terms: Vec<(VarId, f64)> = Vec::new();
        for svc in services {
            for s in 1..=svc.chain_len() {
                if let Some(&id) = pv.x0.get(&(svc.id, s, cloud.id.clone())) {
                    terms.push((id, svc.rate(s).to_f64()));
                }
            }
        }
        let mu = cloud.capacity.to_f64();
        if terms.is_empty() && mu == 0.0 {
            continue; // nothing to constrain
        }
        terms.push((pv.y[&cloud.id], -mu));
        model.add_constraint(format!("node-capacity[v={}]", cloud.id), terms, Sense::Le, 0.0);
    }
    // Aggregate capacity of activated clouds covers the total load: the
    // sum of the per-cloud rows, kept as a redundant strengthening row.
    let agg: Vec<(VarId, f64)> = prep
        .instance
        .network
        .clouds
        .iter()
        .filter(|c| c.capacity.to_f64() != 0.0)
        .map(|c| (pv.y[&c.id], c.capacity.to_f64()))
        .collect();
    if !agg.is_empty() {
        let demand = prep.instance.total_processing_rate().to_f64();
        model.add_constraint("aggregate-capacity", agg, Sense::Ge, demand);
    }
}

pub(crate) fn add_delay_vars<S: Scalar>(
    model: &mut MilpModel,
    prep: &BuildPrep<S>,
) -> DelayVars {
    let mut dv = DelayVars::default();
    let route_delay_cap = prep.vnet.total_delay().to_f64();
    for (ki, svc) in prep.instance.services.iter().enumerate() {
        let ell = svc.chain_len();
        let budget = svc.latency_budget.to_f64();
        let theta_ub = if prep.latency_enforced {
            budget.min(route_delay_cap)
        } else {
            route_delay_cap
        };
        for s in 0..=ell {
            let id = model.add_continuous(format!("th_k{}_s{s}", svc.id), 0.0, theta_ub);
            dv.theta.insert((svc.id, s), id);
        }
        let mut link_total = route_delay_cap * (ell + 1) as f64;
        let mut proc_total = 0.0;
        for s in 1..=ell {
            let worst = anchors(prep.vnet, &prep.hosts[ki][s - 1])
                .iter()
                .map(|v| svc.nfv_delays.get(&(v.clone(), s)).map_or(0.0, Scalar::to_f64))
                .fold(0.0, f64::max);
            proc_total += worst;
        }
        if prep.latency_enforced {
            link_total = link_total.min(budget);
            proc_total = proc_total.min(budget);
        }
        let id = model.add_continuous(format!("thL_k{}", svc.id), 0.0, link_total);
        dv.theta_link.insert(svc.id, id);
        let id = model.add_continuous(format!("thN_k{}", svc.id), 0.0, proc_total);
        dv.theta_node.insert(svc.id, id);
    }
    dv
}

pub(crate) fn add_delay_rows<S: Scalar>(
    model: &mut MilpModel,
    prep: &BuildPrep<S>,
    pv: &PlacementVars,
    dv: &DelayVars,
) {
    for (ki, svc) in prep.instance.services.iter().enumerate() {
        let ell = svc.chain_len();
        let mut terms = vec![(dv.theta_link[&svc.id], 1.0)];
        for s in 0..=ell {
            terms.push((dv.theta[&(svc.id, s)], -1.0));
        }
        model.add_constraint(format!("comm-delay-sum[k={}]", svc.id), terms, Sense::Eq, 0.0);

        let mut terms = vec![(dv.theta_node[&svc.id], 1.0)];
        for s in 1..=ell {
            for v in anchors(prep.vnet, &prep.hosts[ki][s - 1]) {
                let d = svc.nfv_delays.get(&(v.clone(), s)).map_or(0.0, Scalar::to_f64);
                terms.push((pv.x0[&(svc.id, s, v)], -d));
            }
        }
        model.add_constraint(format!("proc-delay-sum[k={}]", svc.id), terms, Sense::Eq, 0.0);
    }
    if prep.latency_enforced {
        for svc in &prep.instance.services {
            model.add_constraint(
                format!("e2e-budget[k={}]", svc.id),
                vec![(dv.theta_link[&svc.id], 1.0), (dv.theta_node[&svc.id], 1.0)],
                Sense::Le,
                svc.latency_budget.to_f64(),
            );
        }
    }
}

pub(crate) fn set_model_objective<S: Scalar>(
    model: &mut MilpModel,
    prep: &BuildPrep<S>,
    pv: &PlacementVars,
    dv: &DelayVars,
) {
    let mut terms: Vec<(VarId, f64)> = pv.y.values().map(|&id| (id, 1.0)).collect();
    for svc in &prep.instance.services {
        terms.push((dv.theta_link[&svc.id], prep.sigma));
        terms.push((dv.theta_node[&svc.id], prep.sigma));
    }
    model.set_objective(terms);
}

pub(crate) fn stamp_metadata<S: Scalar>(model: &mut MilpModel, prep: &BuildPrep<S>) {
    model.metadata.insert("paths".into(), prep.paths.to_string());
    model.metadata.insert("sigma".into(), format!("{}", prep.sigma));
    model
        .metadata
        .insert("latency".into(), if prep.latency_enforced { "on" } else { "off" }.into());
    model.metadata.insert("services".into(), prep.instance.services.len().to_string());
}

/// The pair-gate of a segment: the variable whose value says whether the
/// endpoint pair `(a, b)` is the active one — the pair binary `w` on
/// interior segments, the first/last placement variable at the
/// boundaries (where the other endpoint is pinned to the source or
/// destination).
fn pair_gate(map: &Ns1VarMap, svc: &ServiceRequest<impl Scalar>, s: usize, a: &str, b: &str) -> VarId {
    let ell = svc.chain_len();
    if s == 0 {
        map.placement.x[&(svc.id, 1, b.to_string())]
    } else if s == ell {
        map.placement.x[&(svc.id, ell, a.to_string())]
    } else {
        map.w[&(svc.id, s, a.to_string(), b.to_string())]
    }
}

/// Builds the pairwise model. Returns the model plus the index map that
/// names every variable family.
pub fn build_ns1<S: Scalar>(
    instance: &SlicingInstance<S>,
    vnet: &VirtualNetwork<S>,
    options: &BuildOptions,
) -> Result<(MilpModel, Ns1VarMap), BuildError> {
    let prep = prepare(instance, vnet, options)?;
    let mut model = MilpModel::new("ns1");
    model.metadata.insert("formulation".into(), "ns1".into());
    stamp_metadata(&mut model, &prep);

    let mut map = Ns1VarMap { placement: add_placement_vars(&mut model, &prep), ..Default::default() };

    // Pair binaries for interior segments. Integral placements force
    // these, so they sit between placement and routing in branch order.
    for (ki, svc) in instance.services.iter().enumerate() {
        for s in 1..svc.chain_len() {
            for (a, b) in prep.pairs(ki, s) {
                let id = model.add_binary_with_priority(format!("w_k{}_s{s}_{a}_{b}", svc.id), 0);
                map.w.insert((svc.id, s, a, b), id);
            }
        }
    }

    // Routing variables per segment pair and path; link loads are
    // accumulated for the capacity rows as the variables appear.
    let mut link_load: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); vnet.links.len()];
    for (ki, svc) in instance.services.iter().enumerate() {
        for s in 0..=svc.chain_len() {
            let lambda = svc.rate(s).to_f64();
            for (a, b) in prep.pairs(ki, s) {
                for p in 1..=prep.paths {
                    let id = model
                        .add_continuous(format!("r_k{}_s{s}_{a}_{b}_p{p}", svc.id), 0.0, lambda);
                    map.r.insert((svc.id, s, a.clone(), b.clone(), p), id);
                }
                let links = segment_links(vnet, &a, &b);
                for p in 1..=prep.paths {
                    for &li in &links {
                        let l = &vnet.links[li];
                        let id = model.add_binary(format!(
                            "z_k{}_s{s}_{a}_{b}_p{p}_{}_{}",
                            svc.id, l.from, l.to
                        ));
                        map.z.insert((svc.id, s, a.clone(), b.clone(), p, li), id);
                    }
                }
                for p in 1..=prep.paths {
                    for &li in &links {
                        let l = &vnet.links[li];
                        let id = model.add_continuous(
                            format!("rij_k{}_s{s}_{a}_{b}_p{p}_{}_{}", svc.id, l.from, l.to),
                            0.0,
                            lambda,
                        );
                        map.rij.insert((svc.id, s, a.clone(), b.clone(), p, li), id);
                        link_load[li].push((id, 1.0));
                    }
                }
            }
        }
    }
    map.delays = add_delay_vars(&mut model, &prep);

    add_placement_rows(&mut model, &prep, &map.placement);

    // Per-pair rate totals: the paths of an active pair jointly carry the
    // whole segment rate; inactive pairs carry nothing.
    for (ki, svc) in instance.services.iter().enumerate() {
        for s in 0..=svc.chain_len() {
            let lambda = svc.rate(s).to_f64();
            for (a, b) in prep.pairs(ki, s) {
                let mut terms: Vec<(VarId, f64)> = (1..=prep.paths)
                    .map(|p| (map.r[&(svc.id, s, a.clone(), b.clone(), p)], 1.0))
                    .collect();
                terms.push((pair_gate(&map, svc, s, &a, &b), -lambda));
                model.add_constraint(
                    format!("rate-coupling[k={},s={s},vs={a},vs1={b}]", svc.id),
                    terms,
                    Sense::Eq,
                    0.0,
                );
            }
        }
    }

    // The three-inequality envelope tying each pair binary to its two
    // placement variables (w = x_a AND x_b).
    for (ki, svc) in instance.services.iter().enumerate() {
        for s in 1..svc.chain_len() {
            for (a, b) in prep.pairs(ki, s) {
                let w = map.w[&(svc.id, s, a.clone(), b.clone())];
                let xa = map.placement.x[&(svc.id, s, a.clone())];
                let xb = map.placement.x[&(svc.id, s + 1, b.clone())];
                let base = format!("product-link[k={},s={s},vs={a},vs1={b}", svc.id);
                model.add_constraint(
                    format!("{base},side=a]"),
                    vec![(w, 1.0), (xa, -1.0)],
                    Sense::Le,
                    0.0,
                );
                model.add_constraint(
                    format!("{base},side=b]"),
                    vec![(w, 1.0), (xb, -1.0)],
                    Sense::Le,
                    0.0,
                );
                model.add_constraint(
                    format!("{base},side=and]"),
                    vec![(xa, 1.0), (xb, 1.0), (w, -1.0)],
                    Sense::Le,
                    1.0,
                );
            }
        }
    }

    // A link may sit on a pair's path only if the pair is active.
    for (ki, svc) in instance.services.iter().enumerate() {
        for s in 0..=svc.chain_len() {
            for (a, b) in prep.pairs(ki, s) {
                let gate = pair_gate(&map, svc, s, &a, &b);
                for p in 1..=prep.paths {
                    for &li in &segment_links(vnet, &a, &b) {
                        let l = &vnet.links[li];
                        let z = map.z[&(svc.id, s, a.clone(), b.clone(), p, li)];
                        model.add_constraint(
                            format!(
                                "indicator-coupling[k={},s={s},vs={a},vs1={b},p={p},link=({},{})]",
                                svc.id, l.from, l.to
                            ),
                            vec![(z, 1.0), (gate, -1.0)],
                            Sense::Le,
                            0.0,
                        );
                    }
                }
            }
        }
    }

    // A path may use at most one of a processing clone's two attachment
    // links (enter to be processed, or leave after processing — never a
    // pass-through).
    for (ki, svc) in instance.services.iter().enumerate() {
        for s in 0..=svc.chain_len() {
            for (a, b) in prep.pairs(ki, s) {
                for p in 1..=prep.paths {
                    for node in [&a, &b] {
                        if !vnet.is_clone(node) {
                            continue;
                        }
                        let out = vnet.out_links(node)[0];
                        let inc = vnet.in_links(node)[0];
                        model.add_constraint(
                            format!(
                                "clone-loop[k={},s={s},vs={a},vs1={b},p={p},v={node}]",
                                svc.id
                            ),
                            vec![
                                (map.z[&(svc.id, s, a.clone(), b.clone(), p, out)], 1.0),
                                (map.z[&(svc.id, s, a.clone(), b.clone(), p, inc)], 1.0),
                            ],
                            Sense::Le,
                            1.0,
                        );
                    }
                }
            }
        }
    }

    // Link rate flows only on selected links, at most the segment rate.
    for (ki, svc) in instance.services.iter().enumerate() {
        for s in 0..=svc.chain_len() {
            let lambda = svc.rate(s).to_f64();
            for (a, b) in prep.pairs(ki, s) {
                for p in 1..=prep.paths {
                    for &li in &segment_links(vnet, &a, &b) {
                        let l = &vnet.links[li];
                        let key = (svc.id, s, a.clone(), b.clone(), p, li);
                        model.add_constraint(
                            format!(
                                "rate-indicator-link[k={},s={s},vs={a},vs1={b},p={p},link=({},{})]",
                                svc.id, l.from, l.to
                            ),
                            vec![(map.rij[&key], 1.0), (map.z[&key], -lambda)],
                            Sense::Le,
                            0.0,
                        );
                    }
                }
            }
        }
    }

    // Total load per link within its capacity (attachment links carry the
    // surrogate capacity, which never binds).
    for (li, terms) in link_load.into_iter().enumerate() {
        if terms.is_empty() {
            continue;
        }
        let l = &vnet.links[li];
        model.add_constraint(
            format!("link-capacity[link=({},{})]", l.from, l.to),
            terms,
            Sense::Le,
            l.capacity.to_f64(),
        );
    }

    // Flow conservation per segment pair and path: rate flow and path
    // indicators both conserve at every node, with the pair's rate or
    // gate injected at `a` and removed at `b`. Nodes untouched by the
    // segment's link set have nothing to conserve.
    for (ki, svc) in instance.services.iter().enumerate() {
        for s in 0..=svc.chain_len() {
            for (a, b) in prep.pairs(ki, s) {
                let links = segment_links(vnet, &a, &b);
                let mut incident: BTreeMap<&str, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
                incident.entry(a.as_str()).or_default();
                incident.entry(b.as_str()).or_default();
                for &li in &links {
                    let l = &vnet.links[li];
                    incident.entry(l.from.as_str()).or_default().1.push(li);
                    incident.entry(l.to.as_str()).or_default().0.push(li);
                }
                let gate = pair_gate(&map, svc, s, &a, &b);
                for p in 1..=prep.paths {
                    for (node, (ins, outs)) in &incident {
                        let mut terms: Vec<(VarId, f64)> = Vec::new();
                        for &li in ins {
                            terms.push((map.rij[&(svc.id, s, a.clone(), b.clone(), p, li)], 1.0));
                        }
                        for &li in outs {
                            terms.push((map.rij[&(svc.id, s, a.clone(), b.clone(), p, li)], -1.0));
                        }
                        if *node == a {
                            terms.push((map.r[&(svc.id, s, a.clone(), b.clone(), p)], 1.0));
                        } else if *node == b {
                            terms.push((map.r[&(svc.id, s, a.clone(), b.clone(), p)], -1.0));
                        }
                        if !terms.is_empty() {
                            model.add_constraint(
                                format!(
                                    "flow-balance-rate[k={},s={s},vs={a},vs1={b},p={p},i={node}]",
                                    svc.id
                                ),
                                terms,
                                Sense::Eq,
                                0.0,
                            );
                        }
                    }
                    for (node, (ins, outs)) in &incident {
                        let mut terms: Vec<(VarId, f64)> = Vec::new();
                        for &li in ins {
                            terms.push((map.z[&(svc.id, s, a.clone(), b.clone(), p, li)], 1.0));
                        }
                        for &li in outs {
                            terms.push((map.z[&(svc.id, s, a.clone(), b.clone(), p, li)], -1.0));
                        }
                        if *node == a {
                            terms.push((gate, 1.0));
                        } else if *node == b {
                            terms.push((gate, -1.0));
                        }
                        if !terms.is_empty() {
                            model.add_constraint(
                                format!(
                                    "flow-balance-path[k={},s={s},vs={a},vs1={b},p={p},i={node}]",
                                    svc.id
                                ),
                                terms,
                                Sense::Eq,
                                0.0,
                            );
                        }
                    }
                }
            }
        }
    }

    // Segment hop delay dominates every path's delay sum (paths of all
    // candidate pairs; inactive pairs contribute zero).
    let n_phys = vnet.physical.links.len();
    for (ki, svc) in instance.services.iter().enumerate() {
        for s in 0..=svc.chain_len() {
            for p in 1..=prep.paths {
                let mut terms = vec![(map.delays.theta[&(svc.id, s)], 1.0)];
                for (a, b) in prep.pairs(ki, s) {
                    for li in 0..n_phys {
                        let d = vnet.links[li].delay.to_f64();
                        terms.push((map.z[&(svc.id, s, a.clone(), b.clone(), p, li)], -d));
                    }
                }
                model.add_constraint(
                    format!("hop-delay[k={},s={s},p={p}]", svc.id),
                    terms,
                    Sense::Ge,
                    0.0,
                );
            }
        }
    }

    add_delay_rows(&mut model, &prep, &map.placement, &map.delays);
    set_model_objective(&mut model, &prep, &map.placement, &map.delays);
    Ok((model, map))
}

/// Variable and constraint counts of the blocks both formulations share:
/// placement, activation, node capacities, and the delay ledger. Also
/// reports which clones can host anything at all (their attachment links
/// are the ones that end up carrying traffic variables).
pub(crate) struct SharedSize {
    pub vars: usize,
    pub cons: usize,
    pub clones_used: BTreeSet<String>,
}

pub(crate) fn shared_size<S: Scalar>(prep: &BuildPrep<S>) -> SharedSize {
    let instance = prep.instance;
    let services = &instance.services;
    let mut vars = instance.network.clouds.len(); // y
    let mut cons = 0usize;
    let mut clones_used: BTreeSet<String> = BTreeSet::new();
    for (ki, svc) in services.iter().enumerate() {
        let mut stages_per_clone: BTreeMap<&str, usize> = BTreeMap::new();
        for s in 1..=svc.chain_len() {
            let hosts = &prep.hosts[ki][s - 1];
            vars += hosts.len(); // x
            let anchor_count = anchors(prep.vnet, hosts).len();
            vars += anchor_count; // x0
            cons += 1; // exactly-one-node
            cons += 2 * anchor_count; // physical-placement-link + activation
            for h in hosts {
                *stages_per_clone.entry(h.as_str()).or_default() += 1;
                clones_used.insert(h.clone());
            }
        }
        cons += stages_per_clone.values().filter(|&&n| n >= 2).count(); // clone-exclusivity
        vars += svc.chain_len() + 1 + 2; // theta + thetaL + thetaN
        cons += 2; // comm-delay-sum + proc-delay-sum
        if prep.latency_enforced {
            cons += 1; // e2e-budget
        }
    }
    for cloud in &instance.network.clouds {
        let has_x0 = services.iter().enumerate().any(|(ki, svc)| {
            (1..=svc.chain_len())
                .any(|s| anchors(prep.vnet, &prep.hosts[ki][s - 1]).contains(&cloud.id))
        });
        if has_x0 || cloud.capacity.to_f64() != 0.0 {
            cons += 1; // node-capacity
        }
    }
    if instance.network.clouds.iter().any(|c| c.capacity.to_f64() != 0.0) {
        cons += 1; // aggregate-capacity
    }
    SharedSize { vars, cons, clones_used }
}

/// Exact variable and constraint counts of [`build_ns1`] for the same
/// inputs, computed without allocating any coefficient data.
pub fn ns1_size<S: Scalar>(
    instance: &SlicingInstance<S>,
    vnet: &VirtualNetwork<S>,
    options: &BuildOptions,
) -> Result<(usize, usize), BuildError> {
    let prep = prepare(instance, vnet, options)?;
    let shared = shared_size(&prep);
    let mut vars = shared.vars;
    let mut cons = shared.cons;
    let n_phys = vnet.physical.links.len();
    let p = prep.paths;

    for (ki, svc) in instance.services.iter().enumerate() {
        let ell = svc.chain_len();
        for s in 0..=ell {
            let pairs = prep.pairs(ki, s);
            if s >= 1 && s < ell {
                vars += pairs.len(); // w
                cons += 3 * pairs.len(); // product-link
            }
            vars += pairs.len() * p; // r
            cons += pairs.len(); // rate-coupling
            for (a, b) in &pairs {
                let links = segment_links(vnet, a, b);
                vars += 2 * p * links.len(); // z + rij
                cons += 2 * p * links.len(); // indicator-coupling + rate-indicator-link
                let clone_ends = [a, b].iter().filter(|n| vnet.is_clone(n)).count();
                cons += p * clone_ends; // clone-loop
                let mut nodes: BTreeSet<&str> = BTreeSet::new();
                nodes.insert(a.as_str());
                nodes.insert(b.as_str());
                for &li in &links {
                    nodes.insert(vnet.links[li].from.as_str());
                    nodes.insert(vnet.links[li].to.as_str());
                }
                cons += 2 * p * nodes.len(); // flow-balance rate + path
            }
            cons += p; // hop-delay
        }
    }
    // Link-capacity rows: physical links all carry traffic variables as
    // soon as any segment exists; attachment links only for clones that
    // can host something.
    if !instance.services.is_empty() {
        cons += n_phys + 2 * shared.clones_used.len();
    }
    Ok((vars, cons))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{example_chain, example_pair, generate, six_node_params};
    use crate::milp::{solve_exact, SolveLimits, SolveStatus};

    fn build_default(
        instance: &crate::Instance,
        options: &BuildOptions,
    ) -> (MilpModel, Ns1VarMap) {
        let vnet = VirtualNetwork::build(instance);
        build_ns1(instance, &vnet, options).unwrap()
    }

    fn exact() -> SolveLimits {
        SolveLimits { gap: 0.0, ..SolveLimits::default() }
    }

    #[test]
    fn chain_example_families_are_all_present() {
        let instance = example_chain();
        let (model, map) = build_default(&instance, &BuildOptions::default());
        model.assert_unique_tags();
        let census = model.census();
        for family in [
            "clone-exclusivity",
            "exactly-one-node",
            "physical-placement-link",
            "placement-activation",
            "node-capacity",
            "aggregate-capacity",
            "rate-coupling",
            "product-link",
            "indicator-coupling",
            "clone-loop",
            "rate-indicator-link",
            "link-capacity",
            "flow-balance-rate",
            "flow-balance-path",
            "hop-delay",
            "comm-delay-sum",
            "proc-delay-sum",
            "e2e-budget",
        ] {
            assert!(census.contains_key(family), "missing family {family}");
        }
        assert_eq!(census["exactly-one-node"], 2);
        assert_eq!(census["e2e-budget"], 1);
        assert_eq!(census["node-capacity"], 2);
        assert_eq!(census["hop-delay"], 3 * 2);
        // Stage hosting: f1 on E's clones, f2 everywhere.
        assert!(map.placement.x.contains_key(&(1, 1, "E#1".into())));
        assert!(!map.placement.x.contains_key(&(1, 1, "C#1".into())));
        assert!(map.placement.x0.contains_key(&(1, 2, "C".into())));
    }

    #[test]
    fn chain_example_two_paths_meets_its_budget_exactly() {
        let instance = example_chain();
        let (model, map) = build_default(&instance, &BuildOptions::default());
        let sol = solve_exact(&model, &exact()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        // One activated cloud and a tight five-unit end-to-end delay.
        assert!((sol.objective.unwrap() - 1.005).abs() < 1e-6, "{:?}", sol.objective);
        let asg = sol.assignment.unwrap();
        assert!((asg["y_E"] - 1.0).abs() < 1e-6);
        assert!(asg["y_C"].abs() < 1e-6);
        let thl = asg[model.var(map.delays.theta_link[&1]).name.as_str()];
        let thn = asg[model.var(map.delays.theta_node[&1]).name.as_str()];
        assert!((thl + thn - 5.0).abs() < 1e-6);
    }

    #[test]
    fn chain_example_single_path_is_infeasible() {
        let instance = example_chain();
        let options = BuildOptions { paths: 1, ..BuildOptions::default() };
        let (model, _) = build_default(&instance, &options);
        let sol = solve_exact(&model, &exact()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn pair_example_solution_matches_known_delays() {
        let instance = example_pair();
        let (model, map) = build_default(&instance, &BuildOptions::default());
        let sol = solve_exact(&model, &exact()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        let asg = sol.assignment.unwrap();
        assert!((asg["y_C"] + asg["y_E"] - 2.0).abs() < 1e-6);
        let delay = |k: u32| {
            asg[model.var(map.delays.theta_link[&k]).name.as_str()]
                + asg[model.var(map.delays.theta_node[&k]).name.as_str()]
        };
        assert!((delay(1) - 4.0).abs() < 1e-6);
        assert!((delay(2) - 3.0).abs() < 1e-6);
    }

    #[test]
    fn sizes_match_built_models() {
        let mut cases: Vec<(crate::Instance, BuildOptions)> = vec![
            (example_chain(), BuildOptions::default()),
            (example_chain(), BuildOptions { paths: 1, ..Default::default() }),
            (example_pair(), BuildOptions::default()),
            (example_pair(), BuildOptions { latency_enforced: false, ..Default::default() }),
        ];
        for seed in 0..6u64 {
            let params = six_node_params(1 + (seed % 2) as usize, seed);
            let instance = generate(&params).unwrap();
            cases.push((instance, BuildOptions { paths: 1 + (seed as usize % 3), ..Default::default() }));
        }
        for (instance, options) in &cases {
            let vnet = VirtualNetwork::build(instance);
            let (model, _) = build_ns1(instance, &vnet, options).unwrap();
            let (nv, nc) = ns1_size(instance, &vnet, options).unwrap();
            assert_eq!(
                (nv, nc),
                (model.num_vars(), model.num_constraints()),
                "size mismatch (paths={})",
                options.paths
            );
        }
    }

    #[test]
    fn variable_count_grows_with_path_budget() {
        let instance = example_chain();
        let vnet = VirtualNetwork::build(&instance);
        let p2 = ns1_size(&instance, &vnet, &BuildOptions::default()).unwrap();
        let p4 = ns1_size(&instance, &vnet, &BuildOptions { paths: 4, ..Default::default() })
            .unwrap();
        assert!(p4.0 > p2.0);
        assert!(p4.1 > p2.1);
    }

    #[test]
    fn no_services_solves_to_zero() {
        let mut instance = example_chain();
        instance.services.clear();
        let vnet = VirtualNetwork::build(&instance);
        let (model, _) = build_ns1(&instance, &vnet, &BuildOptions::default()).unwrap();
        let sol = solve_exact(&model, &exact()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert_eq!(sol.objective, Some(0.0));
        let (nv, nc) = ns1_size(&instance, &vnet, &BuildOptions::default()).unwrap();
        assert_eq!((nv, nc), (model.num_vars(), model.num_constraints()));
        assert_eq!(nv, 2); // activation only
    }

    #[test]
    fn build_errors_are_reported() {
        let instance = example_chain();
        let vnet = VirtualNetwork::build(&instance);
        let zero_paths = BuildOptions { paths: 0, ..Default::default() };
        assert_eq!(build_ns1(&instance, &vnet, &zero_paths).unwrap_err(), BuildError::PathCount);

        let mut orphan = example_chain();
        orphan.services[0].chain.push("f9".into());
        orphan.services[0].rates.push(crate::Rat::from_int(1));
        let vnet = VirtualNetwork::build(&orphan);
        match build_ns1(&orphan, &vnet, &BuildOptions::default()) {
            Err(BuildError::UnplaceableFunction { service: 1, stage: 3, function }) => {
                assert_eq!(function, "f9");
            }
            other => panic!("expected unplaceable error, got {other:?}"),
        }

        let mut dashed = example_chain();
        dashed.network.nodes.push("bad-id".into());
        let vnet = VirtualNetwork::build(&dashed);
        assert_eq!(
            build_ns1(&dashed, &vnet, &BuildOptions::default()).unwrap_err(),
            BuildError::NodeIdChar("bad-id".into())
        );
    }

    #[test]
    fn solved_placements_satisfy_their_invariants() {
        let instance = example_pair();
        let (model, map) = build_default(&instance, &BuildOptions::default());
        let sol = solve_exact(&model, &exact()).unwrap();
        let asg = sol.assignment.unwrap();
        let value = |id: VarId| asg[model.var(id).name.as_str()];
        // Each clone hosts at most one stage per service.
        for svc in &instance.services {
            for clone in map.placement.x.keys().map(|(_, _, c)| c.clone()).collect::<BTreeSet<_>>() {
                let total: f64 = (1..=svc.chain_len())
                    .filter_map(|s| map.placement.x.get(&(svc.id, s, clone.clone())))
                    .map(|&id| value(id))
                    .sum();
                assert!(total <= 1.0 + 1e-9);
            }
        }
        // Exactly one cloud per stage.
        for svc in &instance.services {
            for s in 1..=svc.chain_len() {
                let total: f64 = map
                    .placement
                    .x0
                    .iter()
                    .filter(|((k, stage, _), _)| *k == svc.id && *stage == s)
                    .map(|(_, &id)| value(id))
                    .sum();
                assert!((total - 1.0).abs() < 1e-9);
            }
        }
    }
}
