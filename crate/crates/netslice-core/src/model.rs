//! Domain model: physical network, service requests, weights, solutions.
//!
//! An instance couples a directed physical network (nodes, capacitated and
//! delay-weighted links, cloud nodes with processing capacity and per-function
//! capability) with a set of service requests (source, destination, ordered
//! function chain, per-stage rates, end-to-end latency budget, per-node
//! processing delays) and the objective weights. All quantities are generic
//! over [`Scalar`] so the canonical pipeline can stay exact ([`crate::Rat`])
//! while float variants remain available.
//!
//! [`validate_instance`] reports structural violations with stable
//! machine-readable codes; an empty report is the precondition for every
//! downstream transform. [`total_power`] evaluates the energy objective that
//! motivates minimizing the number of activated cloud nodes.

use std::collections::{BTreeMap, BTreeSet};

use crate::scalar::{approx_eq, Scalar};

/// A directed physical link with a capacity and a communication delay.
#[derive(Debug, Clone, PartialEq)]
pub struct Link<S> {
    /// Tail node id.
    pub from: String,
    /// Head node id.
    pub to: String,
    /// Maximum total data rate the link can carry.
    pub capacity: S,
    /// Communication delay incurred by traffic on this link.
    pub delay: S,
}

/// A cloud node: a network node that can host network functions.
#[derive(Debug, Clone, PartialEq)]
pub struct CloudNode<S> {
    /// Node id; must also appear in [`PhysicalNetwork::nodes`].
    pub id: String,
    /// Processing capacity (total hosted rate must stay below it).
    pub capacity: S,
    /// Ids of the functions this node is able to run.
    pub processable: BTreeSet<String>,
}

/// Directed physical network with a distinguished subset of cloud nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalNetwork<S> {
    /// All node ids (cloud and non-cloud), unique.
    pub nodes: Vec<String>,
    /// Directed links; at most one per ordered node pair.
    pub links: Vec<Link<S>>,
    /// Cloud nodes; each id must appear in `nodes`.
    pub clouds: Vec<CloudNode<S>>,
}

impl<S: Scalar> PhysicalNetwork<S> {
    /// The cloud node with the given id, if any.
    pub fn cloud(&self, id: &str) -> Option<&CloudNode<S>> {
        self.clouds.iter().find(|c| c.id == id)
    }

    /// Whether `id` names a cloud node.
    pub fn is_cloud(&self, id: &str) -> bool {
        self.cloud(id).is_some()
    }
}

/// A service request: route traffic from `source` to `destination` through
/// the ordered `chain` of functions within `latency_budget`.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceRequest<S> {
    /// Service id, unique within an instance.
    pub id: u32,
    /// Source node (must not be a cloud node).
    pub source: String,
    /// Destination node (must not be a cloud node).
    pub destination: String,
    /// Ordered function chain `f_1 .. f_ell`; repetitions are permitted.
    pub chain: Vec<String>,
    /// Data rates `lambda_0 .. lambda_ell`: `rates[s]` is the rate of the
    /// flow segment *after* the s-th function (`rates[0]` leaves the source).
    /// Length must be `chain.len() + 1`.
    pub rates: Vec<S>,
    /// End-to-end latency budget (communication plus processing delay).
    pub latency_budget: S,
    /// Processing delay `(cloud id, stage)` for every cloud able to run the
    /// stage's function; stages are 1-based positions into `chain`.
    pub nfv_delays: BTreeMap<(String, usize), S>,
}

impl<S: Scalar> ServiceRequest<S> {
    /// Chain length `ell`.
    pub fn chain_len(&self) -> usize {
        self.chain.len()
    }

    /// Rate of segment `s` (`0..=ell`).
    pub fn rate(&self, s: usize) -> &S {
        &self.rates[s]
    }
}

/// Weights of the scalarized objective and of the power model.
///
/// The solver minimizes `sum_v y_v + sigma * sum_k (comm_delay_k +
/// proc_delay_k)`. For `sigma` below one over the sum of all latency budgets,
/// this is equivalent to lexicographically minimizing the activated-node
/// count first and total delay second.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveWeights<S> {
    /// Delay weight in the scalarized objective.
    pub sigma: S,
    /// Power draw of an activated cloud node.
    pub beta1: S,
    /// Power draw of a deactivated (sleeping) cloud node.
    pub beta2: S,
    /// Power per unit of processed data rate.
    pub delta: S,
}

impl<S: Scalar> ObjectiveWeights<S> {
    /// The defaults used by the harness: `sigma = 1/1000`, `beta1 = 2`,
    /// `beta2 = 1`, `delta = 1/100`.
    pub fn standard() -> Self {
        ObjectiveWeights {
            sigma: S::ratio(1, 1000),
            beta1: S::from_int(2),
            beta2: S::from_int(1),
            delta: S::ratio(1, 100),
        }
    }
}

/// A complete problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicingInstance<S> {
    /// The physical network.
    pub network: PhysicalNetwork<S>,
    /// The service requests.
    pub services: Vec<ServiceRequest<S>>,
    /// Objective weights.
    pub weights: ObjectiveWeights<S>,
}

impl<S: Scalar> SlicingInstance<S> {
    /// Longest chain length over all services (0 when there are none).
    pub fn ell_max(&self) -> usize {
        self.services.iter().map(|k| k.chain_len()).max().unwrap_or(0)
    }

    /// Sum of every rate of every service, `sum_k sum_{s=0..ell_k}
    /// lambda_s(k)`: a finite stand-in for "unbounded" where a capacity can
    /// never bind, since no link ever carries more than this.
    pub fn total_rate(&self) -> S {
        let mut acc = S::zero();
        for svc in &self.services {
            for r in &svc.rates {
                acc = acc + r.clone();
            }
        }
        acc
    }

    /// Sum of the processed rates, `sum_k sum_{s=1..ell_k} lambda_s(k)`:
    /// the total load the cloud nodes must jointly absorb.
    pub fn total_processing_rate(&self) -> S {
        let mut acc = S::zero();
        for svc in &self.services {
            for r in &svc.rates[1..] {
                acc = acc + r.clone();
            }
        }
        acc
    }

    /// Converts every quantity with `f`, preserving structure.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SlicingInstance<T> {
        SlicingInstance {
            network: PhysicalNetwork {
                nodes: self.network.nodes.clone(),
                links: self
                    .network
                    .links
                    .iter()
                    .map(|l| Link {
                        from: l.from.clone(),
                        to: l.to.clone(),
                        capacity: f(&l.capacity),
                        delay: f(&l.delay),
                    })
                    .collect(),
                clouds: self
                    .network
                    .clouds
                    .iter()
                    .map(|c| CloudNode {
                        id: c.id.clone(),
                        capacity: f(&c.capacity),
                        processable: c.processable.clone(),
                    })
                    .collect(),
            },
            services: self
                .services
                .iter()
                .map(|k| ServiceRequest {
                    id: k.id,
                    source: k.source.clone(),
                    destination: k.destination.clone(),
                    chain: k.chain.clone(),
                    rates: k.rates.iter().map(&f).collect(),
                    latency_budget: f(&k.latency_budget),
                    nfv_delays: k.nfv_delays.iter().map(|(key, v)| (key.clone(), f(v))).collect(),
                })
                .collect(),
            weights: ObjectiveWeights {
                sigma: f(&self.weights.sigma),
                beta1: f(&self.weights.beta1),
                beta2: f(&self.weights.beta2),
                delta: f(&self.weights.delta),
            },
        }
    }

    /// Shorthand for the common exact-to-float conversion.
    pub fn to_f64(&self) -> SlicingInstance<f64> {
        self.map_scalar(|v| v.to_f64())
    }
}

/// A structural violation found by [`validate_instance`] or by domain
/// feasibility verification; `code` is stable and machine-readable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Stable kebab-case violation class.
    pub code: String,
    /// Human-readable description naming the offending entities.
    pub detail: String,
}

impl Violation {
    pub(crate) fn new(code: &str, detail: impl Into<String>) -> Self {
        Violation { code: code.to_string(), detail: detail.into() }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.detail)
    }
}

/// Checks an instance for structural problems and reports all of them.
///
/// An empty report means the instance is well-formed (it may still be
/// infeasible as an optimization problem — that is the solver's verdict, not
/// a validation error). Emitted codes:
///
/// `duplicate-node`, `reserved-node-id`, `unknown-link-endpoint`,
/// `self-loop-link`, `duplicate-link`, `negative-capacity`,
/// `negative-delay`, `cloud-not-a-node`, `duplicate-cloud`,
/// `duplicate-service-id`, `unknown-endpoint`, `source-in-cloud`,
/// `destination-in-cloud`, `empty-chain`, `rate-arity`,
/// `nonpositive-rate`, `nonpositive-latency`, `nfv-delay-missing`,
/// `nfv-delay-unknown`, `nfv-delay-negative`.
pub fn validate_instance<S: Scalar>(instance: &SlicingInstance<S>) -> Vec<Violation> {
    let mut out = Vec::new();
    let net = &instance.network;

    let mut node_set: BTreeSet<&str> = BTreeSet::new();
    for n in &net.nodes {
        if !node_set.insert(n) {
            out.push(Violation::new("duplicate-node", format!("node id {n} appears twice")));
        }
        if n.contains('#') {
            // '#' is reserved for the ids of processing clones in the
            // derived routing network.
            out.push(Violation::new(
                "reserved-node-id",
                format!("node id {n} contains the reserved character '#'"),
            ));
        }
    }

    let mut link_set: BTreeSet<(&str, &str)> = BTreeSet::new();
    for l in &net.links {
        if !node_set.contains(l.from.as_str()) || !node_set.contains(l.to.as_str()) {
            out.push(Violation::new(
                "unknown-link-endpoint",
                format!("link ({}, {}) references an unknown node", l.from, l.to),
            ));
        }
        if l.from == l.to {
            out.push(Violation::new("self-loop-link", format!("link ({0}, {0})", l.from)));
        }
        if !link_set.insert((l.from.as_str(), l.to.as_str())) {
            out.push(Violation::new(
                "duplicate-link",
                format!("link ({}, {}) appears twice", l.from, l.to),
            ));
        }
        if l.capacity < S::zero() {
            out.push(Violation::new(
                "negative-capacity",
                format!("link ({}, {}) capacity {}", l.from, l.to, l.capacity),
            ));
        }
        if l.delay < S::zero() {
            out.push(Violation::new(
                "negative-delay",
                format!("link ({}, {}) delay {}", l.from, l.to, l.delay),
            ));
        }
    }

    let mut cloud_set: BTreeSet<&str> = BTreeSet::new();
    for c in &net.clouds {
        if !node_set.contains(c.id.as_str()) {
            out.push(Violation::new("cloud-not-a-node", format!("cloud {} is not a node", c.id)));
        }
        if !cloud_set.insert(c.id.as_str()) {
            out.push(Violation::new("duplicate-cloud", format!("cloud {} appears twice", c.id)));
        }
        if c.capacity < S::zero() {
            out.push(Violation::new(
                "negative-capacity",
                format!("cloud {} capacity {}", c.id, c.capacity),
            ));
        }
    }

    let mut service_ids: BTreeSet<u32> = BTreeSet::new();
    for svc in &instance.services {
        let k = svc.id;
        if !service_ids.insert(k) {
            out.push(Violation::new("duplicate-service-id", format!("service id {k} appears twice")));
        }
        for (role, node) in [("source", &svc.source), ("destination", &svc.destination)] {
            if !node_set.contains(node.as_str()) {
                out.push(Violation::new(
                    "unknown-endpoint",
                    format!("service {k} {role} {node} is not a node"),
                ));
            } else if cloud_set.contains(node.as_str()) {
                out.push(Violation::new(
                    &format!("{role}-in-cloud"),
                    format!("service {k} {role} {node} is a cloud node"),
                ));
            }
        }
        if svc.chain.is_empty() {
            out.push(Violation::new("empty-chain", format!("service {k} has an empty chain")));
        }
        if svc.rates.len() != svc.chain.len() + 1 {
            out.push(Violation::new(
                "rate-arity",
                format!(
                    "service {k} has {} rates for a chain of length {} (want {})",
                    svc.rates.len(),
                    svc.chain.len(),
                    svc.chain.len() + 1
                ),
            ));
        }
        for (s, r) in svc.rates.iter().enumerate() {
            if *r <= S::zero() {
                out.push(Violation::new("nonpositive-rate", format!("service {k} rate[{s}] = {r}")));
            }
        }
        if svc.latency_budget <= S::zero() {
            out.push(Violation::new(
                "nonpositive-latency",
                format!("service {k} latency budget {}", svc.latency_budget),
            ));
        }
        // Every cloud able to run stage s must have a processing delay, and
        // no entry may dangle or be negative.
        for (s, func) in svc.chain.iter().enumerate() {
            let stage = s + 1;
            for c in &net.clouds {
                if c.processable.contains(func)
                    && !svc.nfv_delays.contains_key(&(c.id.clone(), stage))
                {
                    out.push(Violation::new(
                        "nfv-delay-missing",
                        format!("service {k} stage {stage} has no processing delay for cloud {}", c.id),
                    ));
                }
            }
        }
        for ((node, stage), d) in &svc.nfv_delays {
            let capable = (1..=svc.chain.len()).contains(stage)
                && net
                    .cloud(node)
                    .is_some_and(|c| c.processable.contains(&svc.chain[stage - 1]));
            if !capable {
                out.push(Violation::new(
                    "nfv-delay-unknown",
                    format!("service {k} has a processing delay for ({node}, stage {stage}) which no capable cloud matches"),
                ));
            }
            if *d < S::zero() {
                out.push(Violation::new(
                    "nfv-delay-negative",
                    format!("service {k} processing delay at ({node}, stage {stage}) is {d}"),
                ));
            }
        }
    }

    out
}

/// A path of one chain segment through the virtual network, with the data
/// rate it carries. Nodes are virtual-network ids (physical ids or clone
/// ids); consecutive nodes must be joined by a virtual link.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPath<S> {
    /// Node sequence from the segment's origin to its target.
    pub nodes: Vec<String>,
    /// Data rate carried by this path (may be zero for padding paths).
    pub rate: S,
}

/// A domain-level solution: activations, placements, per-segment paths, and
/// the recomputed delay ledger.
///
/// Keys: `(service id, stage)` for placements (stage `1..=ell`),
/// `(service id, segment, path index)` for paths (segment `0..=ell`, path
/// index `1..=P`), matching the index conventions of the optimization
/// models. Only rate-carrying paths are stored; the sum of a segment's path
/// rates must equal the segment rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicingSolution<S> {
    /// Ids of activated physical cloud nodes (`y_v = 1`).
    pub activated: BTreeSet<String>,
    /// Physical cloud hosting each `(service, stage)`.
    pub placement_physical: BTreeMap<(u32, usize), String>,
    /// Virtual clone hosting each `(service, stage)`; must be anchored at
    /// the corresponding physical placement.
    pub placement_virtual: BTreeMap<(u32, usize), String>,
    /// Paths per `(service, segment, path index)`.
    pub paths: BTreeMap<(u32, usize, usize), SegmentPath<S>>,
    /// Data rate per virtual link for each `(service, segment, path index)`;
    /// consistent with `paths` (every link of a path carries its rate).
    pub link_rate: BTreeMap<(u32, usize, usize), BTreeMap<(String, String), S>>,
    /// Communication delay of each `(service, segment)`: the maximum delay
    /// over that segment's rate-carrying paths.
    pub hop_delay: BTreeMap<(u32, usize), S>,
    /// Total communication delay per service.
    pub comm_delay: BTreeMap<u32, S>,
    /// Total processing delay per service.
    pub proc_delay: BTreeMap<u32, S>,
}

impl<S> Default for SlicingSolution<S> {
    fn default() -> Self {
        SlicingSolution {
            activated: BTreeSet::new(),
            placement_physical: BTreeMap::new(),
            placement_virtual: BTreeMap::new(),
            paths: BTreeMap::new(),
            link_rate: BTreeMap::new(),
            hop_delay: BTreeMap::new(),
            comm_delay: BTreeMap::new(),
            proc_delay: BTreeMap::new(),
        }
    }
}

impl<S: Scalar> SlicingSolution<S> {
    /// End-to-end delay of service `k`, when recorded.
    pub fn e2e_delay(&self, k: u32) -> Option<S> {
        match (self.comm_delay.get(&k), self.proc_delay.get(&k)) {
            (Some(c), Some(p)) => Some(c.clone() + p.clone()),
            _ => None,
        }
    }
}

/// Errors from operations that need a structurally complete solution.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolutionError {
    /// A required piece of the solution is absent.
    #[error("incomplete solution: {0}")]
    Incomplete(String),
    /// The solution contradicts itself or the instance.
    #[error("inconsistent solution: {0}")]
    Inconsistent(String),
}

/// Evaluates the power model: activated cloud nodes draw `beta1` plus
/// `delta` per unit of hosted processing rate, deactivated ones draw `beta2`.
///
/// Requires a complete placement (every stage of every service placed at an
/// activated cloud). The result then also equals the affine form
/// `(beta1 - beta2) * activated + beta2 * |clouds| + delta *
/// total_processing_rate`, which is why minimizing power reduces to
/// minimizing the number of activated nodes; both computations are run and
/// asserted to agree.
pub fn total_power<S: Scalar>(
    instance: &SlicingInstance<S>,
    solution: &SlicingSolution<S>,
) -> Result<S, SolutionError> {
    // Hosted processing rate per physical cloud.
    let mut hosted: BTreeMap<&str, S> = BTreeMap::new();
    for svc in &instance.services {
        for stage in 1..=svc.chain_len() {
            let host = solution.placement_physical.get(&(svc.id, stage)).ok_or_else(|| {
                SolutionError::Incomplete(format!(
                    "service {} stage {stage} has no placement",
                    svc.id
                ))
            })?;
            let cloud = instance.network.cloud(host).ok_or_else(|| {
                SolutionError::Inconsistent(format!(
                    "service {} stage {stage} is placed at {host}, which is not a cloud node",
                    svc.id
                ))
            })?;
            if !solution.activated.contains(&cloud.id) {
                return Err(SolutionError::Inconsistent(format!(
                    "cloud {host} hosts service {} stage {stage} but is not activated",
                    svc.id
                )));
            }
            let slot = hosted.entry(cloud.id.as_str()).or_insert_with(S::zero);
            *slot = slot.clone() + svc.rate(stage).clone();
        }
    }

    for v in &solution.activated {
        if instance.network.cloud(v).is_none() {
            return Err(SolutionError::Inconsistent(format!(
                "activated node {v} is not a cloud node"
            )));
        }
    }

    let w = &instance.weights;
    let mut direct = S::zero();
    for c in &instance.network.clouds {
        if solution.activated.contains(&c.id) {
            let load = hosted.get(c.id.as_str()).cloned().unwrap_or_else(S::zero);
            direct = direct + w.beta1.clone() + w.delta.clone() * load;
        } else {
            direct = direct + w.beta2.clone();
        }
    }

    let y_count = S::from_int(solution.activated.len() as i64);
    let cloud_count = S::from_int(instance.network.clouds.len() as i64);
    let affine = (w.beta1.clone() - w.beta2.clone()) * y_count
        + w.beta2.clone() * cloud_count
        + w.delta.clone() * instance.total_processing_rate();
    assert!(
        approx_eq(&direct, &affine),
        "power computations disagree: direct {direct} vs affine {affine}"
    );
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{example_chain, example_pair};
    use crate::Rat;

    #[test]
    fn fixture_instances_validate_cleanly() {
        assert_eq!(validate_instance(&example_chain()), Vec::new());
        assert_eq!(validate_instance(&example_pair()), Vec::new());
    }

    #[test]
    fn source_in_cloud_is_reported() {
        let mut inst = example_chain();
        inst.services[0].source = "C".into();
        let codes: Vec<_> = validate_instance(&inst).into_iter().map(|v| v.code).collect();
        assert!(codes.contains(&"source-in-cloud".to_string()), "{codes:?}");
    }

    #[test]
    fn rate_arity_is_reported() {
        let mut inst = example_chain();
        inst.services[0].rates.pop();
        let codes: Vec<_> = validate_instance(&inst).into_iter().map(|v| v.code).collect();
        assert!(codes.contains(&"rate-arity".to_string()), "{codes:?}");
    }

    #[test]
    fn missing_nfv_delay_is_reported() {
        let mut inst = example_chain();
        inst.services[0].nfv_delays.remove(&("E".to_string(), 1));
        let codes: Vec<_> = validate_instance(&inst).into_iter().map(|v| v.code).collect();
        assert!(codes.contains(&"nfv-delay-missing".to_string()), "{codes:?}");
    }

    #[test]
    fn total_rate_sums_every_stage() {
        // Scenario 1 rates are (4, 4, 4); scenario 2 has two services at
        // (1, 1) each.
        assert_eq!(example_chain().total_rate(), Rat::from_int(12));
        assert_eq!(example_pair().total_rate(), Rat::from_int(4));
        assert_eq!(example_chain().total_processing_rate(), Rat::from_int(8));
    }

    #[test]
    fn power_of_two_activated_nodes_without_rate_term() {
        // Both clouds active, beta1 = 2, beta2 = 1, delta = 0 -> 2 * 2.
        let mut inst = example_pair();
        inst.weights.beta1 = Rat::from_int(2);
        inst.weights.beta2 = Rat::from_int(1);
        inst.weights.delta = Rat::from_int(0);
        let solution = SlicingSolution::<Rat> {
            activated: ["C".to_string(), "E".to_string()].into_iter().collect(),
            placement_physical: [((1, 1), "E".to_string()), ((2, 1), "C".to_string())]
                .into_iter()
                .collect(),
            placement_virtual: [((1, 1), "E#1".to_string()), ((2, 1), "C#1".to_string())]
                .into_iter()
                .collect(),
            ..Default::default()
        };
        assert_eq!(total_power(&inst, &solution), Ok(Rat::from_int(4)));
    }

    #[test]
    fn power_of_empty_solution_is_sleep_power() {
        // No services, nothing activated, beta2 = 1, three clouds -> 3.
        let mut inst = example_chain();
        inst.services.clear();
        inst.weights.beta2 = Rat::from_int(1);
        inst.network.clouds.push(CloudNode {
            id: "D".into(),
            capacity: Rat::from_int(1),
            processable: BTreeSet::new(),
        });
        // "D" as a cloud makes the instance invalid for services that end
        // there, but with no services validation still passes.
        assert_eq!(validate_instance(&inst), Vec::new());
        let solution = SlicingSolution::<Rat>::default();
        assert_eq!(total_power(&inst, &solution), Ok(Rat::from_int(3)));
    }

    #[test]
    fn power_requires_complete_activated_placements() {
        let inst = example_chain();
        // Scenario 1 has a two-stage chain; placing nothing is incomplete.
        let empty = SlicingSolution::<Rat>::default();
        assert!(matches!(
            total_power(&inst, &empty),
            Err(SolutionError::Incomplete(_))
        ));
        // Placing at a deactivated cloud is inconsistent.
        let unactivated = SlicingSolution::<Rat> {
            placement_physical: [((1, 1), "E".to_string()), ((1, 2), "E".to_string())]
                .into_iter()
                .collect(),
            ..Default::default()
        };
        assert!(matches!(
            total_power(&inst, &unactivated),
            Err(SolutionError::Inconsistent(_))
        ));
    }
}
