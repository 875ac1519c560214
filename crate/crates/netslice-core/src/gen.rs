//! Deterministic benchmark instance generation.
//!
//! Two kinds of instances come out of this module:
//!
//! * hand-built worked examples ([`example_chain`], [`example_pair`]) on a
//!   fixed five-node network, used throughout the tests because their
//!   optima are known in closed form;
//! * seeded random families ([`generate`] with a [`GenParams`]), used for
//!   sweeps. The same seed always yields byte-identical instances: every
//!   random quantity is drawn from its own decorrelated stream of a
//!   counter-based generator, and all sampled values live on a `1e-6` grid
//!   so they convert exactly to rationals.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    CloudNode, Link, ObjectiveWeights, PhysicalNetwork, ServiceRequest, SlicingInstance,
};
use crate::scalar::Scalar;
use crate::Rat;

/// Errors from instance generation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    /// Some service's source cannot reach its destination, even after
    /// regenerating the link set the allowed number of times.
    #[error("disconnected instance: a service endpoint pair stayed unreachable after {attempts} link draws")]
    Disconnected {
        /// Number of complete link sets that were tried.
        attempts: usize,
    },
    /// The parameters are contradictory or out of range.
    #[error("bad generator parameters: {0}")]
    BadParams(String),
}

// ---------------------------------------------------------------------------
// Worked examples
// ---------------------------------------------------------------------------

/// The shared five-node demo network: nodes A..E, unit link delays, link
/// capacity 2 everywhere except the E->D trunk at 4, and two clouds -- C
/// (capacity 4, function f2 only) and E (capacity 8, functions f1 and f2).
fn example_network() -> PhysicalNetwork<Rat> {
    let link = |from: &str, to: &str, cap: i64| Link {
        from: from.into(),
        to: to.into(),
        capacity: Rat::from_int(cap),
        delay: Rat::from_int(1),
    };
    PhysicalNetwork {
        nodes: ["A", "B", "C", "D", "E"].iter().map(|s| s.to_string()).collect(),
        links: vec![
            link("A", "B", 2),
            link("A", "C", 2),
            link("B", "E", 2),
            link("C", "B", 2),
            link("C", "E", 2),
            link("D", "B", 2),
            link("E", "D", 4),
        ],
        clouds: vec![
            CloudNode {
                id: "C".into(),
                capacity: Rat::from_int(4),
                processable: ["f2"].iter().map(|s| s.to_string()).collect(),
            },
            CloudNode {
                id: "E".into(),
                capacity: Rat::from_int(8),
                processable: ["f1", "f2"].iter().map(|s| s.to_string()).collect(),
            },
        ],
    }
}

/// Unit processing delay at every cloud capable of the stage's function.
fn unit_nfv_delays(
    network: &PhysicalNetwork<Rat>,
    chain: &[String],
) -> BTreeMap<(String, usize), Rat> {
    let mut out = BTreeMap::new();
    for (idx, function) in chain.iter().enumerate() {
        let stage = idx + 1;
        for cloud in &network.clouds {
            if cloud.processable.contains(function) {
                out.insert((cloud.id.clone(), stage), Rat::from_int(1));
            }
        }
    }
    out
}

/// Worked example with a single service: A -> D through the chain
/// (f1, f2) at rate 4 per stage and an end-to-end budget of 5.
///
/// Known facts used by tests: with two paths per segment the optimum
/// activates only E and meets the budget exactly (rate 4 must split 2+2
/// over the A->B->E and A->C->E branches); with a single path per segment
/// the instance is infeasible because every individual link into E has
/// capacity 2.
pub fn example_chain() -> SlicingInstance<Rat> {
    let network = example_network();
    let chain: Vec<String> = vec!["f1".into(), "f2".into()];
    let nfv_delays = unit_nfv_delays(&network, &chain);
    SlicingInstance {
        network,
        services: vec![ServiceRequest {
            id: 1,
            source: "A".into(),
            destination: "D".into(),
            chain,
            rates: vec![Rat::from_int(4), Rat::from_int(4), Rat::from_int(4)],
            latency_budget: Rat::from_int(5),
            nfv_delays,
        }],
        weights: ObjectiveWeights::standard(),
    }
}

/// Worked example with two single-function services: service 1 routes
/// A -> D through f1 (budget 4), service 2 routes A -> B through f2
/// (budget 3), both at unit rate.
///
/// Known facts used by tests: honoring latency requires activating both
/// clouds (E for f1, C for f2) with end-to-end delays (4, 3); ignoring
/// latency lets everything consolidate onto E alone, which breaks service
/// 2's budget (its cheapest all-E route takes delay 5 > 3).
pub fn example_pair() -> SlicingInstance<Rat> {
    let network = example_network();
    let chain1: Vec<String> = vec!["f1".into()];
    let chain2: Vec<String> = vec!["f2".into()];
    let nfv1 = unit_nfv_delays(&network, &chain1);
    let nfv2 = unit_nfv_delays(&network, &chain2);
    SlicingInstance {
        services: vec![
            ServiceRequest {
                id: 1,
                source: "A".into(),
                destination: "D".into(),
                chain: chain1,
                rates: vec![Rat::from_int(1), Rat::from_int(1)],
                latency_budget: Rat::from_int(4),
                nfv_delays: nfv1,
            },
            ServiceRequest {
                id: 2,
                source: "A".into(),
                destination: "B".into(),
                chain: chain2,
                rates: vec![Rat::from_int(1), Rat::from_int(1)],
                latency_budget: Rat::from_int(3),
                nfv_delays: nfv2,
            },
        ],
        network,
        weights: ObjectiveWeights::standard(),
    }
}

// ---------------------------------------------------------------------------
// Random families
// ---------------------------------------------------------------------------

/// How link delays arise.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    /// Nodes are placed uniformly in a `side x side` square. A link's delay
    /// is its Euclidean length divided by the network's mean shortest-path
    /// length (so delays average around 1), rounded to the value grid.
    Planar {
        /// Side length of the placement square.
        side: f64,
    },
    /// Each link's delay is drawn uniformly from a fixed set of integers.
    DelayChoices(Vec<i64>),
}

/// How a per-(cloud, function) processing delay is drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampling {
    /// Uniform on the value grid within `[lo, hi]`.
    Range(Rat, Rat),
    /// Uniform over a fixed set of integers.
    Choices(Vec<i64>),
}

/// How service rates are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum RateRule {
    /// Every stage of every service has rate 1.
    Unit,
    /// One integer per service, uniform in `[lo, hi]`, used for all stages.
    UniformIntegerPerService {
        /// Smallest rate.
        lo: i64,
        /// Largest rate.
        hi: i64,
    },
}

/// Parameters of the random instance family.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    /// Seed; equal seeds give byte-identical instances.
    pub seed: u64,
    /// Number of services to request.
    pub services: usize,
    /// Number of physical nodes.
    pub nodes: usize,
    /// Number of cloud nodes (must leave at least two plain nodes).
    pub clouds: usize,
    /// Probability that each ordered node pair carries a link.
    pub link_prob: f64,
    /// Link delay model.
    pub geometry: Geometry,
    /// Cloud processing capacity range (grid-uniform).
    pub node_cap: (Rat, Rat),
    /// Link capacity range (grid-uniform).
    pub link_cap: (Rat, Rat),
    /// Size of the function pool `f1..fN`.
    pub function_pool: usize,
    /// Functions per limited cloud; the last cloud can process the pool.
    pub limited_cloud_functions: usize,
    /// Processing-delay model per (cloud, function).
    pub nfv_delay: Sampling,
    /// Chain length; chains are distinct functions from the pool.
    pub chain_len: usize,
    /// Rate model.
    pub rates: RateRule,
    /// Latency budget base term.
    pub budget_base: Rat,
    /// Latency budget coefficient on the source-destination shortest delay.
    pub budget_slope: Rat,
    /// Upper end of the uniform jitter added to each budget.
    pub budget_jitter: Rat,
    /// Route every service to one shared destination node.
    pub common_destination: bool,
}

/// Names accepted by [`generate_preset`].
pub const PRESETS: [&str; 5] = [
    "example-chain",
    "example-pair",
    "six-node",
    "twelve-node-high",
    "twelve-node-low",
];

/// Small planar benchmark: 6 nodes in a 100x100 square, 3 clouds over a
/// 5-function pool, dense links, unit rates, tight geometric budgets.
pub fn six_node_params(services: usize, seed: u64) -> GenParams {
    GenParams {
        seed,
        services,
        nodes: 6,
        clouds: 3,
        link_prob: 0.6,
        geometry: Geometry::Planar { side: 100.0 },
        node_cap: (Rat::from_int(6), Rat::from_int(12)),
        link_cap: (Rat::ratio(1, 2), Rat::ratio(7, 2)),
        function_pool: 5,
        limited_cloud_functions: 2,
        nfv_delay: Sampling::Range(Rat::ratio(4, 5), Rat::ratio(6, 5)),
        chain_len: 3,
        rates: RateRule::Unit,
        budget_base: Rat::from_int(3),
        budget_slope: Rat::from_int(6),
        budget_jitter: Rat::from_int(2),
        common_destination: false,
    }
}

/// Mid-size benchmark: integer delays in {1, 2}, 6 clouds over a
/// 4-function pool, integer service rates up to 11, all services sharing
/// one destination. `high_capacity` selects link capacities U[7, 77]
/// (rarely binding) versus U[5, 55] (often binding).
pub fn twelve_node_params(services: usize, nodes: usize, high_capacity: bool, seed: u64) -> GenParams {
    let link_cap = if high_capacity {
        (Rat::from_int(7), Rat::from_int(77))
    } else {
        (Rat::from_int(5), Rat::from_int(55))
    };
    GenParams {
        seed,
        services,
        nodes,
        clouds: 6,
        link_prob: 0.35,
        geometry: Geometry::DelayChoices(vec![1, 2]),
        node_cap: (Rat::from_int(50), Rat::from_int(100)),
        link_cap,
        function_pool: 4,
        limited_cloud_functions: 2,
        nfv_delay: Sampling::Choices(vec![3, 4, 5, 6]),
        chain_len: 3,
        rates: RateRule::UniformIntegerPerService { lo: 1, hi: 11 },
        budget_base: Rat::from_int(20),
        budget_slope: Rat::from_int(3),
        budget_jitter: Rat::from_int(5),
        common_destination: true,
    }
}

/// Builds an instance for a named preset. `services` and `nodes` override
/// the preset defaults where that makes sense; the worked examples ignore
/// both and the seed.
pub fn generate_preset(
    name: &str,
    services: Option<usize>,
    nodes: Option<usize>,
    seed: u64,
) -> Result<SlicingInstance<Rat>, GenError> {
    match name {
        "example-chain" => Ok(example_chain()),
        "example-pair" => Ok(example_pair()),
        "six-node" => generate(&GenParams {
            nodes: nodes.unwrap_or(6),
            ..six_node_params(services.unwrap_or(2), seed)
        }),
        "twelve-node-high" => generate(&twelve_node_params(
            services.unwrap_or(4),
            nodes.unwrap_or(12),
            true,
            seed,
        )),
        "twelve-node-low" => generate(&twelve_node_params(
            services.unwrap_or(4),
            nodes.unwrap_or(12),
            false,
            seed,
        )),
        other => Err(GenError::BadParams(format!(
            "unknown preset {other:?}; known presets: {}",
            PRESETS.join(", ")
        ))),
    }
}

// Stream ids for the per-field generators. Link-dependent fields get a
// fresh stream per connectivity attempt.
const STREAM_POSITIONS: u64 = 1;
const STREAM_CLOUDS: u64 = 2;
const STREAM_NODE_CAPS: u64 = 3;
const STREAM_FUNCTIONS: u64 = 4;
const STREAM_NFV: u64 = 5;
const STREAM_ENDPOINTS: u64 = 6;
const STREAM_CHAINS: u64 = 7;
const STREAM_RATES: u64 = 8;
const STREAM_JITTER: u64 = 9;
const STREAM_LINKS_BASE: u64 = 100;
const STREAM_LINK_CAPS_BASE: u64 = 200;
const STREAM_LINK_DELAYS_BASE: u64 = 300;

/// Attempted link regenerations before giving up on connectivity.
const MAX_LINK_ATTEMPTS: usize = 50;

const GRID: i64 = 1_000_000;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn grid_rat(micros: i64) -> Rat {
    Rat::ratio(micros, GRID)
}

/// Micro-units of a grid-aligned rational; the generator's ranges are all
/// grid-aligned by construction.
fn micros_of(r: &Rat) -> i64 {
    let scaled = r.clone() * Rat::from_int(GRID);
    assert!(scaled.is_integer(), "range bound {r} is not on the value grid");
    scaled.to_integer().to_i64().expect("grid value out of range")
}

/// Uniform draw on the 1e-6 grid within `[lo, hi]`.
fn grid_uniform(rng: &mut ChaCha8Rng, lo: &Rat, hi: &Rat) -> Rat {
    let (lo_m, hi_m) = (micros_of(lo), micros_of(hi));
    assert!(lo_m <= hi_m, "empty sampling range");
    grid_rat(rng.gen_range(lo_m..=hi_m))
}

/// First `take` elements of a seeded shuffle of `0..n`.
fn sample_distinct(rng: &mut ChaCha8Rng, n: usize, take: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..take.min(n.saturating_sub(1)) {
        let j = rng.gen_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(take);
    idx
}

/// Exact single-source shortest delays over the given links.
pub(crate) fn shortest_delays(links: &[Link<Rat>], from: &str) -> BTreeMap<String, Rat> {
    let mut adjacency: BTreeMap<&str, Vec<(&str, &Rat)>> = BTreeMap::new();
    for l in links {
        adjacency.entry(l.from.as_str()).or_default().push((l.to.as_str(), &l.delay));
    }
    let mut dist: BTreeMap<&str, Rat> = BTreeMap::new();
    let mut done: BTreeSet<&str> = BTreeSet::new();
    dist.insert(from, Rat::zero());
    loop {
        // Smallest tentative distance among unfinished nodes; ties resolve
        // to the lexicographically smallest node for determinism.
        let next = dist
            .iter()
            .filter(|(n, _)| !done.contains(*n))
            .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(b.0)))
            .map(|(n, d)| (*n, d.clone()));
        let Some((u, du)) = next else { break };
        done.insert(u);
        for (v, w) in adjacency.get(u).into_iter().flatten() {
            let cand = du.clone() + (*w).clone();
            match dist.get(v) {
                Some(existing) if *existing <= cand => {}
                _ => {
                    dist.insert(v, cand);
                }
            }
        }
    }
    dist.into_iter().map(|(n, d)| (n.to_string(), d)).collect()
}

/// All-pairs shortest Euclidean path lengths (Floyd-Warshall, f64).
fn mean_shortest_euclidean(n: usize, euclid: &[Vec<f64>], links: &[(usize, usize)]) -> f64 {
    let inf = f64::INFINITY;
    let mut dist = vec![vec![inf; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(i, j) in links {
        dist[i][j] = dist[i][j].min(euclid[i][j]);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (i, row) in dist.iter().enumerate() {
        for (j, d) in row.iter().enumerate() {
            if i != j && d.is_finite() {
                sum += d;
                count += 1;
            }
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Generates an instance from the given parameters. Equal parameters give
/// byte-identical instances. If some service's endpoints stay disconnected,
/// the link set (and everything derived from it) is redrawn up to
/// [`MAX_LINK_ATTEMPTS`] times while nodes, clouds, and service requests
/// are kept; exhausting the attempts is an error.
pub fn generate(params: &GenParams) -> Result<SlicingInstance<Rat>, GenError> {
    validate_params(params)?;
    let n = params.nodes;
    let width = (n.max(1) as f64).log10().floor() as usize + 1;
    let node_ids: Vec<String> = (1..=n).map(|i| format!("n{i:0width$}")).collect();

    // Positions are only needed for planar geometry but are drawn
    // unconditionally so switching geometry never shifts other streams.
    let mut pos_rng = stream(params.seed, STREAM_POSITIONS);
    let side_micros = match params.geometry {
        Geometry::Planar { side } => (side * GRID as f64).round() as i64,
        Geometry::DelayChoices(_) => GRID,
    };
    let positions: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let x = pos_rng.gen_range(0..=side_micros) as f64 / GRID as f64;
            let y = pos_rng.gen_range(0..=side_micros) as f64 / GRID as f64;
            (x, y)
        })
        .collect();
    let euclid: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let dx = positions[i].0 - positions[j].0;
                    let dy = positions[i].1 - positions[j].1;
                    (dx * dx + dy * dy).sqrt()
                })
                .collect()
        })
        .collect();

    // Clouds and their capabilities.
    let mut cloud_rng = stream(params.seed, STREAM_CLOUDS);
    let cloud_idx = sample_distinct(&mut cloud_rng, n, params.clouds);
    let functions: Vec<String> = (1..=params.function_pool).map(|i| format!("f{i}")).collect();
    let mut fun_rng = stream(params.seed, STREAM_FUNCTIONS);
    let mut cap_rng = stream(params.seed, STREAM_NODE_CAPS);
    let mut nfv_rng = stream(params.seed, STREAM_NFV);
    let mut clouds = Vec::new();
    let mut nfv_by_cloud_function: BTreeMap<(String, String), Rat> = BTreeMap::new();
    for (pos, &ci) in cloud_idx.iter().enumerate() {
        let id = node_ids[ci].clone();
        let omni = pos + 1 == params.clouds;
        let processable: BTreeSet<String> = if omni {
            functions.iter().cloned().collect()
        } else {
            sample_distinct(&mut fun_rng, params.function_pool, params.limited_cloud_functions)
                .into_iter()
                .map(|f| functions[f].clone())
                .collect()
        };
        let capacity = grid_uniform(&mut cap_rng, &params.node_cap.0, &params.node_cap.1);
        for f in &processable {
            let delay = match &params.nfv_delay {
                Sampling::Range(lo, hi) => grid_uniform(&mut nfv_rng, lo, hi),
                Sampling::Choices(choices) => {
                    Rat::from_int(choices[nfv_rng.gen_range(0..choices.len())])
                }
            };
            nfv_by_cloud_function.insert((id.clone(), f.clone()), delay);
        }
        clouds.push(CloudNode { id, capacity, processable });
    }
    // Keep clouds in node order for canonical output.
    clouds.sort_by(|a, b| a.id.cmp(&b.id));
    let cloud_set: BTreeSet<usize> = cloud_idx.iter().copied().collect();

    // Service requests (everything except the latency budget, which needs
    // link delays).
    let plain: Vec<usize> = (0..n).filter(|i| !cloud_set.contains(i)).collect();
    let mut end_rng = stream(params.seed, STREAM_ENDPOINTS);
    let common_dest = plain[end_rng.gen_range(0..plain.len())];
    let mut chain_rng = stream(params.seed, STREAM_CHAINS);
    let mut rate_rng = stream(params.seed, STREAM_RATES);
    let mut jitter_rng = stream(params.seed, STREAM_JITTER);
    struct Draft {
        source: usize,
        destination: usize,
        chain: Vec<String>,
        rates: Vec<Rat>,
        jitter: Rat,
    }
    let mut drafts = Vec::new();
    for _ in 0..params.services {
        let (source, destination) = if params.common_destination {
            let mut s = plain[end_rng.gen_range(0..plain.len())];
            while s == common_dest {
                s = plain[end_rng.gen_range(0..plain.len())];
            }
            (s, common_dest)
        } else {
            let pick = sample_distinct(&mut end_rng, plain.len(), 2);
            (plain[pick[0]], plain[pick[1]])
        };
        let chain: Vec<String> =
            sample_distinct(&mut chain_rng, params.function_pool, params.chain_len)
                .into_iter()
                .map(|f| functions[f].clone())
                .collect();
        let rate = match params.rates {
            RateRule::Unit => Rat::one(),
            RateRule::UniformIntegerPerService { lo, hi } => {
                Rat::from_int(rate_rng.gen_range(lo..=hi))
            }
        };
        let rates = vec![rate; params.chain_len + 1];
        let jitter = grid_uniform(&mut jitter_rng, &Rat::zero(), &params.budget_jitter);
        drafts.push(Draft { source, destination, chain, rates, jitter });
    }

    // Links, redrawn until every service's endpoints connect.
    let prob_micros = (params.link_prob * GRID as f64).round() as i64;
    for attempt in 0..MAX_LINK_ATTEMPTS {
        let a = attempt as u64;
        let mut link_rng = stream(params.seed, STREAM_LINKS_BASE + a);
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && link_rng.gen_range(0..GRID) < prob_micros {
                    pairs.push((i, j));
                }
            }
        }
        if pairs.is_empty() {
            continue;
        }

        let mut delay_rng = stream(params.seed, STREAM_LINK_DELAYS_BASE + a);
        let delays: Vec<Rat> = match &params.geometry {
            Geometry::Planar { .. } => {
                let mean = mean_shortest_euclidean(n, &euclid, &pairs);
                if mean <= 0.0 {
                    continue;
                }
                pairs
                    .iter()
                    .map(|&(i, j)| {
                        let micros = (euclid[i][j] / mean * GRID as f64).round() as i64;
                        grid_rat(micros)
                    })
                    .collect()
            }
            Geometry::DelayChoices(choices) => pairs
                .iter()
                .map(|_| Rat::from_int(choices[delay_rng.gen_range(0..choices.len())]))
                .collect(),
        };

        let mut link_cap_rng = stream(params.seed, STREAM_LINK_CAPS_BASE + a);
        let links: Vec<Link<Rat>> = pairs
            .iter()
            .zip(delays)
            .map(|(&(i, j), delay)| Link {
                from: node_ids[i].clone(),
                to: node_ids[j].clone(),
                capacity: grid_uniform(&mut link_cap_rng, &params.link_cap.0, &params.link_cap.1),
                delay,
            })
            .collect();

        // Exact source-to-destination shortest delays; any unreachable
        // destination invalidates this link draw.
        let mut reachable = true;
        let mut budgets = Vec::new();
        for draft in &drafts {
            let dist = shortest_delays(&links, &node_ids[draft.source]);
            match dist.get(&node_ids[draft.destination]) {
                Some(d) => budgets.push(
                    params.budget_base.clone()
                        + params.budget_slope.clone() * d.clone()
                        + draft.jitter.clone(),
                ),
                None => {
                    reachable = false;
                    break;
                }
            }
        }
        if !reachable {
            continue;
        }

        let network = PhysicalNetwork { nodes: node_ids.clone(), links, clouds: clouds.clone() };
        let services: Vec<ServiceRequest<Rat>> = drafts
            .iter()
            .zip(budgets)
            .enumerate()
            .map(|(idx, (draft, latency_budget))| {
                let mut nfv_delays = BTreeMap::new();
                for (s, function) in draft.chain.iter().enumerate() {
                    for cloud in &network.clouds {
                        if cloud.processable.contains(function) {
                            let delay = nfv_by_cloud_function[&(cloud.id.clone(), function.clone())]
                                .clone();
                            nfv_delays.insert((cloud.id.clone(), s + 1), delay);
                        }
                    }
                }
                ServiceRequest {
                    id: (idx + 1) as u32,
                    source: node_ids[draft.source].clone(),
                    destination: node_ids[draft.destination].clone(),
                    chain: draft.chain.clone(),
                    rates: draft.rates.clone(),
                    latency_budget,
                    nfv_delays,
                }
            })
            .collect();

        let instance =
            SlicingInstance { network, services, weights: ObjectiveWeights::standard() };
        debug_assert_eq!(crate::model::validate_instance(&instance), Vec::new());
        return Ok(instance);
    }
    Err(GenError::Disconnected { attempts: MAX_LINK_ATTEMPTS })
}

fn validate_params(params: &GenParams) -> Result<(), GenError> {
    let bad = |msg: &str| Err(GenError::BadParams(msg.into()));
    if params.nodes < 3 {
        return bad("need at least three nodes");
    }
    if params.clouds == 0 || params.clouds + 2 > params.nodes {
        return bad("cloud count must be positive and leave two plain nodes");
    }
    if params.function_pool == 0 || params.chain_len == 0 {
        return bad("function pool and chain length must be positive");
    }
    if params.chain_len > params.function_pool {
        return bad("chain length exceeds the function pool");
    }
    if params.limited_cloud_functions == 0
        || params.limited_cloud_functions > params.function_pool
    {
        return bad("limited clouds must process between 1 and pool-size functions");
    }
    if !(0.0..=1.0).contains(&params.link_prob) {
        return bad("link probability must lie in [0, 1]");
    }
    if params.node_cap.0 > params.node_cap.1
        || params.link_cap.0 > params.link_cap.1
        || params.node_cap.0.is_negative()
        || params.link_cap.0.is_negative()
    {
        return bad("capacity ranges must be nonnegative and ordered");
    }
    if let Sampling::Range(lo, hi) = &params.nfv_delay {
        if lo > hi || lo.is_negative() {
            return bad("processing delay range must be nonnegative and ordered");
        }
    }
    if let Geometry::Planar { side } = params.geometry {
        if !(side > 0.0) {
            return bad("planar side must be positive");
        }
    }
    if params.budget_jitter.is_negative() {
        return bad("budget jitter must be nonnegative");
    }
    match &params.rates {
        RateRule::UniformIntegerPerService { lo, hi } if lo > hi || *lo <= 0 => {
            return bad("rate range must be positive and ordered");
        }
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fileio::instance_to_string;
    use crate::model::validate_instance;

    #[test]
    fn worked_examples_match_their_documented_shape() {
        let chain = example_chain();
        assert_eq!(chain.network.nodes.len(), 5);
        assert_eq!(chain.network.links.len(), 7);
        assert_eq!(chain.services[0].chain_len(), 2);
        assert_eq!(chain.total_rate(), Rat::from_int(12));
        assert_eq!(validate_instance(&chain), Vec::new());

        let pair = example_pair();
        assert_eq!(pair.services.len(), 2);
        assert_eq!(pair.services[1].latency_budget, Rat::from_int(3));
        assert_eq!(validate_instance(&pair), Vec::new());
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let params = six_node_params(3, 7);
        let a = generate(&params).unwrap();
        let b = generate(&params).unwrap();
        assert_eq!(instance_to_string(&a), instance_to_string(&b));

        let c = generate(&six_node_params(3, 8)).unwrap();
        assert_ne!(instance_to_string(&a), instance_to_string(&c));
    }

    #[test]
    fn generated_instances_validate_and_stay_on_grid() {
        for seed in 0..20 {
            let inst = generate(&six_node_params(2, seed)).unwrap();
            assert_eq!(validate_instance(&inst), Vec::new(), "seed {seed}");
            assert_eq!(inst.network.nodes.len(), 6);
            assert_eq!(inst.network.clouds.len(), 3);
            for link in &inst.network.links {
                // All quantities live on the 1e-6 grid.
                let scaled = link.delay.clone() * Rat::from_int(GRID);
                assert!(scaled.is_integer(), "seed {seed}: delay off-grid");
                assert!(link.capacity >= Rat::ratio(1, 2));
                assert!(link.capacity <= Rat::ratio(7, 2));
            }
            for svc in &inst.services {
                assert_eq!(svc.chain_len(), 3);
                assert!(svc.rates.iter().all(|r| *r == Rat::one()));
                // Budget = 3 + 6 * dist + jitter with jitter in [0, 2].
                assert!(svc.latency_budget >= Rat::from_int(3));
                let chain_set: BTreeSet<&String> = svc.chain.iter().collect();
                assert_eq!(chain_set.len(), 3, "chain functions are distinct");
            }
        }
    }

    #[test]
    fn six_node_cloud_capabilities_follow_the_limited_plus_omni_rule() {
        let inst = generate(&six_node_params(2, 11)).unwrap();
        let mut sizes: Vec<usize> =
            inst.network.clouds.iter().map(|c| c.processable.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 5]);
    }

    #[test]
    fn twelve_node_presets_differ_only_in_link_capacity() {
        let high = generate(&twelve_node_params(3, 12, true, 5)).unwrap();
        let low = generate(&twelve_node_params(3, 12, false, 5)).unwrap();
        assert_eq!(high.network.nodes, low.network.nodes);
        assert_eq!(high.services.len(), low.services.len());
        for (h, l) in high.services.iter().zip(&low.services) {
            assert_eq!(h.chain, l.chain);
            assert_eq!(h.rates, l.rates);
            // One shared destination.
            assert_eq!(h.destination, high.services[0].destination);
            assert_eq!(l.destination, h.destination);
        }
        for (h, l) in high.network.links.iter().zip(&low.network.links) {
            assert_eq!((&h.from, &h.to), (&l.from, &l.to));
            assert_eq!(h.delay, l.delay);
            assert!(h.delay == Rat::from_int(1) || h.delay == Rat::from_int(2));
            assert!(h.capacity >= Rat::from_int(7) && h.capacity <= Rat::from_int(77));
            assert!(l.capacity >= Rat::from_int(5) && l.capacity <= Rat::from_int(55));
        }
    }

    #[test]
    fn unknown_preset_is_rejected() {
        assert!(matches!(
            generate_preset("no-such", None, None, 0),
            Err(GenError::BadParams(_))
        ));
    }

    #[test]
    fn impossible_parameters_are_rejected() {
        let mut p = six_node_params(1, 0);
        p.clouds = 5;
        assert!(matches!(generate(&p), Err(GenError::BadParams(_))));
        let mut p = six_node_params(1, 0);
        p.chain_len = 9;
        assert!(matches!(generate(&p), Err(GenError::BadParams(_))));
    }

    #[test]
    fn zero_link_probability_reports_disconnection() {
        let mut p = six_node_params(1, 0);
        p.link_prob = 0.0;
        assert_eq!(generate(&p), Err(GenError::Disconnected { attempts: 50 }));
    }
}
