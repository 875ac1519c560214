//! Reading and writing instances and solutions as canonical JSON.
//!
//! The on-disk format is deterministic: object keys are sorted, indentation
//! is two spaces, lines end with `\n`, and every numeric quantity is an
//! exact rational rendered as a string (`"4"`, `"1/1000"`). Parsing accepts
//! integers, `p/q` fractions, and decimal literals (`"0.001"`, `2.5e-3`),
//! all converted exactly. Because serialization is canonical, the SHA-256
//! digest of an instance's serialized bytes is a stable fingerprint, which
//! the model builders embed as metadata.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::model::{
    CloudNode, Link, ObjectiveWeights, PhysicalNetwork, SegmentPath, ServiceRequest,
    SlicingInstance, SlicingSolution,
};
use crate::Rat;

/// Errors from file and format handling.
#[derive(Debug, thiserror::Error)]
pub enum FileError {
    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// The content does not match the expected format.
    #[error("parse error: {0}")]
    Parse(String),
}

fn parse_err(msg: impl Into<String>) -> FileError {
    FileError::Parse(msg.into())
}

// ---------------------------------------------------------------------------
// Exact rational <-> text
// ---------------------------------------------------------------------------

/// Formats a rational canonically: integers without denominator (`"4"`),
/// everything else as a reduced fraction (`"1/1000"`).
pub fn format_rational(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses an exact rational from integer (`"4"`), fraction (`"1/1000"`), or
/// decimal (`"0.001"`, `"2.5e-3"`) notation.
pub fn parse_rational(text: &str) -> Result<Rat, FileError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(parse_err("empty number"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("bad numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(parse_err(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(n, d));
    }
    parse_decimal(s)
}

/// Parses a decimal literal with optional sign, fraction part, and exponent
/// into an exact rational.
fn parse_decimal(s: &str) -> Result<Rat, FileError> {
    let bad = || parse_err(format!("bad number {s:?}"));
    let (mantissa, exp10) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e.parse().map_err(|_| bad())?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let mantissa_int: BigInt = if joined.is_empty() {
        BigInt::zero()
    } else {
        joined.parse().map_err(|_| bad())?
    };
    let scale = frac_part.len() as i64;
    let net_exp = exp10 - scale;
    let ten = BigInt::from(10);
    let value = Rat::from(mantissa_int * BigInt::from(sign));
    Ok(if net_exp >= 0 {
        value * Rat::from(ten.pow(net_exp as u32))
    } else {
        value / Rat::from(ten.pow((-net_exp) as u32))
    })
}

fn rational_value(r: &Rat) -> Value {
    Value::String(format_rational(r))
}

/// Accepts a rational in any supported JSON shape: string notation or a raw
/// JSON number (numbers are read from their literal digits, exactly).
fn value_to_rational(v: &Value, what: &str) -> Result<Rat, FileError> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(parse_err(format!("{what}: expected a number, got {other}"))),
    }
}

// ---------------------------------------------------------------------------
// Canonical JSON helpers
// ---------------------------------------------------------------------------

/// Serializes a JSON value canonically: sorted keys (guaranteed by the
/// BTree-backed map), two-space indentation, trailing newline.
pub fn to_canonical_string(value: &Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializing JSON cannot fail");
    out.push('\n');
    out
}

fn get<'v>(obj: &'v Map<String, Value>, key: &str, what: &str) -> Result<&'v Value, FileError> {
    obj.get(key)
        .ok_or_else(|| parse_err(format!("{what}: missing field {key:?}")))
}

fn as_object<'v>(v: &'v Value, what: &str) -> Result<&'v Map<String, Value>, FileError> {
    v.as_object()
        .ok_or_else(|| parse_err(format!("{what}: expected an object")))
}

fn as_array<'v>(v: &'v Value, what: &str) -> Result<&'v Vec<Value>, FileError> {
    v.as_array()
        .ok_or_else(|| parse_err(format!("{what}: expected an array")))
}

fn as_str<'v>(v: &'v Value, what: &str) -> Result<&'v str, FileError> {
    v.as_str()
        .ok_or_else(|| parse_err(format!("{what}: expected a string")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize, FileError> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| parse_err(format!("{what}: expected a non-negative integer")))
}

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

/// Converts an instance to its canonical JSON value.
pub fn instance_to_value(instance: &SlicingInstance<Rat>) -> Value {
    let nodes: Vec<Value> = instance
        .network
        .nodes
        .iter()
        .map(|n| Value::String(n.clone()))
        .collect();
    let links: Vec<Value> = instance
        .network
        .links
        .iter()
        .map(|l| {
            let mut m = Map::new();
            m.insert("from".into(), Value::String(l.from.clone()));
            m.insert("to".into(), Value::String(l.to.clone()));
            m.insert("capacity".into(), rational_value(&l.capacity));
            m.insert("delay".into(), rational_value(&l.delay));
            Value::Object(m)
        })
        .collect();
    let clouds: Vec<Value> = instance
        .network
        .clouds
        .iter()
        .map(|c| {
            let mut m = Map::new();
            m.insert("id".into(), Value::String(c.id.clone()));
            m.insert("capacity".into(), rational_value(&c.capacity));
            m.insert(
                "processable".into(),
                Value::Array(c.processable.iter().map(|f| Value::String(f.clone())).collect()),
            );
            Value::Object(m)
        })
        .collect();
    let mut network = Map::new();
    network.insert("nodes".into(), Value::Array(nodes));
    network.insert("links".into(), Value::Array(links));
    network.insert("clouds".into(), Value::Array(clouds));

    let services: Vec<Value> = instance
        .services
        .iter()
        .map(|s| {
            let mut m = Map::new();
            m.insert("id".into(), Value::Number(s.id.into()));
            m.insert("source".into(), Value::String(s.source.clone()));
            m.insert("destination".into(), Value::String(s.destination.clone()));
            m.insert(
                "chain".into(),
                Value::Array(s.chain.iter().map(|f| Value::String(f.clone())).collect()),
            );
            m.insert(
                "rates".into(),
                Value::Array(s.rates.iter().map(rational_value).collect()),
            );
            m.insert("latency_budget".into(), rational_value(&s.latency_budget));
            let nfv: Vec<Value> = s
                .nfv_delays
                .iter()
                .map(|((node, stage), d)| {
                    let mut e = Map::new();
                    e.insert("node".into(), Value::String(node.clone()));
                    e.insert("stage".into(), Value::Number((*stage as u64).into()));
                    e.insert("delay".into(), rational_value(d));
                    Value::Object(e)
                })
                .collect();
            m.insert("nfv_delays".into(), Value::Array(nfv));
            Value::Object(m)
        })
        .collect();

    let mut weights = Map::new();
    weights.insert("sigma".into(), rational_value(&instance.weights.sigma));
    weights.insert("beta1".into(), rational_value(&instance.weights.beta1));
    weights.insert("beta2".into(), rational_value(&instance.weights.beta2));
    weights.insert("delta".into(), rational_value(&instance.weights.delta));

    let mut root = Map::new();
    root.insert("network".into(), Value::Object(network));
    root.insert("services".into(), Value::Array(services));
    root.insert("weights".into(), Value::Object(weights));
    Value::Object(root)
}

/// Parses an instance from its JSON value.
pub fn instance_from_value(value: &Value) -> Result<SlicingInstance<Rat>, FileError> {
    let root = as_object(value, "instance")?;
    let network_v = as_object(get(root, "network", "instance")?, "network")?;

    let mut nodes = Vec::new();
    for n in as_array(get(network_v, "nodes", "network")?, "nodes")? {
        nodes.push(as_str(n, "node id")?.to_string());
    }

    let mut links = Vec::new();
    for l in as_array(get(network_v, "links", "network")?, "links")? {
        let l = as_object(l, "link")?;
        links.push(Link {
            from: as_str(get(l, "from", "link")?, "link.from")?.to_string(),
            to: as_str(get(l, "to", "link")?, "link.to")?.to_string(),
            capacity: value_to_rational(get(l, "capacity", "link")?, "link.capacity")?,
            delay: value_to_rational(get(l, "delay", "link")?, "link.delay")?,
        });
    }

    let mut clouds = Vec::new();
    for c in as_array(get(network_v, "clouds", "network")?, "clouds")? {
        let c = as_object(c, "cloud")?;
        let mut processable = BTreeSet::new();
        for f in as_array(get(c, "processable", "cloud")?, "cloud.processable")? {
            processable.insert(as_str(f, "function name")?.to_string());
        }
        clouds.push(CloudNode {
            id: as_str(get(c, "id", "cloud")?, "cloud.id")?.to_string(),
            capacity: value_to_rational(get(c, "capacity", "cloud")?, "cloud.capacity")?,
            processable,
        });
    }

    let mut services = Vec::new();
    for s in as_array(get(root, "services", "instance")?, "services")? {
        let s = as_object(s, "service")?;
        let id = s
            .get("id")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| parse_err("service: missing or bad id"))? as u32;
        let mut chain = Vec::new();
        for f in as_array(get(s, "chain", "service")?, "service.chain")? {
            chain.push(as_str(f, "function name")?.to_string());
        }
        let mut rates = Vec::new();
        for r in as_array(get(s, "rates", "service")?, "service.rates")? {
            rates.push(value_to_rational(r, "service rate")?);
        }
        let mut nfv_delays = BTreeMap::new();
        for e in as_array(get(s, "nfv_delays", "service")?, "service.nfv_delays")? {
            let e = as_object(e, "nfv delay entry")?;
            let node = as_str(get(e, "node", "nfv delay")?, "nfv delay node")?.to_string();
            let stage = as_usize(get(e, "stage", "nfv delay")?, "nfv delay stage")?;
            let delay = value_to_rational(get(e, "delay", "nfv delay")?, "nfv delay")?;
            nfv_delays.insert((node, stage), delay);
        }
        services.push(ServiceRequest {
            id,
            source: as_str(get(s, "source", "service")?, "service.source")?.to_string(),
            destination: as_str(get(s, "destination", "service")?, "service.destination")?
                .to_string(),
            chain,
            rates,
            latency_budget: value_to_rational(
                get(s, "latency_budget", "service")?,
                "service.latency_budget",
            )?,
            nfv_delays,
        });
    }

    let w = as_object(get(root, "weights", "instance")?, "weights")?;
    let weights = ObjectiveWeights {
        sigma: value_to_rational(get(w, "sigma", "weights")?, "weights.sigma")?,
        beta1: value_to_rational(get(w, "beta1", "weights")?, "weights.beta1")?,
        beta2: value_to_rational(get(w, "beta2", "weights")?, "weights.beta2")?,
        delta: value_to_rational(get(w, "delta", "weights")?, "weights.delta")?,
    };

    Ok(SlicingInstance {
        network: PhysicalNetwork { nodes, links, clouds },
        services,
        weights,
    })
}

/// Serializes an instance canonically.
pub fn instance_to_string(instance: &SlicingInstance<Rat>) -> String {
    to_canonical_string(&instance_to_value(instance))
}

/// Parses an instance from JSON text.
pub fn instance_from_str(text: &str) -> Result<SlicingInstance<Rat>, FileError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| parse_err(format!("invalid JSON: {e}")))?;
    instance_from_value(&value)
}

/// Writes an instance to a file in canonical form.
pub fn write_instance(path: &Path, instance: &SlicingInstance<Rat>) -> Result<(), FileError> {
    Ok(std::fs::write(path, instance_to_string(instance))?)
}

/// Reads an instance from a file.
pub fn read_instance(path: &Path) -> Result<SlicingInstance<Rat>, FileError> {
    instance_from_str(&std::fs::read_to_string(path)?)
}

/// SHA-256 digest of the canonical serialization, as lowercase hex. Stable
/// across runs and platforms, so it identifies the instance in model
/// metadata and reports.
pub fn instance_hash(instance: &SlicingInstance<Rat>) -> String {
    let bytes = instance_to_string(instance);
    let mut hasher = Sha256::new();
    hasher.update(bytes.as_bytes());
    hex::encode(hasher.finalize())
}

// ---------------------------------------------------------------------------
// Solutions
// ---------------------------------------------------------------------------

/// Converts a solution to its canonical JSON value. Link rates are not
/// serialized: they are implied by the paths (every link of a path carries
/// the path's rate) and are rebuilt on read.
pub fn solution_to_value(solution: &SlicingSolution<Rat>) -> Value {
    let activated: Vec<Value> = solution
        .activated
        .iter()
        .map(|v| Value::String(v.clone()))
        .collect();

    // Merge the two placement maps; they share the same key set.
    let mut placements = Vec::new();
    for ((service, stage), physical) in &solution.placement_physical {
        let mut m = Map::new();
        m.insert("service".into(), Value::Number((*service).into()));
        m.insert("stage".into(), Value::Number((*stage as u64).into()));
        m.insert("physical".into(), Value::String(physical.clone()));
        if let Some(clone) = solution.placement_virtual.get(&(*service, *stage)) {
            m.insert("clone".into(), Value::String(clone.clone()));
        }
        placements.push(Value::Object(m));
    }

    let paths: Vec<Value> = solution
        .paths
        .iter()
        .map(|((service, segment, path), sp)| {
            let mut m = Map::new();
            m.insert("service".into(), Value::Number((*service).into()));
            m.insert("segment".into(), Value::Number((*segment as u64).into()));
            m.insert("path".into(), Value::Number((*path as u64).into()));
            m.insert(
                "nodes".into(),
                Value::Array(sp.nodes.iter().map(|n| Value::String(n.clone())).collect()),
            );
            m.insert("rate".into(), rational_value(&sp.rate));
            Value::Object(m)
        })
        .collect();

    let hops: Vec<Value> = solution
        .hop_delay
        .iter()
        .map(|((service, segment), d)| {
            let mut m = Map::new();
            m.insert("service".into(), Value::Number((*service).into()));
            m.insert("segment".into(), Value::Number((*segment as u64).into()));
            m.insert("delay".into(), rational_value(d));
            Value::Object(m)
        })
        .collect();

    let mut delays = Vec::new();
    for (service, comm) in &solution.comm_delay {
        let mut m = Map::new();
        m.insert("service".into(), Value::Number((*service).into()));
        m.insert("comm".into(), rational_value(comm));
        if let Some(proc) = solution.proc_delay.get(service) {
            m.insert("proc".into(), rational_value(proc));
        }
        delays.push(Value::Object(m));
    }

    let mut root = Map::new();
    root.insert("activated".into(), Value::Array(activated));
    root.insert("placements".into(), Value::Array(placements));
    root.insert("paths".into(), Value::Array(paths));
    root.insert("hops".into(), Value::Array(hops));
    root.insert("delays".into(), Value::Array(delays));
    Value::Object(root)
}

/// Rebuilds per-link rates from a path: each traversed link carries the
/// path's full rate.
pub fn path_link_rates(path: &SegmentPath<Rat>) -> BTreeMap<(String, String), Rat> {
    let mut out = BTreeMap::new();
    for pair in path.nodes.windows(2) {
        let key = (pair[0].clone(), pair[1].clone());
        let slot = out.entry(key).or_insert_with(Rat::zero);
        *slot = slot.clone() + path.rate.clone();
    }
    out
}

/// Parses a solution from its JSON value.
pub fn solution_from_value(value: &Value) -> Result<SlicingSolution<Rat>, FileError> {
    let root = as_object(value, "solution")?;
    let mut solution = SlicingSolution::default();

    for v in as_array(get(root, "activated", "solution")?, "activated")? {
        solution.activated.insert(as_str(v, "activated node")?.to_string());
    }

    for p in as_array(get(root, "placements", "solution")?, "placements")? {
        let p = as_object(p, "placement")?;
        let service = p
            .get("service")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| parse_err("placement: missing service"))? as u32;
        let stage = as_usize(get(p, "stage", "placement")?, "placement.stage")?;
        let physical = as_str(get(p, "physical", "placement")?, "placement.physical")?;
        solution
            .placement_physical
            .insert((service, stage), physical.to_string());
        if let Some(clone) = p.get("clone") {
            solution
                .placement_virtual
                .insert((service, stage), as_str(clone, "placement.clone")?.to_string());
        }
    }

    for p in as_array(get(root, "paths", "solution")?, "paths")? {
        let p = as_object(p, "path")?;
        let service = p
            .get("service")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| parse_err("path: missing service"))? as u32;
        let segment = as_usize(get(p, "segment", "path")?, "path.segment")?;
        let index = as_usize(get(p, "path", "path")?, "path.path")?;
        let mut nodes = Vec::new();
        for n in as_array(get(p, "nodes", "path")?, "path.nodes")? {
            nodes.push(as_str(n, "path node")?.to_string());
        }
        let rate = value_to_rational(get(p, "rate", "path")?, "path.rate")?;
        let sp = SegmentPath { nodes, rate };
        solution
            .link_rate
            .insert((service, segment, index), path_link_rates(&sp));
        solution.paths.insert((service, segment, index), sp);
    }

    for h in as_array(get(root, "hops", "solution")?, "hops")? {
        let h = as_object(h, "hop delay")?;
        let service = h
            .get("service")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| parse_err("hop delay: missing service"))? as u32;
        let segment = as_usize(get(h, "segment", "hop delay")?, "hop.segment")?;
        let delay = value_to_rational(get(h, "delay", "hop delay")?, "hop.delay")?;
        solution.hop_delay.insert((service, segment), delay);
    }

    for d in as_array(get(root, "delays", "solution")?, "delays")? {
        let d = as_object(d, "delay entry")?;
        let service = d
            .get("service")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| parse_err("delay entry: missing service"))? as u32;
        solution
            .comm_delay
            .insert(service, value_to_rational(get(d, "comm", "delay")?, "delay.comm")?);
        if let Some(proc) = d.get("proc") {
            solution
                .proc_delay
                .insert(service, value_to_rational(proc, "delay.proc")?);
        }
    }

    Ok(solution)
}

/// Serializes a solution canonically.
pub fn solution_to_string(solution: &SlicingSolution<Rat>) -> String {
    to_canonical_string(&solution_to_value(solution))
}

/// Parses a solution from JSON text.
pub fn solution_from_str(text: &str) -> Result<SlicingSolution<Rat>, FileError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| parse_err(format!("invalid JSON: {e}")))?;
    solution_from_value(&value)
}

/// Writes a solution to a file in canonical form.
pub fn write_solution(path: &Path, solution: &SlicingSolution<Rat>) -> Result<(), FileError> {
    Ok(std::fs::write(path, solution_to_string(solution))?)
}

/// Reads a solution from a file.
pub fn read_solution(path: &Path) -> Result<SlicingSolution<Rat>, FileError> {
    solution_from_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{example_chain, example_pair};
    use crate::scalar::Scalar;

    #[test]
    fn rational_notation_round_trips() {
        for text in ["4", "-7", "1/1000", "-3/2", "0"] {
            let r = parse_rational(text).unwrap();
            assert_eq!(format_rational(&r), text, "round trip of {text}");
        }
    }

    #[test]
    fn decimal_notation_parses_exactly() {
        assert_eq!(parse_rational("0.001").unwrap(), Rat::ratio(1, 1000));
        assert_eq!(parse_rational("0.1").unwrap(), Rat::ratio(1, 10));
        assert_eq!(parse_rational("-3.5").unwrap(), Rat::ratio(-7, 2));
        assert_eq!(parse_rational("2.5e-3").unwrap(), Rat::ratio(1, 400));
        assert_eq!(parse_rational("1e3").unwrap(), Rat::from_int(1000));
        assert_eq!(parse_rational(".5").unwrap(), Rat::ratio(1, 2));
        assert_eq!(parse_rational("12.").unwrap(), Rat::from_int(12));
    }

    #[test]
    fn malformed_numbers_are_rejected()  {
        for text in ["", "abc", "1/0", "1.2.3", "--4", "1/ /2", "0x10"] {
            assert!(parse_rational(text).is_err(), "{text:?} should not parse");
        }
    }

    #[test]
    fn instance_round_trips_and_serialization_is_stable() {
        for inst in [example_chain(), example_pair()] {
            let text = instance_to_string(&inst);
            let back = instance_from_str(&text).unwrap();
            assert_eq!(back, inst);
            // Canonical form: byte-stable, LF endings, 2-space indent.
            assert_eq!(instance_to_string(&back), text);
            assert!(!text.contains('\r'));
            assert!(text.ends_with('\n'));
            assert!(text.contains("\n  \"network\""));
        }
    }

    #[test]
    fn json_numbers_are_accepted_for_rates() {
        let mut text = instance_to_string(&example_chain());
        // Replace a string rate with a raw JSON number; parsing stays exact.
        text = text.replace("\"rates\": [\n        \"4\",", "\"rates\": [\n        4.0,");
        let inst = instance_from_str(&text).unwrap();
        assert_eq!(inst.services[0].rates[0], Rat::from_int(4));
    }

    #[test]
    fn hash_distinguishes_instances() {
        let h1 = instance_hash(&example_chain());
        let h2 = instance_hash(&example_pair());
        assert_eq!(h1.len(), 64);
        assert_ne!(h1, h2);
        assert_eq!(h1, instance_hash(&example_chain()));
    }

    #[test]
    fn solution_round_trips() {
        let mut solution = SlicingSolution::<Rat>::default();
        solution.activated.insert("E".into());
        solution.placement_physical.insert((1, 1), "E".into());
        solution.placement_virtual.insert((1, 1), "E#1".into());
        let path = SegmentPath {
            nodes: vec!["A".into(), "B".into(), "E".into(), "E#1".into()],
            rate: Rat::from_int(2),
        };
        solution.link_rate.insert((1, 0, 1), path_link_rates(&path));
        solution.paths.insert((1, 0, 1), path);
        solution.hop_delay.insert((1, 0), Rat::from_int(2));
        solution.comm_delay.insert(1, Rat::from_int(3));
        solution.proc_delay.insert(1, Rat::from_int(2));

        let text = solution_to_string(&solution);
        let back = solution_from_str(&text).unwrap();
        assert_eq!(back, solution);
        assert_eq!(solution_to_string(&back), text);
    }

    #[test]
    fn path_link_rates_cover_each_hop() {
        let path = SegmentPath {
            nodes: vec!["A".into(), "B".into(), "E".into()],
            rate: Rat::ratio(3, 2),
        };
        let rates = path_link_rates(&path);
        assert_eq!(rates.len(), 2);
        assert_eq!(rates[&("A".into(), "B".into())], Rat::ratio(3, 2));
        assert_eq!(rates[&("B".into(), "E".into())], Rat::ratio(3, 2));
    }
}
