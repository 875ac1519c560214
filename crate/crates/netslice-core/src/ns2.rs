//! The aggregated routing formulation.
//!
//! Instead of enumerating candidate endpoint pairs per segment (as
//! [`crate::ns1`] does), each segment here routes through the expanded
//! network as a single commodity per path: crossing a clone's attachment
//! link *is* the placement decision, so the attachment links are pinned
//! to the placement variables and no pair enumeration is needed. The
//! placement-rate products this introduces on the attachment links are
//! linearized with a three-inequality envelope over auxiliary rate
//! variables (one per attachment link use).
//!
//! Variable and constraint counts scale linearly in the candidate-host
//! count per stage instead of quadratically, which is the whole point;
//! see [`ns2_size`] versus [`crate::ns1::ns1_size`].
//!
//! The placement, activation, capacity, and delay-ledger families are
//! emitted by the same helpers as the pairwise formulation, so those
//! rows are identical across the two models (same tags, same names).

use std::collections::{BTreeMap, BTreeSet};

pub use crate::ns1::{BuildError, BuildOptions, DelayVars, PlacementVars};

use crate::milp::{MilpModel, Sense, VarId};
use crate::model::SlicingInstance;
use crate::ns1::{
    add_delay_rows, add_delay_vars, add_placement_rows, add_placement_vars, prepare,
    set_model_objective, shared_size, stamp_metadata, BuildPrep,
};
use crate::scalar::Scalar;
use crate::vnet::VirtualNetwork;

/// Lookup tables from semantic indices to the variables of a built
/// aggregated model. Routing families are keyed by (service, segment,
/// path) plus a link index into [`VirtualNetwork::links`] where needed;
/// the product variables are keyed by the clone whose attachment link
/// they meter.
#[derive(Debug, Clone, Default)]
pub struct Ns2VarMap {
    pub placement: PlacementVars,
    /// Rate carried by each path of a segment.
    pub r: BTreeMap<(u32, usize, usize), VarId>,
    /// Link-use indicator per (service, segment, path, link).
    pub z: BTreeMap<(u32, usize, usize, usize), VarId>,
    /// Link rate per (service, segment, path, link).
    pub rij: BTreeMap<(u32, usize, usize, usize), VarId>,
    /// Linearized `x * r` on the clone's outbound attachment link
    /// (traffic leaving the clone that processed the segment's start).
    pub omega_exit: BTreeMap<(u32, usize, usize, String), VarId>,
    /// Linearized `x * r` on the clone's inbound attachment link
    /// (traffic entering the clone that processes the segment's end).
    pub omega_entry: BTreeMap<(u32, usize, usize, String), VarId>,
    pub delays: DelayVars,
}

/// Links available to segment `s` of service `ki`: every physical link,
/// the outbound attachment links of the stage-`s` hosts (`s >= 1`), and
/// the inbound attachment links of the stage-`s+1` hosts (`s < ell`).
/// Sorted by link index. Attachment links of other clones do not exist
/// for this segment (their indicators are fixed to zero by omission).
fn segment_links<S: Scalar>(prep: &BuildPrep<S>, ki: usize, s: usize) -> Vec<usize> {
    let vnet = prep.vnet;
    let ell = prep.instance.services[ki].chain_len();
    let mut out: Vec<usize> = (0..vnet.physical.links.len()).collect();
    if s >= 1 {
        for i in &prep.hosts[ki][s - 1] {
            out.push(vnet.out_links(i)[0]);
        }
    }
    if s < ell {
        for i in &prep.hosts[ki][s] {
            out.push(vnet.in_links(i)[0]);
        }
    }
    out.sort_unstable();
    out
}

/// Builds the aggregated model. Returns the model plus the index map
/// that names every variable family.
pub fn build_ns2<S: Scalar>(
    instance: &SlicingInstance<S>,
    vnet: &VirtualNetwork<S>,
    options: &BuildOptions,
) -> Result<(MilpModel, Ns2VarMap), BuildError> {
    let prep = prepare(instance, vnet, options)?;
    let mut model = MilpModel::new("ns2");
    model.metadata.insert("formulation".into(), "ns2".into());
    stamp_metadata(&mut model, &prep);

    let mut map =
        Ns2VarMap { placement: add_placement_vars(&mut model, &prep), ..Default::default() };

    let mut link_load: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); vnet.links.len()];
    for (ki, svc) in instance.services.iter().enumerate() {
        let ell = svc.chain_len();
        for s in 0..=ell {
            let lambda = svc.rate(s).to_f64();
            for p in 1..=prep.paths {
                let id = model.add_continuous(format!("r_k{}_s{s}_p{p}", svc.id), 0.0, lambda);
                map.r.insert((svc.id, s, p), id);
            }
            let links = segment_links(&prep, ki, s);
            for p in 1..=prep.paths {
                for &li in &links {
                    let l = &vnet.links[li];
                    let id = model
                        .add_binary(format!("z_k{}_s{s}_p{p}_{}_{}", svc.id, l.from, l.to));
                    map.z.insert((svc.id, s, p, li), id);
                }
            }
            for p in 1..=prep.paths {
                for &li in &links {
                    let l = &vnet.links[li];
                    let id = model.add_continuous(
                        format!("rij_k{}_s{s}_p{p}_{}_{}", svc.id, l.from, l.to),
                        0.0,
                        lambda,
                    );
                    map.rij.insert((svc.id, s, p, li), id);
                    link_load[li].push((id, 1.0));
                }
            }
            if s >= 1 {
                for p in 1..=prep.paths {
                    for i in &prep.hosts[ki][s - 1] {
                        let id = model.add_continuous(
                            format!("omx_k{}_s{s}_p{p}_{i}", svc.id),
                            0.0,
                            lambda,
                        );
                        map.omega_exit.insert((svc.id, s, p, i.clone()), id);
                    }
                }
            }
            if s < ell {
                for p in 1..=prep.paths {
                    for i in &prep.hosts[ki][s] {
                        let id = model.add_continuous(
                            format!("ome_k{}_s{s}_p{p}_{i}", svc.id),
                            0.0,
                            lambda,
                        );
                        map.omega_entry.insert((svc.id, s, p, i.clone()), id);
                    }
                }
            }
        }
    }
    map.delays = add_delay_vars(&mut model, &prep);

    add_placement_rows(&mut model, &prep, &map.placement);

    // The paths of a segment jointly carry the whole segment rate.
    for svc in &instance.services {
        for s in 0..=svc.chain_len() {
            let terms: Vec<(VarId, f64)> =
                (1..=prep.paths).map(|p| (map.r[&(svc.id, s, p)], 1.0)).collect();
            model.add_constraint(
                format!("ns2:rate-coupling[k={},s={s}]", svc.id),
                terms,
                Sense::Eq,
                svc.rate(s).to_f64(),
            );
        }
    }

    // Envelope pinning each product variable to placement * path rate:
    // at placement one it equals the path rate, at placement zero it
    // vanishes (the lower bound covers the fourth inequality).
    for (ki, svc) in instance.services.iter().enumerate() {
        let ell = svc.chain_len();
        for s in 0..=ell {
            let lambda = svc.rate(s).to_f64();
            for p in 1..=prep.paths {
                let r = map.r[&(svc.id, s, p)];
                let emit = |om: VarId, x: VarId, base: String, model: &mut MilpModel| {
                    model.add_constraint(
                        format!("{base},bound=low]"),
                        vec![(x, lambda), (r, 1.0), (om, -1.0)],
                        Sense::Le,
                        lambda,
                    );
                    model.add_constraint(
                        format!("{base},bound=cap-x]"),
                        vec![(om, 1.0), (x, -lambda)],
                        Sense::Le,
                        0.0,
                    );
                    model.add_constraint(
                        format!("{base},bound=cap-r]"),
                        vec![(om, 1.0), (r, -1.0)],
                        Sense::Le,
                        0.0,
                    );
                };
                if s >= 1 {
                    for i in &prep.hosts[ki][s - 1] {
                        let om = map.omega_exit[&(svc.id, s, p, i.clone())];
                        let x = map.placement.x[&(svc.id, s, i.clone())];
                        let base = format!(
                            "ns2:product-envelope[k={},s={s},p={p},v={i},side=src",
                            svc.id
                        );
                        emit(om, x, base, &mut model);
                    }
                }
                if s < ell {
                    for i in &prep.hosts[ki][s] {
                        let om = map.omega_entry[&(svc.id, s, p, i.clone())];
                        let x = map.placement.x[&(svc.id, s + 1, i.clone())];
                        let base = format!(
                            "ns2:product-envelope[k={},s={s},p={p},v={i},side=dst",
                            svc.id
                        );
                        emit(om, x, base, &mut model);
                    }
                }
            }
        }
    }

    // Attachment links are pinned: rate equals the product variable,
    // use equals the placement itself.
    for (ki, svc) in instance.services.iter().enumerate() {
        let ell = svc.chain_len();
        for s in 0..=ell {
            if s >= 1 {
                for p in 1..=prep.paths {
                    for i in &prep.hosts[ki][s - 1] {
                        let li = vnet.out_links(i)[0];
                        model.add_constraint(
                            format!("ns2:clone-exit-rate[k={},s={s},p={p},v={i}]", svc.id),
                            vec![
                                (map.rij[&(svc.id, s, p, li)], 1.0),
                                (map.omega_exit[&(svc.id, s, p, i.clone())], -1.0),
                            ],
                            Sense::Eq,
                            0.0,
                        );
                    }
                }
                for p in 1..=prep.paths {
                    for i in &prep.hosts[ki][s - 1] {
                        let li = vnet.out_links(i)[0];
                        model.add_constraint(
                            format!("ns2:clone-exit-path[k={},s={s},p={p},v={i}]", svc.id),
                            vec![
                                (map.z[&(svc.id, s, p, li)], 1.0),
                                (map.placement.x[&(svc.id, s, i.clone())], -1.0),
                            ],
                            Sense::Eq,
                            0.0,
                        );
                    }
                }
            }
            if s < ell {
                for p in 1..=prep.paths {
                    for i in &prep.hosts[ki][s] {
                        let li = vnet.in_links(i)[0];
                        model.add_constraint(
                            format!("ns2:clone-entry-rate[k={},s={s},p={p},v={i}]", svc.id),
                            vec![
                                (map.rij[&(svc.id, s, p, li)], 1.0),
                                (map.omega_entry[&(svc.id, s, p, i.clone())], -1.0),
                            ],
                            Sense::Eq,
                            0.0,
                        );
                    }
                }
                for p in 1..=prep.paths {
                    for i in &prep.hosts[ki][s] {
                        let li = vnet.in_links(i)[0];
                        model.add_constraint(
                            format!("ns2:clone-entry-path[k={},s={s},p={p},v={i}]", svc.id),
                            vec![
                                (map.z[&(svc.id, s, p, li)], 1.0),
                                (map.placement.x[&(svc.id, s + 1, i.clone())], -1.0),
                            ],
                            Sense::Eq,
                            0.0,
                        );
                    }
                }
            }
        }
    }

    // A path never both enters and leaves the same clone within one
    // segment (possible only when the clone can host both endpoints).
    for (ki, svc) in instance.services.iter().enumerate() {
        let ell = svc.chain_len();
        for s in 1..ell {
            for p in 1..=prep.paths {
                for i in &prep.hosts[ki][s - 1] {
                    if !prep.hosts[ki][s].contains(i) {
                        continue;
                    }
                    model.add_constraint(
                        format!("ns2:clone-loop[k={},s={s},p={p},v={i}]", svc.id),
                        vec![
                            (map.z[&(svc.id, s, p, vnet.out_links(i)[0])], 1.0),
                            (map.z[&(svc.id, s, p, vnet.in_links(i)[0])], 1.0),
                        ],
                        Sense::Le,
                        1.0,
                    );
                }
            }
        }
    }

    // Link rate flows only on selected links, at most the segment rate.
    for (ki, svc) in instance.services.iter().enumerate() {
        for s in 0..=svc.chain_len() {
            let lambda = svc.rate(s).to_f64();
            for p in 1..=prep.paths {
                for &li in &segment_links(&prep, ki, s) {
                    let l = &vnet.links[li];
                    let key = (svc.id, s, p, li);
                    model.add_constraint(
                        format!(
                            "ns2:rate-indicator-link[k={},s={s},p={p},link=({},{})]",
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

    // Total load per link within its capacity.
    for (li, terms) in link_load.into_iter().enumerate() {
        if terms.is_empty() {
            continue;
        }
        let l = &vnet.links[li];
        model.add_constraint(
            format!("ns2:link-capacity[link=({},{})]", l.from, l.to),
            terms,
            Sense::Le,
            l.capacity.to_f64(),
        );
    }

    // Flow conservation at the physical nodes (clone endpoints are
    // already pinned by the attachment equalities): the service source
    // emits each path's rate at the first segment, the destination
    // absorbs it at the last, everything else conserves.
    for (ki, svc) in instance.services.iter().enumerate() {
        let ell = svc.chain_len();
        for s in 0..=ell {
            let links = segment_links(&prep, ki, s);
            let mut incident: BTreeMap<&str, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
            if s == 0 {
                incident.entry(svc.source.as_str()).or_default();
            }
            if s == ell {
                incident.entry(svc.destination.as_str()).or_default();
            }
            for &li in &links {
                let l = &vnet.links[li];
                if !vnet.is_clone(&l.from) {
                    incident.entry(l.from.as_str()).or_default().1.push(li);
                }
                if !vnet.is_clone(&l.to) {
                    incident.entry(l.to.as_str()).or_default().0.push(li);
                }
            }
            for p in 1..=prep.paths {
                for (node, (ins, outs)) in &incident {
                    let mut terms: Vec<(VarId, f64)> = Vec::new();
                    for &li in ins {
                        terms.push((map.rij[&(svc.id, s, p, li)], 1.0));
                    }
                    for &li in outs {
                        terms.push((map.rij[&(svc.id, s, p, li)], -1.0));
                    }
                    if s == 0 && *node == svc.source {
                        terms.push((map.r[&(svc.id, s, p)], 1.0));
                    } else if s == ell && *node == svc.destination {
                        terms.push((map.r[&(svc.id, s, p)], -1.0));
                    }
                    if !terms.is_empty() {
                        model.add_constraint(
                            format!("ns2:flow-balance-rate[k={},s={s},p={p},i={node}]", svc.id),
                            terms,
                            Sense::Eq,
                            0.0,
                        );
                    }
                }
                for (node, (ins, outs)) in &incident {
                    let mut terms: Vec<(VarId, f64)> = Vec::new();
                    for &li in ins {
                        terms.push((map.z[&(svc.id, s, p, li)], 1.0));
                    }
                    for &li in outs {
                        terms.push((map.z[&(svc.id, s, p, li)], -1.0));
                    }
                    let rhs = if s == 0 && *node == svc.source {
                        -1.0
                    } else if s == ell && *node == svc.destination {
                        1.0
                    } else {
                        0.0
                    };
                    if !terms.is_empty() {
                        model.add_constraint(
                            format!("ns2:flow-balance-path[k={},s={s},p={p},i={node}]", svc.id),
                            terms,
                            Sense::Eq,
                            rhs,
                        );
                    }
                }
            }
        }
    }

    // Segment hop delay dominates every path's delay sum.
    let n_phys = vnet.physical.links.len();
    for svc in &instance.services {
        for s in 0..=svc.chain_len() {
            for p in 1..=prep.paths {
                let mut terms = vec![(map.delays.theta[&(svc.id, s)], 1.0)];
                for li in 0..n_phys {
                    let d = vnet.links[li].delay.to_f64();
                    terms.push((map.z[&(svc.id, s, p, li)], -d));
                }
                model.add_constraint(
                    format!("ns2:hop-delay[k={},s={s},p={p}]", svc.id),
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

/// Exact variable and constraint counts of [`build_ns2`] for the same
/// inputs, computed without allocating any coefficient data.
pub fn ns2_size<S: Scalar>(
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

    // Physical nodes incident to at least one physical link.
    let mut linked: BTreeSet<&str> = BTreeSet::new();
    for l in &vnet.physical.links {
        linked.insert(l.from.as_str());
        linked.insert(l.to.as_str());
    }

    for (ki, svc) in instance.services.iter().enumerate() {
        let ell = svc.chain_len();
        for s in 0..=ell {
            let exits = if s >= 1 { prep.hosts[ki][s - 1].len() } else { 0 };
            let entries = if s < ell { prep.hosts[ki][s].len() } else { 0 };
            let n_links = n_phys + exits + entries;
            vars += p; // r
            vars += 2 * p * n_links; // z + rij
            vars += p * (exits + entries); // products
            cons += 1; // rate-coupling
            cons += 3 * p * (exits + entries); // product-envelope
            cons += 2 * p * (exits + entries); // attachment equalities (rate + path)
            if s >= 1 && s < ell {
                let overlap = prep.hosts[ki][s - 1]
                    .iter()
                    .filter(|i| prep.hosts[ki][s].contains(*i))
                    .count();
                cons += p * overlap; // clone-loop
            }
            cons += p * n_links; // rate-indicator-link
            cons += p; // hop-delay

            // Flow balance: physical nodes touched by the segment's links,
            // plus the source/destination rows (whose rate form always has
            // the path-rate term even on an isolated endpoint).
            let mut touched: BTreeSet<&str> = linked.clone();
            if s >= 1 {
                for i in &prep.hosts[ki][s - 1] {
                    touched.insert(vnet.anchor_of(i).unwrap());
                }
            }
            if s < ell {
                for i in &prep.hosts[ki][s] {
                    touched.insert(vnet.anchor_of(i).unwrap());
                }
            }
            let path_rows = touched.len();
            let mut rate_rows = path_rows;
            if s == 0 && !touched.contains(svc.source.as_str()) {
                rate_rows += 1;
            }
            if s == ell && !touched.contains(svc.destination.as_str()) {
                rate_rows += 1;
            }
            cons += p * (rate_rows + path_rows);
        }
    }
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
    use crate::ns1::ns1_size;
    use crate::Rat;

    fn build_default(
        instance: &crate::Instance,
        options: &BuildOptions,
    ) -> (MilpModel, Ns2VarMap) {
        let vnet = VirtualNetwork::build(instance);
        build_ns2(instance, &vnet, options).unwrap()
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
            "ns2:rate-coupling",
            "ns2:product-envelope",
            "ns2:clone-exit-rate",
            "ns2:clone-entry-rate",
            "ns2:clone-exit-path",
            "ns2:clone-entry-path",
            "ns2:clone-loop",
            "ns2:rate-indicator-link",
            "ns2:link-capacity",
            "ns2:flow-balance-rate",
            "ns2:flow-balance-path",
            "ns2:hop-delay",
            "comm-delay-sum",
            "proc-delay-sum",
            "e2e-budget",
        ] {
            assert!(census.contains_key(family), "missing family {family}");
        }
        assert_eq!(census["ns2:rate-coupling"], 3);
        assert_eq!(census["ns2:hop-delay"], 3 * 2);
        // f1 runs on E's clones only; both can also run f2, so segment 1
        // has loop guards for both.
        assert_eq!(census["ns2:clone-loop"], 2 * 2);
        assert!(map.omega_exit.contains_key(&(1, 1, 1, "E#1".into())));
        assert!(!map.omega_exit.contains_key(&(1, 1, 1, "C#1".into())));
        assert!(map.omega_entry.contains_key(&(1, 1, 1, "C#1".into())));
    }

    #[test]
    fn chain_example_agrees_with_the_pairwise_model() {
        let instance = example_chain();
        let (model, map) = build_default(&instance, &BuildOptions::default());
        let sol = solve_exact(&model, &exact()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
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
    fn pair_example_places_each_function_at_its_own_cloud() {
        let instance = example_pair();
        let (model, map) = build_default(&instance, &BuildOptions::default());
        let sol = solve_exact(&model, &exact()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        let asg = sol.assignment.unwrap();
        assert!((asg["y_C"] + asg["y_E"] - 2.0).abs() < 1e-6);
        // The single-host function pins service 1 to E; the delay budget
        // pushes service 2's function onto C.
        assert!((asg["x_k1_s1_E#1"] - 1.0).abs() < 1e-6);
        assert!((asg["x_k2_s1_C#1"] - 1.0).abs() < 1e-6);
        let delay = |k: u32| {
            asg[model.var(map.delays.theta_link[&k]).name.as_str()]
                + asg[model.var(map.delays.theta_node[&k]).name.as_str()]
        };
        assert!((delay(1) - 4.0).abs() < 1e-6);
        assert!((delay(2) - 3.0).abs() < 1e-6);
    }

    #[test]
    fn pair_example_with_hopeless_budget_is_infeasible() {
        let mut instance = example_pair();
        instance.services[1].latency_budget = Rat::from_int(2);
        let (model, _) = build_default(&instance, &BuildOptions::default());
        let sol = solve_exact(&model, &exact()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
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
            cases.push((
                instance,
                BuildOptions { paths: 1 + (seed as usize % 3), ..Default::default() },
            ));
        }
        for (instance, options) in &cases {
            let vnet = VirtualNetwork::build(instance);
            let (model, _) = build_ns2(instance, &vnet, options).unwrap();
            let (nv, nc) = ns2_size(instance, &vnet, options).unwrap();
            assert_eq!(
                (nv, nc),
                (model.num_vars(), model.num_constraints()),
                "size mismatch (paths={})",
                options.paths
            );
        }
    }

    #[test]
    fn aggregated_model_is_smaller_than_pairwise() {
        for (instance, label) in
            [(example_chain(), "chain"), (example_pair(), "pair")]
        {
            let vnet = VirtualNetwork::build(&instance);
            let options = BuildOptions::default();
            let (v1, _) = ns1_size(&instance, &vnet, &options).unwrap();
            let (v2, _) = ns2_size(&instance, &vnet, &options).unwrap();
            assert!(v2 < v1, "{label}: {v2} !< {v1}");
        }
    }

    #[test]
    fn attachment_links_mirror_placements_in_solutions() {
        let instance = example_chain();
        let (model, map) = build_default(&instance, &BuildOptions::default());
        let sol = solve_exact(&model, &exact()).unwrap();
        let asg = sol.assignment.unwrap();
        let value = |id: VarId| asg[model.var(id).name.as_str()];
        let vnet = VirtualNetwork::build(&instance);
        for ((k, s, p, li), &z) in &map.z {
            if !vnet.is_clone_link(*li) {
                continue;
            }
            let l = &vnet.links[*li];
            let (clone, stage) = if vnet.is_clone(&l.from) {
                (l.from.clone(), *s)
            } else {
                (l.to.clone(), *s + 1)
            };
            let x = map.placement.x[&(*k, stage, clone)];
            assert!(
                (value(z) - value(x)).abs() < 1e-6,
                "z on attachment link ({},{}) for k={k} s={s} p={p} diverges from placement",
                l.from,
                l.to
            );
        }
    }

    #[test]
    fn no_services_solves_to_zero() {
        let mut instance = example_chain();
        instance.services.clear();
        let vnet = VirtualNetwork::build(&instance);
        let (model, _) = build_ns2(&instance, &vnet, &BuildOptions::default()).unwrap();
        let sol = solve_exact(&model, &exact()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert_eq!(sol.objective, Some(0.0));
        let (nv, nc) = ns2_size(&instance, &vnet, &BuildOptions::default()).unwrap();
        assert_eq!((nv, nc), (model.num_vars(), model.num_constraints()));
    }
}
