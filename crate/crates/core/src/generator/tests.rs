use std::collections::BTreeSet;

use petgraph::graph::UnGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::canonical::canonical_code;
use crate::miner::{mine, ExtensionMode, MiningConfig, MisMode};
use crate::netgraph::to_e_netgraph;
use crate::petri::tests::net;
use crate::petri::{serialize_cenet, validate_clear, validate_pure};

fn params(events: usize, seed: u64) -> GeneratorParams {
    GeneratorParams { events, seed, ..GeneratorParams::default() }
}

fn exact(min_sup: usize) -> MiningConfig {
    MiningConfig { mis: MisMode::Exact, extension: ExtensionMode::Complete, ..MiningConfig::new(min_sup) }
}

/// A centre event feeding `leaves` events, every label unique.
fn star(leaves: usize) -> PetriNet {
    let mut n = PetriNet::new();
    n.add_event(NodeId(0), Label::new("hub").unwrap()).unwrap();
    n.add_condition(NodeId(1), Label::new("src").unwrap()).unwrap();
    n.add_arc(NodeId(1), NodeId(0));
    for k in 0..leaves as u32 {
        let (c, e) = (NodeId(10 + 2 * k), NodeId(11 + 2 * k));
        n.add_condition(c, Label::new(format!("q{k}")).unwrap()).unwrap();
        n.add_event(e, Label::new(format!("leaf{k}")).unwrap()).unwrap();
        n.add_arc(NodeId(0), c);
        n.add_arc(c, e);
    }
    n
}

#[test]
fn basic_net_counts() {
    let p = GeneratorParams { cond_in: [1, 1], cond_out: [1, 1], ..GeneratorParams::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..20 {
        let n = basic_net(&mut rng, &p).unwrap();
        assert_eq!((n.events().len(), n.conditions().len(), n.arc_count()), (1, 2, 2));
    }
}

#[test]
fn basic_nets_are_pure_and_clear() {
    let p = GeneratorParams { cond_alphabet: 3, ..GeneratorParams::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let n = basic_net(&mut rng, &p).unwrap();
        assert!(validate_pure(&n).is_empty() && validate_clear(&n).is_empty());
        let ins = n.arcs().iter().filter(|(_, d)| *d == NodeId(0)).count();
        assert!((1..=3).contains(&ins) && (1..=3).contains(&(n.arc_count() - ins)));
    }
}

#[test]
fn range_beyond_alphabet_is_rejected() {
    let p = GeneratorParams { cond_in: [3, 3], cond_alphabet: 2, ..GeneratorParams::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert_eq!(basic_net(&mut rng, &p).unwrap_err(), GeneratorError::Alphabet { wanted: 3, alphabet: 2 });
    assert!(generate(&GeneratorParams { events: 0, ..p.clone() }).is_err());
    assert!(generate(&GeneratorParams { cond_out: [2, 1], cond_alphabet: 5, ..p }).is_err());
}

#[test]
fn one_attachment_gives_two_events() {
    let mut seen_merge = false;
    for seed in 0..20 {
        let n = generate(&params(1, seed)).unwrap();
        assert_eq!(n.events().len(), 2);
        seen_merge |= to_e_netgraph(&n).unwrap().edge_count() == 1;
    }
    assert!(seen_merge);
}

#[test]
fn generation_is_deterministic_and_valid() {
    for (seed, overlap) in [(3, OverlapKind::CType), (4, OverlapKind::EType)] {
        let p = GeneratorParams { overlap, ..params(300, seed) };
        let a = generate(&p).unwrap();
        assert_eq!(serialize_cenet(&a), serialize_cenet(&generate(&p).unwrap()));
        assert!(validate_pure(&a).is_empty() && validate_clear(&a).is_empty());
        assert_ne!(serialize_cenet(&a), serialize_cenet(&generate(&params(300, seed + 100)).unwrap()));
    }
}

fn planting_nets(rng: &mut ChaCha8Rng, count: usize) -> Vec<PetriNet> {
    let p = GeneratorParams { event_alphabet: 40, cond_alphabet: 40, ..params(2, 0) };
    let mut out = Vec::new();
    while out.len() < count {
        let n = generate_with(rng, &p).unwrap();
        if to_e_netgraph(&n).unwrap().is_connected() {
            out.push(n);
        }
    }
    out
}

#[test]
fn planted_copies_are_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let nets = planting_nets(&mut rng, 2);
    let spec = PlantSpec { nets, max_events: 3, max_overlaps: 2, min_sup: 3, copy_bound: 4 };
    let (n, truth) = plant(&spec, &params(60, 0), &mut rng).unwrap();
    assert!(validate_pure(&n).is_empty() && validate_clear(&n).is_empty());
    truth.audit(&n).unwrap();
    for p in &truth.patterns {
        assert_eq!((p.c_copies, p.e_copies), (4, 4));
        assert_eq!(p.occurrences.len() + p.broken_copies, 8);
        assert!(p.expected_support >= 4);
        assert!(p.occurrences.iter().filter(|o| o.kind == OverlapKind::CType).count() == 4);
    }
    let ng = to_e_netgraph(&n).unwrap();
    let doc = mine(&ng, &exact(3)).unwrap().to_doc(&ng);
    let verdicts = verify(&truth, &doc);
    assert!(verdicts.iter().all(|v| v.pass), "{verdicts:?}");
    assert_eq!(GroundTruth::from_json(&truth.to_json()).unwrap(), truth);
}

#[test]
fn deleting_a_pattern_fails_verification() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let nets = planting_nets(&mut rng, 1);
    let spec = PlantSpec { nets, max_events: 3, max_overlaps: 2, min_sup: 2, copy_bound: 3 };
    let (n, truth) = plant(&spec, &params(30, 1), &mut rng).unwrap();
    let ng = to_e_netgraph(&n).unwrap();
    let mut doc = mine(&ng, &exact(2)).unwrap().to_doc(&ng);
    for l in &mut doc.levels {
        l.patterns.retain(|p| p.code != truth.patterns[0].code);
    }
    let v = verify(&truth, &doc);
    assert!(!v[0].pass && v[0].found.is_none());
}

#[test]
fn planting_nothing_gives_a_plain_net() {
    let spec = PlantSpec { nets: Vec::new(), max_events: 3, max_overlaps: 2, min_sup: 2, copy_bound: 3 };
    let (n, truth) = plant(&spec, &params(20, 0), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    assert!(truth.patterns.is_empty());
    assert_eq!(
        serialize_cenet(&n),
        serialize_cenet(&generate_with(&mut ChaCha8Rng::seed_from_u64(9), &params(20, 0)).unwrap())
    );
    let ng = to_e_netgraph(&n).unwrap();
    assert!(verify(&truth, &mine(&ng, &exact(2)).unwrap().to_doc(&ng)).is_empty());
}

#[test]
fn planting_rejects_bad_specs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let nets = planting_nets(&mut rng, 1);
    let spec = PlantSpec { nets: nets.clone(), max_events: 3, max_overlaps: 2, min_sup: 3, copy_bound: 3 };
    assert!(matches!(plant(&spec, &params(5, 0), &mut rng), Err(GeneratorError::Infeasible(_))));
    let spec = PlantSpec { nets, max_events: 1, max_overlaps: 2, min_sup: 1, copy_bound: 3 };
    assert!(matches!(plant(&spec, &params(5, 0), &mut rng), Err(GeneratorError::Params(_))));
    let split = net(&[(1, "A"), (2, "B")], &[(3, "P"), (4, "Q")], &[(3, 1), (2, 4)]);
    let spec = PlantSpec { nets: vec![split], max_events: 3, max_overlaps: 2, min_sup: 1, copy_bound: 3 };
    assert!(matches!(plant(&spec, &params(5, 0), &mut rng), Err(GeneratorError::Params(_))));
}

fn shares(n: &PetriNet, a: &[NodeId], b: &[NodeId], events: bool) -> bool {
    let inc = n.incidence();
    let nodes = |ev: &[NodeId]| -> BTreeSet<NodeId> {
        if events {
            ev.iter().copied().collect()
        } else {
            n.event_closure(ev, &inc).unwrap().conditions().keys().copied().collect()
        }
    };
    !nodes(a).is_disjoint(&nodes(b))
}

#[test]
fn schema_with_one_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let big = generate(&params(20, 2)).unwrap();
    let ins = insert_with_overlap_schema(&big, &star(4), 3, &[(0, 1)], &mut rng).unwrap();
    assert_eq!(ins.expected.edges(), [(0, 1)]);
    assert_eq!(crate::miner::exact_mis(ins.expected.adjacency()).len(), 2);
    for (h, j) in [(0, 1), (0, 2), (1, 2)] {
        let want = (h, j) == (0, 1);
        assert_eq!(shares(&ins.net, &ins.copies[h], &ins.copies[j], false), want);
        assert_eq!(shares(&ins.net, &ins.copies[h], &ins.copies[j], true), want);
    }
}

#[test]
fn schema_without_pairs_gives_full_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ins = insert_with_overlap_schema(&PetriNet::new(), &star(3), 4, &[], &mut rng).unwrap();
    let ng = to_e_netgraph(&ins.net).unwrap();
    let code = canonical_code(&to_e_netgraph(&star(3)).unwrap()).unwrap();
    let r = mine(&ng, &exact(2)).unwrap();
    assert_eq!(r.patterns().find(|p| p.code == code).unwrap().support, 4);
}

#[test]
fn mined_overlap_graph_matches_random_schema() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let small = star(9);
    let code = canonical_code(&to_e_netgraph(&small).unwrap()).unwrap();
    for _ in 0..3 {
        let m = 10;
        let pairs: Vec<(usize, usize)> =
            (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).filter(|_| rng.gen_bool(0.2)).collect();
        let big = generate(&params(30, rng.gen())).unwrap();
        let ins = insert_with_overlap_schema(&big, &small, m, &pairs, &mut rng).unwrap();
        for h in 0..m {
            for j in h + 1..m {
                let want = pairs.contains(&(h, j));
                assert_eq!(shares(&ins.net, &ins.copies[h], &ins.copies[j], false), want);
            }
        }
        let ng = to_e_netgraph(&ins.net).unwrap();
        let mis = crate::miner::exact_mis(ins.expected.adjacency()).len();
        let cfg = MiningConfig { keep_overlap: true, max_nodes: Some(10), ..exact(mis) };
        let r = mine(&ng, &cfg).unwrap();
        let p = r.patterns().find(|p| p.code == code).expect("small pattern mined");
        let (embs, og) = p.overlap.as_ref().unwrap();
        assert_eq!(embs.len(), m);
        let as_graph = |edges: Vec<(usize, usize)>| {
            UnGraph::<(), ()>::from_edges(edges.iter().map(|&(a, b)| (a as u32, b as u32)))
        };
        let mut a = as_graph(og.edges());
        let mut b = as_graph(ins.expected.edges());
        while a.node_count() < m {
            a.add_node(());
        }
        while b.node_count() < m {
            b.add_node(());
        }
        assert!(petgraph::algo::is_isomorphic(&a, &b));
        assert_eq!(p.support, mis);
    }
}

#[test]
fn schema_needs_enough_leaves() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let all: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
    let err = insert_with_overlap_schema(&PetriNet::new(), &star(2), 5, &all, &mut rng).unwrap_err();
    assert!(matches!(err, GeneratorError::Unrealizable(_)));
    assert!(insert_with_overlap_schema(&PetriNet::new(), &star(5), 5, &all, &mut rng).is_ok());
    assert!(insert_with_overlap_schema(&PetriNet::new(), &star(5), 5, &[(0, 5)], &mut rng).is_err());
}
