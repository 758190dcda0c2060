use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::canonical::{canonical_code, minimal_dfs_traversal};
use crate::netgraph::to_e_netgraph;
use crate::petri::tests::{net, random_net};
use crate::petri::{is_e_complete_subnet, PetriNet};

/// Two copies of P -> A -> Q -> B -> R.
fn two_chains() -> PetriNet {
    net(
        &[(1, "A"), (2, "B"), (11, "A"), (12, "B")],
        &[(3, "P"), (4, "Q"), (5, "R"), (13, "P"), (14, "Q"), (15, "R")],
        &[(3, 1), (1, 4), (4, 2), (2, 5), (13, 11), (11, 14), (14, 12), (12, 15)],
    )
}

fn cfg(min_sup: usize) -> MiningConfig {
    MiningConfig { mis: MisMode::Exact, extension: ExtensionMode::Complete, ..MiningConfig::new(min_sup) }
}

fn codes(r: &MiningResult) -> BTreeMap<String, usize> {
    r.patterns().map(|p| (p.code.clone(), p.support)).collect()
}

/// Every connected node set of up to `cap` nodes, grouped by code, with
/// support from exhaustive search over disjoint subfamilies.
fn oracle(ng: &NetGraph, min_sup: usize, cap: usize) -> BTreeMap<String, usize> {
    let mut sets: BTreeSet<Vec<GNodeId>> = (0..ng.node_count() as GNodeId).map(|g| vec![g]).collect();
    let mut frontier: Vec<Vec<GNodeId>> = sets.iter().cloned().collect();
    while let Some(s) = frontier.pop() {
        if s.len() >= cap {
            continue;
        }
        for &u in &s {
            for &(v, _) in ng.neighbors(u) {
                if !s.contains(&v) {
                    let mut t = s.clone();
                    t.push(v);
                    t.sort_unstable();
                    if sets.insert(t.clone()) {
                        frontier.push(t);
                    }
                }
            }
        }
    }
    let mut groups: BTreeMap<String, Vec<Vec<GNodeId>>> = BTreeMap::new();
    for s in sets {
        groups.entry(canonical_code(&ng.induced(&s)).unwrap()).or_default().push(s);
    }
    fn best(occ: &[Vec<GNodeId>], used: &mut Vec<GNodeId>, i: usize) -> usize {
        if i == occ.len() {
            return 0;
        }
        let skip = best(occ, used, i + 1);
        if occ[i].iter().any(|g| used.contains(g)) {
            return skip;
        }
        let n = used.len();
        used.extend(&occ[i]);
        let take = 1 + best(occ, used, i + 1);
        used.truncate(n);
        skip.max(take)
    }
    groups
        .into_iter()
        .filter_map(|(code, occ)| {
            let s = best(&occ, &mut Vec::new(), 0);
            (s >= min_sup).then_some((code, s))
        })
        .collect()
}

#[test]
fn two_chains_levels_and_early_stop() {
    let ng = to_e_netgraph(&two_chains()).unwrap();
    let r = mine(&ng, &cfg(2)).unwrap();
    assert_eq!(r.noe, 2);
    let l0: Vec<&str> = r.levels[&0].iter().map(|p| p.code.as_str()).collect();
    assert_eq!(l0, ["A<-P+Q>", "B<-Q+R>"]);
    let l1 = &r.levels[&1];
    assert_eq!(l1.len(), 1);
    assert_eq!(l1[0].code, "A<-P+Q>(0,1,f,[+Q-],B<-Q+R>)");
    assert_eq!(l1[0].support, 2);
    assert_eq!(r.levels.len(), 2);
    assert_eq!(r.stop, StopReason::EarlyStop);
    assert_eq!(r.levels_explored.iter().map(|s| s.level).collect::<Vec<_>>(), [0, 1]);
}

#[test]
fn level0_grouping() {
    // A<-P+Q> twice, B<-Q+R> twice, C<-R> once
    let n = net(
        &[(1, "A"), (2, "A"), (3, "B"), (4, "B"), (5, "C")],
        &[(11, "P"), (12, "Q"), (13, "P"), (14, "Q"), (15, "Q"), (16, "R"), (17, "Q"), (18, "R"), (19, "R")],
        &[(11, 1), (1, 12), (13, 2), (2, 14), (15, 3), (3, 16), (17, 4), (4, 18), (19, 5)],
    );
    let ng = to_e_netgraph(&n).unwrap();
    let r = mine(&ng, &cfg(2)).unwrap();
    let l0: Vec<(&str, usize)> = r.levels[&0].iter().map(|p| (p.code.as_str(), p.support)).collect();
    assert_eq!(l0, [("A<-P+Q>", 2), ("B<-Q+R>", 2)]);
    let r = mine(&ng, &cfg(1)).unwrap();
    assert_eq!(r.levels[&0].len(), 3);
    let empty = to_e_netgraph(&PetriNet::new()).unwrap();
    assert_eq!(mine(&empty, &cfg(1)).unwrap().pattern_count(), 0);
}

#[test]
fn copies_sharing_an_event_are_infrequent() {
    // A's output Q is read by two B events: both A-B copies contain A
    let n = net(&[(1, "A"), (2, "B"), (3, "B")], &[(11, "P"), (12, "Q")], &[(11, 1), (1, 12), (12, 2), (12, 3)]);
    let ng = to_e_netgraph(&n).unwrap();
    let r = mine(&ng, &MiningConfig { max_level: Some(1), ..cfg(1) }).unwrap();
    let ab = r.levels[&1].iter().find(|p| p.code.starts_with("A<")).unwrap();
    assert_eq!((ab.candidates, ab.overlap_edges, ab.support), (2, 1, 1));
    let r = mine(&ng, &cfg(2)).unwrap();
    assert!(!r.levels.contains_key(&1));
}

#[test]
fn star_of_identical_edges_has_support_one() {
    // a hub whose output is read by three identical events
    let n = net(&[(1, "H"), (2, "X"), (3, "X"), (4, "X")], &[(10, "Q")], &[(1, 10), (10, 2), (10, 3), (10, 4)]);
    let ng = to_e_netgraph(&n).unwrap();
    let r = mine(&ng, &MiningConfig { max_level: Some(1), ..cfg(1) }).unwrap();
    for p in &r.levels[&1] {
        assert_eq!((p.candidates, p.support), (3, 1), "{}", p.code);
    }
    let r = mine(&ng, &cfg(2)).unwrap();
    assert!(!r.levels.contains_key(&1));
}

#[test]
fn matches_exhaustive_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for round in 0..40 {
        let n = random_net(&mut rng, 12, 14, 36, 2);
        let ng = to_e_netgraph(&n).unwrap();
        for min_sup in [2, 3] {
            let mut c = cfg(min_sup);
            c.max_nodes = Some(4);
            let r = mine(&ng, &c).unwrap();
            let got: BTreeMap<String, usize> =
                r.patterns().filter(|p| p.graph.node_count() <= 4).map(|p| (p.code.clone(), p.support)).collect();
            // the oracle knows nothing of early stop; drop levels mining may skip
            let want: BTreeMap<String, usize> = oracle(&ng, min_sup, 4)
                .into_iter()
                .filter(|(code, _)| {
                    let level = crate::canonical::parse_code(code).unwrap().edge_count();
                    level * min_sup <= ng.edge_count()
                })
                .collect();
            assert_eq!(got, want, "round {round} min_sup {min_sup}");
        }
    }
}

#[test]
fn support_is_anti_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let n = random_net(&mut rng, 12, 14, 36, 2);
        let ng = to_e_netgraph(&n).unwrap();
        let all = oracle(&ng, 1, 5);
        let r = mine(&ng, &cfg(2)).unwrap();
        for p in r.patterns().filter(|p| p.graph.node_count() >= 2) {
            let k = p.graph.node_count() as GNodeId;
            for drop in 0..k {
                let rest: Vec<GNodeId> = (0..k).filter(|&g| g != drop).collect();
                let sub = p.graph.induced(&rest);
                if !sub.is_connected() {
                    continue;
                }
                let code = canonical_code(&sub).unwrap();
                assert!(all[&code] >= p.support, "{code} below child {}", p.code);
            }
        }
    }
}

#[test]
fn complete_mode_covers_paper_mode() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let n = random_net(&mut rng, 16, 18, 50, 2);
        let ng = to_e_netgraph(&n).unwrap();
        let complete = codes(&mine(&ng, &cfg(2)).unwrap());
        let paper = codes(&mine(&ng, &MiningConfig { extension: ExtensionMode::Paper, ..cfg(2) }).unwrap());
        for (code, s) in &paper {
            assert!(complete.get(code).is_some_and(|c| c >= s), "{code}");
        }
    }
}

#[test]
fn deterministic_across_runs_and_thread_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = random_net(&mut rng, 30, 35, 90, 3);
    let ng = to_e_netgraph(&n).unwrap();
    let c = MiningConfig::new(2);
    let a = mine(&ng, &c).unwrap().to_doc(&ng).to_json();
    let b = mine(&ng, &c).unwrap().to_doc(&ng).to_json();
    let s = mine(&ng, &MiningConfig { parallel: false, ..c }).unwrap().to_doc(&ng).to_json();
    assert_eq!(a, b);
    assert_eq!(a, s);
}

#[test]
fn results_respect_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for _ in 0..10 {
        let n = random_net(&mut rng, 20, 24, 60, 2);
        let ng = to_e_netgraph(&n).unwrap();
        let r = mine(&ng, &MiningConfig::new(2)).unwrap();
        for s in &r.levels_explored {
            assert!(s.level * 2 <= r.noe);
        }
        for p in r.patterns() {
            assert_eq!(p.level, p.graph.edge_count());
            assert_eq!(canonical_code(&p.graph).unwrap(), p.code);
            assert_eq!(p.support, p.embeddings.len());
            let mut seen = BTreeSet::new();
            for e in &p.embeddings {
                assert_eq!(e.nodes.len(), p.graph.node_count());
                for g in &e.nodes {
                    assert!(seen.insert(*g), "embeddings share node {g}");
                }
                // node_map preserves taggings and edges
                for (i, &g) in e.node_map.iter().enumerate() {
                    assert_eq!(p.graph.tagging(i as GNodeId), ng.tagging(g));
                }
                for edge in p.graph.edges() {
                    let (u, v) = (e.node_map[edge.a as usize], e.node_map[edge.b as usize]);
                    let big = ng.edge(ng.edge_between(u, v).expect("edge present"));
                    assert_eq!(big.tagging_from(u), &edge.fwd);
                }
            }
        }
        for (pattern, subs) in to_subnets(&r, &ng, &n).unwrap() {
            for s in &subs {
                assert!(is_e_complete_subnet(s, &n));
                assert_eq!(s.events().len(), pattern.events().len());
            }
            for (i, a) in subs.iter().enumerate() {
                for b in &subs[i + 1..] {
                    assert!(a.events().keys().all(|e| !b.events().contains_key(e)));
                }
            }
        }
    }
}

#[test]
fn level_zero_pattern_as_subnet() {
    let ng = to_e_netgraph(&two_chains()).unwrap();
    let r = mine(&ng, &cfg(2)).unwrap();
    let p = &r.levels[&0][0];
    let back = crate::netgraph::from_e_netgraph(&p.graph).unwrap();
    assert_eq!(back, net(&[(0, "A")], &[(1, "P"), (2, "Q")], &[(1, 0), (0, 2)]));
}

#[test]
fn min_sup_above_event_count_finds_nothing() {
    let ng = to_e_netgraph(&two_chains()).unwrap();
    assert_eq!(mine(&ng, &cfg(5)).unwrap().pattern_count(), 0);
    assert_eq!(mine(&ng, &cfg(0)).unwrap_err(), MiningError::ZeroMinSup);
}

#[test]
fn traversal_feeds_level_grouping() {
    let ng = to_e_netgraph(&two_chains()).unwrap();
    let tr = minimal_dfs_traversal(&ng);
    let mut m = Miner::new(&ng, cfg(2)).unwrap();
    assert_eq!(m.level0_patterns(&tr).len(), 2);
    let c = m.level1_candidates(&tr);
    assert_eq!(c.len(), 1);
    assert_eq!(c[0].1.len(), 2);
}
