use std::cmp::Ordering;

use petgraph::graph::DiGraph;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::netgraph::{to_e_netgraph, GNode};
use crate::petri::tests::{net, random_net};

fn graph(nodes: &[&str], edges: &[(u32, u32, &str)]) -> NetGraph {
    NetGraph::new(
        nodes.iter().map(|t| GNode { tagging: t.parse().unwrap(), origin: None }).collect(),
        edges.iter().map(|&(u, v, t)| (u, v, t.parse().unwrap())).collect(),
    )
    .unwrap()
}

/// Every DFS code of a connected graph under the same emission rule, with
/// any unvisited neighbour allowed as the next forward step.
fn all_codes(ng: &NetGraph) -> Vec<ParsedComponent> {
    fn go(
        ng: &NetGraph,
        index: &mut Vec<Option<usize>>,
        stack: &mut Vec<GNodeId>,
        comp: ParsedComponent,
        out: &mut Vec<ParsedComponent>,
    ) {
        if let Some(&cur) = stack.last() {
            let next: Vec<(GNodeId, usize)> =
                ng.neighbors(cur).iter().copied().filter(|&(w, _)| index[w as usize].is_none()).collect();
            if next.is_empty() {
                let saved = stack.pop().unwrap();
                go(ng, index, stack, comp.clone(), out);
                stack.push(saved);
                return;
            }
            for (w, e) in next {
                let mut c = comp.clone();
                let ni = index.iter().flatten().count();
                let from = index[cur as usize].unwrap();
                c.units.push(ParsedUnit {
                    from,
                    to: ni,
                    direction: Direction::Forward,
                    edge: ng.edge(e).tagging_from(cur).clone(),
                    node: Some(ng.tagging(w).clone()),
                });
                index[w as usize] = Some(ni);
                let mut back: Vec<(usize, usize)> = ng
                    .neighbors(w)
                    .iter()
                    .filter(|&&(x, _)| x != cur)
                    .filter_map(|&(x, e2)| index[x as usize].map(|i| (i, e2)))
                    .collect();
                back.sort();
                for (i, e2) in back {
                    c.units.push(ParsedUnit {
                        from: ni,
                        to: i,
                        direction: Direction::Backward,
                        edge: ng.edge(e2).tagging_from(w).clone(),
                        node: None,
                    });
                }
                stack.push(w);
                go(ng, index, stack, c, out);
                stack.pop();
                index[w as usize] = None;
            }
            return;
        }
        out.push(comp);
    }
    let mut out = Vec::new();
    for s in 0..ng.node_count() as GNodeId {
        let mut index = vec![None; ng.node_count()];
        index[s as usize] = Some(0);
        let comp = ParsedComponent { start: ng.tagging(s).clone(), units: Vec::new() };
        go(ng, &mut index, &mut vec![s], comp, &mut out);
    }
    out
}

fn brute_min(ng: &NetGraph) -> ParsedComponent {
    all_codes(ng).into_iter().min().unwrap()
}

/// Directed copy with both orientations so VF2 can match oriented taggings.
fn digraph(ng: &NetGraph) -> DiGraph<String, String> {
    let mut g = DiGraph::new();
    let ids: Vec<_> = ng.nodes().iter().map(|n| g.add_node(n.tagging.to_string())).collect();
    for e in ng.edges() {
        g.add_edge(ids[e.a as usize], ids[e.b as usize], e.fwd.to_string());
        g.add_edge(ids[e.b as usize], ids[e.a as usize], e.rev.to_string());
    }
    g
}

fn random_connected(rng: &mut ChaCha8Rng, events: u32, alpha: u32) -> Option<NetGraph> {
    let n = random_net(rng, events, events + 2, events * 3, alpha);
    let ng = to_e_netgraph(&n).unwrap();
    let biggest = ng.components().into_iter().max_by_key(|c| c.len())?;
    (biggest.len() >= 2).then(|| ng.induced(&biggest))
}

#[test]
fn single_node() {
    let ng = graph(&["A<-P+Q>"], &[]);
    let tr = minimal_dfs_traversal(&ng);
    assert_eq!(tr.min_e0.len(), 1);
    assert!(tr.min_e1.is_empty());
    assert_eq!(tr.noe, 0);
    assert_eq!(canonical_code(&ng).unwrap(), "A<-P+Q>");
}

#[test]
fn path_starts_at_smaller_tagging() {
    let n = net(&[(1, "B"), (2, "A")], &[(3, "P"), (4, "Q"), (5, "R")], &[(3, 2), (2, 4), (4, 1), (1, 5)]);
    let ng = to_e_netgraph(&n).unwrap();
    let tr = minimal_dfs_traversal(&ng);
    assert_eq!(tr.noe, 1);
    assert_eq!(tr.min_e0[0].tagging.to_string(), "A<-P+Q>");
    assert_eq!(tr.code(), "A<-P+Q>(0,1,f,[+Q-],B<-Q+R>)");
    assert_eq!(parse_code(&tr.code()).unwrap().components[0], brute_min(&ng));
}

#[test]
fn triangle_of_equal_nodes_matches_brute_force() {
    let ng = graph(&["A<-P+P>"; 3], &[(0, 1, "[-P+]"), (1, 2, "[-P-]"), (0, 2, "[+P+]")]);
    let code = canonical_code(&ng).unwrap();
    assert_eq!(parse_code(&code).unwrap().components, vec![brute_min(&ng)]);
    assert_eq!(code, "A<-P+P>(0,1,f,[-P-],A<-P+P>)(1,2,f,[+P-],A<-P+P>)(2,0,b,[+P+])");
    for perm in [[1, 2, 0], [2, 1, 0], [0, 2, 1]] {
        assert_eq!(canonical_code(&ng.permuted(&perm)).unwrap(), code);
    }
}

#[test]
fn matches_brute_force_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 150 {
        let Some(ng) = random_connected(&mut rng, 6, 2) else { continue };
        let ours = parse_code(&canonical_code(&ng).unwrap()).unwrap();
        assert_eq!(ours.components, vec![brute_min(&ng)]);
        checked += 1;
    }
}

#[test]
fn equal_codes_iff_isomorphic() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut graphs = Vec::new();
    while graphs.len() < 60 {
        if let Some(ng) = random_connected(&mut rng, 4, 2) {
            graphs.push(ng);
        }
    }
    let codes: Vec<String> = graphs.iter().map(|g| canonical_code(g).unwrap()).collect();
    let mut same = 0;
    for i in 0..graphs.len() {
        for j in i + 1..graphs.len() {
            let iso = petgraph::algo::is_isomorphic_matching(
                &digraph(&graphs[i]),
                &digraph(&graphs[j]),
                |a, b| a == b,
                |a, b| a == b,
            );
            assert_eq!(iso, codes[i] == codes[j], "{} vs {}", codes[i], codes[j]);
            same += usize::from(iso);
        }
    }
    assert!(same > 0, "sample should contain isomorphic pairs");
}

#[test]
fn permutation_invariance_and_completeness() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let n = random_net(&mut rng, 20, 25, 60, 3);
        let ng = to_e_netgraph(&n).unwrap();
        let tr = minimal_dfs_traversal(&ng);
        assert!(tr.exact);
        assert_eq!(tr.noe, ng.edge_count());
        let mut seen: Vec<usize> = tr.min_e1.iter().map(|e| e.edge).collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), ng.edge_count());
        let mut nodes: Vec<GNodeId> = tr.min_e0.iter().map(|r| r.gnode).collect();
        nodes.sort_unstable();
        assert_eq!(nodes, (0..ng.node_count() as GNodeId).collect::<Vec<_>>());
        for r in &tr.min_e1 {
            match r.direction {
                Direction::Forward => assert!(r.to_index > r.from_index),
                Direction::Backward => assert!(r.to_index < r.from_index),
            }
        }

        let code = tr.code();
        for _ in 0..5 {
            let mut perm: Vec<GNodeId> = (0..ng.node_count() as GNodeId).collect();
            perm.shuffle(&mut rng);
            assert_eq!(minimal_dfs_traversal(&ng.permuted(&perm)).code(), code);
        }
    }
}

#[test]
fn mutated_label_changes_code() {
    let a = net(&[(1, "A"), (2, "B")], &[(3, "P"), (4, "Q")], &[(3, 1), (1, 4), (4, 2)]);
    let b = net(&[(1, "A"), (2, "B")], &[(3, "R"), (4, "Q")], &[(3, 1), (1, 4), (4, 2)]);
    let ca = canonical_code(&to_e_netgraph(&a).unwrap()).unwrap();
    let cb = canonical_code(&to_e_netgraph(&b).unwrap()).unwrap();
    assert_ne!(ca, cb);
}

#[test]
fn disconnected_and_empty_patterns_rejected() {
    let ng = graph(&["A<>", "B<>"], &[]);
    assert_eq!(canonical_code(&ng), Err(CodeError::Disconnected));
    assert_eq!(canonical_code(&graph(&[], &[])), Err(CodeError::Empty));
    // a full traversal still covers both components, smaller code first
    assert_eq!(minimal_dfs_traversal(&ng).code(), "A<>|B<>");
}

#[test]
fn bounded_traversal_still_covers_everything() {
    let ng = graph(&["A<-P+P>"; 3], &[(0, 1, "[-P+]"), (1, 2, "[-P-]"), (0, 2, "[+P+]")]);
    let tr = minimal_dfs_traversal_bounded(&ng, 0);
    assert!(!tr.exact);
    assert_eq!(tr.noe, 3);
    assert!(minimal_dfs_traversal_bounded(&ng, 100).exact);
}

#[test]
fn compare_is_structural() {
    assert_eq!(code_compare("A<>", "A<>"), Ok(Ordering::Equal));
    // '-' sorts before '+' although the bytes say otherwise
    assert_eq!(code_compare("A<-P>", "A<+P>"), Ok(Ordering::Less));
    let back = "A<-P+P>(0,1,f,[-P-],A<-P+P>)(1,0,b,[+P+])";
    let fwd = "A<-P+P>(0,1,f,[-P-],A<-P+P>)(1,2,f,[+P-],A<-P+P>)";
    assert_eq!(code_compare(back, fwd), Ok(Ordering::Less));
    let prefix = "A<-P+P>(0,1,f,[-P-],A<-P+P>)";
    assert_eq!(code_compare(prefix, fwd), Ok(Ordering::Less));
    // numeric, not textual, indices
    let nine = "A<>(9,10,f,[-P-],A<>)";
    let ten = "A<>(10,11,f,[-P-],A<>)";
    assert_eq!(code_compare(nine, ten), Ok(Ordering::Less));
    assert!(matches!(code_compare("A<>(0,1,x,[-P-])", "A<>"), Err(CodeError::Malformed(_))));
    assert!(parse_code("").is_err());
}
