//! Maximum independent sets of overlap graphs.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::OverlapGraph;

/// How independent sets are computed. `Auto(n)` solves connected components
/// of at most `n` vertices exactly and larger ones greedily.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum MisMode {
    Exact,
    Greedy,
    Auto(usize),
}

impl Default for MisMode {
    fn default() -> Self {
        MisMode::Auto(60)
    }
}

impl fmt::Display for MisMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MisMode::Exact => f.write_str("exact"),
            MisMode::Greedy => f.write_str("greedy"),
            MisMode::Auto(n) => write!(f, "auto:{n}"),
        }
    }
}

impl FromStr for MisMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(MisMode::Exact),
            "greedy" => Ok(MisMode::Greedy),
            "auto" => Ok(MisMode::default()),
            _ => match s.strip_prefix("auto:").map(str::parse::<usize>) {
                Some(Ok(n)) if n >= 1 => Ok(MisMode::Auto(n)),
                _ => Err(format!("unknown MIS mode {s:?} (expected exact, greedy or auto:N)")),
            },
        }
    }
}

impl From<MisMode> for String {
    fn from(m: MisMode) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for MisMode {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisOutcome {
    /// Sorted vertex indices.
    pub set: Vec<usize>,
    /// Whether every component was solved exactly.
    pub exact: bool,
}

pub fn max_independent_set(og: &OverlapGraph, mode: MisMode) -> MisOutcome {
    let mut set = Vec::new();
    let mut exact = true;
    for comp in og.components() {
        if comp.len() == 1 {
            set.push(comp[0]);
            continue;
        }
        let solve_exactly = match mode {
            MisMode::Exact => true,
            MisMode::Greedy => false,
            MisMode::Auto(limit) => comp.len() <= limit,
        };
        let local = og.subgraph(&comp);
        let chosen = if solve_exactly { exact_mis(&local) } else { greedy_mis(&local) };
        exact &= solve_exactly;
        set.extend(chosen.into_iter().map(|i| comp[i]));
    }
    set.sort_unstable();
    MisOutcome { set, exact }
}

/// Repeatedly takes a vertex of minimum remaining degree (lowest index on
/// ties) and deletes its closed neighbourhood.
pub fn greedy_mis(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut alive = vec![true; n];
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (degree[v], v)).collect();
    let mut out = Vec::new();
    while let Some((_, v)) = queue.pop_first() {
        out.push(v);
        alive[v] = false;
        for &w in &adj[v] {
            if !alive[w] {
                continue;
            }
            alive[w] = false;
            queue.remove(&(degree[w], w));
            for &x in &adj[w] {
                if alive[x] {
                    queue.remove(&(degree[x], x));
                    degree[x] -= 1;
                    queue.insert((degree[x], x));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Branch and bound: vertices of degree 0 or 1 are taken outright, the
/// bound is a greedy clique cover, and branching picks a vertex of maximum
/// degree (lowest index on ties).
pub fn exact_mis(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let bits: Vec<FixedBitSet> = adj
        .iter()
        .map(|list| {
            let mut b = FixedBitSet::with_capacity(n);
            for &w in list {
                b.insert(w);
            }
            b
        })
        .collect();
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    let mut best = greedy_mis(adj);
    let mut solver = Bnb { adj: &bits, best: &mut best };
    solver.search(all, Vec::new());
    best.sort_unstable();
    best
}

struct Bnb<'a> {
    adj: &'a [FixedBitSet],
    best: &'a mut Vec<usize>,
}

impl Bnb<'_> {
    fn degree(&self, v: usize, cand: &FixedBitSet) -> usize {
        self.adj[v].intersection_count(cand)
    }

    fn search(&mut self, mut cand: FixedBitSet, mut current: Vec<usize>) {
        // forced choices
        loop {
            let forced = cand.ones().find(|&v| self.degree(v, &cand) <= 1);
            let Some(v) = forced else { break };
            current.push(v);
            cand.set(v, false);
            cand.difference_with(&self.adj[v]);
        }
        if cand.is_clear() {
            if current.len() > self.best.len() {
                *self.best = current;
            }
            return;
        }
        if current.len() + self.clique_cover(&cand) <= self.best.len() {
            return;
        }
        let v = cand
            .ones()
            .map(|v| (self.degree(v, &cand), std::cmp::Reverse(v)))
            .max()
            .map(|(_, std::cmp::Reverse(v))| v)
            .unwrap();

        let mut with = cand.clone();
        with.set(v, false);
        with.difference_with(&self.adj[v]);
        let mut taken = current.clone();
        taken.push(v);
        self.search(with, taken);

        cand.set(v, false);
        self.search(cand, current);
    }

    /// Number of cliques in a greedy cover of `cand`; an upper bound on the
    /// independence number.
    fn clique_cover(&self, cand: &FixedBitSet) -> usize {
        let mut cliques: Vec<FixedBitSet> = Vec::new();
        'next: for v in cand.ones() {
            for c in &mut cliques {
                if c.is_subset(&self.adj[v]) {
                    c.insert(v);
                    continue 'next;
                }
            }
            let mut c = FixedBitSet::with_capacity(cand.len());
            c.insert(v);
            cliques.push(c);
        }
        cliques.len()
    }
}
