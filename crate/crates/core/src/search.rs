//! Exact and heuristic searches for large progression-free subsets of `Z_4^n`.
//!
//! Elements are addressed by lexicographic rank. Every search keeps a
//! candidate set: the elements `y` such that `A ∪ {y}` is still
//! progression-free.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupVector, PointSet};

/// Largest dimension the searches accept (`4^8` elements).
pub const MAX_SEARCH_DIM: usize = 8;

/// Node budget used when none is given.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exhaustive,
    BranchAndBound,
    Greedy,
    RandomRestart,
}

impl Method {
    pub fn is_randomized(self) -> bool {
        matches!(self, Method::Greedy | Method::RandomRestart)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exhaustive => "exhaustive",
            Method::BranchAndBound => "branch_and_bound",
            Method::Greedy => "greedy",
            Method::RandomRestart => "random_restart",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Method::Exhaustive),
            "bnb" | "branch_and_bound" => Ok(Method::BranchAndBound),
            "greedy" => Ok(Method::Greedy),
            "restart" | "random_restart" => Ok(Method::RandomRestart),
            _ => Err(Error::Domain { what: "search method", value: s.to_string() }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub n: usize,
    pub method: Method,
    pub best_size: usize,
    #[serde(serialize_with = "witness_strings")]
    pub witness: PointSet,
    /// `best_size` is proven maximal.
    pub exact: bool,
    pub nodes_explored: u64,
    pub seed: Option<u64>,
    pub budget: u64,
}

fn witness_strings<S: serde::Serializer>(w: &PointSet, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(w.iter().map(|g| g.to_string()))
}

/// Dense bitset over element ranks.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn full(len: usize) -> Self {
        let mut b = Bits::empty(len);
        for i in 0..len {
            b.insert(i);
        }
        b
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn and_not(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn first(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, w)| **w != 0).map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    /// Clears every index `<= i`.
    fn clear_through(&mut self, i: usize) {
        for k in 0..i / 64 {
            self.0[k] = 0;
        }
        let bit = i % 64;
        self.0[i / 64] &= if bit == 63 { 0 } else { !0u64 << (bit + 1) };
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    k * 64 + t
                })
            })
        })
    }
}

/// Precomputed element table for one dimension.
struct Universe {
    n: usize,
    elems: Vec<GroupVector>,
    /// Members of each `F_n`-coset, by mod-2 key.
    cosets: Vec<Bits>,
}

impl Universe {
    fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_SEARCH_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        let size = 1usize << (2 * n);
        let elems = (0..size as u64).map(|r| GroupVector::from_lex_rank(n, r)).collect::<Result<Vec<_>>>()?;
        let mut cosets = vec![Bits::empty(size); 1 << n];
        for (i, e) in elems.iter().enumerate() {
            cosets[e.coset_key() as usize].insert(i);
        }
        Ok(Universe { n, elems, cosets })
    }

    fn size(&self) -> usize {
        self.elems.len()
    }

    fn rank(&self, g: &GroupVector) -> usize {
        g.lex_rank() as usize
    }

    /// Removes from `cand` everything that would close a progression with
    /// the new element `x` and some `z` already in the set.
    fn prune(&self, cand: &mut Bits, x: usize, set: &[usize]) {
        let gx = self.elems[x];
        for &z in set {
            let gz = self.elems[z];
            cand.remove(self.rank(&gz.double().add_unchecked(&gx.neg())));
            cand.remove(self.rank(&gx.double().add_unchecked(&gz.neg())));
            let s = gx.add_unchecked(&gz);
            if let Some(key) = s.to_binary() {
                cand.and_not(&self.cosets[key as usize]);
            }
        }
        cand.remove(x);
    }

    fn to_set(&self, ranks: &[usize]) -> PointSet {
        PointSet::new(self.n, ranks.iter().map(|&r| self.elems[r])).expect("same dimension")
    }
}

/// Depth-first branch-and-bound inside one subtree.
struct Subtree<'u> {
    u: &'u Universe,
    budget: u64,
    nodes: u64,
    best: Vec<usize>,
    best_len: usize,
    exhausted: bool,
}

impl Subtree<'_> {
    fn run(&mut self, set: &mut Vec<usize>, mut cand: Bits) {
        if self.nodes >= self.budget {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        if set.len() > self.best_len {
            self.best_len = set.len();
            self.best = set.clone();
        }
        while let Some(x) = cand.first() {
            if set.len() + cand.count() <= self.best_len {
                return;
            }
            cand.remove(x);
            let mut next = cand.clone();
            self.u.prune(&mut next, x, set);
            set.push(x);
            self.run(set, next);
            set.pop();
            if self.exhausted {
                return;
            }
        }
    }
}

/// Deterministic greedy: add elements in lexicographic order whenever legal.
fn lex_greedy(u: &Universe) -> Vec<usize> {
    let mut set = Vec::new();
    let mut cand = Bits::full(u.size());
    while let Some(x) = cand.first() {
        u.prune(&mut cand, x, &set);
        set.push(x);
    }
    set
}

struct SubtreeOutcome {
    nodes: u64,
    exhausted: bool,
    best: Vec<usize>,
}

fn explore_subtree(u: &Universe, first: usize, floor: usize, budget: u64) -> SubtreeOutcome {
    // sets {0, first, ...} with every further element after `first`
    let mut cand = Bits::full(u.size());
    u.prune(&mut cand, 0, &[]);
    let legal = cand.contains(first);
    if !legal {
        return SubtreeOutcome { nodes: 0, exhausted: false, best: Vec::new() };
    }
    u.prune(&mut cand, first, &[0]);
    cand.clear_through(first);
    let mut t = Subtree { u, budget, nodes: 0, best: Vec::new(), best_len: floor, exhausted: false };
    t.run(&mut vec![0, first], cand);
    SubtreeOutcome { nodes: t.nodes, exhausted: t.exhausted, best: t.best }
}

/// Exact `r_3(Z_4^n)` by branch-and-bound over sets containing 0.
///
/// The search splits on the second-smallest element. Each subtree is pruned
/// only against its own incumbent and a shared deterministic warm start, so
/// the result, the witness and the node count do not depend on scheduling.
/// The budget is charged to subtrees in order; a subtree that would cross
/// it is rerun with exactly the remaining allowance.
pub fn exact_r3(n: usize, budget: u64) -> Result<SearchResult> {
    let u = Universe::new(n)?;
    let warm = lex_greedy(&u);
    let floor = warm.len();
    let firsts: Vec<usize> = (1..u.size()).collect();
    let mut nodes = 1u64; // the root {0}
    let mut best = warm;
    let mut exact = budget >= 1;
    // Subtrees are solved a batch at a time so a small budget does not pay
    // for the whole tree; batch size only affects wasted work.
    'batches: for batch in firsts.chunks(rayon::current_num_threads().max(1)) {
        let outcomes: Vec<SubtreeOutcome> =
            batch.par_iter().map(|&f| explore_subtree(&u, f, floor, budget)).collect();
        for (&f, out) in batch.iter().zip(outcomes) {
            let remaining = budget.saturating_sub(nodes);
            let out = if out.nodes <= remaining && !out.exhausted {
                out
            } else {
                explore_subtree(&u, f, floor, remaining)
            };
            nodes += out.nodes;
            if out.best.len() > best.len() {
                best = out.best;
            }
            if out.exhausted {
                exact = false;
                break 'batches;
            }
        }
    }
    let witness = u.to_set(&best);
    debug_assert!(witness.is_progression_free());
    Ok(SearchResult {
        n,
        method: Method::BranchAndBound,
        best_size: witness.len(),
        witness,
        exact,
        nodes_explored: nodes,
        seed: None,
        budget,
    })
}

/// Plain enumeration of every subset of `Z_4^n` containing 0, each tested
/// for progressions from scratch. `budget` caps the number of subsets.
pub fn exhaustive_r3(n: usize, budget: u64) -> Result<SearchResult> {
    let u = Universe::new(n)?;
    let others = u.size() - 1;
    let total: u128 = 1u128 << others;
    let mut best: Vec<usize> = vec![0];
    let mut visited = 0u64;
    let mut mask: u128 = 0;
    while mask < total {
        if visited >= budget {
            break;
        }
        visited += 1;
        let count = mask.count_ones() as usize + 1;
        if count > best.len() {
            let ranks: Vec<usize> =
                std::iter::once(0).chain((0..others).filter(|i| mask >> i & 1 == 1).map(|i| i + 1)).collect();
            if u.to_set(&ranks).is_progression_free() {
                best = ranks;
            }
        }
        mask += 1;
    }
    let witness = u.to_set(&best);
    Ok(SearchResult {
        n,
        method: Method::Exhaustive,
        best_size: witness.len(),
        witness,
        exact: (visited as u128) == total,
        nodes_explored: visited,
        seed: None,
        budget,
    })
}

fn random_greedy(u: &Universe, start: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut set = Vec::new();
    let mut cand = Bits::full(u.size());
    for &x in start {
        u.prune(&mut cand, x, &set);
        set.push(x);
    }
    let mut order: Vec<usize> = cand.iter().collect();
    order.shuffle(rng);
    for x in order {
        if cand.contains(x) {
            u.prune(&mut cand, x, &set);
            set.push(x);
        }
    }
    set
}

/// Greedy (one random order) or random-restart local search. `budget`
/// bounds the number of restarts plus perturbation moves.
pub fn heuristic_r3(n: usize, method: Method, seed: u64, budget: u64) -> Result<SearchResult> {
    let u = Universe::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (best, nodes) = match method {
        Method::Greedy => (random_greedy(&u, &[], &mut rng), 1),
        Method::RandomRestart => {
            let rounds = budget.max(1);
            let mut best = random_greedy(&u, &[], &mut rng);
            let mut current = best.clone();
            for round in 1..rounds {
                if round % 64 == 0 {
                    current = random_greedy(&u, &[], &mut rng);
                } else {
                    // drop a few elements, then refill greedily
                    let drop = rng.gen_range(1..=3.min(current.len().max(1)));
                    let mut keep = current.clone();
                    keep.shuffle(&mut rng);
                    keep.truncate(keep.len().saturating_sub(drop));
                    keep.sort_unstable();
                    let next = random_greedy(&u, &keep, &mut rng);
                    if next.len() >= current.len() {
                        current = next;
                    }
                }
                if current.len() > best.len() {
                    best = current.clone();
                }
            }
            (best, rounds)
        }
        _ => return Err(Error::Domain { what: "heuristic method", value: method.to_string() }),
    };
    let witness = u.to_set(&best);
    debug_assert!(witness.is_progression_free());
    Ok(SearchResult {
        n,
        method,
        best_size: witness.len(),
        witness,
        exact: false,
        nodes_explored: nodes,
        seed: Some(seed),
        budget,
    })
}

/// Dispatches on `method`; `seed` is required for the randomized ones.
pub fn search(n: usize, method: Method, seed: Option<u64>, budget: u64) -> Result<SearchResult> {
    let result = match method {
        Method::Exhaustive => exhaustive_r3(n, budget)?,
        Method::BranchAndBound => exact_r3(n, budget)?,
        Method::Greedy | Method::RandomRestart => {
            let seed = seed.ok_or(Error::Domain { what: "seed", value: "missing".into() })?;
            heuristic_r3(n, method, seed, budget)?
        }
    };
    if let Some(p) = result.witness.find_progression() {
        return Err(Error::NotProgressionFree(p.a, p.b, p.c));
    }
    Ok(result)
}
