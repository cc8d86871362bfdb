//! Shared test utilities: an independent brute-force subgroup enumerator
//! used as the oracle for the cyclic-extension path, plus a tiny
//! deterministic generator for randomized sweeps.
//!
//! Everything here is deliberately written against the public element
//! operations only (compose, inverse, contains), independent of the
//! enumeration code under test.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use pimax::group::{close, AffineElement, ConcreteGroup, Subgroup};
use pimax::pi::PrimeSet;

/// xorshift64*: deterministic pseudo-random stream for sweeps.
pub struct XorShift(u64);

impl XorShift {
    pub fn new(seed: u64) -> Self {
        XorShift(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

/// Every subgroup of a small dense group, as sorted element lists: start
/// from all cyclic subgroups and close under pairwise joins.
pub fn all_subgroups_brute(g: &ConcreteGroup) -> Vec<Vec<AffineElement>> {
    let elems = g.dense_set().expect("oracle needs a dense group");
    let order = elems.len();
    // map: sorted element list -> a small generating pair used for joins
    let mut subs: HashMap<Vec<AffineElement>, Vec<AffineElement>> = HashMap::new();
    for e in elems.iter() {
        let cyc = close(std::slice::from_ref(e), order).expect("bounded by the group");
        subs.entry(cyc).or_insert_with(|| vec![e.clone()]);
    }
    loop {
        let snapshot: Vec<(Vec<AffineElement>, Vec<AffineElement>)> =
            subs.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let mut grew = false;
        for i in 0..snapshot.len() {
            for j in i + 1..snapshot.len() {
                if snapshot[i].0.iter().all(|e| snapshot[j].0.binary_search(e).is_ok())
                    || snapshot[j].0.iter().all(|e| snapshot[i].0.binary_search(e).is_ok())
                {
                    continue; // one contains the other; the join is known
                }
                let mut gens = snapshot[i].1.clone();
                gens.extend(snapshot[j].1.iter().cloned());
                let join = close(&gens, order).expect("bounded by the group");
                if let std::collections::hash_map::Entry::Vacant(e) = subs.entry(join) {
                    e.insert(gens);
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let mut out: Vec<Vec<AffineElement>> = subs.into_keys().collect();
    out.sort();
    out
}

/// Conjugacy test written independently of the library's search: sweep every
/// ambient element and compare the full conjugated element lists.
pub fn conjugate_sets_brute(
    g: &ConcreteGroup,
    a: &[AffineElement],
    b: &[AffineElement],
) -> bool {
    if a.len() != b.len() {
        return false;
    }
    for x in g.dense_set().expect("dense").iter() {
        let xinv = x.inverse();
        let mut moved: Vec<AffineElement> =
            a.iter().map(|e| xinv.compose(e).compose(x)).collect();
        moved.sort();
        if moved == b {
            return true;
        }
    }
    false
}

/// Oracle for the π-subgroup enumeration: brute-force all subgroups, filter
/// by π-order, and partition into conjugacy classes by exhaustive sweeps.
pub fn pi_classes_brute(g: &ConcreteGroup, pi: &PrimeSet) -> Vec<Vec<AffineElement>> {
    let all = all_subgroups_brute(g);
    let pi_subs: Vec<Vec<AffineElement>> = all
        .into_iter()
        .filter(|s| pi.is_pi_number(s.len() as u64))
        .collect();
    let mut reps: Vec<Vec<AffineElement>> = Vec::new();
    let mut assigned: HashSet<usize> = HashSet::new();
    for (i, s) in pi_subs.iter().enumerate() {
        if assigned.contains(&i) {
            continue;
        }
        assigned.insert(i);
        for (j, t) in pi_subs.iter().enumerate().skip(i + 1) {
            if !assigned.contains(&j) && conjugate_sets_brute(g, s, t) {
                assigned.insert(j);
            }
        }
        reps.push(s.clone());
    }
    reps
}

/// Compare the library's enumerated class representatives against the
/// brute-force oracle: same class count, same order multiset, and a
/// bijective conjugacy matching.
pub fn enumeration_matches_oracle(g: &ConcreteGroup, pi: &PrimeSet, enumerated: &[Subgroup]) -> bool {
    let oracle = pi_classes_brute(g, pi);
    if oracle.len() != enumerated.len() {
        return false;
    }
    let mut used = vec![false; oracle.len()];
    for rep in enumerated {
        let elems = rep.elements().elems().to_vec();
        let mut matched = false;
        for (i, cls) in oracle.iter().enumerate() {
            if !used[i] && conjugate_sets_brute(g, &elems, cls) {
                used[i] = true;
                matched = true;
                break;
            }
        }
        if !matched {
            return false;
        }
    }
    true
}
