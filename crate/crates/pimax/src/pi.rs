//! π-arithmetic, enumeration of π-subgroups and π-maximal subgroups up to
//! conjugacy, and the normalizer/quotient verifiers they feed.
//!
//! A π-group is one whose order has all prime divisors inside π; a π-maximal
//! subgroup is maximal by inclusion among π-subgroups. Enumeration proceeds
//! by cyclic extension: level k+1 subgroups adjoin an element of prime order
//! modulo a level-k subgroup inside its normalizer. This is complete for
//! solvable π-subgroups, and solvability is guaranteed (not assumed) before
//! enumeration: two relevant primes suffice by Burnside's p^a·q^b theorem,
//! and beyond that only orders that are solvable by order alone are accepted.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::group::{
    conjugating_element, subgroup_conjugates, AffineElement, ConcreteGroup, QuotientMap, Subgroup,
};
use crate::{Error, Result};

/// A set of primes (π); the complement (π′) is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeSet {
    primes: BTreeSet<u64>,
}

impl PrimeSet {
    pub fn new(primes: impl IntoIterator<Item = u64>) -> Result<Self> {
        let primes: BTreeSet<u64> = primes.into_iter().collect();
        for &q in &primes {
            if !crate::ff::is_prime(q) {
                return Err(Error::PiHypothesis(format!("{q} is not prime")));
            }
        }
        if primes.is_empty() {
            return Err(Error::PiHypothesis("π must be nonempty".into()));
        }
        Ok(PrimeSet { primes })
    }

    pub fn two_three() -> Self {
        PrimeSet { primes: [2, 3].into_iter().collect() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let primes: Vec<u64> = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::PiHypothesis(format!("cannot parse prime {t:?}")))
            })
            .collect::<Result<_>>()?;
        PrimeSet::new(primes)
    }

    pub fn contains(&self, q: u64) -> bool {
        self.primes.contains(&q)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    /// Largest divisor of `n` supported on π.
    pub fn pi_part(&self, n: u64) -> u64 {
        assert!(n >= 1);
        let mut part = 1u64;
        let mut rest = n;
        for &q in &self.primes {
            while rest.is_multiple_of(q) {
                rest /= q;
                part *= q;
            }
        }
        part
    }

    /// True when every prime divisor of `n` lies in π.
    pub fn is_pi_number(&self, n: u64) -> bool {
        self.pi_part(n) == n
    }

    /// True when no prime divisor of `n` lies in π.
    pub fn is_pi_prime_number(&self, n: u64) -> bool {
        self.pi_part(n) == 1
    }
}

impl std::fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.primes.iter().map(|q| q.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Guard for the cyclic-extension enumeration: every π-subgroup must be
/// solvable. Two relevant primes are covered by Burnside; otherwise accept
/// only when every possible π-subgroup order is solvable by order alone
/// (order < 60, odd order, or a prime power).
fn assert_solvable_pi_subgroups(order: u64, pi: &PrimeSet) -> Result<()> {
    let relevant: Vec<u64> = prime_divisors(order)
        .into_iter()
        .filter(|&q| pi.contains(q))
        .collect();
    if relevant.len() <= 2 {
        return Ok(());
    }
    let m = pi.pi_part(order);
    let solvable_by_order = m < 60 || m % 2 == 1 || prime_divisors(m).len() == 1;
    if solvable_by_order {
        Ok(())
    } else {
        Err(Error::SolvabilityUnverified { pi_part: m })
    }
}

/// Order of the coset `y·S` in `N(S)/S`: least k ≥ 1 with `y^k ∈ S`.
fn coset_order(y: &AffineElement, s: &Subgroup) -> u64 {
    let mut acc = y.clone();
    let mut k = 1u64;
    while !s.contains(&acc) {
        acc = acc.compose(y);
        k += 1;
    }
    k
}

/// All π-subgroups of a dense group up to conjugacy, by cyclic extension.
/// Representatives are sorted by (order, fingerprint, canonical generators).
///
/// Deduplication keeps, per representative, the set of all its conjugates
/// (as sorted element lists); a candidate is known iff its element list is
/// one of them. This trades one conjugation orbit per class for a sweep of
/// the whole ambient group per candidate.
pub fn pi_subgroups(g: &ConcreteGroup, pi: &PrimeSet, bound: usize) -> Result<Vec<Subgroup>> {
    g.dense_set()?;
    assert_solvable_pi_subgroups(g.order(), pi)?;
    let trivial = Subgroup::trivial(g.dim(), g.modulus());

    struct RepEntry {
        subgroup: Subgroup,
        fingerprint: Vec<(u64, u64)>,
        conjugates: std::collections::HashSet<Vec<AffineElement>>,
    }
    let entry = |g: &ConcreteGroup, s: Subgroup| -> RepEntry {
        let fingerprint = s.fingerprint();
        let conjugates = subgroup_conjugates(g, &s).into_iter().collect();
        RepEntry { subgroup: s, fingerprint, conjugates }
    };

    let mut reps: Vec<RepEntry> = vec![entry(g, trivial.clone())];
    let mut frontier: Vec<Subgroup> = vec![trivial];
    let pi_cap = pi.pi_part(g.order()) as usize;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for s in &frontier {
            let normalizer = g.normalizer(s, bound)?;
            for y in normalizer.elements().iter() {
                if s.contains(y) {
                    continue;
                }
                let q = coset_order(y, s);
                if !crate::ff::is_prime(q) || !pi.contains(q) {
                    continue;
                }
                let mut gens = s.generators().to_vec();
                gens.push(y.clone());
                let ext = Subgroup::generate(&gens, pi_cap)?;
                debug_assert_eq!(ext.order(), q * s.order());
                let fp = ext.fingerprint();
                let known = reps.iter().any(|r| {
                    r.subgroup.order() == ext.order()
                        && r.fingerprint == fp
                        && r.conjugates.contains(ext.elements().elems())
                });
                if !known {
                    reps.push(entry(g, ext.clone()));
                    next.push(ext);
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<Subgroup> = reps.into_iter().map(|r| r.subgroup).collect();
    out.sort_by(|a, b| {
        (a.order(), a.fingerprint(), a.generators().to_vec())
            .cmp(&(b.order(), b.fingerprint(), b.generators().to_vec()))
    });
    Ok(out)
}

/// One conjugacy class of π-maximal subgroups.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub representative: Subgroup,
    pub class_size: u64,
}

/// Conjugacy-class representatives of the π-maximal subgroups of a group.
#[derive(Debug, Clone)]
pub struct PiMaximalCatalog {
    pub pi: PrimeSet,
    pub parent_order: u64,
    pub entries: Vec<CatalogEntry>,
}

impl PiMaximalCatalog {
    pub fn orders(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.representative.order()).collect()
    }
}

/// π-maximal subgroups up to conjugacy.
///
/// Dense path: maximal-by-inclusion elements among the enumerated
/// π-subgroups. Split path (translation module a π′-group): the catalog of
/// the complement, embedded; by the quotient reduction this is exactly the
/// catalog of the split group, and the two paths agree wherever both apply.
pub fn pi_maximal(g: &ConcreteGroup, pi: &PrimeSet, bound: usize) -> Result<PiMaximalCatalog> {
    if g.is_split() {
        if pi.contains(g.modulus()) {
            return Err(Error::PiHypothesis(format!(
                "split reduction needs a π'-translation module, but {} ∈ π",
                g.modulus()
            )));
        }
        let (q, _) = g.quotient_by_translations()?;
        let inner = pi_maximal(&q, pi, bound)?;
        let entries = inner
            .entries
            .into_iter()
            .map(|e| {
                let class_size = g.order() / g.normalizer_order(&e.representative)?;
                Ok(CatalogEntry { representative: e.representative, class_size })
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(PiMaximalCatalog { pi: pi.clone(), parent_order: g.order(), entries });
    }
    let reps = pi_subgroups(g, pi, bound)?;
    // conjugate element sets of each potential overgroup, built lazily
    let mut conjugate_sets: Vec<Option<Vec<Vec<AffineElement>>>> = vec![None; reps.len()];
    let mut entries = Vec::new();
    'candidates: for (i, cand) in reps.iter().enumerate() {
        for (j, other) in reps.iter().enumerate() {
            if i == j || other.order() <= cand.order() || other.order() % cand.order() != 0 {
                continue;
            }
            let sets = conjugate_sets[j]
                .get_or_insert_with(|| subgroup_conjugates(g, other));
            let contained = sets.iter().any(|set| {
                cand.generators().iter().all(|x| set.binary_search(x).is_ok())
            });
            if contained {
                continue 'candidates;
            }
        }
        let class_size = g.order() / g.normalizer_order(cand)?;
        entries.push(CatalogEntry { representative: cand.clone(), class_size });
    }
    Ok(PiMaximalCatalog { pi: pi.clone(), parent_order: g.order(), entries })
}

/// Is some conjugate of `inner` contained in `outer`?
pub fn contained_up_to_conjugacy(
    g: &ConcreteGroup,
    inner: &Subgroup,
    outer: &Subgroup,
) -> Result<bool> {
    if !outer.order().is_multiple_of(inner.order()) {
        return Ok(false);
    }
    let sweep: Box<dyn Iterator<Item = &AffineElement>> = match g.dense_set() {
        Ok(set) => Box::new(set.iter()),
        Err(_) => Box::new(g.complement()?.iter()),
    };
    for x in sweep {
        if inner.generators().iter().all(|h| outer.contains(&h.conjugate_by(x))) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Is `h` π-maximal in `g`? True iff `h` is a π-subgroup conjugate to a
/// catalog representative.
pub fn is_pi_maximal(g: &ConcreteGroup, h: &Subgroup, pi: &PrimeSet, bound: usize) -> Result<bool> {
    if !pi.is_pi_number(h.order()) || !h.subset_of_group(g) {
        return Ok(false);
    }
    let catalog = pi_maximal(g, pi, bound)?;
    is_in_catalog(g, h, &catalog)
}

/// Conjugacy test of `h` against the representatives of a catalog.
pub fn is_in_catalog(g: &ConcreteGroup, h: &Subgroup, catalog: &PiMaximalCatalog) -> Result<bool> {
    let fp = h.fingerprint();
    for entry in &catalog.entries {
        if entry.representative.order() == h.order()
            && entry.representative.fingerprint() == fp
            && conjugating_element(g, h, &entry.representative)?.is_some()
        {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Verdict of one Wielandt–Hartley check: with `A` subnormal and `K`
/// π-maximal, the quotient `N_A(K∩A)/(K∩A)` must be a π′-group.
#[derive(Debug, Clone, Serialize)]
pub struct WhVerdict {
    pub a_order: u64,
    pub k_order: u64,
    pub intersection_order: u64,
    pub normalizer_order: u64,
    pub index: u64,
    pub index_is_pi_prime: bool,
}

/// Wielandt–Hartley verification. `chain` is a subnormal chain
/// `A = chain[0] ⊴ chain[1] ⊴ … ⊴ gstar`; each normality step is verified.
/// `k` must be a catalog representative of `gstar` (the caller passes the
/// catalog so the π-maximality hypothesis is structural, not re-derived).
pub fn wielandt_hartley_verify(
    gstar: &ConcreteGroup,
    chain: &[&Subgroup],
    k: &Subgroup,
    catalog: &PiMaximalCatalog,
    pi: &PrimeSet,
) -> Result<WhVerdict> {
    assert!(!chain.is_empty());
    for window in chain.windows(2) {
        if !is_normal_in_subgroup(window[0], window[1]) {
            return Err(Error::NotNormal);
        }
    }
    if !gstar.is_normal(chain[chain.len() - 1]) {
        return Err(Error::NotNormal);
    }
    if !catalog.entries.iter().any(|e| e.representative == *k) {
        return Err(Error::PiHypothesis("K must be a π-maximal catalog member".into()));
    }
    let a = chain[0];
    let ka = k.intersect(a);
    let normalizer_count = a
        .elements()
        .iter()
        .filter(|g| ka.generators().iter().all(|x| ka.contains(&x.conjugate_by(g))))
        .count();
    let n_order = normalizer_count as u64;
    let index = n_order / ka.order();
    Ok(WhVerdict {
        a_order: a.order(),
        k_order: k.order(),
        intersection_order: ka.order(),
        normalizer_order: n_order,
        index,
        index_is_pi_prime: pi.is_pi_prime_number(index),
    })
}

fn is_normal_in_subgroup(h: &Subgroup, k: &Subgroup) -> bool {
    h.subset_of(k)
        && k.generators()
            .iter()
            .all(|g| h.generators().iter().all(|x| h.contains(&x.conjugate_by(g))))
}

/// Either a full group or a materialized subgroup, for operations that treat
/// both uniformly.
#[derive(Clone, Copy)]
pub enum GroupRef<'a> {
    Group(&'a ConcreteGroup),
    Sub(&'a Subgroup),
}

impl GroupRef<'_> {
    pub fn contains(&self, e: &AffineElement) -> bool {
        match self {
            GroupRef::Group(g) => g.contains(e),
            GroupRef::Sub(s) => s.contains(e),
        }
    }

    pub fn generators(&self) -> &[AffineElement] {
        match self {
            GroupRef::Group(g) => g.generators(),
            GroupRef::Sub(s) => s.generators(),
        }
    }

    pub fn order(&self) -> u64 {
        match self {
            GroupRef::Group(g) => g.order(),
            GroupRef::Sub(s) => s.order(),
        }
    }
}

/// Image of a subgroup-like object under a quotient map: the closure of the
/// generator images inside the (small) quotient.
pub fn image_in_quotient(
    source: GroupRef<'_>,
    map: &QuotientMap,
    quotient: &ConcreteGroup,
) -> Result<Subgroup> {
    let gen_images: Vec<AffineElement> =
        source.generators().iter().map(|g| map.apply(g)).collect();
    let bound = quotient.order() as usize + 1;
    Subgroup::generate(&gen_images, bound)
}

/// Report for one maximality-transfer check through a quotient.
#[derive(Debug, Clone, Serialize)]
pub struct QuotientTransferReport {
    pub kernel_order: u64,
    pub kernel_is_pi: bool,
    pub kernel_is_pi_prime: bool,
    pub rep_orders: Vec<u64>,
    pub image_orders: Vec<u64>,
    pub all_images_pi_maximal: bool,
    pub images_classwise_distinct: bool,
}

/// For every π-maximal representative `K` of the source group, its image in
/// the quotient must be π-maximal there; the kernel must be a normal π- or
/// π′-subgroup. Also checks that images of distinct classes stay
/// non-conjugate (the class bijection of the reduction theorem, in the
/// direction that is finitely checkable here).
pub fn quotient_preserves_pi_maximality(
    kernel_order: u64,
    catalog: &PiMaximalCatalog,
    quotient: &ConcreteGroup,
    map: &QuotientMap,
    pi: &PrimeSet,
    bound: usize,
) -> Result<QuotientTransferReport> {
    let kernel_is_pi = pi.is_pi_number(kernel_order);
    let kernel_is_pi_prime = pi.is_pi_prime_number(kernel_order);
    if !kernel_is_pi && !kernel_is_pi_prime {
        return Err(Error::PiHypothesis("kernel must be a π-group or a π′-group".into()));
    }
    let quotient_catalog = pi_maximal(quotient, pi, bound)?;
    let mut image_orders = Vec::new();
    let mut all_max = true;
    let mut images: Vec<Subgroup> = Vec::new();
    for entry in &catalog.entries {
        let image = image_in_quotient(GroupRef::Sub(&entry.representative), map, quotient)?;
        image_orders.push(image.order());
        if !is_in_catalog(quotient, &image, &quotient_catalog)? {
            all_max = false;
        }
        images.push(image);
    }
    let mut distinct = true;
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[i].order() == images[j].order()
                && conjugating_element(quotient, &images[i], &images[j])?.is_some()
            {
                distinct = false;
            }
        }
    }
    Ok(QuotientTransferReport {
        kernel_order,
        kernel_is_pi,
        kernel_is_pi_prime,
        rep_orders: catalog.orders(),
        image_orders,
        all_images_pi_maximal: all_max,
        images_classwise_distinct: distinct,
    })
}

/// Report for one intersection-image check through a quotient with π′ kernel.
#[derive(Debug, Clone, Serialize)]
pub struct IntersectionImageReport {
    pub k_order: u64,
    pub g_order: u64,
    pub h_order: u64,
    pub image_h_order: u64,
    pub image_k_order: u64,
    pub image_g_order: u64,
    pub images_agree: bool,
}

/// With `G` normal in `gstar`, the kernel of `map` a normal π′-subgroup, and
/// `K` π-maximal in `gstar`: setting `H = K ∩ G`, the image of `H` must
/// equal `image(K) ∩ image(G)` in the quotient.
pub fn intersection_image_verify(
    gstar: &ConcreteGroup,
    g: GroupRef<'_>,
    k: &Subgroup,
    kernel_order: u64,
    quotient: &ConcreteGroup,
    map: &QuotientMap,
    pi: &PrimeSet,
) -> Result<IntersectionImageReport> {
    if !pi.is_pi_prime_number(kernel_order) {
        return Err(Error::PiHypothesis("kernel must be a π′-group".into()));
    }
    for gen in gstar.generators() {
        for x in g.generators() {
            if !g.contains(&x.conjugate_by(gen)) {
                return Err(Error::NotNormal);
            }
        }
    }
    let h_elems: Vec<AffineElement> =
        k.elements().iter().filter(|e| g.contains(e)).cloned().collect();
    let h = Subgroup::from_sorted_elements(h_elems, vec![]).with_reduced_generators();
    let image_h = image_in_quotient(GroupRef::Sub(&h), map, quotient)?;
    let image_k = image_in_quotient(GroupRef::Sub(k), map, quotient)?;
    let image_g = image_in_quotient(g, map, quotient)?;
    let lhs = image_h.elements().elems();
    let rhs: Vec<AffineElement> = image_k
        .elements()
        .iter()
        .filter(|e| image_g.contains(e))
        .cloned()
        .collect();
    Ok(IntersectionImageReport {
        k_order: k.order(),
        g_order: g.order(),
        h_order: h.order(),
        image_h_order: image_h.order(),
        image_k_order: image_k.order(),
        image_g_order: image_g.order(),
        images_agree: lhs == rhs.as_slice(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn pi_arithmetic() {
        let pi = PrimeSet::two_three();
        assert!(pi.is_pi_number(24));
        assert!(!pi.is_pi_number(168)); // 7 divides it
        assert_eq!(pi.pi_part(1680), 48);
        assert!(pi.is_pi_prime_number(35));
        assert!(pi.is_pi_prime_number(1));
        assert_eq!(PrimeSet::parse("2, 3").unwrap(), pi);
        assert!(PrimeSet::parse("4").is_err());
        assert!(PrimeSet::new([]).is_err());
    }

    #[test]
    fn trivial_group_enumeration() {
        let g = ConcreteGroup::dense_from_generators(
            &[crate::group::AffineElement::identity(2, 5)],
            10,
        )
        .unwrap();
        let reps = pi_subgroups(&g, &PrimeSet::two_three(), 100).unwrap();
        assert_eq!(reps.len(), 1);
        assert!(reps[0].is_trivial());
    }

    #[test]
    fn dihedral_two_subgroups() {
        let d12 = samples::dihedral12();
        let pi2 = PrimeSet::new([2]).unwrap();
        let reps = pi_subgroups(&d12, &pi2, 100).unwrap();
        // 2-subgroups of the order-12 dihedral group up to conjugacy:
        // 1, the central C2, two reflection classes, the Klein four Sylow.
        let orders: Vec<u64> = reps.iter().map(|r| r.order()).collect();
        assert_eq!(orders, vec![1, 2, 2, 2, 4]);
        let catalog = pi_maximal(&d12, &pi2, 100).unwrap();
        assert_eq!(catalog.orders(), vec![4]);
        assert_eq!(catalog.entries[0].class_size, 3);
    }

    #[test]
    fn whole_group_is_pi_maximal_when_it_is_a_pi_group() {
        let d12 = samples::dihedral12();
        let pi = PrimeSet::two_three();
        let catalog = pi_maximal(&d12, &pi, 100).unwrap();
        assert_eq!(catalog.orders(), vec![12]);
        let whole = Subgroup::generate(d12.generators(), 100).unwrap();
        assert!(is_pi_maximal(&d12, &whole, &pi, 100).unwrap());
    }

    #[test]
    fn symmetric4_catalogs() {
        let s4 = samples::symmetric4();
        let sylow2 = pi_maximal(&s4, &PrimeSet::new([2]).unwrap(), 100).unwrap();
        assert_eq!(sylow2.orders(), vec![8]);
        assert_eq!(sylow2.entries[0].class_size, 3);
        let sylow3 = pi_maximal(&s4, &PrimeSet::new([3]).unwrap(), 100).unwrap();
        assert_eq!(sylow3.orders(), vec![3]);
        assert_eq!(sylow3.entries[0].class_size, 4);
        let both = pi_maximal(&s4, &PrimeSet::two_three(), 100).unwrap();
        assert_eq!(both.orders(), vec![24]);
    }

    #[test]
    fn split_and_dense_catalogs_agree_on_the_f7_dihedral_product() {
        let split = samples::split_dihedral_over_f7();
        let pi = PrimeSet::two_three();
        let split_catalog = pi_maximal(&split, &pi, 1000).unwrap();
        let dense = split.materialized(1000).unwrap();
        let dense_catalog = pi_maximal(&dense, &pi, 1000).unwrap();
        assert_eq!(split_catalog.orders(), dense_catalog.orders());
        let mut split_sizes: Vec<u64> =
            split_catalog.entries.iter().map(|e| e.class_size).collect();
        let mut dense_sizes: Vec<u64> =
            dense_catalog.entries.iter().map(|e| e.class_size).collect();
        split_sizes.sort_unstable();
        dense_sizes.sort_unstable();
        assert_eq!(split_sizes, dense_sizes);
        for (s, d) in split_catalog.entries.iter().zip(&dense_catalog.entries) {
            assert!(conjugating_element(&dense, &s.representative, &d.representative)
                .unwrap()
                .is_some());
        }
    }

    #[test]
    fn catalog_is_conjugation_equivariant() {
        let d8 = samples::dihedral8();
        let pi2 = PrimeSet::new([2]).unwrap();
        let catalog = pi_maximal(&d8, &pi2, 100).unwrap();
        // conjugate the whole group by a fixed outside matrix
        let x = crate::group::AffineElement::pure_matrix(&crate::ff::FieldMatrix::from_rows(
            &[&[1, 2], &[0, 1]],
            5,
        ));
        let conj_gens: Vec<_> = d8.generators().iter().map(|g| g.conjugate_by(&x)).collect();
        let d8x = ConcreteGroup::dense_from_generators(&conj_gens, 100).unwrap();
        let catalog_x = pi_maximal(&d8x, &pi2, 100).unwrap();
        assert_eq!(catalog.orders(), catalog_x.orders());
        for (a, b) in catalog.entries.iter().zip(&catalog_x.entries) {
            let moved = a.representative.conjugate_by(&x);
            assert!(conjugating_element(&d8x, &moved, &b.representative).unwrap().is_some());
        }
    }

    #[test]
    fn wielandt_hartley_on_dihedral() {
        let d12 = samples::dihedral12();
        let pi2 = PrimeSet::new([2]).unwrap();
        let catalog = pi_maximal(&d12, &pi2, 100).unwrap();
        let k = &catalog.entries[0].representative;
        // A = the rotation subgroup of order 6, normal in the dihedral group
        let r = d12.dense_set().unwrap().iter().find(|g| g.order() == 6).unwrap().clone();
        let a = Subgroup::generate(&[r], 100).unwrap();
        assert!(d12.is_normal(&a));
        let verdict = wielandt_hartley_verify(&d12, &[&a], k, &catalog, &pi2).unwrap();
        assert!(verdict.index_is_pi_prime, "{verdict:?}");
        // with A = G*, the index is again a π′-number
        let whole = Subgroup::generate(d12.generators(), 100).unwrap();
        let verdict = wielandt_hartley_verify(&d12, &[&whole], k, &catalog, &pi2).unwrap();
        assert!(verdict.index_is_pi_prime);
    }

    #[test]
    fn quotient_transfer_on_dihedral_mod_c3() {
        let d12 = samples::dihedral12();
        let pi2 = PrimeSet::new([2]).unwrap();
        let u = samples::dihedral12_c3(&d12);
        let catalog = pi_maximal(&d12, &pi2, 100).unwrap();
        let (q, map) = d12.coset_quotient(&u).unwrap();
        let report =
            quotient_preserves_pi_maximality(u.order(), &catalog, &q, &map, &pi2, 100).unwrap();
        assert!(report.kernel_is_pi_prime);
        assert!(report.all_images_pi_maximal, "{report:?}");
        assert_eq!(report.image_orders, vec![4]);
    }

    #[test]
    fn intersection_image_on_dihedral() {
        let d12 = samples::dihedral12();
        let pi2 = PrimeSet::new([2]).unwrap();
        let u = samples::dihedral12_c3(&d12);
        let catalog = pi_maximal(&d12, &pi2, 100).unwrap();
        let k = &catalog.entries[0].representative;
        // G = the rotation subgroup of order 6
        let r = d12.dense_set().unwrap().iter().find(|g| g.order() == 6).unwrap().clone();
        let c6 = Subgroup::generate(&[r], 100).unwrap();
        let (q, map) = d12.coset_quotient(&u).unwrap();
        let report =
            intersection_image_verify(&d12, GroupRef::Sub(&c6), k, u.order(), &q, &map, &pi2)
                .unwrap();
        assert!(report.images_agree, "{report:?}");
        assert_eq!(report.h_order, 2);
    }

    #[test]
    fn solvability_guard_rejects_three_large_primes() {
        // π-part 60 with three relevant primes is not solvable by order
        // alone; the guard must refuse rather than silently enumerate.
        let err = assert_solvable_pi_subgroups(60, &PrimeSet::new([2, 3, 5]).unwrap());
        assert_eq!(err, Err(Error::SolvabilityUnverified { pi_part: 60 }));
        assert!(assert_solvable_pi_subgroups(24, &PrimeSet::two_three()).is_ok());
        assert!(assert_solvable_pi_subgroups(30, &PrimeSet::new([2, 3, 5]).unwrap()).is_ok());
    }
}
