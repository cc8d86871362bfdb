//! Universal group engine over affine pairs `(w, M)` with `w` a translation
//! vector and `M` an invertible matrix over `F_p`.
//!
//! Conventions, fixed once and used everywhere (including conjugation):
//! column vectors, left action, composition
//! `(w1, M1) · (w2, M2) = (w1 + M1·w2, M1·M2)`,
//! identity `(0, I)`, inverse `(-M⁻¹w, M⁻¹)`, and `x^g = g⁻¹·x·g`.
//! Pure matrix groups are the sub-case `w = 0`.

use std::collections::{HashMap, HashSet};

use crate::ff::{add_mod, sub_mod, FieldMatrix, FieldVector, LinearSystem};
use crate::{Error, Result};

/// Default cap on materialized element sets.
pub const DEFAULT_BOUND: usize = 8_000_000;

/// Byte width of one residue in the canonical encoding.
fn enc_width(p: u64) -> usize {
    let bits = 64 - (p - 1).leading_zeros() as usize;
    bits.div_ceil(8).max(1)
}

/// An element of an affine group over `F_p`: translation part plus matrix
/// part, stored contiguously as `[w (dim), M (dim*dim, row-major)]`.
///
/// Equal elements compare equal bitwise; the derived ordering (modulus,
/// dimension, then residues lexicographically) is the canonical element
/// order used for deterministic iteration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineElement {
    p: u64,
    dim: usize,
    data: Box<[u64]>,
}

impl AffineElement {
    pub fn identity(dim: usize, p: u64) -> Self {
        let mut data = vec![0u64; dim + dim * dim];
        for i in 0..dim {
            data[dim + i * dim + i] = 1 % p;
        }
        AffineElement { p, dim, data: data.into() }
    }

    pub fn new(w: &FieldVector, m: &FieldMatrix) -> Self {
        assert_eq!(w.len(), m.dim());
        assert_eq!(w.modulus(), m.modulus());
        let dim = w.len();
        let mut data = Vec::with_capacity(dim + dim * dim);
        data.extend_from_slice(w.residues());
        data.extend_from_slice(m.residues());
        AffineElement { p: w.modulus(), dim, data: data.into() }
    }

    pub fn pure_matrix(m: &FieldMatrix) -> Self {
        Self::new(&FieldVector::zero(m.dim(), m.modulus()), m)
    }

    pub fn translation(w: &FieldVector) -> Self {
        Self::new(w, &FieldMatrix::identity(w.len(), w.modulus()))
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn translation_part(&self) -> FieldVector {
        FieldVector::from_residues(self.data[..self.dim].to_vec(), self.p)
    }

    pub fn matrix(&self) -> FieldMatrix {
        FieldMatrix::from_residues(self.data[self.dim..].to_vec(), self.dim, self.p)
    }

    pub fn is_pure_matrix(&self) -> bool {
        self.data[..self.dim].iter().all(|&x| x == 0)
    }

    pub fn is_pure_translation(&self) -> bool {
        let (dim, p) = (self.dim, self.p);
        for i in 0..dim {
            for j in 0..dim {
                let want = if i == j { 1 % p } else { 0 };
                if self.data[dim + i * dim + j] != want {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_identity(&self) -> bool {
        self.is_pure_matrix() && self.is_pure_translation()
    }

    /// `(w1, M1) · (w2, M2) = (w1 + M1·w2, M1·M2)`.
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut data = vec![0u64; n + n * n];
        compose_into(self, other, &mut data);
        AffineElement { p: self.p, dim: n, data: data.into() }
    }

    /// `(w, M)⁻¹ = (-M⁻¹·w, M⁻¹)`.
    pub fn inverse(&self) -> Self {
        let minv = self.matrix().inverse().expect("group elements are invertible");
        let w = minv.mat_vec(&self.translation_part()).neg();
        Self::new(&w, &minv)
    }

    /// `x^g = g⁻¹ · x · g`.
    pub fn conjugate_by(&self, g: &Self) -> Self {
        g.inverse().compose(self).compose(g)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.compose(other) == other.compose(self)
    }

    /// Least `k ≥ 1` with `x^k = 1`.
    pub fn order(&self) -> u64 {
        let mut acc = self.clone();
        let mut k = 1u64;
        while !acc.is_identity() {
            acc = acc.compose(self);
            k += 1;
        }
        k
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::identity(self.dim, self.p);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    /// Canonical byte encoding: dimension, then translation residues, then
    /// matrix residues row-major, each residue little-endian fixed-width.
    pub fn encode(&self) -> Vec<u8> {
        let width = enc_width(self.p);
        let mut out = Vec::with_capacity(1 + self.data.len() * width);
        assert!(self.dim < 256);
        out.push(self.dim as u8);
        for &r in self.data.iter() {
            out.extend_from_slice(&r.to_le_bytes()[..width]);
        }
        out
    }

    pub fn encode_hex(&self) -> String {
        self.encode().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn decode_hex(hex: &str, p: u64) -> Result<Self> {
        let parse_err = || Error::Consistency(format!("bad element encoding: {hex}"));
        if !hex.len().is_multiple_of(2) {
            return Err(parse_err());
        }
        let bytes: Vec<u8> = (0..hex.len() / 2)
            .map(|i| u8::from_str_radix(&hex[2 * i..2 * i + 2], 16).map_err(|_| parse_err()))
            .collect::<Result<_>>()?;
        if bytes.is_empty() {
            return Err(parse_err());
        }
        let dim = bytes[0] as usize;
        let width = enc_width(p);
        let count = dim + dim * dim;
        if bytes.len() != 1 + count * width {
            return Err(parse_err());
        }
        let mut data = Vec::with_capacity(count);
        for i in 0..count {
            let mut r = 0u64;
            for (b, &byte) in bytes[1 + i * width..1 + (i + 1) * width].iter().enumerate() {
                r |= (byte as u64) << (8 * b);
            }
            if r >= p {
                return Err(parse_err());
            }
            data.push(r);
        }
        Ok(AffineElement { p, dim, data: data.into() })
    }
}

/// Set-membership key for closure computations. Encodings that fit in 16
/// bytes are packed into a `u128`, which keeps the multi-million element
/// closures compact.
#[derive(PartialEq, Eq, Hash)]
enum Key {
    Small(u128),
    Big(Box<[u8]>),
}

impl Key {
    fn of(e: &AffineElement) -> Key {
        Key::from_raw(&e.data, e.dim, e.p)
    }

    fn from_raw(data: &[u64], dim: usize, p: u64) -> Key {
        let width = enc_width(p);
        let total = 1 + data.len() * width;
        if total <= 16 {
            // pack the canonical encoding straight into a u128, avoiding
            // the byte-vector allocation on the closure hot path
            let mut packed = dim as u128;
            let mut shift = 8u32;
            for &r in data {
                packed |= (r as u128) << shift;
                shift += 8 * width as u32;
            }
            Key::Small(packed)
        } else {
            let mut out = Vec::with_capacity(total);
            assert!(dim < 256);
            out.push(dim as u8);
            for &r in data {
                out.extend_from_slice(&r.to_le_bytes()[..width]);
            }
            Key::Big(out.into())
        }
    }
}

/// A splitmix-style mixer; the closure keys are already injective encodings,
/// so the hasher only has to spread them across buckets.
#[derive(Default)]
struct KeyMixHasher(u64);

impl std::hash::Hasher for KeyMixHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ b as u64).wrapping_mul(0x100_0000_01b3);
        }
    }

    fn write_u64(&mut self, x: u64) {
        let mut h = self.0 ^ x;
        h = h.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        h ^= h >> 30;
        h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h ^= h >> 27;
        self.0 = h;
    }

    fn write_u128(&mut self, x: u128) {
        self.write_u64(x as u64);
        self.write_u64((x >> 64) as u64);
    }

    fn write_usize(&mut self, x: usize) {
        self.write_u64(x as u64);
    }
}

type KeySet = HashSet<Key, std::hash::BuildHasherDefault<KeyMixHasher>>;

/// `(w1, M1) · (w2, M2)` written into a scratch buffer, allocation-free.
/// For small moduli (squares plus a dimension of headroom fit in u64) the
/// accumulation stays in u64; u128 covers the rest.
fn compose_into(a: &AffineElement, b: &AffineElement, out: &mut [u64]) {
    let (n, p) = (a.dim, a.p);
    let w1 = &a.data[..n];
    let m1 = &a.data[n..];
    let w2 = &b.data[..n];
    let m2 = &b.data[n..];
    if p < (1 << 28) && n <= 64 {
        for i in 0..n {
            let mut acc: u64 = w1[i];
            for k in 0..n {
                acc += m1[i * n + k] * w2[k];
            }
            out[i] = acc % p;
        }
        for i in 0..n {
            for j in 0..n {
                let mut acc: u64 = 0;
                for k in 0..n {
                    acc += m1[i * n + k] * m2[k * n + j];
                }
                out[n + i * n + j] = acc % p;
            }
        }
        return;
    }
    for i in 0..n {
        let mut acc: u128 = w1[i] as u128;
        for k in 0..n {
            acc += m1[i * n + k] as u128 * w2[k] as u128;
        }
        out[i] = (acc % p as u128) as u64;
    }
    for i in 0..n {
        for j in 0..n {
            let mut acc: u128 = 0;
            for k in 0..n {
                acc += m1[i * n + k] as u128 * m2[k * n + j] as u128;
            }
            out[n + i * n + j] = (acc % p as u128) as u64;
        }
    }
}

/// Closure of a generator list under composition, capped at `bound`.
/// The result is the full generated subgroup, sorted in canonical order.
pub fn close(generators: &[AffineElement], bound: usize) -> Result<Vec<AffineElement>> {
    assert!(!generators.is_empty(), "closure needs at least one generator");
    let p = generators[0].modulus();
    let dim = generators[0].dim();
    for g in generators {
        if g.modulus() != p {
            return Err(Error::ModulusMismatch { left: p, right: g.modulus() });
        }
        if g.dim() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: g.dim() });
        }
    }
    let mut elems: Vec<AffineElement> = Vec::new();
    let mut seen: KeySet = KeySet::default();
    let id = AffineElement::identity(dim, p);
    seen.insert(Key::of(&id));
    elems.push(id);
    let mut scratch = vec![0u64; dim + dim * dim];
    let mut cursor = 0;
    while cursor < elems.len() {
        let current = elems[cursor].clone();
        for g in generators {
            compose_into(&current, g, &mut scratch);
            if seen.insert(Key::from_raw(&scratch, dim, p)) {
                if elems.len() >= bound {
                    return Err(Error::ClosureOverflow { bound });
                }
                elems.push(AffineElement { p, dim, data: scratch.clone().into() });
            }
        }
        cursor += 1;
    }
    drop(seen);
    elems.sort_unstable();
    Ok(elems)
}

/// A materialized element set in canonical sorted order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseSet {
    elems: Vec<AffineElement>,
}

impl DenseSet {
    pub fn from_sorted(elems: Vec<AffineElement>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        DenseSet { elems }
    }

    pub fn generate(generators: &[AffineElement], bound: usize) -> Result<Self> {
        Ok(DenseSet { elems: close(generators, bound)? })
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, e: &AffineElement) -> bool {
        self.elems.binary_search(e).is_ok()
    }

    pub fn index_of(&self, e: &AffineElement) -> Option<usize> {
        self.elems.binary_search(e).ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, AffineElement> {
        self.elems.iter()
    }

    pub fn elems(&self) -> &[AffineElement] {
        &self.elems
    }
}

/// Structural form of a concrete group.
#[derive(Debug, Clone)]
pub enum Structure {
    /// Fully materialized element set.
    Dense(DenseSet),
    /// Semidirect product of the full translation module `F_p^dim` with a
    /// materialized complement of pure matrix elements.
    Split { complement: DenseSet },
}

/// A finite affine group over `F_p`, either dense or split.
#[derive(Debug, Clone)]
pub struct ConcreteGroup {
    p: u64,
    dim: usize,
    generators: Vec<AffineElement>,
    structure: Structure,
    order: u64,
}

impl ConcreteGroup {
    pub fn dense_from_generators(generators: &[AffineElement], bound: usize) -> Result<Self> {
        let set = DenseSet::generate(generators, bound)?;
        let p = generators[0].modulus();
        let dim = generators[0].dim();
        let order = set.len() as u64;
        Ok(ConcreteGroup { p, dim, generators: generators.to_vec(), structure: Structure::Dense(set), order })
    }

    pub fn dense_from_sorted_elements(elems: Vec<AffineElement>, generators: Vec<AffineElement>) -> Self {
        let p = elems[0].modulus();
        let dim = elems[0].dim();
        let order = elems.len() as u64;
        ConcreteGroup { p, dim, generators, structure: Structure::Dense(DenseSet::from_sorted(elems)), order }
    }

    /// Build `F_p^dim ⋊ Q` from generators of the pure matrix complement Q.
    /// Every element factors uniquely as (translation)·(complement element).
    pub fn split_from_complement(complement_gens: &[AffineElement], bound: usize) -> Result<Self> {
        for g in complement_gens {
            if !g.is_pure_matrix() {
                return Err(Error::Consistency(
                    "split complement generators must be pure matrix elements".into(),
                ));
            }
        }
        let complement = DenseSet::generate(complement_gens, bound)?;
        let p = complement_gens[0].modulus();
        let dim = complement_gens[0].dim();
        let translation_count = (p as u128).pow(dim as u32);
        let order = (translation_count * complement.len() as u128)
            .try_into()
            .map_err(|_| Error::Consistency("split group order exceeds u64".into()))?;
        let mut generators: Vec<AffineElement> = (0..dim)
            .map(|i| AffineElement::translation(&FieldVector::basis(i, dim, p)))
            .collect();
        generators.extend_from_slice(complement_gens);
        Ok(ConcreteGroup { p, dim, generators, structure: Structure::Split { complement }, order })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn generators(&self) -> &[AffineElement] {
        &self.generators
    }

    pub fn is_split(&self) -> bool {
        matches!(self.structure, Structure::Split { .. })
    }

    pub fn dense_set(&self) -> Result<&DenseSet> {
        match &self.structure {
            Structure::Dense(set) => Ok(set),
            Structure::Split { .. } => Err(Error::NonDenseGroup),
        }
    }

    pub fn complement(&self) -> Result<&DenseSet> {
        match &self.structure {
            Structure::Split { complement } => Ok(complement),
            Structure::Dense(_) => Err(Error::NonSplitGroup),
        }
    }

    pub fn contains(&self, e: &AffineElement) -> bool {
        if e.modulus() != self.p || e.dim() != self.dim {
            return false;
        }
        match &self.structure {
            Structure::Dense(set) => set.contains(e),
            Structure::Split { complement } => {
                complement.contains(&AffineElement::pure_matrix(&e.matrix()))
            }
        }
    }

    /// Materialize a split group as a dense one by enumerating the
    /// translation/complement product directly.
    pub fn materialized(&self, bound: usize) -> Result<ConcreteGroup> {
        match &self.structure {
            Structure::Dense(_) => Ok(self.clone()),
            Structure::Split { complement } => {
                if self.order as u128 > bound as u128 {
                    return Err(Error::ClosureOverflow { bound });
                }
                let (p, dim) = (self.p, self.dim);
                let mut elems = Vec::with_capacity(self.order as usize);
                let mut w = vec![0u64; dim];
                loop {
                    for q in complement.iter() {
                        let mut data = Vec::with_capacity(dim + dim * dim);
                        data.extend_from_slice(&w);
                        data.extend_from_slice(&q.data[dim..]);
                        elems.push(AffineElement { p, dim, data: data.into() });
                    }
                    // odometer over F_p^dim
                    let mut i = 0;
                    while i < dim {
                        w[i] += 1;
                        if w[i] < p {
                            break;
                        }
                        w[i] = 0;
                        i += 1;
                    }
                    if i == dim {
                        break;
                    }
                }
                elems.sort_unstable();
                Ok(ConcreteGroup::dense_from_sorted_elements(elems, self.generators.clone()))
            }
        }
    }

    /// The full translation subgroup of a split group, materialized.
    pub fn translation_subgroup(&self, bound: usize) -> Result<Subgroup> {
        if !self.is_split() {
            return Err(Error::NonSplitGroup);
        }
        let count = (self.p as u128).pow(self.dim as u32);
        if count > bound as u128 {
            return Err(Error::ClosureOverflow { bound });
        }
        let gens: Vec<AffineElement> = (0..self.dim)
            .map(|i| AffineElement::translation(&FieldVector::basis(i, self.dim, self.p)))
            .collect();
        let elems = close(&gens, bound)?;
        Ok(Subgroup::from_sorted_elements(elems, gens))
    }

    /// Conjugacy classes of a dense group: representatives are the minimal
    /// canonical element of each class, listed in ascending order.
    pub fn conjugacy_classes(&self) -> Result<Vec<ConjugacyClass>> {
        let set = self.dense_set()?;
        let gens = &self.generators;
        let gen_invs: Vec<AffineElement> = gens.iter().map(|g| g.inverse()).collect();
        let mut visited = vec![false; set.len()];
        let mut classes = Vec::new();
        for start in 0..set.len() {
            if visited[start] {
                continue;
            }
            visited[start] = true;
            let mut orbit = vec![start];
            let mut cursor = 0;
            while cursor < orbit.len() {
                let x = &set.elems()[orbit[cursor]];
                for (g, ginv) in gens.iter().zip(&gen_invs) {
                    let y = ginv.compose(x).compose(g);
                    let idx = set.index_of(&y).expect("conjugate stays in the group");
                    if !visited[idx] {
                        visited[idx] = true;
                        orbit.push(idx);
                    }
                }
                cursor += 1;
            }
            classes.push(ConjugacyClass {
                representative: set.elems()[start].clone(),
                size: orbit.len() as u64,
                member_indices: orbit,
            });
        }
        Ok(classes)
    }

    /// Sylow q-subgroup. Split path: with `q = p` the answer is the
    /// translation module; otherwise the Sylow subgroup of the complement,
    /// embedded. Dense path: normalizer growth from a cyclic q-subgroup,
    /// ties broken by minimal canonical encoding.
    pub fn sylow(&self, q: u64, bound: usize) -> Result<Subgroup> {
        assert!(crate::ff::is_prime(q), "sylow needs a prime");
        match &self.structure {
            Structure::Split { complement } => {
                if q == self.p {
                    if (complement.len() as u64).is_multiple_of(q) {
                        return Err(Error::Consistency(
                            "split Sylow at the module prime needs a p-free complement".into(),
                        ));
                    }
                    self.translation_subgroup(bound)
                } else {
                    let qgroup = ConcreteGroup::dense_from_sorted_elements(
                        complement.elems().to_vec(),
                        self.generators[self.dim..].to_vec(),
                    );
                    qgroup.sylow(q, bound)
                }
            }
            Structure::Dense(set) => sylow_dense(self, set, q, bound),
        }
    }

    /// Normalizer of a subgroup: dense sweep, or the structural translation
    /// computation for embedded subgroups of split groups.
    pub fn normalizer(&self, h: &Subgroup, bound: usize) -> Result<Subgroup> {
        match &self.structure {
            Structure::Dense(set) => {
                let members: Vec<AffineElement> = set
                    .iter()
                    .filter(|g| {
                        let ginv = g.inverse();
                        h.generators()
                            .iter()
                            .all(|x| h.contains(&ginv.compose(x).compose(g)))
                    })
                    .cloned()
                    .collect();
                Ok(Subgroup::from_sorted_elements(members, vec![]).with_reduced_generators())
            }
            Structure::Split { .. } => {
                let (fix, nq) = self.split_normalizer_parts(h)?;
                let mut gens: Vec<AffineElement> =
                    fix.iter().map(AffineElement::translation).collect();
                gens.extend(nq.iter().cloned());
                if gens.is_empty() {
                    gens.push(AffineElement::identity(self.dim, self.p));
                }
                let elems = close(&gens, bound)?;
                Ok(Subgroup::from_sorted_elements(elems, gens))
            }
        }
    }

    /// Order of the normalizer without materializing it (split groups,
    /// embedded subgroups): `|C_V(H)| · |N_Q(H)|`.
    pub fn normalizer_order(&self, h: &Subgroup) -> Result<u64> {
        match &self.structure {
            Structure::Dense(set) => {
                let count = set
                    .iter()
                    .filter(|g| {
                        let ginv = g.inverse();
                        h.generators()
                            .iter()
                            .all(|x| h.contains(&ginv.compose(x).compose(g)))
                    })
                    .count();
                Ok(count as u64)
            }
            Structure::Split { .. } => {
                let (fix, nq) = self.split_normalizer_parts(h)?;
                Ok((self.p as u128).pow(fix.len() as u32) as u64 * nq.len() as u64)
            }
        }
    }

    /// For split G and embedded H (pure matrix elements), the normalizer is
    /// `C_V(H) ⋊ N_Q(H)`: conjugating `(0, S)` by `(w, M)` gives
    /// `((I − M·S·M⁻¹)·w, M·S·M⁻¹)`, so membership needs `M ∈ N_Q(H)` and
    /// `w` fixed by every matrix of `H`.
    fn split_normalizer_parts(&self, h: &Subgroup) -> Result<(Vec<FieldVector>, Vec<AffineElement>)> {
        let complement = self.complement()?;
        if !h.is_embedded() {
            return Err(Error::Consistency(
                "structural normalizer needs an embedded (translation-free) subgroup".into(),
            ));
        }
        let h_mats: Vec<FieldMatrix> = h.elements().iter().map(|e| e.matrix()).collect();
        let fix = fix_space(&h_mats);
        let nq: Vec<AffineElement> = complement
            .iter()
            .filter(|g| {
                let ginv = g.inverse();
                h.generators().iter().all(|x| h.contains(&ginv.compose(x).compose(g)))
            })
            .cloned()
            .collect();
        Ok((fix, nq))
    }

    /// Centralizer by sweep (dense) or structurally (split, embedded H):
    /// `C_G(H) = Fix_V(H) ⋊ C_Q(H)` by the same conjugation formula.
    pub fn centralizer(&self, h: &Subgroup, bound: usize) -> Result<Subgroup> {
        match &self.structure {
            Structure::Dense(set) => {
                let members: Vec<AffineElement> = set
                    .iter()
                    .filter(|g| h.generators().iter().all(|x| x.commutes_with(g)))
                    .cloned()
                    .collect();
                Ok(Subgroup::from_sorted_elements(members, vec![]).with_reduced_generators())
            }
            Structure::Split { complement } => {
                // (w, M) commutes with a generator (u, S) iff M·S = S·M and
                // (I − S)·w = (I − M)·u. Sweep the complement for the matrix
                // part and solve the stacked linear condition for w.
                let (n, p) = (self.dim, self.p);
                let gens: Vec<(FieldVector, FieldMatrix)> = h
                    .generators()
                    .iter()
                    .map(|x| (x.translation_part(), x.matrix()))
                    .collect();
                let mut sys = LinearSystem::zero(gens.len() * n, n, p);
                for (b, (_, s)) in gens.iter().enumerate() {
                    for i in 0..n {
                        for j in 0..n {
                            let mut v = sub_mod(0, s.at(i, j), p);
                            if i == j {
                                v = add_mod(v, 1 % p, p);
                            }
                            sys.set(b * n + i, j, v as i64);
                        }
                    }
                }
                let mut members: Vec<AffineElement> = Vec::new();
                for q in complement.iter() {
                    let m = q.matrix();
                    if !gens.iter().all(|(_, s)| m.mul(s) == s.mul(&m)) {
                        continue;
                    }
                    let id = FieldMatrix::identity(n, p);
                    let i_minus_m = id.sub(&m);
                    let mut rhs = Vec::with_capacity(gens.len() * n);
                    for (u, _) in &gens {
                        rhs.extend_from_slice(i_minus_m.mat_vec(u).residues());
                    }
                    let Some((w0, null)) = sys.solve(&rhs) else {
                        continue;
                    };
                    // enumerate the affine solution set w0 + span(null)
                    let k = null.len();
                    let count = (p as u128).pow(k as u32);
                    if members.len() as u128 + count > bound as u128 {
                        return Err(Error::ClosureOverflow { bound });
                    }
                    let mut coeffs = vec![0u64; k];
                    loop {
                        let mut w = w0.clone();
                        for (c, basis_vec) in coeffs.iter().zip(&null) {
                            w = w.add(&basis_vec.scale(*c));
                        }
                        members.push(AffineElement::new(&w, &m));
                        let mut i = 0;
                        while i < k {
                            coeffs[i] += 1;
                            if coeffs[i] < p {
                                break;
                            }
                            coeffs[i] = 0;
                            i += 1;
                        }
                        if i == k {
                            break;
                        }
                    }
                }
                members.sort_unstable();
                Ok(Subgroup::from_sorted_elements(members, vec![]).with_reduced_generators())
            }
        }
    }

    /// Center of the group. For a split group with faithful complement this
    /// is the set of translations fixed by the whole complement.
    pub fn center(&self, bound: usize) -> Result<Subgroup> {
        match &self.structure {
            Structure::Dense(set) => {
                let members: Vec<AffineElement> = set
                    .iter()
                    .filter(|g| self.generators.iter().all(|x| x.commutes_with(g)))
                    .cloned()
                    .collect();
                Ok(Subgroup::from_sorted_elements(members, vec![]).with_reduced_generators())
            }
            Structure::Split { complement } => {
                // (w, M) central forces M = I (commuting with all translations
                // pointwise-fixes the module) and w fixed by the complement.
                let mats: Vec<FieldMatrix> = complement.iter().map(|e| e.matrix()).collect();
                let fix = fix_space(&mats);
                let mut gens: Vec<AffineElement> =
                    fix.iter().map(AffineElement::translation).collect();
                if gens.is_empty() {
                    gens.push(AffineElement::identity(self.dim, self.p));
                }
                let elems = close(&gens, bound)?;
                Ok(Subgroup::from_sorted_elements(elems, gens))
            }
        }
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        self.generators
            .iter()
            .all(|g| h.generators().iter().all(|x| h.contains(&x.conjugate_by(g))))
    }

    /// Normal closure of a seed set, materialized within `bound`.
    pub fn normal_closure(&self, seeds: &[AffineElement], bound: usize) -> Result<Subgroup> {
        let mut gens: Vec<AffineElement> = if seeds.is_empty() {
            vec![AffineElement::identity(self.dim, self.p)]
        } else {
            seeds.to_vec()
        };
        loop {
            let closed = close(&gens, bound)?;
            let set = DenseSet::from_sorted(closed);
            let mut added = false;
            for g in &self.generators {
                for s in &gens.clone() {
                    let c = s.conjugate_by(g);
                    if !set.contains(&c) {
                        gens.push(c);
                        added = true;
                    }
                }
            }
            if !added {
                return Ok(Subgroup::from_sorted_elements(set.elems().to_vec(), gens));
            }
        }
    }

    /// Quotient of a split group by its translation subgroup: returns the
    /// complement as a dense group together with the forgetful projection.
    pub fn quotient_by_translations(&self) -> Result<(ConcreteGroup, QuotientMap)> {
        let complement = self.complement()?;
        let q = ConcreteGroup::dense_from_sorted_elements(
            complement.elems().to_vec(),
            self.generators[self.dim..].to_vec(),
        );
        Ok((q, QuotientMap::ForgetTranslations))
    }

    /// Quotient of a dense group by a normal subgroup via the left coset
    /// action, realized as permutation matrices of degree `|G : U|`.
    pub fn coset_quotient(&self, u: &Subgroup) -> Result<(ConcreteGroup, QuotientMap)> {
        let set = self.dense_set()?;
        if !self.is_normal(u) {
            return Err(Error::NotNormal);
        }
        let mut coset_of: HashMap<AffineElement, u32> = HashMap::with_capacity(set.len());
        let mut transversal: Vec<AffineElement> = Vec::new();
        for e in set.iter() {
            if coset_of.contains_key(e) {
                continue;
            }
            let id = transversal.len() as u32;
            for x in u.elements().iter() {
                coset_of.insert(e.compose(x), id);
            }
            transversal.push(e.clone());
        }
        let m = transversal.len();
        let map = QuotientMap::CosetAction(CosetData { coset_of, transversal, points: m });
        let mut images: Vec<AffineElement> = set.iter().map(|e| map.apply(e)).collect();
        images.sort_unstable();
        images.dedup();
        let gen_images: Vec<AffineElement> = self.generators.iter().map(|e| map.apply(e)).collect();
        let q = ConcreteGroup::dense_from_sorted_elements(images, gen_images);
        Ok((q, map))
    }

    /// Quotient of a split group with block-diagonal complement matrices by
    /// the translation coordinates `keep..dim`: keeps the leading `keep`
    /// coordinates of translations and the leading block of matrices.
    pub fn block_projection(&self, keep: usize) -> Result<(ConcreteGroup, QuotientMap)> {
        let complement = self.complement()?;
        for e in complement.iter() {
            let m = e.matrix();
            for i in 0..self.dim {
                for j in 0..self.dim {
                    if (i < keep) != (j < keep) && m.at(i, j) != 0 {
                        return Err(Error::Consistency(
                            "block projection needs block-diagonal matrices".into(),
                        ));
                    }
                }
            }
        }
        let map = QuotientMap::BlockProject { keep };
        let mut images: Vec<AffineElement> = complement.iter().map(|e| map.apply(e)).collect();
        images.sort_unstable();
        images.dedup();
        let gen_images: Vec<AffineElement> = self.generators[self.dim..].iter().map(|e| map.apply(e)).collect();
        let q = ConcreteGroup::split_from_complement(&gen_images, images.len() + 1)?;
        Ok((q, map))
    }

    /// The five hypothesis checks making the finite submaximality search
    /// applicable to a split group `G = V ⋊ Q`:
    ///
    /// (a) `V` abelian — automatic for a translation module;
    /// (b) `V` is `G`-irreducible: the orbit of every nonzero vector spans
    ///     `V`, so `V` is a minimal normal subgroup;
    /// (c) `C_G(V) = V`: any further minimal normal subgroup would have to
    ///     centralize `V` (they commute elementwise), land inside `C_G(V) =
    ///     V`, and coincide with `V` by minimality — so `V` is the unique
    ///     minimal normal subgroup;
    /// (d) `V ∩ Z(G) = 1`;
    /// (e) `G/V` is simple and nonabelian, via normal closures of class
    ///     representatives.
    pub fn prop1_hypotheses(&self, bound: usize) -> Result<Prop1Report> {
        let complement = self.complement()?;
        let (p, dim) = (self.p, self.dim);
        let comp_gens: Vec<FieldMatrix> =
            self.generators[dim..].iter().map(|e| e.matrix()).collect();

        // (b) the orbit of each nonzero vector spans V; vectors in one orbit
        // share the same orbit set, so partition V∖{0} into orbits and
        // rank-check each orbit once
        let mut v_irreducible = true;
        let vec_index = |v: &[u64]| -> usize {
            v.iter().rev().fold(0usize, |acc, &e| acc * p as usize + e as usize)
        };
        let total = (p as usize).pow(dim as u32);
        let mut visited = vec![false; total];
        visited[0] = true;
        let mut w = vec![0u64; dim];
        loop {
            let mut i = 0;
            while i < dim {
                w[i] += 1;
                if w[i] < p {
                    break;
                }
                w[i] = 0;
                i += 1;
            }
            if i == dim {
                break;
            }
            if visited[vec_index(&w)] {
                continue;
            }
            let start = FieldVector::from_residues(w.clone(), p);
            visited[vec_index(&w)] = true;
            let mut orbit: Vec<FieldVector> = vec![start];
            let mut cursor = 0;
            while cursor < orbit.len() {
                for m in &comp_gens {
                    let y = m.mat_vec(&orbit[cursor]);
                    let idx = vec_index(y.residues());
                    if !visited[idx] {
                        visited[idx] = true;
                        orbit.push(y);
                    }
                }
                cursor += 1;
            }
            let mut sys = LinearSystem::zero(orbit.len(), dim, p);
            for (r, v) in orbit.iter().enumerate() {
                for (c, &e) in v.residues().iter().enumerate() {
                    sys.set(r, c, e as i64);
                }
            }
            if sys.rank() != dim {
                v_irreducible = false;
                break;
            }
        }

        // (c) sweep the complement for matrices fixing the module pointwise
        let pointwise_fixers = complement.iter().filter(|q| q.matrix().is_identity()).count();
        let centralizer_of_v_is_v = pointwise_fixers == 1;

        // (d) center = translations fixed by the complement
        let center = self.center(bound)?;
        let v_center_trivial = center.order() == 1;

        // (e) quotient simple and nonabelian
        let (q, _) = self.quotient_by_translations()?;
        let classes = q.conjugacy_classes()?;
        let mut quotient_simple = true;
        for class in &classes {
            if class.representative.is_identity() {
                continue;
            }
            let nc = q.normal_closure(std::slice::from_ref(&class.representative), bound)?;
            if nc.order() != q.order() {
                quotient_simple = false;
                break;
            }
        }
        let quotient_nonabelian = q
            .generators()
            .iter()
            .any(|a| q.generators().iter().any(|b| !a.commutes_with(b)));

        Ok(Prop1Report {
            v_abelian: true,
            v_irreducible,
            centralizer_of_v_is_v,
            v_center_trivial,
            quotient_simple,
            quotient_nonabelian,
        })
    }
}

/// Fixed space of a set of matrices: nullspace of the stacked `(M − I)`.
pub fn fix_space(mats: &[FieldMatrix]) -> Vec<FieldVector> {
    assert!(!mats.is_empty());
    let n = mats[0].dim();
    let p = mats[0].modulus();
    let mut sys = LinearSystem::zero(mats.len() * n, n, p);
    for (b, m) in mats.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let mut v = m.at(i, j);
                if i == j {
                    v = sub_mod(v, 1 % p, p);
                }
                sys.set(b * n + i, j, v as i64);
            }
        }
    }
    sys.nullspace()
}

#[derive(Debug, Clone)]
pub struct ConjugacyClass {
    pub representative: AffineElement,
    pub size: u64,
    member_indices: Vec<usize>,
}

impl ConjugacyClass {
    pub fn member_indices(&self) -> &[usize] {
        &self.member_indices
    }
}

/// Hypothesis report for the finite submaximality search.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Prop1Report {
    pub v_abelian: bool,
    pub v_irreducible: bool,
    pub centralizer_of_v_is_v: bool,
    pub v_center_trivial: bool,
    pub quotient_simple: bool,
    pub quotient_nonabelian: bool,
}

impl Prop1Report {
    pub fn all_pass(&self) -> bool {
        self.v_abelian
            && self.v_irreducible
            && self.centralizer_of_v_is_v
            && self.v_center_trivial
            && self.quotient_simple
            && self.quotient_nonabelian
    }
}

/// A materialized subgroup: a small generating set plus the sorted element
/// set. π-subgroups in scope stay below ten thousand elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    generators: Vec<AffineElement>,
    elements: DenseSet,
}

impl Subgroup {
    pub fn trivial(dim: usize, p: u64) -> Self {
        let id = AffineElement::identity(dim, p);
        Subgroup { generators: vec![id.clone()], elements: DenseSet::from_sorted(vec![id]) }
    }

    pub fn generate(generators: &[AffineElement], bound: usize) -> Result<Self> {
        let elems = close(generators, bound)?;
        Ok(Subgroup { generators: generators.to_vec(), elements: DenseSet::from_sorted(elems) })
    }

    pub fn from_sorted_elements(elems: Vec<AffineElement>, generators: Vec<AffineElement>) -> Self {
        Subgroup { generators, elements: DenseSet::from_sorted(elems) }
    }

    /// Replace the generator list by a greedy small generating set.
    pub fn with_reduced_generators(mut self) -> Self {
        let mut gens: Vec<AffineElement> = Vec::new();
        let id = AffineElement::identity(
            self.elements.elems()[0].dim(),
            self.elements.elems()[0].modulus(),
        );
        let mut span = DenseSet::from_sorted(vec![id.clone()]);
        for e in self.elements.iter() {
            if !span.contains(e) {
                gens.push(e.clone());
                span = DenseSet::from_sorted(
                    close(&gens, self.elements.len() + 1).expect("subgroup closure stays bounded"),
                );
                if span.len() == self.elements.len() {
                    break;
                }
            }
        }
        if gens.is_empty() {
            gens.push(id);
        }
        self.generators = gens;
        self
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn generators(&self) -> &[AffineElement] {
        &self.generators
    }

    pub fn elements(&self) -> &DenseSet {
        &self.elements
    }

    pub fn contains(&self, e: &AffineElement) -> bool {
        self.elements.contains(e)
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// True when every element has zero translation part.
    pub fn is_embedded(&self) -> bool {
        self.elements.iter().all(|e| e.is_pure_matrix())
    }

    pub fn subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|e| other.contains(e))
    }

    pub fn subset_of_group(&self, g: &ConcreteGroup) -> bool {
        self.elements.iter().all(|e| g.contains(e))
    }

    /// Conjugacy-invariant fingerprint: group order plus the multiset of
    /// element orders, as sorted `(order, count)` pairs.
    pub fn fingerprint(&self) -> Vec<(u64, u64)> {
        let mut counts: HashMap<u64, u64> = HashMap::new();
        for e in self.elements.iter() {
            *counts.entry(e.order()).or_insert(0) += 1;
        }
        let mut fp: Vec<(u64, u64)> = counts.into_iter().collect();
        fp.sort_unstable();
        fp
    }

    pub fn conjugate_by(&self, g: &AffineElement) -> Subgroup {
        let gens: Vec<AffineElement> = self.generators.iter().map(|x| x.conjugate_by(g)).collect();
        let mut elems: Vec<AffineElement> =
            self.elements.iter().map(|x| x.conjugate_by(g)).collect();
        elems.sort_unstable();
        Subgroup { generators: gens, elements: DenseSet::from_sorted(elems) }
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        let elems: Vec<AffineElement> = self
            .elements
            .iter()
            .filter(|e| other.contains(e))
            .cloned()
            .collect();
        Subgroup::from_sorted_elements(elems, vec![]).with_reduced_generators()
    }

    /// Elements of this subgroup that lie in an ambient group.
    pub fn intersect_group(&self, g: &ConcreteGroup) -> Subgroup {
        let elems: Vec<AffineElement> = self
            .elements
            .iter()
            .filter(|e| g.contains(e))
            .cloned()
            .collect();
        Subgroup::from_sorted_elements(elems, vec![]).with_reduced_generators()
    }
}

/// Search the ambient group for an element conjugating `a` onto `b`.
/// Both subgroups must be materialized; the ambient group is swept in
/// canonical order and the first conjugator is returned.
pub fn conjugating_element(
    ambient: &ConcreteGroup,
    a: &Subgroup,
    b: &Subgroup,
) -> Result<Option<AffineElement>> {
    if a.order() != b.order() {
        return Ok(None);
    }
    match &ambient.structure {
        Structure::Dense(set) => {
            for g in set.iter() {
                let ginv = g.inverse();
                if a.generators().iter().all(|x| b.contains(&ginv.compose(x).compose(g))) {
                    return Ok(Some(g.clone()));
                }
            }
            Ok(None)
        }
        Structure::Split { complement } => {
            // For embedded subgroups, conjugation by (w, M) moves matrix
            // parts by M alone, and w can be taken zero: sweep the complement.
            if !a.is_embedded() || !b.is_embedded() {
                return Err(Error::Consistency(
                    "split conjugacy search needs embedded subgroups".into(),
                ));
            }
            for g in complement.iter() {
                let ginv = g.inverse();
                if a.generators().iter().all(|x| b.contains(&ginv.compose(x).compose(g))) {
                    return Ok(Some(g.clone()));
                }
            }
            Ok(None)
        }
    }
}

/// All conjugates of a subgroup under the ambient group, as sorted element
/// lists: breadth-first closure under conjugation by the ambient generators.
/// Cheap when the subgroup class is small; used to batch conjugacy and
/// containment tests during enumeration.
pub fn subgroup_conjugates(g: &ConcreteGroup, s: &Subgroup) -> Vec<Vec<AffineElement>> {
    let gens: Vec<(AffineElement, AffineElement)> =
        g.generators().iter().map(|gen| (gen.inverse(), gen.clone())).collect();
    let start = s.elements().elems().to_vec();
    let mut seen: HashSet<Vec<AffineElement>> = HashSet::new();
    seen.insert(start.clone());
    let mut queue = vec![start];
    let mut cursor = 0;
    while cursor < queue.len() {
        for (ginv, gen) in &gens {
            let mut moved: Vec<AffineElement> =
                queue[cursor].iter().map(|e| ginv.compose(e).compose(gen)).collect();
            moved.sort_unstable();
            if !seen.contains(&moved) {
                seen.insert(moved.clone());
                queue.push(moved);
            }
        }
        cursor += 1;
    }
    queue
}

fn sylow_dense(
    group: &ConcreteGroup,
    set: &DenseSet,
    q: u64,
    bound: usize,
) -> Result<Subgroup> {
    let order = set.len() as u64;
    let mut q_part = 1u64;
    let mut rest = order;
    while rest.is_multiple_of(q) {
        rest /= q;
        q_part *= q;
    }
    let (dim, p) = (group.dim(), group.modulus());
    if q_part == 1 {
        return Ok(Subgroup::trivial(dim, p));
    }
    // seed: first element (canonical order) of order divisible by q,
    // powered up to a q-element
    let seed = set
        .iter()
        .find_map(|e| {
            let o = e.order();
            if o % q == 0 {
                let mut qk = 1u64;
                let mut r = o;
                while r % q == 0 {
                    r /= q;
                    qk *= q;
                }
                Some(e.pow(o / qk))
            } else {
                None
            }
        })
        .expect("q divides the group order, so a q-element exists");
    let mut current = Subgroup::generate(&[seed], bound)?;
    while current.order() < q_part {
        let normalizer = group.normalizer(&current, bound)?;
        let mut grown = false;
        for y in normalizer.elements().iter() {
            if current.contains(y) {
                continue;
            }
            let o = y.order();
            let mut is_q_element = true;
            let mut r = o;
            while r > 1 {
                if r % q != 0 {
                    is_q_element = false;
                    break;
                }
                r /= q;
            }
            if !is_q_element {
                continue;
            }
            let mut gens = current.generators().to_vec();
            gens.push(y.clone());
            match close(&gens, q_part as usize) {
                Ok(elems) => {
                    let n = elems.len() as u64;
                    if is_power_of(n, q) {
                        current = Subgroup::from_sorted_elements(elems, gens);
                        grown = true;
                        break;
                    }
                }
                Err(Error::ClosureOverflow { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        if !grown {
            return Err(Error::Consistency(format!(
                "sylow growth stalled at order {} of target {q_part}",
                current.order()
            )));
        }
    }
    Ok(current)
}

fn is_power_of(mut n: u64, q: u64) -> bool {
    if n == 0 {
        return false;
    }
    while n.is_multiple_of(q) {
        n /= q;
    }
    n == 1
}

#[derive(Debug, Clone)]
pub struct CosetData {
    coset_of: HashMap<AffineElement, u32>,
    transversal: Vec<AffineElement>,
    points: usize,
}

/// Group homomorphism used to push subgroups into a quotient.
#[derive(Debug, Clone)]
pub enum QuotientMap {
    /// The identity map (quotient by the trivial subgroup).
    Identity,
    /// `(w, M) ↦ (0, M)` on a split group; kernel is the translation module.
    ForgetTranslations,
    /// Projection onto the leading `keep` coordinates for block-diagonal
    /// split groups; kernel is the trailing translation block.
    BlockProject { keep: usize },
    /// Left coset action of a dense group modulo a normal subgroup,
    /// realized by permutation matrices.
    CosetAction(CosetData),
}

impl QuotientMap {
    pub fn apply(&self, e: &AffineElement) -> AffineElement {
        match self {
            QuotientMap::Identity => e.clone(),
            QuotientMap::ForgetTranslations => AffineElement::pure_matrix(&e.matrix()),
            QuotientMap::BlockProject { keep } => {
                let (keep, p) = (*keep, e.modulus());
                let w = e.translation_part();
                let m = e.matrix();
                let wq = FieldVector::from_residues(w.residues()[..keep].to_vec(), p);
                let mut mq = FieldMatrix::zero(keep, p);
                for i in 0..keep {
                    for j in 0..keep {
                        mq.set(i, j, m.at(i, j));
                    }
                }
                AffineElement::new(&wq, &mq)
            }
            QuotientMap::CosetAction(data) => {
                let p = e.modulus();
                let m = data.points;
                let mut perm = FieldMatrix::zero(m, p);
                for (i, t) in data.transversal.iter().enumerate() {
                    let image = e.compose(t);
                    let j = *data
                        .coset_of
                        .get(&image)
                        .expect("coset action is defined on the whole group");
                    perm.set(j as usize, i, 1);
                }
                AffineElement::pure_matrix(&perm)
            }
        }
    }

    /// Exact set image of a materialized subgroup.
    pub fn map_subgroup(&self, h: &Subgroup) -> Subgroup {
        let mut elems: Vec<AffineElement> = h.elements().iter().map(|e| self.apply(e)).collect();
        elems.sort_unstable();
        elems.dedup();
        Subgroup::from_sorted_elements(elems, vec![]).with_reduced_generators()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::quadratic_roots_x2_x_2;

    fn mat_a(p: u64) -> AffineElement {
        let (alpha, beta) = quadratic_roots_x2_x_2(p).unwrap().unwrap();
        AffineElement::pure_matrix(&FieldMatrix::from_rows(
            &[
                &[1, alpha.value() as i64, beta.value() as i64],
                &[0, -1, 0],
                &[0, 0, -1],
            ],
            p,
        ))
    }

    fn mat_b(p: u64) -> AffineElement {
        AffineElement::pure_matrix(&FieldMatrix::from_rows(
            &[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]],
            p,
        ))
    }

    /// Dihedral group of order 12 inside GL_2(F_13): rotation of order 6
    /// (4 is a primitive 6th root of unity mod 13) and a reflection.
    fn dihedral12() -> ConcreteGroup {
        let r = AffineElement::pure_matrix(&FieldMatrix::from_rows(&[&[4, 0], &[0, 10]], 13));
        let s = AffineElement::pure_matrix(&FieldMatrix::from_rows(&[&[0, 1], &[1, 0]], 13));
        assert_eq!(r.order(), 6);
        assert_eq!(s.order(), 2);
        ConcreteGroup::dense_from_generators(&[r, s], 100).unwrap()
    }

    #[test]
    fn closure_of_b_has_three_elements() {
        let b = mat_b(11);
        assert_eq!(close(&[b], 100).unwrap().len(), 3);
    }

    #[test]
    fn closure_of_a_b_is_the_168_element_group() {
        let elems = close(&[mat_a(11), mat_b(11)], 1000).unwrap();
        assert_eq!(elems.len(), 168);
    }

    #[test]
    fn closure_with_translations_reaches_the_semidirect_product() {
        let mut gens = vec![mat_a(11), mat_b(11)];
        for i in 0..3 {
            gens.push(AffineElement::translation(&FieldVector::basis(i, 3, 11)));
        }
        let elems = close(&gens, 300_000).unwrap();
        assert_eq!(elems.len(), 223_608); // 168 · 11^3
    }

    #[test]
    fn closure_overflow_reports_bound() {
        let gens = vec![mat_a(11), mat_b(11)];
        assert_eq!(close(&gens, 100), Err(Error::ClosureOverflow { bound: 100 }));
    }

    #[test]
    fn closure_is_idempotent() {
        let elems = close(&[mat_b(11)], 100).unwrap();
        let again = close(&elems, 100).unwrap();
        assert_eq!(elems, again);
    }

    #[test]
    fn element_orders_match_the_defining_relations() {
        let a = mat_a(11);
        let b = mat_b(11);
        assert_eq!(AffineElement::identity(3, 11).order(), 1);
        assert_eq!(a.order(), 2);
        assert_eq!(b.order(), 3);
        assert_eq!(a.compose(&b).order(), 7);
        let comm = a.inverse().compose(&b.inverse()).compose(&a).compose(&b);
        assert_eq!(comm.order(), 4);
    }

    #[test]
    fn composition_convention_round_trips() {
        let g = AffineElement::new(
            &FieldVector::from_residues(vec![1, 2, 3], 11),
            &mat_a(11).matrix(),
        );
        assert!(g.compose(&g.inverse()).is_identity());
        assert!(g.inverse().compose(&g).is_identity());
        let h = mat_b(11);
        let x = g.compose(&h);
        assert_eq!(x.conjugate_by(&h), h.inverse().compose(&x).compose(&h));
    }

    #[test]
    fn encoding_round_trips_and_orders_consistently() {
        let g = AffineElement::new(
            &FieldVector::from_residues(vec![5, 0, 7], 11),
            &mat_b(11).matrix(),
        );
        let hex = g.encode_hex();
        assert_eq!(AffineElement::decode_hex(&hex, 11).unwrap(), g);
        let h = mat_a(11);
        assert_eq!(g < h, g.encode() < h.encode());
    }

    #[test]
    fn packed_keys_equal_the_byte_encoding() {
        for e in close(&[mat_a(11), mat_b(11)], 1000).unwrap().iter().take(50) {
            let packed = match Key::of(e) {
                Key::Small(v) => v,
                Key::Big(_) => panic!("dimension-3 elements pack into a u128"),
            };
            let mut buf = [0u8; 16];
            let enc = e.encode();
            buf[..enc.len()].copy_from_slice(&enc);
            assert_eq!(packed, u128::from_le_bytes(buf));
        }
        // a dimension-6 element exceeds 16 bytes and falls back to bytes
        let big = AffineElement::identity(6, 11);
        assert!(matches!(Key::of(&big), Key::Big(_)));
    }

    #[test]
    fn dihedral_conjugacy_classes() {
        let d12 = dihedral12();
        assert_eq!(d12.order(), 12);
        let classes = d12.conjugacy_classes().unwrap();
        // D6 (order 12) has 6 classes: 1, r^3, {r, r^5}, {r^2, r^4},
        // two reflection classes of size 3.
        assert_eq!(classes.len(), 6);
        let mut sizes: Vec<u64> = classes.iter().map(|c| c.size).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 2, 2, 3, 3]);
        assert_eq!(classes.iter().map(|c| c.size).sum::<u64>(), 12);
    }

    #[test]
    fn trivial_group_has_one_class() {
        let g = ConcreteGroup::dense_from_generators(&[AffineElement::identity(2, 5)], 10).unwrap();
        let classes = g.conjugacy_classes().unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].size, 1);
    }

    #[test]
    fn orbit_stabilizer_on_dihedral() {
        let d12 = dihedral12();
        for class in d12.conjugacy_classes().unwrap() {
            let cyclic = Subgroup::generate(std::slice::from_ref(&class.representative), 100).unwrap();
            let cent = d12.centralizer(&cyclic, 100).unwrap();
            assert_eq!(class.size * cent.order(), d12.order());
        }
    }

    #[test]
    fn sylow_orders_divide_out_exactly() {
        let d12 = dihedral12();
        let s2 = d12.sylow(2, 100).unwrap();
        assert_eq!(s2.order(), 4);
        let s3 = d12.sylow(3, 100).unwrap();
        assert_eq!(s3.order(), 3);
        let s5 = d12.sylow(5, 100).unwrap();
        assert_eq!(s5.order(), 1);
    }

    #[test]
    fn sylow_on_the_168_element_group() {
        let l = ConcreteGroup::dense_from_generators(&[mat_a(11), mat_b(11)], 1000).unwrap();
        let s2 = l.sylow(2, 1000).unwrap();
        assert_eq!(s2.order(), 8);
        let n = l.normalizer(&s2, 1000).unwrap();
        assert_eq!(n.order(), 8); // self-normalizing
        assert_eq!(l.sylow(5, 1000).unwrap().order(), 1);
        assert!(!l.is_normal(&s2));
    }

    #[test]
    fn split_group_basics() {
        let g = ConcreteGroup::split_from_complement(&[mat_a(11), mat_b(11)], 1000).unwrap();
        assert_eq!(g.order(), 223_608);
        assert!(g.is_split());
        let v = g.translation_subgroup(10_000).unwrap();
        assert_eq!(v.order(), 1331);
        assert!(g.is_normal(&v));
        let s11 = g.sylow(11, 10_000).unwrap();
        assert_eq!(s11.order(), 1331);
        let (q, map) = g.quotient_by_translations().unwrap();
        assert_eq!(q.order(), 168);
        assert_eq!(map.map_subgroup(&v).order(), 1);
    }

    #[test]
    fn split_and_dense_normalizers_agree_on_small_subgroups() {
        let split = ConcreteGroup::split_from_complement(&[mat_a(11), mat_b(11)], 1000).unwrap();
        let dense = split.materialized(300_000).unwrap();
        assert_eq!(dense.order(), split.order());
        for q in [2u64, 3, 7] {
            let h = split.sylow(q, 10_000).unwrap();
            if q == 7 {
                assert_eq!(h.order(), 7);
            }
            let split_order = split.normalizer_order(&h).unwrap();
            let dense_order = dense.normalizer_order(&h).unwrap();
            assert_eq!(split_order, dense_order);
        }
    }

    #[test]
    fn centralizer_of_translations_is_the_translation_module() {
        let split = ConcreteGroup::split_from_complement(&[mat_a(11), mat_b(11)], 1000).unwrap();
        let v = split.translation_subgroup(10_000).unwrap();
        let c_split = split.centralizer(&v, 10_000).unwrap();
        assert_eq!(c_split.order(), 1331);
        // cross-check by dense sweep
        let dense = split.materialized(300_000).unwrap();
        let c_dense = dense.centralizer(&v, 300_000).unwrap();
        assert_eq!(c_dense.order(), 1331);
        assert!(c_split.elements().elems() == c_dense.elements().elems());
    }

    #[test]
    fn normal_closure_of_identity_is_trivial() {
        let d12 = dihedral12();
        let nc = d12
            .normal_closure(&[AffineElement::identity(2, 13)], 100)
            .unwrap();
        assert!(nc.is_trivial());
    }

    #[test]
    fn normal_closure_detects_simplicity_failure() {
        let d12 = dihedral12();
        // the rotation subgroup is normal
        let r = d12
            .generators()
            .iter()
            .find(|g| g.order() == 6)
            .unwrap()
            .clone();
        let nc = d12.normal_closure(&[r], 100).unwrap();
        assert_eq!(nc.order(), 6);
        assert!(d12.is_normal(&nc));
    }

    #[test]
    fn coset_quotient_of_dihedral_by_rotation_cube() {
        let d12 = dihedral12();
        let r2 = d12
            .dense_set()
            .unwrap()
            .iter()
            .find(|g| g.order() == 3)
            .unwrap()
            .clone();
        let u = Subgroup::generate(&[r2], 100).unwrap();
        assert!(d12.is_normal(&u));
        let (q, map) = d12.coset_quotient(&u).unwrap();
        assert_eq!(q.order(), 4);
        // homomorphism property spot check
        for a in d12.dense_set().unwrap().iter().take(12) {
            for b in d12.dense_set().unwrap().iter().take(12) {
                assert_eq!(map.apply(&a.compose(b)), map.apply(a).compose(&map.apply(b)));
            }
        }
    }

    #[test]
    fn prop1_hypotheses_hold_for_the_semidirect_product() {
        let g = ConcreteGroup::split_from_complement(&[mat_a(11), mat_b(11)], 1000).unwrap();
        let report = g.prop1_hypotheses(10_000).unwrap();
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn prop1_hypotheses_fail_for_a_direct_product() {
        // block-diagonal embedding with trivial action on the first three
        // coordinates: the leading translations are central
        let p = 11;
        let lift = |m: &AffineElement| {
            let small = m.matrix();
            let mut big = FieldMatrix::identity(6, p);
            for i in 0..3 {
                for j in 0..3 {
                    big.set(3 + i, 3 + j, small.at(i, j));
                }
                big.set(i, i, 1);
            }
            AffineElement::pure_matrix(&big)
        };
        let g = ConcreteGroup::split_from_complement(&[lift(&mat_a(p)), lift(&mat_b(p))], 1000)
            .unwrap();
        let report = g.prop1_hypotheses(2_000_000).unwrap();
        assert!(!report.v_irreducible);
        assert!(!report.v_center_trivial); // V meets the center
        assert!(!report.all_pass());
    }

    #[test]
    fn block_projection_recovers_the_leading_block() {
        let p = 11;
        let embed = |m: &AffineElement| {
            let small = m.matrix();
            let mut big = FieldMatrix::identity(6, p);
            for i in 0..3 {
                for j in 0..3 {
                    big.set(i, j, small.at(i, j));
                    big.set(3 + i, 3 + j, small.at(i, j));
                }
            }
            AffineElement::pure_matrix(&big)
        };
        let h = ConcreteGroup::split_from_complement(&[embed(&mat_a(p)), embed(&mat_b(p))], 1000)
            .unwrap();
        let (g, map) = h.block_projection(3).unwrap();
        assert_eq!(g.dim(), 3);
        assert_eq!(g.order(), 223_608);
        let e = AffineElement::new(
            &FieldVector::from_residues(vec![1, 2, 3, 4, 5, 6], p),
            &embed(&mat_b(p)).matrix(),
        );
        let img = map.apply(&e);
        assert_eq!(img.translation_part().residues(), &[1, 2, 3]);
    }
}
