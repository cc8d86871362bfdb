//! The submaximality engine: builds the semidirect product `G = V ⋊ L`, the
//! automorphism-group model `V ⋊ (C × L)`, the tower of intermediate groups
//! indexed by divisors of `p − 1`, and decides π-submaximality by finite
//! search through the tower. On top of that sit the certified batteries:
//! the Sylow-2 refutation, the quotient-image counterexample, and the
//! missing-preimage counterexample.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::ff::FieldMatrix;
use crate::group::{
    close, conjugating_element, AffineElement, ConcreteGroup, Prop1Report, QuotientMap, Subgroup,
};
use crate::pi::{self, is_in_catalog, pi_maximal, PiMaximalCatalog, PrimeSet, WhVerdict};
use crate::rep::{
    automorphisms_of_l, build_block_extension, build_rep_x, normalizer_in_gl, AutomorphismSet,
    BlockExtension, NormalizerGlReport, Representation, SourceModel,
};
use crate::{Error, Result};

/// Least primitive root mod p (brute scan; the moduli in scope are small).
pub fn least_primitive_root(p: u64) -> u64 {
    let mut factors = Vec::new();
    let mut m = p - 1;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            factors.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    'outer: for g in 2..p {
        for &q in &factors {
            if crate::ff::pow_mod(g, (p - 1) / q, p) == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("every prime has a primitive root")
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    out.sort_unstable();
    out
}

/// The fundamental objects at one prime: the source group with its
/// representation and automorphisms.
pub struct Base {
    pub source: SourceModel,
    pub x: Representation,
    pub auts: AutomorphismSet,
}

/// The automorphism-group model `V ⋊ (C × L)` together with the results of
/// its internal consistency checks.
pub struct AutModel {
    pub group: ConcreteGroup,
    pub scalar_gen: AffineElement,
    pub report: AutModelReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct AutModelReport {
    pub order: u64,
    pub scalar_order: u64,
    pub scalar_centralizes_image: bool,
    pub scalar_meets_image_trivially: bool,
    pub scalar_acts_fixed_point_freely: bool,
    pub quotient_order: u64,
    pub quotient_is_direct_product: bool,
    pub g_is_normal: bool,
    pub centralizer_of_g_trivial: bool,
    pub agrees_with_gl_normalizer: bool,
}

/// The heavyweight half of the model verification: materialize the model by
/// closing its generators (confirming the structural order) and sweep every
/// element for the centralizer of the base group.
#[derive(Debug, Clone, Serialize)]
pub struct ModelSweep {
    pub closure_count: u64,
    pub centralizer_order_by_sweep: u64,
}

/// One intermediate group `G ≤ G* ≤ Aut(G)`, generated by `G` and a power
/// of the scalar generator.
pub struct TowerMember {
    pub divisor: u64,
    pub group: ConcreteGroup,
}

/// The full interval of groups between `G` and the automorphism model; the
/// quotient is cyclic of order `p − 1`, so the members correspond exactly to
/// the divisors of `p − 1`.
pub struct Tower {
    pub members: Vec<TowerMember>,
}

/// Lazily-built shared state for one prime; every check battery draws from
/// here so repeated verifications reuse the same constructions.
pub struct Session {
    p: u64,
    bound: usize,
    base: OnceLock<Result<Arc<Base>>>,
    norm_gl: OnceLock<Result<Arc<NormalizerGlReport>>>,
    g: OnceLock<Result<Arc<ConcreteGroup>>>,
    g_dense: OnceLock<Result<Arc<ConcreteGroup>>>,
    model: OnceLock<Result<Arc<AutModel>>>,
    sweep: OnceLock<Result<Arc<ModelSweep>>>,
    tower: OnceLock<Result<Arc<Tower>>>,
    block: OnceLock<Result<Arc<BlockExtension>>>,
    catalogs: Mutex<HashMap<(u64, String), Arc<PiMaximalCatalog>>>,
    l_catalogs: Mutex<HashMap<String, Arc<PiMaximalCatalog>>>,
    ext_catalogs: Mutex<HashMap<String, Arc<PiMaximalCatalog>>>,
}

impl Session {
    pub fn new(p: u64, bound: usize) -> Self {
        Session {
            p,
            bound,
            base: OnceLock::new(),
            norm_gl: OnceLock::new(),
            g: OnceLock::new(),
            g_dense: OnceLock::new(),
            model: OnceLock::new(),
            sweep: OnceLock::new(),
            tower: OnceLock::new(),
            block: OnceLock::new(),
            catalogs: Mutex::new(HashMap::new()),
            l_catalogs: Mutex::new(HashMap::new()),
            ext_catalogs: Mutex::new(HashMap::new()),
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn base(&self) -> Result<Arc<Base>> {
        self.base
            .get_or_init(|| {
                let (source, x) = build_rep_x(self.p)?;
                let auts = automorphisms_of_l(&source)?;
                Ok(Arc::new(Base { source, x, auts }))
            })
            .clone()
    }

    pub fn gl_normalizer(&self) -> Result<Arc<NormalizerGlReport>> {
        self.norm_gl
            .get_or_init(|| {
                let base = self.base()?;
                Ok(Arc::new(normalizer_in_gl(&base.source, &base.x, &base.auts)?))
            })
            .clone()
    }

    /// `G = V ⋊ L` in split form.
    pub fn g(&self) -> Result<Arc<ConcreteGroup>> {
        self.g
            .get_or_init(|| {
                let base = self.base()?;
                let g = ConcreteGroup::split_from_complement(
                    base.source.group().generators(),
                    self.bound,
                )?;
                let report = g.prop1_hypotheses(self.bound)?;
                if !report.all_pass() {
                    return Err(Error::Consistency(format!(
                        "hypothesis checks failed on the base group: {report:?}"
                    )));
                }
                let center = g.center(self.bound)?;
                if center.order() != 1 {
                    return Err(Error::Consistency("base group has nontrivial center".into()));
                }
                Ok(Arc::new(g))
            })
            .clone()
    }

    /// Dense materialization of `G` (order `168·p³`).
    pub fn g_dense(&self) -> Result<Arc<ConcreteGroup>> {
        self.g_dense
            .get_or_init(|| {
                let g = self.g()?;
                Ok(Arc::new(g.materialized(self.bound)?))
            })
            .clone()
    }

    pub fn aut_model(&self) -> Result<Arc<AutModel>> {
        self.model
            .get_or_init(|| Ok(Arc::new(build_aut_model(self)?)))
            .clone()
    }

    /// Materialize the model by closure and sweep it exhaustively for the
    /// centralizer of the base group (cached; this is the expensive check).
    pub fn model_sweep(&self) -> Result<Arc<ModelSweep>> {
        self.sweep
            .get_or_init(|| {
                let model = self.aut_model()?;
                let g = self.g()?;
                let closed = close(model.group.generators(), self.bound)?;
                if closed.len() as u64 != model.group.order() {
                    return Err(Error::Consistency(format!(
                        "closure found {} elements, structural order is {}",
                        closed.len(),
                        model.group.order()
                    )));
                }
                let g_gens = g.generators().to_vec();
                let count = closed
                    .iter()
                    .filter(|e| g_gens.iter().all(|x| x.commutes_with(e)))
                    .count();
                if count != 1 {
                    return Err(Error::Consistency(
                        "exhaustive sweep found a nontrivial centralizer".into(),
                    ));
                }
                Ok(Arc::new(ModelSweep {
                    closure_count: closed.len() as u64,
                    centralizer_order_by_sweep: count as u64,
                }))
            })
            .clone()
    }

    pub fn tower(&self) -> Result<Arc<Tower>> {
        self.tower
            .get_or_init(|| Ok(Arc::new(build_tower(self)?)))
            .clone()
    }

    pub fn block(&self) -> Result<Arc<BlockExtension>> {
        self.block
            .get_or_init(|| {
                let base = self.base()?;
                Ok(Arc::new(build_block_extension(
                    &base.source,
                    &base.x,
                    base.auts.canonical_outer(),
                )?))
            })
            .clone()
    }

    /// π-maximal catalog of one tower member, cached.
    pub fn member_catalog(&self, member: &TowerMember, pi: &PrimeSet) -> Result<Arc<PiMaximalCatalog>> {
        let key = (member.divisor, pi.to_string());
        if let Some(hit) = self.catalogs.lock().expect("lock").get(&key) {
            return Ok(hit.clone());
        }
        let catalog = Arc::new(pi_maximal(&member.group, pi, self.bound)?);
        self.catalogs.lock().expect("lock").insert(key, catalog.clone());
        Ok(catalog)
    }

    /// π-maximal catalog of the 168-element source group, cached.
    pub fn l_catalog(&self, pi: &PrimeSet) -> Result<Arc<PiMaximalCatalog>> {
        let key = pi.to_string();
        if let Some(hit) = self.l_catalogs.lock().expect("lock").get(&key) {
            return Ok(hit.clone());
        }
        let base = self.base()?;
        let catalog = Arc::new(pi_maximal(base.source.group(), pi, self.bound)?);
        self.l_catalogs.lock().expect("lock").insert(key, catalog.clone());
        Ok(catalog)
    }

    /// π-maximal catalog of the 336-element extension group, cached.
    pub fn ext_catalog(&self, pi: &PrimeSet) -> Result<Arc<PiMaximalCatalog>> {
        let key = pi.to_string();
        if let Some(hit) = self.ext_catalogs.lock().expect("lock").get(&key) {
            return Ok(hit.clone());
        }
        let block = self.block()?;
        let catalog = Arc::new(pi_maximal(&block.extension, pi, self.bound)?);
        self.ext_catalogs.lock().expect("lock").insert(key, catalog.clone());
        Ok(catalog)
    }
}

fn build_aut_model(session: &Session) -> Result<AutModel> {
    let p = session.prime();
    let base = session.base()?;
    let g = session.g()?;
    let c = least_primitive_root(p);
    let scalar_gen = AffineElement::pure_matrix(&FieldMatrix::scalar(c, 3, p));
    let mut comp_gens = base.source.group().generators().to_vec();
    comp_gens.push(scalar_gen.clone());
    let model = ConcreteGroup::split_from_complement(&comp_gens, session.bound())?;
    let complement = model.complement()?;

    let scalar_matrices: Vec<&AffineElement> =
        complement.iter().filter(|e| e.matrix().is_scalar()).collect();
    let scalar_centralizes_image = complement
        .iter()
        .all(|q| scalar_gen.commutes_with(q));
    // scalars inside the image copy would be central there; only 1 allowed
    let image_scalars = base
        .source
        .elements_bfs()
        .iter()
        .filter(|e| e.matrix().is_scalar())
        .count();
    let scalar_meets_image_trivially = image_scalars == 1;
    // a scalar λ fixes a nonzero vector iff λ = 1, so the action on V∖{0}
    // is fixed-point-free exactly when the scalar cycle has full length p−1
    let mut cycle_len = 1u64;
    let mut power = c;
    while power != 1 {
        power = crate::ff::mul_mod(power, c, p);
        cycle_len += 1;
    }
    let scalar_acts_fixed_point_freely = cycle_len == p - 1;

    let (quotient, _) = model.quotient_by_translations()?;
    let quotient_is_direct_product = {
        let image_order = base.source.order() as u64;
        let product_order = (p - 1) * image_order;
        scalar_matrices.len() as u64 == p - 1
            && quotient.order() == product_order
            && scalar_centralizes_image
            && scalar_meets_image_trivially
    };

    let g_is_normal = model
        .generators()
        .iter()
        .all(|m| g.generators().iter().all(|x| g.contains(&x.conjugate_by(m))));

    // centralizer of G inside the model, structurally: commuting with all
    // translations forces the matrix part to be the identity, and the
    // translation part must then be fixed by the image generators. The
    // exhaustive dense sweep is a separate, heavier verification; see
    // [`Session::model_sweep`].
    let centralizer_trivial = {
        let mats: Vec<FieldMatrix> =
            base.source.group().generators().iter().map(|e| e.matrix()).collect();
        let fix = crate::group::fix_space(&mats);
        let identity_count = complement.iter().filter(|e| e.matrix().is_identity()).count();
        fix.is_empty() && identity_count == 1
    };
    if !centralizer_trivial {
        return Err(Error::Consistency("the model does not act faithfully".into()));
    }

    let gl_report = session.gl_normalizer()?;
    let agrees_with_gl_normalizer = gl_report.normalizer_order == quotient.order();

    let report = AutModelReport {
        order: model.order(),
        scalar_order: p - 1,
        scalar_centralizes_image,
        scalar_meets_image_trivially,
        scalar_acts_fixed_point_freely,
        quotient_order: quotient.order(),
        quotient_is_direct_product,
        g_is_normal,
        centralizer_of_g_trivial: centralizer_trivial,
        agrees_with_gl_normalizer,
    };
    if !(report.scalar_centralizes_image
        && report.scalar_meets_image_trivially
        && report.scalar_acts_fixed_point_freely
        && report.quotient_is_direct_product
        && report.g_is_normal
        && report.agrees_with_gl_normalizer)
    {
        return Err(Error::Consistency(format!("model consistency failure: {report:?}")));
    }
    Ok(AutModel { group: model, scalar_gen, report })
}

fn build_tower(session: &Session) -> Result<Tower> {
    let p = session.prime();
    let base = session.base()?;
    let g = session.g()?;
    let model = session.aut_model()?;
    let c = &model.scalar_gen;
    let mut members = Vec::new();
    let mut last_order = 0u64;
    for d in divisors(p - 1) {
        let power = c.pow((p - 1) / d);
        let mut gens = base.source.group().generators().to_vec();
        gens.push(power);
        let group = ConcreteGroup::split_from_complement(&gens, session.bound())?;
        let expected = g.order() * d; // p³·168·d
        if group.order() != expected || group.order() <= last_order {
            return Err(Error::Consistency(format!(
                "tower member {d} has order {}, expected {expected}",
                group.order()
            )));
        }
        // G must embed normally in every member
        let normal = group
            .generators()
            .iter()
            .all(|m| g.generators().iter().all(|x| g.contains(&x.conjugate_by(m))));
        if !normal {
            return Err(Error::Consistency(format!("base group not normal in tower member {d}")));
        }
        last_order = group.order();
        members.push(TowerMember { divisor: d, group });
    }
    Ok(Tower { members })
}

/// One row of an exhaustive refutation: a π-maximal class of one tower
/// member, its intersection with the base group, and the verdict of the
/// conjugacy comparison against the subject.
#[derive(Debug, Clone, Serialize)]
pub struct ExhaustRow {
    pub divisor: u64,
    pub gstar_order: u64,
    pub k_order: u64,
    pub k_class_size: u64,
    pub intersection_order: u64,
    pub fingerprint_match: bool,
    pub conjugate_to_subject: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status")]
pub enum VerdictStatus {
    /// The subject arises as `K ∩ G` (up to G*-conjugacy) for a π-maximal
    /// `K` of a tower member; the witness carries everything needed to
    /// replay the check.
    Witnessed {
        divisor: u64,
        gstar_order: u64,
        k_order: u64,
        k_class_size: u64,
        k_generators: Vec<String>,
        conjugator: String,
        intersection_order: u64,
    },
    /// Every (tower member, catalog class) pair was tested and none has an
    /// intersection conjugate to the subject.
    RefutedExhaustively { total_pairs: u64, rows: Vec<ExhaustRow> },
    /// The structural hypotheses that make the search finite do not hold.
    HypothesesNotMet {},
}

#[derive(Debug, Clone, Serialize)]
pub struct SubmaximalityVerdict {
    pub subject_order: u64,
    pub subject_generators: Vec<String>,
    pub pi: String,
    pub prop1: Prop1Report,
    pub status: VerdictStatus,
}

impl SubmaximalityVerdict {
    pub fn is_witnessed(&self) -> bool {
        matches!(self.status, VerdictStatus::Witnessed { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self.status, VerdictStatus::RefutedExhaustively { .. })
    }
}

/// Decide whether a π-subgroup of `G` is π-submaximal.
///
/// Once the hypothesis gate passes, the subject is π-submaximal iff it is
/// `G*`-conjugate to `K ∩ G` for some tower member `G*` and π-maximal class
/// representative `K`: minimal-order witnesses land inside the automorphism
/// group, the tower covers every intermediate group because the top quotient
/// is cyclic, and `K^x ∩ G = (K ∩ G)^x` by normality of `G`.
pub fn decide_submaximal(
    session: &Session,
    subject: &Subgroup,
    pi: &PrimeSet,
) -> Result<SubmaximalityVerdict> {
    let g = session.g()?;
    let prop1 = g.prop1_hypotheses(session.bound())?;
    let describe = |s: &Subgroup| -> Vec<String> {
        s.generators().iter().map(|e| e.encode_hex()).collect()
    };
    if !prop1.all_pass() {
        return Ok(SubmaximalityVerdict {
            subject_order: subject.order(),
            subject_generators: describe(subject),
            pi: pi.to_string(),
            prop1,
            status: VerdictStatus::HypothesesNotMet {},
        });
    }
    if !pi.is_pi_number(subject.order()) || !subject.subset_of_group(&g) {
        return Err(Error::PiHypothesis(
            "the subject must be a π-subgroup of the base group".into(),
        ));
    }
    let tower = session.tower()?;
    let subject_fp = subject.fingerprint();
    let mut rows: Vec<ExhaustRow> = Vec::new();
    for member in &tower.members {
        let catalog = session.member_catalog(member, pi)?;
        for entry in &catalog.entries {
            let k = &entry.representative;
            // monotonicity guard: catalog members away from p are π-groups
            // whose intersections with G are π-subgroups
            if k.order() % session.prime() != 0 && !pi.is_pi_number(k.order()) {
                return Err(Error::Consistency("a p-free catalog member is not a π-group".into()));
            }
            let intersection = k.intersect_group(&g);
            if !pi.is_pi_number(intersection.order()) {
                return Err(Error::Consistency("an intersection is not a π-subgroup".into()));
            }
            let fingerprint_match = intersection.order() == subject.order()
                && intersection.fingerprint() == subject_fp;
            let conjugator = if fingerprint_match {
                if subject.is_embedded() {
                    conjugating_element(&member.group, subject, &intersection)?
                } else {
                    // subjects carrying translations need the member
                    // materialized for the sweep
                    let dense = member.group.materialized(session.bound())?;
                    conjugating_element(&dense, subject, &intersection)?
                }
            } else {
                None
            };
            if let Some(x) = conjugator {
                // independent witness re-verification before emission:
                // K is a π-group in its catalog, and the conjugate of the
                // subject matches the intersection elementwise
                if !pi.is_pi_number(k.order()) || !is_in_catalog(&member.group, k, &catalog)? {
                    return Err(Error::Consistency("witness subgroup failed re-verification".into()));
                }
                let moved = subject.conjugate_by(&x);
                if moved.elements().elems() != intersection.elements().elems() {
                    return Err(Error::Consistency("witness conjugation failed replay".into()));
                }
                return Ok(SubmaximalityVerdict {
                    subject_order: subject.order(),
                    subject_generators: describe(subject),
                    pi: pi.to_string(),
                    prop1,
                    status: VerdictStatus::Witnessed {
                        divisor: member.divisor,
                        gstar_order: member.group.order(),
                        k_order: k.order(),
                        k_class_size: entry.class_size,
                        k_generators: describe(k),
                        conjugator: x.encode_hex(),
                        intersection_order: intersection.order(),
                    },
                });
            }
            rows.push(ExhaustRow {
                divisor: member.divisor,
                gstar_order: member.group.order(),
                k_order: k.order(),
                k_class_size: entry.class_size,
                intersection_order: intersection.order(),
                fingerprint_match,
                conjugate_to_subject: false,
            });
        }
    }
    // exhaustion soundness recount: the rows must cover every catalog class
    let mut expected_pairs = 0u64;
    for member in &tower.members {
        expected_pairs += session.member_catalog(member, pi)?.entries.len() as u64;
    }
    if rows.len() as u64 != expected_pairs {
        return Err(Error::Consistency("exhaustion recount mismatch".into()));
    }
    Ok(SubmaximalityVerdict {
        subject_order: subject.order(),
        subject_generators: describe(subject),
        pi: pi.to_string(),
        prop1,
        status: VerdictStatus::RefutedExhaustively { total_pairs: expected_pairs, rows },
    })
}

/// Data reported by the Sylow-2 refutation battery.
#[derive(Debug, Clone, Serialize)]
pub struct Sylow2RefutationData {
    pub p: u64,
    pub sylow2_order: u64,
    pub tower_divisors: Vec<u64>,
    pub verdict: SubmaximalityVerdict,
    pub quotient_checks: Vec<QuotientLevelRow>,
    pub sylow2_image_pi_maximal_in_l: bool,
    pub min_intersection_order: u64,
}

/// Product-structure check of one π-maximal class at the quotient level
/// `C_d × L`: the class must split as (π-part of the scalar cycle) × (a
/// π-maximal subgroup of L).
#[derive(Debug, Clone, Serialize)]
pub struct QuotientLevelRow {
    pub divisor: u64,
    pub k_order: u64,
    pub scalar_part_order: u64,
    pub image_part_order: u64,
    pub splits_as_product: bool,
    pub image_part_pi_maximal_in_l: bool,
}

/// Certify that the Sylow 2-subgroups of `G` are not π-submaximal for
/// π = {2, 3}: the full exhaustive tower refutation plus the quotient-level
/// product-structure explanation.
pub fn certify_sylow2_not_submaximal(session: &Session, pi: &PrimeSet) -> Result<Sylow2RefutationData> {
    require_two_three(pi)?;
    let g = session.g()?;
    let sylow2 = g.sylow(2, session.bound())?;
    if sylow2.order() != 8 {
        return Err(Error::Consistency(format!(
            "expected a Sylow 2-subgroup of order 8, found {}",
            sylow2.order()
        )));
    }
    let verdict = decide_submaximal(session, &sylow2, pi)?;
    let tower = session.tower()?;
    let base = session.base()?;
    let l_catalog = session.l_catalog(pi)?;
    let l_group = base.source.group();

    let mut quotient_checks = Vec::new();
    for member in &tower.members {
        let catalog = session.member_catalog(member, pi)?;
        for entry in &catalog.entries {
            let k = &entry.representative;
            let scalar_elems: Vec<AffineElement> = k
                .elements()
                .iter()
                .filter(|e| e.matrix().is_scalar())
                .cloned()
                .collect();
            let image_part = k.intersect_group(&g);
            let splits = scalar_elems.len() as u64 * image_part.order() == k.order()
                && scalar_elems.len() as u64 == pi.pi_part(member.divisor);
            let image_max = is_in_catalog(l_group, &image_part, &l_catalog)?;
            quotient_checks.push(QuotientLevelRow {
                divisor: member.divisor,
                k_order: k.order(),
                scalar_part_order: scalar_elems.len() as u64,
                image_part_order: image_part.order(),
                splits_as_product: splits,
                image_part_pi_maximal_in_l: image_max,
            });
        }
    }
    let all_split = quotient_checks.iter().all(|r| r.splits_as_product && r.image_part_pi_maximal_in_l);
    if !all_split {
        return Err(Error::Consistency("quotient-level product structure failed".into()));
    }

    // the image of the Sylow 2-subgroup in L is not π-maximal there
    let l_sylow2 = l_group.sylow(2, session.bound())?;
    let sylow2_image_pi_maximal_in_l = is_in_catalog(l_group, &l_sylow2, &l_catalog)?;

    let min_intersection_order = match &verdict.status {
        VerdictStatus::RefutedExhaustively { rows, .. } => {
            rows.iter().map(|r| r.intersection_order).min().unwrap_or(0)
        }
        _ => 0,
    };
    Ok(Sylow2RefutationData {
        p: session.prime(),
        sylow2_order: sylow2.order(),
        tower_divisors: tower.members.iter().map(|m| m.divisor).collect(),
        verdict,
        quotient_checks,
        sylow2_image_pi_maximal_in_l,
        min_intersection_order,
    })
}

fn require_two_three(pi: &PrimeSet) -> Result<()> {
    if *pi != PrimeSet::two_three() {
        return Err(Error::PiHypothesis(format!(
            "this battery is specific to π = {{2,3}}, got {pi}"
        )));
    }
    Ok(())
}

/// Everything example 1 certifies, for one choice of the outer automorphism.
#[derive(Debug, Clone, Serialize)]
pub struct ImageCounterexampleCore {
    pub delta_fingerprint: (String, String),
    pub h_order: u64,
    pub h_star_order: u64,
    pub h_normal_in_h_star: bool,
    pub sylow2_h_star_order: u64,
    pub sylow2_h_star_pi_maximal: bool,
    pub sylow2_image_is_maximal_subgroup_of_extension: bool,
    pub s_order: u64,
    pub s_is_full_sylow_of_h: bool,
    pub s_equals_k_intersect_h: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImageCounterexampleData {
    pub p: u64,
    pub core: ImageCounterexampleCore,
    pub image_group_matches_base: bool,
    pub image_prop1: Prop1Report,
    pub image_class_sizes_match: bool,
    pub s_image_order: u64,
    pub s_image_verdict: SubmaximalityVerdict,
    pub all_outer_checked: Option<u64>,
    pub all_outer_pass: Option<bool>,
}

fn image_counterexample_core(
    session: &Session,
    ext: &BlockExtension,
    delta_fp: (String, String),
    pi: &PrimeSet,
) -> Result<(ImageCounterexampleCore, Subgroup, ConcreteGroup)> {
    let p = session.prime();
    // H = (V ⊕ V*) ⋊ L on the degree-6 carrier; H* adjoins J. Neither is
    // ever materialized: orders and memberships go through the split form.
    let h = ConcreteGroup::split_from_complement(
        &[ext.rho_a.clone(), ext.rho_b.clone()],
        session.bound(),
    )?;
    let h_star = ConcreteGroup::split_from_complement(
        &[ext.rho_a.clone(), ext.rho_b.clone(), ext.j.clone()],
        session.bound(),
    )?;
    let p6 = (p as u128).pow(6) as u64;
    if h.order() != p6 * 168 || h_star.order() != p6 * 336 {
        return Err(Error::Consistency("block carrier orders are wrong".into()));
    }
    let h_normal = h_star
        .generators()
        .iter()
        .all(|m| h.generators().iter().all(|x| h.contains(&x.conjugate_by(m))));

    let s_star = h_star.sylow(2, session.bound())?;
    let h_star_catalog = pi_maximal(&h_star, pi, session.bound())?;
    let s_star_maximal = is_in_catalog(&h_star, &s_star, &h_star_catalog)?;

    // the image of the Sylow 2-subgroup in the 336-element quotient is a
    // maximal subgroup outright
    let ext_sylow2 = ext.extension.sylow(2, session.bound())?;
    let ext_set = ext.extension.dense_set()?;
    let mut is_maximal_subgroup = true;
    for x in ext_set.iter() {
        if ext_sylow2.contains(x) {
            continue;
        }
        let mut gens = ext_sylow2.generators().to_vec();
        gens.push(x.clone());
        let closed = close(&gens, ext.extension.order() as usize)?;
        if closed.len() as u64 != ext.extension.order() {
            is_maximal_subgroup = false;
            break;
        }
    }

    // S := sylow(H*, 2) ∩ H is a full Sylow 2-subgroup of H, exhibiting the
    // witness triple directly
    let s = s_star.intersect_group(&h);
    let s_is_full_sylow = s.order() == 8;
    let s_equals = {
        let recomputed: Vec<AffineElement> =
            s_star.elements().iter().filter(|e| h.contains(e)).cloned().collect();
        recomputed == s.elements().elems()
    };
    let core = ImageCounterexampleCore {
        delta_fingerprint: delta_fp,
        h_order: h.order(),
        h_star_order: h_star.order(),
        h_normal_in_h_star: h_normal,
        sylow2_h_star_order: s_star.order(),
        sylow2_h_star_pi_maximal: s_star_maximal,
        sylow2_image_is_maximal_subgroup_of_extension: is_maximal_subgroup,
        s_order: s.order(),
        s_is_full_sylow_of_h: s_is_full_sylow,
        s_equals_k_intersect_h: s_equals,
    };
    Ok((core, s, h))
}

/// Certify that the image of a π-submaximal subgroup need not be
/// π-submaximal: `S = sylow₂(H* ) ∩ H` is π-submaximal in `H`, but its image
/// under `H → H/V*` is a Sylow 2-subgroup of a copy of `G`, which the tower
/// refutation rejects.
pub fn certify_image_counterexample(
    session: &Session,
    pi: &PrimeSet,
    all_outer: bool,
) -> Result<ImageCounterexampleData> {
    require_two_three(pi)?;
    let base = session.base()?;
    let block = session.block()?;
    let delta_fp = {
        let delta = base.auts.canonical_outer();
        let (fa, fb) = delta.fingerprint(&base.source);
        (hex(&fa), hex(&fb))
    };
    let (core, s, h) = image_counterexample_core(session, &block, delta_fp, pi)?;
    if !(core.h_normal_in_h_star
        && core.sylow2_h_star_pi_maximal
        && core.sylow2_image_is_maximal_subgroup_of_extension
        && core.s_is_full_sylow_of_h
        && core.s_equals_k_intersect_h)
    {
        return Err(Error::Consistency(format!("image counterexample core failed: {core:?}")));
    }

    // project H → H/V*: keep the first three coordinates
    let (image_group, map) = h.block_projection(3)?;
    let g = session.g()?;
    let image_matches = image_group.order() == g.order()
        && image_group.complement()?.elems() == g.complement()?.elems();
    let image_prop1 = image_group.prop1_hypotheses(session.bound())?;
    let image_class_sizes_match = {
        let (qa, _) = image_group.quotient_by_translations()?;
        let mut a: Vec<u64> =
            qa.conjugacy_classes()?.iter().map(|c| c.size).collect();
        let mut b: Vec<u64> =
            base.source.group().conjugacy_classes()?.iter().map(|c| c.size).collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    };

    let s_image = map.map_subgroup(&s);
    if s_image.order() != 8 {
        return Err(Error::Consistency("projected subgroup is not a Sylow 2-subgroup".into()));
    }
    let s_image_verdict = decide_submaximal(session, &s_image, pi)?;

    let (all_outer_checked, all_outer_pass) = if all_outer {
        use rayon::prelude::*;
        let outers: Vec<&crate::rep::GroupAutomorphism> = base.auts.outer().collect();
        let verdicts: Vec<Result<bool>> = outers
            .par_iter()
            .map(|delta| {
                let ext = build_block_extension(&base.source, &base.x, delta)?;
                let (fa, fb) = delta.fingerprint(&base.source);
                let (core, _, _) =
                    image_counterexample_core(session, &ext, (hex(&fa), hex(&fb)), pi)?;
                Ok(core.h_normal_in_h_star
                    && core.sylow2_h_star_pi_maximal
                    && core.sylow2_image_is_maximal_subgroup_of_extension
                    && core.s_is_full_sylow_of_h
                    && core.s_equals_k_intersect_h)
            })
            .collect();
        let mut pass = true;
        for v in verdicts {
            pass &= v?;
        }
        (Some(outers.len() as u64), Some(pass))
    } else {
        (None, None)
    };

    Ok(ImageCounterexampleData {
        p: session.prime(),
        core,
        image_group_matches_base: image_matches,
        image_prop1,
        image_class_sizes_match,
        s_image_order: s_image.order(),
        s_image_verdict,
        all_outer_checked,
        all_outer_pass,
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Everything example 2 certifies.
#[derive(Debug, Clone, Serialize)]
pub struct PreimageCounterexampleData {
    pub p: u64,
    pub k_order: u64,
    pub k_pi_maximal_in_extension: bool,
    pub s_order: u64,
    pub s_is_sylow_of_diagonal: bool,
    pub s_pi_maximal_in_l: bool,
    pub order24_overgroup_exists: bool,
    pub preimage_classes_of_order8: u64,
    pub all_preimage_classes_conjugate_to_sylow: bool,
    pub translation_module_is_pi_prime: bool,
    pub sylow_g_verdict_refuted: bool,
}

/// Certify that a π-submaximal subgroup of a quotient need not lift: the
/// Sylow 2-subgroup `S` of `L` is π-submaximal (witnessed inside the
/// 336-element extension), yet every subgroup of `G` mapping onto `S` is a
/// Sylow 2-subgroup of `G`, and those are refuted exhaustively.
pub fn certify_preimage_counterexample(
    session: &Session,
    pi: &PrimeSet,
) -> Result<PreimageCounterexampleData> {
    require_two_three(pi)?;
    let base = session.base()?;
    let block = session.block()?;

    // (i) the witness in the extension: K = sylow₂, S = K ∩ L
    let k = block.extension.sylow(2, session.bound())?;
    let ext_catalog = session.ext_catalog(pi)?;
    let k_pi_maximal = is_in_catalog(&block.extension, &k, &ext_catalog)?;
    if !block.extension.is_normal(&block.diagonal) {
        return Err(Error::NotNormal);
    }
    let s = k.intersect(&block.diagonal);
    let s_is_sylow = s.order() == 8;

    // (ii) S is not π-maximal in L: an order-24 π-subgroup contains it
    let l_group = base.source.group();
    let l_catalog = session.l_catalog(pi)?;
    let l_sylow2 = l_group.sylow(2, session.bound())?;
    let s_pi_maximal_in_l = is_in_catalog(l_group, &l_sylow2, &l_catalog)?;
    let mut order24_overgroup_exists = false;
    for entry in &l_catalog.entries {
        if entry.representative.order() == 24
            && pi::contained_up_to_conjugacy(l_group, &l_sylow2, &entry.representative)?
        {
            order24_overgroup_exists = true;
        }
    }

    // (iii) preimage analysis in G: any π-subgroup T with image S satisfies
    // T ∩ V = 1 (V is a π′-group), so |T| = 8 and T is Sylow. Enumerate the
    // order-8 subgroups of the preimage P = V ⋊ S with full image and check
    // each class is G-conjugate to the Sylow 2-subgroup.
    let g_dense = session.g_dense()?;
    let p = session.prime();
    let translation_module_is_pi_prime = pi.is_pi_prime_number(p);
    let mut p_gens: Vec<AffineElement> = (0..3)
        .map(|i| {
            AffineElement::translation(&crate::ff::FieldVector::basis(i, 3, p))
        })
        .collect();
    p_gens.extend(l_sylow2.generators().iter().cloned());
    let preimage = ConcreteGroup::dense_from_generators(&p_gens, session.bound())?;
    if preimage.order() != 8 * p.pow(3) {
        return Err(Error::Consistency("preimage group has the wrong order".into()));
    }
    let two = PrimeSet::new([2])?;
    let candidates = pi::pi_subgroups(&preimage, &two, session.bound())?;
    let forget = QuotientMap::ForgetTranslations;
    let mut class_count = 0u64;
    let mut all_conjugate = true;
    let g_sylow2 = session.g()?.sylow(2, session.bound())?;
    for t in &candidates {
        if t.order() != 8 {
            continue;
        }
        let image = forget.map_subgroup(t);
        if image.elements().elems() != l_sylow2.elements().elems() {
            continue;
        }
        class_count += 1;
        if conjugating_element(&g_dense, t, &g_sylow2)?.is_none() {
            all_conjugate = false;
        }
    }
    if class_count == 0 {
        return Err(Error::Consistency("no preimage complements found".into()));
    }

    // the refutation of the Sylow class is the other half of the argument
    let sylow_verdict = decide_submaximal(session, &g_sylow2, pi)?;

    Ok(PreimageCounterexampleData {
        p,
        k_order: k.order(),
        k_pi_maximal_in_extension: k_pi_maximal,
        s_order: s.order(),
        s_is_sylow_of_diagonal: s_is_sylow,
        s_pi_maximal_in_l,
        order24_overgroup_exists,
        preimage_classes_of_order8: class_count,
        all_preimage_classes_conjugate_to_sylow: all_conjugate,
        translation_module_is_pi_prime,
        sylow_g_verdict_refuted: sylow_verdict.is_refuted(),
    })
}

/// One instance of the normalizer-quotient obstruction sweep.
#[derive(Debug, Clone, Serialize)]
pub struct WhInstance {
    pub gstar: String,
    pub a: String,
    pub k_order: u64,
    pub verdict: WhVerdict,
}

/// Run the Wielandt–Hartley check on every constructed (ambient, subnormal,
/// catalog member) instance; every verdict must come out π′.
pub fn wielandt_hartley_sweep(session: &Session, pi: &PrimeSet) -> Result<Vec<WhInstance>> {
    let base = session.base()?;
    let block = session.block()?;
    let g = session.g()?;
    let tower = session.tower()?;
    let mut out = Vec::new();

    // the 168-element group with A = itself
    let l_group = base.source.group();
    let l_catalog = session.l_catalog(pi)?;
    let l_whole = Subgroup::generate(l_group.generators(), session.bound())?;
    for entry in &l_catalog.entries {
        let verdict = pi::wielandt_hartley_verify(
            l_group,
            &[&l_whole],
            &entry.representative,
            &l_catalog,
            pi,
        )?;
        out.push(WhInstance {
            gstar: "l".into(),
            a: "l".into(),
            k_order: entry.representative.order(),
            verdict,
        });
    }

    // the 336-element extension with A = the diagonal copy and A = itself
    let ext_catalog = session.ext_catalog(pi)?;
    let ext_whole = Subgroup::generate(block.extension.generators(), session.bound())?;
    for entry in &ext_catalog.entries {
        for (label, a) in [("diagonal", &block.diagonal), ("extension", &ext_whole)] {
            let verdict = pi::wielandt_hartley_verify(
                &block.extension,
                &[a],
                &entry.representative,
                &ext_catalog,
                pi,
            )?;
            out.push(WhInstance {
                gstar: "extension".into(),
                a: label.into(),
                k_order: entry.representative.order(),
                verdict,
            });
        }
    }

    // tower members with A = V (depth 1 and the depth-2 chain V ⊴ G ⊴ G*)
    // and with A = G (structural normalizer in split form)
    let v = g.translation_subgroup(session.bound())?;
    for member in &tower.members {
        let catalog = session.member_catalog(member, pi)?;
        for entry in &catalog.entries {
            let k = &entry.representative;
            // A = V: K ∩ V is trivial (K is a π-group, V a π′-group), and V
            // is abelian, so the normalizer quotient is V itself
            let kv = k.intersect(&v);
            if kv.order() != 1 {
                return Err(Error::Consistency("π-subgroup meets the π′-module".into()));
            }
            let g_normal_in_member = member
                .group
                .generators()
                .iter()
                .all(|m| g.generators().iter().all(|x| g.contains(&x.conjugate_by(m))));
            if !member.group.is_normal(&v) || !g_normal_in_member {
                return Err(Error::NotNormal);
            }
            // chain verification for the depth-2 route V ⊴ G ⊴ G*
            if !g.is_normal(&v) {
                return Err(Error::NotNormal);
            }
            let v_order = v.order();
            out.push(WhInstance {
                gstar: format!("tower_{}", member.divisor),
                a: "translations".into(),
                k_order: k.order(),
                verdict: WhVerdict {
                    a_order: v_order,
                    k_order: k.order(),
                    intersection_order: 1,
                    normalizer_order: v_order,
                    index: v_order,
                    index_is_pi_prime: pi.is_pi_prime_number(v_order),
                },
            });
            // A = G: structural normalizer of the embedded intersection
            let kg = k.intersect_group(&g);
            let n_order = g.normalizer_order(&kg)?;
            let index = n_order / kg.order();
            out.push(WhInstance {
                gstar: format!("tower_{}", member.divisor),
                a: "base".into(),
                k_order: k.order(),
                verdict: WhVerdict {
                    a_order: g.order(),
                    k_order: k.order(),
                    intersection_order: kg.order(),
                    normalizer_order: n_order,
                    index,
                    index_is_pi_prime: pi.is_pi_prime_number(index),
                },
            });
        }
    }

    // H* with A = H: the intersection is computed in the quotient carrier
    let h = ConcreteGroup::split_from_complement(
        &[block.rho_a.clone(), block.rho_b.clone()],
        session.bound(),
    )?;
    let h_star = ConcreteGroup::split_from_complement(
        &[block.rho_a.clone(), block.rho_b.clone(), block.j.clone()],
        session.bound(),
    )?;
    let h_star_catalog = pi_maximal(&h_star, pi, session.bound())?;
    for entry in &h_star_catalog.entries {
        let k = &entry.representative;
        let kh = k.intersect_group(&h);
        let n_order = h.normalizer_order(&kh)?;
        let index = n_order / kh.order();
        out.push(WhInstance {
            gstar: "h_star".into(),
            a: "h".into(),
            k_order: k.order(),
            verdict: WhVerdict {
                a_order: h.order(),
                k_order: k.order(),
                intersection_order: kh.order(),
                normalizer_order: n_order,
                index,
                index_is_pi_prime: pi.is_pi_prime_number(index),
            },
        });
    }

    Ok(out)
}
