//! All conjugacy classes of subgroups of G at q = 4, the poset of classes
//! and λ(H, G).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::context::GroupContext;
use crate::error::{Error, Result};
use crate::maximal::{ClosureType, IntersectionClosure};
use crate::moebius::{mobius_from_top, ser_bigint, PosetTable};
use crate::subgroup::{
    conjugation_orbit, derived_series, derived_subgroup, generate, generate_capped, greedy_generators,
    normalizer_brute, Bitset, Signature, SubgroupRecord,
};

#[derive(Clone, Debug, Serialize)]
pub struct ClassRecord {
    pub representative: SubgroupRecord,
    pub class_size: u64,
    pub order: u64,
    pub solvable: bool,
    pub normalizer_order: u64,
    pub signature: Signature,
    /// Closure type, when the class is one of the intersection-closure classes.
    pub closure_label: Option<ClosureType>,
}

pub const DEFAULT_CLASS_BUDGET: usize = 20_000;

/// Every subgroup of G, grouped by order, with its class.
#[derive(Debug, Default)]
struct Registry {
    index: FxHashMap<Box<[u32]>, u32>,
    by_order: BTreeMap<u64, Vec<(Box<[u32]>, u32)>>,
}

impl Registry {
    fn contains(&self, set: &[u32]) -> bool {
        self.index.contains_key(set)
    }

    fn insert_class(&mut self, id: u32, conjugates: Vec<Vec<u32>>) {
        for set in conjugates {
            let set: Box<[u32]> = set.into_boxed_slice();
            self.by_order.entry(set.len() as u64).or_default().push((set.clone(), id));
            self.index.insert(set, id);
        }
    }

    fn total(&self) -> usize {
        self.index.len()
    }
}

/// The complete list of conjugacy classes with the full subgroup registry.
#[derive(Debug)]
pub struct ClassCatalog {
    classes: Vec<ClassRecord>,
    registry: Registry,
}

/// Solvable subgroups are grown by cyclic extension from {1}: every solvable
/// K ≠ 1 has a normal subgroup of prime index, and a conjugate of it is a
/// class representative. Non-solvable proper subgroups all contain a perfect
/// subgroup of order 60, which is 2-generated by an involution and an element
/// of order 3; those are found by direct search and then extended the same way.
pub fn enumerate_all_classes(ctx: &GroupContext, budget: usize) -> Result<ClassCatalog> {
    if ctx.q() != 4 {
        return Err(Error::Usage("class enumeration is limited to q = 4".into()));
    }
    let t = &ctx.table;
    let g_order = t.len();
    let mut registry = Registry::default();
    let mut reps: Vec<Vec<u32>> = Vec::new();

    let add_class = |set: Vec<u32>, registry: &mut Registry, reps: &mut Vec<Vec<u32>>| -> Result<bool> {
        if registry.contains(&set) {
            return Ok(false);
        }
        if reps.len() >= budget {
            return Err(Error::Resource(format!(
                "class enumeration exceeds the budget of {budget} classes ({} subgroups registered)",
                registry.total()
            )));
        }
        let orbit = conjugation_orbit(t, &ctx.conj_maps, &set, g_order)?;
        let mut conjugates: Vec<Vec<u32>> = orbit.into_iter().map(|(s, _)| s).collect();
        conjugates.sort_unstable();
        reps.push(conjugates[0].clone());
        registry.insert_class(reps.len() as u32 - 1, conjugates);
        Ok(true)
    };

    add_class(vec![0], &mut registry, &mut reps)?;

    // Perfect subgroups of order 60 through one fixed involution.
    let involution = (1..g_order as u32)
        .find(|&x| t.order(x) == 2)
        .ok_or_else(|| Error::Invariant("no involution".into()))?;
    for b in 1..g_order as u32 {
        if t.order(b) != 3 {
            continue;
        }
        if let Some(h) = generate_capped(t, &[involution, b], 60) {
            if h.len() == 60 && derived_subgroup(t, &[involution, b]) == h {
                add_class(h, &mut registry, &mut reps)?;
            }
        }
    }

    let mut next = 0;
    while next < reps.len() {
        let h = reps[next].clone();
        next += 1;
        if h.len() == g_order {
            continue;
        }
        let hgens = greedy_generators(t, &h);
        let normalizer = normalizer_brute(t, &h, &hgens);
        let member = Bitset::from_ids(g_order, &h);
        let mut done = Bitset::from_ids(g_order, &h);
        for &g in &normalizer {
            if done.contains(g) || !prime_order_mod(t, &member, g) {
                continue;
            }
            let mut gens = hgens.clone();
            gens.push(g);
            let k = generate(t, &gens);
            for &x in &k {
                done.insert(x);
            }
            if k.len() < g_order {
                add_class(k, &mut registry, &mut reps)?;
            }
        }
    }
    add_class((0..g_order as u32).collect(), &mut registry, &mut reps)?;
    assemble(ctx, registry, reps)
}

/// Rebuilds a catalog from one generating set per class, e.g. read from a cache.
pub fn catalog_from_generators(ctx: &GroupContext, class_generators: &[Vec<u32>]) -> Result<ClassCatalog> {
    let t = &ctx.table;
    let mut registry = Registry::default();
    let mut reps = Vec::with_capacity(class_generators.len());
    for gens in class_generators {
        let set = generate(t, gens);
        if registry.contains(&set) {
            return Err(Error::Cache("two cached classes coincide".into()));
        }
        let orbit = conjugation_orbit(t, &ctx.conj_maps, &set, t.len())?;
        let mut conjugates: Vec<Vec<u32>> = orbit.into_iter().map(|(s, _)| s).collect();
        conjugates.sort_unstable();
        reps.push(conjugates[0].clone());
        registry.insert_class(reps.len() as u32 - 1, conjugates);
    }
    assemble(ctx, registry, reps)
}

fn assemble(ctx: &GroupContext, mut registry: Registry, reps: Vec<Vec<u32>>) -> Result<ClassCatalog> {
    let t = &ctx.table;
    let g_order = t.len();

    let mut classes: Vec<(ClassRecord, u32)> = reps
        .iter()
        .enumerate()
        .map(|(old, set)| {
            let gens = if set.len() == g_order {
                t.generators().to_vec()
            } else {
                greedy_generators(t, set)
            };
            let class_size = registry.by_order[&(set.len() as u64)]
                .iter()
                .filter(|(_, c)| *c == old as u32)
                .count() as u64;
            let solvable = derived_series(t, set, &gens).last() == Some(&1);
            let signature = Signature::of(t, set, &gens);
            let record = ClassRecord {
                representative: SubgroupRecord {
                    elements: set.clone(),
                    generators: gens,
                    order: set.len() as u64,
                    class_id: None,
                    type_label: None,
                },
                class_size,
                order: set.len() as u64,
                solvable,
                normalizer_order: g_order as u64 / class_size,
                signature,
                closure_label: None,
            };
            (record, old as u32)
        })
        .collect();
    classes.sort_by(|(a, _), (b, _)| {
        (a.order, a.class_size, &a.representative.elements).cmp(&(b.order, b.class_size, &b.representative.elements))
    });
    let mut renumber = vec![0u32; classes.len()];
    for (new, (_, old)) in classes.iter().enumerate() {
        renumber[*old as usize] = new as u32;
    }
    for v in registry.index.values_mut() {
        *v = renumber[*v as usize];
    }
    for list in registry.by_order.values_mut() {
        for (_, c) in list.iter_mut() {
            *c = renumber[*c as usize];
        }
    }
    let classes = classes
        .into_iter()
        .enumerate()
        .map(|(i, (mut r, _))| {
            r.representative.class_id = Some(i as u32);
            r
        })
        .collect();
    Ok(ClassCatalog { classes, registry })
}

/// Whether the smallest positive power of `g` lying in `H` has prime exponent.
fn prime_order_mod(t: &crate::group::ElementTable, member: &Bitset, g: u32) -> bool {
    let mut x = g;
    let mut k = 1u64;
    while !member.contains(x) {
        x = t.mul(x, g);
        k += 1;
    }
    k > 1 && crate::field::prime_factors(k) == vec![k]
}

/// Number of conjugates of class `L` strictly containing the representative
/// of class `K`, for every pair with `K` below `L`.
pub type ContainmentCounts = Vec<BTreeMap<u32, u64>>;

impl ClassCatalog {
    pub fn classes(&self) -> &[ClassRecord] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn total_subgroups(&self) -> u64 {
        self.classes.iter().map(|c| c.class_size).sum()
    }

    pub fn class_of(&self, elements: &[u32]) -> Option<u32> {
        self.registry.index.get(elements).copied()
    }

    pub fn top(&self) -> u32 {
        self.classes.len() as u32 - 1
    }

    pub fn bottom(&self) -> u32 {
        0
    }

    /// Attaches closure labels by looking up each closure representative.
    pub fn label_from_closure(&mut self, closure: &IntersectionClosure) -> Result<()> {
        for label in ClosureType::ALL {
            let rep = closure
                .representative(label)
                .ok_or_else(|| Error::Completeness(format!("closure lacks {}", label.label())))?;
            let id = self.class_of(&closure.node(rep).elements).ok_or_else(|| {
                Error::Completeness(format!("closure class {} missing from the enumeration", label.label()))
            })?;
            let c = &mut self.classes[id as usize];
            c.closure_label = Some(label);
            c.representative.type_label = Some(label.label().to_string());
        }
        Ok(())
    }

    /// Containment counts, scanning every registered subgroup for each class.
    pub fn containment_counts(&self) -> ContainmentCounts {
        self.classes
            .iter()
            .map(|k| {
                let mut counts = BTreeMap::new();
                let gens = &k.representative.generators;
                for (&order, list) in self.registry.by_order.range(k.order + 1..) {
                    if order % k.order != 0 {
                        continue;
                    }
                    for (set, c) in list {
                        if gens.iter().all(|g| set.binary_search(g).is_ok()) {
                            *counts.entry(*c).or_insert(0) += 1;
                        }
                    }
                }
                counts
            })
            .collect()
    }

    pub fn poset(&self, counts: &ContainmentCounts) -> Result<PosetTable> {
        let up = counts.iter().map(|m| m.keys().copied().collect()).collect();
        let p = PosetTable::from_up_sets(up)?;
        if p.top()? != self.top() || p.bottom()? != self.bottom() {
            return Err(Error::Invariant("class poset has the wrong extremes".into()));
        }
        Ok(p)
    }

    /// μ(H, G) on the full subgroup lattice, per class, from the counts of
    /// conjugates containing each representative.
    pub fn full_lattice_mu(&self, counts: &ContainmentCounts) -> Vec<BigInt> {
        let mut mu = vec![BigInt::zero(); self.len()];
        let top = self.top() as usize;
        mu[top] = BigInt::one();
        for k in (0..self.len()).rev() {
            if k == top {
                continue;
            }
            let s: BigInt = counts[k].iter().map(|(&l, &c)| &mu[l as usize] * BigInt::from(c)).sum();
            mu[k] = -s;
        }
        mu
    }

    /// Brute-force `[H] ≤ [K]`: some conjugate of `K` contains `H`.
    pub fn brute_leq(&self, ctx: &GroupContext, h: u32, k: u32) -> bool {
        let t = &ctx.table;
        let hr = &self.classes[h as usize].representative;
        let kr = &self.classes[k as usize].representative;
        if !kr.order.is_multiple_of(hr.order) {
            return false;
        }
        let member = Bitset::from_ids(t.len(), &kr.elements);
        (0..t.len() as u32).any(|g| {
            let gi = t.inv(g);
            hr.generators.iter().all(|&x| member.contains(t.conj(gi, x)))
        })
    }

    /// Compares the poset order with the brute-force test on seeded random pairs.
    pub fn audit_order(&self, ctx: &GroupContext, poset: &PosetTable, pairs: usize, seed: u64) -> bool {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = self.len() as u32;
        (0..pairs).all(|_| {
            let h = rng.gen_range(0..n);
            let k = rng.gen_range(0..n);
            poset.leq(h, k) == self.brute_leq(ctx, h, k)
        })
    }
}

/// Independent counts used to audit completeness.
#[derive(Clone, Debug, Serialize)]
pub struct CompletenessAudit {
    /// (order, cyclic subgroups counted from element orders, from the classes).
    pub cyclic_counts: Vec<(u64, u64, u64)>,
    pub closure_classes_match: bool,
    pub class_equation_holds: bool,
    pub nonsolvable_orders_divisible_by_60: bool,
    pub passed: bool,
}

pub fn audit_completeness(
    ctx: &GroupContext,
    catalog: &ClassCatalog,
    closure: &IntersectionClosure,
) -> Result<CompletenessAudit> {
    let t = &ctx.table;
    let mut by_elements: BTreeMap<u64, u64> = BTreeMap::new();
    for x in 0..t.len() as u32 {
        *by_elements.entry(t.order(x)).or_default() += 1;
    }
    let mut cyclic_counts = Vec::new();
    for (&o, &n) in &by_elements {
        let phi = euler_phi(o);
        let from_classes: u64 = catalog
            .classes()
            .iter()
            .filter(|c| c.order == o && c.signature.abelian && c.signature.exponent == o)
            .map(|c| c.class_size)
            .sum();
        cyclic_counts.push((o, n / phi, from_classes));
    }
    let closure_classes_match = ClosureType::ALL.iter().all(|&label| {
        let Some(rep) = closure.representative(label) else { return false };
        let Some(id) = catalog.class_of(&closure.node(rep).elements) else { return false };
        let c = &catalog.classes()[id as usize];
        c.class_size == closure.count(label) as u64
            && c.normalizer_order as u128 == label.normalizer_order(ctx.q())
            && c.closure_label == Some(label)
    });
    let class_equation_holds = catalog.classes().iter().all(|c| {
        let n = normalizer_brute(t, &c.representative.elements, &c.representative.generators).len() as u64;
        n == c.normalizer_order && c.class_size * n == t.len() as u64
    }) && catalog.total_subgroups() == catalog.registry.total() as u64;
    let nonsolvable_orders_divisible_by_60 = catalog.classes().iter().all(|c| c.solvable || c.order % 60 == 0);
    let passed = cyclic_counts.iter().all(|&(_, a, b)| a == b)
        && closure_classes_match
        && class_equation_holds
        && nonsolvable_orders_divisible_by_60;
    Ok(CompletenessAudit {
        cyclic_counts,
        closure_classes_match,
        class_equation_holds,
        nonsolvable_orders_divisible_by_60,
        passed,
    })
}

fn euler_phi(n: u64) -> u64 {
    crate::field::prime_factors(n).iter().fold(n, |acc, &p| acc / p * (p - 1))
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaRow {
    pub class_id: u32,
    pub label: Option<ClosureType>,
    pub order: u64,
    pub class_size: u64,
    pub normalizer_order: u64,
    pub solvable: bool,
    #[serde(serialize_with = "ser_bigint")]
    pub lambda: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub mu: BigInt,
}

/// λ and full-lattice μ for every class.
#[derive(Clone, Debug)]
pub struct LambdaTable {
    pub rows: Vec<LambdaRow>,
    pub poset: PosetTable,
    pub counts: ContainmentCounts,
}

pub fn lambda_table(catalog: &ClassCatalog) -> Result<LambdaTable> {
    let counts = catalog.containment_counts();
    let poset = catalog.poset(&counts)?;
    let lambda = mobius_from_top(&poset)?;
    let mu = catalog.full_lattice_mu(&counts);
    let rows = catalog
        .classes()
        .iter()
        .enumerate()
        .map(|(i, c)| LambdaRow {
            class_id: i as u32,
            label: c.closure_label,
            order: c.order,
            class_size: c.class_size,
            normalizer_order: c.normalizer_order,
            solvable: c.solvable,
            lambda: lambda[i].clone(),
            mu: mu[i].clone(),
        })
        .collect();
    Ok(LambdaTable { rows, poset, counts })
}

impl LambdaTable {
    pub fn row(&self, label: ClosureType) -> Option<&LambdaRow> {
        self.rows.iter().find(|r| r.label == Some(label))
    }

    /// Σ_{[H] ≤ [Z]} λ(Z) vanishes below the top.
    pub fn recursion_vanishes(&self) -> bool {
        let top = self.rows.len() as u32 - 1;
        (0..top).all(|h| {
            let s: BigInt = self.poset.up(h).iter().map(|&z| &self.rows[z as usize].lambda).sum();
            (s + &self.rows[h as usize].lambda).is_zero()
        })
    }

    /// Σ of closure μ over every subgroup containing the representative of
    /// class `h` (including it); zero when the closure carries all nonzero μ.
    pub fn overgroup_mu_sum(&self, h: u32, closure_mu: impl Fn(u32) -> BigInt) -> BigInt {
        let own = closure_mu(h);
        self.counts[h as usize]
            .iter()
            .map(|(&l, &c)| closure_mu(l) * BigInt::from(c))
            .sum::<BigInt>()
            + own
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::ClosureMobius;
    use crate::testkit::fixture;
    use std::sync::OnceLock;

    fn catalog() -> &'static (ClassCatalog, LambdaTable) {
        static C: OnceLock<(ClassCatalog, LambdaTable)> = OnceLock::new();
        C.get_or_init(|| {
            let f = fixture();
            let start = std::time::Instant::now();
            let mut c = enumerate_all_classes(&f.ctx, DEFAULT_CLASS_BUDGET).unwrap();
            eprintln!("{} classes, {} subgroups in {:?}", c.len(), c.total_subgroups(), start.elapsed());
            c.label_from_closure(&f.closure).unwrap();
            let start = std::time::Instant::now();
            let l = lambda_table(&c).unwrap();
            eprintln!("lambda in {:?}", start.elapsed());
            (c, l)
        })
    }

    #[test]
    fn small_classes() {
        let (c, _) = catalog();
        let of_order = |o| c.classes().iter().filter(|r| r.order == o).map(|r| r.class_size).collect::<Vec<_>>();
        assert_eq!(of_order(2), vec![195]);
        assert_eq!(of_order(3), vec![2080]);
        assert_eq!(c.classes().last().unwrap().class_size, 1);
        let nonsolvable: Vec<u64> = c.classes().iter().filter(|r| !r.solvable).map(|r| r.order).collect();
        assert_eq!(nonsolvable, vec![60, 300, 62400]);
    }

    #[test]
    fn lambda_and_audits() {
        let f = fixture();
        let (c, l) = catalog();
        let audit = audit_completeness(&f.ctx, c, &f.closure).unwrap();
        assert!(audit.passed, "{audit:?}");
        assert!(l.recursion_vanishes());
        for label in ClosureType::ALL {
            let row = l.row(label).unwrap();
            assert_eq!(row.lambda, BigInt::from(label.table_lambda()), "{}", label.label());
        }
        let nonzero = l.rows.iter().filter(|r| !r.lambda.is_zero()).count();
        assert_eq!(nonzero, 10);
        let m = ClosureMobius::compute(&f.closure).unwrap();
        for label in ClosureType::ALL {
            let rep = f.closure.representative(label).unwrap();
            assert_eq!(l.row(label).unwrap().mu, *m.mu(rep), "{}", label.label());
        }
        assert!(l.rows.iter().filter(|r| r.label.is_none()).all(|r| r.mu.is_zero()));
        assert!(c.audit_order(&f.ctx, &l.poset, 50, 11));
    }
}
