//! Möbius functions of finite posets, and their use on the intersection
//! closure: μ(H, G), the probability of generating G, and the (μ, λ) checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::context::GroupContext;
use crate::error::{Error, Result};
use crate::maximal::{ClosureType, IntersectionClosure};
use crate::perm::{reaches_order, Perm};
use crate::subgroup::Bitset;

/// A finite poset stored as strict up-sets and down-sets.
#[derive(Clone, Debug)]
pub struct PosetTable {
    up: Vec<Vec<u32>>,
    down: Vec<Vec<u32>>,
    /// Linear extension, largest elements first.
    descent: Vec<u32>,
}

impl PosetTable {
    /// From strict up-sets (`up[x]` lists every `z > x`).
    pub fn from_up_sets(mut up: Vec<Vec<u32>>) -> Result<Self> {
        let n = up.len();
        let mut down = vec![Vec::new(); n];
        for (x, u) in up.iter_mut().enumerate() {
            u.sort_unstable();
            u.dedup();
            for &z in u.iter() {
                if z as usize >= n || z as usize == x {
                    return Err(Error::Usage(format!("bad up-set entry {z} for node {x}")));
                }
                down[z as usize].push(x as u32);
            }
        }
        // x < z forces up(z) ⊊ up(x), so sorting by up-set size is a linear extension.
        let mut descent: Vec<u32> = (0..n as u32).collect();
        descent.sort_by_key(|&x| (up[x as usize].len(), x));
        Ok(PosetTable { up, down, descent })
    }

    /// From a `≤` predicate, by testing all pairs.
    pub fn from_leq(n: usize, leq: impl Fn(u32, u32) -> bool) -> Result<Self> {
        let up = (0..n as u32)
            .map(|x| (0..n as u32).filter(|&z| z != x && leq(x, z)).collect())
            .collect();
        let p = Self::from_up_sets(up)?;
        p.validate()?;
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn up(&self, x: u32) -> &[u32] {
        &self.up[x as usize]
    }

    pub fn down(&self, x: u32) -> &[u32] {
        &self.down[x as usize]
    }

    pub fn leq(&self, x: u32, z: u32) -> bool {
        x == z || self.up[x as usize].binary_search(&z).is_ok()
    }

    pub fn descent_order(&self) -> &[u32] {
        &self.descent
    }

    /// Antisymmetry and transitivity.
    pub fn validate(&self) -> Result<()> {
        for x in 0..self.len() as u32 {
            for &z in self.up(x) {
                if self.leq(z, x) {
                    return Err(Error::Invariant(format!("{x} and {z} are mutually below each other")));
                }
                if !self.up(z).iter().all(|w| self.up(x).binary_search(w).is_ok()) {
                    return Err(Error::Invariant(format!("order is not transitive through {x} < {z}")));
                }
            }
        }
        Ok(())
    }

    pub fn top(&self) -> Result<u32> {
        let tops: Vec<u32> = (0..self.len() as u32).filter(|&x| self.up(x).is_empty()).collect();
        match tops.as_slice() {
            [t] => Ok(*t),
            _ => Err(Error::Usage(format!("poset has {} maximal elements, not one", tops.len()))),
        }
    }

    pub fn bottom(&self) -> Result<u32> {
        let bottoms: Vec<u32> = (0..self.len() as u32).filter(|&x| self.down(x).is_empty()).collect();
        match bottoms.as_slice() {
            [b] => Ok(*b),
            _ => Err(Error::Usage(format!("poset has {} minimal elements, not one", bottoms.len()))),
        }
    }

    /// Covering pairs `(x, z)` with nothing strictly between.
    pub fn hasse_edges(&self) -> Vec<(u32, u32)> {
        let mut edges = Vec::new();
        for x in 0..self.len() as u32 {
            let mut inner = Bitset::new(self.len());
            for &z in self.up(x) {
                for &w in self.up(z) {
                    inner.insert(w);
                }
            }
            edges.extend(self.up(x).iter().filter(|&&z| !inner.contains(z)).map(|&z| (x, z)));
        }
        edges
    }

    /// The same poset with node `x` renamed `perm[x]`.
    pub fn relabelled(&self, perm: &[u32]) -> Result<Self> {
        let mut up = vec![Vec::new(); self.len()];
        for x in 0..self.len() {
            up[perm[x] as usize] = self.up[x].iter().map(|&z| perm[z as usize]).collect();
        }
        Self::from_up_sets(up)
    }
}

/// `μ(x, top)` for every `x`, by descent from the top.
pub fn mobius_from_top(p: &PosetTable) -> Result<Vec<BigInt>> {
    let top = p.top()?;
    let mut mu = vec![BigInt::zero(); p.len()];
    mu[top as usize] = BigInt::one();
    for &x in p.descent_order() {
        if x == top {
            continue;
        }
        let s: BigInt = p.up(x).iter().map(|&z| &mu[z as usize]).sum();
        mu[x as usize] = -s;
    }
    Ok(mu)
}

/// `μ(x, z)` for every `z ≥ x` (zero elsewhere), from the bottom of the interval.
pub fn mobius_from_bottom(p: &PosetTable, x: u32) -> Vec<BigInt> {
    let mut inside = Bitset::new(p.len());
    inside.insert(x);
    for &z in p.up(x) {
        inside.insert(z);
    }
    let mut mu = vec![BigInt::zero(); p.len()];
    mu[x as usize] = BigInt::one();
    for &z in p.descent_order().iter().rev() {
        if z == x || !inside.contains(z) {
            continue;
        }
        let s: BigInt = p
            .down(z)
            .iter()
            .filter(|&&w| inside.contains(w))
            .map(|&w| &mu[w as usize])
            .sum();
        mu[z as usize] = -s;
    }
    mu
}

/// Compares `μ(x, top)` from both recursions for the given nodes, or for every
/// node when the poset is small.
pub fn dual_check(p: &PosetTable, mu_top: &[BigInt], nodes: Option<&[u32]>) -> Result<bool> {
    const FULL_CHECK_LIMIT: usize = 2000;
    let top = p.top()?;
    let all: Vec<u32>;
    let nodes = match nodes {
        Some(n) => n,
        None if p.len() <= FULL_CHECK_LIMIT => {
            all = (0..p.len() as u32).collect();
            &all
        }
        None => return Err(Error::Usage(format!("full dual check limited to {FULL_CHECK_LIMIT} nodes"))),
    };
    Ok(nodes
        .iter()
        .all(|&x| mobius_from_bottom(p, x)[top as usize] == mu_top[x as usize]))
}

/// One row of the μ table.
#[derive(Clone, Debug, Serialize)]
pub struct MuRow {
    pub label: ClosureType,
    pub order: u64,
    pub normalizer_order: u64,
    pub class_size: u64,
    #[serde(serialize_with = "ser_bigint")]
    pub mu: BigInt,
    pub published_mu: i128,
    /// μ agrees on every node of the class.
    pub constant_on_class: bool,
}

pub(crate) fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_i64() {
        Some(x) => s.serialize_i64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

/// μ(H, G) on the closure poset.
#[derive(Clone, Debug)]
pub struct ClosureMobius {
    pub poset: PosetTable,
    pub mu: Vec<BigInt>,
}

impl ClosureMobius {
    pub fn compute(closure: &IntersectionClosure) -> Result<Self> {
        let poset = PosetTable::from_up_sets(closure.up_sets())?;
        let mu = mobius_from_top(&poset)?;
        Ok(ClosureMobius { poset, mu })
    }

    pub fn mu(&self, node: u32) -> &BigInt {
        &self.mu[node as usize]
    }

    pub fn table(&self, ctx: &GroupContext, closure: &IntersectionClosure) -> Vec<MuRow> {
        let g = ctx.order();
        ClosureType::ALL
            .iter()
            .filter_map(|&label| {
                let rep = closure.representative(label)?;
                let mu = self.mu(rep).clone();
                let class_size = closure.count(label) as u64;
                let constant_on_class = (0..closure.len() as u32)
                    .filter(|&i| closure.label(i) == label)
                    .all(|i| *self.mu(i) == mu);
                Some(MuRow {
                    label,
                    order: closure.node(rep).order,
                    normalizer_order: g / class_size,
                    class_size,
                    mu,
                    published_mu: label.published_mu(ctx.q()),
                    constant_on_class,
                })
            })
            .collect()
    }

    /// Σ over closure nodes of μ(H, G)·(|H|/|G|)^s; nodes outside the closure
    /// have μ = 0 and contribute nothing.
    pub fn generation_probability(&self, closure: &IntersectionClosure, s: u32) -> Result<BigRational> {
        if s == 0 {
            return Err(Error::Usage("s must be at least 1".into()));
        }
        let g = BigInt::from(closure.node(closure.top()).order);
        let mut total = BigRational::zero();
        for (i, mu) in self.mu.iter().enumerate() {
            if mu.is_zero() {
                continue;
            }
            let h = BigInt::from(closure.node(i as u32).order);
            let ratio = BigRational::new(h, g.clone());
            total += BigRational::from_integer(mu.clone()) * num_traits::pow(ratio, s as usize);
        }
        Ok(total)
    }

    /// `|μ(H, G)| ≤ [G : H]` on every node; returns the offending nodes.
    pub fn mann_violations(&self, closure: &IntersectionClosure) -> Vec<u32> {
        let g = closure.node(closure.top()).order;
        (0..closure.len() as u32)
            .filter(|&i| self.mu(i).abs() > BigInt::from(g / closure.node(i).order))
            .collect()
    }

    /// Σ_{K ≥ H} μ(K, G) over the closure, for each node; zero below the top.
    pub fn upward_sums_vanish(&self) -> bool {
        let top = self.poset.top().expect("closure has a top");
        (0..self.poset.len() as u32).filter(|&x| x != top).all(|x| {
            let s: BigInt = self.poset.up(x).iter().map(|&z| self.mu(z)).sum::<BigInt>() + self.mu(x);
            s.is_zero()
        })
    }
}

/// Outcome of the seeded Monte Carlo estimate of the probability that two
/// random elements generate G.
#[derive(Clone, Debug, Serialize)]
pub struct MonteCarlo {
    pub trials: u64,
    pub successes: u64,
    pub seed: u64,
    pub estimate: f64,
    pub standard_error: f64,
}

/// Generation is decided by a Schreier–Sims order computation on the curve
/// action, independently of the maximal subgroups.
pub fn monte_carlo_generation(ctx: &GroupContext, trials: u64, seed: u64) -> MonteCarlo {
    let t = &ctx.table;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let perm = |a: u32| Perm::from_images(t.curve_perm(a).iter().map(|&x| x as u32).collect()).expect("permutation");
    let target = t.len() as u128;
    let mut successes = 0;
    for _ in 0..trials {
        let a = rng.gen_range(0..t.len() as u32);
        let b = rng.gen_range(0..t.len() as u32);
        if reaches_order(t.degree(), &[perm(a), perm(b)], target) {
            successes += 1;
        }
    }
    let p = successes as f64 / trials as f64;
    MonteCarlo {
        trials,
        successes,
        seed,
        estimate: p,
        standard_error: (p * (1.0 - p) / trials as f64).sqrt(),
    }
}

/// μ and λ for one conjugacy class, as input to the property checks.
#[derive(Clone, Debug)]
pub struct ClassValues {
    pub label: String,
    pub order: u64,
    pub normalizer_order: u64,
    pub mu: BigInt,
    pub lambda: BigInt,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyRow {
    pub label: String,
    #[serde(serialize_with = "ser_bigint")]
    pub mu: BigInt,
    pub index_in_normalizer: u64,
    #[serde(serialize_with = "ser_bigint")]
    pub lambda: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub rhs: BigInt,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    /// μ({1}, G) against |G′|·λ({1}, G).
    #[serde(serialize_with = "ser_bigint")]
    pub trivial_mu: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub trivial_rhs: BigInt,
    pub trivial_holds: bool,
    /// μ(H, G) against [N_G′(H) : H ∩ G′]·λ(H, G) per class.
    pub rows: Vec<PropertyRow>,
    pub generalized_holds: bool,
    pub counterexamples: Vec<String>,
}

/// Both sides of the (μ, λ) identities for a perfect group (G′ = G), where
/// `[N_G′(H) : H ∩ G′]` is `|N_G(H)| / |H|`.
pub fn property_checks(group_order: u64, classes: &[ClassValues]) -> Result<PropertyReport> {
    let trivial = classes
        .iter()
        .find(|c| c.order == 1)
        .ok_or_else(|| Error::Usage("the trivial class is missing".into()))?;
    let trivial_rhs = BigInt::from(group_order) * &trivial.lambda;
    let rows: Vec<PropertyRow> = classes
        .iter()
        .map(|c| {
            let index = c.normalizer_order / c.order;
            let rhs = BigInt::from(index) * &c.lambda;
            PropertyRow {
                label: c.label.clone(),
                mu: c.mu.clone(),
                index_in_normalizer: index,
                lambda: c.lambda.clone(),
                holds: rhs == c.mu,
                rhs,
            }
        })
        .collect();
    let counterexamples: Vec<String> = rows.iter().filter(|r| !r.holds).map(|r| r.label.clone()).collect();
    Ok(PropertyReport {
        trivial_holds: trivial_rhs == trivial.mu,
        trivial_mu: trivial.mu.clone(),
        trivial_rhs,
        generalized_holds: counterexamples.is_empty(),
        rows,
        counterexamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> PosetTable {
        PosetTable::from_leq(3, |a, b| a <= b).unwrap()
    }

    fn boolean(rank: u32) -> PosetTable {
        PosetTable::from_leq(1 << rank, |a, b| a & b == a).unwrap()
    }

    /// Subgroups of Sym(3) as sets of permutations of {0,1,2}, written by hand.
    fn sym3_lattice() -> PosetTable {
        let perms: Vec<[u8; 3]> = vec![[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
        let compose = |a: [u8; 3], b: [u8; 3]| [a[b[0] as usize], a[b[1] as usize], a[b[2] as usize]];
        let mut subgroups: Vec<Vec<usize>> = Vec::new();
        for mask in 1u32..64 {
            let set: Vec<usize> = (0..6).filter(|i| mask & (1 << i) != 0).collect();
            let closed = set.contains(&0)
                && set.iter().all(|&i| {
                    set.iter()
                        .all(|&j| set.contains(&perms.iter().position(|p| *p == compose(perms[i], perms[j])).unwrap()))
                });
            if closed {
                subgroups.push(set);
            }
        }
        assert_eq!(subgroups.len(), 6);
        PosetTable::from_leq(subgroups.len(), |a, b| {
            subgroups[a as usize].iter().all(|x| subgroups[b as usize].contains(x))
        })
        .unwrap()
    }

    #[test]
    fn small_posets() {
        let c = chain();
        let mu = mobius_from_top(&c).unwrap();
        assert_eq!(mu, vec![BigInt::zero(), BigInt::from(-1), BigInt::one()]);
        let b = boolean(3);
        let mu = mobius_from_top(&b).unwrap();
        assert_eq!(mu[0], BigInt::from(-1));
        assert!(dual_check(&b, &mu, None).unwrap());
        let s = sym3_lattice();
        let mu = mobius_from_top(&s).unwrap();
        assert_eq!(mu[s.bottom().unwrap() as usize], BigInt::from(3));
        assert!(dual_check(&s, &mu, None).unwrap());
        assert_eq!(s.hasse_edges().len(), 4 + 4);
    }

    #[test]
    fn no_unique_top() {
        let p = PosetTable::from_up_sets(vec![vec![], vec![]]).unwrap();
        assert!(matches!(mobius_from_top(&p), Err(Error::Usage(_))));
    }

    #[test]
    fn relabelling_keeps_mu() {
        let b = boolean(4);
        let mu = mobius_from_top(&b).unwrap();
        let perm: Vec<u32> = (0..16u32).map(|x| (x * 7 + 3) % 16).collect();
        let r = b.relabelled(&perm).unwrap();
        let mu_r = mobius_from_top(&r).unwrap();
        for x in 0..16 {
            assert_eq!(mu[x], mu_r[perm[x] as usize]);
        }
    }

    #[test]
    fn property_rows() {
        let classes = vec![
            ClassValues { label: "1".into(), order: 1, normalizer_order: 60, mu: BigInt::zero(), lambda: BigInt::zero() },
            ClassValues { label: "C2".into(), order: 2, normalizer_order: 8, mu: BigInt::from(-4), lambda: BigInt::from(-1) },
            ClassValues { label: "X".into(), order: 3, normalizer_order: 6, mu: BigInt::from(1), lambda: BigInt::zero() },
        ];
        let r = property_checks(60, &classes).unwrap();
        assert!(r.trivial_holds);
        assert!(!r.generalized_holds);
        assert_eq!(r.counterexamples, vec!["X".to_string()]);
    }

    #[test]
    fn closure_mu() {
        let f = crate::testkit::fixture();
        let m = ClosureMobius::compute(&f.closure).unwrap();
        m.poset.validate().unwrap();
        let rows = m.table(&f.ctx, &f.closure);
        for r in &rows {
            assert!(r.constant_on_class, "{}", r.label.label());
            assert_eq!(r.mu, BigInt::from(r.published_mu), "{}", r.label.label());
        }
        assert!(m.upward_sums_vanish());
        assert!(m.mann_violations(&f.closure).is_empty());
        let reps: Vec<u32> = ClosureType::ALL.iter().map(|&l| f.closure.representative(l).unwrap()).collect();
        assert!(dual_check(&m.poset, &m.mu, Some(&reps)).unwrap());
        let p2 = m.generation_probability(&f.closure, 2).unwrap();
        assert!(p2 > BigRational::zero() && p2 < BigRational::one());
        let start = std::time::Instant::now();
        let mc = monte_carlo_generation(&f.ctx, 2000, 1);
        eprintln!("p2 = {} ~ {:.5}; mc {:?} in {:?}", p2, p2.to_f64().unwrap(), mc, start.elapsed());
        assert!((mc.estimate - p2.to_f64().unwrap()).abs() < 4.0 * mc.standard_error.max(1e-3));
    }
}
