//! Permutations and a deterministic Schreier–Sims implementation.

use std::fmt;

use rand::Rng;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

/// A permutation of `0..n`, stored as its image list: `p[i]` is the image of `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Box<[u32]>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x as usize >= n || std::mem::replace(&mut seen[x as usize], true) {
                return Err(Error::Usage("image list is not a permutation".into()));
            }
        }
        Ok(Perm(images.into_boxed_slice()))
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv.into_boxed_slice())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn first_moved(&self) -> Option<u32> {
        self.0
            .iter()
            .enumerate()
            .find(|(i, &x)| *i as u32 != x)
            .map(|(i, _)| i as u32)
    }

    pub fn fixed_count(&self) -> usize {
        self.0.iter().enumerate().filter(|(i, &x)| *i as u32 == x).count()
    }

    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.0.len()];
        let mut acc = 1u64;
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x] as usize;
                len += 1;
            }
            acc = num_integer::lcm(acc, len);
        }
        acc
    }

    /// `g ∘ self ∘ g⁻¹`.
    pub fn conjugate_by(&self, g: &Perm) -> Perm {
        let mut out = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            out[g.0[i] as usize] = g.0[x as usize];
        }
        Perm(out.into_boxed_slice())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "()");
        }
        let mut seen = vec![false; self.0.len()];
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.0[x] as usize;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct BaseLevel {
    point: u32,
    gens: Vec<usize>,
    orbit: Vec<u32>,
    transversal: FxHashMap<u32, Perm>,
    cursor: (usize, usize),
}

impl BaseLevel {
    fn new(point: u32) -> Self {
        BaseLevel {
            point,
            gens: Vec::new(),
            orbit: Vec::new(),
            transversal: FxHashMap::default(),
            cursor: (0, 0),
        }
    }

    fn rebuild(&mut self, strong: &[Perm]) {
        let n = strong.first().map_or(0, |g| g.degree());
        self.transversal.clear();
        self.transversal.insert(self.point, Perm::identity(n));
        self.orbit = vec![self.point];
        let mut i = 0;
        while i < self.orbit.len() {
            let x = self.orbit[i];
            for &g in &self.gens {
                let y = strong[g].apply(x);
                if !self.transversal.contains_key(&y) {
                    let u = strong[g].compose(&self.transversal[&x]);
                    self.transversal.insert(y, u);
                    self.orbit.push(y);
                }
            }
            i += 1;
        }
        self.cursor = (0, 0);
    }
}

/// Base and strong generating set.
#[derive(Clone, Debug)]
pub struct Bsgs {
    degree: usize,
    strong: Vec<Perm>,
    levels: Vec<BaseLevel>,
}

impl Bsgs {
    /// Deterministic Schreier–Sims. The base starts with `prefix`; further
    /// points are the lowest point moved by the generator that needs them.
    pub fn new(degree: usize, gens: &[Perm], prefix: &[u32]) -> Result<Self> {
        for g in gens {
            if g.degree() != degree {
                return Err(Error::Usage(format!(
                    "generator of degree {} in a group of degree {degree}",
                    g.degree()
                )));
            }
        }
        let mut bsgs = Bsgs {
            degree,
            strong: Vec::new(),
            levels: prefix.iter().map(|&p| BaseLevel::new(p)).collect(),
        };
        for g in gens {
            if g.is_identity() || bsgs.strong.contains(g) {
                continue;
            }
            if bsgs.levels.iter().all(|l| g.apply(l.point) == l.point) {
                let p = g.first_moved().expect("non-identity");
                bsgs.levels.push(BaseLevel::new(p));
            }
            bsgs.strong.push(g.clone());
        }
        for i in 0..bsgs.levels.len() {
            bsgs.levels[i].gens = bsgs.gens_fixing_prefix(i);
            bsgs.levels[i].rebuild(&bsgs.strong);
        }
        bsgs.complete();
        Ok(bsgs)
    }

    fn gens_fixing_prefix(&self, i: usize) -> Vec<usize> {
        (0..self.strong.len())
            .filter(|&g| self.levels[..i].iter().all(|l| self.strong[g].apply(l.point) == l.point))
            .collect()
    }

    fn complete(&mut self) {
        if self.levels.is_empty() {
            return;
        }
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let lvl = i as usize;
            match self.check_level(lvl) {
                None => i -= 1,
                Some((h, j)) => {
                    if j == self.levels.len() {
                        let p = h.first_moved().expect("non-identity residue");
                        self.levels.push(BaseLevel::new(p));
                    }
                    self.strong.push(h);
                    let id = self.strong.len() - 1;
                    for l in lvl + 1..=j {
                        self.levels[l].gens.push(id);
                        self.levels[l].rebuild(&self.strong);
                    }
                    i = j as isize;
                }
            }
        }
    }

    /// Sifts the Schreier generators of one level, resuming from its cursor.
    /// Returns the first residue that fails to sift and the level where it failed.
    fn check_level(&mut self, lvl: usize) -> Option<(Perm, usize)> {
        let (mut oi, mut gi) = self.levels[lvl].cursor;
        while oi < self.levels[lvl].orbit.len() {
            let beta = self.levels[lvl].orbit[oi];
            while gi < self.levels[lvl].gens.len() {
                let s = &self.strong[self.levels[lvl].gens[gi]];
                let level = &self.levels[lvl];
                let u_beta = &level.transversal[&beta];
                let image = s.apply(beta);
                let u_image = &level.transversal[&image];
                let g = u_image.inverse().compose(&s.compose(u_beta));
                if !g.is_identity() {
                    let (h, j) = self.strip(g, lvl + 1);
                    if j < self.levels.len() || !h.is_identity() {
                        self.levels[lvl].cursor = (oi, gi);
                        return Some((h, j));
                    }
                }
                gi += 1;
            }
            gi = 0;
            oi += 1;
        }
        self.levels[lvl].cursor = (oi, gi);
        None
    }

    fn strip(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for (l, level) in self.levels.iter().enumerate().skip(from) {
            let beta = g.apply(level.point);
            match level.transversal.get(&beta) {
                None => return (g, l),
                Some(u) => g = u.inverse().compose(&g),
            }
        }
        (g, self.levels.len())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.strong
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (h, j) = self.strip(g.clone(), 0);
        j == self.levels.len() && h.is_identity()
    }

    /// Uniform random element as a product of random transversal elements.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Perm {
        let mut g = Perm::identity(self.degree);
        for level in self.levels.iter().rev() {
            let beta = level.orbit[rng.gen_range(0..level.orbit.len())];
            g = level.transversal[&beta].compose(&g);
        }
        g
    }

    /// Generators of the stabiliser of the first `k` base points.
    pub fn stabilizer_generators(&self, k: usize) -> Vec<Perm> {
        if k >= self.levels.len() {
            return Vec::new();
        }
        self.levels[k].gens.iter().map(|&g| self.strong[g].clone()).collect()
    }
}

/// Order of `⟨gens⟩`, stopping as soon as the partial orbit-length product
/// reaches `target`. Returns `true` iff the generated group has order ≥ `target`.
///
/// The orbits computed at any stage of Schreier–Sims are orbits of subgroups
/// of the true point stabilisers, so the partial product is a lower bound.
pub fn reaches_order(degree: usize, gens: &[Perm], target: u128) -> bool {
    let mut bsgs = Bsgs {
        degree,
        strong: Vec::new(),
        levels: Vec::new(),
    };
    for g in gens {
        if g.is_identity() {
            continue;
        }
        if bsgs.levels.iter().all(|l| g.apply(l.point) == l.point) {
            bsgs.levels.push(BaseLevel::new(g.first_moved().expect("non-identity")));
        }
        bsgs.strong.push(g.clone());
    }
    if bsgs.levels.is_empty() {
        return target <= 1;
    }
    for i in 0..bsgs.levels.len() {
        bsgs.levels[i].gens = bsgs.gens_fixing_prefix(i);
        bsgs.levels[i].rebuild(&bsgs.strong);
    }
    if bsgs.order() >= target {
        return true;
    }
    let mut i = bsgs.levels.len() as isize - 1;
    while i >= 0 {
        let lvl = i as usize;
        match bsgs.check_level(lvl) {
            None => i -= 1,
            Some((h, j)) => {
                if j == bsgs.levels.len() {
                    let p = h.first_moved().expect("non-identity residue");
                    bsgs.levels.push(BaseLevel::new(p));
                }
                bsgs.strong.push(h);
                let id = bsgs.strong.len() - 1;
                for l in lvl + 1..=j {
                    bsgs.levels[l].gens.push(id);
                    bsgs.levels[l].rebuild(&bsgs.strong);
                }
                if bsgs.order() >= target {
                    return true;
                }
                i = j as isize;
            }
        }
    }
    bsgs.order() >= target
}

/// A permutation group given by generators, with its BSGS.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    bsgs: Bsgs,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        let bsgs = Bsgs::new(degree, &generators, &[])?;
        Ok(PermGroup {
            degree,
            generators,
            bsgs,
        })
    }

    pub fn with_base_prefix(degree: usize, generators: Vec<Perm>, prefix: &[u32]) -> Result<Self> {
        let bsgs = Bsgs::new(degree, &generators, prefix)?;
        Ok(PermGroup {
            degree,
            generators,
            bsgs,
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::new(degree, Vec::new()).expect("trivial group")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn bsgs(&self) -> &Bsgs {
        &self.bsgs
    }

    pub fn order(&self) -> u128 {
        self.bsgs.order()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.bsgs.contains(g)
    }

    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Perm {
        self.bsgs.random_element(rng)
    }

    pub fn orbit(&self, point: u32) -> Vec<u32> {
        orbit(&self.generators, point)
    }

    pub fn is_transitive_on(&self, points: &[u32]) -> bool {
        match points.first() {
            None => true,
            Some(&p) => {
                let mut o = self.orbit(p);
                o.sort_unstable();
                let mut pts = points.to_vec();
                pts.sort_unstable();
                o == pts
            }
        }
    }

    /// Point stabiliser, via a Schreier–Sims rerun with `point` as first base point.
    pub fn stabilizer(&self, point: u32) -> Result<PermGroup> {
        let full = Bsgs::new(self.degree, self.bsgs.strong_generators(), &[point])?;
        PermGroup::new(self.degree, full.stabilizer_generators(1))
    }

    /// Setwise stabiliser of a block, given the action on blocks as a map from
    /// a sorted point set to its image. Computed by orbit–stabiliser on images.
    pub fn set_stabilizer(&self, block: &[u32], budget: usize) -> Result<PermGroup> {
        let mut key = block.to_vec();
        key.sort_unstable();
        let image = |g: &Perm, b: &Vec<u32>| {
            let mut v: Vec<u32> = b.iter().map(|&x| g.apply(x)).collect();
            v.sort_unstable();
            v
        };
        self.orbit_stabilizer(key, image, budget)
    }

    /// Stabiliser of `seed` under an action given by `act`, by Schreier
    /// generators over the orbit. The orbit is capped at `budget` points.
    pub fn orbit_stabilizer<K, F>(&self, seed: K, act: F, budget: usize) -> Result<PermGroup>
    where
        K: Clone + Eq + std::hash::Hash,
        F: Fn(&Perm, &K) -> K,
    {
        let mut transversal: FxHashMap<K, Perm> = FxHashMap::default();
        let mut orbit = vec![seed.clone()];
        transversal.insert(seed, Perm::identity(self.degree));
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i].clone();
            for s in &self.generators {
                let y = act(s, &x);
                if !transversal.contains_key(&y) {
                    if orbit.len() >= budget {
                        return Err(Error::Resource(format!(
                            "orbit exceeds the budget of {budget} points"
                        )));
                    }
                    let u = s.compose(&transversal[&x]);
                    transversal.insert(y.clone(), u);
                    orbit.push(y);
                }
            }
            i += 1;
        }
        let target = self.order() / orbit.len() as u128;
        let mut stab = PermGroup::trivial(self.degree);
        'done: for x in &orbit {
            for s in &self.generators {
                if stab.order() == target {
                    break 'done;
                }
                let y = act(s, x);
                let g = transversal[&y].inverse().compose(&s.compose(&transversal[x]));
                if !stab.contains(&g) {
                    let mut gens = stab.generators.clone();
                    gens.push(g);
                    stab = PermGroup::new(self.degree, gens)?;
                }
            }
        }
        if stab.order() != target {
            return Err(Error::Invariant("orbit–stabiliser order mismatch".into()));
        }
        Ok(stab)
    }

    /// All elements, in BSGS order. Only sensible for small groups.
    pub fn elements(&self) -> Vec<Perm> {
        let mut out = vec![Perm::identity(self.degree)];
        for level in self.bsgs.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for beta in &level.orbit {
                let u = &level.transversal[beta];
                for g in &out {
                    next.push(u.compose(g));
                }
            }
            out = next;
        }
        out
    }

    pub fn conjugate(&self, g: &Perm) -> Result<PermGroup> {
        PermGroup::new(
            self.degree,
            self.generators.iter().map(|h| h.conjugate_by(g)).collect(),
        )
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.generators.iter().all(|g| other.contains(g))
    }

    /// Equality by mutual generator membership.
    pub fn equals(&self, other: &PermGroup) -> bool {
        self.is_subgroup_of(other) && other.is_subgroup_of(self)
    }

    /// `N_self(h)` by orbit–stabiliser on the conjugation action; conjugates
    /// are keyed by their sorted element lists, capped at `budget`.
    pub fn normalizer(&self, h: &PermGroup, budget: usize) -> Result<PermGroup> {
        let mut key = h.elements();
        key.sort_unstable();
        self.orbit_stabilizer(
            key,
            |g, elems: &Vec<Perm>| {
                let mut v: Vec<Perm> = elems.iter().map(|x| x.conjugate_by(g)).collect();
                v.sort_unstable();
                v
            },
            budget,
        )
    }
}

pub fn orbit(gens: &[Perm], point: u32) -> Vec<u32> {
    let mut seen = rustc_hash::FxHashSet::default();
    seen.insert(point);
    let mut out = vec![point];
    let mut i = 0;
    while i < out.len() {
        let x = out[i];
        for g in gens {
            let y = g.apply(x);
            if seen.insert(y) {
                out.push(y);
            }
        }
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cycle(n: usize) -> Perm {
        Perm::from_images((0..n as u32).map(|i| (i + 1) % n as u32).collect()).unwrap()
    }

    fn transposition(n: usize, a: u32, b: u32) -> Perm {
        let mut v: Vec<u32> = (0..n as u32).collect();
        v.swap(a as usize, b as usize);
        Perm::from_images(v).unwrap()
    }

    #[test]
    fn symmetric_group_orders() {
        for n in 2..8 {
            let g = PermGroup::new(n, vec![cycle(n), transposition(n, 0, 1)]).unwrap();
            let fact: u128 = (1..=n as u128).product();
            assert_eq!(g.order(), fact);
        }
    }

    #[test]
    fn alternating_group_membership() {
        let n = 6;
        let three = |a: u32, b: u32, c: u32| {
            let mut v: Vec<u32> = (0..n as u32).collect();
            v[a as usize] = b;
            v[b as usize] = c;
            v[c as usize] = a;
            Perm::from_images(v).unwrap()
        };
        let gens: Vec<Perm> = (2..n as u32).map(|k| three(0, 1, k)).collect();
        let a6 = PermGroup::new(n, gens).unwrap();
        assert_eq!(a6.order(), 360);
        assert!(!a6.contains(&transposition(n, 0, 1)));
        assert!(a6.contains(&three(3, 4, 5)));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert!(a6.contains(&a6.random_element(&mut rng)));
        }
        let stab = a6.stabilizer(0).unwrap();
        assert_eq!(stab.order(), 60);
        assert_eq!(a6.elements().len(), 360);
        assert!(reaches_order(n, a6.generators(), 360));
        assert!(!reaches_order(n, a6.generators(), 361));
    }

    #[test]
    fn normalizer_in_s4() {
        let n = 4;
        let s4 = PermGroup::new(n, vec![cycle(n), transposition(n, 0, 1)]).unwrap();
        let v4 = PermGroup::new(
            n,
            vec![
                Perm::from_images(vec![1, 0, 3, 2]).unwrap(),
                Perm::from_images(vec![2, 3, 0, 1]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(s4.normalizer(&v4, 100).unwrap().order(), 24);
        let c2 = PermGroup::new(n, vec![transposition(n, 0, 1)]).unwrap();
        assert_eq!(s4.normalizer(&c2, 100).unwrap().order(), 4);
        assert!(s4.normalizer(&c2, 2).is_err());
        let g = cycle(n);
        assert!(c2.conjugate(&Perm::identity(n)).unwrap().equals(&c2));
        assert!(!c2.conjugate(&g).unwrap().equals(&c2));
    }

    #[test]
    fn perm_basics() {
        let c = cycle(5);
        assert_eq!(c.order(), 5);
        assert!(c.compose(&c.inverse()).is_identity());
        assert_eq!(format!("{c:?}"), "(0 1 2 3 4)");
        assert!(Perm::from_images(vec![0, 0]).is_err());
        let t = transposition(5, 0, 1);
        let ct = t.conjugate_by(&c);
        assert_eq!(ct, c.compose(&t).compose(&c.inverse()));
    }
}
