//! Subgroups of G at q = 4 as sorted element-id sets over an [`ElementTable`].

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::ElementTable;

/// Fixed-size bit set over element ids.
#[derive(Clone, Debug)]
pub struct Bitset {
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(n: usize) -> Self {
        Bitset {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn from_ids(n: usize, ids: &[u32]) -> Self {
        let mut b = Bitset::new(n);
        for &x in ids {
            b.insert(x);
        }
        b
    }

    #[inline]
    pub fn insert(&mut self, x: u32) -> bool {
        let (w, bit) = ((x >> 6) as usize, 1u64 << (x & 63));
        let fresh = self.words[w] & bit == 0;
        self.words[w] |= bit;
        fresh
    }

    #[inline]
    pub fn contains(&self, x: u32) -> bool {
        self.words[(x >> 6) as usize] & (1u64 << (x & 63)) != 0
    }
}

/// Closure of `gens` under multiplication, sorted.
pub fn generate(t: &ElementTable, gens: &[u32]) -> Vec<u32> {
    generate_capped(t, gens, usize::MAX).expect("uncapped closure")
}

/// As [`generate`], giving up once more than `cap` elements are found.
pub fn generate_capped(t: &ElementTable, gens: &[u32], cap: usize) -> Option<Vec<u32>> {
    let mut seen = Bitset::new(t.len());
    seen.insert(0);
    let mut out = vec![0u32];
    let mut i = 0;
    while i < out.len() {
        let x = out[i];
        for &g in gens {
            let y = t.mul(x, g);
            if seen.insert(y) {
                if out.len() >= cap {
                    return None;
                }
                out.push(y);
            }
        }
        i += 1;
    }
    out.sort_unstable();
    Some(out)
}

pub fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub fn is_subset(a: &[u32], b: &[u32]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// Few generators: elements taken by decreasing order, kept when not yet generated.
pub fn greedy_generators(t: &ElementTable, elems: &[u32]) -> Vec<u32> {
    let mut candidates: Vec<u32> = elems.iter().copied().filter(|&x| x != 0).collect();
    candidates.sort_by_key(|&x| (std::cmp::Reverse(t.order(x)), x));
    let mut gens = Vec::new();
    let mut current = Bitset::new(t.len());
    current.insert(0);
    let mut size = 1;
    for x in candidates {
        if size == elems.len() {
            break;
        }
        if current.contains(x) {
            continue;
        }
        gens.push(x);
        let h = generate(t, &gens);
        size = h.len();
        current = Bitset::from_ids(t.len(), &h);
    }
    gens
}

pub fn conjugate_set(t: &ElementTable, elems: &[u32], g: u32) -> Vec<u32> {
    let gi = t.inv(g);
    let mut out: Vec<u32> = elems.iter().map(|&x| t.mul(t.mul(g, x), gi)).collect();
    out.sort_unstable();
    out
}

pub fn apply_map(map: &[u32], elems: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = elems.iter().map(|&x| map[x as usize]).collect();
    out.sort_unstable();
    out
}

/// `N_G(H)` by testing every element against the generators of `H`.
pub fn normalizer_brute(t: &ElementTable, elems: &[u32], gens: &[u32]) -> Vec<u32> {
    let member = Bitset::from_ids(t.len(), elems);
    (0..t.len() as u32)
        .filter(|&g| gens.iter().all(|&h| member.contains(t.conj(g, h))))
        .collect()
}

/// Conjugates of `H` by orbit enumeration under the generators of G, with
/// the transversal element reaching each. Fails past `budget` conjugates.
pub fn conjugation_orbit(
    t: &ElementTable,
    conj_maps: &[Vec<u32>],
    elems: &[u32],
    budget: usize,
) -> Result<Vec<(Vec<u32>, u32)>> {
    let mut index = rustc_hash::FxHashMap::default();
    let mut orbit = vec![(elems.to_vec(), 0u32)];
    index.insert(elems.to_vec(), 0usize);
    let mut i = 0;
    while i < orbit.len() {
        for (s, map) in conj_maps.iter().enumerate() {
            let image = apply_map(map, &orbit[i].0);
            if !index.contains_key(&image) {
                if orbit.len() >= budget {
                    return Err(Error::Resource(format!(
                        "conjugation orbit exceeds the budget of {budget}"
                    )));
                }
                let g = t.mul(t.generators()[s], orbit[i].1);
                index.insert(image.clone(), orbit.len());
                orbit.push((image, g));
            }
        }
        i += 1;
    }
    Ok(orbit)
}

/// `N_G(H)` by orbit–stabiliser on the conjugation action: Schreier
/// generators of the stabiliser of `H`, together with `H` itself.
pub fn normalizer_via_orbit(
    t: &ElementTable,
    conj_maps: &[Vec<u32>],
    elems: &[u32],
    gens: &[u32],
    budget: usize,
) -> Result<Vec<u32>> {
    let orbit = conjugation_orbit(t, conj_maps, elems, budget)?;
    let target = t.len() / orbit.len();
    let index: rustc_hash::FxHashMap<&[u32], u32> =
        orbit.iter().map(|(set, g)| (set.as_slice(), *g)).collect();
    let mut ngens: Vec<u32> = gens.to_vec();
    let mut current = generate(t, &ngens);
    'outer: for (set, u) in &orbit {
        for (s, map) in conj_maps.iter().enumerate() {
            if current.len() == target {
                break 'outer;
            }
            let image = apply_map(map, set);
            let v = index[image.as_slice()];
            let schreier = t.mul(t.inv(v), t.mul(t.generators()[s], *u));
            if current.binary_search(&schreier).is_err() {
                ngens.push(schreier);
                current = generate(t, &ngens);
            }
        }
    }
    if current.len() != target {
        return Err(Error::Invariant("normalizer order disagrees with orbit length".into()));
    }
    Ok(current)
}

pub fn is_abelian(t: &ElementTable, gens: &[u32]) -> bool {
    gens.iter()
        .enumerate()
        .all(|(i, &a)| gens[i + 1..].iter().all(|&b| t.mul(a, b) == t.mul(b, a)))
}

pub fn exponent(t: &ElementTable, elems: &[u32]) -> u64 {
    elems.iter().fold(1, |acc, &x| num_integer::lcm(acc, t.order(x)))
}

/// Curve points fixed by every element of the subgroup.
pub fn fixed_curve_points(t: &ElementTable, gens: &[u32]) -> Vec<u32> {
    (0..t.degree() as u32)
        .filter(|&p| gens.iter().all(|&g| t.curve_perm(g)[p as usize] as u32 == p))
        .collect()
}

/// Plane points fixed by every element of the subgroup.
pub fn fixed_plane_points(t: &ElementTable, gens: &[u32]) -> Vec<u32> {
    (0..t.plane_size() as u32)
        .filter(|&p| gens.iter().all(|&g| t.plane_perm(g)[p as usize] as u32 == p))
        .collect()
}

/// Smallest subgroup containing `gens` and closed under conjugation by `by`.
pub fn normal_closure(t: &ElementTable, gens: &[u32], by: &[u32]) -> Vec<u32> {
    let mut ngens: Vec<u32> = gens.to_vec();
    let mut current = generate(t, &ngens);
    loop {
        let mut grew = false;
        let snapshot = ngens.clone();
        for &x in &snapshot {
            for &g in by {
                let y = t.conj(g, x);
                if current.binary_search(&y).is_err() {
                    ngens.push(y);
                    current = generate(t, &ngens);
                    grew = true;
                }
            }
        }
        if !grew {
            return current;
        }
    }
}

/// `[H,H]` as the normal closure in `H` of the generator commutators.
pub fn derived_subgroup(t: &ElementTable, gens: &[u32]) -> Vec<u32> {
    let mut comms = Vec::new();
    for (i, &a) in gens.iter().enumerate() {
        for &b in &gens[i + 1..] {
            let c = t.commutator(a, b);
            if c != 0 {
                comms.push(c);
            }
        }
    }
    normal_closure(t, &comms, gens)
}

/// Orders along the derived series, ending at the first repeat.
pub fn derived_series(t: &ElementTable, elems: &[u32], gens: &[u32]) -> Vec<usize> {
    let mut orders = vec![elems.len()];
    let mut g = gens.to_vec();
    let mut size = elems.len();
    loop {
        let d = derived_subgroup(t, &g);
        if d.len() == size {
            return orders;
        }
        orders.push(d.len());
        if d.len() == 1 {
            return orders;
        }
        size = d.len();
        g = greedy_generators(t, &d);
    }
}

pub fn is_solvable(t: &ElementTable, elems: &[u32], gens: &[u32]) -> bool {
    derived_series(t, elems, gens).last() == Some(&1)
}

/// Canonical identity of a subgroup. Element sets are exact; the signature is
/// only used above the materialisation limit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fingerprint {
    Elements(Vec<u32>),
    Signature {
        order: u64,
        generator_profile: Vec<(u64, u64)>,
        fixed_curve_points: Vec<u32>,
    },
}

/// Largest order for which the element set serves as fingerprint.
pub const EXACT_FINGERPRINT_LIMIT: usize = 1024;

impl Fingerprint {
    pub fn of(t: &ElementTable, elems: &[u32], gens: &[u32]) -> Self {
        if elems.len() <= EXACT_FINGERPRINT_LIMIT {
            Fingerprint::Elements(elems.to_vec())
        } else {
            let mut profile: Vec<(u64, u64)> =
                gens.iter().map(|&g| (t.order(g), t.fixed_curve(g))).collect();
            profile.sort_unstable();
            Fingerprint::Signature {
                order: elems.len() as u64,
                generator_profile: profile,
                fixed_curve_points: fixed_curve_points(t, gens),
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Fingerprint::Elements(_))
    }

    /// Short stable hex digest for reports and cache files.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        match self {
            Fingerprint::Elements(e) => {
                h.update(b"E");
                for x in e {
                    h.update(x.to_le_bytes());
                }
            }
            Fingerprint::Signature {
                order,
                generator_profile,
                fixed_curve_points,
            } => {
                h.update(b"S");
                h.update(order.to_le_bytes());
                for (a, b) in generator_profile {
                    h.update(a.to_le_bytes());
                    h.update(b.to_le_bytes());
                }
                for x in fixed_curve_points {
                    h.update(x.to_le_bytes());
                }
            }
        }
        hex::encode(&h.finalize()[..8])
    }
}

/// Invariants used to label subgroups and to separate classes cheaply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Signature {
    pub order: u64,
    pub abelian: bool,
    pub exponent: u64,
    pub fixed_curve_points: u64,
}

impl Signature {
    pub fn of(t: &ElementTable, elems: &[u32], gens: &[u32]) -> Self {
        Signature {
            order: elems.len() as u64,
            abelian: is_abelian(t, gens),
            exponent: exponent(t, elems),
            fixed_curve_points: fixed_curve_points(t, gens).len() as u64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupRecord {
    pub elements: Vec<u32>,
    pub generators: Vec<u32>,
    pub order: u64,
    pub class_id: Option<u32>,
    pub type_label: Option<String>,
}

impl SubgroupRecord {
    pub fn from_generators(t: &ElementTable, gens: &[u32]) -> Self {
        let elements = generate(t, gens);
        SubgroupRecord {
            order: elements.len() as u64,
            generators: gens.to_vec(),
            elements,
            class_id: None,
            type_label: None,
        }
    }

    pub fn from_elements(t: &ElementTable, elements: Vec<u32>) -> Result<Self> {
        let generators = greedy_generators(t, &elements);
        if generate(t, &generators) != elements {
            return Err(Error::Usage("element set is not a subgroup".into()));
        }
        Ok(SubgroupRecord {
            order: elements.len() as u64,
            generators,
            elements,
            class_id: None,
            type_label: None,
        })
    }

    pub fn fingerprint(&self, t: &ElementTable) -> Fingerprint {
        Fingerprint::of(t, &self.elements, &self.generators)
    }

    pub fn contains(&self, x: u32) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &SubgroupRecord) -> bool {
        is_subset(&self.elements, &other.elements)
    }

    pub fn conjugate(&self, t: &ElementTable, g: u32) -> SubgroupRecord {
        SubgroupRecord {
            elements: conjugate_set(t, &self.elements, g),
            generators: self.generators.iter().map(|&h| t.conj(g, h)).collect(),
            order: self.order,
            class_id: self.class_id,
            type_label: self.type_label.clone(),
        }
    }

    /// Equality by mutual generator membership.
    pub fn equals(&self, other: &SubgroupRecord) -> bool {
        self.order == other.order
            && self.generators.iter().all(|&g| other.contains(g))
            && other.generators.iter().all(|&g| self.contains(g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Psu3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::OnceLock;

    fn table() -> &'static ElementTable {
        static T: OnceLock<ElementTable> = OnceLock::new();
        T.get_or_init(|| ElementTable::build(&Psu3::build(1).unwrap()).unwrap())
    }

    fn first_of_order(t: &ElementTable, o: u64) -> u32 {
        (1..t.len() as u32).find(|&x| t.order(x) == o).unwrap()
    }

    #[test]
    fn cyclic_and_normalizers() {
        let t = table();
        let maps: Vec<Vec<u32>> = t.generators().iter().map(|&g| t.conjugation_map(g)).collect();
        for (o, n) in [(2u64, 320usize), (3, 30), (13, 39)] {
            let x = first_of_order(t, o);
            let h = generate(t, &[x]);
            assert_eq!(h.len() as u64, o);
            let nb = normalizer_brute(t, &h, &[x]);
            assert_eq!(nb.len(), n);
            let no = normalizer_via_orbit(t, &maps, &h, &[x], 100_000).unwrap();
            assert_eq!(nb, no);
        }
        let x = first_of_order(t, 2);
        assert!(conjugation_orbit(t, &maps, &generate(t, &[x]), 10).is_err());
    }

    #[test]
    fn simplicity_smoke() {
        let t = table();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let x = rng.gen_range(1..t.len() as u32);
            let nc = normal_closure(t, &[x], t.generators());
            assert_eq!(nc.len(), t.len());
        }
    }

    #[test]
    fn record_operations() {
        let t = table();
        let x = first_of_order(t, 15);
        let h = SubgroupRecord::from_generators(t, &[x]);
        assert_eq!(h.order, 15);
        assert!(h.conjugate(t, 0).equals(&h));
        let g = first_of_order(t, 13);
        let k = h.conjugate(t, g);
        assert_eq!(k.elements, conjugate_set(t, &h.elements, g));
        assert!(SubgroupRecord::from_elements(t, vec![0, 1]).is_err() || t.order(1) == 2);
        let fp = h.fingerprint(t);
        assert!(fp.is_exact());
        assert_eq!(fp.digest().len(), 16);
        assert_eq!(greedy_generators(t, &h.elements).len(), 1);
        assert_eq!(derived_series(t, &h.elements, &h.generators), vec![15, 1]);
        let whole = Fingerprint::of(t, &(0..t.len() as u32).collect::<Vec<_>>(), t.generators());
        assert!(!whole.is_exact());
    }

    #[test]
    fn set_helpers() {
        assert_eq!(intersect(&[1, 3, 5, 7], &[3, 4, 5]), vec![3, 5]);
        assert!(is_subset(&[3, 5], &[1, 3, 5]));
        assert!(!is_subset(&[2], &[1, 3]));
        let mut b = Bitset::new(100);
        assert!(b.insert(70));
        assert!(!b.insert(70));
        assert!(b.contains(70) && !b.contains(71));
    }
}
