//! Maximal subgroups of G, their intersection closure and the triangle
//! counting checks at q = 4.

use rustc_hash::FxHashMap;
use serde::{Serialize, Serializer};

use crate::context::GroupContext;
use crate::error::{Error, Result};
use crate::geometry::Plane;
use crate::group::{group_order_formula, Psu3};
use crate::subgroup::{
    conjugation_orbit, generate, greedy_generators, intersect, is_abelian,
    normalizer_brute, Signature, SubgroupRecord,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MaximalKind {
    M1,
    M2,
    M3,
    M4,
}

impl MaximalKind {
    pub const ALL: [MaximalKind; 4] = [MaximalKind::M1, MaximalKind::M2, MaximalKind::M3, MaximalKind::M4];

    pub fn order(self, q: u64) -> u128 {
        self.closure_type().order(q)
    }

    pub fn closure_type(self) -> ClosureType {
        match self {
            MaximalKind::M1 => ClosureType::Borel,
            MaximalKind::M2 => ClosureType::Psl2TimesC,
            MaximalKind::M3 => ClosureType::TorusSym3,
            MaximalKind::M4 => ClosureType::SingerC3,
        }
    }
}

/// Isomorphism types occurring in the intersection closure, in the customary
/// order, followed by G itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClosureType {
    Borel,
    Psl2TimesC,
    TorusSym3,
    SingerC3,
    EqSplit,
    TorusC2,
    Torus,
    CyclicQ2Minus1,
    Cyclic2QPlus1,
    Homology,
    Eq,
    Sym3,
    C3,
    C2,
    Trivial,
    Whole,
}

impl Serialize for ClosureType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl ClosureType {
    pub const ALL: [ClosureType; 16] = [
        ClosureType::Borel,
        ClosureType::Psl2TimesC,
        ClosureType::TorusSym3,
        ClosureType::SingerC3,
        ClosureType::EqSplit,
        ClosureType::TorusC2,
        ClosureType::Torus,
        ClosureType::CyclicQ2Minus1,
        ClosureType::Cyclic2QPlus1,
        ClosureType::Homology,
        ClosureType::Eq,
        ClosureType::Sym3,
        ClosureType::C3,
        ClosureType::C2,
        ClosureType::Trivial,
        ClosureType::Whole,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ClosureType::Borel => "S2:C(q^2-1)",
            ClosureType::Psl2TimesC => "PSL(2,q)xC(q+1)",
            ClosureType::TorusSym3 => "(C(q+1)xC(q+1)):Sym(3)",
            ClosureType::SingerC3 => "C(q^2-q+1):C3",
            ClosureType::EqSplit => "Eq:C(q^2-1)",
            ClosureType::TorusC2 => "(C(q+1)xC(q+1)):C2",
            ClosureType::Torus => "C(q+1)xC(q+1)",
            ClosureType::CyclicQ2Minus1 => "C(q^2-1)",
            ClosureType::Cyclic2QPlus1 => "C(2(q+1))",
            ClosureType::Homology => "C(q+1)=Z(M2)",
            ClosureType::Eq => "Eq",
            ClosureType::Sym3 => "Sym(3)",
            ClosureType::C3 => "C3",
            ClosureType::C2 => "C2",
            ClosureType::Trivial => "1",
            ClosureType::Whole => "G",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        ClosureType::ALL.into_iter().find(|t| t.label() == label)
    }

    pub fn order(self, q: u64) -> u128 {
        let q = q as u128;
        match self {
            ClosureType::Borel => q * q * q * (q * q - 1),
            ClosureType::Psl2TimesC => q * (q * q - 1) * (q + 1),
            ClosureType::TorusSym3 => 6 * (q + 1) * (q + 1),
            ClosureType::SingerC3 => 3 * (q * q - q + 1),
            ClosureType::EqSplit => q * (q * q - 1),
            ClosureType::TorusC2 => 2 * (q + 1) * (q + 1),
            ClosureType::Torus => (q + 1) * (q + 1),
            ClosureType::CyclicQ2Minus1 => q * q - 1,
            ClosureType::Cyclic2QPlus1 => 2 * (q + 1),
            ClosureType::Homology => q + 1,
            ClosureType::Eq => q,
            ClosureType::Sym3 => 6,
            ClosureType::C3 => 3,
            ClosureType::C2 => 2,
            ClosureType::Trivial => 1,
            ClosureType::Whole => group_order_formula(q as u64),
        }
    }

    /// Expected `|N_G(H)|`.
    pub fn normalizer_order(self, q: u64) -> u128 {
        let qq = q as u128;
        match self {
            ClosureType::Torus => ClosureType::TorusSym3.order(q),
            ClosureType::CyclicQ2Minus1 => 2 * (qq * qq - 1),
            ClosureType::Cyclic2QPlus1 => qq * (qq + 1),
            ClosureType::Homology => ClosureType::Psl2TimesC.order(q),
            ClosureType::Eq => ClosureType::Borel.order(q),
            ClosureType::Sym3 => 6 * (qq + 1),
            ClosureType::C3 => 2 * (qq * qq - 1),
            ClosureType::C2 => qq * qq * qq * (qq + 1),
            ClosureType::Trivial => group_order_formula(q),
            other => other.order(q),
        }
    }

    /// Published value of `μ(H, G)`.
    pub fn published_mu(self, q: u64) -> i128 {
        let q = q as i128;
        match self {
            ClosureType::Borel | ClosureType::Psl2TimesC | ClosureType::TorusSym3 | ClosureType::SingerC3 => -1,
            ClosureType::EqSplit | ClosureType::TorusC2 | ClosureType::Whole => 1,
            ClosureType::Sym3 => q + 1,
            ClosureType::C3 => 2 * (q * q - 1) / 3,
            ClosureType::C2 => -(q * q * q * (q + 1)) / 2,
            _ => 0,
        }
    }

    /// `λ` as listed in the summary table (types absent from it are 0).
    pub fn table_lambda(self) -> i64 {
        match self {
            ClosureType::Whole
            | ClosureType::EqSplit
            | ClosureType::TorusC2
            | ClosureType::Sym3
            | ClosureType::C3 => 1,
            ClosureType::Borel
            | ClosureType::Psl2TimesC
            | ClosureType::TorusSym3
            | ClosureType::SingerC3
            | ClosureType::C2 => -1,
            _ => 0,
        }
    }

    /// `λ` as stated by the two-row theorem: −1 on its first row, +1 on its second.
    pub fn theorem_lambda(self) -> i64 {
        match self {
            ClosureType::Whole => 1,
            ClosureType::EqSplit | ClosureType::TorusC2 | ClosureType::Sym3 | ClosureType::C3 => -1,
            ClosureType::Borel
            | ClosureType::Psl2TimesC
            | ClosureType::TorusSym3
            | ClosureType::SingerC3
            | ClosureType::C2 => 1,
            _ => 0,
        }
    }

    pub fn is_maximal(self) -> bool {
        matches!(
            self,
            ClosureType::Borel | ClosureType::Psl2TimesC | ClosureType::TorusSym3 | ClosureType::SingerC3
        )
    }

    pub fn is_abelian(self) -> bool {
        matches!(
            self,
            ClosureType::Torus
                | ClosureType::CyclicQ2Minus1
                | ClosureType::Cyclic2QPlus1
                | ClosureType::Homology
                | ClosureType::Eq
                | ClosureType::C3
                | ClosureType::C2
                | ClosureType::Trivial
        )
    }

    pub fn is_cyclic(self) -> bool {
        matches!(
            self,
            ClosureType::CyclicQ2Minus1
                | ClosureType::Cyclic2QPlus1
                | ClosureType::Homology
                | ClosureType::C3
                | ClosureType::C2
                | ClosureType::Trivial
        )
    }

    /// The proper types, i.e. all but [`ClosureType::Whole`].
    pub fn proper() -> impl Iterator<Item = ClosureType> {
        ClosureType::ALL.into_iter().filter(|t| *t != ClosureType::Whole)
    }

    /// Unique type with the given order, when orders separate the types.
    pub fn by_order(q: u64, order: u128) -> Option<ClosureType> {
        let mut hits = ClosureType::ALL.into_iter().filter(|t| t.order(q) == order);
        let first = hits.next()?;
        hits.next().is_none().then_some(first)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    /// Plane index of a curve point.
    CurvePoint(u32),
    /// Plane index of a point off the curve.
    OffCurvePoint(u32),
    /// Plane indices of the vertices of a self-polar triangle.
    SelfPolarTriangle([u32; 3]),
    /// Index of a Frobenius triangle of GF(q⁶)-points.
    FrobeniusTriangle(u32),
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximalFamily {
    pub kind: MaximalKind,
    pub anchor: Anchor,
    pub subgroup: SubgroupRecord,
}

/// All maximal subgroups, one per anchor. Elements fixing a curve point form
/// M1, those fixing an off-curve point form M2; M3 and M4 are the setwise
/// stabilisers of self-polar and Frobenius triangles.
pub fn build_maximals(ctx: &GroupContext) -> Result<Vec<MaximalFamily>> {
    let t = &ctx.table;
    let plane = ctx.plane();
    let q = ctx.q();
    let n = t.len() as u32;
    let mut out = Vec::new();

    let curve = plane.curve();
    let mut by_curve: Vec<Vec<u32>> = vec![Vec::new(); curve.len()];
    let mut by_point: Vec<Vec<u32>> = vec![Vec::new(); plane.num_points()];
    for a in 0..n {
        for (p, &img) in t.curve_perm(a).iter().enumerate() {
            if img as usize == p {
                by_curve[p].push(a);
            }
        }
        for (p, &img) in t.plane_perm(a).iter().enumerate() {
            if img as usize == p && !plane.is_isotropic(p as u32) {
                by_point[p].push(a);
            }
        }
    }
    for (pos, elems) in by_curve.into_iter().enumerate() {
        out.push(family(ctx, MaximalKind::M1, Anchor::CurvePoint(curve[pos]), elems)?);
    }
    for (p, elems) in by_point.into_iter().enumerate() {
        if !plane.is_isotropic(p as u32) {
            out.push(family(ctx, MaximalKind::M2, Anchor::OffCurvePoint(p as u32), elems)?);
        }
    }

    // Triangle stabilisers: one stabiliser and its conjugates by coset representatives.
    let self_polar_images: Vec<u32> = (0..n).map(|a| ctx.self_polar_image(a, 0)).collect();
    for (tri, elems) in stabilisers_from_images(ctx, &self_polar_images, ctx.self_polar.len())? {
        let anchor = Anchor::SelfPolarTriangle(ctx.self_polar[tri as usize].vertices);
        out.push(family(ctx, MaximalKind::M3, anchor, elems)?);
    }
    let frobenius_images: Vec<u32> = (0..n).map(|a| ctx.frobenius_image(a, 0)).collect();
    for (tri, elems) in stabilisers_from_images(ctx, &frobenius_images, ctx.sextic.num_triangles())? {
        out.push(family(ctx, MaximalKind::M4, Anchor::FrobeniusTriangle(tri), elems)?);
    }

    for kind in MaximalKind::ALL {
        let count = out.iter().filter(|f| f.kind == kind).count() as u128;
        if count * kind.order(q) != t.len() as u128 {
            return Err(Error::Construction(format!(
                "{kind:?}: {count} subgroups of order {} do not fill the index",
                kind.order(q)
            )));
        }
    }
    Ok(out)
}

/// Given the image of object 0 under every element, the stabiliser of each
/// object as the conjugate of the stabiliser of object 0.
fn stabilisers_from_images(
    ctx: &GroupContext,
    images: &[u32],
    num_objects: usize,
) -> Result<Vec<(u32, Vec<u32>)>> {
    let t = &ctx.table;
    let stab: Vec<u32> = (0..images.len() as u32).filter(|&a| images[a as usize] == 0).collect();
    let mut rep = vec![u32::MAX; num_objects];
    for (a, &img) in images.iter().enumerate() {
        if rep[img as usize] == u32::MAX {
            rep[img as usize] = a as u32;
        }
    }
    if rep.contains(&u32::MAX) {
        return Err(Error::Construction("G is not transitive on the triangles".into()));
    }
    Ok(rep
        .into_iter()
        .enumerate()
        .map(|(obj, g)| (obj as u32, crate::subgroup::conjugate_set(t, &stab, g)))
        .collect())
}

fn family(ctx: &GroupContext, kind: MaximalKind, anchor: Anchor, elements: Vec<u32>) -> Result<MaximalFamily> {
    let expected = kind.order(ctx.q());
    if elements.len() as u128 != expected {
        return Err(Error::Construction(format!(
            "{kind:?} at {anchor:?}: stabiliser has order {}, expected {expected}",
            elements.len()
        )));
    }
    let mut subgroup = SubgroupRecord::from_elements(&ctx.table, elements)
        .map_err(|_| Error::Construction(format!("{kind:?} at {anchor:?} is not closed")))?;
    subgroup.type_label = Some(kind.closure_type().label().to_string());
    Ok(MaximalFamily { kind, anchor, subgroup })
}

/// Orders and family sizes of the maximal subgroups by orbit–stabiliser on
/// geometric objects, without materialising elements. Works for n ≤ 2; the
/// Frobenius-triangle family needs GF(q⁶) points and is only checked at q = 4.
#[derive(Clone, Debug, Serialize)]
pub struct MaximalCount {
    pub kind: MaximalKind,
    pub family_size: u128,
    pub order: u128,
    pub expected_order: u128,
    pub computed: bool,
}

pub fn maximal_counts(group: &Psu3) -> Result<Vec<MaximalCount>> {
    let plane = group.plane();
    let q = group.q();
    let g = group.order();
    let gens: Vec<Vec<u32>> = group
        .generators()
        .iter()
        .map(|e| group.plane_perm(&e.matrix).images().to_vec())
        .collect();
    let point_orbit = |p: u32| -> usize {
        let mut seen = vec![false; plane.num_points()];
        seen[p as usize] = true;
        let mut queue = vec![p];
        let mut i = 0;
        while i < queue.len() {
            let x = queue[i];
            for s in &gens {
                let y = s[x as usize];
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    queue.push(y);
                }
            }
            i += 1;
        }
        queue.len()
    };
    let on_curve = plane.curve()[0];
    let off_curve = (0..plane.num_points() as u32)
        .find(|&p| !plane.is_isotropic(p))
        .ok_or_else(|| Error::Construction("no point off the curve".into()))?;
    let triangle = anchor_self_polar_triangle(plane, off_curve)?;
    let triangle_orbit = {
        let mut seen = rustc_hash::FxHashSet::default();
        seen.insert(triangle);
        let mut queue = vec![triangle];
        let mut i = 0;
        while i < queue.len() {
            let tri = queue[i];
            for s in &gens {
                let mut img = tri.map(|v| s[v as usize]);
                img.sort_unstable();
                if seen.insert(img) {
                    queue.push(img);
                }
            }
            i += 1;
        }
        queue.len()
    };
    let mut out = Vec::new();
    for (kind, orbit) in [
        (MaximalKind::M1, Some(point_orbit(on_curve))),
        (MaximalKind::M2, Some(point_orbit(off_curve))),
        (MaximalKind::M3, Some(triangle_orbit)),
        (MaximalKind::M4, None),
    ] {
        let expected_order = kind.order(q);
        let (family_size, order, computed) = match orbit {
            Some(o) => (o as u128, g / o as u128, true),
            None if q == 4 => {
                let ctx_tris = crate::geometry::SexticCurve::new(group.tower())?.num_triangles() as u128;
                (ctx_tris, g / ctx_tris, true)
            }
            None => (g / expected_order, expected_order, false),
        };
        out.push(MaximalCount {
            kind,
            family_size,
            order,
            expected_order,
            computed,
        });
    }
    Ok(out)
}

/// A self-polar triangle with one vertex at `p`.
pub fn anchor_self_polar_triangle(plane: &Plane, p: u32) -> Result<[u32; 3]> {
    let lp = plane.polar_of(p);
    for x in plane.points_on_line(lp) {
        if plane.is_isotropic(x) {
            continue;
        }
        let y = plane.meet(lp, plane.polar_of(x));
        if !plane.is_isotropic(y) {
            let mut v = [p, x, y];
            v.sort_unstable();
            return Ok(v);
        }
    }
    Err(Error::Construction("no self-polar triangle through the point".into()))
}

/// Element→maximal incidence: for each element, the maximals containing it.
pub fn maximal_incidence(order: usize, maximals: &[MaximalFamily]) -> Vec<Vec<u32>> {
    let mut inc = vec![Vec::new(); order];
    for (m, fam) in maximals.iter().enumerate() {
        for &x in &fam.subgroup.elements {
            inc[x as usize].push(m as u32);
        }
    }
    inc
}

/// The family of all intersections of maximal subgroups, together with G.
/// Nodes are sorted by decreasing order, then by element list; node 0 is G.
#[derive(Clone, Debug)]
pub struct IntersectionClosure {
    nodes: Vec<SubgroupRecord>,
    labels: Vec<ClosureType>,
    index: FxHashMap<Vec<u32>, u32>,
    /// For each maximal family entry, its node.
    maximal_nodes: Vec<u32>,
}

pub const DEFAULT_NODE_BUDGET: usize = 100_000;

pub fn intersection_closure(
    ctx: &GroupContext,
    maximals: &[MaximalFamily],
    budget: usize,
) -> Result<IntersectionClosure> {
    let t = &ctx.table;
    let inc = maximal_incidence(t.len(), maximals);
    let mut sets: Vec<Vec<u32>> = vec![(0..t.len() as u32).collect()];
    let mut index: FxHashMap<Vec<u32>, u32> = FxHashMap::default();
    index.insert(sets[0].clone(), 0);
    for fam in maximals {
        if !index.contains_key(&fam.subgroup.elements) {
            index.insert(fam.subgroup.elements.clone(), sets.len() as u32);
            sets.push(fam.subgroup.elements.clone());
        }
    }
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); maximals.len()];
    let mut touched: Vec<u32> = Vec::new();
    let mut next = 1;
    while next < sets.len() {
        let node = std::mem::take(&mut sets[next]);
        for &x in &node {
            for &m in &inc[x as usize] {
                if buckets[m as usize].is_empty() {
                    touched.push(m);
                }
                buckets[m as usize].push(x);
            }
        }
        touched.sort_unstable();
        for &m in &touched {
            let b = std::mem::take(&mut buckets[m as usize]);
            if b.len() < node.len() && !index.contains_key(&b) {
                if sets.len() >= budget {
                    return Err(Error::Resource(format!(
                        "intersection closure exceeds the node budget of {budget} \
                         ({} nodes found, {} processed)",
                        sets.len(),
                        next
                    )));
                }
                index.insert(b.clone(), sets.len() as u32);
                sets.push(b);
            }
        }
        touched.clear();
        sets[next] = node;
        next += 1;
    }

    closure_from_sets(ctx, maximals, sets)
}

/// Orders the node sets and attaches labels and generators. Also used to
/// rebuild a cached closure.
pub fn closure_from_sets(
    ctx: &GroupContext,
    maximals: &[MaximalFamily],
    mut sets: Vec<Vec<u32>>,
) -> Result<IntersectionClosure> {
    let t = &ctx.table;
    let q = ctx.q();
    sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut index: FxHashMap<Vec<u32>, u32> = FxHashMap::default();
    let mut nodes = Vec::with_capacity(sets.len());
    let mut labels = Vec::with_capacity(sets.len());
    for (i, elements) in sets.into_iter().enumerate() {
        let label = ClosureType::by_order(q, elements.len() as u128).ok_or_else(|| {
            Error::Consistency(format!("closure node of order {} matches no type", elements.len()))
        })?;
        let generators = if i == 0 {
            t.generators().to_vec()
        } else {
            greedy_generators(t, &elements)
        };
        index.insert(elements.clone(), i as u32);
        nodes.push(SubgroupRecord {
            order: elements.len() as u64,
            elements,
            generators,
            class_id: Some(label as u32),
            type_label: Some(label.label().to_string()),
        });
        labels.push(label);
    }
    if index.len() != labels.len() || labels.first() != Some(&ClosureType::Whole) {
        return Err(Error::Invariant("closure node sets are not distinct or lack G".into()));
    }
    let maximal_nodes = maximals
        .iter()
        .map(|f| index.get(&f.subgroup.elements).copied())
        .collect::<Option<Vec<u32>>>()
        .ok_or_else(|| Error::Invariant("a maximal subgroup is not a closure node".into()))?;
    Ok(IntersectionClosure {
        nodes,
        labels,
        index,
        maximal_nodes,
    })
}

/// Per-type summary of the closure.
#[derive(Clone, Debug, Serialize)]
pub struct ClosureClass {
    pub label: ClosureType,
    pub order: u64,
    pub count: u64,
    pub normalizer_order: u64,
    pub expected_normalizer_order: u128,
    pub single_class: bool,
    pub representative: u32,
    pub abelian: bool,
    pub exponent: u64,
    pub fixed_curve_points: u64,
}

impl IntersectionClosure {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[SubgroupRecord] {
        &self.nodes
    }

    pub fn node(&self, i: u32) -> &SubgroupRecord {
        &self.nodes[i as usize]
    }

    pub fn label(&self, i: u32) -> ClosureType {
        self.labels[i as usize]
    }

    pub fn labels(&self) -> &[ClosureType] {
        &self.labels
    }

    pub fn top(&self) -> u32 {
        0
    }

    pub fn find(&self, elements: &[u32]) -> Option<u32> {
        self.index.get(elements).copied()
    }

    pub fn maximal_nodes(&self) -> &[u32] {
        &self.maximal_nodes
    }

    /// First node carrying each label.
    pub fn representative(&self, label: ClosureType) -> Option<u32> {
        self.labels.iter().position(|&l| l == label).map(|i| i as u32)
    }

    pub fn count(&self, label: ClosureType) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Strict up-sets through element incidence: the nodes containing node `i`
    /// are those containing each of its generators.
    pub fn up_sets(&self) -> Vec<Vec<u32>> {
        let mut containing: Vec<Vec<u32>> = vec![Vec::new(); self.nodes[0].elements.len()];
        for (k, node) in self.nodes.iter().enumerate() {
            for &x in &node.elements {
                containing[x as usize].push(k as u32);
            }
        }
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, node)| {
                let mut up = containing[0].clone();
                for &g in &node.generators {
                    up = intersect(&up, &containing[g as usize]);
                }
                up.retain(|&k| k as usize != i);
                up
            })
            .collect()
    }

    /// Checks that each label forms one conjugacy class with the expected
    /// normaliser, and that the labels are separated by their signatures.
    pub fn classify(&self, ctx: &GroupContext) -> Result<Vec<ClosureClass>> {
        let t = &ctx.table;
        let q = ctx.q();
        let mut out = Vec::new();
        let mut signatures: FxHashMap<Signature, ClosureType> = FxHashMap::default();
        for label in ClosureType::ALL {
            let Some(rep) = self.representative(label) else {
                return Err(Error::Completeness(format!("no closure node of type {}", label.label())));
            };
            let node = self.node(rep);
            let count = self.count(label);
            let single_class = if label == ClosureType::Whole {
                count == 1
            } else {
                let orbit = conjugation_orbit(t, &ctx.conj_maps, &node.elements, t.len())?;
                orbit.len() == count && orbit.iter().all(|(set, _)| self.find(set).map(|i| self.label(i)) == Some(label))
            };
            let normalizer_order = if label == ClosureType::Whole {
                t.len() as u64
            } else {
                normalizer_brute(t, &node.elements, &node.generators).len() as u64
            };
            let sig = Signature::of(t, &node.elements, &node.generators);
            if let Some(prev) = signatures.insert(sig, label) {
                return Err(Error::Consistency(format!(
                    "types {} and {} share a signature",
                    prev.label(),
                    label.label()
                )));
            }
            if sig.abelian != label.is_abelian() || (label.is_cyclic() && sig.exponent != sig.order) {
                return Err(Error::Consistency(format!("{} has the wrong structure", label.label())));
            }
            out.push(ClosureClass {
                label,
                order: node.order,
                count: count as u64,
                normalizer_order,
                expected_normalizer_order: label.normalizer_order(q),
                single_class,
                representative: rep,
                abelian: sig.abelian,
                exponent: sig.exponent,
                fixed_curve_points: sig.fixed_curve_points,
            });
        }
        Ok(out)
    }

    /// Conjugation by each generator of G maps the node set onto itself.
    pub fn is_invariant(&self, ctx: &GroupContext) -> bool {
        ctx.conj_maps.iter().all(|map| {
            self.nodes.iter().all(|n| {
                let image = crate::subgroup::apply_map(map, &n.elements);
                self.find(&image).is_some()
            })
        })
    }

    /// Tests intersection-closedness on `pairs` seeded random node pairs and
    /// on all pairs of class representatives with one conjugate of each node.
    pub fn intersection_closed_sample(&self, seed: u64, pairs: usize) -> bool {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = self.nodes.len() as u32;
        (0..pairs).all(|_| {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            self.find(&intersect(&self.node(a).elements, &self.node(b).elements)).is_some()
        })
    }
}

/// Triangles stabilised by a subgroup.
#[derive(Clone, Debug, Serialize)]
pub struct TriangleCensus {
    pub label: ClosureType,
    pub self_polar: u64,
    pub frobenius: u64,
    pub incidences_hold: bool,
}

/// Counts the self-polar and Frobenius triangles stabilised by `H`, for `H`
/// of type C2, C3 or Sym(3), and checks how the stabilised self-polar
/// triangles sit relative to the axes of the involutions of `H`.
pub fn triangle_fix_census(ctx: &GroupContext, h: &SubgroupRecord) -> Result<TriangleCensus> {
    let t = &ctx.table;
    let plane = ctx.plane();
    let label = h
        .type_label
        .as_deref()
        .and_then(ClosureType::from_label)
        .ok_or_else(|| Error::Usage("subgroup carries no type label".into()))?;
    if !matches!(label, ClosureType::C2 | ClosureType::C3 | ClosureType::Sym3) {
        return Err(Error::Usage(format!(
            "triangle census is defined for C2, C3 and Sym(3), not {}",
            label.label()
        )));
    }
    let self_polar: Vec<u32> = (0..ctx.self_polar.len() as u32)
        .filter(|&tri| h.generators.iter().all(|&g| ctx.self_polar_image(g, tri) == tri))
        .collect();
    let frobenius = (0..ctx.sextic.num_triangles() as u32)
        .filter(|&tri| h.generators.iter().all(|&g| ctx.frobenius_image(g, tri) == tri))
        .count() as u64;

    let involutions: Vec<u32> = h.elements.iter().copied().filter(|&x| t.order(x) == 2).collect();
    let centre_axis = |a: u32| -> (u32, u32) {
        let centre = plane.curve()[t.curve_perm(a).iter().enumerate().find(|(i, &x)| *i == x as usize).unwrap().0];
        (centre, plane.polar_of(centre))
    };
    let incidences_hold = match label {
        ClosureType::C2 => {
            let (centre, axis) = centre_axis(involutions[0]);
            let mut per_vertex: FxHashMap<u32, usize> = FxHashMap::default();
            let ok = self_polar.iter().all(|&tri| {
                let v = ctx.self_polar[tri as usize].vertices;
                let on_axis: Vec<u32> = v.iter().copied().filter(|&x| plane.incident(x, axis)).collect();
                if on_axis.len() != 1 {
                    return false;
                }
                *per_vertex.entry(on_axis[0]).or_default() += 1;
                let others: Vec<u32> = v.iter().copied().filter(|&x| x != on_axis[0]).collect();
                plane.incident(centre, plane.line_through(others[0], others[1]))
            });
            let q = ctx.q() as usize;
            ok && per_vertex.len() == q * q && per_vertex.values().all(|&c| c == q / 2)
        }
        ClosureType::Sym3 => {
            let axes: Vec<u32> = involutions.iter().map(|&a| centre_axis(a).1).collect();
            let mut seen = rustc_hash::FxHashSet::default();
            self_polar.iter().all(|&tri| {
                let v = ctx.self_polar[tri as usize].vertices;
                let mut picks = Vec::new();
                for &axis in &axes {
                    let on: Vec<u32> = v.iter().copied().filter(|&x| plane.incident(x, axis)).collect();
                    if on.len() != 1 {
                        return false;
                    }
                    picks.push(on[0]);
                }
                picks.sort_unstable();
                picks.dedup();
                picks.len() == 3 && v.iter().all(|x| seen.insert(*x))
            })
        }
        _ => true,
    };
    Ok(TriangleCensus {
        label,
        self_polar: self_polar.len() as u64,
        frobenius,
        incidences_hold,
    })
}

/// Intersections named in the structural description of the closure, each
/// paired with the type it should produce.
#[derive(Clone, Debug, Serialize)]
pub struct StructuralIntersection {
    pub description: String,
    pub expected: ClosureType,
    pub order: u64,
    pub matches: bool,
}

pub fn structural_intersections(
    ctx: &GroupContext,
    maximals: &[MaximalFamily],
    closure: &IntersectionClosure,
) -> Result<Vec<StructuralIntersection>> {
    let t = &ctx.table;
    let plane = ctx.plane();
    let find = |anchor: Anchor| -> Result<&SubgroupRecord> {
        maximals
            .iter()
            .find(|f| f.anchor == anchor)
            .map(|f| &f.subgroup)
            .ok_or_else(|| Error::Invariant(format!("no maximal at {anchor:?}")))
    };
    let p = plane.curve()[0];
    let lp = plane.polar_of(p);
    let on_lp: Vec<u32> = plane.points_on_line(lp).into_iter().filter(|&x| x != p).collect();
    let r = on_lp[0];
    let q2 = plane.curve()[1];
    let off = (0..plane.num_points() as u32).find(|&x| !plane.is_isotropic(x)).unwrap();
    let l_off: Vec<u32> = plane
        .points_on_line(plane.polar_of(off))
        .into_iter()
        .filter(|&x| plane.is_isotropic(x))
        .collect();
    let tri = anchor_self_polar_triangle(plane, off)?;

    let meet_all = |sets: Vec<&SubgroupRecord>| -> Vec<u32> {
        sets.iter()
            .skip(1)
            .fold(sets[0].elements.clone(), |acc, s| intersect(&acc, &s.elements))
    };
    let mut cases = vec![
        (
            "M1(P) ∩ M2(R), R on the polar of P".to_string(),
            ClosureType::EqSplit,
            meet_all(vec![find(Anchor::CurvePoint(p))?, find(Anchor::OffCurvePoint(r))?]),
        ),
        (
            "M1(P) ∩ M1(Q) for curve points P ≠ Q".to_string(),
            ClosureType::CyclicQ2Minus1,
            meet_all(vec![find(Anchor::CurvePoint(p))?, find(Anchor::CurvePoint(q2))?]),
        ),
        (
            "M1 of three curve points on the polar of an off-curve point".to_string(),
            ClosureType::Homology,
            meet_all(l_off[..3].iter().map(|&x| find(Anchor::CurvePoint(x))).collect::<Result<_>>()?),
        ),
        (
            "M2 of three off-curve points on a tangent line".to_string(),
            ClosureType::Eq,
            meet_all(on_lp[..3].iter().map(|&x| find(Anchor::OffCurvePoint(x))).collect::<Result<_>>()?),
        ),
        (
            "M2 of the three vertices of a self-polar triangle".to_string(),
            ClosureType::Torus,
            meet_all(tri.iter().map(|&x| find(Anchor::OffCurvePoint(x))).collect::<Result<_>>()?),
        ),
        (
            "M3(T) ∩ M2(P) for a vertex P of T".to_string(),
            ClosureType::TorusC2,
            meet_all(vec![find(Anchor::SelfPolarTriangle(tri))?, find(Anchor::OffCurvePoint(tri[0]))?]),
        ),
        (
            "intersection of all maximal subgroups".to_string(),
            ClosureType::Trivial,
            meet_all(maximals.iter().map(|f| &f.subgroup).collect()),
        ),
    ];

    // C3 as the intersection of the stabilisers of two Frobenius triangles it fixes.
    let c3 = closure.node(closure.representative(ClosureType::C3).unwrap());
    let fixed: Vec<u32> = (0..ctx.sextic.num_triangles() as u32)
        .filter(|&x| c3.generators.iter().all(|&g| ctx.frobenius_image(g, x) == x))
        .take(2)
        .collect();
    if fixed.len() == 2 {
        cases.push((
            "M4(T1) ∩ M4(T2) for two Frobenius triangles fixed by a C3".to_string(),
            ClosureType::C3,
            meet_all(vec![
                find(Anchor::FrobeniusTriangle(fixed[0]))?,
                find(Anchor::FrobeniusTriangle(fixed[1]))?,
            ]),
        ));
    }

    Ok(cases
        .into_iter()
        .map(|(description, expected, elements)| {
            let order = elements.len() as u64;
            let in_closure = closure.find(&elements).map(|i| closure.label(i));
            let structure_ok = generate(t, &greedy_generators(t, &elements)) == elements
                && is_abelian(t, &greedy_generators(t, &elements)) == expected.is_abelian();
            StructuralIntersection {
                description,
                expected,
                order,
                matches: in_closure == Some(expected) && structure_ok && order as u128 == expected.order(ctx.q()),
            }
        })
        .collect())
}
