//! PGU(3,q) = PSU(3,q) as unitary collineations of PG(2,q²), its permutation
//! action on the rational curve points, and the element-type classifier.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, FieldTower, Gf};
use crate::geometry::{dot, Coords, Plane};
use crate::perm::{Perm, PermGroup};

pub type Matrix = [[Gf; 3]; 3];

pub const IDENTITY_MATRIX: Matrix = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

/// The Weyl-type involution `(X,Y,Z) ↦ (Z,Y,X)`.
pub const BETA: Matrix = [[0, 0, 1], [0, 1, 0], [1, 0, 0]];

pub fn mat_mul(f: &Field, a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = f.mul(a[i][0], b[0][j]) ^ f.mul(a[i][1], b[1][j]) ^ f.mul(a[i][2], b[2][j]);
        }
    }
    out
}

pub fn mat_apply(f: &Field, m: &Matrix, v: Coords) -> Coords {
    [dot(f, m[0], v), dot(f, m[1], v), dot(f, m[2], v)]
}

/// Scales so that the first nonzero entry (row-major) is 1.
pub fn mat_canonical(f: &Field, m: &Matrix) -> Option<Matrix> {
    let lead = m.iter().flatten().copied().find(|&x| x != 0)?;
    let s = f.inv(lead)?;
    let mut out = *m;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x = f.mul(*x, s);
        }
    }
    Some(out)
}

pub fn mat_det(f: &Field, m: &Matrix) -> Gf {
    crate::geometry::det3(f, m[0], m[1], m[2])
}

/// `Mᵀ A M^(q) = c·A` for some nonzero `c`, where `A` is the Norm-Trace form.
pub fn is_unitary(tower: &FieldTower, m: &Matrix) -> bool {
    let f = tower.quad();
    if mat_det(f, m) == 0 {
        return false;
    }
    let a = crate::geometry::Polarity::norm_trace().matrix;
    let mut mt = [[0; 3]; 3];
    let mut mc = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            mt[i][j] = m[j][i];
            mc[i][j] = tower.conjugate(m[i][j]);
        }
    }
    let g = mat_mul(f, &mat_mul(f, &mt, &a), &mc);
    let c = g[0][2];
    if c == 0 {
        return false;
    }
    (0..3).all(|i| (0..3).all(|j| g[i][j] == f.mul(c, a[i][j])))
}

/// An element of G: a canonical matrix and the permutation it induces on the
/// rational curve points (indexed by position in [`Plane::curve`]).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub matrix: Matrix,
    pub perm: Perm,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement({:x?})", self.matrix)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TypeTag {
    A,
    B1,
    B2,
    B3,
    C,
    D,
    E,
}

impl TypeTag {
    pub const ALL: [TypeTag; 7] = [
        TypeTag::A,
        TypeTag::B1,
        TypeTag::B2,
        TypeTag::B3,
        TypeTag::C,
        TypeTag::D,
        TypeTag::E,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TypeTag::A => "A",
            TypeTag::B1 => "B1",
            TypeTag::B2 => "B2",
            TypeTag::B3 => "B3",
            TypeTag::C => "C",
            TypeTag::D => "D",
            TypeTag::E => "E",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ElementType {
    pub tag: TypeTag,
    pub order: u64,
    pub fixed_curve_points: u32,
}

/// Decision by order and number of fixed rational curve points.
pub fn classify_by_invariants(q: u64, order: u64, fixed_curve: u64) -> Result<TypeTag> {
    let bad = || {
        Err(Error::Invariant(format!(
            "element of order {order} fixing {fixed_curve} curve points is unclassifiable"
        )))
    };
    if order <= 1 {
        return bad();
    }
    if order == 2 {
        return if fixed_curve == 1 { Ok(TypeTag::C) } else { bad() };
    }
    if order == 4 {
        return if fixed_curve == 1 { Ok(TypeTag::D) } else { bad() };
    }
    if order.is_multiple_of(2) {
        let d = order / 2;
        return if d > 1 && (q + 1).is_multiple_of(d) && fixed_curve == 1 {
            Ok(TypeTag::E)
        } else {
            bad()
        };
    }
    if (q + 1).is_multiple_of(order) {
        return match fixed_curve {
            f if f == q + 1 => Ok(TypeTag::A),
            0 => Ok(TypeTag::B1),
            _ => bad(),
        };
    }
    if (q * q - 1).is_multiple_of(order) {
        return if fixed_curve == 2 { Ok(TypeTag::B2) } else { bad() };
    }
    if (q * q - q + 1).is_multiple_of(order) {
        return if fixed_curve == 0 { Ok(TypeTag::B3) } else { bad() };
    }
    bad()
}

/// Classification from the fixed-point configuration in PG(2,q²) only.
/// `fixed` are the fixed plane points, `axis` a pointwise-fixed line if any.
pub fn classify_geometrically(plane: &Plane, fixed: &[u32], axis: Option<u32>) -> Result<TypeTag> {
    let on_curve: Vec<u32> = fixed
        .iter()
        .copied()
        .filter(|&p| plane.curve_position(p).is_some())
        .collect();
    let bad = |why: &str| Err(Error::Invariant(format!("geometric classification: {why}")));
    if let Some(l) = axis {
        let off_axis: Vec<u32> = fixed.iter().copied().filter(|&p| !plane.incident(p, l)).collect();
        return match off_axis.as_slice() {
            [] => Ok(TypeTag::C),
            [centre] if plane.polar_of(*centre) == l => Ok(TypeTag::A),
            _ => bad("perspectivity with unexpected fixed points"),
        };
    }
    match (fixed.len(), on_curve.len()) {
        (0, 0) => Ok(TypeTag::B3),
        (1, 1) => Ok(TypeTag::D),
        (2, 1) => Ok(TypeTag::E),
        (3, 0) => Ok(TypeTag::B1),
        (3, 2) => Ok(TypeTag::B2),
        _ => bad("fixed-point configuration matches no type"),
    }
}

pub fn group_order_formula(q: u64) -> u128 {
    let q = q as u128;
    q * q * q * (q * q * q + 1) * (q * q - 1)
}

/// The group with its generators and the BSGS of its curve action.
#[derive(Clone, Debug)]
pub struct Psu3 {
    plane: Plane,
    generators: Vec<GroupElement>,
    group: PermGroup,
}

impl Psu3 {
    pub fn build(n: u32) -> Result<Self> {
        let tower = FieldTower::new(n)?;
        let plane = Plane::new(tower)?;
        let matrices = generator_matrices(plane.tower())?;
        let mut generators = Vec::with_capacity(matrices.len());
        for m in matrices {
            generators.push(element_from_matrix(&plane, &m)?);
        }
        let degree = plane.curve().len();
        let perms: Vec<Perm> = generators.iter().map(|g| g.perm.clone()).collect();
        let group = PermGroup::new(degree, perms)?;
        let expected = group_order_formula(plane.q());
        if group.order() != expected {
            return Err(Error::Construction(format!(
                "generated group has order {} instead of {expected}",
                group.order()
            )));
        }
        Ok(Psu3 {
            plane,
            generators,
            group,
        })
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn tower(&self) -> &FieldTower {
        self.plane.tower()
    }

    pub fn q(&self) -> u64 {
        self.plane.q()
    }

    pub fn n(&self) -> u32 {
        self.plane.tower().n()
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn perm_group(&self) -> &PermGroup {
        &self.group
    }

    pub fn order(&self) -> u128 {
        self.group.order()
    }

    pub fn degree(&self) -> usize {
        self.plane.curve().len()
    }

    pub fn element(&self, m: &Matrix) -> Result<GroupElement> {
        element_from_matrix(&self.plane, m)
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let f = self.plane.field();
        GroupElement {
            matrix: mat_canonical(f, &mat_mul(f, &a.matrix, &b.matrix)).expect("invertible"),
            perm: a.perm.compose(&b.perm),
        }
    }

    /// Permutation of all plane points induced by a matrix.
    pub fn plane_perm(&self, m: &Matrix) -> Perm {
        let n = self.plane.num_points() as u32;
        let images = (0..n).map(|p| self.plane.apply_matrix(m, p)).collect();
        Perm::from_images(images).expect("collineation")
    }

    /// Permutation group of the action on all plane points.
    pub fn plane_group(&self) -> Result<PermGroup> {
        let gens = self.generators.iter().map(|g| self.plane_perm(&g.matrix)).collect();
        PermGroup::new(self.plane.num_points(), gens)
    }

    pub fn classify_element(&self, g: &GroupElement) -> Result<ElementType> {
        if g.perm.is_identity() {
            return Err(Error::Usage("the identity has no type".into()));
        }
        let order = g.perm.order();
        let fixed = g.perm.fixed_count() as u64;
        let tag = classify_by_invariants(self.q(), order, fixed)?;
        Ok(ElementType {
            tag,
            order,
            fixed_curve_points: fixed as u32,
        })
    }
}

pub fn element_from_matrix(plane: &Plane, m: &Matrix) -> Result<GroupElement> {
    let f = plane.field();
    if !is_unitary(plane.tower(), m) {
        return Err(Error::Usage("matrix does not preserve the Hermitian form".into()));
    }
    let matrix = mat_canonical(f, m).expect("nonsingular");
    let curve = plane.curve();
    let mut images = Vec::with_capacity(curve.len());
    for &p in curve {
        let img = plane.apply_matrix(&matrix, p);
        let pos = plane
            .curve_position(img)
            .ok_or_else(|| Error::Invariant("unitary matrix moved a curve point off the curve".into()))?;
        images.push(pos);
    }
    Ok(GroupElement {
        matrix,
        perm: Perm::from_images(images)?,
    })
}

/// Unitriangular transvections over a GF(2)-basis, central ones over a basis
/// of GF(q), the torus generator `diag(a^(q+1), a, 1)` and `β`.
pub fn generator_matrices(tower: &FieldTower) -> Result<Vec<Matrix>> {
    let f = tower.quad();
    let size = f.size() as Gf;
    let mut out = Vec::new();
    let unitriangular = |a: Gf, b: Gf, c: Gf| [[1, a, b], [0, 1, c], [0, 0, 1]];
    for i in 0..f.degree() {
        let c = 1 << i;
        let found = (0..size)
            .flat_map(|a| (0..size).map(move |b| (a, b)))
            .map(|(a, b)| unitriangular(a, b, c))
            .find(|m| is_unitary(tower, m))
            .ok_or_else(|| Error::Construction("no unitary transvection found".into()))?;
        out.push(found);
    }
    for i in 0..tower.base().degree() {
        let b = tower.embed_base(1 << i);
        let m = unitriangular(0, b, 0);
        if !is_unitary(tower, &m) {
            return Err(Error::Construction("central transvection is not unitary".into()));
        }
        out.push(m);
    }
    let order = f.size() - 1;
    let primitive = (2..size)
        .find(|&a| crate::field::prime_factors(order).iter().all(|&p| f.pow(a, order / p) != 1))
        .expect("GF(q²)* is cyclic");
    let torus = [[f.pow(primitive, tower.q() + 1), 0, 0], [0, primitive, 0], [0, 0, 1]];
    if !is_unitary(tower, &torus) {
        return Err(Error::Construction("torus element is not unitary".into()));
    }
    out.push(torus);
    out.push(BETA);
    Ok(out)
}

/// Every element of G at q = 4, with a multiplication table keyed on the
/// images of a three-point base.
#[derive(Clone)]
pub struct ElementTable {
    q: u64,
    degree: usize,
    plane_size: usize,
    curve: Vec<u8>,
    plane: Vec<u16>,
    matrices: Vec<Matrix>,
    base: [u8; 3],
    lookup: Vec<u32>,
    inverse: Vec<u32>,
    order: Vec<u8>,
    fixed_curve: Vec<u8>,
    generators: Vec<u32>,
}

impl fmt::Debug for ElementTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ElementTable")
            .field("q", &self.q)
            .field("elements", &self.len())
            .field("base", &self.base)
            .finish()
    }
}

const TABLE_MAX_DEGREE: usize = 255;

impl ElementTable {
    /// Enumerates G by breadth-first search over the Cayley graph of the
    /// generators; elements are then sorted by their curve permutation.
    pub fn build(group: &Psu3) -> Result<Self> {
        let plane = group.plane();
        let degree = group.degree();
        if degree > TABLE_MAX_DEGREE {
            return Err(Error::Usage(format!(
                "element tables are limited to degree {TABLE_MAX_DEGREE}; got {degree}"
            )));
        }
        let plane_size = plane.num_points();
        let f = plane.field();
        let base = choose_base(plane)?;
        let expected = group.order() as usize;

        let gen_curve: Vec<Vec<u8>> = group
            .generators()
            .iter()
            .map(|g| g.perm.images().iter().map(|&x| x as u8).collect())
            .collect();
        let gen_plane: Vec<Vec<u16>> = group
            .generators()
            .iter()
            .map(|g| group.plane_perm(&g.matrix).images().iter().map(|&x| x as u16).collect())
            .collect();

        let key = |c: &[u8]| {
            (c[base[0] as usize] as usize * degree + c[base[1] as usize] as usize) * degree
                + c[base[2] as usize] as usize
        };
        let mut seen: FxHashMap<usize, u32> = FxHashMap::default();
        let mut curve: Vec<u8> = (0..degree as u8).collect();
        let mut planev: Vec<u16> = (0..plane_size as u16).collect();
        let mut matrices = vec![IDENTITY_MATRIX];
        seen.insert(key(&curve[..degree]), 0);
        let mut head = 0;
        while head < matrices.len() {
            for (s, m) in group.generators().iter().enumerate() {
                let cur = &curve[head * degree..(head + 1) * degree];
                let next_curve: Vec<u8> = cur.iter().map(|&x| gen_curve[s][x as usize]).collect();
                let k = key(&next_curve);
                if seen.contains_key(&k) {
                    continue;
                }
                if matrices.len() >= expected {
                    return Err(Error::Construction("more elements than |G|".into()));
                }
                let curp = &planev[head * plane_size..(head + 1) * plane_size];
                let next_plane: Vec<u16> = curp.iter().map(|&x| gen_plane[s][x as usize]).collect();
                let mat = mat_canonical(f, &mat_mul(f, &m.matrix, &matrices[head])).expect("invertible");
                seen.insert(k, matrices.len() as u32);
                curve.extend_from_slice(&next_curve);
                planev.extend_from_slice(&next_plane);
                matrices.push(mat);
            }
            head += 1;
        }
        let count = matrices.len();
        if count != expected {
            return Err(Error::Construction(format!(
                "enumerated {count} elements, expected {expected}"
            )));
        }

        let mut perm: Vec<usize> = (0..count).collect();
        perm.sort_by(|&a, &b| curve[a * degree..(a + 1) * degree].cmp(&curve[b * degree..(b + 1) * degree]));
        let mut s_curve = Vec::with_capacity(curve.len());
        let mut s_plane = Vec::with_capacity(planev.len());
        let mut s_mats = Vec::with_capacity(count);
        for &i in &perm {
            s_curve.extend_from_slice(&curve[i * degree..(i + 1) * degree]);
            s_plane.extend_from_slice(&planev[i * plane_size..(i + 1) * plane_size]);
            s_mats.push(matrices[i]);
        }
        let mut lookup = vec![u32::MAX; degree * degree * degree];
        for i in 0..count {
            let k = key(&s_curve[i * degree..(i + 1) * degree]);
            if lookup[k] != u32::MAX {
                return Err(Error::Construction("base images do not determine elements".into()));
            }
            lookup[k] = i as u32;
        }
        let mut table = ElementTable {
            q: group.q(),
            degree,
            plane_size,
            curve: s_curve,
            plane: s_plane,
            matrices: s_mats,
            base,
            lookup,
            inverse: Vec::new(),
            order: Vec::new(),
            fixed_curve: Vec::new(),
            generators: Vec::new(),
        };
        table.inverse = (0..count as u32)
            .map(|a| {
                let c = table.curve_perm(a);
                let mut inv = vec![0u8; degree];
                for (i, &x) in c.iter().enumerate() {
                    inv[x as usize] = i as u8;
                }
                table.id_of_curve_perm(&inv).expect("inverse lies in G")
            })
            .collect();
        table.order = (0..count as u32)
            .map(|a| {
                let p = Perm::from_images(table.plane_perm(a).iter().map(|&x| x as u32).collect())
                    .expect("permutation");
                p.order() as u8
            })
            .collect();
        table.fixed_curve = (0..count as u32)
            .map(|a| {
                table
                    .curve_perm(a)
                    .iter()
                    .enumerate()
                    .filter(|(i, &x)| *i as u8 == x)
                    .count() as u8
            })
            .collect();
        table.generators = group
            .generators()
            .iter()
            .map(|g| {
                let c: Vec<u8> = g.perm.images().iter().map(|&x| x as u8).collect();
                table.id_of_curve_perm(&c).expect("generator in table")
            })
            .collect();
        if table.curve_perm(0).iter().enumerate().any(|(i, &x)| i as u8 != x) {
            return Err(Error::Invariant("identity is not the first element".into()));
        }
        Ok(table)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn plane_size(&self) -> usize {
        self.plane_size
    }

    pub fn base(&self) -> [u8; 3] {
        self.base
    }

    pub fn identity(&self) -> u32 {
        0
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    #[inline]
    pub fn curve_perm(&self, a: u32) -> &[u8] {
        let a = a as usize;
        &self.curve[a * self.degree..(a + 1) * self.degree]
    }

    #[inline]
    pub fn plane_perm(&self, a: u32) -> &[u16] {
        let a = a as usize;
        &self.plane[a * self.plane_size..(a + 1) * self.plane_size]
    }

    pub fn matrix(&self, a: u32) -> &Matrix {
        &self.matrices[a as usize]
    }

    pub fn element(&self, a: u32) -> GroupElement {
        GroupElement {
            matrix: self.matrices[a as usize],
            perm: Perm::from_images(self.curve_perm(a).iter().map(|&x| x as u32).collect())
                .expect("permutation"),
        }
    }

    #[inline]
    fn key_of(&self, b0: u8, b1: u8, b2: u8) -> usize {
        (b0 as usize * self.degree + b1 as usize) * self.degree + b2 as usize
    }

    pub fn id_of_curve_perm(&self, c: &[u8]) -> Option<u32> {
        if c.len() != self.degree {
            return None;
        }
        let id = self.lookup[self.key_of(
            c[self.base[0] as usize],
            c[self.base[1] as usize],
            c[self.base[2] as usize],
        )];
        (id != u32::MAX && self.curve_perm(id) == c).then_some(id)
    }

    pub fn id_of(&self, g: &GroupElement) -> Option<u32> {
        let c: Vec<u8> = g.perm.images().iter().map(|&x| x as u8).collect();
        self.id_of_curve_perm(&c)
    }

    /// `a ∘ b` (apply `b` first).
    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let ca = self.curve_perm(a);
        let cb = self.curve_perm(b);
        let [b0, b1, b2] = self.base;
        self.lookup[self.key_of(
            ca[cb[b0 as usize] as usize],
            ca[cb[b1 as usize] as usize],
            ca[cb[b2 as usize] as usize],
        )]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    /// `g x g⁻¹`.
    #[inline]
    pub fn conj(&self, g: u32, x: u32) -> u32 {
        self.mul(self.mul(g, x), self.inverse[g as usize])
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn commutator(&self, a: u32, b: u32) -> u32 {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    #[inline]
    pub fn order(&self, a: u32) -> u64 {
        self.order[a as usize] as u64
    }

    #[inline]
    pub fn fixed_curve(&self, a: u32) -> u64 {
        self.fixed_curve[a as usize] as u64
    }

    pub fn fixed_plane_points(&self, a: u32) -> Vec<u32> {
        self.plane_perm(a)
            .iter()
            .enumerate()
            .filter(|(i, &x)| *i as u16 == x)
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// Conjugation map `x ↦ g x g⁻¹` over all elements.
    pub fn conjugation_map(&self, g: u32) -> Vec<u32> {
        (0..self.len() as u32).map(|x| self.conj(g, x)).collect()
    }

    pub fn tag(&self, a: u32) -> Result<TypeTag> {
        classify_by_invariants(self.q, self.order(a), self.fixed_curve(a))
    }

    /// The line fixed pointwise by `a`, if any. Such a line holds all but at
    /// most one of the fixed points, so it passes through two of the first three.
    pub fn axis(&self, plane: &Plane, a: u32) -> Option<u32> {
        let fixed = self.fixed_plane_points(a);
        if fixed.len() < 3 {
            return None;
        }
        let candidates = [(0, 1), (0, 2), (1, 2)];
        candidates.iter().find_map(|&(i, j)| {
            let l = plane.line_through(fixed[i], fixed[j]);
            plane
                .points_on_line(l)
                .iter()
                .all(|p| fixed.binary_search(p).is_ok())
                .then_some(l)
        })
    }
}

/// Two curve points and a third curve point off the chord through them: the
/// pointwise stabiliser of such a triple is trivial.
fn choose_base(plane: &Plane) -> Result<[u8; 3]> {
    let curve = plane.curve();
    let chord = plane.line_through(curve[0], curve[1]);
    let third = (2..curve.len())
        .find(|&k| !plane.incident(curve[k], chord))
        .ok_or_else(|| Error::Construction("curve is contained in a line".into()))?;
    Ok([0, 1, third as u8])
}

/// Census of nontrivial elements by (tag, order).
pub fn element_census(table: &ElementTable) -> Result<Vec<(TypeTag, u64, u64)>> {
    let mut counts: FxHashMap<(TypeTag, u64), u64> = FxHashMap::default();
    for a in 1..table.len() as u32 {
        *counts.entry((table.tag(a)?, table.order(a))).or_default() += 1;
    }
    let mut out: Vec<(TypeTag, u64, u64)> = counts.into_iter().map(|((t, o), c)| (t, o, c)).collect();
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::OnceLock;

    fn group() -> &'static (Psu3, ElementTable) {
        static G: OnceLock<(Psu3, ElementTable)> = OnceLock::new();
        G.get_or_init(|| {
            let g = Psu3::build(1).unwrap();
            let t = ElementTable::build(&g).unwrap();
            (g, t)
        })
    }

    #[test]
    fn order_and_transitivity() {
        let (g, _) = group();
        assert_eq!(g.order(), 62400);
        let pg = g.perm_group();
        let all: Vec<u32> = (0..65).collect();
        assert!(pg.is_transitive_on(&all));
        let stab = pg.stabilizer(0).unwrap();
        assert_eq!(stab.order(), 960);
        let rest: Vec<u32> = (1..65).collect();
        assert!(stab.is_transitive_on(&rest));
        let plane = g.plane_group().unwrap();
        assert_eq!(plane.order(), 62400);
        let off: Vec<u32> = (0..273).filter(|&p| g.plane().curve_position(p).is_none()).collect();
        assert!(plane.is_transitive_on(&off));
        assert_eq!(plane.stabilizer(off[0]).unwrap().order(), 300);
    }

    #[test]
    fn table_basics() {
        let (_, t) = group();
        assert_eq!(t.len(), 62400);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = rng.gen_range(0..62400);
            let b = rng.gen_range(0..62400);
            let c = rng.gen_range(0..62400);
            assert_eq!(t.mul(t.mul(a, b), c), t.mul(a, t.mul(b, c)));
            assert_eq!(t.mul(a, t.inv(a)), 0);
            assert_eq!(t.mul(0, a), a);
            assert_eq!(t.pow(a, t.order(a)), 0);
        }
    }

    #[test]
    fn matrix_and_perm_agree() {
        let (g, t) = group();
        let f = g.plane().field();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = rng.gen_range(0..62400);
            let b = rng.gen_range(0..62400);
            let ea = t.element(a);
            let eb = t.element(b);
            let prod = g.multiply(&ea, &eb);
            assert_eq!(t.id_of(&prod), Some(t.mul(a, b)));
            assert_eq!(prod.perm, ea.perm.compose(&eb.perm));
            let m = mat_canonical(f, &mat_mul(f, &ea.matrix, &eb.matrix)).unwrap();
            assert_eq!(&m, t.matrix(t.mul(a, b)));
            assert_eq!(g.element(&m).unwrap(), t.element(t.mul(a, b)));
        }
    }

    #[test]
    fn element_census_q4() {
        let (_, t) = group();
        let census = element_census(t).unwrap();
        let expected = vec![
            (TypeTag::A, 5, 832),
            (TypeTag::B1, 5, 4992),
            (TypeTag::B2, 3, 4160),
            (TypeTag::B2, 15, 16640),
            (TypeTag::B3, 13, 19200),
            (TypeTag::C, 2, 195),
            (TypeTag::D, 4, 3900),
            (TypeTag::E, 10, 12480),
        ];
        assert_eq!(census, expected);
        assert_eq!(census.iter().map(|c| c.2).sum::<u64>(), 62399);
    }

    #[test]
    fn geometric_classifier_agrees() {
        let (g, t) = group();
        let plane = g.plane();
        for a in 1..t.len() as u32 {
            let fixed = t.fixed_plane_points(a);
            let axis = t.axis(plane, a);
            assert_eq!(classify_geometrically(plane, &fixed, axis).unwrap(), t.tag(a).unwrap());
        }
    }

    #[test]
    fn unitary_checks() {
        let (g, _) = group();
        let tower = g.tower();
        assert!(is_unitary(tower, &BETA));
        assert!(!is_unitary(tower, &[[1, 1, 0], [0, 1, 0], [0, 0, 1]]));
        assert!(g.element(&[[1, 1, 0], [0, 1, 0], [0, 0, 1]]).is_err());
        assert!(g.classify_element(&g.element(&IDENTITY_MATRIX).unwrap()).is_err());
    }
}

