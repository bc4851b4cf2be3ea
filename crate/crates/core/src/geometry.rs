//! PG(2,q²) with its unitary polarity, the Hermitian curve in the
//! Norm-Trace and Fermat models, self-polar triangles, and the Frobenius
//! triangles of GF(q⁶)-rational curve points.
//!
//! Points and lines are stored as canonical coordinate triples (first nonzero
//! entry equal to 1). Lines use dual coordinates, so a line `[a,b,c]` is the
//! set of points with `aX + bY + cZ = 0`; both live in the same sorted table.

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, FieldTower, Gf, Level};

pub type Coords = [Gf; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ProjectivePoint {
    pub coords: Coords,
    pub level: Level,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ProjectiveLine {
    pub coords: Coords,
    pub level: Level,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveModel {
    /// `X^(q+1) + Y^(q+1) + Z^(q+1) = 0`
    Fermat,
    /// `X^q Z + X Z^q + Y^(q+1) = 0`
    NormTrace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LineKind {
    Tangent,
    Chord,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangleKind {
    SelfPolar,
    Frobenius,
}

/// Unordered vertex triple, kept sorted by point index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Triangle {
    pub vertices: [u32; 3],
    pub kind: TriangleKind,
}

/// Scale so that the first nonzero coordinate is 1. `None` for the zero vector.
pub fn normalize(field: &Field, v: Coords) -> Option<Coords> {
    let lead = *v.iter().find(|&&x| x != 0)?;
    if lead == 1 {
        return Some(v);
    }
    let s = field.inv(lead)?;
    Some([field.mul(v[0], s), field.mul(v[1], s), field.mul(v[2], s)])
}

pub fn cross(field: &Field, u: Coords, v: Coords) -> Coords {
    let m = |a, b| field.mul(a, b);
    [
        m(u[1], v[2]) ^ m(u[2], v[1]),
        m(u[2], v[0]) ^ m(u[0], v[2]),
        m(u[0], v[1]) ^ m(u[1], v[0]),
    ]
}

pub fn dot(field: &Field, u: Coords, v: Coords) -> Gf {
    field.mul(u[0], v[0]) ^ field.mul(u[1], v[1]) ^ field.mul(u[2], v[2])
}

pub fn det3(field: &Field, a: Coords, b: Coords, c: Coords) -> Gf {
    dot(field, a, cross(field, b, c))
}

/// A non-degenerate Hermitian form `h(u,v) = Σ u_i A_ij v_j^q` on GF(q²)³.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Polarity {
    pub matrix: [[Gf; 3]; 3],
}

impl Polarity {
    /// The form of the Norm-Trace model: `u0 v2^q + u1 v1^q + u2 v0^q`.
    pub fn norm_trace() -> Self {
        Polarity {
            matrix: [[0, 0, 1], [0, 1, 0], [1, 0, 0]],
        }
    }

    /// The form of the Fermat model: `Σ u_i v_i^q`.
    pub fn fermat() -> Self {
        Polarity {
            matrix: [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        }
    }

    pub fn for_model(model: CurveModel) -> Self {
        match model {
            CurveModel::Fermat => Self::fermat(),
            CurveModel::NormTrace => Self::norm_trace(),
        }
    }

    /// `A` equals its conjugate transpose and has nonzero determinant.
    pub fn is_valid(&self, tower: &FieldTower) -> bool {
        let f = tower.quad();
        let a = &self.matrix;
        let hermitian = (0..3).all(|i| (0..3).all(|j| a[i][j] == tower.conjugate(a[j][i])));
        hermitian && det3(f, a[0], a[1], a[2]) != 0
    }

    pub fn form(&self, tower: &FieldTower, u: Coords, v: Coords) -> Gf {
        let line = self.polar_coords(tower, v);
        dot(tower.quad(), u, line)
    }

    /// Dual coordinates of the polar line of `p`: `L_i = Σ_j A_ij p_j^q`.
    pub fn polar_coords(&self, tower: &FieldTower, p: Coords) -> Coords {
        let f = tower.quad();
        let pc = [tower.conjugate(p[0]), tower.conjugate(p[1]), tower.conjugate(p[2])];
        let mut out = [0; 3];
        for (i, row) in self.matrix.iter().enumerate() {
            out[i] = dot(f, *row, pc);
        }
        out
    }
}

/// The finite plane PG(2,q²), its polarity and the rational curve points.
#[derive(Clone, Debug)]
pub struct Plane {
    tower: FieldTower,
    polarity: Polarity,
    points: Vec<Coords>,
    index: FxHashMap<Coords, u32>,
    polar: Vec<u32>,
    pole: Vec<u32>,
    curve: Vec<u32>,
    curve_pos: Vec<Option<u32>>,
}

impl Plane {
    /// Builds the plane with the Norm-Trace polarity as working model.
    pub fn new(tower: FieldTower) -> Result<Self> {
        let polarity = Polarity::norm_trace();
        if !polarity.is_valid(&tower) {
            return Err(Error::Construction("Hermitian form is degenerate".into()));
        }
        let size = tower.quad().size() as Gf;
        let mut points = Vec::with_capacity((size * size + size + 1) as usize);
        points.push([0, 0, 1]);
        for z in 0..size {
            points.push([0, 1, z]);
        }
        for y in 0..size {
            for z in 0..size {
                points.push([1, y, z]);
            }
        }
        points.sort_unstable();
        let index: FxHashMap<Coords, u32> = points
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as u32))
            .collect();
        let f = tower.quad();
        let mut polar = Vec::with_capacity(points.len());
        for &p in &points {
            let l = normalize(f, polarity.polar_coords(&tower, p))
                .ok_or_else(|| Error::Construction("polar of a point vanished".into()))?;
            polar.push(index[&l]);
        }
        let mut pole = vec![u32::MAX; points.len()];
        for (p, &l) in polar.iter().enumerate() {
            if pole[l as usize] != u32::MAX {
                return Err(Error::Construction("polarity is not a bijection".into()));
            }
            pole[l as usize] = p as u32;
        }
        let mut plane = Plane {
            tower,
            polarity,
            points,
            index,
            polar,
            pole,
            curve: Vec::new(),
            curve_pos: Vec::new(),
        };
        let curve = plane.curve_indices(CurveModel::NormTrace);
        let mut curve_pos = vec![None; plane.points.len()];
        for (k, &p) in curve.iter().enumerate() {
            curve_pos[p as usize] = Some(k as u32);
        }
        plane.curve = curve;
        plane.curve_pos = curve_pos;
        Ok(plane)
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn field(&self) -> &Field {
        self.tower.quad()
    }

    pub fn q(&self) -> u64 {
        self.tower.q()
    }

    pub fn polarity(&self) -> &Polarity {
        &self.polarity
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, i: u32) -> Coords {
        self.points[i as usize]
    }

    pub fn points(&self) -> &[Coords] {
        &self.points
    }

    pub fn index_of(&self, v: Coords) -> Option<u32> {
        let c = normalize(self.field(), v)?;
        self.index.get(&c).copied()
    }

    /// Index of the polar line (in the shared point/line table).
    pub fn polar_of(&self, p: u32) -> u32 {
        self.polar[p as usize]
    }

    pub fn pole_of(&self, l: u32) -> u32 {
        self.pole[l as usize]
    }

    pub fn incident(&self, p: u32, l: u32) -> bool {
        dot(self.field(), self.point(p), self.point(l)) == 0
    }

    /// Rational points of the working (Norm-Trace) curve, sorted by point index.
    pub fn curve(&self) -> &[u32] {
        &self.curve
    }

    /// Position of a plane point in [`curve`](Self::curve), if it lies on it.
    pub fn curve_position(&self, p: u32) -> Option<u32> {
        self.curve_pos[p as usize]
    }

    pub fn is_isotropic(&self, p: u32) -> bool {
        self.incident(p, self.polar_of(p))
    }

    pub fn line_through(&self, a: u32, b: u32) -> u32 {
        let l = cross(self.field(), self.point(a), self.point(b));
        self.index_of(l).expect("distinct points span a line")
    }

    pub fn meet(&self, l: u32, m: u32) -> u32 {
        let p = cross(self.field(), self.point(l), self.point(m));
        self.index_of(p).expect("distinct lines meet in a point")
    }

    pub fn points_on_line(&self, l: u32) -> Vec<u32> {
        (0..self.points.len() as u32)
            .filter(|&p| self.incident(p, l))
            .collect()
    }

    /// Evaluates the model equation at a coordinate triple over GF(q²).
    pub fn curve_equation(&self, model: CurveModel, p: Coords) -> Gf {
        let f = self.field();
        let t = &self.tower;
        let q = self.q();
        match model {
            CurveModel::Fermat => f.pow(p[0], q + 1) ^ f.pow(p[1], q + 1) ^ f.pow(p[2], q + 1),
            CurveModel::NormTrace => {
                f.mul(t.conjugate(p[0]), p[2]) ^ f.mul(p[0], t.conjugate(p[2])) ^ f.pow(p[1], q + 1)
            }
        }
    }

    /// Indices of points satisfying the model equation, by exhaustive scan.
    pub fn curve_indices(&self, model: CurveModel) -> Vec<u32> {
        (0..self.points.len() as u32)
            .filter(|&i| self.curve_equation(model, self.point(i)) == 0)
            .collect()
    }

    /// Norm-Trace points from the affine parametrisation `T(x) = N(y)`, plus `(1,0,0)`.
    pub fn norm_trace_parametrized(&self) -> Vec<u32> {
        let size = self.field().size() as Gf;
        let mut out = vec![self.index[&[1, 0, 0]]];
        for x in 0..size {
            for y in 0..size {
                let (ny, _) = self.tower.norm_trace(y);
                let (_, tx) = self.tower.norm_trace(x);
                if tx == ny {
                    out.push(self.index_of([x, y, 1]).expect("affine point"));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Isotropic points of the polarity.
    pub fn isotropic_points(&self) -> Vec<u32> {
        (0..self.points.len() as u32)
            .filter(|&p| self.is_isotropic(p))
            .collect()
    }

    pub fn curve_points(&self, model: CurveModel) -> Vec<ProjectivePoint> {
        self.curve_indices(model)
            .into_iter()
            .map(|i| ProjectivePoint {
                coords: self.point(i),
                level: Level::Quadratic,
            })
            .collect()
    }

    pub fn classify_line(&self, l: u32) -> Result<LineKind> {
        let hits = self
            .curve
            .iter()
            .filter(|&&p| self.incident(p, l))
            .count() as u64;
        let own_pole = self.incident(self.pole_of(l), l);
        match hits {
            1 if own_pole => Ok(LineKind::Tangent),
            h if h == self.q() + 1 && !own_pole => Ok(LineKind::Chord),
            h => Err(Error::Consistency(format!(
                "line {l} meets the curve in {h} points (contains pole: {own_pole})"
            ))),
        }
    }

    pub fn classify_projective_line(&self, l: &ProjectiveLine) -> Result<LineKind> {
        if l.level != Level::Quadratic {
            return Err(Error::Usage("line must be defined over GF(q²)".into()));
        }
        let idx = self
            .index_of(l.coords)
            .ok_or_else(|| Error::Usage("zero line".into()))?;
        self.classify_line(idx)
    }

    pub fn polar_line(&self, p: &ProjectivePoint) -> Result<ProjectiveLine> {
        let idx = self.index_of(p.coords).ok_or_else(|| Error::Usage("zero point".into()))?;
        Ok(ProjectiveLine {
            coords: self.point(self.polar_of(idx)),
            level: Level::Quadratic,
        })
    }

    pub fn pole_point(&self, l: &ProjectiveLine) -> Result<ProjectivePoint> {
        let idx = self.index_of(l.coords).ok_or_else(|| Error::Usage("zero line".into()))?;
        Ok(ProjectivePoint {
            coords: self.point(self.pole_of(idx)),
            level: Level::Quadratic,
        })
    }

    /// All self-polar triangles, vertices sorted, list sorted.
    pub fn self_polar_triangles(&self) -> Vec<Triangle> {
        let mut seen = rustc_hash::FxHashSet::default();
        for p in 0..self.points.len() as u32 {
            if self.is_isotropic(p) {
                continue;
            }
            let lp = self.polar_of(p);
            for q in self.points_on_line(lp) {
                if self.is_isotropic(q) {
                    continue;
                }
                let r = self.meet(lp, self.polar_of(q));
                if self.is_isotropic(r) {
                    continue;
                }
                let mut v = [p, q, r];
                v.sort_unstable();
                seen.insert(v);
            }
        }
        let mut out: Vec<Triangle> = seen
            .into_iter()
            .map(|vertices| Triangle {
                vertices,
                kind: TriangleKind::SelfPolar,
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Each vertex is off the curve and is the pole of the opposite side.
    pub fn is_self_polar(&self, t: &Triangle) -> bool {
        let [a, b, c] = t.vertices;
        if a == b || b == c || a == c {
            return false;
        }
        [(a, b, c), (b, a, c), (c, a, b)].iter().all(|&(v, x, y)| {
            !self.is_isotropic(v) && self.polar_of(v) == self.line_through(x, y)
        })
    }

    /// A matrix sending Norm-Trace curve points onto Fermat curve points, of the
    /// shape `[[a,0,b],[0,1,0],[c,0,d]]`.
    pub fn model_projectivity(&self) -> Option<[[Gf; 3]; 3]> {
        let f = self.field();
        let t = &self.tower;
        let size = f.size() as Gf;
        let n = |x| t.norm_trace(x).0;
        for a in 1..size {
            for c in 1..size {
                if n(a) != n(c) {
                    continue;
                }
                for b in 0..size {
                    for d in 0..size {
                        if n(b) != n(d) || f.mul(a, d) == f.mul(b, c) {
                            continue;
                        }
                        let cross_term = f.mul(a, t.conjugate(b)) ^ f.mul(c, t.conjugate(d));
                        if cross_term == 1 {
                            return Some([[a, 0, b], [0, 1, 0], [c, 0, d]]);
                        }
                    }
                }
            }
        }
        None
    }

    pub fn apply_matrix(&self, m: &[[Gf; 3]; 3], p: u32) -> u32 {
        let v = self.point(p);
        let f = self.field();
        let w = [dot(f, m[0], v), dot(f, m[1], v), dot(f, m[2], v)];
        self.index_of(w).expect("invertible matrix")
    }
}

/// Curve points over GF(q⁶) that are not GF(q²)-rational, and their
/// Frobenius triangles. Only materialised at q = 4.
#[derive(Clone, Debug)]
pub struct SexticCurve {
    points: Vec<Coords>,
    index: FxHashMap<Coords, u32>,
    triangles: Vec<[u32; 3]>,
    triangle_of: Vec<u32>,
    rational_count: u64,
}

/// Largest GF(q⁶) for which the point set is materialised.
const SEXTIC_MATERIALIZE_LIMIT: u32 = 12;

impl SexticCurve {
    pub fn new(tower: &FieldTower) -> Result<Self> {
        let f = tower.sextic();
        if f.degree() > SEXTIC_MATERIALIZE_LIMIT {
            return Err(Error::Usage(format!(
                "GF(2^{}) point set too large to materialise; use sextic_point_count",
                f.degree()
            )));
        }
        let size = f.size() as Gf;
        let q = tower.q();
        let buckets = trace_buckets(tower);
        let mut all = vec![[1, 0, 0]];
        for y in 0..size {
            let c = f.pow(y, q + 1);
            for &x in &buckets[c as usize] {
                all.push(normalize(f, [x, y, 1]).expect("nonzero"));
            }
        }
        let quad_mask = (tower.quad().size() - 1) as Gf;
        let rational = |p: &Coords| p.iter().all(|&x| x & !quad_mask == 0);
        let rational_count = all.iter().filter(|p| rational(p)).count() as u64;
        let mut points: Vec<Coords> = all.into_iter().filter(|p| !rational(p)).collect();
        points.sort_unstable();
        points.dedup();
        let index: FxHashMap<Coords, u32> = points
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as u32))
            .collect();

        let frob = |p: Coords| {
            normalize(
                f,
                [
                    tower.sextic_frobenius_q2(p[0]),
                    tower.sextic_frobenius_q2(p[1]),
                    tower.sextic_frobenius_q2(p[2]),
                ],
            )
            .expect("nonzero")
        };
        let mut triangle_of = vec![u32::MAX; points.len()];
        let mut triangles = Vec::new();
        for i in 0..points.len() {
            if triangle_of[i] != u32::MAX {
                continue;
            }
            let p0 = points[i];
            let p1 = frob(p0);
            let p2 = frob(p1);
            if frob(p2) != p0 || p1 == p0 {
                return Err(Error::Consistency(
                    "Frobenius orbit of an off-rational point is not a 3-cycle".into(),
                ));
            }
            if det3(f, p0, p1, p2) == 0 {
                return Err(Error::Consistency("degenerate Frobenius triangle".into()));
            }
            let mut v = [index[&p0], index[&p1], index[&p2]];
            v.sort_unstable();
            let id = triangles.len() as u32;
            for &k in &v {
                triangle_of[k as usize] = id;
            }
            triangles.push(v);
        }
        Ok(SexticCurve {
            points,
            index,
            triangles,
            triangle_of,
            rational_count,
        })
    }

    pub fn off_rational_points(&self) -> &[Coords] {
        &self.points
    }

    pub fn rational_count(&self) -> u64 {
        self.rational_count
    }

    pub fn index_of(&self, field: &Field, v: Coords) -> Option<u32> {
        let c = normalize(field, v)?;
        self.index.get(&c).copied()
    }

    pub fn triangles(&self) -> Vec<Triangle> {
        self.triangles
            .iter()
            .map(|&vertices| Triangle {
                vertices,
                kind: TriangleKind::Frobenius,
            })
            .collect()
    }

    pub fn triangle_vertices(&self, t: u32) -> [Coords; 3] {
        let v = self.triangles[t as usize];
        [
            self.points[v[0] as usize],
            self.points[v[1] as usize],
            self.points[v[2] as usize],
        ]
    }

    /// Indices of the three vertices of triangle `t`.
    pub fn triangle_points(&self, t: u32) -> [u32; 3] {
        self.triangles[t as usize]
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Triangle containing the off-rational point with the given index.
    pub fn triangle_of(&self, p: u32) -> u32 {
        self.triangle_of[p as usize]
    }
}

/// For each `c` in GF(q⁶), the solutions of `x^q + x = c`.
fn trace_buckets(tower: &FieldTower) -> Vec<Vec<Gf>> {
    let f = tower.sextic();
    let size = f.size() as usize;
    let mut buckets = vec![Vec::new(); size];
    for x in 0..size as Gf {
        buckets[(tower.sextic_frobenius_q(x) ^ x) as usize].push(x);
    }
    buckets
}

/// Number of GF(q⁶)-rational points of the Norm-Trace curve, counted without
/// materialising them: the map `x ↦ x^q + x` is GF(2)-linear with kernel GF(q),
/// so each `y` contributes `q` affine points when `y^(q+1)` is in its image.
pub fn sextic_point_count(tower: &FieldTower) -> u64 {
    let f = tower.sextic();
    let deg = f.degree() as usize;
    // Row-reduce the image of the basis to get a membership test for the image.
    let mut basis: Vec<Gf> = Vec::new();
    for i in 0..deg {
        let x = 1 << i;
        let mut v = tower.sextic_frobenius_q(x) ^ x;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    let in_image = |mut v: Gf| {
        for &b in &basis {
            v = v.min(v ^ b);
        }
        v == 0
    };
    let q = tower.q();
    let kernel = 1u64 << (deg - basis.len());
    debug_assert_eq!(kernel, q);
    let cubic = tower.sextic_cubic();
    let frob_q = f.frobenius_map(tower.base().degree());
    let mut affine = 0u64;
    for y in 0..f.size() as Gf {
        let c = cubic.mul(frob_q.apply(y), y);
        if in_image(c) {
            affine += kernel;
        }
    }
    affine + 1
}

/// Geometry counts that hold for every n and are cheap enough for q = 16.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeometrySummary {
    pub n: u32,
    pub q: u64,
    pub plane_points: u64,
    pub curve_points: u64,
    pub tangent_lines: u64,
    pub chords: u64,
    pub sextic_points: u64,
    pub sextic_off_rational: u64,
    pub frobenius_triangles: u64,
    pub self_polar_triangles: Option<u64>,
}

pub fn summarize(plane: &Plane, with_triangles: bool) -> Result<GeometrySummary> {
    let mut tangents = 0;
    let mut chords = 0;
    for l in 0..plane.num_points() as u32 {
        match plane.classify_line(l)? {
            LineKind::Tangent => tangents += 1,
            LineKind::Chord => chords += 1,
        }
    }
    let sextic = sextic_point_count(plane.tower());
    let rational = plane.curve().len() as u64;
    let off = sextic - rational;
    if !off.is_multiple_of(3) {
        return Err(Error::Consistency(format!(
            "{off} off-rational points do not split into triangles"
        )));
    }
    let self_polar = if with_triangles {
        Some(plane.self_polar_triangles().len() as u64)
    } else {
        None
    };
    Ok(GeometrySummary {
        n: plane.tower().n(),
        q: plane.q(),
        plane_points: plane.num_points() as u64,
        curve_points: rational,
        tangent_lines: tangents,
        chords,
        sextic_points: sextic,
        sextic_off_rational: off,
        frobenius_triangles: off / 3,
        self_polar_triangles: self_polar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn plane() -> &'static Plane {
        static P: OnceLock<Plane> = OnceLock::new();
        P.get_or_init(|| Plane::new(FieldTower::new(1).unwrap()).unwrap())
    }

    #[test]
    fn plane_sizes() {
        let p = plane();
        assert_eq!(p.num_points(), 16 * 16 + 16 + 1);
        assert_eq!(p.curve().len(), 65);
    }

    #[test]
    fn curve_definitions_agree() {
        let p = plane();
        assert_eq!(p.curve(), p.isotropic_points().as_slice());
        assert_eq!(p.curve(), p.norm_trace_parametrized().as_slice());
        assert_eq!(p.curve_indices(CurveModel::Fermat).len(), 65);
    }

    #[test]
    fn models_are_projectively_equivalent() {
        let p = plane();
        let m = p.model_projectivity().expect("projectivity exists");
        let mut image: Vec<u32> = p.curve().iter().map(|&x| p.apply_matrix(&m, x)).collect();
        image.sort_unstable();
        assert_eq!(image, p.curve_indices(CurveModel::Fermat));
    }

    #[test]
    fn polarity_involution_and_reciprocity() {
        let p = plane();
        assert!(p.polarity().is_valid(p.tower()));
        assert!(Polarity::fermat().is_valid(p.tower()));
        let n = p.num_points() as u32;
        for a in 0..n {
            assert_eq!(p.pole_of(p.polar_of(a)), a);
            for b in 0..n {
                assert_eq!(p.incident(b, p.polar_of(a)), p.incident(a, p.polar_of(b)));
            }
        }
    }

    #[test]
    fn line_classification() {
        let p = plane();
        let mut tangent = 0;
        let mut chord = 0;
        for l in 0..p.num_points() as u32 {
            match p.classify_line(l).unwrap() {
                LineKind::Tangent => tangent += 1,
                LineKind::Chord => chord += 1,
            }
        }
        assert_eq!((tangent, chord), (65, 208));
        for a in 0..p.num_points() as u32 {
            let kind = p.classify_line(p.polar_of(a)).unwrap();
            let on_curve = p.curve_position(a).is_some();
            assert_eq!(kind == LineKind::Tangent, on_curve);
        }
    }

    #[test]
    fn self_polar_triangles() {
        let p = plane();
        let t = p.self_polar_triangles();
        assert_eq!(t.len(), 416);
        for tri in &t {
            assert!(p.is_self_polar(tri));
            assert!(tri.vertices.iter().all(|&v| p.curve_position(v).is_none()));
            // the polarity maps the vertex set onto the side set
            let mut sides: Vec<u32> = vec![
                p.line_through(tri.vertices[1], tri.vertices[2]),
                p.line_through(tri.vertices[0], tri.vertices[2]),
                p.line_through(tri.vertices[0], tri.vertices[1]),
            ];
            sides.sort_unstable();
            let mut polars: Vec<u32> = tri.vertices.iter().map(|&v| p.polar_of(v)).collect();
            polars.sort_unstable();
            assert_eq!(sides, polars);
        }
    }

    #[test]
    fn frobenius_triangles() {
        let tower = FieldTower::new(1).unwrap();
        let s = SexticCurve::new(&tower).unwrap();
        assert_eq!(s.rational_count(), 65);
        assert_eq!(s.off_rational_points().len(), 4800);
        assert_eq!(s.num_triangles(), 1600);
        assert_eq!(sextic_point_count(&tower), 4865);
    }

    #[test]
    fn summary_q4() {
        let s = summarize(plane(), true).unwrap();
        assert_eq!(s.frobenius_triangles, 1600);
        assert_eq!(s.self_polar_triangles, Some(416));
        assert_eq!(s.tangent_lines + s.chords, 273);
    }
}
