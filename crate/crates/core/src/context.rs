//! Everything the q = 4 computations share, built once.

use crate::error::{Error, Result};
use crate::geometry::{Plane, SexticCurve, Triangle};
use crate::group::{ElementTable, Psu3};

#[derive(Debug)]
pub struct GroupContext {
    pub group: Psu3,
    pub table: ElementTable,
    pub sextic: SexticCurve,
    pub self_polar: Vec<Triangle>,
    /// Conjugation maps of the table generators.
    pub conj_maps: Vec<Vec<u32>>,
}

impl GroupContext {
    /// Only n = 1 fits: the element table and the GF(q⁶) point set are
    /// materialised in full.
    pub fn build(n: u32) -> Result<Self> {
        if n != 1 {
            return Err(Error::Usage(format!(
                "element-level computations need n = 1 (q = 4); got n = {n}"
            )));
        }
        let group = Psu3::build(n)?;
        let table = ElementTable::build(&group)?;
        let sextic = SexticCurve::new(group.tower())?;
        let self_polar = group.plane().self_polar_triangles();
        let conj_maps = table.generators().iter().map(|&g| table.conjugation_map(g)).collect();
        Ok(GroupContext {
            group,
            table,
            sextic,
            self_polar,
            conj_maps,
        })
    }

    pub fn plane(&self) -> &Plane {
        self.group.plane()
    }

    pub fn q(&self) -> u64 {
        self.group.q()
    }

    pub fn order(&self) -> u64 {
        self.table.len() as u64
    }

    /// Image of an off-rational GF(q⁶) curve point under element `a`.
    pub fn sextic_image(&self, a: u32, point: u32) -> u32 {
        let f = self.group.tower().sextic();
        let v = self.sextic.off_rational_points()[point as usize];
        let w = crate::group::mat_apply(f, self.table.matrix(a), v);
        self.sextic.index_of(f, w).expect("G preserves the curve")
    }

    /// Frobenius triangle containing the image of triangle `tri` under `a`.
    pub fn frobenius_image(&self, a: u32, tri: u32) -> u32 {
        let v0 = self.sextic.triangle_points(tri)[0];
        self.sextic.triangle_of(self.sextic_image(a, v0))
    }

    /// Index of the self-polar triangle with the given (sorted) vertices.
    pub fn self_polar_index(&self, vertices: [u32; 3]) -> Option<u32> {
        self.self_polar
            .binary_search_by(|t| t.vertices.cmp(&vertices))
            .ok()
            .map(|i| i as u32)
    }

    pub fn self_polar_image(&self, a: u32, tri: u32) -> u32 {
        let perm = self.table.plane_perm(a);
        let mut v = self.self_polar[tri as usize].vertices.map(|x| perm[x as usize] as u32);
        v.sort_unstable();
        self.self_polar_index(v).expect("G permutes self-polar triangles")
    }
}
