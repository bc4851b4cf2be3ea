//! Exact arithmetic in the binary fields GF(q), GF(q²) and GF(q⁶), q = 2^(2^n).
//!
//! Elements are packed bit vectors ([`Gf`]). GF(q) and GF(q²) are realised
//! directly as GF(2)[x]/(f) with fixed Conway moduli; GF(q⁶) is a cubic
//! extension of GF(q²), so GF(q²) sits inside it as the constant coefficient
//! and the q²-Frobenius is GF(q²)-linear on the three coefficients.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Packed field element. Bit `i` is the coefficient of `x^i`; for the cubic
/// extension the three GF(q²) coefficients are stored at bit offsets 0, m, 2m.
pub type Gf = u32;

/// Largest degree for which log/antilog tables are built.
const TABLE_LIMIT: u32 = 16;

/// Conway polynomials over GF(2) for the degrees used by the tower.
const CONWAY: &[(u32, u64)] = &[(2, 0x7), (4, 0x13), (8, 0x11d), (16, 0x1002d)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    /// GF(q)
    Base,
    /// GF(q²)
    Quadratic,
    /// GF(q⁶)
    Sextic,
}

impl Level {
    pub fn multiplier(self) -> u32 {
        match self {
            Level::Base => 1,
            Level::Quadratic => 2,
            Level::Sextic => 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulus {
    /// Polynomial over GF(2), bit `i` = coefficient of `x^i`, leading bit included.
    Binary(u64),
    /// Monic `t³ + c2·t² + c1·t + c0` over GF(q²), stored as `[c0, c1, c2]`.
    Cubic([Gf; 3]),
}

impl Modulus {
    /// Hex form used in the cache manifest. Cubic moduli list `c0,c1,c2`.
    pub fn to_hex(&self) -> String {
        match self {
            Modulus::Binary(p) => format!("{p:x}"),
            Modulus::Cubic(c) => format!("{:x},{:x},{:x}", c[0], c[1], c[2]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldSpec {
    pub n: u32,
    pub level: Level,
    pub degree_over_prime: u32,
    pub modulus: Modulus,
}

/// Carry-less product of two polynomials over GF(2).
pub fn clmul(a: u32, b: u32) -> u64 {
    let (a, mut b) = (a as u64, b as u64);
    let mut acc = 0u64;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

fn poly_degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn poly_mod(mut a: u64, m: u64) -> u64 {
    let dm = poly_degree(m);
    while a != 0 && poly_degree(a) >= dm {
        a ^= m << (poly_degree(a) - dm);
    }
    a
}

/// Trial division by every polynomial of degree at most `deg/2`.
pub fn is_irreducible_gf2(p: u64) -> bool {
    let d = poly_degree(p);
    if d < 1 {
        return false;
    }
    if d == 1 {
        return true;
    }
    if p & 1 == 0 {
        return false;
    }
    let half = d / 2;
    for divisor in 2u64..(1u64 << (half + 1)) {
        if poly_mod(p, divisor) == 0 {
            return false;
        }
    }
    true
}

/// GF(2^m) realised as GF(2)[x]/(f).
#[derive(Clone, Debug)]
pub struct BinaryField {
    degree: u32,
    modulus: u64,
    exp: Vec<Gf>,
    log: Vec<u32>,
}

impl BinaryField {
    pub fn new(degree: u32, modulus: u64) -> Result<Self> {
        if degree == 0 || degree > 31 || poly_degree(modulus) != degree as i32 {
            return Err(Error::Construction(format!(
                "modulus {modulus:#x} does not have degree {degree}"
            )));
        }
        if !is_irreducible_gf2(modulus) {
            return Err(Error::Construction(format!(
                "modulus {modulus:#x} is reducible over GF(2)"
            )));
        }
        let mut field = BinaryField {
            degree,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
        };
        if degree <= TABLE_LIMIT {
            field.build_tables();
        }
        Ok(field)
    }

    pub fn conway(degree: u32) -> Result<Self> {
        let modulus = CONWAY
            .iter()
            .find(|(d, _)| *d == degree)
            .map(|(_, m)| *m)
            .ok_or_else(|| Error::Usage(format!("no stored modulus for GF(2^{degree})")))?;
        Self::new(degree, modulus)
    }

    fn build_tables(&mut self) {
        let order = (1u64 << self.degree) - 1;
        let factors = prime_factors(order);
        let generator = (2..=order as u32)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&p| self.pow_slow(g, order / p) != 1)
            })
            .expect("multiplicative group of a field is cyclic");
        let size = order as usize;
        let mut exp = vec![0; 2 * size];
        let mut log = vec![0; size + 1];
        let mut x = 1;
        for (i, slot) in exp.iter_mut().take(size).enumerate() {
            *slot = x;
            log[x as usize] = i as u32;
            x = self.mul_slow(x, generator);
        }
        for i in size..2 * size {
            exp[i] = exp[i - size];
        }
        self.exp = exp;
        self.log = log;
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn size(&self) -> u64 {
        1u64 << self.degree
    }

    fn reduce(&self, mut x: u64) -> Gf {
        let d = self.degree as i32;
        while x >> self.degree != 0 {
            let shift = poly_degree(x) - d;
            x ^= self.modulus << shift;
        }
        x as Gf
    }

    fn mul_slow(&self, a: Gf, b: Gf) -> Gf {
        self.reduce(clmul(a, b))
    }

    fn pow_slow(&self, a: Gf, mut e: u64) -> Gf {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        if self.exp.is_empty() {
            return self.mul_slow(a, b);
        }
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    pub fn inv(&self, a: Gf) -> Option<Gf> {
        if a == 0 {
            return None;
        }
        if self.exp.is_empty() {
            return Some(self.pow_slow(a, self.size() - 2));
        }
        let order = (self.size() - 1) as u32;
        Some(self.exp[((order - self.log[a as usize]) % order) as usize])
    }

    pub fn pow(&self, a: Gf, e: u64) -> Gf {
        if self.exp.is_empty() {
            return self.pow_slow(a, e);
        }
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = self.size() - 1;
        let l = (self.log[a as usize] as u64 * (e % order)) % order;
        self.exp[l as usize]
    }
}

/// GF(q⁶) as GF(q²)[t]/(t³ + c2 t² + c1 t + c0).
#[derive(Clone, Debug)]
pub struct CubicField {
    base: BinaryField,
    modulus: [Gf; 3],
    exp: Vec<Gf>,
    log: Vec<u32>,
}

impl CubicField {
    /// Uses the lexicographically smallest irreducible monic cubic over `base`.
    pub fn over(base: BinaryField) -> Result<Self> {
        let size = base.size() as u32;
        let has_root = |c: &[Gf; 3]| {
            (0..size).any(|x| {
                let x2 = base.mul(x, x);
                let x3 = base.mul(x2, x);
                x3 ^ base.mul(c[2], x2) ^ base.mul(c[1], x) ^ c[0] == 0
            })
        };
        let mut chosen = None;
        'search: for c2 in 0..size {
            for c1 in 0..size {
                for c0 in 1..size {
                    let c = [c0, c1, c2];
                    if !has_root(&c) {
                        chosen = Some(c);
                        break 'search;
                    }
                }
            }
        }
        let modulus =
            chosen.ok_or_else(|| Error::Construction("no irreducible cubic found".into()))?;
        Self::with_modulus(base, modulus)
    }

    pub fn with_modulus(base: BinaryField, modulus: [Gf; 3]) -> Result<Self> {
        let size = base.size() as u32;
        let irreducible = (0..size).all(|x| {
            let x2 = base.mul(x, x);
            base.mul(x2, x) ^ base.mul(modulus[2], x2) ^ base.mul(modulus[1], x) ^ modulus[0] != 0
        });
        if !irreducible {
            return Err(Error::Construction("cubic modulus has a root in the base field".into()));
        }
        let mut field = CubicField {
            base,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
        };
        if 3 * field.base.degree() <= TABLE_LIMIT {
            field.build_tables();
        }
        Ok(field)
    }

    fn build_tables(&mut self) {
        let order = self.size() - 1;
        let factors = prime_factors(order);
        let generator = (2..=order as u32)
            .find(|&g| factors.iter().all(|&p| self.pow_slow(g, order / p) != 1))
            .expect("multiplicative group of a field is cyclic");
        let size = order as usize;
        let mut exp = vec![0; 2 * size];
        let mut log = vec![0; size + 1];
        let mut x = 1;
        for i in 0..size {
            exp[i] = x;
            log[x as usize] = i as u32;
            x = self.mul_slow(x, generator);
        }
        for i in size..2 * size {
            exp[i] = exp[i - size];
        }
        self.exp = exp;
        self.log = log;
    }

    pub fn base(&self) -> &BinaryField {
        &self.base
    }

    pub fn modulus(&self) -> [Gf; 3] {
        self.modulus
    }

    pub fn size(&self) -> u64 {
        1u64 << (3 * self.base.degree())
    }

    #[inline]
    pub fn unpack(&self, a: Gf) -> [Gf; 3] {
        let m = self.base.degree();
        let mask = (1u32 << m) - 1;
        [a & mask, (a >> m) & mask, (a >> (2 * m)) & mask]
    }

    #[inline]
    pub fn pack(&self, c: [Gf; 3]) -> Gf {
        let m = self.base.degree();
        c[0] | (c[1] << m) | (c[2] << (2 * m))
    }

    /// Scalar multiple by an element of the base field.
    #[inline]
    pub fn scale(&self, s: Gf, a: Gf) -> Gf {
        let c = self.unpack(a);
        let b = &self.base;
        self.pack([b.mul(s, c[0]), b.mul(s, c[1]), b.mul(s, c[2])])
    }

    fn mul_slow(&self, a: Gf, b: Gf) -> Gf {
        let x = self.unpack(a);
        let y = self.unpack(b);
        let f = &self.base;
        let mut p = [0; 5];
        for i in 0..3 {
            if x[i] == 0 {
                continue;
            }
            for j in 0..3 {
                p[i + j] ^= f.mul(x[i], y[j]);
            }
        }
        for k in (3..5).rev() {
            let c = p[k];
            if c != 0 {
                p[k - 1] ^= f.mul(c, self.modulus[2]);
                p[k - 2] ^= f.mul(c, self.modulus[1]);
                p[k - 3] ^= f.mul(c, self.modulus[0]);
            }
        }
        self.pack([p[0], p[1], p[2]])
    }

    fn pow_slow(&self, a: Gf, mut e: u64) -> Gf {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        if self.exp.is_empty() {
            return self.mul_slow(a, b);
        }
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    pub fn inv(&self, a: Gf) -> Option<Gf> {
        if a == 0 {
            return None;
        }
        if self.exp.is_empty() {
            return Some(self.pow_slow(a, self.size() - 2));
        }
        let order = (self.size() - 1) as u32;
        Some(self.exp[((order - self.log[a as usize]) % order) as usize])
    }

    pub fn pow(&self, a: Gf, e: u64) -> Gf {
        if self.exp.is_empty() {
            return self.pow_slow(a, e);
        }
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = self.size() - 1;
        let l = (self.log[a as usize] as u64 * (e % order)) % order;
        self.exp[l as usize]
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Binary(BinaryField),
    Cubic(CubicField),
}

/// One level of the tower together with its [`FieldSpec`].
#[derive(Clone, Debug)]
pub struct Field {
    spec: FieldSpec,
    repr: Repr,
}

impl Field {
    fn binary(n: u32, level: Level, f: BinaryField) -> Self {
        Field {
            spec: FieldSpec {
                n,
                level,
                degree_over_prime: f.degree(),
                modulus: Modulus::Binary(f.modulus()),
            },
            repr: Repr::Binary(f),
        }
    }

    fn cubic(n: u32, f: CubicField) -> Self {
        Field {
            spec: FieldSpec {
                n,
                level: Level::Sextic,
                degree_over_prime: 3 * f.base().degree(),
                modulus: Modulus::Cubic(f.modulus()),
            },
            repr: Repr::Cubic(f),
        }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn degree(&self) -> u32 {
        self.spec.degree_over_prime
    }

    pub fn size(&self) -> u64 {
        1u64 << self.degree()
    }

    pub fn contains(&self, a: Gf) -> bool {
        (a as u64) < self.size()
    }

    #[inline]
    pub fn add(&self, a: Gf, b: Gf) -> Gf {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        match &self.repr {
            Repr::Binary(f) => f.mul(a, b),
            Repr::Cubic(f) => f.mul(a, b),
        }
    }

    pub fn inv(&self, a: Gf) -> Option<Gf> {
        match &self.repr {
            Repr::Binary(f) => f.inv(a),
            Repr::Cubic(f) => f.inv(a),
        }
    }

    pub fn pow(&self, a: Gf, e: u64) -> Gf {
        match &self.repr {
            Repr::Binary(f) => f.pow(a, e),
            Repr::Cubic(f) => f.pow(a, e),
        }
    }

    /// `x ↦ x^(2^k)` as a GF(2)-linear map on packed elements.
    pub fn frobenius_map(&self, k: u32) -> LinearMap {
        let e = 1u64 << k;
        LinearMap {
            columns: (0..self.degree()).map(|i| self.pow(1 << i, e)).collect(),
        }
    }

    pub fn as_binary(&self) -> Option<&BinaryField> {
        match &self.repr {
            Repr::Binary(f) => Some(f),
            Repr::Cubic(_) => None,
        }
    }

    pub fn as_cubic(&self) -> Option<&CubicField> {
        match &self.repr {
            Repr::Cubic(f) => Some(f),
            Repr::Binary(_) => None,
        }
    }

    pub fn element(&self, value: Gf) -> Result<FieldElement<'_>> {
        if !self.contains(value) {
            return Err(Error::Usage(format!(
                "{value:#x} is not an element of GF(2^{})",
                self.degree()
            )));
        }
        Ok(FieldElement { field: self, value })
    }
}

/// GF(2)-linear map on packed elements, given by the images of the basis bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    columns: Vec<Gf>,
}

impl LinearMap {
    #[inline]
    pub fn apply(&self, mut x: Gf) -> Gf {
        let mut acc = 0;
        let mut i = 0;
        while x != 0 {
            if x & 1 == 1 {
                acc ^= self.columns[i];
            }
            x >>= 1;
            i += 1;
        }
        acc
    }
}

/// A field element bound to its field; arithmetic is checked.
#[derive(Clone, Copy)]
pub struct FieldElement<'f> {
    field: &'f Field,
    value: Gf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
    Pow(u64),
}

impl<'f> FieldElement<'f> {
    pub fn value(&self) -> Gf {
        self.value
    }

    pub fn field(&self) -> &'f Field {
        self.field
    }

    fn same_field(&self, other: &FieldElement<'_>) -> Result<()> {
        if std::ptr::eq(self.field, other.field) || self.field.spec == other.field.spec {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "operands live in GF(2^{}) and GF(2^{})",
                self.field.degree(),
                other.field.degree()
            )))
        }
    }

    pub fn add(self, other: FieldElement<'_>) -> Result<Self> {
        self.same_field(&other)?;
        Ok(FieldElement {
            field: self.field,
            value: self.value ^ other.value,
        })
    }

    pub fn mul(self, other: FieldElement<'_>) -> Result<Self> {
        self.same_field(&other)?;
        Ok(FieldElement {
            field: self.field,
            value: self.field.mul(self.value, other.value),
        })
    }

    pub fn inv(self) -> Result<Self> {
        let value = self
            .field
            .inv(self.value)
            .ok_or_else(|| Error::Domain("inverse of zero".into()))?;
        Ok(FieldElement {
            field: self.field,
            value,
        })
    }

    pub fn pow(self, e: u64) -> Self {
        FieldElement {
            field: self.field,
            value: self.field.pow(self.value, e),
        }
    }
}

impl PartialEq for FieldElement<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.field.spec == other.field.spec && self.value == other.value
    }
}

impl fmt::Debug for FieldElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{})[{:#x}]", self.field.degree(), self.value)
    }
}

/// `field_arith(a, b, op)`; `b` is ignored for unary operations.
pub fn field_arith<'f>(
    a: FieldElement<'f>,
    b: FieldElement<'_>,
    op: FieldOp,
) -> Result<FieldElement<'f>> {
    match op {
        FieldOp::Add => a.add(b),
        FieldOp::Mul => a.mul(b),
        FieldOp::Inv => a.inv(),
        FieldOp::Pow(e) => Ok(a.pow(e)),
    }
}

/// GF(q) ⊂ GF(q²) ⊂ GF(q⁶) for q = 2^(2^n).
#[derive(Clone, Debug)]
pub struct FieldTower {
    n: u32,
    q: u64,
    base: Field,
    quad: Field,
    sextic: Field,
    base_embedding: Vec<Gf>,
    conj: LinearMap,
    sextic_frob_q: LinearMap,
    sextic_frob_q2: LinearMap,
}

impl FieldTower {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Usage("tower parameter n must be positive".into()));
        }
        if n > 3 {
            return Err(Error::Usage(format!("n = {n} is beyond the supported tower (n ≤ 3)")));
        }
        let m = 1u32 << n;
        let base_f = BinaryField::conway(m)?;
        let quad_f = BinaryField::conway(2 * m)?;
        let sextic_f = CubicField::over(quad_f.clone())?;
        let q = 1u64 << m;

        // GF(q) → GF(q²): send x to a root of the GF(q) modulus, preferring
        // x^(q+1) (the Conway-compatible choice).
        let modulus = base_f.modulus();
        let eval = |r: Gf| {
            let mut acc = 0;
            let mut pw = 1;
            for i in 0..=m {
                if (modulus >> i) & 1 == 1 {
                    acc ^= pw;
                }
                pw = quad_f.mul(pw, r);
            }
            acc
        };
        let preferred = quad_f.pow(2, q + 1);
        let root = if eval(preferred) == 0 {
            preferred
        } else {
            (1..quad_f.size() as Gf)
                .find(|&r| eval(r) == 0)
                .ok_or_else(|| Error::Construction("GF(q) does not embed in GF(q²)".into()))?
        };
        let powers: Vec<Gf> = (0..m).map(|i| quad_f.pow(root, i as u64)).collect();
        let base_embedding: Vec<Gf> = (0..q as Gf)
            .map(|v| {
                (0..m)
                    .filter(|i| (v >> i) & 1 == 1)
                    .fold(0, |acc, i| acc ^ powers[i as usize])
            })
            .collect();

        let base = Field::binary(n, Level::Base, base_f);
        let quad = Field::binary(n, Level::Quadratic, quad_f);
        let sextic = Field::cubic(n, sextic_f);
        let conj = quad.frobenius_map(m);
        let sextic_frob_q = sextic.frobenius_map(m);
        let sextic_frob_q2 = sextic.frobenius_map(2 * m);
        let tower = FieldTower {
            n,
            q,
            base,
            quad,
            sextic,
            base_embedding,
            conj,
            sextic_frob_q,
            sextic_frob_q2,
        };
        tower.verify_embedding()?;
        Ok(tower)
    }

    fn verify_embedding(&self) -> Result<()> {
        let e = &self.base_embedding;
        let q = self.q as Gf;
        for a in 0..q {
            if self.conjugate(e[a as usize]) != e[a as usize] {
                return Err(Error::Construction("GF(q) image not fixed by conjugation".into()));
            }
            for b in 0..q {
                let prod = self.base.mul(a, b);
                if e[prod as usize] != self.quad.mul(e[a as usize], e[b as usize]) {
                    return Err(Error::Construction("GF(q) embedding is not multiplicative".into()));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn quad(&self) -> &Field {
        &self.quad
    }

    pub fn sextic(&self) -> &Field {
        &self.sextic
    }

    pub fn quad_binary(&self) -> &BinaryField {
        self.quad.as_binary().expect("GF(q²) is a binary field")
    }

    pub fn sextic_cubic(&self) -> &CubicField {
        self.sextic.as_cubic().expect("GF(q⁶) is a cubic extension")
    }

    pub fn field(&self, level: Level) -> &Field {
        match level {
            Level::Base => &self.base,
            Level::Quadratic => &self.quad,
            Level::Sextic => &self.sextic,
        }
    }

    /// GF(q) → GF(q²).
    pub fn embed_base(&self, a: Gf) -> Gf {
        self.base_embedding[a as usize]
    }

    /// Inverse of [`embed_base`](Self::embed_base) on the subfield.
    pub fn to_base(&self, a: Gf) -> Option<Gf> {
        self.base_embedding.iter().position(|&x| x == a).map(|i| i as Gf)
    }

    /// GF(q²) → GF(q⁶): the constant coefficient of the cubic extension.
    #[inline]
    pub fn embed_quad(&self, a: Gf) -> Gf {
        a
    }

    /// `x ↦ x^q` on GF(q²).
    #[inline]
    pub fn conjugate(&self, x: Gf) -> Gf {
        self.conj.apply(x)
    }

    /// `(x^(q+1), x + x^q)`, both in the GF(q) subfield of GF(q²).
    pub fn norm_trace(&self, x: Gf) -> (Gf, Gf) {
        let c = self.conjugate(x);
        (self.quad.mul(x, c), x ^ c)
    }

    /// `x ↦ x^q` on GF(q⁶).
    #[inline]
    pub fn sextic_frobenius_q(&self, x: Gf) -> Gf {
        self.sextic_frob_q.apply(x)
    }

    /// `x ↦ x^(q²)` on GF(q⁶).
    #[inline]
    pub fn sextic_frobenius_q2(&self, x: Gf) -> Gf {
        self.sextic_frob_q2.apply(x)
    }

    /// Relative trace GF(q⁶) → GF(q): `Σ_{i<6} x^(q^i)`.
    pub fn sextic_trace_to_base(&self, x: Gf) -> Gf {
        let mut acc = 0;
        let mut y = x;
        for _ in 0..6 {
            acc ^= y;
            y = self.sextic_frobenius_q(y);
        }
        acc
    }

    pub fn specs(&self) -> [&FieldSpec; 3] {
        [self.base.spec(), self.quad.spec(), self.sextic.spec()]
    }
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tower() -> FieldTower {
        FieldTower::new(1).unwrap()
    }

    #[test]
    fn conway_moduli_are_irreducible() {
        for &(d, m) in CONWAY {
            assert!(is_irreducible_gf2(m), "degree {d}");
        }
        assert!(!is_irreducible_gf2(0b101)); // x² + 1 = (x + 1)²
    }

    #[test]
    fn gf16_axioms_exhaustive() {
        let t = tower();
        let f = t.quad();
        assert_eq!(f.size(), 16);
        for a in 0..16 {
            assert_eq!(f.mul(1, a), a);
            for b in 0..16 {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in 0..16 {
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
                }
            }
        }
    }

    #[test]
    fn gf16_inverses_and_group_order() {
        let t = tower();
        let f = t.quad();
        let nonzero = (1..16).count();
        assert_eq!(nonzero, 15);
        for a in 1..16 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            assert_eq!(f.pow(a, 15), 1);
        }
        assert!(f.inv(0).is_none());
    }

    #[test]
    fn checked_arithmetic_errors() {
        let t = tower();
        let zero = t.quad().element(0).unwrap();
        assert!(matches!(zero.inv(), Err(Error::Domain(_))));
        let a = t.quad().element(3).unwrap();
        let b = t.base().element(1).unwrap();
        assert!(matches!(a.mul(b), Err(Error::Usage(_))));
        assert!(matches!(
            field_arith(a, b, FieldOp::Add),
            Err(Error::Usage(_))
        ));
        assert!(t.quad().element(16).is_err());
        let one = t.quad().element(1).unwrap();
        assert_eq!(field_arith(one, a, FieldOp::Mul).unwrap(), a);
    }

    #[test]
    fn conjugation_is_involution_fixing_gf4() {
        let t = tower();
        assert_eq!(t.conjugate(0), 0);
        assert_eq!(t.conjugate(1), 1);
        let mut fixed = 0;
        for x in 0..16 {
            assert_eq!(t.conjugate(t.conjugate(x)), x);
            assert_eq!(t.conjugate(x), t.quad().pow(x, 4));
            if t.conjugate(x) == x {
                fixed += 1;
                assert!(t.to_base(x).is_some());
            }
        }
        assert_eq!(fixed, 4);
    }

    #[test]
    fn norm_and_trace_fibres() {
        let t = tower();
        let (n1, _) = t.norm_trace(1);
        assert_eq!(n1, 1);
        assert_eq!(t.norm_trace(0).1, 0);
        let mut norm_hits = std::collections::HashMap::new();
        let mut trace_hits = std::collections::HashMap::new();
        for x in 0..16 {
            let (nx, tx) = t.norm_trace(x);
            assert!(t.to_base(nx).is_some() && t.to_base(tx).is_some());
            if x != 0 {
                *norm_hits.entry(nx).or_insert(0) += 1;
            }
            *trace_hits.entry(tx).or_insert(0) += 1;
        }
        assert_eq!(norm_hits.len(), 3);
        assert!(norm_hits.values().all(|&c| c == 5));
        assert_eq!(trace_hits.len(), 4);
        assert!(trace_hits.values().all(|&c| c == 4));
    }

    #[test]
    fn frobenius_is_automorphism() {
        let t = tower();
        let f = t.quad();
        let sq = f.frobenius_map(1);
        for a in 0..16 {
            for b in 0..16 {
                assert_eq!(sq.apply(f.mul(a, b)), f.mul(sq.apply(a), sq.apply(b)));
                assert_eq!(sq.apply(a ^ b), sq.apply(a) ^ sq.apply(b));
            }
        }
    }

    #[test]
    fn sextic_field_samples() {
        let t = tower();
        let f = t.sextic();
        assert_eq!(f.degree(), 12);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let a = rng.gen_range(1..4096);
            let b = rng.gen_range(0..4096);
            let c = rng.gen_range(0..4096);
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
            assert_eq!(f.pow(a, 4095), 1);
            assert_eq!(t.sextic_frobenius_q2(a), f.pow(a, 16));
            let x = t.sextic_frobenius_q2(a);
            assert_eq!(t.sextic_frobenius_q2(t.sextic_frobenius_q2(x)), a);
        }
    }

    #[test]
    fn quad_embeds_in_sextic() {
        let t = tower();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let a = rng.gen_range(0..16);
            let b = rng.gen_range(0..16);
            let (ea, eb) = (t.embed_quad(a), t.embed_quad(b));
            assert_eq!(t.embed_quad(t.quad().mul(a, b)), t.sextic().mul(ea, eb));
            assert_eq!(t.embed_quad(a ^ b), ea ^ eb);
            assert_eq!(t.sextic_frobenius_q2(ea), ea);
        }
    }

    #[test]
    fn tower_n2_builds() {
        let t = FieldTower::new(2).unwrap();
        assert_eq!(t.q(), 16);
        assert_eq!(t.quad().degree(), 8);
        assert_eq!(t.sextic().degree(), 24);
        let f = t.sextic();
        let a = 0x123456;
        assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        assert_eq!(t.sextic_frobenius_q(a), f.pow(a, 16));
    }

    #[test]
    fn modulus_hex_is_stable() {
        let t = tower();
        assert_eq!(t.quad().spec().modulus.to_hex(), "13");
        assert_eq!(t.base().spec().modulus.to_hex(), "7");
    }
}
