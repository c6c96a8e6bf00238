//! The Hermitian curve over 𝔽_{q²} in its standard plane models, projective
//! points, point enumeration over extension fields, and explicit projective
//! equivalences between the models.

use crate::gf::{self, Element, FieldCtx, GfError, UnitCondition};
use crate::poly::{self, PolyError, PresolvedMap, TriPoly, UniPoly};
use std::hash::{Hash, Hasher};
use thiserror::Error;

/// Default cap on the cardinality of the enumeration field.
pub const ENUM_CAP: u64 = 1 << 23;
/// Cap for the generic double-loop fallback.
pub const GENERIC_CAP: u64 = 1 << 12;

#[derive(Debug, Error)]
pub enum HermError {
    #[error("q = {0} is not a prime power in range")]
    InvalidQ(u64),
    #[error("operation requires a different model")]
    WrongModel,
    #[error("point field is not an extension of the model field")]
    IncompatibleField,
    #[error("enumeration cap exceeded: {card} > {cap}")]
    CapExceeded { card: u64, cap: u64 },
    #[error("projective point needs a nonzero coordinate")]
    ZeroPoint,
    #[error("no equivalence matrix between these models")]
    NoEquivalence,
    #[error("field error: {0}")]
    Field(#[from] GfError),
    #[error("polynomial error: {0}")]
    Poly(#[from] PolyError),
}

/// Identifier of a plane model.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModelId {
    /// Y^q Z + Y Z^q - X^{q+1}.
    EQ11,
    /// X^{q+1} + Y^{q+1} + Z^{q+1}.
    M1,
    /// Y^q Z - Y Z^q + ω X^{q+1}, ω^{q-1} = -1.
    M2,
    /// X Y^q - X^q Y + ω Z^{q+1}, ω^{q-1} = -1.
    M3,
    /// X Y^q + Y Z^q + Z X^q.
    M4,
    /// Affine plane model of a degree-d quotient.
    Quotient { case: String, q: u64, d: u64 },
}

/// A plane curve model with its defining polynomial over 𝔽_{q²}.
#[derive(Clone, Debug)]
pub struct PlaneModel {
    pub id: ModelId,
    pub q: u64,
    pub poly: TriPoly,
    pub genus: u64,
    pub notes: String,
}

/// Point of the projective plane, normalized so the first nonzero coordinate
/// equals 1; equality of points is equality of normalized triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjPoint {
    ctx: FieldCtx,
    coords: [Element; 3],
}

impl ProjPoint {
    pub fn new(ctx: &FieldCtx, coords: [Element; 3]) -> Result<ProjPoint, HermError> {
        let lead = coords
            .iter()
            .find(|c| !c.is_zero())
            .ok_or(HermError::ZeroPoint)?
            .clone();
        let inv = lead.inv();
        Ok(ProjPoint {
            ctx: ctx.clone(),
            coords: [&coords[0] * &inv, &coords[1] * &inv, &coords[2] * &inv],
        })
    }
    pub fn from_ints(ctx: &FieldCtx, coords: [i64; 3]) -> Result<ProjPoint, HermError> {
        ProjPoint::new(ctx, coords.map(|c| ctx.from_int(c)))
    }
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    pub fn coords(&self) -> &[Element; 3] {
        &self.coords
    }
}

impl Hash for ProjPoint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}
impl PartialOrd for ProjPoint {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ProjPoint {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.coords.cmp(&other.coords)
    }
}

/// Writes q = p^t with p prime.
pub fn prime_power(q: u64) -> Option<(u64, usize)> {
    if q < 2 {
        return None;
    }
    let mut p = 0;
    for c in 2.. {
        if c * c > q {
            p = q;
            break;
        }
        if q % c == 0 {
            p = c;
            break;
        }
    }
    let mut t = 0;
    let mut v = q;
    while v % p == 0 {
        v /= p;
        t += 1;
    }
    if v == 1 {
        Some((p, t))
    } else {
        None
    }
}

/// Builds one of the five Hermitian plane models over 𝔽_{q²}.
pub fn model(id: ModelId, q: u64) -> Result<PlaneModel, HermError> {
    let (p, t) = prime_power(q).ok_or(HermError::InvalidQ(q))?;
    let fq2 = gf::make_field(p, 2 * t)?;
    let one = fq2.one();
    let qe = q as u32;
    let (poly, notes) = match &id {
        ModelId::EQ11 => (
            TriPoly::from_terms(
                &fq2,
                vec![
                    ((0, qe, 1), one.clone()),
                    ((0, 1, qe), one.clone()),
                    ((qe + 1, 0, 0), fq2.from_int(-1)),
                ],
            ),
            "affine-friendly norm-trace model",
        ),
        ModelId::M1 => (
            TriPoly::from_terms(
                &fq2,
                vec![
                    ((qe + 1, 0, 0), one.clone()),
                    ((0, qe + 1, 0), one.clone()),
                    ((0, 0, qe + 1), one.clone()),
                ],
            ),
            "diagonal Fermat model",
        ),
        ModelId::M2 => {
            let omega = gf::solve_unit_condition(&fq2, UnitCondition::QMinus1IsNegOne)?;
            (
                TriPoly::from_terms(
                    &fq2,
                    vec![
                        ((0, qe, 1), one.clone()),
                        ((0, 1, qe), fq2.from_int(-1)),
                        ((qe + 1, 0, 0), omega),
                    ],
                ),
                "twisted norm-trace model",
            )
        }
        ModelId::M3 => {
            let omega = gf::solve_unit_condition(&fq2, UnitCondition::QMinus1IsNegOne)?;
            (
                TriPoly::from_terms(
                    &fq2,
                    vec![
                        ((1, qe, 0), one.clone()),
                        ((qe, 1, 0), fq2.from_int(-1)),
                        ((0, 0, qe + 1), omega),
                    ],
                ),
                "skew model with the line Z=0 distinguished",
            )
        }
        ModelId::M4 => (
            TriPoly::from_terms(
                &fq2,
                vec![
                    ((1, qe, 0), one.clone()),
                    ((0, 1, qe), one.clone()),
                    ((qe, 0, 1), one.clone()),
                ],
            ),
            "cyclic-symmetric model",
        ),
        ModelId::Quotient { .. } => return Err(HermError::WrongModel),
    };
    Ok(PlaneModel {
        id,
        q,
        poly,
        genus: q * (q - 1) / 2,
        notes: notes.to_string(),
    })
}

impl PlaneModel {
    /// Wraps an affine bivariate quotient-model polynomial.
    pub fn quotient(case: &str, q: u64, d: u64, poly: TriPoly, genus: u64) -> PlaneModel {
        PlaneModel {
            id: ModelId::Quotient {
                case: case.to_string(),
                q,
                d,
            },
            q,
            poly,
            genus,
            notes: format!("degree-{d} quotient plane model"),
        }
    }
}

/// Membership test; the point may live in any extension of the model field.
pub fn on_curve(c: &PlaneModel, p: &ProjPoint) -> Result<bool, HermError> {
    let base = c.poly.ctx();
    if p.ctx().p() != base.p() || p.ctx().k() % base.k() != 0 {
        return Err(HermError::IncompatibleField);
    }
    let poly = c.poly.rebase(p.ctx())?;
    Ok(poly.eval(p.coords()).is_zero())
}

/// The set of points of a model over one field: affine chart points stored as
/// packed coordinate codes, plus the points on Z = 0.
pub struct PointSet {
    ext: FieldCtx,
    affine: Vec<(u64, u64)>,
    infinity: Vec<ProjPoint>,
}

impl PointSet {
    pub fn ext(&self) -> &FieldCtx {
        &self.ext
    }
    pub fn len(&self) -> usize {
        self.affine.len() + self.infinity.len()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// (x, y) codes of the points (x : y : 1), sorted.
    pub fn affine(&self) -> &[(u64, u64)] {
        &self.affine
    }
    pub fn infinity(&self) -> &[ProjPoint] {
        &self.infinity
    }
    pub fn iter(&self) -> impl Iterator<Item = ProjPoint> + '_ {
        let one = self.ext.one();
        self.affine
            .iter()
            .map(move |&(x, y)| {
                ProjPoint::new(
                    &self.ext,
                    [self.ext.from_code(x), self.ext.from_code(y), one.clone()],
                )
                .expect("chart point is nonzero")
            })
            .chain(self.infinity.iter().cloned())
    }
    pub fn points(&self) -> Vec<ProjPoint> {
        self.iter().collect()
    }
}

enum AffKind {
    /// Solve L(y) = scale · x^e, y used directly.
    Linear {
        pre: PresolvedMap,
        scale: Element,
        e: u64,
    },
    /// Solve L(u) = scale · x^{-e} for x ≠ 0, then y = u·x.
    LinearInv {
        pre: PresolvedMap,
        scale: Element,
        e: u64,
    },
    /// x·y^q + y = -x^q, per-x linear system.
    TwistPerX { fq_cols: Vec<Element> },
    /// y^{q+1} = -1 - x^{q+1}, solved on discrete logs.
    NormEq,
    Generic {
        poly: TriPoly,
    },
}

pub fn enumerate_points(c: &PlaneModel, ext: &FieldCtx) -> Result<PointSet, HermError> {
    enumerate_points_with(c, ext, ENUM_CAP, 0)
}

/// [`enumerate_points`] with an explicit cardinality cap and worker count
/// (0 = auto). The worker count never affects the result.
pub fn enumerate_points_with(
    c: &PlaneModel,
    ext: &FieldCtx,
    cap: u64,
    jobs: usize,
) -> Result<PointSet, HermError> {
    let base = c.poly.ctx();
    if ext.p() != base.p() || ext.k() % base.k() != 0 {
        return Err(HermError::IncompatibleField);
    }
    let card = ext.cardinality();
    if card > cap {
        return Err(HermError::CapExceeded { card, cap });
    }
    let q = c.q;
    let (_, t) = prime_power(q).ok_or(HermError::InvalidQ(q))?;
    let poly_ext = c.poly.rebase(ext)?;

    let kind = match &c.id {
        ModelId::EQ11 => {
            // y^q + y = x^{q+1}
            let l = poly::LinearizedMap::from_additive(ext, &[(ext.one(), t), (ext.one(), 0)]);
            AffKind::Linear {
                pre: l.presolve(),
                scale: ext.one(),
                e: q + 1,
            }
        }
        ModelId::M2 => {
            // y^q - y = -ω x^{q+1}, with the model's own ω
            let omega = poly_ext
                .terms()
                .get(&((q + 1) as u32, 0, 0))
                .cloned()
                .ok_or(HermError::WrongModel)?;
            let l = poly::LinearizedMap::from_additive(
                ext,
                &[(ext.one(), t), (ext.from_int(-1), 0)],
            );
            AffKind::Linear {
                pre: l.presolve(),
                scale: -omega,
                e: q + 1,
            }
        }
        ModelId::M3 => {
            // y = u·x with u^q - u = -ω x^{-(q+1)}
            let omega = poly_ext
                .terms()
                .get(&(0, 0, (q + 1) as u32))
                .cloned()
                .ok_or(HermError::WrongModel)?;
            let l = poly::LinearizedMap::from_additive(
                ext,
                &[(ext.one(), t), (ext.from_int(-1), 0)],
            );
            AffKind::LinearInv {
                pre: l.presolve(),
                scale: -omega,
                e: q + 1,
            }
        }
        ModelId::M4 => {
            // columns of y ↦ x·y^q are x·(basis^q)
            let tgen = ext.gen();
            let mut fq_cols = Vec::with_capacity(ext.k());
            let mut b = ext.one();
            for _ in 0..ext.k() {
                fq_cols.push(b.pow(q as u128));
                b = &b * &tgen;
            }
            AffKind::TwistPerX { fq_cols }
        }
        ModelId::M1 => {
            ext.log_table();
            AffKind::NormEq
        }
        ModelId::Quotient { .. } => {
            if card > GENERIC_CAP {
                return Err(HermError::CapExceeded {
                    card,
                    cap: GENERIC_CAP,
                });
            }
            AffKind::Generic {
                poly: poly_ext.clone(),
            }
        }
    };

    let jobs = if jobs == 0 {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
            .min(8)
    } else {
        jobs
    };
    let chunk = card.div_ceil(jobs as u64).max(1);
    let mut parts: Vec<Vec<(u64, u64)>> = Vec::new();
    std::thread::scope(|s| {
        let kind = &kind;
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                let lo = chunk * j as u64;
                let hi = (lo + chunk).min(card);
                s.spawn(move || affine_chunk(kind, ext, q, lo, hi))
            })
            .collect();
        for h in handles {
            parts.push(h.join().expect("enumeration worker panicked"));
        }
    });
    let affine: Vec<(u64, u64)> = parts.into_iter().flatten().collect();

    let mut infinity = Vec::new();
    if !matches!(c.id, ModelId::Quotient { .. }) && c.poly.homogeneous_degree().is_some() {
        let o = ext.zero();
        let i = ext.one();
        if poly_ext.eval(&[o.clone(), i.clone(), o.clone()]).is_zero() {
            infinity.push(ProjPoint::new(ext, [o.clone(), i.clone(), o.clone()])?);
        }
        // points (1 : y : 0)
        let mut coeffs: Vec<Element> = Vec::new();
        for (&(_, j, k), cf) in poly_ext.terms() {
            if k != 0 {
                continue;
            }
            if coeffs.len() <= j as usize {
                coeffs.resize(j as usize + 1, ext.zero());
            }
            coeffs[j as usize] = &coeffs[j as usize] + cf;
        }
        let f = UniPoly::new(ext, coeffs);
        if !f.is_zero() {
            for r in f.roots()? {
                infinity.push(ProjPoint::new(ext, [i.clone(), r, o.clone()])?);
            }
        }
    }
    Ok(PointSet {
        ext: ext.clone(),
        affine,
        infinity,
    })
}

fn code_of(coeffs: &[u64], p: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn affine_chunk(kind: &AffKind, ext: &FieldCtx, q: u64, lo: u64, hi: u64) -> Vec<(u64, u64)> {
    let p = ext.p();
    let mut out = Vec::new();
    let mut ys: Vec<u64> = Vec::new();
    for xc in lo..hi {
        let x = ext.from_code(xc);
        ys.clear();
        match kind {
            AffKind::Linear { pre, scale, e } => {
                let rhs = scale * &x.pow(*e as u128);
                for sol in pre.all_solutions(rhs.coeffs()) {
                    ys.push(code_of(&sol, p));
                }
            }
            AffKind::LinearInv { pre, scale, e } => {
                if x.is_zero() {
                    continue;
                }
                let rhs = scale * &x.pow(*e as u128).inv();
                for sol in pre.all_solutions(rhs.coeffs()) {
                    let u = ext.from_coeffs(&sol);
                    ys.push((&u * &x).code());
                }
            }
            AffKind::TwistPerX { fq_cols } => {
                let k = ext.k();
                let mut mat: Vec<Vec<u64>> = vec![vec![0; k]; k];
                for (j, f) in fq_cols.iter().enumerate() {
                    let col = &x * f;
                    for (i, row) in mat.iter_mut().enumerate() {
                        row[j] = col.coeffs()[i];
                    }
                    mat[j][j] = (mat[j][j] + 1) % p;
                }
                let rhs = -x.pow(q as u128);
                if let Some((part, kernel)) = gf::fp_solve(&mat, rhs.coeffs(), p) {
                    push_affine_combos(&part, &kernel, p, &mut ys);
                }
            }
            AffKind::NormEq => {
                let table = ext.log_table();
                let n = ext.cardinality() - 1;
                let g = gcd(q + 1, n);
                let c = -&(&ext.one() + &x.pow((q + 1) as u128));
                if c.is_zero() {
                    ys.push(0);
                } else {
                    let lc = table.log[c.code() as usize] as u64;
                    if lc % g == 0 {
                        let m = n / g;
                        let inv_h = mod_inv((q + 1) / g % m, m);
                        let base = lc / g % m * inv_h % m;
                        for j in 0..g {
                            ys.push(table.pow[(base + j * m) as usize] as u64);
                        }
                    }
                }
            }
            AffKind::Generic { poly } => {
                let one = ext.one();
                for yc in 0..ext.cardinality() {
                    let y = ext.from_code(yc);
                    if poly.eval(&[x.clone(), y, one.clone()]).is_zero() {
                        ys.push(yc);
                    }
                }
            }
        }
        ys.sort_unstable();
        out.extend(ys.iter().map(|&y| (xc, y)));
    }
    out
}

fn push_affine_combos(part: &[u64], kernel: &[Vec<u64>], p: u64, out: &mut Vec<u64>) {
    let k = part.len();
    let dim = kernel.len();
    let mut combo = vec![0u64; dim];
    loop {
        let mut v = part.to_vec();
        for (ci, kv) in combo.iter().zip(kernel) {
            for j in 0..k {
                v[j] = (v[j] + ci * kv[j]) % p;
            }
        }
        out.push(code_of(&v, p));
        let mut i = dim;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            combo[i] += 1;
            if combo[i] < p {
                break;
            }
            combo[i] = 0;
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn mod_inv(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    old_s.rem_euclid(m as i128) as u64
}

/// Generic double-loop enumeration with the tight cap, for cross-checking the
/// fast paths.
pub fn enumerate_points_generic(c: &PlaneModel, ext: &FieldCtx) -> Result<PointSet, HermError> {
    let base = c.poly.ctx();
    if ext.p() != base.p() || ext.k() % base.k() != 0 {
        return Err(HermError::IncompatibleField);
    }
    let card = ext.cardinality();
    if card > GENERIC_CAP {
        return Err(HermError::CapExceeded {
            card,
            cap: GENERIC_CAP,
        });
    }
    let generic = PlaneModel {
        id: ModelId::Quotient {
            case: "scan".into(),
            q: c.q,
            d: 1,
        },
        q: c.q,
        poly: c.poly.clone(),
        genus: c.genus,
        notes: String::new(),
    };
    let mut set = enumerate_points_with(&generic, ext, GENERIC_CAP, 1)?;
    // Re-attach the infinity points the generic chart skips.
    if c.poly.homogeneous_degree().is_some() {
        let poly_ext = c.poly.rebase(ext)?;
        let o = ext.zero();
        let i = ext.one();
        if poly_ext.eval(&[o.clone(), i.clone(), o.clone()]).is_zero() {
            set.infinity.push(ProjPoint::new(ext, [o.clone(), i.clone(), o.clone()])?);
        }
        for yc in 0..card {
            let y = ext.from_code(yc);
            if poly_ext.eval(&[i.clone(), y.clone(), o.clone()]).is_zero() {
                set.infinity.push(ProjPoint::new(ext, [i.clone(), y, o.clone()])?);
            }
        }
    }
    Ok(set)
}

/// Elements of the subfield of index `sub_k` (those fixed by the `sub_k`-th
/// Frobenius power), in the fixed element order.
pub fn subfield_elements(ctx: &FieldCtx, sub_k: usize) -> Vec<Element> {
    assert!(ctx.k() % sub_k == 0, "subfield degree must divide k");
    ctx.elements_lex()
        .filter(|x| &x.frobenius(sub_k) == x)
        .collect()
}

/// The q+1 points of model M3 on the line Z = 0: (0:1:0) and (1:m:0) for
/// m ∈ 𝔽_q.
pub fn infinity_section(c: &PlaneModel, q: u64) -> Result<Vec<ProjPoint>, HermError> {
    if c.id != ModelId::M3 || c.q != q {
        return Err(HermError::WrongModel);
    }
    let (_, t) = prime_power(q).ok_or(HermError::InvalidQ(q))?;
    let ctx = c.poly.ctx();
    let o = ctx.zero();
    let i = ctx.one();
    let mut out = vec![ProjPoint::new(ctx, [o.clone(), i.clone(), o.clone()])?];
    for m in subfield_elements(ctx, t) {
        out.push(ProjPoint::new(ctx, [i.clone(), m, o.clone()])?);
    }
    Ok(out)
}

type Mat3 = [[Element; 3]; 3];

fn mat_from_gram(c: &PlaneModel) -> Result<Mat3, HermError> {
    let ctx = c.poly.ctx();
    let q = c.q as u32;
    let mut h: Mat3 = std::array::from_fn(|_| std::array::from_fn(|_| ctx.zero()));
    for (&(i, j, k), cf) in c.poly.terms() {
        let exps = [i, j, k];
        if let Some(d) = (0..3).find(|&d| exps[d] == q + 1 && exps.iter().sum::<u32>() == q + 1) {
            h[d][d] = cf.clone();
            continue;
        }
        let a = (0..3).find(|&d| exps[d] == 1);
        let b = (0..3).find(|&d| exps[d] == q);
        match (a, b) {
            (Some(a), Some(b)) if a != b && exps[3 - a - b] == 0 => h[a][b] = cf.clone(),
            _ => return Err(HermError::NoEquivalence),
        }
    }
    Ok(h)
}

fn conj(x: &Element, q: u64) -> Element {
    x.pow(q as u128)
}

/// ⟨u, v⟩ = Σ K[i][j] uᵢ vⱼ^q.
fn inner(k: &Mat3, u: &[Element; 3], v: &[Element; 3], q: u64, ctx: &FieldCtx) -> Element {
    let mut acc = ctx.zero();
    for i in 0..3 {
        for j in 0..3 {
            if !k[i][j].is_zero() {
                acc = &acc + &(&(&k[i][j] * &u[i]) * &conj(&v[j], q));
            }
        }
    }
    acc
}

/// Columns P with Pᵀ K P̄ = I for a nondegenerate hermitian K.
fn orthonormal_basis(k: &Mat3, q: u64, ctx: &FieldCtx) -> Result<Vec<[Element; 3]>, HermError> {
    let mut pool: Vec<[Element; 3]> = (0..3)
        .map(|i| std::array::from_fn(|j| if i == j { ctx.one() } else { ctx.zero() }))
        .collect();
    let mut ortho: Vec<[Element; 3]> = Vec::new();
    while let Some(mut v) = pool.first().cloned() {
        pool.remove(0);
        if inner(k, &v, &v, q, ctx).is_zero() {
            // Mix in another pool vector to escape the isotropic cone.
            let mut fixed = false;
            'outer: for w in &pool {
                for c in ctx.elements_lex() {
                    let cand: [Element; 3] = std::array::from_fn(|i| &v[i] + &(&c * &w[i]));
                    if !inner(k, &cand, &cand, q, ctx).is_zero() {
                        v = cand;
                        fixed = true;
                        break 'outer;
                    }
                }
            }
            if !fixed {
                return Err(HermError::NoEquivalence);
            }
        }
        let norm = inner(k, &v, &v, q, ctx);
        let lambda = norm_root(&norm.inv(), q, ctx)?;
        let u: [Element; 3] = std::array::from_fn(|i| &lambda * &v[i]);
        for w in pool.iter_mut() {
            let proj = inner(k, w, &u, q, ctx);
            *w = std::array::from_fn(|i| &w[i] - &(&proj * &u[i]));
        }
        ortho.push(u);
    }
    Ok(ortho)
}

/// λ with λ^{q+1} = a, for a in the norm-one-compatible subfield 𝔽_q*.
fn norm_root(a: &Element, q: u64, ctx: &FieldCtx) -> Result<Element, HermError> {
    let table = ctx.log_table();
    let l = table.log[a.code() as usize] as u64;
    if l % (q + 1) != 0 {
        return Err(HermError::NoEquivalence);
    }
    Ok(ctx.from_code(table.pow[(l / (q + 1)) as usize] as u64))
}

fn mat_mul(a: &Mat3, b: &Mat3, ctx: &FieldCtx) -> Mat3 {
    std::array::from_fn(|r| {
        std::array::from_fn(|c| {
            let mut acc = ctx.zero();
            for l in 0..3 {
                acc = &acc + &(&a[r][l] * &b[l][c]);
            }
            acc
        })
    })
}

fn mat_inv(m: &Mat3) -> Result<Mat3, HermError> {
    let det = poly::det3(m);
    if det.is_zero() {
        return Err(HermError::NoEquivalence);
    }
    let dinv = det.inv();
    let cof = |r: usize, c: usize| {
        let rs: Vec<usize> = (0..3).filter(|&i| i != r).collect();
        let cs: Vec<usize> = (0..3).filter(|&i| i != c).collect();
        let minor = &(&m[rs[0]][cs[0]] * &m[rs[1]][cs[1]]) - &(&m[rs[0]][cs[1]] * &m[rs[1]][cs[0]]);
        if (r + c) % 2 == 0 {
            minor
        } else {
            -minor
        }
    };
    Ok(std::array::from_fn(|r| {
        std::array::from_fn(|c| &cof(c, r) * &dinv)
    }))
}

/// A matrix M with poly_a(M·X) proportional to poly_b, i.e. an explicit
/// projective equivalence carrying model `a` onto model `b`. Works for the
/// (skew-)hermitian models EQ11, M1, M2, M3 over the same 𝔽_{q²}.
pub fn equivalence_matrix(a: &PlaneModel, b: &PlaneModel) -> Result<Mat3, HermError> {
    if a.q != b.q || a.poly.ctx() != b.poly.ctx() {
        return Err(HermError::IncompatibleField);
    }
    let q = a.q;
    let ctx = a.poly.ctx();
    let basis_for = |m: &PlaneModel| -> Result<Vec<[Element; 3]>, HermError> {
        let h = mat_from_gram(m)?;
        // Classify as hermitian (K* = K) directly or after a trace-zero twist.
        let is_herm = |k: &Mat3| {
            (0..3).all(|i| (0..3).all(|j| k[j][i] == conj(&k[i][j], q)))
        };
        let k = if is_herm(&h) {
            h
        } else {
            let delta = gf::solve_unit_condition(ctx, UnitCondition::QMinus1IsNegOne)?;
            let dinv = delta.inv();
            let tw: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| &dinv * &h[i][j]));
            if !is_herm(&tw) {
                return Err(HermError::NoEquivalence);
            }
            tw
        };
        orthonormal_basis(&k, q, ctx)
    };
    let pa = basis_for(a)?;
    let pb = basis_for(b)?;
    let cols_to_mat = |cols: &[[Element; 3]]| -> Mat3 {
        std::array::from_fn(|r| std::array::from_fn(|c| cols[c][r].clone()))
    };
    let m = mat_mul(&cols_to_mat(&pa), &mat_inv(&cols_to_mat(&pb))?, ctx);
    let image = poly::substitute_map(&a.poly, &m)?;
    if !image.proportional_to(&b.poly) {
        return Err(HermError::NoEquivalence);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    #[test]
    fn model_polynomials() {
        let m = model(ModelId::EQ11, 3).unwrap();
        let f9 = make_field(3, 2).unwrap();
        let expect = TriPoly::from_terms(
            &f9,
            vec![
                ((0, 3, 1), f9.one()),
                ((0, 1, 3), f9.one()),
                ((4, 0, 0), f9.from_int(-1)),
            ],
        );
        assert_eq!(m.poly, expect);
        assert_eq!(m.genus, 3);
        let m4 = model(ModelId::M4, 2).unwrap();
        let f4 = make_field(2, 2).unwrap();
        let expect4 = TriPoly::from_terms(
            &f4,
            vec![
                ((1, 2, 0), f4.one()),
                ((0, 1, 2), f4.one()),
                ((2, 0, 1), f4.one()),
            ],
        );
        assert_eq!(m4.poly, expect4);
        assert!(matches!(model(ModelId::M1, 6), Err(HermError::InvalidQ(6))));
    }

    #[test]
    fn on_curve_examples() {
        let eq11 = model(ModelId::EQ11, 3).unwrap();
        let f9 = make_field(3, 2).unwrap();
        let q_pt = ProjPoint::from_ints(&f9, [0, 1, 0]).unwrap();
        assert!(on_curve(&eq11, &q_pt).unwrap());
        let m3 = model(ModelId::M3, 3).unwrap();
        let p0 = ProjPoint::from_ints(&f9, [0, 0, 1]).unwrap();
        assert!(!on_curve(&m3, &p0).unwrap());
        // (1 : t : 0) on M1 over F9: 1 + t^4 = 2 there, not a point.
        let m1 = model(ModelId::M1, 3).unwrap();
        let p = ProjPoint::new(&f9, [f9.one(), f9.gen(), f9.zero()]).unwrap();
        let t4 = f9.gen().pow(4);
        assert_eq!(on_curve(&m1, &p).unwrap(), (&f9.one() + &t4).is_zero());
    }

    #[test]
    fn point_counts_baseline() {
        // #H(F_{q^2}) = q^3 + 1 across models EQ11/M1/M2/M3.
        for q in [2u64, 3, 4, 5, 7, 8] {
            let (p, t) = prime_power(q).unwrap();
            let ext = make_field(p, 2 * t).unwrap();
            for id in [ModelId::EQ11, ModelId::M1, ModelId::M2, ModelId::M3] {
                let c = model(id.clone(), q).unwrap();
                let pts = enumerate_points(&c, &ext).unwrap();
                assert_eq!(pts.len() as u64, q * q * q + 1, "{id:?} q={q}");
            }
        }
    }

    #[test]
    fn point_counts_extensions() {
        let eq11 = model(ModelId::EQ11, 3).unwrap();
        let f36 = make_field(3, 6).unwrap();
        // m = 3: q^6 + 1 - 2g(-q)^3 = 729 + 1 + 162.
        assert_eq!(enumerate_points(&eq11, &f36).unwrap().len(), 892);
        let m1 = model(ModelId::M1, 2).unwrap();
        let f4 = make_field(2, 2).unwrap();
        assert_eq!(enumerate_points(&m1, &f4).unwrap().len(), 9);
    }

    #[test]
    fn m4_matches_m1_over_deg6() {
        for q in [2u64, 3] {
            let (p, t) = prime_power(q).unwrap();
            let ext = make_field(p, 6 * t).unwrap();
            let m1 = model(ModelId::M1, q).unwrap();
            let m4 = model(ModelId::M4, q).unwrap();
            let n1 = enumerate_points(&m1, &ext).unwrap().len();
            let n4 = enumerate_points(&m4, &ext).unwrap().len();
            assert_eq!(n1, n4, "q={q}");
        }
    }

    #[test]
    fn fast_path_matches_generic() {
        for q in [2u64, 3] {
            let (p, t) = prime_power(q).unwrap();
            for ext_k in [2 * t, 4 * t] {
                let ext = make_field(p, ext_k).unwrap();
                if ext.cardinality() > GENERIC_CAP {
                    continue;
                }
                for id in [ModelId::EQ11, ModelId::M1, ModelId::M2, ModelId::M3, ModelId::M4] {
                    let c = model(id.clone(), q).unwrap();
                    let fast = enumerate_points(&c, &ext).unwrap();
                    let slow = enumerate_points_generic(&c, &ext).unwrap();
                    assert_eq!(fast.affine(), slow.affine(), "{id:?} q={q} k={ext_k}");
                    let mut fi = fast.infinity().to_vec();
                    let mut si = slow.infinity().to_vec();
                    fi.sort();
                    si.sort();
                    assert_eq!(fi, si, "{id:?} q={q} k={ext_k}");
                }
            }
        }
    }

    #[test]
    fn sample_points_lie_on_curve() {
        let c = model(ModelId::M3, 5).unwrap();
        let f25 = make_field(5, 2).unwrap();
        let pts = enumerate_points(&c, &f25).unwrap();
        for pt in pts.points().iter().step_by(7) {
            assert!(on_curve(&c, pt).unwrap());
        }
    }

    #[test]
    fn infinity_section_examples() {
        for (q, expect) in [(3u64, 4usize), (5, 6)] {
            let c = model(ModelId::M3, q).unwrap();
            let sect = infinity_section(&c, q).unwrap();
            assert_eq!(sect.len(), expect);
            for pt in &sect {
                assert!(on_curve(&c, pt).unwrap());
                assert!(pt.coords()[2].is_zero());
            }
        }
        let m1 = model(ModelId::M1, 3).unwrap();
        assert!(infinity_section(&m1, 3).is_err());
    }

    #[test]
    fn model_equivalences() {
        for q in [3u64, 4, 5] {
            let models: Vec<PlaneModel> = [ModelId::EQ11, ModelId::M1, ModelId::M2, ModelId::M3]
                .into_iter()
                .map(|id| model(id, q).unwrap())
                .collect();
            for a in &models {
                for b in &models {
                    let m = equivalence_matrix(a, b).unwrap();
                    let image = poly::substitute_map(&a.poly, &m).unwrap();
                    assert!(image.proportional_to(&b.poly), "{:?}->{:?} q={q}", a.id, b.id);
                }
            }
        }
    }

    #[test]
    fn normalization_is_canonical() {
        let f9 = make_field(3, 2).unwrap();
        let t = f9.gen();
        let p1 = ProjPoint::new(&f9, [t.clone(), f9.one(), f9.from_int(2)]).unwrap();
        let scaled = ProjPoint::new(
            &f9,
            [&t * &t, t.clone(), &f9.from_int(2) * &t],
        )
        .unwrap();
        assert_eq!(p1, scaled);
        assert!(p1.coords()[0].is_one());
        assert!(ProjPoint::new(&f9, [f9.zero(), f9.zero(), f9.zero()]).is_err());
    }
}
