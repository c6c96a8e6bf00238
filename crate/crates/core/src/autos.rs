//! Projective automorphisms of the Hermitian models: prime-order generators,
//! the SL(2,𝔽_q) stabilizer of a point-line flag, normalizers of Singer
//! subgroups, subgroup closure, and fixed-point computation.

use crate::gf::{self, Element, FieldCtx, GfError, UnitCondition};
use crate::hermitian::{self, HermError, ModelId, PlaneModel, ProjPoint};
use crate::poly::{self, PolyError, UniPoly};
use std::collections::BTreeSet;
use thiserror::Error;

/// Default cap on subgroup closure size.
pub const CLOSURE_CAP: usize = 10080;

#[derive(Debug, Error)]
pub enum AutosError {
    #[error("condition violated: {0}")]
    BadCondition(String),
    #[error("not covered by the implemented classification")]
    NotCovered,
    #[error("closure exceeded cap {cap}")]
    CapExceeded { cap: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("entries must lie in the base subfield")]
    NotInSubfield,
    #[error("determinant must be 1")]
    DetNotOne,
    #[error("identity map fixes everything")]
    IdentityMap,
    #[error("characteristic polynomial does not split in the given field")]
    ExtTooSmall,
    #[error("operands live over different fields")]
    MixedContexts,
    #[error("subgroup search exhausted without a match")]
    SearchExhausted,
    #[error("field error: {0}")]
    Field(#[from] GfError),
    #[error("curve error: {0}")]
    Herm(#[from] HermError),
    #[error("polynomial error: {0}")]
    Poly(#[from] PolyError),
}

type Mat3 = [[Element; 3]; 3];

/// Invertible projective transformation, normalized so the first nonzero
/// entry in row-major order equals 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjMap {
    ctx: FieldCtx,
    m: Mat3,
}

impl ProjMap {
    pub fn new(ctx: &FieldCtx, m: Mat3) -> Result<ProjMap, AutosError> {
        if poly::det3(&m).is_zero() {
            return Err(AutosError::Singular);
        }
        let lead = m
            .iter()
            .flatten()
            .find(|e| !e.is_zero())
            .expect("nonsingular matrix has a nonzero entry")
            .clone();
        let inv = lead.inv();
        Ok(ProjMap {
            ctx: ctx.clone(),
            m: std::array::from_fn(|r| std::array::from_fn(|c| &m[r][c] * &inv)),
        })
    }

    pub fn from_ints(ctx: &FieldCtx, m: [[i64; 3]; 3]) -> Result<ProjMap, AutosError> {
        ProjMap::new(ctx, m.map(|row| row.map(|v| ctx.from_int(v))))
    }

    pub fn identity(ctx: &FieldCtx) -> ProjMap {
        ProjMap::from_ints(ctx, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]).expect("identity")
    }

    pub fn diag(ctx: &FieldCtx, d: [Element; 3]) -> Result<ProjMap, AutosError> {
        let o = ctx.zero();
        let [a, b, c] = d;
        ProjMap::new(
            ctx,
            [
                [a, o.clone(), o.clone()],
                [o.clone(), b, o.clone()],
                [o.clone(), o.clone(), c],
            ],
        )
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }
    pub fn is_identity(&self) -> bool {
        self == &ProjMap::identity(&self.ctx)
    }

    pub fn compose(&self, other: &ProjMap) -> ProjMap {
        assert!(self.ctx == other.ctx, "composition across fields");
        let m: Mat3 = std::array::from_fn(|r| {
            std::array::from_fn(|c| {
                let mut acc = self.ctx.zero();
                for l in 0..3 {
                    acc = &acc + &(&self.m[r][l] * &other.m[l][c]);
                }
                acc
            })
        });
        ProjMap::new(&self.ctx, m).expect("product of invertibles is invertible")
    }

    pub fn inverse(&self) -> ProjMap {
        let det = poly::det3(&self.m);
        let dinv = det.inv();
        let cof = |r: usize, c: usize| {
            let rs: Vec<usize> = (0..3).filter(|&i| i != r).collect();
            let cs: Vec<usize> = (0..3).filter(|&i| i != c).collect();
            let minor = &(&self.m[rs[0]][cs[0]] * &self.m[rs[1]][cs[1]])
                - &(&self.m[rs[0]][cs[1]] * &self.m[rs[1]][cs[0]]);
            if (r + c) % 2 == 0 {
                minor
            } else {
                -minor
            }
        };
        let m: Mat3 = std::array::from_fn(|r| std::array::from_fn(|c| &cof(c, r) * &dinv));
        ProjMap::new(&self.ctx, m).expect("inverse is invertible")
    }

    pub fn apply(&self, p: &ProjPoint) -> Result<ProjPoint, AutosError> {
        if p.ctx() != &self.ctx {
            return Err(AutosError::MixedContexts);
        }
        let coords: [Element; 3] = std::array::from_fn(|r| {
            let mut acc = self.ctx.zero();
            for c in 0..3 {
                acc = &acc + &(&self.m[r][c] * &p.coords()[c]);
            }
            acc
        });
        Ok(ProjPoint::new(&self.ctx, coords)?)
    }

    /// Order as a projective transformation.
    pub fn order(&self) -> u64 {
        let mut cur = self.clone();
        let id = ProjMap::identity(&self.ctx);
        let mut n = 1;
        while cur != id {
            cur = cur.compose(self);
            n += 1;
            assert!(n < 1 << 20, "runaway order computation");
        }
        n
    }

    /// Coefficient-wise embedding into an extension field.
    pub fn rebase(&self, target: &FieldCtx) -> Result<ProjMap, AutosError> {
        if &self.ctx == target {
            return Ok(self.clone());
        }
        let emb = gf::embedding(&self.ctx, target)?;
        let m: Mat3 = std::array::from_fn(|r| std::array::from_fn(|c| emb.embed(&self.m[r][c])));
        Ok(ProjMap::new(target, m)?)
    }
}

impl std::hash::Hash for ProjMap {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.m.hash(state);
    }
}
impl PartialOrd for ProjMap {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ProjMap {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.m.cmp(&other.m)
    }
}

/// A finite group of projective maps with a fixed, deterministic element
/// order.
#[derive(Clone, Debug)]
pub struct Subgroup {
    elements: Vec<ProjMap>,
    generators: Vec<ProjMap>,
    order: usize,
    label: Option<String>,
}

impl Subgroup {
    pub fn elements(&self) -> &[ProjMap] {
        &self.elements
    }
    pub fn generators(&self) -> &[ProjMap] {
        &self.generators
    }
    pub fn order(&self) -> usize {
        self.order
    }
    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }
    pub fn ctx(&self) -> &FieldCtx {
        self.elements[0].ctx()
    }
    pub fn contains(&self, m: &ProjMap) -> bool {
        self.elements.binary_search(m).is_ok()
    }
    pub fn with_label(mut self, label: &str) -> Subgroup {
        self.label = Some(label.to_string());
        self
    }
    /// True when the group order is prime to the field characteristic.
    pub fn is_tame(&self) -> bool {
        self.order as u64 % self.ctx().p() != 0
    }
    /// Coefficient-wise embedding of every element into an extension field.
    pub fn rebase(&self, target: &FieldCtx) -> Result<Subgroup, AutosError> {
        let elements: Vec<ProjMap> = self
            .elements
            .iter()
            .map(|e| e.rebase(target))
            .collect::<Result<_, _>>()?;
        let generators: Vec<ProjMap> = self
            .generators
            .iter()
            .map(|e| e.rebase(target))
            .collect::<Result<_, _>>()?;
        let mut elements = elements;
        elements.sort();
        Ok(Subgroup {
            elements,
            generators,
            order: self.order,
            label: self.label.clone(),
        })
    }
}

/// Deterministic closure of a generating set.
pub fn closure(gens: &[ProjMap], cap: usize) -> Result<Subgroup, AutosError> {
    assert!(!gens.is_empty(), "closure needs at least one generator");
    let ctx = gens[0].ctx().clone();
    if gens.iter().any(|g| g.ctx() != &ctx) {
        return Err(AutosError::MixedContexts);
    }
    let mut set = BTreeSet::new();
    let mut queue = vec![ProjMap::identity(&ctx)];
    set.insert(queue[0].clone());
    while let Some(e) = queue.pop() {
        for g in gens {
            let n = e.compose(g);
            if set.insert(n.clone()) {
                if set.len() > cap {
                    return Err(AutosError::CapExceeded { cap });
                }
                queue.push(n);
            }
        }
    }
    let elements: Vec<ProjMap> = set.into_iter().collect();
    let order = elements.len();
    Ok(Subgroup {
        elements,
        generators: gens.to_vec(),
        order,
        label: None,
    })
}

/// Case identifiers for the prime-order quotient classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    I,
    II1,
    II2,
    III,
    IV1,
    IV2,
    V,
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseId::I => "I",
            CaseId::II1 => "II1",
            CaseId::II2 => "II2",
            CaseId::III => "III",
            CaseId::IV1 => "IV1",
            CaseId::IV2 => "IV2",
            CaseId::V => "V",
        };
        write!(f, "{s}")
    }
}

/// The standard order-d generator for each case, together with the model it
/// acts on.
#[allow(non_snake_case)]
pub fn generator_T(case: CaseId, q: u64, d: u64) -> Result<(ProjMap, PlaneModel), AutosError> {
    let (p, t) = hermitian::prime_power(q)
        .ok_or_else(|| AutosError::BadCondition(format!("q = {q} is not a prime power")))?;
    let bad = |msg: &str| AutosError::BadCondition(format!("case {case}: {msg}"));
    let map_model = match case {
        CaseId::I => {
            if d != 2 || p == 2 {
                return Err(bad("requires d = 2 and odd characteristic"));
            }
            let c = hermitian::model(ModelId::EQ11, q)?;
            let ctx = c.poly.ctx().clone();
            let m = ProjMap::from_ints(&ctx, [[-1, 0, 0], [0, 1, 0], [0, 0, 1]])?;
            (m, c)
        }
        CaseId::II1 => {
            if d != p {
                return Err(bad("requires d = p"));
            }
            let c = hermitian::model(ModelId::M2, q)?;
            let ctx = c.poly.ctx().clone();
            let m = ProjMap::from_ints(&ctx, [[1, 0, 0], [0, 1, 1], [0, 0, 1]])?;
            (m, c)
        }
        CaseId::II2 => {
            if d != p || p < 3 {
                return Err(bad("requires d = p with p >= 3"));
            }
            let c = hermitian::model(ModelId::EQ11, q)?;
            let ctx = c.poly.ctx().clone();
            let half = ctx.from_int(2).inv();
            let o = ctx.zero();
            let i = ctx.one();
            let m = ProjMap::new(
                &ctx,
                [
                    [i.clone(), o.clone(), i.clone()],
                    [i.clone(), i.clone(), half],
                    [o.clone(), o.clone(), i.clone()],
                ],
            )?;
            (m, c)
        }
        CaseId::III => {
            if d < 3 || (q - 1) % d != 0 {
                return Err(bad("requires d >= 3 with q = 1 (mod d)"));
            }
            let c = hermitian::model(ModelId::M3, q)?;
            let ctx = c.poly.ctx().clone();
            let alpha = gf::root_of_unity(&ctx, d)?;
            let m = ProjMap::diag(&ctx, [alpha.clone(), alpha.inv(), ctx.one()])?;
            (m, c)
        }
        CaseId::IV1 | CaseId::IV2 => {
            if d < 3 || (q + 1) % d != 0 {
                return Err(bad("requires d >= 3 with q = -1 (mod d)"));
            }
            let c = hermitian::model(ModelId::M1, q)?;
            let ctx = c.poly.ctx().clone();
            let alpha = gf::root_of_unity(&ctx, d)?;
            let second = if case == CaseId::IV1 {
                ctx.one()
            } else {
                alpha.inv()
            };
            let m = ProjMap::diag(&ctx, [alpha, second, ctx.one()])?;
            (m, c)
        }
        CaseId::V => {
            if d < 3 || (q * q - q + 1) % d != 0 {
                return Err(bad("requires d >= 3 dividing q^2 - q + 1"));
            }
            let c = hermitian::model(ModelId::M4, q)?;
            let ctx6 = gf::make_field(p, 6 * t)?;
            let alpha = gf::root_of_unity(&ctx6, d)?;
            let m = ProjMap::diag(&ctx6, [alpha.clone(), alpha.pow(q as u128), ctx6.one()])?;
            (m, c)
        }
    };
    Ok(map_model)
}

/// True iff substituting M into the defining polynomial returns a scalar
/// multiple of it.
pub fn preserves(c: &PlaneModel, m: &ProjMap) -> Result<bool, AutosError> {
    let f = c.poly.rebase(m.ctx())?;
    let image = poly::substitute_map(&f, m.matrix())?;
    Ok(image.proportional_to(&f))
}

/// An 𝔽_{q²}-rational Singer generator of projective order d | q² − q + 1,
/// acting on M1.
///
/// Multiplication by γ on 𝔽_{q⁶} ≅ 𝔽_{q²}³ (basis {1, w, w²} with w the
/// 𝔽_{q⁶} generator) is 𝔽_{q²}-linear and, when γ^{q³+1} = 1, preserves the
/// nondegenerate hermitian form Tr_{𝔽_{q⁶}/𝔽_{q²}}(x y^{q³}). Choosing
/// γ = ζ^{(q³−1)(q²−q+1)/d} for a primitive ζ gives projective order exactly
/// d: scalar matrices correspond to γ ∈ μ_{q+1}, and the class of γ in
/// μ_{q³+1}/μ_{q+1} has order d. The matrix is then conjugated onto M1
/// through the Gram matrix of the invariant form.
pub fn singer_rational(q: u64, d: u64) -> Result<(ProjMap, PlaneModel), AutosError> {
    let (p, t) = hermitian::prime_power(q)
        .ok_or_else(|| AutosError::BadCondition(format!("q = {q} is not a prime power")))?;
    if d < 3 || (q * q - q + 1) % d != 0 {
        return Err(AutosError::BadCondition(format!(
            "d = {d} must be >= 3 and divide q^2 - q + 1"
        )));
    }
    let fq2 = gf::make_field(p, 2 * t)?;
    let f6 = gf::make_field(p, 6 * t)?;
    let emb = gf::embedding(&fq2, &f6)?;
    let w = f6.gen();
    let tau = fq2.gen();

    let zeta = f6.primitive_element();
    let e = (q as u128 * q as u128 * q as u128 - 1) * ((q * q - q + 1) / d) as u128;
    let gamma = zeta.pow(e);

    // 𝔽_{q²}-coordinates in the basis {1, w, w²}: one 𝔽_p-linear system whose
    // columns are the 𝔽_p-coefficient vectors of w^i τ^m.
    let k2 = 2 * t;
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(6 * t);
    for i in 0..3u32 {
        let wi = w.pow(i as u128);
        for m in 0..k2 {
            cols.push((&wi * &emb.embed(&tau.pow(m as u128))).coeffs().to_vec());
        }
    }
    let mat: Vec<Vec<u64>> = (0..6 * t)
        .map(|r| cols.iter().map(|c| c[r]).collect())
        .collect();
    let coords = |z: &Element| -> Result<[Element; 3], AutosError> {
        let (sol, _) = gf::fp_solve(&mat, z.coeffs(), p).ok_or(AutosError::Singular)?;
        Ok(std::array::from_fn(|i| {
            let mut acc = fq2.zero();
            for m in 0..k2 {
                let c = sol[i * k2 + m];
                if c != 0 {
                    acc = &acc + &(&fq2.from_int(c as i64) * &tau.pow(m as u128));
                }
            }
            acc
        }))
    };

    // Columns of S are the coordinates of γ·w^j.
    let mut s: Mat3 = std::array::from_fn(|_| std::array::from_fn(|_| fq2.zero()));
    for (j, wj) in (0..3u32).map(|j| w.pow(j as u128)).enumerate() {
        let cj = coords(&(&gamma * &wj))?;
        for i in 0..3 {
            s[i][j] = cj[i].clone();
        }
    }
    let smap = ProjMap::new(&fq2, s)?;

    // Gram entries G[i][j] = Tr(b_i b_j^{q³}) give the invariant hermitian
    // plane model Σ G[i][j] X_i X_j^q.
    let qe = q as u32;
    let mut terms: Vec<((u32, u32, u32), Element)> = Vec::new();
    for i in 0..3usize {
        for j in 0..3usize {
            let z = &w.pow(i as u128) * &w.pow(j as u128).frobenius(3 * t);
            let g = gf::trace_to(&z, &fq2)?;
            let mut ex = [0u32; 3];
            if i == j {
                ex[i] = qe + 1;
            } else {
                ex[i] = 1;
                ex[j] = qe;
            }
            terms.push(((ex[0], ex[1], ex[2]), g));
        }
    }
    let gmodel = PlaneModel::quotient(
        "singer-gram",
        q,
        d,
        poly::TriPoly::from_terms(&fq2, terms),
        ((q * q - q + 1) / d - 1) / 2,
    );
    let m1 = hermitian::model(ModelId::M1, q)?;
    let em = ProjMap::new(&fq2, hermitian::equivalence_matrix(&gmodel, &m1)?)?;
    let s1 = em.inverse().compose(&smap).compose(&em);
    if s1.order() != d || !preserves(&m1, &s1)? {
        return Err(AutosError::SearchExhausted);
    }
    Ok((s1, m1))
}

/// Embeds an SL(2,𝔽_q) element as a projective map on M3 fixing the line
/// Z = 0. Entries must lie in the subfield 𝔽_q of 𝔽_{q²} and have ad−bc = 1.
pub fn sl2_embed(a: &Element, b: &Element, c: &Element, d: &Element) -> Result<ProjMap, AutosError> {
    let ctx = a.ctx().clone();
    if [b, c, d].iter().any(|e| e.ctx() != &ctx) {
        return Err(AutosError::MixedContexts);
    }
    if ctx.k() % 2 != 0 {
        return Err(AutosError::NotInSubfield);
    }
    let t = ctx.k() / 2;
    for e in [a, b, c, d] {
        if &e.frobenius(t) != e {
            return Err(AutosError::NotInSubfield);
        }
    }
    if !(&(a * d) - &(b * c)).is_one() {
        return Err(AutosError::DetNotOne);
    }
    let o = ctx.zero();
    let i = ctx.one();
    Ok(ProjMap::new(
        &ctx,
        [
            [a.clone(), b.clone(), o.clone()],
            [c.clone(), d.clone(), o.clone()],
            [o.clone(), o.clone(), i],
        ],
    )?)
}

/// Cyclic and normalizer subgroups attached to a Singer cycle, acting on M4
/// over 𝔽_{q⁶}: the cyclic C_n (i = None), or the order-3n extension by hᵢ.
pub fn singer_generators(q: u64, n: u64, i: Option<usize>) -> Result<Subgroup, AutosError> {
    let (p, t) = hermitian::prime_power(q)
        .ok_or_else(|| AutosError::BadCondition(format!("q = {q} is not a prime power")))?;
    let m = q * q - q + 1;
    if n == 0 || m % n != 0 {
        return Err(AutosError::BadCondition(format!(
            "n = {n} must divide q^2 - q + 1 = {m}"
        )));
    }
    let ctx6 = gf::make_field(p, 6 * t)?;
    let beta = gf::root_of_unity(&ctx6, n)?;
    let h_n = ProjMap::diag(&ctx6, [beta.clone(), beta.pow(q as u128), ctx6.one()])?;
    let Some(i) = i else {
        let g = closure(&[h_n], CLOSURE_CAP)?.with_label(&format!("C_{n}"));
        debug_assert_eq!(g.order() as u64, n);
        return Ok(g);
    };
    if i > 2 {
        return Err(AutosError::BadCondition("i must be 0, 1 or 2".into()));
    }
    match q % 3 {
        0 => return Err(AutosError::NotCovered),
        1 => {
            if i != 0 {
                return Err(AutosError::BadCondition(
                    "only h_0 applies when q = 1 (mod 3)".into(),
                ));
            }
        }
        _ => {
            if i != 0 && n % 3 == 0 {
                return Err(AutosError::BadCondition(
                    "only h_0 applies when 3 divides n".into(),
                ));
            }
        }
    }
    let eps = gf::root_of_unity(&ctx6, 3)?;
    let ei = eps.pow(i as u128);
    let e2i = eps.pow(2 * i as u128);
    let o = ctx6.zero();
    let h_i = ProjMap::new(
        &ctx6,
        [
            [o.clone(), ei, o.clone()],
            [o.clone(), o.clone(), e2i],
            [ctx6.one(), o.clone(), o.clone()],
        ],
    )?;
    let g = closure(&[h_n, h_i], CLOSURE_CAP)?.with_label(&format!("G{i} n={n}"));
    debug_assert_eq!(g.order() as u64, 3 * n);
    Ok(g)
}

/// Which maximal torus of SL(2,𝔽_q) a cyclic piece sits in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TorusKind {
    Split,
    Nonsplit,
}

impl std::fmt::Display for TorusKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TorusKind::Split => write!(f, "split"),
            TorusKind::Nonsplit => write!(f, "nonsplit"),
        }
    }
}

/// Isomorphism type of the image in PSL(2,𝔽_q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SL2Kind {
    C(u64, TorusKind),
    D(u64, TorusKind),
    Sym4,
    Alt4,
    Alt5,
}

impl std::fmt::Display for SL2Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SL2Kind::C(d, t) => write!(f, "C({d},{t})"),
            SL2Kind::D(d, t) => write!(f, "D({d},{t})"),
            SL2Kind::Sym4 => write!(f, "Sym4"),
            SL2Kind::Alt4 => write!(f, "Alt4"),
            SL2Kind::Alt5 => write!(f, "Alt5"),
        }
    }
}

/// The subgroup of Γ ≅ SL(2,𝔽_q) whose image in PSL(2,𝔽_q) is the requested
/// kind, embedded as projective maps on M3. Cyclic kinds use the smallest
/// lift (order d when d is odd); see
/// [`find_tame_sl2_subgroup_lift`] for the full preimage.
pub fn find_tame_sl2_subgroup(q: u64, kind: SL2Kind) -> Result<Subgroup, AutosError> {
    find_tame_sl2_subgroup_lift(q, kind, false)
}

/// `full = true` forces the full preimage under SL(2,𝔽_q) → PSL(2,𝔽_q)
/// (relevant for cyclic kinds of odd image order, where both the isomorphic
/// lift of order d and the preimage of order 2d exist).
pub fn find_tame_sl2_subgroup_lift(
    q: u64,
    kind: SL2Kind,
    full: bool,
) -> Result<Subgroup, AutosError> {
    let (p, t) = hermitian::prime_power(q)
        .ok_or_else(|| AutosError::BadCondition(format!("q = {q} is not a prime power")))?;
    let fq = gf::make_field(p, t)?;
    let fq2 = gf::make_field(p, 2 * t)?;
    let emb = gf::embedding(&fq, &fq2)?;
    let bad = |msg: String| AutosError::BadCondition(msg);

    // d-condition of the PSL classification for a cyclic piece of image
    // order d in the given torus.
    let torus_bound = |tk: TorusKind| match tk {
        TorusKind::Split => q - 1,
        TorusKind::Nonsplit => q + 1,
    };
    let check_cyclic = |d: u64, tk: TorusKind| -> Result<(), AutosError> {
        let b = torus_bound(tk);
        let ok = if p == 2 { b % d == 0 } else { (b / 2) % d == 0 };
        if d == 0 || !ok {
            return Err(bad(format!(
                "image order {d} not admissible in the {tk} torus for q = {q}"
            )));
        }
        Ok(())
    };

    let (gens2, expected, label): (Vec<[Element; 4]>, usize, String) = match kind {
        SL2Kind::C(d, tk) => {
            check_cyclic(d, tk)?;
            let lift = if p == 2 {
                d
            } else if d % 2 == 1 && !full {
                d
            } else {
                2 * d
            };
            let g = torus_generator(&fq, &fq2, &emb, q, tk, lift)?;
            (vec![g], lift as usize, format!("C({d},{tk})"))
        }
        SL2Kind::D(d, tk) => {
            if p == 2 {
                return Err(bad("dihedral kinds require odd characteristic".into()));
            }
            check_cyclic(d, tk)?;
            let g = torus_generator(&fq, &fq2, &emb, q, tk, 2 * d)?;
            let w = inverting_element(&fq, &fq2, &emb, tk)?;
            (vec![g, w], 4 * d as usize, format!("D({d},{tk})"))
        }
        SL2Kind::Sym4 => {
            if (q * q) % 16 != 1 || p < 5 {
                return Err(bad(format!("Sym4 needs q^2 = 1 (mod 16), p >= 5; q = {q}")));
            }
            let (x, y) = exceptional_pair(&fq, 48, 8, 6, 8)?;
            (vec![x, y], 48, "Sym4".into())
        }
        SL2Kind::Alt4 => {
            if p < 5 {
                return Err(bad(format!("Alt4 needs p >= 5; q = {q}")));
            }
            let (x, y) = exceptional_pair(&fq, 24, 4, 6, 6)?;
            (vec![x, y], 24, "Alt4".into())
        }
        SL2Kind::Alt5 => {
            if (q * q) % 5 != 1 || p < 7 {
                return Err(bad(format!("Alt5 needs q^2 = 1 (mod 5), p >= 7; q = {q}")));
            }
            let (x, y) = exceptional_pair(&fq, 120, 10, 6, 10)?;
            (vec![x, y], 120, "Alt5".into())
        }
    };

    let gens: Vec<ProjMap> = gens2
        .iter()
        .map(|g| {
            let e: Vec<Element> = g.iter().map(|x| emb.embed(x)).collect();
            sl2_embed(&e[0], &e[1], &e[2], &e[3])
        })
        .collect::<Result<_, _>>()?;
    let sub = closure(&gens, CLOSURE_CAP)?.with_label(&label);
    if sub.order() != expected {
        return Err(AutosError::SearchExhausted);
    }
    Ok(sub)
}

// ---- SL(2, F_q) internals; elements are [a, b, c, d] row-major over F_q ----

fn m2_mul(x: &[Element; 4], y: &[Element; 4]) -> [Element; 4] {
    [
        &(&x[0] * &y[0]) + &(&x[1] * &y[2]),
        &(&x[0] * &y[1]) + &(&x[1] * &y[3]),
        &(&x[2] * &y[0]) + &(&x[3] * &y[2]),
        &(&x[2] * &y[1]) + &(&x[3] * &y[3]),
    ]
}

fn m2_is_id(x: &[Element; 4]) -> bool {
    x[0].is_one() && x[1].is_zero() && x[2].is_zero() && x[3].is_one()
}

fn m2_code(x: &[Element; 4], card: u64) -> u64 {
    x.iter().fold(0, |acc, e| acc * card + e.code())
}

fn m2_order(x: &[Element; 4], cap: u64) -> u64 {
    let mut cur = x.clone();
    let mut n = 1;
    while !m2_is_id(&cur) {
        cur = m2_mul(&cur, x);
        n += 1;
        if n > cap {
            return n;
        }
    }
    n
}

/// Decomposes z ∈ 𝔽_{q²} as a + b·s over 𝔽_q, where s is the field generator.
fn fq_coords(
    z: &Element,
    s: &Element,
    t: usize,
    emb: &gf::TowerEmbed,
) -> Result<(Element, Element), AutosError> {
    let zq = z.frobenius(t);
    let sq = s.frobenius(t);
    let b2 = &(z - &zq) * &(s - &sq).inv();
    let a2 = z - &(&b2 * s);
    let a = emb.section(&a2).ok_or(AutosError::NotInSubfield)?;
    let b = emb.section(&b2).ok_or(AutosError::NotInSubfield)?;
    Ok((a, b))
}

/// Order-m generator of a maximal torus of SL(2,𝔽_q): diagonal for the split
/// torus, multiplication by a norm-one unit of 𝔽_{q²} for the nonsplit one.
fn torus_generator(
    fq: &FieldCtx,
    fq2: &FieldCtx,
    emb: &gf::TowerEmbed,
    q: u64,
    tk: TorusKind,
    m: u64,
) -> Result<[Element; 4], AutosError> {
    match tk {
        TorusKind::Split => {
            if (q - 1) % m != 0 {
                return Err(AutosError::BadCondition(format!(
                    "lift order {m} does not divide q - 1"
                )));
            }
            let u = gf::root_of_unity(fq, m)?;
            Ok([u.clone(), fq.zero(), fq.zero(), u.inv()])
        }
        TorusKind::Nonsplit => {
            if (q + 1) % m != 0 {
                return Err(AutosError::BadCondition(format!(
                    "lift order {m} does not divide q + 1"
                )));
            }
            let t = fq.k();
            let gamma = gf::root_of_unity(fq2, m)?;
            let s = fq2.gen();
            let (a0, b0) = fq_coords(&gamma, &s, t, emb)?;
            let (a1, b1) = fq_coords(&(&gamma * &s), &s, t, emb)?;
            let g = [a0, a1, b0, b1];
            debug_assert!((&(&g[0] * &g[3]) - &(&g[1] * &g[2])).is_one());
            Ok(g)
        }
    }
}

/// An element w of SL(2,𝔽_q) with w τ w⁻¹ = τ⁻¹ for τ in the torus: the
/// standard symplectic involution lift for the split torus, μ·Frobenius with
/// μ^{q+1} = -1 for the nonsplit one.
fn inverting_element(
    fq: &FieldCtx,
    fq2: &FieldCtx,
    emb: &gf::TowerEmbed,
    tk: TorusKind,
) -> Result<[Element; 4], AutosError> {
    match tk {
        TorusKind::Split => Ok([fq.zero(), fq.one(), fq.from_int(-1), fq.zero()]),
        TorusKind::Nonsplit => {
            let t = fq.k();
            let mu = gf::solve_unit_condition(fq2, UnitCondition::QPlus1IsNegOne)?;
            let s = fq2.gen();
            let sq = s.frobenius(t);
            let (a0, b0) = fq_coords(&mu, &s, t, emb)?;
            let (a1, b1) = fq_coords(&(&mu * &sq), &s, t, emb)?;
            let w = [a0, a1, b0, b1];
            debug_assert!((&(&w[0] * &w[3]) - &(&w[1] * &w[2])).is_one());
            Ok(w)
        }
    }
}

/// Deterministic search for a pair of elements of orders (o1, o2) whose
/// closure has exactly `target` elements with maximal element order
/// `max_order`.
fn exceptional_pair(
    fq: &FieldCtx,
    target: usize,
    o1: u64,
    o2: u64,
    max_order: u64,
) -> Result<([Element; 4], [Element; 4]), AutosError> {
    let card = fq.cardinality();
    let all: Vec<Element> = fq.elements_lex().collect();
    let mut of_o1 = Vec::new();
    let mut of_o2 = Vec::new();
    let order_cap = 4 * (card + 1);
    for a in &all {
        for b in &all {
            for c in &all {
                for d in &all {
                    if !(&(a * d) - &(b * c)).is_one() {
                        continue;
                    }
                    let m = [a.clone(), b.clone(), c.clone(), d.clone()];
                    let o = m2_order(&m, order_cap);
                    if o == o1 {
                        of_o1.push(m.clone());
                    }
                    if o == o2 {
                        of_o2.push(m);
                    }
                }
            }
        }
    }
    for x in &of_o1 {
        for y in &of_o2 {
            if let Some(els) = m2_closure(x, y, target, card) {
                if els.iter().all(|e| m2_order(e, max_order + 1) <= max_order) {
                    return Ok((x.clone(), y.clone()));
                }
            }
        }
    }
    Err(AutosError::SearchExhausted)
}

fn m2_closure(
    x: &[Element; 4],
    y: &[Element; 4],
    target: usize,
    card: u64,
) -> Option<Vec<[Element; 4]>> {
    let ctx = x[0].ctx();
    let id = [ctx.one(), ctx.zero(), ctx.zero(), ctx.one()];
    let mut seen = BTreeSet::new();
    seen.insert(m2_code(&id, card));
    let mut els = vec![id];
    let mut queue = vec![0usize];
    while let Some(i) = queue.pop() {
        for g in [x, y] {
            let n = m2_mul(&els[i], g);
            if seen.insert(m2_code(&n, card)) {
                els.push(n);
                if els.len() > target {
                    return None;
                }
                queue.push(els.len() - 1);
            }
        }
    }
    if els.len() == target {
        Some(els)
    } else {
        None
    }
}

// ---- fixed points ----

fn upoly_mul(a: &[Element], b: &[Element], ctx: &FieldCtx) -> Vec<Element> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![ctx.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// All points of C over `ext` fixed by M, via eigenspace analysis of the
/// matrix.
pub fn fixed_points_on(
    c: &PlaneModel,
    m: &ProjMap,
    ext: &FieldCtx,
) -> Result<Vec<ProjPoint>, AutosError> {
    let m = m.rebase(ext)?;
    if m.is_identity() {
        return Err(AutosError::IdentityMap);
    }
    let poly_ext = c.poly.rebase(ext)?;
    let a = m.matrix();
    // characteristic polynomial x^3 - tr x^2 + c2 x - det
    let tr = &(&a[0][0] + &a[1][1]) + &a[2][2];
    let minor = |i: usize| {
        let rs: Vec<usize> = (0..3).filter(|&r| r != i).collect();
        &(&a[rs[0]][rs[0]] * &a[rs[1]][rs[1]]) - &(&a[rs[0]][rs[1]] * &a[rs[1]][rs[0]])
    };
    let c2 = &(&minor(0) + &minor(1)) + &minor(2);
    let det = poly::det3(a);
    let charpoly = UniPoly::new(ext, vec![-det, c2, -tr, ext.one()]);
    let roots = charpoly.roots()?;
    // The polynomial must split completely over ext.
    {
        let mut f: Vec<Element> = charpoly.coeffs().to_vec();
        for r in &roots {
            loop {
                let mut acc = ext.zero();
                for cf in f.iter().rev() {
                    acc = &(&acc * r) + cf;
                }
                if !acc.is_zero() || f.len() <= 1 {
                    break;
                }
                // synthetic division by (x - r)
                let mut quo = vec![ext.zero(); f.len() - 1];
                let mut carry = ext.zero();
                for i in (1..f.len()).rev() {
                    carry = &f[i] + &(&carry * r);
                    quo[i - 1] = carry.clone();
                }
                f = quo;
            }
        }
        if f.len() > 1 {
            return Err(AutosError::ExtTooSmall);
        }
    }

    let mut found: BTreeSet<ProjPoint> = BTreeSet::new();
    for lambda in &roots {
        // kernel of (A - λI)
        let shifted: Mat3 = std::array::from_fn(|r| {
            std::array::from_fn(|cidx| {
                if r == cidx {
                    &a[r][cidx] - lambda
                } else {
                    a[r][cidx].clone()
                }
            })
        });
        let basis = elem_kernel3(&shifted, ext);
        match basis.len() {
            0 => {}
            1 => {
                let pt = ProjPoint::new(ext, basis[0].clone())?;
                if poly_ext.eval(pt.coords()).is_zero() {
                    found.insert(pt);
                }
            }
            2 => {
                // fixed line {u + s·v} ∪ {v}: restrict the curve to it
                let u = &basis[0];
                let v = &basis[1];
                let vpt = ProjPoint::new(ext, v.clone())?;
                if poly_ext.eval(vpt.coords()).is_zero() {
                    found.insert(vpt);
                }
                let mut restricted = vec![ext.zero()];
                for (&(i, j, k), cf) in poly_ext.terms() {
                    let mut term = vec![cf.clone()];
                    for (var, e) in [(0usize, i), (1, j), (2, k)] {
                        let lin = vec![u[var].clone(), v[var].clone()];
                        for _ in 0..e {
                            term = upoly_mul(&term, &lin, ext);
                        }
                    }
                    if restricted.len() < term.len() {
                        restricted.resize(term.len(), ext.zero());
                    }
                    for (slot, tc) in term.iter().enumerate() {
                        restricted[slot] = &restricted[slot] + tc;
                    }
                }
                let f = UniPoly::new(ext, restricted);
                if f.is_zero() {
                    // entire line on the curve: every point is fixed
                    for s in ext.elements_lex() {
                        let coords: [Element; 3] =
                            std::array::from_fn(|ix| &u[ix] + &(&s * &v[ix]));
                        found.insert(ProjPoint::new(ext, coords)?);
                    }
                } else {
                    for s in f.roots()? {
                        let coords: [Element; 3] =
                            std::array::from_fn(|ix| &u[ix] + &(&s * &v[ix]));
                        found.insert(ProjPoint::new(ext, coords)?);
                    }
                }
            }
            _ => return Err(AutosError::IdentityMap),
        }
    }
    Ok(found.into_iter().collect())
}

/// Kernel basis of a 3x3 matrix over the field of its entries.
fn elem_kernel3(m: &Mat3, ctx: &FieldCtx) -> Vec<[Element; 3]> {
    let mut a: Vec<Vec<Element>> = m.iter().map(|r| r.to_vec()).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..3 {
        let Some(pr) = (row..3).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, pr);
        let inv = a[row][col].inv();
        for v in a[row].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..3 {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for cx in 0..3 {
                    a[r][cx] = &a[r][cx] - &(&f * &a[row][cx]);
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for free in 0..3 {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v: [Element; 3] = std::array::from_fn(|_| ctx.zero());
        v[free] = ctx.one();
        for &(r, cidx) in &pivots {
            v[cidx] = -a[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generator_orders_and_preservation() {
        let cases = [
            (CaseId::I, 5, 2),
            (CaseId::II1, 5, 5),
            (CaseId::II1, 4, 2),
            (CaseId::II2, 3, 3),
            (CaseId::III, 7, 3),
            (CaseId::IV1, 5, 3),
            (CaseId::IV2, 5, 3),
            (CaseId::V, 5, 3),
            (CaseId::V, 5, 7),
        ];
        for (case, q, d) in cases {
            let (t, model) = generator_T(case, q, d).unwrap();
            assert_eq!(t.order(), d, "case {case} q={q}");
            assert!(preserves(&model, &t).unwrap(), "case {case} q={q}");
        }
        assert!(generator_T(CaseId::I, 4, 2).is_err());
        assert!(generator_T(CaseId::III, 5, 3).is_err());
    }

    #[test]
    fn sl2_embed_examples() {
        let f25 = make_field(5, 2).unwrap();
        let one = f25.one();
        let zero = f25.zero();
        let id = sl2_embed(&one, &zero, &zero, &one).unwrap();
        assert!(id.is_identity());
        let w = sl2_embed(&zero, &one, &f25.from_int(-1), &zero).unwrap();
        assert_eq!(w.order(), 4);
        let kernel = sl2_embed(&f25.from_int(-1), &zero, &zero, &f25.from_int(-1)).unwrap();
        assert_eq!(kernel.order(), 2);
        // the kernel element fixes the infinity section pointwise
        let m3 = hermitian::model(ModelId::M3, 5).unwrap();
        for pt in hermitian::infinity_section(&m3, 5).unwrap() {
            assert_eq!(kernel.apply(&pt).unwrap(), pt);
        }
        // determinant and subfield violations rejected
        assert!(matches!(
            sl2_embed(&one, &zero, &zero, &f25.from_int(2)),
            Err(AutosError::DetNotOne)
        ));
        assert!(matches!(
            sl2_embed(&f25.gen(), &zero, &zero, &one),
            Err(AutosError::NotInSubfield) | Err(AutosError::DetNotOne)
        ));
    }

    #[test]
    fn sl2_preserves_m3_randomly() {
        let m3 = hermitian::model(ModelId::M3, 7).unwrap();
        let f49 = make_field(7, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let g = random_sl2(&f49, 7, &mut rng);
            assert!(preserves(&m3, &g).unwrap());
        }
    }

    fn random_sl2(fq2: &FieldCtx, q: u64, rng: &mut ChaCha8Rng) -> ProjMap {
        // entries in F_q: codes of subfield elements
        let subs = hermitian::subfield_elements(fq2, fq2.k() / 2);
        loop {
            let a = subs[rng.gen_range(0..q) as usize].clone();
            let b = subs[rng.gen_range(0..q) as usize].clone();
            let c = subs[rng.gen_range(0..q) as usize].clone();
            if a.is_zero() && b.is_zero() {
                continue;
            }
            // solve for d when possible: ad - bc = 1
            if !a.is_zero() {
                let d = &(&fq2.one() + &(&b * &c)) * &a.inv();
                return sl2_embed(&a, &b, &c, &d).unwrap();
            }
            if c.is_zero() {
                continue;
            }
            let d = subs[rng.gen_range(0..q) as usize].clone();
            // a = 0: need -bc = 1
            let c_fixed = -b.inv();
            return sl2_embed(&a, &b, &c_fixed, &d).unwrap();
        }
    }

    #[test]
    fn semi_regular_on_affine_points() {
        // no non-identity element of Γ fixes an affine curve point
        for q in [5u64, 8] {
            let (p, t) = hermitian::prime_power(q).unwrap();
            let fq2 = make_field(p, 2 * t).unwrap();
            let m3 = hermitian::model(ModelId::M3, q).unwrap();
            let pts = hermitian::enumerate_points(&m3, &fq2).unwrap();
            let affine = pts.points();
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            let samples: Vec<ProjPoint> = (0..200)
                .map(|_| affine[rng.gen_range(0..pts.affine().len())].clone())
                .collect();
            for _ in 0..50 {
                let g = random_sl2(&fq2, q, &mut rng);
                if g.is_identity() {
                    continue;
                }
                for pt in &samples {
                    assert_ne!(g.apply(pt).unwrap(), *pt, "q={q}");
                }
            }
        }
    }

    #[test]
    fn closure_examples() {
        let (t2, _) = generator_T(CaseId::I, 5, 2).unwrap();
        assert_eq!(closure(&[t2], 16).unwrap().order(), 2);
        let alt4 = find_tame_sl2_subgroup(7, SL2Kind::Alt4).unwrap();
        assert_eq!(alt4.order(), 24);
        let cap_hit = closure(alt4.generators(), 10);
        assert!(matches!(cap_hit, Err(AutosError::CapExceeded { .. })));
    }

    #[test]
    fn singer_subgroups() {
        let c21 = singer_generators(5, 21, None).unwrap();
        assert_eq!(c21.order(), 21);
        let g1 = singer_generators(5, 7, Some(1)).unwrap();
        assert_eq!(g1.order(), 21);
        let g0 = singer_generators(4, 13, Some(0)).unwrap();
        assert_eq!(g0.order(), 39);
        let n63 = singer_generators(5, 21, Some(0)).unwrap();
        assert_eq!(n63.order(), 63);
        // q = 1 (mod 3) admits only h_0
        assert!(singer_generators(4, 13, Some(1)).is_err());
        // 3 | n with q = 2 (mod 3) admits only h_0
        assert!(singer_generators(5, 21, Some(2)).is_err());
        // q = 0 (mod 3) is outside the implemented classification
        assert!(matches!(
            singer_generators(3, 7, Some(0)),
            Err(AutosError::NotCovered)
        ));
        // every element preserves M4
        let m4 = hermitian::model(ModelId::M4, 5).unwrap();
        for e in g1.elements() {
            assert!(preserves(&m4, e).unwrap());
        }
    }

    #[test]
    fn singer_rational_examples() {
        for (q, d) in [(5, 3), (5, 7), (3, 7), (8, 3), (4, 13)] {
            let (s, m1) = singer_rational(q, d).unwrap();
            assert_eq!(s.order(), d, "q = {q}, d = {d}");
            assert!(preserves(&m1, &s).unwrap());
            // the generator is defined over F_{q^2}
            let (_, t) = hermitian::prime_power(q).unwrap();
            assert_eq!(s.ctx().k(), 2 * t);
        }
        assert!(singer_rational(5, 2).is_err());
        assert!(singer_rational(5, 5).is_err());
    }

    #[test]
    fn tame_sl2_kinds() {
        let c3 = find_tame_sl2_subgroup(5, SL2Kind::C(3, TorusKind::Nonsplit)).unwrap();
        assert_eq!(c3.order(), 3);
        let c3_full =
            find_tame_sl2_subgroup_lift(5, SL2Kind::C(3, TorusKind::Nonsplit), true).unwrap();
        assert_eq!(c3_full.order(), 6);
        let c2 = find_tame_sl2_subgroup(5, SL2Kind::C(2, TorusKind::Split)).unwrap();
        assert_eq!(c2.order(), 4);
        let d3 = find_tame_sl2_subgroup(5, SL2Kind::D(3, TorusKind::Nonsplit)).unwrap();
        assert_eq!(d3.order(), 12);
        let sym4 = find_tame_sl2_subgroup(7, SL2Kind::Sym4).unwrap();
        assert_eq!(sym4.order(), 48);
        let alt5 = find_tame_sl2_subgroup(11, SL2Kind::Alt5).unwrap();
        assert_eq!(alt5.order(), 120);
        for g in [&c3, &c3_full, &c2, &d3, &sym4, &alt5] {
            assert!(g.is_tame());
        }
        // p = 2: trivial kernel, cyclic kinds lift isomorphically
        let c3_even = find_tame_sl2_subgroup(4, SL2Kind::C(5, TorusKind::Nonsplit)).unwrap();
        assert_eq!(c3_even.order(), 5);
        assert!(find_tame_sl2_subgroup(4, SL2Kind::D(3, TorusKind::Split)).is_err());
        assert!(find_tame_sl2_subgroup(5, SL2Kind::Sym4).is_err());
        assert!(find_tame_sl2_subgroup(5, SL2Kind::Alt5).is_err());
    }

    #[test]
    fn fixed_points_examples() {
        // case III: exactly the two coordinate points on the line Z = 0
        let (t, m3) = generator_T(CaseId::III, 7, 3).unwrap();
        let f76 = make_field(7, 6).unwrap();
        let fix = fixed_points_on(&m3, &t, &f76).unwrap();
        assert_eq!(fix.len(), 2);
        let e100 = ProjPoint::from_ints(&f76, [1, 0, 0]).unwrap();
        let e010 = ProjPoint::from_ints(&f76, [0, 1, 0]).unwrap();
        assert!(fix.contains(&e100) && fix.contains(&e010));
        // case IV(1): the q+1 points (0 : η : 1) with η^{q+1} = -1
        let (t, m1) = generator_T(CaseId::IV1, 5, 3).unwrap();
        let f25 = make_field(5, 2).unwrap();
        let fix = fixed_points_on(&m1, &t, &f25).unwrap();
        assert_eq!(fix.len(), 6);
        for pt in &fix {
            assert!(pt.coords()[0].is_zero());
        }
        // case IV(2): no fixed points on the curve
        let (t, m1) = generator_T(CaseId::IV2, 5, 3).unwrap();
        assert!(fixed_points_on(&m1, &t, &f25).unwrap().is_empty());
        // case V: exactly the three coordinate points
        let (t, m4) = generator_T(CaseId::V, 5, 3).unwrap();
        let f56 = make_field(5, 6).unwrap();
        assert_eq!(fixed_points_on(&m4, &t, &f56).unwrap().len(), 3);
        // identity is rejected
        let id = ProjMap::identity(&f25);
        assert!(matches!(
            fixed_points_on(&m1, &id, &f25),
            Err(AutosError::IdentityMap)
        ));
        // non-splitting characteristic polynomial is rejected
        let f2 = make_field(2, 1).unwrap();
        let m1_2 = hermitian::model(ModelId::M1, 2).unwrap();
        let rot = ProjMap::from_ints(&f2, [[0, 1, 0], [0, 0, 1], [1, 0, 0]]).unwrap();
        assert!(matches!(
            fixed_points_on(&m1_2, &rot, &f2),
            Err(AutosError::ExtTooSmall)
        ));
    }

    #[test]
    fn singer_fixed_point_inventory() {
        // q = 5 = 2 (mod 3): Fix(h_0) misses the curve, Fix(h_1) lies on it
        let q = 5u64;
        let m4 = hermitian::model(ModelId::M4, q).unwrap();
        let f56 = make_field(5, 6).unwrap();
        let eps = gf::root_of_unity(&f56, 3).unwrap();
        let o = f56.zero();
        let hi = |i: u128| {
            ProjMap::new(
                &f56,
                [
                    [o.clone(), eps.pow(i), o.clone()],
                    [o.clone(), o.clone(), eps.pow(2 * i)],
                    [f56.one(), o.clone(), o.clone()],
                ],
            )
            .unwrap()
        };
        assert!(fixed_points_on(&m4, &hi(0), &f56).unwrap().is_empty());
        let fix1 = fixed_points_on(&m4, &hi(1), &f56).unwrap();
        assert_eq!(fix1.len(), 3);
        let e2 = eps.pow(2);
        let expect: Vec<ProjPoint> = [
            [f56.one(), e2.clone(), f56.one()],
            [f56.one(), f56.one(), e2.clone()],
            [e2.clone(), f56.one(), f56.one()],
        ]
        .into_iter()
        .map(|c| ProjPoint::new(&f56, c).unwrap())
        .collect();
        for pt in &expect {
            assert!(fix1.contains(pt));
        }
    }
}
