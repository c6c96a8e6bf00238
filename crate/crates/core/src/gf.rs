//! Exact arithmetic in finite fields 𝔽_{p^k} and their towers.
//!
//! Fields are represented by a polynomial basis modulo the lexicographically
//! smallest monic irreducible of the requested degree, so every value computed
//! downstream is reproducible. Tower relations between 𝔽_{p^a} and 𝔽_{p^b}
//! (a | b) are made explicit through [`TowerEmbed`] objects rather than by a
//! compatible-polynomial convention.

use once_cell::sync::OnceCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};
use thiserror::Error;

/// Default bound on the cardinality of a constructible field.
pub const DEFAULT_CARD_CAP: u64 = 1 << 26;

#[derive(Debug, Error)]
pub enum GfError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("cardinality {card} exceeds the cap {cap}")]
    CapExceeded { card: u64, cap: u64 },
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("incompatible tower: F_{{{sub_p}^{sub_k}}} does not embed in F_{{{sup_p}^{sup_k}}}")]
    IncompatibleTower {
        sub_p: u64,
        sub_k: usize,
        sup_p: u64,
        sup_k: usize,
    },
    #[error("{d} does not divide the multiplicative group order {order}")]
    OrderNotDividing { d: u64, order: u64 },
    #[error("field of degree {k} over F_{p} is not of the form F_{{q^2}}")]
    NotQuadratic { p: u64, k: usize },
    #[error("no solution for the requested unit condition")]
    NoSolution,
}

struct CtxInner {
    p: u64,
    k: usize,
    /// Monic modulus, low-degree-first, length k+1.
    modulus: Vec<u64>,
    cardinality: u64,
    /// Column j holds the coefficients of (t^j)^p mod modulus.
    frob_mat: OnceCell<Vec<u64>>,
    log_table: OnceCell<LogTable>,
}

/// An explicit finite field 𝔽_{p^k}. Cheap to clone; all instances produced by
/// [`make_field`] for the same (p, k) share one allocation.
#[derive(Clone)]
pub struct FieldCtx {
    inner: Arc<CtxInner>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{{{}^{}}}", self.p(), self.k())
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.p() == other.p() && self.k() == other.k())
    }
}
impl Eq for FieldCtx {}

/// Discrete-log tables for one field, built lazily by exhaustive powering of
/// the smallest primitive element (no index calculus).
pub struct LogTable {
    /// pow[i] = code of g^i for 0 <= i < card-1.
    pub pow: Vec<u32>,
    /// log[code] = i with g^i having that code; log[0] is a sentinel.
    pub log: Vec<u32>,
}

/// Sentinel in [`LogTable::log`] for the zero element.
pub const LOG_ZERO: u32 = u32::MAX;

static REGISTRY: Mutex<Option<HashMap<(u64, usize), FieldCtx>>> = Mutex::new(None);

/// Builds 𝔽_{p^k} with the lexicographically smallest monic irreducible
/// modulus (coefficient sequence compared low-degree-first). Results are
/// cached per (p, k).
pub fn make_field(p: u64, k: usize) -> Result<FieldCtx, GfError> {
    make_field_capped(p, k, DEFAULT_CARD_CAP)
}

/// [`make_field`] with an explicit cardinality cap.
pub fn make_field_capped(p: u64, k: usize, cap: u64) -> Result<FieldCtx, GfError> {
    if k == 0 {
        return Err(GfError::ZeroDegree);
    }
    if !is_prime(p) {
        return Err(GfError::NonPrime(p));
    }
    let mut card: u64 = 1;
    for _ in 0..k {
        card = card
            .checked_mul(p)
            .filter(|&c| c <= cap)
            .ok_or(GfError::CapExceeded { card: u64::MAX, cap })?;
    }
    if card > cap {
        return Err(GfError::CapExceeded { card, cap });
    }

    let mut guard = REGISTRY.lock().unwrap_or_else(|e| e.into_inner());
    let map = guard.get_or_insert_with(HashMap::new);
    if let Some(ctx) = map.get(&(p, k)) {
        return Ok(ctx.clone());
    }
    let modulus = smallest_irreducible(p, k);
    let ctx = FieldCtx {
        inner: Arc::new(CtxInner {
            p,
            k,
            modulus,
            cardinality: card,
            frob_mat: OnceCell::new(),
            log_table: OnceCell::new(),
        }),
    };
    map.insert((p, k), ctx.clone());
    Ok(ctx)
}

impl FieldCtx {
    pub fn p(&self) -> u64 {
        self.inner.p
    }
    pub fn k(&self) -> usize {
        self.inner.k
    }
    pub fn cardinality(&self) -> u64 {
        self.inner.cardinality
    }
    /// Monic modulus, low-degree-first, length k+1.
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    pub fn zero(&self) -> Element {
        Element {
            ctx: self.clone(),
            c: vec![0; self.k()],
        }
    }
    pub fn one(&self) -> Element {
        self.from_int(1)
    }
    /// The image of an integer under ℤ → 𝔽_{p^k}.
    pub fn from_int(&self, n: i64) -> Element {
        let p = self.p() as i64;
        let mut c = vec![0; self.k()];
        c[0] = n.rem_euclid(p) as u64;
        Element { ctx: self.clone(), c }
    }
    /// The class of the generator t (reduction of the modulus variable).
    pub fn gen(&self) -> Element {
        let mut c = vec![0; self.k()];
        if self.k() == 1 {
            // t is congruent to the negated constant term of the modulus.
            c[0] = (self.p() - self.inner.modulus[0] % self.p()) % self.p();
        } else {
            c[1] = 1;
        }
        Element { ctx: self.clone(), c }
    }
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Element {
        assert_eq!(coeffs.len(), self.k(), "coefficient count must equal k");
        let p = self.p();
        Element {
            ctx: self.clone(),
            c: coeffs.iter().map(|&x| x % p).collect(),
        }
    }

    /// Packs coefficients little-endian: code = Σ cᵢ pⁱ < cardinality.
    pub fn from_code(&self, mut code: u64) -> Element {
        let p = self.p();
        let mut c = vec![0; self.k()];
        for slot in c.iter_mut() {
            *slot = code % p;
            code /= p;
        }
        Element { ctx: self.clone(), c }
    }

    /// All field elements in the fixed deterministic order (coefficient
    /// sequences compared low-degree-first).
    pub fn elements_lex(&self) -> impl Iterator<Item = Element> + '_ {
        LexIter {
            ctx: self,
            digits: vec![0; self.k()],
            done: false,
        }
    }

    fn frob_mat(&self) -> &[u64] {
        self.inner.frob_mat.get_or_init(|| {
            let k = self.k();
            let mut mat = vec![0u64; k * k];
            let t = self.gen();
            // column j = (t^j)^p
            let mut tj = self.one();
            for j in 0..k {
                let img = tj.pow(self.p() as u128);
                for i in 0..k {
                    mat[i * k + j] = img.c[i];
                }
                tj = &tj * &t;
            }
            mat
        })
    }

    /// Discrete-log tables over the full multiplicative group; built on first
    /// use and cached for the lifetime of the process.
    pub fn log_table(&self) -> &LogTable {
        self.inner.log_table.get_or_init(|| {
            let card = self.cardinality() as usize;
            let g = self.primitive_element();
            let mut pow = vec![0u32; card - 1];
            let mut log = vec![LOG_ZERO; card];
            let mut cur = self.one();
            for i in 0..card - 1 {
                let code = cur.code() as usize;
                pow[i] = code as u32;
                log[code] = i as u32;
                cur = &cur * &g;
            }
            LogTable { pow, log }
        })
    }

    /// Smallest (in the fixed element order) generator of the multiplicative
    /// group.
    pub fn primitive_element(&self) -> Element {
        let order = self.cardinality() - 1;
        let primes = prime_factors(order);
        self.elements_lex()
            .filter(|x| !x.is_zero())
            .find(|x| primes.iter().all(|&r| !x.pow((order / r) as u128).is_one()))
            .expect("multiplicative group of a finite field is cyclic")
    }
}

struct LexIter<'a> {
    ctx: &'a FieldCtx,
    digits: Vec<u64>,
    done: bool,
}

impl Iterator for LexIter<'_> {
    type Item = Element;
    fn next(&mut self) -> Option<Element> {
        if self.done {
            return None;
        }
        let out = Element {
            ctx: self.ctx.clone(),
            c: self.digits.clone(),
        };
        // Odometer with the highest-degree digit fastest: that enumerates the
        // coefficient sequences in lexicographic order read low-degree-first.
        let p = self.ctx.p();
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < p {
                break;
            }
            self.digits[i] = 0;
        }
        Some(out)
    }
}

/// An element of a [`FieldCtx`], stored in the polynomial basis.
#[derive(Clone)]
pub struct Element {
    ctx: FieldCtx,
    c: Vec<u64>,
}

impl Element {
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }
    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&x| x == 0)
    }
    /// Little-endian packed index, a perfect hash into [0, cardinality).
    pub fn code(&self) -> u64 {
        let p = self.ctx.p();
        self.c.iter().rev().fold(0, |acc, &x| acc * p + x)
    }

    fn assert_same_ctx(&self, other: &Element) {
        assert!(
            self.ctx == other.ctx,
            "elements of different fields: {:?} vs {:?}",
            self.ctx,
            other.ctx
        );
    }

    pub fn pow(&self, mut e: u128) -> Element {
        let mut base = self.clone();
        let mut acc = self.ctx.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse; panics on zero (callers check).
    pub fn inv(&self) -> Element {
        assert!(!self.is_zero(), "inverse of zero");
        let p = self.ctx.p();
        // Extended Euclid over F_p[t] on (self as polynomial, modulus).
        let mut r0: Vec<u64> = self.ctx.modulus().to_vec();
        let mut r1: Vec<u64> = trim(self.c.clone());
        let mut s0: Vec<u64> = vec![];
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (quot, rem) = poly_divmod(&r0, &r1, p);
            let s2 = poly_sub(&s0, &poly_mul(&quot, &s1, p), p);
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s2;
        }
        // r0 is a nonzero constant gcd; scale s0 by its inverse.
        let scale = int_inv_mod(r0[0], p);
        let mut c = vec![0u64; self.ctx.k()];
        for (i, &x) in s0.iter().enumerate() {
            c[i] = x * scale % p;
        }
        Element { ctx: self.ctx.clone(), c }
    }

    /// x ↦ x^{p^s}.
    pub fn frobenius(&self, s: usize) -> Element {
        let k = self.ctx.k();
        let mat = self.ctx.frob_mat();
        let p = self.ctx.p();
        let mut cur = self.c.clone();
        for _ in 0..(s % k) {
            let mut next = vec![0u64; k];
            for (j, &cj) in cur.iter().enumerate() {
                if cj == 0 {
                    continue;
                }
                for i in 0..k {
                    next[i] = (next[i] + mat[i * k + j] * cj) % p;
                }
            }
            cur = next;
        }
        Element { ctx: self.ctx.clone(), c: cur }
    }

    /// Multiplicative order; the element must be nonzero.
    pub fn order(&self) -> u64 {
        assert!(!self.is_zero());
        let mut o = self.ctx.cardinality() - 1;
        for r in prime_factors(o) {
            while o % r == 0 && self.pow((o / r) as u128).is_one() {
                o /= r;
            }
        }
        o
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.c.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 if c == 1 => write!(f, "t")?,
                1 => write!(f, "{c}t")?,
                _ if c == 1 => write!(f, "t^{i}")?,
                _ => write!(f, "{c}t^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.c == other.c
    }
}
impl Eq for Element {}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Element {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.ctx.p(), self.ctx.k(), &self.c).cmp(&(other.ctx.p(), other.ctx.k(), &other.c))
    }
}

impl std::hash::Hash for Element {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ctx.p().hash(state);
        self.ctx.k().hash(state);
        self.c.hash(state);
    }
}

macro_rules! elem_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl std::ops::$trait for &Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                self.assert_same_ctx(rhs);
                let f: fn(&Element, &Element) -> Element = $body;
                f(self, rhs)
            }
        }
        impl std::ops::$trait for Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                (&self).$method(&rhs)
            }
        }
    };
}

elem_binop!(Add, add, |a, b| {
    let p = a.ctx.p();
    let c = a.c.iter().zip(&b.c).map(|(&x, &y)| (x + y) % p).collect();
    Element { ctx: a.ctx.clone(), c }
});

elem_binop!(Sub, sub, |a, b| {
    let p = a.ctx.p();
    let c = a
        .c
        .iter()
        .zip(&b.c)
        .map(|(&x, &y)| (x + p - y) % p)
        .collect();
    Element { ctx: a.ctx.clone(), c }
});

elem_binop!(Mul, mul, |a, b| {
    let p = a.ctx.p();
    let k = a.ctx.k();
    let mut buf = vec![0u64; 2 * k - 1];
    for (i, &x) in a.c.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.c.iter().enumerate() {
            if y == 0 {
                continue;
            }
            buf[i + j] = (buf[i + j] + x * y) % p;
        }
    }
    reduce_in_place(&mut buf, a.ctx.modulus(), p);
    buf.truncate(k);
    Element { ctx: a.ctx.clone(), c: buf }
});

impl std::ops::Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        let p = self.ctx.p();
        let c = self.c.iter().map(|&x| (p - x) % p).collect();
        Element { ctx: self.ctx.clone(), c }
    }
}
impl std::ops::Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

/// Reduces a coefficient buffer (low-degree-first) modulo a monic modulus.
fn reduce_in_place(buf: &mut Vec<u64>, modulus: &[u64], p: u64) {
    let k = modulus.len() - 1;
    let mut i = buf.len();
    while i > k {
        i -= 1;
        let lead = buf[i];
        if lead != 0 {
            buf[i] = 0;
            for (j, &m) in modulus.iter().take(k).enumerate() {
                let idx = i - k + j;
                buf[idx] = (buf[idx] + (p - m % p) % p * lead) % p;
            }
        }
    }
}

/// The embedding 𝔽_{p^a} ↪ 𝔽_{p^b} (a | b) sending the generator of the
/// subfield to the smallest root of its modulus in the big field.
pub struct TowerEmbed {
    sub: FieldCtx,
    sup: FieldCtx,
    gen_image: Element,
    /// Powers of the generator image, 0..sub.k.
    gen_powers: Vec<Element>,
    /// Row-echelon data for the section: the sup-coeff matrix of the
    /// gen_powers basis (sup.k x sub.k, row-major over F_p).
    basis: Vec<Vec<u64>>,
}

static EMBED_REGISTRY: Mutex<Option<HashMap<(u64, usize, usize), Arc<TowerEmbed>>>> =
    Mutex::new(None);

/// Cached construction of [`TowerEmbed`]; deterministic per (p, k_sub, k_sup).
pub fn embedding(sub: &FieldCtx, sup: &FieldCtx) -> Result<Arc<TowerEmbed>, GfError> {
    if sub.p() != sup.p() || sup.k() % sub.k() != 0 {
        return Err(GfError::IncompatibleTower {
            sub_p: sub.p(),
            sub_k: sub.k(),
            sup_p: sup.p(),
            sup_k: sup.k(),
        });
    }
    let key = (sub.p(), sub.k(), sup.k());
    {
        let guard = EMBED_REGISTRY.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(map) = guard.as_ref() {
            if let Some(e) = map.get(&key) {
                return Ok(e.clone());
            }
        }
    }
    let embed = Arc::new(TowerEmbed::build(sub, sup));
    let mut guard = EMBED_REGISTRY.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .get_or_insert_with(HashMap::new)
        .insert(key, embed.clone());
    Ok(embed)
}

impl TowerEmbed {
    fn build(sub: &FieldCtx, sup: &FieldCtx) -> TowerEmbed {
        let gen_image = if sub.k() == sup.k() {
            sub_to_same(sub, sup)
        } else {
            let coeffs: Vec<Element> = sub
                .modulus()
                .iter()
                .map(|&c| sup.from_int(c as i64))
                .collect();
            let mut roots = poly_roots(&coeffs, sup);
            roots.sort();
            roots
                .into_iter()
                .next()
                .expect("modulus of a subfield splits in any containing field")
        };
        let mut gen_powers = Vec::with_capacity(sub.k());
        let mut cur = sup.one();
        for _ in 0..sub.k() {
            gen_powers.push(cur.clone());
            cur = &cur * &gen_image;
        }
        let basis: Vec<Vec<u64>> = (0..sup.k())
            .map(|row| gen_powers.iter().map(|e| e.coeffs()[row]).collect())
            .collect();
        TowerEmbed {
            sub: sub.clone(),
            sup: sup.clone(),
            gen_image,
            gen_powers,
            basis,
        }
    }

    pub fn sub(&self) -> &FieldCtx {
        &self.sub
    }
    pub fn sup(&self) -> &FieldCtx {
        &self.sup
    }
    pub fn gen_image(&self) -> &Element {
        &self.gen_image
    }

    pub fn embed(&self, x: &Element) -> Element {
        assert!(x.ctx() == &self.sub, "element not in the subfield");
        let mut acc = self.sup.zero();
        for (i, &ci) in x.coeffs().iter().enumerate() {
            if ci != 0 {
                acc = &acc + &(&self.gen_powers[i] * &self.sup.from_int(ci as i64));
            }
        }
        acc
    }

    /// Inverse of [`embed`](Self::embed) on its image; `None` for elements of
    /// the big field outside the subfield.
    pub fn section(&self, y: &Element) -> Option<Element> {
        assert!(y.ctx() == &self.sup, "element not in the big field");
        let rhs: Vec<u64> = y.coeffs().to_vec();
        let sol = fp_solve(&self.basis, &rhs, self.sub.p())?;
        Some(self.sub.from_coeffs(&sol.0))
    }
}

/// Identity-degree "embedding" (sub.k == sup.k); the registry makes the two
/// contexts pointer-equal, so the generator maps to itself.
fn sub_to_same(sub: &FieldCtx, sup: &FieldCtx) -> Element {
    debug_assert_eq!(sub.modulus(), sup.modulus());
    sup.gen()
}

/// Tr_{x.ctx / sub}(x): the sum of conjugates; the result is returned in the
/// subfield.
pub fn trace_to(x: &Element, sub: &FieldCtx) -> Result<Element, GfError> {
    let embed = embedding(sub, x.ctx())?;
    let m = x.ctx().k() / sub.k();
    let mut acc = x.ctx().zero();
    let mut cur = x.clone();
    for _ in 0..m {
        acc = &acc + &cur;
        cur = cur.frobenius(sub.k());
    }
    embed
        .section(&acc)
        .ok_or(GfError::NoSolution)
}

/// N_{x.ctx / sub}(x): the product of conjugates, returned in the subfield.
pub fn norm_to(x: &Element, sub: &FieldCtx) -> Result<Element, GfError> {
    let embed = embedding(sub, x.ctx())?;
    let m = x.ctx().k() / sub.k();
    let mut acc = x.ctx().one();
    let mut cur = x.clone();
    for _ in 0..m {
        acc = &acc * &cur;
        cur = cur.frobenius(sub.k());
    }
    embed.section(&acc).ok_or(GfError::NoSolution)
}

/// The smallest element of exact multiplicative order d.
pub fn root_of_unity(ctx: &FieldCtx, d: u64) -> Result<Element, GfError> {
    let order = ctx.cardinality() - 1;
    if d == 0 || order % d != 0 {
        return Err(GfError::OrderNotDividing { d, order });
    }
    let primes = prime_factors(d);
    ctx.elements_lex()
        .filter(|x| !x.is_zero())
        .find(|x| {
            x.pow(d as u128).is_one()
                && primes.iter().all(|&r| !x.pow((d / r) as u128).is_one())
        })
        .ok_or(GfError::NoSolution)
}

/// Unit conditions appearing in the plane models of the Hermitian curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitCondition {
    /// ω^{q-1} = -1
    QMinus1IsNegOne,
    /// ω^{q+1} = -1
    QPlus1IsNegOne,
    /// ω^{q+1} = 1
    QPlus1IsOne,
}

/// Solves the unit condition in a field of shape 𝔽_{q²}; q is inferred as
/// p^{k/2}. Returns the smallest solution in the fixed element order.
pub fn solve_unit_condition(ctx: &FieldCtx, kind: UnitCondition) -> Result<Element, GfError> {
    if ctx.k() % 2 != 0 {
        return Err(GfError::NotQuadratic {
            p: ctx.p(),
            k: ctx.k(),
        });
    }
    let q = ctx.p().pow(ctx.k() as u32 / 2);
    let minus_one = -ctx.one();
    ctx.elements_lex()
        .filter(|x| !x.is_zero())
        .find(|x| match kind {
            UnitCondition::QMinus1IsNegOne => x.pow((q - 1) as u128) == minus_one,
            UnitCondition::QPlus1IsNegOne => x.pow((q + 1) as u128) == minus_one,
            UnitCondition::QPlus1IsOne => x.pow((q + 1) as u128).is_one(),
        })
        .ok_or(GfError::NoSolution)
}

// ---------------------------------------------------------------------------
// Root finding for univariate polynomials with Element coefficients.
// ---------------------------------------------------------------------------

/// All roots in `ctx` of the polynomial with the given coefficients
/// (low-degree-first), via x^|F| - x gcd splitting. Deterministic: the
/// splitting uses a fixed sequence of shift elements and the result is sorted.
pub fn poly_roots(coeffs: &[Element], ctx: &FieldCtx) -> Vec<Element> {
    let mut f: Vec<Element> = coeffs.to_vec();
    while f.last().map_or(false, |c| c.is_zero()) {
        f.pop();
    }
    assert!(!f.is_empty(), "zero polynomial has every element as a root");
    let mut roots = Vec::new();
    // Strip roots at zero.
    while f[0].is_zero() && f.len() > 1 {
        if roots.is_empty() {
            roots.push(ctx.zero());
        }
        f.remove(0);
    }
    if f.len() <= 1 {
        roots.sort();
        return roots;
    }
    make_monic(&mut f);
    // g = gcd(x^card - x, f) isolates the distinct roots in ctx.
    let card = ctx.cardinality();
    let xq = pow_x_mod(card, &f, ctx);
    let mut xq_minus_x = xq;
    if xq_minus_x.len() < 2 {
        xq_minus_x.resize(2, ctx.zero());
    }
    xq_minus_x[1] = &xq_minus_x[1] - &ctx.one();
    let g = elem_poly_gcd(&xq_minus_x, &f, ctx);
    split_linear(&g, ctx, &mut roots);
    roots.sort();
    roots.dedup();
    roots
}

fn split_linear(g: &[Element], ctx: &FieldCtx, out: &mut Vec<Element>) {
    let deg = g.len() - 1;
    if deg == 0 {
        return;
    }
    if deg == 1 {
        out.push(-&(&g[0] * &g[1].inv()));
        return;
    }
    let card = ctx.cardinality();
    if ctx.p() == 2 {
        // Split with the absolute trace map Tr(r·x) for successive r.
        let m = ctx.k() * {
            // card = 2^m with m = k (p = 2).
            1
        };
        for r in ctx.elements_lex().filter(|r| !r.is_zero()) {
            // t(x) = sum_{i<m} (r x)^{2^i} mod g
            let rx = vec![ctx.zero(), r.clone()];
            let mut term = elem_poly_mod(&rx, g, ctx);
            let mut acc = term.clone();
            for _ in 1..m {
                term = elem_poly_mod(&elem_poly_mul(&term, &term, ctx), g, ctx);
                acc = elem_poly_add(&acc, &term, ctx);
            }
            let h = elem_poly_gcd(&acc, g, ctx);
            let dh = h.len() - 1;
            if dh > 0 && dh < deg {
                let (quot, _) = elem_poly_divmod(g, &h, ctx);
                split_linear(&h, ctx, out);
                split_linear(&quot, ctx, out);
                return;
            }
        }
        unreachable!("trace splitting exhausts the field only for constant g");
    } else {
        // Odd characteristic: (x+r)^{(card-1)/2} - 1 splits the roots into
        // quadratic residues/non-residues of x+r.
        for r in ctx.elements_lex() {
            let xr = vec![r.clone(), ctx.one()];
            let mut w = pow_poly_mod(&xr, ((card - 1) / 2) as u128, g, ctx);
            if w.is_empty() {
                continue;
            }
            w[0] = &w[0] - &ctx.one();
            let h = elem_poly_gcd(&w, g, ctx);
            let dh = h.len() - 1;
            if dh > 0 && dh < deg {
                let (quot, _) = elem_poly_divmod(g, &h, ctx);
                split_linear(&h, ctx, out);
                split_linear(&quot, ctx, out);
                return;
            }
        }
        unreachable!("quadratic-character splitting cannot fail for squarefree split g");
    }
}

fn make_monic(f: &mut [Element]) {
    let lead = f.last().unwrap().clone();
    if !lead.is_one() {
        let inv = lead.inv();
        for c in f.iter_mut() {
            *c = &*c * &inv;
        }
    }
}

fn elem_poly_add(a: &[Element], b: &[Element], ctx: &FieldCtx) -> Vec<Element> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(|| ctx.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| ctx.zero());
        out.push(&x + &y);
    }
    trim_elem(out)
}

fn elem_poly_mul(a: &[Element], b: &[Element], ctx: &FieldCtx) -> Vec<Element> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![ctx.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim_elem(out)
}

fn elem_poly_divmod(a: &[Element], b: &[Element], ctx: &FieldCtx) -> (Vec<Element>, Vec<Element>) {
    let db = b.len() - 1;
    let lead_inv = b[db].inv();
    let mut rem: Vec<Element> = a.to_vec();
    if rem.len() <= db {
        return (vec![], trim_elem(rem));
    }
    let mut quot = vec![ctx.zero(); rem.len() - db];
    for i in (db..rem.len()).rev() {
        let coef = &rem[i] * &lead_inv;
        if coef.is_zero() {
            continue;
        }
        quot[i - db] = coef.clone();
        for j in 0..=db {
            rem[i - db + j] = &rem[i - db + j] - &(&coef * &b[j]);
        }
    }
    (trim_elem(quot), trim_elem(rem))
}

fn elem_poly_mod(a: &[Element], m: &[Element], ctx: &FieldCtx) -> Vec<Element> {
    elem_poly_divmod(a, m, ctx).1
}

fn elem_poly_gcd(a: &[Element], b: &[Element], ctx: &FieldCtx) -> Vec<Element> {
    let mut r0 = trim_elem(a.to_vec());
    let mut r1 = trim_elem(b.to_vec());
    while !r1.is_empty() {
        let rem = elem_poly_mod(&r0, &r1, ctx);
        r0 = r1;
        r1 = rem;
    }
    if !r0.is_empty() {
        make_monic(&mut r0);
    }
    r0
}

/// x^e mod m.
fn pow_x_mod(e: u64, m: &[Element], ctx: &FieldCtx) -> Vec<Element> {
    pow_poly_mod(&[ctx.zero(), ctx.one()], e as u128, m, ctx)
}

fn pow_poly_mod(base: &[Element], mut e: u128, m: &[Element], ctx: &FieldCtx) -> Vec<Element> {
    let mut b = elem_poly_mod(base, m, ctx);
    let mut acc = vec![ctx.one()];
    while e > 0 {
        if e & 1 == 1 {
            acc = elem_poly_mod(&elem_poly_mul(&acc, &b, ctx), m, ctx);
        }
        e >>= 1;
        if e > 0 {
            b = elem_poly_mod(&elem_poly_mul(&b, &b, ctx), m, ctx);
        }
    }
    acc
}

fn trim_elem(mut v: Vec<Element>) -> Vec<Element> {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
    v
}

// ---------------------------------------------------------------------------
// F_p[x] utilities (plain u64 coefficient vectors, low-degree-first).
// ---------------------------------------------------------------------------

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = (x + p - y) % p;
    }
    trim(out)
}

fn poly_divmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let db = b.len() - 1;
    let lead_inv = int_inv_mod(b[db], p);
    let mut rem = a.to_vec();
    if rem.len() <= db {
        return (vec![], trim(rem));
    }
    let mut quot = vec![0u64; rem.len() - db];
    for i in (db..rem.len()).rev() {
        let coef = rem[i] * lead_inv % p;
        if coef == 0 {
            continue;
        }
        quot[i - db] = coef;
        for j in 0..=db {
            rem[i - db + j] = (rem[i - db + j] + p - coef * b[j] % p) % p;
        }
    }
    (trim(quot), trim(rem))
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r0 = trim(a.to_vec());
    let mut r1 = trim(b.to_vec());
    while !r1.is_empty() {
        let rem = poly_divmod(&r0, &r1, p).1;
        r0 = r1;
        r1 = rem;
    }
    r0
}

fn poly_pow_x_p_mod(f: &[u64], p: u64, times: usize) -> Vec<u64> {
    // x^{p^times} mod f by repeated p-th powering.
    let mut cur = if f.len() > 2 { vec![0, 1] } else { poly_divmod(&[0, 1], f, p).1 };
    for _ in 0..times {
        cur = poly_powmod(&cur, p, f, p);
    }
    cur
}

fn poly_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut b = poly_divmod(base, m, p).1;
    let mut acc = vec![1u64];
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_divmod(&poly_mul(&acc, &b, p), m, p).1;
        }
        e >>= 1;
        if e > 0 {
            b = poly_divmod(&poly_mul(&b, &b, p), m, p).1;
        }
    }
    acc
}

fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = f.len() - 1;
    // cheap screens: divisibility by x, then by any x - a
    if k > 1 {
        if f[0] == 0 {
            return false;
        }
        for a in 0..p {
            let mut acc = 0u64;
            for &c in f.iter().rev() {
                acc = (acc * a + c) % p;
            }
            if acc == 0 {
                return false;
            }
        }
    }
    let x_red = poly_divmod(&[0, 1], f, p).1;
    // x^{p^k} == x mod f
    let xpk = poly_pow_x_p_mod(f, p, k);
    if trim(poly_sub(&xpk, &x_red, p)) != Vec::<u64>::new() {
        return false;
    }
    for r in prime_factors(k as u64) {
        let xpm = poly_pow_x_p_mod(f, p, k / r as usize);
        let g = poly_gcd(&poly_sub(&xpm, &x_red, p), f, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn smallest_irreducible(p: u64, k: usize) -> Vec<u64> {
    // Enumerate monic degree-k polynomials so the coefficient sequence
    // (c0, ..., c_{k-1}) increases lexicographically (c0 most significant).
    let mut digits = vec![0u64; k];
    loop {
        let mut f = digits.clone();
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
        let mut i = k;
        loop {
            assert!(i > 0, "no irreducible polynomial found (impossible)");
            i -= 1;
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Integer helpers.
// ---------------------------------------------------------------------------

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn int_inv_mod(a: u64, p: u64) -> u64 {
    // p prime, a nonzero mod p.
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// Solves M·x = rhs over F_p for a row-major matrix; returns a particular
/// solution and a kernel basis, or `None` when inconsistent.
pub(crate) fn fp_solve(
    mat: &[Vec<u64>],
    rhs: &[u64],
    p: u64,
) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let mut a: Vec<Vec<u64>> = mat
        .iter()
        .zip(rhs)
        .map(|(row, &b)| {
            let mut r: Vec<u64> = row.iter().map(|&x| x % p).collect();
            r.push(b % p);
            r
        })
        .collect();
    let mut pivot_of_col = vec![usize::MAX; cols];
    let mut rank = 0;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, pr);
        let inv = int_inv_mod(a[rank][col], p);
        for x in a[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows {
            if r != rank && a[r][col] != 0 {
                let f = a[r][col];
                for cc in 0..=cols {
                    a[r][cc] = (a[r][cc] + p - f * a[rank][cc] % p) % p;
                }
            }
        }
        pivot_of_col[col] = rank;
        rank += 1;
    }
    if (rank..rows).any(|r| a[r][cols] != 0) {
        return None;
    }
    let mut particular = vec![0u64; cols];
    for col in 0..cols {
        if pivot_of_col[col] != usize::MAX {
            particular[col] = a[pivot_of_col[col]][cols];
        }
    }
    let mut kernel = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free] != usize::MAX {
            continue;
        }
        let mut v = vec![0u64; cols];
        v[free] = 1;
        for col in 0..cols {
            let pr = pivot_of_col[col];
            if pr != usize::MAX {
                v[col] = (p - a[pr][free] % p) % p;
            }
        }
        kernel.push(v);
    }
    Some((particular, kernel))
}
