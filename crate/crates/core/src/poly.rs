//! Polynomial arithmetic over field elements: dense univariate polynomials,
//! sparse trivariate polynomials, linearized-map fiber solving, and the
//! symmetric product s(X,Y,Z) behind the degree-d quotient model.

use crate::gf::{self, Element, FieldCtx};
use std::collections::BTreeMap;
use thiserror::Error;

/// Default cap for exhaustive root scans.
pub const SCAN_CAP: u64 = 1 << 23;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("scan cap exceeded: field cardinality {card} > {cap}")]
    ScanCapExceeded { card: u64, cap: u64 },
    #[error("the zero polynomial has every element as a root")]
    ZeroPolynomial,
    #[error("substitution matrix is singular")]
    SingularMatrix,
    #[error("coefficient {0:?} lies outside the target subfield")]
    CoefficientOutsideSubfield(String),
    #[error("term ({i},{j}) violates the congruence j = qi (mod d)")]
    NonIntegralExponent { i: u32, j: u32 },
    #[error("d = {d} must be at least 3 and divide q^2 - q + 1 = {m}")]
    BadDivisor { d: u64, m: u64 },
    #[error("field error: {0}")]
    Field(#[from] gf::GfError),
}

/// Dense univariate polynomial, coefficients low-degree-first, trailing
/// coefficient nonzero unless the polynomial is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    ctx: FieldCtx,
    coeffs: Vec<Element>,
}

impl UniPoly {
    pub fn new(ctx: &FieldCtx, coeffs: Vec<Element>) -> UniPoly {
        let mut coeffs = coeffs;
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly {
            ctx: ctx.clone(),
            coeffs,
        }
    }
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    pub fn coeffs(&self) -> &[Element] {
        &self.coeffs
    }
    /// Degree with the zero polynomial mapped to -1.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn eval(&self, x: &Element) -> Element {
        let mut acc = self.ctx.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// All roots in the coefficient field, by fast gcd splitting (exact and
    /// deterministic; no cap needed).
    pub fn roots(&self) -> Result<Vec<Element>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        Ok(gf::poly_roots(&self.coeffs, &self.ctx))
    }
}

/// Exhaustive-evaluation root finding, the simple oracle used to cross-check
/// [`UniPoly::roots`].
pub fn roots_scan(f: &UniPoly) -> Result<Vec<Element>, PolyError> {
    roots_scan_capped(f, SCAN_CAP)
}

pub fn roots_scan_capped(f: &UniPoly, cap: u64) -> Result<Vec<Element>, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let card = f.ctx().cardinality();
    if card > cap {
        return Err(PolyError::ScanCapExceeded { card, cap });
    }
    Ok(f.ctx()
        .elements_lex()
        .filter(|x| f.eval(x).is_zero())
        .collect())
}

/// An 𝔽_p-linear map on a field viewed as a p-ary vector space, defined by an
/// additive polynomial Σ cᵢ x^{p^{sᵢ}}.
#[derive(Clone, Debug)]
pub struct LinearizedMap {
    ctx: FieldCtx,
    /// Row-major k x k matrix over F_p.
    matrix: Vec<Vec<u64>>,
}

impl LinearizedMap {
    /// Builds the matrix of x ↦ Σ cᵢ x^{p^{sᵢ}} by evaluating on the basis.
    pub fn from_additive(ctx: &FieldCtx, terms: &[(Element, usize)]) -> LinearizedMap {
        let k = ctx.k();
        let apply = |x: &Element| {
            let mut acc = ctx.zero();
            for (c, s) in terms {
                acc = &acc + &(c * &x.frobenius(*s));
            }
            acc
        };
        let t = ctx.gen();
        let mut basis_elt = ctx.one();
        let mut cols: Vec<Vec<u64>> = Vec::with_capacity(k);
        for _ in 0..k {
            cols.push(apply(&basis_elt).coeffs().to_vec());
            basis_elt = &basis_elt * &t;
        }
        let matrix = (0..k)
            .map(|row| (0..k).map(|col| cols[col][row]).collect())
            .collect();
        LinearizedMap {
            ctx: ctx.clone(),
            matrix,
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn apply(&self, x: &Element) -> Element {
        let k = self.ctx.k();
        let p = self.ctx.p();
        let mut out = vec![0u64; k];
        for (row, out_c) in out.iter_mut().enumerate() {
            let mut acc = 0u64;
            for col in 0..k {
                acc += self.matrix[row][col] * x.coeffs()[col];
            }
            *out_c = acc % p;
        }
        self.ctx.from_coeffs(&out)
    }

    /// Full solution set of L(y) = c, sorted; empty when c is outside the
    /// image, otherwise of size p^{dim ker L}.
    pub fn solve(&self, c: &Element) -> Vec<Element> {
        let p = self.ctx.p();
        let Some((particular, kernel)) = gf::fp_solve(&self.matrix, c.coeffs(), p) else {
            return vec![];
        };
        let k = self.ctx.k();
        let mut out = Vec::new();
        let dim = kernel.len();
        let mut combo = vec![0u64; dim];
        loop {
            let mut v = particular.clone();
            for (ci, kv) in combo.iter().zip(&kernel) {
                for j in 0..k {
                    v[j] = (v[j] + ci * kv[j]) % p;
                }
            }
            out.push(self.ctx.from_coeffs(&v));
            let mut i = dim;
            loop {
                if i == 0 {
                    out.sort();
                    return out;
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
}

/// Row-reduced form of a linearized map, for solving many fibers L(y) = c
/// against the same L in O(k²) each.
#[derive(Clone, Debug)]
pub struct PresolvedMap {
    p: u64,
    k: usize,
    trans: Vec<Vec<u64>>,
    /// (row, column) of each pivot.
    pivots: Vec<(usize, usize)>,
    kernel: Vec<Vec<u64>>,
}

impl LinearizedMap {
    pub fn presolve(&self) -> PresolvedMap {
        let p = self.ctx.p();
        let k = self.ctx.k();
        let mut aug: Vec<Vec<u64>> = (0..k)
            .map(|r| {
                let mut row = self.matrix[r].clone();
                row.extend((0..k).map(|c| u64::from(c == r)));
                row
            })
            .collect();
        let inv_mod = |a: u64| -> u64 {
            let mut x = 1u64;
            for _ in 0..p - 2 {
                x = x * a % p;
            }
            x
        };
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..k {
            let Some(pr) = (row..k).find(|&r| aug[r][col] != 0) else {
                continue;
            };
            aug.swap(row, pr);
            let inv = inv_mod(aug[row][col]);
            for v in aug[row].iter_mut() {
                *v = *v * inv % p;
            }
            for r in 0..k {
                if r != row && aug[r][col] != 0 {
                    let f = aug[r][col];
                    for c in 0..2 * k {
                        aug[r][c] = (aug[r][c] + (p - f) * aug[row][c]) % p;
                    }
                }
            }
            pivots.push((row, col));
            row += 1;
        }
        let rref: Vec<Vec<u64>> = aug.iter().map(|r| r[..k].to_vec()).collect();
        let trans: Vec<Vec<u64>> = aug.iter().map(|r| r[k..].to_vec()).collect();
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut kernel = Vec::new();
        for f in 0..k {
            if pivot_cols.contains(&f) {
                continue;
            }
            let mut v = vec![0u64; k];
            v[f] = 1;
            for &(r, c) in &pivots {
                v[c] = (p - rref[r][f]) % p;
            }
            kernel.push(v);
        }
        PresolvedMap {
            p,
            k,
            trans,
            pivots,
            kernel,
        }
    }
}

impl PresolvedMap {
    pub fn kernel(&self) -> &[Vec<u64>] {
        &self.kernel
    }

    /// Particular solution of L(y) = c from coefficient vectors, with free
    /// coordinates set to zero; `None` when c is outside the image.
    pub fn solve_coeffs(&self, b: &[u64]) -> Option<Vec<u64>> {
        let k = self.k;
        let p = self.p;
        let mut t = vec![0u64; k];
        for (r, tr) in t.iter_mut().enumerate() {
            let mut acc = 0u64;
            for c in 0..k {
                acc += self.trans[r][c] * b[c];
            }
            *tr = acc % p;
        }
        let rank = self.pivots.len();
        if t[rank..].iter().any(|&v| v != 0) {
            return None;
        }
        let mut x = vec![0u64; k];
        for &(r, c) in &self.pivots {
            x[c] = t[r];
        }
        Some(x)
    }

    /// All solutions as coefficient vectors: particular plus every kernel
    /// combination, in odometer order over the kernel basis.
    pub fn all_solutions(&self, b: &[u64]) -> Vec<Vec<u64>> {
        let Some(part) = self.solve_coeffs(b) else {
            return vec![];
        };
        let p = self.p;
        let k = self.k;
        let dim = self.kernel.len();
        let mut out = Vec::with_capacity(p.pow(dim as u32) as usize);
        let mut combo = vec![0u64; dim];
        loop {
            let mut v = part.clone();
            for (ci, kv) in combo.iter().zip(&self.kernel) {
                for j in 0..k {
                    v[j] = (v[j] + ci * kv[j]) % p;
                }
            }
            out.push(v);
            let mut i = dim;
            loop {
                if i == 0 {
                    return out;
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
}

/// Sparse trivariate polynomial; exponent triples map to nonzero
/// coefficients. The BTreeMap keeps iteration deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriPoly {
    ctx: FieldCtx,
    terms: BTreeMap<(u32, u32, u32), Element>,
}

impl TriPoly {
    pub fn zero(ctx: &FieldCtx) -> TriPoly {
        TriPoly {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    pub fn terms(&self) -> &BTreeMap<(u32, u32, u32), Element> {
        &self.terms
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exp: (u32, u32, u32), coeff: Element) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn from_terms(ctx: &FieldCtx, terms: Vec<((u32, u32, u32), Element)>) -> TriPoly {
        let mut out = TriPoly::zero(ctx);
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    /// Total degree of every term when homogeneous; `None` otherwise.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut deg = None;
        for (i, j, k) in self.terms.keys() {
            let d = i + j + k;
            match deg {
                None => deg = Some(d),
                Some(d0) if d0 != d => return None,
                _ => {}
            }
        }
        deg
    }

    pub fn eval(&self, p: &[Element; 3]) -> Element {
        let max = self
            .terms
            .keys()
            .fold((0, 0, 0), |m, &(i, j, k)| (m.0.max(i), m.1.max(j), m.2.max(k)));
        let pw = |x: &Element, n: u32| -> Vec<Element> {
            let mut v = Vec::with_capacity(n as usize + 1);
            let mut cur = self.ctx.one();
            for _ in 0..=n {
                v.push(cur.clone());
                cur = &cur * x;
            }
            v
        };
        let (px, py, pz) = (pw(&p[0], max.0), pw(&p[1], max.1), pw(&p[2], max.2));
        let mut acc = self.ctx.zero();
        for (&(i, j, k), c) in &self.terms {
            acc = &acc + &(&(&(c * &px[i as usize]) * &py[j as usize]) * &pz[k as usize]);
        }
        acc
    }

    pub fn mul(&self, other: &TriPoly) -> TriPoly {
        let mut out = TriPoly::zero(&self.ctx);
        for (&(a, b, c), x) in &self.terms {
            for (&(d, e, f), y) in &other.terms {
                out.add_term((a + d, b + e, c + f), x * y);
            }
        }
        out
    }

    pub fn scale(&self, s: &Element) -> TriPoly {
        let mut out = TriPoly::zero(&self.ctx);
        for (&e, c) in &self.terms {
            out.add_term(e, c * s);
        }
        out
    }

    /// Leading term in graded lexicographic order with X > Y > Z.
    pub fn leading_term(&self) -> Option<((u32, u32, u32), &Element)> {
        self.terms
            .iter()
            .max_by_key(|(&(i, j, k), _)| (i + j + k, i, j))
            .map(|(&e, c)| (e, c))
    }

    /// Scales so the graded-lex leading coefficient is 1.
    pub fn normalized(&self) -> TriPoly {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.inv()),
        }
    }

    /// True when the polynomials agree up to a nonzero scalar.
    pub fn proportional_to(&self, other: &TriPoly) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() == other.is_zero();
        }
        self.normalized() == other.normalized()
    }

    /// Coefficient-wise change of base field along an embedding, in either
    /// direction. Fails when a coefficient is not in the target field.
    pub fn rebase(&self, target: &FieldCtx) -> Result<TriPoly, PolyError> {
        if &self.ctx == target {
            return Ok(self.clone());
        }
        let mut out = TriPoly::zero(target);
        if target.k() % self.ctx.k() == 0 {
            let emb = gf::embedding(&self.ctx, target)?;
            for (&e, c) in &self.terms {
                out.add_term(e, emb.embed(c));
            }
        } else {
            let emb = gf::embedding(target, &self.ctx)?;
            for (&e, c) in &self.terms {
                let down = emb.section(c).ok_or_else(|| {
                    PolyError::CoefficientOutsideSubfield(format!("{c:?}"))
                })?;
                out.add_term(e, down);
            }
        }
        Ok(out)
    }
}

/// The symmetric product s(X,Y,Z) = Π_{β^d=1} (βX + β^qY + Z), expanded in
/// `big` and returned over 𝔽_{q²}. Every coefficient is checked to be fixed
/// by x ↦ x^{q²}.
pub fn s_poly(q: u64, d: u64, big: &FieldCtx) -> Result<TriPoly, PolyError> {
    let m = q * q - q + 1;
    if d < 3 || m % d != 0 {
        return Err(PolyError::BadDivisor { d, m });
    }
    let beta = gf::root_of_unity(big, d)?;
    let mut prod = TriPoly::from_terms(big, vec![((0, 0, 0), big.one())]);
    let mut b = big.one();
    for _ in 0..d {
        let factor = TriPoly::from_terms(
            big,
            vec![
                ((1, 0, 0), b.clone()),
                ((0, 1, 0), b.pow(q as u128)),
                ((0, 0, 1), big.one()),
            ],
        );
        prod = prod.mul(&factor);
        b = &b * &beta;
    }
    // Coefficients must live in F_{q^2}.
    for c in prod.terms.values() {
        if &c.pow((q * q) as u128) != c {
            return Err(PolyError::CoefficientOutsideSubfield(format!("{c:?}")));
        }
    }
    let t = total_degree_of_q(big.p(), q);
    let fq2 = gf::make_field(big.p(), 2 * t)?;
    prod.rebase(&fq2)
}

fn total_degree_of_q(p: u64, q: u64) -> usize {
    let mut t = 0;
    let mut v = q;
    while v > 1 {
        v /= p;
        t += 1;
    }
    t
}

/// Applies the substitution of the degree-d quotient model: each stored term
/// c·X₁^i X₂^{j-i} X₃^{d-j} becomes c·X^{(qi+d-j)/d} Y^{(j-i+q(d-j))/d}. The
/// congruence j ≡ qi (mod d) guarantees integral exponents.
pub fn s_substitute(s: &TriPoly, q: u64, d: u64) -> Result<TriPoly, PolyError> {
    let mut out = TriPoly::zero(s.ctx());
    for (&(e1, e2, e3), c) in s.terms() {
        let i = e1 as u64;
        let j = i + e2 as u64;
        debug_assert_eq!(e3 as u64, d - j, "input must be homogeneous of degree d");
        let xnum = q * i + d - j;
        let ynum = (j - i) + q * (d - j);
        if xnum % d != 0 || ynum % d != 0 || j % d != (q * i) % d {
            return Err(PolyError::NonIntegralExponent {
                i: e1,
                j: j as u32,
            });
        }
        out.add_term(((xnum / d) as u32, (ynum / d) as u32, 0), c.clone());
    }
    Ok(out)
}

/// F ∘ M for a 3x3 matrix M of elements: substitutes each variable by the
/// corresponding row linear form and expands.
pub fn substitute_map(f: &TriPoly, m: &[[Element; 3]; 3]) -> Result<TriPoly, PolyError> {
    if det3(m).is_zero() {
        return Err(PolyError::SingularMatrix);
    }
    let ctx = f.ctx();
    let linear = |row: &[Element; 3]| {
        TriPoly::from_terms(
            ctx,
            vec![
                ((1, 0, 0), row[0].clone()),
                ((0, 1, 0), row[1].clone()),
                ((0, 0, 1), row[2].clone()),
            ],
        )
    };
    let forms = [linear(&m[0]), linear(&m[1]), linear(&m[2])];
    // Cache powers of each linear form up to the needed exponent.
    let max = f
        .terms()
        .keys()
        .fold((0, 0, 0), |mx, &(i, j, k)| (mx.0.max(i), mx.1.max(j), mx.2.max(k)));
    let powers = |form: &TriPoly, n: u32| -> Vec<TriPoly> {
        let mut v = vec![TriPoly::from_terms(ctx, vec![((0, 0, 0), ctx.one())])];
        for e in 1..=n as usize {
            v.push(v[e - 1].mul(form));
        }
        v
    };
    let px = powers(&forms[0], max.0);
    let py = powers(&forms[1], max.1);
    let pz = powers(&forms[2], max.2);
    let mut out = TriPoly::zero(ctx);
    for (&(i, j, k), c) in f.terms() {
        let term = px[i as usize].mul(&py[j as usize]).mul(&pz[k as usize]);
        for (&e, tc) in term.terms() {
            out.add_term(e, tc * c);
        }
    }
    Ok(out)
}

pub fn det3(m: &[[Element; 3]; 3]) -> Element {
    let a = &m[0];
    let b = &m[1];
    let c = &m[2];
    let t1 = &a[0] * &(&(&b[1] * &c[2]) - &(&b[2] * &c[1]));
    let t2 = &a[1] * &(&(&b[0] * &c[2]) - &(&b[2] * &c[0]));
    let t3 = &a[2] * &(&(&b[0] * &c[1]) - &(&b[1] * &c[0]));
    &(&t1 - &t2) + &t3
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn roots_scan_examples() {
        let f9 = make_field(3, 2).unwrap();
        let t = f9.gen();
        // X^2 + 1 over F9: roots t and -t.
        let f = UniPoly::new(&f9, vec![f9.one(), f9.zero(), f9.one()]);
        let roots = roots_scan(&f).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.contains(&t) && roots.contains(&(-t)));
        assert_eq!(f.roots().unwrap().len(), 2);
        // X^2 + 1 over F3: no roots.
        let f3 = make_field(3, 1).unwrap();
        let g = UniPoly::new(&f3, vec![f3.one(), f3.zero(), f3.one()]);
        assert!(roots_scan(&g).unwrap().is_empty());
        // X^q - X over F_{q^2} has exactly the q subfield elements as roots.
        let q = 3u64;
        let mut coeffs = vec![f9.zero(); 4];
        coeffs[1] = -f9.one();
        coeffs[3] = f9.one();
        let h = UniPoly::new(&f9, coeffs);
        let roots = roots_scan(&h).unwrap();
        assert_eq!(roots.len() as u64, q);
        for r in &roots {
            assert_eq!(r.frobenius(1), r.clone());
        }
    }

    #[test]
    fn linearized_examples() {
        let f9 = make_field(3, 2).unwrap();
        // L(y) = y^3 + y.
        let l = LinearizedMap::from_additive(&f9, &[(f9.one(), 1), (f9.one(), 0)]);
        let sols = l.solve(&f9.one());
        let expect: Vec<_> = [[2, 0], [2, 1], [2, 2]]
            .iter()
            .map(|c| f9.from_coeffs(c))
            .collect();
        assert_eq!(sols, expect);
        assert!(l.solve(&f9.gen()).is_empty());
        let id = LinearizedMap::from_additive(&f9, &[(f9.one(), 0)]);
        let c = f9.from_coeffs(&[1, 2]);
        assert_eq!(id.solve(&c), vec![c.clone()]);
    }

    #[test]
    fn linearized_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, k) in [(2u64, 6usize), (3, 4), (5, 3)] {
            let f = make_field(p, k).unwrap();
            let terms = [
                (f.from_code(rng.gen_range(1..f.cardinality())), 1usize),
                (f.from_code(rng.gen_range(0..f.cardinality())), 0usize),
            ];
            let l = LinearizedMap::from_additive(&f, &terms);
            for _ in 0..5 {
                let c = f.from_code(rng.gen_range(0..f.cardinality()));
                let mut brute: Vec<Element> = f
                    .elements_lex()
                    .filter(|y| l.apply(y) == c)
                    .collect();
                brute.sort();
                assert_eq!(l.solve(&c), brute);
                let mut pre: Vec<Element> = l
                    .presolve()
                    .all_solutions(c.coeffs())
                    .iter()
                    .map(|v| f.from_coeffs(v))
                    .collect();
                pre.sort();
                assert_eq!(pre, brute);
            }
        }
    }

    #[test]
    fn s_poly_remark_identity() {
        // q = 5 (q = 2 mod 3), d = 3: X^3 + Y^3 + Z^3 - 3XYZ.
        let big = make_field(5, 6).unwrap();
        let s = s_poly(5, 3, &big).unwrap();
        let f25 = make_field(5, 2).unwrap();
        let expect = TriPoly::from_terms(
            &f25,
            vec![
                ((3, 0, 0), f25.one()),
                ((0, 3, 0), f25.one()),
                ((0, 0, 3), f25.one()),
                ((1, 1, 1), f25.from_int(-3)),
            ],
        );
        assert_eq!(s, expect);
        // Cyclic symmetry s(X,Y,Z) = s(Y,Z,X).
        let rotated = TriPoly::from_terms(
            &f25,
            s.terms()
                .iter()
                .map(|(&(i, j, k), c)| ((j, k, i), c.clone()))
                .collect(),
        );
        assert_eq!(s, rotated);
    }

    #[test]
    fn s_poly_agrees_with_direct_product() {
        let big = make_field(3, 6).unwrap();
        let s = s_poly(3, 7, &big).unwrap();
        let s_big = s.rebase(&big).unwrap();
        let beta = gf::root_of_unity(&big, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p = [
                big.from_code(rng.gen_range(0..big.cardinality())),
                big.from_code(rng.gen_range(0..big.cardinality())),
                big.from_code(rng.gen_range(0..big.cardinality())),
            ];
            let mut prod = big.one();
            let mut b = big.one();
            for _ in 0..7 {
                let lin = &(&(&b * &p[0]) + &(&b.pow(3) * &p[1])) + &p[2];
                prod = &prod * &lin;
                b = &b * &beta;
            }
            assert_eq!(s_big.eval(&p), prod);
        }
    }

    #[test]
    fn s_substitute_examples() {
        // d = 3, q = 5: f = x^5 + y + x y^5 - 3 (xy)^2 with -3 = 2 mod 5.
        let big = make_field(5, 6).unwrap();
        let s = s_poly(5, 3, &big).unwrap();
        let f = s_substitute(&s, 5, 3).unwrap();
        let f25 = make_field(5, 2).unwrap();
        let expect = TriPoly::from_terms(
            &f25,
            vec![
                ((5, 0, 0), f25.one()),
                ((0, 1, 0), f25.one()),
                ((1, 5, 0), f25.one()),
                ((2, 2, 0), f25.from_int(2)),
            ],
        );
        assert_eq!(f, expect);
        // The congruence holds for every stored term of these instances.
        for (q, d, pk) in [(3u64, 7u64, (3u64, 6usize)), (5, 3, (5, 6)), (4, 13, (2, 12))] {
            let big = make_field(pk.0, pk.1).unwrap();
            let s = s_poly(q, d, &big).unwrap();
            assert!(s_substitute(&s, q, d).is_ok());
        }
    }

    #[test]
    fn substitute_map_properties() {
        let f9 = make_field(3, 2).unwrap();
        // EQ11 for q = 3: Y^3 Z + Y Z^3 - X^4.
        let eq11 = TriPoly::from_terms(
            &f9,
            vec![
                ((0, 3, 1), f9.one()),
                ((0, 1, 3), f9.one()),
                ((4, 0, 0), f9.from_int(-1)),
            ],
        );
        let id = [
            [f9.one(), f9.zero(), f9.zero()],
            [f9.zero(), f9.one(), f9.zero()],
            [f9.zero(), f9.zero(), f9.one()],
        ];
        assert_eq!(substitute_map(&eq11, &id).unwrap(), eq11);
        // Swapping X and Y fixes M1.
        let m1 = TriPoly::from_terms(
            &f9,
            vec![
                ((4, 0, 0), f9.one()),
                ((0, 4, 0), f9.one()),
                ((0, 0, 4), f9.one()),
            ],
        );
        let swap = [
            [f9.zero(), f9.one(), f9.zero()],
            [f9.one(), f9.zero(), f9.zero()],
            [f9.zero(), f9.zero(), f9.one()],
        ];
        assert_eq!(substitute_map(&m1, &swap).unwrap(), m1);
        // Right action: F o (MN) = (F o M) o N.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut rand_mat = || loop {
            let m: [[Element; 3]; 3] = std::array::from_fn(|_| {
                std::array::from_fn(|_| f9.from_code(rng.gen_range(0..9)))
            });
            if !det3(&m).is_zero() {
                return m;
            }
        };
        for _ in 0..20 {
            let m = rand_mat();
            let n = rand_mat();
            let mn: [[Element; 3]; 3] = std::array::from_fn(|r| {
                std::array::from_fn(|c| {
                    let mut acc = f9.zero();
                    for l in 0..3 {
                        acc = &acc + &(&m[r][l] * &n[l][c]);
                    }
                    acc
                })
            });
            let lhs = substitute_map(&eq11, &mn).unwrap();
            let rhs = substitute_map(&substitute_map(&eq11, &m).unwrap(), &n).unwrap();
            assert_eq!(lhs, rhs);
        }
        // Singular matrix is rejected.
        let sing = [
            [f9.one(), f9.one(), f9.zero()],
            [f9.one(), f9.one(), f9.zero()],
            [f9.zero(), f9.zero(), f9.one()],
        ];
        assert!(matches!(
            substitute_map(&eq11, &sing),
            Err(PolyError::SingularMatrix)
        ));
    }
}
