//! Numerical semigroups: generated semigroups, gap counts, the explicit
//! interval-union semigroup attached to the Hermitian curve, and the
//! divide-by-d member filter.
//!
//! A numerical semigroup is a cofinite subset of ℕ containing 0 and closed
//! under addition. It is stored as the sorted members up to the conductor
//! (the least c with [c, ∞) ⊆ S) plus the implicit tail; the genus is the
//! number of gaps. Every constructor re-verifies additive closure
//! exhaustively up to twice the conductor, which is where any violation must
//! first appear.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SemiError {
    #[error("generators must be positive with gcd 1")]
    NotCoprime,
    #[error("generator set must be nonempty and positive")]
    EmptyGenerators,
    #[error("set is not closed under addition: {a} + {b} missing")]
    ClosureViolation { a: u64, b: u64 },
    #[error("q = {0} is out of range (need q >= 3)")]
    BadQ(u64),
}

/// A numerical semigroup, materialized to its conductor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumSemigroup {
    elements: Vec<u64>,
    conductor: u64,
    genus: u64,
    generators: Option<Vec<u64>>,
}

impl NumSemigroup {
    /// Members in [0, conductor], sorted.
    pub fn elements(&self) -> &[u64] {
        &self.elements
    }
    pub fn conductor(&self) -> u64 {
        self.conductor
    }
    pub fn genus(&self) -> u64 {
        self.genus
    }
    /// The minimal generating set, computed canonically.
    pub fn generators(&self) -> Option<&[u64]> {
        self.generators.as_deref()
    }
    pub fn contains(&self, n: u64) -> bool {
        n >= self.conductor || self.elements.binary_search(&n).is_ok()
    }
    /// All gaps (positive integers outside the semigroup), sorted.
    pub fn gaps(&self) -> Vec<u64> {
        (1..self.conductor).filter(|&n| !self.contains(n)).collect()
    }
    /// The i-th smallest positive member (i >= 1).
    pub fn nongap(&self, i: usize) -> u64 {
        assert!(i >= 1, "non-gap index starts at 1");
        let pos = &self.elements[1..];
        if i <= pos.len() {
            pos[i - 1]
        } else {
            // pos ends at the conductor; the tail continues in steps of 1
            self.conductor + (i - pos.len()) as u64
        }
    }
}

/// Builds a semigroup from a membership table for [0, member.len()), under
/// the caller's guarantee that everything at or beyond the table is a member.
/// Verifies additive closure up to twice the conductor and computes the
/// minimal generating set.
fn from_membership(member: &[bool]) -> Result<NumSemigroup, SemiError> {
    debug_assert!(member.first() == Some(&true), "0 must be a member");
    let conductor = member
        .iter()
        .rposition(|&m| !m)
        .map_or(0, |gap| gap as u64 + 1);
    let table_len = (2 * conductor + 2) as usize;
    let mut table = vec![true; table_len];
    for n in 0..table_len.min(member.len()) {
        table[n] = member[n];
    }
    let elements: Vec<u64> = (0..=conductor).filter(|&n| table[n as usize]).collect();
    for (i, &a) in elements.iter().enumerate().skip(1) {
        for &b in &elements[1..=i] {
            if !table[(a + b) as usize] {
                return Err(SemiError::ClosureViolation { a, b });
            }
        }
    }
    let genus = conductor - (elements.len() as u64 - 1);
    // e is a minimal generator iff it is not a sum of two positive members;
    // all minimal generators lie below conductor + m1.
    let generators = if elements.len() > 1 {
        let m1 = elements[1];
        let gens: Vec<u64> = (1..conductor + m1)
            .filter(|&e| {
                table[e as usize]
                    && !elements[1..]
                        .iter()
                        .take_while(|&&a| a < e)
                        .any(|&a| table[(e - a) as usize])
            })
            .collect();
        Some(gens)
    } else {
        // conductor 0: the full set ℕ, generated by 1
        Some(vec![1])
    };
    Ok(NumSemigroup {
        elements,
        conductor,
        genus,
        generators,
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The numerical semigroup generated by `gens` (positive, gcd 1).
pub fn from_generators(gens: &[u64]) -> Result<NumSemigroup, SemiError> {
    if gens.is_empty() || gens.contains(&0) {
        return Err(SemiError::EmptyGenerators);
    }
    if gens.iter().copied().reduce(gcd) != Some(1) {
        return Err(SemiError::NotCoprime);
    }
    let mut sorted = gens.to_vec();
    sorted.sort_unstable();
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    // the largest gap of any gcd-1 semigroup containing a and b is below ab
    let bound = (lo * hi + hi + 2) as usize;
    let mut member = vec![false; bound];
    member[0] = true;
    for n in 1..bound {
        member[n] = sorted
            .iter()
            .take_while(|&&g| g <= n as u64)
            .any(|&g| member[n - g as usize]);
    }
    from_membership(&member)
}

/// The explicit semigroup ⋃_{j=1}^{q-2} [jq−(j−1), jq] ∪ {0} ∪ [q²−2q+2, ∞).
#[allow(non_snake_case)]
pub fn semigroup_S(q: u64) -> Result<NumSemigroup, SemiError> {
    if q < 3 {
        return Err(SemiError::BadQ(q));
    }
    let tail = q * q - 2 * q + 2;
    let mut member = vec![false; (tail + 1) as usize];
    member[0] = true;
    member[tail as usize] = true;
    for j in 1..=q - 2 {
        for n in j * q - (j - 1)..=j * q {
            member[n as usize] = true;
        }
    }
    from_membership(&member)
}

/// {h/d : h ∈ S, d | h} — always a numerical semigroup.
pub fn filter_divide(s: &NumSemigroup, d: u64) -> NumSemigroup {
    assert!(d >= 1, "divisor must be positive");
    // beyond ⌈conductor/d⌉ every integer m has dm in the tail of S
    let tail = s.conductor().div_ceil(d);
    let mut member = vec![false; (tail + 1) as usize];
    for m in 0..=tail {
        member[m as usize] = s.contains(m * d);
    }
    from_membership(&member).expect("divide filter preserves closure")
}

/// The genus bounds and family values around the third-largest-genus search.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub q: u64,
    /// q(q−1)/2, the largest genus.
    pub g1: u64,
    /// ⌊(q−1)²/4⌋, the second largest genus.
    pub g2: u64,
    /// ⌊(q²−q+4)/6⌋, the third-largest-genus candidate.
    pub g3_candidate: u64,
    /// ⌈(q−1)(q−2)/6⌉, lower end of the search interval.
    pub interval_low: u64,
    /// q(q−2)/4 for even q: the even-q family attaining g2.
    pub even_family: Option<u64>,
    /// (q²−q−2)/6 for q ≡ 2 (mod 3): the degree-3 quotient family genus.
    pub filter_genus: Option<u64>,
    /// The open interval (interval_low, g2) contains an integer.
    pub interval_nonempty: bool,
    /// g3_candidate fails to sit strictly below g2 (small q).
    pub degenerate: bool,
}

/// Evaluates the genus bounds g₁, g₂ and the g₃ candidate for q ≥ 3, along
/// with the family values they are compared against.
pub fn genus_bound_checks(q: u64) -> Result<BoundReport, SemiError> {
    if q < 3 {
        return Err(SemiError::BadQ(q));
    }
    let g1 = q * (q - 1) / 2;
    let g2 = (q - 1) * (q - 1) / 4;
    let g3_candidate = (q * q - q + 4) / 6;
    let interval_low = ((q - 1) * (q - 2)).div_ceil(6);
    let even_family = (q % 2 == 0).then(|| q * (q - 2) / 4);
    let filter_genus = (q % 3 == 2).then(|| (q * q - q - 2) / 6);
    let report = BoundReport {
        q,
        g1,
        g2,
        g3_candidate,
        interval_low,
        even_family,
        filter_genus,
        interval_nonempty: g2 > interval_low + 1,
        degenerate: g3_candidate >= g2,
    };
    debug_assert!(report.g2 < report.g1);
    if let Some(fg) = report.filter_genus {
        debug_assert!(fg <= report.g3_candidate);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_examples() {
        let s = from_generators(&[5, 7, 8]).unwrap();
        assert_eq!(s.gaps(), vec![1, 2, 3, 4, 6, 9, 11]);
        assert_eq!(s.genus(), 7);
        assert_eq!(s.generators(), Some(&[5, 7, 8][..]));
        assert_eq!(s.nongap(1), 5);

        let s = from_generators(&[5, 6]).unwrap();
        assert_eq!(s.genus(), 10);
        assert_eq!(s.conductor(), 20);
        assert_eq!(s.nongap(2), 6);

        let s = from_generators(&[1]).unwrap();
        assert_eq!(s.genus(), 0);
        assert_eq!(s.conductor(), 0);
        assert_eq!(s.nongap(3), 3);

        assert!(matches!(
            from_generators(&[4, 6]),
            Err(SemiError::NotCoprime)
        ));
        assert!(from_generators(&[]).is_err());
        assert!(from_generators(&[0, 3]).is_err());
    }

    #[test]
    fn hermitian_tail_semigroup() {
        let s = semigroup_S(5).unwrap();
        assert_eq!(s.elements(), &[0, 5, 9, 10, 13, 14, 15, 17]);
        assert_eq!(s.conductor(), 17);
        assert_eq!(s.gaps(), vec![1, 2, 3, 4, 6, 7, 8, 11, 12, 16]);
        assert_eq!(s.genus(), 10);

        let s = semigroup_S(3).unwrap();
        assert_eq!(s.elements(), &[0, 3, 5]);
        assert_eq!(s.conductor(), 5);

        assert!(matches!(semigroup_S(2), Err(SemiError::BadQ(2))));
        // genus of S(q) always matches q(q-1)/2
        for q in [3u64, 4, 5, 7, 8, 9, 11, 13] {
            assert_eq!(semigroup_S(q).unwrap().genus(), q * (q - 1) / 2);
        }
    }

    #[test]
    fn filter_examples() {
        let s = semigroup_S(5).unwrap();
        let f = filter_divide(&s, 3);
        assert_eq!(f.elements(), &[0, 3, 5]);
        assert_eq!(f.genus(), 3);
        assert_eq!(f.nongap(1), 3);
        // d = 1 is the identity
        assert_eq!(filter_divide(&s, 1), s);
        // composition collapses to the product divisor when intermediate
        // sets are semigroups
        let f6 = filter_divide(&filter_divide(&s, 2), 3);
        assert_eq!(f6, filter_divide(&s, 6));
    }

    #[test]
    fn filtered_genus_family() {
        for q in [5u64, 8, 11, 17, 23] {
            assert_eq!(q % 3, 2);
            let f = filter_divide(&semigroup_S(q).unwrap(), 3);
            assert_eq!(f.genus(), (q * q - q - 2) / 6, "q = {q}");
            assert_eq!(f.nongap(1), (2 * q - 1) / 3, "q = {q}");
        }
    }

    #[test]
    fn filtered_tame_semigroup_family() {
        for q in [7u64, 13, 19] {
            assert_eq!(q % 3, 1);
            let f = filter_divide(&from_generators(&[q, q + 1]).unwrap(), 3);
            let gens = from_generators(&[(2 * q + 1) / 3, q, q + 1]).unwrap();
            assert_eq!(f, gens, "q = {q}");
            assert_eq!(f.genus(), (q * q - q) / 6, "q = {q}");
        }
    }

    #[test]
    fn two_generator_genus() {
        for q in 3u64..=64 {
            let s = from_generators(&[q, q + 1]).unwrap();
            assert_eq!(s.genus(), q * (q - 1) / 2, "q = {q}");
        }
    }

    #[test]
    fn bound_reports() {
        let r = genus_bound_checks(5).unwrap();
        assert_eq!((r.g1, r.g2, r.g3_candidate), (10, 4, 4));
        assert!(r.degenerate);
        let r = genus_bound_checks(11).unwrap();
        assert_eq!((r.g1, r.g2, r.g3_candidate), (55, 25, 19));
        assert_eq!(r.filter_genus, Some(18));
        assert!(r.interval_nonempty && !r.degenerate);
        let r = genus_bound_checks(8).unwrap();
        assert_eq!(r.g2, 12);
        assert_eq!(r.even_family, Some(12));
        assert!(genus_bound_checks(2).is_err());
    }
}
