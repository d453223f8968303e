//! The free algebra `F_p<z_{e,k}>` and the generalized Adem relations.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modp::{binom_ext_wide, Fp, PrimeContext};

/// A generator `z_{eps,k}`.
///
/// Ordering is by `eps` first, then `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub eps: u8,
    pub k: i64,
}

impl Letter {
    pub fn new(eps: i64, k: i128, ctx: &PrimeContext) -> Result<Self> {
        if eps != 0 && eps != 1 {
            return Err(Error::BadEpsilon(eps));
        }
        Ok(Letter {
            eps: eps as u8,
            k: ctx.check_index(k)?,
        })
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z({},{})", self.eps, self.k)
    }
}

/// A monic monomial. The empty word is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn is_admissible(&self, ctx: &PrimeContext) -> bool {
        is_admissible(self, ctx)
    }

    pub fn internal_degree(&self, ctx: &PrimeContext) -> i128 {
        internal_degree(self, ctx)
    }
}

/// Shorter words first, then letterwise by `(eps, k)`.
pub fn canonical_compare(a: &Word, b: &Word) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.0.cmp(&b.0))
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        canonical_compare(self, other)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Whether the adjacent pair `a b` satisfies `a.k >= p b.k + b.eps`.
#[inline]
pub fn pair_admissible(a: &Letter, b: &Letter, ctx: &PrimeContext) -> bool {
    a.k as i128 >= ctx.p() as i128 * b.k as i128 + b.eps as i128
}

pub fn is_admissible(w: &Word, ctx: &PrimeContext) -> bool {
    w.0.windows(2)
        .all(|ab| pair_admissible(&ab[0], &ab[1], ctx))
}

/// `sum_h 2 k_h (p-1) + eps_h`.
pub fn internal_degree(w: &Word, ctx: &PrimeContext) -> i128 {
    let p1 = ctx.p() as i128 - 1;
    w.0.iter()
        .map(|l| 2 * l.k as i128 * p1 + l.eps as i128)
        .sum()
}

/// A finite `F_p`-combination of words with no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    p: u32,
    terms: BTreeMap<Word, Fp>,
}

impl Poly {
    pub fn zero(ctx: &PrimeContext) -> Self {
        Poly {
            p: ctx.p(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &PrimeContext) -> Self {
        Self::monomial(1, Word::empty(), ctx)
    }

    pub fn monomial(coef: Fp, word: Word, ctx: &PrimeContext) -> Self {
        let mut poly = Self::zero(ctx);
        poly.add_term(word, coef % ctx.p(), ctx);
        poly
    }

    pub fn from_word(word: Word, ctx: &PrimeContext) -> Self {
        Self::monomial(1, word, ctx)
    }

    pub fn from_letters(letters: &[Letter], ctx: &PrimeContext) -> Self {
        Self::from_word(Word(letters.to_vec()), ctx)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical word order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, Fp)> + '_ {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> + '_ {
        self.terms.keys()
    }

    pub fn coeff(&self, w: &Word) -> Fp {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn into_terms(self) -> BTreeMap<Word, Fp> {
        self.terms
    }

    /// Adds `coef * word` in place.
    pub fn add_term(&mut self, word: Word, coef: Fp, ctx: &PrimeContext) {
        debug_assert_eq!(self.p, ctx.p());
        if coef == 0 {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let c = ctx.add(*e.get(), coef);
                if c == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = c;
                }
            }
        }
    }

    fn same_prime(&self, other: &Poly) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly, ctx: &PrimeContext) -> Result<Poly> {
        self.same_prime(other)?;
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c, ctx);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Poly, ctx: &PrimeContext) -> Result<Poly> {
        self.add(&other.scale(ctx.neg(1), ctx), ctx)
    }

    pub fn scale(&self, c: Fp, ctx: &PrimeContext) -> Poly {
        let c = c % ctx.p();
        if c == 0 {
            return Poly::zero(ctx);
        }
        Poly {
            p: self.p,
            terms: self
                .terms
                .iter()
                .map(|(w, &x)| (w.clone(), ctx.mul(x, c)))
                .collect(),
        }
    }

    pub fn neg(&self, ctx: &PrimeContext) -> Poly {
        self.scale(ctx.neg(1), ctx)
    }

    /// Product in the free algebra: pairwise concatenation, no reduction.
    pub fn mul(&self, other: &Poly, ctx: &PrimeContext) -> Result<Poly> {
        self.same_prime(other)?;
        let mut out = Poly::zero(ctx);
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                out.add_term(a.concat(b), ctx.mul(x, y), ctx);
            }
        }
        Ok(out)
    }

    /// The common length of all terms; `None` for the zero polynomial.
    pub fn length(&self) -> Result<Option<usize>> {
        common(self.words().map(Word::len)).map_err(|_| Error::Inhomogeneous)
    }

    /// The common internal degree of all terms; `None` for zero or when
    /// the terms disagree.
    pub fn internal_degree(&self, ctx: &PrimeContext) -> Option<i128> {
        common(self.words().map(|w| internal_degree(w, ctx)))
            .ok()
            .flatten()
    }

    pub fn is_admissible(&self, ctx: &PrimeContext) -> bool {
        self.words().all(|w| is_admissible(w, ctx))
    }
}

fn common<T: PartialEq>(mut it: impl Iterator<Item = T>) -> std::result::Result<Option<T>, ()> {
    let Some(first) = it.next() else {
        return Ok(None);
    };
    for x in it {
        if x != first {
            return Err(());
        }
    }
    Ok(Some(first))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match (c, w.is_empty()) {
                (c, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{w}")?,
                (c, false) => write!(f, "{c}*{w}")?,
            }
        }
        Ok(())
    }
}

/// Length of a word.
pub fn word_length(w: &Word) -> usize {
    w.len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    R,
    S,
}

/// One generalized Adem relation `R(eps,k,n)` or `S(eps,k,n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationId {
    pub family: Family,
    pub eps: u8,
    pub k: i64,
    pub n: i64,
}

impl RelationId {
    pub fn r(eps: u8, k: i64, n: i64) -> Self {
        RelationId {
            family: Family::R,
            eps,
            k,
            n,
        }
    }

    pub fn s(eps: u8, k: i64, n: i64) -> Self {
        RelationId {
            family: Family::S,
            eps,
            k,
            n,
        }
    }

    pub fn poly(&self, ctx: &PrimeContext) -> Result<Poly> {
        match self.family {
            Family::R => relation_r(self.eps as i64, self.k, self.n, ctx),
            Family::S => relation_s(self.eps as i64, self.k, self.n, ctx),
        }
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            Family::R => "R",
            Family::S => "S",
        };
        write!(f, "{fam}({},{},{})", self.eps, self.k, self.n)
    }
}

fn pair(e1: i64, k1: i128, e2: i64, k2: i128, ctx: &PrimeContext) -> Result<Word> {
    Ok(Word(vec![
        Letter::new(e1, k1, ctx)?,
        Letter::new(e2, k2, ctx)?,
    ]))
}

fn check_params(eps: i64, n: i64) -> Result<()> {
    if eps != 0 && eps != 1 {
        return Err(Error::BadEpsilon(eps));
    }
    if n < 0 {
        return Err(Error::NegativeN(n));
    }
    Ok(())
}

/// Adds `sum_j sign(j) C(top(j), j) * word(j)` over every `j >= 0` with a
/// nonzero binomial. The top decreases in `j`, so the loop stops once
/// `j > top(j)`.
fn add_binomial_sum(
    out: &mut Poly,
    ctx: &PrimeContext,
    sign_offset: i64,
    top: impl Fn(i128) -> i128,
    word: impl Fn(i128) -> Result<Word>,
) -> Result<()> {
    let mut j: i128 = 0;
    while j <= top(j) {
        let c = binom_ext_wide(top(j), j, ctx);
        if c != 0 {
            let c = ctx.mul(c, ctx.sign((j % 2) as i64 + sign_offset));
            out.add_term(word(j)?, c, ctx);
        }
        j += 1;
    }
    Ok(())
}

/// `R(eps,k,n) = z_{eps,pk-1-n} z_{0,k}
///   + sum_j (-1)^j C((p-1)(n-j)-1, j) z_{eps,pk-1-j} z_{0,k-n+j}`.
pub fn relation_r(eps: i64, k: i64, n: i64, ctx: &PrimeContext) -> Result<Poly> {
    check_params(eps, n)?;
    let (p, k, n) = (ctx.p() as i128, k as i128, n as i128);
    let mut out = Poly::from_word(pair(eps, p * k - 1 - n, 0, k, ctx)?, ctx);
    add_binomial_sum(
        &mut out,
        ctx,
        0,
        |j| (p - 1) * (n - j) - 1,
        |j| pair(eps, p * k - 1 - j, 0, k - n + j, ctx),
    )?;
    Ok(out)
}

/// `S(eps,k,n) = z_{eps,pk-n} z_{1,k}
///   + sum_j (-1)^{j+1} C((p-1)(n-j)-1, j) z_{eps,pk-j} z_{1,k-n+j}
///   + (1-eps) sum_j (-1)^{j+1} C((p-1)(n-j), j) z_{1,pk-j} z_{0,k-n+j}`.
pub fn relation_s(eps: i64, k: i64, n: i64, ctx: &PrimeContext) -> Result<Poly> {
    check_params(eps, n)?;
    let (p, k, n) = (ctx.p() as i128, k as i128, n as i128);
    let mut out = Poly::from_word(pair(eps, p * k - n, 1, k, ctx)?, ctx);
    add_binomial_sum(
        &mut out,
        ctx,
        1,
        |j| (p - 1) * (n - j) - 1,
        |j| pair(eps, p * k - j, 1, k - n + j, ctx),
    )?;
    if eps == 0 {
        add_binomial_sum(
            &mut out,
            ctx,
            1,
            |j| (p - 1) * (n - j),
            |j| pair(1, p * k - j, 0, k - n + j, ctx),
        )?;
    }
    Ok(out)
}

/// Every relation in which the length-2 word `w` has a nonzero coefficient.
///
/// Candidates come from solving the index equations of each term family;
/// each candidate is then confirmed against the generated polynomial.
pub fn relations_containing(w: &Word, ctx: &PrimeContext) -> Result<Vec<RelationId>> {
    if w.len() != 2 {
        return Err(Error::WrongLength(w.len()));
    }
    let (x, y) = (w.0[0], w.0[1]);
    let p = ctx.p() as i128;
    let (a, c) = (x.k as i128, y.k as i128);
    let mut out = Vec::new();
    let mut push = |family: Family, eps: u8, k: i128, n: i128| {
        if n < 0 {
            return;
        }
        if let (Ok(k), Ok(n)) = (i64::try_from(k), i64::try_from(n)) {
            out.push(RelationId { family, eps, k, n });
        }
    };

    // Leading terms: z_{e,pk-1-n} z_{0,k} and z_{e,pk-n} z_{1,k}.
    match y.eps {
        0 => push(Family::R, x.eps, c, p * c - 1 - a),
        _ => push(Family::S, x.eps, c, p * c - a),
    }

    // Summands. Matching the first letter fixes j = pk - a - shift and the
    // second fixes n = (p+1)k - a - c - shift, so n - j = k - c. The binomial
    // C((p-1)(k-c) - top_shift, j) is nonzero only for j >= 0 and
    // j <= (p-1)(k-c) - top_shift, which bounds k on both sides.
    let mut summands = |family: Family, eps: u8, shift: i128, top_shift: i128| {
        let lo = div_ceil(a + shift, p);
        let hi = a + shift - (p - 1) * c - top_shift;
        for k in lo..=hi {
            let j = p * k - a - shift;
            let top = (p - 1) * (k - c) - top_shift;
            if binom_ext_wide(top, j, ctx) != 0 {
                push(family, eps, k, (p + 1) * k - a - c - shift);
            }
        }
    };
    match (x.eps, y.eps) {
        (e, 0) => {
            // R(e,k,n): z_{e,pk-1-j} z_{0,k-n+j}
            summands(Family::R, e, 1, 1);
            if e == 1 {
                // last sum of S(0,k,n): z_{1,pk-j} z_{0,k-n+j}
                summands(Family::S, 0, 0, 0);
            }
        }
        // first sum of S(e,k,n): z_{e,pk-j} z_{1,k-n+j}
        (e, _) => summands(Family::S, e, 0, 1),
    }

    out.sort();
    out.dedup();
    Ok(out)
}

fn div_ceil(a: i128, b: i128) -> i128 {
    let q = a.div_euclid(b);
    if a.rem_euclid(b) == 0 {
        q
    } else {
        q + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modp::validate_prime;

    fn ctx(p: i64) -> PrimeContext {
        validate_prime(p).unwrap()
    }

    fn l(eps: u8, k: i64) -> Letter {
        Letter { eps, k }
    }

    fn w(ls: &[(u8, i64)]) -> Word {
        Word(ls.iter().map(|&(e, k)| l(e, k)).collect())
    }

    fn poly(terms: &[(Fp, &[(u8, i64)])], c: &PrimeContext) -> Poly {
        let mut out = Poly::zero(c);
        for &(coef, ls) in terms {
            out.add_term(w(ls), coef, c);
        }
        out
    }

    #[test]
    fn admissibility() {
        let c = ctx(3);
        assert!(!is_admissible(&w(&[(0, -1), (0, 0)]), &c));
        assert!(is_admissible(&w(&[(1, -1), (1, -1)]), &c));
        assert!(is_admissible(&Word::empty(), &c));
        assert!(is_admissible(&w(&[(1, 7)]), &c));
    }

    #[test]
    fn lengths_and_degrees() {
        let c = ctx(3);
        assert_eq!(w(&[(0, 5), (0, -1)]).len(), 2);
        assert_eq!(word_length(&Word::empty()), 0);
        let inhom = poly(&[(1, &[(0, 1)]), (1, &[(0, 2), (0, 0)])], &c);
        assert_eq!(inhom.length(), Err(Error::Inhomogeneous));
        assert_eq!(Poly::zero(&c).length(), Ok(None));
        assert_eq!(internal_degree(&w(&[(1, 0)]), &c), 1);
        assert_eq!(internal_degree(&w(&[(0, 2), (0, 2)]), &c), 16);
        assert_eq!(internal_degree(&Word::empty(), &c), 0);
    }

    #[test]
    fn ring_operations() {
        let c = ctx(3);
        let x = poly(&[(1, &[(0, 1)])], &c);
        let y = poly(&[(2, &[(0, 1)])], &c);
        assert!(x.add(&y, &c).unwrap().is_zero());
        let a = poly(&[(1, &[(1, 0)])], &c);
        let b = poly(&[(1, &[(0, 2)])], &c);
        assert_eq!(a.mul(&b, &c).unwrap(), poly(&[(1, &[(1, 0), (0, 2)])], &c));
        assert!(a.scale(0, &c).is_zero());
        let other = Poly::zero(&ctx(5));
        assert_eq!(a.add(&other, &c), Err(Error::PrimeMismatch(3, 5)));
    }

    #[test]
    fn letters_reject_bad_input() {
        let c = ctx(3).with_index_bound(10).unwrap();
        assert_eq!(Letter::new(2, 0, &c), Err(Error::BadEpsilon(2)));
        assert!(matches!(
            Letter::new(0, 11, &c),
            Err(Error::IndexOverflow(_))
        ));
        assert!(Letter::new(0, -10, &c).is_ok());
    }

    #[test]
    fn relation_r_values() {
        let c = ctx(3);
        assert_eq!(
            relation_r(0, 0, 0, &c).unwrap(),
            poly(&[(1, &[(0, -1), (0, 0)])], &c)
        );
        assert_eq!(
            relation_r(0, 0, 2, &c).unwrap(),
            poly(
                &[
                    (1, &[(0, -3), (0, 0)]),
                    (1, &[(0, -1), (0, -2)]),
                    (2, &[(0, -2), (0, -1)]),
                ],
                &c
            )
        );
        assert_eq!(
            relation_r(0, 2, 3, &c).unwrap(),
            poly(&[(1, &[(0, 2), (0, 2)]), (1, &[(0, 5), (0, -1)])], &c)
        );
        assert_eq!(relation_r(0, 0, -1, &c), Err(Error::NegativeN(-1)));
    }

    #[test]
    fn relation_s_values() {
        let c = ctx(3);
        assert_eq!(
            relation_s(1, 0, 0, &c).unwrap(),
            poly(&[(1, &[(1, 0), (1, 0)])], &c)
        );
        assert_eq!(
            relation_s(0, 1, 0, &c).unwrap(),
            poly(&[(1, &[(0, 3), (1, 1)]), (2, &[(1, 3), (0, 1)])], &c)
        );
        assert_eq!(
            relation_s(1, 1, 1, &c).unwrap(),
            poly(&[(1, &[(1, 2), (1, 1)]), (2, &[(1, 3), (1, 0)])], &c)
        );
        assert_eq!(relation_s(1, 0, -3, &c), Err(Error::NegativeN(-3)));
    }

    #[test]
    fn relation_overflow() {
        let c = ctx(3).with_index_bound(100).unwrap();
        assert!(matches!(
            relation_r(0, 50, 0, &c),
            Err(Error::IndexOverflow(_))
        ));
    }

    #[test]
    fn containing_examples() {
        let c = ctx(3);
        assert_eq!(
            relations_containing(&w(&[(0, -3), (0, 0)]), &c).unwrap(),
            vec![RelationId::r(0, 0, 2)]
        );
        assert_eq!(
            relations_containing(&w(&[(1, 0), (1, 0)]), &c).unwrap(),
            vec![RelationId::s(1, 0, 0)]
        );
        assert!(relations_containing(&w(&[(0, 5), (0, 2)]), &c)
            .unwrap()
            .contains(&RelationId::r(0, 2, 0)));
        assert_eq!(
            relations_containing(&w(&[(0, 5)]), &c),
            Err(Error::WrongLength(1))
        );
    }

    #[test]
    fn canonical_order() {
        assert_eq!(
            canonical_compare(&w(&[(0, 1)]), &w(&[(0, 1), (0, 0)])),
            Ordering::Less
        );
        assert_eq!(
            canonical_compare(&w(&[(0, 5)]), &w(&[(1, -9)])),
            Ordering::Less
        );
        assert_eq!(
            canonical_compare(&w(&[(0, 2)]), &w(&[(0, 2)])),
            Ordering::Equal
        );
    }

    #[test]
    fn display() {
        let c = ctx(3);
        assert_eq!(Poly::zero(&c).to_string(), "0");
        assert_eq!(Poly::monomial(2, Word::empty(), &c).to_string(), "2");
        assert_eq!(
            relation_r(0, 0, 0, &c).unwrap().to_string(),
            "z(0,-1)*z(0,0)"
        );
        assert_eq!(RelationId::r(0, 0, 2).to_string(), "R(0,0,2)");
    }
}
