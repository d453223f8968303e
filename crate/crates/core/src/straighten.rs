//! Reduction to the admissible basis.
//!
//! A non-admissible adjacent pair `a b` is always the leading word of exactly
//! one generalized Adem relation, whose other terms are admissible pairs. The
//! engine repeatedly replaces one such pair, in place, by the remaining terms
//! of that relation with their signs flipped, until every word is admissible.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use lru::LruCache;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    canonical_compare, is_admissible, pair_admissible, relation_r, relation_s, Letter, Poly, Word,
};
use crate::error::{Error, Result};
use crate::modp::{Fp, PrimeContext};

/// Which violating pair of a word gets rewritten next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Leftmost,
    Rightmost,
    SeededRandom(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReductionStats {
    pub steps: u64,
    pub peak_terms: usize,
    pub cache_hits: u64,
    pub fuel_left: u64,
}

/// Positions `j` where `w[j] w[j+1]` is not admissible.
pub fn violations(w: &Word, ctx: &PrimeContext) -> Vec<usize> {
    w.letters()
        .windows(2)
        .enumerate()
        .filter(|(_, ab)| !pair_admissible(&ab[0], &ab[1], ctx))
        .map(|(j, _)| j)
        .collect()
}

/// Stateful position chooser; the random variant draws from its own stream.
struct Selector {
    strategy: Strategy,
    rng: Option<ChaCha8Rng>,
}

impl Selector {
    fn new(strategy: Strategy) -> Self {
        let rng = match strategy {
            Strategy::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Selector { strategy, rng }
    }

    fn pick(&mut self, w: &Word, ctx: &PrimeContext) -> Option<usize> {
        let letters = w.letters();
        let bad = |j: &usize| !pair_admissible(&letters[*j], &letters[*j + 1], ctx);
        let n = letters.len().saturating_sub(1);
        match self.strategy {
            Strategy::Leftmost => (0..n).find(bad),
            Strategy::Rightmost => (0..n).rev().find(bad),
            Strategy::SeededRandom(_) => {
                let all = violations(w, ctx);
                if all.is_empty() {
                    return None;
                }
                let rng = self.rng.as_mut().expect("random selector has an rng");
                Some(all[rng.gen_range(0..all.len())])
            }
        }
    }
}

/// Position of a violating pair chosen by `strategy`, if any.
pub fn first_violation(w: &Word, strategy: Strategy, ctx: &PrimeContext) -> Option<usize> {
    Selector::new(strategy).pick(w, ctx)
}

type PairTerms = Arc<[(Letter, Letter, Fp)]>;

fn pair_terms(a: &Letter, b: &Letter, ctx: &PrimeContext) -> Result<PairTerms> {
    let poly = rewrite_pair(a, b, ctx)?;
    Ok(poly
        .terms()
        .map(|(w, c)| (w.letters()[0], w.letters()[1], c))
        .collect())
}

/// Expresses the non-admissible pair `a b` through the relation it leads.
///
/// For `b.eps = 0` this is `R(a.eps, b.k, p b.k - 1 - a.k)`, for `b.eps = 1`
/// it is `S(a.eps, b.k, p b.k - a.k)`.
pub fn rewrite_pair(a: &Letter, b: &Letter, ctx: &PrimeContext) -> Result<Poly> {
    if pair_admissible(a, b, ctx) {
        return Err(Error::AlreadyAdmissible(format!("{a}*{b}")));
    }
    let pk = ctx.p() as i128 * b.k as i128;
    let n = |v: i128| {
        i64::try_from(v).map_err(|_| Error::IndexOverflow(format!("relation parameter {v}")))
    };
    let relation = match b.eps {
        0 => relation_r(a.eps as i64, b.k, n(pk - 1 - a.k as i128)?, ctx)?,
        _ => relation_s(a.eps as i64, b.k, n(pk - a.k as i128)?, ctx)?,
    };
    let lead = Word::new(vec![*a, *b]);
    debug_assert_eq!(relation.coeff(&lead), 1);
    let mut out = Poly::zero(ctx);
    for (w, c) in relation.terms() {
        if *w != lead {
            out.add_term(w.clone(), ctx.neg(c), ctx);
        }
    }
    Ok(out)
}

type PairKey = (u8, i64, u8, i64);

/// Work-queue order: length, then letterwise by `(k, eps)`.
///
/// Replacing a pair `a b` by any term of its relation strictly increases
/// this key (the left index grows, or stays put while its epsilon goes from
/// 0 to 1). Popping the smallest pending word therefore never revisits a
/// word, and every contribution to it has arrived before it is rewritten.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Pending(Word);

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let (a, b) = (self.0.letters(), other.0.letters());
        a.len().cmp(&b.len()).then_with(|| {
            a.iter()
                .map(|l| (l.k, l.eps))
                .cmp(b.iter().map(|l| (l.k, l.eps)))
        })
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Memo table for [`rewrite_pair`]. Entries never change once inserted; two
/// workers racing on the same key compute identical values.
pub struct PairCache {
    table: Mutex<LruCache<PairKey, PairTerms>>,
}

impl PairCache {
    pub fn unbounded() -> Self {
        PairCache {
            table: Mutex::new(LruCache::unbounded()),
        }
    }

    pub fn with_capacity(cap: NonZeroUsize) -> Self {
        PairCache {
            table: Mutex::new(LruCache::new(cap)),
        }
    }

    pub fn len(&self) -> usize {
        self.table.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get_or_compute(
        &self,
        a: &Letter,
        b: &Letter,
        ctx: &PrimeContext,
    ) -> Result<(PairTerms, bool)> {
        let key = (a.eps, a.k, b.eps, b.k);
        if let Some(v) = self.table.lock().unwrap().get(&key) {
            return Ok((v.clone(), true));
        }
        let v = pair_terms(a, b, ctx)?;
        self.table.lock().unwrap().put(key, v.clone());
        Ok((v, false))
    }
}

impl Default for PairCache {
    fn default() -> Self {
        Self::unbounded()
    }
}

/// Normal-form engine bound to one prime, with a shared pair cache.
pub struct Straightener {
    ctx: PrimeContext,
    cache: PairCache,
}

impl Straightener {
    pub fn new(ctx: PrimeContext) -> Self {
        Straightener {
            ctx,
            cache: PairCache::unbounded(),
        }
    }

    pub fn with_cache(ctx: PrimeContext, cache: PairCache) -> Self {
        Straightener { ctx, cache }
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn cache(&self) -> &PairCache {
        &self.cache
    }

    /// Rewrites `x` into a combination of admissible words.
    ///
    /// Exactly one pair is rewritten per step. Runs on `fuel` steps (the
    /// context default if `None`) and fails with the stats so far once the
    /// budget is spent.
    pub fn normal_form(
        &self,
        x: &Poly,
        strategy: Strategy,
        fuel: Option<u64>,
    ) -> Result<(Poly, ReductionStats)> {
        let ctx = &self.ctx;
        if x.prime() != ctx.p() {
            return Err(Error::PrimeMismatch(x.prime(), ctx.p()));
        }
        let fuel = fuel.unwrap_or(ctx.fuel());
        let mut selector = Selector::new(strategy);
        let mut done = Poly::zero(ctx);
        let mut todo: BTreeMap<Pending, Fp> = BTreeMap::new();
        let mut stats = ReductionStats {
            fuel_left: fuel,
            ..Default::default()
        };

        let insert = |done: &mut Poly, todo: &mut BTreeMap<Pending, Fp>, w: Word, c: Fp| {
            if is_admissible(&w, ctx) {
                done.add_term(w, c, ctx);
                return;
            }
            match todo.entry(Pending(w)) {
                Entry::Vacant(e) => {
                    e.insert(c);
                }
                Entry::Occupied(mut e) => {
                    let sum = ctx.add(*e.get(), c);
                    if sum == 0 {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        };

        for (w, c) in x.terms() {
            insert(&mut done, &mut todo, w.clone(), c);
        }
        stats.peak_terms = done.num_terms() + todo.len();

        while let Some((Pending(w), c)) = todo.pop_first() {
            if stats.fuel_left == 0 {
                todo.insert(Pending(w), c);
                stats.peak_terms = stats.peak_terms.max(done.num_terms() + todo.len());
                return Err(Error::FuelExhausted(stats));
            }
            let pos = selector
                .pick(&w, ctx)
                .expect("pending words are not admissible");
            let letters = w.letters();
            let (terms, hit) = self
                .cache
                .get_or_compute(&letters[pos], &letters[pos + 1], ctx)?;
            stats.steps += 1;
            stats.fuel_left -= 1;
            stats.cache_hits += hit as u64;
            for &(l1, l2, c2) in terms.iter() {
                let mut nw = Vec::with_capacity(letters.len());
                nw.extend_from_slice(&letters[..pos]);
                nw.push(l1);
                nw.push(l2);
                nw.extend_from_slice(&letters[pos + 2..]);
                insert(&mut done, &mut todo, Word::new(nw), ctx.mul(c, c2));
            }
            stats.peak_terms = stats.peak_terms.max(done.num_terms() + todo.len());
        }
        Ok((done, stats))
    }

    pub fn equal_in_q(&self, x: &Poly, y: &Poly) -> Result<bool> {
        let diff = x.sub(y, &self.ctx)?;
        Ok(self
            .normal_form(&diff, Strategy::Leftmost, None)?
            .0
            .is_zero())
    }
}

/// One-shot normal form with a private cache.
pub fn normal_form(
    x: &Poly,
    ctx: &PrimeContext,
    strategy: Strategy,
    fuel: Option<u64>,
) -> Result<(Poly, ReductionStats)> {
    Straightener::new(*ctx).normal_form(x, strategy, fuel)
}

pub fn equal_in_q(x: &Poly, y: &Poly, ctx: &PrimeContext) -> Result<bool> {
    Straightener::new(*ctx).equal_in_q(x, y)
}

/// All admissible words of length `len` with indices in `[lo, hi]`,
/// optionally with a fixed epsilon pattern, in canonical order.
pub fn enumerate_admissible(
    len: usize,
    lo: i64,
    hi: i64,
    eps_pattern: Option<&[u8]>,
    ctx: &PrimeContext,
) -> Vec<Word> {
    if let Some(pat) = eps_pattern {
        if pat.len() != len || pat.iter().any(|&e| e > 1) {
            return Vec::new();
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    extend_admissible(len, lo, hi, eps_pattern, ctx, &mut cur, &mut out);
    out.sort_by(canonical_compare);
    out
}

fn extend_admissible(
    len: usize,
    lo: i64,
    hi: i64,
    pat: Option<&[u8]>,
    ctx: &PrimeContext,
    cur: &mut Vec<Letter>,
    out: &mut Vec<Word>,
) {
    let depth = cur.len();
    if depth == len {
        out.push(Word::new(cur.clone()));
        return;
    }
    let epsilons: &[u8] = match pat {
        Some(p) => std::slice::from_ref(&p[depth]),
        None => &[0, 1],
    };
    for &eps in epsilons {
        for k in lo..=hi {
            let next = Letter { eps, k };
            if let Some(prev) = cur.last() {
                if !pair_admissible(prev, &next, ctx) {
                    continue;
                }
            }
            cur.push(next);
            extend_admissible(len, lo, hi, pat, ctx, cur, out);
            cur.pop();
        }
    }
}
