//! Self-similar substructures: the letter substitutions `Phi`, `Psi`,
//! `Lambda`, `Theta`, membership in the nested pieces `Q0(s)`, `Q1(s)` and
//! `V(s)`, the right `Q0(s)`-module action on `V(s)`, and checkers for the
//! identities these maps are supposed to satisfy.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{
    is_admissible, relation_r, relation_s, relations_containing, Letter, Poly, RelationId, Word,
};
use crate::error::{Error, Result};
use crate::modp::{a_coeff, alpha, PrimeContext};
use crate::straighten::{Straightener, Strategy};

/// A letterwise substitution on the free algebra.
///
/// `Phi` (`k -> pk - 1`) is only defined on `eps = 0` letters and `Psi`
/// (`k -> pk`) only on `eps = 1` letters. `Lambda` (`k -> pk - 1`) and
/// `Theta` (`k -> pk`) act on every letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MapName {
    Phi,
    Psi,
    Lambda,
    Theta,
}

impl MapName {
    fn accepts(&self, l: &Letter) -> bool {
        match self {
            MapName::Phi => l.eps == 0,
            MapName::Psi => l.eps == 1,
            MapName::Lambda | MapName::Theta => true,
        }
    }

    fn shift(&self) -> i128 {
        match self {
            MapName::Phi | MapName::Lambda => 1,
            MapName::Psi | MapName::Theta => 0,
        }
    }
}

impl fmt::Display for MapName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MapName::Phi => "phi",
            MapName::Psi => "psi",
            MapName::Lambda => "lambda",
            MapName::Theta => "theta",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for MapName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "phi" => Ok(MapName::Phi),
            "psi" => Ok(MapName::Psi),
            "lambda" => Ok(MapName::Lambda),
            "theta" => Ok(MapName::Theta),
            other => Err(format!("unknown map '{other}'")),
        }
    }
}

/// Applies `name` to every letter of `w`, `power` times.
pub fn apply_map_word(name: MapName, w: &Word, power: u32, ctx: &PrimeContext) -> Result<Word> {
    let p = ctx.p() as i128;
    let shift = name.shift();
    let mut out = Vec::with_capacity(w.len());
    for l in w.letters() {
        if !name.accepts(l) {
            return Err(Error::DomainViolation {
                map: name.to_string(),
                word: w.to_string(),
            });
        }
        let mut k = l.k;
        for _ in 0..power {
            k = ctx.check_index(p * k as i128 - shift)?;
        }
        out.push(Letter { eps: l.eps, k });
    }
    Ok(Word::new(out))
}

/// Linear, multiplicative extension of the letter substitution, iterated
/// `power` times. `power = 0` is the identity.
pub fn apply_map(name: MapName, x: &Poly, power: u32, ctx: &PrimeContext) -> Result<Poly> {
    let mut out = Poly::zero(ctx);
    for (w, c) in x.terms() {
        out.add_term(apply_map_word(name, w, power, ctx)?, c, ctx);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubspaceId {
    Q0(u32),
    Q1(u32),
    V(u32),
}

impl fmt::Display for SubspaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubspaceId::Q0(s) => write!(f, "Q0({s})"),
            SubspaceId::Q1(s) => write!(f, "Q1({s})"),
            SubspaceId::V(s) => write!(f, "V({s})"),
        }
    }
}

/// Label-shape membership test.
///
/// `Q0(s)`: all letters `eps = 0`, `k = -alpha_s (mod p^s)`.
/// `Q1(s)`: all letters `eps = 1`, `k = 0 (mod p^s)`.
/// `V(s)`: length at least 2, epsilon pattern `1, 0, 0, ...`, all
/// `k = -alpha_s (mod p^s)`.
pub fn in_subspace(w: &Word, id: SubspaceId, ctx: &PrimeContext) -> bool {
    let s = match id {
        SubspaceId::Q0(s) | SubspaceId::Q1(s) | SubspaceId::V(s) => s,
    };
    let (Ok(modulus), Ok(alpha_s)) = (ctx.pow(s), alpha(s, ctx)) else {
        // p^s beyond every representable index: only k = -alpha_s would
        // qualify and that is out of range as well
        return false;
    };
    let congruent = |k: i64, offset: i128| (k as i128 + offset).rem_euclid(modulus) == 0;
    let letters = w.letters();
    match id {
        SubspaceId::Q0(_) => letters
            .iter()
            .all(|l| l.eps == 0 && congruent(l.k, alpha_s as i128)),
        SubspaceId::Q1(_) => letters.iter().all(|l| l.eps == 1 && congruent(l.k, 0)),
        SubspaceId::V(_) => {
            letters.len() >= 2
                && letters
                    .iter()
                    .enumerate()
                    .all(|(i, l)| l.eps == (i == 0) as u8 && congruent(l.k, alpha_s as i128))
        }
    }
}

pub fn poly_in_subspace(x: &Poly, id: SubspaceId, ctx: &PrimeContext) -> bool {
    x.words().all(|w| in_subspace(w, id, ctx))
}

fn pair(e1: u8, k1: i128, e2: u8, k2: i128, ctx: &PrimeContext) -> Result<Word> {
    Ok(Word::new(vec![
        Letter::new(e1 as i64, k1, ctx)?,
        Letter::new(e2 as i64, k2, ctx)?,
    ]))
}

fn scale_params(s: u32, ctx: &PrimeContext) -> Result<(i128, i128)> {
    Ok((ctx.pow(s)?, alpha(s, ctx)? as i128))
}

/// Closed form of `R(eps, p^s k - alpha_s, p^s n)` built from the
/// coefficients `A(n, j)` on scaled indices.
pub fn reduced_relation_r(eps: u8, k: i64, n: i64, s: u32, ctx: &PrimeContext) -> Result<Poly> {
    if eps > 1 {
        return Err(Error::BadEpsilon(eps as i64));
    }
    if n < 0 {
        return Err(Error::NegativeN(n));
    }
    let (ps, al) = scale_params(s, ctx)?;
    let (p, k128, n128) = (ctx.p() as i128, k as i128, n as i128);
    let mut out = Poly::from_word(
        pair(eps, ps * (p * k128 - 1 - n128) - al, 0, ps * k128 - al, ctx)?,
        ctx,
    );
    let mut j: i64 = 0;
    while (p - 1) * (n128 - j as i128) > j as i128 {
        let c = a_coeff(n, j, ctx);
        if c != 0 {
            let j128 = j as i128;
            out.add_term(
                pair(
                    eps,
                    ps * (p * k128 - 1 - j128) - al,
                    0,
                    ps * (k128 - n128 + j128) - al,
                    ctx,
                )?,
                ctx.mul(ctx.sign(j), c),
                ctx,
            );
        }
        j += 1;
    }
    Ok(out)
}

fn scaled_r_params(k: i64, n: i64, s: u32, ctx: &PrimeContext) -> Result<(i64, i64)> {
    let (ps, al) = scale_params(s, ctx)?;
    let k = ctx.check_index(ps * k as i128 - al)?;
    let n =
        i64::try_from(ps * n as i128).map_err(|_| Error::IndexOverflow(format!("{ps} * {n}")))?;
    Ok((k, n))
}

fn scaled_s_params(k: i64, n: i64, s: u32, ctx: &PrimeContext) -> Result<(i64, i64)> {
    let ps = ctx.pow(s)?;
    let k = ctx.check_index(ps * k as i128)?;
    let n =
        i64::try_from(ps * n as i128).map_err(|_| Error::IndexOverflow(format!("{ps} * {n}")))?;
    Ok((k, n))
}

/// Whether `R(eps, p^s k - alpha_s, p^s n)` coincides term by term with its
/// closed form.
pub fn verify_reduction_r(eps: u8, k: i64, n: i64, s: u32, ctx: &PrimeContext) -> Result<bool> {
    let (sk, sn) = scaled_r_params(k, n, s, ctx)?;
    Ok(relation_r(eps as i64, sk, sn, ctx)? == reduced_relation_r(eps, k, n, s, ctx)?)
}

/// Closed form of `S(1, p^s k, p^s n)`.
pub fn reduced_relation_s(k: i64, n: i64, s: u32, ctx: &PrimeContext) -> Result<Poly> {
    if n < 0 {
        return Err(Error::NegativeN(n));
    }
    let ps = ctx.pow(s)?;
    let (p, k128, n128) = (ctx.p() as i128, k as i128, n as i128);
    let mut out = Poly::from_word(pair(1, ps * (p * k128 - n128), 1, ps * k128, ctx)?, ctx);
    let mut j: i64 = 0;
    while (p - 1) * (n128 - j as i128) > j as i128 {
        let c = a_coeff(n, j, ctx);
        if c != 0 {
            let j128 = j as i128;
            out.add_term(
                pair(1, ps * (p * k128 - j128), 1, ps * (k128 - n128 + j128), ctx)?,
                ctx.mul(ctx.sign(j + 1), c),
                ctx,
            );
        }
        j += 1;
    }
    Ok(out)
}

pub fn verify_reduction_s(k: i64, n: i64, s: u32, ctx: &PrimeContext) -> Result<bool> {
    let (sk, sn) = scaled_s_params(k, n, s, ctx)?;
    Ok(relation_s(1, sk, sn, ctx)? == reduced_relation_s(k, n, s, ctx)?)
}

/// `Phi^s(R(0,k,n)) = R(0, p^s k - alpha_s, p^s n)` or
/// `Psi^s(S(1,k,n)) = S(1, p^s k, p^s n)`, as exact polynomial identities.
pub fn verify_map_relation(
    name: MapName,
    k: i64,
    n: i64,
    s: u32,
    ctx: &PrimeContext,
) -> Result<bool> {
    match name {
        MapName::Phi => {
            let image = apply_map(name, &relation_r(0, k, n, ctx)?, s, ctx)?;
            let (sk, sn) = scaled_r_params(k, n, s, ctx)?;
            Ok(image == relation_r(0, sk, sn, ctx)?)
        }
        MapName::Psi => {
            let image = apply_map(name, &relation_s(1, k, n, ctx)?, s, ctx)?;
            let (sk, sn) = scaled_s_params(k, n, s, ctx)?;
            Ok(image == relation_s(1, sk, sn, ctx)?)
        }
        other => Err(Error::DomainViolation {
            map: other.to_string(),
            word: "relation identity (only phi and psi)".into(),
        }),
    }
}

fn require_subspace(x: &Poly, id: SubspaceId, ctx: &PrimeContext) -> Result<()> {
    match x.words().find(|w| !in_subspace(w, id, ctx)) {
        Some(w) => Err(Error::NotInSubspace {
            subspace: id.to_string(),
            word: w.to_string(),
        }),
        None => Ok(()),
    }
}

/// `v * q` reduced to admissible form, for `v` in `V(s)` and `q` in `Q0(s)`.
///
/// The result must land in `V(s)` again; anything else is reported as a
/// `ClosureViolation`.
pub fn right_action(v: &Poly, q: &Poly, s: u32, engine: &Straightener) -> Result<Poly> {
    let ctx = engine.ctx();
    require_subspace(v, SubspaceId::V(s), ctx)?;
    require_subspace(q, SubspaceId::Q0(s), ctx)?;
    let (out, _) = engine.normal_form(&v.mul(q, ctx)?, Strategy::Leftmost, None)?;
    if let Some(w) = out.words().find(|w| !in_subspace(w, SubspaceId::V(s), ctx)) {
        return Err(Error::ClosureViolation {
            subspace: SubspaceId::V(s).to_string(),
            word: w.to_string(),
        });
    }
    Ok(out)
}

/// The morphism law `lambda(v q) = lambda(v) phi(q)` from `(V(s), Q0(s))`
/// to `(V(s+1), Q0(s+1))`, compared on normal forms.
pub fn verify_k_morphism(v: &Poly, q: &Poly, s: u32, engine: &Straightener) -> Result<bool> {
    let ctx = engine.ctx();
    let lhs = apply_map(MapName::Lambda, &right_action(v, q, s, engine)?, 1, ctx)?;
    let lhs = engine.normal_form(&lhs, Strategy::Leftmost, None)?.0;
    let rhs = right_action(
        &apply_map(MapName::Lambda, v, 1, ctx)?,
        &apply_map(MapName::Phi, q, 1, ctx)?,
        s + 1,
        engine,
    )?;
    let rhs = engine.normal_form(&rhs, Strategy::Leftmost, None)?.0;
    Ok(lhs == rhs)
}

/// Outcome of the `Theta(R(0,0,0))` non-membership check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaReport {
    pub target: Poly,
    /// Every relation containing some word of `target`.
    pub witnesses: Vec<RelationId>,
    pub member: bool,
}

pub fn check_theta_obstruction(ctx: &PrimeContext) -> Result<ThetaReport> {
    let target = apply_map(MapName::Theta, &relation_r(0, 0, 0, ctx)?, 1, ctx)?;
    let mut witnesses = Vec::new();
    for w in target.words() {
        witnesses.extend(relations_containing(w, ctx)?);
    }
    witnesses.sort();
    witnesses.dedup();
    let mut member = false;
    for id in &witnesses {
        if id.poly(ctx)? == target {
            member = true;
        }
    }
    Ok(ThetaReport {
        target,
        witnesses,
        member,
    })
}

/// Outcome of the `Lambda(S(1,0,0))` non-membership check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaReport {
    pub image: Poly,
    /// The image's only word, if it has exactly one and it is admissible.
    pub single_admissible: Option<Word>,
    /// Number of relations scanned for a non-admissible summand.
    pub scanned: usize,
    /// Relations in the scan window without a non-admissible summand.
    pub counterexamples: Vec<RelationId>,
    pub member: bool,
}

/// Scans `R` and `S` for both epsilons, `|k| <= kmax`, `0 <= n <= nmax`.
pub fn check_lambda_s00(kmax: i64, nmax: i64, ctx: &PrimeContext) -> Result<LambdaReport> {
    let image = apply_map(MapName::Lambda, &relation_s(1, 0, 0, ctx)?, 1, ctx)?;
    let single_admissible = match image.num_terms() {
        1 => image
            .words()
            .next()
            .filter(|w| is_admissible(w, ctx))
            .cloned(),
        _ => None,
    };
    let mut scanned = 0;
    let mut counterexamples = Vec::new();
    for eps in 0..=1u8 {
        for k in -kmax..=kmax {
            for n in 0..=nmax {
                for id in [RelationId::r(eps, k, n), RelationId::s(eps, k, n)] {
                    scanned += 1;
                    if id.poly(ctx)?.is_admissible(ctx) {
                        counterexamples.push(id);
                    }
                }
            }
        }
    }
    let member = single_admissible.is_none() || !counterexamples.is_empty();
    Ok(LambdaReport {
        image,
        single_admissible,
        scanned,
        counterexamples,
        member,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modp::validate_prime;

    fn ctx(p: i64) -> PrimeContext {
        validate_prime(p).unwrap()
    }

    fn w(ls: &[(u8, i64)]) -> Word {
        Word::new(ls.iter().map(|&(eps, k)| Letter { eps, k }).collect())
    }

    fn poly(terms: &[(u32, &[(u8, i64)])], c: &PrimeContext) -> Poly {
        let mut out = Poly::zero(c);
        for &(coef, ls) in terms {
            out.add_term(w(ls), coef, c);
        }
        out
    }

    #[test]
    fn map_examples() {
        let c = ctx(3);
        let one = |ls: &[(u8, i64)]| Poly::from_word(w(ls), &c);
        assert_eq!(
            apply_map(MapName::Phi, &one(&[(0, 0)]), 1, &c).unwrap(),
            one(&[(0, -1)])
        );
        assert_eq!(
            apply_map(MapName::Phi, &one(&[(0, 1)]), 2, &c).unwrap(),
            one(&[(0, 5)])
        );
        let r000 = relation_r(0, 0, 0, &c).unwrap();
        assert_eq!(
            apply_map(MapName::Theta, &r000, 1, &c).unwrap(),
            one(&[(0, -3), (0, 0)])
        );
        assert!(matches!(
            apply_map(MapName::Phi, &one(&[(1, 0)]), 1, &c),
            Err(Error::DomainViolation { .. })
        ));
        assert!(matches!(
            apply_map(MapName::Psi, &one(&[(0, 0)]), 1, &c),
            Err(Error::DomainViolation { .. })
        ));
        let small = c.with_index_bound(100).unwrap();
        assert!(matches!(
            apply_map(MapName::Theta, &one(&[(0, 50)]), 1, &small),
            Err(Error::IndexOverflow(_))
        ));
    }

    #[test]
    fn subspace_examples() {
        let c = ctx(3);
        assert!(in_subspace(&w(&[(0, -4)]), SubspaceId::Q0(2), &c));
        assert!(!in_subspace(&w(&[(0, 0)]), SubspaceId::Q0(1), &c));
        assert!(in_subspace(&w(&[(1, -1), (0, -1)]), SubspaceId::V(1), &c));
        assert!(!in_subspace(&w(&[(1, -1)]), SubspaceId::V(1), &c));
        assert!(!in_subspace(&w(&[(0, -1), (1, -1)]), SubspaceId::V(1), &c));
        assert!(in_subspace(&w(&[(1, 9), (1, -18)]), SubspaceId::Q1(2), &c));
        assert!(!in_subspace(&w(&[(1, 3)]), SubspaceId::Q1(2), &c));
        assert!(in_subspace(&Word::empty(), SubspaceId::Q0(3), &c));
        assert!(!in_subspace(&w(&[(0, 0)]), SubspaceId::Q0(200), &c));
    }

    #[test]
    fn reduced_r_examples() {
        let c = ctx(3);
        assert_eq!(
            reduced_relation_r(0, 1, 1, 1, &c).unwrap(),
            poly(&[(1, &[(0, 2), (0, 2)]), (1, &[(0, 5), (0, -1)])], &c)
        );
        assert_eq!(
            reduced_relation_r(0, 0, 0, 1, &c).unwrap(),
            poly(&[(1, &[(0, -4), (0, -1)])], &c)
        );
        assert_eq!(
            reduced_relation_r(1, 1, 0, 2, &c).unwrap(),
            poly(&[(1, &[(1, 14), (0, 5)])], &c)
        );
        assert!(verify_reduction_r(0, 1, 1, 1, &c).unwrap());
        assert!(verify_reduction_r(0, 2, 3, 1, &c).unwrap());
        assert!(verify_reduction_r(1, -1, 2, 2, &c).unwrap());
    }

    #[test]
    fn reduced_s_examples() {
        let c = ctx(3);
        assert_eq!(
            reduced_relation_s(1, 1, 1, &c).unwrap(),
            poly(&[(1, &[(1, 6), (1, 3)]), (2, &[(1, 9), (1, 0)])], &c)
        );
        assert!(verify_reduction_s(1, 1, 1, &c).unwrap());
        assert_eq!(
            reduced_relation_s(0, 0, 1, &c).unwrap(),
            poly(&[(1, &[(1, 0), (1, 0)])], &c)
        );
        assert!(verify_reduction_s(0, 0, 1, &c).unwrap());
        assert!(verify_reduction_s(2, 2, 2, &c).unwrap());
    }

    #[test]
    fn map_relation_examples() {
        let c = ctx(3);
        assert!(verify_map_relation(MapName::Phi, 2, 3, 1, &c).unwrap());
        assert!(verify_map_relation(MapName::Psi, 1, 1, 1, &c).unwrap());
        assert!(verify_map_relation(MapName::Phi, 0, 0, 2, &c).unwrap());
        assert!(verify_map_relation(MapName::Theta, 0, 0, 1, &c).is_err());
    }

    #[test]
    fn action_examples() {
        let c = ctx(3);
        let e = Straightener::new(c);
        let v = poly(&[(1, &[(1, 1), (0, 0)])], &c);
        assert_eq!(right_action(&v, &Poly::one(&c), 0, &e).unwrap(), v);
        let q = poly(&[(1, &[(0, 0)])], &c);
        assert_eq!(
            right_action(&v, &q, 0, &e).unwrap(),
            poly(&[(1, &[(1, 1), (0, 0), (0, 0)])], &c)
        );
        let v2 = poly(&[(1, &[(1, 1), (0, 1)])], &c);
        assert_eq!(
            right_action(&v2, &q, 0, &e).unwrap(),
            poly(&[(2, &[(1, 2), (0, 0), (0, 0)])], &c)
        );
        let bad_q = poly(&[(1, &[(1, 0)])], &c);
        assert!(matches!(
            right_action(&v, &bad_q, 0, &e),
            Err(Error::NotInSubspace { .. })
        ));
        assert!(matches!(
            right_action(&q, &q, 0, &e),
            Err(Error::NotInSubspace { .. })
        ));
    }

    #[test]
    fn morphism_examples() {
        let c = ctx(3);
        let e = Straightener::new(c);
        let q = poly(&[(1, &[(0, 0)])], &c);
        let v = poly(&[(1, &[(1, 1), (0, 0)])], &c);
        assert!(verify_k_morphism(&v, &q, 0, &e).unwrap());
        let lhs = apply_map(
            MapName::Lambda,
            &right_action(&v, &q, 0, &e).unwrap(),
            1,
            &c,
        )
        .unwrap();
        assert_eq!(lhs, poly(&[(1, &[(1, 2), (0, -1), (0, -1)])], &c));
        let v2 = poly(&[(1, &[(1, 1), (0, 1)])], &c);
        assert!(verify_k_morphism(&v2, &q, 0, &e).unwrap());
        let v3 = poly(&[(1, &[(1, 0), (0, 0)])], &c);
        assert!(verify_k_morphism(&v3, &Poly::one(&c), 0, &e).unwrap());
    }

    #[test]
    fn theta_obstruction() {
        for (p, witness) in [(3, 2), (5, 4), (7, 6)] {
            let c = ctx(p);
            let report = check_theta_obstruction(&c).unwrap();
            assert!(!report.member);
            assert_eq!(report.witnesses, vec![RelationId::r(0, 0, witness)]);
            assert_eq!(report.target, poly(&[(1, &[(0, -p), (0, 0)])], &c));
        }
    }

    #[test]
    fn lambda_obstruction() {
        for p in [3, 5] {
            let c = ctx(p);
            let report = check_lambda_s00(6, 12, &c).unwrap();
            assert_eq!(report.single_admissible, Some(w(&[(1, -1), (1, -1)])));
            assert!(report.counterexamples.is_empty());
            assert_eq!(report.scanned, 2 * 13 * 13 * 2);
            assert!(!report.member);
        }
    }
}
