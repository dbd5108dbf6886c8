use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{same_ring, Monomial, Ring};
use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// Polynomial with rational coefficients. Terms are kept in a map ordered by
/// grevlex, so the leading term is the last entry.
#[derive(Clone)]
pub struct Poly {
    ring: Arc<Ring>,
    terms: BTreeMap<Monomial, Rational>,
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl Poly {
    pub fn zero(ring: &Arc<Ring>) -> Poly {
        Poly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Arc<Ring>) -> Poly {
        Poly::constant(ring, Rational::one())
    }

    pub fn constant(ring: &Arc<Ring>, c: Rational) -> Poly {
        Poly::term(ring, c, Monomial::one())
    }

    pub fn int(ring: &Arc<Ring>, c: i64) -> Poly {
        Poly::constant(ring, rat(c))
    }

    pub fn term(ring: &Arc<Ring>, c: Rational, m: Monomial) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { ring: ring.clone(), terms }
    }

    pub fn var(ring: &Arc<Ring>, v: usize) -> Poly {
        Poly::term(ring, Rational::one(), Monomial::var(v))
    }

    pub fn entry(ring: &Arc<Ring>, block: super::Block, row: usize, col: usize) -> Result<Poly> {
        Ok(Poly::var(ring, ring.entry_var(block, row, col)?))
    }

    pub fn from_terms(ring: &Arc<Ring>, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Poly {
        let mut p = Poly::zero(ring);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// Terms from the leading one downwards.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter().rev()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.last_key_value()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.last_key_value().map(|(m, _)| m)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_ring(&self, other: &Poly) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch("operands live in different rings".into()))
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        let (mut big, small) = if self.len() >= other.len() { (self.clone(), other) } else { (other.clone(), self) };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        Ok(big)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), -c.clone());
        }
        Ok(r)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.mul_capped(other, DEFAULT_TERM_CAP)
    }

    pub fn mul_capped(&self, other: &Poly, cap: usize) -> Result<Poly> {
        self.check_ring(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(&self.ring));
        }
        if let Some(c) = self.constant_value() {
            return Ok(other.scale(&c));
        }
        if let Some(c) = other.constant_value() {
            return Ok(self.scale(&c));
        }
        let mut acc: HashMap<Monomial, Rational> = HashMap::with_capacity(self.len() * other.len() / 2 + 1);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.mul(m2);
                let c = c1 * c2;
                match acc.entry(m) {
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                    std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += c,
                }
            }
            if acc.len() > cap {
                return Err(Error::TermCap { terms: acc.len(), cap });
            }
        }
        let terms: BTreeMap<_, _> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if terms.len() > cap {
            return Err(Error::TermCap { terms: terms.len(), cap });
        }
        Ok(Poly { ring: self.ring.clone(), terms })
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn scale_int(&self, c: i64) -> Poly {
        match c {
            1 => self.clone(),
            -1 => -self,
            _ => self.scale(&rat(c)),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly { ring: self.ring.clone(), terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Result<Poly> {
        let mut r = Poly::one(&self.ring);
        for _ in 0..e {
            r = r.try_mul(self)?;
        }
        Ok(r)
    }

    /// Scale so the leading coefficient is 1 (zero stays zero).
    pub fn monic(&self) -> Poly {
        match self.leading_term() {
            Some((_, c)) if !c.is_one() => self.scale(&c.recip()),
            _ => self.clone(),
        }
    }

    /// Apply a renaming of variables (e.g. an involution on indices).
    pub fn map_vars(&self, f: impl Fn(usize) -> usize) -> Poly {
        Poly::from_terms(&self.ring, self.terms.iter().map(|(m, c)| (m.map_vars(&f), c.clone())))
    }

    /// Move into another ring by matching variable names.
    pub fn into_ring(&self, target: &Arc<Ring>) -> Result<Poly> {
        if same_ring(&self.ring, target) {
            return Ok(Poly { ring: target.clone(), terms: self.terms.clone() });
        }
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut pairs = Vec::new();
            for (v, e) in m.factors() {
                let t = target.translate_var(&self.ring, v).ok_or_else(|| {
                    Error::RingMismatch(format!("variable {:?} has no counterpart in target ring", self.ring.var_name(v)))
                })?;
                pairs.push((t, e));
            }
            out.add_term(Monomial::from_exponents(pairs), c.clone());
        }
        Ok(out)
    }

    /// Variables that occur with nonzero exponent.
    pub fn support(&self) -> std::collections::BTreeSet<usize> {
        self.terms.keys().flat_map(|m| m.factors().map(|(v, _)| v)).collect()
    }

    /// Subtract `c · m · g` in place, skipping the leading term of `g`
    /// (the caller has already removed the term it cancels).
    pub(crate) fn sub_scaled_tail(&mut self, c: &Rational, m: &Monomial, g: &Poly) {
        for (gm, gc) in g.terms.iter().rev().skip(1) {
            self.add_term(gm.mul(m), -(c * gc));
        }
    }

    pub(crate) fn pop_leading(&mut self) -> Option<(Monomial, Rational)> {
        self.terms.pop_last()
    }

    /// Evaluate with a caller-supplied numeric type.
    pub fn eval_with<T>(&self, vals: impl Fn(usize) -> T, coeff: impl Fn(&Rational) -> T) -> T
    where
        T: Clone + Zero + One + Mul<Output = T> + Add<Output = T>,
    {
        let mut total = T::zero();
        for (m, c) in &self.terms {
            let mut t = coeff(c);
            for (v, e) in m.factors() {
                let x = vals(v);
                for _ in 0..e {
                    t = t * x.clone();
                }
            }
            total = total + t;
        }
        total
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for (m, c) in &self.terms {
            m.hash(state);
            c.hash(state);
        }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

/// Full multivariate division: the remainder of `p` by `basis`, with every
/// remainder term irreducible by every leading monomial.
pub fn reduce(p: &Poly, basis: &[Poly]) -> Poly {
    let leads: Vec<(&Monomial, Rational)> = basis
        .iter()
        .filter_map(|g| g.leading_term().map(|(m, c)| (m, c.clone())))
        .collect();
    let live: Vec<&Poly> = basis.iter().filter(|g| !g.is_zero()).collect();
    let mut work = p.clone();
    let mut rem = Poly::zero(&p.ring);
    while let Some((m, c)) = work.pop_leading() {
        match leads.iter().position(|(lm, _)| lm.divides(&m)) {
            Some(k) => {
                let q = leads[k].0.quotient_of(&m);
                let coef = &c / &leads[k].1;
                work.sub_scaled_tail(&coef, &q, live[k]);
            }
            None => {
                rem.terms.insert(m, c);
            }
        }
    }
    rem
}

impl Add for &Poly {
    type Output = Poly;
    /// Panics if the rings differ; use [`Poly::try_add`] at API boundaries.
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("ring mismatch in +")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_sub(rhs).expect("ring mismatch in -")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    /// Panics on ring mismatch or when the term cap is exceeded.
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("polynomial product failed")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(mut self) -> Poly {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
    Scale,
}

pub enum Operand<'a> {
    Poly(&'a Poly),
    Scalar(Rational),
    None,
}

pub fn poly_arith(kind: ArithOp, a: &Poly, b: Operand<'_>) -> Result<Poly> {
    match (kind, b) {
        (ArithOp::Add, Operand::Poly(b)) => a.try_add(b),
        (ArithOp::Mul, Operand::Poly(b)) => a.try_mul(b),
        (ArithOp::Neg, _) => Ok(-a),
        (ArithOp::Scale, Operand::Scalar(c)) => Ok(a.scale(&c)),
        (ArithOp::Scale, Operand::Poly(b)) => match b.constant_value() {
            Some(c) => Ok(a.scale(&c)),
            None => Err(Error::DimensionMismatch("scale expects a constant".into())),
        },
        (k, _) => Err(Error::DimensionMismatch(format!("{k:?} needs a polynomial operand"))),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_poly, Block};
    use super::*;
    use proptest::prelude::*;

    fn ring() -> Arc<Ring> {
        Ring::new(2, 2, 0)
    }

    #[test]
    fn spec_examples() {
        let r = ring();
        let x = Poly::entry(&r, Block::Gen(1), 1, 1).unwrap();
        let one = Poly::one(&r);
        let s = poly_arith(ArithOp::Add, &(&x + &one), Operand::Poly(&-&x)).unwrap();
        assert!(s.is_one());
        let sq = poly_arith(ArithOp::Mul, &x, Operand::Poly(&x)).unwrap();
        assert_eq!(sq.to_string(), "g1[1][1]^2");
        let a = x.clone();
        let b = Poly::entry(&r, Block::Gen(2), 2, 1).unwrap();
        let lhs = &(&a + &b) * &(&a - &b);
        let rhs = &(&a * &a) - &(&b * &b);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn ring_mismatch() {
        let a = Poly::one(&Ring::new(2, 1, 0));
        let b = Poly::one(&Ring::new(3, 1, 0));
        assert!(matches!(a.try_add(&b), Err(Error::RingMismatch(_))));
        assert!(matches!(poly_arith(ArithOp::Mul, &a, Operand::Poly(&b)), Err(Error::RingMismatch(_))));
    }

    #[test]
    fn term_cap() {
        let r = Ring::new(2, 2, 0);
        let s = (0..8).fold(Poly::zero(&r), |acc, v| &acc + &Poly::var(&r, v));
        assert!(matches!(s.mul_capped(&s, 10), Err(Error::TermCap { .. })));
        assert_eq!(s.mul_capped(&s, 100).unwrap().len(), 36);
    }

    #[test]
    fn division_remainder() {
        let r = Ring::scratch(&["x", "y"]);
        let p = parse_poly(&r, "x^2*y + x*y^2 + y^2").unwrap();
        let g = [parse_poly(&r, "x*y - 1").unwrap(), parse_poly(&r, "y^2 - 1").unwrap()];
        let rem = reduce(&p, &g);
        // grevlex x > y: classic example gives x + y + 1
        assert_eq!(rem.to_string(), "x + y + 1");
    }

    fn arb_poly(r: Arc<Ring>) -> impl Strategy<Value = Poly> {
        let nv = r.var_count();
        proptest::collection::vec(
            (proptest::collection::vec((0..nv, 1u32..3), 0..3), -3i64..4, 1i64..3),
            0..5,
        )
        .prop_map(move |ts| {
            Poly::from_terms(
                &r,
                ts.into_iter().map(|(m, a, b)| (Monomial::from_exponents(m), Rational::new(a.into(), b.into()))),
            )
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(ring()), b in arb_poly(ring()), c in arb_poly(ring())) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn text_round_trip(a in arb_poly(ring())) {
            let s = a.to_string();
            let back = parse_poly(a.ring(), &s).unwrap();
            prop_assert_eq!(&back, &a);
            prop_assert_eq!(back.to_string(), s);
        }
    }
}
