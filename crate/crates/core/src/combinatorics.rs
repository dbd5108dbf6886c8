//! Permutations of `{1..k}` and integral Laurent polynomials in `q`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_PERMUTATION_SIZE: usize = 8;

/// A bijection of `{1..k}`, stored as its image sequence `σ(1), .., σ(k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k + 1];
        for &v in &images {
            if v == 0 || v > k || seen[v] {
                return Err(Error::InvalidSpec(format!("{images:?} is not a permutation of 1..{k}")));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(k: usize) -> Self {
        Permutation { images: (1..=k).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// σ(i) for 1-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation { images: other.images.iter().map(|&j| self.apply(j)).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { images: inv }
    }

    pub fn inversion_length(&self) -> usize {
        let s = &self.images;
        let mut count = 0;
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                if s[i] > s[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// `(−1)^ℓ(σ)`.
    pub fn sign(&self) -> i64 {
        if self.inversion_length().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

pub fn inversion_length(sigma: &Permutation) -> usize {
    sigma.inversion_length()
}

fn check_size(k: usize) -> Result<()> {
    if k == 0 || k > MAX_PERMUTATION_SIZE {
        return Err(Error::SizeLimit(format!(
            "permutation size {k} outside 1..={MAX_PERMUTATION_SIZE}"
        )));
    }
    Ok(())
}

/// All permutations of `{1..k}` in lexicographic order of image sequences.
pub fn all_permutations(k: usize) -> Result<Vec<Permutation>> {
    check_size(k)?;
    Ok(permutations_unchecked(k))
}

pub(crate) fn permutations_unchecked(k: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (1..=k).collect();
    loop {
        out.push(Permutation { images: cur.clone() });
        // next lexicographic permutation
        let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..k).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// Laurent polynomial in `q` with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentQPoly {
    coeffs: BTreeMap<i64, i64>,
}

impl LaurentQPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn monomial(coeff: i64, exp: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exp: i64, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let c = self.coeffs.entry(exp).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.coeffs.remove(&exp);
        }
    }

    pub fn coefficient(&self, exp: i64) -> i64 {
        self.coeffs.get(&exp).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in other.terms() {
            r.add_term(e, c);
        }
        r
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut r = Self::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                r.add_term(e1 + e2, c1 * c2);
            }
        }
        r
    }

    pub fn eval_at_one(&self) -> i64 {
        self.coeffs.values().sum()
    }

    /// Quantum integer `[k] = q^{k−1} + q^{k−3} + .. + q^{1−k}`.
    pub fn q_integer(k: u32) -> Self {
        let k = k as i64;
        Self::from_terms((0..k).map(|t| (k - 1 - 2 * t, 1)))
    }

    pub fn q_factorial(k: u32) -> Self {
        (1..=k).fold(Self::one(), |acc, i| acc.mul(&Self::q_integer(i)))
    }
}

impl fmt::Display for LaurentQPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.coeffs.iter().enumerate() {
            let (sign, abs) = if *c < 0 { ("-", -c) } else { ("+", *c) };
            if idx == 0 {
                if *c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match (*e, abs) {
                (0, a) => write!(f, "{a}")?,
                (e, 1) => write!(f, "q^{e}")?,
                (e, a) => write!(f, "{a}*q^{e}")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QFactorialIdentity {
    pub lhs: LaurentQPoly,
    pub rhs: LaurentQPoly,
    pub equal: bool,
}

/// Compares `Σ_{σ∈S_k} (q²)^{ℓ(σ)}` with `[k]! · q^{k(k−1)/2}`.
pub fn q_factorial_identity(k: usize) -> Result<QFactorialIdentity> {
    check_size(k)?;
    let mut lhs = LaurentQPoly::zero();
    for sigma in permutations_unchecked(k) {
        lhs.add_term(2 * sigma.inversion_length() as i64, 1);
    }
    let shift = (k * (k - 1) / 2) as i64;
    let rhs = LaurentQPoly::q_factorial(k as u32).mul(&LaurentQPoly::monomial(1, shift));
    let equal = lhs == rhs;
    Ok(QFactorialIdentity { lhs, rhs, equal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn enumeration_sizes_and_order() {
        assert_eq!(all_permutations(1).unwrap(), vec![Permutation::identity(1)]);
        assert_eq!(all_permutations(3).unwrap().len(), 6);
        let p4 = all_permutations(4).unwrap();
        assert_eq!(p4.len(), 24);
        assert_eq!(p4[0], Permutation::identity(4));
        assert_eq!(p4[23], perm(&[4, 3, 2, 1]));
        assert!(p4.windows(2).all(|w| w[0].images() < w[1].images()));
        assert_eq!(all_permutations(8).unwrap().len(), 40320);
    }

    #[test]
    fn size_limits() {
        assert!(matches!(all_permutations(0), Err(Error::SizeLimit(_))));
        assert!(matches!(all_permutations(9), Err(Error::SizeLimit(_))));
        assert!(matches!(q_factorial_identity(9), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(Permutation::identity(5).inversion_length(), 0);
        assert_eq!(perm(&[2, 1]).inversion_length(), 1);
        assert_eq!(perm(&[3, 2, 1]).inversion_length(), 3);
        assert!(Permutation::new(vec![1, 1]).is_err());
    }

    #[test]
    fn q_factorial_examples() {
        let one = q_factorial_identity(1).unwrap();
        assert_eq!(one.lhs, LaurentQPoly::one());
        assert!(one.equal);
        let two = q_factorial_identity(2).unwrap();
        assert_eq!(two.lhs, LaurentQPoly::from_terms([(0, 1), (2, 1)]));
        assert_eq!(two.rhs, two.lhs);
        let three = q_factorial_identity(3).unwrap();
        assert_eq!(three.lhs, LaurentQPoly::from_terms([(0, 1), (2, 2), (4, 2), (6, 1)]));
        assert!(three.equal);
        for k in 1..=8 {
            assert!(q_factorial_identity(k).unwrap().equal, "k={k}");
        }
    }

    #[test]
    fn generating_function_at_one_is_factorial() {
        let mut fact = 1i64;
        for k in 1..=6usize {
            fact *= k as i64;
            let p = LaurentQPoly::from_terms(
                all_permutations(k).unwrap().iter().map(|s| (s.inversion_length() as i64, 1)),
            );
            assert_eq!(p.eval_at_one(), fact);
        }
    }

    #[test]
    fn display() {
        assert_eq!(LaurentQPoly::q_integer(2).to_string(), "q^-1 + q^1");
        assert_eq!(LaurentQPoly::from_terms([(0, -2), (3, 1)]).to_string(), "-2 + q^3");
    }

    fn arb_perm(k: usize) -> impl Strategy<Value = Permutation> {
        Just((1..=k).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn sign_is_multiplicative((a, b) in (1usize..=7).prop_flat_map(|k| (arb_perm(k), arb_perm(k)))) {
            let c = a.compose(&b);
            prop_assert_eq!(c.inversion_length() % 2, (a.inversion_length() + b.inversion_length()) % 2);
            prop_assert_eq!(a.compose(&a.inverse()), Permutation::identity(a.len()));
        }
    }
}
