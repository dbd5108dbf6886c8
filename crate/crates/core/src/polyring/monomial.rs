use std::cmp::Ordering;

use smallvec::SmallVec;

/// A power product stored sparsely as `(variable, exponent)` pairs sorted by
/// variable index. `Ord` is graded reverse lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    degree: u32,
    factors: SmallVec<[(u32, u32); 6]>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(v: usize) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: usize, e: u32) -> Self {
        if e == 0 {
            return Self::one();
        }
        let mut factors = SmallVec::new();
        factors.push((v as u32, e));
        Monomial { degree: e, factors }
    }

    pub fn from_exponents(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut m = Self::one();
        for (v, e) in pairs {
            m = m.mul(&Self::var_pow(v, e));
        }
        m
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.factors.iter().map(|&(v, e)| (v as usize, e))
    }

    pub fn exponent(&self, v: usize) -> u32 {
        self.factors
            .binary_search_by_key(&(v as u32), |f| f.0)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.factors.last().map(|f| f.0 as usize)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.factors, &other.factors);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial { degree: self.degree + other.degree, factors: out }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        if self.degree > other.degree {
            return false;
        }
        let b = &other.factors;
        let mut j = 0;
        for &(v, e) in &self.factors {
            while j < b.len() && b[j].0 < v {
                j += 1;
            }
            if j == b.len() || b[j].0 != v || b[j].1 < e {
                return false;
            }
        }
        true
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::with_capacity(other.factors.len());
        let mut i = 0;
        for &(v, e) in &other.factors {
            while i < self.factors.len() && self.factors[i].0 < v {
                i += 1;
            }
            let sub = if i < self.factors.len() && self.factors[i].0 == v { self.factors[i].1 } else { 0 };
            debug_assert!(sub <= e);
            if e > sub {
                out.push((v, e - sub));
            }
        }
        Monomial { degree: other.degree - self.degree, factors: out }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.factors, &other.factors);
        let mut out: SmallVec<[(u32, u32); 6]> = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1.max(b[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        let degree = out.iter().map(|f| f.1).sum();
        Monomial { degree, factors: out }
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        let (a, b) = (&self.factors, &other.factors);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => return false,
            }
        }
        true
    }

    /// Rename variables; the map need not preserve order.
    pub fn map_vars(&self, f: impl Fn(usize) -> usize) -> Monomial {
        Monomial::from_exponents(self.factors().map(|(v, e)| (f(v), e)))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree.cmp(&other.degree) {
            Ordering::Equal => {}
            o => return o,
        }
        // Same degree: find the largest variable index where exponents differ;
        // the monomial with the smaller exponent there is the larger one.
        let (a, b) = (&self.factors, &other.factors);
        let (mut i, mut j) = (a.len(), b.len());
        loop {
            match (i > 0, j > 0) {
                (false, false) => return Ordering::Equal,
                (true, false) => return Ordering::Less,
                (false, true) => return Ordering::Greater,
                (true, true) => {
                    let (va, ea) = a[i - 1];
                    let (vb, eb) = b[j - 1];
                    if va > vb {
                        return Ordering::Less;
                    }
                    if vb > va {
                        return Ordering::Greater;
                    }
                    if ea != eb {
                        return eb.cmp(&ea);
                    }
                    i -= 1;
                    j -= 1;
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense(m: &Monomial, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|v| m.exponent(v)).collect()
    }

    fn grevlex_dense(a: &[u32], b: &[u32]) -> Ordering {
        let da: u32 = a.iter().sum();
        let db: u32 = b.iter().sum();
        if da != db {
            return da.cmp(&db);
        }
        for v in (0..a.len()).rev() {
            if a[v] != b[v] {
                return b[v].cmp(&a[v]);
            }
        }
        Ordering::Equal
    }

    #[test]
    fn grevlex_basics() {
        let x = Monomial::var(0);
        let y = Monomial::var(1);
        let z = Monomial::var(2);
        assert!(x > y && y > z);
        // x*z < y^2 in grevlex
        assert!(x.mul(&z) < y.mul(&y));
        assert!(Monomial::one() < z);
        // det leading term for n=2 is x12*x21
        let diag = Monomial::var(0).mul(&Monomial::var(3));
        let anti = Monomial::var(1).mul(&Monomial::var(2));
        assert!(anti > diag);
    }

    fn arb_mono() -> impl Strategy<Value = Monomial> {
        proptest::collection::vec((0usize..6, 0u32..4), 0..5).prop_map(Monomial::from_exponents)
    }

    proptest! {
        #[test]
        fn matches_dense_oracle(a in arb_mono(), b in arb_mono()) {
            prop_assert_eq!(a.cmp(&b), grevlex_dense(&dense(&a, 6), &dense(&b, 6)));
        }

        #[test]
        fn compatible_with_multiplication(a in arb_mono(), b in arb_mono(), c in arb_mono()) {
            prop_assert_eq!(a.cmp(&b), a.mul(&c).cmp(&b.mul(&c)));
        }

        #[test]
        fn division_and_lcm(a in arb_mono(), b in arb_mono()) {
            let ab = a.mul(&b);
            prop_assert!(a.divides(&ab));
            prop_assert_eq!(a.quotient_of(&ab), b.clone());
            let l = a.lcm(&b);
            prop_assert!(a.divides(&l) && b.divides(&l));
            prop_assert_eq!(a.is_coprime(&b), l == ab);
        }
    }
}
