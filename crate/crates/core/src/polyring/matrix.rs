use std::sync::Arc;

use super::{same_ring, Block, Poly, Ring, MAX_EXPANSION_SIZE};
use crate::combinatorics::permutations_unchecked;
use crate::error::{Error, Result};

/// Square matrix of polynomials, row-major, 0-based accessors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    n: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Poly) -> PolyMatrix {
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(f(r, c));
            }
        }
        PolyMatrix { n, entries }
    }

    pub fn try_from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Result<Poly>) -> Result<PolyMatrix> {
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(f(r, c)?);
            }
        }
        Ok(PolyMatrix { n, entries })
    }

    pub fn identity(ring: &Arc<Ring>, n: usize) -> PolyMatrix {
        Self::from_fn(n, |r, c| if r == c { Poly::one(ring) } else { Poly::zero(ring) })
    }

    pub fn from_ints(ring: &Arc<Ring>, n: usize, f: impl Fn(usize, usize) -> i64) -> PolyMatrix {
        Self::from_fn(n, |r, c| Poly::int(ring, f(r, c)))
    }

    /// The generic matrix `X_b` of a block's variables.
    pub fn generic(ring: &Arc<Ring>, block: Block) -> Result<PolyMatrix> {
        let n = ring.n();
        Self::try_from_fn(n, |r, c| Poly::entry(ring, block, r + 1, c + 1))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &Poly {
        &self.entries[r * self.n + c]
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn ring(&self) -> Option<&Arc<Ring>> {
        self.entries.first().map(|p| p.ring())
    }

    fn check(&self, other: &PolyMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{0}x{0} vs {1}x{1}", self.n, other.n)));
        }
        match (self.ring(), other.ring()) {
            (Some(a), Some(b)) if !same_ring(a, b) => Err(Error::RingMismatch("matrices over different rings".into())),
            _ => Ok(()),
        }
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.check(other)?;
        let n = self.n;
        Self::try_from_fn(n, |r, c| {
            let mut acc = Poly::zero(self.get(r, 0).ring());
            for k in 0..n {
                let (a, b) = (self.get(r, k), other.get(k, c));
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = acc.try_add(&a.try_mul(b)?)?;
            }
            Ok(acc)
        })
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.check(other)?;
        Self::try_from_fn(self.n, |r, c| self.get(r, c).try_add(other.get(r, c)))
    }

    pub fn sub(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.check(other)?;
        Self::try_from_fn(self.n, |r, c| self.get(r, c).try_sub(other.get(r, c)))
    }

    pub fn scalar_mul(&self, s: &Poly) -> Result<PolyMatrix> {
        Self::try_from_fn(self.n, |r, c| self.get(r, c).try_mul(s))
    }

    pub fn scale_int(&self, s: i64) -> PolyMatrix {
        self.map(|p| p.scale_int(s))
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> PolyMatrix {
        PolyMatrix { n: self.n, entries: self.entries.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&Poly) -> Result<Poly>) -> Result<PolyMatrix> {
        Ok(PolyMatrix { n: self.n, entries: self.entries.iter().map(f).collect::<Result<_>>()? })
    }

    pub fn trace(&self) -> Result<Poly> {
        let ring = self.ring().ok_or_else(|| Error::DimensionMismatch("empty matrix".into()))?;
        let mut acc = Poly::zero(ring);
        for i in 0..self.n {
            acc = acc.try_add(self.get(i, i))?;
        }
        Ok(acc)
    }

    fn check_size(&self) -> Result<()> {
        if self.n > MAX_EXPANSION_SIZE {
            return Err(Error::SizeLimit(format!(
                "Leibniz expansion limited to n <= {MAX_EXPANSION_SIZE}, got {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Leibniz expansion `Σ_σ sign(σ) Π_i A_{i,σ(i)}`.
    pub fn determinant(&self) -> Result<Poly> {
        self.check_size()?;
        let ring = self.ring().ok_or_else(|| Error::DimensionMismatch("empty matrix".into()))?;
        let rows: Vec<usize> = (0..self.n).collect();
        det_of(self, &rows, &rows, ring)
    }

    /// Determinant by expansion along minors, passing every partial product
    /// through `reduce` so intermediate sizes stay those of normal forms.
    pub fn determinant_reduced(&self, reduce: impl Fn(&Poly) -> Result<Poly>) -> Result<Poly> {
        self.check_size()?;
        let ring = self.ring().ok_or_else(|| Error::DimensionMismatch("empty matrix".into()))?;
        // minors on the last `k` rows, keyed by the bitmask of columns used
        let n = self.n;
        let mut minors: std::collections::HashMap<usize, Poly> = std::collections::HashMap::new();
        minors.insert(0, Poly::one(ring));
        for k in 1..=n {
            let row = n - k;
            let mut next = std::collections::HashMap::new();
            for mask in (0usize..1 << n).filter(|m| m.count_ones() as usize == k) {
                let mut acc = Poly::zero(ring);
                let mut sign = 1;
                for c in (0..n).filter(|c| mask & (1 << c) != 0) {
                    let e = self.get(row, c);
                    let rest = &minors[&(mask & !(1 << c))];
                    if !e.is_zero() && !rest.is_zero() {
                        let t = reduce(&e.try_mul(rest)?)?;
                        acc = if sign > 0 { acc.try_add(&t)? } else { acc.try_sub(&t)? };
                    }
                    sign = -sign;
                }
                next.insert(mask, acc);
            }
            minors = next;
        }
        reduce(&minors[&((1 << n) - 1)])
    }

    /// Classical adjoint, `adj(A)_{i,j} = (−1)^{i+j} det(A without row j, col i)`.
    pub fn adjugate(&self) -> Result<PolyMatrix> {
        self.check_size()?;
        let ring = self.ring().ok_or_else(|| Error::DimensionMismatch("empty matrix".into()))?.clone();
        let n = self.n;
        if n == 1 {
            return Ok(PolyMatrix::identity(&ring, 1));
        }
        Self::try_from_fn(n, |i, j| {
            let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
            let minor = det_of(self, &rows, &cols, &ring)?;
            Ok(if (i + j) % 2 == 0 { minor } else { -minor })
        })
    }
}

fn det_of(m: &PolyMatrix, rows: &[usize], cols: &[usize], ring: &Arc<Ring>) -> Result<Poly> {
    let k = rows.len();
    let mut acc = Poly::zero(ring);
    for sigma in permutations_unchecked(k) {
        let mut prod = Poly::int(ring, sigma.sign());
        for (t, &r) in rows.iter().enumerate() {
            let e = m.get(r, cols[sigma.apply(t + 1) - 1]);
            if e.is_zero() {
                prod = Poly::zero(ring);
                break;
            }
            prod = prod.try_mul(e)?;
        }
        if !prod.is_zero() {
            acc = acc.try_add(&prod)?;
        }
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatOp {
    Mul,
    Add,
    Trace,
    ScalarMul,
}

pub enum MatOperand<'a> {
    Matrix(&'a PolyMatrix),
    Scalar(&'a Poly),
    None,
}

#[derive(Debug)]
pub enum MatOutput {
    Matrix(PolyMatrix),
    Scalar(Poly),
}

pub fn mat_arith(kind: MatOp, a: &PolyMatrix, b: MatOperand<'_>) -> Result<MatOutput> {
    match (kind, b) {
        (MatOp::Mul, MatOperand::Matrix(b)) => a.mul(b).map(MatOutput::Matrix),
        (MatOp::Add, MatOperand::Matrix(b)) => a.add(b).map(MatOutput::Matrix),
        (MatOp::Trace, _) => a.trace().map(MatOutput::Scalar),
        (MatOp::ScalarMul, MatOperand::Scalar(s)) => a.scalar_mul(s).map(MatOutput::Matrix),
        (k, _) => Err(Error::DimensionMismatch(format!("{k:?}: wrong operand kind"))),
    }
}
