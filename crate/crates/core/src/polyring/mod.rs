//! Exact sparse polynomials over ℚ in block-indexed matrix-entry variables.
//!
//! Variables are laid out block-major: generator blocks `g1..gm`, then
//! connector blocks `c1..c(k−1)`, each holding `n²` entries in row-major
//! order, followed by any auxiliary (named) variables. Monomials are compared
//! in graded reverse lexicographic order with `x_0 > x_1 > ..`.

mod matrix;
mod monomial;
mod poly;
mod text;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use matrix::{mat_arith, MatOp, MatOperand, MatOutput, PolyMatrix};
pub use monomial::Monomial;
pub use poly::{poly_arith, reduce, ArithOp, Operand, Poly, Rational, DEFAULT_TERM_CAP};
pub use text::parse_poly;

/// Largest matrix size for which Leibniz expansions are attempted.
pub const MAX_EXPANSION_SIZE: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    /// Generator block `g<i>`, 1-based.
    Gen(usize),
    /// Connector block `c<t>`, 1-based.
    Conn(usize),
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Block::Gen(i) => write!(f, "g{i}"),
            Block::Conn(t) => write!(f, "c{t}"),
        }
    }
}

impl std::str::FromStr for Block {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(format!("bad block name `{s}`"));
        let (kind, idx) = s.split_at(1.min(s.len()));
        let idx: usize = idx.parse().map_err(|_| bad())?;
        if idx == 0 {
            return Err(bad());
        }
        match kind {
            "g" => Ok(Block::Gen(idx)),
            "c" => Ok(Block::Conn(idx)),
            _ => Err(bad()),
        }
    }
}

/// A matrix-entry variable `x^{block}_{row,col}` (1-based row/col).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockVar {
    pub block: Block,
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarName {
    Entry(BlockVar),
    Aux(String),
}

/// Ring descriptor: the variable layout shared by all polynomials in one ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    n: usize,
    generators: usize,
    connectors: usize,
    aux: Vec<String>,
}

impl Ring {
    pub fn new(n: usize, generators: usize, connectors: usize) -> Arc<Ring> {
        Arc::new(Ring { n, generators, connectors, aux: Vec::new() })
    }

    /// A ring with no matrix blocks, only named variables.
    pub fn scratch(names: &[&str]) -> Arc<Ring> {
        Arc::new(Ring { n: 0, generators: 0, connectors: 0, aux: names.iter().map(|s| s.to_string()).collect() })
    }

    /// Same blocks plus extra named variables ordered after everything else.
    pub fn with_aux(&self, names: &[&str]) -> Arc<Ring> {
        let mut r = self.clone();
        for name in names {
            r.aux.push(name.to_string());
        }
        Arc::new(r)
    }

    /// Same layout with one more connector block.
    pub fn with_extra_connector(&self) -> Arc<Ring> {
        let mut r = self.clone();
        r.connectors += 1;
        Arc::new(r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn connectors(&self) -> usize {
        self.connectors
    }

    pub fn aux_names(&self) -> &[String] {
        &self.aux
    }

    pub fn block_count(&self) -> usize {
        self.generators + self.connectors
    }

    pub fn blocks(&self) -> Vec<Block> {
        (1..=self.generators)
            .map(Block::Gen)
            .chain((1..=self.connectors).map(Block::Conn))
            .collect()
    }

    pub fn block_index(&self, block: Block) -> Option<usize> {
        match block {
            Block::Gen(i) if (1..=self.generators).contains(&i) => Some(i - 1),
            Block::Conn(t) if (1..=self.connectors).contains(&t) => Some(self.generators + t - 1),
            _ => None,
        }
    }

    pub fn has_block(&self, block: Block) -> bool {
        self.block_index(block).is_some()
    }

    pub fn var_count(&self) -> usize {
        self.block_count() * self.n * self.n + self.aux.len()
    }

    pub fn entry_var(&self, block: Block, row: usize, col: usize) -> Result<usize> {
        let b = self
            .block_index(block)
            .ok_or_else(|| Error::RingMismatch(format!("block {block} not in ring")))?;
        if row == 0 || col == 0 || row > self.n || col > self.n {
            return Err(Error::InvalidState { state: row.max(col), n: self.n });
        }
        Ok(b * self.n * self.n + (row - 1) * self.n + (col - 1))
    }

    pub fn aux_var(&self, name: &str) -> Option<usize> {
        let base = self.block_count() * self.n * self.n;
        self.aux.iter().position(|a| a == name).map(|p| base + p)
    }

    pub fn var_name(&self, v: usize) -> VarName {
        let nn = self.n * self.n;
        let entries = self.block_count() * nn;
        if v < entries {
            let b = v / nn;
            let r = v % nn;
            let block = if b < self.generators { Block::Gen(b + 1) } else { Block::Conn(b - self.generators + 1) };
            VarName::Entry(BlockVar { block, row: r / self.n + 1, col: r % self.n + 1 })
        } else {
            VarName::Aux(self.aux[v - entries].clone())
        }
    }

    /// Index of the variable in `self` that carries the same name as `v` in `other`.
    pub fn translate_var(&self, other: &Ring, v: usize) -> Option<usize> {
        match other.var_name(v) {
            VarName::Entry(bv) if other.n == self.n => self.entry_var(bv.block, bv.row, bv.col).ok(),
            VarName::Entry(_) => None,
            VarName::Aux(name) => self.aux_var(&name),
        }
    }
}

pub(crate) fn same_ring(a: &Arc<Ring>, b: &Arc<Ring>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// `{det(X_b) − 1 : b}`.
///
/// This set is already a Gröbner basis: under grevlex the leading monomial of
/// `det(X_b) − 1` is a product of entries of block `b` only, so leading
/// monomials of different generators are coprime and every S-polynomial
/// reduces to zero by Buchberger's first criterion.
pub fn det_basis(ring: &Arc<Ring>) -> Result<Vec<Poly>> {
    ring.blocks()
        .into_iter()
        .map(|b| {
            let det = PolyMatrix::generic(ring, b)?.determinant()?;
            Ok(&det - &Poly::one(ring))
        })
        .collect()
}

/// Normal form modulo the per-block determinant relations.
pub fn reduce_by_dets(p: &Poly, ring: &Arc<Ring>) -> Result<Poly> {
    if !same_ring(p.ring(), ring) {
        return Err(Error::RingMismatch("polynomial does not belong to the given ring".into()));
    }
    Ok(reduce(p, &det_basis(ring)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let r = Ring::new(2, 2, 1);
        assert_eq!(r.var_count(), 12);
        assert_eq!(r.entry_var(Block::Gen(1), 1, 1).unwrap(), 0);
        assert_eq!(r.entry_var(Block::Gen(2), 2, 1).unwrap(), 6);
        assert_eq!(r.entry_var(Block::Conn(1), 1, 2).unwrap(), 9);
        assert_eq!(
            r.var_name(9),
            VarName::Entry(BlockVar { block: Block::Conn(1), row: 1, col: 2 })
        );
        assert!(r.entry_var(Block::Conn(2), 1, 1).is_err());
        let y = r.with_aux(&["y"]);
        assert_eq!(y.aux_var("y"), Some(12));
        assert_eq!(y.translate_var(&r, 9), Some(9));
        let wider = r.with_extra_connector();
        assert_eq!(wider.translate_var(&r, 11), Some(11));
    }

    #[test]
    fn block_names() {
        assert_eq!("g3".parse::<Block>().unwrap(), Block::Gen(3));
        assert_eq!("c1".parse::<Block>().unwrap(), Block::Conn(1));
        assert!("x1".parse::<Block>().is_err());
        assert!("g0".parse::<Block>().is_err());
    }
}
