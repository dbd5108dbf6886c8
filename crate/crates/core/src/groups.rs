//! Free-group words, presentations, marked-manifold specs and the matrices
//! `Q_w` and `AS^{[path]}` attached to group and groupoid elements.

use std::fmt;
use std::sync::Arc;

use crate::combinatorics::permutations_unchecked;
use crate::error::{Error, Result};
use crate::polyring::{reduce_by_dets, Block, PolyMatrix, Ring};

/// `d_n = (−1)^{n−1}`.
pub fn d_n(n: usize) -> i64 {
    if n % 2 == 1 {
        1
    } else {
        -1
    }
}

/// `ī = n + 1 − i`.
pub fn bar(n: usize, i: usize) -> usize {
    n + 1 - i
}

/// Letter `g_gen^{±1}`; `gen` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn inv(self) -> Letter {
        Letter { gen: self.gen, inverse: !self.inverse }
    }
}

/// A freely reduced word in the generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Word {
        Word::default()
    }

    pub fn gen(g: usize) -> Word {
        Word { letters: vec![Letter { gen: g, inverse: false }] }
    }

    /// Build from `(generator, ±1)` pairs, freely reducing.
    pub fn from_pairs(pairs: &[(usize, i32)]) -> Result<Word> {
        let mut letters = Vec::new();
        for &(g, e) in pairs {
            if g == 0 || e.abs() != 1 {
                return Err(Error::InvalidGenerator { index: g, count: 0 });
            }
            letters.push(Letter { gen: g, inverse: e < 0 });
        }
        Ok(Word::from_letters(letters))
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::from_letters(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn inv(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    pub fn max_generator(&self) -> usize {
        self.letters.iter().map(|l| l.gen).max().unwrap_or(0)
    }

    pub fn check_generators(&self, count: usize) -> Result<()> {
        match self.letters.iter().find(|l| l.gen > count) {
            Some(l) => Err(Error::InvalidGenerator { index: l.gen, count }),
            None => Ok(()),
        }
    }

    /// Parse `g1*g2^-1*g1`; `g1^3` and `g1^-2` expand to repeated letters.
    /// The empty string is the identity.
    pub fn parse(text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        let mut offset = 0;
        for part in text.split('*') {
            let err = |msg: &str| Error::Parse { line: 1, column: offset + 1, message: format!("{msg} in word `{text}`") };
            let p = part.trim();
            let (base, exp) = match p.split_once('^') {
                Some((b, e)) => (b.trim(), e.trim().parse::<i32>().map_err(|_| err("bad exponent"))?),
                None => (p, 1),
            };
            let g: usize = base
                .strip_prefix('g')
                .and_then(|d| d.parse().ok())
                .filter(|&g| g > 0)
                .ok_or_else(|| err("expected a generator like g1"))?;
            if exp == 0 {
                return Err(err("zero exponent"));
            }
            for _ in 0..exp.unsigned_abs() {
                letters.push(Letter { gen: g, inverse: exp < 0 });
            }
            offset += part.len() + 1;
        }
        Ok(Word::from_letters(letters))
    }
}

pub fn reduce_word(w: &Word) -> Word {
    Word::from_letters(w.letters.iter().copied())
}

pub fn word_mul(u: &Word, v: &Word) -> Word {
    u.mul(v)
}

pub fn word_inv(u: &Word) -> Word {
    u.inv()
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "g{}", l.gen)?;
            if l.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

/// Uniform random reduced word of length `0..=max_len` over `m` generators.
pub fn random_word(rng: &mut impl rand::Rng, m: usize, max_len: usize) -> Word {
    if m == 0 {
        return Word::empty();
    }
    let len = rng.random_range(0..=max_len);
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter { gen: rng.random_range(1..=m), inverse: rng.random_bool(0.5) };
        if letters.last() != Some(&l.inv()) {
            letters.push(l);
        }
    }
    Word { letters }
}

/// Small dense integer matrix (used for the constant `A`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub n: usize,
    pub entries: Vec<i64>,
}

impl IntMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> i64) -> IntMatrix {
        IntMatrix { n, entries: (0..n * n).map(|k| f(k / n, k % n)).collect() }
    }

    pub fn identity(n: usize) -> IntMatrix {
        Self::from_fn(n, |r, c| (r == c) as i64)
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.n + c]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        Self::from_fn(self.n, |r, c| (0..self.n).map(|k| self.get(r, k) * other.get(k, c)).sum())
    }

    pub fn scale(&self, s: i64) -> IntMatrix {
        IntMatrix { n: self.n, entries: self.entries.iter().map(|e| e * s).collect() }
    }

    pub fn determinant(&self) -> i64 {
        permutations_unchecked(self.n)
            .iter()
            .map(|s| s.sign() * (0..self.n).map(|r| self.get(r, s.apply(r + 1) - 1)).product::<i64>())
            .sum()
    }

    pub fn to_poly(&self, ring: &Arc<Ring>) -> PolyMatrix {
        PolyMatrix::from_ints(ring, self.n, |r, c| self.get(r, c))
    }
}

/// `A_{i,j} = (−1)^{i+1} δ_{ī,j}`.
pub fn a_matrix(n: usize) -> IntMatrix {
    IntMatrix::from_fn(n, |r, c| {
        let (i, j) = (r + 1, c + 1);
        if j == bar(n, i) {
            if i % 2 == 1 {
                1
            } else {
                -1
            }
        } else {
            0
        }
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupPresentation {
    pub generators: usize,
    pub relators: Vec<Word>,
}

impl GroupPresentation {
    pub fn free(m: usize) -> Self {
        GroupPresentation { generators: m, relators: Vec::new() }
    }

    pub fn is_free(&self) -> bool {
        self.relators.is_empty()
    }
}

/// A boundary circle marking: its core word and spin bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circle {
    pub word: Word,
    pub spin: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedManifoldSpec {
    pub n: usize,
    pub group: GroupPresentation,
    /// Number `k` of interval markings `e_0..e_{k−1}`.
    pub markings: usize,
    pub circles: Vec<Circle>,
}

impl MarkedManifoldSpec {
    pub fn free(n: usize, m: usize, k: usize) -> Self {
        MarkedManifoldSpec { n, group: GroupPresentation::free(m), markings: k, circles: Vec::new() }
    }

    pub fn generators(&self) -> usize {
        self.group.generators
    }

    pub fn connectors(&self) -> usize {
        self.markings.saturating_sub(1)
    }

    pub fn block_count(&self) -> usize {
        self.generators() + self.connectors()
    }

    pub fn ring(&self) -> Arc<Ring> {
        Ring::new(self.n, self.generators(), self.connectors())
    }

    pub fn has_constraints(&self) -> bool {
        !self.group.relators.is_empty() || !self.circles.is_empty()
    }
}

/// A groupoid morphism `α_dst ∗ core ∗ α_src^{−1}` between markings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupoidPath {
    pub src: usize,
    pub dst: usize,
    pub core: Word,
}

impl GroupoidPath {
    pub fn new(src: usize, dst: usize, core: Word) -> Self {
        GroupoidPath { src, dst, core }
    }

    /// `self ∗ first`: traverse `first`, then `self`.
    pub fn after(&self, first: &GroupoidPath) -> Result<GroupoidPath> {
        if first.dst != self.src {
            return Err(Error::InvalidWeb(format!(
                "paths not composable: e{} -> e{} then e{} -> e{}",
                first.src, first.dst, self.src, self.dst
            )));
        }
        Ok(GroupoidPath { src: first.src, dst: self.dst, core: self.core.mul(&first.core) })
    }

    pub fn inv(&self) -> GroupoidPath {
        GroupoidPath { src: self.dst, dst: self.src, core: self.core.inv() }
    }
}

/// `Q_w`: product of `X_g` (or `adj(X_g)` for inverse letters) in word order.
pub fn holonomy(ring: &Arc<Ring>, w: &Word) -> Result<PolyMatrix> {
    w.check_generators(ring.generators())?;
    let n = ring.n();
    let mut q = PolyMatrix::identity(ring, n);
    let mut cache: Vec<Option<(PolyMatrix, Option<PolyMatrix>)>> = vec![None; ring.generators() + 1];
    for l in w.letters() {
        let slot = &mut cache[l.gen];
        if slot.is_none() {
            *slot = Some((PolyMatrix::generic(ring, Block::Gen(l.gen))?, None));
        }
        let (x, adj) = slot.as_mut().unwrap();
        let factor = if l.inverse {
            if adj.is_none() {
                *adj = Some(x.adjugate()?);
            }
            adj.as_ref().unwrap()
        } else {
            x
        };
        q = q.mul(factor)?;
    }
    Ok(q)
}

fn connector(ring: &Arc<Ring>, t: usize) -> Result<Option<PolyMatrix>> {
    if t == 0 {
        return Ok(None);
    }
    if t > ring.connectors() {
        return Err(Error::MarkingOutOfRange { index: t, count: ring.connectors() + 1 });
    }
    PolyMatrix::generic(ring, Block::Conn(t)).map(Some)
}

/// `AS^{[path]} = C_dst · Q_core · adj(C_src)` with `C_0 = I`.
pub fn morphism_matrix(ring: &Arc<Ring>, path: &GroupoidPath) -> Result<PolyMatrix> {
    let mut m = holonomy(ring, &path.core)?;
    if let Some(cb) = connector(ring, path.dst)? {
        m = cb.mul(&m)?;
    }
    if let Some(ca) = connector(ring, path.src)? {
        m = m.mul(&ca.adjugate()?)?;
    }
    Ok(m)
}

/// `morphism_matrix` with entries reduced modulo the determinant relations.
pub fn morphism_matrix_reduced(ring: &Arc<Ring>, path: &GroupoidPath) -> Result<PolyMatrix> {
    morphism_matrix(ring, path)?.try_map(|p| reduce_by_dets(p, ring))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    pub errors: Vec<String>,
    pub n: usize,
    pub blocks: usize,
    pub relator_constraints: usize,
    pub circle_constraints: usize,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} blocks={} relator_constraints={} circle_constraints={} {}",
            self.n,
            self.blocks,
            self.relator_constraints,
            self.circle_constraints,
            if self.ok { "ok" } else { "invalid" }
        )?;
        for e in &self.errors {
            write!(f, "\n  error: {e}")?;
        }
        Ok(())
    }
}

pub fn validate_manifold(spec: &MarkedManifoldSpec) -> ValidationReport {
    let mut errors = Vec::new();
    let m = spec.generators();
    if spec.n < 2 {
        errors.push(format!("n must be at least 2, got {}", spec.n));
    }
    if spec.n > crate::polyring::MAX_EXPANSION_SIZE {
        errors.push(format!("n must be at most {}, got {}", crate::polyring::MAX_EXPANSION_SIZE, spec.n));
    }
    for (i, r) in spec.group.relators.iter().enumerate() {
        if r.is_empty() {
            errors.push(format!("relator {} is trivial", i + 1));
        }
        if *r != reduce_word(r) {
            errors.push(format!("relator {} is not freely reduced", i + 1));
        }
        if let Err(e) = r.check_generators(m) {
            errors.push(format!("relator {}: {e}", i + 1));
        }
    }
    for (i, c) in spec.circles.iter().enumerate() {
        if let Err(e) = c.word.check_generators(m) {
            errors.push(format!("circle {}: {e}", i + 1));
        }
        if c.spin > 1 {
            errors.push(format!("circle {}: spin must be 0 or 1", i + 1));
        }
    }
    let nn = spec.n * spec.n;
    ValidationReport {
        ok: errors.is_empty(),
        errors,
        n: spec.n,
        blocks: spec.block_count(),
        relator_constraints: spec.group.relators.len() * nn,
        circle_constraints: spec.circles.len() * nn,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::reduce_by_dets;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn word_examples() {
        assert!(w("g1*g1^-1").is_empty());
        assert_eq!(w("g1*g2").inv(), w("g2^-1*g1^-1"));
        assert_eq!(w("g1*g2").mul(&w("g2^-1*g3")), w("g1*g3"));
        assert_eq!(w("g1^2*g2^-2").to_string(), "g1*g1*g2^-1*g2^-1");
        assert!(Word::parse("h1").is_err());
        assert!(Word::parse("g0").is_err());
        assert!(matches!(w("g3").check_generators(2), Err(Error::InvalidGenerator { index: 3, count: 2 })));
    }

    #[test]
    fn a_matrix_identities() {
        assert_eq!(a_matrix(2).entries, vec![0, 1, -1, 0]);
        assert_eq!(a_matrix(1).entries, vec![1]);
        for n in 1..=5 {
            let a = a_matrix(n);
            assert_eq!(a.mul(&a), IntMatrix::identity(n).scale(d_n(n)), "n={n}");
            assert_eq!(a.determinant(), 1, "n={n}");
        }
    }

    #[test]
    fn holonomy_examples() {
        let r = Ring::new(2, 1, 0);
        let x = PolyMatrix::generic(&r, Block::Gen(1)).unwrap();
        assert_eq!(holonomy(&r, &w("g1")).unwrap(), x);
        assert_eq!(holonomy(&r, &Word::from_letters(w("g1").letters().iter().copied().chain(w("g1^-1").letters().iter().copied()))).unwrap(), PolyMatrix::identity(&r, 2));
        let prod = holonomy(&r, &w("g1^-1")).unwrap().mul(&x).unwrap().try_map(|p| reduce_by_dets(p, &r)).unwrap();
        assert_eq!(prod, PolyMatrix::identity(&r, 2));
        assert!(holonomy(&r, &w("g2")).is_err());
    }

    #[test]
    fn morphism_examples() {
        let r = Ring::new(2, 1, 1);
        assert_eq!(morphism_matrix(&r, &GroupoidPath::new(0, 0, Word::empty())).unwrap(), PolyMatrix::identity(&r, 2));
        assert_eq!(
            morphism_matrix(&r, &GroupoidPath::new(0, 1, Word::empty())).unwrap(),
            PolyMatrix::generic(&r, Block::Conn(1)).unwrap()
        );
        let c = PolyMatrix::generic(&r, Block::Conn(1)).unwrap();
        let q = holonomy(&r, &w("g1")).unwrap();
        let expect = c.mul(&q).unwrap().mul(&c.adjugate().unwrap()).unwrap();
        assert_eq!(morphism_matrix(&r, &GroupoidPath::new(1, 1, w("g1"))).unwrap(), expect);
        assert!(matches!(morphism_matrix(&r, &GroupoidPath::new(0, 2, Word::empty())), Err(Error::MarkingOutOfRange { .. })));
    }

    #[test]
    fn validation() {
        let rep = validate_manifold(&MarkedManifoldSpec::free(2, 2, 1));
        assert!(rep.ok);
        assert_eq!((rep.blocks, rep.relator_constraints, rep.circle_constraints), (2, 0, 0));
        let z2 = MarkedManifoldSpec {
            n: 2,
            group: GroupPresentation { generators: 1, relators: vec![w("g1*g1")] },
            markings: 1,
            circles: vec![],
        };
        let rep = validate_manifold(&z2);
        assert!(rep.ok);
        assert_eq!((rep.blocks, rep.relator_constraints), (1, 4));
        let bad = MarkedManifoldSpec {
            n: 2,
            group: GroupPresentation { generators: 1, relators: vec![w("g2")] },
            markings: 1,
            circles: vec![Circle { word: Word::empty(), spin: 2 }],
        };
        assert_eq!(validate_manifold(&bad).errors.len(), 2);
    }

    fn arb_case() -> impl Strategy<Value = (usize, u64)> {
        (2usize..=3, any::<u64>())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn groupoid_relations((n, seed) in arb_case()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ring = Ring::new(n, 2, 1);
            let (a, b, c) = (rng.random_range(0..2), rng.random_range(0..2), rng.random_range(0..2));
            let max_len = if n == 3 { 2 } else { 3 };
            let q = GroupoidPath::new(a, b, random_word(&mut rng, 2, max_len));
            let p = GroupoidPath::new(b, c, random_word(&mut rng, 2, max_len));
            let pq = p.after(&q).unwrap();
            let lhs = morphism_matrix_reduced(&ring, &pq).unwrap();
            let rhs = morphism_matrix(&ring, &p).unwrap().mul(&morphism_matrix(&ring, &q).unwrap()).unwrap()
                .try_map(|e| reduce_by_dets(e, &ring)).unwrap();
            prop_assert_eq!(lhs, rhs);
            let det = morphism_matrix(&ring, &q).unwrap().determinant_reduced(|e| reduce_by_dets(e, &ring)).unwrap();
            prop_assert!(det.is_one());
        }

        #[test]
        fn reduction_is_canonical(pairs in proptest::collection::vec((1usize..4, prop_oneof![Just(1i32), Just(-1i32)]), 0..12)) {
            let word = Word::from_pairs(&pairs).unwrap();
            prop_assert_eq!(reduce_word(&word), word.clone());
            prop_assert!(word.mul(&word.inv()).is_empty());
            prop_assert_eq!(Word::parse(&word.to_string()).unwrap(), word);
        }
    }
}
