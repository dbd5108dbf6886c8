//! Numeric evaluation on SL_n(ℂ) representations, the direct geometric
//! value of a web, probabilistic zero tests, and the disk splitting map.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::groups::{a_matrix, bar, d_n, reduce_word, GroupoidPath, MarkedManifoldSpec, Word};
use crate::polyring::{same_ring, Block, Poly, VarName};
use crate::skein::{bar_involution, expand_all, normalize, Component, FramedKnot, SkeinRing, StatedArc, Web};

pub type CMatrix = DMatrix<Complex64>;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
const SINGULAR: f64 = 1e-8;
const MAX_RETRIES: usize = 64;

/// Seed used by trial `t` of a run started with `seed`.
pub fn trial_seed(seed: u64, t: usize) -> u64 {
    seed.wrapping_add(t as u64)
}

fn random_matrix(rng: &mut impl Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn sample_sln_with(rng: &mut impl Rng, n: usize) -> Result<CMatrix> {
    for _ in 0..MAX_RETRIES {
        let m = random_matrix(rng, n);
        let det = m.determinant();
        if det.norm() < SINGULAR {
            continue;
        }
        let root = det.powf(1.0 / n as f64);
        return Ok(m.map(|z| z / root));
    }
    Err(Error::Unsupported("could not sample a nonsingular matrix".into()))
}

/// Random element of SL_n(ℂ): uniform entries in the unit square, divided by
/// the principal n-th root of the determinant.
pub fn sample_sln(n: usize, seed: u64) -> Result<CMatrix> {
    if n < 2 {
        return Err(Error::SizeLimit(format!("n = {n} must be at least 2")));
    }
    sample_sln_with(&mut ChaCha8Rng::seed_from_u64(seed), n)
}

fn a_complex(n: usize) -> CMatrix {
    let a = a_matrix(n);
    CMatrix::from_fn(n, n, |r, c| Complex64::new(a.get(r, c) as f64, 0.0))
}

fn invert(m: &CMatrix) -> Result<CMatrix> {
    m.clone().try_inverse().ok_or_else(|| Error::DimensionMismatch("singular matrix in representation".into()))
}

/// One SL_n(ℂ) matrix per generator and connector block.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    pub n: usize,
    pub blocks: BTreeMap<Block, CMatrix>,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepReport {
    pub det_residual: f64,
    pub constraint_residual: f64,
    pub ok: bool,
}

impl Representation {
    pub fn new(n: usize) -> Self {
        Representation { n, blocks: BTreeMap::new(), tolerance: DEFAULT_TOLERANCE }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn insert(&mut self, block: Block, m: CMatrix) -> Result<()> {
        if m.nrows() != self.n || m.ncols() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "block {block} is {}x{}, expected {}x{}",
                m.nrows(),
                m.ncols(),
                self.n,
                self.n
            )));
        }
        self.blocks.insert(block, m);
        Ok(())
    }

    pub fn get(&self, block: Block) -> Result<&CMatrix> {
        self.blocks.get(&block).ok_or_else(|| Error::MissingBlock(block.to_string()))
    }

    /// A point of the representation variety of `spec`. Free generators are
    /// sampled; a generator pinned by a one-letter circle is set to `±I`; a
    /// generator whose only relators are powers `g^e` gets a random conjugate
    /// of a diagonal matrix of e-th roots of unity. Anything else is
    /// unsupported.
    pub fn sample(spec: &MarkedManifoldSpec, seed: u64) -> Result<Representation> {
        let n = spec.n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rep = Representation::new(n);
        let mut pinned: BTreeMap<usize, i64> = BTreeMap::new();
        for c in &spec.circles {
            let w = reduce_word(&c.word);
            match w.letters() {
                [l] => {
                    pinned.insert(l.gen, if c.spin % 2 == 1 { d_n(n) } else { 1 });
                }
                _ => return Err(Error::Unsupported(format!("no sampler for circle {w}"))),
            }
        }
        let mut orders: BTreeMap<usize, u32> = BTreeMap::new();
        for r in &spec.group.relators {
            let w = reduce_word(r);
            match power_of_one_generator(&w) {
                Some((g, e)) => {
                    let o = orders.entry(g).or_insert(0);
                    *o = gcd(*o, e);
                }
                None if w.is_empty() => {}
                None => return Err(Error::Unsupported(format!("no sampler for relator {w}"))),
            }
        }
        for g in 1..=spec.generators() {
            let m = if let Some(&s) = pinned.get(&g) {
                CMatrix::identity(n, n) * Complex64::new(s as f64, 0.0)
            } else if let Some(&e) = orders.get(&g) {
                finite_order(&mut rng, n, e)?
            } else {
                sample_sln_with(&mut rng, n)?
            };
            rep.insert(Block::Gen(g), m)?;
        }
        for c in 1..=spec.connectors() {
            rep.insert(Block::Conn(c), sample_sln_with(&mut rng, n)?)?;
        }
        let report = rep.validate(spec)?;
        if !report.ok {
            return Err(Error::Unsupported("sampled point misses the constraint surface".into()));
        }
        Ok(rep)
    }

    /// `ρ(w)`: product of block matrices (true inverses for inverse letters).
    pub fn word(&self, w: &Word) -> Result<CMatrix> {
        let mut acc = CMatrix::identity(self.n, self.n);
        for l in w.letters() {
            let g = self.get(Block::Gen(l.gen))?;
            acc = if l.inverse { acc * invert(g)? } else { acc * g };
        }
        Ok(acc)
    }

    fn connector(&self, marking: usize) -> Result<CMatrix> {
        if marking == 0 {
            Ok(CMatrix::identity(self.n, self.n))
        } else {
            self.get(Block::Conn(marking)).cloned()
        }
    }

    /// `ρ(path) = ρ(C_dst)·ρ(core)·ρ(C_src)⁻¹`.
    pub fn path(&self, p: &GroupoidPath) -> Result<CMatrix> {
        Ok(self.connector(p.dst)? * self.word(&p.core)? * invert(&self.connector(p.src)?)?)
    }

    /// Determinant and constraint residuals against `spec`.
    pub fn validate(&self, spec: &MarkedManifoldSpec) -> Result<RepReport> {
        if spec.n != self.n {
            return Err(Error::DimensionMismatch(format!("representation has n = {}, spec has n = {}", self.n, spec.n)));
        }
        let mut det_residual: f64 = 0.0;
        for g in 1..=spec.generators() {
            det_residual = det_residual.max((self.get(Block::Gen(g))?.determinant() - 1.0).norm());
        }
        for c in 1..=spec.connectors() {
            det_residual = det_residual.max((self.get(Block::Conn(c))?.determinant() - 1.0).norm());
        }
        let id = CMatrix::identity(self.n, self.n);
        let mut constraint_residual: f64 = 0.0;
        for r in &spec.group.relators {
            constraint_residual = constraint_residual.max((self.word(r)? - &id).norm());
        }
        for c in &spec.circles {
            let target = if c.spin % 2 == 1 { d_n(self.n) as f64 } else { 1.0 };
            constraint_residual = constraint_residual.max((self.word(&c.word)? - &id * Complex64::new(target, 0.0)).norm());
        }
        let ok = det_residual <= self.tolerance && constraint_residual <= self.tolerance;
        Ok(RepReport { det_residual, constraint_residual, ok })
    }

    pub fn to_json(&self) -> String {
        let file: RepFile = self
            .blocks
            .iter()
            .map(|(b, m)| {
                let rows = (0..self.n).map(|r| (0..self.n).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect();
                (b.to_string(), rows)
            })
            .collect();
        serde_json::to_string_pretty(&file).expect("representation serializes")
    }

    pub fn from_json(text: &str) -> Result<Representation> {
        let file: RepFile = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        let n = file.values().next().map(|m| m.len()).ok_or_else(|| Error::InvalidSpec("empty representation".into()))?;
        let mut rep = Representation::new(n);
        for (name, rows) in file {
            let block: Block = name.parse()?;
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::DimensionMismatch(format!("block {name} is not {n}x{n}")));
            }
            rep.insert(block, CMatrix::from_fn(n, n, |r, c| Complex64::new(rows[r][c][0], rows[r][c][1])))?;
        }
        Ok(rep)
    }

    pub fn load(path: &Path) -> Result<Representation> {
        Representation::from_json(&fs::read_to_string(path)?)
    }
}

type RepFile = BTreeMap<String, Vec<Vec<[f64; 2]>>>;

fn power_of_one_generator(w: &Word) -> Option<(usize, u32)> {
    let first = w.letters().first()?;
    w.letters().iter().all(|l| l.gen == first.gen).then_some((first.gen, w.len() as u32))
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn finite_order(rng: &mut impl Rng, n: usize, e: u32) -> Result<CMatrix> {
    let mut exps: Vec<u32> = (0..n - 1).map(|_| rng.random_range(0..e)).collect();
    let used: u32 = exps.iter().sum::<u32>() % e;
    exps.push((e - used) % e);
    let diag = CMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::from_polar(1.0, std::f64::consts::TAU * exps[r] as f64 / e as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let p = sample_sln_with(rng, n)?;
    Ok(&p * diag * invert(&p)?)
}

/// Substitute block entries for the variables of `p`.
pub fn evaluate(p: &Poly, rep: &Representation) -> Result<Complex64> {
    let ring = p.ring();
    if ring.n() != rep.n {
        return Err(Error::DimensionMismatch(format!("ring has n = {}, representation has n = {}", ring.n(), rep.n)));
    }
    let mut vals = Vec::with_capacity(ring.var_count());
    for v in 0..ring.var_count() {
        match ring.var_name(v) {
            VarName::Entry(bv) => vals.push(rep.get(bv.block)?[(bv.row - 1, bv.col - 1)]),
            VarName::Aux(name) => return Err(Error::MissingBlock(name)),
        }
    }
    Ok(p.eval_with(|v| vals[v], |c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)))
}

fn spin_factor(n: usize, h: u8) -> f64 {
    d_n(n).pow(h as u32 % 2) as f64
}

fn arc_value(rep: &Representation, arc: &StatedArc) -> Result<Complex64> {
    let n = rep.n;
    let m = a_complex(n) * rep.path(&arc.path)?;
    Ok(m[(bar(n, arc.end_state) - 1, bar(n, arc.start_state) - 1)] * spin_factor(n, arc.spin))
}

fn knot_value(rep: &Representation, knot: &FramedKnot) -> Result<Complex64> {
    Ok(rep.word(&knot.word)?.trace() * spin_factor(rep.n, knot.spin))
}

fn vertex_free_value(rep: &Representation, web: &Web) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for c in &web.components {
        acc *= match c {
            Component::Arc(a) => arc_value(rep, a)?,
            Component::Knot(k) => knot_value(rep, k)?,
            Component::Vertex(v) => return Err(Error::InvalidWeb(format!("vertex v{} must be expanded first", v.id))),
        };
    }
    Ok(acc)
}

/// The geometric value of a web at `ρ`: `d_n^h·[A·ρ(path)]_{ī,j̄}` per arc,
/// `d_n^h·tr ρ(w)` per knot, vertices by the determinant expansion.
pub fn phi_direct(spec: &MarkedManifoldSpec, web: &Web, rep: &Representation) -> Result<Complex64> {
    web.validate(spec)?;
    if rep.n != spec.n {
        return Err(Error::DimensionMismatch(format!("representation has n = {}, spec has n = {}", rep.n, spec.n)));
    }
    if !web.has_vertices() {
        return vertex_free_value(rep, web);
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (c, w) in expand_all(spec, web, &[])? {
        total += vertex_free_value(rep, &w)? * c as f64;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub seed: u64,
    pub value: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroVerdict {
    pub zero: bool,
    pub trials: usize,
    pub max_abs: f64,
    pub witness: Option<Witness>,
}

/// Evaluate `p` at `trials` sampled points; zero when every value is within `tol`.
pub fn probably_zero(p: &Poly, spec: &MarkedManifoldSpec, trials: usize, seed: u64, tol: f64) -> Result<ZeroVerdict> {
    if !same_ring(p.ring(), &spec.ring()) {
        return Err(Error::RingMismatch("polynomial is not in the ring of the spec".into()));
    }
    let mut max_abs: f64 = 0.0;
    let mut witness = None;
    for t in 0..trials {
        let s = trial_seed(seed, t);
        let rep = Representation::sample(spec, s)?;
        let value = evaluate(p, &rep)?;
        if value.norm() > max_abs {
            max_abs = value.norm();
        }
        if witness.is_none() && value.norm() > tol {
            witness = Some(Witness { seed: s, value });
        }
    }
    Ok(ZeroVerdict { zero: witness.is_none(), trials, max_abs, witness })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TauReport {
    pub trials: usize,
    pub max_deviation: f64,
    pub worst_seed: Option<u64>,
}

impl TauReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_deviation <= tol
    }
}

/// Compare the symbolic route with the geometric one. Arc variables are read
/// at barred indices, so the symbolic normal form is pushed through the
/// involution `x_{i,j} ↦ x_{ī,j̄}` before evaluation.
pub fn tau_check(sr: &SkeinRing, web: &Web, trials: usize, seed: u64) -> Result<TauReport> {
    let symbolic = bar_involution(sr.ring(), &normalize(sr, web)?)?;
    let mut report = TauReport { trials, max_deviation: 0.0, worst_seed: None };
    for t in 0..trials {
        let s = trial_seed(seed, t);
        let rep = Representation::sample(sr.spec(), s)?;
        let dev = (evaluate(&symbolic, &rep)? - phi_direct(sr.spec(), web, &rep)?).norm();
        if report.worst_seed.is_none() || dev > report.max_deviation {
            report.max_deviation = dev;
            report.worst_seed = Some(s);
        }
    }
    Ok(report)
}

/// One product of arcs and knots in the cut manifold, with a sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitTerm {
    pub coeff: i64,
    pub web: Web,
}

/// `Θ(web)`: per component, a signed state sum of webs in the cut manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitImage {
    pub cut: MarkedManifoldSpec,
    pub factors: Vec<Vec<SplitTerm>>,
}

impl SplitImage {
    pub fn crossings(&self) -> usize {
        self.factors.len()
    }

    /// Fully expanded sum of products.
    pub fn expand(&self) -> Vec<SplitTerm> {
        let mut acc = vec![SplitTerm { coeff: 1, web: Web::default() }];
        for f in &self.factors {
            let mut next = Vec::with_capacity(acc.len() * f.len());
            for a in &acc {
                for b in f {
                    next.push(SplitTerm { coeff: a.coeff * b.coeff, web: a.web.union(&b.web) });
                }
            }
            acc = next;
        }
        acc
    }

    /// Normal form of the image in the cut ring.
    pub fn normalize(&self, cut: &SkeinRing) -> Result<Poly> {
        let mut acc = Poly::one(cut.ring());
        for f in &self.factors {
            let mut sum = Poly::zero(cut.ring());
            for t in f {
                sum = sum.try_add(&normalize(cut, &t.web)?.scale_int(t.coeff))?;
            }
            acc = cut.reduce(&acc.try_mul(&sum)?)?;
        }
        Ok(acc)
    }

    pub fn phi(&self, rep: &Representation) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for f in &self.factors {
            let mut sum = Complex64::new(0.0, 0.0);
            for t in f {
                sum += phi_direct(&self.cut, &t.web, rep)? * t.coeff as f64;
            }
            acc *= sum;
        }
        Ok(acc)
    }
}

/// Spec obtained by cutting along the disk dual to the last generator: one
/// generator fewer, two new markings `β₁ = e_k` and `β₂ = e_{k+1}`.
pub fn cut_spec(spec: &MarkedManifoldSpec) -> Result<MarkedManifoldSpec> {
    if !spec.group.is_free() || !spec.circles.is_empty() {
        return Err(Error::Unsupported("splitting needs a free group without circles".into()));
    }
    if spec.generators() == 0 || spec.markings == 0 {
        return Err(Error::Unsupported("splitting needs at least one generator and one marking".into()));
    }
    Ok(MarkedManifoldSpec::free(spec.n, spec.generators() - 1, spec.markings + 2))
}

/// Word pieces between crossings of the cut generator, in word order:
/// `w = u_0 g^{ε_1} u_1 ⋯ g^{ε_r} u_r`.
fn split_word(w: &Word, g: usize) -> (Vec<Word>, Vec<bool>) {
    let mut pieces = vec![Vec::new()];
    let mut signs = Vec::new();
    for l in w.letters() {
        if l.gen == g {
            signs.push(!l.inverse);
            pieces.push(Vec::new());
        } else {
            pieces.last_mut().unwrap().push(*l);
        }
    }
    (pieces.into_iter().map(Word::from_letters).collect::<Vec<Word>>(), signs)
}

fn states(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|s| {
                (1..=n).map(move |t| {
                    let mut s = s.clone();
                    s.push(t);
                    s
                })
            })
            .collect();
    }
    out
}

/// `Θ` on a vertex-free web. Each letter `g_m^{±1}` is one crossing of the
/// disk; a crossing entered positively runs from `β₁` to `β₂`, a negative
/// one from `β₂` to `β₁` and carries a factor `d_n`.
pub fn theta_split(spec: &MarkedManifoldSpec, web: &Web) -> Result<SplitImage> {
    let cut = cut_spec(spec)?;
    web.validate(spec)?;
    if web.has_vertices() {
        return Err(Error::Unsupported("expand vertices before splitting".into()));
    }
    let n = spec.n;
    let g = spec.generators();
    let (b1, b2) = (spec.markings, spec.markings + 1);
    let entry = |pos: bool| if pos { b1 } else { b2 };
    let exit = |pos: bool| if pos { b2 } else { b1 };
    let mut factors = Vec::new();
    for c in &web.components {
        match c {
            Component::Arc(a) => {
                let (pieces, signs) = split_word(&a.path.core, g);
                let r = signs.len();
                let sign = d_n(n).pow(signs.iter().filter(|p| !**p).count() as u32);
                let mut terms = Vec::new();
                for s in states(n, r) {
                    // piece t runs from the exit of crossing t+1 (or e_a) to
                    // the entry of crossing t (or e_b)
                    let comps = (0..=r)
                        .map(|t| {
                            let src = if t == r { a.path.src } else { exit(signs[t]) };
                            let dst = if t == 0 { a.path.dst } else { entry(signs[t - 1]) };
                            let end = if t == 0 { a.end_state } else { s[t - 1] };
                            let start = if t == r { a.start_state } else { s[t] };
                            let spin = if t == 0 { a.spin } else { 0 };
                            Component::Arc(StatedArc::new(GroupoidPath::new(src, dst, pieces[t].clone()), end, start, spin))
                        })
                        .collect();
                    terms.push(SplitTerm { coeff: sign, web: Web::new(comps) });
                }
                factors.push(terms);
            }
            Component::Knot(k) => {
                let (pieces, signs) = split_word(&k.word, g);
                let r = signs.len();
                if r == 0 {
                    factors.push(vec![SplitTerm { coeff: 1, web: Web::knot(k.clone()) }]);
                    continue;
                }
                let sign = d_n(n).pow(signs.iter().filter(|p| !**p).count() as u32 + k.spin as u32 % 2);
                // the wrap-around piece joins the last and first segments
                let wrap = pieces[r].mul(&pieces[0]);
                let mut terms = Vec::new();
                for s in states(n, r) {
                    let comps = (0..r)
                        .map(|t| {
                            let (core, src, dst) = if t == 0 {
                                (wrap.clone(), exit(signs[0]), entry(signs[r - 1]))
                            } else {
                                (pieces[t].clone(), exit(signs[t]), entry(signs[t - 1]))
                            };
                            let end = s[(t + r - 1) % r];
                            Component::Arc(StatedArc::new(GroupoidPath::new(src, dst, core), end, s[t], 0))
                        })
                        .collect();
                    terms.push(SplitTerm { coeff: sign, web: Web::new(comps) });
                }
                factors.push(terms);
            }
            Component::Vertex(_) => unreachable!(),
        }
    }
    Ok(SplitImage { cut, factors })
}

/// Representation of the uncut manifold induced by one of the cut manifold:
/// `ρ(g_m) = ρ′(c_{k+1})⁻¹·A·ρ′(c_k)`, all other blocks copied.
pub fn glue_rep(spec: &MarkedManifoldSpec, cut_rep: &Representation) -> Result<Representation> {
    let cut = cut_spec(spec)?;
    let report = cut_rep.validate(&cut)?;
    if report.det_residual > cut_rep.tolerance {
        return Err(Error::InvalidSpec("cut representation is not in SL_n".into()));
    }
    let n = spec.n;
    let k = spec.markings;
    let mut rep = Representation::new(n).with_tolerance(cut_rep.tolerance);
    for gi in 1..spec.generators() {
        rep.insert(Block::Gen(gi), cut_rep.get(Block::Gen(gi))?.clone())?;
    }
    for c in 1..k {
        rep.insert(Block::Conn(c), cut_rep.get(Block::Conn(c))?.clone())?;
    }
    let glued = invert(&cut_rep.connector(k + 1)?)? * a_complex(n) * cut_rep.connector(k)?;
    rep.insert(Block::Gen(spec.generators()), glued)?;
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitReport {
    pub image: SplitImage,
    pub residual: f64,
    pub trials: usize,
}

/// Max over sampled `ρ′` of `|Φ(Θ(web))(ρ′) − Φ(web)(glue(ρ′))|`.
pub fn split_check(spec: &MarkedManifoldSpec, web: &Web, trials: usize, seed: u64) -> Result<SplitReport> {
    let image = theta_split(spec, web)?;
    let mut residual: f64 = 0.0;
    for t in 0..trials {
        let cut_rep = Representation::sample(&image.cut, trial_seed(seed, t))?;
        let rep = glue_rep(spec, &cut_rep)?;
        residual = residual.max((image.phi(&cut_rep)? - phi_direct(spec, web, &rep)?).norm());
    }
    Ok(SplitReport { image, residual, trials })
}

impl fmt::Display for SplitImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} factor(s), {} term(s)", self.factors.len(), self.factors.iter().map(|x| x.len()).product::<usize>())
    }
}

/// Render a complex number with fixed precision and no negative zeros.
pub fn format_complex(z: Complex64) -> String {
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    format!("{:.12}{:+.12}i", clean(z.re), clean(z.im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{Circle, GroupPresentation};
    use crate::polyring::{parse_poly, PolyMatrix};
    use crate::skein::{arc_element, build_ring, random_web, Edge, EdgeEnd, Vertex, VertexKind, WebShape};
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn arc(src: usize, dst: usize, word: &str, i: usize, j: usize) -> StatedArc {
        StatedArc::new(GroupoidPath::new(src, dst, w(word)), i, j, 0)
    }

    fn real(n: usize, v: &[f64]) -> CMatrix {
        CMatrix::from_fn(n, n, |r, c| Complex64::new(v[r * n + c], 0.0))
    }

    #[test]
    fn sampler() {
        for n in 2..=5 {
            let m = sample_sln(n, 11).unwrap();
            assert!((m.determinant() - 1.0).norm() <= 1e-12);
            assert_eq!(m, sample_sln(n, 11).unwrap());
            assert_ne!(m, sample_sln(n, 12).unwrap());
        }
        assert!(sample_sln(1, 0).is_err());
        let spec = MarkedManifoldSpec::free(2, 1, 1);
        let mut rep = Representation::new(2);
        rep.insert(Block::Gen(1), CMatrix::identity(2, 2)).unwrap();
        assert!(rep.validate(&spec).unwrap().ok);
    }

    #[test]
    fn evaluate_examples() {
        let spec = MarkedManifoldSpec::free(3, 1, 2);
        let ring = spec.ring();
        let rep = Representation::sample(&spec, 5).unwrap();
        assert_eq!(evaluate(&Poly::one(&ring), &rep).unwrap(), Complex64::new(1.0, 0.0));
        let x = parse_poly(&ring, "c1[2][3]").unwrap();
        assert_eq!(evaluate(&x, &rep).unwrap(), rep.get(Block::Conn(1)).unwrap()[(1, 2)]);
        let det = PolyMatrix::generic(&ring, Block::Gen(1)).unwrap().determinant().unwrap();
        assert!((evaluate(&det, &rep).unwrap() - 1.0).norm() < 1e-10);
        let mut partial = Representation::new(3);
        partial.insert(Block::Gen(1), CMatrix::identity(3, 3)).unwrap();
        assert!(matches!(evaluate(&x, &partial), Err(Error::MissingBlock(_))));
    }

    #[test]
    fn phi_examples() {
        let spec = MarkedManifoldSpec::free(2, 1, 1);
        let mut rep = Representation::new(2);
        rep.insert(Block::Gen(1), real(2, &[1.0, 1.0, 0.0, 1.0])).unwrap();
        let v = phi_direct(&spec, &Web::arc(arc(0, 0, "g1", 1, 1)), &rep).unwrap();
        assert!((v + 1.0).norm() < 1e-14);
        let v = phi_direct(&spec, &Web::knot(FramedKnot::new(w("g1"), 0)), &rep).unwrap();
        assert!((v - 2.0).norm() < 1e-14);
        let sr = build_ring(&spec).unwrap();
        let t = arc(0, 0, "", 1, 2);
        let v = phi_direct(&spec, &Web::arc(t.clone()), &rep).unwrap();
        assert!((v + 1.0).norm() < 1e-14);
        assert!((evaluate(&arc_element(&sr, &t).unwrap(), &rep).unwrap() - v).norm() < 1e-14);
    }

    #[test]
    fn zero_tests() {
        let spec = MarkedManifoldSpec::free(2, 1, 1);
        let ring = spec.ring();
        let v = probably_zero(&Poly::zero(&ring), &spec, 5, 1, 1e-8).unwrap();
        assert!(v.zero && v.witness.is_none());
        let det = parse_poly(&ring, "g1[1][1]*g1[2][2] - g1[1][2]*g1[2][1] - 1").unwrap();
        assert!(probably_zero(&det, &spec, 20, 1, 1e-8).unwrap().zero);
        let x = parse_poly(&ring, "g1[1][1]").unwrap();
        let v = probably_zero(&x, &spec, 20, 1, 1e-8).unwrap();
        assert!(!v.zero);
        assert_eq!(v.witness.unwrap().seed, 1);
        let other = MarkedManifoldSpec::free(2, 2, 1);
        assert!(probably_zero(&x, &other, 1, 0, 1e-8).is_err());
    }

    #[test]
    fn constrained_samplers() {
        let mut z2 = MarkedManifoldSpec::free(2, 1, 1);
        z2.group = GroupPresentation { generators: 1, relators: vec![w("g1*g1")] };
        for s in 0..5 {
            let rep = Representation::sample(&z2, s).unwrap();
            assert!(rep.validate(&z2).unwrap().constraint_residual < 1e-9);
        }
        let mut circ = MarkedManifoldSpec::free(3, 2, 1);
        circ.circles.push(Circle { word: w("g2"), spin: 1 });
        let rep = Representation::sample(&circ, 3).unwrap();
        assert_eq!(rep.get(Block::Gen(2)).unwrap(), &CMatrix::identity(3, 3));
        let mut hard = MarkedManifoldSpec::free(2, 2, 1);
        hard.group.relators.push(w("g1*g2*g1^-1*g2^-1"));
        assert!(matches!(Representation::sample(&hard, 0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn rep_file_round_trip() {
        let spec = MarkedManifoldSpec::free(3, 2, 2);
        let rep = Representation::sample(&spec, 9).unwrap();
        let back = Representation::from_json(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
        assert!(matches!(Representation::from_json("{\"g1\": [[[1, 0]"), Err(Error::Parse { .. })));
        assert!(Representation::from_json("{\"g1\": [[[1, 0], [0, 0]]]}").is_err());
    }

    #[test]
    fn arcs_read_entries_of_a_rho() {
        for n in 2..=4 {
            let spec = MarkedManifoldSpec::free(n, 1, 1);
            let rep = Representation::sample(&spec, n as u64).unwrap();
            let target = a_complex(n) * rep.get(Block::Gen(1)).unwrap();
            for i in 1..=n {
                for j in 1..=n {
                    let v = phi_direct(&spec, &Web::arc(arc(0, 0, "g1", i, j)), &rep).unwrap();
                    assert!((v - target[(bar(n, i) - 1, bar(n, j) - 1)]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sink_is_signed_column_determinant() {
        for n in 2..=3 {
            let spec = MarkedManifoldSpec::free(n, 2, 2);
            let rep = Representation::sample(&spec, 40 + n as u64).unwrap();
            let words = ["g1", "g2^-1", "g1*g2"];
            let states: Vec<usize> = (1..=n).rev().collect();
            let edges = (0..n)
                .map(|t| Edge { word: w(words[t]), far: EdgeEnd::Marking { marking: t % 2, state: states[t] } })
                .collect();
            let web = Web::new(vec![Component::Vertex(Vertex { id: 0, kind: VertexKind::Sink, edges, drag: Word::empty() })]);
            let cols: Vec<CMatrix> =
                (0..n).map(|t| a_complex(n) * rep.path(&GroupoidPath::new(t % 2, 0, w(words[t]))).unwrap()).collect();
            let m = CMatrix::from_fn(n, n, |r, t| cols[t][(r, bar(n, states[t]) - 1)]);
            let sign = if (n * (n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let v = phi_direct(&spec, &web, &rep).unwrap();
            assert!((v - m.determinant() * sign).norm() < 1e-10);
        }
    }

    #[test]
    fn tau_examples() {
        for n in 2..=3 {
            let sr = build_ring(&MarkedManifoldSpec::free(n, 1, 1)).unwrap();
            for i in 1..=n {
                for j in 1..=n {
                    let r = tau_check(&sr, &Web::arc(arc(0, 0, "g1*g1", i, j)), 3, 7).unwrap();
                    assert!(r.passed(1e-9), "{r:?}");
                }
            }
            let r = tau_check(&sr, &Web::knot(FramedKnot::new(w("g1^-1*g1^-1"), 1)), 5, 1).unwrap();
            assert!(r.passed(1e-9));
        }
        let sr = build_ring(&MarkedManifoldSpec::free(2, 1, 1)).unwrap();
        let sink = Vertex {
            id: 0,
            kind: VertexKind::Sink,
            edges: vec![
                Edge { word: w("g1"), far: EdgeEnd::Vertex(1) },
                Edge { word: Word::empty(), far: EdgeEnd::Marking { marking: 0, state: 2 } },
            ],
            drag: w("g1^-1"),
        };
        let source = Vertex {
            id: 1,
            kind: VertexKind::Source,
            edges: vec![
                Edge { word: Word::empty(), far: EdgeEnd::Marking { marking: 0, state: 1 } },
                Edge { word: w("g1"), far: EdgeEnd::Vertex(0) },
            ],
            drag: Word::empty(),
        };
        let web = Web::new(vec![Component::Vertex(sink), Component::Vertex(source)]);
        assert!(tau_check(&sr, &web, 10, 3).unwrap().passed(1e-8));
    }

    #[test]
    fn tau_with_circle_constraint() {
        let mut spec = MarkedManifoldSpec::free(2, 1, 1);
        spec.circles.push(Circle { word: w("g1"), spin: 0 });
        let sr = build_ring(&spec).unwrap();
        let r = tau_check(&sr, &Web::arc(arc(0, 0, "g1", 1, 2)), 3, 0).unwrap();
        assert!(r.passed(1e-9));
    }

    #[test]
    fn split_single_crossing() {
        for n in 2..=3 {
            let spec = MarkedManifoldSpec::free(n, 1, 1);
            for i in 1..=n {
                for j in 1..=n {
                    let report = split_check(&spec, &Web::arc(arc(0, 0, "g1", i, j)), 10, 100).unwrap();
                    assert!(report.residual <= 1e-9, "n={n} ({i},{j}) {}", report.residual);
                    assert_eq!(report.image.factors[0].len(), n);
                }
            }
        }
    }

    #[test]
    fn split_image_shape() {
        let spec = MarkedManifoldSpec::free(2, 1, 1);
        let image = theta_split(&spec, &Web::arc(arc(0, 0, "g1", 1, 2))).unwrap();
        assert_eq!(image.cut, MarkedManifoldSpec::free(2, 0, 3));
        let expected: Vec<SplitTerm> = (1..=2)
            .map(|t| SplitTerm { coeff: 1, web: Web::new(vec![Component::Arc(arc(2, 0, "", 1, t)), Component::Arc(arc(0, 1, "", t, 2))]) })
            .collect();
        assert_eq!(image.factors, vec![expected]);
        let plain = MarkedManifoldSpec::free(2, 2, 1);
        let web = Web::arc(arc(0, 0, "g1^-1", 2, 1));
        let image = theta_split(&plain, &web).unwrap();
        assert_eq!(image.factors, vec![vec![SplitTerm { coeff: 1, web: web.clone() }]]);
        assert!(split_check(&plain, &web, 3, 0).unwrap().residual <= 1e-12);
        let knot = theta_split(&spec, &Web::knot(FramedKnot::new(w("g1"), 0))).unwrap();
        let closed: Vec<SplitTerm> =
            (1..=2).map(|t| SplitTerm { coeff: 1, web: Web::arc(arc(2, 1, "", t, t)) }).collect();
        assert_eq!(knot.factors, vec![closed]);
    }

    #[test]
    fn split_squares() {
        let cases = [
            (2, 1, 1, vec!["knot:g1*g1"]),
            (2, 2, 1, vec!["knot:g2*g1*g2"]),
            (3, 2, 2, vec!["arc:g2^-1*g1*g2"]),
            (3, 1, 2, vec!["arc:g1^-1", "knot:g1^-1*g1^-1"]),
            (2, 2, 2, vec!["arc:g2*g1^-1*g2^-1", "knot:g1"]),
            (3, 2, 1, vec!["knot:g2*g1*g2^-1*g1"]),
            (2, 1, 2, vec!["arc:g1^-1"]),
            (2, 2, 1, vec!["arc:g2*g1*g2*g2", "knot:g2^-1"]),
            (2, 1, 1, vec!["knot:g1^-1*g1^-1*g1^-1"]),
        ];
        for (n, m, k, comps) in cases {
            let spec = MarkedManifoldSpec::free(n, m, k);
            let web = Web::new(
                comps
                    .iter()
                    .enumerate()
                    .map(|(t, c)| match c.split_once(':').unwrap() {
                        ("arc", word) => Component::Arc(StatedArc::new(
                            GroupoidPath::new(t % k, (t + 1) % k, w(word)),
                            1 + t % n,
                            n,
                            (t % 2) as u8,
                        )),
                        (_, word) => Component::Knot(FramedKnot::new(w(word), 1)),
                    })
                    .collect(),
            );
            let report = split_check(&spec, &web, 10, 7).unwrap();
            assert!(report.residual <= 1e-9, "{comps:?}: {}", report.residual);
        }
    }

    #[test]
    fn split_image_normal_form_agrees() {
        let spec = MarkedManifoldSpec::free(2, 1, 1);
        let web = Web::arc(arc(0, 0, "g1*g1^-1*g1", 2, 1));
        let image = theta_split(&spec, &web).unwrap();
        let cut = build_ring(&image.cut).unwrap();
        let sym = bar_involution(cut.ring(), &image.normalize(&cut).unwrap()).unwrap();
        for s in 0..5 {
            let rep = Representation::sample(&image.cut, s).unwrap();
            assert!((evaluate(&sym, &rep).unwrap() - image.phi(&rep).unwrap()).norm() < 1e-9);
        }
    }

    #[test]
    fn split_rejects() {
        let mut z2 = MarkedManifoldSpec::free(2, 1, 1);
        z2.group.relators.push(w("g1*g1"));
        assert!(matches!(theta_split(&z2, &Web::default()), Err(Error::Unsupported(_))));
        assert!(theta_split(&MarkedManifoldSpec::free(2, 1, 0), &Web::default()).is_err());
    }

    #[test]
    fn format() {
        assert_eq!(format_complex(Complex64::new(-0.0, 1e-15)), "0.000000000000+0.000000000000i");
        assert_eq!(format_complex(Complex64::new(1.5, -2.0)), "1.500000000000-2.000000000000i");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn route_consistency(seed in any::<u64>(), n in 2usize..=3, vertices in 0usize..=1) {
            let spec = MarkedManifoldSpec::free(n, 2, 2);
            let sr = build_ring(&spec).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shape = WebShape { max_components: 3, max_word_len: 4, max_letters: 6, vertices };
            let web = random_web(&mut rng, &spec, &shape);
            let r = tau_check(&sr, &web, 3, seed).unwrap();
            prop_assert!(r.passed(1e-8), "{:?}", r);
        }

        #[test]
        fn zero_normal_forms_vanish(seed in any::<u64>()) {
            let spec = MarkedManifoldSpec::free(2, 1, 1);
            let sr = build_ring(&spec).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let web = random_web(&mut rng, &spec, &WebShape { max_components: 2, max_word_len: 3, max_letters: 5, vertices: 0 });
            let p = normalize(&sr, &web).unwrap();
            let v = probably_zero(&p, &spec, 10, seed, 1e-10).unwrap();
            prop_assert_eq!(v.zero, p.is_zero());
        }
    }
}
