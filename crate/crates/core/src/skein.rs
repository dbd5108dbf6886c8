//! Stated n-webs and their normal forms in the presentation ring
//! `Γ_n(M) ⊗ O(SL_n)^{⊗(k−1)}`.
//!
//! An arc with groupoid class `path`, end state `i`, start state `j` and spin
//! `h` is `d_n^h·S_{i,j}` where `S = d_n·A·AS^{[path]}`; a knot is
//! `d_n^h·tr(Q_w)`. Vertices are removed by the determinant expansion
//! `Σ_σ (−1)^{ℓ(σ)} Π_t (edge t cut at e_0 with state σ(t))`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng as _;

use crate::combinatorics::permutations_unchecked;
use crate::error::{Error, Result};
use crate::groups::{
    a_matrix, bar, d_n, holonomy, morphism_matrix, random_word, validate_manifold, GroupoidPath, MarkedManifoldSpec,
    Word,
};
use crate::ideals::{manifold_ideal, GroebnerBasis, DEFAULT_BUDGET};
use crate::polyring::{det_basis, reduce, same_ring, Block, Poly, PolyMatrix, Rational, Ring, VarName};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StatedArc {
    pub path: GroupoidPath,
    /// State at the end point `α(1)`.
    pub end_state: usize,
    /// State at the start point `α(0)`.
    pub start_state: usize,
    pub spin: u8,
}

impl StatedArc {
    pub fn new(path: GroupoidPath, end_state: usize, start_state: usize, spin: u8) -> Self {
        StatedArc { path, end_state, start_state, spin }
    }

    pub fn flipped(&self) -> Self {
        StatedArc { spin: 1 - self.spin % 2, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FramedKnot {
    pub word: Word,
    pub spin: u8,
}

impl FramedKnot {
    pub fn new(word: Word, spin: u8) -> Self {
        FramedKnot { word, spin }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Sink,
    Source,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeEnd {
    /// The far end sits on marking `marking` with the given state.
    Marking { marking: usize, state: usize },
    /// The far end is another vertex.
    Vertex(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub word: Word,
    pub far: EdgeEnd,
}

/// An n-valent sink or source. Edges of a sink run into it, edges of a
/// source run out of it; the listed order fixes the sign convention. The
/// vertex is anchored at `e_0` via the drag word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub id: usize,
    pub kind: VertexKind,
    pub edges: Vec<Edge>,
    pub drag: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Arc(StatedArc),
    Knot(FramedKnot),
    Vertex(Vertex),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Web {
    pub components: Vec<Component>,
}

impl Web {
    pub fn new(components: Vec<Component>) -> Self {
        Web { components }
    }

    pub fn arc(arc: StatedArc) -> Self {
        Web { components: vec![Component::Arc(arc)] }
    }

    pub fn knot(knot: FramedKnot) -> Self {
        Web { components: vec![Component::Knot(knot)] }
    }

    pub fn union(&self, other: &Web) -> Web {
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        Web { components }
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.components.iter().filter_map(|c| match c {
            Component::Vertex(v) => Some(v),
            _ => None,
        })
    }

    pub fn vertex_ids(&self) -> Vec<usize> {
        self.vertices().map(|v| v.id).collect()
    }

    pub fn vertex(&self, id: usize) -> Option<&Vertex> {
        self.vertices().find(|v| v.id == id)
    }

    fn vertex_mut(&mut self, id: usize) -> Option<&mut Vertex> {
        self.components.iter_mut().find_map(|c| match c {
            Component::Vertex(v) if v.id == id => Some(v),
            _ => None,
        })
    }

    pub fn has_vertices(&self) -> bool {
        self.vertices().next().is_some()
    }

    /// Replace the drag word of one vertex.
    pub fn reanchored(&self, id: usize, drag: Word) -> Result<Web> {
        let mut w = self.clone();
        w.vertex_mut(id).ok_or_else(|| Error::InvalidWeb(format!("no vertex v{id}")))?.drag = drag;
        Ok(w)
    }

    /// Check the web against a spec: states, markings, generator indices,
    /// vertex arity and the consistency of vertex-to-vertex edges.
    pub fn validate(&self, spec: &MarkedManifoldSpec) -> Result<()> {
        let n = spec.n;
        let m = spec.generators();
        let k = spec.markings;
        let state = |s: usize| if (1..=n).contains(&s) { Ok(()) } else { Err(Error::InvalidState { state: s, n }) };
        let marking = |e: usize| {
            if e < k {
                Ok(())
            } else {
                Err(Error::MarkingOutOfRange { index: e, count: k })
            }
        };
        let spin = |h: u8| if h <= 1 { Ok(()) } else { Err(Error::InvalidWeb(format!("spin must be 0 or 1, got {h}"))) };
        let mut ids = std::collections::BTreeSet::new();
        for c in &self.components {
            match c {
                Component::Arc(a) => {
                    marking(a.path.src)?;
                    marking(a.path.dst)?;
                    state(a.end_state)?;
                    state(a.start_state)?;
                    spin(a.spin)?;
                    a.path.core.check_generators(m)?;
                }
                Component::Knot(kn) => {
                    spin(kn.spin)?;
                    kn.word.check_generators(m)?;
                }
                Component::Vertex(v) => {
                    if k == 0 {
                        return Err(Error::Unsupported("vertices need at least one interval marking".into()));
                    }
                    if !ids.insert(v.id) {
                        return Err(Error::InvalidWeb(format!("duplicate vertex id v{}", v.id)));
                    }
                    if v.edges.len() != n {
                        return Err(Error::InvalidWeb(format!(
                            "vertex v{} has {} edges, expected n = {n}",
                            v.id,
                            v.edges.len()
                        )));
                    }
                    v.drag.check_generators(m)?;
                    for e in &v.edges {
                        e.word.check_generators(m)?;
                        if let EdgeEnd::Marking { marking: a, state: s } = e.far {
                            marking(a)?;
                            state(s)?;
                        }
                    }
                }
            }
        }
        for v in self.vertices() {
            for (other, words) in neighbour_words(v) {
                let w = self
                    .vertex(other)
                    .ok_or_else(|| Error::InvalidWeb(format!("v{} points at missing vertex v{other}", v.id)))?;
                if w.kind == v.kind {
                    return Err(Error::InvalidWeb(format!("edge between v{} and v{other} joins two {:?}s", v.id, v.kind)));
                }
                let back = neighbour_words(w).remove(&v.id).unwrap_or_default();
                if back != words {
                    return Err(Error::InvalidWeb(format!(
                        "edges between v{} and v{other} disagree (count or words)",
                        v.id
                    )));
                }
            }
        }
        Ok(())
    }
}

fn neighbour_words(v: &Vertex) -> HashMap<usize, Vec<Word>> {
    let mut map: HashMap<usize, Vec<Word>> = HashMap::new();
    for e in &v.edges {
        if let EdgeEnd::Vertex(o) = e.far {
            map.entry(o).or_default().push(e.word.clone());
        }
    }
    map
}

/// The ring of a spec with its determinant basis and, when the spec has
/// relators or circles, a Gröbner basis of the full defining ideal.
#[derive(Clone, Debug)]
pub struct SkeinRing {
    spec: MarkedManifoldSpec,
    ring: Arc<Ring>,
    dets: Vec<Poly>,
    constraints: Option<GroebnerBasis>,
}

pub fn build_ring(spec: &MarkedManifoldSpec) -> Result<SkeinRing> {
    build_ring_with_budget(spec, DEFAULT_BUDGET)
}

pub fn build_ring_with_budget(spec: &MarkedManifoldSpec, budget: usize) -> Result<SkeinRing> {
    let report = validate_manifold(spec);
    if !report.ok {
        return Err(Error::InvalidSpec(report.errors.join("; ")));
    }
    let ring = spec.ring();
    let dets = det_basis(&ring)?;
    let constraints = if spec.has_constraints() {
        let gb = manifold_ideal(spec, budget)?;
        debug_assert!(same_ring(gb.ring(), &ring));
        Some(gb)
    } else {
        None
    };
    Ok(SkeinRing { spec: spec.clone(), ring, dets, constraints })
}

impl SkeinRing {
    pub fn spec(&self) -> &MarkedManifoldSpec {
        &self.spec
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn det_basis(&self) -> &[Poly] {
        &self.dets
    }

    pub fn constraints(&self) -> Option<&GroebnerBasis> {
        self.constraints.as_ref()
    }

    /// Canonical normal form: modulo the constraint basis when present,
    /// otherwise modulo the determinant relations.
    pub fn reduce(&self, p: &Poly) -> Result<Poly> {
        if !same_ring(p.ring(), &self.ring) {
            return Err(Error::RingMismatch("polynomial not in this skein ring".into()));
        }
        Ok(match &self.constraints {
            Some(gb) => reduce(p, gb.polys()),
            None => reduce(p, &self.dets),
        })
    }

    fn mul_reduce(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        self.reduce(&a.try_mul(b)?)
    }

    pub fn as_matrix(&self, path: &GroupoidPath) -> Result<PolyMatrix> {
        if path.src >= self.spec.markings.max(1) || path.dst >= self.spec.markings.max(1) {
            return Err(Error::MarkingOutOfRange { index: path.src.max(path.dst), count: self.spec.markings });
        }
        morphism_matrix(&self.ring, path)?.try_map(|p| self.reduce(p))
    }
}

/// Value of an arc given its `AS` matrix: `d_n^{h+1}(−1)^{i+1}·AS_{ī,j}`.
fn arc_from_matrix(n: usize, m: &PolyMatrix, arc: &StatedArc) -> Poly {
    let sign = d_n(n).pow(arc.spin as u32 + 1) * if arc.end_state % 2 == 1 { 1 } else { -1 };
    m.get(bar(n, arc.end_state) - 1, arc.start_state - 1).scale_int(sign)
}

fn check_arc(sr: &SkeinRing, arc: &StatedArc) -> Result<()> {
    if sr.spec.markings == 0 {
        return Err(Error::Unsupported("arcs need at least one interval marking".into()));
    }
    Web::arc(arc.clone()).validate(&sr.spec)
}

pub fn arc_element(sr: &SkeinRing, arc: &StatedArc) -> Result<Poly> {
    check_arc(sr, arc)?;
    Ok(arc_from_matrix(sr.n(), &sr.as_matrix(&arc.path)?, arc))
}

pub fn knot_element(sr: &SkeinRing, knot: &FramedKnot) -> Result<Poly> {
    Web::knot(knot.clone()).validate(&sr.spec)?;
    let tr = holonomy(&sr.ring, &knot.word)?.trace()?;
    sr.reduce(&tr.scale_int(d_n(sr.n()).pow(knot.spin as u32)))
}

/// Formal ℚ-combination of webs.
pub type Combination = Vec<(Rational, Web)>;

/// Remove one vertex by the determinant expansion. Each edge is cut where it
/// meets `e_0` (after dragging the vertex along its drag word `γ`): a sink
/// edge from `(e_a, u)` with word `w` becomes the arc `e_a → e_0`, core `γ·w`,
/// states `(σ(t), u)`; a source edge to `(e_b, v)` becomes `e_0 → e_b`, core
/// `w·γ⁻¹`, states `(v, σ(t))`. Edges to another vertex are handed over to
/// that vertex as edges ending at `e_0`.
pub fn expand_vertex(spec: &MarkedManifoldSpec, web: &Web, id: usize) -> Result<Vec<(i64, Web)>> {
    if spec.markings == 0 {
        return Err(Error::Unsupported("vertex expansion needs an interval marking".into()));
    }
    let v = web.vertex(id).ok_or_else(|| Error::InvalidWeb(format!("no vertex v{id}")))?.clone();
    let n = spec.n;
    if v.edges.len() != n {
        return Err(Error::InvalidWeb(format!("vertex v{id} has {} edges, expected {n}", v.edges.len())));
    }
    let rest: Vec<Component> = web
        .components
        .iter()
        .filter(|c| !matches!(c, Component::Vertex(w) if w.id == id))
        .cloned()
        .collect();
    let drag_inv = v.drag.inv();
    let mut out = Vec::new();
    for sigma in permutations_unchecked(n) {
        let mut comps = rest.clone();
        for (t, e) in v.edges.iter().enumerate() {
            let s = sigma.apply(t + 1);
            let core = match v.kind {
                VertexKind::Sink => v.drag.mul(&e.word),
                VertexKind::Source => e.word.mul(&drag_inv),
            };
            match e.far {
                EdgeEnd::Marking { marking, state } => {
                    let arc = match v.kind {
                        VertexKind::Sink => StatedArc::new(GroupoidPath::new(marking, 0, core), s, state, 0),
                        VertexKind::Source => StatedArc::new(GroupoidPath::new(0, marking, core), state, s, 0),
                    };
                    comps.push(Component::Arc(arc));
                }
                EdgeEnd::Vertex(other) => {
                    // edges already handed over no longer point here, so the
                    // first remaining one is the matching occurrence
                    let target = comps
                        .iter_mut()
                        .find_map(|c| match c {
                            Component::Vertex(w) if w.id == other => Some(w),
                            _ => None,
                        })
                        .ok_or_else(|| Error::InvalidWeb(format!("v{id} points at missing vertex v{other}")))?;
                    let slot = target
                        .edges
                        .iter_mut()
                        .find(|f| f.far == EdgeEnd::Vertex(id))
                        .ok_or_else(|| Error::InvalidWeb(format!("v{other} lacks a matching edge back to v{id}")))?;
                    *slot = Edge { word: core, far: EdgeEnd::Marking { marking: 0, state: s } };
                }
            }
        }
        out.push((sigma.sign(), Web::new(comps)));
    }
    Ok(out)
}

/// Expand vertices in the given order (remaining ones by id) until none are left.
pub fn expand_all(spec: &MarkedManifoldSpec, web: &Web, order: &[usize]) -> Result<Vec<(i64, Web)>> {
    let mut ids: Vec<usize> = order.to_vec();
    let mut rest = web.vertex_ids();
    rest.sort_unstable();
    for id in rest {
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    let mut current = vec![(1i64, web.clone())];
    for id in ids {
        let mut next = Vec::new();
        for (c, w) in &current {
            for (s, x) in expand_vertex(spec, w, id)? {
                next.push((c * s, x));
            }
        }
        current = next;
    }
    Ok(current)
}

/// Evaluates vertex-free webs, memoising path matrices and component values.
struct Evaluator<'a> {
    sr: &'a SkeinRing,
    matrices: HashMap<GroupoidPath, PolyMatrix>,
    values: HashMap<Component, Poly>,
}

impl<'a> Evaluator<'a> {
    fn new(sr: &'a SkeinRing) -> Self {
        Evaluator { sr, matrices: HashMap::new(), values: HashMap::new() }
    }

    fn component(&mut self, c: &Component) -> Result<Poly> {
        if let Some(v) = self.values.get(c) {
            return Ok(v.clone());
        }
        let v = match c {
            Component::Arc(a) => {
                check_arc(self.sr, a)?;
                if !self.matrices.contains_key(&a.path) {
                    let m = self.sr.as_matrix(&a.path)?;
                    self.matrices.insert(a.path.clone(), m);
                }
                arc_from_matrix(self.sr.n(), &self.matrices[&a.path], a)
            }
            Component::Knot(k) => knot_element(self.sr, k)?,
            Component::Vertex(v) => {
                return Err(Error::InvalidWeb(format!("vertex v{} must be expanded first", v.id)))
            }
        };
        self.values.insert(c.clone(), v.clone());
        Ok(v)
    }

    fn web(&mut self, w: &Web) -> Result<Poly> {
        let mut vals = Vec::with_capacity(w.components.len());
        for c in &w.components {
            let v = self.component(c)?;
            if v.is_zero() {
                return Ok(v);
            }
            vals.push(v);
        }
        // multiply small factors first
        vals.sort_by_key(|p| p.len());
        let mut acc = Poly::one(&self.sr.ring);
        for v in &vals {
            acc = self.sr.mul_reduce(&acc, v)?;
        }
        Ok(acc)
    }
}

pub fn normalize(sr: &SkeinRing, web: &Web) -> Result<Poly> {
    normalize_with_order(sr, web, &[])
}

/// Normal form with an explicit vertex-expansion order.
pub fn normalize_with_order(sr: &SkeinRing, web: &Web, order: &[usize]) -> Result<Poly> {
    web.validate(&sr.spec)?;
    let mut ev = Evaluator::new(sr);
    let mut total = Poly::zero(&sr.ring);
    for (c, w) in expand_all(&sr.spec, web, order)? {
        let v = ev.web(&w)?;
        total = total.try_add(&v.scale_int(c))?;
    }
    sr.reduce(&total)
}

pub fn normalize_combination(sr: &SkeinRing, combo: &[(Rational, Web)]) -> Result<Poly> {
    let mut total = Poly::zero(&sr.ring);
    for (c, w) in combo {
        total = total.try_add(&normalize(sr, w)?.scale(c))?;
    }
    sr.reduce(&total)
}

/// Ring involution `x^b_{i,j} ↦ x^b_{ī,j̄}` on every block.
pub fn bar_involution(ring: &Arc<Ring>, p: &Poly) -> Result<Poly> {
    if !same_ring(p.ring(), ring) {
        return Err(Error::RingMismatch("polynomial not in ring".into()));
    }
    let n = ring.n();
    Ok(p.map_vars(|v| match ring.var_name(v) {
        VarName::Entry(bv) => ring.entry_var(bv.block, bar(n, bv.row), bar(n, bv.col)).unwrap(),
        VarName::Aux(_) => v,
    }))
}

/// The adding-a-marking inclusion: identical monomials in the ring with one
/// more connector block.
pub fn include_marking(ring_k: &Arc<Ring>, ring_k1: &Arc<Ring>, p: &Poly) -> Result<Poly> {
    if !same_ring(p.ring(), ring_k) {
        return Err(Error::RingMismatch("polynomial not in the source ring".into()));
    }
    if **ring_k1 != *ring_k.with_extra_connector() {
        return Err(Error::RingMismatch("target ring must add exactly one connector block".into()));
    }
    p.into_ring(ring_k1)
}

/// The explicit splitting formula for an arc with exactly one endpoint on the
/// newest marking `e` of `sr` (whose connector block is `c_e`): the arc is
/// closed up at `e_0` and the connector factor is written in the coordinates
/// of `c_e`, with coefficients `c_t = (−1)^{n−t}`:
///
/// * ending at `e` with state `i`: `Σ_j c_j · arc(a→e_0; end j) · d(−1)^{i+1} x^{c_e}_{ī, j̄}`
/// * starting at `e` with state `i`: `Σ_j c_{j̄} · arc(e_0→b; start j) · d(−1)^{j̄+1} adj(X_{c_e})_{j, i}`
pub fn jmath_arc(sr: &SkeinRing, arc: &StatedArc) -> Result<Poly> {
    check_arc(sr, arc)?;
    let n = sr.n();
    let e = sr.spec.markings - 1;
    if e == 0 {
        return Err(Error::Unsupported("the newest marking must not be the base marking".into()));
    }
    let d = d_n(n);
    let c = |t: usize| if (n - t).is_multiple_of(2) { 1i64 } else { -1 };
    let sgn = |i: usize| if i % 2 == 1 { 1i64 } else { -1 };
    let ring = &sr.ring;
    let conn = Block::Conn(e);
    let mut ev = Evaluator::new(sr);
    let mut total = Poly::zero(ring);
    match (arc.path.src == e, arc.path.dst == e) {
        (false, true) => {
            let i = arc.end_state;
            for j in 1..=n {
                let closed = StatedArc::new(GroupoidPath::new(arc.path.src, 0, arc.path.core.clone()), j, arc.start_state, arc.spin);
                let mu = Poly::entry(ring, conn, bar(n, i), bar(n, j))?.scale_int(d * sgn(i));
                total = total.try_add(&ev.component(&Component::Arc(closed))?.try_mul(&mu)?.scale_int(c(j)))?;
            }
        }
        (true, false) => {
            let i = arc.start_state;
            let adj = PolyMatrix::generic(ring, conn)?.adjugate()?;
            for j in 1..=n {
                let closed = StatedArc::new(GroupoidPath::new(0, arc.path.dst, arc.path.core.clone()), arc.end_state, j, arc.spin);
                let jb = bar(n, j);
                let mu = adj.get(j - 1, i - 1).scale_int(d * sgn(jb));
                total = total.try_add(&ev.component(&Component::Arc(closed))?.try_mul(&mu)?.scale_int(c(jb)))?;
            }
        }
        _ => {
            return Err(Error::InvalidWeb(format!(
                "arc must have exactly one endpoint on the newest marking e{e}"
            )))
        }
    }
    sr.reduce(&total)
}

/// `G` on arc generators for one marking: `arc ↦ d^{h+1}(−1)^{i+1}·(Q)_{ī,j}`.
pub fn g_map_arc(sr: &SkeinRing, arc: &StatedArc) -> Result<Poly> {
    if arc.path.src != 0 || arc.path.dst != 0 {
        return Err(Error::Unsupported("G is defined on arcs based at e0".into()));
    }
    let q = holonomy(&sr.ring, &arc.path.core)?;
    sr.reduce(&arc_from_matrix(sr.n(), &q, arc))
}

/// `F` on a matrix-entry generator `[w]_{i,j}`: `(AS^{[w]})_{i,j}` written as
/// `sign · arc` with the arc based at `e_0`.
pub fn f_map_entry(n: usize, word: &Word, i: usize, j: usize) -> (i64, StatedArc) {
    // (AS)_{i,j} = d·(−1)^{ī+1}·arc(end ī, start j, h=0)
    let ib = bar(n, i);
    let sign = d_n(n) * if ib % 2 == 1 { 1 } else { -1 };
    (sign, StatedArc::new(GroupoidPath::new(0, 0, word.clone()), ib, j, 0))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationCheck {
    pub name: String,
    pub instances: usize,
    pub failures: Vec<String>,
}

impl RelationCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }
}

impl fmt::Display for RelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<28} {:>5} instances  {}",
                c.name,
                c.instances,
                if c.passed() { "PASS".to_string() } else { format!("FAIL ({})", c.failures.len()) }
            )?;
            for msg in c.failures.iter().take(3) {
                writeln!(f, "    {msg}")?;
            }
        }
        Ok(())
    }
}

/// Word length used for random instances, shrinking with `n` to keep
/// expansions desk-sized.
pub fn suite_word_len(n: usize) -> usize {
    match n {
        0..=2 => 4,
        3 => 2,
        _ => 1,
    }
}

/// Check the defining relations at `v = 1` inside normal forms: kink (spin
/// flip), trivial knot, turnback, arc splitting and commutativity.
pub fn relation_suite(sr: &SkeinRing, instances: usize, seed: u64) -> Result<RelationReport> {
    use rand::SeedableRng;
    let spec = &sr.spec;
    if spec.markings == 0 {
        return Err(Error::Unsupported("the relation suite needs an interval marking".into()));
    }
    let n = spec.n;
    let m = spec.generators();
    let k = spec.markings;
    let d = d_n(n);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let len = suite_word_len(n);
    let ring = &sr.ring;
    let int = |c: i64| Poly::int(ring, c);
    let mut ev = Evaluator::new(sr);

    let mut kink = RelationCheck { name: "kink (spin flip)".into(), instances: 0, failures: vec![] };
    let mut trivial = RelationCheck { name: "trivial knot".into(), instances: 0, failures: vec![] };
    let mut turnback = RelationCheck { name: "turnback".into(), instances: 0, failures: vec![] };
    let mut split = RelationCheck { name: "arc splitting".into(), instances: 0, failures: vec![] };
    let mut commute = RelationCheck { name: "commutativity".into(), instances: 0, failures: vec![] };

    let value = (-1i64).pow(n as u32 - 1) * n as i64;
    for (h, expect) in [(1u8, value), (0u8, n as i64)] {
        trivial.instances += 1;
        let got = knot_element(sr, &FramedKnot::new(Word::empty(), h))?;
        if got != int(expect) {
            trivial.failures.push(format!("h={h}: got {got}, expected {expect}"));
        }
    }

    for i in 1..=n {
        for j in 1..=n {
            turnback.instances += 1;
            let arc = StatedArc::new(GroupoidPath::new(0, 0, Word::empty()), i, j, 0);
            let got = ev.component(&Component::Arc(arc))?;
            let expect = if bar(n, j) == i { (-1i64).pow((n - i) as u32) } else { 0 };
            if got != int(expect) {
                turnback.failures.push(format!("(i,j)=({i},{j}): got {got}, expected {expect}"));
            }
        }
    }

    let a = a_matrix(n);
    for idx in 0..instances {
        let u = random_word(&mut rng, m, len);
        let v = random_word(&mut rng, m, len);
        let (x, y, z) = (rng.random_range(0..k), rng.random_range(0..k), rng.random_range(0..k));
        let alpha = GroupoidPath::new(x, y, u.clone());
        let beta = GroupoidPath::new(y, z, v.clone());
        let composite = beta.after(&alpha)?;
        let (i, j) = (rng.random_range(1..=n), rng.random_range(1..=n));
        let h = rng.random_range(0..2u8);

        kink.instances += 2;
        let arc = StatedArc::new(alpha.clone(), i, j, h);
        let lhs = ev.component(&Component::Arc(arc.flipped()))?;
        let rhs = ev.component(&Component::Arc(arc.clone()))?.scale_int(d);
        if lhs != rhs {
            kink.failures.push(format!("arc {alpha:?} ({i},{j})"));
        }
        let knot = FramedKnot::new(u.clone(), h);
        let lhs = knot_element(sr, &FramedKnot::new(u.clone(), 1 - h))?;
        let rhs = knot_element(sr, &knot)?.scale_int(d);
        if lhs != rhs {
            kink.failures.push(format!("knot {u}"));
        }

        // at n >= 4 each instance takes one state pair, cycling through all n^2
        let pairs: Vec<(usize, usize)> = if n <= 3 {
            (1..=n).flat_map(|i| (1..=n).map(move |j| (i, j))).collect()
        } else {
            vec![(idx % (n * n) / n + 1, idx % n + 1)]
        };
        for &(i, j) in &pairs {
            split.instances += 1;
            let lhs = ev.component(&Component::Arc(StatedArc::new(composite.clone(), i, j, 0)))?;
            let mut rhs = Poly::zero(ring);
            for t in 1..=n {
                let coeff = a.get(t - 1, bar(n, t) - 1);
                let left = ev.component(&Component::Arc(StatedArc::new(beta.clone(), i, t, 0)))?;
                let right = ev.component(&Component::Arc(StatedArc::new(alpha.clone(), bar(n, t), j, 0)))?;
                rhs = rhs.try_add(&sr.mul_reduce(&left, &right)?.scale_int(coeff))?;
            }
            if lhs != sr.reduce(&rhs)? {
                split.failures.push(format!("{composite:?} ({i},{j})"));
            }
        }

        let a1 = Component::Arc(StatedArc::new(alpha.clone(), i, j, h));
        let a2 = Component::Arc(StatedArc::new(beta.clone(), j, i, 0));
        let k1 = Component::Knot(FramedKnot::new(v.clone(), 0));
        for (c1, c2) in [(&a1, &a2), (&a1, &k1)] {
            commute.instances += 1;
            let p1 = normalize(sr, &Web::new(vec![c1.clone(), c2.clone()]))?;
            let p2 = normalize(sr, &Web::new(vec![c2.clone(), c1.clone()]))?;
            let prod = sr.mul_reduce(&ev.component(c1)?, &ev.component(c2)?)?;
            if p1 != p2 || p1 != prod {
                commute.failures.push(format!("{c1:?}, {c2:?}"));
            }
        }
    }
    Ok(RelationReport { checks: vec![kink, trivial, turnback, split, commute] })
}

/// Parameters for [`random_web`].
#[derive(Clone, Debug)]
pub struct WebShape {
    pub max_components: usize,
    pub max_word_len: usize,
    /// Cap on the total number of letters across the web.
    pub max_letters: usize,
    /// Number of vertices (0, 1 or 2; two vertices form a sink-source pair).
    pub vertices: usize,
}

/// Random valid web for `spec` with the requested shape.
pub fn random_web(rng: &mut impl rand::Rng, spec: &MarkedManifoldSpec, shape: &WebShape) -> Web {
    let n = spec.n;
    let m = spec.generators();
    let k = spec.markings;
    let mut budget = shape.max_letters;
    let max_len = shape.max_word_len;
    fn word<R: rand::Rng>(rng: &mut R, m: usize, max_len: usize, budget: &mut usize) -> Word {
        let w = random_word(rng, m, max_len.min(*budget));
        *budget -= w.len();
        w
    }
    let mut comps = Vec::new();
    if shape.vertices > 0 && k > 0 {
        let mut sink = Vertex { id: 0, kind: VertexKind::Sink, edges: vec![], drag: Word::empty() };
        let mut source = Vertex { id: 1, kind: VertexKind::Source, edges: vec![], drag: Word::empty() };
        let shared = if shape.vertices >= 2 { rng.random_range(1..=n) } else { 0 };
        for t in 0..n {
            let w = word(rng, m, max_len, &mut budget);
            if t < shared {
                sink.edges.push(Edge { word: w.clone(), far: EdgeEnd::Vertex(1) });
                source.edges.push(Edge { word: w, far: EdgeEnd::Vertex(0) });
            } else {
                let far = EdgeEnd::Marking { marking: rng.random_range(0..k), state: rng.random_range(1..=n) };
                sink.edges.push(Edge { word: w, far });
            }
        }
        if shape.vertices >= 2 {
            for _ in shared..n {
                let w = word(rng, m, max_len, &mut budget);
                let far = EdgeEnd::Marking { marking: rng.random_range(0..k), state: rng.random_range(1..=n) };
                source.edges.push(Edge { word: w, far });
            }
            // shuffle edge orders so vertex-vertex edges are not always first
            shuffle(rng, &mut sink.edges);
            shuffle(rng, &mut source.edges);
            // shared edges must list the same words in the same order on both ends
            let mut shared_words = sink.edges.iter().filter(|e| e.far == EdgeEnd::Vertex(1)).map(|e| e.word.clone());
            for e in source.edges.iter_mut().filter(|e| e.far == EdgeEnd::Vertex(0)) {
                e.word = shared_words.next().unwrap();
            }
            comps.push(Component::Vertex(sink));
            comps.push(Component::Vertex(source));
        } else {
            shuffle(rng, &mut sink.edges);
            if rng.random_bool(0.5) {
                // same shape as a source
                comps.push(Component::Vertex(Vertex { kind: VertexKind::Source, ..sink }));
            } else {
                comps.push(Component::Vertex(sink));
            }
        }
    }
    let extra = shape.max_components.saturating_sub(comps.len().min(1));
    let count = if comps.is_empty() { rng.random_range(1..=shape.max_components.max(1)) } else { rng.random_range(0..=extra) };
    for _ in 0..count {
        let h = rng.random_range(0..2u8);
        if k > 0 && rng.random_bool(0.6) {
            let path = GroupoidPath::new(rng.random_range(0..k), rng.random_range(0..k), word(rng, m, max_len, &mut budget));
            comps.push(Component::Arc(StatedArc::new(path, rng.random_range(1..=n), rng.random_range(1..=n), h)));
        } else {
            comps.push(Component::Knot(FramedKnot::new(word(rng, m, max_len, &mut budget), h)));
        }
    }
    Web::new(comps)
}

fn shuffle<T>(rng: &mut impl rand::Rng, v: &mut [T]) {
    use rand::seq::SliceRandom;
    v.shuffle(rng);
}
