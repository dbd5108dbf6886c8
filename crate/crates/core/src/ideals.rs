//! Buchberger's algorithm over ℚ, ideal membership, radical membership via
//! the Rabinowitsch trick, and the defining ideal of a marked manifold.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groups::{d_n, holonomy, validate_manifold, MarkedManifoldSpec};
use crate::polyring::{det_basis, reduce, same_ring, Monomial, Poly, PolyMatrix, Ring};

pub const DEFAULT_BUDGET: usize = 100_000;

/// Reduced Gröbner basis (monic, sorted by increasing leading monomial).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    ring: Arc<Ring>,
    polys: Vec<Poly>,
}

impl GroebnerBasis {
    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// True when the ideal is the whole ring.
    pub fn is_unit(&self) -> bool {
        self.polys.len() == 1 && self.polys[0].is_one()
    }

    pub fn reduce(&self, p: &Poly) -> Result<Poly> {
        gb_reduce(p, self)
    }
}

fn spoly(f: &Poly, g: &Poly) -> Poly {
    let (mf, _) = f.leading_term().unwrap();
    let (mg, _) = g.leading_term().unwrap();
    let l = mf.lcm(mg);
    &f.mul_monomial(&mf.quotient_of(&l)) - &g.mul_monomial(&mg.quotient_of(&l))
}

fn pair_key(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

/// Reduced Gröbner basis of the ideal generated by `generators`.
///
/// Pairs are processed by the normal strategy (smallest lcm first, ties by
/// index); pairs with coprime leading monomials and pairs caught by the chain
/// criterion are skipped. `budget` bounds the number of S-polynomial
/// reductions; exceeding it returns [`Error::Budget`] with the partial basis.
pub fn buchberger(generators: &[Poly], budget: usize) -> Result<GroebnerBasis> {
    let ring = match generators.first() {
        Some(g) => g.ring().clone(),
        None => return Err(Error::InvalidSpec("buchberger needs at least one generator".into())),
    };
    if let Some(g) = generators.iter().find(|g| !same_ring(g.ring(), &ring)) {
        return Err(Error::RingMismatch(format!("generator {g} lives in another ring")));
    }
    buchberger_in(&ring, generators, budget)
}

pub fn buchberger_in(ring: &Arc<Ring>, generators: &[Poly], budget: usize) -> Result<GroebnerBasis> {
    let mut g: Vec<Poly> = Vec::new();
    for p in generators {
        if !same_ring(p.ring(), ring) {
            return Err(Error::RingMismatch(format!("generator {p} lives in another ring")));
        }
        if p.is_zero() {
            continue;
        }
        let m = p.monic();
        if m.is_one() {
            return Ok(GroebnerBasis { ring: ring.clone(), polys: vec![m] });
        }
        if !g.contains(&m) {
            g.push(m);
        }
    }
    let mut pairs: BTreeSet<(Monomial, usize, usize)> = BTreeSet::new();
    let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in 0..g.len() {
        for i in 0..j {
            let l = g[i].leading_monomial().unwrap().lcm(g[j].leading_monomial().unwrap());
            pairs.insert((l, i, j));
            pending.insert((i, j));
        }
    }
    let mut reductions = 0usize;
    while let Some((l, i, j)) = pairs.pop_first() {
        pending.remove(&(i, j));
        let (li, lj) = (g[i].leading_monomial().unwrap(), g[j].leading_monomial().unwrap());
        if li.is_coprime(lj) {
            continue;
        }
        let chain = (0..g.len()).any(|k| {
            k != i
                && k != j
                && g[k].leading_monomial().unwrap().divides(&l)
                && !pending.contains(&pair_key(i, k))
                && !pending.contains(&pair_key(j, k))
        });
        if chain {
            continue;
        }
        if reductions >= budget {
            return Err(Error::Budget { reductions, partial: g });
        }
        reductions += 1;
        let r = reduce(&spoly(&g[i], &g[j]), &g);
        if r.is_zero() {
            continue;
        }
        let r = r.monic();
        if r.is_one() {
            return Ok(GroebnerBasis { ring: ring.clone(), polys: vec![r] });
        }
        let t = g.len();
        let lt = r.leading_monomial().unwrap().clone();
        g.push(r);
        for i in 0..t {
            let l = g[i].leading_monomial().unwrap().lcm(&lt);
            pairs.insert((l, i, t));
            pending.insert((i, t));
        }
    }
    Ok(GroebnerBasis { ring: ring.clone(), polys: interreduce(g) })
}

fn interreduce(g: Vec<Poly>) -> Vec<Poly> {
    // drop elements whose leading monomial is divisible by an earlier-kept one
    let mut minimal: Vec<Poly> = Vec::new();
    let mut sorted = g;
    sorted.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));
    for p in sorted {
        let lm = p.leading_monomial().unwrap();
        if !minimal.iter().any(|q| q.leading_monomial().unwrap().divides(lm)) {
            minimal.push(p);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<Poly> = minimal.iter().enumerate().filter(|&(t, _)| t != k).map(|(_, q)| q.clone()).collect();
        let (lm, lc) = minimal[k].leading_term().unwrap();
        let lead = Poly::term(minimal[k].ring(), lc.clone(), lm.clone());
        let tail = &minimal[k] - &lead;
        out.push((&lead + &reduce(&tail, &others)).monic());
    }
    out
}

pub fn gb_reduce(p: &Poly, gb: &GroebnerBasis) -> Result<Poly> {
    if !same_ring(p.ring(), &gb.ring) {
        return Err(Error::RingMismatch("polynomial and basis live in different rings".into()));
    }
    Ok(reduce(p, &gb.polys))
}

pub fn is_member(p: &Poly, gb: &GroebnerBasis) -> Result<bool> {
    Ok(gb_reduce(p, gb)?.is_zero())
}

/// Whether `p` is nilpotent modulo the ideal of `gb`: `1 ∈ I + (1 − y·p)`
/// with a fresh variable `y` ordered last.
pub fn is_nilpotent(p: &Poly, gb: &GroebnerBasis, budget: usize) -> Result<bool> {
    let r = gb_reduce(p, gb)?;
    if r.is_zero() {
        return Ok(true);
    }
    if r.constant_value().is_some() {
        return Ok(gb.is_unit());
    }
    let ring = gb.ring();
    let mut name = String::from("y");
    while ring.aux_var(&name).is_some() {
        name.push('_');
    }
    let ext = ring.with_aux(&[&name]);
    let y = Poly::var(&ext, ext.aux_var(&name).unwrap());
    let mut gens: Vec<Poly> = gb.polys.iter().map(|g| g.into_ring(&ext)).collect::<Result<_>>()?;
    let rp = r.into_ring(&ext)?;
    gens.push(&Poly::one(&ext) - &(&y * &rp));
    Ok(buchberger_in(&ext, &gens, budget)?.is_unit())
}

/// Polynomials cutting out the manifold ring: `det(X_b) − 1` for every
/// block, entries of `Q_r − I` per relator and of `Q_c − d_n^h·I` per circle.
pub fn manifold_generators(spec: &MarkedManifoldSpec, ring: &Arc<Ring>) -> Result<Vec<Poly>> {
    let report = validate_manifold(spec);
    if !report.ok {
        return Err(Error::InvalidSpec(report.errors.join("; ")));
    }
    let dets = det_basis(ring)?;
    let mut gens = dets.clone();
    let n = spec.n;
    let mut push_entries = |m: PolyMatrix, target: i64| -> Result<()> {
        let diff = m.sub(&PolyMatrix::from_ints(ring, n, |r, c| if r == c { target } else { 0 }))?;
        for e in diff.entries() {
            let e = reduce(e, &dets);
            if !e.is_zero() {
                gens.push(e);
            }
        }
        Ok(())
    };
    for r in &spec.group.relators {
        push_entries(holonomy(ring, r)?, 1)?;
    }
    for c in &spec.circles {
        let target = if c.spin % 2 == 1 { d_n(n) } else { 1 };
        push_entries(holonomy(ring, &c.word)?, target)?;
    }
    Ok(gens)
}

pub fn manifold_ideal(spec: &MarkedManifoldSpec, budget: usize) -> Result<GroebnerBasis> {
    let ring = spec.ring();
    let gens = manifold_generators(spec, &ring)?;
    buchberger_in(&ring, &gens, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{Circle, GroupPresentation, Word};
    use crate::polyring::{parse_poly, Block};
    use proptest::prelude::*;

    fn scratch(names: &[&str]) -> Arc<Ring> {
        Ring::scratch(names)
    }

    fn gb_strings(gb: &GroebnerBasis) -> Vec<String> {
        gb.polys().iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn small_examples() {
        let r = scratch(&["x", "y"]);
        let x2 = parse_poly(&r, "x^2").unwrap();
        assert_eq!(gb_strings(&buchberger(std::slice::from_ref(&x2), 10).unwrap()), vec!["x^2"]);
        let gb = buchberger(&[parse_poly(&r, "x + y").unwrap(), parse_poly(&r, "x - y").unwrap()], 10).unwrap();
        assert_eq!(gb_strings(&gb), vec!["y", "x"]);
        assert!(is_member(&parse_poly(&r, "x + y").unwrap(), &gb).unwrap());
        let px = buchberger(&[x2], 10).unwrap();
        assert!(gb_reduce(&Poly::one(&r), &px).unwrap().is_one());
    }

    #[test]
    fn textbook_basis() {
        // Cox-Little-O'Shea: <x^3 - 2xy, x^2 y - 2y^2 + x> under grevlex
        let r = scratch(&["x", "y"]);
        let f1 = parse_poly(&r, "x^3 - 2*x*y").unwrap();
        let f2 = parse_poly(&r, "x^2*y - 2*y^2 + x").unwrap();
        let gb = buchberger(&[f1, f2], 100).unwrap();
        assert_eq!(gb_strings(&gb), vec!["y^2 - 1/2*x", "x*y", "x^2"]);
    }

    #[test]
    fn budget_exceeded_keeps_partial_basis() {
        let r = scratch(&["x", "y"]);
        let f1 = parse_poly(&r, "x^3 - 2*x*y").unwrap();
        let f2 = parse_poly(&r, "x^2*y - 2*y^2 + x").unwrap();
        match buchberger(&[f1, f2], 1) {
            Err(Error::Budget { reductions, partial }) => {
                assert_eq!(reductions, 1);
                assert!(partial.len() >= 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn det_ideal_is_already_a_basis() {
        for (n, blocks) in [(2, 2), (3, 2), (2, 3)] {
            let ring = Ring::new(n, blocks, 0);
            let dets = det_basis(&ring).unwrap();
            let gb = buchberger(&dets, DEFAULT_BUDGET).unwrap();
            let mut expect: Vec<Poly> = dets.iter().map(|p| p.monic()).collect();
            expect.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));
            assert_eq!(gb.polys(), &expect[..]);
        }
    }

    fn z2_spec() -> MarkedManifoldSpec {
        MarkedManifoldSpec {
            n: 2,
            group: GroupPresentation { generators: 1, relators: vec![Word::parse("g1*g1").unwrap()] },
            markings: 1,
            circles: vec![],
        }
    }

    #[test]
    fn cayley_hamilton_in_z2() {
        let gb = manifold_ideal(&z2_spec(), DEFAULT_BUDGET).unwrap();
        let r = gb.ring().clone();
        let tr = parse_poly(&r, "g1[1][1] + g1[2][2]").unwrap();
        assert!(is_member(&(&(&tr * &tr) - &Poly::int(&r, 4)), &gb).unwrap());
        assert!(is_member(&parse_poly(&r, "g1[1][2]").unwrap(), &gb).unwrap());
        assert!(is_member(&parse_poly(&r, "g1[2][1]").unwrap(), &gb).unwrap());
        assert!(!is_member(&tr, &gb).unwrap());
        // trace - 2 is nilpotent or not depending on components; X = ±I both occur
        assert!(!is_member(&(&tr - &Poly::int(&r, 2)), &gb).unwrap());
    }

    #[test]
    fn circle_forces_identity() {
        let spec = MarkedManifoldSpec {
            n: 2,
            group: GroupPresentation::free(1),
            markings: 1,
            circles: vec![Circle { word: Word::gen(1), spin: 0 }],
        };
        let gb = manifold_ideal(&spec, DEFAULT_BUDGET).unwrap();
        let r = gb.ring().clone();
        let x = PolyMatrix::generic(&r, Block::Gen(1)).unwrap();
        let reduced = x.try_map(|p| gb_reduce(p, &gb)).unwrap();
        assert_eq!(reduced, PolyMatrix::identity(&r, 2));
    }

    #[test]
    fn rabinowitsch() {
        let r = scratch(&["x"]);
        let gb = buchberger(&[parse_poly(&r, "x^2").unwrap()], 100).unwrap();
        assert!(is_nilpotent(&parse_poly(&r, "x").unwrap(), &gb, 100).unwrap());
        assert!(!is_nilpotent(&Poly::one(&r), &gb, 100).unwrap());
        let r2 = scratch(&["x", "y"]);
        let gb2 = buchberger(&[parse_poly(&r2, "x^3*y").unwrap(), parse_poly(&r2, "y^2").unwrap()], 100).unwrap();
        assert!(is_nilpotent(&parse_poly(&r2, "x*y + y").unwrap(), &gb2, 100).unwrap());
        assert!(!is_nilpotent(&parse_poly(&r2, "x").unwrap(), &gb2, 100).unwrap());
    }

    #[test]
    fn free_sl2_elements_are_not_nilpotent() {
        let spec = MarkedManifoldSpec::free(2, 1, 1);
        let gb = manifold_ideal(&spec, DEFAULT_BUDGET).unwrap();
        let r = gb.ring().clone();
        for s in ["g1[1][2]", "g1[1][1] + g1[2][2] - 2", "g1[1][1]*g1[2][2]", "g1[2][1]^2 - g1[1][2]"] {
            let p = parse_poly(&r, s).unwrap();
            assert!(!is_nilpotent(&p, &gb, DEFAULT_BUDGET).unwrap(), "{s}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn basis_properties(cs in proptest::collection::vec((0u32..3, 0u32..3, -2i64..3), 1..4),
                            ds in proptest::collection::vec((0u32..3, 0u32..3, -2i64..3), 1..4)) {
            let r = scratch(&["x", "y"]);
            let mk = |ts: &[(u32, u32, i64)]| Poly::from_terms(&r, ts.iter().map(|&(a, b, c)|
                (Monomial::from_exponents([(0, a), (1, b)]), crate::polyring::Rational::from_integer(c.into()))));
            let (f, g) = (mk(&cs), mk(&ds));
            prop_assume!(!f.is_zero() || !g.is_zero());
            let gb = buchberger(&[f.clone(), g.clone()], 10_000).unwrap();
            prop_assert!(is_member(&f, &gb).unwrap());
            prop_assert!(is_member(&g, &gb).unwrap());
            let h = &(&f * &g) + &f;
            let once = gb_reduce(&h, &gb).unwrap();
            prop_assert_eq!(gb_reduce(&once, &gb).unwrap(), once);
            // reducedness: no term of any element is divisible by another leading monomial
            for (k, p) in gb.polys().iter().enumerate() {
                for (m, _) in p.terms() {
                    for (t, q) in gb.polys().iter().enumerate() {
                        if t != k {
                            prop_assert!(!q.leading_monomial().unwrap().divides(m));
                        }
                    }
                }
            }
        }
    }
}
