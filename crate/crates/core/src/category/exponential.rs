//! Moving a norm past a transfer.
//!
//! For a T-map `f : S -> A` and an N-map `g : A -> T`, `g_⊗ f_⊕` is
//! rewritten as `t_⊕ n_⊗ r^*` for a diagram `S <-r- E -n-> D -t-> T`.
//! Over `t` in `T`, the ghost coordinate of `g_⊗ f_⊕` is a product over the
//! blocks `a` of the minimal fiber of `g` over `t` of `|t|/|a|` copies of a
//! sum over `f^{-1}(a)`. Expanding it gives the tuples `D'_t`: for each
//! block `a` a sequence of `|t|/|a|` choices `(s, ζ)` with `f(s) = a` and
//! `ζ` in `C_{|a|/|s|}`. The cyclic group `C_|t|` acts by rotating every
//! block one step, twisting the entry that wraps around by `ζ -> ζ + 1`,
//! and `D_t` is the set of orbits.

use std::collections::HashMap;

use num_integer::Integer;

use super::{
    build_poset, built_map, construction_error, internal, require_class, same, CategoryError,
};
use crate::arith::prime_factors;
use crate::limits;
use crate::maps::{PosetMap, PosetRef};

/// One entry of a tuple: an element of `S` (by index) and a twist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Choice {
    pub s: usize,
    pub zeta: u64,
}

/// A point of `D`: the canonical (lexicographically least) tuple of its
/// orbit over `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpDTuple {
    /// Index in `T`.
    pub t: usize,
    /// For each block `a` (index in `A`), its `|t|/|a|` choices.
    pub blocks: Vec<(usize, Vec<Choice>)>,
    pub orbit_size: u64,
    pub norm: u64,
}

#[derive(Debug, Clone)]
pub struct ExponentialDiagram {
    pub f: PosetMap,
    pub g: PosetMap,
    pub e: PosetRef,
    pub d: PosetRef,
    /// R-map `E -> S`.
    pub r: PosetMap,
    /// N-map `E -> D`.
    pub n: PosetMap,
    /// T-map `D -> T`.
    pub t: PosetMap,
    /// Indexed like `d`.
    pub d_tuples: Vec<ExpDTuple>,
}

type Tuple = Vec<Choice>;

#[derive(Debug, Clone)]
struct Block {
    a: usize,
    len: usize,
    offset: usize,
}

struct Ctx<'a> {
    f: &'a PosetMap,
    g: &'a PosetMap,
    layouts: Vec<Vec<Block>>,
}

fn fail(msg: String) -> CategoryError {
    CategoryError::Internal(format!("exponential diagram: {msg}"))
}

impl<'a> Ctx<'a> {
    fn new(f: &'a PosetMap, g: &'a PosetMap) -> Result<Self, CategoryError> {
        let (a_pos, t_pos) = (g.source(), g.target());
        let mut layouts = Vec::with_capacity(t_pos.len());
        for t in 0..t_pos.len() {
            let mut blocks = Vec::new();
            let mut offset = 0;
            for a in g.minimal_fiber(t) {
                let (nt, na) = (t_pos.norm(t), a_pos.norm(a));
                if nt % na != 0 {
                    return Err(fail(format!("|{}| does not divide |{}|", na, nt)));
                }
                let len = (nt / na) as usize;
                blocks.push(Block { a, len, offset });
                offset += len;
            }
            layouts.push(blocks);
        }
        Ok(Ctx { f, g, layouts })
    }

    fn s_norm(&self, s: usize) -> u64 {
        self.f.source().norm(s)
    }

    fn a_norm(&self, a: usize) -> u64 {
        self.g.source().norm(a)
    }

    fn t_norm(&self, t: usize) -> u64 {
        self.g.target().norm(t)
    }

    /// `γ^k`: `(γ^k F)(j) = F(j - k)` blockwise, where reading position
    /// `q L + r` gives the entry at `r` with `ζ` lowered by `q`.
    fn act(&self, t: usize, tuple: &[Choice], k: u64) -> Tuple {
        let mut out = Vec::with_capacity(tuple.len());
        for b in &self.layouts[t] {
            let len = b.len as i64;
            let na = self.a_norm(b.a);
            for j in 0..len {
                let i = j - k as i64;
                let (q, r) = (i.div_euclid(len), i.rem_euclid(len));
                let c = tuple[b.offset + r as usize];
                let modulus = (na / self.s_norm(c.s)) as i64;
                out.push(Choice {
                    s: c.s,
                    zeta: (c.zeta as i64 - q).rem_euclid(modulus) as u64,
                });
            }
        }
        out
    }

    /// The least element of the orbit under `⟨γ^step⟩` and the least
    /// positive multiple of `step` fixing `tuple`.
    fn orbit(&self, t: usize, tuple: &[Choice], step: u64) -> (Tuple, u64) {
        let nt = self.t_norm(t);
        let mut best = tuple.to_vec();
        let mut k = step;
        while k < nt {
            let moved = self.act(t, tuple, k);
            if moved == tuple {
                return (best, k);
            }
            if moved < best {
                best = moved;
            }
            k += step;
        }
        (best, nt)
    }

    /// The divisor of a tuple over `t` fixed by `γ^(|t|/e)`, as a tuple
    /// over `t/e`. Each block `a'` over `t/e` lies under a unique block `a`
    /// over `t`; its entries are the first `|t/e|/|a'|` entries of `a`'s,
    /// divided down, with `ζ` scaled by the ratio of block lengths.
    fn rho(&self, t: usize, tuple: &[Choice], e: u64) -> Result<(usize, Tuple), CategoryError> {
        let (s_pos, a_pos, t_pos) = (self.f.source(), self.g.source(), self.g.target());
        let t2 = t_pos
            .quotient(t, e)
            .ok_or_else(|| fail(format!("{} has no quotient by {e}", t_pos.id(t))))?;
        let mut out = Vec::new();
        for b2 in &self.layouts[t2] {
            let mut above = self.layouts[t].iter().filter(|b| a_pos.divides(b2.a, b.a));
            let b = match (above.next(), above.next()) {
                (Some(b), None) => b,
                _ => {
                    return Err(fail(format!(
                        "block {} has no unique block above it",
                        a_pos.id(b2.a)
                    )))
                }
            };
            if b.len % b2.len != 0 {
                return Err(fail("block lengths do not divide".into()));
            }
            let u = (b.len / b2.len) as u64;
            let (na, na2) = (self.a_norm(b.a), self.a_norm(b2.a));
            for r in 0..b2.len {
                let c = tuple[b.offset + r];
                let ns = self.s_norm(c.s);
                if !(ns * na2).is_multiple_of(na) {
                    return Err(fail(format!("{} does not divide down", s_pos.id(c.s))));
                }
                let s2 = s_pos
                    .divisor_with_norm(c.s, ns * na2 / na)
                    .ok_or_else(|| fail(format!("no divisor of {}", s_pos.id(c.s))))?;
                let modulus = na / ns;
                out.push(Choice {
                    s: s2,
                    zeta: (u % modulus) * c.zeta % modulus,
                });
            }
        }
        Ok((t2, out))
    }

    fn label(&self, t: usize, tuple: &[Choice]) -> String {
        let (s_pos, a_pos) = (self.f.source(), self.g.source());
        let blocks: Vec<String> = self.layouts[t]
            .iter()
            .map(|b| {
                let entries: Vec<String> = tuple[b.offset..b.offset + b.len]
                    .iter()
                    .map(|c| format!("{}^{}", s_pos.display(c.s), c.zeta))
                    .collect();
                format!("{}:{}", a_pos.display(b.a), entries.join(" "))
            })
            .collect();
        format!("{}[{}]", self.g.target().display(t), blocks.join("; "))
    }

    /// All tuples over `t`, in lexicographic order.
    fn enumerate(&self, t: usize, budget: &mut u64) -> Result<Vec<Tuple>, CategoryError> {
        let mut options: Vec<Vec<Choice>> = Vec::new();
        for b in &self.layouts[t] {
            let mut choices = Vec::new();
            for s in self.f.fiber(b.a) {
                for zeta in 0..self.a_norm(b.a) / self.s_norm(s) {
                    choices.push(Choice { s, zeta });
                }
            }
            for _ in 0..b.len {
                options.push(choices.clone());
            }
        }
        let mut count: u64 = 1;
        for o in &options {
            count = count.saturating_mul(o.len() as u64);
        }
        if count > *budget {
            return Err(CategoryError::CapExceeded(format!(
                "more than {} tuples in an exponential diagram",
                limits::max_tuples()
            )));
        }
        *budget -= count;
        if count == 0 {
            return Ok(Vec::new());
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut digits = vec![0usize; options.len()];
        loop {
            out.push(digits.iter().zip(&options).map(|(&i, o)| o[i]).collect());
            let mut pos = options.len();
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < options[pos].len() {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }
}

/// Builds `S <-r- E -n-> D -t-> T` with `g_⊗ f_⊕ = t_⊕ n_⊗ r^*`.
///
/// A point of `E` over `b` in `A` is a tuple over `g(b)` together with a
/// position in `b`'s block, modulo `C_|g(b)|` acting on both. Normalizing
/// the position to 0 leaves tuples modulo the subgroup `⟨γ^L⟩`, `L` the
/// block length; `r` reads the entry at that position.
pub fn exponential_diagram(
    f: &PosetMap,
    g: &PosetMap,
) -> Result<ExponentialDiagram, CategoryError> {
    require_class(f, "f", 'T')?;
    require_class(g, "g", 'N')?;
    if !same(f.target(), g.source()) {
        return Err(CategoryError::NotComposable(
            "target of f is not the source of g".into(),
        ));
    }
    let ctx = Ctx::new(f, g)?;
    let (s_pos, a_pos, t_pos) = (f.source(), g.source(), g.target());

    // D: one point per orbit of tuples.
    let mut budget = limits::max_tuples() as u64;
    let mut d_points: Vec<(usize, Tuple, u64)> = Vec::new();
    let mut d_key: HashMap<(usize, Tuple), usize> = HashMap::new();
    let mut d_over: Vec<Vec<usize>> = vec![Vec::new(); t_pos.len()];
    for (t, over) in d_over.iter_mut().enumerate() {
        for tuple in ctx.enumerate(t, &mut budget)? {
            let (canon, period) = ctx.orbit(t, &tuple, 1);
            if canon == tuple {
                d_key.insert((t, tuple.clone()), d_points.len());
                over.push(d_points.len());
                d_points.push((t, tuple, period));
            }
        }
    }
    let mut d_pairs = Vec::new();
    let mut d_elems = Vec::with_capacity(d_points.len());
    for (i, (t, tuple, period)) in d_points.iter().enumerate() {
        let stab = ctx.t_norm(*t) / period;
        for p in prime_factors(stab) {
            let (t2, lower) = ctx.rho(*t, tuple, p)?;
            let (canon, _) = ctx.orbit(t2, &lower, 1);
            let j = *d_key
                .get(&(t2, canon))
                .ok_or_else(|| fail(format!("divisor of {} is missing", ctx.label(*t, tuple))))?;
            d_pairs.push((j, i));
        }
        d_elems.push((stab, ctx.label(*t, tuple)));
    }
    let d_built = build_poset(d_elems, &d_pairs)
        .map_err(|e| construction_error("exponential diagram D", e))?;

    // E: per b, the orbits of each D-orbit under the block subgroup.
    let mut e_points: Vec<(usize, Tuple, usize)> = Vec::new();
    let mut e_key: HashMap<(usize, Tuple), usize> = HashMap::new();
    for b in 0..a_pos.len() {
        let t = g.apply(b);
        let step = ctx.t_norm(t) / ctx.a_norm(b);
        if !ctx.layouts[t].iter().any(|blk| blk.a == b) {
            return Err(fail(format!(
                "{} is not minimal over its image",
                a_pos.id(b)
            )));
        }
        for &di in &d_over[t] {
            let (_, tuple, period) = &d_points[di];
            for k in 0..*period {
                let moved = ctx.act(t, tuple, k);
                let (canon, _) = ctx.orbit(t, &moved, step);
                if let std::collections::hash_map::Entry::Vacant(v) =
                    e_key.entry((b, canon.clone()))
                {
                    v.insert(e_points.len());
                    e_points.push((b, canon, di));
                }
            }
        }
    }
    let mut e_pairs = Vec::new();
    let mut e_elems = Vec::with_capacity(e_points.len());
    let mut r_images = Vec::with_capacity(e_points.len());
    let mut n_images = Vec::with_capacity(e_points.len());
    for (i, (b, tuple, di)) in e_points.iter().enumerate() {
        let t = g.apply(*b);
        let stab = ctx.t_norm(t) / d_points[*di].2;
        let norm = ctx.a_norm(*b).gcd(&stab);
        for p in prime_factors(norm) {
            let b2 = a_pos
                .quotient(*b, p)
                .ok_or_else(|| fail(format!("{} has no quotient by {p}", a_pos.id(*b))))?;
            let (t2, lower) = ctx.rho(t, tuple, p)?;
            if g.apply(b2) != t2 {
                return Err(fail("divisors of blocks and targets disagree".into()));
            }
            let step = ctx.t_norm(t2) / ctx.a_norm(b2);
            let (canon, _) = ctx.orbit(t2, &lower, step);
            let j = *e_key
                .get(&(b2, canon))
                .ok_or_else(|| fail(format!("divisor of {} is missing in E", a_pos.id(*b))))?;
            e_pairs.push((j, i));
        }
        let blk = ctx.layouts[t]
            .iter()
            .find(|blk| blk.a == *b)
            .expect("checked above");
        r_images.push(tuple[blk.offset].s);
        n_images.push(d_built.index[*di]);
        e_elems.push((
            norm,
            format!("{}|{}", a_pos.display(*b), ctx.label(t, tuple)),
        ));
    }
    let e_built = build_poset(e_elems, &e_pairs)
        .map_err(|e| construction_error("exponential diagram E", e))?;

    let t_images: Vec<usize> = d_points.iter().map(|(t, _, _)| *t).collect();
    let r =
        built_map(&e_built, s_pos.clone(), &r_images).map_err(|e| internal("r")(e.to_string()))?;
    let n = built_map(&e_built, d_built.poset.clone(), &n_images)
        .map_err(|e| internal("n")(e.to_string()))?;
    let t_map =
        built_map(&d_built, t_pos.clone(), &t_images).map_err(|e| internal("t")(e.to_string()))?;
    if !n.is_n() {
        return Err(fail("n is not an N-map".into()));
    }
    if !t_map.is_t() {
        return Err(fail("t is not a T-map".into()));
    }

    let placeholder = ExpDTuple {
        t: 0,
        blocks: Vec::new(),
        orbit_size: 0,
        norm: 0,
    };
    let mut d_tuples = vec![placeholder; d_points.len()];
    for (i, (t, tuple, period)) in d_points.iter().enumerate() {
        d_tuples[d_built.index[i]] = ExpDTuple {
            t: *t,
            blocks: ctx.layouts[*t]
                .iter()
                .map(|b| (b.a, tuple[b.offset..b.offset + b.len].to_vec()))
                .collect(),
            orbit_size: *period,
            norm: ctx.t_norm(*t) / period,
        };
    }
    Ok(ExponentialDiagram {
        f: f.clone(),
        g: g.clone(),
        e: e_built.poset,
        d: d_built.poset,
        r,
        n,
        t: t_map,
        d_tuples,
    })
}

impl ExponentialDiagram {
    /// Checks `orbit size * norm = |t|` for every point of `D`.
    pub fn orbit_cardinality_holds(&self) -> bool {
        let t_pos = self.g.target();
        self.d_tuples
            .iter()
            .enumerate()
            .all(|(i, d)| d.orbit_size * d.norm == t_pos.norm(d.t) && self.d.norm(i) == d.norm)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::maps::{fold, mult, MultVariant};
    use crate::poset::from_set;
    use crate::witt::{ghost_apply, symbolic_ghost, GhostVector, OpKind};

    fn set(xs: &[u64]) -> PosetRef {
        Arc::new(from_set(xs.iter().copied()).unwrap())
    }

    fn both_sides(x: &ExponentialDiagram) -> (GhostVector, GhostVector) {
        let v = symbolic_ghost(x.f.source(), "x");
        let left = ghost_apply(
            OpKind::Norm,
            &x.g,
            &ghost_apply(OpKind::Transfer, &x.f, &v).unwrap(),
        )
        .unwrap();
        let pulled = ghost_apply(OpKind::Pull, &x.r, &v).unwrap();
        let normed = ghost_apply(OpKind::Norm, &x.n, &pulled).unwrap();
        let right = ghost_apply(OpKind::Transfer, &x.t, &normed).unwrap();
        (left, right)
    }

    #[test]
    fn identity_transfer_reproduces_the_norm() {
        let g = mult(&set(&[1]), 2, MultVariant::Into).unwrap();
        let f = PosetMap::identity(g.source().clone());
        let x = exponential_diagram(&f, &g).unwrap();
        assert_eq!(x.d.len(), 2);
        assert!(x.orbit_cardinality_holds());
        let (l, r) = both_sides(&x);
        assert_eq!(l, r);
    }

    #[test]
    fn square_of_a_sum() {
        let one = set(&[1]);
        let f = fold(&one);
        let g = mult(&one, 2, MultVariant::Into).unwrap();
        let x = exponential_diagram(&f, &g).unwrap();
        let over_two: Vec<&ExpDTuple> = x
            .d_tuples
            .iter()
            .filter(|d| g.target().norm(d.t) == 2)
            .collect();
        assert_eq!(over_two.len(), 3);
        let mut norms: Vec<u64> = over_two.iter().map(|d| d.norm).collect();
        norms.sort();
        assert_eq!(norms, [1, 2, 2]);
        assert!(x.orbit_cardinality_holds());
        let (l, r) = both_sides(&x);
        assert_eq!(l.coord(1).to_string(), "x_1^2 + 2*x_1*x_2 + x_2^2");
        assert_eq!(l, r);
    }

    #[test]
    fn twisted_choices() {
        let f = mult(&set(&[1, 2]), 2, MultVariant::Into).unwrap();
        let g = mult(f.target(), 3, MultVariant::Into).unwrap();
        let x = exponential_diagram(&f, &g).unwrap();
        assert!(x.orbit_cardinality_holds());
        let (l, r) = both_sides(&x);
        assert_eq!(l, r);
    }

    #[test]
    fn empty_source() {
        let a = set(&[1, 2]);
        let empty = Arc::new(crate::poset::TruncationPoset::empty());
        let f = PosetMap::new(empty, a.clone(), vec![]).unwrap();
        let g = mult(&a, 3, MultVariant::Into).unwrap();
        let x = exponential_diagram(&f, &g).unwrap();
        assert!(x.d.is_empty() && x.e.is_empty());
        let (l, r) = both_sides(&x);
        assert_eq!(l, r);
        assert!(l.coords().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn size_cap_aborts() {
        let one = set(&[1]);
        let f = fold(&one);
        let g = mult(&one, 40, MultVariant::Into).unwrap();
        assert!(matches!(
            exponential_diagram(&f, &g),
            Err(CategoryError::CapExceeded(_))
        ));
    }
}
