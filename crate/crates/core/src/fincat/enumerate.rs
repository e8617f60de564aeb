//! Exhaustive enumeration of natural transformations and of functors up to
//! isomorphism, under an explicit size bound.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::category::FinCat;
use super::csp::Csp;
use super::functor::{FinFunctor, NatTrans};
use super::FinCatError;

/// Enumeration budget: candidate families per object for exponentials, and
/// search nodes for hom-set enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bound(pub u64);

impl Bound {
    pub const DEFAULT: Bound = Bound(10_000_000);

    /// `WEILAD_MAX_ENUM` if set and parseable, otherwise [`Bound::DEFAULT`].
    pub fn from_env() -> Bound {
        std::env::var("WEILAD_MAX_ENUM")
            .ok()
            .and_then(|s| s.trim().replace('_', "").parse().ok())
            .map(Bound)
            .unwrap_or(Bound::DEFAULT)
    }
}

impl Default for Bound {
    fn default() -> Self {
        Bound::from_env()
    }
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    sizes
        .iter()
        .map(|&n| {
            let o = acc;
            acc += n;
            o
        })
        .collect()
}

/// One variable per element `x ∈ source(V)`, ranging over `target(V)`, with a
/// constraint per naturality square.
fn nat_csp(source: &FinFunctor, target: &FinFunctor) -> Csp {
    let cat = source.cat();
    let sizes = source.sizes();
    let start = offsets(&sizes);
    let ranges: Vec<usize> = (0..cat.object_count()).flat_map(|o| std::iter::repeat(target.size(o)).take(sizes[o])).collect();
    let mut csp = Csp::new(&ranges);
    for m in 0..cat.morphism_count() {
        if cat.is_identity(m) {
            continue;
        }
        let (d, c) = (cat.dom(m), cat.cod(m));
        for x in 0..sizes[d] {
            csp.constrain(start[d] + x, target.map(m), start[c] + source.apply(m, x));
        }
    }
    csp
}

/// Visits every natural transformation `source => target` as a flat
/// assignment (components concatenated in object order). `allowed[V][x]`, if
/// given, restricts the value at `x ∈ source(V)`.
pub(crate) fn for_each_nat(
    source: &FinFunctor,
    target: &FinFunctor,
    allowed: Option<&[Vec<Vec<usize>>]>,
    bound: Bound,
    visit: &mut dyn FnMut(&[usize]),
) -> Result<u64, FinCatError> {
    if source.cat() != target.cat() {
        return Err(FinCatError::CategoryMismatch);
    }
    let mut csp = nat_csp(source, target);
    if let Some(allowed) = allowed {
        let mut var = 0;
        for per_object in allowed {
            for values in per_object {
                csp.restrict(var, values.iter().copied());
                var += 1;
            }
        }
    }
    csp.solve(bound.0, visit).map_err(|_| FinCatError::SizeLimit {
        what: "natural transformation search".into(),
        candidates: csp.candidates(),
        bound: bound.0,
    })
}

/// All natural transformations `source => target`, in lexicographic order.
pub fn nat_transformations(
    source: &Arc<FinFunctor>,
    target: &Arc<FinFunctor>,
    bound: Bound,
) -> Result<Vec<NatTrans>, FinCatError> {
    let mut out = Vec::new();
    for_each_nat(source, target, None, bound, &mut |flat| out.push(NatTrans::from_flat(source, target, flat)))?;
    Ok(out)
}

/// Values allowed at each element for a morphism over a common base.
pub(crate) fn over_base(x: &NatTrans, y: &NatTrans) -> Vec<Vec<Vec<usize>>> {
    let src = x.source();
    let tgt = y.source();
    (0..src.cat().object_count())
        .map(|o| {
            (0..src.size(o))
                .map(|e| (0..tgt.size(o)).filter(|&t| y.apply(o, t) == x.apply(o, e)).collect())
                .collect()
        })
        .collect()
}

/// Morphisms in the slice over `L` from `x: X => L` to `y: Y => L`.
pub fn slice_morphisms(x: &NatTrans, y: &NatTrans, bound: Bound) -> Result<Vec<NatTrans>, FinCatError> {
    if x.target() != y.target() {
        return Err(FinCatError::Functor("slice objects over different bases".into()));
    }
    let allowed = over_base(x, y);
    let mut out = Vec::new();
    for_each_nat(x.source(), y.source(), Some(&allowed), bound, &mut |flat| {
        out.push(NatTrans::from_flat(x.source(), y.source(), flat))
    })?;
    Ok(out)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..n {
            let mut q = p.clone();
            q.insert(slot, n - 1);
            out.push(q);
        }
    }
    out
}

type CanonicalKey = (Vec<usize>, Vec<Vec<usize>>);

/// Lexicographically least relabelling of the tables.
fn canonical_key(cat: &FinCat, sizes: &[usize], maps: &[Vec<usize>]) -> CanonicalKey {
    let per_object: Vec<Vec<Vec<usize>>> = sizes.iter().map(|&n| permutations(n)).collect();
    let mut choice = vec![0usize; sizes.len()];
    let mut best: Option<Vec<Vec<usize>>> = None;
    loop {
        let perm: Vec<&Vec<usize>> = choice.iter().enumerate().map(|(o, &k)| &per_object[o][k]).collect();
        let relabelled: Vec<Vec<usize>> = maps
            .iter()
            .enumerate()
            .map(|(m, table)| {
                let (d, c) = (cat.dom(m), cat.cod(m));
                let mut t = vec![0; table.len()];
                for (x, &y) in table.iter().enumerate() {
                    t[perm[d][x]] = perm[c][y];
                }
                t
            })
            .collect();
        if best.as_ref().is_none_or(|b| relabelled < *b) {
            best = Some(relabelled);
        }
        let mut pos = 0;
        while pos < choice.len() {
            choice[pos] += 1;
            if choice[pos] < per_object[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
        if pos == choice.len() {
            break;
        }
    }
    (sizes.to_vec(), best.unwrap_or_default())
}

/// One representative per isomorphism class of functors whose sets have at
/// most `max_size` elements, sorted by sizes and then tables.
pub fn functors_up_to_iso(cat: &Arc<FinCat>, max_size: usize, bound: Bound) -> Result<Vec<FinFunctor>, FinCatError> {
    let objects = cat.object_count();
    let free: Vec<usize> = (0..cat.morphism_count()).filter(|&m| !cat.is_identity(m)).collect();
    let mut classes: BTreeSet<CanonicalKey> = BTreeSet::new();
    let mut sizes = vec![0usize; objects];
    loop {
        let ranges: Vec<(usize, usize)> = free.iter().map(|&m| (sizes[cat.dom(m)], sizes[cat.cod(m)])).collect();
        let candidates = ranges.iter().fold(1u128, |acc, &(d, c)| acc.saturating_mul((c as u128).saturating_pow(d as u32)));
        if candidates > bound.0 as u128 {
            return Err(FinCatError::SizeLimit { what: "functor enumeration".into(), candidates, bound: bound.0 });
        }
        let mut tables: Vec<Vec<usize>> = ranges.iter().map(|&(d, _)| vec![0; d]).collect();
        let feasible = ranges.iter().all(|&(d, c)| d == 0 || c > 0);
        while feasible {
            let mut maps: Vec<Vec<usize>> = vec![Vec::new(); cat.morphism_count()];
            for o in 0..objects {
                maps[cat.identity(o)] = (0..sizes[o]).collect();
            }
            for (k, &m) in free.iter().enumerate() {
                maps[m] = tables[k].clone();
            }
            let f = FinFunctor::from_tables(cat, &sizes, maps)?;
            if f.is_functor() {
                classes.insert(canonical_key(cat, &sizes, f.maps()));
            }
            if !advance_tables(&mut tables, &ranges) {
                break;
            }
        }
        let mut pos = 0;
        while pos < objects {
            sizes[pos] += 1;
            if sizes[pos] <= max_size {
                break;
            }
            sizes[pos] = 0;
            pos += 1;
        }
        if pos == objects {
            break;
        }
    }
    let mut out: Vec<CanonicalKey> = classes.into_iter().collect();
    out.sort();
    out.into_iter().map(|(s, maps)| FinFunctor::from_tables(cat, &s, maps)).collect()
}

fn advance_tables(tables: &mut [Vec<usize>], ranges: &[(usize, usize)]) -> bool {
    for (t, &(_, c)) in tables.iter_mut().zip(ranges) {
        for entry in t.iter_mut() {
            *entry += 1;
            if *entry < c {
                return true;
            }
            *entry = 0;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_on_small_categories() {
        let t = Arc::new(FinCat::build("terminal", &["*"], &[], &[]).unwrap());
        assert_eq!(functors_up_to_iso(&t, 3, Bound(1000)).unwrap().len(), 4);
        let z2 = Arc::new(FinCat::build("z2", &["*"], &[("s", "*", "*")], &[("s", "s", "id_*")]).unwrap());
        // involutions up to conjugacy on sets of size 0..=3
        assert_eq!(functors_up_to_iso(&z2, 3, Bound(1000)).unwrap().len(), 1 + 1 + 2 + 2);
        let idem = Arc::new(FinCat::build("idem", &["*"], &[("e", "*", "*")], &[("e", "e", "e")]).unwrap());
        assert_eq!(functors_up_to_iso(&idem, 3, Bound(1000)).unwrap().len(), 1 + 1 + 2 + 3);
    }

    #[test]
    fn hom_sets_match_set_exponentials() {
        let t = Arc::new(FinCat::build("terminal", &["*"], &[], &[]).unwrap());
        let a = Arc::new(FinFunctor::from_tables(&t, &[2], vec![vec![0, 1]]).unwrap());
        let b = Arc::new(FinFunctor::from_tables(&t, &[3], vec![vec![0, 1, 2]]).unwrap());
        assert_eq!(nat_transformations(&a, &b, Bound(1000)).unwrap().len(), 9);
        assert!(matches!(nat_transformations(&a, &b, Bound(2)), Err(FinCatError::SizeLimit { .. })));
    }
}
