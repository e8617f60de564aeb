//! Finite limits, computed objectwise.

use std::sync::Arc;

use super::category::FinCat;
use super::functor::{FinFunctor, NatTrans};
use super::FinCatError;

/// The functor constant at a one-point set.
pub fn terminal(cat: &Arc<FinCat>) -> FinFunctor {
    let labels = vec![vec!["*".to_string()]; cat.object_count()];
    let maps = vec![vec![0]; cat.morphism_count()];
    FinFunctor::new(cat, labels, maps).expect("terminal functor is well formed")
}

/// The functor constant at the empty set.
pub fn initial(cat: &Arc<FinCat>) -> FinFunctor {
    FinFunctor::new(cat, vec![Vec::new(); cat.object_count()], vec![Vec::new(); cat.morphism_count()])
        .expect("empty functor is well formed")
}

/// Objectwise product; the pair `(x, y)` has index `x * |N(V)| + y`.
pub fn product(
    m: &Arc<FinFunctor>,
    n: &Arc<FinFunctor>,
) -> Result<(Arc<FinFunctor>, NatTrans, NatTrans), FinCatError> {
    if m.cat() != n.cat() {
        return Err(FinCatError::CategoryMismatch);
    }
    let cat = m.cat();
    let labels = (0..cat.object_count())
        .map(|o| {
            let mut v = Vec::with_capacity(m.size(o) * n.size(o));
            for x in m.labels(o) {
                for y in n.labels(o) {
                    v.push(format!("({x},{y})"));
                }
            }
            v
        })
        .collect();
    let maps = (0..cat.morphism_count())
        .map(|f| {
            let (d, c) = (cat.dom(f), cat.cod(f));
            let mut t = Vec::with_capacity(m.size(d) * n.size(d));
            for x in 0..m.size(d) {
                for y in 0..n.size(d) {
                    t.push(m.apply(f, x) * n.size(c) + n.apply(f, y));
                }
            }
            t
        })
        .collect();
    let p = Arc::new(FinFunctor::new(cat, labels, maps)?);
    let proj = |first: bool| {
        let comps = (0..cat.object_count())
            .map(|o| {
                let w = n.size(o);
                (0..m.size(o) * w).map(|k| if first { k / w } else { k % w }).collect()
            })
            .collect();
        NatTrans::new(&p, if first { m } else { n }, comps)
    };
    let (p1, p2) = (proj(true)?, proj(false)?);
    Ok((p, p1, p2))
}

/// `<f, g>: X => M × N` for `f: X => M`, `g: X => N`, into a product built by
/// [`product`].
pub fn pairing(f: &NatTrans, g: &NatTrans, into: &Arc<FinFunctor>) -> Result<NatTrans, FinCatError> {
    if f.source() != g.source() {
        return Err(FinCatError::Functor("pairing needs a common source".into()));
    }
    let comps = (0..f.source().cat().object_count())
        .map(|o| {
            let w = g.target().size(o);
            (0..f.source().size(o)).map(|x| f.apply(o, x) * w + g.apply(o, x)).collect()
        })
        .collect();
    NatTrans::new(f.source(), into, comps)
}

/// Objectwise subset where `f` and `g` agree, with its inclusion.
pub fn equalizer(f: &NatTrans, g: &NatTrans) -> Result<(Arc<FinFunctor>, NatTrans), FinCatError> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(FinCatError::Functor("equalizer needs parallel transformations".into()));
    }
    let m = f.source();
    subfunctor(m, |o, x| f.apply(o, x) == g.apply(o, x))
}

/// The subfunctor of `m` cut out by `keep`, with its inclusion. Fails when the
/// subset is not closed under the functor action.
pub(crate) fn subfunctor(
    m: &Arc<FinFunctor>,
    keep: impl Fn(usize, usize) -> bool,
) -> Result<(Arc<FinFunctor>, NatTrans), FinCatError> {
    let cat = m.cat();
    let members: Vec<Vec<usize>> = (0..cat.object_count()).map(|o| (0..m.size(o)).filter(|&x| keep(o, x)).collect()).collect();
    let position = |o: usize, x: usize| members[o].binary_search(&x).ok();
    let labels = members
        .iter()
        .enumerate()
        .map(|(o, xs)| xs.iter().map(|&x| m.label(o, x).to_string()).collect())
        .collect();
    let mut maps = Vec::with_capacity(cat.morphism_count());
    for f in 0..cat.morphism_count() {
        let (d, c) = (cat.dom(f), cat.cod(f));
        let mut t = Vec::with_capacity(members[d].len());
        for &x in &members[d] {
            let y = m.apply(f, x);
            t.push(position(c, y).ok_or_else(|| {
                FinCatError::NotFunctorial(format!(
                    "subset not closed under `{}`: {} leaves it",
                    cat.arrow(f).name,
                    m.label(c, y)
                ))
            })?);
        }
        maps.push(t);
    }
    let e = Arc::new(FinFunctor::new(cat, labels, maps)?);
    let incl = NatTrans::new(&e, m, members)?;
    Ok((e, incl))
}

/// `X ×_L Y` for `f: X => L`, `g: Y => L`, as the subfunctor of `X × Y`.
pub fn fibered_product(f: &NatTrans, g: &NatTrans) -> Result<(Arc<FinFunctor>, NatTrans, NatTrans), FinCatError> {
    if f.target() != g.target() {
        return Err(FinCatError::Functor("fibered product needs a common base".into()));
    }
    let (full, p1, p2) = product(f.source(), g.source())?;
    let (sub, incl) = subfunctor(&full, |o, k| f.apply(o, p1.apply(o, k)) == g.apply(o, p2.apply(o, k)))?;
    Ok((sub, p1.after(&incl)?, p2.after(&incl)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow() -> Arc<FinCat> {
        Arc::new(FinCat::build("arrow", &["A", "B"], &[("f", "A", "B")], &[]).unwrap())
    }

    #[test]
    fn product_cardinalities_and_projections() {
        let c = arrow();
        let m = Arc::new(FinFunctor::from_generators(&c, &[2, 2], &[("f", vec![1, 0])]).unwrap());
        let n = Arc::new(FinFunctor::from_generators(&c, &[3, 1], &[("f", vec![0, 0, 0])]).unwrap());
        let (p, p1, p2) = product(&m, &n).unwrap();
        assert_eq!(p.sizes(), vec![6, 2]);
        assert!(p.is_functor() && p1.is_natural() && p2.is_natural());
        let one = Arc::new(terminal(&c));
        let (q, q1, _) = product(&m, &one).unwrap();
        assert!(q.same_tables(&m));
        assert_eq!(q1.after(&NatTrans::identity(&q)).unwrap().flat(), vec![0, 1, 0, 1]);
    }

    #[test]
    fn equalizer_extremes() {
        let c = arrow();
        let m = Arc::new(FinFunctor::from_generators(&c, &[2, 2], &[("f", vec![0, 1])]).unwrap());
        let id = NatTrans::identity(&m);
        let (e, _) = equalizer(&id, &id).unwrap();
        assert!(e.same_tables(&m));
        let swap = NatTrans::natural(&m, &m, vec![vec![1, 0], vec![1, 0]]).unwrap();
        let (e, _) = equalizer(&id, &swap).unwrap();
        assert_eq!(e.sizes(), vec![0, 0]);
    }
}
