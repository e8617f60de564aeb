//! Precomposition against exponentials: the canonical comparison
//! `(M^N) ∘ G -> (M ∘ G)^(N ∘ G)`, its isomorphism check, and the equality of
//! the two composites induced by a connecting family `η: G1 => G2`.

use std::sync::Arc;

use serde::Serialize;

use crate::report::ValidationReport;

use super::endo::{precompose, sliced_t_with_inclusion, EndofunctorData, NaturalFamily};
use super::enumerate::Bound;
use super::exponential::Exponential;
use super::functor::{FinFunctor, NatTrans};
use super::slice::{SliceExponential, SlicedObject};
use super::{Endofunctor, FinCatError};

/// Outcome for one comparison morphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub endofunctor: String,
    pub source_sizes: Vec<usize>,
    pub target_sizes: Vec<usize>,
    pub natural: bool,
    pub isomorphism: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompatReport {
    pub comparisons: Vec<Comparison>,
    /// `None` when no connecting family was supplied.
    pub composites_equal: Option<bool>,
    pub composite_points: u64,
    pub composite_witness: Option<String>,
}

impl CompatReport {
    pub fn passed(&self) -> bool {
        self.comparisons.iter().all(|c| c.natural && c.isomorphism) && self.composites_equal != Some(false)
    }

    pub fn to_validation(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        for c in &self.comparisons {
            r.record(format!("comparison_{}", c.endofunctor), (!(c.natural && c.isomorphism)).then(|| c.witness.clone().unwrap_or_default()));
        }
        if let Some(eq) = self.composites_equal {
            r.record("composites_equal", (!eq).then(|| self.composite_witness.clone().unwrap_or_default()));
        }
        r
    }
}

fn judge(name: &str, c: NatTrans) -> Comparison {
    let mut witness = c.naturality_witness();
    let natural = witness.is_none();
    let source = c.source();
    let target = c.target();
    let mut isomorphism = true;
    for v in 0..source.cat().object_count() {
        let mut seen = vec![false; target.size(v)];
        for &y in c.component(v) {
            seen[y] = true;
        }
        if source.size(v) != target.size(v) || seen.contains(&false) {
            isomorphism = false;
            witness.get_or_insert_with(|| {
                format!(
                    "comparison at `{}` maps {} elements onto {} of {}",
                    source.cat().objects()[v],
                    source.size(v),
                    seen.iter().filter(|&&b| b).count(),
                    target.size(v)
                )
            });
            break;
        }
    }
    Comparison {
        endofunctor: name.to_string(),
        source_sizes: source.sizes(),
        target_sizes: target.sizes(),
        natural,
        isomorphism,
        witness,
    }
}

/// `s ↦ (ψ ↦ s_{G(ψ)})`.
fn comparison(g: &Endofunctor, exp: &Exponential, bound: Bound) -> Result<Comparison, FinCatError> {
    let cat = g.cat();
    let source = Arc::new(precompose(g, exp.functor())?);
    let mg = Arc::new(precompose(g, exp.base())?);
    let ng = Arc::new(precompose(g, exp.exponent())?);
    let target = Exponential::new(&mg, &ng, bound)?;
    let mut comps = Vec::with_capacity(cat.object_count());
    for w in 0..cat.object_count() {
        let space = target.space(w);
        let mut row = Vec::with_capacity(source.size(w));
        for k in 0..source.size(w) {
            let flat: Vec<usize> = space.slots.iter().flat_map(|s| exp.component(k, g.mor(s.mor)).iter().copied()).collect();
            match space.lookup(&flat) {
                Some(t) => row.push(t),
                None => {
                    return Ok(Comparison {
                        endofunctor: g.name().to_string(),
                        source_sizes: source.sizes(),
                        target_sizes: target.functor().sizes(),
                        natural: false,
                        isomorphism: false,
                        witness: Some(format!("reindexed family {} at `{}` is not compatible", source.label(w, k), cat.objects()[w])),
                    })
                }
            }
        }
        comps.push(row);
    }
    Ok(judge(g.name(), NatTrans::new(&source, target.functor(), comps)?))
}

/// Checks the comparison for `g` and, given `η: g => G2`, for `G2` and the
/// pointwise equality `M(η_V') ∘ s_{G1 ψ} = s_{G2 ψ ∘ η_W} ∘ N(η_V')`.
pub fn exp_compat_check(
    g: &Endofunctor,
    m: &Arc<FinFunctor>,
    n: &Arc<FinFunctor>,
    eta: Option<&NaturalFamily>,
    bound: Bound,
) -> Result<CompatReport, FinCatError> {
    if g.cat() != m.cat() || m.cat() != n.cat() {
        return Err(FinCatError::CategoryMismatch);
    }
    let exp = Exponential::new(m, n, bound)?;
    let mut comparisons = vec![comparison(g, &exp, bound)?];
    let mut report = CompatReport { comparisons: Vec::new(), composites_equal: None, composite_points: 0, composite_witness: None };
    if let Some(eta) = eta {
        if eta.source != *g {
            return Err(FinCatError::Functor("connecting family does not start at the endofunctor".into()));
        }
        comparisons.push(comparison(&eta.target, &exp, bound)?);
        let (g1, g2) = (&eta.source, &eta.target);
        let cat = g.cat();
        let mut equal = true;
        'outer: for w in 0..cat.object_count() {
            let at = g1.obj(w);
            for k in 0..exp.functor().size(at) {
                for psi in cat.out_of(w).iter().copied() {
                    let v = cat.cod(psi);
                    let e = eta.components[v];
                    let left_fn = exp.component(k, g1.mor(psi));
                    let right_fn = exp.component(k, cat.comp(g2.mor(psi), eta.components[w]));
                    for y in 0..n.size(g1.obj(v)) {
                        report.composite_points += 1;
                        let left = m.apply(e, left_fn[y]);
                        let right = right_fn[n.apply(e, y)];
                        if left != right {
                            equal = false;
                            report.composite_witness = Some(format!(
                                "composites differ at `{}` for {} along `{}` on {}",
                                cat.objects()[w],
                                exp.functor().label(at, k),
                                cat.arrow(psi).name,
                                n.label(g1.obj(v), y)
                            ));
                            break 'outer;
                        }
                    }
                }
            }
        }
        report.composites_equal = Some(equal);
    }
    report.comparisons = comparisons;
    Ok(report)
}

/// Sliced comparison `T(A^B) -> T(A)^T(B)`, both sliced constructions taken
/// over the common base.
fn slice_comparison(data: &EndofunctorData, exp: &SliceExponential, bound: Bound) -> Result<Comparison, FinCatError> {
    let g = &data.functor;
    let cat = g.cat();
    let (source, s_incl) = sliced_t_with_inclusion(data, exp.object())?;
    let (ta, a_incl) = sliced_t_with_inclusion(data, exp.base())?;
    let (tb, b_incl) = sliced_t_with_inclusion(data, exp.exponent())?;
    let target = SliceExponential::new(&ta, &tb, bound)?;
    let fail = |witness: String| Comparison {
        endofunctor: g.name().to_string(),
        source_sizes: source.total.sizes(),
        target_sizes: target.object().total.sizes(),
        natural: false,
        isomorphism: false,
        witness: Some(witness),
    };
    let mut comps = Vec::with_capacity(cat.object_count());
    for w in 0..cat.object_count() {
        let mut row = Vec::with_capacity(source.total.size(w));
        for x in 0..source.total.size(w) {
            let point = source.structure.apply(w, x);
            let original = s_incl.apply(w, x);
            let (space, offset) = &target.spaces[w][point];
            let mut flat = Vec::new();
            for slot in &space.slots {
                let v = cat.cod(slot.mor);
                let (domain, values) = exp.component(original, g.mor(slot.mor));
                for &y in &slot.domain {
                    let b = b_incl.apply(v, y);
                    let Some(j) = domain.iter().position(|&d| d == b) else {
                        return Ok(fail(format!("{} lies outside the fiber of the reindexed family", tb.total.label(v, y))));
                    };
                    let Some(z) = a_incl.component(v).iter().position(|&t| t == values[j]) else {
                        return Ok(fail(format!("value {} leaves the sliced subfunctor", exp.base().total.label(g.obj(v), values[j]))));
                    };
                    flat.push(z);
                }
            }
            match space.lookup(&flat) {
                Some(k) => row.push(offset + k),
                None => return Ok(fail(format!("reindexed family at `{}` is not compatible", cat.objects()[w]))),
            }
        }
        comps.push(row);
    }
    let c = NatTrans::new(&source.total, &target.object().total, comps)?;
    let mut out = judge(g.name(), c.clone());
    let over = (0..cat.object_count())
        .flat_map(|w| (0..source.total.size(w)).map(move |x| (w, x)))
        .find(|&(w, x)| target.object().structure.apply(w, c.apply(w, x)) != source.structure.apply(w, x));
    if let Some((w, _)) = over {
        out.natural = false;
        out.witness.get_or_insert_with(|| format!("comparison at `{}` does not respect the base", cat.objects()[w]));
    }
    Ok(out)
}

/// Slice analogue of [`exp_compat_check`]; `second` supplies `(G2, η)` with
/// `η` compatible with the canonical maps.
pub fn exp_compat_check_slice(
    data: &EndofunctorData,
    a: &SlicedObject,
    b: &SlicedObject,
    second: Option<(&EndofunctorData, &NaturalFamily)>,
    bound: Bound,
) -> Result<CompatReport, FinCatError> {
    let exp = SliceExponential::new(a, b, bound)?;
    let mut report = CompatReport {
        comparisons: vec![slice_comparison(data, &exp, bound)?],
        composites_equal: None,
        composite_points: 0,
        composite_witness: None,
    };
    let Some((data2, eta)) = second else {
        return Ok(report);
    };
    // also rejects families incompatible with p and i
    super::endo::sliced_alpha(eta, data, data2, a)?;
    report.comparisons.push(slice_comparison(data2, &exp, bound)?);
    let (g1, g2) = (&data.functor, &data2.functor);
    let cat = g1.cat();
    let (source, s_incl) = sliced_t_with_inclusion(data, exp.object())?;
    let (tb, b_incl) = sliced_t_with_inclusion(data, b)?;
    let mut equal = true;
    'outer: for w in 0..cat.object_count() {
        for x in 0..source.total.size(w) {
            let original = s_incl.apply(w, x);
            for psi in cat.out_of(w).iter().copied() {
                let v = cat.cod(psi);
                let e = eta.components[v];
                let (ldom, lvals) = exp.component(original, g1.mor(psi));
                let (rdom, rvals) = exp.component(original, cat.comp(g2.mor(psi), eta.components[w]));
                let point = source.structure.apply(w, x);
                for y in tb.fiber(v, tb.base().apply(psi, point)) {
                    report.composite_points += 1;
                    let bb = b_incl.apply(v, y);
                    let left = ldom.iter().position(|&d| d == bb).map(|j| a.total.apply(e, lvals[j]));
                    let moved = b.total.apply(e, bb);
                    let right = rdom.iter().position(|&d| d == moved).map(|j| rvals[j]);
                    if left.is_none() || left != right {
                        equal = false;
                        report.composite_witness = Some(format!(
                            "sliced composites differ at `{}` along `{}` on {}",
                            cat.objects()[w],
                            cat.arrow(psi).name,
                            b.total.label(g1.obj(v), bb)
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }
    report.composites_equal = Some(equal);
    Ok(report)
}
