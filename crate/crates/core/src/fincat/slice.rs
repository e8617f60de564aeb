//! Exponentials in the slice over a fixed base functor `L`, read fiberwise:
//! an element over `ℓ ∈ L(W)` is a family of fiber maps
//! `B(V)_{L(φ)ℓ} -> A(V)_{L(φ)ℓ}`, one per `φ: W -> V`.

use std::sync::Arc;

use super::category::Obj;
use super::enumerate::{over_base, Bound};
use super::exponential::{bijection, CccReport, FamilySpace, ProbeOutcome};
use super::functor::{FinFunctor, NatTrans};
use super::limits::{fibered_product, terminal};
use super::FinCatError;

/// An object `total => L` of the slice over `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlicedObject {
    pub total: Arc<FinFunctor>,
    pub structure: NatTrans,
}

impl SlicedObject {
    pub fn new(structure: NatTrans) -> Result<SlicedObject, FinCatError> {
        if let Some(w) = structure.naturality_witness() {
            return Err(FinCatError::NonNatural(w));
        }
        Ok(SlicedObject { total: structure.source().clone(), structure })
    }

    /// `M => 1`.
    pub fn over_terminal(m: &Arc<FinFunctor>) -> SlicedObject {
        let one = Arc::new(terminal(m.cat()));
        let comps = m.sizes().into_iter().map(|n| vec![0; n]).collect();
        SlicedObject::new(NatTrans::new(m, &one, comps).expect("maps into a point")).expect("natural")
    }

    pub fn base(&self) -> &Arc<FinFunctor> {
        self.structure.target()
    }

    /// Elements of `total(V)` over `ℓ`, ascending.
    pub fn fiber(&self, v: Obj, l: usize) -> Vec<usize> {
        (0..self.total.size(v)).filter(|&x| self.structure.apply(v, x) == l).collect()
    }
}

/// `A^B` in the slice, with the family data behind each element.
#[derive(Clone, Debug)]
pub struct SliceExponential {
    base: SlicedObject,
    exponent: SlicedObject,
    /// Per object: one family space per base point, and the global offset of its elements.
    pub(crate) spaces: Vec<Vec<(FamilySpace, usize)>>,
    object: SlicedObject,
}

impl SliceExponential {
    pub fn new(a: &SlicedObject, b: &SlicedObject, bound: Bound) -> Result<SliceExponential, FinCatError> {
        if a.base() != b.base() {
            return Err(FinCatError::Functor("slice objects over different bases".into()));
        }
        let l = a.base().clone();
        let cat = l.cat().clone();
        let mut spaces = Vec::with_capacity(cat.object_count());
        for w in 0..cat.object_count() {
            let mut per_point = Vec::with_capacity(l.size(w));
            let mut offset = 0;
            for point in 0..l.size(w) {
                let outgoing = cat.out_of(w);
                let domains = outgoing.iter().map(|&m| b.fiber(cat.cod(m), l.apply(m, point))).collect();
                let codomains = outgoing.iter().map(|&m| a.fiber(cat.cod(m), l.apply(m, point))).collect();
                let space = FamilySpace::build(&a.total, &b.total, w, domains, codomains, bound)?;
                let len = space.families.len();
                per_point.push((space, offset));
                offset += len;
            }
            spaces.push(per_point);
        }
        let mut labels = Vec::with_capacity(cat.object_count());
        let mut structure = Vec::with_capacity(cat.object_count());
        for (w, per_point) in spaces.iter().enumerate() {
            let mut lw = Vec::new();
            let mut sw = Vec::new();
            for (point, (space, _)) in per_point.iter().enumerate() {
                for k in 0..space.families.len() {
                    lw.push(format!("{}|{}", l.label(w, point), space.render(k, &a.total, &cat)));
                    sw.push(point);
                }
            }
            labels.push(lw);
            structure.push(sw);
        }
        let mut maps = Vec::with_capacity(cat.morphism_count());
        for psi in 0..cat.morphism_count() {
            let (w1, w2) = (cat.dom(psi), cat.cod(psi));
            let mut table = Vec::new();
            for (point, (space, _)) in spaces[w1].iter().enumerate() {
                let moved = l.apply(psi, point);
                let (target, offset) = &spaces[w2][moved];
                for k in 0..space.families.len() {
                    let flat = space.reindex(k, psi, target, &cat);
                    let idx = target.lookup(&flat).ok_or_else(|| {
                        FinCatError::NotFunctorial(format!(
                            "reindexing along `{}` leaves the slice exponential",
                            cat.arrow(psi).name
                        ))
                    })?;
                    table.push(offset + idx);
                }
            }
            maps.push(table);
        }
        let total = Arc::new(FinFunctor::new(&cat, labels, maps)?);
        let object = SlicedObject::new(NatTrans::new(&total, &l, structure)?)?;
        Ok(SliceExponential { base: a.clone(), exponent: b.clone(), spaces, object })
    }

    pub fn object(&self) -> &SlicedObject {
        &self.object
    }

    /// `(ℓ, family index)` of global element `x` at `w`.
    pub(crate) fn locate(&self, w: Obj, x: usize) -> (usize, usize) {
        let point = self.spaces[w]
            .iter()
            .position(|(space, off)| x >= *off && x < off + space.families.len())
            .expect("element index in range");
        (point, x - self.spaces[w][point].1)
    }

    pub fn base(&self) -> &SlicedObject {
        &self.base
    }

    pub fn exponent(&self) -> &SlicedObject {
        &self.exponent
    }

    /// The fiber map `s_φ` of element `x` at `dom φ`, on the fiber domain.
    pub fn component(&self, x: usize, phi: usize) -> (Vec<usize>, Vec<usize>) {
        let cat = self.object.total.cat();
        let w = cat.dom(phi);
        let (point, k) = self.locate(w, x);
        let space = &self.spaces[w][point].0;
        let slot = space.slot(phi).expect("morphism out of w");
        (slot.domain.clone(), space.values(k, phi).to_vec())
    }

    fn curry_flat(&self, probe: &SlicedObject, pb: &PairIndex, theta: &[usize]) -> Result<Vec<usize>, String> {
        let cat = self.object.total.cat();
        let mut out = Vec::new();
        for w in 0..cat.object_count() {
            for p in 0..probe.total.size(w) {
                let point = probe.structure.apply(w, p);
                let (space, offset) = &self.spaces[w][point];
                let mut flat = Vec::new();
                for s in &space.slots {
                    let v = cat.cod(s.mor);
                    let moved = probe.total.apply(s.mor, p);
                    for &b in &s.domain {
                        let Some(idx) = pb.get(v, moved, b) else {
                            return Err(format!("pair ({moved}, {b}) missing from the fibered product"));
                        };
                        flat.push(theta[pb.start[v] + idx]);
                    }
                }
                match space.lookup(&flat) {
                    Some(k) => out.push(offset + k),
                    None => {
                        return Err(format!(
                            "curried family at `{}` for {} is not compatible",
                            cat.objects()[w],
                            probe.total.label(w, p)
                        ))
                    }
                }
            }
        }
        Ok(out)
    }

    fn uncurry_flat(&self, probe: &SlicedObject, pb: &PairIndex, sigma: &[usize]) -> Vec<usize> {
        let cat = self.object.total.cat();
        let mut out = Vec::new();
        let mut at = 0;
        for w in 0..cat.object_count() {
            let id = cat.identity(w);
            for &(p, b) in &pb.pairs[w] {
                let (point, k) = self.locate(w, sigma[at + p]);
                let space = &self.spaces[w][point].0;
                let slot = space.slot(id).expect("identity slot");
                let j = slot.domain.iter().position(|&d| d == b).expect("b lies in the fiber");
                out.push(space.values(k, id)[j]);
            }
            at += probe.total.size(w);
        }
        out
    }
}

/// Layout of `P ×_L B`: the pairs at each object, in index order.
struct PairIndex {
    pairs: Vec<Vec<(usize, usize)>>,
    lookup: Vec<std::collections::HashMap<(usize, usize), usize>>,
    start: Vec<usize>,
}

impl PairIndex {
    fn get(&self, w: Obj, p: usize, b: usize) -> Option<usize> {
        self.lookup[w].get(&(p, b)).copied()
    }
}

/// `A^B` in the slice over the common base of `a` and `b`.
pub fn slice_exponential(a: &SlicedObject, b: &SlicedObject, bound: Bound) -> Result<SlicedObject, FinCatError> {
    Ok(SliceExponential::new(a, b, bound)?.object)
}

/// Slice analogue of [`super::verify_ccc`]: hom-sets are slice morphisms and
/// the product is the fibered product over the base.
pub fn verify_slice_ccc(
    a: &SlicedObject,
    b: &SlicedObject,
    probes: &[SlicedObject],
    probe_morphisms: &[NatTrans],
    bound: Bound,
) -> Result<CccReport, FinCatError> {
    let exp = SliceExponential::new(a, b, bound)?;
    verify_slice_ccc_with(&exp, probes, probe_morphisms, bound)
}

pub(crate) fn verify_slice_ccc_with(
    exp: &SliceExponential,
    probes: &[SlicedObject],
    probe_morphisms: &[NatTrans],
    bound: Bound,
) -> Result<CccReport, FinCatError> {
    let a = &exp.base;
    let b = &exp.exponent;
    let mut outcomes = Vec::with_capacity(probes.len());
    for probe in probes {
        let (pb, pi1, _) = fibered_product(&probe.structure, &b.structure)?;
        let layout = pair_layout(&pb, probe, b)?;
        let pb_structure = probe.structure.after(&pi1)?;
        let pb_allowed = over_base(&pb_structure, &a.structure);
        let probe_allowed = over_base(&probe.structure, &exp.object.structure);
        let curry = |theta: &[usize]| exp.curry_flat(probe, &layout, theta);
        let uncurry = |sigma: &[usize]| exp.uncurry_flat(probe, &layout, sigma);
        let bj = bijection(
            &pb,
            &a.total,
            Some(&pb_allowed),
            &probe.total,
            &exp.object.total,
            Some(&probe_allowed),
            &curry,
            &uncurry,
            bound,
        )?;

        let mut natural = true;
        let mut witness = bj.witness.clone();
        for gamma in probe_morphisms.iter().filter(|g| g.target().as_ref() == probe.total.as_ref()) {
            let over = probe.structure.after(gamma)?;
            let Some(source) = probes.iter().find(|q| q.total.as_ref() == gamma.source().as_ref() && q.structure == over) else {
                continue;
            };
            let (spb, _, _) = fibered_product(&source.structure, &b.structure)?;
            let slayout = pair_layout(&spb, source, b)?;
            for theta in &bj.thetas {
                let mut pulled = Vec::new();
                for w in 0..spb.cat().object_count() {
                    for &(p, bb) in &slayout.pairs[w] {
                        let idx = layout.get(w, gamma.apply(w, p), bb).expect("γ respects the base");
                        pulled.push(theta[layout.start[w] + idx]);
                    }
                }
                let left = exp.curry_flat(source, &slayout, &pulled);
                let right = exp.curry_flat(probe, &layout, theta).map(|s| {
                    let s = NatTrans::from_flat(&probe.total, &exp.object.total, &s);
                    s.after(gamma).map(|t| t.flat()).unwrap_or_default()
                });
                if left != right {
                    natural = false;
                    witness.get_or_insert_with(|| format!("currying is not natural along a probe morphism at θ = {theta:?}"));
                    break;
                }
            }
        }
        outcomes.push(ProbeOutcome {
            probe: probe.total.to_string(),
            uncurried: bj.uncurried,
            curried: bj.curried,
            bijective: bj.bijective,
            round_trip: bj.round_trip,
            natural_in_probe: natural,
            witness: if bj.bijective && bj.round_trip && natural { None } else { witness },
        });
    }
    Ok(CccReport { outcomes })
}

/// Pairs `(p, b)` of `P ×_L B` at each object, in the order used by
/// [`fibered_product`].
fn pair_layout(pb: &FinFunctor, probe: &SlicedObject, b: &SlicedObject) -> Result<PairIndex, FinCatError> {
    let cat = pb.cat();
    let mut idx = PairIndex { pairs: Vec::new(), lookup: Vec::new(), start: Vec::new() };
    let mut acc = 0;
    for w in 0..cat.object_count() {
        let mut ws = Vec::new();
        for p in 0..probe.total.size(w) {
            for bb in 0..b.total.size(w) {
                if probe.structure.apply(w, p) == b.structure.apply(w, bb) {
                    ws.push((p, bb));
                }
            }
        }
        if ws.len() != pb.size(w) {
            return Err(FinCatError::Functor("fibered product layout mismatch".into()));
        }
        idx.lookup.push(ws.iter().enumerate().map(|(i, &pr)| (pr, i)).collect());
        idx.start.push(acc);
        acc += ws.len();
        idx.pairs.push(ws);
    }
    Ok(idx)
}
