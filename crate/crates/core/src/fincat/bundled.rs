//! Small categories, endofunctor data and sliced objects used by the tests,
//! the law suite and the examples.

use std::sync::Arc;

use super::endo::{Endofunctor, EndofunctorData, NaturalFamily};
use super::enumerate::{functors_up_to_iso, nat_transformations, slice_morphisms, Bound};
use super::limits::product;
use super::slice::SlicedObject;
use super::{FinCat, FinCatError, FinFunctor, NatTrans};

fn build(name: &str, objects: &[&str], arrows: &[(&str, &str, &str)], comps: &[(&str, &str, &str)]) -> Arc<FinCat> {
    Arc::new(FinCat::build(name, objects, arrows, comps).expect("bundled category is well formed"))
}

pub fn terminal_category() -> Arc<FinCat> {
    build("terminal", &["*"], &[], &[])
}

pub fn discrete_two() -> Arc<FinCat> {
    build("discrete2", &["A", "B"], &[], &[])
}

/// `A -f-> B`.
pub fn arrow() -> Arc<FinCat> {
    build("arrow", &["A", "B"], &[("f", "A", "B")], &[])
}

/// One object, `s ∘ s = id`.
pub fn z2() -> Arc<FinCat> {
    build("z2", &["*"], &[("s", "*", "*")], &[("s", "s", "id_*")])
}

/// One object, `e ∘ e = e`.
pub fn idempotent() -> Arc<FinCat> {
    build("idempotent", &["*"], &[("e", "*", "*")], &[("e", "e", "e")])
}

/// `u: A -> B` and `v: B -> A` inverse to each other.
pub fn iso_pair() -> Arc<FinCat> {
    build("iso", &["A", "B"], &[("u", "A", "B"), ("v", "B", "A")], &[("v", "u", "id_A"), ("u", "v", "id_B")])
}

/// One object, `r` of order three.
pub fn z3() -> Arc<FinCat> {
    build("z3", &["*"], &[("r", "*", "*"), ("rr", "*", "*")], &[("r", "r", "rr"), ("r", "rr", "id_*"), ("rr", "r", "id_*"), ("rr", "rr", "r")])
}

/// The categories the exhaustive checks run over.
pub fn categories() -> Vec<Arc<FinCat>> {
    vec![terminal_category(), discrete_two(), arrow(), z2(), idempotent(), iso_pair()]
}

/// An `n`-element set at every object with identity actions.
pub fn constant(cat: &Arc<FinCat>, n: usize) -> FinFunctor {
    let maps = (0..cat.morphism_count()).map(|_| (0..n).collect()).collect();
    FinFunctor::from_tables(cat, &vec![n; cat.object_count()], maps).expect("constant functor")
}

/// Endofunctor data with an optional second datum and a connecting family
/// compatible with the canonical maps.
#[derive(Clone, Debug)]
pub struct DataInstance {
    pub name: String,
    pub data: EndofunctorData,
    pub second: Option<(EndofunctorData, NaturalFamily)>,
}

/// Identity data on every category, the flip on `z2` and the swap on `iso`,
/// each paired with the identity datum through `p`.
pub fn endofunctor_data() -> Vec<DataInstance> {
    let mut out = Vec::new();
    for cat in categories() {
        let id = EndofunctorData::identity(&cat);
        let eta = NaturalFamily::identity(&id.functor);
        out.push(DataInstance { name: format!("{}/identity", cat.name()), data: id.clone(), second: Some((id, eta)) });
    }
    let c = z2();
    let g = Endofunctor::identity(&c);
    let flip = EndofunctorData::from_names(g, &[("*", "s")], &[("*", "s")]).expect("flip data");
    out.push(with_p("z2/flip", flip));
    let c = iso_pair();
    let g = Endofunctor::from_names("swap", &c, &[("A", "B"), ("B", "A")], &[("u", "v"), ("v", "u")]).expect("swap");
    let swap = EndofunctorData::from_names(g, &[("A", "v"), ("B", "u")], &[("A", "u"), ("B", "v")]).expect("swap data");
    out.push(with_p("iso/swap", swap));
    out
}

fn with_p(name: &str, data: EndofunctorData) -> DataInstance {
    let id = EndofunctorData::identity(data.functor.cat());
    let p = data.p_family().expect("p is well typed");
    DataInstance { name: name.to_string(), data, second: Some((id, p)) }
}

/// An endofunctor without canonical maps, with an optional family out of it.
#[derive(Clone, Debug)]
pub struct PlainInstance {
    pub name: String,
    pub functor: Endofunctor,
    pub family: Option<NaturalFamily>,
}

/// Every datum above, plus the identity of the arrow category with the
/// family `Id => shift` into the endofunctor collapsing onto `B`.
pub fn plain_endofunctors() -> Vec<PlainInstance> {
    let mut out: Vec<PlainInstance> = endofunctor_data()
        .into_iter()
        .map(|d| {
            let family = d.data.p_family().expect("p is well typed");
            PlainInstance { name: d.name, functor: d.data.functor, family: Some(family) }
        })
        .collect();
    let c = arrow();
    let id = Endofunctor::identity(&c);
    let shift = Endofunctor::from_names("shift", &c, &[("A", "B"), ("B", "B")], &[("f", "id_B")]).expect("shift");
    let eta = NaturalFamily::from_names(&id, &shift, &[("A", "f"), ("B", "id_B")]).expect("family into the shift");
    out.push(PlainInstance { name: "arrow/shift".into(), functor: id, family: Some(eta) });
    out
}

/// `p = i = e` on the idempotent monoid: natural, but `p ∘ i != id`.
pub fn relaxed_data() -> EndofunctorData {
    let c = idempotent();
    EndofunctorData::from_names(Endofunctor::identity(&c), &[("*", "e")], &[("*", "e")]).expect("natural families")
}

/// Sliced objects over one base, with probes and probe morphisms.
#[derive(Clone, Debug)]
pub struct SlicedFamily {
    pub base: Arc<FinFunctor>,
    pub objects: Vec<SlicedObject>,
    pub probes: Vec<SlicedObject>,
    pub probe_morphisms: Vec<NatTrans>,
}

/// Over `l`: every map into `l` from a functor of set sizes at most one, from
/// `l` itself, and from `l × 2`.
pub fn sliced_family(l: &Arc<FinFunctor>, bound: Bound) -> Result<SlicedFamily, FinCatError> {
    let cat = l.cat();
    let mut totals: Vec<Arc<FinFunctor>> = functors_up_to_iso(cat, 1, bound)?.into_iter().map(Arc::new).collect();
    totals.push(l.clone());
    let mut objects = Vec::new();
    for t in &totals {
        for tau in nat_transformations(t, l, bound)? {
            objects.push(SlicedObject::new(tau)?);
        }
    }
    let (_, proj, _) = product(l, &Arc::new(constant(cat, 2)))?;
    objects.push(SlicedObject::new(proj)?);
    let probes: Vec<SlicedObject> = objects.iter().filter(|o| o.total.sizes().iter().all(|&n| n <= 2)).cloned().collect();
    let mut probe_morphisms = Vec::new();
    for pair in probes.windows(2) {
        for (x, y) in [(&pair[0], &pair[1]), (&pair[1], &pair[0])] {
            if let Some(m) = slice_morphisms(&x.structure, &y.structure, bound)?.into_iter().next() {
                probe_morphisms.push(m);
            }
        }
    }
    Ok(SlicedFamily { base: l.clone(), objects, probes, probe_morphisms })
}

/// One family per base with set sizes at most two.
pub fn sliced_families(cat: &Arc<FinCat>, bound: Bound) -> Result<Vec<SlicedFamily>, FinCatError> {
    functors_up_to_iso(cat, 2, bound)?.into_iter().map(|l| sliced_family(&Arc::new(l), bound)).collect()
}

/// Probe functors of set sizes at most two, and the first transformation
/// between consecutive probes in each direction.
pub fn probes(cat: &Arc<FinCat>, bound: Bound) -> Result<(Vec<Arc<FinFunctor>>, Vec<NatTrans>), FinCatError> {
    let probes: Vec<Arc<FinFunctor>> = functors_up_to_iso(cat, 2, bound)?.into_iter().map(Arc::new).collect();
    let mut morphisms = Vec::new();
    for pair in probes.windows(2) {
        for (x, y) in [(&pair[0], &pair[1]), (&pair[1], &pair[0])] {
            if let Some(m) = nat_transformations(x, y, bound)?.into_iter().next() {
                morphisms.push(m);
            }
        }
    }
    Ok((probes, morphisms))
}
