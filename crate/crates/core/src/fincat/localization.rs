//! Iterated slices `(K/L)/(A -> L)` identified with `K/total(A)`, and the
//! checks that the sliced constructions commute with that identification.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::report::ValidationReport;

use super::endo::{sliced_alpha, sliced_t_map, sliced_t_with_inclusion, EndofunctorData, NaturalFamily};
use super::enumerate::{slice_morphisms, Bound};
use super::functor::{FinFunctor, NatTrans};
use super::limits::{equalizer, fibered_product, product};
use super::slice::SlicedObject;
use super::FinCatError;

/// An object of the slice over `A` inside the slice over `L`: `X` over `L`
/// with a slice morphism `f: X -> A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IteratedObject {
    pub object: SlicedObject,
    pub over: NatTrans,
}

impl IteratedObject {
    /// Fails unless `over` is natural and `τ_A ∘ over = τ_X`.
    pub fn new(a: &SlicedObject, object: SlicedObject, over: NatTrans) -> Result<IteratedObject, FinCatError> {
        if over.source() != &object.total || over.target() != &a.total {
            return Err(FinCatError::Functor("morphism does not run from the object to the base".into()));
        }
        if let Some(w) = over.naturality_witness() {
            return Err(FinCatError::NonNatural(w));
        }
        let cat = a.total.cat();
        for v in 0..cat.object_count() {
            for x in 0..object.total.size(v) {
                if a.structure.apply(v, over.apply(v, x)) != object.structure.apply(v, x) {
                    return Err(FinCatError::Functor(format!(
                        "structure maps disagree at `{}` on {}",
                        cat.objects()[v],
                        object.total.label(v, x)
                    )));
                }
            }
        }
        Ok(IteratedObject { object, over })
    }

    /// `A -> A` itself.
    pub fn identity(a: &SlicedObject) -> IteratedObject {
        IteratedObject { object: a.clone(), over: NatTrans::identity(&a.total) }
    }
}

/// The identification `(K/L)/(A -> L) ≅ K/total(A)`.
#[derive(Clone, Debug)]
pub struct FlattenedSlice {
    pub base: SlicedObject,
}

pub fn flatten_slice(a: &SlicedObject) -> FlattenedSlice {
    FlattenedSlice { base: a.clone() }
}

impl FlattenedSlice {
    /// `(X, τ_X, f) ↦ (X, f)`.
    pub fn flatten(&self, x: &IteratedObject) -> SlicedObject {
        SlicedObject { total: x.object.total.clone(), structure: x.over.clone() }
    }

    /// `(X, f) ↦ (X, τ_A ∘ f, f)`.
    pub fn unflatten(&self, y: &SlicedObject) -> Result<IteratedObject, FinCatError> {
        let structure = self.base.structure.after(&y.structure)?;
        IteratedObject::new(&self.base, SlicedObject::new(structure)?, y.structure.clone())
    }

    /// Hom-set of the iterated slice: slice morphisms over `L` commuting with
    /// the maps to `A`.
    pub fn iterated_morphisms(&self, x: &IteratedObject, y: &IteratedObject, bound: Bound) -> Result<Vec<NatTrans>, FinCatError> {
        let mut out = slice_morphisms(&x.object.structure, &y.object.structure, bound)?;
        out.retain(|h| y.over.after(h).is_ok_and(|c| c == x.over));
        Ok(out)
    }

    /// Objects round-trip exactly and the two hom-sets coincide.
    pub fn check(&self, objects: &[IteratedObject], bound: Bound) -> Result<ValidationReport, FinCatError> {
        let mut r = ValidationReport::new();
        let mut objects_witness = None;
        for x in objects {
            let back = self.unflatten(&self.flatten(x))?;
            if back != *x {
                objects_witness.get_or_insert_with(|| format!("{} does not round-trip", x.object.total));
            }
        }
        r.record("fact1_objects", objects_witness);
        let mut hom_witness = None;
        for x in objects {
            for y in objects {
                let iterated: BTreeSet<Vec<usize>> = self.iterated_morphisms(x, y, bound)?.iter().map(NatTrans::flat).collect();
                let flat: BTreeSet<Vec<usize>> =
                    slice_morphisms(&self.flatten(x).structure, &self.flatten(y).structure, bound)?.iter().map(NatTrans::flat).collect();
                if iterated != flat {
                    hom_witness.get_or_insert_with(|| {
                        format!("hom-sets differ: {} iterated vs {} flattened morphisms", iterated.len(), flat.len())
                    });
                }
            }
        }
        r.record("fact1_morphisms", hom_witness);
        Ok(r)
    }
}

/// The sliced construction inside the iterated slice: the equalizer of
/// `T(f)` and `α_i ∘ α_p ∘ T(f)` on `T(X)`, reported as the elements of
/// `X(GV)` it keeps and their images in `A`.
fn iterated_sliced_t(
    data: &EndofunctorData,
    a: &SlicedObject,
    x: &IteratedObject,
) -> Result<(Vec<Vec<usize>>, Vec<Vec<usize>>, Arc<FinFunctor>), FinCatError> {
    let cat = a.total.cat();
    let plain = EndofunctorData::identity(cat);
    let p = data.p_family()?;
    let i = data.i_family()?;
    let alpha_p = sliced_alpha(&p, data, &plain, a)?;
    let alpha_i = sliced_alpha(&i, &plain, data, a)?;
    let tf = sliced_t_map(data, &x.object, a, &x.over)?;
    let round = alpha_i.after(&alpha_p.after(&tf)?)?;
    let (eq, incl) = equalizer(&tf, &round)?;
    let (_, tx_incl) = sliced_t_with_inclusion(data, &x.object)?;
    let to_a = alpha_p.after(&tf)?.after(&incl)?;
    let members = (0..cat.object_count()).map(|v| incl.component(v).iter().map(|&k| tx_incl.apply(v, k)).collect()).collect();
    Ok((members, to_a.components().to_vec(), eq))
}

fn direct_sliced_t(
    data: &EndofunctorData,
    flat: &SlicedObject,
) -> Result<(Vec<Vec<usize>>, Vec<Vec<usize>>, Arc<FinFunctor>), FinCatError> {
    let (t, incl) = sliced_t_with_inclusion(data, flat)?;
    Ok((incl.components().to_vec(), t.structure.components().to_vec(), t.total))
}

/// Fact 4: `A ×_L (L × R) -> total(A) × R`, `(a, (ℓ, r)) ↦ (a, r)`, with
/// the fibered product's projections.
fn fact4_iso(a: &SlicedObject, r: &Arc<FinFunctor>) -> Result<(NatTrans, NatTrans, NatTrans), FinCatError> {
    let (_, l_proj, _) = product(a.base(), r)?;
    let (pb, pi1, pi2) = fibered_product(&a.structure, &l_proj)?;
    let (flat, _, _) = product(&a.total, r)?;
    let cat = a.total.cat();
    let comps = (0..cat.object_count())
        .map(|v| {
            let rs = r.size(v);
            (0..pb.size(v)).map(|k| pi1.apply(v, k) * rs + pi2.apply(v, k) % rs).collect()
        })
        .collect();
    Ok((NatTrans::natural(&pb, &flat, comps)?, pi1, pi2))
}

fn is_bijection(t: &NatTrans) -> bool {
    (0..t.source().cat().object_count()).all(|v| {
        let mut c = t.component(v).to_vec();
        c.sort_unstable();
        c.dedup();
        c.len() == t.source().size(v) && c.len() == t.target().size(v)
    })
}

/// Facts 1 to 4 for `A` over `L`, the iterated objects `objects` over `A`,
/// the extra functor `r`, and optionally a second datum with a connecting
/// family for the sliced α.
pub fn localization_check(
    data: &EndofunctorData,
    a: &SlicedObject,
    r: &Arc<FinFunctor>,
    objects: &[IteratedObject],
    second: Option<(&EndofunctorData, &NaturalFamily)>,
    bound: Bound,
) -> Result<ValidationReport, FinCatError> {
    let flat = flatten_slice(a);
    let mut objects = objects.to_vec();
    if objects.is_empty() {
        objects.push(IteratedObject::identity(a));
    }
    let mut report = flat.check(&objects, bound)?;

    let mut fact2 = None;
    for x in &objects {
        let (im, is, it) = iterated_sliced_t(data, a, x)?;
        let (dm, ds, dt) = direct_sliced_t(data, &flat.flatten(x))?;
        if im != dm || is != ds || !it.same_tables(&dt) {
            fact2.get_or_insert_with(|| format!("sliced constructions differ on {}", x.object.total));
        }
    }
    report.record("fact2", fact2);

    let identity_family = NaturalFamily::identity(&data.functor);
    let (data2, eta) = second.unwrap_or((data, &identity_family));
    let mut fact3 = None;
    for x in &objects {
        let over_l = sliced_alpha(eta, data, data2, &x.object)?;
        let (_, in1) = sliced_t_with_inclusion(data, &x.object)?;
        let (_, in2) = sliced_t_with_inclusion(data2, &x.object)?;
        let (m1, _, _) = iterated_sliced_t(data, a, x)?;
        let (m2, _, _) = iterated_sliced_t(data2, a, x)?;
        let flattened = flat.flatten(x);
        let direct = sliced_alpha(eta, data, data2, &flattened)?;
        let (_, d1) = sliced_t_with_inclusion(data, &flattened)?;
        let (_, d2) = sliced_t_with_inclusion(data2, &flattened)?;
        for v in 0..a.total.cat().object_count() {
            for (k, &orig) in m1[v].iter().enumerate() {
                let pos = in1.component(v).iter().position(|&t| t == orig).expect("member of the sliced subfunctor");
                let iterated = in2.apply(v, over_l.apply(v, pos));
                let direct_value = d2.apply(v, direct.apply(v, k));
                if d1.apply(v, k) != orig || iterated != direct_value || !m2[v].contains(&iterated) {
                    fact3.get_or_insert_with(|| format!("sliced α differs at `{}` on {}", a.total.cat().objects()[v], x.object.total));
                }
            }
        }
    }
    report.record("fact3", fact3);

    let (iso, _, _) = fact4_iso(a, r)?;
    report.record("fact4", (!is_bijection(&iso)).then(|| "A ×_L (L × R) -> total(A) × R is not bijective".to_string()));

    let mut natural = None;
    for x in &objects {
        let (iso_x, x1, x2) = fact4_iso(&x.object, r)?;
        let (_, a1, a2) = fact4_iso(a, r)?;
        let cat = a.total.cat();
        for v in 0..cat.object_count() {
            let rs = r.size(v);
            for k in 0..iso_x.source().size(v) {
                let (xe, lr) = (x1.apply(v, k), x2.apply(v, k));
                let moved = (0..a1.source().size(v)).find(|&j| a1.apply(v, j) == x.over.apply(v, xe) && a2.apply(v, j) == lr);
                let down = iso_x.apply(v, k);
                let right = x.over.apply(v, down / rs) * rs + down % rs;
                if moved.map(|j| iso.apply(v, j)) != Some(right) {
                    natural.get_or_insert_with(|| format!("fact 4 is not natural along the map from {}", x.object.total));
                }
            }
        }
    }
    report.record("fact4_natural", natural);
    Ok(report)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::bundled::{constant, endofunctor_data, iso_pair, terminal_category};
    use crate::fincat::{nat_transformations, terminal};

    fn bound() -> Bound {
        Bound(1_000_000)
    }

    #[test]
    fn identity_data_over_terminal() {
        let c = terminal_category();
        let m = Arc::new(constant(&c, 2));
        let a = SlicedObject::over_terminal(&m);
        let r = localization_check(&EndofunctorData::identity(&c), &a, &Arc::new(constant(&c, 3)), &[], None, bound()).unwrap();
        assert!(r.all_passed(), "{r}");
    }

    #[test]
    fn wrong_structure_map_is_rejected() {
        let c = terminal_category();
        let l = Arc::new(constant(&c, 2));
        let a = SlicedObject::new(NatTrans::new(&l, &l, vec![vec![0, 1]]).unwrap()).unwrap();
        let x = SlicedObject::new(NatTrans::new(&l, &l, vec![vec![1, 0]]).unwrap()).unwrap();
        let f = NatTrans::identity(&l);
        assert!(IteratedObject::new(&a, x, f.clone()).is_err());
        let good = SlicedObject::new(f.clone()).unwrap();
        let it = IteratedObject::new(&a, good, f).unwrap();
        let flat = flatten_slice(&a);
        assert_eq!(flat.unflatten(&flat.flatten(&it)).unwrap(), it);
    }

    #[test]
    fn swap_on_two_objects() {
        let d = endofunctor_data().into_iter().find(|d| d.name == "iso/swap").unwrap();
        let c = iso_pair();
        let l = Arc::new(FinFunctor::from_generators(&c, &[2, 2], &[("u", vec![1, 0]), ("v", vec![1, 0])]).unwrap());
        let m = Arc::new(FinFunctor::from_generators(&c, &[3, 3], &[("u", vec![1, 0, 2]), ("v", vec![1, 0, 2])]).unwrap());
        let taus = nat_transformations(&m, &l, bound()).unwrap();
        assert!(!taus.is_empty());
        let a = SlicedObject::new(taus[0].clone()).unwrap();
        let objects: Vec<IteratedObject> = crate::fincat::slice_morphisms(&a.structure, &a.structure, bound())
            .unwrap()
            .into_iter()
            .map(|f| IteratedObject::new(&a, a.clone(), f).unwrap())
            .collect();
        let (second, eta) = d.second.as_ref().unwrap();
        let r = localization_check(&d.data, &a, &Arc::new(terminal(&c)), &objects, Some((second, eta)), bound()).unwrap();
        assert!(r.all_passed(), "{r}");
    }
}
