//! Endofunctors of the index category acting on functors by precomposition,
//! the transformations induced by natural families between them, and the
//! sliced variant cut out by an equalizer.

use std::sync::Arc;

use crate::report::ValidationReport;

use super::category::{FinCat, Mor, Obj};
use super::functor::{FinFunctor, NatTrans};
use super::limits::subfunctor;
use super::slice::SlicedObject;
use super::FinCatError;

/// An endofunctor of a finite category, as object and morphism tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endofunctor {
    name: String,
    cat: Arc<FinCat>,
    objects: Vec<Obj>,
    morphisms: Vec<Mor>,
}

impl Endofunctor {
    pub fn new(name: &str, cat: &Arc<FinCat>, objects: Vec<Obj>, morphisms: Vec<Mor>) -> Result<Endofunctor, FinCatError> {
        if objects.len() != cat.object_count() || morphisms.len() != cat.morphism_count() {
            return Err(FinCatError::Functor(format!("endofunctor `{name}` has the wrong shape")));
        }
        if objects.iter().any(|&o| o >= cat.object_count()) || morphisms.iter().any(|&m| m >= cat.morphism_count()) {
            return Err(FinCatError::Functor(format!("endofunctor `{name}` indexes out of range")));
        }
        for (m, &gm) in morphisms.iter().enumerate() {
            if cat.dom(gm) != objects[cat.dom(m)] || cat.cod(gm) != objects[cat.cod(m)] {
                return Err(FinCatError::Functor(format!(
                    "`{name}` sends `{}` to a morphism of the wrong type",
                    cat.arrow(m).name
                )));
            }
        }
        Ok(Endofunctor { name: name.to_string(), cat: cat.clone(), objects, morphisms })
    }

    /// Builds from name tables; unlisted morphisms must be identities, which
    /// go to the identity of the image object.
    pub fn from_names(
        name: &str,
        cat: &Arc<FinCat>,
        objects: &[(&str, &str)],
        morphisms: &[(&str, &str)],
    ) -> Result<Endofunctor, FinCatError> {
        let mut obj = vec![usize::MAX; cat.object_count()];
        for (a, b) in objects {
            obj[cat.object(a)?] = cat.object(b)?;
        }
        if obj.contains(&usize::MAX) {
            return Err(FinCatError::Functor(format!("endofunctor `{name}` misses an object")));
        }
        let mut mor: Vec<Option<Mor>> = vec![None; cat.morphism_count()];
        for o in 0..cat.object_count() {
            mor[cat.identity(o)] = Some(cat.identity(obj[o]));
        }
        for (a, b) in morphisms {
            mor[cat.morphism(a)?] = Some(cat.morphism(b)?);
        }
        let mor = mor
            .into_iter()
            .enumerate()
            .map(|(m, g)| g.ok_or_else(|| FinCatError::Functor(format!("`{name}` has no image for `{}`", cat.arrow(m).name))))
            .collect::<Result<_, _>>()?;
        Self::new(name, cat, obj, mor)
    }

    pub fn identity(cat: &Arc<FinCat>) -> Endofunctor {
        Endofunctor {
            name: "Id".into(),
            cat: cat.clone(),
            objects: (0..cat.object_count()).collect(),
            morphisms: (0..cat.morphism_count()).collect(),
        }
    }

    /// Everything to `o` and `id_o`.
    pub fn constant(cat: &Arc<FinCat>, o: Obj) -> Endofunctor {
        Endofunctor {
            name: format!("const_{}", cat.objects()[o]),
            cat: cat.clone(),
            objects: vec![o; cat.object_count()],
            morphisms: vec![cat.identity(o); cat.morphism_count()],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cat(&self) -> &Arc<FinCat> {
        &self.cat
    }

    pub fn obj(&self, o: Obj) -> Obj {
        self.objects[o]
    }

    pub fn mor(&self, m: Mor) -> Mor {
        self.morphisms[m]
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Endofunctor) -> Endofunctor {
        Endofunctor {
            name: format!("{}∘{}", self.name, first.name),
            cat: self.cat.clone(),
            objects: first.objects.iter().map(|&o| self.objects[o]).collect(),
            morphisms: first.morphisms.iter().map(|&m| self.morphisms[m]).collect(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        let cat = &self.cat;
        let ids = (0..cat.object_count())
            .find(|&o| self.morphisms[cat.identity(o)] != cat.identity(self.objects[o]))
            .map(|o| format!("{} does not preserve id_{}", self.name, cat.objects()[o]));
        r.record("endofunctor_identity", ids);
        let mut comp = None;
        'outer: for f in 0..cat.morphism_count() {
            for &g in cat.out_of(cat.cod(f)) {
                if cat.compose(self.morphisms[g], self.morphisms[f]) != Some(self.morphisms[cat.comp(g, f)]) {
                    comp = Some(format!(
                        "{}({} ∘ {}) differs from the composite of the images",
                        self.name,
                        cat.arrow(g).name,
                        cat.arrow(f).name
                    ));
                    break 'outer;
                }
            }
        }
        r.record("endofunctor_composition", comp);
        r
    }
}

/// A family `η_V: G1(V) -> G2(V)` of morphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalFamily {
    pub source: Endofunctor,
    pub target: Endofunctor,
    pub components: Vec<Mor>,
}

impl NaturalFamily {
    pub fn new(source: &Endofunctor, target: &Endofunctor, components: Vec<Mor>) -> Result<NaturalFamily, FinCatError> {
        let cat = source.cat();
        if components.len() != cat.object_count() {
            return Err(FinCatError::Functor("one component per object required".into()));
        }
        for (v, &c) in components.iter().enumerate() {
            if c >= cat.morphism_count() || cat.dom(c) != source.obj(v) || cat.cod(c) != target.obj(v) {
                return Err(FinCatError::Functor(format!("component at `{}` has the wrong type", cat.objects()[v])));
            }
        }
        Ok(NaturalFamily { source: source.clone(), target: target.clone(), components })
    }

    pub fn from_names(source: &Endofunctor, target: &Endofunctor, components: &[(&str, &str)]) -> Result<NaturalFamily, FinCatError> {
        let cat = source.cat();
        let mut comps = vec![usize::MAX; cat.object_count()];
        for (o, m) in components {
            comps[cat.object(o)?] = cat.morphism(m)?;
        }
        Self::new(source, target, comps)
    }

    pub fn identity(g: &Endofunctor) -> NaturalFamily {
        let cat = g.cat();
        let components = (0..cat.object_count()).map(|v| cat.identity(g.obj(v))).collect();
        NaturalFamily { source: g.clone(), target: g.clone(), components }
    }

    /// Vertical composite `self ∘ first`.
    pub fn after(&self, first: &NaturalFamily) -> Result<NaturalFamily, FinCatError> {
        if first.target != self.source {
            return Err(FinCatError::Functor("families are not composable".into()));
        }
        let cat = self.source.cat();
        let components = first.components.iter().zip(&self.components).map(|(&f, &g)| cat.comp(g, f)).collect();
        Ok(NaturalFamily { source: first.source.clone(), target: self.target.clone(), components })
    }

    pub fn naturality_witness(&self) -> Option<String> {
        let cat = self.source.cat();
        for m in 0..cat.morphism_count() {
            let (d, c) = (cat.dom(m), cat.cod(m));
            let left = cat.compose(self.target.mor(m), self.components[d]);
            let right = cat.compose(self.components[c], self.source.mor(m));
            if left != right {
                return Some(format!("family is not natural along `{}`", cat.arrow(m).name));
            }
        }
        None
    }
}

/// `G` with `p: G => Id` and `i: Id => G`, `p ∘ i = id`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndofunctorData {
    pub functor: Endofunctor,
    pub p: Vec<Mor>,
    pub i: Vec<Mor>,
}

impl EndofunctorData {
    pub fn new(functor: Endofunctor, p: Vec<Mor>, i: Vec<Mor>) -> Result<EndofunctorData, FinCatError> {
        let data = EndofunctorData { functor, p, i };
        data.p_family()?;
        data.i_family()?;
        Ok(data)
    }

    pub fn from_names(functor: Endofunctor, p: &[(&str, &str)], i: &[(&str, &str)]) -> Result<EndofunctorData, FinCatError> {
        let id = Endofunctor::identity(functor.cat());
        let pf = NaturalFamily::from_names(&functor, &id, p)?;
        let if_ = NaturalFamily::from_names(&id, &functor, i)?;
        Ok(EndofunctorData { functor, p: pf.components, i: if_.components })
    }

    pub fn identity(cat: &Arc<FinCat>) -> EndofunctorData {
        let ids: Vec<Mor> = (0..cat.object_count()).map(|o| cat.identity(o)).collect();
        EndofunctorData { functor: Endofunctor::identity(cat), p: ids.clone(), i: ids }
    }

    pub fn name(&self) -> &str {
        self.functor.name()
    }

    pub fn p_family(&self) -> Result<NaturalFamily, FinCatError> {
        NaturalFamily::new(&self.functor, &Endofunctor::identity(self.functor.cat()), self.p.clone())
    }

    pub fn i_family(&self) -> Result<NaturalFamily, FinCatError> {
        NaturalFamily::new(&Endofunctor::identity(self.functor.cat()), &self.functor, self.i.clone())
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = self.functor.validate();
        let p = self.p_family().map(|f| f.naturality_witness()).unwrap_or_else(|e| Some(e.to_string()));
        r.record("p_natural", p);
        let i = self.i_family().map(|f| f.naturality_witness()).unwrap_or_else(|e| Some(e.to_string()));
        r.record("i_natural", i);
        let cat = self.functor.cat();
        let retract = (0..cat.object_count())
            .find(|&v| cat.compose(self.p[v], self.i[v]) != Some(cat.identity(v)))
            .map(|v| format!("p ∘ i != id at `{}`", cat.objects()[v]));
        r.record("retract", retract);
        r
    }
}

/// `M ∘ G`.
pub fn precompose(g: &Endofunctor, m: &FinFunctor) -> Result<FinFunctor, FinCatError> {
    if g.cat() != m.cat() {
        return Err(FinCatError::CategoryMismatch);
    }
    let cat = g.cat();
    let labels = (0..cat.object_count()).map(|v| m.labels(g.obj(v)).to_vec()).collect();
    let maps = (0..cat.morphism_count()).map(|f| m.map(g.mor(f)).to_vec()).collect();
    FinFunctor::new(cat, labels, maps)
}

/// `f G: M ∘ G => N ∘ G`.
pub fn precompose_nat(g: &Endofunctor, f: &NatTrans, source: &Arc<FinFunctor>, target: &Arc<FinFunctor>) -> Result<NatTrans, FinCatError> {
    let comps = (0..g.cat().object_count()).map(|v| f.component(g.obj(v)).to_vec()).collect();
    NatTrans::new(source, target, comps)
}

/// `M η: M ∘ G1 => M ∘ G2`, components `M(η_V)`.
pub fn alpha_of(eta: &NaturalFamily, m: &FinFunctor) -> Result<NatTrans, FinCatError> {
    let source = Arc::new(precompose(&eta.source, m)?);
    let target = Arc::new(precompose(&eta.target, m)?);
    let comps = eta.components.iter().map(|&c| m.map(c).to_vec()).collect();
    NatTrans::natural(&source, &target, comps)
}

/// The sliced construction on `τ: A => L`: the subfunctor of `A ∘ G` on
/// which `τ_G` agrees with `L(i) ∘ L(p) ∘ τ_G`, sliced by `L(p) ∘ τ_G`.
/// Also returns its inclusion into `A ∘ G`.
pub fn sliced_t_with_inclusion(data: &EndofunctorData, a: &SlicedObject) -> Result<(SlicedObject, NatTrans), FinCatError> {
    let g = &data.functor;
    let l = a.base();
    let shifted = Arc::new(precompose(g, &a.total)?);
    let over = |v: Obj, x: usize| a.structure.apply(g.obj(v), x);
    let (sub, incl) = subfunctor(&shifted, |v, x| {
        let t = over(v, x);
        l.apply(data.i[v], l.apply(data.p[v], t)) == t
    })?;
    let comps = (0..g.cat().object_count())
        .map(|v| incl.component(v).iter().map(|&x| l.apply(data.p[v], over(v, x))).collect())
        .collect();
    let structure = NatTrans::new(&sub, l, comps)?;
    Ok((SlicedObject::new(structure)?, incl))
}

pub fn sliced_t(data: &EndofunctorData, a: &SlicedObject) -> Result<SlicedObject, FinCatError> {
    Ok(sliced_t_with_inclusion(data, a)?.0)
}

/// The sliced construction on a slice morphism `f: A => B`: the restriction
/// of `f G` to the two subfunctors.
pub fn sliced_t_map(data: &EndofunctorData, a: &SlicedObject, b: &SlicedObject, f: &NatTrans) -> Result<NatTrans, FinCatError> {
    let (ta, ia) = sliced_t_with_inclusion(data, a)?;
    let (tb, ib) = sliced_t_with_inclusion(data, b)?;
    let g = &data.functor;
    let comps = (0..g.cat().object_count())
        .map(|v| {
            ia.component(v)
                .iter()
                .map(|&x| {
                    let y = f.apply(g.obj(v), x);
                    ib.component(v).iter().position(|&z| z == y).ok_or_else(|| {
                        FinCatError::Functor(format!("image leaves the sliced subfunctor at `{}`", g.cat().objects()[v]))
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    NatTrans::natural(&ta.total, &tb.total, comps)
}

/// Sliced counterpart of [`alpha_of`] for `η: G1 => G2` compatible with the
/// canonical maps (`p2 ∘ η = p1`, `η ∘ i1 = i2`): `x ↦ A(η_V)(x)`.
pub fn sliced_alpha(
    eta: &NaturalFamily,
    first: &EndofunctorData,
    second: &EndofunctorData,
    a: &SlicedObject,
) -> Result<NatTrans, FinCatError> {
    let cat = first.functor.cat();
    if eta.source != first.functor || eta.target != second.functor {
        return Err(FinCatError::Functor("family does not connect the two endofunctors".into()));
    }
    for v in 0..cat.object_count() {
        if cat.compose(second.p[v], eta.components[v]) != Some(first.p[v])
            || cat.compose(eta.components[v], first.i[v]) != Some(second.i[v])
        {
            return Err(FinCatError::Functor(format!(
                "family is not compatible with the canonical maps at `{}`",
                cat.objects()[v]
            )));
        }
    }
    let (t1, i1) = sliced_t_with_inclusion(first, a)?;
    let (t2, i2) = sliced_t_with_inclusion(second, a)?;
    let comps = (0..cat.object_count())
        .map(|v| {
            i1.component(v)
                .iter()
                .map(|&x| {
                    let y = a.total.apply(eta.components[v], x);
                    i2.component(v)
                        .iter()
                        .position(|&z| z == y)
                        .ok_or_else(|| FinCatError::Functor("sliced α leaves the subfunctor".into()))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let t = NatTrans::natural(&t1.total, &t2.total, comps)?;
    for v in 0..cat.object_count() {
        for x in 0..t1.total.size(v) {
            if t2.structure.apply(v, t.apply(v, x)) != t1.structure.apply(v, x) {
                return Err(FinCatError::Functor("sliced α does not respect the structure maps".into()));
            }
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iso() -> Arc<FinCat> {
        Arc::new(
            FinCat::build(
                "iso",
                &["A", "B"],
                &[("u", "A", "B"), ("v", "B", "A")],
                &[("v", "u", "id_A"), ("u", "v", "id_B")],
            )
            .unwrap(),
        )
    }

    #[test]
    fn swap_data_is_lawful() {
        let c = iso();
        let g = Endofunctor::from_names("swap", &c, &[("A", "B"), ("B", "A")], &[("u", "v"), ("v", "u")]).unwrap();
        let data = EndofunctorData::from_names(g, &[("A", "v"), ("B", "u")], &[("A", "u"), ("B", "v")]).unwrap();
        assert!(data.validate().all_passed(), "{}", data.validate());
        assert!(EndofunctorData::identity(&c).validate().all_passed());
    }

    #[test]
    fn precompose_identity_and_constant() {
        let c = iso();
        let m = FinFunctor::from_generators(&c, &[2, 2], &[("u", vec![1, 0]), ("v", vec![1, 0])]).unwrap();
        assert_eq!(precompose(&Endofunctor::identity(&c), &m).unwrap(), m);
        let k = precompose(&Endofunctor::constant(&c, 1), &m).unwrap();
        assert_eq!(k.sizes(), vec![2, 2]);
        assert!(k.maps().iter().all(|t| t == &vec![0, 1]));
    }

    #[test]
    fn alpha_identity_and_composition() {
        let c = iso();
        let m = FinFunctor::from_generators(&c, &[2, 2], &[("u", vec![1, 0]), ("v", vec![1, 0])]).unwrap();
        let id = Endofunctor::identity(&c);
        let one = NaturalFamily::identity(&id);
        let a = alpha_of(&one, &m).unwrap();
        assert_eq!(a, NatTrans::identity(a.source()));
        let g = Endofunctor::from_names("swap", &c, &[("A", "B"), ("B", "A")], &[("u", "v"), ("v", "u")]).unwrap();
        let eta = NaturalFamily::from_names(&id, &g, &[("A", "u"), ("B", "v")]).unwrap();
        let back = NaturalFamily::from_names(&g, &id, &[("A", "v"), ("B", "u")]).unwrap();
        assert!(eta.naturality_witness().is_none() && back.naturality_witness().is_none());
        let composite = alpha_of(&back.after(&eta).unwrap(), &m).unwrap();
        let stepwise = alpha_of(&back, &m).unwrap().after(&alpha_of(&eta, &m).unwrap()).unwrap();
        assert_eq!(composite, stepwise);
    }
}
