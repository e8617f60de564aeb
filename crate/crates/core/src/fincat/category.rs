use std::collections::HashMap;
use std::fmt;

use crate::report::ValidationReport;

use super::FinCatError;

pub type Obj = usize;
pub type Mor = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub dom: Obj,
    pub cod: Obj,
}

/// A small category given by its full composition table.
///
/// `comp[g * n + f]` holds `g ∘ f` when `cod f = dom g`. Nothing about the
/// table is assumed lawful; [`FinCat::validate`] checks it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCat {
    name: String,
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    identity: Vec<Mor>,
    comp: Vec<Option<Mor>>,
    out: Vec<Vec<Mor>>,
}

impl FinCat {
    /// Builds a category from its non-identity arrows and their composites.
    /// Identities `id_X` are added and composed automatically.
    pub fn build(
        name: &str,
        objects: &[&str],
        arrows: &[(&str, &str, &str)],
        composites: &[(&str, &str, &str)],
    ) -> Result<FinCat, FinCatError> {
        let objects: Vec<String> = objects.iter().map(|s| s.to_string()).collect();
        let obj = |s: &str| {
            objects.iter().position(|o| o == s).ok_or_else(|| FinCatError::UnknownObject(s.to_string()))
        };
        let mut all = Vec::new();
        let mut identity = Vec::new();
        for (k, o) in objects.iter().enumerate() {
            identity.push(all.len());
            all.push(Arrow { name: format!("id_{o}"), dom: k, cod: k });
        }
        for (n, d, c) in arrows {
            all.push(Arrow { name: n.to_string(), dom: obj(d)?, cod: obj(c)? });
        }
        let mut entries = Vec::new();
        for (g, f, h) in composites {
            entries.push((g.to_string(), f.to_string(), h.to_string()));
        }
        let mut cat = FinCat::from_table(name, objects.clone(), all, identity, Vec::new())?;
        for m in 0..cat.arrows.len() {
            let a = &cat.arrows[m];
            let (d, c) = (a.dom, a.cod);
            cat.set_comp(m, cat.identity[d], m);
            cat.set_comp(cat.identity[c], m, m);
        }
        for (g, f, h) in entries {
            let (g, f, h) = (cat.morphism(&g)?, cat.morphism(&f)?, cat.morphism(&h)?);
            cat.set_comp(g, f, h);
        }
        Ok(cat)
    }

    /// Assembles a category from raw parts; only index ranges are checked.
    pub fn from_table(
        name: &str,
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        identity: Vec<Mor>,
        composites: Vec<(Mor, Mor, Mor)>,
    ) -> Result<FinCat, FinCatError> {
        let n = arrows.len();
        if identity.len() != objects.len() {
            return Err(FinCatError::Category("one identity per object required".into()));
        }
        if arrows.iter().any(|a| a.dom >= objects.len() || a.cod >= objects.len())
            || identity.iter().any(|&i| i >= n)
        {
            return Err(FinCatError::Category("index out of range".into()));
        }
        let mut out = vec![Vec::new(); objects.len()];
        for (m, a) in arrows.iter().enumerate() {
            out[a.dom].push(m);
        }
        let mut cat = FinCat { name: name.to_string(), objects, arrows, identity, comp: vec![None; n * n], out };
        for (g, f, h) in composites {
            if g >= n || f >= n || h >= n {
                return Err(FinCatError::Category("composite index out of range".into()));
            }
            cat.set_comp(g, f, h);
        }
        Ok(cat)
    }

    fn set_comp(&mut self, g: Mor, f: Mor, h: Mor) {
        let n = self.arrows.len();
        self.comp[g * n + f] = Some(h);
    }

    /// Copy with one composite replaced (for planted-defect tests).
    pub fn with_composite(&self, g: Mor, f: Mor, h: Mor) -> FinCat {
        let mut c = self.clone();
        c.set_comp(g, f, h);
        c
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, m: Mor) -> &Arrow {
        &self.arrows[m]
    }

    pub fn morphism_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn dom(&self, m: Mor) -> Obj {
        self.arrows[m].dom
    }

    pub fn cod(&self, m: Mor) -> Obj {
        self.arrows[m].cod
    }

    pub fn identity(&self, o: Obj) -> Mor {
        self.identity[o]
    }

    pub fn is_identity(&self, m: Mor) -> bool {
        self.identity[self.arrows[m].dom] == m
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: Mor, f: Mor) -> Option<Mor> {
        self.comp[g * self.arrows.len() + f]
    }

    /// `g ∘ f`, panicking when the table has no entry for a composable pair.
    pub fn comp(&self, g: Mor, f: Mor) -> Mor {
        self.compose(g, f).unwrap_or_else(|| {
            panic!("no composite {} ∘ {} in `{}`", self.arrows[g].name, self.arrows[f].name, self.name)
        })
    }

    /// Morphisms with domain `o`, in index order.
    pub fn out_of(&self, o: Obj) -> &[Mor] {
        &self.out[o]
    }

    pub fn hom(&self, a: Obj, b: Obj) -> impl Iterator<Item = Mor> + '_ {
        self.out[a].iter().copied().filter(move |&m| self.arrows[m].cod == b)
    }

    pub fn object(&self, name: &str) -> Result<Obj, FinCatError> {
        self.objects.iter().position(|o| o == name).ok_or_else(|| FinCatError::UnknownObject(name.into()))
    }

    pub fn morphism(&self, name: &str) -> Result<Mor, FinCatError> {
        self.arrows.iter().position(|a| a.name == name).ok_or_else(|| FinCatError::UnknownMorphism(name.into()))
    }

    pub fn morphism_names(&self) -> HashMap<&str, Mor> {
        self.arrows.iter().enumerate().map(|(i, a)| (a.name.as_str(), i)).collect()
    }

    fn label(&self, m: Mor) -> &str {
        &self.arrows[m].name
    }

    /// Exhaustive check of composition totality, typing, identities and
    /// associativity.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let n = self.arrows.len();

        let mut witness = None;
        'typing: for g in 0..n {
            for f in 0..n {
                let composable = self.cod(f) == self.dom(g);
                match (composable, self.compose(g, f)) {
                    (true, None) => {
                        witness = Some(format!("{} ∘ {} undefined", self.label(g), self.label(f)));
                        break 'typing;
                    }
                    (false, Some(_)) => {
                        witness = Some(format!("{} ∘ {} defined for non-composable pair", self.label(g), self.label(f)));
                        break 'typing;
                    }
                    (true, Some(h)) if self.dom(h) != self.dom(f) || self.cod(h) != self.cod(g) => {
                        witness = Some(format!(
                            "{} ∘ {} = {} has the wrong type",
                            self.label(g),
                            self.label(f),
                            self.label(h)
                        ));
                        break 'typing;
                    }
                    _ => {}
                }
            }
        }
        let typed = witness.is_none();
        report.record("composition_typing", witness);

        let mut witness = None;
        for (o, &id) in self.identity.iter().enumerate() {
            if self.dom(id) != o || self.cod(id) != o {
                witness = Some(format!("identity of {} is not an endomorphism", self.objects[o]));
                break;
            }
        }
        if witness.is_none() {
            'ids: for f in 0..n {
                let left = self.compose(self.identity[self.cod(f)], f);
                let right = self.compose(f, self.identity[self.dom(f)]);
                if left != Some(f) || right != Some(f) {
                    witness = Some(format!("identity law fails at {}", self.label(f)));
                    break 'ids;
                }
            }
        }
        report.record("identity", witness);

        let mut witness = None;
        if typed {
            'assoc: for h in 0..n {
                for g in self.out_of(self.cod(h)).to_vec() {
                    for &f in self.out_of(self.cod(g)) {
                        let left = self.compose(f, self.comp(g, h));
                        let right = self.compose(self.comp(f, g), h);
                        if left != right {
                            witness = Some(format!(
                                "({} ∘ {}) ∘ {} != {} ∘ ({} ∘ {})",
                                self.label(f),
                                self.label(g),
                                self.label(h),
                                self.label(f),
                                self.label(g),
                                self.label(h)
                            ));
                            break 'assoc;
                        }
                    }
                }
            }
        } else {
            witness = Some("skipped: composition table is not well typed".into());
        }
        report.record("associativity", witness);
        report
    }
}

impl fmt::Display for FinCat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} objects, {} morphisms)", self.name, self.objects.len(), self.arrows.len())
    }
}
