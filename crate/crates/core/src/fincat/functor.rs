use std::fmt;
use std::sync::Arc;

use crate::report::ValidationReport;

use super::category::{FinCat, Mor, Obj};
use super::FinCatError;

/// Set-valued functor: a labelled finite set per object and a function table
/// per morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinFunctor {
    cat: Arc<FinCat>,
    labels: Vec<Vec<String>>,
    maps: Vec<Vec<usize>>,
}

impl FinFunctor {
    /// Shape-checked constructor; functoriality is left to [`FinFunctor::validate`].
    pub fn new(cat: &Arc<FinCat>, labels: Vec<Vec<String>>, maps: Vec<Vec<usize>>) -> Result<FinFunctor, FinCatError> {
        if labels.len() != cat.object_count() || maps.len() != cat.morphism_count() {
            return Err(FinCatError::Functor("wrong number of sets or maps".into()));
        }
        for (m, table) in maps.iter().enumerate() {
            let a = cat.arrow(m);
            if table.len() != labels[a.dom].len() || table.iter().any(|&y| y >= labels[a.cod].len()) {
                return Err(FinCatError::Functor(format!("map for `{}` has the wrong shape", a.name)));
            }
        }
        Ok(FinFunctor { cat: cat.clone(), labels, maps })
    }

    /// Functor with anonymous elements `0, 1, ...`.
    pub fn from_tables(cat: &Arc<FinCat>, sizes: &[usize], maps: Vec<Vec<usize>>) -> Result<FinFunctor, FinCatError> {
        let labels = sizes.iter().map(|&n| (0..n).map(|i| i.to_string()).collect()).collect();
        Self::new(cat, labels, maps)
    }

    /// Functor built from sizes and the tables of non-identity morphisms;
    /// identities get identity tables.
    pub fn from_generators(
        cat: &Arc<FinCat>,
        sizes: &[usize],
        tables: &[(&str, Vec<usize>)],
    ) -> Result<FinFunctor, FinCatError> {
        let mut maps: Vec<Option<Vec<usize>>> = vec![None; cat.morphism_count()];
        for o in 0..cat.object_count() {
            maps[cat.identity(o)] = Some((0..sizes[o]).collect());
        }
        for (name, table) in tables {
            maps[cat.morphism(name)?] = Some(table.clone());
        }
        let maps = maps
            .into_iter()
            .enumerate()
            .map(|(m, t)| t.ok_or_else(|| FinCatError::Functor(format!("no table for `{}`", cat.arrow(m).name))))
            .collect::<Result<_, _>>()?;
        Self::from_tables(cat, sizes, maps)
    }

    pub fn cat(&self) -> &Arc<FinCat> {
        &self.cat
    }

    pub fn size(&self, o: Obj) -> usize {
        self.labels[o].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn labels(&self, o: Obj) -> &[String] {
        &self.labels[o]
    }

    pub fn label(&self, o: Obj, x: usize) -> &str {
        &self.labels[o][x]
    }

    pub fn map(&self, m: Mor) -> &[usize] {
        &self.maps[m]
    }

    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    pub fn apply(&self, m: Mor, x: usize) -> usize {
        self.maps[m][x]
    }

    pub fn element(&self, o: Obj, label: &str) -> Option<usize> {
        self.labels[o].iter().position(|l| l == label)
    }

    /// Same sets and maps, labels ignored.
    pub fn same_tables(&self, other: &FinFunctor) -> bool {
        self.cat == other.cat && self.sizes() == other.sizes() && self.maps == other.maps
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> FinFunctor {
        self.labels = labels;
        self
    }

    /// Copy with one table entry replaced.
    pub fn with_map_entry(&self, m: Mor, x: usize, y: usize) -> FinFunctor {
        let mut f = self.clone();
        f.maps[m][x] = y;
        f
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        report.record("functor_identity", self.identity_witness());
        report.record("functor_composition", self.composition_witness());
        report
    }

    pub fn is_functor(&self) -> bool {
        self.identity_witness().is_none() && self.composition_witness().is_none()
    }

    fn identity_witness(&self) -> Option<String> {
        for o in 0..self.cat.object_count() {
            let id = self.cat.identity(o);
            if let Some(x) = (0..self.size(o)).find(|&x| self.maps[id][x] != x) {
                return Some(format!("F({})({}) != {}", self.cat.arrow(id).name, self.label(o, x), self.label(o, x)));
            }
        }
        None
    }

    fn composition_witness(&self) -> Option<String> {
        for f in 0..self.cat.morphism_count() {
            let d = self.cat.dom(f);
            for &g in self.cat.out_of(self.cat.cod(f)) {
                let Some(gf) = self.cat.compose(g, f) else {
                    return Some(format!("{} ∘ {} missing", self.cat.arrow(g).name, self.cat.arrow(f).name));
                };
                for x in 0..self.size(d) {
                    if self.apply(g, self.apply(f, x)) != self.apply(gf, x) {
                        return Some(format!(
                            "F({}) ∘ F({}) != F({}) at {}",
                            self.cat.arrow(g).name,
                            self.cat.arrow(f).name,
                            self.cat.arrow(gf).name,
                            self.label(d, x)
                        ));
                    }
                }
            }
        }
        None
    }
}

impl fmt::Display for FinFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .cat
            .objects()
            .iter()
            .enumerate()
            .map(|(o, name)| format!("{name}:{{{}}}", self.labels[o].join(",")))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A family of functions `source(V) -> target(V)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatTrans {
    source: Arc<FinFunctor>,
    target: Arc<FinFunctor>,
    components: Vec<Vec<usize>>,
}

impl NatTrans {
    /// Shape-checked constructor; naturality is checked by [`NatTrans::naturality_witness`].
    pub fn new(
        source: &Arc<FinFunctor>,
        target: &Arc<FinFunctor>,
        components: Vec<Vec<usize>>,
    ) -> Result<NatTrans, FinCatError> {
        if source.cat() != target.cat() {
            return Err(FinCatError::CategoryMismatch);
        }
        if components.len() != source.cat().object_count() {
            return Err(FinCatError::Functor("one component per object required".into()));
        }
        for (o, c) in components.iter().enumerate() {
            if c.len() != source.size(o) || c.iter().any(|&y| y >= target.size(o)) {
                return Err(FinCatError::Functor(format!(
                    "component at `{}` has the wrong shape",
                    source.cat().objects()[o]
                )));
            }
        }
        Ok(NatTrans { source: source.clone(), target: target.clone(), components })
    }

    /// Same as [`NatTrans::new`] but rejecting non-natural families.
    pub fn natural(
        source: &Arc<FinFunctor>,
        target: &Arc<FinFunctor>,
        components: Vec<Vec<usize>>,
    ) -> Result<NatTrans, FinCatError> {
        let t = Self::new(source, target, components)?;
        match t.naturality_witness() {
            None => Ok(t),
            Some(w) => Err(FinCatError::NonNatural(w)),
        }
    }

    /// Assembles from a flat assignment laid out object by object.
    pub(crate) fn from_flat(source: &Arc<FinFunctor>, target: &Arc<FinFunctor>, flat: &[usize]) -> NatTrans {
        let mut components = Vec::with_capacity(source.sizes().len());
        let mut at = 0;
        for n in source.sizes() {
            components.push(flat[at..at + n].to_vec());
            at += n;
        }
        NatTrans { source: source.clone(), target: target.clone(), components }
    }

    pub fn identity(f: &Arc<FinFunctor>) -> NatTrans {
        let components = f.sizes().into_iter().map(|n| (0..n).collect()).collect();
        NatTrans { source: f.clone(), target: f.clone(), components }
    }

    pub fn source(&self) -> &Arc<FinFunctor> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinFunctor> {
        &self.target
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component(&self, o: Obj) -> &[usize] {
        &self.components[o]
    }

    pub fn apply(&self, o: Obj, x: usize) -> usize {
        self.components[o][x]
    }

    pub fn flat(&self) -> Vec<usize> {
        self.components.concat()
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &NatTrans) -> Result<NatTrans, FinCatError> {
        if first.target.as_ref() != self.source.as_ref() {
            return Err(FinCatError::Functor("composition of non-composable transformations".into()));
        }
        let components = first
            .components
            .iter()
            .zip(&self.components)
            .map(|(f, g)| f.iter().map(|&x| g[x]).collect())
            .collect();
        Ok(NatTrans { source: first.source.clone(), target: self.target.clone(), components })
    }

    pub fn with_component_entry(&self, o: Obj, x: usize, y: usize) -> NatTrans {
        let mut t = self.clone();
        t.components[o][x] = y;
        t
    }

    /// First naturality square that fails, if any.
    pub fn naturality_witness(&self) -> Option<String> {
        let cat = self.source.cat();
        for m in 0..cat.morphism_count() {
            let (d, c) = (cat.dom(m), cat.cod(m));
            for x in 0..self.source.size(d) {
                let down_right = self.target.apply(m, self.apply(d, x));
                let right_down = self.apply(c, self.source.apply(m, x));
                if down_right != right_down {
                    return Some(format!(
                        "square at `{}` fails for {}: {} vs {}",
                        cat.arrow(m).name,
                        self.source.label(d, x),
                        self.target.label(c, down_right),
                        self.target.label(c, right_down)
                    ));
                }
            }
        }
        None
    }

    pub fn is_natural(&self) -> bool {
        self.naturality_witness().is_none()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        r.record("naturality", self.naturality_witness());
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow() -> Arc<FinCat> {
        Arc::new(FinCat::build("arrow", &["A", "B"], &[("f", "A", "B")], &[]).unwrap())
    }

    #[test]
    fn functor_laws_and_witnesses() {
        let c = arrow();
        let m = FinFunctor::from_generators(&c, &[2, 1], &[("f", vec![0, 0])]).unwrap();
        assert!(m.validate().all_passed());
        let bad = m.with_map_entry(c.identity(0), 0, 1);
        assert!(!bad.validate().get("functor_identity").unwrap().passed);
        assert!(FinFunctor::from_generators(&c, &[2, 1], &[("f", vec![0, 1])]).is_err());
    }

    #[test]
    fn naturality_is_checked() {
        let c = arrow();
        let m = Arc::new(FinFunctor::from_generators(&c, &[2, 2], &[("f", vec![0, 1])]).unwrap());
        let swap = NatTrans::natural(&m, &m, vec![vec![1, 0], vec![1, 0]]).unwrap();
        assert!(swap.after(&swap).unwrap() == NatTrans::identity(&m));
        let err = NatTrans::natural(&m, &m, vec![vec![1, 0], vec![0, 1]]).unwrap_err();
        assert!(matches!(err, FinCatError::NonNatural(w) if w.contains('f')));
    }
}
