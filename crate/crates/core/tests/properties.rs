use std::sync::Arc;

use proptest::prelude::*;
use weilad::algebra::{compose, tensor, WeilAlgebra, WeilMorphism};
use weilad::laws::{default_algebras, default_morphisms, run_law, LawId, LawInstance, Model};
use weilad::number::{Primitive, WeilNumber};
use weilad::scalar::{normwise_rel_error, Rational};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| q(n, d))
}

fn vector(dim: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), dim)
}

fn algebra() -> impl Strategy<Value = Arc<WeilAlgebra>> {
    let all = default_algebras();
    (0..all.len()).prop_map(move |k| all[k].clone())
}

fn algebra_and_vectors(count: usize) -> impl Strategy<Value = (Arc<WeilAlgebra>, Vec<Vec<Rational>>)> {
    algebra().prop_flat_map(move |w| {
        let d = w.dim();
        (Just(w), prop::collection::vec(vector(d), count))
    })
}

fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn composable() -> impl Strategy<Value = (WeilMorphism, WeilMorphism)> {
    let all = default_morphisms();
    let pairs: Vec<(WeilMorphism, WeilMorphism)> = all
        .iter()
        .flat_map(|f| all.iter().filter(|g| g.source() == f.target()).map(move |g| (f.clone(), g.clone())))
        .collect();
    prop::sample::select(pairs)
}

fn morphism() -> impl Strategy<Value = WeilMorphism> {
    let all = default_morphisms();
    (0..all.len()).prop_map(move |k| all[k].clone())
}

proptest! {
    #[test]
    fn ring_laws_hold_exactly((w, v) in algebra_and_vectors(3)) {
        let (a, b, c) = (&v[0], &v[1], &v[2]);
        let m = |x: &[Rational], y: &[Rational]| w.mul_vectors(x, y);
        prop_assert_eq!(m(&m(a, b), c), m(a, &m(b, c)));
        prop_assert_eq!(m(a, b), m(b, a));
        prop_assert_eq!(m(a, &add(b, c)), add(&m(a, b), &m(a, c)));
    }

    #[test]
    fn units_invert_exactly((w, v) in algebra_and_vectors(1), head in rational()) {
        prop_assume!(head != q(0, 1));
        let mut coeffs = v[0].clone();
        coeffs[0] = head;
        let x = WeilNumber::new(&w, coeffs).unwrap();
        let inv = x.invert().unwrap();
        prop_assert_eq!(x.try_mul(&inv).unwrap(), WeilNumber::constant(&w, q(1, 1)));
    }

    #[test]
    fn pushing_along_a_composite_is_pushing_twice((first, second) in composable(), seed in any::<u64>()) {
        let d = first.source().dim();
        let coeffs: Vec<Rational> = (0..d).map(|k| q(((seed >> (k % 60)) & 7) as i64 - 3, 1 + k as i64)).collect();
        let x = WeilNumber::new(first.source(), coeffs).unwrap();
        let both = compose(&first, &second).unwrap();
        prop_assert_eq!(x.push_along(&both).unwrap(), x.push_along(&first).unwrap().push_along(&second).unwrap());
    }

    #[test]
    fn primitives_commute_with_pushing(phi in morphism(), head in 0.2f64..2.0, tail in prop::collection::vec(-1.0f64..1.0, 12)) {
        let d = phi.source().dim();
        let mut coeffs: Vec<f64> = tail.into_iter().cycle().take(d).collect();
        coeffs[0] = head;
        let x = WeilNumber::new(phi.source(), coeffs).unwrap();
        for p in [Primitive::Exp, Primitive::Log, Primitive::Sin, Primitive::Cos, Primitive::Sqrt, Primitive::Atan, Primitive::Tanh] {
            let left = x.apply(p).unwrap().push_along(&phi).unwrap();
            let right = x.push_along(&phi).unwrap().apply(p).unwrap();
            prop_assert!(normwise_rel_error(left.coeffs(), right.coeffs()) < 1e-12, "{}", p.name());
        }
    }

    #[test]
    fn exact_primitives_commute_with_pushing(phi in morphism(), head in rational(), tail in vector(12), n in -4i32..=4) {
        prop_assume!(head != q(0, 1));
        let d = phi.source().dim();
        let mut coeffs: Vec<Rational> = tail.into_iter().cycle().take(d).collect();
        coeffs[0] = head;
        let x = WeilNumber::new(phi.source(), coeffs).unwrap();
        for p in [Primitive::PowInt(n), Primitive::Recip] {
            let left = x.apply(p).unwrap().push_along(&phi).unwrap();
            let right = x.push_along(&phi).unwrap().apply(p).unwrap();
            prop_assert_eq!(left, right);
        }
    }

    #[test]
    fn jets_match_closed_form_taylor_series(a in 0.3f64..2.0, order in 1usize..=6) {
        let j = Arc::new(WeilAlgebra::jet(order).unwrap());
        let x = WeilNumber::variable(&j, a, 0);
        let mut fact = 1.0;
        let exp = x.apply(Primitive::Exp).unwrap();
        let log = x.apply(Primitive::Log).unwrap();
        let recip = x.apply(Primitive::Recip).unwrap();
        let sin = x.apply(Primitive::Sin).unwrap();
        for k in 0..=order {
            if k > 0 {
                fact *= k as f64;
            }
            let close = |got: f64, want: f64| (got - want).abs() <= 1e-12 * want.abs().max(1.0);
            prop_assert!(close(exp.coeffs()[k], a.exp() / fact));
            let log_k = if k == 0 { a.ln() } else { (if k % 2 == 1 { 1.0 } else { -1.0 }) / (k as f64 * a.powi(k as i32)) };
            prop_assert!(close(log.coeffs()[k], log_k));
            let recip_k = if k % 2 == 0 { 1.0 } else { -1.0 } / a.powi(k as i32 + 1);
            prop_assert!(close(recip.coeffs()[k], recip_k));
            let sin_k = [a.sin(), a.cos(), -a.sin(), -a.cos()][k % 4] / fact;
            prop_assert!(close(sin.coeffs()[k], sin_k));
        }
    }

    #[test]
    fn law_reports_are_deterministic_and_pass(seed in any::<u64>(), law in prop::sample::select(vec![LawId::L3, LawId::L6, LawId::L11])) {
        let inst = LawInstance::new(law, Model::Numeric).seed(seed);
        let first = run_law(&inst).unwrap();
        prop_assert!(first.passed(), "{:?}", first.witnesses);
        prop_assert_eq!(first, run_law(&inst).unwrap());
    }

    #[test]
    fn generator_images_are_accepted_iff_multiplicative(
        images in prop::collection::vec(prop::collection::vec(-2i64..=2, 3), 2),
        target_index in 0usize..3,
    ) {
        let source = Arc::new(WeilAlgebra::mixed(&[1, 1]).unwrap());
        let targets = [WeilAlgebra::jet(3).unwrap(), WeilAlgebra::jet(2).unwrap(), WeilAlgebra::dual(2).unwrap()];
        let target = Arc::new(targets[target_index].clone());
        let imgs: Vec<Vec<Rational>> = images
            .iter()
            .map(|img| (0..target.dim()).map(|k| if k == 0 { q(0, 1) } else { q(img[(k - 1) % img.len()], 1) }).collect())
            .collect();
        let accepted = WeilMorphism::from_generator_images(&source, &target, &imgs).is_ok();
        prop_assert_eq!(accepted, brute_force_multiplicative(&source, &target, &imgs));
    }
}

/// Builds the linear map monomial by monomial and tests `f(ab) = f(a) f(b)`
/// on every pair of basis elements.
fn brute_force_multiplicative(source: &Arc<WeilAlgebra>, target: &Arc<WeilAlgebra>, images: &[Vec<Rational>]) -> bool {
    let unit: Vec<Rational> = (0..target.dim()).map(|k| if k == 0 { q(1, 1) } else { q(0, 1) }).collect();
    let columns: Vec<Vec<Rational>> = source
        .basis()
        .iter()
        .map(|m| {
            m.exponents().fold(unit.clone(), |acc, (g, e)| (0..e).fold(acc, |acc, _| target.mul_vectors(&acc, &images[g])))
        })
        .collect();
    let apply = |v: &[Rational]| -> Vec<Rational> {
        (0..target.dim()).map(|row| v.iter().zip(&columns).map(|(c, col)| c * &col[row]).sum()).collect()
    };
    let basis = |i: usize| -> Vec<Rational> { (0..source.dim()).map(|k| if k == i { q(1, 1) } else { q(0, 1) }).collect() };
    (0..source.dim()).all(|i| {
        (0..source.dim()).all(|j| apply(&source.mul_vectors(&basis(i), &basis(j))) == target.mul_vectors(&columns[i], &columns[j]))
    })
}

#[test]
fn tensor_dimension_and_nilpotency() {
    let family = default_algebras();
    for a in &family {
        for b in &family {
            let (p, _, _) = tensor(a, b);
            assert_eq!(p.dim(), a.dim() * b.dim());
            assert_eq!(p.nilpotency_index(), a.nilpotency_index() + b.nilpotency_index() - 1);
            assert_eq!(p.computed_nilpotency_index(), Some(p.nilpotency_index()));
        }
    }
}

#[test]
fn composition_is_associative_and_unital() {
    let ms = default_morphisms();
    for f in &ms {
        let left = compose(&WeilMorphism::identity(f.source()), f).unwrap();
        let right = compose(f, &WeilMorphism::identity(f.target())).unwrap();
        assert_eq!(left.matrix(), f.matrix());
        assert_eq!(right.matrix(), f.matrix());
        for g in ms.iter().filter(|g| g.source() == f.target()) {
            for h in ms.iter().filter(|h| h.source() == g.target()) {
                let a = compose(&compose(f, g).unwrap(), h).unwrap();
                let b = compose(f, &compose(g, h).unwrap()).unwrap();
                assert_eq!(a.matrix(), b.matrix());
            }
        }
    }
}
