use super::*;
use crate::density::{LinHalfDensity, Prefactor};
use crate::error::{Error, Result};
use crate::formal::{FormalFunction, Monomial};
use crate::graded::{GradedSpace, Subspace};
use crate::integral::{bv_integral_lagrangian, DgOddSympSpace};
use crate::matrix::Mat;
use crate::random;
use crate::scalar::{int, one, sign, Scalar};
use crate::symplectic::{OddSympSpace, Relation};
use proptest::prelude::*;

const W: i64 = 5;

/// Chevalley–Eilenberg action `½ f^c_ab ξ_c c^a c^b` on `T*[1](g[1])`.
fn lie_algebra_action(structure: &[[[i64; 3]; 3]; 3]) -> QuantumLInfty {
    let w = GradedSpace::new(vec![-1; 3]);
    let v = OddSympSpace::shifted_cotangent(&w);
    let mut terms = Vec::new();
    for (a, row) in structure.iter().enumerate() {
        for (b, entry) in row.iter().enumerate() {
            for (c, &f) in entry.iter().enumerate() {
                if f != 0 {
                    terms.push((Monomial::new(vec![c, 3 + a, 3 + b], 0), Scalar::new(f.into(), 2.into())));
                }
            }
        }
    }
    QuantumLInfty::new(&v, FormalFunction::from_terms(v.space(), terms, W)).unwrap()
}

fn so3() -> [[[i64; 3]; 3]; 3] {
    let mut f = [[[0; 3]; 3]; 3];
    for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        f[a][b][c] = 1;
        f[b][a][c] = -1;
    }
    f
}

#[test]
fn free_theories_solve_the_master_equation() {
    let mut rng = random::rng(1);
    let dg = random::dg_space(&mut rng, 3, false);
    let s = QuantumLInfty::free(&dg, W);
    assert!(s.check_qme().unwrap());
    assert_eq!(s.qme_forms().unwrap(), [true; 3]);
}

#[test]
fn unimodular_lie_algebra() {
    let s = lie_algebra_action(&so3());
    assert!(s.check_qme().unwrap());
    assert_eq!(s.qme_forms().unwrap(), [true; 3]);
}

#[test]
fn non_unimodular_lie_algebra_fails_at_one_loop() {
    let mut f = [[[0; 3]; 3]; 3];
    f[0][1][1] = 1;
    f[1][0][1] = -1;
    let s = lie_algebra_action(&f);
    assert!(!s.check_qme().unwrap());
    let residual = s.qme_residual().unwrap();
    assert!(residual.terms().all(|(m, _)| m.hbar_power() == 1));
}

#[test]
fn rejects_forbidden_components() {
    let v = OddSympSpace::shifted_cotangent(&GradedSpace::new(vec![0]));
    let vacuum = FormalFunction::hbar(v.space(), 1, W);
    assert!(matches!(QuantumLInfty::new(&v, vacuum), Err(Error::MalformedAction(_))));
    let tadpole = FormalFunction::coordinate(v.space(), 1, W);
    assert!(matches!(QuantumLInfty::new(&v, tadpole), Err(Error::MalformedAction(_))));
}

fn random_theory(seed: u64, acyclic: bool) -> (QuantumLInfty, random::TestRng) {
    let mut rng = random::rng(seed);
    let dg = random::dg_space(&mut rng, 3, acyclic);
    let s = random::quantum_linfty(&mut rng, &dg, W).unwrap();
    (s, rng)
}

fn reduction_along(v: &OddSympSpace, i: &Subspace) -> Relation {
    v.reduce(&v.complement(i).unwrap()).unwrap().relation()
}

#[test]
fn transfer_along_the_identity_changes_nothing() {
    let (s, _) = random_theory(3, false);
    let t = transfer(&s, &Relation::identity(s.space())).unwrap();
    assert_eq!(t.action, s);
    assert!(t.vacuum.is_zero());
}

#[test]
fn free_transfer_is_the_reduced_free_action() {
    let mut rng = random::rng(9);
    let dg = random::dg_space(&mut rng, 3, false);
    let i = random::nondegenerate_isotrope(&mut rng, &dg, 1).unwrap();
    let l = reduction_along(dg.base(), &i);
    let s = QuantumLInfty::free(&dg, W);
    let t = transfer(&s, &l).unwrap();
    assert!(t.action.interaction().is_zero());
    assert_eq!(t.action.dg().q(), &crate::integral::transferred_differential(&dg, &l).unwrap());
}

#[test]
fn perturbed_action_breaks_the_master_equation() {
    for seed in 0..40 {
        let (s, _) = random_theory(seed, false);
        if s.interaction().is_zero() {
            continue;
        }
        let candidates = random::monomials(s.space().space(), 0, 4, 4, 2);
        for m in candidates.into_iter().filter(|m| m.polynomial_degree() >= 1) {
            let bumped = s.action().add(&FormalFunction::from_terms(s.space().space(), [(m, one())], W)).unwrap();
            let t = QuantumLInfty::new(s.space(), bumped).unwrap();
            if !t.check_qme().unwrap() {
                assert_eq!(t.qme_forms().unwrap(), [false; 3]);
                return;
            }
        }
    }
    panic!("no breaking perturbation found");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn master_equation_forms_agree(seed in 0u64..10_000) {
        let (s, _) = random_theory(seed, false);
        prop_assert_eq!(s.qme_forms().unwrap(), [true; 3]);
    }

    #[test]
    fn transfer_preserves_the_master_equation(seed in 0u64..10_000) {
        let (s, mut rng) = random_theory(seed, false);
        let i = random::nondegenerate_isotrope(&mut rng, s.dg(), 1).unwrap();
        let l = reduction_along(s.space(), &i);
        let t = transfer(&s, &l).unwrap();
        prop_assert!(t.action.check_qme().unwrap());
        prop_assert!(t.action.interaction().min_hbar_power().unwrap_or(0) >= 0);
        let h = transfer_hpl(&s, &l).unwrap();
        prop_assert_eq!(&h.action, &t.action);
        prop_assert_eq!(&h.vacuum, &t.vacuum);
        let cert = check_relation(&s, &t.action, &l).unwrap();
        prop_assert!(cert.holds());
        prop_assert!(cert.cospan.right.is_coreduction().unwrap());
    }
}

#[test]
fn degenerate_kernel_fails_condition_one() {
    let w = GradedSpace::new(vec![0]);
    let v = OddSympSpace::shifted_cotangent(&w);
    let s = QuantumLInfty::free(&DgOddSympSpace::trivial(&v), W);
    let base = Subspace::coordinate(v.space(), &[1]);
    let l = reduction_along(&v, &base);
    let target = QuantumLInfty::free(&DgOddSympSpace::trivial(l.target()), W);
    let cert = check_relation(&s, &target, &l).unwrap();
    assert!(!cert.kernels_nondegenerate);
    assert!(!cert.holds());
}

#[test]
fn different_differentials_fail_condition_two() {
    let mut rng = random::rng(21);
    let dg = random::dg_space(&mut rng, 4, true);
    let s = QuantumLInfty::free(&dg, W);
    let doubled = DgOddSympSpace::from_differential(dg.base(), &dg.q().scale(&int(2))).unwrap();
    let cert = check_relation(&s, &QuantumLInfty::free(&doubled, W), &Relation::identity(dg.base())).unwrap();
    assert!(cert.kernels_nondegenerate);
    assert!(!cert.differentials_agree);
}

#[test]
fn composing_with_the_identity() {
    let (s, mut rng) = random_theory(17, false);
    let i = random::nondegenerate_isotrope(&mut rng, s.dg(), 1).unwrap();
    let l = reduction_along(s.space(), &i);
    let target = effective_action(&s, &l).unwrap();
    let cert = check_relation(&s, &target, &l).unwrap();
    let id = check_relation(&target, &target, &Relation::identity(target.space())).unwrap();
    let composed = compose_relations(&cert, &id).unwrap();
    assert!(composed.holds());
    assert_eq!(composed.relation, l);
}

#[test]
fn successive_homology_reductions_compose() {
    let mut checked = 0;
    for seed in 0..30 {
        let (s, mut rng) = random_theory(seed, false);
        let i = random::nondegenerate_isotrope(&mut rng, s.dg(), 1).unwrap();
        let l1 = reduction_along(s.space(), &i);
        let s1 = effective_action(&s, &l1).unwrap();
        let j = random::nondegenerate_isotrope(&mut rng, s1.dg(), 1).unwrap();
        if j.is_zero() {
            continue;
        }
        let l2 = reduction_along(s1.space(), &j);
        let s2 = effective_action(&s1, &l2).unwrap();
        let c1 = check_relation(&s, &s1, &l1).unwrap();
        let c2 = check_relation(&s1, &s2, &l2).unwrap();
        let composed = compose_relations(&c1, &c2).unwrap();
        assert!(composed.holds());
        let direct = check_relation(&s, &s2, &composed.relation).unwrap();
        assert!(direct.holds());
        checked += 1;
    }
    assert!(checked > 0);
}

/// `W = ⟨e_{−1}, e_0, e_0′, e_1⟩` with `δe_{−1} = e_0`, `δe_0′ = e_1`; the
/// isotropes `⟨e_0′ + f_1 + e_0⟩` and `⟨f_0, e_{−1}⟩` are both
/// non-degenerate but pair nontrivially.
#[test]
fn non_orthogonal_counterexample() {
    let w = GradedSpace::new(vec![-1, 0, 0, 1]);
    let mut delta = Mat::zeros(4, 4);
    delta[(1, 0)] = one();
    delta[(3, 2)] = one();
    let v = OddSympSpace::shifted_cotangent(&w);
    let dg = DgOddSympSpace::from_differential(&v, &random::cotangent_differential(&w, &delta)).unwrap();
    let unit = |i: usize| v.space().unit(i);
    let sum: Vec<Scalar> = (0..8).map(|k| [6, 3, 5].iter().map(|&i| unit(i)[k].clone()).sum()).collect();
    let i = Subspace::span(v.space(), &[sum]).unwrap();
    let it = Subspace::span(v.space(), &[unit(1), unit(4)]).unwrap();
    assert!(dg.is_nondegenerate(&i).unwrap() && dg.is_nondegenerate(&it).unwrap());
    let s = QuantumLInfty::free(&dg, W);
    let (l, lt) = (reduction_along(&v, &i), reduction_along(&v, &it));
    let (r, rt) = (effective_action(&s, &l).unwrap(), effective_action(&s, &lt).unwrap());
    let c1 = check_relation(&r, &s, &l.transpose()).unwrap();
    let c2 = check_relation(&s, &rt, &lt).unwrap();
    assert!(c1.holds() && c2.holds());
    assert_eq!(compose_relations(&c1, &c2).unwrap_err(), Error::NotOrthogonal);
}

fn standard(v: &OddSympSpace) -> LinHalfDensity {
    LinHalfDensity::standard(v.space())
}

#[test]
fn delta_of_the_unit_without_action_vanishes() {
    let v = OddSympSpace::shifted_cotangent(&GradedSpace::new(vec![0, 1]));
    let g = GeneralizedLagrangian::identity(&v, W);
    assert!(g.delta().unwrap().function().is_zero());
}

#[test]
fn lagrangian_relations_compose_as_relations() {
    let mut rng = random::rng(4);
    for _ in 0..10 {
        let (u, v, w) = (random::symplectic_space(&mut rng, 2), random::symplectic_space(&mut rng, 2), random::symplectic_space(&mut rng, 2));
        let l1 = Relation::new(u.clone(), v.clone(), random::lagrangian(&mut rng, &u.flip().product(&v)).unwrap()).unwrap();
        let l2 = Relation::new(v.clone(), w.clone(), random::lagrangian(&mut rng, &v.flip().product(&w)).unwrap()).unwrap();
        let g = GeneralizedLagrangian::from_relation(&l1, W).unwrap().then(&GeneralizedLagrangian::from_relation(&l2, W).unwrap()).unwrap();
        assert_eq!(g, GeneralizedLagrangian::from_relation(&l1.then(&l2).unwrap(), W).unwrap());
    }
}

#[test]
fn transversal_lagrangians_pair_to_one() {
    let v = OddSympSpace::shifted_cotangent(&GradedSpace::new(vec![0, -1]));
    let point = OddSympSpace::point();
    let fibre = Subspace::coordinate(v.space(), &[0, 1]);
    let base = Subspace::coordinate(v.space(), &[2, 3]);
    let g1 = GeneralizedLagrangian::from_relation(&Relation::new(point.clone(), v.clone(), fibre).unwrap(), W).unwrap();
    let g2 = GeneralizedLagrangian::from_relation(&Relation::new(v.clone(), point, base).unwrap(), W).unwrap();
    let value = g1.pair(&g2).unwrap();
    assert_eq!(value.series, FormalFunction::one(&GradedSpace::point(), W));
    assert_eq!(value.prefactor, Prefactor::one());
}

fn gaussian_and_coisotrope(seed: u64) -> Option<(GeneralizedLagrangian, GeneralizedLagrangian, i64)> {
    let mut rng = random::rng(seed);
    let dg = random::dg_space(&mut rng, 3, true);
    let v = dg.base().clone();
    let deg = rand::Rng::gen_range(&mut rng, -1..=1);
    let f1 = random::function(&mut rng, v.space(), deg, W, 0.1);
    let full = Relation::new(OddSympSpace::point(), v.clone(), Subspace::full(v.space())).unwrap();
    let g1 = GeneralizedLagrangian::new(full, f1, standard(&v), &dg.s_free(W)).unwrap();
    let c = random::coisotropic(&mut rng, &v.flip()).unwrap();
    let rel = Relation::new(v.clone(), OddSympSpace::point(), Subspace::span(&v.space().product(&GradedSpace::point()), c.basis()).unwrap()).unwrap();
    let reduced = rel.ambient().reduce(rel.graph()).unwrap().reduced().clone();
    let f2 = random::function(&mut rng, reduced.space(), -deg, W, 0.2);
    let rho2 = LinHalfDensity::new(reduced.space().clone(), Prefactor::sqrt_abs(&int(2)));
    let g2 = GeneralizedLagrangian::new(rel, f2, rho2, &FormalFunction::zero(reduced.space(), W)).unwrap();
    match g1.then(&g2) {
        Err(Error::NonComposable) => None,
        Err(e) => panic!("{e}"),
        Ok(_) => Some((g1, g2, deg)),
    }
}

#[test]
fn delta_is_self_adjoint_and_squares_to_zero() {
    let mut checked = 0;
    for seed in 0..80 {
        let Some((g1, g2, deg)) = gaussian_and_coisotrope(seed) else { continue };
        assert!(g1.delta().unwrap().delta().unwrap().function().is_zero());
        assert!(g2.delta().unwrap().delta().unwrap().function().is_zero());
        let a = g1.delta().unwrap().pair(&g2).unwrap();
        let b = g1.pair(&g2.delta().unwrap()).unwrap();
        assert_eq!(a.prefactor, b.prefactor);
        assert!(a.series.add(&b.series.scale(&sign(deg.rem_euclid(2) == 1))).unwrap().is_zero());
        checked += 1;
    }
    assert!(checked >= 5, "only {checked} composable samples");
}

#[test]
fn pairing_with_a_lagrangian_is_the_bv_integral() {
    let mut rng = random::rng(8);
    for _ in 0..10 {
        let dg = random::dg_space(&mut rng, 4, true);
        let v = dg.base().clone();
        let l = random::nondegenerate_lagrangian(&mut rng, &dg).unwrap().unwrap();
        let f = random::function(&mut rng, v.space(), 0, W, 0.1);
        let full = Relation::new(OddSympSpace::point(), v.clone(), Subspace::full(v.space())).unwrap();
        let g1 = GeneralizedLagrangian::new(full, f.clone(), standard(&v), &dg.s_free(W)).unwrap();
        let rel = Relation::new(v.clone(), OddSympSpace::point(), Subspace::span(v.space(), l.basis()).unwrap()).unwrap();
        let g2 = GeneralizedLagrangian::from_relation(&rel, W).unwrap();
        let paired = g1.pair(&g2).unwrap();
        let direct = bv_integral_lagrangian(&dg, &f, &standard(&v), &l).unwrap();
        assert_eq!(paired, direct);
    }
}

#[test]
fn quantum_linfty_is_a_closed_state() {
    for seed in 0..6 {
        let (s, _) = random_theory(seed, false);
        let g = GeneralizedLagrangian::from_linfty(&s, &standard(s.space())).unwrap();
        assert!(g.delta().unwrap().function().is_zero());
    }
}

#[test]
fn identity_is_a_unit() {
    for seed in 0..10 {
        let Some((g1, g2, _)) = gaussian_and_coisotrope(seed) else { continue };
        let v = g1.target().clone();
        assert_eq!(g1.then(&GeneralizedLagrangian::identity(&v, W)).unwrap(), g1);
        assert_eq!(GeneralizedLagrangian::identity(&v, W).then(&g2).unwrap(), g2);
    }
}

fn on_coisotrope(rng: &mut random::TestRng, source: &OddSympSpace, target: &OddSympSpace, deg: i64) -> GeneralizedLagrangian {
    let c = random::coisotropic(rng, &source.flip().product(target)).unwrap();
    let rel = Relation::new(source.clone(), target.clone(), c).unwrap();
    let reduced = rel.ambient().reduce(rel.graph()).unwrap().reduced().clone();
    let f = random::function(rng, reduced.space(), deg, W, 0.2);
    let rho = LinHalfDensity::new(reduced.space().clone(), Prefactor::sqrt_abs(&int(3)));
    GeneralizedLagrangian::new(rel, f, rho, &FormalFunction::zero(reduced.space(), W)).unwrap()
}

fn gaussian_state(rng: &mut random::TestRng, deg: i64) -> GeneralizedLagrangian {
    let dg = random::dg_space(rng, 3, true);
    let v = dg.base().clone();
    let f = random::function(rng, v.space(), deg, W, 0.1);
    let full = Relation::new(OddSympSpace::point(), v.clone(), Subspace::full(v.space())).unwrap();
    GeneralizedLagrangian::new(full, f, standard(&v), &dg.s_free(W)).unwrap()
}

fn composable(g: Result<GeneralizedLagrangian>) -> Option<GeneralizedLagrangian> {
    match g {
        Err(Error::NonComposable) => None,
        other => Some(other.unwrap()),
    }
}

#[test]
fn delta_is_a_derivation_of_composition() {
    let mut checked = 0;
    for seed in 0..60 {
        let mut rng = random::rng(seed);
        let deg = rand::Rng::gen_range(&mut rng, -1..=1);
        let g1 = gaussian_state(&mut rng, deg);
        let w = random::symplectic_space(&mut rng, 1);
        let g2 = on_coisotrope(&mut rng, g1.target(), &w, 0);
        let Some(composite) = composable(g1.then(&g2)) else { continue };
        let lhs = composite.delta().unwrap();
        let a = g1.delta().unwrap().then(&g2).unwrap();
        let b = g1.then(&g2.delta().unwrap()).unwrap();
        assert_eq!(a.density(), lhs.density());
        let rhs = a.function().add(&b.function().scale(&sign(deg.rem_euclid(2) == 1))).unwrap();
        assert_eq!(lhs.function(), &rhs);
        checked += 1;
    }
    assert!(checked >= 5, "only {checked} composable samples");
}

#[test]
fn composition_is_associative() {
    let mut checked = 0;
    for seed in 0..150 {
        let mut rng = random::rng(1000 + seed);
        let g1 = gaussian_state(&mut rng, 0);
        let w = random::symplectic_space(&mut rng, 1);
        let g2 = on_coisotrope(&mut rng, g1.target(), &w, 0);
        let end = random::lagrangian(&mut rng, &w.flip()).unwrap();
        let end = Relation::new(w.clone(), OddSympSpace::point(), Subspace::span(&w.space().product(&GradedSpace::point()), end.basis()).unwrap()).unwrap();
        let g3 = GeneralizedLagrangian::from_relation(&end, W).unwrap();
        let Some(left) = composable(g1.then(&g2)).and_then(|g12| composable(g12.then(&g3))) else { continue };
        let Some(right) = composable(g2.then(&g3)).and_then(|g23| composable(g1.then(&g23))) else { continue };
        assert_eq!(left, right);
        checked += 1;
    }
    assert!(checked >= 3, "only {checked} fully composable triples");
}
