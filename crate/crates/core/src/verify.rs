//! Seeded property suites behind `oddsymp verify`. Every instance draws from
//! its own generator, so a failing instance is reproducible from the suite
//! seed and its index alone.

use crate::density::{berezinian, fuse_density, split_density, LinHalfDensity, Prefactor};
use crate::error::{Error, Result};
use crate::formal::{FormalFunction, Monomial};
use crate::graded::{GradedSpace, Subspace};
use crate::integral::{
    bv_integral_lagrangian, fiber_integral, hpl_projection, transferred_differential, transferred_differential_via_relations, wick_sum, DgOddSympSpace,
};
use crate::matrix::Mat;
use crate::quantum::{check_relation, compose_relations, effective_action, transfer, transfer_hpl, GeneralizedLagrangian};
use crate::random::{self, TestRng};
use crate::scalar::{int, one, sign, Scalar};
use crate::symplectic::{decompose_coisotrope, factor_through, factorize, orthogonal_span, span_cospan, square_commutes, OddSympSpace, Relation};
use rand::Rng;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

const W: i64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Symplectic,
    Densities,
    BvAlgebra,
    Integral,
    Quantum,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Symplectic, Suite::Densities, Suite::BvAlgebra, Suite::Integral, Suite::Quantum];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Symplectic => "symplectic",
            Suite::Densities => "densities",
            Suite::BvAlgebra => "bvalgebra",
            Suite::Integral => "integral",
            Suite::Quantum => "quantum",
        }
    }

    fn checks(self) -> &'static [(&'static str, Check)] {
        match self {
            Suite::Symplectic => SYMPLECTIC,
            Suite::Densities => DENSITIES,
            Suite::BvAlgebra => BV_ALGEBRA,
            Suite::Integral => INTEGRAL,
            Suite::Quantum => QUANTUM,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.as_str() == s).ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

/// Result of one instance; `Skip` when the random draw misses a precondition.
#[derive(Debug)]
pub enum Outcome {
    Pass,
    Skip,
    Fail(String),
}

type Check = fn(&mut TestRng) -> Result<Outcome>;

fn expect(ok: bool, detail: impl FnOnce() -> String) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail(detail())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: usize,
    pub skipped: usize,
    pub counterexamples: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub seed: u64,
    pub instances: usize,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.counterexamples.is_empty())
    }
}

fn instance_seed(seed: u64, check: usize, instance: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ ((check as u64) << 32) ^ instance as u64
}

pub fn run(suite: Suite, seed: u64, instances: usize) -> SuiteReport {
    let checks = suite
        .checks()
        .iter()
        .enumerate()
        .map(|(k, &(name, check))| {
            let mut report = CheckReport { name, passed: 0, skipped: 0, counterexamples: Vec::new() };
            for i in 0..instances {
                let mut rng = random::rng(instance_seed(seed, k, i));
                match check(&mut rng) {
                    Ok(Outcome::Pass) => report.passed += 1,
                    Ok(Outcome::Skip) => report.skipped += 1,
                    Ok(Outcome::Fail(detail)) => report.counterexamples.push(format!("instance {i}: {detail}")),
                    Err(e) => report.counterexamples.push(format!("instance {i}: error: {e}")),
                }
            }
            report
        })
        .collect();
    SuiteReport { suite: suite.as_str(), seed, instances, checks }
}

fn json<T: Serialize>(x: &T) -> String {
    serde_json::to_string(x).unwrap_or_default()
}

fn random_relation(rng: &mut TestRng, max_base_dim: usize) -> Result<Relation> {
    let u = random::symplectic_space(rng, max_base_dim);
    let v = random::symplectic_space(rng, max_base_dim);
    let graph = random::lagrangian(rng, &u.flip().product(&v))?;
    Relation::new(u, v, graph)
}

fn random_reduction(rng: &mut TestRng, v: &OddSympSpace) -> Result<Relation> {
    Ok(v.reduce(&random::coisotropic(rng, v)?)?.relation())
}

const SYMPLECTIC: &[(&str, Check)] = &[
    ("complement_is_an_involution", |rng| {
        let v = random::symplectic_space(rng, 3);
        let w = if rng.gen_bool(0.5) { random::coisotropic(rng, &v)? } else { random::isotropic(rng, &v, 2)? };
        Ok(expect(v.complement(&v.complement(&w)?)? == w, || json(&w)))
    }),
    ("complement_dimension_balance", |rng| {
        let v = random::symplectic_space(rng, 3);
        let w = random::isotropic(rng, &v, 3)?;
        let lhs = v.complement(&w)?.dimsum().times_power(-1);
        let rhs = v.space().dimsum().reflect().checked_sub(&w.dimsum().reflect());
        Ok(expect(Some(lhs) == rhs, || json(&w)))
    }),
    ("factorize_recomposes", |rng| {
        let l = random_relation(rng, 2)?;
        let cospan = factorize(&l)?;
        let legs = cospan.left.is_reduction()? && cospan.right.is_reduction()?;
        Ok(expect(legs && cospan.recompose()? == l, || json(&l)))
    }),
    ("kernel_of_transpose_is_image_complement", |rng| {
        let l = random_relation(rng, 2)?;
        Ok(expect(l.transpose().kernel() == l.target().complement(&l.image())?, || json(&l)))
    }),
    ("reductions_split", |rng| {
        let v = random::symplectic_space(rng, 3);
        let l = random_reduction(rng, &v)?;
        Ok(expect(l.transpose().then(&l)? == Relation::identity(l.target()), || json(&l)))
    }),
    ("lagrangians_compose", |rng| {
        let l1 = random_relation(rng, 2)?;
        let w = random::symplectic_space(rng, 2);
        let l2 = Relation::new(l1.target().clone(), w.clone(), random::lagrangian(rng, &l1.target().flip().product(&w))?)?;
        Ok(expect(l1.then(&l2)?.is_lagrangian(), || format!("{} ; {}", json(&l1), json(&l2))))
    }),
    ("orthogonality_criteria_agree", |rng| {
        let v = random::symplectic_space(rng, 3);
        let (l, lt) = (random_reduction(rng, &v)?, random_reduction(rng, &v)?);
        let a = orthogonal_span(&l, &lt)?;
        let b = v.is_coisotropic(&l.transpose().image().intersect(&lt.transpose().image())?)?;
        let c = v.is_isotropic(&l.kernel().sum(&lt.kernel())?)?;
        Ok(expect(a == b && b == c, || format!("{} ; {}", json(&l), json(&lt))))
    }),
    ("square_commutes_iff_orthogonal", |rng| {
        let v = random::symplectic_space(rng, 3);
        let (l, lt) = (random_reduction(rng, &v)?, random_reduction(rng, &v)?);
        let commutes = square_commutes(&l, &lt, &span_cospan(&l, &lt)?)?;
        Ok(expect(commutes == orthogonal_span(&l, &lt)?, || format!("{} ; {}", json(&l), json(&lt))))
    }),
    ("factoring_through_a_reduction", |rng| {
        let v = random::symplectic_space(rng, 3);
        let (m, l) = (random_reduction(rng, &v)?, random_reduction(rng, &v)?);
        let contained = l.transpose().image().contains(&m.transpose().image())?;
        let ok = match factor_through(&m, &l) {
            Ok(k) => contained && l.then(&k)? == m,
            Err(Error::DoesNotFactor) => !contained,
            Err(e) => return Err(e),
        };
        Ok(expect(ok, || format!("{} ; {}", json(&m), json(&l))))
    }),
    ("coisotrope_decomposition", |rng| {
        let v = random::symplectic_space(rng, 4);
        let c = random::coisotropic(rng, &v)?;
        let d = decompose_coisotrope(&v, &c)?;
        let (r, i, b) = (d.reduced.basis(), d.isotrope.basis(), d.complement.basis());
        let blocks = [v.gram(r, i), v.gram(r, b), v.gram(i, i), v.gram(b, b)].iter().all(Mat::is_zero);
        let balance = d.isotrope.dimsum().times_power(-1) == d.complement.dimsum().reflect();
        let spans = d.reduced.sum(&d.isotrope)?.sum(&d.complement)? == Subspace::full(v.space())
            && r.len() + i.len() + b.len() == v.dim()
            && d.reduced.sum(&d.isotrope)? == c;
        Ok(expect(blocks && balance && spans, || json(&c)))
    }),
];

fn even_block(space: &GradedSpace, a: &Mat) -> Mat {
    let even: Vec<usize> = (0..space.dim()).filter(|&i| !space.is_odd(i)).collect();
    a.submatrix(&even, &even)
}

const DENSITIES: &[(&str, Check)] = &[
    ("berezinian_is_multiplicative", |rng| {
        let w = random::base_space(rng, 4);
        let (a, b) = (random::automorphism(rng, &w), random::automorphism(rng, &w));
        let ok = berezinian(&w, &a.mul(&b))? == berezinian(&w, &a)? * berezinian(&w, &b)?;
        Ok(expect(ok, || format!("{w:?}")))
    }),
    ("evaluation_is_basis_coherent", |rng| {
        let w = random::base_space(rng, 4);
        let rho = LinHalfDensity::new(w.clone(), Prefactor::sqrt_abs(&random::small_scalar(rng, 5)));
        if rho.coefficient.is_zero() {
            return Ok(Outcome::Skip);
        }
        let (a, b) = (random::automorphism(rng, &w), random::automorphism(rng, &w));
        let lhs = rho.evaluate(&a.mul(&b).col_vectors())?;
        let rhs = rho.evaluate(&a.col_vectors())?.mul(&Prefactor::sqrt_abs(&berezinian(&w, &b)?));
        Ok(expect(lhs == rhs, || format!("{w:?}")))
    }),
    ("split_then_fuse", |rng| {
        let w = random::base_space(rng, 4);
        let rho = LinHalfDensity::new(w.clone(), Prefactor::sqrt_abs(&int(rng.gen_range(1..20))));
        let cols = random::automorphism(rng, &w).col_vectors();
        let k = rng.gen_range(0..=cols.len());
        let (a, b) = cols.split_at(k);
        let (ra, rb) = split_density(&rho, a, b)?;
        Ok(expect(fuse_density(&w, &ra, &rb, a, b)? == rho, || format!("{w:?} split at {k}")))
    }),
    ("symplectic_berezinian_is_a_square", |rng| {
        let base = random::base_space(rng, 3);
        let v = OddSympSpace::shifted_cotangent(&base);
        let a = random::automorphism(rng, &base);
        let m = a.inverse().ok_or(Error::NotInvertible)?.transpose().direct_sum(&a);
        let preserved = m.transpose().mul(v.omega()).mul(&m) == *v.omega();
        let det = even_block(v.space(), &m).det();
        Ok(expect(preserved && berezinian(v.space(), &m)? == &det * &det, || format!("{base:?}")))
    }),
];

fn degree_sign(d: i64) -> Scalar {
    sign(d.rem_euclid(2) == 1)
}

struct Triple {
    v: OddSympSpace,
    f: (FormalFunction, i64),
    g: (FormalFunction, i64),
    h: (FormalFunction, i64),
}

fn triple(rng: &mut TestRng) -> Triple {
    let v = random::symplectic_space(rng, 2);
    let draw = |rng: &mut TestRng| {
        let d = rng.gen_range(-1..=1);
        (random::function(rng, v.space(), d, W, 0.3), d)
    };
    let (f, g, h) = (draw(rng), draw(rng), draw(rng));
    Triple { v, f, g, h }
}

fn agree(a: &FormalFunction, b: &FormalFunction) -> Outcome {
    expect(a.agrees_with(b), || format!("{} vs {}", json(a), json(b)))
}

const BV_ALGEBRA: &[(&str, Check)] = &[
    ("laplacian_squares_to_zero", |rng| {
        let t = triple(rng);
        Ok(expect(t.f.0.laplacian(&t.v)?.laplacian(&t.v)?.is_zero(), || json(&t.f.0)))
    }),
    ("laplacian_of_a_product", |rng| {
        let Triple { v, f: (f, df), g: (g, _), .. } = triple(rng);
        let s = degree_sign(df);
        let lhs = f.mul(&g)?.laplacian(&v)?;
        let rhs = f.laplacian(&v)?.mul(&g)?.add(&f.mul(&g.laplacian(&v)?)?.scale(&s))?.add(&f.bracket(&g, &v)?.scale(&s))?;
        Ok(agree(&lhs, &rhs))
    }),
    ("bracket_is_antisymmetric", |rng| {
        let Triple { v, f: (f, df), g: (g, dg), .. } = triple(rng);
        let rhs = g.bracket(&f, &v)?.scale(&-degree_sign((df + 1) * (dg + 1)));
        Ok(agree(&f.bracket(&g, &v)?, &rhs))
    }),
    ("bracket_is_a_derivation", |rng| {
        let Triple { v, f: (f, df), g: (g, dg), h: (h, _) } = triple(rng);
        let lhs = f.bracket(&g.mul(&h)?, &v)?;
        let rhs = f.bracket(&g, &v)?.mul(&h)?.add(&g.mul(&f.bracket(&h, &v)?)?.scale(&degree_sign((df + 1) * dg)))?;
        Ok(agree(&lhs, &rhs))
    }),
    ("bracket_jacobi", |rng| {
        let Triple { v, f: (f, df), g: (g, dg), h: (h, _) } = triple(rng);
        let lhs = f.bracket(&g.bracket(&h, &v)?, &v)?;
        let rhs = f.bracket(&g, &v)?.bracket(&h, &v)?.add(&g.bracket(&f.bracket(&h, &v)?, &v)?.scale(&degree_sign((df + 1) * (dg + 1))))?;
        Ok(agree(&lhs, &rhs))
    }),
    ("laplacian_derives_the_bracket", |rng| {
        let Triple { v, f: (f, df), g: (g, _), .. } = triple(rng);
        let lhs = f.bracket(&g, &v)?.laplacian(&v)?;
        let rhs = f.laplacian(&v)?.bracket(&g, &v)?.add(&f.bracket(&g.laplacian(&v)?, &v)?.scale(&degree_sign(df + 1)))?;
        Ok(agree(&lhs, &rhs))
    }),
    ("operators_follow_coordinate_changes", |rng| {
        let Triple { v, f: (f, _), g: (g, _), .. } = triple(rng);
        let m = random::automorphism(rng, v.space());
        let moved = OddSympSpace::new(v.space().clone(), m.transpose().mul(v.omega()).mul(&m))?;
        let pull = |x: &FormalFunction| x.substitute(&m, v.space());
        let laplacian_ok = pull(&f.laplacian(&v)?)?.agrees_with(&pull(&f)?.laplacian(&moved)?);
        let bracket_ok = pull(&f.bracket(&g, &v)?)?.agrees_with(&pull(&f)?.bracket(&pull(&g)?, &moved)?);
        Ok(expect(laplacian_ok && bracket_ok, || format!("{} ; {}", json(&f), json(&g))))
    }),
    ("log_inverts_exp", |rng| {
        let Triple { f: (f, _), .. } = triple(rng);
        let f = f.filter(|m| m.weight() >= 1 && m.degree(f.space()) % 2 == 0);
        Ok(agree(&f.exp()?.log()?, &f))
    }),
];

/// Every perfect matching of `0..n`, each pair `(a, b)` with `a < b`.
fn matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for partner in 1..n {
        let rest: Vec<usize> = (1..n).filter(|&x| x != partner).collect();
        for m in matchings(n - 2) {
            let mut full = vec![(0, partner)];
            full.extend(m.into_iter().map(|(a, b)| (rest[a], rest[b])));
            out.push(full);
        }
    }
    out
}

/// Sign of reordering `order` into the sequence of positions given, counting
/// only inversions between odd entries.
fn reorder_sign(order: &[usize], odd: &[bool]) -> Scalar {
    let mut inversions = 0;
    for (i, &a) in order.iter().enumerate() {
        for &b in &order[i + 1..] {
            if a > b && odd[a] && odd[b] {
                inversions += 1;
            }
        }
    }
    sign(inversions % 2 == 1)
}

/// Gaussian moment by brute force over perfect matchings.
pub fn wick_by_matchings(indices: &[usize], odd: &[bool], propagator: &Mat) -> Scalar {
    if indices.len() % 2 == 1 {
        return Scalar::from_integer(0.into());
    }
    let parity: Vec<bool> = indices.iter().map(|&i| odd[i]).collect();
    matchings(indices.len())
        .into_iter()
        .map(|m| {
            let order: Vec<usize> = m.iter().flat_map(|&(a, b)| [a, b]).collect();
            m.iter().fold(reorder_sign(&order, &parity), |acc, &(a, b)| acc * &propagator[(indices[a], indices[b])])
        })
        .sum()
}

fn graded_symmetric(rng: &mut TestRng, odd: &[bool]) -> Mat {
    let n = odd.len();
    let mut g = Mat::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            if odd[a] != odd[b] || (a == b && odd[a]) {
                continue;
            }
            let x = random::small_scalar(rng, 3);
            g[(b, a)] = if odd[a] { -x.clone() } else { x.clone() };
            g[(a, b)] = x;
        }
    }
    g
}

fn reduction_along(v: &OddSympSpace, i: &Subspace) -> Result<Relation> {
    Ok(v.reduce(&v.complement(i)?)?.relation())
}

struct Sample {
    dg: DgOddSympSpace,
    l: Relation,
    f: FormalFunction,
}

fn sample(rng: &mut TestRng, degree: i64) -> Result<Sample> {
    let dg = random::dg_space(rng, 3, false);
    let i = random::nondegenerate_isotrope(rng, &dg, 1)?;
    let l = reduction_along(dg.base(), &i)?;
    let f = random::function(rng, dg.space(), degree, W, 0.15);
    Ok(Sample { dg, l, f })
}

fn embed(f: &FormalFunction, product: &GradedSpace, offset: usize) -> Result<FormalFunction> {
    let mut m = Mat::zeros(f.space().dim(), product.dim());
    for i in 0..f.space().dim() {
        m[(i, offset + i)] = one();
    }
    f.substitute(&m, product)
}

const INTEGRAL: &[(&str, Check)] = &[
    ("wick_matches_matchings", |rng| {
        let odd: Vec<bool> = (0..3).map(|_| rng.gen_bool(0.5)).collect();
        let g = graded_symmetric(rng, &odd);
        let len = rng.gen_range(0..=6);
        let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..3)).collect();
        Ok(expect(wick_sum(&word, &odd, &g) == wick_by_matchings(&word, &odd, &g), || format!("{word:?} {odd:?}")))
    }),
    ("perturbation_matches_wick", |rng| {
        let s = sample(rng, 0)?;
        let wick = fiber_integral(&s.dg, &s.f, &LinHalfDensity::standard(s.dg.space()), &s.l)?.function;
        Ok(agree(&hpl_projection(&s.dg, &s.f, &s.l)?, &wick))
    }),
    ("fiber_integral_is_a_chain_map", |rng| {
        let s = sample(rng, -1)?;
        let rho = LinHalfDensity::standard(s.dg.space());
        let pushed = fiber_integral(&s.dg, &s.f, &rho, &s.l)?;
        let lhs = fiber_integral(&s.dg, &s.dg.bv_differential(&s.f)?, &rho, &s.l)?.function;
        Ok(agree(&lhs, &pushed.transferred.bv_differential(&pushed.function)?))
    }),
    ("stokes", |rng| {
        let dg = random::dg_space(rng, 4, true);
        let Some(l) = random::nondegenerate_lagrangian(rng, &dg)? else { return Ok(Outcome::Skip) };
        let f = random::function(rng, dg.space(), -1, W, 0.2);
        let value = bv_integral_lagrangian(&dg, &dg.bv_differential(&f)?, &LinHalfDensity::standard(dg.space()), &l)?;
        Ok(expect(value.series.is_zero(), || json(&f)))
    }),
    ("schwinger_dyson", |rng| {
        let dg = random::dg_space(rng, 4, true);
        let Some(l) = random::nondegenerate_lagrangian(rng, &dg)? else { return Ok(Outcome::Skip) };
        let ann = l.annihilator();
        let k = rng.gen_range(0..ann.dim());
        let c = &ann.basis()[k];
        let support = c.iter().position(|x| *x != Scalar::from_integer(0.into())).expect("basis vectors are nonzero");
        let deg_beta = -dg.space().degree(support);
        let beta = FormalFunction::from_terms(dg.space(), c.iter().enumerate().map(|(i, x)| (Monomial::new(vec![i], 0), x.clone())), W);
        let deg_f = rng.gen_range(-1..=1);
        let f = random::function(rng, dg.space(), deg_f, W - 1, 0.2);
        let rho = LinHalfDensity::standard(dg.space());
        let s_free = dg.s_free(W);
        let lhs = bv_integral_lagrangian(&dg, &s_free.bracket(&beta, dg.base())?.mul(&f)?, &rho, &l)?;
        let rhs = bv_integral_lagrangian(&dg, &beta.bracket(&f, dg.base())?.times_hbar(1).scale(&-degree_sign(deg_beta)), &rho, &l)?;
        Ok(expect(lhs.series.agrees_with(&rhs.series), || format!("{} ; {}", json(&beta), json(&f))))
    }),
    ("fubini_on_products", |rng| {
        let (a, b) = (random::dg_space(rng, 2, true), random::dg_space(rng, 2, true));
        let (Some(la), Some(lb)) = (random::nondegenerate_lagrangian(rng, &a)?, random::nondegenerate_lagrangian(rng, &b)?) else {
            return Ok(Outcome::Skip);
        };
        let (fa, fb) = (random::function(rng, a.space(), 0, W, 0.2), random::function(rng, b.space(), 0, W, 0.2));
        let ab = a.product(&b);
        let pad = |x: &Vec<Scalar>, before: usize, after: usize| {
            let mut y = vec![Scalar::from_integer(0.into()); before];
            y.extend(x.iter().cloned());
            y.extend(std::iter::repeat_n(Scalar::from_integer(0.into()), after));
            y
        };
        let basis: Vec<Vec<Scalar>> = la.basis().iter().map(|x| pad(x, 0, b.dim())).chain(lb.basis().iter().map(|x| pad(x, a.dim(), 0))).collect();
        let lab = Subspace::span(ab.space(), &basis)?;
        let fab = embed(&fa, ab.space(), 0)?.mul(&embed(&fb, ab.space(), a.dim())?)?;
        let joint = bv_integral_lagrangian(&ab, &fab, &LinHalfDensity::standard(ab.space()), &lab)?;
        let ia = bv_integral_lagrangian(&a, &fa, &LinHalfDensity::standard(a.space()), &la)?;
        let ib = bv_integral_lagrangian(&b, &fb, &LinHalfDensity::standard(b.space()), &lb)?;
        let ok = joint.series.agrees_with(&ia.series.mul(&ib.series)?) && joint.prefactor == ia.prefactor.mul(&ib.prefactor);
        Ok(expect(ok, || format!("{} ; {}", json(&fa), json(&fb))))
    }),
    ("fubini_along_reductions", |rng| {
        let dg = random::dg_space(rng, 4, true);
        let i = random::nondegenerate_isotrope(rng, &dg, 1)?;
        let first = reduction_along(dg.base(), &i)?;
        let f = random::function(rng, dg.space(), 0, W, 0.15);
        let rho = LinHalfDensity::new(dg.space().clone(), Prefactor::sqrt_abs(&int(3)));
        let step = fiber_integral(&dg, &f, &rho, &first)?;
        let r = step.transferred.clone();
        let Some(l_r) = random::nondegenerate_lagrangian(rng, &r)? else { return Ok(Outcome::Skip) };
        let to_point = Relation::new(r.base().clone(), OddSympSpace::point(), Subspace::span(r.space(), l_r.basis())?)?;
        let two_steps = fiber_integral(&r, &step.function, &step.density, &to_point)?;
        let direct = fiber_integral(&dg, &f, &rho, &first.then(&to_point)?)?;
        let ok = two_steps.function.agrees_with(&direct.function) && two_steps.density.coefficient == direct.density.coefficient;
        Ok(expect(ok, || json(&f)))
    }),
    ("transferred_differential_two_ways", |rng| {
        let s = sample(rng, 0)?;
        let by_matrix = transferred_differential(&s.dg, &s.l)?;
        let ok = by_matrix == transferred_differential_via_relations(&s.dg, &s.l)? && by_matrix.mul(&by_matrix).is_zero();
        Ok(expect(ok, || json(&s.l)))
    }),
    ("decomposition_and_sdr", |rng| {
        let s = sample(rng, 0)?;
        let cd = s.dg.canonical_decompose(&s.l.kernel())?;
        let sdr = cd.sdr(&s.dg);
        let ok = cd.verify(&s.dg)?
            && sdr.identities_hold(s.dg.q())
            && sdr.symplectic_conditions_hold(s.dg.base(), &cd.reduced_space(s.dg.base())?)
            && sdr.isotrope(s.dg.space())? == s.l.kernel();
        Ok(expect(ok, || json(&s.l)))
    }),
    ("nondegeneracy_criteria_agree", |rng| {
        let dg = random::dg_space(rng, 3, false);
        let i = random::isotropic(rng, dg.base(), 2)?;
        let a = dg.is_nondegenerate(&i)?;
        let ok = a == dg.restricted_action_nondegenerate(&i)? && a == dg.meets_q_complement_trivially(&i)?;
        Ok(expect(ok, || json(&i)))
    }),
];

const QUANTUM: &[(&str, Check)] = &[
    ("master_equation_forms_agree", |rng| {
        let dg = random::dg_space(rng, 3, false);
        let s = random::quantum_linfty(rng, &dg, W)?;
        Ok(expect(s.qme_forms()? == [true; 3], || json(s.action())))
    }),
    ("transfer_preserves_master_equation", |rng| {
        let dg = random::dg_space(rng, 3, false);
        let s = random::quantum_linfty(rng, &dg, W)?;
        let l = reduction_along(s.space(), &random::nondegenerate_isotrope(rng, &dg, 1)?)?;
        let t = transfer(&s, &l)?;
        let h = transfer_hpl(&s, &l)?;
        let ok = t.action.check_qme()? && t.action.interaction().min_hbar_power().unwrap_or(0) >= 0 && h.action == t.action && h.vacuum == t.vacuum;
        Ok(expect(ok, || format!("{} along {}", json(s.action()), json(&l))))
    }),
    ("effective_actions_are_related", |rng| {
        let dg = random::dg_space(rng, 3, false);
        let s = random::quantum_linfty(rng, &dg, W)?;
        let l = reduction_along(s.space(), &random::nondegenerate_isotrope(rng, &dg, 1)?)?;
        let cert = check_relation(&s, &effective_action(&s, &l)?, &l)?;
        Ok(expect(cert.holds(), || format!("{} along {}", json(s.action()), json(&l))))
    }),
    ("composed_certificates_reverify", |rng| {
        let acyclic = rng.gen_bool(0.7);
        let dg = random::dg_space(rng, 4, acyclic);
        let s = random::quantum_linfty(rng, &dg, W)?;
        let l1 = reduction_along(s.space(), &random::nondegenerate_isotrope(rng, &dg, 1)?)?;
        let s1 = effective_action(&s, &l1)?;
        let j = random::nondegenerate_isotrope(rng, s1.dg(), 1)?;
        if j.is_zero() {
            return Ok(Outcome::Skip);
        }
        let l2 = reduction_along(s1.space(), &j)?;
        let s2 = effective_action(&s1, &l2)?;
        let composed = compose_relations(&check_relation(&s, &s1, &l1)?, &check_relation(&s1, &s2, &l2)?)?;
        let ok = composed.holds() && check_relation(&s, &s2, &composed.relation)?.holds();
        Ok(expect(ok, || format!("{} along {} then {}", json(s.action()), json(&l1), json(&l2))))
    }),
    ("quantum_states_are_closed", |rng| {
        let dg = random::dg_space(rng, 3, false);
        let s = random::quantum_linfty(rng, &dg, W)?;
        let g = GeneralizedLagrangian::from_linfty(&s, &LinHalfDensity::standard(s.space().space()))?;
        Ok(expect(g.delta()?.function().is_zero(), || json(s.action())))
    }),
];
