//! Seeded generators for property tests and the `verify` suites.
//!
//! Every space is a shifted cotangent `T*[1]W` with `W` concentrated in
//! degrees −1, 0 and 1; differentials are cotangent lifts of a random
//! conjugate of a standard square-zero map on `W`.

use crate::error::Result;
use crate::formal::{FormalFunction, Monomial};
use crate::graded::{GradedSpace, Subspace};
use crate::integral::DgOddSympSpace;
use crate::quantum::QuantumLInfty;
use crate::matrix::Mat;
use crate::scalar::{int, one, sign, zero, Scalar};
use crate::symplectic::OddSympSpace;
use std::collections::BTreeMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_scalar(rng: &mut TestRng, bound: i64) -> Scalar {
    int(rng.gen_range(-bound..=bound))
}

fn nonzero_scalar(rng: &mut TestRng, bound: i64) -> Scalar {
    let x = rng.gen_range(1..=bound);
    int(if rng.gen_bool(0.5) { x } else { -x })
}

/// `W` with `1..=max_dim` generators in degrees −1, 0, 1.
pub fn base_space(rng: &mut TestRng, max_dim: usize) -> GradedSpace {
    let dim = rng.gen_range(1..=max_dim.max(1));
    let mut degrees: Vec<i64> = (0..dim).map(|_| rng.gen_range(-1..=1)).collect();
    degrees.sort_unstable();
    GradedSpace::new(degrees)
}

/// A random odd symplectic space `T*[1]W`.
pub fn symplectic_space(rng: &mut TestRng, max_base_dim: usize) -> OddSympSpace {
    OddSympSpace::shifted_cotangent(&base_space(rng, max_base_dim))
}

/// Degree-preserving invertible matrix on `W`: unipotent blocks with a
/// random permutation and diagonal.
pub fn automorphism(rng: &mut TestRng, w: &GradedSpace) -> Mat {
    let n = w.dim();
    let mut a = Mat::identity(n);
    for d in w.distinct_degrees() {
        let mut idx = w.indices_of_degree(d);
        let original = idx.clone();
        idx.shuffle(rng);
        let mut block = Mat::zeros(n, n);
        for (&i, &j) in original.iter().zip(&idx) {
            block[(i, j)] = nonzero_scalar(rng, 2);
        }
        for &i in &original {
            for &j in &original {
                if i < j {
                    let x = small_scalar(rng, 1);
                    let mut u = Mat::identity(n);
                    u[(i, j)] = x;
                    block = u.mul(&block);
                }
            }
        }
        for &i in &original {
            for &j in &original {
                a[(i, j)] = block[(i, j)].clone();
            }
        }
    }
    a
}

/// Square-zero degree-one map on `W`. With `acyclic`, every generator of a
/// pairable degree is paired when possible.
pub fn base_differential(rng: &mut TestRng, w: &GradedSpace, acyclic: bool) -> Mat {
    let n = w.dim();
    let mut d0 = Mat::zeros(n, n);
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] {
            continue;
        }
        let partners: Vec<usize> = (0..n).filter(|&j| !used[j] && j != i && w.degree(j) == w.degree(i) + 1).collect();
        if let Some(&j) = partners.first() {
            if acyclic || rng.gen_bool(0.6) {
                d0[(j, i)] = one();
                used[i] = true;
                used[j] = true;
            }
        }
    }
    let p = automorphism(rng, w);
    p.mul(&d0).mul(&p.inverse().expect("automorphism is invertible"))
}

/// The cotangent lift of `δ` to `T*[1]W`, fibres first.
pub fn cotangent_differential(w: &GradedSpace, delta: &Mat) -> Mat {
    let k = w.dim();
    let mut q = Mat::zeros(2 * k, 2 * k);
    for a in 0..k {
        for b in 0..k {
            q[(k + b, k + a)] = delta[(b, a)].clone();
            q[(b, a)] = &delta[(a, b)] * sign(w.degree(a).rem_euclid(2) == 1);
        }
    }
    q
}

/// With `acyclic`, `W` is built from pairs of adjacent degrees so that `δ`
/// can kill all cohomology.
pub fn dg_space(rng: &mut TestRng, max_base_dim: usize, acyclic: bool) -> DgOddSympSpace {
    let w = if acyclic {
        let pairs = rng.gen_range(1..=(max_base_dim / 2).max(1));
        let mut degrees: Vec<i64> = (0..pairs).flat_map(|_| {
            let d = rng.gen_range(-1..=0);
            [d, d + 1]
        }).collect();
        degrees.sort_unstable();
        GradedSpace::new(degrees)
    } else {
        base_space(rng, max_base_dim)
    };
    let delta = base_differential(rng, &w, acyclic);
    let v = OddSympSpace::shifted_cotangent(&w);
    DgOddSympSpace::from_differential(&v, &cotangent_differential(&w, &delta)).expect("cotangent lifts are compatible")
}

/// A random vector of `Y` outside `X` that is homogeneous, if any.
fn fresh_vector(rng: &mut TestRng, y: &Subspace, x: &Subspace) -> Option<Vec<Scalar>> {
    let mut degrees: Vec<i64> = y.basis_degrees();
    degrees.sort_unstable();
    degrees.dedup();
    degrees.retain(|&d| y.vectors_of_degree(d).len() > x.vectors_of_degree(d).len());
    let d = *degrees.choose(rng)?;
    let candidates = y.vectors_of_degree(d);
    loop {
        let mut v = vec![zero(); y.ambient().dim()];
        for c in &candidates {
            let s = small_scalar(rng, 2);
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi += &s * ci;
            }
        }
        if !x.contains_vector(&v) {
            return Some(v);
        }
    }
}

/// Grows an isotropic subspace inside `within` by at most `steps` vectors.
pub fn isotropic_in(rng: &mut TestRng, v: &OddSympSpace, within: &Subspace, steps: usize) -> Result<Subspace> {
    let mut i = Subspace::zero(v.space());
    for _ in 0..steps {
        let room = v.complement(&i)?.intersect(within)?;
        match fresh_vector(rng, &room, &i) {
            Some(x) => i = i.sum(&Subspace::span(v.space(), &[x])?)?,
            None => break,
        }
    }
    Ok(i)
}

pub fn isotropic(rng: &mut TestRng, v: &OddSympSpace, steps: usize) -> Result<Subspace> {
    isotropic_in(rng, v, &Subspace::full(v.space()), steps)
}

pub fn lagrangian(rng: &mut TestRng, v: &OddSympSpace) -> Result<Subspace> {
    isotropic(rng, v, v.dim())
}

pub fn coisotropic(rng: &mut TestRng, v: &OddSympSpace) -> Result<Subspace> {
    let steps = rng.gen_range(0..=v.dim() / 2);
    v.complement(&isotropic(rng, v, steps)?)
}

/// A non-degenerate isotrope, by rejection; the zero subspace always qualifies.
pub fn nondegenerate_isotrope(rng: &mut TestRng, dg: &DgOddSympSpace, min_dim: usize) -> Result<Subspace> {
    if min_dim > dg.dim() / 2 {
        return Ok(Subspace::zero(dg.space()));
    }
    for _ in 0..200 {
        let steps = rng.gen_range(min_dim..=dg.dim() / 2);
        let i = isotropic(rng, dg.base(), steps)?;
        if i.dim() >= min_dim && dg.is_nondegenerate(&i)? {
            return Ok(i);
        }
    }
    Ok(Subspace::zero(dg.space()))
}

/// A non-degenerate Lagrangian, by rejection; needs an acyclic `Q`.
pub fn nondegenerate_lagrangian(rng: &mut TestRng, dg: &DgOddSympSpace) -> Result<Option<Subspace>> {
    for _ in 0..200 {
        let l = lagrangian(rng, dg.base())?;
        if dg.is_nondegenerate(&l)? {
            return Ok(Some(l));
        }
    }
    Ok(None)
}

/// Every sorted word of length `k` over `0..n`, odd letters not repeated.
pub fn words(space: &GradedSpace, k: usize) -> Vec<Vec<usize>> {
    fn go(space: &GradedSpace, start: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            out.push(prefix.clone());
            return;
        }
        for i in start..space.dim() {
            prefix.push(i);
            go(space, if space.is_odd(i) { i + 1 } else { i }, k - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(space, 0, k, &mut Vec::new(), &mut out);
    out
}

/// Monomials of cohomological degree `degree` and weight in `min_w..=max_w`.
pub fn monomials(space: &GradedSpace, degree: i64, min_w: i64, max_w: i64, max_hbar: i64) -> Vec<Monomial> {
    let mut out = Vec::new();
    for g in 0..=max_hbar {
        for k in 0..=(max_w - 2 * g).max(-1) {
            let w = 2 * g + k;
            if w < min_w || w > max_w {
                continue;
            }
            for word in words(space, k as usize) {
                let m = Monomial::new(word, g);
                if m.degree(space) == degree {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// A sparse random function of the given degree with terms of weight up to `w_max`.
pub fn function(rng: &mut TestRng, space: &GradedSpace, degree: i64, w_max: i64, density: f64) -> FormalFunction {
    let mut terms = Vec::new();
    for m in monomials(space, degree, 0, w_max, w_max / 2) {
        if rng.gen_bool(density) {
            terms.push((m, nonzero_scalar(rng, 3)));
        }
    }
    FormalFunction::from_terms(space, terms, w_max)
}

/// `S_w` with `(Q + ℏΔ) S_w = −½ Σ_{a+b=w+2} {S_a, S_b}`, plus a random
/// closed part; `None` when the right-hand side is obstructed.
fn solve_weight(rng: &mut TestRng, dg: &DgOddSympSpace, lower: &FormalFunction, w: i64) -> Result<Option<FormalFunction>> {
    let space = dg.space();
    let unknowns: Vec<Monomial> = monomials(space, 0, w, w, w / 2).into_iter().filter(|m| m.polynomial_degree() >= 1).collect();
    let equations: BTreeMap<Monomial, usize> = monomials(space, 1, w, w, w / 2).into_iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut a = Mat::zeros(equations.len(), unknowns.len());
    for (j, m) in unknowns.iter().enumerate() {
        let image = dg.bv_differential(&FormalFunction::from_terms(space, [(m.clone(), one())], w))?;
        for (t, c) in image.terms() {
            a[(equations[t], j)] = c.clone();
        }
    }
    let mut rhs = vec![zero(); equations.len()];
    for (t, c) in lower.bracket(lower, dg.base())?.terms() {
        if t.weight() == w {
            rhs[equations[t]] = -c / int(2);
        }
    }
    let Some(mut x) = a.solve(&rhs) else {
        return Ok(None);
    };
    for k in a.kernel() {
        if rng.gen_bool(0.5) {
            let c = small_scalar(rng, 2);
            for (xi, ki) in x.iter_mut().zip(&k) {
                *xi += &c * ki;
            }
        }
    }
    let terms: Vec<_> = unknowns.into_iter().zip(x).collect();
    Ok(Some(FormalFunction::from_terms(space, terms, w)))
}

/// A quantum L∞ algebra built order by order up to weight `w_max`; the
/// interaction is nonzero whenever some attempt finds unobstructed data.
pub fn quantum_linfty(rng: &mut TestRng, dg: &DgOddSympSpace, w_max: i64) -> Result<QuantumLInfty> {
    let mut best = FormalFunction::zero(dg.space(), w_max);
    for _ in 0..8 {
        let mut s_int = FormalFunction::zero(dg.space(), w_max);
        let mut complete = true;
        for w in 3..=w_max {
            match solve_weight(rng, dg, &s_int, w)? {
                Some(s_w) => s_int = s_int.add(&FormalFunction::from_terms(dg.space(), s_w.terms().map(|(m, c)| (m.clone(), c.clone())), w_max))?,
                None => {
                    complete = false;
                    break;
                }
            }
        }
        if complete {
            best = s_int;
            if !best.is_zero() {
                break;
            }
        }
    }
    QuantumLInfty::new(dg.base(), dg.s_free(w_max).add(&best)?)
}
