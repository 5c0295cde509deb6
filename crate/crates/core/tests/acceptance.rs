//! Acceptance criteria, one PASS/FAIL line each. Every comparison is exact
//! rational equality; series are compared termwise up to their truncation.

#![allow(clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use oddsymp::cli::{self, Command, Overrides};
use oddsymp::density::{LinHalfDensity, Prefactor};
use oddsymp::error::{Error, Result};
use oddsymp::formal::{FormalFunction, Monomial};
use oddsymp::graded::{GradedSpace, Subspace};
use oddsymp::integral::{
    bv_integral_lagrangian, fiber_integral, hpl_projection, transferred_differential, transferred_differential_via_relations, wick_sum, DgOddSympSpace, FiberChart,
};
use oddsymp::matrix::Mat;
use oddsymp::quantum::{check_relation, compose_relations, effective_action, transfer, transfer_hpl, QuantumLInfty};
use oddsymp::random::{self, TestRng};
use oddsymp::scalar::{self, int, one, sign, zero, Scalar};
use oddsymp::symplectic::{decompose_coisotrope, factor_through, factorize, orthogonal_span, pushout_span, span_cospan, square_commutes, OddSympSpace, Relation};
use rand::Rng;
use serde_json::json;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

type Verdict = std::result::Result<String, String>;

fn ensure(ok: bool, detail: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(detail())
    }
}

fn lib<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| format!("unexpected error: {e}"))
}

fn text<T: serde::Serialize>(x: &T) -> String {
    serde_json::to_string(x).unwrap_or_default()
}

fn reduction_along(v: &OddSympSpace, i: &Subspace) -> Result<Relation> {
    Ok(v.reduce(&v.complement(i)?)?.relation())
}

fn parity_sign(d: i64) -> Scalar {
    sign(d.rem_euclid(2) == 1)
}

// ---------------------------------------------------------------------------
// Independent oracles.

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Determinant by the Leibniz expansion.
fn leibniz_det(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    permutations(n)
        .into_iter()
        .map(|p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            (0..n).fold(sign(inversions % 2 == 1), |acc, i| acc * &m[i][p[i]])
        })
        .sum()
}

/// Gaussian moment as a sum over position permutations that list pairs in
/// canonical order; the sign comes from physically bubble-sorting the
/// graded word into that order.
fn moment_by_reordering(word: &[usize], odd: &[bool], g: &[Vec<Scalar>]) -> Scalar {
    let n = word.len();
    if n % 2 == 1 {
        return zero();
    }
    let mut total = zero();
    for p in permutations(n) {
        let canonical = (0..n / 2).all(|k| p[2 * k] < p[2 * k + 1]) && (1..n / 2).all(|k| p[2 * k - 2] < p[2 * k]);
        if !canonical {
            continue;
        }
        let mut current: Vec<usize> = (0..n).collect();
        let mut negative = false;
        for (slot, &want) in p.iter().enumerate() {
            let mut at = current.iter().position(|&x| x == want).expect("present");
            while at > slot {
                if odd[word[current[at]]] && odd[word[current[at - 1]]] {
                    negative = !negative;
                }
                current.swap(at, at - 1);
                at -= 1;
            }
        }
        let product = (0..n / 2).fold(one(), |acc, k| acc * &g[word[p[2 * k]]][word[p[2 * k + 1]]]);
        total += if negative { -product } else { product };
    }
    total
}

/// Sorted words of length `k` over `odd.len()` letters, odd letters at most once.
fn graded_words(odd: &[bool], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for w in graded_words(odd, k - 1) {
        let start = w.last().map_or(0, |&l| if odd[l] { l + 1 } else { l });
        for a in start..odd.len() {
            let mut x = w.clone();
            x.push(a);
            out.push(x);
        }
    }
    out
}

fn small_rational(rng: &mut TestRng) -> Scalar {
    Scalar::new(rng.gen_range(-4..=4).into(), rng.gen_range(1..=3).into())
}

// ---------------------------------------------------------------------------

fn integrate_via_cli(problem: serde_json::Value) -> std::result::Result<(Prefactor, FormalFunction), String> {
    let report = cli::execute(Command::Integrate, &problem.to_string(), &Overrides { max_weight: Some(4) });
    if report.exit != 0 {
        return Err(format!("integrate exited {}: {}", report.exit, report.body));
    }
    let result = &report.body["result"];
    let prefactor = serde_json::from_value(result["prefactor"].clone()).map_err(|e| e.to_string())?;
    let series = serde_json::from_value(result["series"].clone()).map_err(|e| e.to_string())?;
    Ok((prefactor, series))
}

fn gaussian_normalization() -> Verdict {
    let mut rng = random::rng(101);
    let mut cases = 0;
    for k in 1..=3usize {
        let mut found = 0;
        while found < 12 {
            let mut s = vec![vec![zero(); k]; k];
            for i in 0..k {
                for j in i..k {
                    let x = small_rational(&mut rng);
                    s[i][j] = x.clone();
                    s[j][i] = x;
                }
            }
            let det = leibniz_det(&s);
            if det.is_zero() {
                continue;
            }
            found += 1;
            let mut terms = Vec::new();
            for i in 0..k {
                for j in i..k {
                    let c = if i == j { &s[i][i] / int(2) } else { s[i][j].clone() };
                    terms.push(json!({ "indices": [k + i, k + j], "g": 0, "coeff": scalar::format(&c) }));
                }
            }
            let degrees: Vec<i64> = std::iter::repeat_n(1, k).chain(std::iter::repeat_n(0, k)).collect();
            let basis: Vec<Vec<String>> = (0..k).map(|i| (0..2 * k).map(|j| if j == k + i { "1" } else { "0" }.to_string()).collect()).collect();
            let problem = json!({
                "space": { "cotangent_of": vec![0; k] },
                "s_free": { "space": { "degrees": degrees }, "terms": terms, "w_max": 4 },
                "lagrangian": basis,
            });
            let (prefactor, series) = integrate_via_cli(problem)?;
            // |det(s/2πℏ)|^{−1/2} = |det s|^{−1/2} (2π)^{k/2} ℏ^{k/2}.
            let expected = Prefactor::sqrt_abs(&(one() / &det)).mul(&Prefactor::powers(k as i64, k as i64));
            ensure(prefactor == expected, || format!("even k={k}, s={s:?}: got {prefactor:?}, expected {expected:?}"))?;
            ensure(series == FormalFunction::one(&GradedSpace::point(), 4), || format!("even k={k}: series {}", text(&series)))?;
            cases += 1;
        }
    }
    for n in 1..=3usize {
        let mut found = 0;
        while found < 12 {
            let w: Vec<Vec<Scalar>> = (0..n).map(|_| (0..n).map(|_| small_rational(&mut rng)).collect()).collect();
            let det = leibniz_det(&w);
            if det.is_zero() {
                continue;
            }
            found += 1;
            // Base η (degree −1) at 2n.., ξ (degree 1) at 3n..; S = w_ij η^i ξ^j.
            let mut terms = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if !w[i][j].is_zero() {
                        terms.push(json!({ "indices": [2 * n + i, 3 * n + j], "g": 0, "coeff": scalar::format(&w[i][j]) }));
                    }
                }
            }
            let base: Vec<i64> = std::iter::repeat_n(-1, n).chain(std::iter::repeat_n(1, n)).collect();
            let degrees: Vec<i64> = base.iter().map(|d| 1 - d).chain(base.iter().copied()).collect();
            let basis: Vec<Vec<String>> = (0..2 * n).map(|i| (0..4 * n).map(|j| if j == 2 * n + i { "1" } else { "0" }.to_string()).collect()).collect();
            let problem = json!({
                "space": { "cotangent_of": base },
                "s_free": { "space": { "degrees": degrees }, "terms": terms, "w_max": 4 },
                "lagrangian": basis,
            });
            let (prefactor, series) = integrate_via_cli(problem)?;
            // |det(w/ℏ)| = |det w| ℏ^{−n}.
            let expected = Prefactor::new(det.abs(), BigInt::from(1), 0, -2 * n as i64).map_err(|e| e.to_string())?;
            ensure(prefactor == expected, || format!("odd n={n}, w={w:?}: got {prefactor:?}, expected {expected:?}"))?;
            ensure(series == FormalFunction::one(&GradedSpace::point(), 4), || format!("odd n={n}: series {}", text(&series)))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} Gaussians through `integrate`, even k ≤ 3 and odd pairs ≤ 3"))
}

fn wick_oracle() -> Verdict {
    let mut rng = random::rng(202);
    let mut compared = 0;
    for pattern in 0..8u32 {
        let odd: Vec<bool> = (0..3).map(|i| pattern >> i & 1 == 1).collect();
        for graded in [true, false] {
            // Graded-symmetric propagators, then unconstrained ones to stress the signs.
            let mut g = vec![vec![zero(); 3]; 3];
            for a in 0..3 {
                for b in 0..3 {
                    g[a][b] = random::small_scalar(&mut rng, 5);
                }
            }
            if graded {
                for a in 0..3 {
                    for b in a..3 {
                        if odd[a] != odd[b] {
                            g[a][b] = zero();
                            g[b][a] = zero();
                        } else if odd[a] {
                            g[b][a] = -g[a][b].clone();
                        } else {
                            g[b][a] = g[a][b].clone();
                        }
                    }
                }
            }
            let gm = Mat::from_rows(&g, 3);
            for k in 0..=6 {
                for word in graded_words(&odd, k) {
                    let lib = wick_sum(&word, &odd, &gm);
                    let oracle = moment_by_reordering(&word, &odd, &g);
                    ensure(lib == oracle, || format!("word {word:?}, parities {odd:?}: {lib} vs {oracle}"))?;
                    compared += 1;
                }
            }
        }
    }
    Ok(format!("{compared} monomials of length ≤ 6 over every parity pattern of a 3-dimensional L"))
}

/// A random dg space with a non-degenerate reduction, redrawn until the
/// isotrope is nonzero.
fn reducible(rng: &mut TestRng, max_base_dim: usize, p_acyclic: f64) -> Result<(DgOddSympSpace, Relation)> {
    loop {
        let acyclic = rng.gen_bool(p_acyclic);
        let dg = random::dg_space(rng, max_base_dim, acyclic);
        let i = random::nondegenerate_isotrope(rng, &dg, 1)?;
        if !i.is_zero() {
            let l = reduction_along(dg.base(), &i)?;
            return Ok((dg, l));
        }
    }
}

fn hpl_equals_wick() -> Verdict {
    const W: i64 = 6;
    let mut instances = 0;
    for seed in 0..110u64 {
        let mut rng = random::rng(300_000 + seed);
        let (dg, l) = lib(reducible(&mut rng, 3, 0.3))?;
        let degree = rng.gen_range(-1..=1);
        let f = random::function(&mut rng, dg.space(), degree, W, 0.08);
        let wick = lib(fiber_integral(&dg, &f, &LinHalfDensity::standard(dg.space()), &l))?.function;
        let hpl = lib(hpl_projection(&dg, &f, &l))?;
        ensure(hpl.agrees_with(&wick) && hpl.w_max() == W, || format!("seed {seed}: {} along {}", text(&f), text(&l)))?;
        instances += 1;
    }
    ensure(instances >= 100, || format!("only {instances} non-degenerate reductions sampled"))?;
    Ok(format!("{instances} random reductions of spaces of dim ≤ 6, f of weight ≤ 6"))
}

fn stokes_schwinger_dyson_fubini() -> Verdict {
    const W: i64 = 5;
    let (mut stokes, mut sd, mut fubini) = (0, 0, 0);
    for seed in 0..40u64 {
        let mut rng = random::rng(400_000 + seed);
        let dg = random::dg_space(&mut rng, 4, true);
        let Some(l) = lib(random::nondegenerate_lagrangian(&mut rng, &dg))? else { continue };
        let rho = LinHalfDensity::new(dg.space().clone(), Prefactor::sqrt_abs(&int(rng.gen_range(1..10))));

        // ∫_L (Q + ℏΔ) f ρ = 0.
        let f = random::function(&mut rng, dg.space(), -1, W, 0.15);
        let value = lib(bv_integral_lagrangian(&dg, &lib(dg.bv_differential(&f))?, &rho, &l))?;
        ensure(value.series.is_zero(), || format!("Stokes, seed {seed}: {}", text(&f)))?;
        stokes += 1;

        // ∫ {S, β} f = −(−1)^{|β|} ℏ ∫ {β, f} for linear β vanishing on L.
        let ann = l.annihilator();
        let c = &ann.basis()[rng.gen_range(0..ann.dim())];
        let support = c.iter().position(|x| !x.is_zero()).expect("basis vectors are nonzero");
        let deg_beta = -dg.space().degree(support);
        let beta = FormalFunction::from_terms(dg.space(), c.iter().enumerate().map(|(i, x)| (Monomial::new(vec![i], 0), x.clone())), W);
        let deg_f = rng.gen_range(-1..=1);
        let g = random::function(&mut rng, dg.space(), deg_f, W - 1, 0.15);
        let lhs = lib(bv_integral_lagrangian(&dg, &lib(lib(dg.s_free(W).bracket(&beta, dg.base()))?.mul(&g))?, &rho, &l))?;
        let rhs_f = lib(beta.bracket(&g, dg.base()))?.times_hbar(1).scale(&-parity_sign(deg_beta));
        let rhs = lib(bv_integral_lagrangian(&dg, &rhs_f, &rho, &l))?;
        ensure(lhs.series.agrees_with(&rhs.series) && (lhs.series.is_zero() || lhs.prefactor == rhs.prefactor), || {
            format!("Schwinger–Dyson, seed {seed}: β = {}, f = {}", text(&beta), text(&g))
        })?;
        sd += 1;

        // Integrating in two stages equals integrating at once.
        let i = lib(random::nondegenerate_isotrope(&mut rng, &dg, 1))?;
        let first = lib(reduction_along(dg.base(), &i))?;
        let h = random::function(&mut rng, dg.space(), 0, W, 0.12);
        let step = lib(fiber_integral(&dg, &h, &rho, &first))?;
        let r = step.transferred.clone();
        let Some(l_r) = lib(random::nondegenerate_lagrangian(&mut rng, &r))? else { continue };
        let to_point = lib(Relation::new(r.base().clone(), OddSympSpace::point(), lib(Subspace::span(r.space(), l_r.basis()))?))?;
        let staged = lib(fiber_integral(&r, &step.function, &step.density, &to_point))?;
        let direct = lib(fiber_integral(&dg, &h, &rho, &lib(first.then(&to_point))?))?;
        ensure(staged.function.agrees_with(&direct.function) && staged.density.coefficient == direct.density.coefficient, || {
            format!("Fubini, seed {seed}: {} along {}", text(&h), text(&first))
        })?;
        fubini += 1;
    }
    ensure(stokes >= 20 && sd >= 20 && fubini >= 15, || format!("too few samples: {stokes}/{sd}/{fubini}"))?;
    Ok(format!("Stokes on {stokes}, Schwinger–Dyson on {sd}, Fubini on {fubini} seeded instances"))
}

fn bv_algebra_laws() -> Verdict {
    const W: i64 = 5;
    let mut instances = 0;
    for seed in 0..200u64 {
        let mut rng = random::rng(500_000 + seed);
        let v = random::symplectic_space(&mut rng, if seed % 3 == 0 { 3 } else { 2 });
        let density = if v.dim() > 4 { 0.04 } else { 0.25 };
        let mut draw = || {
            let d = rng.gen_range(-1..=1);
            (random::function(&mut rng, v.space(), d, W, density), d)
        };
        let ((f, df), (g, dg), (h, _)) = (draw(), draw(), draw());
        let lap = |x: &FormalFunction| lib(x.laplacian(&v));
        let br = |x: &FormalFunction, y: &FormalFunction| lib(x.bracket(y, &v));
        let mul = |x: &FormalFunction, y: &FormalFunction| lib(x.mul(y));
        let add = |x: &FormalFunction, y: &FormalFunction| lib(x.add(y));
        let detail = || format!("seed {seed}: f = {}, g = {}, h = {}", text(&f), text(&g), text(&h));

        ensure(lap(&lap(&f)?)?.is_zero(), || format!("Δ² ≠ 0, {}", detail()))?;
        let sf = parity_sign(df);
        let lhs = lap(&mul(&f, &g)?)?;
        let rhs = add(&add(&mul(&lap(&f)?, &g)?, &mul(&f, &lap(&g)?)?.scale(&sf))?, &br(&f, &g)?.scale(&sf))?;
        ensure(lhs.agrees_with(&rhs), || format!("Δ(fg), {}", detail()))?;
        let anti = br(&g, &f)?.scale(&-parity_sign((df + 1) * (dg + 1)));
        ensure(br(&f, &g)?.agrees_with(&anti), || format!("antisymmetry, {}", detail()))?;
        let lhs = br(&f, &mul(&g, &h)?)?;
        let rhs = add(&mul(&br(&f, &g)?, &h)?, &mul(&g, &br(&f, &h)?)?.scale(&parity_sign((df + 1) * dg)))?;
        ensure(lhs.agrees_with(&rhs), || format!("Leibniz, {}", detail()))?;
        let lhs = br(&f, &br(&g, &h)?)?;
        let rhs = add(&br(&br(&f, &g)?, &h)?, &br(&g, &br(&f, &h)?)?.scale(&parity_sign((df + 1) * (dg + 1))))?;
        ensure(lhs.agrees_with(&rhs), || format!("Jacobi, {}", detail()))?;
        let lhs = lap(&br(&f, &g)?)?;
        let rhs = add(&br(&lap(&f)?, &g)?, &br(&f, &lap(&g)?)?.scale(&parity_sign(df + 1)))?;
        ensure(lhs.agrees_with(&rhs), || format!("Δ derives the bracket, {}", detail()))?;
        instances += 1;
    }
    Ok(format!("Δ², Δ(fg), antisymmetry, Leibniz, Jacobi and Δ{{,}} on {instances} random triples of weight ≤ {W}"))
}

fn random_relation(rng: &mut TestRng) -> Result<Relation> {
    let u = random::symplectic_space(rng, 2);
    let v = random::symplectic_space(rng, 2);
    let graph = random::lagrangian(rng, &u.flip().product(&v))?;
    Relation::new(u, v, graph)
}

fn random_reduction(rng: &mut TestRng, v: &OddSympSpace) -> Result<Relation> {
    Ok(v.reduce(&random::coisotropic(rng, v)?)?.relation())
}

fn relation_calculus() -> Verdict {
    const N: u64 = 220;
    for seed in 0..N {
        let mut rng = random::rng(600_000 + seed);
        let l = lib(random_relation(&mut rng))?;
        let cospan = lib(factorize(&l))?;
        let legs = lib(cospan.left.is_reduction())? && lib(cospan.right.is_reduction())?;
        ensure(legs && lib(cospan.recompose())? == l, || format!("recomposition, seed {seed}: {}", text(&l)))?;
        let image_complement = lib(l.target().complement(&l.image()))?;
        ensure(l.transpose().kernel() == image_complement, || format!("ker Lᵀ ≠ (im L)^ω, seed {seed}: {}", text(&l)))?;
        let v = random::symplectic_space(&mut rng, 3);
        let red = lib(random_reduction(&mut rng, &v))?;
        ensure(lib(red.transpose().then(&red))? == Relation::identity(red.target()), || format!("L∘Lᵀ ≠ 1, seed {seed}: {}", text(&red)))?;
    }
    Ok(format!("{N} Lagrangian relations recomposed with ker(Lᵀ) = im(L)^ω; {N} reductions split"))
}

/// A reduction of `v` whose coisotrope lies in `c`: the complement of a
/// random isotrope grown from `c^ω`.
fn reduction_inside(rng: &mut TestRng, v: &OddSympSpace, c: &Subspace) -> Result<Relation> {
    let mut iso = v.complement(c)?;
    for _ in 0..rng.gen_range(0..=2) {
        let room = v.complement(&iso)?;
        let candidates: Vec<Vec<Scalar>> = room.basis().iter().filter(|x| !iso.contains_vector(x)).cloned().collect();
        if candidates.is_empty() {
            break;
        }
        let pick = candidates[rng.gen_range(0..candidates.len())].clone();
        iso = iso.sum(&Subspace::span(v.space(), &[pick])?)?;
    }
    reduction_along(v, &iso)
}

fn pushout_of_orthogonal_spans() -> Verdict {
    let (mut orthogonal, mut skew, mut cones) = (0, 0, 0);
    for seed in 0..200u64 {
        let mut rng = random::rng(700_000 + seed);
        let v = random::symplectic_space(&mut rng, 3);
        let (l, lt) = (lib(random_reduction(&mut rng, &v))?, lib(random_reduction(&mut rng, &v))?);
        // Orthogonality decided independently of the library: ω(ker L, ker L̃) = 0.
        let orth = l.kernel().basis().iter().all(|a| lt.kernel().basis().iter().all(|b| v.pair(a, b).is_zero()));
        ensure(lib(orthogonal_span(&l, &lt))? == orth, || format!("orthogonality, seed {seed}"))?;
        let commutes = lib(square_commutes(&l, &lt, &lib(span_cospan(&l, &lt))?))?;
        ensure(commutes == orth, || format!("square commutes = {commutes} but orthogonal = {orth}, seed {seed}: {} ; {}", text(&l), text(&lt)))?;
        if !orth {
            ensure(pushout_span(&l, &lt).unwrap_err() == Error::NotOrthogonal, || format!("pushout accepted a skew span, seed {seed}"))?;
            skew += 1;
            continue;
        }
        orthogonal += 1;
        let p = lib(pushout_span(&l, &lt))?;
        let common = lib(l.transpose().image().intersect(&lt.transpose().image()))?;
        let c = lib(reduction_inside(&mut rng, &v, &common))?;
        let (a, b) = (lib(factor_through(&c, &l))?, lib(factor_through(&c, &lt))?);
        ensure(lib(l.then(&a))? == c && lib(lt.then(&b))? == c, || format!("cone does not commute, seed {seed}"))?;
        let u = lib(factor_through(&a, &p.left))?;
        ensure(lib(p.right.then(&u))? == b, || format!("mediating map misses the second leg, seed {seed}"))?;
        // Any u′ with left ∘ u′ = a equals leftᵀ then a, since left is split.
        ensure(lib(p.left.transpose().then(&p.left))? == Relation::identity(&p.middle), || format!("pushout leg not split, seed {seed}"))?;
        ensure(lib(p.left.transpose().then(&a))? == u, || format!("mediating map not unique, seed {seed}"))?;
        cones += 1;
    }
    ensure(orthogonal >= 20 && skew >= 20, || format!("unbalanced sample: {orthogonal} orthogonal, {skew} skew"))?;
    Ok(format!("{orthogonal} orthogonal spans commute and {skew} skew spans do not; {cones} cones factor uniquely"))
}

fn transfer_preserves_qme() -> Verdict {
    const W: i64 = 6;
    let (mut instances, mut interacting) = (0, 0);
    for seed in 0..30u64 {
        let mut rng = random::rng(800_000 + seed);
        let (dg, l) = lib(reducible(&mut rng, 3, 0.0))?;
        let s = lib(random::quantum_linfty(&mut rng, &dg, W))?;
        ensure(lib(s.check_qme())?, || format!("generated action fails the master equation, seed {seed}"))?;
        let t = lib(transfer(&s, &l))?;
        let qme = lib(t.action.check_qme())?;
        let regular = t.action.interaction().min_hbar_power().unwrap_or(0) >= 0;
        ensure(qme && regular && t.action.w_max() == W, || format!("seed {seed}: {} along {}", text(s.action()), text(&l)))?;
        let h = lib(transfer_hpl(&s, &l))?;
        ensure(h.action == t.action && h.vacuum == t.vacuum, || format!("Wick and perturbation transfers differ, seed {seed}"))?;
        instances += 1;
        interacting += usize::from(!s.interaction().is_zero());
    }
    ensure(instances == 30 && interacting >= 10, || format!("too few samples: {instances} ({interacting} interacting)"))?;
    Ok(format!("{instances} transfers up to weight {W} ({interacting} interacting) solve the master equation with ℏ-regular interactions"))
}

/// Two non-degenerate isotropes that each certify, but pair nontrivially.
fn skew_certificates() -> Result<Error> {
    const W: i64 = 4;
    let w = GradedSpace::new(vec![-1, 0, 0, 1]);
    let mut delta = Mat::zeros(4, 4);
    delta[(1, 0)] = one();
    delta[(3, 2)] = one();
    let v = OddSympSpace::shifted_cotangent(&w);
    let dg = DgOddSympSpace::from_differential(&v, &random::cotangent_differential(&w, &delta))?;
    let unit = |i: usize| v.space().unit(i);
    let sum: Vec<Scalar> = (0..8).map(|k| [6, 3, 5].iter().map(|&i| unit(i)[k].clone()).sum()).collect();
    let i = Subspace::span(v.space(), &[sum])?;
    let it = Subspace::span(v.space(), &[unit(1), unit(4)])?;
    if !dg.is_nondegenerate(&i)? || !dg.is_nondegenerate(&it)? || v.gram(i.basis(), it.basis()).is_zero() {
        return Err(Error::Degenerate);
    }
    let s = QuantumLInfty::free(&dg, W);
    let (l, lt) = (reduction_along(&v, &i)?, reduction_along(&v, &it)?);
    let (r, rt) = (effective_action(&s, &l)?, effective_action(&s, &lt)?);
    let c1 = check_relation(&r, &s, &l.transpose())?;
    let c2 = check_relation(&s, &rt, &lt)?;
    if !(c1.holds() && c2.holds()) {
        return Err(Error::InvalidCertificate);
    }
    match compose_relations(&c1, &c2) {
        Ok(_) => Ok(Error::InvalidCertificate),
        Err(e) => Ok(e),
    }
}

fn certified_composition() -> Verdict {
    const W: i64 = 5;
    let mut composed = 0;
    for seed in 0..40u64 {
        let mut rng = random::rng(900_000 + seed);
        let acyclic = rng.gen_bool(0.7);
        let dg = random::dg_space(&mut rng, 4, acyclic);
        let i = lib(random::nondegenerate_isotrope(&mut rng, &dg, 1))?;
        let l1 = lib(reduction_along(dg.base(), &i))?;
        // The second isotrope only depends on the transferred free part.
        let reduced = lib(lib(FiberChart::new(&dg, &l1))?.transferred(W))?;
        let j = lib(random::nondegenerate_isotrope(&mut rng, &reduced, 1))?;
        if j.is_zero() {
            continue;
        }
        let s = lib(random::quantum_linfty(&mut rng, &dg, W))?;
        let s1 = lib(effective_action(&s, &l1))?;
        let l2 = lib(reduction_along(s1.space(), &j))?;
        let s2 = lib(effective_action(&s1, &l2))?;
        // Successive reductions are orthogonal as a span of L1ᵀ and L2.
        let c1 = lib(check_relation(&s, &s1, &l1))?;
        let c2 = lib(check_relation(&s1, &s2, &l2))?;
        ensure(c1.holds() && c2.holds(), || format!("input certificates fail, seed {seed}"))?;
        let out = lib(compose_relations(&c1, &c2))?;
        let again = lib(check_relation(&s, &s2, &out.relation))?;
        ensure(out.holds() && again.holds() && out.relation == lib(l1.then(&l2))?, || format!("seed {seed}: {} then {}", text(&l1), text(&l2)))?;
        composed += 1;
    }
    ensure(composed >= 15, || format!("only {composed} composable pairs sampled"))?;
    let skew = lib(skew_certificates())?;
    ensure(skew == Error::NotOrthogonal, || format!("non-orthogonal composition returned {skew:?}"))?;
    Ok(format!("{composed} composed certificates re-verified; the non-orthogonal pair returns NotOrthogonal"))
}

fn coisotropes_and_differentials() -> Verdict {
    let mut coisotropes = 0;
    for seed in 0..150u64 {
        let mut rng = random::rng(1_000_000 + seed);
        let v = random::symplectic_space(&mut rng, 4);
        let c = lib(random::coisotropic(&mut rng, &v))?;
        let d = lib(decompose_coisotrope(&v, &c))?;
        let (r, i, b) = (d.reduced.basis(), d.isotrope.basis(), d.complement.basis());
        // Block form: R ⟂ I ⊕ B, and I, B isotropic, with I paired to B.
        let blocks = [v.gram(r, i), v.gram(r, b), v.gram(i, i), v.gram(b, b)].iter().all(Mat::is_zero);
        let pairing = v.gram(i, b).rank() == i.len();
        // Balance: B_k ≅ I_{1−k}^*, so t^{-1} dimsum(I) equals the reflection of dimsum(B).
        let balance = d.isotrope.dimsum().times_power(-1) == d.complement.dimsum().reflect() && i.len() == b.len();
        let spans = r.len() + i.len() + b.len() == v.dim() && lib(lib(d.reduced.sum(&d.isotrope))?.sum(&d.complement))? == Subspace::full(v.space());
        let coiso = lib(d.reduced.sum(&d.isotrope))? == c;
        ensure(blocks && pairing && balance && spans && coiso, || format!("seed {seed}: {}", text(&c)))?;
        coisotropes += 1;
    }
    let mut differentials = 0;
    for seed in 0..80u64 {
        let mut rng = random::rng(1_100_000 + seed);
        let acyclic = rng.gen_bool(0.4);
        let dg = random::dg_space(&mut rng, 4, acyclic);
        let i = lib(random::nondegenerate_isotrope(&mut rng, &dg, 1))?;
        let l = lib(reduction_along(dg.base(), &i))?;
        let by_matrix = lib(transferred_differential(&dg, &l))?;
        let by_relations = lib(transferred_differential_via_relations(&dg, &l))?;
        ensure(by_matrix == by_relations && by_matrix.mul(&by_matrix).is_zero(), || format!("seed {seed}: {}", text(&l)))?;
        differentials += 1;
    }
    Ok(format!("{coisotropes} coisotropes of dim ≤ 8 decomposed; {differentials} transferred differentials agree and square to zero"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("gaussian normalization", gaussian_normalization),
        ("wick oracle", wick_oracle),
        ("perturbation equals wick", hpl_equals_wick),
        ("stokes, schwinger-dyson, fubini", stokes_schwinger_dyson_fubini),
        ("bv algebra laws", bv_algebra_laws),
        ("relation calculus", relation_calculus),
        ("pushout of orthogonal spans", pushout_of_orthogonal_spans),
        ("transfer preserves the master equation", transfer_preserves_qme),
        ("composition of certified relations", certified_composition),
        ("coisotrope decomposition and transferred differentials", coisotropes_and_differentials),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (n, (name, criterion)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(criterion)).unwrap_or_else(|p| {
            let message = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", message.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", n + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", n + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
