//! Weight-truncated formal functions on a graded space.
//!
//! A function is a finite sum of `c · ℏ^g · φ^{i_1}⋯φ^{i_k}` in the dual
//! coordinates `φ^i` (parity of `e_i`), with weight `2g + k`. Every value
//! records the weight `w_max` up to which it is exact; operations lower it
//! whenever unknown higher terms could leak downwards.

use crate::error::{Error, Result};
use crate::graded::GradedSpace;
use crate::matrix::Mat;
use crate::scalar::{self, int, one, ratio, sign, zero, Scalar};
use crate::symplectic::OddSympSpace;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    indices: Vec<usize>,
    g: i64,
}

impl Monomial {
    /// `indices` is read as a word; [`FormalFunction::from_terms`] sorts it.
    pub fn new(indices: Vec<usize>, g: i64) -> Self {
        Monomial { indices, g }
    }

    pub fn one() -> Self {
        Monomial::new(Vec::new(), 0)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn hbar_power(&self) -> i64 {
        self.g
    }

    pub fn weight(&self) -> i64 {
        2 * self.g + self.indices.len() as i64
    }

    pub fn polynomial_degree(&self) -> usize {
        self.indices.len()
    }

    /// Cohomological degree `Σ deg φ^i = −Σ deg e_i`.
    pub fn degree(&self, space: &GradedSpace) -> i64 {
        -self.indices.iter().map(|&i| space.degree(i)).sum::<i64>()
    }

    pub fn is_odd(&self, space: &GradedSpace) -> bool {
        self.degree(space).rem_euclid(2) == 1
    }
}

/// Sorts the word `factors` by adjacent transpositions, returning the
/// Koszul sign, or `None` when an odd generator repeats.
pub fn koszul_sort(factors: &mut [usize], odd: &[bool]) -> Option<bool> {
    let mut negative = false;
    for i in 1..factors.len() {
        let mut j = i;
        while j > 0 && factors[j - 1] > factors[j] {
            if odd[factors[j - 1]] && odd[factors[j]] {
                negative = !negative;
            }
            factors.swap(j - 1, j);
            j -= 1;
        }
    }
    let repeated_odd = factors.windows(2).any(|w| w[0] == w[1] && odd[w[0]]);
    (!repeated_odd).then_some(negative)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalFunction {
    space: GradedSpace,
    terms: BTreeMap<Monomial, Scalar>,
    w_max: i64,
}

impl FormalFunction {
    pub fn zero(space: &GradedSpace, w_max: i64) -> Self {
        FormalFunction { space: space.clone(), terms: BTreeMap::new(), w_max }
    }

    pub fn constant(space: &GradedSpace, c: Scalar, w_max: i64) -> Self {
        FormalFunction::from_terms(space, [(Monomial::one(), c)], w_max)
    }

    pub fn one(space: &GradedSpace, w_max: i64) -> Self {
        FormalFunction::constant(space, one(), w_max)
    }

    /// `φ^i`.
    pub fn coordinate(space: &GradedSpace, i: usize, w_max: i64) -> Self {
        FormalFunction::from_terms(space, [(Monomial::new(vec![i], 0), one())], w_max)
    }

    /// `ℏ^g`.
    pub fn hbar(space: &GradedSpace, g: i64, w_max: i64) -> Self {
        FormalFunction::from_terms(space, [(Monomial::new(Vec::new(), g), one())], w_max)
    }

    /// Accepts unsorted index words; the Koszul sign of sorting is applied.
    pub fn from_terms(space: &GradedSpace, terms: impl IntoIterator<Item = (Monomial, Scalar)>, w_max: i64) -> Self {
        let mut f = FormalFunction::zero(space, w_max);
        let odd = space.parities();
        for (m, c) in terms {
            let mut word = m.indices;
            if let Some(negative) = koszul_sort(&mut word, &odd) {
                let c = if negative { -c } else { c };
                f.add_term(Monomial { indices: word, g: m.g }, c);
            }
        }
        f
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() || m.weight() > self.w_max {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn w_max(&self) -> i64 {
        self.w_max
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(zero)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&Monomial::one())
    }

    /// Smallest weight of a stored term, if any.
    pub fn min_weight(&self) -> Option<i64> {
        self.terms.keys().map(Monomial::weight).min()
    }

    /// Lower bound on the weight of every term, known or not.
    pub fn effective_min_weight(&self) -> i64 {
        self.min_weight().unwrap_or(self.w_max + 1).min(self.w_max + 1)
    }

    pub fn min_hbar_power(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.g).min()
    }

    pub fn max_polynomial_degree(&self) -> usize {
        self.terms.keys().map(Monomial::polynomial_degree).max().unwrap_or(0)
    }

    /// Lowers the truncation order.
    pub fn truncate(&self, w_max: i64) -> Self {
        let w = w_max.min(self.w_max);
        let terms = self.terms.iter().filter(|(m, _)| m.weight() <= w).map(|(m, c)| (m.clone(), c.clone())).collect();
        FormalFunction { space: self.space.clone(), terms, w_max: w }
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        let terms = self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect();
        FormalFunction { space: self.space.clone(), terms, w_max: self.w_max }
    }

    /// Terms of polynomial degree exactly `k`.
    pub fn polynomial_part(&self, k: usize) -> Self {
        self.filter(|m| m.polynomial_degree() == k)
    }

    /// Equality of all terms both sides know.
    pub fn agrees_with(&self, other: &FormalFunction) -> bool {
        let w = self.w_max.min(other.w_max);
        self.space == other.space && self.truncate(w).terms == other.truncate(w).terms
    }

    fn same_space(&self, other: &FormalFunction) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn add(&self, other: &FormalFunction) -> Result<Self> {
        self.same_space(other)?;
        let mut out = FormalFunction::zero(&self.space, self.w_max.min(other.w_max));
        for (m, c) in self.terms.iter().chain(&other.terms) {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FormalFunction) -> Result<Self> {
        self.add(&other.scale(&-one()))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = FormalFunction::zero(&self.space, self.w_max);
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x * c);
        }
        out
    }

    /// Multiplication by `ℏ^g`; the truncation order moves with it.
    pub fn times_hbar(&self, g: i64) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (Monomial { indices: m.indices.clone(), g: m.g + g }, c.clone())).collect();
        FormalFunction { space: self.space.clone(), terms, w_max: self.w_max + 2 * g }
    }

    /// Graded-commutative product.
    pub fn mul(&self, other: &FormalFunction) -> Result<Self> {
        self.same_space(other)?;
        let w = (self.w_max + other.effective_min_weight()).min(other.w_max + self.effective_min_weight());
        let odd = self.space.parities();
        let mut out = FormalFunction::zero(&self.space, w);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if a.weight() + b.weight() > w {
                    continue;
                }
                let mut word = a.indices.clone();
                word.extend_from_slice(&b.indices);
                if let Some(negative) = koszul_sort(&mut word, &odd) {
                    let c = x * y;
                    out.add_term(Monomial { indices: word, g: a.g + b.g }, if negative { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// `∂_L f / ∂φ^i`: move `φ^i` to the front, then strip it.
    pub fn lderiv(&self, i: usize) -> Self {
        let odd = self.space.is_odd(i);
        let mut out = FormalFunction::zero(&self.space, self.w_max - 1);
        for (m, c) in &self.terms {
            let Some(pos) = m.indices.iter().position(|&j| j == i) else {
                continue;
            };
            let mut rest = m.indices.clone();
            rest.remove(pos);
            let coeff = if odd {
                let before = m.indices[..pos].iter().filter(|&&j| self.space.is_odd(j)).count();
                c * sign(before % 2 == 1)
            } else {
                c * int(m.indices.iter().filter(|&&j| j == i).count() as i64)
            };
            out.add_term(Monomial { indices: rest, g: m.g }, coeff);
        }
        out
    }

    /// `∂_R f / ∂φ^i`: move `φ^i` to the back, then strip it.
    pub fn rderiv(&self, i: usize) -> Self {
        let odd = self.space.is_odd(i);
        let mut out = FormalFunction::zero(&self.space, self.w_max - 1);
        for (m, c) in &self.terms {
            let Some(pos) = m.indices.iter().rposition(|&j| j == i) else {
                continue;
            };
            let mut rest = m.indices.clone();
            rest.remove(pos);
            let coeff = if odd {
                let after = m.indices[pos + 1..].iter().filter(|&&j| self.space.is_odd(j)).count();
                c * sign(after % 2 == 1)
            } else {
                c * int(m.indices.iter().filter(|&&j| j == i).count() as i64)
            };
            out.add_term(Monomial { indices: rest, g: m.g }, coeff);
        }
        out
    }

    fn check_symplectic(&self, v: &OddSympSpace) -> Result<()> {
        if v.space() == &self.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// `{f, g} = ∂_R f/∂φ^i · ω^{ij} · ∂_L g/∂φ^j`.
    pub fn bracket(&self, other: &FormalFunction, v: &OddSympSpace) -> Result<Self> {
        self.same_space(other)?;
        self.check_symplectic(v)?;
        let n = self.space.dim();
        let right: Vec<_> = (0..n).map(|i| self.rderiv(i)).collect();
        let left: Vec<_> = (0..n).map(|j| other.lderiv(j)).collect();
        let mut acc: Option<FormalFunction> = None;
        for i in 0..n {
            for j in 0..n {
                let w = &v.omega_inv()[(i, j)];
                if w.is_zero() {
                    continue;
                }
                let term = right[i].mul(&left[j])?.scale(w);
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term)?,
                });
            }
        }
        let cap = self.w_max.min(other.w_max);
        Ok(acc.unwrap_or_else(|| FormalFunction::zero(&self.space, cap)).truncate(cap))
    }

    /// `Δf = ½ Σ (−1)^{deg i} ω^{ij} ∂_L/∂φ^i ∂_L/∂φ^j f`.
    pub fn laplacian(&self, v: &OddSympSpace) -> Result<Self> {
        self.check_symplectic(v)?;
        let n = self.space.dim();
        let mut out = FormalFunction::zero(&self.space, self.w_max - 2);
        for j in 0..n {
            let dj = self.lderiv(j);
            if dj.is_zero() {
                continue;
            }
            for i in 0..n {
                let w = &v.omega_inv()[(i, j)];
                if w.is_zero() {
                    continue;
                }
                let coeff = w * sign(self.space.is_odd(i)) * ratio(1, 2);
                for (m, c) in &dj.lderiv(i).terms {
                    out.add_term(m.clone(), c * &coeff);
                }
            }
        }
        Ok(out)
    }

    /// `ℏΔf`, which preserves weight.
    pub fn hbar_laplacian(&self, v: &OddSympSpace) -> Result<Self> {
        Ok(self.laplacian(v)?.times_hbar(1))
    }

    pub fn exp(&self) -> Result<Self> {
        if self.effective_min_weight() < 1 {
            return Err(Error::WeightNotPositive);
        }
        let mut out = FormalFunction::one(&self.space, self.w_max);
        let mut power = FormalFunction::one(&self.space, self.w_max);
        let mut n = 0i64;
        loop {
            n += 1;
            power = power.mul(self)?.scale(&ratio(1, n)).truncate(self.w_max);
            if power.is_zero() && n > self.w_max.max(0) {
                break;
            }
            out = out.add(&power)?;
        }
        Ok(out)
    }

    pub fn log(&self) -> Result<Self> {
        let unit = Monomial::one();
        let u = self.filter(|m| *m != unit);
        if self.constant_term() != one() || u.effective_min_weight() < 1 {
            return Err(Error::NotUnital);
        }
        let u = FormalFunction { w_max: self.w_max, ..u };
        let mut out = FormalFunction::zero(&self.space, self.w_max);
        let mut power = FormalFunction::one(&self.space, self.w_max);
        let mut n = 0i64;
        loop {
            n += 1;
            power = power.mul(&u)?.truncate(self.w_max);
            if power.is_zero() && n > self.w_max.max(0) {
                break;
            }
            out = out.add(&power.scale(&(sign(n % 2 == 0) * ratio(1, n))))?;
        }
        Ok(out)
    }

    /// Pullback along `e′_a ↦ Σ_i M_{ia} e_i`, i.e. `φ^i ↦ Σ_a M_{ia} ψ^a`,
    /// where `ψ^a` are coordinates on `new_space`.
    pub fn substitute(&self, m: &Mat, new_space: &GradedSpace) -> Result<Self> {
        if m.rows() != self.space.dim() || m.cols() != new_space.dim() {
            return Err(Error::DimensionMismatch("substitution matrix has the wrong shape".into()));
        }
        for i in 0..m.rows() {
            for a in 0..m.cols() {
                if !m[(i, a)].is_zero() && self.space.degree(i) != new_space.degree(a) {
                    return Err(Error::NotHomogeneous("substitution is not degree preserving".into()));
                }
            }
        }
        let images: Vec<FormalFunction> = (0..m.rows())
            .map(|i| {
                let terms = (0..m.cols()).filter(|&a| !m[(i, a)].is_zero()).map(|a| (Monomial::new(vec![a], 0), m[(i, a)].clone()));
                FormalFunction::from_terms(new_space, terms, self.w_max)
            })
            .collect();
        let mut out = FormalFunction::zero(new_space, self.w_max);
        for (mono, c) in &self.terms {
            let mut p = FormalFunction::constant(new_space, c.clone(), self.w_max).times_hbar(mono.g).truncate(self.w_max);
            for &i in &mono.indices {
                p = p.mul(&images[i])?;
            }
            out = out.add(&p)?;
        }
        Ok(FormalFunction { w_max: self.w_max, ..out })
    }

    /// Restriction to the subspace spanned by the columns of `basis`.
    pub fn restrict(&self, basis: &[Vec<Scalar>]) -> Result<Self> {
        let degrees = basis
            .iter()
            .map(|v| self.space.degree_of(v)?.ok_or_else(|| Error::NotASubspace("zero basis vector".into())))
            .collect::<Result<Vec<_>>>()?;
        self.substitute(&Mat::from_cols(basis, self.space.dim()), &GradedSpace::new(degrees))
    }

    /// Homogeneous of the given cohomological degree.
    pub fn is_of_degree(&self, d: i64) -> bool {
        self.terms.keys().all(|m| m.degree(&self.space) == d)
    }
}

/// `S = ½ s_ij φ^i φ^j` from the graded-symmetric matrix `s`.
pub fn quadratic(space: &GradedSpace, s: &Mat, w_max: i64) -> FormalFunction {
    let n = space.dim();
    let mut terms = Vec::new();
    for i in 0..n {
        for j in i..n {
            let c = if i == j { &s[(i, i)] * ratio(1, 2) } else { s[(i, j)].clone() };
            if !c.is_zero() {
                terms.push((Monomial::new(vec![i, j], 0), c));
            }
        }
    }
    FormalFunction::from_terms(space, terms, w_max)
}

/// The graded-symmetric `s` with `S = ½ s_ij φ^i φ^j`.
pub fn quadratic_matrix(f: &FormalFunction) -> Result<Mat> {
    let space = f.space();
    let n = space.dim();
    let mut s = Mat::zeros(n, n);
    for (m, c) in f.terms() {
        if m.g != 0 || m.indices.len() != 2 {
            return Err(Error::MalformedAction("free action must be quadratic and ℏ-free".into()));
        }
        let (i, j) = (m.indices[0], m.indices[1]);
        if i == j {
            s[(i, i)] = c * int(2);
        } else {
            s[(i, j)] = c.clone();
            s[(j, i)] = c * sign(space.is_odd(i) && space.is_odd(j));
        }
    }
    Ok(s)
}

/// `ω(Qv, w) + (−1)^{deg v} ω(v, Qw) = 0` on basis vectors, and `Q` raises degree by one.
pub fn check_compatible(v: &OddSympSpace, q: &Mat) -> Result<()> {
    let space = v.space();
    let n = space.dim();
    if q.rows() != n || q.cols() != n {
        return Err(Error::NotCompatible("wrong shape".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if !q[(i, j)].is_zero() && space.degree(i) != space.degree(j) + 1 {
                return Err(Error::NotCompatible(format!("entry ({i},{j}) does not have degree 1")));
            }
        }
    }
    let oq = v.omega().mul(q);
    for i in 0..n {
        for j in 0..n {
            let lhs = &oq[(j, i)] * -one() + &oq[(i, j)] * sign(space.is_odd(i));
            if !lhs.is_zero() {
                return Err(Error::NotCompatible(format!("pairing identity fails on generators {i}, {j}")));
            }
        }
    }
    Ok(())
}

/// `Q^i_j = −ω^{ik} s_kj`.
pub fn sfree_to_q(s_free: &FormalFunction, v: &OddSympSpace) -> Result<Mat> {
    if s_free.space() != v.space() {
        return Err(Error::SpaceMismatch);
    }
    let s = quadratic_matrix(s_free)?;
    let q = v.omega_inv().mul(&s).scale(&-one());
    check_compatible(v, &q)?;
    Ok(q)
}

/// `s = −ω Q`.
pub fn q_to_sfree(q: &Mat, v: &OddSympSpace, w_max: i64) -> Result<FormalFunction> {
    check_compatible(v, q)?;
    Ok(quadratic(v.space(), &v.omega().mul(q).scale(&-one()), w_max))
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    indices: Vec<usize>,
    g: i64,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct FormalWire {
    space: GradedSpace,
    terms: Vec<TermWire>,
    w_max: i64,
}

impl Serialize for FormalFunction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self.terms.iter().map(|(m, c)| TermWire { indices: m.indices.clone(), g: m.g, coeff: scalar::format(c) }).collect();
        FormalWire { space: self.space.clone(), terms, w_max: self.w_max }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FormalFunction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = FormalWire::deserialize(deserializer)?;
        let n = wire.space.dim();
        let mut terms = Vec::new();
        for t in wire.terms {
            if t.indices.iter().any(|&i| i >= n) {
                return Err(serde::de::Error::custom(format!("index out of range in {:?}", t.indices)));
            }
            let c = scalar::parse(&t.coeff).map_err(serde::de::Error::custom)?;
            terms.push((Monomial { indices: t.indices, g: t.g }, c));
        }
        Ok(FormalFunction::from_terms(&wire.space, terms, wire.w_max))
    }
}
