//! Berezinians, linear half-densities and exact normalization constants.
//!
//! Square roots and powers of `2π` and `ℏ` never get evaluated. A
//! [`Prefactor`] keeps them as exponents next to a rational coefficient.

use crate::error::{Error, Result};
use crate::graded::GradedSpace;
use crate::matrix::Mat;
use crate::scalar::{self, one, zero, Scalar};
use crate::symplectic::OddSympSpace;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// `q · √r · (2π)^{a/2} · ℏ^{b/2}` with `r` squarefree and positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Prefactor {
    q: Scalar,
    r: BigInt,
    two_pi_half: i64,
    hbar_half: i64,
}

impl Prefactor {
    pub fn new(q: Scalar, r: BigInt, two_pi_half: i64, hbar_half: i64) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::Parse("square-root part must be positive".into()));
        }
        let (s, free) = square_split(&r);
        Ok(Prefactor { q, r: BigInt::one(), two_pi_half, hbar_half }.times_sqrt(s, free))
    }

    fn times_sqrt(mut self, square_root: BigInt, squarefree: BigInt) -> Self {
        self.q *= Scalar::from_integer(square_root);
        self.r = squarefree;
        self.normalized()
    }

    fn normalized(self) -> Self {
        if self.q.is_zero() {
            Prefactor::zero()
        } else {
            self
        }
    }

    pub fn zero() -> Self {
        Prefactor { q: zero(), r: BigInt::one(), two_pi_half: 0, hbar_half: 0 }
    }

    pub fn one() -> Self {
        Prefactor::rational(one())
    }

    pub fn rational(q: Scalar) -> Self {
        Prefactor { q, r: BigInt::one(), two_pi_half: 0, hbar_half: 0 }.normalized()
    }

    /// `|x|^{1/2}`, taking the positive root.
    pub fn sqrt_abs(x: &Scalar) -> Self {
        if x.is_zero() {
            return Prefactor::zero();
        }
        let n = x.numer().abs() * x.denom();
        let (s, free) = square_split(&n);
        let q = Scalar::new(s, x.denom().clone());
        Prefactor { q, r: free, two_pi_half: 0, hbar_half: 0 }
    }

    /// `(2π)^{a/2} ℏ^{b/2}`.
    pub fn powers(two_pi_half: i64, hbar_half: i64) -> Self {
        Prefactor { q: one(), r: BigInt::one(), two_pi_half, hbar_half }
    }

    pub fn q(&self) -> &Scalar {
        &self.q
    }

    pub fn sqrt_part(&self) -> &BigInt {
        &self.r
    }

    pub fn two_pi_half(&self) -> i64 {
        self.two_pi_half
    }

    pub fn hbar_half(&self) -> i64 {
        self.hbar_half
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero()
    }

    pub fn mul(&self, other: &Prefactor) -> Prefactor {
        if self.is_zero() || other.is_zero() {
            return Prefactor::zero();
        }
        let g = self.r.gcd(&other.r);
        let r = (&self.r / &g) * (&other.r / &g);
        let q = &self.q * &other.q * Scalar::from_integer(g);
        Prefactor { q, r, two_pi_half: self.two_pi_half + other.two_pi_half, hbar_half: self.hbar_half + other.hbar_half }
    }

    pub fn scale(&self, c: &Scalar) -> Prefactor {
        Prefactor { q: &self.q * c, ..self.clone() }.normalized()
    }

    pub fn inverse(&self) -> Result<Prefactor> {
        if self.is_zero() {
            return Err(Error::NotInvertible);
        }
        let q = one() / (&self.q * Scalar::from_integer(self.r.clone()));
        Ok(Prefactor { q, r: self.r.clone(), two_pi_half: -self.two_pi_half, hbar_half: -self.hbar_half })
    }

    pub fn div(&self, other: &Prefactor) -> Result<Prefactor> {
        Ok(self.mul(&other.inverse()?))
    }

    /// The rational value, when no root or transcendental factor remains.
    pub fn as_rational(&self) -> Option<Scalar> {
        (self.is_zero() || (self.r.is_one() && self.two_pi_half == 0 && self.hbar_half == 0)).then(|| self.q.clone())
    }
}

/// `n = s² · r` with `r` squarefree, by trial division.
fn square_split(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut s = BigInt::one();
    let mut r = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let mut count = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            count += 1;
        }
        s *= p.pow(count / 2);
        if count % 2 == 1 {
            r *= &p;
        }
        p += 1;
    }
    (s, r * rest)
}

impl fmt::Display for Prefactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", scalar::format(&self.q))?;
        if !self.r.is_one() {
            write!(f, "·√{}", self.r)?;
        }
        if self.two_pi_half != 0 {
            write!(f, "·(2π)^({}/2)", self.two_pi_half)?;
        }
        if self.hbar_half != 0 {
            write!(f, "·ℏ^({}/2)", self.hbar_half)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PrefactorWire {
    q: String,
    sqrt: String,
    two_pi_half: i64,
    hbar_half: i64,
}

impl Serialize for Prefactor {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PrefactorWire { q: scalar::format(&self.q), sqrt: self.r.to_string(), two_pi_half: self.two_pi_half, hbar_half: self.hbar_half }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Prefactor {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = PrefactorWire::deserialize(deserializer)?;
        let q = scalar::parse(&wire.q).map_err(serde::de::Error::custom)?;
        let r: BigInt = wire.sqrt.parse().map_err(serde::de::Error::custom)?;
        Prefactor::new(q, r, wire.two_pi_half, wire.hbar_half).map_err(serde::de::Error::custom)
    }
}

/// Splits rows by the parity of the reference generators and columns by the
/// parity of the new basis vectors; `Ber = det(even) / det(odd)`.
fn parity_blocks(space: &GradedSpace, a: &Mat, column_odd: &[bool]) -> Result<(Mat, Mat)> {
    let rows_even: Vec<usize> = (0..space.dim()).filter(|&i| !space.is_odd(i)).collect();
    let rows_odd: Vec<usize> = (0..space.dim()).filter(|&i| space.is_odd(i)).collect();
    let cols_even: Vec<usize> = (0..a.cols()).filter(|&j| !column_odd[j]).collect();
    let cols_odd: Vec<usize> = (0..a.cols()).filter(|&j| column_odd[j]).collect();
    if rows_even.len() != cols_even.len() || rows_odd.len() != cols_odd.len() {
        return Err(Error::NotABasis);
    }
    for &i in &rows_odd {
        for &j in &cols_even {
            if !a[(i, j)].is_zero() {
                return Err(Error::NotHomogeneous("matrix mixes parities".into()));
            }
        }
    }
    for &i in &rows_even {
        for &j in &cols_odd {
            if !a[(i, j)].is_zero() {
                return Err(Error::NotHomogeneous("matrix mixes parities".into()));
            }
        }
    }
    Ok((a.submatrix(&rows_even, &cols_even), a.submatrix(&rows_odd, &cols_odd)))
}

/// Berezinian of a degree-preserving automorphism of `space`.
pub fn berezinian(space: &GradedSpace, a: &Mat) -> Result<Scalar> {
    if a.rows() != space.dim() || a.cols() != space.dim() {
        return Err(Error::DimensionMismatch("matrix does not act on the space".into()));
    }
    let (even, odd) = parity_blocks(space, a, &space.parities())?;
    let (de, dodd) = (even.det(), odd.det());
    if de.is_zero() || dodd.is_zero() {
        return Err(Error::NotInvertible);
    }
    Ok(de / dodd)
}

/// Berezinian of the change from the standard basis to homogeneous `basis`.
pub fn basis_berezinian(space: &GradedSpace, basis: &[Vec<Scalar>]) -> Result<Scalar> {
    let n = space.dim();
    if basis.len() != n {
        return Err(Error::NotABasis);
    }
    let odd = basis
        .iter()
        .map(|v| Ok(space.degree_of(v)?.ok_or(Error::NotABasis)?.rem_euclid(2) == 1))
        .collect::<Result<Vec<_>>>()?;
    let a = Mat::from_cols(basis, n);
    let (even, oddb) = parity_blocks(space, &a, &odd)?;
    let (de, dodd) = (even.det(), oddb.det());
    if de.is_zero() || dodd.is_zero() {
        return Err(Error::NotABasis);
    }
    Ok(de / dodd)
}

/// A linear half-density, recorded by its value on the standard basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinHalfDensity {
    pub space: GradedSpace,
    pub coefficient: Prefactor,
}

impl LinHalfDensity {
    pub fn new(space: GradedSpace, coefficient: Prefactor) -> Self {
        LinHalfDensity { space, coefficient }
    }

    /// The half-density taking value 1 on the standard basis.
    pub fn standard(space: &GradedSpace) -> Self {
        LinHalfDensity::new(space.clone(), Prefactor::one())
    }

    /// `ρ(e·A) = |Ber A|^{1/2} ρ(e)`.
    pub fn evaluate(&self, basis: &[Vec<Scalar>]) -> Result<Prefactor> {
        Ok(self.coefficient.mul(&Prefactor::sqrt_abs(&basis_berezinian(&self.space, basis)?)))
    }

    /// The half-density whose value on `basis` is `value`.
    pub fn from_value(space: &GradedSpace, basis: &[Vec<Scalar>], value: Prefactor) -> Result<Self> {
        let ber = basis_berezinian(space, basis)?;
        Ok(LinHalfDensity::new(space.clone(), value.div(&Prefactor::sqrt_abs(&ber))?))
    }

    pub fn scale(&self, factor: &Prefactor) -> Self {
        LinHalfDensity::new(self.space.clone(), self.coefficient.mul(factor))
    }
}

fn concat(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    a.iter().chain(b).cloned().collect()
}

fn coordinates_space(space: &GradedSpace, basis: &[Vec<Scalar>]) -> Result<GradedSpace> {
    basis
        .iter()
        .map(|v| space.degree_of(v)?.ok_or(Error::NotComplementary))
        .collect::<Result<Vec<_>>>()
        .map(GradedSpace::new)
}

/// `Dens^{1/2} V ≅ Dens^{1/2} A ⊗ Dens^{1/2} B` for `V = A ⊕ B`, realised on
/// the given bases: the `A` factor carries `ρ(a ∪ b)`, the `B` factor is 1.
pub fn split_density(rho: &LinHalfDensity, a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Result<(LinHalfDensity, LinHalfDensity)> {
    let value = rho.evaluate(&concat(a, b)).map_err(|_| Error::NotComplementary)?;
    let sa = coordinates_space(&rho.space, a)?;
    let sb = coordinates_space(&rho.space, b)?;
    Ok((LinHalfDensity::new(sa, value), LinHalfDensity::standard(&sb)))
}

/// Inverse of [`split_density`].
pub fn fuse_density(space: &GradedSpace, rho_a: &LinHalfDensity, rho_b: &LinHalfDensity, a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Result<LinHalfDensity> {
    let value = rho_a.coefficient.mul(&rho_b.coefficient);
    LinHalfDensity::from_value(space, &concat(a, b), value).map_err(|_| Error::NotComplementary)
}

/// Vectors `f_j` in `V` with `ω(l_i, f_j) = δ_ij`, spanning a complement of
/// the isotropic span of `l`.
pub fn dual_partners(v: &OddSympSpace, l: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
    let n = v.dim();
    let rows: Vec<Vec<Scalar>> = l.iter().map(|x| v.omega().transpose().apply(x)).collect();
    let pairing = Mat::from_rows(&rows, n);
    (0..l.len())
        .map(|j| {
            let mut target = vec![zero(); l.len()];
            target[j] = one();
            let f = pairing.solve(&target).ok_or(Error::NotABasis)?;
            homogeneous_part(v.space(), &f, 1 - v.space().degree_of(&l[j])?.ok_or(Error::NotABasis)?)
        })
        .collect()
}

fn homogeneous_part(space: &GradedSpace, v: &[Scalar], d: i64) -> Result<Vec<Scalar>> {
    Ok(v.iter().enumerate().map(|(i, x)| if space.degree(i) == d { x.clone() } else { zero() }).collect())
}

/// The weight-one density on a Lagrangian `L` induced by `ρ` via
/// `V/L ≅ L*[1]`: its value on a basis `l` is `ρ(l, f)` for dual partners `f`.
pub fn lagrangian_value(v: &OddSympSpace, rho: &LinHalfDensity, l: &[Vec<Scalar>]) -> Result<Prefactor> {
    let f = dual_partners(v, l)?;
    rho.evaluate(&concat(l, &f))
}
