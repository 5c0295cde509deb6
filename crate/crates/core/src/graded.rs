//! Graded vector spaces over the rationals and their homogeneous subspaces.
//!
//! A [`Subspace`] is stored as the reduced row echelon form of a homogeneous
//! spanning set. Because every basis vector is supported on generators of a
//! single degree, row reduction never mixes degrees, and two subspaces are
//! equal exactly when their stored bases are identical.

use crate::error::{Error, Result};
use crate::matrix::{is_zero_vec, Mat};
use crate::scalar::{one, zero, Scalar};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Ordered homogeneous basis `e_i` with integer degrees. The empty space is the point.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GradedSpace {
    degrees: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

impl PartialEq for GradedSpace {
    fn eq(&self, other: &Self) -> bool {
        self.degrees == other.degrees
    }
}

impl Eq for GradedSpace {}

impl std::hash::Hash for GradedSpace {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.degrees.hash(state);
    }
}

impl GradedSpace {
    pub fn new(degrees: Vec<i64>) -> Self {
        GradedSpace { degrees, name: None }
    }

    pub fn named(degrees: Vec<i64>, name: &str) -> Self {
        GradedSpace { degrees, name: Some(name.to_string()) }
    }

    pub fn point() -> Self {
        GradedSpace::new(Vec::new())
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.degrees[i].rem_euclid(2) == 1
    }

    pub fn parities(&self) -> Vec<bool> {
        (0..self.dim()).map(|i| self.is_odd(i)).collect()
    }

    /// Distinct degrees in ascending order.
    pub fn distinct_degrees(&self) -> Vec<i64> {
        self.degrees.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn indices_of_degree(&self, d: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == d).collect()
    }

    pub fn dimsum(&self) -> DimPoly {
        DimPoly::from_degrees(self.degrees.iter().copied())
    }

    /// `V[k]`: every degree drops by `k`, so `dimsum(V[k]) = s^{-k} dimsum(V)`.
    pub fn shift(&self, k: i64) -> GradedSpace {
        GradedSpace::new(self.degrees.iter().map(|d| d - k).collect())
    }

    /// Graded dual; generator `i` of the result is the coordinate dual to `e_i`.
    pub fn dual(&self) -> GradedSpace {
        GradedSpace::new(self.degrees.iter().map(|d| -d).collect())
    }

    /// `V × W` with the generators of `V` first.
    pub fn product(&self, other: &GradedSpace) -> GradedSpace {
        let mut degrees = self.degrees.clone();
        degrees.extend_from_slice(&other.degrees);
        GradedSpace::new(degrees)
    }

    /// Degree of a nonzero homogeneous vector, `None` for zero, error if mixed.
    pub fn degree_of(&self, v: &[Scalar]) -> Result<Option<i64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("vector of length {} in space of dimension {}", v.len(), self.dim())));
        }
        let mut found = None;
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            match found {
                None => found = Some(self.degrees[i]),
                Some(d) if d != self.degrees[i] => {
                    return Err(Error::NotHomogeneous(format!("components in degrees {d} and {}", self.degrees[i])));
                }
                _ => {}
            }
        }
        Ok(found)
    }

    pub fn unit(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![zero(); self.dim()];
        v[i] = one();
        v
    }
}

/// Laurent polynomial `Σ dim V_k s^k` with non-negative coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DimPoly {
    coefficients: BTreeMap<i64, usize>,
}

impl DimPoly {
    pub fn zero() -> Self {
        DimPoly::default()
    }

    pub fn from_degrees(degrees: impl IntoIterator<Item = i64>) -> Self {
        let mut p = DimPoly::zero();
        for d in degrees {
            *p.coefficients.entry(d).or_insert(0) += 1;
        }
        p
    }

    pub fn monomial(k: i64, count: usize) -> Self {
        let mut p = DimPoly::zero();
        if count > 0 {
            p.coefficients.insert(k, count);
        }
        p
    }

    pub fn coefficient(&self, k: i64) -> usize {
        self.coefficients.get(&k).copied().unwrap_or(0)
    }

    pub fn coefficients(&self) -> &BTreeMap<i64, usize> {
        &self.coefficients
    }

    pub fn total(&self) -> usize {
        self.coefficients.values().sum()
    }

    pub fn add(&self, other: &DimPoly) -> DimPoly {
        let mut p = self.clone();
        for (&k, &c) in &other.coefficients {
            *p.coefficients.entry(k).or_insert(0) += c;
        }
        p
    }

    /// `self − other`, `None` when a coefficient would turn negative.
    pub fn checked_sub(&self, other: &DimPoly) -> Option<DimPoly> {
        let mut p = self.clone();
        for (&k, &c) in &other.coefficients {
            let entry = p.coefficients.entry(k).or_insert(0);
            *entry = entry.checked_sub(c)?;
        }
        p.coefficients.retain(|_, c| *c > 0);
        Some(p)
    }

    /// Multiplication by `s^k`.
    pub fn times_power(&self, k: i64) -> DimPoly {
        DimPoly { coefficients: self.coefficients.iter().map(|(&d, &c)| (d + k, c)).collect() }
    }

    /// Substitution `s ↦ s^{-1}`.
    pub fn reflect(&self) -> DimPoly {
        DimPoly { coefficients: self.coefficients.iter().map(|(&d, &c)| (-d, c)).collect() }
    }
}

impl fmt::Display for DimPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coefficients
            .iter()
            .map(|(&k, &c)| match (k, c) {
                (0, c) => c.to_string(),
                (1, 1) => "s".to_string(),
                (1, c) => format!("{c}s"),
                (k, 1) => format!("s^{k}"),
                (k, c) => format!("{c}s^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Homogeneous subspace of an ambient graded space, in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: GradedSpace,
    basis: Vec<Vec<Scalar>>,
}

impl Subspace {
    /// Span of homogeneous vectors; zero vectors are ignored, mixed vectors rejected.
    pub fn span(ambient: &GradedSpace, vectors: &[Vec<Scalar>]) -> Result<Subspace> {
        for v in vectors {
            ambient.degree_of(v)?;
        }
        Ok(Subspace::canonical(ambient, vectors))
    }

    /// Assumes every vector is homogeneous.
    fn canonical(ambient: &GradedSpace, vectors: &[Vec<Scalar>]) -> Subspace {
        let n = ambient.dim();
        if vectors.is_empty() {
            return Subspace { ambient: ambient.clone(), basis: Vec::new() };
        }
        let (r, pivots) = Mat::from_rows(vectors, n).rref();
        let basis = (0..pivots.len()).map(|i| r.row(i)).collect();
        Subspace { ambient: ambient.clone(), basis }
    }

    pub fn zero(ambient: &GradedSpace) -> Subspace {
        Subspace { ambient: ambient.clone(), basis: Vec::new() }
    }

    pub fn full(ambient: &GradedSpace) -> Subspace {
        let basis = (0..ambient.dim()).map(|i| ambient.unit(i)).collect();
        Subspace { ambient: ambient.clone(), basis }
    }

    /// Span of selected standard basis vectors.
    pub fn coordinate(ambient: &GradedSpace, indices: &[usize]) -> Subspace {
        let vectors: Vec<_> = indices.iter().map(|&i| ambient.unit(i)).collect();
        Subspace::canonical(ambient, &vectors)
    }

    pub fn ambient(&self) -> &GradedSpace {
        &self.ambient
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Degree of each canonical basis vector.
    pub fn basis_degrees(&self) -> Vec<i64> {
        self.basis.iter().map(|v| self.ambient.degree_of(v).ok().flatten().expect("canonical basis is homogeneous")).collect()
    }

    /// The subspace viewed as an abstract graded space with its canonical basis.
    pub fn as_space(&self) -> GradedSpace {
        GradedSpace::new(self.basis_degrees())
    }

    /// Basis vectors as the columns of an `ambient × dim` matrix.
    pub fn basis_matrix(&self) -> Mat {
        Mat::from_cols(&self.basis, self.ambient.dim())
    }

    pub fn vectors_of_degree(&self, d: i64) -> Vec<Vec<Scalar>> {
        self.basis.iter().zip(self.basis_degrees()).filter(|(_, e)| *e == d).map(|(v, _)| v.clone()).collect()
    }

    pub fn dimsum(&self) -> DimPoly {
        DimPoly::from_degrees(self.basis_degrees())
    }

    fn same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient == other.ambient {
            Ok(())
        } else {
            Err(Error::MixedAmbient)
        }
    }

    pub fn contains_vector(&self, v: &[Scalar]) -> bool {
        if is_zero_vec(v) {
            return true;
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        Mat::from_rows(&rows, self.ambient.dim()).rank() == self.dim()
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.same_ambient(other)?;
        Ok(other.basis.iter().all(|v| self.contains_vector(v)))
    }

    pub fn equals(&self, other: &Subspace) -> Result<bool> {
        self.same_ambient(other)?;
        Ok(self.basis == other.basis)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.same_ambient(other)?;
        let mut vectors = self.basis.clone();
        vectors.extend(other.basis.iter().cloned());
        Ok(Subspace::canonical(&self.ambient, &vectors))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.same_ambient(other)?;
        let mut rows = self.annihilator().basis;
        rows.extend(other.annihilator().basis);
        Ok(graded_kernel(&self.ambient, &rows))
    }

    /// `Ann W ⊆ V*`, as a subspace of `dual(V)`.
    pub fn annihilator(&self) -> Subspace {
        let kernel = graded_kernel(&self.ambient, &self.basis);
        Subspace { ambient: self.ambient.dual(), basis: kernel.basis }
    }

    /// Reads an annihilator back as a subspace of the original space (double dual).
    pub fn annihilator_in(&self, space: &GradedSpace) -> Result<Subspace> {
        if self.ambient != space.dual() {
            return Err(Error::MixedAmbient);
        }
        Ok(graded_kernel(space, &self.basis))
    }

    /// `V / self` with representatives spanned by standard basis vectors off the pivots.
    pub fn quotient(&self) -> Quotient {
        let n = self.ambient.dim();
        let pivots: Vec<usize> = self.basis.iter().map(|v| v.iter().position(|x| !x.is_zero()).expect("nonzero basis vector")).collect();
        let free: Vec<usize> = (0..n).filter(|i| !pivots.contains(i)).collect();
        let mut projection = Mat::zeros(free.len(), n);
        for (k, &j) in free.iter().enumerate() {
            projection[(k, j)] = one();
        }
        for (row, &p) in self.basis.iter().zip(&pivots) {
            for (k, &j) in free.iter().enumerate() {
                projection[(k, p)] = -row[j].clone();
            }
        }
        let representatives = free.iter().map(|&j| self.ambient.unit(j)).collect();
        let space = GradedSpace::new(free.iter().map(|&j| self.ambient.degree(j)).collect());
        Quotient { space, representatives, projection }
    }

    /// Image under a degree-preserving map `target × ambient`.
    pub fn image_under(&self, map: &Mat, target: &GradedSpace) -> Subspace {
        let vectors: Vec<_> = self.basis.iter().map(|v| map.apply(v)).collect();
        Subspace::canonical(target, &vectors)
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        coordinates(&self.basis, v, self.ambient.dim())
    }
}

/// Quotient space with representatives and the projection `V → V/W`.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub space: GradedSpace,
    pub representatives: Vec<Vec<Scalar>>,
    pub projection: Mat,
}

/// `{v : row·v = 0 for every row}`, assuming each row is supported on one degree.
pub fn graded_kernel(space: &GradedSpace, rows: &[Vec<Scalar>]) -> Subspace {
    let n = space.dim();
    let mut vectors = Vec::new();
    for d in space.distinct_degrees() {
        let idx = space.indices_of_degree(d);
        let restricted: Vec<Vec<Scalar>> = rows.iter().map(|r| idx.iter().map(|&i| r[i].clone()).collect()).collect();
        let local = Mat::from_rows(&restricted, idx.len());
        for k in local.kernel() {
            let mut v = vec![zero(); n];
            for (a, &i) in idx.iter().enumerate() {
                v[i] = k[a].clone();
            }
            vectors.push(v);
        }
    }
    Subspace::canonical(space, &vectors)
}

/// Coordinates of `v` with respect to independent vectors `basis`.
pub fn coordinates(basis: &[Vec<Scalar>], v: &[Scalar], n: usize) -> Option<Vec<Scalar>> {
    if basis.is_empty() {
        return is_zero_vec(v).then(Vec::new);
    }
    Mat::from_cols(basis, n).solve(v)
}

/// Members of `candidates`, in order, that extend `base` to an independent set.
pub fn independent_extension(base: &[Vec<Scalar>], candidates: &[Vec<Scalar>], n: usize) -> Vec<Vec<Scalar>> {
    let mut rows = base.to_vec();
    let mut rank = Mat::from_rows(&rows, n).rank();
    let mut chosen = Vec::new();
    for c in candidates {
        rows.push(c.clone());
        let r = Mat::from_rows(&rows, n).rank();
        if r > rank {
            rank = r;
            chosen.push(c.clone());
        } else {
            rows.pop();
        }
    }
    chosen
}
