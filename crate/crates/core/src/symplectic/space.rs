use crate::error::{Error, Result};
use crate::graded::{graded_kernel, independent_extension, GradedSpace, Subspace};
use crate::matrix::{dot, Mat};
use crate::scalar::{one, Scalar};
use num_traits::Zero;

/// Graded space with a non-degenerate antisymmetric pairing of degree −1:
/// `ω(e_i, e_j)` may be nonzero only when `deg e_i + deg e_j = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OddSympSpace {
    space: GradedSpace,
    omega: Mat,
    omega_inv: Mat,
}

impl OddSympSpace {
    pub fn new(space: GradedSpace, omega: Mat) -> Result<Self> {
        let n = space.dim();
        if omega.rows() != n || omega.cols() != n {
            return Err(Error::InvalidForm(format!("expected a {n}×{n} matrix")));
        }
        for i in 0..n {
            for j in 0..n {
                if omega[(i, j)] != -omega[(j, i)].clone() {
                    return Err(Error::InvalidForm(format!("not antisymmetric at ({i},{j})")));
                }
                if !omega[(i, j)].is_zero() && space.degree(i) + space.degree(j) != 1 {
                    return Err(Error::InvalidForm(format!("entry ({i},{j}) pairs degrees {} and {}", space.degree(i), space.degree(j))));
                }
            }
        }
        let omega_inv = omega.inverse().ok_or_else(|| Error::InvalidForm("degenerate pairing".into()))?;
        Ok(OddSympSpace { space, omega, omega_inv })
    }

    pub fn point() -> Self {
        OddSympSpace { space: GradedSpace::point(), omega: Mat::zeros(0, 0), omega_inv: Mat::zeros(0, 0) }
    }

    /// `T*[1]W = W*[1] ⊕ W`, fibre generators first, with
    /// `ω(α⊕v, α′⊕v′) = α(v′) − α′(v)`.
    pub fn shifted_cotangent(base: &GradedSpace) -> Self {
        let k = base.dim();
        let mut degrees: Vec<i64> = base.degrees().iter().map(|d| 1 - d).collect();
        degrees.extend_from_slice(base.degrees());
        let mut omega = Mat::zeros(2 * k, 2 * k);
        for i in 0..k {
            omega[(i, k + i)] = one();
            omega[(k + i, i)] = -one();
        }
        OddSympSpace::new(GradedSpace::new(degrees), omega).expect("canonical cotangent form is valid")
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn omega(&self) -> &Mat {
        &self.omega
    }

    /// Matrix inverse of `ω_ij`, so that `Σ_j ω_ij ω^{jk} = δ_i^k`.
    pub fn omega_inv(&self) -> &Mat {
        &self.omega_inv
    }

    pub fn pair(&self, v: &[Scalar], w: &[Scalar]) -> Scalar {
        dot(v, &self.omega.apply(w))
    }

    /// `V̄`: same space, pairing negated.
    pub fn flip(&self) -> Self {
        OddSympSpace { space: self.space.clone(), omega: self.omega.scale(&-one()), omega_inv: self.omega_inv.scale(&-one()) }
    }

    pub fn product(&self, other: &OddSympSpace) -> Self {
        OddSympSpace {
            space: self.space.product(&other.space),
            omega: self.omega.direct_sum(&other.omega),
            omega_inv: self.omega_inv.direct_sum(&other.omega_inv),
        }
    }

    /// Symplectic subspace spanned by `vectors`, with the restricted pairing.
    pub fn restricted(&self, vectors: &[Vec<Scalar>]) -> Result<Self> {
        let degrees = vectors
            .iter()
            .map(|v| self.space.degree_of(v)?.ok_or_else(|| Error::NotASubspace("zero basis vector".into())))
            .collect::<Result<Vec<_>>>()?;
        OddSympSpace::new(GradedSpace::new(degrees), self.gram(vectors, vectors))
    }

    /// `G_ab = ω(u_a, v_b)`.
    pub fn gram(&self, us: &[Vec<Scalar>], vs: &[Vec<Scalar>]) -> Mat {
        let mut g = Mat::zeros(us.len(), vs.len());
        for (a, u) in us.iter().enumerate() {
            let row = self.omega.transpose().apply(u);
            for (b, v) in vs.iter().enumerate() {
                g[(a, b)] = dot(&row, v);
            }
        }
        g
    }

    fn check(&self, w: &Subspace) -> Result<()> {
        if w.ambient() == &self.space {
            Ok(())
        } else {
            Err(Error::NotASubspace("ambient differs from the symplectic space".into()))
        }
    }

    /// `W^ω = {v : ω(v, w) = 0 for all w ∈ W}`.
    pub fn complement(&self, w: &Subspace) -> Result<Subspace> {
        self.check(w)?;
        let rows: Vec<_> = w.basis().iter().map(|b| self.omega.apply(b)).collect();
        Ok(graded_kernel(&self.space, &rows))
    }

    pub fn flags(&self, w: &Subspace) -> Result<ClassFlags> {
        let perp = self.complement(w)?;
        Ok(ClassFlags {
            isotropic: perp.contains(w)?,
            coisotropic: w.contains(&perp)?,
            symplectic: w.intersect(&perp)?.is_zero(),
        })
    }

    pub fn classify(&self, w: &Subspace) -> Result<SubspaceClass> {
        Ok(self.flags(w)?.class())
    }

    pub fn is_isotropic(&self, w: &Subspace) -> Result<bool> {
        Ok(self.flags(w)?.isotropic)
    }

    pub fn is_coisotropic(&self, w: &Subspace) -> Result<bool> {
        Ok(self.flags(w)?.coisotropic)
    }

    pub fn is_lagrangian(&self, w: &Subspace) -> Result<bool> {
        Ok(self.complement(w)? == *w)
    }

    /// `C/C^ω` with its induced pairing.
    pub fn reduce(&self, coisotrope: &Subspace) -> Result<CoisotropicReduction> {
        CoisotropicReduction::new(self, coisotrope)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassFlags {
    pub isotropic: bool,
    pub coisotropic: bool,
    pub symplectic: bool,
}

impl ClassFlags {
    /// Lagrangian beats isotropic/coisotropic, which beat symplectic.
    pub fn class(self) -> SubspaceClass {
        match (self.isotropic, self.coisotropic, self.symplectic) {
            (true, true, _) => SubspaceClass::Lagrangian,
            (true, false, _) => SubspaceClass::Isotropic,
            (false, true, _) => SubspaceClass::Coisotropic,
            (false, false, true) => SubspaceClass::Symplectic,
            (false, false, false) => SubspaceClass::None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubspaceClass {
    Isotropic,
    Coisotropic,
    Lagrangian,
    Symplectic,
    None,
}

impl SubspaceClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SubspaceClass::Isotropic => "isotropic",
            SubspaceClass::Coisotropic => "coisotropic",
            SubspaceClass::Lagrangian => "lagrangian",
            SubspaceClass::Symplectic => "symplectic",
            SubspaceClass::None => "none",
        }
    }
}

/// The quotient `C/C^ω` realised on representatives chosen from the
/// canonical basis of `C`.
#[derive(Clone, Debug)]
pub struct CoisotropicReduction {
    ambient: OddSympSpace,
    coisotrope: Subspace,
    isotrope: Subspace,
    representatives: Vec<Vec<Scalar>>,
    reduced: OddSympSpace,
    chart: Mat,
}

impl CoisotropicReduction {
    fn new(ambient: &OddSympSpace, coisotrope: &Subspace) -> Result<Self> {
        let isotrope = ambient.complement(coisotrope)?;
        if !coisotrope.contains(&isotrope)? {
            return Err(Error::NotCoisotropic);
        }
        let n = ambient.dim();
        let representatives = independent_extension(isotrope.basis(), coisotrope.basis(), n);
        let reduced = ambient.restricted(&representatives)?;
        let mut columns = representatives.clone();
        columns.extend(isotrope.basis().iter().cloned());
        let chart = Mat::from_cols(&columns, n);
        Ok(CoisotropicReduction { ambient: ambient.clone(), coisotrope: coisotrope.clone(), isotrope, representatives, reduced, chart })
    }

    pub fn ambient(&self) -> &OddSympSpace {
        &self.ambient
    }

    pub fn coisotrope(&self) -> &Subspace {
        &self.coisotrope
    }

    /// `C^ω`, the kernel of the projection.
    pub fn isotrope(&self) -> &Subspace {
        &self.isotrope
    }

    pub fn reduced(&self) -> &OddSympSpace {
        &self.reduced
    }

    /// Representatives in `C` of the reduced basis.
    pub fn representatives(&self) -> &[Vec<Scalar>] {
        &self.representatives
    }

    /// `π(c)` for `c ∈ C`.
    pub fn project(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        let coords = self.chart.solve(v).ok_or_else(|| Error::NotASubspace("vector is not in the coisotrope".into()))?;
        Ok(coords[..self.representatives.len()].to_vec())
    }

    /// The reduction `{(c, π(c))} ⊆ V̄ × C/C^ω`.
    pub fn relation(&self) -> super::Relation {
        let n = self.ambient.dim();
        let r = self.representatives.len();
        let mut vectors = Vec::new();
        for (a, rep) in self.representatives.iter().enumerate() {
            let mut v = rep.clone();
            v.extend(self.reduced.space().unit(a));
            vectors.push(v);
        }
        for i in self.isotrope.basis() {
            let mut v = i.clone();
            v.extend(std::iter::repeat_n(Scalar::zero(), r));
            vectors.push(v);
        }
        debug_assert_eq!(vectors.iter().map(Vec::len).max().unwrap_or(n + r), n + r);
        super::Relation::from_vectors(&self.ambient, &self.reduced, &vectors).expect("reduction graph is homogeneous")
    }
}
