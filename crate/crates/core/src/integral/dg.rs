use crate::error::{Error, Result};
use crate::formal::{check_compatible, quadratic, quadratic_matrix, sfree_to_q, FormalFunction};
use crate::graded::{GradedSpace, Subspace};
use crate::matrix::Mat;
use crate::scalar::{one, Scalar};
use crate::symplectic::OddSympSpace;

/// An odd symplectic space with a compatible square-zero differential,
/// equivalently a quadratic free action `S = ½ s_ij φ^i φ^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgOddSympSpace {
    base: OddSympSpace,
    s: Mat,
    q: Mat,
}

impl DgOddSympSpace {
    pub fn from_differential(base: &OddSympSpace, q: &Mat) -> Result<Self> {
        check_compatible(base, q)?;
        if !q.mul(q).is_zero() {
            return Err(Error::NotCompatible("differential does not square to zero".into()));
        }
        let s = base.omega().mul(q).scale(&-one());
        Ok(DgOddSympSpace { base: base.clone(), s, q: q.clone() })
    }

    pub fn from_action(base: &OddSympSpace, s_free: &FormalFunction) -> Result<Self> {
        let q = sfree_to_q(s_free, base)?;
        DgOddSympSpace::from_differential(base, &q)
    }

    /// Zero differential.
    pub fn trivial(base: &OddSympSpace) -> Self {
        let n = base.dim();
        DgOddSympSpace { base: base.clone(), s: Mat::zeros(n, n), q: Mat::zeros(n, n) }
    }

    pub fn base(&self) -> &OddSympSpace {
        &self.base
    }

    pub fn space(&self) -> &GradedSpace {
        self.base.space()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn q(&self) -> &Mat {
        &self.q
    }

    /// Graded-symmetric coefficient matrix of the free action.
    pub fn s_matrix(&self) -> &Mat {
        &self.s
    }

    pub fn s_free(&self, w_max: i64) -> FormalFunction {
        quadratic(self.space(), &self.s, w_max)
    }

    /// `{S_free, f} + ℏΔf`. The free action is exact, so it is built one
    /// order past `f` to keep the bracket from losing precision.
    pub fn bv_differential(&self, f: &FormalFunction) -> Result<FormalFunction> {
        let s = self.s_free(f.w_max() + 2);
        s.bracket(f, &self.base)?.add(&f.hbar_laplacian(&self.base)?)
    }

    /// `(V1 × V2, Q1 ⊕ Q2)`.
    pub fn product(&self, other: &DgOddSympSpace) -> Self {
        DgOddSympSpace { base: self.base.product(&other.base), s: self.s.direct_sum(&other.s), q: self.q.direct_sum(&other.q) }
    }

    /// `N_ab = ω(e_a, Q e_b)` on the canonical basis of `I`.
    pub fn kernel_form(&self, i: &Subspace) -> Mat {
        let qi: Vec<_> = i.basis().iter().map(|v| self.q.apply(v)).collect();
        self.base.gram(i.basis(), &qi)
    }

    pub fn is_nondegenerate(&self, i: &Subspace) -> Result<bool> {
        if !self.base.is_isotropic(i)? {
            return Err(Error::NotIsotropic);
        }
        Ok(self.kernel_form(i).inverse().is_some())
    }

    /// The restriction of the free action to `I` is non-degenerate.
    pub fn restricted_action_nondegenerate(&self, i: &Subspace) -> Result<bool> {
        let restricted = self.s_free(2).restrict(i.basis())?;
        Ok(quadratic_matrix(&restricted)?.inverse().is_some())
    }

    /// `I ∩ (QI)^ω = 0`.
    pub fn meets_q_complement_trivially(&self, i: &Subspace) -> Result<bool> {
        let qi = Subspace::span(self.space(), &i.basis().iter().map(|v| self.q.apply(v)).collect::<Vec<_>>())?;
        Ok(i.intersect(&self.base.complement(&qi)?)?.is_zero())
    }

    pub fn canonical_decompose(&self, i: &Subspace) -> Result<CanonicalDecomposition> {
        CanonicalDecomposition::new(self, i)
    }
}

/// `V = R_can ⊕ I ⊕ QI` with `R_can = (I ⊕ QI)^ω`.
#[derive(Clone, Debug)]
pub struct CanonicalDecomposition {
    pub reduced: Vec<Vec<Scalar>>,
    pub isotrope: Vec<Vec<Scalar>>,
    pub image: Vec<Vec<Scalar>>,
    /// Columns `[R_can | I | QI]`.
    pub change_of_coords: Mat,
    /// Degrees of the new coordinates, in the same order.
    pub new_space: GradedSpace,
    /// Free action restricted to `I`, as a graded-symmetric matrix.
    pub s_isotrope: Mat,
    /// Free action restricted to `R_can`.
    pub s_reduced: Mat,
}

impl CanonicalDecomposition {
    fn new(dg: &DgOddSympSpace, i: &Subspace) -> Result<Self> {
        if !dg.is_nondegenerate(i)? {
            return Err(Error::Degenerate);
        }
        let v = dg.base();
        let n = dg.dim();
        let isotrope = i.basis().to_vec();
        let image: Vec<_> = isotrope.iter().map(|x| dg.q().apply(x)).collect();
        let span_iq = Subspace::span(v.space(), &isotrope.iter().chain(&image).cloned().collect::<Vec<_>>())?;
        let reduced = v.complement(&span_iq)?.basis().to_vec();
        let columns: Vec<_> = reduced.iter().chain(&isotrope).chain(&image).cloned().collect();
        let change_of_coords = Mat::from_cols(&columns, n);
        if change_of_coords.inverse().is_none() {
            return Err(Error::Degenerate);
        }
        let degrees = columns.iter().map(|c| v.space().degree_of(c).map(|d| d.expect("basis vectors are nonzero"))).collect::<Result<Vec<_>>>()?;
        let s_isotrope = quadratic_matrix(&dg.s_free(2).restrict(&isotrope)?)?;
        let s_reduced = quadratic_matrix(&dg.s_free(2).restrict(&reduced)?)?;
        Ok(CanonicalDecomposition { reduced, isotrope, image, change_of_coords, new_space: GradedSpace::new(degrees), s_isotrope, s_reduced })
    }

    pub fn reduced_space(&self, v: &OddSympSpace) -> Result<OddSympSpace> {
        v.restricted(&self.reduced)
    }

    pub fn r(&self) -> usize {
        self.reduced.len()
    }

    pub fn k(&self) -> usize {
        self.isotrope.len()
    }

    /// The pairing in the new coordinates, `Mᵀ ω M`.
    pub fn new_symplectic(&self, v: &OddSympSpace) -> Result<OddSympSpace> {
        let cols = self.change_of_coords.col_vectors();
        OddSympSpace::new(self.new_space.clone(), v.gram(&cols, &cols))
    }

    /// The six structural facts about the decomposition.
    pub fn verify(&self, dg: &DgOddSympSpace) -> Result<bool> {
        let v = dg.base();
        let space = v.space();
        let i = Subspace::span(space, &self.isotrope)?;
        let qi = Subspace::span(space, &self.image)?;
        let r = Subspace::span(space, &self.reduced)?;
        let ker_q = crate::graded::graded_kernel(space, &(0..dg.dim()).map(|k| dg.q().row(k)).collect::<Vec<_>>());
        let facts = [
            i.intersect(&ker_q)?.is_zero(),
            i.intersect(&qi)?.is_zero(),
            v.is_isotropic(&qi)?,
            v.flags(&i.sum(&qi)?)?.symplectic,
            v.complement(&i)? == r.sum(&i)?,
            self.reduced.iter().all(|x| r.contains_vector(&dg.q().apply(x))) && self.image.iter().all(|x| crate::matrix::is_zero_vec(&dg.q().apply(x))),
        ];
        Ok(facts.iter().all(|&b| b))
    }

    /// Special deformation retract onto `R_can`.
    pub fn sdr(&self, dg: &DgOddSympSpace) -> SdrData {
        let n = dg.dim();
        let (r, k) = (self.r(), self.k());
        let m_inv = self.change_of_coords.inverse().expect("checked at construction");
        let rows: Vec<usize> = (0..r).collect();
        let all: Vec<usize> = (0..n).collect();
        let projection = m_inv.submatrix(&rows, &all);
        let inclusion = Mat::from_cols(&self.reduced, n);
        let mut k_new = Mat::zeros(n, n);
        for a in 0..k {
            k_new[(r + a, r + k + a)] = -one();
        }
        let homotopy = self.change_of_coords.mul(&k_new).mul(&m_inv);
        let q_reduced = projection.mul(dg.q()).mul(&inclusion);
        SdrData { inclusion, projection, homotopy, q_reduced }
    }
}

/// `(i, p, k)` with `pi = 1`, `ip = 1 + Qk + kQ`, `k² = pk = ki = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdrData {
    pub inclusion: Mat,
    pub projection: Mat,
    pub homotopy: Mat,
    /// `p Q i` on `R_can`.
    pub q_reduced: Mat,
}

impl SdrData {
    pub fn identities_hold(&self, q: &Mat) -> bool {
        let n = q.rows();
        let (i, p, k) = (&self.inclusion, &self.projection, &self.homotopy);
        let r = i.cols();
        p.mul(i) == Mat::identity(r)
            && i.mul(p) == Mat::identity(n).add(&q.mul(k)).add(&k.mul(q))
            && k.mul(k).is_zero()
            && p.mul(k).is_zero()
            && k.mul(i).is_zero()
    }

    /// `i` preserves the pairing, `k` is skew for it: `ω(kv, w) = ±ω(v, kw)`,
    /// tested as `ω(kv, kw) = 0` together with `Im k` isotropic.
    pub fn symplectic_conditions_hold(&self, v: &OddSympSpace, reduced: &OddSympSpace) -> bool {
        let cols = self.inclusion.col_vectors();
        let kv: Vec<_> = self.homotopy.col_vectors();
        &v.gram(&cols, &cols) == reduced.omega() && v.gram(&kv, &kv).is_zero()
    }

    /// `Im k`, which recovers the isotrope.
    pub fn isotrope(&self, space: &GradedSpace) -> Result<Subspace> {
        Subspace::span(space, &self.homotopy.col_vectors())
    }

    /// `Q|_{R_can} = 0`.
    pub fn is_harmonious(&self) -> bool {
        self.q_reduced.is_zero()
    }

    /// Abstract Hodge data `(s, t) = (k, ip)`.
    pub fn hodge(&self) -> (Mat, Mat) {
        (self.homotopy.clone(), self.inclusion.mul(&self.projection))
    }
}
