use super::{OddSympSpace, Relation};
use crate::error::{Error, Result};
use crate::graded::Subspace;
use crate::matrix::Mat;

/// `L = right^T ∘ left` with both legs reductions onto `middle`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationCospan {
    pub left: Relation,
    pub right: Relation,
    pub middle: OddSympSpace,
}

impl FactorizationCospan {
    pub fn recompose(&self) -> Result<Relation> {
        self.left.then(&self.right.transpose())
    }

    /// The comparison map `other.left ∘ self.left^T`, when it is a
    /// symplectomorphism carrying one cospan onto the other.
    pub fn equivalence_to(&self, other: &FactorizationCospan) -> Option<Relation> {
        let phi = self.left.transpose().then(&other.left).ok()?;
        let iso = phi.is_reduction().ok()? && phi.is_coreduction().ok()?;
        let agrees = self.left.then(&phi).ok()? == other.left && self.right.then(&phi).ok()? == other.right;
        (iso && agrees).then_some(phi)
    }

    pub fn is_equivalent(&self, other: &FactorizationCospan) -> bool {
        self.equivalence_to(other).is_some()
    }
}

/// The unique (up to isomorphism) cospan of reductions through
/// `Im L^T / ker L`.
pub fn factorize(l: &Relation) -> Result<FactorizationCospan> {
    if !l.is_lagrangian() {
        return Err(Error::NotLagrangian);
    }
    let (u, v) = (l.source(), l.target());
    let left = u.reduce(&l.transpose().image())?;
    let right = v.reduce(&l.image())?;
    let middle = left.reduced().clone();
    let dim = middle.dim();
    let phi_cols = left
        .representatives()
        .iter()
        .map(|c| right.project(&l.apply(c)?))
        .collect::<Result<Vec<_>>>()?;
    let phi = Mat::from_cols(&phi_cols, right.reduced().dim());
    let phi_inv = phi.inverse().ok_or(Error::NotInvertible)?;
    debug_assert_eq!(phi.rows(), dim);
    let back = Relation::graph_of(right.reduced(), &middle, &phi_inv)?;
    let right_leg = right.relation().then(&back)?;
    Ok(FactorizationCospan { left: left.relation(), right: right_leg, middle })
}

/// `V = R ⊕ I ⊕ B` for a coisotrope `C = R ⊕ I`, `I = C^ω`, with `B` an
/// isotropic complement of `C` and `R = (I ⊕ B)^ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoisotropeDecomposition {
    pub reduced: Subspace,
    pub isotrope: Subspace,
    pub complement: Subspace,
}

/// Builds `B` one degree pair `{n, 1 − n}` at a time, adding the first
/// canonical basis vector of `(B^ω)_k` outside `B ⊕ C` until
/// `dim B_k = dim I_{1−k}`.
pub fn decompose_coisotrope(v: &OddSympSpace, c: &Subspace) -> Result<CoisotropeDecomposition> {
    let isotrope = v.complement(c)?;
    if !c.contains(&isotrope)? {
        return Err(Error::NotCoisotropic);
    }
    let space = v.space();
    let mut b = Subspace::zero(space);
    let top = space.distinct_degrees().into_iter().map(|d| d.max(1 - d)).max().unwrap_or(0);
    for n in 1..=top {
        for k in [n, 1 - n] {
            let wanted = isotrope.dimsum().coefficient(1 - k);
            while b.dimsum().coefficient(k) < wanted {
                let b_perp = v.complement(&b)?;
                let occupied = b.sum(c)?;
                let pick = b_perp
                    .vectors_of_degree(k)
                    .into_iter()
                    .find(|x| !occupied.contains_vector(x))
                    .expect("a fresh complement vector exists while the isotrope is unmatched");
                b = b.sum(&Subspace::span(space, &[pick])?)?;
            }
        }
    }
    let reduced = v.complement(&isotrope.sum(&b)?)?;
    Ok(CoisotropeDecomposition { reduced, isotrope, complement: b })
}

fn require_reduction(l: &Relation) -> Result<()> {
    if l.is_reduction()? {
        Ok(())
    } else {
        Err(Error::NotReduction)
    }
}

/// `ω(ker L, ker L̃) = 0` for reductions with a common source.
pub fn orthogonal_span(l: &Relation, lt: &Relation) -> Result<bool> {
    if l.source() != lt.source() {
        return Err(Error::SourceTargetMismatch);
    }
    require_reduction(l)?;
    require_reduction(lt)?;
    Ok(l.source().gram(l.kernel().basis(), lt.kernel().basis()).is_zero())
}

/// The candidate square: factorization of `L̃ ∘ L^T`, with no orthogonality
/// check. The square `K ∘ L = K̃ ∘ L̃` commutes exactly for orthogonal spans.
pub fn span_cospan(l: &Relation, lt: &Relation) -> Result<FactorizationCospan> {
    factorize(&l.transpose().then(lt)?)
}

pub fn square_commutes(l: &Relation, lt: &Relation, cospan: &FactorizationCospan) -> Result<bool> {
    Ok(l.then(&cospan.left)? == lt.then(&cospan.right)?)
}

/// Pushout of a span of reductions in the category of reductions.
pub fn pushout_span(l: &Relation, lt: &Relation) -> Result<FactorizationCospan> {
    if !orthogonal_span(l, lt)? {
        return Err(Error::NotOrthogonal);
    }
    span_cospan(l, lt)
}

/// `K` with `K ∘ L = M`, which exists iff `Im M^T ⊆ Im L^T`.
pub fn factor_through(m: &Relation, l: &Relation) -> Result<Relation> {
    if m.source() != l.source() {
        return Err(Error::SourceTargetMismatch);
    }
    require_reduction(m)?;
    require_reduction(l)?;
    if !l.transpose().image().contains(&m.transpose().image())? {
        return Err(Error::DoesNotFactor);
    }
    let k = l.transpose().then(m)?;
    if l.then(&k)? != *m {
        return Err(Error::DoesNotFactor);
    }
    Ok(k)
}
