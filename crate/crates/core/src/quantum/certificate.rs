use super::linfty::{transfer, QuantumLInfty, Transfer};
use crate::error::{Error, Result};
use crate::formal::FormalFunction;
use crate::integral::BvValue;
use crate::symplectic::{factorize, orthogonal_span, pushout_span, FactorizationCospan, Relation};

/// The verdict on `S_U ∼ S_V via L`, with the evidence behind it.
#[derive(Clone, Debug)]
pub struct RelationCertificate {
    pub relation: Relation,
    pub cospan: FactorizationCospan,
    pub source: QuantumLInfty,
    pub target: QuantumLInfty,
    pub kernels_nondegenerate: bool,
    pub differentials_agree: bool,
    pub densities_agree: bool,
    /// `S_U` pushed along the left leg, `S_V` along the right leg.
    pub left: Option<Transfer>,
    pub right: Option<Transfer>,
    /// `ρ_U`-side over `ρ_V`-side on the middle space, for standard `ρ_U, ρ_V`.
    pub ratio: Option<BvValue>,
}

impl RelationCertificate {
    pub fn holds(&self) -> bool {
        self.kernels_nondegenerate && self.differentials_agree && self.densities_agree
    }
}

fn compare(left: &Transfer, right: &Transfer) -> Result<(bool, bool, BvValue)> {
    let differentials = left.action.dg().q() == right.action.dg().q();
    let densities = left.action.interaction().agrees_with(&right.action.interaction());
    let series = left.vacuum.sub(&right.vacuum)?.times_hbar(-1).exp()?;
    let prefactor = left.density.coefficient.div(&right.density.coefficient)?;
    Ok((differentials, densities, BvValue { series, prefactor }))
}

fn same_order(a: &QuantumLInfty, b: &QuantumLInfty) -> Result<()> {
    if a.w_max() == b.w_max() {
        Ok(())
    } else {
        Err(Error::TruncationMismatch)
    }
}

pub fn check_relation(s_u: &QuantumLInfty, s_v: &QuantumLInfty, l: &Relation) -> Result<RelationCertificate> {
    if l.source() != s_u.space() || l.target() != s_v.space() {
        return Err(Error::SourceTargetMismatch);
    }
    same_order(s_u, s_v)?;
    let cospan = factorize(l)?;
    let nondegenerate = s_u.dg().is_nondegenerate(&cospan.left.kernel())? && s_v.dg().is_nondegenerate(&cospan.right.kernel())?;
    let mut cert = RelationCertificate {
        relation: l.clone(),
        cospan,
        source: s_u.clone(),
        target: s_v.clone(),
        kernels_nondegenerate: nondegenerate,
        differentials_agree: false,
        densities_agree: false,
        left: None,
        right: None,
        ratio: None,
    };
    if !nondegenerate {
        return Ok(cert);
    }
    let left = transfer(s_u, &cert.cospan.left)?;
    let right = transfer(s_v, &cert.cospan.right)?;
    let (differentials, densities, ratio) = compare(&left, &right)?;
    cert.differentials_agree = differentials;
    cert.densities_agree = densities;
    cert.left = Some(left);
    cert.right = Some(right);
    cert.ratio = Some(ratio);
    Ok(cert)
}

fn then_transfer(first: &Transfer, l: &Relation) -> Result<Transfer> {
    let second = transfer(&first.action, l)?;
    let vacuum: FormalFunction = first.vacuum.add(&second.vacuum)?;
    let density = second.density.scale(&first.density.coefficient);
    Ok(Transfer { action: second.action, vacuum, density })
}

/// `S_U ∼ S_W via L2 ∘ L1`, assembled from the pushout of the inner legs
/// and two-step transfers.
pub fn compose_relations(first: &RelationCertificate, second: &RelationCertificate) -> Result<RelationCertificate> {
    if !first.holds() || !second.holds() {
        return Err(Error::InvalidCertificate);
    }
    if first.relation.target() != second.relation.source() {
        return Err(Error::SourceTargetMismatch);
    }
    same_order(&first.source, &second.target)?;
    let (inner_left, inner_right) = (&first.cospan.right, &second.cospan.left);
    if !orthogonal_span(inner_left, inner_right)? {
        return Err(Error::NotOrthogonal);
    }
    let square = pushout_span(inner_left, inner_right)?;
    let cospan = FactorizationCospan {
        left: first.cospan.left.then(&square.left)?,
        right: second.cospan.right.then(&square.right)?,
        middle: square.middle.clone(),
    };
    let (s_u, s_w) = (&first.source, &second.target);
    let nondegenerate = s_u.dg().is_nondegenerate(&cospan.left.kernel())? && s_w.dg().is_nondegenerate(&cospan.right.kernel())?;
    let left = then_transfer(first.left.as_ref().ok_or(Error::InvalidCertificate)?, &square.left)?;
    let right = then_transfer(second.right.as_ref().ok_or(Error::InvalidCertificate)?, &square.right)?;
    let (differentials, densities, ratio) = compare(&left, &right)?;
    Ok(RelationCertificate {
        relation: first.relation.then(&second.relation)?,
        cospan,
        source: s_u.clone(),
        target: s_w.clone(),
        kernels_nondegenerate: nondegenerate,
        differentials_agree: differentials,
        densities_agree: densities,
        left: Some(left),
        right: Some(right),
        ratio: Some(ratio),
    })
}
