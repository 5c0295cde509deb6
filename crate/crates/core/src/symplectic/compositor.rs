use super::relation::matched_pairs;
use super::{CoisotropicReduction, Relation};
use crate::error::{Error, Result};

/// The reduction `R_C × R_C′ ↠ R_{C′∘C}` sending `([v1,v2],[v2,v3])` to `[v1,v3]`,
/// together with the three reductions it is built from.
#[derive(Clone, Debug)]
pub struct Compositor {
    pub first: CoisotropicReduction,
    pub second: CoisotropicReduction,
    pub composite: Relation,
    pub composite_reduction: CoisotropicReduction,
    pub relation: Relation,
}

pub fn compositor(c: &Relation, c2: &Relation) -> Result<Compositor> {
    if c.target() != c2.source() {
        return Err(Error::SourceTargetMismatch);
    }
    let first = c.ambient().reduce(c.graph())?;
    let second = c2.ambient().reduce(c2.graph())?;
    let composite = c.then(c2)?;
    let composite_reduction = composite.ambient().reduce(composite.graph())?;
    let u = c.source().dim();
    let w = c2.target().dim();
    let vectors = matched_pairs(c.graph(), u, c2.graph())
        .into_iter()
        .map(|(x, y)| {
            let mut outer = x[..u].to_vec();
            outer.extend_from_slice(&y[y.len() - w..]);
            let mut v = first.project(&x)?;
            v.extend(second.project(&y)?);
            v.extend(composite_reduction.project(&outer)?);
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let source = first.reduced().product(second.reduced());
    let relation = Relation::from_vectors(&source, composite_reduction.reduced(), &vectors)?;
    Ok(Compositor { first, second, composite, composite_reduction, relation })
}
