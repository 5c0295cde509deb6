use crate::error::{Error, Result};
use crate::formal::{FormalFunction, Monomial};
use crate::graded::GradedSpace;
use crate::matrix::Mat;
use crate::scalar::{one, zero, Scalar};

/// `Σ_pairings ± Π G_{a b}` over perfect matchings of the word `indices`.
/// The sign is the Koszul sign of bringing each partner next to the first
/// element of its pair.
pub fn wick_sum(indices: &[usize], odd: &[bool], propagator: &Mat) -> Scalar {
    if indices.is_empty() {
        return one();
    }
    if indices.len() % 2 == 1 {
        return zero();
    }
    let first = indices[0];
    let mut total = zero();
    for j in 1..indices.len() {
        let g = &propagator[(first, indices[j])];
        if g == &zero() {
            continue;
        }
        let crossed = indices[1..j].iter().filter(|&&i| odd[i]).count();
        let negative = odd[indices[j]] && crossed % 2 == 1;
        let mut rest = indices[1..j].to_vec();
        rest.extend_from_slice(&indices[j + 1..]);
        let sub = wick_sum(&rest, odd, propagator);
        let term = g * sub;
        total += if negative { -term } else { term };
    }
    total
}

/// `∫ f` against the Gaussian `exp(½ σ_ab γ^a γ^b / ℏ)`, normalized to 1:
/// each pair contributes `−ℏ (σ⁻¹)_{ab}`. The result lives on the point.
pub fn wick_integrate(f: &FormalFunction, sigma: &Mat) -> Result<FormalFunction> {
    let space = f.space();
    if sigma.rows() != space.dim() || sigma.cols() != space.dim() {
        return Err(Error::DimensionMismatch("quadratic form does not match the space".into()));
    }
    let propagator = sigma.inverse().ok_or(Error::Degenerate)?.scale(&-one());
    let odd = space.parities();
    let terms = f.terms().filter_map(|(m, c)| {
        let value = wick_sum(m.indices(), &odd, &propagator);
        (value != zero()).then(|| (Monomial::new(Vec::new(), m.hbar_power() + (m.polynomial_degree() / 2) as i64), c * value))
    });
    Ok(FormalFunction::from_terms(&GradedSpace::point(), terms.collect::<Vec<_>>(), f.w_max()))
}
