//! BV integrals over Lagrangians and fiber integrals along reductions.
//!
//! Both reduce to a Gaussian expectation over the kernel `I` of a
//! reduction, computed by Wick's theorem with propagator
//! `⟨γ^a γ^b⟩ = −ℏ (σ⁻¹)_{ab}` where `S|_I = ½ σ_ab γ^a γ^b`. Homological
//! perturbation over the same decomposition gives an independent route.

mod dg;
mod hpl;
mod wick;

pub use dg::{CanonicalDecomposition, DgOddSympSpace, SdrData};
pub use hpl::{hpl_projection, HplData};
pub use wick::{wick_integrate, wick_sum};

use crate::density::{LinHalfDensity, Prefactor};
use crate::error::{Error, Result};
use crate::formal::{quadratic, FormalFunction, Monomial};
use crate::graded::{GradedSpace, Subspace};
use crate::matrix::Mat;
use crate::scalar::{one, zero, Scalar};
use crate::symplectic::{compose_graphs, OddSympSpace, Relation};

/// A number of the form `(Laurent series in ℏ) · prefactor`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BvValue {
    pub series: FormalFunction,
    pub prefactor: Prefactor,
}

/// `f_R · ρ_R` on the target of a reduction, plus the transferred free action.
#[derive(Clone, Debug)]
pub struct FiberIntegral {
    /// The normalized integral: Gaussian expectation over the fibre.
    pub function: FormalFunction,
    pub density: LinHalfDensity,
    pub transferred: DgOddSympSpace,
}

/// Everything about a non-degenerate reduction `L: V ↠ R` needed to push
/// functions and densities forward.
#[derive(Clone, Debug)]
pub struct FiberChart {
    pub decomposition: CanonicalDecomposition,
    /// `R_can` coordinates to `R` coordinates.
    pub transport: Mat,
    pub transport_inv: Mat,
    pub reduced_space: GradedSpace,
    pub target: OddSympSpace,
}

impl FiberChart {
    pub fn new(dg: &DgOddSympSpace, l: &Relation) -> Result<Self> {
        if l.source() != dg.base() {
            return Err(Error::SourceTargetMismatch);
        }
        if !l.is_reduction()? {
            return Err(Error::NotReduction);
        }
        let decomposition = dg.canonical_decompose(&l.kernel())?;
        let target = l.target().clone();
        let cols = decomposition.reduced.iter().map(|r| l.apply(r)).collect::<Result<Vec<_>>>()?;
        let transport = Mat::from_cols(&cols, target.dim());
        let transport_inv = transport.inverse().ok_or(Error::NotInvertible)?;
        let reduced_space = GradedSpace::new(decomposition.new_space.degrees()[..decomposition.r()].to_vec());
        Ok(FiberChart { decomposition, transport, transport_inv, reduced_space, target })
    }

    /// Pulls `f` back to the coordinates `(r, γ, β)`.
    pub fn to_new_coordinates(&self, f: &FormalFunction) -> Result<FormalFunction> {
        f.substitute(&self.decomposition.change_of_coords, &self.decomposition.new_space)
    }

    /// Rewrites a function of `r` alone on `R_can`, then moves it to `R`.
    pub fn to_target(&self, f: &FormalFunction) -> Result<FormalFunction> {
        let r = self.decomposition.r();
        if f.terms().any(|(m, _)| m.indices().iter().any(|&i| i >= r)) {
            return Err(Error::NotASubspace("function depends on fibre coordinates".into()));
        }
        let on_reduced = FormalFunction::from_terms(&self.reduced_space, f.terms().map(|(m, c)| (m.clone(), c.clone())), f.w_max());
        on_reduced.substitute(&self.transport_inv, self.target.space())
    }

    /// Normalization `(2π)^{dim I_even/2} ℏ^{(dim I_even − dim I_odd)/2} ρ(e_R, e_I, Q e_I)`,
    /// as the value of the pushed-forward density on `R`.
    pub fn push_density(&self, rho: &LinHalfDensity) -> Result<LinHalfDensity> {
        let cd = &self.decomposition;
        let fibre = &cd.new_space.degrees()[cd.r()..cd.r() + cd.k()];
        let o = fibre.iter().filter(|d| d.rem_euclid(2) == 1).count() as i64;
        let e = fibre.len() as i64 - o;
        let value = Prefactor::powers(e, e - o).mul(&rho.evaluate(&cd.change_of_coords.col_vectors())?);
        LinHalfDensity::from_value(self.target.space(), &self.transport.col_vectors(), value)
    }

    pub fn transferred(&self, w_max: i64) -> Result<DgOddSympSpace> {
        let s_can = quadratic(&self.reduced_space, &self.decomposition.s_reduced, w_max);
        let s_r = s_can.substitute(&self.transport_inv, self.target.space())?;
        DgOddSympSpace::from_action(&self.target, &s_r)
    }

    /// Wick expectation over `γ` of `f` restricted to `β = 0`.
    pub fn gaussian(&self, f: &FormalFunction) -> Result<FormalFunction> {
        let cd = &self.decomposition;
        let (r, k) = (cd.r(), cd.k());
        let propagator = cd.s_isotrope.inverse().ok_or(Error::Degenerate)?.scale(&-one());
        let parities = cd.new_space.parities();
        let mut terms: Vec<(Monomial, Scalar)> = Vec::new();
        for (m, c) in self.to_new_coordinates(f)?.terms() {
            let idx = m.indices();
            if idx.iter().any(|&i| i >= r + k) {
                continue;
            }
            let split = idx.iter().position(|&i| i >= r).unwrap_or(idx.len());
            let fibre: Vec<usize> = idx[split..].iter().map(|&i| i - r).collect();
            if fibre.len() % 2 == 1 {
                continue;
            }
            let value = wick_sum(&fibre, &parities[r..r + k], &propagator);
            if value == zero() {
                continue;
            }
            terms.push((Monomial::new(idx[..split].to_vec(), m.hbar_power() + (fibre.len() / 2) as i64), c * value));
        }
        let on_reduced = FormalFunction::from_terms(&self.reduced_space, terms, f.w_max());
        on_reduced.substitute(&self.transport_inv, self.target.space())
    }
}

/// `∫_{V→R} f ρ` along a reduction whose kernel is non-degenerate.
pub fn fiber_integral(dg: &DgOddSympSpace, f: &FormalFunction, rho: &LinHalfDensity, l: &Relation) -> Result<FiberIntegral> {
    if f.space() != dg.space() || &rho.space != dg.space() {
        return Err(Error::SpaceMismatch);
    }
    let chart = FiberChart::new(dg, l)?;
    Ok(FiberIntegral { function: chart.gaussian(f)?, density: chart.push_density(rho)?, transferred: chart.transferred(f.w_max())? })
}

/// `∫_L f ρ` for a non-degenerate Lagrangian `L`.
pub fn bv_integral_lagrangian(dg: &DgOddSympSpace, f: &FormalFunction, rho: &LinHalfDensity, l: &Subspace) -> Result<BvValue> {
    if !dg.base().is_lagrangian(l)? {
        return Err(Error::NotLagrangian);
    }
    let point = OddSympSpace::point();
    let relation = Relation::new(dg.base().clone(), point.clone(), Subspace::span(&dg.space().product(point.space()), l.basis())?)?;
    let fi = fiber_integral(dg, f, rho, &relation)?;
    Ok(BvValue { series: fi.function, prefactor: fi.density.coefficient })
}

/// The map on `R` induced by `Q` through the SDR: `T · pQi · T⁻¹`.
pub fn transferred_differential(dg: &DgOddSympSpace, l: &Relation) -> Result<Mat> {
    let chart = FiberChart::new(dg, l)?;
    let sdr = chart.decomposition.sdr(dg);
    Ok(chart.transport.mul(&sdr.q_reduced).mul(&chart.transport_inv))
}

/// The same map as the linear relation `L ∘ graph(Q) ∘ L^T` on `R × R[1]`.
pub fn transferred_differential_via_relations(dg: &DgOddSympSpace, l: &Relation) -> Result<Mat> {
    if !l.is_reduction()? {
        return Err(Error::NotReduction);
    }
    let v = dg.space();
    let r = l.target().space();
    let (n, m) = (v.dim(), r.dim());
    let shifted_v = v.shift(1);
    let shifted_r = r.shift(1);
    let q_graph = Subspace::span(
        &v.product(&shifted_v),
        &(0..n)
            .map(|j| {
                let mut x = v.unit(j);
                x.extend(dg.q().col(j));
                x
            })
            .collect::<Vec<_>>(),
    )?;
    let shifted_l = Subspace::span(&shifted_v.product(&shifted_r), l.graph().basis())?;
    let lt = l.transpose();
    let first = compose_graphs(lt.graph(), m, &q_graph, n, &r.product(&shifted_v));
    let composite = compose_graphs(&first, m, &shifted_l, m, &r.product(&shifted_r));
    relation_matrix(&composite, m, m)
}

/// The matrix of a linear relation `G ⊆ A × B` that is the graph of a map.
pub fn relation_matrix(graph: &Subspace, a: usize, b: usize) -> Result<Mat> {
    let basis = graph.basis();
    if basis.len() != a {
        return Err(Error::NotASubspace("relation is not the graph of a map".into()));
    }
    let top = Mat::from_cols(&basis.iter().map(|x| x[..a].to_vec()).collect::<Vec<_>>(), a);
    let bottom = Mat::from_cols(&basis.iter().map(|x| x[a..a + b].to_vec()).collect::<Vec<_>>(), b);
    let top_inv = top.inverse().ok_or_else(|| Error::NotASubspace("relation is not the graph of a map".into()))?;
    Ok(bottom.mul(&top_inv))
}
