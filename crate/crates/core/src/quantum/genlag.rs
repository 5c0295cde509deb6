use super::QuantumLInfty;
use crate::density::LinHalfDensity;
use crate::error::{Error, Result};
use crate::formal::FormalFunction;
use crate::graded::Subspace;
use crate::integral::{fiber_integral, BvValue, DgOddSympSpace};
use crate::matrix::Mat;
use crate::symplectic::{compositor, CoisotropicReduction, OddSympSpace, Relation};

/// A morphism `(C, fρ, S_free)`: a coisotropic relation `C`, a half-density
/// `fρ` on its reduction `R_C`, and a free action on `R_C`.
#[derive(Clone, Debug)]
pub struct GeneralizedLagrangian {
    coisotrope: Relation,
    reduction: CoisotropicReduction,
    function: FormalFunction,
    density: LinHalfDensity,
    dg: DgOddSympSpace,
}

impl PartialEq for GeneralizedLagrangian {
    fn eq(&self, other: &Self) -> bool {
        self.coisotrope == other.coisotrope && self.function == other.function && self.density == other.density && self.dg == other.dg
    }
}

impl GeneralizedLagrangian {
    pub fn new(coisotrope: Relation, function: FormalFunction, density: LinHalfDensity, s_free: &FormalFunction) -> Result<Self> {
        if !coisotrope.is_coisotropic() {
            return Err(Error::NotCoisotropic);
        }
        let reduction = coisotrope.ambient().reduce(coisotrope.graph())?;
        let reduced = reduction.reduced();
        if function.space() != reduced.space() || &density.space != reduced.space() {
            return Err(Error::SpaceMismatch);
        }
        let dg = DgOddSympSpace::from_action(reduced, s_free)?;
        Ok(GeneralizedLagrangian { coisotrope, reduction, function, density, dg })
    }

    /// `(L, 1, 0)`.
    pub fn from_relation(l: &Relation, w_max: i64) -> Result<Self> {
        let reduction = l.ambient().reduce(l.graph())?;
        let r = reduction.reduced().space().clone();
        let zero = FormalFunction::zero(&r, w_max);
        GeneralizedLagrangian::new(l.clone(), FormalFunction::one(&r, w_max), LinHalfDensity::standard(&r), &zero)
    }

    /// `(Δ_V, 1, 0)`.
    pub fn identity(v: &OddSympSpace, w_max: i64) -> Self {
        GeneralizedLagrangian::from_relation(&Relation::identity(v), w_max).expect("the diagonal is Lagrangian")
    }

    /// `(V, e^{S_int/ℏ} ρ, S_free)` as a morphism `* → V`.
    pub fn from_linfty(s: &QuantumLInfty, rho: &LinHalfDensity) -> Result<Self> {
        let v = s.space();
        let full = Relation::new(OddSympSpace::point(), v.clone(), Subspace::full(v.space()))?;
        let f = s.interaction().times_hbar(-1).exp()?;
        GeneralizedLagrangian::new(full, f, rho.clone(), &s.free_action())
    }

    pub fn coisotrope(&self) -> &Relation {
        &self.coisotrope
    }

    pub fn reduction(&self) -> &CoisotropicReduction {
        &self.reduction
    }

    pub fn function(&self) -> &FormalFunction {
        &self.function
    }

    pub fn density(&self) -> &LinHalfDensity {
        &self.density
    }

    pub fn dg(&self) -> &DgOddSympSpace {
        &self.dg
    }

    pub fn source(&self) -> &OddSympSpace {
        self.coisotrope.source()
    }

    pub fn target(&self) -> &OddSympSpace {
        self.coisotrope.target()
    }

    /// `(C, (ℏΔf + {S_free, f}) ρ, S_free)`.
    pub fn delta(&self) -> Result<Self> {
        Ok(GeneralizedLagrangian { function: self.dg.bv_differential(&self.function)?, ..self.clone() })
    }

    /// `G2 ∘ G1` with `G1 = self`: integrate `f1 ⊗ f2` along the compositor.
    /// `ℏΔ` then satisfies `ℏΔ(G2∘G1) = G2∘ℏΔG1 + (−1)^{deg f1} (ℏΔG2)∘G1`.
    pub fn then(&self, next: &GeneralizedLagrangian) -> Result<Self> {
        if self.target() != next.source() {
            return Err(Error::SourceTargetMismatch);
        }
        let x = compositor(&self.coisotrope, &next.coisotrope)?;
        let product = self.dg.product(&next.dg);
        let (r1, r2) = (self.dg.dim(), next.dg.dim());
        let space = product.space().clone();
        let first = Mat::identity(r1).hstack(&Mat::zeros(r1, r2));
        let second = Mat::zeros(r2, r1).hstack(&Mat::identity(r2));
        let f = self.function.substitute(&first, &space)?.mul(&next.function.substitute(&second, &space)?)?;
        let rho = LinHalfDensity::new(space, self.density.coefficient.mul(&next.density.coefficient));
        let pushed = fiber_integral(&product, &f, &rho, &x.relation).map_err(|e| match e {
            Error::Degenerate => Error::NonComposable,
            other => other,
        })?;
        Ok(GeneralizedLagrangian {
            coisotrope: x.composite,
            reduction: x.composite_reduction,
            function: pushed.function,
            density: pushed.density,
            dg: pushed.transferred,
        })
    }

    /// `⟨G1, G2⟩` for `G1: * → V`, `G2: V → *`.
    pub fn pair(&self, other: &GeneralizedLagrangian) -> Result<BvValue> {
        if self.source().dim() != 0 || other.target().dim() != 0 {
            return Err(Error::SourceTargetMismatch);
        }
        let g = self.then(other)?;
        Ok(BvValue { series: g.function, prefactor: g.density.coefficient })
    }
}
