use crate::density::LinHalfDensity;
use crate::error::{Error, Result};
use crate::formal::{FormalFunction, Monomial};
use crate::graded::GradedSpace;
use crate::integral::{DgOddSympSpace, FiberChart, HplData};
use crate::scalar::ratio;
use crate::symplectic::{OddSympSpace, Relation};

/// `S = Σ ℏ^g S^g_n` with `n ≥ 1`, `g ≥ 0`, `2g + n ≥ 2`, where the free
/// part `S^0_2` encodes a compatible square-zero differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantumLInfty {
    dg: DgOddSympSpace,
    action: FormalFunction,
}

fn is_free(m: &Monomial) -> bool {
    m.hbar_power() == 0 && m.polynomial_degree() == 2
}

impl QuantumLInfty {
    pub fn new(space: &OddSympSpace, action: FormalFunction) -> Result<Self> {
        if action.space() != space.space() {
            return Err(Error::SpaceMismatch);
        }
        for (m, _) in action.terms() {
            let (n, g) = (m.polynomial_degree() as i64, m.hbar_power());
            if n < 1 || g < 0 || 2 * g + n < 2 {
                return Err(Error::MalformedAction(format!("component ℏ^{g}·(arity {n}) is not allowed")));
            }
        }
        if !action.is_of_degree(0) {
            return Err(Error::MalformedAction("action must have degree 0".into()));
        }
        let free = action.filter(is_free);
        let dg = DgOddSympSpace::from_action(space, &free).map_err(|e| Error::MalformedAction(e.to_string()))?;
        Ok(QuantumLInfty { dg, action })
    }

    /// The free theory of a dg space.
    pub fn free(dg: &DgOddSympSpace, w_max: i64) -> Self {
        QuantumLInfty { dg: dg.clone(), action: dg.s_free(w_max) }
    }

    pub fn space(&self) -> &OddSympSpace {
        self.dg.base()
    }

    pub fn dg(&self) -> &DgOddSympSpace {
        &self.dg
    }

    pub fn action(&self) -> &FormalFunction {
        &self.action
    }

    pub fn w_max(&self) -> i64 {
        self.action.w_max()
    }

    pub fn free_action(&self) -> FormalFunction {
        self.action.filter(is_free)
    }

    pub fn interaction(&self) -> FormalFunction {
        self.action.filter(|m| !is_free(m))
    }

    /// `½{S_int, S_int} + {S_free, S_int} + ℏΔS_int`, exact up to `W_max`.
    pub fn qme_residual(&self) -> Result<FormalFunction> {
        let v = self.space();
        let s_int = self.interaction();
        let half_bracket = s_int.bracket(&s_int, v)?.scale(&ratio(1, 2));
        half_bracket.add(&self.dg.bv_differential(&s_int)?)
    }

    pub fn check_qme(&self) -> Result<bool> {
        Ok(self.qme_residual()?.is_zero())
    }

    /// The three equivalent forms of the master equation:
    /// `½{S,S} + ℏΔS = 0`, `(Q + ℏΔ) e^{S_int/ℏ} = 0`, and the decomposed one.
    pub fn qme_forms(&self) -> Result<[bool; 3]> {
        let v = self.space();
        let s = &self.action;
        let whole = s.bracket(s, v)?.scale(&ratio(1, 2)).add(&s.hbar_laplacian(v)?)?;
        let exponential = self.interaction().times_hbar(-1).exp()?;
        let twisted = self.dg.bv_differential(&exponential)?;
        Ok([whole.is_zero(), twisted.is_zero(), self.check_qme()?])
    }
}

/// The result of pushing a quantum L∞ algebra along a reduction.
#[derive(Clone, Debug)]
pub struct Transfer {
    pub action: QuantumLInfty,
    /// The arity-zero part of `ℏ log Z`, a series in `ℏ` on the point.
    pub vacuum: FormalFunction,
    /// The push-forward of the standard half-density.
    pub density: LinHalfDensity,
}

fn split_effective(chart: &FiberChart, partition: FormalFunction, w_max: i64, source: &GradedSpace) -> Result<Transfer> {
    let target = chart.transferred(w_max)?;
    let effective = partition.log()?.times_hbar(1);
    let vacuum_terms: Vec<_> = effective.terms().filter(|(m, _)| m.polynomial_degree() == 0).map(|(m, c)| (m.clone(), c.clone())).collect();
    let vacuum = FormalFunction::from_terms(&GradedSpace::point(), vacuum_terms, effective.w_max());
    let interaction = effective.filter(|m| m.polynomial_degree() > 0);
    if interaction.min_hbar_power().is_some_and(|g| g < 0) {
        return Err(Error::MalformedAction("effective interaction has a negative power of ℏ".into()));
    }
    let action = target.s_free(w_max).add(&interaction)?;
    let density = chart.push_density(&LinHalfDensity::standard(source))?;
    Ok(Transfer { action: QuantumLInfty::new(target.base(), action)?, vacuum, density })
}

/// `W` with `e^{W/ℏ} ∝ ∫_L e^{S_int/ℏ}`, plus the transferred free part,
/// computed by Wick contraction.
pub fn transfer(s: &QuantumLInfty, l: &Relation) -> Result<Transfer> {
    let chart = FiberChart::new(s.dg(), l)?;
    let integrand = s.interaction().times_hbar(-1).exp()?;
    let partition = chart.gaussian(&integrand)?;
    split_effective(&chart, partition, s.w_max(), s.space().space())
}

/// The same transfer through the perturbed projection `P′`.
pub fn transfer_hpl(s: &QuantumLInfty, l: &Relation) -> Result<Transfer> {
    let data = HplData::new(s.dg(), l)?;
    let integrand = data.chart.to_new_coordinates(&s.interaction().times_hbar(-1).exp()?)?;
    let partition = data.chart.to_target(&data.perturbed_projection(&integrand)?)?;
    split_effective(&data.chart, partition, s.w_max(), s.space().space())
}

pub fn effective_action(s: &QuantumLInfty, l: &Relation) -> Result<QuantumLInfty> {
    Ok(transfer(s, l)?.action)
}
