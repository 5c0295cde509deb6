use super::{DgOddSympSpace, FiberChart};
use crate::error::{Error, Result};
use crate::formal::{FormalFunction, Monomial};
use crate::matrix::Mat;
use crate::scalar::{int, sign, zero, Scalar};
use crate::symplectic::{OddSympSpace, Relation};

/// The homotopy data on functions in the coordinates `(r, γ, β)` adapted to
/// `V = R_can ⊕ I ⊕ QI`: `d = {S, ·}` sends `β^a ↦ Σ_b D_ba γ^b`, the
/// contraction `h` sends `γ^b ↦ Σ_a (D⁻¹)_ab β^a`, and `K = −h/N` where `N`
/// counts fibre factors.
#[derive(Clone, Debug)]
pub struct HplData {
    pub chart: FiberChart,
    pub symplectic: OddSympSpace,
    contraction: Mat,
}

impl HplData {
    pub fn new(dg: &DgOddSympSpace, l: &Relation) -> Result<Self> {
        let chart = FiberChart::new(dg, l)?;
        let symplectic = chart.decomposition.new_symplectic(dg.base())?;
        let (r, k) = (chart.decomposition.r(), chart.decomposition.k());
        let s_new = chart.to_new_coordinates(&dg.s_free(2))?;
        let mut d = Mat::zeros(k, k);
        for a in 0..k {
            let beta = FormalFunction::coordinate(&chart.decomposition.new_space, r + k + a, 2);
            let image = s_new.bracket(&beta, &symplectic)?;
            for (m, c) in image.terms() {
                match m.indices() {
                    [i] if (r..r + k).contains(i) => d[(i - r, a)] = c.clone(),
                    _ => return Err(Error::NotCompatible("differential does not map β into γ".into())),
                }
            }
        }
        let contraction = d.inverse().ok_or(Error::Degenerate)?;
        Ok(HplData { chart, symplectic, contraction })
    }

    fn r(&self) -> usize {
        self.chart.decomposition.r()
    }

    fn k(&self) -> usize {
        self.chart.decomposition.k()
    }

    pub fn d(&self, f: &FormalFunction, s_new: &FormalFunction) -> Result<FormalFunction> {
        s_new.bracket(f, &self.symplectic)
    }

    /// The odd derivation `h`.
    pub fn contract(&self, f: &FormalFunction) -> FormalFunction {
        let (r, k) = (self.r(), self.k());
        let space = f.space();
        let mut terms: Vec<(Monomial, Scalar)> = Vec::new();
        for (m, c) in f.terms() {
            let idx = m.indices();
            for (pos, &b) in idx.iter().enumerate() {
                if !(r..r + k).contains(&b) {
                    continue;
                }
                let before = idx[..pos].iter().filter(|&&j| space.is_odd(j)).count();
                let c = c * sign(space.is_odd(b) && before % 2 == 1);
                let mut rest = idx.to_vec();
                rest.remove(pos);
                for a in 0..k {
                    let x = &self.contraction[(a, b - r)];
                    if x == &zero() {
                        continue;
                    }
                    let mut word = vec![r + k + a];
                    word.extend_from_slice(&rest);
                    terms.push((Monomial::new(word, m.hbar_power()), &c * x));
                }
            }
        }
        FormalFunction::from_terms(space, terms, f.w_max())
    }

    fn fibre_count(&self, m: &Monomial) -> usize {
        m.indices().iter().filter(|&&i| i >= self.r()).count()
    }

    /// `K = −h N⁻¹`.
    pub fn homotopy(&self, f: &FormalFunction) -> FormalFunction {
        let hf = self.contract(f);
        let terms: Vec<_> = hf.terms().map(|(m, c)| (m.clone(), -(c / int(self.fibre_count(m) as i64)))).collect();
        FormalFunction::from_terms(f.space(), terms, f.w_max())
    }

    /// `P`: set every fibre coordinate to zero.
    pub fn project(&self, f: &FormalFunction) -> FormalFunction {
        let r = self.r();
        f.filter(|m| m.indices().iter().all(|&i| i < r))
    }

    /// `P Σ_n (ℏΔK)^n f`, in the coordinates `(r, γ, β)`.
    pub fn perturbed_projection(&self, f: &FormalFunction) -> Result<FormalFunction> {
        let mut acc = self.project(f);
        let mut g = f.clone();
        loop {
            g = self.homotopy(&g).hbar_laplacian(&self.symplectic)?;
            let g_w = FormalFunction::from_terms(g.space(), g.terms().map(|(m, c)| (m.clone(), c.clone())), f.w_max());
            if g_w.is_zero() {
                break;
            }
            acc = acc.add(&self.project(&g_w))?;
            g = g_w;
        }
        Ok(acc)
    }
}

/// `P′ f` pushed to the target of `L`: the fiber integral computed by
/// homological perturbation instead of Wick contraction.
pub fn hpl_projection(dg: &DgOddSympSpace, f: &FormalFunction, l: &Relation) -> Result<FormalFunction> {
    let data = HplData::new(dg, l)?;
    let f_new = data.chart.to_new_coordinates(f)?;
    let p = data.perturbed_projection(&f_new)?;
    data.chart.to_target(&p)
}
