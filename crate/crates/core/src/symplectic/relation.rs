use super::OddSympSpace;
use crate::error::{Error, Result};
use crate::graded::{GradedSpace, Subspace};
use crate::matrix::Mat;
use crate::scalar::{zero, Scalar};

/// A linear relation `source → target`: a subspace of `sourcē × target`,
/// where the bar negates the source pairing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    source: OddSympSpace,
    target: OddSympSpace,
    graph: Subspace,
}

impl Relation {
    pub fn new(source: OddSympSpace, target: OddSympSpace, graph: Subspace) -> Result<Self> {
        if graph.ambient() != &source.space().product(target.space()) {
            return Err(Error::NotASubspace("graph does not live in source × target".into()));
        }
        Ok(Relation { source, target, graph })
    }

    pub fn from_vectors(source: &OddSympSpace, target: &OddSympSpace, vectors: &[Vec<Scalar>]) -> Result<Self> {
        let ambient = source.space().product(target.space());
        Relation::new(source.clone(), target.clone(), Subspace::span(&ambient, vectors)?)
    }

    /// `{(v, A v)}` for a degree-preserving matrix `A: source → target`.
    pub fn graph_of(source: &OddSympSpace, target: &OddSympSpace, map: &Mat) -> Result<Self> {
        let vectors: Vec<_> = (0..source.dim())
            .map(|j| {
                let mut v = source.space().unit(j);
                v.extend(map.col(j));
                v
            })
            .collect();
        Relation::from_vectors(source, target, &vectors)
    }

    pub fn identity(space: &OddSympSpace) -> Self {
        Relation::graph_of(space, space, &Mat::identity(space.dim())).expect("diagonal is homogeneous")
    }

    pub fn source(&self) -> &OddSympSpace {
        &self.source
    }

    pub fn target(&self) -> &OddSympSpace {
        &self.target
    }

    pub fn graph(&self) -> &Subspace {
        &self.graph
    }

    /// `sourcē × target`, the symplectic space the graph lives in.
    pub fn ambient(&self) -> OddSympSpace {
        self.source.flip().product(&self.target)
    }

    pub fn is_lagrangian(&self) -> bool {
        self.ambient().is_lagrangian(&self.graph).expect("graph lives in the ambient")
    }

    pub fn is_coisotropic(&self) -> bool {
        self.ambient().is_coisotropic(&self.graph).expect("graph lives in the ambient")
    }

    fn require_lagrangian(&self) -> Result<()> {
        if self.is_lagrangian() {
            Ok(())
        } else {
            Err(Error::NotLagrangian)
        }
    }

    pub fn transpose(&self) -> Relation {
        let (m, n) = (self.source.dim(), self.target.dim());
        let vectors: Vec<_> = self
            .graph
            .basis()
            .iter()
            .map(|v| {
                let mut w = v[m..m + n].to_vec();
                w.extend_from_slice(&v[..m]);
                w
            })
            .collect();
        Relation::from_vectors(&self.target, &self.source, &vectors).expect("swapping blocks keeps homogeneity")
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Relation) -> Result<Relation> {
        if self.target != next.source {
            return Err(Error::SourceTargetMismatch);
        }
        let graph = compose_graphs(&self.graph, self.source.dim(), &next.graph, next.target.dim(), &self.source.space().product(next.target.space()));
        Relation::new(self.source.clone(), next.target.clone(), graph)
    }

    /// `{u : (u, 0) ∈ L}`.
    pub fn kernel(&self) -> Subspace {
        let (m, n) = (self.source.dim(), self.target.dim());
        let target_zero = Subspace::coordinate(self.graph.ambient(), &(0..m).collect::<Vec<_>>());
        let meet = self.graph.intersect(&target_zero).expect("same ambient");
        let vectors: Vec<_> = meet.basis().iter().map(|v| v[..m].to_vec()).collect();
        debug_assert!(meet.basis().iter().all(|v| v[m..m + n].iter().all(|x| x == &zero())));
        Subspace::span(self.source.space(), &vectors).expect("projection keeps homogeneity")
    }

    /// `{w : (u, w) ∈ L for some u}`.
    pub fn image(&self) -> Subspace {
        let m = self.source.dim();
        let vectors: Vec<_> = self.graph.basis().iter().map(|v| v[m..].to_vec()).collect();
        Subspace::span(self.target.space(), &vectors).expect("projection keeps homogeneity")
    }

    pub fn is_reduction(&self) -> Result<bool> {
        self.require_lagrangian()?;
        Ok(self.transpose().kernel().is_zero())
    }

    pub fn is_coreduction(&self) -> Result<bool> {
        self.require_lagrangian()?;
        Ok(self.kernel().is_zero())
    }

    /// The unique `w` with `(v, w) ∈ L`, when `v ∈ Im L^T` and `ker L^T = 0`.
    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        let m = self.source.dim();
        let n = self.target.dim();
        let basis = self.graph.basis();
        let top: Vec<Vec<Scalar>> = basis.iter().map(|b| b[..m].to_vec()).collect();
        let coeffs = Mat::from_cols(&top, m).solve(v).ok_or_else(|| Error::NotASubspace("vector is outside the image of the transpose".into()))?;
        let mut out = vec![zero(); n];
        for (c, b) in coeffs.iter().zip(basis) {
            for k in 0..n {
                out[k] += c * &b[m + k];
            }
        }
        Ok(out)
    }

    /// Matrix of a relation that is the graph of a map on all of the source.
    pub fn as_map(&self) -> Result<Mat> {
        if !self.transpose().kernel().is_zero() || self.graph.dim() != self.source.dim() {
            return Err(Error::NotASubspace("relation is not the graph of a map".into()));
        }
        let cols = (0..self.source.dim()).map(|j| self.apply(&self.source.space().unit(j))).collect::<Result<Vec<_>>>()?;
        Ok(Mat::from_cols(&cols, self.target.dim()))
    }
}

/// `L2 ∘ L1` for plain linear relations `g1 ⊆ U × V`, `g2 ⊆ V × W`.
pub fn compose_graphs(g1: &Subspace, u: usize, g2: &Subspace, w: usize, uw: &GradedSpace) -> Subspace {
    let vectors: Vec<_> = matched_pairs(g1, u, g2)
        .into_iter()
        .map(|(x, y)| {
            let mut z = x[..u].to_vec();
            z.extend_from_slice(&y[y.len() - w..]);
            z
        })
        .collect();
    Subspace::span(uw, &vectors).expect("fibre product is homogeneous")
}

/// Spanning pairs `(x, y) ∈ g1 × g2` whose middle components agree, one
/// degree at a time so that every pair is homogeneous.
pub fn matched_pairs(g1: &Subspace, u: usize, g2: &Subspace) -> Vec<(Vec<Scalar>, Vec<Scalar>)> {
    let v = g1.ambient().dim() - u;
    let mut degrees: Vec<i64> = g1.basis_degrees();
    degrees.extend(g2.basis_degrees());
    degrees.sort_unstable();
    degrees.dedup();
    let mut pairs = Vec::new();
    for d in degrees {
        let b1 = g1.vectors_of_degree(d);
        let b2 = g2.vectors_of_degree(d);
        let mut cols: Vec<Vec<Scalar>> = b1.iter().map(|x| x[u..u + v].to_vec()).collect();
        cols.extend(b2.iter().map(|y| y[..v].iter().map(|c| -c.clone()).collect()));
        if cols.is_empty() {
            continue;
        }
        for k in Mat::from_cols(&cols, v).kernel() {
            let mut x = vec![zero(); g1.ambient().dim()];
            for (c, b) in k[..b1.len()].iter().zip(&b1) {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += c * bi;
                }
            }
            let mut y = vec![zero(); g2.ambient().dim()];
            for (c, b) in k[b1.len()..].iter().zip(&b2) {
                for (yi, bi) in y.iter_mut().zip(b) {
                    *yi += c * bi;
                }
            }
            pairs.push((x, y));
        }
    }
    pairs
}

/// `L2 ∘ L1`.
pub fn compose(l1: &Relation, l2: &Relation) -> Result<Relation> {
    l1.then(l2)
}

/// `T*[1]f = {(β∘f, u, β, f(u))}` for a degree-preserving `f: U → V`.
pub fn cotangent_lift(u: &GradedSpace, v: &GradedSpace, f: &Mat) -> Result<Relation> {
    let (m, n) = (u.dim(), v.dim());
    if f.rows() != n || f.cols() != m {
        return Err(Error::DimensionMismatch("map shape does not match the spaces".into()));
    }
    for i in 0..n {
        for j in 0..m {
            if f[(i, j)] != zero() && v.degree(i) != u.degree(j) {
                return Err(Error::NotHomogeneous("map is not degree preserving".into()));
            }
        }
    }
    let tu = OddSympSpace::shifted_cotangent(u);
    let tv = OddSympSpace::shifted_cotangent(v);
    let mut vectors = Vec::new();
    for k in 0..n {
        let mut x = vec![zero(); 2 * m + 2 * n];
        for j in 0..m {
            x[j] = f[(k, j)].clone();
        }
        x[2 * m + k] = crate::scalar::one();
        vectors.push(x);
    }
    for j in 0..m {
        let mut x = vec![zero(); 2 * m + 2 * n];
        x[m + j] = crate::scalar::one();
        for i in 0..n {
            x[2 * m + n + i] = f[(i, j)].clone();
        }
        vectors.push(x);
    }
    Relation::from_vectors(&tu, &tv, &vectors)
}
