//! JSON encodings. Rationals travel as strings `"p/q"` so nothing is lost.

use crate::graded::{GradedSpace, Subspace};
use crate::matrix::Mat;
use crate::scalar::{self, Scalar};
use crate::symplectic::{OddSympSpace, Relation};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn vectors_to_wire(vectors: &[Vec<Scalar>]) -> Vec<Vec<String>> {
    vectors.iter().map(|v| v.iter().map(scalar::format).collect()).collect()
}

pub fn vectors_from_wire(rows: &[Vec<String>]) -> crate::Result<Vec<Vec<Scalar>>> {
    rows.iter().map(|r| r.iter().map(|x| scalar::parse(x)).collect()).collect()
}

pub fn matrix_to_wire(m: &Mat) -> Vec<Vec<String>> {
    vectors_to_wire(&(0..m.rows()).map(|i| m.row(i)).collect::<Vec<_>>())
}

pub fn matrix_from_wire(rows: &[Vec<String>], cols: usize) -> crate::Result<Mat> {
    let rows = vectors_from_wire(rows)?;
    if rows.iter().any(|r| r.len() != cols) {
        return Err(crate::Error::DimensionMismatch(format!("expected rows of length {cols}")));
    }
    Ok(Mat::from_rows(&rows, cols))
}

#[derive(Serialize, Deserialize)]
struct SubspaceWire {
    ambient: GradedSpace,
    basis: Vec<Vec<String>>,
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SubspaceWire { ambient: self.ambient().clone(), basis: vectors_to_wire(self.basis()) }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = SubspaceWire::deserialize(deserializer)?;
        let basis = vectors_from_wire(&wire.basis).map_err(D::Error::custom)?;
        if basis.iter().any(|v| v.len() != wire.ambient.dim()) {
            return Err(D::Error::custom("basis vector length differs from ambient dimension"));
        }
        Subspace::span(&wire.ambient, &basis).map_err(D::Error::custom)
    }
}

/// Either explicit `{degrees, omega}` or the shorthand `{cotangent_of: [...]}`.
#[derive(Serialize, Deserialize)]
struct SpaceWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degrees: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    omega: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing)]
    cotangent_of: Option<Vec<i64>>,
}

impl Serialize for OddSympSpace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SpaceWire { degrees: Some(self.space().degrees().to_vec()), omega: Some(matrix_to_wire(self.omega())), cotangent_of: None }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OddSympSpace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match SpaceWire::deserialize(deserializer)? {
            SpaceWire { cotangent_of: Some(base), degrees: None, omega: None } => Ok(OddSympSpace::shifted_cotangent(&GradedSpace::new(base))),
            SpaceWire { degrees: Some(degrees), omega: Some(omega), cotangent_of: None } => {
                let n = degrees.len();
                let omega = matrix_from_wire(&omega, n).map_err(D::Error::custom)?;
                if omega.rows() != n {
                    return Err(D::Error::custom(format!("omega must be {n}×{n}")));
                }
                OddSympSpace::new(GradedSpace::new(degrees), omega).map_err(D::Error::custom)
            }
            _ => Err(D::Error::custom("expected either {degrees, omega} or {cotangent_of}")),
        }
    }
}

/// The graph may be given as a full subspace or as bare basis vectors.
#[derive(Deserialize)]
#[serde(untagged)]
enum GraphWire {
    Subspace(Subspace),
    Basis(Vec<Vec<String>>),
}

#[derive(Serialize)]
struct RelationOut<'a> {
    source: &'a OddSympSpace,
    target: &'a OddSympSpace,
    graph: &'a Subspace,
}

#[derive(Deserialize)]
struct RelationIn {
    source: OddSympSpace,
    target: OddSympSpace,
    graph: GraphWire,
}

impl Serialize for Relation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RelationOut { source: self.source(), target: self.target(), graph: self.graph() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Relation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = RelationIn::deserialize(deserializer)?;
        let graph = match wire.graph {
            GraphWire::Subspace(s) => s,
            GraphWire::Basis(rows) => {
                let ambient = wire.source.space().product(wire.target.space());
                let basis = vectors_from_wire(&rows).map_err(D::Error::custom)?;
                if basis.iter().any(|v| v.len() != ambient.dim()) {
                    return Err(D::Error::custom("graph vector length differs from source × target"));
                }
                Subspace::span(&ambient, &basis).map_err(D::Error::custom)?
            }
        };
        Relation::new(wire.source, wire.target, graph).map_err(D::Error::custom)
    }
}
