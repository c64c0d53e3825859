//! Finite direct sums of full matrix algebras.

use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{classify_vertices, TopGraph};
use crate::paths::path_counts;

/// `M_{n₁} ⊕ … ⊕ M_{n_k}`. Equality is multiset equality of the block sizes,
/// which is isomorphism; display keeps the order the blocks were built in.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(from = "Vec<u64>", into = "Vec<u64>")]
pub struct AlgebraExpr {
    blocks: Vec<u64>,
}

impl From<Vec<u64>> for AlgebraExpr {
    fn from(mut blocks: Vec<u64>) -> Self {
        blocks.retain(|&n| n > 0);
        AlgebraExpr { blocks }
    }
}

impl From<AlgebraExpr> for Vec<u64> {
    fn from(a: AlgebraExpr) -> Self {
        a.summands()
    }
}

impl<const N: usize> From<[u64; N]> for AlgebraExpr {
    fn from(a: [u64; N]) -> Self {
        a.to_vec().into()
    }
}

impl PartialEq for AlgebraExpr {
    fn eq(&self, other: &Self) -> bool {
        self.summands() == other.summands()
    }
}

impl Eq for AlgebraExpr {}

impl Hash for AlgebraExpr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.summands().hash(state);
    }
}

impl AlgebraExpr {
    pub fn zero() -> Self {
        AlgebraExpr::default()
    }

    pub fn matrix(n: u64) -> Self {
        vec![n].into()
    }

    /// Block sizes in ascending order.
    pub fn summands(&self) -> Vec<u64> {
        let mut s = self.blocks.clone();
        s.sort_unstable();
        s
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }
}

impl fmt::Display for AlgebraExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return f.write_str("0");
        }
        for (i, n) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(" ⊕ ")?;
            }
            write!(f, "M_{n}")?;
        }
        Ok(())
    }
}

/// Multiset union.
pub fn direct_sum(a: &AlgebraExpr, b: &AlgebraExpr) -> AlgebraExpr {
    a.blocks.iter().chain(&b.blocks).copied().collect::<Vec<_>>().into()
}

/// `a ⊗ M_k`: every block size is multiplied by `k`.
pub fn tensor_matrix(a: &AlgebraExpr, k: u64) -> AlgebraExpr {
    a.blocks.iter().map(|n| n * k).collect::<Vec<_>>().into()
}

/// Σ n² over the blocks.
pub fn dimension(a: &AlgebraExpr) -> u128 {
    a.blocks.iter().map(|&n| u128::from(n) * u128::from(n)).sum()
}

/// Identifies the Cuntz-Krieger algebra of a finite acyclic graph with finite
/// multiplicities. Every vertex is then a source or regular, and the algebra
/// is spanned by matrix units `s_μ s_ν*` over pairs of paths sharing a source
/// as domain, so it is one block per source sized by the paths leaving it.
pub fn identify_finite_dim(g: &TopGraph) -> Result<AlgebraExpr> {
    if let Some(c) = g.has_infinite_multiplicity() {
        return Err(Error::HasInfiniteMultiplicity(c.clone()));
    }
    let counts = path_counts(g)?;
    let sources = classify_vertices(g).sce;
    let blocks: Vec<u64> = sources
        .iter()
        .map(|v| counts[v].finite().expect("finite multiplicities give finite counts"))
        .collect();
    Ok(blocks.into())
}
