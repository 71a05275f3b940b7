//! Linear subspaces with "orthogonal means independent".
//!
//! The dependence of `a` and `b` given `c` is the dimension of the
//! orthogonal projection of `a` onto `b`, after both have been projected
//! onto the orthogonal complement of `c`. This is symmetric and nonnegative
//! but not derived from any information measure, and it breaks the chain
//! rule — see [`SubspaceFixture::chain_rule_counterexample`].

use num_traits::FromPrimitive;

use crate::error::{Error, Result};
use crate::lattice::{Element, GroundSet};
use crate::linalg::{Field, Matrix};
use crate::measure::DependenceMeasure;

#[derive(Debug, Clone)]
pub struct SubspaceFixture<T> {
    dim: usize,
    ground: GroundSet,
    bases: Vec<Matrix<T>>,
}

impl<T: Field> SubspaceFixture<T> {
    /// `subspaces[i]` is a list of basis vectors in `T^dim`.
    pub fn new(dim: usize, subspaces: Vec<Vec<Vec<T>>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("ambient dimension must be positive".into()));
        }
        let ground = GroundSet::indexed(subspaces.len())?;
        let bases = subspaces
            .into_iter()
            .enumerate()
            .map(|(i, basis)| {
                if let Some(v) = basis.iter().find(|v| v.len() != dim) {
                    return Err(Error::Input(format!("subspace {i}: vector of length {} in dimension {dim}", v.len())));
                }
                let m = Matrix::from_columns(dim, &basis);
                if m.rank() != basis.len() {
                    return Err(Error::Input(format!("subspace {i}: basis vectors are linearly dependent")));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SubspaceFixture { dim, ground, bases })
    }

    pub fn ambient_dimension(&self) -> usize {
        self.dim
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    /// Independent columns spanning the sum of the subspaces in `e`.
    fn span(&self, e: Element) -> Matrix<T> {
        let all = e.indices().fold(Matrix::zeros(self.dim, 0), |acc, i| acc.hstack(&self.bases[i]));
        let keep = all.independent_columns();
        all.select_columns(&keep)
    }

    /// `dim π_{t|u⊥}(s|u⊥)`.
    pub fn projection_dimension(&self, s: Element, t: Element, u: Element) -> Result<usize> {
        self.ground.check(s.join(t).join(u))?;
        let p = self.span(u).complement_projector();
        let a = p.mul(&self.span(s));
        let b = p.mul(&self.span(t));
        let b = b.select_columns(&b.independent_columns());
        // With independent columns B, P_B = B (BᵀB)⁻¹ Bᵀ and rank(P_B A) = rank(Bᵀ A).
        Ok(b.transpose().mul(&a).rank())
    }
}

impl<T: Field + Send + Sync> DependenceMeasure for SubspaceFixture<T> {
    type Value = i64;

    fn observation_count(&self) -> usize {
        self.ground.len()
    }

    fn dependence(&self, s: Element, t: Element, u: Element) -> Result<i64> {
        Ok(self.projection_dimension(s, t, u)? as i64)
    }
}

impl<T: Field + FromPrimitive> SubspaceFixture<T> {
    /// Three lines in 3-space: `a = ⟨e1⟩`, `b = ⟨e1+e2⟩`, `c = ⟨e2⟩`.
    ///
    /// `a` depends on `b` (1), and still on `c` given `b` (1), yet its
    /// dependence on the plane `b∨c` is only 1, so
    /// `I(a:b∨c) − I(a:b) − I(a:c|b) = −1`.
    pub fn chain_rule_counterexample() -> Self {
        let v = |xs: [i32; 3]| xs.iter().map(|&x| T::from_i32(x).expect("small integer")).collect::<Vec<T>>();
        Self::new(3, vec![vec![v([1, 0, 0])], vec![v([1, 1, 0])], vec![v([0, 1, 0])]])
            .expect("fixture bases are independent")
    }
}
