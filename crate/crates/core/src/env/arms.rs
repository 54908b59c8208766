use crate::error::{Error, Result};
use crate::linalg;

/// Arms available to the agent: `K` abstract arms, or `K` feature vectors in the unit ball.
#[derive(Debug, Clone, PartialEq)]
pub enum ArmSet {
    Iid { num_arms: usize },
    Linear { features: Vec<Vec<f64>> },
}

/// Norm slack allowed when validating features read from text.
const NORM_SLACK: f64 = 1e-9;

impl ArmSet {
    pub fn iid(num_arms: usize) -> Result<Self> {
        if num_arms < 2 {
            return Err(Error::InvalidModel(format!("need at least 2 arms, got {num_arms}")));
        }
        Ok(ArmSet::Iid { num_arms })
    }

    /// Linear arm set; features must share a dimension, lie in the unit ball and span it.
    pub fn linear(features: Vec<Vec<f64>>) -> Result<Self> {
        if features.len() < 2 {
            return Err(Error::InvalidModel(format!("need at least 2 arms, got {}", features.len())));
        }
        let dim = features[0].len();
        if dim == 0 || features.iter().any(|f| f.len() != dim) {
            return Err(Error::InvalidModel("features must share a positive dimension".into()));
        }
        if let Some((i, f)) = features.iter().enumerate().find(|(_, f)| linalg::norm(f) > 1.0 + NORM_SLACK) {
            return Err(Error::InvalidModel(format!("feature {i} has norm {} > 1", linalg::norm(f))));
        }
        let mut gram = nalgebra::DMatrix::zeros(dim, dim);
        for f in &features {
            let v = nalgebra::DVector::from_column_slice(f);
            gram += &v * v.transpose();
        }
        if linalg::rank(&gram) < dim {
            return Err(Error::InvalidModel("features do not span the ambient space".into()));
        }
        Ok(ArmSet::Linear { features })
    }

    pub fn num_arms(&self) -> usize {
        match self {
            ArmSet::Iid { num_arms } => *num_arms,
            ArmSet::Linear { features } => features.len(),
        }
    }

    /// Feature dimension; `None` for i.i.d. arms.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ArmSet::Iid { .. } => None,
            ArmSet::Linear { features } => Some(features[0].len()),
        }
    }

    pub fn features(&self) -> Option<&[Vec<f64>]> {
        match self {
            ArmSet::Iid { .. } => None,
            ArmSet::Linear { features } => Some(features),
        }
    }

    pub fn check_arm(&self, arm: usize) -> Result<()> {
        let num_arms = self.num_arms();
        if arm >= num_arms {
            Err(Error::ArmOutOfRange { arm, num_arms })
        } else {
            Ok(())
        }
    }
}
