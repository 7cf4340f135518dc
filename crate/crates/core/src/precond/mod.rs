//! ILU0 and Jacobi preconditioners.

mod ilu0;
mod jacobi;

pub use ilu0::{
    ilu0_apply_colored, ilu0_decompose, split_lu, IluFactors, IluPartitions, PIVOT_TOLERANCE,
};
pub use jacobi::JacobiPrecond;

use serde::{Deserialize, Serialize};

use crate::error::PrecondError;
use crate::matrix::CsrMatrix;
use crate::reorder::ReorderPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecondKind {
    #[default]
    None,
    Jacobi,
    Ilu0,
}

impl PrecondKind {
    pub const ALL: [Self; 3] = [Self::None, Self::Jacobi, Self::Ilu0];

    pub fn label(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Jacobi => "jacobi",
            Self::Ilu0 => "ilu0",
        }
    }
}

impl std::str::FromStr for PrecondKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Self::None),
            "jacobi" => Ok(Self::Jacobi),
            "ilu0" => Ok(Self::Ilu0),
            other => Err(format!("unknown preconditioner '{other}'")),
        }
    }
}

/// A constructed preconditioner, ready to apply.
#[derive(Debug, Clone)]
pub enum Preconditioner {
    Identity,
    Jacobi(JacobiPrecond),
    Ilu0(IluFactors),
    /// ILU0 on a reordered matrix, swept color by color.
    Ilu0Colored {
        factors: IluFactors,
        plan: ReorderPlan,
        parts: IluPartitions,
    },
}

impl Preconditioner {
    /// Builds the preconditioner for `a`. When a plan is given, `a` must
    /// already be permuted by it and ILU0 is applied color by color.
    pub fn build(kind: PrecondKind, a: &CsrMatrix, plan: Option<&ReorderPlan>) -> Result<Self, PrecondError> {
        Ok(match kind {
            PrecondKind::None => Self::Identity,
            PrecondKind::Jacobi => Self::Jacobi(JacobiPrecond::new(a)?),
            PrecondKind::Ilu0 => {
                let factors = IluFactors::factor(a)?;
                match plan {
                    Some(plan) => {
                        let parts = IluPartitions::build(&factors, plan)?;
                        Self::Ilu0Colored { factors, plan: plan.clone(), parts }
                    }
                    None => Self::Ilu0(factors),
                }
            }
        })
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64], scratch: &mut Vec<f64>) -> Result<(), PrecondError> {
        match self {
            Self::Identity => {
                if x.len() != out.len() {
                    return Err(crate::error::MatrixError::DimensionMismatch { expected: out.len(), found: x.len() }.into());
                }
                out.copy_from_slice(x);
                Ok(())
            }
            Self::Jacobi(j) => j.apply_into(x, out),
            Self::Ilu0(f) => f.apply_into(x, out),
            Self::Ilu0Colored { factors, plan, parts } => {
                ilu0::ilu0_apply_colored_into(factors, plan, parts, x, out, scratch)
            }
        }
    }
}
