use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error (line {line}): {message}")]
    Config { line: usize, message: String },

    #[error("monitor `{0}` failed")]
    MonitorFailure(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Process exit code per the CLI contract: 0 pass, 1 monitor failure,
    /// 2 configuration error, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config { .. } => 2,
            HarnessError::MonitorFailure(_) => 1,
            HarnessError::Numerical(_) | HarnessError::Io(_) => 3,
        }
    }
}

macro_rules! numerical_from {
    ($ty:ty) => {
        impl From<$ty> for HarnessError {
            fn from(e: $ty) -> Self {
                HarnessError::Numerical(e.to_string())
            }
        }
    };
}

numerical_from!(nssl_spectral::SpectralError);
numerical_from!(nssl_estimates::EstimatesError);
numerical_from!(nssl_hns2d::Hns2dError);
numerical_from!(nssl_ins3d::Ins3dError);
numerical_from!(nssl_lagrangian::LagrangianError);
numerical_from!(nssl_twisted_div::TwistedDivError);

pub type Result<T> = std::result::Result<T, HarnessError>;
