use ejof_core::EjofError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFICATION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<EjofError> for CliError {
    fn from(e: EjofError) -> Self {
        match e {
            EjofError::NonSemisimpleZero { .. }
            | EjofError::Singular { .. }
            | EjofError::NoConvergence(_) => CliError::Numerical(e.to_string()),
            EjofError::InvalidInput(m) => CliError::Input(m),
            other => CliError::Input(other.to_string()),
        }
    }
}
