use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] lagcheb::Error),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

#[derive(Serialize)]
struct Record<'a> {
    error: &'a str,
    code: u8,
    message: String,
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Library(e) if e.is_validation() => "validation",
            CliError::Library(_) => "numerical",
            CliError::Output(_) => "output",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind() {
            "usage" | "config" => 2,
            "validation" => 3,
            "numerical" => 4,
            _ => 1,
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        let message = self.to_string().replace('\n', " ");
        serde_json::to_string(&Record {
            error: self.kind(),
            code: self.exit_code(),
            message,
        })
        .expect("plain record serialises")
    }
}

pub fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}
