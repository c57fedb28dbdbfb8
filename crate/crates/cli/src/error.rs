use thiserror::Error;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status when a validation row fails.
pub const EXIT_VALIDATION: i32 = 1;
/// Exit status for unusable configuration.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("unknown preset `{0}` (expected fig2, fig3, fig4, optimize or mc)")]
    UnknownPreset(String),

    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },

    #[error("bad value `{value}` for `{key}`: {reason}")]
    BadValue { key: String, value: String, reason: String },

    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },

    #[error(transparent)]
    Model(#[from] greencache::Error),
}

impl ConfigError {
    /// Single-line `error kind=... message="..."` form for scripts.
    pub fn machine_line(&self) -> String {
        let kind = match self {
            ConfigError::UnknownKey(_) => "unknown_key",
            ConfigError::UnknownPreset(_) => "unknown_preset",
            ConfigError::Syntax { .. } => "syntax",
            ConfigError::BadValue { .. } => "bad_value",
            ConfigError::Io { .. } => "io",
            ConfigError::Model(_) => "invalid_parameters",
        };
        let message = self.to_string().replace('"', "'");
        format!("error kind={kind} exit={EXIT_CONFIG} message=\"{message}\"")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn machine_line_is_single_line() {
        let e = ConfigError::BadValue {
            key: "alpha".into(),
            value: "x\"y".into(),
            reason: "expected a f64".into(),
        };
        let line = e.machine_line();
        assert!(line.starts_with("error kind=bad_value exit=2 message=\""));
        assert_eq!(line.matches('"').count(), 2);
        assert!(!line.contains('\n'));
    }
}
