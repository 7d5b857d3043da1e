use std::path::Path;

use k0_core::{ContextSpec, IsogenyContext};

use crate::CliError;

/// Reads a context description: JSON when the text starts with `{`, TOML otherwise.
pub fn parse_context_spec(text: &str) -> Result<ContextSpec, CliError> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| CliError::ContextFile(e.to_string()))
    } else {
        toml::from_str(text).map_err(|e| CliError::ContextFile(e.to_string()))
    }
}

pub fn load_context(path: &Path) -> Result<IsogenyContext, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(IsogenyContext::from_spec(&parse_context_spec(&text)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json() {
        let spec = parse_context_spec("case = \"end_z\"\ng = 2\n").unwrap();
        assert_eq!(spec, ContextSpec::end_z(2));
        let spec = parse_context_spec(r#"{"case": "ordinary_cm", "disc": -20, "p": 29}"#).unwrap();
        assert_eq!(spec, ContextSpec::ordinary_cm(-20, 29));
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(parse_context_spec("case = \"cm\"\ndisc = -4\nextra = 1\n").is_err());
        assert!(parse_context_spec(r#"{"case": "cm", "disk": -4}"#).is_err());
    }
}
