use std::path::Path;

use thiserror::Error;

use crate::wire::PARENT_LABEL;

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("reading template {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("template {name} is missing placeholder {placeholder}")]
    MissingPlaceholder { name: &'static str, placeholder: &'static str },
}

/// Meta-prompt texts driving the variation operators.
///
/// The shipped wording is a paraphrase of the published figures; exact
/// figure text can be dropped in through [`OperatorTemplates::from_dir`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTemplates {
    pub example_prompt: String,
    pub init_template: String,
    pub vary_template: String,
    pub ablation_template: String,
}

impl Default for OperatorTemplates {
    fn default() -> Self {
        Self {
            example_prompt: include_str!("../../assets/example_prompt.txt").trim().to_string(),
            init_template: include_str!("../../assets/init_template.txt").trim().to_string(),
            vary_template: include_str!("../../assets/vary_template.txt").trim().to_string(),
            ablation_template: include_str!("../../assets/ablation_template.txt").trim().to_string(),
        }
    }
}

impl OperatorTemplates {
    /// Loads `example_prompt.txt`, `init_template.txt`, `vary_template.txt`
    /// and `ablation_template.txt`; missing files keep the built-in text.
    pub fn from_dir(dir: &Path) -> Result<Self, TemplateError> {
        let mut t = Self::default();
        for (file, slot) in [
            ("example_prompt.txt", &mut t.example_prompt),
            ("init_template.txt", &mut t.init_template),
            ("vary_template.txt", &mut t.vary_template),
            ("ablation_template.txt", &mut t.ablation_template),
        ] {
            let path = dir.join(file);
            if path.exists() {
                *slot = std::fs::read_to_string(&path)
                    .map_err(|source| TemplateError::Io { path: path.display().to_string(), source })?
                    .trim()
                    .to_string();
            }
        }
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), TemplateError> {
        let checks: [(&'static str, &str, &'static str); 4] = [
            ("init", &self.init_template, "{example}"),
            ("vary", &self.vary_template, "{parent_a}"),
            ("vary", &self.vary_template, "{parent_b}"),
            ("ablation", &self.ablation_template, "{population}"),
        ];
        for (name, text, placeholder) in checks {
            if !text.contains(placeholder) {
                return Err(TemplateError::MissingPlaceholder { name, placeholder });
            }
        }
        Ok(())
    }

    pub fn render_init(&self, example: &str) -> String {
        self.init_template.replace("{example}", example)
    }

    pub fn render_vary(&self, parent_a: &str, parent_b: &str) -> String {
        self.vary_template.replace("{parent_a}", parent_a).replace("{parent_b}", parent_b)
    }

    /// Lists the population one numbered prompt per line.
    pub fn render_ablation(&self, population: &[&str]) -> String {
        let mut listing = String::from("\n");
        for (i, text) in population.iter().enumerate() {
            listing.push_str(&format!("{PARENT_LABEL}{}: {text}\n", i + 1));
        }
        self.ablation_template.replace("{population}", &listing)
    }
}
