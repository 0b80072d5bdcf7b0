//! Bundled experiment recipes, one per paper figure.

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};

pub const RECIPES: [(&str, &str); 10] = [
    ("fig1", include_str!("../recipes/fig1.toml")),
    ("fig2", include_str!("../recipes/fig2.toml")),
    ("fig3", include_str!("../recipes/fig3.toml")),
    ("fig4", include_str!("../recipes/fig4.toml")),
    ("fig5", include_str!("../recipes/fig5.toml")),
    ("fig6", include_str!("../recipes/fig6.toml")),
    ("fig7", include_str!("../recipes/fig7.toml")),
    ("fig8", include_str!("../recipes/fig8.toml")),
    ("fig9", include_str!("../recipes/fig9.toml")),
    ("fig10", include_str!("../recipes/fig10.toml")),
];

pub fn recipe_text(name: &str) -> LabResult<&'static str> {
    RECIPES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| LabError::UnknownRecipe(name.to_string()))
}

pub fn recipe(name: &str, overrides: &[(String, String)]) -> LabResult<ExperimentConfig> {
    ExperimentConfig::from_toml_with(recipe_text(name)?, overrides)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    RECIPES.iter().map(|(n, _)| *n)
}
