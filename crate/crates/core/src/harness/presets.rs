//! Bundled experiment specs reproducing the reference figure data.

use super::ExperimentSpec;
use crate::error::{Error, Result};

/// `(id, TOML text)` of every bundled spec, in figure order.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig3", include_str!("../../presets/fig3.toml")),
    ("fig4", include_str!("../../presets/fig4.toml")),
    ("fig5", include_str!("../../presets/fig5.toml")),
    ("fig6", include_str!("../../presets/fig6.toml")),
    ("fig7", include_str!("../../presets/fig7.toml")),
    ("fig8", include_str!("../../presets/fig8.toml")),
    ("fig9", include_str!("../../presets/fig9.toml")),
    ("fig10", include_str!("../../presets/fig10.toml")),
    ("fig11a", include_str!("../../presets/fig11a.toml")),
    ("fig11b", include_str!("../../presets/fig11b.toml")),
    ("fig12", include_str!("../../presets/fig12.toml")),
    ("fig13", include_str!("../../presets/fig13.toml")),
    ("fig13-loss", include_str!("../../presets/fig13-loss.toml")),
];

pub fn ids() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(id, _)| *id)
}

/// TOML text of preset `id`.
pub fn text(id: &str) -> Result<&'static str> {
    PRESETS.iter().find(|(p, _)| *p == id).map(|(_, t)| *t).ok_or_else(|| {
        Error::Parse(format!("unknown preset {id:?}; available: {}", ids().collect::<Vec<_>>().join(", ")))
    })
}

pub fn load(id: &str) -> Result<ExperimentSpec> {
    ExperimentSpec::from_toml_str(text(id)?)
}
