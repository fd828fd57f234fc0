use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Editing task; selects the control-signal and composition variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    ObjectRemoval,
    Outpainting,
    Swap,
    Addition,
    ColorChange,
    LightingTransfer,
    MotionTransfer,
    StyleTransfer,
}

impl TaskKind {
    pub const ALL: [TaskKind; 8] = [
        TaskKind::ObjectRemoval,
        TaskKind::Outpainting,
        TaskKind::Swap,
        TaskKind::Addition,
        TaskKind::ColorChange,
        TaskKind::LightingTransfer,
        TaskKind::MotionTransfer,
        TaskKind::StyleTransfer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::ObjectRemoval => "object-removal",
            TaskKind::Outpainting => "outpainting",
            TaskKind::Swap => "swap",
            TaskKind::Addition => "addition",
            TaskKind::ColorChange => "color-change",
            TaskKind::LightingTransfer => "lighting-transfer",
            TaskKind::MotionTransfer => "motion-transfer",
            TaskKind::StyleTransfer => "style-transfer",
        }
    }

    /// Removal and outpainting receive an all-zero control signal.
    pub fn zeroes_control_signal(self) -> bool {
        matches!(self, TaskKind::ObjectRemoval | TaskKind::Outpainting)
    }

    /// Style transfer drops the preserved-region latent.
    pub fn drops_preserved_latent(self) -> bool {
        self == TaskKind::StyleTransfer
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        let task = match norm.as_str() {
            "object-removal" | "removal" => TaskKind::ObjectRemoval,
            "outpainting" => TaskKind::Outpainting,
            "swap" => TaskKind::Swap,
            "addition" => TaskKind::Addition,
            "color-change" => TaskKind::ColorChange,
            "lighting-transfer" => TaskKind::LightingTransfer,
            "motion-transfer" => TaskKind::MotionTransfer,
            "style-transfer" => TaskKind::StyleTransfer,
            _ => return Err(Error::UnknownTask(s.to_string())),
        };
        Ok(task)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for t in TaskKind::ALL {
            assert_eq!(t.as_str().parse::<TaskKind>().unwrap(), t);
        }
        assert_eq!("Style_Transfer".parse::<TaskKind>().unwrap(), TaskKind::StyleTransfer);
        assert!(matches!("teleport".parse::<TaskKind>(), Err(Error::UnknownTask(_))));
    }
}
