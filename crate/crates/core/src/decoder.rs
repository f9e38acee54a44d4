use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bc::{BcConfig, BubbleDecoder};
use crate::error::{Error, Result};
use crate::lattice::{QubitSet, Syndrome, SurfaceCode};
use crate::reference::{greedy_decode, mwpm_decode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    /// Bubble clustering.
    Bc,
    /// Exact minimum-weight matching, small defect counts only.
    Mwpm,
    /// Greedy nearest-pair matching.
    Greedy,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 3] = [DecoderKind::Bc, DecoderKind::Mwpm, DecoderKind::Greedy];

    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Bc => "bc",
            DecoderKind::Mwpm => "mwpm",
            DecoderKind::Greedy => "greedy",
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bc" => Ok(DecoderKind::Bc),
            "mwpm" | "oracle" => Ok(DecoderKind::Mwpm),
            "greedy" => Ok(DecoderKind::Greedy),
            other => Err(Error::Config(format!("unknown decoder `{other}`"))),
        }
    }
}

/// Label used in result tables: `bc` for the default configuration,
/// `bc-plain` with every adjustment off, and `bc-r?s?h?` flags otherwise.
pub fn decoder_label(kind: DecoderKind, config: &BcConfig) -> String {
    match kind {
        DecoderKind::Bc if *config == BcConfig::default() => "bc".to_string(),
        DecoderKind::Bc if *config == BcConfig::plain() => "bc-plain".to_string(),
        DecoderKind::Bc => format!(
            "bc-r{}s{}h{}",
            u8::from(config.enable_radius_adjustment),
            u8::from(config.enable_star_avoidance),
            u8::from(config.enable_high_distance_rules)
        ),
        other => other.name().to_string(),
    }
}

/// A decoder instance bound to one code. One per worker.
#[derive(Clone, Debug)]
pub enum Decoder {
    Bc(BubbleDecoder),
    Mwpm(SurfaceCode),
    Greedy(SurfaceCode),
}

impl Decoder {
    pub fn new(kind: DecoderKind, code: SurfaceCode, config: BcConfig) -> Self {
        match kind {
            DecoderKind::Bc => Decoder::Bc(BubbleDecoder::new(code, config)),
            DecoderKind::Mwpm => Decoder::Mwpm(code),
            DecoderKind::Greedy => Decoder::Greedy(code),
        }
    }

    pub fn kind(&self) -> DecoderKind {
        match self {
            Decoder::Bc(_) => DecoderKind::Bc,
            Decoder::Mwpm(_) => DecoderKind::Mwpm,
            Decoder::Greedy(_) => DecoderKind::Greedy,
        }
    }

    pub fn code(&self) -> &SurfaceCode {
        match self {
            Decoder::Bc(bc) => bc.code(),
            Decoder::Mwpm(code) | Decoder::Greedy(code) => code,
        }
    }

    pub fn decode(&mut self, syndrome: &Syndrome) -> Result<QubitSet> {
        match self {
            Decoder::Bc(bc) => bc.decode(syndrome),
            Decoder::Mwpm(code) => mwpm_decode(code, syndrome),
            Decoder::Greedy(code) => Ok(greedy_decode(code, syndrome)),
        }
    }
}
