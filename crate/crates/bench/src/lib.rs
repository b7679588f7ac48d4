//! Shared fixtures for the benchmarks.

use pentapod_core::reference::{published_architecture, target_pose};
use pentapod_core::{extract_f, Architecture, Configuration, SingularityModel};

pub struct Fixture {
    pub architecture: Architecture,
    pub model: SingularityModel,
    pub target: Configuration,
}

impl Fixture {
    pub fn reference() -> Self {
        let architecture = published_architecture();
        let model = extract_f(&architecture).expect("reference architecture is regular");
        Self { architecture, model, target: target_pose() }
    }
}
