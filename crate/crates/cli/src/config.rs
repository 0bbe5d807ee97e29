use std::path::PathBuf;

use obdalab_core::suite::{Fault, SuiteConfig};

/// Settings shared by every command. The seed alone determines every
/// generated instance.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub depth_limit: Option<usize>,
    pub out_dir: PathBuf,
    pub count: usize,
    pub fault: Option<Fault>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            depth_limit: None,
            out_dir: PathBuf::from("."),
            count: 100,
            fault: None,
        }
    }
}

impl RunConfig {
    pub fn suite(&self) -> SuiteConfig {
        SuiteConfig {
            seed: self.seed,
            count: self.count,
            depth_limit: self.depth_limit,
            fault: self.fault,
            ..SuiteConfig::default()
        }
    }
}
