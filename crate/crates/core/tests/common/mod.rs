#![allow(dead_code)]

use std::path::PathBuf;

use azd_otto::{OttoConfig, RunConfig};

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

pub fn run_config(name: &str) -> RunConfig {
    RunConfig::load(&config_path(name)).unwrap()
}

pub fn otto(name: &str) -> OttoConfig {
    run_config(name).otto_config().unwrap()
}
