#![allow(dead_code)]

pub mod suites;

use ksbakit::document::{parse_config, Problem};
use std::path::PathBuf;

pub const EXAMPLES: [&str; 6] = ["s31", "s32", "s33", "s41", "s42", "s43"];

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn data_path(name: &str) -> String {
    data_dir().join(name).to_string_lossy().into_owned()
}

pub fn load(name: &str) -> Problem {
    let text = std::fs::read_to_string(data_dir().join(format!("{name}.json"))).expect("data file");
    parse_config(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}
