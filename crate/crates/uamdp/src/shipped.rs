//! Files shipped with the crate: reference problem instances, feature-layout
//! schemas, and the sample config. A pinning test keeps them in sync with
//! the code; `cargo test -p uamdp --lib shipped -- --ignored` regenerates
//! them after an intentional change.

use std::path::PathBuf;

#[cfg(test)]
use crate::envs::{inventory_layout, trading_layout};
#[cfg(test)]
use crate::harness::RunConfig;
use crate::oracle::instances::all_reference_instances;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

/// Paths of the shipped tiny-instance JSON files, in shipping order.
pub fn instance_paths() -> Vec<PathBuf> {
    all_reference_instances()
        .iter()
        .map(|p| data_dir().join("tiny").join(format!("{}.json", p.name)))
        .collect()
}

#[cfg(test)]
fn rendered_files() -> Vec<(PathBuf, String)> {
    let mut files = Vec::new();
    for problem in all_reference_instances() {
        files.push((
            data_dir().join("tiny").join(format!("{}.json", problem.name)),
            serde_json::to_string_pretty(&problem).expect("serializable") + "\n",
        ));
    }
    files.push((
        schema_dir().join("features_trading.json"),
        serde_json::to_string_pretty(&trading_layout()).expect("serializable") + "\n",
    ));
    files.push((
        schema_dir().join("features_inventory.json"),
        serde_json::to_string_pretty(&inventory_layout()).expect("serializable") + "\n",
    ));
    files.push((data_dir().join("config").join("sample.toml"), RunConfig::sample_toml()));
    files
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::TinyBamdp;

    #[test]
    #[ignore = "regenerates the shipped data files in-place"]
    fn regenerate_shipped_files() {
        for (path, contents) in rendered_files() {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, contents).unwrap();
        }
    }

    #[test]
    fn shipped_files_match_the_code() {
        for (path, expected) in rendered_files() {
            let on_disk = std::fs::read_to_string(&path)
                .unwrap_or_else(|e| panic!("missing shipped file {}: {e}", path.display()));
            assert_eq!(on_disk, expected, "stale shipped file {}", path.display());
        }
    }

    #[test]
    fn shipped_instances_load_and_validate() {
        let paths = instance_paths();
        assert_eq!(paths.len(), 5);
        for path in paths {
            let problem = TinyBamdp::load(&path).expect("loadable instance");
            problem.validate().expect("valid instance");
        }
    }
}
