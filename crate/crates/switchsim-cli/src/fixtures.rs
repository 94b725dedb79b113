//! Ready-to-run configuration files for the bundled experiments. Fixtures
//! are built as `ConfigFile` values and serialized canonically, so they are
//! guaranteed to parse and validate with the current schema.

use std::path::{Path, PathBuf};

use crate::config::{
    canonical_toml, ConfigFile, CyclicSection, LawKind, MeasurementKind, RunSection, ScenarioKind,
    SchemeKind, SystemKind, SystemSection, ToleranceSection, SCHEMA_VERSION,
};
use crate::error::{CliError, Result};

fn graph_system(pattern: &str) -> SystemSection {
    SystemSection {
        kind: SystemKind::Graph,
        n_qubits: Some(5),
        edges: Some(vec![(1, 2), (1, 3), (2, 3), (3, 4), (4, 5)]),
        // The graph experiments monitor the raw graph Hamiltonian; its
        // dissipator is (2n)^2 times stronger than the normalized
        // certificate's, which sets the convergence speed of the runs.
        measurement: MeasurementKind::GraphHamiltonian,
        true_pattern: Some(pattern.to_string()),
    }
}

fn graph_run(scenario: ScenarioKind, seed: u64, output: &str) -> RunSection {
    RunSection {
        dt: 0.005,
        n_steps: 1000,
        dwell_steps: 10,
        n_realizations: 100,
        master_seed: seed,
        scheme: SchemeKind::Kraus,
        scenario,
        custom_pattern: None,
        laws: vec![LawKind::Cyclic, LawKind::State, LawKind::Measurement],
        output_path: output.to_string(),
    }
}

/// Five-qubit run whose filter starts from the true state diluted with the
/// fully mixed state.
pub fn graph_uniform_fixture() -> ConfigFile {
    ConfigFile {
        schema_version: SCHEMA_VERSION,
        system: graph_system("--++-"),
        run: graph_run(ScenarioKind::UniformMix, 4242, "graph_uniform.csv"),
        cyclic: CyclicSection::default(),
        tolerances: ToleranceSection::default(),
    }
}

/// Five-qubit run whose filter starts from an even mixture of the true state
/// and the sign-flipped (orthogonal) pattern state.
pub fn graph_orthogonal_fixture() -> ConfigFile {
    ConfigFile {
        schema_version: SCHEMA_VERSION,
        system: graph_system("--++-"),
        run: graph_run(ScenarioKind::OrthogonalMix, 4243, "graph_orthogonal.csv"),
        cyclic: CyclicSection::default(),
        tolerances: ToleranceSection::default(),
    }
}

/// Three-level run from the fully mixed state under measurement-based
/// switching, long enough to show stabilization neither generator achieves
/// alone.
pub fn three_level_fixture() -> ConfigFile {
    ConfigFile {
        schema_version: SCHEMA_VERSION,
        system: SystemSection {
            kind: SystemKind::ThreeLevel,
            n_qubits: None,
            edges: None,
            measurement: MeasurementKind::Certificate,
            true_pattern: None,
        },
        run: RunSection {
            dt: 0.001,
            n_steps: 50_000,
            dwell_steps: 10,
            n_realizations: 200,
            master_seed: 7001,
            scheme: SchemeKind::Kraus,
            scenario: ScenarioKind::Exact,
            custom_pattern: None,
            laws: vec![LawKind::Measurement],
            output_path: "three_level.csv".to_string(),
        },
        cyclic: CyclicSection::default(),
        tolerances: ToleranceSection::default(),
    }
}

/// Writes all bundled fixtures into `dir` and returns the paths written.
pub fn emit_fixtures(dir: &Path) -> Result<Vec<PathBuf>> {
    let fixtures: [(&str, ConfigFile); 3] = [
        ("three_level.toml", three_level_fixture()),
        ("graph_uniform_mismatch.toml", graph_uniform_fixture()),
        ("graph_orthogonal_mismatch.toml", graph_orthogonal_fixture()),
    ];
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::with_capacity(fixtures.len());
    for (name, cfg) in fixtures {
        cfg.validate()?;
        let path = dir.join(name);
        std::fs::write(&path, canonical_toml(&cfg)).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
