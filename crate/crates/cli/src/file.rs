//! On-disk program descriptions and input value files.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use betaplan::{
    CombinerSpec, DistributionSpec, Error as CoreError, IndexSet, KernelDecl, ObjectDecl, Program,
    SignatureSpec,
};

/// Root of a program description file.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramFile {
    pub objects: Vec<ObjectEntry>,
    pub kernels: Vec<KernelEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectEntry {
    pub name: String,
    #[serde(rename = "N")]
    pub size: u64,
    pub distribution: DistributionSpec,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelEntry {
    pub name: String,
    pub input: String,
    pub output: String,
    /// A signature descriptor; the extra kind `dense` is accepted here and
    /// lowered to `sparse`.
    pub signature: serde_json::Value,
    pub combiner: CombinerSpec,
}

#[derive(Debug)]
pub enum CliError {
    Io { path: PathBuf, message: String },
    Parse { path: PathBuf, message: String },
    Values { path: PathBuf, message: String },
    Core(CoreError),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io { path, message } => write!(f, "{}: {message}", path.display()),
            Self::Parse { path, message } => write!(f, "{}: {message}", path.display()),
            Self::Values { path, message } => write!(f, "{}: {message}", path.display()),
            Self::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        Self::Core(e)
    }
}

impl CliError {
    /// 1 for anything malformed, 2 when a kernel's needs cannot be covered.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Core(CoreError::Uncoverable { .. }) => 2,
            _ => 1,
        }
    }
}

/// Reads and validates a program description.
pub fn load_program(path: &Path) -> Result<Program, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let file: ProgramFile = serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    build_program(&file).map_err(|e| match e {
        // Attach the file name to semantic errors too.
        CliError::Core(core) => CliError::Parse {
            path: path.to_path_buf(),
            message: core.to_string(),
        },
        other => other,
    })
}

/// Assembles the core program from a parsed description.
pub fn build_program(file: &ProgramFile) -> Result<Program, CliError> {
    let mut objects = Vec::with_capacity(file.objects.len());
    for entry in &file.objects {
        if let Some(declared) = entry.distribution.declared_size() {
            if declared != entry.size {
                return Err(CoreError::InvalidProgram(format!(
                    "object `{}`: distribution is for size {declared}, object has size {}",
                    entry.name, entry.size
                ))
                .into());
            }
        }
        objects.push(ObjectDecl::new(
            entry.name.clone(),
            entry.size,
            entry.distribution.build()?,
        ));
    }
    let mut kernels = Vec::with_capacity(file.kernels.len());
    for entry in &file.kernels {
        kernels.push(KernelDecl {
            name: entry.name.clone(),
            input: entry.input.clone(),
            output: entry.output.clone(),
            signature: signature_from_value(&entry.name, &entry.signature)?,
            combiner: entry.combiner.clone(),
        });
    }
    Ok(Program::new(objects, kernels)?)
}

/// Parses a signature descriptor, lowering `dense` matrices to sparse rows.
fn signature_from_value(
    kernel: &str,
    value: &serde_json::Value,
) -> Result<SignatureSpec, CliError> {
    let invalid = |message: String| CliError::Core(CoreError::InvalidProgram(message));
    if value.get("kind").and_then(serde_json::Value::as_str) == Some("dense") {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Dense {
            #[allow(dead_code)]
            kind: String,
            matrix: Vec<Vec<u64>>,
            #[serde(default)]
            n_in: Option<u64>,
        }
        let dense: Dense = serde_json::from_value(value.clone())
            .map_err(|e| invalid(format!("kernel `{kernel}`: dense signature: {e}")))?;
        let mut rows = BTreeMap::new();
        let mut width = None;
        for (i, row) in dense.matrix.iter().enumerate() {
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => {
                    return Err(invalid(format!(
                        "kernel `{kernel}`: dense matrix row {i} has {} entries, row 0 has {w}",
                        row.len()
                    )));
                }
                Some(_) => {}
            }
            let mut cells = Vec::new();
            for (j, &cell) in row.iter().enumerate() {
                match cell {
                    0 => {}
                    1 => cells.push((j as u64, j as u64 + 1)),
                    other => {
                        return Err(invalid(format!(
                            "kernel `{kernel}`: dense matrix entry ({i}, {j}) is {other}, \
                             expected 0 or 1"
                        )));
                    }
                }
            }
            rows.insert(
                i as u64,
                IndexSet::from_intervals(cells).expect("cells ascend"),
            );
        }
        let mut spec = SignatureSpec::sparse(rows);
        // The row width pins the input size; an explicit n_in must agree.
        if let Some(width) = width {
            let width = width as u64;
            if let Some(declared) = dense.n_in {
                if declared != width {
                    return Err(invalid(format!(
                        "kernel `{kernel}`: dense matrix rows have {width} entries but \
                         n_in is {declared}"
                    )));
                }
            }
            spec = spec.with_n_in(width);
        }
        Ok(spec)
    } else {
        serde_json::from_value(value.clone())
            .map_err(|e| invalid(format!("kernel `{kernel}`: signature: {e}")))
    }
}

/// Reads whitespace-separated integer values.
pub fn load_values(path: &Path) -> Result<Vec<i64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<i64>().map_err(|_| CliError::Values {
                path: path.to_path_buf(),
                message: format!("`{tok}` is not an integer value"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Program, CliError> {
        build_program(&serde_json::from_str::<ProgramFile>(text).unwrap())
    }

    const HEAT: &str = r#"{
        "objects": [
            {"name": "x", "N": 12, "distribution": {"kind": "block", "N": 12, "P": 4}},
            {"name": "y", "N": 12, "distribution": {"kind": "block", "N": 12, "P": 4}}
        ],
        "kernels": [
            {"name": "heat", "input": "x", "output": "y",
             "signature": {"kind": "stencil", "offsets": [-1, 0, 1]},
             "combiner": {"kind": "weighted", "weights": {"-1": -1, "0": 2, "1": -1}}}
        ]
    }"#;

    #[test]
    fn a_full_description_assembles() {
        let program = parse(HEAT).unwrap();
        assert_eq!(program.kernels().len(), 1);
        assert_eq!(program.kernels()[0].name(), "heat");
        assert_eq!(program.input_object().name, "x");
    }

    #[test]
    fn distribution_size_must_match_the_object() {
        let err = parse(
            r#"{
                "objects": [
                    {"name": "x", "N": 12, "distribution": {"kind": "block", "N": 8, "P": 4}},
                    {"name": "y", "N": 12, "distribution": {"kind": "block", "N": 12, "P": 4}}
                ],
                "kernels": [
                    {"name": "id", "input": "x", "output": "y",
                     "signature": {"kind": "stencil", "offsets": [0]},
                     "combiner": {"kind": "sum"}}
                ]
            }"#,
        )
        .unwrap_err();
        assert!(
            err.to_string().contains("distribution is for size 8"),
            "{err}"
        );
    }

    #[test]
    fn dense_matrices_lower_to_sparse_rows() {
        let program = parse(
            r#"{
                "objects": [
                    {"name": "x", "N": 3, "distribution": {"kind": "block", "N": 3, "P": 2}},
                    {"name": "y", "N": 2, "distribution": {"kind": "block", "N": 2, "P": 2}}
                ],
                "kernels": [
                    {"name": "mv", "input": "x", "output": "y",
                     "signature": {"kind": "dense", "matrix": [[1, 0, 1], [0, 1, 0]]},
                     "combiner": {"kind": "sum"}}
                ]
            }"#,
        )
        .unwrap();
        let sig = program.kernels()[0].signature();
        assert_eq!(sig.domain_bound(), 3);
        assert_eq!(sig.apply_index(0).unwrap().elements(), vec![0, 2]);
        assert_eq!(sig.apply_index(1).unwrap().elements(), vec![1]);
    }

    #[test]
    fn dense_matrices_reject_non_boolean_entries_and_ragged_rows() {
        let bad_entry = r#"{"kind": "dense", "matrix": [[2]]}"#;
        let ragged = r#"{"kind": "dense", "matrix": [[1, 0], [1]]}"#;
        for (text, needle) in [
            (bad_entry, "expected 0 or 1"),
            (ragged, "row 1 has 1 entries"),
        ] {
            let v: serde_json::Value = serde_json::from_str(text).unwrap();
            let err = signature_from_value("mv", &v).unwrap_err();
            assert!(err.to_string().contains(needle), "{err}");
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{
            "objects": [{"name": "x", "N": 4, "distributions": {"kind": "block", "N": 4, "P": 2}}],
            "kernels": []
        }"#;
        let err = serde_json::from_str::<ProgramFile>(text).unwrap_err();
        assert!(err.to_string().contains("unknown field"), "{err}");
    }

    #[test]
    fn values_files_are_whitespace_separated_integers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("values.txt");
        fs::write(&path, "0 1 -2\n3\t4").unwrap();
        assert_eq!(load_values(&path).unwrap(), vec![0, 1, -2, 3, 4]);
        fs::write(&path, "1 two 3").unwrap();
        let err = load_values(&path).unwrap_err();
        assert!(err.to_string().contains("`two` is not an integer"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn uncoverable_programs_exit_with_code_two() {
        let program = parse(
            r#"{
                "objects": [
                    {"name": "x", "N": 4, "distribution": {"kind": "explicit", "sets": [[[0, 2]]]}},
                    {"name": "y", "N": 4, "distribution": {"kind": "explicit", "sets": [[[0, 4]]]}}
                ],
                "kernels": [
                    {"name": "id", "input": "x", "output": "y",
                     "signature": {"kind": "stencil", "offsets": [0]},
                     "combiner": {"kind": "sum"}}
                ]
            }"#,
        )
        .unwrap();
        let err: CliError = program.kernels()[0]
            .message_plan(betaplan::DedupPolicy::LowestOwner)
            .unwrap_err()
            .into();
        assert_eq!(err.exit_code(), 2);
    }
}
