use serde::Serialize;

use crate::config::{Config, RunSpec};
use crate::error::CliError;
use crate::tasks::Run;

/// Column-oriented results; `None` cells are left empty in CSV and are `null` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(columns: &[&'static str], rows: Vec<Vec<Option<f64>>>) -> Self {
        Self {
            columns: columns.to_vec(),
            rows,
        }
    }
}

/// 17 significant digits, so every value round-trips exactly.
fn cell(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

pub fn to_csv(table: &Table) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(&table.columns).map_err(csv_error)?;
    for row in &table.rows {
        writer.write_record(row.iter().map(|&v| cell(v))).map_err(csv_error)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Output(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV of ASCII cells"))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Output(std::io::Error::other(e))
}

#[derive(Serialize)]
struct Results<'a> {
    task: String,
    #[serde(flatten)]
    table: &'a Table,
}

/// The input config with every run parameter made explicit and the results
/// attached; it is itself a valid config that reproduces the same table.
pub fn to_mirror(config: &Config, run: &Run, table: &Table) -> Result<String, CliError> {
    let mut mirror = config.clone();
    mirror.run = Some(RunSpec {
        task: Some(run.task),
        n: run.task.needs_n().then(|| run.ns.clone()),
        eigen_index: Some(run.eigen_index),
        samples: Some(run.samples),
        seed: Some(run.seed),
    });
    mirror.search = Some(run.search);
    mirror.results = Some(
        serde_json::to_value(Results {
            task: run.task.name(),
            table,
        })
        .map_err(|e| CliError::Output(e.into()))?,
    );
    let mut text = serde_json::to_string_pretty(&mirror).map_err(|e| CliError::Output(e.into()))?;
    text.push('\n');
    Ok(text)
}
