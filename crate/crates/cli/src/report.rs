use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub const VERSION: &str = concat!("jamlim ", env!("CARGO_PKG_VERSION"));

/// Everything needed to replay a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: Value,
    /// Parsed base seed, absent for deterministic commands.
    pub seed0: Option<u64>,
    /// The seed exactly as given.
    pub seed: Option<String>,
    pub scheme_hash: Option<String>,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str, params: Value) -> Self {
        RunManifest {
            command: command.to_string(),
            params,
            seed0: None,
            seed: None,
            scheme_hash: None,
            version: VERSION.to_string(),
        }
    }
}

/// One row of a sweep table. Empty cells mean not applicable.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SweepRow {
    pub n_or_x: String,
    pub mean: Option<f64>,
    pub std_error: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub bound: Option<f64>,
    pub replicas: Option<usize>,
    pub seed0: Option<u64>,
}

pub struct Output {
    pub manifest: RunManifest,
    pub result: Value,
    /// Rows for `--csv`; commands with their own layout supply them directly.
    pub table: Table,
    /// Human-oriented summary for stderr.
    pub note: Option<String>,
    pub degenerate: bool,
}

pub enum Table {
    Sweep(Vec<SweepRow>),
    Custom(Vec<String>, Vec<Vec<String>>),
}

pub fn render_json(out: &Output) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Doc<'a> {
        manifest: &'a RunManifest,
        result: &'a Value,
    }
    let mut text = serde_json::to_string_pretty(&Doc {
        manifest: &out.manifest,
        result: &out.result,
    })
    .map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn render_csv(out: &Output) -> Result<String, CliError> {
    let manifest = serde_json::to_string(&out.manifest).map_err(|e| CliError::Io(e.to_string()))?;
    let mut buf = format!("# manifest: {manifest}\n").into_bytes();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        let res = match &out.table {
            Table::Sweep(rows) => rows.iter().try_for_each(|r| w.serialize(r)),
            Table::Custom(header, rows) => w
                .write_record(header)
                .and_then(|_| rows.iter().try_for_each(|r| w.write_record(r))),
        };
        res.and_then(|_| w.flush().map_err(csv::Error::from))
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    String::from_utf8(buf).map_err(|e| CliError::Io(e.to_string()))
}

pub fn emit(out: &Output, csv: bool) -> Result<(), CliError> {
    let text = if csv {
        render_csv(out)?
    } else {
        render_json(out)?
    };
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| CliError::Io(e.to_string()))?;
    if let Some(note) = &out.note {
        eprintln!("{note}");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample(table: Table) -> Output {
        Output {
            manifest: RunManifest::new("density", json!({"n": [3]})),
            result: json!([{"n": 3, "mean": 0.5}]),
            table,
            note: None,
            degenerate: false,
        }
    }

    #[test]
    fn csv_has_manifest_header_and_blank_cells() {
        let out = sample(Table::Sweep(vec![SweepRow {
            n_or_x: "3".into(),
            mean: Some(0.5),
            replicas: Some(10),
            ..Default::default()
        }]));
        let text = render_csv(&out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# manifest: {\"command\":\"density\""));
        assert_eq!(
            lines[1],
            "n_or_x,mean,std_error,ci_low,ci_high,bound,replicas,seed0"
        );
        assert_eq!(lines[2], "3,0.5,,,,,10,");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn json_ends_with_newline() {
        let text = render_json(&sample(Table::Sweep(Vec::new()))).unwrap();
        assert!(text.ends_with("}\n"));
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["manifest"]["version"], VERSION);
    }
}
