use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::{DataError, Dataset, DatasetMeta, Sample, COLUMNS, COLUMN_NAMES};

pub const DATASET_CSV_HEADER: [&str; COLUMNS] = COLUMN_NAMES;

/// Sidecar path for a dataset file: `dataset.csv` -> `dataset.meta.json`.
pub fn meta_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

/// Writes rows with shortest round-trip float formatting and LF line endings.
pub fn write_dataset_csv<W: Write>(samples: &[Sample], w: W) -> Result<(), DataError> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    let err = |e: csv::Error| DataError::Csv {
        line: 0,
        message: e.to_string(),
    };
    if samples.is_empty() {
        out.write_record(DATASET_CSV_HEADER).map_err(err)?;
    }
    for s in samples {
        out.serialize(s).map_err(err)?;
    }
    out.flush().map_err(|e| DataError::Csv {
        line: 0,
        message: e.to_string(),
    })
}

/// Reads rows, rejecting a wrong header and non-finite values. Errors carry the
/// 1-based file line.
pub fn read_dataset_csv<R: Read>(r: R) -> Result<Vec<Sample>, DataError> {
    let mut reader = csv::Reader::from_reader(r);
    let headers = reader.headers().map_err(csv_error)?.clone();
    if headers.iter().ne(DATASET_CSV_HEADER) {
        return Err(DataError::Csv {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                DATASET_CSV_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut samples = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => return Err(csv_error(e)),
        }
        let line = record.position().map_or(0, |p| p.line());
        let s: Sample = record.deserialize(Some(&headers)).map_err(|e| DataError::Csv {
            line,
            message: e.to_string(),
        })?;
        if let Some(c) = s.to_array().iter().position(|v| !v.is_finite()) {
            return Err(DataError::Csv {
                line,
                message: format!("non-finite value in column `{}`", COLUMN_NAMES[c]),
            });
        }
        samples.push(s);
    }
    Ok(samples)
}

fn csv_error(e: csv::Error) -> DataError {
    DataError::Csv {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> DataError + '_ {
    move |source| DataError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `path` and its metadata sidecar.
pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<(), DataError> {
    let file = std::fs::File::create(path).map_err(io_error(path))?;
    write_dataset_csv(&dataset.samples, std::io::BufWriter::new(file))?;
    let meta = meta_path(path);
    let mut text = serde_json::to_string_pretty(&dataset.meta).expect("metadata serializes");
    text.push('\n');
    std::fs::write(&meta, text).map_err(io_error(&meta))
}

/// Reads `path`; metadata comes from the sidecar when present.
pub fn load_dataset(path: &Path) -> Result<Dataset, DataError> {
    let file = std::fs::File::open(path).map_err(io_error(path))?;
    let samples = read_dataset_csv(std::io::BufReader::new(file)).map_err(|e| match e {
        DataError::Csv { line, message } => DataError::Csv {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })?;
    let meta_file = meta_path(path);
    let mut dataset = Dataset::from_samples(samples);
    if meta_file.exists() {
        let text = std::fs::read_to_string(&meta_file).map_err(io_error(&meta_file))?;
        let meta: DatasetMeta = serde_json::from_str(&text).map_err(|e| DataError::Meta {
            path: meta_file.display().to_string(),
            message: e.to_string(),
        })?;
        dataset.meta = meta;
        dataset.meta.row_count = dataset.samples.len();
    }
    Ok(dataset)
}
