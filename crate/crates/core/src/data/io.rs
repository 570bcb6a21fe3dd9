//! Corpus file formats.
//!
//! `cells-csv` is one row per sample with a required header:
//! `cell_id,batch,policy,cycle,t_min,V,I,T,Qc,Qd`. `cells-json` is the
//! equivalent nested document. `convert_dump` maps a per-cell CSV export
//! of the public cycling dataset into cells-csv.

use super::{CellRecord, ChargingPolicy, CycleTrace};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    CellsCsv,
    CellsJson,
}

impl CorpusFormat {
    /// Infer from the file extension; `.json` means cells-json.
    pub fn from_path(path: &Path) -> CorpusFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => CorpusFormat::CellsJson,
            _ => CorpusFormat::CellsCsv,
        }
    }
}

const CSV_COLUMNS: [&str; 10] = [
    "cell_id", "batch", "policy", "cycle", "t_min", "V", "I", "T", "Qc", "Qd",
];

#[derive(Serialize, Deserialize)]
struct CorpusDoc {
    cells: Vec<CellRecord>,
}

/// Load and validate a corpus. Cells come back sorted by id.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Vec<CellRecord>> {
    let mut cells = match format {
        CorpusFormat::CellsCsv => load_cells_csv(path)?,
        CorpusFormat::CellsJson => {
            let doc: CorpusDoc = serde_json::from_reader(fs::File::open(path)?)?;
            doc.cells
        }
    };
    cells.sort_by(|a, b| a.cell_id.cmp(&b.cell_id));
    for cell in &cells {
        cell.validate()?;
    }
    Ok(cells)
}

struct ColumnIndex {
    idx: [usize; 10],
}

impl ColumnIndex {
    fn from_headers(headers: &csv::StringRecord) -> Result<Self> {
        let mut idx = [0usize; 10];
        for (k, name) in CSV_COLUMNS.iter().enumerate() {
            idx[k] = headers
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| Error::MissingColumn((*name).to_string()))?;
        }
        Ok(ColumnIndex { idx })
    }

    fn get<'a>(&self, rec: &'a csv::StringRecord, col: usize) -> &'a str {
        rec.get(self.idx[col]).unwrap_or("")
    }
}

fn parse_f64(s: &str, what: &str, line: u64) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::ingest(format!("row {}: bad {} value {:?}", line, what, s)))
}

fn load_cells_csv(path: &Path) -> Result<Vec<CellRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let cols = ColumnIndex::from_headers(reader.headers()?)?;

    struct CellAcc {
        batch: u8,
        policy: ChargingPolicy,
        cycles: BTreeMap<u32, CycleTrace>,
    }
    let mut acc: BTreeMap<String, CellAcc> = BTreeMap::new();

    for row in reader.records() {
        let rec = row?;
        let line = rec.position().map_or(0, |p| p.line());
        let cell_id = cols.get(&rec, 0).to_string();
        let batch: u8 = cols
            .get(&rec, 1)
            .trim()
            .parse()
            .map_err(|_| Error::ingest(format!("row {}: bad batch", line)))?;
        let policy = ChargingPolicy::parse(cols.get(&rec, 2))
            .map_err(|e| Error::ingest(format!("row {} ({}): {}", line, cell_id, e)))?;
        let cycle: u32 = cols
            .get(&rec, 3)
            .trim()
            .parse()
            .map_err(|_| Error::ingest(format!("row {}: bad cycle", line)))?;

        let entry = acc.entry(cell_id).or_insert_with(|| CellAcc {
            batch,
            policy,
            cycles: BTreeMap::new(),
        });
        let trace = entry.cycles.entry(cycle).or_insert_with(|| CycleTrace {
            index: cycle,
            t_min: vec![],
            voltage: vec![],
            current: vec![],
            temp: vec![],
            q_c: vec![],
            q_d: vec![],
            q_end: 0.0,
        });
        trace
            .t_min
            .push(parse_f64(cols.get(&rec, 4), "t_min", line)?);
        trace.voltage.push(parse_f64(cols.get(&rec, 5), "V", line)?);
        trace.current.push(parse_f64(cols.get(&rec, 6), "I", line)?);
        trace.temp.push(parse_f64(cols.get(&rec, 7), "T", line)?);
        trace.q_c.push(parse_f64(cols.get(&rec, 8), "Qc", line)?);
        trace.q_d.push(parse_f64(cols.get(&rec, 9), "Qd", line)?);
    }

    let mut cells = Vec::with_capacity(acc.len());
    for (cell_id, cell) in acc {
        let cycles = cell
            .cycles
            .into_values()
            .map(|mut tr| {
                tr.q_end = tr.q_d.iter().cloned().fold(0.0, f64::max);
                tr
            })
            .collect();
        cells.push(CellRecord {
            cell_id,
            batch: cell.batch,
            policy: cell.policy,
            cycles,
        });
    }
    Ok(cells)
}

/// Write cells-csv. Cells and cycles are emitted in sorted order so the
/// output is canonical for byte comparison.
pub fn save_cells_csv(path: &Path, cells: &[CellRecord]) -> Result<()> {
    let mut sorted: Vec<&CellRecord> = cells.iter().collect();
    sorted.sort_by(|a, b| a.cell_id.cmp(&b.cell_id));
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_COLUMNS)?;
    for cell in sorted {
        let policy = cell.policy.format();
        for cy in &cell.cycles {
            for k in 0..cy.len() {
                w.write_record([
                    cell.cell_id.as_str(),
                    &cell.batch.to_string(),
                    &policy,
                    &cy.index.to_string(),
                    &cy.t_min[k].to_string(),
                    &cy.voltage[k].to_string(),
                    &cy.current[k].to_string(),
                    &cy.temp[k].to_string(),
                    &cy.q_c[k].to_string(),
                    &cy.q_d[k].to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn save_cells_json(path: &Path, cells: &[CellRecord]) -> Result<()> {
    let mut sorted = cells.to_vec();
    sorted.sort_by(|a, b| a.cell_id.cmp(&b.cell_id));
    let mut f = fs::File::create(path)?;
    serde_json::to_writer(&mut f, &CorpusDoc { cells: sorted })?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Convert a public-dataset dump directory into cells-csv.
///
/// The dump layout is `index.csv` with columns `cell_id,batch,policy`
/// plus one `<cell_id>.csv` per cell with columns
/// `cycle,t,V,I,T,Qc,Qd` (time in minutes). Returns the number of sample
/// rows written.
pub fn convert_dump(dump_dir: &Path, out: &Path) -> Result<usize> {
    let index_path = dump_dir.join("index.csv");
    if !index_path.exists() {
        return Err(Error::ingest(format!("missing {}", index_path.display())));
    }
    let mut reader = csv::Reader::from_path(&index_path)?;
    let headers = reader.headers()?.clone();
    for name in ["cell_id", "batch", "policy"] {
        if !headers.iter().any(|h| h == name) {
            return Err(Error::MissingColumn(name.to_string()));
        }
    }
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (id_c, batch_c, policy_c) = (col("cell_id"), col("batch"), col("policy"));

    let mut index: Vec<(String, String, String)> = Vec::new();
    for row in reader.records() {
        let rec = row?;
        index.push((
            rec.get(id_c).unwrap_or("").to_string(),
            rec.get(batch_c).unwrap_or("").to_string(),
            rec.get(policy_c).unwrap_or("").to_string(),
        ));
    }
    index.sort();

    let dump_cols = ["cycle", "t", "V", "I", "T", "Qc", "Qd"];
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(CSV_COLUMNS)?;
    let mut rows_written = 0usize;

    for (cell_id, batch, policy) in &index {
        // Validate early so errors carry the offending cell.
        ChargingPolicy::parse(policy)
            .map_err(|e| Error::ingest(format!("cell {}: {}", cell_id, e)))?;
        let cell_path = dump_dir.join(format!("{}.csv", cell_id));
        let mut reader = csv::Reader::from_path(&cell_path)
            .map_err(|e| Error::ingest(format!("cell {}: {}", cell_id, e)))?;
        let headers = reader.headers()?.clone();
        let mut idx = [0usize; 7];
        for (k, name) in dump_cols.iter().enumerate() {
            idx[k] = headers
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| Error::MissingColumn((*name).to_string()))?;
        }
        for row in reader.records() {
            let rec = row?;
            let line = rec.position().map_or(0, |p| p.line());
            let field = |k: usize| rec.get(idx[k]).unwrap_or("").trim();
            // Re-parse numerics so malformed rows fail here with coordinates.
            for (k, what) in dump_cols.iter().enumerate().skip(1) {
                parse_f64(field(k), what, line)
                    .map_err(|e| Error::ingest(format!("cell {}: {}", cell_id, e)))?;
            }
            w.write_record([
                cell_id.as_str(),
                batch.as_str(),
                policy.as_str(),
                field(0),
                field(1),
                field(2),
                field(3),
                field(4),
                field(5),
                field(6),
            ])?;
            rows_written += 1;
        }
    }
    w.flush()?;
    Ok(rows_written)
}
