//! Import of externally distributed cloze datasets whose records carry
//! `abstract`, `title`, `entities_list` and `answer` fields, with passages
//! already anonymized as `@entityN` tokens. Entity and answer strings start
//! with the pseudo-identifier and may be followed by ` :: ` and the names.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::pseudonym::{Candidate, ClozeInstance, PseudoId, Setting};

#[derive(Debug, Clone, Deserialize)]
pub struct PublishedRecord {
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub title: String,
    pub entities_list: Vec<String>,
    pub answer: String,
}

/// Column-oriented variant: parallel arrays under plural keys.
#[derive(Debug, Deserialize)]
struct Columns {
    abstracts: Vec<String>,
    titles: Vec<String>,
    entities_list: Vec<Vec<String>>,
    answers: Vec<String>,
}

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("record {index}: `{text}` does not start with a pseudo-identifier")]
    BadEntity { index: usize, text: String },
    #[error("column lengths differ")]
    RaggedColumns,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Reads records from JSON lines, a JSON array of records, or a single
/// column-oriented object.
pub fn load_records(path: impl AsRef<Path>) -> Result<Vec<PublishedRecord>, ImportError> {
    let text = std::fs::read_to_string(path)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return Ok(serde_json::from_str(trimmed)?);
    }
    if let Ok(cols) = serde_json::from_str::<Columns>(trimmed) {
        let n = cols.abstracts.len();
        if [cols.titles.len(), cols.entities_list.len(), cols.answers.len()] != [n; 3] {
            return Err(ImportError::RaggedColumns);
        }
        return Ok(cols
            .abstracts
            .into_iter()
            .zip(cols.titles)
            .zip(cols.entities_list)
            .zip(cols.answers)
            .map(|(((abstract_text, title), entities_list), answer)| PublishedRecord {
                abstract_text,
                title,
                entities_list,
                answer,
            })
            .collect());
    }
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Into::into))
        .collect()
}

pub fn load_instances(path: impl AsRef<Path>, setting: Setting) -> Result<Vec<ClozeInstance>, ImportError> {
    load_records(path)?
        .iter()
        .enumerate()
        .map(|(i, r)| import_record(i, r, setting))
        .collect()
}

fn split_entry(index: usize, text: &str) -> Result<(PseudoId, Vec<String>), ImportError> {
    let text = text.trim();
    let (head, names) = match text.split_once("::") {
        Some((h, n)) => (h.trim(), n.trim()),
        None => (text.split_whitespace().next().unwrap_or(""), ""),
    };
    let id = head
        .parse()
        .map_err(|_| ImportError::BadEntity { index, text: text.to_owned() })?;
    let names = if names.is_empty() { vec![] } else { vec![names.to_owned()] };
    Ok((id, names))
}

/// Converts one record. `index` becomes the instance id.
pub fn import_record(index: usize, rec: &PublishedRecord, setting: Setting) -> Result<ClozeInstance, ImportError> {
    let mut candidates = rec
        .entities_list
        .iter()
        .map(|e| split_entry(index, e).map(|(pseudo_id, names)| Candidate { pseudo_id, names }))
        .collect::<Result<Vec<_>, _>>()?;
    candidates.sort_by_key(|c| c.pseudo_id);
    candidates.dedup_by_key(|c| c.pseudo_id);
    let (answer, _) = split_entry(index, &rec.answer)?;
    Ok(ClozeInstance {
        instance_id: index.to_string(),
        pmid: index.to_string(),
        setting,
        passage: rec.abstract_text.clone(),
        question: rec.title.clone(),
        candidates,
        answer_pseudo_id: answer,
        answer_identifier: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imports_record() {
        let rec: PublishedRecord = serde_json::from_str(
            r#"{"abstract":"@entity1 binds @entity0 .","title":"XXXX binds @entity0","entities_list":["@entity0 :: ('D1', ['a'])","@entity1 :: ('D2', ['b'])"],"answer":"@entity1 :: ('D2', ['b'])"}"#,
        )
        .unwrap();
        let inst = import_record(4, &rec, Setting::A).unwrap();
        assert_eq!(inst.answer_pseudo_id, PseudoId(1));
        assert_eq!(inst.candidates.len(), 2);
        assert_eq!(inst.candidates[0].names, vec!["('D1', ['a'])".to_string()]);
        assert_eq!(inst.instance_id, "4");
        assert_eq!(split_entry(0, "@entity7").unwrap().0, PseudoId(7));
        assert!(split_entry(0, "entity7 :: x").is_err());
    }

    #[test]
    fn three_layouts() {
        let dir = tempfile::tempdir().unwrap();
        let rec = r#"{"abstract":"@entity0 and @entity1 .","title":"XXXX","entities_list":["@entity0","@entity1"],"answer":"@entity0"}"#;
        let layouts = [
            format!("{rec}\n{rec}\n"),
            format!("[{rec},{rec}]"),
            r#"{"abstracts":["@entity0 x @entity1","y"],"titles":["XXXX","XXXX"],"entities_list":[["@entity0","@entity1"],["@entity0"]],"answers":["@entity1","@entity0"]}"#.to_string(),
        ];
        for (i, body) in layouts.iter().enumerate() {
            let p = dir.path().join(format!("{i}.json"));
            std::fs::write(&p, body).unwrap();
            let xs = load_instances(&p, Setting::A).unwrap();
            assert_eq!(xs.len(), 2, "layout {i}");
        }
    }
}
