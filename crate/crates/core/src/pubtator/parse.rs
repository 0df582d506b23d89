use std::collections::{HashSet, VecDeque};
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use flate2::read::MultiGzDecoder;

use super::{AnnotationIssue, EntityAnnotation, IssueKind, RawArticle, Record, Separator};

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

/// Opens a corpus file, transparently decompressing gzip input (detected
/// by magic bytes, not by extension).
pub fn open_corpus(path: impl AsRef<Path>) -> io::Result<Box<dyn BufRead + Send>> {
    let mut reader = BufReader::new(File::open(path)?);
    let head = reader.fill_buf()?;
    if head.len() >= 2 && head[..2] == GZIP_MAGIC {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(reader))))
    } else {
        Ok(Box::new(reader))
    }
}

/// Parses a whole in-memory PubTator document.
pub fn parse_str(input: &str, sep: Separator) -> Vec<Record> {
    PubtatorReader::new(input.as_bytes(), sep)
        .collect::<io::Result<Vec<_>>>()
        .expect("reading from a byte slice cannot fail")
}

/// Single-pass streaming parser. Holds at most one record in memory.
///
/// For each block the issues are yielded first, then the article.
pub struct PubtatorReader<R> {
    input: R,
    sep: Separator,
    line: String,
    line_no: usize,
    pending: VecDeque<Record>,
    eof: bool,
}

impl<R: BufRead> PubtatorReader<R> {
    pub fn new(input: R, sep: Separator) -> Self {
        Self {
            input,
            sep,
            line: String::new(),
            line_no: 0,
            pending: VecDeque::new(),
            eof: false,
        }
    }

    /// Reads the next non-empty block as (line number, line) pairs.
    fn read_block(&mut self) -> io::Result<Vec<(usize, String)>> {
        let mut block = Vec::new();
        loop {
            self.line.clear();
            if self.input.read_line(&mut self.line)? == 0 {
                self.eof = true;
                return Ok(block);
            }
            self.line_no += 1;
            let trimmed = self.line.trim_end_matches(['\n', '\r']);
            if trimmed.trim().is_empty() {
                if block.is_empty() {
                    continue;
                }
                return Ok(block);
            }
            block.push((self.line_no, trimmed.to_owned()));
        }
    }
}

impl<R: BufRead> Iterator for PubtatorReader<R> {
    type Item = io::Result<Record>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(rec) = self.pending.pop_front() {
                return Some(Ok(rec));
            }
            if self.eof {
                return None;
            }
            match self.read_block() {
                Ok(block) if block.is_empty() => return None,
                Ok(block) => process_block(&block, self.sep, &mut self.pending),
                Err(e) => {
                    self.eof = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

enum LineKind<'a> {
    Text { pmid: &'a str, tag: &'a str, text: &'a str },
    Annotation(Vec<&'a str>),
    Unknown,
}

fn classify(line: &str) -> LineKind<'_> {
    let mut parts = line.splitn(3, '|');
    if let (Some(pmid), Some(tag), Some(text)) = (parts.next(), parts.next(), parts.next()) {
        if !pmid.contains('\t') && (tag == "t" || tag == "a") {
            return LineKind::Text { pmid, tag, text };
        }
    }
    if line.contains('\t') {
        LineKind::Annotation(line.split('\t').collect())
    } else {
        LineKind::Unknown
    }
}

fn process_block(block: &[(usize, String)], sep: Separator, out: &mut VecDeque<Record>) {
    let mut pmid: Option<String> = None;
    let mut title: Option<String> = None;
    let mut abstract_text: Option<String> = None;
    let mut ann_lines = Vec::new();
    let mut issues = Vec::new();

    let issue = |pmid: &str, kind, detail: String| AnnotationIssue {
        pmid: pmid.to_owned(),
        kind,
        detail,
    };

    for (no, line) in block {
        match classify(line) {
            LineKind::Text { pmid: id, tag, text } => {
                if id.is_empty() {
                    issues.push(issue("", IssueKind::MalformedLine, format!("line {no}: empty pmid")));
                    continue;
                }
                match &pmid {
                    None => pmid = Some(id.to_owned()),
                    Some(p) if p != id => {
                        issues.push(issue(
                            p,
                            IssueKind::MalformedLine,
                            format!("line {no}: pmid `{id}` differs from record pmid"),
                        ));
                        continue;
                    }
                    Some(_) => {}
                }
                let slot = if tag == "t" { &mut title } else { &mut abstract_text };
                if slot.is_some() {
                    issues.push(issue(
                        id,
                        IssueKind::MalformedLine,
                        format!("line {no}: repeated `{tag}` line"),
                    ));
                } else {
                    *slot = Some(text.to_owned());
                }
            }
            LineKind::Annotation(fields) => ann_lines.push((*no, fields)),
            LineKind::Unknown => {
                let p = pmid.clone().unwrap_or_default();
                issues.push(issue(&p, IssueKind::MalformedLine, format!("line {no}: unrecognised line")));
            }
        }
    }

    let (Some(pmid), Some(title)) = (pmid, title) else {
        let p = block
            .first()
            .map(|(_, l)| l.split(['|', '\t']).next().unwrap_or("").to_owned())
            .unwrap_or_default();
        issues.push(issue(
            &p,
            IssueKind::MalformedLine,
            format!("line {}: record has no title line", block[0].0),
        ));
        out.extend(issues.into_iter().map(Record::Issue));
        return;
    };
    let abstract_text = abstract_text.unwrap_or_default();

    let mut article = RawArticle {
        pmid,
        title,
        abstract_text,
        annotations: Vec::new(),
    };
    let combined = article.combined_text(sep);
    let index = CharIndex::new(&combined);
    let title_chars = article.title_chars();
    let mut seen_spans = HashSet::new();

    for (no, fields) in ann_lines {
        let pmid = article.pmid.as_str();
        if fields.len() != 6 && fields.len() != 5 {
            issues.push(issue(
                pmid,
                IssueKind::MalformedLine,
                format!("line {no}: expected 6 tab-separated fields, found {}", fields.len()),
            ));
            continue;
        }
        if fields[0] != pmid {
            issues.push(issue(
                pmid,
                IssueKind::MalformedLine,
                format!("line {no}: pmid `{}` differs from record pmid", fields[0]),
            ));
            continue;
        }
        let (start, end) = match (fields[1].parse::<usize>(), fields[2].parse::<usize>()) {
            (Ok(s), Ok(e)) => (s, e),
            _ => {
                issues.push(issue(
                    pmid,
                    IssueKind::MalformedLine,
                    format!("line {no}: non-numeric offsets `{}`..`{}`", fields[1], fields[2]),
                ));
                continue;
            }
        };
        if end <= start {
            issues.push(issue(
                pmid,
                IssueKind::MalformedLine,
                format!("line {no}: end {end} not after start {start}"),
            ));
            continue;
        }
        if end > index.len() {
            issues.push(issue(
                pmid,
                IssueKind::SpanOutOfBounds,
                format!("line {no}: span {start}..{end} exceeds text length {}", index.len()),
            ));
            continue;
        }
        if start <= title_chars && end > title_chars {
            issues.push(issue(
                pmid,
                IssueKind::SpanOutOfBounds,
                format!("line {no}: span {start}..{end} crosses the title/abstract boundary at {title_chars}"),
            ));
            continue;
        }
        let slice = index.slice(&combined, start, end);
        if slice != fields[3] {
            issues.push(issue(
                pmid,
                IssueKind::MentionMismatch,
                format!("line {no}: text at {start}..{end} is `{slice}`, annotation says `{}`", fields[3]),
            ));
            continue;
        }
        if !seen_spans.insert((start, end)) {
            issues.push(issue(
                pmid,
                IssueKind::DuplicateSpan,
                format!("line {no}: span {start}..{end} annotated more than once"),
            ));
            continue;
        }
        article.annotations.push(EntityAnnotation {
            start,
            end,
            mention: fields[3].to_owned(),
            semantic_type: fields[4].to_owned(),
            identifier: fields.get(5).map(|s| s.to_string()).unwrap_or_default(),
        });
    }
    article.annotations.sort_by_key(|a| (a.start, a.end));

    out.extend(issues.into_iter().map(Record::Issue));
    out.push_back(Record::Article(article));
}

/// Maps character offsets to byte offsets.
struct CharIndex {
    /// `None` for pure ASCII text, where the two coincide.
    bytes: Option<Vec<usize>>,
    chars: usize,
}

impl CharIndex {
    fn new(text: &str) -> Self {
        if text.is_ascii() {
            return Self { bytes: None, chars: text.len() };
        }
        let mut bytes: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        let chars = bytes.len();
        bytes.push(text.len());
        Self { bytes: Some(bytes), chars }
    }

    fn len(&self) -> usize {
        self.chars
    }

    fn slice<'a>(&self, text: &'a str, start: usize, end: usize) -> &'a str {
        match &self.bytes {
            None => &text[start..end],
            Some(b) => &text[b[start]..b[end]],
        }
    }
}
