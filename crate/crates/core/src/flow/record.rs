use std::fmt;
use std::io::{self, BufRead};

use thiserror::Error;

use super::schema::{
    CATEGORICAL_COLUMNS, DIFFICULTY_COLUMN, FIELD_COUNT, LABEL_COLUMN, NORMAL_LABEL,
    NUMERIC_COLUMNS, NUMERIC_COUNT,
};

/// Ground-truth class of a flow. Anomaly is the positive class throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrafficClass {
    Normal,
    Anomaly,
}

impl TrafficClass {
    pub fn from_label(label: &str) -> Self {
        if label == NORMAL_LABEL {
            TrafficClass::Normal
        } else {
            TrafficClass::Anomaly
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TrafficClass::Normal => "normal",
            TrafficClass::Anomaly => "anomaly",
        }
    }
}

impl fmt::Display for TrafficClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One NSL-KDD connection record as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RawFlow {
    /// The 38 numeric features in file order; `numeric[0]` is `duration`.
    pub numeric: [f64; NUMERIC_COUNT],
    /// `protocol_type`, `service`, `flag`.
    pub tokens: [String; 3],
    pub label: String,
    /// Parsed for completeness; nothing downstream reads it.
    pub difficulty: i32,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("expected {FIELD_COUNT} fields, found {0}")]
    FieldCount(usize),
    #[error("not a finite number: {0:?}")]
    NotANumber(String),
    #[error("negative duration")]
    NegativeDuration,
    #[error("empty token")]
    EmptyToken,
    #[error("empty label")]
    EmptyLabel,
    #[error("difficulty is not an integer: {0:?}")]
    BadDifficulty(String),
}

/// A malformed line. `column` is the zero-based field index when one field is to blame.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}{}: {kind}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
pub struct ParseError {
    pub line: usize,
    pub column: Option<usize>,
    pub kind: ParseErrorKind,
}

impl RawFlow {
    /// Parses one CSV line. `line` is the 1-based line number used in errors.
    pub fn parse_line(text: &str, line: usize) -> Result<Self, ParseError> {
        let text = text.trim_end_matches(['\r', '\n']);
        let fields: Vec<&str> = text.split(',').collect();
        let err = |column: Option<usize>, kind| ParseError { line, column, kind };
        if fields.len() != FIELD_COUNT {
            return Err(err(None, ParseErrorKind::FieldCount(fields.len())));
        }

        let mut numeric = [0.0; NUMERIC_COUNT];
        for (slot, &col) in numeric.iter_mut().zip(NUMERIC_COLUMNS.iter()) {
            let raw = fields[col].trim();
            *slot = match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ => return Err(err(Some(col), ParseErrorKind::NotANumber(raw.to_string()))),
            };
        }
        if numeric[0] < 0.0 {
            return Err(err(Some(0), ParseErrorKind::NegativeDuration));
        }

        let token = |col: usize| -> Result<String, ParseError> {
            let t = fields[col].trim();
            if t.is_empty() {
                Err(err(Some(col), ParseErrorKind::EmptyToken))
            } else {
                Ok(t.to_string())
            }
        };
        let tokens = [
            token(CATEGORICAL_COLUMNS[0])?,
            token(CATEGORICAL_COLUMNS[1])?,
            token(CATEGORICAL_COLUMNS[2])?,
        ];

        let label = fields[LABEL_COLUMN].trim();
        if label.is_empty() {
            return Err(err(Some(LABEL_COLUMN), ParseErrorKind::EmptyLabel));
        }
        let raw_difficulty = fields[DIFFICULTY_COLUMN].trim();
        let difficulty = raw_difficulty.parse::<i32>().map_err(|_| {
            err(
                Some(DIFFICULTY_COLUMN),
                ParseErrorKind::BadDifficulty(raw_difficulty.to_string()),
            )
        })?;

        Ok(RawFlow {
            numeric,
            tokens,
            label: label.to_string(),
            difficulty,
        })
    }

    pub fn duration(&self) -> f64 {
        self.numeric[0]
    }

    pub fn protocol_type(&self) -> &str {
        &self.tokens[0]
    }

    pub fn service(&self) -> &str {
        &self.tokens[1]
    }

    pub fn flag(&self) -> &str {
        &self.tokens[2]
    }

    pub fn class(&self) -> TrafficClass {
        TrafficClass::from_label(&self.label)
    }

    pub fn is_normal(&self) -> bool {
        self.class() == TrafficClass::Normal
    }
}

/// Writes the record back in dataset order, suitable for `parse_line`.
impl fmt::Display for RawFlow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut numeric = self.numeric.iter();
        for col in 0..LABEL_COLUMN {
            if col > 0 {
                f.write_str(",")?;
            }
            match CATEGORICAL_COLUMNS.iter().position(|&c| c == col) {
                Some(i) => f.write_str(&self.tokens[i])?,
                None => write!(f, "{}", numeric.next().expect("numeric column"))?,
            }
        }
        write!(f, ",{},{}", self.label, self.difficulty)
    }
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error(transparent)]
    Malformed(#[from] ParseError),
    #[error("read failed at line {line}: {source}")]
    Io { line: usize, source: io::Error },
}

/// Streams records from a reader, one item per non-blank line.
///
/// Malformed lines are yielded as errors and the stream continues; an I/O
/// error is yielded once and ends the stream.
pub struct FlowReader<R> {
    inner: R,
    line: usize,
    buf: String,
    done: bool,
}

impl<R: BufRead> FlowReader<R> {
    pub fn new(inner: R) -> Self {
        FlowReader {
            inner,
            line: 0,
            buf: String::new(),
            done: false,
        }
    }

    /// Line number of the most recently yielded item.
    pub fn line(&self) -> usize {
        self.line
    }
}

impl<R: BufRead> Iterator for FlowReader<R> {
    type Item = (usize, Result<RawFlow, ReadError>);

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            self.buf.clear();
            self.line += 1;
            match self.inner.read_line(&mut self.buf) {
                Ok(0) => self.done = true,
                Ok(_) => {
                    if self.buf.trim().is_empty() {
                        continue;
                    }
                    let parsed = RawFlow::parse_line(&self.buf, self.line).map_err(ReadError::from);
                    return Some((self.line, parsed));
                }
                Err(source) => {
                    self.done = true;
                    return Some((self.line, Err(ReadError::Io { line: self.line, source })));
                }
            }
        }
        None
    }
}

/// Everything read from one file: the good records in order plus the rejected lines.
#[derive(Debug, Default)]
pub struct ParsedRecords {
    pub flows: Vec<RawFlow>,
    pub errors: Vec<ParseError>,
}

impl ParsedRecords {
    pub fn normal_count(&self) -> usize {
        self.flows.iter().filter(|f| f.is_normal()).count()
    }

    pub fn anomaly_count(&self) -> usize {
        self.flows.len() - self.normal_count()
    }
}

/// Reads a whole NSL-KDD CSV stream (no header). Malformed lines are skipped and
/// reported; only an I/O failure aborts.
pub fn parse_records<R: BufRead>(reader: R) -> Result<ParsedRecords, io::Error> {
    let mut out = ParsedRecords::default();
    for (_, item) in FlowReader::new(reader) {
        match item {
            Ok(flow) => out.flows.push(flow),
            Err(ReadError::Malformed(e)) => out.errors.push(e),
            Err(ReadError::Io { source, .. }) => return Err(source),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "0,tcp,ftp_data,SF,491,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,2,2,0.00,0.00,0.00,0.00,1.00,0.00,0.00,150,25,0.17,0.03,0.17,0.00,0.00,0.00,0.05,0.00,normal,20";

    #[test]
    fn parses_dataset_line() {
        let flow = RawFlow::parse_line(SAMPLE, 1).unwrap();
        assert_eq!(flow.protocol_type(), "tcp");
        assert_eq!(flow.service(), "ftp_data");
        assert_eq!(flow.flag(), "SF");
        assert_eq!(flow.numeric[1], 491.0);
        assert_eq!(flow.numeric[NUMERIC_COUNT - 1], 0.0);
        assert_eq!(flow.numeric[NUMERIC_COUNT - 2], 0.05);
        assert_eq!(flow.difficulty, 20);
        assert!(flow.is_normal());
    }

    #[test]
    fn display_round_trips() {
        let flow = RawFlow::parse_line(SAMPLE, 1).unwrap();
        let again = RawFlow::parse_line(&flow.to_string(), 1).unwrap();
        assert_eq!(flow, again);
    }

    #[test]
    fn attack_label_is_anomaly() {
        let line = SAMPLE.replace(",normal,", ",neptune,");
        let flow = RawFlow::parse_line(&line, 1).unwrap();
        assert_eq!(flow.class(), TrafficClass::Anomaly);
    }

    #[test]
    fn field_count_error() {
        let e = RawFlow::parse_line("0,tcp,http", 7).unwrap_err();
        assert_eq!(e.line, 7);
        assert_eq!(e.kind, ParseErrorKind::FieldCount(3));
    }

    #[test]
    fn bad_number_names_column() {
        let line = SAMPLE.replacen("491", "abc", 1);
        let e = RawFlow::parse_line(&line, 3).unwrap_err();
        assert_eq!(e.column, Some(4));
        assert!(matches!(e.kind, ParseErrorKind::NotANumber(_)));
        let line = SAMPLE.replacen("491", "inf", 1);
        assert!(RawFlow::parse_line(&line, 3).is_err());
    }

    #[test]
    fn empty_label_rejected() {
        let line = SAMPLE.replace(",normal,", ",,");
        let e = RawFlow::parse_line(&line, 1).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::EmptyLabel);
        assert_eq!(e.column, Some(LABEL_COLUMN));
    }

    #[test]
    fn crlf_tolerated() {
        let flow = RawFlow::parse_line(&format!("{SAMPLE}\r\n"), 1).unwrap();
        assert_eq!(flow.difficulty, 20);
    }

    #[test]
    fn empty_input_is_empty() {
        let parsed = parse_records("".as_bytes()).unwrap();
        assert!(parsed.flows.is_empty());
        assert!(parsed.errors.is_empty());
    }

    #[test]
    fn malformed_lines_are_skipped_and_counted() {
        let text = format!("{SAMPLE}\nbroken,line\n{SAMPLE}\n\n{}\n", SAMPLE.replace("tcp", ""));
        let parsed = parse_records(text.as_bytes()).unwrap();
        assert_eq!(parsed.flows.len(), 2);
        assert_eq!(parsed.errors.len(), 2);
        assert_eq!(parsed.errors[0].line, 2);
        assert_eq!(parsed.errors[1].line, 5);
        assert_eq!(parsed.errors[1].column, Some(1));
    }
}
