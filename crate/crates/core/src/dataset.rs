//! Typed observation tables, the schema sidecar format, and the split of a
//! table into one prediction point plus training rows.
//!
//! Schema lines look like `name: kind` where kind is one of `bool`,
//! `nominal {a,b}`, `ordered {lo,mid,hi}`, `continuous`, `ignore` or
//! `class {pos,neg}`. The first declared class value is the positive class.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const MISSING_TOKEN: &str = "?";

#[derive(Debug, Clone, PartialEq)]
pub enum AttributeKind {
    Boolean,
    Nominal(Vec<String>),
    Ordered(Vec<String>),
    Continuous,
    Ignored,
    Class(Vec<String>),
}

impl AttributeKind {
    /// Declared category list for nominal, ordered and class attributes.
    pub fn categories(&self) -> Option<&[String]> {
        match self {
            AttributeKind::Nominal(v) | AttributeKind::Ordered(v) | AttributeKind::Class(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_ordered(&self) -> bool {
        matches!(self, AttributeKind::Ordered(_) | AttributeKind::Continuous)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Bool(bool),
    Category(u32),
    Real(f64),
    Missing,
}

impl Value {
    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }

    /// Position on the attribute's ordered axis, if the value has one.
    pub fn ordinal(&self) -> Option<f64> {
        match *self {
            Value::Bool(b) => Some(if b { 1.0 } else { 0.0 }),
            Value::Category(c) => Some(c as f64),
            Value::Real(r) => Some(r),
            Value::Missing => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    attributes: Vec<Attribute>,
    class_column: usize,
}

fn parse_value_list(body: &str, line: usize) -> Result<Vec<String>> {
    let inner = body
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| Error::SchemaSyntax {
            line,
            message: format!("expected {{v1,v2,...}}, found {body:?}"),
        })?;
    let values: Vec<String> = inner
        .split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect();
    if values.is_empty() {
        return Err(Error::SchemaSyntax {
            line,
            message: "empty value list".into(),
        });
    }
    for (i, v) in values.iter().enumerate() {
        if v == MISSING_TOKEN {
            return Err(Error::SchemaSyntax {
                line,
                message: format!("{MISSING_TOKEN:?} is reserved for missing values"),
            });
        }
        if values[..i].contains(v) {
            return Err(Error::SchemaSyntax {
                line,
                message: format!("duplicate value {v:?}"),
            });
        }
    }
    Ok(values)
}

impl Schema {
    pub fn new(attributes: Vec<Attribute>) -> Result<Self> {
        let class_columns: Vec<usize> = attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| matches!(a.kind, AttributeKind::Class(_)))
            .map(|(i, _)| i)
            .collect();
        let class_column = match class_columns.as_slice() {
            [] => return Err(Error::NoClassColumn),
            [c] => *c,
            _ => return Err(Error::SchemaMismatch("more than one class column declared".into())),
        };
        if let AttributeKind::Class(values) = &attributes[class_column].kind {
            if values.len() != 2 {
                return Err(Error::NonBinaryClass {
                    column: attributes[class_column].name.clone(),
                    values: values.clone(),
                });
            }
        }
        for (i, a) in attributes.iter().enumerate() {
            if attributes[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::SchemaMismatch(format!("duplicate attribute name {:?}", a.name)));
            }
        }
        Ok(Self {
            attributes,
            class_column,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut attributes = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (name, kind) = trimmed.split_once(':').ok_or_else(|| Error::SchemaSyntax {
                line,
                message: "expected `name: kind`".into(),
            })?;
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::SchemaSyntax {
                    line,
                    message: "empty attribute name".into(),
                });
            }
            let kind = kind.trim();
            let (word, rest) = match kind.find(|c: char| c.is_whitespace() || c == '{') {
                Some(p) => (&kind[..p], &kind[p..]),
                None => (kind, ""),
            };
            let kind = match word {
                "bool" | "boolean" => AttributeKind::Boolean,
                "continuous" => AttributeKind::Continuous,
                "ignore" => AttributeKind::Ignored,
                "nominal" => AttributeKind::Nominal(parse_value_list(rest, line)?),
                "ordered" => AttributeKind::Ordered(parse_value_list(rest, line)?),
                "class" => AttributeKind::Class(parse_value_list(rest, line)?),
                other => {
                    return Err(Error::SchemaSyntax {
                        line,
                        message: format!("unknown kind {other:?}"),
                    })
                }
            };
            if matches!(
                kind,
                AttributeKind::Boolean | AttributeKind::Continuous | AttributeKind::Ignored
            ) && !rest.trim().is_empty()
            {
                return Err(Error::SchemaSyntax {
                    line,
                    message: format!("unexpected text after {word:?}"),
                });
            }
            attributes.push(Attribute {
                name: name.to_string(),
                kind,
            });
        }
        Self::new(attributes)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for a in &self.attributes {
            let kind = match &a.kind {
                AttributeKind::Boolean => "bool".to_string(),
                AttributeKind::Continuous => "continuous".to_string(),
                AttributeKind::Ignored => "ignore".to_string(),
                AttributeKind::Nominal(v) => format!("nominal {{{}}}", v.join(",")),
                AttributeKind::Ordered(v) => format!("ordered {{{}}}", v.join(",")),
                AttributeKind::Class(v) => format!("class {{{}}}", v.join(",")),
            };
            let _ = writeln!(out, "{}: {}", a.name, kind);
        }
        out
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, index: usize) -> &Attribute {
        &self.attributes[index]
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn class_column(&self) -> usize {
        self.class_column
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    /// Class value names; index 0 is the positive class.
    pub fn class_values(&self) -> &[String] {
        self.attributes[self.class_column]
            .kind
            .categories()
            .expect("class column carries categories")
    }

    pub fn class_name(&self, positive: bool) -> &str {
        &self.class_values()[if positive { 0 } else { 1 }]
    }

    fn parse_token(&self, col: usize, token: &str, row: usize) -> Result<Value> {
        if token == MISSING_TOKEN {
            return Ok(Value::Missing);
        }
        let attr = &self.attributes[col];
        let bad = |reason: &str| Error::BadValue {
            row,
            column: attr.name.clone(),
            token: token.to_string(),
            reason: reason.to_string(),
        };
        match &attr.kind {
            AttributeKind::Boolean => match token.to_ascii_lowercase().as_str() {
                "t" | "true" | "1" | "y" | "yes" => Ok(Value::Bool(true)),
                "f" | "false" | "0" | "n" | "no" => Ok(Value::Bool(false)),
                _ => Err(bad("not a boolean")),
            },
            AttributeKind::Continuous => {
                let r: f64 = token.parse().map_err(|_| bad("not a number"))?;
                if r.is_finite() {
                    Ok(Value::Real(r))
                } else {
                    Err(bad("not finite"))
                }
            }
            AttributeKind::Ignored => Ok(Value::Missing),
            AttributeKind::Nominal(v) | AttributeKind::Ordered(v) | AttributeKind::Class(v) => v
                .iter()
                .position(|c| c == token)
                .map(|i| Value::Category(i as u32))
                .ok_or_else(|| bad("undeclared category")),
        }
    }

    fn format_value(&self, col: usize, value: &Value) -> String {
        match (value, &self.attributes[col].kind) {
            (Value::Missing, _) => MISSING_TOKEN.to_string(),
            (Value::Bool(b), _) => if *b { "T" } else { "F" }.to_string(),
            (Value::Real(r), _) => format!("{r}"),
            (Value::Category(c), kind) => kind.categories().map(|v| v[*c as usize].clone()).unwrap_or_default(),
        }
    }
}

/// An immutable typed table. Row order is the file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    rows: Vec<Vec<Value>>,
}

impl Dataset {
    pub fn new(schema: Schema, rows: Vec<Vec<Value>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != schema.len() {
                return Err(Error::SchemaMismatch(format!(
                    "row {i} has {} values, schema has {}",
                    r.len(),
                    schema.len()
                )));
            }
        }
        Ok(Self { schema, rows })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Value] {
        &self.rows[i]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn value(&self, row: usize, col: usize) -> Value {
        self.rows[row][col]
    }

    /// `Some(true)` for the positive class, `None` when unlabeled.
    pub fn class_of(&self, row: usize) -> Option<bool> {
        match self.rows[row][self.schema.class_column] {
            Value::Category(c) => Some(c == 0),
            _ => None,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(self.schema.attributes.iter().map(|a| a.name.as_str()))
            .expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().enumerate().map(|(c, v)| self.schema.format_value(c, v)))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 output")
    }
}

pub fn parse_dataset(csv_text: &str, schema_text: &str) -> Result<Dataset> {
    let schema = Schema::parse(schema_text)?;
    parse_with_schema(csv_text, schema)
}

pub fn parse_with_schema(csv_text: &str, schema: Schema) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(csv_text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();

    // column position in the file -> attribute index in the schema
    let mut mapping = Vec::with_capacity(header.len());
    for name in header.iter() {
        let idx = schema
            .index_of(name)
            .ok_or_else(|| Error::SchemaMismatch(format!("unknown column {name:?}")))?;
        if mapping.contains(&idx) {
            return Err(Error::SchemaMismatch(format!("duplicate column {name:?}")));
        }
        mapping.push(idx);
    }
    if mapping.len() != schema.len() {
        let missing: Vec<&str> = schema
            .attributes
            .iter()
            .enumerate()
            .filter(|(i, _)| !mapping.contains(i))
            .map(|(_, a)| a.name.as_str())
            .collect();
        return Err(Error::SchemaMismatch(format!("columns missing from data: {missing:?}")));
    }

    let class_col = schema.class_column;
    let mut class_tokens: Vec<String> = Vec::new();
    let mut raw_rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
        if rec.len() != mapping.len() {
            return Err(Error::SchemaMismatch(format!(
                "row {i} has {} fields, header has {}",
                rec.len(),
                mapping.len()
            )));
        }
        let mut row = vec![""; schema.len()];
        for (field, &attr) in rec.iter().zip(&mapping) {
            row[attr] = field;
        }
        let ct = row[class_col];
        if ct != MISSING_TOKEN && !class_tokens.iter().any(|t| t == ct) {
            class_tokens.push(ct.to_string());
        }
        raw_rows.push(row.into_iter().map(str::to_string).collect::<Vec<_>>());
    }
    if class_tokens.len() > 2 {
        return Err(Error::NonBinaryClass {
            column: schema.attributes[class_col].name.clone(),
            values: class_tokens,
        });
    }

    let rows = raw_rows
        .iter()
        .enumerate()
        .map(|(i, raw)| {
            raw.iter()
                .enumerate()
                .map(|(c, tok)| schema.parse_token(c, tok, i))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(schema, rows)
}

/// The point n=0: one row's attribute values with the class hidden.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionPoint {
    values: Vec<Value>,
    source_row: Option<usize>,
}

impl PredictionPoint {
    /// Builds a point from raw values; the class entry is always masked.
    pub fn new(schema: &Schema, mut values: Vec<Value>) -> Result<Self> {
        if values.len() != schema.len() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: schema.len(),
            });
        }
        values[schema.class_column()] = Value::Missing;
        Ok(Self {
            values,
            source_row: None,
        })
    }

    pub fn from_row(dataset: &Dataset, row: usize) -> Result<Self> {
        if row >= dataset.len() {
            return Err(Error::IndexOutOfRange {
                index: row,
                len: dataset.len(),
            });
        }
        let mut p = Self::new(dataset.schema(), dataset.row(row).to_vec())?;
        p.source_row = Some(row);
        Ok(p)
    }

    pub fn value(&self, col: usize) -> Value {
        self.values[col]
    }

    pub fn source_row(&self) -> Option<usize> {
        self.source_row
    }
}

/// Training rows n=1..N as indices into a borrowed dataset, in file order.
#[derive(Debug, Clone)]
pub struct TrainingRows<'a> {
    dataset: &'a Dataset,
    rows: Vec<usize>,
    positives: usize,
}

impl<'a> TrainingRows<'a> {
    pub fn new(dataset: &'a Dataset, rows: Vec<usize>) -> Result<Self> {
        let mut positives = 0;
        for &r in &rows {
            if r >= dataset.len() {
                return Err(Error::IndexOutOfRange {
                    index: r,
                    len: dataset.len(),
                });
            }
            match dataset.class_of(r) {
                Some(true) => positives += 1,
                Some(false) => {}
                None => return Err(Error::UnlabeledTrainingRow(r)),
            }
        }
        Ok(Self {
            dataset,
            rows,
            positives,
        })
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.dataset
    }

    pub fn indices(&self) -> &[usize] {
        &self.rows
    }

    /// N
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.positives
    }

    pub fn negatives(&self) -> usize {
        self.rows.len() - self.positives
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = Value> + '_ {
        self.rows.iter().map(move |&r| self.dataset.value(r, col))
    }

    pub fn classes(&self) -> impl Iterator<Item = bool> + '_ {
        self.rows
            .iter()
            .map(move |&r| self.dataset.class_of(r).expect("validated on construction"))
    }
}

/// Makes `row` the prediction point and every other row a training row.
pub fn split_for_prediction(dataset: &Dataset, row: usize) -> Result<(PredictionPoint, TrainingRows<'_>)> {
    let point = PredictionPoint::from_row(dataset, row)?;
    let training = TrainingRows::new(dataset, (0..dataset.len()).filter(|&r| r != row).collect())?;
    Ok((point, training))
}

/// Category lookup by name, used by tests and the CLI.
pub fn category_index(schema: &Schema, col: usize) -> HashMap<&str, u32> {
    schema.attributes[col]
        .kind
        .categories()
        .map(|v| v.iter().enumerate().map(|(i, s)| (s.as_str(), i as u32)).collect())
        .unwrap_or_default()
}
