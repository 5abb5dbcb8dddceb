//! JSON wire format for argument graphs.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use wasa_core::{build_graph, ArgGraph, Edge, Polarity};

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub version: String,
    pub arguments: Vec<ArgumentDoc>,
    #[serde(default)]
    pub edges: Vec<EdgeDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArgumentDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub from: String,
    pub to: String,
    pub polarity: Polarity,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DocumentError {
    #[error("malformed document at line {line}, column {column}: {message}")]
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

impl DocumentError {
    fn schema(path: impl Into<String>, message: impl Into<String>) -> DocumentError {
        DocumentError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn path(&self) -> Option<&str> {
        match self {
            DocumentError::Schema { path, .. } => Some(path),
            DocumentError::Malformed { .. } => None,
        }
    }
}

/// Deserializes `bytes` as `T`, reporting the JSON path of the first
/// offending field.
pub fn from_json<'a, T: Deserialize<'a>>(bytes: &'a [u8]) -> Result<T, DocumentError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = match e.path().to_string() {
            p if p == "." => "$".to_string(),
            p => p,
        };
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            DocumentError::Malformed {
                line: inner.line(),
                column: inner.column(),
                message: strip_position(&inner.to_string()),
            }
        } else {
            DocumentError::Schema {
                path,
                message: strip_position(&inner.to_string()),
            }
        }
    })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub fn parse_graph(bytes: &[u8]) -> Result<GraphDocument, DocumentError> {
    let doc: GraphDocument = from_json(bytes)?;
    doc.validate()?;
    Ok(doc)
}

pub fn serialize_graph(doc: &GraphDocument) -> String {
    serde_json::to_string_pretty(doc).expect("documents always serialize")
}

impl GraphDocument {
    pub fn validate(&self) -> Result<(), DocumentError> {
        if self.version != FORMAT_VERSION {
            return Err(DocumentError::schema(
                "version",
                format!(
                    "unsupported version `{}`, expected `{FORMAT_VERSION}`",
                    self.version
                ),
            ));
        }
        let mut seen = HashMap::new();
        for (k, a) in self.arguments.iter().enumerate() {
            if a.id.is_empty() {
                return Err(DocumentError::schema(
                    format!("arguments[{k}].id"),
                    "id must not be empty",
                ));
            }
            if let Some(first) = seen.insert(a.id.as_str(), k) {
                return Err(DocumentError::schema(
                    format!("arguments[{k}].id"),
                    format!("duplicate id `{}` (first at arguments[{first}])", a.id),
                ));
            }
            if !a.weight.is_finite() {
                return Err(DocumentError::schema(
                    format!("arguments[{k}].weight"),
                    "weight must be finite",
                ));
            }
        }
        let mut pairs = HashMap::new();
        for (k, e) in self.edges.iter().enumerate() {
            for (field, id) in [("from", &e.from), ("to", &e.to)] {
                if !seen.contains_key(id.as_str()) {
                    return Err(DocumentError::schema(
                        format!("edges[{k}].{field}"),
                        format!("unknown argument `{id}`"),
                    ));
                }
            }
            if let Some(first) = pairs.insert((e.from.as_str(), e.to.as_str()), k) {
                return Err(DocumentError::schema(
                    format!("edges[{k}]"),
                    format!(
                        "second edge from `{}` to `{}` (first at edges[{first}])",
                        e.from, e.to
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn to_graph(&self) -> Result<ArgGraph, DocumentError> {
        self.validate()?;
        let ids: Vec<&str> = self.arguments.iter().map(|a| a.id.as_str()).collect();
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| Edge::new(e.from.clone(), e.to.clone(), e.polarity))
            .collect();
        let weights: Vec<f64> = self.arguments.iter().map(|a| a.weight).collect();
        build_graph(&ids, &edges, &weights).map_err(|e| DocumentError::schema("", e.to_string()))
    }

    /// Edges are listed by target, then source.
    pub fn from_graph(g: &ArgGraph) -> GraphDocument {
        GraphDocument {
            version: FORMAT_VERSION.to_string(),
            arguments: (0..g.len())
                .map(|i| ArgumentDoc {
                    id: g.id(i).to_string(),
                    label: None,
                    weight: g.weight(i),
                })
                .collect(),
            edges: g
                .edges()
                .into_iter()
                .map(|e| EdgeDoc {
                    from: e.source,
                    to: e.target,
                    polarity: e.polarity,
                })
                .collect(),
        }
    }

    /// Stable id derived from the compact serialization.
    pub fn content_id(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("documents always serialize");
        let digest = Sha256::digest(&bytes);
        hex::encode(&digest[..8])
    }

    pub fn argument_index(&self, id: &str) -> Option<usize> {
        self.arguments.iter().position(|a| a.id == id)
    }

    pub fn edge_index(&self, from: &str, to: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.from == from && e.to == to)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LIVERPOOL: &str = r#"{
        "version": "1",
        "arguments": [
            {"id": "mnw", "weight": 8}, {"id": "lpl", "weight": 0},
            {"id": "wlm", "weight": 5}, {"id": "bpi", "weight": 2}
        ],
        "edges": [
            {"from": "mnw", "to": "lpl", "polarity": "support"},
            {"from": "wlm", "to": "lpl", "polarity": "support"},
            {"from": "bpi", "to": "wlm", "polarity": "attack"}
        ]
    }"#;

    fn schema_path(r: Result<GraphDocument, DocumentError>) -> String {
        match r {
            Err(DocumentError::Schema { path, .. }) => path,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parses_liverpool() {
        let doc = parse_graph(LIVERPOOL.as_bytes()).unwrap();
        assert_eq!((doc.arguments.len(), doc.edges.len()), (4, 3));
        let g = doc.to_graph().unwrap();
        assert_eq!(g.entry(2, 3), -1);
    }

    #[test]
    fn misspelt_polarity_has_a_path() {
        let bad = LIVERPOOL.replace(r#""attack""#, r#""suport""#);
        assert_eq!(
            schema_path(parse_graph(bad.as_bytes())),
            "edges[2].polarity"
        );
    }

    #[test]
    fn semantic_errors_have_paths() {
        let dup = LIVERPOOL.replace(r#""id": "wlm""#, r#""id": "mnw""#);
        assert_eq!(schema_path(parse_graph(dup.as_bytes())), "arguments[2].id");
        let unknown = LIVERPOOL.replace(r#""from": "bpi""#, r#""from": "xyz""#);
        assert_eq!(
            schema_path(parse_graph(unknown.as_bytes())),
            "edges[2].from"
        );
        let version = LIVERPOOL.replace(r#""version": "1""#, r#""version": "9""#);
        assert_eq!(schema_path(parse_graph(version.as_bytes())), "version");
        let weight = LIVERPOOL.replace(r#""weight": 8"#, r#""weight": "8""#);
        assert_eq!(
            schema_path(parse_graph(weight.as_bytes())),
            "arguments[0].weight"
        );
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse_graph(b"{\n  \"version\": \"1\",\n  oops\n}") {
            Err(DocumentError::Malformed { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn full_precision_round_trip() {
        let mut doc = parse_graph(LIVERPOOL.as_bytes()).unwrap();
        doc.arguments[0].weight = 0.1 + 0.2;
        doc.arguments[1].label = Some("Liverpool wins".into());
        let back = parse_graph(serialize_graph(&doc).as_bytes()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.arguments[0].weight.to_bits(), (0.1f64 + 0.2).to_bits());
    }

    #[test]
    fn graph_round_trip() {
        let g = parse_graph(LIVERPOOL.as_bytes())
            .unwrap()
            .to_graph()
            .unwrap();
        assert_eq!(GraphDocument::from_graph(&g).to_graph().unwrap(), g);
    }

    #[test]
    fn content_id_is_stable() {
        let a = parse_graph(LIVERPOOL.as_bytes()).unwrap();
        let b: GraphDocument = serde_json::from_str(&serialize_graph(&a)).unwrap();
        assert_eq!(a.content_id(), b.content_id());
        assert_eq!(a.content_id().len(), 16);
    }
}
