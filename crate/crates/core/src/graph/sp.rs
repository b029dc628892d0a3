use std::fmt;

use thiserror::Error;

use super::{Graph, VertexId};

/// A series-parallel construction term.
///
/// Leaves are numbered left to right; leaf `k` becomes edge id `k` of the
/// flattened graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpExpr {
    Base,
    Series(Box<SpExpr>, Box<SpExpr>),
    Parallel(Box<SpExpr>, Box<SpExpr>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl SpExpr {
    pub fn series(a: SpExpr, b: SpExpr) -> Self {
        SpExpr::Series(Box::new(a), Box::new(b))
    }

    pub fn parallel(a: SpExpr, b: SpExpr) -> Self {
        SpExpr::Parallel(Box::new(a), Box::new(b))
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            SpExpr::Base => 1,
            SpExpr::Series(a, b) | SpExpr::Parallel(a, b) => a.leaf_count() + b.leaf_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            SpExpr::Base => 0,
            SpExpr::Series(a, b) | SpExpr::Parallel(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Shortest source-to-sink distance, computed structurally.
    pub fn h_min(&self) -> usize {
        match self {
            SpExpr::Base => 1,
            SpExpr::Series(a, b) => a.h_min() + b.h_min(),
            SpExpr::Parallel(a, b) => a.h_min().min(b.h_min()),
        }
    }

    /// Longest self-avoiding source-to-sink path, computed structurally.
    pub fn h_max(&self) -> usize {
        match self {
            SpExpr::Base => 1,
            SpExpr::Series(a, b) => a.h_max() + b.h_max(),
            SpExpr::Parallel(a, b) => a.h_max().max(b.h_max()),
        }
    }

    /// Flattens the term. The source is vertex 0 (nest), the sink vertex 1
    /// (food); internal vertices are numbered in depth-first order.
    pub fn to_graph(&self) -> Graph {
        let mut edges = Vec::with_capacity(self.leaf_count());
        let mut next_vertex = 2;
        self.flatten(0, 1, &mut next_vertex, &mut edges);
        Graph::new(next_vertex, edges, 0, 1).expect("series-parallel terms flatten to valid graphs")
    }

    fn flatten(
        &self,
        source: VertexId,
        sink: VertexId,
        next_vertex: &mut usize,
        edges: &mut Vec<[VertexId; 2]>,
    ) {
        match self {
            SpExpr::Base => edges.push([source, sink]),
            SpExpr::Series(a, b) => {
                let middle = *next_vertex;
                *next_vertex += 1;
                a.flatten(source, middle, next_vertex, edges);
                b.flatten(middle, sink, next_vertex, edges);
            }
            SpExpr::Parallel(a, b) => {
                a.flatten(source, sink, next_vertex, edges);
                b.flatten(source, sink, next_vertex, edges);
            }
        }
    }
}

impl fmt::Display for SpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpExpr::Base => write!(f, "e"),
            SpExpr::Series(a, b) => write!(f, "S({a},{b})"),
            SpExpr::Parallel(a, b) => write!(f, "P({a},{b})"),
        }
    }
}

impl std::str::FromStr for SpExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sp(s)
    }
}

pub fn parse_sp(text: &str) -> Result<SpExpr, ParseError> {
    let mut parser = Parser { bytes: text.as_bytes(), pos: 0 };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.bytes.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> ParseError {
        ParseError { offset: self.pos, message: message.to_string() }
    }

    fn expect(&mut self, byte: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", byte as char)))
        }
    }

    fn expr(&mut self) -> Result<SpExpr, ParseError> {
        self.skip_ws();
        let head = match self.bytes.get(self.pos) {
            Some(&b) => b,
            None => return Err(self.error("unexpected end of input")),
        };
        match head {
            b'e' => {
                self.pos += 1;
                Ok(SpExpr::Base)
            }
            b'S' | b'P' => {
                self.pos += 1;
                self.expect(b'(')?;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b')')?;
                Ok(if head == b'S' { SpExpr::series(a, b) } else { SpExpr::parallel(a, b) })
            }
            _ => Err(self.error("expected 'e', 'S(' or 'P('")),
        }
    }
}
