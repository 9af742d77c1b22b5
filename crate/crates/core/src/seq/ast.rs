use std::fmt;

use crate::channel::{Coupling, Spin};

/// 1-based line and column of a token.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A node with its source position. Equality ignores the position so that
/// formatted-then-reparsed trees compare equal to the original.
#[derive(Clone, Copy, Debug)]
pub struct Spanned<T> {
    pub node: T,
    pub span: Span,
}

impl<T> Spanned<T> {
    pub fn new(node: T, span: Span) -> Self {
        Self { node, span }
    }

    /// Node with a default (0:0) span, for trees built in code.
    pub fn bare(node: T) -> Self {
        Self {
            node,
            span: Span::default(),
        }
    }
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Statement {
    Pulse { angle_deg: f64, phase_deg: f64 },
    Selective(Spin),
    Delay { t_s: f64, coupling: Coupling },
    GradientPeriod,
    ZqDephase,
    Relax { t_s: f64 },
    Acquire { n_points: usize, dwell_s: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeaderKey {
    Nu,
    DeltaNu,
    J,
    Temp,
    T1,
    T2,
    FActive,
}

impl HeaderKey {
    pub const ALL: [HeaderKey; 7] = [
        HeaderKey::Nu,
        HeaderKey::DeltaNu,
        HeaderKey::J,
        HeaderKey::Temp,
        HeaderKey::T1,
        HeaderKey::T2,
        HeaderKey::FActive,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            HeaderKey::Nu => "nu",
            HeaderKey::DeltaNu => "delta_nu",
            HeaderKey::J => "j",
            HeaderKey::Temp => "temp",
            HeaderKey::T1 => "t1",
            HeaderKey::T2 => "t2",
            HeaderKey::FActive => "f_active",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        HeaderKey::ALL.into_iter().find(|k| k.keyword() == s)
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Parsed `.pseq` program: header assignments plus an ordered statement list.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SequenceAst {
    headers: [Option<Spanned<f64>>; 7],
    pub statements: Vec<Spanned<Statement>>,
}

impl SequenceAst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn header(&self, key: HeaderKey) -> Option<f64> {
        self.headers[key.index()].map(|h| h.node)
    }

    pub fn header_spanned(&self, key: HeaderKey) -> Option<Spanned<f64>> {
        self.headers[key.index()]
    }

    /// Sets a header, returning the previous one if any.
    pub fn set_header(&mut self, key: HeaderKey, value: Spanned<f64>) -> Option<Spanned<f64>> {
        self.headers[key.index()].replace(value)
    }

    pub fn headers(&self) -> impl Iterator<Item = (HeaderKey, f64)> + '_ {
        HeaderKey::ALL
            .into_iter()
            .filter_map(|k| self.header(k).map(|v| (k, v)))
    }

    pub fn push(&mut self, statement: Statement) {
        self.statements.push(Spanned::bare(statement));
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty() && self.headers.iter().all(Option::is_none)
    }

    pub fn acquisition(&self) -> Option<Spanned<Statement>> {
        self.statements
            .iter()
            .copied()
            .find(|s| matches!(s.node, Statement::Acquire { .. }))
    }
}
