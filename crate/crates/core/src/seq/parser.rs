use std::fmt;

use super::ast::{HeaderKey, SequenceAst, Span, Spanned, Statement};
use crate::channel::{Coupling, Spin};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

/// Every error found in one pass, in source order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseErrors(pub Vec<ParseError>);

impl ParseErrors {
    pub fn first(&self) -> &ParseError {
        &self.0[0]
    }
}

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseErrors {}

struct Token<'a> {
    text: &'a str,
    span: Span,
}

fn tokenize(line: &str, line_no: usize) -> Vec<Token<'_>> {
    let code = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in code.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(token(code, s, i, line_no));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(token(code, s, code.len(), line_no));
    }
    tokens
}

fn token(code: &str, start: usize, end: usize, line: usize) -> Token<'_> {
    Token {
        text: &code[start..end],
        span: Span {
            line,
            column: code[..start].chars().count() + 1,
        },
    }
}

fn err(span: Span, message: impl Into<String>) -> ParseError {
    ParseError {
        span,
        message: message.into(),
    }
}

fn number(tok: &Token<'_>) -> Result<f64, ParseError> {
    match tok.text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(err(tok.span, format!("`{}` is not a finite number", tok.text))),
        Err(_) => Err(err(tok.span, format!("expected a number, found `{}`", tok.text))),
    }
}

fn non_negative(tok: &Token<'_>, what: &str) -> Result<f64, ParseError> {
    let v = number(tok)?;
    if v < 0.0 {
        return Err(err(tok.span, format!("{what} must be non-negative, found {v}")));
    }
    Ok(v)
}

fn positive(tok: &Token<'_>, what: &str) -> Result<f64, ParseError> {
    let v = number(tok)?;
    if v <= 0.0 {
        return Err(err(tok.span, format!("{what} must be positive, found {v}")));
    }
    Ok(v)
}

fn arity(
    head: &Token<'_>,
    args: &[Token<'_>],
    min: usize,
    max: usize,
    usage: &str,
) -> Result<(), ParseError> {
    if args.len() < min || args.len() > max {
        let span = args.get(max).map_or(head.span, |t| t.span);
        let expected = if min == max {
            format!("{min}")
        } else {
            format!("{min} to {max}")
        };
        return Err(err(
            span,
            format!(
                "`{}` takes {expected} argument(s), found {} (usage: {usage})",
                head.text,
                args.len()
            ),
        ));
    }
    Ok(())
}

fn statement(head: &Token<'_>, args: &[Token<'_>]) -> Result<Statement, ParseError> {
    match head.text {
        "pulse" => {
            arity(head, args, 2, 2, "pulse <angle_deg> <phase_deg>")?;
            Ok(Statement::Pulse {
                angle_deg: number(&args[0])?,
                phase_deg: number(&args[1])?,
            })
        }
        "selective" => {
            arity(head, args, 1, 1, "selective I|S")?;
            match args[0].text {
                "I" | "i" => Ok(Statement::Selective(Spin::I)),
                "S" | "s" => Ok(Statement::Selective(Spin::S)),
                other => Err(err(args[0].span, format!("unknown spin `{other}` (expected I or S)"))),
            }
        }
        "delay" => {
            arity(head, args, 1, 2, "delay <t_s> [off|weak|strong]")?;
            let t_s = non_negative(&args[0], "delay")?;
            let coupling = match args.get(1).map(|t| (t.text, t.span)) {
                None | Some(("weak", _)) => Coupling::Weak,
                Some(("off", _)) => Coupling::Off,
                Some(("strong", _)) => Coupling::Strong,
                Some((other, span)) => {
                    return Err(err(
                        span,
                        format!("unknown coupling `{other}` (expected off, weak or strong)"),
                    ))
                }
            };
            Ok(Statement::Delay { t_s, coupling })
        }
        "gradient_period" => {
            arity(head, args, 0, 0, "gradient_period")?;
            Ok(Statement::GradientPeriod)
        }
        "zqdephase" => {
            arity(head, args, 0, 0, "zqdephase")?;
            Ok(Statement::ZqDephase)
        }
        "relax" => {
            arity(head, args, 1, 1, "relax <t_s>")?;
            Ok(Statement::Relax {
                t_s: non_negative(&args[0], "relaxation time")?,
            })
        }
        "acquire" => {
            arity(head, args, 2, 2, "acquire <n_points> <dwell_s>")?;
            let n_points = args[0].text.parse::<usize>().map_err(|_| {
                err(
                    args[0].span,
                    format!("expected a non-negative integer point count, found `{}`", args[0].text),
                )
            })?;
            Ok(Statement::Acquire {
                n_points,
                dwell_s: positive(&args[1], "dwell time")?,
            })
        }
        other => Err(err(head.span, format!("unknown statement `{other}`"))),
    }
}

/// Parses `.pseq` text. All independent errors are collected.
pub fn parse(text: &str) -> Result<SequenceAst, ParseErrors> {
    let mut ast = SequenceAst::new();
    let mut errors = Vec::new();
    let mut acquire_seen: Option<Span> = None;

    for (idx, line) in text.lines().enumerate() {
        let tokens = tokenize(line, idx + 1);
        let Some((head, args)) = tokens.split_first() else {
            continue;
        };
        if let Some(key) = HeaderKey::from_keyword(head.text) {
            let value = arity(head, args, 1, 1, &format!("{} <value>", key.keyword()))
                .and_then(|_| positive(&args[0], key.keyword()))
                .and_then(|v| {
                    if key == HeaderKey::FActive && v > 1.0 {
                        Err(err(args[0].span, format!("f_active must lie in (0, 1], found {v}")))
                    } else {
                        Ok(v)
                    }
                });
            match value {
                Ok(v) => {
                    if let Some(prev) = ast.header_spanned(key) {
                        errors.push(err(
                            head.span,
                            format!("duplicate header `{}` (first set at {})", key.keyword(), prev.span),
                        ));
                    } else {
                        ast.set_header(key, Spanned::new(v, head.span));
                    }
                }
                Err(e) => errors.push(e),
            }
            continue;
        }
        match statement(head, args) {
            Ok(st) => {
                if matches!(st, Statement::Acquire { .. }) {
                    if let Some(first) = acquire_seen {
                        errors.push(err(head.span, format!("second `acquire` (first at {first})")));
                        continue;
                    }
                    acquire_seen = Some(head.span);
                }
                ast.statements.push(Spanned::new(st, head.span));
            }
            Err(e) => errors.push(e),
        }
    }

    if errors.is_empty() {
        Ok(ast)
    } else {
        Err(ParseErrors(errors))
    }
}

/// Parses raw bytes; invalid UTF-8 is reported at its position.
pub fn parse_bytes(bytes: &[u8]) -> Result<SequenceAst, ParseErrors> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(text),
        Err(e) => {
            let valid = &bytes[..e.valid_up_to()];
            // the prefix is valid UTF-8 by construction
            let prefix = std::str::from_utf8(valid).unwrap_or_default();
            let line = prefix.matches('\n').count() + 1;
            let column = prefix.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
            Err(ParseErrors(vec![err(
                Span { line, column },
                "invalid UTF-8 byte sequence",
            )]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_comments() {
        assert!(parse("").unwrap().is_empty());
        assert!(parse("# just a comment\n\n   \n").unwrap().is_empty());
    }

    #[test]
    fn selective_recipe() {
        let ast = parse("delta_nu 492\npulse 90 0\ndelay 5.08e-4\npulse 90 135").unwrap();
        assert_eq!(ast.header(HeaderKey::DeltaNu), Some(492.0));
        assert_eq!(
            ast.statements.iter().map(|s| s.node).collect::<Vec<_>>(),
            vec![
                Statement::Pulse { angle_deg: 90.0, phase_deg: 0.0 },
                Statement::Delay { t_s: 5.08e-4, coupling: Coupling::Weak },
                Statement::Pulse { angle_deg: 90.0, phase_deg: 135.0 },
            ]
        );
        assert_eq!(ast.statements[1].span, Span { line: 3, column: 1 });
    }

    #[test]
    fn arity_error_has_position() {
        let e = parse("pulse 90").unwrap_err();
        assert_eq!(e.0.len(), 1);
        assert_eq!(e.first().span.line, 1);
        assert!(e.first().message.contains("takes 2"), "{}", e);
    }

    #[test]
    fn collects_independent_errors() {
        let text = "pulse 90\nfrobnicate\nnu 4e8\nnu 5e8\ndelay -1\nacquire 8 1e-3\nacquire 8 1e-3\nselective X\n";
        let e = parse(text).unwrap_err();
        let lines: Vec<usize> = e.0.iter().map(|x| x.span.line).collect();
        assert_eq!(lines, vec![1, 2, 4, 5, 7, 8]);
        assert_eq!(e.0[4].span.column, 1);
        assert_eq!(e.0[2].span.column, 1);
    }

    #[test]
    fn column_points_at_bad_token() {
        let e = parse("  pulse 90 abc").unwrap_err();
        assert_eq!(e.first().span, Span { line: 1, column: 12 });
        let e = parse("delay 1 loose").unwrap_err();
        assert_eq!(e.first().span.column, 9);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(parse("pulse inf 0").is_err());
        assert!(parse("relax NaN").is_err());
        assert!(parse("f_active 1.5").is_err());
    }

    #[test]
    fn invalid_utf8_position() {
        let e = parse_bytes(b"pulse 90 0\nde\xfflay 1").unwrap_err();
        assert_eq!(e.first().span, Span { line: 2, column: 3 });
    }
}
