use std::fmt::Write;

use super::ast::{SequenceAst, Statement};
use crate::channel::{ChannelKind, ChannelProgram, Coupling};
use crate::error::{Error, Result};
use super::ast::HeaderKey;

/// Canonical text: headers in fixed order, then one statement per line.
/// Numbers use the shortest decimal that round-trips.
pub fn format(ast: &SequenceAst) -> String {
    let mut out = String::new();
    for (key, value) in ast.headers() {
        let _ = writeln!(out, "{} {}", key.keyword(), value);
    }
    for st in &ast.statements {
        let _ = writeln!(out, "{}", statement_text(&st.node));
    }
    out
}

pub fn statement_text(st: &Statement) -> String {
    match *st {
        Statement::Pulse { angle_deg, phase_deg } => format!("pulse {angle_deg} {phase_deg}"),
        Statement::Selective(spin) => format!("selective {}", spin.as_str()),
        Statement::Delay { t_s, coupling: Coupling::Weak } => format!("delay {t_s}"),
        Statement::Delay { t_s, coupling } => format!("delay {t_s} {}", coupling.as_str()),
        Statement::GradientPeriod => "gradient_period".into(),
        Statement::ZqDephase => "zqdephase".into(),
        Statement::Relax { t_s } => format!("relax {t_s}"),
        Statement::Acquire { n_points, dwell_s } => format!("acquire {n_points} {dwell_s}"),
    }
}

/// Rebuilds an AST from a compiled program. Every parameter becomes a
/// header so that recompiling reproduces the program exactly.
pub fn program_to_ast(program: &ChannelProgram) -> Result<SequenceAst> {
    let p = &program.params;
    let mut ast = SequenceAst::new();
    let values = [
        (HeaderKey::Nu, p.nu_hz),
        (HeaderKey::DeltaNu, p.delta_nu_hz),
        (HeaderKey::J, p.j_hz),
        (HeaderKey::Temp, p.temp_k),
        (HeaderKey::T1, p.t1_s),
        (HeaderKey::T2, p.t2_s),
        (HeaderKey::FActive, p.f_active),
    ];
    for (key, v) in values {
        ast.set_header(key, super::ast::Spanned::bare(v));
    }
    for ch in &program.channels {
        let st = match ch.kind {
            ChannelKind::Pulse {
                angle_deg,
                phase_deg,
                ..
            } => Statement::Pulse { angle_deg, phase_deg },
            ChannelKind::Delay { t_s, coupling, .. } => Statement::Delay { t_s, coupling },
            ChannelKind::GradientPeriod {
                t_s,
                coupling: Coupling::Off,
                ..
            } if t_s == 1.0 / p.delta_nu_hz => Statement::GradientPeriod,
            ChannelKind::ZqDephase => Statement::ZqDephase,
            ChannelKind::Relax { t_s, .. } => Statement::Relax { t_s },
            _ => return Err(Error::Unrepresentable(ch.label.clone())),
        };
        ast.push(st);
    }
    Ok(ast)
}

pub fn format_program(program: &ChannelProgram) -> Result<String> {
    Ok(format(&program_to_ast(program)?))
}
