use super::ast::{HeaderKey, SequenceAst, Span, Statement};
use crate::channel::{self, ChannelProgram, Coupling};
use crate::error::{Error, Result};
use crate::state::SpinSystemParams;

/// Acquisition directive carried alongside a compiled program.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcquisitionSpec {
    pub n_points: usize,
    pub dwell_s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Compiled {
    pub program: ChannelProgram,
    pub acquisition: Option<AcquisitionSpec>,
}

fn compile_error(span: Span, message: impl Into<String>) -> Error {
    Error::Compile {
        line: span.line,
        column: span.column,
        message: message.into(),
    }
}

/// Base parameters with the AST's header values applied.
pub fn merged_params(ast: &SequenceAst, base: &SpinSystemParams) -> SpinSystemParams {
    let mut p = *base;
    for (key, v) in ast.headers() {
        match key {
            HeaderKey::Nu => p.nu_hz = v,
            HeaderKey::DeltaNu => p.delta_nu_hz = v,
            HeaderKey::J => p.j_hz = v,
            HeaderKey::Temp => p.temp_k = v,
            HeaderKey::T1 => p.t1_s = v,
            HeaderKey::T2 => p.t2_s = v,
            HeaderKey::FActive => p.f_active = v,
        }
    }
    p
}

/// Compiles an AST. Header values override `base`; statements map to
/// channels one to one, except `selective` which expands to its three
/// channels and `acquire` which becomes the acquisition spec.
pub fn compile(ast: &SequenceAst, base: &SpinSystemParams) -> Result<Compiled> {
    let params = merged_params(ast, base);
    let needs_delta_nu = ast.statements.iter().find(|s| {
        matches!(
            s.node,
            Statement::GradientPeriod | Statement::Selective(_) | Statement::Delay { .. }
        )
    });
    let delta_nu_ok = params.delta_nu_hz > 0.0 && params.delta_nu_hz.is_finite();
    if let Some(st) = needs_delta_nu {
        if !delta_nu_ok {
            return Err(compile_error(
                st.span,
                "missing delta_nu (required by gradient_period, selective and delay)",
            ));
        }
    }
    // δν is irrelevant to the remaining statements, so a missing value is
    // not an error here
    let checked = if delta_nu_ok {
        params
    } else {
        SpinSystemParams { delta_nu_hz: 1.0, ..params }
    };
    if let Err(e) = checked.validate() {
        let span = ast
            .headers()
            .next()
            .and_then(|(k, _)| ast.header_spanned(k))
            .map_or(Span::default(), |h| h.span);
        return Err(compile_error(span, e.to_string()));
    }

    let mut program = ChannelProgram::empty(params);
    let mut acquisition = None;
    for st in &ast.statements {
        let at = |e: Error| compile_error(st.span, e.to_string());
        match st.node {
            Statement::Pulse { angle_deg, phase_deg } => {
                program.push(channel::hard_pulse(angle_deg, phase_deg))
            }
            Statement::Selective(target) => {
                let sel = channel::selective_pulse(target, &params).map_err(at)?;
                program = program.then(sel);
            }
            Statement::Delay { t_s, coupling } => {
                program.push(channel::free_evolution(t_s, &params, coupling).map_err(at)?)
            }
            Statement::GradientPeriod => program.push(channel::gradient_period(&params, Coupling::Off)),
            Statement::ZqDephase => program.push(channel::zq_dephase()),
            Statement::Relax { t_s } => program.push(channel::relax(t_s, &params).map_err(at)?),
            Statement::Acquire { n_points, dwell_s } => {
                if n_points == 0 {
                    return Err(compile_error(st.span, "acquire needs at least one point"));
                }
                acquisition = Some(AcquisitionSpec { n_points, dwell_s });
            }
        }
    }
    Ok(Compiled {
        program,
        acquisition,
    })
}
