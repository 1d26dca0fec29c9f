//! Products of named group generators, e.g. `m1*m2*m1^-1*m2^-1` or `t2(0.5)^3*u1`.
//!
//! Names are 1-based: `u_a` is the plane wave `e^{ix^a}`, `t_a(s)` the
//! translation `e^{is p_a}` (`s = 1` when omitted), `m_1…m_2r` the magnetic
//! generators and `z_a` the Casimirs. All act in the adapted basis.

use crate::CliError;
use magtorus_core::weyl::{casimirs, magnetic_generators, multiply};
use magtorus_core::{GroupContext, WeylElement};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub name: char,
    pub index: usize,
    pub argument: Option<f64>,
    pub power: i64,
}

pub fn parse(expression: &str) -> Result<Vec<Factor>, CliError> {
    let compact: String = expression.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Ok(Vec::new());
    }
    compact.split('*').map(parse_factor).collect()
}

fn parse_factor(token: &str) -> Result<Factor, CliError> {
    let bad = |why: &str| CliError::Invalid(format!("bad factor '{token}': {why}"));
    let mut chars = token.chars();
    let name = chars.next().ok_or_else(|| bad("empty factor"))?;
    if !matches!(name, 'u' | 't' | 'm' | 'z') {
        return Err(CliError::Invalid(format!("unknown generator '{token}'")));
    }
    let rest = chars.as_str();
    let digits_end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
    let index: usize = rest[..digits_end].parse().map_err(|_| bad("missing generator index"))?;
    if index == 0 {
        return Err(bad("indices start at 1"));
    }
    let mut rest = &rest[digits_end..];
    let mut argument = None;
    if let Some(inner) = rest.strip_prefix('(') {
        let close = inner.find(')').ok_or_else(|| bad("unclosed parenthesis"))?;
        if name != 't' {
            return Err(bad("only translations take an argument"));
        }
        argument = Some(parse_real(&inner[..close]).ok_or_else(|| bad("argument is not a number"))?);
        rest = &inner[close + 1..];
    }
    let power = match rest.strip_prefix('^') {
        Some(p) => p.parse().map_err(|_| bad("exponent is not an integer"))?,
        None if rest.is_empty() => 1,
        None => return Err(bad("unexpected trailing text")),
    };
    Ok(Factor { name, index, argument, power })
}

/// A decimal literal, optionally followed by `pi`.
fn parse_real(text: &str) -> Option<f64> {
    match text.strip_suffix("pi") {
        Some("") => Some(std::f64::consts::PI),
        Some("-") => Some(-std::f64::consts::PI),
        Some(coef) => coef.parse::<f64>().ok().map(|c| c * std::f64::consts::PI),
        None => text.parse().ok(),
    }
    .filter(|v| v.is_finite())
}

pub fn generator(ctx: &Arc<GroupContext>, f: &Factor) -> Result<WeylElement, CliError> {
    let n = ctx.n;
    let out_of_range = |limit: usize| {
        CliError::Invalid(format!("unknown generator '{}{}' (valid indices 1..={limit})", f.name, f.index))
    };
    let a = f.index - 1;
    let base = match f.name {
        'u' if a < n => ctx.plane_wave(a),
        't' if a < n => ctx.translation(a, f.argument.unwrap_or(1.0)),
        'z' if a < n => casimirs(ctx).swap_remove(a),
        'm' if a < 2 * ctx.half_rank() => magnetic_generators(ctx).swap_remove(a),
        'm' => return Err(out_of_range(2 * ctx.half_rank())),
        _ => return Err(out_of_range(n)),
    };
    Ok(base.pow(f.power))
}

/// Left-to-right product; the empty product is the identity.
pub fn evaluate(ctx: &Arc<GroupContext>, factors: &[Factor]) -> Result<WeylElement, CliError> {
    factors.iter().try_fold(ctx.identity(), |acc, f| Ok(multiply(&acc, &generator(ctx, f)?)?))
}
