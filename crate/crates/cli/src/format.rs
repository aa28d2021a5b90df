//! Text formats for named trace sets and witness maps.
//!
//! A trace file opens with a `vars:` line naming the alphabet and then lists
//! one trace per line. Each position is a block of bits, one per variable in
//! declared order; a single `;` splits the repeated part off:
//!
//! ```text
//! vars: a x y
//! trace t1: 000 110 ; 101
//! trace t2: 010 010
//! ```
//!
//! A witness map pairs trace names across two files, one `left -> right`
//! line per pair. Blank lines and `#` comments are ignored in both formats.

use hytrace_core::traces::TraceError;
use hytrace_core::{Trace, TraceSet, Valuation};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum FormatError {
    #[error("{file}:{line}: {message}")]
    Syntax {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{file}: {source}")]
    Traces {
        file: String,
        #[source]
        source: TraceError,
    },
}

/// A trace set as written in a file, with the names the library drops.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NamedTraces {
    pub alphabet: Vec<String>,
    pub entries: Vec<(String, Trace)>,
}

impl NamedTraces {
    pub fn to_set(&self) -> Result<TraceSet, TraceError> {
        TraceSet::new(
            self.alphabet.clone(),
            self.entries.iter().map(|(_, t)| t.clone()).collect(),
        )
    }

    /// Name of the entry holding exactly this trace, if any.
    pub fn name_of(&self, trace: &Trace) -> Option<&str> {
        self.entries
            .iter()
            .find(|(_, t)| t == trace)
            .map(|(name, _)| name.as_str())
    }

    pub fn trace_of(&self, name: &str) -> Option<&Trace> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn content_lines(src: &str) -> impl Iterator<Item = (usize, &str)> {
    src.lines().enumerate().filter_map(|(idx, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((idx + 1, line))
    })
}

fn letter(
    alphabet: &[String],
    token: &str,
    file: &str,
    line: usize,
) -> Result<Valuation, FormatError> {
    let bad = |message: String| FormatError::Syntax {
        file: file.to_owned(),
        line,
        message,
    };
    if token.chars().count() != alphabet.len() {
        return Err(bad(format!(
            "position `{token}` has {} bits, expected one per variable ({})",
            token.chars().count(),
            alphabet.len()
        )));
    }
    let mut valuation = Valuation::new();
    for (var, bit) in alphabet.iter().zip(token.chars()) {
        match bit {
            '0' => valuation.set(var, false),
            '1' => valuation.set(var, true),
            other => return Err(bad(format!("position `{token}` has a stray `{other}`"))),
        }
    }
    Ok(valuation)
}

/// Parse the trace file format; `file` names the source in errors.
pub fn parse_traces(src: &str, file: &str) -> Result<NamedTraces, FormatError> {
    let bad = |line: usize, message: String| FormatError::Syntax {
        file: file.to_owned(),
        line,
        message,
    };
    let mut lines = content_lines(src);
    let (line, header) = lines
        .next()
        .ok_or_else(|| bad(1, "empty file, expected a `vars:` line".to_owned()))?;
    let vars = header
        .strip_prefix("vars:")
        .ok_or_else(|| bad(line, "expected a `vars:` line first".to_owned()))?;
    let alphabet: Vec<String> = vars.split_whitespace().map(str::to_owned).collect();
    if alphabet.is_empty() {
        return Err(bad(line, "`vars:` names no variables".to_owned()));
    }
    for (i, var) in alphabet.iter().enumerate() {
        if !is_ident(var) {
            return Err(bad(line, format!("invalid variable name `{var}`")));
        }
        if alphabet[..i].contains(var) {
            return Err(bad(line, format!("duplicate variable `{var}`")));
        }
    }

    let mut entries: Vec<(String, Trace)> = Vec::new();
    for (line, text) in lines {
        let rest = text
            .strip_prefix("trace")
            .filter(|r| r.starts_with(char::is_whitespace))
            .ok_or_else(|| bad(line, "expected a `trace NAME: ...` line".to_owned()))?;
        let (name, body) = rest
            .split_once(':')
            .ok_or_else(|| bad(line, "missing `:` after the trace name".to_owned()))?;
        let name = name.trim();
        if name.is_empty() || name.split_whitespace().count() != 1 {
            return Err(bad(line, "trace name must be a single word".to_owned()));
        }
        if entries.iter().any(|(n, _)| n == name) {
            return Err(bad(line, format!("duplicate trace name `{name}`")));
        }

        let mut parts = body.split(';');
        let stem_part = parts.next().unwrap_or("");
        let period_part = parts.next();
        if parts.next().is_some() {
            return Err(bad(line, "more than one `;` in a trace".to_owned()));
        }
        let read = |part: &str| -> Result<Vec<Valuation>, FormatError> {
            part.split_whitespace()
                .map(|token| letter(&alphabet, token, file, line))
                .collect()
        };
        let stem = read(stem_part)?;
        let trace = match period_part {
            None => Trace::finite(stem),
            Some(period_part) => {
                let period = read(period_part)?;
                if period.is_empty() {
                    return Err(bad(line, "a `;` must be followed by a period".to_owned()));
                }
                Trace::lasso(stem, period).map_err(|source| FormatError::Traces {
                    file: file.to_owned(),
                    source,
                })?
            }
        };
        entries.push((name.to_owned(), trace));
    }
    Ok(NamedTraces { alphabet, entries })
}

fn render_letter(alphabet: &[String], letter: &Valuation) -> String {
    alphabet
        .iter()
        .map(|var| match letter.get(var) {
            Some(true) => '1',
            _ => '0',
        })
        .collect()
}

fn render_letters(alphabet: &[String], letters: &[Valuation]) -> String {
    letters
        .iter()
        .map(|l| render_letter(alphabet, l))
        .collect::<Vec<_>>()
        .join(" ")
}

/// One trace in the file format, without the `trace NAME:` prefix.
pub fn render_trace(alphabet: &[String], trace: &Trace) -> String {
    let stem = render_letters(alphabet, trace.stem_letters());
    match trace.period_letters() {
        None => stem,
        Some(period) => {
            let period = render_letters(alphabet, period);
            if stem.is_empty() {
                format!("; {period}")
            } else {
                format!("{stem} ; {period}")
            }
        }
    }
}

/// The whole trace file format, ready to parse back.
pub fn render_traces(named: &NamedTraces) -> String {
    let mut out = format!("vars: {}\n", named.alphabet.join(" "));
    for (name, trace) in &named.entries {
        let body = render_trace(&named.alphabet, trace);
        if body.is_empty() {
            out.push_str(&format!("trace {name}:\n"));
        } else {
            out.push_str(&format!("trace {name}: {body}\n"));
        }
    }
    out
}

/// Parse a witness map of `left -> right` name pairs.
pub fn parse_witness_map(src: &str, file: &str) -> Result<Vec<(String, String)>, FormatError> {
    let bad = |line: usize, message: String| FormatError::Syntax {
        file: file.to_owned(),
        line,
        message,
    };
    let mut pairs = Vec::new();
    for (line, text) in content_lines(src) {
        let (left, right) = text
            .split_once("->")
            .ok_or_else(|| bad(line, "expected `NAME -> NAME`".to_owned()))?;
        let (left, right) = (left.trim(), right.trim());
        for name in [left, right] {
            if name.is_empty() || name.split_whitespace().count() != 1 {
                return Err(bad(line, "expected `NAME -> NAME`".to_owned()));
            }
        }
        pairs.push((left.to_owned(), right.to_owned()));
    }
    Ok(pairs)
}
