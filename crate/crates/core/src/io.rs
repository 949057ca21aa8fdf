//! Event files: a `time` or `time,mark` header followed by one event per
//! line, rows ascending by time, `\n` line endings.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pattern::{Event, ObservationWindow, PointPattern};

/// Shortest decimal that round-trips to the same `f64`, always with a
/// decimal point and never in exponent notation.
pub fn format_number(x: f64) -> String {
    let s = format!("{x}");
    if x.is_finite() && !s.contains('.') {
        format!("{s}.0")
    } else {
        s
    }
}

pub fn write_events(pattern: &PointPattern) -> String {
    let mut out = String::new();
    if pattern.is_marked() {
        out.push_str("time,mark\n");
        for e in pattern.events() {
            let mark = e.mark.expect("marked pattern");
            let _ = writeln!(out, "{},{}", format_number(e.time), format_number(mark));
        }
    } else {
        out.push_str("time\n");
        for e in pattern.events() {
            let _ = writeln!(out, "{}", format_number(e.time));
        }
    }
    out
}

fn parse_number(field: &str, line_no: usize) -> Result<f64> {
    let value: f64 = field
        .trim()
        .parse()
        .map_err(|_| Error::NonFiniteValue(format!("line {line_no}: cannot parse {field:?}")))?;
    if !value.is_finite() {
        return Err(Error::NonFiniteValue(format!("line {line_no}: {field}")));
    }
    Ok(value)
}

/// Parses and validates an event file against the window `[0, t_end)`.
pub fn parse_events(text: &str, t_end: f64) -> Result<PointPattern> {
    let window = ObservationWindow::new(t_end)?;
    let mut lines = text.lines().enumerate();
    let marked = match lines.next().map(|(_, l)| l.trim()) {
        Some("time") => false,
        Some("time,mark") => true,
        Some(other) => {
            return Err(Error::InvalidConfig(format!(
                "event file header must be `time` or `time,mark`, got {other:?}"
            )))
        }
        None => return Err(Error::InvalidConfig("event file is empty".into())),
    };
    let mut events = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let event = match (marked, fields.as_slice()) {
            (false, [t]) => Event::new(parse_number(t, line_no)?),
            (true, [t, m]) => Event::marked(parse_number(t, line_no)?, parse_number(m, line_no)?),
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "line {line_no}: expected {} field(s)",
                    if marked { 2 } else { 1 }
                )))
            }
        };
        events.push(event);
    }
    PointPattern::new(events, window)?.with_marking(marked)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(-1.0), "-1.0");
        assert_eq!(format_number(0.1), "0.1");
        assert_eq!(format_number(1e-7), "0.0000001");
        assert_eq!(format_number(-0.6137056388801094), "-0.6137056388801094");
    }

    #[test]
    fn round_trip() {
        let p = PointPattern::from_raw(&[(0.125, Some(2.5)), (1.0 / 3.0, Some(0.0))], 2.0).unwrap();
        let text = write_events(&p);
        assert!(text.starts_with("time,mark\n"));
        assert_eq!(parse_events(&text, 2.0).unwrap(), p);

        let empty = parse_events("time,mark\n", 1.0).unwrap();
        assert!(empty.is_marked() && empty.is_empty());
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(
            parse_events("time\n1.0\n0.5\n", 2.0),
            Err(Error::Unsorted { .. })
        ));
        assert!(parse_events("t\n1.0\n", 2.0).is_err());
        assert!(parse_events("time\n1.0,2.0\n", 2.0).is_err());
        assert!(parse_events("time\nabc\n", 2.0).is_err());
        assert!(matches!(
            parse_events("time\n3.0\n", 2.0),
            Err(Error::OutOfWindow { .. })
        ));
    }
}
