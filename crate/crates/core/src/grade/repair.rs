//! Best-effort recovery of structured values from free-form model output.
//!
//! Models frequently emit almost-JSON: single quotes, unquoted keys and cell
//! tokens, trailing commas, missing closing brackets, or a correct object
//! buried in prose. The reader here is a relaxed recursive-descent parser
//! plus a candidate scan; it is fully deterministic, so grading never
//! depends on an external formatting service.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

/// How a structured value was obtained from raw text.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseOutcome {
    /// Strict JSON, no tolerance needed.
    Structured,
    /// Recovered by relaxed parsing or extraction.
    Repaired,
    Unparseable,
}

/// Attempts to read one structured value out of `text`. Returns the value
/// and whether repair was needed; `None` means nothing recoverable.
///
/// Every recovery stage works on the *structured region* — the first opener
/// through the last closer (or end of text when nothing closes). Prose
/// outside that region never participates, so padding a response with
/// pleasantries cannot change what gets recovered.
pub fn repair_structured(text: &str) -> Option<(Value, ParseOutcome)> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return None;
    }
    if let Ok(v) = serde_json::from_str::<Value>(trimmed) {
        return Some((v, ParseOutcome::Structured));
    }

    let all = trimmed.as_bytes();
    let first = all.iter().position(|&b| b == b'{' || b == b'[')?;
    let end = first
        + all[first..]
            .iter()
            .rposition(|&b| b == b'}' || b == b']')
            .map_or(all.len() - first, |i| i + 1);
    let bytes = &all[first..end];

    // The whole region as one value, tolerating truncation at the end
    // ("{'answer': [[1,2]").
    let mut r = Reader { bytes, at: 0, eof_close: true };
    if let Some(v) = r.value() {
        r.skip_ws();
        if r.done() {
            return Some((v, ParseOutcome::Repaired));
        }
    }

    // Several structures inside the region: collect balanced values left to
    // right. The last object wins (the answer block models are asked for);
    // failing that, the last grid-shaped array (a bare "Solution: [[...]]").
    let mut objects = Vec::new();
    let mut arrays = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'{' || bytes[i] == b'[' {
            let mut r = Reader { bytes, at: i, eof_close: false };
            if let Some(v) = r.value() {
                if v.is_object() {
                    objects.push(v);
                } else {
                    arrays.push(v);
                }
                i = r.at;
                continue;
            }
        }
        i += 1;
    }
    if let Some(v) = objects.pop() {
        return Some((v, ParseOutcome::Repaired));
    }
    let grid_like =
        |v: &Value| v.as_array().is_some_and(|a| !a.is_empty() && a.iter().all(Value::is_array));
    if let Some(v) = arrays.iter().rev().find(|v| grid_like(v)) {
        return Some((v.clone(), ParseOutcome::Repaired));
    }
    if let Some(v) = arrays.pop() {
        return Some((v, ParseOutcome::Repaired));
    }

    // Truncated value somewhere mid-region: try the last opener with
    // end-of-input closing allowed.
    for i in (0..bytes.len()).rev() {
        if bytes[i] == b'{' || bytes[i] == b'[' {
            let mut r = Reader { bytes, at: i, eof_close: true };
            if let Some(v) = r.value() {
                return Some((v, ParseOutcome::Repaired));
            }
        }
    }
    None
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
    /// Allow unterminated strings/containers to close at end of input.
    eof_close: bool,
}

impl Reader<'_> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.at).copied()
    }

    fn done(&self) -> bool {
        self.at >= self.bytes.len()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.at += 1;
        }
    }

    fn value(&mut self) -> Option<Value> {
        self.skip_ws();
        match self.peek()? {
            b'{' => self.object(),
            b'[' => self.array(),
            b'"' | b'\'' => self.string().map(Value::String),
            _ => self.bare(&[b',', b']', b'}', b'\n']),
        }
    }

    fn object(&mut self) -> Option<Value> {
        self.at += 1; // consume '{'
        let mut map = Map::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'}') => {
                    self.at += 1;
                    return Some(Value::Object(map));
                }
                Some(b',') => {
                    self.at += 1;
                    continue;
                }
                None => return self.eof_close.then_some(Value::Object(map)),
                _ => {}
            }
            let key = match self.peek()? {
                b'"' | b'\'' => self.string()?,
                _ => match self.bare(&[b':', b'}', b'\n'])? {
                    Value::String(s) => s,
                    other => scalar_text(&other),
                },
            };
            self.skip_ws();
            match self.peek() {
                Some(b':') | Some(b'=') => self.at += 1,
                Some(b'}') | None => {
                    // Key with no value (truncated); record it as null.
                    map.insert(key, Value::Null);
                    continue;
                }
                _ => return None,
            }
            let val = match self.value() {
                Some(v) => v,
                None if self.eof_close => Value::Null,
                None => return None,
            };
            map.insert(key, val);
        }
    }

    fn array(&mut self) -> Option<Value> {
        self.at += 1; // consume '['
        let mut items = Vec::new();
        let mut after_sep = true;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b']') => {
                    self.at += 1;
                    return Some(Value::Array(items));
                }
                Some(b',') => {
                    if after_sep {
                        // ",," — an elided cell, kept as an empty token so
                        // the sample count survives normalization.
                        items.push(Value::String(String::new()));
                    }
                    self.at += 1;
                    after_sep = true;
                    continue;
                }
                Some(b'}') => {
                    // Mismatched closer ("[1, 2}"): take it as this array's
                    // end rather than a token.
                    self.at += 1;
                    return Some(Value::Array(items));
                }
                None => return self.eof_close.then_some(Value::Array(items)),
                _ => {}
            }
            // The loop above consumed separators, closers and whitespace, so
            // every dispatch below moves `at` forward: no livelock.
            let element = match self.peek()? {
                b'{' | b'[' | b'"' | b'\'' => self.value()?,
                _ => {
                    let v = self.bare(&[b',', b']', b'}', b'\n'])?;
                    if let Value::String(s) = &v {
                        if s.chars().any(char::is_whitespace) {
                            // An unquoted run with inner spaces is trailing
                            // prose, not a cell ("[1, 2 and we are done").
                            // In repair mode the array ends here; in the
                            // balanced scan it disqualifies the candidate.
                            return self.eof_close.then_some(Value::Array(items));
                        }
                    }
                    v
                }
            };
            items.push(element);
            after_sep = false;
        }
    }

    fn string(&mut self) -> Option<String> {
        let delim = self.peek()?;
        self.at += 1;
        let start = self.at;
        let mut out = String::new();
        while let Some(b) = self.peek() {
            if b == delim {
                self.at += 1;
                return Some(out);
            }
            if b == b'\\' && self.at + 1 < self.bytes.len() {
                let esc = self.bytes[self.at + 1];
                out.push(match esc {
                    b'n' => '\n',
                    b't' => '\t',
                    other => other as char,
                });
                self.at += 2;
                continue;
            }
            out.push(b as char);
            self.at += 1;
        }
        if !self.eof_close {
            return None;
        }
        // Unterminated string: give trailing closers back to the structure.
        let mut end = self.bytes.len();
        while end > start
            && (self.bytes[end - 1].is_ascii_whitespace()
                || self.bytes[end - 1] == b'}'
                || self.bytes[end - 1] == b']')
        {
            end -= 1;
        }
        self.at = end;
        Some(String::from_utf8_lossy(&self.bytes[start..end]).into_owned())
    }

    /// Unquoted token: number, true/false/null, or a bare word kept as a
    /// string (cell tokens like `*` or `tr` are usually unquoted).
    fn bare(&mut self, stops: &[u8]) -> Option<Value> {
        let start = self.at;
        while let Some(b) = self.peek() {
            if stops.contains(&b) {
                break;
            }
            self.at += 1;
        }
        let word = String::from_utf8_lossy(&self.bytes[start..self.at]).trim().to_string();
        if word.is_empty() {
            return Some(Value::String(word));
        }
        Some(match word.as_str() {
            "true" => Value::Bool(true),
            "false" => Value::Bool(false),
            "null" | "None" => Value::Null,
            _ => word
                .parse::<i64>()
                .ok()
                .map(|n| Value::Number(n.into()))
                .or_else(|| {
                    word.parse::<f64>().ok().and_then(Number::from_f64).map(Value::Number)
                })
                .unwrap_or(Value::String(word)),
        })
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
