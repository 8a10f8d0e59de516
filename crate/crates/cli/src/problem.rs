//! Text format for interval linear systems.
//!
//! ```text
//! # comment
//! n 2
//! matrix
//! [2,4]  [-2,1]
//! [-1,2] [2,4]
//! rhs
//! [-2,2] [-2,2]
//! ```
//!
//! Each matrix row sits on its own line. Right-hand side entries may be
//! broken across lines freely. Interval tokens accept spaces after the comma.

use std::fmt::Write as _;

use kaucher::{IntervalMatrix, IntervalVector, KInterval};

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub n: usize,
    pub a: IntervalMatrix,
    pub b: IntervalVector,
    pub dualize_matrix: bool,
    pub dualize_rhs: bool,
}

impl ProblemFile {
    /// Matrix and right-hand side with the dualization flags applied.
    pub fn system(&self) -> (IntervalMatrix, IntervalVector) {
        let a = if self.dualize_matrix {
            self.a.dual()
        } else {
            self.a.clone()
        };
        let b = if self.dualize_rhs {
            self.b.dual()
        } else {
            self.b.clone()
        };
        (a, b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Clone, Debug)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Splits into whitespace-separated tokens, keeping `[lo, hi]` together and
/// dropping `#` comments.
fn tokenize(text: &str) -> Result<Vec<Token<'_>>, ParseError> {
    let mut tokens = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let bytes = line.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i].is_ascii_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            if bytes[i] == b'[' {
                match line[i..].find(']') {
                    Some(off) => i += off + 1,
                    None => return Err(syntax(ln + 1, start + 1, "unterminated interval")),
                }
            } else {
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
            }
            tokens.push(Token {
                text: &line[start..i],
                line: ln + 1,
                column: start + 1,
            });
        }
    }
    Ok(tokens)
}

fn parse_interval(tok: &Token<'_>) -> Result<KInterval, ParseError> {
    tok.text
        .parse::<KInterval>()
        .map_err(|e| syntax(tok.line, tok.column, format!("invalid interval `{}`: {}", tok.text, e.reason)))
}

const SECTIONS: [&str; 3] = ["n", "matrix", "rhs"];

struct Cursor<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    end_line: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, expected: &str) -> Result<Token<'a>, ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(syntax(
                self.end_line,
                1,
                format!("unexpected end of input, expected {expected}"),
            )),
        }
    }

    fn keyword(&mut self, name: &str, seen: &[&str]) -> Result<Token<'a>, ParseError> {
        let t = self.next(&format!("section `{name}`"))?;
        if t.text == name {
            return Ok(t);
        }
        if seen.contains(&t.text) {
            return Err(syntax(t.line, t.column, format!("duplicate section `{}`", t.text)));
        }
        if SECTIONS.contains(&t.text) {
            return Err(syntax(
                t.line,
                t.column,
                format!("section `{}` out of order, expected `{name}`", t.text),
            ));
        }
        Err(syntax(
            t.line,
            t.column,
            format!("expected section `{name}`, found `{}`", t.text),
        ))
    }
}

/// Parses a problem file. Dualization flags are left unset.
pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let tokens = tokenize(text)?;
    let mut cur = Cursor {
        tokens,
        pos: 0,
        end_line: text.lines().count().max(1),
    };

    cur.keyword("n", &[])?;
    let t = cur.next("the dimension")?;
    let n: usize = t
        .text
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| syntax(t.line, t.column, format!("invalid dimension `{}`", t.text)))?;

    let kw = cur.keyword("matrix", &["n"])?;
    let mut data = Vec::with_capacity(n * n);
    let mut prev_line = kw.line;
    for row in 0..n {
        let first = cur.next(&format!("matrix row {}", row + 1))?;
        if first.line == prev_line || SECTIONS.contains(&first.text) {
            return Err(syntax(
                first.line,
                first.column,
                format!("expected matrix row {} on its own line", row + 1),
            ));
        }
        data.push(parse_interval(&first)?);
        for _ in 1..n {
            let t = cur.next(&format!("an entry of matrix row {}", row + 1))?;
            if t.line != first.line {
                return Err(ParseError::Dimension(format!(
                    "matrix row {} on line {} has fewer than {n} entries",
                    row + 1,
                    first.line
                )));
            }
            data.push(parse_interval(&t)?);
        }
        if let Some(t) = cur.tokens.get(cur.pos) {
            if t.line == first.line {
                return Err(ParseError::Dimension(format!(
                    "matrix row {} on line {} has more than {n} entries",
                    row + 1,
                    first.line
                )));
            }
        }
        prev_line = first.line;
    }

    cur.keyword("rhs", &["n", "matrix"])?;
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        let t = cur.next(&format!("right-hand side entry {}", i + 1))?;
        if SECTIONS.contains(&t.text) {
            return Err(ParseError::Dimension(format!(
                "right-hand side has {i} entries, expected {n}"
            )));
        }
        b.push(parse_interval(&t)?);
    }
    if let Some(t) = cur.tokens.get(cur.pos) {
        if SECTIONS.contains(&t.text) {
            return Err(syntax(t.line, t.column, format!("duplicate section `{}`", t.text)));
        }
        return Err(ParseError::Dimension(format!(
            "right-hand side has more than {n} entries (line {}, column {})",
            t.line, t.column
        )));
    }

    Ok(ProblemFile {
        n,
        a: IntervalMatrix::from_vec(n, n, data).expect("n*n entries collected"),
        b: IntervalVector::new(b),
        dualize_matrix: false,
        dualize_rhs: false,
    })
}

/// Renders a problem so that [`parse_problem`] recovers it bit for bit.
pub fn format_problem(p: &ProblemFile) -> String {
    let mut s = format!("n {}\nmatrix\n", p.n);
    for i in 0..p.n {
        let row: Vec<String> = p.a.row(i).iter().map(|a| a.to_string()).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s.push_str("rhs\n");
    for a in p.b.iter() {
        let _ = writeln!(s, "{a}");
    }
    s
}

/// Parses whitespace-separated interval tokens (comments allowed).
pub fn parse_interval_vector(text: &str) -> Result<IntervalVector, ParseError> {
    tokenize(text)?
        .iter()
        .map(parse_interval)
        .collect::<Result<Vec<_>, _>>()
        .map(IntervalVector::new)
}

/// Fixed 17-significant-digit rendering of one endpoint.
pub fn format_endpoint(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..16).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.16e}")
    }
}

pub fn format_interval(a: KInterval) -> String {
    format!("[{},{}]", format_endpoint(a.lo()), format_endpoint(a.hi()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> KInterval {
        KInterval::new(lo, hi)
    }

    const BARTH_NUDING: &str = "# Barth-Nuding\nn 2\nmatrix\n[2,4] [-2,1]\n[-1,2] [2, 4]\nrhs\n[-2,2]\n[-2,2]\n";

    #[test]
    fn minimal_problem() {
        let p = parse_problem("n 1\nmatrix\n[1,2]\nrhs\n[3,4]\n").unwrap();
        assert_eq!(p.n, 1);
        assert_eq!(p.a[(0, 0)], iv(1.0, 2.0));
        assert_eq!(p.b[0], iv(3.0, 4.0));
        assert!(!p.dualize_matrix && !p.dualize_rhs);
    }

    #[test]
    fn barth_nuding_problem() {
        let p = parse_problem(BARTH_NUDING).unwrap();
        assert_eq!(p.n, 2);
        assert_eq!(p.a[(1, 1)], iv(2.0, 4.0));
        assert_eq!(p.a[(0, 1)], iv(-2.0, 1.0));
        assert_eq!(p.b, IntervalVector::new(vec![iv(-2.0, 2.0); 2]));
    }

    #[test]
    fn malformed_interval_has_location() {
        let err = parse_problem("n 1\nmatrix\n  [1 2]\nrhs\n[3,4]\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax {
                line: 3,
                column: 3,
                message: "invalid interval `[1 2]`: missing comma between endpoints".into()
            }
        );
    }

    #[test]
    fn structural_errors() {
        let dup = parse_problem("n 1\nn 1\nmatrix\n[1,2]\nrhs\n[3,4]\n").unwrap_err();
        assert!(dup.to_string().contains("duplicate section `n`"), "{dup}");
        let dup = parse_problem("n 1\nmatrix\n[1,2]\nrhs\n[3,4]\nrhs\n[1,1]").unwrap_err();
        assert!(dup.to_string().contains("duplicate section `rhs`"), "{dup}");
        let order = parse_problem("matrix\n[1,2]\nn 1\nrhs\n[3,4]\n").unwrap_err();
        assert!(order.to_string().contains("out of order"), "{order}");
        let short = parse_problem("n 2\nmatrix\n[1,2]\n[1,2] [3,4]\nrhs\n[3,4] [1,1]").unwrap_err();
        assert!(matches!(short, ParseError::Dimension(_)), "{short}");
        let long = parse_problem("n 1\nmatrix\n[1,2] [3,4]\nrhs\n[3,4]").unwrap_err();
        assert!(matches!(long, ParseError::Dimension(_)), "{long}");
        let rhs = parse_problem("n 2\nmatrix\n[1,2] [0,0]\n[0,0] [1,2]\nrhs\n[3,4]").unwrap_err();
        assert!(rhs.to_string().contains("end of input"), "{rhs}");
        let same_line = parse_problem("n 1\nmatrix [1,2]\nrhs\n[3,4]").unwrap_err();
        assert!(same_line.to_string().contains("own line"), "{same_line}");
        let unterminated = parse_problem("n 1\nmatrix\n[1,2\nrhs\n[3,4]").unwrap_err();
        assert!(unterminated.to_string().contains("unterminated"), "{unterminated}");
        assert!(parse_problem("n 0\nmatrix\nrhs\n").is_err());
        assert!(parse_problem("n 1\nmatrix\n[1,inf]\nrhs\n[3,4]").is_err());
    }

    #[test]
    fn comments_and_scientific_notation() {
        let p = parse_problem("n 1 # size\nmatrix # A\n[1e0, 2.5E-1] # row\nrhs\n[-3e2,4]").unwrap();
        assert_eq!(p.a[(0, 0)], iv(1.0, 0.25));
        assert_eq!(p.b[0], iv(-300.0, 4.0));
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let p = parse_problem(BARTH_NUDING).unwrap();
        assert_eq!(parse_problem(&format_problem(&p)).unwrap(), p);
        let odd = ProblemFile {
            n: 1,
            a: IntervalMatrix::from_vec(1, 1, vec![iv(0.1, 1.0 / 3.0)]).unwrap(),
            b: IntervalVector::new(vec![iv(-1e-300, 2.5e17)]),
            dualize_matrix: false,
            dualize_rhs: false,
        };
        let back = parse_problem(&format_problem(&odd)).unwrap();
        assert_eq!(back.a[(0, 0)].hi().to_bits(), (1.0f64 / 3.0).to_bits());
        assert_eq!(back, odd);
    }

    #[test]
    fn dualization_flags() {
        let mut p = parse_problem(BARTH_NUDING).unwrap();
        p.dualize_matrix = true;
        let (a, b) = p.system();
        assert_eq!(a[(0, 0)], iv(4.0, 2.0));
        assert_eq!(b[0], iv(-2.0, 2.0));
        p.dualize_rhs = true;
        assert_eq!(p.system().1[0], iv(2.0, -2.0));
    }

    #[test]
    fn endpoint_formatting() {
        assert_eq!(format_endpoint(-1.0 / 3.0), "-0.33333333333333331");
        assert_eq!(format_endpoint(4.0), "4.0000000000000000");
        assert_eq!(format_endpoint(0.0), "0");
        assert_eq!(format_endpoint(1e20), "1.0000000000000000e20");
        for x in [1.0 / 3.0, 12345.678, -7.1e-7, 9.999_999_999_999_998e15, 0.1] {
            let back: f64 = format_endpoint(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x}");
        }
        let v = parse_interval_vector(&format!("{}\n{}", format_interval(iv(1.0, -2.0)), "[3,4] # c")).unwrap();
        assert_eq!(v, IntervalVector::new(vec![iv(1.0, -2.0), iv(3.0, 4.0)]));
    }
}
