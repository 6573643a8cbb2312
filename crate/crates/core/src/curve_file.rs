//! Curve files.
//!
//! ```text
//! # comments run to the end of the line
//! [conic-quartic]
//! 1 0 0 1 0 1                              # g: X^2 XY XZ Y^2 YZ Z^2
//! 1 0 -1 -2 -2 -1 0 -1 -1 1 -2 -1 -1 0 1   # f: X^4 X^3Y ... Z^4
//!
//! [model]
//! -1                                       # D
//! 3 2 -2 -4 ...                            # (c0, c1) for h_0 .. h_8
//! 0 1 2                                    # translates
//! ```
//!
//! Monomials are ordered lexicographically with `X > Y > Z`. Integers may
//! be spread over lines freely within a section. At least one section must
//! be present.

use std::path::Path;

use rug::Integer;

use crate::driver::CurveSource;
use crate::model_builder::{ConicQuartic, HyperModel};
use crate::quad_ring::{QuadDisc, QuadInt, QuadIntPoly};
use crate::{Error, Result};

const CONIC_LEN: usize = 6 + 15;
const MODEL_LEN: usize = 1 + 18 + 3;

struct Section {
    name: String,
    line: usize,
    tokens: Vec<(usize, String)>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn sections(text: &str) -> Result<Vec<Section>> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| parse_err(line, "unterminated section header"))?;
            if out.iter().any(|s| s.name == name) {
                return Err(parse_err(line, format!("duplicate section [{name}]")));
            }
            out.push(Section { name: name.trim().to_string(), line, tokens: Vec::new() });
            continue;
        }
        let sec = out.last_mut().ok_or_else(|| parse_err(line, "data before any section"))?;
        sec.tokens.extend(body.split_whitespace().map(|t| (line, t.to_string())));
    }
    Ok(out)
}

fn integers(sec: &Section, want: usize) -> Result<Vec<Integer>> {
    let v: Vec<Integer> = sec
        .tokens
        .iter()
        .map(|(line, t)| Integer::parse(t).map(Integer::from).map_err(|_| parse_err(*line, format!("not an integer: {t}"))))
        .collect::<Result<_>>()?;
    if v.len() != want {
        return Err(parse_err(sec.line, format!("[{}] needs {want} integers, found {}", sec.name, v.len())));
    }
    Ok(v)
}

fn small(x: &Integer, line: usize) -> Result<i64> {
    x.to_i64().ok_or_else(|| parse_err(line, format!("{x} does not fit in 64 bits")))
}

pub fn parse_curve(text: &str) -> Result<CurveSource> {
    let mut src = CurveSource { conic: None, model: None };
    let secs = sections(text)?;
    if secs.is_empty() {
        return Err(parse_err(1, "no [conic-quartic] or [model] section"));
    }
    for sec in &secs {
        match sec.name.as_str() {
            "conic-quartic" => {
                let v = integers(sec, CONIC_LEN)?;
                let v: Vec<i64> = v.iter().map(|x| small(x, sec.line)).collect::<Result<_>>()?;
                let g: [i64; 6] = v[..6].try_into().expect("length checked");
                let f: [i64; 15] = v[6..].try_into().expect("length checked");
                src.conic = Some(ConicQuartic::new(g, f));
            }
            "model" => {
                let v = integers(sec, MODEL_LEN)?;
                let disc = QuadDisc::new(small(&v[0], sec.line)?)?;
                let h = QuadIntPoly::new(v[1..19].chunks(2).map(|c| QuadInt::new(c[0].clone(), c[1].clone())).collect());
                let t: Vec<i64> = v[19..].iter().map(|x| small(x, sec.line)).collect::<Result<_>>()?;
                src.model = Some(HyperModel::new(disc, h, [t[0], t[1], t[2]])?);
            }
            other => return Err(parse_err(sec.line, format!("unknown section [{other}]"))),
        }
    }
    Ok(src)
}

pub fn read_curve(path: &Path) -> Result<CurveSource> {
    parse_curve(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const C2: &str = "\
# both sections
[conic-quartic]
1 0 0 1 0 1
1 0 -1 -2 -2 -1 0 -1 -1 1 -2 -1 -1 0 1

[model]
-1
3 2  -2 -4  -4 4  -2 -4  2 0  2 -4  -4 -4  2 -4  3 -2
0 1 2
";

    #[test]
    fn parses_both_sections() {
        let src = parse_curve(C2).unwrap();
        let cq = src.conic.unwrap();
        assert_eq!(cq.g[3], 1);
        assert_eq!(cq.f[14], 1);
        let m = src.model.unwrap();
        assert_eq!(m.disc.d(), -1);
        assert_eq!(m.h.coeff(0), QuadInt::new(3, 2));
        assert_eq!(m.h.coeff(8), QuadInt::new(3, -2));
        assert_eq!(m.translates, [0, 1, 2]);
    }

    #[test]
    fn rejects_malformed() {
        let cases = [
            ("", 1),
            ("1 2 3\n", 1),
            ("[conic-quartic]\n1 2 3\n", 1),
            ("[model]\n-1\n1 x\n", 3),
            ("[model\n", 1),
            ("[other]\n", 1),
            ("[model]\n[model]\n", 2),
        ];
        for (text, line) in cases {
            match parse_curve(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn model_validation_propagates() {
        let text = "[model]\n4\n1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1 0\n0 1 2\n";
        assert!(matches!(parse_curve(text), Err(Error::InvalidDiscriminant(4))));
    }
}
