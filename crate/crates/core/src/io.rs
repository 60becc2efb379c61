//! Text formats for truth tables, CNF (DIMACS) and depth-3 formulas.
//!
//! Truth table: a line `n=<k>` followed by either the `2^k` bits in index
//! order or the same bit string as big-endian hex (prefixed with `0x`, or
//! recognized by containing a non-binary hex digit). Blank lines and lines
//! starting with `#` are ignored.
//!
//! Depth-3: a header `p d3f <n> <k>`, then `k` DIMACS blocks separated by
//! lines holding a single `%`. Each block may repeat its own `p cnf` header.

use crate::boolfn::TruthTable;
use crate::error::{Error, Result};
use crate::formula::{Clause, CnfFormula, DepthThreeFormula, Literal};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn write_truth_table(t: &TruthTable) -> String {
    format!("n={}\n{}\n", t.n(), t.to_bit_string())
}

pub fn parse_truth_table(text: &str) -> Result<TruthTable> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "missing `n=<k>` header"))?;
    let n: usize = header
        .strip_prefix("n=")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| parse_err(ln, format!("expected `n=<k>`, found `{header}`")))?;
    let mut body = String::new();
    let mut body_line = ln + 1;
    for (i, l) in lines {
        if body.is_empty() {
            body_line = i;
        }
        body.push_str(l);
    }
    let len = 1usize
        .checked_shl(n as u32)
        .filter(|_| n <= crate::boolfn::MAX_VARS)
        .ok_or_else(|| parse_err(ln, format!("n = {n} exceeds the supported maximum")))?;
    let bits = decode_bits(&body, len).map_err(|m| parse_err(body_line, m))?;
    TruthTable::from_fn(n, |x| bits[x as usize])
}

fn decode_bits(body: &str, len: usize) -> std::result::Result<Vec<bool>, String> {
    let hex = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X"));
    let is_binary = hex.is_none() && body.len() == len && body.bytes().all(|b| b == b'0' || b == b'1');
    if is_binary {
        return Ok(body.bytes().map(|b| b == b'1').collect());
    }
    let digits = hex.unwrap_or(body);
    let mut bits = Vec::with_capacity(digits.len() * 4);
    for ch in digits.chars() {
        let v = ch.to_digit(16).ok_or_else(|| format!("invalid digit `{ch}`"))?;
        bits.extend((0..4).rev().map(|i| v >> i & 1 == 1));
    }
    // Left padding must be zero; the table is the low `len` bits.
    if bits.len() < len {
        let mut padded = vec![false; len - bits.len()];
        padded.extend(bits);
        return Ok(padded);
    }
    let extra = bits.len() - len;
    if bits[..extra].iter().any(|&b| b) {
        return Err(format!("hex value has more than {len} significant bits"));
    }
    Ok(bits[extra..].to_vec())
}

pub fn write_dimacs(phi: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", phi.n(), phi.size());
    for c in phi.clauses() {
        for l in c.literals() {
            out.push_str(&l.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

fn parse_header(ln: usize, line: &str, kind: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != "p" || parts[1] != kind {
        return Err(parse_err(ln, format!("expected `p {kind} <n> <count>`, found `{line}`")));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| parse_err(ln, format!("bad number `{s}`")));
    Ok((num(parts[2])?, num(parts[3])?))
}

/// Parses clause lines (and an optional header) into a formula on `n` vars.
fn parse_clause_block(lines: &[(usize, &str)], n: Option<usize>) -> Result<CnfFormula> {
    let mut n = n;
    let mut declared = None;
    let mut clauses = Vec::new();
    let mut pending: Vec<Literal> = Vec::new();
    let mut last_line = 1;
    for &(ln, line) in lines {
        last_line = ln;
        if line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            let (hn, m) = parse_header(ln, line, "cnf")?;
            if let Some(outer) = n {
                if outer != hn {
                    return Err(parse_err(ln, format!("block declares n = {hn}, expected {outer}")));
                }
            }
            n = Some(hn);
            declared = Some((ln, m));
            continue;
        }
        let nv = n.ok_or_else(|| parse_err(ln, "clause before `p cnf` header"))?;
        for tok in line.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| parse_err(ln, format!("bad literal `{tok}`")))?;
            if v == 0 {
                let c = Clause::new(pending.drain(..)).map_err(|e| parse_err(ln, e.to_string()))?;
                clauses.push(c);
                continue;
            }
            let var = v.unsigned_abs() as usize - 1;
            if var >= nv {
                return Err(parse_err(ln, format!("literal {v} exceeds n = {nv}")));
            }
            pending.push(if v > 0 { Literal::pos(var) } else { Literal::neg(var) });
        }
    }
    if !pending.is_empty() {
        return Err(parse_err(last_line, "clause not terminated by 0"));
    }
    let n = n.ok_or_else(|| parse_err(last_line, "missing `p cnf` header"))?;
    if let Some((ln, m)) = declared {
        if m != clauses.len() {
            return Err(parse_err(ln, format!("header declares {m} clauses, found {}", clauses.len())));
        }
    }
    CnfFormula::new(n, clauses)
}

pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let lines: Vec<(usize, &str)> = content_lines(text).collect();
    parse_clause_block(&lines, None)
}

pub fn write_d3f(phi: &DepthThreeFormula) -> String {
    let mut out = format!("p d3f {} {}\n", phi.n(), phi.disjuncts().len());
    for (i, d) in phi.disjuncts().iter().enumerate() {
        if i > 0 {
            out.push_str("%\n");
        }
        out.push_str(&write_dimacs(d));
    }
    out
}

pub fn parse_d3f(text: &str) -> Result<DepthThreeFormula> {
    let lines: Vec<(usize, &str)> = content_lines(text).filter(|(_, l)| !l.starts_with('c')).collect();
    let Some(&(ln, header)) = lines.first() else {
        return Err(parse_err(1, "missing `p d3f` header"));
    };
    let (n, k) = parse_header(ln, header, "d3f")?;
    let mut blocks: Vec<Vec<(usize, &str)>> = vec![Vec::new()];
    for &(ln, l) in &lines[1..] {
        if l == "%" {
            blocks.push(Vec::new());
        } else {
            blocks.last_mut().expect("nonempty").push((ln, l));
        }
    }
    if k == 0 && blocks.len() == 1 && blocks[0].is_empty() {
        blocks.clear();
    }
    if blocks.len() != k {
        return Err(parse_err(ln, format!("header declares {k} disjuncts, found {}", blocks.len())));
    }
    let disjuncts = blocks
        .iter()
        .map(|b| parse_clause_block(b, Some(n)))
        .collect::<Result<Vec<_>>>()?;
    DepthThreeFormula::new(n, disjuncts)
}
