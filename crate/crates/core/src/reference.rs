//! Published values used as acceptance data: the coefficients C_n(lambda)
//! for n <= 14, the functions V_n(z) for n <= 4, and the closed-form terms
//! of the expansion of lambda_1(P_N)/lambda_1 through N^-8.
//!
//! Rows are written in a small text notation and parsed on demand:
//! a term is an optional rational followed by factors `zN` (zeta(N)),
//! `z(a,b,c)` (a multiple zeta value), `sv(a,b,c)` (the single-valued
//! combinations below) and `l` (lambda), each with an optional `^k`.
//! Terms are joined by ` + ` and ` - `.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mzvalg::{LambdaPoly, MzvElem};
use crate::ring::{QAlgebra, Ring, Q};
use crate::words::{Word, WordPoly};

/// C_1..C_14 as printed, indexed from n = 1.
const TABLE1: [&str; 14] = [
    "0",
    "0",
    "4 z3",
    "0",
    "-2 z5 l + 12 z5",
    "4 z3^2 l + 8 z3^2",
    "-1/2 z7 l^2 - 12 z7 l + 36 z7",
    "2 z5 z3 l^2 + 8 z5 z3 l + 48 z5 z3",
    "-1/4 z9 l^3 - 104/9 z9 l^2 - 146/3 z9 l + 80/3 z3^3 l + 340/3 z9 + 32/3 z3^3",
    "z7 z3 l^3 + z5^2 l^3 + 39 z7 z3 l^2 - 6 z5^2 l^2 - 24 z7 z3 l - 12 z5^2 l + 144 z7 z3 + 72 z5^2",
    "-5/32 z11 l^4 - 661/60 z11 l^3 + 1/5 sv(3,5,3) l^3 - 1623/20 z11 l^2 + 80 z5 z3^2 l^2 \
     + 54/5 sv(3,5,3) l^2 - 176 z11 l + 176 z5 z3^2 l + 372 z11 + 96 z5 z3^2",
    "5/8 z9 z3 l^4 + 11/8 z7 z5 l^4 + 107/3 z9 z3 l^3 + 47/2 z7 z5 l^3 + 456 z9 z3 l^2 \
     - 207 z7 z5 l^2 - 16 z3^4 l^2 - 488/3 z9 z3 l - 216 z7 z5 l + 272/3 z3^4 l \
     + 1360/3 z9 z3 + 432 z7 z5 + 32/3 z3^4",
    "-7/64 z13 l^5 - 226501/16800 z13 l^4 + z7 z3^2 l^4 - 31/10 z5^2 z3 l^4 \
     - 157/1400 sv(5,3,5) l^4 + 5/56 sv(3,7,3) l^4 - 1283839/8400 z13 l^3 + 34 z7 z3^2 l^3 \
     + 256/5 z5^2 z3 l^3 - 549/350 sv(5,3,5) l^3 + 59/28 sv(3,7,3) l^3 \
     - 1447393/1400 z13 l^2 + 1236 z7 z3^2 l^2 - 1128/5 z5^2 z3 l^2 - 12339/175 sv(5,3,5) l^2 \
     + 747/14 sv(3,7,3) l^2 - 618 z13 l + 336 z7 z3^2 l + 336 z5^2 z3 l + 1260 z13 \
     + 288 z7 z3^2 + 288 z5^2 z3",
    "7/16 z11 z3 l^5 + z9 z5 l^5 + 9/16 z7^2 l^5 + 10169/240 z11 z3 l^4 + 467/8 z9 z5 l^4 \
     + 175/16 z7^2 l^4 - 1/5 sv(3,5,3) z3 l^4 + 20381/30 z11 z3 l^3 + 1300/9 z9 z5 l^3 \
     + 483/4 z7^2 l^3 + 40 z5 z3^3 l^3 + 28/5 sv(3,5,3) z3 l^3 + 32902/5 z11 z3 l^2 \
     - 7306/3 z9 z5 l^2 - 3627/2 z7^2 l^2 + 3664/3 z5 z3^3 l^2 + 1296/5 sv(3,5,3) z3 l^2 \
     - 664 z11 z3 l - 2824/3 z9 z5 l - 540 z7^2 l + 2752/3 z5 z3^3 l + 1488 z11 z3 \
     + 1360 z9 z5 + 648 z7^2 + 128 z5 z3^3",
];

/// The single-valued combinations appearing in the table, in terms of
/// ordinary MZVs; `z(a,b)` follows the nested-sum order 0 < n_1 < n_2.
const SV: [(&[u32], &str); 3] = [
    (&[3, 5, 3], "2 z(3,5,3) - 2 z3 z(3,5) - 10 z3^2 z5"),
    (&[5, 3, 5], "2 z(5,3,5) - 22 z5 z(3,5) - 120 z5^2 z3 - 10 z5 z8"),
    (&[3, 7, 3], "2 z(3,7,3) - 2 z3 z(3,7) - 28 z3^2 z7 - 24 z5 z(3,5) - 144 z5^2 z3 - 12 z5 z8"),
];

/// V_1..V_4 as printed: (composition of Li, coefficient).
const TABLE2: [&[(&[u32], &str)]; 4] = [
    &[(&[1], "2")],
    &[(&[2], "1/2 l - 2"), (&[1, 1], "4")],
    &[(&[3], "1/16 l^2 - l + 2"), (&[1, 2], "3 l - 12"), (&[2, 1], "l - 4"), (&[1, 1, 1], "8")],
    &[
        (&[4], "1/192 l^3 - 1/8 l^2 - 1/2 l - 2"),
        (&[3, 1], "1/8 l^2 - 2 l + 4"),
        (&[2, 2], "1/4 l^2 - 4 l + 12"),
        (&[1, 3], "5/8 l^2 - 8 l + 28"),
        (&[2, 1, 1], "2 l - 8"),
        (&[1, 2, 1], "6 l - 24"),
        (&[1, 1, 2], "14 l - 56"),
        (&[1, 1, 1, 1], "16"),
        (&[1], "2 z3"),
    ],
];

/// The printed V_4 term 2 Z_3 Li_1(z) carries no lambda, but the lambda^0
/// part of every V_n is free of zeta constants (at lambda = 0 the boundary
/// data is log|F_N|, a sum of single polylogarithms with rational
/// coefficients). The recursion produces 2 zeta(3) lambda Li_1(z), which is
/// also what reproduces C_5 onward.
const TABLE2_V4_ZETA_TERM_CORRECTED: &str = "2 z3 l";

/// Closed-form terms of lambda_1(P_N)/lambda_1 through N^-8, as (n, C_n).
const EXPANSION_SMALL: [(usize, &str); 5] = [
    (3, "4 z3"),
    (5, "12 z5 - 2 z5 l"),
    (6, "8 z3^2 + 4 z3^2 l"),
    (7, "36 z7 - 12 z7 l - 1/2 z7 l^2"),
    (8, "48 z3 z5 + 8 z3 z5 l + 2 z3 z5 l^2"),
];

/// Highest n with a published C_n.
pub const TABLE1_MAX: usize = TABLE1.len();

/// Parses an expression in the notation described in the module docs.
pub fn parse_lambda_poly(src: &str) -> Result<LambdaPoly> {
    let mut acc = LambdaPoly::zero();
    for (sign, term) in split_terms(src)? {
        let t = parse_term(term)?;
        acc.add_assign_ref(&if sign { t } else { t.neg_ref() });
    }
    Ok(acc)
}

/// An expression without lambda, as an MZV element.
pub fn parse_mzv(src: &str) -> Result<MzvElem> {
    let p = parse_lambda_poly(src)?;
    if p.degree().unwrap_or(0) > 0 {
        return Err(Error::Parse(format!("unexpected lambda in {src:?}")));
    }
    Ok(p.coeff(0))
}

fn split_terms(src: &str) -> Result<Vec<(bool, &str)>> {
    let s = src.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut out = Vec::new();
    let (mut sign, mut rest) = match s.strip_prefix('-') {
        Some(r) => (false, r.trim_start()),
        None => (true, s),
    };
    loop {
        let next = [" + ", " - "].iter().filter_map(|sep| rest.find(sep).map(|i| (i, *sep))).min();
        match next {
            Some((i, sep)) => {
                out.push((sign, rest[..i].trim()));
                sign = sep == " + ";
                rest = rest[i + 3..].trim_start();
            }
            None => {
                out.push((sign, rest.trim()));
                return Ok(out);
            }
        }
    }
}

fn parse_term(term: &str) -> Result<LambdaPoly> {
    let mut coeff = MzvElem::one();
    let mut deg = 0usize;
    for (i, tok) in term.split_whitespace().enumerate() {
        let (base, exp) = match tok.rsplit_once('^') {
            Some((b, e)) => (b, e.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in {tok:?}")))?),
            None => (tok, 1),
        };
        if i == 0 && base.starts_with(|c: char| c.is_ascii_digit()) {
            let x = Q::from_str(base).map_err(|_| Error::Parse(format!("bad rational {base:?}")))?;
            coeff = coeff.scale(&x);
            continue;
        }
        if base == "l" {
            deg += exp as usize;
            continue;
        }
        let f = factor(base)?;
        for _ in 0..exp {
            coeff = coeff.mul_ref(&f);
        }
    }
    Ok(LambdaPoly::monomial(deg, coeff))
}

fn composition(args: &str) -> Result<Vec<u32>> {
    args.split(',')
        .map(|a| a.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad index {a:?}"))))
        .collect()
}

fn factor(tok: &str) -> Result<MzvElem> {
    if let Some(args) = tok.strip_prefix("sv(").and_then(|r| r.strip_suffix(')')) {
        let m = composition(args)?;
        let (_, def) =
            SV.iter().find(|(k, _)| *k == m.as_slice()).ok_or_else(|| Error::Parse(format!("unknown sv symbol {tok}")))?;
        return parse_mzv(def);
    }
    let m = if let Some(args) = tok.strip_prefix("z(").and_then(|r| r.strip_suffix(')')) {
        composition(args)?
    } else if let Some(n) = tok.strip_prefix('z') {
        vec![n.parse::<u32>().map_err(|_| Error::Parse(format!("bad zeta {tok:?}")))?]
    } else {
        return Err(Error::Parse(format!("unknown factor {tok:?}")));
    };
    let w = Word::from_composition(&m)?;
    if !w.is_convergent() {
        return Err(Error::Parse(format!("{tok} diverges")));
    }
    Ok(MzvElem::zeta(w))
}

/// C_n(lambda) as printed, for 1 <= n <= 14.
pub fn table1(n: usize) -> Result<LambdaPoly> {
    if n == 0 || n > TABLE1_MAX {
        return Err(Error::InvalidArgument(format!("published C_n cover 1 <= n <= {TABLE1_MAX}, got {n}")));
    }
    parse_lambda_poly(TABLE1[n - 1])
}

/// Z^sv for the index (3,5,3), (5,3,5) or (3,7,3).
pub fn single_valued(index: &[u32]) -> Result<MzvElem> {
    let (_, def) = SV
        .iter()
        .find(|(k, _)| *k == index)
        .ok_or_else(|| Error::InvalidArgument(format!("no single-valued symbol for {index:?}")))?;
    parse_mzv(def)
}

fn table2_row(n: usize, corrected: bool) -> Result<WordPoly<LambdaPoly>> {
    if n == 0 {
        return Ok(WordPoly::new());
    }
    let row = TABLE2.get(n - 1).ok_or_else(|| Error::InvalidArgument(format!("published V_n cover n <= 4, got {n}")))?;
    let mut out = WordPoly::new();
    for (comp, c) in row.iter() {
        let src = if corrected && n == 4 && *comp == [1] { TABLE2_V4_ZETA_TERM_CORRECTED } else { c };
        out.add_term(Word::from_composition(comp)?, parse_lambda_poly(src)?);
    }
    Ok(out)
}

/// V_n as printed, for n <= 4, as a word combination (V_n = Li_{v_n}).
pub fn table2_printed(n: usize) -> Result<WordPoly<LambdaPoly>> {
    table2_row(n, false)
}

/// V_n for n <= 4 with the lambda restored on the zeta(3) Li_1 term of V_4.
pub fn table2(n: usize) -> Result<WordPoly<LambdaPoly>> {
    table2_row(n, true)
}

/// (n, C_n) for the terms of the small-order expansion, n in {3, 5, 6, 7, 8}.
pub fn expansion_small() -> Result<Vec<(usize, LambdaPoly)>> {
    EXPANSION_SMALL.iter().map(|&(n, s)| Ok((n, parse_lambda_poly(s)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::q;

    fn z(n: u32) -> MzvElem {
        MzvElem::zeta_comp(&[n])
    }

    #[test]
    fn parses_terms() {
        let p = parse_lambda_poly("-1/2 z7 l^2 - 12 z7 l + 36 z7").unwrap();
        assert_eq!(p.coeff(2), z(7).scale(&q(-1, 2)));
        assert_eq!(p.coeff(1), z(7).scale(&q(-12, 1)));
        assert_eq!(p.coeff(0), z(7).scale(&q(36, 1)));
        assert_eq!(parse_lambda_poly("0").unwrap(), LambdaPoly::zero());
        let sq = parse_mzv("8 z3^2").unwrap();
        assert_eq!(sq, z(3).mul_ref(&z(3)).scale(&q(8, 1)));
        assert!(parse_lambda_poly("3 y2").is_err());
        assert!(parse_lambda_poly("").is_err());
        assert!(parse_mzv("z(2,1)").is_err());
        assert_eq!(parse_mzv("z(1,2)").unwrap(), MzvElem::zeta(Word::parse("011").unwrap()));
    }

    #[test]
    fn table_rows_are_homogeneous() {
        for n in 1..=TABLE1_MAX {
            let c = table1(n).unwrap();
            assert!(c.is_homogeneous_of(n), "C_{n}");
            assert!(c.degree().unwrap_or(0) <= (n.saturating_sub(1)) / 2, "C_{n}");
        }
        assert!(table1(0).is_err() && table1(15).is_err());
        for (idx, w) in [(&[3u32, 5, 3][..], 11), (&[5, 3, 5], 13), (&[3, 7, 3], 13)] {
            assert!(single_valued(idx).unwrap().is_homogeneous_of(w));
        }
    }

    #[test]
    fn table2_shapes() {
        for n in 1..=4 {
            let v = table2(n).unwrap();
            assert!(v.all_words(|w| w.ends_in_x1()));
            for (w, c) in v.iter() {
                assert!(c.is_homogeneous_of(n - w.len()), "V_{n} at {w}");
            }
        }
        assert_ne!(table2(4).unwrap(), table2_printed(4).unwrap());
        assert_eq!(table2(3).unwrap(), table2_printed(3).unwrap());
    }

    #[test]
    fn small_expansion_agrees_with_table() {
        for (n, c) in expansion_small().unwrap() {
            assert_eq!(c, table1(n).unwrap(), "C_{n}");
        }
    }
}
