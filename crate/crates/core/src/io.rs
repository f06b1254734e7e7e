//! Coefficient-grid CSV format and command-line scalar parsing.
//!
//! The CSV format is a header line `k,l,re,im` followed by one row per stored
//! coefficient. Rows may appear in any order; absent rows are zero.

use std::collections::HashSet;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::series::{TruncatedSeries, C64, ZERO};
use crate::space::WeightVector;

/// Largest accepted index in either direction.
pub const MAX_CSV_DEGREE: usize = 1 << 16;
/// Largest accepted grid size `(K+1)(L+1)`.
pub const MAX_CSV_CELLS: usize = 1 << 24;

const HEADER: [&str; 4] = ["k", "l", "re", "im"];

fn parse_err(line: u64, msg: impl Into<String>) -> Error {
    Error::Parse {
        line: line as usize,
        msg: msg.into(),
    }
}

fn parse_finite(field: &str, what: &str, line: u64) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{field}`")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(line, format!("non-finite {what} `{field}`")))
    }
}

fn parse_index(field: &str, what: &str, line: u64) -> Result<usize> {
    let v: usize = field
        .parse()
        .map_err(|_| parse_err(line, format!("invalid index {what} `{field}`")))?;
    if v > MAX_CSV_DEGREE {
        return Err(parse_err(line, format!("index {what}={v} exceeds {MAX_CSV_DEGREE}")));
    }
    Ok(v)
}

/// Reads a coefficient grid; the degree is the largest index present.
pub fn read_series_csv(reader: impl Read) -> Result<TruncatedSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?;
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(parse_err(1, "expected header `k,l,re,im`"));
    }
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    let (mut kmax, mut lmax) = (0usize, 0usize);
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 4 {
            return Err(parse_err(line, format!("expected 4 fields, got {}", rec.len())));
        }
        let k = parse_index(&rec[0], "k", line)?;
        let l = parse_index(&rec[1], "l", line)?;
        let re = parse_finite(&rec[2], "real part", line)?;
        let im = parse_finite(&rec[3], "imaginary part", line)?;
        if !seen.insert((k, l)) {
            return Err(parse_err(line, format!("duplicate coefficient ({k},{l})")));
        }
        if (k.max(kmax) + 1) * (l.max(lmax) + 1) > MAX_CSV_CELLS {
            return Err(parse_err(line, "grid too large"));
        }
        kmax = kmax.max(k);
        lmax = lmax.max(l);
        entries.push((k, l, C64::new(re, im)));
    }
    let mut coeffs = vec![ZERO; (kmax + 1) * (lmax + 1)];
    for (k, l, v) in entries {
        coeffs[k * (lmax + 1) + l] = v;
    }
    TruncatedSeries::from_coeffs(kmax, lmax, coeffs)
}

/// Parses CSV text; convenience wrapper over [`read_series_csv`].
pub fn parse_series_csv(text: &str) -> Result<TruncatedSeries> {
    read_series_csv(text.as_bytes())
}

/// Writes every stored coefficient in row-major order.
pub fn write_series_csv(f: &TruncatedSeries, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(HEADER).map_err(io)?;
    for (k, l, a) in f.iter() {
        w.write_record([k.to_string(), l.to_string(), a.re.to_string(), a.im.to_string()])
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn series_to_csv_string(f: &TruncatedSeries) -> String {
    let mut buf = Vec::new();
    write_series_csv(f, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

fn arg_err(msg: String) -> Error {
    Error::Config(msg)
}

fn fields(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).collect()
}

fn finite_field(s: &str, ctx: &str) -> Result<f64> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(arg_err(format!("invalid number `{s}` in {ctx}"))),
    }
}

/// `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<C64> {
    match fields(s).as_slice() {
        [re] => Ok(C64::new(finite_field(re, "complex value")?, 0.0)),
        [re, im] => Ok(C64::new(
            finite_field(re, "complex value")?,
            finite_field(im, "complex value")?,
        )),
        _ => Err(arg_err(format!("expected `re[,im]`, got `{s}`"))),
    }
}

/// `a1,a2`.
pub fn parse_weight(s: &str) -> Result<WeightVector> {
    match fields(s).as_slice() {
        [a1, a2] => Ok(WeightVector::new(
            finite_field(a1, "weight")?,
            finite_field(a2, "weight")?,
        )),
        _ => Err(arg_err(format!("expected weight `a1,a2`, got `{s}`"))),
    }
}

/// `K,L` or a single `K` for both axes.
pub fn parse_degree(s: &str) -> Result<(usize, usize)> {
    let one = |t: &str| {
        t.parse::<usize>()
            .ok()
            .filter(|&v| v <= MAX_CSV_DEGREE)
            .ok_or_else(|| arg_err(format!("invalid degree `{t}`")))
    };
    match fields(s).as_slice() {
        [k] => {
            let k = one(k)?;
            Ok((k, k))
        }
        [k, l] => Ok((one(k)?, one(l)?)),
        _ => Err(arg_err(format!("expected degree `K,L`, got `{s}`"))),
    }
}

/// A bidisc point: `z,w` (two reals) or `zr,zi,wr,wi`.
pub fn parse_point(s: &str) -> Result<(C64, C64)> {
    let f = fields(s);
    let n = |i: usize| finite_field(f[i], "point");
    match f.len() {
        2 => Ok((C64::new(n(0)?, 0.0), C64::new(n(1)?, 0.0))),
        4 => Ok((C64::new(n(0)?, n(1)?), C64::new(n(2)?, n(3)?))),
        _ => Err(arg_err(format!("expected point `z,w` or `zr,zi,wr,wi`, got `{s}`"))),
    }
}

/// `key=value`, both sides nonempty after trimming.
pub fn parse_param(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| arg_err(format!("expected `key=value`, got `{s}`")))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() {
        return Err(arg_err(format!("expected `key=value`, got `{s}`")));
    }
    Ok((k.to_string(), v.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::NamedFamily;
    use proptest::prelude::*;

    #[test]
    fn reads_sparse_rows_as_zero() {
        let f = parse_series_csv("k,l,re,im\n1,2,0.5,-1\n0,0,1,0\n").unwrap();
        assert_eq!(f.degrees(), (1, 2));
        assert_eq!(f.coeff(1, 2), C64::new(0.5, -1.0));
        assert_eq!(f.coeff(0, 0), C64::new(1.0, 0.0));
        assert_eq!(f.coeff(0, 1), ZERO);
    }

    #[test]
    fn header_only_is_the_zero_constant() {
        let f = parse_series_csv("k,l,re,im\n").unwrap();
        assert_eq!(f, TruncatedSeries::zeros(0, 0));
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "",
            "a,b,c,d\n0,0,1,0\n",
            "k,l,re,im\n0,0,1\n",
            "k,l,re,im\n0,0,1,0,5\n",
            "k,l,re,im\n-1,0,1,0\n",
            "k,l,re,im\n0,0,nan,0\n",
            "k,l,re,im\n0,0,inf,0\n",
            "k,l,re,im\n0,0,x,0\n",
            "k,l,re,im\n0,0,1,0\n0,0,2,0\n",
            "k,l,re,im\n99999999,0,1,0\n",
            "k,l,re,im\n60000,60000,1,0\n",
        ] {
            assert!(parse_series_csv(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn parse_error_reports_line() {
        match parse_series_csv("k,l,re,im\n0,0,1,0\n1,0,zz,0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scalar_parsers() {
        assert_eq!(parse_complex("0.5").unwrap(), C64::new(0.5, 0.0));
        assert_eq!(parse_complex(" 0.5 , -2 ").unwrap(), C64::new(0.5, -2.0));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("NaN").is_err());
        assert_eq!(parse_weight("1,-2.5").unwrap(), WeightVector::new(1.0, -2.5));
        assert!(parse_weight("1").is_err());
        assert_eq!(parse_degree("64").unwrap(), (64, 64));
        assert_eq!(parse_degree("3,4").unwrap(), (3, 4));
        assert!(parse_degree("-1,2").is_err());
        assert_eq!(parse_point("0.5,0").unwrap(), (C64::new(0.5, 0.0), ZERO));
        assert_eq!(
            parse_point("0.1,0.2,0.3,0.4").unwrap(),
            (C64::new(0.1, 0.2), C64::new(0.3, 0.4))
        );
        assert!(parse_point("0.1,0.2,0.3").is_err());
        assert_eq!(parse_param("deg=16").unwrap(), ("deg".into(), "16".into()));
        assert_eq!(parse_param("alpha=1,2").unwrap(), ("alpha".into(), "1,2".into()));
        assert!(parse_param("=3").is_err());
        assert!(parse_param("deg").is_err());
    }

    #[test]
    fn named_family_round_trips() {
        let f = NamedFamily::Rational.generate(9, 7);
        assert_eq!(parse_series_csv(&series_to_csv_string(&f)).unwrap(), f);
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(
            deg in (0usize..6, 0usize..6),
            v in prop::collection::vec((any::<f64>(), any::<f64>()), 1..50),
        ) {
            let mut it = v.iter().cycle();
            let f = TruncatedSeries::from_fn(deg.0, deg.1, |_, _| {
                let &(a, b) = it.next().unwrap();
                let fix = |x: f64| if x.is_finite() { x } else { 0.25 };
                C64::new(fix(a), fix(b))
            });
            prop_assert_eq!(parse_series_csv(&series_to_csv_string(&f)).unwrap(), f);
        }

        #[test]
        fn parsers_never_panic(s in ".{0,40}") {
            let _ = parse_series_csv(&s);
            let _ = parse_complex(&s);
            let _ = parse_weight(&s);
            let _ = parse_degree(&s);
            let _ = parse_point(&s);
            let _ = parse_param(&s);
        }
    }
}
