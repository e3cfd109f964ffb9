//! Rotation-number literals.
//!
//! Accepted forms: a decimal (`0.618`), an exact rational (`5/8`), a
//! quadratic irrational like `(sqrt5-1)/2` or `(1+sqrt2)/4`, or the name
//! `golden`. Exact forms keep the continued-fraction machinery exact; float
//! literals degrade after roughly 35 quotients.

use num_bigint::BigUint;
use siegel::arithmetic::RotationNumber;

pub fn parse_alpha(input: &str) -> Result<RotationNumber, String> {
    let s = input.trim();
    if s.eq_ignore_ascii_case("golden") {
        return Ok(RotationNumber::golden());
    }
    if s.contains("sqrt") {
        return parse_quadratic(s);
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad(input))?;
        let q: i64 = q.trim().parse().map_err(|_| bad(input))?;
        return RotationNumber::rational(p, q).map_err(|e| format!("{input}: {e}"));
    }
    let v: f64 = s.parse().map_err(|_| bad(input))?;
    RotationNumber::from_f64(v).map_err(|e| format!("{input}: {e}"))
}

/// `(sqrtD±c)/r`, `(c±sqrtD)/r`, with the parens and `/r` optional.
fn parse_quadratic(s: &str) -> Result<RotationNumber, String> {
    let (head, r) = match s.rsplit_once('/') {
        Some((h, denom)) => {
            let r: i64 = denom.trim().parse().map_err(|_| bad(s))?;
            (h.trim(), r)
        }
        None => (s, 1),
    };
    let inner = head.trim().trim_start_matches('(').trim_end_matches(')').replace(' ', "");
    let (p, q, d) = if let Some(rest) = inner.strip_prefix("sqrt") {
        // sqrtD, sqrtD+c, sqrtD-c
        let split = rest.find(['+', '-']);
        match split {
            None => (0i64, 1i64, rest.parse::<i64>().map_err(|_| bad(s))?),
            Some(idx) => {
                let d: i64 = rest[..idx].parse().map_err(|_| bad(s))?;
                let c: i64 = rest[idx..].parse().map_err(|_| bad(s))?;
                (c, 1, d)
            }
        }
    } else {
        // c+sqrtD, c-sqrtD
        let idx = inner.find("sqrt").ok_or_else(|| bad(s))?;
        let c_part = &inner[..idx];
        let (c, sign) = match c_part.strip_suffix('+') {
            Some(c) => (c, 1i64),
            None => (c_part.strip_suffix('-').ok_or_else(|| bad(s))?, -1),
        };
        let c: i64 = c.parse().map_err(|_| bad(s))?;
        let d: i64 = inner[idx + 4..].parse().map_err(|_| bad(s))?;
        (c, sign, d)
    };
    RotationNumber::quadratic(p, q, r, d).map_err(|e| format!("{s}: {e}"))
}

pub fn parse_quotients(input: &str) -> Result<RotationNumber, String> {
    let quotients: Result<Vec<BigUint>, String> = input
        .split(',')
        .map(|tok| tok.trim().parse::<BigUint>().map_err(|_| bad(input)))
        .collect();
    RotationNumber::from_quotients(quotients?).map_err(|e| format!("{input}: {e}"))
}

pub fn parse_scales(input: &str) -> Result<Vec<f64>, String> {
    input
        .split(',')
        .map(|tok| tok.trim().parse::<f64>().map_err(|_| bad(input)))
        .collect()
}

fn bad(input: &str) -> String {
    format!("cannot parse rotation-number literal `{input}`")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_golden_forms() {
        let by_name = parse_alpha("golden").unwrap();
        let by_literal = parse_alpha("(sqrt5-1)/2").unwrap();
        assert_eq!(by_name.value(), by_literal.value());
    }

    #[test]
    fn parses_rational_and_decimal() {
        assert_eq!(parse_alpha("5/8").unwrap().value(), 0.625);
        assert_eq!(parse_alpha("0.625").unwrap().value(), 0.625);
    }

    #[test]
    fn parses_leading_constant_form() {
        let x = parse_alpha("(-1+sqrt2)/1").unwrap();
        assert!((x.value() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let y = parse_alpha("sqrt2-1").unwrap();
        assert_eq!(x.value(), y.value());
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_alpha("eleven").is_err());
        assert!(parse_alpha("5/0").is_err());
        assert!(parse_alpha("(sqrt-3)/2").is_err());
    }

    #[test]
    fn quotient_lists() {
        let x = parse_quotients("1,2,1,2").unwrap();
        assert!(x.value() > 0.0 && x.value() < 1.0);
        assert!(parse_quotients("1,0,3").is_err());
    }
}
