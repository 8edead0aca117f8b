use cyclelift::padic::{LocalContext, VectorC};
use cyclelift::qseries::Character;
use cyclelift::{Error, Result};

/// `"x+yd"`, `"x"`, `"yd"` or `"x+y*d"` as `(x, y)`.
fn parse_coordinate(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::InvalidInput(format!("bad coordinate {s:?}"));
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.replace("*d", "d");
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('d') else {
        return Ok((s.parse().map_err(|_| bad())?, 0));
    };
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(_, c)| c == '+' || c == '-')
        .map(|(i, _)| i)
        .last();
    let (x, y) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let y = match y {
        "" | "+" => "1",
        "-" => "-1",
        y => y.strip_prefix('+').unwrap_or(y),
    };
    Ok((x.parse().map_err(|_| bad())?, y.parse().map_err(|_| bad())?))
}

/// `"x0+y0d,x1+y1d"` with an optional trailing `/p^e`.
pub fn parse_vector(ctx: &LocalContext, s: &str) -> Result<VectorC> {
    let (body, denom) = match s.rsplit_once('/') {
        Some((body, d)) => {
            let e = d
                .trim()
                .strip_prefix("p^")
                .and_then(|e| e.parse::<i32>().ok())
                .ok_or_else(|| Error::InvalidInput(format!("bad denominator {d:?}")))?;
            (body, e)
        }
        None => (s, 0),
    };
    let parts: Vec<&str> = body.split(',').collect();
    let [a0, a1] = parts.as_slice() else {
        return Err(Error::InvalidInput(format!("expected two coordinates in {s:?}")));
    };
    VectorC::from_ints(ctx, parse_coordinate(a0)?, parse_coordinate(a1)?, denom)
}

/// `principal` or `kronecker:D`.
pub fn parse_character(s: &str) -> Result<Character> {
    if s == "principal" {
        return Ok(Character::Principal);
    }
    s.strip_prefix("kronecker:")
        .and_then(|d| d.parse().ok())
        .map(Character::Kronecker)
        .ok_or_else(|| Error::InvalidInput(format!("unknown character {s:?}")))
}
