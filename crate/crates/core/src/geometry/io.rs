//! Plain-text geometry format.
//!
//! ```text
//! two-patch-geometry v1
//! patch L
//! degrees 1 1
//! knots-u 0 0 1 1
//! knots-v 0 0 1 1
//! net 2 2
//! 0.4 0
//! 0 0
//! 0.6 1
//! 0 1
//! patch R
//! ...
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Control points are
//! listed with the first index running fastest.

use super::{space_from_knots, GeometryError, Patch, Side, TwoPatchDomain, Vec2};
use crate::spline::TensorSplineSpace;
use std::fmt::Write as _;
use std::path::Path;

const MAGIC: &str = "two-patch-geometry v1";

/// Reads and validates a geometry file.
pub fn load_geometry(path: impl AsRef<Path>) -> Result<TwoPatchDomain, GeometryError> {
    let text = std::fs::read_to_string(path)?;
    parse_geometry(&text)
}

/// Parses and validates geometry text. Patches are reparametrized if needed
/// so that the shared edge is `u = 0` of both.
pub fn parse_geometry(text: &str) -> Result<TwoPatchDomain, GeometryError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut next = |what: &str| {
        lines.next().ok_or_else(|| GeometryError::Parse {
            line: 0,
            msg: format!("unexpected end of input, expected {what}"),
        })
    };
    let (ln, header) = next("header")?;
    if header != MAGIC {
        return Err(perr(ln, format!("expected `{MAGIC}`")));
    }
    let mut patches: Vec<(Side, Patch)> = Vec::with_capacity(2);
    for _ in 0..2 {
        let (ln, head) = next("`patch L` or `patch R`")?;
        let side = match head.split_whitespace().collect::<Vec<_>>()[..] {
            ["patch", "L"] => Side::Left,
            ["patch", "R"] => Side::Right,
            _ => return Err(perr(ln, "expected `patch L` or `patch R`")),
        };
        if patches.iter().any(|(s, _)| *s == side) {
            return Err(perr(ln, format!("patch {} given twice", side.tag())));
        }
        let (ln, deg) = next("degrees")?;
        let degs = keyed_numbers::<usize>(ln, deg, "degrees")?;
        let [p1, p2] = degs[..] else {
            return Err(perr(ln, "`degrees` takes two integers"));
        };
        let (ln_u, ku) = next("knots-u")?;
        let ku = keyed_numbers::<f64>(ln_u, ku, "knots-u")?;
        let (ln_v, kv) = next("knots-v")?;
        let kv = keyed_numbers::<f64>(ln_v, kv, "knots-v")?;
        let su = space_from_knots(p1, &ku).map_err(|e| perr(ln_u, e.to_string()))?;
        let sv = space_from_knots(p2, &kv).map_err(|e| perr(ln_v, e.to_string()))?;
        let (ln, net_line) = next("net")?;
        let dims = keyed_numbers::<usize>(ln, net_line, "net")?;
        let [n1, n2] = dims[..] else {
            return Err(perr(ln, "`net` takes two integers"));
        };
        if n1 != su.dim() || n2 != sv.dim() {
            return Err(perr(
                ln,
                format!("net {n1} x {n2} does not match the knot vectors ({} x {})", su.dim(), sv.dim()),
            ));
        }
        let count = n1.checked_mul(n2).ok_or_else(|| perr(ln, "net too large"))?;
        let mut net: Vec<Vec2> = Vec::with_capacity(count);
        for _ in 0..count {
            let (ln, pt) = next("control point")?;
            let xy = numbers::<f64>(ln, pt.split_whitespace())?;
            let [x, y] = xy[..] else {
                return Err(perr(ln, "control point needs two coordinates"));
            };
            if !x.is_finite() || !y.is_finite() {
                return Err(perr(ln, "non-finite coordinate"));
            }
            net.push([x, y]);
        }
        patches.push((side, Patch::new(TensorSplineSpace::new(su, sv), net, side)?));
    }
    if let Some((ln, extra)) = lines.next() {
        return Err(perr(ln, format!("unexpected trailing content `{extra}`")));
    }
    patches.sort_by_key(|(s, _)| s.index());
    let mut it = patches.into_iter().map(|(_, p)| p);
    let (l, r) = (it.next().unwrap(), it.next().unwrap());
    TwoPatchDomain::from_patches_any_orientation(l, r)
}

fn perr(line: usize, msg: impl Into<String>) -> GeometryError {
    GeometryError::Parse { line, msg: msg.into() }
}

fn keyed_numbers<T: std::str::FromStr>(ln: usize, line: &str, key: &str) -> Result<Vec<T>, GeometryError> {
    let mut it = line.split_whitespace();
    if it.next() != Some(key) {
        return Err(perr(ln, format!("expected `{key}`")));
    }
    numbers(ln, it)
}

fn numbers<'a, T: std::str::FromStr>(
    ln: usize,
    it: impl Iterator<Item = &'a str>,
) -> Result<Vec<T>, GeometryError> {
    it.map(|tok| tok.parse::<T>().map_err(|_| perr(ln, format!("cannot parse `{tok}`"))))
        .collect()
}

/// Serializes a domain; numbers are written with 17 significant digits so
/// that reading the file back reproduces the nets bit for bit.
pub fn save_geometry(domain: &TwoPatchDomain) -> String {
    let mut s = String::new();
    writeln!(s, "{MAGIC}").unwrap();
    for side in Side::BOTH {
        let p = domain.patch(side);
        writeln!(s, "patch {}", side.tag()).unwrap();
        writeln!(s, "degrees {} {}", p.space.u.degree(), p.space.v.degree()).unwrap();
        for (key, sp) in [("knots-u", &p.space.u), ("knots-v", &p.space.v)] {
            let ks: Vec<String> = sp.knots().expanded().iter().map(|k| fmt_num(*k)).collect();
            writeln!(s, "{key} {}", ks.join(" ")).unwrap();
        }
        writeln!(s, "net {} {}", p.space.u.dim(), p.space.v.dim()).unwrap();
        for c in &p.net {
            writeln!(s, "{} {}", fmt_num(c[0]), fmt_num(c[1])).unwrap();
        }
    }
    s
}

pub fn write_geometry(domain: &TwoPatchDomain, path: impl AsRef<Path>) -> Result<(), GeometryError> {
    std::fs::write(path, save_geometry(domain))?;
    Ok(())
}

fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::catalog;

    #[test]
    fn round_trip_is_exact() {
        for name in crate::geometry::CATALOG_NAMES {
            let d = catalog(name).unwrap();
            let e = parse_geometry(&save_geometry(&d)).unwrap();
            assert_eq!(d, e, "{name}");
        }
    }

    #[test]
    fn reports_line_numbers() {
        let text = "two-patch-geometry v1\npatch L\ndegrees 1 x\n";
        match parse_geometry(text) {
            Err(GeometryError::Parse { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_geometry("nope"), Err(GeometryError::Parse { line: 1, .. })));
    }
}
