//! Map files.
//!
//! ```text
//! file     := line*
//! line     := blank | comment | header | section | rule
//! comment  := '#' any*
//! header   := 'rank' ':' digits            (optional, before any rule)
//! section  := 'inverse' ':'                (optional; later rules define the inverse)
//! rule     := name ':' word
//! name     := one lowercase ASCII letter
//! word     := '1' | (letter | whitespace)+
//! ```
//!
//! Generators are the rule names of the forward section in order of
//! appearance; a letter in a word is a generator name, uppercase for its
//! inverse. Images must be freely reduced. The inverse section, when present,
//! must give a rule for every generator.

use crate::error::{Error, Result};
use crate::morphisms::Endomorphism;
use crate::words::GroupContext;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapFile {
    pub forward: Endomorphism,
    pub inverse: Option<Endomorphism>,
}

struct Rule<'a> {
    line: usize,
    name: char,
    image: &'a str,
}

pub fn parse_map_file(text: &str) -> Result<MapFile> {
    let mut rank: Option<usize> = None;
    let mut forward: Vec<Rule> = Vec::new();
    let mut inverse: Option<Vec<Rule>> = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once(':').ok_or_else(|| Error::Parse(format!("line {line_no}: expected `name: word`, found {line:?}")))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "rank" => {
                if rank.is_some() || !forward.is_empty() || inverse.is_some() {
                    return Err(Error::Parse(format!("line {line_no}: rank header must come first and only once")));
                }
                rank = Some(value.parse().map_err(|_| Error::Parse(format!("line {line_no}: bad rank {value:?}")))?);
            }
            "inverse" => {
                if !value.is_empty() || inverse.is_some() {
                    return Err(Error::Parse(format!("line {line_no}: malformed inverse section header")));
                }
                inverse = Some(Vec::new());
            }
            _ => {
                let mut chars = key.chars();
                let name = match (chars.next(), chars.next()) {
                    (Some(c), None) if c.is_ascii_lowercase() => c,
                    _ => return Err(Error::Parse(format!("line {line_no}: bad generator name {key:?}"))),
                };
                let rules = inverse.as_mut().unwrap_or(&mut forward);
                if rules.iter().any(|r| r.name == name) {
                    return Err(Error::Parse(format!("line {line_no}: generator {name} defined twice")));
                }
                rules.push(Rule { line: line_no, name, image: value });
            }
        }
    }

    if forward.is_empty() {
        return Err(Error::Parse("no generator rules".into()));
    }
    if let Some(r) = rank {
        if r != forward.len() {
            return Err(Error::Parse(format!("rank inconsistency: header says {r}, found {} rules", forward.len())));
        }
    }
    let names: String = forward.iter().map(|r| r.name).collect();
    let ctx = GroupContext::with_names(&names)?;
    let forward_map = build(&ctx, forward.iter().map(|r| r.image))?;
    let inverse_map = match inverse {
        None => None,
        Some(rules) => {
            let mut ordered = Vec::with_capacity(ctx.rank());
            for &name in ctx.names() {
                let rule = rules
                    .iter()
                    .find(|r| r.name == name)
                    .ok_or_else(|| Error::Parse(format!("rank inconsistency: inverse section has no rule for {name}")))?;
                ordered.push(rule);
            }
            if let Some(extra) = rules.iter().find(|r| !ctx.names().contains(&r.name)) {
                return Err(Error::Parse(format!("line {}: unknown generator {} in inverse section", extra.line, extra.name)));
            }
            Some(build(&ctx, ordered.iter().map(|r| r.image))?)
        }
    };
    Ok(MapFile { forward: forward_map, inverse: inverse_map })
}

fn build<'a>(ctx: &GroupContext, images: impl Iterator<Item = &'a str>) -> Result<Endomorphism> {
    let words = images.map(|s| ctx.parse_word(s)).collect::<Result<Vec<_>>>()?;
    Endomorphism::new(ctx.clone(), words)
}

/// Canonical text: rank header, one rule per generator, then the inverse.
pub fn format_map_file(map: &MapFile) -> String {
    let ctx = map.forward.ctx();
    let mut out = format!("rank: {}\n", ctx.rank());
    let rules = |phi: &Endomorphism, out: &mut String| {
        for (i, &name) in ctx.names().iter().enumerate() {
            out.push_str(&format!("{name}: {}\n", ctx.format_word(phi.image(i))));
        }
    };
    rules(&map.forward, &mut out);
    if let Some(inv) = &map.inverse {
        out.push_str("inverse:\n");
        rules(inv, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphisms::random_automorphism;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn parses_alpha() {
        let m = parse_map_file("x: xy\ny: y").unwrap();
        let ctx = m.forward.ctx();
        assert_eq!(ctx.names(), ['x', 'y']);
        assert_eq!(m.forward, Endomorphism::parse(ctx, &["xy", "y"]).unwrap());
        assert!(m.inverse.is_none());
    }

    #[test]
    fn parses_collapse_map() {
        let m = parse_map_file("x: xy\ny: 1\n").unwrap();
        assert!(m.forward.image(1).is_identity());
    }

    #[test]
    fn rejects_unreduced_image() {
        let err = parse_map_file("x: xX").unwrap_err();
        assert!(matches!(err, Error::Unreduced { .. }), "{err}");
    }

    #[test]
    fn rejects_unknown_letters_and_bad_rank() {
        assert!(parse_map_file("x: xq\ny: y").unwrap_err().to_string().contains("unknown letter"));
        assert!(parse_map_file("rank: 3\nx: xy\ny: y").unwrap_err().to_string().contains("rank inconsistency"));
        assert!(parse_map_file("x: xy\ny: y\ninverse:\nx: xY").unwrap_err().to_string().contains("rank inconsistency"));
        assert!(parse_map_file("x: xy\nx: y").is_err());
        assert!(parse_map_file("").is_err());
        assert!(parse_map_file("xy: x").is_err());
    }

    #[test]
    fn comments_header_and_inverse() {
        let text = "# alpha\nrank: 2\nx: x y   # spaced\ny: y\n\ninverse:\ny: y\nx: xY\n";
        let m = parse_map_file(text).unwrap();
        let inv = m.inverse.as_ref().unwrap();
        assert_eq!(m.forward.ctx().format_word(inv.image(0)), "xY");
        assert_eq!(format_map_file(&m), "rank: 2\nx: xy\ny: y\ninverse:\nx: xY\ny: y\n");
    }

    proptest! {
        #[test]
        fn canonical_form_round_trips(seed in any::<u64>(), rank in 1usize..4) {
            let ctx = GroupContext::with_names(&"pqrs"[..rank]).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = random_automorphism(&ctx, 5, &mut rng);
            let map = MapFile { forward: a.forward().clone(), inverse: Some(a.inverse().clone()) };
            let text = format_map_file(&map);
            let parsed = parse_map_file(&text).unwrap();
            prop_assert_eq!(&parsed, &map);
            prop_assert_eq!(format_map_file(&parsed), text);
        }
    }
}
