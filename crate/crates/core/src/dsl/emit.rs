use std::fmt::Write as _;

use crate::element::Word;
use crate::group::{GeneratorBody, GroupDef};

fn word(group: &GroupDef, w: &Word) -> String {
    if w.is_empty() {
        return "e".into();
    }
    w.symbols()
        .iter()
        .map(|s| {
            let name = &group.generators()[s.state as usize].name;
            if s.inverse {
                format!("{name}^-1")
            } else {
                name.clone()
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Writes `group` in `.grp` form. `parse(&emit(g))` defines the same group
/// with the same generator names and order.
pub fn emit(group: &GroupDef) -> String {
    let mut out = String::from("# grpdef v1\n");
    if let Some(name) = group.name() {
        let _ = writeln!(out, "# {name}");
    }
    let _ = writeln!(out, "alphabet = {}", group.degree());
    for g in group.generators() {
        match &g.body {
            GeneratorBody::Recursion { perm, sections } => {
                let secs: Vec<String> = sections.iter().map(|w| word(group, w)).collect();
                let _ = writeln!(out, "gen {} = perm {perm} [{}]", g.name, secs.join(", "));
            }
            GeneratorBody::Portrait(p) => {
                let labels: Vec<String> = p.labels().map(|(v, q)| format!("\"{v}\": {q}")).collect();
                let _ = writeln!(out, "gen {} = portrait {{{}}}", g.name, labels.join(", "));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::dsl::parse;

    #[test]
    fn catalog_round_trips() {
        for name in ["grigorchuk", "gupta-sidki-3", "binary-odometer", "switch-group(3)", "trivial"] {
            let g = catalog::load(name).unwrap().group;
            let text = emit(&g);
            let h = parse(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
            assert_eq!(g.generators(), h.generators(), "{name}");
            let body = |t: &str| t.lines().filter(|l| !l.starts_with('#')).map(String::from).collect::<Vec<_>>();
            assert_eq!(body(&emit(&h)), body(&text));
        }
    }

    #[test]
    fn emitted_text_is_stable() {
        let g = catalog::load("binary-odometer").unwrap().group;
        assert!(emit(&g).ends_with("alphabet = 2\ngen a = perm (0 1) [e, a]\n"));
    }
}
