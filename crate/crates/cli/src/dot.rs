use std::collections::BTreeMap;

/// Graphviz quiver of right almost split maps: one node per point, one edge
/// from each source summand to the target, labelled with its multiplicity.
pub fn quiver(maps: &[(String, Vec<String>)]) -> String {
    let mut nodes: Vec<&String> = Vec::new();
    for (t, src) in maps {
        for n in std::iter::once(t).chain(src) {
            if !nodes.contains(&n) {
                nodes.push(n);
            }
        }
    }
    let mut out = String::from("digraph ar {\n    rankdir=LR;\n");
    for n in nodes {
        out += &format!("    \"{n}\";\n");
    }
    for (t, src) in maps {
        let mut mult: BTreeMap<&String, usize> = BTreeMap::new();
        for s in src {
            *mult.entry(s).or_default() += 1;
        }
        for (s, k) in mult {
            out += &format!("    \"{s}\" -> \"{t}\" [label=\"{k}\"];\n");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicities_become_labels() {
        let q = quiver(&[("B".into(), vec!["A".into(), "A".into(), "C".into()])]);
        assert!(q.contains("\"A\" -> \"B\" [label=\"2\"]"));
        assert!(q.contains("\"C\" -> \"B\" [label=\"1\"]"));
        assert!(q.ends_with("}\n"));
    }
}
