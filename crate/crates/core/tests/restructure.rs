use std::collections::HashSet;

use trojan_forge::aig::to_aig;
use trojan_forge::equiv::{check_equivalence, EquivConfig};
use trojan_forge::generate::{random_netlist, RandomSpec};
use trojan_forge::netlist::write_netlist;
use trojan_forge::restructure::{apply_recipe, builtin_recipes, fraig, refactor, resub, rewrite};

fn corpus() -> Vec<trojan_forge::netlist::Netlist> {
    (0..50u64)
        .map(|s| {
            let pis = 4 + (s as usize % 9);
            let gates = 20 + (s as usize * 37) % 181;
            random_netlist(&RandomSpec::mixed(pis, gates), s)
        })
        .collect()
}

#[test]
fn passes_never_grow_the_graph() {
    for (k, n) in corpus().iter().enumerate() {
        let g = to_aig(n).unwrap().strash();
        let s = k as u64;
        assert!(rewrite(&g, s).and_count() <= g.and_count());
        assert!(refactor(&g, 10, s).unwrap().and_count() <= g.and_count());
        assert!(resub(&g, 16, s).and_count() <= g.and_count());
        assert!(fraig(&g, 8, s, 1000).and_count() <= g.and_count());
    }
}

#[test]
fn recipes_are_deterministic() {
    let n = &corpus()[7];
    for r in builtin_recipes() {
        let a = apply_recipe(n, &r, 11, &EquivConfig::default()).unwrap();
        let b = apply_recipe(n, &r, 11, &EquivConfig::default()).unwrap();
        assert_eq!(write_netlist(&a.netlist), write_netlist(&b.netlist));
    }
}

#[test]
fn recipes_give_distinct_structures() {
    let n = random_netlist(&RandomSpec::mixed(10, 120), 4242);
    let mut seen = HashSet::new();
    for r in builtin_recipes() {
        let out = apply_recipe(&n, &r, 1, &EquivConfig::default())
            .unwrap()
            .netlist;
        assert!(check_equivalence(&n, &out, &EquivConfig::default())
            .unwrap()
            .is_equivalent());
        assert!(
            seen.insert(write_netlist(&out)),
            "recipe {} duplicates an earlier structure",
            r.id
        );
    }
}
