//! Applies every built-in restructuring recipe to one circuit and reports
//! size and depth after each, with every pass checked for equivalence.
//!
//!     cargo run --example restructure_recipes

use trojan_forge::equiv::EquivConfig;
use trojan_forge::netlist::parse_netlist;
use trojan_forge::restructure::{apply_recipe, builtin_recipes, Recipe};

fn main() {
    let n = parse_netlist(include_str!("../data/ctrl12.v")).expect("data parses");
    let cfg = EquivConfig::default();
    println!("{}: {} gates", n.name(), n.gate_count());
    println!("{:>6} {:>7} {:>9} {:>9}  passes", "recipe", "gates", "ands", "levels");
    for recipe in builtin_recipes() {
        let r = apply_recipe(&n, &recipe, 7, &cfg).expect("recipes preserve function");
        let last = r.reports.iter().rev().find(|p| p.pass != "emit").unwrap_or(&r.reports[0]);
        let names: Vec<&str> = r.reports.iter().map(|p| p.pass.as_str()).collect();
        println!(
            "{:>6} {:>7} {:>4}->{:<4} {:>4}->{:<4} {}",
            recipe.id,
            r.netlist.gate_count(),
            r.reports[0].nodes_before,
            last.nodes_after,
            r.reports[0].levels_before,
            last.levels_after,
            names.join(" ")
        );
    }

    // user recipes are JSON lists of steps
    let custom = Recipe::from_json(
        r#"[{"pass": "strash"}, {"pass": "balance", "seed": 3}, {"pass": "gatesize", "params": {"max_fanin": 4}}]"#,
    )
    .expect("valid recipe");
    let r = apply_recipe(&n, &custom, 1, &cfg).unwrap();
    println!("custom recipe: {} gates", r.netlist.gate_count());
}
