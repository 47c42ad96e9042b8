//! Equivalence-preserving AIG restructuring passes and recipes.
//!
//! A [`Recipe`] is an ordered list of [`PassStep`]s. [`apply_recipe`] lowers
//! a netlist to an AIG, runs each pass, checks every intermediate result for
//! equivalence against its predecessor and writes the final graph back out
//! as a netlist with the original port names and order.

mod balance;
mod fraig;
mod resub;
mod rewrite;
mod window;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

pub use balance::balance;
pub use fraig::{fraig, FRAIG_EXHAUSTIVE_BOUND};
pub use resub::resub;
pub use rewrite::{refactor, rewrite, MAX_REFACTOR_INPUTS};

use crate::aig::{from_aig, to_aig, Aig, AigError, FromAigOptions};
use crate::equiv::{check_aigs, check_equivalence, EquivConfig, EquivError, EquivResult, Mode};
use crate::netlist::Netlist;
use crate::seed;

/// Number of built-in recipes.
pub const RECIPE_COUNT: u32 = 18;

#[derive(Debug, Error)]
pub enum RestructureError {
    #[error("invalid pass parameter: {0}")]
    Param(String),
    #[error("invalid recipe: {0}")]
    Recipe(String),
    #[error("no built-in recipe {0} (valid ids are 1..={RECIPE_COUNT})")]
    UnknownRecipe(u32),
    #[error("pass {index} ({pass}) broke equivalence: {detail}")]
    EquivalenceFailure {
        pass: String,
        index: usize,
        detail: String,
    },
    #[error(transparent)]
    Aig(#[from] AigError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pass {
    Strash,
    Balance,
    Rewrite,
    Refactor {
        max_cone_inputs: usize,
    },
    Resub {
        max_divisors: usize,
    },
    Fraig {
        sim_words: usize,
        exact_budget: u64,
    },
    /// Emits multi-input AND gates of up to `max_fanin` inputs (0 means
    /// unbounded) instead of two-input gates. No effect on the AIG itself.
    Gatesize {
        max_fanin: usize,
    },
}

impl Pass {
    pub fn name(&self) -> &'static str {
        match self {
            Pass::Strash => "strash",
            Pass::Balance => "balance",
            Pass::Rewrite => "rewrite",
            Pass::Refactor { .. } => "refactor",
            Pass::Resub { .. } => "resub",
            Pass::Fraig { .. } => "fraig",
            Pass::Gatesize { .. } => "gatesize",
        }
    }

    pub fn params(&self) -> Value {
        match *self {
            Pass::Strash | Pass::Balance | Pass::Rewrite => json!({}),
            Pass::Refactor { max_cone_inputs } => json!({ "max_cone_inputs": max_cone_inputs }),
            Pass::Resub { max_divisors } => json!({ "max_divisors": max_divisors }),
            Pass::Fraig {
                sim_words,
                exact_budget,
            } => json!({ "sim_words": sim_words, "exact_budget": exact_budget }),
            Pass::Gatesize { max_fanin } => json!({ "max_fanin": max_fanin }),
        }
    }

    /// Builds a pass from its name and a JSON parameter object; missing
    /// parameters take their defaults.
    pub fn from_parts(name: &str, params: &Value) -> Result<Pass, RestructureError> {
        let obj = match params {
            Value::Null => serde_json::Map::new(),
            Value::Object(m) => m.clone(),
            other => {
                return Err(RestructureError::Param(format!(
                    "params of `{name}` must be an object, got {other}"
                )))
            }
        };
        let allowed: &[&str] = match name {
            "strash" | "balance" | "rewrite" => &[],
            "refactor" => &["max_cone_inputs"],
            "resub" => &["max_divisors"],
            "fraig" => &["sim_words", "exact_budget"],
            "gatesize" => &["max_fanin"],
            _ => return Err(RestructureError::Recipe(format!("unknown pass `{name}`"))),
        };
        if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(RestructureError::Param(format!(
                "`{name}` has no parameter `{k}`"
            )));
        }
        let int = |key: &str, default: u64| -> Result<u64, RestructureError> {
            match obj.get(key) {
                None => Ok(default),
                Some(v) => v.as_u64().ok_or_else(|| {
                    RestructureError::Param(format!(
                        "`{name}.{key}` must be a non-negative integer"
                    ))
                }),
            }
        };
        let pass = match name {
            "strash" => Pass::Strash,
            "balance" => Pass::Balance,
            "rewrite" => Pass::Rewrite,
            "refactor" => Pass::Refactor {
                max_cone_inputs: int("max_cone_inputs", 10)? as usize,
            },
            "resub" => Pass::Resub {
                max_divisors: int("max_divisors", 16)? as usize,
            },
            "fraig" => Pass::Fraig {
                sim_words: int("sim_words", 8)? as usize,
                exact_budget: int("exact_budget", 1000)?,
            },
            "gatesize" => Pass::Gatesize {
                max_fanin: int("max_fanin", 4)? as usize,
            },
            _ => unreachable!(),
        };
        pass.validate()?;
        Ok(pass)
    }

    fn validate(&self) -> Result<(), RestructureError> {
        match *self {
            Pass::Refactor { max_cone_inputs } if !(2..=MAX_REFACTOR_INPUTS).contains(&max_cone_inputs) => {
                Err(RestructureError::Param(format!(
                    "refactor max_cone_inputs must be in 2..={MAX_REFACTOR_INPUTS}, got {max_cone_inputs}"
                )))
            }
            Pass::Resub { max_divisors } if max_divisors < 2 => {
                Err(RestructureError::Param("resub max_divisors must be at least 2".into()))
            }
            Pass::Fraig { sim_words: 0, .. } => Err(RestructureError::Param("fraig sim_words must be positive".into())),
            Pass::Gatesize { max_fanin: 1 } => {
                Err(RestructureError::Param("gatesize max_fanin must be 0 (unbounded) or at least 2".into()))
            }
            _ => Ok(()),
        }
    }

    /// Runs the pass on an AIG.
    pub fn run(&self, g: &Aig, seed: u64) -> Result<Aig, RestructureError> {
        Ok(match *self {
            Pass::Strash | Pass::Gatesize { .. } => g.strash(),
            Pass::Balance => balance(g, seed),
            Pass::Rewrite => rewrite(g, seed),
            Pass::Refactor { max_cone_inputs } => refactor(g, max_cone_inputs, seed)?,
            Pass::Resub { max_divisors } => resub(g, max_divisors, seed),
            Pass::Fraig {
                sim_words,
                exact_budget,
            } => fraig(g, sim_words, seed, exact_budget),
        })
    }
}

/// One entry of a recipe file: `{"pass": ..., "params": {...}, "seed": ...}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PassStep {
    pub pass: Pass,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct RawStep {
    pass: String,
    #[serde(default)]
    params: Value,
    #[serde(default)]
    seed: u64,
}

impl Serialize for PassStep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawStep {
            pass: self.pass.name().to_string(),
            params: self.pass.params(),
            seed: self.seed,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PassStep {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawStep::deserialize(d)?;
        let pass = Pass::from_parts(&raw.pass, &raw.params).map_err(serde::de::Error::custom)?;
        Ok(PassStep {
            pass,
            seed: raw.seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recipe {
    /// 1..=18 for built-in recipes, 0 for user recipes.
    pub id: u32,
    pub steps: Vec<PassStep>,
}

impl Recipe {
    /// A user recipe from a JSON list of steps.
    pub fn from_json(text: &str) -> Result<Recipe, RestructureError> {
        let steps: Vec<PassStep> =
            serde_json::from_str(text).map_err(|e| RestructureError::Recipe(e.to_string()))?;
        let r = Recipe { id: 0, steps };
        r.validate()?;
        Ok(r)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.steps).expect("serializable")
    }

    pub fn validate(&self) -> Result<(), RestructureError> {
        match self.steps.first() {
            Some(s) if s.pass == Pass::Strash => {}
            _ => {
                return Err(RestructureError::Recipe(
                    "a recipe must begin with strash".into(),
                ))
            }
        }
        self.steps.iter().try_for_each(|s| s.pass.validate())
    }

    /// Netlist emission options implied by the recipe's gate-size steps.
    pub fn emit_options(&self) -> FromAigOptions {
        let mut opts = FromAigOptions::default();
        for s in &self.steps {
            if let Pass::Gatesize { max_fanin } = s.pass {
                opts.group_ands = true;
                opts.max_fanin = max_fanin;
            }
        }
        opts
    }
}

fn step(pass: Pass, seed: u64) -> PassStep {
    PassStep { pass, seed }
}

/// The built-in recipe with the given id (1..=18).
pub fn builtin_recipe(id: u32) -> Result<Recipe, RestructureError> {
    use Pass::*;
    let rf = |k| Refactor { max_cone_inputs: k };
    let rs = |k| Resub { max_divisors: k };
    let fr = |w, b| Fraig {
        sim_words: w,
        exact_budget: b,
    };
    let gs = |k| Gatesize { max_fanin: k };
    let passes: Vec<Pass> = match id {
        1 => vec![Balance],
        2 => vec![Balance, Rewrite],
        3 => vec![rf(8)],
        4 => vec![rs(8)],
        5 => vec![fr(8, 1000)],
        6 => vec![gs(4)],
        7 => vec![Balance, Rewrite, gs(3)],
        8 => vec![Rewrite, rf(10), Balance],
        9 => vec![rs(16), Rewrite, fr(4, 500)],
        10 => vec![fr(16, 2000), Balance, gs(0)],
        11 => vec![rf(6), rs(12), Balance],
        12 => vec![Balance, Rewrite, Balance, gs(5)],
        13 => vec![Rewrite, Rewrite, rf(12)],
        14 => vec![rs(16), rf(8), gs(6)],
        15 => vec![fr(8, 1000), Rewrite, rs(8), Balance],
        16 => vec![Balance, rf(10), fr(8, 1000), gs(4)],
        17 => vec![Rewrite, rs(12), rf(10), Balance, gs(3)],
        18 => vec![rf(4), Balance, Rewrite, fr(4, 1000), Balance, gs(0)],
        _ => return Err(RestructureError::UnknownRecipe(id)),
    };
    let mut steps = vec![step(Strash, 0)];
    steps.extend(
        passes
            .into_iter()
            .enumerate()
            .map(|(k, p)| step(p, u64::from(id) * 100 + k as u64 + 1)),
    );
    Ok(Recipe { id, steps })
}

pub fn builtin_recipes() -> Vec<Recipe> {
    (1..=RECIPE_COUNT)
        .map(|id| builtin_recipe(id).expect("built-in id"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassReport {
    pub pass: String,
    pub index: usize,
    pub nodes_before: usize,
    pub nodes_after: usize,
    pub levels_before: u32,
    pub levels_after: u32,
    pub wall_time_ms: f64,
    pub equiv_checked: bool,
    pub equiv_mode: Option<Mode>,
}

#[derive(Debug, Clone)]
pub struct Restructured {
    pub netlist: Netlist,
    pub reports: Vec<PassReport>,
}

fn ensure(
    verdict: &crate::equiv::EquivVerdict,
    pass: &str,
    index: usize,
) -> Result<(), RestructureError> {
    match &verdict.result {
        EquivResult::Counterexample { inputs } => Err(RestructureError::EquivalenceFailure {
            pass: pass.to_string(),
            index,
            detail: format!(
                "outputs differ under {}",
                serde_json::to_string(inputs).unwrap_or_default()
            ),
        }),
        _ => Ok(()),
    }
}

/// Applies `recipe` to `n`. Each pass is checked against its input (and the
/// emitted netlist against `n`); a mismatch is a hard error naming the pass.
/// Output is a pure function of `(n, recipe, seed)`.
pub fn apply_recipe(
    n: &Netlist,
    recipe: &Recipe,
    seed: u64,
    check: &EquivConfig,
) -> Result<Restructured, RestructureError> {
    recipe.validate()?;
    let mut cur = to_aig(n)?;
    let mut reports = Vec::with_capacity(recipe.steps.len() + 1);
    for (index, s) in recipe.steps.iter().enumerate() {
        let pass_seed = seed::derive(seed, "pass", s.seed ^ (index as u64) << 48);
        let start = Instant::now();
        let next = s.pass.run(&cur, pass_seed)?;
        let wall = start.elapsed().as_secs_f64() * 1e3;
        let verdict = check_aigs(
            &cur,
            &next,
            &EquivConfig {
                seed: pass_seed,
                ..*check
            },
        )?;
        ensure(&verdict, s.pass.name(), index)?;
        log::debug!(
            "{} {} -> {} nodes",
            s.pass.name(),
            cur.and_count(),
            next.and_count()
        );
        reports.push(PassReport {
            pass: s.pass.name().to_string(),
            index,
            nodes_before: cur.and_count(),
            nodes_after: next.and_count(),
            levels_before: cur.depth(),
            levels_after: next.depth(),
            wall_time_ms: wall,
            equiv_checked: true,
            equiv_mode: Some(verdict.mode),
        });
        cur = next;
    }
    let start = Instant::now();
    let mut out = from_aig(&cur, recipe.emit_options());
    out.set_name(n.name());
    let wall = start.elapsed().as_secs_f64() * 1e3;
    let verdict = check_equivalence(
        n,
        &out,
        &EquivConfig {
            seed: seed::derive(seed, "emit", 0),
            ..*check
        },
    )?;
    ensure(&verdict, "emit", recipe.steps.len())?;
    reports.push(PassReport {
        pass: "emit".into(),
        index: recipe.steps.len(),
        nodes_before: cur.and_count(),
        nodes_after: cur.and_count(),
        levels_before: cur.depth(),
        levels_after: cur.depth(),
        wall_time_ms: wall,
        equiv_checked: true,
        equiv_mode: Some(verdict.mode),
    });
    Ok(Restructured {
        netlist: out,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_netlist;

    #[test]
    fn recipe_json_round_trip() {
        for r in builtin_recipes() {
            let back = Recipe::from_json(&r.to_json()).unwrap();
            assert_eq!(back.steps, r.steps);
        }
        let r = Recipe::from_json(
            r#"[{"pass":"strash"},{"pass":"refactor","params":{"max_cone_inputs":6},"seed":4}]"#,
        )
        .unwrap();
        assert_eq!(
            r.steps[1],
            PassStep {
                pass: Pass::Refactor { max_cone_inputs: 6 },
                seed: 4
            }
        );
    }

    #[test]
    fn recipe_errors() {
        assert!(Recipe::from_json(r#"[{"pass":"balance"}]"#).is_err());
        assert!(Recipe::from_json(r#"[{"pass":"strash"},{"pass":"bogus"}]"#).is_err());
        assert!(Recipe::from_json(
            r#"[{"pass":"strash"},{"pass":"refactor","params":{"max_cone_inputs":17}}]"#
        )
        .is_err());
        assert!(
            Recipe::from_json(r#"[{"pass":"strash"},{"pass":"balance","params":{"x":1}}]"#)
                .is_err()
        );
        assert!(builtin_recipe(19).is_err());
    }

    #[test]
    fn full_adder_recipe_one() {
        let src = "module fa(a, b, cin, sum, cout); input a, b, cin; output sum, cout; wire t1, t2, t3;
            xor x1(t1, a, b); xor x2(sum, t1, cin); and a1(t2, a, b); and a2(t3, t1, cin); or o1(cout, t2, t3); endmodule";
        let n = parse_netlist(src).unwrap();
        let r = apply_recipe(&n, &builtin_recipe(1).unwrap(), 0, &EquivConfig::default()).unwrap();
        assert!(check_equivalence(&n, &r.netlist, &EquivConfig::default())
            .unwrap()
            .is_equivalent());
        assert_eq!(r.netlist.input_names(), n.input_names());
        assert_eq!(r.netlist.output_names(), n.output_names());
        assert!(to_aig(&r.netlist).unwrap().depth() <= to_aig(&n).unwrap().depth());
        assert!(r
            .reports
            .iter()
            .all(|p| p.equiv_mode == Some(Mode::Exhaustive)));
    }
}
