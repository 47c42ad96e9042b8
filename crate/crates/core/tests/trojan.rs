mod common;

use trojan_forge::analysis::exact_signal_prob;
use trojan_forge::equiv::{check_equivalence, check_trojan_semantics, EquivConfig, TrojanFailure};
use trojan_forge::generate::{random_netlist, RandomSpec};
use trojan_forge::netlist::{parse_netlist, GateKind, NetId, Netlist, NetlistBuilder};
use trojan_forge::trojan::{
    activation_estimate, find_trigger_witness, insert_trojan, TriggerNet, TrojanRecord, TrojanSpec,
    Witness,
};
use common::{all_vectors, flipped, outputs, trigger_word};

#[test]
fn stealth_semantics_exhaustive() {
    let mut inserted = 0;
    for s in 0..30u64 {
        let pis = 6 + (s as usize % 7);
        let n = random_netlist(&RandomSpec::control(pis, 40 + 3 * s as usize), s);
        let q = 2 + (s as usize % 3);
        let spec = TrojanSpec {
            p: s as usize % (q + 1),
            threshold: 0.1,
            ..TrojanSpec::new(q, s)
        };
        let (inf, rec) = match insert_trojan(&n, &spec) {
            Ok(x) => x,
            Err(e) => {
                eprintln!("seed {s}: {e}");
                continue;
            }
        };
        inserted += 1;
        assert_eq!(inf.input_names(), n.input_names());
        assert_eq!(inf.output_names(), n.output_names());
        let (g, i, f) = (
            all_vectors(&n),
            all_vectors(&inf),
            all_vectors(&flipped(&n, &rec.victim)),
        );
        for w in 0..g[0].len() {
            let t = trigger_word(&n, &g, &rec, w);
            for ((go, io), fo) in outputs(&n, &g, w)
                .into_iter()
                .zip(outputs(&inf, &i, w))
                .zip(outputs(&n, &f, w))
            {
                assert_eq!((go ^ io) & !t, 0, "seed {s}: divergence while dormant");
                assert_eq!(
                    (io ^ fo) & t,
                    0,
                    "seed {s}: active behaviour is not the victim flip"
                );
            }
        }
        let w = rec
            .witness
            .as_ref()
            .expect("small circuits are always proven");
        assert_ne!(n.simulate(w).unwrap(), inf.simulate(w).unwrap());
        assert!(
            check_trojan_semantics(&n, &inf, &rec, &EquivConfig::default())
                .unwrap()
                .passed()
        );
    }
    assert!(inserted >= 20, "only {inserted} insertions succeeded");
}

#[test]
fn insertion_is_deterministic() {
    let n = random_netlist(&RandomSpec::control(10, 80), 3);
    let spec = TrojanSpec {
        threshold: 0.1,
        ..TrojanSpec::new(3, 17)
    };
    let (a, ra) = insert_trojan(&n, &spec).unwrap();
    let (b, rb) = insert_trojan(&n, &spec).unwrap();
    assert_eq!(a, b);
    assert_eq!(ra, rb);
    let json = serde_json::to_string(&ra).unwrap();
    assert_eq!(serde_json::from_str::<TrojanRecord>(&json).unwrap(), ra);
}

fn fa_trojan() -> (Netlist, Netlist, TrojanRecord) {
    let n = parse_netlist(
        "module fa(a, b, cin, sum, cout); input a, b, cin; output sum, cout; wire t1, t2, t3;
        xor x1(t1, a, b); xor x2(sum, t1, cin); and a1(t2, a, b); and a2(t3, t1, cin); or o1(cout, t2, t3); endmodule",
    )
    .unwrap();
    let spec = TrojanSpec {
        p: 0,
        trigger: Some(vec!["a".into(), "t1".into()]),
        victim: Some("sum".into()),
        ..TrojanSpec::new(2, 1)
    };
    let (inf, rec) = insert_trojan(&n, &spec).unwrap();
    (n, inf, rec)
}

fn tie_high(n: &Netlist, gate: &str, pin: usize) -> Netlist {
    let mut b = NetlistBuilder::from_netlist(n.clone());
    let src = b.constant(true);
    let g = b.gates_mut().iter_mut().find(|g| g.name == gate).unwrap();
    g.inputs[pin] = src;
    b.build().unwrap()
}

#[test]
fn full_adder_trojan_semantics() {
    let (n, inf, rec) = fa_trojan();
    let cfg = EquivConfig::default();
    assert!(check_trojan_semantics(&n, &inf, &rec, &cfg)
        .unwrap()
        .passed());

    // the miter's counterexample is a trigger witness
    let cex = check_equivalence(&n, &inf, &cfg).unwrap();
    let v = inf.simulate(cex.counterexample().unwrap()).unwrap();
    assert_eq!(v.get(&rec.trigger_output), Some(true));

    // payload removed: the XOR input is tied to the original function only
    let mut b = NetlistBuilder::from_netlist(inf.clone());
    let pre = b.find(&rec.payload_input).unwrap();
    let g = b
        .gates_mut()
        .iter_mut()
        .find(|g| g.name == rec.payload_gate)
        .unwrap();
    (g.kind, g.inputs) = (GateKind::Buf, vec![pre]);
    let disarmed = b.build().unwrap();
    let v = check_trojan_semantics(&n, &disarmed, &rec, &cfg).unwrap();
    assert!(matches!(
        v.failure,
        Some(TrojanFailure::WitnessAgrees { .. })
    ));
    assert_eq!(v.failure.unwrap().to_string(), "witness shows agreement");

    // trigger wired to constant 1: always active
    let always = tie_high(&inf, &rec.payload_gate, 1);
    let v = check_trojan_semantics(&n, &always, &rec, &cfg).unwrap();
    assert!(matches!(
        v.failure,
        Some(TrojanFailure::DormantDivergence { .. })
    ));

    let unproven = TrojanRecord {
        witness: None,
        ..rec.clone()
    };
    let v = check_trojan_semantics(&n, &inf, &unproven, &cfg).unwrap();
    assert_eq!(v.failure.unwrap().to_string(), "unproven HT");
}

#[test]
fn wide_and_trigger() {
    let src = "module t(a0, a1, a2, a3, a4, a5, a6, a7, c, y, z); input a0, a1, a2, a3, a4, a5, a6, a7, c;
        output y, z; and g(y, a0, a1, a2, a3, a4, a5, a6, a7); not h(z, c); endmodule";
    let n = parse_netlist(src).unwrap();
    let rec = TrojanRecord {
        trigger: (0..8)
            .map(|i| TriggerNet {
                net: format!("a{i}"),
                polarity: true,
            })
            .collect(),
        rare_count: 0,
        trigger_output: "y".into(),
        victim: "z".into(),
        payload_gate: "h".into(),
        payload_input: "c".into(),
        witness: None,
        added_gates: vec![],
        added_edges: vec![],
    };
    let est = activation_estimate(&n, &rec, 100_000, 9).unwrap();
    assert!(est <= 0.004, "estimate {est}");
    let Witness::Found(w) = find_trigger_witness(&n, &rec, 1000).unwrap() else {
        panic!("no witness")
    };
    for i in 0..8 {
        assert_eq!(w.get(&format!("a{i}")), Some(true));
    }
}

#[test]
fn activation_matches_exact_probability() {
    let n = random_netlist(&RandomSpec::mixed(8, 60), 12);
    let p = exact_signal_prob(&n).unwrap();
    let vectors = 200_000u64;
    for id in (0..n.net_count()).step_by(5) {
        let name = n.net_name(NetId(id as u32)).to_string();
        let single = |pol| TriggerNet {
            net: name.clone(),
            polarity: pol,
        };
        let mut rec = TrojanRecord {
            trigger: vec![single(true)],
            rare_count: 0,
            trigger_output: String::new(),
            victim: String::new(),
            payload_gate: String::new(),
            payload_input: String::new(),
            witness: None,
            added_gates: vec![],
            added_edges: vec![],
        };
        let est = activation_estimate(&n, &rec, vectors, id as u64).unwrap();
        let pe = p.p[id];
        let tol = 4.0 * (pe * (1.0 - pe) / vectors as f64).sqrt() + 1e-9;
        assert!((est - pe).abs() <= tol, "net {name}: {est} vs {pe}");
        rec.trigger.push(single(false));
        assert_eq!(activation_estimate(&n, &rec, 10_000, 0).unwrap(), 0.0);
    }
}
