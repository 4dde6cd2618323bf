use qramforge::builders::{
    build_parallel_clifford_t, build_sequential_clifford_t, build_toffoli_bucket_brigade,
    reference_qram_map,
};
use qramforge::sim::{
    unitary_of, verify_qram, verify_qram_with, BranchPolicy, UnitaryMatrix, VerdictLevel,
    VerifyOptions,
};
use qramforge::{Circuit, FaninMode, GateKind, QramInstance, Region};

fn ones(q: u32, n: u32) -> QramInstance {
    QramInstance::from_spec(q, n, "ones").unwrap()
}

#[test]
fn toffoli_level_is_exact_for_small_q() {
    for q in 1..=2 {
        for n in 1..=q {
            let c = build_toffoli_bucket_brigade(&ones(q, n));
            let v = verify_qram(&c, &ones(q, n)).unwrap();
            assert_eq!(v.level, VerdictLevel::Exact, "q={q} n={n}: {v:?}");
            assert_eq!(v.memories_checked, 1 << (1 << q));
        }
    }
}

#[test]
fn sequential_matches_toffoli_level_exactly() {
    for q in 1..=2 {
        let inst = ones(q, q);
        let v = verify_qram(&build_sequential_clifford_t(&inst), &inst).unwrap();
        assert_eq!(v.level, VerdictLevel::Exact, "{v:?}");
    }
}

#[test]
fn parallel_is_correct_in_both_modes() {
    for q in 1..=2 {
        for n in 1..=q {
            for mode in [FaninMode::Unitary, FaninMode::Measurement] {
                let inst = ones(q, n);
                let v = verify_qram(&build_parallel_clifford_t(&inst, mode), &inst).unwrap();
                assert_ne!(v.level, VerdictLevel::Inequivalent, "q={q} n={n} {mode}: {v:?}");
            }
        }
    }
}

#[test]
fn measurement_fanin_q2_has_four_branches() {
    let inst = ones(2, 2);
    let c = build_parallel_clifford_t(&inst, FaninMode::Measurement);
    let opts = VerifyOptions {
        memories: Some(vec![inst.memory.clone()]),
        branches: BranchPolicy::All,
    };
    let v = verify_qram_with(&c, &inst, &opts).unwrap();
    assert_ne!(v.level, VerdictLevel::Inequivalent);
    // 4 addresses x 2 targets x 4 outcome strings.
    assert_eq!(v.branches_checked, 8 * 4);
    assert_eq!(v.branches_dropped, 0);
}

#[test]
fn deleting_a_query_toffoli_is_caught() {
    let inst = ones(2, 2);
    let c = build_toffoli_bucket_brigade(&inst);
    let query = c.regions().unwrap().query.clone();
    let victim = query.start + 2;
    let mutated = c.filter_gates(|i, _| i != victim).unwrap();
    let v = verify_qram(&mutated, &inst).unwrap();
    assert_eq!(v.level, VerdictLevel::Inequivalent);
    let w = v.witness.unwrap();
    assert_eq!(w.address, 2);
    assert_eq!(v.witnessing_input, Some(w.address << 1 | w.target as usize));
}

#[test]
fn reference_map_matches_toffoli_restriction() {
    // Full unitary for q = 1 (6 wires), restricted to pointers/memory basis inputs.
    for word in 0..4u64 {
        let inst = QramInstance::from_word(1, 1, word).unwrap();
        let c = build_toffoli_bucket_brigade(&inst);
        let u = unitary_of(&c).unwrap();
        let perm = reference_qram_map(&inst);
        let layout = qramforge::QramLayout::from_circuit(&c, 1).unwrap();
        let w = c.num_wires();
        let idx = |addr: usize, t: usize| {
            let mut bits = 0usize;
            let mut set = |wire: qramforge::WireId| bits |= 1 << (w - 1 - wire.0);
            if addr & 1 == 1 {
                set(layout.address[0]);
            }
            for (j, &m) in inst.memory.iter().enumerate() {
                if m {
                    set(layout.memory[j]);
                }
            }
            if t == 1 {
                set(layout.target);
            }
            bits
        };
        for (col, &row) in perm.iter().enumerate() {
            let (a, t) = (col >> 1, col & 1);
            let (ra, rt) = (row >> 1, row & 1);
            assert!((u.get(idx(ra, rt), idx(a, t)) - 1.0).norm() < 1e-9);
        }
    }
}

#[test]
fn inverse_of_toffoli_fanout_is_fanin() {
    let c = build_toffoli_bucket_brigade(&ones(2, 2));
    let fo = c.region_circuit(Region::Fanout).unwrap();
    let fi = c.region_circuit(Region::Fanin).unwrap();
    assert_eq!(fo.inverse().unwrap().gates(), fi.gates());
}

#[test]
fn circuit_times_inverse_is_identity() {
    let c = build_parallel_clifford_t(&ones(1, 1), FaninMode::Unitary);
    let prod = c.compose(&c.inverse().unwrap()).unwrap();
    let u = unitary_of(&prod).unwrap();
    assert!(u.approx_eq(&UnitaryMatrix::identity(u.dim()), 1e-9));
    assert_eq!(c.count_kind(GateKind::MeasureX), 0);
    let _: &Circuit = &c;
}
