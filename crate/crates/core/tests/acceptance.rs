//! Acceptance suite. Prints one line per criterion and exits nonzero when a
//! criterion fails that is not listed in `KNOWN_RED`, or when a listed one
//! starts passing (so the list cannot silently go stale).

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use qramforge::builders::{
    build_parallel_clifford_t, build_sequential_clifford_t, build_toffoli_bucket_brigade,
};
use qramforge::decompose::{
    lower_ccz, lower_toffoli, pair_lower_shared_control, pair_lower_shared_target, CczVariant,
};
use qramforge::metrics::{self, measure, region_t_count, Family, NPolicy, SweepConfig};
use qramforge::passes::{apply_parallelisation_template, expand_ghz_fanout, find_template_sites, GhzOptions};
use qramforge::phase_poly::{phase_polynomial_of, PhasePolynomial};
use qramforge::schedule::{depth, region_depths};
use qramforge::sim::{
    compare_on_shared_wires, enumerate_measurement_branches, unitary_of, verify_qram,
    StateVector, VerdictLevel,
};
use qramforge::{Control, FaninMode, Gate, GateKind, QramInstance, Region, WireId};

const TOL: f64 = 1e-9;

/// Criteria whose stated targets this construction does not reach; see README.
const KNOWN_RED: &[u32] = &[6, 7];

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn check(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn inst(q: u32, n: u32) -> QramInstance {
    QramInstance::from_spec(q, n, "ones").unwrap()
}

fn parallel(q: u32, n: u32, mode: FaninMode) -> qramforge::Circuit {
    build_parallel_clifford_t(&inst(q, n), mode)
}

fn oracle() -> Outcome {
    let mut runs = 0;
    let mut memories = 0;
    for q in 1..=3u32 {
        let ns: Vec<u32> = if q < 3 { (1..=q).collect() } else { vec![q] };
        for n in ns {
            let i = inst(q, n);
            let v = verify_qram(&build_toffoli_bucket_brigade(&i), &i).map_err(|e| e.to_string())?;
            check(v.level == VerdictLevel::Exact, format!("toffoli q={q} n={n}: {v:?}"))?;
            memories += v.memories_checked;
            runs += 1;
            for mode in [FaninMode::Measurement, FaninMode::Unitary] {
                let v = verify_qram(&build_parallel_clifford_t(&i, mode), &i).map_err(|e| e.to_string())?;
                check(
                    v.level != VerdictLevel::Inequivalent && v.max_deviation < TOL,
                    format!("parallel {mode} q={q} n={n}: {v:?}"),
                )?;
                memories += v.memories_checked;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} circuits, {memories} memory configurations"))
}

fn width() -> Outcome {
    for q in 1..=8u32 {
        let w = measure(&parallel(q, q, FaninMode::Measurement)).map_err(|e| e.to_string())?.width;
        check(w == (q + (1 << q) + 1) as usize, format!("q={q}: width {w}"))?;
    }
    Ok("q=1..8 exact".into())
}

fn query_t_count() -> Outcome {
    for q in 1..=6u32 {
        for n in 1..=q {
            let t = region_t_count(&parallel(q, n, FaninMode::Measurement), Region::Query).unwrap();
            check(t == 6 << n, format!("q={q} n={n}: QUERY T-count {t}, want {}", 6 << n))?;
        }
    }
    Ok("6*2^n for all 1<=n<=q<=6".into())
}

fn fanout_t_count() -> Outcome {
    let mut deltas = Vec::new();
    for q in 2..=8u32 {
        let t = region_t_count(&parallel(q, q, FaninMode::Measurement), Region::Fanout).unwrap() as i64;
        let exact = 4 * ((1i64 << q) - 2);
        check(t == exact, format!("q={q}: FANOUT T-count {t}, want {exact}"))?;
        deltas.push(t - 4 * (1i64 << q));
    }
    check(deltas.iter().all(|&d| d == -8), format!("deltas {deltas:?}"))?;
    Ok(format!("4*(2^q-2) for q=2..8; delta vs 4*2^q = {:?}", deltas))
}

fn query_depth() -> Outcome {
    let mut seen = std::collections::BTreeSet::new();
    for q in 1..=6u32 {
        for n in 1..=q {
            let d = region_depths(&parallel(q, n, FaninMode::Measurement)).unwrap().query;
            seen.insert(d);
        }
    }
    check(seen.len() == 1, format!("QUERY depths vary: {seen:?}"))?;
    let d = *seen.iter().next().unwrap() as i64;
    check((d - 10).abs() <= 2, format!("QUERY depth {d}, want 10 +- 2"))?;
    Ok(format!("QUERY depth {d} for all 1<=n<=q<=6"))
}

fn diffs(v: &[i64]) -> Vec<i64> {
    v.windows(2).map(|w| w[1] - w[0]).collect()
}

fn depth_scaling() -> Outcome {
    let qs = 3..=8u32;
    let meas: Vec<_> = qs.clone().map(|q| region_depths(&parallel(q, q, FaninMode::Measurement)).unwrap()).collect();
    let unit: Vec<_> = qs.clone().map(|q| region_depths(&parallel(q, q, FaninMode::Unitary)).unwrap()).collect();
    let total = diffs(&meas.iter().map(|r| r.total as i64).collect::<Vec<_>>());
    let fanout = diffs(&meas.iter().map(|r| r.fanout as i64).collect::<Vec<_>>());
    let fanin_u = diffs(&unit.iter().map(|r| r.fanin as i64).collect::<Vec<_>>());
    let fanin_m = diffs(&meas.iter().map(|r| r.fanin as i64).collect::<Vec<_>>());
    let detail = format!(
        "total diffs {total:?}, FANOUT {fanout:?}, FANIN(unitary) {fanin_u:?}, FANIN(measurement) {fanin_m:?}"
    );
    let within = |d: &[i64], want: i64, tol: i64| d.iter().all(|&x| (x - want).abs() <= tol);
    let mut failed = Vec::new();
    if !within(&total, 14, 0) {
        failed.push("total slope 14");
    }
    if !within(&fanout, 10, 1) {
        failed.push("FANOUT slope 10+-1");
    }
    if !within(&fanin_u, 4, 1) {
        failed.push("FANIN(unitary) slope 4+-1");
    }
    if failed.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{} not met; {detail}", failed.join(", ")))
    }
}

fn sequential() -> Outcome {
    let mut deltas = Vec::new();
    for q in 2..=6u32 {
        let m = measure(&build_sequential_clifford_t(&inst(q, q))).map_err(|e| e.to_string())?;
        let t_model = 21 * (1usize << q) - 28;
        check(m.tcount == t_model, format!("q={q}: T-count {} want {t_model}", m.tcount))?;
        deltas.push(m.depth as i64 - (21 * (1i64 << q) + 2 * q as i64 - 26));
    }
    let constant = deltas.iter().all(|&d| d == deltas[0]);
    let small = deltas.iter().all(|d| d.abs() <= 10);
    let detail = format!("T-count exact for q=2..6; depth deltas {deltas:?}");
    if constant && small {
        Ok(detail)
    } else {
        Err(format!("depth not within a constant offset (|c|<=10): {detail}"))
    }
}

fn decompositions() -> Outcome {
    let w3 = [WireId(0), WireId(1), WireId(2)];
    let ccz = reference_unitary(3, |b| if b[0] && b[1] && b[2] { -one() } else { one() });
    let ccx = reference_unitary(3, |b| {
        b[2] ^= b[0] && b[1];
        one()
    });
    let mut worst = 0.0f64;
    for v in CczVariant::ALL.into_iter().filter(|v| v.is_exact()) {
        for s in w3 {
            let u = unitary_of(&circuit(3, lower_ccz(v, w3, s).unwrap())).unwrap();
            worst = worst.max(u.max_abs_diff(&ccz));
            let u = unitary_of(&circuit(3, lower_toffoli(v, (w3[0], w3[1]), w3[2], w3[2]).unwrap())).unwrap();
            worst = worst.max(u.max_abs_diff(&ccx));
        }
    }
    let w = WireId;
    let st = pair_lower_shared_target(&Gate::ccx(w(0), w(1), w(4)), &Gate::ccx(w(2), w(3), w(4))).unwrap();
    let want = reference_unitary(5, |b| {
        b[4] ^= (b[0] && b[1]) ^ (b[2] && b[3]);
        one()
    });
    worst = worst.max(unitary_of(&circuit(5, st)).unwrap().max_abs_diff(&want));

    // Shared-control pair: two logical ANDs onto ancillas prepared in |0>.
    let sc = circuit(5, pair_lower_shared_control(&Gate::ccx(w(0), w(1), w(3)), &Gate::ccx(w(0), w(2), w(4))).unwrap());
    for x in 0..8 {
        let mut bits = bits_of(3, x);
        bits.extend([false, false]);
        let mut s = StateVector::basis(5, index_of(&bits)).unwrap();
        s.run(&sc).unwrap();
        let (t0, t1) = (bits[0] && bits[1], bits[0] && bits[2]);
        let (mut out, k) = (bits.clone(), t0 as usize + t1 as usize);
        out[3] = t0;
        out[4] = t1;
        worst = worst.max((s.amplitudes()[index_of(&out)] - minus_i_pow(k)).norm());
    }
    check(worst < TOL, format!("max deviation {worst:e}"))?;

    for s in w3 {
        let p = phase_polynomial_of(&lower_ccz(CczVariant::ParallelSharedWire, w3, s).unwrap(), 3)
            .map_err(|e| e.to_string())?;
        check(
            p.coefficients == PhasePolynomial::ccz_pattern(0, 1, 2) && p.parities_restored(),
            format!("shared wire {s:?}: {p:?}"),
        )?;
    }
    Ok(format!("max deviation {worst:.1e}; phase polynomial matches for every shared wire"))
}

fn logical_and() -> Outcome {
    let w3 = [WireId(0), WireId(1), WireId(2)];
    let compute = circuit(3, lower_toffoli(CczVariant::LogicalAndCompute, (w3[0], w3[1]), w3[2], w3[2]).unwrap());
    let uncompute = circuit(3, lower_toffoli(CczVariant::LogicalAndUncompute, (w3[0], w3[1]), w3[2], w3[2]).unwrap());
    let mut worst = 0.0f64;
    let mut branches = 0;
    for a in 0..4usize {
        let (a0, a1) = (a >> 1 & 1 == 1, a & 1 == 1);
        let pre = StateVector::basis(3, index_of(&[a0, a1, false])).unwrap();
        let mut s = pre.clone();
        s.run(&compute).unwrap();
        let mut want = StateVector::basis(3, index_of(&[a0, a1, a0 && a1])).unwrap();
        let phase = minus_i_pow((a0 && a1) as usize);
        want = StateVector::from_amplitudes(3, want.amplitudes().iter().map(|x| x * phase).collect());
        worst = worst.max(max_diff(&s, &want));
        for (outcomes, _, mut post) in enumerate_measurement_branches(&uncompute, &s).unwrap() {
            if outcomes.values().any(|&b| b) {
                post.apply(&Gate::x(w3[2])).unwrap();
            }
            worst = worst.max(max_diff(&post, &pre));
            branches += 1;
        }
    }
    check(worst < TOL, format!("max deviation {worst:e}"))?;
    Ok(format!("4 inputs, {branches} uncompute branches, max deviation {worst:.1e}"))
}

fn templates() -> Outcome {
    let w = WireId;
    let mut out = Vec::new();
    for neg in [false, true] {
        let m = if neg { Control::neg(w(2)) } else { Control::pos(w(2)) };
        let c = circuit(
            4,
            [
                Gate::cx(w(1), w(2)),
                Gate::controlled(GateKind::Ccx, vec![Control::pos(w(0)), m], w(3)),
                Gate::cx(w(1), w(2)),
            ],
        );
        check(find_template_sites(&c).len() == 1, "template not found".into())?;
        let r = apply_parallelisation_template(&c, 0).map_err(|e| e.to_string())?;
        let d = unitary_of(&r).unwrap().max_abs_diff(&unitary_of(&c).unwrap());
        check(d < TOL, format!("negative={neg}: deviation {d:e}"))?;
        check(depth(&r) <= depth(&c), format!("depth {} > {}", depth(&r), depth(&c)))?;
        out.push(format!("{} depth {}->{}", if neg { "negative" } else { "positive" }, depth(&c), depth(&r)));
    }
    Ok(out.join(", "))
}

fn ghz() -> Outcome {
    let mut sizes = Vec::new();
    for q in 2..=4u32 {
        let c = parallel(q, q, FaninMode::Unitary);
        let opts = GhzOptions { ancilla_budget: Some(1 << q) };
        let e = expand_ghz_fanout(&c, &opts).map_err(|e| e.to_string())?;
        let bound = 2 * (q as usize + (1 << q) + 1) + (1 << q);
        check(e.num_wires() <= bound, format!("q={q}: {} wires > {bound}", e.num_wires()))?;
        check(e.count_kind(GateKind::McxFanout) == 0, format!("q={q}: fan-outs remain"))?;
        sizes.push(format!("q={q}: {}<={bound}", e.num_wires()));
        if q == 2 {
            let wire = |n: &str| c.find_wire(n).unwrap().0;
            let memory: Vec<usize> = (0..4).map(|j| wire(&format!("m{j:02b}"))).collect();
            let inputs = (0..1u128 << 7).map(|x| {
                let mut key = (x & 1) << wire("a0") | (x >> 1 & 1) << wire("a1") | (x >> 2 & 1) << wire("target");
                for (j, &m) in memory.iter().enumerate() {
                    key |= (x >> (3 + j) & 1) << m;
                }
                key
            });
            let d = compare_on_shared_wires(&c, &e, inputs).map_err(|e| e.to_string())?;
            check(d < TOL, format!("q=2 deviation {d:e}"))?;
        }
    }
    Ok(sizes.join(", "))
}

fn model_sweep() -> Outcome {
    let cfg = SweepConfig {
        families: vec![Family::BbSequential, Family::Qrom, Family::BbParallel],
        q_range: 2..=15,
        n_policy: NPolicy::NEqualsQ,
        measure_cap: 2,
        fanin: FaninMode::Measurement,
    };
    let rows = metrics::sweep(&cfg);
    check(rows.len() == 42, format!("{} rows", rows.len()))?;
    for r in &rows {
        let (q, p) = (r.q as i128, 1i128 << r.q);
        let want = match r.family {
            Family::BbSequential => (q + p + 5, 21 * p - 28, 21 * p + 2 * q - 26),
            Family::Qrom => (q + 1, 4 * p - 4, 10 * p),
            Family::BbParallel => (q + p + 1, 4 * p + 6 * p, 14 * q + 10),
        };
        let got = (r.model.width, r.model.tcount, r.model.depth);
        check(got == want, format!("{} q={}: {got:?} vs {want:?}", r.family, r.q))?;
    }
    let at15 = |f: Family| rows.iter().find(|r| r.family == f && r.q == 15).unwrap().model;
    check(at15(Family::BbParallel).depth == 220, "BB_PARALLEL depth at q=15".into())?;
    check(at15(Family::BbSequential).depth == 688_132, "BB_SEQUENTIAL depth at q=15".into())?;
    check(metrics::model(Family::Qrom, 3, 3).tcount == 28, "QROM T-count at n=3".into())?;
    let mut csv = Vec::new();
    metrics::write_csv(&rows, &mut csv).map_err(|e| e.to_string())?;
    check(csv.iter().filter(|&&b| b == b'\n').count() == 43, "CSV line count".into())?;
    Ok("42 rows; BB_PARALLEL depth(15)=220, BB_SEQUENTIAL depth(15)=688132".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "oracle correctness", oracle),
        (2, "parallel width", width),
        (3, "QUERY T-count", query_t_count),
        (4, "FANOUT T-count", fanout_t_count),
        (5, "QUERY depth constancy", query_depth),
        (6, "depth scaling", depth_scaling),
        (7, "sequential baseline", sequential),
        (8, "decomposition equivalence", decompositions),
        (9, "logical AND phase and uncompute", logical_and),
        (10, "template soundness", templates),
        (11, "GHZ expansion", ghz),
        (12, "model sweep", model_sweep),
    ];
    let mut unexpected = Vec::new();
    for (id, name, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>().map(String::as_str).or(p.downcast_ref::<&str>().copied()))));
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_RED.contains(&id);
        match &outcome {
            Ok(d) => println!("criterion {id:>2}: PASS  {name} ({secs:.1}s): {d}"),
            Err(d) => println!(
                "criterion {id:>2}: FAIL  {name} ({secs:.1}s){}: {d}",
                if known { " [known]" } else { "" }
            ),
        }
        if outcome.is_ok() == known {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected results for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
