//! Acceptance suite: every criterion at exact equality, one status line
//! each. Runs as a plain binary so the lines are always shown.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qhopf::ansq::{build_ansq, AnsqParams};
use qhopf::cli::sampled_associativity;
use qhopf::cohomology::{
    cocycle_class, is_coboundary, random_coboundaries, restrict_reassociator, standard_cocycle, trivializing_twist, CharacterData,
};
use qhopf::cyclo::{floor_frac, q_binomial, q_binomial_product, remainder, CycloNum};
use qhopf::double::relations::{build_ansq_double, check_closed_forms, check_coalgebra_formulas, check_relations};
use qhopf::double::DoubleAlgebra;
use qhopf::majid::{build_mnsq, check_majid_axioms, duality_iso};
use qhopf::qha::{check_antipode, check_associativity, check_quasi_bialgebra, QuasiHopf};
use qhopf::qusl2::{build_qusl2, psi_iso, QuslAlgebra};
use qhopf::report::{first_failure, CheckOptions, CheckRecord};
use qhopf::tensor::Algebra;

type Outcome = Result<String, String>;

fn records(tag: &str, recs: &[CheckRecord]) -> Outcome {
    match first_failure(recs) {
        Some(f) => Err(format!("{tag}: {} failed: {}", f.name, f.witness.clone().unwrap_or_default())),
        None => Ok(format!("{tag}: {} checks", recs.len())),
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let mut oks = Vec::new();
    for p in parts {
        oks.push(p?);
    }
    Ok(oks.join("; "))
}

fn params(n: u32, s: u32) -> AnsqParams {
    AnsqParams::new(n, s).expect("valid parameters")
}

fn axioms(h: &dyn QuasiHopf, opts: &CheckOptions) -> Vec<CheckRecord> {
    let mut r = check_quasi_bialgebra(h, opts);
    r.extend(check_antipode(h, opts));
    r
}

struct Doubles {
    d21: DoubleAlgebra,
    d31: DoubleAlgebra,
    d42: DoubleAlgebra,
}

impl Doubles {
    fn get(&self, n: u32, s: u32) -> &DoubleAlgebra {
        match (n, s) {
            (2, 1) => &self.d21,
            (3, 1) => &self.d31,
            _ => &self.d42,
        }
    }
}

const DOUBLE_SET: [(u32, u32); 3] = [(2, 1), (3, 1), (4, 2)];

fn c1(opts: &CheckOptions) -> Outcome {
    all([(2, 1), (3, 1), (4, 2), (4, 1), (6, 3)]
        .into_iter()
        .map(|(n, s)| {
            let t = Instant::now();
            let h = build_ansq(&params(n, s));
            let r = records(&format!("A({n},{s})"), &axioms(&h, opts));
            if t.elapsed() > Duration::from_secs(60) {
                return Err(format!("A({n},{s}) took {:?}", t.elapsed()));
            }
            r
        })
        .collect())
}

fn c2() -> Outcome {
    all([(2, 1), (3, 1)]
        .into_iter()
        .map(|(n, s)| {
            let p = params(n, s);
            let recs = duality_iso(&p);
            let rank = recs.iter().find(|r| r.name == "pairing matrix rank").ok_or("no rank record")?;
            let expect = format!("rank {} of {}", p.dim(), p.dim());
            if rank.coverage.as_deref() != Some(expect.as_str()) || p.dim() != (n * n * n / s) as usize {
                return Err(format!("({n},{s}) {:?}", rank.coverage));
            }
            records(&format!("({n},{s}) {expect}"), &recs)
        })
        .collect())
}

fn c3() -> Outcome {
    all([(2, 1), (3, 1)].into_iter().map(|(n, s)| records(&format!("M({n},{s})"), &check_majid_axioms(&build_mnsq(&params(n, s))))).collect())
}

fn c4(d: &Doubles) -> Outcome {
    all(DOUBLE_SET.into_iter().map(|(n, s)| records(&format!("({n},{s})"), &check_closed_forms(&params(n, s), d.get(n, s)))).collect())
}

fn c5(d: &Doubles) -> Outcome {
    all(DOUBLE_SET.into_iter().map(|(n, s)| records(&format!("({n},{s})"), &check_relations(&params(n, s), d.get(n, s)))).collect())
}

fn c6(d: &Doubles) -> Outcome {
    all(DOUBLE_SET.into_iter().map(|(n, s)| records(&format!("({n},{s})"), &check_coalgebra_formulas(&params(n, s), d.get(n, s)))).collect())
}

fn c7(d: &Doubles, opts: &CheckOptions) -> Outcome {
    all([(2, 1, 64), (3, 1, 729)]
        .into_iter()
        .map(|(n, s, dim)| {
            let p = params(n, s);
            let (q, mut recs) = build_qusl2(&p);
            if q.algebra.dim() != dim {
                return Err(format!("dim Q = {}", q.algebra.dim()));
            }
            recs.extend(psi_iso(&p, d.get(n, s), &q, opts));
            records(&format!("Ψ at dim {dim}"), &recs)
        })
        .collect())
}

fn c8(d: &Doubles, opts: &CheckOptions) -> Outcome {
    all([(2, 1), (3, 1)].into_iter().map(|(n, s)| records(&format!("D(A({n},{s}))"), &axioms(d.get(n, s), opts))).collect())
}

fn c9(opts: &CheckOptions) -> Outcome {
    let t = trivializing_twist(3, opts)?;
    for name in ["Φ_{J^{−1}} = 1⊗1⊗1", "Δ_{J^{−1}} coassociative"] {
        let r = t.records.iter().find(|r| r.name == name).ok_or(format!("missing record {name}"))?;
        if !r.passed() {
            return Err(format!("{name}: {:?}", r.witness));
        }
    }
    records("n = 3", &t.records)
}

fn c10() -> Outcome {
    let mut parts = Vec::new();
    for (n, s) in [(2, 1), (4, 1), (4, 2), (8, 2)] {
        let p = params(n, s);
        let chi = CharacterData::rho(&p)?;
        let (e, recs) = restrict_reassociator(&chi)?;
        records("restriction", &recs)?;
        if is_coboundary(&e).is_yes() {
            return Err(format!("({n},{s}) restriction is a coboundary"));
        }
        parts.push(format!("({n},{s}) not a coboundary on Z_{}", 2 * s));
    }
    for m in 1..=6usize {
        if !is_coboundary(&standard_cocycle(m, 0)).is_yes() {
            return Err(format!("standard({m},0) not certified"));
        }
        if let Some(i) = random_coboundaries(m, 100, 0x5eed).iter().position(|(_, db)| !is_coboundary(db).is_yes()) {
            return Err(format!("random db #{i} on Z_{m} not certified"));
        }
        for a in 0..m {
            let c = cocycle_class(&standard_cocycle(m, a as i64))?;
            if c != a {
                return Err(format!("class(standard({m},{a})) = {c}"));
            }
        }
    }
    parts.push("standard(m,0) and 600 random db certified, classes a for 0 ≤ a < m ≤ 6".into());
    Ok(parts.join("; "))
}

fn c11(d: &Doubles, opts: &CheckOptions) -> Outcome {
    let mut compared = 0;
    for order in 1..=12u32 {
        let h = CycloNum::root(order, 1);
        for total in 0..=12usize {
            for l in 0..=total {
                if let Some(v) = q_binomial_product(l, total - l, &h) {
                    if v != q_binomial(l, total - l, &h) {
                        return Err(format!("q-binomial ({l},{}) at order {order}", total - l));
                    }
                    compared += 1;
                }
            }
        }
    }
    for n in 2..=8i64 {
        for i in 0..3 * n {
            for j in 0..3 * n {
                if floor_frac(i + remainder(j, n), n) != floor_frac(i + j, n) - floor_frac(j, n) {
                    return Err(format!("floor identity at n={n} i={i} j={j}"));
                }
            }
        }
    }
    let exhaustive = CheckOptions { triple_limit: 1024, ..*opts };
    let mut assoc = Vec::new();
    for (n, s) in [(2, 1), (3, 1), (4, 2), (4, 1), (6, 3)] {
        let h = build_ansq(&params(n, s));
        assoc.push(records(&format!("A({n},{s})"), &[check_associativity(&h, h.generators(), &|i| h.label(i), &exhaustive)])?);
    }
    for (n, s) in [(2, 2), (2, 1), (3, 1), (4, 2)] {
        let (q, _) = build_qusl2(&params(n, s));
        let h = &q.algebra;
        let o = if h.dim() <= 128 { exhaustive } else { *opts };
        assoc.push(records(&format!("Q({n},{s})"), &[check_associativity(h, h.generators(), &|i| h.label(i), &o)])?);
    }
    for (n, s) in [(2, 1), (3, 1), (4, 2)] {
        let h = d.get(n, s);
        let o = if h.dim() <= 128 { exhaustive } else { *opts };
        assoc.push(records(&format!("D({n},{s})"), &[check_associativity(h, h.generators(), &|i| h.label(i), &o)])?);
    }
    for (n, s) in [(4, 1), (6, 3)] {
        let q = QuslAlgebra::new(&params(n, s));
        let r = sampled_associativity(&q, &|i| q.monomials.label(i), opts);
        assoc.push(records(&format!("Q({n},{s}) dim {} sampled", q.dim()), &[r])?);
    }
    Ok(format!("{compared} q-binomials, floor identity n ≤ 8, associativity: {}", assoc.join(", ")))
}

fn main() -> ExitCode {
    let opts = CheckOptions::default();
    let start = Instant::now();
    let mut failed = 0;
    let mut report = |k: usize, title: &str, budget: u64, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let out = f();
        let secs = t.elapsed().as_secs_f64();
        let over = if secs > budget as f64 { format!(" OVER BUDGET {budget} s") } else { String::new() };
        match out {
            Ok(detail) => println!("criterion {k:>2} PASS [{title}] {secs:.1} s{over}: {detail}"),
            Err(w) => {
                failed += 1;
                println!("criterion {k:>2} FAIL [{title}] {secs:.1} s: {w}");
            }
        }
    };
    report(1, "A(n,s,q) quasi-Hopf axioms", 300, &mut || c1(&opts));
    report(2, "duality A ≅ M*", 60, &mut c2);
    report(3, "M(n,s,q) Majid axioms", 120, &mut c3);
    let t = Instant::now();
    let doubles = Doubles {
        d21: build_ansq_double(&params(2, 1)).expect("D(2,1)"),
        d31: build_ansq_double(&params(3, 1)).expect("D(3,1)"),
        d42: build_ansq_double(&params(4, 2)).expect("D(4,2)"),
    };
    println!("built D(A) for (2,1), (3,1), (4,2) in {:.1} s", t.elapsed().as_secs_f64());
    report(4, "closed forms of γ, f, χ, ω", 120, &mut || c4(&doubles));
    report(5, "algebra relations in D(A)", 300, &mut || c5(&doubles));
    report(6, "coalgebra formulas in D(A)", 300, &mut || c6(&doubles));
    report(7, "Ψ: Q_s u_q(sl2) ≅ D(A)", 900, &mut || c7(&doubles, &opts));
    report(8, "D(A) quasi-Hopf axioms", 900, &mut || c8(&doubles, &opts));
    report(9, "trivializing twist at n = 3", 600, &mut || c9(&opts));
    report(10, "cohomological obstruction", 60, &mut c10);
    report(11, "oracle cross-checks", 600, &mut || c11(&doubles, &opts));
    println!("acceptance: {} of 11 criteria pass in {:.1} s", 11 - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
