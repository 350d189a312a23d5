//! Acceptance suite. One PASS/FAIL line per criterion; exits non-zero on any failure.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hasse::asymptotics::{delta_n, embed_constant_r1, embed_quads_lower_bound};
use hasse::brauer::{descends, embeds, is_restriction, restrict};
use hasse::census::{
    count_csa_table, count_division_table, count_embedding_quads, count_quat_with_subfields_table,
    dirichlet_coefficients, fundamental_discriminants, splitting_density,
};
use hasse::fields::make_field;
use hasse::geometry::{geodesic_from_field, length_from_trace, surface_census, surface_census_by_restriction, surface_prediction};
use hasse::rigidity::{limit_pair, quaternion_algebras_up_to, recognizing_bound};
use hasse::{PlaceQ, QuaternionAlgebraL, QuaternionAlgebraQ, SeriesSpec};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    check(t < limit, || format!("took {t:.1?}, limit {limit:?}"))
}

// Test-side arithmetic, kept apart from the library.

fn mobius_table(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut composite = vec![false; n + 1];
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        for k in (p..=n).step_by(p) {
            if k > p {
                composite[k] = true;
            }
            mu[k] = -mu[k];
        }
        if let Some(pp) = p.checked_mul(p) {
            for k in (pp..=n).step_by(pp) {
                mu[k] = 0;
            }
        }
    }
    mu
}

fn primes(n: usize) -> Vec<u64> {
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if sieve[p] {
            out.push(p as u64);
            for k in (p * p..=n).step_by(p) {
                sieve[k] = false;
            }
        }
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// (Δ/p) for a fundamental discriminant and a prime: 1 split, -1 inert, 0 ramified.
fn split_sign(d: i64, p: u64) -> i8 {
    if p == 2 {
        return match d.rem_euclid(8) {
            1 => 1,
            5 => -1,
            _ => 0,
        };
    }
    let a = d.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

fn place_splits(d: i64, v: PlaceQ) -> bool {
    match v {
        PlaceQ::Infinity => d > 0,
        PlaceQ::Finite(p) => split_sign(d, p) == 1,
    }
}

fn c1_division_n2() -> Outcome {
    let start = Instant::now();
    let xs: Vec<u64> = (0..50).map(|i| 10f64.powf(2.0 + 8.0 * i as f64 / 49.0).round() as u64).collect();
    let table = count_division_table(2, &xs, 4).map_err(|e| e.to_string())?;
    let mu = mobius_table(100_000);
    let mut sqfree = vec![0u64; mu.len()];
    for k in 1..mu.len() {
        sqfree[k] = sqfree[k - 1] + u64::from(mu[k] != 0);
    }
    for (x, c) in table.rows() {
        let want = sqfree[x.isqrt() as usize] - 1;
        check(c == want, || format!("x={x}: census {c}, squarefree oracle {want}"))?;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{} thresholds, {:.1?}", table.thresholds.len(), start.elapsed()))
}

fn c2_delta2() -> Outcome {
    let d = delta_n(2, 1_000_000).map_err(|e| e.to_string())?.value;
    check((d - 6.0 / (PI * PI)).abs() < 1e-4, || format!("delta_2 = {d}"))?;
    let c = count_division_table(2, &[10_000_000_000], 4).map_err(|e| e.to_string())?.counts[0];
    let ratio = c as f64 / (d * 1e5);
    check((0.98..=1.02).contains(&ratio), || format!("ratio {ratio}"))?;
    Ok(format!("delta_2 = {d:.8}, ratio at 1e10 = {ratio:.5}"))
}

fn c3_division_n3() -> Outcome {
    let start = Instant::now();
    let xs: Vec<u64> = (1..=20).map(|i| 10f64.powf(12.0 * i as f64 / 20.0).round() as u64).collect();
    // the direct count checks itself against inclusion–exclusion internally
    let div = count_division_table(3, &xs, 4).map_err(|e| e.to_string())?;
    let all = count_csa_table(3, 3, &xs, 4).map_err(|e| e.to_string())?;
    // μ(3)N_{1,3} + μ(1)N_{3,3}, with N_{1,3} = 1 (the matrix algebra)
    for ((x, d), a) in div.rows().zip(all.counts.iter()) {
        check(d + 1 == *a, || format!("x={x}: direct {d}, inclusion–exclusion {}", a - 1))?;
    }
    let d3 = delta_n(3, 1_000_000).map_err(|e| e.to_string())?.value;
    let x = 1e12f64;
    let ratio = *div.counts.last().unwrap() as f64 / (d3 * x.powf(1.0 / 6.0) * x.ln());
    check((0.5..=2.0).contains(&ratio), || format!("ratio {ratio}"))?;
    within(start, Duration::from_secs(300))?;
    Ok(format!("ratio at 1e12 = {ratio:.4}, {:.1?}", start.elapsed()))
}

fn c4_coefficients() -> Outcome {
    const N: u64 = 10_000;
    let xs: Vec<u64> = (1..=N).collect();
    let f = |ds: &[i64]| ds.iter().map(|&d| make_field(d).unwrap()).collect::<Vec<_>>();
    let cases: Vec<(&str, SeriesSpec, Vec<u64>)> = vec![
        ("csa(2,2)", SeriesSpec::Csa { m: 2, n: 2 }, count_csa_table(2, 2, &xs, 2).unwrap().counts),
        ("csa(3,3)", SeriesSpec::Csa { m: 3, n: 3 }, count_csa_table(3, 3, &xs, 2).unwrap().counts),
        ("embed([-4])", SeriesSpec::Embed { fields: vec![-4] }, count_quat_with_subfields_table(&f(&[-4]), &xs).unwrap().counts),
        ("embed([-3,5])", SeriesSpec::Embed { fields: vec![-3, 5] }, count_quat_with_subfields_table(&f(&[-3, 5]), &xs).unwrap().counts),
    ];
    for (name, spec, census) in cases {
        let coeffs = dirichlet_coefficients(&spec, N).map_err(|e| e.to_string())?;
        let mut sum = 0u64;
        for k in 1..=N as usize {
            sum += coeffs[k];
            check(sum == census[k - 1], || format!("{name}: N={k}: series {sum}, census {}", census[k - 1]))?;
        }
    }
    Ok("4 specs, every N ≤ 10^4".into())
}

fn c5_embedding_lower_bounds() -> Outcome {
    let mut notes = Vec::new();
    for s in ["2,inf", "2,3", "2,3,5,inf"] {
        let b: QuaternionAlgebraQ = s.parse().map_err(|e: hasse::Error| e.to_string())?;
        let frac = count_embedding_quads(&b, 1_000_000, false) as f64 / 1e6;
        let lb = embed_quads_lower_bound(&b);
        check(frac >= lb - 0.002, || format!("{{{s}}}: {frac} < {lb} - 0.002"))?;
        notes.push(format!("{{{s}}} {frac:.4}≥{lb:.4}"));
    }
    Ok(notes.join(", "))
}

fn c6_subfield_count() -> Outcome {
    let l = make_field(-4).unwrap();
    let c = count_quat_with_subfields_table(&[l], &[100_000_000]).map_err(|e| e.to_string())?.counts[0];
    let k = embed_constant_r1(&l, 1_000_000).map_err(|e| e.to_string())?.value;
    let pred = k * 1e4 / 1e8f64.ln().sqrt();
    let ratio = c as f64 / pred;
    check((0.7..=1.3).contains(&ratio), || format!("count {c}, predicted {pred}, ratio {ratio}"))?;
    Ok(format!("count {c}, ratio {ratio:.4}"))
}

fn c7_wood() -> Outcome {
    let (s, _, r) = splitting_density(PlaceQ::Infinity, 1_000_000).map_err(|e| e.to_string())?.fractions();
    check((s - 0.5).abs() <= 0.005 && (r - 0.5).abs() <= 0.005, || format!("real place: split {s}, ramified {r}"))?;
    let mut notes = vec![format!("∞ {s:.4}/{r:.4}")];
    for p in [3, 5, 7] {
        let (s, i, _) = splitting_density(PlaceQ::Finite(p), 1_000_000).map_err(|e| e.to_string())?.fractions();
        check((s - i).abs() < 0.005, || format!("p={p}: split {s}, inert {i}"))?;
        notes.push(format!("{p}: {:.4}", (s - i).abs()));
    }
    Ok(notes.join(", "))
}

fn c8_theta() -> Outcome {
    const X: usize = 1_000_000;
    let lib = hasse::rigidity::theta_bound_check(X as u64).map_err(|e| e.to_string())?;
    check(lib.violations == 0, || format!("{} violations reported", lib.violations))?;
    let ps = primes(X);
    let mut theta = 0.0f64;
    let mut idx = 0;
    let mut worst = 0.0f64;
    for x in 2..=X {
        while idx < ps.len() && ps[idx] as usize <= x {
            theta += (ps[idx] as f64).ln();
            idx += 1;
        }
        if x > 2 {
            let xf = x as f64;
            let bound = 21.0 * xf / xf.ln().powi(3) + xf;
            check(theta <= bound + 1e-9, || format!("θ({x}) = {theta} > {bound}"))?;
            worst = worst.max(theta / bound);
        }
    }
    Ok(format!("max θ/bound = {worst:.5}"))
}

fn c9_lengths() -> Outcome {
    let mut n = 0;
    for d in fundamental_discriminants(10_000).into_iter().filter(|&d| d > 0) {
        let g = geodesic_from_field(d).map_err(|e| e.to_string())?;
        let t = g.trace_length().map_err(|e| e.to_string())?;
        check((g.length - t).abs() <= 1e-9 * g.length.max(1.0), || format!("Δ={d}: unit {} vs trace {t}", g.length))?;
        n += 1;
    }
    let l3 = length_from_trace(3.0).map_err(|e| e.to_string())?;
    check((l3 - 1.924847300).abs() < 5e-10, || format!("length_from_trace(3) = {l3}"))?;
    Ok(format!("{n} real fields, ℓ(3) = {l3:.10}"))
}

fn c10_brauer() -> Outcome {
    let start = Instant::now();
    let discs: Vec<i64> = fundamental_discriminants(500);
    let algebras = quaternion_algebras_up_to(100_000_000);
    let mut pairs = 0u64;
    for d in &discs {
        let l = make_field(*d).unwrap();
        for b in &algebras {
            let e = embeds(&l, b);
            let r = restrict(b, &l);
            let direct = !b.ram().iter().any(|&v| place_splits(*d, v));
            check(e == r.is_split() && e == direct, || format!("Δ={d}, B={{{b}}}: embeds {e}, restriction split {}, direct {direct}", r.is_split()))?;
            let rec = descends(&r).ok_or_else(|| format!("Δ={d}, B={{{b}}}: restriction does not descend"))?;
            let want: BTreeSet<u64> = b.finite_primes().filter(|&p| split_sign(*d, p) == 1).collect();
            check(rec.split_primes == want, || format!("Δ={d}, B={{{b}}}: descent primes {:?}, want {want:?}", rec.split_primes))?;
            check(is_restriction(b, &l, &r), || format!("Δ={d}, B={{{b}}}: not a restriction of itself"))?;
            pairs += 1;
        }
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("{pairs} pairs, {:.1?}", start.elapsed()))
}

fn c11_scan() -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = hasse_cli::run_with(
        ["hasse", "rigidity", "scan", "--x", "1e4", "--delta-max", "1e6", "--format", "json"],
        &mut out,
        &mut err,
    );
    check(code == 0, || format!("exit code {code}: {}", String::from_utf8_lossy(&err)))?;
    let v: serde_json::Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    let n = v["algebras"].as_u64().ok_or("missing algebras")?;
    let entries = v["entries"].as_array().ok_or("missing entries")?;
    check(entries.len() as u64 == n * (n - 1) / 2, || format!("{} entries for {n} algebras", entries.len()))?;
    let max = v["max_minimal_delta"].as_u64().ok_or("missing max")?;
    check(max <= 1_000_000, || format!("max |Δ| {max}"))?;
    let bound = recognizing_bound(1, 1, 1e4).map_err(|e| e.to_string())?.value;
    check((max as f64).log10() <= bound.log10, || format!("max |Δ| {max} above the bound 10^{}", bound.log10))?;
    Ok(format!("{n} algebras, {} pairs, max |Δ| = {max}", entries.len()))
}

fn c12_limit_pairs() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for m in 2..=13u64 {
        let p = limit_pair(m).map_err(|e| e.to_string())?;
        check(p.disc1 != p.disc2 && p.disc1 < 0 && p.disc2 < 0, || format!("m={m}: bad pair {p:?}"))?;
        for q in primes(m as usize) {
            check(split_sign(p.disc1, q) == split_sign(p.disc2, q), || format!("m={m}: types differ at {q}"))?;
        }
        for w in p.witnesses {
            check(w > m && split_sign(p.disc1, w) == 1 && split_sign(p.disc2, w) == -1, || format!("m={m}: bad witness {w}"))?;
        }
        notes.push(format!("{m}:{}", p.disc2));
    }
    within(start, Duration::from_secs(60))?;
    Ok(notes.join(" "))
}

fn c13_surfaces() -> Outcome {
    let x = 100_000_000u64;
    let bl = QuaternionAlgebraL::parse(make_field(-4).unwrap(), "5.1,5.2").map_err(|e| e.to_string())?;
    let census: Vec<QuaternionAlgebraQ> =
        surface_census(&bl, x, 1.0, 1.0).map_err(|e| e.to_string())?.into_iter().map(|e| e.b0).collect();
    let other = surface_census_by_restriction(&bl, x);
    let (a, b): (BTreeSet<_>, BTreeSet<_>) = (census.iter().collect(), other.iter().collect());
    check(a == b, || format!("descent gives {}, restriction gives {}", a.len(), b.len()))?;
    let pred = surface_prediction(&bl, x as f64, 1_000_000).map_err(|e| e.to_string())?;
    let ratio = census.len() as f64 / pred;
    check((0.6..=1.4).contains(&ratio), || format!("count {}, predicted {pred}, ratio {ratio}", census.len()))?;
    Ok(format!("{} surfaces, ratio {ratio:.4}", census.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("quaternion census exactness", c1_division_n2),
        ("delta_2 reproduction", c2_delta2),
        ("n=3 identity and growth", c3_division_n3),
        ("dirichlet coefficient oracle", c4_coefficients),
        ("embedding-count lower bound", c5_embedding_lower_bounds),
        ("subfield-constrained count", c6_subfield_count),
        ("splitting densities", c7_wood),
        ("theta bound", c8_theta),
        ("length dictionary", c9_lengths),
        ("brauer equivalences and descent", c10_brauer),
        ("rigidity scan", c11_scan),
        ("limit pairs", c12_limit_pairs),
        ("surface census cross-check", c13_surfaces),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|a| a == &id.to_string()) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(note) => println!("PASS {id:>2} {name}: {note}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
