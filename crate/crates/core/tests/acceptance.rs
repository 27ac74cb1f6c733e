//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use dga_core::bar::{loop_betti, BarComplex};
use dga_core::coalgebra::DGCoalgebra;
use dga_core::cobar::{counit_alpha, CobarComplex};
use dga_core::complex::convolve;
use dga_core::hochschild::{free_loop_betti, HochschildComplex};
use dga_core::kraines::families::closed_form_degrees;
use dga_core::kraines::session::{run_session, SessionConfig, StartKind};
use dga_core::random::random_suite;
use dga_core::reduction::{base_change, bockstein_over_z};
use dga_core::simplicial::{cochain_algebra, SimplicialComplex};
use dga_core::uct::uct_split;
use dga_core::{presets, DGAlgebra, RingTag, Vector};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const PRIMES: [u64; 3] = [2, 3, 5];

fn fp(a: &DGAlgebra, p: u64) -> Result<DGAlgebra, String> {
    base_change(a, RingTag::field(p).map_err(|e| e.to_string())?).map_err(|e| e.to_string())
}

fn preset(e: &str) -> Result<DGAlgebra, String> {
    presets::parse_preset(e).map_err(|e| e.to_string())
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

macro_rules! tri {
    ($e:expr) => {
        $e.map_err(|e| e.to_string())?
    };
}

// ---------------------------------------------------------------------------
// Independent oracles

/// Dense Hochschild complex A ⊗ T(sĀ) over F_p for a small algebra given by
/// degrees, a multiplication table and a differential, element 0 the unit.
struct DenseAlgebra {
    p: i64,
    deg: Vec<usize>,
    mul: Vec<Vec<Vec<i64>>>,
    d: Vec<Vec<i64>>,
}

impl DenseAlgebra {
    /// Λ(x_n): basis 1, x with x² = 0.
    fn exterior(n: usize, p: i64) -> Self {
        DenseAlgebra {
            p,
            deg: vec![0, n],
            mul: vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![0, 0]]],
            d: vec![vec![0, 0]; 2],
        }
    }

    fn dim(&self) -> usize {
        self.deg.len()
    }
}

fn pw(e: usize) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn brute_free_loop(a: &DenseAlgebra, top: usize) -> Vec<usize> {
    let n = a.dim();
    let letters: Vec<usize> = (1..n).collect();
    // tails of suspended degree ≤ top + 1
    let mut tails: Vec<Vec<usize>> = vec![vec![]];
    let mut i = 0;
    while i < tails.len() {
        let t = tails[i].clone();
        let s: usize = t.iter().map(|&l| a.deg[l] - 1).sum();
        for &l in &letters {
            if s + a.deg[l] - 1 <= top + 1 {
                let mut t2 = t.clone();
                t2.push(l);
                tails.push(t2);
            }
        }
        i += 1;
    }
    let hdeg = |h: usize, t: &[usize]| a.deg[h] + t.iter().map(|&l| a.deg[l] - 1).sum::<usize>();
    let mut by_deg: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); top + 3];
    for t in &tails {
        for h in 0..n {
            let d = hdeg(h, t);
            if d <= top + 2 {
                by_deg[d].push((h, t.clone()));
            }
        }
    }
    let index: Vec<HashMap<(usize, Vec<usize>), usize>> =
        by_deg.iter().map(|ws| ws.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect()).collect();

    // D(a0 ⊗ [w1|…|wk])
    let diff = |h: usize, t: &[usize]| -> Vec<((usize, Vec<usize>), i64)> {
        let mut out = Vec::new();
        let da = a.deg[h];
        for (y, &c) in a.d[h].iter().enumerate() {
            if c != 0 {
                out.push(((y, t.to_vec()), c));
            }
        }
        let mut eps = 0;
        for i in 0..t.len() {
            for (y, &c) in a.d[t[i]].iter().enumerate() {
                if c != 0 {
                    let mut t2 = t.to_vec();
                    t2[i] = y;
                    out.push(((h, t2), -pw(eps) * pw(da) * c));
                }
            }
            if i >= 1 {
                for (y, &c) in a.mul[t[i - 1]][t[i]].iter().enumerate() {
                    if c != 0 {
                        let mut t2 = t[..i - 1].to_vec();
                        t2.push(y);
                        t2.extend_from_slice(&t[i + 1..]);
                        out.push(((h, t2), pw(eps) * pw(da) * c));
                    }
                }
            }
            eps += a.deg[t[i]] - 1;
        }
        if let Some((&w0, rest)) = t.split_first() {
            for (y, &c) in a.mul[h][w0].iter().enumerate() {
                if c != 0 {
                    out.push(((y, rest.to_vec()), pw(da) * c));
                }
            }
            let (&wl, init) = t.split_last().unwrap();
            let e = (a.deg[wl] + 1) * (da + init.iter().map(|&l| a.deg[l]).sum::<usize>() + t.len() - 1);
            for (y, &c) in a.mul[wl][h].iter().enumerate() {
                if c != 0 {
                    out.push(((y, init.to_vec()), -pw(e) * c));
                }
            }
        }
        out
    };

    let rank = |rows: Vec<Vec<i64>>| -> usize {
        let p = a.p;
        let mut m: Vec<Vec<i64>> = rows.into_iter().map(|r| r.into_iter().map(|x| x.rem_euclid(p)).collect()).collect();
        let cols = m.first().map_or(0, Vec::len);
        let mut r = 0;
        for c in 0..cols {
            let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
            m.swap(r, piv);
            let inv = (1..p).find(|x| x * m[r][c] % p == 1).unwrap();
            for x in m[r].iter_mut() {
                *x = *x * inv % p;
            }
            let pivot = m[r].clone();
            for (i, row) in m.iter_mut().enumerate() {
                if i != r && row[c] != 0 {
                    let f = row[c];
                    for (x, y) in row.iter_mut().zip(&pivot) {
                        *x = (*x - f * y).rem_euclid(p);
                    }
                }
            }
            r += 1;
        }
        r
    };
    let matrix_rank = |d: usize| -> usize {
        let (src, tgt) = (&by_deg[d], &by_deg[d + 1]);
        if src.is_empty() || tgt.is_empty() {
            return 0;
        }
        let rows = src
            .iter()
            .map(|(h, t)| {
                let mut row = vec![0i64; tgt.len()];
                for (w, c) in diff(*h, t) {
                    let i = index[d + 1][&w];
                    row[i] += c;
                }
                row
            })
            .collect();
        rank(rows)
    };
    let ranks: Vec<usize> = (0..=top).map(matrix_rank).collect();
    (0..=top).map(|d| by_deg[d].len() - ranks[d] - if d > 0 { ranks[d - 1] } else { 0 }).collect()
}

/// Number of compositions of n into parts 1 and 2.
fn fibonacci_counts(top: usize) -> Vec<usize> {
    let mut f = vec![1usize, 1];
    while f.len() <= top {
        let k = f.len();
        f.push(f[k - 1] + f[k - 2]);
    }
    f.truncate(top + 1);
    f
}

// ---------------------------------------------------------------------------
// Criteria

fn structural_exactness() -> Outcome {
    let n = 10;
    let mut algebras: Vec<(String, DGAlgebra)> = [
        "sphere(2)",
        "sphere(3)",
        "sphere(4)",
        "wedge(2,3)",
        "moore(2,2)",
        "moore(3,2)",
        "moore(5,3)",
        "truncated_poly(2,3)",
        "truncated_poly(3,3)",
        "exterior(3,5)",
        "tensor(truncated_poly(2,2),exterior(3))",
    ]
    .iter()
    .map(|e| Ok((e.to_string(), preset(e)?)))
    .collect::<Result<_, String>>()?;
    algebras.extend(tri!(random_suite(20_240_601, 20)).into_iter().enumerate().map(|(i, (w, a))| (format!("random #{i} ({w})"), a)));
    let mut words = 0usize;
    for (name, a) in &algebras {
        let bar = tri!(BarComplex::new(a, n));
        let r = bar.check_invariants();
        ensure(r.all_passed(), || format!("{name}: bar {r:?}"))?;
        words += bar.dims().iter().sum::<usize>();
        let cobar = tri!(CobarComplex::new(&tri!(DGCoalgebra::dual_of(a)), n));
        let c = cobar.check_square_zero();
        ensure(c.passed, || format!("{name}: cobar {c:?}"))?;
        words += c.checked;
        let h = tri!(HochschildComplex::new(a, n));
        let r = h.check_invariants();
        let dd = r.get("hochschild D^2 = 0").ok_or("missing D^2 check")?;
        ensure(dd.passed, || format!("{name}: {dd:?}"))?;
        words += dd.checked;
    }
    Ok(format!("{} algebras, {words} word checks over Z", algebras.len()))
}

fn adjunction_counit() -> Outcome {
    let mut cases = 0;
    for p in PRIMES {
        for e in ["sphere(2)", "sphere(3)", "moore(PRIME,2)"] {
            let e = e.replace("PRIME", &p.to_string());
            let r = tri!(counit_alpha(&fp(&preset(&e)?, p)?, 8));
            ensure(r.is_quasi_isomorphism(), || format!("{e} mod {p}: {r:?}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} algebras, degrees <= 8"))
}

fn loop_tables() -> Outcome {
    let top = 12;
    for p in PRIMES {
        let k = tri!(RingTag::field(p));
        for m in [2usize, 3, 4] {
            let n = m - 1;
            let got = tri!(loop_betti(&fp(&presets::sphere(m).map_err(|e| e.to_string())?, p)?, top)).dims;
            let (cobar, _) = tri!(tri!(CobarComplex::new(&DGCoalgebra::sphere_homology(m, k), top)).cohomology("cobar"));
            let words: Vec<usize> = (0..=top).map(|d| usize::from(d % n == 0)).collect();
            ensure(got[..=top] == words[..] && cobar.dims[..=top] == words[..], || {
                format!("sphere({m}) mod {p}: bar {got:?} cobar {:?} words {words:?}", cobar.dims)
            })?;
        }
    }
    Ok("9 tables through degree 12 agree with cobar and word count".into())
}

fn wedge_growth() -> Outcome {
    let top = 12;
    let fib = fibonacci_counts(top);
    for p in PRIMES {
        let got = tri!(loop_betti(&fp(&tri!(presets::moore(p, 2)), p)?, top)).dims;
        ensure(got[..=top] == fib[..], || format!("moore({p},2): {got:?} vs {fib:?}"))?;
    }
    Ok(format!("{fib:?}"))
}

fn free_loop_tables() -> Outcome {
    let top = 12;
    let expected: Vec<usize> = (0..=top).map(|d| usize::from(d != 1)).collect();
    for p in PRIMES {
        let got = tri!(free_loop_betti(&fp(&preset("exterior(3)")?, p)?, top)).dims;
        let brute = brute_free_loop(&DenseAlgebra::exterior(3, p as i64), top);
        ensure(got[..=top] == expected[..] && brute == expected, || format!("mod {p}: library {got:?} brute {brute:?}"))?;
        // negative control: one generator, bounded
        let s2 = tri!(free_loop_betti(&fp(&preset("truncated_poly(2,2)")?, p)?, top)).dims;
        let brute2 = brute_free_loop(&DenseAlgebra::exterior(2, p as i64), top);
        ensure(s2[..=top] == brute2[..] && s2.iter().all(|&d| d <= 2), || format!("control mod {p}: {s2:?} vs {brute2:?}"))?;
    }
    Ok(format!("{expected:?}; one-generator controls bounded by 2"))
}

fn two_generator_growth() -> Outcome {
    let p = 3;
    let a = fp(&preset("tensor(truncated_poly(2,2),exterior(3))")?, p)?;
    let got = tri!(free_loop_betti(&a, 12)).dims;
    let x = tri!(free_loop_betti(&fp(&preset("truncated_poly(2,2)")?, p)?, 12)).dims;
    let y = tri!(free_loop_betti(&fp(&preset("exterior(3)")?, p)?, 12)).dims;
    let oracle = convolve(&x, &y);
    ensure(got[..=12] == oracle[..=12], || format!("library {got:?} vs Kunneth {oracle:?}"))?;
    let (m6, m12) = (got[..=6].iter().max().copied(), got[..=12].iter().max().copied());
    ensure(m6 < m12, || format!("max through 6 = {m6:?}, through 12 = {m12:?}"))?;
    Ok(format!("{got:?}; max {} -> {}", m6.unwrap_or(0), m12.unwrap_or(0)))
}

fn uct_witness() -> Outcome {
    for p in PRIMES {
        let z = tri!(presets::moore(p, 2));
        let split = tri!(uct_split(&z, p, 3));
        let h1 = &split.degrees[2].h1;
        ensure(h1.len() == 1, || format!("p = {p}: H1^2 has {} witnesses", h1.len()))?;
        let w = &h1[0];
        let k = tri!(RingTag::field(p));
        let (u, v) = (Vector::single(1), Vector::single(2));
        let proportional = |x: &Vector, y: &Vector| x.len() == 1 && x.keys().eq(y.keys()) && !x.reduced(k).is_zero();
        ensure(w.eps == 1 && proportional(&w.b_hat, &u) && proportional(&w.a_hat, &v), || format!("p = {p}: {w:?}"))?;
        ensure(tri!(w.verify(&z, p)), || format!("p = {p}: witness does not verify"))?;
        let beta = tri!(bockstein_over_z(&z, p, 1, &u));
        ensure(beta == v.reduced(k), || format!("p = {p}: beta(u) = {beta:?}"))?;
    }
    Ok("witness (u, v, 1), beta(red u) = red v for p = 2, 3, 5".into())
}

fn kraines_families() -> Outcome {
    let n = 5;
    for p in PRIMES {
        let z = tri!(presets::moore(p, 2));
        let s = tri!(run_session(&z, &format!("moore({p},2)"), &SessionConfig::new(p, n)));
        ensure(s.start.kind == StartKind::TorsionImage, || format!("p = {p}: start {:?}", s.start.kind))?;
        let a = s.a_family.as_ref().ok_or_else(|| format!("p = {p}: no a-family ({:?})", s.skipped))?;
        ensure(a.family.identities_hold() && a.family.all_nonzero() && a.family.members.len() == n, || format!("p = {p}: {a:?}"))?;
        let y = s.y_family.as_ref().ok_or_else(|| format!("p = {p}: no y-family ({:?})", s.skipped))?;
        ensure(y.all_pass() && y.members.len() == n, || format!("p = {p}: {}", s.to_text(&z)))?;
        for m in &y.members {
            ensure(closed_form_degrees(3, 2, m.n) == (m.y_degree, m.x_degree), || format!("p = {p}: degrees of y({})", m.n))?;
        }
    }
    Ok(format!("a(n), y(n), x(n) for n <= {n}, p = 2, 3, 5"))
}

fn cup_one_and_correction() -> Outcome {
    let mut detail = Vec::new();
    for p in [3u64, 5] {
        let k = tri!(SimplicialComplex::moore_space(p));
        let z = tri!(cochain_algebra(&k, RingTag::Integers));
        let (c6, c7) = z.check_cup_one();
        ensure(c6.passed && c7.passed, || format!("p = {p}: {c6:?} {c7:?}"))?;
        let s = tri!(run_session(&z, "moore-space", &SessionConfig::new(p, p as usize + 1)));
        let c = s.correction.as_ref().ok_or_else(|| format!("p = {p}: no correction sequence ({:?})", s.skipped))?;
        ensure(c.identity.len() >= 3 && c.all_pass(), || format!("p = {p}: {:?} certified {}", c.identity, c.bockstein_certified))?;
        let b = s.b_sequence.as_ref().ok_or_else(|| format!("p = {p}: no b-sequence"))?;
        ensure(b.all_pass(), || format!("p = {p}: b-sequence {:?}", b.predicted))?;
        detail.push(format!("p={p}: {} + {} tuples, X through n={}", c6.checked, c7.checked, c.identity.len()));
    }
    Ok(detail.join("; "))
}

fn z_cycles() -> Outcome {
    let n = 4;
    let mut count = 0;
    for p in PRIMES {
        let z = tri!(presets::moore(p, 2));
        let s = tri!(run_session(&z, &format!("moore({p},2)"), &SessionConfig::new(p, n)));
        let r = s.z_cycles.as_ref().ok_or_else(|| format!("p = {p}: no cycle report ({:?})", s.skipped))?;
        ensure(r.verdicts.len() == 1 + 2 * n + n * n, || format!("p = {p}: {} verdicts", r.verdicts.len()))?;
        ensure(r.all_cycles(), || format!("p = {p}: {:?}", r.verdicts.iter().filter(|v| !v.cycle).collect::<Vec<_>>()))?;
        count += r.verdicts.len();
    }
    Ok(format!("{count} cycles incl. shuffles z(r,s), r,s <= {n}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("structural exactness of bar, cobar and Hochschild differentials", structural_exactness),
        ("adjunction counit is a quasi-isomorphism", adjunction_counit),
        ("loop-space tables of one-cell algebras", loop_tables),
        ("wedge growth on the Moore model", wedge_growth),
        ("free-loop tables with brute-force oracle", free_loop_tables),
        ("two-generator free-loop growth", two_generator_growth),
        ("UCT split and Bockstein witness", uct_witness),
        ("Kraines word families", kraines_families),
        ("cup-one identities and correction sequence", cup_one_and_correction),
        ("free-loop cycles from the families", z_cycles),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(d) => println!("criterion {:>2}: PASS  {title} [{d}] ({secs:.1}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {title}: {e} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
