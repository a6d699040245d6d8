//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Numeric comparisons are exact (tolerance 0). Time budgets are wall-clock
//! limits on the criterion body, measured in whatever profile the suite is
//! built with.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fusionwb::corpus::{bundled, corpus_check};
use fusionwb::files::{self, MemorySource};
use fusionwb::fusion::{fusion_equal, FusionSystem, SaturationWitness};
use fusionwb::group::Group;
use fusionwb::models::sample::{random_pinch_free_word, random_word};
use fusionwb::models::{hnn_presentation, recover_fusion, robinson_presentation, validate_alperin_datum};
use fusionwb::stable::{poincare_series, quillen_limit_finite_group, stable_basis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn(&MemorySource) -> Outcome,
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(x: impl std::fmt::Display) -> String {
    x.to_string()
}

fn group(src: &MemorySource, file: &str) -> Result<Group, String> {
    files::load_group(src, file).map_err(e)
}

fn transporter(src: &MemorySource, file: &str, p: u32) -> Result<(Group, FusionSystem), String> {
    let g = group(src, file)?;
    let s = g.sylow(p).map_err(e)?;
    let f = FusionSystem::from_group(&g, &s, p).map_err(e)?;
    Ok((g, f))
}

fn saturation_of_transporters(src: &MemorySource) -> Outcome {
    let pairs = [("c2.grp", 2), ("a4.grp", 2), ("s4.grp", 2), ("sl23.grp", 2), ("s3.grp", 3)];
    let mut seen = Vec::new();
    for (file, p) in pairs {
        let (g, f) = transporter(src, file, p)?;
        let report = f.saturation();
        check(report.saturated, || format!("F_S({}) reported: {report}", g.name()))?;
        seen.push(format!("{}<={}", f.base().name(), g.name()));
    }
    Ok(format!("saturated: {}", seen.join(", ")))
}

fn sylow_witness_on_v4(src: &MemorySource) -> Outcome {
    let loaded = files::load_fusion(src, "v4_inv.fus").map_err(e)?;
    let report = loaded.fusion.saturation();
    let s = loaded.group.whole();
    let expected = vec![SaturationWitness::SylowFailure { subgroup: s, aut_s: 1, aut_f: 2 }];
    check(!report.saturated && report.witnesses == expected, || format!("got {report}"))?;
    Ok(report.witnesses[0].to_string())
}

fn hnn_realizes_c3_inversion(src: &MemorySource) -> Outcome {
    let loaded = files::load_fusion(src, "c3_inv.fus").map_err(e)?;
    let target = FusionSystem::generate(loaded.group.clone(), 3, &loaded.generators).map_err(e)?;
    let m = hnn_presentation(loaded.group.clone(), 3, &loaded.generators).map_err(e)?;
    let recovered = recover_fusion(&m, 2).map_err(e)?;
    check(fusion_equal(&recovered, &target).map_err(e)?, || "radius-2 recovery differs from the generated system".into())?;
    let letters: Vec<_> = loaded.group.elements().map(|x| m.base_letter(x)).collect::<Result<_, _>>().map_err(e)?;
    for (i, u) in letters.iter().enumerate() {
        for v in &letters[..i] {
            check(!m.words_equal(u, v).map_err(e)?, || format!("{} = {}", m.format_word(u), m.format_word(v)))?;
        }
    }
    Ok(format!("fusion_equal at radius 2; {} base letters pairwise distinct", letters.len()))
}

fn robinson_realizes_s4(src: &MemorySource) -> Outcome {
    let datum = files::load_datum(src, "d8_s4.datum").map_err(e)?;
    let report = validate_alperin_datum(&datum);
    check(report.is_valid(), || report.to_string())?;
    let (_, independent) = transporter(src, "s4.grp", 2)?;
    let m = robinson_presentation(&datum).map_err(e)?;
    let recovered = recover_fusion(&m, 3).map_err(e)?;
    // The two systems live on different copies of D8; compare on the datum's base
    // after checking the copies have identical tables.
    check(
        independent.base().elements().all(|x| independent.base().row(x) == datum.fusion().base().row(x)),
        || "Sylow of S4 and the datum base have different tables".into(),
    )?;
    let independent = FusionSystem::generate(
        datum.fusion().base().clone(),
        2,
        &independent.all_morphisms().into_iter().collect::<Vec<_>>(),
    )
    .map_err(e)?;
    check(fusion_equal(&recovered, &independent).map_err(e)?, || "amalgam recovery differs from F_D8(S4)".into())?;
    Ok(format!("datum valid; {} relators; radius 3 recovers F_D8(S4)", m.relators().len()))
}

/// Substitutes `x -> a x + b y`, `y -> c x + d y` into every degree-`d`
/// monomial of `F_2[x, y]`. A degree-`d` polynomial is a bitmask whose bit `i`
/// is the coefficient of `x^i y^(d-i)`; entry `i` is the image of that monomial.
fn substitution_columns(m: [[u8; 2]; 2], d: usize) -> Vec<u64> {
    let clmul = |a: u64, b: u64| (0..64).filter(|i| a >> i & 1 == 1).fold(0u64, |acc, i| acc ^ (b << i));
    let px = (m[0][0] as u64) << 1 | m[0][1] as u64;
    let py = (m[1][0] as u64) << 1 | m[1][1] as u64;
    (0..=d)
        .map(|i| {
            let xs = (0..i).fold(1u64, |acc, _| clmul(acc, px));
            (0..d - i).fold(xs, |acc, _| clmul(acc, py))
        })
        .collect()
}

fn f2_rank(mut rows: Vec<u64>) -> usize {
    let mut rank = 0;
    for bit in 0..64 {
        if rank == rows.len() {
            break;
        }
        if let Some(pos) = rows[rank..].iter().position(|r| r >> bit & 1 == 1) {
            rows.swap(rank, rank + pos);
            let pivot = rows[rank];
            for (j, r) in rows.iter_mut().enumerate() {
                if j != rank && *r >> bit & 1 == 1 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Dimension of the degree-`d` polynomials fixed by every generator: the
/// kernel of the stacked maps `g - 1`, one concatenated column per monomial.
fn invariant_dimension(generators: &[[[u8; 2]; 2]], d: usize) -> usize {
    let columns: Vec<Vec<u64>> = generators.iter().map(|&g| substitution_columns(g, d)).collect();
    let stacked = (0..=d)
        .map(|i| {
            columns
                .iter()
                .enumerate()
                .fold(0u64, |acc, (j, col)| acc | (col[i] ^ 1u64 << i) << (j * (d + 1)))
        })
        .collect();
    d + 1 - f2_rank(stacked)
}

fn dickson_series(max: usize) -> Vec<usize> {
    (0..=max).map(|d| (0..=d / 3).filter(|j| (d - 3 * j) % 2 == 0).count()).collect()
}

fn molien_c3_series(max: usize) -> Vec<usize> {
    (0..=max)
        .map(|d| {
            let twisted: i64 = [1, -1, 0][d % 3];
            ((d as i64 + 1 + 2 * twisted) / 3) as usize
        })
        .collect()
}

fn stable_vs_invariants(src: &MemorySource) -> Outcome {
    const D: usize = 12;
    let gl2 = files::load_fusion(src, "v4_gl2.fus").map_err(e)?;
    let ours = poincare_series(&gl2.fusion, D).map_err(e)?;
    let brute: Vec<usize> = (0..=D).map(|d| invariant_dimension(&[[[0, 1], [1, 0]], [[1, 1], [0, 1]]], d)).collect();
    check(ours == brute, || format!("GL2: stable {ours:?} vs invariants {brute:?}"))?;
    check(ours == dickson_series(D), || format!("GL2: stable {ours:?} vs Dickson {:?}", dickson_series(D)))?;
    let (_, a4) = transporter(src, "a4.grp", 2)?;
    let c3 = poincare_series(&a4, D).map_err(e)?;
    let brute: Vec<usize> = (0..=D).map(|d| invariant_dimension(&[[[0, 1], [1, 1]]], d)).collect();
    check(c3 == brute, || format!("C3: stable {c3:?} vs invariants {brute:?}"))?;
    check(c3 == molien_c3_series(D), || format!("C3: stable {c3:?} vs Molien {:?}", molien_c3_series(D)))?;
    let fmt = |s: &[usize]| s.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    Ok(format!("GL2 {} ; C3 {}", fmt(&ours), fmt(&c3)))
}

fn quillen_vs_fusion(src: &MemorySource) -> Outcome {
    for file in ["a4.grp", "s4.grp"] {
        let (g, f) = transporter(src, file, 2)?;
        for d in 0..=12 {
            let (q, _) = quillen_limit_finite_group(&g, 2, d).map_err(e)?;
            let s = stable_basis(&f, d).map_err(e)?.len();
            check(q == s, || format!("{} degree {d}: Quillen {q} vs fusion {s}", g.name()))?;
        }
    }
    Ok("A4 and S4 agree in degrees 0..=12".into())
}

fn nilpotence_on_c3xc3(src: &MemorySource) -> Outcome {
    let loaded = files::load_fusion(src, "c3xc3_triv.fus").map_err(e)?;
    let (mut nil, mut non) = (0, 0);
    for d in 0..=8 {
        for f in stable_basis(&loaded.fusion, d).map_err(e)? {
            if f.is_nilpotent().map_err(e)? {
                check(f.pow(3).is_zero(), || format!("degree {d}: nilpotent family with f^3 != 0:\n{f}"))?;
                nil += 1;
            } else {
                check(
                    f.components().iter().any(|c| !c.polynomial_part().is_zero()),
                    || format!("degree {d}: non-nilpotent family without polynomial part"),
                )?;
                non += 1;
            }
        }
    }
    Ok(format!("{nil} nilpotent, {non} non-nilpotent basis families in degrees 0..=8"))
}

fn britton_properties(src: &MemorySource) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let models = ["v4_rho.fus", "d8_s4.fus", "c3_inv.fus", "v4_gl2.fus"]
        .iter()
        .map(|file| {
            let l = files::load_fusion(src, file).map_err(e)?;
            hnn_presentation(l.group.clone(), l.fusion.p(), &l.generators).map_err(e)
        })
        .collect::<Result<Vec<_>, _>>()?;
    for i in 0..1000 {
        let m = &models[i % models.len()];
        let w = random_pinch_free_word(m, &mut rng, 6).map_err(e)?;
        check(!m.is_identity(&w).map_err(e)?, || format!("pinch-free word {} is trivial", m.format_word(&w)))?;
        let r = m.reduce_word(&w).map_err(e)?;
        check(m.reduce_word(&r).map_err(e)? == r, || "reduce_word not idempotent".into())?;
    }
    for i in 0..1000 {
        let m = &models[i % models.len()];
        let len = rng.random_range(1..=16);
        let u = random_word(m, &mut rng, len);
        let w = u.concat(&u.inverse());
        check(m.is_identity(&w).map_err(e)?, || format!("{} is not trivial", m.format_word(&w)))?;
        for x in [&u, &w] {
            let r = m.reduce_word(x).map_err(e)?;
            check(m.reduce_word(&r).map_err(e)? == r, || "reduce_word not idempotent".into())?;
        }
    }
    Ok("1000 pinch-free words nontrivial; 1000 w*w^-1 trivial; reduction idempotent".into())
}

fn determinism(src: &MemorySource) -> Outcome {
    let a = corpus_check(src, 4).map_err(e)?.render();
    let b = corpus_check(src, 1).map_err(e)?.render();
    check(a == b, || "corpus reports differ between runs".into())?;
    Ok(format!("{} bytes, identical", a.len()))
}

fn main() -> ExitCode {
    let src = bundled();
    let criteria = [
        Criterion { id: 1, name: "transporter systems are saturated", budget: Some(Duration::from_secs(10)), run: saturation_of_transporters },
        Criterion { id: 2, name: "non-saturation witness on V4", budget: None, run: sylow_witness_on_v4 },
        Criterion { id: 3, name: "HNN model realizes C3 inversion", budget: Some(Duration::from_secs(5)), run: hnn_realizes_c3_inversion },
        Criterion { id: 4, name: "amalgam realizes F_D8(S4)", budget: Some(Duration::from_secs(60)), run: robinson_realizes_s4 },
        Criterion { id: 5, name: "stable elements vs invariant theory", budget: Some(Duration::from_secs(30)), run: stable_vs_invariants },
        Criterion { id: 6, name: "Quillen category vs fusion category", budget: None, run: quillen_vs_fusion },
        Criterion { id: 7, name: "nilpotence criterion on C3xC3", budget: None, run: nilpotence_on_c3xc3 },
        Criterion { id: 8, name: "Britton property suite", budget: Some(Duration::from_secs(10)), run: britton_properties },
        Criterion { id: 9, name: "corpus reports are deterministic", budget: None, run: determinism },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)(&src);
        let elapsed = start.elapsed();
        let over = c.budget.is_some_and(|b| elapsed > b);
        let budget = match c.budget {
            Some(b) => format!("{:.2}s / {}s", elapsed.as_secs_f64(), b.as_secs()),
            None => format!("{:.2}s", elapsed.as_secs_f64()),
        };
        let (status, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over budget: {d}")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("{status} [{}] {} ({budget}): {detail}", c.id, c.name);
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
