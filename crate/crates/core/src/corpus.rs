//! The bundled example corpus and the invariant suite run over it.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use crate::error::LoadError;
use crate::files::{self, FileSource, MemorySource};
use crate::fusion::{fusion_equal, is_subfusion, FusionSystem};
use crate::group::{Elem, Group};
use crate::models::{self, hnn_presentation, robinson_presentation, validate_alperin_datum};
use crate::stable::{category_series, EaCategory, MorphismSet};

pub const MANIFEST: &str = "manifest.txt";

/// Wall-clock budget for a single corpus item.
pub const ITEM_BUDGET: Duration = Duration::from_secs(30);

/// Highest degree compared in the stable-elements checks.
const STABLE_DEGREE: usize = 6;

macro_rules! bundle {
    ($($name:literal),* $(,)?) => {
        [$(($name, include_str!(concat!("../corpus/", $name)))),*]
    };
}

const BUNDLED: [(&str, &str); 23] = bundle!(
    "manifest.txt",
    "c2.grp",
    "c3.grp",
    "v4.grp",
    "c9.grp",
    "d8.grp",
    "q8.grp",
    "s3.grp",
    "s4.grp",
    "a4.grp",
    "sl23.grp",
    "c3xc3.grp",
    "c3_inv.fus",
    "c3_triv.fus",
    "v4_rho.fus",
    "v4_inv.fus",
    "v4_gl2.fus",
    "d8_s4.fus",
    "c3xc3_triv.fus",
    "d8_s4.datum",
    "c3_a.fam",
    "c3_x.fam",
    "c3xc3_nil.fam",
);

/// The corpus compiled into the library.
pub fn bundled() -> MemorySource {
    MemorySource::new(BUNDLED.iter().map(|(k, v)| (k.to_string(), v.to_string())))
}

/// One line of the manifest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusItem {
    pub kind: String,
    pub file: String,
    pub options: Vec<(String, String)>,
}

impl CorpusItem {
    fn option(&self, key: &str) -> Option<&str> {
        self.options.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn label(&self) -> String {
        let mut s = format!("{} {}", self.kind, self.file);
        for (k, v) in &self.options {
            let _ = write!(s, " {k}={v}");
        }
        s
    }
}

pub fn parse_manifest(text: &str) -> Result<Vec<CorpusItem>, LoadError> {
    let mut items = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut words = line.split_whitespace();
        let (Some(kind), Some(file)) = (words.next(), words.next()) else {
            return Err(crate::error::ParseError::new(MANIFEST, n + 1, "expected '<kind> <file>'").into());
        };
        let options = words
            .map(|w| {
                w.split_once('=')
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .ok_or_else(|| crate::error::ParseError::new(MANIFEST, n + 1, format!("bad option {w:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        items.push(CorpusItem { kind: kind.into(), file: file.into(), options });
    }
    Ok(items)
}

#[derive(Clone, Debug)]
pub struct ItemOutcome {
    pub item: CorpusItem,
    pub result: Result<Vec<String>, String>,
    pub elapsed: Duration,
}

impl ItemOutcome {
    pub fn passed(&self) -> bool {
        self.result.is_ok() && self.elapsed <= ITEM_BUDGET
    }
}

#[derive(Clone, Debug)]
pub struct CorpusReport {
    pub items: Vec<ItemOutcome>,
}

impl CorpusReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(ItemOutcome::passed)
    }

    /// The deterministic report: no timings, only budget verdicts.
    pub fn render(&self) -> String {
        let mut out = format!("corpus: {} items\n", self.items.len());
        for o in &self.items {
            let status = if o.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status} {}", o.item.label());
            match &o.result {
                Ok(details) => {
                    for d in details {
                        let _ = writeln!(out, "  {d}");
                    }
                }
                Err(e) => {
                    for line in e.lines() {
                        let _ = writeln!(out, "  error: {line}");
                    }
                }
            }
            let budget = if o.elapsed <= ITEM_BUDGET { "within" } else { "OVER" };
            let _ = writeln!(out, "  budget: {budget} {}s", ITEM_BUDGET.as_secs());
        }
        let failed = self.items.iter().filter(|o| !o.passed()).count();
        let _ = writeln!(out, "result: {} passed, {} failed", self.items.len() - failed, failed);
        out
    }

    /// Per-item wall-clock times; varies from run to run.
    pub fn timing_table(&self) -> String {
        let mut out = String::from("item\tmillis\tbudget_millis\n");
        for o in &self.items {
            let _ = writeln!(out, "{}\t{}\t{}", o.item.label(), o.elapsed.as_millis(), ITEM_BUDGET.as_millis());
        }
        out
    }
}

/// Runs every manifest item, at most `threads` at a time; output order
/// follows the manifest.
pub fn corpus_check(src: &dyn FileSource, threads: usize) -> Result<CorpusReport, LoadError> {
    let manifest = src.read(MANIFEST).map_err(|_| LoadError::CorpusMissing(MANIFEST.into()))?;
    let items = parse_manifest(&manifest)?;
    let slots: Mutex<Vec<Option<ItemOutcome>>> = Mutex::new(vec![None; items.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads.max(1).min(items.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let start = Instant::now();
                let result = check_item(src, item);
                let outcome = ItemOutcome { item: item.clone(), result, elapsed: start.elapsed() };
                slots.lock().expect("no worker panicked")[i] = Some(outcome);
            });
        }
    });
    let items = slots.into_inner().expect("no worker panicked").into_iter().map(|o| o.expect("every item ran")).collect();
    Ok(CorpusReport { items })
}

fn check_item(src: &dyn FileSource, item: &CorpusItem) -> Result<Vec<String>, String> {
    let s = |e: &dyn std::fmt::Display| e.to_string();
    match item.kind.as_str() {
        "group" => check_group(src, &item.file),
        "transporter" => {
            let p = item.option("p").and_then(|p| p.parse().ok()).ok_or("transporter needs p=<prime>")?;
            check_transporter(src, &item.file, p)
        }
        "fusion" => check_fusion(src, &item.file, item.option("saturated") == Some("yes")),
        "datum" => check_datum(src, &item.file),
        "family" => check_family(src, &item.file, item.option("nilpotent") == Some("yes")),
        other => Err(s(&format!("unknown item kind {other:?}"))),
    }
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn check_round_trip(src: &dyn FileSource, file: &str, written: String) -> Result<(), String> {
    let text = src.read(file).map_err(|e| e.to_string())?;
    ensure(text == written, || format!("{file}: serializer does not reproduce the file"))
}

fn check_group(src: &dyn FileSource, file: &str) -> Result<Vec<String>, String> {
    let g = files::load_group(src, file).map_err(|e| e.to_string())?;
    check_round_trip(src, file, files::write_group(&g))?;
    let subs = g.subgroups().map_err(|e| e.to_string())?;
    for h in &subs {
        ensure(g.order() % h.len() == 0, || format!("subgroup {h} violates Lagrange"))?;
    }
    let mut sylows = Vec::new();
    for &(p, _) in g.factorization() {
        let syl = g.sylow(p).map_err(|e| e.to_string())?;
        ensure(syl.len() == g.p_part(p), || format!("Sylow {p}-subgroup has the wrong order"))?;
        let core = g.o_p(p).map_err(|e| e.to_string())?;
        ensure(core.is_subgroup_of(&syl) && g.is_normal(&core), || format!("O_{p} is not a normal subgroup of the Sylow"))?;
        sylows.push(format!("|Syl_{p}|={} |O_{p}|={}", syl.len(), core.len()));
    }
    ensure(g.is_isomorphic(&g).map_err(|e| e.to_string())?, || "group not isomorphic to itself".into())?;
    Ok(vec![
        format!("order {} ; {} subgroups ; abelian={}", g.order(), subs.len(), g.is_abelian()),
        format!("sylow: {}", if sylows.is_empty() { "none".into() } else { sylows.join(" ") }),
        "round-trip: exact".into(),
    ])
}

fn series_line(label: &str, series: &[usize]) -> String {
    let parts: Vec<String> = series.iter().map(usize::to_string).collect();
    format!("{label}: {}", parts.join(","))
}

fn stable_checks(f: &FusionSystem) -> Result<(Vec<usize>, Vec<String>), String> {
    let gen = EaCategory::from_fusion(f, MorphismSet::Generating).map_err(|e| e.to_string())?;
    let all = EaCategory::from_fusion(f, MorphismSet::All).map_err(|e| e.to_string())?;
    let a = category_series(&gen, STABLE_DEGREE).map_err(|e| e.to_string())?;
    let b = category_series(&all, STABLE_DEGREE).map_err(|e| e.to_string())?;
    ensure(a == b, || "generating and full morphism sets give different limits".into())?;
    ensure(gen.functoriality_holds(2), || "restriction is not functorial in degree 2".into())?;
    Ok((a.clone(), vec![series_line("stable dims d<=6", &a), "stable: generating set = all morphisms".into()]))
}

fn check_transporter(src: &dyn FileSource, file: &str, p: u32) -> Result<Vec<String>, String> {
    let g = files::load_group(src, file).map_err(|e| e.to_string())?;
    let syl = g.sylow(p).map_err(|e| e.to_string())?;
    let f = FusionSystem::from_group(&g, &syl, p).map_err(|e| e.to_string())?;
    f.validate().map_err(|e| e.to_string())?;
    let report = f.saturation();
    ensure(report.saturated, || format!("F_S(G) reported {report}"))?;
    let (series, mut lines) = stable_checks(&f)?;
    let quillen = EaCategory::quillen(&g, p).map_err(|e| e.to_string())?;
    let q = category_series(&quillen, STABLE_DEGREE).map_err(|e| e.to_string())?;
    ensure(q == series, || format!("Quillen category limit {q:?} differs from fusion limit {series:?}"))?;
    let mut out = vec![
        format!("S order {} ; {} morphisms ; {} classes ; {} centric", syl.len(), f.morphism_count(), f.conjugacy_classes().len(), f.centric_subgroups().len()),
        "saturation: saturated".into(),
    ];
    out.append(&mut lines);
    out.push("quillen limit = fusion limit".into());
    Ok(out)
}

fn check_fusion(src: &dyn FileSource, file: &str, expect_saturated: bool) -> Result<Vec<String>, String> {
    let loaded = files::load_fusion(src, file).map_err(|e| e.to_string())?;
    check_round_trip(src, file, loaded.file.to_text())?;
    let f = &loaded.fusion;
    f.validate().map_err(|e| e.to_string())?;
    let report = f.saturation();
    ensure(report.saturated == expect_saturated, || format!("expected saturated={expect_saturated}, got {report}"))?;
    let mut out = vec![format!("{} morphisms ; {} classes", f.morphism_count(), f.conjugacy_classes().len())];
    out.extend(report.to_string().lines().map(|l| format!("saturation: {}", l.trim())));
    let m = hnn_presentation(loaded.group.clone(), f.p(), &loaded.generators).map_err(|e| e.to_string())?;
    for r in m.relators() {
        ensure(m.is_identity(r).unwrap_or(false), || format!("relator {} is not trivial", m.format_word(r)))?;
    }
    let letters: Vec<_> = loaded.group.elements().map(|x| m.base_letter(x)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    for (i, u) in letters.iter().enumerate() {
        for v in &letters[..i] {
            ensure(!m.words_equal(u, v).unwrap_or(true), || "two base letters are identified".into())?;
        }
    }
    let recovered = models::recover_fusion(&m, 2).map_err(|e| e.to_string())?;
    ensure(is_subfusion(&recovered, f).map_err(|e| e.to_string())?, || "HNN model realizes morphisms outside F".into())?;
    let equal = fusion_equal(&recovered, f).map_err(|e| e.to_string())?;
    out.push(format!(
        "hnn: {} generators, {} relators ; base embeds ; recovered at radius 2 {}",
        m.generators().len(),
        m.relators().len(),
        if equal { "equals F" } else { "is a proper subsystem" }
    ));
    let (_, mut lines) = stable_checks(f)?;
    out.append(&mut lines);
    Ok(out)
}

fn check_datum(src: &dyn FileSource, file: &str) -> Result<Vec<String>, String> {
    let datum = files::load_datum(src, file).map_err(|e| e.to_string())?;
    let report = validate_alperin_datum(&datum);
    ensure(report.is_valid(), || report.to_string())?;
    let m = robinson_presentation(&datum).map_err(|e| e.to_string())?;
    let recovered = models::recover_fusion(&m, 3).map_err(|e| e.to_string())?;
    ensure(fusion_equal(&recovered, datum.fusion()).map_err(|e| e.to_string())?, || "amalgam does not realize F at radius 3".into())?;
    Ok(vec![
        format!("{} entries ; alperin: valid", datum.entries().len()),
        format!("amalgam: {} generators, {} relators ; recovered at radius 3 equals F", m.generators().len(), m.relators().len()),
    ])
}

fn check_family(src: &dyn FileSource, file: &str, expect_nilpotent: bool) -> Result<Vec<String>, String> {
    let family = files::load_family(src, file).map_err(|e| e.to_string())?;
    let nil = family.is_nilpotent().map_err(|e| e.to_string())?;
    ensure(nil == expect_nilpotent, || format!("expected nilpotent={expect_nilpotent}, got {nil}"))?;
    let p = family.category().p();
    ensure(family.pow(p).is_zero() == nil || p == 2 && nil == family.is_zero(), || "power test disagrees with the criterion".into())?;
    Ok(vec![format!("degree {} ; nilpotent={nil} ; f^{p} zero={}", family.degree(), family.pow(p).is_zero())])
}

/// Writes every bundled file into `dir`.
pub fn export_bundled(dir: &std::path::Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, text) in BUNDLED {
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}

/// A groups' table with one 2×2 subsquare swapped: still a Latin square with
/// identity row and column, but no longer associative.
pub fn corrupt_table(g: &Group) -> Option<Vec<Vec<Elem>>> {
    let n = g.order() as Elem;
    let mut rows: Vec<Vec<Elem>> = g.elements().map(|x| g.row(x).to_vec()).collect();
    for a in 1..n {
        for b in a + 1..n {
            for c in 1..n {
                for d in c + 1..n {
                    let (x, y) = (rows[a as usize][c as usize], rows[a as usize][d as usize]);
                    if rows[b as usize][c as usize] == y && rows[b as usize][d as usize] == x {
                        rows[a as usize][c as usize] = y;
                        rows[a as usize][d as usize] = x;
                        rows[b as usize][c as usize] = x;
                        rows[b as usize][d as usize] = y;
                        if Group::from_table("corrupt", rows.clone()).is_err() {
                            return Some(rows);
                        }
                        rows = g.elements().map(|x| g.row(x).to_vec()).collect();
                    }
                }
            }
        }
    }
    None
}

/// Shared so callers can reuse parsed bundles across threads.
pub fn bundled_arc() -> Arc<MemorySource> {
    Arc::new(bundled())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::GroupError;

    #[test]
    fn manifest_lists_bundled_files() {
        let src = bundled();
        let items = parse_manifest(&src.read(MANIFEST).unwrap()).unwrap();
        for item in &items {
            assert!(src.files().contains_key(&item.file), "{}", item.file);
        }
    }

    #[test]
    fn corrupted_d8_surfaces_the_triple() {
        let src = bundled();
        let d8 = files::load_group(&src, "d8.grp").unwrap();
        let rows = corrupt_table(&d8).unwrap();
        assert!(matches!(Group::from_table("x", rows), Err(GroupError::NonAssociative(..))));
    }
}
