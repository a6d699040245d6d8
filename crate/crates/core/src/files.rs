//! Text formats for groups, fusion generators, Alperin data and stable families.
//!
//! Every writer produces exactly the text its parser accepts, so a parse
//! followed by a write reproduces a canonical file byte for byte. Files
//! refer to one another by paths relative to the referring file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::cohomology::CohoElement;
use crate::error::{LoadError, ParseError};
use crate::fusion::FusionSystem;
use crate::group::{format_elements, Elem, Group, GroupSource, InjHom, Perm, Subgroup, MAX_DEGREE};
use crate::models::{AlperinDatum, AlperinEntry};
use crate::stable::{EaCategory, MorphismSet, StableFamily};

/// Where referenced files come from.
pub trait FileSource: Sync {
    fn read(&self, path: &str) -> Result<String, LoadError>;
}

/// Files on disk, with relative paths taken from `root`.
#[derive(Clone, Debug)]
pub struct DirSource {
    root: PathBuf,
}

impl DirSource {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DirSource { root: root.into() }
    }
}

impl FileSource for DirSource {
    fn read(&self, path: &str) -> Result<String, LoadError> {
        let full = self.root.join(path);
        std::fs::read_to_string(&full)
            .map_err(|e| LoadError::Io { path: full.display().to_string(), message: e.to_string() })
    }
}

/// An in-memory file tree, keyed by relative path.
#[derive(Clone, Debug, Default)]
pub struct MemorySource {
    files: BTreeMap<String, String>,
}

impl MemorySource {
    pub fn new(files: impl IntoIterator<Item = (String, String)>) -> Self {
        MemorySource { files: files.into_iter().collect() }
    }

    pub fn insert(&mut self, path: impl Into<String>, text: impl Into<String>) {
        self.files.insert(path.into(), text.into());
    }

    pub fn files(&self) -> &BTreeMap<String, String> {
        &self.files
    }
}

impl FileSource for MemorySource {
    fn read(&self, path: &str) -> Result<String, LoadError> {
        self.files
            .get(path)
            .cloned()
            .ok_or_else(|| LoadError::Io { path: path.into(), message: "no such file".into() })
    }
}

/// `reference` resolved against the directory of `from`.
pub fn relative_to(from: &str, reference: &str) -> String {
    let parent = Path::new(from).parent().unwrap_or(Path::new(""));
    parent.join(reference).to_string_lossy().into_owned()
}

/// Parses `[0,3,5,6]`.
pub fn parse_elements(text: &str) -> Result<Vec<Elem>, String> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| format!("expected [..], found {text:?}"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|x| x.trim().parse::<Elem>().map_err(|_| format!("bad element {x:?}"))).collect()
}

fn header_fields<'a>(line: &'a str, keyword: &str) -> Option<BTreeMap<&'a str, &'a str>> {
    let mut words = line.split_whitespace();
    if words.next()? != keyword {
        return None;
    }
    words.map(|w| w.split_once('=')).collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end())).filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

// ---------------------------------------------------------------- groups

/// Parses a group file; the table is fully validated.
pub fn parse_group(path: &str, text: &str) -> Result<Group, LoadError> {
    let perr = |line: usize, m: String| LoadError::Parse(ParseError::new(path, line, m));
    let mut lines = content_lines(text);
    let (n1, header) = lines.next().ok_or_else(|| perr(1, "empty group file".into()))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    let (name, order) = match words.as_slice() {
        ["group", name, "order", n] => (*name, n.parse::<usize>().map_err(|_| perr(n1, format!("bad order {n:?}")))?),
        _ => return Err(perr(n1, "expected 'group <name> order <n>'".into())),
    };
    let (n2, mode) = lines.next().ok_or_else(|| perr(n1 + 1, "missing mode line".into()))?;
    let rest: Vec<(usize, &str)> = lines.collect();
    let gerr = |source| LoadError::Group { path: path.into(), source };
    let group = match mode.trim() {
        "mode table" => {
            if rest.len() != order {
                return Err(perr(n2, format!("expected {order} table rows, found {}", rest.len())));
            }
            let rows = rest
                .iter()
                .map(|(n, line)| {
                    line.split_whitespace()
                        .map(|x| x.parse::<Elem>().map_err(|_| perr(*n, format!("bad entry {x:?}"))))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            Group::from_table(name, rows).map_err(gerr)?
        }
        "mode perm" => {
            let degree = rest
                .iter()
                .flat_map(|(_, l)| l.split(|c: char| !c.is_ascii_digit()).filter_map(|x| x.parse::<usize>().ok()))
                .max()
                .unwrap_or(1);
            if degree > MAX_DEGREE {
                return Err(gerr(crate::error::GroupError::DegreeTooLarge { degree, bound: MAX_DEGREE }));
            }
            let gens = rest
                .iter()
                .map(|(n, l)| Perm::parse_cycles(l, degree).map_err(|m| perr(*n, m)))
                .collect::<Result<Vec<_>, _>>()?;
            Group::from_permutations(name, degree, gens).map_err(gerr)?
        }
        other => return Err(perr(n2, format!("unknown mode {other:?}"))),
    };
    if group.order() != order {
        return Err(perr(n1, format!("declared order {order} but the group has order {}", group.order())));
    }
    Ok(group)
}

pub fn write_group(g: &Group) -> String {
    let mut out = format!("group {} order {}\n", g.name(), g.order());
    match g.source() {
        GroupSource::Table => {
            out.push_str("mode table\n");
            for x in g.elements() {
                let row: Vec<String> = g.row(x).iter().map(u32::to_string).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        GroupSource::Permutations { generators, .. } => {
            out.push_str("mode perm\n");
            for p in generators {
                out.push_str(&p.to_cycles());
                out.push('\n');
            }
        }
    }
    out
}

pub fn load_group(src: &dyn FileSource, path: &str) -> Result<Group, LoadError> {
    parse_group(path, &src.read(path)?)
}

// ---------------------------------------------------------------- fusion

/// One generator line `name: [src] -> [tgt] ; images=[..]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorLine {
    pub name: String,
    pub source: Vec<Elem>,
    pub target: Vec<Elem>,
    pub images: Vec<Elem>,
}

/// A fusion generator file before its group is resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionFile {
    pub p: u32,
    pub group: String,
    pub generators: Vec<GeneratorLine>,
}

impl FusionFile {
    pub fn parse(path: &str, text: &str) -> Result<Self, ParseError> {
        let mut lines = content_lines(text);
        let (n1, header) = lines.next().ok_or_else(|| ParseError::new(path, 1, "empty fusion file"))?;
        let fields = header_fields(header, "fusion").ok_or_else(|| ParseError::new(path, n1, "expected 'fusion p=<p> S=<groupfile>'"))?;
        let p = fields
            .get("p")
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| ParseError::new(path, n1, "missing or bad p="))?;
        let group = fields.get("S").ok_or_else(|| ParseError::new(path, n1, "missing S="))?.to_string();
        let mut generators = Vec::new();
        for (n, line) in lines {
            generators.push(parse_generator_line(line).map_err(|m| ParseError::new(path, n, m))?);
        }
        Ok(FusionFile { p, group, generators })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("fusion p={} S={}\n", self.p, self.group);
        for g in &self.generators {
            let _ = writeln!(
                out,
                "{}: {} -> {} ; images={}",
                g.name,
                format_elements(&g.source),
                format_elements(&g.target),
                format_elements(&g.images)
            );
        }
        out
    }

    /// Validated generators as homomorphisms of `g`.
    pub fn homomorphisms(&self, g: &Group) -> Result<Vec<InjHom>, crate::error::GroupError> {
        self.generators
            .iter()
            .map(|l| {
                let source = Subgroup::new(g, l.source.iter().copied())?;
                let target = Subgroup::new(g, l.target.iter().copied())?;
                InjHom::new(g, source, g, target, l.images.clone())
            })
            .collect()
    }

    pub fn from_homomorphisms(p: u32, group: impl Into<String>, homs: &[InjHom]) -> Self {
        let generators = homs
            .iter()
            .enumerate()
            .map(|(i, h)| GeneratorLine {
                name: format!("phi{}", i + 1),
                source: h.source.elements().to_vec(),
                target: h.target.elements().to_vec(),
                images: h.images.clone(),
            })
            .collect();
        FusionFile { p, group: group.into(), generators }
    }
}

fn parse_generator_line(line: &str) -> Result<GeneratorLine, String> {
    let (name, rest) = line.split_once(':').ok_or("expected '<name>: [..] -> [..] ; images=[..]'")?;
    let (maps, images) = rest.split_once(';').ok_or("missing '; images='")?;
    let (source, target) = maps.split_once("->").ok_or("missing '->'")?;
    let images = images.trim().strip_prefix("images=").ok_or("missing 'images='")?;
    Ok(GeneratorLine {
        name: name.trim().to_string(),
        source: parse_elements(source)?,
        target: parse_elements(target)?,
        images: parse_elements(images)?,
    })
}

/// A fusion system read from disk, with the pieces it was built from.
#[derive(Clone, Debug)]
pub struct LoadedFusion {
    pub file: FusionFile,
    pub group: Arc<Group>,
    pub generators: Vec<InjHom>,
    pub fusion: FusionSystem,
}

pub fn load_fusion(src: &dyn FileSource, path: &str) -> Result<LoadedFusion, LoadError> {
    let file = FusionFile::parse(path, &src.read(path)?)?;
    let group_path = relative_to(path, &file.group);
    let group = Arc::new(load_group(src, &group_path)?);
    let generators = file
        .homomorphisms(&group)
        .map_err(|source| LoadError::Group { path: path.into(), source })?;
    let fusion = FusionSystem::generate(group.clone(), file.p, &generators)
        .map_err(|source| LoadError::Fusion { path: path.into(), source })?;
    Ok(LoadedFusion { file, group, generators, fusion })
}

// ---------------------------------------------------------------- Alperin data

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatumLine {
    pub subgroup: Vec<Elem>,
    pub group: String,
    pub embedding: Vec<Elem>,
}

/// An Alperin datum file: `datum fusion=<file>` then `entry P=[..] L=<file> iota=[..]` lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatumFile {
    pub fusion: String,
    pub entries: Vec<DatumLine>,
}

impl DatumFile {
    pub fn parse(path: &str, text: &str) -> Result<Self, ParseError> {
        let mut lines = content_lines(text);
        let (n1, header) = lines.next().ok_or_else(|| ParseError::new(path, 1, "empty datum file"))?;
        let fields = header_fields(header, "datum").ok_or_else(|| ParseError::new(path, n1, "expected 'datum fusion=<file>'"))?;
        let fusion = fields.get("fusion").ok_or_else(|| ParseError::new(path, n1, "missing fusion="))?.to_string();
        let mut entries = Vec::new();
        for (n, line) in lines {
            let err = |m: String| ParseError::new(path, n, m);
            let f = header_fields(line, "entry").ok_or_else(|| err("expected 'entry P=[..] L=<file> iota=[..]'".into()))?;
            let get = |k: &str| f.get(k).copied().ok_or_else(|| err(format!("missing {k}=")));
            entries.push(DatumLine {
                subgroup: parse_elements(get("P")?).map_err(err)?,
                group: get("L")?.to_string(),
                embedding: parse_elements(get("iota")?).map_err(err)?,
            });
        }
        Ok(DatumFile { fusion, entries })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("datum fusion={}\n", self.fusion);
        for e in &self.entries {
            let _ = writeln!(
                out,
                "entry P={} L={} iota={}",
                format_elements(&e.subgroup),
                e.group,
                format_elements(&e.embedding)
            );
        }
        out
    }
}

pub fn load_datum(src: &dyn FileSource, path: &str) -> Result<AlperinDatum, LoadError> {
    let file = DatumFile::parse(path, &src.read(path)?)?;
    let loaded = load_fusion(src, &relative_to(path, &file.fusion))?;
    let mut entries = Vec::new();
    for line in &file.entries {
        let subgroup = Subgroup::new(&loaded.group, line.subgroup.iter().copied())
            .map_err(|source| LoadError::Group { path: path.into(), source })?;
        let group = Arc::new(load_group(src, &relative_to(path, &line.group))?);
        entries.push(AlperinEntry { subgroup, group, embedding: line.embedding.clone() });
    }
    AlperinDatum::new(loaded.fusion, entries).map_err(|source| LoadError::Model { path: path.into(), source })
}

// ---------------------------------------------------------------- stable families

/// A stable family file: `family fusion=<file> degree=<d>` then one
/// `V=[..] ; <monomial>:<coeff> ...` line per site; omitted sites are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyFile {
    pub fusion: String,
    pub degree: usize,
    pub components: Vec<(Vec<Elem>, String)>,
}

impl FamilyFile {
    pub fn parse(path: &str, text: &str) -> Result<Self, ParseError> {
        let mut lines = content_lines(text);
        let (n1, header) = lines.next().ok_or_else(|| ParseError::new(path, 1, "empty family file"))?;
        let fields = header_fields(header, "family")
            .ok_or_else(|| ParseError::new(path, n1, "expected 'family fusion=<file> degree=<d>'"))?;
        let fusion = fields.get("fusion").ok_or_else(|| ParseError::new(path, n1, "missing fusion="))?.to_string();
        let degree = fields
            .get("degree")
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| ParseError::new(path, n1, "missing or bad degree="))?;
        let mut components = Vec::new();
        for (n, line) in lines {
            let err = |m: String| ParseError::new(path, n, m);
            let (site, terms) = line.split_once(';').ok_or_else(|| err("expected 'V=[..] ; terms'".into()))?;
            let site = site.trim().strip_prefix("V=").ok_or_else(|| err("expected 'V='".into()))?;
            components.push((parse_elements(site).map_err(err)?, terms.trim().to_string()));
        }
        Ok(FamilyFile { fusion, degree, components })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("family fusion={} degree={}\n", self.fusion, self.degree);
        for (site, terms) in &self.components {
            let _ = writeln!(out, "V={} ; {}", format_elements(site), terms);
        }
        out
    }

    pub fn from_family(fusion: impl Into<String>, f: &StableFamily) -> Self {
        let components = f
            .category()
            .sites()
            .iter()
            .zip(f.components())
            .map(|(s, c)| (s.subgroup().elements().to_vec(), c.to_string()))
            .collect();
        FamilyFile { fusion: fusion.into(), degree: f.degree(), components }
    }
}

pub fn load_family(src: &dyn FileSource, path: &str) -> Result<StableFamily, LoadError> {
    let file = FamilyFile::parse(path, &src.read(path)?)?;
    let loaded = load_fusion(src, &relative_to(path, &file.fusion))?;
    let stable_err = |source| LoadError::Stable { path: path.into(), source };
    let cat = Arc::new(EaCategory::from_fusion(&loaded.fusion, MorphismSet::Generating).map_err(stable_err)?);
    let p = cat.p();
    let mut components: Vec<CohoElement> = cat.sites().iter().map(|s| CohoElement::zero(p, s.rank())).collect();
    for (site, terms) in &file.components {
        let sub = Subgroup::new(&loaded.group, site.iter().copied())
            .map_err(|source| LoadError::Group { path: path.into(), source })?;
        let k = cat.site_index(&sub).ok_or_else(|| {
            stable_err(crate::error::StableError::NotElementaryAbelian(sub.to_string()))
        })?;
        components[k] = CohoElement::parse(terms, p, cat.sites()[k].rank()).map_err(stable_err)?;
    }
    StableFamily::from_components(cat, file.degree, components).map_err(stable_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    const D8_PERM: &str = "group D8 order 8\nmode perm\n(1 2 3 4)\n(1 3)\n";

    #[test]
    fn group_round_trip() {
        let g = parse_group("d8.grp", D8_PERM).unwrap();
        assert_eq!(g.order(), 8);
        assert_eq!(write_group(&g), D8_PERM);
        let table = write_group(&g.induced(&g.whole(), "D8"));
        let t = parse_group("t.grp", &table).unwrap();
        assert_eq!(write_group(&t), table);
    }

    #[test]
    fn group_errors_carry_location() {
        let bad = "group X order 3\nmode table\n0 1 2\n1 2 0\n";
        assert!(matches!(parse_group("x.grp", bad), Err(LoadError::Parse(ParseError { line: 2, .. }))));
        let wrong_order = "group C2 order 3\nmode perm\n(1 2)\n";
        assert!(parse_group("x.grp", wrong_order).is_err());
    }

    #[test]
    fn fusion_file_round_trip() {
        let text = "fusion p=3 S=c3.grp\nphi1: [0,1,2] -> [0,1,2] ; images=[0,2,1]\n";
        let f = FusionFile::parse("c3_inv.fus", text).unwrap();
        assert_eq!(f.to_text(), text);
        let mut src = MemorySource::default();
        src.insert("c3.grp", "group C3 order 3\nmode perm\n(1 2 3)\n");
        src.insert("c3_inv.fus", text);
        let loaded = load_fusion(&src, "c3_inv.fus").unwrap();
        assert_eq!(loaded.fusion.automorphisms(loaded.fusion.top()).len(), 2);
    }

    #[test]
    fn relative_paths() {
        assert_eq!(relative_to("a/b.fus", "c.grp"), "a/c.grp");
        assert_eq!(relative_to("b.fus", "c.grp"), "c.grp");
    }

    #[test]
    fn elements_lists() {
        assert_eq!(parse_elements("[0, 3,5]").unwrap(), vec![0, 3, 5]);
        assert_eq!(parse_elements("[]").unwrap(), Vec::<Elem>::new());
        assert!(parse_elements("0,3").is_err());
    }
}
