//! Corpus ingestion, linking and domain views.
//!
//! A [`Corpus`] holds papers, authors, venues and institutions with dense
//! `u32` indices assigned in ascending id order. Three networks live on top
//! of the paper index: the citation graph (paper -> cited paper), the
//! authorship bipartite graph (paper -> authors, in byline order) and the
//! venueship map (paper -> at most one venue).
//!
//! Metrics never run on the corpus directly. They run on a [`DomainView`],
//! which is the corpus restricted to a paper subset with induced edges.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::Csr;

/// Marker for an absent optional field in the TSV files.
pub const ABSENT: &str = "-";

const NO_INDEX: u32 = u32::MAX;

pub const PAPERS_HEADER: [&str; 4] = ["paper_id", "year", "venue_id", "domains"];
pub const AUTHORS_HEADER: [&str; 3] = ["author_id", "name", "institution_id"];
pub const VENUES_HEADER: [&str; 2] = ["venue_id", "name"];
pub const INSTITUTIONS_HEADER: [&str; 2] = ["institution_id", "name"];
pub const AUTHORSHIP_HEADER: [&str; 3] = ["paper_id", "author_id", "author_position"];
pub const CITATIONS_HEADER: [&str; 2] = ["citing_paper_id", "cited_paper_id"];

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PaperRecord {
    pub paper_id: String,
    pub year: Option<i32>,
    pub venue_id: Option<String>,
    /// Byline order.
    pub authors: Vec<String>,
    pub domains: BTreeSet<String>,
    pub cites: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AuthorRecord {
    pub author_id: String,
    pub name: String,
    pub institution_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VenueRecord {
    pub venue_id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InstitutionRecord {
    pub institution_id: String,
    pub name: String,
}

/// Tally of everything that was dropped or missing while linking.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub dropped_citation_refs: usize,
    /// Citation rows where a paper cites itself.
    pub dropped_citation_loops: usize,
    pub dropped_author_refs: usize,
    pub dropped_venue_refs: usize,
    pub dropped_institution_refs: usize,
    pub papers_missing_venue: usize,
    pub papers_missing_year: usize,
    /// Papers carrying no domain tag; they are outside every domain view and
    /// outside the merged overall view.
    pub unclassified_papers: usize,
    /// Repeated edge rows (authorship or citation) that were collapsed.
    pub duplicate_ids: Vec<String>,
}

impl ValidationReport {
    pub fn dropped_references(&self) -> usize {
        self.dropped_citation_refs
            + self.dropped_author_refs
            + self.dropped_venue_refs
            + self.dropped_institution_refs
    }
}

/// Locations of the six ingestion files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusPaths {
    pub papers: PathBuf,
    pub authors: PathBuf,
    pub venues: PathBuf,
    pub institutions: PathBuf,
    pub authorship: PathBuf,
    pub citations: PathBuf,
}

impl CorpusPaths {
    /// The conventional file names inside one directory.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        CorpusPaths {
            papers: dir.join("papers.tsv"),
            authors: dir.join("authors.tsv"),
            venues: dir.join("venues.tsv"),
            institutions: dir.join("institutions.tsv"),
            authorship: dir.join("authorship.tsv"),
            citations: dir.join("citations.tsv"),
        }
    }
}

/// Immutable, fully linked corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    paper_ids: Vec<String>,
    paper_years: Vec<Option<i32>>,
    paper_venue: Vec<Option<u32>>,
    paper_authors: Csr,
    citations: Csr,
    paper_domains: Csr,
    domain_papers: Csr,
    domain_ids: Vec<String>,
    author_ids: Vec<String>,
    author_names: Vec<String>,
    author_institution: Vec<Option<u32>>,
    venue_ids: Vec<String>,
    venue_names: Vec<String>,
    institution_ids: Vec<String>,
    institution_names: Vec<String>,
}

impl Corpus {
    /// Links in-memory records exactly as [`load_corpus`] links files.
    pub fn from_records(
        papers: &[PaperRecord],
        authors: &[AuthorRecord],
        venues: &[VenueRecord],
        institutions: &[InstitutionRecord],
    ) -> Result<(Corpus, ValidationReport)> {
        let mut linker = Linker::default();
        for inst in institutions {
            linker.add_institution(&inst.institution_id, &inst.name)?;
        }
        for venue in venues {
            linker.add_venue(&venue.venue_id, &venue.name)?;
        }
        for author in authors {
            linker.add_author(
                &author.author_id,
                &author.name,
                author.institution_id.as_deref(),
            )?;
        }
        for paper in papers {
            linker.add_paper(
                &paper.paper_id,
                paper.year,
                paper.venue_id.as_deref(),
                paper.domains.iter().map(String::as_str),
            )?;
        }
        for paper in papers {
            for (pos, author) in paper.authors.iter().enumerate() {
                linker.add_authorship(&paper.paper_id, author, pos as u32 + 1);
            }
            for cited in &paper.cites {
                linker.add_citation(&paper.paper_id, cited);
            }
        }
        linker.finish()
    }

    pub fn n_papers(&self) -> usize {
        self.paper_ids.len()
    }

    pub fn n_authors(&self) -> usize {
        self.author_ids.len()
    }

    pub fn n_venues(&self) -> usize {
        self.venue_ids.len()
    }

    pub fn n_institutions(&self) -> usize {
        self.institution_ids.len()
    }

    pub fn paper_id(&self, paper: usize) -> &str {
        &self.paper_ids[paper]
    }

    pub fn paper_year(&self, paper: usize) -> Option<i32> {
        self.paper_years[paper]
    }

    pub fn paper_venue(&self, paper: usize) -> Option<u32> {
        self.paper_venue[paper]
    }

    pub fn author_id(&self, author: usize) -> &str {
        &self.author_ids[author]
    }

    pub fn author_name(&self, author: usize) -> &str {
        &self.author_names[author]
    }

    pub fn author_institution(&self, author: usize) -> Option<u32> {
        self.author_institution[author]
    }

    pub fn venue_id(&self, venue: usize) -> &str {
        &self.venue_ids[venue]
    }

    pub fn institution_id(&self, inst: usize) -> &str {
        &self.institution_ids[inst]
    }

    pub fn institution_name(&self, inst: usize) -> &str {
        &self.institution_names[inst]
    }

    pub fn domain_ids(&self) -> &[String] {
        &self.domain_ids
    }

    pub fn paper_index(&self, id: &str) -> Option<usize> {
        lookup(&self.paper_ids, id)
    }

    pub fn author_index(&self, id: &str) -> Option<usize> {
        lookup(&self.author_ids, id)
    }

    pub fn venue_index(&self, id: &str) -> Option<usize> {
        lookup(&self.venue_ids, id)
    }

    pub fn institution_index(&self, id: &str) -> Option<usize> {
        lookup(&self.institution_ids, id)
    }

    pub fn domain_index(&self, id: &str) -> Option<usize> {
        lookup(&self.domain_ids, id)
    }

    pub fn author_ids(&self) -> &[String] {
        &self.author_ids
    }

    pub fn paper_ids(&self) -> &[String] {
        &self.paper_ids
    }

    pub fn venue_ids(&self) -> &[String] {
        &self.venue_ids
    }

    pub fn institution_ids(&self) -> &[String] {
        &self.institution_ids
    }

    /// Paper -> cited papers, rows sorted.
    pub fn citation_edges(&self) -> &Csr {
        &self.citations
    }

    /// Paper -> authors in byline order.
    pub fn authorship(&self) -> &Csr {
        &self.paper_authors
    }

    /// Domain -> papers, rows sorted.
    pub fn domain_papers(&self) -> &Csr {
        &self.domain_papers
    }

    pub fn paper_domains(&self) -> &Csr {
        &self.paper_domains
    }

    pub fn unclassified_papers(&self) -> usize {
        (0..self.n_papers())
            .filter(|&p| self.paper_domains.degree(p) == 0)
            .count()
    }

    pub fn paper_record(&self, paper: usize) -> PaperRecord {
        PaperRecord {
            paper_id: self.paper_ids[paper].clone(),
            year: self.paper_years[paper],
            venue_id: self.paper_venue[paper].map(|v| self.venue_ids[v as usize].clone()),
            authors: self
                .paper_authors
                .row(paper)
                .iter()
                .map(|&a| self.author_ids[a as usize].clone())
                .collect(),
            domains: self
                .paper_domains
                .row(paper)
                .iter()
                .map(|&d| self.domain_ids[d as usize].clone())
                .collect(),
            cites: self
                .citations
                .row(paper)
                .iter()
                .map(|&q| self.paper_ids[q as usize].clone())
                .collect(),
        }
    }

    pub fn author_record(&self, author: usize) -> AuthorRecord {
        AuthorRecord {
            author_id: self.author_ids[author].clone(),
            name: self.author_names[author].clone(),
            institution_id: self.author_institution[author]
                .map(|i| self.institution_ids[i as usize].clone()),
        }
    }

    /// The whole corpus as a view, including authors and venues without
    /// papers.
    pub fn full_view(&self) -> DomainView<'_> {
        DomainView::build(
            self,
            ViewScope::Full,
            (0..self.n_papers() as u32).collect(),
            true,
        )
    }

    /// Papers tagged with `domain`, with induced citation edges.
    pub fn domain_view(&self, domain: &str) -> Result<DomainView<'_>> {
        let d = self
            .domain_index(domain)
            .ok_or_else(|| Error::UnknownDomain(domain.to_string()))?;
        Ok(DomainView::build(
            self,
            ViewScope::Domain(domain.to_string()),
            self.domain_papers.row(d).to_vec(),
            false,
        ))
    }

    /// Union of every domain-tagged paper. Unclassified papers are left out.
    pub fn merge_overall(&self) -> DomainView<'_> {
        let papers = (0..self.n_papers() as u32)
            .filter(|&p| self.paper_domains.degree(p as usize) > 0)
            .collect();
        DomainView::build(self, ViewScope::Overall, papers, false)
    }
}

fn lookup(ids: &[String], id: &str) -> Option<usize> {
    ids.binary_search_by(|probe| probe.as_str().cmp(id)).ok()
}

// ---------------------------------------------------------------------------
// Linking
// ---------------------------------------------------------------------------

/// Indexed corpus in insertion order; `finish` sorts by id and builds the
/// adjacency structures.
#[derive(Debug, Default)]
pub(crate) struct RawCorpus {
    pub paper_ids: Vec<String>,
    pub paper_years: Vec<Option<i32>>,
    pub paper_venue: Vec<Option<u32>>,
    /// `(paper, byline position, author)`.
    pub authorship: Vec<(u32, u32, u32)>,
    pub citations: Vec<(u32, u32)>,
    pub domain_ids: Vec<String>,
    pub paper_domains: Vec<(u32, u32)>,
    pub author_ids: Vec<String>,
    pub author_names: Vec<String>,
    pub author_institution: Vec<Option<u32>>,
    pub venue_ids: Vec<String>,
    pub venue_names: Vec<String>,
    pub institution_ids: Vec<String>,
    pub institution_names: Vec<String>,
}

/// Returns `(order, rank)`: `order[k]` is the old index at sorted position
/// `k`, `rank[old]` is the new index.
fn sort_ids(ids: &[String], kind: &'static str) -> Result<(Vec<u32>, Vec<u32>)> {
    let mut order: Vec<u32> = (0..ids.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| ids[a as usize].cmp(&ids[b as usize]));
    for w in order.windows(2) {
        if ids[w[0] as usize] == ids[w[1] as usize] {
            return Err(Error::DuplicateId {
                kind,
                id: ids[w[0] as usize].clone(),
            });
        }
    }
    let mut rank = vec![0u32; ids.len()];
    for (k, &old) in order.iter().enumerate() {
        rank[old as usize] = k as u32;
    }
    Ok((order, rank))
}

fn permute<T: Default>(mut v: Vec<T>, order: &[u32]) -> Vec<T> {
    order
        .iter()
        .map(|&o| std::mem::take(&mut v[o as usize]))
        .collect()
}

impl RawCorpus {
    pub(crate) fn finish(self, report: &mut ValidationReport) -> Result<Corpus> {
        let (p_order, p_rank) = sort_ids(&self.paper_ids, "paper")?;
        let (a_order, a_rank) = sort_ids(&self.author_ids, "author")?;
        let (v_order, v_rank) = sort_ids(&self.venue_ids, "venue")?;
        let (i_order, i_rank) = sort_ids(&self.institution_ids, "institution")?;
        let (d_order, d_rank) = sort_ids(&self.domain_ids, "domain")?;
        let n_papers = self.paper_ids.len();

        let paper_ids = permute(self.paper_ids, &p_order);
        let paper_years = permute(self.paper_years, &p_order);
        let paper_venue: Vec<Option<u32>> = permute(self.paper_venue, &p_order)
            .into_iter()
            .map(|v| v.map(|v| v_rank[v as usize]))
            .collect();
        let author_ids = permute(self.author_ids, &a_order);
        let author_names = permute(self.author_names, &a_order);
        let author_institution = permute(self.author_institution, &a_order)
            .into_iter()
            .map(|i| i.map(|i| i_rank[i as usize]))
            .collect();
        let venue_ids = permute(self.venue_ids, &v_order);
        let venue_names = permute(self.venue_names, &v_order);
        let institution_ids = permute(self.institution_ids, &i_order);
        let institution_names = permute(self.institution_names, &i_order);
        let domain_ids = permute(self.domain_ids, &d_order);

        let mut authorship: Vec<(u32, u32, u32)> = self
            .authorship
            .into_iter()
            .map(|(p, pos, a)| (p_rank[p as usize], pos, a_rank[a as usize]))
            .collect();
        authorship.sort_unstable_by_key(|&(p, pos, a)| (p, a, pos));
        authorship.dedup_by(|later, kept| {
            let dup = later.0 == kept.0 && later.2 == kept.2;
            if dup {
                report.duplicate_ids.push(format!(
                    "authorship:{}:{}",
                    paper_ids[later.0 as usize], author_ids[later.2 as usize]
                ));
            }
            dup
        });
        authorship.sort_unstable();
        let paper_authors =
            Csr::from_sorted_pairs(n_papers, authorship.into_iter().map(|(p, _, a)| (p, a)));

        let mut citations: Vec<(u32, u32)> = Vec::with_capacity(self.citations.len());
        for (p, q) in self.citations {
            if p == q {
                report.dropped_citation_loops += 1;
            } else {
                citations.push((p_rank[p as usize], p_rank[q as usize]));
            }
        }
        citations.sort_unstable();
        citations.dedup_by(|later, kept| {
            let dup = later == kept;
            if dup {
                report.duplicate_ids.push(format!(
                    "citation:{}->{}",
                    paper_ids[later.0 as usize], paper_ids[later.1 as usize]
                ));
            }
            dup
        });
        let citations = Csr::from_sorted_pairs(n_papers, citations);

        let mut paper_domains: Vec<(u32, u32)> = self
            .paper_domains
            .into_iter()
            .map(|(p, d)| (p_rank[p as usize], d_rank[d as usize]))
            .collect();
        paper_domains.sort_unstable();
        paper_domains.dedup();
        let paper_domains = Csr::from_sorted_pairs(n_papers, paper_domains);
        let domain_papers = paper_domains.transpose(domain_ids.len());

        report.papers_missing_venue = paper_venue.iter().filter(|v| v.is_none()).count();
        report.papers_missing_year = paper_years.iter().filter(|y| y.is_none()).count();
        report.unclassified_papers = (0..n_papers)
            .filter(|&p| paper_domains.degree(p) == 0)
            .count();
        report.duplicate_ids.sort();

        Ok(Corpus {
            paper_ids,
            paper_years,
            paper_venue,
            paper_authors,
            citations,
            paper_domains,
            domain_papers,
            domain_ids,
            author_ids,
            author_names,
            author_institution,
            venue_ids,
            venue_names,
            institution_ids,
            institution_names,
        })
    }
}

/// Resolves string ids to insertion-order indices while records stream in.
#[derive(Default)]
struct Linker {
    raw: RawCorpus,
    report: ValidationReport,
    papers: HashMap<String, u32>,
    authors: HashMap<String, u32>,
    venues: HashMap<String, u32>,
    institutions: HashMap<String, u32>,
    domains: HashMap<String, u32>,
}

fn intern(map: &mut HashMap<String, u32>, id: &str, kind: &'static str) -> Result<u32> {
    let next = map.len() as u32;
    match map.entry(id.to_string()) {
        std::collections::hash_map::Entry::Occupied(_) => Err(Error::DuplicateId {
            kind,
            id: id.to_string(),
        }),
        std::collections::hash_map::Entry::Vacant(slot) => {
            slot.insert(next);
            Ok(next)
        }
    }
}

impl Linker {
    fn add_institution(&mut self, id: &str, name: &str) -> Result<()> {
        intern(&mut self.institutions, id, "institution")?;
        self.raw.institution_ids.push(id.to_string());
        self.raw.institution_names.push(name.to_string());
        Ok(())
    }

    fn add_venue(&mut self, id: &str, name: &str) -> Result<()> {
        intern(&mut self.venues, id, "venue")?;
        self.raw.venue_ids.push(id.to_string());
        self.raw.venue_names.push(name.to_string());
        Ok(())
    }

    fn add_author(&mut self, id: &str, name: &str, institution: Option<&str>) -> Result<()> {
        intern(&mut self.authors, id, "author")?;
        let inst = institution.and_then(|i| {
            let found = self.institutions.get(i).copied();
            if found.is_none() {
                self.report.dropped_institution_refs += 1;
            }
            found
        });
        self.raw.author_ids.push(id.to_string());
        self.raw.author_names.push(name.to_string());
        self.raw.author_institution.push(inst);
        Ok(())
    }

    fn add_paper<'a>(
        &mut self,
        id: &str,
        year: Option<i32>,
        venue: Option<&str>,
        domains: impl IntoIterator<Item = &'a str>,
    ) -> Result<()> {
        let p = intern(&mut self.papers, id, "paper")?;
        let venue = venue.and_then(|v| {
            let found = self.venues.get(v).copied();
            if found.is_none() {
                self.report.dropped_venue_refs += 1;
            }
            found
        });
        for d in domains {
            let next = self.domains.len() as u32;
            let idx = *self.domains.entry(d.to_string()).or_insert_with(|| {
                self.raw.domain_ids.push(d.to_string());
                next
            });
            self.raw.paper_domains.push((p, idx));
        }
        self.raw.paper_ids.push(id.to_string());
        self.raw.paper_years.push(year);
        self.raw.paper_venue.push(venue);
        Ok(())
    }

    fn add_authorship(&mut self, paper: &str, author: &str, position: u32) {
        match (self.papers.get(paper), self.authors.get(author)) {
            (Some(&p), Some(&a)) => self.raw.authorship.push((p, position, a)),
            _ => self.report.dropped_author_refs += 1,
        }
    }

    fn add_citation(&mut self, citing: &str, cited: &str) {
        match (self.papers.get(citing), self.papers.get(cited)) {
            (Some(&p), Some(&q)) => self.raw.citations.push((p, q)),
            _ => self.report.dropped_citation_refs += 1,
        }
    }

    fn finish(self) -> Result<(Corpus, ValidationReport)> {
        let mut report = self.report;
        let corpus = self.raw.finish(&mut report)?;
        Ok((corpus, report))
    }
}

// ---------------------------------------------------------------------------
// TSV ingestion and emission
// ---------------------------------------------------------------------------

fn for_each_row(
    path: &Path,
    header: &[&str],
    mut f: impl FnMut(usize, &[&str]) -> Result<()>,
) -> Result<()> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file = path.display().to_string();
    let mut seen_header = false;
    let mut fields: Vec<&str> = Vec::with_capacity(header.len());
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        fields.clear();
        fields.extend(line.split('\t'));
        if fields.len() != header.len() {
            return Err(Error::Parse {
                file,
                line: line_no,
                message: format!("expected {} columns, found {}", header.len(), fields.len()),
            });
        }
        if !seen_header {
            seen_header = true;
            let got: Vec<&str> = fields.iter().map(|s| s.trim()).collect();
            if got != header {
                return Err(Error::Parse {
                    file,
                    line: line_no,
                    message: format!("expected header `{}`", header.join("\t")),
                });
            }
            continue;
        }
        if fields[0].is_empty() {
            return Err(Error::Parse {
                file,
                line: line_no,
                message: "empty id".to_string(),
            });
        }
        f(line_no, &fields).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                file: file.clone(),
                line: line_no,
                message,
            },
            other => other,
        })?;
    }
    Ok(())
}

fn optional(field: &str) -> Option<&str> {
    match field.trim() {
        ABSENT | "" => None,
        s => Some(s),
    }
}

fn parse_err(message: String) -> Error {
    // file and line are filled in by `for_each_row`
    Error::Parse {
        file: String::new(),
        line: 0,
        message,
    }
}

/// Reads and links the six TSV files.
pub fn load_corpus(paths: &CorpusPaths) -> Result<(Corpus, ValidationReport)> {
    let mut linker = Linker::default();
    for_each_row(&paths.institutions, &INSTITUTIONS_HEADER, |_, f| {
        linker.add_institution(f[0], f[1])
    })?;
    for_each_row(&paths.venues, &VENUES_HEADER, |_, f| linker.add_venue(f[0], f[1]))?;
    for_each_row(&paths.authors, &AUTHORS_HEADER, |_, f| {
        linker.add_author(f[0], f[1], optional(f[2]))
    })?;
    for_each_row(&paths.papers, &PAPERS_HEADER, |_, f| {
        let year = optional(f[1])
            .map(|y| {
                y.parse::<i32>()
                    .map_err(|_| parse_err(format!("invalid year `{y}`")))
            })
            .transpose()?;
        let domains = optional(f[3])
            .into_iter()
            .flat_map(|d| d.split(','))
            .map(str::trim)
            .filter(|d| !d.is_empty());
        linker.add_paper(f[0], year, optional(f[2]), domains)
    })?;
    for_each_row(&paths.authorship, &AUTHORSHIP_HEADER, |_, f| {
        let pos = f[2]
            .trim()
            .parse::<u32>()
            .map_err(|_| parse_err(format!("invalid author position `{}`", f[2])))?;
        linker.add_authorship(f[0], f[1].trim(), pos);
        Ok(())
    })?;
    for_each_row(&paths.citations, &CITATIONS_HEADER, |_, f| {
        linker.add_citation(f[0], f[1].trim());
        Ok(())
    })?;
    linker.finish()
}

fn check_field(value: &str) -> Result<&str> {
    if value.contains(['\t', '\n', '\r']) {
        return Err(Error::InvalidConfig(format!(
            "field `{}` contains a tab or line break",
            value.escape_debug()
        )));
    }
    Ok(value)
}

fn write_file(path: &Path, header: &[&str], body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let res = (|| {
        writeln!(w, "{}", header.join("\t"))?;
        Ok::<_, std::io::Error>(())
    })();
    res.map_err(|e| Error::io(path, e))?;
    body(&mut w)?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes the corpus in the ingestion format; [`load_corpus`] reads it back
/// to an identical corpus.
pub fn write_corpus_tsv(corpus: &Corpus, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let paths = CorpusPaths::in_dir(dir);
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |e: std::io::Error| Error::io(path.clone(), e)
    };

    write_file(&paths.institutions, &INSTITUTIONS_HEADER, |w| {
        for i in 0..corpus.n_institutions() {
            writeln!(
                w,
                "{}\t{}",
                check_field(&corpus.institution_ids[i])?,
                check_field(&corpus.institution_names[i])?
            )
            .map_err(io(&paths.institutions))?;
        }
        Ok(())
    })?;
    write_file(&paths.venues, &VENUES_HEADER, |w| {
        for v in 0..corpus.n_venues() {
            writeln!(
                w,
                "{}\t{}",
                check_field(&corpus.venue_ids[v])?,
                check_field(&corpus.venue_names[v])?
            )
            .map_err(io(&paths.venues))?;
        }
        Ok(())
    })?;
    write_file(&paths.authors, &AUTHORS_HEADER, |w| {
        for a in 0..corpus.n_authors() {
            let inst = corpus.author_institution[a]
                .map(|i| corpus.institution_ids[i as usize].as_str())
                .unwrap_or(ABSENT);
            writeln!(
                w,
                "{}\t{}\t{}",
                check_field(&corpus.author_ids[a])?,
                check_field(&corpus.author_names[a])?,
                inst
            )
            .map_err(io(&paths.authors))?;
        }
        Ok(())
    })?;
    write_file(&paths.papers, &PAPERS_HEADER, |w| {
        for p in 0..corpus.n_papers() {
            let year = corpus.paper_years[p]
                .map(|y| y.to_string())
                .unwrap_or_else(|| ABSENT.to_string());
            let venue = corpus.paper_venue[p]
                .map(|v| corpus.venue_ids[v as usize].as_str())
                .unwrap_or(ABSENT);
            let domains: Vec<&str> = corpus
                .paper_domains
                .row(p)
                .iter()
                .map(|&d| corpus.domain_ids[d as usize].as_str())
                .collect();
            if domains.iter().any(|d| d.contains(',')) {
                return Err(Error::InvalidConfig(format!(
                    "domain id in paper `{}` contains a comma",
                    corpus.paper_ids[p]
                )));
            }
            let domains = if domains.is_empty() {
                ABSENT.to_string()
            } else {
                domains.join(",")
            };
            writeln!(
                w,
                "{}\t{}\t{}\t{}",
                check_field(&corpus.paper_ids[p])?,
                year,
                venue,
                check_field(&domains)?
            )
            .map_err(io(&paths.papers))?;
        }
        Ok(())
    })?;
    write_file(&paths.authorship, &AUTHORSHIP_HEADER, |w| {
        for p in 0..corpus.n_papers() {
            for (pos, &a) in corpus.paper_authors.row(p).iter().enumerate() {
                writeln!(
                    w,
                    "{}\t{}\t{}",
                    corpus.paper_ids[p],
                    corpus.author_ids[a as usize],
                    pos + 1
                )
                .map_err(io(&paths.authorship))?;
            }
        }
        Ok(())
    })?;
    write_file(&paths.citations, &CITATIONS_HEADER, |w| {
        for (p, q) in corpus.citations.pairs() {
            writeln!(
                w,
                "{}\t{}",
                corpus.paper_ids[p as usize], corpus.paper_ids[q as usize]
            )
            .map_err(io(&paths.citations))?;
        }
        Ok(())
    })?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Views
// ---------------------------------------------------------------------------

/// What paper subset a view covers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewScope {
    /// Every paper, plus authors and venues that have no papers.
    Full,
    /// Union of all domain-tagged papers.
    Overall,
    Domain(String),
}

impl fmt::Display for ViewScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViewScope::Full => f.write_str("full"),
            ViewScope::Overall => f.write_str("overall"),
            ViewScope::Domain(d) => write!(f, "domain:{d}"),
        }
    }
}

/// A corpus restricted to a paper subset.
///
/// All indices inside a view are local and dense; local order follows the
/// corpus order, so every local index list is sorted by id as well.
#[derive(Debug, Clone)]
pub struct DomainView<'c> {
    corpus: &'c Corpus,
    scope: ViewScope,
    self_citations_excluded: bool,
    papers: Vec<u32>,
    authors: Vec<u32>,
    venues: Vec<u32>,
    paper_authors: Csr,
    author_papers: Csr,
    citations: Csr,
    paper_venue: Vec<Option<u32>>,
    venue_papers: Csr,
}

/// Structural equality: same corpus, same papers, authors, venues and edges.
/// The scope label and the self-citation flag are ignored.
impl PartialEq for DomainView<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.corpus, other.corpus)
            && self.papers == other.papers
            && self.authors == other.authors
            && self.venues == other.venues
            && self.paper_authors == other.paper_authors
            && self.citations == other.citations
            && self.paper_venue == other.paper_venue
    }
}

fn local_map(n_global: usize, members: &[u32]) -> Vec<u32> {
    let mut map = vec![NO_INDEX; n_global];
    for (local, &g) in members.iter().enumerate() {
        map[g as usize] = local as u32;
    }
    map
}

impl<'c> DomainView<'c> {
    fn build(corpus: &'c Corpus, scope: ViewScope, papers: Vec<u32>, include_isolated: bool) -> Self {
        debug_assert!(papers.windows(2).all(|w| w[0] < w[1]));
        let (authors, venues) = if include_isolated {
            (
                (0..corpus.n_authors() as u32).collect::<Vec<_>>(),
                (0..corpus.n_venues() as u32).collect::<Vec<_>>(),
            )
        } else {
            let mut authors: Vec<u32> = papers
                .iter()
                .flat_map(|&p| corpus.paper_authors.row(p as usize).iter().copied())
                .collect();
            authors.sort_unstable();
            authors.dedup();
            let mut venues: Vec<u32> = papers
                .iter()
                .filter_map(|&p| corpus.paper_venue[p as usize])
                .collect();
            venues.sort_unstable();
            venues.dedup();
            (authors, venues)
        };
        let paper_map = local_map(corpus.n_papers(), &papers);
        let author_map = local_map(corpus.n_authors(), &authors);
        let venue_map = local_map(corpus.n_venues(), &venues);

        let author_rows: Vec<Vec<u32>> = papers
            .iter()
            .map(|&p| {
                corpus
                    .paper_authors
                    .row(p as usize)
                    .iter()
                    .map(|&a| author_map[a as usize])
                    .collect()
            })
            .collect();
        let paper_authors = Csr::from_rows(&author_rows);
        let author_papers = paper_authors.transpose(authors.len());

        let citations = Csr::from_sorted_pairs(
            papers.len(),
            papers.iter().enumerate().flat_map(|(local, &p)| {
                let paper_map = &paper_map;
                corpus
                    .citations
                    .row(p as usize)
                    .iter()
                    .filter_map(move |&q| {
                        let lq = paper_map[q as usize];
                        (lq != NO_INDEX).then_some((local as u32, lq))
                    })
            }),
        );

        let paper_venue: Vec<Option<u32>> = papers
            .iter()
            .map(|&p| corpus.paper_venue[p as usize].map(|v| venue_map[v as usize]))
            .collect();
        let venue_rows: Vec<Option<u32>> = paper_venue.clone();
        let venue_papers = Csr::from_rows(
            &venue_rows
                .iter()
                .map(|v| v.map(|v| vec![v]).unwrap_or_default())
                .collect::<Vec<_>>(),
        )
        .transpose(venues.len());

        DomainView {
            corpus,
            scope,
            self_citations_excluded: false,
            papers,
            authors,
            venues,
            paper_authors,
            author_papers,
            citations,
            paper_venue,
            venue_papers,
        }
    }

    pub fn corpus(&self) -> &'c Corpus {
        self.corpus
    }

    pub fn scope(&self) -> &ViewScope {
        &self.scope
    }

    pub fn self_citations_excluded(&self) -> bool {
        self.self_citations_excluded
    }

    pub fn n_papers(&self) -> usize {
        self.papers.len()
    }

    pub fn n_authors(&self) -> usize {
        self.authors.len()
    }

    pub fn n_venues(&self) -> usize {
        self.venues.len()
    }

    /// Corpus indices of the view's papers.
    pub fn papers(&self) -> &[u32] {
        &self.papers
    }

    /// Corpus indices of the view's authors.
    pub fn authors(&self) -> &[u32] {
        &self.authors
    }

    /// Corpus indices of the view's venues.
    pub fn venues(&self) -> &[u32] {
        &self.venues
    }

    pub fn paper_id(&self, local: usize) -> &'c str {
        self.corpus.paper_id(self.papers[local] as usize)
    }

    pub fn author_id(&self, local: usize) -> &'c str {
        self.corpus.author_id(self.authors[local] as usize)
    }

    pub fn venue_id(&self, local: usize) -> &'c str {
        self.corpus.venue_id(self.venues[local] as usize)
    }

    pub fn paper_year(&self, local: usize) -> Option<i32> {
        self.corpus.paper_year(self.papers[local] as usize)
    }

    pub fn author_ids(&self) -> Vec<String> {
        (0..self.n_authors()).map(|a| self.author_id(a).to_string()).collect()
    }

    pub fn venue_ids(&self) -> Vec<String> {
        (0..self.n_venues()).map(|v| self.venue_id(v).to_string()).collect()
    }

    pub fn author_local(&self, id: &str) -> Option<usize> {
        let g = self.corpus.author_index(id)? as u32;
        self.authors.binary_search(&g).ok()
    }

    pub fn paper_local(&self, id: &str) -> Option<usize> {
        let g = self.corpus.paper_index(id)? as u32;
        self.papers.binary_search(&g).ok()
    }

    /// Local paper -> local authors, byline order.
    pub fn paper_authors(&self) -> &Csr {
        &self.paper_authors
    }

    /// Local author -> local papers, sorted.
    pub fn author_papers(&self) -> &Csr {
        &self.author_papers
    }

    /// Local paper -> local cited papers (induced edges only), sorted.
    pub fn citations(&self) -> &Csr {
        &self.citations
    }

    pub fn paper_venue(&self) -> &[Option<u32>] {
        &self.paper_venue
    }

    /// Local venue -> local papers, sorted.
    pub fn venue_papers(&self) -> &Csr {
        &self.venue_papers
    }

    /// In-view citation count of every local paper.
    pub fn indegrees(&self) -> Vec<u32> {
        let mut indeg = vec![0u32; self.n_papers()];
        for (_, q) in self.citations.pairs() {
            indeg[q as usize] += 1;
        }
        indeg
    }

    /// This view restricted to the papers that also carry `domain`.
    pub fn restrict(&self, domain: &str) -> Result<DomainView<'c>> {
        let d = self
            .corpus
            .domain_index(domain)
            .ok_or_else(|| Error::UnknownDomain(domain.to_string()))?;
        let tagged = self.corpus.domain_papers.row(d);
        let papers: Vec<u32> = self
            .papers
            .iter()
            .copied()
            .filter(|p| tagged.binary_search(p).is_ok())
            .collect();
        let view = DomainView::build(
            self.corpus,
            ViewScope::Domain(domain.to_string()),
            papers,
            false,
        );
        Ok(if self.self_citations_excluded {
            view.exclude_self_citations()
        } else {
            view
        })
    }

    /// Drops every citation `p -> q` where `p` and `q` share an author.
    pub fn exclude_self_citations(&self) -> DomainView<'c> {
        let sorted_authors: Vec<Vec<u32>> = self
            .paper_authors
            .rows()
            .map(|r| {
                let mut r = r.to_vec();
                r.sort_unstable();
                r
            })
            .collect();
        let citations = self.citations.filter(|p, q| {
            !sorted_intersect(&sorted_authors[p], &sorted_authors[q as usize])
        });
        DomainView {
            citations,
            self_citations_excluded: true,
            ..self.clone()
        }
    }
}

fn sorted_intersect(a: &[u32], b: &[u32]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Free-function forms of the view constructors.
pub fn domain_view<'c>(corpus: &'c Corpus, domain: &str) -> Result<DomainView<'c>> {
    corpus.domain_view(domain)
}

pub fn merge_overall(corpus: &Corpus) -> DomainView<'_> {
    corpus.merge_overall()
}

pub fn exclude_self_citations<'c>(view: &DomainView<'c>) -> DomainView<'c> {
    view.exclude_self_citations()
}
