//! Command dispatch over a loaded site file.

use std::fmt::Write as _;
use std::str::FromStr;

use descent_core::bundle::{equivariant_projection, is_principal_bundle};
use descent_core::corpus::{exhaustive_corpus, random_corpus_for, InstanceShape};
use descent_core::descent::{
    glue_morphisms, glue_object, verify_stack, DescentError, StackReport, Tally,
};
use descent_core::site::{check_sheaf_condition, is_canonical_cover, SheafBounds};
use descent_core::stack::classifying_fiber_equiv;
use descent_core::FinMap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{violation_name, Entity, SiteFile};
use crate::report::{Check, Report};
use crate::syntax::write_atom;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    CheckGroup,
    CheckAction,
    CheckBundle,
    CheckCover,
    CheckSheaf,
    GlueMorphisms,
    GlueObject,
    VerifyStack,
    Classify,
}

pub const COMMANDS: [(&str, Command); 9] = [
    ("check-group", Command::CheckGroup),
    ("check-action", Command::CheckAction),
    ("check-bundle", Command::CheckBundle),
    ("check-cover", Command::CheckCover),
    ("check-sheaf", Command::CheckSheaf),
    ("glue-morphisms", Command::GlueMorphisms),
    ("glue-object", Command::GlueObject),
    ("verify-stack", Command::VerifyStack),
    ("classify", Command::Classify),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown command `{0}`; expected one of check-group, check-action, check-bundle, check-cover, check-sheaf, glue-morphisms, glue-object, verify-stack, classify")]
pub struct UnknownCommand(pub String);

impl FromStr for Command {
    type Err = UnknownCommand;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        COMMANDS
            .iter()
            .find(|(n, _)| *n == s)
            .map(|(_, c)| *c)
            .ok_or_else(|| UnknownCommand(s.to_string()))
    }
}

impl Command {
    pub fn name(self) -> &'static str {
        COMMANDS.iter().find(|(_, c)| *c == self).expect("listed").0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub seed: u64,
    /// Random samples for canonical-cover checks and random stack instances.
    pub budget: usize,
    /// Cap on exhaustive enumerations.
    pub bound: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: 0,
            budget: 200,
            bound: 1 << 16,
        }
    }
}

fn show_map(m: &FinMap) -> String {
    let mut s = String::from("{");
    for (i, a) in m.src().atoms().iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        write_atom(&mut s, a).expect("string write");
        s.push_str(": ");
        write_atom(&mut s, m.dst().atom(m.at(i))).expect("string write");
    }
    s.push('}');
    s
}

fn none_declared(what: &str) -> Vec<Check> {
    vec![Check::error(
        "site",
        "NothingToCheck",
        format!("site declares no {what}"),
    )]
}

pub fn run(command: Command, site: &SiteFile, site_name: &str, opts: Options) -> Report {
    let checks = match command {
        Command::CheckGroup => check_groups(site),
        Command::CheckAction => check_actions(site),
        Command::CheckBundle => check_bundles(site),
        Command::CheckCover => check_covers(site, opts),
        Command::CheckSheaf => check_sheaves(site),
        Command::GlueMorphisms => glue_all_morphisms(site),
        Command::GlueObject => glue_all_objects(site),
        Command::VerifyStack => verify_stacks(site, opts),
        Command::Classify => classify(site, opts),
    };
    Report::new(command.name(), site_name, checks)
}

fn check_groups(site: &SiteFile) -> Vec<Check> {
    let checks: Vec<Check> = site
        .of_kind(|e| match e {
            Entity::Group(g) => Some(g),
            _ => None,
        })
        .map(|(name, g)| {
            Check::pass(
                name,
                format!(
                    "group of order {} with unit {}",
                    g.order(),
                    g.carrier().atom(g.unit())
                ),
            )
        })
        .collect();
    if checks.is_empty() {
        none_declared("groups")
    } else {
        checks
    }
}

fn check_actions(site: &SiteFile) -> Vec<Check> {
    let mut checks = Vec::new();
    for (name, e) in &site.entities {
        match e {
            Entity::Action(a) => checks.push(Check::pass(
                name,
                format!(
                    "action on {} points, {} orbits, {}",
                    a.space().len(),
                    a.orbits().len(),
                    if a.is_free() { "free" } else { "not free" }
                ),
            )),
            Entity::Equivariant(m) => checks.push(Check::pass(
                name,
                format!("equivariant map {}", show_map(m.map())),
            )),
            _ => {}
        }
    }
    if checks.is_empty() {
        none_declared("actions or equivariant maps")
    } else {
        checks
    }
}

fn check_bundles(site: &SiteFile) -> Vec<Check> {
    let checks: Vec<Check> = site
        .of_kind(|e| match e {
            Entity::Bundle(b) => Some(b),
            _ => None,
        })
        .map(
            |(name, b)| match equivariant_projection(&b.total, &b.proj) {
                Err(e) => Check::fail(name, violation_name(&e), e.to_string()),
                Ok(proj) => match is_principal_bundle(&proj) {
                    Ok(bundle) => Check::pass(
                        name,
                        format!(
                            "principal bundle over {} points with fibers of size {}",
                            bundle.base().len(),
                            bundle.group().order()
                        ),
                    ),
                    Err(nb) => Check::fail(name, "NotBundle", nb.to_string()),
                },
            },
        )
        .collect();
    if checks.is_empty() {
        none_declared("bundles")
    } else {
        checks
    }
}

fn check_covers(site: &SiteFile, opts: Options) -> Vec<Check> {
    let checks: Vec<Check> = site
        .of_kind(|e| match e {
            Entity::Cover(c) => Some(c),
            _ => None,
        })
        .map(|(name, c)| {
            if is_canonical_cover(c, opts.budget, opts.seed) {
                Check::pass(name, format!("canonical cover with {} legs", c.len()))
            } else {
                let missed = (0..c.target().len())
                    .find(|&y| c.legs().iter().all(|l| !l.table().contains(&y)))
                    .expect("a non-canonical family misses a point");
                Check::fail(
                    name,
                    "NotCanonical",
                    format!("{} is not in the image of any leg", c.target().atom(missed)),
                )
            }
        })
        .collect();
    if checks.is_empty() {
        none_declared("covers")
    } else {
        checks
    }
}

fn check_sheaves(site: &SiteFile) -> Vec<Check> {
    let sets: Vec<_> = site
        .of_kind(|e| match e {
            Entity::Set(s) => Some(s),
            _ => None,
        })
        .collect();
    let mut checks = Vec::new();
    for (cname, c) in site.of_kind(|e| match e {
        Entity::Cover(c) => Some(c),
        _ => None,
    }) {
        for (sname, s) in &sets {
            let name = format!("{cname} against {sname}");
            checks.push(match check_sheaf_condition(c, s, SheafBounds::default()) {
                Ok(true) => Check::pass(name, "matching families glue uniquely"),
                Ok(false) => Check::fail(
                    name,
                    "SheafFail",
                    "some matching family does not glue uniquely",
                ),
                Err(e) => Check::error(name, violation_name(&e), e.to_string()),
            });
        }
    }
    if checks.is_empty() {
        none_declared("cover and set pairs")
    } else {
        checks
    }
}

fn descent_failure(name: &str, e: &DescentError) -> Check {
    match e {
        DescentError::CocycleRequired(c) => Check::fail(
            name,
            "CocycleFail",
            format!("CocycleFail({},{},{}) at {}", c.i, c.j, c.k, c.point),
        ),
        e => Check::fail(name, violation_name(e), e.to_string()),
    }
}

fn glue_all_morphisms(site: &SiteFile) -> Vec<Check> {
    let checks: Vec<Check> = site
        .of_kind(|e| match e {
            Entity::Gluing(g) => Some(g),
            _ => None,
        })
        .map(
            |(name, g)| match glue_morphisms(&g.cover, &g.src, &g.dst, &g.locals) {
                Ok(eta) => Check::pass(name, format!("glued to {}", show_map(&eta.map))),
                Err(e) => descent_failure(name, &e),
            },
        )
        .collect();
    if checks.is_empty() {
        none_declared("gluings")
    } else {
        checks
    }
}

fn glue_all_objects(site: &SiteFile) -> Vec<Check> {
    let checks: Vec<Check> = site
        .of_kind(|e| match e {
            Entity::Datum(d) => Some(d),
            _ => None,
        })
        .map(|(name, d)| match glue_object(d) {
            Ok(r) => Check::pass(
                name,
                format!(
                    "glued object with {} points over {} with α = {}",
                    r.glued.total_space().len(),
                    r.glued.base(),
                    show_map(r.glued.alpha())
                ),
            ),
            Err(e) => descent_failure(name, &e),
        })
        .collect();
    if checks.is_empty() {
        none_declared("descent data")
    } else {
        checks
    }
}

fn tally(t: &Tally) -> String {
    format!("{}/{}", t.passed, t.checked)
}

fn summarize(r: &StackReport) -> String {
    format!(
        "effectiveness {}, gluing {}, uniqueness {}, rejected inputs {}",
        tally(&r.effectiveness),
        tally(&r.gluing),
        tally(&r.uniqueness),
        r.rejected.len()
    )
}

fn verify_stacks(site: &SiteFile, opts: Options) -> Vec<Check> {
    let checks: Vec<Check> = site
        .of_kind(|e| match e {
            Entity::Stack(s) => Some(s),
            _ => None,
        })
        .map(|(name, s)| {
            let mut corpus = match exhaustive_corpus(&s.stack, s.max_base, opts.bound) {
                Ok(c) => c,
                Err(e) => return Check::error(name, violation_name(&e), e.to_string()),
            };
            if !s.stack.x_action().space().is_empty() {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                for _ in 0..opts.budget {
                    match random_corpus_for(&mut rng, &s.stack, InstanceShape::default()) {
                        Ok(c) => corpus.extend(c),
                        Err(e) => return Check::error(name, violation_name(&e), e.to_string()),
                    }
                }
            }
            let report = verify_stack(&s.stack, &corpus);
            if report.all_pass() {
                Check::pass(name, summarize(&report))
            } else {
                let first = [&report.effectiveness, &report.gluing, &report.uniqueness]
                    .into_iter()
                    .find_map(|t| t.counterexamples.first())
                    .cloned()
                    .unwrap_or_default();
                let mut detail = summarize(&report);
                let _ = write!(detail, "; first counterexample: {first}");
                Check::fail(name, "StackConditionFail", detail)
            }
        })
        .collect();
    if checks.is_empty() {
        none_declared("stacks")
    } else {
        checks
    }
}

fn classify(site: &SiteFile, opts: Options) -> Vec<Check> {
    let sets: Vec<_> = site
        .of_kind(|e| match e {
            Entity::Set(s) => Some(s),
            _ => None,
        })
        .collect();
    let mut checks = Vec::new();
    for (gname, g) in site.of_kind(|e| match e {
        Entity::Group(g) => Some(g),
        _ => None,
    }) {
        for (sname, s) in &sets {
            let name = format!("B{gname} over {sname}");
            checks.push(match classifying_fiber_equiv(g, s, opts.bound) {
                Ok(r) if r.is_equivalence() => Check::pass(
                    name,
                    format!(
                        "{} objects, {} iso classes, |Aut(trivial)| = {}, {} hom-sets compared",
                        r.bundles, r.bundle_iso_classes, r.trivial_aut_bundle, r.pairs_compared
                    ),
                ),
                Ok(r) => Check::fail(name, "NotEquivalent", format!("{r:?}")),
                Err(e) => Check::error(name, violation_name(&e), e.to_string()),
            });
        }
    }
    if checks.is_empty() {
        none_declared("group and set pairs")
    } else {
        checks
    }
}
