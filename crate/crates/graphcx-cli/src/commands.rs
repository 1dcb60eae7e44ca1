use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use graphcx::complexes::{differential_d, differential_d0, differential_h, Differential};
use graphcx::graph::is_admissible;
use graphcx::linalg::{homology_dims, ChainComplexWindow, RankMode};
use graphcx::ribbon::{self, RibbonGraph};
use graphcx::total::{fixed_hair_complex, fixed_source_complex};
use graphcx::verify::{self, Bounds, CheckReport};
use graphcx::{Exec, Family, FamilyTag, LabeledDiGraph, SliceKey, SliceStore};
use serde_json::json;

use crate::cache::{write_atomic, Cache};
use crate::{CliError, FamilyArg, JobSpec, Target};

const DEFAULT_CACHE: &str = "graphcx-cache";

pub struct Context {
    spec: JobSpec,
    store: SliceStore,
    cache: Option<Cache>,
}

fn family_names(f: FamilyArg) -> &'static [&'static str] {
    match f {
        FamilyArg::Directed => &["directed"],
        FamilyArg::Oriented | FamilyArg::Sourced => &["oriented", "sourced"],
        FamilyArg::Hairy => &["hairy", "oriented"],
        FamilyArg::Ribbon => &["oriented"],
    }
}

fn ribbon_json(r: &RibbonGraph) -> serde_json::Value {
    serde_json::from_str(&r.to_json()).expect("ribbon graph serialization")
}

impl Context {
    pub fn new(spec: JobSpec, exec: Exec) -> Result<Self, CliError> {
        let mut store = SliceStore::new(exec);
        store.max_vertices = crate::MAX_V;
        let cache = match (&spec.cache, spec.command.as_str()) {
            (Some(p), _) => Some(Cache::new(p)),
            (None, "gen" | "diff") => Some(Cache::new(DEFAULT_CACHE)),
            _ => None,
        };
        if let Some(c) = &cache {
            for name in family_names(spec.family) {
                for n in [spec.n, spec.n + 1] {
                    c.load(&store, name, n)?;
                }
            }
        }
        Ok(Context { spec, store, cache })
    }

    fn mode(&self) -> RankMode {
        if self.spec.exact {
            RankMode::Exact
        } else {
            RankMode::Modular
        }
    }

    fn bounds(&self) -> Bounds {
        Bounds { vmax: self.spec.vmax, emax: self.spec.emax, smax: self.spec.smax }
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.spec.out {
            Some(p) => write_atomic(p, text.as_bytes()),
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }

    fn persist(&self) -> Result<(), CliError> {
        if let Some(c) = &self.cache {
            c.save(&self.store)?;
        }
        Ok(())
    }

    fn cache_root(&self) -> PathBuf {
        self.spec.cache.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE))
    }

    /// Slices within the bounds, in a fixed order.
    fn keys(&self) -> Result<Vec<SliceKey>, CliError> {
        let s = &self.spec;
        let families: Vec<Family> = match s.family {
            FamilyArg::Directed => vec![Family::Directed],
            FamilyArg::Oriented => vec![Family::Oriented],
            FamilyArg::Sourced => (1..=s.smax).map(Family::Sourced).collect(),
            FamilyArg::Hairy => (1..=s.smax).map(Family::Hairy).collect(),
            FamilyArg::Ribbon => return Err(CliError::Usage("ribbon slices are indexed by edges only".into())),
        };
        let mut keys = Vec::new();
        for f in families {
            for v in 1..=s.vmax {
                for e in v.saturating_sub(1)..=s.emax {
                    keys.push(SliceKey::new(FamilyTag::new(f, s.n), v, e));
                }
            }
        }
        Ok(keys)
    }

    pub fn gen(&self) -> Result<(), CliError> {
        let mut out = String::new();
        if self.spec.family == FamilyArg::Ribbon {
            let dir = self.cache_root().join("ribbon");
            for k in 1..=self.spec.emax {
                let basis = ribbon::rgc_basis(k, None, None)?;
                let mut text = json!({"family": "ribbon", "k": k, "degree": ribbon::ribbon_degree(k)}).to_string();
                text.push('\n');
                for r in &basis {
                    text.push_str(&r.to_json());
                    text.push('\n');
                }
                write_atomic(&dir.join(format!("{k}.basis.jsonl")), text.as_bytes())?;
                out.push_str(&json!({"family": "ribbon", "k": k, "dim": basis.len()}).to_string());
                out.push('\n');
            }
            return self.emit(&out);
        }
        let cache = self.cache.as_ref().expect("gen always has a cache");
        for key in self.keys()? {
            let slice = self.store.get(key)?;
            let path = cache.path(&key, "basis.jsonl");
            write_atomic(&path, slice.to_jsonl().as_bytes())?;
            out.push_str(&slice_line(&key, json!({"dim": slice.len()})).to_string());
            out.push('\n');
        }
        self.emit(&out)
    }

    pub fn diff(&self) -> Result<(), CliError> {
        let mut out = String::new();
        if self.spec.family == FamilyArg::Ribbon {
            let dir = self.cache_root().join("ribbon");
            for k in 1..self.spec.emax {
                let (src, dst) = (ribbon::rgc_basis(k, None, None)?, ribbon::rgc_basis(k + 1, None, None)?);
                for (name, op) in [("delta", ribbon::delta as fn(&RibbonGraph) -> _), ("delta1", ribbon::delta1)] {
                    let m = ribbon::ribbon_matrix(&src, &dst, op)?;
                    write_atomic(&dir.join(format!("{k}.{name}.mat")), m.to_text().as_bytes())?;
                    out.push_str(&json!({"family": "ribbon", "k": k, "op": name, "rows": dst.len(), "cols": src.len(), "nnz": m.nnz()}).to_string());
                    out.push('\n');
                }
            }
            return self.emit(&out);
        }
        let cache = self.cache.as_ref().expect("diff always has a cache");
        for key in self.keys()? {
            let slice = self.store.get(key)?;
            let mut ops: Vec<(&str, Differential)> = vec![("d", differential_d(&self.store, &slice)?)];
            match key.tag.family {
                Family::Hairy(_) => ops.push(("h", differential_h(&self.store, &slice)?)),
                // d0 only acts on oriented slices with a fixed source count
                Family::Oriented if key.sources.is_none() => {}
                Family::Oriented | Family::Sourced(_) => ops.push(("d0", differential_d0(&self.store, &slice)?)),
                Family::Directed => {}
            }
            for (name, d) in ops {
                let targets: Vec<String> = d.dst.iter().map(|s| s.key.to_string()).collect();
                write_atomic(&cache.path(&key, &format!("{name}.mat")), d.matrix.to_text().as_bytes())?;
                let info = json!({"op": name, "rows": d.matrix.rows, "cols": d.matrix.cols, "nnz": d.matrix.nnz(), "targets": targets});
                out.push_str(&slice_line(&key, info).to_string());
                out.push('\n');
            }
        }
        self.persist()?;
        self.emit(&out)
    }

    fn windows(&self) -> Result<Vec<(serde_json::Value, ChainComplexWindow)>, CliError> {
        let s = &self.spec;
        let b = s.loop_order;
        let mut out = Vec::new();
        match s.family {
            FamilyArg::Ribbon => out.push((json!({"family": "ribbon"}), ribbon::rgc_window(s.emax, false)?)),
            FamilyArg::Directed => {
                return Err(CliError::Usage("homology is available for hairy, oriented, sourced and ribbon".into()))
            }
            fam => {
                for hairs in 1..=s.smax {
                    let w = match fam {
                        FamilyArg::Hairy => fixed_hair_complex(&self.store, s.n, hairs, b)?,
                        _ => fixed_source_complex(&self.store, s.n, hairs, b, (1, s.vmax), fam == FamilyArg::Sourced)?,
                    };
                    let name = match fam {
                        FamilyArg::Hairy => "hairy",
                        FamilyArg::Sourced => "sourced",
                        _ => "oriented",
                    };
                    out.push((json!({"family": name, "n": s.n, "loop": b, "s": hairs}), w.window));
                }
            }
        }
        Ok(out)
    }

    pub fn homology(&self) -> Result<(), CliError> {
        let mut out = String::new();
        for (mut head, w) in self.windows()? {
            let h = homology_dims(&w, self.mode())?;
            let degrees: Vec<_> = h.degrees.iter().filter(|d| self.spec.in_window(d.degree)).collect();
            head["degrees"] = serde_json::to_value(degrees)?;
            head["euler_chain"] = json!(h.euler_chain());
            head["euler_homology"] = json!(h.euler_homology());
            out.push_str(&head.to_string());
            out.push('\n');
        }
        self.persist()?;
        self.emit(&out)
    }

    fn quasi_iso(&self, target: Target) -> Result<CheckReport, CliError> {
        let s = &self.spec;
        let name = if target == Target::QuasiIsoPhi { "quasi-iso-phi" } else { "quasi-iso-p" };
        let mut rep = CheckReport::new(name);
        for hairs in 1..=s.smax {
            let q = if target == Target::QuasiIsoPhi {
                verify::quasi_iso_phi(&self.store, s.n, hairs, s.loop_order, s.vmax, self.mode())?
            } else {
                verify::quasi_iso_p(&self.store, s.n, hairs, s.loop_order, s.vmax, self.mode())?
            };
            for r in q.records.iter().filter(|r| s.in_window(r.degree)) {
                rep.checked += 1;
                if r.status != "iso" && r.status != "boundary" && rep.failure.is_none() {
                    rep.failure = Some(format!(
                        "s={hairs} degree {}: homology {} vs {}, induced rank {}",
                        r.degree, r.h_src, r.h_dst, r.induced_rank
                    ));
                }
            }
        }
        Ok(rep)
    }

    pub fn verify(&self, target: Target) -> Result<(), CliError> {
        let s = &self.spec;
        let b = self.bounds();
        let rep = match target {
            Target::D2 => match s.family {
                FamilyArg::Ribbon => verify::check_ribbon_squares(s.emax)?,
                f => {
                    let fam = match f {
                        FamilyArg::Directed => Family::Directed,
                        FamilyArg::Oriented => Family::Oriented,
                        FamilyArg::Sourced => Family::Sourced(1),
                        _ => Family::Hairy(1),
                    };
                    let mut rep = verify::check_squares(&self.store, fam, s.n, &b)?;
                    rep.merge(verify::check_relabeling(&self.store, fam, s.n, &b, s.seed, 2)?);
                    rep
                }
            },
            Target::ChainmapPhi => verify::check_phi_chain_map(&self.store, s.n, &b)?,
            Target::ChainmapF => verify::check_f_chain_map(&self.store, &b)?,
            Target::QuasiIsoPhi | Target::QuasiIsoP => self.quasi_iso(target)?,
            Target::RgcD2 => verify::check_ribbon_squares(s.emax.min(ribbon::MAX_BASIS_EDGES))?,
            Target::LemmaIdentities => verify::check_lemma_identities(&self.store, s.n, &b)?,
        };
        self.persist()?;
        let line = json!({"target": rep.name, "passed": rep.passed(), "checked": rep.checked, "failure": rep.failure});
        self.emit(&format!("{line}\n"))?;
        match rep.failure {
            Some(f) => Err(CliError::Failure(f)),
            None => Ok(()),
        }
    }

    pub fn phi(&self, path: &Path) -> Result<(), CliError> {
        let g = read_graph(path)?;
        let tag = FamilyTag::new(Family::Hairy(g.s()), self.spec.n);
        if !is_admissible(&g, &tag) {
            return Err(CliError::Usage(format!("{g} is not an admissible hairy graph")));
        }
        let mut out = String::new();
        for (h, c) in graphcx::forest::phi(&g, &tag)? {
            out.push_str(&json!({"coeff": c, "graph": h}).to_string());
            out.push('\n');
        }
        self.emit(&out)
    }

    pub fn fmap(&self, path: &Path) -> Result<(), CliError> {
        let g = read_graph(path)?;
        if !is_admissible(&g, &FamilyTag::new(Family::Oriented, 1)) {
            return Err(CliError::Usage(format!("{g} is not an admissible oriented graph")));
        }
        let mut out = String::new();
        for (r, c) in ribbon::f_map(&g)? {
            out.push_str(&json!({"coeff": c.to_string(), "graph": ribbon_json(&r)}).to_string());
            out.push('\n');
        }
        self.emit(&out)
    }
}

fn slice_line(key: &SliceKey, extra: serde_json::Value) -> serde_json::Value {
    let mut line = json!({
        "family": key.tag.family.name(),
        "n": key.tag.n,
        "v": key.v,
        "e": key.e,
        "s": key.s(),
        "degree": key.degree(),
    });
    if let (Some(obj), serde_json::Value::Object(more)) = (line.as_object_mut(), extra) {
        obj.extend(more);
    }
    line
}

fn read_graph(path: &Path) -> Result<LabeledDiGraph, CliError> {
    let text = fs::read_to_string(path)?;
    let g: LabeledDiGraph = serde_json::from_str(&text)?;
    if !g.is_well_formed() {
        return Err(CliError::Usage(format!("malformed graph in {}", path.display())));
    }
    Ok(g)
}
