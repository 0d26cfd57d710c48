use algebroid_core::atiyah::{
    build_p1_model, degeneration_check, hypercohomology_atiyah, les_connecting, stability_certificate, truncation_dims,
    AtiyahError,
};
use algebroid_core::cech::{global_obstruction_class, verify_cocycle, NerveCoupling};
use algebroid_core::extension::{
    build_extension, difference_class, extensions_equivalent, obstruction_class, obstruction_class_of, Coupling,
    ExtensionStructure, LiftingPair, ObstructionClass,
};
use algebroid_core::io::{AlgebraFile, CouplingFile, Document, ExtensionFile, NerveCouplingFile};
use algebroid_core::lr::{ce_complex, cohomology, Connection, ValidationReport};
use algebroid_core::spectral::{convergence_check, filtered_de_rham, spectral_sequence};
use algebroid_core::{LieRinehart, RModule};
use serde_json::{json, Map, Value};

use crate::report::{self as r, CliError, Outcome};

fn validation(report: &ValidationReport) -> Value {
    json!({ "valid": report.is_valid(), "failures": r::to_value(&report.failures) })
}

fn checked_algebra(file: &AlgebraFile) -> Result<(LieRinehart, ValidationReport), CliError> {
    let a = file.to_algebra()?;
    let v = a.validate();
    Ok((a, v))
}

fn semantic<T>(res: Result<T, algebroid_core::io::IoError>) -> Result<Result<T, String>, CliError> {
    match res {
        Ok(t) => Ok(Ok(t)),
        Err(algebroid_core::io::IoError::Semantic(m)) => Ok(Err(m)),
        Err(e) => Err(e.into()),
    }
}

fn validate_coupling(file: &CouplingFile) -> Result<(Value, bool), CliError> {
    let (_, vb) = checked_algebra(&file.b)?;
    let (_, vl) = checked_algebra(&file.l)?;
    let coupling = semantic(file.to_coupling())?;
    let problems: Vec<String> = coupling.err().into_iter().collect();
    let ok = vb.is_valid() && vl.is_valid() && problems.is_empty();
    Ok((json!({ "b": validation(&vb), "l": validation(&vl), "coupling_problems": problems }), ok))
}

pub fn validate(doc: &Document) -> Result<Outcome, CliError> {
    let (results, ok) = match doc {
        Document::Algebra(f) => {
            let (_, v) = checked_algebra(f)?;
            (json!({ "kind": "algebra", "algebra": validation(&v) }), v.is_valid())
        }
        Document::Coupling(f) => {
            let (v, ok) = validate_coupling(f)?;
            (json!({ "kind": "coupling", "coupling": v }), ok)
        }
        Document::NerveCoupling(f) => {
            let mut ok = true;
            let mut locals = Vec::new();
            for c in &f.local {
                let (v, good) = validate_coupling(c)?;
                ok &= good;
                locals.push(v);
            }
            let nerve = if ok { semantic(f.to_nerve_coupling())?.err() } else { None };
            ok &= nerve.is_none();
            (
                json!({ "kind": "nerve_coupling", "local": locals, "nerve_problems": nerve.into_iter().collect::<Vec<_>>() }),
                ok,
            )
        }
        Document::Extension(f) => {
            let (b, vb) = checked_algebra(&f.b)?;
            let (l, vl) = checked_algebra(&f.l)?;
            let (total, vt) = checked_algebra(&f.total)?;
            let problems = ExtensionStructure { b, l, total }.validate();
            let ok = vb.is_valid() && vl.is_valid() && vt.is_valid() && problems.is_empty();
            let v = json!({ "b": validation(&vb), "l": validation(&vl), "total": validation(&vt), "extension_problems": problems });
            (json!({ "kind": "extension", "extension": v }), ok)
        }
    };
    Ok(Outcome { results, ok })
}

fn valid_algebra(file: &AlgebraFile) -> Result<LieRinehart, CliError> {
    let (a, v) = checked_algebra(file)?;
    if v.is_valid() {
        Ok(a)
    } else {
        Err(CliError::Math(
            json!({ "kind": "mathematical", "message": "invalid Lie-Rinehart algebra", "validation": validation(&v) }),
        ))
    }
}

fn de_rham(a: &LieRinehart) -> Value {
    let complex =
        ce_complex(a, &Connection::anchor_action(a), &RModule::free(&a.base, 1)).expect("anchor action is flat");
    let classes: Vec<Value> = (0..=a.rank).map(|k| r::classes(&complex.cohomology(k))).collect();
    json!({ "dims": complex.betti(), "classes": classes })
}

fn center_cohomology(c: &Coupling, pair: &LiftingPair) -> Result<Value, CliError> {
    let zc = c.center_connection(&pair.alpha);
    let mut out = Vec::new();
    for k in 0..=c.b.rank {
        let h = cohomology(&c.b, &zc, c.center_module(), k).map_err(|e| CliError::math(e.to_string()))?;
        out.push(r::classes(&h));
    }
    Ok(
        json!({ "center_dim": c.center_module().dim, "dims": out.iter().map(|v| v["dim"].clone()).collect::<Vec<_>>(), "classes": out }),
    )
}

fn coupling_of(f: &CouplingFile) -> Result<Coupling, CliError> {
    valid_algebra(&f.b)?;
    valid_algebra(&f.l)?;
    Ok(f.to_coupling()?)
}

/// Obstruction class from the pair in the file, or from the automatic lift.
fn coupling_obstruction(f: &CouplingFile) -> Result<(Coupling, ObstructionClass), CliError> {
    let c = coupling_of(f)?;
    let ob = match f.lifting_pair(&c)? {
        Some(pair) => obstruction_class_of(&c, pair),
        None => obstruction_class(&c),
    }
    .map_err(|e| CliError::math(e.to_string()))?;
    Ok((c, ob))
}

fn nerve_coupling_of(f: &NerveCouplingFile) -> Result<NerveCoupling, CliError> {
    for c in &f.local {
        coupling_of(c)?;
    }
    Ok(f.to_nerve_coupling()?)
}

fn extension_of(f: &ExtensionFile) -> Result<ExtensionStructure, CliError> {
    valid_algebra(&f.b)?;
    valid_algebra(&f.l)?;
    valid_algebra(&f.total)?;
    Ok(f.to_extension()?)
}

pub fn cohomology_cmd(doc: &Document) -> Result<Outcome, CliError> {
    let results = match doc {
        Document::Algebra(f) => json!({ "kind": "algebra", "de_rham": de_rham(&valid_algebra(f)?) }),
        Document::Coupling(f) => {
            let (c, ob) = coupling_obstruction(f)?;
            json!({ "kind": "coupling", "base_de_rham": de_rham(&c.b), "center": center_cohomology(&c, &ob.pair)? })
        }
        Document::Extension(f) => {
            let e = extension_of(f)?;
            json!({ "kind": "extension", "total_de_rham": de_rham(&e.total), "base_de_rham": de_rham(&e.b) })
        }
        Document::NerveCoupling(f) => {
            let nc = nerve_coupling_of(f)?;
            let tc = nc.truncated_total();
            json!({
                "kind": "nerve_coupling",
                "double_complex_dims": nc.double_complex().dims,
                "truncated_total_dims": tc.complex.betti(),
            })
        }
    };
    Ok(Outcome { results, ok: true })
}

pub fn obstruction(doc: &Document) -> Result<Outcome, CliError> {
    match doc {
        Document::Coupling(f) => {
            let (_, ob) = coupling_obstruction(f)?;
            let results = json!({
                "kind": "coupling",
                "lambda": r::cochain(&ob.lambda),
                "rho": r::cochain(&ob.pair.rho),
                "h3": r::classes(&ob.h3),
                "class": r::vector(&ob.coords),
                "class_is_zero": ob.is_zero(),
                "coboundary_witness": ob.witness.as_ref().map(r::cochain),
                "independent_of_pair": ob.independent_of_pair,
            });
            Ok(Outcome { results, ok: ob.independent_of_pair })
        }
        Document::NerveCoupling(f) => {
            let nc = nerve_coupling_of(f)?;
            let g = global_obstruction_class(&nc).map_err(|e| CliError::math(e.to_string()))?;
            let cocycle = verify_cocycle(&nc, &g.triple);
            let trivialization = g.trivialization.as_ref().map(|t| json!({ "a": r::forms(&t.a), "m": r::forms(&t.m) }));
            let results = json!({
                "kind": "nerve_coupling",
                "lifting_triple": {
                    "rho": g.lifting.pairs.iter().map(|p| r::cochain(&p.rho)).collect::<Vec<_>>(),
                    "phi": r::forms(&g.lifting.phi),
                },
                "obstruction_triple": { "lambda": r::forms(&g.triple.lambda), "t": r::forms(&g.triple.t), "q": r::forms(&g.triple.q) },
                "cocycle_residuals": cocycle.residuals,
                "h3": r::classes(&g.h3),
                "class": r::vector(&g.coords),
                "class_is_zero": g.is_zero(),
                "trivialization": trivialization,
                "independent_of_triple": g.independent_of_triple,
            });
            Ok(Outcome { results, ok: cocycle.is_cocycle() && g.independent_of_triple })
        }
        _ => Err(CliError::input("obstruction expects a coupling or nerve_coupling document")),
    }
}

fn torsor(c: &Coupling, ob: ObstructionClass) -> Result<(Value, bool), CliError> {
    let Some(w) = &ob.witness else {
        return Ok((json!({ "obstruction_class": r::vector(&ob.coords), "extensions_exist": false }), false));
    };
    let pair = LiftingPair {
        alpha: ob.pair.alpha.clone(),
        rho: ob.pair.rho.add(&c.embed_center(w).scale(&algebroid_core::linalg::q(-1))),
    };
    let e = build_extension(c, &pair).map_err(|f| CliError::math(format!("Jacobi failure at {:?}", f.triple)))?;
    let h2 = center_cohomology(c, &ob.pair)?["classes"][2].clone();
    let results = json!({
        "obstruction_class": r::vector(&ob.coords),
        "extensions_exist": true,
        "torsor_h2": h2,
        "base_point": r::to_value(&ExtensionFile::from_extension(&e)),
    });
    Ok((results, true))
}

pub fn classify(doc: &Document, against: Option<&Document>) -> Result<Outcome, CliError> {
    match (doc, against) {
        (Document::Coupling(f), None) => {
            let (c, ob) = coupling_obstruction(f)?;
            let (results, ok) = torsor(&c, ob)?;
            Ok(Outcome { results, ok })
        }
        (Document::Extension(f), None) => {
            let e = extension_of(f)?;
            let c = e.coupling().map_err(|e| CliError::math(e.to_string()))?;
            let ob = obstruction_class(&c).map_err(|e| CliError::math(e.to_string()))?;
            let (results, ok) = torsor(&c, ob)?;
            Ok(Outcome { results, ok })
        }
        (Document::Extension(f), Some(Document::Extension(g))) => {
            let (e1, e2) = (extension_of(f)?, extension_of(g)?);
            let c = e1.coupling().map_err(|e| CliError::math(e.to_string()))?;
            let d = difference_class(&c, &e1, &e2).map_err(|e| CliError::math(e.to_string()))?;
            let w = extensions_equivalent(&c, &e1, &e2).map_err(|e| CliError::math(e.to_string()))?;
            let witness = w.as_ref().map(|w| json!({ "eta": r::cochain(&w.eta), "beta": r::cochain(&w.beta) }));
            let results = json!({
                "difference_form": r::cochain(&d.gamma),
                "h2": r::classes(&d.h2),
                "difference_class": r::vector(&d.coords),
                "equivalent": w.is_some(),
                "witness": witness,
            });
            Ok(Outcome { results, ok: true })
        }
        _ => Err(CliError::input("classify expects a coupling, an extension, or two extensions with --against")),
    }
}

pub fn spectral(doc: &Document, pages: usize) -> Result<Outcome, CliError> {
    let Document::Extension(f) = doc else {
        return Err(CliError::input("spectral expects an extension document"));
    };
    let fc = filtered_de_rham(&extension_of(f)?);
    let all = spectral_sequence(&fc);
    let tables: Vec<Value> = all
        .iter()
        .take(pages + 1)
        .map(|page| {
            let differentials: Map<String, Value> =
                page.differentials.iter().map(|((p, q), m)| (format!("{p},{q}"), r::matrix(m))).collect();
            let mut v = r::to_value(&page.summary());
            v["differentials"] = Value::Object(differentials);
            v["totals"] = json!(page.totals());
            v
        })
        .collect();
    let conv = convergence_check(&fc);
    let ok = conv.converges && conv.pages_consistent;
    Ok(Outcome { results: json!({ "pages": tables, "convergence": r::to_value(&conv) }), ok })
}

pub fn atiyah_p1(degree: i64, truncation: usize) -> Result<Outcome, CliError> {
    let (model, data) = build_p1_model(degree, truncation).map_err(|e| match e {
        AtiyahError::TruncationUnstable { .. } => {
            CliError::Input(json!({ "kind": "truncation_unstable", "message": e.to_string() }))
        }
    })?;
    let les = les_connecting(&model);
    let h = hypercohomology_atiyah(&model);
    let deg = degeneration_check(&model);
    let cert = stability_certificate(degree, truncation).map_err(|e| CliError::input(e.to_string()))?;
    let ok = les.agree
        && les.exact
        && h.agree
        && deg.e1.matches
        && deg.e2_matches
        && deg.d2_zero
        && deg.later_differentials_zero
        && deg.totals_match
        && cert.stable;
    let results = json!({
        "degree": degree,
        "truncation": truncation,
        "gluing": r::to_value(&data),
        "cech_dims": r::to_value(&truncation_dims(&model)),
        "long_exact_sequence": r::to_value(&les),
        "hypercohomology": r::to_value(&h),
        "degeneration": r::to_value(&deg),
        "stability": r::to_value(&cert),
    });
    Ok(Outcome { results, ok })
}
