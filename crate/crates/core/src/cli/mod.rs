//! Reproducible experiments: a serializable [`ExperimentSpec`] names one
//! operation with all of its parameters, and [`run`] turns it into a canonical
//! [`Report`]. Running the same experiment twice gives byte-identical reports; the
//! thread count is not recorded and never changes the result.

mod report;

pub use report::{report_diff, DiffEntry, Report, SCHEMA_VERSION};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::colourings::Colouring;
use crate::digits::{base_digits_big, neg_digits_big, DigitExpansion, GapDescriptor};
use crate::error::{Error, Result};
use crate::matgen::RowFamily;
use crate::ratcore::{image, is_natural_image, FiniteMatrix, Rat};
use crate::search::{
    certify_ipr, check_rapid, check_separation, dominates_on, find_monochromatic, forcing_bound, make_rapid,
    translate_witness, Outcome, SearchConfig, SearchResult, SeparationOutcome, Verdict,
};
use crate::seqs::CompressedSeq;

/// Where a matrix comes from: a named family truncation or explicit rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSource {
    Family {
        #[serde(flatten)]
        family: RowFamily,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        width: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rows: Option<usize>,
    },
    Explicit(FiniteMatrix),
}

impl MatrixSource {
    pub fn resolve(&self) -> Result<FiniteMatrix> {
        match self {
            MatrixSource::Family { family, width, rows } => family.generate(*width, *rows),
            MatrixSource::Explicit(m) => Ok(m.clone()),
        }
    }
}

/// Parses `1,0;0,1;1,1` into a matrix (rows separated by `;`).
pub fn parse_dense(s: &str) -> Result<FiniteMatrix> {
    let rows: Vec<Vec<Rat>> = s
        .split(';')
        .map(|r| r.split(',').map(|t| t.parse::<Rat>()).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::Parse(format!("ragged matrix: {s}")));
    }
    let sparse: Vec<_> = rows.iter().map(|r| crate::ratcore::SparseRow::from_dense_rat(r)).collect();
    match FiniteMatrix::new(width, sparse.clone()) {
        Ok(m) => Ok(m),
        Err(Error::DuplicateRow(_)) => FiniteMatrix::new_with_duplicates(width, sparse),
        Err(e) => Err(e),
    }
}

/// One operation with every parameter needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", rename_all_fields = "camelCase")]
pub enum ExperimentSpec {
    Gen { matrix: MatrixSource },
    Image { matrix: MatrixSource, x: Vec<Rat> },
    Digits {
        base: i64,
        #[serde(with = "bigint_list")]
        numbers: Vec<BigInt>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gap: Option<GapDescriptor>,
    },
    Colour {
        colouring: Colouring,
        #[serde(with = "bigint_list")]
        numbers: Vec<BigInt>,
    },
    Search { matrix: MatrixSource, colouring: Colouring, config: SearchConfig },
    Force { matrix: MatrixSource, colours: u32, n_max: u64, node_budget: u64 },
    Separate { colouring: Colouring, a: CompressedSeq, b: CompressedSeq, prefix_len: usize, config: SearchConfig },
    Dominate { a: MatrixSource, b: MatrixSource, x: Vec<Rat>, config: SearchConfig },
    Certify { a: MatrixSource, b: MatrixSource, c: MatrixSource },
    Rapid {
        p: u32,
        #[serde(with = "bigint_list")]
        x: Vec<BigInt>,
        make: bool,
    },
    TranslateSearch { colouring: Colouring, a: CompressedSeq, prefix_len: usize, b_bound: u64, config: SearchConfig },
}

mod bigint_list {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(crate::ratcore::bigint_to_json).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let vals: Vec<serde_json::Value> = Deserialize::deserialize(d)?;
        vals.iter()
            .map(|v| crate::ratcore::bigint_from_json(v).map_err(serde::de::Error::custom))
            .collect()
    }
}

fn big_json(n: &BigInt) -> Value {
    crate::ratcore::bigint_to_json(n)
}

impl ExperimentSpec {
    pub fn command(&self) -> &'static str {
        match self {
            ExperimentSpec::Gen { .. } => "gen",
            ExperimentSpec::Image { .. } => "image",
            ExperimentSpec::Digits { .. } => "digits",
            ExperimentSpec::Colour { .. } => "colour",
            ExperimentSpec::Search { .. } => "search",
            ExperimentSpec::Force { .. } => "force",
            ExperimentSpec::Separate { .. } => "separate",
            ExperimentSpec::Dominate { .. } => "dominate",
            ExperimentSpec::Certify { .. } => "certify",
            ExperimentSpec::Rapid { .. } => "rapid",
            ExperimentSpec::TranslateSearch { .. } => "translate-search",
        }
    }

    /// Reads an experiment, either bare or as the `params` of a report.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let v = match v.get("params") {
            Some(p) if v.get("schemaVersion").is_some() => p.clone(),
            _ => v,
        };
        serde_json::from_value(v).map_err(|e| Error::SchemaMismatch(e.to_string()))
    }
}

fn outcome_name<T>(o: &Outcome<T>) -> &'static str {
    match o {
        Outcome::Found(_) => "found",
        Outcome::Exhausted => "none-within-bounds",
        Outcome::BudgetHit => "budget-hit",
    }
}

fn search_fields<T: Serialize>(r: &mut Report, res: &SearchResult<T>) {
    r.set("outcome", outcome_name(&res.outcome));
    if let Some(w) = res.witness() {
        r.set("witness", w);
    }
    r.set("nodesExplored", res.nodes_explored);
    r.set("exhausted", res.exhausted());
}

fn digit_summary(e: &DigitExpansion, gap: Option<&GapDescriptor>) -> Value {
    let mut v = json!({
        "digits": e.digits(),
        "support": e.support().collect::<Vec<_>>(),
        "minSupp": e.min_supp(),
        "maxSupp": e.max_supp(),
        "lsd": e.lsd().ok(),
    });
    if e.base() < 0 {
        v["phi"] = json!(e.phi().ok());
        if let Some(g) = gap {
            v["gaps"] = json!(e.gaps(g));
            v["psi"] = json!(e.psi(g));
        }
    }
    v
}

/// Executes an experiment. `threads` only affects scheduling.
pub fn run(spec: &ExperimentSpec, threads: usize) -> Result<Report> {
    let params = serde_json::to_value(spec)?;
    let mut r = Report::new(spec.command(), params);
    match spec {
        ExperimentSpec::Gen { matrix } => {
            let m = matrix.resolve()?;
            r.set("outcome", "generated").set("matrix", &m).set("rowCount", m.row_count());
        }
        ExperimentSpec::Image { matrix, x } => {
            let m = matrix.resolve()?;
            let im = image(&m, x)?;
            r.set("outcome", "computed").set("image", &im).set("natural", is_natural_image(&m, x)?);
        }
        ExperimentSpec::Digits { base, numbers, gap } => {
            let p = base.unsigned_abs() as u32;
            if let Some(g) = gap {
                GapDescriptor::new(p, g.v, [g.u0, g.u1, g.u2, g.u3])?;
            }
            let rows = numbers
                .iter()
                .map(|n| {
                    let e = if *base < 0 { neg_digits_big(n, p)? } else { base_digits_big(n, p)? };
                    let mut v = digit_summary(&e, gap.as_ref());
                    v["x"] = big_json(n);
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()?;
            r.set("outcome", "computed").set("results", rows);
        }
        ExperimentSpec::Colour { colouring, numbers } => {
            let rows = numbers
                .iter()
                .map(|n| Ok(json!({"x": big_json(n), "colour": colouring.colour(n)?})))
                .collect::<Result<Vec<_>>>()?;
            r.set("outcome", "computed").set("results", rows).set("paletteBound", colouring.palette_bound());
        }
        ExperimentSpec::Search { matrix, colouring, config } => {
            let m = matrix.resolve()?;
            let res = find_monochromatic(&m, colouring, &config.clone().threads(threads))?;
            search_fields(&mut r, &res);
        }
        ExperimentSpec::Force { matrix, colours, n_max, node_budget } => {
            let m = matrix.resolve()?;
            let res = forcing_bound(&m, *colours, *n_max, *node_budget)?;
            let outcome = match (res.bound, res.exhausted) {
                (Some(_), _) => "found",
                (None, true) => "none-within-bounds",
                (None, false) => "budget-hit",
            };
            r.set("outcome", outcome)
                .set("bound", res.bound)
                .set("certificate", &res.certificate)
                .set("nodesExplored", res.nodes_explored)
                .set("exhausted", res.exhausted);
        }
        ExperimentSpec::Separate { colouring, a, b, prefix_len, config } => {
            let res = check_separation(colouring, a, b, *prefix_len, &config.clone().threads(threads))?;
            match &res.outcome {
                SeparationOutcome::Proportional(ratio) => {
                    r.set("outcome", "proportional").set("ratio", ratio);
                }
                SeparationOutcome::Found(w) => {
                    r.set("outcome", "found").set("witness", w);
                }
                SeparationOutcome::NoneWithinBounds => {
                    r.set("outcome", "none-within-bounds");
                }
                SeparationOutcome::BudgetHit => {
                    r.set("outcome", "budget-hit");
                }
            }
            r.set("nodesExplored", res.nodes_explored)
                .set("exhausted", res.outcome != SeparationOutcome::BudgetHit);
        }
        ExperimentSpec::Dominate { a, b, x, config } => {
            let res = dominates_on(&a.resolve()?, &b.resolve()?, x, &config.clone().threads(threads))?;
            search_fields(&mut r, &res);
        }
        ExperimentSpec::Certify { a, b, c } => {
            match certify_ipr(&a.resolve()?, &b.resolve()?, &c.resolve()?)? {
                Verdict::Certified => r.set("outcome", "certified"),
                Verdict::WitnessInvalid(why) => r.set("outcome", "witness-invalid").set("reason", why),
            };
        }
        ExperimentSpec::Rapid { p, x, make } => {
            if *make {
                let seq = make_rapid(*p, x)?;
                r.set("outcome", "computed").set("sequence", seq.iter().map(big_json).collect::<Vec<_>>());
            } else {
                let ok = check_rapid(x, *p)?;
                r.set("outcome", if ok { "rapid" } else { "not-rapid" });
            }
        }
        ExperimentSpec::TranslateSearch { colouring, a, prefix_len, b_bound, config } => {
            let res = translate_witness(colouring, a, *prefix_len, *b_bound, &config.clone().threads(threads))?;
            search_fields(&mut r, &res);
            r.set("lastTermIsOne", a.last() == 1);
        }
    }
    Ok(r)
}
