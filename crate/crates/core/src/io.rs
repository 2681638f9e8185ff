//! Line-delimited JSON files for ensembles, witnesses, simulations, bases and
//! measurements.
//!
//! Each file starts with a header object carrying `"kind"` and the sizes,
//! followed by one object per item. Complex matrices are nested arrays of rows
//! of `[re, im]` pairs. Numbers are written in shortest round-trip form, so
//! writing and re-reading a file reproduces every double exactly. The schema is
//! described in `docs/format.md`.

use crate::ensemble::{DensityMatrix, Ensemble, HermitianOperator, Povm, SubspaceProjector};
use crate::error::{Error, Result};
use crate::linalg::{c, CMat};
use crate::simulation::{Simulation, SimulationComponent};
use crate::witness::WitnessSpec;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::io::{BufRead, Write};

/// Optional provenance stored in an ensemble header.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMeta {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub visibility: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleFile {
    pub ensemble: Ensemble,
    pub meta: EnsembleMeta,
}

fn matrix_to_json(a: &CMat) -> Value {
    Value::Array(
        (0..a.nrows())
            .map(|i| {
                Value::Array(
                    (0..a.ncols())
                        .map(|j| json!([a[(i, j)].re, a[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn write_line(out: &mut dyn Write, v: &Value) -> Result<()> {
    serde_json::to_writer(&mut *out, v).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Non-blank lines with 1-based line numbers, parsed as JSON objects.
fn records(input: &mut dyn BufRead) -> Result<Vec<(usize, Map<String, Value>)>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Value>(&line) {
            Ok(Value::Object(obj)) => out.push((lineno, obj)),
            Ok(_) => return Err(Error::parse(lineno, "", "expected a JSON object")),
            Err(e) => return Err(Error::parse(lineno, "", format!("invalid JSON: {e}"))),
        }
    }
    Ok(out)
}

struct Record<'a> {
    line: usize,
    obj: &'a Map<String, Value>,
}

impl<'a> Record<'a> {
    fn field(&self, name: &str) -> Result<&'a Value> {
        self.obj
            .get(name)
            .ok_or_else(|| Error::parse(self.line, name, "missing field"))
    }

    fn usize(&self, name: &str) -> Result<usize> {
        self.field(name)?
            .as_u64()
            .map(|v| v as usize)
            .ok_or_else(|| Error::parse(self.line, name, "expected a nonnegative integer"))
    }

    fn f64(&self, name: &str) -> Result<f64> {
        number(self.field(name)?).ok_or_else(|| Error::parse(self.line, name, "expected a number"))
    }

    fn array(&self, name: &str) -> Result<&'a Vec<Value>> {
        self.field(name)?
            .as_array()
            .ok_or_else(|| Error::parse(self.line, name, "expected an array"))
    }

    fn expect_kind(&self, kind: &str) -> Result<()> {
        match self.field("kind")?.as_str() {
            Some(k) if k == kind => Ok(()),
            Some(k) => Err(Error::parse(self.line, "kind", format!("expected \"{kind}\", found \"{k}\""))),
            None => Err(Error::parse(self.line, "kind", "expected a string")),
        }
    }

    fn expect_index(&self, name: &str, expected: usize) -> Result<()> {
        let got = self.usize(name)?;
        if got != expected {
            return Err(Error::parse(self.line, name, format!("expected index {expected}, found {got}")));
        }
        Ok(())
    }

    fn matrix(&self, name: &str, rows: usize, cols: usize) -> Result<CMat> {
        parse_matrix(self.field(name)?, rows, cols, self.line, name)
    }

    /// Wraps a validation failure with this record's position.
    fn check<T>(&self, field: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::Validation(msg) | Error::Domain(msg) => Error::parse(self.line, field, msg),
            other => other,
        })
    }
}

fn number(v: &Value) -> Option<f64> {
    v.as_f64().filter(|x| x.is_finite())
}

fn parse_matrix(v: &Value, rows: usize, cols: usize, line: usize, name: &str) -> Result<CMat> {
    let bad = |path: String, msg: &str| Error::parse(line, path, msg.to_string());
    let outer = v.as_array().ok_or_else(|| bad(name.into(), "expected an array of rows"))?;
    if outer.len() != rows {
        return Err(bad(name.into(), &format!("expected {rows} rows, found {}", outer.len())));
    }
    let mut m = CMat::zeros(rows, cols);
    for (i, row) in outer.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| bad(format!("{name}[{i}]"), "expected an array"))?;
        if row.len() != cols {
            return Err(bad(format!("{name}[{i}]"), &format!("expected {cols} entries, found {}", row.len())));
        }
        for (j, entry) in row.iter().enumerate() {
            let pair = entry.as_array().filter(|p| p.len() == 2);
            let parsed = pair.and_then(|p| Some(c(number(&p[0])?, number(&p[1])?)));
            m[(i, j)] = parsed.ok_or_else(|| bad(format!("{name}[{i}][{j}]"), "expected [re, im] with finite numbers"))?;
        }
    }
    Ok(m)
}

fn split_header(recs: &[(usize, Map<String, Value>)], kind: &str) -> Result<usize> {
    let Some((line, obj)) = recs.first() else {
        return Err(Error::parse(1, "kind", format!("empty file, expected a {kind} header")));
    };
    Record { line: *line, obj }.expect_kind(kind)?;
    Ok(recs.len() - 1)
}

fn expect_count(line: usize, field: &str, declared: usize, found: usize) -> Result<()> {
    if declared != found {
        return Err(Error::parse(line, field, format!("header declares {declared} items, file has {found}")));
    }
    Ok(())
}

pub fn write_ensemble(ensemble: &Ensemble, meta: &EnsembleMeta, out: &mut dyn Write) -> Result<()> {
    let meta = serde_json::to_value(meta).map_err(std::io::Error::from)?;
    write_line(
        out,
        &json!({"kind": "ensemble", "dim": ensemble.dim(), "states": ensemble.len(), "meta": meta}),
    )?;
    for (x, rho) in ensemble.states().iter().enumerate() {
        write_line(out, &json!({"state": x, "matrix": matrix_to_json(rho.matrix())}))?;
    }
    Ok(())
}

pub fn read_ensemble(input: &mut dyn BufRead) -> Result<EnsembleFile> {
    let recs = records(input)?;
    let n = split_header(&recs, "ensemble")?;
    let head = Record { line: recs[0].0, obj: &recs[0].1 };
    let d = head.usize("dim")?;
    let m = head.usize("states")?;
    expect_count(head.line, "states", m, n)?;
    let meta = match head.obj.get("meta") {
        None | Some(Value::Null) => EnsembleMeta::default(),
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| Error::parse(head.line, "meta", e.to_string()))?,
    };
    let states = recs[1..]
        .iter()
        .enumerate()
        .map(|(x, (line, obj))| {
            let rec = Record { line: *line, obj };
            rec.expect_index("state", x)?;
            let m = rec.matrix("matrix", d, d)?;
            rec.check("matrix", DensityMatrix::from_matrix(m))
        })
        .collect::<Result<Vec<_>>>()?;
    let ensemble = head.check("states", Ensemble::new(states))?;
    Ok(EnsembleFile { ensemble, meta })
}

pub fn write_witness(spec: &WitnessSpec, out: &mut dyn Write) -> Result<()> {
    write_line(
        out,
        &json!({"kind": "witness", "dim": spec.dim(), "states": spec.num_states(),
                "measurements": spec.measurements().len()}),
    )?;
    for (y, (povm, table)) in spec.measurements().iter().zip(spec.coefficients()).enumerate() {
        let elements: Vec<Value> = povm.elements().iter().map(|e| matrix_to_json(e.matrix())).collect();
        write_line(out, &json!({"measurement": y, "elements": elements, "coefficients": table}))?;
    }
    Ok(())
}

pub fn read_witness(input: &mut dyn BufRead) -> Result<WitnessSpec> {
    let recs = records(input)?;
    let n = split_header(&recs, "witness")?;
    let head = Record { line: recs[0].0, obj: &recs[0].1 };
    let d = head.usize("dim")?;
    let m = head.usize("states")?;
    expect_count(head.line, "measurements", head.usize("measurements")?, n)?;
    let mut povms = Vec::with_capacity(n);
    let mut tables = Vec::with_capacity(n);
    for (y, (line, obj)) in recs[1..].iter().enumerate() {
        let rec = Record { line: *line, obj };
        rec.expect_index("measurement", y)?;
        let elements = rec
            .array("elements")?
            .iter()
            .enumerate()
            .map(|(b, v)| {
                let name = format!("elements[{b}]");
                let m = parse_matrix(v, d, d, rec.line, &name)?;
                rec.check(&name, HermitianOperator::new(m))
            })
            .collect::<Result<Vec<_>>>()?;
        povms.push(rec.check("elements", Povm::new(elements))?);
        let table = rec
            .array("coefficients")?
            .iter()
            .enumerate()
            .map(|(b, row)| {
                row.as_array()
                    .ok_or_else(|| Error::parse(rec.line, format!("coefficients[{b}]"), "expected an array"))?
                    .iter()
                    .enumerate()
                    .map(|(x, v)| {
                        number(v).ok_or_else(|| {
                            Error::parse(rec.line, format!("coefficients[{b}][{x}]"), "expected a finite number")
                        })
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        tables.push(table);
    }
    head.check("measurements", WitnessSpec::new(povms, tables, m))
}

pub fn write_simulation(sim: &Simulation, out: &mut dyn Write) -> Result<()> {
    write_line(
        out,
        &json!({"kind": "simulation", "dim": sim.dim(), "rank": sim.rank(),
                "states": sim.num_states(), "components": sim.components().len()}),
    )?;
    for (k, comp) in sim.components().iter().enumerate() {
        let states: Vec<Value> = comp.states.iter().map(|s| matrix_to_json(s.matrix())).collect();
        write_line(
            out,
            &json!({"component": k, "weight": comp.weight,
                    "projector": matrix_to_json(comp.projector.matrix()), "states": states}),
        )?;
    }
    Ok(())
}

pub fn read_simulation(input: &mut dyn BufRead) -> Result<Simulation> {
    let recs = records(input)?;
    let n = split_header(&recs, "simulation")?;
    let head = Record { line: recs[0].0, obj: &recs[0].1 };
    let d = head.usize("dim")?;
    let r = head.usize("rank")?;
    let m = head.usize("states")?;
    expect_count(head.line, "components", head.usize("components")?, n)?;
    let components = recs[1..]
        .iter()
        .enumerate()
        .map(|(k, (line, obj))| {
            let rec = Record { line: *line, obj };
            rec.expect_index("component", k)?;
            let weight = rec.f64("weight")?;
            let p = rec.matrix("projector", d, d)?;
            let projector = rec.check("projector", HermitianOperator::new(p).and_then(|op| SubspaceProjector::new(op, r)))?;
            let list = rec.array("states")?;
            if list.len() != m {
                return Err(Error::parse(rec.line, "states", format!("expected {m} states, found {}", list.len())));
            }
            let states = list
                .iter()
                .enumerate()
                .map(|(x, v)| {
                    let name = format!("states[{x}]");
                    let mat = parse_matrix(v, d, d, rec.line, &name)?;
                    rec.check(&name, DensityMatrix::from_matrix(mat))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SimulationComponent {
                weight,
                projector,
                states,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    head.check("components", Simulation::new(r, components))
}

/// A list of `d×d` unitaries, one per line.
pub fn write_bases(unitaries: &[CMat], out: &mut dyn Write) -> Result<()> {
    let d = unitaries.first().map_or(0, |u| u.nrows());
    write_line(out, &json!({"kind": "bases", "dim": d, "count": unitaries.len()}))?;
    for (i, u) in unitaries.iter().enumerate() {
        write_line(out, &json!({"basis": i, "matrix": matrix_to_json(u)}))?;
    }
    Ok(())
}

/// Reads bases; unitarity is checked when they are used to build a family.
pub fn read_bases(input: &mut dyn BufRead) -> Result<Vec<CMat>> {
    let recs = records(input)?;
    let n = split_header(&recs, "bases")?;
    let head = Record { line: recs[0].0, obj: &recs[0].1 };
    let d = head.usize("dim")?;
    expect_count(head.line, "count", head.usize("count")?, n)?;
    recs[1..]
        .iter()
        .enumerate()
        .map(|(i, (line, obj))| {
            let rec = Record { line: *line, obj };
            rec.expect_index("basis", i)?;
            let u = rec.matrix("matrix", d, d)?;
            if crate::linalg::unitarity_defect(&u) > 1e-10 {
                return Err(Error::parse(rec.line, "matrix", "basis matrix is not unitary"));
            }
            Ok(u)
        })
        .collect()
}

pub fn write_povm(povm: &Povm, out: &mut dyn Write) -> Result<()> {
    write_line(out, &json!({"kind": "povm", "dim": povm.dim(), "outcomes": povm.len()}))?;
    for (b, el) in povm.elements().iter().enumerate() {
        write_line(out, &json!({"outcome": b, "matrix": matrix_to_json(el.matrix())}))?;
    }
    Ok(())
}

pub fn read_povm(input: &mut dyn BufRead) -> Result<Povm> {
    let recs = records(input)?;
    let n = split_header(&recs, "povm")?;
    let head = Record { line: recs[0].0, obj: &recs[0].1 };
    let d = head.usize("dim")?;
    expect_count(head.line, "outcomes", head.usize("outcomes")?, n)?;
    let elements = recs[1..]
        .iter()
        .enumerate()
        .map(|(b, (line, obj))| {
            let rec = Record { line: *line, obj };
            rec.expect_index("outcome", b)?;
            let m = rec.matrix("matrix", d, d)?;
            rec.check("matrix", HermitianOperator::new(m))
        })
        .collect::<Result<Vec<_>>>()?;
    head.check("outcomes", Povm::new(elements))
}

/// Convenience wrapper: serialize to a `String`.
pub fn to_string(write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(String::from_utf8(buf).expect("JSON output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::build_standard_m_state_simulation;
    use crate::haar::{random_density_matrix, random_povm, rng_from_seed, sample_haar_unitary};
    use proptest::prelude::*;

    fn ensemble_text(ens: &Ensemble, meta: &EnsembleMeta) -> String {
        to_string(|w| write_ensemble(ens, meta, w)).unwrap()
    }

    #[test]
    fn ensemble_round_trip_is_exact() {
        let mut rng = rng_from_seed(31);
        for k in 0..100 {
            let d = 1 + k % 5;
            let m = 1 + k % 4;
            let ens = Ensemble::new((0..m).map(|_| random_density_matrix(d, &mut rng)).collect()).unwrap();
            let meta = EnsembleMeta {
                label: Some(format!("case {k}")),
                visibility: Some(0.25),
                generator: Some("hs".into()),
                seed: Some(k as u64),
            };
            let text = ensemble_text(&ens, &meta);
            let back = read_ensemble(&mut text.as_bytes()).unwrap();
            assert_eq!(back.ensemble, ens);
            assert_eq!(back.meta, meta);
            assert_eq!(ensemble_text(&back.ensemble, &back.meta), text);
        }
    }

    proptest! {
        #[test]
        fn matrices_round_trip_bitwise(entries in proptest::collection::vec(-1e300f64..1e300, 8)) {
            let m = CMat::from_fn(2, 2, |i, j| c(entries[2 * (2 * i + j)], entries[2 * (2 * i + j) + 1]));
            let text = serde_json::to_string(&matrix_to_json(&m)).unwrap();
            let v: Value = serde_json::from_str(&text).unwrap();
            let back = parse_matrix(&v, 2, 2, 1, "m").unwrap();
            for (a, b) in m.iter().zip(back.iter()) {
                prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
                prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }

    #[test]
    fn witness_povm_bases_simulation_round_trip() {
        let mut rng = rng_from_seed(2);
        let povms = vec![random_povm(3, 2, &mut rng), random_povm(3, 3, &mut rng)];
        let tables = vec![vec![vec![1.0, 0.5]; 2], vec![vec![0.0, 2.0]; 3]];
        let spec = WitnessSpec::new(povms.clone(), tables, 2).unwrap();
        let text = to_string(|w| write_witness(&spec, w)).unwrap();
        assert_eq!(read_witness(&mut text.as_bytes()).unwrap(), spec);

        let text = to_string(|w| write_povm(&povms[1], w)).unwrap();
        assert_eq!(read_povm(&mut text.as_bytes()).unwrap(), povms[1]);

        let us = vec![sample_haar_unitary(3, &mut rng), crate::linalg::fourier(3)];
        let text = to_string(|w| write_bases(&us, w)).unwrap();
        assert_eq!(read_bases(&mut text.as_bytes()).unwrap(), us);

        let sim = build_standard_m_state_simulation(4, 3, 2).unwrap();
        let text = to_string(|w| write_simulation(&sim, w)).unwrap();
        assert_eq!(read_simulation(&mut text.as_bytes()).unwrap(), sim);
    }

    fn parse_err(text: &str) -> (usize, String) {
        match read_ensemble(&mut text.as_bytes()) {
            Err(Error::Parse { line, field, .. }) => (line, field),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_position() {
        let good = ensemble_text(&Ensemble::orthonormal(2, 2, 1.0).unwrap(), &EnsembleMeta::default());
        let lines: Vec<&str> = good.lines().collect();

        assert_eq!(parse_err(""), (1, "kind".into()));
        assert_eq!(parse_err("{\"kind\":\"povm\"}"), (1, "kind".into()));
        assert_eq!(parse_err(&format!("{}\nnot json\n", lines[0])), (2, "".into()));
        assert_eq!(parse_err(&format!("{}\n{}\n", lines[0], lines[1])), (1, "states".into()));

        let broken = lines[2].replace("[1.0,0.0]]]", "[1.0]]]");
        assert_eq!(parse_err(&format!("{}\n{}\n{}\n", lines[0], lines[1], broken)), (3, "matrix[1][1]".into()));

        let unnormalized = lines[2].replace("[1.0,0.0]]]", "[2.0,0.0]]]");
        assert_eq!(
            parse_err(&format!("{}\n{}\n{}\n", lines[0], lines[1], unnormalized)),
            (3, "matrix".into())
        );

        let no_dim = lines[0].replace("\"dim\":2,", "");
        assert_eq!(parse_err(&format!("{no_dim}\n{}\n{}\n", lines[1], lines[2])), (1, "dim".into()));
    }
}
