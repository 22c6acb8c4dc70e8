//! Versioned text format for [`SurrogateModel`].
//!
//! ```text
//! qfe-surrogate-model
//! [meta]      version, lambda
//! [lift]      kind and parameters (random-Fourier frequencies inline)
//! [norm]      mode, clamp, one "shift scale" line per input column
//! [layout]    qubit count and one subset per line
//! [coupling]  "none" or the coupling-graph block
//! [weights]   "rows cols" then row-major values
//! [bias]      length then values
//! [coverage]  radius, "rows cols" then row-major reference inputs
//! [end]
//! ```
//! Floats are written in shortest round-trip exponent form, so a load
//! reproduces every value bit for bit.

use std::collections::HashMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::{Coverage, Lift, SurrogateModel};
use crate::dataset::{NormMode, NormStats};
use crate::error::{Error, Result};
use crate::hamiltonian::CouplingGraph;
use crate::qsim::FeatureLayout;

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "qfe-surrogate-model";
const SECTIONS: [&str; 9] = [
    "meta", "lift", "norm", "layout", "coupling", "weights", "bias", "coverage", "end",
];

fn f(v: f64) -> String {
    format!("{v:e}")
}

fn push_matrix(out: &mut String, m: &DMatrix<f64>) {
    out.push_str(&format!("{} {}\n", m.nrows(), m.ncols()));
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|&v| f(v)).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
}

pub fn write_model(model: &SurrogateModel) -> String {
    let mut s = format!(
        "{MAGIC}\n[meta]\nversion {MODEL_FORMAT_VERSION}\nlambda {}\n",
        f(model.lambda)
    );

    s.push_str("[lift]\n");
    s.push_str(&format!(
        "kind {}\ninput_dim {}\n",
        model.lift.kind_name(),
        model.lift.input_dim()
    ));
    match &model.lift {
        Lift::Identity { .. } => {}
        Lift::Polynomial { degree, .. } => s.push_str(&format!("degree {degree}\n")),
        Lift::RandomFourier {
            bandwidth,
            seed,
            frequencies,
            phases,
            ..
        } => {
            s.push_str(&format!("bandwidth {}\nseed {seed}\nfrequencies ", f(*bandwidth)));
            push_matrix(&mut s, frequencies);
            let p: Vec<String> = phases.iter().map(|&v| f(v)).collect();
            s.push_str(&format!("phases {}\n", p.join(" ")));
        }
    }

    s.push_str(&format!(
        "[norm]\nmode {}\nclamp {}\ncolumns {}\n",
        model.norm.mode.as_str(),
        model.norm.clamp,
        model.norm.dim()
    ));
    for (sh, sc) in model.norm.shift.iter().zip(&model.norm.scale) {
        s.push_str(&format!("{} {}\n", f(*sh), f(*sc)));
    }

    s.push_str(&format!(
        "[layout]\nn {}\nsubsets {}\n",
        model.layout.n,
        model.layout.subsets.len()
    ));
    for set in &model.layout.subsets {
        let ids: Vec<String> = set.iter().map(|q| q.to_string()).collect();
        s.push_str(&ids.join(" "));
        s.push('\n');
    }

    s.push_str("[coupling]\n");
    match &model.coupling {
        None => s.push_str("none\n"),
        Some(g) => s.push_str(&g.to_text()),
    }

    s.push_str("[weights]\n");
    push_matrix(&mut s, &model.weights);

    s.push_str(&format!("[bias]\n{}\n", model.bias.len()));
    let b: Vec<String> = model.bias.iter().map(|&v| f(v)).collect();
    s.push_str(&b.join(" "));
    s.push('\n');

    s.push_str(&format!("[coverage]\nradius {}\n", f(model.coverage.radius)));
    push_matrix(&mut s, &model.coverage.refs);
    s.push_str("[end]\n");
    s
}

pub fn save_model(model: &SurrogateModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_model(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SurrogateModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text)
}

/// Lines of one section with a cursor and section-tagged errors.
struct Section<'a> {
    name: &'static str,
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Section<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Format {
            section: self.name.into(),
            message: message.into(),
        }
    }

    fn next(&mut self) -> Result<&'a str> {
        let line = self
            .lines
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.err("unexpected end of section"))?;
        self.pos += 1;
        Ok(line)
    }

    fn rest(&mut self) -> Vec<&'a str> {
        let r = self.lines[self.pos..].to_vec();
        self.pos = self.lines.len();
        r
    }

    fn keyed(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next()?;
        line.strip_prefix(key)
            .filter(|v| v.starts_with(' ') || v.is_empty())
            .map(str::trim)
            .ok_or_else(|| self.err(format!("expected '{key}', found '{line}'")))
    }

    fn usize(&mut self, key: &str) -> Result<usize> {
        let v = self.keyed(key)?;
        v.parse()
            .map_err(|_| self.err(format!("'{key}' is not an integer: '{v}'")))
    }

    fn float(&self, v: &str) -> Result<f64> {
        v.parse().map_err(|_| self.err(format!("'{v}' is not a number")))
    }

    fn floats(&self, line: &str) -> Result<Vec<f64>> {
        line.split_whitespace().map(|v| self.float(v)).collect()
    }

    fn matrix_from(&mut self, header: &str) -> Result<DMatrix<f64>> {
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|v| v.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| self.err(format!("bad matrix header '{header}'")))?;
        let [rows, cols] = dims[..] else {
            return Err(self.err(format!("bad matrix header '{header}'")));
        };
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let line = self.next()?;
            let row = self.floats(line)?;
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "section '{}': row {r} has {} values, header says {cols}",
                    self.name,
                    row.len()
                )));
            }
            values.extend(row);
        }
        Ok(DMatrix::from_row_slice(rows, cols, &values))
    }

    fn matrix(&mut self) -> Result<DMatrix<f64>> {
        let header = self.next()?;
        self.matrix_from(header)
    }
}

fn split_sections(text: &str) -> Result<HashMap<&str, Vec<&str>>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(l) if l.trim() == MAGIC => {}
        _ => {
            return Err(Error::Format {
                section: "header".into(),
                message: format!("missing '{MAGIC}' header line"),
            })
        }
    }
    let mut sections: HashMap<&str, Vec<&str>> = HashMap::new();
    let mut current: Option<&str> = None;
    for line in lines {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            current = Some(name);
            sections.insert(name, Vec::new());
        } else if let Some(name) = current {
            sections.get_mut(name).unwrap().push(t);
        }
    }
    Ok(sections)
}

pub fn parse_model(text: &str) -> Result<SurrogateModel> {
    let mut raw = split_sections(text)?;
    for name in SECTIONS {
        if !raw.contains_key(name) {
            return Err(Error::MissingSection(name.into()));
        }
    }
    let mut take = |name: &'static str| Section {
        name,
        lines: raw.remove(name).unwrap(),
        pos: 0,
    };

    let mut meta = take("meta");
    let version: u32 = meta.usize("version")? as u32;
    if version != MODEL_FORMAT_VERSION {
        return Err(Error::Version {
            found: version,
            expected: MODEL_FORMAT_VERSION,
        });
    }
    let lambda_s = meta.keyed("lambda")?;
    let lambda = meta.float(lambda_s)?;

    let mut sec = take("lift");
    let kind = sec.keyed("kind")?;
    let dim = sec.usize("input_dim")?;
    let lift = match kind {
        "identity" => Lift::Identity { dim },
        "polynomial" => {
            let degree = sec.usize("degree")?;
            Lift::resolve(&super::LiftSpec::Polynomial { degree }, dim, &DMatrix::zeros(0, dim))?
        }
        "random-fourier" => {
            let bw = sec.keyed("bandwidth")?;
            let bandwidth = sec.float(bw)?;
            let seed_s = sec.keyed("seed")?;
            let seed: u64 = seed_s.parse().map_err(|_| sec.err(format!("bad seed '{seed_s}'")))?;
            let header = sec.keyed("frequencies")?;
            let frequencies = sec.matrix_from(header)?;
            let ph = sec.keyed("phases")?;
            let phases = sec.floats(ph)?;
            if frequencies.ncols() != dim || phases.len() != frequencies.nrows() {
                return Err(Error::Dimension(
                    "random Fourier frequencies do not match input dimension or phase count".into(),
                ));
            }
            Lift::RandomFourier {
                dim,
                bandwidth,
                seed,
                frequencies,
                phases,
            }
        }
        other => return Err(sec.err(format!("unknown lift kind '{other}'"))),
    };

    let mut sec = take("norm");
    let mode: NormMode = sec.keyed("mode")?.parse()?;
    let clamp = match sec.keyed("clamp")? {
        "true" => true,
        "false" => false,
        other => return Err(sec.err(format!("clamp must be true or false, found '{other}'"))),
    };
    let columns = sec.usize("columns")?;
    let mut shift = Vec::with_capacity(columns);
    let mut scale = Vec::with_capacity(columns);
    for _ in 0..columns {
        let line = sec.next()?;
        let v = sec.floats(line)?;
        if v.len() != 2 {
            return Err(sec.err(format!("expected 'shift scale', found '{line}'")));
        }
        shift.push(v[0]);
        scale.push(v[1]);
    }
    let norm = NormStats {
        mode,
        shift,
        scale,
        clamp,
    };

    let mut sec = take("layout");
    let n = sec.usize("n")?;
    let count = sec.usize("subsets")?;
    let mut subsets = Vec::with_capacity(count);
    for _ in 0..count {
        let line = sec.next()?;
        let set = line
            .split_whitespace()
            .map(|v| v.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| sec.err(format!("bad subset '{line}'")))?;
        subsets.push(set);
    }
    let layout = FeatureLayout { n, subsets };

    let mut sec = take("coupling");
    let body = sec.rest();
    let coupling = match body.as_slice() {
        ["none"] => None,
        _ => Some(CouplingGraph::from_text(&body.join("\n"))?),
    };

    let weights = take("weights").matrix()?;

    let mut sec = take("bias");
    let len = sec.next()?;
    let len: usize = len.parse().map_err(|_| sec.err(format!("bad length '{len}'")))?;
    let values = match len {
        0 => Vec::new(),
        _ => {
            let line = sec.next()?;
            sec.floats(line)?
        }
    };
    if values.len() != len {
        return Err(Error::Dimension(format!(
            "bias declares {len} values, found {}",
            values.len()
        )));
    }
    let bias = DVector::from_vec(values);

    let mut sec = take("coverage");
    let r = sec.keyed("radius")?;
    let radius = sec.float(r)?;
    let refs = sec.matrix()?;

    let model = SurrogateModel {
        weights,
        bias,
        lambda,
        lift,
        norm,
        layout,
        coupling,
        coverage: Coverage { refs, radius },
    };
    model.validate()?;
    Ok(model)
}
