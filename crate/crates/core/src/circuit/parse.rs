//! Line-oriented circuit files.
//!
//! ```text
//! qubits 3
//! edge 0 1
//! edge 1 2
//! data 0 2
//! rounds 1
//! layer
//!   h 0
//!   cnot 1 2
//! end
//! layer
//!   meas 1 -> s
//!   if s=1 x 0
//!   u1 0 1 1 0 on 2
//! end
//! ```

use super::{lattice, validate_layer, Circuit, ConnectivityGraph, EcModule, Instrument, Layer};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// Parsed circuit file: the per-round circuit plus module metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitFile {
    pub circuit: Circuit,
    /// Data qubits `A′`; all qubits when absent.
    pub data: Option<Vec<usize>>,
    pub rounds: usize,
}

impl CircuitFile {
    pub fn module(&self, p: f64) -> Result<EcModule> {
        let data = self
            .data
            .clone()
            .unwrap_or_else(|| (0..self.circuit.width()).collect());
        EcModule::repeated(self.circuit.clone(), self.rounds, data, p)
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i` (exponents allowed).
pub fn parse_complex(token: &str) -> Option<C64> {
    let t = token.trim();
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().ok().map(|re| C64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |s: &str| -> Option<f64> {
        match s {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => s.parse().ok(),
        }
    };
    match split {
        Some(i) => Some(C64::new(body[..i].parse().ok()?, imag(&body[i..])?)),
        None => Some(C64::new(0.0, imag(body)?)),
    }
}

struct Parser {
    graph: Option<ConnectivityGraph>,
    data: Option<Vec<usize>>,
    rounds: usize,
    layers: Vec<Layer>,
    open: Option<(usize, Layer)>,
}

fn qubit(token: &str, line: usize, m: usize) -> Result<usize> {
    let q: usize = token
        .parse()
        .map_err(|_| Error::parse(line, format!("expected a qubit index, found `{token}`")))?;
    if q >= m {
        return Err(Error::parse(line, format!("qubit {q} out of range (qubits {m})")));
    }
    Ok(q)
}

fn matrix(tokens: &[&str], dim: usize, line: usize) -> Result<CMatrix> {
    if tokens.len() != dim * dim {
        return Err(Error::parse(
            line,
            format!("expected {} matrix entries, found {}", dim * dim, tokens.len()),
        ));
    }
    let entries = tokens
        .iter()
        .map(|t| parse_complex(t).ok_or_else(|| Error::parse(line, format!("bad complex number `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(CMatrix::from_row_slice(dim, dim, &entries))
}

impl Parser {
    fn width(&self, line: usize) -> Result<usize> {
        self.graph
            .as_ref()
            .map(ConnectivityGraph::len)
            .ok_or_else(|| Error::parse(line, "`qubits` must come first"))
    }

    fn instrument(&self, tokens: &[&str], line: usize) -> Result<Instrument> {
        let m = self.width(line)?;
        let op = tokens[0];
        if op == "if" {
            let cond = tokens
                .get(1)
                .and_then(|c| c.split_once('='))
                .ok_or_else(|| Error::parse(line, "expected `if key=value <gate>`"))?;
            if tokens.len() < 3 {
                return Err(Error::parse(line, "missing gate after condition"));
            }
            return Ok(self.instrument(&tokens[2..], line)?.guarded(cond.0, cond.1));
        }
        let on = tokens.iter().position(|&t| t == "on");
        match op {
            "u1" | "u2" => {
                let arity = if op == "u1" { 1 } else { 2 };
                let on = on.ok_or_else(|| Error::parse(line, "expected `on`"))?;
                let qs = tokens[on + 1..]
                    .iter()
                    .map(|t| qubit(t, line, m))
                    .collect::<Result<Vec<_>>>()?;
                if qs.len() != arity {
                    return Err(Error::parse(line, format!("`{op}` acts on {arity} qubit(s)")));
                }
                Ok(Instrument::unitary(&qs, matrix(&tokens[1..on], 1 << arity, line)?))
            }
            "kraus" => {
                let colon = tokens
                    .iter()
                    .position(|&t| t == ":")
                    .ok_or_else(|| Error::parse(line, "expected `kraus on q.. : entries ; entries`"))?;
                if tokens.get(1) != Some(&"on") {
                    return Err(Error::parse(line, "expected `on` after `kraus`"));
                }
                let qs = tokens[2..colon]
                    .iter()
                    .map(|t| qubit(t, line, m))
                    .collect::<Result<Vec<_>>>()?;
                if qs.is_empty() {
                    return Err(Error::parse(line, "kraus needs at least one qubit"));
                }
                let ops = tokens[colon + 1..]
                    .split(|&t| t == ";")
                    .map(|chunk| matrix(chunk, 1 << qs.len(), line))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Instrument::channel(&qs, ops))
            }
            "meas" => match tokens {
                [_, q, "->", label] => Ok(Instrument::measure(qubit(q, line, m)?, label)),
                _ => Err(Error::parse(line, "expected `meas q -> label`")),
            },
            "reset" => match tokens {
                [_, q] => Ok(Instrument::reset(qubit(q, line, m)?)),
                _ => Err(Error::parse(line, "expected `reset q`")),
            },
            name => {
                let u = super::named_gate(name).ok_or_else(|| Error::parse(line, format!("unknown gate `{name}`")))?;
                let arity = u.nrows().trailing_zeros() as usize;
                let qs = tokens[1..]
                    .iter()
                    .map(|t| qubit(t, line, m))
                    .collect::<Result<Vec<_>>>()?;
                if qs.len() != arity {
                    return Err(Error::parse(line, format!("`{name}` acts on {arity} qubit(s)")));
                }
                Ok(Instrument::unitary(&qs, u))
            }
        }
    }

    fn line(&mut self, tokens: &[&str], line: usize) -> Result<()> {
        if self.open.is_some() {
            if tokens == ["end"] {
                let (start, layer) = self.open.take().expect("open layer");
                let report = validate_layer(self.graph.as_ref().expect("graph"), &layer);
                if !report.ok() {
                    return Err(Error::parse(start, report.violations.join("; ")));
                }
                self.layers.push(layer);
            } else {
                let ins = self.instrument(tokens, line)?;
                self.open.as_mut().expect("open layer").1.instruments.push(ins);
            }
            return Ok(());
        }
        match tokens {
            ["qubits", m] => {
                if self.graph.is_some() {
                    return Err(Error::parse(line, "`qubits` given twice"));
                }
                let m: usize = m.parse().map_err(|_| Error::parse(line, "bad qubit count"))?;
                if m == 0 {
                    return Err(Error::parse(line, "need at least one qubit"));
                }
                self.graph = Some(ConnectivityGraph::with_qubits(m));
            }
            ["edge", u, v] => {
                let m = self.width(line)?;
                let (u, v) = (qubit(u, line, m)?, qubit(v, line, m)?);
                self.graph
                    .as_mut()
                    .expect("graph")
                    .add_edge(u, v)
                    .map_err(|e| Error::parse(line, e.to_string()))?;
            }
            ["grid", dims @ ..] if !dims.is_empty() => {
                let m = self.width(line)?;
                let shape = dims
                    .iter()
                    .map(|d| d.parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::parse(line, "bad grid shape"))?;
                if shape.iter().product::<usize>() != m {
                    return Err(Error::parse(line, format!("grid shape does not have {m} sites")));
                }
                let (g, _) = lattice(&shape);
                let graph = self.graph.as_mut().expect("graph");
                for (u, v) in g.edges() {
                    graph.add_edge(u, v).expect("in range");
                }
            }
            ["data", qs @ ..] => {
                let m = self.width(line)?;
                self.data = Some(qs.iter().map(|t| qubit(t, line, m)).collect::<Result<_>>()?);
            }
            ["rounds", j] => {
                self.rounds = j
                    .parse()
                    .ok()
                    .filter(|&j: &usize| j >= 1)
                    .ok_or_else(|| Error::parse(line, "rounds must be a positive integer"))?;
            }
            ["layer"] => {
                self.width(line)?;
                self.open = Some((line, Layer::default()));
            }
            _ => return Err(Error::parse(line, format!("unrecognized directive `{}`", tokens.join(" ")))),
        }
        Ok(())
    }
}

pub fn parse_circuit(text: &str) -> Result<CircuitFile> {
    let mut p = Parser {
        graph: None,
        data: None,
        rounds: 1,
        layers: Vec::new(),
        open: None,
    };
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        last = i + 1;
        p.line(&tokens, i + 1)?;
    }
    if let Some((start, _)) = p.open {
        return Err(Error::parse(start, "layer is missing `end`"));
    }
    let graph = p.graph.ok_or_else(|| Error::parse(last, "no `qubits` directive"))?;
    Ok(CircuitFile {
        circuit: Circuit { graph, layers: p.layers },
        data: p.data,
        rounds: p.rounds,
    })
}
