//! The circuit file format: a line-structured, diff-friendly tree.
//!
//! ```text
//! version 1
//! modes 2
//!
//! layer
//!   kerr self -1/2 on 1
//!   gaussian
//!     U beamsplitter 1 2 0.7853981633974483 0
//!     r 0.3 0
//!     alpha 0.1+0.2i 0+0i
//!     V identity
//! ```
//!
//! Mode indices are 1-based in files. Kerr parameters written as `p/q` are
//! rational gates; decimal parameters are irrational gates. Passive unitaries
//! are `identity`, a `matrix` followed by m rows of m complex entries, or a
//! list of `phase_shifter` / `beamsplitter` primitives composed in order.
//! Complex numbers use the explicit `a+bi` syntax; all floats are emitted
//! with 17 significant digits so files round-trip bit-exactly.

use cvsim::circuit::{CircuitIr, Layer, NonGaussianGate};
use cvsim::gaussian::{compose_elementary, ElementaryGate, GaussianUnitary};
use cvsim::kerr::{KerrKind, RationalKerr};
use cvsim::Complex64;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

/// Format a float with 17 significant digits (round-trip safe).
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Format a complex number in the file syntax `a+bi`.
pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", format_f64(z.re), format_f64(-z.im))
    } else {
        format!("{}+{}i", format_f64(z.re), format_f64(z.im))
    }
}

/// Parse `a+bi`, `a-bi`, a bare real `a`, or a pure imaginary `bi`.
pub fn parse_complex(token: &str) -> Result<Complex64, String> {
    let t = token.trim();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    if let Some(body) = t.strip_suffix(['i', 'I']) {
        // find the sign splitting real and imaginary parts, skipping the
        // leading sign and any exponent signs
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let c = bytes[i] as char;
            if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re: f64 = body[..i]
                    .parse()
                    .map_err(|_| format!("bad real part in '{t}'"))?;
                let sign = if bytes[i] as char == '-' { -1.0 } else { 1.0 };
                let im_str = &body[i + 1..];
                let im: f64 = if im_str.is_empty() {
                    1.0
                } else {
                    im_str.parse().map_err(|_| format!("bad imaginary part in '{t}'"))?
                };
                Ok(Complex64::new(re, sign * im))
            }
            None => {
                let im: f64 = if body.is_empty() || body == "+" {
                    1.0
                } else if body == "-" {
                    -1.0
                } else {
                    body.parse().map_err(|_| format!("bad imaginary literal '{t}'"))?
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = t.parse().map_err(|_| format!("bad real literal '{t}'"))?;
        Ok(Complex64::new(re, 0.0))
    }
}

#[derive(Default)]
enum PassiveSpec {
    #[default]
    Identity,
    Matrix(DMatrix<Complex64>),
    Gates(Vec<ElementaryGate>),
}

impl PassiveSpec {
    fn into_matrix(self, modes: usize, line: usize) -> Result<DMatrix<Complex64>, ParseError> {
        match self {
            PassiveSpec::Identity => Ok(DMatrix::identity(modes, modes)),
            PassiveSpec::Matrix(m) => Ok(m),
            PassiveSpec::Gates(gates) => compose_elementary(&gates, modes)
                .map_err(|e| ParseError { line, message: e.to_string() }),
        }
    }
}

#[derive(Default)]
struct GaussianBuilder {
    u: PassiveSpec,
    v: PassiveSpec,
    alpha: Option<Vec<Complex64>>,
    r: Option<Vec<f64>>,
    start_line: usize,
}

#[derive(Default)]
struct LayerBuilder {
    kerr: Option<NonGaussianGate>,
    gaussian: Option<GaussianBuilder>,
}

impl LayerBuilder {
    fn finish(self, modes: usize, index: usize) -> Result<Layer, ParseError> {
        let gaussian = match self.gaussian {
            None => None,
            Some(g) => {
                let line = g.start_line;
                let u = g.u.into_matrix(modes, line)?;
                let v = g.v.into_matrix(modes, line)?;
                let alpha = DVector::from_vec(
                    g.alpha.unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); modes]),
                );
                let r = DVector::from_vec(g.r.unwrap_or_else(|| vec![0.0; modes]));
                let gate = GaussianUnitary::new(v, alpha, r, u).map_err(|e| ParseError {
                    line,
                    message: format!("layer {}: {e}", index + 1),
                })?;
                Some(gate)
            }
        };
        Ok(Layer { non_gaussian: self.kerr, gaussian })
    }
}

fn parse_mode(token: &str, modes: usize, line: usize) -> Result<usize, ParseError> {
    let idx: usize = token
        .parse()
        .map_err(|_| ParseError { line, message: format!("bad mode index '{token}'") })?;
    if idx < 1 || idx > modes {
        return err(line, format!("mode {idx} out of range 1..={modes}"));
    }
    Ok(idx - 1)
}

/// Parse a circuit file into an IR.
pub fn parse(text: &str) -> Result<CircuitIr, ParseError> {
    let mut version_seen = false;
    let mut modes: Option<usize> = None;
    let mut layers: Vec<Layer> = Vec::new();
    let mut current: Option<LayerBuilder> = None;
    let mut pending_matrix: Option<(bool, Vec<Vec<Complex64>>, usize)> = None; // (is_u, rows, line)

    let finish_layer = |builder: Option<LayerBuilder>,
                        layers: &mut Vec<Layer>,
                        modes: usize|
     -> Result<(), ParseError> {
        if let Some(b) = builder {
            let index = layers.len();
            layers.push(b.finish(modes, index)?);
        }
        Ok(())
    };

    for (line_index, raw) in text.lines().enumerate() {
        let line_no = line_index + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();

        // a pending `matrix` block consumes full rows of complex entries
        if let Some((is_u, mut rows, start)) = pending_matrix.take() {
            let m = modes.expect("matrix only appears after modes");
            let mut row = Vec::with_capacity(m);
            for tok in &tokens {
                row.push(
                    parse_complex(tok)
                        .map_err(|e| ParseError { line: line_no, message: e })?,
                );
            }
            if row.len() != m {
                return err(line_no, format!("matrix row needs {m} entries, got {}", row.len()));
            }
            rows.push(row);
            if rows.len() < m {
                pending_matrix = Some((is_u, rows, start));
            } else {
                let matrix = DMatrix::from_fn(m, m, |i, j| rows[i][j]);
                let builder = current
                    .as_mut()
                    .and_then(|l| l.gaussian.as_mut())
                    .expect("matrix block inside gaussian");
                if is_u {
                    builder.u = PassiveSpec::Matrix(matrix);
                } else {
                    builder.v = PassiveSpec::Matrix(matrix);
                }
            }
            continue;
        }

        match tokens[0] {
            "version" => {
                if tokens.get(1) != Some(&"1") {
                    return err(line_no, "unsupported version (expected 1)");
                }
                version_seen = true;
            }
            "modes" => {
                let m: usize = tokens
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or(ParseError { line: line_no, message: "bad mode count".into() })?;
                if m == 0 {
                    return err(line_no, "mode count must be at least 1");
                }
                modes = Some(m);
            }
            "layer" => {
                let m = modes.ok_or(ParseError {
                    line: line_no,
                    message: "layer before modes declaration".into(),
                })?;
                finish_layer(current.take(), &mut layers, m)?;
                current = Some(LayerBuilder::default());
            }
            "kerr" => {
                let m = modes.ok_or(ParseError {
                    line: line_no,
                    message: "kerr before modes declaration".into(),
                })?;
                let layer = current.as_mut().ok_or(ParseError {
                    line: line_no,
                    message: "kerr outside a layer".into(),
                })?;
                if layer.kerr.is_some() {
                    return err(line_no, "layer already has a kerr gate");
                }
                let kind = match tokens.get(1) {
                    Some(&"self") => KerrKind::SelfKerr,
                    Some(&"cross") => KerrKind::CrossKerr,
                    other => {
                        return err(line_no, format!("bad kerr kind {other:?}"));
                    }
                };
                let param = tokens.get(2).ok_or(ParseError {
                    line: line_no,
                    message: "kerr needs a parameter".into(),
                })?;
                if tokens.get(3) != Some(&"on") {
                    return err(line_no, "expected 'on' before kerr target modes");
                }
                let targets: Vec<usize> = tokens[4..]
                    .iter()
                    .map(|t| parse_mode(t, m, line_no))
                    .collect::<Result<_, _>>()?;
                let expected = if kind == KerrKind::SelfKerr { 1 } else { 2 };
                if targets.len() != expected {
                    return err(
                        line_no,
                        format!("{kind:?} needs {expected} target mode(s), got {}", targets.len()),
                    );
                }
                let gate = if let Some((num, den)) = param.split_once('/') {
                    let p: i64 = num.parse().map_err(|_| ParseError {
                        line: line_no,
                        message: format!("bad numerator '{num}'"),
                    })?;
                    let q: u64 = den.parse().map_err(|_| ParseError {
                        line: line_no,
                        message: format!("bad denominator '{den}'"),
                    })?;
                    let rational = match kind {
                        KerrKind::SelfKerr => RationalKerr::self_kerr(p, q, targets[0]),
                        KerrKind::CrossKerr => {
                            RationalKerr::cross_kerr(p, q, targets[0], targets[1])
                        }
                    }
                    .map_err(|e| ParseError { line: line_no, message: e.to_string() })?;
                    NonGaussianGate::Kerr(rational)
                } else {
                    let x: f64 = param.parse().map_err(|_| ParseError {
                        line: line_no,
                        message: format!("bad kerr parameter '{param}'"),
                    })?;
                    NonGaussianGate::IrrationalKerr { x, kind, modes: targets }
                };
                layer.kerr = Some(gate);
            }
            "gaussian" => {
                let layer = current.as_mut().ok_or(ParseError {
                    line: line_no,
                    message: "gaussian outside a layer".into(),
                })?;
                if layer.gaussian.is_some() {
                    return err(line_no, "layer already has a gaussian gate");
                }
                layer.gaussian =
                    Some(GaussianBuilder { start_line: line_no, ..Default::default() });
            }
            "U" | "V" => {
                let m = modes.unwrap_or(0);
                let is_u = tokens[0] == "U";
                let builder = current
                    .as_mut()
                    .and_then(|l| l.gaussian.as_mut())
                    .ok_or(ParseError {
                        line: line_no,
                        message: format!("{} outside a gaussian block", tokens[0]),
                    })?;
                match tokens.get(1) {
                    Some(&"identity") => {
                        let spec = PassiveSpec::Identity;
                        if is_u {
                            builder.u = spec;
                        } else {
                            builder.v = spec;
                        }
                    }
                    Some(&"matrix") => {
                        pending_matrix = Some((is_u, Vec::new(), line_no));
                    }
                    Some(&"phase_shifter") => {
                        let mode = parse_mode(
                            tokens.get(2).copied().unwrap_or(""),
                            m,
                            line_no,
                        )?;
                        let theta: f64 =
                            tokens.get(3).and_then(|t| t.parse().ok()).ok_or(ParseError {
                                line: line_no,
                                message: "phase_shifter needs <mode> <theta>".into(),
                            })?;
                        let target = if is_u { &mut builder.u } else { &mut builder.v };
                        push_gate(target, ElementaryGate::PhaseShifter { mode, theta }, line_no)?;
                    }
                    Some(&"beamsplitter") => {
                        let a = parse_mode(tokens.get(2).copied().unwrap_or(""), m, line_no)?;
                        let b = parse_mode(tokens.get(3).copied().unwrap_or(""), m, line_no)?;
                        let theta: f64 =
                            tokens.get(4).and_then(|t| t.parse().ok()).ok_or(ParseError {
                                line: line_no,
                                message: "beamsplitter needs <a> <b> <theta> <phi>".into(),
                            })?;
                        let phi: f64 =
                            tokens.get(5).and_then(|t| t.parse().ok()).ok_or(ParseError {
                                line: line_no,
                                message: "beamsplitter needs <a> <b> <theta> <phi>".into(),
                            })?;
                        let target = if is_u { &mut builder.u } else { &mut builder.v };
                        push_gate(
                            target,
                            ElementaryGate::BeamSplitter { mode_a: a, mode_b: b, theta, phi },
                            line_no,
                        )?;
                    }
                    other => {
                        return err(line_no, format!("bad passive spec {other:?}"));
                    }
                }
            }
            "alpha" => {
                let m = modes.unwrap_or(0);
                let builder = current
                    .as_mut()
                    .and_then(|l| l.gaussian.as_mut())
                    .ok_or(ParseError {
                        line: line_no,
                        message: "alpha outside a gaussian block".into(),
                    })?;
                let values: Vec<Complex64> = tokens[1..]
                    .iter()
                    .map(|t| parse_complex(t))
                    .collect::<Result<_, _>>()
                    .map_err(|e| ParseError { line: line_no, message: e })?;
                if values.len() != m {
                    return err(line_no, format!("alpha needs {m} entries, got {}", values.len()));
                }
                builder.alpha = Some(values);
            }
            "r" => {
                let m = modes.unwrap_or(0);
                let builder = current
                    .as_mut()
                    .and_then(|l| l.gaussian.as_mut())
                    .ok_or(ParseError {
                        line: line_no,
                        message: "r outside a gaussian block".into(),
                    })?;
                let values: Result<Vec<f64>, _> =
                    tokens[1..].iter().map(|t| t.parse::<f64>()).collect();
                let values = values.map_err(|_| ParseError {
                    line: line_no,
                    message: "bad squeezing list".into(),
                })?;
                if values.len() != m {
                    return err(line_no, format!("r needs {m} entries, got {}", values.len()));
                }
                builder.r = Some(values);
            }
            other => {
                return err(line_no, format!("unknown directive '{other}'"));
            }
        }
    }
    if pending_matrix.is_some() {
        return err(text.lines().count(), "unterminated matrix block");
    }
    if !version_seen {
        return err(1, "missing version declaration");
    }
    let m = modes.ok_or(ParseError { line: 1, message: "missing modes declaration".into() })?;
    finish_layer(current.take(), &mut layers, m)?;
    if layers.is_empty() {
        return err(1, "circuit has no layers");
    }
    CircuitIr::new(m, layers).map_err(|e| ParseError { line: 1, message: e.to_string() })
}

fn push_gate(
    spec: &mut PassiveSpec,
    gate: ElementaryGate,
    line: usize,
) -> Result<(), ParseError> {
    match spec {
        PassiveSpec::Identity => {
            *spec = PassiveSpec::Gates(vec![gate]);
            Ok(())
        }
        PassiveSpec::Gates(gates) => {
            gates.push(gate);
            Ok(())
        }
        PassiveSpec::Matrix(_) => err(line, "cannot mix matrix and primitive passive specs"),
    }
}

// the emitter backs the format's round-trip guarantee; the binary itself
// only parses, so these are exercised from the tests
#[cfg_attr(not(test), allow(dead_code))]
fn is_identity(m: &DMatrix<Complex64>) -> bool {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            if m[(i, j)] != expected {
                return false;
            }
        }
    }
    true
}

#[cfg_attr(not(test), allow(dead_code))]
fn emit_passive(out: &mut String, label: &str, m: &DMatrix<Complex64>) {
    if is_identity(m) {
        out.push_str(&format!("    {label} identity\n"));
        return;
    }
    out.push_str(&format!("    {label} matrix\n"));
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_complex(m[(i, j)])).collect();
        out.push_str(&format!("      {}\n", row.join(" ")));
    }
}

/// Re-emit a circuit in canonical file form; parsing the result reproduces
/// the same IR.
#[cfg_attr(not(test), allow(dead_code))]
pub fn emit(circuit: &CircuitIr) -> String {
    let mut out = String::new();
    out.push_str("version 1\n");
    out.push_str(&format!("modes {}\n", circuit.modes()));
    for layer in circuit.layers() {
        out.push_str("\nlayer\n");
        match &layer.non_gaussian {
            Some(NonGaussianGate::Kerr(k)) => {
                let kind = match k.kind() {
                    KerrKind::SelfKerr => "self",
                    KerrKind::CrossKerr => "cross",
                };
                let targets: Vec<String> =
                    k.target_modes().iter().map(|m| (m + 1).to_string()).collect();
                out.push_str(&format!(
                    "  kerr {kind} {}/{} on {}\n",
                    k.numerator(),
                    k.denominator(),
                    targets.join(" ")
                ));
            }
            Some(NonGaussianGate::IrrationalKerr { x, kind, modes }) => {
                let kind = match kind {
                    KerrKind::SelfKerr => "self",
                    KerrKind::CrossKerr => "cross",
                };
                let targets: Vec<String> = modes.iter().map(|m| (m + 1).to_string()).collect();
                out.push_str(&format!(
                    "  kerr {kind} {} on {}\n",
                    format_f64(*x),
                    targets.join(" ")
                ));
            }
            Some(NonGaussianGate::Diagonal(_)) => {
                // diagonal callbacks are an API-level feature with no file syntax
            }
            None => {}
        }
        if let Some(g) = &layer.gaussian {
            out.push_str("  gaussian\n");
            emit_passive(&mut out, "U", g.passive_in());
            let alphas: Vec<String> =
                g.displacement().iter().map(|z| format_complex(*z)).collect();
            out.push_str(&format!("    alpha {}\n", alphas.join(" ")));
            let rs: Vec<String> = g.squeezing().iter().map(|r| format_f64(*r)).collect();
            out.push_str(&format!("    r {}\n", rs.join(" ")));
            emit_passive(&mut out, "V", g.passive_out());
        }
    }
    out
}
