//! Text checkpoints.
//!
//! ```text
//! shs-checkpoint v1
//! meta <key> <value>            (zero or more)
//! model layers <L> hidden <h> input <d>
//! tensor layer1.weight <rows> <cols>
//! <one line of space-separated floats per row>
//! tensor layer1.bias <len>
//! <one line>
//! ...
//! tensor head.weight 2 <h>
//! tensor head.bias 2
//! ```
//!
//! Floats carry 17 significant digits, so a write/read cycle is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};

use super::{Dense, ModelParams};
use crate::error::{Result, ShsError};
use crate::io::fmt_f64;

const MAGIC: &str = "shs-checkpoint v1";

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub params: ModelParams,
    /// Free-form `key value` header entries, in file order.
    pub meta: Vec<(String, String)>,
}

impl Checkpoint {
    pub fn new(params: ModelParams) -> Self {
        Checkpoint {
            params,
            meta: Vec::new(),
        }
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn write_row(out: &mut String, values: impl IntoIterator<Item = f64>) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(' ');
        }
        first = false;
        out.push_str(&fmt_f64(v));
    }
    out.push('\n');
}

pub fn checkpoint_text(ckpt: &Checkpoint) -> String {
    let p = &ckpt.params;
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    for (k, v) in &ckpt.meta {
        let _ = writeln!(out, "meta {k} {v}");
    }
    let _ = writeln!(
        out,
        "model layers {} hidden {} input {}",
        p.depth(),
        p.hidden(),
        p.input_dim()
    );
    let named = p
        .layers
        .iter()
        .enumerate()
        .map(|(i, d)| (format!("layer{}", i + 1), d))
        .chain(std::iter::once(("head".to_string(), &p.head)));
    for (name, dense) in named {
        let (rows, cols) = dense.weight.dim();
        let _ = writeln!(out, "tensor {name}.weight {rows} {cols}");
        for row in dense.weight.rows() {
            write_row(&mut out, row.iter().copied());
        }
        let _ = writeln!(out, "tensor {name}.bias {}", dense.bias.len());
        write_row(&mut out, dense.bias.iter().copied());
    }
    out
}

pub fn write_checkpoint(ckpt: &Checkpoint, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, checkpoint_text(ckpt)).map_err(|e| ShsError::io(path, e))
}

pub fn read_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| ShsError::io(path, e))?;
    parse_checkpoint(&text).map_err(|(line, message)| ShsError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    })
}

type ParseResult<T> = std::result::Result<T, (usize, String)>;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> ParseResult<&'a str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l)
            }
            None => Err((self.line + 1, "unexpected end of file".into())),
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> ParseResult<T> {
        Err((self.line, msg.into()))
    }

    fn floats(&mut self, expected: usize) -> ParseResult<Vec<f64>> {
        let line = self.next()?;
        let values: std::result::Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
        match values {
            Ok(v) if v.len() == expected => Ok(v),
            Ok(v) => self.err(format!("expected {expected} values, found {}", v.len())),
            Err(e) => self.err(format!("bad float: {e}")),
        }
    }

    fn header(&mut self, name: &str, dims: usize) -> ParseResult<Vec<usize>> {
        let line = self.next()?;
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.len() != 2 + dims || words[0] != "tensor" || words[1] != name {
            return self.err(format!("expected `tensor {name}` with {dims} dimension(s)"));
        }
        words[2..]
            .iter()
            .map(|w| w.parse::<usize>().or_else(|e| self.err(format!("bad dimension: {e}"))))
            .collect()
    }
}

pub fn parse_checkpoint(text: &str) -> ParseResult<Checkpoint> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    if lines.next()? != MAGIC {
        return lines.err(format!("missing `{MAGIC}` header"));
    }
    let mut meta = Vec::new();
    let model_line = loop {
        let line = lines.next()?;
        match line.strip_prefix("meta ") {
            Some(rest) => {
                let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
                meta.push((k.to_string(), v.to_string()));
            }
            None => break line,
        }
    };
    let words: Vec<&str> = model_line.split_whitespace().collect();
    let dims = match words.as_slice() {
        ["model", "layers", l, "hidden", h, "input", d] => (l.parse::<usize>(), h.parse::<usize>(), d.parse::<usize>()),
        _ => return lines.err("expected `model layers <L> hidden <h> input <d>`"),
    };
    let (depth, hidden, input) = match dims {
        (Ok(l), Ok(h), Ok(d)) => (l, h, d),
        _ => return lines.err("bad model dimensions"),
    };
    let mut params = ModelParams::zeros(input, depth, hidden).or_else(|e| lines.err(e.to_string()))?;
    let names: Vec<String> = (1..=depth)
        .map(|i| format!("layer{i}"))
        .chain(["head".to_string()])
        .collect();
    for (name, dense) in names
        .iter()
        .zip(params.layers.iter_mut().chain(std::iter::once(&mut params.head)))
    {
        let shape = lines.header(&format!("{name}.weight"), 2)?;
        if (shape[0], shape[1]) != dense.weight.dim() {
            return lines.err(format!(
                "{name}.weight has shape {shape:?}, expected {:?}",
                dense.weight.dim()
            ));
        }
        let mut flat = Vec::with_capacity(shape[0] * shape[1]);
        for _ in 0..shape[0] {
            flat.extend(lines.floats(shape[1])?);
        }
        let len = lines.header(&format!("{name}.bias"), 1)?[0];
        if len != dense.bias.len() {
            return lines.err(format!("{name}.bias has length {len}, expected {}", dense.bias.len()));
        }
        let bias = lines.floats(len)?;
        *dense = Dense {
            weight: Array2::from_shape_vec((shape[0], shape[1]), flat).expect("sized above"),
            bias: Array1::from_vec(bias),
        };
    }
    Ok(Checkpoint { params, meta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnn::{init_params, TrainConfig};

    #[test]
    fn round_trip_is_exact() {
        let cfg = TrainConfig {
            layers: 3,
            hidden: 5,
            ..TrainConfig::default()
        };
        let mut ckpt = Checkpoint::new(init_params(&cfg, 11).unwrap());
        ckpt.params.head.bias[1] = -1.0 / 3.0;
        ckpt.meta.push(("inner_lr".into(), "0.1".into()));
        let text = checkpoint_text(&ckpt);
        let back = parse_checkpoint(&text).unwrap();
        assert_eq!(back, ckpt);
        assert_eq!(checkpoint_text(&back), text);
        assert_eq!(back.meta_value("inner_lr"), Some("0.1"));
    }

    #[test]
    fn truncated_file_reports_line() {
        let ckpt = Checkpoint::new(ModelParams::zeros(3, 1, 2).unwrap());
        let text = checkpoint_text(&ckpt);
        let cut: String = text.lines().take(4).collect::<Vec<_>>().join("\n");
        let (line, _) = parse_checkpoint(&cut).unwrap_err();
        assert_eq!(line, 5);
        assert!(parse_checkpoint("nonsense").is_err());
    }
}
