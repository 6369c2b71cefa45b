//! Text weight-file format.
//!
//! Classifier files:
//!
//! ```text
//! dense-net v1 <num_layers>
//! layer <in> <out> <relu|identity>
//! <out lines of in whitespace-separated floats>   rows of W
//! <one line of out floats>                        bias
//! ...repeated per layer
//! ```
//!
//! Autoencoder files use the header `dense-ae v1 <num_encoder_layers>
//! <num_decoder_layers>` followed by the encoder then the decoder in the
//! same per-layer format. Floats are serialized with 17 significant digits,
//! which round-trips every finite f64 bit-exactly. The output clamp of an
//! autoencoder is use-time configuration and is not persisted.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Activation, DenseAutoencoder, DenseLayer, DenseNetwork};
use crate::error::{Error, Result};

fn fmt_f64(v: f64) -> String {
    // 16 digits after the point in scientific notation = 17 significant
    // digits, enough for exact f64 round-trip.
    format!("{v:.16e}")
}

fn write_layer(out: &mut String, layer: &DenseLayer) {
    writeln!(
        out,
        "layer {} {} {}",
        layer.in_dim(),
        layer.out_dim(),
        layer.activation().name()
    )
    .expect("write to string");
    for o in 0..layer.out_dim() {
        let row = &layer.weights()[o * layer.in_dim()..(o + 1) * layer.in_dim()];
        let line: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(out, "{}", line.join(" ")).expect("write to string");
    }
    let bias: Vec<String> = layer.bias().iter().map(|v| fmt_f64(*v)).collect();
    writeln!(out, "{}", bias.join(" ")).expect("write to string");
}

pub fn network_to_string(net: &DenseNetwork) -> String {
    let mut out = String::new();
    writeln!(out, "dense-net v1 {}", net.layers().len()).expect("write to string");
    for layer in net.layers() {
        write_layer(&mut out, layer);
    }
    out
}

pub fn autoencoder_to_string(ae: &DenseAutoencoder) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "dense-ae v1 {} {}",
        ae.encoder().len(),
        ae.decoder().len()
    )
    .expect("write to string");
    for layer in ae.encoder().iter().chain(ae.decoder()) {
        write_layer(&mut out, layer);
    }
    out
}

pub fn save_network(net: &DenseNetwork, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, network_to_string(net))?;
    Ok(())
}

pub fn save_autoencoder(ae: &DenseAutoencoder, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, autoencoder_to_string(ae))?;
    Ok(())
}

/// Line-oriented cursor that tracks 1-based line numbers for error messages.
struct Lines<'a> {
    iter: std::str::Lines<'a>,
    line_no: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            iter: text.lines(),
            line_no: 0,
        }
    }

    fn next_line(&mut self, what: &str) -> Result<&'a str> {
        loop {
            match self.iter.next() {
                Some(line) => {
                    self.line_no += 1;
                    if !line.trim().is_empty() {
                        return Ok(line.trim());
                    }
                }
                None => {
                    return Err(Error::Parse {
                        line: self.line_no + 1,
                        message: format!("unexpected end of file, expected {what}"),
                    })
                }
            }
        }
    }

    fn err(&self, message: String) -> Error {
        Error::Parse {
            line: self.line_no,
            message,
        }
    }
}

fn parse_floats(lines: &mut Lines<'_>, expected: usize, what: &str) -> Result<Vec<f64>> {
    let line = lines.next_line(what)?;
    let mut values = Vec::with_capacity(expected);
    for tok in line.split_whitespace() {
        let v: f64 = tok
            .parse()
            .map_err(|_| lines.err(format!("{what}: invalid float {tok:?}")))?;
        if !v.is_finite() {
            return Err(lines.err(format!("{what}: non-finite value {tok:?}")));
        }
        values.push(v);
    }
    if values.len() != expected {
        return Err(lines.err(format!(
            "{what}: expected {expected} values, got {}",
            values.len()
        )));
    }
    Ok(values)
}

fn parse_usize(lines: &Lines<'_>, tok: &str, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| lines.err(format!("{what}: invalid integer {tok:?}")))
}

fn parse_layer(lines: &mut Lines<'_>, index: usize) -> Result<DenseLayer> {
    let header = lines.next_line("layer header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "layer" {
        return Err(lines.err(format!(
            "layer {index}: malformed layer header {header:?}"
        )));
    }
    let in_dim = parse_usize(lines, fields[1], &format!("layer {index}: input dim"))?;
    let out_dim = parse_usize(lines, fields[2], &format!("layer {index}: output dim"))?;
    let activation = Activation::from_name(fields[3]).ok_or_else(|| {
        lines.err(format!(
            "layer {index}: unknown activation {:?}",
            fields[3]
        ))
    })?;
    let mut weights = Vec::with_capacity(in_dim * out_dim);
    for row in 0..out_dim {
        let mut vals = parse_floats(
            lines,
            in_dim,
            &format!("layer {index}: weight row {row}"),
        )?;
        weights.append(&mut vals);
    }
    let bias = parse_floats(lines, out_dim, &format!("layer {index}: bias"))?;
    DenseLayer::new(in_dim, out_dim, weights, bias, activation).map_err(|e| Error::Parse {
        line: 0,
        message: format!("layer {index}: {e}"),
    })
}

fn expect_end(lines: &mut Lines<'_>) -> Result<()> {
    for line in lines.iter.by_ref() {
        lines.line_no += 1;
        if !line.trim().is_empty() {
            return Err(lines.err(format!("unexpected trailing content {:?}", line.trim())));
        }
    }
    Ok(())
}

pub fn network_from_str(text: &str) -> Result<DenseNetwork> {
    let mut lines = Lines::new(text);
    let header = lines.next_line("file header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "dense-net" || fields[1] != "v1" {
        return Err(lines.err(format!("malformed header {header:?}, expected `dense-net v1 <n>`")));
    }
    let num_layers = parse_usize(&lines, fields[2], "layer count")?;
    let mut layers = Vec::with_capacity(num_layers);
    for index in 0..num_layers {
        layers.push(parse_layer(&mut lines, index)?);
    }
    expect_end(&mut lines)?;
    DenseNetwork::new(layers).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })
}

pub fn autoencoder_from_str(
    text: &str,
    output_clamp: Option<(f64, f64)>,
) -> Result<DenseAutoencoder> {
    let mut lines = Lines::new(text);
    let header = lines.next_line("file header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "dense-ae" || fields[1] != "v1" {
        return Err(lines.err(format!(
            "malformed header {header:?}, expected `dense-ae v1 <enc> <dec>`"
        )));
    }
    let num_enc = parse_usize(&lines, fields[2], "encoder layer count")?;
    let num_dec = parse_usize(&lines, fields[3], "decoder layer count")?;
    let mut encoder = Vec::with_capacity(num_enc);
    for index in 0..num_enc {
        encoder.push(parse_layer(&mut lines, index)?);
    }
    let mut decoder = Vec::with_capacity(num_dec);
    for index in 0..num_dec {
        decoder.push(parse_layer(&mut lines, num_enc + index)?);
    }
    expect_end(&mut lines)?;
    DenseAutoencoder::new(encoder, decoder, output_clamp).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })
}

pub fn load_network(path: impl AsRef<Path>) -> Result<DenseNetwork> {
    let text = fs::read_to_string(path)?;
    network_from_str(&text)
}

pub fn load_autoencoder(
    path: impl AsRef<Path>,
    output_clamp: Option<(f64, f64)>,
) -> Result<DenseAutoencoder> {
    let text = fs::read_to_string(path)?;
    autoencoder_from_str(&text, output_clamp)
}
