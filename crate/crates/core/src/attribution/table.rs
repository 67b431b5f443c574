//! Tab-separated attribution tables.
//!
//! ```text
//! # method=shap
//! # base_value=0.44
//! # output_space=probability
//! f0<TAB>f1
//! 0.36<TAB>0
//! ```

use std::io::{self, Write};

use crate::attribution::{AttributionResult, Method};
use crate::error::{Error, Result};
use crate::tree::OutputSpace;

pub fn write_table<W: Write>(ar: &AttributionResult, mut out: W) -> io::Result<()> {
    writeln!(out, "# method={}", ar.method)?;
    writeln!(out, "# base_value={}", ar.base_value)?;
    writeln!(out, "# output_space={}", ar.output_space)?;
    writeln!(out, "{}", ar.feature_names.join("\t"))?;
    for i in 0..ar.n_instances() {
        let cells: Vec<String> = ar.row(i).iter().map(f64::to_string).collect();
        writeln!(out, "{}", cells.join("\t"))?;
    }
    Ok(())
}

pub fn read_table(text: &str) -> Result<AttributionResult> {
    let bad = |msg: String| Error::Dataset(format!("attribution table: {msg}"));
    let mut method = None;
    let mut base_value = None;
    let mut output_space = None;
    let mut lines = text.lines();
    let header = loop {
        let line = lines
            .next()
            .ok_or_else(|| bad("missing header row".into()))?;
        let Some(meta) = line.strip_prefix('#') else {
            break line;
        };
        let (key, value) = meta
            .trim()
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed metadata line `{line}`")))?;
        match key {
            "method" => method = Some(value.parse::<Method>()?),
            "base_value" => {
                base_value = Some(
                    value
                        .parse::<f64>()
                        .map_err(|_| bad(format!("bad base_value `{value}`")))?,
                )
            }
            "output_space" => output_space = Some(value.parse::<OutputSpace>()?),
            _ => {}
        }
    };
    let feature_names: Vec<String> = if header.is_empty() {
        Vec::new()
    } else {
        header.split('\t').map(str::to_string).collect()
    };
    let mut phi = Vec::new();
    for line in lines {
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != feature_names.len() {
            return Err(bad(format!(
                "row has {} cells, expected {}",
                cells.len(),
                feature_names.len()
            )));
        }
        for c in cells {
            phi.push(
                c.parse::<f64>()
                    .map_err(|_| bad(format!("bad value `{c}`")))?,
            );
        }
    }
    AttributionResult::new(
        method.ok_or_else(|| bad("missing method".into()))?,
        base_value.ok_or_else(|| bad("missing base_value".into()))?,
        output_space.ok_or_else(|| bad("missing output_space".into()))?,
        feature_names,
        phi,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_round_trip() {
        let ar = AttributionResult::new(
            Method::Cfc,
            0.1 + 0.2,
            OutputSpace::LogOdds,
            vec!["a".into(), "b c".into()],
            vec![1e-300, -0.0, 1.0 / 3.0, 12345.678],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_table(&ar, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "# method=cfc\n# base_value=0.30000000000000004\n# output_space=log-odds\na\tb c\n"
        ));
        assert_eq!(read_table(&text).unwrap(), ar);
    }
}
