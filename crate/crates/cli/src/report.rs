//! Versioned JSON envelope and CSV emission.

use std::io::Write;

use serde::Serialize;

pub const SCHEMA: &str = "ekr-report/1";

#[derive(Serialize)]
pub struct Report<I: Serialize, R: Serialize> {
    pub schema: &'static str,
    pub command: &'static str,
    pub instance: I,
    pub results: Vec<R>,
    pub pass: bool,
}

impl<I: Serialize, R: Serialize> Report<I, R> {
    pub fn new(command: &'static str, instance: I, results: Vec<R>, pass: bool) -> Self {
        Report {
            schema: SCHEMA,
            command,
            instance,
            results,
            pass,
        }
    }

    pub fn write_json(&self, out: &mut dyn Write) -> anyhow::Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)?;
        Ok(())
    }
}

/// Header plus one record per row; an empty slice still yields nothing but
/// a valid (empty) document.
pub fn write_csv<T: Serialize>(rows: &[T], out: &mut dyn Write) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        a: u32,
        b: Option<String>,
    }

    #[test]
    fn envelope_shape() {
        let r = Report::new("count", serde_json::json!({"n": 3}), vec![Row { a: 1, b: None }], true);
        let mut buf = Vec::new();
        r.write_json(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["results"][0]["a"], 1);
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["command", "instance", "pass", "results", "schema"]);
    }

    #[test]
    fn csv_rows() {
        let mut buf = Vec::new();
        write_csv(
            &[
                Row {
                    a: 1,
                    b: Some("x".into()),
                },
                Row { a: 2, b: None },
            ],
            &mut buf,
        )
        .unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,x\n2,\n");
    }
}
