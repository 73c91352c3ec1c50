use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// Provenance embedded in every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub version: &'static str,
    pub config_hash: String,
    pub seed: u64,
}

impl Meta {
    pub fn new<C: Serialize>(config: &C, seed: u64) -> Self {
        let canonical = serde_json::to_vec(config).expect("config serializes");
        let digest = Sha256::digest(&canonical);
        Meta {
            version: env!("CARGO_PKG_VERSION"),
            config_hash: digest.iter().map(|b| format!("{b:02x}")).collect(),
            seed,
        }
    }
}

pub struct Sink {
    dir: PathBuf,
    meta: Meta,
    written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, meta: Meta) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Sink {
            dir: dir.to_path_buf(),
            meta,
            written: Vec::new(),
        })
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes `{"meta": ..., ...body}`; non-object bodies go under `"data"`.
    pub fn json<T: Serialize>(&mut self, name: &str, body: &T) -> std::io::Result<()> {
        let mut obj = Map::new();
        obj.insert("meta".into(), json!(self.meta));
        match serde_json::to_value(body).map_err(std::io::Error::other)? {
            Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("data".into(), other);
            }
        }
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(&Value::Object(obj)).map_err(std::io::Error::other)?;
        text.push('\n');
        fs::write(&path, text)?;
        self.written.push(path);
        Ok(())
    }

    /// CSV with a leading `# version=.., config_hash=.., seed=..` comment line.
    pub fn csv<R, I>(&mut self, name: &str, header: &[&str], rows: I) -> std::io::Result<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator,
        R::Item: AsRef<[u8]>,
    {
        let path = self.dir.join(name);
        let mut file = fs::File::create(&path)?;
        writeln!(
            file,
            "# version={}, config_hash={}, seed={}",
            self.meta.version, self.meta.config_hash, self.meta.seed
        )?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(header).map_err(std::io::Error::other)?;
        for row in rows {
            w.write_record(row).map_err(std::io::Error::other)?;
        }
        w.flush()?;
        self.written.push(path);
        Ok(())
    }
}

/// Shortest round-trip formatting for floats in CSV cells.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
