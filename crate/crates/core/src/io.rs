//! Edge lists, metadata sidecars and result CSVs.
//!
//! Every CSV starts with `#`-prefixed `key=value` lines that echo the run
//! configuration, followed by one header row. Fields are comma separated,
//! lines end in `\n`, and floats use Rust's shortest round-trip formatting.

use std::fmt::Display;
use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::connectivity::RootedDag;
use crate::error::{Error, Result};
use crate::generator::{Dag, GeneratorKind, InitialCondition};
use crate::model::{Params, VertexId};

pub const SCHEMA_VERSION: u32 = 1;

pub const EDGE_HEADER: &str = "source,target";

/// JSON sidecar for an edge-list file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphMetadata {
    pub alpha: f64,
    pub beta: f64,
    pub n_vertices: usize,
    pub seed: u64,
    pub generator_kind: GeneratorKind,
    pub init: InitialCondition,
    pub schema_version: u32,
}

impl GraphMetadata {
    pub fn of(dag: &Dag) -> Self {
        GraphMetadata {
            alpha: dag.params().alpha(),
            beta: dag.params().beta(),
            n_vertices: dag.n_vertices(),
            seed: dag.seed(),
            generator_kind: dag.kind(),
            init: dag.init(),
            schema_version: SCHEMA_VERSION,
        }
    }
}

fn write_arcs<W: Write>(arcs: impl Iterator<Item = (VertexId, VertexId)>, w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().from_writer(w);
    out.write_record(["source", "target"])?;
    for arc in arcs {
        out.serialize(arc)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_edge_list<W: Write>(dag: &Dag, w: W) -> Result<()> {
    write_arcs(dag.arcs(), w)
}

/// Edge list of a root-augmented graph; the root is written as `0`.
pub fn write_rooted_edge_list<W: Write>(rooted: &RootedDag, w: W) -> Result<()> {
    write_arcs(rooted.arcs().into_iter(), w)
}

/// Parses an edge list written by [`write_edge_list`]. The vertex count and
/// provenance come from `meta`, since isolated vertices leave no line.
pub fn parse_edge_list<R: Read>(reader: R, meta: &GraphMetadata) -> Result<Dag> {
    let params = Params::new(meta.alpha, meta.beta)?;
    let mut lists: Vec<Vec<VertexId>> = vec![Vec::new(); meta.n_vertices];
    let mut rdr = csv::ReaderBuilder::new().from_reader(reader);
    if rdr.headers()?.iter().collect::<Vec<_>>() != ["source", "target"] {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{EDGE_HEADER}`"),
        });
    }
    let mut last: Option<(VertexId, VertexId)> = None;
    for (i, record) in rdr.deserialize::<(VertexId, VertexId)>().enumerate() {
        let (s, t) = record?;
        let bad = |message: String| Error::Parse { line: i + 2, message };
        if s == 0 || s as usize > meta.n_vertices || t == 0 || t >= s {
            return Err(bad(format!(
                "arc {s} -> {t} invalid for {} vertices",
                meta.n_vertices
            )));
        }
        if last.is_some_and(|prev| prev >= (s, t)) {
            return Err(bad(format!("arc {s},{t} out of order")));
        }
        last = Some((s, t));
        lists[s as usize - 1].push(t);
    }
    Dag::from_out_arcs(params, meta.seed, meta.generator_kind, meta.init, &lists)
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir`.
pub fn write_graph(dag: &Dag, dir: &Path, stem: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    let file = fs::File::create(dir.join(format!("{stem}.csv")))?;
    write_edge_list(dag, BufWriter::new(file))?;
    let meta = serde_json::to_string_pretty(&GraphMetadata::of(dag))?;
    fs::write(dir.join(format!("{stem}.json")), meta + "\n")?;
    Ok(())
}

/// Reads a graph written by [`write_graph`].
pub fn read_graph(dir: &Path, stem: &str) -> Result<Dag> {
    let meta: GraphMetadata =
        serde_json::from_str(&fs::read_to_string(dir.join(format!("{stem}.json")))?)?;
    let file = fs::File::open(dir.join(format!("{stem}.csv")))?;
    parse_edge_list(std::io::BufReader::new(file), &meta)
}

/// A CSV table held in memory until written.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    comments: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        CsvTable {
            comments: vec![("schema_version".into(), SCHEMA_VERSION.to_string())],
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Adds a `# key=value` line to the header.
    pub fn comment(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.comments.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, v) in &self.comments {
            writeln!(w, "# {k}={v}")?;
        }
        let mut out = csv::WriterBuilder::new().from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        self.write_to(BufWriter::new(fs::File::create(path)?))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Formats a float cell; `NaN` stands for undefined values.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x}")
    }
}

/// Formats an optional float, with empty meaning undefined.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Parsed form of a CSV written by [`CsvTable`]: header echo plus rows.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedCsv {
    pub comments: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ParsedCsv {
    pub fn comment(&self, key: &str) -> Option<&str> {
        self.comments.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

pub fn parse_csv(text: &str) -> Result<ParsedCsv> {
    let mut comments = Vec::new();
    let mut body = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        let Some(rest) = line.strip_prefix('#') else {
            break;
        };
        let (k, v) = rest.trim().split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: "comment must be `# key=value`".into(),
        })?;
        comments.push((k.to_string(), v.to_string()));
        body += line.len();
    }
    let mut rdr = csv::ReaderBuilder::new().from_reader(&text.as_bytes()[body..]);
    let columns = rdr.headers()?.iter().map(str::to_string).collect();
    let rows = rdr
        .records()
        .map(|r| Ok(r?.iter().map(str::to_string).collect()))
        .collect::<Result<Vec<Vec<String>>>>()?;
    Ok(ParsedCsv {
        comments,
        columns,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::augment_root;
    use crate::generator::generate;
    use proptest::prelude::*;

    fn params() -> Params {
        Params::new(3.0, 2.0).unwrap()
    }

    fn roundtrip(dag: &Dag) -> Dag {
        let mut buf = Vec::new();
        write_edge_list(dag, &mut buf).unwrap();
        parse_edge_list(buf.as_slice(), &GraphMetadata::of(dag)).unwrap()
    }

    #[test]
    fn single_vertex_is_header_only() {
        let dag = generate(params(), 1, 0, InitialCondition::None, GeneratorKind::Reference).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&dag, &mut buf).unwrap();
        assert_eq!(buf, b"source,target\n");
        assert_eq!(roundtrip(&dag), dag);
    }

    #[test]
    fn small_graph_text() {
        let dag = Dag::from_out_arcs(
            params(),
            7,
            GeneratorKind::Accelerated,
            InitialCondition::fanout(2),
            &[vec![], vec![1], vec![2, 1], vec![]],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_edge_list(&dag, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "source,target\n2,1\n3,1\n3,2\n");
        let json = serde_json::to_value(GraphMetadata::of(&dag)).unwrap();
        assert_eq!(json["n_vertices"], 4);
        assert_eq!(json["generator_kind"], "accelerated");
        assert_eq!(json["init"]["mode"], "genesis_fanout");
        assert_eq!(json["init"]["k"], 2);
    }

    #[test]
    fn rooted_text_uses_zero() {
        let dag = Dag::from_out_arcs(
            params(),
            0,
            GeneratorKind::Reference,
            InitialCondition::None,
            &[vec![], vec![1], vec![]],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_rooted_edge_list(&augment_root(&dag), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "source,target\n1,0\n2,1\n3,0\n");
    }

    #[test]
    fn parse_rejects_malformed_input() {
        let meta = GraphMetadata::of(
            &generate(params(), 3, 0, InitialCondition::None, GeneratorKind::Reference).unwrap(),
        );
        for text in [
            "src,dst\n",
            "source,target\n2\n",
            "source,target\n2,2\n",
            "source,target\n4,1\n",
            "source,target\n3,1\n2,1\n",
            "source,target\n2,x\n",
        ] {
            assert!(parse_edge_list(text.as_bytes(), &meta).is_err(), "{text:?}");
        }
    }

    #[test]
    fn graph_files_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let dag = generate(params(), 500, 4, InitialCondition::fanout(10), GeneratorKind::Accelerated)
            .unwrap();
        write_graph(&dag, dir.path(), "g").unwrap();
        assert_eq!(read_graph(dir.path(), "g").unwrap(), dag);
        let first = fs::read(dir.path().join("g.csv")).unwrap();
        write_graph(&dag, dir.path(), "h").unwrap();
        assert_eq!(fs::read(dir.path().join("h.csv")).unwrap(), first);
    }

    #[test]
    fn csv_table_layout() {
        let mut t = CsvTable::new(&["k", "probability"]);
        t.comment("alpha", 3.0).comment("beta", 2);
        t.push_row(vec!["0".into(), fmt_f64(0.25)]);
        t.push_row(vec!["1".into(), fmt_f64(f64::NAN)]);
        let text = t.to_csv_string();
        assert_eq!(
            text,
            "# schema_version=1\n# alpha=3\n# beta=2\nk,probability\n0,0.25\n1,NaN\n"
        );
        let parsed = parse_csv(&text).unwrap();
        assert_eq!(parsed.comment("alpha"), Some("3"));
        assert_eq!(parsed.column("probability"), Some(1));
        assert_eq!(parsed.rows.len(), 2);
    }

    proptest! {
        #[test]
        fn random_graphs_roundtrip(seed in any::<u64>(), n in 1usize..300, a in 0.5f64..6.0, b in 0.2f64..3.0) {
            let p = Params::new(a, b).unwrap();
            let dag = generate(p, n, seed, InitialCondition::None, GeneratorKind::Accelerated).unwrap();
            prop_assert_eq!(roundtrip(&dag), dag);
        }

        #[test]
        fn floats_roundtrip_through_cells(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
