use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::stats::{cdf_points, mean, percentile};
use crate::error::{CflError, Result};
use crate::instances::GeneratorConfig;
use crate::model::{Instance, Setting};

/// One `(instance, algorithm)` result. Column order of result files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub seed: u64,
    pub instance_index: usize,
    pub d: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "L")]
    pub lower: f64,
    #[serde(rename = "U")]
    pub upper: f64,
    pub beta_nominal: f64,
    pub beta_realized: f64,
    pub sigma: f64,
    pub xi: Option<f64>,
    pub algorithm: String,
    pub epsilon: Option<f64>,
    pub alg_cost: f64,
    pub opt_cost: f64,
    pub empirical_cr: f64,
}

fn cmp_opt(a: Option<f64>, b: Option<f64>) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(x), Some(y)) => x.total_cmp(&y),
    }
}

impl ExperimentRecord {
    /// Cell, then instance, then algorithm.
    pub fn sort_cmp(&self, o: &Self) -> Ordering {
        self.upper
            .total_cmp(&o.upper)
            .then(self.d.cmp(&o.d))
            .then(self.beta_nominal.total_cmp(&o.beta_nominal))
            .then(self.sigma.total_cmp(&o.sigma))
            .then(cmp_opt(self.xi, o.xi))
            .then(self.seed.cmp(&o.seed))
            .then(self.instance_index.cmp(&o.instance_index))
            .then(self.algorithm.cmp(&o.algorithm))
            .then(cmp_opt(self.epsilon, o.epsilon))
    }

    /// `algorithm` plus `:eps=` when present.
    pub fn label(&self) -> String {
        match self.epsilon {
            Some(e) => format!("{}:eps={e}", self.algorithm),
            None => self.algorithm.clone(),
        }
    }
}

pub fn sort_records(records: &mut [ExperimentRecord]) {
    records.sort_by(ExperimentRecord::sort_cmp);
}

pub fn write_records<W: Write>(w: W, records: &[ExperimentRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(r: R) -> Result<Vec<ExperimentRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for (k, rec) in rdr.deserialize().enumerate() {
        out.push(rec.map_err(|e: csv::Error| CflError::Parse {
            line: e.position().map_or(k + 2, |p| p.line() as usize),
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

/// Mean and 95th percentile of the empirical ratio for one cell and algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub d: usize,
    #[serde(rename = "U")]
    pub upper: f64,
    pub beta_nominal: f64,
    pub sigma: f64,
    pub xi: Option<f64>,
    pub algorithm: String,
    pub epsilon: Option<f64>,
    pub count: usize,
    pub mean_cr: f64,
    pub p95_cr: f64,
}

/// Groups by cell and algorithm, in record sort order.
pub fn aggregate(records: &[ExperimentRecord]) -> Result<Vec<AggregateRow>> {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut groups: Vec<(AggregateRow, Vec<f64>)> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for r in &sorted {
        let key = format!(
            "{:?}|{}|{:?}|{:?}|{:?}|{}",
            r.upper.to_bits(),
            r.d,
            r.beta_nominal.to_bits(),
            r.sigma.to_bits(),
            r.xi.map(f64::to_bits),
            r.label()
        );
        let slot = *index.entry(key).or_insert_with(|| {
            groups.push((
                AggregateRow {
                    d: r.d,
                    upper: r.upper,
                    beta_nominal: r.beta_nominal,
                    sigma: r.sigma,
                    xi: r.xi,
                    algorithm: r.algorithm.clone(),
                    epsilon: r.epsilon,
                    count: 0,
                    mean_cr: 0.0,
                    p95_cr: 0.0,
                },
                Vec::new(),
            ));
            groups.len() - 1
        });
        groups[slot].1.push(r.empirical_cr);
    }
    groups
        .into_iter()
        .map(|(mut row, crs)| {
            row.count = crs.len();
            row.mean_cr = mean(&crs)?;
            row.p95_cr = percentile(&crs, 95.0)?;
            Ok(row)
        })
        .collect()
}

pub fn write_aggregates<W: Write>(w: W, rows: &[AggregateRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfRow {
    pub algorithm: String,
    pub epsilon: Option<f64>,
    pub xi: Option<f64>,
    pub empirical_cr: f64,
    pub fraction: f64,
}

type CdfGroup = (String, Option<f64>, Option<f64>, Vec<f64>);

/// CDF of the empirical ratio per algorithm label and advice level, pooled over cells.
pub fn cdf_rows(records: &[ExperimentRecord]) -> Vec<CdfRow> {
    let mut groups: BTreeMap<(String, String), CdfGroup> = BTreeMap::new();
    for r in records {
        let key = (r.label(), format!("{:?}", r.xi));
        groups
            .entry(key)
            .or_insert_with(|| (r.algorithm.clone(), r.epsilon, r.xi, Vec::new()))
            .3
            .push(r.empirical_cr);
    }
    groups
        .into_values()
        .flat_map(|(algorithm, epsilon, xi, crs)| {
            cdf_points(&crs).into_iter().map(move |(v, f)| CdfRow {
                algorithm: algorithm.clone(),
                epsilon,
                xi,
                empirical_cr: v,
                fraction: f,
            })
        })
        .collect()
}

pub fn write_cdf<W: Write>(w: W, rows: &[CdfRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

/// On-disk instance document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub d: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "L")]
    pub lower: f64,
    #[serde(rename = "U")]
    pub upper: f64,
    pub c: Vec<f64>,
    pub w: Vec<f64>,
    pub costs: Vec<Vec<f64>>,
    pub seed: Option<u64>,
    pub generator_config: Option<GeneratorConfig>,
    #[serde(default)]
    pub index: Option<usize>,
}

impl InstanceFile {
    pub fn from_instance(
        instance: &Instance,
        seed: Option<u64>,
        generator_config: Option<GeneratorConfig>,
        index: Option<usize>,
    ) -> Self {
        let s = &instance.setting;
        InstanceFile {
            d: s.d(),
            horizon: s.horizon,
            lower: s.lower,
            upper: s.upper,
            c: s.c_weights.clone(),
            w: s.w_weights.clone(),
            costs: instance.costs.clone(),
            seed,
            generator_config,
            index,
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        crate::error::check_dim(self.d, self.c.len())?;
        let setting = Setting::new(self.horizon, self.lower, self.upper, self.c.clone(), self.w.clone())?;
        Instance::new(setting, self.costs.clone())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), self)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        serde_json::from_str(&text).map_err(|e| CflError::Parse {
            line: e.line(),
            message: format!("{}: {e}", path.as_ref().display()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::generate_one;

    fn record(alg: &str, idx: usize, cr: f64) -> ExperimentRecord {
        ExperimentRecord {
            seed: 1,
            instance_index: idx,
            d: 5,
            horizon: 10,
            lower: 1.0,
            upper: 250.0,
            beta_nominal: 50.0,
            beta_realized: 48.0,
            sigma: 50.0,
            xi: None,
            algorithm: alg.into(),
            epsilon: None,
            alg_cost: cr * 10.0,
            opt_cost: 10.0,
            empirical_cr: cr,
        }
    }

    #[test]
    fn csv_round_trip_keeps_column_order() {
        let mut recs = vec![record("alg1", 1, 1.5), record("agnostic", 0, 3.0)];
        recs[1].xi = Some(0.25);
        recs[1].epsilon = Some(2.0);
        let mut buf = Vec::new();
        write_records(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "seed,instance_index,d,T,L,U,beta_nominal,beta_realized,sigma,xi,algorithm,epsilon,alg_cost,opt_cost,empirical_cr\n"
        ));
        assert_eq!(read_records(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn bad_csv_reports_line() {
        let text = "seed,instance_index,d,T,L,U,beta_nominal,beta_realized,sigma,xi,algorithm,epsilon,alg_cost,opt_cost,empirical_cr\n\
                    1,0,5,10,1,250,50,48,50,,alg1,,15,10,1.5\n\
                    1,zero,5,10,1,250,50,48,50,,alg1,,15,10,1.5\n";
        assert!(matches!(read_records(text.as_bytes()), Err(CflError::Parse { line: 3, .. })));
    }

    #[test]
    fn aggregates_by_cell_and_algorithm() {
        let recs = vec![
            record("alg1", 0, 1.0),
            record("alg1", 1, 3.0),
            record("agnostic", 0, 5.0),
        ];
        let agg = aggregate(&recs).unwrap();
        assert_eq!(agg.len(), 2);
        assert_eq!((agg[0].algorithm.as_str(), agg[0].count), ("agnostic", 1));
        assert_eq!((agg[1].mean_cr, agg[1].p95_cr), (2.0, 3.0));
    }

    #[test]
    fn instance_file_round_trip() {
        let cfg = GeneratorConfig::standard(3);
        let inst = generate_one(&cfg, 4).unwrap();
        let file = InstanceFile::from_instance(&inst, Some(3), Some(cfg.clone()), Some(4));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("i.json");
        file.save(&path).unwrap();
        let back = InstanceFile::load(&path).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_instance().unwrap(), inst);
        let text = std::fs::read_to_string(&path).unwrap();
        for key in ["\"d\"", "\"T\"", "\"L\"", "\"U\"", "\"c\"", "\"w\"", "\"costs\"", "\"seed\"", "\"generator_config\""] {
            assert!(text.contains(key), "{key}");
        }
    }
}
