//! Line-oriented instance files.
//!
//! ```text
//! # comment
//! # meta {"family":"max_cut","n":30,"p":0.1,"seed":7}
//! ising <N>
//! J <x> <y> <value>
//! h <x> <value>
//! tsp <n> <A> <B>
//! d <i> <j> <value>
//! ```
//!
//! Vertices are 0-indexed. Values are written in shortest round-trip decimal
//! form, so reading a file back reproduces every double exactly.

use std::fmt::Write as _;
use std::path::Path;

use super::{InstanceArtifact, InstanceMetadata, TspInstance};
use crate::error::{Error, Result};
use crate::model::IsingModel;

const META_PREFIX: &str = "# meta ";

pub fn format_instance(artifact: &InstanceArtifact) -> String {
    let model = &artifact.model;
    let mut out = String::new();
    if let Some(meta) = &artifact.metadata {
        let json = serde_json::to_string(meta).expect("metadata serializes");
        writeln!(out, "{META_PREFIX}{json}").unwrap();
    }
    writeln!(out, "ising {}", model.num_vertices()).unwrap();
    for (x, y, j) in model.couplings() {
        writeln!(out, "J {x} {y} {j:?}").unwrap();
    }
    for (x, &h) in model.fields().iter().enumerate() {
        if h != 0.0 {
            writeln!(out, "h {x} {h:?}").unwrap();
        }
    }
    if let Some(tsp) = &artifact.tsp {
        let n = tsp.num_cities();
        writeln!(out, "tsp {n} {:?} {:?}", tsp.penalty_a(), tsp.tour_weight_b()).unwrap();
        for i in 0..n {
            for j in i + 1..n {
                writeln!(out, "d {i} {j} {}", tsp.distance(i, j)).unwrap();
            }
        }
    }
    out
}

pub fn write_instance(path: &Path, artifact: &InstanceArtifact) -> Result<()> {
    std::fs::write(path, format_instance(artifact)).map_err(|e| Error::io(path, e))
}

pub fn read_instance(path: &Path) -> Result<InstanceArtifact> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_instance(&text)
}

fn field<T: std::str::FromStr>(tokens: &[&str], k: usize, line: usize, what: &str) -> Result<T> {
    tokens
        .get(k)
        .ok_or_else(|| Error::Parse {
            line,
            message: format!("missing {what}"),
        })?
        .parse()
        .map_err(|_| Error::Parse {
            line,
            message: format!("cannot parse {what} from {:?}", tokens[k]),
        })
}

pub fn parse_instance(text: &str) -> Result<InstanceArtifact> {
    let mut n: Option<usize> = None;
    let mut couplings = Vec::new();
    let mut fields: Vec<(usize, usize, f64)> = Vec::new();
    let mut metadata: Option<InstanceMetadata> = None;
    let mut tsp_header: Option<(usize, f64, f64, usize)> = None;
    let mut distances: Vec<(usize, usize, u32, usize)> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if let Some(json) = trimmed.strip_prefix(META_PREFIX) {
            metadata = Some(serde_json::from_str(json).map_err(|e| Error::Parse {
                line,
                message: format!("bad metadata: {e}"),
            })?);
            continue;
        }
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let arity = |expected: usize| -> Result<()> {
            if tokens.len() == expected {
                Ok(())
            } else {
                Err(Error::Parse {
                    line,
                    message: format!("{:?} line needs {} fields, got {}", tokens[0], expected - 1, tokens.len() - 1),
                })
            }
        };
        match tokens[0] {
            "ising" => {
                arity(2)?;
                if n.is_some() {
                    return Err(Error::Parse {
                        line,
                        message: "duplicate ising header".into(),
                    });
                }
                n = Some(field(&tokens, 1, line, "vertex count")?);
            }
            "J" => {
                arity(4)?;
                couplings.push((
                    field(&tokens, 1, line, "x")?,
                    field(&tokens, 2, line, "y")?,
                    field(&tokens, 3, line, "coupling")?,
                ));
            }
            "h" => {
                arity(3)?;
                fields.push((field(&tokens, 1, line, "x")?, line, field(&tokens, 2, line, "field")?));
            }
            "tsp" => {
                arity(4)?;
                tsp_header = Some((
                    field(&tokens, 1, line, "city count")?,
                    field(&tokens, 2, line, "A")?,
                    field(&tokens, 3, line, "B")?,
                    line,
                ));
            }
            "d" => {
                arity(4)?;
                distances.push((
                    field(&tokens, 1, line, "i")?,
                    field(&tokens, 2, line, "j")?,
                    field(&tokens, 3, line, "distance")?,
                    line,
                ));
            }
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown record type {other:?}"),
                })
            }
        }
    }

    let n = n.ok_or(Error::Parse {
        line: 0,
        message: "missing `ising <N>` header".into(),
    })?;
    let mut h = vec![0.0; n];
    let mut seen = vec![false; n];
    for (x, line, value) in fields {
        if x >= n {
            return Err(Error::Parse {
                line,
                message: format!("vertex {x} out of range"),
            });
        }
        if std::mem::replace(&mut seen[x], true) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate field for vertex {x}"),
            });
        }
        h[x] = value;
    }
    let model = IsingModel::new(n, couplings, h)?;

    let (tsp, energy_offset) = match tsp_header {
        None => (None, 0.0),
        Some((cities, a, b, line)) => {
            if cities * cities != n {
                return Err(Error::Parse {
                    line,
                    message: format!("TSP on {cities} cities needs N = {}, header says {n}", cities * cities),
                });
            }
            let mut d = vec![0u32; cities * cities];
            for (i, j, v, line) in distances {
                if i >= cities || j >= cities || i == j {
                    return Err(Error::Parse {
                        line,
                        message: format!("bad city pair ({i}, {j})"),
                    });
                }
                d[i * cities + j] = v;
                d[j * cities + i] = v;
            }
            let instance = TspInstance::new(cities, d, a, b)?;
            let (_, offset) = instance.to_ising()?;
            (Some(instance), offset)
        }
    };

    Ok(InstanceArtifact {
        model,
        metadata,
        tsp,
        energy_offset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_gaussian_spin_glass, gen_tsp};
    use proptest::prelude::*;

    #[test]
    fn parses_hand_written_file() {
        let text = "# two spins\nising 2\nJ 0 1 -1.5\nh 1 0.25\n";
        let art = parse_instance(text).unwrap();
        assert_eq!(art.model.coupling(1, 0), -1.5);
        assert_eq!(art.model.fields(), &[0.0, 0.25]);
        assert!(art.metadata.is_none());
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_instance("ising 2\nJ 0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_instance("ising 2\nq 0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(parse_instance("J 0 1 1\n").is_err());
        assert!(parse_instance("ising 2\nh 0 1\nh 0 2\n").is_err());
    }

    #[test]
    fn tsp_round_trip() {
        let art = gen_tsp(5, 3).unwrap();
        let back = parse_instance(&format_instance(&art)).unwrap();
        assert_eq!(back.model, art.model);
        assert_eq!(back.tsp, art.tsp);
        assert_eq!(back.energy_offset, art.energy_offset);
        assert_eq!(back.metadata, art.metadata);
    }

    proptest! {
        #[test]
        fn gaussian_round_trip_is_exact(seed in 0u64..1000, n in 2usize..25) {
            let art = gen_gaussian_spin_glass(n, seed).unwrap();
            let text = format_instance(&art);
            let back = parse_instance(&text).unwrap();
            prop_assert_eq!(&back.model, &art.model);
            prop_assert_eq!(format_instance(&back), text);
        }
    }
}
