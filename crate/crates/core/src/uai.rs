//! Reader and writer for the UAI `MARKOV` text format.
//!
//! Layout: `MARKOV`, the variable count, the cardinalities, the factor
//! count, one scope line per factor (arity then 0-based variables), then one
//! table per factor (entry count then row-major values). Tables hold
//! potentials, converted to energies by `-ln`, unless raw energies are
//! requested.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::GraphModel;

/// Floor applied to potentials before taking the logarithm.
pub const POTENTIAL_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableMode {
    /// Entries are potentials; energy is `-ln(max(v, 1e-300))`.
    #[default]
    Potentials,
    /// Entries are energies.
    RawEnergy,
}

struct Tokens<'a> {
    toks: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let toks: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)))
            .collect();
        let last_line = text.lines().count().max(1);
        Tokens { toks, pos: 0, last_line }
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).map_or(self.last_line, |t| t.0)
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let t = self.toks.get(self.pos).copied().ok_or_else(|| Error::Parse {
            line: self.last_line,
            msg: format!("unexpected end of input, expected {what}"),
        })?;
        self.pos += 1;
        Ok(t)
    }

    fn usize(&mut self, what: &str) -> Result<(usize, usize)> {
        let (line, t) = self.next(what)?;
        t.parse().map(|v| (line, v)).map_err(|_| Error::Parse {
            line,
            msg: format!("expected {what}, found {t:?}"),
        })
    }

    fn f64(&mut self, what: &str) -> Result<(usize, f64)> {
        let (line, t) = self.next(what)?;
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok((line, v)),
            _ => Err(Error::Parse {
                line,
                msg: format!("expected finite {what}, found {t:?}"),
            }),
        }
    }
}

pub fn read_uai(text: &str, mode: TableMode) -> Result<GraphModel> {
    let mut tk = Tokens::new(text);
    let (line, head) = tk.next("MARKOV header")?;
    if head != "MARKOV" {
        return Err(Error::Parse {
            line,
            msg: format!("expected MARKOV header, found {head:?}"),
        });
    }
    let (_, n) = tk.usize("variable count")?;
    let mut labels = Vec::with_capacity(n);
    for p in 0..n {
        let (line, h) = tk.usize(&format!("cardinality of variable {p}"))?;
        if h == 0 {
            return Err(Error::Parse {
                line,
                msg: format!("variable {p} has cardinality 0"),
            });
        }
        labels.push(h);
    }
    let (_, nf) = tk.usize("factor count")?;
    let mut scopes = Vec::with_capacity(nf);
    for f in 0..nf {
        let (line, arity) = tk.usize(&format!("arity of factor {f}"))?;
        if arity >= 3 {
            return Err(Error::UnsupportedOrder { line, arity });
        }
        if arity == 0 {
            return Err(Error::Parse {
                line,
                msg: format!("factor {f} has an empty scope"),
            });
        }
        let mut scope = Vec::with_capacity(arity);
        for _ in 0..arity {
            let (line, v) = tk.usize("scope variable")?;
            if v >= n {
                return Err(Error::Parse {
                    line,
                    msg: format!("variable {v} out of range (n = {n})"),
                });
            }
            scope.push(v);
        }
        if arity == 2 && scope[0] == scope[1] {
            return Err(Error::Parse {
                line,
                msg: format!("factor {f} repeats variable {}", scope[0]),
            });
        }
        scopes.push((line, scope));
    }

    let mut model = GraphModel::new(labels.clone())?;
    let energy = |v: f64| match mode {
        TableMode::Potentials => -v.max(POTENTIAL_FLOOR).ln(),
        TableMode::RawEnergy => v,
    };
    for (f, (scope_line, scope)) in scopes.iter().enumerate() {
        let expect: usize = scope.iter().map(|&v| labels[v]).product();
        let (line, count) = tk.usize(&format!("entry count of factor {f}"))?;
        if count != expect {
            return Err(Error::Parse {
                line,
                msg: format!("factor {f} has {count} entries, expected {expect}"),
            });
        }
        let mut table = Vec::with_capacity(count);
        for _ in 0..count {
            let (line, v) = tk.f64("table entry")?;
            if mode == TableMode::Potentials && v < 0.0 {
                return Err(Error::Parse {
                    line,
                    msg: format!("negative potential {v}"),
                });
            }
            table.push(energy(v));
        }
        match scope[..] {
            [p] => {
                for (i, v) in table.into_iter().enumerate() {
                    model.add_unary(p, i, v);
                }
            }
            [p, q] => {
                model.add_edge(p, q, table).map_err(|e| Error::Parse {
                    line: *scope_line,
                    msg: e.to_string(),
                })?;
            }
            _ => unreachable!("arity checked above"),
        }
    }
    if tk.pos < tk.toks.len() {
        return Err(Error::Parse {
            line: tk.line(),
            msg: "trailing data after the last table".into(),
        });
    }
    Ok(model)
}

/// One unary factor per node followed by one factor per edge.
pub fn write_uai(model: &GraphModel, mode: TableMode) -> String {
    let value = |e: f64| match mode {
        TableMode::Potentials => (-e).exp(),
        TableMode::RawEnergy => e,
    };
    let row = |vals: &[f64]| {
        let mut s = String::new();
        for v in vals {
            write!(s, " {}", value(*v)).expect("write to string");
        }
        s
    };
    let mut out = String::from("MARKOV\n");
    let n = model.num_nodes();
    writeln!(out, "{n}").unwrap();
    let cards: Vec<String> = model.labels().iter().map(usize::to_string).collect();
    writeln!(out, "{}", cards.join(" ")).unwrap();
    writeln!(out, "{}", n + model.num_edges()).unwrap();
    for p in 0..n {
        writeln!(out, "1 {p}").unwrap();
    }
    for &(p, q) in model.edges() {
        writeln!(out, "2 {p} {q}").unwrap();
    }
    for p in 0..n {
        writeln!(out, "\n{}\n{}", model.num_labels(p), row(model.unary(p))).unwrap();
    }
    for (e, &(_, q)) in model.edges().iter().enumerate() {
        let hq = model.num_labels(q);
        let t = model.pairwise_table(e);
        write!(out, "\n{}\n", t.len()).unwrap();
        for chunk in t.chunks(hq) {
            writeln!(out, "{}", row(chunk)).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Assignment;

    const FIXTURE: &str = "MARKOV\n1\n2\n1\n1 0\n\n2\n 3 -1\n";

    fn squash(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn fixture_raw() {
        let m = read_uai(FIXTURE, TableMode::RawEnergy).unwrap();
        assert_eq!(m.unary(0), &[3.0, -1.0]);
        assert_eq!(squash(&write_uai(&m, TableMode::RawEnergy)), squash(FIXTURE));
    }

    #[test]
    fn potentials_are_negated_logs() {
        let text = "MARKOV\n2\n2 2\n2\n1 0\n2 1 0\n2\n1 0.5\n4\n1 2 0 4\n";
        let m = read_uai(text, TableMode::Potentials).unwrap();
        assert_eq!(m.unary(0), &[0.0, 2f64.ln()]);
        // scope (1, 0) is stored transposed as edge (0, 1)
        assert_eq!(m.edges(), &[(0, 1)]);
        assert_eq!(m.pairwise(0, 0, 0), 0.0);
        assert_eq!(m.pairwise(0, 1, 0), -2f64.ln());
        assert_eq!(m.pairwise(0, 0, 1), -POTENTIAL_FLOOR.ln());
        assert_eq!(m.pairwise(0, 1, 1), -4f64.ln());
    }

    #[test]
    fn round_trip_preserves_energies() {
        let m = crate::model::tests::t3();
        for mode in [TableMode::RawEnergy, TableMode::Potentials] {
            let back = read_uai(&write_uai(&m, mode), mode).unwrap();
            m.full_domain().for_each_assignment(|x| {
                let x = Assignment(x.to_vec());
                assert!((m.energy(&x).unwrap() - back.energy(&x).unwrap()).abs() < 1e-12);
            });
        }
    }

    #[test]
    fn errors_carry_lines() {
        let bad_head = "MARKUP\n1\n2\n0\n";
        assert_eq!(read_uai(bad_head, TableMode::RawEnergy).unwrap_err(), Error::Parse {
            line: 1,
            msg: "expected MARKOV header, found \"MARKUP\"".into()
        });
        let triple = "MARKOV\n3\n2 2 2\n1\n3 0 1 2\n8\n0 0 0 0 0 0 0 0\n";
        assert_eq!(
            read_uai(triple, TableMode::RawEnergy).unwrap_err(),
            Error::UnsupportedOrder { line: 5, arity: 3 }
        );
        let dup = "MARKOV\n2\n2 2\n2\n2 0 1\n2 1 0\n4\n0 0 0 0\n4\n0 0 0 0\n";
        assert!(matches!(
            read_uai(dup, TableMode::RawEnergy),
            Err(Error::Parse { line: 6, .. })
        ));
        let short = "MARKOV\n1\n2\n1\n1 0\n2\n1\n";
        assert!(matches!(read_uai(short, TableMode::RawEnergy), Err(Error::Parse { .. })));
        let count = "MARKOV\n1\n2\n1\n1 0\n3\n1 2 3\n";
        assert!(matches!(
            read_uai(count, TableMode::RawEnergy),
            Err(Error::Parse { line: 6, .. })
        ));
    }
}
