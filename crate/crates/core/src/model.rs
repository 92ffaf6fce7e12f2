//! Discrete pairwise Markov random fields.
//!
//! Potentials are stored as energies (lower is better). Nodes and labels are
//! 0-based throughout. Pairwise tables are stored row-major for the ordered
//! pair `(p, q)` with `p < q`, so `table[i * h_q + j]` is the energy of
//! `x_p = i, x_q = j`.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// A labelling of every node of a model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub Vec<usize>);

impl Assignment {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Assignment {
    fn from(v: Vec<usize>) -> Self {
        Assignment(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphModel {
    labels: Vec<usize>,
    unary: Vec<Vec<f64>>,
    edges: Vec<(usize, usize)>,
    pairwise: Vec<Vec<f64>>,
    edge_index: HashMap<(usize, usize), usize>,
    // per node: (edge id, other endpoint)
    incident: Vec<Vec<(usize, usize)>>,
}

impl GraphModel {
    /// A model with the given label counts, zero unaries and no edges.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        if let Some(p) = labels.iter().position(|&h| h == 0) {
            return Err(Error::InvalidModel(format!("node {p} has no labels")));
        }
        let unary = labels.iter().map(|&h| vec![0.0; h]).collect();
        let incident = vec![Vec::new(); labels.len()];
        Ok(GraphModel {
            labels,
            unary,
            edges: Vec::new(),
            pairwise: Vec::new(),
            edge_index: HashMap::new(),
            incident,
        })
    }

    /// `n` nodes with `h` labels each.
    pub fn uniform(n: usize, h: usize) -> Result<Self> {
        Self::new(vec![h; n])
    }

    pub fn set_unary(&mut self, p: usize, values: Vec<f64>) -> Result<()> {
        self.check_node(p)?;
        if values.len() != self.labels[p] {
            return Err(Error::InvalidModel(format!(
                "unary table of node {p} has {} entries, expected {}",
                values.len(),
                self.labels[p]
            )));
        }
        self.unary[p] = values;
        Ok(())
    }

    pub fn add_unary(&mut self, p: usize, label: usize, value: f64) {
        self.unary[p][label] += value;
    }

    /// Adds an edge with a row-major table indexed by `(x_p, x_q)`.
    /// If `p > q` the table is transposed so storage keeps `p < q`.
    pub fn add_edge(&mut self, p: usize, q: usize, table: Vec<f64>) -> Result<usize> {
        self.check_node(p)?;
        self.check_node(q)?;
        if p == q {
            return Err(Error::InvalidModel(format!("self-loop on node {p}")));
        }
        let (hp, hq) = (self.labels[p], self.labels[q]);
        if table.len() != hp * hq {
            return Err(Error::InvalidModel(format!(
                "pairwise table ({p},{q}) has {} entries, expected {}",
                table.len(),
                hp * hq
            )));
        }
        let (a, b, table) = if p < q {
            (p, q, table)
        } else {
            let mut t = vec![0.0; hp * hq];
            for i in 0..hp {
                for j in 0..hq {
                    t[j * hp + i] = table[i * hq + j];
                }
            }
            (q, p, t)
        };
        if self.edge_index.contains_key(&(a, b)) {
            return Err(Error::InvalidModel(format!("duplicate edge ({a},{b})")));
        }
        let e = self.edges.len();
        self.edges.push((a, b));
        self.pairwise.push(table);
        self.edge_index.insert((a, b), e);
        self.incident[a].push((e, b));
        self.incident[b].push((e, a));
        Ok(e)
    }

    fn check_node(&self, p: usize) -> Result<()> {
        if p >= self.labels.len() {
            return Err(Error::InvalidModel(format!(
                "node {p} out of range (model has {} nodes)",
                self.labels.len()
            )));
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_labels(&self, p: usize) -> usize {
        self.labels[p]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_id(&self, p: usize, q: usize) -> Option<usize> {
        let key = if p < q { (p, q) } else { (q, p) };
        self.edge_index.get(&key).copied()
    }

    pub fn unary(&self, p: usize) -> &[f64] {
        &self.unary[p]
    }

    pub fn pairwise_table(&self, e: usize) -> &[f64] {
        &self.pairwise[e]
    }

    /// Energy of edge `e` at labels `(i, j)` of its endpoints `(p, q)`, `p < q`.
    pub fn pairwise(&self, e: usize, i: usize, j: usize) -> f64 {
        let q = self.edges[e].1;
        self.pairwise[e][i * self.labels[q] + j]
    }

    /// Edges incident to `p` as `(edge id, neighbour)`.
    pub fn incident(&self, p: usize) -> &[(usize, usize)] {
        &self.incident[p]
    }

    /// Number of complete assignments, as a float since it overflows quickly.
    pub fn space_size(&self) -> f64 {
        self.labels.iter().map(|&h| h as f64).product()
    }

    pub fn validate(&self, x: &Assignment) -> Result<()> {
        if x.len() != self.num_nodes() {
            return Err(Error::InvalidAssignment(format!(
                "assignment has {} entries, model has {} nodes",
                x.len(),
                self.num_nodes()
            )));
        }
        for (p, (&xp, &h)) in x.0.iter().zip(&self.labels).enumerate() {
            if xp >= h {
                return Err(Error::InvalidAssignment(format!(
                    "label {xp} of node {p} out of range 0..{h}"
                )));
            }
        }
        Ok(())
    }

    pub fn energy(&self, x: &Assignment) -> Result<f64> {
        self.validate(x)?;
        Ok(self.energy_unchecked(&x.0))
    }

    pub fn energy_unchecked(&self, x: &[usize]) -> f64 {
        let mut e: f64 = x.iter().enumerate().map(|(p, &i)| self.unary[p][i]).sum();
        for (k, &(p, q)) in self.edges.iter().enumerate() {
            e += self.pairwise[k][x[p] * self.labels[q] + x[q]];
        }
        e
    }

    /// Energy of giving node `p` label `i` with every other node held at `x`,
    /// counting only the terms that involve `p`.
    pub(crate) fn local_energy(&self, x: &[usize], p: usize, i: usize) -> f64 {
        let mut e = self.unary[p][i];
        for &(k, other) in &self.incident[p] {
            let (a, b) = self.edges[k];
            let hb = self.labels[b];
            e += if a == p {
                self.pairwise[k][i * hb + x[other]]
            } else {
                self.pairwise[k][x[other] * hb + i]
            };
        }
        e
    }

    pub fn full_domain(&self) -> Domain {
        Domain::full(self)
    }

    /// Multiplies every potential by `c`.
    pub fn scaled(&self, c: f64) -> GraphModel {
        let mut m = self.clone();
        for u in &mut m.unary {
            u.iter_mut().for_each(|v| *v *= c);
        }
        for t in &mut m.pairwise {
            t.iter_mut().for_each(|v| *v *= c);
        }
        m
    }

    /// Reduced model over the labels allowed by `d`. Nodes with a single
    /// allowed label are folded into a constant offset and into their
    /// neighbours' unary tables.
    pub fn restrict(&self, d: &Domain) -> Result<Restriction> {
        d.validate(self)?;
        let n = self.num_nodes();
        let mut fixed = vec![None; n];
        let mut reduced_of = vec![None; n];
        let mut free_nodes = Vec::new();
        for p in 0..n {
            let allowed = d.allowed(p);
            if allowed.len() == 1 {
                fixed[p] = Some(allowed[0]);
            } else {
                reduced_of[p] = Some(free_nodes.len());
                free_nodes.push(p);
            }
        }
        let labels: Vec<Vec<usize>> = free_nodes.iter().map(|&p| d.allowed(p).to_vec()).collect();
        let mut reduced = GraphModel::new(labels.iter().map(Vec::len).collect())?;
        let mut offset = 0.0;

        for p in 0..n {
            match (fixed[p], reduced_of[p]) {
                (Some(i), _) => offset += self.unary[p][i],
                (None, Some(rp)) => {
                    let u = labels[rp].iter().map(|&i| self.unary[p][i]).collect();
                    reduced.set_unary(rp, u)?;
                }
                _ => unreachable!(),
            }
        }
        for (k, &(p, q)) in self.edges.iter().enumerate() {
            let hq = self.labels[q];
            let t = &self.pairwise[k];
            match (fixed[p], fixed[q]) {
                (Some(i), Some(j)) => offset += t[i * hq + j],
                (Some(i), None) => {
                    let rq = reduced_of[q].unwrap();
                    for (jj, &j) in labels[rq].iter().enumerate() {
                        reduced.add_unary(rq, jj, t[i * hq + j]);
                    }
                }
                (None, Some(j)) => {
                    let rp = reduced_of[p].unwrap();
                    for (ii, &i) in labels[rp].iter().enumerate() {
                        reduced.add_unary(rp, ii, t[i * hq + j]);
                    }
                }
                (None, None) => {
                    let (rp, rq) = (reduced_of[p].unwrap(), reduced_of[q].unwrap());
                    let mut sub = Vec::with_capacity(labels[rp].len() * labels[rq].len());
                    for &i in &labels[rp] {
                        for &j in &labels[rq] {
                            sub.push(t[i * hq + j]);
                        }
                    }
                    reduced.add_edge(rp, rq, sub)?;
                }
            }
        }
        Ok(Restriction {
            model: reduced,
            offset,
            map: IndexMap {
                free_nodes,
                labels,
                fixed,
                reduced_of,
            },
        })
    }
}

/// Per-node allowed label sets defining a subproblem.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Domain {
    allowed: Vec<Vec<usize>>,
}

impl Domain {
    pub fn full(model: &GraphModel) -> Domain {
        Domain {
            allowed: model.labels().iter().map(|&h| (0..h).collect()).collect(),
        }
    }

    /// Builds a domain, sorting and deduplicating each label set.
    pub fn new(mut allowed: Vec<Vec<usize>>) -> Result<Domain> {
        for (p, s) in allowed.iter_mut().enumerate() {
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                return Err(Error::InvalidDomain(format!("node {p} has no allowed label")));
            }
        }
        Ok(Domain { allowed })
    }

    /// The single-point domain of an assignment.
    pub fn singleton(x: &Assignment) -> Domain {
        Domain {
            allowed: x.0.iter().map(|&i| vec![i]).collect(),
        }
    }

    pub fn allowed(&self, p: usize) -> &[usize] {
        &self.allowed[p]
    }

    pub fn num_nodes(&self) -> usize {
        self.allowed.len()
    }

    pub fn contains(&self, x: &[usize]) -> bool {
        x.len() == self.allowed.len() && x.iter().zip(&self.allowed).all(|(i, s)| s.binary_search(i).is_ok())
    }

    pub fn is_allowed(&self, p: usize, i: usize) -> bool {
        self.allowed[p].binary_search(&i).is_ok()
    }

    pub fn size(&self) -> f64 {
        self.allowed.iter().map(|s| s.len() as f64).product()
    }

    pub fn is_subset_of(&self, other: &Domain) -> bool {
        self.allowed.len() == other.allowed.len()
            && self
                .allowed
                .iter()
                .zip(&other.allowed)
                .all(|(a, b)| a.iter().all(|i| b.binary_search(i).is_ok()))
    }

    /// Replaces the label set of node `p`.
    pub fn with_node(&self, p: usize, labels: Vec<usize>) -> Result<Domain> {
        let mut allowed = self.allowed.clone();
        allowed[p] = labels;
        Domain::new(allowed)
    }

    pub fn validate(&self, model: &GraphModel) -> Result<()> {
        if self.allowed.len() != model.num_nodes() {
            return Err(Error::InvalidDomain(format!(
                "domain covers {} nodes, model has {}",
                self.allowed.len(),
                model.num_nodes()
            )));
        }
        for (p, s) in self.allowed.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidDomain(format!("node {p} has no allowed label")));
            }
            if let Some(&i) = s.iter().find(|&&i| i >= model.num_labels(p)) {
                return Err(Error::InvalidDomain(format!("label {i} of node {p} out of range")));
            }
        }
        Ok(())
    }

    /// Calls `f` on every assignment in the domain, in lexicographic order.
    pub fn for_each_assignment(&self, mut f: impl FnMut(&[usize])) {
        let n = self.allowed.len();
        let mut pos = vec![0usize; n];
        let mut x: Vec<usize> = self.allowed.iter().map(|s| s[0]).collect();
        loop {
            f(&x);
            let mut p = n;
            loop {
                if p == 0 {
                    return;
                }
                p -= 1;
                pos[p] += 1;
                if pos[p] < self.allowed[p].len() {
                    x[p] = self.allowed[p][pos[p]];
                    break;
                }
                pos[p] = 0;
                x[p] = self.allowed[p][0];
            }
        }
    }
}

/// Maps a reduced model back to the model it was restricted from.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexMap {
    /// reduced node -> original node
    pub free_nodes: Vec<usize>,
    /// reduced node -> (reduced label -> original label)
    pub labels: Vec<Vec<usize>>,
    /// original node -> fixed label, for folded nodes
    pub fixed: Vec<Option<usize>>,
    /// original node -> reduced node
    pub reduced_of: Vec<Option<usize>>,
}

impl IndexMap {
    pub fn lift(&self, reduced: &[usize]) -> Assignment {
        let mut x: Vec<usize> = self.fixed.iter().map(|f| f.unwrap_or(0)).collect();
        for (rp, &p) in self.free_nodes.iter().enumerate() {
            x[p] = self.labels[rp][reduced[rp]];
        }
        Assignment(x)
    }

    /// Inverse of `lift` for assignments inside the domain.
    pub fn project(&self, x: &[usize]) -> Option<Vec<usize>> {
        self.free_nodes
            .iter()
            .enumerate()
            .map(|(rp, &p)| self.labels[rp].iter().position(|&i| i == x[p]))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Restriction {
    pub model: GraphModel,
    pub offset: f64,
    pub map: IndexMap,
}

/// Parameters of a random dense-Gaussian model.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub n: usize,
    pub h: usize,
    /// Target mean number of neighbours per node.
    pub kappa: f64,
    /// Standard deviation of the unary potentials.
    pub omega: f64,
    pub seed: u64,
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.h == 0 {
            return Err(Error::Config("n and h must be positive".into()));
        }
        let max = (self.n - 1) as f64;
        if !(self.kappa >= 0.0 && self.kappa <= max) {
            return Err(Error::Config(format!("kappa {} outside [0, {}]", self.kappa, max)));
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(Error::Config(format!("omega {} must be finite and non-negative", self.omega)));
        }
        Ok(())
    }

    pub fn edge_count(&self) -> usize {
        let all = self.n * (self.n - 1) / 2;
        ((self.n as f64 * self.kappa / 2.0).round() as usize).min(all)
    }
}

/// Random model with `round(n * kappa / 2)` uniformly sampled edges,
/// pairwise entries ~ N(0, 1) and unary entries ~ N(0, omega^2).
pub fn gen_synthetic(cfg: &SyntheticConfig) -> Result<GraphModel> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut model = GraphModel::uniform(cfg.n, cfg.h)?;

    for p in 0..cfg.n {
        let u: Vec<f64> = (0..cfg.h)
            .map(|_| {
                let z: f64 = std_normal.sample(&mut rng);
                if cfg.omega == 0.0 {
                    0.0
                } else {
                    cfg.omega * z
                }
            })
            .collect();
        model.set_unary(p, u)?;
    }

    let pairs: Vec<(usize, usize)> = (0..cfg.n).flat_map(|p| (p + 1..cfg.n).map(move |q| (p, q))).collect();
    let mut picked: Vec<usize> = sample(&mut rng, pairs.len(), cfg.edge_count()).into_vec();
    picked.sort_unstable();
    for k in picked {
        let (p, q) = pairs[k];
        let t: Vec<f64> = (0..cfg.h * cfg.h).map(|_| std_normal.sample(&mut rng)).collect();
        model.add_edge(p, q, t)?;
    }
    Ok(model)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Frustrated triangle: anti-Potts pairwise terms, weak unaries.
    pub fn t3() -> GraphModel {
        let mut m = GraphModel::uniform(3, 2).unwrap();
        m.set_unary(0, vec![0.0, 0.5]).unwrap();
        m.set_unary(1, vec![0.2, 0.0]).unwrap();
        m.set_unary(2, vec![0.0, 0.0]).unwrap();
        let potts = vec![1.0, 0.0, 0.0, 1.0];
        m.add_edge(0, 1, potts.clone()).unwrap();
        m.add_edge(0, 2, potts.clone()).unwrap();
        m.add_edge(1, 2, potts).unwrap();
        m
    }

    fn brute_min(m: &GraphModel, d: &Domain) -> (f64, Vec<Vec<usize>>) {
        let mut best = f64::INFINITY;
        let mut arg = Vec::new();
        d.for_each_assignment(|x| {
            let e = m.energy_unchecked(x);
            if e < best - 1e-12 {
                best = e;
                arg = vec![x.to_vec()];
            } else if (e - best).abs() <= 1e-12 {
                arg.push(x.to_vec());
            }
        });
        (best, arg)
    }

    #[test]
    fn energy_zero_model() {
        let m = GraphModel::uniform(4, 3).unwrap();
        assert_eq!(m.energy(&Assignment(vec![2, 0, 1, 1])).unwrap(), 0.0);
    }

    #[test]
    fn energy_single_node_lookup() {
        let mut m = GraphModel::uniform(1, 2).unwrap();
        m.set_unary(0, vec![3.0, -1.0]).unwrap();
        assert_eq!(m.energy(&Assignment(vec![1])).unwrap(), -1.0);
    }

    #[test]
    fn energy_t3_matches_enumeration() {
        let m = t3();
        // hand table: x=(1,2,1) in 1-based labels is (0,1,0)
        // unary 0 + 0 + 0, pairs: (0,1) differ 0, (0,0) equal 1, (1,0) differ 0
        assert_eq!(m.energy(&Assignment(vec![0, 1, 0])).unwrap(), 1.0);
        let (best, arg) = brute_min(&m, &m.full_domain());
        assert_eq!(best, 1.0);
        assert_eq!(arg, vec![vec![0, 1, 0], vec![0, 1, 1]]);
    }

    #[test]
    fn energy_rejects_out_of_range_label() {
        let m = t3();
        assert!(matches!(
            m.energy(&Assignment(vec![0, 2, 0])),
            Err(Error::InvalidAssignment(_))
        ));
        assert!(m.energy(&Assignment(vec![0, 1])).is_err());
    }

    #[test]
    fn model_rejects_bad_edges() {
        let mut m = GraphModel::uniform(3, 2).unwrap();
        assert!(m.add_edge(1, 1, vec![0.0; 4]).is_err());
        assert!(m.add_edge(0, 3, vec![0.0; 4]).is_err());
        m.add_edge(0, 1, vec![0.0; 4]).unwrap();
        assert!(m.add_edge(1, 0, vec![0.0; 4]).is_err());
    }

    #[test]
    fn reversed_edge_is_transposed() {
        let mut m = GraphModel::new(vec![2, 3]).unwrap();
        // table indexed (x_1, x_0)
        m.add_edge(1, 0, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        for i in 0..2 {
            for j in 0..3 {
                let e = m.energy(&Assignment(vec![i, j])).unwrap();
                assert_eq!(e, [1.0, 2.0, 3.0, 4.0, 5.0, 6.0][j * 2 + i]);
            }
        }
    }

    #[test]
    fn restrict_full_domain_is_identity() {
        let m = t3();
        let r = m.restrict(&m.full_domain()).unwrap();
        assert_eq!(r.offset, 0.0);
        assert_eq!(r.model, m);
    }

    #[test]
    fn restrict_fixing_one_node_agrees_on_completions() {
        let m = t3();
        let d = m.full_domain().with_node(2, vec![0]).unwrap();
        let r = m.restrict(&d).unwrap();
        assert_eq!(r.model.num_nodes(), 2);
        let mut count = 0;
        r.model.full_domain().for_each_assignment(|xr| {
            let x = r.map.lift(xr);
            let lhs = r.model.energy_unchecked(xr) + r.offset;
            assert!((lhs - m.energy(&x).unwrap()).abs() < 1e-12);
            count += 1;
        });
        assert_eq!(count, 4);
    }

    #[test]
    fn restrict_all_singleton_collapses() {
        let m = t3();
        let x = Assignment(vec![1, 0, 1]);
        let r = m.restrict(&Domain::singleton(&x)).unwrap();
        assert_eq!(r.model.num_nodes(), 0);
        assert_eq!(r.offset, m.energy(&x).unwrap());
        assert_eq!(r.map.lift(&[]), x);
    }

    #[test]
    fn restrict_excluded_labels_keeps_node() {
        let m = gen_synthetic(&SyntheticConfig { n: 4, h: 3, kappa: 3.0, omega: 0.3, seed: 9 }).unwrap();
        let d = Domain::new(vec![vec![0, 2], vec![1], vec![0, 1, 2], vec![2, 1]]).unwrap();
        let r = m.restrict(&d).unwrap();
        assert_eq!(r.model.labels(), &[2, 3, 2]);
        d.for_each_assignment(|x| {
            let xr = r.map.project(x).unwrap();
            assert_eq!(r.map.lift(&xr).0, x);
            let lhs = r.model.energy_unchecked(&xr) + r.offset;
            assert!((lhs - m.energy_unchecked(x)).abs() < 1e-12);
        });
    }

    #[test]
    fn domain_enumeration_counts() {
        let d = Domain::new(vec![vec![0, 1], vec![2], vec![0, 1, 2]]).unwrap();
        let mut seen = Vec::new();
        d.for_each_assignment(|x| seen.push(x.to_vec()));
        assert_eq!(seen.len() as f64, d.size());
        assert!(seen.iter().all(|x| d.contains(x)));
        assert!(Domain::new(vec![vec![]]).is_err());
    }

    #[test]
    fn synthetic_complete_graph_edge_count() {
        let m = gen_synthetic(&SyntheticConfig { n: 64, h: 2, kappa: 63.0, omega: 0.2, seed: 1 }).unwrap();
        assert_eq!(m.num_edges(), 2016);
        let cfg = SyntheticConfig { n: 64, h: 10, kappa: 6.56, omega: 0.2, seed: 1 };
        assert_eq!(cfg.edge_count(), 210);
    }

    #[test]
    fn synthetic_zero_omega_has_zero_unaries() {
        let m = gen_synthetic(&SyntheticConfig { n: 10, h: 4, kappa: 3.0, omega: 0.0, seed: 3 }).unwrap();
        for p in 0..10 {
            assert!(m.unary(p).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn synthetic_is_deterministic() {
        let cfg = SyntheticConfig { n: 12, h: 3, kappa: 4.0, omega: 0.5, seed: 42 };
        let a = gen_synthetic(&cfg).unwrap();
        let b = gen_synthetic(&cfg).unwrap();
        assert_eq!(a, b);
        let c = gen_synthetic(&SyntheticConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn synthetic_rejects_bad_kappa() {
        let cfg = SyntheticConfig { n: 5, h: 2, kappa: 4.5, omega: 0.1, seed: 0 };
        assert!(matches!(gen_synthetic(&cfg), Err(Error::Config(_))));
        let cfg = SyntheticConfig { kappa: -1.0, ..cfg };
        assert!(gen_synthetic(&cfg).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn scaling_preserves_argmin(seed in 0u64..1000, c in 0.1f64..10.0) {
                let m = gen_synthetic(&SyntheticConfig { n: 5, h: 3, kappa: 3.0, omega: 0.4, seed }).unwrap();
                let s = m.scaled(c);
                let (e1, a1) = brute_min(&m, &m.full_domain());
                let (e2, a2) = brute_min(&s, &s.full_domain());
                prop_assert!((e2 - c * e1).abs() < 1e-9 * (1.0 + e1.abs() * c));
                prop_assert_eq!(a1, a2);
            }

            #[test]
            fn restrict_then_lift_preserves_energy(seed in 0u64..1000, mask in proptest::collection::vec(0u8..8, 5)) {
                let m = gen_synthetic(&SyntheticConfig { n: 5, h: 3, kappa: 2.5, omega: 0.4, seed }).unwrap();
                let allowed: Vec<Vec<usize>> = mask
                    .iter()
                    .map(|&b| {
                        let s: Vec<usize> = (0..3).filter(|i| b & (1 << i) != 0).collect();
                        if s.is_empty() { vec![(b as usize) % 3] } else { s }
                    })
                    .collect();
                let d = Domain::new(allowed).unwrap();
                let r = m.restrict(&d).unwrap();
                let mut ok = true;
                r.model.full_domain().for_each_assignment(|xr| {
                    let x = r.map.lift(xr);
                    ok &= d.contains(&x.0);
                    ok &= (r.model.energy_unchecked(xr) + r.offset - m.energy_unchecked(&x.0)).abs() <= 1e-12;
                });
                prop_assert!(ok);
            }
        }
    }
}
