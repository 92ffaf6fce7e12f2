/// Row layout of the homogenised moment matrix: row 0 is the unit entry,
/// then one row per (node, label) slot, nodes in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaIndex {
    first_row: Vec<usize>,
    labels: Vec<usize>,
    slots: Vec<(usize, usize)>,
}

impl OmegaIndex {
    pub fn new(labels: &[usize]) -> Self {
        let mut first_row = Vec::with_capacity(labels.len());
        let mut slots = Vec::with_capacity(labels.iter().sum());
        let mut next = 1;
        for (p, &h) in labels.iter().enumerate() {
            first_row.push(next);
            slots.extend((0..h).map(|i| (p, i)));
            next += h;
        }
        OmegaIndex {
            first_row,
            labels: labels.to_vec(),
            slots,
        }
    }

    pub fn dim(&self) -> usize {
        self.slots.len() + 1
    }

    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn row(&self, p: usize, i: usize) -> usize {
        debug_assert!(i < self.labels[p]);
        self.first_row[p] + i
    }

    /// Inverse of `row` for rows >= 1.
    pub fn slot(&self, row: usize) -> Option<(usize, usize)> {
        row.checked_sub(1).and_then(|k| self.slots.get(k).copied())
    }

    /// Trace of the moment matrix of any integral assignment.
    pub fn eta(&self) -> f64 {
        (self.labels.len() + 1) as f64
    }
}
