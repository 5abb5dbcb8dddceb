use crate::graph::ArgGraph;

/// Mutable graph used while constructing instances.
#[derive(Clone, Debug)]
pub(crate) struct Draft {
    ids: Vec<String>,
    rows: Vec<Vec<i8>>,
    pub weights: Vec<f64>,
}

impl Draft {
    pub fn from_graph(g: &ArgGraph) -> Draft {
        Draft {
            ids: g.ids().to_vec(),
            rows: (0..g.len()).map(|i| g.parent_row(i).to_vec()).collect(),
            weights: g.weights().to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    /// Appends a parentless argument with a fresh id and returns its index.
    pub fn push(&mut self, w: f64) -> usize {
        let mut k = self.len();
        while self.ids.iter().any(|id| *id == format!("a{k}")) {
            k += 1;
        }
        self.ids.push(format!("a{k}"));
        for r in &mut self.rows {
            r.push(0);
        }
        self.weights.push(w);
        let n = self.len();
        self.rows.push(vec![0; n]);
        n - 1
    }

    /// Entry `(target, source)`.
    pub fn set(&mut self, target: usize, source: usize, sign: i8) {
        self.rows[target][source] = sign;
    }

    pub fn get(&self, target: usize, source: usize) -> i8 {
        self.rows[target][source]
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.rows[i]
    }

    pub fn set_row(&mut self, i: usize, row: Vec<i8>) {
        self.rows[i] = row;
    }

    pub fn build(self) -> ArgGraph {
        let incidence = self.rows.concat();
        ArgGraph::new(self.ids, incidence, self.weights).expect("draft is well formed")
    }
}
