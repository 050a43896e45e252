//! Algorithm X with dancing links, first solution only.
//!
//! Columns are all primary. The column with the fewest rows is chosen, ties
//! broken by lowest index, and rows are tried in insertion order, so the
//! solution found is a function of the input order alone.

pub struct Dlx {
    left: Vec<usize>,
    right: Vec<usize>,
    up: Vec<usize>,
    down: Vec<usize>,
    col: Vec<usize>,
    row: Vec<usize>,
    size: Vec<usize>,
    columns: usize,
    rows: usize,
}

/// Outcome of a bounded search.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Solved(Vec<usize>),
    NoSolution,
    OutOfBudget,
}

const ROOT: usize = 0;

impl Dlx {
    pub fn new(columns: usize) -> Self {
        let n = columns + 1;
        let mut d = Dlx {
            left: (0..n).map(|i| (i + n - 1) % n).collect(),
            right: (0..n).map(|i| (i + 1) % n).collect(),
            up: (0..n).collect(),
            down: (0..n).collect(),
            col: (0..n).collect(),
            row: vec![usize::MAX; n],
            size: vec![0; n],
            columns,
            rows: 0,
        };
        if columns == 0 {
            d.left[ROOT] = ROOT;
            d.right[ROOT] = ROOT;
        }
        d
    }

    /// Adds a row covering the given column indices (0-based, distinct).
    pub fn add_row(&mut self, cols: &[usize]) {
        let r = self.rows;
        self.rows += 1;
        let mut first: Option<usize> = None;
        for &c in cols {
            assert!(c < self.columns, "column {c} out of range");
            let header = c + 1;
            let node = self.left.len();
            self.col.push(header);
            self.row.push(r);
            self.up.push(self.up[header]);
            self.down.push(header);
            let above = self.up[header];
            self.down[above] = node;
            self.up[header] = node;
            self.size[header] += 1;
            match first {
                None => {
                    self.left.push(node);
                    self.right.push(node);
                    first = Some(node);
                }
                Some(f) => {
                    let last = self.left[f];
                    self.left.push(last);
                    self.right.push(f);
                    self.right[last] = node;
                    self.left[f] = node;
                }
            }
            self.size.push(0);
        }
    }

    fn cover(&mut self, c: usize) {
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = r;
        self.left[r] = l;
        let mut i = self.down[c];
        while i != c {
            let mut j = self.right[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = d;
                self.up[d] = u;
                self.size[self.col[j]] -= 1;
                j = self.right[j];
            }
            i = self.down[i];
        }
    }

    fn uncover(&mut self, c: usize) {
        let mut i = self.up[c];
        while i != c {
            let mut j = self.left[i];
            while j != i {
                self.size[self.col[j]] += 1;
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = j;
                self.up[d] = j;
                j = self.left[j];
            }
            i = self.up[i];
        }
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = c;
        self.left[r] = c;
    }

    /// Searches for one exact cover, visiting at most `budget` nodes.
    pub fn solve(&mut self, budget: u64) -> (Outcome, u64) {
        let mut partial = Vec::new();
        let mut nodes = 0u64;
        let outcome = match self.search(&mut partial, &mut nodes, budget) {
            Some(true) => {
                let mut rows: Vec<usize> = partial.iter().map(|&n| self.row[n]).collect();
                rows.sort_unstable();
                Outcome::Solved(rows)
            }
            Some(false) => Outcome::NoSolution,
            None => Outcome::OutOfBudget,
        };
        (outcome, nodes)
    }

    fn search(&mut self, partial: &mut Vec<usize>, nodes: &mut u64, budget: u64) -> Option<bool> {
        if self.right[ROOT] == ROOT {
            return Some(true);
        }
        *nodes += 1;
        if *nodes > budget {
            return None;
        }
        let mut c = self.right[ROOT];
        let mut best = c;
        while c != ROOT {
            if self.size[c] < self.size[best] {
                best = c;
            }
            c = self.right[c];
        }
        let c = best;
        if self.size[c] == 0 {
            return Some(false);
        }
        self.cover(c);
        let mut r = self.down[c];
        while r != c {
            partial.push(r);
            let mut j = self.right[r];
            while j != r {
                self.cover(self.col[j]);
                j = self.right[j];
            }
            let res = self.search(partial, nodes, budget);
            if res != Some(false) {
                return res;
            }
            let mut j = self.left[r];
            while j != r {
                self.uncover(self.col[j]);
                j = self.left[j];
            }
            partial.pop();
            r = self.down[r];
        }
        self.uncover(c);
        Some(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knuth_example() {
        let mut d = Dlx::new(7);
        for row in [vec![2, 4, 5], vec![0, 3, 6], vec![1, 2, 5], vec![0, 3], vec![1, 6], vec![3, 4, 6]] {
            d.add_row(&row);
        }
        assert_eq!(d.solve(1000).0, Outcome::Solved(vec![0, 3, 4]));
    }

    #[test]
    fn no_solution_and_budget() {
        let mut d = Dlx::new(3);
        d.add_row(&[0, 1]);
        d.add_row(&[1, 2]);
        assert_eq!(d.solve(1000).0, Outcome::NoSolution);
        let mut d = Dlx::new(2);
        d.add_row(&[0]);
        d.add_row(&[1]);
        assert_eq!(d.solve(1).0, Outcome::OutOfBudget);
    }

    #[test]
    fn empty_matrix_is_trivially_covered() {
        let mut d = Dlx::new(0);
        assert_eq!(d.solve(10).0, Outcome::Solved(vec![]));
    }
}
