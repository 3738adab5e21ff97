//! Successive-shortest-path min-cost flow on small graphs with real
//! capacities and costs, used to price earth allocation exactly.

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: f64,
    cost: f64,
    flow: f64,
}

#[derive(Debug, Clone, Default)]
pub struct FlowGraph {
    edges: Vec<Edge>,
    adjacent: Vec<Vec<usize>>,
}

const EPS: f64 = 1e-12;

impl FlowGraph {
    pub fn new(nodes: usize) -> Self {
        Self {
            edges: Vec::new(),
            adjacent: vec![Vec::new(); nodes],
        }
    }

    pub fn add_node(&mut self) -> usize {
        self.adjacent.push(Vec::new());
        self.adjacent.len() - 1
    }

    /// Adds `from -> to` and returns its id. `cap` may be infinite.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64, cost: f64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge {
            to,
            cap,
            cost,
            flow: 0.0,
        });
        self.edges.push(Edge {
            to: from,
            cap: 0.0,
            cost: -cost,
            flow: 0.0,
        });
        self.adjacent[from].push(id);
        self.adjacent[to].push(id + 1);
        id
    }

    pub fn flow(&self, edge: usize) -> f64 {
        self.edges[edge].flow
    }

    fn residual(&self, e: usize) -> f64 {
        let edge = &self.edges[e];
        if e % 2 == 0 {
            edge.cap - edge.flow
        } else {
            self.edges[e - 1].flow
        }
    }

    /// Bellman-Ford (queue based) shortest path tree in the residual graph.
    fn shortest(&self, s: usize) -> (Vec<f64>, Vec<Option<usize>>) {
        let n = self.adjacent.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut via = vec![None; n];
        let mut queued = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        dist[s] = 0.0;
        queue.push_back(s);
        queued[s] = true;
        while let Some(v) = queue.pop_front() {
            queued[v] = false;
            for &e in &self.adjacent[v] {
                if self.residual(e) <= EPS {
                    continue;
                }
                let w = self.edges[e].to;
                let d = dist[v] + self.edges[e].cost;
                if d < dist[w] - EPS * (1.0 + d.abs()) {
                    dist[w] = d;
                    via[w] = Some(e);
                    if !queued[w] {
                        queued[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        (dist, via)
    }

    /// Augments along cheapest `s -> t` paths while their cost is negative,
    /// which gives a minimum-cost flow of free value. Returns the flow sent.
    pub fn min_cost_free_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        loop {
            let (dist, via) = self.shortest(s);
            if !(dist[t] < 0.0) {
                return total;
            }
            let mut push = f64::INFINITY;
            let mut v = t;
            while let Some(e) = via[v] {
                push = push.min(self.residual(e));
                v = self.edges[e ^ 1].to;
            }
            if !push.is_finite() || push <= EPS {
                return total;
            }
            let mut v = t;
            while let Some(e) = via[v] {
                if e % 2 == 0 {
                    self.edges[e].flow += push;
                } else {
                    self.edges[e - 1].flow -= push;
                }
                v = self.edges[e ^ 1].to;
            }
            total += push;
        }
    }
}
