//! Fully commuting Pauli groups.
//!
//! Both heuristics work on the terms of a sum with the identity removed (it
//! joins the scalar constant), visited in descending `|coeff|` with ties broken
//! by label.

use serde::Serialize;

use super::pauli::{PauliString, PauliSum, PauliTerm, C64};
use crate::error::{Error, Result};

/// Vertices are terms; an edge joins two distinct terms that commute.
#[derive(Clone, Debug)]
pub struct CommutationGraph {
    pub n_qubits: usize,
    pub vertices: Vec<PauliTerm>,
    adjacency: Vec<Vec<bool>>,
}

impl CommutationGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn commutes(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
    }

    pub fn n_edges(&self) -> usize {
        (0..self.len())
            .map(|i| {
                (i + 1..self.len())
                    .filter(|&j| self.adjacency[i][j])
                    .count()
            })
            .sum()
    }

    /// Number of terms `i` anticommutes with.
    pub fn anticommuting_degree(&self, i: usize) -> usize {
        (0..self.len())
            .filter(|&j| j != i && !self.adjacency[i][j])
            .count()
    }
}

fn sorted_terms(h: &PauliSum) -> Vec<PauliTerm> {
    let n = h.n_qubits;
    let mut terms: Vec<PauliTerm> = h
        .non_identity()
        .map(|(s, c)| PauliTerm::new(n, *s, *c))
        .collect();
    terms.sort_by(|a, b| {
        b.coeff
            .norm()
            .total_cmp(&a.coeff.norm())
            .then_with(|| a.string.cmp_label(&b.string, n))
    });
    terms
}

/// Commutation graph over the non-identity terms of `h`.
pub fn build_commutation_graph(h: &PauliSum) -> CommutationGraph {
    let vertices = sorted_terms(h);
    let adjacency = vertices
        .iter()
        .enumerate()
        .map(|(i, a)| {
            vertices
                .iter()
                .enumerate()
                .map(|(j, b)| i != j && a.string.commutes(&b.string))
                .collect()
        })
        .collect();
    CommutationGraph {
        n_qubits: h.n_qubits,
        vertices,
        adjacency,
    }
}

/// A set of mutually commuting Pauli terms.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliGroup {
    pub label: usize,
    pub n_qubits: usize,
    pub terms: Vec<PauliTerm>,
}

impl PauliGroup {
    pub fn new(label: usize, n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        for (i, a) in terms.iter().enumerate() {
            if a.n_qubits != n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: n_qubits,
                    got: a.n_qubits,
                });
            }
            for b in &terms[i + 1..] {
                if !a.string.commutes(&b.string) {
                    return Err(Error::Internal(format!(
                        "group {label}: {} and {} anticommute",
                        a.string.label(n_qubits),
                        b.string.label(n_qubits)
                    )));
                }
            }
        }
        Ok(Self {
            label,
            n_qubits,
            terms,
        })
    }

    pub fn to_sum(&self) -> PauliSum {
        PauliSum::from_terms(
            self.n_qubits,
            self.terms.iter().map(|t| (t.string, t.coeff)),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QubitPartition {
    pub method: String,
    pub n_qubits: usize,
    /// Identity coefficient of the source.
    pub constant: C64,
    pub groups: Vec<PauliGroup>,
    pub source: PauliSum,
}

#[derive(Serialize)]
struct TermOut {
    coeff: f64,
    coeff_imag: f64,
    string: String,
}

#[derive(Serialize)]
struct PartitionOut<'a> {
    method: &'a str,
    n_qubits: usize,
    constant: f64,
    groups: Vec<Vec<TermOut>>,
}

impl QubitPartition {
    fn from_classes(method: &str, h: &PauliSum, classes: Vec<Vec<PauliTerm>>) -> Result<Self> {
        let groups = classes
            .into_iter()
            .enumerate()
            .map(|(k, terms)| PauliGroup::new(k, h.n_qubits, terms))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            method: method.into(),
            n_qubits: h.n_qubits,
            constant: h.identity_coeff(),
            groups,
            source: h.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn group_sums(&self) -> Vec<PauliSum> {
        self.groups.iter().map(PauliGroup::to_sum).collect()
    }

    /// Sum of all groups plus the constant.
    pub fn reassemble(&self) -> PauliSum {
        let mut out = PauliSum::new(self.n_qubits);
        if self.constant != C64::new(0.0, 0.0) {
            out.add_term(PauliString::IDENTITY, self.constant);
        }
        for g in &self.groups {
            for t in &g.terms {
                out.add_term(t.string, t.coeff);
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let out = PartitionOut {
            method: &self.method,
            n_qubits: self.n_qubits,
            constant: self.constant.re,
            groups: self
                .groups
                .iter()
                .map(|g| {
                    g.terms
                        .iter()
                        .map(|t| TermOut {
                            coeff: t.coeff.re,
                            coeff_imag: t.coeff.im,
                            string: t.string.label(self.n_qubits),
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string_pretty(&out)
    }
}

/// Largest-first coloring of the anticommutation graph: vertices by descending
/// anticommuting degree (ties keep the coefficient order), each taking the
/// smallest color not used by an anticommuting neighbor.
pub fn group_lf(h: &PauliSum) -> Result<QubitPartition> {
    let graph = build_commutation_graph(h);
    let n = graph.len();
    let degree: Vec<usize> = (0..n).map(|i| graph.anticommuting_degree(i)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| degree[b].cmp(&degree[a]).then(a.cmp(&b)));
    let mut color = vec![usize::MAX; n];
    let mut n_colors = 0;
    for &v in &order {
        let mut used = vec![false; n_colors + 1];
        for u in 0..n {
            if u != v && color[u] != usize::MAX && !graph.commutes(u, v) {
                used[color[u]] = true;
            }
        }
        let c = used
            .iter()
            .position(|&x| !x)
            .expect("one color is always free");
        color[v] = c;
        n_colors = n_colors.max(c + 1);
    }
    let mut classes = vec![Vec::new(); n_colors];
    for v in 0..n {
        classes[color[v]].push(graph.vertices[v]);
    }
    QubitPartition::from_classes("fc-lf", h, classes)
}

/// Sorted insertion: each term joins the first group it fully commutes with.
pub fn group_si(h: &PauliSum) -> Result<QubitPartition> {
    let mut classes: Vec<Vec<PauliTerm>> = Vec::new();
    for t in sorted_terms(h) {
        match classes
            .iter_mut()
            .find(|g| g.iter().all(|u| u.string.commutes(&t.string)))
        {
            Some(g) => g.push(t),
            None => classes.push(vec![t]),
        }
    }
    QubitPartition::from_classes("fc-si", h, classes)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QubitRotationCount {
    pub total: usize,
    pub per_group: Vec<usize>,
}

/// One rotation per non-identity Pauli product.
pub fn qubit_rotation_count(p: &QubitPartition) -> QubitRotationCount {
    let per_group: Vec<usize> = p
        .groups
        .iter()
        .map(|g| g.terms.iter().filter(|t| !t.string.is_identity()).count())
        .collect();
    QubitRotationCount {
        total: per_group.iter().sum(),
        per_group,
    }
}
