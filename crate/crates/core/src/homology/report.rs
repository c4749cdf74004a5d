//! Homology of a whole tower: Betti numbers per level, induced maps of
//! the bonding maps, functoriality checks and image ranks toward the limit.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{betti_numbers, component_count_oracle, induced_matrix, BettiResult, Coefficients, ComplexHomology, InducedMatrix};
use crate::poset::{face_poset_order_complex_size, order_complex_capped};
use crate::simplicial::{SimplicialComplex, Threshold};
use crate::tower::Tower;
use crate::{Error, Exec, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomologyOptions {
    pub k_max: usize,
    pub coefficients: Coefficients,
    /// Levels `1..=depth`; the whole tower when `None`.
    pub depth: Option<usize>,
    /// Largest order complex (in simplices) that is built.
    pub order_complex_cap: usize,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for HomologyOptions {
    fn default() -> Self {
        Self {
            k_max: 2,
            coefficients: Coefficients::Rationals,
            depth: None,
            order_complex_cap: 2_000_000,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OrderComplexCheck {
    Agrees { simplices: usize },
    Disagrees { simplices: usize, betti: Vec<usize> },
    Skipped { needed: usize, cap: usize },
}

impl OrderComplexCheck {
    pub fn agrees(&self) -> bool {
        matches!(self, OrderComplexCheck::Agrees { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelHomology {
    pub level: usize,
    pub points: usize,
    /// Simplices per dimension of the Rips complex.
    pub simplices: Vec<usize>,
    pub betti: Vec<BettiResult>,
    /// Union-find component count of the Rips graph.
    pub components: usize,
    pub order_complex: OrderComplexCheck,
}

impl LevelHomology {
    pub fn betti_numbers(&self) -> Vec<usize> {
        self.betti.iter().map(|b| b.betti).collect()
    }

    pub fn components_agree(&self) -> bool {
        self.betti.first().is_some_and(|b| b.betti == self.components)
    }
}

/// How induced maps were computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum MapRoute {
    /// Order complexes of the terms, with the bonding maps themselves.
    OrderComplex,
    /// Rips complexes with the nearest-vertex selection, a simplicial map
    /// contiguous to the bonding map.
    VertexSelection { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapHomology {
    pub source_level: usize,
    pub target_level: usize,
    pub degree: usize,
    pub matrix: InducedMatrix,
    pub rank: usize,
    /// `rank ≤ min(β_k(source), β_k(target))`.
    pub within_bounds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctorialityCheck {
    /// `H(q_{n,m}) = H(q_{n,l}) · H(q_{l,m})`.
    pub n: usize,
    pub l: usize,
    pub m: usize,
    pub degree: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub level: usize,
    pub degree: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitRank {
    pub level: usize,
    pub degree: usize,
    /// Rank of `H_k(term_N) → H_k(term_n)` for the deepest level `N`.
    pub rank: usize,
    /// Ranks of `H_k(term_m) → H_k(term_n)` for `m = n..=N`.
    pub history: Vec<usize>,
    /// The rank did not change over the last two depth increments.
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub coefficients: Coefficients,
    pub k_max: usize,
    pub depth: usize,
    pub levels: Vec<LevelHomology>,
    /// `None` with integer coefficients: maps are reported over fields only.
    pub route: Option<MapRoute>,
    pub maps: Vec<MapHomology>,
    pub identities: Vec<IdentityCheck>,
    pub functoriality: Vec<FunctorialityCheck>,
    pub limit_ranks: Vec<LimitRank>,
}

impl HomologyReport {
    /// `table[k][n - 1] = β_k` of level `n`.
    pub fn betti_table(&self) -> Vec<Vec<usize>> {
        (0..=self.k_max).map(|k| self.levels.iter().map(|l| l.betti[k].betti).collect()).collect()
    }

    /// Rows `H_0..H_{k_max}`, one column per level.
    pub fn betti_csv(&self) -> String {
        let mut out = String::from("degree");
        for l in &self.levels {
            out.push_str(&format!(",{}", l.level));
        }
        out.push('\n');
        for (k, row) in self.betti_table().iter().enumerate() {
            out.push_str(&format!("H_{k}"));
            for b in row {
                out.push_str(&format!(",{b}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn map(&self, source_level: usize, degree: usize) -> Option<&MapHomology> {
        self.maps.iter().find(|m| m.source_level == source_level && m.degree == degree)
    }

    pub fn limit_rank(&self, level: usize, degree: usize) -> Option<&LimitRank> {
        self.limit_ranks.iter().find(|r| r.level == level && r.degree == degree)
    }

    /// Every invariant the report asserts: component counts, order-complex
    /// agreement where it was built, rank bounds, identities, functoriality.
    pub fn consistent(&self) -> bool {
        self.levels.iter().all(|l| l.components_agree() && !matches!(l.order_complex, OrderComplexCheck::Disagrees { .. }))
            && self.maps.iter().all(|m| m.within_bounds)
            && self.identities.iter().all(|c| c.holds)
            && self.functoriality.iter().all(|c| c.holds)
    }
}

fn level_homology(
    tower: &Tower,
    n: usize,
    opts: &HomologyOptions,
) -> Result<(LevelHomology, Option<Arc<SimplicialComplex>>)> {
    let sample = tower.sample(n)?;
    let complex = tower.complex(n)?;
    let exec = opts.exec;
    let betti = betti_numbers(complex, opts.k_max, opts.coefficients, exec)?;
    let components = component_count_oracle(sample, 4.0 * sample.epsilon, Threshold::Strict, tower.tolerance(), exec);
    let needed = face_poset_order_complex_size(complex, opts.k_max + 1);
    let built = if needed > opts.order_complex_cap {
        Err(Error::ResourceCap { what: "order complex".into(), needed, cap: opts.order_complex_cap })
    } else {
        order_complex_capped(&*tower.term(n)?, opts.k_max + 1, opts.order_complex_cap, exec)
    };
    let (order_complex, oc) = match built {
        Ok(oc) => {
            let field = match opts.coefficients {
                Coefficients::Integers => Coefficients::Rationals,
                c => c,
            };
            let ob: Vec<usize> = betti_numbers(&oc, opts.k_max, field, exec)?.iter().map(|b| b.betti).collect();
            let vr: Vec<usize> = match opts.coefficients {
                Coefficients::Integers => {
                    betti_numbers(complex, opts.k_max, Coefficients::Rationals, exec)?.iter().map(|b| b.betti).collect()
                }
                _ => betti.iter().map(|b| b.betti).collect(),
            };
            let simplices = oc.total();
            let check = if ob == vr {
                OrderComplexCheck::Agrees { simplices }
            } else {
                OrderComplexCheck::Disagrees { simplices, betti: ob }
            };
            (check, Some(Arc::new(oc)))
        }
        Err(Error::ResourceCap { needed, cap, .. }) => (OrderComplexCheck::Skipped { needed, cap }, None),
        Err(e) => return Err(e),
    };
    let level = LevelHomology {
        level: n,
        points: sample.len(),
        simplices: (0..=complex.dimension()).map(|d| complex.count(d)).collect(),
        betti,
        components,
        order_complex,
    };
    Ok((level, oc))
}

/// Betti numbers of every level on the Rips complexes, checked against the
/// component oracle and the order complexes of the terms; induced maps of
/// the bonding maps with functoriality checks and limit ranks.
pub fn tower_homology(tower: &Tower, opts: &HomologyOptions) -> Result<HomologyReport> {
    let depth = opts.depth.unwrap_or(tower.depth());
    if depth == 0 || depth > tower.depth() {
        return Err(Error::LevelOutOfRange { level: depth, depth: tower.depth() });
    }
    let k_max = opts.k_max;
    let exec = opts.exec;
    let per_level: Vec<Result<(LevelHomology, Option<Arc<SimplicialComplex>>)>> =
        exec.map_range(depth, |i| level_homology(tower, i + 1, opts));
    let mut levels = Vec::with_capacity(depth);
    let mut order_complexes = Vec::with_capacity(depth);
    for r in per_level {
        let (l, oc) = r?;
        levels.push(l);
        order_complexes.push(oc);
    }
    let mut report = HomologyReport {
        coefficients: opts.coefficients,
        k_max,
        depth,
        levels,
        route: None,
        maps: Vec::new(),
        identities: Vec::new(),
        functoriality: Vec::new(),
        limit_ranks: Vec::new(),
    };
    if opts.coefficients == Coefficients::Integers {
        return Ok(report);
    }

    let skipped: Vec<usize> = order_complexes.iter().enumerate().filter(|(_, o)| o.is_none()).map(|(i, _)| i + 1).collect();
    // the bonding maps are only formed once every order complex exists
    let truncated: Vec<usize> =
        if skipped.is_empty() { (1..depth).filter(|&n| tower.bonding_map(n).is_err()).collect() } else { Vec::new() };
    let route = if !skipped.is_empty() {
        MapRoute::VertexSelection { reason: format!("order complex over the cap at levels {skipped:?}") }
    } else if !truncated.is_empty() {
        MapRoute::VertexSelection { reason: format!("bonding images exceed the truncated terms at levels {truncated:?}") }
    } else {
        MapRoute::OrderComplex
    };
    if tower.complex(1)?.cap() < k_max + 1 && matches!(route, MapRoute::VertexSelection { .. }) {
        return Err(Error::DegreeOutOfRange { degree: k_max + 1, cap: tower.complex(1)?.cap() });
    }

    let complexes: Vec<Arc<SimplicialComplex>> = match route {
        MapRoute::OrderComplex => order_complexes.into_iter().map(|o| o.expect("built")).collect(),
        MapRoute::VertexSelection { .. } => (1..=depth).map(|n| tower.complex(n).cloned()).collect::<Result<_>>()?,
    };
    let homologies: Vec<ComplexHomology> = exec
        .map_range(depth, |i| ComplexHomology::new(complexes[i].clone(), k_max, opts.coefficients, exec))
        .into_iter()
        .collect::<Result<_>>()?;
    let vertex_map = |n: usize, m: usize| -> Result<Vec<u32>> {
        match route {
            MapRoute::OrderComplex => {
                Ok(tower.composite_map(n, m)?.assignment().into_iter().map(|y| y as u32).collect())
            }
            MapRoute::VertexSelection { .. } => tower.selection_composite(n, m),
        }
    };
    // matrices[(n, m)] for every n ≤ m
    let mut matrices = std::collections::HashMap::new();
    for n in 1..=depth {
        for m in n..=depth {
            let map = vertex_map(n, m)?;
            for k in 0..=k_max {
                let mat = induced_matrix(&homologies[m - 1], &homologies[n - 1], &map, k)?;
                matrices.insert((n, m, k), mat);
            }
        }
    }
    for n in 1..=depth {
        for k in 0..=k_max {
            report.identities.push(IdentityCheck { level: n, degree: k, holds: matrices[&(n, n, k)].is_identity() });
        }
    }
    for n in 1..depth {
        for k in 0..=k_max {
            let matrix = matrices[&(n, n + 1, k)].clone();
            let rank = matrix.rank();
            let bound = homologies[n - 1].betti(k).min(homologies[n].betti(k));
            report.maps.push(MapHomology { source_level: n + 1, target_level: n, degree: k, rank, within_bounds: rank <= bound, matrix });
        }
    }
    for n in 1..=depth {
        for l in n + 1..=depth {
            for m in l + 1..=depth {
                for k in 0..=k_max {
                    let product = matrices[&(n, l, k)].mul(&matrices[&(l, m, k)])?;
                    report.functoriality.push(FunctorialityCheck { n, l, m, degree: k, holds: product == matrices[&(n, m, k)] });
                }
            }
        }
    }
    for n in 1..=depth {
        for k in 0..=k_max {
            let history: Vec<usize> = (n..=depth).map(|m| matrices[&(n, m, k)].rank()).collect();
            let rank = *history.last().expect("m = n is present");
            let stable = history.len() >= 3 && history[history.len() - 3..].iter().all(|&r| r == rank);
            report.limit_ranks.push(LimitRank { level: n, degree: k, rank, history, stable });
        }
    }
    report.route = Some(route);
    Ok(report)
}
