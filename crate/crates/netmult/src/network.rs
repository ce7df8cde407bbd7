//! Homogeneous networks with asymmetric inputs, represented as families of
//! input maps, together with monoid closures, completions, fundamental
//! networks, quotients and the fibration / balance / constructibility checks.
//!
//! Nodes are `0..n` internally; all external formats are 1-based.

use indexmap::IndexMap;
use std::collections::HashMap;

use crate::error::{Error, Result};

/// Default cap on monoid closure size. Closures of maps on `n` nodes are
/// bounded by `n^n`, so a hard cap with a clear error beats a silent blowup.
pub const DEFAULT_CLOSURE_CAP: usize = 5000;

/// Default node-count gate for exhaustive balanced-partition enumeration.
pub const DEFAULT_ENUMERATION_GATE: usize = 12;

/// An input map `sigma: N -> N`: entry `i` is the node whose state node `i`
/// receives through the arrows of one type. Need not be injective or surjective.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputMap(Vec<usize>);

impl InputMap {
    pub fn new(targets: Vec<usize>) -> Self {
        InputMap(targets)
    }

    /// The identity map on `n` nodes.
    pub fn identity(n: usize) -> Self {
        InputMap((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, node: usize) -> usize {
        self.0[node]
    }

    pub fn targets(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &t)| i == t)
    }

    /// Composition `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &InputMap) -> InputMap {
        InputMap(other.0.iter().map(|&q| self.0[q]).collect())
    }

    /// Number of fixed points, i.e. self loops of this arrow type.
    pub fn fixed_points(&self) -> usize {
        self.0.iter().enumerate().filter(|(i, &t)| *i == t).count()
    }

    /// Bracket notation `[p_1, ..., p_n]` with 1-based entries.
    pub fn bracket(&self) -> String {
        let inner: Vec<String> = self.0.iter().map(|t| (t + 1).to_string()).collect();
        format!("[{}]", inner.join(","))
    }
}

/// A homogeneous coupled-cell network with asymmetric input: a node count
/// plus an ordered list of labelled input maps. Distinct labels may carry
/// equal maps; they are never merged.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    node_count: usize,
    arrows: Vec<(String, InputMap)>,
}

impl Network {
    /// Builds a network, validating every invariant: at least one node, all
    /// maps of full length with in-range targets, labels pairwise distinct.
    pub fn new(node_count: usize, arrows: Vec<(String, InputMap)>) -> Result<Self> {
        let net = Network { node_count, arrows };
        net.validate()?;
        Ok(net)
    }

    /// Re-checks the construction invariants.
    pub fn validate(&self) -> Result<()> {
        if self.node_count == 0 {
            return Err(Error::EmptyNetwork);
        }
        let mut seen = HashMap::new();
        for (label, map) in &self.arrows {
            if seen.insert(label.clone(), ()).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
            if map.len() != self.node_count {
                return Err(Error::Parse(format!(
                    "arrow `{label}` has {} entries, expected {}",
                    map.len(),
                    self.node_count
                )));
            }
            for (node, &target) in map.targets().iter().enumerate() {
                if target >= self.node_count {
                    return Err(Error::IndexOutOfRange {
                        label: label.clone(),
                        node: node + 1,
                        target: target + 1,
                        node_count: self.node_count,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arrows(&self) -> &[(String, InputMap)] {
        &self.arrows
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.arrows.iter().map(|(l, _)| l.as_str())
    }

    pub fn map_for(&self, label: &str) -> Option<&InputMap> {
        self.arrows
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, m)| m)
    }

    fn same_label_set(&self, other: &Network) -> bool {
        let mut a: Vec<&str> = self.labels().collect();
        let mut b: Vec<&str> = other.labels().collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }
}

/// A finite monoid of input maps: closed under composition, with the unit
/// first and a full multiplication table `table[a][b] = index of a ∘ b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monoid {
    elements: Vec<InputMap>,
    names: Vec<String>,
    table: Vec<Vec<usize>>,
}

impl Monoid {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Index of the identity element (always 0 by construction).
    pub fn unit(&self) -> usize {
        0
    }

    pub fn elements(&self) -> &[InputMap] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &InputMap {
        &self.elements[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `compose(a, b)` = index of `elements[a] ∘ elements[b]`.
    pub fn compose(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// `#{t : c ∘ t = t}`: self loops of colour `c` in the fundamental network.
    pub fn left_fixed_count(&self, c: usize) -> usize {
        (0..self.len()).filter(|&t| self.table[c][t] == t).count()
    }

    /// Rebuilds a monoid from named elements and a multiplication table, as
    /// read back from a report document. Checks unit and closure axioms.
    pub fn from_parts(
        elements: Vec<InputMap>,
        names: Vec<String>,
        table: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let k = elements.len();
        if names.len() != k || table.len() != k || table.iter().any(|r| r.len() != k) {
            return Err(Error::Parse("monoid table has inconsistent dimensions".into()));
        }
        if k == 0 {
            return Err(Error::Parse("monoid has no elements".into()));
        }
        if table.iter().flatten().any(|&e| e >= k) {
            return Err(Error::Parse("monoid table entry out of range".into()));
        }
        let m = Monoid {
            elements,
            names,
            table,
        };
        if !m.elements[0].is_identity() {
            return Err(Error::Parse("monoid unit is not the identity map".into()));
        }
        for a in 0..k {
            if m.table[0][a] != a || m.table[a][0] != a {
                return Err(Error::Parse("monoid unit row/column is not the identity".into()));
            }
        }
        Ok(m)
    }
}

fn fresh_name(candidate: String, taken: &HashMap<String, usize>) -> String {
    let mut name = candidate;
    while taken.contains_key(&name) {
        name.push('\'');
    }
    name
}

/// Closure of `{identity} ∪ maps` under composition. Element order is
/// deterministic: identity, the given maps in input order (duplicates
/// dropped), then newly generated maps in discovery order.
pub fn monoid_closure(maps: &[InputMap], cap: usize) -> Result<Monoid> {
    let named: Vec<(String, InputMap)> = maps
        .iter()
        .enumerate()
        .map(|(i, m)| (format!("g{}", i + 1), m.clone()))
        .collect();
    monoid_closure_named(&named, cap).map(|(m, _)| m)
}

/// As [`monoid_closure`], but elements generated from a labelled arrow keep
/// that label as their name; the returned map sends every original label to
/// its element index (labels carrying equal maps alias the same element).
pub fn monoid_closure_named(
    maps: &[(String, InputMap)],
    cap: usize,
) -> Result<(Monoid, IndexMap<String, usize>)> {
    let n = maps.first().map(|(_, m)| m.len()).unwrap_or(1);
    let mut elements: Vec<InputMap> = vec![InputMap::identity(n)];
    let mut index: HashMap<InputMap, usize> = HashMap::new();
    index.insert(elements[0].clone(), 0);

    let mut aliases = IndexMap::new();
    let mut names: HashMap<String, usize> = HashMap::new();
    for (label, map) in maps {
        if map.len() != n {
            return Err(Error::Parse(format!(
                "input map for `{label}` has {} entries, expected {n}",
                map.len()
            )));
        }
        let idx = *index.entry(map.clone()).or_insert_with(|| {
            elements.push(map.clone());
            elements.len() - 1
        });
        aliases.insert(label.clone(), idx);
        names.entry(label.clone()).or_insert(idx);
    }
    if elements.len() > cap {
        return Err(Error::ClosureCapExceeded { cap });
    }

    // Breadth-first closure: products are formed in ascending index order,
    // so discovery order is reproducible run-to-run.
    let mut i = 0;
    while i < elements.len() {
        let mut j = 0;
        while j < elements.len() {
            for (a, b) in [(i, j), (j, i)] {
                let prod = elements[a].compose(&elements[b]);
                if let std::collections::hash_map::Entry::Vacant(slot) = index.entry(prod) {
                    if elements.len() + 1 > cap {
                        return Err(Error::ClosureCapExceeded { cap });
                    }
                    elements.push(slot.key().clone());
                    slot.insert(elements.len() - 1);
                }
            }
            j += 1;
        }
        i += 1;
    }

    let k = elements.len();
    let mut table = vec![vec![0usize; k]; k];
    for a in 0..k {
        for b in 0..k {
            table[a][b] = index[&elements[a].compose(&elements[b])];
        }
    }

    // Name each element: the first original label carrying its map, else
    // "e" for the unit, else its bracket notation; collisions get a tick.
    let mut by_element: Vec<Option<String>> = vec![None; k];
    let mut taken: HashMap<String, usize> = HashMap::new();
    for (label, &idx) in &aliases {
        if by_element[idx].is_none() {
            by_element[idx] = Some(label.clone());
            taken.insert(label.clone(), idx);
        }
    }
    let mut final_names = Vec::with_capacity(k);
    for (idx, slot) in by_element.into_iter().enumerate() {
        let name = match slot {
            Some(name) => name,
            None => {
                let base = if idx == 0 {
                    "e".to_string()
                } else {
                    elements[idx].bracket()
                };
                let name = fresh_name(base, &taken);
                taken.insert(name.clone(), idx);
                name
            }
        };
        final_names.push(name);
    }

    Ok((
        Monoid {
            elements,
            names: final_names,
            table,
        },
        aliases,
    ))
}

/// Result of completing a network: the complete network relabelled by monoid
/// element names, the monoid itself, and the original labels as aliases.
#[derive(Debug, Clone)]
pub struct Completion {
    pub network: Network,
    pub monoid: Monoid,
    /// original arrow label -> monoid element index
    pub aliases: IndexMap<String, usize>,
}

/// Completes a network: closes its input maps into a monoid and returns the
/// network carrying one arrow per monoid element.
pub fn completion(net: &Network) -> Result<Completion> {
    completion_capped(net, DEFAULT_CLOSURE_CAP)
}

pub fn completion_capped(net: &Network, cap: usize) -> Result<Completion> {
    net.validate()?;
    let (monoid, aliases) = monoid_closure_named(net.arrows(), cap)?;
    let arrows = (0..monoid.len())
        .map(|i| (monoid.name(i).to_string(), monoid.element(i).clone()))
        .collect();
    let network = Network::new(net.node_count(), arrows)?;
    Ok(Completion {
        network,
        monoid,
        aliases,
    })
}

/// The fundamental network of a monoid: one node per element, one arrow per
/// element `t`, whose input map sends node `s` to `t ∘ s` (read off the table).
pub fn fundamental_network(m: &Monoid) -> Network {
    let k = m.len();
    let arrows = (0..k)
        .map(|t| {
            let map = InputMap::new((0..k).map(|s| m.compose(t, s)).collect());
            (m.name(t).to_string(), map)
        })
        .collect();
    Network {
        node_count: k,
        arrows,
    }
}

/// The input network of node `p`: the subnetwork on all nodes that directly
/// or indirectly influence `p` (images of `p` under arbitrary compositions of
/// input maps, plus `p` itself), with every arrow restricted. The second
/// return value maps local node indices back to the original ones, in
/// ascending original order.
pub fn input_network(net: &Network, p: usize) -> (Network, Vec<usize>) {
    let mut in_orbit = vec![false; net.node_count()];
    in_orbit[p] = true;
    let mut stack = vec![p];
    while let Some(q) = stack.pop() {
        for (_, map) in net.arrows() {
            let r = map.apply(q);
            if !in_orbit[r] {
                in_orbit[r] = true;
                stack.push(r);
            }
        }
    }
    let originals: Vec<usize> = (0..net.node_count()).filter(|&q| in_orbit[q]).collect();
    let local: HashMap<usize, usize> = originals
        .iter()
        .enumerate()
        .map(|(loc, &orig)| (orig, loc))
        .collect();
    let arrows = net
        .arrows()
        .iter()
        .map(|(label, map)| {
            let restricted = InputMap::new(originals.iter().map(|&q| local[&map.apply(q)]).collect());
            (label.clone(), restricted)
        })
        .collect();
    (
        Network {
            node_count: originals.len(),
            arrows,
        },
        originals,
    )
}

/// A network map determined by where it sends nodes; it is a graph fibration
/// iff it intertwines every pair of equally labelled input maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fibration {
    pub node_map: Vec<usize>,
}

/// Checks `f ∘ sigma_src = sigma_dst ∘ f` for every shared arrow label.
pub fn is_fibration(src: &Network, dst: &Network, f: &Fibration) -> Result<bool> {
    if !src.same_label_set(dst) {
        return Err(Error::LabelMismatch(
            "fibration endpoints carry different arrow labels".into(),
        ));
    }
    if f.node_map.len() != src.node_count() || f.node_map.iter().any(|&q| q >= dst.node_count()) {
        return Err(Error::LabelMismatch(
            "fibration node map does not fit the networks".into(),
        ));
    }
    for (label, src_map) in src.arrows() {
        let dst_map = dst.map_for(label).expect("label set checked above");
        for node in 0..src.node_count() {
            if f.node_map[src_map.apply(node)] != dst_map.apply(f.node_map[node]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A partition of the nodes into classes `0..k`, stored canonically: class
/// indices appear in first-use order, so classes are numbered by their
/// smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    class_of: Vec<usize>,
}

impl Partition {
    /// Canonicalises an arbitrary class assignment.
    pub fn new(assignment: &[usize]) -> Self {
        let mut relabel: HashMap<usize, usize> = HashMap::new();
        let mut class_of = Vec::with_capacity(assignment.len());
        for &c in assignment {
            let next = relabel.len();
            class_of.push(*relabel.entry(c).or_insert(next));
        }
        Partition { class_of }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            class_of: (0..n).collect(),
        }
    }

    pub fn class_of(&self) -> &[usize] {
        &self.class_of
    }

    pub fn class_count(&self) -> usize {
        self.class_of.iter().max().map_or(0, |&m| m + 1)
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    /// The classes as sorted lists of node indices.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.class_count()];
        for (node, &c) in self.class_of.iter().enumerate() {
            classes[c].push(node);
        }
        classes
    }
}

/// A partition is balanced iff every input map sends equivalent nodes to
/// equivalent nodes.
pub fn is_balanced(net: &Network, part: &Partition) -> bool {
    if part.len() != net.node_count() {
        return false;
    }
    for (_, map) in net.arrows() {
        let mut image_class: Vec<Option<usize>> = vec![None; part.class_count()];
        for node in 0..net.node_count() {
            let c = part.class_of()[node];
            let image = part.class_of()[map.apply(node)];
            match image_class[c] {
                None => image_class[c] = Some(image),
                Some(prev) if prev != image => return false,
                _ => {}
            }
        }
    }
    true
}

/// The quotient network on the classes of a balanced partition, with the
/// induced input maps `sigma([p]) = [sigma(p)]`, plus the projection
/// fibration. Classes are numbered by their smallest original node.
pub fn quotient(net: &Network, part: &Partition) -> Result<(Network, Fibration)> {
    let part = Partition::new(part.class_of());
    if !is_balanced(net, &part) {
        return Err(Error::NotBalanced);
    }
    let k = part.class_count();
    let reps: Vec<usize> = {
        let mut reps = vec![usize::MAX; k];
        for (node, &c) in part.class_of().iter().enumerate() {
            if reps[c] == usize::MAX {
                reps[c] = node;
            }
        }
        reps
    };
    let arrows = net
        .arrows()
        .iter()
        .map(|(label, map)| {
            let induced = InputMap::new(
                reps.iter()
                    .map(|&rep| part.class_of()[map.apply(rep)])
                    .collect(),
            );
            (label.clone(), induced)
        })
        .collect();
    let network = Network {
        node_count: k,
        arrows,
    };
    let projection = Fibration {
        node_map: part.class_of().to_vec(),
    };
    Ok((network, projection))
}

/// All balanced partitions by exhaustive enumeration of set partitions
/// (restricted growth strings), gated at `max_nodes`. Sorted coarsest-first
/// by class count, then lexicographically by class assignment.
pub fn enumerate_balanced_partitions(net: &Network, max_nodes: usize) -> Result<Vec<Partition>> {
    let n = net.node_count();
    if n > max_nodes {
        return Err(Error::TooLarge(n, max_nodes));
    }
    let mut found = Vec::new();
    let mut rgs = vec![0usize; n];
    enumerate_rgs(&mut rgs, 1, net, &mut found);
    found.sort_by(|a, b| {
        a.class_count()
            .cmp(&b.class_count())
            .then_with(|| a.class_of().cmp(b.class_of()))
    });
    Ok(found)
}

fn enumerate_rgs(rgs: &mut Vec<usize>, pos: usize, net: &Network, out: &mut Vec<Partition>) {
    if pos == rgs.len() {
        let part = Partition {
            class_of: rgs.clone(),
        };
        if is_balanced(net, &part) {
            out.push(part);
        }
        return;
    }
    let max_used = rgs[..pos].iter().copied().max().unwrap_or(0);
    for c in 0..=max_used + 1 {
        rgs[pos] = c;
        enumerate_rgs(rgs, pos + 1, net, out);
    }
    rgs[pos] = 0;
}

/// Decides membership in the class of constructible networks of `m`: the
/// arrow labelled by each monoid element name must realise that element, i.e.
/// the unit label acts as the identity and every table relation
/// `sigma ∘ tau = kappa` holds between the labelled maps. Each node's input
/// network is then a quotient of the fundamental network.
pub fn is_constructible(net: &Network, m: &Monoid) -> Result<bool> {
    let mut net_labels: Vec<&str> = net.labels().collect();
    let mut monoid_names: Vec<&str> = m.names().iter().map(|s| s.as_str()).collect();
    net_labels.sort_unstable();
    monoid_names.sort_unstable();
    if net_labels != monoid_names {
        return Err(Error::LabelMismatch(
            "network labels are not exactly the monoid element names".into(),
        ));
    }
    let realised: Vec<&InputMap> = (0..m.len())
        .map(|i| net.map_for(m.name(i)).expect("label sets match"))
        .collect();
    if !realised[m.unit()].is_identity() {
        return Ok(false);
    }
    for a in 0..m.len() {
        for b in 0..m.len() {
            let lhs = realised[a].compose(realised[b]);
            if &lhs != realised[m.compose(a, b)] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Disjoint union of two networks over the same labels; the nodes of `b` are
/// shifted past those of `a`, and arrows are taken in `a`'s label order.
pub fn disjoint_union(a: &Network, b: &Network) -> Result<Network> {
    if !a.same_label_set(b) {
        return Err(Error::LabelMismatch(
            "disjoint union requires identical arrow labels".into(),
        ));
    }
    let shift = a.node_count();
    let arrows = a
        .arrows()
        .iter()
        .map(|(label, map_a)| {
            let map_b = b.map_for(label).expect("label set checked above");
            let mut targets = map_a.targets().to_vec();
            targets.extend(map_b.targets().iter().map(|&t| t + shift));
            (label.clone(), InputMap::new(targets))
        })
        .collect();
    Network::new(a.node_count() + b.node_count(), arrows)
}

/// The ring network on `n` nodes whose arrow `s_k` shifts by `k`:
/// `s_k(i) = i + k (mod n)`. Its linear admissible maps are exactly the
/// `n x n` (block) circulant matrices, and it is complete by construction.
pub fn circulant_network(n: usize) -> Network {
    let arrows = (0..n)
        .map(|k| {
            let map = InputMap::new((0..n).map(|i| (i + k) % n).collect());
            (format!("s{k}"), map)
        })
        .collect();
    Network {
        node_count: n,
        arrows,
    }
}
