//! Stallings graphs for finitely generated subgroups of free groups.
//!
//! A subgroup given by generator words is turned into its folded core
//! automaton: a bouquet of loops, one per generator, folded until no two
//! edges with a common label share a source or a target, then pruned to the
//! core. Membership is a deterministic path trace; the rank is
//! `edges − vertices + 1`.
//!
//! Every edge additionally carries a word over the subgroup-generator
//! alphabet. Folds splice these decorations so that the product of
//! decorations along any basepoint loop is an expression of the loop's label
//! in the original generators; after folding they are normalized against a
//! breadth-first spanning tree (tree edges trivial), which makes
//! [`SubgroupGraph::express`] deterministic.

use std::fmt;

use thiserror::Error;

use crate::words::{Alphabet, Endomorphism, FreeWord, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubgroupError {
    #[error("word is not a member of the subgroup")]
    NotAMember,
    #[error("generator word over {{{0}}} does not match the ambient alphabet {{{1}}}")]
    AlphabetMismatch(String, String),
    #[error("subgroup alphabet has {got} names for {expected} generators")]
    NameCount { expected: usize, got: usize },
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Clone)]
struct Arc {
    src: usize,
    dst: usize,
    gen: usize,
    decoration: FreeWord,
    in_tree: bool,
}

/// Folded core Stallings automaton of a finitely generated subgroup, with
/// per-edge decorations enabling constructive membership.
#[derive(Clone)]
pub struct SubgroupGraph {
    ambient: Alphabet,
    sub_alphabet: Option<Alphabet>,
    vertices: usize,
    arcs: Vec<Arc>,
    // out[v][g] / inn[v][g]: the unique arc leaving/entering v with label g.
    out: Vec<Vec<Option<usize>>>,
    inn: Vec<Vec<Option<usize>>>,
}

impl SubgroupGraph {
    /// Fold the subgroup generated by `gens`. Subgroup generators are named
    /// `g1, g2, …` in input order.
    pub fn build(ambient: &Alphabet, gens: &[FreeWord]) -> Result<Self, SubgroupError> {
        let names: Vec<String> = (1..=gens.len()).map(|i| format!("g{i}")).collect();
        let sub_alphabet = if gens.is_empty() {
            None
        } else {
            Some(Alphabet::new(names).expect("generated names are valid"))
        };
        Self::build_inner(ambient, gens, sub_alphabet)
    }

    /// Fold with an explicit subgroup-generator alphabet (one name per
    /// generator word, in order).
    pub fn build_named(
        ambient: &Alphabet,
        gens: &[FreeWord],
        sub_alphabet: Alphabet,
    ) -> Result<Self, SubgroupError> {
        if sub_alphabet.size() != gens.len() {
            return Err(SubgroupError::NameCount { expected: gens.len(), got: sub_alphabet.size() });
        }
        Self::build_inner(ambient, gens, Some(sub_alphabet))
    }

    fn build_inner(
        ambient: &Alphabet,
        gens: &[FreeWord],
        sub_alphabet: Option<Alphabet>,
    ) -> Result<Self, SubgroupError> {
        for g in gens {
            if g.alphabet() != ambient {
                return Err(SubgroupError::AlphabetMismatch(
                    g.alphabet().to_string(),
                    ambient.to_string(),
                ));
            }
        }
        let mut builder = Builder::new(ambient.clone(), sub_alphabet.clone());
        for (i, g) in gens.iter().enumerate() {
            builder.add_petal(i, g);
        }
        builder.fold();
        builder.prune();
        Ok(builder.finish())
    }

    pub fn ambient(&self) -> &Alphabet {
        &self.ambient
    }

    /// The subgroup-generator alphabet (`None` for the trivial subgroup).
    pub fn sub_alphabet(&self) -> Option<&Alphabet> {
        self.sub_alphabet.as_ref()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.arcs.len()
    }

    /// `edges − vertices + 1` of the folded core graph.
    pub fn rank(&self) -> usize {
        self.arcs.len() + 1 - self.vertices
    }

    /// Follow `w` from the basepoint; `Some(vertex)` if every letter has an
    /// edge to read.
    fn walk(&self, w: &FreeWord) -> Option<usize> {
        let mut cur = 0usize;
        for (g, inverted) in w.letters() {
            let arc_idx = if inverted { self.inn[cur][g] } else { self.out[cur][g] }?;
            let arc = &self.arcs[arc_idx];
            cur = if inverted { arc.src } else { arc.dst };
        }
        Some(cur)
    }

    /// Membership test: true iff `w` labels a basepoint loop.
    pub fn contains(&self, w: &FreeWord) -> bool {
        if w.alphabet() != &self.ambient {
            return false;
        }
        self.walk(w) == Some(0)
    }

    /// Express a member in the subgroup generators: returns `e` over the
    /// subgroup alphabet such that substituting the generator words into `e`
    /// and reducing yields `w`. Tree edges carry trivial decorations, so
    /// only the non-tree edges along the path contribute.
    pub fn express(&self, w: &FreeWord) -> Result<FreeWord, SubgroupError> {
        if w.alphabet() != &self.ambient {
            return Err(SubgroupError::AlphabetMismatch(
                w.alphabet().to_string(),
                self.ambient.to_string(),
            ));
        }
        let mut acc = match &self.sub_alphabet {
            Some(a) => a.identity(),
            None => self.ambient.identity(),
        };
        let mut cur = 0usize;
        for (g, inverted) in w.letters() {
            let arc_idx = (if inverted { self.inn[cur][g] } else { self.out[cur][g] })
                .ok_or(SubgroupError::NotAMember)?;
            let arc = &self.arcs[arc_idx];
            if !arc.in_tree {
                let step = if inverted { arc.decoration.invert() } else { arc.decoration.clone() };
                acc = acc.mul_unchecked(&step);
            }
            cur = if inverted { arc.src } else { arc.dst };
        }
        if cur != 0 {
            return Err(SubgroupError::NotAMember);
        }
        Ok(acc)
    }

    /// Canonical graph signature: arcs as `(src, label, dst)` triples under
    /// the breadth-first vertex numbering. Two folded graphs are isomorphic
    /// (as based labeled graphs) iff their signatures agree.
    pub fn signature(&self) -> Vec<(usize, usize, usize)> {
        let mut sig: Vec<_> = self.arcs.iter().map(|a| (a.src, a.gen, a.dst)).collect();
        sig.sort_unstable();
        sig
    }

    /// Edges with their decorations, for display purposes.
    pub fn edges(&self) -> impl Iterator<Item = (usize, &str, usize, &FreeWord, bool)> {
        self.arcs
            .iter()
            .map(|a| (a.src, self.ambient.name(a.gen), a.dst, &a.decoration, a.in_tree))
    }
}

impl fmt::Debug for SubgroupGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubgroupGraph(v={}, e={}, rank={})", self.vertices, self.arcs.len(), self.rank())
    }
}

/// True iff the generator images of `phi` generate a subgroup of rank equal
/// to the alphabet size, i.e. iff `phi` is injective.
pub fn is_injective(phi: &Endomorphism) -> bool {
    let graph = SubgroupGraph::build(phi.alphabet(), phi.images())
        .expect("images live over the endomorphism's own alphabet");
    graph.rank() == phi.alphabet().size()
}

struct RawArc {
    src: usize,
    dst: usize,
    gen: usize,
    decoration: FreeWord,
    alive: bool,
}

struct Builder {
    ambient: Alphabet,
    sub_alphabet: Option<Alphabet>,
    arcs: Vec<RawArc>,
    next_vertex: usize,
}

impl Builder {
    fn new(ambient: Alphabet, sub_alphabet: Option<Alphabet>) -> Self {
        Builder { ambient, sub_alphabet, arcs: Vec::new(), next_vertex: 1 }
    }

    fn decoration_identity(&self) -> FreeWord {
        match &self.sub_alphabet {
            Some(a) => a.identity(),
            None => self.ambient.identity(),
        }
    }

    /// One loop at the basepoint reading the generator word; the subgroup
    /// letter sits on the final edge.
    fn add_petal(&mut self, index: usize, word: &FreeWord) {
        let letters = word.letters();
        if letters.is_empty() {
            return;
        }
        let sub = self.sub_alphabet.as_ref().expect("nonempty generator list");
        let n = letters.len();
        let mut prev = 0usize;
        for (i, (g, inverted)) in letters.iter().copied().enumerate() {
            let next = if i + 1 == n {
                0
            } else {
                let v = self.next_vertex;
                self.next_vertex += 1;
                v
            };
            // Decoration of the stored (label-positive) arc: the subgroup
            // letter on the last edge, oriented with the traversal.
            let decoration = if i + 1 == n {
                let w = sub.generator(index);
                if inverted {
                    w.invert()
                } else {
                    w
                }
            } else {
                self.decoration_identity()
            };
            let (src, dst) = if inverted { (next, prev) } else { (prev, next) };
            self.arcs.push(RawArc { src, dst, gen: g, decoration, alive: true });
            prev = next;
        }
    }

    /// Repeatedly identify edge pairs sharing a label and a source (or a
    /// target). Each fold removes one arc, so this terminates. When the two
    /// far endpoints differ they are merged, and decorations of all arcs at
    /// the absorbed vertex are spliced through the label-trivial connector
    /// `e₁^→ e₂^←` so that decoration products along loops are preserved.
    fn fold(&mut self) {
        while let Some((keep, kill, same_src)) = self.find_fold() {
            let (v1, v2) = if same_src {
                (self.arcs[keep].dst, self.arcs[kill].dst)
            } else {
                (self.arcs[keep].src, self.arcs[kill].src)
            };
            if v1 == v2 {
                self.arcs[kill].alive = false;
                continue;
            }
            // Keep the basepoint alive as vertex 0.
            let (keep, kill, v1, v2) = if v2 == 0 {
                (kill, keep, v2, v1)
            } else {
                (keep, kill, v1, v2)
            };
            let connector = if same_src {
                // connector v1 -> v2 reads e_keep backwards then e_kill.
                self.arcs[keep].decoration.invert().mul_unchecked(&self.arcs[kill].decoration)
            } else {
                self.arcs[keep].decoration.mul_unchecked(&self.arcs[kill].decoration.invert())
            };
            let connector_inv = connector.invert();
            self.arcs[kill].alive = false;
            for idx in 0..self.arcs.len() {
                if !self.arcs[idx].alive {
                    continue;
                }
                if self.arcs[idx].src == v2 {
                    self.arcs[idx].decoration =
                        connector.mul_unchecked(&self.arcs[idx].decoration);
                    self.arcs[idx].src = v1;
                }
                if self.arcs[idx].dst == v2 {
                    self.arcs[idx].decoration =
                        self.arcs[idx].decoration.mul_unchecked(&connector_inv);
                    self.arcs[idx].dst = v1;
                }
            }
        }
    }

    fn find_fold(&self) -> Option<(usize, usize, bool)> {
        for i in 0..self.arcs.len() {
            if !self.arcs[i].alive {
                continue;
            }
            for j in (i + 1)..self.arcs.len() {
                if !self.arcs[j].alive || self.arcs[i].gen != self.arcs[j].gen {
                    continue;
                }
                if self.arcs[i].src == self.arcs[j].src {
                    return Some((i, j, true));
                }
                if self.arcs[i].dst == self.arcs[j].dst {
                    return Some((i, j, false));
                }
            }
        }
        None
    }

    /// Remove degree-one vertices other than the basepoint.
    fn prune(&mut self) {
        loop {
            let mut degree: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
            for a in self.arcs.iter().filter(|a| a.alive) {
                *degree.entry(a.src).or_default() += 1;
                *degree.entry(a.dst).or_default() += 1;
            }
            let Some((&hair, _)) = degree.iter().find(|&(&v, &d)| v != 0 && d == 1) else {
                break;
            };
            for a in self.arcs.iter_mut() {
                if a.alive && (a.src == hair || a.dst == hair) {
                    a.alive = false;
                }
            }
        }
    }

    /// Renumber vertices breadth-first from the basepoint with deterministic
    /// edge order (generator index, outgoing before incoming), mark the
    /// spanning tree, and normalize decorations so tree edges are trivial.
    fn finish(self) -> SubgroupGraph {
        let alive: Vec<&RawArc> = self.arcs.iter().filter(|a| a.alive).collect();
        let k = self.ambient.size();

        let mut out_raw: std::collections::HashMap<(usize, usize), usize> = Default::default();
        let mut inn_raw: std::collections::HashMap<(usize, usize), usize> = Default::default();
        for (idx, a) in alive.iter().enumerate() {
            let dup_out = out_raw.insert((a.src, a.gen), idx);
            let dup_inn = inn_raw.insert((a.dst, a.gen), idx);
            debug_assert!(dup_out.is_none() && dup_inn.is_none(), "graph must be folded");
        }

        // BFS numbering and spanning tree.
        let mut number: std::collections::HashMap<usize, usize> = Default::default();
        number.insert(0, 0);
        let mut order = vec![0usize];
        let mut tree: Vec<bool> = vec![false; alive.len()];
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for g in 0..k {
                let neighbors = [
                    out_raw.get(&(v, g)).map(|&idx| (idx, alive[idx].dst)),
                    inn_raw.get(&(v, g)).map(|&idx| (idx, alive[idx].src)),
                ];
                for (idx, w) in neighbors.into_iter().flatten() {
                    if let std::collections::hash_map::Entry::Vacant(slot) = number.entry(w) {
                        slot.insert(order.len());
                        order.push(w);
                        tree[idx] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        debug_assert_eq!(number.len(), {
            let mut vs: Vec<usize> = alive.iter().flat_map(|a| [a.src, a.dst]).collect();
            vs.push(0);
            vs.sort_unstable();
            vs.dedup();
            vs.len()
        }, "folded core graph must be connected");

        // Vertex potentials along the tree: tau[v] = decoration of the tree
        // path from the basepoint to v.
        let identity = self.decoration_identity();
        let mut tau: Vec<Option<FreeWord>> = vec![None; order.len()];
        tau[0] = Some(identity.clone());
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(v_new) = queue.pop_front() {
            let v_old = order[v_new];
            let tau_v = tau[v_new].clone().expect("visited in BFS order");
            for g in 0..k {
                if let Some(&idx) = out_raw.get(&(v_old, g)) {
                    if tree[idx] {
                        let w_new = number[&alive[idx].dst];
                        if tau[w_new].is_none() {
                            tau[w_new] = Some(tau_v.mul_unchecked(&alive[idx].decoration));
                            queue.push_back(w_new);
                        }
                    }
                }
                if let Some(&idx) = inn_raw.get(&(v_old, g)) {
                    if tree[idx] {
                        let w_new = number[&alive[idx].src];
                        if tau[w_new].is_none() {
                            tau[w_new] = Some(tau_v.mul_unchecked(&alive[idx].decoration.invert()));
                            queue.push_back(w_new);
                        }
                    }
                }
            }
        }

        // Gauge transform: dec'(a) = tau(src) · dec(a) · tau(dst)⁻¹ leaves
        // loop products unchanged and kills the tree decorations.
        let mut arcs: Vec<Arc> = alive
            .iter()
            .enumerate()
            .map(|(idx, a)| {
                let src = number[&a.src];
                let dst = number[&a.dst];
                let t_src = tau[src].as_ref().expect("connected").clone();
                let t_dst = tau[dst].as_ref().expect("connected");
                let decoration = t_src.mul_unchecked(&a.decoration).mul_unchecked(&t_dst.invert());
                debug_assert!(!tree[idx] || decoration.is_identity());
                Arc { src, dst, gen: a.gen, decoration, in_tree: tree[idx] }
            })
            .collect();
        arcs.sort_by_key(|a| (a.src, a.gen, a.dst));

        let vertices = order.len();
        let mut out = vec![vec![None; k]; vertices];
        let mut inn = vec![vec![None; k]; vertices];
        for (idx, a) in arcs.iter().enumerate() {
            out[a.src][a.gen] = Some(idx);
            inn[a.dst][a.gen] = Some(idx);
        }
        SubgroupGraph {
            ambient: self.ambient,
            sub_alphabet: self.sub_alphabet,
            vertices,
            arcs,
            out,
            inn,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn graph(gens: &[&str]) -> SubgroupGraph {
        let ab = ab();
        let words: Vec<FreeWord> = gens.iter().map(|g| ab.parse(g).unwrap()).collect();
        SubgroupGraph::build(&ab, &words).unwrap()
    }

    #[test]
    fn whole_group() {
        let g = graph(&["a", "b"]);
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.rank(), 2);
    }

    #[test]
    fn powers_of_a_fold_together() {
        let g = graph(&["a^2", "a^3"]);
        assert_eq!(g.rank(), 1);
        assert_eq!(g.vertex_count(), 1);
        assert!(g.contains(&ab().parse("a").unwrap()));
    }

    #[test]
    fn ab_ba_subgroup() {
        let g = graph(&["a b", "b a"]);
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.rank(), 2);
    }

    #[test]
    fn membership_examples() {
        let g = graph(&["a^2", "b"]);
        let ab = ab();
        assert!(g.contains(&ab.parse("a^2").unwrap()));
        assert!(!g.contains(&ab.parse("a").unwrap()));
        assert!(g.contains(&ab.parse("a^2 b").unwrap()));
        assert!(g.contains(&ab.identity()));
    }

    #[test]
    fn express_examples() {
        let ab = ab();
        let g = graph(&["a^2", "b"]);
        let expr = g.express(&ab.parse("a^2 b").unwrap()).unwrap();
        assert_eq!(expr.to_string(), "g1 g2");
        assert!(g.express(&ab.identity()).unwrap().is_identity());
        assert!(matches!(g.express(&ab.parse("a").unwrap()), Err(SubgroupError::NotAMember)));

        // image of the rewritten one-relator endomorphism: <b, a^2> with
        // subgroup generators named by the base alphabet
        let gens = [ab.parse("b").unwrap(), ab.parse("a^2").unwrap()];
        let named = SubgroupGraph::build_named(&ab, &gens, ab.clone()).unwrap();
        let expr = named.express(&ab.parse("b").unwrap()).unwrap();
        assert_eq!(expr.to_string(), "a");
    }

    #[test]
    fn express_roundtrip_on_members() {
        let ab = ab();
        let gens = [ab.parse("a b").unwrap(), ab.parse("b a").unwrap(), ab.parse("a^2").unwrap()];
        let g = SubgroupGraph::build(&ab, &gens).unwrap();
        let member = gens[0]
            .multiply(&gens[2].invert())
            .unwrap()
            .multiply(&gens[1])
            .unwrap()
            .multiply(&gens[0])
            .unwrap();
        let expr = g.express(&member).unwrap();
        let sub = g.sub_alphabet().unwrap();
        assert_eq!(expr.alphabet(), sub);
        let back = expr.substitute(&ab, &gens).unwrap();
        assert_eq!(back, member);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(graph(&["a", "b"]).rank(), 2);
        assert_eq!(graph(&["a^2", "a^3"]).rank(), 1);
        assert_eq!(graph(&["a b", "b a"]).rank(), 2);
        // trivial subgroup
        let empty = SubgroupGraph::build(&ab(), &[]).unwrap();
        assert_eq!(empty.rank(), 0);
        assert!(empty.contains(&ab().identity()));
        assert!(!empty.contains(&ab().parse("a").unwrap()));
    }

    #[test]
    fn injectivity() {
        let ab = ab();
        let phi = Endomorphism::new(
            ab.clone(),
            vec![ab.parse("a b").unwrap(), ab.parse("b a").unwrap()],
        )
        .unwrap();
        assert!(is_injective(&phi));
        let comm = Endomorphism::new(
            ab.clone(),
            vec![ab.parse("a").unwrap(), ab.parse_extended("[a,b]").unwrap()],
        )
        .unwrap();
        assert!(is_injective(&comm));
        let collapse =
            Endomorphism::new(ab.clone(), vec![ab.parse("a").unwrap(), ab.parse("a").unwrap()])
                .unwrap();
        assert!(!is_injective(&collapse));
    }

    fn gen_words() -> impl Strategy<Value = Vec<FreeWord>> {
        prop::collection::vec(prop::collection::vec((0usize..2, prop::bool::ANY), 1..5), 1..4)
            .prop_map(|gens| {
                gens.into_iter()
                    .map(|ls| ab().from_letters(ls))
                    .filter(|w| !w.is_identity())
                    .collect()
            })
            .prop_filter("need at least one nontrivial generator", |v: &Vec<FreeWord>| !v.is_empty())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn members_are_recognized_and_expressed(
            gens in gen_words(),
            picks in prop::collection::vec((0usize..4, prop::bool::ANY), 0..6),
        ) {
            let ab = ab();
            let g = SubgroupGraph::build(&ab, &gens).unwrap();
            let mut member = ab.identity();
            for (i, inv) in picks {
                let gen = &gens[i % gens.len()];
                let factor = if inv { gen.invert() } else { gen.clone() };
                member = member.multiply(&factor).unwrap();
            }
            prop_assert!(g.contains(&member));
            let expr = g.express(&member).unwrap();
            prop_assert_eq!(expr.substitute(&ab, &gens).unwrap(), member);
        }

        #[test]
        fn folding_is_order_independent(gens in gen_words(), seed in 0usize..24) {
            let ab = ab();
            let g1 = SubgroupGraph::build(&ab, &gens).unwrap();
            let mut shuffled = gens.clone();
            // deterministic pseudo-shuffle
            if shuffled.len() > 1 {
                let k = seed % shuffled.len();
                shuffled.rotate_left(k);
                if seed % 2 == 0 {
                    shuffled.reverse();
                }
            }
            let g2 = SubgroupGraph::build(&ab, &shuffled).unwrap();
            prop_assert_eq!(g1.signature(), g2.signature());
        }

        #[test]
        fn basis_gives_full_rank(k in 1usize..4) {
            let names: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
            let alphabet = Alphabet::new(names).unwrap();
            let gens: Vec<FreeWord> = (0..k).map(|i| alphabet.generator(i)).collect();
            let g = SubgroupGraph::build(&alphabet, &gens).unwrap();
            prop_assert_eq!(g.rank(), k);
        }

        #[test]
        fn expressing_images_inverts_injective_endomorphisms(
            images in gen_words().prop_filter("need two images", |v| v.len() >= 2),
            ls in prop::collection::vec((0usize..2, prop::bool::ANY), 0..8),
        ) {
            let ab = ab();
            let phi = Endomorphism::new(ab.clone(), images[..2].to_vec()).unwrap();
            prop_assume!(is_injective(&phi));
            // subgroup generators named by the domain alphabet, so that
            // express computes preimages under phi
            let graph = SubgroupGraph::build_named(&ab, phi.images(), ab.clone()).unwrap();
            let w = ab.from_letters(ls);
            let image = phi.apply(&w).unwrap();
            prop_assert!(graph.contains(&image));
            prop_assert_eq!(graph.express(&image).unwrap(), w);
        }
    }
}
