"""Rooted metric trees, Newick I/O and ultrametrics.

Heights follow the convention that leaves of an equidistant tree sit at
height 0 and an internal node sits at half the distance between any two
leaves it separates. Ultrametric vectors are indexed by the pairs ``(i, j)``,
``i < j``, of the sorted taxa in lexicographic order, so vectors built from
trees on the same taxa are directly comparable as sites.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, NamedTuple, Optional, Sequence

from .rational import format_rational, to_rational, to_vector

RESERVED = set("(),:;")


class NewickError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class TreeValidationError(ValueError):
    pass


class TaxaMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Node:
    label: Optional[str] = None
    length: Optional[Fraction] = None
    children: tuple["Node", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> list[str]:
        if self.is_leaf:
            return [self.label]
        return [leaf for child in self.children for leaf in child.leaves()]

    def min_label(self) -> str:
        return min(self.leaves())

    def sort_key(self) -> tuple[bool, str]:
        """Leaves first, then subtrees, each group by smallest leaf label."""
        return (not self.is_leaf, self.min_label())


@dataclass(frozen=True, eq=False)
class PhyloTree:
    """A rooted tree with labeled leaves and exact edge lengths.

    Two trees compare equal when they agree up to the order of children.
    """

    root: Node

    def __eq__(self, other):
        if not isinstance(other, PhyloTree):
            return NotImplemented
        return _canonical(self.root) == _canonical(other.root)

    def __hash__(self):
        return hash(_canonical(self.root))

    def __str__(self):
        return emit_newick(self)

    @property
    def taxa(self) -> tuple[str, ...]:
        return tuple(sorted(self.root.leaves()))

    def leaf_depths(self) -> dict[str, Fraction]:
        depths = {}

        def walk(node, depth):
            if node.is_leaf:
                depths[node.label] = depth
            for child in node.children:
                walk(child, depth + child.length)

        walk(self.root, Fraction(0))
        return depths

    def root_height(self) -> Fraction:
        return max(self.leaf_depths().values())

    def is_equidistant(self) -> bool:
        return len(set(self.leaf_depths().values())) == 1

    def non_equidistant_leaves(self) -> list[str]:
        depths = self.leaf_depths()
        top = max(depths.values())
        return sorted(label for label, d in depths.items() if d != top)

    def relabel(self, mapping: dict[str, str]) -> "PhyloTree":
        def walk(node):
            label = mapping.get(node.label, node.label) if node.is_leaf else node.label
            return Node(label, node.length, tuple(walk(c) for c in node.children))

        return PhyloTree(walk(self.root))


def _canonical(node: Node):
    kids = sorted((_canonical(c) for c in node.children), key=lambda k: k[0])
    low = node.label if node.is_leaf else kids[0][0]
    return (low, node.label, node.length, tuple(kids))


# ---------------------------------------------------------------- Newick


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def token(self, stop: set[str]) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in stop:
            self.pos += 1
        return self.text[start : self.pos].strip()

    def subtree(self, is_root: bool) -> Node:
        start = self.pos
        children: tuple[Node, ...] = ()
        if self.peek() == "(":
            self.pos += 1
            kids = [self.subtree(False)]
            while self.peek() == ",":
                self.pos += 1
                kids.append(self.subtree(False))
            if self.peek() != ")":
                raise NewickError("expected ',' or ')'", self.pos)
            self.pos += 1
            children = tuple(kids)
        label = self.token(RESERVED) or None
        if not children and label is None:
            raise NewickError("leaf without a label", start)
        length = None
        if self.peek() == ":":
            self.pos += 1
            at = self.pos
            literal = self.token(set("(),;"))
            try:
                length = to_rational(literal)
            except (ValueError, TypeError):
                raise NewickError(f"bad branch length {literal!r}", at) from None
            if length < 0:
                raise NewickError(f"negative branch length {literal!r}", at)
        elif not is_root:
            raise NewickError(f"missing branch length for {label or 'internal node'}", self.pos)
        return Node(label, None if is_root else length, children)


def parse_newick(text: str) -> PhyloTree:
    """Parse one Newick string with a length on every non-root node.

    Lengths may be decimal literals or ``p/q`` and are kept exact. A length on
    the root is accepted and discarded; the trailing ``;`` is optional.
    """
    parser = _Parser(text)
    if parser.peek() == "":
        raise NewickError("empty Newick string", 0)
    root = parser.subtree(True)
    if parser.peek() == ";":
        parser.pos += 1
    if parser.peek() != "":
        raise NewickError("unexpected trailing text", parser.pos)
    labels = root.leaves()
    dupes = sorted({lab for lab in labels if labels.count(lab) > 1})
    if dupes:
        raise NewickError(f"duplicate leaf labels {dupes}")
    return PhyloTree(root)


def emit_newick(tree: PhyloTree) -> str:
    """Canonical Newick string: leaf children first, then subtrees, each ordered by smallest leaf label."""

    def walk(node: Node, is_root: bool) -> str:
        if node.is_leaf:
            text = node.label
        else:
            kids = sorted(node.children, key=Node.sort_key)
            text = "(" + ",".join(walk(c, False) for c in kids) + ")" + (node.label or "")
        if not is_root:
            text += ":" + format_rational(node.length)
        return text

    return walk(tree.root, True) + ";"


# ---------------------------------------------------------------- ultrametrics


def pair_index(n: int, i: int, j: int) -> int:
    """Position of the pair ``{i, j}`` in the lexicographic order of pairs of ``range(n)``."""
    if i > j:
        i, j = j, i
    if i == j:
        raise ValueError("a pair needs two distinct indices")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def num_taxa(length: int) -> int:
    n = 2
    while n * (n - 1) // 2 < length:
        n += 1
    if n * (n - 1) // 2 != length:
        raise ValueError(f"{length} is not a binomial coefficient C(n, 2)")
    return n


@dataclass(frozen=True)
class Ultrametric:
    taxa: tuple[str, ...]
    d: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "taxa", tuple(self.taxa))
        object.__setattr__(self, "d", to_vector(self.d))
        if list(self.taxa) != sorted(set(self.taxa)):
            raise ValueError("taxa must be sorted and unique")
        n = len(self.taxa)
        if len(self.d) != n * (n - 1) // 2:
            raise ValueError(f"{len(self.d)} distances for {n} taxa")

    @classmethod
    def from_dict(cls, distances: dict[tuple[str, str], object]) -> "Ultrametric":
        taxa = sorted({t for pair in distances for t in pair})
        d = []
        for a, b in combinations(taxa, 2):
            value = distances.get((a, b), distances.get((b, a)))
            if value is None:
                raise ValueError(f"missing distance for {a}|{b}")
            d.append(to_rational(value))
        return cls(tuple(taxa), tuple(d))

    def __getitem__(self, pair: tuple[str, str]) -> Fraction:
        a, b = pair
        idx = {t: k for k, t in enumerate(self.taxa)}
        return self.d[pair_index(len(self.taxa), idx[a], idx[b])]

    def pair_labels(self) -> list[str]:
        return [f"{a}|{b}" for a, b in combinations(self.taxa, 2)]

    def shifted(self, c) -> "Ultrametric":
        c = to_rational(c)
        return Ultrametric(self.taxa, tuple(x + c for x in self.d))

    def relabel(self, mapping: dict[str, str]) -> "Ultrametric":
        return Ultrametric.from_dict({(mapping[a], mapping[b]): self[a, b] for a, b in combinations(self.taxa, 2)})


def tree_to_ultrametric(tree: PhyloTree) -> Ultrametric:
    """Leaf-pair distances ``2 * height(lca)`` of an equidistant tree."""
    bad = tree.non_equidistant_leaves()
    if bad:
        raise TreeValidationError(f"tree is not equidistant; leaves closer to the root than the rest: {bad}")
    taxa = tree.taxa
    n = len(taxa)
    idx = {t: k for k, t in enumerate(taxa)}
    d = [Fraction(0)] * (n * (n - 1) // 2)
    top = tree.root_height()

    def walk(node: Node, depth: Fraction) -> list[str]:
        if node.is_leaf:
            return [node.label]
        groups = [walk(c, depth + c.length) for c in node.children]
        dist = 2 * (top - depth)
        for g1, g2 in combinations(groups, 2):
            for a in g1:
                for b in g2:
                    d[pair_index(n, idx[a], idx[b])] = dist
        return [leaf for g in groups for leaf in g]

    walk(tree.root, Fraction(0))
    return Ultrametric(taxa, tuple(d))


def is_ultrametric(d, taxa: Sequence[str] | None = None) -> tuple[bool, Optional[tuple]]:
    """Check nonnegativity and ``d_ik <= max(d_ij, d_jk)`` on every triple.

    Returns ``(ok, witness)``; the witness is a violating triple (labels when
    available, else indices) or a single pair with a negative distance.
    """
    if isinstance(d, Ultrametric):
        taxa, d = d.taxa, d.d
    d = to_vector(d)
    n = num_taxa(len(d))
    names = list(taxa) if taxa is not None else list(range(n))
    for i, j in combinations(range(n), 2):
        if d[pair_index(n, i, j)] < 0:
            return False, (names[i], names[j])
    for i, j, k in combinations(range(n), 3):
        a, b, c = d[pair_index(n, i, j)], d[pair_index(n, i, k)], d[pair_index(n, j, k)]
        top = max(a, b, c)
        # the largest of the three distances must occur at least twice
        if (a == top) + (b == top) + (c == top) < 2:
            return False, (names[i], names[j], names[k])
    return True, None


def _single_linkage(n: int, d: Sequence[Fraction]):
    """Merge events ``(level, [clusters merged])`` in increasing level order."""
    parent = list(range(n))
    members = {k: frozenset([k]) for k in range(n)}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    events = []
    for level in sorted(set(d)):
        for i, j in combinations(range(n), 2):
            if d[pair_index(n, i, j)] == level:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
        # collect previous clusters that now share a root
        merged: dict[int, list[frozenset]] = {}
        for root_old, cluster in members.items():
            merged.setdefault(find(root_old), []).append(cluster)
        new_members = {}
        for root, clusters in merged.items():
            if len(clusters) > 1:
                events.append((level, clusters))
            new_members[root] = frozenset().union(*clusters)
        members = new_members
    return events


def ultrametric_to_tree(u: Ultrametric) -> PhyloTree:
    """Equidistant tree realizing ``u`` by single-linkage agglomeration.

    Clusters at equal distance are merged into one multifurcating node, so
    the output has no zero-length interior edges.
    """
    ok, witness = is_ultrametric(u)
    if not ok:
        raise TreeValidationError(f"not an ultrametric; violating taxa {witness}")
    n = len(u.taxa)
    if n == 1:
        return PhyloTree(Node(u.taxa[0]))
    nodes: dict[frozenset, tuple[Node, Fraction]] = {
        frozenset([k]): (Node(u.taxa[k], Fraction(0)), Fraction(0)) for k in range(n)
    }
    for level, clusters in _single_linkage(n, u.d):
        height = level / 2
        kids = []
        for cl in clusters:
            node, h = nodes.pop(cl)
            kids.append(Node(node.label, height - h, node.children))
        kids.sort(key=Node.sort_key)
        nodes[frozenset().union(*clusters)] = (Node(None, Fraction(0), tuple(kids)), height)
    (root, _), = nodes.values()
    return PhyloTree(Node(None, None, root.children))


def clusters(u: Ultrametric) -> frozenset[frozenset[str]]:
    """Nontrivial clades (size between 2 and n-1) of the tree realizing ``u``.

    Only the order of the distances matters, so any representative modulo
    adding a constant gives the same answer.
    """
    n = len(u.taxa)
    out = set()
    for _, merged in _single_linkage(n, u.d):
        cl = frozenset().union(*merged)
        if 1 < len(cl) < n:
            out.add(frozenset(u.taxa[k] for k in cl))
    return frozenset(out)


def make_equidistant(tree: PhyloTree) -> PhyloTree:
    """Lengthen leaf edges so every leaf sits at the maximal root distance."""
    top = tree.root_height()

    def walk(node: Node, depth: Fraction) -> Node:
        if node.is_leaf:
            return Node(node.label, node.length + (top - depth), ())
        kids = tuple(walk(c, depth + c.length) for c in node.children)
        return Node(node.label, node.length, kids)

    if tree.root.is_leaf:
        return tree
    kids = tuple(walk(c, c.length) for c in tree.root.children)
    return PhyloTree(Node(tree.root.label, None, kids))


# ---------------------------------------------------------------- triplets and consensus baselines


class RootedTriplet(NamedTuple):
    """``a b | out``: the pair ``{a, b}`` is strictly closer than either is to ``out``."""

    a: str
    b: str
    out: str

    def __str__(self):
        return f"{self.a},{self.b}|{self.out}"


def rooted_triplets(u: Ultrametric) -> frozenset[RootedTriplet]:
    taxa = u.taxa
    n = len(taxa)
    out = set()
    for i, j, k in combinations(range(n), 3):
        dij, dik, djk = u.d[pair_index(n, i, j)], u.d[pair_index(n, i, k)], u.d[pair_index(n, j, k)]
        if dij < dik and dij < djk:
            out.add(RootedTriplet(taxa[i], taxa[j], taxa[k]))
        elif dik < dij and dik < djk:
            out.add(RootedTriplet(taxa[i], taxa[k], taxa[j]))
        elif djk < dij and djk < dik:
            out.add(RootedTriplet(taxa[j], taxa[k], taxa[i]))
    return frozenset(out)


def _same_taxa(items: Sequence[Ultrametric]) -> tuple[str, ...]:
    if not items:
        raise ValueError("need at least one ultrametric")
    taxa = items[0].taxa
    for u in items[1:]:
        if u.taxa != taxa:
            raise TaxaMismatch(f"taxa {u.taxa} differ from {taxa}")
    return taxa


@dataclass(frozen=True)
class ParetoReport:
    pareto: bool
    copareto: bool
    missing: frozenset[RootedTriplet] = field(default_factory=frozenset)
    spurious: frozenset[RootedTriplet] = field(default_factory=frozenset)


def check_pareto(inputs: Sequence[Ultrametric], out: Ultrametric) -> ParetoReport:
    """Pareto and co-Pareto properties on rooted triplets.

    ``missing`` lists triplets shared by all inputs but absent from ``out``;
    ``spurious`` lists triplets of ``out`` found in no input.
    """
    _same_taxa(list(inputs) + [out])
    sets = [rooted_triplets(u) for u in inputs]
    common = frozenset.intersection(*sets)
    union = frozenset.union(*sets)
    result = rooted_triplets(out)
    missing = common - result
    spurious = result - union
    return ParetoReport(not missing, not spurious, missing, spurious)


def pointwise_max_consensus(inputs: Sequence[Ultrametric], normalize: str = "raw") -> Ultrametric:
    """Coordinatewise maximum of the inputs.

    ``normalize="raw"`` uses the distances as given. ``normalize="H"`` first
    shifts every input to coordinate sum zero, then shifts the maximum back so
    that its largest entry matches the largest input entry.
    """
    taxa = _same_taxa(inputs)
    if normalize == "raw":
        vectors = [u.d for u in inputs]
    elif normalize == "H":
        vectors = []
        for u in inputs:
            mean = sum(u.d, Fraction(0)) / len(u.d)
            vectors.append(tuple(x - mean for x in u.d))
    else:
        raise ValueError(f"unknown normalization {normalize!r}")
    d = tuple(max(col) for col in zip(*vectors))
    if normalize == "H":
        shift = max(max(u.d) for u in inputs) - max(d)
        d = tuple(x + shift for x in d)
    return Ultrametric(taxa, d)


# ---------------------------------------------------------------- random trees


class _Draft:
    __slots__ = ("label", "length", "children")

    def __init__(self, label=None, children=None):
        self.label = label
        self.length = Fraction(0)
        self.children = children or []

    def freeze(self, is_root=False) -> Node:
        return Node(self.label, None if is_root else self.length, tuple(c.freeze() for c in self.children))


def random_equidistant_tree(taxa: Iterable[str], rng: random.Random, max_length: int = 20, denominator: int = 4) -> PhyloTree:
    """Random binary topology by sequential leaf attachment, random edge lengths, then leaf extension.

    Edge lengths are drawn uniformly from ``{1, ..., max_length} / denominator``.
    """
    taxa = list(taxa)
    if len(taxa) < 2:
        raise ValueError("need at least two taxa")
    order = taxa[:]
    rng.shuffle(order)
    root = _Draft(children=[_Draft(order[0]), _Draft(order[1])])
    edges: list[tuple[Optional[_Draft], _Draft]] = [(root, c) for c in root.children]
    for label in order[2:]:
        # choose an existing edge, or the position above the root
        pick = rng.randrange(len(edges) + 1)
        leaf = _Draft(label)
        if pick == len(edges):
            old_root = root
            root = _Draft(children=[old_root, leaf])
            edges.extend([(root, old_root), (root, leaf)])
        else:
            parent, child = edges.pop(pick)
            mid = _Draft(children=[child, leaf])
            parent.children[parent.children.index(child)] = mid
            edges.extend([(parent, mid), (mid, child), (mid, leaf)])
    for _, child in edges:
        child.length = Fraction(rng.randint(1, max_length), denominator)
    return make_equidistant(PhyloTree(root.freeze(is_root=True)))
