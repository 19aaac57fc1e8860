"""Tropical median consensus of equidistant trees.

The input trees become ultrametric sites in R^C(n,2); the consensus is the
ordinary average of the tropical vertices of their Fermat-Weber polytrope.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd
from typing import Callable, Optional, Sequence

from .fw import Polytrope, contains, dimension, fw_polytrope, tropical_vertices
from .rational import format_rational
from .tropical import TropicalPoint, d_asym
from .trees import (
    PhyloTree,
    TaxaMismatch,
    TreeValidationError,
    Ultrametric,
    clusters,
    emit_newick,
    is_ultrametric,
    make_equidistant,
    tree_to_ultrametric,
    ultrametric_to_tree,
)


@dataclass(frozen=True)
class ConsensusResult:
    tree: PhyloTree
    ultrametric: Ultrametric
    fw_dimension: int
    tropical_vertex_count: int
    p_star: Fraction
    polytrope: Polytrope = field(repr=False)
    vertices: tuple[TropicalPoint, ...] = field(repr=False)
    distances: tuple[Fraction, ...] = ()

    def to_json(self) -> dict:
        return {
            "newick": emit_newick(self.tree),
            "taxa": list(self.ultrametric.taxa),
            "ultrametric": [format_rational(x) for x in self.ultrametric.d],
            "fw_dimension": self.fw_dimension,
            "tropical_vertex_count": self.tropical_vertex_count,
            "p_star": format_rational(self.p_star),
            "distances": [format_rational(x) for x in self.distances],
        }


def dimension_bound(m: int, n_taxa: int) -> int:
    """Upper bound on the Fermat-Weber set dimension for m equidistant trees."""
    return min(n_taxa - 1, gcd(m, comb(n_taxa, 2))) - 1


def _representative(point: Sequence[Fraction], height: Fraction) -> tuple[Fraction, ...]:
    shift = height - max(point)
    return tuple(c + shift for c in point)


def median_of_ultrametrics(inputs: Sequence[Ultrametric], weights: Sequence[int] | None = None) -> ConsensusResult:
    if not inputs:
        raise ValueError("need at least one input")
    taxa = inputs[0].taxa
    for u in inputs[1:]:
        if u.taxa != taxa:
            raise TaxaMismatch(f"taxa {u.taxa} differ from {taxa}")
    if len(taxa) < 3:
        # one pair distance: the torus is a point, every tree shares the topology
        raise ValueError("need at least three taxa")
    sites = [u.d for u in inputs]
    poly = fw_polytrope(sites, weights)
    verts = tropical_vertices(poly)
    k = len(verts)
    mean = tuple(sum(col, Fraction(0)) / k for col in zip(*verts))
    # representative: largest distance equals the largest input distance
    height = max(max(u.d) for u in inputs)
    result = Ultrametric(taxa, _representative(mean, height))
    ok, witness = is_ultrametric(result)
    if not ok:
        raise AssertionError(f"median is not an ultrametric, violating {witness}")
    return ConsensusResult(
        tree=ultrametric_to_tree(result),
        ultrametric=result,
        fw_dimension=dimension(poly),
        tropical_vertex_count=k,
        p_star=poly.optimal_value,
        polytrope=poly,
        vertices=tuple(verts),
        distances=tuple(d_asym(u.d, result.d) for u in inputs),
    )


def tropical_median(
    trees: Sequence[PhyloTree],
    weights: Sequence[int] | None = None,
    adjust_equidistant: bool = False,
) -> ConsensusResult:
    """Tropical median consensus tree of ``trees`` (with optional integer multiplicities).

    The returned ultrametric is scaled so that its largest entry equals the
    largest leaf distance among the inputs.
    """
    if not trees:
        raise ValueError("need at least one tree")
    taxa = trees[0].taxa
    prepared = []
    for idx, tree in enumerate(trees):
        if tree.taxa != taxa:
            raise TaxaMismatch(f"tree {idx} has taxa {tree.taxa}, expected {taxa}")
        if not tree.is_equidistant():
            if not adjust_equidistant:
                raise TreeValidationError(
                    f"tree {idx} is not equidistant (leaves {tree.non_equidistant_leaves()}); "
                    "pass adjust_equidistant to extend leaf edges"
                )
            tree = make_equidistant(tree)
        prepared.append(tree_to_ultrametric(tree))
    return median_of_ultrametrics(prepared, weights)


def vertex_topologies(result: ConsensusResult) -> set[frozenset]:
    """Clade sets of every tropical vertex.

    Vertices on the boundary of the Fermat-Weber set may sit on a wall of tree
    space, where an interior edge has length zero; their clade sets are then
    subsets of the clade set shared by the relative interior.
    """
    taxa = result.ultrametric.taxa
    return {clusters(Ultrametric(taxa, v)) for v in result.vertices}


def interior_topology(result: ConsensusResult, rng: Optional[random.Random] = None, samples: int = 5) -> set[frozenset]:
    """Clade sets at the median and at random strictly positive mixtures of the vertices.

    Every facet not pinned to equality is strict at some tropical vertex, so
    these points lie in the relative interior of the Fermat-Weber set and the
    returned set has one element when the interior shares one topology.
    """
    rng = rng or random.Random(0)
    taxa = result.ultrametric.taxa
    out = {clusters(result.ultrametric)}
    for _ in range(samples):
        coeffs = [Fraction(rng.randint(1, 9)) for _ in result.vertices]
        total = sum(coeffs)
        point = tuple(sum(c * x for c, x in zip(coeffs, col)) / total for col in zip(*result.vertices))
        out.add(clusters(Ultrametric(taxa, point)))
    return out


def vertices_refine_into(result: ConsensusResult) -> bool:
    """Whether every vertex topology is a contraction of the median's topology."""
    top = clusters(result.ultrametric)
    return all(clades <= top for clades in vertex_topologies(result))


@dataclass
class RegularityReport:
    unanimity: list = field(default_factory=list)
    anonymity: list = field(default_factory=list)
    neutrality: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.unanimity or self.anonymity or self.neutrality)


def verify_regularity(
    trees: Sequence[PhyloTree],
    rng: Optional[random.Random] = None,
    copies: int = 3,
    shuffles: int = 3,
    relabelings: int = 3,
    method: Callable[[Sequence[PhyloTree]], PhyloTree] | None = None,
) -> RegularityReport:
    """Run unanimity, anonymity and neutrality checks of a consensus method on ``trees``.

    Each violation is recorded with the inputs that produced it.
    """
    rng = rng or random.Random(0)
    method = method or (lambda ts: tropical_median(ts).tree)
    report = RegularityReport()
    base = method(trees)

    for tree in trees:
        got = method([tree] * copies)
        if got != tree:
            report.unanimity.append((emit_newick(tree), emit_newick(got)))

    for _ in range(shuffles):
        order = list(trees)
        rng.shuffle(order)
        got = method(order)
        if got != base:
            report.anonymity.append(([emit_newick(t) for t in order], emit_newick(got)))

    taxa = list(trees[0].taxa)
    for _ in range(relabelings):
        image = taxa[:]
        rng.shuffle(image)
        mapping = dict(zip(taxa, image))
        got = method([t.relabel(mapping) for t in trees])
        want = base.relabel(mapping)
        if got != want:
            report.neutrality.append((mapping, emit_newick(got), emit_newick(want)))
    return report


def check_membership(result: ConsensusResult) -> bool:
    return contains(result.polytrope, result.ultrametric.d)
