import random

import pytest

from colourproofs.encodings import Axiom, PolySystem, _boolean_axioms
from colourproofs.fields import FieldSpec, field_with_kth_root
from colourproofs.graphs import FphpInstance, Graph
from colourproofs.polynomials import Polynomial


@pytest.fixture(scope="session")
def gf2():
    return FieldSpec(2)


@pytest.fixture(scope="session")
def gf7():
    return FieldSpec(7)


@pytest.fixture(scope="session")
def gf4():
    return field_with_kth_root(2, 3)


@pytest.fixture(scope="session")
def k43():
    """The smallest unsatisfiable left-regular degree-3 instance."""
    return FphpInstance.build([[0, 1, 2]] * 4, 3)


def random_polynomial(field, cap, variables, rng, max_terms=5, max_deg_per_var=2):
    items = []
    for _ in range(rng.randint(0, max_terms)):
        mono = []
        for v in variables:
            if rng.random() < 0.4:
                mono.append((v, rng.randint(1, max_deg_per_var)))
        coeff = field.from_int(rng.randrange(field.order))
        items.append((tuple(mono), coeff))
    return Polynomial.from_terms(field, cap, items)


def tiny_system(field, polys, n_vars, with_boolean=True):
    axioms = [Axiom("base", p, max(p.degree, 0)) for p in polys]
    if with_boolean:
        axioms += _boolean_axioms(field, n_vars)
    return PolySystem(field, "boolean", axioms, n_vars, {})


def atlas_graphs(max_vertices):
    """All non-isomorphic graphs with at most max_vertices vertices.

    Satisfiability of every encoding is isomorphism-invariant, so checking
    one representative per class covers all small graphs.
    """
    import networkx as nx

    out = []
    for g in nx.graph_atlas_g():
        if g.number_of_nodes() > max_vertices:
            break
        if g.number_of_nodes() == 0:
            continue
        nodes = sorted(g.nodes())
        relabel = {v: i for i, v in enumerate(nodes)}
        out.append(Graph.build(len(nodes), [(relabel[u], relabel[v]) for u, v in g.edges()]))
    return out
