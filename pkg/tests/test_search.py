import itertools

import networkx as nx
import pytest

from mvbound.errors import DomainError
from mvbound.family import canonical_family, verify_mv
from mvbound.search import Budget, brute_force_mv, compatibility_graph, degeneracy_order, max_clique

# exact values from the clique search, cross-checked against networkx below
FROZEN = {(2, 1): 1, (2, 2): 3, (3, 1): 1, (3, 2): 4, (4, 1): 1, (2, 3): 3, (4, 2): 6, (3, 3): 6}


def nx_mv(m, n):
    """Independent oracle: networkx maximum clique over the compatibility graph built here."""
    vecs = list(itertools.product(range(m), repeat=n))

    def ip(a, b):
        return sum(x * y for x, y in zip(a, b)) % m

    verts = [(u, v) for u in vecs for v in vecs if ip(u, v) == 0]
    G = nx.Graph()
    G.add_nodes_from(range(len(verts)))
    for a, b in itertools.combinations(range(len(verts)), 2):
        (u1, v1), (u2, v2) = verts[a], verts[b]
        if ip(u1, v2) and ip(u2, v1):
            G.add_edge(a, b)
    clique, _ = nx.max_weight_clique(G, weight=None)
    return len(clique)


@pytest.mark.parametrize("mn", [(2, 1), (2, 2), (3, 1), (3, 2), (4, 1), (2, 3)])
def test_matches_networkx(mn):
    res = brute_force_mv(*mn)
    assert res.optimal
    assert res.value == nx_mv(*mn) == FROZEN[mn]


@pytest.mark.parametrize("mn,val", sorted(FROZEN.items()))
def test_frozen_values_and_witness(mn, val):
    res = brute_force_mv(*mn)
    assert res.optimal and res.value == val
    assert res.witness.t == val and res.witness.m == mn[0] and res.witness.n == mn[1]
    assert verify_mv(res.witness)


def test_mv_2_1_is_one():
    assert brute_force_mv(2, 1).value == 1


def test_vertex_counts():
    assert len(compatibility_graph(2, 1).adj) == 3
    assert len(compatibility_graph(3, 2).adj) == 33


@pytest.mark.parametrize("m", [2, 3, 4])
def test_canonical_lower_bound(m):
    assert brute_force_mv(m, 2).value >= canonical_family(m).t == m


def test_monotone_in_n():
    for m in (2, 3):
        vals = [FROZEN[(m, n)] for n in (1, 2, 3)]
        assert vals == sorted(vals)


def test_budget_flag():
    res = brute_force_mv(3, 3, Budget(max_nodes=5))
    assert not res.optimal
    assert 1 <= res.value <= FROZEN[(3, 3)]
    assert verify_mv(res.witness)


def test_oversized_graph_refused():
    with pytest.raises(DomainError):
        compatibility_graph(10, 4)


def test_max_clique_small_graphs():
    # 5-cycle plus a chord 0-2: max clique {0,1,2}
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]
    adj = [0] * 5
    for a, b in edges:
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    res = max_clique(adj)
    assert res.optimal and sorted(res.clique) == [0, 1, 2]
    assert sorted(degeneracy_order(adj)) == list(range(5))
    assert max_clique([]).size == 0
    assert max_clique([0, 0, 0]).size == 1
