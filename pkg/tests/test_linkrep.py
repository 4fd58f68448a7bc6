import json
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from swtori.linkrep import (
    BraidWord,
    Crossing,
    InconsistentEdges,
    LinkDiagram,
    MalformedBraid,
    MalformedPD,
    NonClosedComponent,
    band_sum_borromean,
    borromean,
    braid_closure,
    figure_eight,
    hopf_link,
    linking_matrix,
    parse_braid,
    parse_pd,
    render_pd,
    reverse_component,
    trefoil,
    unknot,
    unlink,
)

TREFOIL_PD = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]"
HOPF_PD = "X[1,3,2,4] X[3,1,4,2]"


def braids(max_strands=4, max_len=8):
    return st.integers(1, max_strands).flatmap(
        lambda n: st.lists(
            st.integers(1, max(n - 1, 1)).flatmap(lambda g: st.sampled_from([g, -g])),
            max_size=max_len if n > 1 else 0,
        ).map(lambda L: BraidWord(n, tuple(L)))
    )


def cycle_count(perm):
    seen, count = set(), 0
    for s in range(len(perm)):
        if s not in seen:
            count += 1
            while s not in seen:
                seen.add(s)
                s = perm[s]
    return count


def relabeled(d: LinkDiagram, rng: random.Random) -> tuple[LinkDiagram, dict[int, int]]:
    """Same diagram with edge labels permuted and crossings shuffled."""
    edges = d.edges
    new = rng.sample(range(1, 3 * len(edges) + 1), len(edges))
    m = dict(zip(edges, new))
    crossings = [Crossing(tuple(m[e] for e in c.edges), c.sign) for c in d.crossings]
    rng.shuffle(crossings)
    return LinkDiagram(crossings, [m[e] for e in d.free_loops]), m


def test_parse_trefoil():
    d = parse_pd(TREFOIL_PD)
    assert len(d.crossings) == 3 and d.ncomponents == 1
    assert d.component_edges(0) == (1, 2, 3, 4, 5, 6)
    assert {c.sign for c in d.crossings} == {-1}


def test_parse_hopf():
    d = parse_pd(HOPF_PD)
    assert len(d.crossings) == 2 and d.ncomponents == 2
    assert abs(linking_matrix(d)[0, 1]) == 1


@pytest.mark.parametrize(
    "text, exc",
    [
        ("X[1,2,3]", MalformedPD),
        ("X[1,2,3,x]", MalformedPD),
        ("Y[1,2,3,4]", MalformedPD),
        ("", MalformedPD),
        ("X[1,4,2,5] X[3,6,4,1] X[5,2,6,7]", InconsistentEdges),
        ("X[1,1,1,2]", InconsistentEdges),
    ],
)
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_pd(text)


def test_orientation_conflict_is_reported():
    # edge 1 enters both crossings as an incoming under-strand
    with pytest.raises(NonClosedComponent):
        parse_pd("X[1,3,2,4] X[1,4,2,3]")


def test_render_roundtrip():
    for d in (trefoil(), figure_eight(), hopf_link(), borromean(), band_sum_borromean(2)):
        assert parse_pd(render_pd(d)) == d


def test_json_roundtrip():
    for d in (unknot(), unlink(3), trefoil(), borromean()):
        text = d.to_json()
        assert set(json.loads(text)) == {"crossings", "edge_component", "ncomponents"}
        assert LinkDiagram.from_json(text) == d


def test_json_rejects_bad_component_count():
    data = trefoil().to_dict()
    data["ncomponents"] = 2
    with pytest.raises(InconsistentEdges):
        LinkDiagram.from_dict(data)


def test_braid_parse():
    assert parse_braid("s1 s2^-1 s1").letters == (1, -2, 1)
    assert parse_braid("s1^3").letters == (1, 1, 1)
    assert parse_braid("s2^-2").letters == (-2, -2)
    assert parse_braid("", strands=3).strands == 3
    with pytest.raises(MalformedBraid):
        parse_braid("s0")
    with pytest.raises(MalformedBraid):
        parse_braid("t1")
    with pytest.raises(MalformedBraid):
        BraidWord(2, (2,))


def test_closure_examples():
    t = braid_closure(BraidWord(2, (1, 1, 1)))
    assert t.ncomponents == 1 and len(t.crossings) == 3
    u = braid_closure(BraidWord(3, ()))
    assert u.ncomponents == 3 and not u.crossings
    assert braid_closure(BraidWord(2, (1,))).ncomponents == 1


def test_borromean_family():
    b = borromean()
    assert len(b.crossings) == 6 and b.ncomponents == 3
    assert b == band_sum_borromean(1)
    b2 = band_sum_borromean(2)
    assert len(b2.crossings) == 12 and b2.ncomponents == 3
    for n in range(1, 6):
        assert not linking_matrix(band_sum_borromean(n)).any()


def test_linking_examples():
    lk = linking_matrix(hopf_link())
    assert lk.tolist() == [[0, 1], [1, 0]]
    assert not linking_matrix(unlink(2)).any()
    assert linking_matrix(reverse_component(hopf_link(), 0)).tolist() == [[0, -1], [-1, 0]]


def test_linking_matrix_symmetric_int():
    lk = linking_matrix(braid_closure(BraidWord(3, (1, 1, 2, 2, 2, 2))))
    assert lk.dtype == np.int64
    assert (lk == lk.T).all() and not np.diag(lk).any()
    assert lk[0, 1] == 1 and lk[1, 2] == 2


@settings(max_examples=500)
@given(braids(max_strands=5, max_len=10))
def test_closure_components_match_permutation(b):
    d = braid_closure(b)
    assert d.ncomponents == cycle_count(b.permutation())
    # every edge appears exactly twice across crossings, or is a free loop
    counts = {}
    for c in d.crossings:
        for e in c.edges:
            counts[e] = counts.get(e, 0) + 1
    assert all(v == 2 for v in counts.values())
    assert set(counts) | set(d.free_loops) == set(d.edges)


@given(braids(), st.randoms())
def test_relabel_preserves_structure(b, rnd):
    d = braid_closure(b)
    e, m = relabeled(d, rnd)
    assert e.ncomponents == d.ncomponents
    for x, y in m.items():
        assert m[d.component_edges(d.edge_component[x])[0]] in e.component_edges(e.edge_component[y])
