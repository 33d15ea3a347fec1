import pytest

from streamprop.errors import InvalidGraph, PatternTooLarge
from streamprop.generators import path, star
from streamprop.graph import Subgraph, as_subgraph
from streamprop.patterns import (
    ForbiddenFamily,
    contains_forbidden,
    find_embedding,
    format_pattern,
    parse_pattern,
    read_pattern,
)


def pattern_path(k):
    return Subgraph.make(range(k + 1), [(i, i + 1) for i in range(k)])


def test_triangle_contains_edge():
    fam = ForbiddenFamily.explicit("edge", [("edge", pattern_path(1))])
    tri = Subgraph.make(range(3), [(0, 1), (1, 2), (0, 2)])
    w = contains_forbidden(tri, fam)
    assert w is not None and len(w.edges) == 1


def test_star_has_no_three_edge_path():
    fam = ForbiddenFamily.explicit("p3", [("p3", pattern_path(3))])
    assert contains_forbidden(star(4), fam) is None


def test_long_path_contains_sub_path():
    fam = ForbiddenFamily.explicit("p3", [("p3", pattern_path(3))])
    g = path(6)
    w = contains_forbidden(g, fam)
    assert w is not None
    assert fam.validate(g, w)


def test_roots_and_colours_respected():
    p = Subgraph.make([0, 1], [(0, 1)], [0], {1: 5})
    host = Subgraph.make(range(3), [(0, 1), (1, 2)], [2], {1: 5})
    f = find_embedding(p, host)
    assert f == {0: 2, 1: 1}
    assert find_embedding(p, Subgraph.make(range(3), [(0, 1), (1, 2)], [2], {1: 6})) is None
    assert find_embedding(p, Subgraph.make(range(3), [(0, 1), (1, 2)], [], {1: 5})) is None
    assert find_embedding(p, Subgraph.make(range(3), [(0, 1), (1, 2)], [], {1: 5}), require_roots=False)


def test_embedding_is_edge_preserving_and_injective():
    c4 = Subgraph.make(range(4), [(0, 1), (1, 2), (2, 3), (0, 3)])
    host = Subgraph.make(range(6), [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5)])
    f = find_embedding(c4, host)
    assert len(set(f.values())) == 4
    assert all(tuple(sorted((f[a], f[b]))) in host.edges for a, b in c4.edges)
    assert find_embedding(c4, as_subgraph(path(6))) is None


def test_pattern_cap():
    big = pattern_path(12)
    with pytest.raises(PatternTooLarge):
        ForbiddenFamily.explicit("big", [("big", big)])
    with pytest.raises(PatternTooLarge):
        find_embedding(big, as_subgraph(path(20)))


def test_validate_rejects_forged_witness():
    fam = ForbiddenFamily.explicit("p2", [("p2", pattern_path(2))])
    g = path(4)
    w = contains_forbidden(g, fam)
    forged = type(w)(w.family, w.pattern, w.vertices, w.edges, ((0, 0), (1, 2), (2, 3)))
    assert fam.validate(g, w)
    assert not fam.validate(g, forged)


def test_pattern_file_round_trip(tmp_path):
    text = "3 2\nroot 0\ncolor 2 5\n0 1\n1 2\n"
    p = parse_pattern(text)
    assert p.roots == {0} and p.color_map == {2: 5}
    assert format_pattern(p) == text
    f = tmp_path / "p.txt"
    f.write_text("# comment\n" + text)
    assert read_pattern(f) == p
    with pytest.raises(InvalidGraph):
        parse_pattern("3 2\n0 1\n")
    with pytest.raises(InvalidGraph):
        parse_pattern("2 1\nroot 4\n0 1\n")
