import pytest
import sympy

from errors import DiagramError
from graph import (
    EdgeSubset,
    build_diagram,
    build_ladder,
    build_one_loop,
    laplacian,
    loop_number,
    spanning_2trees,
    spanning_forests,
    spanning_trees,
)


def lines_of(subsets):
    return [s.lines for s in subsets]


def test_cyclic_box_layout(box):
    ends = [(box.vertices[l.a].name, box.vertices[l.b].name) for l in box.lines]
    assert ends == [("1", "2"), ("2", "3"), ("3", "4"), ("4", "1")]
    assert box.name == "box"
    assert loop_number(box) == 1


def test_ladder_sizes():
    for h in (1, 2, 3):
        d = build_ladder(h)
        assert d.n_lines == 3 * h + 1
        assert d.n_vertices == 2 * h + 2
        assert loop_number(d) == h
        assert d.external_names == ("1", "2", "3", "4")


def test_ladder_rejects_zero_loops():
    with pytest.raises(DiagramError):
        build_ladder(0)


def test_bubble_trees(bubble):
    assert lines_of(spanning_trees(bubble)) == [(0,), (1,)]


def test_box_two_trees(box):
    assert lines_of(spanning_2trees(box, ["1", "2"])) == [(0, 2)]
    assert spanning_2trees(box, ["1", "3"]) == []


def test_chi_validation(box):
    with pytest.raises(DiagramError):
        spanning_2trees(box, [])
    with pytest.raises(DiagramError):
        spanning_2trees(box, ["1", "2", "3", "4"])
    with pytest.raises(DiagramError):
        spanning_2trees(box, ["9"])


@pytest.mark.parametrize("h", [1, 2, 3])
def test_trees_match_brute_force(h, brute_forests):
    d = build_ladder(h)
    assert lines_of(spanning_trees(d)) == brute_forests(d, 1)


def test_two_trees_match_brute_force(double_box, brute_forests):
    for chi in (["1"], ["2"], ["1", "2"], ["2", "3"], ["1", "3"], ["1", "2", "3"]):
        assert lines_of(spanning_2trees(double_box, chi)) == brute_forests(double_box, 2, chi)


def test_forests_any_r(triangle, brute_forests):
    for r in (1, 2, 3):
        assert lines_of(spanning_forests(triangle, r)) == brute_forests(triangle, r)
    assert spanning_forests(triangle, 4) == []


@pytest.mark.parametrize("h", [1, 2, 3])
def test_matrix_tree_theorem(h):
    d = build_ladder(h)
    lap = sympy.Matrix(laplacian(d))
    assert len(spanning_trees(d)) == lap[1:, 1:].det()


def test_double_box_tree_count(double_box):
    assert len(spanning_trees(double_box)) == 15


def test_one_loop_polygon():
    d = build_one_loop(5)
    assert d.n_lines == 5
    assert len(spanning_trees(d)) == 5
    assert len(d.externals) == 5


def test_edge_subset():
    s = EdgeSubset.of([3, 0])
    assert s.lines == (0, 3)
    assert 3 in s and 1 not in s
    assert len(s) == 2
    assert s.complement(4).lines == (1, 2)


def test_spec_round_trip(box):
    assert build_diagram(box.to_spec()) == box


@pytest.mark.parametrize(
    "patch, message",
    [
        ({"D": 3}, "D must be"),
        ({"D": True}, "D must be"),
        ({"vertices": []}, "no vertices"),
    ],
)
def test_build_diagram_rejects(bubble, patch, message):
    spec = {**bubble.to_spec(), **patch}
    with pytest.raises(DiagramError, match=message):
        build_diagram(spec)


def test_build_diagram_rejects_dangling_line(bubble):
    spec = bubble.to_spec()
    spec["lines"][0]["to"] = "V9"
    with pytest.raises(DiagramError, match="V9"):
        build_diagram(spec)


def test_build_diagram_rejects_duplicate_vertex(bubble):
    spec = bubble.to_spec()
    spec["vertices"].append({"id": "V1", "external": False})
    with pytest.raises(DiagramError, match="duplicate"):
        build_diagram(spec)


def test_disconnected_diagram_has_no_trees():
    d = build_diagram(
        {
            "name": "split",
            "D": 2,
            "vertices": [{"id": i, "external": True} for i in "abcd"],
            "lines": [{"id": "x", "from": "a", "to": "b"}, {"id": "y", "from": "c", "to": "d"}],
        }
    )
    assert not d.is_connected()
    with pytest.raises(DiagramError):
        spanning_trees(d)
