"""Shared corpus diagrams and brute-force oracles."""

from itertools import combinations

import networkx as nx
import pytest

from formats import write_json
from graph import build_bubble, build_ladder, build_single_edge, build_triangle
from symanzik import ParametricIntegral


@pytest.fixture
def bubble():
    return build_bubble(2)


@pytest.fixture
def triangle():
    return build_triangle(2)


@pytest.fixture
def box():
    return build_ladder(1, 4)


@pytest.fixture
def double_box():
    return build_ladder(2, 4)


@pytest.fixture
def ladder3():
    return build_ladder(3, 4)


@pytest.fixture
def single_edge():
    return build_single_edge(2)


@pytest.fixture
def bubble_integral(bubble):
    return ParametricIntegral(bubble)


@pytest.fixture
def triangle_integral(triangle):
    return ParametricIntegral(triangle)


@pytest.fixture
def box_integral(box):
    return ParametricIntegral(box)


@pytest.fixture
def diagram_file(tmp_path):
    """Write a diagram to tmp_path and return the path."""

    def write(d, name=None):
        return write_json(tmp_path / f"{name or d.name}.json", d.to_spec())

    return write


def _subgraph(d, lines):
    g = nx.MultiGraph()
    g.add_nodes_from(range(d.n_vertices))
    for i in lines:
        g.add_edge(d.lines[i].a, d.lines[i].b)
    return g


@pytest.fixture
def brute_forests():
    """All acyclic spanning subsets with r components, by filtering every line subset."""

    def enumerate_forests(d, r, chi=None):
        found = []
        size = d.n_vertices - r
        if size < 0:
            return found
        for lines in combinations(range(d.n_lines), size):
            g = _subgraph(d, lines)
            if not nx.is_forest(g) or nx.number_connected_components(g) != r:
                continue
            if chi is not None:
                inside = {d.vertex_index(v) for v in chi}
                outside = set(d.externals) - inside
                comps = nx.connected_components(g)
                if any(comp & inside and comp & outside for comp in comps):
                    continue
            found.append(lines)
        return sorted(found)

    return enumerate_forests
