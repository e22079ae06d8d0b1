"""Tests for four-coloured simplicial complexes."""

import json

import pytest

from gaugemeas.errors import InstanceError
from gaugemeas.examples import sixteen_cell
from gaugemeas.simplicial import ColoredSimplicialComplex, all_simplices, closure, naive_link


@pytest.fixture(scope='module')
def cell():
    return sixteen_cell()


def single_tetrahedron():
    return ColoredSimplicialComplex(('r', 'g', 'b', 'y'), ((0, 1, 2, 3),))


class TestIncidence:

    def test_sixteen_cell_counts(self, cell):
        assert cell.n_vertices == 8
        assert len(cell.tetrahedra) == 16
        # complete graph on 8 vertices minus the 4 antipodal pairs
        assert len(cell.edges) == 24
        assert len(cell.faces) == 32

    def test_sixteen_cell_is_valid(self, cell):
        report = cell.validate()
        assert report.passed
        assert report.details['tetrahedra'] == 16

    def test_face_colour_is_the_missing_one(self, cell):
        assert cell.face_color((0, 1, 2)) == 'y'
        assert cell.face_color((1, 2, 7)) == 'r'
        assert len(cell.faces_of_color('r')) == 8

    def test_neighbours_skip_the_antipode(self, cell):
        assert cell.neighbours[0] == (1, 2, 3, 5, 6, 7)

    def test_open_complex_fails_validation(self):
        report = single_tetrahedron().validate()
        assert not report.passed
        with pytest.raises(InstanceError):
            single_tetrahedron().require_valid()


class TestLinks:

    def test_vertex_link_is_an_octahedron(self, cell):
        link = cell.link([0])
        sizes = sorted(len(s) for s in link)
        assert sizes.count(1) == 6
        assert sizes.count(2) == 12
        assert sizes.count(3) == 8

    @pytest.mark.parametrize('simplex', [(0,), (4,), (0, 1), (1, 6), (0, 1, 2)])
    def test_link_matches_literal_definition(self, cell, simplex):
        assert cell.link(simplex) == naive_link(cell, simplex)

    def test_edge_link_cycle(self, cell):
        assert cell.edge_link_cycle((0, 1)) == [2, 3, 6, 7]
        assert cell.link_vertices((0, 1)) == [2, 3, 6, 7]

    def test_missing_edge(self, cell):
        with pytest.raises(InstanceError):
            cell.edge_link_cycle((0, 4))

    def test_star_contains_the_simplex(self, cell):
        star = cell.star([0, 1])
        assert frozenset({0, 1}) in star
        assert all({0, 1} <= s for s in star)

    def test_closure(self):
        assert len(closure([frozenset({0, 1, 2})])) == 7
        assert len(all_simplices(single_tetrahedron())) == 15


class TestConstructionErrors:

    def test_unknown_colour(self):
        with pytest.raises(InstanceError):
            ColoredSimplicialComplex(('r', 'x', 'b', 'y'), ((0, 1, 2, 3),))

    def test_repeated_vertex(self):
        with pytest.raises(InstanceError):
            ColoredSimplicialComplex(('r', 'g', 'b', 'y'), ((0, 1, 2, 2),))

    def test_missing_vertex(self):
        with pytest.raises(InstanceError):
            ColoredSimplicialComplex(('r', 'g', 'b', 'y'), ((0, 1, 2, 4),))


class TestSerialization:

    def test_json_round_trip(self, cell):
        back = ColoredSimplicialComplex.from_json(cell.to_json())
        assert back == cell
        assert back.ids == cell.ids

    def test_load_from_file(self, cell, tmp_path):
        path = tmp_path / "cell.json"
        path.write_text(json.dumps(cell.to_json()), encoding='utf-8')
        assert ColoredSimplicialComplex.load(str(path)) == cell

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{\"vertices\": [", encoding='utf-8')
        with pytest.raises(InstanceError):
            ColoredSimplicialComplex.load(str(path))

    def test_missing_keys(self):
        with pytest.raises(InstanceError):
            ColoredSimplicialComplex.from_json({'vertices': []})

    def test_missing_file(self, tmp_path):
        with pytest.raises(InstanceError):
            ColoredSimplicialComplex.load(str(tmp_path / "absent.json"))
