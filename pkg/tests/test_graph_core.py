"""
Тесты загрузки графов, генераторов и BFS.
"""

import numpy as np
import pytest

from walklap.core.exceptions import DatasetNotFoundError, GraphFormatError, SizeLimitError
from walklap.models.graph import Graph
from walklap.services import generators
from walklap.services.graph_core import (
    UNREACHABLE,
    all_pairs_distances,
    bfs_distances,
    component_count,
    largest_component,
    load_graph,
    load_graph_file,
    resolve_dataset,
)

MTX_P3 = b"""%%MatrixMarket matrix coordinate pattern symmetric
% path on three nodes
3 3 2
2 1
3 2
"""


class TestLoadGraph:
    """Тесты чтения Matrix Market и списков рёбер."""

    def test_matrix_market_pattern(self):
        """Тест: симметричный pattern-файл даёт путь P3."""
        g = load_graph(MTX_P3, "matrix-market")

        assert g.n == 3
        assert g.m == 2
        assert g.degrees.tolist() == [1.0, 2.0, 1.0]

    def test_matrix_market_values_and_loops_ignored(self):
        """Тест: веса игнорируются, петли отбрасываются."""
        data = b"""%%MatrixMarket matrix coordinate real general
3 3 4
1 2 5.0
2 1 5.0
2 2 1.0
2 3 -3.5
"""
        g = load_graph(data, "matrix-market")

        assert g.m == 2
        assert np.array_equal(g.dense_adjacency(), [[0, 1, 0], [1, 0, 1], [0, 1, 0]])

    def test_missing_header(self):
        """Тест: файл без заголовка %%MatrixMarket."""
        with pytest.raises(GraphFormatError):
            load_graph(b"3 3 2\n1 2\n2 3\n", "matrix-market")

    def test_array_format_rejected(self):
        """Тест: плотный формат array не описывает граф."""
        data = b"%%MatrixMarket matrix array real general\n2 2\n0\n1\n1\n0\n"
        with pytest.raises(GraphFormatError):
            load_graph(data, "matrix-market")

    def test_edge_list(self):
        """Тест: список рёбер с комментариями и повтором."""
        g = load_graph("# comment\n0 1\n1 2\n2 0\n1 0\n", "edge-list")

        assert g.n == 3
        assert g.m == 3

    def test_edge_list_bad_line(self):
        """Тест: строка с одним индексом."""
        with pytest.raises(GraphFormatError, match="line 2"):
            load_graph("0 1\n7\n", "edge-list")

    def test_empty_graph(self):
        """Тест: пустой список рёбер."""
        with pytest.raises(GraphFormatError, match="empty graph"):
            load_graph("# nothing here\n", "edge-list")

    def test_load_file_by_suffix(self, tmp_path):
        """Тест: .mtx читается как Matrix Market."""
        path = tmp_path / "p3.mtx"
        path.write_bytes(MTX_P3)

        assert load_graph_file(path).m == 2

    def test_missing_file(self, tmp_path):
        """Тест: отсутствующий файл."""
        with pytest.raises(GraphFormatError):
            load_graph_file(tmp_path / "nope.txt")


class TestResolveDataset:
    """Тесты поиска именованных сетей."""

    def test_suitesparse_layout(self, tmp_path):
        """Тест: раскладка <Group>/<Name>/<Name>.mtx."""
        target = tmp_path / "Pajek" / "USpowerGrid" / "USpowerGrid.mtx"
        target.parent.mkdir(parents=True)
        target.write_bytes(MTX_P3)

        assert resolve_dataset("Pajek/USpowerGrid", tmp_path) == target

    def test_flat_layout(self, tmp_path):
        """Тест: раскладка <dir>/<Name>.mtx."""
        target = tmp_path / "karate.mtx"
        target.write_bytes(MTX_P3)

        assert resolve_dataset("Newman/karate", tmp_path) == target

    def test_not_found(self, tmp_path):
        """Тест: сети нет в каталоге."""
        with pytest.raises(DatasetNotFoundError):
            resolve_dataset("Pajek/Missing", tmp_path)


class TestComponentsAndDistances:
    """Тесты компонент связности и BFS."""

    def test_largest_component(self):
        """Тест: наибольшая компонента и отображение индексов."""
        g = Graph.from_edges(6, [(0, 1), (2, 3), (3, 4)])
        sub, index_map = largest_component(g)

        assert component_count(g) == 3
        assert sub.n == 3
        assert index_map.tolist() == [-1, -1, 0, 1, 2, -1]

    def test_largest_component_tie(self):
        """Тест: при равенстве размеров выбирается компонента с меньшим индексом."""
        g = Graph.from_edges(4, [(2, 3), (0, 1)])
        sub, index_map = largest_component(g)

        assert sub.n == 2
        assert index_map.tolist() == [0, 1, -1, -1]

    def test_bfs_distances(self, p3):
        """Тест: расстояния на пути."""
        assert bfs_distances(p3, 0).tolist() == [0, 1, 2]

    def test_unreachable(self):
        """Тест: недостижимые вершины помечены UNREACHABLE."""
        g = Graph.from_edges(3, [(0, 1)])

        assert bfs_distances(g, 0)[2] == UNREACHABLE

    def test_all_pairs_size_limit(self, small_dense_limit):
        """Тест: все пары только в плотном режиме."""
        with pytest.raises(SizeLimitError):
            all_pairs_distances(generators.path_graph(11))


class TestGenerators:
    """Тесты встроенных генераторов."""

    def test_trap_graph(self, g58):
        """Тест: G_{5,8} — центр 2 степени 10, сумма степеней 24."""
        assert g58.n == 13
        assert g58.degrees[2] == 10
        assert g58.degrees.sum() == 24
        assert g58.degrees[4] == 1

    def test_karate(self, karate):
        """Тест: 34 вершины, 78 рёбер."""
        assert karate.n == 34
        assert karate.m == 78

    def test_random_tree_deterministic(self):
        """Тест: дерево Прюфера связно и воспроизводимо."""
        a = generators.random_tree(30, seed=4)
        b = generators.random_tree(30, seed=4)

        assert a == b
        assert a.m == 29
        assert component_count(a) == 1

    def test_random_connected(self):
        """Тест: случайный граф связен."""
        g = generators.random_connected_graph(25, 0.1, seed=9)

        assert component_count(g) == 1
        assert g.m >= 24

    def test_grid(self, grid):
        """Тест: решётка 6×6 имеет 60 рёбер."""
        assert grid.n == 36
        assert grid.m == 60
