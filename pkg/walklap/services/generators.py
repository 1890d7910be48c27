"""
Встроенные генераторы графов.

Все генераторы возвращают Graph, поэтому тесты и воспроизведение
экспериментов работают без сетевого доступа.
"""

from typing import Callable

import networkx as nx
import numpy as np
from loguru import logger

from walklap.core.exceptions import ParameterError
from walklap.models.graph import Graph


def from_networkx(nx_graph: nx.Graph) -> Graph:
    """Перевести граф networkx в Graph (вершины нумеруются в порядке сортировки)."""
    relabeled = nx.convert_node_labels_to_integers(nx_graph, ordering="sorted")
    matrix = nx.to_scipy_sparse_array(
        relabeled, nodelist=range(relabeled.number_of_nodes()), weight=None
    )
    return Graph.from_sparse(matrix)


def path_graph(n: int) -> Graph:
    _require(n >= 1, f"path requires n >= 1, got {n}")
    return from_networkx(nx.path_graph(n))


def cycle_graph(n: int) -> Graph:
    _require(n >= 3, f"cycle requires n >= 3, got {n}")
    return from_networkx(nx.cycle_graph(n))


def complete_graph(n: int) -> Graph:
    _require(n >= 1, f"complete graph requires n >= 1, got {n}")
    return from_networkx(nx.complete_graph(n))


def star_graph(leaves: int) -> Graph:
    """Звезда: центр 0 и leaves листьев."""
    _require(leaves >= 1, f"star requires at least one leaf, got {leaves}")
    return from_networkx(nx.star_graph(leaves))


def grid_graph(rows: int, cols: int) -> Graph:
    """Двумерная решётка rows×cols (прокси дорожной сети)."""
    _require(rows >= 1 and cols >= 1, f"grid requires positive sides, got {rows}x{cols}")
    return from_networkx(nx.grid_2d_graph(rows, cols))


def karate_club() -> Graph:
    """Клуб карате Закари: 34 вершины, 78 рёбер."""
    return from_networkx(nx.karate_club_graph())


def trap_graph(path_length: int, leaves: int) -> Graph:
    """
    Граф-ловушка G_{l,m}: путь из l вершин и m листьев на центральной вершине.

    Центр пути имеет индекс (l − 1) // 2, листья нумеруются l..l+m−1.
    Для G_{5,8}: центр 2 со степенью 10, сумма степеней 24.
    """
    _require(path_length >= 1, f"trap graph requires l >= 1, got {path_length}")
    _require(leaves >= 0, f"trap graph requires m >= 0, got {leaves}")
    centre = (path_length - 1) // 2
    edges = [(i, i + 1) for i in range(path_length - 1)]
    edges += [(centre, path_length + j) for j in range(leaves)]
    return Graph.from_edges(path_length + leaves, edges)


def random_tree(n: int, seed: int = 0) -> Graph:
    """
    Случайное помеченное дерево через последовательность Прюфера.

    Распределение равномерно по помеченным деревьям; результат
    детерминирован при фиксированном seed.

    Raises:
        ParameterError: n = 0
    """
    _require(n >= 1, f"random tree requires n >= 1, got {n}")
    if n == 1:
        return Graph.from_edges(1, [])
    if n == 2:
        return Graph.from_edges(2, [(0, 1)])
    rng = np.random.default_rng(seed)
    sequence = rng.integers(0, n, size=n - 2).tolist()
    tree = from_networkx(nx.from_prufer_sequence(sequence))
    logger.debug(f"Random Prufer tree: n={n}, seed={seed}")
    return tree


def random_connected_graph(n: int, p: float, seed: int = 0) -> Graph:
    """Связный случайный граф: дерево Прюфера плюс рёбра G(n, p)."""
    _require(0.0 <= p <= 1.0, f"edge probability must lie in [0, 1], got {p}")
    tree = random_tree(n, seed)
    extra = nx.gnp_random_graph(n, p, seed=seed)
    edges = list(zip(*np.nonzero(np.triu(tree.dense_adjacency()))))
    edges += list(extra.edges())
    return Graph.from_edges(n, edges)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParameterError(message)


# Реестр для источников вида builtin:<name>[:args]
GENERATORS: dict[str, Callable[..., Graph]] = {
    "path": path_graph,
    "cycle": cycle_graph,
    "complete": complete_graph,
    "star": star_graph,
    "grid": grid_graph,
    "karate": karate_club,
    "trap": trap_graph,
    "tree": random_tree,
    "random": random_connected_graph,
}
