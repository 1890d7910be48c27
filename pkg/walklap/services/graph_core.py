"""
Загрузка графов и базовые графовые примитивы.

Этот модуль отвечает за:
1. Чтение Matrix Market и списков рёбер с упрощением графа
2. Поиск именованных сетей в каталоге данных
3. Выделение наибольшей компоненты связности
4. Расстояния BFS (в том числе все пары для k-path лапласиана)
"""

import io
from pathlib import Path
from typing import BinaryIO, Literal, Optional, Union

import numpy as np
import scipy.io
import scipy.sparse as sp
from loguru import logger
from scipy.sparse import csgraph

from walklap.core.config import get_settings
from walklap.core.exceptions import (
    DatasetNotFoundError,
    GraphFormatError,
    ParameterError,
    SizeLimitError,
)
from walklap.models.graph import Graph

# Метка недостижимой вершины: максимальное представимое расстояние
UNREACHABLE = np.iinfo(np.int64).max

GraphFormat = Literal["matrix-market", "edge-list"]


def load_graph(source: Union[BinaryIO, bytes, str], fmt: GraphFormat) -> Graph:
    """
    Прочитать граф из потока.

    Петли отбрасываются, повторы схлопываются, структура
    симметризуется, числовые значения означают только наличие ребра.

    Args:
        source: Бинарный поток, bytes или str с содержимым файла
        fmt: "matrix-market" или "edge-list"

    Returns:
        Graph: Упрощённый граф

    Raises:
        GraphFormatError: Ошибка разбора, пустой граф, индекс вне границ
    """
    data = _read_bytes(source)
    if fmt == "matrix-market":
        graph = _parse_matrix_market(data)
    elif fmt == "edge-list":
        graph = _parse_edge_list(data)
    else:
        raise ParameterError(f"unknown graph format: {fmt}")

    if graph.n == 0:
        raise GraphFormatError("empty graph")
    logger.info(f"Loaded {fmt} graph: n={graph.n}, m={graph.m}")
    return graph


def load_graph_file(path: Union[str, Path]) -> Graph:
    """Прочитать файл: .mtx как Matrix Market, всё остальное как список рёбер."""
    path = Path(path)
    if not path.is_file():
        raise GraphFormatError(f"graph file not found: {path}")
    fmt: GraphFormat = "matrix-market" if path.suffix.lower() == ".mtx" else "edge-list"
    with path.open("rb") as stream:
        return load_graph(stream, fmt)


def resolve_dataset(name: str, dataset_dir: Optional[Path] = None) -> Path:
    """
    Найти именованную сеть вида <Group>/<Name> в каталоге данных.

    Проверяются раскладки:
        <dir>/<Group>/<Name>.mtx
        <dir>/<Group>/<Name>/<Name>.mtx (распакованный архив SuiteSparse)
        <dir>/<Name>.mtx

    Raises:
        DatasetNotFoundError: Каталог не задан или файл не найден
    """
    settings = get_settings()
    root = dataset_dir if dataset_dir is not None else settings.dataset_dir
    if root is None:
        raise DatasetNotFoundError(
            f"dataset {name!r} requested but WALKLAP_DATASET_DIR is not set"
        )

    group, _, short = name.rpartition("/")
    candidates = [root / f"{name}.mtx", root / name / f"{short}.mtx", root / f"{short}.mtx"]
    if not group:
        candidates = [root / f"{short}.mtx", root / short / f"{short}.mtx"]

    for candidate in candidates:
        if candidate.is_file():
            logger.debug(f"Dataset {name} resolved to {candidate}")
            return candidate

    logger.warning(f"Dataset {name} not found under {root}")
    raise DatasetNotFoundError(f"dataset {name!r} not found under {root}")


def largest_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """
    Индуцированный подграф на наибольшей компоненте связности.

    При равных размерах выбирается компонента с наименьшим
    минимальным исходным индексом вершины.

    Returns:
        (подграф, index_map): index_map[old] = new или -1 для отброшенных вершин
    """
    if g.n == 0:
        raise ParameterError("largest_component requires n >= 1")

    count, labels = csgraph.connected_components(g.adjacency, directed=False)
    if count == 1:
        return g, np.arange(g.n)

    sizes = np.bincount(labels, minlength=count)
    first_node = np.full(count, g.n)
    np.minimum.at(first_node, labels, np.arange(g.n))
    candidates = np.flatnonzero(sizes == sizes.max())
    best = candidates[np.argmin(first_node[candidates])]

    keep = np.flatnonzero(labels == best)
    index_map = np.full(g.n, -1, dtype=np.int64)
    index_map[keep] = np.arange(keep.size)
    sub = Graph.from_sparse(g.adjacency[keep][:, keep])

    logger.info(
        f"Largest component: {keep.size} of {g.n} nodes ({count} components)"
    )
    return sub, index_map


def component_count(g: Graph) -> int:
    """Число компонент связности."""
    if g.n == 0:
        return 0
    count, _ = csgraph.connected_components(g.adjacency, directed=False)
    return int(count)


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """
    Кратчайшие расстояния (в рёбрах) от source до всех вершин.

    Недостижимые вершины помечены UNREACHABLE.

    Raises:
        ParameterError: source вне [0, n)
    """
    if not 0 <= source < g.n:
        raise ParameterError(f"source {source} out of range [0, {g.n})")
    dist = csgraph.shortest_path(
        g.adjacency, directed=False, unweighted=True, indices=source
    )
    return _to_counts(dist)


def all_pairs_distances(g: Graph) -> np.ndarray:
    """Матрица расстояний n×n (плотный режим)."""
    limit = get_settings().dense_limit
    if g.n > limit:
        raise SizeLimitError(g.n, limit, "all-pairs BFS")
    dist = csgraph.shortest_path(g.adjacency, directed=False, unweighted=True)
    return _to_counts(dist)


def _to_counts(dist: np.ndarray) -> np.ndarray:
    out = np.full(dist.shape, UNREACHABLE, dtype=np.int64)
    finite = np.isfinite(dist)
    out[finite] = dist[finite].astype(np.int64)
    return out


def _read_bytes(source: Union[BinaryIO, bytes, str]) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, str):
        return source.encode()
    data = source.read()
    return data.encode() if isinstance(data, str) else data


def _parse_matrix_market(data: bytes) -> Graph:
    header = data.lstrip().split(b"\n", 1)[0].lower()
    if not header.startswith(b"%%matrixmarket"):
        raise GraphFormatError("missing %%MatrixMarket header")
    if b"coordinate" not in header:
        raise GraphFormatError("only coordinate Matrix Market files describe graphs")

    try:
        matrix = scipy.io.mmread(io.BytesIO(data))
    except Exception as e:
        raise GraphFormatError(f"malformed Matrix Market file: {e}") from e

    if not sp.issparse(matrix):
        raise GraphFormatError("Matrix Market file is not in coordinate format")
    if matrix.shape[0] != matrix.shape[1]:
        raise GraphFormatError(f"adjacency must be square, got {matrix.shape}")
    return Graph.from_sparse(matrix)


def _parse_edge_list(data: bytes) -> Graph:
    try:
        text = data.decode()
    except UnicodeDecodeError as e:
        raise GraphFormatError(f"edge list is not valid text: {e}") from e

    edges = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped[0] in "#%":
            continue
        fields = stripped.split()
        if len(fields) < 2:
            raise GraphFormatError(f"line {line_no}: expected two node indices")
        try:
            i, j = int(fields[0]), int(fields[1])
        except ValueError as e:
            raise GraphFormatError(f"line {line_no}: {e}") from e
        if i < 0 or j < 0:
            raise GraphFormatError(f"line {line_no}: negative node index")
        edges.append((i, j))

    if not edges:
        raise GraphFormatError("empty graph")
    n = max(max(i, j) for i, j in edges) + 1
    return Graph.from_edges(n, edges)
