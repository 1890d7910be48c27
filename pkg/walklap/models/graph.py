"""
Модель графа.

Graph — неизменяемый простой неориентированный невзвешенный граф
в формате CSR. Это единственный источник структуры смежности
для всех остальных модулей.
"""

import hashlib
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, model_validator

from walklap.core.exceptions import GraphFormatError


class Graph(BaseModel):
    """
    Простой неориентированный граф в CSR-формате.

    Attributes:
        n: Число вершин
        row_ptr: Указатели строк CSR (длина n + 1)
        col_idx: Индексы столбцов CSR (длина 2m), отсортированы внутри строки

    Инварианты (проверяются при создании):
        - матрица смежности симметрична
        - нет петель и повторов, все индексы в [0, n)
        - row_ptr неубывающий, row_ptr[n] = 2m
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int
    row_ptr: np.ndarray
    col_idx: np.ndarray

    @model_validator(mode="after")
    def _check_structure(self) -> "Graph":
        n = self.n
        if n < 0:
            raise ValueError(f"node count must be nonnegative, got {n}")
        row_ptr = np.asarray(self.row_ptr)
        col_idx = np.asarray(self.col_idx)
        if row_ptr.shape != (n + 1,) or row_ptr[0] != 0:
            raise ValueError("row_ptr must have length n + 1 and start at 0")
        if np.any(np.diff(row_ptr) < 0):
            raise ValueError("row_ptr must be nondecreasing")
        if row_ptr[-1] != col_idx.size or col_idx.size % 2:
            raise ValueError("row_ptr[n] must equal the (even) number of entries")
        if col_idx.size and (col_idx.min() < 0 or col_idx.max() >= n):
            raise ValueError("column index out of range [0, n)")

        rows = np.repeat(np.arange(n), np.diff(row_ptr))
        if np.any(rows == col_idx):
            raise ValueError("self-loops are not allowed")
        keys = rows.astype(np.int64) * max(n, 1) + col_idx
        if np.unique(keys).size != keys.size:
            raise ValueError("duplicate entries are not allowed")
        mirrored = np.sort(col_idx.astype(np.int64) * max(n, 1) + rows)
        if not np.array_equal(np.sort(keys), mirrored):
            raise ValueError("adjacency structure is not symmetric")

        row_ptr.setflags(write=False)
        col_idx.setflags(write=False)
        return self

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """
        Построить упрощённый граф из списка рёбер.

        Петли отбрасываются, повторы схлопываются, структура
        симметризуется объединением.

        Args:
            n: Число вершин
            edges: Итерируемое пар (i, j) с индексами с нуля
        """
        pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
            raise GraphFormatError(f"edge index out of declared bounds [0, {n})")
        return cls.from_sparse(
            sp.coo_matrix(
                (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n)
            )
        )

    @classmethod
    def from_sparse(cls, matrix) -> "Graph":
        """Граф из произвольной квадратной разреженной матрицы (значения = наличие ребра)."""
        coo = sp.coo_matrix(matrix)
        if coo.shape[0] != coo.shape[1]:
            raise GraphFormatError(f"adjacency must be square, got {coo.shape}")
        n = coo.shape[0]
        off_diagonal = coo.row != coo.col
        rows = np.concatenate([coo.row[off_diagonal], coo.col[off_diagonal]])
        cols = np.concatenate([coo.col[off_diagonal], coo.row[off_diagonal]])
        pattern = sp.csr_matrix(
            (np.ones(rows.size), (rows, cols)), shape=(n, n)
        )
        pattern.sum_duplicates()
        pattern.sort_indices()
        return cls(
            n=n,
            row_ptr=pattern.indptr.astype(np.int64),
            col_idx=pattern.indices.astype(np.int64),
        )

    @property
    def m(self) -> int:
        """Число неориентированных рёбер."""
        return int(self.col_idx.size // 2)

    @cached_property
    def degrees(self) -> np.ndarray:
        """Вектор степеней d (DegreeVector): d[i] = длина строки i."""
        d = np.diff(self.row_ptr).astype(float)
        d.setflags(write=False)
        return d

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Матрица смежности A (float, для матвеков)."""
        return sp.csr_matrix(
            (np.ones(self.col_idx.size), self.col_idx, self.row_ptr),
            shape=(self.n, self.n),
        )

    @cached_property
    def fingerprint(self) -> str:
        """Хэш содержимого — ключ для кэшей спектральных радиусов."""
        digest = hashlib.sha1(usedforsecurity=False)
        digest.update(np.int64(self.n).tobytes())
        digest.update(np.ascontiguousarray(self.row_ptr).tobytes())
        digest.update(np.ascontiguousarray(self.col_idx).tobytes())
        return digest.hexdigest()

    def neighbors(self, i: int) -> np.ndarray:
        """Соседи вершины i."""
        return self.col_idx[self.row_ptr[i]:self.row_ptr[i + 1]]

    def dense_adjacency(self) -> np.ndarray:
        """Плотная копия A."""
        return self.adjacency.toarray()

    def __hash__(self) -> int:
        return hash(self.fingerprint)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.fingerprint == other.fingerprint

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"
