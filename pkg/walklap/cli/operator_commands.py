"""
Подкоманда apply: применить оператор к вектору из CSV.
"""

import argparse
import csv
import sys

import numpy as np

from walklap.cli.options import add_graph_option, add_operator_options, operator_spec
from walklap.cli.output import emit
from walklap.cli.sources import resolve_graph
from walklap.core.exceptions import ParameterError
from walklap.models.run import RunConfig
from walklap.services.operators import build_operator


def read_vector(path: str) -> np.ndarray:
    """
    Вектор из CSV: по одному значению в строке или последний столбец
    строк вида node,value. Строки с '#' и нечисловой заголовок пропускаются.
    """
    try:
        stream = sys.stdin if path == "-" else open(path, newline="")
    except OSError as e:
        raise ParameterError(f"cannot read vector file {path}: {e}") from e
    values = []
    try:
        for lineno, row in enumerate(csv.reader(stream), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                values.append(float(row[-1]))
            except ValueError as e:
                if not values and lineno <= 2:
                    continue
                raise ParameterError(f"{path}:{lineno}: not a number: {row[-1]!r}") from e
    finally:
        if stream is not sys.stdin:
            stream.close()
    if not values:
        raise ParameterError(f"{path}: no vector entries")
    return np.asarray(values)


def run_apply(args: argparse.Namespace, config: RunConfig) -> None:
    g = resolve_graph(args.graph, args.largest_component)
    op = build_operator(g, operator_spec(args))
    v = read_vector(args.vector) if args.vector else np.ones(g.n)
    result = op.apply(v)
    emit(config, ["node", "value"], enumerate(result))


def register(subparsers, common: argparse.ArgumentParser) -> None:
    apply = subparsers.add_parser("apply", parents=[common], help="Применить лапласиан к вектору")
    add_graph_option(apply)
    add_operator_options(apply)
    apply.add_argument(
        "--vector", default=None,
        help="CSV с вектором ('-' — stdin); по умолчанию вектор из единиц",
    )
    apply.set_defaults(handler=run_apply)
