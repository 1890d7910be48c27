"""
Подкоманды reproduce g58 и reproduce tree.

В выводе g58 вершины нумеруются с единицы: центр пути — вершина 3,
конец пути — вершина 5.
"""

import argparse

from walklap.cli.diffusion_commands import add_weighting_option
from walklap.cli.options import int_list
from walklap.cli.output import emit
from walklap.models.run import RunConfig
from walklap.services.diffusion import (
    TRAP_FAMILIES,
    TREE_FAMILIES,
    trap_stationary,
    tree_exploration,
)


def _families(text):
    if text is None:
        return None
    return [f.strip() for f in text.split(",") if f.strip()]


def run_g58(args: argparse.Namespace, config: RunConfig) -> None:
    families = _families(args.family) or TRAP_FAMILIES
    stationary = trap_stationary(families, args.path_length, args.leaves, args.weighting)
    n = args.path_length + args.leaves
    rows = [[node + 1] + [stationary[f][node] for f in families] for node in range(n)]
    emit(config, ["node"] + families, rows, payload=stationary)


def run_tree(args: argparse.Namespace, config: RunConfig) -> None:
    families = _families(args.family) or TREE_FAMILIES
    result = tree_exploration(
        args.n, args.seed, families, args.checkpoints, args.start, args.weighting
    )
    rows = []
    for family in families:
        entry = result[family]
        for step, nodes in entry["history"].items():
            rows.append((family, step, len(nodes), entry["gap"], " ".join(map(str, nodes))))
    emit(config, ["family", "checkpoint", "visited", "gap", "nodes"], rows, payload=result)


def register(subparsers, common: argparse.ArgumentParser) -> None:
    reproduce = subparsers.add_parser("reproduce", help="Воспроизведение экспериментов")
    pipelines = reproduce.add_subparsers(dest="pipeline", required=True)

    g58 = pipelines.add_parser(
        "g58", parents=[common], help="Стационарные распределения на графе-ловушке G_{5,8}"
    )
    g58.add_argument("--family", default=None, help="Семейства через запятую")
    g58.add_argument("--path-length", type=int, default=5, help="Длина пути l")
    g58.add_argument("--leaves", type=int, default=8, help="Число листьев m")
    add_weighting_option(g58)
    g58.set_defaults(handler=run_g58)

    tree = pipelines.add_parser(
        "tree", parents=[common], help="Исследование случайного дерева цепями Маркова"
    )
    tree.add_argument("--family", default=None, help="Семейства через запятую")
    tree.add_argument("--n", type=int, default=100, help="Число вершин дерева")
    tree.add_argument("--start", type=int, default=0, help="Корень (стартовая вершина)")
    tree.add_argument("--checkpoints", type=int_list, default=None, help="Например 20,40,80")
    add_weighting_option(tree)
    tree.set_defaults(handler=run_tree)
