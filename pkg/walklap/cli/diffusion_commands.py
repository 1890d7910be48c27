"""
Подкоманды diffuse, stationary, explore, gap.
"""

import argparse

from walklap.cli.options import add_graph_option, add_operator_options, int_list, operator_spec
from walklap.cli.output import emit
from walklap.cli.sources import resolve_graph
from walklap.models.diffusion import ProbabilityVector
from walklap.models.run import RunConfig
from walklap.services.diffusion import (
    diffuse,
    exploration_history,
    markov_chain,
    spectral_gap,
)
from walklap.services.operators import build_operator


def _operator(args: argparse.Namespace):
    g = resolve_graph(args.graph, args.largest_component)
    return build_operator(g, operator_spec(args))


def run_diffuse(args: argparse.Namespace, config: RunConfig) -> None:
    op = _operator(args)
    if args.start is None:
        p0 = ProbabilityVector.uniform(op.n)
    else:
        p0 = ProbabilityVector.point_mass(op.n, args.start)
    p = diffuse(op, p0, args.time)
    emit(config, ["node", "p"], enumerate(p.p))


def add_weighting_option(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--weighting", choices=["communicability", "diagonal"], default="communicability",
        help="Веса цепи: f(A)1 (по умолчанию) или диагональ оператора",
    )


def run_stationary(args: argparse.Namespace, config: RunConfig) -> None:
    chain = markov_chain(_operator(args), args.weighting)
    rows = zip(range(chain.n), chain.stationary.p, chain.diagonal)
    emit(config, ["node", "pi", "weight"], rows)


def run_explore(args: argparse.Namespace, config: RunConfig) -> None:
    chain = markov_chain(_operator(args), args.weighting)
    history = exploration_history(chain, args.start, args.checkpoints, args.support_tol)
    rows = [(step, len(nodes), " ".join(map(str, nodes))) for step, nodes in history.items()]
    emit(config, ["checkpoint", "visited", "nodes"], rows, payload=history)


def run_gap(args: argparse.Namespace, config: RunConfig) -> None:
    chain = markov_chain(_operator(args), args.weighting)
    emit(config, ["family", "gap"], [(chain.provenance, spectral_gap(chain))])


def register(subparsers, common: argparse.ArgumentParser) -> None:
    diffuse_parser = subparsers.add_parser(
        "diffuse", parents=[common], help="Непрерывная диффузия p(t) = p0 exp(-tL)"
    )
    add_graph_option(diffuse_parser)
    add_operator_options(diffuse_parser)
    diffuse_parser.add_argument("--time", "-t", type=float, required=True, help="Время t >= 0")
    diffuse_parser.add_argument(
        "--start", type=int, default=None, help="Стартовая вершина (по умолчанию равномерно)"
    )
    diffuse_parser.set_defaults(handler=run_diffuse)

    stationary = subparsers.add_parser(
        "stationary", parents=[common], help="Стационарное распределение цепи P = I - D^-1 L"
    )
    add_graph_option(stationary)
    add_operator_options(stationary)
    add_weighting_option(stationary)
    stationary.set_defaults(handler=run_stationary)

    explore = subparsers.add_parser(
        "explore", parents=[common], help="История исследования графа цепью Маркова"
    )
    add_graph_option(explore)
    add_operator_options(explore)
    add_weighting_option(explore)
    explore.add_argument("--start", type=int, default=0, help="Стартовая вершина")
    explore.add_argument("--checkpoints", type=int_list, default=None, help="Например 20,40,80")
    explore.add_argument("--support-tol", type=float, default=None, help="Порог посещения")
    explore.set_defaults(handler=run_explore)

    gap = subparsers.add_parser("gap", parents=[common], help="Спектральный зазор цепи")
    add_graph_option(gap)
    add_operator_options(gap)
    add_weighting_option(gap)
    gap.set_defaults(handler=run_gap)
