"""
Подкоманды info, spectral, counts.
"""

import argparse

import numpy as np
from loguru import logger

from walklap.cli.options import add_graph_option, add_operator_options, float_list, operator_spec
from walklap.cli.output import emit
from walklap.cli.sources import resolve_graph
from walklap.core.exceptions import ParameterError
from walklap.models.run import RunConfig
from walklap.services.graph_core import component_count
from walklap.services.operators import build_operator
from walklap.services.spectral import dense_spectrum, spectral_radius_adjacency, spectral_radius_Z
from walklap.services.walk_calculus import btdw_counts, z_operator


def run_info(args: argparse.Namespace, config: RunConfig) -> None:
    g = resolve_graph(args.graph, args.largest_component)
    rho_a = spectral_radius_adjacency(g).value
    rho_z = spectral_radius_Z(z_operator(g, args.mu)).value
    rows = [
        ("n", g.n),
        ("m", g.m),
        ("components", component_count(g)),
        ("rho_A", rho_a),
        (f"rho_Z(mu={args.mu:g})", rho_z),
    ]
    emit(config, ["quantity", "value"], rows, payload={k: v for k, v in rows})


def run_spectral(args: argparse.Namespace, config: RunConfig) -> None:
    g = resolve_graph(args.graph, args.largest_component)
    rows = []
    estimate = spectral_radius_adjacency(g)
    rows.append(("rho_A", "", estimate.value, estimate.iterations, estimate.method))
    for mu in args.mus:
        estimate = spectral_radius_Z(z_operator(g, mu))
        rows.append(("rho_Z", mu, estimate.value, estimate.iterations, estimate.method))

    if args.eigen:
        op = build_operator(g, operator_spec(args))
        spectrum = dense_spectrum(op)
        rows.append((f"lambda_min[{op.label()}]", "", spectrum.smallest, 0, "dense"))
        rows.append((f"lambda_max[{op.label()}]", "", spectrum.largest, 0, "dense"))
    emit(config, ["quantity", "mu", "value", "iterations", "method"], rows)


def run_counts(args: argparse.Namespace, config: RunConfig) -> None:
    g = resolve_graph(args.graph, args.largest_component)
    if args.k < 0:
        raise ParameterError(f"--k must be nonnegative, got {args.k}")
    counts = btdw_counts(g, args.mu, args.k)
    lengths = range(args.k + 1) if args.all else [args.k]
    rows = []
    for k in lengths:
        q = counts[k]
        for i, j in zip(*np.nonzero(q)):
            rows.append((k, int(i), int(j), float(q[i, j])))
    logger.debug(f"counts: {len(rows)} nonzero entries")
    emit(config, ["k", "i", "j", "value"], rows)


def register(subparsers, common: argparse.ArgumentParser) -> None:
    info = subparsers.add_parser("info", parents=[common], help="n, m, компоненты, ρ(A), ρ(Z)")
    add_graph_option(info)
    info.add_argument("--mu", type=float, default=1.0, help="μ для ρ(Z)")
    info.set_defaults(handler=run_info)

    spectral = subparsers.add_parser(
        "spectral", parents=[common], help="Спектральные радиусы и крайние собственные значения"
    )
    add_graph_option(spectral)
    add_operator_options(spectral)
    spectral.add_argument("--mus", type=float_list, default=[0.0, 0.5, 1.0], help="Список μ для ρ(Z)")
    spectral.add_argument("--eigen", action="store_true", help="Крайние собственные значения оператора")
    spectral.set_defaults(handler=run_spectral)

    counts = subparsers.add_parser("counts", parents=[common], help="Матрицы числа блужданий q_k")
    add_graph_option(counts)
    counts.add_argument("--k", type=int, required=True, help="Длина блуждания")
    counts.add_argument("--mu", type=float, default=0.0, help="Понижение веса возвратов μ")
    counts.add_argument("--all", action="store_true", help="Все длины 0..k")
    counts.set_defaults(handler=run_counts)
