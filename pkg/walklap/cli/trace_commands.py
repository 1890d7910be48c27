"""
Подкоманды return-prob и compare.
"""

import argparse

from walklap.cli.options import add_graph_option, add_operator_options, float_list, operator_spec
from walklap.cli.output import emit
from walklap.cli.sources import resolve_graph
from walklap.core.exceptions import ParameterError
from walklap.models.run import RunConfig
from walklap.services.operators import build_operator
from walklap.services.return_probability import (
    compare_families,
    exact_return_probability,
    hutchinson_lanczos,
    mu_sweep,
    time_grid,
    xnystrace_exp,
)


def _times(args: argparse.Namespace):
    return time_grid(args.tmax, args.points, args.log_time)


def run_return_prob(args: argparse.Namespace, config: RunConfig) -> None:
    g = resolve_graph(args.graph, args.largest_component)
    op = build_operator(g, operator_spec(args))
    times = _times(args)
    if args.method == "exact":
        curve = exact_return_probability(op, times)
    elif args.method == "stochastic":
        curve = xnystrace_exp(op, args.probes, times, args.seed, threads=args.threads)
    else:
        curve = hutchinson_lanczos(op, args.probes, times, args.seed)
    emit(config, ["t", "p_hat", "err_est"], curve.rows())


def run_compare(args: argparse.Namespace, config: RunConfig) -> None:
    g = resolve_graph(args.graph, args.largest_component)
    times = _times(args)
    if args.mu_sweep:
        curves = mu_sweep(
            g, args.mu_sweep, times, args.beta, args.method, args.probes, args.seed,
            threads=args.threads,
        )
    else:
        families = [f.strip() for f in args.families.split(",") if f.strip()]
        if not families:
            raise ParameterError("--families must name at least one family")
        curves = compare_families(
            g, families, times, args.method, args.probes, args.seed, threads=args.threads
        )

    columns = ["t"]
    for curve in curves:
        columns.append(curve.label)
        if args.method != "exact":
            columns.append(f"{curve.label}_err")
    rows = []
    for i, t in enumerate(times):
        row = [t]
        for curve in curves:
            row.append(curve.values[i])
            if args.method != "exact":
                row.append(curve.error_estimates[i])
        rows.append(row)
    emit(config, columns, rows)


def _add_time_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tmax", type=float, default=10.0, help="Правый конец сетки t*")
    parser.add_argument("--points", type=int, default=None, help="Число точек сетки")
    parser.add_argument("--log-time", action="store_true", help="Логарифмическая сетка")
    parser.add_argument(
        "--method", choices=["exact", "stochastic", "hutchinson"], default="exact",
        help="exact (спектр), stochastic (XNysTrace-exp) или hutchinson",
    )
    parser.add_argument("--probes", type=int, default=4, help="Число зондов M")


def register(subparsers, common: argparse.ArgumentParser) -> None:
    return_prob = subparsers.add_parser(
        "return-prob", parents=[common], help="Средняя вероятность возврата p(t)"
    )
    add_graph_option(return_prob)
    add_operator_options(return_prob)
    _add_time_options(return_prob)
    return_prob.set_defaults(handler=run_return_prob)

    compare = subparsers.add_parser(
        "compare", parents=[common], help="Кривые p(t) для нескольких семейств"
    )
    add_graph_option(compare)
    _add_time_options(compare)
    compare.add_argument(
        "--families", default="standard",
        help="Список семейств через запятую, например standard,btdw-exp:mu=0,btdw-exp:mu=1",
    )
    compare.add_argument(
        "--mu-sweep", type=float_list, default=None,
        help="Развёртка 𝕃_μ(exp) по списку μ с общим β (вместо --families)",
    )
    compare.add_argument("--beta", type=float, default=None, help="Общий β для --mu-sweep")
    compare.set_defaults(handler=run_compare)
