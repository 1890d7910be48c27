"""
Общие флаги подкоманд.
"""

import argparse
from pathlib import Path

from walklap.core.exceptions import ParameterError
from walklap.models.operators import OperatorSpec
from walklap.services.operators import parse_family

FUNCTIONS = {"exp": "exp", "res": "res", "resolvent": "res", "series": "series"}


def common_parser() -> argparse.ArgumentParser:
    """Флаги, доступные у каждой подкоманды."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("-v", "--verbose", action="store_true", help="Логи уровня DEBUG")
    parser.add_argument("--json", action="store_true", dest="as_json", help="Вывод в JSON")
    parser.add_argument("-o", "--output", type=Path, default=None, help="Файл вывода (по умолчанию stdout)")
    parser.add_argument("--seed", type=int, default=0, help="Зерно генератора")
    parser.add_argument("--threads", type=int, default=None, help="Максимум рабочих потоков")
    return parser


def add_graph_option(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "-g", "--graph", required=True,
        help="builtin:<gen>[:args], dataset:<Group>/<Name> или путь к файлу",
    )
    parser.add_argument(
        "--largest-component", action="store_true",
        help="Оставить только наибольшую компоненту связности",
    )


def add_operator_options(parser: argparse.ArgumentParser, default: str = "standard") -> None:
    """--family и флаги параметров, перекрывающие значения из строки семейства."""
    parser.add_argument(
        "-f", "--family", default=default,
        help="Семейство: standard, kwalk, walk-exp, walk-res, walk-series, btdw-exp, "
             "btdw-res, btdw-series, kpath-exp, kpath-pow; параметры через ':key=value'",
    )
    parser.add_argument("--function", choices=sorted(FUNCTIONS), default=None,
                        help="Функция для --family walk|btdw")
    parser.add_argument("--mu", type=float, default=None, help="Параметр μ в [0, 1]")
    parser.add_argument("--alpha", type=float, default=None, help="Параметр резольвенты α")
    parser.add_argument("--beta", type=float, default=None, help="Обратная температура β")
    parser.add_argument("--k", type=int, default=None, help="Длина блуждания для kwalk")
    parser.add_argument("--truncation", type=int, default=None, help="Порядок усечения K")


def operator_spec(args: argparse.Namespace) -> OperatorSpec:
    """Собрать OperatorSpec из --family и флагов-перекрытий."""
    family = args.family
    head, sep, rest = family.partition(":")
    if head in ("walk", "btdw"):
        if args.function is None:
            raise ParameterError(f"--family {head} requires --function")
        family = f"{head}-{FUNCTIONS[args.function]}{sep}{rest}"
    spec = parse_family(family)

    overrides = {
        key: getattr(args, key)
        for key in ("mu", "alpha", "beta", "k", "truncation")
        if getattr(args, key, None) is not None
    }
    if not overrides:
        return spec
    try:
        return OperatorSpec(**{**spec.model_dump(), **overrides})
    except ValueError as e:
        raise ParameterError(f"invalid operator parameters: {e}") from e


def float_list(text: str) -> list[float]:
    """'0,0.5,1' → [0.0, 0.5, 1.0]."""
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e
