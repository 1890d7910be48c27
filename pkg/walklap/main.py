"""
walklap - Главный файл приложения.

Это точка входа командной строки. Здесь:
1. Настраивается логирование
2. Собирается парсер из модулей подкоманд
3. Выполняется подкоманда и ошибки переводятся в код выхода
"""

import argparse
import sys
from typing import Optional

from loguru import logger

from walklap.cli import COMMAND_MODULES
from walklap.cli.options import common_parser
from walklap.core.config import get_settings
from walklap.core.exceptions import WalkLapError
from walklap.models.run import RunConfig

# Коды выхода
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_BAD_INPUT = 2


def setup_logging(verbose: bool = False) -> None:
    """Один обработчик loguru на stderr (stdout занят данными)."""
    settings = get_settings()
    logger.remove()  # Удаляем стандартный handler
    logger.add(
        sys.stderr,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
               "<level>{level: <8}</level> | "
               "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | "
               "<level>{message}</level>",
        level="DEBUG" if verbose or settings.debug else "INFO",
        colorize=True,
    )


def build_parser() -> argparse.ArgumentParser:
    """Парсер со всеми подкомандами."""
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description="Лапласианы на основе блужданий: операторы, диффузия, "
                    "цепи Маркова и вероятности возврата.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.app_version}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = common_parser()
    for module in COMMAND_MODULES:
        module.register(subparsers, common)
    return parser


def _run_config(args: argparse.Namespace, argv: list[str]) -> RunConfig:
    command = args.command
    if getattr(args, "pipeline", None):
        command = f"{command} {args.pipeline}"
    return RunConfig(
        command=command,
        graph=getattr(args, "graph", None),
        family=getattr(args, "family", None),
        seed=args.seed,
        output=args.output,
        as_json=args.as_json,
        argv=["walklap", *argv],
    )


def main(argv: Optional[list[str]] = None) -> int:
    """
    Выполнить одну команду.

    Returns:
        int: 0 — успех, 2 — неверный ввод, 1 — сбой вычислений
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)

    try:
        config = _run_config(args, argv)
        logger.debug(f"Running {config.command} (seed={config.seed})")
        args.handler(args, config)
    except ValueError as e:
        if args.verbose:
            logger.exception(e)
        else:
            logger.error(f"Invalid input: {e}")
        return EXIT_BAD_INPUT
    except WalkLapError as e:
        if args.verbose:
            logger.exception(e)
        else:
            logger.error(f"{type(e).__name__}: {e}")
        return EXIT_FAILURE
    return EXIT_OK


# Для локального запуска через: python walklap/main.py
if __name__ == "__main__":
    sys.exit(main())
