"""
Вывод результатов: строка заголовка, затем CSV или JSON.

Заголовок содержит версию, командную строку и зерно, поэтому
повторный запуск с тем же заголовком даёт тот же файл.
При ошибке во время записи частичный файл удаляется.
"""

import csv
import json
import sys
from contextlib import contextmanager
from typing import Any, Iterable, Iterator, Optional, TextIO

import numpy as np
from loguru import logger

from walklap.core.config import get_settings
from walklap.models.run import RunConfig


def _plain(value: Any) -> Any:
    """numpy-значения в обычные типы Python для CSV/JSON."""
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


@contextmanager
def output_stream(config: RunConfig) -> Iterator[TextIO]:
    """Поток вывода с уже записанным заголовком."""
    header = config.header(get_settings().app_version)
    if config.output is None:
        sys.stdout.write(header + "\n")
        yield sys.stdout
        sys.stdout.flush()
        return

    path = config.output
    try:
        with path.open("w", newline="") as stream:
            stream.write(header + "\n")
            yield stream
    except BaseException:
        path.unlink(missing_ok=True)
        logger.warning(f"Removed partial output file {path}")
        raise
    logger.info(f"Wrote {path}")


def emit(
    config: RunConfig,
    columns: list[str],
    rows: Iterable[Iterable[Any]],
    payload: Optional[Any] = None,
) -> None:
    """
    Записать таблицу (CSV) или payload (JSON).

    Без payload JSON строится из таблицы как список объектов.
    """
    rows = [[_plain(v) for v in row] for row in rows]
    with output_stream(config) as stream:
        if config.as_json:
            body = payload if payload is not None else [dict(zip(columns, row)) for row in rows]
            json.dump(_plain(body), stream, indent=2)
            stream.write("\n")
        else:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(columns)
            writer.writerows(rows)
