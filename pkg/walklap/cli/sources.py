"""
Источники графов для CLI.

Форматы:
    builtin:<генератор>[:аргумент]*   например builtin:trap:5:8, builtin:grid:30:30
    dataset:<Group>/<Name>           сеть в WALKLAP_DATASET_DIR
    <путь>                           .mtx — Matrix Market, иначе список рёбер
"""

from loguru import logger

from walklap.core.exceptions import ParameterError
from walklap.models.graph import Graph
from walklap.services.generators import GENERATORS
from walklap.services.graph_core import (
    component_count,
    largest_component,
    load_graph_file,
    resolve_dataset,
)


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError as e:
        raise ParameterError(f"generator argument is not a number: {text!r}") from e


def builtin_graph(spec: str) -> Graph:
    """Граф встроенного генератора по строке <имя>[:аргумент]*."""
    name, *args = spec.split(":")
    generator = GENERATORS.get(name)
    if generator is None:
        known = ", ".join(sorted(GENERATORS))
        raise ParameterError(f"unknown builtin graph {name!r} (known: {known})")
    try:
        return generator(*[_number(a) for a in args])
    except TypeError as e:
        raise ParameterError(f"bad arguments for builtin graph {name!r}: {e}") from e


def resolve_graph(source: str, component: bool = False) -> Graph:
    """
    Загрузить граф по строке источника.

    Args:
        source: builtin:..., dataset:... или путь к файлу
        component: Оставить только наибольшую компоненту связности
    """
    if source.startswith("builtin:"):
        g = builtin_graph(source[len("builtin:"):])
    elif source.startswith("dataset:"):
        g = load_graph_file(resolve_dataset(source[len("dataset:"):]))
    else:
        g = load_graph_file(source)

    if component and component_count(g) > 1:
        g, _ = largest_component(g)
        logger.info(f"Restricted to the largest component: n={g.n}, m={g.m}")
    return g
