"""Command-line subcommands."""

from walklap.cli import (
    diffusion_commands,
    graph_commands,
    operator_commands,
    reproduce_commands,
    trace_commands,
)

# Каждый модуль предоставляет register(subparsers, common)
COMMAND_MODULES = [
    graph_commands,
    operator_commands,
    diffusion_commands,
    trace_commands,
    reproduce_commands,
]

__all__ = ["COMMAND_MODULES"]
