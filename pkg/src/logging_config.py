"""Structured logging for library and CLI runs.

Every line carries the run_id of the CLI invocation that produced it.
Log output goes to standard error; standard output is reserved for
command results (CSV, JSON, text reports).
"""

import logging
import sys
import uuid
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Any, TextIO

import numpy as np
import structlog
from structlog.typing import EventDict, Processor

run_id_var: ContextVar[str | None] = ContextVar("run_id", default=None)


def add_run_id(logger: Any, method_name: str, event_dict: EventDict) -> EventDict:
    """Add run_id from context to log entries."""
    run_id = run_id_var.get()
    if run_id:
        event_dict["run_id"] = run_id
    return event_dict


def numpy_to_builtin(logger: Any, method_name: str, event_dict: EventDict) -> EventDict:
    """Replace numpy scalars (float64, int64, bool_) with Python values so every renderer can emit them."""
    for key, value in event_dict.items():
        if isinstance(value, np.generic):
            event_dict[key] = value.item()
    return event_dict


def _shared_processors() -> list[Processor]:
    return [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
        add_run_id,
        numpy_to_builtin,
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
    ]


def _renderers(json_format: bool) -> list[Processor]:
    if json_format:
        return [structlog.processors.format_exc_info, structlog.processors.JSONRenderer()]
    return [structlog.processors.ExceptionRenderer(), structlog.dev.ConsoleRenderer(colors=False)]


def setup_logging(log_level: str = "WARNING", json_format: bool = False, stream: TextIO | None = None) -> None:
    """Configure structlog on top of the stdlib root logger.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        json_format: One JSON object per line instead of console rendering
        stream: Destination stream, standard error when omitted
    """
    structlog.configure(
        processors=[*_shared_processors(), *_renderers(json_format)],
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )
    # force: a second CLI run in the same process must replace the handler
    logging.basicConfig(
        format="%(message)s",
        stream=stream or sys.stderr,
        level=getattr(logging, log_level.upper()),
        force=True,
    )


@contextmanager
def run_scope(run_id: str | None = None) -> Iterator[str]:
    """Bind a run_id (fresh UUID by default) for the duration of the block."""
    value = run_id or uuid.uuid4().hex
    token = run_id_var.set(value)
    try:
        yield value
    finally:
        run_id_var.reset(token)


def get_logger(name: str) -> structlog.stdlib.BoundLogger:
    return structlog.get_logger(name)
