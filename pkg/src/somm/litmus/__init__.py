"""Litmus-test language: parsing and event-structure construction."""

from .builder import (
    DEFAULT_EVENT_CAP,
    BuildError,
    DomainDivergence,
    EventCapExceeded,
    build_event_structure,
    gen_store_buffer,
    value_domains,
)
from .parser import LitmusSyntaxError, parse, parse_file
from .program import LitmusTest, Outcome, to_source

__all__ = [
    "BuildError",
    "DEFAULT_EVENT_CAP",
    "DomainDivergence",
    "EventCapExceeded",
    "LitmusSyntaxError",
    "LitmusTest",
    "Outcome",
    "build_event_structure",
    "gen_store_buffer",
    "parse",
    "parse_file",
    "to_source",
    "value_domains",
]
