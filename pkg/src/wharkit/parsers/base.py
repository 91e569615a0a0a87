"""Parser protocol, registry, and shared result types."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from ..config import WharConfig
from ..model import ActivityMetadata, SessionData, SessionMetadata


class ParserError(ValueError):
    pass


class ParserNotImplementedError(ParserError):
    pass


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" | "warning"
    location: str
    message: str


@dataclass
class ParseResult:
    activities: list[ActivityMetadata]
    sessions: list[tuple[SessionMetadata, SessionData]]
    issues: list[Issue] = field(default_factory=list)  # cleaning warnings


@dataclass(frozen=True)
class Parser:
    parser_id: str
    parser_version: int  # bumped on behavior change; feeds the standardize hash
    parse: Callable[[Path, WharConfig], ParseResult]


_REGISTRY: dict[str, Parser] = {}


def register(parser: Parser) -> Parser:
    _REGISTRY[parser.parser_id] = parser
    return parser


def get_parser(parser_id: str) -> Parser:
    try:
        return _REGISTRY[parser_id]
    except KeyError:
        available = ", ".join(sorted(_REGISTRY))
        raise KeyError(f"unknown parser_id {parser_id!r}; registered: {available}") from None


def registered_parsers() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


def stub_parser(parser_id: str) -> Parser:
    def parse(raw_dir: Path, cfg: WharConfig) -> ParseResult:
        raise ParserNotImplementedError(
            f"parser {parser_id!r} is not implemented yet; its config is a template. "
            f"Implement a parse function and register it with "
            f"wharkit.parsers.register(Parser({parser_id!r}, 1, parse_fn))."
        )

    return Parser(parser_id=parser_id, parser_version=0, parse=parse)
