"""Python access to the quest SQL analyzer.

Every analysis returns plain dicts and lists decoded from the same JSON the
``quest`` command line tool prints.
"""

import json
from os import PathLike
from typing import Any, Optional, Union

from . import _quest
from ._quest import (
    Catalog,
    FormatError,
    LexError,
    ParseError,
    QuestError,
    ResolutionError,
    UnsupportedFeature,
    ValidationError,
)

__all__ = [
    "Catalog",
    "FormatError",
    "LexError",
    "ParseError",
    "QuestError",
    "ResolutionError",
    "UnsupportedFeature",
    "ValidationError",
    "canonical_sql",
    "check",
    "compare",
    "decompose",
    "decompose_text",
    "far",
    "load_catalog",
    "profile",
    "refs",
    "tag",
    "tag_nl",
]

Path = Union[str, PathLike]


def load_catalog(path: Path) -> Catalog:
    return Catalog(str(path))


def canonical_sql(sql: str) -> str:
    return _quest.parse(sql)


def check(sql: str, catalog: Catalog) -> dict:
    return json.loads(_quest.check(sql, catalog))


def far(sql: str, catalog: Catalog) -> dict:
    return json.loads(_quest.far(sql, catalog))


def tag(sql: str, catalog: Catalog) -> dict:
    return json.loads(_quest.tag(sql, catalog))


def tag_nl(question: str, lexicon: Optional[Path] = None) -> dict:
    return json.loads(_quest.tag_nl(question, None if lexicon is None else str(lexicon)))


def decompose(sql: str, catalog: Catalog) -> dict:
    return json.loads(_quest.decompose(sql, catalog))


def decompose_text(sql: str, catalog: Catalog) -> str:
    return _quest.decompose_text(sql, catalog)


def profile(corpus: Path, catalog: Catalog, name: str = "", threads: int = 1, nl: bool = False) -> dict:
    return json.loads(_quest.profile(str(corpus), catalog, name, threads, nl))


def compare(a: Union[str, dict], b: Union[str, dict]) -> Any:
    """Each side is a built-in reference name or a dict returned by profile()."""
    def spec(x):
        return json.dumps(x) if isinstance(x, dict) else x
    return json.loads(_quest.compare(spec(a), spec(b)))


def refs() -> Any:
    return json.loads(_quest.refs())
