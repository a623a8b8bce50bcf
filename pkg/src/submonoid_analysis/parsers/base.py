import json
import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Generic, Iterator, TypeVar

from submonoid_analysis.errors import WordSetParseError

logger = logging.getLogger(__name__)

ParsedT = TypeVar("ParsedT")

COMMENT_PREFIX = "#"


class BaseParser(ABC, Generic[ParsedT]):
    @staticmethod
    @abstractmethod
    def parse(file_path: Path) -> ParsedT:
        """
        Parse the given file and return the object it describes.

        Args:
            file_path: The path to the file to parse. Files ending in `.json`
                are read as JSON, every other file as the line based text
                format of the parser.

        Returns:
            ParsedT: The parsed object.
        Raises:
            WordSetParseError: If the file cannot be parsed.
        """


def check_file(file_path: Path) -> None:
    """
    Raises:
        FileNotFoundError: If the path does not exist.
        ValueError: If the path is not a file.
    """
    if not file_path.exists():
        raise FileNotFoundError(f"Cannot find the file at: {file_path}")
    if not file_path.is_file():
        raise ValueError(f"The path is not a file: {file_path}")


def is_json(file_path: Path) -> bool:
    return file_path.suffix.lower() == ".json"


def read_json(file_path: Path) -> Any:
    """
    Raises:
        WordSetParseError: If the file is not valid JSON.
    """
    with file_path.open("r", encoding="utf-8") as json_fp:
        try:
            return json.load(json_fp)
        except json.JSONDecodeError as e:
            raise WordSetParseError(f"Invalid JSON in {file_path}: {e}") from e


def iter_lines(file_path: Path) -> Iterator[tuple[int, str]]:
    """
    Yields the (1 based line number, stripped line) pairs of a text file,
    skipping blank lines and `#` comments.
    """
    with file_path.open("r", encoding="utf-8") as text_fp:
        for line_index, line in enumerate(text_fp, start=1):
            line = line.split(COMMENT_PREFIX, 1)[0].strip()
            if not line:
                continue
            logger.debug(f"Line {line_index}: {line}")
            yield line_index, line


def split_header(line: str) -> tuple[str, str] | None:
    """
    Returns `(key, value)` for a header line such as `alphabet: a b`, None
    for any other line.
    """
    key, separator, value = line.partition(":")
    if not separator or not key.strip().isidentifier():
        return None
    return key.strip().lower(), value.strip()
