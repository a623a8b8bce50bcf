import json
import logging
from pathlib import Path

from pydantic import ValidationError

from submonoid_analysis.automata import MultiplicityAutomaton
from submonoid_analysis.errors import WordSetParseError
from submonoid_analysis.parsers.base import BaseParser, check_file, is_json, iter_lines, read_json

logger = logging.getLogger(__name__)


class AutomatonParser(BaseParser[MultiplicityAutomaton]):
    """
    Parser for explicit automaton files, used for automata that are not
    built from a word set (the hand-drawn automata of the test fixtures).

    The format is JSON,
    `{"alphabet": [...], "states": [...], "initial": "1", "terminal": "1", "edges": [["1", "a", "2"], ...]}`,
    whatever the file suffix. `alphabet` is optional, it defaults to the
    sorted set of edge labels. `#` comment lines are allowed before the
    JSON body.
    """

    @staticmethod
    def parse(file_path: Path) -> MultiplicityAutomaton:
        """
        Parses an automaton file.

        Args:
            file_path: Path to the automaton file.
        Returns:
            MultiplicityAutomaton: The automaton, edges sorted canonically.
        Raises:
            FileNotFoundError: If the file does not exist.
            WordSetParseError: If the file is not a valid automaton description.
        """
        logger.info(f"Parsing the automaton found at: {file_path}")
        check_file(file_path)

        if is_json(file_path):
            data = read_json(file_path)
        else:
            body = "\n".join(line for _, line in iter_lines(file_path))
            try:
                data = json.loads(body)
            except json.JSONDecodeError as e:
                raise WordSetParseError(f"Invalid JSON in {file_path}: {e}") from e

        if not isinstance(data, dict):
            raise WordSetParseError(f"Expected a JSON object in {file_path}")
        missing = [key for key in ("states", "initial", "terminal", "edges") if key not in data]
        if missing:
            raise WordSetParseError(f"Missing keys {missing} in {file_path}")
        try:
            edges = [tuple(str(part) for part in edge) for edge in data["edges"]]
            alphabet = data.get("alphabet") or sorted({edge[1] for edge in edges if len(edge) == 3})
            return MultiplicityAutomaton.from_edges(alphabet=[str(symbol) for symbol in alphabet],
                                                    states=[str(state) for state in data["states"]],
                                                    initial=str(data["initial"]),
                                                    terminal=str(data["terminal"]),
                                                    edges=edges)
        except (ValidationError, ValueError, TypeError) as e:
            raise WordSetParseError(f"Invalid automaton in {file_path}: {e}") from e
