import logging
from pathlib import Path

from pydantic import ValidationError

from submonoid_analysis.automata import MultiplicityAutomaton, ReductionMap
from submonoid_analysis.errors import WordSetParseError
from submonoid_analysis.parsers.base import BaseParser, check_file, is_json, iter_lines, read_json

logger = logging.getLogger(__name__)

ARROW = "->"


class ReductionMapParser(BaseParser[dict[str, str]]):
    """
    Parser for state map files ρ: P → Q.

    Text format, one `p -> q` pair per line. JSON format, an object
    `{"p": "q", ...}`.
    """

    @staticmethod
    def parse(file_path: Path) -> dict[str, str]:
        """
        Parses a state map file.

        Args:
            file_path: Path to the map file.
        Returns:
            dict[str, str]: The image of every listed state, in file order.
        Raises:
            FileNotFoundError: If the file does not exist.
            WordSetParseError: If a line is malformed or a state is mapped twice.
        """
        logger.info(f"Parsing the state map found at: {file_path}")
        check_file(file_path)

        if is_json(file_path):
            data = read_json(file_path)
            if not isinstance(data, dict):
                raise WordSetParseError(f"Expected a JSON object in {file_path}")
            return {str(source): str(target) for source, target in data.items()}

        mapping: dict[str, str] = {}
        for line_index, line in iter_lines(file_path):
            source, arrow, target = (part.strip() for part in line.partition(ARROW))
            if not arrow or not source or not target:
                raise WordSetParseError(f"Expected `state -> state` at line {line_index} of {file_path}, "
                                        f"got: {line!r}")
            if source in mapping:
                raise WordSetParseError(f"State {source!r} is mapped twice, line {line_index} of {file_path}")
            mapping[source] = target
        if not mapping:
            raise WordSetParseError(f"No state pairs found in {file_path}")
        return mapping

    @staticmethod
    def parse_reduction(file_path: Path,
                        source: MultiplicityAutomaton,
                        target: MultiplicityAutomaton) -> ReductionMap:
        """
        Parses a state map file into a `ReductionMap` between the two given
        automata.

        Raises:
            WordSetParseError: If the file cannot be parsed or the map is not
                defined on every source state, onto the target states and
                compatible with the initial and terminal states.
        """
        mapping = ReductionMapParser.parse(file_path)
        try:
            return ReductionMap(source=source, target=target, mapping=mapping)
        except (ValidationError, ValueError) as e:
            raise WordSetParseError(f"Invalid state map in {file_path}: {e}") from e
