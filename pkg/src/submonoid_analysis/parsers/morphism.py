import logging
from pathlib import Path

from pydantic import ValidationError

from submonoid_analysis.errors import WordSetParseError
from submonoid_analysis.parsers.base import (
    BaseParser,
    check_file,
    is_json,
    iter_lines,
    read_json,
    split_header,
)
from submonoid_analysis.words import CodingMorphism

logger = logging.getLogger(__name__)

ARROW = "->"


class MorphismParser(BaseParser[CodingMorphism]):
    """
    Parser for coding morphism files β: B* → A*.

    Text format, one letter of B per line, with optional `source:` and
    `target:` headers giving both alphabets:

    ```
    source: u v w
    target: a b
    u -> a
    v -> ab
    w -> ba
    ```

    JSON format: `{"source": [...], "target": [...], "images": {"u": "a", ...}}`.
    """

    @staticmethod
    def parse(file_path: Path) -> CodingMorphism:
        """
        Parses a coding morphism file.

        Args:
            file_path: Path to the morphism file.
        Returns:
            CodingMorphism: The parsed morphism. Without a `source` header the
                source alphabet lists the letters in file order, without a
                `target` header the target alphabet is the sorted set of
                characters of the images.
        Raises:
            FileNotFoundError: If the file does not exist.
            WordSetParseError: If a line is malformed, a letter is given two
                images, or the images do not define a coding morphism.
        """
        logger.info(f"Parsing the coding morphism found at: {file_path}")
        check_file(file_path)

        source: list[str] | None = None
        target: list[str] | None = None
        images: dict[str, str] = {}
        if is_json(file_path):
            data = read_json(file_path)
            if not isinstance(data, dict) or not isinstance(data.get("images"), dict):
                raise WordSetParseError(f"Expected an object with an `images` mapping in {file_path}")
            source = data.get("source")
            target = data.get("target")
            images = {str(letter): str(image) for letter, image in data["images"].items()}
        else:
            for line_index, line in iter_lines(file_path):
                if ARROW not in line:
                    header = split_header(line)
                    if header is None or header[0] not in ("source", "target"):
                        raise WordSetParseError(f"Expected `letter -> word` at line {line_index} of {file_path}, "
                                                f"got: {line!r}")
                    if header[0] == "source":
                        source = header[1].split()
                    else:
                        target = header[1].split()
                    continue
                letter, _, image = (part.strip() for part in line.partition(ARROW))
                if not letter or " " in letter:
                    raise WordSetParseError(f"Invalid letter {letter!r} at line {line_index} of {file_path}")
                if letter in images:
                    raise WordSetParseError(f"Letter {letter!r} has two images, line {line_index} of {file_path}")
                images[letter] = image

        if not images:
            raise WordSetParseError(f"No letter images found in {file_path}")
        try:
            return CodingMorphism.from_strings(images, source=source, target=target)
        except (ValidationError, ValueError) as e:
            raise WordSetParseError(f"Invalid coding morphism in {file_path}: {e}") from e
