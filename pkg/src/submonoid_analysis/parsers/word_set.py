import logging
from pathlib import Path

from pydantic import ValidationError

from submonoid_analysis.errors import AlphabetError, WordSetParseError
from submonoid_analysis.parsers.base import (
    BaseParser,
    check_file,
    is_json,
    iter_lines,
    read_json,
    split_header,
)
from submonoid_analysis.words import Alphabet, FiniteWordSet, Word

logger = logging.getLogger(__name__)


class WordSetParser(BaseParser[FiniteWordSet]):
    """
    Parser for finite word set files.

    Text format, one word per line with `#` comments:

    ```
    alphabet: a b
    a
    ab
    ba
    ```

    The `alphabet:` header is optional. Without it the alphabet is the sorted
    set of characters used by the words, which are then read one character
    per symbol. Multi-character symbols need the header and are separated by
    spaces within a word. Powers such as `a^2` are accepted.

    JSON format: `{"alphabet": ["a", "b"], "words": ["a", "ab", "ba"]}`,
    `alphabet` being optional.
    """

    @staticmethod
    def parse(file_path: Path, alphabet: Alphabet | None = None) -> FiniteWordSet:
        """
        Parses a word set file.

        Args:
            file_path: Path to the word set file.
            alphabet: The alphabet to read the words with, overriding any
                alphabet declared in the file. Defaults to `None`.
        Returns:
            FiniteWordSet: The word set in canonical order.
        Raises:
            FileNotFoundError: If the file does not exist.
            WordSetParseError: If the file is malformed, declares the empty
                word, the same word twice or no word at all, or if a word uses a
                symbol outside the declared alphabet.
        """
        logger.info(f"Parsing the word set found at: {file_path}")
        check_file(file_path)

        declared: Alphabet | None = alphabet
        texts: list[tuple[int, str]] = []
        if is_json(file_path):
            data = read_json(file_path)
            if not isinstance(data, dict) or not isinstance(data.get("words"), list):
                raise WordSetParseError(f"Expected an object with a `words` list in {file_path}")
            if declared is None and data.get("alphabet") is not None:
                declared = WordSetParser._alphabet(data["alphabet"], file_path)
            texts = [(index, str(text)) for index, text in enumerate(data["words"], start=1)]
        else:
            for line_index, line in iter_lines(file_path):
                header = split_header(line)
                if header is not None:
                    key, value = header
                    if key != "alphabet":
                        raise WordSetParseError(f"Unknown header {key!r} at line {line_index} of {file_path}")
                    if texts:
                        raise WordSetParseError(f"The alphabet header must precede the words, line {line_index} "
                                                f"of {file_path}")
                    if declared is None:
                        declared = WordSetParser._alphabet(value.split(), file_path)
                    continue
                texts.append((line_index, line))

        if not texts:
            raise WordSetParseError(f"No words found in {file_path}")
        if declared is None:
            declared = Alphabet(symbols=tuple(sorted({character for _, text in texts
                                                      for character in text
                                                      if not character.isspace() and not character.isdigit()
                                                      and character != "^"})))
            logger.debug(f"Inferred alphabet: {declared.symbols}")

        words: list[Word] = []
        for line_index, text in texts:
            try:
                word = declared.parse_word(text)
            except AlphabetError as e:
                raise WordSetParseError(f"Line {line_index} of {file_path}: {e}") from e
            if len(word) == 0:
                raise WordSetParseError(f"Line {line_index} of {file_path}: the empty word cannot be a generator")
            if word in words:
                raise WordSetParseError(f"Line {line_index} of {file_path}: duplicate word {text!r}")
            words.append(word)
        try:
            return FiniteWordSet.from_words(words, declared)
        except (ValidationError, ValueError) as e:
            raise WordSetParseError(f"Invalid word set in {file_path}: {e}") from e

    @staticmethod
    def _alphabet(symbols: object, file_path: Path) -> Alphabet:
        try:
            if isinstance(symbols, str):
                return Alphabet.of(symbols)
            return Alphabet(symbols=tuple(str(symbol) for symbol in symbols))  # type: ignore[union-attr]
        except (ValidationError, TypeError) as e:
            raise WordSetParseError(f"Invalid alphabet in {file_path}: {e}") from e
