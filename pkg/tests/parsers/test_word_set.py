from pathlib import Path

import pytest

from submonoid_analysis.errors import WordSetParseError
from submonoid_analysis.parsers import WordSetParser
from submonoid_analysis.words import Alphabet
from tests.utils_test import get_test_data_directory, get_test_worked_examples_directory  # noqa: F401


@pytest.fixture
def get_test_word_set_directory(get_test_data_directory: Path) -> Path:  # noqa: F811
    return get_test_data_directory / "parsers" / "word_set"


class TestWordSetParser:

    def test_text_format(self, get_test_worked_examples_directory: Path) -> None:
        word_set = WordSetParser.parse(get_test_worked_examples_directory / "aabba.words")
        assert word_set.alphabet.symbols == ("a", "b")
        assert word_set.render() == "{a, ab, ba}"

    def test_alphabet_header_and_powers(self, get_test_worked_examples_directory: Path) -> None:
        word_set = WordSetParser.parse(get_test_worked_examples_directory / "a2a3.words")
        assert word_set.alphabet.symbols == ("a",)
        assert word_set.words == (("a", "a"), ("a", "a", "a"))

        unused_letter = WordSetParser.parse(get_test_worked_examples_directory / "a.words", Alphabet.of("ab"))
        assert unused_letter.alphabet.symbols == ("a", "b")

    def test_blank_lines_and_comments(self, get_test_word_set_directory: Path) -> None:
        word_set = WordSetParser.parse(get_test_word_set_directory / "with_blank_lines.words")
        assert word_set.render() == "{a, ab, ba}"

    def test_multi_character_symbols(self, get_test_word_set_directory: Path) -> None:
        word_set = WordSetParser.parse(get_test_word_set_directory / "multi_character.words")
        assert word_set.alphabet.symbols == ("x0", "x1")
        assert word_set.words == (("x0",), ("x0", "x1"), ("x1", "x1", "x0"))

    def test_json_format(self, get_test_word_set_directory: Path) -> None:
        word_set = WordSetParser.parse(get_test_word_set_directory / "aabba.json")
        assert word_set.render() == "{a, ab, ba}"

    @pytest.mark.parametrize("file_name, message", [
        ("empty.words", "No words found"),
        ("duplicate.words", "duplicate word"),
        ("unknown_symbol.words", "Line 3"),
        ("late_header.words", "must precede"),
        ("empty_word.words", "empty word"),
        ("invalid.json", "Invalid JSON"),
        ("no_words.json", "`words` list"),
    ])
    def test_malformed(self, get_test_word_set_directory: Path, file_name: str, message: str) -> None:
        with pytest.raises(WordSetParseError, match=message):
            WordSetParser.parse(get_test_word_set_directory / file_name)

    def test_missing_file(self, get_test_word_set_directory: Path) -> None:
        with pytest.raises(FileNotFoundError):
            WordSetParser.parse(get_test_word_set_directory / "missing.words")
        with pytest.raises(ValueError, match="not a file"):
            WordSetParser.parse(get_test_word_set_directory)
