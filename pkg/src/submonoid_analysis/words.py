"""
Words over a finite alphabet, finite word sets and the predicates and
constructions that only need words: factorization counts, codes, minimal
generating sets, completeness, coding morphisms and composition.

A word is a tuple of symbols, the empty tuple being the empty word `1`.
Symbols are usually single characters but named tokens are supported, words
over tokens are rendered space separated.
"""
import heapq
import logging
import re
from collections import defaultdict
from typing import Iterable, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator

from submonoid_analysis.config import ResourceBudgets
from submonoid_analysis.errors import AlphabetError, HypothesisError

logger = logging.getLogger(__name__)

Word = tuple[str, ...]
EMPTY_WORD: Word = ()
EMPTY_WORD_TEXT = "1"

POWER_RE = re.compile(r"^(?P<base>[^\s^]+)\^(?P<exponent>\d+)$")


class Alphabet(BaseModel):
    """
    An ordered finite set of distinct symbols. The order is the one used for
    every canonical tie-break of the package (length-then-alphabet order of
    words).

    Attributes:
        symbols: The symbols in their canonical order.
    """

    model_config = ConfigDict(frozen=True)

    symbols: tuple[str, ...] = Field(title="Symbols", examples=[("a", "b")])

    @model_validator(mode="after")
    def check_symbols(self) -> "Alphabet":
        """
        Checks that the alphabet is nonempty, its symbols are distinct and
        that no symbol is empty or contains whitespace.

        Returns:
            The Alphabet object
        Raises:
            ValueError: If any of the above does not hold.
        """
        if len(self.symbols) == 0:
            raise ValueError("An alphabet must contain at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"Alphabet symbols must be distinct: {self.symbols}")
        for symbol in self.symbols:
            if not symbol or any(character.isspace() for character in symbol) or "^" in symbol:
                raise ValueError(f"Invalid alphabet symbol: {symbol!r}")
        return self

    @classmethod
    def of(cls, symbols: "Alphabet | str | Iterable[str]") -> "Alphabet":
        """
        Builds an alphabet from a string of single character symbols, an
        iterable of symbols or returns the given alphabet unchanged.

        Examples:
            >>> Alphabet.of("ab").symbols
            ('a', 'b')
        """
        if isinstance(symbols, Alphabet):
            return symbols
        if isinstance(symbols, str):
            return cls(symbols=tuple(symbols.split()) if " " in symbols else tuple(symbols))
        return cls(symbols=tuple(symbols))

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self.symbols

    def index(self, symbol: str) -> int:
        """
        Returns the position of the symbol in the alphabet order.

        Raises:
            AlphabetError: If the symbol is not in the alphabet.
        """
        try:
            return self.symbols.index(symbol)
        except ValueError as e:
            raise AlphabetError(f"Symbol {symbol!r} is not in the alphabet {self.symbols}") from e

    @property
    def single_character(self) -> bool:
        """True when every symbol is a single character, words are then juxtaposed."""
        return all(len(symbol) == 1 for symbol in self.symbols)

    def sort_key(self, word: Word) -> tuple[int, tuple[int, ...]]:
        """
        The length-then-alphabet order key of a word.
        """
        return (len(word), tuple(self.index(symbol) for symbol in word))

    def validate_word(self, word: Word) -> Word:
        """
        Returns the word unchanged after checking that every symbol is in the
        alphabet.

        Raises:
            AlphabetError: If a symbol of the word is not in the alphabet.
        """
        for symbol in word:
            if symbol not in self.symbols:
                raise AlphabetError(f"Symbol {symbol!r} of word {word} is not in the alphabet {self.symbols}")
        return word

    def render(self, word: Word) -> str:
        """
        Renders a word, juxtaposed for single character alphabets and space
        separated otherwise. The empty word is rendered as `1`.
        """
        if len(word) == 0:
            return EMPTY_WORD_TEXT
        separator = "" if self.single_character else " "
        return separator.join(word)

    def parse_word(self, text: str) -> Word:
        """
        Parses the text of a word. `1` and the empty string denote the empty
        word (unless `1` is a symbol), `x^n` denotes the n-th power of the
        symbol `x`.

        Examples:
            >>> Alphabet.of("ab").parse_word("a^2b")
            ('a', 'a', 'b')

        Raises:
            AlphabetError: If the text uses a symbol not in the alphabet.
        """
        stripped = text.strip()
        if stripped == "" or (stripped == EMPTY_WORD_TEXT and EMPTY_WORD_TEXT not in self.symbols):
            return EMPTY_WORD

        word: list[str] = []
        if self.single_character:
            position = 0
            characters = "".join(stripped.split())
            while position < len(characters):
                symbol = characters[position]
                position += 1
                exponent = 1
                if position < len(characters) and characters[position] == "^":
                    digits_end = position + 1
                    while digits_end < len(characters) and characters[digits_end].isdigit():
                        digits_end += 1
                    if digits_end == position + 1:
                        raise AlphabetError(f"Missing exponent after '^' in word: {text!r}")
                    exponent = int(characters[position + 1:digits_end])
                    position = digits_end
                word.extend([symbol] * exponent)
        else:
            for token in stripped.split():
                power_match = POWER_RE.match(token)
                if power_match:
                    word.extend([power_match.group("base")] * int(power_match.group("exponent")))
                else:
                    word.append(token)
        return self.validate_word(tuple(word))


def concatenate(*words: Word) -> Word:
    """Concatenation of words, the product of the free monoid."""
    result: list[str] = []
    for word in words:
        result.extend(word)
    return tuple(result)


class FiniteWordSet(BaseModel):
    """
    A finite set X of nonempty words over an alphabet A. The words are kept in
    length-then-alphabet order.

    Attributes:
        alphabet: The alphabet A, some of its symbols may not occur in X.
        words: The words of X, nonempty and distinct.
    """

    model_config = ConfigDict(frozen=True)

    alphabet: Alphabet
    words: tuple[Word, ...]

    @model_validator(mode="after")
    def check_words(self) -> "FiniteWordSet":
        """
        Checks that X is nonempty, contains no empty word, no duplicate and
        only words over the alphabet, and that the words are in canonical
        order.

        Returns:
            The FiniteWordSet object
        Raises:
            ValueError: If any of the above does not hold.
        """
        if len(self.words) == 0:
            raise ValueError("A word set must contain at least one word")
        if len(set(self.words)) != len(self.words):
            raise ValueError(f"Duplicate words in word set: {self.words}")
        for word in self.words:
            if len(word) == 0:
                raise ValueError("The empty word cannot belong to a generating set X ⊂ A⁺")
            self.alphabet.validate_word(word)
        if list(self.words) != sorted(self.words, key=self.alphabet.sort_key):
            raise ValueError("Words must be given in length-then-alphabet order, use FiniteWordSet.from_words")
        return self

    @classmethod
    def from_words(cls,
                   words: Iterable[Sequence[str]],
                   alphabet: Alphabet | str | Iterable[str] | None = None,
                   ) -> "FiniteWordSet":
        """
        Builds a word set from words given as sequences of symbols, sorting
        them canonically.

        Args:
            words: The words of the set.
            alphabet: The alphabet. Defaults to `None` in which case the
                alphabet is the sorted set of symbols occurring in `words`.

        Returns:
            FiniteWordSet: The word set.

        Raises:
            ValueError: If the words do not form a valid word set.
        """
        word_tuples = [tuple(word) for word in words]
        if alphabet is None:
            resolved_alphabet = Alphabet(symbols=tuple(sorted({symbol for word in word_tuples for symbol in word})))
        else:
            resolved_alphabet = Alphabet.of(alphabet)
        for word in word_tuples:
            resolved_alphabet.validate_word(word)
        return cls(alphabet=resolved_alphabet,
                   words=tuple(sorted(word_tuples, key=resolved_alphabet.sort_key)))

    @classmethod
    def from_strings(cls,
                     texts: Iterable[str],
                     alphabet: Alphabet | str | Iterable[str] | None = None,
                     ) -> "FiniteWordSet":
        """
        Builds a word set from the text of its words, e.g.
        `FiniteWordSet.from_strings(["a", "ab", "ba"])`.

        When no alphabet is given every word is read as a string of single
        character symbols (with `x^n` powers expanded).
        """
        texts = list(texts)
        if alphabet is None:
            symbols = sorted({character for text in texts for character in text
                              if not character.isspace() and not character.isdigit() and character != "^"})
            resolved_alphabet = Alphabet(symbols=tuple(symbols))
        else:
            resolved_alphabet = Alphabet.of(alphabet)
        return cls.from_words([resolved_alphabet.parse_word(text) for text in texts], resolved_alphabet)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: object) -> bool:
        return word in self.words

    @property
    def max_length(self) -> int:
        """Length of the longest word of X."""
        return max(len(word) for word in self.words)

    def render(self) -> str:
        """Renders the set as `{w1, w2, ...}` in canonical order."""
        return "{" + ", ".join(self.alphabet.render(word) for word in self.words) + "}"

    def with_words(self, words: Iterable[Word]) -> "FiniteWordSet":
        """A word set over the same alphabet with the given words."""
        return FiniteWordSet.from_words(words, self.alphabet)


class CodeCheck(BaseModel):
    """
    Result of `is_code`.

    Attributes:
        is_code: True if every word has at most one factorization over X.
        witness: On failure, a shortest word with two factorizations (ties
            broken by alphabet order).
        factorizations: On failure, two distinct factorizations of the witness.
    """

    is_code: bool
    witness: Word | None = None
    factorizations: tuple[tuple[Word, ...], ...] = ()


class CompletenessCheck(BaseModel):
    """
    Result of `is_complete`.

    Attributes:
        is_complete: True if every word of A* is a factor of a word of X*.
        witness: On failure, a shortest word that is not a factor of X*
            (ties broken by alphabet order).
        subsets_visited: Number of subsets built by the determinisation.
    """

    is_complete: bool
    witness: Word | None = None
    subsets_visited: int = 0


class CodingMorphism(BaseModel):
    """
    A morphism β: B* → A* whose restriction to B is a bijection onto its image
    Z = β(B) ⊂ A⁺.

    Attributes:
        source: The alphabet B.
        target: The alphabet A.
        images: The image β(b) of each letter b of B.
    """

    model_config = ConfigDict(frozen=True)

    source: Alphabet
    target: Alphabet
    images: dict[str, Word]

    @model_validator(mode="after")
    def check_bijection(self) -> "CodingMorphism":
        """
        Checks that every letter of B has exactly one nonempty image over A and
        that distinct letters have distinct images.

        Returns:
            The CodingMorphism object
        Raises:
            ValueError: If β is not a coding morphism.
        """
        if set(self.images) != set(self.source.symbols):
            raise ValueError(f"The letters with an image {sorted(self.images)} must be exactly "
                             f"the source alphabet {self.source.symbols}")
        for letter, image in self.images.items():
            if len(image) == 0:
                raise ValueError(f"The image of {letter!r} must be a nonempty word")
            self.target.validate_word(image)
        if len(set(self.images.values())) != len(self.images):
            raise ValueError(f"A coding morphism must be injective on letters: {self.images}")
        return self

    @classmethod
    def from_strings(cls,
                     images: dict[str, str],
                     source: Alphabet | str | Iterable[str] | None = None,
                     target: Alphabet | str | Iterable[str] | None = None,
                     ) -> "CodingMorphism":
        """
        Builds a coding morphism from texts, e.g.
        `CodingMorphism.from_strings({"u": "a", "v": "ab", "w": "ba"})`.

        Args:
            images: The text of the image of each letter.
            source: The alphabet B, defaults to the letters of `images` in
                insertion order.
            target: The alphabet A, defaults to the sorted single character
                symbols of the images.
        """
        source_alphabet = Alphabet.of(source) if source is not None else Alphabet(symbols=tuple(images))
        if target is None:
            target_alphabet = Alphabet(symbols=tuple(sorted({character for text in images.values()
                                                             for character in text
                                                             if not character.isspace()
                                                             and not character.isdigit()
                                                             and character != "^"})))
        else:
            target_alphabet = Alphabet.of(target)
        return cls(source=source_alphabet,
                   target=target_alphabet,
                   images={letter: target_alphabet.parse_word(text) for letter, text in images.items()})

    def apply(self, word: Word) -> Word:
        """
        Returns β(word).

        Raises:
            AlphabetError: If the word is not over the source alphabet.
        """
        self.source.validate_word(word)
        return concatenate(*(self.images[letter] for letter in word))

    def image_set(self) -> FiniteWordSet:
        """Returns Z = β(B) as a word set over the target alphabet."""
        return FiniteWordSet.from_words(self.images.values(), self.target)

    def letter_of(self, image: Word) -> str:
        """Returns the letter b with β(b) = image."""
        for letter, letter_image in self.images.items():
            if letter_image == image:
                return letter
        raise KeyError(f"{image} is not the image of a letter")


class CompositionResult(BaseModel):
    """
    Result of `compose`.

    Attributes:
        composed: X = β(Y).
        trimmed_y: Y′ ⊆ Y with β(Y′) = X and β injective on Y′.
        was_trim: True if β was already injective on Y.
        removed: The elements of Y removed by trimming.
    """

    composed: FiniteWordSet
    trimmed_y: FiniteWordSet
    was_trim: bool
    removed: tuple[Word, ...] = ()


def factorizations(word_set: FiniteWordSet, word: Word, limit: int | None = None) -> list[tuple[Word, ...]]:
    """
    Enumerates the factorizations (x₁, …, xₙ) of a word into words of X.

    Args:
        word_set: The set X.
        word: The word to factorize.
        limit: Stop after this many factorizations. Defaults to `None`, no
            limit.

    Returns:
        list[tuple[Word, ...]]: The factorizations, the empty word has the
            single empty factorization.

    Raises:
        AlphabetError: If the word is not over the alphabet of X.
    """
    word_set.alphabet.validate_word(word)
    results: list[tuple[Word, ...]] = []

    def _extend(position: int, prefix: list[Word]) -> None:
        if limit is not None and len(results) >= limit:
            return
        if position == len(word):
            results.append(tuple(prefix))
            return
        for element in word_set.words:
            end = position + len(element)
            if word[position:end] == element:
                prefix.append(element)
                _extend(end, prefix)
                prefix.pop()

    _extend(0, [])
    return results


def factorization_count(word_set: FiniteWordSet, word: Word) -> int:
    """
    Returns the number of factorizations of `word` into words of X, i.e. the
    multiplicity of the word in u(X)*. Computed by dynamic programming over
    the prefixes of the word with arbitrary precision integers.

    Args:
        word_set: The set X.
        word: The word w.

    Returns:
        int: |{(x₁,…,xₙ) : n ≥ 0, xᵢ ∈ X, x₁⋯xₙ = w}|, 1 for the empty word.

    Raises:
        AlphabetError: If the word is not over the alphabet of X.

    Examples:
        >>> factorization_count(FiniteWordSet.from_strings(["a", "aa"]), ("a", "a", "a"))
        3
    """
    word_set.alphabet.validate_word(word)
    counts = [0] * (len(word) + 1)
    counts[0] = 1
    for end in range(1, len(word) + 1):
        total = 0
        for element in word_set.words:
            start = end - len(element)
            if start >= 0 and counts[start] and word[start:end] == element:
                total += counts[start]
        counts[end] = total
    return counts[len(word)]


def factorization_counts(word_set: FiniteWordSet, max_length: int) -> dict[Word, int]:
    """
    The number of factorizations over X of every word of length at most
    `max_length`, each word reusing the counts of its prefixes.
    """
    counts: dict[Word, int] = {EMPTY_WORD: 1}
    layer = [EMPTY_WORD]
    for _ in range(max_length):
        layer = [word + (letter,) for word in layer for letter in word_set.alphabet.symbols]
        for word in layer:
            counts[word] = sum(counts[word[:len(word) - len(element)]] for element in word_set.words
                               if len(element) <= len(word) and word[len(word) - len(element):] == element)
    return counts


def in_star(word_set: FiniteWordSet, word: Word) -> bool:
    """True if the word belongs to the submonoid X*."""
    return factorization_count(word_set, word) > 0


def _left_quotients(left: Iterable[Word], right: Iterable[Word]) -> set[Word]:
    """The set L⁻¹R = {t : ℓt ∈ R for some ℓ ∈ L}."""
    right = list(right)
    quotients: set[Word] = set()
    for prefix in left:
        for word in right:
            if len(word) >= len(prefix) and word[:len(prefix)] == prefix:
                quotients.add(word[len(prefix):])
    return quotients


def sardinas_patterson(word_set: FiniteWordSet) -> bool:
    """
    Decides whether X is a code by the Sardinas–Patterson procedure: the sets
    of dangling suffixes U₁ = X⁻¹X ∖ {1}, Uₙ₊₁ = X⁻¹Uₙ ∪ Uₙ⁻¹X are
    accumulated until no new suffix appears; X is a code iff the empty word
    never appears.

    Returns:
        bool: True if X is a code.
    """
    words = set(word_set.words)
    current = _left_quotients(words, words) - {EMPTY_WORD}
    seen: set[Word] = set()
    while current:
        if EMPTY_WORD in current:
            return False
        seen |= current
        current = (_left_quotients(words, current) | _left_quotients(current, words)) - seen
    return True


def _shortest_ambiguous_word(word_set: FiniteWordSet) -> Word:
    """
    Best-first search, in length-then-alphabet order, for the least word with
    two distinct factorizations. A node is the word read so far together with
    the suffix by which one factorization is behind the other. Must only be
    called when X is not a code, otherwise it does not terminate.
    """
    alphabet = word_set.alphabet
    heap: list[tuple[tuple[int, tuple[int, ...]], Word, Word]] = []
    for shorter in word_set.words:
        for longer in word_set.words:
            if len(shorter) < len(longer) and longer[:len(shorter)] == shorter:
                heapq.heappush(heap, (alphabet.sort_key(longer), longer, longer[len(shorter):]))

    visited: set[tuple[Word, Word]] = set()
    while heap:
        _, word, dangling = heapq.heappop(heap)
        if len(dangling) == 0:
            return word
        if (word, dangling) in visited:
            continue
        visited.add((word, dangling))
        for element in word_set.words:
            if len(element) <= len(dangling) and dangling[:len(element)] == element:
                heapq.heappush(heap, (alphabet.sort_key(word), word, dangling[len(element):]))
            elif len(element) > len(dangling) and element[:len(dangling)] == dangling:
                extension = element[len(dangling):]
                extended = word + extension
                heapq.heappush(heap, (alphabet.sort_key(extended), extended, extension))
    raise HypothesisError(f"{word_set.render()} is a code, there is no ambiguous word")


def is_code(word_set: FiniteWordSet) -> CodeCheck:
    """
    Decides whether X is a code, i.e. whether every word has at most one
    factorization over X.

    Args:
        word_set: The set X.

    Returns:
        CodeCheck: The verdict. When X is not a code the witness is a
            shortest word with two factorizations, ties broken by alphabet
            order, together with two of its factorizations.
    """
    if sardinas_patterson(word_set):
        return CodeCheck(is_code=True)
    witness = _shortest_ambiguous_word(word_set)
    logger.debug(f"{word_set.render()} is not a code, witness: {word_set.alphabet.render(witness)}")
    return CodeCheck(is_code=False,
                     witness=witness,
                     factorizations=tuple(factorizations(word_set, witness, limit=2)))


def minimal_generating_set(word_set: FiniteWordSet) -> FiniteWordSet:
    """
    Returns the minimal generating set of X*, i.e. X minus the words of X that
    are a product of at least two words of X.

    A word x ∈ X is such a product iff it factorizes over X ∖ {x}, since the
    factors of a product of two or more nonempty words are shorter than x.

    Examples:
        >>> minimal_generating_set(FiniteWordSet.from_strings(["a", "aa"])).render()
        '{a}'
    """
    kept: list[Word] = []
    for word in word_set.words:
        others = [other for other in word_set.words if other != word]
        if others and factorization_count(word_set.with_words(others), word) > 0:
            continue
        kept.append(word)
    return word_set.with_words(kept)


def is_complete(word_set: FiniteWordSet, budgets: ResourceBudgets | None = None) -> CompletenessCheck:
    """
    Decides whether X is complete, i.e. whether every word of A* is a factor
    of a word of X*.

    The factors of X* are the labels of the paths of the trim flower automaton
    of X. The automaton with every state initial and terminal is determinised
    breadth first (letters in alphabet order) and X is complete iff the empty
    subset, the only rejecting state of the complement, is unreachable.

    Args:
        word_set: The set X.
        budgets: Resource budgets, defaults to the packaged budgets.

    Returns:
        CompletenessCheck: The verdict, with a shortest non factor word on
            failure.

    Raises:
        ResourceBudgetError: If more than `max_subsets` subsets are built.
    """
    from submonoid_analysis.automata import flower_automaton, subset_search

    automaton = flower_automaton(word_set)
    all_states = (1 << len(automaton.states)) - 1
    search = subset_search(automaton, all_states, budgets=budgets, stop_at_empty=True)
    logger.info(f"Completeness of {word_set.render()}: {len(search)} subsets visited")
    if 0 in search:
        witness = search[0]
        logger.debug(f"{word_set.render()} is not complete, witness: {word_set.alphabet.render(witness)}")
        return CompletenessCheck(is_complete=False, witness=witness, subsets_visited=len(search))
    return CompletenessCheck(is_complete=True, subsets_visited=len(search))


def compose(y_set: FiniteWordSet, beta: CodingMorphism) -> CompositionResult:
    """
    Computes the composition X = Y ∘_β Z = β(Y) where Z = β(B).

    When several words of Y have the same image, only the one least in
    length-then-alphabet order is kept in the trimmed set Y′, so that β is
    injective on Y′ and X = Y′ ∘_β Z is a trim decomposition.

    Args:
        y_set: The set Y over the source alphabet B of β.
        beta: The coding morphism β: B* → A*.

    Returns:
        CompositionResult: X, Y′ and whether the decomposition was trim.

    Raises:
        AlphabetError: If Y uses a letter outside B.
        HypothesisError: If Y and Z are not composable, i.e. some letter of B
            does not occur in any word of Y.
    """
    for word in y_set.words:
        beta.source.validate_word(word)
    used_letters = {letter for word in y_set.words for letter in word}
    for letter in beta.source.symbols:
        if letter not in used_letters:
            raise HypothesisError(f"Y and Z are not composable: letter {letter!r} of B "
                                  f"does not occur in any word of Y = {y_set.render()}")

    preimages: dict[Word, list[Word]] = defaultdict(list)
    for word in y_set.words:
        preimages[beta.apply(word)].append(word)

    kept: list[Word] = []
    removed: list[Word] = []
    for candidates in preimages.values():
        candidates.sort(key=beta.source.sort_key)
        kept.append(candidates[0])
        removed.extend(candidates[1:])

    source_y = FiniteWordSet.from_words(y_set.words, beta.source)
    composed = FiniteWordSet.from_words(preimages.keys(), beta.target)
    if removed:
        logger.info(f"Composition of {source_y.render()} is not trim, removed: "
                    f"{[beta.source.render(word) for word in removed]}")
    return CompositionResult(composed=composed,
                             trimmed_y=source_y.with_words(kept),
                             was_trim=len(removed) == 0,
                             removed=tuple(sorted(removed, key=beta.source.sort_key)))


def decode_preimages(beta: CodingMorphism, word: Word) -> frozenset[Word]:
    """
    Returns every v ∈ B* with β(v) = word, by dynamic programming over the
    prefixes of the word. The number of preimages equals the number of
    factorizations of the word over Z = β(B).

    Raises:
        AlphabetError: If the word is not over the target alphabet of β.
    """
    beta.target.validate_word(word)
    partial: list[set[Word]] = [set() for _ in range(len(word) + 1)]
    partial[0].add(EMPTY_WORD)
    for end in range(1, len(word) + 1):
        for letter, image in beta.images.items():
            start = end - len(image)
            if start >= 0 and partial[start] and word[start:end] == image:
                partial[end].update(prefix + (letter,) for prefix in partial[start])
    return frozenset(partial[len(word)])
