from itertools import product

import pytest

from submonoid_analysis.errors import AlphabetError, HypothesisError
from submonoid_analysis.words import (
    EMPTY_WORD,
    Alphabet,
    CodingMorphism,
    FiniteWordSet,
    compose,
    concatenate,
    decode_preimages,
    factorization_count,
    factorization_counts,
    factorizations,
    in_star,
    is_code,
    is_complete,
    minimal_generating_set,
    sardinas_patterson,
)


def w(text: str) -> tuple[str, ...]:
    return tuple(text)


@pytest.fixture
def aabba() -> FiniteWordSet:
    return FiniteWordSet.from_strings(["a", "ab", "ba"])


@pytest.fixture
def aabba_beta() -> CodingMorphism:
    return CodingMorphism.from_strings({"u": "a", "v": "ab", "w": "ba"})


class TestAlphabet:

    def test_of(self) -> None:
        assert Alphabet.of("ab").symbols == ("a", "b")
        assert Alphabet.of("x0 x1").symbols == ("x0", "x1")
        assert Alphabet.of(["b", "a"]).symbols == ("b", "a")
        alphabet = Alphabet.of("ab")
        assert Alphabet.of(alphabet) is alphabet

    @pytest.mark.parametrize("symbols", [(), ("a", "a"), ("",), ("a b",), ("a^",)])
    def test_invalid_symbols(self, symbols: tuple[str, ...]) -> None:
        with pytest.raises(ValueError):
            Alphabet(symbols=symbols)

    def test_sort_key_uses_alphabet_order(self) -> None:
        alphabet = Alphabet.of(["b", "a"])
        words = [w("a"), w("ab"), w("b"), w("ba"), w("aaa")]
        assert sorted(words, key=alphabet.sort_key) == [w("b"), w("a"), w("ba"), w("ab"), w("aaa")]
        with pytest.raises(AlphabetError):
            alphabet.index("c")

    def test_parse_and_render(self) -> None:
        alphabet = Alphabet.of("ab")
        assert alphabet.parse_word("a^2b") == w("aab")
        assert alphabet.parse_word("ab a") == w("aba")
        assert alphabet.parse_word("1") == EMPTY_WORD
        assert alphabet.parse_word("") == EMPTY_WORD
        assert alphabet.render(EMPTY_WORD) == "1"
        assert alphabet.render(w("aab")) == "aab"
        with pytest.raises(AlphabetError):
            alphabet.parse_word("abc")
        with pytest.raises(AlphabetError, match="exponent"):
            alphabet.parse_word("a^")

        multi = Alphabet.of("x0 x1")
        assert multi.parse_word("x0 x1^2") == ("x0", "x1", "x1")
        assert multi.render(("x0", "x1")) == "x0 x1"


class TestFiniteWordSet:

    def test_canonical_order(self) -> None:
        word_set = FiniteWordSet.from_strings(["ba", "a", "ab"])
        assert word_set.words == (w("a"), w("ab"), w("ba"))
        assert word_set.alphabet.symbols == ("a", "b")
        assert word_set.render() == "{a, ab, ba}"
        assert len(word_set) == 3
        assert w("ab") in word_set
        assert word_set.max_length == 2

    def test_invalid_sets(self) -> None:
        with pytest.raises(ValueError, match="at least one word"):
            FiniteWordSet.from_words([], "ab")
        with pytest.raises(ValueError, match="empty word"):
            FiniteWordSet.from_words([w("a"), EMPTY_WORD], "ab")
        with pytest.raises(ValueError, match="Duplicate"):
            FiniteWordSet.from_words([w("a"), w("a")], "ab")
        with pytest.raises(ValueError, match="order"):
            FiniteWordSet(alphabet=Alphabet.of("ab"), words=(w("ab"), w("a")))
        with pytest.raises(AlphabetError):
            FiniteWordSet.from_words([w("c")], "ab")

    def test_alphabet_may_have_unused_symbols(self) -> None:
        word_set = FiniteWordSet.from_strings(["a"], "ab")
        assert word_set.alphabet.symbols == ("a", "b")
        assert word_set.with_words([w("b"), w("a")]).words == (w("a"), w("b"))


def test_concatenate() -> None:
    assert concatenate() == EMPTY_WORD
    assert concatenate(w("ab"), EMPTY_WORD, w("a")) == w("aba")


class TestFactorizations:

    def test_aba_has_two_factorizations(self, aabba: FiniteWordSet) -> None:
        assert factorization_count(aabba, w("aba")) == 2
        assert factorizations(aabba, w("aba")) == [(w("a"), w("ba")), (w("ab"), w("a"))]
        assert factorizations(aabba, w("aba"), limit=1) == [(w("a"), w("ba"))]

    def test_empty_word(self, aabba: FiniteWordSet) -> None:
        assert factorization_count(aabba, EMPTY_WORD) == 1
        assert factorizations(aabba, EMPTY_WORD) == [()]
        assert in_star(aabba, EMPTY_WORD)

    def test_fibonacci(self) -> None:
        fib = FiniteWordSet.from_strings(["a", "aa"])
        previous, current = 0, 1
        for length in range(1, 101):
            previous, current = current, previous + current
            assert factorization_count(fib, ("a",) * length) == current
        # Beyond 64 bits
        assert current > 2**64

    def test_matches_enumeration(self, aabba: FiniteWordSet) -> None:
        for length in range(9):
            for word in product("ab", repeat=length):
                assert factorization_count(aabba, word) == len(factorizations(aabba, word))

    def test_counts_of_all_short_words(self) -> None:
        word_set = FiniteWordSet.from_strings(["a", "ab", "ca", "bca"])
        counts = factorization_counts(word_set, 6)
        assert len(counts) == sum(3**length for length in range(7))
        for word, count in counts.items():
            assert count == factorization_count(word_set, word)
        assert counts[EMPTY_WORD] == 1

    def test_membership(self, aabba: FiniteWordSet) -> None:
        assert in_star(aabba, w("abba"))
        assert not in_star(aabba, w("bb"))
        with pytest.raises(AlphabetError):
            factorization_count(aabba, w("c"))


class TestCodes:

    @pytest.mark.parametrize("words, expected_witness", [
        (["a", "ab", "ba"], "aba"),
        (["aa", "aaa"], "aaaaa"),
        (["a", "aa"], "aa"),
        (["a", "ab", "b"], "ab"),
    ])
    def test_not_a_code(self, words: list[str], expected_witness: str) -> None:
        word_set = FiniteWordSet.from_strings(words)
        check = is_code(word_set)
        assert not check.is_code
        assert check.witness == w(expected_witness)
        assert len(check.factorizations) == 2
        assert factorization_count(word_set, check.witness) >= 2
        for length in range(len(expected_witness)):
            for word in product(word_set.alphabet.symbols, repeat=length):
                assert factorization_count(word_set, word) <= 1

    @pytest.mark.parametrize("words", [["a"], ["a", "ab"], ["aa", "ab", "ba", "bb"], ["a", "ba", "bb"], ["aab", "ab", "b"]])
    def test_codes(self, words: list[str]) -> None:
        word_set = FiniteWordSet.from_strings(words)
        check = is_code(word_set)
        assert check.is_code
        assert check.witness is None
        assert sardinas_patterson(word_set)
        bound = 2 * word_set.max_length ** 2
        for length in range(min(bound, 8) + 1):
            for word in product(word_set.alphabet.symbols, repeat=length):
                assert factorization_count(word_set, word) <= 1


class TestMinimalGeneratingSet:

    def test_removes_products(self) -> None:
        word_set = FiniteWordSet.from_strings(["a", "aa", "ab", "aab", "b"])
        minimal = minimal_generating_set(word_set)
        assert minimal.words == (w("a"), w("b"))
        assert minimal_generating_set(minimal) == minimal

    def test_already_minimal(self, aabba: FiniteWordSet) -> None:
        assert minimal_generating_set(aabba) == aabba
        fib = FiniteWordSet.from_strings(["a", "aa"])
        assert minimal_generating_set(fib).words == (w("a"),)


class TestCompleteness:

    def test_incomplete_witness(self, aabba: FiniteWordSet) -> None:
        check = is_complete(aabba)
        assert not check.is_complete
        assert check.witness == w("bbb")
        assert check.subsets_visited > 0

    def test_complete(self) -> None:
        assert is_complete(FiniteWordSet.from_strings(["a", "b"])).is_complete
        assert is_complete(FiniteWordSet.from_strings(["aa", "ab", "ba", "bb"])).is_complete
        assert is_complete(FiniteWordSet.from_strings(["a", "ab", "bb", "ba"])).is_complete

    def test_unused_letter(self) -> None:
        check = is_complete(FiniteWordSet.from_strings(["a"], "ab"))
        assert not check.is_complete
        assert check.witness == w("b")


class TestCodingMorphism:

    def test_from_strings(self, aabba_beta: CodingMorphism) -> None:
        assert aabba_beta.source.symbols == ("u", "v", "w")
        assert aabba_beta.target.symbols == ("a", "b")
        assert aabba_beta.apply(w("uwv")) == w("abaab")
        assert aabba_beta.image_set().words == (w("a"), w("ab"), w("ba"))
        assert aabba_beta.letter_of(w("ba")) == "w"
        with pytest.raises(KeyError):
            aabba_beta.letter_of(w("bb"))
        with pytest.raises(AlphabetError):
            aabba_beta.apply(w("x"))

    def test_invalid(self) -> None:
        with pytest.raises(ValueError, match="injective"):
            CodingMorphism.from_strings({"u": "a", "v": "a"})
        with pytest.raises(ValueError, match="nonempty"):
            CodingMorphism.from_strings({"u": "1", "v": "a"}, target="a")
        with pytest.raises(ValueError, match="exactly"):
            CodingMorphism.from_strings({"u": "a"}, source="uv", target="a")


class TestCompose:

    def test_composition_example(self, aabba_beta: CodingMorphism) -> None:
        y_set = FiniteWordSet.from_strings(["u", "uw", "vu"], "uvw")
        result = compose(y_set, aabba_beta)
        assert result.composed.render() == "{a, aba}"
        assert not result.was_trim
        assert result.removed == (w("vu"),)
        assert result.trimmed_y.words == (w("u"), w("uw"))

    def test_square_of_z(self, aabba_beta: CodingMorphism) -> None:
        y_set = FiniteWordSet.from_words(product("uvw", repeat=2), "uvw")
        result = compose(y_set, aabba_beta)
        assert result.composed.render() == "{aa, aab, aba, baa, abab, abba, baab, baba}"
        assert not result.was_trim
        assert len(result.trimmed_y) == 8
        for word in result.trimmed_y.words:
            assert word in decode_preimages(aabba_beta, aabba_beta.apply(word))

    def test_identity_composition(self) -> None:
        beta = CodingMorphism.from_strings({"u": "a", "v": "b"})
        y_set = FiniteWordSet.from_strings(["uu", "uv", "vu", "vv"])
        result = compose(y_set, beta)
        assert result.was_trim
        assert result.composed.render() == "{aa, ab, ba, bb}"

    def test_not_composable(self, aabba_beta: CodingMorphism) -> None:
        with pytest.raises(HypothesisError, match="composable"):
            compose(FiniteWordSet.from_strings(["u", "uv"], "uvw"), aabba_beta)


def test_decode_preimages(aabba_beta: CodingMorphism) -> None:
    assert decode_preimages(aabba_beta, w("aba")) == {w("uw"), w("vu")}
    assert decode_preimages(aabba_beta, EMPTY_WORD) == {EMPTY_WORD}
    assert decode_preimages(aabba_beta, w("bb")) == frozenset()
    aabba = aabba_beta.image_set()
    for length in range(7):
        for word in product("ab", repeat=length):
            assert len(decode_preimages(aabba_beta, word)) == factorization_count(aabba, word)
