from itertools import product
from pathlib import Path

import pytest

from submonoid_analysis.automata import (
    OMEGA,
    MultiplicityAutomaton,
    ReductionMap,
    behavior_count,
    behavior_counts,
    behavior_difference,
    canonical_sharp_reduction,
    check_reduction,
    flower_automaton,
    flower_states,
    induced_morphism,
    language_sample,
    letter_matrix,
    mu,
    phi,
    prefix_automaton,
    recognizes_with_multiplicities,
    subset_search,
    trim,
)
from submonoid_analysis.config import ResourceBudgets
from submonoid_analysis.errors import AlphabetError, HypothesisError, ResourceBudgetError
from submonoid_analysis.parsers import AutomatonParser, ReductionMapParser
from submonoid_analysis.relmonoid import BooleanRelation, enumerate_monoid
from submonoid_analysis.words import EMPTY_WORD, FiniteWordSet, factorization_count, in_star
from tests.utils_test import get_test_worked_examples_directory  # noqa: F401


def w(text: str) -> tuple[str, ...]:
    return tuple(text)


def fibonacci(n: int) -> int:
    previous, current = 0, 1
    for _ in range(n):
        previous, current = current, previous + current
    return previous


@pytest.fixture
def aabba() -> FiniteWordSet:
    return FiniteWordSet.from_strings(["a", "ab", "ba"])


@pytest.fixture
def a2a3() -> FiniteWordSet:
    return FiniteWordSet.from_strings(["aa", "aaa"])


class TestMultiplicityAutomaton:

    def test_from_edges_sorts(self) -> None:
        automaton = MultiplicityAutomaton.from_edges("ab", ["1", "2"], "1", "1",
                                                     [("2", "a", "1"), ("1", "b", "2"), ("1", "a", "2")])
        assert automaton.edges == (("1", "a", "2"), ("1", "b", "2"), ("2", "a", "1"))
        assert automaton.initial_index == 0
        assert automaton.state_index("2") == 1
        assert automaton.letter_relation("a") == BooleanRelation.from_pairs(2, [(0, 1), (1, 0)])
        assert automaton.is_trim

    @pytest.mark.parametrize("states, initial, terminal, edges, match", [
        ([], "1", "1", [], "at least one state"),
        (["1", "1"], "1", "1", [], "Duplicate states"),
        (["1"], "2", "1", [], "initial"),
        (["1"], "1", "2", [], "terminal"),
        (["1"], "1", "1", [("1", "a", "1"), ("1", "a", "1")], "Duplicate edges"),
        (["1"], "1", "1", [("1", "a", "2")], "unknown states"),
        (["1"], "1", "1", [("1", "c", "1")], "outside the alphabet"),
    ])
    def test_invalid(self, states: list[str], initial: str, terminal: str,
                     edges: list[tuple[str, str, str]], match: str) -> None:
        with pytest.raises(ValueError, match=match):
            MultiplicityAutomaton.from_edges("ab", states, initial, terminal, edges)

    def test_trim(self) -> None:
        automaton = MultiplicityAutomaton.from_edges("a", ["1", "2", "3"], "1", "1",
                                                     [("1", "a", "1"), ("1", "a", "2"), ("3", "a", "1")])
        assert not automaton.is_trim
        result = trim(automaton)
        assert result.pre_trim_states == 3
        assert result.automaton.states == ("1",)
        assert result.automaton.edges == (("1", "a", "1"),)

        dead = MultiplicityAutomaton.from_edges("a", ["1", "2"], "1", "2", [])
        with pytest.raises(HypothesisError, match="empty"):
            trim(dead)


class TestFlowerAutomaton:

    def test_aabba(self, aabba: FiniteWordSet) -> None:
        flower = flower_automaton(aabba)
        assert flower.states == (OMEGA, "(a,b)", "(b,a)")
        assert flower.initial == flower.terminal == OMEGA
        assert len(flower.edges) == 5
        assert flower.is_trim

    def test_states_order(self, a2a3: FiniteWordSet) -> None:
        assert flower_states(a2a3) == [(w("a"), w("a")), (w("a"), w("aa")), (w("aa"), w("a"))]
        assert flower_automaton(a2a3).states == (OMEGA, "(a,a)", "(a,aa)", "(aa,a)")

    def test_single_letter(self) -> None:
        flower = flower_automaton(FiniteWordSet.from_strings(["a"]))
        assert flower.states == (OMEGA,)
        assert flower.edges == ((OMEGA, "a", OMEGA),)

    def test_phi_of_aa_has_rank_one(self, aabba: FiniteWordSet) -> None:
        relation = phi(flower_automaton(aabba), w("aa"))
        assert relation.to_matrix() == ((1, 1, 0), (0, 0, 0), (1, 1, 0))
        assert phi(flower_automaton(aabba), EMPTY_WORD) == BooleanRelation.identity(3)


class TestPrefixAutomaton:

    def test_a2a3(self, a2a3: FiniteWordSet) -> None:
        prefix = prefix_automaton(a2a3)
        assert prefix.states == ("1", "a", "aa")
        assert prefix.edges == (("1", "a", "a"), ("a", "a", "1"), ("a", "a", "aa"), ("aa", "a", "1"))

    def test_aabba(self, aabba: FiniteWordSet) -> None:
        prefix = prefix_automaton(aabba)
        assert prefix.states == ("1", "a", "b")
        assert ("1", "a", "1") in prefix.edges
        assert ("1", "a", "a") in prefix.edges
        assert ("a", "b", "1") in prefix.edges


class TestMultiplicities:

    def test_fibonacci_counts(self) -> None:
        fib = FiniteWordSet.from_strings(["a", "aa"])
        flower = flower_automaton(fib)
        prefix = prefix_automaton(fib)
        for n in range(1, 31):
            word = ("a",) * n
            assert behavior_count(flower, word) == fibonacci(n + 1)
            assert behavior_count(prefix, word) == fibonacci(n + 1)

    def test_mu_fibonacci_matrix(self) -> None:
        flower = flower_automaton(FiniteWordSet.from_strings(["a", "aa"]))
        assert letter_matrix(flower, "a") == ((1, 1), (1, 0))
        assert mu(flower, w("aaa")) == ((3, 2), (2, 1))
        for n in range(1, 21):
            assert mu(flower, ("a",) * n) == ((fibonacci(n + 1), fibonacci(n)), (fibonacci(n), fibonacci(n - 1)))

    def test_counts_agree_with_factorizations(self, aabba: FiniteWordSet) -> None:
        flower = flower_automaton(aabba)
        prefix = prefix_automaton(aabba)
        for length in range(9):
            for word in product("ab", repeat=length):
                expected = factorization_count(aabba, word)
                assert behavior_count(flower, word) == expected
                assert behavior_count(prefix, word) == expected
                assert mu(flower, word)[0][0] == expected
                assert phi(flower, word)[0, 0] == (expected > 0)

    @pytest.mark.parametrize("words", [["a", "ab", "ba"], ["ab", "c", "bca"]])
    def test_counts_of_all_short_words(self, words: list[str]) -> None:
        word_set = FiniteWordSet.from_strings(words)
        for automaton in (flower_automaton(word_set), prefix_automaton(word_set)):
            counts = behavior_counts(automaton, 6)
            assert len(counts) == sum(len(word_set.alphabet) ** length for length in range(7))
            for word, count in counts.items():
                assert count == behavior_count(automaton, word) == factorization_count(word_set, word)

    def test_alphabet_errors(self, aabba: FiniteWordSet) -> None:
        flower = flower_automaton(aabba)
        for function in (mu, phi, behavior_count):
            with pytest.raises(AlphabetError):
                function(flower, w("c"))


class TestBehaviorEquivalence:

    def test_recognizes(self, aabba: FiniteWordSet, a2a3: FiniteWordSet) -> None:
        assert recognizes_with_multiplicities(flower_automaton(aabba), aabba)
        assert recognizes_with_multiplicities(prefix_automaton(a2a3), a2a3)
        assert not recognizes_with_multiplicities(flower_automaton(a2a3), aabba.with_words([w("a")]))

    def test_difference_witness(self, aabba: FiniteWordSet) -> None:
        # Two paths 1 -> 1 labeled aa against one
        doubled = MultiplicityAutomaton.from_edges("ab", ["1", "2"], "1", "1",
                                                   [("1", "a", "1"), ("1", "a", "2"), ("2", "a", "1")])
        single = MultiplicityAutomaton.from_edges("ab", ["1"], "1", "1", [("1", "a", "1")])
        assert behavior_difference(single, single) is None
        assert behavior_difference(doubled, single) == w("aa")
        assert behavior_difference(flower_automaton(aabba), prefix_automaton(aabba)) is None

    def test_requires_trim(self, aabba: FiniteWordSet) -> None:
        automaton = MultiplicityAutomaton.from_edges("ab", ["1", "2"], "1", "1", [("1", "a", "1")])
        with pytest.raises(HypothesisError, match="trim"):
            recognizes_with_multiplicities(automaton, aabba)


class TestSubsetSearch:

    def test_forward_and_backward(self, aabba: FiniteWordSet) -> None:
        flower = flower_automaton(aabba)
        forward = subset_search(flower, 1)
        assert forward.complete
        assert forward[1] == EMPTY_WORD
        assert 0 in forward
        backward = subset_search(flower, 1, backward=True)
        assert backward.complete
        assert len(backward) > 1

    def test_depth_and_budget(self, aabba: FiniteWordSet) -> None:
        flower = flower_automaton(aabba)
        shallow = subset_search(flower, 1, max_depth=0)
        assert not shallow.complete
        assert len(shallow) == 1
        with pytest.raises(ResourceBudgetError, match="max_subsets"):
            subset_search(flower, 1, budgets=ResourceBudgets(max_subsets=1))


def test_language_sample(aabba: FiniteWordSet) -> None:
    sample = language_sample(flower_automaton(aabba), 4)
    expected = {word for length in range(5) for word in product("ab", repeat=length) if in_star(aabba, word)}
    assert sample == expected


class TestReductions:

    def test_canonical_sharp_reduction(self, a2a3: FiniteWordSet) -> None:
        reduction = canonical_sharp_reduction(a2a3, prefix_automaton(a2a3))
        assert reduction.mapping == {OMEGA: "1", "(a,a)": "a", "(a,aa)": "a", "(aa,a)": "aa"}
        assert check_reduction(reduction).verdict == "sharp_reduction"
        assert reduction.fiber("a") == ("(a,a)", "(a,aa)")
        # Every path of the flower automaton projects onto the prefix automaton
        assert language_sample(reduction.source, 6) == language_sample(reduction.target, 6)

    def test_canonical_sharp_reduction_hypotheses(self, aabba: FiniteWordSet, a2a3: FiniteWordSet) -> None:
        with pytest.raises(HypothesisError, match="minimal generating set"):
            canonical_sharp_reduction(FiniteWordSet.from_strings(["a", "aa"]),
                                      prefix_automaton(FiniteWordSet.from_strings(["a"])))
        with pytest.raises(HypothesisError, match="multiplicities"):
            canonical_sharp_reduction(a2a3, prefix_automaton(FiniteWordSet.from_strings(["aa"])))
        two_ends = MultiplicityAutomaton.from_edges("ab", ["1", "2"], "1", "2", [("1", "a", "2"), ("2", "b", "1")])
        with pytest.raises(HypothesisError, match="same initial and terminal"):
            canonical_sharp_reduction(aabba, two_ends)

    def test_reduction_map_validation(self, a2a3: FiniteWordSet) -> None:
        flower = flower_automaton(a2a3)
        prefix = prefix_automaton(a2a3)
        with pytest.raises(ValueError, match="defined exactly"):
            ReductionMap(source=flower, target=prefix, mapping={OMEGA: "1"})
        with pytest.raises(ValueError, match="not onto"):
            ReductionMap(source=flower, target=prefix,
                         mapping={OMEGA: "1", "(a,a)": "a", "(a,aa)": "a", "(aa,a)": "a"})
        with pytest.raises(ValueError, match="initial"):
            ReductionMap(source=flower, target=prefix,
                         mapping={OMEGA: "a", "(a,a)": "1", "(a,aa)": "a", "(aa,a)": "aa"})

    def test_not_a_reduction(self, a2a3: FiniteWordSet) -> None:
        flower = flower_automaton(a2a3)
        prefix = prefix_automaton(a2a3)
        reduction = ReductionMap(source=flower, target=prefix,
                                 mapping={OMEGA: "1", "(a,a)": "aa", "(a,aa)": "a", "(aa,a)": "aa"})
        check = check_reduction(reduction)
        assert check.verdict == "not_reduction"
        assert check.witness == w("a")

    def test_printed_table_of_square(self, get_test_worked_examples_directory: Path) -> None:
        source = AutomatonParser.parse(get_test_worked_examples_directory / "z2.auto")
        target = AutomatonParser.parse(get_test_worked_examples_directory / "z.auto")

        printed = ReductionMapParser.parse_reduction(get_test_worked_examples_directory / "z2_to_z_printed.map",
                                                     source, target)
        printed_check = check_reduction(printed)
        assert printed_check.verdict == "not_reduction"
        assert printed_check.witness == w("a")

        corrected = ReductionMapParser.parse_reduction(get_test_worked_examples_directory / "z2_to_z.map", source, target)
        assert check_reduction(corrected).verdict == "reduction"
        assert corrected.fiber("1") == ("1", "2", "6")
        assert language_sample(source, 6) <= language_sample(target, 6)

    def test_no_sharp_reduction_for_non_minimal_set(self) -> None:
        flower = flower_automaton(FiniteWordSet.from_strings(["a", "aa"]))
        loop = MultiplicityAutomaton.from_edges("a", ["1"], "1", "1", [("1", "a", "1")])
        verdicts = []
        for images in product(loop.states, repeat=len(flower.states)):
            try:
                reduction = ReductionMap(source=flower, target=loop, mapping=dict(zip(flower.states, images)))
            except ValueError:
                verdicts.append("invalid")
                continue
            verdicts.append(check_reduction(reduction).verdict)
        assert verdicts == ["reduction"]

    def test_two_cycles_do_not_count_paths(self) -> None:
        square = FiniteWordSet.from_strings(["aa"])
        two_cycles = MultiplicityAutomaton.from_edges("a", ["1", "2", "3"], "1", "1",
                                                      [("1", "a", "2"), ("2", "a", "1"), ("1", "a", "3"), ("3", "a", "1")])
        assert language_sample(two_cycles, 8) == language_sample(prefix_automaton(square), 8)
        assert behavior_count(two_cycles, w("aa")) == 2
        assert not recognizes_with_multiplicities(two_cycles, square)
        with pytest.raises(HypothesisError, match="multiplicities"):
            canonical_sharp_reduction(square, two_cycles)
        flower = flower_automaton(square)
        for images in product(two_cycles.states, repeat=len(flower.states)):
            with pytest.raises(ValueError):
                ReductionMap(source=flower, target=two_cycles, mapping=dict(zip(flower.states, images)))

    def test_reduction_budget(self, a2a3: FiniteWordSet) -> None:
        reduction = canonical_sharp_reduction(a2a3, prefix_automaton(a2a3))
        with pytest.raises(ResourceBudgetError, match="max_reduction_states"):
            check_reduction(reduction, ResourceBudgets(max_reduction_states=1))

    def test_induced_morphism(self, a2a3: FiniteWordSet) -> None:
        reduction = canonical_sharp_reduction(a2a3, prefix_automaton(a2a3))
        monoid = enumerate_monoid(reduction.source)
        for index in range(len(monoid)):
            word = monoid.witness(index)
            assert induced_morphism(reduction, monoid, index) == phi(reduction.target, word)
        # ρ̂ does not depend on the witness chosen and is a morphism
        for first in range(len(monoid)):
            for second in range(len(monoid)):
                product_image = induced_morphism(reduction, monoid, monoid.multiply(first, second))
                assert product_image == (induced_morphism(reduction, monoid, first)
                                         @ induced_morphism(reduction, monoid, second))
