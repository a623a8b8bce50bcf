"""
Literal transducers realizing the decoding relation of a coding morphism,
their polynomial transition matrices and the wreath product ℬ∘𝒯 of an
automaton with a transducer.
"""
import logging
from collections import Counter
from typing import Iterable, Sequence

from pydantic import BaseModel, ConfigDict, model_validator

from submonoid_analysis.automata import (
    EMPTY_PREFIX,
    OMEGA,
    MultiplicityAutomaton,
    ReductionMap,
    flower_state_label,
    flower_states,
    prefix_automaton,
    trim,
)
from submonoid_analysis.config import ResourceBudgets, default_budgets
from submonoid_analysis.errors import HypothesisError, InvariantViolation, ResourceBudgetError
from submonoid_analysis.relmonoid import BooleanRelation
from submonoid_analysis.words import EMPTY_WORD, Alphabet, CodingMorphism, FiniteWordSet, Word

logger = logging.getLogger(__name__)

TransducerEdge = tuple[str, str, str | None, str]
Polynomial = tuple[tuple[Word, int], ...]
PolyMatrix = tuple[tuple[Polynomial, ...], ...]


class LiteralTransducer(BaseModel):
    """
    A transducer 𝒯 = (P, i, t) whose edges p → q are labeled a|v with a an
    input letter and v an output letter or the empty word.

    Attributes:
        input_alphabet: The input alphabet A.
        output_alphabet: The output alphabet B.
        states: The states P in canonical order.
        initial: The initial state.
        terminal: The terminal state.
        edges: The edges (p, a, v, q), v being None for the empty output.
    """

    model_config = ConfigDict(frozen=True)

    input_alphabet: Alphabet
    output_alphabet: Alphabet
    states: tuple[str, ...]
    initial: str
    terminal: str
    edges: tuple[TransducerEdge, ...]

    @model_validator(mode="after")
    def check_transducer(self) -> "LiteralTransducer":
        """
        Checks the states, that every edge reads an input letter, writes an
        output letter or nothing and that no edge is repeated.

        Returns:
            The LiteralTransducer object
        Raises:
            ValueError: If any of the above does not hold.
        """
        if len(set(self.states)) != len(self.states) or len(self.states) == 0:
            raise ValueError(f"States must be nonempty and distinct: {self.states}")
        state_set = set(self.states)
        if self.initial not in state_set or self.terminal not in state_set:
            raise ValueError("The initial and terminal states must be states")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("Duplicate transducer edges")
        for source, letter, output, target in self.edges:
            if source not in state_set or target not in state_set:
                raise ValueError(f"Edge {(source, letter, output, target)} joins unknown states")
            if letter not in self.input_alphabet:
                raise ValueError(f"Input {letter!r} is not in {self.input_alphabet.symbols}")
            if output is not None and output not in self.output_alphabet:
                raise ValueError(f"Output {output!r} is not in {self.output_alphabet.symbols}")
        return self

    @classmethod
    def from_edges(cls,
                   input_alphabet: Alphabet,
                   output_alphabet: Alphabet,
                   states: Sequence[str],
                   initial: str,
                   terminal: str,
                   edges: Iterable[TransducerEdge]) -> "LiteralTransducer":
        """Builds a transducer, sorting the edges by source, input, target and output."""
        order = {state: index for index, state in enumerate(states)}

        # Unknown states and letters sort last, the validator reports them.
        def _edge_key(edge: TransducerEdge) -> tuple[int, int, int, int]:
            source, letter, output, target = edge
            size = len(order) + len(input_alphabet.symbols) + len(output_alphabet.symbols)
            letter_rank = input_alphabet.symbols.index(letter) if letter in input_alphabet else size
            if output is None:
                output_rank = -1
            else:
                output_rank = output_alphabet.symbols.index(output) if output in output_alphabet else size
            return (order.get(source, size), letter_rank, order.get(target, size), output_rank)

        return cls(input_alphabet=input_alphabet,
                   output_alphabet=output_alphabet,
                   states=tuple(states),
                   initial=initial,
                   terminal=terminal,
                   edges=tuple(sorted(edges, key=_edge_key)))

    def state_index(self, state: str) -> int:
        return self.states.index(state)

    def input_automaton(self) -> MultiplicityAutomaton:
        """
        The automaton obtained by erasing the outputs.

        Raises:
            InvariantViolation: If two edges differ only by their output, the
                path multiplicities would then be lost.
        """
        edges = [(source, letter, target) for source, letter, _, target in self.edges]
        if len(set(edges)) != len(edges):
            raise InvariantViolation("Two edges differ only by their output")
        return MultiplicityAutomaton.from_edges(self.input_alphabet, self.states, self.initial, self.terminal, edges)


def _check_image(word_set: FiniteWordSet, beta: CodingMorphism) -> None:
    if set(beta.images.values()) != set(word_set.words):
        raise HypothesisError(f"The image of β is {beta.image_set().render()}, not {word_set.render()}")


def flower_transducer(word_set: FiniteWordSet, beta: CodingMorphism) -> LiteralTransducer:
    """
    The flower transducer of β: the flower automaton of X = β(B) where the
    edge completing the petal of x = β(b) outputs b and every other edge
    outputs the empty word.

    Raises:
        HypothesisError: If β(B) differs from X.
    """
    _check_image(word_set, beta)
    alphabet = word_set.alphabet
    states = [OMEGA] + [flower_state_label(alphabet, pair) for pair in flower_states(word_set)]
    edges: list[TransducerEdge] = []
    for word in word_set.words:
        labels = [OMEGA] + [flower_state_label(alphabet, (word[:split], word[split:]))
                            for split in range(1, len(word))] + [OMEGA]
        for position, letter in enumerate(word):
            output = beta.letter_of(word) if position == len(word) - 1 else None
            edges.append((labels[position], letter, output, labels[position + 1]))
    return LiteralTransducer.from_edges(alphabet, beta.source, states, OMEGA, OMEGA, edges)


def prefix_transducer(word_set: FiniteWordSet, beta: CodingMorphism) -> LiteralTransducer:
    """
    The prefix transducer of β: the prefix automaton of X = β(B) with edges
    p → pa labeled a|1 and p → 1 labeled a|b when pa = β(b).

    Raises:
        HypothesisError: If β(B) differs from X.
    """
    _check_image(word_set, beta)
    alphabet = word_set.alphabet
    skeleton = prefix_automaton(word_set)
    edges: list[TransducerEdge] = []
    prefix_of = {alphabet.render(word[:length]): word[:length]
                 for word in word_set.words for length in range(0, len(word))}
    for source, letter, target in skeleton.edges:
        if target == EMPTY_PREFIX:
            completed = prefix_of[source] + (letter,)
            edges.append((source, letter, beta.letter_of(completed), target))
        else:
            edges.append((source, letter, None, target))
    return LiteralTransducer.from_edges(alphabet, beta.source, skeleton.states, EMPTY_PREFIX, EMPTY_PREFIX, edges)


def _canonical(polynomial: Counter[Word], alphabet: Alphabet) -> Polynomial:
    return tuple(sorted(((word, count) for word, count in polynomial.items() if count),
                        key=lambda term: alphabet.sort_key(term[0])))


def phi_t(transducer: LiteralTransducer, word: Word) -> PolyMatrix:
    """
    Returns φ_𝒯(u): entry (p, q) is the sum of the outputs v of the paths
    p → q labeled u|v, each polynomial a sorted tuple of (word, coefficient)
    terms without zero coefficients.

    Raises:
        AlphabetError: If the word is not over the input alphabet.
    """
    transducer.input_alphabet.validate_word(word)
    size = len(transducer.states)
    index = {state: position for position, state in enumerate(transducer.states)}
    matrix: list[list[Counter[Word]]] = [[Counter({EMPTY_WORD: 1}) if p == q else Counter() for q in range(size)]
                                         for p in range(size)]
    for letter in word:
        step: list[list[Counter[Word]]] = [[Counter() for _ in range(size)] for _ in range(size)]
        for source, edge_letter, output, target in transducer.edges:
            if edge_letter == letter:
                step[index[source]][index[target]][(output,) if output is not None else EMPTY_WORD] += 1
        product: list[list[Counter[Word]]] = [[Counter() for _ in range(size)] for _ in range(size)]
        for p in range(size):
            for s in range(size):
                if not matrix[p][s]:
                    continue
                for q in range(size):
                    if not step[s][q]:
                        continue
                    for left, left_count in matrix[p][s].items():
                        for right, right_count in step[s][q].items():
                            product[p][q][left + right] += left_count * right_count
        matrix = product
    return tuple(tuple(_canonical(entry, transducer.output_alphabet) for entry in row) for row in matrix)


def render_polynomial(polynomial: Polynomial, alphabet: Alphabet) -> str:
    """Renders e.g. `2uv + w`, the zero polynomial as `0`."""
    if not polynomial:
        return "0"
    terms = []
    for word, count in polynomial:
        rendered = alphabet.render(word)
        terms.append(rendered if count == 1 else f"{count}{rendered}")
    return " + ".join(terms)


def decode(transducer: LiteralTransducer, word: Word, budgets: ResourceBudgets | None = None) -> Counter[Word]:
    """
    The outputs v of the paths i → t labeled word|v, with multiplicities,
    computed by dynamic programming over the input positions.

    Raises:
        AlphabetError: If the word is not over the input alphabet.
        ResourceBudgetError: If more than `max_decode_outputs` outputs,
            counted with multiplicity, are pending at some position.
    """
    budgets = budgets or default_budgets()
    transducer.input_alphabet.validate_word(word)
    current: dict[str, Counter[Word]] = {transducer.initial: Counter({EMPTY_WORD: 1})}
    for letter in word:
        following: dict[str, Counter[Word]] = {}
        for source, edge_letter, output, target in transducer.edges:
            if edge_letter != letter or source not in current:
                continue
            bucket = following.setdefault(target, Counter())
            suffix = (output,) if output is not None else EMPTY_WORD
            for prefix, count in current[source].items():
                bucket[prefix + suffix] += count
        total = sum(sum(bucket.values()) for bucket in following.values())
        if total > budgets.max_decode_outputs:
            raise ResourceBudgetError(f"Decoding exceeds max_decode_outputs={budgets.max_decode_outputs}")
        current = following
    return current.get(transducer.terminal, Counter())


class WreathProduct(BaseModel):
    """
    Result of `wreath_product`.

    Attributes:
        automaton: The trim part of ℬ∘𝒯, states labeled `(q,p)`.
        pre_trim_states: |Q|·|P|, the number of states before trimming.
        components: The pair (q, p) behind each state label.
    """

    automaton: MultiplicityAutomaton
    pre_trim_states: int
    components: dict[str, tuple[str, str]]


def wreath_state_label(automaton_state: str, transducer_state: str) -> str:
    return f"({automaton_state},{transducer_state})"


def _check_alphabets(automaton: MultiplicityAutomaton, transducer: LiteralTransducer) -> None:
    if set(automaton.alphabet.symbols) != set(transducer.output_alphabet.symbols):
        raise HypothesisError(f"The automaton alphabet {automaton.alphabet.symbols} differs from the "
                              f"transducer output alphabet {transducer.output_alphabet.symbols}")


def _output_relation(automaton: MultiplicityAutomaton, output: str | None) -> BooleanRelation:
    if output is None:
        return BooleanRelation.identity(len(automaton.states))
    return automaton.letter_relation(output)


def wreath_product(automaton: MultiplicityAutomaton, transducer: LiteralTransducer) -> WreathProduct:
    """
    Builds ℬ∘𝒯 on Q × P: there is an edge (q, p) → (q′, p′) labeled a iff 𝒯
    has an edge p → p′ labeled a|v with q → q′ labeled v in ℬ (q′ = q when
    v is empty). Initial and terminal states are (j, i) and (u, t). Only the
    trim part is kept, states in P-major order.

    Args:
        automaton: ℬ over the output alphabet of 𝒯.
        transducer: 𝒯.

    Returns:
        WreathProduct: The trim automaton and the pre-trim size.

    Raises:
        HypothesisError: If the alphabets do not match or the trim part is
            empty.
        InvariantViolation: If two transducer edges give the same edge.
    """
    _check_alphabets(automaton, transducer)
    labels = {}
    states = []
    for transducer_state in transducer.states:
        for automaton_state in automaton.states:
            label = wreath_state_label(automaton_state, transducer_state)
            labels[(automaton_state, transducer_state)] = label
            states.append(label)

    edges: list[tuple[str, str, str]] = []
    for source, letter, output, target in transducer.edges:
        relation = _output_relation(automaton, output)
        for q, q_prime in relation.pairs():
            edges.append((labels[(automaton.states[q], source)], letter, labels[(automaton.states[q_prime], target)]))
    if len(set(edges)) != len(edges):
        raise InvariantViolation("Two transducer edges give the same edge of the wreath product")

    full = MultiplicityAutomaton.from_edges(transducer.input_alphabet,
                                            states,
                                            labels[(automaton.initial, transducer.initial)],
                                            labels[(automaton.terminal, transducer.terminal)],
                                            edges)
    trimmed = trim(full)
    logger.info(f"Wreath product: {trimmed.pre_trim_states} states, {len(trimmed.automaton.states)} after trimming")
    kept = set(trimmed.automaton.states)
    components = {label: pair for pair, label in labels.items() if label in kept}
    return WreathProduct(automaton=trimmed.automaton, pre_trim_states=trimmed.pre_trim_states, components=components)


def wreath_block_matrix(automaton: MultiplicityAutomaton, transducer: LiteralTransducer, letter: str) -> BooleanRelation:
    """
    φ_{ℬ∘𝒯}(a) before trimming, on the |Q|·|P| states in P-major order: the
    block (p, p′) is the union of φ_ℬ(v) over the edges p → p′ labeled a|v.

    Raises:
        HypothesisError: If the alphabets do not match.
    """
    _check_alphabets(automaton, transducer)
    width = len(automaton.states)
    size = width * len(transducer.states)
    rows = [0] * size
    for source, edge_letter, output, target in transducer.edges:
        if edge_letter != letter:
            continue
        source_block = transducer.state_index(source) * width
        target_block = transducer.state_index(target) * width
        relation = _output_relation(automaton, output)
        for q, q_prime in relation.pairs():
            rows[source_block + q] |= 1 << (target_block + q_prime)
    return BooleanRelation(size, tuple(rows))


def projection_reduction(wreath: WreathProduct, target: MultiplicityAutomaton) -> ReductionMap:
    """
    The map (q, p) ↦ p from the wreath product ℬ∘𝒯 onto an automaton whose
    states are those of 𝒯, typically the prefix automaton of Z.

    Raises:
        ValueError: If the map is not onto or does not preserve the initial
            and terminal states.
    """
    mapping = {label: pair[1] for label, pair in wreath.components.items()}
    return ReductionMap(source=wreath.automaton, target=target, mapping=mapping)

