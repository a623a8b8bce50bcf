"""
Automata with a single initial and a single terminal state, counted with
multiplicities: the flower and prefix automata of a finite set X, the integer
(μ) and boolean (φ) transition morphisms, weighted equivalence and
reductions between automata.
"""
import logging
from collections import deque
from typing import Iterable, Literal, Sequence

from pydantic import BaseModel, ConfigDict, PrivateAttr, model_validator
from sympy import Rational

from submonoid_analysis.config import ResourceBudgets, default_budgets
from submonoid_analysis.errors import HypothesisError, InvariantViolation, ResourceBudgetError
from submonoid_analysis.relmonoid import BooleanRelation, TransitionMonoid
from submonoid_analysis.words import (
    EMPTY_WORD,
    Alphabet,
    FiniteWordSet,
    Word,
    minimal_generating_set,
)

logger = logging.getLogger(__name__)

Edge = tuple[str, str, str]
IntegerMatrix = tuple[tuple[int, ...], ...]

OMEGA = "ω"
EMPTY_PREFIX = "1"


class MultiplicityAutomaton(BaseModel):
    """
    An automaton 𝒜 = (Q, i, t) whose behavior counts paths: the multiplicity
    of a word w is the number of paths from i to t labeled w.

    Attributes:
        alphabet: The alphabet of the edge labels.
        states: The states Q, in their canonical order (matrix row order).
        initial: The initial state i.
        terminal: The terminal state t.
        edges: The edges (p, a, q), a set: no triple appears twice.
    """

    model_config = ConfigDict(frozen=True)

    alphabet: Alphabet
    states: tuple[str, ...]
    initial: str
    terminal: str
    edges: tuple[Edge, ...]

    _state_index: dict[str, int] = PrivateAttr(default_factory=dict)
    _letter_rows: dict[str, tuple[int, ...]] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def check_automaton(self) -> "MultiplicityAutomaton":
        """
        Checks that the states are distinct and nonempty, that the initial and
        terminal states are states, and that every edge joins states with a
        letter of the alphabet, without duplicates.

        Returns:
            The MultiplicityAutomaton object
        Raises:
            ValueError: If any of the above does not hold.
        """
        if len(self.states) == 0:
            raise ValueError("An automaton must have at least one state")
        if len(set(self.states)) != len(self.states):
            raise ValueError(f"Duplicate states: {self.states}")
        state_set = set(self.states)
        for name, state in (("initial", self.initial), ("terminal", self.terminal)):
            if state not in state_set:
                raise ValueError(f"The {name} state {state!r} is not a state")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("Duplicate edges, the edges of an automaton form a set")
        for source, letter, target in self.edges:
            if source not in state_set or target not in state_set:
                raise ValueError(f"Edge {(source, letter, target)} joins unknown states")
            if letter not in self.alphabet:
                raise ValueError(f"Edge {(source, letter, target)} has a label outside the alphabet "
                                 f"{self.alphabet.symbols}")
        return self

    def model_post_init(self, context: object) -> None:
        self._state_index = {state: index for index, state in enumerate(self.states)}
        rows = {letter: [0] * len(self.states) for letter in self.alphabet.symbols}
        for source, letter, target in self.edges:
            # Unknown states and letters are reported by check_automaton.
            if source not in self._state_index or target not in self._state_index or letter not in rows:
                continue
            rows[letter][self._state_index[source]] |= 1 << self._state_index[target]
        self._letter_rows = {letter: tuple(letter_rows) for letter, letter_rows in rows.items()}

    @classmethod
    def from_edges(cls,
                   alphabet: Alphabet | str | Iterable[str],
                   states: Sequence[str],
                   initial: str,
                   terminal: str,
                   edges: Iterable[Sequence[str]]) -> "MultiplicityAutomaton":
        """
        Builds an automaton from an explicit edge list, sorting the edges by
        source state, letter and target state.

        Examples:
            >>> automaton = MultiplicityAutomaton.from_edges("a", ["1", "2"], "1", "1",
            ...                                              [("1", "a", "2"), ("2", "a", "1")])
            >>> len(automaton.edges)
            2
        """
        resolved_alphabet = Alphabet.of(alphabet)
        state_order = {state: index for index, state in enumerate(states)}
        edge_list = [tuple(edge) for edge in edges]
        for edge in edge_list:
            if len(edge) != 3:
                raise ValueError(f"An edge is a triple (source, letter, target), got {edge}")

        def _edge_key(edge: tuple[str, ...]) -> tuple[int, int, int]:
            source, letter, target = edge
            return (state_order.get(source, -1),
                    resolved_alphabet.index(letter) if letter in resolved_alphabet else -1,
                    state_order.get(target, -1))

        return cls(alphabet=resolved_alphabet,
                   states=tuple(states),
                   initial=initial,
                   terminal=terminal,
                   edges=tuple(sorted(edge_list, key=_edge_key)))  # type: ignore[arg-type]

    def state_index(self, state: str) -> int:
        return self._state_index[state]

    @property
    def initial_index(self) -> int:
        return self._state_index[self.initial]

    @property
    def terminal_index(self) -> int:
        return self._state_index[self.terminal]

    @property
    def letter_relations(self) -> dict[str, BooleanRelation]:
        """φ(a) for every letter a, in alphabet order."""
        size = len(self.states)
        return {letter: BooleanRelation(size, rows) for letter, rows in self._letter_rows.items()}

    def letter_relation(self, letter: str) -> BooleanRelation:
        return BooleanRelation(len(self.states), self._letter_rows[letter])

    def reachable_mask(self) -> int:
        """Bitmask of the states reachable from the initial state."""
        return _closure(1 << self.initial_index, list(self._letter_rows.values()))

    def coreachable_mask(self) -> int:
        """Bitmask of the states from which the terminal state is reachable."""
        size = len(self.states)
        reversed_rows = []
        for rows in self._letter_rows.values():
            reversed_letter = [0] * size
            for source, row in enumerate(rows):
                for target in range(size):
                    if row >> target & 1:
                        reversed_letter[target] |= 1 << source
            reversed_rows.append(tuple(reversed_letter))
        return _closure(1 << self.terminal_index, reversed_rows)

    @property
    def is_trim(self) -> bool:
        """True if every state is reachable from i and co-reachable to t."""
        everything = (1 << len(self.states)) - 1
        return self.reachable_mask() == everything and self.coreachable_mask() == everything


def _closure(start: int, letter_rows: list[tuple[int, ...]]) -> int:
    reached = start
    frontier = start
    while frontier:
        following = 0
        for rows in letter_rows:
            for state in range(len(rows)):
                if frontier >> state & 1:
                    following |= rows[state]
        frontier = following & ~reached
        reached |= frontier
    return reached


class TrimResult(BaseModel):
    """
    Attributes:
        automaton: The trim part of the automaton.
        pre_trim_states: Number of states before trimming.
    """

    automaton: MultiplicityAutomaton
    pre_trim_states: int


def trim(automaton: MultiplicityAutomaton) -> TrimResult:
    """
    Restricts an automaton to its states that are both reachable from i and
    co-reachable to t, keeping the state order.

    Raises:
        HypothesisError: If i does not reach t, the trim part is then empty.
    """
    useful = automaton.reachable_mask() & automaton.coreachable_mask()
    if not useful >> automaton.initial_index & 1:
        raise HypothesisError("The initial state does not reach the terminal state, the trim part is empty")
    kept = [state for index, state in enumerate(automaton.states) if useful >> index & 1]
    kept_set = set(kept)
    edges = [edge for edge in automaton.edges if edge[0] in kept_set and edge[2] in kept_set]
    trimmed = MultiplicityAutomaton(alphabet=automaton.alphabet,
                                    states=tuple(kept),
                                    initial=automaton.initial,
                                    terminal=automaton.terminal,
                                    edges=tuple(edges))
    return TrimResult(automaton=trimmed, pre_trim_states=len(automaton.states))


def flower_states(word_set: FiniteWordSet) -> list[tuple[Word, Word]]:
    """
    The pairs (u, v) of nonempty words with uv ∈ X, sorted by the
    length-then-alphabet order of uv and then by the length of u.
    """
    alphabet = word_set.alphabet
    pairs = [(word[:split], word[split:]) for word in word_set.words for split in range(1, len(word))]
    return sorted(pairs, key=lambda pair: (alphabet.sort_key(pair[0] + pair[1]), len(pair[0])))


def flower_state_label(alphabet: Alphabet, pair: tuple[Word, Word]) -> str:
    return f"({alphabet.render(pair[0])},{alphabet.render(pair[1])})"


def flower_automaton(word_set: FiniteWordSet) -> MultiplicityAutomaton:
    """
    Builds the flower automaton of X: the states are ω = (1, 1) and the pairs
    (u, v) ∈ A⁺ × A⁺ with uv ∈ X, and each x = a₁⋯aₙ of X gives the petal
    ω → (a₁, a₂⋯aₙ) → ⋯ → (a₁⋯aₙ₋₁, aₙ) → ω. It is trim and recognizes X*
    with multiplicities.

    Args:
        word_set: The set X.

    Returns:
        MultiplicityAutomaton: The flower automaton, ω first then the pairs
            in canonical order, ω both initial and terminal.

    Examples:
        >>> flower_automaton(FiniteWordSet.from_strings(["a", "ab", "ba"])).states
        ('ω', '(a,b)', '(b,a)')
    """
    alphabet = word_set.alphabet
    states = [OMEGA] + [flower_state_label(alphabet, pair) for pair in flower_states(word_set)]
    edges = []
    for word in word_set.words:
        labels = [OMEGA] + [flower_state_label(alphabet, (word[:split], word[split:]))
                            for split in range(1, len(word))] + [OMEGA]
        for position, letter in enumerate(word):
            edges.append((labels[position], letter, labels[position + 1]))
    return MultiplicityAutomaton.from_edges(alphabet, states, OMEGA, OMEGA, edges)


def prefix_automaton(word_set: FiniteWordSet) -> MultiplicityAutomaton:
    """
    Builds the prefix automaton of X on the proper prefixes of the words of X
    (the empty word `1` included): p → pa when pa is a proper prefix and
    p → 1 when pa ∈ X, both edges possibly existing for the same (p, a).

    Args:
        word_set: The set X.

    Returns:
        MultiplicityAutomaton: The prefix automaton, `1` first then the
            prefixes in length-then-alphabet order, `1` both initial and
            terminal.
    """
    alphabet = word_set.alphabet
    prefixes = sorted({word[:length] for word in word_set.words for length in range(1, len(word))},
                      key=alphabet.sort_key)
    states = [EMPTY_PREFIX] + [alphabet.render(prefix) for prefix in prefixes]
    prefix_set = set(prefixes)
    words = set(word_set.words)
    edges = []
    for prefix in [EMPTY_WORD] + prefixes:
        source = alphabet.render(prefix)
        for letter in alphabet.symbols:
            extended = prefix + (letter,)
            if extended in prefix_set:
                edges.append((source, letter, alphabet.render(extended)))
            if extended in words:
                edges.append((source, letter, EMPTY_PREFIX))
    return MultiplicityAutomaton.from_edges(alphabet, states, EMPTY_PREFIX, EMPTY_PREFIX, edges)


def _identity_matrix(size: int) -> list[list[int]]:
    return [[1 if p == q else 0 for q in range(size)] for p in range(size)]


def letter_matrix(automaton: MultiplicityAutomaton, letter: str) -> IntegerMatrix:
    """μ(a): entry (p, q) is the number of edges p → q labeled a (0 or 1)."""
    relation = automaton.letter_relation(letter)
    return relation.to_matrix()


def mu(automaton: MultiplicityAutomaton, word: Word) -> IntegerMatrix:
    """
    Returns μ_𝒜(w), the matrix whose entry (p, q) is the number of paths
    p → q labeled w, as the product of the letter matrices.

    Raises:
        AlphabetError: If the word is not over the alphabet of the automaton.
    """
    automaton.alphabet.validate_word(word)
    size = len(automaton.states)
    result = _identity_matrix(size)
    for letter in word:
        step = letter_matrix(automaton, letter)
        result = [[sum(row[s] * step[s][q] for s in range(size) if row[s]) for q in range(size)]
                  for row in result]
    return tuple(tuple(row) for row in result)


def phi(automaton: MultiplicityAutomaton, word: Word) -> BooleanRelation:
    """
    Returns φ_𝒜(w), the relation p → q iff there is a path p → q labeled w.

    Raises:
        AlphabetError: If the word is not over the alphabet of the automaton.
    """
    automaton.alphabet.validate_word(word)
    result = BooleanRelation.identity(len(automaton.states))
    for letter in word:
        result = result @ automaton.letter_relation(letter)
    return result


def behavior_count(automaton: MultiplicityAutomaton, word: Word) -> int:
    """The multiplicity (|𝒜|, w) = μ_𝒜(w)[i, t]."""
    automaton.alphabet.validate_word(word)
    size = len(automaton.states)
    vector = [0] * size
    vector[automaton.initial_index] = 1
    for letter in word:
        step = letter_matrix(automaton, letter)
        vector = [sum(vector[s] * step[s][q] for s in range(size) if vector[s]) for q in range(size)]
    return vector[automaton.terminal_index]


def behavior_counts(automaton: MultiplicityAutomaton, max_length: int) -> dict[Word, int]:
    """
    The multiplicity (|𝒜|, w) of every word w of length at most `max_length`,
    extending the row vector of the initial state one letter at a time.
    """
    size = len(automaton.states)
    steps = {letter: letter_matrix(automaton, letter) for letter in automaton.alphabet.symbols}
    start = [0] * size
    start[automaton.initial_index] = 1
    counts: dict[Word, int] = {}
    layer: list[tuple[Word, list[int]]] = [(EMPTY_WORD, start)]
    for length in range(max_length + 1):
        following: list[tuple[Word, list[int]]] = []
        for word, vector in layer:
            counts[word] = vector[automaton.terminal_index]
            if length == max_length:
                continue
            for letter, step in steps.items():
                following.append((word + (letter,),
                                  [sum(vector[s] * step[s][q] for s in range(size) if vector[s]) for q in range(size)]))
        layer = following
    return counts


class SubsetSearch:
    """
    Subsets of states reached by a breadth-first determinisation, each with
    the first word reaching it.

    Attributes:
        words: The first word reaching each subset (a bitmask).
        complete: True if every reachable subset was visited.
    """

    def __init__(self, words: dict[int, Word], complete: bool) -> None:
        self.words = words
        self.complete = complete

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, subset: object) -> bool:
        return subset in self.words

    def __getitem__(self, subset: int) -> Word:
        return self.words[subset]


def subset_search(automaton: MultiplicityAutomaton,
                  start: int,
                  budgets: ResourceBudgets | None = None,
                  stop_at_empty: bool = False,
                  backward: bool = False,
                  max_depth: int | None = None) -> SubsetSearch:
    """
    Breadth-first subset construction from a set of states, letters tried in
    alphabet order.

    Args:
        automaton: The automaton.
        start: The initial subset, as a bitmask.
        budgets: Resource budgets, defaults to the packaged budgets.
        stop_at_empty: Stop as soon as the empty subset is reached.
        backward: Follow edges backwards, words then grow on the left.
        max_depth: Do not read words longer than this.

    Returns:
        SubsetSearch: The subsets reached and their first words.

    Raises:
        ResourceBudgetError: If more than `max_subsets` subsets are visited.
    """
    budgets = budgets or default_budgets()
    relations = automaton.letter_relations
    if backward:
        relations = {letter: relation.transpose() for letter, relation in relations.items()}
    words: dict[int, Word] = {start: EMPTY_WORD}
    queue = deque([start])
    complete = True
    while queue:
        subset = queue.popleft()
        word = words[subset]
        if max_depth is not None and len(word) >= max_depth:
            if any(relation.image(subset) not in words for relation in relations.values()):
                complete = False
            continue
        for letter, relation in relations.items():
            following = relation.image(subset)
            if following in words:
                continue
            words[following] = (letter,) + word if backward else word + (letter,)
            if len(words) > budgets.max_subsets:
                raise ResourceBudgetError(f"Subset construction exceeds max_subsets={budgets.max_subsets}")
            if stop_at_empty and following == 0:
                return SubsetSearch(words, complete=False)
            queue.append(following)
    return SubsetSearch(words, complete)


def language_sample(automaton: MultiplicityAutomaton, max_length: int) -> set[Word]:
    """The words of length at most `max_length` accepted by the automaton."""
    accepted: set[Word] = set()
    relations = automaton.letter_relations
    terminal_bit = 1 << automaton.terminal_index
    stack: list[tuple[Word, int]] = [(EMPTY_WORD, 1 << automaton.initial_index)]
    while stack:
        word, subset = stack.pop()
        if subset & terminal_bit:
            accepted.add(word)
        if len(word) == max_length:
            continue
        for letter, relation in relations.items():
            following = relation.image(subset)
            if following:
                stack.append((word + (letter,), following))
    return accepted


def behavior_difference(first: MultiplicityAutomaton, second: MultiplicityAutomaton) -> Word | None:
    """
    Compares the ℕ-behaviors of two automata exactly, by the spanning set
    method over the rationals.

    The row vectors [α₁μ₁(w) | α₂μ₂(w)] are explored breadth first and kept
    only when linearly independent of the vectors kept so far; the behaviors
    are equal iff every kept vector is orthogonal to [η₁; -η₂]. At most
    |Q₁| + |Q₂| vectors are ever kept.

    Returns:
        Word | None: A word with different multiplicities, or None when the
            behaviors are equal.
    """
    letters = list(first.alphabet.symbols) + [letter for letter in second.alphabet.symbols
                                              if letter not in first.alphabet]
    first_size = len(first.states)
    size = first_size + len(second.states)

    def _step(vector: list[Rational], letter: str) -> list[Rational]:
        following = [Rational(0)] * size
        for automaton, offset in ((first, 0), (second, first_size)):
            if letter not in automaton.alphabet:
                continue
            relation = automaton.letter_relation(letter)
            for source in range(len(automaton.states)):
                value = vector[offset + source]
                if value == 0:
                    continue
                for target in relation.successors(source):
                    following[offset + target] += value
        return following

    def _value(vector: list[Rational]) -> Rational:
        return vector[first.terminal_index] - vector[first_size + second.terminal_index]

    # Echelon basis: pivot column and normalized row.
    basis: list[tuple[int, list[Rational]]] = []

    def _reduce(vector: list[Rational]) -> list[Rational]:
        reduced = list(vector)
        for pivot, row in basis:
            if reduced[pivot] != 0:
                factor = reduced[pivot]
                reduced = [value - factor * basis_value for value, basis_value in zip(reduced, row)]
        return reduced

    def _insert(vector: list[Rational]) -> bool:
        reduced = _reduce(vector)
        pivot = next((column for column, value in enumerate(reduced) if value != 0), None)
        if pivot is None:
            return False
        leading = reduced[pivot]
        normalized = [value / leading for value in reduced]
        updated = []
        for other_pivot, row in basis:
            if row[pivot] != 0:
                factor = row[pivot]
                row = [value - factor * new_value for value, new_value in zip(row, normalized)]
            updated.append((other_pivot, row))
        basis[:] = updated
        basis.append((pivot, normalized))
        return True

    start = [Rational(0)] * size
    start[first.initial_index] = Rational(1)
    start[first_size + second.initial_index] = Rational(1)
    if _value(start) != 0:
        return EMPTY_WORD
    _insert(start)
    queue: deque[tuple[list[Rational], Word]] = deque([(start, EMPTY_WORD)])
    while queue:
        vector, word = queue.popleft()
        for letter in letters:
            following = _step(vector, letter)
            extended = word + (letter,)
            if _value(following) != 0:
                return extended
            if _insert(following):
                queue.append((following, extended))
    return None


def recognizes_with_multiplicities(automaton: MultiplicityAutomaton, word_set: FiniteWordSet) -> bool:
    """
    Decides whether |𝒜| = u(X)*, i.e. whether every word has as many paths
    from i to t as it has factorizations over X. The behavior is compared
    exactly with the one of the prefix automaton of X.

    Raises:
        HypothesisError: If the automaton is not trim.
    """
    if not automaton.is_trim:
        raise HypothesisError("recognizes_with_multiplicities requires a trim automaton, trim it first")
    witness = behavior_difference(automaton, prefix_automaton(word_set))
    if witness is not None:
        logger.debug(f"Multiplicities differ from u({word_set.render()})* on "
                     f"{word_set.alphabet.render(witness)}")
        return False
    return True


class ReductionMap(BaseModel):
    """
    A map ρ: P → Q from the states of 𝒜 = (P, i, t) onto the states of
    ℬ = (Q, j, u).

    Attributes:
        source: The automaton 𝒜.
        target: The automaton ℬ.
        mapping: ρ(p) for every state p of 𝒜.
    """

    model_config = ConfigDict(frozen=True)

    source: MultiplicityAutomaton
    target: MultiplicityAutomaton
    mapping: dict[str, str]

    @model_validator(mode="after")
    def check_map(self) -> "ReductionMap":
        """
        Checks that ρ is defined exactly on P, is onto Q and maps i to j and
        t to u.

        Returns:
            The ReductionMap object
        Raises:
            ValueError: If any of the above does not hold.
        """
        if set(self.mapping) != set(self.source.states):
            raise ValueError(f"The map must be defined exactly on the source states {self.source.states}")
        if set(self.mapping.values()) != set(self.target.states):
            missing = sorted(set(self.target.states) - set(self.mapping.values()))
            raise ValueError(f"The map is not onto the target states, missing: {missing}")
        if self.mapping[self.source.initial] != self.target.initial:
            raise ValueError("The map must send the initial state to the initial state")
        if self.mapping[self.source.terminal] != self.target.terminal:
            raise ValueError("The map must send the terminal state to the terminal state")
        return self

    def fiber(self, state: str) -> tuple[str, ...]:
        """ρ⁻¹(q) in source state order."""
        return tuple(source for source in self.source.states if self.mapping[source] == state)


ReductionVerdict = Literal["not_reduction", "reduction", "sharp_reduction"]


class ReductionCheck(BaseModel):
    """
    Result of `check_reduction`.

    Attributes:
        verdict: `not_reduction`, `reduction` or `sharp_reduction`.
        witness: On failure, a word labeling a path of one automaton that the
            other does not match.
        detail: A human readable explanation of the failure.
    """

    verdict: ReductionVerdict
    witness: Word | None = None
    detail: str = ""


def check_reduction(reduction: ReductionMap, budgets: ResourceBudgets | None = None) -> ReductionCheck:
    """
    Decides whether ρ is a reduction: for every word w and all q, q′ ∈ Q,
    there is a path q → q′ labeled w in ℬ iff there is a path p → p′ labeled w
    in 𝒜 with ρ(p) = q and ρ(p′) = q′.

    The direction from 𝒜 to ℬ holds iff every edge of 𝒜 projects to an edge
    of ℬ. The converse is checked by a search over pairs (q′, S) where S is
    the set of states of 𝒜 reached from the fiber of the starting state by
    the label of a path of ℬ ending in q′; S must always meet the fiber of q′.

    Args:
        reduction: The map ρ.
        budgets: Resource budgets, defaults to the packaged budgets.

    Returns:
        ReductionCheck: The verdict, sharp when the fibers of j and u are
            singletons.

    Raises:
        ResourceBudgetError: If more than `max_reduction_states` pairs are
            visited.
    """
    budgets = budgets or default_budgets()
    source, target, mapping = reduction.source, reduction.target, reduction.mapping
    target_edges = set(target.edges)
    for edge_source, letter, edge_target in source.edges:
        projected = (mapping[edge_source], letter, mapping[edge_target])
        if projected not in target_edges:
            logger.debug(f"Edge {(edge_source, letter, edge_target)} projects to the missing edge {projected}")
            return ReductionCheck(verdict="not_reduction",
                                  witness=(letter,),
                                  detail=f"edge {edge_source} -{letter}-> {edge_target} projects to "
                                         f"{projected[0]} -{letter}-> {projected[2]}, which is not an edge")

    fibers = {state: sum(1 << source.state_index(member) for member in reduction.fiber(state))
              for state in target.states}
    source_relations = source.letter_relations
    target_relations = target.letter_relations
    visited: set[tuple[int, int]] = set()
    for start_state in target.states:
        start = (target.state_index(start_state), fibers[start_state])
        if start in visited:
            continue
        visited.add(start)
        queue: deque[tuple[int, int, Word]] = deque([(start[0], start[1], EMPTY_WORD)])
        while queue:
            state, subset, word = queue.popleft()
            for letter in target.alphabet.symbols:
                following_subset = source_relations[letter].image(subset) if letter in source_relations else 0
                for following_state in target_relations[letter].successors(state):
                    pair = (following_state, following_subset)
                    if pair in visited:
                        continue
                    extended = word + (letter,)
                    if not following_subset & fibers[target.states[following_state]]:
                        logger.debug(f"Path labeled {target.alphabet.render(extended)} from {start_state} "
                                     f"to {target.states[following_state]} has no lift")
                        return ReductionCheck(verdict="not_reduction",
                                              witness=extended,
                                              detail=f"the path {start_state} -> {target.states[following_state]} "
                                                     f"labeled {target.alphabet.render(extended)} does not lift")
                    visited.add(pair)
                    if len(visited) > budgets.max_reduction_states:
                        raise ResourceBudgetError(f"Reduction check exceeds max_reduction_states="
                                                  f"{budgets.max_reduction_states}")
                    queue.append((following_state, following_subset, extended))

    sharp = len(reduction.fiber(target.initial)) == 1 and len(reduction.fiber(target.terminal)) == 1
    return ReductionCheck(verdict="sharp_reduction" if sharp else "reduction")


def canonical_sharp_reduction(word_set: FiniteWordSet,
                              automaton: MultiplicityAutomaton,
                              budgets: ResourceBudgets | None = None) -> ReductionMap:
    """
    Builds the sharp reduction from the flower automaton of X onto an
    automaton ℬ = (Q, i, i) recognizing X* with multiplicities: ω ↦ i and
    (u, v) ↦ the unique state q with i → q labeled u and q → i labeled v.

    Args:
        word_set: The set X, its own minimal generating set.
        automaton: The automaton ℬ.
        budgets: Resource budgets, defaults to the packaged budgets.

    Returns:
        ReductionMap: The reduction, verified to be sharp.

    Raises:
        HypothesisError: If X is not its own minimal generating set, ℬ is not
            trim, has distinct initial and terminal states or does not
            recognize X* with multiplicities.
        InvariantViolation: If the middle state is not unique or the map is
            not a sharp reduction.
    """
    if minimal_generating_set(word_set) != word_set:
        raise HypothesisError(f"{word_set.render()} is not its own minimal generating set")
    if automaton.initial != automaton.terminal:
        raise HypothesisError("The target automaton must have the same initial and terminal state")
    if not recognizes_with_multiplicities(automaton, word_set):
        raise HypothesisError(f"The target automaton does not recognize {word_set.render()}* with multiplicities")

    flower = flower_automaton(word_set)
    alphabet = word_set.alphabet
    initial = automaton.initial_index
    mapping = {OMEGA: automaton.initial}
    for pair in flower_states(word_set):
        head, tail = pair
        reached = phi(automaton, head).rows[initial]
        tail_relation = phi(automaton, tail)
        returning = [state for state in range(len(automaton.states))
                     if reached >> state & 1 and tail_relation[state, initial]]
        if len(returning) != 1:
            raise InvariantViolation(f"{len(returning)} states q with i -{alphabet.render(head)}-> q "
                                     f"-{alphabet.render(tail)}-> i, expected exactly one")
        mapping[flower_state_label(alphabet, pair)] = automaton.states[returning[0]]

    reduction = ReductionMap(source=flower, target=automaton, mapping=mapping)
    check = check_reduction(reduction, budgets)
    if check.verdict != "sharp_reduction":
        raise InvariantViolation(f"The canonical map is not a sharp reduction: {check.verdict} {check.detail}")
    return reduction


def induced_morphism(reduction: ReductionMap, monoid: TransitionMonoid, element: int) -> BooleanRelation:
    """
    Returns ρ̂(m) = φ_ℬ(w) where w is the witness word of the element m of
    φ_𝒜(A*).
    """
    return phi(reduction.target, monoid.witness(element))
