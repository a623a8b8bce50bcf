"""
Seeded random instances and the property harness that runs on them.

Every instance is a pure function of `(seed, index)`, so a corpus can be
evaluated in any order and in parallel with the same results.
"""
import logging
import random
from typing import Literal

from pydantic import BaseModel, Field

from submonoid_analysis.analysis import (
    check_synchronizing_word,
    code_preservation_check,
    composition_degree_report,
    degree,
    degree_invariance_check,
    find_synchronizing_word,
)
from submonoid_analysis.automata import behavior_counts, flower_automaton, prefix_automaton
from submonoid_analysis.config import ResourceBudgets, default_budgets
from submonoid_analysis.errors import SubmonoidError
from submonoid_analysis.relmonoid import (
    TransitionMonoid,
    boolean_rank,
    enumerate_monoid,
    gamma_representation,
    green_relations,
    groups_equivalent,
    h_class_group,
    idempotent_structure,
    minimal_rank,
    stabilizer_index,
)
from submonoid_analysis.words import (
    Alphabet,
    CodingMorphism,
    FiniteWordSet,
    Word,
    compose,
    factorization_counts,
    minimal_generating_set,
)

logger = logging.getLogger(__name__)

InstanceKind = Literal["word_set", "decomposition"]

MAX_ATTEMPTS = 100
WORD_SET_ALPHABETS = ("ab", "abc")


def instance_rng(seed: int, index: int) -> random.Random:
    """The generator of instance `index` of the corpus `seed`."""
    return random.Random(seed * 1_000_003 + index)


def random_word(rng: random.Random, alphabet: Alphabet, min_length: int, max_length: int) -> Word:
    return tuple(rng.choice(alphabet.symbols) for _ in range(rng.randint(min_length, max_length)))


def random_word_set(rng: random.Random,
                    alphabet: Alphabet | str | None = None,
                    max_words: int = 4,
                    max_length: int = 4) -> FiniteWordSet:
    """
    A random set of between 1 and `max_words` distinct nonempty words of
    length at most `max_length`, over `alphabet` or else over a random choice
    of {a, b} or {a, b, c}.
    """
    alphabet = Alphabet.of(alphabet if alphabet is not None else rng.choice(WORD_SET_ALPHABETS))
    available = sum(len(alphabet) ** length for length in range(1, max_length + 1))
    size = min(rng.randint(1, max_words), available)
    words: set[Word] = set()
    while len(words) < size:
        words.add(random_word(rng, alphabet, 1, max_length))
    return FiniteWordSet.from_words(words, alphabet)


def random_complete_set(rng: random.Random,
                        alphabet: Alphabet | str = "uv",
                        expansions: int = 2,
                        extra_words: int = 1,
                        max_length: int = 3) -> FiniteWordSet:
    """
    A random complete set: a maximal prefix code, grown from the alphabet by
    replacing a random word w by all the words wb for `expansions` steps, to
    which up to `extra_words` random words are added. Supersets of a complete
    set are complete.
    """
    alphabet = Alphabet.of(alphabet)
    leaves: list[Word] = [(letter,) for letter in alphabet.symbols]
    for _ in range(expansions):
        expandable = [leaf for leaf in leaves if len(leaf) < max_length]
        if not expandable:
            break
        chosen = rng.choice(expandable)
        leaves.remove(chosen)
        leaves.extend(chosen + (letter,) for letter in alphabet.symbols)
    words = set(leaves)
    for _ in range(rng.randint(0, extra_words)):
        words.add(random_word(rng, alphabet, 1, max_length))
    return FiniteWordSet.from_words(words, alphabet)


def random_coding_morphism(rng: random.Random,
                           source: Alphabet | str = "uv",
                           target: Alphabet | str = "ab",
                           max_length: int = 2) -> CodingMorphism:
    """
    A random coding morphism whose images, distinct nonempty words of length
    at most `max_length`, use every letter of the target alphabet.

    Raises:
        ValueError: If no such morphism is found.
    """
    source = Alphabet.of(source)
    target = Alphabet.of(target)
    for _ in range(MAX_ATTEMPTS):
        images = {letter: random_word(rng, target, 1, max_length) for letter in source.symbols}
        if len(set(images.values())) != len(images):
            continue
        if {symbol for image in images.values() for symbol in image} != set(target.symbols):
            continue
        return CodingMorphism(source=source, target=target, images=images)
    raise ValueError(f"No coding morphism {source.symbols} -> {target.symbols} with images "
                     f"of length at most {max_length} found")


def random_decomposition(rng: random.Random,
                         source: Alphabet | str = "uv",
                         target: Alphabet | str = "ab") -> tuple[FiniteWordSet, CodingMorphism]:
    """
    A random trim decomposition (Y, β) with Y complete.

    Raises:
        ValueError: If no trim decomposition is found.
    """
    for _ in range(MAX_ATTEMPTS):
        y_set = random_complete_set(rng, source)
        beta = random_coding_morphism(rng, source, target)
        if compose(y_set, beta).was_trim:
            return y_set, beta
    raise ValueError("No trim decomposition found")


class InstanceResult(BaseModel):
    """
    The properties checked on one corpus instance.

    Attributes:
        index: The position of the instance in the corpus.
        kind: `word_set` or `decomposition`.
        description: The instance, rendered.
        checks: The name and outcome of every property checked.
        error: The error raised while checking, if any.
    """

    index: int
    kind: InstanceKind
    description: str
    checks: dict[str, bool] = Field(default_factory=dict)
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(self.checks.values())


def check_minimal_ideal(monoid: TransitionMonoid, budgets: ResourceBudgets) -> dict[str, bool]:
    """
    Checks the structure of a transitive monoid of relations around its
    minimal rank r(M).

    Every idempotent has a column-row decomposition and every nonzero one a
    faithful γ_e. The nonzero idempotents of rank r(M) lie in a single
    regular D-class K such that K ∪ {0} is an ideal. Their groups G_e are
    transitive, pairwise equivalent and the stabilizer of any fixed point
    has index r(M). Below `max_rank_dimension` their boolean rank is r(M).
    """
    green = green_relations(monoid)
    minimal = minimal_rank(monoid, budgets=budgets, cross_check=False)
    structures = {index: idempotent_structure(monoid.elements[index]) for index in monoid.idempotents()}
    representations = {index: gamma_representation(monoid, index, green)
                       for index in structures if not monoid.elements[index].is_zero}
    minimal_indices = [index for index in representations if structures[index].rank == minimal.rank]

    d_index = green.d_of[minimal.idempotent]
    d_class = set(green.d_classes[d_index])
    allowed = d_class | {monoid.zero_index}
    groups = [representations[index] for index in minimal_indices]

    stabilizers_match = True
    for index in minimal_indices:
        group = h_class_group(monoid, index, green)
        for state in structures[index].fixed_points:
            if stabilizer_index(monoid, group, state) != minimal.rank:
                stabilizers_match = False

    equivalent = True
    if minimal.rank <= budgets.max_equivalence_domain:
        equivalent = all(groups_equivalent(groups[0], other, budgets) for other in groups[1:])
    ranks_match = True
    if monoid.size <= budgets.max_rank_dimension:
        ranks_match = all(boolean_rank(monoid.elements[index], budgets) == minimal.rank for index in minimal_indices)
    return {
        "idempotents_decompose": all(structure.product() == monoid.elements[index]
                                     for index, structure in structures.items()),
        "gamma_faithful": all(representation.order == len(green.h_class(index))
                              for index, representation in representations.items()),
        "minimal_d_class_unique": all(green.d_of[index] == d_index for index in minimal_indices),
        "minimal_d_class_regular": green.regular[d_index],
        "minimal_ideal_closed": all(product in allowed
                                    for member in d_class
                                    for product in (*monoid.right_cayley[member], *monoid.left_cayley[member])),
        "minimal_groups_transitive": all(group.is_transitive() for group in groups),
        "minimal_groups_equivalent": equivalent,
        "stabilizer_index_is_rank": stabilizers_match,
        "boolean_rank_is_rank": ranks_match,
    }


def check_word_set(word_set: FiniteWordSet, budgets: ResourceBudgets, max_word_length: int = 8) -> dict[str, bool]:
    """
    Checks on X, reduced to its minimal generating set: multiplicities of the
    flower and prefix automata against the factorization count on every word
    of length at most `max_word_length`, the degree computed from both
    automata, the synchronization properties and the minimal ideal of the
    monoid of the flower automaton.
    """
    generating_set = minimal_generating_set(word_set)
    flower = flower_automaton(generating_set)
    prefix = prefix_automaton(generating_set)
    expected = factorization_counts(generating_set, max_word_length)
    counts_agree = (behavior_counts(flower, max_word_length) == expected
                    and behavior_counts(prefix, max_word_length) == expected)
    report = degree(generating_set, budgets)
    synchronizing = find_synchronizing_word(generating_set, budgets)
    certified = (synchronizing is None
                 or check_synchronizing_word(generating_set, synchronizing, budgets).verdict == "certified")
    monoid = enumerate_monoid(flower, budgets)
    checks = {
        "counts_agree": counts_agree,
        "degree_invariant": degree_invariance_check(generating_set, prefix, budgets),
        "degree_is_minimal_rank": report.degree == minimal_rank(monoid, budgets=budgets, cross_check=False).rank,
        "synchronized_iff_word": (report.degree == 1) == (synchronizing is not None),
        "synchronizing_word_certified": certified,
    }
    checks.update(check_minimal_ideal(monoid, budgets))
    return checks


def check_decomposition(y_set: FiniteWordSet, beta: CodingMorphism, budgets: ResourceBudgets) -> dict[str, bool]:
    """Checks the degree product law, both group equivalences and code preservation on (Y, β)."""
    report = composition_degree_report(y_set, beta, budgets)
    return {
        "product_law": report.product_law_holds,
        "theta_compatible": report.theta_compatible,
        "lower_group": report.lower_group_matches,
        "upper_group": report.upper_group_matches,
        "code_preservation": code_preservation_check(y_set, beta, budgets),
    }


def run_instance(seed: int, index: int, budgets: ResourceBudgets | None = None) -> InstanceResult:
    """
    Generates and checks instance `index` of the corpus `seed`. Even
    instances are word sets, odd ones decompositions. Errors raised by the
    library are recorded, not propagated.
    """
    budgets = budgets or default_budgets()
    rng = instance_rng(seed, index)
    if index % 2 == 0:
        word_set = random_word_set(rng)
        result = InstanceResult(index=index, kind="word_set", description=word_set.render())
        try:
            result.checks = check_word_set(word_set, budgets)
        except SubmonoidError as e:
            result.error = f"{type(e).__name__}: {e}"
    else:
        y_set, beta = random_decomposition(rng)
        images = ", ".join(f"{letter}->{beta.target.render(image)}" for letter, image in beta.images.items())
        result = InstanceResult(index=index, kind="decomposition", description=f"Y = {y_set.render()}, β: {images}")
        try:
            result.checks = check_decomposition(y_set, beta, budgets)
        except SubmonoidError as e:
            result.error = f"{type(e).__name__}: {e}"
    if not result.passed:
        logger.warning(f"Instance {index} of corpus {seed} failed: {result.description} {result.checks} "
                       f"{result.error or ''}")
    return result
