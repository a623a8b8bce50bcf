"""
Degree, group and synchronization of a finite set X, and the degree of a
composition X = Y ∘_β Z with its imprimitivity structure.

Every degree is computed on the minimal generating set of X*, so that the
flower automaton recognizes X* with multiplicities and the degree does not
depend on redundant generators.
"""
import logging
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator
from sympy.combinatorics import Permutation

from submonoid_analysis.automata import (
    MultiplicityAutomaton,
    check_reduction,
    flower_automaton,
    induced_morphism,
    phi,
    prefix_automaton,
    recognizes_with_multiplicities,
    subset_search,
)
from submonoid_analysis.config import ResourceBudgets, default_budgets
from submonoid_analysis.errors import HypothesisError, InvariantViolation
from submonoid_analysis.relmonoid import (
    GreenClasses,
    MinimalRank,
    PermutationGroupRep,
    TransitionMonoid,
    component_label,
    enumerate_monoid,
    gamma_representation,
    green_relations,
    groups_equivalent,
    idempotent_structure,
    minimal_rank,
)
from submonoid_analysis.transducers import prefix_transducer, projection_reduction, wreath_product
from submonoid_analysis.words import (
    CodingMorphism,
    FiniteWordSet,
    Word,
    compose,
    in_star,
    is_code,
    is_complete,
    minimal_generating_set,
)

logger = logging.getLogger(__name__)

AutomatonTag = Literal["flower", "prefix", "supplied"]


class DegreeReport(BaseModel):
    """
    The degree d(X) and the group G(X) of a finite set X.

    Attributes:
        word_set: The set X as given.
        generating_set: The minimal generating set of X*, on which the
            computation runs.
        degree: d(X), the minimal rank of the transition monoid.
        group: G(X), the group G_e of the chosen minimal idempotent e acting
            on its components Γ. Not serialized, see `group_order`,
            `group_name` and `group_generators`.
        witness_idempotent_word: The shortest nonempty word whose image is e
            (the empty word when only the empty word maps to e).
        automaton_used: Which automaton the monoid was computed from.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    word_set: FiniteWordSet
    generating_set: FiniteWordSet
    degree: int = Field(gt=0)
    group: PermutationGroupRep = Field(exclude=True)
    witness_idempotent_word: Word
    automaton_used: AutomatonTag

    @model_validator(mode="after")
    def check_degree(self) -> "DegreeReport":
        """
        Checks that the degree is the size of the domain of the group.

        Returns:
            The DegreeReport object
        Raises:
            ValueError: If the degree and the group domain size differ.
        """
        if self.degree != self.group.degree:
            raise ValueError(f"Degree {self.degree} differs from the group domain size {self.group.degree}")
        return self

    @computed_field
    @property
    def group_order(self) -> int:
        return self.group.order

    @computed_field
    @property
    def group_name(self) -> str:
        return self.group.describe()

    @computed_field
    @property
    def group_generators(self) -> list[str]:
        return [self.group.cycle_notation(generator) for generator in self.group.generators]


class _MonoidAnalysis:
    """The monoid of an automaton with its Green classes and a chosen minimal idempotent."""

    def __init__(self, automaton: MultiplicityAutomaton, budgets: ResourceBudgets) -> None:
        self.automaton = automaton
        self.monoid: TransitionMonoid = enumerate_monoid(automaton, budgets)
        self.green: GreenClasses = green_relations(self.monoid)
        self.minimal: MinimalRank = minimal_idempotent_fixing(self.monoid, automaton.initial_index, budgets)

    def group(self) -> PermutationGroupRep:
        return gamma_representation(self.monoid, self.minimal.idempotent, self.green, self.automaton.states)

    def witness(self) -> Word:
        nonempty = self.monoid.nonempty_witness(self.minimal.idempotent)
        return nonempty if nonempty is not None else self.monoid.witness(self.minimal.idempotent)


def minimal_idempotent_fixing(monoid: TransitionMonoid,
                              state: int,
                              budgets: ResourceBudgets | None = None) -> MinimalRank:
    """
    An idempotent of minimal rank that fixes `state`, the first in
    enumeration order, falling back on the first idempotent of minimal rank
    when none fixes it.
    """
    overall = minimal_rank(monoid, budgets=budgets)
    for index in monoid.idempotents():
        relation = monoid.elements[index]
        if relation.is_zero or not relation[state, state]:
            continue
        structure = idempotent_structure(relation)
        if structure.rank == overall.rank:
            return MinimalRank(rank=overall.rank, idempotent=index, structure=structure)
    return overall


def _degree_report(word_set: FiniteWordSet,
                   generating_set: FiniteWordSet,
                   automaton: MultiplicityAutomaton,
                   tag: AutomatonTag,
                   budgets: ResourceBudgets) -> DegreeReport:
    analysis = _MonoidAnalysis(automaton, budgets)
    report = DegreeReport(word_set=word_set,
                          generating_set=generating_set,
                          degree=analysis.minimal.rank,
                          group=analysis.group(),
                          witness_idempotent_word=analysis.witness(),
                          automaton_used=tag)
    logger.info(f"d({word_set.render()}) = {report.degree} from the {tag} automaton, G ≅ {report.group_name}")
    return report


def degree(word_set: FiniteWordSet, budgets: ResourceBudgets | None = None) -> DegreeReport:
    """
    Computes d(X) and G(X) from the transition monoid of the flower automaton
    of the minimal generating set of X*.

    Args:
        word_set: The set X.
        budgets: Resource budgets, defaults to the packaged budgets.

    Returns:
        DegreeReport: The degree, the group and the witness of the minimal
            idempotent.

    Raises:
        ResourceBudgetError: If the monoid is too large.

    Examples:
        >>> degree(FiniteWordSet.from_strings(["a", "ab", "ba"])).degree
        1
    """
    budgets = budgets or default_budgets()
    generating_set = minimal_generating_set(word_set)
    return _degree_report(word_set, generating_set, flower_automaton(generating_set), "flower", budgets)


def degree_from_automaton(word_set: FiniteWordSet,
                          automaton: MultiplicityAutomaton,
                          tag: AutomatonTag = "supplied",
                          budgets: ResourceBudgets | None = None) -> DegreeReport:
    """
    Computes the degree and group of X from another automaton recognizing X*
    with multiplicities.

    Raises:
        HypothesisError: If X is not its own minimal generating set, the
            automaton is not trim or does not recognize X* with
            multiplicities.
    """
    budgets = budgets or default_budgets()
    if minimal_generating_set(word_set) != word_set:
        raise HypothesisError(f"{word_set.render()} is not its own minimal generating set")
    if not recognizes_with_multiplicities(automaton, word_set):
        raise HypothesisError(f"The automaton does not recognize {word_set.render()}* with multiplicities")
    return _degree_report(word_set, word_set, automaton, tag, budgets)


def degree_invariance_check(word_set: FiniteWordSet,
                            automaton: MultiplicityAutomaton,
                            budgets: ResourceBudgets | None = None) -> bool:
    """
    Checks that the degree and the group computed from a trim automaton
    recognizing X* with multiplicities agree with the flower based ones.

    Raises:
        HypothesisError: If the preconditions of `degree_from_automaton` fail.
    """
    budgets = budgets or default_budgets()
    supplied = degree_from_automaton(word_set, automaton, "supplied", budgets)
    reference = degree(word_set, budgets)
    return supplied.degree == reference.degree and groups_equivalent(supplied.group, reference.group, budgets)


def is_synchronized(word_set: FiniteWordSet, budgets: ResourceBudgets | None = None) -> bool:
    """True iff d(X) = 1."""
    return degree(word_set, budgets).degree == 1


def find_synchronizing_word(word_set: FiniteWordSet, budgets: ResourceBudgets | None = None) -> Word | None:
    """
    Returns the shortest (then alphabetically least) nonempty word x ∈ X*
    whose image in the flower automaton has rank 1, None when d(X) > 1.

    The elements of rank 1 form the D-class K of the minimal idempotents, and
    x ∈ X* iff ω → ω in φ(x), so the answer is the least witness among the
    elements of K containing (ω, ω).
    """
    budgets = budgets or default_budgets()
    generating_set = minimal_generating_set(word_set)
    automaton = flower_automaton(generating_set)
    analysis = _MonoidAnalysis(automaton, budgets)
    if analysis.minimal.rank != 1:
        return None
    initial = automaton.initial_index
    alphabet = generating_set.alphabet
    candidates = []
    for index in analysis.green.d_class(analysis.minimal.idempotent):
        if not analysis.monoid.elements[index][initial, initial]:
            continue
        witness = analysis.monoid.nonempty_witness(index)
        if witness is not None:
            candidates.append(witness)
    if not candidates:
        raise InvariantViolation(f"No element of rank 1 of the monoid of {generating_set.render()} fixes ω")
    return min(candidates, key=alphabet.sort_key)


SyncVerdict = Literal["certified", "refuted", "unknown"]


class SyncCheck(BaseModel):
    """
    Result of `check_synchronizing_word`.

    Attributes:
        verdict: `certified`, `refuted` or `unknown`.
        left: On refutation, the word u of a violation uxv ∈ X*.
        right: On refutation, the word v.
    """

    verdict: SyncVerdict
    left: Word | None = None
    right: Word | None = None


def check_synchronizing_word(word_set: FiniteWordSet,
                             word: Word,
                             budgets: ResourceBudgets | None = None) -> SyncCheck:
    """
    Checks whether x ∈ X* is synchronizing: uxv ∈ X* implies ux, xv ∈ X*.

    It is certified at once when, in the flower automaton, every p → q
    labeled x passes through ω, i.e. p → ω and ω → q labeled x. Otherwise the
    sets U = ω·u and V = v·ω are explored breadth first, u and v of length at
    most 2|Q| + |x|, and a violation is looked for. Whether uxv, ux and xv
    belong to X* depends only on U and V, so the answer is exact when every
    set was visited within that bound.

    Raises:
        HypothesisError: If x is not in X*.
    """
    budgets = budgets or default_budgets()
    generating_set = minimal_generating_set(word_set)
    if not in_star(generating_set, word):
        raise HypothesisError(f"{generating_set.alphabet.render(word)} is not in {generating_set.render()}*")
    automaton = flower_automaton(generating_set)
    relation = phi(automaton, word)
    initial = automaton.initial_index
    if all(relation[p, initial] and relation[initial, q] for p, q in relation.pairs()):
        return SyncCheck(verdict="certified")

    bound = 2 * len(automaton.states) + len(word)
    forward = subset_search(automaton, 1 << initial, budgets, max_depth=bound)
    backward = subset_search(automaton, 1 << initial, budgets, backward=True, max_depth=bound)
    alphabet = generating_set.alphabet
    best: tuple[tuple, Word, Word] | None = None
    for left_set, left in forward.words.items():
        image = relation.image(left_set)
        left_in = bool(image >> initial & 1)
        for right_set, right in backward.words.items():
            if not image & right_set:
                continue
            right_in = bool(relation.rows[initial] & right_set)
            if left_in and right_in:
                continue
            key = (len(left) + len(right), alphabet.sort_key(left), alphabet.sort_key(right))
            if best is None or key < best[0]:
                best = (key, left, right)
    if best is not None:
        logger.debug(f"{alphabet.render(word)} is not synchronizing: u={alphabet.render(best[1])}, "
                     f"v={alphabet.render(best[2])}")
        return SyncCheck(verdict="refuted", left=best[1], right=best[2])
    if forward.complete and backward.complete:
        return SyncCheck(verdict="certified")
    return SyncCheck(verdict="unknown")


class CompositionDegreeReport(BaseModel):
    """
    The degree structure of a composition X = Y ∘_β Z with Y complete.

    Attributes:
        y_set: Y over the source alphabet of β.
        z_set: Z = β(B).
        beta: The coding morphism.
        x_set: X = β(Y).
        was_trim: Whether β is injective on Y.
        d_x, d_y, d_z: The degrees of X, Y and Z, each computed on its own.
        wreath_degree: |Γ(e)| for the chosen minimal idempotent e of the
            monoid of flower(Y) ∘ prefix transducer of Z.
        theta: The classes of θ, each a sorted list of component labels.
        g_theta: The action of G_e on the θ-classes.
        g_upper_theta: The action on the initial class of the elements
            stabilizing it.
        theta_compatible: Every element of G_e permutes the θ-classes.
        lower_group_matches: G_θ is equivalent to G(Z).
        upper_group_matches: G^θ is equivalent to G(Y).
        product_law_holds: d(X) = d(Y)·d(Z).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    y_set: FiniteWordSet
    z_set: FiniteWordSet
    beta: CodingMorphism
    x_set: FiniteWordSet
    was_trim: bool
    d_x: int
    d_y: int
    d_z: int
    wreath_degree: int
    theta: list[list[str]]
    g_theta: PermutationGroupRep = Field(exclude=True)
    g_upper_theta: PermutationGroupRep = Field(exclude=True)
    theta_compatible: bool
    lower_group_matches: bool
    upper_group_matches: bool
    product_law_holds: bool

    @computed_field
    @property
    def g_theta_order(self) -> int:
        return self.g_theta.order

    @computed_field
    @property
    def g_upper_theta_order(self) -> int:
        return self.g_upper_theta.order


def _restricted_group(domain: tuple[str, ...], arrays: set[tuple[int, ...]]) -> PermutationGroupRep:
    permutations = tuple(Permutation(list(array)) for array in sorted(arrays))
    return PermutationGroupRep(domain=domain, permutations=permutations)


def composition_degree_report(y_set: FiniteWordSet,
                              beta: CodingMorphism,
                              budgets: ResourceBudgets | None = None) -> CompositionDegreeReport:
    """
    Builds 𝒜 = ℬ∘𝒯 from the flower automaton ℬ of Y and the prefix
    transducer 𝒯 of Z, and the reduction ρ: (q, p) ↦ p onto the prefix
    automaton 𝒞 of Z. For a minimal idempotent e of φ_𝒜(A*) fixing the
    initial state, the components Γ of e are grouped into the classes of θ:
    σ θ σ′ iff ρ maps them into the same component of ê = ρ̂(e). G_e then
    acts on the classes (G_θ) and the stabilizer of the initial class acts
    on it (G^θ). The degrees d(X), d(Y) and d(Z) are computed independently.

    Args:
        y_set: The set Y over the source alphabet of β.
        beta: The coding morphism β.
        budgets: Resource budgets, defaults to the packaged budgets.

    Returns:
        CompositionDegreeReport: The degrees, θ, both groups and the checks.

    Raises:
        HypothesisError: If Y and Z are not composable or Y is not complete.
        InvariantViolation: If ρ is not a reduction or θ is not well
            defined.
    """
    budgets = budgets or default_budgets()
    composition = compose(y_set, beta)
    source_y = FiniteWordSet.from_words(y_set.words, beta.source)
    completeness = is_complete(source_y, budgets)
    if not completeness.is_complete:
        raise HypothesisError(f"Y = {source_y.render()} is not complete, "
                              f"{beta.source.render(completeness.witness or ())} is not a factor of Y*")
    z_set = beta.image_set()

    wreath = wreath_product(flower_automaton(source_y), prefix_transducer(z_set, beta))
    automaton = wreath.automaton
    prefix_z = prefix_automaton(z_set)
    reduction = projection_reduction(wreath, prefix_z)
    verdict = check_reduction(reduction, budgets)
    if verdict.verdict == "not_reduction":
        raise InvariantViolation(f"(q,p) ↦ p is not a reduction onto the prefix automaton of Z: {verdict.detail}")

    analysis = _MonoidAnalysis(automaton, budgets)
    structure = analysis.minimal.structure
    try:
        projected = idempotent_structure(induced_morphism(reduction, analysis.monoid, analysis.minimal.idempotent))
    except HypothesisError as e:
        raise InvariantViolation("The image of a minimal idempotent under the reduction is not idempotent") from e

    images = []
    for component in structure.components:
        targets = {projected.component_of(prefix_z.state_index(reduction.mapping[automaton.states[state]]))
                   for state in component}
        if len(targets) != 1 or None in targets:
            raise InvariantViolation(f"Component {component_label(component, automaton.states)} is not mapped "
                                     f"into a single component of the projected idempotent")
        images.append(targets.pop())

    classes: list[list[int]] = []
    class_of_image: dict[int, int] = {}
    for position, image in enumerate(images):
        if image not in class_of_image:
            class_of_image[image] = len(classes)
            classes.append([])
        classes[class_of_image[image]].append(position)
    class_of = {position: class_of_image[image] for position, image in enumerate(images)}

    group = analysis.group()
    theta_compatible = True
    lower_arrays: set[tuple[int, ...]] = set()
    initial_component = structure.component_of(automaton.initial_index)
    if initial_component is None:
        raise InvariantViolation("The chosen minimal idempotent does not fix the initial state")
    initial_class = classes[class_of[initial_component]]
    upper_arrays: set[tuple[int, ...]] = set()
    for permutation in group.permutations:
        array = permutation.array_form
        class_images = []
        for members in classes:
            mapped = {class_of[array[member]] for member in members}
            if len(mapped) != 1:
                theta_compatible = False
            class_images.append(min(mapped))
        if len(set(class_images)) == len(class_images):
            lower_arrays.add(tuple(class_images))
        else:
            theta_compatible = False
        if {array[member] for member in initial_class} == set(initial_class):
            upper_arrays.add(tuple(initial_class.index(array[member]) for member in initial_class))

    def _labels(members: list[int]) -> list[str]:
        return sorted(group.domain[member] for member in members)

    lower_group = _restricted_group(tuple(",".join(_labels(members)) for members in classes), lower_arrays)
    upper_group = _restricted_group(tuple(group.domain[member] for member in initial_class), upper_arrays)

    x_report = degree(composition.composed, budgets)
    y_report = degree(source_y, budgets)
    z_report = degree(z_set, budgets)
    report = CompositionDegreeReport(
        y_set=source_y,
        z_set=z_set,
        beta=beta,
        x_set=composition.composed,
        was_trim=composition.was_trim,
        d_x=x_report.degree,
        d_y=y_report.degree,
        d_z=z_report.degree,
        wreath_degree=structure.rank,
        theta=[_labels(members) for members in classes],
        g_theta=lower_group,
        g_upper_theta=upper_group,
        theta_compatible=theta_compatible,
        lower_group_matches=theta_compatible and groups_equivalent(lower_group, z_report.group, budgets),
        upper_group_matches=theta_compatible and groups_equivalent(upper_group, y_report.group, budgets),
        product_law_holds=x_report.degree == y_report.degree * z_report.degree,
    )
    logger.info(f"d(X)={report.d_x}, d(Y)={report.d_y}, d(Z)={report.d_z}, {len(classes)} θ-classes")
    return report


def code_preservation_check(y_set: FiniteWordSet,
                            beta: CodingMorphism,
                            budgets: ResourceBudgets | None = None) -> bool:
    """
    Checks on one instance that if X = Y ∘_β Z is a code and Y is complete,
    then Z is a code.

    Returns:
        bool: True when X is not a code (vacuously) or Z is a code.

    Raises:
        HypothesisError: If Y is not complete, or X is a code while the
            decomposition is not trim.
    """
    composition = compose(y_set, beta)
    source_y = FiniteWordSet.from_words(y_set.words, beta.source)
    if not is_complete(source_y, budgets).is_complete:
        raise HypothesisError(f"Y = {source_y.render()} is not complete")
    if not is_code(composition.composed).is_code:
        return True
    if not composition.was_trim:
        raise HypothesisError("The decomposition is not trim, use the trimmed set returned by compose()")
    return is_code(beta.image_set()).is_code
