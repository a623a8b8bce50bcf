"""
Boolean relations on a finite set, the monoids they generate and their
structure: Green's relations, idempotents, column-row decompositions, the
permutation groups of H-classes, minimal rank and boolean rank.

States are the integers `0..n-1`; a relation is stored as one bitmask per
row, bit `q` of row `p` being set when `p → q`.
"""
import itertools
import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from math import factorial
from typing import TYPE_CHECKING, Iterable, Iterator, Mapping, Sequence

import networkx as nx
from pydantic import BaseModel, ConfigDict
from sympy.combinatorics import Permutation, PermutationGroup

from submonoid_analysis.config import ResourceBudgets, default_budgets
from submonoid_analysis.errors import HypothesisError, InvariantViolation, ResourceBudgetError

if TYPE_CHECKING:
    from submonoid_analysis.automata import MultiplicityAutomaton

logger = logging.getLogger(__name__)

Word = tuple[str, ...]

# Records holding relations and sympy permutations.
_RECORD_CONFIG = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True, slots=True)
class BooleanRelation:
    """
    A relation on `{0, …, size-1}`, i.e. a boolean square matrix.

    The product `m @ n` is the relational composition: `p → q` in `m @ n` iff
    `p → s` in `m` and `s → q` in `n` for some `s`.
    """

    size: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.size:
            raise ValueError(f"Expected {self.size} rows, got {len(self.rows)}")
        limit = 1 << self.size
        for row in self.rows:
            if row < 0 or row >= limit:
                raise ValueError(f"Row bitmask {row} out of range for a relation of size {self.size}")

    @classmethod
    def identity(cls, size: int) -> "BooleanRelation":
        return cls(size, tuple(1 << p for p in range(size)))

    @classmethod
    def zero(cls, size: int) -> "BooleanRelation":
        return cls(size, (0,) * size)

    @classmethod
    def full(cls, size: int) -> "BooleanRelation":
        return cls(size, ((1 << size) - 1,) * size)

    @classmethod
    def from_pairs(cls, size: int, pairs: Iterator[tuple[int, int]] | Sequence[tuple[int, int]]) -> "BooleanRelation":
        rows = [0] * size
        for p, q in pairs:
            rows[p] |= 1 << q
        return cls(size, tuple(rows))

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[int | bool]]) -> "BooleanRelation":
        """
        Builds a relation from a square 0/1 matrix, e.g. `[[1, 1], [0, 1]]`.

        Raises:
            ValueError: If the matrix is not square.
        """
        size = len(matrix)
        rows = []
        for row in matrix:
            if len(row) != size:
                raise ValueError(f"Expected a square matrix of size {size}, got a row of length {len(row)}")
            rows.append(sum(1 << q for q, value in enumerate(row) if value))
        return cls(size, tuple(rows))

    def __matmul__(self, other: "BooleanRelation") -> "BooleanRelation":
        if other.size != self.size:
            raise ValueError(f"Cannot compose relations of sizes {self.size} and {other.size}")
        other_rows = other.rows
        result = []
        for row in self.rows:
            accumulated = 0
            while row:
                low = row & -row
                accumulated |= other_rows[low.bit_length() - 1]
                row ^= low
            result.append(accumulated)
        return BooleanRelation(self.size, tuple(result))

    def __or__(self, other: "BooleanRelation") -> "BooleanRelation":
        return BooleanRelation(self.size, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def __getitem__(self, pair: tuple[int, int]) -> bool:
        p, q = pair
        return bool(self.rows[p] >> q & 1)

    def successors(self, p: int) -> list[int]:
        return list(_bits(self.rows[p]))

    def image(self, subset: int) -> int:
        """Image of a set of states given as a bitmask."""
        accumulated = 0
        for p in _bits(subset):
            accumulated |= self.rows[p]
        return accumulated

    def pairs(self) -> Iterator[tuple[int, int]]:
        for p, row in enumerate(self.rows):
            for q in _bits(row):
                yield p, q

    def transpose(self) -> "BooleanRelation":
        return BooleanRelation.from_pairs(self.size, [(q, p) for p, q in self.pairs()])

    @property
    def is_zero(self) -> bool:
        return not any(self.rows)

    @property
    def is_idempotent(self) -> bool:
        return self @ self == self

    @property
    def fixed_points(self) -> tuple[int, ...]:
        return tuple(p for p in range(self.size) if self.rows[p] >> p & 1)

    def to_matrix(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(row >> q & 1 for q in range(self.size)) for row in self.rows)

    def __str__(self) -> str:
        return "/".join("".join(str(value) for value in row) for row in self.to_matrix())


class TransitionMonoid:
    """
    A finite monoid of relations given by named generators, enumerated
    breadth first.

    Element `0` is the identity. Elements are numbered in the order of
    discovery, which is the length-then-alphabet order of their shortest
    witness words over the generator names. `right_cayley[i][g]` is the index
    of `elements[i] @ generators[g]`.
    """

    def __init__(self,
                 size: int,
                 generator_names: tuple[str, ...],
                 generators: tuple[BooleanRelation, ...],
                 elements: tuple[BooleanRelation, ...],
                 witnesses: tuple[Word, ...],
                 right_cayley: tuple[tuple[int, ...], ...],
                 identity_return_witness: Word | None) -> None:
        self.size = size
        self.generator_names = generator_names
        self.generators = generators
        self.elements = elements
        self.witnesses = witnesses
        self.right_cayley = right_cayley
        self.identity_return_witness = identity_return_witness
        self._index = {element: index for index, element in enumerate(elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[BooleanRelation]:
        return iter(self.elements)

    def __contains__(self, relation: object) -> bool:
        return relation in self._index

    def index_of(self, relation: BooleanRelation) -> int:
        """
        Raises:
            KeyError: If the relation is not an element of the monoid.
        """
        return self._index[relation]

    def witness(self, index: int) -> Word:
        """The shortest (then alphabetically least) word evaluating to the element."""
        return self.witnesses[index]

    def nonempty_witness(self, index: int) -> Word | None:
        """
        The shortest nonempty word evaluating to the element, None when the
        element is the identity and no nonempty word evaluates to it.
        """
        if index == 0:
            return self.identity_return_witness
        return self.witnesses[index]

    def multiply(self, first: int, second: int) -> int:
        return self._index[self.elements[first] @ self.elements[second]]

    def evaluate(self, word: Word) -> int:
        """Index of the element a word over the generator names evaluates to."""
        index = 0
        for name in word:
            index = self.right_cayley[index][self.generator_names.index(name)]
        return index

    @cached_property
    def left_cayley(self) -> tuple[tuple[int, ...], ...]:
        """`left_cayley[i][g]` is the index of `generators[g] @ elements[i]`."""
        return tuple(tuple(self._index[generator @ element] for generator in self.generators)
                     for element in self.elements)

    def idempotents(self) -> list[int]:
        return [index for index, element in enumerate(self.elements) if element.is_idempotent]

    @property
    def zero_index(self) -> int | None:
        return self._index.get(BooleanRelation.zero(self.size))

    def render_word(self, word: Word) -> str:
        if len(word) == 0:
            return "1"
        separator = "" if all(len(name) == 1 for name in self.generator_names) else " "
        return separator.join(word)


def monoid_from_generators(generators: Mapping[str, BooleanRelation],
                           size: int | None = None,
                           budgets: ResourceBudgets | None = None) -> TransitionMonoid:
    """
    Enumerates the monoid generated by named relations.

    The enumeration is a breadth first search from the identity in which the
    generators are tried in the order of the mapping, so that the first word
    reaching an element is its length-then-alphabet least witness.

    Args:
        generators: The generators by name.
        size: The size of the underlying set, required only when there is no
            generator.
        budgets: Resource budgets, defaults to the packaged budgets.

    Returns:
        TransitionMonoid: The enumerated monoid.

    Raises:
        ValueError: If the generators have different sizes.
        ResourceBudgetError: If the monoid has more than `max_monoid_elements`
            elements.
    """
    budgets = budgets or default_budgets()
    names = tuple(generators)
    relations = tuple(generators[name] for name in names)
    sizes = {relation.size for relation in relations}
    if size is not None:
        sizes.add(size)
    if len(sizes) != 1:
        raise ValueError(f"Generators must all be relations on the same set, sizes found: {sorted(sizes)}")
    (resolved_size,) = sizes

    identity = BooleanRelation.identity(resolved_size)
    elements: list[BooleanRelation] = [identity]
    witnesses: list[Word] = [()]
    index: dict[BooleanRelation, int] = {identity: 0}
    right_cayley: list[tuple[int, ...]] = []
    identity_return_witness: Word | None = None

    position = 0
    while position < len(elements):
        current = elements[position]
        products = []
        for name, relation in zip(names, relations):
            product = current @ relation
            product_index = index.get(product)
            if product_index is None:
                product_index = len(elements)
                if product_index >= budgets.max_monoid_elements:
                    raise ResourceBudgetError(f"Monoid exceeds max_monoid_elements="
                                              f"{budgets.max_monoid_elements}")
                index[product] = product_index
                elements.append(product)
                witnesses.append(witnesses[position] + (name,))
            elif product_index == 0 and identity_return_witness is None:
                identity_return_witness = witnesses[position] + (name,)
            products.append(product_index)
        right_cayley.append(tuple(products))
        position += 1

    logger.info(f"Enumerated a monoid of {len(elements)} relations on {resolved_size} points "
                f"from {len(names)} generators")
    return TransitionMonoid(resolved_size, names, relations, tuple(elements), tuple(witnesses),
                            tuple(right_cayley), identity_return_witness)


def full_relation_monoid(size: int, budgets: ResourceBudgets | None = None) -> TransitionMonoid:
    """
    The monoid of all relations on `size` points, every relation being a
    generator (named `r<k>` where `k` is the integer whose bits are the
    matrix read row by row).

    Raises:
        ResourceBudgetError: If `size` exceeds `max_full_monoid_points`.
    """
    budgets = budgets or default_budgets()
    if size > budgets.max_full_monoid_points:
        raise ResourceBudgetError(f"The monoid of all relations is only built on at most "
                                  f"max_full_monoid_points={budgets.max_full_monoid_points} points, got {size}")
    row_limit = 1 << size
    generators = {}
    for code in range(1 << (size * size)):
        rows = tuple((code >> (size * p)) & (row_limit - 1) for p in range(size))
        generators[f"r{code}"] = BooleanRelation(size, rows)
    return monoid_from_generators(generators, size=size, budgets=budgets)


class GreenClasses(BaseModel):
    """
    Green's relations of a finite monoid, as partitions of element indices.
    Classes are listed in the order of their least element; `*_of[i]` is the
    position of the class of element `i`.
    """

    model_config = _RECORD_CONFIG

    r_classes: tuple[tuple[int, ...], ...]
    l_classes: tuple[tuple[int, ...], ...]
    h_classes: tuple[tuple[int, ...], ...]
    d_classes: tuple[tuple[int, ...], ...]
    r_of: tuple[int, ...]
    l_of: tuple[int, ...]
    h_of: tuple[int, ...]
    d_of: tuple[int, ...]
    regular: tuple[bool, ...]

    def d_class(self, index: int) -> tuple[int, ...]:
        return self.d_classes[self.d_of[index]]

    def h_class(self, index: int) -> tuple[int, ...]:
        return self.h_classes[self.h_of[index]]


def _partition(classes: Iterable[set[int]], count: int) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]:
    ordered = sorted((tuple(sorted(members)) for members in classes), key=lambda members: members[0])
    owner = [0] * count
    for position, members in enumerate(ordered):
        for member in members:
            owner[member] = position
    return tuple(ordered), tuple(owner)


def green_relations(monoid: TransitionMonoid) -> GreenClasses:
    """
    Computes the R, L, H and D classes of a monoid.

    R-classes are the strongly connected components of the right Cayley graph
    and L-classes those of the left Cayley graph. H = R ∩ L and D is the
    join of R and L, i.e. the connected components of the graph linking
    elements in the same R-class or the same L-class.
    """
    count = len(monoid)
    right_graph = nx.DiGraph()
    right_graph.add_nodes_from(range(count))
    right_graph.add_edges_from((i, j) for i, row in enumerate(monoid.right_cayley) for j in row)
    left_graph = nx.DiGraph()
    left_graph.add_nodes_from(range(count))
    left_graph.add_edges_from((i, j) for i, row in enumerate(monoid.left_cayley) for j in row)

    r_classes, r_of = _partition(list(nx.strongly_connected_components(right_graph)), count)
    l_classes, l_of = _partition(list(nx.strongly_connected_components(left_graph)), count)

    h_groups: dict[tuple[int, int], set[int]] = {}
    for element in range(count):
        h_groups.setdefault((r_of[element], l_of[element]), set()).add(element)
    h_classes, h_of = _partition(list(h_groups.values()), count)

    join_graph = nx.Graph()
    join_graph.add_nodes_from(range(count))
    for members in itertools.chain(r_classes, l_classes):
        join_graph.add_edges_from(zip(members, members[1:]))
    d_classes, d_of = _partition(list(nx.connected_components(join_graph)), count)

    idempotents = set(monoid.idempotents())
    regular = tuple(any(member in idempotents for member in members) for members in d_classes)
    logger.debug(f"Green classes: {len(r_classes)} R, {len(l_classes)} L, {len(h_classes)} H, "
                 f"{len(d_classes)} D")
    return GreenClasses(r_classes=r_classes, l_classes=l_classes, h_classes=h_classes, d_classes=d_classes,
                        r_of=r_of, l_of=l_of, h_of=h_of, d_of=d_of, regular=regular)


class IdempotentStructure(BaseModel):
    """
    The fixed points of an idempotent e, the strongly connected components Γ
    of e restricted to them and the column-row decomposition e = ℓr.

    Attributes:
        idempotent: The idempotent e.
        fixed_points: The states s with s → s in e.
        components: Γ, each component sorted, in the order of its least state.
        left: ℓ ⊂ Q × Γ, row p is the bitmask of the components σ with p → s
            for some s ∈ σ.
        right: r ⊂ Γ × Q, row σ is the bitmask of the states q with s → q for
            some s ∈ σ.
    """

    model_config = _RECORD_CONFIG

    idempotent: BooleanRelation
    fixed_points: tuple[int, ...]
    components: tuple[tuple[int, ...], ...]
    left: tuple[int, ...]
    right: tuple[int, ...]

    @property
    def rank(self) -> int:
        """|Γ|."""
        return len(self.components)

    def component_of(self, state: int) -> int | None:
        for position, component in enumerate(self.components):
            if state in component:
                return position
        return None

    def product(self) -> BooleanRelation:
        """The relation ℓr."""
        rows = []
        for left_row in self.left:
            accumulated = 0
            for component in _bits(left_row):
                accumulated |= self.right[component]
            rows.append(accumulated)
        return BooleanRelation(self.idempotent.size, tuple(rows))


def idempotent_structure(idempotent: BooleanRelation) -> IdempotentStructure:
    """
    Computes the fixed points, the set Γ of strongly connected components of
    their restriction and the column-row decomposition of an idempotent.

    Raises:
        HypothesisError: If the relation is not idempotent.
        InvariantViolation: If ℓr differs from e.
    """
    if not idempotent.is_idempotent:
        raise HypothesisError(f"Relation {idempotent} is not idempotent")
    fixed_points = idempotent.fixed_points
    graph = nx.DiGraph()
    graph.add_nodes_from(fixed_points)
    graph.add_edges_from((p, q) for p in fixed_points for q in fixed_points if idempotent[p, q])
    components = tuple(sorted((tuple(sorted(component)) for component in nx.strongly_connected_components(graph)),
                              key=lambda component: component[0]))
    left = tuple(sum(1 << position for position, component in enumerate(components)
                     if idempotent[p, component[0]])
                 for p in range(idempotent.size))
    right = tuple(idempotent.rows[component[0]] for component in components)
    structure = IdempotentStructure(idempotent=idempotent, fixed_points=fixed_points, components=components,
                                    left=left, right=right)
    if structure.product() != idempotent:
        raise InvariantViolation(f"Column-row decomposition of {idempotent} does not multiply back to it")
    return structure


def idempotent_power(relation: BooleanRelation) -> tuple[int, BooleanRelation]:
    """
    Returns the least k ≥ 1 such that m^k is idempotent, together with m^k.
    """
    power = relation
    exponent = 1
    seen = {power}
    while not power.is_idempotent:
        power = power @ relation
        exponent += 1
        # The powers cycle through an idempotent before repeating.
        if power in seen:
            raise InvariantViolation(f"No idempotent power found for {relation}")
        seen.add(power)
    return exponent, power


class HClassGroup(BaseModel):
    """
    The H-class of an idempotent e as a group.

    Attributes:
        idempotent: Index of e.
        elements: Indices of the elements of H(e).
        products: Index of the product of each ordered pair of elements.
        inverses: Index of the group inverse of each element.
    """

    model_config = _RECORD_CONFIG

    idempotent: int
    elements: tuple[int, ...]
    products: dict[tuple[int, int], int]
    inverses: dict[int, int]

    @property
    def order(self) -> int:
        return len(self.elements)


def h_class_group(monoid: TransitionMonoid, idempotent: int, green: GreenClasses | None = None) -> HClassGroup:
    """
    Builds the group H(e) of an idempotent: its multiplication table and the
    inverse m⁻¹ = m^(k-1) where m^k = e.

    Raises:
        HypothesisError: If the element is not idempotent.
        InvariantViolation: If H(e) is not closed under product.
    """
    identity = monoid.elements[idempotent]
    if not identity.is_idempotent:
        raise HypothesisError(f"Element {idempotent} of the monoid is not idempotent")
    green = green or green_relations(monoid)
    members = green.h_class(idempotent)
    member_set = set(members)
    products = {}
    for first in members:
        for second in members:
            product = monoid.multiply(first, second)
            if product not in member_set:
                raise InvariantViolation(f"H-class of idempotent {idempotent} is not closed under product")
            products[(first, second)] = product

    inverses = {}
    for member in members:
        previous, power = idempotent, member
        for _ in range(len(members)):
            if power == idempotent:
                break
            previous, power = power, products[(power, member)]
        if power != idempotent:
            raise InvariantViolation(f"Element {member} has no power equal to the idempotent {idempotent}")
        inverses[member] = previous
    return HClassGroup(idempotent=idempotent, elements=members, products=products, inverses=inverses)


def stabilizer_index(monoid: TransitionMonoid, group: HClassGroup, state: int) -> int:
    """
    The index in H(e) of the stabilizer {m ∈ H(e) : state → state in m} of a
    fixed point of e. It equals |Γ(e)|, so r(M) for a minimal idempotent.

    Raises:
        HypothesisError: If `state` is not a fixed point of e.
        InvariantViolation: If the stabilizer order does not divide |H(e)|.
    """
    if not monoid.elements[group.idempotent][state, state]:
        raise HypothesisError(f"State {state} is not a fixed point of idempotent {group.idempotent}")
    stabilizer = [member for member in group.elements if monoid.elements[member][state, state]]
    if group.order % len(stabilizer):
        raise InvariantViolation(f"Stabilizer of state {state} has order {len(stabilizer)}, "
                                 f"not a divisor of {group.order}")
    return group.order // len(stabilizer)


class PermutationGroupRep(BaseModel):
    """
    A permutation group on a labelled finite domain.

    Attributes:
        domain: Labels of the points, point `k` of each permutation being
            `domain[k]`.
        permutations: The distinct elements of the group, sorted by array
            form.
        images: The permutation representing each monoid element, when the
            group is the image of an H-class.
    """

    model_config = _RECORD_CONFIG

    domain: tuple[str, ...]
    permutations: tuple[Permutation, ...]
    images: dict[int, Permutation] | None = None

    @property
    def degree(self) -> int:
        return len(self.domain)

    @property
    def order(self) -> int:
        return len(self.permutations)

    @cached_property
    def group(self) -> PermutationGroup:
        return PermutationGroup(list(self.permutations))

    @cached_property
    def generators(self) -> tuple[Permutation, ...]:
        """A small generating set, chosen greedily in array form order."""
        chosen: list[Permutation] = []
        generated = PermutationGroup([Permutation(list(range(self.degree)))])
        for permutation in self.permutations:
            if permutation.is_Identity or generated.contains(permutation):
                continue
            chosen.append(permutation)
            generated = PermutationGroup(chosen)
        return tuple(chosen)

    def element_set(self) -> frozenset[tuple[int, ...]]:
        return frozenset(tuple(permutation.array_form) for permutation in self.permutations)

    def is_transitive(self) -> bool:
        if self.degree <= 1:
            return True
        return bool(self.group.is_transitive())

    def cycle_types(self) -> list[tuple[int, ...]]:
        """The sorted multiset of cycle types, cycles of length 1 included."""
        return sorted(tuple(sorted(len(cycle) for cycle in permutation.full_cyclic_form))
                      for permutation in self.permutations)

    def cycle_notation(self, permutation: Permutation) -> str:
        cycles = [cycle for cycle in permutation.full_cyclic_form if len(cycle) > 1]
        if not cycles:
            return "()"
        return "".join("(" + " ".join(self.domain[point] for point in cycle) + ")" for cycle in cycles)

    def describe(self) -> str:
        """A short name: `1`, `C<n>` for cyclic groups, `S<n>` for full symmetric groups."""
        if self.order == 1:
            return "1"
        if self.group.is_cyclic:
            return f"C{self.order}"
        if self.order == factorial(self.degree):
            return f"S{self.degree}"
        return f"group of order {self.order}"


def component_label(component: Sequence[int], state_labels: Sequence[str] | None = None) -> str:
    names = [state_labels[state] if state_labels is not None else str(state) for state in component]
    return "{" + ",".join(names) + "}"


def gamma_representation(monoid: TransitionMonoid,
                         idempotent: int,
                         green: GreenClasses | None = None,
                         state_labels: Sequence[str] | None = None) -> PermutationGroupRep:
    """
    Computes the group G_e, the image of H(e) under γ_e where (σ, τ) ∈ γ_e(m)
    iff s → t in m and t → s in m⁻¹ for some s ∈ σ, t ∈ τ, m⁻¹ being
    the inverse of m in H(e).

    Args:
        monoid: The monoid.
        idempotent: Index of e.
        green: The Green classes of the monoid, computed when not given.
        state_labels: Labels of the states, used to label Γ.

    Returns:
        PermutationGroupRep: G_e acting on Γ.

    Raises:
        HypothesisError: If the element is not idempotent.
        InvariantViolation: If some γ_e(m) is not a permutation, γ_e is not a
            morphism or not injective.
    """
    green = green or green_relations(monoid)
    structure = idempotent_structure(monoid.elements[idempotent])
    group = h_class_group(monoid, idempotent, green)
    components = structure.components

    images: dict[int, Permutation] = {}
    for member in group.elements:
        relation = monoid.elements[member]
        inverse = monoid.elements[group.inverses[member]]
        array_form = []
        for source in components:
            targets = [position for position, target in enumerate(components)
                       if any(relation[s, t] and inverse[t, s] for s in source for t in target)]
            if len(targets) != 1:
                raise InvariantViolation(f"γ_e of element {member} is not a permutation of Γ")
            array_form.append(targets[0])
        images[member] = Permutation(array_form)

    for (first, second), product in group.products.items():
        # Permutation products apply the left factor first, as relations do.
        if images[first] * images[second] != images[product]:
            raise InvariantViolation(f"γ_e is not a morphism on elements {first}, {second}")
    distinct = {tuple(permutation.array_form): permutation for permutation in images.values()}
    if len(distinct) != group.order:
        raise InvariantViolation("γ_e is not injective on H(e)")

    domain = tuple(component_label(component, state_labels) for component in components)
    permutations = tuple(distinct[key] for key in sorted(distinct))
    return PermutationGroupRep(domain=domain, permutations=permutations, images=images)


class MinimalRank(BaseModel):
    """
    Attributes:
        rank: The minimal rank r(M).
        idempotent: Index of the chosen idempotent of rank r(M), the first in
            enumeration order.
        structure: Its fixed points, Γ and column-row decomposition.
    """

    model_config = _RECORD_CONFIG

    rank: int
    idempotent: int
    structure: IdempotentStructure


def minimal_rank(monoid: TransitionMonoid,
                 candidates: Sequence[int] | None = None,
                 budgets: ResourceBudgets | None = None,
                 cross_check: bool = True) -> MinimalRank:
    """
    Returns the minimum of |Γ(e)| over the nonzero idempotents e of the monoid
    (or of `candidates`), which is the minimal rank r(M) for a transitive
    monoid.

    When the dimension is at most `max_rank_dimension` the boolean rank of
    the chosen idempotent is computed exactly and compared.

    Raises:
        HypothesisError: If there is no nonzero idempotent.
        InvariantViolation: If the exact boolean rank disagrees.
    """
    budgets = budgets or default_budgets()
    indices = monoid.idempotents() if candidates is None else [index for index in candidates
                                                               if monoid.elements[index].is_idempotent]
    best: MinimalRank | None = None
    for index in indices:
        relation = monoid.elements[index]
        if relation.is_zero:
            continue
        structure = idempotent_structure(relation)
        if best is None or structure.rank < best.rank:
            best = MinimalRank(rank=structure.rank, idempotent=index, structure=structure)
    if best is None:
        raise HypothesisError("The monoid has no nonzero idempotent")

    if cross_check and monoid.size <= budgets.max_rank_dimension:
        exact = boolean_rank(monoid.elements[best.idempotent], budgets)
        if exact != best.rank:
            raise InvariantViolation(f"Boolean rank {exact} of the minimal idempotent differs from |Γ| = {best.rank}")
    logger.info(f"Minimal rank {best.rank} reached by idempotent {monoid.render_word(monoid.witness(best.idempotent))}")
    return best


def is_transitive(monoid: TransitionMonoid) -> bool:
    """True if every pair (p, q) belongs to some element of the monoid."""
    union = BooleanRelation.zero(monoid.size)
    for element in monoid.elements:
        union = union | element
    return union == BooleanRelation.full(monoid.size)


def groups_equivalent(first: PermutationGroupRep,
                      second: PermutationGroupRep,
                      budgets: ResourceBudgets | None = None) -> bool:
    """
    Decides whether two permutation groups are equivalent, i.e. conjugate by
    a bijection between their domains.

    Order, degree and cycle types are compared first. Otherwise every
    bijection is tried, which is refused above `max_equivalence_domain`
    points.

    Raises:
        ResourceBudgetError: If the invariants agree and the domain is too
            large for the exhaustive search.
    """
    budgets = budgets or default_budgets()
    if first.degree != second.degree or first.order != second.order:
        return False
    if first.cycle_types() != second.cycle_types():
        return False
    if first.degree > budgets.max_equivalence_domain:
        raise ResourceBudgetError(f"Group equivalence is only decided on at most "
                                  f"max_equivalence_domain={budgets.max_equivalence_domain} points, got {first.degree}")
    target = second.element_set()
    first_elements = list(first.element_set())
    for bijection in itertools.permutations(range(first.degree)):
        conjugated = set()
        for array_form in first_elements:
            image = [0] * first.degree
            for point, value in enumerate(array_form):
                image[bijection[point]] = bijection[value]
            conjugated.add(tuple(image))
        if conjugated == target:
            return True
    return False


def boolean_rank(relation: BooleanRelation, budgets: ResourceBudgets | None = None) -> int:
    """
    The exact boolean rank of a relation: the least number of all-ones
    rectangles covering its ones.

    Maximal rectangles are enumerated from the intersections of rows, then a
    minimum cover is found by branch and bound.

    Raises:
        ResourceBudgetError: If the dimension exceeds `max_rank_dimension`.
    """
    budgets = budgets or default_budgets()
    size = relation.size
    if size > budgets.max_rank_dimension:
        raise ResourceBudgetError(f"Boolean rank is only computed up to dimension "
                                  f"max_rank_dimension={budgets.max_rank_dimension}, got {size}")
    rows = relation.rows
    if not any(rows):
        return 0

    intents: set[int] = set()
    pending = deque(row for row in set(rows) if row)
    while pending:
        intent = pending.popleft()
        if intent in intents:
            continue
        intents.add(intent)
        for row in rows:
            meet = intent & row
            if meet and meet not in intents:
                pending.append(meet)

    covers: set[int] = set()
    for intent in intents:
        extent = [p for p in range(size) if rows[p] & intent == intent]
        covers.add(sum(intent << (p * size) for p in extent))
    cover_list = sorted(covers, key=lambda cover: -bin(cover).count("1"))
    target = sum(row << (p * size) for p, row in enumerate(rows))
    covering = {cell: [cover for cover in cover_list if cover >> cell & 1] for cell in _bits(target)}

    best = len({row for row in rows if row})

    def _search(covered: int, used: int) -> None:
        nonlocal best
        if covered == target:
            best = min(best, used)
            return
        if used + 1 >= best:
            return
        uncovered = target & ~covered
        cell = min(_bits(uncovered), key=lambda candidate: len(covering[candidate]))
        for cover in covering[cell]:
            _search(covered | cover, used + 1)

    _search(0, 0)
    return best


def enumerate_monoid(automaton: "MultiplicityAutomaton", budgets: ResourceBudgets | None = None) -> TransitionMonoid:
    """
    Enumerates the transition monoid φ_𝒜(A*) of an automaton, generated by
    the relations φ_𝒜(a) of its letters in alphabet order.

    Raises:
        ResourceBudgetError: If the monoid has more than `max_monoid_elements`
            elements.
    """
    return monoid_from_generators(automaton.letter_relations, size=len(automaton.states), budgets=budgets)
