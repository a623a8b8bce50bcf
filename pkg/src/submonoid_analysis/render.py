"""
Text, JSON and DOT renderings of automata, transducers, matrices and
eggbox diagrams of D-classes.
"""
import json
from typing import Any, Sequence

from pydantic import BaseModel

from submonoid_analysis.automata import MultiplicityAutomaton
from submonoid_analysis.relmonoid import BooleanRelation, GreenClasses, TransitionMonoid
from submonoid_analysis.transducers import LiteralTransducer
from submonoid_analysis.words import EMPTY_WORD_TEXT, Alphabet


def _quote(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def automaton_to_dict(automaton: MultiplicityAutomaton) -> dict[str, Any]:
    """The JSON form `{alphabet, states, initial, terminal, edges: [[p, a, q], ...]}`."""
    return {
        "alphabet": list(automaton.alphabet.symbols),
        "states": list(automaton.states),
        "initial": automaton.initial,
        "terminal": automaton.terminal,
        "edges": [list(edge) for edge in automaton.edges],
    }


def automaton_to_text(automaton: MultiplicityAutomaton) -> str:
    lines = [
        f"states: {' '.join(automaton.states)}",
        f"initial: {automaton.initial}",
        f"terminal: {automaton.terminal}",
        f"edges: {len(automaton.edges)}",
    ]
    lines.extend(f"  {source} -{letter}-> {target}" for source, letter, target in automaton.edges)
    return "\n".join(lines)


def automaton_to_dot(automaton: MultiplicityAutomaton, name: str = "automaton") -> str:
    """
    A DOT digraph, nodes and edges in canonical order, the terminal state
    doubly circled and an arrow from an invisible point into the initial
    state.
    """
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  __start [shape=point];"]
    for state in automaton.states:
        shape = "doublecircle" if state == automaton.terminal else "circle"
        lines.append(f"  {_quote(state)} [shape={shape}];")
    lines.append(f"  __start -> {_quote(automaton.initial)};")
    for source, letter, target in automaton.edges:
        lines.append(f"  {_quote(source)} -> {_quote(target)} [label={_quote(letter)}];")
    lines.append("}")
    return "\n".join(lines)


def _output_text(output: str | None) -> str:
    return EMPTY_WORD_TEXT if output is None else output


def transducer_to_dict(transducer: LiteralTransducer) -> dict[str, Any]:
    """The JSON form `{states, initial, terminal, edges: [[p, a, out, q], ...]}`, `out` being `1` when empty."""
    return {
        "input_alphabet": list(transducer.input_alphabet.symbols),
        "output_alphabet": list(transducer.output_alphabet.symbols),
        "states": list(transducer.states),
        "initial": transducer.initial,
        "terminal": transducer.terminal,
        "edges": [[source, letter, _output_text(output), target]
                  for source, letter, output, target in transducer.edges],
    }


def transducer_to_dot(transducer: LiteralTransducer, name: str = "transducer") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  __start [shape=point];"]
    for state in transducer.states:
        shape = "doublecircle" if state == transducer.terminal else "circle"
        lines.append(f"  {_quote(state)} [shape={shape}];")
    lines.append(f"  __start -> {_quote(transducer.initial)};")
    for source, letter, output, target in transducer.edges:
        lines.append(f"  {_quote(source)} -> {_quote(target)} [label={_quote(f'{letter}|{_output_text(output)}')}];")
    lines.append("}")
    return "\n".join(lines)


def matrix_to_text(states: Sequence[str], matrix: Sequence[Sequence[object]]) -> str:
    """Row-major table with the state labels as row and column headers."""
    cells = [[""] + list(states)] + [[state] + [str(value) for value in row] for state, row in zip(states, matrix)]
    widths = [max(len(row[column]) for row in cells) for column in range(len(cells[0]))]
    return "\n".join("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in cells)


def relation_to_text(states: Sequence[str], relation: BooleanRelation) -> str:
    return matrix_to_text(states, relation.to_matrix())


class EggboxCell(BaseModel):
    """
    One H-class of an eggbox.

    Attributes:
        size: Number of elements of the H-class.
        is_group: True if it contains an idempotent, drawn with a `*`.
        witness: The shortest nonempty witness word of its least element.
    """

    size: int
    is_group: bool
    witness: str


class Eggbox(BaseModel):
    """
    A D-class drawn as a grid: one row per R-class, one column per L-class.

    Attributes:
        size: Number of elements of the D-class.
        regular: Whether the D-class contains an idempotent.
        row_supports: For each R-class, the states with a nonempty row.
        column_supports: For each L-class, the states with a nonempty column.
        cells: The H-classes, row by row.
    """

    size: int
    regular: bool
    row_supports: list[list[str]]
    column_supports: list[list[str]]
    cells: list[list[EggboxCell]]

    @property
    def group_count(self) -> int:
        return sum(cell.is_group for row in self.cells for cell in row)


def eggbox(monoid: TransitionMonoid,
           green: GreenClasses,
           d_index: int,
           state_labels: Sequence[str],
           alphabet: Alphabet | None = None) -> Eggbox:
    """
    Lays out the D-class `green.d_classes[d_index]` as an eggbox.

    Args:
        monoid: The monoid.
        green: Its Green classes.
        d_index: The position of the D-class.
        state_labels: The labels of the states, for the supports.
        alphabet: Used to render and order witness words, defaults to the
            generator names of the monoid.
    """
    members = green.d_classes[d_index]
    r_indices = sorted({green.r_of[member] for member in members})
    l_indices = sorted({green.l_of[member] for member in members})
    alphabet = alphabet or Alphabet(symbols=monoid.generator_names)
    idempotents = set(monoid.idempotents())

    def _render(index: int) -> tuple[tuple[int, tuple[int, ...]], str]:
        witness = monoid.nonempty_witness(index)
        if witness is None:
            witness = monoid.witness(index)
        return alphabet.sort_key(witness), alphabet.render(witness)

    def _support(mask: int) -> list[str]:
        return [state_labels[state] for state in range(monoid.size) if mask >> state & 1]

    row_supports = []
    for r_index in r_indices:
        representative = monoid.elements[green.r_classes[r_index][0]]
        row_supports.append(_support(sum(1 << p for p, row in enumerate(representative.rows) if row)))
    column_supports = []
    for l_index in l_indices:
        representative = monoid.elements[green.l_classes[l_index][0]]
        column_supports.append(_support(representative.image((1 << monoid.size) - 1)))

    member_set = set(members)
    cells = []
    for r_index in r_indices:
        row_cells = []
        r_members = set(green.r_classes[r_index]) & member_set
        for l_index in l_indices:
            h_members = sorted(r_members & set(green.l_classes[l_index]))
            if not h_members:
                row_cells.append(EggboxCell(size=0, is_group=False, witness=""))
                continue
            _, witness = min(_render(member) for member in h_members)
            row_cells.append(EggboxCell(size=len(h_members),
                                        is_group=any(member in idempotents for member in h_members),
                                        witness=witness))
        cells.append(row_cells)
    return Eggbox(size=len(members),
                  regular=green.regular[d_index],
                  row_supports=row_supports,
                  column_supports=column_supports,
                  cells=cells)


def eggbox_to_text(box: Eggbox) -> str:
    """
    Renders an eggbox as a table. Each cell shows `*` for a group, the
    witness word and the size of the H-class when it exceeds one.
    """
    header = [""] + ["{" + ",".join(support) + "}" for support in box.column_supports]
    rows = [header]
    for support, row_cells in zip(box.row_supports, box.cells):
        rendered = []
        for cell in row_cells:
            text = ("*" if cell.is_group else "") + cell.witness
            if cell.size > 1:
                text += f" ({cell.size})"
            rendered.append(text)
        rows.append(["{" + ",".join(support) + "}"] + rendered)
    widths = [max(len(row[column]) for row in rows) for column in range(len(header))]
    lines = [f"D-class: {box.size} elements, {len(box.row_supports)} x {len(box.column_supports)} H-classes, "
             f"{box.group_count} groups"]
    lines.extend(" | ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in rows)
    return "\n".join(lines)


def to_json(payload: Any) -> str:
    """Pretty JSON of a pydantic model or a plain structure."""
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    return json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=False)
