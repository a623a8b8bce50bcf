"""
The `submonoid` command line.

Every command reads its inputs from files (see `docs/formats.md`), prints a
stable text report, or JSON with `--format json`, and exits with 0 on
success or with the code `errors.exit_code_for` gives for the error raised.
"""
import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Callable, Sequence, TextIO

from submonoid_analysis import __version__
from submonoid_analysis.analysis import (
    check_synchronizing_word,
    composition_degree_report,
    degree,
    find_synchronizing_word,
    minimal_idempotent_fixing,
)
from submonoid_analysis.automata import (
    behavior_count,
    check_reduction,
    flower_automaton,
    prefix_automaton,
)
from submonoid_analysis.config import ResourceBudgets, load_resource_budgets
from submonoid_analysis.corpus import InstanceResult, run_instance
from submonoid_analysis.errors import HypothesisError, InvariantViolation, SubmonoidError, exit_code_for
from submonoid_analysis.parsers import AutomatonParser, MorphismParser, ReductionMapParser, WordSetParser
from submonoid_analysis.relmonoid import enumerate_monoid, green_relations
from submonoid_analysis.render import (
    automaton_to_dict,
    automaton_to_dot,
    automaton_to_text,
    eggbox,
    eggbox_to_text,
    to_json,
)
from submonoid_analysis.words import (
    compose,
    factorization_count,
    is_code,
    is_complete,
    minimal_generating_set,
)

logger = logging.getLogger(__name__)

PARSE_ERROR_EXIT = 2


def _emit_automaton(args: argparse.Namespace, out: TextIO, build: Callable) -> None:
    word_set = WordSetParser.parse(args.word_set)
    automaton = build(word_set)
    if args.format == "dot":
        print(automaton_to_dot(automaton), file=out)
    elif args.format == "json":
        print(to_json(automaton_to_dict(automaton)), file=out)
    else:
        print(automaton_to_text(automaton), file=out)


def cmd_flower(args: argparse.Namespace, budgets: ResourceBudgets, out: TextIO) -> None:
    _emit_automaton(args, out, flower_automaton)


def cmd_prefix(args: argparse.Namespace, budgets: ResourceBudgets, out: TextIO) -> None:
    _emit_automaton(args, out, prefix_automaton)


def cmd_count(args: argparse.Namespace, budgets: ResourceBudgets, out: TextIO) -> None:
    """Prints the number of factorizations, checked against the flower automaton multiplicity."""
    word_set = WordSetParser.parse(args.word_set)
    word = word_set.alphabet.parse_word(args.word)
    count = factorization_count(word_set, word)
    multiplicity = behavior_count(flower_automaton(word_set), word)
    if count != multiplicity:
        raise InvariantViolation(f"Factorization count {count} differs from the flower automaton multiplicity "
                                 f"{multiplicity} on {word_set.alphabet.render(word)}")
    if args.format == "json":
        print(to_json({"word": word_set.alphabet.render(word), "count": count}), file=out)
    else:
        print(count, file=out)


def cmd_degree(args: argparse.Namespace, budgets: ResourceBudgets, out: TextIO) -> None:
    report = degree(WordSetParser.parse(args.word_set), budgets)
    if args.format == "json":
        print(to_json(report), file=out)
    elif report.group_order == 1:
        print(f"d={report.degree}", file=out)
    else:
        print(f"d={report.degree}, G ≅ {report.group_name}", file=out)


def cmd_group(args: argparse.Namespace, budgets: ResourceBudgets, out: TextIO) -> None:
    report = degree(WordSetParser.parse(args.word_set), budgets)
    if args.format == "json":
        print(to_json(report), file=out)
        return
    alphabet = report.generating_set.alphabet
    print(f"degree: {report.degree}", file=out)
    print(f"order: {report.group_order}", file=out)
    print(f"group: {report.group_name}", file=out)
    print(f"domain: {' '.join(report.group.domain)}", file=out)
    print(f"generators: {' '.join(report.group_generators) or 'none'}", file=out)
    print(f"idempotent: {alphabet.render(report.witness_idempotent_word)}", file=out)


def cmd_sync(args: argparse.Namespace, budgets: ResourceBudgets, out: TextIO) -> None:
    """Finds a synchronizing word, or checks the one given with `--word`."""
    word_set = WordSetParser.parse(args.word_set)
    alphabet = word_set.alphabet
    if args.word is not None:
        check = check_synchronizing_word(word_set, alphabet.parse_word(args.word), budgets)
        if args.format == "json":
            print(to_json(check), file=out)
        elif check.verdict == "refuted":
            print(f"refuted: u={alphabet.render(check.left or ())}, v={alphabet.render(check.right or ())}",
                  file=out)
        else:
            print(check.verdict, file=out)
        return
    word = find_synchronizing_word(word_set, budgets)
    rendered = alphabet.render(word) if word is not None else None
    if args.format == "json":
        print(to_json({"synchronizing_word": rendered}), file=out)
    else:
        print(rendered or "none", file=out)


def cmd_compose(args: argparse.Namespace, budgets: ResourceBudgets, out: TextIO) -> None:
    """
    Prints X and the trim information, then the degree report. Raises
    `HypothesisError` after printing X when Y is not complete.
    """
    beta = MorphismParser.parse(args.beta)
    y_set = WordSetParser.parse(args.y_set, alphabet=beta.source)
    composition = compose(y_set, beta)
    completeness = is_complete(y_set, budgets)
    if args.format != "json":
        print(f"X = {composition.composed.render()}", file=out)
        if composition.was_trim:
            print("trim: yes", file=out)
        else:
            removed = ", ".join(beta.source.render(word) for word in composition.removed)
            print(f"trim: no, Y' = {composition.trimmed_y.render()} (removed {removed})", file=out)
    if not completeness.is_complete:
        if args.format == "json":
            print(to_json(composition), file=out)
        witness = beta.source.render(completeness.witness or ())
        raise HypothesisError(f"Y is not complete ({witness} is not a factor of Y*), no degree report")

    report = composition_degree_report(y_set, beta, budgets)
    if args.format == "json":
        print(to_json(report), file=out)
        return
    mark = "✓" if report.product_law_holds else "✗"
    print(f"d(X)={report.d_x} = d(Y)·d(Z) = {report.d_y}·{report.d_z} {mark}", file=out)
    print(f"θ: {' | '.join(','.join(members) for members in report.theta)}", file=out)
    print(f"G_θ: order {report.g_theta_order}, ≅ G(Z): {'yes' if report.lower_group_matches else 'no'}", file=out)
    print(f"G^θ: order {report.g_upper_theta_order}, ≅ G(Y): {'yes' if report.upper_group_matches else 'no'}",
          file=out)


def cmd_monoid(args: argparse.Namespace, budgets: ResourceBudgets, out: TextIO) -> None:
    """Prints the eggbox of the minimal D-class, or of every regular D-class with `--all`."""
    generating_set = minimal_generating_set(WordSetParser.parse(args.word_set))
    automaton = flower_automaton(generating_set)
    monoid = enumerate_monoid(automaton, budgets)
    green = green_relations(monoid)
    if args.all:
        d_indices = [index for index, regular in enumerate(green.regular) if regular]
    else:
        minimal = minimal_idempotent_fixing(monoid, automaton.initial_index, budgets)
        d_indices = [green.d_of[minimal.idempotent]]
    boxes = [eggbox(monoid, green, index, automaton.states, generating_set.alphabet) for index in d_indices]
    if args.format == "json":
        print(to_json({"elements": len(monoid), "d_classes": [box.model_dump(mode="json") for box in boxes]}),
              file=out)
        return
    print(f"monoid: {len(monoid)} elements, {len(green.d_classes)} D-classes", file=out)
    for box in boxes:
        print(eggbox_to_text(box), file=out)


def cmd_check(args: argparse.Namespace, budgets: ResourceBudgets, out: TextIO) -> None:
    if args.kind == "reduction":
        if len(args.files) != 3:
            raise HypothesisError("check reduction takes a source automaton, a target automaton and a map file")
        source, target = (AutomatonParser.parse(path) for path in args.files[:2])
        reduction = ReductionMapParser.parse_reduction(args.files[2], source, target)
        result = check_reduction(reduction, budgets)
        if args.format == "json":
            print(to_json(result), file=out)
        elif result.verdict == "sharp_reduction":
            print("sharp reduction", file=out)
        elif result.verdict == "reduction":
            print("reduction (not sharp)", file=out)
        else:
            print(f"not a reduction: {target.alphabet.render(result.witness or ())} ({result.detail})", file=out)
        return

    if len(args.files) != 1:
        raise HypothesisError(f"check {args.kind} takes exactly one word set file")
    word_set = WordSetParser.parse(args.files[0])
    alphabet = word_set.alphabet
    if args.kind == "code":
        code = is_code(word_set)
        if args.format == "json":
            print(to_json(code), file=out)
        elif code.is_code:
            print("code", file=out)
        else:
            print(f"not a code: {alphabet.render(code.witness or ())}", file=out)
    else:
        completeness = is_complete(word_set, budgets)
        if args.format == "json":
            print(to_json(completeness), file=out)
        elif completeness.is_complete:
            print("complete", file=out)
        else:
            print(f"incomplete: {alphabet.render(completeness.witness or ())}", file=out)


def cmd_corpus(args: argparse.Namespace, budgets: ResourceBudgets, out: TextIO) -> None:
    """Runs the property harness on `--count` instances, in `--jobs` processes."""
    worker = partial(run_instance, args.seed, budgets=budgets)
    indices = range(args.count)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as executor:
            results: list[InstanceResult] = list(executor.map(worker, indices))
    else:
        results = [worker(index) for index in indices]
    failures = [result for result in results if not result.passed]
    if args.format == "json":
        print(to_json({"seed": args.seed,
                       "count": args.count,
                       "failures": len(failures),
                       "results": [result.model_dump(mode="json") for result in results]}), file=out)
    else:
        for result in failures:
            failed = [name for name, passed in result.checks.items() if not passed]
            print(f"FAIL #{result.index} {result.description}: {result.error or ', '.join(failed)}", file=out)
        print(f"{len(results) - len(failures)}/{len(results)} instances passed (seed {args.seed})", file=out)
    if failures:
        raise InvariantViolation(f"{len(failures)} corpus instances failed")


def _options(formats: Sequence[str]) -> argparse.ArgumentParser:
    options = argparse.ArgumentParser(add_help=False)
    options.add_argument("--format", choices=list(formats), default="text", help="Output format.")
    options.add_argument("-v", "--verbose", action="count", default=0,
                         help="Log at INFO level, DEBUG level when repeated.")
    options.add_argument("--budgets", type=Path, default=None,
                         help="YAML file of resource budgets, defaults to the packaged one.")
    return options


def build_parser() -> argparse.ArgumentParser:
    common = _options(["text", "json"])
    graph = _options(["text", "json", "dot"])

    parser = argparse.ArgumentParser(prog="submonoid",
                                     description="Degrees, groups and synchronization of finitely "
                                                 "generated submonoids of a free monoid.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name, handler, help_text in (("flower", cmd_flower, "Flower automaton of a word set."),
                                     ("prefix", cmd_prefix, "Prefix automaton of a word set.")):
        command = subparsers.add_parser(name, parents=[graph], help=help_text)
        command.add_argument("word_set", type=Path)
        command.set_defaults(handler=handler)

    count = subparsers.add_parser("count", parents=[common], help="Number of factorizations of a word.")
    count.add_argument("word_set", type=Path)
    count.add_argument("word", help="The word, `1` or an empty string for the empty word.")
    count.set_defaults(handler=cmd_count)

    for name, handler, help_text in (("degree", cmd_degree, "Degree d(X) and its group."),
                                     ("group", cmd_group, "The group G(X) in detail."),
                                     ("monoid", cmd_monoid, "Eggbox of the minimal D-class.")):
        command = subparsers.add_parser(name, parents=[common], help=help_text)
        command.add_argument("word_set", type=Path)
        if name == "monoid":
            command.add_argument("--all", action="store_true", help="Every regular D-class.")
        command.set_defaults(handler=handler)

    sync = subparsers.add_parser("sync", parents=[common], help="Shortest synchronizing word in X*.")
    sync.add_argument("word_set", type=Path)
    sync.add_argument("--word", default=None, help="Check this word instead of searching.")
    sync.set_defaults(handler=cmd_sync)

    compose_parser = subparsers.add_parser("compose", parents=[common], help="Composition X = Y ∘ Z.")
    compose_parser.add_argument("y_set", type=Path)
    compose_parser.add_argument("beta", type=Path)
    compose_parser.set_defaults(handler=cmd_compose)

    check = subparsers.add_parser("check", parents=[common], help="Code, completeness or reduction check.")
    check.add_argument("kind", choices=["code", "complete", "reduction"])
    check.add_argument("files", type=Path, nargs="+")
    check.set_defaults(handler=cmd_check)

    corpus = subparsers.add_parser("corpus", parents=[common], help="Property harness on random instances.")
    corpus.add_argument("--seed", type=int, default=0)
    corpus.add_argument("--count", type=int, default=20)
    corpus.add_argument("--jobs", type=int, default=1)
    corpus.set_defaults(handler=cmd_corpus)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    """
    Runs one command.

    Returns:
        int: The exit code, 0 on success, 2 on a parse error, 3 on an
            internal invariant failure, 4 when a hypothesis does not hold and
            5 when a resource budget is exceeded.
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    out = out or sys.stdout
    try:
        budgets = load_resource_budgets(args.budgets)
        args.handler(args, budgets, out)
    except SubmonoidError as e:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return exit_code_for(e)
    except (FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return PARSE_ERROR_EXIT
    return 0


if __name__ == "__main__":
    sys.exit(main())
