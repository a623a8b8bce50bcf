import logging
import os
from functools import lru_cache
from importlib.resources import files
from pathlib import Path

import yaml
from pydantic import BaseModel, Field, ValidationError

logger = logging.getLogger(__name__)

MAX_ELEMENTS_ENV_VAR = "SUBMONOID_MAX_ELEMENTS"


class ResourceBudgets(BaseModel):
    """
    Hard caps for the exhaustive constructions of the package.

    Attributes:
        max_monoid_elements: Maximum number of elements of an enumerated
            transition monoid.
        max_subsets: Maximum number of subsets visited by a subset
            construction (completeness, synchronization search).
        max_reduction_states: Maximum number of (state, subset) pairs visited
            when checking the lifting condition of a reduction.
        max_decode_outputs: Maximum number of output words (with multiplicity)
            a transducer may produce for one input.
        max_rank_dimension: Largest dimension for which the exact boolean rank
            is computed.
        max_equivalence_domain: Largest permutation domain for which group
            equivalence is decided by exhaustive search.
        max_full_monoid_points: Largest set on which the monoid of all
            relations is constructed.
    """

    model_config = {"frozen": True}

    max_monoid_elements: int = Field(1_000_000, gt=0)
    max_subsets: int = Field(2**18, gt=0)
    max_reduction_states: int = Field(2**20, gt=0)
    max_decode_outputs: int = Field(2**20, gt=0)
    max_rank_dimension: int = Field(12, gt=0)
    max_equivalence_domain: int = Field(8, gt=0)
    max_full_monoid_points: int = Field(3, gt=0)


def load_resource_budgets(budgets_file: Path | None = None) -> ResourceBudgets:
    """
    Returns the resource budgets read from a YAML file, with the
    `SUBMONOID_MAX_ELEMENTS` environment variable overriding
    `max_monoid_elements` when it is set.

    Args:
        budgets_file: The path to the YAML file that contains the budgets. If
            None then the file packaged at `submonoid_analysis/data/budgets.yaml`
            is used.

    Returns:
        ResourceBudgets: The validated budgets.

    Raises:
        FileNotFoundError: If the `budgets_file` is not found.
        ValueError: If the `budgets_file` is not a file, does not contain a
            mapping, contains invalid budgets or the environment variable is
            not a positive integer.
    """
    budgets_file_path: Path = Path()
    if budgets_file is None:
        budgets_file_path = Path(str(files("submonoid_analysis").joinpath("data/budgets.yaml")))
    else:
        budgets_file_path = budgets_file

    if budgets_file_path.exists() is False:
        raise FileNotFoundError(f"Resource budgets file not found at: {budgets_file_path}")
    elif budgets_file_path.is_file() is False:
        raise ValueError(f"Resource budgets file is not a file: {budgets_file_path}")

    with budgets_file_path.open("r", encoding="utf-8") as budgets_fp:
        raw_budgets = yaml.safe_load(budgets_fp.read())
    if raw_budgets is None:
        raw_budgets = {}
    if not isinstance(raw_budgets, dict):
        raise ValueError(f"Expected a mapping of budget names to integers in: {budgets_file_path}")

    env_value = os.environ.get(MAX_ELEMENTS_ENV_VAR)
    if env_value is not None:
        try:
            raw_budgets["max_monoid_elements"] = int(env_value)
        except ValueError as e:
            raise ValueError(f"{MAX_ELEMENTS_ENV_VAR} must be an integer, got: {env_value!r}") from e
        logger.info(f"Monoid element budget overridden by {MAX_ELEMENTS_ENV_VAR}: {env_value}")

    try:
        return ResourceBudgets(**raw_budgets)
    except ValidationError as e:
        raise ValueError(f"Invalid resource budgets in {budgets_file_path}: {raw_budgets}") from e


@lru_cache(maxsize=4)
def _packaged_budgets(env_value: str | None) -> ResourceBudgets:
    # env_value only keys the cache, load_resource_budgets reads the variable itself.
    return load_resource_budgets(None)


def default_budgets() -> ResourceBudgets:
    """
    Returns the packaged budgets. The file is read once for each value of
    `SUBMONOID_MAX_ELEMENTS`, so a change of the variable is honoured.
    """
    return _packaged_budgets(os.environ.get(MAX_ELEMENTS_ENV_VAR))
