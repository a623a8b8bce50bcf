from pathlib import Path

import pytest

from submonoid_analysis.config import (
    MAX_ELEMENTS_ENV_VAR,
    ResourceBudgets,
    default_budgets,
    load_resource_budgets,
)
from tests.utils_test import get_test_data_directory  # noqa: F401


@pytest.fixture
def get_test_config_directory(get_test_data_directory: Path) -> Path:  # noqa: F811
    return get_test_data_directory / "config"


@pytest.fixture(autouse=True)
def clear_env(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(MAX_ELEMENTS_ENV_VAR, raising=False)


def test_load_packaged_budgets() -> None:
    budgets = load_resource_budgets()
    assert budgets == ResourceBudgets()
    assert budgets.max_monoid_elements == 1_000_000
    assert budgets.max_subsets == 2**18
    assert budgets.max_full_monoid_points == 3


def test_load_budgets_file(get_test_config_directory: Path) -> None:
    budgets = load_resource_budgets(get_test_config_directory / "small_budgets.yaml")
    assert budgets.max_monoid_elements == 50
    assert budgets.max_subsets == 8
    # Not given in the file
    assert budgets.max_rank_dimension == 12

    assert load_resource_budgets(get_test_config_directory / "empty_budgets.yaml") == ResourceBudgets()


def test_load_budgets_errors(get_test_config_directory: Path) -> None:
    with pytest.raises(FileNotFoundError):
        load_resource_budgets(get_test_config_directory / "missing.yaml")
    with pytest.raises(ValueError, match="not a file"):
        load_resource_budgets(get_test_config_directory)
    with pytest.raises(ValueError, match="mapping"):
        load_resource_budgets(get_test_config_directory / "list_budgets.yaml")
    with pytest.raises(ValueError, match="Invalid resource budgets"):
        load_resource_budgets(get_test_config_directory / "negative_budgets.yaml")


def test_environment_override(monkeypatch: pytest.MonkeyPatch, get_test_config_directory: Path) -> None:
    monkeypatch.setenv(MAX_ELEMENTS_ENV_VAR, "123")
    assert load_resource_budgets().max_monoid_elements == 123
    assert load_resource_budgets(get_test_config_directory / "small_budgets.yaml").max_monoid_elements == 123

    monkeypatch.setenv(MAX_ELEMENTS_ENV_VAR, "many")
    with pytest.raises(ValueError, match=MAX_ELEMENTS_ENV_VAR):
        load_resource_budgets()

    monkeypatch.setenv(MAX_ELEMENTS_ENV_VAR, "0")
    with pytest.raises(ValueError):
        load_resource_budgets()


def test_budgets_are_frozen() -> None:
    budgets = ResourceBudgets()
    with pytest.raises(ValueError):
        budgets.max_subsets = 1  # type: ignore[misc]
    assert default_budgets() is default_budgets()


def test_default_budgets_follow_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    assert default_budgets().max_monoid_elements == 1_000_000
    monkeypatch.setenv(MAX_ELEMENTS_ENV_VAR, "77")
    assert default_budgets().max_monoid_elements == 77
    monkeypatch.delenv(MAX_ELEMENTS_ENV_VAR)
    assert default_budgets().max_monoid_elements == 1_000_000
