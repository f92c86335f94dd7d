import pytest

from logicaltensor.config import (DEFAULT_SEED, SEED_ENV_VAR, default_seed,
                                  format_number)
from logicaltensor.errors import LogicalTensorError, SpecFileError


@pytest.mark.parametrize("environ, expected", [
    ({}, DEFAULT_SEED),
    ({SEED_ENV_VAR: ""}, DEFAULT_SEED),
    ({SEED_ENV_VAR: "7"}, 7),
    ({SEED_ENV_VAR: " 42 "}, 42),
])
def test_default_seed(environ, expected):
    assert default_seed(environ) == expected


def test_default_seed_rejects_garbage():
    with pytest.raises(SpecFileError, match=SEED_ENV_VAR):
        default_seed({SEED_ENV_VAR: "seven"})


def test_default_seed_reads_process_environment(monkeypatch):
    monkeypatch.setenv(SEED_ENV_VAR, "123")
    assert default_seed() == 123


@pytest.mark.parametrize("x, text", [
    (0.0, "0"),
    (1.0, "1"),
    (0.70710678118654757, "0.707106781187"),
    (1e-13, "1e-13"),
])
def test_format_number(x, text):
    assert format_number(x) == text


def test_errors_are_value_errors():
    assert issubclass(SpecFileError, LogicalTensorError)
    assert issubclass(LogicalTensorError, ValueError)
