"""Shared fixtures: cached rules and bases, eigenfunctions, a random corpus."""

from __future__ import annotations

import pytest

from sharpsphere import NodalFn, basis_for, polynomial_corpus, quadrature_rule, reset_config

ENV_KEYS = [
    "SHARPSPHERE_NODES",
    "SHARPSPHERE_KMAX",
    "SHARPSPHERE_SAMPLES",
    "SHARPSPHERE_SEED",
    "SHARPSPHERE_STARTS",
    "SHARPSPHERE_MAX_ITERATIONS",
    "SHARPSPHERE_WORKERS",
    "SHARPSPHERE_FORMAT",
    "SHARPSPHERE_LOG_LEVEL",
]


@pytest.fixture(autouse=True)
def clean_config(monkeypatch):
    """Every test starts from default configuration."""
    for key in ENV_KEYS:
        monkeypatch.delenv(key, raising=False)
    reset_config()
    yield
    reset_config()


@pytest.fixture
def rule3():
    return quadrature_rule(3.0, 64)


@pytest.fixture
def basis3(rule3):
    return basis_for(rule3, 20)


def eigenfunction(basis, k: int, eps: float = 1.0, shift: float = 0.0) -> NodalFn:
    """shift + eps * c_k at the nodes of ``basis``."""
    return NodalFn(basis.rule, shift + eps * basis.values[:, k])


def linear(rule, eps: float = 1.0, shift: float = 1.0) -> NodalFn:
    """shift + eps * x."""
    return NodalFn.from_callable(rule, lambda x: shift + eps * x)


@pytest.fixture
def corpus3(basis3):
    return polynomial_corpus(basis3, 100, seed=7)
