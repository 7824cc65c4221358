"""Deliberately broken reduction rules, used to check that the fuzz suites have teeth."""
from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar

MUTATIONS = {
    "prot-no-stamp": "prot-val returns the body value without stamping it",
    "if-no-prot": "if-true/if-false drop the prot wrapper around the branch",
    "ifstar-low": "if* protects its branch at low regardless of the condition",
    "nsu-skip": "ref? and assign? skip the pc projection",
    "cast-drop": "casts on values are discarded instead of checked",
    "up-blames": "the low!;high? collapse yields blame instead of up",
}

_active: ContextVar[frozenset] = ContextVar("mutations", default=frozenset())


def active(name: str) -> bool:
  return name in _active.get()


def any_active() -> bool:
  return bool(_active.get())


@contextmanager
def mutated(*names: str):
  for n in names:
    if n not in MUTATIONS:
      raise KeyError(n)
  token = _active.set(_active.get() | frozenset(names))
  try:
    yield
  finally:
    _active.reset(token)
