from importlib import resources

import pytest

from gifc.compiler import compile_term
from gifc.surface import default_context, parse


def program_text(name: str) -> str:
  return (resources.files("gifc") / "programs" / f"{name}.gifc").read_text(encoding="utf-8")


def compiled(name: str):
  return compile_term(parse(program_text(name)), default_context())


@pytest.fixture
def load():
  return compiled
