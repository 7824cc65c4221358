"""Acceptance criteria. Each prints one PASS/FAIL line; run directly or under pytest."""
import time

import pytest

from gifc.cc.machine import BlameResult, Config, Final, run
from gifc.cc.terms import Const, subst
from gifc.compiler import compile_term
from gifc.harness import exhaustive
from gifc.harness.fuzz import SANITY_MUTATIONS, SUITES
from gifc.harness.gen import GenConfig
from gifc.surface import SurfaceTypeError, default_context, parse
from gifc.surface.syntax import INPUT

try:
  from conftest import program_text
except ImportError:  # run as a script from the repository root
  from tests.conftest import program_text

SEED = 1
COUNT = 1000
SANITY_COUNT = 200

# expected outcome per program and input: a value prefix, "blame pN", or "type error"
GOLDEN = {
  "fconst_static": {"true": "false@low", "false": "false@low"},
  "fconst_star": {"true": "false@low", "false": "false@low"},
  "fid_static": "type error",
  "fid_star": {"true": "blame p2", "false": "blame p2"},
  "flip_static": "type error",
  "flip_star": {"true": "blame p1", "false": "blame p1"},
  "nsu_fail": {"true": "blame p4", "false": "blame p5"},
  "nsu_left": {"true": "unit@low", "false": "unit@low"},
  "nsu_right": {"true": "unit@low", "false": "unit@low"},
  "mix": {None: "blame p2"},
  "smix": {None: "blame p1"},
}


def report(label: str, ok: bool, detail: str) -> bool:
  print(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}", flush=True)
  return ok


def golden_outcome(name: str, value):
  from gifc.cc.machine import render_value
  try:
    out = compile_term(parse(program_text(name)), default_context())
  except SurfaceTypeError:
    return "type error"
  term = out.term if value is None else subst(out.term, INPUT, Const(value))
  match run(Config(term), expected=out.type):
    case Final(v):
      return render_value(v, out.type)
    case BlameResult(p):
      return f"blame {p}"
    case other:
      return type(other).__name__


def criterion_golden() -> bool:
  bad, slowest = [], 0.0
  for name, want in GOLDEN.items():
    start = time.perf_counter()
    if want == "type error":
      cases = [(None, want)]
    else:
      cases = list(want.items())
    for value, expected in cases:
      got = golden_outcome(name, value)
      if not got.startswith(expected):
        bad.append(f"{name}[{value}]={got}")
    took = time.perf_counter() - start
    slowest = max(slowest, took)
    if took >= 1.0:
      bad.append(f"{name} took {took:.2f}s")
  return report("1 golden programs", not bad,
                f"{len(GOLDEN)} programs, slowest {slowest * 1000:.0f} ms"
                + (f", mismatches {bad}" if bad else ""))


def criterion_exhaustive() -> bool:
  start = time.perf_counter()
  checks = exhaustive.run_all(4)
  took = time.perf_counter() - start
  summary = ", ".join(f"{c.name} {c.checked}/{len(c.counterexamples)}" for c in checks)
  ok = all(c.ok for c in checks) and took < 10
  return report("2 coercion metatheory", ok, f"{took:.1f}s; checked/counterexamples: {summary}")


def _fuzz(label: str, kind: str, limit: float) -> bool:
  rep = SUITES[kind](GenConfig(seed=SEED, count=COUNT))
  ran = sum(rep.outcomes.values())
  ok = not rep.violations and rep.elapsed < limit and ran >= 0.9 * COUNT
  counts = " ".join(f"{k}={n}" for k, n in rep.counts().items() if n)
  return report(label, ok, f"seed {SEED}, {ran} programs in {rep.elapsed:.0f}s, "
                f"violations {len(rep.violations)} {counts}".rstrip()
                + f"; outcomes {dict(sorted(rep.outcomes.items()))}")


def criterion_safety() -> bool:
  return _fuzz("3 type safety fuzz", "safety", 300)


def criterion_ni() -> bool:
  return _fuzz("4 noninterference fuzz", "ni", 600)


def criterion_gg() -> bool:
  return _fuzz("5 gradual guarantee fuzz", "gg", 600)


def criterion_sanity(kind: str) -> bool:
  mutation = SANITY_MUTATIONS[kind]
  rep = SUITES[kind](GenConfig(seed=SEED, count=SANITY_COUNT), mutate=mutation, shrink_budget=50)
  counts = " ".join(f"{k}={n}" for k, n in rep.counts().items() if n)
  return report(f"3-5 mutation sanity ({kind}, {mutation})", bool(rep.violations),
                f"{len(rep.violations)} violations over {SANITY_COUNT} programs {counts}".rstrip())


CRITERIA = {
  "golden": criterion_golden,
  "exhaustive": criterion_exhaustive,
  "safety": criterion_safety,
  "ni": criterion_ni,
  "gg": criterion_gg,
}


@pytest.mark.parametrize("name", list(CRITERIA))
def test_criterion(name, capsys):
  with capsys.disabled():
    print()
    assert CRITERIA[name]()


@pytest.mark.parametrize("kind", list(SANITY_MUTATIONS))
def test_mutation_sanity(kind, capsys):
  with capsys.disabled():
    print()
    assert criterion_sanity(kind)


if __name__ == "__main__":
  results = [f() for f in CRITERIA.values()] + [criterion_sanity(k) for k in SANITY_MUTATIONS]
  raise SystemExit(0 if all(results) else 1)
