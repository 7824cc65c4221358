"""Property suites over generated programs: type safety, noninterference, gradual guarantee."""
from __future__ import annotations

import json
import time
from collections import Counter
from contextlib import nullcontext
from dataclasses import dataclass, field, fields, replace
from typing import Callable

from .. import coercions as co
from .. import dynsec
from ..cc.machine import Config, Final, PreservationFailure, StuckResult, Timeout, run
from ..cc.terms import Addr, Cast, Const, Lam, subst
from ..cc.typing import CCTypeError, check
from ..compiler import compile_term
from ..labels import HIGH, LOW, LType, precision
from ..mutation import mutated
from ..surface.checker import SurfaceTypeError, surface_precision, typecheck_surface
from ..surface.syntax import (INPUT, Ann, Lam as SLam, Term, annotation_sites, children,
                              constructs, erode, number_blames, render)
from .gen import NI_CONTEXT, NI_GOAL, GenConfig, gen_typed, rng_for

KINDS = ("Stuck", "PreservationFail", "CompileFail", "NIFail", "SimFail", "GGFail")
FUEL = 20_000


@dataclass
class Violation:
  kind: str
  seed: int
  index: int
  program: str
  reduced: str
  detail: str = ""


@dataclass
class Report:
  suite: str
  seed: int
  count: int
  mutation: str | None = None
  violations: list[Violation] = field(default_factory=list)
  outcomes: Counter = field(default_factory=Counter)
  histogram: Counter = field(default_factory=Counter)
  skipped: int = 0
  elapsed: float = 0.0

  def counts(self) -> dict[str, int]:
    c = Counter(v.kind for v in self.violations)
    return {k: c.get(k, 0) for k in KINDS}

  def lines(self) -> list[str]:
    out = [f"suite {self.suite} seed {self.seed} count {self.count}"
           + (f" mutation {self.mutation}" if self.mutation else "")]
    out.append("outcomes " + " ".join(f"{k}={v}" for k, v in sorted(self.outcomes.items())))
    out.append("constructs " + " ".join(f"{k}={v}" for k, v in sorted(self.histogram.items())))
    out.append(f"skipped {self.skipped}")
    for v in self.violations:
      out.append(f"violation {v.kind} seed={v.seed} index={v.index}: {v.detail}")
      out.append(f"  program: {v.program}")
      out.append(f"  reduced: {v.reduced}")
    out.append(f"violations {len(self.violations)} "
               + " ".join(f"{k}={n}" for k, n in self.counts().items()))
    return out

  def summary(self) -> dict:
    return {
      "suite": self.suite, "seed": self.seed, "count": self.count, "mutation": self.mutation,
      "violations": self.counts(), "outcomes": dict(sorted(self.outcomes.items())),
      "constructs": dict(sorted(self.histogram.items())), "skipped": self.skipped,
      "violation_cases": [{"kind": v.kind, "seed": v.seed, "index": v.index}
                          for v in self.violations],
    }

  def write(self, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
      fh.write("\n".join(self.lines()) + "\n")
      fh.write(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n")

  def merge(self, other: Report) -> Report:
    return replace(self, count=self.count + other.count,
                   violations=self.violations + other.violations,
                   outcomes=self.outcomes + other.outcomes,
                   histogram=self.histogram + other.histogram,
                   skipped=self.skipped + other.skipped, elapsed=self.elapsed + other.elapsed)


# Shrinking by replacing a subterm with one of its children.

def _positions(m: Term, path=()):
  yield path, m
  for f in fields(m):
    v = getattr(m, f.name)
    if v in children(m) and not isinstance(v, (str, tuple)):
      yield from _positions(v, path + (f.name,))


def _put(m: Term, path: tuple, sub: Term) -> Term:
  if not path:
    return sub
  head, rest = path[0], path[1:]
  return replace(m, **{head: _put(getattr(m, head), rest, sub)})


def _candidates(m: Term) -> list[tuple[tuple, Term]]:
  out = []
  for path, t in _positions(m):
    for c in children(t):
      out.append((path, c))
  return out


def shrink(m: Term, still_fails: Callable[[Term], bool], budget: int = 300) -> Term:
  """Greedy minimization; each accepted step keeps the violation."""
  progress = True
  while progress and budget > 0:
    progress = False
    for path, c in _candidates(m):
      budget -= 1
      if budget <= 0:
        break
      cand = number_blames(_put(m, path, c))
      if still_fails(cand):
        m, progress = cand, True
        break
  return m


def _mutation_ctx(name: str | None):
  return mutated(name) if name else nullcontext()


def _outcome_name(r) -> str:
  return type(r).__name__


# Type safety.

def check_safety(m: Term, ctx=NI_CONTEXT, input_value: str = "true") -> tuple[str | None, str, str]:
  """(violation kind or None, detail, outcome name) for one program."""
  try:
    out = compile_term(m, ctx)
  except SurfaceTypeError as err:
    return None, str(err), "TypeError"
  except AssertionError as err:
    return "CompileFail", f"compiled type differs: {err}", "CompileFail"
  try:
    check(out.term, ctx, {}, LOW, LOW, out.type)
  except (CCTypeError, ValueError) as err:
    return "CompileFail", str(err), "CompileFail"
  term = subst(out.term, INPUT, Const(input_value))
  r = run(Config(term), FUEL, expected=out.type)
  match r:
    case StuckResult(_, reason):
      return "Stuck", reason, "Stuck"
    case PreservationFailure(_, rule, reason):
      return "PreservationFail", f"after {rule}: {reason}", "PreservationFail"
  return None, "", _outcome_name(r)


def fuzz_safety(cfg: GenConfig, mutate: str | None = None, shrink_budget: int = 300) -> Report:
  rep = Report("safety", cfg.seed, cfg.count, mutate)
  start = time.perf_counter()
  with _mutation_ctx(mutate):
    for i in range(cfg.count):
      made = gen_typed(cfg, i, None, NI_CONTEXT, "safety")
      if made is None:
        rep.skipped += 1
        continue
      m, _ = made
      rep.histogram.update(constructs(m))
      value = "true" if rng_for(cfg.seed, i, "safety-input").random() < 0.5 else "false"
      kind, detail, outcome = check_safety(m, NI_CONTEXT, value)
      rep.outcomes[outcome] += 1
      if kind:
        small = shrink(m, lambda c: check_safety(c, NI_CONTEXT, value)[0] == kind, shrink_budget)
        rep.violations.append(Violation(kind, cfg.seed, i, render(m), render(small), detail))
  rep.elapsed = time.perf_counter() - start
  return rep


# Noninterference.

def _run_input(term, value: str):
  return run(Config(subst(term, INPUT, Const(value))), FUEL)


def check_ni(m: Term) -> tuple[str | None, str, str]:
  try:
    if typecheck_surface(m, NI_CONTEXT, LOW) != NI_GOAL:
      return None, "", "TypeError"
    out = compile_term(m, NI_CONTEXT)
  except SurfaceTypeError:
    return None, "", "TypeError"
  runs = {b: _run_input(out.term, b) for b in ("true", "false")}
  names = "/".join(_outcome_name(r) for r in runs.values())
  for b, r in runs.items():
    if isinstance(r, (StuckResult, PreservationFailure)):
      return "Stuck", f"input {b}: {r}", names
  t, f = runs["true"], runs["false"]
  if isinstance(t, Final) and isinstance(f, Final) and t.value != f.value:
    return "NIFail", f"input true gives {t.value}, input false gives {f.value}", names
  erased = dynsec.erase(out.term, out.type)
  dyn = {b: dynsec.run_dyn(dynsec.subst(erased, INPUT, dynsec.Const(b, HIGH)), LOW, FUEL)
         for b in ("true", "false")}
  for b, r in runs.items():
    if not isinstance(r, Final):
      continue
    d = dyn[b]
    if isinstance(d, dynsec.DynTimeout):
      continue
    if not isinstance(d, dynsec.DynFinal) or not dynsec.value_sim(d.value, r.value, NI_GOAL):
      return "SimFail", f"input {b}: gradual {r.value}, dynamic {dynsec.render_outcome(d)}", names
  dt, df = dyn["true"], dyn["false"]
  if isinstance(dt, dynsec.DynFinal) and isinstance(df, dynsec.DynFinal):
    low = [d.value for d in (dt, df) if isinstance(d.value, dynsec.Const) and d.value.label is LOW]
    if len(low) == 2 and low[0] != low[1]:
      return "NIFail", f"dynamic runs differ: {dynsec.render(low[0])} vs {dynsec.render(low[1])}", names
  return None, "", names


def fuzz_ni(cfg: GenConfig, mutate: str | None = None, shrink_budget: int = 300) -> Report:
  rep = Report("ni", cfg.seed, cfg.count, mutate)
  start = time.perf_counter()
  with _mutation_ctx(mutate):
    for i in range(cfg.count):
      made = gen_typed(cfg, i, NI_GOAL, NI_CONTEXT, "ni")
      if made is None:
        rep.skipped += 1
        continue
      m, _ = made
      rep.histogram.update(constructs(m))
      kind, detail, outcome = check_ni(m)
      rep.outcomes[outcome] += 1
      if kind:
        small = shrink(m, lambda c: check_ni(c)[0] == kind, shrink_budget)
        rep.violations.append(Violation(kind, cfg.seed, i, render(m), render(small), detail))
  rep.elapsed = time.perf_counter() - start
  return rep


# Gradual guarantee.

def _split(v):
  return (v.e, v.c.seq) if isinstance(v, Cast) else (v, None)


def value_precision(v, a: LType, w, b: LType) -> bool:
  """V ⊑ W on final values, comparing raw values and top-level label coercions."""
  rv, cv = _split(v)
  rw, cw = _split(w)
  match rv, rw:
    case Const(k1), Const(k2):
      if k1 != k2:
        return False
    case Addr(), Addr():
      if rv != rw:
        return False
    case Lam(), Lam():
      pass
    case _:
      return False
  if cv is None and cw is None:
    return precision(a.label, b.label)
  if cw is None:
    return co.seq_precision_left(cv, b.label)
  if cv is None:
    return co.seq_precision_right(a.label, cw)
  return co.seq_precision(cv, cw)


def check_gg(m: Term, precise: Term, value: str = "true") -> tuple[str | None, str, str]:
  """Gradual guarantee for the pair m ⊑ precise."""
  try:
    b = typecheck_surface(precise, NI_CONTEXT, LOW)
  except SurfaceTypeError:
    return None, "", "TypeError"
  if not surface_precision(m, precise):
    return None, "", "Unrelated"
  try:
    a = typecheck_surface(m, NI_CONTEXT, LOW)
  except SurfaceTypeError as err:
    return "GGFail", f"less precise program is ill-typed: {err}", "StaticFail"
  if not precision(a, b):
    return "GGFail", f"types not related by precision: {a} vs {b}", "StaticFail"
  lo, hi = compile_term(m, NI_CONTEXT), compile_term(precise, NI_CONTEXT)
  r_hi = run(Config(subst(hi.term, INPUT, Const(value))), FUEL)
  if not isinstance(r_hi, Final):
    return None, "", f"precise-{_outcome_name(r_hi)}"
  r_lo = run(Config(subst(lo.term, INPUT, Const(value))), FUEL)
  if isinstance(r_lo, Timeout):
    return None, "", "Inconclusive"
  if not isinstance(r_lo, Final):
    return "GGFail", f"precise program yields a value, less precise gives {r_lo}", "Final/other"
  if not value_precision(r_lo.value, a, r_hi.value, b):
    return "GGFail", f"values not related: {r_lo.value} vs {r_hi.value}", "Final/Final"
  return None, "", "Final/Final"


def _restore_annotations(m: Term, precise: Term) -> list[Term]:
  """Variants of m with one eroded annotation put back."""
  out = []
  for (path, t), (_, u) in zip(_positions(m), _positions(precise)):
    if isinstance(t, (SLam, Ann)) and t != u:
      if isinstance(t, SLam):
        fixed = replace(t, pc=u.pc, ann=u.ann)
      else:
        fixed = replace(t, ann=u.ann)
      out.append(_put(m, path, fixed))
  return out


def shrink_pair(m: Term, precise: Term, still_fails, budget: int = 300) -> tuple[Term, Term]:
  progress = True
  while progress and budget > 0:
    progress = False
    for cand in _restore_annotations(m, precise):
      budget -= 1
      cand = number_blames(cand)
      if still_fails(cand, precise):
        m, progress = cand, True
        break
    if progress:
      continue
    for (path, c), (_, c2) in zip(_candidates(m), _candidates(precise)):
      budget -= 1
      if budget <= 0:
        break
      a, b = number_blames(_put(m, path, c)), number_blames(_put(precise, path, c2))
      if still_fails(a, b):
        m, precise, progress = a, b, True
        break
  return m, precise


def erode_random(m: Term, rng, k: int) -> Term:
  n = annotation_sites(m)
  for site in rng.sample(range(n), min(k, n)):
    m = erode(m, site)
  return m


def fuzz_gg(cfg: GenConfig, mutate: str | None = None, shrink_budget: int = 300) -> Report:
  rep = Report("gg", cfg.seed, cfg.count, mutate)
  start = time.perf_counter()
  pairs, i = 0, -1
  with _mutation_ctx(mutate):
    # count is the number of pairs; programs without annotation sites are drawn past
    while pairs < cfg.count and i < 3 * cfg.count:
      i += 1
      made = gen_typed(cfg, i, None, NI_CONTEXT, "gg")
      if made is None or annotation_sites(made[0]) == 0:
        rep.skipped += 1
        continue
      pairs += 1
      precise, _ = made
      rng = rng_for(cfg.seed, i, "gg-erode")
      m = number_blames(erode_random(precise, rng, rng.choice((1, 2, 3))))
      rep.histogram.update(constructs(precise))
      kind, detail, outcome = check_gg(m, precise)
      rep.outcomes[outcome] += 1
      if kind:
        small, small2 = shrink_pair(m, precise, lambda a, b: check_gg(a, b)[0] == kind,
                                    shrink_budget)
        rep.violations.append(Violation(
          kind, cfg.seed, i, f"{render(m)}  vs  {render(precise)}",
          f"{render(small)}  vs  {render(small2)}", detail))
  rep.elapsed = time.perf_counter() - start
  return rep


SUITES = {"safety": fuzz_safety, "ni": fuzz_ni, "gg": fuzz_gg}

# The rule each suite is expected to catch when deliberately broken.
SANITY_MUTATIONS = {"safety": "cast-drop", "ni": "ifstar-low", "gg": "up-blames"}

__all__ = ["Report", "Violation", "fuzz_safety", "fuzz_ni", "fuzz_gg", "check_safety", "check_ni",
           "check_gg", "value_precision", "shrink", "shrink_pair", "erode_random", "SUITES",
           "SANITY_MUTATIONS", "KINDS"]
