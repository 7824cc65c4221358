"""Small-step machine for the cast calculus over (term, heap, pc) configurations."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Union

from .. import coercions as co
from .. import labelexpr as le
from .. import mutation
from ..labelexpr import BlameE, LabelExpr, Lit
from ..labels import LOW, STAR, Label, LType
from ..vcoercions import FunC, RefC, apply_cast, cast_step, stamp_val
from .terms import (Addr, App, AppStar, Assign, AssignQ, Blame, Cast, Const, Deref, DerefStar,
                    If, IfStar, Lam, Let, Prot, RefE, RefQ, Term, is_raw_value, is_value,
                    render_cc, subst)
from .typing import CCTypeError, check, check_heap

DEFAULT_FUEL = 100_000


@dataclass(frozen=True)
class Heap:
  cells: dict = field(default_factory=dict)   # (label, n) -> value
  types: dict = field(default_factory=dict)   # (label, n) -> raw type

  def fresh(self, l: Label) -> int:
    return sum(1 for cell, _ in self.cells if cell is l)

  def alloc(self, l: Label, v: Term, raw) -> tuple[Heap, Addr]:
    n = self.fresh(l)
    types = dict(self.types)
    if raw is not None:
      types[(l, n)] = raw
    return Heap({**self.cells, (l, n): v}, types), Addr(l, n)

  def write(self, cell: Label, n: int, v: Term) -> Heap:
    if (cell, n) not in self.cells:
      raise Stuck(f"write to unallocated ({cell},{n})")
    return Heap({**self.cells, (cell, n): v}, self.types)

  def __len__(self) -> int:
    return len(self.cells)


@dataclass(frozen=True)
class Config:
  term: Term
  heap: Heap = field(default_factory=Heap)
  pc: LabelExpr = Lit(LOW)


class Stuck(Exception):
  pass


@dataclass(frozen=True)
class Final:
  value: Term
  heap: Heap


@dataclass(frozen=True)
class BlameResult:
  blame: str


@dataclass(frozen=True)
class Timeout:
  steps: int


@dataclass(frozen=True)
class StuckResult:
  config: Config
  reason: str


@dataclass(frozen=True)
class PreservationFailure:
  config: Config
  rule: str
  reason: str


Outcome = Union[Final, BlameResult, Timeout, StuckResult, PreservationFailure]


def _fun_proxy(f: Term) -> tuple[Lam, FunC, co.Seq]:
  if isinstance(f, Cast) and isinstance(f.e, Lam) and isinstance(f.c.raw, FunC):
    return f.e, f.c.raw, f.c.seq
  raise Stuck(f"expected a function proxy, found {render_cc(f)}")


def _ref_proxy(r: Term) -> tuple[Addr, RefC, co.Seq]:
  if isinstance(r, Cast) and isinstance(r.e, Addr) and isinstance(r.c.raw, RefC):
    return r.e, r.c.raw, r.c.seq
  raise Stuck(f"expected a reference proxy, found {render_cc(r)}")


def _cast_pc(pc: LabelExpr, s: co.Seq) -> LabelExpr:
  return le.normalize_expr(le.Apply(pc, s))


def _bool(v: Term) -> bool:
  raw = v.e if isinstance(v, Cast) else v
  if isinstance(raw, Const) and raw.value in ("true", "false"):
    return raw.value == "true"
  raise Stuck(f"expected a boolean, found {render_cc(v)}")


def _security(v: Term) -> Label:
  if not isinstance(v, Cast):
    raise Stuck(f"expected a wrapped value, found {render_cc(v)}")
  return co.security(v.c.seq)


def _redex(m: Term, heap: Heap, pc: LabelExpr) -> tuple[Term, Heap, str]:
  """Contract the redex at the root of m; all operands are values."""
  match m:
    case App(Lam(x, body), v, _, cod, l):
      return Prot(le.stamp_pc(pc, l), l, subst(body, x, v), cod), heap, "beta"
    case App(f, v, _, cod, l):
      lam, fc, _ = _fun_proxy(f)
      pc2 = _cast_pc(le.stamp_pc(pc, l), fc.pc)
      if isinstance(pc2, BlameE):
        return Blame(pc2.blame), heap, "app-blame-pc"
      w = apply_cast(v, fc.dom)
      if isinstance(w, Blame):
        return w, heap, "app-blame"
      body = Cast(subst(lam.body, lam.x, w), fc.cod)
      return Prot(pc2, l, body, cod), heap, "app-cast"
    case AppStar(f, v, _, cod):
      lam, fc, s = _fun_proxy(f)
      sec = co.security(s)
      pc2 = _cast_pc(le.stamp_bang_pc(pc, sec), fc.pc)
      if isinstance(pc2, BlameE):
        return Blame(pc2.blame), heap, "app*-blame-pc"
      w = apply_cast(v, fc.dom)
      if isinstance(w, Blame):
        return w, heap, "app*-blame"
      body = Cast(subst(lam.body, lam.x, w), fc.cod)
      return Prot(pc2, sec, body, LType(cod, STAR)), heap, "app*-cast"
    case If(v, ty, l, thn, els):
      if mutation.active("if-no-prot"):
        return (thn if _bool(v) else els), heap, "if"
      branch, rule = (thn, "if-true") if _bool(v) else (els, "if-false")
      if isinstance(v, Cast):
        rule += "-cast"
      return Prot(le.stamp_pc(pc, l), l, branch, ty), heap, rule
    case IfStar(v, raw, thn, els):
      sec = _security(v)
      if mutation.active("ifstar-low"):
        sec = LOW
      branch, rule = (thn, "if*-true-cast") if _bool(v) else (els, "if*-false-cast")
      return Prot(le.stamp_bang_pc(pc, sec), sec, branch, LType(raw, STAR)), heap, rule
    case Let(x, v, _, body):
      return subst(body, x, v), heap, "let"
    case RefE(l, v, raw):
      heap2, a = heap.alloc(l, v, raw)
      return a, heap2, "ref"
    case RefQ(p, l, v, raw):
      if not mutation.active("nsu-skip"):
        pc2 = _cast_pc(pc, co.coerce_label(STAR, l, p))
        if isinstance(pc2, BlameE):
          return Blame(pc2.blame), heap, "ref?-blame"
      heap2, a = heap.alloc(l, v, raw)
      return a, heap2, "ref?"
    case Deref(Addr(cell, n), ty, l):
      return Prot(le.stamp_pc(pc, l), l, heap.cells[(cell, n)], ty), heap, "deref"
    case Deref(r, ty, l):
      a, rc, _ = _ref_proxy(r)
      v = heap.cells[(a.cell, a.n)]
      return Prot(le.stamp_pc(pc, l), l, Cast(v, rc.read), ty), heap, "deref-cast"
    case DerefStar(r, raw):
      a, rc, s = _ref_proxy(r)
      sec = co.security(s)
      v = heap.cells[(a.cell, a.n)]
      body = Cast(v, rc.read)
      return Prot(le.stamp_bang_pc(pc, sec), sec, body, LType(raw, STAR)), heap, "deref*-cast"
    case Assign(Addr(cell, n), v, _, _, _):
      return Const("unit"), heap.write(cell, n, v), "assign"
    case Assign(r, v, _, _, _):
      a, rc, _ = _ref_proxy(r)
      w = apply_cast(v, rc.write)
      if isinstance(w, Blame):
        return w, heap, "assign-blame"
      return Const("unit"), heap.write(a.cell, a.n, w), "assign-cast"
    case AssignQ(p, r, v, _, _):
      a, rc, s = _ref_proxy(r)
      if not mutation.active("nsu-skip"):
        pc2 = _cast_pc(le.stamp_bang_pc(pc, co.security(s)), co.coerce_label(STAR, a.cell, p))
        if isinstance(pc2, BlameE):
          return Blame(pc2.blame), heap, "assign?-blame-pc"
      w = apply_cast(v, rc.write)
      if isinstance(w, Blame):
        return w, heap, "assign?-blame"
      return Const("unit"), heap.write(a.cell, a.n, w), "assign?-cast"
    case Cast(v, c):
      if mutation.active("cast-drop") and not is_value(m):
        return v, heap, "cast"
      t, rule = cast_step(v, c)
      return t, heap, rule
  raise Stuck(f"no rule for {render_cc(m)}")


def _frames(m: Term):
  """Operand positions of m in evaluation order, with a rebuild function."""
  match m:
    case App(f, a, dom, cod, l):
      return [(f, lambda t: App(t, a, dom, cod, l)), (a, lambda t: App(f, t, dom, cod, l))]
    case AppStar(f, a, dom, cod):
      return [(f, lambda t: AppStar(t, a, dom, cod)), (a, lambda t: AppStar(f, t, dom, cod))]
    case If(c, ty, l, thn, els):
      return [(c, lambda t: If(t, ty, l, thn, els))]
    case IfStar(c, raw, thn, els):
      return [(c, lambda t: IfStar(t, raw, thn, els))]
    case Let(x, bound, ty, body):
      return [(bound, lambda t: Let(x, t, ty, body))]
    case RefE(l, init, raw):
      return [(init, lambda t: RefE(l, t, raw))]
    case RefQ(p, l, init, raw):
      return [(init, lambda t: RefQ(p, l, t, raw))]
    case Deref(e, ty, l):
      return [(e, lambda t: Deref(t, ty, l))]
    case DerefStar(e, raw):
      return [(e, lambda t: DerefStar(t, raw))]
    case Assign(lhs, rhs, raw, cell, l):
      return [(lhs, lambda t: Assign(t, rhs, raw, cell, l)),
              (rhs, lambda t: Assign(lhs, t, raw, cell, l))]
    case AssignQ(p, lhs, rhs, raw, cell):
      return [(lhs, lambda t: AssignQ(p, t, rhs, raw, cell)),
              (rhs, lambda t: AssignQ(p, lhs, t, raw, cell))]
    case Cast(e, c):
      return [(e, lambda t: Cast(t, c))]
  return []


def _step(m: Term, heap: Heap, pc: LabelExpr) -> tuple[Term, Heap, str, Term]:
  """Returns (term, heap, rule, redex)."""
  if isinstance(m, Prot):
    if is_value(m.body):
      if mutation.active("prot-no-stamp"):
        return m.body, heap, "prot-val", m
      return stamp_val(m.body, m.ty, m.label), heap, "prot-val", m
    if isinstance(m.body, Blame):
      return m.body, heap, "prot-blame", m
    body, heap2, rule, redex = _step(m.body, heap, m.pc)
    return Prot(m.pc, m.label, body, m.ty), heap2, rule, redex
  for sub, rebuild in _frames(m):
    if isinstance(sub, Blame):
      return sub, heap, "xi-blame", m
    if not is_value(sub):
      t, heap2, rule, redex = _step(sub, heap, pc)
      return rebuild(t), heap2, rule, redex
  t, heap2, rule = _redex(m, heap, pc)
  return t, heap2, rule, m


def step(cfg: Config) -> tuple[Config, str, Term]:
  """One reduction. Raises Stuck when no rule applies."""
  if is_value(cfg.term) or isinstance(cfg.term, Blame):
    raise Stuck("configuration is final")
  try:
    t, heap, rule, redex = _step(cfg.term, cfg.heap, cfg.pc)
  except (KeyError, ValueError, co.IllTyped) as err:
    raise Stuck(f"{type(err).__name__}: {err}") from None
  return replace(cfg, term=t, heap=heap), rule, redex


TraceHook = Callable[[int, str, Term, Config], None]


def run(cfg: Config, fuel: int = DEFAULT_FUEL, *, expected: LType | None = None,
        g: Label = LOW, trace: TraceHook | None = None) -> Outcome:
  """Drive the machine. With an expected type, re-check every configuration."""
  preserve = expected is not None
  if preserve:
    failure = _recheck(cfg, g, expected, "initial")
    if failure:
      return failure
  for i in range(fuel):
    if isinstance(cfg.term, Blame):
      return BlameResult(cfg.term.blame)
    if is_value(cfg.term):
      return Final(cfg.term, cfg.heap)
    try:
      cfg, rule, redex = step(cfg)
    except Stuck as err:
      return StuckResult(cfg, str(err))
    if trace:
      trace(i, rule, redex, cfg)
    if preserve:
      failure = _recheck(cfg, g, expected, rule)
      if failure:
        return failure
  if isinstance(cfg.term, Blame):
    return BlameResult(cfg.term.blame)
  if is_value(cfg.term):
    return Final(cfg.term, cfg.heap)
  return Timeout(fuel)


def _recheck(cfg: Config, g: Label, expected: LType, rule: str) -> PreservationFailure | None:
  try:
    sec = le.security_pc(cfg.pc)
    check(cfg.term, {}, cfg.heap.types, g, sec, expected)
    check_heap(cfg.heap.cells, cfg.heap.types)
  except (CCTypeError, ValueError, co.IllTyped) as err:
    return PreservationFailure(cfg, rule, str(err))
  return None


def render_value(v: Term, a: LType) -> str:
  raw, suffix = (v.e, str(v.c)) if isinstance(v, Cast) else (v, "")
  label = co.seq_type(v.c.seq)[0] if isinstance(v, Cast) else a.label
  match raw:
    case Const(k):
      text = k
    case Addr(cell, n):
      text = f"addr({cell},{n})"
    case Lam():
      text = "<closure>"
    case _:
      text = render_cc(raw)
  return f"{text}@{label}{suffix}"


def is_final(t: Term) -> bool:
  return is_value(t) or isinstance(t, Blame)


__all__ = ["Config", "Heap", "Final", "BlameResult", "Timeout", "StuckResult",
           "PreservationFailure", "Stuck", "step", "run", "render_value", "DEFAULT_FUEL",
           "is_raw_value"]
