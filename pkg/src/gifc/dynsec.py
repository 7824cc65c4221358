"""A fully dynamic IFC language with no-sensitive-upgrade checks, erasure into it, and value simulation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from . import coercions as co
from .cc import terms as cc
from .labels import BOOL, LOW, STAR, Fun, Label, LType, Ref, join, label_order
from .vcoercions import vcoercion_type

# Terms. Every label here is a runtime label, never the unknown one.


@dataclass(frozen=True)
class Var:
  name: str


@dataclass(frozen=True)
class Const:
  value: str
  label: Label


@dataclass(frozen=True)
class Addr:
  n: int
  cell: Label
  label: Label


@dataclass(frozen=True)
class Lam:
  x: str
  body: DynTerm
  label: Label


@dataclass(frozen=True)
class App:
  fun: DynTerm
  arg: DynTerm


@dataclass(frozen=True)
class If:
  cond: DynTerm
  thn: DynTerm
  els: DynTerm


@dataclass(frozen=True)
class Let:
  x: str
  bound: DynTerm
  body: DynTerm


@dataclass(frozen=True)
class RefQ:
  label: Label
  init: DynTerm
  site: str = field(default="", compare=False)


@dataclass(frozen=True)
class Deref:
  e: DynTerm


@dataclass(frozen=True)
class AssignQ:
  lhs: DynTerm
  rhs: DynTerm
  site: str = field(default="", compare=False)


@dataclass(frozen=True)
class Prot:
  label: Label
  body: DynTerm


DynTerm = Union[Var, Const, Addr, Lam, App, If, Let, RefQ, Deref, AssignQ, Prot]
DynValue = Union[Const, Addr, Lam]


def is_value(t: DynTerm) -> bool:
  return isinstance(t, (Const, Addr, Lam))


def join_value(v: DynValue, l: Label) -> DynValue:
  match v:
    case Const(k, l2):
      return Const(k, join(l2, l))
    case Addr(n, cell, l2):
      return Addr(n, cell, join(l2, l))
    case Lam(x, body, l2):
      return Lam(x, body, join(l2, l))
  raise TypeError(v)


def subst(t: DynTerm, x: str, v: DynValue) -> DynTerm:
  match t:
    case Var(name):
      return v if name == x else t
    case Const() | Addr():
      return t
    case Lam(y, body, l):
      return t if y == x else Lam(y, subst(body, x, v), l)
    case App(f, a):
      return App(subst(f, x, v), subst(a, x, v))
    case If(c, m, n):
      return If(subst(c, x, v), subst(m, x, v), subst(n, x, v))
    case Let(y, bound, body):
      return Let(y, subst(bound, x, v), body if y == x else subst(body, x, v))
    case RefQ(l, init, site):
      return RefQ(l, subst(init, x, v), site)
    case Deref(e):
      return Deref(subst(e, x, v))
    case AssignQ(lhs, rhs, site):
      return AssignQ(subst(lhs, x, v), subst(rhs, x, v), site)
    case Prot(l, body):
      return Prot(l, subst(body, x, v))
  raise TypeError(t)


def render(t: DynTerm) -> str:
  match t:
    case Var(name):
      return name
    case Const(k, l):
      return f"{k}@{l}"
    case Addr(n, cell, l):
      return f"(addr {cell} {n})@{l}"
    case Lam(x, body, l):
      return f"(lam {x} {render(body)})@{l}"
    case App(f, a):
      return f"(app {render(f)} {render(a)})"
    case If(c, m, n):
      return f"(if {render(c)} {render(m)} {render(n)})"
    case Let(x, bound, body):
      return f"(let {x} {render(bound)} {render(body)})"
    case RefQ(l, init):
      return f"(ref? {l} {render(init)})"
    case Deref(e):
      return f"(! {render(e)})"
    case AssignQ(lhs, rhs):
      return f"(:=? {render(lhs)} {render(rhs)})"
    case Prot(l, body):
      return f"(prot {l} {render(body)})"
  raise TypeError(t)


# Erasure from the cast calculus.

def _runtime_label(a: LType, what: str) -> Label:
  if not a.label.specific:
    raise ValueError(f"cannot erase {what} at {a}: its label is unknown")
  return a.label


def erase(m: cc.Term, a: LType) -> DynTerm:
  """Drop casts and turn static heap operations into checked ones."""
  match m:
    case cc.Var(x):
      return Var(x)
    case cc.Const(k):
      return Const(k, _runtime_label(a, "a constant"))
    case cc.Lam(x, body):
      return Lam(x, erase(body, a.raw.cod), _runtime_label(a, "a function"))
    case cc.Addr(cell, n):
      return Addr(n, cell, _runtime_label(a, "an address"))
    case cc.App(f, arg, dom, cod, l):
      return App(erase(f, LType(Fun(dom, STAR, cod), l)), erase(arg, dom))
    case cc.AppStar(f, arg, dom, cod):
      return App(erase(f, LType(Fun(dom, STAR, LType(cod, STAR)), STAR)), erase(arg, dom))
    case cc.If(c, ty, l, thn, els):
      return If(erase(c, LType(BOOL, l)), erase(thn, ty), erase(els, ty))
    case cc.IfStar(c, raw, thn, els):
      star = LType(raw, STAR)
      return If(erase(c, LType(BOOL, STAR)), erase(thn, star), erase(els, star))
    case cc.Let(x, bound, ty, body):
      return Let(x, erase(bound, ty), erase(body, a))
    case cc.RefE(l, init, _):
      return RefQ(l, erase(init, a.raw.inner))
    case cc.RefQ(p, l, init, _):
      return RefQ(l, erase(init, a.raw.inner), p)
    case cc.Deref(e, ty, l):
      return Deref(erase(e, LType(Ref(ty), l)))
    case cc.DerefStar(e, raw):
      return Deref(erase(e, LType(Ref(LType(raw, STAR)), STAR)))
    case cc.Assign(lhs, rhs, raw, cell, l):
      cell_ty = LType(raw, cell)
      return AssignQ(erase(lhs, LType(Ref(cell_ty), l)), erase(rhs, cell_ty))
    case cc.AssignQ(p, lhs, rhs, raw, cell):
      cell_ty = LType(raw, cell)
      return AssignQ(erase(lhs, LType(Ref(cell_ty), STAR)), erase(rhs, cell_ty), p)
    case cc.Cast(e, c):
      return erase(e, vcoercion_type(c)[0])
    case cc.Prot(_, l, body, ty):
      return Prot(l, erase(body, ty))
  raise ValueError(f"cannot erase {cc.render_cc(m)}")


# Reduction.

@dataclass(frozen=True)
class DynFinal:
  value: DynValue
  heap: dict


@dataclass(frozen=True)
class NSUError:
  site: str


@dataclass(frozen=True)
class DynTimeout:
  steps: int


@dataclass(frozen=True)
class DynStuck:
  term: DynTerm
  reason: str


DynOutcome = Union[DynFinal, NSUError, DynTimeout, DynStuck]


class _NSU(Exception):
  def __init__(self, site: str):
    self.site = site


class _Stuck(Exception):
  pass


def _redex(m: DynTerm, heap: dict, pc: Label) -> tuple[DynTerm, dict]:
  match m:
    case App(Lam(x, body, l), v):
      return Prot(l, subst(body, x, v)), heap
    case If(Const("true", l), thn, _):
      return Prot(l, thn), heap
    case If(Const("false", l), _, els):
      return Prot(l, els), heap
    case Let(x, v, body):
      return subst(body, x, v), heap
    case RefQ(l, v, site):
      if not label_order(pc, l):
        raise _NSU(site or "ref?")
      n = sum(1 for cell, _ in heap if cell is l)
      return Addr(n, l, LOW), {**heap, (l, n): join_value(v, l)}
    case Deref(Addr(n, cell, l)):
      return Prot(l, heap[(cell, n)]), heap
    case AssignQ(Addr(n, cell, l), v, site):
      if not label_order(join(pc, l), cell):
        raise _NSU(site or "assign?")
      if (cell, n) not in heap:
        raise _Stuck(f"write to unallocated ({cell},{n})")
      return Const("unit", LOW), {**heap, (cell, n): join_value(v, cell)}
  raise _Stuck(f"no rule for {render(m)}")


def _operands(m: DynTerm):
  match m:
    case App(f, a):
      return [(f, lambda t: App(t, a)), (a, lambda t: App(f, t))]
    case If(c, thn, els):
      return [(c, lambda t: If(t, thn, els))]
    case Let(x, bound, body):
      return [(bound, lambda t: Let(x, t, body))]
    case RefQ(l, init, site):
      return [(init, lambda t: RefQ(l, t, site))]
    case Deref(e):
      return [(e, Deref)]
    case AssignQ(lhs, rhs, site):
      return [(lhs, lambda t: AssignQ(t, rhs, site)), (rhs, lambda t: AssignQ(lhs, t, site))]
  return []


def step_dyn(m: DynTerm, heap: dict, pc: Label) -> tuple[DynTerm, dict]:
  if isinstance(m, Prot):
    if is_value(m.body):
      return join_value(m.body, m.label), heap
    body, heap2 = step_dyn(m.body, heap, join(pc, m.label))
    return Prot(m.label, body), heap2
  for sub, rebuild in _operands(m):
    if not is_value(sub):
      t, heap2 = step_dyn(sub, heap, pc)
      return rebuild(t), heap2
  return _redex(m, heap, pc)


def run_dyn(m: DynTerm, pc: Label = LOW, fuel: int = 100_000) -> DynOutcome:
  heap: dict = {}
  for _ in range(fuel):
    if is_value(m):
      return DynFinal(m, heap)
    try:
      m, heap = step_dyn(m, heap, pc)
    except _NSU as err:
      return NSUError(err.site)
    except (_Stuck, KeyError, ValueError) as err:
      return DynStuck(m, str(err))
  if is_value(m):
    return DynFinal(m, heap)
  return DynTimeout(fuel)


# Simulation between final values.

def value_sim(dv: DynValue, v: cc.Term, a: LType) -> bool:
  """dv is at least as secure as the cast-calculus value v at type a."""
  if isinstance(v, cc.Cast):
    raw, bound = v.e, co.security(v.c.seq)
  else:
    raw, bound = v, a.label
    if not bound.specific:
      return False
  match dv, raw:
    case Const(k1, l1), cc.Const(k2):
      return k1 == k2 and label_order(l1, bound)
    case Addr(n1, cell1, l1), cc.Addr(cell2, n2):
      return n1 == n2 and cell1 is cell2 and label_order(l1, bound)
    case Lam(_, _, l1), cc.Lam():
      return label_order(l1, bound)
  return False


def render_outcome(r: DynOutcome) -> str:
  match r:
    case DynFinal(v):
      return render(v)
    case NSUError(site):
      return f"NSU error at {site}"
    case DynTimeout(n):
      return f"timeout after {n} steps"
    case DynStuck(_, reason):
      return f"stuck: {reason}"
  raise TypeError(r)
