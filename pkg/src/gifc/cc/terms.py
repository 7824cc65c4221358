"""Terms of the cast calculus."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Union

from ..labels import Label, LType, RawType

if TYPE_CHECKING:
  from ..labelexpr import LabelExpr
  from ..vcoercions import VCoercion


@dataclass(frozen=True)
class Var:
  name: str


@dataclass(frozen=True)
class Const:
  value: str  # "unit", "true" or "false"


@dataclass(frozen=True)
class Addr:
  cell: Label
  n: int


@dataclass(frozen=True)
class Lam:
  x: str
  body: Term


@dataclass(frozen=True)
class App:
  fun: Term
  arg: Term
  dom: LType
  cod: LType
  label: Label


@dataclass(frozen=True)
class AppStar:
  fun: Term
  arg: Term
  dom: LType
  cod: RawType


@dataclass(frozen=True)
class If:
  cond: Term
  ty: LType
  label: Label
  thn: Term
  els: Term


@dataclass(frozen=True)
class IfStar:
  cond: Term
  raw: RawType
  thn: Term
  els: Term


@dataclass(frozen=True)
class Let:
  x: str
  bound: Term
  ty: LType
  body: Term


# The raw type on RefE/RefQ is bookkeeping for heap typing; it plays no part
# in reduction.

@dataclass(frozen=True)
class RefE:
  label: Label
  init: Term
  raw: RawType | None = field(default=None, compare=False)


@dataclass(frozen=True)
class RefQ:
  blame: str
  label: Label
  init: Term
  raw: RawType | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Deref:
  e: Term
  ty: LType
  label: Label


@dataclass(frozen=True)
class DerefStar:
  e: Term
  raw: RawType


@dataclass(frozen=True)
class Assign:
  lhs: Term
  rhs: Term
  raw: RawType
  cell: Label
  label: Label


@dataclass(frozen=True)
class AssignQ:
  blame: str
  lhs: Term
  rhs: Term
  raw: RawType
  cell: Label


@dataclass(frozen=True)
class Prot:
  pc: LabelExpr
  label: Label
  body: Term
  ty: LType


@dataclass(frozen=True)
class Cast:
  e: Term
  c: VCoercion


@dataclass(frozen=True)
class Blame:
  blame: str


Term = Union[Var, Const, Addr, Lam, App, AppStar, If, IfStar, Let, RefE, RefQ,
             Deref, DerefStar, Assign, AssignQ, Prot, Cast, Blame]

RawValue = Union[Const, Addr, Lam]


def is_raw_value(t: Term) -> bool:
  return isinstance(t, (Const, Addr, Lam))


def is_value(t: Term) -> bool:
  if is_raw_value(t):
    return True
  if isinstance(t, Cast) and is_raw_value(t.e):
    from ..vcoercions import is_irreducible_v
    return is_irreducible_v(t.c)
  return False


def subst(t: Term, x: str, v: Term) -> Term:
  """Substitute a closed value for x."""
  match t:
    case Var(name):
      return v if name == x else t
    case Const() | Addr() | Blame():
      return t
    case Lam(y, body):
      return t if y == x else Lam(y, subst(body, x, v))
    case Let(y, bound, ty, body):
      body2 = body if y == x else subst(body, x, v)
      return Let(y, subst(bound, x, v), ty, body2)
    case App(f, a, dom, cod, l):
      return App(subst(f, x, v), subst(a, x, v), dom, cod, l)
    case AppStar(f, a, dom, cod):
      return AppStar(subst(f, x, v), subst(a, x, v), dom, cod)
    case If(c, ty, l, m, n):
      return If(subst(c, x, v), ty, l, subst(m, x, v), subst(n, x, v))
    case IfStar(c, raw, m, n):
      return IfStar(subst(c, x, v), raw, subst(m, x, v), subst(n, x, v))
    case RefE(l, init, raw):
      return RefE(l, subst(init, x, v), raw)
    case RefQ(p, l, init, raw):
      return RefQ(p, l, subst(init, x, v), raw)
    case Deref(e, ty, l):
      return Deref(subst(e, x, v), ty, l)
    case DerefStar(e, raw):
      return DerefStar(subst(e, x, v), raw)
    case Assign(lhs, rhs, raw, cell, l):
      return Assign(subst(lhs, x, v), subst(rhs, x, v), raw, cell, l)
    case AssignQ(p, lhs, rhs, raw, cell):
      return AssignQ(p, subst(lhs, x, v), subst(rhs, x, v), raw, cell)
    case Prot(pc, l, body, ty):
      return Prot(pc, l, subst(body, x, v), ty)
    case Cast(e, c):
      return Cast(subst(e, x, v), c)
  raise TypeError(t)


def children(t: Term) -> tuple[Term, ...]:
  match t:
    case Lam(_, body):
      return (body,)
    case App(f, a) | AppStar(f, a):
      return (f, a)
    case If(c, _, _, m, n) | IfStar(c, _, m, n):
      return (c, m, n)
    case Let(_, bound, _, body):
      return (bound, body)
    case RefE(_, init, _) | RefQ(_, _, init, _):
      return (init,)
    case Deref(e) | DerefStar(e) | Cast(e):
      return (e,)
    case Assign(lhs, rhs):
      return (lhs, rhs)
    case AssignQ(_, lhs, rhs):
      return (lhs, rhs)
    case Prot(_, _, body, _):
      return (body,)
  return ()


def subterms(t: Term):
  yield t
  for c in children(t):
    yield from subterms(c)


def size(t: Term) -> int:
  return sum(1 for _ in subterms(t))


def render_cc(t: Term) -> str:
  """Parenthesized rendering mirroring the constructors."""
  r = render_cc
  match t:
    case Var(name):
      return name
    case Const(k):
      return f"${k}"
    case Addr(cell, n):
      return f"(addr {cell} {n})"
    case Lam(x, body):
      return f"(lam {x} {r(body)})"
    case App(f, a, dom, cod, l):
      return f"(app {r(f)} {r(a)} {dom} {cod} {l})"
    case AppStar(f, a, dom, cod):
      return f"(app* {r(f)} {r(a)} {dom} {cod})"
    case If(c, ty, l, m, n):
      return f"(if {r(c)} {ty} {l} {r(m)} {r(n)})"
    case IfStar(c, raw, m, n):
      return f"(if* {r(c)} {raw} {r(m)} {r(n)})"
    case Let(x, bound, ty, body):
      return f"(let {x} {r(bound)} {ty} {r(body)})"
    case RefE(l, init, _):
      return f"(ref {l} {r(init)})"
    case RefQ(p, l, init, _):
      return f"(ref? {p} {l} {r(init)})"
    case Deref(e, ty, l):
      return f"(deref {r(e)} {ty} {l})"
    case DerefStar(e, raw):
      return f"(deref* {r(e)} {raw})"
    case Assign(lhs, rhs, raw, cell, l):
      return f"(assign {r(lhs)} {r(rhs)} {raw} {cell} {l})"
    case AssignQ(p, lhs, rhs, raw, cell):
      return f"(assign? {p} {r(lhs)} {r(rhs)} {raw} {cell})"
    case Prot(pc, l, body, ty):
      return f"(prot {pc} {l} {r(body)} {ty})"
    case Cast(e, c):
      return f"(cast {r(e)} {c})"
    case Blame(p):
      return f"(blame {p})"
  raise TypeError(t)
