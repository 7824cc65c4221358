"""Abstract syntax of the surface language, rendering, and annotation sites."""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import Iterator, Union

from ..labels import STAR, Fun, Label, LType, Ref

Span = tuple[int, int]


def _span():
  return field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Var:
  name: str
  span: Span = _span()


@dataclass(frozen=True)
class Const:
  value: str
  label: Label
  span: Span = _span()


@dataclass(frozen=True)
class Lam:
  pc: Label
  x: str
  ann: LType
  body: Term
  label: Label
  span: Span = _span()


@dataclass(frozen=True)
class App:
  fun: Term
  arg: Term
  blame: str = ""
  span: Span = _span()


@dataclass(frozen=True)
class If:
  cond: Term
  thn: Term
  els: Term
  blame: str = ""
  span: Span = _span()


@dataclass(frozen=True)
class Let:
  x: str
  bound: Term
  body: Term
  span: Span = _span()


@dataclass(frozen=True)
class RefE:
  label: Label
  init: Term
  blame: str = ""
  span: Span = _span()


@dataclass(frozen=True)
class Deref:
  e: Term
  blame: str = ""
  span: Span = _span()


@dataclass(frozen=True)
class Assign:
  lhs: Term
  rhs: Term
  blame: str = ""
  span: Span = _span()


@dataclass(frozen=True)
class Ann:
  e: Term
  ann: LType
  blame: str = ""
  span: Span = _span()


Term = Union[Var, Const, Lam, App, If, Let, RefE, Deref, Assign, Ann]

INPUT = "input"


def children(m: Term) -> tuple[Term, ...]:
  match m:
    case Lam(body=body):
      return (body,)
    case App(f, a):
      return (f, a)
    case If(c, t, e):
      return (c, t, e)
    case Let(_, bound, body):
      return (bound, body)
    case RefE(_, init):
      return (init,)
    case Deref(e) | Ann(e):
      return (e,)
    case Assign(lhs, rhs):
      return (lhs, rhs)
  return ()


def subterms(m: Term) -> Iterator[Term]:
  yield m
  for c in children(m):
    yield from subterms(c)


def size(m: Term) -> int:
  return sum(1 for _ in subterms(m))


def number_blames(m: Term) -> Term:
  """Assign blame labels p1, p2, ... in pre-order."""
  counter = iter(range(1, 1 << 30))

  def go(t: Term) -> Term:
    updates = {}
    if any(f.name == "blame" for f in fields(t)):
      updates["blame"] = f"p{next(counter)}"
    for f in fields(t):
      v = getattr(t, f.name)
      if isinstance(v, _TERM_TYPES):
        updates[f.name] = go(v)
    return replace(t, **updates)

  return go(m)


_TERM_TYPES = (Var, Const, Lam, App, If, Let, RefE, Deref, Assign, Ann)


# Rendering. Precedence: 0 expression, 1 application, 2 prefix, 3 atom.

def render(m: Term) -> str:
  return _render(m, 0)


def _paren(text: str, need: bool) -> str:
  return f"({text})" if need else text


def _render(m: Term, prec: int) -> str:
  match m:
    case Var(name):
      return name
    case Const(k, l):
      return f"{k}@{l}"
    case Lam(pc, x, ann, body, l):
      text = f"lam [{pc}] ({x} : {ann}) . {_render(body, 0)} @{l}"
      return _paren(text, prec > 0)
    case App(f, a):
      return _paren(f"{_render(f, 1)} {_render(a, 3)}", prec > 1)
    case If(c, t, e):
      text = f"if {_render(c, 0)} then {_render(t, 0)} else {_render(e, 0)}"
      return _paren(text, prec > 0)
    case Let(x, bound, body):
      return _paren(f"let {x} = {_render(bound, 0)} in {_render(body, 0)}", prec > 0)
    case RefE(l, init):
      return _paren(f"ref {l} {_render(init, 2)}", prec > 2)
    case Deref(e):
      return _paren(f"!{_render(e, 2)}", prec > 2)
    case Assign(lhs, rhs):
      return _paren(f"{_render(lhs, 1)} := {_render(rhs, 0)}", prec > 0)
    case Ann(e, ann):
      return f"({_render(e, 0)} : {ann})"
  raise TypeError(m)


# Annotation sites: labels that appear inside type annotations (the pc and
# parameter type of a lambda, the type of an ascription), in pre-order.

def _type_sites(a: LType) -> int:
  n = 1
  match a.raw:
    case Ref(inner):
      n += _type_sites(inner)
    case Fun(dom, _, cod):
      n += _type_sites(dom) + 1 + _type_sites(cod)
  return n


def _erode_type(a: LType, i: int) -> LType:
  if i == 0:
    return LType(a.raw, STAR)
  i -= 1
  match a.raw:
    case Ref(inner):
      return LType(Ref(_erode_type(inner, i)), a.label)
    case Fun(dom, pc, cod):
      nd = _type_sites(dom)
      if i < nd:
        return LType(Fun(_erode_type(dom, i), pc, cod), a.label)
      i -= nd
      if i == 0:
        return LType(Fun(dom, STAR, cod), a.label)
      return LType(Fun(dom, pc, _erode_type(cod, i - 1)), a.label)
  raise IndexError(i)


def annotation_sites(m: Term) -> int:
  n = 0
  for t in subterms(m):
    if isinstance(t, Lam):
      n += 1 + _type_sites(t.ann)
    elif isinstance(t, Ann):
      n += _type_sites(t.ann)
  return n


def erode(m: Term, site: int) -> Term:
  """Replace the label at the given annotation site by the unknown label."""
  if not 0 <= site < annotation_sites(m):
    raise IndexError(f"annotation site {site} out of range")
  counter = [site]

  def go(t: Term) -> Term:
    updates = {}
    if isinstance(t, Lam):
      if counter[0] == 0:
        updates["pc"] = STAR
      elif 0 < counter[0] <= _type_sites(t.ann):
        updates["ann"] = _erode_type(t.ann, counter[0] - 1)
      counter[0] -= 1 + _type_sites(t.ann)
    elif isinstance(t, Ann):
      if 0 <= counter[0] < _type_sites(t.ann):
        updates["ann"] = _erode_type(t.ann, counter[0])
      counter[0] -= _type_sites(t.ann)
    for f in fields(t):
      v = getattr(t, f.name)
      if isinstance(v, _TERM_TYPES):
        updates[f.name] = go(v)
    return replace(t, **updates)

  return go(m)


def constructs(m: Term) -> dict[str, int]:
  """Histogram of node kinds."""
  out: dict[str, int] = {}
  for t in subterms(m):
    k = type(t).__name__
    out[k] = out.get(k, 0) + 1
  return out


__all__ = ["Var", "Const", "Lam", "App", "If", "Let", "RefE", "Deref", "Assign", "Ann",
           "Term", "INPUT", "render", "number_blames", "erode", "annotation_sites",
           "subterms", "children", "size", "constructs"]
