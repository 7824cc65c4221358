"""Security labels, labeled types and the operators over them."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Union


class Label(Enum):
  LOW = "low"
  HIGH = "high"
  STAR = "*"

  @property
  def specific(self) -> bool:
    return self is not Label.STAR

  def __str__(self) -> str:
    return self.value


LOW, HIGH, STAR = Label.LOW, Label.HIGH, Label.STAR
SPECIFIC = (LOW, HIGH)
ALL_LABELS = (LOW, HIGH, STAR)


@dataclass(frozen=True)
class Base:
  name: str  # "Unit" or "Bool"

  def __str__(self) -> str:
    return self.name


UNIT = Base("Unit")
BOOL = Base("Bool")


@dataclass(frozen=True)
class Ref:
  inner: LType

  def __str__(self) -> str:
    return f"Ref {self.inner}"


@dataclass(frozen=True)
class Fun:
  dom: LType
  pc: Label
  cod: LType

  def __str__(self) -> str:
    return f"({self.dom} -[{self.pc}]-> {self.cod})"


RawType = Union[Base, Ref, Fun]


@dataclass(frozen=True)
class LType:
  raw: RawType
  label: Label

  def __str__(self) -> str:
    sep = " @ " if isinstance(self.raw, Ref) else "@"
    return f"{self.raw}{sep}{self.label}"


def ltype(raw: RawType, label: Label) -> LType:
  return LType(raw, label)


# Lattice on specific labels.

def _need_specific(*ls: Label) -> None:
  for l in ls:
    if not l.specific:
      raise ValueError("lattice operation on the unknown label")


def label_order(l1: Label, l2: Label) -> bool:
  _need_specific(l1, l2)
  return l1 is LOW or l2 is HIGH


def join(l1: Label, l2: Label) -> Label:
  _need_specific(l1, l2)
  return HIGH if HIGH in (l1, l2) else LOW


def meet(l1: Label, l2: Label) -> Label:
  _need_specific(l1, l2)
  return LOW if LOW in (l1, l2) else HIGH


# Precision.

def label_precision(g1: Label, g2: Label) -> bool:
  return g1 is STAR or g1 is g2


def raw_precision(t: RawType, s: RawType) -> bool:
  match t, s:
    case Base(), Base():
      return t == s
    case Ref(a), Ref(b):
      return type_precision(a, b)
    case Fun(a, g1, b), Fun(c, g2, d):
      return (label_precision(g1, g2) and type_precision(a, c)
              and type_precision(b, d))
  return False


def type_precision(a: LType, b: LType) -> bool:
  return label_precision(a.label, b.label) and raw_precision(a.raw, b.raw)


def precision(x, y) -> bool:
  if isinstance(x, Label):
    return label_precision(x, y)
  if isinstance(x, LType):
    return type_precision(x, y)
  return raw_precision(x, y)


# Consistent subtyping.

def label_csub(g1: Label, g2: Label) -> bool:
  if g1 is STAR or g2 is STAR:
    return True
  return label_order(g1, g2)


def raw_csub(t: RawType, s: RawType) -> bool:
  match t, s:
    case Base(), Base():
      return t == s
    case Ref(a), Ref(b):
      return type_csub(a, b) and type_csub(b, a)
    case Fun(a, g1, b), Fun(c, g2, d):
      return label_csub(g2, g1) and type_csub(c, a) and type_csub(b, d)
  return False


def type_csub(a: LType, b: LType) -> bool:
  return label_csub(a.label, b.label) and raw_csub(a.raw, b.raw)


def consistent_subtype(x, y) -> bool:
  if isinstance(x, Label):
    return label_csub(x, y)
  if isinstance(x, LType):
    return type_csub(x, y)
  return raw_csub(x, y)


# Joins and meets. Partial operators return None when undefined.

def label_pjoin(g1: Label, g2: Label) -> Label | None:
  if g1 is STAR:
    return g2
  if g2 is STAR or g1 is g2:
    return g1
  return None


def label_cjoin(g1: Label, g2: Label) -> Label:
  if STAR in (g1, g2):
    return STAR
  return join(g1, g2)


def label_cmeet(g1: Label, g2: Label) -> Label:
  if STAR in (g1, g2):
    return STAR
  return meet(g1, g2)


def _lift(op_raw, op_label):
  def op(a: LType, b: LType) -> LType | None:
    raw = op_raw(a.raw, b.raw)
    label = op_label(a.label, b.label)
    if raw is None or label is None:
      return None
    return LType(raw, label)
  return op


def raw_pjoin(t: RawType, s: RawType) -> RawType | None:
  match t, s:
    case Base(), Base():
      return t if t == s else None
    case Ref(a), Ref(b):
      inner = type_pjoin(a, b)
      return None if inner is None else Ref(inner)
    case Fun(a, g1, b), Fun(c, g2, d):
      dom, pc, cod = type_pjoin(a, c), label_pjoin(g1, g2), type_pjoin(b, d)
      if None in (dom, pc, cod):
        return None
      return Fun(dom, pc, cod)
  return None


def raw_cjoin(t: RawType, s: RawType) -> RawType | None:
  match t, s:
    case Base(), Base():
      return t if t == s else None
    case Ref(a), Ref(b):
      inner = type_pjoin(a, b)
      return None if inner is None else Ref(inner)
    case Fun(a, g1, b), Fun(c, g2, d):
      dom, cod = type_cmeet(a, c), type_cjoin(b, d)
      if dom is None or cod is None:
        return None
      return Fun(dom, label_cmeet(g1, g2), cod)
  return None


def raw_cmeet(t: RawType, s: RawType) -> RawType | None:
  match t, s:
    case Base(), Base():
      return t if t == s else None
    case Ref(a), Ref(b):
      inner = type_pjoin(a, b)
      return None if inner is None else Ref(inner)
    case Fun(a, g1, b), Fun(c, g2, d):
      dom, cod = type_cjoin(a, c), type_cmeet(b, d)
      if dom is None or cod is None:
        return None
      return Fun(dom, label_cjoin(g1, g2), cod)
  return None


type_pjoin = _lift(raw_pjoin, label_pjoin)
type_cjoin = _lift(raw_cjoin, label_cjoin)
type_cmeet = _lift(raw_cmeet, label_cmeet)


def _dispatch(on_label, on_type, on_raw):
  def op(x, y):
    if isinstance(x, Label):
      return on_label(x, y)
    if isinstance(x, LType):
      return on_type(x, y)
    return on_raw(x, y)
  return op


precision_join = _dispatch(label_pjoin, type_pjoin, raw_pjoin)
consistent_join = _dispatch(label_cjoin, type_cjoin, raw_cjoin)
consistent_meet = _dispatch(label_cmeet, type_cmeet, raw_cmeet)


def stamp_type(a: LType, l: Label) -> LType:
  return LType(a.raw, label_cjoin(a.label, l))


def enumerate_types(depth: int = 2) -> list[LType]:
  """All labeled types up to the given nesting depth (base types are depth 1)."""
  raws: list[RawType] = [UNIT, BOOL]
  layer = [LType(r, g) for r in raws for g in ALL_LABELS]
  for _ in range(depth - 1):
    base = [LType(r, g) for r in (UNIT, BOOL) for g in ALL_LABELS]
    raws = [UNIT, BOOL] + [Ref(a) for a in layer]
    raws += [Fun(a, g, b) for a in base for g in ALL_LABELS for b in base]
    layer = [LType(r, g) for r in raws for g in ALL_LABELS]
  return layer
