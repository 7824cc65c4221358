"""Coercions on values: a raw coercion paired with a label sequence."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from . import coercions as co
from .coercions import IllTyped, Seq
from .labels import HIGH, LOW, Base, Fun, Label, LType, RawType, Ref, raw_csub
from .cc.terms import Blame, Cast, Term, is_raw_value


@dataclass(frozen=True)
class IdBase:
  base: Base

  def __str__(self) -> str:
    return f"id({self.base})"


@dataclass(frozen=True)
class RefC:
  write: VCoercion
  read: VCoercion

  def __str__(self) -> str:
    return f"Ref({self.write}, {self.read})"


@dataclass(frozen=True)
class FunC:
  pc: Seq
  dom: VCoercion
  cod: VCoercion

  def __str__(self) -> str:
    return f"Fun({self.pc}, {self.dom} -> {self.cod})"


RawCoercion = Union[IdBase, RefC, FunC]


@dataclass(frozen=True)
class VCoercion:
  raw: RawCoercion
  seq: Seq

  def __str__(self) -> str:
    return f"<{self.raw}, {self.seq}>"


@lru_cache(maxsize=None)
def raw_coercion_type(c: RawCoercion) -> tuple[RawType, RawType]:
  match c:
    case IdBase(b):
      return b, b
    case RefC(w, r):
      a, b = vcoercion_type(r)
      b2, a2 = vcoercion_type(w)
      if a != a2 or b != b2:
        raise IllTyped(f"reference coercion {c} has mismatched sides")
      return Ref(a), Ref(b)
    case FunC(pc, dom, cod):
      g4, g3 = co.seq_type(pc)
      c_src, a = vcoercion_type(dom)
      b, d_tgt = vcoercion_type(cod)
      return Fun(a, g3, b), Fun(c_src, g4, d_tgt)
  raise TypeError(c)


@lru_cache(maxsize=None)
def vcoercion_type(c: VCoercion) -> tuple[LType, LType]:
  s, t = raw_coercion_type(c.raw)
  g1, g2 = co.seq_type(c.seq)
  return LType(s, g1), LType(t, g2)


def coerce_id(t: RawType | LType):
  if isinstance(t, LType):
    return VCoercion(coerce_id(t.raw), co.ident(t.label))
  match t:
    case Base():
      return IdBase(t)
    case Ref(a):
      return RefC(coerce_id(a), coerce_id(a))
    case Fun(a, g, b):
      return FunC(co.ident(g), coerce_id(a), coerce_id(b))
  raise TypeError(t)


def coerce_type(a: LType, b: LType, p: str) -> VCoercion:
  return VCoercion(_coerce_raw(a.raw, b.raw, p), co.coerce_label(a.label, b.label, p))


def _coerce_raw(t: RawType, s: RawType, p: str) -> RawCoercion:
  if not raw_csub(t, s):
    raise ValueError(f"{t} is not consistent with {s}")
  match t, s:
    case Base(), Base():
      return IdBase(t)
    case Ref(a), Ref(b):
      return RefC(coerce_type(b, a, p), coerce_type(a, b, p))
    case Fun(a, g3, b), Fun(c, g4, d):
      return FunC(co.coerce_label(g4, g3, p), coerce_type(c, a, p), coerce_type(b, d, p))
  raise AssertionError((t, s))


def is_identity(c: VCoercion) -> bool:
  return c == coerce_id(vcoercion_type(c)[0])


def compose_v(c: VCoercion, d: VCoercion) -> VCoercion:
  return VCoercion(_compose_raw(c.raw, d.raw), co.compose(c.seq, d.seq))


def _compose_raw(c: RawCoercion, d: RawCoercion) -> RawCoercion:
  match c, d:
    case IdBase(b1), IdBase(b2) if b1 == b2:
      return c
    case RefC(c1, c2), RefC(d1, d2):
      return RefC(compose_v(d1, c1), compose_v(c2, d2))
    case FunC(cpc, c1, c2), FunC(dpc, d1, d2):
      return FunC(co.compose(dpc, cpc), compose_v(d1, c1), compose_v(c2, d2))
  raise IllTyped(f"cannot compose {c} with {d}")


def is_irreducible_v(c: VCoercion) -> bool:
  if isinstance(c.raw, IdBase):
    return co.is_irreducible(c.seq)
  return co.is_nf(c.seq)


# Application to values. A value is a raw value or a raw value wrapped in a
# Cast whose coercion is irreducible.

def cast_step(v: Term, c: VCoercion) -> tuple[Term, str]:
  """One rule application for V<c> where V is a value and V<c> is not."""
  if isinstance(v, Cast):
    return Cast(v.e, compose_v(v.c, c)), "cast-comp"
  nf = co.normalize(c.seq)
  if nf.is_bot:
    return Blame(nf.head.blame), "cast-blame"
  if nf != c.seq:
    return Cast(v, VCoercion(c.raw, nf)), "cast"
  if isinstance(c.raw, IdBase) and not nf.tail:
    return v, "cast-id"
  raise ValueError(f"no cast rule applies to {v} with {c}")


def apply_cast(v: Term, c: VCoercion) -> Term:
  """Cast a value; the result is a value or Blame."""
  while True:
    if isinstance(v, Cast):
      v, c = v.e, compose_v(v.c, c)
      continue
    assert is_raw_value(v), v
    nf = co.normalize(c.seq)
    if nf.is_bot:
      return Blame(nf.head.blame)
    if isinstance(c.raw, IdBase) and not nf.tail:
      return v
    return Cast(v, VCoercion(c.raw, nf))


def stamp_val(v: Term, a: LType, l: Label) -> Term:
  if not l.specific:
    raise ValueError("stamp by the unknown label")
  if l is LOW:
    return v
  if isinstance(v, Cast):
    return Cast(v.e, VCoercion(v.c.raw, co.stamp_seq(v.c.seq, l)))
  if a.label is HIGH:
    return v
  if a.label is LOW:
    return Cast(v, VCoercion(coerce_id(a.raw), co.stamp_seq(co.ident(LOW), HIGH)))
  raise ValueError(f"raw value at type {a}")
