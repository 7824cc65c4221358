"""Label expressions: the runtime program counter."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from . import coercions as co
from .coercions import IllTyped, Seq
from .labels import HIGH, LOW, Label


@dataclass(frozen=True)
class Lit:
  label: Label

  def __str__(self) -> str:
    return str(self.label)


@dataclass(frozen=True)
class Apply:
  base: LabelExpr
  seq: Seq

  def __str__(self) -> str:
    return f"{self.base}<{self.seq}>"


@dataclass(frozen=True)
class BlameE:
  blame: str

  def __str__(self) -> str:
    return f"blame {self.blame}"


LabelExpr = Union[Lit, Apply, BlameE]


def expr_type(e: LabelExpr) -> Label | None:
  """The label an expression checks against; None for blame, which checks at any."""
  match e:
    case Lit(l):
      return l
    case Apply(base, s):
      src, tgt = co.seq_type(s)
      bt = expr_type(base)
      if bt is not None and bt is not src:
        raise IllTyped(f"{s} applied to expression of type {bt}")
      return tgt
  return None


def is_nf_expr(e: LabelExpr) -> bool:
  match e:
    case Lit(l):
      return l.specific
    case Apply(Lit(l), s):
      return l.specific and co.is_irreducible(s) and s.head.label is l
  return False


def step_expr(e: LabelExpr) -> tuple[LabelExpr, str] | None:
  if not isinstance(e, Apply):
    return None
  base, d = e.base, e.seq
  if isinstance(base, BlameE):
    return base, "xi-blame"
  if not is_nf_expr(base):
    inner = step_expr(base)
    if inner is None:
      return None
    return Apply(inner[0], d), "xi"
  if isinstance(base, Apply):
    return Apply(base.base, co.compose(base.seq, d)), "lcomp"
  r = co.step_seq(d)
  if r is not None:
    return Apply(base, r[0]), "lcast"
  if d.is_bot:
    return BlameE(d.head.blame), "lblame"
  if not d.tail:
    return base, "beta-id"
  return None


def normalize_expr(e: LabelExpr) -> LabelExpr:
  expr_type(e)
  while (r := step_expr(e)) is not None:
    e = r[0]
  return e


def _need_nf(e: LabelExpr) -> None:
  if not is_nf_expr(e):
    raise ValueError(f"label expression not in normal form: {e}")


def stamp_pc(e: LabelExpr, l: Label) -> LabelExpr:
  _need_nf(e)
  match e:
    case Lit(base):
      if l is LOW or base is HIGH:
        return e
      return Apply(e, co.stamp_seq(co.ident(LOW), HIGH))
    case Apply(base, s):
      return Apply(base, co.stamp_seq(s, l))
  raise AssertionError(e)


def stamp_bang_pc(e: LabelExpr, l: Label) -> LabelExpr:
  _need_nf(e)
  match e:
    case Lit(base):
      return Apply(e, co.stamp_bang_seq(co.ident(base), l))
    case Apply(base, s):
      return Apply(base, co.stamp_bang_seq(s, l))
  raise AssertionError(e)


def security_pc(e: LabelExpr) -> Label:
  _need_nf(e)
  if isinstance(e, Lit):
    return e.label
  return co.security(e.seq)
