"""Declarative type system of the surface language and term precision."""
from __future__ import annotations

from typing import Mapping

from ..labels import (BOOL, LOW, UNIT, Fun, Label, LType, Ref, consistent_join,
                      label_cjoin, label_csub, precision, stamp_type, type_csub)
from .syntax import INPUT, Ann, App, Assign, Const, Deref, If, Lam, Let, RefE, Span, Term, Var

Context = Mapping[str, LType]

INPUT_TYPE = LType(BOOL, Label.HIGH)


class SurfaceTypeError(Exception):
  def __init__(self, span: Span, rule: str, message: str):
    super().__init__(f"{span[0]}:{span[1]}: type error [{rule}]: {message}")
    self.span = span
    self.rule = rule
    self.message = message


_CONSTS = {"unit": UNIT, "true": BOOL, "false": BOOL}


def _fail(m: Term, rule: str, message: str):
  raise SurfaceTypeError(m.span, rule, message)


def typecheck_surface(m: Term, ctx: Context, pc: Label = LOW) -> LType:
  """The type of m under ctx and pc, or SurfaceTypeError."""
  match m:
    case Var(x):
      if x not in ctx:
        _fail(m, "var", f"unbound variable {x}")
      return ctx[x]
    case Const(k, l):
      return LType(_CONSTS[k], l)
    case Lam(g, x, ann, body, l):
      cod = typecheck_surface(body, {**ctx, x: ann}, g)
      return LType(Fun(ann, g, cod), l)
    case App(fun, arg):
      tf = typecheck_surface(fun, ctx, pc)
      ta = typecheck_surface(arg, ctx, pc)
      if not isinstance(tf.raw, Fun):
        _fail(m, "app", f"applying a non-function of type {tf}")
      f = tf.raw
      if not type_csub(ta, f.dom):
        _fail(m, "app", f"argument type {ta} is not consistent with {f.dom}")
      if not label_csub(pc, f.pc):
        _fail(m, "app", f"pc {pc} is not consistent with the function's pc {f.pc}")
      if not label_csub(tf.label, f.pc):
        _fail(m, "app", f"function label {tf.label} is not consistent with its pc {f.pc}")
      return stamp_type(f.cod, tf.label)
    case If(c, thn, els):
      tc = typecheck_surface(c, ctx, pc)
      if tc.raw != BOOL:
        _fail(m, "if", f"condition has type {tc}")
      inner = label_cjoin(pc, tc.label)
      ta = typecheck_surface(thn, ctx, inner)
      tb = typecheck_surface(els, ctx, inner)
      joined = consistent_join(ta, tb)
      if joined is None:
        _fail(m, "if", f"branch types {ta} and {tb} have no join")
      return stamp_type(joined, tc.label)
    case Let(x, bound, body):
      tb = typecheck_surface(bound, ctx, pc)
      return typecheck_surface(body, {**ctx, x: tb}, pc)
    case RefE(l, init):
      ti = typecheck_surface(init, ctx, pc)
      cell = LType(ti.raw, l)
      if not type_csub(ti, cell):
        _fail(m, "ref", f"initializer type {ti} is not consistent with {cell}")
      if not label_csub(pc, l):
        _fail(m, "ref", f"pc {pc} is not consistent with cell label {l}")
      return LType(Ref(cell), LOW)
    case Deref(e):
      te = typecheck_surface(e, ctx, pc)
      if not isinstance(te.raw, Ref):
        _fail(m, "deref", f"dereferencing a non-reference of type {te}")
      return stamp_type(te.raw.inner, te.label)
    case Assign(lhs, rhs):
      tl = typecheck_surface(lhs, ctx, pc)
      tr = typecheck_surface(rhs, ctx, pc)
      if not isinstance(tl.raw, Ref):
        _fail(m, "assign", f"assigning to a non-reference of type {tl}")
      cell = tl.raw.inner
      if not type_csub(tr, cell):
        _fail(m, "assign", f"value type {tr} is not consistent with {cell}")
      if not label_csub(pc, cell.label):
        _fail(m, "assign", f"pc {pc} is not consistent with cell label {cell.label}")
      if not label_csub(tl.label, cell.label):
        _fail(m, "assign", f"reference label {tl.label} is not consistent with cell label {cell.label}")
      return LType(UNIT, LOW)
    case Ann(e, ann):
      te = typecheck_surface(e, ctx, pc)
      if not type_csub(te, ann):
        _fail(m, "ann", f"{te} is not consistent with {ann}")
      return ann
  raise TypeError(m)


def default_context() -> dict[str, LType]:
  return {INPUT: INPUT_TYPE}


def surface_precision(m1: Term, m2: Term) -> bool:
  """M1 ⊑ M2: same shape, annotations related by precision, runtime labels equal."""
  match m1, m2:
    case Var(x), Var(y):
      return x == y
    case Const(k1, l1), Const(k2, l2):
      return k1 == k2 and l1 is l2
    case Lam(g1, x1, a1, b1, l1), Lam(g2, x2, a2, b2, l2):
      return (x1 == x2 and l1 is l2 and precision(g1, g2) and precision(a1, a2)
              and surface_precision(b1, b2))
    case App(f1, a1), App(f2, a2):
      return surface_precision(f1, f2) and surface_precision(a1, a2)
    case If(c1, t1, e1), If(c2, t2, e2):
      return all(map(surface_precision, (c1, t1, e1), (c2, t2, e2)))
    case Let(x1, b1, n1), Let(x2, b2, n2):
      return x1 == x2 and surface_precision(b1, b2) and surface_precision(n1, n2)
    case RefE(l1, i1), RefE(l2, i2):
      return l1 is l2 and surface_precision(i1, i2)
    case Deref(e1), Deref(e2):
      return surface_precision(e1, e2)
    case Assign(l1, r1), Assign(l2, r2):
      return surface_precision(l1, l2) and surface_precision(r1, r2)
    case Ann(e1, a1), Ann(e2, a2):
      return precision(a1, a2) and surface_precision(e1, e2)
  return False


__all__ = ["typecheck_surface", "surface_precision", "SurfaceTypeError", "default_context",
           "INPUT_TYPE"]
