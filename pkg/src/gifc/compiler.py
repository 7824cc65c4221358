"""Cast insertion from the surface language into the cast calculus."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .cc import terms as cc
from .labels import BOOL, LOW, STAR, UNIT, Fun, Label, LType, Ref, consistent_join, join, label_cjoin, stamp_type
from .surface import syntax as s
from .surface.checker import typecheck_surface
from .vcoercions import coerce_type


@dataclass(frozen=True)
class CompileOutput:
  term: cc.Term
  type: LType


def _cast(m: cc.Term, a: LType, b: LType, p: str) -> cc.Term:
  if a == b:
    return m
  return cc.Cast(m, coerce_type(a, b, p))


def compile_term(m: s.Term, ctx: Mapping[str, LType], g: Label = LOW) -> CompileOutput:
  expected = typecheck_surface(m, ctx, g)
  term, ty = _compile(m, dict(ctx), g)
  assert ty == expected, (ty, expected)
  return CompileOutput(term, ty)


def _compile(m: s.Term, ctx: dict, g: Label) -> tuple[cc.Term, LType]:
  match m:
    case s.Var(x):
      return cc.Var(x), ctx[x]
    case s.Const(k, l):
      return cc.Const(k), LType(UNIT if k == "unit" else BOOL, l)
    case s.Lam(pc, x, ann, body, l):
      body2, cod = _compile(body, {**ctx, x: ann}, pc)
      return cc.Lam(x, body2), LType(Fun(ann, pc, cod), l)
    case s.App(fun, arg, p):
      f2, tf = _compile(fun, ctx, g)
      a2, ta = _compile(arg, ctx, g)
      ft: Fun = tf.raw
      arg3 = _cast(a2, ta, ft.dom, p)
      result = stamp_type(ft.cod, tf.label)
      if g.specific and tf.label.specific:
        target = LType(Fun(ft.dom, join(g, tf.label), ft.cod), tf.label)
        return cc.App(_cast(f2, tf, target, p), arg3, ft.dom, ft.cod, tf.label), result
      cod = ft.cod.raw
      target = LType(Fun(ft.dom, STAR, LType(cod, STAR)), STAR)
      app = cc.AppStar(_cast(f2, tf, target, p), arg3, ft.dom, cod)
      return _cast(app, LType(cod, STAR), result, p), result
    case s.If(cond, thn, els, p):
      c2, tc = _compile(cond, ctx, g)
      inner = label_cjoin(g, tc.label)
      t2, ta = _compile(thn, ctx, inner)
      e2, tb = _compile(els, ctx, inner)
      joined = consistent_join(ta, tb)
      result = stamp_type(joined, tc.label)
      if g.specific and tc.label.specific:
        return cc.If(c2, joined, tc.label, _cast(t2, ta, joined, p), _cast(e2, tb, joined, p)), result
      star = LType(joined.raw, STAR)
      c3 = _cast(c2, tc, LType(BOOL, STAR), p)
      node = cc.IfStar(c3, joined.raw, _cast(t2, ta, star, p), _cast(e2, tb, star, p))
      return _cast(node, star, result, p), result
    case s.Let(x, bound, body):
      b2, tb = _compile(bound, ctx, g)
      n2, tn = _compile(body, {**ctx, x: tb}, g)
      return cc.Let(x, b2, tb, n2), tn
    case s.RefE(l, init, p):
      i2, ti = _compile(init, ctx, g)
      cell = LType(ti.raw, l)
      i3 = _cast(i2, ti, cell, p)
      ty = LType(Ref(cell), LOW)
      if g.specific:
        return cc.RefE(l, i3, ti.raw), ty
      return cc.RefQ(p, l, i3, ti.raw), ty
    case s.Deref(e, p):
      e2, te = _compile(e, ctx, g)
      inner = te.raw.inner
      if te.label.specific:
        return cc.Deref(e2, inner, te.label), stamp_type(inner, te.label)
      star = LType(inner.raw, STAR)
      e3 = _cast(e2, te, LType(Ref(star), STAR), p)
      return cc.DerefStar(e3, inner.raw), star
    case s.Assign(lhs, rhs, p):
      l2, tl = _compile(lhs, ctx, g)
      r2, tr = _compile(rhs, ctx, g)
      cell = tl.raw.inner
      r3 = _cast(r2, tr, cell, p)
      unit = LType(UNIT, LOW)
      if g.specific and tl.label.specific and cell.label.specific:
        return cc.Assign(l2, r3, cell.raw, cell.label, tl.label), unit
      l3 = _cast(l2, tl, LType(tl.raw, STAR), p)
      return cc.AssignQ(p, l3, r3, cell.raw, cell.label), unit
    case s.Ann(e, ann, p):
      e2, te = _compile(e, ctx, g)
      return _cast(e2, te, ann, p), ann
  raise TypeError(m)


__all__ = ["compile_term", "CompileOutput"]
