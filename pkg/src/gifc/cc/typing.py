"""Checking-mode type system of the cast calculus."""
from __future__ import annotations

from typing import Mapping

from .. import labelexpr as le
from ..coercions import IllTyped
from ..labels import BOOL, HIGH, LOW, STAR, Base, Fun, Label, LType, RawType, Ref, join, label_order, stamp_type
from ..vcoercions import vcoercion_type
from .terms import (Addr, App, AppStar, Assign, AssignQ, Blame, Cast, Const, Deref, DerefStar,
                    If, IfStar, Lam, Let, Prot, RefE, RefQ, Term, Var, is_raw_value)

HeapTyping = Mapping[tuple[Label, int], RawType]


class CCTypeError(Exception):
  def __init__(self, rule: str, message: str):
    super().__init__(f"[{rule}] {message}")
    self.rule = rule


_CONST_TYPES = {"unit": Base("Unit"), "true": BOOL, "false": BOOL}


def _expect(rule: str, cond: bool, message: str) -> None:
  if not cond:
    raise CCTypeError(rule, message)


def _same(rule: str, want: LType, got: LType) -> None:
  _expect(rule, want == got, f"expected {want}, found {got}")


def _specific(rule: str, g: Label) -> Label:
  _expect(rule, g.specific, f"needs a specific label, found {g}")
  return g


def check(m: Term, ctx: Mapping[str, LType], sigma: HeapTyping, g: Label, l: Label,
          a: LType) -> None:
  """Raise CCTypeError unless  ctx; sigma; g; l |- m <= a."""
  match m:
    case Var(x):
      _expect("var", x in ctx, f"unbound variable {x}")
      _same("var", a, ctx[x])
    case Const(k):
      _expect("const", a.raw == _CONST_TYPES[k] and a.label.specific,
              f"${k} does not check at {a}")
    case Addr(cell, n):
      _expect("addr", (cell, n) in sigma, f"unknown address ({cell},{n})")
      _same("addr", LType(Ref(LType(sigma[(cell, n)], cell)), a.label), a)
      _specific("addr", a.label)
    case Lam(x, body):
      _expect("lam", isinstance(a.raw, Fun) and a.label.specific, f"lambda at {a}")
      check(body, {**ctx, x: a.raw.dom}, sigma, a.raw.pc, HIGH, a.raw.cod)
    case Let(x, bound, ty, body):
      check(bound, ctx, sigma, g, l, ty)
      check(body, {**ctx, x: ty}, sigma, g, HIGH, a)
    case App(fun, arg, dom, cod, lf):
      pc = _specific("app", g)
      _specific("app", lf)
      check(fun, ctx, sigma, g, l, LType(Fun(dom, join(pc, lf), cod), lf))
      check(arg, ctx, sigma, g, l, dom)
      _same("app", a, stamp_type(cod, lf))
    case AppStar(fun, arg, dom, cod):
      check(fun, ctx, sigma, g, l, LType(Fun(dom, STAR, LType(cod, STAR)), STAR))
      check(arg, ctx, sigma, g, l, dom)
      _same("app*", a, LType(cod, STAR))
    case If(cond, ty, lc, thn, els):
      pc = _specific("if", g)
      _specific("if", lc)
      check(cond, ctx, sigma, g, l, LType(BOOL, lc))
      check(thn, ctx, sigma, join(pc, lc), HIGH, ty)
      check(els, ctx, sigma, join(pc, lc), HIGH, ty)
      _same("if", a, stamp_type(ty, lc))
    case IfStar(cond, raw, thn, els):
      check(cond, ctx, sigma, g, l, LType(BOOL, STAR))
      check(thn, ctx, sigma, STAR, HIGH, LType(raw, STAR))
      check(els, ctx, sigma, STAR, HIGH, LType(raw, STAR))
      _same("if*", a, LType(raw, STAR))
    case RefE(lr, init):
      pc = _specific("ref", g)
      _specific("ref", lr)
      _expect("ref", isinstance(a.raw, Ref) and a.raw.inner.label is lr and a.label is LOW,
              f"ref {lr} at {a}")
      check(init, ctx, sigma, g, l, a.raw.inner)
      _expect("ref", label_order(pc, lr), f"pc {pc} above cell label {lr}")
    case RefQ(_, lr, init):
      _expect("ref?", g is STAR, f"ref? under pc {g}")
      _specific("ref?", lr)
      _expect("ref?", isinstance(a.raw, Ref) and a.raw.inner.label is lr and a.label is LOW,
              f"ref? {lr} at {a}")
      check(init, ctx, sigma, g, l, a.raw.inner)
    case Deref(e, ty, lr):
      _specific("deref", lr)
      check(e, ctx, sigma, g, l, LType(Ref(ty), lr))
      _same("deref", a, stamp_type(ty, lr))
    case DerefStar(e, raw):
      check(e, ctx, sigma, g, l, LType(Ref(LType(raw, STAR)), STAR))
      _same("deref*", a, LType(raw, STAR))
    case Assign(lhs, rhs, raw, cell, lr):
      pc = _specific("assign", g)
      _specific("assign", cell)
      _specific("assign", lr)
      check(lhs, ctx, sigma, g, l, LType(Ref(LType(raw, cell)), lr))
      check(rhs, ctx, sigma, g, l, LType(raw, cell))
      _expect("assign", label_order(join(pc, lr), cell),
              f"pc {pc} joined with {lr} is above cell label {cell}")
      _same("assign", a, LType(Base("Unit"), LOW))
    case AssignQ(_, lhs, rhs, raw, cell):
      check(lhs, ctx, sigma, g, l, LType(Ref(LType(raw, cell)), STAR))
      check(rhs, ctx, sigma, g, l, LType(raw, cell))
      _same("assign?", a, LType(Base("Unit"), LOW))
    case Prot(pc, lp, body, ty):
      _specific("prot", lp)
      _expect("prot", le.is_nf_expr(pc), f"pc {pc} is not a normal form")
      try:
        g2 = le.expr_type(pc)
      except IllTyped as err:
        raise CCTypeError("prot", str(err)) from None
      sec = le.security_pc(pc)
      check(body, ctx, sigma, g2, sec, ty)
      _expect("prot", label_order(join(l, lp), sec),
              f"{l} joined with {lp} is above the pc security {sec}")
      _same("prot", a, stamp_type(ty, lp))
    case Cast(e, c):
      try:
        src, tgt = vcoercion_type(c)
      except IllTyped as err:
        raise CCTypeError("cast", str(err)) from None
      check(e, ctx, sigma, g, l, src)
      _same("cast", a, tgt)
    case Blame():
      pass
    case _:
      raise CCTypeError("syntax", f"not a term: {m!r}")


def check_heap(heap: Mapping[tuple[Label, int], Term], sigma: HeapTyping) -> None:
  for key, raw in sigma.items():
    _expect("heap", key in heap, f"no cell for {key}")
    check(heap[key], {}, sigma, LOW, LOW, LType(raw, key[0]))


def check_value(v: Term, sigma: HeapTyping, a: LType) -> None:
  check(v, {}, sigma, LOW, LOW, a)
  _expect("value", is_raw_value(v) or isinstance(v, Cast), f"not a value: {v}")
