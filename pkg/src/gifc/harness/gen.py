"""Type-directed random generation of well-typed surface programs."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

from ..labels import (BOOL, HIGH, LOW, SPECIFIC, STAR, UNIT, Base, Fun, Label, LType, Ref,
                      RawType, label_cjoin, label_csub, type_csub)
from ..surface.checker import INPUT_TYPE, SurfaceTypeError, typecheck_surface
from ..surface.syntax import (INPUT, Ann, App, Assign, Const, Deref, If, Lam, Let, RefE, Term,
                              Var, number_blames)


@dataclass(frozen=True)
class GenConfig:
  seed: int = 1
  count: int = 100
  max_depth: int = 6
  heap_ops: bool = True
  star_bias: float = 0.4


def rng_for(seed: int, index: int, salt: str = "") -> random.Random:
  """Independent stream per program, so any single case can be replayed."""
  return random.Random(f"{salt}:{seed}:{index}")


def _type_of(m: Term, ctx: Mapping[str, LType], pc: Label) -> LType | None:
  try:
    return typecheck_surface(m, ctx, pc)
  except SurfaceTypeError:
    return None


def shape(a: LType | RawType):
  """The type with every label forgotten."""
  if isinstance(a, LType):
    return shape(a.raw)
  match a:
    case Ref(inner):
      return ("ref", shape(inner))
    case Fun(dom, _, cod):
      return ("fun", shape(dom), shape(cod))
  return a


def all_star(a: LType) -> LType:
  match a.raw:
    case Ref(inner):
      raw = Ref(all_star(inner))
    case Fun(dom, _, cod):
      raw = Fun(all_star(dom), STAR, all_star(cod))
    case raw:
      pass
  return LType(raw, STAR)


class Generator:
  def __init__(self, cfg: GenConfig, rng: random.Random):
    self.cfg = cfg
    self.rng = rng
    self.fresh = 0

  # labels and types

  def site_label(self) -> Label:
    if self.rng.random() < self.cfg.star_bias:
      return STAR
    return self.rng.choice(SPECIFIC)

  def below(self, g: Label) -> Label:
    """A specific label consistent-subtype of g."""
    return self.rng.choice([l for l in SPECIFIC if label_csub(l, g)])

  def random_type(self, depth: int = 2) -> LType:
    kinds = ["bool", "bool", "bool", "unit"]
    if depth > 1:
      kinds += ["fun"] + (["ref", "ref"] if self.cfg.heap_ops else [])
    match self.rng.choice(kinds):
      case "bool":
        raw = BOOL
      case "unit":
        raw = UNIT
      case "ref":
        raw = Ref(self.random_type(depth - 1))
      case _:
        raw = Fun(self.random_type(depth - 1), self.site_label(), self.random_type(depth - 1))
    return LType(raw, self.site_label())

  def loosen(self, a: LType) -> LType:
    """A random type that is a consistent subtype of a with the same shape."""
    def lab(g: Label) -> Label:
      if g is STAR:
        return self.site_label()
      return STAR if self.rng.random() < self.cfg.star_bias else g
    match a.raw:
      case Ref(inner):
        raw = Ref(self.loosen(inner))
      case Fun(dom, pc, cod):
        raw = Fun(self.loosen(dom), lab(pc), self.loosen(cod))
      case raw:
        pass
    out = LType(raw, lab(a.label))
    return out if type_csub(out, a) else a

  def name(self) -> str:
    self.fresh += 1
    return f"x{self.fresh}"

  # terms

  def fit(self, m: Term | None, ctx, pc: Label, goal: LType) -> Term | None:
    """m itself when its type is below goal, else a double ascription through the unknown label."""
    if m is None:
      return None
    t = _type_of(m, ctx, pc)
    if t is None:
      return None
    if type_csub(t, goal):
      return m
    if shape(t) == shape(goal):
      return Ann(Ann(m, all_star(t)), goal)
    return None

  def exact(self, m: Term, ctx, pc: Label, goal: LType) -> Term:
    t = _type_of(m, ctx, pc)
    return m if t == goal else Ann(m, goal)

  def gen(self, ctx: dict, pc: Label, goal: LType, depth: int) -> Term | None:
    """A term whose type is a consistent subtype of goal, or None."""
    for _ in range(4):
      if depth <= 0 or self.rng.random() < 0.3:
        m = self.base(ctx, pc, goal, depth)
      else:
        m = self.compound(ctx, pc, goal, depth)
      m = self.fit(m, ctx, pc, goal)
      if m is not None:
        return m
    return self.fit(self.base(ctx, pc, goal, 0), ctx, pc, goal)

  def base(self, ctx: dict, pc: Label, goal: LType, depth: int) -> Term | None:
    vars_ = [x for x, t in ctx.items() if type_csub(t, goal)]
    prefer_var = 0.6 if isinstance(goal.raw, Ref) or INPUT in vars_ else 0.35
    if vars_ and self.rng.random() < prefer_var:
      return Var(self.rng.choice(vars_))
    match goal.raw:
      case Base(name):
        k = "unit" if name == "Unit" else self.rng.choice(("true", "false"))
        return Const(k, self.below(goal.label))
      case Fun(dom, fpc, cod):
        pc2 = fpc if fpc is STAR else self.rng.choice(
          [g for g in (STAR, LOW, HIGH) if label_csub(fpc, g)])
        dom2 = LType(dom.raw, STAR) if self.rng.random() < self.cfg.star_bias else dom
        x = self.name()
        body = self.gen({**ctx, x: dom2}, pc2, cod, depth - 1)
        if body is None:
          return None
        return Lam(pc2, x, dom2, body, self.below(goal.label))
      case Ref(inner):
        cells = [l for l in SPECIFIC if label_csub(pc, l)
                 and (inner.label is STAR or inner.label is l)]
        if not cells:
          return Var(self.rng.choice(vars_)) if vars_ else None
        cell = self.rng.choice(cells)
        target = LType(inner.raw, cell)
        init = self.gen(ctx, pc, target, depth - 1)
        if init is None:
          return None
        return RefE(cell, self.exact(init, ctx, pc, target))
    return None

  def compound(self, ctx: dict, pc: Label, goal: LType, depth: int) -> Term | None:
    kinds = ["if", "if", "let", "app", "app", "ann"]
    if self.cfg.heap_ops:
      kinds += ["deref", "assign", "letref"]
    d = depth - 1
    match self.rng.choice(kinds):
      case "if":
        c = self.gen(ctx, pc, LType(BOOL, self.cond_label(goal.label)), d)
        tc = c and _type_of(c, ctx, pc)
        if tc is None:
          return None
        inner = label_cjoin(pc, tc.label)
        thn = self.gen(ctx, inner, goal, d)
        els = self.gen(ctx, inner, goal, d)
        if thn is None or els is None:
          return None
        return If(c, thn, els)
      case "let":
        bound_ty = self.random_type()
        return self.let(ctx, pc, goal, bound_ty, d)
      case "letref":
        return self.let(ctx, pc, goal, LType(Ref(self.random_type(1)), self.site_label()), d)
      case "app":
        fl = self.cond_label(goal.label)
        opts = [g for g in SPECIFIC if label_csub(pc, g) and label_csub(fl, g)] + [STAR]
        fty = LType(Fun(self.random_type(), self.rng.choice(opts), goal), fl)
        f = self.gen(ctx, pc, fty, d)
        tf = f and _type_of(f, ctx, pc)
        if tf is None:
          return None
        a = self.gen(ctx, pc, tf.raw.dom, d)
        return None if a is None else App(f, a)
      case "ann":
        mid = self.loosen(goal)
        m = self.gen(ctx, pc, mid, d)
        return None if m is None else Ann(m, mid)
      case "deref":
        rty = LType(Ref(LType(goal.raw, self.cond_label(goal.label))), self.cond_label(goal.label))
        r = self.gen(ctx, pc, rty, d)
        return None if r is None else Deref(r)
      case "assign":
        cell = self.rng.choice([g for g in (LOW, HIGH, STAR) if label_csub(pc, g)])
        rl = self.rng.choice([g for g in (LOW, HIGH, STAR) if label_csub(g, cell)])
        r = self.gen(ctx, pc, LType(Ref(LType(self.random_type(1).raw, cell)), rl), d)
        tr = r and _type_of(r, ctx, pc)
        if tr is None:
          return None
        v = self.gen(ctx, pc, tr.raw.inner, d)
        if v is None:
          return None
        write = Assign(r, v)
        if goal.raw == UNIT and self.rng.random() < 0.5:
          return write
        body = self.gen(ctx, pc, goal, d)
        return None if body is None else Let(self.name(), write, body)
    return None

  def cond_label(self, g: Label) -> Label:
    """A label for a guard or function whose stamp stays below g."""
    if g is STAR:
      return self.site_label()
    return STAR if self.rng.random() < self.cfg.star_bias else self.below(g)

  def let(self, ctx, pc, goal, bound_ty, d) -> Term | None:
    bound = self.gen(ctx, pc, bound_ty, d)
    tb = bound and _type_of(bound, ctx, pc)
    if tb is None:
      return None
    x = self.name()
    body = self.gen({**ctx, x: tb}, pc, goal, d)
    return None if body is None else Let(x, bound, body)


def gen_program(cfg: GenConfig, rng: random.Random, goal: LType,
                ctx: Mapping[str, LType] | None = None) -> Term | None:
  """A closed (up to ctx) well-typed program of exactly the goal type."""
  ctx = dict(ctx or {})
  g = Generator(cfg, rng)
  for _ in range(20):
    m = g.gen(ctx, LOW, goal, cfg.max_depth)
    if m is None:
      continue
    m = number_blames(g.exact(m, ctx, LOW, goal))
    if _type_of(m, ctx, LOW) == goal:
      return m
  return None


def gen_typed(cfg: GenConfig, index: int, goal: LType | None = None,
              ctx: Mapping[str, LType] | None = None, salt: str = "") -> tuple[Term, LType] | None:
  """The index-th program of a seeded stream; a random goal when none is given."""
  rng = rng_for(cfg.seed, index, salt)
  if goal is None:
    goal = Generator(cfg, rng).random_type()
  m = gen_program(cfg, rng, goal, ctx)
  return None if m is None else (m, goal)


NI_CONTEXT = {INPUT: INPUT_TYPE}
NI_GOAL = LType(BOOL, LOW)

__all__ = ["GenConfig", "Generator", "gen_program", "gen_typed", "rng_for", "NI_CONTEXT", "NI_GOAL",
           "shape", "all_star"]
